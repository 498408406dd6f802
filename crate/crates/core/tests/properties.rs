//! Property-based invariants: statements that must hold for *every*
//! parameter draw, not just tuned examples — unitarity with a Hermitian
//! coupling, subunitarity with dephasing, monotone dispersion, Ohmic
//! spectral-density bounds, gap monotonicity, bounded elastic probability at
//! the solvable point, bit-exact Hamiltonian symmetry, and nonnegative rates.

use polaron_waveguide::model::{
    build_grid, dispersion, spectral_density, Dispersion, ModelParams,
};
use polaron_waveguide::{
    build_hamiltonian_matrix, decay_rate_numeric, elastic_probability, elastic_sigma,
    peak_metrics, phase_shift, s_toulouse, sigma_ohmic_closed, solve_self_consistent,
    SelfEnergyError,
};

use proptest::prelude::*;
use std::f64::consts::PI;

fn linear(alpha: f64, omega_c: f64) -> ModelParams {
    ModelParams::new(1.0, alpha, omega_c, Dispersion::LinearExponential).unwrap()
}

fn cosine(alpha: f64, omega_c: f64) -> ModelParams {
    ModelParams::new(1.0, alpha, omega_c, Dispersion::CosineHard).unwrap()
}

proptest! {
    /// |s| = 1 and R + T = 1 for any coupling, gap, and probe frequency.
    #[test]
    fn scattering_is_unitary_without_dephasing(
        alpha in 0.0f64..0.45,
        dt in 0.1f64..1.0,
        x in 0.05f64..6.0,
    ) {
        let omega = x * dt;
        let sigma = sigma_ohmic_closed(omega, dt, alpha).unwrap();
        let amps = phase_shift(omega, dt, elastic_sigma(&sigma), 0.0).unwrap();
        prop_assert!((amps.s.norm() - 1.0).abs() <= 1e-12);
        prop_assert!((amps.reflectivity + amps.transmissivity - 1.0).abs() <= 1e-12);
    }

    /// Any dephasing strictly removes elastic flux.
    #[test]
    fn dephasing_never_amplifies(
        alpha in 0.01f64..0.45,
        dt in 0.1f64..1.0,
        x in 0.05f64..6.0,
        gamma_phi in 1e-6f64..0.5,
    ) {
        let omega = x * dt;
        let sigma = sigma_ohmic_closed(omega, dt, alpha).unwrap();
        let amps = phase_shift(omega, dt, elastic_sigma(&sigma), gamma_phi).unwrap();
        prop_assert!(amps.s.norm() < 1.0);
        prop_assert!(amps.reflectivity + amps.transmissivity < 1.0);
    }

    /// Both dispersion families are nondecreasing over the momentum grid.
    #[test]
    fn dispersion_is_monotone(
        c in 0.5f64..2.0,
        omega_c in 1.0f64..20.0,
        a in 0.01f64..1.0,
        b in 0.01f64..1.0,
    ) {
        let p_lin = linear(0.1, omega_c).with_c(c).unwrap();
        let p_cos = cosine(0.1, omega_c);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let k_lin = (lo * p_lin.resolved_k_max(), hi * p_lin.resolved_k_max());
        prop_assert!(dispersion(k_lin.0, &p_lin) <= dispersion(k_lin.1, &p_lin));
        let k_cos = (lo * PI, hi * PI);
        prop_assert!(dispersion(k_cos.0, &p_cos) <= dispersion(k_cos.1, &p_cos) + 1e-15);
    }

    /// The exponential-cutoff band stays at or below the Ohmic line
    /// `pi*alpha*omega`; the hard cosine band stays at or above it (its van
    /// Hove factor only enhances), meeting it as omega -> 0.
    #[test]
    fn spectral_density_brackets_the_ohmic_line(
        alpha in 0.01f64..0.5,
        omega_c in 1.0f64..50.0,
        x in 0.01f64..0.99,
    ) {
        let ohmic = |omega: f64| PI * alpha * omega;
        let p_lin = linear(alpha, omega_c);
        let omega_lin = x * 5.0 * omega_c;
        let j_lin = spectral_density(omega_lin, &p_lin).unwrap();
        prop_assert!(j_lin <= ohmic(omega_lin) * (1.0 + 1e-12));
        let p_cos = cosine(alpha, omega_c);
        let omega_cos = x * omega_c;
        let j_cos = spectral_density(omega_cos, &p_cos).unwrap();
        prop_assert!(j_cos >= ohmic(omega_cos) * (1.0 - 1e-12));
    }

    /// The exact amplitude at the solvable point never gains flux, and its
    /// elastic probability stays within [1/2, 1].
    #[test]
    fn solvable_point_amplitude_is_subunitary(log_w in -6.0f64..6.0) {
        let s = s_toulouse(10f64.powf(log_w));
        prop_assert!(s.norm() <= 1.0 + 1e-12);
        let p1 = elastic_probability(s);
        prop_assert!(p1 >= 0.5 - 1e-12 && p1 <= 1.0 + 1e-12);
    }

    /// Golden-rule rates are nonnegative everywhere, and vanish above the
    /// hard band top.
    #[test]
    fn decay_rates_are_nonnegative(
        alpha in 0.0f64..0.5,
        dt in 0.1f64..1.0,
        x in 0.01f64..1.5,
    ) {
        let p_lin = linear(alpha, 10.0);
        prop_assert!(decay_rate_numeric(x * 10.0, dt, &p_lin).unwrap() >= 0.0);
        let p_cos = cosine(alpha, 6.0);
        match decay_rate_numeric(x * 12.0, dt, &p_cos) {
            Ok(rate) => {
                prop_assert!(rate >= 0.0);
                if x * 12.0 > 6.0 {
                    prop_assert!(rate == 0.0);
                }
            }
            Err(SelfEnergyError::BandEdgeDivergence { .. }) => {}
            Err(other) => return Err(TestCaseError::fail(format!("{other}"))),
        }
    }

    /// Peak extraction stays inside the scanned window and reports positive
    /// widths whenever it reports any.
    #[test]
    fn peak_extraction_is_well_posed(
        center in 0.3f64..1.7,
        width in 0.02f64..0.3,
        skew in 0.0f64..2.0,
    ) {
        let xs: Vec<f64> = (0..1500).map(|i| 2.0 * i as f64 / 1499.0).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|&x| {
                let u = (x - center) / width;
                (1.0 + skew * (x - center).max(0.0)) / (1.0 + u * u)
            })
            .collect();
        let m = peak_metrics(&xs, &ys).unwrap();
        prop_assert!(m.position >= 0.0 && m.position <= 2.0);
        if let Some(w) = m.fwhm {
            prop_assert!(w > 0.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// The renormalized gap lies in (0, delta] and shrinks with coupling.
    #[test]
    fn gap_is_bounded_and_monotone_in_coupling(
        a1 in 0.0f64..0.4,
        a2 in 0.0f64..0.4,
        log_wc in 1.0f64..4.0,
    ) {
        let omega_c = 10f64.powf(log_wc);
        let (lo, hi) = if a1 < a2 { (a1, a2) } else { (a2, a1) };
        let solve = |alpha: f64| {
            let p = linear(alpha, omega_c);
            let grid = build_grid(&p).unwrap();
            solve_self_consistent(&p, &grid, 1e-11, 100_000).unwrap().delta_tilde
        };
        let d_lo = solve(lo);
        let d_hi = solve(hi);
        prop_assert!(d_lo > 0.0 && d_lo <= 1.0 + 1e-15);
        prop_assert!(d_hi > 0.0 && d_hi <= 1.0 + 1e-15);
        prop_assert!(d_hi <= d_lo * (1.0 + 1e-9));
    }

    /// The single-excitation Hamiltonian is bit-exact symmetric for any
    /// grid size and coupling.
    #[test]
    fn hamiltonian_symmetry_is_exact(
        alpha in 0.0f64..0.4,
        m in 8usize..24,
    ) {
        let p = cosine(alpha, 6.0).with_num_modes(m).unwrap();
        let grid = build_grid(&p).unwrap();
        let sol = solve_self_consistent(&p, &grid, 1e-10, 10_000).unwrap();
        let h = build_hamiltonian_matrix(sol.delta_tilde, &sol.f, &grid, true);
        for i in 0..h.nrows() {
            for j in 0..i {
                prop_assert!(h[(i, j)] == h[(j, i)]);
            }
        }
    }
}
