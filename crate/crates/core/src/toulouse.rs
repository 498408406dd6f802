//! Exact elastic amplitude at the solvable coupling point `alpha = 1/2`.
//!
//! At `alpha = 1/2` the Ohmic model maps onto a resonant-level problem and
//! the single-photon S-matrix eigenvalue is known in closed form as a
//! function of the single scaling variable
//!
//! ```text
//! w = pi * delta^2 / (4 * omega_c * k),    k = omega / c,
//! ```
//!
//! (bare gap `delta`, not the renormalized one):
//!
//! ```text
//! s(w) = 1 + [2iw / (1 + 2iw)] *
//!        [ 2i (arccot(2w) + arctan(w / (1 + 2w^2))) + ln(w^2 / (1 + w^2)) ]
//! ```
//!
//! with `arccot(x) = arctan(1/x)` (branch on `(0, pi/2)` for positive
//! argument). The exact amplitude is subunitary at finite `w` — a single
//! photon down-converts against the strongly coupled qubit — and becomes
//! transparent in both limits `w -> 0` (high frequency) and `w -> infinity`
//! (low frequency). The elastic-only probability `P_1 = (1 + |s|^2) / 2`
//! stays within `[1/2, 1]`.
//!
//! [`compare_with_polaron_rwa`] lines this exact amplitude up against the
//! polaron-frame elastic pipeline of [`crate::scattering`] (which keeps only
//! the number-conserving effective coupling, hence "RWA") evaluated at
//! `alpha = 1/2` with the self-consistently renormalized gap.

use crate::model::{Dispersion, ModelParams};
use crate::polaron;
use crate::scattering::{
    self, peak_metrics, ScatteringConfig, ScatteringError, SigmaSource,
};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ToulouseError {
    #[error("the exact solution holds at alpha = 1/2, got alpha = {0}")]
    NotSolvableCoupling(f64),
    #[error("the scaling variable needs a positive frequency, got {0}")]
    NonpositiveFrequency(f64),
    #[error("the exact-vs-polaron comparison is for linear dispersion")]
    WrongDispersion,
    #[error(transparent)]
    Scattering(#[from] ScatteringError),
}

/// Scaling variable `w = pi delta^2 / (4 omega_c k)` for a probe at `omega`.
pub fn w_param(omega: f64, params: &ModelParams) -> Result<f64, ToulouseError> {
    if !(omega > 0.0) {
        return Err(ToulouseError::NonpositiveFrequency(omega));
    }
    let k = omega / params.sound_speed();
    Ok(std::f64::consts::PI * params.delta * params.delta / (4.0 * params.omega_c * k))
}

/// Exact S-matrix eigenvalue `s(w)` at the solvable point.
pub fn s_toulouse(w: f64) -> Complex64 {
    let arccot = |x: f64| (1.0 / x).atan();
    let phase = arccot(2.0 * w) + (w / (1.0 + 2.0 * w * w)).atan();
    let bracket = Complex64::new((w * w / (1.0 + w * w)).ln(), 2.0 * phase);
    let prefactor = Complex64::new(0.0, 2.0 * w) / Complex64::new(1.0, 2.0 * w);
    Complex64::new(1.0, 0.0) + prefactor * bracket
}

/// Probability that the outgoing state stays in the elastic single-photon
/// channel: `P_1 = (1 + |s|^2) / 2`.
pub fn elastic_probability(s: Complex64) -> f64 {
    0.5 * (1.0 + s.norm_sqr())
}

/// Make a sampled phase sequence continuous by unwinding `2 pi` jumps.
pub fn unwrap_phases(phases: &mut [f64]) {
    use std::f64::consts::{PI, TAU};
    for i in 1..phases.len() {
        let mut d = phases[i] - phases[i - 1];
        while d > PI {
            phases[i] -= TAU;
            d -= TAU;
        }
        while d < -PI {
            phases[i] += TAU;
            d += TAU;
        }
    }
}

/// Side-by-side scan of the exact amplitude and the polaron-frame elastic
/// pipeline at the solvable point.
#[derive(Debug, Clone)]
pub struct ToulouseComparison {
    pub omegas: Vec<f64>,
    pub w: Vec<f64>,
    pub r_exact: Vec<f64>,
    pub t_exact: Vec<f64>,
    /// Reflection phase of the exact amplitude, unwrapped along the scan.
    pub arg_r_exact: Vec<f64>,
    /// Transmission phase of the exact amplitude, unwrapped along the scan.
    pub arg_t_exact: Vec<f64>,
    pub r_rwa: Vec<f64>,
    pub t_rwa: Vec<f64>,
    pub p1_exact: Vec<f64>,
    /// Renormalized gap used by the polaron branch.
    pub delta_tilde: f64,
    /// Reflection-maximum position of the exact branch.
    pub omega_peak_exact: Option<f64>,
    /// Reflection-maximum position of the polaron branch.
    pub omega_peak_rwa: Option<f64>,
}

/// Scan both branches at `alpha = 1/2` over ascending `omegas`.
///
/// The polaron branch solves the gap self-consistently and feeds the
/// scaling-limit self-energy through the elastic amplitude; the exact branch
/// evaluates [`s_toulouse`]. Peak positions come from the shared
/// parabolic-refinement extractor, so "maxima within a factor of two in
/// frequency" is a like-for-like comparison.
pub fn compare_with_polaron_rwa(
    params: &ModelParams,
    omegas: &[f64],
) -> Result<ToulouseComparison, ToulouseError> {
    if (params.alpha - 0.5).abs() > 1e-12 {
        return Err(ToulouseError::NotSolvableCoupling(params.alpha));
    }
    if params.dispersion != Dispersion::LinearExponential {
        return Err(ToulouseError::WrongDispersion);
    }
    let solution = polaron::solve_default(params).map_err(ScatteringError::from)?;
    let delta_tilde = solution.delta_tilde;
    let config = ScatteringConfig {
        dephasing_rate: 0.0,
        sigma_source: SigmaSource::ClosedOhmic,
        zero_lamb_shift: false,
    };
    let n = omegas.len();
    let mut w = Vec::with_capacity(n);
    let mut r_exact = Vec::with_capacity(n);
    let mut t_exact = Vec::with_capacity(n);
    let mut arg_r_exact = Vec::with_capacity(n);
    let mut arg_t_exact = Vec::with_capacity(n);
    let mut r_rwa = Vec::with_capacity(n);
    let mut t_rwa = Vec::with_capacity(n);
    let mut p1_exact = Vec::with_capacity(n);
    for &omega in omegas {
        let wi = w_param(omega, params)?;
        let s = s_toulouse(wi);
        let r = 0.5 * (s - 1.0);
        let t = 0.5 * (s + 1.0);
        w.push(wi);
        r_exact.push(r.norm_sqr());
        t_exact.push(t.norm_sqr());
        arg_r_exact.push(r.arg());
        arg_t_exact.push(t.arg());
        p1_exact.push(elastic_probability(s));
        let (amps, _) = scattering::amplitudes_at(omega, delta_tilde, params, &config)?;
        r_rwa.push(amps.reflectivity);
        t_rwa.push(amps.transmissivity);
    }
    unwrap_phases(&mut arg_r_exact);
    unwrap_phases(&mut arg_t_exact);
    let omega_peak_exact = peak_metrics(omegas, &r_exact).map(|m| m.position);
    let omega_peak_rwa = peak_metrics(omegas, &r_rwa).map(|m| m.position);
    Ok(ToulouseComparison {
        omegas: omegas.to_vec(),
        w,
        r_exact,
        t_exact,
        arg_r_exact,
        arg_t_exact,
        r_rwa,
        t_rwa,
        p1_exact,
        delta_tilde,
        omega_peak_exact,
        omega_peak_rwa,
    })
}

/// Logarithmically spaced scan grid, inclusive of both ends.
pub fn log_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && a > 0.0 && b > a, "need 0 < a < b and n >= 2");
    let la = a.ln();
    let step = (b.ln() - la) / (n - 1) as f64;
    (0..n).map(|i| (la + step * i as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{LN_2, PI};

    #[test]
    fn closed_value_at_w_equal_one() {
        // arctan(1/2) + arctan(1/3) = pi/4 makes s(1) expressible in
        // elementary constants: s = 1 + (0.8 + 0.4i)(-ln 2 + i pi/2).
        let s = s_toulouse(1.0);
        let re = 1.0 - 0.8 * LN_2 - 0.2 * PI;
        let im = 0.4 * PI - 0.4 * LN_2;
        assert!((s.re - re).abs() < 1e-12);
        assert!((s.im - im).abs() < 1e-12);
    }

    #[test]
    fn strong_conversion_region_matches_hand_value() {
        let s = s_toulouse(0.1);
        assert!((s.re - 0.256677).abs() < 1e-4);
        assert!((s.im + 0.774360).abs() < 1e-4);
        let p1 = elastic_probability(s);
        assert!((p1 - 0.83276).abs() < 1e-4);
    }

    #[test]
    fn transparent_in_both_scaling_limits() {
        assert!((s_toulouse(1e6) - Complex64::new(1.0, 0.0)).norm() < 1e-5);
        assert!((s_toulouse(1e-8) - Complex64::new(1.0, 0.0)).norm() < 1e-5);
    }

    #[test]
    fn subunitary_with_bounded_elastic_probability() {
        for &w in log_space(1e-4, 1e4, 400).iter() {
            let s = s_toulouse(w);
            assert!(s.norm() <= 1.0 + 1e-12, "|s| > 1 at w = {w}");
            let p1 = elastic_probability(s);
            assert!((0.5..=1.0 + 1e-12).contains(&p1), "P1 out of range at w = {w}");
        }
    }

    #[test]
    fn inelastic_loss_is_real_at_finite_w() {
        assert!(elastic_probability(s_toulouse(1.0)) < 0.999);
        assert!(elastic_probability(s_toulouse(0.1)) < 0.84);
    }

    #[test]
    fn low_frequency_expansion_of_the_loss() {
        // 1 - P1 -> 2 pi w as w -> 0 (up to w ln^2 w corrections).
        let w = 1e-4;
        let loss = 1.0 - elastic_probability(s_toulouse(w));
        assert!((loss / (2.0 * PI * w) - 1.0).abs() < 0.05);
    }

    #[test]
    fn scaling_variable_inverts_the_frequency() {
        let params = ModelParams::new(1.0, 0.5, 100.0, Dispersion::LinearExponential).unwrap();
        let omega_star = PI * params.delta * params.delta / (4.0 * params.omega_c);
        assert!((w_param(omega_star, &params).unwrap() - 1.0).abs() < 1e-14);
        assert!((w_param(2.0 * omega_star, &params).unwrap() - 0.5).abs() < 1e-14);
        assert!(w_param(0.0, &params).is_err());
    }

    #[test]
    fn phase_unwrapping_removes_branch_jumps() {
        let mut phases = vec![3.0, -3.0, 3.0, -3.0];
        unwrap_phases(&mut phases);
        for pair in phases.windows(2) {
            assert!((pair[1] - pair[0]).abs() <= PI);
        }
        assert_eq!(phases[0], 3.0);
    }

    #[test]
    fn comparison_rejects_other_couplings_and_bands() {
        let p = ModelParams::new(1.0, 0.3, 100.0, Dispersion::LinearExponential).unwrap();
        assert!(matches!(
            compare_with_polaron_rwa(&p, &[0.1, 0.2]),
            Err(ToulouseError::NotSolvableCoupling(_))
        ));
        let p = ModelParams::new(1.0, 0.5, 100.0, Dispersion::CosineHard).unwrap();
        assert!(matches!(
            compare_with_polaron_rwa(&p, &[0.1, 0.2]),
            Err(ToulouseError::WrongDispersion)
        ));
    }

    #[test]
    fn comparison_smoke_run_at_moderate_cutoff() {
        let params = ModelParams::new(1.0, 0.5, 1e4, Dispersion::LinearExponential).unwrap();
        let omegas = log_space(1e-5 * params.delta, 1e-2 * params.delta, 300);
        let cmp = compare_with_polaron_rwa(&params, &omegas).unwrap();
        assert!(cmp.delta_tilde > 0.0 && cmp.delta_tilde < 1e-2);
        for i in 0..omegas.len() {
            assert!((cmp.r_exact[i] + cmp.t_exact[i] - cmp.p1_exact[i]).abs() < 1e-12);
            assert!(cmp.r_rwa[i] + cmp.t_rwa[i] - 1.0 < 1e-12);
        }
        let (pe, pr) = (
            cmp.omega_peak_exact.unwrap(),
            cmp.omega_peak_rwa.unwrap(),
        );
        assert!(pe > 0.0 && pr > 0.0);
    }
}
