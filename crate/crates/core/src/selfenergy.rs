//! Level shift and radiative width of the dressed qubit.
//!
//! In the polaron frame the single-excitation qubit level couples to the
//! photon band through the effective vertex `V_k = 2*sqrt(2)*delta_tilde*f_k
//! / sqrt(L)`, giving the retarded function
//!
//! ```text
//! Sigma(omega) = sum_k V_k^2 / (omega - omega_k + i0)
//!              = (4 delta_tilde^2 / pi) * P.V. int_0^kmax dk f_k^2 / (omega - omega(k))
//!                - (i/2) * Gamma(omega)
//! ```
//!
//! with `Gamma(omega) = 8 delta_tilde^2 f^2(k_0) / |omega'(k_0)|` the on-shell
//! golden-rule rate at the resonant momentum `omega(k_0) = omega`. The real
//! part is the Lamb shift `delta_L`, and the whole object feeds the elastic
//! phase shift in [`crate::scattering`].
//!
//! [`sigma_ohmic_closed`] is the scaling-limit closed form for the
//! linear-dispersion Ohmic bath (cutoff sent to infinity analytically);
//! [`lamb_shift_numeric`] and [`decay_rate_numeric`] evaluate the same object
//! for either dispersion family from its actual band structure. The two
//! routes agree part-by-part at large cutoff, which the acceptance suite
//! checks at the half-percent level.

use crate::model::{coupling, dispersion, group_velocity, Dispersion, ModelParams};
use crate::quad;
use num_complex::Complex64;
use thiserror::Error;

/// Relative window around the band top inside which the cosine-band rate is
/// reported as divergent rather than as a huge finite number (the group
/// velocity vanishes at the band edge like a square root).
pub const BAND_EDGE_WINDOW: f64 = 1e-6;

/// Errors from self-energy evaluation.
#[derive(Debug, Error, PartialEq)]
pub enum SelfEnergyError {
    #[error("self-energy is defined for positive probe frequency, got {0}")]
    NonpositiveFrequency(f64),
    #[error(
        "probe frequency {omega} is within {BAND_EDGE_WINDOW:e} (relative) of \
         the band top {band_top}: the van Hove divergence makes the on-shell \
         rate meaningless here"
    )]
    BandEdgeDivergence { omega: f64, band_top: f64 },
    #[error("displacements need a positive gap, got delta_tilde = {0}")]
    NonpositiveGap(f64),
}

/// Complex self-energy split into its physical parts:
/// `value = lamb_shift - i * decay_rate / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfEnergyValue {
    pub value: Complex64,
    /// Real part: the Lamb shift `delta_L(omega)`.
    pub lamb_shift: f64,
    /// `-2 Im Sigma`: the radiative width `Gamma(omega)`.
    pub decay_rate: f64,
}

impl SelfEnergyValue {
    pub fn from_parts(lamb_shift: f64, decay_rate: f64) -> Self {
        Self {
            value: Complex64::new(lamb_shift, -0.5 * decay_rate),
            lamb_shift,
            decay_rate,
        }
    }
}

fn check_inputs(omega: f64, delta_tilde: f64) -> Result<(), SelfEnergyError> {
    if !(omega > 0.0) {
        return Err(SelfEnergyError::NonpositiveFrequency(omega));
    }
    if !(delta_tilde > 0.0) {
        return Err(SelfEnergyError::NonpositiveGap(delta_tilde));
    }
    Ok(())
}

/// Scaling-limit closed form for the Ohmic bath with linear dispersion,
/// cutoff taken to infinity analytically:
///
/// ```text
/// Sigma(omega) = [2 delta_tilde^2 alpha / (omega + delta_tilde)^2]
///                * [omega ln(omega/delta_tilde) - omega - delta_tilde - i pi omega]
/// ```
///
/// At `omega = delta_tilde` this gives `delta_L = -alpha*delta_tilde` and
/// `Gamma = pi*alpha*delta_tilde` exactly.
pub fn sigma_ohmic_closed(
    omega: f64,
    delta_tilde: f64,
    alpha: f64,
) -> Result<SelfEnergyValue, SelfEnergyError> {
    check_inputs(omega, delta_tilde)?;
    let prefactor = 2.0 * delta_tilde * delta_tilde * alpha / (omega + delta_tilde).powi(2);
    let lamb_shift = prefactor * (omega * (omega / delta_tilde).ln() - omega - delta_tilde);
    let decay_rate = 2.0 * prefactor * std::f64::consts::PI * omega;
    Ok(SelfEnergyValue::from_parts(lamb_shift, decay_rate))
}

/// Resonant momentum `k_0` with `omega(k_0) = omega`, if the probe frequency
/// lies inside the photon band.
fn resonant_momentum(omega: f64, params: &ModelParams) -> Option<f64> {
    match params.dispersion {
        Dispersion::LinearExponential => Some(omega / params.c),
        Dispersion::CosineHard => {
            (omega < params.omega_c).then(|| 2.0 * (omega / params.omega_c).asin())
        }
    }
}

fn band_top(params: &ModelParams) -> Option<f64> {
    match params.dispersion {
        Dispersion::LinearExponential => None,
        Dispersion::CosineHard => Some(params.omega_c),
    }
}

fn guard_band_edge(omega: f64, params: &ModelParams) -> Result<(), SelfEnergyError> {
    if let Some(top) = band_top(params) {
        if (omega - top).abs() < BAND_EDGE_WINDOW * top {
            return Err(SelfEnergyError::BandEdgeDivergence {
                omega,
                band_top: top,
            });
        }
    }
    Ok(())
}

/// On-shell golden-rule width `Gamma(omega) = 8 delta_tilde^2 f^2(k_0) /
/// |omega'(k_0)|`, zero above the band top (no resonant mode to decay into).
pub fn decay_rate_numeric(
    omega: f64,
    delta_tilde: f64,
    params: &ModelParams,
) -> Result<f64, SelfEnergyError> {
    check_inputs(omega, delta_tilde)?;
    guard_band_edge(omega, params)?;
    let Some(k0) = resonant_momentum(omega, params) else {
        return Ok(0.0);
    };
    let f = coupling(k0, params) / (omega + delta_tilde);
    Ok(8.0 * delta_tilde * delta_tilde * f * f / group_velocity(k0, params))
}

/// Principal-value Lamb shift
/// `delta_L(omega) = (4 delta_tilde^2 / pi) P.V. int_0^kmax dk f^2(k) / (omega - omega(k))`
/// for the dispersion family of `params`, with the displacement profile
/// evaluated analytically at the supplied gap.
///
/// Inside the band the pole is removed by global subtraction: the smooth part
/// `[h(k) - h(k_0)] / (omega - omega(k))` is integrated on panels whose edges
/// pin `k_0` exactly (quadrature nodes are interior, so they never land on
/// the removable point), and the subtracted remainder
/// `h(k_0) * P.V. int dk / (omega - omega(k))` is added in closed form.
/// Above the band top the integrand has no pole and is integrated directly.
pub fn lamb_shift_numeric(
    omega: f64,
    delta_tilde: f64,
    params: &ModelParams,
) -> Result<f64, SelfEnergyError> {
    check_inputs(omega, delta_tilde)?;
    guard_band_edge(omega, params)?;
    let k_top = params.resolved_k_max();
    let prefactor = 4.0 * delta_tilde * delta_tilde / std::f64::consts::PI;
    let h = |k: f64| {
        let f = coupling(k, params) / (dispersion(k, params) + delta_tilde);
        prefactor * f * f
    };

    let in_band = match params.dispersion {
        Dispersion::LinearExponential => omega < params.c * k_top,
        Dispersion::CosineHard => omega < params.omega_c,
    };
    if !in_band {
        let edges = above_band_edges(params, k_top);
        return Ok(quad::integrate_panels(
            |k| h(k) / (omega - dispersion(k, params)),
            &edges,
        ));
    }

    let k0 = resonant_momentum(omega, params).expect("in-band probe");
    let h0 = h(k0);
    // Slope of h at k_0, for the removable point should a node ever graze it.
    let eps = 1e-6 * k0.min(k_top - k0).max(f64::MIN_POSITIVE);
    let h_slope = (h(k0 + eps) - h(k0 - eps)) / (2.0 * eps);
    let vg0 = group_velocity(k0, params);

    let smooth = |k: f64| {
        let d = omega - dispersion(k, params);
        if d.abs() < 1e-12 * omega {
            return -h_slope / vg0;
        }
        (h(k) - h0) / d
    };
    let edges = in_band_edges(k0, params, k_top);
    let subtracted = quad::integrate_panels(smooth, &edges);
    Ok(subtracted + h0 * pv_remainder(omega, params, k_top))
}

/// Both self-energy parts from the band structure, packaged as
/// `delta_L - i Gamma / 2`.
pub fn sigma_numeric(
    omega: f64,
    delta_tilde: f64,
    params: &ModelParams,
) -> Result<SelfEnergyValue, SelfEnergyError> {
    let lamb = lamb_shift_numeric(omega, delta_tilde, params)?;
    let gamma = decay_rate_numeric(omega, delta_tilde, params)?;
    Ok(SelfEnergyValue::from_parts(lamb, gamma))
}

/// Panel edges for an in-band probe: linear resolution below `k_0`, guard
/// edges bracketing it, and (for the unbounded linear band) logarithmic
/// panels out to the momentum cutoff.
fn in_band_edges(k0: f64, params: &ModelParams, k_top: f64) -> Vec<f64> {
    let mut edges = quad::linear_edges(0.0, k0, 6);
    match params.dispersion {
        Dispersion::LinearExponential => {
            edges.extend_from_slice(&quad::log_edges(k0, k_top, 8)[1..]);
        }
        Dispersion::CosineHard => {
            edges.extend_from_slice(&quad::linear_edges(k0, k_top, 12)[1..]);
        }
    }
    quad::insert_edges(
        edges,
        &[0.9 * k0, 0.99 * k0, 1.01 * k0, 1.1 * k0],
    )
}

fn above_band_edges(params: &ModelParams, k_top: f64) -> Vec<f64> {
    match params.dispersion {
        Dispersion::LinearExponential => {
            let mut edges = quad::linear_edges(0.0, (1e-3 * k_top).min(1.0), 4);
            let lo = *edges.last().unwrap();
            edges.extend_from_slice(&quad::log_edges(lo, k_top, 8)[1..]);
            edges
        }
        Dispersion::CosineHard => quad::linear_edges(0.0, k_top, 16),
    }
}

/// Closed form of `P.V. int_0^kmax dk / (omega - omega(k))` for an in-band
/// probe.
fn pv_remainder(omega: f64, params: &ModelParams, k_top: f64) -> f64 {
    match params.dispersion {
        Dispersion::LinearExponential => {
            // P.V. int_0^K dk/(omega - c k) = (1/c) ln(omega / (cK - omega))
            (omega / (params.c * k_top - omega)).ln() / params.c
        }
        Dispersion::CosineHard => {
            // Weierstrass substitution on omega - omega_c sin(k/2); the two
            // real roots t1 < 1 < t2 of the resulting quadratic satisfy
            // t1 t2 = 1, t2 - t1 = 2q/omega with q = sqrt(omega_c^2-omega^2).
            let oc = params.omega_c;
            let q = ((oc - omega) * (oc + omega)).sqrt();
            let t1 = omega / (oc + q); // cancellation-stable form of (oc-q)/omega
            let t2 = (oc + q) / omega;
            (2.0 / q) * (t1 * (t2 - 1.0) / (t2 * (1.0 - t1))).ln()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;
    use std::f64::consts::PI;

    fn linear(alpha: f64, omega_c: f64) -> ModelParams {
        ModelParams::new(1.0, alpha, omega_c, Dispersion::LinearExponential).unwrap()
    }

    fn cosine(alpha: f64, omega_c: f64) -> ModelParams {
        ModelParams::new(1.0, alpha, omega_c, Dispersion::CosineHard).unwrap()
    }

    #[test]
    fn closed_form_at_the_dressed_gap() {
        let dt = 0.37;
        let alpha = 0.2;
        let sigma = sigma_ohmic_closed(dt, dt, alpha).unwrap();
        assert!((sigma.lamb_shift - (-alpha * dt)).abs() < 1e-15);
        assert!((sigma.decay_rate - PI * alpha * dt).abs() < 1e-15);
        assert_eq!(sigma.value.re, sigma.lamb_shift);
        assert_eq!(sigma.value.im, -0.5 * sigma.decay_rate);
    }

    #[test]
    fn closed_form_rejects_nonpositive_frequency() {
        assert!(matches!(
            sigma_ohmic_closed(0.0, 1.0, 0.1),
            Err(SelfEnergyError::NonpositiveFrequency(_))
        ));
        assert!(matches!(
            sigma_ohmic_closed(-1.0, 1.0, 0.1),
            Err(SelfEnergyError::NonpositiveFrequency(_))
        ));
    }

    #[test]
    fn linear_rate_matches_its_closed_form() {
        let p = linear(0.15, 50.0);
        let dt = 0.8;
        for &omega in &[0.1, 0.8, 2.5, 7.0] {
            let got = decay_rate_numeric(omega, dt, &p).unwrap();
            let expected = 4.0 * PI * p.alpha * dt * dt * omega * (-omega / p.omega_c).exp()
                / (omega + dt).powi(2);
            assert!((got - expected).abs() <= 1e-14 * expected.abs());
        }
    }

    #[test]
    fn cosine_rate_is_ohmic_deep_in_the_band_and_zero_above() {
        let p = cosine(0.1, 200.0);
        let dt = 0.5;
        let omega = 0.4;
        let got = decay_rate_numeric(omega, dt, &p).unwrap();
        let ohmic = 4.0 * PI * p.alpha * dt * dt * omega / (omega + dt).powi(2);
        assert!((got - ohmic).abs() / ohmic < 1e-4);
        assert_eq!(decay_rate_numeric(300.0, dt, &p).unwrap(), 0.0);
    }

    #[test]
    fn rate_vanishes_with_the_probe_frequency() {
        let p = linear(0.2, 10.0);
        assert!(decay_rate_numeric(1e-12, 1.0, &p).unwrap() < 1e-11);
    }

    #[test]
    fn band_edge_window_raises_the_divergence_error() {
        let p = cosine(0.1, 6.0);
        let err = decay_rate_numeric(6.0 * (1.0 - 1e-8), 0.5, &p).unwrap_err();
        assert!(matches!(err, SelfEnergyError::BandEdgeDivergence { .. }));
        let err = lamb_shift_numeric(6.0, 0.5, &p).unwrap_err();
        assert!(matches!(err, SelfEnergyError::BandEdgeDivergence { .. }));
    }

    #[test]
    fn lamb_shift_changes_sign_where_the_closed_form_does() {
        // omega ln(omega/dt) - omega - dt crosses zero near omega = 3.591 dt.
        let p = linear(0.1, 1e6);
        let dt = 1.0;
        assert!(lamb_shift_numeric(0.5, dt, &p).unwrap() < 0.0);
        assert!(lamb_shift_numeric(4.5, dt, &p).unwrap() > 0.0);
        let near_zero = lamb_shift_numeric(3.59112, dt, &p).unwrap();
        assert!(near_zero.abs() < 1e-3 * p.alpha * dt);
    }

    #[test]
    fn lamb_shift_is_positive_above_the_cosine_band() {
        // Every denominator omega - omega(k) is positive there.
        let p = cosine(0.1, 6.0);
        assert!(lamb_shift_numeric(9.0, 0.5, &p).unwrap() > 0.0);
    }

    #[test]
    fn numeric_parts_assemble_into_the_complex_value() {
        let p = linear(0.1, 1e4);
        let sigma = sigma_numeric(0.7, 0.9, &p).unwrap();
        assert_eq!(sigma.value.re, sigma.lamb_shift);
        assert_eq!(sigma.value.im, -0.5 * sigma.decay_rate);
        assert!(sigma.decay_rate > 0.0);
    }
}
