//! Single-photon elastic scattering off the dressed qubit.
//!
//! The elastic S-matrix eigenvalue in the even channel is
//!
//! ```text
//! s(omega) = [X - (omega + dt) * conj(Sigma_el)] / [X - (omega + dt) * Sigma_el],
//! X = (omega - dt) * dt,    dt = delta_tilde,
//! ```
//!
//! with `r = (s-1)/2`, `t = (s+1)/2`. With a Hermitian coupling the numerator
//! is the complex conjugate of the denominator, so `|s| = 1` and `R + T = 1`
//! identically — unitarity holds at every frequency regardless of how
//! accurately `Sigma_el` is computed.
//!
//! `Sigma_el` is *half* the level self-energy of [`crate::selfenergy`]: the
//! polaron-frame Hamiltonian scatters photons both through the qubit level
//! (vertex `V_k ∝ f_k`) and through the rank-one quadratic displacement term
//! (`∝ f_p f_k`), and resumming both channels exactly (the potential is
//! rank-one, so its Lippmann–Schwinger series closes) collapses the pair into
//! the single-pole form above with the self-energy halved. [`elastic_sigma`]
//! performs that halving; see its documentation. The payoff is an exact
//! identity: the scattering resonance coincides with the pole of the
//! single-excitation resolvent, i.e. with the emission-spectrum peak of
//! [`crate::dynamics`].
//!
//! Pure dephasing enters as `Sigma -> Sigma - i*gamma_phi` in **both**
//! numerator and denominator (the unconjugated shift): the numerator is then
//! no longer the conjugate of the denominator and `|s| < 1`, the lost flux
//! being the inelastically redistributed part.

use crate::model::{Dispersion, ModelParams};
use crate::polaron::{self, PolaronError};
use crate::selfenergy::{self, SelfEnergyError, SelfEnergyValue};
use num_complex::Complex64;
use thiserror::Error;

/// Errors from amplitude evaluation and lineshape scans.
#[derive(Debug, Error)]
pub enum ScatteringError {
    #[error(
        "amplitude is 0/0 at omega = {omega}: probe exactly on the bare \
         resonance with no self-energy or dephasing to regularize it"
    )]
    NoCoupling { omega: f64 },
    #[error("lineshape scan needs at least two frequencies")]
    EmptyScan,
    #[error(transparent)]
    SelfEnergy(#[from] SelfEnergyError),
    #[error(transparent)]
    Polaron(#[from] PolaronError),
}

/// Where the self-energy feeding the amplitude comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SigmaSource {
    /// Scaling-limit closed form (linear dispersion, infinite cutoff).
    #[default]
    ClosedOhmic,
    /// Principal-value quadrature on the actual band of the model.
    Numeric,
}

/// Knobs for amplitude evaluation.
#[derive(Debug, Clone, Copy, Default)]
pub struct ScatteringConfig {
    /// Pure-dephasing rate `gamma_phi >= 0`; zero keeps scattering unitary.
    pub dephasing_rate: f64,
    /// Self-energy provenance.
    pub sigma_source: SigmaSource,
    /// Diagnostic mode: discard the Lamb shift, keep the width. Exposes the
    /// pure Markov resonance at `omega = delta_tilde`.
    pub zero_lamb_shift: bool,
}

/// Amplitudes at one probe frequency.
#[derive(Debug, Clone, Copy)]
pub struct ScatteringAmplitudes {
    /// Even-channel S-matrix eigenvalue.
    pub s: Complex64,
    /// Reflection amplitude `(s-1)/2`.
    pub r: Complex64,
    /// Transmission amplitude `(s+1)/2`.
    pub t: Complex64,
    /// `|r|^2`.
    pub reflectivity: f64,
    /// `|t|^2`.
    pub transmissivity: f64,
}

/// Half the level self-energy: the object Eq.-form amplitude must be fed.
///
/// Sketch of why the factor is exactly 1/2: in the single-excitation sector
/// the photon feels the rank-one potential
/// `w(z) = a^2 (z + dt) / (2 dt (z - dt))` (with `a` the level vertex
/// strength), whose exact T-matrix is `w / (1 - w g)` with `g` the band
/// resolvent diagonal. Unfolding `s = 1 - 2 pi i rho T` and writing
/// `G(omega) = sum_k V_k^2 / (omega - omega_k + i0)` gives
/// `s = [2X - (omega+dt) G*] / [2X - (omega+dt) G]`, i.e. the printed
/// amplitude with `Sigma_el = G/2`.
pub fn elastic_sigma(sigma: &SelfEnergyValue) -> Complex64 {
    0.5 * sigma.value
}

/// The elastic amplitude at probe frequency `omega`, for a given elastic
/// self-energy (already halved by [`elastic_sigma`] when it comes from the
/// level self-energy) and dephasing rate.
pub fn phase_shift(
    omega: f64,
    delta_tilde: f64,
    sigma_elastic: Complex64,
    dephasing_rate: f64,
) -> Result<ScatteringAmplitudes, ScatteringError> {
    let x = (omega - delta_tilde) * delta_tilde;
    let drive = omega + delta_tilde;
    let shift = Complex64::new(0.0, -dephasing_rate);
    let numerator = Complex64::new(x, 0.0) - drive * (sigma_elastic.conj() + shift);
    let denominator = Complex64::new(x, 0.0) - drive * (sigma_elastic + shift);
    let scale = x.abs().max(drive.abs() * (sigma_elastic.norm() + dephasing_rate));
    if denominator.norm() <= f64::EPSILON * scale {
        return Err(ScatteringError::NoCoupling { omega });
    }
    let s = numerator / denominator;
    let r = 0.5 * (s - 1.0);
    let t = 0.5 * (s + 1.0);
    Ok(ScatteringAmplitudes {
        s,
        r,
        t,
        reflectivity: r.norm_sqr(),
        transmissivity: t.norm_sqr(),
    })
}

/// Reflection and transmission probabilities of an S-matrix eigenvalue.
pub fn reflection_transmission(s: Complex64) -> (f64, f64) {
    let r = 0.5 * (s - 1.0);
    let t = 0.5 * (s + 1.0);
    (r.norm_sqr(), t.norm_sqr())
}

/// Weak-coupling Markov reference amplitude: a Lorentzian of half-width
/// `gamma/2` pinned at `omega = delta_tilde`,
/// `r = -i (omega+dt) (gamma/2) / [(omega-dt) dt + i (omega+dt) (gamma/2)]`.
/// `gamma` here is the *elastic* width (half the population decay rate at
/// resonance in this model's conventions).
pub fn markov_reflection(omega: f64, delta_tilde: f64, gamma: f64) -> Complex64 {
    let x = (omega - delta_tilde) * delta_tilde;
    let half = 0.5 * gamma * (omega + delta_tilde);
    Complex64::new(0.0, -half) / Complex64::new(x, half)
}

/// Self-energy with a pure-dephasing channel folded in: the complex value
/// shifts by `-i*gamma_phi`, so the total width grows by `2*gamma_phi` while
/// the Lamb shift is untouched.
pub fn apply_dephasing(sigma: &SelfEnergyValue, dephasing_rate: f64) -> SelfEnergyValue {
    SelfEnergyValue::from_parts(sigma.lamb_shift, sigma.decay_rate + 2.0 * dephasing_rate)
}

fn sigma_at(
    omega: f64,
    delta_tilde: f64,
    params: &ModelParams,
    config: &ScatteringConfig,
) -> Result<SelfEnergyValue, SelfEnergyError> {
    let sigma = match config.sigma_source {
        SigmaSource::ClosedOhmic => {
            selfenergy::sigma_ohmic_closed(omega, delta_tilde, params.alpha)?
        }
        SigmaSource::Numeric => selfenergy::sigma_numeric(omega, delta_tilde, params)?,
    };
    Ok(if config.zero_lamb_shift {
        SelfEnergyValue::from_parts(0.0, sigma.decay_rate)
    } else {
        sigma
    })
}

/// Amplitudes and the (unhalved) self-energy at a single probe frequency,
/// for an already-solved gap.
pub fn amplitudes_at(
    omega: f64,
    delta_tilde: f64,
    params: &ModelParams,
    config: &ScatteringConfig,
) -> Result<(ScatteringAmplitudes, SelfEnergyValue), ScatteringError> {
    let sigma = sigma_at(omega, delta_tilde, params, config)?;
    let amps = phase_shift(
        omega,
        delta_tilde,
        elastic_sigma(&sigma),
        config.dephasing_rate,
    )?;
    Ok((amps, sigma))
}

/// Peak location, height, width, and skew of a sampled curve.
#[derive(Debug, Clone, Copy)]
pub struct PeakMetrics {
    /// Peak position, parabolically refined when the maximum is interior.
    pub position: f64,
    /// Peak height (refined along with the position).
    pub height: f64,
    /// Full width at half maximum, when both crossings lie inside the scan.
    pub fwhm: Option<f64>,
    /// `(right half-width - left half-width) / fwhm`; positive means the
    /// peak leans toward high frequency.
    pub asymmetry: Option<f64>,
}

/// Extract peak metrics from a sampled curve. Works on any `(x, y)` pair with
/// ascending `x` — reflection lineshapes here, emission spectra in
/// [`crate::dynamics`].
pub fn peak_metrics(xs: &[f64], ys: &[f64]) -> Option<PeakMetrics> {
    if xs.len() < 2 || xs.len() != ys.len() {
        return None;
    }
    let imax = (0..ys.len()).max_by(|&a, &b| ys[a].partial_cmp(&ys[b]).unwrap())?;
    let (position, height) = if imax > 0 && imax + 1 < ys.len() {
        parabolic_vertex(
            (xs[imax - 1], ys[imax - 1]),
            (xs[imax], ys[imax]),
            (xs[imax + 1], ys[imax + 1]),
        )
    } else {
        (xs[imax], ys[imax])
    };
    let half = 0.5 * height;
    let left = crossing(xs, ys, imax, half, false);
    let right = crossing(xs, ys, imax, half, true);
    let (fwhm, asymmetry) = match (left, right) {
        (Some(lo), Some(hi)) => {
            let width = hi - lo;
            (Some(width), Some(((hi - position) - (position - lo)) / width))
        }
        _ => (None, None),
    };
    Some(PeakMetrics {
        position,
        height,
        fwhm,
        asymmetry,
    })
}

fn parabolic_vertex(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> (f64, f64) {
    let (x0, y0) = a;
    let (x1, y1) = b;
    let (x2, y2) = c;
    let d1 = x1 - x0;
    let d2 = x1 - x2;
    let num = d1 * d1 * (y1 - y2) - d2 * d2 * (y1 - y0);
    let den = d1 * (y1 - y2) - d2 * (y1 - y0);
    if den.abs() < 1e-300 {
        return (x1, y1);
    }
    let xv = x1 - 0.5 * num / den;
    // Height from the same parabola, via Lagrange interpolation at xv.
    let l0 = (xv - x1) * (xv - x2) / ((x0 - x1) * (x0 - x2));
    let l1 = (xv - x0) * (xv - x2) / ((x1 - x0) * (x1 - x2));
    let l2 = (xv - x0) * (xv - x1) / ((x2 - x0) * (x2 - x1));
    (xv, y0 * l0 + y1 * l1 + y2 * l2)
}

fn crossing(xs: &[f64], ys: &[f64], from: usize, level: f64, rightward: bool) -> Option<f64> {
    let mut i = from;
    loop {
        let j = if rightward {
            if i + 1 >= ys.len() {
                return None;
            }
            i + 1
        } else {
            if i == 0 {
                return None;
            }
            i - 1
        };
        if ys[j] < level {
            let frac = (ys[i] - level) / (ys[i] - ys[j]);
            return Some(xs[i] + frac * (xs[j] - xs[i]));
        }
        i = j;
    }
}

/// A scanned reflection lineshape with its resonance metrics.
#[derive(Debug, Clone)]
pub struct Lineshape {
    pub omegas: Vec<f64>,
    pub reflectivities: Vec<f64>,
    pub transmissivities: Vec<f64>,
    pub r: Vec<Complex64>,
    pub t: Vec<Complex64>,
    pub lamb_shifts: Vec<f64>,
    pub decay_rates: Vec<f64>,
    /// Renormalized gap used for the scan.
    pub delta_tilde: f64,
    /// Resonance position (reflectivity maximum, parabolically refined).
    pub omega_reson: f64,
    /// Full width at half maximum of the reflectivity peak.
    pub fwhm: Option<f64>,
    /// Coupling strength read back from the width via the weak-coupling
    /// calibration `fwhm = pi * alpha * delta_tilde`; a lower bound on alpha
    /// because interaction corrections only narrow the relative width.
    pub alpha_lower: Option<f64>,
    /// Peak skew `(right - left) half-width difference over fwhm`.
    pub asymmetry: Option<f64>,
    /// Human-readable notes (scan-window warnings and the like).
    pub diagnostics: Vec<String>,
}

/// Solve the polaron gap for `params`, scan the elastic reflectivity over
/// `omegas` (ascending), and extract resonance metrics.
pub fn compute_lineshape(
    params: &ModelParams,
    config: &ScatteringConfig,
    omegas: &[f64],
) -> Result<Lineshape, ScatteringError> {
    if omegas.len() < 2 {
        return Err(ScatteringError::EmptyScan);
    }
    let solution = polaron::solve_default(params)?;
    let delta_tilde = solution.delta_tilde;
    let n = omegas.len();
    let mut reflectivities = Vec::with_capacity(n);
    let mut transmissivities = Vec::with_capacity(n);
    let mut r = Vec::with_capacity(n);
    let mut t = Vec::with_capacity(n);
    let mut lamb_shifts = Vec::with_capacity(n);
    let mut decay_rates = Vec::with_capacity(n);
    for &omega in omegas {
        let (amps, sigma) = amplitudes_at(omega, delta_tilde, params, config)?;
        reflectivities.push(amps.reflectivity);
        transmissivities.push(amps.transmissivity);
        r.push(amps.r);
        t.push(amps.t);
        lamb_shifts.push(sigma.lamb_shift);
        decay_rates.push(sigma.decay_rate);
    }
    let mut diagnostics = Vec::new();
    let metrics = peak_metrics(omegas, &reflectivities).expect("n >= 2");
    if metrics.fwhm.is_none() {
        diagnostics.push(
            "half-maximum crossings not bracketed by the scan; widen the \
             frequency window to resolve the resonance width"
                .to_string(),
        );
    }
    let alpha_lower = metrics
        .fwhm
        .map(|w| w / (std::f64::consts::PI * delta_tilde));
    if params.dispersion == Dispersion::CosineHard
        && omegas.last().copied().unwrap_or(0.0) > params.omega_c
    {
        diagnostics.push(
            "scan crosses the band top; reflectivity is reported only from \
             the propagating band"
                .to_string(),
        );
    }
    Ok(Lineshape {
        omegas: omegas.to_vec(),
        reflectivities,
        transmissivities,
        r,
        t,
        lamb_shifts,
        decay_rates,
        delta_tilde,
        omega_reson: metrics.position,
        fwhm: metrics.fwhm,
        alpha_lower,
        asymmetry: metrics.asymmetry,
        diagnostics,
    })
}

/// Evenly spaced scan grid, inclusive of both ends.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "a scan needs at least two points");
    let step = (b - a) / (n - 1) as f64;
    (0..n).map(|i| a + step * i as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Dispersion;

    fn closed_sigma(omega: f64, dt: f64, alpha: f64) -> SelfEnergyValue {
        selfenergy::sigma_ohmic_closed(omega, dt, alpha).unwrap()
    }

    #[test]
    fn hermitian_coupling_keeps_scattering_unitary() {
        let dt = 0.8;
        for &omega in &[0.1, 0.5, 0.8, 1.7, 4.0] {
            let sigma = closed_sigma(omega, dt, 0.25);
            let amps = phase_shift(omega, dt, elastic_sigma(&sigma), 0.0).unwrap();
            assert!((amps.s.norm() - 1.0).abs() < 1e-14);
            assert!((amps.reflectivity + amps.transmissivity - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn no_self_energy_means_no_scattering() {
        let amps = phase_shift(2.0, 1.0, Complex64::new(0.0, 0.0), 0.0).unwrap();
        assert_eq!(amps.s, Complex64::new(1.0, 0.0));
        assert_eq!(amps.reflectivity, 0.0);
    }

    #[test]
    fn pure_width_reflects_fully_on_resonance() {
        let dt = 1.0;
        let sigma = Complex64::new(0.0, -0.05); // width only, no shift
        let amps = phase_shift(dt, dt, sigma, 0.0).unwrap();
        assert!((amps.r + Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((amps.reflectivity - 1.0).abs() < 1e-14);
    }

    #[test]
    fn degenerate_point_is_reported_not_divided() {
        let err = phase_shift(1.0, 1.0, Complex64::new(0.0, 0.0), 0.0).unwrap_err();
        assert!(matches!(err, ScatteringError::NoCoupling { .. }));
    }

    #[test]
    fn markov_reference_peaks_at_unity_on_resonance() {
        let r = markov_reflection(1.0, 1.0, 0.03);
        assert!((r.norm_sqr() - 1.0).abs() < 1e-14);
        let r_off = markov_reflection(1.5, 1.0, 0.03);
        assert!(r_off.norm_sqr() < 0.01);
    }

    #[test]
    fn dephasing_breaks_unitarity_downward() {
        let dt = 1.0;
        for &omega in &[0.6, 1.0, 1.4] {
            let sigma = closed_sigma(omega, dt, 0.1);
            let amps = phase_shift(omega, dt, elastic_sigma(&sigma), 0.05).unwrap();
            assert!(amps.s.norm() < 1.0);
            assert!(amps.reflectivity + amps.transmissivity < 1.0);
        }
    }

    #[test]
    fn dephasing_bookkeeping_widens_without_shifting() {
        let sigma = closed_sigma(0.9, 1.0, 0.1);
        let shifted = apply_dephasing(&sigma, 0.02);
        assert_eq!(shifted.lamb_shift, sigma.lamb_shift);
        assert!((shifted.decay_rate - sigma.decay_rate - 0.04).abs() < 1e-15);
        assert!((shifted.value.im - sigma.value.im + 0.02).abs() < 1e-15);
    }

    #[test]
    fn peak_metrics_on_an_exact_lorentzian() {
        let xs = linspace(0.0, 2.0, 2001);
        let g = 0.1; // half width
        let ys: Vec<f64> = xs
            .iter()
            .map(|&x| 1.0 / (1.0 + ((x - 1.0) / g).powi(2)))
            .collect();
        let m = peak_metrics(&xs, &ys).unwrap();
        assert!((m.position - 1.0).abs() < 1e-9);
        assert!((m.height - 1.0).abs() < 1e-9);
        assert!((m.fwhm.unwrap() - 2.0 * g).abs() < 1e-6);
        assert!(m.asymmetry.unwrap().abs() < 1e-6);
    }

    #[test]
    fn lineshape_smoke_test_against_frozen_scan() {
        let params =
            ModelParams::new(1.0, 0.1, 1e6, Dispersion::LinearExponential).unwrap();
        let config = ScatteringConfig::default();
        let dt_guess = 0.2567; // rough scale only, for the scan window
        let omegas = linspace(0.05 * dt_guess, 5.0 * dt_guess, 4001);
        let shape = compute_lineshape(&params, &config, &omegas).unwrap();
        let dt = shape.delta_tilde;
        assert!((shape.omega_reson / dt - 0.89475).abs() < 2e-3);
        assert!((shape.fwhm.unwrap() / dt - 0.31244).abs() < 2e-3);
        assert!((shape.asymmetry.unwrap() - 0.0918).abs() < 5e-3);
        assert!((shape.alpha_lower.unwrap() - 0.09945).abs() < 1e-3);
        assert!(shape.diagnostics.is_empty());
    }

    #[test]
    fn truncated_scan_reports_missing_width() {
        let params =
            ModelParams::new(1.0, 0.1, 1e6, Dispersion::LinearExponential).unwrap();
        let config = ScatteringConfig::default();
        // Window clipped right at the peak: no half-max crossings.
        let omegas = linspace(0.22, 0.24, 51);
        let shape = compute_lineshape(&params, &config, &omegas).unwrap();
        assert!(shape.fwhm.is_none());
        assert!(shape
            .diagnostics
            .iter()
            .any(|d| d.contains("widen the frequency window")));
    }
}
