//! Physical parameters, dispersion relations, coupling functions, and the
//! discretized mode grid.
//!
//! The system is a two-level emitter of bare splitting `delta` coupled with
//! dimensionless strength `alpha` to the symmetric sector of a 1D photonic
//! continuum with exponential cutoff `omega_c`. Two dispersion families are
//! supported:
//!
//! * [`Dispersion::LinearExponential`] — `omega(k) = c*k` with couplings
//!   carrying an explicit `exp(-omega/2 omega_c)` cutoff factor; the momentum
//!   grid is truncated at `k_max`.
//! * [`Dispersion::CosineHard`] — lattice band `omega(k) = omega_c*|sin(k/2)|`
//!   on `k in (0, pi]` with a hard band-top cutoff and no exponential factor.
//!
//! Both families are Ohmic — `J(omega) -> pi*alpha*omega` at low frequency —
//! but cut off differently: the linear family realizes exactly
//! `J(omega) = pi*alpha*omega*exp(-omega/omega_c)`, while the cosine band
//! realizes `pi*alpha*omega_c*omega/sqrt(omega_c^2 - omega^2)`, a van Hove
//! enhancement ending in a hard band top (see [`spectral_density`]).
//! All frequencies share the units of `delta`; momenta are in units where the
//! relevant propagation speed converts them to frequencies.

use thiserror::Error;

/// Errors from parameter validation and grid construction.
#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("qubit splitting must be positive, got delta = {0}")]
    NonpositiveDelta(f64),
    #[error("coupling strength must be nonnegative, got alpha = {0}")]
    NegativeAlpha(f64),
    #[error("cutoff frequency must be positive, got omega_c = {0}")]
    NonpositiveCutoff(f64),
    #[error("propagation speed must be positive, got c = {0}")]
    NonpositiveSpeed(f64),
    #[error("grid needs at least 2 modes, got num_modes = {0}")]
    TooFewModes(usize),
    #[error("k_max must be positive, got {0}")]
    NonpositiveKmax(f64),
    #[error("spectral density is defined for omega >= 0, got omega = {0}")]
    NegativeFrequency(f64),
}

/// Dispersion family of the photonic continuum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dispersion {
    /// `omega = c*|k|`, coupling cutoff `exp(-omega/2 omega_c)`, grid on `(0, k_max]`.
    LinearExponential,
    /// `omega = omega_c*|sin(k/2)|` (equivalently `omega_c*sqrt((1-cos k)/2)`),
    /// hard cutoff at the band top, grid on `(0, pi]`.
    CosineHard,
}

/// Physical inputs: the single source of truth for all downstream computations.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// Qubit splitting Δ (sets the energy scale; outputs are reported in units of Δ).
    pub delta: f64,
    /// Dimensionless Ohmic coupling strength α ≥ 0.
    pub alpha: f64,
    /// Cutoff frequency ω_c > 0, same units as Δ.
    pub omega_c: f64,
    /// Dispersion family.
    pub dispersion: Dispersion,
    /// Propagation speed for `LinearExponential` (the cosine band's speed is
    /// fixed by its own dispersion; see [`ModelParams::sound_speed`]).
    pub c: f64,
    /// Number of positive-momentum symmetric modes on the grid.
    pub num_modes: usize,
    /// Largest grid momentum (`LinearExponential` only). `None` selects the
    /// default `omega(k_max) = 40*omega_c`, which pushes the coupling tail
    /// `exp(-omega/omega_c)` below 2e-9 of its peak.
    pub k_max: Option<f64>,
}

impl ModelParams {
    /// Validated constructor with defaults `c = 1`, `num_modes = 512`,
    /// `k_max = None` (auto).
    pub fn new(
        delta: f64,
        alpha: f64,
        omega_c: f64,
        dispersion: Dispersion,
    ) -> Result<Self, ModelError> {
        let params = Self {
            delta,
            alpha,
            omega_c,
            dispersion,
            c: 1.0,
            num_modes: 512,
            k_max: None,
        };
        params.validate()?;
        Ok(params)
    }

    /// Replace the mode count (validating).
    pub fn with_num_modes(mut self, num_modes: usize) -> Result<Self, ModelError> {
        self.num_modes = num_modes;
        self.validate()?;
        Ok(self)
    }

    /// Replace the propagation speed (validating).
    pub fn with_c(mut self, c: f64) -> Result<Self, ModelError> {
        self.c = c;
        self.validate()?;
        Ok(self)
    }

    /// Set an explicit grid truncation momentum for `LinearExponential`.
    pub fn with_k_max(mut self, k_max: f64) -> Result<Self, ModelError> {
        self.k_max = Some(k_max);
        self.validate()?;
        Ok(self)
    }

    /// Check the type invariants.
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.delta > 0.0) {
            return Err(ModelError::NonpositiveDelta(self.delta));
        }
        if !(self.alpha >= 0.0) {
            return Err(ModelError::NegativeAlpha(self.alpha));
        }
        if !(self.omega_c > 0.0) {
            return Err(ModelError::NonpositiveCutoff(self.omega_c));
        }
        if !(self.c > 0.0) {
            return Err(ModelError::NonpositiveSpeed(self.c));
        }
        if self.num_modes < 2 {
            return Err(ModelError::TooFewModes(self.num_modes));
        }
        if let Some(k_max) = self.k_max {
            if !(k_max > 0.0) {
                return Err(ModelError::NonpositiveKmax(k_max));
            }
        }
        Ok(())
    }

    /// Low-momentum propagation speed of the chosen dispersion: `c` for the
    /// linear family, `omega_c/2` for the cosine band (whose slope at `k = 0`
    /// is `omega_c/2`). The couplings are normalized with this speed so that
    /// the realized spectral density is Ohmic with strength `alpha` for both
    /// families.
    pub fn sound_speed(&self) -> f64 {
        match self.dispersion {
            Dispersion::LinearExponential => self.c,
            Dispersion::CosineHard => 0.5 * self.omega_c,
        }
    }

    /// Grid truncation momentum: the configured `k_max`, its default
    /// `40*omega_c/c` for the linear family, or the band edge `pi` for cosine.
    pub fn resolved_k_max(&self) -> f64 {
        match self.dispersion {
            Dispersion::LinearExponential => {
                self.k_max.unwrap_or(40.0 * self.omega_c / self.c)
            }
            Dispersion::CosineHard => std::f64::consts::PI,
        }
    }
}

/// Mode frequency `omega(k)` for the configured dispersion (nonnegative; both
/// families give `omega(0) = 0`).
pub fn dispersion(k: f64, params: &ModelParams) -> f64 {
    match params.dispersion {
        Dispersion::LinearExponential => params.c * k.abs(),
        Dispersion::CosineHard => params.omega_c * (0.5 * k).sin().abs(),
    }
}

/// Group velocity `|d omega/dk|` at momentum `k > 0`.
pub fn group_velocity(k: f64, params: &ModelParams) -> f64 {
    match params.dispersion {
        Dispersion::LinearExponential => params.c,
        Dispersion::CosineHard => 0.5 * params.omega_c * (0.5 * k).cos().abs(),
    }
}

/// Coupling amplitude `g(k) = sqrt(pi*alpha*c_s*omega(k)/2)`, times
/// `exp(-omega/2 omega_c)` for the linear-exponential family. `c_s` is
/// [`ModelParams::sound_speed`].
pub fn coupling(k: f64, params: &ModelParams) -> f64 {
    let omega = dispersion(k, params);
    let base = 0.5 * std::f64::consts::PI * params.alpha * params.sound_speed() * omega;
    match params.dispersion {
        Dispersion::LinearExponential => base.sqrt() * (-0.5 * omega / params.omega_c).exp(),
        Dispersion::CosineHard => base.sqrt(),
    }
}

/// Spectral density `J(omega) = 2*pi * sum_k (g_k^2/L) delta(omega - omega_k)
/// = 2 g(k_0)^2 / |omega'(k_0)|` realized by [`coupling`] on the configured
/// dispersion.
///
/// * Linear-exponential: the Ohmic line `pi*alpha*omega*exp(-omega/omega_c)`.
/// * Cosine band: `pi*alpha*omega_c*omega / sqrt(omega_c^2 - omega^2)` inside
///   the band — Ohmic at small `omega` but van Hove enhanced near the band
///   top (`+inf` exactly at `omega = omega_c`) — and `0` above it, where the
///   band supports no modes.
pub fn spectral_density(omega: f64, params: &ModelParams) -> Result<f64, ModelError> {
    if omega < 0.0 {
        return Err(ModelError::NegativeFrequency(omega));
    }
    let ohmic_line = std::f64::consts::PI * params.alpha * omega;
    match params.dispersion {
        Dispersion::LinearExponential => Ok(ohmic_line * (-omega / params.omega_c).exp()),
        Dispersion::CosineHard => {
            if omega > params.omega_c {
                Ok(0.0)
            } else {
                let gap_to_top = (params.omega_c - omega) * (params.omega_c + omega);
                Ok(std::f64::consts::PI * params.alpha * params.omega_c * omega
                    / gap_to_top.sqrt())
            }
        }
    }
}

/// Discretized symmetric-sector momenta with frequencies, couplings, and
/// trapezoid quadrature weights.
///
/// Momenta are uniformly spaced right endpoints `k_i = i*dk` on `(0, k_max]`,
/// which excludes the `k = 0` infrared point exactly. The weights realize the
/// trapezoid rule on `[0, k_max]` with a phantom `k = 0` node whose integrand
/// vanishes (every summed quantity carries a factor `g(k)^2 -> 0`): all
/// interior weights are `dk` and the last is `dk/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeGrid {
    /// Strictly increasing momenta `k_i > 0`.
    pub momenta: Vec<f64>,
    /// Frequencies `omega_i = omega(k_i)`.
    pub frequencies: Vec<f64>,
    /// Coupling amplitudes `g_i = g(k_i)`.
    pub couplings: Vec<f64>,
    /// Quadrature weight per mode.
    pub weights: Vec<f64>,
}

impl ModeGrid {
    /// Number of positive-momentum modes.
    pub fn len(&self) -> usize {
        self.momenta.len()
    }

    /// True when the grid holds no modes (never produced by [`build_grid`]).
    pub fn is_empty(&self) -> bool {
        self.momenta.is_empty()
    }

    /// Uniform spacing `dk` of the momentum grid.
    pub fn spacing(&self) -> f64 {
        self.momenta[0]
    }

    /// Quadrature sum `(1/pi) * sum_i w_i f(k_i)`, the grid realization of the
    /// continuum measure `(1/L) sum_{all k} == (1/pi) int_0^inf dk` used by
    /// every `1/L`-normalized mode sum (`L = 2*num_modes` counts both `±k`
    /// branches folded onto positive momenta).
    pub fn measure_sum(&self, f: impl Fn(usize) -> f64) -> f64 {
        let total: f64 = (0..self.len()).map(|i| self.weights[i] * f(i)).sum();
        total / std::f64::consts::PI
    }
}

/// Build the uniform mode grid for the configured dispersion.
pub fn build_grid(params: &ModelParams) -> Result<ModeGrid, ModelError> {
    params.validate()?;
    let n = params.num_modes;
    let k_max = params.resolved_k_max();
    let dk = k_max / n as f64;
    let momenta: Vec<f64> = (1..=n).map(|i| i as f64 * dk).collect();
    let frequencies: Vec<f64> = momenta.iter().map(|&k| dispersion(k, params)).collect();
    let couplings: Vec<f64> = momenta.iter().map(|&k| coupling(k, params)).collect();
    let mut weights = vec![dk; n];
    weights[n - 1] = 0.5 * dk;
    Ok(ModeGrid {
        momenta,
        frequencies,
        couplings,
        weights,
    })
}
