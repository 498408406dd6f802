//! Single-photon observables of a two-level emitter ultrastrongly coupled
//! to a one-dimensional photonic waveguide.
//!
//! The physical model is the Ohmic spin-boson Hamiltonian: a bare qubit of
//! gap `delta` coupled with dimensionless strength `alpha` to a bosonic band
//! with spectral density `J(omega) = pi * alpha * omega * exp(-omega/omega_c)`
//! (or its hard-edged cosine-band counterpart). All observables are computed
//! in the variational polaron frame, where the qubit gap renormalizes to
//! `delta_tilde` and the residual qubit–photon coupling becomes weak enough
//! for controlled resummation even at couplings far beyond the rotating-wave
//! regime.
//!
//! The crate is organized as a pipeline:
//!
//! - [`model`] — dispersion families, couplings, spectral density, and the
//!   calibrated momentum grid shared by every solver.
//! - [`polaron`] — the Silbey–Harris self-consistency that produces
//!   `delta_tilde` and the displacement profile `f_k`.
//! - [`selfenergy`] — Lamb shift and radiative width of the dressed level:
//!   closed Ohmic form and principal-value quadrature on the actual band.
//! - [`scattering`] — elastic S-matrix, reflection/transmission lineshapes,
//!   resonance metrics, Markov reference, and pure dephasing.
//! - [`toulouse`] — exact amplitude at the solvable point `alpha = 1/2`,
//!   benchmarking the polaron pipeline.
//! - [`dynamics`] — exact spontaneous-emission dynamics on the discretized
//!   band, whose spectra peak exactly where the scattering resonance sits.
//! - [`quad`] — the Gauss–Legendre panel quadrature underpinning the
//!   continuum integrals.
//!
//! Units: energies and rates in units of the bare gap `delta` (set
//! `delta = 1`), times in `1/delta`, momenta in inverse lattice/waveguide
//! length with the speed of light of the linear band set by `c`.

pub mod dynamics;
pub mod model;
pub mod polaron;
pub mod quad;
pub mod scattering;
pub mod selfenergy;
pub mod toulouse;

pub use dynamics::{
    build_hamiltonian_matrix, emission_run, fit_decay_rate, DynamicsError, EmissionOptions,
    EmissionTrace, Propagator, SingleExcitationState,
};
pub use model::{
    build_grid, coupling, dispersion, group_velocity, spectral_density, Dispersion, ModeGrid,
    ModelError, ModelParams,
};
pub use polaron::{
    asymptotic_gap, gap_residual, renormalized_gap, silbey_harris_displacement, solve_default,
    solve_self_consistent, validity_warning, PolaronError, PolaronSolution,
};
pub use scattering::{
    amplitudes_at, apply_dephasing, compute_lineshape, elastic_sigma, linspace,
    markov_reflection, peak_metrics, phase_shift, reflection_transmission, Lineshape,
    PeakMetrics, ScatteringAmplitudes, ScatteringConfig, ScatteringError, SigmaSource,
};
pub use selfenergy::{
    decay_rate_numeric, lamb_shift_numeric, sigma_numeric, sigma_ohmic_closed, SelfEnergyError,
    SelfEnergyValue,
};
pub use toulouse::{
    compare_with_polaron_rwa, elastic_probability, log_space, s_toulouse, unwrap_phases,
    w_param, ToulouseComparison, ToulouseError,
};
