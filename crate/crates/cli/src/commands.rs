//! Command execution: resolve defaults, run the library pipeline, and
//! assemble tables + manifest.
//!
//! Per-command defaults (any of them overridable by flag or config):
//!
//! * `polaron`, `lineshape`, `sweep` — linear dispersion, `omega_c = 1000`,
//!   `alpha = 0.2` (sweep: `alphas = 0.1,0.2,0.3`), 801 scan points on
//!   `[0.05, 5] * delta_tilde` (resolved after solving the gap).
//! * `emission` — cosine band, `omega_c = 6`, `alpha = 0.1`, 512 modes,
//!   601 sample times on `[0, 30]`.
//! * `toulouse` — linear dispersion, `alpha` pinned to `1/2`,
//!   `omega_c = 1e8`, 400 log-spaced probes on `[1e-9, 1e-6]`.
//!
//! All frequency defaults scale with `--delta` (the energy unit).

use std::path::PathBuf;

use rayon::prelude::*;
use serde_json::json;

use polaron_waveguide::{
    asymptotic_gap, compare_with_polaron_rwa, compute_lineshape, decay_rate_numeric,
    emission_run, linspace, log_space, solve_default, validity_warning, Dispersion,
    EmissionOptions, Lineshape, ModelParams, ScatteringConfig, SigmaSource,
};

use crate::args::{Cli, CommandKind, DispersionArg, FormatArg};
use crate::error::AppError;
use crate::output::{fmt, write_run, Manifest, Table};

/// Key/value pairs echoed to stdout after a successful run.
type Headline = Vec<(String, String)>;

/// Parse-merge-dispatch: the whole life of one invocation.
pub fn run(mut cli: Cli) -> Result<(), AppError> {
    cli.merge_config()?;
    let command = cli.command.ok_or_else(|| {
        AppError::Validation(
            "missing --command (polaron | lineshape | sweep | emission | toulouse)".into(),
        )
    })?;
    let out_dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    let format = cli.format.unwrap_or(FormatArg::Csv);

    let (tables, mut manifest, headline) = match command {
        CommandKind::Polaron => polaron_command(&cli)?,
        CommandKind::Lineshape => lineshape_command(&cli)?,
        CommandKind::Sweep => sweep_command(&cli)?,
        CommandKind::Emission => emission_command(&cli)?,
        CommandKind::Toulouse => toulouse_command(&cli)?,
    };

    if let serde_json::Value::Object(map) = &mut manifest.params {
        map.insert("format".into(), json!(format.name()));
    }
    for note in &manifest.diagnostics {
        eprintln!("note: {note}");
    }
    let files = write_run(&out_dir, format, &tables, &mut manifest)?;
    for (key, value) in &headline {
        println!("{key} = {value}");
    }
    for file in &files {
        println!("wrote {}", out_dir.join(file).display());
    }
    Ok(())
}

/// Resolved model inputs shared by every command.
struct Resolved {
    params: ModelParams,
    dephasing: f64,
    sigma_source: SigmaSource,
}

fn resolve_model(cli: &Cli, command: CommandKind, alpha: f64) -> Result<Resolved, AppError> {
    let delta = cli.delta.unwrap_or(1.0);
    let dispersion = match cli.dispersion {
        Some(DispersionArg::Linear) => Dispersion::LinearExponential,
        Some(DispersionArg::Cosine) => Dispersion::CosineHard,
        None => match command {
            CommandKind::Emission => Dispersion::CosineHard,
            _ => Dispersion::LinearExponential,
        },
    };
    let omega_c = cli.omega_c.unwrap_or_else(|| {
        let ratio = match command {
            CommandKind::Emission => 6.0,
            CommandKind::Toulouse => 1e8,
            _ => 1e3,
        };
        ratio * delta
    });
    if !(alpha < 1.0) {
        return Err(AppError::Validation(format!(
            "alpha must lie in [0, 1) — the variational gap renormalizes to zero at \
             alpha >= 1 — got {alpha}"
        )));
    }
    let num_modes = cli.num_modes.unwrap_or(512);
    let params =
        ModelParams::new(delta, alpha, omega_c, dispersion)?.with_num_modes(num_modes)?;
    let dephasing = cli.dephasing.unwrap_or(0.0);
    if !(dephasing >= 0.0) {
        return Err(AppError::Validation(format!(
            "dephasing rate must be nonnegative, got {dephasing}"
        )));
    }
    let sigma_source = match params.dispersion {
        Dispersion::LinearExponential => SigmaSource::ClosedOhmic,
        Dispersion::CosineHard => SigmaSource::Numeric,
    };
    Ok(Resolved {
        params,
        dephasing,
        sigma_source,
    })
}

fn dispersion_name(d: Dispersion) -> &'static str {
    match d {
        Dispersion::LinearExponential => "linear",
        Dispersion::CosineHard => "cosine",
    }
}

fn sigma_source_name(s: SigmaSource) -> &'static str {
    match s {
        SigmaSource::ClosedOhmic => "closed-ohmic",
        SigmaSource::Numeric => "numeric",
    }
}

/// Manifest fields common to every command.
fn base_params(r: &Resolved) -> serde_json::Map<String, serde_json::Value> {
    let p = &r.params;
    let mut map = serde_json::Map::new();
    map.insert("delta".into(), json!(p.delta));
    map.insert("alpha".into(), json!(p.alpha));
    map.insert("omega_c".into(), json!(p.omega_c));
    map.insert("dispersion".into(), json!(dispersion_name(p.dispersion)));
    map.insert("num_modes".into(), json!(p.num_modes));
    map.insert("c".into(), json!(p.c));
    map.insert("sound_speed".into(), json!(p.sound_speed()));
    map.insert("k_max".into(), json!(p.resolved_k_max()));
    map.insert("dephasing".into(), json!(r.dephasing));
    map.insert(
        "sigma_source".into(),
        json!(sigma_source_name(r.sigma_source)),
    );
    map
}

fn manifest(
    command: &'static str,
    params: serde_json::Map<String, serde_json::Value>,
    results: serde_json::Value,
    diagnostics: Vec<String>,
) -> Manifest {
    Manifest {
        version: env!("CARGO_PKG_VERSION"),
        command,
        params: serde_json::Value::Object(params),
        results,
        diagnostics,
        outputs: Vec::new(),
    }
}

fn opt_fmt(x: Option<f64>) -> String {
    fmt(x.unwrap_or(f64::NAN))
}

/// A resolved probe-frequency window.
struct Window {
    lo: f64,
    hi: f64,
    points: usize,
    clamped: bool,
}

/// Resolve `[omega_min, omega_max] x points` against per-command defaults,
/// clamping below the hard band top for the cosine family.
fn resolve_window(
    cli: &Cli,
    default_lo: f64,
    default_hi: f64,
    default_points: usize,
    params: &ModelParams,
) -> Result<(Vec<f64>, Window), AppError> {
    let lo = cli.omega_min.unwrap_or(default_lo);
    let mut hi = cli.omega_max.unwrap_or(default_hi);
    let mut clamped = false;
    if params.dispersion == Dispersion::CosineHard {
        let top = (1.0 - 1e-3) * params.omega_c;
        if hi > top {
            hi = top;
            clamped = true;
        }
    }
    if !(lo > 0.0 && hi > lo) {
        return Err(AppError::Validation(format!(
            "scan window must satisfy 0 < omega_min < omega_max, got [{lo}, {hi}]"
        )));
    }
    let points = cli.points.unwrap_or(default_points);
    if points < 2 {
        return Err(AppError::Validation(format!(
            "a scan needs at least 2 points, got {points}"
        )));
    }
    Ok((
        linspace(lo, hi, points),
        Window {
            lo,
            hi,
            points,
            clamped,
        },
    ))
}

// ---------------------------------------------------------------------------
// polaron
// ---------------------------------------------------------------------------

fn polaron_command(cli: &Cli) -> Result<(Vec<Table>, Manifest, Headline), AppError> {
    let alpha = cli.alpha.unwrap_or(0.2);
    let r = resolve_model(cli, CommandKind::Polaron, alpha)?;
    let mut diagnostics = Vec::new();
    if let Some(w) = validity_warning(&r.params) {
        diagnostics.push(w);
    }
    let sol = solve_default(&r.params)?;
    let asymptotic = asymptotic_gap(&r.params).ok();

    let table = Table {
        name: "polaron",
        header: &[
            "alpha",
            "omega_c",
            "delta_tilde",
            "asymptotic_gap",
            "iterations",
            "residual",
        ],
        rows: vec![vec![
            fmt(r.params.alpha),
            fmt(r.params.omega_c),
            fmt(sol.delta_tilde),
            opt_fmt(asymptotic),
            sol.iterations.to_string(),
            fmt(sol.residual),
        ]],
    };
    let results = json!({
        "delta_tilde": sol.delta_tilde,
        "asymptotic_gap": asymptotic,
        "iterations": sol.iterations,
        "residual": sol.residual,
    });
    let headline = vec![
        ("delta_tilde".to_string(), fmt(sol.delta_tilde)),
        ("asymptotic_gap".to_string(), opt_fmt(asymptotic)),
    ];
    Ok((
        vec![table],
        manifest("polaron", base_params(&r), results, diagnostics),
        headline,
    ))
}

// ---------------------------------------------------------------------------
// lineshape
// ---------------------------------------------------------------------------

const LINESHAPE_HEADER: &[&str] = &[
    "omega", "R", "T", "re_r", "im_r", "re_t", "im_t", "delta_L", "gamma",
];

fn lineshape_rows(shape: &Lineshape) -> Vec<Vec<String>> {
    (0..shape.omegas.len())
        .map(|i| {
            vec![
                fmt(shape.omegas[i]),
                fmt(shape.reflectivities[i]),
                fmt(shape.transmissivities[i]),
                fmt(shape.r[i].re),
                fmt(shape.r[i].im),
                fmt(shape.t[i].re),
                fmt(shape.t[i].im),
                fmt(shape.lamb_shifts[i]),
                fmt(shape.decay_rates[i]),
            ]
        })
        .collect()
}

fn lineshape_command(cli: &Cli) -> Result<(Vec<Table>, Manifest, Headline), AppError> {
    let alpha = cli.alpha.unwrap_or(0.2);
    let r = resolve_model(cli, CommandKind::Lineshape, alpha)?;
    let mut diagnostics = Vec::new();
    if let Some(w) = validity_warning(&r.params) {
        diagnostics.push(w);
    }
    // Solve once to anchor the default window on the renormalized gap; the
    // scan itself re-solves from the same inputs.
    let probe = solve_default(&r.params)?;
    let dt = probe.delta_tilde;
    let (omegas, window) = resolve_window(cli, 0.05 * dt, 5.0 * dt, 801, &r.params)?;
    if window.clamped {
        diagnostics.push(format!(
            "scan upper edge clamped to {} = 0.999 * omega_c (hard band top)",
            fmt(window.hi)
        ));
    }
    let config = ScatteringConfig {
        dephasing_rate: r.dephasing,
        sigma_source: r.sigma_source,
        zero_lamb_shift: false,
    };
    let shape = compute_lineshape(&r.params, &config, &omegas)?;
    diagnostics.extend(shape.diagnostics.iter().cloned());

    let table = Table {
        name: "lineshape",
        header: LINESHAPE_HEADER,
        rows: lineshape_rows(&shape),
    };
    let mut params = base_params(&r);
    params.insert("omega_min".into(), json!(window.lo));
    params.insert("omega_max".into(), json!(window.hi));
    params.insert("points".into(), json!(window.points));
    let results = json!({
        "delta_tilde": shape.delta_tilde,
        "omega_reson": shape.omega_reson,
        "fwhm": shape.fwhm,
        "alpha_lower": shape.alpha_lower,
        "asymmetry": shape.asymmetry,
    });
    let headline = vec![
        ("delta_tilde".to_string(), fmt(shape.delta_tilde)),
        ("omega_reson".to_string(), fmt(shape.omega_reson)),
        ("fwhm".to_string(), opt_fmt(shape.fwhm)),
        ("alpha_lower".to_string(), opt_fmt(shape.alpha_lower)),
    ];
    Ok((
        vec![table],
        manifest("lineshape", params, results, diagnostics),
        headline,
    ))
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

fn sweep_command(cli: &Cli) -> Result<(Vec<Table>, Manifest, Headline), AppError> {
    let alphas = cli
        .alphas
        .clone()
        .unwrap_or_else(|| vec![0.1, 0.2, 0.3]);
    if alphas.is_empty() {
        return Err(AppError::Validation(
            "--alphas needs at least one coupling".into(),
        ));
    }
    if let Some(bad) = alphas.iter().find(|a| !a.is_finite()) {
        return Err(AppError::Validation(format!(
            "--alphas entries must be finite, got {bad}"
        )));
    }

    // One independent scan per coupling; collect preserves input order.
    let runs: Vec<Result<(f64, Lineshape, Window, Option<String>), AppError>> = alphas
        .par_iter()
        .map(|&alpha| {
            let r = resolve_model(cli, CommandKind::Sweep, alpha)?;
            let warning = validity_warning(&r.params);
            let probe = solve_default(&r.params)?;
            let dt = probe.delta_tilde;
            let (omegas, window) = resolve_window(cli, 0.05 * dt, 5.0 * dt, 801, &r.params)?;
            let config = ScatteringConfig {
                dephasing_rate: r.dephasing,
                sigma_source: r.sigma_source,
                zero_lamb_shift: false,
            };
            let shape = compute_lineshape(&r.params, &config, &omegas)?;
            Ok((alpha, shape, window, warning))
        })
        .collect();

    let mut diagnostics = Vec::new();
    let mut surface_rows = Vec::new();
    let mut summary_rows = Vec::new();
    let mut result_entries = Vec::new();
    let mut headline = Vec::new();
    for run in runs {
        let (alpha, shape, window, warning) = run?;
        if let Some(w) = warning {
            diagnostics.push(format!("alpha={alpha}: {w}"));
        }
        if window.clamped {
            diagnostics.push(format!(
                "alpha={alpha}: scan upper edge clamped to {} = 0.999 * omega_c (hard band top)",
                fmt(window.hi)
            ));
        }
        diagnostics.extend(shape.diagnostics.iter().map(|d| format!("alpha={alpha}: {d}")));
        for i in 0..shape.omegas.len() {
            surface_rows.push(vec![
                fmt(alpha),
                fmt(shape.omegas[i]),
                fmt(shape.reflectivities[i]),
            ]);
        }
        summary_rows.push(vec![
            fmt(alpha),
            fmt(shape.omega_reson),
            opt_fmt(shape.fwhm),
            opt_fmt(shape.alpha_lower),
            opt_fmt(shape.asymmetry),
            fmt(shape.delta_tilde),
        ]);
        result_entries.push(json!({
            "alpha": alpha,
            "delta_tilde": shape.delta_tilde,
            "omega_reson": shape.omega_reson,
            "fwhm": shape.fwhm,
            "alpha_lower": shape.alpha_lower,
            "asymmetry": shape.asymmetry,
            "omega_min": window.lo,
            "omega_max": window.hi,
        }));
        headline.push((
            format!("omega_reson[alpha={alpha}]"),
            fmt(shape.omega_reson),
        ));
    }

    let tables = vec![
        Table {
            name: "sweep_surface",
            header: &["alpha", "omega", "R"],
            rows: surface_rows,
        },
        Table {
            name: "sweep_summary",
            header: &[
                "alpha",
                "omega_reson",
                "fwhm",
                "alpha_lower",
                "asymmetry",
                "delta_tilde",
            ],
            rows: summary_rows,
        },
    ];

    // Representative common parameters: per-coupling values live in results.
    let representative = resolve_model(cli, CommandKind::Sweep, alphas[0])?;
    let mut params = base_params(&representative);
    params.insert("alpha".into(), serde_json::Value::Null);
    params.insert("alphas".into(), json!(alphas));
    params.insert(
        "points".into(),
        json!(cli.points.unwrap_or(801)),
    );
    Ok((
        tables,
        manifest("sweep", params, json!(result_entries), diagnostics),
        headline,
    ))
}

// ---------------------------------------------------------------------------
// emission
// ---------------------------------------------------------------------------

fn emission_command(cli: &Cli) -> Result<(Vec<Table>, Manifest, Headline), AppError> {
    let alpha = cli.alpha.unwrap_or(0.1);
    let r = resolve_model(cli, CommandKind::Emission, alpha)?;
    let mut diagnostics = Vec::new();
    if let Some(w) = validity_warning(&r.params) {
        diagnostics.push(w);
    }
    let options = EmissionOptions {
        t_max: cli.t_max.unwrap_or(30.0),
        num_times: cli.points.unwrap_or(601),
        include_quadratic: true,
    };
    let trace = emission_run(&r.params, &options)?;
    diagnostics.extend(trace.diagnostics.iter().cloned());

    let mut emission_rows = Vec::with_capacity(trace.times.len());
    for i in 0..trace.times.len() {
        emission_rows.push(vec![
            fmt(trace.times[i]),
            fmt(trace.p_e[i]),
            fmt(trace.n_total[i]),
        ]);
    }
    let mut spectrum_rows = Vec::with_capacity(trace.spectrum_omegas.len());
    for i in 0..trace.spectrum_omegas.len() {
        spectrum_rows.push(vec![
            fmt(trace.spectrum_omegas[i]),
            fmt(trace.spectrum_occupations[i]),
        ]);
    }
    let tables = vec![
        Table {
            name: "emission",
            header: &["t", "p_e", "n_total"],
            rows: emission_rows,
        },
        Table {
            name: "spectrum",
            header: &["omega", "n_k"],
            rows: spectrum_rows,
        },
    ];

    let drift = trace
        .n_total
        .iter()
        .map(|n| (n - 1.0).abs())
        .fold(0.0_f64, f64::max);
    let golden = decay_rate_numeric(trace.delta_tilde, trace.delta_tilde, &r.params).ok();
    let mut params = base_params(&r);
    params.insert("t_max".into(), json!(options.t_max));
    params.insert("num_times".into(), json!(options.num_times));
    let results = json!({
        "delta_tilde": trace.delta_tilde,
        "fitted_decay": trace.fitted_decay,
        "golden_rule_rate_at_gap": golden,
        "recurrence_time": trace.recurrence_time,
        "max_conservation_drift": drift,
        "final_p_e": trace.p_e.last(),
    });
    let headline = vec![
        ("delta_tilde".to_string(), fmt(trace.delta_tilde)),
        ("fitted_decay".to_string(), opt_fmt(trace.fitted_decay)),
        (
            "recurrence_time".to_string(),
            fmt(trace.recurrence_time),
        ),
    ];
    Ok((
        tables,
        manifest("emission", params, results, diagnostics),
        headline,
    ))
}

// ---------------------------------------------------------------------------
// toulouse
// ---------------------------------------------------------------------------

fn toulouse_command(cli: &Cli) -> Result<(Vec<Table>, Manifest, Headline), AppError> {
    if let Some(alpha) = cli.alpha {
        if (alpha - 0.5).abs() > 1e-12 {
            return Err(AppError::Validation(format!(
                "the exact cross-check exists only at alpha = 1/2; drop --alpha or set it \
                 to 0.5, got {alpha}"
            )));
        }
    }
    if cli.dispersion == Some(DispersionArg::Cosine) {
        return Err(AppError::Validation(
            "the exact cross-check requires the linear-exponential dispersion".into(),
        ));
    }
    if cli.dephasing.is_some_and(|g| g != 0.0) {
        return Err(AppError::Validation(
            "--dephasing is not supported for --command toulouse (the exact amplitude \
             has no dephasing channel)"
                .into(),
        ));
    }
    let r = resolve_model(cli, CommandKind::Toulouse, 0.5)?;
    let delta = r.params.delta;
    let lo = cli.omega_min.unwrap_or(1e-9 * delta);
    let hi = cli.omega_max.unwrap_or(1e-6 * delta);
    if !(lo > 0.0 && hi > lo) {
        return Err(AppError::Validation(format!(
            "scan window must satisfy 0 < omega_min < omega_max, got [{lo}, {hi}]"
        )));
    }
    let points = cli.points.unwrap_or(400);
    if points < 2 {
        return Err(AppError::Validation(format!(
            "a scan needs at least 2 points, got {points}"
        )));
    }
    let omegas = log_space(lo, hi, points);
    let cmp = compare_with_polaron_rwa(&r.params, &omegas)?;

    let mut rows = Vec::with_capacity(points);
    for i in 0..cmp.omegas.len() {
        rows.push(vec![
            fmt(cmp.omegas[i]),
            fmt(cmp.r_exact[i]),
            fmt(cmp.t_exact[i]),
            fmt(cmp.arg_r_exact[i]),
            fmt(cmp.arg_t_exact[i]),
            fmt(cmp.r_rwa[i]),
            fmt(cmp.t_rwa[i]),
            fmt(cmp.p1_exact[i]),
        ]);
    }
    let table = Table {
        name: "toulouse",
        header: &[
            "omega",
            "R_exact",
            "T_exact",
            "arg_r_exact",
            "arg_t_exact",
            "R_rwa",
            "T_rwa",
            "P1_exact",
        ],
        rows,
    };

    let peak_ratio = match (cmp.omega_peak_rwa, cmp.omega_peak_exact) {
        (Some(rwa), Some(exact)) if exact > 0.0 => Some(rwa / exact),
        _ => None,
    };
    let max_inelastic = cmp
        .p1_exact
        .iter()
        .map(|p| 1.0 - p)
        .fold(0.0_f64, f64::max);
    let mut params = base_params(&r);
    params.insert("omega_min".into(), json!(lo));
    params.insert("omega_max".into(), json!(hi));
    params.insert("points".into(), json!(points));
    let results = json!({
        "delta_tilde": cmp.delta_tilde,
        "omega_peak_exact": cmp.omega_peak_exact,
        "omega_peak_rwa": cmp.omega_peak_rwa,
        "peak_ratio": peak_ratio,
        "max_inelastic": max_inelastic,
    });
    let headline = vec![
        ("delta_tilde".to_string(), fmt(cmp.delta_tilde)),
        (
            "omega_peak_exact".to_string(),
            opt_fmt(cmp.omega_peak_exact),
        ),
        ("omega_peak_rwa".to_string(), opt_fmt(cmp.omega_peak_rwa)),
        ("peak_ratio".to_string(), opt_fmt(peak_ratio)),
    ];
    Ok((
        vec![table],
        manifest("toulouse", params, results, diagnostics_empty()),
        headline,
    ))
}

fn diagnostics_empty() -> Vec<String> {
    Vec::new()
}
