//! Composite Gauss–Legendre quadrature on explicit panels.
//!
//! The mode sums and principal-value integrals in this crate involve
//! integrands whose structure spans many decades (a resonance scale
//! `delta_tilde` that can sit 6–10 orders of magnitude below the cutoff
//! `omega_c`), so fixed uniform grids are useless. Everything integrates
//! smooth functions over hand-built panel lists: linear panels where the
//! integrand is broad, logarithmically spaced panels across wide tails, and
//! panel *boundaries* pinned on removable singular points so no quadrature
//! node ever lands on them.

use std::sync::OnceLock;

/// Number of Gauss–Legendre nodes per panel. 16 points integrate the smooth
/// panel restrictions here to machine precision.
pub const GL_POINTS: usize = 16;

/// Gauss–Legendre nodes and weights on (-1, 1), computed once by Newton
/// iteration on the Legendre polynomial (no hardcoded tables).
fn gl_nodes() -> &'static ([f64; GL_POINTS], [f64; GL_POINTS]) {
    static NODES: OnceLock<([f64; GL_POINTS], [f64; GL_POINTS])> = OnceLock::new();
    NODES.get_or_init(|| {
        let n = GL_POINTS;
        let mut nodes = [0.0; GL_POINTS];
        let mut weights = [0.0; GL_POINTS];
        for i in 0..n {
            // Chebyshev-like initial guess, then Newton on P_n(x).
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(n, x);
                let step = p / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    })
}

/// Evaluate the Legendre polynomial `P_n` and its derivative at `x` by the
/// three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for j in 2..=n {
        let jf = j as f64;
        let p_next = ((2.0 * jf - 1.0) * x * p - (jf - 1.0) * p_prev) / jf;
        p_prev = p;
        p = p_next;
    }
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

/// Integrate `f` over a single interval `[a, b]` with the 16-point rule.
pub fn integrate_interval(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> f64 {
    let (nodes, weights) = gl_nodes();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for i in 0..GL_POINTS {
        acc += weights[i] * f(mid + half * nodes[i]);
    }
    acc * half
}

/// Integrate `f` over consecutive panels defined by sorted `edges`
/// (`edges[i]..edges[i+1]` per panel).
pub fn integrate_panels(mut f: impl FnMut(f64) -> f64, edges: &[f64]) -> f64 {
    edges
        .windows(2)
        .map(|w| integrate_interval(&mut f, w[0], w[1]))
        .sum()
}

/// Panel edges spanning `[a, b]` with `n` equal panels.
pub fn linear_edges(a: f64, b: f64, n: usize) -> Vec<f64> {
    let n = n.max(1);
    (0..=n)
        .map(|i| a + (b - a) * i as f64 / n as f64)
        .collect()
}

/// Panel edges from `a > 0` to `b > a`, logarithmically spaced with
/// `per_decade` panels per decade (at least one panel).
pub fn log_edges(a: f64, b: f64, per_decade: usize) -> Vec<f64> {
    assert!(a > 0.0 && b > a, "log panels need 0 < a < b");
    let decades = (b / a).log10();
    let n = ((decades * per_decade as f64).ceil() as usize).max(1);
    let la = a.ln();
    let lb = b.ln();
    (0..=n)
        .map(|i| (la + (lb - la) * i as f64 / n as f64).exp())
        .collect()
}

/// Merge extra edge values into a sorted edge list, dropping duplicates and
/// anything outside the spanned range. Used to pin panel boundaries on
/// removable singular points.
pub fn insert_edges(mut edges: Vec<f64>, extra: &[f64]) -> Vec<f64> {
    let lo = edges[0];
    let hi = edges[edges.len() - 1];
    for &x in extra {
        if x > lo && x < hi {
            edges.push(x);
        }
    }
    edges.sort_by(|a, b| a.partial_cmp(b).expect("finite edges"));
    edges.dedup_by(|a, b| (*a - *b).abs() <= f64::EPSILON * a.abs().max(b.abs()));
    edges
}
