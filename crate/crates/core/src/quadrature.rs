//! Gauss-Legendre quadrature and interface-split composite integration.

use std::sync::OnceLock;

use crate::error::{IfeError, Result};

/// Largest supported number of Gauss points.
pub const MAX_POINTS: usize = 32;

/// An `n`-point Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto `[lo, hi]`.
    pub fn mapped(&self, lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, lo: f64, hi: f64, mut f: F) -> f64 {
        self.mapped(lo, hi).map(|(x, w)| w * f(x)).sum()
    }
}

/// Legendre polynomial `P_n(x)` and its derivative by the Bonnet recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = next;
    }
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

fn compute_rule(n: usize) -> QuadratureRule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() <= 1e-15 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    QuadratureRule { nodes, weights }
}

/// The `n`-point Gauss-Legendre rule, `1 <= n <= 32`.
pub fn gauss_legendre_rule(n: usize) -> Result<QuadratureRule> {
    cached_rule(n).cloned()
}

/// Shared, lazily built copy of [`gauss_legendre_rule`].
pub fn cached_rule(n: usize) -> Result<&'static QuadratureRule> {
    static RULES: OnceLock<Vec<QuadratureRule>> = OnceLock::new();
    if !(1..=MAX_POINTS).contains(&n) {
        return Err(IfeError::UnsupportedOrder(n));
    }
    let rules = RULES.get_or_init(|| (1..=MAX_POINTS).map(compute_rule).collect());
    Ok(&rules[n - 1])
}

fn check_breakpoints(interval: (f64, f64), breakpoints: &[f64]) -> Result<()> {
    let (lo, hi) = interval;
    if let Some(&bp) = breakpoints.iter().find(|&&bp| !(bp >= lo && bp <= hi)) {
        return Err(IfeError::InvalidBreakpoint {
            breakpoint: bp,
            lo,
            hi,
        });
    }
    if breakpoints.windows(2).any(|w| w[1] < w[0]) {
        return Err(IfeError::InvalidArgument(
            "breakpoints must be sorted".into(),
        ));
    }
    Ok(())
}

/// Composite rule: `n` Gauss points on each sub-interval cut by
/// `breakpoints`. The integrand also receives the piece index, so callers
/// can select one-sided data without relying on the abscissa alone.
pub fn integrate_pieces<F>(
    mut f: F,
    interval: (f64, f64),
    breakpoints: &[f64],
    n: usize,
) -> Result<f64>
where
    F: FnMut(usize, f64) -> f64,
{
    check_breakpoints(interval, breakpoints)?;
    let rule = cached_rule(n)?;
    let mut total = 0.0;
    let mut left = interval.0;
    for (piece, &right) in breakpoints
        .iter()
        .chain(std::iter::once(&interval.1))
        .enumerate()
    {
        if right > left {
            total += rule.integrate(left, right, |x| f(piece, x));
        }
        left = right;
    }
    Ok(total)
}

/// Sum of `n`-point Gauss rules over the pieces of `interval` cut at
/// `breakpoints`. Exact for integrands that are polynomials of degree at
/// most `2n - 1` on every piece.
pub fn integrate_split<F>(f: F, interval: (f64, f64), breakpoints: &[f64], n: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate_pieces(|_, x| f(x), interval, breakpoints, n)
}
