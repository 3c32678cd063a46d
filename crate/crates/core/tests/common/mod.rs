#![allow(dead_code)]

use ife1d::genpoly::{GeneralizedBasis, LobattoFamily, StandardBasis};
use ife1d::quadrature::integrate_pieces;
use ife1d::PiecewiseConstantCoefficient;
use rand::Rng;

/// Reference weight on [-1, 1] with 1 to 3 breakpoints in (-0.99, 0.99) and
/// log-uniform piece values in [1e-2, 1e3].
pub fn random_weight<R: Rng>(rng: &mut R) -> PiecewiseConstantCoefficient {
    loop {
        let count = rng.gen_range(1..=3);
        let mut breaks: Vec<f64> = (0..count).map(|_| rng.gen_range(-0.99..0.99)).collect();
        breaks.sort_by(f64::total_cmp);
        if breaks.windows(2).any(|w| w[1] - w[0] < 1e-3) {
            continue;
        }
        let values = (0..=count)
            .map(|_| 10f64.powf(rng.gen_range(-2.0..3.0)))
            .collect();
        return PiecewiseConstantCoefficient::new((-1.0, 1.0), breaks, values).unwrap();
    }
}

/// Largest residuals of the structural identities of one generalized basis.
#[derive(Debug, Default, Clone, Copy)]
pub struct BasisResiduals {
    /// `|(L_m, L_n)_w| / sqrt(c_m c_n)`, `m != n`.
    pub weighted_orthogonality: f64,
    /// `|<φ_m, φ_n>_β̂| / sqrt(c̃_m c̃_n)`, `m != n`, `m, n >= 1`.
    pub stiffness_orthogonality: f64,
    /// Jumps of `φ_n` and of `β̂ φ_n^{(k)}`, `1 <= k <= n`, relative to the
    /// one-sided magnitudes.
    pub jumps: f64,
    /// `|β̂ φ_n' - L_{n-1}|` at sample points, relative to `max |L_{n-1}|`.
    pub flux_identity: f64,
    /// `|moment_residual(n, j)|`, `0 <= j <= n - 2`.
    pub moments: f64,
    /// Whether every root count matched.
    pub root_counts_ok: bool,
}

fn weighted(weight: &PiecewiseConstantCoefficient, f: impl Fn(usize, f64) -> f64) -> f64 {
    let v = weight.values().to_vec();
    integrate_pieces(|j, x| f(j, x) / v[j], (-1.0, 1.0), weight.breakpoints(), 12).unwrap()
}

pub fn basis_residuals(basis: &GeneralizedBasis) -> BasisResiduals {
    let p = basis.degree();
    let weight = basis.weight();
    let beta = weight.values().to_vec();
    let mut r = BasisResiduals {
        root_counts_ok: true,
        ..Default::default()
    };

    let l = |n: usize| basis.legendre(n).piece(0).clone();
    let norms: Vec<f64> = (0..=p)
        .map(|n| weighted(weight, |_, x| l(n).eval(x).powi(2)))
        .collect();
    for m in 0..=p {
        for n in 0..m {
            let ip = weighted(weight, |_, x| l(m).eval(x) * l(n).eval(x));
            r.weighted_orthogonality = r
                .weighted_orthogonality
                .max(ip.abs() / (norms[m] * norms[n]).sqrt());
        }
    }

    let stiff = |m: usize, n: usize| {
        let (fm, fn_) = (basis.lobatto(m), basis.lobatto(n));
        integrate_pieces(
            |j, x| beta[j] * fm.derivative_in_piece(j, x, 1) * fn_.derivative_in_piece(j, x, 1),
            (-1.0, 1.0),
            weight.breakpoints(),
            12,
        )
        .unwrap()
    };
    let diag: Vec<f64> = (0..=p + 1).map(|n| stiff(n, n)).collect();
    for m in 1..=p + 1 {
        for n in 1..m {
            r.stiffness_orthogonality = r
                .stiffness_orthogonality
                .max(stiff(m, n).abs() / (diag[m] * diag[n]).sqrt());
        }
    }

    for n in 0..=p + 1 {
        let phi = basis.lobatto(n);
        for (b, &x) in weight.breakpoints().iter().enumerate() {
            let (lv, rv) = (phi.derivative_in_piece(b, x, 0), phi.derivative_in_piece(b + 1, x, 0));
            r.jumps = r.jumps.max((rv - lv).abs() / lv.abs().max(rv.abs()).max(1.0));
            for k in 1..=n.max(1) {
                let lf = beta[b] * phi.derivative_in_piece(b, x, k);
                let rf = beta[b + 1] * phi.derivative_in_piece(b + 1, x, k);
                r.jumps = r.jumps.max((rf - lf).abs() / lf.abs().max(rf.abs()).max(1.0));
            }
        }
    }

    for n in 2..=p + 1 {
        let phi = basis.lobatto(n);
        let target = l(n - 1);
        let scale = (0..=200)
            .map(|k| target.eval(-1.0 + k as f64 / 100.0).abs())
            .fold(0.0, f64::max);
        for j in 0..weight.piece_count() {
            let (lo, hi) = weight.piece_bounds(j);
            for k in 0..20 {
                let x = lo + (hi - lo) * (k as f64 + 0.5) / 20.0;
                let d = beta[j] * phi.derivative_in_piece(j, x, 1) - target.eval(x);
                r.flux_identity = r.flux_identity.max(d.abs() / scale);
            }
        }
        for j in 0..=n - 2 {
            r.moments = r.moments.max(basis.moment_residual(n, j).unwrap().abs());
        }
    }

    for n in 1..=p {
        r.root_counts_ok &= basis.legendre_roots(n).is_ok_and(|v| v.len() == n);
    }
    for n in 2..=p + 1 {
        r.root_counts_ok &= basis.lobatto_roots(n).is_ok_and(|v| v.len() == n - 2);
    }
    r
}

/// Leading coefficient of the Legendre polynomial `P_n`.
pub fn legendre_leading(n: usize) -> f64 {
    // (2n)! / (2^n (n!)^2), built as a product to stay exact in floating point
    (1..=n).map(|k| (2 * k - 1) as f64 / k as f64).product()
}

/// For a weight whose pieces all equal `k`: `max |φ_n - ψ_n|` for the
/// nodal functions and `max |k φ_n - ψ_n / lead(P_{n-1})|` for
/// `2 <= n <= p + 1`, over samples.
pub fn reduction_residual(basis: &GeneralizedBasis, standard: &StandardBasis) -> f64 {
    let k = basis.weight().values()[0];
    let mut worst = 0.0_f64;
    for n in 0..=basis.degree() + 1 {
        let (scale, lead) = if n < 2 { (1.0, 1.0) } else { (k, legendre_leading(n - 1)) };
        for s in 0..=40 {
            let x = -1.0 + s as f64 / 20.0;
            let j = basis.weight().piece_index(x).min(basis.weight().piece_count() - 1);
            let phi = basis.lobatto(n).eval_in_piece(j, x);
            let psi = standard.lobatto(n).eval_in_piece(0, x);
            worst = worst.max((scale * phi - psi / lead).abs());
        }
    }
    worst
}
