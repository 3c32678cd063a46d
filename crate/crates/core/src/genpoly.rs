//! Standard and generalized Legendre/Lobatto families on the reference
//! element `[-1, 1]`.
//!
//! The generalized Legendre polynomials `L_n` are monic and orthogonal with
//! respect to the piecewise constant weight `w = 1/β̂`; they are built by the
//! Stieltjes three-term recurrence. The generalized Lobatto functions are
//!
//! ```text
//! φ_n(ξ) = ∫_{-1}^{ξ} w(t) L_{n-1}(t) dt,   n >= 2,
//! ```
//!
//! plus the two piecewise linear nodal functions `φ_0`, `φ_1`. All
//! polynomial algebra is done on monomial coefficients; inner products use
//! Gauss rules that are exact for the integrand degree on every piece.

use std::io::Write;

use crate::coefficients::{locate_piece, PiecewiseConstantCoefficient, INTERFACE_TOLERANCE};
use crate::error::{IfeError, Result};
use crate::quadrature::integrate_pieces;
use crate::Side;

/// Highest supported polynomial degree `p` of a family.
pub const MAX_DEGREE: usize = 6;

/// Slack allowed when checking that an abscissa lies in `[-1, 1]`.
const REFERENCE_SLACK: f64 = 1e-12;

/// Real polynomial stored as ascending monomial coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Self { coeffs: vec![c] }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Index of the highest nonzero coefficient (0 for the zero polynomial).
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Value of the `k`-th derivative at `x`.
    pub fn eval_derivative(&self, x: f64, k: usize) -> f64 {
        let mut acc = 0.0;
        for i in (k..self.coeffs.len()).rev() {
            let falling: f64 = ((i - k + 1)..=i).map(|m| m as f64).product();
            acc = acc * x + self.coeffs[i] * falling;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::constant(0.0);
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(0.0);
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| c / (i as f64 + 1.0)),
        );
        Self::new(coeffs)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, other: &Self, s: f64) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(
            (0..n)
                .map(|i| {
                    self.coeffs.get(i).copied().unwrap_or(0.0)
                        + s * other.coeffs.get(i).copied().unwrap_or(0.0)
                })
                .collect(),
        )
    }

    /// `(x - shift) * self`.
    pub fn times_linear(&self, shift: f64) -> Self {
        let mut coeffs = vec![0.0; self.coeffs.len() + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[i + 1] += c;
            coeffs[i] -= shift * c;
        }
        Self::new(coeffs)
    }

    /// Adds `c` to the constant coefficient.
    pub fn with_constant_term(mut self, c: f64) -> Self {
        if self.coeffs.is_empty() {
            self.coeffs.push(0.0);
        }
        self.coeffs[0] += c;
        self
    }
}

/// Piecewise polynomial on `[-1, 1]` with one monomial expansion per piece.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePolynomial {
    breakpoints: Vec<f64>,
    pieces: Vec<Polynomial>,
}

impl PiecewisePolynomial {
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<Polynomial>) -> Result<Self> {
        if pieces.len() != breakpoints.len() + 1 {
            return Err(IfeError::InvalidArgument(format!(
                "{} pieces for {} breakpoints",
                pieces.len(),
                breakpoints.len()
            )));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0])
            || breakpoints.iter().any(|&b| !(b > -1.0 && b < 1.0))
        {
            return Err(IfeError::InvalidArgument(
                "breakpoints must be sorted and inside (-1, 1)".into(),
            ));
        }
        Ok(Self {
            breakpoints,
            pieces,
        })
    }

    /// A genuine polynomial, viewed as a single piece.
    pub fn single(poly: Polynomial) -> Self {
        Self {
            breakpoints: Vec::new(),
            pieces: vec![poly],
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Polynomial] {
        &self.pieces
    }

    pub fn piece(&self, j: usize) -> &Polynomial {
        &self.pieces[j]
    }

    pub fn degree(&self) -> usize {
        self.pieces.iter().map(Polynomial::degree).max().unwrap_or(0)
    }

    pub fn piece_bounds(&self, j: usize) -> (f64, f64) {
        let lo = if j == 0 { -1.0 } else { self.breakpoints[j - 1] };
        let hi = self.breakpoints.get(j).copied().unwrap_or(1.0);
        (lo, hi)
    }

    pub fn piece_index(&self, xi: f64, side: Side) -> usize {
        locate_piece(&self.breakpoints, xi, 2.0 * INTERFACE_TOLERANCE, side)
    }

    fn check(xi: f64) -> Result<()> {
        if xi.is_nan() || xi.abs() > 1.0 + REFERENCE_SLACK {
            return Err(IfeError::Domain {
                value: xi,
                lo: -1.0,
                hi: 1.0,
            });
        }
        Ok(())
    }

    /// One-sided value at `ξ`.
    pub fn eval(&self, xi: f64, side: Side) -> Result<f64> {
        self.eval_nth_derivative(xi, 0, side)
    }

    pub fn eval_derivative(&self, xi: f64, side: Side) -> Result<f64> {
        self.eval_nth_derivative(xi, 1, side)
    }

    pub fn eval_nth_derivative(&self, xi: f64, k: usize, side: Side) -> Result<f64> {
        Self::check(xi)?;
        let j = self.piece_index(xi, side);
        Ok(self.pieces[j].eval_derivative(xi, k))
    }

    /// Value using the expansion of piece `j`, without domain checks.
    pub fn eval_in_piece(&self, j: usize, xi: f64) -> f64 {
        self.pieces[j].eval(xi)
    }

    pub fn derivative_in_piece(&self, j: usize, xi: f64, k: usize) -> f64 {
        self.pieces[j].eval_derivative(xi, k)
    }

    /// `v(b+) - v(b-)` of the `k`-th derivative at breakpoint `b`.
    pub fn jump(&self, breakpoint: usize, k: usize) -> f64 {
        let x = self.breakpoints[breakpoint];
        self.pieces[breakpoint + 1].eval_derivative(x, k) - self.pieces[breakpoint].eval_derivative(x, k)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(|p| p.scaled(s)).collect(),
        }
    }

    /// Continuous antiderivative vanishing at `-1`.
    pub fn antiderivative_from_left(&self) -> Self {
        let mut pieces = Vec::with_capacity(self.pieces.len());
        let mut left_value = 0.0;
        for (j, poly) in self.pieces.iter().enumerate() {
            let (lo, hi) = self.piece_bounds(j);
            let anti = poly.antiderivative();
            let shift = left_value - anti.eval(lo);
            let anti = anti.with_constant_term(shift);
            left_value = anti.eval(hi);
            pieces.push(anti);
        }
        Self {
            breakpoints: self.breakpoints.clone(),
            pieces,
        }
    }

    /// `∫_{-1}^{1}` of the function.
    pub fn integral(&self) -> f64 {
        let anti = self.antiderivative_from_left();
        anti.pieces.last().map_or(0.0, |p| p.eval(1.0))
    }
}

/// Sign-change abscissae of `poly` in the open interval `(-1, 1)`.
///
/// Each piece is scanned at `64 (deg + 1)` uniform points; every bracketed
/// sign change is refined by bisection to full precision.
pub fn interior_roots(poly: &PiecewisePolynomial) -> Vec<f64> {
    let samples_per_piece = 64 * (poly.degree() + 1);
    let mut roots = Vec::new();
    let mut last: Option<(f64, f64)> = None;
    let last_piece = poly.pieces.len() - 1;
    for j in 0..=last_piece {
        let (lo, hi) = poly.piece_bounds(j);
        // the endpoints are excluded by index: the mapped abscissa of the
        // last sample can round to just below 1
        let first = usize::from(j == 0);
        let end = samples_per_piece - usize::from(j == last_piece);
        for k in first..=end {
            let xi = lo + (hi - lo) * k as f64 / samples_per_piece as f64;
            let v = poly.eval_in_piece(j, xi);
            if v == 0.0 {
                continue;
            }
            if let Some((x0, v0)) = last {
                if v0.signum() != v.signum() {
                    roots.push(bisect(poly, x0, xi, v0));
                }
            }
            last = Some((xi, v));
        }
    }
    roots
}

fn bisect(poly: &PiecewisePolynomial, mut lo: f64, mut hi: f64, f_lo: f64) -> f64 {
    let sign_lo = f_lo.signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = poly.eval_in_piece(poly.piece_index(mid, Side::Left), mid);
        if v == 0.0 {
            return mid;
        }
        if v.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn expect_roots(poly: &PiecewisePolynomial, expected: usize) -> Result<Vec<f64>> {
    let roots = interior_roots(poly);
    if roots.len() != expected {
        return Err(IfeError::RootCountViolation {
            expected,
            found: roots.len(),
        });
    }
    Ok(roots)
}

/// Shared interface of the standard and generalized reference families.
pub trait LobattoFamily {
    /// Polynomial degree `p` of the finite element space.
    fn degree(&self) -> usize;

    /// Legendre-type polynomial of degree `n`, `0 <= n <= p`.
    fn legendre(&self, n: usize) -> &PiecewisePolynomial;

    /// Lobatto-type shape function `n`, `0 <= n <= p + 1`.
    fn lobatto(&self, n: usize) -> &PiecewisePolynomial;

    /// Reference coefficient `β̂` the family is built for; constant 1 for
    /// the standard family.
    fn reference_weight(&self) -> &PiecewiseConstantCoefficient;

    /// The `n` simple roots of the degree-`n` Legendre-type polynomial.
    fn legendre_roots(&self, n: usize) -> Result<Vec<f64>> {
        expect_roots(self.legendre(n), n)
    }

    /// The `n - 2` interior roots of Lobatto function `n >= 2`.
    fn lobatto_roots(&self, n: usize) -> Result<Vec<f64>> {
        if n < 2 {
            return Err(IfeError::InvalidArgument(format!(
                "interior Lobatto roots need n >= 2, got {n}"
            )));
        }
        expect_roots(self.lobatto(n), n - 2)
    }
}

fn check_degree(p: usize) -> Result<()> {
    if p > MAX_DEGREE {
        return Err(IfeError::DegreeTooHigh {
            requested: p,
            max: MAX_DEGREE,
        });
    }
    Ok(())
}

fn reference_interval_weight() -> PiecewiseConstantCoefficient {
    PiecewiseConstantCoefficient::constant((-1.0, 1.0), 1.0).expect("unit weight is valid")
}

/// Legendre polynomials `P_0..=P_p` and Lobatto polynomials `ψ_0..=ψ_{p+1}`.
#[derive(Debug, Clone)]
pub struct StandardBasis {
    degree: usize,
    weight: PiecewiseConstantCoefficient,
    legendre: Vec<PiecewisePolynomial>,
    lobatto: Vec<PiecewisePolynomial>,
}

impl StandardBasis {
    pub fn new(p: usize) -> Result<Self> {
        check_degree(p)?;
        let mut legendre = vec![Polynomial::constant(1.0), Polynomial::new(vec![0.0, 1.0])];
        for n in 1..p {
            let nf = n as f64;
            let next = legendre[n]
                .times_linear(0.0)
                .scaled((2.0 * nf + 1.0) / (nf + 1.0))
                .add_scaled(&legendre[n - 1], -nf / (nf + 1.0));
            legendre.push(next);
        }
        legendre.truncate(p + 1);

        let mut lobatto = vec![
            Polynomial::new(vec![0.5, -0.5]),
            Polynomial::new(vec![0.5, 0.5]),
        ];
        for n in 2..=p + 1 {
            let anti = legendre[n - 1].antiderivative();
            let c = -anti.eval(-1.0);
            lobatto.push(anti.with_constant_term(c));
        }
        Ok(Self {
            degree: p,
            weight: reference_interval_weight(),
            legendre: legendre.into_iter().map(PiecewisePolynomial::single).collect(),
            lobatto: lobatto.into_iter().map(PiecewisePolynomial::single).collect(),
        })
    }
}

impl LobattoFamily for StandardBasis {
    fn degree(&self) -> usize {
        self.degree
    }

    fn legendre(&self, n: usize) -> &PiecewisePolynomial {
        &self.legendre[n]
    }

    fn lobatto(&self, n: usize) -> &PiecewisePolynomial {
        &self.lobatto[n]
    }

    fn reference_weight(&self) -> &PiecewiseConstantCoefficient {
        &self.weight
    }
}

/// Output of the Stieltjes procedure.
#[derive(Debug, Clone)]
pub struct Recurrence {
    /// `a_0..=a_p`.
    pub a: Vec<f64>,
    /// `b_1..=b_p` (`b[0]` is `b_1`).
    pub b: Vec<f64>,
    /// Monic `L_0..=L_p`.
    pub legendre: Vec<Polynomial>,
    /// `c_n = (L_n, L_n)_w`.
    pub norms: Vec<f64>,
}

/// `Σ_j w_j ∫_{piece j} f g` with a rule exact for the product degree.
fn weighted_product(weight: &PiecewiseConstantCoefficient, f: &Polynomial, g: &Polynomial) -> f64 {
    let points = (f.degree() + g.degree()) / 2 + 1;
    let values = weight.values();
    integrate_pieces(
        |j, x| f.eval(x) * g.eval(x) / values[j],
        weight.interval(),
        weight.breakpoints(),
        points,
    )
    .expect("reference weight breakpoints are validated")
}

fn check_reference_weight(weight: &PiecewiseConstantCoefficient) -> Result<()> {
    if weight.interval() != (-1.0, 1.0) {
        return Err(IfeError::InvalidArgument(format!(
            "reference weight must live on [-1, 1], got {:?}",
            weight.interval()
        )));
    }
    Ok(())
}

/// Monic orthogonal polynomials for the weight `1/β̂` by the three-term
/// recurrence `L_{n+1} = (ξ - a_n) L_n - b_n L_{n-1}`.
pub fn build_recurrence(weight: &PiecewiseConstantCoefficient, p: usize) -> Result<Recurrence> {
    check_degree(p)?;
    check_reference_weight(weight)?;
    let mut legendre = vec![Polynomial::constant(1.0)];
    let mut a = Vec::with_capacity(p + 1);
    let mut b = Vec::with_capacity(p);
    let mut norms: Vec<f64> = Vec::with_capacity(p + 1);
    for n in 0..=p {
        let ln = &legendre[n];
        let c = weighted_product(weight, ln, ln);
        if !(c.is_finite() && c > 0.0) {
            return Err(IfeError::RecurrenceBreakdown {
                degree: n,
                detail: format!("norm c_{n} = {c}"),
            });
        }
        let an = weighted_product(weight, &ln.times_linear(0.0), ln) / c;
        a.push(an);
        if n >= 1 {
            let bn = c / norms[n - 1];
            if !(bn.is_finite() && bn > 0.0) {
                return Err(IfeError::RecurrenceBreakdown {
                    degree: n,
                    detail: format!("b_{n} = {bn}"),
                });
            }
            b.push(bn);
        }
        norms.push(c);
        if n < p {
            let mut next = ln.times_linear(an);
            if n >= 1 {
                next = next.add_scaled(&legendre[n - 1], -b[n - 1]);
            }
            legendre.push(next);
        }
    }
    Ok(Recurrence {
        a,
        b,
        legendre,
        norms,
    })
}

/// Continuous piecewise antiderivative of `w · poly` vanishing at `-1`.
fn weighted_antiderivative(
    weight: &PiecewiseConstantCoefficient,
    poly: &Polynomial,
) -> PiecewisePolynomial {
    let anti = poly.antiderivative();
    let w: Vec<f64> = weight.values().iter().map(|v| 1.0 / v).collect();
    let mut shift = -w[0] * anti.eval(-1.0);
    let mut pieces = Vec::with_capacity(w.len());
    pieces.push(anti.scaled(w[0]).with_constant_term(shift));
    for (j, &alpha) in weight.breakpoints().iter().enumerate() {
        shift += (w[j] - w[j + 1]) * anti.eval(alpha);
        pieces.push(anti.scaled(w[j + 1]).with_constant_term(shift));
    }
    PiecewisePolynomial {
        breakpoints: weight.breakpoints().to_vec(),
        pieces,
    }
}

/// Generalized Lobatto functions `φ_0..=φ_{p+1}` from `L_0..=L_p`.
pub fn build_lobatto(
    weight: &PiecewiseConstantCoefficient,
    legendre: &[Polynomial],
) -> Vec<PiecewisePolynomial> {
    let unit = weighted_antiderivative(weight, &Polynomial::constant(1.0));
    let total = unit.pieces.last().map_or(1.0, |p| p.eval(1.0));
    let phi1 = unit.scaled(1.0 / total);
    let phi0 = PiecewisePolynomial {
        breakpoints: phi1.breakpoints.clone(),
        pieces: phi1
            .pieces
            .iter()
            .map(|p| p.scaled(-1.0).with_constant_term(1.0))
            .collect(),
    };
    let mut lobatto = vec![phi0, phi1];
    lobatto.extend(legendre.iter().skip(1).map(|l| weighted_antiderivative(weight, l)));
    lobatto
}

/// Generalized Legendre and Lobatto families for one reference weight.
#[derive(Debug, Clone)]
pub struct GeneralizedBasis {
    weight: PiecewiseConstantCoefficient,
    degree: usize,
    recurrence_a: Vec<f64>,
    recurrence_b: Vec<f64>,
    legendre: Vec<PiecewisePolynomial>,
    lobatto: Vec<PiecewisePolynomial>,
    legendre_norms: Vec<f64>,
    lobatto_norms: Vec<f64>,
}

impl GeneralizedBasis {
    /// Builds `L_0..=L_p` and `φ_0..=φ_{p+1}` for the reference coefficient
    /// `β̂` on `[-1, 1]` (weight `w = 1/β̂`).
    pub fn build(weight: PiecewiseConstantCoefficient, p: usize) -> Result<Self> {
        let rec = build_recurrence(&weight, p)?;
        let lobatto = build_lobatto(&weight, &rec.legendre);
        let mut basis = Self {
            degree: p,
            recurrence_a: rec.a,
            recurrence_b: rec.b,
            legendre: rec
                .legendre
                .into_iter()
                .map(PiecewisePolynomial::single)
                .collect(),
            lobatto,
            legendre_norms: rec.norms,
            lobatto_norms: Vec::new(),
            weight,
        };
        basis.lobatto_norms = (0..=p + 1).map(|n| basis.stiffness_product(n, n)).collect();
        if let Some(n) = basis.lobatto_norms.iter().position(|&c| !(c > 0.0)) {
            return Err(IfeError::RecurrenceBreakdown {
                degree: n,
                detail: format!("stiffness norm of φ_{n} is {}", basis.lobatto_norms[n]),
            });
        }
        Ok(basis)
    }

    pub fn weight(&self) -> &PiecewiseConstantCoefficient {
        &self.weight
    }

    pub fn recurrence_a(&self) -> &[f64] {
        &self.recurrence_a
    }

    /// `b_1..=b_p`.
    pub fn recurrence_b(&self) -> &[f64] {
        &self.recurrence_b
    }

    /// `c_n = (L_n, L_n)_w`.
    pub fn legendre_norms(&self) -> &[f64] {
        &self.legendre_norms
    }

    /// `c̃_n = ⟨φ_n, φ_n⟩_β̂`.
    pub fn lobatto_norms(&self) -> &[f64] {
        &self.lobatto_norms
    }

    /// `(L_m, L_n)_w` by exact quadrature.
    pub fn weighted_product(&self, m: usize, n: usize) -> f64 {
        weighted_product(&self.weight, self.legendre[m].piece(0), self.legendre[n].piece(0))
    }

    /// `⟨φ_m, φ_n⟩_β̂ = ∫ β̂ φ_m' φ_n'` by exact quadrature.
    pub fn stiffness_product(&self, m: usize, n: usize) -> f64 {
        let (fm, fn_) = (&self.lobatto[m], &self.lobatto[n]);
        let points = (fm.degree() + fn_.degree()) / 2 + 1;
        let values = self.weight.values();
        integrate_pieces(
            |j, x| values[j] * fm.derivative_in_piece(j, x, 1) * fn_.derivative_in_piece(j, x, 1),
            (-1.0, 1.0),
            self.weight.breakpoints(),
            points,
        )
        .expect("reference weight breakpoints are validated")
    }

    /// `β̂(ξ) φ_n'(ξ)`; equals `L_{n-1}(ξ)` for `n >= 2`.
    pub fn flux_eval(&self, n: usize, xi: f64, side: Side) -> Result<f64> {
        let d = self.lobatto[n].eval_derivative(xi, side)?;
        Ok(self.weight.values()[self.lobatto[n].piece_index(xi, side)] * d)
    }

    /// `⟦β̂ φ_n^{(k)}⟧` at breakpoint `b`; `k = 0` gives the plain value jump.
    pub fn flux_jump(&self, n: usize, k: usize, breakpoint: usize) -> f64 {
        let phi = &self.lobatto[n];
        let x = self.weight.breakpoints()[breakpoint];
        let v = self.weight.values();
        if k == 0 {
            return phi.jump(breakpoint, 0);
        }
        v[breakpoint + 1] * phi.derivative_in_piece(breakpoint + 1, x, k)
            - v[breakpoint] * phi.derivative_in_piece(breakpoint, x, k)
    }

    /// `j`-th iterated antiderivative of `φ_n` from `-1`, evaluated at `+1`;
    /// `j = 0` is `φ_n(1)`. Vanishes for `j <= n - 2`.
    pub fn moment_residual(&self, n: usize, j: usize) -> Result<f64> {
        if !(2..=self.degree + 1).contains(&n) {
            return Err(IfeError::InvalidArgument(format!(
                "moment residual needs 2 <= n <= {}, got {n}",
                self.degree + 1
            )));
        }
        if j > n - 2 {
            return Err(IfeError::Domain {
                value: j as f64,
                lo: 0.0,
                hi: (n - 2) as f64,
            });
        }
        let mut f = self.lobatto[n].clone();
        for _ in 0..j {
            f = f.antiderivative_from_left();
        }
        let last = f.pieces.len() - 1;
        Ok(f.eval_in_piece(last, 1.0))
    }

    /// Writes `xi, phi_0..phi_{p+1}, L_0..L_p` sampled on every piece.
    pub fn write_samples_csv<W: Write>(&self, out: W, samples_per_piece: usize) -> csv::Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        let mut header = vec!["xi".to_string()];
        header.extend((0..self.lobatto.len()).map(|n| format!("phi_{n}")));
        header.extend((0..self.legendre.len()).map(|n| format!("L_{n}")));
        writer.write_record(&header)?;
        let m = samples_per_piece.max(1);
        for j in 0..self.weight.piece_count() {
            let (lo, hi) = self.weight.piece_bounds(j);
            for k in 0..=m {
                let xi = lo + (hi - lo) * k as f64 / m as f64;
                let mut row = vec![format!("{xi:.16e}")];
                row.extend(
                    self.lobatto
                        .iter()
                        .map(|phi| format!("{:.16e}", phi.eval_in_piece(j, xi))),
                );
                row.extend(
                    self.legendre
                        .iter()
                        .map(|l| format!("{:.16e}", l.eval_in_piece(0, xi))),
                );
                writer.write_record(&row)?;
            }
        }
        writer.flush()?;
        Ok(())
    }
}

impl LobattoFamily for GeneralizedBasis {
    fn degree(&self) -> usize {
        self.degree
    }

    fn legendre(&self, n: usize) -> &PiecewisePolynomial {
        &self.legendre[n]
    }

    fn lobatto(&self, n: usize) -> &PiecewisePolynomial {
        &self.lobatto[n]
    }

    fn reference_weight(&self) -> &PiecewiseConstantCoefficient {
        &self.weight
    }
}
