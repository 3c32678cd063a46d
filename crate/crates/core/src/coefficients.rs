//! Piecewise constant diffusion coefficients, problem data and manufactured
//! solutions.

use std::fmt;
use std::sync::Arc;

use crate::error::{IfeError, Result};
use crate::Side;

/// Relative tolerance under which two abscissae are considered identical.
pub const INTERFACE_TOLERANCE: f64 = 1e-14;

/// A scalar function of one real variable.
pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A scalar function that can be evaluated as a one-sided limit.
pub type SidedFn = Arc<dyn Fn(f64, Side) -> f64 + Send + Sync>;

/// Piecewise constant positive coefficient over a parent interval.
///
/// Piece `j` covers `[breakpoints[j-1], breakpoints[j])`; the last piece is
/// closed on the right.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstantCoefficient {
    interval: (f64, f64),
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewiseConstantCoefficient {
    pub fn new(interval: (f64, f64), breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let (lo, hi) = interval;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(IfeError::InvalidInterface(format!(
                "degenerate parent interval ({lo}, {hi})"
            )));
        }
        if values.len() != breakpoints.len() + 1 {
            return Err(IfeError::InvalidCoefficient(format!(
                "{} values given for {} breakpoints",
                values.len(),
                breakpoints.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(IfeError::InvalidCoefficient(format!(
                "coefficient values must be positive and finite, got {v}"
            )));
        }
        for (k, &bp) in breakpoints.iter().enumerate() {
            if !(bp > lo && bp < hi) {
                return Err(IfeError::InvalidInterface(format!(
                    "interface {bp} is not strictly inside ({lo}, {hi})"
                )));
            }
            if k > 0 && bp <= breakpoints[k - 1] {
                return Err(IfeError::InvalidInterface(format!(
                    "interfaces must be strictly increasing, got {} then {bp}",
                    breakpoints[k - 1]
                )));
            }
        }
        Ok(Self {
            interval,
            breakpoints,
            values,
        })
    }

    pub fn constant(interval: (f64, f64), value: f64) -> Result<Self> {
        Self::new(interval, Vec::new(), vec![value])
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn piece_count(&self) -> usize {
        self.values.len()
    }

    /// Absolute tolerance used to snap abscissae onto breakpoints.
    pub fn tolerance(&self) -> f64 {
        INTERFACE_TOLERANCE * (self.interval.1 - self.interval.0)
    }

    /// Ratio of the largest to the smallest piece value.
    pub fn ratio(&self) -> f64 {
        let max = self.values.iter().cloned().fold(f64::MIN, f64::max);
        let min = self.values.iter().cloned().fold(f64::MAX, f64::min);
        max / min
    }

    /// Bounds of piece `j`.
    pub fn piece_bounds(&self, j: usize) -> (f64, f64) {
        let lo = if j == 0 {
            self.interval.0
        } else {
            self.breakpoints[j - 1]
        };
        let hi = if j == self.breakpoints.len() {
            self.interval.1
        } else {
            self.breakpoints[j]
        };
        (lo, hi)
    }

    /// Closed-open piece lookup: a point on a breakpoint belongs to the piece
    /// on its right.
    pub fn piece_index(&self, x: f64) -> usize {
        self.piece_index_side(x, Side::Right)
    }

    /// One-sided piece lookup. Points within [`Self::tolerance`] of a
    /// breakpoint are treated as lying on it.
    pub fn piece_index_side(&self, x: f64, side: Side) -> usize {
        locate_piece(&self.breakpoints, x, self.tolerance(), side)
    }

    pub fn value(&self, x: f64) -> f64 {
        self.values[self.piece_index(x)]
    }

    pub fn value_side(&self, x: f64, side: Side) -> f64 {
        self.values[self.piece_index_side(x, side)]
    }

    /// The coefficient seen by the sub-interval `[lo, hi]`.
    ///
    /// Breakpoints closer than [`Self::tolerance`] to either end are dropped,
    /// so a coefficient restricted to an interface-fitted cell is constant.
    pub fn restrict(&self, lo: f64, hi: f64) -> Result<Self> {
        let tol = self.tolerance();
        let breaks: Vec<f64> = self
            .breakpoints
            .iter()
            .copied()
            .filter(|&bp| bp > lo + tol && bp < hi - tol)
            .collect();
        let mut values = Vec::with_capacity(breaks.len() + 1);
        let mut left = lo;
        for &right in breaks.iter().chain(std::iter::once(&hi)) {
            values.push(self.value(0.5 * (left + right)));
            left = right;
        }
        Self::new((lo, hi), breaks, values)
    }

    /// The same coefficient expressed on `[lo, hi]` through the affine map
    /// sending the parent interval onto it.
    pub fn map_affine(&self, lo: f64, hi: f64) -> Result<Self> {
        let (a, b) = self.interval;
        let scale = (hi - lo) / (b - a);
        let breaks = self
            .breakpoints
            .iter()
            .map(|&x| lo + (x - a) * scale)
            .collect();
        Self::new((lo, hi), breaks, self.values.clone())
    }
}

/// Index of the piece containing `x`, snapping onto breakpoints within `tol`.
pub(crate) fn locate_piece(breakpoints: &[f64], x: f64, tol: f64, side: Side) -> usize {
    let below = breakpoints.partition_point(|&bp| bp < x - tol);
    match breakpoints.get(below) {
        Some(&bp) if (bp - x).abs() <= tol => match side {
            Side::Left => below,
            Side::Right => below + 1,
        },
        _ => below,
    }
}

/// An exact solution with its flux `β u'`, used to manufacture right-hand
/// sides and measure errors.
#[derive(Clone)]
pub struct ManufacturedSolution {
    beta: PiecewiseConstantCoefficient,
    value: SidedFn,
    flux: SidedFn,
    flux_derivative: SidedFn,
}

impl fmt::Debug for ManufacturedSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ManufacturedSolution")
            .field("beta", &self.beta)
            .finish_non_exhaustive()
    }
}

impl ManufacturedSolution {
    /// Builds a solution from its value, flux and flux derivative. The
    /// derivative `u'` is recovered as `flux / β`.
    pub fn new(
        beta: PiecewiseConstantCoefficient,
        value: SidedFn,
        flux: SidedFn,
        flux_derivative: SidedFn,
    ) -> Self {
        Self {
            beta,
            value,
            flux,
            flux_derivative,
        }
    }

    /// The identically zero solution.
    pub fn zero(beta: PiecewiseConstantCoefficient) -> Self {
        let zero: SidedFn = Arc::new(|_, _| 0.0);
        Self::new(beta, zero.clone(), zero.clone(), zero)
    }

    /// `u = cos(x) / β_j + C_j` on piece `j`, with the constants chosen so
    /// that `u` is continuous. The flux is `-sin(x)` everywhere.
    pub fn cosine(beta: PiecewiseConstantCoefficient) -> Self {
        let mut shifts = vec![0.0; beta.piece_count()];
        for j in 1..beta.piece_count() {
            let alpha = beta.breakpoints()[j - 1];
            let (left, right) = (beta.values()[j - 1], beta.values()[j]);
            shifts[j] = shifts[j - 1] + (1.0 / left - 1.0 / right) * alpha.cos();
        }
        let b = beta.clone();
        let value: SidedFn = Arc::new(move |x, side| {
            let j = b.piece_index_side(x, side);
            x.cos() / b.values()[j] + shifts[j]
        });
        let flux: SidedFn = Arc::new(|x, _| -x.sin());
        let flux_derivative: SidedFn = Arc::new(|x, _| -x.cos());
        Self::new(beta, value, flux, flux_derivative)
    }

    pub fn beta(&self) -> &PiecewiseConstantCoefficient {
        &self.beta
    }

    /// `u(x)`, the left limit on an interface.
    pub fn value(&self, x: f64) -> f64 {
        (self.value)(x, Side::Left)
    }

    pub fn value_side(&self, x: f64, side: Side) -> f64 {
        (self.value)(x, side)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.derivative_side(x, Side::Left)
    }

    pub fn derivative_side(&self, x: f64, side: Side) -> f64 {
        (self.flux)(x, side) / self.beta.value_side(x, side)
    }

    pub fn flux(&self, x: f64) -> f64 {
        (self.flux)(x, Side::Left)
    }

    pub fn flux_side(&self, x: f64, side: Side) -> f64 {
        (self.flux)(x, side)
    }

    pub fn flux_derivative_side(&self, x: f64, side: Side) -> f64 {
        (self.flux_derivative)(x, side)
    }
}

/// The one-interface solution on `[0, 1]`:
/// `cos(x)/β⁻` left of `α`, `cos(x)/β⁺ + (1/β⁻ - 1/β⁺) cos(α)` right of it.
pub fn one_interface_solution(
    beta_minus: f64,
    beta_plus: f64,
    alpha: f64,
) -> Result<ManufacturedSolution> {
    check_positive(&[beta_minus, beta_plus])?;
    let beta =
        PiecewiseConstantCoefficient::new((0.0, 1.0), vec![alpha], vec![beta_minus, beta_plus])?;
    Ok(ManufacturedSolution::cosine(beta))
}

/// The two-interface solution on `[0, 1]` with three coefficient pieces.
pub fn two_interface_solution(betas: [f64; 3], alphas: [f64; 2]) -> Result<ManufacturedSolution> {
    check_positive(&betas)?;
    let beta = PiecewiseConstantCoefficient::new((0.0, 1.0), alphas.to_vec(), betas.to_vec())?;
    Ok(ManufacturedSolution::cosine(beta))
}

fn check_positive(values: &[f64]) -> Result<()> {
    match values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        Some(v) => Err(IfeError::InvalidCoefficient(format!(
            "coefficient values must be positive, got {v}"
        ))),
        None => Ok(()),
    }
}

/// `f = -(β u')' + γ u' + c u` for a manufactured solution. One-sided
/// quantities use the left limit on interfaces.
pub fn rhs_for(solution: &ManufacturedSolution, gamma: f64, c: f64) -> RealFn {
    let s = solution.clone();
    Arc::new(move |x| {
        -s.flux_derivative_side(x, Side::Left)
            + gamma * s.derivative_side(x, Side::Left)
            + c * s.value_side(x, Side::Left)
    })
}

/// Problem data for `-(β u')' + γ u' + c u = f` with Dirichlet values.
#[derive(Clone)]
pub struct ProblemSpec {
    pub beta: PiecewiseConstantCoefficient,
    pub gamma: f64,
    pub c: f64,
    pub rhs: RealFn,
    pub exact: Option<ManufacturedSolution>,
    boundary_values: (f64, f64),
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("beta", &self.beta)
            .field("gamma", &self.gamma)
            .field("c", &self.c)
            .field("boundary_values", &self.boundary_values)
            .field("exact", &self.exact)
            .finish_non_exhaustive()
    }
}

impl ProblemSpec {
    /// Problem with homogeneous Dirichlet conditions on `beta`'s interval.
    pub fn new(beta: PiecewiseConstantCoefficient, gamma: f64, c: f64, rhs: RealFn) -> Self {
        Self {
            beta,
            gamma,
            c,
            rhs,
            exact: None,
            boundary_values: (0.0, 0.0),
        }
    }

    /// Problem whose forcing and Dirichlet data are taken from `exact`.
    pub fn manufactured(exact: ManufacturedSolution, gamma: f64, c: f64) -> Self {
        let rhs = rhs_for(&exact, gamma, c);
        let (a, b) = exact.beta().interval();
        let boundary_values = (exact.value_side(a, Side::Right), exact.value_side(b, Side::Left));
        Self {
            beta: exact.beta().clone(),
            gamma,
            c,
            rhs,
            exact: Some(exact),
            boundary_values,
        }
    }

    pub fn with_boundary_values(mut self, left: f64, right: f64) -> Self {
        self.boundary_values = (left, right);
        self
    }

    pub fn domain(&self) -> (f64, f64) {
        self.beta.interval()
    }

    pub fn boundary_values(&self) -> (f64, f64) {
        self.boundary_values
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rejects_bad_coefficients() {
        assert!(matches!(
            PiecewiseConstantCoefficient::new((0.0, 1.0), vec![0.5], vec![1.0, 0.0]),
            Err(IfeError::InvalidCoefficient(_))
        ));
        assert!(matches!(
            PiecewiseConstantCoefficient::new((0.0, 1.0), vec![0.6, 0.4], vec![1.0, 2.0, 3.0]),
            Err(IfeError::InvalidInterface(_))
        ));
        assert!(matches!(
            PiecewiseConstantCoefficient::new((0.0, 1.0), vec![1.0], vec![1.0, 2.0]),
            Err(IfeError::InvalidInterface(_))
        ));
        assert!(matches!(
            one_interface_solution(-1.0, 5.0, 0.5),
            Err(IfeError::InvalidCoefficient(_))
        ));
        assert!(matches!(
            two_interface_solution([1.0, 5.0, 100.0], [0.6, 0.5]),
            Err(IfeError::InvalidInterface(_))
        ));
    }

    #[test]
    fn piece_lookup_conventions() {
        let beta =
            PiecewiseConstantCoefficient::new((0.0, 1.0), vec![0.25, 0.5], vec![1.0, 2.0, 3.0])
                .unwrap();
        assert_eq!(beta.value(0.0), 1.0);
        assert_eq!(beta.value(0.25), 2.0);
        assert_eq!(beta.value(1.0), 3.0);
        assert_eq!(beta.value_side(0.25, Side::Left), 1.0);
        assert_eq!(beta.value_side(0.5 + 1e-16, Side::Left), 2.0);
        assert_eq!(beta.value_side(0.5 - 1e-16, Side::Right), 3.0);
        assert_eq!(beta.ratio(), 3.0);
    }

    #[test]
    fn restrict_and_map() {
        let beta =
            PiecewiseConstantCoefficient::new((0.0, 1.0), vec![0.3, 0.35], vec![1.0, 5.0, 100.0])
                .unwrap();
        let cell = beta.restrict(0.25, 0.375).unwrap();
        assert_eq!(cell.breakpoints(), &[0.3, 0.35]);
        assert_eq!(cell.values(), &[1.0, 5.0, 100.0]);
        let reference = cell.map_affine(-1.0, 1.0).unwrap();
        assert!((reference.breakpoints()[0] - (-0.2)).abs() < 1e-14);
        let plain = beta.restrict(0.5, 0.625).unwrap();
        assert_eq!(plain.values(), &[100.0]);
        // breakpoint on the cell boundary is dropped
        let fitted = beta.restrict(0.3, 0.32).unwrap();
        assert_eq!(fitted.values(), &[5.0]);
    }

    #[test]
    fn one_interface_continuity_and_flux() {
        let alpha = PI / 6.0;
        let u = one_interface_solution(1.0, 5.0, alpha).unwrap();
        let jump = u.value_side(alpha, Side::Right) - u.value_side(alpha, Side::Left);
        assert!(jump.abs() < 1e-14);
        // flux = -sin x; at pi/6 this is -1/2 from both sides
        assert!((u.flux_side(alpha, Side::Left) + 0.5).abs() < 1e-15);
        assert!((u.flux_side(alpha, Side::Right) + 0.5).abs() < 1e-15);
        let d_left = u.derivative_side(alpha, Side::Left);
        let d_right = u.derivative_side(alpha, Side::Right);
        assert!((d_left + 0.5).abs() < 1e-15);
        assert!((d_right + 0.1).abs() < 1e-15);
    }

    #[test]
    fn equal_coefficients_reduce_to_scaled_cosine() {
        let u = one_interface_solution(3.0, 3.0, 0.4).unwrap();
        let w = two_interface_solution([3.0; 3], [0.2, 0.7]).unwrap();
        for i in 0..=20 {
            let x = i as f64 / 20.0;
            assert!((u.value(x) - x.cos() / 3.0).abs() < 1e-15);
            assert!((w.value(x) - x.cos() / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn two_interface_continuity() {
        let alphas = [PI / 6.0, PI / 6.0 + 0.06];
        let u = two_interface_solution([1.0, 5.0, 100.0], alphas).unwrap();
        for &a in &alphas {
            let jump = u.value_side(a, Side::Right) - u.value_side(a, Side::Left);
            assert!(jump.abs() < 1e-14, "jump {jump}");
            let fjump = u.flux_side(a, Side::Right) - u.flux_side(a, Side::Left);
            assert!(fjump.abs() < 1e-14);
        }
        assert!((u.flux(alphas[1]) + alphas[1].sin()).abs() < 1e-15);
    }

    #[test]
    fn rhs_matches_hand_differentiation() {
        let beta_m = 2.0;
        let u = one_interface_solution(beta_m, 5.0, PI / 6.0).unwrap();
        let f0 = rhs_for(&u, 0.0, 0.0);
        let f1 = rhs_for(&u, 1.0, 1.0);
        for &x in &[0.05, 0.3, 0.5, 0.7, 0.95] {
            assert!((f0(x) - x.cos()).abs() < 1e-15);
        }
        let x: f64 = 0.3;
        let expected = x.cos() - x.sin() / beta_m + x.cos() / beta_m;
        assert!((f1(x) - expected).abs() < 1e-15);

        let zero = ManufacturedSolution::zero(u.beta().clone());
        let fz = rhs_for(&zero, 3.0, 7.0);
        assert_eq!(fz(0.4), 0.0);
    }

    #[test]
    fn manufactured_problem_uses_exact_boundary_values() {
        let u = one_interface_solution(1.0, 5.0, PI / 6.0).unwrap();
        let problem = ProblemSpec::manufactured(u.clone(), 1.0, 1.0);
        let (ga, gb) = problem.boundary_values();
        assert_eq!(ga, 1.0);
        assert!((gb - u.value(1.0)).abs() < 1e-15);
        assert_eq!(problem.domain(), (0.0, 1.0));
    }
}
