//! Superconvergence point sets, error norms and convergence-rate regression.

use crate::assembly_solve::{solve_problem, FeFunction};
use crate::coefficients::{ManufacturedSolution, ProblemSpec};
use crate::error::{IfeError, Result};
use crate::mesh_space::FeSpace;
use crate::Side;

/// A point on a specific element, in reference and physical coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementPoint {
    pub element: usize,
    pub xi: f64,
    pub x: f64,
}

/// Where the discrete solution is expected to superconverge.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperconvergencePoints {
    /// Interior roots of the degree-`p+1` Lobatto function of every element
    /// (`p - 1` per element, none for `p = 1`).
    pub lobatto: Vec<Vec<ElementPoint>>,
    /// Roots of the degree-`p` Legendre polynomial of every element.
    pub gauss: Vec<Vec<ElementPoint>>,
    /// Mesh points.
    pub nodes: Vec<f64>,
}

impl SuperconvergencePoints {
    pub fn lobatto_points(&self) -> impl Iterator<Item = &ElementPoint> {
        self.lobatto.iter().flatten()
    }

    pub fn gauss_points(&self) -> impl Iterator<Item = &ElementPoint> {
        self.gauss.iter().flatten()
    }
}

/// Lobatto and Gauss points of every element; interface elements use the
/// generalized families.
pub fn superconvergence_points(space: &FeSpace) -> Result<SuperconvergencePoints> {
    let p = space.degree();
    let mesh = space.mesh();
    let n = mesh.element_count();
    let mut lobatto = Vec::with_capacity(n);
    let mut gauss = Vec::with_capacity(n);
    for e in 0..n {
        let family = space.basis(e).family();
        let to_points = |roots: Vec<f64>| {
            roots
                .into_iter()
                .map(|xi| ElementPoint {
                    element: e,
                    xi,
                    x: mesh.from_reference(e, xi),
                })
                .collect::<Vec<_>>()
        };
        lobatto.push(to_points(family.lobatto_roots(p + 1)?));
        gauss.push(to_points(family.legendre_roots(p)?));
    }
    Ok(SuperconvergencePoints {
        lobatto,
        gauss,
        nodes: mesh.points().to_vec(),
    })
}

/// The six error measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Norm {
    Node,
    Linf,
    Lobatto,
    GaussFlux,
    L2,
    H1,
}

impl Norm {
    pub const ALL: [Norm; 6] = [
        Norm::Node,
        Norm::Linf,
        Norm::Lobatto,
        Norm::GaussFlux,
        Norm::L2,
        Norm::H1,
    ];

    /// Column name in CSV output.
    pub fn name(self) -> &'static str {
        match self {
            Norm::Node => "node",
            Norm::Linf => "linf",
            Norm::Lobatto => "lobatto",
            Norm::GaussFlux => "gauss_flux",
            Norm::L2 => "l2",
            Norm::H1 => "h1",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Errors of one discrete solution on one mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub h: f64,
    /// `max_i |e(x_i)|`.
    pub node: f64,
    /// Maximum of `|e|` over the sample set.
    pub linf: f64,
    /// Maximum of `|e|` over the Lobatto points.
    pub lobatto: f64,
    /// Maximum of `|β e'|` over the Gauss points.
    pub gauss_flux: f64,
    pub l2: f64,
    /// `|e|_{H^1}`.
    pub h1: f64,
}

impl ErrorReport {
    pub fn get(&self, norm: Norm) -> f64 {
        match norm {
            Norm::Node => self.node,
            Norm::Linf => self.linf,
            Norm::Lobatto => self.lobatto,
            Norm::GaussFlux => self.gauss_flux,
            Norm::L2 => self.l2,
            Norm::H1 => self.h1,
        }
    }
}

/// Equispaced samples per noninterface element, endpoints included.
pub const SAMPLES_PER_ELEMENT: usize = 8;
/// Equispaced samples per sub-element of an interface element.
pub const SAMPLES_PER_SUBELEMENT: usize = 10;

/// Sample set of the maximum norm, as `(element, piece, ξ)`: the
/// equispaced samples, the mesh points and the Lobatto points.
pub fn linf_samples(space: &FeSpace, points: &SuperconvergencePoints) -> Vec<(usize, usize, f64)> {
    let mut samples = Vec::new();
    for e in 0..space.mesh().element_count() {
        let weight = space.weight(e);
        let count = if space.mesh().is_interface(e) {
            SAMPLES_PER_SUBELEMENT
        } else {
            SAMPLES_PER_ELEMENT
        };
        for piece in 0..weight.piece_count() {
            let (lo, hi) = weight.piece_bounds(piece);
            for k in 0..count {
                let xi = lo + (hi - lo) * k as f64 / (count - 1) as f64;
                samples.push((e, piece, xi));
            }
        }
        let last = weight.piece_count() - 1;
        samples.push((e, 0, -1.0));
        samples.push((e, last, 1.0));
        for pt in &points.lobatto[e] {
            samples.push((e, weight.piece_index_side(pt.xi, Side::Left), pt.xi));
        }
    }
    samples
}

/// Exact value in the coefficient piece an element sample lies in.
fn exact_value(exact: &ManufacturedSolution, space: &FeSpace, e: usize, piece: usize, xi: f64) -> f64 {
    let x = space.mesh().from_reference(e, xi);
    let weight = space.weight(e);
    let side = side_for_piece(weight.piece_index_side(xi, Side::Left), piece);
    exact.value_side(x, side)
}

fn exact_flux(exact: &ManufacturedSolution, space: &FeSpace, e: usize, piece: usize, xi: f64) -> f64 {
    let x = space.mesh().from_reference(e, xi);
    let side = side_for_piece(space.weight(e).piece_index_side(xi, Side::Left), piece);
    exact.flux_side(x, side)
}

/// On a breakpoint the left lookup lands one piece short of the right
/// piece; pick the limit matching the requested piece.
fn side_for_piece(left_piece: usize, piece: usize) -> Side {
    if piece > left_piece {
        Side::Right
    } else {
        Side::Left
    }
}

/// All six errors of `solution` against `exact`.
pub fn error_report(
    solution: &FeFunction,
    exact: &ManufacturedSolution,
    points: &SuperconvergencePoints,
) -> Result<ErrorReport> {
    let space = solution.space();
    let mesh = space.mesh();
    let p = space.degree();

    let mut node = 0.0_f64;
    for (i, &x) in mesh.points().iter().enumerate() {
        let e = if i == 0 { 0 } else { i - 1 };
        let xi = if i == 0 { -1.0 } else { 1.0 };
        let piece = if i == 0 { 0 } else { space.weight(e).piece_count() - 1 };
        let uh = solution.value_in_piece(e, piece, xi);
        node = node.max((uh - exact.value(x)).abs());
    }

    let mut linf = node;
    for (e, piece, xi) in linf_samples(space, points) {
        let err = solution.value_in_piece(e, piece, xi) - exact_value(exact, space, e, piece, xi);
        linf = linf.max(err.abs());
    }

    let mut lobatto = 0.0_f64;
    for pt in points.lobatto_points() {
        let piece = space.weight(pt.element).piece_index_side(pt.xi, Side::Left);
        let err = solution.value_in_piece(pt.element, piece, pt.xi)
            - exact_value(exact, space, pt.element, piece, pt.xi);
        lobatto = lobatto.max(err.abs());
    }

    let mut gauss_flux = 0.0_f64;
    for pt in points.gauss_points() {
        let piece = space.weight(pt.element).piece_index_side(pt.xi, Side::Left);
        let err = solution.flux_in_piece(pt.element, piece, pt.xi)
            - exact_flux(exact, space, pt.element, piece, pt.xi);
        gauss_flux = gauss_flux.max(err.abs());
    }

    let (mut l2, mut h1) = (0.0, 0.0);
    for e in 0..mesh.element_count() {
        for q in space.quadrature(e, p + 6)? {
            let ev = solution.value_in_piece(e, q.piece, q.xi) - exact_value(exact, space, e, q.piece, q.xi);
            let ed = solution.derivative_in_piece(e, q.piece, q.xi)
                - exact_flux(exact, space, e, q.piece, q.xi) / q.beta;
            l2 += q.weight * ev * ev;
            h1 += q.weight * ed * ed;
        }
    }

    Ok(ErrorReport {
        h: mesh.h(),
        node,
        linf,
        lobatto,
        gauss_flux,
        l2: l2.sqrt(),
        h1: h1.sqrt(),
    })
}

/// Least-squares slope of `log(error)` against `log(h)`. Nonpositive or
/// non-finite errors are skipped; at least three must remain.
pub fn regress_rate(h: &[f64], errors: &[f64]) -> Result<f64> {
    regress_rate_above(h, errors, 0.0)
}

/// As [`regress_rate`], skipping errors at or below `floor`.
pub fn regress_rate_above(h: &[f64], errors: &[f64], floor: f64) -> Result<f64> {
    let pts: Vec<(f64, f64)> = h
        .iter()
        .zip(errors)
        .filter(|(hh, e)| e.is_finite() && **e > floor && **e > 0.0 && **hh > 0.0)
        .map(|(hh, e)| (hh.ln(), e.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(IfeError::InsufficientData { usable: pts.len() });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(sxy / sxx)
}

/// Errors below this multiple of `ε max|u|` are roundoff and are left out of
/// the regression.
pub const MACHINE_FLOOR_FACTOR: f64 = 50.0;

/// Reports for a sequence of meshes and the fitted rate of every norm.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub degree: usize,
    pub mesh_sizes: Vec<usize>,
    pub reports: Vec<ErrorReport>,
    /// Indexed like [`Norm::ALL`]; `None` when fewer than three errors sit
    /// above the machine floor.
    pub rates: [Option<f64>; 6],
}

impl ConvergenceStudy {
    pub fn rate(&self, norm: Norm) -> Option<f64> {
        self.rates[norm.index()]
    }

    pub fn column(&self, norm: Norm) -> Vec<f64> {
        self.reports.iter().map(|r| r.get(norm)).collect()
    }
}

/// `max|u|` over a fine sampling of the domain.
fn solution_scale(exact: &ManufacturedSolution) -> f64 {
    let (a, b) = exact.beta().interval();
    (0..=1000)
        .map(|k| exact.value(a + (b - a) * k as f64 / 1000.0).abs())
        .fold(0.0, f64::max)
}

/// Solves on uniform meshes of each size in `mesh_sizes` and regresses the
/// six error columns. Meshes are solved concurrently.
pub fn convergence_study(
    problem: &ProblemSpec,
    p: usize,
    mesh_sizes: &[usize],
) -> Result<ConvergenceStudy> {
    let exact = problem.exact.as_ref().ok_or_else(|| {
        IfeError::InvalidArgument("convergence study needs a manufactured solution".into())
    })?;
    if mesh_sizes.is_empty() {
        return Err(IfeError::InvalidArgument("no mesh sizes given".into()));
    }
    let reports: Vec<ErrorReport> = std::thread::scope(|scope| {
        let handles: Vec<_> = mesh_sizes
            .iter()
            .map(|&n| {
                scope.spawn(move || -> Result<ErrorReport> {
                    let uh = solve_problem(problem, n, p)?;
                    let points = superconvergence_points(uh.space())?;
                    error_report(&uh, exact, &points)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("mesh worker panicked"))
            .collect::<Result<Vec<_>>>()
    })?;

    let floor = MACHINE_FLOOR_FACTOR * f64::EPSILON * solution_scale(exact);
    let h: Vec<f64> = reports.iter().map(|r| r.h).collect();
    let mut rates = [None; 6];
    for norm in Norm::ALL {
        let column: Vec<f64> = reports.iter().map(|r| r.get(norm)).collect();
        rates[norm.index()] = regress_rate_above(&h, &column, floor).ok();
    }
    Ok(ConvergenceStudy {
        degree: p,
        mesh_sizes: mesh_sizes.to_vec(),
        reports,
        rates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::one_interface_solution;
    use crate::interpolation::interpolate;
    use std::f64::consts::PI;
    use std::sync::Arc;

    #[test]
    fn point_counts_and_positions() {
        let sol = one_interface_solution(1.0, 5.0, PI / 6.0).unwrap();
        let space = FeSpace::uniform(8, 2, sol.beta()).unwrap();
        let pts = superconvergence_points(&space).unwrap();
        for e in 0..8 {
            assert_eq!(pts.lobatto[e].len(), 1);
            assert_eq!(pts.gauss[e].len(), 2);
        }
        assert!((pts.lobatto[0][0].x - 0.0625).abs() < 1e-15);
        let g = pts.gauss[0][0].x;
        assert!((g - 0.0625 * (1.0 - 1.0 / 3f64.sqrt())).abs() < 1e-15);

        let space = FeSpace::uniform(8, 3, sol.beta()).unwrap();
        let pts = superconvergence_points(&space).unwrap();
        assert_eq!(pts.gauss[4].len(), 3);
        assert_eq!(pts.lobatto[4].len(), 2);

        let space = FeSpace::uniform(8, 1, sol.beta()).unwrap();
        let pts = superconvergence_points(&space).unwrap();
        assert_eq!(pts.lobatto_points().count(), 0);
        assert_eq!(pts.nodes.len(), 9);
    }

    #[test]
    fn slope_of_power_law() {
        let h = [0.5, 0.25, 0.125, 0.0625];
        let e: Vec<f64> = h.iter().map(|x| 3.0 * x * x).collect();
        assert!((regress_rate(&h, &e).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(
            regress_rate(&h, &[1.0, 0.0, -1.0, 0.5]),
            Err(IfeError::InsufficientData { usable: 2 })
        );
    }

    #[test]
    fn member_of_space_has_zero_error() {
        // I_h of a member of S_p reproduces it, so the report is all zeros
        let beta =
            crate::PiecewiseConstantCoefficient::new((0.0, 1.0), vec![PI / 6.0], vec![1.0, 5.0])
                .unwrap();
        let alpha = PI / 6.0;
        let value: crate::coefficients::SidedFn =
            Arc::new(move |x, _| if x < alpha { x } else { alpha + (x - alpha) / 5.0 });
        let flux: crate::coefficients::SidedFn = Arc::new(|_, _| 1.0);
        let zero: crate::coefficients::SidedFn = Arc::new(|_, _| 0.0);
        let exact = ManufacturedSolution::new(beta, value, flux, zero);
        let space = Arc::new(FeSpace::uniform(8, 2, exact.beta()).unwrap());
        let ih = interpolate(&exact, space.clone()).unwrap();
        let pts = superconvergence_points(&space).unwrap();
        let r = error_report(&ih, &exact, &pts).unwrap();
        for norm in Norm::ALL {
            assert!(r.get(norm) < 1e-14, "{} = {}", norm.name(), r.get(norm));
        }
    }

    #[test]
    fn subset_norms_bounded_by_linf() {
        let sol = one_interface_solution(1.0, 5.0, PI / 6.0).unwrap();
        let problem = ProblemSpec::manufactured(sol, 1.0, 1.0);
        let study = convergence_study(&problem, 2, &[8, 16, 24]).unwrap();
        for r in &study.reports {
            assert!(r.node <= r.linf && r.lobatto <= r.linf);
        }
    }
}
