//! Galerkin assembly of `a(u_h, v_h) = (f, v_h)`, the banded direct solve,
//! and evaluation of discrete functions.

use std::sync::Arc;

use crate::banded::BandedMatrix;
use crate::coefficients::ProblemSpec;
use crate::error::{IfeError, Result};
use crate::mesh_space::{ElementBasis, FeSpace};
use crate::Side;

/// Local shape function `n` of a basis on piece `j`: value and reference
/// derivative at `ξ`.
fn shape(basis: &ElementBasis, n: usize, piece: usize, xi: f64) -> (f64, f64) {
    let phi = basis.family().lobatto(n);
    (phi.eval_in_piece(piece, xi), phi.derivative_in_piece(piece, xi, 1))
}

/// Element matrix and load in local order `[φ_0, φ_1, φ_2, ..., φ_p]`.
///
/// Entry `(m, n)` is `∫ β φ_n' φ_m' + γ φ_n' φ_m + c φ_n φ_m` over the
/// element, test function `m` and trial function `n`.
pub fn local_matrices(
    space: &FeSpace,
    e: usize,
    problem: &ProblemSpec,
) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let p = space.degree();
    let basis = space.basis(e);
    let dxi = 2.0 / space.mesh().size(e);
    let mut mat = vec![vec![0.0; p + 1]; p + 1];
    let mut load = vec![0.0; p + 1];
    let mut vals = vec![0.0; p + 1];
    let mut ders = vec![0.0; p + 1];

    for q in space.quadrature(e, p + 2)? {
        for n in 0..=p {
            let (v, d) = shape(basis, n, q.piece, q.xi);
            vals[n] = v;
            ders[n] = d * dxi;
        }
        for m in 0..=p {
            for n in 0..=p {
                mat[m][n] += q.weight
                    * (q.beta * ders[n] * ders[m]
                        + problem.gamma * ders[n] * vals[m]
                        + problem.c * vals[n] * vals[m]);
            }
        }
    }
    for q in space.quadrature(e, p + 6)? {
        let f = (problem.rhs)(q.x);
        for (m, l) in load.iter_mut().enumerate() {
            *l += q.weight * f * shape(basis, m, q.piece, q.xi).0;
        }
    }
    Ok((mat, load))
}

/// Reduced system for the free degrees of freedom.
#[derive(Debug, Clone)]
pub struct BandedSystem {
    matrix: BandedMatrix,
    rhs: Vec<f64>,
    boundary_values: (f64, f64),
}

impl BandedSystem {
    pub fn dimension(&self) -> usize {
        self.matrix.dimension()
    }

    /// Half-bandwidth: `A_ij = 0` whenever `|i - j|` exceeds it.
    pub fn bandwidth(&self) -> usize {
        self.matrix.lower_bandwidth()
    }

    pub fn matrix(&self) -> &BandedMatrix {
        &self.matrix
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn boundary_values(&self) -> (f64, f64) {
        self.boundary_values
    }
}

/// Scatters element contributions and eliminates the Dirichlet dofs.
pub fn assemble(space: &FeSpace, problem: &ProblemSpec) -> Result<BandedSystem> {
    let dofs = space.dofs();
    let p = space.degree();
    let m = dofs.free_dofs();
    let (ga, gb) = problem.boundary_values();
    let [first, last] = dofs.boundary();
    let boundary_value = |g: usize| if g == first { ga } else if g == last { gb } else { 0.0 };

    let mut matrix = BandedMatrix::zeros(m, p, p);
    let mut rhs = vec![0.0; m];
    for e in 0..space.mesh().element_count() {
        let (mat, load) = local_matrices(space, e, problem)?;
        let global = dofs.element_dofs(e);
        for (a, &row) in global.iter().enumerate() {
            let Some(i) = dofs.free_index(row) else { continue };
            rhs[i] += load[a];
            for (b, &col) in global.iter().enumerate() {
                match dofs.free_index(col) {
                    Some(j) => matrix.add(i, j, mat[a][b]),
                    None => rhs[i] -= mat[a][b] * boundary_value(col),
                }
            }
        }
    }
    Ok(BandedSystem {
        matrix,
        rhs,
        boundary_values: (ga, gb),
    })
}

/// Free-dof coefficients `x` with `A x = b`.
pub fn solve(system: &BandedSystem) -> Result<Vec<f64>> {
    system.matrix.solve(&system.rhs)
}

/// Assembles and solves on a uniform mesh of `n` elements.
pub fn solve_problem(problem: &ProblemSpec, n: usize, p: usize) -> Result<IfeSolution> {
    let space = Arc::new(FeSpace::uniform(n, p, &problem.beta)?);
    solve_on(space, problem)
}

/// Assembles and solves on a prepared space.
pub fn solve_on(space: Arc<FeSpace>, problem: &ProblemSpec) -> Result<IfeSolution> {
    let system = assemble(&space, problem)?;
    let free = solve(&system)?;
    FeFunction::from_free(space, &free, system.boundary_values)
}

/// A member of `S_p(T_h)` given by its global coefficient vector.
#[derive(Debug, Clone)]
pub struct FeFunction {
    space: Arc<FeSpace>,
    coefficients: Vec<f64>,
}

/// The discrete solution `u_h`.
pub type IfeSolution = FeFunction;

impl FeFunction {
    pub fn new(space: Arc<FeSpace>, coefficients: Vec<f64>) -> Result<Self> {
        let expected = space.dofs().total_dofs();
        if coefficients.len() != expected {
            return Err(IfeError::InvalidArgument(format!(
                "expected {expected} coefficients, got {}",
                coefficients.len()
            )));
        }
        Ok(Self {
            space,
            coefficients,
        })
    }

    /// Inserts boundary values around a free-dof vector.
    pub fn from_free(space: Arc<FeSpace>, free: &[f64], boundary: (f64, f64)) -> Result<Self> {
        let mut coefficients = Vec::with_capacity(free.len() + 2);
        coefficients.push(boundary.0);
        coefficients.extend_from_slice(free);
        coefficients.push(boundary.1);
        Self::new(space, coefficients)
    }

    pub fn space(&self) -> &Arc<FeSpace> {
        &self.space
    }

    /// Global coefficients, boundary vertices included.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Coefficients of element `e` in local order.
    pub fn element_coefficients(&self, e: usize) -> Vec<f64> {
        self.space
            .dofs()
            .element_dofs(e)
            .iter()
            .map(|&g| self.coefficients[g])
            .collect()
    }

    /// `u_h` on element `e` at `ξ` in coefficient piece `piece`.
    pub fn value_in_piece(&self, e: usize, piece: usize, xi: f64) -> f64 {
        let basis = self.space.basis(e).family();
        self.space
            .dofs()
            .element_dofs(e)
            .iter()
            .enumerate()
            .map(|(n, &g)| self.coefficients[g] * basis.lobatto(n).eval_in_piece(piece, xi))
            .sum()
    }

    /// `u_h'` (physical derivative) on element `e` in coefficient piece
    /// `piece`.
    pub fn derivative_in_piece(&self, e: usize, piece: usize, xi: f64) -> f64 {
        let basis = self.space.basis(e).family();
        let dxi = 2.0 / self.space.mesh().size(e);
        dxi * self
            .space
            .dofs()
            .element_dofs(e)
            .iter()
            .enumerate()
            .map(|(n, &g)| {
                self.coefficients[g] * basis.lobatto(n).derivative_in_piece(piece, xi, 1)
            })
            .sum::<f64>()
    }

    /// `β u_h'` on element `e` in coefficient piece `piece`.
    pub fn flux_in_piece(&self, e: usize, piece: usize, xi: f64) -> f64 {
        self.space.weight(e).values()[piece] * self.derivative_in_piece(e, piece, xi)
    }

    fn locate(&self, x: f64, side: Side) -> Result<(usize, usize, f64)> {
        let mesh = self.space.mesh();
        let e = mesh.locate(x, side)?;
        let xi = mesh.to_reference(e, x)?;
        let piece = self.space.weight(e).piece_index_side(xi, side);
        Ok((e, piece, xi))
    }

    /// `u_h(x)`; on a vertex or interface `side` selects the one-sided limit.
    pub fn evaluate(&self, x: f64, side: Side) -> Result<f64> {
        let (e, piece, xi) = self.locate(x, side)?;
        Ok(self.value_in_piece(e, piece, xi))
    }

    pub fn evaluate_derivative(&self, x: f64, side: Side) -> Result<f64> {
        let (e, piece, xi) = self.locate(x, side)?;
        Ok(self.derivative_in_piece(e, piece, xi))
    }

    /// `β(x) u_h'(x)`.
    pub fn evaluate_flux(&self, x: f64, side: Side) -> Result<f64> {
        let (e, piece, xi) = self.locate(x, side)?;
        Ok(self.flux_in_piece(e, piece, xi))
    }
}
