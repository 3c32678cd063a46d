//! The interpolant `I_h u`: nodal values at the vertices and flux-weighted
//! Lobatto expansion coefficients for the internal modes.

use std::sync::Arc;

use crate::assembly_solve::FeFunction;
use crate::coefficients::ManufacturedSolution;
use crate::error::Result;
use crate::mesh_space::FeSpace;
use crate::Side;

/// `I_h u` on `space`.
///
/// Vertex coefficients are `u(x_i)`. Internal coefficient `n` of element
/// `τ` is `∫_τ β u' φ_n' dx / ∫_τ β φ_n'^2 dx`, integrated piecewise with
/// `p + 6` points and the exact flux.
pub fn interpolate(exact: &ManufacturedSolution, space: Arc<FeSpace>) -> Result<FeFunction> {
    let p = space.degree();
    let dofs = space.dofs();
    let mut coefficients = vec![0.0; dofs.total_dofs()];
    for (i, &x) in space.mesh().points().iter().enumerate() {
        coefficients[dofs.vertex_dof(i)] = exact.value(x);
    }
    for e in 0..space.mesh().element_count() {
        let basis = space.basis(e).family();
        let dxi = 2.0 / space.mesh().size(e);
        let global = dofs.element_dofs(e);
        let mut num = vec![0.0; p + 1];
        let mut den = vec![0.0; p + 1];
        for q in space.quadrature(e, p + 6)? {
            let flux = exact.flux_side(q.x, Side::Left);
            for n in 2..=p {
                let d = dxi * basis.lobatto(n).derivative_in_piece(q.piece, q.xi, 1);
                num[n] += q.weight * flux * d;
                den[n] += q.weight * q.beta * d * d;
            }
        }
        for n in 2..=p {
            coefficients[global[n]] = num[n] / den[n];
        }
    }
    FeFunction::new(space, coefficients)
}

/// Largest normalized `|∫_τ β (u - I_h u)' v'|` over elements `τ` and local
/// shape functions `v`, each term divided by `sqrt(E_τ(u) E_τ(v))` with
/// `E_τ(g) = ∫_τ β g'^2`.
pub fn orthogonality_residual(exact: &ManufacturedSolution, interpolant: &FeFunction) -> Result<f64> {
    let space = interpolant.space();
    let p = space.degree();
    let mut worst = 0.0_f64;
    for e in 0..space.mesh().element_count() {
        let basis = space.basis(e).family();
        let dxi = 2.0 / space.mesh().size(e);
        let mut inner = vec![0.0; p + 1];
        let mut energy_v = vec![0.0; p + 1];
        let mut energy_u = 0.0;
        for q in space.quadrature(e, p + 6)? {
            let flux = exact.flux_side(q.x, Side::Left);
            let err = flux - interpolant.flux_in_piece(e, q.piece, q.xi);
            energy_u += q.weight * flux * flux / q.beta;
            for n in 0..=p {
                let d = dxi * basis.lobatto(n).derivative_in_piece(q.piece, q.xi, 1);
                inner[n] += q.weight * err * d;
                energy_v[n] += q.weight * q.beta * d * d;
            }
        }
        for n in 0..=p {
            let scale = (energy_u * energy_v[n]).sqrt();
            if scale > 0.0 {
                worst = worst.max(inner[n].abs() / scale);
            }
        }
    }
    Ok(worst)
}
