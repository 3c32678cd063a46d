//! Immersed finite element (IFE) solver for one-dimensional elliptic
//! interface problems
//!
//! ```text
//! -(β u')' + γ u' + c u = f   on (a, b),   u(a), u(b) prescribed,
//! ```
//!
//! where the diffusion coefficient β is piecewise constant and jumps at
//! interface points that need not be mesh nodes. On elements cut by an
//! interface the shape functions are generalized Lobatto polynomials: exact
//! piecewise antiderivatives of `L_n / β̂`, where `L_n` are monic polynomials
//! orthogonal with respect to the discontinuous weight `1 / β̂`. These
//! satisfy the interface jump conditions by construction and keep the
//! stiffness matrix orthogonal on the interface element.
//!
//! Module map:
//!
//! - [`coefficients`]: piecewise constant β, problem data, manufactured solutions
//! - [`quadrature`]: Gauss-Legendre rules and interface-split integration
//! - [`genpoly`]: standard and generalized Legendre/Lobatto families
//! - [`mesh_space`]: meshes, reference maps, element bases, DOF layout
//! - [`banded`]: banded LU / Cholesky
//! - [`assembly_solve`]: Galerkin assembly, solve, discrete functions
//! - [`interpolation`]: the Lobatto-expansion interpolant `I_h u`
//! - [`analysis`]: superconvergence points, error norms, rate regression
//! - [`cli`]: the command-line runner

pub mod analysis;
pub mod assembly_solve;
pub mod banded;
pub mod cli;
pub mod coefficients;
pub mod error;
pub mod genpoly;
pub mod interpolation;
pub mod mesh_space;
pub mod quadrature;

pub use analysis::{
    convergence_study, error_report, regress_rate, superconvergence_points, ConvergenceStudy,
    ErrorReport, SuperconvergencePoints,
};
pub use assembly_solve::{assemble, solve, solve_problem, BandedSystem, FeFunction, IfeSolution};
pub use coefficients::{
    one_interface_solution, rhs_for, two_interface_solution, ManufacturedSolution,
    PiecewiseConstantCoefficient, ProblemSpec,
};
pub use error::{IfeError, Result};
pub use genpoly::{GeneralizedBasis, PiecewisePolynomial, Polynomial, StandardBasis};
pub use interpolation::{interpolate, orthogonality_residual};
pub use mesh_space::{build_dof_map, element_basis, DofMap, ElementBasis, FeSpace, Mesh};
pub use quadrature::{gauss_legendre_rule, integrate_split, QuadratureRule};

/// Which one-sided limit to take at a discontinuity.
///
/// The default is the left limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Side {
    #[default]
    Left,
    Right,
}
