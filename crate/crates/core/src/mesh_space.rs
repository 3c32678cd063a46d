//! Interface-independent meshes, reference maps, per-element bases and the
//! global degree-of-freedom layout.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use crate::coefficients::{PiecewiseConstantCoefficient, INTERFACE_TOLERANCE};
use crate::error::{IfeError, Result};
use crate::genpoly::{GeneralizedBasis, LobattoFamily, StandardBasis};
use crate::quadrature::cached_rule;
use crate::Side;

/// Partition `a = x_0 < x_1 < ... < x_N = b` with the interfaces it cuts.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    points: Vec<f64>,
    interfaces: BTreeMap<usize, Vec<f64>>,
    fitted: Vec<f64>,
}

impl Mesh {
    /// Mesh on the given points. Each interface is assigned to the element
    /// containing it, or recorded as fitted when it sits on a mesh point.
    pub fn new(points: Vec<f64>, interfaces: &[f64]) -> Result<Self> {
        if points.len() < 3 {
            return Err(IfeError::InvalidMesh(format!(
                "need at least 2 elements, got {}",
                points.len().saturating_sub(1)
            )));
        }
        if points.iter().any(|x| !x.is_finite()) || points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(IfeError::InvalidMesh(
                "mesh points must be finite and strictly increasing".into(),
            ));
        }
        let (a, b) = (points[0], points[points.len() - 1]);
        let tol = INTERFACE_TOLERANCE * (b - a);
        let mut assigned: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        let mut fitted = Vec::new();
        for &alpha in interfaces {
            if !(alpha > a && alpha < b) {
                return Err(IfeError::InvalidInterface(format!(
                    "interface {alpha} is not inside ({a}, {b})"
                )));
            }
            let above = points.partition_point(|&x| x < alpha);
            let nearest = [above.saturating_sub(1), above.min(points.len() - 1)]
                .into_iter()
                .map(|i| (points[i] - alpha).abs())
                .fold(f64::INFINITY, f64::min);
            if nearest <= tol {
                fitted.push(alpha);
            } else {
                assigned.entry(above - 1).or_default().push(alpha);
            }
        }
        for list in assigned.values_mut() {
            list.sort_by(f64::total_cmp);
        }
        Ok(Self {
            points,
            interfaces: assigned,
            fitted,
        })
    }

    /// `n` equal elements on `domain`.
    pub fn uniform(domain: (f64, f64), n: usize, interfaces: &[f64]) -> Result<Self> {
        if n < 2 {
            return Err(IfeError::InvalidMesh(format!("need N >= 2, got {n}")));
        }
        let (a, b) = domain;
        if !(a < b) {
            return Err(IfeError::InvalidMesh(format!("degenerate domain ({a}, {b})")));
        }
        let h = (b - a) / n as f64;
        let mut points: Vec<f64> = (0..=n).map(|i| a + i as f64 * h).collect();
        points[n] = b;
        Self::new(points, interfaces)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.points[0], self.points[self.points.len() - 1])
    }

    pub fn element_count(&self) -> usize {
        self.points.len() - 1
    }

    pub fn bounds(&self, e: usize) -> (f64, f64) {
        (self.points[e], self.points[e + 1])
    }

    pub fn size(&self, e: usize) -> f64 {
        self.points[e + 1] - self.points[e]
    }

    /// `h = max_i h_i`.
    pub fn h(&self) -> f64 {
        (0..self.element_count())
            .map(|e| self.size(e))
            .fold(0.0, f64::max)
    }

    /// Interfaces strictly inside element `e` (empty for noninterface elements).
    pub fn element_interfaces(&self, e: usize) -> &[f64] {
        self.interfaces.get(&e).map_or(&[], Vec::as_slice)
    }

    pub fn is_interface(&self, e: usize) -> bool {
        self.interfaces.contains_key(&e)
    }

    pub fn interface_elements(&self) -> impl Iterator<Item = usize> + '_ {
        self.interfaces.keys().copied()
    }

    /// Interfaces that coincide with mesh points.
    pub fn fitted_interfaces(&self) -> &[f64] {
        &self.fitted
    }

    /// Element containing `x`; on a shared vertex, `side` picks the element.
    pub fn locate(&self, x: f64, side: Side) -> Result<usize> {
        let (a, b) = self.domain();
        if !(x >= a && x <= b) {
            return Err(IfeError::Domain { value: x, lo: a, hi: b });
        }
        let n = self.element_count();
        let above = self.points.partition_point(|&p| p < x);
        let e = match (above, side) {
            (0, _) => 0,
            (i, Side::Right) if i <= n && self.points[i] == x => i,
            (i, _) => i - 1,
        };
        Ok(e.min(n - 1))
    }

    /// `ξ = (2x - x_{e} - x_{e+1}) / h_e`.
    pub fn to_reference(&self, e: usize, x: f64) -> Result<f64> {
        let (lo, hi) = self.bounds(e);
        let slack = INTERFACE_TOLERANCE * (hi - lo);
        if !(x >= lo - slack && x <= hi + slack) {
            return Err(IfeError::Domain { value: x, lo, hi });
        }
        Ok(((2.0 * x - lo - hi) / (hi - lo)).clamp(-1.0, 1.0))
    }

    pub fn from_reference(&self, e: usize, xi: f64) -> f64 {
        let (lo, hi) = self.bounds(e);
        0.5 * (lo + hi) + 0.5 * (hi - lo) * xi
    }
}

/// Whether an element uses the standard or the generalized family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    Standard,
    Generalized,
}

/// Shape functions of one element.
#[derive(Debug, Clone)]
pub enum ElementBasis {
    Standard(Arc<StandardBasis>),
    Generalized(Arc<GeneralizedBasis>),
}

impl ElementBasis {
    pub fn kind(&self) -> BasisKind {
        match self {
            Self::Standard(_) => BasisKind::Standard,
            Self::Generalized(_) => BasisKind::Generalized,
        }
    }

    pub fn family(&self) -> &dyn LobattoFamily {
        match self {
            Self::Standard(b) => b.as_ref(),
            Self::Generalized(b) => b.as_ref(),
        }
    }

    pub fn generalized(&self) -> Option<&GeneralizedBasis> {
        match self {
            Self::Generalized(b) => Some(b),
            Self::Standard(_) => None,
        }
    }
}

/// `β` on element `e`, pulled back to `[-1, 1]`.
pub fn reference_weight(
    mesh: &Mesh,
    e: usize,
    beta: &PiecewiseConstantCoefficient,
) -> Result<PiecewiseConstantCoefficient> {
    let (lo, hi) = mesh.bounds(e);
    let breaks = mesh.element_interfaces(e).to_vec();
    let mut values = Vec::with_capacity(breaks.len() + 1);
    let mut left = lo;
    for &right in breaks.iter().chain(std::iter::once(&hi)) {
        values.push(beta.value(0.5 * (left + right)));
        left = right;
    }
    PiecewiseConstantCoefficient::new((lo, hi), breaks, values)?.map_affine(-1.0, 1.0)
}

/// Standard Lobatto family on noninterface elements, generalized family
/// built for the mapped coefficient on interface elements.
pub fn element_basis(
    mesh: &Mesh,
    e: usize,
    p: usize,
    beta: &PiecewiseConstantCoefficient,
) -> Result<ElementBasis> {
    if !mesh.is_interface(e) {
        return Ok(ElementBasis::Standard(Arc::new(StandardBasis::new(p)?)));
    }
    let weight = reference_weight(mesh, e, beta)?;
    Ok(ElementBasis::Generalized(Arc::new(GeneralizedBasis::build(
        weight, p,
    )?)))
}

type WeightKey = (Vec<u64>, Vec<u64>);

/// Reuses element bases across elements with identical mapped coefficients.
#[derive(Debug)]
pub struct BasisCache {
    degree: usize,
    standard: Arc<StandardBasis>,
    generalized: RwLock<HashMap<WeightKey, Arc<GeneralizedBasis>>>,
}

impl BasisCache {
    pub fn new(p: usize) -> Result<Self> {
        Ok(Self {
            degree: p,
            standard: Arc::new(StandardBasis::new(p)?),
            generalized: RwLock::new(HashMap::new()),
        })
    }

    pub fn get(
        &self,
        mesh: &Mesh,
        e: usize,
        beta: &PiecewiseConstantCoefficient,
    ) -> Result<ElementBasis> {
        if !mesh.is_interface(e) {
            return Ok(ElementBasis::Standard(self.standard.clone()));
        }
        let weight = reference_weight(mesh, e, beta)?;
        let key = (
            weight.breakpoints().iter().map(|x| x.to_bits()).collect(),
            weight.values().iter().map(|x| x.to_bits()).collect(),
        );
        if let Some(found) = self.generalized.read().expect("cache lock").get(&key) {
            return Ok(ElementBasis::Generalized(found.clone()));
        }
        let built = Arc::new(GeneralizedBasis::build(weight, self.degree)?);
        let mut map = self.generalized.write().expect("cache lock");
        let entry = map.entry(key).or_insert(built);
        Ok(ElementBasis::Generalized(entry.clone()))
    }
}

/// Global numbering of the `S_p` degrees of freedom.
///
/// Vertices and element-internal modes are interleaved:
/// `v_0, [modes of τ_0], v_1, [modes of τ_1], ..., v_N`, so vertex `i` has
/// index `i p` and the couplings of one element stay within a band of `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofMap {
    degree: usize,
    element_dofs: Vec<Vec<usize>>,
    total: usize,
}

impl DofMap {
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Global indices of the local modes `[φ_0, φ_1, φ_2, ..., φ_p]`.
    pub fn element_dofs(&self, e: usize) -> &[usize] {
        &self.element_dofs[e]
    }

    pub fn element_count(&self) -> usize {
        self.element_dofs.len()
    }

    /// `(N + 1) + N (p - 1)`.
    pub fn total_dofs(&self) -> usize {
        self.total
    }

    /// Degrees of freedom left after eliminating the two boundary vertices.
    pub fn free_dofs(&self) -> usize {
        self.total - 2
    }

    pub fn boundary(&self) -> [usize; 2] {
        [0, self.total - 1]
    }

    pub fn vertex_dof(&self, i: usize) -> usize {
        i * self.degree
    }

    /// Row of a global dof in the reduced system, `None` on the boundary.
    pub fn free_index(&self, global: usize) -> Option<usize> {
        if global == 0 || global + 1 >= self.total {
            None
        } else {
            Some(global - 1)
        }
    }
}

pub fn build_dof_map(mesh: &Mesh, p: usize) -> Result<DofMap> {
    if p == 0 {
        return Err(IfeError::InvalidArgument("degree p must be at least 1".into()));
    }
    let n = mesh.element_count();
    let element_dofs = (0..n)
        .map(|e| {
            let mut dofs = vec![e * p, (e + 1) * p];
            dofs.extend((2..=p).map(|m| e * p + m - 1));
            dofs
        })
        .collect();
    Ok(DofMap {
        degree: p,
        element_dofs,
        total: n * p + 1,
    })
}

/// One quadrature point of an element rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadPoint {
    /// Coefficient piece of the element.
    pub piece: usize,
    pub xi: f64,
    pub x: f64,
    /// Weight including the Jacobian `h / 2`.
    pub weight: f64,
    /// `β` on this piece.
    pub beta: f64,
}

/// The discrete space `S_p(T_h)`: mesh, coefficient, element bases and
/// dof layout.
#[derive(Debug, Clone)]
pub struct FeSpace {
    mesh: Mesh,
    degree: usize,
    beta: PiecewiseConstantCoefficient,
    dofs: DofMap,
    bases: Vec<ElementBasis>,
    weights: Vec<PiecewiseConstantCoefficient>,
}

impl FeSpace {
    pub fn new(mesh: Mesh, p: usize, beta: PiecewiseConstantCoefficient) -> Result<Self> {
        let (a, b) = mesh.domain();
        let (lo, hi) = beta.interval();
        let tol = INTERFACE_TOLERANCE * (b - a);
        if (a - lo).abs() > tol || (b - hi).abs() > tol {
            return Err(IfeError::InvalidMesh(format!(
                "mesh domain ({a}, {b}) differs from coefficient interval ({lo}, {hi})"
            )));
        }
        let cache = BasisCache::new(p)?;
        let n = mesh.element_count();
        let mut bases = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for e in 0..n {
            bases.push(cache.get(&mesh, e, &beta)?);
            weights.push(reference_weight(&mesh, e, &beta)?);
        }
        let dofs = build_dof_map(&mesh, p)?;
        Ok(Self {
            mesh,
            degree: p,
            beta,
            dofs,
            bases,
            weights,
        })
    }

    /// Uniform mesh of `n` elements on `beta`'s interval.
    pub fn uniform(n: usize, p: usize, beta: &PiecewiseConstantCoefficient) -> Result<Self> {
        let mesh = Mesh::uniform(beta.interval(), n, beta.breakpoints())?;
        Self::new(mesh, p, beta.clone())
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn beta(&self) -> &PiecewiseConstantCoefficient {
        &self.beta
    }

    pub fn dofs(&self) -> &DofMap {
        &self.dofs
    }

    pub fn basis(&self, e: usize) -> &ElementBasis {
        &self.bases[e]
    }

    /// `β̂` of element `e` on `[-1, 1]`.
    pub fn weight(&self, e: usize) -> &PiecewiseConstantCoefficient {
        &self.weights[e]
    }

    /// Gauss points of element `e`, `n` per coefficient piece.
    pub fn quadrature(&self, e: usize, n: usize) -> Result<Vec<QuadPoint>> {
        let rule = cached_rule(n)?;
        let weight = &self.weights[e];
        let jac = 0.5 * self.mesh.size(e);
        let mut points = Vec::with_capacity(n * weight.piece_count());
        for piece in 0..weight.piece_count() {
            let (lo, hi) = weight.piece_bounds(piece);
            let beta = weight.values()[piece];
            for (xi, w) in rule.mapped(lo, hi) {
                points.push(QuadPoint {
                    piece,
                    xi,
                    x: self.mesh.from_reference(e, xi),
                    weight: w * jac,
                    beta,
                });
            }
        }
        Ok(points)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn uniform_mesh_and_classification() {
        let mesh = Mesh::uniform((0.0, 1.0), 8, &[PI / 6.0]).unwrap();
        assert_eq!(mesh.element_count(), 8);
        assert!((mesh.h() - 0.125).abs() < 1e-15);
        assert_eq!(mesh.points()[3], 0.375);
        // τ_5 = (0.5, 0.625) in one-based numbering
        assert_eq!(mesh.interface_elements().collect::<Vec<_>>(), vec![4]);
        assert_eq!(mesh.bounds(4), (0.5, 0.625));

        let two = Mesh::uniform((0.0, 1.0), 8, &[PI / 6.0, PI / 6.0 + 0.06]).unwrap();
        assert_eq!(two.interface_elements().collect::<Vec<_>>(), vec![4]);
        assert_eq!(two.element_interfaces(4).len(), 2);

        assert!(matches!(
            Mesh::uniform((0.0, 1.0), 1, &[]),
            Err(IfeError::InvalidMesh(_))
        ));
    }

    #[test]
    fn fitted_interface_uses_standard_bases() {
        let beta = PiecewiseConstantCoefficient::new((0.0, 1.0), vec![0.5], vec![1.0, 5.0]).unwrap();
        let space = FeSpace::uniform(8, 2, &beta).unwrap();
        assert_eq!(space.mesh().fitted_interfaces(), &[0.5]);
        for e in 0..8 {
            assert_eq!(space.basis(e).kind(), BasisKind::Standard);
        }
        assert_eq!(space.weight(3).values(), &[1.0]);
        assert_eq!(space.weight(4).values(), &[5.0]);
    }

    #[test]
    fn reference_maps() {
        let mesh = Mesh::uniform((0.0, 1.0), 8, &[]).unwrap();
        assert_eq!(mesh.to_reference(4, 0.5625).unwrap(), 0.0);
        assert_eq!(mesh.from_reference(4, -1.0), 0.5);
        let alpha = PI / 6.0;
        let xi = mesh.to_reference(4, alpha).unwrap();
        assert!((xi - (2.0 * alpha - 1.125) / 0.125).abs() < 1e-14);
        assert!((mesh.from_reference(4, xi) - alpha).abs() < 1e-15);
        assert!(matches!(mesh.to_reference(4, 0.9), Err(IfeError::Domain { .. })));
    }

    #[test]
    fn interface_element_basis() {
        let alpha = PI / 6.0;
        let beta = PiecewiseConstantCoefficient::new((0.0, 1.0), vec![alpha], vec![1.0, 5.0]).unwrap();
        let mesh = Mesh::uniform((0.0, 1.0), 8, &[alpha]).unwrap();
        assert_eq!(element_basis(&mesh, 0, 2, &beta).unwrap().kind(), BasisKind::Standard);
        let basis = element_basis(&mesh, 4, 2, &beta).unwrap();
        let g = basis.generalized().unwrap();
        let expected = mesh.to_reference(4, alpha).unwrap();
        assert!((g.weight().breakpoints()[0] - expected).abs() < 1e-14);
        assert_eq!(g.weight().values(), &[1.0, 5.0]);
    }

    #[test]
    fn dof_counts_and_layout() {
        let mesh = Mesh::uniform((0.0, 1.0), 8, &[]).unwrap();
        for (p, free) in [(1, 7), (2, 15), (3, 23)] {
            let dofs = build_dof_map(&mesh, p).unwrap();
            assert_eq!(dofs.free_dofs(), free);
            assert_eq!(dofs.total_dofs(), 9 + 8 * (p - 1));
        }
        let dofs = build_dof_map(&mesh, 3).unwrap();
        assert_eq!(dofs.element_dofs(1), &[3, 6, 4, 5]);
        assert_eq!(dofs.element_dofs(0)[1], dofs.element_dofs(1)[0]);
        assert_eq!(dofs.free_index(0), None);
        assert_eq!(dofs.free_index(24), None);
        assert_eq!(dofs.free_index(5), Some(4));
    }

    #[test]
    fn locate_vertices() {
        let mesh = Mesh::uniform((0.0, 1.0), 4, &[]).unwrap();
        assert_eq!(mesh.locate(0.0, Side::Left).unwrap(), 0);
        assert_eq!(mesh.locate(0.25, Side::Left).unwrap(), 0);
        assert_eq!(mesh.locate(0.25, Side::Right).unwrap(), 1);
        assert_eq!(mesh.locate(1.0, Side::Right).unwrap(), 3);
        assert!(mesh.locate(1.5, Side::Left).is_err());
    }
}
