//! Circle domains, boundary grids and contour quadrature.
//!
//! A domain is bounded by m ≥ 2 circles: one outer circle and m−1 hole
//! circles whose closed discs are pairwise disjoint and lie strictly inside
//! the outer disc. The boundary is always traversed with positive
//! orientation: the outer circle counterclockwise, every hole clockwise.
//! Circles are indexed with the holes first and the outer circle last.
//!
//! Quadrature is the trapezoid rule on equispaced nodes, which is
//! spectrally accurate for smooth periodic integrands. All reductions use a
//! fixed-order pairwise scheme so results are reproducible bit for bit.

use std::f64::consts::TAU;
use std::hash::{Hash, Hasher};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A circle in the plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Circle {
    pub center: Complex64,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Complex64, radius: f64) -> Self {
        Self { center, radius }
    }

    /// Point at angle `theta`.
    pub fn point(&self, theta: f64) -> Complex64 {
        self.center + self.radius * Complex64::new(theta.cos(), theta.sin())
    }

    /// Is `z` strictly inside the open disc?
    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center).norm() < self.radius
    }

    /// Unsigned distance from `z` to the circle line.
    pub fn distance(&self, z: Complex64) -> f64 {
        ((z - self.center).norm() - self.radius).abs()
    }

    /// Concentric copy with the radius scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(self.center, self.radius * factor)
    }
}

/// A bounded domain whose boundary consists of one outer circle and at
/// least one hole circle.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleDomain {
    holes: Vec<Circle>,
    outer: Circle,
}

impl CircleDomain {
    /// Validates and builds a domain from an explicit outer circle and holes.
    pub fn new(outer: Circle, holes: Vec<Circle>) -> Result<Self> {
        if holes.is_empty() {
            return Err(Error::TooFewBoundaryComponents(1 + holes.len()));
        }
        if outer.radius <= 0.0 {
            return Err(Error::NonPositiveRadius(holes.len(), outer.radius));
        }
        for (k, h) in holes.iter().enumerate() {
            if h.radius <= 0.0 {
                return Err(Error::NonPositiveRadius(k, h.radius));
            }
            if (h.center - outer.center).norm() + h.radius >= outer.radius {
                return Err(Error::HoleOutsideOuter(k));
            }
        }
        for i in 0..holes.len() {
            for j in i + 1..holes.len() {
                let gap = (holes[i].center - holes[j].center).norm();
                if gap <= holes[i].radius + holes[j].radius {
                    return Err(Error::OverlappingCircles(i, j));
                }
            }
        }
        Ok(Self { holes, outer })
    }

    /// Builds a domain from an unordered list of circles. The circle of
    /// largest radius is taken as the outer candidate; everything else must
    /// be a hole strictly inside it.
    pub fn from_circles(circles: &[Circle]) -> Result<Self> {
        if circles.len() < 2 {
            return Err(Error::TooFewBoundaryComponents(circles.len()));
        }
        let outer_idx = circles
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.radius.total_cmp(&b.1.radius))
            .map(|(i, _)| i)
            .expect("non-empty");
        let outer = circles[outer_idx];
        let holes: Vec<Circle> = circles
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != outer_idx)
            .map(|(_, c)| *c)
            .collect();
        Self::new(outer, holes)
    }

    /// The concentric annulus r < |z| < 1.
    pub fn annulus(r: f64) -> Self {
        assert!(r > 0.0 && r < 1.0, "annulus modulus must be in (0, 1)");
        Self::new(
            Circle::new(Complex64::new(0.0, 0.0), 1.0),
            vec![Circle::new(Complex64::new(0.0, 0.0), r)],
        )
        .expect("concentric annulus is always valid")
    }

    pub fn outer(&self) -> &Circle {
        &self.outer
    }

    pub fn holes(&self) -> &[Circle] {
        &self.holes
    }

    /// Number of boundary circles m.
    pub fn circle_count(&self) -> usize {
        self.holes.len() + 1
    }

    pub fn hole_count(&self) -> usize {
        self.holes.len()
    }

    /// Circle by index: holes first, outer circle last.
    pub fn circle(&self, k: usize) -> &Circle {
        if k < self.holes.len() {
            &self.holes[k]
        } else if k == self.holes.len() {
            &self.outer
        } else {
            panic!("circle index {k} out of range");
        }
    }

    pub fn outer_index(&self) -> usize {
        self.holes.len()
    }

    /// Is `z` in the open domain?
    pub fn contains(&self, z: Complex64) -> bool {
        self.outer.contains(z) && !self.holes.iter().any(|h| (z - h.center).norm() <= h.radius)
    }

    /// Distance from `z` to the boundary set.
    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        let mut d = self.outer.distance(z);
        for h in &self.holes {
            d = d.min(h.distance(z));
        }
        d
    }

    /// Is `z` interior with at least `clearance` distance to the boundary?
    pub fn contains_with_clearance(&self, z: Complex64, clearance: f64) -> bool {
        self.contains(z) && self.boundary_distance(z) > clearance
    }
}

/// Orientation sign of circle `k` of `m` under positive boundary
/// orientation: +1 for the outer circle, −1 for holes.
pub fn orientation_sign(k: usize, circle_count: usize) -> f64 {
    if k + 1 == circle_count {
        1.0
    } else {
        -1.0
    }
}

/// Equispaced quadrature nodes on every boundary circle, with unit
/// tangents pointing in the traversal direction of the positively oriented
/// boundary and arclength weights 2πr/N.
#[derive(Clone, Debug)]
pub struct BoundaryGrid {
    domain: CircleDomain,
    nodes_per_circle: usize,
    nodes: Vec<Complex64>,
    tangents: Vec<Complex64>,
    weights: Vec<f64>,
    thetas: Vec<f64>,
    fingerprint: u64,
}

impl BoundaryGrid {
    pub fn new(domain: &CircleDomain, n: usize) -> Result<Self> {
        if n < 16 {
            return Err(Error::NTooSmall(n));
        }
        if !n.is_multiple_of(2) {
            return Err(Error::OddNodeCount(n));
        }
        let m = domain.circle_count();
        let mut nodes = Vec::with_capacity(m * n);
        let mut tangents = Vec::with_capacity(m * n);
        let mut weights = Vec::with_capacity(m * n);
        let mut thetas = Vec::with_capacity(m * n);
        for k in 0..m {
            let c = domain.circle(k);
            let sigma = orientation_sign(k, m);
            let w = TAU * c.radius / n as f64;
            for i in 0..n {
                let theta = TAU * i as f64 / n as f64;
                let dir = Complex64::new(theta.cos(), theta.sin());
                nodes.push(c.center + c.radius * dir);
                // CCW tangent is i·e^{iθ}; holes are traversed clockwise.
                tangents.push(Complex64::new(0.0, sigma) * dir);
                weights.push(w);
                thetas.push(theta);
            }
        }
        let fingerprint = grid_fingerprint(domain, n);
        Ok(Self {
            domain: domain.clone(),
            nodes_per_circle: n,
            nodes,
            tangents,
            weights,
            thetas,
            fingerprint,
        })
    }

    pub fn domain(&self) -> &CircleDomain {
        &self.domain
    }

    pub fn nodes_per_circle(&self) -> usize {
        self.nodes_per_circle
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn tangents(&self) -> &[Complex64] {
        &self.tangents
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    /// Node index range of circle `k`.
    pub fn circle_range(&self, k: usize) -> std::ops::Range<usize> {
        let n = self.nodes_per_circle;
        k * n..(k + 1) * n
    }

    /// Circle index owning node `i`.
    pub fn circle_of(&self, i: usize) -> usize {
        i / self.nodes_per_circle
    }

    pub fn orientation(&self, k: usize) -> f64 {
        orientation_sign(k, self.domain.circle_count())
    }

    /// Outward unit normal of the domain at node `i` (the traversal tangent
    /// rotated by −90°).
    pub fn outward_normal(&self, i: usize) -> Complex64 {
        -Complex64::i() * self.tangents[i]
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }
}

fn grid_fingerprint(domain: &CircleDomain, n: usize) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    n.hash(&mut h);
    for k in 0..domain.circle_count() {
        let c = domain.circle(k);
        c.center.re.to_bits().hash(&mut h);
        c.center.im.to_bits().hash(&mut h);
        c.radius.to_bits().hash(&mut h);
    }
    h.finish()
}

/// Complex function values on all grid nodes.
#[derive(Clone, Debug)]
pub struct BoundarySamples {
    values: Vec<Complex64>,
    fingerprint: u64,
}

impl BoundarySamples {
    pub fn from_fn(grid: &BoundaryGrid, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            values: grid.nodes().iter().map(|&z| f(z)).collect(),
            fingerprint: grid.fingerprint(),
        }
    }

    pub fn from_values(grid: &BoundaryGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            values,
            fingerprint: grid.fingerprint(),
        })
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn matches(&self, grid: &BoundaryGrid) -> bool {
        self.fingerprint == grid.fingerprint() && self.values.len() == grid.node_count()
    }

    pub(crate) fn check(&self, grid: &BoundaryGrid) -> Result<()> {
        if self.matches(grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Real parts, discarding any imaginary content.
    pub fn real_part(&self) -> RealBoundarySamples {
        RealBoundarySamples {
            values: self.values.iter().map(|v| v.re).collect(),
            fingerprint: self.fingerprint,
        }
    }

    /// Conversion that insists the samples are real to within 1e-12.
    pub fn try_into_real(&self) -> Result<RealBoundarySamples> {
        let worst = self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
        if worst > 1e-12 {
            return Err(Error::NonRealSamples(worst));
        }
        Ok(self.real_part())
    }
}

/// Real function values on all grid nodes.
#[derive(Clone, Debug)]
pub struct RealBoundarySamples {
    values: Vec<f64>,
    fingerprint: u64,
}

impl RealBoundarySamples {
    pub fn from_fn(grid: &BoundaryGrid, f: impl Fn(Complex64) -> f64) -> Self {
        Self {
            values: grid.nodes().iter().map(|&z| f(z)).collect(),
            fingerprint: grid.fingerprint(),
        }
    }

    pub fn from_values(grid: &BoundaryGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            values,
            fingerprint: grid.fingerprint(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn matches(&self, grid: &BoundaryGrid) -> bool {
        self.fingerprint == grid.fingerprint() && self.values.len() == grid.node_count()
    }

    pub(crate) fn check(&self, grid: &BoundaryGrid) -> Result<()> {
        if self.matches(grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

/// Fixed-order pairwise sum; deterministic regardless of call site.
pub fn pairwise_sum(terms: &[Complex64]) -> Complex64 {
    if terms.len() <= 16 {
        let mut acc = Complex64::new(0.0, 0.0);
        for t in terms {
            acc += t;
        }
        acc
    } else {
        let mid = terms.len() / 2;
        pairwise_sum(&terms[..mid]) + pairwise_sum(&terms[mid..])
    }
}

/// Fixed-order pairwise sum for real terms.
pub fn pairwise_sum_real(terms: &[f64]) -> f64 {
    if terms.len() <= 16 {
        terms.iter().sum()
    } else {
        let mid = terms.len() / 2;
        pairwise_sum_real(&terms[..mid]) + pairwise_sum_real(&terms[mid..])
    }
}

/// ∫_{bD} f(ζ) dζ over the whole positively oriented boundary.
pub fn contour_integral(grid: &BoundaryGrid, samples: &BoundarySamples) -> Result<Complex64> {
    samples.check(grid)?;
    let terms: Vec<Complex64> = samples
        .values()
        .iter()
        .zip(grid.tangents())
        .zip(grid.weights())
        .map(|((&f, &t), &w)| f * t * w)
        .collect();
    Ok(pairwise_sum(&terms))
}

/// ∮ f(ζ) dζ over circle `k` alone, in its positive-boundary traversal
/// direction (CCW for the outer circle, CW for holes).
pub fn contour_integral_circle(
    grid: &BoundaryGrid,
    samples: &BoundarySamples,
    k: usize,
) -> Result<Complex64> {
    samples.check(grid)?;
    let range = grid.circle_range(k);
    let terms: Vec<Complex64> = range
        .map(|i| samples.values()[i] * grid.tangents()[i] * grid.weights()[i])
        .collect();
    Ok(pairwise_sum(&terms))
}

/// Weighted arclength sum ∫_{bD} f ds for real samples.
pub fn arclength_integral(grid: &BoundaryGrid, samples: &RealBoundarySamples) -> Result<f64> {
    samples.check(grid)?;
    let terms: Vec<f64> = samples
        .values()
        .iter()
        .zip(grid.weights())
        .map(|(&f, &w)| f * w)
        .collect();
    Ok(pairwise_sum_real(&terms))
}
