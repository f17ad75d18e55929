//! Finite-dimensional 2-normed spaces.
//!
//! A 2-norm `‖x, y‖` measures the area spanned by two vectors. Two concrete
//! evaluators are provided: the planar cross product `|u1 v2 - u2 v1|` and the
//! Gram (parallelogram area) norm in any dimension `n >= 2`. Convergence in a
//! 2-normed space is quantified over every second argument; computationally we
//! measure residuals against a finite spanning [`WitnessSet`].

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numeric::{self, Real};

/// A point of the coordinate space.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceElement(Vec<f64>);

impl SpaceElement {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "space elements need dimension >= 2, got {}",
                coords.len()
            )));
        }
        if let Some(index) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(SpaceElement(coords))
    }

    pub fn zeros(dimension: usize) -> Self {
        SpaceElement(vec![0.0; dimension])
    }

    pub fn basis(dimension: usize, index: usize) -> Self {
        let mut coords = vec![0.0; dimension];
        coords[index] = 1.0;
        SpaceElement(coords)
    }

    /// Builds an element without validation. Used for results of arithmetic on
    /// already-validated elements.
    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        SpaceElement(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn sub(&self, other: &SpaceElement) -> SpaceElement {
        debug_assert_eq!(self.dim(), other.dim());
        SpaceElement(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &SpaceElement) -> SpaceElement {
        debug_assert_eq!(self.dim(), other.dim());
        SpaceElement(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, factor: f64) -> SpaceElement {
        SpaceElement(self.0.iter().map(|a| factor * a).collect())
    }

    /// Largest absolute coordinate.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |acc, c| acc.max(c.abs()))
    }

    fn euclidean(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

impl fmt::Display for SpaceElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoNormKind {
    /// `|u1 v2 - u2 v1|`, planar only.
    Cross2,
    /// Parallelogram area `sqrt(|x|^2 |y|^2 - <x,y>^2)`.
    GramN,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwoNormSpace {
    kind: TwoNormKind,
    dimension: usize,
}

impl TwoNormSpace {
    pub fn new(kind: TwoNormKind, dimension: usize) -> Result<Self> {
        match kind {
            TwoNormKind::Cross2 if dimension != 2 => Err(Error::InvalidArgument(format!(
                "cross2 space must have dimension 2, got {dimension}"
            ))),
            _ if dimension < 2 => Err(Error::InvalidArgument(format!(
                "2-normed spaces need dimension >= 2, got {dimension}"
            ))),
            _ => Ok(TwoNormSpace { kind, dimension }),
        }
    }

    pub fn cross2() -> Self {
        TwoNormSpace {
            kind: TwoNormKind::Cross2,
            dimension: 2,
        }
    }

    pub fn gram(dimension: usize) -> Result<Self> {
        Self::new(TwoNormKind::GramN, dimension)
    }

    pub fn kind(&self) -> TwoNormKind {
        self.kind
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn check(&self, x: &SpaceElement) -> Result<()> {
        if x.dim() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: x.dim(),
            });
        }
        Ok(())
    }

    /// Evaluates the 2-norm on raw coordinates in any supported precision.
    /// Dimensions are assumed to match.
    pub(crate) fn eval<R: Real>(&self, x: &[R], y: &[R]) -> R {
        match self.kind {
            TwoNormKind::Cross2 => numeric::cross2(x, y),
            TwoNormKind::GramN => numeric::gram(x, y),
        }
    }
}

/// A 2-norm evaluator over raw coordinates. Implemented by [`TwoNormSpace`];
/// the axiom checker accepts any implementation so that candidate evaluators
/// can be screened before use.
pub trait TwoNorm {
    fn dimension(&self) -> usize;
    fn norm(&self, x: &[f64], y: &[f64]) -> f64;
}

impl TwoNorm for TwoNormSpace {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn norm(&self, x: &[f64], y: &[f64]) -> f64 {
        self.eval(x, y)
    }
}

/// Adapts a closure into a [`TwoNorm`].
pub struct FnNorm<F> {
    pub dimension: usize,
    pub f: F,
}

impl<F: Fn(&[f64], &[f64]) -> f64> TwoNorm for FnNorm<F> {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn norm(&self, x: &[f64], y: &[f64]) -> f64 {
        (self.f)(x, y)
    }
}

fn same_dim(expected: usize, x: &SpaceElement) -> Result<()> {
    if x.dim() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: x.dim(),
        });
    }
    Ok(())
}

pub fn cross2_norm(u: &SpaceElement, v: &SpaceElement) -> Result<f64> {
    same_dim(2, u)?;
    same_dim(2, v)?;
    Ok(numeric::cross2(u.coords(), v.coords()))
}

pub fn gram_norm(x: &SpaceElement, y: &SpaceElement) -> Result<f64> {
    same_dim(x.dim(), y)?;
    Ok(numeric::gram(x.coords(), y.coords()))
}

pub fn two_norm(space: &TwoNormSpace, x: &SpaceElement, y: &SpaceElement) -> Result<f64> {
    space.check(x)?;
    space.check(y)?;
    Ok(space.eval(x.coords(), y.coords()))
}

/// `p_z(x) = ‖x, z‖`.
pub fn seminorm(space: &TwoNormSpace, z: &SpaceElement, x: &SpaceElement) -> Result<f64> {
    two_norm(space, x, z)
}

/// Finite set of second arguments against which residuals are measured.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessSet {
    witnesses: Vec<SpaceElement>,
}

impl WitnessSet {
    /// Validates that the witnesses are nonempty, share one dimension, and span
    /// the space (so a zero residual against all of them forces a zero vector).
    pub fn new(dimension: usize, witnesses: Vec<SpaceElement>) -> Result<Self> {
        if witnesses.is_empty() {
            return Err(Error::Configuration("witness set is empty".into()));
        }
        for w in &witnesses {
            if w.dim() != dimension {
                return Err(Error::Configuration(format!(
                    "witness {w} has dimension {}, space has {dimension}",
                    w.dim()
                )));
            }
        }
        let rank = rank(&witnesses);
        if rank < dimension {
            return Err(Error::Configuration(format!(
                "witness set spans a subspace of rank {rank} < {dimension}"
            )));
        }
        Ok(WitnessSet { witnesses })
    }

    pub fn standard_basis(dimension: usize) -> Self {
        WitnessSet {
            witnesses: (0..dimension)
                .map(|i| SpaceElement::basis(dimension, i))
                .collect(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.witnesses[0].dim()
    }

    pub fn len(&self) -> usize {
        self.witnesses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.witnesses.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &SpaceElement> {
        self.witnesses.iter()
    }

    pub fn as_slice(&self) -> &[SpaceElement] {
        &self.witnesses
    }

    /// `‖v, z_j‖` for each witness `z_j`.
    pub(crate) fn residuals(&self, space: &TwoNormSpace, v: &SpaceElement) -> Vec<f64> {
        self.witnesses
            .iter()
            .map(|z| space.eval(v.coords(), z.coords()))
            .collect()
    }

    /// `max_z ‖v, z‖`.
    pub(crate) fn max_residual(&self, space: &TwoNormSpace, v: &SpaceElement) -> f64 {
        self.witnesses
            .iter()
            .map(|z| space.eval(v.coords(), z.coords()))
            .fold(0.0, f64::max)
    }
}

/// Numerical rank by Gaussian elimination with partial pivoting.
fn rank(vectors: &[SpaceElement]) -> usize {
    let cols = vectors[0].dim();
    let mut rows: Vec<Vec<f64>> = vectors.iter().map(|v| v.coords().to_vec()).collect();
    let scale = vectors.iter().map(|v| v.max_abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0;
    }
    let eps = 1e-12 * scale;
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows.len() {
            break;
        }
        let pivot = (rank..rows.len())
            .max_by(|&a, &b| rows[a][col].abs().total_cmp(&rows[b][col].abs()))
            .unwrap();
        if rows[pivot][col].abs() <= eps {
            continue;
        }
        rows.swap(rank, pivot);
        let (head, tail) = rows.split_at_mut(rank + 1);
        let pivot_row = &head[rank];
        for row in tail {
            let factor = row[col] / pivot_row[col];
            for (v, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *v -= factor * p;
            }
        }
        rank += 1;
    }
    rank
}

/// `max_{z in W} ‖x - y, z‖`.
pub fn witness_residual(
    space: &TwoNormSpace,
    witnesses: &WitnessSet,
    x: &SpaceElement,
    y: &SpaceElement,
) -> Result<f64> {
    space.check(x)?;
    space.check(y)?;
    if witnesses.dimension() != space.dimension() {
        return Err(Error::Configuration(format!(
            "witness set dimension {} does not match space dimension {}",
            witnesses.dimension(),
            space.dimension()
        )));
    }
    Ok(witnesses.max_residual(space, &x.sub(y)))
}

fn ball_distance(
    space: &TwoNormSpace,
    u: &SpaceElement,
    center: &SpaceElement,
    radius: f64,
    x: &SpaceElement,
) -> Result<f64> {
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "ball radius must be positive, got {radius}"
        )));
    }
    space.check(u)?;
    space.check(center)?;
    space.check(x)?;
    Ok(space.eval(x.sub(center).coords(), u.coords()))
}

/// Membership in `B_u[center, radius] = {x : ‖x - center, u‖ <= radius}`.
pub fn in_closed_ball(
    space: &TwoNormSpace,
    u: &SpaceElement,
    center: &SpaceElement,
    radius: f64,
    x: &SpaceElement,
) -> Result<bool> {
    Ok(ball_distance(space, u, center, radius, x)? <= radius)
}

/// Membership in `B_u(center, radius)`, strict inequality.
pub fn in_open_ball(
    space: &TwoNormSpace,
    u: &SpaceElement,
    center: &SpaceElement,
    radius: f64,
    x: &SpaceElement,
) -> Result<bool> {
    Ok(ball_distance(space, u, center, radius, x)? < radius)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Axiom {
    /// Nonnegativity, and zero on dependent pairs.
    N1,
    /// Symmetry.
    N2,
    /// Absolute homogeneity in the first slot.
    N3,
    /// Triangle inequality in the first slot.
    N4,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomViolation {
    pub axiom: Axiom,
    pub sample: usize,
    pub triple: [Vec<f64>; 3],
    /// Excess over the allowed slack, relative to the sample's scale.
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub samples_tested: usize,
    /// Total number of violations found.
    pub violation_count: usize,
    /// The first [`MAX_RECORDED_VIOLATIONS`] violations, in sample order.
    pub violations: Vec<AxiomViolation>,
    pub passed: bool,
}

pub const MAX_RECORDED_VIOLATIONS: usize = 256;

const AXIOM_BOX: f64 = 10.0;

/// Screens a 2-norm evaluator against the four axioms on seeded samples drawn
/// from `[-10, 10]^n`. Each check allows `tolerance` slack relative to the
/// product of the Euclidean lengths involved.
pub fn check_axioms<N: TwoNorm + ?Sized>(
    norm: &N,
    sample_count: usize,
    seed: u64,
    tolerance: f64,
) -> AxiomReport {
    let n = norm.dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> SpaceElement {
        SpaceElement::from_raw((0..n).map(|_| rng.random_range(-AXIOM_BOX..AXIOM_BOX)).collect())
    };

    let mut violation_count = 0;
    let mut violations = Vec::new();
    let mut record = |axiom: Axiom, sample: usize, triple: [&SpaceElement; 3], magnitude: f64| {
        violation_count += 1;
        if violations.len() < MAX_RECORDED_VIOLATIONS {
            violations.push(AxiomViolation {
                axiom,
                sample,
                triple: triple.map(|e| e.coords().to_vec()),
                magnitude,
            });
        }
    };

    for sample in 0..sample_count {
        let x = draw(&mut rng);
        let y = draw(&mut rng);
        let z = draw(&mut rng);
        let alpha = rng.random_range(-AXIOM_BOX..AXIOM_BOX);
        let (lx, ly, lz) = (x.euclidean(), y.euclidean(), z.euclidean());

        // N1: nonnegative, and zero on the dependent pair (x, alpha x)
        let xy = norm.norm(x.coords(), y.coords());
        if xy.is_nan() || xy < 0.0 {
            record(Axiom::N1, sample, [&x, &y, &z], -xy);
        }
        let ax = x.scale(alpha);
        let dep = norm.norm(x.coords(), ax.coords());
        let dep_scale = lx * ax.euclidean();
        if !(dep.abs() <= tolerance * dep_scale) {
            record(Axiom::N1, sample, [&x, &ax, &z], excess(dep.abs(), tolerance, dep_scale));
        }

        // N2
        let yx = norm.norm(y.coords(), x.coords());
        let sym_scale = lx * ly;
        if !((xy - yx).abs() <= tolerance * sym_scale) {
            record(Axiom::N2, sample, [&x, &y, &z], excess((xy - yx).abs(), tolerance, sym_scale));
        }

        // N3
        let axy = norm.norm(ax.coords(), y.coords());
        let hom_scale = alpha.abs() * lx * ly;
        let hom_gap = (axy - alpha.abs() * xy).abs();
        if !(hom_gap <= tolerance * hom_scale) {
            record(Axiom::N3, sample, [&x, &y, &z], excess(hom_gap, tolerance, hom_scale));
        }

        // N4
        let sum = x.add(&y);
        let lhs = norm.norm(sum.coords(), z.coords());
        let rhs = norm.norm(x.coords(), z.coords()) + norm.norm(y.coords(), z.coords());
        let tri_scale = (lx + ly) * lz;
        if !(lhs <= rhs + tolerance * tri_scale) {
            record(Axiom::N4, sample, [&x, &y, &z], excess(lhs - rhs, tolerance, tri_scale));
        }
    }

    AxiomReport {
        samples_tested: sample_count,
        passed: violation_count == 0,
        violation_count,
        violations,
    }
}

fn excess(gap: f64, tolerance: f64, scale: f64) -> f64 {
    let s = if scale > 0.0 { scale } else { 1.0 };
    if gap.is_nan() {
        f64::INFINITY
    } else {
        gap / s - tolerance
    }
}
