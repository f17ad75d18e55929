//! Enrichment coefficient estimation and certification.
//!
//! A map `T` is `(b, theta)`-enriched when
//! `‖b(x - y) + Tx - Ty, z‖ <= theta ‖x - y, z‖` for all `x, y, z`, with
//! `b >= 0` and `0 <= theta < b + 1`. Averaging with `lambda = 1/(b + 1)` then
//! yields a contraction with factor `d = theta * lambda`.
//!
//! Sampled ratios are evaluated in double-double precision (see
//! [`crate::numeric`]) and rounded once at the end.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::mapping::{averaged, SelfMap};
use crate::numeric::{lift, Real};
use crate::space::{SpaceElement, TwoNormSpace, WitnessSet};

/// Sampled ratios above this set [`ThetaEstimate::unbounded_flag`].
pub const RATIO_CAP: f64 = 1e6;
/// Sampled suprema are inflated by this factor before certification.
pub const SAMPLED_INFLATION: f64 = 1.01;
/// Slack allowed when checking an averaged map against its certified factor.
pub const CONTRACTION_SLACK: f64 = 1e-9;
pub const DEFAULT_B_GRID: [f64; 7] = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0];
pub const DEFAULT_REFINE_STEPS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    Sampled { sample_count: usize, seed: u64 },
    Asserted,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::ClosedForm => write!(f, "ClosedForm"),
            Provenance::Sampled { sample_count, seed } => {
                write!(f, "Sampled(count={sample_count},seed={seed})")
            }
            Provenance::Asserted => write!(f, "Asserted"),
        }
    }
}

/// A validated `(b, theta)` pair with its induced averaging weight and
/// contraction factor. Only obtainable through [`certify`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnrichedCertificate {
    b: f64,
    theta: f64,
    lambda: f64,
    d: f64,
    provenance: Provenance,
}

impl EnrichedCertificate {
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn d(&self) -> f64 {
        self.d
    }
    pub fn provenance(&self) -> Provenance {
        self.provenance
    }
}

pub fn certify(b: f64, theta: f64, provenance: Provenance) -> Result<EnrichedCertificate> {
    if !(b >= 0.0) || !b.is_finite() {
        return Err(Error::InvalidArgument(format!("b must be finite and >= 0, got {b}")));
    }
    if !(theta >= 0.0) || !theta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "theta must be finite and >= 0, got {theta}"
        )));
    }
    if theta >= b + 1.0 {
        return Err(Error::NotCertifiable { b, theta });
    }
    let lambda = 1.0 / (b + 1.0);
    let d = theta * lambda;
    // theta < b + 1 can still round to d == 1 right at the boundary
    if d >= 1.0 {
        return Err(Error::NotCertifiable { b, theta });
    }
    Ok(EnrichedCertificate {
        b,
        theta,
        lambda,
        d,
        provenance,
    })
}

/// Exact minimal `theta` for `x -> c x + t` under any 2-norm: `|b + c|`.
pub fn theta_scalar_affine(c: f64, b: f64) -> f64 {
    (b + c).abs()
}

/// Axis-aligned sampling box `[lo, hi]^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingRegion {
    lo: f64,
    hi: f64,
}

impl SamplingRegion {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidArgument(format!(
                "sampling region needs finite lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(SamplingRegion { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn scale(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    pub(crate) fn draw(&self, rng: &mut ChaCha8Rng, dimension: usize) -> Vec<f64> {
        (0..dimension).map(|_| rng.random_range(self.lo..self.hi)).collect()
    }
}

impl Default for SamplingRegion {
    fn default() -> Self {
        SamplingRegion { lo: -10.0, hi: 10.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingConfig {
    pub region: SamplingRegion,
    pub count: usize,
    pub seed: u64,
    /// Absolute threshold below which `‖x - y, z‖` counts as dependent.
    pub eps_dep: f64,
}

impl SamplingConfig {
    /// Uses `eps_dep = 1e-8 * region scale`.
    pub fn new(region: SamplingRegion, count: usize, seed: u64) -> Self {
        SamplingConfig {
            region,
            count,
            seed,
            eps_dep: 1e-8 * region.scale(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.count < 1 {
            return Err(Error::InvalidArgument("sample count must be >= 1".into()));
        }
        if !(self.eps_dep > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "eps_dep must be positive, got {}",
                self.eps_dep
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThetaEstimate {
    pub b: f64,
    /// Supremum of the sampled ratios (0 if every triple was skipped).
    pub theta_hat: f64,
    pub argmax_triple: Option<[SpaceElement; 3]>,
    pub evaluated: usize,
    pub skipped_dependent: usize,
    pub unbounded_flag: bool,
}

/// Running maximum over sampled triples. Ties keep the earliest sample.
struct RatioSweep {
    best: f64,
    argmax: Option<[SpaceElement; 3]>,
    evaluated: usize,
    skipped: usize,
}

/// Draws `count` pairs `(x, y)` plus a fresh `z` from the region and evaluates
/// `‖numerator(x, y), z‖ / ‖x - y, z‖` for that `z` and for every witness.
/// Sample `i` depends only on the first `i` draws of the seeded stream, so a
/// longer run extends a shorter one.
fn sweep<F>(
    space: &TwoNormSpace,
    witnesses: &WitnessSet,
    sampling: &SamplingConfig,
    mut numerator: F,
) -> Result<RatioSweep>
where
    F: FnMut(&[TwoFloat], &[TwoFloat], &[TwoFloat]) -> Vec<TwoFloat>,
{
    sampling.validate()?;
    if witnesses.dimension() != space.dimension() {
        return Err(Error::Configuration("witness set dimension does not match space".into()));
    }
    let n = space.dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
    let eps = TwoFloat::from(sampling.eps_dep);
    let lifted_witnesses: Vec<(Vec<TwoFloat>, &SpaceElement)> =
        witnesses.iter().map(|w| (lift(w.coords()), w)).collect();

    let mut out = RatioSweep {
        best: 0.0,
        argmax: None,
        evaluated: 0,
        skipped: 0,
    };
    for _ in 0..sampling.count {
        let x = sampling.region.draw(&mut rng, n);
        let y = sampling.region.draw(&mut rng, n);
        let z = sampling.region.draw(&mut rng, n);
        let (xd, yd, zd): (Vec<TwoFloat>, Vec<TwoFloat>, Vec<TwoFloat>) =
            (lift(&x), lift(&y), lift(&z));
        let diff: Vec<TwoFloat> = xd.iter().zip(&yd).map(|(&a, &b)| a - b).collect();
        let num = numerator(&xd, &yd, &diff);

        let consider = |zc: &[TwoFloat], zraw: &[f64], out: &mut RatioSweep| {
            let den = space.eval(&diff, zc);
            if den <= eps {
                out.skipped += 1;
                return;
            }
            out.evaluated += 1;
            let ratio = (space.eval(&num, zc) / den).to_f64();
            if ratio > out.best || (out.argmax.is_none() && ratio >= out.best) {
                out.best = ratio;
                out.argmax = Some([
                    SpaceElement::from_raw(x.clone()),
                    SpaceElement::from_raw(y.clone()),
                    SpaceElement::from_raw(zraw.to_vec()),
                ]);
            }
        };
        consider(&zd, &z, &mut out);
        for (wd, w) in &lifted_witnesses {
            consider(wd, w.coords(), &mut out);
        }
    }
    Ok(out)
}

fn enrichment_numerator<R: Real>(map: &SelfMap, b: f64, x: &[R], y: &[R], diff: &[R]) -> Vec<R> {
    let tx = map.apply_in(x);
    let ty = map.apply_in(y);
    let b = R::from_f64(b);
    diff.iter()
        .zip(tx.iter().zip(&ty))
        .map(|(&d, (&a, &c))| b * d + (a - c))
        .collect()
}

/// Pointwise enrichment ratio `‖b(x - y) + Tx - Ty, z‖ / ‖x - y, z‖`, or
/// `None` when the denominator vanishes.
pub fn enrichment_ratio(
    map: &SelfMap,
    b: f64,
    space: &TwoNormSpace,
    x: &SpaceElement,
    y: &SpaceElement,
    z: &SpaceElement,
) -> Result<Option<f64>> {
    for p in [x, y, z] {
        space.check(p)?;
    }
    if map.dimension() != space.dimension() {
        return Err(Error::DimensionMismatch {
            expected: space.dimension(),
            found: map.dimension(),
        });
    }
    let (xd, yd, zd): (Vec<TwoFloat>, Vec<TwoFloat>, Vec<TwoFloat>) =
        (lift(x.coords()), lift(y.coords()), lift(z.coords()));
    let diff: Vec<TwoFloat> = xd.iter().zip(&yd).map(|(&a, &b)| a - b).collect();
    let den = space.eval(&diff, &zd);
    if den == TwoFloat::from(0.0) {
        return Ok(None);
    }
    let num = space.eval(&enrichment_numerator(map, b, &xd, &yd, &diff), &zd);
    Ok(Some((num / den).to_f64()))
}

/// Lower estimate of the smallest admissible `theta` for the given `b`: the
/// supremum of sampled enrichment ratios.
pub fn estimate_theta(
    map: &SelfMap,
    b: f64,
    space: &TwoNormSpace,
    witnesses: &WitnessSet,
    sampling: &SamplingConfig,
) -> Result<ThetaEstimate> {
    if !(b >= 0.0) || !b.is_finite() {
        return Err(Error::InvalidArgument(format!("b must be finite and >= 0, got {b}")));
    }
    if map.dimension() != space.dimension() {
        return Err(Error::DimensionMismatch {
            expected: space.dimension(),
            found: map.dimension(),
        });
    }
    let sweep = sweep(space, witnesses, sampling, |x, y, diff| {
        enrichment_numerator(map, b, x, y, diff)
    })?;
    Ok(ThetaEstimate {
        b,
        theta_hat: sweep.best,
        unbounded_flag: !(sweep.best <= RATIO_CAP),
        argmax_triple: sweep.argmax,
        evaluated: sweep.evaluated,
        skipped_dependent: sweep.skipped,
    })
}

/// Certifies a sampled estimate after inflating it by [`SAMPLED_INFLATION`],
/// capped halfway between the estimate and `b + 1`.
pub fn certify_estimate(
    estimate: &ThetaEstimate,
    sampling: &SamplingConfig,
) -> Result<EnrichedCertificate> {
    let b = estimate.b;
    let theta_hat = estimate.theta_hat;
    if estimate.unbounded_flag || theta_hat >= b + 1.0 {
        return Err(Error::NotCertifiable { b, theta: theta_hat });
    }
    let cap = theta_hat + 0.5 * (b + 1.0 - theta_hat);
    let theta = (theta_hat * SAMPLED_INFLATION).min(cap);
    certify(
        b,
        theta,
        Provenance::Sampled {
            sample_count: sampling.count,
            seed: sampling.seed,
        },
    )
}

/// Certificate for a fixed `b`: closed form for affine map trees, sampled
/// otherwise.
pub fn resolve_certificate(
    map: &SelfMap,
    b: f64,
    space: &TwoNormSpace,
    witnesses: &WitnessSet,
    sampling: &SamplingConfig,
) -> Result<EnrichedCertificate> {
    match map.affine_form() {
        Some(form) => certify(b, theta_scalar_affine(form.slope, b), Provenance::ClosedForm),
        None => certify_estimate(&estimate_theta(map, b, space, witnesses, sampling)?, sampling),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BSearch {
    pub b_star: f64,
    pub certificate: EnrichedCertificate,
    /// Every `(b, d_hat(b))` evaluated, in evaluation order.
    pub evaluations: Vec<(f64, f64)>,
}

/// Searches for the `b` minimizing `d_hat(b) = theta(b) / (b + 1)`: grid scan,
/// then golden-section refinement on the bracket around the grid minimizer.
/// For affine trees the kink of `|b + c| / (b + 1)` at `b = -c` is evaluated as
/// well. Ties go to the smaller `b`.
pub fn optimize_b(
    map: &SelfMap,
    space: &TwoNormSpace,
    witnesses: &WitnessSet,
    grid: &[f64],
    refine_steps: usize,
    sampling: &SamplingConfig,
) -> Result<BSearch> {
    let mut grid: Vec<f64> = grid.to_vec();
    if grid.is_empty() {
        return Err(Error::InvalidArgument("b grid is empty".into()));
    }
    if let Some(bad) = grid.iter().find(|b| !(**b >= 0.0) || !b.is_finite()) {
        return Err(Error::InvalidArgument(format!("grid value {bad} is not a finite b >= 0")));
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let affine = map.affine_form();
    let objective = |b: f64| -> Result<(f64, f64)> {
        let theta = match &affine {
            Some(form) => theta_scalar_affine(form.slope, b),
            None => {
                let est = estimate_theta(map, b, space, witnesses, sampling)?;
                if est.unbounded_flag {
                    f64::INFINITY
                } else {
                    est.theta_hat
                }
            }
        };
        Ok((theta, theta / (b + 1.0)))
    };

    let mut evaluations = Vec::new();
    // (b, theta, d)
    let mut best: Option<(f64, f64, f64)> = None;
    let mut consider = |b: f64, best: &mut Option<(f64, f64, f64)>| -> Result<f64> {
        let (theta, d) = objective(b)?;
        evaluations.push((b, d));
        let better = match *best {
            None => true,
            Some((bb, _, bd)) => d < bd || (d == bd && b < bb),
        };
        if better {
            *best = Some((b, theta, d));
        }
        Ok(d)
    };

    let mut grid_values = Vec::with_capacity(grid.len());
    for &b in &grid {
        grid_values.push(consider(b, &mut best)?);
    }
    let i_min = (0..grid.len())
        .min_by(|&a, &b| grid_values[a].total_cmp(&grid_values[b]).then(a.cmp(&b)))
        .unwrap();

    if grid.len() > 1 && refine_steps > 0 {
        let mut lo = grid[i_min.saturating_sub(1)];
        let mut hi = grid[(i_min + 1).min(grid.len() - 1)];
        let ratio = (5f64.sqrt() - 1.0) / 2.0;
        let mut c = hi - ratio * (hi - lo);
        let mut e = lo + ratio * (hi - lo);
        let mut fc = consider(c, &mut best)?;
        let mut fe = consider(e, &mut best)?;
        for _ in 2..refine_steps.max(2) {
            if fc <= fe {
                hi = e;
                e = c;
                fe = fc;
                c = hi - ratio * (hi - lo);
                fc = consider(c, &mut best)?;
            } else {
                lo = c;
                c = e;
                fc = fe;
                e = lo + ratio * (hi - lo);
                fe = consider(e, &mut best)?;
            }
        }
    }
    if let Some(form) = &affine {
        if -form.slope >= 0.0 {
            consider(-form.slope, &mut best)?;
        }
    }

    let (b_star, theta, d) = best.expect("grid is nonempty");
    if !(d < 1.0) {
        return Err(Error::NotCertifiable { b: b_star, theta });
    }
    let certificate = match &affine {
        Some(_) => certify(b_star, theta, Provenance::ClosedForm)?,
        None => certify_estimate(&estimate_theta(map, b_star, space, witnesses, sampling)?, sampling)?,
    };
    Ok(BSearch {
        b_star,
        certificate,
        evaluations,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionCheck {
    pub passed: bool,
    pub worst_ratio: f64,
    pub evaluated: usize,
    pub skipped_dependent: usize,
}

/// Samples `‖T_lambda x - T_lambda y, z‖ / ‖x - y, z‖` and checks it stays
/// within `d + 1e-9`.
pub fn verify_averaged_contraction(
    certificate: &EnrichedCertificate,
    map: &SelfMap,
    space: &TwoNormSpace,
    witnesses: &WitnessSet,
    sampling: &SamplingConfig,
) -> Result<ContractionCheck> {
    let averaged_map = averaged(map.clone(), certificate.lambda())?;
    let sweep = sweep(space, witnesses, sampling, |x, y, _| {
        let ax = averaged_map.apply_in(x);
        let ay = averaged_map.apply_in(y);
        ax.iter().zip(&ay).map(|(&a, &b)| a - b).collect()
    })?;
    Ok(ContractionCheck {
        passed: sweep.best <= certificate.d() + CONTRACTION_SLACK,
        worst_ratio: sweep.best,
        evaluated: sweep.evaluated,
        skipped_dependent: sweep.skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn e(c: &[f64]) -> SpaceElement {
        SpaceElement::new(c.to_vec()).unwrap()
    }

    fn plane() -> (TwoNormSpace, WitnessSet) {
        (TwoNormSpace::cross2(), WitnessSet::standard_basis(2))
    }

    fn sampling(count: usize, seed: u64) -> SamplingConfig {
        SamplingConfig::new(SamplingRegion::default(), count, seed)
    }

    #[test]
    fn certify_examples() {
        let c = certify(0.5, 0.5, Provenance::Asserted).unwrap();
        assert_eq!(c.lambda(), 1.0 / 1.5);
        assert!((c.lambda() - 2.0 / 3.0).abs() < 1e-16);
        assert_eq!(c.d(), 1.0 / 3.0);

        let c = certify(0.0, 0.9, Provenance::Asserted).unwrap();
        assert_eq!((c.lambda(), c.d()), (1.0, 0.9));

        assert_eq!(
            certify(1.0, 2.0, Provenance::Asserted).unwrap_err(),
            Error::NotCertifiable { b: 1.0, theta: 2.0 }
        );
        assert!(matches!(certify(-0.1, 0.0, Provenance::Asserted), Err(Error::InvalidArgument(_))));
        assert!(matches!(certify(0.0, -0.1, Provenance::Asserted), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn certificate_arithmetic_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let b = rng.random_range(0.0..10.0);
            let theta = rng.random_range(0.0..12.0);
            match certify(b, theta, Provenance::Asserted) {
                Ok(c) => {
                    assert!(theta < b + 1.0);
                    assert!(c.d() < 1.0 && c.d() >= 0.0);
                    assert_eq!(c.lambda(), 1.0 / (b + 1.0));
                    assert_eq!(c.d(), theta * c.lambda());
                    assert!(c.lambda() > 0.0 && c.lambda() <= 1.0);
                }
                Err(Error::NotCertifiable { .. }) => assert!(theta >= b + 1.0),
                Err(other) => panic!("{other}"),
            }
        }
    }

    #[test]
    fn theta_scalar_affine_examples() {
        assert_eq!(theta_scalar_affine(-1.0, 0.5), 0.5);
        assert_eq!(theta_scalar_affine(-1.0, 1.0), 0.0);
        assert_eq!(theta_scalar_affine(-3.0, 2.0), 1.0);
    }

    #[test]
    fn estimate_reflection_approaches_b_minus_one() {
        let (s, w) = plane();
        let t = SelfMap::reflection(e(&[2.0, 0.0]));
        let est = estimate_theta(&t, 0.5, &s, &w, &sampling(2_000, 1)).unwrap();
        assert!(est.theta_hat <= 0.5 + 1e-12);
        assert!(est.theta_hat >= 0.5 - 1e-12);
        assert!(!est.unbounded_flag);
        assert!(est.argmax_triple.is_some());
    }

    #[test]
    fn estimate_constant_and_identity() {
        let (s, w) = plane();
        let constant = SelfMap::constant(e(&[3.0, -1.0]));
        for b in [0.0, 0.7, 3.0] {
            let est = estimate_theta(&constant, b, &s, &w, &sampling(500, 2)).unwrap();
            assert!((est.theta_hat - b).abs() <= 1e-15 * (1.0 + b), "{b}: {}", est.theta_hat);
        }
        let id = SelfMap::identity(2);
        let est = estimate_theta(&id, 0.0, &s, &w, &sampling(500, 2)).unwrap();
        assert_eq!(est.theta_hat, 1.0);
    }

    #[test]
    fn estimate_rejects_bad_inputs() {
        let (s, w) = plane();
        let id = SelfMap::identity(2);
        assert!(estimate_theta(&id, -1.0, &s, &w, &sampling(10, 0)).is_err());
        assert!(estimate_theta(&id, 0.0, &s, &w, &sampling(0, 0)).is_err());
        let g3 = TwoNormSpace::gram(3).unwrap();
        assert!(estimate_theta(&id, 0.0, &g3, &WitnessSet::standard_basis(3), &sampling(10, 0)).is_err());
    }

    #[test]
    fn sampled_estimate_is_a_lower_bound_and_monotone() {
        let (s, w) = plane();
        for c in [-2.5, -0.7, 0.4] {
            let t = SelfMap::scalar_affine(c, e(&[1.0, -2.0])).unwrap();
            for b in [0.0, 0.3, 1.5] {
                let mut previous = 0.0;
                for count in [10, 100, 1000] {
                    let est = estimate_theta(&t, b, &s, &w, &sampling(count, 99)).unwrap();
                    assert!(est.theta_hat <= theta_scalar_affine(c, b) + 1e-12);
                    assert!(est.theta_hat >= previous);
                    previous = est.theta_hat;
                }
            }
        }
    }

    #[test]
    fn piecewise_map_is_flagged_unbounded_for_small_b() {
        let (s, w) = plane();
        let t = SelfMap::default_piecewise(2);
        let est = estimate_theta(&t, 0.0, &s, &w, &sampling(20_000, 5)).unwrap();
        assert!(est.theta_hat > 1.0);
        let cert = certify_estimate(&est, &sampling(20_000, 5));
        assert!(matches!(cert, Err(Error::NotCertifiable { .. })));
    }

    #[test]
    fn ratio_is_scale_invariant_for_affine_maps() {
        let s = TwoNormSpace::gram(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let maps = [
            SelfMap::reflection(e(&[1.0, 2.0, 3.0])),
            SelfMap::scalar_affine(-0.4, e(&[0.0, 0.0, 0.0])).unwrap(),
        ];
        for _ in 0..200 {
            let mut p = || e(&[rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)]);
            let (x, y, z) = (p(), p(), p());
            let k = 3.5;
            for (i, t) in maps.iter().enumerate() {
                // the reflection's offset breaks scaling unless it scales too
                let t_scaled = match t {
                    SelfMap::Reflection { w } => SelfMap::reflection(w.scale(k)),
                    other => other.clone(),
                };
                let a = enrichment_ratio(t, 0.7, &s, &x, &y, &z).unwrap().unwrap();
                let b = enrichment_ratio(&t_scaled, 0.7, &s, &x.scale(k), &y.scale(k), &z.scale(k))
                    .unwrap()
                    .unwrap();
                assert!((a - b).abs() <= 1e-12 * a.max(1.0), "map {i}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn certify_estimate_inflates_and_caps() {
        let est = ThetaEstimate {
            b: 1.0,
            theta_hat: 1.0,
            argmax_triple: None,
            evaluated: 1,
            skipped_dependent: 0,
            unbounded_flag: false,
        };
        let cert = certify_estimate(&est, &sampling(1, 0)).unwrap();
        assert_eq!(cert.theta(), 1.01);
        let near = ThetaEstimate { theta_hat: 1.999, ..est.clone() };
        let cert = certify_estimate(&near, &sampling(1, 0)).unwrap();
        assert!(cert.theta() < 2.0 && cert.theta() > 1.999);
        assert!(matches!(cert.provenance(), Provenance::Sampled { sample_count: 1, seed: 0 }));
    }

    #[test]
    fn optimize_b_examples() {
        let (s, w) = plane();
        let cfg = sampling(100, 0);
        let refl = SelfMap::reflection(e(&[2.0, 0.0]));
        let r = optimize_b(&refl, &s, &w, &DEFAULT_B_GRID, DEFAULT_REFINE_STEPS, &cfg).unwrap();
        assert_eq!(r.b_star, 1.0);
        assert_eq!(r.certificate.theta(), 0.0);
        assert_eq!(r.certificate.d(), 0.0);

        let t = SelfMap::scalar_affine(0.3, e(&[1.0, 0.0])).unwrap();
        let r = optimize_b(&t, &s, &w, &DEFAULT_B_GRID, DEFAULT_REFINE_STEPS, &cfg).unwrap();
        assert_eq!(r.b_star, 0.0);
        assert_eq!(r.certificate.theta(), 0.3);
        assert_eq!(r.certificate.d(), 0.3);

        let t = SelfMap::scalar_affine(-3.0, e(&[1.0, 0.0])).unwrap();
        let r = optimize_b(&t, &s, &w, &DEFAULT_B_GRID, DEFAULT_REFINE_STEPS, &cfg).unwrap();
        assert_eq!(r.b_star, 3.0);
        assert_eq!(r.certificate.d(), 0.0);
    }

    #[test]
    fn optimize_b_beats_every_grid_point() {
        let (s, w) = plane();
        let cfg = sampling(100, 0);
        for c in [-7.0, -2.2, -1.0, -0.35, 0.0, 0.2, 0.6, 0.95] {
            let t = SelfMap::scalar_affine(c, e(&[0.0, 1.0])).unwrap();
            let r = optimize_b(&t, &s, &w, &DEFAULT_B_GRID, DEFAULT_REFINE_STEPS, &cfg).unwrap();
            for b in DEFAULT_B_GRID {
                assert!(r.certificate.d() <= theta_scalar_affine(c, b) / (b + 1.0));
            }
            if c <= 0.0 {
                assert!(r.certificate.d() <= 1e-9, "c = {c}");
            }
        }
    }

    #[test]
    fn optimize_b_fails_for_expansive_maps() {
        let (s, w) = plane();
        let t = SelfMap::scalar_affine(2.0, e(&[0.0, 1.0])).unwrap();
        let r = optimize_b(&t, &s, &w, &DEFAULT_B_GRID, 8, &sampling(10, 0));
        assert!(matches!(r, Err(Error::NotCertifiable { .. })));
        assert!(optimize_b(&t, &s, &w, &[], 8, &sampling(10, 0)).is_err());
    }

    #[test]
    fn optimize_b_sampled_path_on_iterated_piecewise() {
        let (s, w) = plane();
        let t2 = crate::mapping::iterated(SelfMap::default_piecewise(2), 2).unwrap();
        let r = optimize_b(&t2, &s, &w, &DEFAULT_B_GRID, 4, &sampling(2_000, 3)).unwrap();
        // T^2 is constant, so theta_hat(b) = b and d_hat is minimized at b = 0
        assert_eq!(r.b_star, 0.0);
        assert_eq!(r.certificate.d(), 0.0);
    }

    #[test]
    fn verify_examples() {
        let (s, w) = plane();
        let cfg = sampling(5_000, 8);
        let refl = SelfMap::reflection(e(&[2.0, 0.0]));
        let cert = certify(0.5, 0.5, Provenance::Asserted).unwrap();
        let check = verify_averaged_contraction(&cert, &refl, &s, &w, &cfg).unwrap();
        assert!(check.passed);
        assert!(check.worst_ratio <= 1.0 / 3.0 + 1e-9);

        let constant = SelfMap::constant(e(&[1.0, 1.0]));
        let cert = certify(0.0, 0.0, Provenance::Asserted).unwrap();
        let check = verify_averaged_contraction(&cert, &constant, &s, &w, &cfg).unwrap();
        assert!(check.passed);
        assert_eq!(check.worst_ratio, 0.0);

        let forged = certify(0.0, 0.5, Provenance::Asserted).unwrap();
        let check = verify_averaged_contraction(&forged, &SelfMap::identity(2), &s, &w, &cfg).unwrap();
        assert!(!check.passed);
        assert_eq!(check.worst_ratio, 1.0);
    }
}
