//! Krasnoselskij iteration `x_n = (1 - lambda) x_{n-1} + lambda T x_{n-1}`
//! and its Picard, local-ball, and N-th iterate variants.
//!
//! All residuals are measured against the configured [`WitnessSet`]: the
//! residual of a vector `v` is `max_z ‖v, z‖`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twofloat::TwoFloat;

use crate::analyzer::{EnrichedCertificate, SamplingRegion};
use crate::error::{Error, Result};
use crate::mapping::{averaged, iterated, SelfMap};
use crate::numeric::lift;
use crate::space::{in_closed_ball, in_open_ball, SpaceElement, TwoNormSpace, WitnessSet};

pub const DEFAULT_CYCLE_WINDOW: usize = 8;
/// Relative slack for the a priori and rate checks.
pub const BOUND_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub witnesses: WitnessSet,
    pub domain: Option<Domain>,
    pub cycle_window: usize,
    /// Seed for randomized starting points (see [`uniqueness_probe`]).
    pub seed: u64,
}

impl SolveConfig {
    pub fn new(tol: f64, max_iter: usize, witnesses: WitnessSet) -> Self {
        SolveConfig {
            tol,
            max_iter,
            witnesses,
            domain: None,
            cycle_window: DEFAULT_CYCLE_WINDOW,
            seed: 0,
        }
    }

    pub fn validate(&self, space: &TwoNormSpace) -> Result<()> {
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(Error::InvalidArgument(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter < 1 {
            return Err(Error::InvalidArgument("max_iter must be >= 1".into()));
        }
        if self.cycle_window < 2 {
            return Err(Error::InvalidArgument("cycle window must be >= 2".into()));
        }
        if self.witnesses.dimension() != space.dimension() {
            return Err(Error::Configuration(format!(
                "witness dimension {} does not match space dimension {}",
                self.witnesses.dimension(),
                space.dimension()
            )));
        }
        if let Some(domain) = &self.domain {
            domain.validate(space)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DomainKind {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    TwoNormBall {
        u: SpaceElement,
        center: SpaceElement,
        radius: f64,
        closed: bool,
    },
}

/// Region the iterates must stay in. `bound_beta`, when given, is the
/// boundedness constant checked against the first step.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub kind: DomainKind,
    pub bound_beta: Option<f64>,
}

impl Domain {
    pub fn boxed(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let d = Domain {
            kind: DomainKind::Box { lo, hi },
            bound_beta: None,
        };
        d.check_shape()?;
        Ok(d)
    }

    pub fn ball(u: SpaceElement, center: SpaceElement, radius: f64, closed: bool) -> Result<Self> {
        let d = Domain {
            kind: DomainKind::TwoNormBall {
                u,
                center,
                radius,
                closed,
            },
            bound_beta: None,
        };
        d.check_shape()?;
        Ok(d)
    }

    pub fn with_beta(mut self, beta: f64) -> Result<Self> {
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(Error::InvalidArgument(format!("beta must be finite and >= 0, got {beta}")));
        }
        self.bound_beta = Some(beta);
        Ok(self)
    }

    fn check_shape(&self) -> Result<()> {
        match &self.kind {
            DomainKind::Box { lo, hi } => {
                if lo.len() != hi.len() {
                    return Err(Error::InvalidArgument("box bounds differ in length".into()));
                }
                if lo.iter().zip(hi).any(|(l, h)| !(l <= h)) {
                    return Err(Error::InvalidArgument("box needs lo <= hi componentwise".into()));
                }
            }
            DomainKind::TwoNormBall { u, center, radius, .. } => {
                if !(*radius > 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "ball radius must be positive, got {radius}"
                    )));
                }
                if u.dim() != center.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: center.dim(),
                        found: u.dim(),
                    });
                }
            }
        }
        Ok(())
    }

    fn validate(&self, space: &TwoNormSpace) -> Result<()> {
        self.check_shape()?;
        let dim = match &self.kind {
            DomainKind::Box { lo, .. } => lo.len(),
            DomainKind::TwoNormBall { center, .. } => center.dim(),
        };
        if dim != space.dimension() {
            return Err(Error::DimensionMismatch {
                expected: space.dimension(),
                found: dim,
            });
        }
        Ok(())
    }

    pub fn contains(&self, space: &TwoNormSpace, x: &SpaceElement) -> Result<bool> {
        match &self.kind {
            DomainKind::Box { lo, hi } => {
                space.check(x)?;
                Ok(x.coords().iter().zip(lo.iter().zip(hi)).all(|(c, (l, h))| l <= c && c <= h))
            }
            DomainKind::TwoNormBall {
                u,
                center,
                radius,
                closed: true,
            } => in_closed_ball(space, u, center, *radius, x),
            DomainKind::TwoNormBall {
                u,
                center,
                radius,
                closed: false,
            } => in_open_ball(space, u, center, *radius, x),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub n: usize,
    pub x: SpaceElement,
    /// `max_z ‖x_n - x_{n-1}, z‖`, zero on row 0.
    pub step_residual: f64,
    /// `max_z ‖T x_n - x_n, z‖` for the map being solved.
    pub fixed_residual: f64,
    /// `d^n / (1 - d) * max_z ‖x_0 - x_1, z‖`; absent without a certificate.
    pub apriori_bound: Option<f64>,
    /// `‖x_n - x_{n-1}, z_j‖` for each witness.
    pub witness_steps: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct IterationTrace {
    rows: Vec<TraceRow>,
}

impl IterationTrace {
    pub fn rows(&self) -> &[TraceRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn last(&self) -> Option<&TraceRow> {
        self.rows.last()
    }

    fn push(&mut self, row: TraceRow) {
        debug_assert_eq!(row.n, self.rows.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    OscillationDetected,
    MaxIterExceeded,
    LeftDomain,
    PreconditionFailed,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SolveStatus::Converged => "Converged",
            SolveStatus::OscillationDetected => "OscillationDetected",
            SolveStatus::MaxIterExceeded => "MaxIterExceeded",
            SolveStatus::LeftDomain => "LeftDomain",
            SolveStatus::PreconditionFailed => "PreconditionFailed",
        };
        f.write_str(s)
    }
}

/// Local-ball bookkeeping: the evaluated precondition
/// `‖x_0 - T x_0, u‖ < (b + 1 - theta) r` and the chosen radius.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalBall {
    pub u: SpaceElement,
    pub radius: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub epsilon: Option<f64>,
    /// Every recorded iterate lies in `B_u[x_0, epsilon]`.
    pub invariant_holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub x_star: Option<SpaceElement>,
    pub iterations: usize,
    pub certificate: Option<EnrichedCertificate>,
    pub trace: IterationTrace,
    pub bound_violations: usize,
    pub period: Option<usize>,
    /// Largest `‖S x_n - S x_{n-1}, z‖ / ‖x_n - x_{n-1}, z‖` over consecutive
    /// iterates and witnesses, where `S` is the map being iterated. Evaluated
    /// in double-double so it is not swamped by rounding in tiny steps.
    pub worst_step_ratio: Option<f64>,
    pub local: Option<LocalBall>,
    pub diagnostics: Vec<String>,
}

impl SolveReport {
    /// Number of consecutive row pairs violating
    /// `step(n+1) <= d * step(n) + 1e-12 * scale`, where `scale` is one plus
    /// the largest coordinate magnitude seen in the trace.
    pub fn rate_violations(&self, d: f64) -> usize {
        let rows = self.trace.rows();
        let scale = 1.0 + rows.iter().map(|r| r.x.max_abs()).fold(0.0, f64::max);
        rows.windows(2)
            .skip(1)
            .filter(|w| w[1].step_residual > d * w[0].step_residual + BOUND_SLACK * scale)
            .count()
    }
}

/// `d^n / (1 - d) * base`.
pub fn apriori_bound(certificate: &EnrichedCertificate, n: usize, base: f64) -> f64 {
    apriori(certificate.d(), n, base)
}

fn apriori(d: f64, n: usize, base: f64) -> f64 {
    let power = if n == 0 {
        1.0
    } else if d == 0.0 {
        0.0
    } else {
        d.powi(n.min(i32::MAX as usize) as i32)
    };
    power * base / (1.0 - d)
}

/// Step size below which the iterate is within `tol` of the fixed point:
/// `tol (1 - d) / d`, or `tol` itself when `d` is (numerically) zero.
pub fn aposteriori_step_threshold(certificate: &EnrichedCertificate, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    Ok(step_threshold(certificate.d(), tol))
}

fn step_threshold(d: f64, tol: f64) -> f64 {
    if d <= 1e-300 {
        tol
    } else {
        tol * (1.0 - d) / d
    }
}

/// Smallest period `p <= window` such that both `x_n ≈ x_{n-p}` and
/// `x_{n-1} ≈ x_{n-1-p}` within `eps` in witness residual, where `n` is the
/// last row. Only fires while the last step is still larger than `eps`, so a
/// settled trace never reports period 1.
pub fn detect_cycle(
    trace: &IterationTrace,
    space: &TwoNormSpace,
    witnesses: &WitnessSet,
    window: usize,
    eps: f64,
) -> Option<usize> {
    let rows = trace.rows();
    let last = rows.last()?;
    if last.step_residual <= eps {
        return None;
    }
    let n = last.n;
    let close = |a: usize, b: usize| witnesses.max_residual(space, &rows[a].x.sub(&rows[b].x)) <= eps;
    (1..=window)
        .filter(|&p| n > p)
        .find(|&p| close(n, n - p) && close(n - 1, n - 1 - p))
}

struct Iteration<'a> {
    space: &'a TwoNormSpace,
    cfg: &'a SolveConfig,
    /// The map whose fixed point is sought.
    target: &'a SelfMap,
    /// The map actually iterated (`T_lambda`).
    step: SelfMap,
    d: Option<f64>,
    detect_cycles: bool,
}

impl Iteration<'_> {
    fn residual(&self, v: &SpaceElement) -> f64 {
        self.cfg.witnesses.max_residual(self.space, v)
    }

    fn pair_ratio(&self, x: &SpaceElement, y: &SpaceElement) -> Option<f64> {
        let (xd, yd): (Vec<TwoFloat>, Vec<TwoFloat>) = (lift(x.coords()), lift(y.coords()));
        let diff: Vec<TwoFloat> = xd.iter().zip(&yd).map(|(&a, &b)| a - b).collect();
        let (sx, sy) = (self.step.apply_in(&xd), self.step.apply_in(&yd));
        let image: Vec<TwoFloat> = sx.iter().zip(&sy).map(|(&a, &b)| a - b).collect();
        self.cfg
            .witnesses
            .iter()
            .filter_map(|z| {
                let zd: Vec<TwoFloat> = lift(z.coords());
                let den = self.space.eval(&diff, &zd);
                (den > TwoFloat::from(0.0)).then(|| (self.space.eval(&image, &zd) / den).hi())
            })
            .reduce(f64::max)
    }

    fn fixed_residual(&self, x: &SpaceElement) -> f64 {
        self.residual(&self.target.apply(x).expect("dimension checked").sub(x))
    }

    fn run(&self, x0: &SpaceElement, certificate: Option<EnrichedCertificate>) -> Result<SolveReport> {
        self.space.check(x0)?;
        if self.target.dimension() != self.space.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.space.dimension(),
                found: self.target.dimension(),
            });
        }
        self.cfg.validate(self.space)?;

        let tol = self.cfg.tol;
        let mut diagnostics = Vec::new();
        let mut trace = IterationTrace::default();
        let mut next = self.step.apply(x0)?;
        let base = self.residual(&next.sub(x0));
        let bound = |n: usize| self.d.map(|d| apriori(d, n, base));

        if let Some(beta) = self.cfg.domain.as_ref().and_then(|d| d.bound_beta) {
            if base > beta {
                diagnostics.push(format!(
                    "warning: first step residual {base:e} exceeds the boundedness constant beta = {beta:e}"
                ));
            }
        }

        trace.push(TraceRow {
            n: 0,
            x: x0.clone(),
            step_residual: 0.0,
            fixed_residual: self.fixed_residual(x0),
            apriori_bound: bound(0),
            witness_steps: vec![0.0; self.cfg.witnesses.len()],
        });

        let mut status = SolveStatus::MaxIterExceeded;
        let mut period = None;
        if let Some(domain) = &self.cfg.domain {
            if !domain.contains(self.space, x0)? {
                diagnostics.push("starting point lies outside the domain".into());
                status = SolveStatus::LeftDomain;
            }
        }

        let mut n = 0;
        while status == SolveStatus::MaxIterExceeded {
            let row = trace.last().unwrap();
            let x = &row.x;
            // ‖x_n - T_lambda x_n‖, which bounds ‖x_n - x*‖ by 1/(1 - d)
            let lambda_residual = self.residual(&next.sub(x));
            let estimate_ok = match self.d {
                Some(d) => {
                    (n >= 1 && row.step_residual <= step_threshold(d, tol))
                        || lambda_residual / (1.0 - d) <= tol
                }
                None => (n >= 1 && row.step_residual <= tol) || lambda_residual <= tol,
            };
            if estimate_ok && row.fixed_residual <= tol && lambda_residual <= tol {
                status = SolveStatus::Converged;
                break;
            }
            if n >= self.cfg.max_iter {
                break;
            }
            if !next.is_finite() {
                diagnostics.push(format!("iterate {} is not finite", n + 1));
                break;
            }
            let step_vec = next.sub(x);
            let witness_steps = self.cfg.witnesses.residuals(self.space, &step_vec);
            let step_residual = witness_steps.iter().copied().fold(0.0, f64::max);
            n += 1;
            let x_new = next;
            trace.push(TraceRow {
                n,
                fixed_residual: self.fixed_residual(&x_new),
                x: x_new,
                step_residual,
                apriori_bound: bound(n),
                witness_steps,
            });
            let x_new = &trace.last().unwrap().x;
            if let Some(domain) = &self.cfg.domain {
                if !domain.contains(self.space, x_new)? {
                    diagnostics.push(format!("iterate {n} left the domain"));
                    status = SolveStatus::LeftDomain;
                    break;
                }
            }
            if self.detect_cycles {
                period = detect_cycle(&trace, self.space, &self.cfg.witnesses, self.cfg.cycle_window, tol);
                if period.is_some() {
                    status = SolveStatus::OscillationDetected;
                    break;
                }
            }
            next = self.step.apply(x_new)?;
        }

        let rows = trace.rows();
        let iterations = rows.len() - 1;
        let worst_step_ratio = rows
            .windows(2)
            .filter_map(|w| self.pair_ratio(&w[0].x, &w[1].x))
            .reduce(f64::max);

        let x_star = (status == SolveStatus::Converged).then(|| rows[iterations].x.clone());
        let mut bound_violations = 0;
        if let (Some(x_star), Some(_)) = (&x_star, self.d) {
            let scale = 1.0 + x0.max_abs().max(x_star.max_abs());
            for row in rows {
                let err = self.residual(&row.x.sub(x_star));
                let limit = row.apriori_bound.unwrap_or(f64::INFINITY);
                if err > limit + BOUND_SLACK * scale {
                    bound_violations += 1;
                }
            }
            if bound_violations > 0 {
                diagnostics.push(format!("{bound_violations} trace rows exceed the a priori bound"));
            }
        }

        Ok(SolveReport {
            status,
            x_star,
            iterations,
            certificate,
            trace,
            bound_violations,
            period,
            worst_step_ratio,
            local: None,
            diagnostics,
        })
    }
}

/// Iterates `T_lambda` with `lambda = 1/(b + 1)` from the certificate.
pub fn krasnoselskij_solve(
    map: &SelfMap,
    certificate: &EnrichedCertificate,
    x0: &SpaceElement,
    cfg: &SolveConfig,
    space: &TwoNormSpace,
) -> Result<SolveReport> {
    Iteration {
        space,
        cfg,
        target: map,
        step: averaged(map.clone(), certificate.lambda())?,
        d: Some(certificate.d()),
        detect_cycles: false,
    }
    .run(x0, Some(*certificate))
}

/// Plain Picard iteration `x_n = T x_{n-1}` with cycle detection. A
/// certificate, if supplied, must have `b = 0` and enables the a priori bound
/// and the contraction stopping rule.
pub fn picard_solve(
    map: &SelfMap,
    x0: &SpaceElement,
    cfg: &SolveConfig,
    space: &TwoNormSpace,
    certificate: Option<&EnrichedCertificate>,
) -> Result<SolveReport> {
    if let Some(c) = certificate {
        if c.lambda() != 1.0 {
            return Err(Error::InvalidArgument(format!(
                "Picard iteration needs a b = 0 certificate, got b = {}",
                c.b()
            )));
        }
    }
    Iteration {
        space,
        cfg,
        target: map,
        step: map.clone(),
        d: certificate.map(|c| c.d()),
        detect_cycles: true,
    }
    .run(x0, certificate.copied())
}

/// Local variant: checks `‖x_0 - T x_0, u‖ < (b + 1 - theta) r`, then solves
/// inside the closed ball `B_u[x_0, eps]` with `eps` the midpoint between
/// `‖x_0 - T x_0, u‖ / (b + 1 - theta)` and `r`.
pub fn local_ball_solve(
    map: &SelfMap,
    certificate: &EnrichedCertificate,
    x0: &SpaceElement,
    u: &SpaceElement,
    radius: f64,
    cfg: &SolveConfig,
    space: &TwoNormSpace,
) -> Result<SolveReport> {
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    space.check(x0)?;
    space.check(u)?;
    let slack = certificate.b() + 1.0 - certificate.theta();
    let lhs = space.eval(x0.sub(&map.apply(x0)?).coords(), u.coords());
    let rhs = slack * radius;

    if !(lhs < rhs) {
        cfg.validate(space)?;
        let witness_count = cfg.witnesses.len();
        let mut trace = IterationTrace::default();
        trace.push(TraceRow {
            n: 0,
            x: x0.clone(),
            step_residual: 0.0,
            fixed_residual: cfg.witnesses.max_residual(space, &map.apply(x0)?.sub(x0)),
            apriori_bound: None,
            witness_steps: vec![0.0; witness_count],
        });
        return Ok(SolveReport {
            status: SolveStatus::PreconditionFailed,
            x_star: None,
            iterations: 0,
            certificate: Some(*certificate),
            trace,
            bound_violations: 0,
            period: None,
            worst_step_ratio: None,
            local: Some(LocalBall {
                u: u.clone(),
                radius,
                lhs,
                rhs,
                epsilon: None,
                invariant_holds: false,
            }),
            diagnostics: vec![format!("precondition failed: {lhs:e} is not < {rhs:e}")],
        });
    }

    let epsilon = 0.5 * (lhs / slack + radius);
    let ball = Domain::ball(u.clone(), x0.clone(), epsilon, true)?;
    let ball = match cfg.domain.as_ref().and_then(|d| d.bound_beta) {
        Some(beta) => ball.with_beta(beta)?,
        None => ball,
    };
    let local_cfg = SolveConfig {
        domain: Some(ball.clone()),
        ..cfg.clone()
    };
    let mut report = krasnoselskij_solve(map, certificate, x0, &local_cfg, space)?;
    let mut invariant_holds = true;
    for row in report.trace.rows() {
        if !ball.contains(space, &row.x)? {
            invariant_holds = false;
        }
    }
    report.local = Some(LocalBall {
        u: u.clone(),
        radius,
        lhs,
        rhs,
        epsilon: Some(epsilon),
        invariant_holds,
    });
    Ok(report)
}

/// Solves for the fixed point of `T^N` (certified by `certificate`), then
/// confirms the limit is also fixed by `T` itself.
pub fn asymptotic_solve(
    map: &SelfMap,
    n: usize,
    certificate: &EnrichedCertificate,
    x0: &SpaceElement,
    cfg: &SolveConfig,
    space: &TwoNormSpace,
) -> Result<SolveReport> {
    let power = iterated(map.clone(), n)?;
    let mut report = krasnoselskij_solve(&power, certificate, x0, cfg, space)?;
    if let Some(x_star) = &report.x_star {
        let residual = cfg.witnesses.max_residual(space, &map.apply(x_star)?.sub(x_star));
        if residual <= cfg.tol {
            report
                .diagnostics
                .push(format!("fixed point of T^{n} is fixed by T (residual {residual:e})"));
        } else {
            report.diagnostics.push(format!(
                "limit of T^{n} iteration is not fixed by T: residual {residual:e} > tol {:e}",
                cfg.tol
            ));
            report.status = SolveStatus::MaxIterExceeded;
            report.x_star = None;
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniquenessProbe {
    pub limits: Vec<SpaceElement>,
    pub all_converged: bool,
    /// Largest witness residual between any two limits.
    pub max_pairwise: f64,
}

/// Runs Krasnoselskij solves from `runs` starting points drawn from `region`
/// with `cfg.seed` and compares the limits pairwise.
pub fn uniqueness_probe(
    map: &SelfMap,
    certificate: &EnrichedCertificate,
    cfg: &SolveConfig,
    space: &TwoNormSpace,
    region: &SamplingRegion,
    runs: usize,
) -> Result<UniquenessProbe> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut limits = Vec::with_capacity(runs);
    let mut all_converged = true;
    for _ in 0..runs {
        let x0 = SpaceElement::new(region.draw(&mut rng, space.dimension()))?;
        let report = krasnoselskij_solve(map, certificate, &x0, cfg, space)?;
        match report.x_star {
            Some(x) => limits.push(x),
            None => all_converged = false,
        }
    }
    let mut max_pairwise: f64 = 0.0;
    for (i, a) in limits.iter().enumerate() {
        for b in &limits[i + 1..] {
            max_pairwise = max_pairwise.max(cfg.witnesses.max_residual(space, &a.sub(b)));
        }
    }
    Ok(UniquenessProbe {
        limits,
        all_converged,
        max_pairwise,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzer::{certify, Provenance};

    fn e(c: &[f64]) -> SpaceElement {
        SpaceElement::new(c.to_vec()).unwrap()
    }

    fn cfg() -> SolveConfig {
        SolveConfig::new(1e-10, 10_000, WitnessSet::standard_basis(2))
    }

    fn cert(b: f64, theta: f64) -> EnrichedCertificate {
        certify(b, theta, Provenance::Asserted).unwrap()
    }

    fn reflection() -> SelfMap {
        SelfMap::reflection(e(&[2.0, 0.0]))
    }

    #[test]
    fn reflection_converges_at_rate_one_third() {
        let s = TwoNormSpace::cross2();
        let r = krasnoselskij_solve(&reflection(), &cert(0.5, 0.5), &e(&[0.0, 0.0]), &cfg(), &s).unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        assert!(r.iterations <= 25);
        let x = r.x_star.clone().unwrap();
        assert!((x.coords()[0] - 1.0).abs() <= 1e-10 && x.coords()[1].abs() <= 1e-10);
        assert_eq!(r.rate_violations(1.0 / 3.0), 0);
        assert!(r.worst_step_ratio.unwrap() <= 1.0 / 3.0 + 1e-12, "{:?}", r.worst_step_ratio);
        assert_eq!(r.bound_violations, 0);
    }

    #[test]
    fn constant_averaged_map_converges_in_one_step() {
        let s = TwoNormSpace::cross2();
        for x0 in [e(&[0.0, 0.0]), e(&[-4.0, 7.5])] {
            let r = krasnoselskij_solve(&reflection(), &cert(1.0, 0.0), &x0, &cfg(), &s).unwrap();
            assert_eq!(r.status, SolveStatus::Converged);
            assert_eq!(r.iterations, 1);
            assert_eq!(r.x_star.unwrap(), e(&[1.0, 0.0]));
        }
    }

    #[test]
    fn affine_contraction_converges_to_its_fixed_point() {
        let s = TwoNormSpace::cross2();
        let t = SelfMap::scalar_affine(0.5, e(&[1.0, 0.0])).unwrap();
        let r = krasnoselskij_solve(&t, &cert(0.0, 0.5), &e(&[0.0, 0.0]), &cfg(), &s).unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        let x = r.x_star.unwrap();
        assert!((x.coords()[0] - 2.0).abs() <= 1e-10);
        assert_eq!(r.bound_violations, 0);
    }

    #[test]
    fn picard_oscillates_on_reflection() {
        let s = TwoNormSpace::cross2();
        let r = picard_solve(&reflection(), &e(&[0.0, 0.0]), &cfg(), &s, None).unwrap();
        assert_eq!(r.status, SolveStatus::OscillationDetected);
        assert_eq!(r.period, Some(2));
        assert!(r.iterations <= 4);
        assert!(r.x_star.is_none());
    }

    #[test]
    fn picard_converges_on_contraction_and_fixed_start() {
        let s = TwoNormSpace::cross2();
        let t = SelfMap::scalar_affine(0.5, e(&[1.0, 0.0])).unwrap();
        let r = picard_solve(&t, &e(&[0.0, 0.0]), &cfg(), &s, None).unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        // without a certificate only the residual is controlled: error <= tol / (1 - c)
        assert!(r.trace.last().unwrap().fixed_residual <= 1e-10);
        assert!((r.x_star.unwrap().coords()[0] - 2.0).abs() <= 2e-10);

        let r = picard_solve(&reflection(), &e(&[1.0, 0.0]), &cfg(), &s, None).unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        assert_eq!(r.iterations, 0);

        assert!(picard_solve(&t, &e(&[0.0, 0.0]), &cfg(), &s, Some(&cert(0.5, 0.5))).is_err());
        let r = picard_solve(&t, &e(&[0.0, 0.0]), &cfg(), &s, Some(&cert(0.0, 0.5))).unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        assert_eq!(r.bound_violations, 0);
    }

    #[test]
    fn local_ball_examples() {
        let s = TwoNormSpace::cross2();
        let u = e(&[0.0, 1.0]);
        let x0 = e(&[0.0, 0.0]);
        let r = local_ball_solve(&reflection(), &cert(1.0, 0.0), &x0, &u, 2.0, &cfg(), &s).unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        let local = r.local.as_ref().unwrap();
        assert_eq!((local.lhs, local.rhs), (2.0, 4.0));
        assert_eq!(local.epsilon, Some(1.5));
        assert!(local.invariant_holds);
        for row in r.trace.rows() {
            assert!(in_closed_ball(&s, &u, &x0, 1.5, &row.x).unwrap());
        }

        let r = local_ball_solve(&reflection(), &cert(1.0, 0.0), &x0, &u, 0.5, &cfg(), &s).unwrap();
        assert_eq!(r.status, SolveStatus::PreconditionFailed);
        let local = r.local.unwrap();
        assert_eq!((local.lhs, local.rhs), (2.0, 1.0));

        let fixed = e(&[1.0, 0.0]);
        let r = local_ball_solve(&reflection(), &cert(1.0, 0.0), &fixed, &u, 0.1, &cfg(), &s).unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        assert_eq!(r.iterations, 0);

        assert!(local_ball_solve(&reflection(), &cert(1.0, 0.0), &x0, &u, 0.0, &cfg(), &s).is_err());
    }

    #[test]
    fn asymptotic_piecewise_reaches_minus_u_over_three() {
        let s = TwoNormSpace::cross2();
        let t = SelfMap::default_piecewise(2);
        let r = asymptotic_solve(&t, 2, &cert(1.0, 1.0), &e(&[5.0, 5.0]), &cfg(), &s).unwrap();
        assert_eq!(r.status, SolveStatus::Converged, "{:?}", r.diagnostics);
        let x = r.x_star.unwrap();
        for c in x.coords() {
            assert!((c + 1.0 / 3.0).abs() <= 1e-10);
        }
        let tx = t.apply(&x).unwrap();
        assert!(WitnessSet::standard_basis(2).max_residual(&s, &tx.sub(&x)) <= 1e-10);
    }

    #[test]
    fn asymptotic_with_one_iterate_matches_plain_solve() {
        let s = TwoNormSpace::cross2();
        let a = asymptotic_solve(&reflection(), 1, &cert(0.5, 0.5), &e(&[3.0, 1.0]), &cfg(), &s).unwrap();
        let b = krasnoselskij_solve(&reflection(), &cert(0.5, 0.5), &e(&[3.0, 1.0]), &cfg(), &s).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.status, b.status);
        assert_eq!(a.x_star, b.x_star);
    }

    #[test]
    fn asymptotic_constant_map_one_iteration() {
        let s = TwoNormSpace::cross2();
        let t = SelfMap::constant(e(&[0.5, -0.5]));
        let r = asymptotic_solve(&t, 3, &cert(0.0, 0.0), &e(&[9.0, 9.0]), &cfg(), &s).unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        assert_eq!(r.iterations, 1);
    }

    #[test]
    fn asymptotic_downgrades_when_t_does_not_fix_the_limit() {
        // a forged certificate for T^2 of the reflection (the identity) stops
        // immediately at x0, which the reflection does not fix
        let s = TwoNormSpace::cross2();
        let r = asymptotic_solve(&reflection(), 2, &cert(0.0, 0.0), &e(&[0.0, 0.0]), &cfg(), &s).unwrap();
        assert_eq!(r.status, SolveStatus::MaxIterExceeded);
        assert!(r.x_star.is_none());
    }

    #[test]
    fn apriori_bound_examples() {
        let c = cert(0.5, 0.5);
        assert!((apriori_bound(&c, 2, 4.0 / 3.0) - 2.0 / 9.0).abs() < 1e-15);
        let zero = cert(1.0, 0.0);
        assert_eq!(apriori_bound(&zero, 3, 5.0), 0.0);
        let half = cert(0.0, 0.5);
        assert_eq!(apriori_bound(&half, 0, 1.0), 2.0);
    }

    #[test]
    fn aposteriori_threshold_examples() {
        let t = aposteriori_step_threshold(&cert(0.5, 0.5), 1e-8).unwrap();
        assert!((t - 2e-8).abs() < 1e-22);
        assert_eq!(aposteriori_step_threshold(&cert(0.0, 0.5), 1e-6).unwrap(), 1e-6);
        assert_eq!(aposteriori_step_threshold(&cert(1.0, 0.0), 1e-8).unwrap(), 1e-8);
        assert!(aposteriori_step_threshold(&cert(1.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn converging_trace_has_no_cycle() {
        let s = TwoNormSpace::cross2();
        let r = krasnoselskij_solve(&reflection(), &cert(0.5, 0.5), &e(&[0.0, 0.0]), &cfg(), &s).unwrap();
        let w = WitnessSet::standard_basis(2);
        assert_eq!(detect_cycle(&r.trace, &s, &w, 8, 1e-10), None);
    }

    #[test]
    fn max_iter_and_domain_exit() {
        let s = TwoNormSpace::cross2();
        let mut c = cfg();
        c.max_iter = 3;
        let r = krasnoselskij_solve(&reflection(), &cert(0.5, 0.5), &e(&[0.0, 0.0]), &c, &s).unwrap();
        assert_eq!(r.status, SolveStatus::MaxIterExceeded);
        assert_eq!(r.iterations, 3);

        let mut c = cfg();
        c.domain = Some(Domain::boxed(vec![-0.5, -0.5], vec![0.5, 0.5]).unwrap());
        let r = krasnoselskij_solve(&reflection(), &cert(0.5, 0.5), &e(&[0.0, 0.0]), &c, &s).unwrap();
        assert_eq!(r.status, SolveStatus::LeftDomain);
        assert_eq!(r.iterations, 1);
    }

    #[test]
    fn beta_check_warns() {
        let s = TwoNormSpace::cross2();
        let mut c = cfg();
        c.domain = Some(
            Domain::boxed(vec![-10.0, -10.0], vec![10.0, 10.0])
                .unwrap()
                .with_beta(0.1)
                .unwrap(),
        );
        let r = krasnoselskij_solve(&reflection(), &cert(0.5, 0.5), &e(&[0.0, 0.0]), &c, &s).unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        assert!(r.diagnostics.iter().any(|d| d.contains("beta")));
    }

    #[test]
    fn config_validation() {
        let s = TwoNormSpace::cross2();
        let mut c = cfg();
        c.tol = 0.0;
        assert!(krasnoselskij_solve(&reflection(), &cert(0.5, 0.5), &e(&[0.0, 0.0]), &c, &s).is_err());
        let mut c = cfg();
        c.cycle_window = 1;
        assert!(picard_solve(&reflection(), &e(&[0.0, 0.0]), &c, &s, None).is_err());
        assert!(krasnoselskij_solve(&reflection(), &cert(0.5, 0.5), &e(&[0.0, 0.0, 0.0]), &cfg(), &s).is_err());
        assert!(Domain::boxed(vec![1.0, 0.0], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn uniqueness_probe_agrees() {
        let s = TwoNormSpace::cross2();
        let probe = uniqueness_probe(
            &reflection(),
            &cert(0.5, 0.5),
            &cfg(),
            &s,
            &SamplingRegion::default(),
            10,
        )
        .unwrap();
        assert!(probe.all_converged);
        assert_eq!(probe.limits.len(), 10);
        assert!(probe.max_pairwise <= 2e-10);
    }
}
