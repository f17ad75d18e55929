//! Resolves a scenario's certificate, dispatches to the matching solver, and
//! maps the outcome to a process exit code.

use crate::analyzer::{
    certify, estimate_theta, optimize_b, resolve_certificate, verify_averaged_contraction, BSearch,
    ContractionCheck, EnrichedCertificate, Provenance, SamplingConfig, ThetaEstimate, DEFAULT_B_GRID,
    DEFAULT_REFINE_STEPS,
};
use crate::error::{Error, Result};
use crate::mapping::{iterated, SelfMap};
use crate::scenario::{parse_scenario_str, BSpec, Mode, ScenarioConfig, ThetaSpec};
use crate::solver::{
    asymptotic_solve, krasnoselskij_solve, local_ball_solve, picard_solve, SolveConfig, SolveReport, SolveStatus,
};
use crate::space::SpaceElement;

pub const EXIT_CONVERGED: i32 = 0;
/// Configuration, I/O, and other internal errors.
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NOT_CERTIFIED: i32 = 2;
pub const EXIT_OSCILLATION: i32 = 3;
pub const EXIT_MAX_ITER: i32 = 4;
pub const EXIT_LEFT_DOMAIN: i32 = 5;

pub fn status_exit_code(status: SolveStatus) -> i32 {
    match status {
        SolveStatus::Converged => EXIT_CONVERGED,
        SolveStatus::PreconditionFailed => EXIT_NOT_CERTIFIED,
        SolveStatus::OscillationDetected => EXIT_OSCILLATION,
        SolveStatus::MaxIterExceeded => EXIT_MAX_ITER,
        SolveStatus::LeftDomain => EXIT_LEFT_DOMAIN,
    }
}

/// Exit code for a run that ended in an error instead of a report.
pub fn error_exit_code(err: &Error) -> i32 {
    match err {
        Error::NotCertifiable { .. } => EXIT_NOT_CERTIFIED,
        _ => EXIT_ERROR,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRun {
    pub report: SolveReport,
    /// Present when `b=auto` triggered a search.
    pub search: Option<BSearch>,
    pub exit_code: i32,
}

/// The map whose enrichment is certified: `T^N` in asymptotic mode, `T`
/// otherwise.
pub fn certified_map(cfg: &ScenarioConfig) -> Result<SelfMap> {
    let map = cfg.map.build()?;
    match cfg.mode {
        Mode::Asymptotic => iterated(map, cfg.n),
        _ => Ok(map),
    }
}

fn sampling(cfg: &ScenarioConfig) -> Result<SamplingConfig> {
    cfg.sampling.build(cfg.seed)
}

/// Certificate for the scenario's target map per its `b` / `theta` fields.
/// Picard mode always works at `b = 0`.
pub fn resolve(cfg: &ScenarioConfig) -> Result<(EnrichedCertificate, Option<BSearch>)> {
    let target = certified_map(cfg)?;
    let witnesses = cfg.witness_set()?;
    let sampling = sampling(cfg)?;
    let b = match (cfg.mode, cfg.b) {
        (Mode::Picard, _) => BSpec::Value(0.0),
        (_, b) => b,
    };
    match (b, cfg.theta) {
        (BSpec::Auto, _) => {
            let search = optimize_b(
                &target,
                &cfg.space,
                &witnesses,
                &DEFAULT_B_GRID,
                DEFAULT_REFINE_STEPS,
                &sampling,
            )?;
            Ok((search.certificate, Some(search)))
        }
        (BSpec::Value(b), ThetaSpec::Estimate) => {
            Ok((resolve_certificate(&target, b, &cfg.space, &witnesses, &sampling)?, None))
        }
        (BSpec::Value(b), ThetaSpec::Value(theta)) => Ok((certify(b, theta, Provenance::Asserted)?, None)),
    }
}

fn solve_config(cfg: &ScenarioConfig) -> Result<SolveConfig> {
    let mut solve = SolveConfig::new(cfg.tol, cfg.max_iter, cfg.witness_set()?);
    solve.seed = cfg.seed;
    solve.domain = cfg.domain.as_ref().map(|d| d.build()).transpose()?;
    Ok(solve)
}

/// Runs the scenario end to end. An uncertifiable `(b, theta)` surfaces as
/// `Err(Error::NotCertifiable)`; use [`error_exit_code`] for its exit code.
/// Picard mode without an asserted `theta` falls back to an uncertified run
/// when `b = 0` cannot be certified.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioRun> {
    cfg.validate()?;
    let map = cfg.map.build()?;
    let x0 = cfg.x0_element()?;
    let solve = solve_config(cfg)?;
    let space = &cfg.space;

    let (report, search) = match cfg.mode {
        Mode::Picard => {
            let resolved = match resolve(cfg) {
                Ok((cert, search)) => Some((cert, search)),
                Err(Error::NotCertifiable { .. }) if cfg.theta == ThetaSpec::Estimate => None,
                Err(e) => return Err(e),
            };
            let cert = resolved.as_ref().map(|r| r.0);
            let mut report = picard_solve(&map, &x0, &solve, space, cert.as_ref())?;
            if cert.is_none() {
                report
                    .diagnostics
                    .insert(0, "b = 0 is not certifiable; ran uncertified Picard iteration".to_string());
            }
            (report, resolved.and_then(|r| r.1))
        }
        Mode::Krasnoselskij => {
            let (cert, search) = resolve(cfg)?;
            (krasnoselskij_solve(&map, &cert, &x0, &solve, space)?, search)
        }
        Mode::Local => {
            let (cert, search) = resolve(cfg)?;
            let local = cfg
                .local
                .as_ref()
                .ok_or_else(|| Error::scenario("local", "mode=local requires a [local] block"))?;
            let u = SpaceElement::new(local.u.clone())?;
            (local_ball_solve(&map, &cert, &x0, &u, local.r, &solve, space)?, search)
        }
        Mode::Asymptotic => {
            let (cert, search) = resolve(cfg)?;
            (asymptotic_solve(&map, cfg.n, &cert, &x0, &solve, space)?, search)
        }
    };
    let exit_code = status_exit_code(report.status);
    Ok(ScenarioRun {
        report,
        search,
        exit_code,
    })
}

/// Estimation-only view of a scenario, as printed by `analyze`.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    /// `Some` when the target map tree is affine.
    pub closed_form_slope: Option<f64>,
    /// Sampled estimate at the requested `b` (non-affine maps, numeric `b`).
    pub estimate: Option<ThetaEstimate>,
    pub search: Option<BSearch>,
    pub certificate: std::result::Result<EnrichedCertificate, Error>,
    /// Sampled check of the averaged map, when certified.
    pub contraction: Option<ContractionCheck>,
}

pub fn analyze_scenario(cfg: &ScenarioConfig) -> Result<Analysis> {
    cfg.validate()?;
    let target = certified_map(cfg)?;
    let witnesses = cfg.witness_set()?;
    let sampling = sampling(cfg)?;
    let closed_form_slope = target.affine_form().map(|f| f.slope);
    let estimate = match (cfg.b, cfg.theta, closed_form_slope, cfg.mode) {
        (_, _, _, Mode::Picard) if closed_form_slope.is_none() && cfg.theta == ThetaSpec::Estimate => {
            Some(estimate_theta(&target, 0.0, &cfg.space, &witnesses, &sampling)?)
        }
        (BSpec::Value(b), ThetaSpec::Estimate, None, _) => {
            Some(estimate_theta(&target, b, &cfg.space, &witnesses, &sampling)?)
        }
        _ => None,
    };
    let (certificate, search) = match resolve(cfg) {
        Ok((cert, search)) => (Ok(cert), search),
        Err(e @ Error::NotCertifiable { .. }) => (Err(e), None),
        Err(e) => return Err(e),
    };
    let contraction = match &certificate {
        Ok(cert) => Some(verify_averaged_contraction(cert, &target, &cfg.space, &witnesses, &sampling)?),
        Err(_) => None,
    };
    Ok(Analysis {
        closed_form_slope,
        estimate,
        search,
        certificate,
        contraction,
    })
}

/// Renders an [`Analysis`] as `key=value` lines.
pub fn format_analysis(analysis: &Analysis) -> String {
    use crate::output::fmt_f64;
    let mut lines = Vec::new();
    match analysis.closed_form_slope {
        Some(c) => lines.push(format!("closed_form_slope={}", fmt_f64(c))),
        None => lines.push("closed_form_slope=none".to_string()),
    }
    if let Some(est) = &analysis.estimate {
        lines.push(format!("estimate_b={}", fmt_f64(est.b)));
        lines.push(format!("theta_hat={}", fmt_f64(est.theta_hat)));
        lines.push(format!("evaluated={}", est.evaluated));
        lines.push(format!("skipped_dependent={}", est.skipped_dependent));
        lines.push(format!("unbounded_flag={}", est.unbounded_flag));
    }
    if let Some(search) = &analysis.search {
        lines.push(format!("b_star={}", fmt_f64(search.b_star)));
        lines.push(format!("search_evaluations={}", search.evaluations.len()));
    }
    match &analysis.certificate {
        Ok(c) => {
            lines.push("certified=true".to_string());
            lines.push(format!("b={}", fmt_f64(c.b())));
            lines.push(format!("theta={}", fmt_f64(c.theta())));
            lines.push(format!("lambda={}", fmt_f64(c.lambda())));
            lines.push(format!("d={}", fmt_f64(c.d())));
            lines.push(format!("provenance={}", c.provenance()));
        }
        Err(e) => {
            lines.push("certified=false".to_string());
            lines.push(format!("reason={e}"));
        }
    }
    if let Some(check) = &analysis.contraction {
        lines.push(format!("contraction_check={}", if check.passed { "pass" } else { "fail" }));
        lines.push(format!("worst_averaged_ratio={}", fmt_f64(check.worst_ratio)));
    }
    let mut out = lines.join("\n");
    out.push('\n');
    out
}

pub const DEMO_NAMES: [&str; 3] = ["reflection", "picard-oscillation", "asymptotic-piecewise"];

const DEMO_REFLECTION: &str = "\
schema=1
# Tx = w - x with w = (2,0); averaging with b = 0.5 gives d = 1/3
mode=krasnoselskij
b=0.5
theta=estimate
x0=0,0

[space]
kind=cross2

[map]
kind=reflection
w=2,0
";

const DEMO_PICARD: &str = "\
schema=1
# plain Picard iteration on the reflection alternates between x0 and w - x0
mode=picard
b=0
theta=estimate
x0=0,0

[space]
kind=cross2

[map]
kind=reflection
w=2,0
";

const DEMO_ASYMPTOTIC: &str = "\
schema=1
# T sends points outside the cube to u and the rest to -u/3, so T^2 = -u/3
mode=asymptotic
n=2
b=1
theta=1
x0=5,5

[space]
kind=cross2

[map]
kind=piecewise
u=1,1
half_width=2
";

/// Source text of an embedded demo scenario.
pub fn demo_source(name: &str) -> Option<&'static str> {
    match name {
        "reflection" => Some(DEMO_REFLECTION),
        "picard-oscillation" => Some(DEMO_PICARD),
        "asymptotic-piecewise" => Some(DEMO_ASYMPTOTIC),
        _ => None,
    }
}

pub fn demo_scenario(name: &str) -> Result<ScenarioConfig> {
    let text = demo_source(name).ok_or_else(|| {
        Error::InvalidArgument(format!("unknown demo `{name}`; expected one of {}", DEMO_NAMES.join(", ")))
    })?;
    parse_scenario_str(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(text: &str) -> Result<ScenarioRun> {
        run_scenario(&parse_scenario_str(text).unwrap())
    }

    #[test]
    fn reflection_auto_finds_b_one() {
        let text = DEMO_REFLECTION.replace("b=0.5", "b=auto");
        let r = run(&text).unwrap();
        assert_eq!(r.exit_code, 0);
        let cert = r.report.certificate.unwrap();
        assert!((cert.b() - 1.0).abs() <= 0.01);
        assert!(cert.d() <= 1e-6);
        assert!((1..=2).contains(&r.report.iterations), "{}", r.report.iterations);
        assert!(r.search.is_some());
    }

    #[test]
    fn demos_exit_codes() {
        let codes: Vec<i32> = DEMO_NAMES
            .iter()
            .map(|n| run_scenario(&demo_scenario(n).unwrap()).unwrap().exit_code)
            .collect();
        assert_eq!(codes, vec![0, 3, 0]);
        let r = run_scenario(&demo_scenario("asymptotic-piecewise").unwrap()).unwrap();
        let x = r.report.x_star.unwrap();
        for c in x.coords() {
            assert!((c + 1.0 / 3.0).abs() <= 1e-9);
        }
        assert!(demo_scenario("nope").is_err());
    }

    #[test]
    fn asserted_theta_above_b_plus_one_exits_two() {
        let text = DEMO_REFLECTION.replace("b=0.5", "b=0.1").replace("theta=estimate", "theta=1.2");
        let err = run(&text).unwrap_err();
        assert_eq!(error_exit_code(&err), EXIT_NOT_CERTIFIED);
        let ok = DEMO_REFLECTION.replace("b=0.5", "b=0.1").replace("theta=estimate", "theta=0.5");
        assert!(run(&ok).is_ok());
    }

    #[test]
    fn local_mode_exit_codes() {
        let base = DEMO_REFLECTION
            .replace("mode=krasnoselskij", "mode=local")
            .replace("b=0.5", "b=1")
            .replace("theta=estimate", "theta=0");
        let accept = run(&format!("{base}\n[local]\nu=0,1\nr=2\n")).unwrap();
        assert_eq!(accept.exit_code, 0);
        assert!(accept.report.local.unwrap().invariant_holds);
        let reject = run(&format!("{base}\n[local]\nu=0,1\nr=0.5\n")).unwrap();
        assert_eq!(reject.exit_code, EXIT_NOT_CERTIFIED);
        assert_eq!(reject.report.status, SolveStatus::PreconditionFailed);
    }

    #[test]
    fn left_domain_and_max_iter_codes() {
        let boxed = format!("{DEMO_REFLECTION}\n[domain]\nkind=box\nlo=-1,-1\nhi=0.5,1\n");
        assert_eq!(run(&boxed).unwrap().exit_code, EXIT_LEFT_DOMAIN);
        let short = DEMO_REFLECTION.replace("x0=0,0", "x0=0,0\nmax_iter=3");
        assert_eq!(run(&short).unwrap().exit_code, EXIT_MAX_ITER);
    }

    #[test]
    fn analyze_reports_closed_form() {
        let cfg = demo_scenario("reflection").unwrap();
        let a = analyze_scenario(&cfg).unwrap();
        assert_eq!(a.closed_form_slope, Some(-1.0));
        assert!(a.contraction.as_ref().unwrap().passed);
        let text = format_analysis(&a);
        assert!(text.contains("d=3.3333333333333331e-1"), "{text}");
        let picard = analyze_scenario(&demo_scenario("picard-oscillation").unwrap()).unwrap();
        assert!(picard.certificate.is_err());
        assert!(format_analysis(&picard).contains("certified=false"));
    }
}
