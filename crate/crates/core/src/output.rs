//! CSV trace and key=value report writers.
//!
//! Floats are rendered with 17 significant digits (`3.3333333333333331e-1`),
//! which round-trips every `f64`. Lines end in LF.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::solver::{IterationTrace, SolveReport, SolveStatus};
use crate::space::{SpaceElement, WitnessSet};

/// 17 significant digits in scientific notation; `NaN` for absent values.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.16e}")
    }
}

fn fmt_point(x: &SpaceElement) -> String {
    x.coords().iter().map(|c| fmt_f64(*c)).collect::<Vec<_>>().join(",")
}

fn io_error(path: &Path, e: io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn write_to_path(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let file = File::create(path).map_err(|e| io_error(path, e))?;
    let mut out = BufWriter::new(file);
    body(&mut out)?;
    out.flush().map_err(|e| io_error(path, e))
}

fn stream_error(e: io::Error) -> Error {
    Error::Io {
        path: "<stream>".to_string(),
        message: e.to_string(),
    }
}

/// Header `n,x_0,..,step_residual,fixed_residual,apriori_bound,res_w0,..`,
/// then one row per iterate.
pub fn write_trace_csv<W: Write>(trace: &IterationTrace, witnesses: &WitnessSet, out: &mut W) -> Result<()> {
    let first = trace
        .rows()
        .first()
        .ok_or_else(|| Error::InvalidArgument("cannot write an empty trace".into()))?;
    let dim = first.x.dim();
    let k = witnesses.len();
    let mut header = vec!["n".to_string()];
    header.extend((0..dim).map(|i| format!("x_{i}")));
    header.extend(["step_residual", "fixed_residual", "apriori_bound"].map(String::from));
    header.extend((0..k).map(|j| format!("res_w{j}")));
    writeln!(out, "{}", header.join(",")).map_err(stream_error)?;

    for row in trace.rows() {
        if row.witness_steps.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: row.witness_steps.len(),
            });
        }
        let mut fields = vec![row.n.to_string()];
        fields.extend(row.x.coords().iter().map(|c| fmt_f64(*c)));
        fields.push(fmt_f64(row.step_residual));
        fields.push(fmt_f64(row.fixed_residual));
        fields.push(fmt_f64(row.apriori_bound.unwrap_or(f64::NAN)));
        fields.extend(row.witness_steps.iter().map(|s| fmt_f64(*s)));
        writeln!(out, "{}", fields.join(",")).map_err(stream_error)?;
    }
    Ok(())
}

pub fn emit_trace_csv(trace: &IterationTrace, witnesses: &WitnessSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    write_to_path(path, |out| write_trace_csv(trace, witnesses, out))
}

/// Machine-readable `key=value` lines, a blank line, then a human-readable
/// summary.
pub fn write_report<W: Write>(report: &SolveReport, out: &mut W) -> Result<()> {
    let mut lines = Vec::new();
    match report.period {
        Some(p) => lines.push(format!("status={} period={p}", report.status)),
        None => lines.push(format!("status={}", report.status)),
    }
    lines.push(format!("iterations={}", report.iterations));
    lines.push(format!(
        "x_star={}",
        report.x_star.as_ref().map_or("none".to_string(), fmt_point)
    ));
    if let Some(last) = report.trace.last() {
        lines.push(format!("final_step_residual={}", fmt_f64(last.step_residual)));
        lines.push(format!("final_fixed_residual={}", fmt_f64(last.fixed_residual)));
    }
    match &report.certificate {
        Some(c) => {
            lines.push(format!("b={}", fmt_f64(c.b())));
            lines.push(format!("theta={}", fmt_f64(c.theta())));
            lines.push(format!("lambda={}", fmt_f64(c.lambda())));
            lines.push(format!("d={}", fmt_f64(c.d())));
            lines.push(format!("provenance={}", c.provenance()));
        }
        None => lines.push("certificate=none".to_string()),
    }
    lines.push(format!(
        "worst_step_ratio={}",
        report.worst_step_ratio.map_or("none".to_string(), fmt_f64)
    ));
    lines.push(format!("bound_violations={}", report.bound_violations));
    if let Some(local) = &report.local {
        lines.push(format!("precondition_lhs={}", fmt_f64(local.lhs)));
        lines.push(format!("precondition_rhs={}", fmt_f64(local.rhs)));
        lines.push(format!("local_u={}", fmt_point(&local.u)));
        lines.push(format!("local_r={}", fmt_f64(local.radius)));
        lines.push(format!(
            "epsilon={}",
            local.epsilon.map_or("none".to_string(), fmt_f64)
        ));
        lines.push(format!("invariant_holds={}", local.invariant_holds));
    }
    for line in &lines {
        writeln!(out, "{line}").map_err(stream_error)?;
    }

    writeln!(out).map_err(stream_error)?;
    writeln!(out, "{}", summary_sentence(report)).map_err(stream_error)?;
    if let Some(c) = &report.certificate {
        writeln!(
            out,
            "Certificate: b = {}, theta = {}, lambda = {}, d = {} ({}).",
            c.b(),
            c.theta(),
            c.lambda(),
            c.d(),
            c.provenance()
        )
        .map_err(stream_error)?;
    }
    if let Some(local) = &report.local {
        let verdict = if local.lhs < local.rhs { "<" } else { "is not <" };
        writeln!(
            out,
            "Local precondition: {} {verdict} {}.",
            local.lhs, local.rhs
        )
        .map_err(stream_error)?;
        if let Some(eps) = local.epsilon {
            writeln!(
                out,
                "Iterates {} inside the ball of radius {eps} around x0.",
                if local.invariant_holds { "stayed" } else { "did not stay" }
            )
            .map_err(stream_error)?;
        }
    }
    for d in &report.diagnostics {
        writeln!(out, "note: {d}").map_err(stream_error)?;
    }
    Ok(())
}

fn summary_sentence(report: &SolveReport) -> String {
    match report.status {
        SolveStatus::Converged => format!(
            "Converged after {} iterations to ({}).",
            report.iterations,
            report
                .x_star
                .as_ref()
                .map(|x| x.coords().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", "))
                .unwrap_or_default()
        ),
        SolveStatus::OscillationDetected => format!(
            "Oscillation with period {} detected after {} iterations.",
            report.period.unwrap_or(0),
            report.iterations
        ),
        SolveStatus::MaxIterExceeded => format!("No convergence within {} iterations.", report.iterations),
        SolveStatus::LeftDomain => format!("Iterate left the domain after {} iterations.", report.iterations),
        SolveStatus::PreconditionFailed => "Precondition failed; no iterations were run.".to_string(),
    }
}

/// Writes the report to `path`, or to standard output when `path` is `None`.
pub fn emit_report(report: &SolveReport, path: Option<&Path>) -> Result<()> {
    match path {
        Some(path) => write_to_path(path, |out| write_report(report, out)),
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write_report(report, &mut lock)?;
            lock.flush().map_err(stream_error)
        }
    }
}
