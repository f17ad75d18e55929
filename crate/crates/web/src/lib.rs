//! Browser bindings for the enriched-contraction solver. Each export has a
//! plain Rust twin so the logic is testable off the wasm target.

use enriched::analyzer::{certify, theta_scalar_affine, Provenance};
use enriched::mapping::SelfMap;
use enriched::output::write_report;
use enriched::runner::{error_exit_code, run_scenario};
use enriched::scenario::parse_scenario_str;
use enriched::solver::{krasnoselskij_solve, SolveConfig};
use enriched::space::{SpaceElement, TwoNormSpace, WitnessSet};
use wasm_bindgen::prelude::*;

/// Columns per row returned by [`reflection_trace`].
pub const TRACE_STRIDE: usize = 5;

/// Krasnoselskij trace of `Tx = w - x` on the plane with `theta = |b - 1|`.
/// Flattened rows of `[n, x_0, x_1, step_residual, apriori_bound]`.
pub fn reflection_trace_rows(w: [f64; 2], b: f64, x0: [f64; 2], max_iter: usize) -> Result<Vec<f64>, String> {
    let space = TwoNormSpace::cross2();
    let map = SelfMap::reflection(SpaceElement::new(w.to_vec()).map_err(|e| e.to_string())?);
    let cert = certify(b, theta_scalar_affine(-1.0, b), Provenance::ClosedForm).map_err(|e| e.to_string())?;
    let cfg = SolveConfig::new(1e-10, max_iter.max(1), WitnessSet::standard_basis(2));
    let x0 = SpaceElement::new(x0.to_vec()).map_err(|e| e.to_string())?;
    let report = krasnoselskij_solve(&map, &cert, &x0, &cfg, &space).map_err(|e| e.to_string())?;
    Ok(report
        .trace
        .rows()
        .iter()
        .flat_map(|r| {
            [
                r.n as f64,
                r.x.coords()[0],
                r.x.coords()[1],
                r.step_residual,
                r.apriori_bound.unwrap_or(f64::NAN),
            ]
        })
        .collect())
}

#[wasm_bindgen]
pub fn reflection_trace(w0: f64, w1: f64, b: f64, x0: f64, x1: f64, max_iter: usize) -> Result<Vec<f64>, JsError> {
    reflection_trace_rows([w0, w1], b, [x0, x1], max_iter).map_err(|e| JsError::new(&e))
}

/// `d(b) = |b + c| / (b + 1)` at `points` evenly spaced `b` in `[0, b_max]`,
/// flattened as `[b, d, b, d, ..]`.
#[wasm_bindgen]
pub fn contraction_curve(c: f64, b_max: f64, points: usize) -> Vec<f64> {
    let points = points.max(2);
    (0..points)
        .flat_map(|i| {
            let b = b_max * i as f64 / (points - 1) as f64;
            [b, theta_scalar_affine(c, b) / (b + 1.0)]
        })
        .collect()
}

/// Parses and runs a scenario, returning `exit_code=..` followed by the
/// report, or the error message.
pub fn run_scenario_report(text: &str) -> String {
    let cfg = match parse_scenario_str(text) {
        Ok(cfg) => cfg,
        Err(e) => return format!("exit_code={}\nerror: {e}\n", error_exit_code(&e)),
    };
    match run_scenario(&cfg) {
        Ok(run) => {
            let mut buf = format!("exit_code={}\n", run.exit_code).into_bytes();
            if let Err(e) = write_report(&run.report, &mut buf) {
                return format!("exit_code=1\nerror: {e}\n");
            }
            String::from_utf8(buf).unwrap_or_default()
        }
        Err(e) => format!("exit_code={}\nerror: {e}\n", error_exit_code(&e)),
    }
}

#[wasm_bindgen]
pub fn run_scenario_text(text: &str) -> String {
    run_scenario_report(text)
}
