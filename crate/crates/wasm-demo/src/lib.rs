//! Browser bindings for the demo page: three interactive operations over
//! the reduction pipeline, all taking and returning plain strings (JSON for
//! structured results). The heavy lifting lives in [`demo`], which is
//! target-independent.

use wasm_bindgen::prelude::*;

pub mod demo;
pub mod svg;

/// Compile the rules, label over the traffic, apply one reduction, and
/// report metrics plus before/after SVG drawings.
#[wasm_bindgen]
pub fn reduce_preview(
    rules: &str,
    traffic: &str,
    method: &str,
    theta: f64,
    distance_ceiling: f64,
    frequency_ceiling: f64,
) -> Result<String, JsError> {
    demo::reduce_preview(
        rules,
        traffic,
        method,
        theta,
        distance_ceiling,
        frequency_ceiling,
    )
    .map_err(|e| JsError::new(&e))
}

/// Sweep the reduction grid and return candidate rows, the Pareto-filtered
/// candidate CSV, and a scatter plot SVG.
#[wasm_bindgen]
pub fn pareto_sweep(
    rules: &str,
    traffic: &str,
    methods: &str,
    thetas: &str,
    distance_ceilings: &str,
    frequency_ceilings: &str,
) -> Result<String, JsError> {
    demo::pareto_sweep(
        rules,
        traffic,
        methods,
        thetas,
        distance_ceilings,
        frequency_ceilings,
    )
    .map_err(|e| JsError::new(&e))
}

/// Solve the multi-stage configuration problem over a candidate CSV.
#[wasm_bindgen]
pub fn solve_plan(
    candidates_csv: &str,
    input_rate_gbps: f64,
    throughput_gbps: f64,
    stages: u32,
    exact_stages: bool,
    objective: &str,
    bound: f64,
) -> Result<String, JsError> {
    demo::solve_plan(
        candidates_csv,
        input_rate_gbps,
        throughput_gbps,
        stages,
        exact_stages,
        objective,
        bound,
    )
    .map_err(|e| JsError::new(&e))
}
