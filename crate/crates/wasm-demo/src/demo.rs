//! The demo's pipeline glue, kept free of browser types so it can be unit
//! tested on any target. Inputs and outputs are plain strings: rule text,
//! traffic text (one packet per line), and JSON results.

use std::num::NonZeroUsize;

use serde::Serialize;

use apnfa_core::cost::CostModel;
use apnfa_core::evaluate;
use apnfa_core::labelling::label;
use apnfa_core::nfa::Nfa;
use apnfa_core::pareto::{self, SweepGrid};
use apnfa_core::planner::{self, GbpsRate, Objective, PlanOutcome, PlanProblem, StageCount};
use apnfa_core::reduce::{self, ReductionMethod};
use apnfa_core::rules::{compile_ruleset, CompileOptions, RuleSet};
use apnfa_core::traffic::TrafficSample;

use crate::svg;

/// Above this size the automaton drawing is replaced by a note.
const SVG_STATE_CAP: usize = 150;

/// Rule text: either `id<TAB>pattern` lines or bare patterns (ids are
/// generated); `#` lines are comments.
pub fn parse_rules(text: &str) -> Result<RuleSet, String> {
    let mut rules = RuleSet::new();
    let mut auto = 0usize;
    for raw in text.lines() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let (id, pattern) = match line.split_once('\t') {
            Some((id, pattern)) => (id.trim().to_string(), pattern.to_string()),
            None => {
                auto += 1;
                (format!("r{auto}"), line.to_string())
            }
        };
        rules.push(id, pattern).map_err(|e| e.to_string())?;
    }
    if rules.is_empty() {
        return Err("no rules given".to_string());
    }
    Ok(rules)
}

/// Traffic text: one packet per line, taken literally; blank lines are
/// skipped and repeated lines accumulate.
pub fn parse_traffic(text: &str) -> Result<TrafficSample, String> {
    let mut sample = TrafficSample::new();
    for raw in text.lines() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.is_empty() {
            continue;
        }
        sample.insert(line.as_bytes().to_vec(), 1);
    }
    if sample.is_empty() {
        return Err("no traffic given (one packet per line)".to_string());
    }
    Ok(sample)
}

fn compile(rules_text: &str) -> Result<Nfa, String> {
    let rules = parse_rules(rules_text)?;
    compile_ruleset(&rules, &CompileOptions::default()).map_err(|e| e.to_string())
}

fn nfa_svg(nfa: &Nfa, labeling: Option<&apnfa_core::Labeling>) -> Option<String> {
    (nfa.num_states() <= SVG_STATE_CAP).then(|| svg::render_nfa(nfa, labeling))
}

#[derive(Serialize)]
struct ReducePreview {
    method: String,
    states_before: usize,
    states_after: usize,
    ratio_achieved: f64,
    error_bound: Option<u64>,
    ap: f64,
    prob: f64,
    precise_prob: f64,
    sample_packets: u64,
    svg_before: Option<String>,
    svg_after: Option<String>,
}

/// Compile, label, reduce with the given parameters, evaluate against the
/// precise automaton, and render before/after drawings.
pub fn reduce_preview(
    rules_text: &str,
    traffic_text: &str,
    method: &str,
    theta: f64,
    distance_ceiling: f64,
    frequency_ceiling: f64,
) -> Result<String, String> {
    let method: ReductionMethod = method.parse()?;
    let precise = compile(rules_text)?;
    let sample = parse_traffic(traffic_text)?;
    let labeling = label(&precise, &sample);
    let (reduced, report) = match method {
        ReductionMethod::Prune => reduce::prune(&precise, &labeling, theta),
        ReductionMethod::Merge => {
            reduce::merge(&precise, &labeling, distance_ceiling, frequency_ceiling)
        }
        ReductionMethod::MergePrune => reduce::merge_prune(
            &precise,
            &labeling,
            distance_ceiling,
            frequency_ceiling,
            theta,
        ),
        ReductionMethod::Bfs => reduce::bfs_reduce(&precise, theta),
    }
    .map_err(|e| e.to_string())?;
    let eval = evaluate::evaluate(&precise, &reduced, &sample).map_err(|e| e.to_string())?;
    let reduced_labeling = label(&reduced, &sample);
    let preview = ReducePreview {
        method: method.to_string(),
        states_before: report.states_before,
        states_after: report.states_after,
        ratio_achieved: report.ratio_achieved,
        error_bound: report.error_bound,
        ap: eval.ap,
        prob: eval.prob,
        precise_prob: evaluate::estimate_accept_prob(&precise, &sample)
            .map_err(|e| e.to_string())?,
        sample_packets: sample.total_packets(),
        svg_before: nfa_svg(&precise, Some(&labeling)),
        svg_after: nfa_svg(&reduced, Some(&reduced_labeling)),
    };
    serde_json::to_string(&preview).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct SweepRow {
    id: String,
    states: usize,
    cost: f64,
    ap: f64,
    prob: f64,
    on_frontier: bool,
}

#[derive(Serialize)]
struct SweepResult {
    rows: Vec<SweepRow>,
    csv: String,
    svg: String,
}

fn parse_f64_list(text: &str, what: &str) -> Result<Vec<f64>, String> {
    let values: Result<Vec<f64>, _> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect();
    values.map_err(|_| format!("invalid {what} list `{text}`"))
}

/// Sweeps the grid, Pareto-filters on (cost, prob), and renders the scatter
/// plot. The precise automaton is always included as a candidate.
pub fn pareto_sweep(
    rules_text: &str,
    traffic_text: &str,
    methods_text: &str,
    thetas_text: &str,
    distances_text: &str,
    frequencies_text: &str,
) -> Result<String, String> {
    let precise = compile(rules_text)?;
    let sample = parse_traffic(traffic_text)?;
    let labeling = label(&precise, &sample);
    let methods: Result<Vec<ReductionMethod>, String> = methods_text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect();
    let grid = SweepGrid {
        methods: methods?,
        thetas: parse_f64_list(thetas_text, "theta")?,
        distance_ceilings: parse_f64_list(distances_text, "distance ceiling")?,
        frequency_ceilings: parse_f64_list(frequencies_text, "frequency ceiling")?,
    };
    let cost_model = CostModel::default();
    let outcomes = pareto::sweep(
        &precise,
        &labeling,
        &sample,
        &cost_model,
        &grid,
        NonZeroUsize::MIN,
    )
    .map_err(|e| e.to_string())?;
    let mut rows: Vec<pareto::CandidateRow> = outcomes.into_iter().map(|o| o.row).collect();
    rows.push(pareto::precise_row(&precise, &sample, &cost_model).map_err(|e| e.to_string())?);
    let mut frontier = pareto::pareto_filter(&rows);
    if !frontier.iter().any(|r| r.id == "precise") {
        frontier.push(rows.last().unwrap().clone());
    }
    let on_frontier = |id: &str| frontier.iter().any(|r| r.id == id);
    let points: Vec<(String, f64, f64, bool)> = rows
        .iter()
        .map(|r| (r.id.clone(), r.cost, r.prob, on_frontier(&r.id)))
        .collect();
    let result = SweepResult {
        rows: rows
            .iter()
            .map(|r| SweepRow {
                id: r.id.clone(),
                states: r.states,
                cost: r.cost,
                ap: r.ap,
                prob: r.prob,
                on_frontier: on_frontier(&r.id),
            })
            .collect(),
        csv: pareto::format_candidates_csv(&frontier),
        svg: svg::render_scatter(&points),
    };
    serde_json::to_string(&result).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct PlanResult {
    outcome: PlanOutcome,
    table: Option<String>,
}

/// Solves a stage plan from a candidate CSV (as produced by the sweep).
pub fn solve_plan(
    candidates_csv: &str,
    input_rate_gbps: f64,
    throughput_gbps: f64,
    stages: u32,
    exact_stages: bool,
    objective: &str,
    bound: f64,
) -> Result<String, String> {
    let rows = pareto::parse_candidates_csv(candidates_csv).map_err(|e| e.to_string())?;
    let candidates = rows
        .iter()
        .map(|r| r.to_planner_candidate())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let objective = match objective {
        "opt-rsc" => Objective::MinResources {
            max_output: GbpsRate::from_f64(bound).map_err(|e| e.to_string())?,
        },
        "opt-out" => Objective::MinOutput { max_luts: bound },
        other => return Err(format!("unknown objective `{other}`")),
    };
    let problem = PlanProblem {
        candidates,
        input_rate: GbpsRate::from_f64(input_rate_gbps).map_err(|e| e.to_string())?,
        engine_throughput: GbpsRate::from_f64(throughput_gbps).map_err(|e| e.to_string())?,
        stages: if exact_stages {
            StageCount::Exact(stages)
        } else {
            StageCount::UpTo(stages)
        },
        objective,
    };
    let outcome = planner::solve(&problem).map_err(|e| e.to_string())?;
    let table = match &outcome {
        PlanOutcome::Feasible { plan } => Some(planner::format_plan_table(plan)),
        PlanOutcome::Infeasible { .. } => None,
    };
    serde_json::to_string(&PlanResult { outcome, table }).map_err(|e| e.to_string())
}
