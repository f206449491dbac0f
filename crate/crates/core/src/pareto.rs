//! Parameter sweeps over the reduction grid and Pareto filtering of the
//! resulting candidates on (cost, acceptance probability), both minimized.
//!
//! Each grid point reduces the precise automaton, evaluates it on the
//! testing sample, attaches a LUT cost, and yields one candidate row. The
//! dominance-filtered rows form the candidate set handed to the stage
//! planner: lower cost means more replicas fit, lower acceptance probability
//! means less traffic for the next stage.

use std::num::NonZeroUsize;

use thiserror::Error;

use crate::cost::CostModel;
use crate::evaluate::{self, EvalError};
use crate::labelling::Labeling;
use crate::nfa::Nfa;
use crate::ratio::Ratio;
use crate::reduce::{self, ReduceError, ReductionMethod, ReductionReport};
use crate::traffic::TrafficSample;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("sweep grid is empty")]
    EmptyGrid,
    #[error("candidates csv line {line}: {msg}")]
    Csv { line: usize, msg: String },
}

/// Parameter grid for a sweep. Methods consume the axes they use: pruning
/// and the bfs baseline read θ, merging reads the ceilings, merge-prune
/// reads all three.
#[derive(Clone, Debug)]
pub struct SweepGrid {
    pub methods: Vec<ReductionMethod>,
    pub thetas: Vec<f64>,
    pub distance_ceilings: Vec<f64>,
    pub frequency_ceilings: Vec<f64>,
}

/// One grid point, expanded.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridPoint {
    pub method: ReductionMethod,
    pub theta: Option<f64>,
    pub distance_ceiling: Option<f64>,
    pub frequency_ceiling: Option<f64>,
}

impl SweepGrid {
    pub fn points(&self) -> Vec<GridPoint> {
        let mut out = Vec::new();
        for &method in &self.methods {
            match method {
                ReductionMethod::Prune | ReductionMethod::Bfs => {
                    for &theta in &self.thetas {
                        out.push(GridPoint {
                            method,
                            theta: Some(theta),
                            distance_ceiling: None,
                            frequency_ceiling: None,
                        });
                    }
                }
                ReductionMethod::Merge => {
                    for &d in &self.distance_ceilings {
                        for &f in &self.frequency_ceilings {
                            out.push(GridPoint {
                                method,
                                theta: None,
                                distance_ceiling: Some(d),
                                frequency_ceiling: Some(f),
                            });
                        }
                    }
                }
                ReductionMethod::MergePrune => {
                    for &theta in &self.thetas {
                        for &d in &self.distance_ceilings {
                            for &f in &self.frequency_ceilings {
                                out.push(GridPoint {
                                    method,
                                    theta: Some(theta),
                                    distance_ceiling: Some(d),
                                    frequency_ceiling: Some(f),
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// One evaluated candidate: the CSV row behind both the sweep output and
/// the planner input.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateRow {
    pub id: String,
    pub method: String,
    pub theta: Option<f64>,
    pub distance_ceiling: Option<f64>,
    pub frequency_ceiling: Option<f64>,
    pub states: usize,
    /// LUT estimate (the planner's lut).
    pub cost: f64,
    pub ap: f64,
    /// Acceptance probability on the testing sample (the planner's accpt).
    pub prob: f64,
}

/// A sweep outcome: the row plus the artifacts behind it.
#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub row: CandidateRow,
    pub nfa: Nfa,
    pub report: ReductionReport,
}

fn point_id(point: &GridPoint) -> String {
    let mut id = point.method.to_string();
    if let Some(theta) = point.theta {
        id.push_str(&format!("-t{theta}"));
    }
    if let Some(d) = point.distance_ceiling {
        id.push_str(&format!("-d{d}"));
    }
    if let Some(f) = point.frequency_ceiling {
        id.push_str(&format!("-f{f}"));
    }
    id
}

fn run_point(
    nfa: &Nfa,
    labeling: &Labeling,
    test: &TrafficSample,
    cost_model: &CostModel,
    point: &GridPoint,
) -> Result<SweepOutcome, SweepError> {
    let (reduced, report) = match point.method {
        ReductionMethod::Prune => reduce::prune(nfa, labeling, point.theta.unwrap())?,
        ReductionMethod::Bfs => reduce::bfs_reduce(nfa, point.theta.unwrap())?,
        ReductionMethod::Merge => reduce::merge(
            nfa,
            labeling,
            point.distance_ceiling.unwrap(),
            point.frequency_ceiling.unwrap(),
        )?,
        ReductionMethod::MergePrune => reduce::merge_prune(
            nfa,
            labeling,
            point.distance_ceiling.unwrap(),
            point.frequency_ceiling.unwrap(),
            point.theta.unwrap(),
        )?,
    };
    let eval = evaluate::evaluate(nfa, &reduced, test)?;
    let id = point_id(point);
    let cost = cost_model.lut_estimate(Some(&id), &reduced);
    Ok(SweepOutcome {
        row: CandidateRow {
            id,
            method: point.method.to_string(),
            theta: point.theta,
            distance_ceiling: point.distance_ceiling,
            frequency_ceiling: point.frequency_ceiling,
            states: reduced.num_states(),
            cost,
            ap: eval.ap,
            prob: eval.prob,
        },
        nfa: reduced,
        report,
    })
}

/// Runs every grid point, in grid order. Points are dispatched to `workers`
/// threads; the output order and contents do not depend on the worker count.
pub fn sweep(
    nfa: &Nfa,
    labeling: &Labeling,
    test: &TrafficSample,
    cost_model: &CostModel,
    grid: &SweepGrid,
    workers: NonZeroUsize,
) -> Result<Vec<SweepOutcome>, SweepError> {
    let points = grid.points();
    if points.is_empty() {
        return Err(SweepError::EmptyGrid);
    }
    let workers = workers.get().min(points.len());
    if workers <= 1 {
        return points
            .iter()
            .map(|p| run_point(nfa, labeling, test, cost_model, p))
            .collect();
    }
    let chunk_len = points.len().div_ceil(workers);
    let mut results: Vec<Result<SweepOutcome, SweepError>> = Vec::with_capacity(points.len());
    std::thread::scope(|scope| {
        let handles: Vec<_> = points
            .chunks(chunk_len)
            .map(|chunk| {
                scope.spawn(move || {
                    chunk
                        .iter()
                        .map(|p| run_point(nfa, labeling, test, cost_model, p))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for handle in handles {
            results.extend(handle.join().expect("sweep worker panicked"));
        }
    });
    results.into_iter().collect()
}

/// The precise automaton as a candidate row (the planner's last stage).
pub fn precise_row(
    nfa: &Nfa,
    test: &TrafficSample,
    cost_model: &CostModel,
) -> Result<CandidateRow, SweepError> {
    let prob = evaluate::estimate_accept_prob(nfa, test)?;
    Ok(CandidateRow {
        id: "precise".to_string(),
        method: "precise".to_string(),
        theta: None,
        distance_ceiling: None,
        frequency_ceiling: None,
        states: nfa.num_states(),
        cost: cost_model.lut_estimate(Some("precise"), nfa),
        ap: 1.0,
        prob,
    })
}

/// `a` dominates `b` when it is no worse on both axes and better on one.
fn dominates(a: &CandidateRow, b: &CandidateRow) -> bool {
    a.cost <= b.cost && a.prob <= b.prob && (a.cost < b.cost || a.prob < b.prob)
}

/// Keeps the rows not dominated on (cost, prob); input order is preserved.
pub fn pareto_filter(rows: &[CandidateRow]) -> Vec<CandidateRow> {
    rows.iter()
        .filter(|row| !rows.iter().any(|other| dominates(other, row)))
        .cloned()
        .collect()
}

fn opt_f64(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

/// Candidate CSV: `id,method,theta,d,f,states,cost,ap,prob` with empty
/// fields for parameters a method does not use.
pub fn format_candidates_csv(rows: &[CandidateRow]) -> String {
    let mut out = String::from("id,method,theta,d,f,states,cost,ap,prob\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            row.id,
            row.method,
            opt_f64(row.theta),
            opt_f64(row.distance_ceiling),
            opt_f64(row.frequency_ceiling),
            row.states,
            row.cost,
            row.ap,
            row.prob
        ));
    }
    out
}

pub fn parse_candidates_csv(input: &str) -> Result<Vec<CandidateRow>, SweepError> {
    let mut rows = Vec::new();
    for (idx, raw) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("id,") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(SweepError::Csv {
                line: line_no,
                msg: format!("expected 9 fields, found {}", fields.len()),
            });
        }
        let parse_opt = |s: &str, what: &str| -> Result<Option<f64>, SweepError> {
            if s.is_empty() {
                return Ok(None);
            }
            s.parse().map(Some).map_err(|_| SweepError::Csv {
                line: line_no,
                msg: format!("invalid {what} `{s}`"),
            })
        };
        let parse_f64 = |s: &str, what: &str| -> Result<f64, SweepError> {
            s.parse().map_err(|_| SweepError::Csv {
                line: line_no,
                msg: format!("invalid {what} `{s}`"),
            })
        };
        rows.push(CandidateRow {
            id: fields[0].to_string(),
            method: fields[1].to_string(),
            theta: parse_opt(fields[2], "theta")?,
            distance_ceiling: parse_opt(fields[3], "distance ceiling")?,
            frequency_ceiling: parse_opt(fields[4], "frequency ceiling")?,
            states: fields[5].parse().map_err(|_| SweepError::Csv {
                line: line_no,
                msg: format!("invalid state count `{}`", fields[5]),
            })?,
            cost: parse_f64(fields[6], "cost")?,
            ap: parse_f64(fields[7], "ap")?,
            prob: parse_f64(fields[8], "prob")?,
        });
    }
    Ok(rows)
}

impl CandidateRow {
    /// Converts the row into a planner candidate. The automaton reference
    /// follows the sweep's artifact naming (`<id>.nfa`).
    pub fn to_planner_candidate(&self) -> Result<crate::planner::Candidate, SweepError> {
        Ok(crate::planner::Candidate {
            id: self.id.clone(),
            lut: self.cost,
            accpt: Ratio::from_f64(self.prob).map_err(|e| SweepError::Csv {
                line: 0,
                msg: format!("candidate `{}`: {e}", self.id),
            })?,
            nfa: Some(format!("{}.nfa", self.id)),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::byteclass::ByteClass;
    use crate::labelling::label;

    fn branch_example() -> Nfa {
        let a = ByteClass::single(b'a');
        let b = ByteClass::single(b'b');
        Nfa::new(
            5,
            0,
            [3, 4],
            [(0, 1, a), (1, 1, a), (1, 2, b), (2, 4, b), (1, 3, a)],
        )
        .unwrap()
    }

    fn test_sample() -> TrafficSample {
        [
            (b"aab".to_vec(), 1),
            (b"aa".to_vec(), 1),
            (b"ab".to_vec(), 1),
            (b"bbb".to_vec(), 1),
        ]
        .into_iter()
        .collect()
    }

    fn prune_grid(thetas: &[f64]) -> SweepGrid {
        SweepGrid {
            methods: vec![ReductionMethod::Prune],
            thetas: thetas.to_vec(),
            distance_ceilings: vec![],
            frequency_ceilings: vec![],
        }
    }

    #[test]
    fn sweep_runs_grid_in_order() {
        let nfa = branch_example();
        let labeling = label(&nfa, &test_sample());
        let grid = prune_grid(&[0.2, 0.5, 1.0]);
        let outcomes = sweep(
            &nfa,
            &labeling,
            &test_sample(),
            &CostModel::default(),
            &grid,
            NonZeroUsize::new(1).unwrap(),
        )
        .unwrap();
        assert_eq!(outcomes.len(), 3);
        assert_eq!(outcomes[0].row.theta, Some(0.2));
        assert_eq!(outcomes[2].row.states, 5);
        // identical results regardless of worker count
        let parallel = sweep(
            &nfa,
            &labeling,
            &test_sample(),
            &CostModel::default(),
            &grid,
            NonZeroUsize::new(4).unwrap(),
        )
        .unwrap();
        let rows: Vec<_> = outcomes.iter().map(|o| o.row.clone()).collect();
        let prows: Vec<_> = parallel.iter().map(|o| o.row.clone()).collect();
        assert_eq!(rows, prows);
    }

    #[test]
    fn pareto_filter_drops_dominated() {
        let mk = |id: &str, cost: f64, prob: f64| CandidateRow {
            id: id.to_string(),
            method: "prune".to_string(),
            theta: None,
            distance_ceiling: None,
            frequency_ceiling: None,
            states: 1,
            cost,
            ap: 1.0,
            prob,
        };
        let rows = vec![
            mk("cheap-leaky", 10.0, 0.9),
            mk("mid", 50.0, 0.5),
            mk("dominated", 60.0, 0.6),
            mk("precise", 100.0, 0.1),
        ];
        let kept = pareto_filter(&rows);
        let ids: Vec<&str> = kept.iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, vec!["cheap-leaky", "mid", "precise"]);
        // the frontier is itself dominance-free
        let again = pareto_filter(&kept);
        assert_eq!(again, kept);
    }

    #[test]
    fn csv_roundtrip() {
        let nfa = branch_example();
        let labeling = label(&nfa, &test_sample());
        let outcomes = sweep(
            &nfa,
            &labeling,
            &test_sample(),
            &CostModel::default(),
            &prune_grid(&[0.5, 1.0]),
            NonZeroUsize::new(1).unwrap(),
        )
        .unwrap();
        let rows: Vec<_> = outcomes.into_iter().map(|o| o.row).collect();
        let csv = format_candidates_csv(&rows);
        let back = parse_candidates_csv(&csv).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn grid_points_expand_per_method() {
        let grid = SweepGrid {
            methods: vec![
                ReductionMethod::Prune,
                ReductionMethod::Merge,
                ReductionMethod::MergePrune,
            ],
            thetas: vec![0.3, 0.6],
            distance_ceilings: vec![1.5, 2.0],
            frequency_ceilings: vec![0.1],
        };
        // prune: 2, merge: 2*1, merge-prune: 2*2*1
        assert_eq!(grid.points().len(), 2 + 2 + 4);
    }

    #[test]
    fn planner_candidate_conversion() {
        let row = CandidateRow {
            id: "x".into(),
            method: "prune".into(),
            theta: Some(0.5),
            distance_ceiling: None,
            frequency_ceiling: None,
            states: 3,
            cost: 56.5,
            ap: 1.0,
            prob: 0.25,
        };
        let candidate = row.to_planner_candidate().unwrap();
        assert_eq!(candidate.lut, 56.5);
        assert_eq!(candidate.accpt, Ratio::new(1, 4).unwrap());
    }
}
