//! Multi-stage matcher configuration.
//!
//! Given a set of candidate automata, each with a LUT cost and an acceptance
//! probability, assign one candidate per pipeline stage. A stage's output
//! rate is the unit input rate times its candidate's acceptance probability,
//! each stage is replicated enough times to absorb the previous stage's
//! output (`r_i = ⌈out_{i-1} / TP⌉`), and total resources are the summed
//! replicated LUTs. Two objectives are supported:
//!
//! * minimize total resources subject to an output-rate cap, and
//! * minimize the final output rate subject to a resource budget.
//!
//! The solver enumerates candidate assignments exhaustively (with
//! branch-and-bound pruning on partial resource sums), which is exact and
//! fast for the small candidate sets a reduction sweep produces. Acceptance
//! probabilities must be non-increasing along the pipeline: each stage is
//! meant to pass a superset of what the next one matches.
//!
//! Rates are handled in integer milli-Gbps and probabilities as exact
//! rationals, so replica ceilings like `⌈20 / 6.4⌉ = 4` never wobble with
//! floating-point rounding.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ratio::{Ratio, RatioError};

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("candidate list is empty")]
    NoCandidates,
    #[error("duplicate candidate id `{0}`")]
    DuplicateCandidate(String),
    #[error("candidate `{id}`: LUT cost must be positive, got {lut}")]
    BadLut { id: String, lut: f64 },
    #[error("candidate `{id}`: acceptance probability must be in [0,1]")]
    BadAccept { id: String },
    #[error("{what} must be positive")]
    NonPositive { what: &'static str },
    #[error("stage count must be at least 1")]
    NoStages,
    #[error("invalid bound: {what} must be positive")]
    InvalidBound { what: &'static str },
    #[error("invalid number: {0}")]
    Number(#[from] RatioError),
    #[error("problem file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// A traffic rate stored in integer milli-Gbps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct GbpsRate(u64);

impl GbpsRate {
    pub fn from_milli(milli: u64) -> Self {
        GbpsRate(milli)
    }

    /// Quantizes to 0.001 Gbps via the shortest decimal representation;
    /// exact for rates written with at most three decimals.
    pub fn from_f64(gbps: f64) -> Result<Self, RatioError> {
        let ratio = Ratio::from_f64(gbps)?;
        Ok(GbpsRate(ratio.mul_ceil(1000)))
    }

    pub fn milli(&self) -> u64 {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0 as f64 / 1000.0
    }
}

/// A reduced automaton offered to the planner: its id, LUT cost, and
/// acceptance probability on representative traffic.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub id: String,
    pub lut: f64,
    pub accpt: Ratio,
    /// Name or path of the automaton artifact this candidate refers to.
    pub nfa: Option<String>,
}

impl Candidate {
    pub fn new(id: impl Into<String>, lut: f64, accpt: Ratio) -> Self {
        Candidate {
            id: id.into(),
            lut,
            accpt,
            nfa: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageCount {
    /// Exactly this many stages.
    Exact(u32),
    /// Any number of stages from 1 up to this many; the solver picks.
    UpTo(u32),
}

impl StageCount {
    fn max(&self) -> u32 {
        match self {
            StageCount::Exact(n) | StageCount::UpTo(n) => *n,
        }
    }

    fn admits(&self, len: u32) -> bool {
        match self {
            StageCount::Exact(n) => len == *n,
            StageCount::UpTo(n) => len >= 1 && len <= *n,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub enum Objective {
    /// Minimise total resources subject to `out_n ≤ max_output`.
    MinResources { max_output: GbpsRate },
    /// Minimise `out_n` subject to `total resources ≤ max_luts`.
    MinOutput { max_luts: f64 },
}

#[derive(Clone, Debug)]
pub struct PlanProblem {
    pub candidates: Vec<Candidate>,
    /// out_0, the input rate of the first stage.
    pub input_rate: GbpsRate,
    /// TP, the throughput of one automaton instance.
    pub engine_throughput: GbpsRate,
    pub stages: StageCount,
    pub objective: Objective,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageChoice {
    pub candidate: String,
    pub replicas: u64,
    pub input_gbps: f64,
    pub output_gbps: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StagePlan {
    pub stages: Vec<StageChoice>,
    pub total_luts: f64,
    pub final_output_gbps: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum PlanOutcome {
    Feasible {
        plan: StagePlan,
    },
    /// No assignment satisfies the bound; names the binding constraint.
    Infeasible {
        binding: String,
    },
}

/// Exact evaluation of one assignment (indices into `problem.candidates`):
/// replica counts, per-stage rates, and total LUTs per the stage model.
pub fn plan_for_assignment(problem: &PlanProblem, assignment: &[usize]) -> StagePlan {
    let tp = problem.engine_throughput.milli() as u128;
    let out0 = problem.input_rate.milli() as u128;
    let mut stages = Vec::with_capacity(assignment.len());
    let mut total_luts = 0.0;
    // input of stage i as an exact rational (numerator, denominator) in milli-Gbps
    let (mut in_num, mut in_den): (u128, u128) = (out0, 1);
    let mut final_out = 0.0;
    for &choice in assignment {
        let candidate = &problem.candidates[choice];
        let replicas = in_num.div_ceil(in_den * tp) as u64;
        total_luts += replicas as f64 * candidate.lut;
        let out_num = out0 * candidate.accpt.num() as u128;
        let out_den = candidate.accpt.den() as u128;
        let input_gbps = in_num as f64 / in_den as f64 / 1000.0;
        let output_gbps = out_num as f64 / out_den as f64 / 1000.0;
        stages.push(StageChoice {
            candidate: candidate.id.clone(),
            replicas,
            input_gbps,
            output_gbps,
        });
        (in_num, in_den) = (out_num, out_den);
        final_out = output_gbps;
    }
    StagePlan {
        stages,
        total_luts,
        final_output_gbps: final_out,
    }
}

/// out_n of an assignment as an exact milli-Gbps rational.
fn final_output(problem: &PlanProblem, assignment: &[usize]) -> (u128, u128) {
    let out0 = problem.input_rate.milli() as u128;
    match assignment.last() {
        Some(&choice) => {
            let accpt = problem.candidates[choice].accpt;
            (out0 * accpt.num() as u128, accpt.den() as u128)
        }
        None => (out0, 1),
    }
}

fn validate(problem: &PlanProblem) -> Result<(), PlanError> {
    if problem.candidates.is_empty() {
        return Err(PlanError::NoCandidates);
    }
    let mut ids: Vec<&str> = problem.candidates.iter().map(|c| c.id.as_str()).collect();
    ids.sort_unstable();
    if let Some(dup) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(PlanError::DuplicateCandidate(dup[0].to_string()));
    }
    for c in &problem.candidates {
        if c.lut.is_nan() || c.lut <= 0.0 {
            return Err(PlanError::BadLut {
                id: c.id.clone(),
                lut: c.lut,
            });
        }
        if c.accpt > Ratio::ONE {
            return Err(PlanError::BadAccept { id: c.id.clone() });
        }
    }
    if problem.input_rate.milli() == 0 {
        return Err(PlanError::NonPositive { what: "input rate" });
    }
    if problem.engine_throughput.milli() == 0 {
        return Err(PlanError::NonPositive {
            what: "engine throughput",
        });
    }
    if problem.stages.max() == 0 {
        return Err(PlanError::NoStages);
    }
    match problem.objective {
        Objective::MinResources { max_output } => {
            if max_output.milli() == 0 {
                return Err(PlanError::InvalidBound {
                    what: "max output rate X",
                });
            }
        }
        Objective::MinOutput { max_luts } => {
            if max_luts.is_nan() || max_luts <= 0.0 {
                return Err(PlanError::InvalidBound {
                    what: "LUT budget Y",
                });
            }
        }
    }
    Ok(())
}

/// Candidate order used for tie-breaking: plans are compared on the
/// objective, then fewer stages, then lower final acceptance, then the
/// lexicographic candidate-id sequence.
struct Best {
    assignment: Vec<usize>,
    rsc: f64,
    out: (u128, u128),
}

fn out_cmp(a: (u128, u128), b: (u128, u128)) -> std::cmp::Ordering {
    (a.0 * b.1).cmp(&(b.0 * a.1))
}

fn id_sequence<'p>(problem: &'p PlanProblem, assignment: &[usize]) -> Vec<&'p str> {
    assignment
        .iter()
        .map(|&i| problem.candidates[i].id.as_str())
        .collect()
}

fn better(problem: &PlanProblem, challenger: &Best, incumbent: &Best) -> bool {
    let primary = match problem.objective {
        Objective::MinResources { .. } => challenger
            .rsc
            .partial_cmp(&incumbent.rsc)
            .expect("LUT sums are finite"),
        Objective::MinOutput { .. } => out_cmp(challenger.out, incumbent.out),
    };
    primary
        .then(challenger.assignment.len().cmp(&incumbent.assignment.len()))
        .then(out_cmp(challenger.out, incumbent.out))
        .then_with(|| {
            id_sequence(problem, &challenger.assignment)
                .cmp(&id_sequence(problem, &incumbent.assignment))
        })
        .is_lt()
}

/// Depth-first enumeration state: the problem, precomputed rates, and the
/// incumbent optimum.
struct Search<'a> {
    problem: &'a PlanProblem,
    tp: u128,
    out0: u128,
    n_max: u32,
    best: Option<Best>,
}

impl Search<'_> {
    fn feasible(&self, assignment: &[usize], rsc: f64) -> bool {
        match self.problem.objective {
            Objective::MinResources { max_output } => {
                let (num, den) = final_output(self.problem, assignment);
                num <= max_output.milli() as u128 * den
            }
            Objective::MinOutput { max_luts } => rsc <= max_luts,
        }
    }

    /// `in_rate` is the exact input rate of the next stage as a rational.
    fn dfs(&mut self, assignment: &mut Vec<usize>, in_rate: (u128, u128), rsc: f64) {
        if !assignment.is_empty() && self.problem.stages.admits(assignment.len() as u32) {
            let challenger = Best {
                assignment: assignment.clone(),
                rsc,
                out: final_output(self.problem, assignment),
            };
            if self.feasible(assignment, rsc)
                && self
                    .best
                    .as_ref()
                    .is_none_or(|incumbent| better(self.problem, &challenger, incumbent))
            {
                self.best = Some(challenger);
            }
        }
        if assignment.len() as u32 >= self.n_max {
            return;
        }
        let prev_accpt = assignment.last().map(|&i| self.problem.candidates[i].accpt);
        for idx in 0..self.problem.candidates.len() {
            let candidate = &self.problem.candidates[idx];
            // acceptance must not increase along the pipeline
            if prev_accpt.is_some_and(|prev| candidate.accpt > prev) {
                continue;
            }
            let replicas = in_rate.0.div_ceil(in_rate.1 * self.tp) as f64;
            let next_rsc = rsc + replicas * candidate.lut;
            // resource sums only grow: prune against the incumbent (for the
            // resource objective) or the budget (for the output objective)
            let cut = match self.problem.objective {
                Objective::MinResources { .. } => self
                    .best
                    .as_ref()
                    .is_some_and(|incumbent| next_rsc > incumbent.rsc),
                Objective::MinOutput { max_luts } => next_rsc > max_luts,
            };
            if cut {
                continue;
            }
            let out = (
                self.out0 * candidate.accpt.num() as u128,
                candidate.accpt.den() as u128,
            );
            assignment.push(idx);
            self.dfs(assignment, out, next_rsc);
            assignment.pop();
        }
    }
}

/// Solves the configuration problem by exhaustive enumeration over
/// assignments with non-increasing acceptance, pruning on partial resource
/// sums. Globally optimal for the given problem.
pub fn solve(problem: &PlanProblem) -> Result<PlanOutcome, PlanError> {
    validate(problem)?;
    let out0 = problem.input_rate.milli() as u128;
    let mut search = Search {
        problem,
        tp: problem.engine_throughput.milli() as u128,
        out0,
        n_max: problem.stages.max(),
        best: None,
    };
    search.dfs(&mut Vec::new(), (out0, 1), 0.0);

    match search.best {
        Some(best) => Ok(PlanOutcome::Feasible {
            plan: plan_for_assignment(problem, &best.assignment),
        }),
        None => {
            let binding = match problem.objective {
                Objective::MinResources { max_output } => format!(
                    "output cap: no candidate chain reaches out_n <= {} Gbps",
                    max_output.to_f64()
                ),
                Objective::MinOutput { max_luts } => {
                    format!("resource budget: no assignment fits within {max_luts} LUTs")
                }
            };
            Ok(PlanOutcome::Infeasible { binding })
        }
    }
}

/// Renders a plan as a fixed-width table, one row per stage.
pub fn format_plan_table(plan: &StagePlan) -> String {
    let mut out = String::from("stage  candidate        replicas    in_gbps   out_gbps\n");
    for (i, stage) in plan.stages.iter().enumerate() {
        writeln!(
            out,
            "{:<5}  {:<15}  {:>8}  {:>9.3}  {:>9.3}",
            i + 1,
            stage.candidate,
            stage.replicas,
            stage.input_gbps,
            stage.output_gbps
        )
        .unwrap();
    }
    writeln!(out, "total LUTs: {}", plan.total_luts).unwrap();
    out
}

// ---------------------------------------------------------------------------
// Problem files
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
struct CandidateWire {
    id: String,
    lut: f64,
    accpt: f64,
    #[serde(default)]
    nfa: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemWire {
    candidates: Vec<CandidateWire>,
    input_rate_gbps: f64,
    throughput_gbps: f64,
    stages: StageCount,
    objective: ObjectiveWire,
}

#[derive(Deserialize)]
#[serde(tag = "minimize", rename_all = "kebab-case")]
enum ObjectiveWire {
    Rsc { max_out_gbps: f64 },
    Out { max_luts: f64 },
}

impl PlanProblem {
    /// Parses the JSON problem file:
    ///
    /// ```json
    /// {
    ///   "candidates": [{"id": "A1", "lut": 100, "accpt": 0.5, "nfa": "a1.nfa"}],
    ///   "input_rate_gbps": 100,
    ///   "throughput_gbps": 6.4,
    ///   "stages": {"up_to": 3},
    ///   "objective": {"minimize": "rsc", "max_out_gbps": 10}
    /// }
    /// ```
    ///
    /// The per-candidate `nfa` reference is optional metadata naming the
    /// automaton artifact; `stages` may also be `{"exact": n}`, and the
    /// other objective is `{"minimize": "out", "max_luts": y}`.
    pub fn from_json(text: &str) -> Result<PlanProblem, PlanError> {
        let wire: ProblemWire = serde_json::from_str(text)?;
        let candidates = wire
            .candidates
            .into_iter()
            .map(|c| {
                Ok(Candidate {
                    accpt: Ratio::from_f64(c.accpt)
                        .map_err(|_| PlanError::BadAccept { id: c.id.clone() })?,
                    id: c.id,
                    lut: c.lut,
                    nfa: c.nfa,
                })
            })
            .collect::<Result<Vec<_>, PlanError>>()?;
        Ok(PlanProblem {
            candidates,
            input_rate: GbpsRate::from_f64(wire.input_rate_gbps)?,
            engine_throughput: GbpsRate::from_f64(wire.throughput_gbps)?,
            stages: wire.stages,
            objective: match wire.objective {
                ObjectiveWire::Rsc { max_out_gbps } => Objective::MinResources {
                    max_output: GbpsRate::from_f64(max_out_gbps)?,
                },
                ObjectiveWire::Out { max_luts } => Objective::MinOutput { max_luts },
            },
        })
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<PlanProblem, PlanError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| PlanError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }
}
