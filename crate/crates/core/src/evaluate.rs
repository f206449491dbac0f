//! Measuring reduced automata against a testing sample.
//!
//! Every packet occurrence is classified by the pair (precise accepts,
//! reduced accepts). Acceptance precision AP is the fraction of accepted
//! packets that the precise automaton also accepts; acceptance probability
//! Prob is the fraction of all packets the reduced automaton accepts, i.e.
//! the share of traffic it would forward to the next stage.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nfa::Nfa;
use crate::ratio::Ratio;
use crate::traffic::TrafficSample;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("evaluation requires a non-empty sample")]
    EmptySample,
}

/// Acceptance comparison of a reduced automaton against the precise one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    /// Packets accepted by both automata.
    pub a_tp: u64,
    /// Packets accepted by the reduced automaton only.
    pub a_fp: u64,
    /// Packets accepted by the precise automaton only. Zero for every valid
    /// over-approximation; a nonzero value is an invariant violation.
    pub a_fn: u64,
    /// a_tp / (a_tp + a_fp); reported as 1.0 when nothing was accepted.
    pub ap: f64,
    /// (a_tp + a_fp) / sample_size.
    pub prob: f64,
    pub sample_size: u64,
    /// Set when a_tp + a_fp = 0, where AP is 0/0 by the formula.
    pub no_acceptances: bool,
}

impl EvalResult {
    /// True when the reduced automaton failed to accept something the
    /// precise automaton accepts.
    pub fn over_approximation_violated(&self) -> bool {
        self.a_fn > 0
    }
}

/// Classifies every packet occurrence of `test` by both automata.
pub fn evaluate(
    precise: &Nfa,
    reduced: &Nfa,
    test: &TrafficSample,
) -> Result<EvalResult, EvalError> {
    if test.is_empty() {
        return Err(EvalError::EmptySample);
    }
    let (mut a_tp, mut a_fp, mut a_fn) = (0u64, 0u64, 0u64);
    for (packet, count) in test.iter() {
        let in_precise = precise.accepts_prefix(packet);
        let in_reduced = reduced.accepts_prefix(packet);
        match (in_precise, in_reduced) {
            (true, true) => a_tp += count,
            (false, true) => a_fp += count,
            (true, false) => a_fn += count,
            (false, false) => {}
        }
    }
    let sample_size = test.total_packets();
    let accepted = a_tp + a_fp;
    let no_acceptances = accepted == 0;
    let ap = if no_acceptances {
        1.0
    } else {
        a_tp as f64 / accepted as f64
    };
    Ok(EvalResult {
        a_tp,
        a_fp,
        a_fn,
        ap,
        prob: accepted as f64 / sample_size as f64,
        sample_size,
        no_acceptances,
    })
}

/// Fraction of packet occurrences accepted, as an exact count ratio. This is
/// the acceptance probability fed to the stage planner.
pub fn accept_counts(nfa: &Nfa, sample: &TrafficSample) -> Result<(u64, u64), EvalError> {
    if sample.is_empty() {
        return Err(EvalError::EmptySample);
    }
    let accepted = sample
        .iter()
        .filter(|(packet, _)| nfa.accepts_prefix(packet))
        .map(|(_, count)| count)
        .sum();
    Ok((accepted, sample.total_packets()))
}

pub fn estimate_accept_prob(nfa: &Nfa, sample: &TrafficSample) -> Result<f64, EvalError> {
    let (accepted, total) = accept_counts(nfa, sample)?;
    Ok(Ratio::of_counts(accepted, total).unwrap().to_f64())
}
