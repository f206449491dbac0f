//! Approximate automaton reductions driven by traffic significance.
//!
//! All reductions over-approximate the prefix language of the input: every
//! packet the original accepts is accepted by the reduced automaton.
//!
//! * **Pruning** removes a set `R` of the least significant states and makes
//!   every surviving state with a transition into `R` (a *border* state)
//!   final. The error on the training sample is bounded by the summed
//!   significance of the border states, and that bound is recorded in the
//!   report.
//! * **Merging** collapses equivalence classes of neighbouring states with
//!   similar significance into single states whose internal transitions
//!   become self-loops. It has no error bound but composes well with a
//!   subsequent pruning pass.
//! * **bfs** is the traffic-free baseline: prune whatever is far from the
//!   initial state.
//!
//! Given identical inputs and parameters, every reduction is deterministic
//! down to the serialized output bytes. Ties on equal significance (or equal
//! depth) are broken by removing higher state ids first.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::labelling::{Labeling, LabellingError};
use crate::nfa::Nfa;
use crate::ratio::{Ratio, RatioError};

#[derive(Debug, Error)]
pub enum ReduceError {
    #[error("reduction ratio must be in (0,1], got {0}")]
    InvalidTheta(f64),
    #[error("distance ceiling must be >= 1, got {0}")]
    InvalidDistanceCeiling(f64),
    #[error("frequency ceiling must be in (0,1], got {0}")]
    InvalidFrequencyCeiling(f64),
    #[error("merging needs a non-empty sample: frequencies are undefined for |S| = 0")]
    EmptySample,
    #[error(transparent)]
    Labeling(#[from] LabellingError),
    #[error(transparent)]
    Parameter(#[from] RatioError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReductionMethod {
    Prune,
    Merge,
    MergePrune,
    Bfs,
}

impl std::fmt::Display for ReductionMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            ReductionMethod::Prune => "prune",
            ReductionMethod::Merge => "merge",
            ReductionMethod::MergePrune => "merge-prune",
            ReductionMethod::Bfs => "bfs",
        };
        f.write_str(name)
    }
}

impl std::str::FromStr for ReductionMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "prune" => Ok(ReductionMethod::Prune),
            "merge" => Ok(ReductionMethod::Merge),
            "merge-prune" => Ok(ReductionMethod::MergePrune),
            "bfs" => Ok(ReductionMethod::Bfs),
            other => Err(format!("unknown reduction method `{other}`")),
        }
    }
}

/// What a reduction did: sizes, the achieved ratio, parameters, and (for
/// reductions with a pruning phase) the error bound in packets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub method: ReductionMethod,
    pub states_before: usize,
    pub states_after: usize,
    pub ratio_achieved: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_bound: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance_ceiling: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frequency_ceiling: Option<f64>,
    /// Name map: `state_origin[q]` is the input-automaton state that reduced
    /// state `q` descends from (for a merged state, its smallest member).
    #[serde(default)]
    pub state_origin: Vec<usize>,
}

impl ReductionReport {
    fn new(
        method: ReductionMethod,
        states_before: usize,
        states_after: usize,
        state_origin: Vec<usize>,
    ) -> Self {
        ReductionReport {
            method,
            states_before,
            states_after,
            ratio_achieved: states_after as f64 / states_before as f64,
            error_bound: None,
            theta: None,
            distance_ceiling: None,
            frequency_ceiling: None,
            state_origin,
        }
    }
}

fn validate_theta(theta: f64) -> Result<Ratio, ReduceError> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(ReduceError::InvalidTheta(theta));
    }
    Ok(Ratio::from_f64(theta)?)
}

/// States to remove: the `remove_count` least significant ones, never the
/// initial state, higher ids first among equals.
fn least_significant(counts: &[u64], protect: usize, remove_count: usize) -> BTreeSet<usize> {
    let mut order: Vec<usize> = (0..counts.len()).filter(|&q| q != protect).collect();
    order.sort_by(|&a, &b| counts[a].cmp(&counts[b]).then(b.cmp(&a)));
    order.into_iter().take(remove_count).collect()
}

/// The pruning construction: drop `removed`, restrict the transition
/// relation, and promote border states to finals. Returns the re-indexed
/// automaton, the border set in the *original* numbering, and the name map
/// from new ids back to original ids.
pub fn prune_states(nfa: &Nfa, removed: &BTreeSet<usize>) -> (Nfa, BTreeSet<usize>, Vec<usize>) {
    assert!(
        !removed.contains(&nfa.initial()),
        "the initial state is never pruned"
    );
    let n = nfa.num_states();
    let mut new_id = vec![usize::MAX; n];
    let mut origin = Vec::with_capacity(n);
    let mut kept = 0usize;
    for (q, slot) in new_id.iter_mut().enumerate() {
        if !removed.contains(&q) {
            *slot = kept;
            origin.push(q);
            kept += 1;
        }
    }
    let mut border = BTreeSet::new();
    let mut transitions = Vec::new();
    for (src, dst, class) in nfa.transitions() {
        if removed.contains(&src) {
            continue;
        }
        if removed.contains(&dst) {
            border.insert(src);
        } else {
            transitions.push((new_id[src], new_id[dst], *class));
        }
    }
    let finals: BTreeSet<usize> = nfa
        .finals()
        .iter()
        .filter(|q| !removed.contains(q))
        .chain(border.iter())
        .map(|&q| new_id[q])
        .collect();
    let tags: BTreeMap<usize, BTreeSet<String>> = nfa
        .final_tags()
        .iter()
        .filter(|(q, _)| !removed.contains(q))
        .map(|(&q, tags)| (new_id[q], tags.clone()))
        .collect();
    let reduced = Nfa::with_tags(kept, new_id[nfa.initial()], finals, transitions, tags)
        .expect("pruning preserves automaton invariants");
    (reduced, border, origin)
}

fn prune_with_counts(nfa: &Nfa, counts: &[u64], target_states: usize) -> (Nfa, u64, Vec<usize>) {
    let remove_count = nfa.num_states().saturating_sub(target_states);
    let removed = least_significant(counts, nfa.initial(), remove_count);
    let (reduced, border, origin) = prune_states(nfa, &removed);
    let bound = border
        .iter()
        .fold(0u64, |acc, &q| acc.saturating_add(counts[q]));
    (reduced, bound, origin)
}

/// Pruning reduction to `⌈θ·|Q|⌉` states.
pub fn prune(
    nfa: &Nfa,
    labeling: &Labeling,
    theta: f64,
) -> Result<(Nfa, ReductionReport), ReduceError> {
    labeling.check_matches(nfa)?;
    let ratio = validate_theta(theta)?;
    let target = ratio.mul_ceil(nfa.num_states() as u64) as usize;
    let (reduced, bound, origin) = prune_with_counts(nfa, labeling.counts(), target);
    let mut report = ReductionReport::new(
        ReductionMethod::Prune,
        nfa.num_states(),
        reduced.num_states(),
        origin,
    );
    report.error_bound = Some(bound);
    report.theta = Some(theta);
    Ok((reduced, report))
}

/// Union-find over state ids.
struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, q: usize) -> usize {
        if self.0[q] != q {
            self.0[q] = self.find(self.0[q]);
        }
        self.0[q]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // attach the larger root under the smaller so representatives
            // stay the minimum member
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.0[hi] = lo;
        }
    }
}

/// Distance of two neighbour states: the ratio of their significances,
/// oriented to be ≥ 1. Two dead states (both counts zero) are at distance 1;
/// a dead state next to a live one is infinitely far.
fn within_distance(count_a: u64, count_b: u64, ceiling: &Ratio) -> bool {
    let (lo, hi) = (count_a.min(count_b), count_a.max(count_b));
    if lo == 0 {
        return hi == 0; // d = 1 when both are zero, ∞ otherwise
    }
    ceiling.ge_fraction(hi, lo)
}

fn merge_classes(
    nfa: &Nfa,
    labeling: &Labeling,
    distance_ceiling: &Ratio,
    frequency_ceiling: &Ratio,
) -> UnionFind {
    let sample_size = labeling.sample_size();
    let eligible = |q: usize| frequency_ceiling.ge_fraction(labeling.count_of(q), sample_size);
    let mut uf = UnionFind::new(nfa.num_states());
    for (src, dst, _) in nfa.transitions() {
        if src == dst {
            continue;
        }
        if eligible(src)
            && eligible(dst)
            && within_distance(
                labeling.count_of(src),
                labeling.count_of(dst),
                distance_ceiling,
            )
        {
            uf.union(src, dst);
        }
    }
    uf
}

/// Merging reduction: collapse every equivalence class of neighbour states
/// within the distance ceiling (and below the frequency ceiling) into one
/// state; transitions inside a class become self-loops on the merged state.
pub fn merge(
    nfa: &Nfa,
    labeling: &Labeling,
    distance_ceiling: f64,
    frequency_ceiling: f64,
) -> Result<(Nfa, ReductionReport), ReduceError> {
    let (merged, _, report) =
        merge_with_labeling(nfa, labeling, distance_ceiling, frequency_ceiling)?;
    Ok((merged, report))
}

/// Like [`merge`], additionally returning the merged automaton's labelling,
/// where a merged state inherits the maximum significance of its members.
pub fn merge_with_labeling(
    nfa: &Nfa,
    labeling: &Labeling,
    distance_ceiling: f64,
    frequency_ceiling: f64,
) -> Result<(Nfa, Labeling, ReductionReport), ReduceError> {
    labeling.check_matches(nfa)?;
    if labeling.sample_size() == 0 {
        return Err(ReduceError::EmptySample);
    }
    if distance_ceiling.is_nan() || distance_ceiling < 1.0 {
        return Err(ReduceError::InvalidDistanceCeiling(distance_ceiling));
    }
    if !(frequency_ceiling > 0.0 && frequency_ceiling <= 1.0) {
        return Err(ReduceError::InvalidFrequencyCeiling(frequency_ceiling));
    }
    let dist = Ratio::from_f64(distance_ceiling)?;
    let freq = Ratio::from_f64(frequency_ceiling)?;

    let mut uf = merge_classes(nfa, labeling, &dist, &freq);
    let n = nfa.num_states();
    // dense renumbering in order of class representative (minimum member)
    let mut new_id = vec![usize::MAX; n];
    let mut merged_counts = Vec::new();
    let mut origin = Vec::new();
    let mut next = 0usize;
    for q in 0..n {
        let root = uf.find(q);
        if new_id[root] == usize::MAX {
            new_id[root] = next;
            merged_counts.push(0u64);
            origin.push(q);
            next += 1;
        }
        new_id[q] = new_id[root];
        let slot = &mut merged_counts[new_id[q]];
        *slot = (*slot).max(labeling.count_of(q));
    }

    let transitions = nfa
        .transitions()
        .map(|(src, dst, class)| (new_id[src], new_id[dst], *class));
    let finals: BTreeSet<usize> = nfa.finals().iter().map(|&q| new_id[q]).collect();
    let mut tags: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
    for (&q, qtags) in nfa.final_tags() {
        tags.entry(new_id[q])
            .or_default()
            .extend(qtags.iter().cloned());
    }
    let merged = Nfa::with_tags(next, new_id[nfa.initial()], finals, transitions, tags)
        .expect("merging preserves automaton invariants");

    let mut report = ReductionReport::new(ReductionMethod::Merge, n, merged.num_states(), origin);
    report.distance_ceiling = Some(distance_ceiling);
    report.frequency_ceiling = Some(frequency_ceiling);
    let merged_labeling = Labeling::from_counts(merged_counts, labeling.sample_size());
    Ok((merged, merged_labeling, report))
}

/// Merge, then prune the result down to `⌈θ·|Q|⌉` states measured against
/// the *original* state count, so θ means the same thing across methods.
/// The pruning phase ranks states by the inherited max-of-members
/// significance.
pub fn merge_prune(
    nfa: &Nfa,
    labeling: &Labeling,
    distance_ceiling: f64,
    frequency_ceiling: f64,
    theta: f64,
) -> Result<(Nfa, ReductionReport), ReduceError> {
    let ratio = validate_theta(theta)?;
    let (merged, merged_labeling, merge_report) =
        merge_with_labeling(nfa, labeling, distance_ceiling, frequency_ceiling)?;
    let target = ratio.mul_ceil(nfa.num_states() as u64) as usize;
    let (reduced, bound, prune_origin) =
        prune_with_counts(&merged, merged_labeling.counts(), target);
    // compose the name maps through both phases
    let origin = prune_origin
        .into_iter()
        .map(|q| merge_report.state_origin[q])
        .collect();
    let mut report = ReductionReport::new(
        ReductionMethod::MergePrune,
        nfa.num_states(),
        reduced.num_states(),
        origin,
    );
    report.error_bound = Some(bound);
    report.theta = Some(theta);
    report.distance_ceiling = Some(distance_ceiling);
    report.frequency_ceiling = Some(frequency_ceiling);
    Ok((reduced, report))
}

/// Traffic-free baseline: prune the states deepest from the initial state
/// (unreachable states first), with the same border construction.
pub fn bfs_reduce(nfa: &Nfa, theta: f64) -> Result<(Nfa, ReductionReport), ReduceError> {
    let ratio = validate_theta(theta)?;
    let target = ratio.mul_ceil(nfa.num_states() as u64) as usize;
    let remove_count = nfa.num_states().saturating_sub(target);
    let depths = nfa.bfs_depths();
    let mut order: Vec<usize> = (0..nfa.num_states())
        .filter(|&q| q != nfa.initial())
        .collect();
    // deepest first, unreachable counting as deepest, higher ids first on ties
    order.sort_by(|&a, &b| {
        let da = depths[a].map_or(u64::MAX, u64::from);
        let db = depths[b].map_or(u64::MAX, u64::from);
        db.cmp(&da).then(b.cmp(&a))
    });
    let removed: BTreeSet<usize> = order.into_iter().take(remove_count).collect();
    let (reduced, _, origin) = prune_states(nfa, &removed);
    let mut report = ReductionReport::new(
        ReductionMethod::Bfs,
        nfa.num_states(),
        reduced.num_states(),
        origin,
    );
    report.theta = Some(theta);
    Ok((reduced, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::byteclass::ByteClass;
    use crate::labelling::label;
    use crate::traffic::TrafficSample;

    /// Five states: a chain with an a-loop, a two-step b branch, and an
    /// a-final. Pruning the b branch leaves the three-state automaton where
    /// the loop state became final.
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

    fn branch_labeling() -> Labeling {
        let sample: TrafficSample = [(b"aab".to_vec(), 1), (b"aa".to_vec(), 1)]
            .into_iter()
            .collect();
        label(&branch_example(), &sample)
    }

    #[test]
    fn prune_branch_example_golden() {
        let nfa = branch_example();
        let (reduced, report) = prune(&nfa, &branch_labeling(), 0.6).unwrap();

        let a = ByteClass::single(b'a');
        let expected = Nfa::new(3, 0, [1, 2], [(0, 1, a), (1, 1, a), (1, 2, a)]).unwrap();
        assert_eq!(reduced, expected);
        assert_eq!(report.states_after, 3);
        // the loop state is the only border state; its significance is 2
        assert_eq!(report.error_bound, Some(2));
        // name map: reduced states descend from original 0, 1, 3
        assert_eq!(report.state_origin, vec![0, 1, 3]);
    }

    #[test]
    fn prune_identity_at_theta_one() {
        let nfa = branch_example();
        let (reduced, report) = prune(&nfa, &branch_labeling(), 1.0).unwrap();
        assert_eq!(reduced, nfa);
        assert_eq!(report.error_bound, Some(0));
        assert_eq!(report.ratio_achieved, 1.0);
    }

    #[test]
    fn prune_rejects_bad_theta() {
        let nfa = branch_example();
        for bad in [0.0, -0.5, 1.5, f64::NAN] {
            assert!(matches!(
                prune(&nfa, &branch_labeling(), bad),
                Err(ReduceError::InvalidTheta(_))
            ));
        }
    }

    #[test]
    fn prune_exact_target_size() {
        let nfa = branch_example();
        let labeling = branch_labeling();
        for theta in [0.2, 0.4, 0.6, 0.8, 1.0] {
            let (reduced, _) = prune(&nfa, &labeling, theta).unwrap();
            let expect = Ratio::from_f64(theta).unwrap().mul_ceil(5) as usize;
            assert_eq!(reduced.num_states(), expect, "theta={theta}");
        }
    }

    /// Eight states: prefix split a/b, then a c·d chain into a state that
    /// branches a·b and c. Merging the chain yields a self-loop over {c,d}.
    fn chain_example() -> Nfa {
        let cls = ByteClass::single;
        Nfa::new(
            8,
            0,
            [1, 6, 7],
            [
                (0, 1, cls(b'a')),
                (0, 2, cls(b'b')),
                (2, 3, cls(b'c')),
                (3, 4, cls(b'd')),
                (4, 5, cls(b'a')),
                (4, 7, cls(b'c')),
                (5, 6, cls(b'b')),
            ],
        )
        .unwrap()
    }

    /// Significances making exactly {2,3,4} mergeable under D=1.5, F=0.5.
    fn chain_labeling() -> Labeling {
        Labeling::from_counts(vec![100, 90, 10, 9, 8, 2, 1, 1], 100)
    }

    #[test]
    fn merge_chain_example_golden() {
        let nfa = chain_example();
        let (merged, report) = merge(&nfa, &chain_labeling(), 1.5, 0.5).unwrap();

        let cls = ByteClass::single;
        let selfloop = cls(b'c').union(&cls(b'd'));
        // states: 0, 1, {2,3,4} -> 2, 5 -> 3, 6 -> 4, 7 -> 5
        let expected = Nfa::new(
            6,
            0,
            [1, 4, 5],
            [
                (0, 1, cls(b'a')),
                (0, 2, cls(b'b')),
                (2, 2, selfloop),
                (2, 3, cls(b'a')),
                (2, 5, cls(b'c')),
                (3, 4, cls(b'b')),
            ],
        )
        .unwrap();
        assert_eq!(merged, expected);
        assert_eq!(report.states_before, 8);
        assert_eq!(report.states_after, 6);
        assert_eq!(report.error_bound, None);
        // the merged state descends from its smallest member
        assert_eq!(report.state_origin, vec![0, 1, 2, 5, 6, 7]);
    }

    #[test]
    fn merge_noop_when_ceiling_admits_nothing() {
        let nfa = chain_example();
        // distances within the chain are 10/9 and 9/8; a ceiling of 1.01
        // admits none of them
        let (merged, report) = merge(&nfa, &chain_labeling(), 1.01, 1.0).unwrap();
        assert_eq!(merged, nfa);
        assert_eq!(report.states_after, 8);
    }

    #[test]
    fn equal_significance_neighbours_merge_at_distance_one() {
        let cls = ByteClass::single;
        let nfa = Nfa::new(3, 0, [2], [(0, 1, cls(b'x')), (1, 2, cls(b'y'))]).unwrap();
        let labeling = Labeling::from_counts(vec![100, 10, 10], 100);
        let (merged, _) = merge(&nfa, &labeling, 1.0, 0.5).unwrap();
        assert_eq!(merged.num_states(), 2);
        assert!(merged.is_final(1));
    }

    #[test]
    fn dead_pairs_merge_but_dead_live_do_not() {
        let cls = ByteClass::single;
        let nfa = Nfa::new(
            4,
            0,
            [3],
            [(0, 1, cls(b'x')), (1, 2, cls(b'y')), (2, 3, cls(b'z'))],
        )
        .unwrap();
        // states 2 and 3 are dead (count 0), state 1 is live; the frequency
        // ceiling keeps the hot initial state out of the picture
        let labeling = Labeling::from_counts(vec![10, 4, 0, 0], 10);
        let (merged, _) = merge(&nfa, &labeling, 1000.0, 0.5).unwrap();
        // 2 and 3 collapse at distance 1; 1 is infinitely far from dead 2
        // even under a huge ceiling
        assert_eq!(merged.num_states(), 3);
        assert!(merged.is_final(2));
    }

    #[test]
    fn initial_state_may_join_a_merge_class() {
        let cls = ByteClass::single;
        let nfa = Nfa::new(3, 0, [2], [(0, 1, cls(b'x')), (1, 2, cls(b'y'))]).unwrap();
        // initial and its successor have equal significance and low frequency
        let labeling = Labeling::from_counts(vec![4, 4, 1], 10);
        let (merged, _) = merge(&nfa, &labeling, 1.0, 0.5).unwrap();
        assert_eq!(merged.num_states(), 2);
        assert_eq!(merged.initial(), 0);
        // the internal transition became a self-loop on the merged state
        assert!(merged
            .transitions_from(0)
            .iter()
            .any(|(dst, c)| *dst == 0 && c.contains(b'x')));
        assert!(merged.accepts_prefix(b"y"));
    }

    #[test]
    fn hot_states_break_merge_chains() {
        // cold - hot - cold chain: the two cold states must not merge with
        // each other around the protected hot state
        let cls = ByteClass::single;
        let nfa = Nfa::new(
            4,
            0,
            [3],
            [(0, 1, cls(b'x')), (1, 2, cls(b'x')), (2, 3, cls(b'z'))],
        )
        .unwrap();
        let labeling = Labeling::from_counts(vec![10, 4, 9, 4], 10);
        // distances: d(1,2) = 9/4 <= 3, d(0,1) = 10/4 <= 3, d(2,3) = 9/4:
        // every neighbour pair is close, but 0 and 2 exceed F = 0.5
        let (merged, _) = merge(&nfa, &labeling, 3.0, 0.5).unwrap();
        assert_eq!(merged.num_states(), 4, "no pair is jointly eligible");
    }

    #[test]
    fn frequency_ceiling_protects_hot_states() {
        let cls = ByteClass::single;
        let nfa = Nfa::new(3, 0, [2], [(0, 1, cls(b'x')), (1, 2, cls(b'y'))]).unwrap();
        let labeling = Labeling::from_counts(vec![100, 90, 90], 100);
        // distance 1 would merge 1 and 2, but both exceed F = 0.5
        let (merged, _) = merge(&nfa, &labeling, 2.0, 0.5).unwrap();
        assert_eq!(merged.num_states(), 3);
    }

    #[test]
    fn merge_requires_sample() {
        let nfa = chain_example();
        let empty = Labeling::from_counts(vec![0; 8], 0);
        assert!(matches!(
            merge(&nfa, &empty, 1.5, 0.5),
            Err(ReduceError::EmptySample)
        ));
    }

    #[test]
    fn merge_prune_composes() {
        let nfa = chain_example();
        let labeling = chain_labeling();
        // merge collapses nothing -> identical to plain prune
        let (a, _) = merge_prune(&nfa, &labeling, 1.01, 1.0, 0.5).unwrap();
        let (b, _) = prune(&nfa, &labeling, 0.5).unwrap();
        assert_eq!(a, b);
        // theta = 1 and no merges -> identity
        let (c, report) = merge_prune(&nfa, &labeling, 1.01, 1.0, 1.0).unwrap();
        assert_eq!(c, nfa);
        assert_eq!(report.states_after, 8);
        // theta retaining every merged state -> same as plain merge
        let (d, _) = merge_prune(&nfa, &labeling, 1.5, 0.5, 0.75).unwrap();
        let (e, _) = merge(&nfa, &labeling, 1.5, 0.5).unwrap();
        assert_eq!(d, e);
    }

    #[test]
    fn bfs_reduce_keeps_shallow_states() {
        let cls = ByteClass::single;
        let chain = Nfa::new(
            4,
            0,
            [3],
            [(0, 1, cls(b'a')), (1, 2, cls(b'a')), (2, 3, cls(b'a'))],
        )
        .unwrap();
        let (reduced, report) = bfs_reduce(&chain, 0.5).unwrap();
        // keep {0,1}; 1 becomes a border final
        assert_eq!(reduced.num_states(), 2);
        assert!(reduced.is_final(1));
        assert_eq!(report.method, ReductionMethod::Bfs);
        assert_eq!(report.error_bound, None);

        let (identity, _) = bfs_reduce(&chain, 1.0).unwrap();
        assert_eq!(identity, chain);
    }

    #[test]
    fn bfs_tie_break_removes_highest_ids() {
        let all = ByteClass::ALL;
        // star: every state at depth 1
        let star = Nfa::new(
            5,
            0,
            [1, 2, 3, 4],
            [(0, 1, all), (0, 2, all), (0, 3, all), (0, 4, all)],
        )
        .unwrap();
        let (reduced, _) = bfs_reduce(&star, 0.5).unwrap();
        // keep ceil(0.5*5)=3 states: 0, 1, 2
        assert_eq!(reduced.num_states(), 3);
        assert!(reduced.is_final(0)); // border: edges into removed 3, 4
    }

    #[test]
    fn reports_serialize_deterministically() {
        let nfa = branch_example();
        let (_, report) = prune(&nfa, &branch_labeling(), 0.6).unwrap();
        let json = serde_json::to_string_pretty(&report).unwrap();
        assert!(json.contains("\"method\": \"prune\""));
        assert!(json.contains("\"error_bound\": 2"));
        let back: ReductionReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
    }
}
