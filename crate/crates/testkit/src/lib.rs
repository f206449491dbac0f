//! Test-only support: seeded generators, brute-force oracles, and capture
//! fixtures.
//!
//! The oracles deliberately avoid the library's optimized execution paths
//! (bitset frontiers, branch-and-bound): they enumerate runs, prefixes, and
//! assignments directly, so agreement between the two is meaningful.

use std::collections::BTreeSet;

use apnfa_core::byteclass::ByteClass;
use apnfa_core::nfa::Nfa;
use apnfa_core::planner::{Objective, PlanProblem};
use apnfa_core::traffic::TrafficSample;

pub mod pcapgen;

/// SplitMix64: tiny deterministic generator for seeded test suites.
pub struct SplitMix64(u64);

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in `0..bound` (modulo bias is irrelevant at test scale).
    pub fn below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        self.next_u64() % bound
    }

    pub fn chance(&mut self, num: u64, den: u64) -> bool {
        self.below(den) < num
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len() as u64) as usize]
    }
}

/// A random automaton over the given alphabet bytes: a random spanning
/// structure keeps most states reachable, plus random extra edges and a
/// random final set.
pub fn random_nfa(rng: &mut SplitMix64, max_states: usize, alphabet: &[u8]) -> Nfa {
    let n = 2 + rng.below(max_states.max(3) as u64 - 1) as usize;
    let mut transitions: Vec<(usize, usize, ByteClass)> = Vec::new();
    let random_class = |rng: &mut SplitMix64| {
        let mut class = ByteClass::EMPTY;
        for &b in alphabet {
            if rng.chance(1, 2) {
                class.insert(b);
            }
        }
        if class.is_empty() {
            class.insert(*rng.pick(alphabet));
        }
        class
    };
    for q in 1..n {
        if rng.chance(4, 5) {
            let src = rng.below(q as u64) as usize;
            let class = random_class(rng);
            transitions.push((src, q, class));
        }
    }
    for src in 0..n {
        for dst in 0..n {
            if rng.chance(1, 5) {
                let class = random_class(rng);
                transitions.push((src, dst, class));
            }
        }
    }
    let finals: Vec<usize> = (0..n).filter(|_| rng.chance(1, 4)).collect();
    Nfa::new(n, 0, finals, transitions).expect("generated automaton is valid")
}

/// A random multiset of packets over the alphabet.
pub fn random_sample(
    rng: &mut SplitMix64,
    alphabet: &[u8],
    max_packets: usize,
    max_len: usize,
) -> TrafficSample {
    let mut sample = TrafficSample::new();
    let distinct = rng.below(max_packets as u64 + 1);
    for _ in 0..distinct {
        let len = rng.below(max_len as u64 + 1) as usize;
        let word: Vec<u8> = (0..len).map(|_| *rng.pick(alphabet)).collect();
        sample.insert(word, 1 + rng.below(3));
    }
    sample
}

/// All words over `alphabet` of length `0..=max_len`, shortest first.
pub fn all_words(alphabet: &[u8], max_len: usize) -> Vec<Vec<u8>> {
    let mut out: Vec<Vec<u8>> = vec![Vec::new()];
    let mut layer: Vec<Vec<u8>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * alphabet.len());
        for word in &layer {
            for &b in alphabet {
                let mut w = word.clone();
                w.push(b);
                next.push(w);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Prefix-acceptance by explicit run enumeration: does any run over any
/// prefix end in a final state?
pub fn naive_accepts_prefix(nfa: &Nfa, word: &[u8]) -> bool {
    fn walk(nfa: &Nfa, state: usize, rest: &[u8]) -> bool {
        if nfa.is_final(state) {
            return true;
        }
        let Some((&byte, rest)) = rest.split_first() else {
            return false;
        };
        nfa.transitions_from(state)
            .iter()
            .any(|(dst, class)| class.contains(byte) && walk(nfa, *dst, rest))
    }
    walk(nfa, nfa.initial(), word)
}

/// Per-prefix reachability sets computed with plain ordered sets; returns
/// the significance counts of every state over the sample.
pub fn naive_label(nfa: &Nfa, sample: &TrafficSample) -> Vec<u64> {
    let mut counts = vec![0u64; nfa.num_states()];
    for (packet, multiplicity) in sample.iter() {
        let mut reached: BTreeSet<usize> = BTreeSet::from([nfa.initial()]);
        let mut touched = reached.clone();
        for &byte in packet {
            let mut next = BTreeSet::new();
            for &q in &reached {
                for (dst, class) in nfa.transitions_from(q) {
                    if class.contains(byte) {
                        next.insert(*dst);
                    }
                }
            }
            touched.extend(next.iter().copied());
            reached = next;
            if reached.is_empty() {
                break;
            }
        }
        for q in touched {
            counts[q] += multiplicity;
        }
    }
    counts
}

/// Searches for a word of length ≤ `max_len` over `alphabet` accepted by
/// `original` but not by `reduced` — a counterexample to language inclusion.
/// Prefix closure lets whole subtrees be settled early.
pub fn inclusion_counterexample(
    original: &Nfa,
    reduced: &Nfa,
    alphabet: &[u8],
    max_len: usize,
) -> Option<Vec<u8>> {
    struct Node {
        word: Vec<u8>,
        orig: BTreeSet<usize>,
        red: BTreeSet<usize>,
        orig_accepted: bool,
        red_accepted: bool,
    }
    let is_final = |nfa: &Nfa, set: &BTreeSet<usize>| set.iter().any(|&q| nfa.is_final(q));
    let step = |nfa: &Nfa, set: &BTreeSet<usize>, byte: u8| -> BTreeSet<usize> {
        let mut next = BTreeSet::new();
        for &q in set {
            for (dst, class) in nfa.transitions_from(q) {
                if class.contains(byte) {
                    next.insert(*dst);
                }
            }
        }
        next
    };
    let root = Node {
        word: Vec::new(),
        orig: BTreeSet::from([original.initial()]),
        red: BTreeSet::from([reduced.initial()]),
        orig_accepted: original.is_final(original.initial()),
        red_accepted: reduced.is_final(reduced.initial()),
    };
    let mut stack = vec![root];
    while let Some(node) = stack.pop() {
        if node.orig_accepted && !node.red_accepted {
            return Some(node.word);
        }
        // both accepted: every extension is accepted by both (prefix closure)
        if node.orig_accepted && node.red_accepted {
            continue;
        }
        // original can never accept below this node
        if !node.orig_accepted && node.orig.is_empty() {
            continue;
        }
        if node.word.len() >= max_len {
            continue;
        }
        for &byte in alphabet {
            let orig = step(original, &node.orig, byte);
            let red = step(reduced, &node.red, byte);
            let mut word = node.word.clone();
            word.push(byte);
            stack.push(Node {
                orig_accepted: node.orig_accepted || is_final(original, &orig),
                red_accepted: node.red_accepted || is_final(reduced, &red),
                word,
                orig,
                red,
            });
        }
    }
    None
}

/// The exact reduction error on a sample: the packet occurrences accepted by
/// the reduced automaton but not the original.
pub fn exact_error(original: &Nfa, reduced: &Nfa, sample: &TrafficSample) -> u64 {
    sample
        .iter()
        .filter(|(w, _)| naive_accepts_prefix(reduced, w) && !naive_accepts_prefix(original, w))
        .map(|(_, count)| count)
        .sum()
}

/// Best objective value by exhaustive enumeration of admissible
/// assignments, with no pruning. Returns `None` when infeasible.
/// For the resource objective the value is total LUTs; for the output
/// objective it is out_n in milli-Gbps as an exact (num, den) pair.
pub enum NaiveOptimum {
    Resources(f64),
    Output(u128, u128),
}

pub fn naive_solve(problem: &PlanProblem) -> Option<NaiveOptimum> {
    let tp = problem.engine_throughput.milli() as u128;
    let out0 = problem.input_rate.milli() as u128;
    let lengths: Vec<u32> = match problem.stages {
        apnfa_core::planner::StageCount::Exact(n) => vec![n],
        apnfa_core::planner::StageCount::UpTo(n) => (1..=n).collect(),
    };
    let k = problem.candidates.len();
    let mut best: Option<NaiveOptimum> = None;
    for len in lengths {
        let mut assignment = vec![0usize; len as usize];
        loop {
            // monotone acceptance check
            let monotone = assignment
                .windows(2)
                .all(|w| problem.candidates[w[1]].accpt <= problem.candidates[w[0]].accpt);
            if monotone {
                // evaluate constraints (1)-(3) directly
                let mut rsc = 0.0;
                let (mut in_num, mut in_den) = (out0, 1u128);
                for &choice in &assignment {
                    let c = &problem.candidates[choice];
                    let replicas = in_num.div_ceil(in_den * tp);
                    rsc += replicas as f64 * c.lut;
                    in_num = out0 * c.accpt.num() as u128;
                    in_den = c.accpt.den() as u128;
                }
                let (out_num, out_den) = (in_num, in_den);
                let feasible = match problem.objective {
                    Objective::MinResources { max_output } => {
                        out_num <= max_output.milli() as u128 * out_den
                    }
                    Objective::MinOutput { max_luts } => rsc <= max_luts,
                };
                if feasible {
                    best = Some(match (best, problem.objective) {
                        (None, Objective::MinResources { .. }) => NaiveOptimum::Resources(rsc),
                        (None, Objective::MinOutput { .. }) => {
                            NaiveOptimum::Output(out_num, out_den)
                        }
                        (Some(NaiveOptimum::Resources(old)), _) => {
                            NaiveOptimum::Resources(old.min(rsc))
                        }
                        (Some(NaiveOptimum::Output(on, od)), _) => {
                            if out_num * od < on * out_den {
                                NaiveOptimum::Output(out_num, out_den)
                            } else {
                                NaiveOptimum::Output(on, od)
                            }
                        }
                    });
                }
            }
            // odometer over assignments
            let mut i = 0;
            loop {
                if i == assignment.len() {
                    break;
                }
                assignment[i] += 1;
                if assignment[i] < k {
                    break;
                }
                assignment[i] = 0;
                i += 1;
            }
            if i == assignment.len() {
                break;
            }
        }
    }
    best
}
