//! Nondeterministic finite automata over the byte alphabet, with
//! prefix-acceptance semantics.
//!
//! An automaton is a quadruple of a dense state set `0..n`, a transition
//! relation stored as per-source adjacency lists of [`ByteClass`] edges, a
//! single initial state, and a set of final states. A packet is accepted
//! when *some prefix* of it (including the empty prefix) can take the
//! automaton from the initial state into a final state. That models matching
//! engines that flag a packet as soon as a match is seen mid-scan: once any
//! prefix matches, every extension of the packet matches as well.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::byteclass::ByteClass;

/// Construction-time validation failures.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum NfaError {
    #[error("automaton must have at least one state")]
    NoStates,
    #[error("initial state {0} out of range (have {1} states)")]
    InitialOutOfRange(usize, usize),
    #[error("final state {0} out of range (have {1} states)")]
    FinalOutOfRange(usize, usize),
    #[error("transition endpoint {0} out of range (have {1} states)")]
    TransitionOutOfRange(usize, usize),
    #[error("tag attached to non-final state {0}")]
    TagOnNonFinal(usize),
}

/// A set of states of one automaton: the frontier of the subset construction.
///
/// Stored as a fixed-width bitmap sized to the owning automaton, so union,
/// intersection tests and iteration cost `O(n/64)` words.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StateSet {
    bits: Vec<u64>,
    num_states: usize,
}

impl StateSet {
    pub fn empty(num_states: usize) -> Self {
        StateSet {
            bits: vec![0; num_states.div_ceil(64)],
            num_states,
        }
    }

    pub fn singleton(num_states: usize, state: usize) -> Self {
        let mut s = Self::empty(num_states);
        s.insert(state);
        s
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn insert(&mut self, state: usize) {
        debug_assert!(state < self.num_states);
        self.bits[state / 64] |= 1u64 << (state % 64);
    }

    pub fn contains(&self, state: usize) -> bool {
        state < self.num_states && self.bits[state / 64] >> (state % 64) & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn clear(&mut self) {
        self.bits.fill(0);
    }

    pub fn union_with(&mut self, other: &StateSet) {
        debug_assert_eq!(self.num_states, other.num_states);
        for (w, o) in self.bits.iter_mut().zip(other.bits.iter()) {
            *w |= o;
        }
    }

    pub fn intersects(&self, other: &StateSet) -> bool {
        self.bits
            .iter()
            .zip(other.bits.iter())
            .any(|(a, b)| a & b != 0)
    }

    pub fn is_subset_of(&self, other: &StateSet) -> bool {
        self.bits
            .iter()
            .zip(other.bits.iter())
            .all(|(a, b)| a & !b == 0)
    }

    /// Member states in ascending order.
    pub fn iter(&self) -> StateSetIter<'_> {
        StateSetIter {
            set: self,
            word_idx: 0,
            word: self.bits.first().copied().unwrap_or(0),
        }
    }
}

impl FromIterator<usize> for StateSet {
    /// Builds a set sized to the maximum member; mostly a test convenience.
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        let members: Vec<usize> = iter.into_iter().collect();
        let n = members.iter().map(|&q| q + 1).max().unwrap_or(0);
        let mut s = StateSet::empty(n);
        for q in members {
            s.insert(q);
        }
        s
    }
}

pub struct StateSetIter<'a> {
    set: &'a StateSet,
    word_idx: usize,
    word: u64,
}

impl Iterator for StateSetIter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        while self.word == 0 {
            self.word_idx += 1;
            if self.word_idx >= self.set.bits.len() {
                return None;
            }
            self.word = self.set.bits[self.word_idx];
        }
        let bit = self.word.trailing_zeros() as usize;
        self.word &= self.word - 1;
        Some(self.word_idx * 64 + bit)
    }
}

/// A nondeterministic finite automaton over bytes.
///
/// Immutable after construction; shared concurrent reads are safe.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Nfa {
    initial: usize,
    finals: BTreeSet<usize>,
    /// Per-source adjacency, sorted by destination; at most one entry per
    /// (src, dst) pair, carrying the merged byte class.
    adj: Vec<Vec<(usize, ByteClass)>>,
    /// Rule identifiers attached to final states by rule-set compilation.
    final_tags: BTreeMap<usize, BTreeSet<String>>,
    /// Cached bitmap of `finals`.
    finals_mask: StateSet,
}

impl Nfa {
    /// Builds and validates an automaton. Transitions sharing a (src, dst)
    /// pair are merged into a single byte class; empty classes are dropped.
    pub fn new(
        num_states: usize,
        initial: usize,
        finals: impl IntoIterator<Item = usize>,
        transitions: impl IntoIterator<Item = (usize, usize, ByteClass)>,
    ) -> Result<Self, NfaError> {
        Self::with_tags(num_states, initial, finals, transitions, BTreeMap::new())
    }

    pub fn with_tags(
        num_states: usize,
        initial: usize,
        finals: impl IntoIterator<Item = usize>,
        transitions: impl IntoIterator<Item = (usize, usize, ByteClass)>,
        final_tags: BTreeMap<usize, BTreeSet<String>>,
    ) -> Result<Self, NfaError> {
        if num_states == 0 {
            return Err(NfaError::NoStates);
        }
        if initial >= num_states {
            return Err(NfaError::InitialOutOfRange(initial, num_states));
        }
        let finals: BTreeSet<usize> = finals.into_iter().collect();
        if let Some(&q) = finals.iter().find(|&&q| q >= num_states) {
            return Err(NfaError::FinalOutOfRange(q, num_states));
        }
        let mut by_pair: BTreeMap<(usize, usize), ByteClass> = BTreeMap::new();
        for (src, dst, class) in transitions {
            if src >= num_states {
                return Err(NfaError::TransitionOutOfRange(src, num_states));
            }
            if dst >= num_states {
                return Err(NfaError::TransitionOutOfRange(dst, num_states));
            }
            if class.is_empty() {
                continue;
            }
            by_pair
                .entry((src, dst))
                .and_modify(|c| c.union_with(&class))
                .or_insert(class);
        }
        let mut adj = vec![Vec::new(); num_states];
        for ((src, dst), class) in by_pair {
            adj[src].push((dst, class));
        }
        for &q in final_tags.keys() {
            if !finals.contains(&q) {
                return Err(NfaError::TagOnNonFinal(q));
            }
        }
        let mut finals_mask = StateSet::empty(num_states);
        for &q in &finals {
            finals_mask.insert(q);
        }
        Ok(Nfa {
            initial,
            finals,
            adj,
            final_tags,
            finals_mask,
        })
    }

    pub fn num_states(&self) -> usize {
        self.adj.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn finals(&self) -> &BTreeSet<usize> {
        &self.finals
    }

    pub fn is_final(&self, state: usize) -> bool {
        self.finals.contains(&state)
    }

    pub fn transitions_from(&self, state: usize) -> &[(usize, ByteClass)] {
        &self.adj[state]
    }

    /// All transitions as (src, dst, class), in (src, dst) order.
    pub fn transitions(&self) -> impl Iterator<Item = (usize, usize, &ByteClass)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(src, edges)| edges.iter().map(move |(dst, c)| (src, *dst, c)))
    }

    /// Number of distinct (src, dst) transition classes.
    pub fn num_transition_classes(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    pub fn final_tags(&self) -> &BTreeMap<usize, BTreeSet<String>> {
        &self.final_tags
    }

    /// One step of the lifted transition relation: the union over the
    /// current states of their successors under `byte`.
    pub fn step(&self, current: &StateSet, byte: u8) -> StateSet {
        let mut next = StateSet::empty(self.num_states());
        self.step_into(current, byte, &mut next);
        next
    }

    /// Allocation-free variant of [`step`](Self::step); `next` is cleared first.
    pub fn step_into(&self, current: &StateSet, byte: u8, next: &mut StateSet) {
        debug_assert_eq!(current.num_states, self.num_states());
        next.clear();
        for q in current.iter() {
            for (dst, class) in &self.adj[q] {
                if class.contains(byte) {
                    next.insert(*dst);
                }
            }
        }
    }

    /// Prefix acceptance: true iff some prefix of `packet` (including the
    /// empty prefix) reaches a final state from the initial state.
    pub fn accepts_prefix(&self, packet: &[u8]) -> bool {
        let mut current = StateSet::singleton(self.num_states(), self.initial);
        if current.intersects(&self.finals_mask) {
            return true;
        }
        let mut next = StateSet::empty(self.num_states());
        for &byte in packet {
            self.step_into(&current, byte, &mut next);
            if next.intersects(&self.finals_mask) {
                return true;
            }
            if next.is_empty() {
                return false;
            }
            std::mem::swap(&mut current, &mut next);
        }
        false
    }

    /// BFS depth of every state from the initial state, following
    /// transitions under any symbol; `None` for unreachable states.
    pub fn bfs_depths(&self) -> Vec<Option<u32>> {
        let mut depth = vec![None; self.num_states()];
        depth[self.initial] = Some(0);
        let mut queue = std::collections::VecDeque::from([self.initial]);
        while let Some(q) = queue.pop_front() {
            let d = depth[q].unwrap();
            for &(dst, _) in &self.adj[q] {
                if depth[dst].is_none() {
                    depth[dst] = Some(d + 1);
                    queue.push_back(dst);
                }
            }
        }
        depth
    }

    /// Stable 64-bit content hash over the structure (FNV-1a). Used to pair
    /// persisted labelings with the automaton they were computed for.
    pub fn content_hash(&self) -> u64 {
        const OFFSET: u64 = 0xcbf29ce484222325;
        const PRIME: u64 = 0x100000001b3;
        let mut h = OFFSET;
        let mut eat = |bytes: &[u8]| {
            for &b in bytes {
                h ^= b as u64;
                h = h.wrapping_mul(PRIME);
            }
        };
        eat(&(self.num_states() as u64).to_le_bytes());
        eat(&(self.initial as u64).to_le_bytes());
        for &f in &self.finals {
            eat(&(f as u64).to_le_bytes());
        }
        for (src, dst, class) in self.transitions() {
            eat(&(src as u64).to_le_bytes());
            eat(&(dst as u64).to_le_bytes());
            for b in class.iter() {
                eat(&[b]);
            }
        }
        h
    }

    /// Structural isomorphism up to state renaming (tags ignored).
    ///
    /// Backtracking search; intended for the small automata that appear in
    /// golden tests, not for production-sized inputs.
    pub fn isomorphic_to(&self, other: &Nfa) -> bool {
        if self.num_states() != other.num_states()
            || self.finals.len() != other.finals.len()
            || self.num_transition_classes() != other.num_transition_classes()
        {
            return false;
        }
        let n = self.num_states();
        let in_degree = |nfa: &Nfa| {
            let mut d = vec![0usize; n];
            for (_, dst, _) in nfa.transitions() {
                d[dst] += 1;
            }
            d
        };
        let my_in = in_degree(self);
        let their_in = in_degree(other);
        let compatible = |a: usize, b: usize| {
            self.is_final(a) == other.is_final(b)
                && self.adj[a].len() == other.adj[b].len()
                && my_in[a] == their_in[b]
                && (a == self.initial) == (b == other.initial)
        };
        // map[a] = Some(b) once state a of self is matched to b of other
        fn search(
            a: usize,
            map: &mut Vec<Option<usize>>,
            used: &mut Vec<bool>,
            me: &Nfa,
            other: &Nfa,
            compatible: &dyn Fn(usize, usize) -> bool,
        ) -> bool {
            let n = me.num_states();
            if a == n {
                // full check of the transition relation under the mapping
                for (src, dst, class) in me.transitions() {
                    let (msrc, mdst) = (map[src].unwrap(), map[dst].unwrap());
                    let found = other.adj[msrc]
                        .iter()
                        .any(|(d, c)| *d == mdst && c == class);
                    if !found {
                        return false;
                    }
                }
                return true;
            }
            for b in 0..n {
                if used[b] || !compatible(a, b) {
                    continue;
                }
                map[a] = Some(b);
                used[b] = true;
                if search(a + 1, map, used, me, other, compatible) {
                    return true;
                }
                map[a] = None;
                used[b] = false;
            }
            false
        }
        let mut map = vec![None; n];
        let mut used = vec![false; n];
        search(0, &mut map, &mut used, self, other, &compatible)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The five-state example automaton: a then a*, with a branch b.b to one
    /// final state and a to another.
    pub(crate) fn branch_example() -> Nfa {
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

    #[test]
    fn step_follows_lifted_relation() {
        let nfa = branch_example();
        let from_q1 = nfa.step(&StateSet::singleton(5, 1), b'b');
        assert_eq!(from_q1.iter().collect::<Vec<_>>(), vec![2]);

        let mut q01 = StateSet::empty(5);
        q01.insert(0);
        q01.insert(1);
        let next = nfa.step(&q01, b'a');
        assert_eq!(next.iter().collect::<Vec<_>>(), vec![1, 3]);
    }

    #[test]
    fn step_from_empty_is_empty() {
        let nfa = branch_example();
        for byte in [b'a', b'b', 0u8, 255u8] {
            assert!(nfa.step(&StateSet::empty(5), byte).is_empty());
        }
    }

    #[test]
    fn accepts_prefix_examples() {
        let nfa = branch_example();
        assert!(nfa.accepts_prefix(b"aab"));
        assert!(nfa.accepts_prefix(b"aa"));
        assert!(!nfa.accepts_prefix(b"ab"));
        assert!(!nfa.accepts_prefix(b"b"));
        assert!(!nfa.accepts_prefix(b""));
    }

    #[test]
    fn empty_prefix_accepted_when_initial_is_final() {
        let nfa = Nfa::new(1, 0, [0], []).unwrap();
        assert!(nfa.accepts_prefix(b""));
        assert!(nfa.accepts_prefix(b"anything"));
    }

    #[test]
    fn construction_rejects_out_of_range() {
        assert_eq!(
            Nfa::new(2, 5, [], []),
            Err(NfaError::InitialOutOfRange(5, 2))
        );
        assert_eq!(
            Nfa::new(2, 0, [7], []),
            Err(NfaError::FinalOutOfRange(7, 2))
        );
        assert!(matches!(
            Nfa::new(2, 0, [], [(0, 9, ByteClass::ALL)]),
            Err(NfaError::TransitionOutOfRange(9, 2))
        ));
    }

    #[test]
    fn duplicate_pairs_merge_classes() {
        let nfa = Nfa::new(
            2,
            0,
            [1],
            [
                (0, 1, ByteClass::single(b'a')),
                (0, 1, ByteClass::single(b'b')),
            ],
        )
        .unwrap();
        assert_eq!(nfa.num_transition_classes(), 1);
        let (_, class) = &nfa.transitions_from(0)[0];
        assert!(class.contains(b'a') && class.contains(b'b'));
    }

    #[test]
    fn isomorphism_detects_renaming() {
        let nfa = branch_example();
        let a = ByteClass::single(b'a');
        let b = ByteClass::single(b'b');
        // same automaton with states 3 and 4 swapped... and 1<->2 swapped
        let renamed = Nfa::new(
            5,
            0,
            [3, 4],
            [(0, 2, a), (2, 2, a), (2, 1, b), (1, 3, b), (2, 4, a)],
        )
        .unwrap();
        assert!(nfa.isomorphic_to(&renamed));
        let different = Nfa::new(5, 0, [3], [(0, 1, a), (1, 1, a), (1, 3, a)]).unwrap();
        assert!(!nfa.isomorphic_to(&different));
    }

    #[test]
    fn bfs_depths_and_unreachable() {
        let a = ByteClass::single(b'a');
        let nfa = Nfa::new(4, 0, [2], [(0, 1, a), (1, 2, a)]).unwrap();
        assert_eq!(nfa.bfs_depths(), vec![Some(0), Some(1), Some(2), None]);
    }

    #[test]
    fn content_hash_distinguishes_structure() {
        let nfa = branch_example();
        let h = nfa.content_hash();
        assert_eq!(h, branch_example().content_hash());
        let other = Nfa::new(5, 0, [3], [(0, 1, ByteClass::single(b'a'))]).unwrap();
        assert_ne!(h, other.content_hash());
    }
}
