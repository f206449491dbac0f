//! Traffic-driven approximate reduction of byte-level NFAs, plus planning of
//! multi-stage matcher pipelines under resource and throughput constraints.
//!
//! The pipeline, end to end:
//!
//! 1. [`rules`] compiles a set of matching rules (a documented regex subset)
//!    into one prefix-accepting [`nfa::Nfa`] over bytes.
//! 2. [`traffic`] / [`pcap`] ingest packet payloads into a multiset sample.
//! 3. [`labelling`] computes each state's significance: on how many sample
//!    packets the state is reachable.
//! 4. [`reduce`] shrinks the automaton by pruning insignificant states or
//!    merging similar neighbours, always over-approximating the language.
//! 5. [`evaluate`] measures a reduced automaton's acceptance precision and
//!    acceptance probability on testing traffic.
//! 6. [`cost`] attaches a LUT estimate to each candidate.
//! 7. [`pareto`] sweeps the parameter grid and keeps the dominance-free
//!    candidates.
//! 8. [`planner`] picks one candidate per pipeline stage, minimizing
//!    resources under an output cap or output under a resource budget.

pub mod byteclass;
pub mod cost;
pub mod dot;
pub mod evaluate;
pub mod labelling;
pub mod nfa;
pub mod pareto;
pub mod pcap;
pub mod planner;
pub mod ratio;
pub mod reduce;
pub mod rules;
pub mod text;
pub mod traffic;

pub use byteclass::ByteClass;
pub use labelling::{label, label_parallel, Labeling};
pub use nfa::{Nfa, StateSet};
pub use ratio::Ratio;
pub use reduce::{bfs_reduce, merge, merge_prune, prune, ReductionMethod, ReductionReport};
pub use rules::{compile_regex, compile_ruleset, CompileOptions, RuleSet};
pub use traffic::TrafficSample;
