//! Parsers must reject malformed input with errors, never panic, and
//! accepted input must satisfy the type invariants.

use apnfa_core::byteclass::ByteClass;
use apnfa_core::labelling::parse_labeling_csv;
use apnfa_core::pareto::parse_candidates_csv;
use apnfa_core::pcap::{parse_pcap, PcapOptions};
use apnfa_core::planner::PlanProblem;
use apnfa_core::rules::{compile_regex, CompileOptions, RuleSet};
use apnfa_core::text::parse_nfa;
use apnfa_core::traffic::parse_raw;
use proptest::prelude::*;

proptest! {
    #[test]
    fn nfa_text_parser_never_panics(input in ".{0,200}") {
        let _ = parse_nfa(&input);
    }

    #[test]
    fn nfa_text_parser_accepts_only_valid_automata(input in "[0-9a-fx, \n#]{0,120}") {
        if let Ok(nfa) = parse_nfa(&input) {
            prop_assert!(nfa.initial() < nfa.num_states());
            for (src, dst, class) in nfa.transitions() {
                prop_assert!(src < nfa.num_states() && dst < nfa.num_states());
                prop_assert!(!class.is_empty());
            }
        }
    }

    #[test]
    fn symspec_parser_never_panics(input in ".{0,40}") {
        let _ = input.parse::<ByteClass>();
    }

    #[test]
    fn regex_compiler_never_panics(pattern in ".{0,60}") {
        let _ = compile_regex(&pattern, &CompileOptions::default());
    }

    #[test]
    fn regex_compiler_handles_ascii_noise(pattern in "[-a-z0-9\\\\(){}\\[\\]|?*+^$.]{0,40}") {
        if let Ok(nfa) = compile_regex(&pattern, &CompileOptions::default()) {
            // compiled automata are runnable
            let _ = nfa.accepts_prefix(b"abc");
        }
    }

    #[test]
    fn raw_parser_never_panics(bytes in prop::collection::vec(any::<u8>(), 0..200)) {
        let _ = parse_raw(&bytes);
    }

    #[test]
    fn pcap_parser_never_panics(bytes in prop::collection::vec(any::<u8>(), 0..300)) {
        let _ = parse_pcap(&bytes, &PcapOptions::default());
        let opts = PcapOptions { max_packets: Some(2), truncate: Some(3) };
        let _ = parse_pcap(&bytes, &opts);
    }

    #[test]
    fn labeling_csv_parser_never_panics(input in ".{0,200}") {
        let _ = parse_labeling_csv(&input);
    }

    #[test]
    fn candidates_csv_parser_never_panics(input in ".{0,200}") {
        let _ = parse_candidates_csv(&input);
    }

    #[test]
    fn rule_file_parser_never_panics(input in ".{0,200}") {
        let _ = RuleSet::parse(&input);
    }

    #[test]
    fn plan_problem_parser_never_panics(input in ".{0,200}") {
        let _ = PlanProblem::from_json(&input);
    }
}
