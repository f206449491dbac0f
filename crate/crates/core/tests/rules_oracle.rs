//! The compiled automata must agree with an independent regex engine on
//! search-in-prefix semantics: a packet is matched iff some prefix of it
//! contains a match of the pattern.

use apnfa_core::rules::{compile_regex, compile_ruleset, CompileOptions, RuleSet};
use apnfa_testkit::all_words;
use regex::bytes::RegexBuilder;

const ALPHABET: &[u8] = b"abcd";
const MAX_LEN: usize = 6;

/// Patterns stressing everything the compiler supports; words are
/// enumerated over `abcd`, so most patterns stick to those letters.
const CORPUS: &[&str] = &[
    "ab",
    "^ab",
    "^abc",
    "abcd",
    "d",
    "",
    "^",
    "^a*b",
    "^a+b",
    "^ab?c",
    "a*b",
    "a+b",
    "^a{2}b",
    "^a{1,3}b",
    "^a{2,}b",
    "^a{0,2}b",
    "a{3}",
    "^[ab]c",
    "^[^a]b",
    "[a-c]d",
    "^[a-bd]+c",
    "[^abc]",
    "^.b",
    ".c",
    "^..d",
    "^(ab|cd)",
    "(ab|cd)",
    "^(a|b)*c",
    "^(ab|a)c",
    "^(?:ab)+c",
    "a(bc|d)*",
    "^(a|b)(c|d)",
    r"^\x61b",
    r"\x62c",
    r"^\wb",
    r"^\db",
    r"^\Dc",
    r"^\Sb",
    r"(?i)ab",
    r"(?i)^a[b-c]d",
    r"^a.*d",
    r"^a.*bb",
    r"a.*bb",
    r"^(a|bc)d?",
    r"abba|c",
    r"^()ab",
    r"^(a(b(c)))d",
    r"^(a|)b",
    r"^(ab?c)*d",
    r"^((a|b)(c|d)){2}",
    r"^[abc]{2,3}d",
    r"^[^\x61]b",
    r"^[\x61-\x63]d",
    r"(?i)(ab|cd)+",
    r"^a(bc){0,2}d",
    r"^(a+|b+)+c",
    r"^[ab][^cd]",
    r"^\Wa",
    r"b{2}",
    r"^(abc|ab|a)d",
];

fn oracle(pattern: &str) -> regex::bytes::Regex {
    RegexBuilder::new(pattern)
        .unicode(false)
        .build()
        .unwrap_or_else(|e| panic!("oracle rejected corpus pattern `{pattern}`: {e}"))
}

/// Does the oracle find a match inside any prefix of `word`?
fn oracle_prefix_match(re: &regex::bytes::Regex, word: &[u8]) -> bool {
    (0..=word.len()).any(|i| re.is_match(&word[..i]))
}

#[test]
fn corpus_agrees_with_reference_engine() {
    let words = all_words(ALPHABET, MAX_LEN);
    for pattern in CORPUS {
        let nfa = compile_regex(pattern, &CompileOptions::default())
            .unwrap_or_else(|e| panic!("failed to compile `{pattern}`: {e}"));
        let re = oracle(pattern);
        for word in &words {
            assert_eq!(
                nfa.accepts_prefix(word),
                oracle_prefix_match(&re, word),
                "pattern `{pattern}`, word {:?}",
                String::from_utf8_lossy(word)
            );
        }
    }
}

#[test]
fn branch_shape_language_equivalence() {
    // a then a*, with a bb-branch: same language as the hand-built
    // five-state branch automaton used across the reduction tests
    use apnfa_core::byteclass::ByteClass;
    use apnfa_core::nfa::Nfa;
    let a = ByteClass::single(b'a');
    let b = ByteClass::single(b'b');
    let by_hand = Nfa::new(
        5,
        0,
        [3, 4],
        [(0, 1, a), (1, 1, a), (1, 2, b), (2, 4, b), (1, 3, a)],
    )
    .unwrap();
    // q1 -a-> q3 means "aa" hits a final; q1 -b-> q2 -b-> q4 is the bb tail
    let compiled = compile_regex("^a(a*a|a*bb)", &CompileOptions::default()).unwrap();
    for word in all_words(b"ab", MAX_LEN) {
        assert_eq!(
            compiled.accepts_prefix(&word),
            by_hand.accepts_prefix(&word),
            "word {:?}",
            String::from_utf8_lossy(&word)
        );
    }
}

#[test]
fn ruleset_language_is_the_union() {
    let patterns = ["^ab", "cd", "^(a|b)c", "^d+a"];
    let mut rules = RuleSet::new();
    for (i, p) in patterns.iter().enumerate() {
        rules.push(format!("r{i}"), *p).unwrap();
    }
    let opts = CompileOptions::default();
    let union = compile_ruleset(&rules, &opts).unwrap();
    let singles: Vec<_> = patterns
        .iter()
        .map(|p| compile_regex(p, &opts).unwrap())
        .collect();
    let oracles: Vec<_> = patterns.iter().map(|p| oracle(p)).collect();
    for word in all_words(ALPHABET, MAX_LEN) {
        let union_accepts = union.accepts_prefix(&word);
        let any_single = singles.iter().any(|nfa| nfa.accepts_prefix(&word));
        let any_oracle = oracles.iter().any(|re| oracle_prefix_match(re, &word));
        assert_eq!(union_accepts, any_single, "word {word:?} vs singles");
        assert_eq!(union_accepts, any_oracle, "word {word:?} vs oracle");
    }
}

#[test]
fn single_rule_ruleset_matches_plain_compilation() {
    let opts = CompileOptions::default();
    let mut rules = RuleSet::new();
    rules.push("only", "^a(b|c)*d").unwrap();
    let union = compile_ruleset(&rules, &opts).unwrap();
    let single = compile_regex("^a(b|c)*d", &opts).unwrap();
    for word in all_words(ALPHABET, MAX_LEN) {
        assert_eq!(union.accepts_prefix(&word), single.accepts_prefix(&word));
    }
}
