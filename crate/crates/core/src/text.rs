//! Line-oriented text format for automata.
//!
//! ```text
//! # optional comments
//! initial 0
//! 0 1 0x61
//! 1 1 0x61-0x63,0x70
//! #tag 2 rule-id
//! final 2 3
//! ```
//!
//! The first significant line names the single initial state, followed by
//! one transition per line (`src dst symspec`), and the last significant
//! line lists the final states (possibly none: a bare `final`). `#` starts
//! a comment. Two structured comment forms round-trip information foreign
//! parsers can safely ignore: `#tag state rule` re-attaches rule identifiers
//! to final states, and `#state id` declares a state that no other line
//! mentions (an isolated state).
//!
//! State identifiers must be contiguous from 0; a gap means the file
//! references a state that is never otherwise declared and is rejected.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::byteclass::ByteClass;
use crate::nfa::Nfa;

#[derive(Debug, Error)]
pub enum NfaTextError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn parse_err(line: usize, msg: impl Into<String>) -> NfaTextError {
    NfaTextError::Parse {
        line,
        msg: msg.into(),
    }
}

/// Serializes an automaton; the output is deterministic and reparses to an
/// equal automaton with identical state numbering.
pub fn format_nfa(nfa: &Nfa) -> String {
    let mut out = String::new();
    writeln!(out, "initial {}", nfa.initial()).unwrap();
    for (src, dst, class) in nfa.transitions() {
        writeln!(out, "{src} {dst} {class}").unwrap();
    }
    let mut mentioned = vec![false; nfa.num_states()];
    mentioned[nfa.initial()] = true;
    for (src, dst, _) in nfa.transitions() {
        mentioned[src] = true;
        mentioned[dst] = true;
    }
    for &q in nfa.finals() {
        mentioned[q] = true;
    }
    for (q, seen) in mentioned.iter().enumerate() {
        if !seen {
            writeln!(out, "#state {q}").unwrap();
        }
    }
    for (state, tags) in nfa.final_tags() {
        for tag in tags {
            writeln!(out, "#tag {state} {tag}").unwrap();
        }
    }
    let finals: Vec<String> = nfa.finals().iter().map(|q| q.to_string()).collect();
    if finals.is_empty() {
        writeln!(out, "final").unwrap();
    } else {
        writeln!(out, "final {}", finals.join(" ")).unwrap();
    }
    out
}

pub fn parse_nfa(input: &str) -> Result<Nfa, NfaTextError> {
    let mut initial: Option<usize> = None;
    let mut finals: Option<Vec<usize>> = None;
    let mut transitions: Vec<(usize, usize, ByteClass)> = Vec::new();
    let mut tags: Vec<(usize, String, usize)> = Vec::new();
    let mut mentioned: BTreeSet<usize> = BTreeSet::new();

    let parse_id = |tok: &str, line: usize| -> Result<usize, NfaTextError> {
        tok.parse::<usize>()
            .map_err(|_| parse_err(line, format!("invalid state id `{tok}`")))
    };

    for (idx, raw) in input.lines().enumerate() {
        let line_no = idx + 1;
        if let Some(rest) = raw.strip_prefix("#tag ") {
            let mut it = rest.split_whitespace();
            match (it.next(), it.next()) {
                (Some(q), Some(tag)) => {
                    tags.push((parse_id(q, line_no)?, tag.to_string(), line_no))
                }
                _ => return Err(parse_err(line_no, "malformed #tag line")),
            }
            continue;
        }
        if let Some(rest) = raw.strip_prefix("#state ") {
            let id = parse_id(rest.trim(), line_no)?;
            mentioned.insert(id);
            continue;
        }
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if finals.is_some() {
            return Err(parse_err(line_no, "content after the final-state line"));
        }
        if let Some(rest) = line.strip_prefix("initial") {
            if initial.is_some() {
                return Err(parse_err(line_no, "multiple initial states"));
            }
            let id = parse_id(rest.trim(), line_no)?;
            mentioned.insert(id);
            initial = Some(id);
            continue;
        }
        if initial.is_none() {
            return Err(parse_err(line_no, "expected `initial <id>` first"));
        }
        if let Some(rest) = line.strip_prefix("final") {
            let mut ids = Vec::new();
            for tok in rest.split_whitespace() {
                let id = parse_id(tok, line_no)?;
                mentioned.insert(id);
                ids.push(id);
            }
            finals = Some(ids);
            continue;
        }
        let mut fields = line.split_whitespace();
        match (fields.next(), fields.next(), fields.next(), fields.next()) {
            (Some(src), Some(dst), Some(spec), None) => {
                let src = parse_id(src, line_no)?;
                let dst = parse_id(dst, line_no)?;
                let class: ByteClass = spec
                    .parse()
                    .map_err(|e| parse_err(line_no, format!("bad symbol spec: {e}")))?;
                mentioned.insert(src);
                mentioned.insert(dst);
                transitions.push((src, dst, class));
            }
            _ => {
                return Err(parse_err(
                    line_no,
                    "expected `src dst symspec`, `final ...`, or a comment",
                ))
            }
        }
    }

    let initial =
        initial.ok_or_else(|| parse_err(input.lines().count(), "missing `initial` line"))?;
    let finals = finals.ok_or_else(|| parse_err(input.lines().count(), "missing `final` line"))?;

    let num_states = mentioned.iter().next_back().map_or(0, |&m| m + 1);
    for id in 0..num_states {
        if !mentioned.contains(&id) {
            return Err(parse_err(
                0,
                format!("state ids not contiguous: state {id} never declared"),
            ));
        }
    }

    let mut tag_map: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
    for (q, tag, line_no) in tags {
        if !finals.contains(&q) {
            return Err(parse_err(
                line_no,
                format!("#tag on state {q} which is not final"),
            ));
        }
        tag_map.entry(q).or_default().insert(tag);
    }

    Nfa::with_tags(num_states, initial, finals, transitions, tag_map)
        .map_err(|e| parse_err(0, e.to_string()))
}

pub fn read_nfa(path: impl AsRef<Path>) -> Result<Nfa, NfaTextError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| NfaTextError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_nfa(&text)
}

pub fn write_nfa(nfa: &Nfa, path: impl AsRef<Path>) -> Result<(), NfaTextError> {
    let path = path.as_ref();
    std::fs::write(path, format_nfa(nfa)).map_err(|source| NfaTextError::Io {
        path: path.display().to_string(),
        source,
    })
}
