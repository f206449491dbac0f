//! State significance over a traffic sample.
//!
//! The significance of a state is the number of sample packets (counting
//! multiplicity) over which the state is reachable from the initial state by
//! some prefix. It is computed with the subset construction run per packet:
//! frontiers `Q⁰ = {q_I}`, `Qⁱ⁺¹ = δ(Qⁱ, aᵢ₊₁)` over the whole packet, and
//! every state appearing in any frontier is credited once per packet
//! occurrence, no matter how many runs reach it.
//!
//! Labelling is the expensive step of the reduction pipeline, so results can
//! be persisted to a small CSV and reused across reduction parameters. The
//! CSV records the automaton's content hash to guard against pairing a
//! labeling with the wrong automaton.

use std::num::NonZeroUsize;
use std::path::Path;

use thiserror::Error;

use crate::nfa::{Nfa, StateSet};
use crate::traffic::TrafficSample;

#[derive(Debug, Error)]
pub enum LabellingError {
    #[error("frequency undefined: the labeling was computed over an empty sample")]
    EmptySample,
    #[error("labeling covers {labeled} states but the automaton has {expected}")]
    SizeMismatch { labeled: usize, expected: usize },
    #[error("labeling csv line {line}: {msg}")]
    Csv { line: usize, msg: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Per-state significance counts ℓ(q) over a sample of |S| packets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labeling {
    counts: Vec<u64>,
    sample_size: u64,
}

impl Labeling {
    pub fn from_counts(counts: Vec<u64>, sample_size: u64) -> Self {
        Labeling {
            counts,
            sample_size,
        }
    }

    pub fn count_of(&self, state: usize) -> u64 {
        self.counts[state]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn num_states(&self) -> usize {
        self.counts.len()
    }

    /// |S| of the sample the labeling was computed over.
    pub fn sample_size(&self) -> u64 {
        self.sample_size
    }

    /// f(q) = ℓ(q)/|S|, rounded to the nearest double.
    pub fn frequency(&self, state: usize) -> Result<f64, LabellingError> {
        if self.sample_size == 0 {
            return Err(LabellingError::EmptySample);
        }
        Ok(self.counts[state] as f64 / self.sample_size as f64)
    }

    pub fn check_matches(&self, nfa: &Nfa) -> Result<(), LabellingError> {
        if self.counts.len() != nfa.num_states() {
            return Err(LabellingError::SizeMismatch {
                labeled: self.counts.len(),
                expected: nfa.num_states(),
            });
        }
        Ok(())
    }
}

fn label_entries(nfa: &Nfa, entries: &[(&[u8], u64)]) -> Vec<u64> {
    let n = nfa.num_states();
    let mut counts = vec![0u64; n];
    let mut current = StateSet::empty(n);
    let mut next = StateSet::empty(n);
    let mut touched = StateSet::empty(n);
    for &(packet, multiplicity) in entries {
        current.clear();
        current.insert(nfa.initial());
        touched.clear();
        touched.insert(nfa.initial());
        for &byte in packet {
            nfa.step_into(&current, byte, &mut next);
            if next.is_empty() {
                break;
            }
            touched.union_with(&next);
            std::mem::swap(&mut current, &mut next);
        }
        for q in touched.iter() {
            counts[q] += multiplicity;
        }
    }
    counts
}

/// Labels every state of `nfa` with its significance over `sample`.
pub fn label(nfa: &Nfa, sample: &TrafficSample) -> Labeling {
    let entries: Vec<(&[u8], u64)> = sample.iter().collect();
    Labeling {
        counts: label_entries(nfa, &entries),
        sample_size: sample.total_packets(),
    }
}

/// Packet-parallel labelling. Distinct payloads are split across `workers`
/// threads and the per-worker count vectors are summed, which is
/// bit-identical to the sequential result.
pub fn label_parallel(nfa: &Nfa, sample: &TrafficSample, workers: NonZeroUsize) -> Labeling {
    let entries: Vec<(&[u8], u64)> = sample.iter().collect();
    let workers = workers.get().min(entries.len().max(1));
    if workers <= 1 {
        return Labeling {
            counts: label_entries(nfa, &entries),
            sample_size: sample.total_packets(),
        };
    }
    let chunk_len = entries.len().div_ceil(workers);
    let mut counts = vec![0u64; nfa.num_states()];
    std::thread::scope(|scope| {
        let handles: Vec<_> = entries
            .chunks(chunk_len)
            .map(|chunk| scope.spawn(move || label_entries(nfa, chunk)))
            .collect();
        for handle in handles {
            let partial = handle.join().expect("labelling worker panicked");
            for (total, part) in counts.iter_mut().zip(partial) {
                *total += part;
            }
        }
    });
    Labeling {
        counts,
        sample_size: sample.total_packets(),
    }
}

/// Serializes a labeling together with the hash of the automaton it was
/// computed for.
pub fn format_labeling_csv(labeling: &Labeling, nfa_hash: u64) -> String {
    let mut out = String::new();
    out.push_str("# apnfa labeling v1\n");
    out.push_str(&format!("# nfa_hash={nfa_hash:016x}\n"));
    out.push_str(&format!("# sample_size={}\n", labeling.sample_size));
    out.push_str("state,count\n");
    for (state, count) in labeling.counts.iter().enumerate() {
        out.push_str(&format!("{state},{count}\n"));
    }
    out
}

/// Parses a labeling CSV; returns the labeling and the recorded NFA hash.
pub fn parse_labeling_csv(input: &str) -> Result<(Labeling, u64), LabellingError> {
    let mut nfa_hash: Option<u64> = None;
    let mut sample_size: Option<u64> = None;
    let mut counts: Vec<u64> = Vec::new();
    let mut saw_header = false;
    for (idx, raw) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(v) = comment.strip_prefix("nfa_hash=") {
                nfa_hash =
                    Some(
                        u64::from_str_radix(v.trim(), 16).map_err(|_| LabellingError::Csv {
                            line: line_no,
                            msg: format!("invalid nfa_hash `{v}`"),
                        })?,
                    );
            } else if let Some(v) = comment.strip_prefix("sample_size=") {
                sample_size = Some(v.trim().parse().map_err(|_| LabellingError::Csv {
                    line: line_no,
                    msg: format!("invalid sample_size `{v}`"),
                })?);
            }
            continue;
        }
        if line == "state,count" {
            saw_header = true;
            continue;
        }
        let (state, count) = line.split_once(',').ok_or_else(|| LabellingError::Csv {
            line: line_no,
            msg: "expected `state,count`".to_string(),
        })?;
        let state: usize = state.trim().parse().map_err(|_| LabellingError::Csv {
            line: line_no,
            msg: format!("invalid state id `{state}`"),
        })?;
        let count: u64 = count.trim().parse().map_err(|_| LabellingError::Csv {
            line: line_no,
            msg: format!("invalid count `{count}`"),
        })?;
        if state != counts.len() {
            return Err(LabellingError::Csv {
                line: line_no,
                msg: format!("expected state {} in order, found {state}", counts.len()),
            });
        }
        counts.push(count);
    }
    if !saw_header {
        return Err(LabellingError::Csv {
            line: 0,
            msg: "missing `state,count` header".to_string(),
        });
    }
    let nfa_hash = nfa_hash.ok_or(LabellingError::Csv {
        line: 0,
        msg: "missing `# nfa_hash=` header".to_string(),
    })?;
    let sample_size = sample_size.ok_or(LabellingError::Csv {
        line: 0,
        msg: "missing `# sample_size=` header".to_string(),
    })?;
    Ok((Labeling::from_counts(counts, sample_size), nfa_hash))
}

pub fn write_labeling(
    labeling: &Labeling,
    nfa_hash: u64,
    path: impl AsRef<Path>,
) -> Result<(), LabellingError> {
    let path = path.as_ref();
    std::fs::write(path, format_labeling_csv(labeling, nfa_hash)).map_err(|source| {
        LabellingError::Io {
            path: path.display().to_string(),
            source,
        }
    })
}

pub fn read_labeling(path: impl AsRef<Path>) -> Result<(Labeling, u64), LabellingError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| LabellingError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_labeling_csv(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::byteclass::ByteClass;

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

    #[test]
    fn significance_of_branch_example() {
        // "aab" walks frontiers {0},{1},{1,3},{2}; "aa" walks {0},{1},{1,3}
        let sample: TrafficSample = [(b"aab".to_vec(), 1), (b"aa".to_vec(), 1)]
            .into_iter()
            .collect();
        let labeling = label(&branch_example(), &sample);
        assert_eq!(labeling.counts(), &[2, 2, 1, 2, 0]);
        assert_eq!(labeling.sample_size(), 2);
    }

    #[test]
    fn empty_sample_labels_zero() {
        let labeling = label(&branch_example(), &TrafficSample::new());
        assert_eq!(labeling.counts(), &[0; 5]);
        assert_eq!(labeling.sample_size(), 0);
        assert!(matches!(
            labeling.frequency(0),
            Err(LabellingError::EmptySample)
        ));
    }

    #[test]
    fn multiplicity_scales_counts() {
        let nfa = branch_example();
        let single: TrafficSample = [(b"aab".to_vec(), 1)].into_iter().collect();
        let triple: TrafficSample = [(b"aab".to_vec(), 3)].into_iter().collect();
        let l1 = label(&nfa, &single);
        let l3 = label(&nfa, &triple);
        for q in 0..nfa.num_states() {
            assert_eq!(l3.count_of(q), 3 * l1.count_of(q));
        }
    }

    #[test]
    fn initial_state_counts_every_packet() {
        let sample: TrafficSample = [(b"zzz".to_vec(), 4), (b"".to_vec(), 2)]
            .into_iter()
            .collect();
        let labeling = label(&branch_example(), &sample);
        assert_eq!(labeling.count_of(0), sample.total_packets());
    }

    #[test]
    fn frequency_values() {
        let sample: TrafficSample = [(b"aab".to_vec(), 1), (b"aa".to_vec(), 1)]
            .into_iter()
            .collect();
        let labeling = label(&branch_example(), &sample);
        assert_eq!(labeling.frequency(0).unwrap(), 1.0);
        assert_eq!(labeling.frequency(2).unwrap(), 0.5);
        assert_eq!(labeling.frequency(4).unwrap(), 0.0);
    }

    #[test]
    fn parallel_matches_sequential() {
        let nfa = branch_example();
        let mut sample = TrafficSample::new();
        for i in 0..97u32 {
            let word: Vec<u8> = (0..(i % 7))
                .map(|j| if (i + j) % 3 == 0 { b'a' } else { b'b' })
                .collect();
            sample.insert(word, 1 + (i % 4) as u64);
        }
        let seq = label(&nfa, &sample);
        for workers in [1, 2, 3, 8] {
            let par = label_parallel(&nfa, &sample, NonZeroUsize::new(workers).unwrap());
            assert_eq!(par, seq, "workers={workers}");
        }
    }

    #[test]
    fn csv_roundtrip_and_hash() {
        let nfa = branch_example();
        let sample: TrafficSample = [(b"aab".to_vec(), 1)].into_iter().collect();
        let labeling = label(&nfa, &sample);
        let csv = format_labeling_csv(&labeling, nfa.content_hash());
        let (back, hash) = parse_labeling_csv(&csv).unwrap();
        assert_eq!(back, labeling);
        assert_eq!(hash, nfa.content_hash());
    }

    #[test]
    fn csv_rejects_out_of_order_states() {
        let csv = "# nfa_hash=00\n# sample_size=1\nstate,count\n1,5\n";
        assert!(matches!(
            parse_labeling_csv(csv),
            Err(LabellingError::Csv { line: 4, .. })
        ));
    }
}
