//! Graphviz export with significance heat coloring.
//!
//! States are filled on a log-scaled cold-to-hot gradient of their
//! significance, the visual counterpart of the labelling: cold states are
//! the pruning candidates. Without a labeling the nodes are left unfilled.
//! Output is deterministic.

use std::fmt::Write as _;
use std::path::Path;

use crate::labelling::Labeling;
use crate::nfa::Nfa;
use crate::text::NfaTextError;

/// Position of a significance count on the log-scaled gradient, in `[0,1]`.
pub fn heat(count: u64, max_count: u64) -> f64 {
    if max_count == 0 {
        return 0.0;
    }
    ((count as f64).ln_1p() / (max_count as f64).ln_1p()).clamp(0.0, 1.0)
}

/// Cold (blue) to hot (red) via the HSV hue wheel.
pub fn heat_color(t: f64) -> String {
    let hue = 240.0 * (1.0 - t); // 240° blue .. 0° red
    let (r, g, b) = hsv_to_rgb(hue, 0.65, 0.95);
    format!("#{r:02x}{g:02x}{b:02x}")
}

fn hsv_to_rgb(h: f64, s: f64, v: f64) -> (u8, u8, u8) {
    let c = v * s;
    let x = c * (1.0 - ((h / 60.0) % 2.0 - 1.0).abs());
    let m = v - c;
    let (r, g, b) = match h as u32 {
        0..=59 => (c, x, 0.0),
        60..=119 => (x, c, 0.0),
        120..=179 => (0.0, c, x),
        180..=239 => (0.0, x, c),
        240..=299 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    (
        ((r + m) * 255.0).round() as u8,
        ((g + m) * 255.0).round() as u8,
        ((b + m) * 255.0).round() as u8,
    )
}

/// Renders the automaton as a Graphviz digraph. When a labeling is given it
/// must cover the automaton's states.
pub fn dot_string(nfa: &Nfa, labeling: Option<&Labeling>) -> String {
    if let Some(l) = labeling {
        assert_eq!(
            l.num_states(),
            nfa.num_states(),
            "labeling does not cover the automaton"
        );
    }
    let max_count = labeling.map_or(0, |l| l.counts().iter().copied().max().unwrap_or(0));
    let mut out = String::from("digraph nfa {\n  rankdir=LR;\n  node [shape=circle];\n");
    out.push_str("  __start [shape=none, label=\"\", width=0, height=0];\n");
    for q in 0..nfa.num_states() {
        let shape = if nfa.is_final(q) {
            "doublecircle"
        } else {
            "circle"
        };
        let mut attrs = format!("shape={shape}");
        if let Some(l) = labeling {
            let color = heat_color(heat(l.count_of(q), max_count));
            write!(
                attrs,
                ", style=filled, fillcolor=\"{color}\", tooltip=\"l({q}) = {}\"",
                l.count_of(q)
            )
            .unwrap();
        }
        writeln!(out, "  q{q} [label=\"q{q}\", {attrs}];").unwrap();
    }
    writeln!(out, "  __start -> q{};", nfa.initial()).unwrap();
    for (src, dst, class) in nfa.transitions() {
        writeln!(out, "  q{src} -> q{dst} [label=\"{class}\"];").unwrap();
    }
    out.push_str("}\n");
    out
}

pub fn write_dot(
    nfa: &Nfa,
    labeling: Option<&Labeling>,
    path: impl AsRef<Path>,
) -> Result<(), NfaTextError> {
    let path = path.as_ref();
    std::fs::write(path, dot_string(nfa, labeling)).map_err(|source| NfaTextError::Io {
        path: path.display().to_string(),
        source,
    })
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
    fn labeled_export_has_all_nodes() {
        let nfa = branch_example();
        let labeling = Labeling::from_counts(vec![2, 2, 1, 2, 0], 2);
        let dot = dot_string(&nfa, Some(&labeling));
        for q in 0..5 {
            assert!(dot.contains(&format!("q{q} [label=")), "missing node q{q}");
        }
        assert!(dot.contains("doublecircle"));
        assert!(dot.contains("fillcolor"));
        assert!(dot.contains("q1 -> q2 [label=\"0x62\"]"));
    }

    #[test]
    fn unlabeled_export_is_uncolored() {
        let dot = dot_string(&branch_example(), None);
        assert!(!dot.contains("fillcolor"));
        assert!(dot.contains("__start -> q0;"));
    }

    #[test]
    fn all_zero_counts_sit_at_the_cold_end() {
        let nfa = branch_example();
        let labeling = Labeling::from_counts(vec![0; 5], 0);
        let dot = dot_string(&nfa, Some(&labeling));
        let cold = heat_color(0.0);
        assert_eq!(dot.matches(&cold).count(), 5);
    }

    #[test]
    fn deterministic_output() {
        let nfa = branch_example();
        assert_eq!(dot_string(&nfa, None), dot_string(&nfa, None));
    }
}
