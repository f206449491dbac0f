//! Hardware-resource estimates for candidate automata, in LUTs.
//!
//! Real figures come from a synthesis tool; this model is a declared
//! approximation (affine in states and distinct transition classes) plus an
//! override table for candidates whose true post-synthesis size is known.
//! Planning oracles pin exact LUT values through the override path, so
//! nothing downstream depends on the heuristic weights.

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

use crate::nfa::Nfa;

#[derive(Debug, Error)]
pub enum CostError {
    #[error("cost model line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("weights must be non-negative, got {0}={1}")]
    NegativeWeight(&'static str, f64),
    #[error("override for `{0}` must be positive, got {1}")]
    BadOverride(String, f64),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CostModel {
    pub state_weight: f64,
    pub transition_weight: f64,
    pub overhead: f64,
    overrides: BTreeMap<String, f64>,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            state_weight: 2.0,
            transition_weight: 0.25,
            overhead: 50.0,
            overrides: BTreeMap::new(),
        }
    }
}

impl CostModel {
    pub fn new(
        state_weight: f64,
        transition_weight: f64,
        overhead: f64,
    ) -> Result<Self, CostError> {
        for (name, w) in [
            ("state_weight", state_weight),
            ("transition_weight", transition_weight),
            ("overhead", overhead),
        ] {
            if w.is_nan() || w < 0.0 {
                return Err(CostError::NegativeWeight(name, w));
            }
        }
        Ok(CostModel {
            state_weight,
            transition_weight,
            overhead,
            overrides: BTreeMap::new(),
        })
    }

    pub fn set_override(
        &mut self,
        candidate: impl Into<String>,
        luts: f64,
    ) -> Result<(), CostError> {
        let candidate = candidate.into();
        if luts.is_nan() || luts <= 0.0 {
            return Err(CostError::BadOverride(candidate, luts));
        }
        self.overrides.insert(candidate, luts);
        Ok(())
    }

    pub fn override_for(&self, candidate: &str) -> Option<f64> {
        self.overrides.get(candidate).copied()
    }

    /// LUT estimate for a candidate automaton. An override keyed by the
    /// candidate id wins; otherwise the affine model applies.
    pub fn lut_estimate(&self, candidate: Option<&str>, nfa: &Nfa) -> f64 {
        if let Some(luts) = candidate.and_then(|id| self.override_for(id)) {
            return luts;
        }
        self.overhead
            + self.state_weight * nfa.num_states() as f64
            + self.transition_weight * nfa.num_transition_classes() as f64
    }

    /// Parses the `key=value` model file; unknown keys are rejected.
    pub fn parse_config(input: &str) -> Result<Self, CostError> {
        let mut model = CostModel::default();
        for (idx, raw) in input.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| CostError::Parse {
                line: line_no,
                msg: "expected key=value".to_string(),
            })?;
            let value: f64 = value.trim().parse().map_err(|_| CostError::Parse {
                line: line_no,
                msg: format!("invalid number `{}`", value.trim()),
            })?;
            match key.trim() {
                "state_weight" => model.state_weight = value,
                "transition_weight" => model.transition_weight = value,
                "overhead" => model.overhead = value,
                other => {
                    return Err(CostError::Parse {
                        line: line_no,
                        msg: format!("unknown key `{other}`"),
                    })
                }
            }
        }
        CostModel::new(model.state_weight, model.transition_weight, model.overhead)
    }

    /// Parses the `candidate_id,luts` override table and adds it to the model.
    pub fn parse_overrides(&mut self, input: &str) -> Result<(), CostError> {
        for (idx, raw) in input.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() || line == "candidate_id,luts" {
                continue;
            }
            let (id, luts) = line.split_once(',').ok_or_else(|| CostError::Parse {
                line: line_no,
                msg: "expected candidate_id,luts".to_string(),
            })?;
            let luts: f64 = luts.trim().parse().map_err(|_| CostError::Parse {
                line: line_no,
                msg: format!("invalid LUT count `{}`", luts.trim()),
            })?;
            self.set_override(id.trim(), luts)?;
        }
        Ok(())
    }

    pub fn read_config(path: impl AsRef<Path>) -> Result<Self, CostError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| CostError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse_config(&text)
    }

    pub fn read_overrides(&mut self, path: impl AsRef<Path>) -> Result<(), CostError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| CostError::Io {
            path: path.display().to_string(),
            source,
        })?;
        self.parse_overrides(&text)
    }
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
    fn state_count_model() {
        let model = CostModel::new(1.0, 0.0, 0.0).unwrap();
        assert_eq!(model.lut_estimate(None, &branch_example()), 5.0);
    }

    #[test]
    fn override_wins() {
        let mut model = CostModel::new(1.0, 0.0, 0.0).unwrap();
        model.set_override("A3", 1000.0).unwrap();
        assert_eq!(model.lut_estimate(Some("A3"), &branch_example()), 1000.0);
        assert_eq!(model.lut_estimate(Some("A1"), &branch_example()), 5.0);
    }

    #[test]
    fn affine_arithmetic() {
        let model = CostModel::new(2.0, 0.0, 3.0).unwrap();
        let trivial = Nfa::new(1, 0, [], []).unwrap();
        assert_eq!(model.lut_estimate(None, &trivial), 5.0);
    }

    #[test]
    fn monotone_in_structure() {
        let model = CostModel::default();
        let small = Nfa::new(2, 0, [1], [(0, 1, ByteClass::single(b'a'))]).unwrap();
        let big = branch_example();
        assert!(model.lut_estimate(None, &big) > model.lut_estimate(None, &small));
    }

    #[test]
    fn config_and_override_parsing() {
        let model = CostModel::parse_config("state_weight=1.5\noverhead=10 # comment\n").unwrap();
        assert_eq!(model.state_weight, 1.5);
        assert_eq!(model.overhead, 10.0);
        assert_eq!(model.transition_weight, 0.25);
        assert!(CostModel::parse_config("bogus=1\n").is_err());

        let mut model = CostModel::default();
        model
            .parse_overrides("candidate_id,luts\nA1,100\nA2,200\n")
            .unwrap();
        assert_eq!(model.override_for("A2"), Some(200.0));
        assert!(model.parse_overrides("A3,-5\n").is_err());
    }
}
