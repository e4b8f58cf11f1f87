//! JSON ensemble files.
//!
//! ```json
//! {"dims": [2, 2],
//!  "states": [{"probability": 0.5, "amplitudes": [[1, 0], [0, 0], [0, 0], [0, 0]]},
//!             {"probability": 0.5, "amplitudes": [[0, 0], [0, 0], [0, 0], [1, 0]]}]}
//! ```
//!
//! Amplitudes are `[re, im]` pairs in `|i>_A|j>_B` order with `j` fastest.
//! Probabilities are optional but then must be given for every state.

use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use nle_core::{ComplexVector, Dims, Ensemble, PureState};

/// Load-time tolerance on state norms and on the probability sum.
pub const FILE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleFile {
    pub dims: [usize; 2],
    pub states: Vec<StateRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probability: Option<f64>,
    pub amplitudes: Vec<[f64; 2]>,
}

impl EnsembleFile {
    pub fn from_ensemble(e: &Ensemble) -> Self {
        EnsembleFile {
            dims: [e.dims().a, e.dims().b],
            states: e
                .members()
                .iter()
                .map(|(p, s)| StateRecord {
                    probability: Some(*p),
                    amplitudes: s.amplitudes().as_slice().iter().map(|z| [z.re, z.im]).collect(),
                })
                .collect(),
        }
    }

    pub fn to_ensemble(&self) -> Result<Ensemble> {
        let [a, b] = self.dims;
        let dims = Dims::new(a, b).with_context(|| format!("invalid dims {a}x{b}"))?;
        ensure!(!self.states.is_empty(), "no states given");
        let given = self.states.iter().filter(|s| s.probability.is_some()).count();
        ensure!(
            given == 0 || given == self.states.len(),
            "probabilities given for {given} of {} states",
            self.states.len()
        );

        let mut states = Vec::with_capacity(self.states.len());
        for (k, rec) in self.states.iter().enumerate() {
            ensure!(
                rec.amplitudes.len() == dims.total(),
                "state {}: {} amplitudes, expected {}",
                k + 1,
                rec.amplitudes.len(),
                dims.total()
            );
            let v = ComplexVector::new(rec.amplitudes.iter().map(|[re, im]| Complex64::new(*re, *im)).collect())
                .with_context(|| format!("state {}", k + 1))?;
            let norm = v.norm();
            if (norm - 1.0).abs() > FILE_TOL {
                bail!("state {}: norm {norm} is not 1", k + 1);
            }
            states.push(PureState::normalized(dims, v).with_context(|| format!("state {}", k + 1))?);
        }

        if given == 0 {
            return Ensemble::uniform(states).context("building ensemble");
        }
        let probs: Vec<f64> = self.states.iter().map(|s| s.probability.unwrap_or_default()).collect();
        ensure!(
            probs.iter().all(|p| p.is_finite() && *p >= 0.0),
            "probabilities must be non-negative"
        );
        let total: f64 = probs.iter().sum();
        ensure!((total - 1.0).abs() <= FILE_TOL, "probabilities sum to {total}, not 1");
        Ensemble::new(probs.iter().map(|p| p / total).zip(states).collect()).context("building ensemble")
    }
}

pub fn load(path: &Path) -> Result<Ensemble> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: EnsembleFile = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    file.to_ensemble()
        .with_context(|| format!("loading {}", path.display()))
}
