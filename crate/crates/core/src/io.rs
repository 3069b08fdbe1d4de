//! JSON state files.
//!
//! A state is `{"n_a": int, "n_b": int, "gamma": [[...]], "d": [...]}` with
//! `gamma` row-major and `d` optional (zeros by default). A state file wraps
//! it as `{"schema_version": 1, "state": {...}, "metadata": {...}}`; bare
//! states are accepted on input.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{CorrelationMatrix, GaussianState};
use crate::linalg::rows;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateJson {
    n_a: usize,
    n_b: usize,
    gamma: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    d: Option<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFileJson {
    schema_version: u32,
    state: StateJson,
    #[serde(default)]
    metadata: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateFile {
    pub schema_version: u32,
    pub state: GaussianState,
    pub metadata: BTreeMap<String, String>,
}

impl StateJson {
    fn into_state(self) -> Result<GaussianState> {
        let dim = 2 * (self.n_a + self.n_b);
        if self.gamma.len() != dim {
            return Err(Error::Schema(format!(
                "field `gamma` has {} rows, expected {dim} for n_a = {}, n_b = {}",
                self.gamma.len(),
                self.n_a,
                self.n_b
            )));
        }
        for (i, row) in self.gamma.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::Schema(format!(
                    "field `gamma` row {i} has {} entries, expected {dim}",
                    row.len()
                )));
            }
        }
        let m = DMatrix::from_fn(dim, dim, |r, c| self.gamma[r][c]);
        let gamma = CorrelationMatrix::new(m, self.n_a, self.n_b)
            .map_err(|e| Error::Schema(format!("field `gamma`: {e}")))?;
        GaussianState::new(gamma, self.d.map(DVector::from_vec))
    }

    fn from_state(state: &GaussianState) -> Self {
        let d = (state.d.iter().any(|x| *x != 0.0)).then(|| state.d.iter().copied().collect());
        Self {
            n_a: state.gamma.n_a(),
            n_b: state.gamma.n_b(),
            gamma: rows(state.gamma.entries()),
            d,
        }
    }
}

impl StateFile {
    pub fn new(gamma: CorrelationMatrix) -> Self {
        let dim = gamma.dim();
        Self {
            schema_version: SCHEMA_VERSION,
            state: GaussianState {
                gamma,
                d: DVector::zeros(dim),
            },
            metadata: BTreeMap::new(),
        }
    }

    pub fn with_metadata(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }

    pub fn parse(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        if value.get("state").is_some() {
            let file: StateFileJson = serde_json::from_value(value)?;
            if file.schema_version != SCHEMA_VERSION {
                return Err(Error::Schema(format!(
                    "unsupported schema_version {}",
                    file.schema_version
                )));
            }
            Ok(Self {
                schema_version: file.schema_version,
                state: file.state.into_state()?,
                metadata: file.metadata,
            })
        } else {
            let state: StateJson = serde_json::from_value(value)?;
            Ok(Self {
                schema_version: SCHEMA_VERSION,
                state: state.into_state()?,
                metadata: BTreeMap::new(),
            })
        }
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_string(&self) -> String {
        let file = StateFileJson {
            schema_version: self.schema_version,
            state: StateJson::from_state(&self.state),
            metadata: self.metadata.clone(),
        };
        serde_json::to_string_pretty(&file).expect("state files always serialize")
    }

    pub fn gamma(&self) -> &CorrelationMatrix {
        &self.state.gamma
    }
}
