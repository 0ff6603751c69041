use std::path::Path;

use serde::{Deserialize, Serialize};

use super::algebra::GradedAlgebra;
use crate::error::{Error, Result};

/// On-disk algebra definition.
///
/// ```json
/// { "class": 2, "dims": [2, 1],
///   "brackets": [[0, 1, [0, 0, 1]], [1, 0, [0, 0, -1]]] }
/// ```
///
/// Each bracket entry is `(i, j, [e_i, e_j])` over global basis indices with
/// a full-length target vector. Both orderings of a pair must be listed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    #[serde(default)]
    pub name: Option<String>,
    pub class: usize,
    pub dims: Vec<usize>,
    #[serde(default)]
    pub brackets: Vec<(usize, usize, Vec<f64>)>,
}

impl AlgebraFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn build(&self) -> Result<GradedAlgebra<f64>> {
        if self.class != self.dims.len() {
            return Err(Error::Shape(format!(
                "class {} disagrees with {} listed level dimensions",
                self.class,
                self.dims.len()
            )));
        }
        GradedAlgebra::from_entries(self.dims.clone(), self.brackets.iter().cloned())
    }

    pub fn from_algebra(alg: &GradedAlgebra<f64>, name: Option<String>) -> Self {
        let n = alg.dim();
        let c = alg.structure();
        let mut brackets = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let v = c.basis_bracket(i, j);
                if v.iter().any(|x| *x != 0.0) {
                    brackets.push((i, j, v.to_vec()));
                }
            }
        }
        Self {
            name,
            class: alg.class(),
            dims: alg.dims().to_vec(),
            brackets,
        }
    }
}
