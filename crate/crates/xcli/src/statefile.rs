//! JSON state files:
//!
//! ```json
//! {
//!   "d_a": 2, "d_b": 2,
//!   "rho": [[[0.5, 0.0], [0.0, 0.0], ...], ...],
//!   "H": {"kind": "non_interacting", "h_a": [[[0, 0], [0, 0]], [[0, 0], [1, 0]]], "h_b": ...}
//! }
//! ```
//!
//! Matrices are row-major lists of rows; each entry is `[re, im]`. A general
//! Hamiltonian is `{"kind": "general", "h": ...}` on the full space.

use std::path::Path;

use ergo_core::{c64, BipartiteHamiltonian, BipartiteState, ComplexMatrix};
use serde::Deserialize;

use crate::{CliError, CliResult};

type RawMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawHamiltonian {
    NonInteracting { h_a: RawMatrix, h_b: RawMatrix },
    General { h: RawMatrix },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStateFile {
    d_a: usize,
    d_b: usize,
    rho: RawMatrix,
    #[serde(rename = "H")]
    h: RawHamiltonian,
}

#[derive(Debug, Clone)]
pub struct StateFile {
    pub state: BipartiteState,
    pub hamiltonian: BipartiteHamiltonian,
}

fn matrix(field: &str, raw: &RawMatrix, dim: usize) -> CliResult<ComplexMatrix> {
    if raw.len() != dim {
        return Err(CliError::Validation(format!("{field}: expected {dim} rows, found {}", raw.len())));
    }
    let mut rows = Vec::with_capacity(dim);
    for (i, row) in raw.iter().enumerate() {
        if row.len() != dim {
            return Err(CliError::Validation(format!(
                "{field}[{i}]: expected {dim} entries, found {}",
                row.len()
            )));
        }
        if let Some(j) = row.iter().position(|z| !(z[0].is_finite() && z[1].is_finite())) {
            return Err(CliError::Validation(format!("{field}[{i}][{j}]: entry is not finite")));
        }
        rows.push(row.iter().map(|z| c64(z[0], z[1])).collect());
    }
    ComplexMatrix::from_rows(&rows).map_err(|e| CliError::Validation(format!("{field}: {e}")))
}

pub fn parse_state_file(text: &str) -> CliResult<StateFile> {
    let raw: RawStateFile =
        serde_json::from_str(text).map_err(|e| CliError::Validation(format!("state file: {e}")))?;
    if raw.d_a < 2 || raw.d_b < 2 {
        return Err(CliError::Validation(format!(
            "d_a/d_b: dimensions must be at least 2, got {}x{}",
            raw.d_a, raw.d_b
        )));
    }
    let n = raw.d_a * raw.d_b;
    let rho = matrix("rho", &raw.rho, n)?;
    let state = BipartiteState::new(rho, raw.d_a, raw.d_b)
        .map_err(|e| CliError::Validation(format!("rho: {e}")))?;
    let hamiltonian = match &raw.h {
        RawHamiltonian::NonInteracting { h_a, h_b } => BipartiteHamiltonian::non_interacting(
            matrix("H.h_a", h_a, raw.d_a)?,
            matrix("H.h_b", h_b, raw.d_b)?,
        ),
        RawHamiltonian::General { h } => BipartiteHamiltonian::general(matrix("H.h", h, n)?, raw.d_a, raw.d_b),
    }
    .map_err(|e| CliError::Validation(format!("H: {e}")))?;
    Ok(StateFile { state, hamiltonian })
}

pub fn read_state_file(path: &Path) -> CliResult<StateFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    parse_state_file(&text)
}
