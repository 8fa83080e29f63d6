use serde::{Deserialize, Serialize};

use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Inclusive grid `start, start + step, ...` up to `stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl MuGrid {
    pub fn points(&self) -> Vec<f64> {
        // The small slack keeps `stop` when it is a rounded multiple of `step`.
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        let span = count as f64 * self.step;
        if count > 0 && (self.start + span - self.stop).abs() <= 1e-9 * self.step {
            // `stop` is on the grid: divide the span instead of accumulating
            // the step, so 0.57 prints as 0.57.
            let (a, b) = (self.start, self.stop);
            return (0..=count).map(|k| a + (b - a) * k as f64 / count as f64).collect();
        }
        (0..=count).map(|k| self.start + k as f64 * self.step).collect()
    }
}

impl std::str::FromStr for MuGrid {
    type Err = String;

    /// `start:stop:step`, or a single value.
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<f64> = s
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|e| format!("bad number `{p}`: {e}")))
            .collect::<Result<_, _>>()?;
        match parts[..] {
            [v] => Ok(Self { start: v, stop: v, step: 1.0 }),
            [start, stop, step] => Ok(Self { start, stop, step }),
            _ => Err(format!("expected `start:stop:step` or a number, got `{s}`")),
        }
    }
}

/// Everything needed to re-run an experiment. Echoed into every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Samples per local dimension in the Monte Carlo runs.
    pub n: usize,
    pub d_a: usize,
    /// Largest `d_B` of the Monte Carlo sweep, which starts at 2.
    pub d_b: usize,
    pub mu_grid: MuGrid,
    pub r: f64,
    pub epsilon: f64,
    /// Inverse temperature of the entropic bounds; `None` means
    /// `1 / energy scale`.
    pub beta: Option<f64>,
    pub output_format: OutputFormat,
    pub shards: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            n: 100_000,
            d_a: 2,
            d_b: 6,
            mu_grid: MuGrid { start: 0.0, stop: 1.0, step: 0.005 },
            r: 1.0,
            epsilon: 1.0,
            beta: None,
            output_format: OutputFormat::Csv,
            shards: 4,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> CliResult<()> {
        let bad = |field: &str, msg: String| Err(CliError::Validation(format!("{field}: {msg}")));
        let g = &self.mu_grid;
        if !(g.step > 0.0 && g.step.is_finite()) {
            return bad("mu_grid.step", format!("must be positive, got {}", g.step));
        }
        if !(0.0 <= g.start && g.start <= g.stop && g.stop <= 1.0) {
            return bad("mu_grid", format!("need 0 <= start <= stop <= 1, got {}:{}", g.start, g.stop));
        }
        if self.n == 0 {
            return bad("n", "must be at least 1".into());
        }
        if self.d_a < 2 || self.d_b < 2 {
            return bad("d_a/d_b", format!("dimensions must be at least 2, got {}x{}", self.d_a, self.d_b));
        }
        if self.shards == 0 {
            return bad("shards", "must be at least 1".into());
        }
        if !(self.r.is_finite() && self.r >= 0.0) {
            return bad("R", format!("must be finite and >= 0, got {}", self.r));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return bad("epsilon", format!("must be positive, got {}", self.epsilon));
        }
        if let Some(b) = self.beta {
            if !(b.is_finite() && b > 0.0) {
                return bad("beta", format!("must be positive, got {b}"));
            }
        }
        Ok(())
    }
}
