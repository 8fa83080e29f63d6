//! Experiment runners and the `ergocorr` command line for `ergo_core`.
//!
//! - [`fig1`]: `delta` across the two-qubit example family and the location
//!   of its discontinuity.
//! - [`fig2`]: Monte Carlo frequency of a negative classical-correlation
//!   contribution versus `d_B`.
//! - [`examples`]: closed-form values of the worked examples against the
//!   computed ones.
//!
//! Every output embeds its [`ExperimentConfig`]; identical configs give
//! byte-identical files.

pub mod cli;
pub mod config;
pub mod examples;
pub mod fig1;
pub mod fig2;
pub mod output;
pub mod record;
pub mod statefile;

pub use config::{ExperimentConfig, MuGrid, OutputFormat};
pub use record::SweepRecord;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, config or input file.
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] ergo_core::Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    /// 1 for bad input, 2 for a numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "validation",
            CliError::Core(e) if e.is_numerical() => "numerical",
            CliError::Core(_) => "invalid_input",
            CliError::Io(_) => "io",
        }
    }

    /// `{"error": kind, "message": text}` for stderr.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self.kind(), "message": self.to_string() }).to_string()
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Maps `f` over `items` on scoped threads, one contiguous chunk per
/// thread; the output keeps input order.
pub fn parallel_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let threads = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(items.len())
        .max(1);
    let chunk = items.len().div_ceil(threads).max(1);
    let f = &f;
    std::thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|c| s.spawn(move || c.iter().map(f).collect::<Vec<R>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker thread panicked"))
            .collect()
    })
}
