//! Monte Carlo estimate of how often the classical-correlation contribution
//! is negative, per `d_B`.
//!
//! Tables are flat Dirichlet samples; local spectra are sorted i.i.d.
//! uniform draws on `[0, 1]`. Other sampling laws give other rates; only the
//! trend in `d_B` is meant to carry over.

use ergo_core::contrib::delta_classical_table;
use ergo_core::qstate::random::{random_local_spectra, random_simplex, shard_rng};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::output::{num, CsvRecord};
use crate::{parallel_map, CliResult};

/// Values below this count as negative; anything above is rounding dust.
pub const NEGATIVE_THRESHOLD: f64 = -1e-12;
/// Two-sided 95% normal quantile.
pub const WILSON_Z: f64 = 1.959963984540054;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fig2Row {
    pub d_a: usize,
    pub d_b: usize,
    pub n: usize,
    pub negatives: usize,
    pub estimate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
}

impl CsvRecord for Fig2Row {
    fn columns() -> &'static [&'static str] {
        &["d_a", "d_b", "n", "negatives", "estimate", "wilson_low", "wilson_high"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.d_a.to_string(),
            self.d_b.to_string(),
            self.n.to_string(),
            self.negatives.to_string(),
            num(self.estimate),
            num(self.wilson_low),
            num(self.wilson_high),
        ]
    }
}

/// Wilson score interval for `k` successes out of `n`.
pub fn wilson_interval(k: usize, n: usize, z: f64) -> (f64, f64) {
    let n_f = n as f64;
    let p = k as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let centre = (p + z2 / (2.0 * n_f)) / denom;
    let half = z / denom * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt();
    // The endpoints are exact at k = 0 and k = n; keep rounding out of them.
    let low = if k == 0 { 0.0 } else { (centre - half).max(0.0) };
    let high = if k == n { 1.0 } else { (centre + half).min(1.0) };
    (low, high)
}

/// Sample counts per shard; the first `n % shards` shards take one extra.
fn shard_sizes(n: usize, shards: usize) -> Vec<usize> {
    (0..shards).map(|s| n / shards + usize::from(s < n % shards)).collect()
}

fn count_negatives(cfg: &ExperimentConfig, d_b: usize, shard: usize, samples: usize) -> CliResult<usize> {
    let mut rng = shard_rng(cfg.seed, shard as u64, d_b as u64);
    let mut negatives = 0;
    for _ in 0..samples {
        let p = random_simplex(cfg.d_a * d_b, &mut rng);
        let eps_a = random_local_spectra(cfg.d_a, &mut rng);
        let eps_b = random_local_spectra(d_b, &mut rng);
        if delta_classical_table(&p, &eps_a, &eps_b)?.value < NEGATIVE_THRESHOLD {
            negatives += 1;
        }
    }
    Ok(negatives)
}

/// One row per `d_B` in `2..=cfg.d_b`. Shards run in parallel and are
/// merged in index order, so the output depends only on the config.
pub fn run_fig2(cfg: &ExperimentConfig) -> CliResult<Vec<Fig2Row>> {
    cfg.validate()?;
    let sizes = shard_sizes(cfg.n, cfg.shards);
    let jobs: Vec<(usize, usize)> = (2..=cfg.d_b)
        .flat_map(|d_b| (0..cfg.shards).map(move |s| (d_b, s)))
        .collect();
    let counts = parallel_map(&jobs, |&(d_b, s)| count_negatives(cfg, d_b, s, sizes[s]));
    let counts: Vec<usize> = counts.into_iter().collect::<CliResult<_>>()?;
    Ok((2..=cfg.d_b)
        .zip(counts.chunks(cfg.shards))
        .map(|(d_b, c)| {
            let negatives: usize = c.iter().sum();
            let (wilson_low, wilson_high) = wilson_interval(negatives, cfg.n, WILSON_Z);
            Fig2Row {
                d_a: cfg.d_a,
                d_b,
                n: cfg.n,
                negatives,
                estimate: negatives as f64 / cfg.n as f64,
                wilson_low,
                wilson_high,
            }
        })
        .collect())
}

/// `true` when no row lies significantly above its predecessor, that is
/// when every Wilson interval reaches down to the previous one.
pub fn non_increasing_within_intervals(rows: &[Fig2Row]) -> bool {
    rows.windows(2).all(|w| w[1].wilson_low <= w[0].wilson_high)
}
