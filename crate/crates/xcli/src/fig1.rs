//! `delta` across the two-qubit example family, with the branch switch of
//! the energy-constrained closest classical state located on the grid.

use ergo_core::closest::{branch_jumps, CurveSearch, ExampleFamily};
use ergo_core::contrib::{contribution_report, ReportConfig};
use ergo_core::ComplexMatrix;

use crate::config::ExperimentConfig;
use crate::record::SweepRecord;
use crate::{parallel_map, CliResult};

#[derive(Debug, Clone)]
pub struct Fig1Result {
    pub records: Vec<SweepRecord>,
    /// Midpoint of the first flagged grid cell above `mu = 1/2`.
    pub mu_c: Option<f64>,
}

impl Fig1Result {
    /// Grid cells `(mu_k, mu_{k+1})` with the discontinuity flag, as lower
    /// endpoints.
    pub fn flagged_cells(&self) -> Vec<(f64, f64)> {
        self.records
            .windows(2)
            .filter(|w| w[1].discontinuity)
            .map(|w| (w[0].parameter, w[1].parameter))
            .collect()
    }
}

pub fn run_fig1(cfg: &ExperimentConfig) -> CliResult<Fig1Result> {
    cfg.validate()?;
    let grid = cfg.mu_grid.points();
    let report_cfg = ReportConfig {
        beta: cfg.beta,
        ..ReportConfig::default()
    };
    let curve = CurveSearch::default();
    let results = parallel_map(&grid, |&mu| -> CliResult<(SweepRecord, ComplexMatrix)> {
        let fam = ExampleFamily::new(mu, cfg.r, cfg.epsilon)?;
        let eta = fam.constrained_closest(&curve)?;
        let eta_matrix = eta.eta.to_matrix();
        let report = contribution_report(&fam.state(), &fam.hamiltonian(), &report_cfg, Some(eta))?;
        Ok((SweepRecord::from_report(mu, &report), eta_matrix))
    });
    let (mut records, etas): (Vec<SweepRecord>, Vec<ComplexMatrix>) =
        results.into_iter().collect::<CliResult<Vec<_>>>()?.into_iter().unzip();

    let mut mu_c = None;
    for (k, jump) in branch_jumps(&etas).into_iter().enumerate() {
        if jump {
            records[k + 1].discontinuity = true;
            let mid = 0.5 * (grid[k] + grid[k + 1]);
            if mu_c.is_none() && mid > 0.5 {
                mu_c = Some(mid);
            }
        }
    }
    Ok(Fig1Result { records, mu_c })
}
