use ergo_core::contrib::ContributionReport;
use serde::Serialize;

use crate::output::{num, opt_num, CsvRecord};

/// Scalars of one [`ContributionReport`] at one sweep parameter value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub parameter: f64,
    pub beta: f64,
    pub ergotropy: f64,
    pub delta_t: f64,
    pub delta: f64,
    pub delta_c: f64,
    pub delta_l: f64,
    pub delta_e: Option<f64>,
    pub delta_prime: f64,
    pub delta_c_prime: f64,
    pub gap_eg: f64,
    pub coherence: f64,
    pub free_energy_gap: f64,
    pub tilde_t: f64,
    pub tilde_d: f64,
    pub decomposition_residual: f64,
    pub prime_decomposition_residual: f64,
    pub mutual_information: f64,
    pub discord: f64,
    pub disturbance: f64,
    pub eta_entropy: f64,
    pub energy_residual: f64,
    pub energy_degenerate: bool,
    pub marginal_degenerate: bool,
    pub infinite_term: bool,
    pub discontinuity: bool,
}

impl SweepRecord {
    pub fn from_report(parameter: f64, r: &ContributionReport) -> Self {
        Self {
            parameter,
            beta: r.beta,
            ergotropy: r.ergotropy,
            delta_t: r.delta_t,
            delta: r.delta,
            delta_c: r.delta_c,
            delta_l: r.delta_l,
            delta_e: r.delta_e,
            delta_prime: r.delta_prime,
            delta_c_prime: r.delta_c_prime,
            gap_eg: r.gap_eg,
            coherence: r.coherence,
            free_energy_gap: r.free_energy_gap,
            tilde_t: r.tilde.tilde_t,
            tilde_d: r.tilde.tilde_d,
            decomposition_residual: r.decomposition_residual,
            prime_decomposition_residual: r.prime_decomposition_residual,
            mutual_information: r.measures.mutual_information,
            discord: r.measures.discord,
            disturbance: r.measures.disturbance,
            eta_entropy: r.eta.entropy,
            energy_residual: r.eta.energy_residual,
            energy_degenerate: r.flags.energy_degenerate,
            marginal_degenerate: r.flags.marginal_degenerate,
            infinite_term: r.flags.infinite_term,
            discontinuity: r.flags.discontinuity,
        }
    }
}

impl CsvRecord for SweepRecord {
    fn columns() -> &'static [&'static str] {
        &[
            "parameter",
            "beta",
            "ergotropy",
            "delta_t",
            "delta",
            "delta_c",
            "delta_l",
            "delta_e",
            "delta_prime",
            "delta_c_prime",
            "gap_eg",
            "coherence",
            "free_energy_gap",
            "tilde_t",
            "tilde_d",
            "decomposition_residual",
            "prime_decomposition_residual",
            "mutual_information",
            "discord",
            "disturbance",
            "eta_entropy",
            "energy_residual",
            "energy_degenerate",
            "marginal_degenerate",
            "infinite_term",
            "discontinuity",
        ]
    }

    fn fields(&self) -> Vec<String> {
        let mut f: Vec<String> = [
            self.parameter,
            self.beta,
            self.ergotropy,
            self.delta_t,
            self.delta,
            self.delta_c,
            self.delta_l,
        ]
        .into_iter()
        .map(num)
        .collect();
        f.push(opt_num(self.delta_e));
        f.extend(
            [
                self.delta_prime,
                self.delta_c_prime,
                self.gap_eg,
                self.coherence,
                self.free_energy_gap,
                self.tilde_t,
                self.tilde_d,
                self.decomposition_residual,
                self.prime_decomposition_residual,
                self.mutual_information,
                self.discord,
                self.disturbance,
                self.eta_entropy,
                self.energy_residual,
            ]
            .into_iter()
            .map(num),
        );
        f.extend(
            [
                self.energy_degenerate,
                self.marginal_degenerate,
                self.infinite_term,
                self.discontinuity,
            ]
            .map(|b| b.to_string()),
        );
        f
    }
}
