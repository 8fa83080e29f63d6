//! Closed-form values of the worked examples next to what the library
//! computes for them.

use std::f64::consts::LN_2;

use ergo_core::closest::{constrained_closest_classical, ConstrainedSearch, ExampleFamily, HorodeckiFamily, HorodeckiSign};
use ergo_core::contrib::{delta_classical_table, delta_discord, delta_discord_pure, delta_entanglement, tilde_report};
use ergo_core::entropy::{discord_and_closest_classical, DiscordSearch};
use ergo_core::ergotropy::passive_energy_of;
use ergo_core::{c64, BipartiteHamiltonian, BipartiteState};
use serde::Serialize;

use crate::config::{ExperimentConfig, MuGrid};
use crate::fig1::run_fig1;
use crate::fig2::run_fig2;
use crate::output::{num, CsvRecord};
use crate::CliResult;

/// The table and local spectra of the `2 x 3` negative-contribution example.
pub const COUNTEREXAMPLE_TABLE: [f64; 6] = [0.27, 0.04, 0.23, 0.26, 0.03, 0.17];
pub const COUNTEREXAMPLE_EPS_A: [f64; 2] = [0.0, 0.6];
pub const COUNTEREXAMPLE_EPS_B: [f64; 3] = [0.0, 0.6, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    /// A published closed form or number.
    Quoted,
    /// Worked out by hand from the definitions.
    HandComputed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExampleRow {
    pub quantity: String,
    pub source: Source,
    pub expected: f64,
    pub computed: f64,
    pub abs_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl ExampleRow {
    fn new(quantity: impl Into<String>, source: Source, expected: f64, computed: f64, tolerance: f64) -> Self {
        let abs_error = (computed - expected).abs();
        Self {
            quantity: quantity.into(),
            source,
            expected,
            computed,
            abs_error,
            tolerance,
            pass: abs_error <= tolerance,
        }
    }
}

impl CsvRecord for ExampleRow {
    fn columns() -> &'static [&'static str] {
        &["quantity", "source", "expected", "computed", "abs_error", "tolerance", "pass"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.quantity.clone(),
            format!("{:?}", self.source).to_lowercase(),
            num(self.expected),
            num(self.computed),
            num(self.abs_error),
            num(self.tolerance),
            self.pass.to_string(),
        ]
    }
}

fn qubit_pair(eps: f64) -> BipartiteHamiltonian {
    BipartiteHamiltonian::local_diagonal(&[0.0, eps], &[0.0, eps])
}

fn two_term_pure(w: f64) -> BipartiteState {
    let z = c64(0.0, 0.0);
    BipartiteState::from_pure(&[c64(w.sqrt(), 0.0), z, z, c64((1.0 - w).sqrt(), 0.0)], 2, 2)
        .expect("normalised")
}

fn example_family_rows(eps: f64, rows: &mut Vec<ExampleRow>) -> CliResult<()> {
    let search = ConstrainedSearch::default();
    for r in [0.5, 1.0, 2.0] {
        for mu in [0.1, 0.25, 0.4, 0.5] {
            let fam = ExampleFamily::new(mu, r, eps)?;
            let (s, h) = (fam.state(), fam.hamiltonian());
            let eta = constrained_closest_classical(&s, &h, &search)?;
            let delta = delta_discord(&s, &h, &eta.eta)?;
            let (expected, tol) = if r == 1.0 { (0.0, 1e-9) } else { ((1.0 - r).abs() * eps * mu / 2.0, 1e-5) };
            rows.push(ExampleRow::new(format!("delta mu={mu} R={r}"), Source::Quoted, expected, delta, tol));
        }
    }
    let discord = DiscordSearch::default();
    for mu in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let fam = ExampleFamily::new(mu, 1.0, eps)?;
        let d = discord_and_closest_classical(&fam.state(), &discord)?.discord;
        rows.push(ExampleRow::new(format!("D mu={mu}"), Source::Quoted, mu.min(1.0 - mu) * LN_2, d, 1e-4));
    }
    for (mu, r) in [(0.3, 0.5), (0.3, 2.0), (0.8, 0.5), (0.8, 2.0)] {
        let fam = ExampleFamily::new(mu, r, eps)?;
        let e = passive_energy_of(fam.state().rho(), fam.hamiltonian().spectrum())?;
        let expected = r.min(1.0) * eps * mu.min(1.0 - mu);
        rows.push(ExampleRow::new(format!("E(P_rho) mu={mu} R={r}"), Source::Quoted, expected, e, 1e-10));
    }
    Ok(())
}

fn horodecki_rows(eps: f64, rows: &mut Vec<ExampleRow>) -> CliResult<()> {
    let h = qubit_pair(eps);
    let half = HorodeckiFamily::new(0.5, HorodeckiSign::Plus)?;
    rows.push(ExampleRow::new("delta_E p=0.5", Source::Quoted, -0.0625 * eps, delta_entanglement(&half, &h)?, 1e-10));
    let tilde = tilde_report(&half.to_state(), &h, &DiscordSearch::default())?;
    rows.push(ExampleRow::new(
        "tilde delta_E p=0.5",
        Source::Quoted,
        -0.0625 * eps,
        tilde.tilde_e.unwrap_or(f64::NAN),
        1e-10,
    ));
    let pure = HorodeckiFamily::new(1.0, HorodeckiSign::Plus)?;
    rows.push(ExampleRow::new("delta_E p=1", Source::HandComputed, eps / 2.0, delta_entanglement(&pure, &h)?, 1e-10));
    Ok(())
}

fn classical_rows(rows: &mut Vec<ExampleRow>) -> CliResult<()> {
    let form = delta_classical_table(&COUNTEREXAMPLE_TABLE, &COUNTEREXAMPLE_EPS_A, &COUNTEREXAMPLE_EPS_B)?;
    for (k, expected) in [(0, -0.0162), (2, 0.014), (4, 0.0022)] {
        rows.push(ExampleRow::new(
            format!("counterexample x_{}", k + 1),
            Source::Quoted,
            expected,
            form.partial_sums[k],
            1e-10,
        ));
    }
    rows.push(ExampleRow::new("counterexample delta_C", Source::HandComputed, -0.00324, form.value, 1e-10));
    // Sorted 2 x 2 table: p_11 >= p_12 >= p_21 >= p_22.
    let sorted = delta_classical_table(&[0.4, 0.3, 0.2, 0.1], &[0.0, 0.7], &[0.0, 0.4])?;
    rows.push(ExampleRow::new("delta_C sorted 2x2", Source::Quoted, 0.0, sorted.value, 1e-12));
    Ok(())
}

fn pure_rows(eps: f64, rows: &mut Vec<ExampleRow>) -> CliResult<()> {
    let h = qubit_pair(eps);
    for (w, expected) in [(0.5, eps / 2.0), (0.8, 0.2 * eps)] {
        let s = two_term_pure(w);
        rows.push(ExampleRow::new(format!("pure delta w={w}"), Source::HandComputed, expected, delta_discord_pure(&s, &h)?, 1e-12));
        let eta = constrained_closest_classical(&s, &h, &ConstrainedSearch::default())?;
        rows.push(ExampleRow::new(
            format!("pure delta (search) w={w}"),
            Source::HandComputed,
            expected,
            delta_discord(&s, &h, &eta.eta)?,
            1e-5,
        ));
    }
    Ok(())
}

/// The cheap rows: no sweeps and no example-family searches.
pub fn run_selftest(cfg: &ExperimentConfig) -> CliResult<Vec<ExampleRow>> {
    cfg.validate()?;
    let mut rows = Vec::new();
    horodecki_rows(cfg.epsilon, &mut rows)?;
    classical_rows(&mut rows)?;
    pure_rows(cfg.epsilon, &mut rows)?;
    Ok(rows)
}

/// Every row; the sweeps use `cfg.seed` and at most `10^4` samples.
pub fn run_examples(cfg: &ExperimentConfig) -> CliResult<Vec<ExampleRow>> {
    cfg.validate()?;
    let eps = cfg.epsilon;
    let mut rows = Vec::new();
    example_family_rows(eps, &mut rows)?;
    horodecki_rows(eps, &mut rows)?;
    classical_rows(&mut rows)?;
    pure_rows(eps, &mut rows)?;

    let sweep = ExperimentConfig {
        r: 1.0,
        mu_grid: MuGrid { start: 0.0, stop: 1.0, step: 0.005 },
        ..cfg.clone()
    };
    let fig1 = run_fig1(&sweep)?;
    rows.push(ExampleRow::new("mu_c(R=1)", Source::Quoted, 0.57, fig1.mu_c.unwrap_or(f64::NAN), 0.03));
    let mc = ExperimentConfig { d_b: 2, n: cfg.n.min(10_000), ..cfg.clone() };
    let two = &run_fig2(&mc)?[0];
    rows.push(ExampleRow::new("P(delta_C < 0) 2x2", Source::Quoted, 0.0, two.estimate, 0.0));
    Ok(rows)
}
