//! Argument parsing and dispatch for `ergocorr`.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use ergo_core::contrib::{contribution_report, tilde_report, ReportConfig, TildeContributions};
use ergo_core::closest::ExampleFamily;
use ergo_core::entropy::DiscordSearch;
use ergo_core::ergotropy::passive_state;
use serde::Serialize;
use serde_json::Value;

use crate::config::{ExperimentConfig, MuGrid, OutputFormat};
use crate::examples::{run_examples, run_selftest};
use crate::fig1::run_fig1;
use crate::fig2::run_fig2;
use crate::output::{num, opt_num, CsvRecord, Table};
use crate::record::SweepRecord;
use crate::statefile::read_state_file;
use crate::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "ergocorr", version, about = "Correlation contributions to ergotropy")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ergotropy and passive energy of a state file
    Ergotropy {
        state: PathBuf,
        #[command(flatten)]
        opts: Options,
    },
    /// All contributions for a state file, or for the two-qubit example
    /// family at `--mu` and `--R` when no file is given
    Report {
        state: Option<PathBuf>,
        #[command(flatten)]
        opts: Options,
    },
    /// Sweep of the example family over `--mu start:stop:step`
    Fig1 {
        #[command(flatten)]
        opts: Options,
    },
    /// Frequency of negative classical contributions for d_B = 2..=--db
    Fig2 {
        #[command(flatten)]
        opts: Options,
    },
    /// Worked examples: closed forms next to computed values
    Examples {
        #[command(flatten)]
        opts: Options,
    },
    /// Quick consistency checks; exits 2 if any fails
    Selftest {
        #[command(flatten)]
        opts: Options,
    },
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte Carlo samples per d_B
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long = "da")]
    pub d_a: Option<usize>,
    #[arg(long = "db")]
    pub d_b: Option<usize>,
    /// A value, or `start:stop:step` for sweeps
    #[arg(long)]
    pub mu: Option<MuGrid>,
    #[arg(long = "R")]
    pub r: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Write here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub shards: Option<usize>,
}

impl Options {
    pub fn config(&self) -> CliResult<ExperimentConfig> {
        let d = ExperimentConfig::default();
        let cfg = ExperimentConfig {
            seed: self.seed.unwrap_or(d.seed),
            n: self.n.unwrap_or(d.n),
            d_a: self.d_a.unwrap_or(d.d_a),
            d_b: self.d_b.unwrap_or(d.d_b),
            mu_grid: self.mu.unwrap_or(d.mu_grid),
            r: self.r.unwrap_or(d.r),
            epsilon: self.epsilon.unwrap_or(d.epsilon),
            beta: self.beta.or(d.beta),
            output_format: self.format.unwrap_or(d.output_format),
            shards: self.shards.unwrap_or(d.shards),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Serialize)]
struct ErgotropyRow {
    ergotropy: f64,
    energy_initial: f64,
    energy_passive: f64,
}

impl CsvRecord for ErgotropyRow {
    fn columns() -> &'static [&'static str] {
        &["ergotropy", "energy_initial", "energy_passive"]
    }

    fn fields(&self) -> Vec<String> {
        vec![num(self.ergotropy), num(self.energy_initial), num(self.energy_passive)]
    }
}

impl CsvRecord for TildeContributions {
    fn columns() -> &'static [&'static str] {
        &["tilde_t", "tilde_d", "tilde_e"]
    }

    fn fields(&self) -> Vec<String> {
        vec![num(self.tilde_t), num(self.tilde_d), opt_num(self.tilde_e)]
    }
}

fn emit(opts: &Options, text: &str) -> CliResult<()> {
    match &opts.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}

fn report(state: Option<&PathBuf>, cfg: &ExperimentConfig) -> CliResult<String> {
    let report_cfg = ReportConfig { beta: cfg.beta, ..ReportConfig::default() };
    let (s, h, parameter) = match state {
        Some(path) => {
            let f = read_state_file(path)?;
            (f.state, f.hamiltonian, f64::NAN)
        }
        None => {
            let mu = cfg.mu_grid.start;
            let fam = ExampleFamily::new(mu, cfg.r, cfg.epsilon)?;
            (fam.state(), fam.hamiltonian(), mu)
        }
    };
    if !h.is_non_interacting() {
        let tilde = tilde_report(&s, &h, &DiscordSearch::default())?;
        return Ok(Table::new("report_tilde", cfg.clone(), vec![tilde]).render(cfg.output_format));
    }
    let r = contribution_report(&s, &h, &report_cfg, None)?;
    Ok(match cfg.output_format {
        OutputFormat::Csv => Table::new("report", cfg.clone(), vec![SweepRecord::from_report(parameter, &r)]).to_csv(),
        OutputFormat::Json => {
            let mut v = serde_json::to_string_pretty(&serde_json::json!({
                "experiment": "report",
                "config": cfg,
                "report": r,
            }))
            .expect("report serialises");
            v.push('\n');
            v
        }
    })
}

fn dispatch(cmd: &Command) -> CliResult<(String, bool)> {
    match cmd {
        Command::Ergotropy { state, opts } => {
            let cfg = opts.config()?;
            let f = read_state_file(state)?;
            let r = passive_state(f.state.rho(), f.hamiltonian.total())?;
            let row = ErgotropyRow {
                ergotropy: r.ergotropy,
                energy_initial: r.energy_initial,
                energy_passive: r.energy_passive,
            };
            Ok((Table::new("ergotropy", cfg.clone(), vec![row]).render(cfg.output_format), true))
        }
        Command::Report { state, opts } => {
            let cfg = opts.config()?;
            Ok((report(state.as_ref(), &cfg)?, true))
        }
        Command::Fig1 { opts } => {
            let cfg = opts.config()?;
            let res = run_fig1(&cfg)?;
            let cells: Vec<Value> = res.flagged_cells().iter().map(|c| serde_json::json!([c.0, c.1])).collect();
            let table = Table::new("fig1", cfg.clone(), res.records)
                .with_summary("mu_c", res.mu_c.map_or(Value::Null, Value::from))
                .with_summary("flagged_cells", Value::from(cells));
            Ok((table.render(cfg.output_format), true))
        }
        Command::Fig2 { opts } => {
            let cfg = opts.config()?;
            let rows = run_fig2(&cfg)?;
            Ok((Table::new("fig2", cfg.clone(), rows).render(cfg.output_format), true))
        }
        Command::Examples { opts } => {
            let cfg = opts.config()?;
            let rows = run_examples(&cfg)?;
            let ok = rows.iter().all(|r| r.pass);
            Ok((Table::new("examples", cfg.clone(), rows).render(cfg.output_format), ok))
        }
        Command::Selftest { opts } => {
            let cfg = opts.config()?;
            let rows = run_selftest(&cfg)?;
            let ok = rows.iter().all(|r| r.pass);
            Ok((Table::new("selftest", cfg.clone(), rows).render(cfg.output_format), ok))
        }
    }
}

/// Runs one invocation and returns the process exit code: 0 on success,
/// 1 on a validation error, 2 on a numerical failure (including failed
/// checks in `examples` and `selftest`). Errors go to stderr as JSON.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version.
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let err = CliError::Validation(e.kind().to_string() + ": " + e.to_string().lines().next().unwrap_or(""));
            eprintln!("{}", err.to_json());
            return 1;
        }
    };
    let opts = match &cli.command {
        Command::Ergotropy { opts, .. }
        | Command::Report { opts, .. }
        | Command::Fig1 { opts }
        | Command::Fig2 { opts }
        | Command::Examples { opts }
        | Command::Selftest { opts } => opts.clone(),
    };
    let result = dispatch(&cli.command).and_then(|(text, ok)| emit(&opts, &text).map(|()| ok));
    match result {
        Ok(true) => 0,
        Ok(false) => {
            eprintln!(
                "{}",
                serde_json::json!({ "error": "check_failed", "message": "one or more rows exceed their tolerance" })
            );
            2
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}
