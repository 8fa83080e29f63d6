//! Acceptance suite: one PASS/FAIL line per criterion, then a summary.
//!
//! Exits non-zero only for failures outside [`KNOWN_UNATTAINABLE`]; those
//! still print FAIL.

use std::f64::consts::LN_2;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use ergo_core::closest::{
    constrained_closest_classical, horodecki_closest_separable, ConstrainedSearch, ExampleFamily,
    HorodeckiFamily, HorodeckiSign,
};
use ergo_core::contrib::{
    contribution_report, delta_classical, delta_classical_table, delta_discord, delta_discord_pure,
    delta_entanglement, ReportConfig,
};
use ergo_core::entropy::{discord_and_closest_classical, DiscordSearch};
use ergo_core::ergotropy::{passive_energy_of, passive_state, same_energy_mixture, thermal_identity_gap};
use ergo_core::qstate::random::{
    random_classical, random_hermitian, random_local_spectra, random_pure_state, random_state,
    random_unitary, rng_from_seed,
};
use ergo_core::qstate::schmidt_decompose;
use ergo_core::{hermitian_eig, BipartiteHamiltonian};
use ergo_xcli::config::{ExperimentConfig, MuGrid};
use ergo_xcli::fig1::run_fig1;
use ergo_xcli::fig2::{non_increasing_within_intervals, run_fig2};

// Pinned tolerances, one per check.
const TOL_CLOSED_FORM_DELTA: f64 = 1e-5;
const TOL_ZERO_DELTA: f64 = 1e-9;
const DISCORD_FRACTION: f64 = 0.9;
const MU_C_WINDOW: (f64, f64) = (0.55, 0.60);
const TOL_DISCORD: f64 = 1e-4;
const TOL_PASSIVE_ENERGY: f64 = 1e-10;
const TOL_HORODECKI_DELTA_E: f64 = 1e-10;
const TOL_HORODECKI_ENERGY: f64 = 1e-12;
const TOL_PARTIAL_SUM: f64 = 1e-10;
const TOL_PARTIAL_SUM_TOTAL: f64 = 1e-12;
const NEGATIVE_THRESHOLD: f64 = -1e-12;
const TOL_IDENTITY: f64 = 1e-7;
const TOL_SIGN: f64 = 1e-9;
const TOL_DECOMPOSITION: f64 = 1e-5;
const TOL_PRIME_DECOMPOSITION: f64 = 1e-8;
const TOL_BRACKET: f64 = 1e-7;
const TOL_PERMUTATION: f64 = 1e-12;
const TOL_UNITARY_ORACLE: f64 = 1e-9;
const TOL_PURE_DELTA: f64 = 1e-4;
const TOL_SCHMIDT: f64 = 1e-6;

/// Criteria that cannot hold as written; the ledger has the analysis.
const KNOWN_UNATTAINABLE: &[u32] = &[8];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, limit_s: u64) -> bool {
    elapsed.as_secs_f64() < limit_s as f64
}

fn crit_1() -> Outcome {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    for r in [0.5, 2.0] {
        for mu in [0.1, 0.25, 0.4, 0.5] {
            let fam = ExampleFamily::new(mu, r, 1.0).unwrap();
            let (s, h) = (fam.state(), fam.hamiltonian());
            let eta = constrained_closest_classical(&s, &h, &ConstrainedSearch::default()).unwrap();
            let delta = delta_discord(&s, &h, &eta.eta).unwrap();
            worst = worst.max((delta - (1.0 - r).abs() * mu / 2.0).abs());
        }
    }
    let el = t.elapsed();
    outcome(
        worst <= TOL_CLOSED_FORM_DELTA && within(el, 10),
        format!("max |delta - |1-R| eps mu/2| = {worst:.2e}, {:.1} s", el.as_secs_f64()),
    )
}

fn crit_2() -> Outcome {
    let t = Instant::now();
    let (mut max_delta, mut min_ratio) = (0.0f64, f64::INFINITY);
    for mu in [0.1, 0.25, 0.4, 0.5] {
        let fam = ExampleFamily::new(mu, 1.0, 1.0).unwrap();
        let (s, h) = (fam.state(), fam.hamiltonian());
        let eta = constrained_closest_classical(&s, &h, &ConstrainedSearch::default()).unwrap();
        max_delta = max_delta.max(delta_discord(&s, &h, &eta.eta).unwrap());
        let d = discord_and_closest_classical(&s, &DiscordSearch::default()).unwrap().discord;
        min_ratio = min_ratio.min(d / (mu.min(1.0 - mu) * LN_2));
    }
    let el = t.elapsed();
    outcome(
        max_delta <= TOL_ZERO_DELTA && min_ratio >= DISCORD_FRACTION && within(el, 10),
        format!(
            "max delta = {max_delta:.2e}, min D / closed form = {min_ratio:.6}, {:.1} s",
            el.as_secs_f64()
        ),
    )
}

/// Criteria 3 and 4 share the sweep.
fn sweep() -> (ergo_xcli::fig1::Fig1Result, Duration) {
    let cfg = ExperimentConfig {
        r: 1.0,
        mu_grid: MuGrid { start: 0.0, stop: 1.0, step: 0.005 },
        ..Default::default()
    };
    let t = Instant::now();
    let res = run_fig1(&cfg).unwrap();
    (res, t.elapsed())
}

fn crit_3(res: &ergo_xcli::fig1::Fig1Result, el: Duration) -> Outcome {
    let cells: Vec<(f64, f64)> = res
        .flagged_cells()
        .into_iter()
        .filter(|&(lo, hi)| lo > 0.5 && hi < 1.0)
        .collect();
    let mu_c = res.mu_c.unwrap_or(f64::NAN);
    let low_ok = res
        .records
        .iter()
        .filter(|r| r.parameter <= 0.5)
        .all(|r| r.delta <= TOL_ZERO_DELTA);
    outcome(
        cells.len() == 1 && (MU_C_WINDOW.0..=MU_C_WINDOW.1).contains(&mu_c) && low_ok && within(el, 300),
        format!(
            "mu_c = {mu_c}, flagged cells in (0.5, 1): {cells:?}, delta <= 1e-9 for mu <= 1/2: {low_ok}, {:.1} s",
            el.as_secs_f64()
        ),
    )
}

fn crit_4(res: &ergo_xcli::fig1::Fig1Result) -> Outcome {
    let worst_d = res
        .records
        .iter()
        .map(|r| (r.discord - r.parameter.min(1.0 - r.parameter) * LN_2).abs())
        .fold(0.0, f64::max);
    let mut worst_e: f64 = 0.0;
    for r in [0.5, 1.0, 2.0] {
        for rec in &res.records {
            let mu = rec.parameter;
            let fam = ExampleFamily::new(mu, r, 1.0).unwrap();
            let e = passive_energy_of(fam.state().rho(), fam.hamiltonian().spectrum()).unwrap();
            worst_e = worst_e.max((e - r.min(1.0) * mu.min(1.0 - mu)).abs());
        }
    }
    outcome(
        worst_d <= TOL_DISCORD && worst_e <= TOL_PASSIVE_ENERGY,
        format!("max discord error {worst_d:.2e} over the grid, max E(P_rho) error {worst_e:.2e}"),
    )
}

fn crit_5() -> Outcome {
    let mut worst_de: f64 = 0.0;
    for eps in [1.0, 0.37, 2.5] {
        let h = BipartiteHamiltonian::local_diagonal(&[0.0, eps], &[0.0, eps]);
        for sign in [HorodeckiSign::Plus, HorodeckiSign::Minus] {
            let fam = HorodeckiFamily::new(0.5, sign).unwrap();
            worst_de = worst_de.max((delta_entanglement(&fam, &h).unwrap() + 0.0625 * eps).abs());
        }
    }
    let h = BipartiteHamiltonian::local_diagonal(&[0.0, 1.0], &[0.0, 1.0]);
    let mut worst_e: f64 = 0.0;
    for k in 0..=20 {
        for sign in [HorodeckiSign::Plus, HorodeckiSign::Minus] {
            let fam = HorodeckiFamily::new(k as f64 * 0.05, sign).unwrap();
            let sigma = horodecki_closest_separable(&fam);
            worst_e = worst_e.max((sigma.energy(&h) - fam.to_state().energy(&h)).abs());
        }
    }
    outcome(
        worst_de <= TOL_HORODECKI_DELTA_E && worst_e <= TOL_HORODECKI_ENERGY,
        format!("max |delta_E + 0.0625 eps| = {worst_de:.2e}, max |E(sigma) - E(rho)| = {worst_e:.2e}"),
    )
}

/// Partial sums of sorted table minus sorted product of marginals, by hand.
fn partial_sums_oracle(p: &[f64], d_a: usize, d_b: usize) -> Vec<f64> {
    let mut r = p.to_vec();
    r.sort_by(|a, b| b.total_cmp(a));
    let row: Vec<f64> = (0..d_a).map(|i| (0..d_b).map(|j| p[i * d_b + j]).sum()).collect();
    let col: Vec<f64> = (0..d_b).map(|j| (0..d_a).map(|i| p[i * d_b + j]).sum()).collect();
    let mut q: Vec<f64> = row.iter().flat_map(|a| col.iter().map(move |b| a * b)).collect();
    q.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    r.iter()
        .zip(&q)
        .take(p.len() - 1)
        .map(|(x, y)| {
            acc += x - y;
            acc
        })
        .collect()
}

fn crit_6() -> Outcome {
    let p = [0.27, 0.04, 0.23, 0.26, 0.03, 0.17];
    let (eps_a, eps_b) = ([0.0, 0.6], [0.0, 0.6, 1.0]);
    let form = delta_classical_table(&p, &eps_a, &eps_b).unwrap();
    let oracle = partial_sums_oracle(&p, 2, 3);
    let x = [form.partial_sums[0], form.partial_sums[2], form.partial_sums[4]];
    let stated = [-0.0162, 0.014, 0.0022];
    let err = x.iter().zip(stated).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let oracle_err = form
        .partial_sums
        .iter()
        .zip(&oracle)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    // delta_C from the three-gap form with the spectrum sorted by hand:
    // 0, 0.6, 0.6, 1.0, 1.2, 1.6.
    let three_gap = 0.6 * stated[0] + 0.4 * stated[1] + 0.4 * stated[2];
    let h = BipartiteHamiltonian::local_diagonal(&eps_a, &eps_b);
    let chi = ergo_core::ClassicalState::computational(p.to_vec(), 2, 3).unwrap();
    let delta_c = delta_classical(&chi, &h).unwrap().value;
    let pass = err <= TOL_PARTIAL_SUM
        && oracle_err <= TOL_PARTIAL_SUM
        && x[1] + x[2] >= 0.0
        && (x[0] + x[1] + x[2]).abs() <= TOL_PARTIAL_SUM_TOTAL
        && delta_c < 0.0
        && (delta_c - three_gap).abs() <= TOL_PARTIAL_SUM;
    outcome(
        pass,
        format!(
            "x = ({:.6}, {:.6}, {:.6}), max error {err:.1e}, oracle error {oracle_err:.1e}, delta_C = {delta_c:.6} (hand value {three_gap:.6})",
            x[0], x[1], x[2]
        ),
    )
}

fn crit_7() -> Outcome {
    let t = Instant::now();
    let mut rng = rng_from_seed(7007);
    let mut negatives = 0;
    let mut lowest = f64::INFINITY;
    for _ in 0..10_000 {
        let chi = random_classical(2, 2, &mut rng);
        let h = BipartiteHamiltonian::local_diagonal(&random_local_spectra(2, &mut rng), &random_local_spectra(2, &mut rng));
        let v = delta_classical(&chi, &h).unwrap().value;
        lowest = lowest.min(v);
        if v < NEGATIVE_THRESHOLD {
            negatives += 1;
        }
    }
    let el = t.elapsed();
    outcome(
        negatives == 0 && within(el, 30),
        format!("{negatives} negatives in 10^4, min delta_C = {lowest:.2e}, {:.1} s", el.as_secs_f64()),
    )
}

fn crit_8() -> Outcome {
    let t = Instant::now();
    let cfg = ExperimentConfig {
        n: 10_000,
        d_a: 2,
        d_b: 6,
        seed: 2,
        ..Default::default()
    };
    let rows = run_fig2(&cfg).unwrap();
    let el = t.elapsed();
    let zero_at_two = rows[0].negatives == 0;
    let trend_above_two = non_increasing_within_intervals(&rows[1..]);
    let literal = non_increasing_within_intervals(&rows);
    let est: Vec<String> = rows.iter().map(|r| format!("{}:{:.4}", r.d_b, r.estimate)).collect();
    outcome(
        zero_at_two && literal && within(el, 300),
        format!(
            "estimates [{}]; estimate(2) = 0: {zero_at_two}; non-increasing for d_b >= 3: {trend_above_two}; \
             non-increasing over 2..6 as written: {literal}",
            est.join(", ")
        ),
    )
}

fn crit_9() -> Outcome {
    let mut rng = rng_from_seed(9009);
    let (mut pairs, mut worst, mut infinite) = (0, 0.0f64, 0);
    for &(d_a, d_b) in &[(2, 2), (2, 3)] {
        let n = d_a * d_b;
        let mut made = 0;
        while made < 50 {
            let rho = random_state(d_a, d_b, n, &mut rng).into_rho();
            let h = random_hermitian(n, &mut rng);
            let Some(eta) = same_energy_mixture(&rho, &h, &mut rng, 1000) else {
                continue;
            };
            made += 1;
            let spec = hermitian_eig(&h).unwrap().eigenvalues;
            let scale = spec[n - 1] - spec[0];
            for f in [0.5, 1.0, 2.0] {
                let c = thermal_identity_gap(&rho, &eta, &h, f / scale).unwrap();
                if c.infinite_term {
                    infinite += 1;
                } else {
                    worst = worst.max(c.gap);
                }
            }
        }
        pairs += made;
    }
    outcome(
        pairs == 100 && worst <= TOL_IDENTITY,
        format!("{pairs} pairs, max residual {worst:.2e}, {infinite} infinite cases skipped"),
    )
}

fn crit_10() -> Outcome {
    // Lighter searches: the checked relations hold for any feasible eta and
    // any chi no worse than eta, not only at the optimum.
    let cfg = ReportConfig {
        beta: None,
        discord: DiscordSearch {
            multistarts: 8,
            ..DiscordSearch::default()
        },
        constrained: ConstrainedSearch {
            multistarts: 8,
            ..ConstrainedSearch::default()
        },
    };
    let t = Instant::now();
    let mut rng = rng_from_seed(1010);
    let mut failures = Vec::new();
    let mut worst_decomp: f64 = 0.0;
    let mut worst_prime: f64 = 0.0;
    for k in 0..1000 {
        let d_b = if k % 2 == 0 { 2 } else { 3 };
        let s = random_state(2, d_b, 2 * d_b, &mut rng);
        let h = BipartiteHamiltonian::local_diagonal(&random_local_spectra(2, &mut rng), &random_local_spectra(d_b, &mut rng));
        let r = contribution_report(&s, &h, &cfg, None).unwrap();
        worst_decomp = worst_decomp.max(r.decomposition_residual.abs());
        worst_prime = worst_prime.max(r.prime_decomposition_residual.abs());
        let checks = [
            ("delta", r.delta >= -TOL_SIGN),
            ("delta_L", r.delta_l >= -TOL_SIGN),
            ("delta'", r.delta_prime >= -TOL_SIGN),
            ("ergotropy >= delta", r.ergotropy >= r.delta - TOL_SIGN),
            ("gap_EG >= delta_T", r.gap_eg - r.delta_t >= -TOL_SIGN),
            ("decomposition", r.decomposition_residual.abs() <= TOL_DECOMPOSITION),
            ("prime decomposition", r.prime_decomposition_residual.abs() <= TOL_PRIME_DECOMPOSITION),
            ("free energy", r.free_energy_gap >= -TOL_SIGN),
            ("total bracket", r.bounds.total.bracket_holds(TOL_BRACKET)),
            ("discord bracket", r.bounds.discord.bracket_holds(TOL_BRACKET)),
            ("prime bracket", r.bounds.prime.bracket_holds(TOL_BRACKET)),
        ];
        for (name, ok) in checks {
            if !ok {
                failures.push(format!("state {k}: {name}"));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "1000 states, {} violations{}, max residuals {worst_decomp:.1e} / {worst_prime:.1e}, {:.1} s",
            failures.len(),
            failures.first().map(|f| format!(" (first: {f})")).unwrap_or_default(),
            t.elapsed().as_secs_f64()
        ),
    )
}

fn brute_force_passive_energy(r: &[f64], e: &[f64]) -> f64 {
    fn go(r: &[f64], e: &[f64], used: &mut [bool], k: usize, acc: f64, best: &mut f64) {
        if k == r.len() {
            *best = best.min(acc);
            return;
        }
        for j in 0..e.len() {
            if !used[j] {
                used[j] = true;
                go(r, e, used, k + 1, acc + r[k] * e[j], best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    go(r, e, &mut vec![false; e.len()], 0, 0.0, &mut best);
    best
}

fn crit_11() -> Outcome {
    let mut rng = rng_from_seed(1111);
    let mut worst_perm: f64 = 0.0;
    for dim in 2..=6 {
        for _ in 0..20 {
            let rho = random_state(1, dim, dim, &mut rng).into_rho();
            let h = random_hermitian(dim, &mut rng);
            let r = passive_state(&rho, &h).unwrap();
            let oracle = brute_force_passive_energy(
                &hermitian_eig(&rho).unwrap().eigenvalues,
                &hermitian_eig(&h).unwrap().eigenvalues,
            );
            worst_perm = worst_perm.max((oracle - r.energy_passive).abs());
        }
    }
    let mut worst_gain = f64::NEG_INFINITY;
    for dim in [4, 6] {
        let rho = random_state(2, dim / 2, dim, &mut rng).into_rho();
        let h = random_hermitian(dim, &mut rng);
        let floor = passive_state(&rho, &h).unwrap().energy_passive;
        for _ in 0..10_000 {
            let e = h.trace_product_re(&rho.conjugate_by(&random_unitary(dim, &mut rng)));
            worst_gain = worst_gain.max(floor - e);
        }
    }
    outcome(
        worst_perm <= TOL_PERMUTATION && worst_gain <= TOL_UNITARY_ORACLE,
        format!("max permutation mismatch {worst_perm:.1e}; best unitary beats E(P_rho) by {worst_gain:.2e}"),
    )
}

fn crit_12() -> Outcome {
    let mut rng = rng_from_seed(1212);
    let (mut worst_delta, mut worst_eta) = (0.0f64, 0.0f64);
    for k in 0..100 {
        let d_b = if k % 2 == 0 { 2 } else { 3 };
        let s = random_pure_state(2, d_b, &mut rng);
        let h = BipartiteHamiltonian::local_diagonal(&random_local_spectra(2, &mut rng), &random_local_spectra(d_b, &mut rng));
        let eta = constrained_closest_classical(&s, &h, &ConstrainedSearch::default()).unwrap();
        let formula = delta_discord_pure(&s, &h).unwrap();
        worst_delta = worst_delta.max((formula - delta_discord(&s, &h, &eta.eta).unwrap()).abs());
        let schmidt = schmidt_decompose(&s).unwrap().dephased();
        worst_eta = worst_eta.max(eta.eta.to_matrix().distance(&schmidt.to_matrix()));
    }
    outcome(
        worst_delta <= TOL_PURE_DELTA && worst_eta <= TOL_SCHMIDT,
        format!("max |delta formula - search| = {worst_delta:.2e}, max ||eta - Schmidt dephasing|| = {worst_eta:.2e}"),
    )
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        outcome(false, format!("panicked: {msg}"))
    })
}

fn main() {
    let (fig1, fig1_time) = match catch_unwind(sweep) {
        Ok(v) => (Some(v.0), v.1),
        Err(_) => (None, Duration::ZERO),
    };
    let sweep_missing = || outcome(false, "sweep failed");
    let results: Vec<(u32, Outcome)> = vec![
        (1, guarded(crit_1)),
        (2, guarded(crit_2)),
        (3, fig1.as_ref().map_or_else(sweep_missing, |r| guarded(|| crit_3(r, fig1_time)))),
        (4, fig1.as_ref().map_or_else(sweep_missing, |r| guarded(|| crit_4(r)))),
        (5, guarded(crit_5)),
        (6, guarded(crit_6)),
        (7, guarded(crit_7)),
        (8, guarded(crit_8)),
        (9, guarded(crit_9)),
        (10, guarded(crit_10)),
        (11, guarded(crit_11)),
        (12, guarded(crit_12)),
    ];
    let mut unexpected = 0;
    let mut known = 0;
    for (k, o) in &results {
        let status = if o.pass { "PASS" } else { "FAIL" };
        let note = if !o.pass && KNOWN_UNATTAINABLE.contains(k) {
            known += 1;
            " [known unattainable]"
        } else {
            if !o.pass {
                unexpected += 1;
            }
            ""
        };
        println!("criterion {k:>2}: {status}{note}  {}", o.detail);
    }
    let passed = results.iter().filter(|(_, o)| o.pass).count();
    println!(
        "summary: {passed}/{} passed, {known} known unattainable, {unexpected} unexpected failures",
        results.len()
    );
    if unexpected > 0 {
        std::process::exit(1);
    }
}
