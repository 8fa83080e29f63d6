//! Correlation contributions to ergotropy and their entropic forms.
//!
//! For a non-interacting Hamiltonian `H = H_A + H_B`:
//!
//! - `delta_T = E(rho) - E(pi_rho)`, total correlations;
//! - `delta = E(rho) - E(eta_rho)`, discord, with `eta_rho` the closest
//!   classical state of equal energy;
//! - `delta_C(chi) = E(chi) - E(pi_chi)`, classical correlations;
//! - `delta_L = E(pi_rho) - E(pi_eta)`;
//! - `delta_E = E(rho) - E(tau_rho)`, entanglement (Horodecki family only);
//! - `delta' = E(rho) - E(chi'_rho)`, marginal-basis dephasing;
//!
//! where `E` here is ergotropy. They satisfy `delta_T = delta + delta_C(eta) -
//! delta_L` and `delta_T = delta' + delta_C(chi')`. Each also has an exact
//! entropic form at any inverse temperature, from which the bounds follow.

use serde::Serialize;

use crate::closest::{
    constrained_closest_classical, horodecki_closest_separable, ConstrainedClassicalResult,
    ConstrainedSearch, HorodeckiFamily,
};
use crate::entropy::{
    discord_and_closest_classical, measurement_induced_disturbance, von_neumann_entropy,
    CorrelationMeasures, DiscordSearch,
};
use crate::error::{Error, Result};
use crate::ergotropy::{
    coherence_contribution, ergotropic_gap, passive_energy, passive_state_in, ThermalReference,
};
use crate::matcore::ComplexMatrix;
use crate::qstate::{schmidt_decompose, BipartiteHamiltonian, BipartiteState, ClassicalState};

/// Energy equality between `rho` and a reference state, for `delta_E`.
const SAME_ENERGY_TOL: f64 = 1e-10;

/// Exact entropic form of a contribution at inverse temperature `beta`,
/// with its bracket when it has one. All values in energy units.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EntropicCheck {
    pub value: f64,
    /// `|value - entropic form / beta|`; NaN if a term is infinite.
    pub identity_residual: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub infinite_term: bool,
}

impl EntropicCheck {
    /// `lower - tol <= value <= upper + tol`, skipping absent or infinite
    /// bounds.
    pub fn bracket_holds(&self, tol: f64) -> bool {
        let lo = self.lower.filter(|l| l.is_finite()).is_none_or(|l| self.value >= l - tol);
        let hi = self.upper.filter(|u| u.is_finite()).is_none_or(|u| self.value <= u + tol);
        lo && hi
    }
}

/// `sum_k e_k (second_k - first_k)` written as
/// `sum_k (e_{k+1} - e_k) y_k` with `y_k = sum_{n<=k} (first_n - second_n)`.
#[derive(Debug, Clone, Serialize)]
pub struct AbelForm {
    pub value: f64,
    /// `y_1 .. y_{N-1}`.
    pub partial_sums: Vec<f64>,
    pub gaps: Vec<f64>,
}

impl AbelForm {
    /// Both population vectors are sorted descending, energies ascending.
    pub fn new(first: &[f64], second: &[f64], energies: &[f64]) -> Self {
        let sort_desc = |v: &[f64]| {
            let mut v = v.to_vec();
            v.sort_by(|a, b| b.total_cmp(a));
            v
        };
        let (r, q) = (sort_desc(first), sort_desc(second));
        let mut e = energies.to_vec();
        e.sort_by(f64::total_cmp);
        let n = e.len();
        let mut y = 0.0;
        let mut partial_sums = Vec::with_capacity(n.saturating_sub(1));
        let mut gaps = Vec::with_capacity(n.saturating_sub(1));
        let mut value = 0.0;
        for k in 0..n.saturating_sub(1) {
            y += r[k] - q[k];
            let gap = e[k + 1] - e[k];
            partial_sums.push(y);
            gaps.push(gap);
            value += gap * y;
        }
        Self { value, partial_sums, gaps }
    }

    /// The same quantity straight from `sum_k e_k (second_k - first_k)`.
    pub fn direct(first: &[f64], second: &[f64], energies: &[f64]) -> f64 {
        passive_energy(second, energies) - passive_energy(first, energies)
    }
}

fn require_local(h: &BipartiteHamiltonian) -> Result<()> {
    if h.is_non_interacting() {
        Ok(())
    } else {
        Err(Error::InteractingHamiltonian)
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("inverse temperature must be positive, got {beta}")))
    }
}

/// `1 / (max e_k - min e_k)`, or 1 for a flat spectrum.
pub fn default_beta(h: &BipartiteHamiltonian) -> f64 {
    match h.energy_scale() {
        e if e > 0.0 => 1.0 / e,
        _ => 1.0,
    }
}

fn ergotropy_of(m: &ComplexMatrix, h: &BipartiteHamiltonian) -> Result<f64> {
    Ok(passive_state_in(m, h.total(), h.eig())?.ergotropy)
}

fn classical_ergotropy(chi: &ClassicalState, h: &BipartiteHamiltonian) -> f64 {
    chi.energy(h) - passive_energy(chi.probabilities(), h.spectrum())
}

/// `S(P_m || rho_beta)`.
fn passive_distance(m: &ComplexMatrix, h: &BipartiteHamiltonian, gibbs: &ThermalReference) -> Result<f64> {
    gibbs.relative_entropy_from(&passive_state_in(m, h.total(), h.eig())?.passive_state)
}

fn entropic_check(value: f64, form: f64, lower: Option<f64>, upper: Option<f64>, beta: f64) -> EntropicCheck {
    let infinite_term = !form.is_finite();
    EntropicCheck {
        value,
        identity_residual: if infinite_term { f64::NAN } else { (value - form / beta).abs() },
        lower: lower.map(|l| l / beta),
        upper: upper.map(|u| u / beta),
        infinite_term,
    }
}

/// `delta_T = E(rho) - E(rho_A ⊗ rho_B)` in ergotropy.
pub fn delta_total(s: &BipartiteState, h: &BipartiteHamiltonian) -> Result<f64> {
    require_local(h)?;
    h.check_dims(s)?;
    Ok(ergotropy_of(s.rho(), h)? - ergotropy_of(s.product_of_marginals().rho(), h)?)
}

/// `beta delta_T = T - S(P_rho||rho_beta) + S(P_pi||rho_beta)`; the bracket
/// drops one relative entropy at a time.
pub fn delta_total_bounds(s: &BipartiteState, h: &BipartiteHamiltonian, beta: f64) -> Result<EntropicCheck> {
    check_beta(beta)?;
    let value = delta_total(s, h)?;
    let pi = s.product_of_marginals();
    let t = von_neumann_entropy(pi.rho())? - von_neumann_entropy(s.rho())?;
    let gibbs = ThermalReference::new(h.total(), beta)?;
    let a = passive_distance(s.rho(), h, &gibbs)?;
    let b = passive_distance(pi.rho(), h, &gibbs)?;
    Ok(entropic_check(value, t - a + b, Some(t - a), Some(t + b), beta))
}

/// `delta = E(rho) - E(eta)` in ergotropy, for a same-energy dephasing `eta`.
pub fn delta_discord(s: &BipartiteState, h: &BipartiteHamiltonian, eta: &ClassicalState) -> Result<f64> {
    h.check_dims(s)?;
    Ok(ergotropy_of(s.rho(), h)? - classical_ergotropy(eta, h))
}

/// `beta delta = D + S(eta) - S(chi) - S(P_rho||rho_beta) + S(P_eta||rho_beta)`
/// and `D - S(P_rho||rho_beta) <= beta delta <= S(rho||eta) + S(P_eta||rho_beta)`.
pub fn delta_discord_bounds(
    s: &BipartiteState,
    h: &BipartiteHamiltonian,
    beta: f64,
    eta: &ClassicalState,
    chi: &ClassicalState,
) -> Result<EntropicCheck> {
    check_beta(beta)?;
    let value = delta_discord(s, h, eta)?;
    let s_rho = von_neumann_entropy(s.rho())?;
    let discord = chi.entropy() - s_rho;
    let gibbs = ThermalReference::new(h.total(), beta)?;
    let a = passive_distance(s.rho(), h, &gibbs)?;
    let b = passive_distance(&eta.to_matrix(), h, &gibbs)?;
    // S(rho||eta) = S(eta) - S(rho) for a dephasing of rho.
    let rel = eta.entropy() - s_rho;
    let form = discord + eta.entropy() - chi.entropy() - a + b;
    Ok(entropic_check(value, form, Some(discord - a), Some(rel + b), beta))
}

/// `delta` for pure states: `sum_i p_i e_i - e_1` with squared Schmidt
/// coefficients descending and global energies ascending.
pub fn delta_discord_pure(s: &BipartiteState, h: &BipartiteHamiltonian) -> Result<f64> {
    require_local(h)?;
    h.check_dims(s)?;
    let schmidt = schmidt_decompose(s)?;
    let e = h.spectrum();
    Ok(schmidt
        .coefficients
        .iter()
        .zip(e)
        .map(|(p, e)| p * e)
        .sum::<f64>()
        - e[0])
}

/// `delta` in the partial-sum form `sum_k (e_{k+1} - e_k) sum_{n<=k} (r_n - q_n)`
/// with `r` the spectrum of `rho` and `q` that of `eta`.
pub fn delta_discord_partial_sums(
    s: &BipartiteState,
    h: &BipartiteHamiltonian,
    eta: &ClassicalState,
) -> Result<AbelForm> {
    let r = s.spectrum()?.eigenvalues;
    Ok(AbelForm::new(&r, eta.probabilities(), h.spectrum()))
}

/// `delta_C(chi) = sum_k e_k (r~_k - r_k)` from the table and the local
/// spectra, with `r` the sorted table and `r~` the sorted product of its
/// marginals.
pub fn delta_classical(chi: &ClassicalState, h: &BipartiteHamiltonian) -> Result<AbelForm> {
    require_local(h)?;
    if chi.d_a() != h.d_a() || chi.d_b() != h.d_b() {
        return Err(Error::DimensionMismatch {
            expected: h.d_a() * h.d_b(),
            found: chi.d_a() * chi.d_b(),
        });
    }
    let product = chi.product_of_marginals();
    Ok(AbelForm::new(chi.probabilities(), product.probabilities(), h.spectrum()))
}

/// [`delta_classical`] from a row-major `d_a x d_b` table and the local
/// spectra, without building the Hamiltonian. Meant for Monte Carlo loops.
pub fn delta_classical_table(p: &[f64], eps_a: &[f64], eps_b: &[f64]) -> Result<AbelForm> {
    let (d_a, d_b) = (eps_a.len(), eps_b.len());
    if p.len() != d_a * d_b {
        return Err(Error::DimensionMismatch {
            expected: d_a * d_b,
            found: p.len(),
        });
    }
    let p_a: Vec<f64> = (0..d_a).map(|i| p[i * d_b..(i + 1) * d_b].iter().sum()).collect();
    let p_b: Vec<f64> = (0..d_b).map(|j| (0..d_a).map(|i| p[i * d_b + j]).sum()).collect();
    let mut product = Vec::with_capacity(p.len());
    let mut energies = Vec::with_capacity(p.len());
    for i in 0..d_a {
        for j in 0..d_b {
            product.push(p_a[i] * p_b[j]);
            energies.push(eps_a[i] + eps_b[j]);
        }
    }
    Ok(AbelForm::new(p, &product, &energies))
}

/// `delta_L = E(pi_rho) - E(pi_eta)` in ergotropy.
pub fn delta_l(s: &BipartiteState, h: &BipartiteHamiltonian, eta: &ClassicalState) -> Result<f64> {
    h.check_dims(s)?;
    let pi_eta = eta.product_of_marginals();
    Ok(ergotropy_of(s.product_of_marginals().rho(), h)? - classical_ergotropy(&pi_eta, h))
}

/// `beta delta_L = L + S(pi_eta) - S(pi_chi) - S(P_pi_rho||rho_beta) + S(P_pi_eta||rho_beta)`.
pub fn delta_l_identity(
    s: &BipartiteState,
    h: &BipartiteHamiltonian,
    beta: f64,
    eta: &ClassicalState,
    chi: &ClassicalState,
) -> Result<EntropicCheck> {
    check_beta(beta)?;
    let value = delta_l(s, h, eta)?;
    let pi = s.product_of_marginals();
    let pi_eta = eta.product_of_marginals();
    let pi_chi = chi.product_of_marginals();
    let l = pi_chi.entropy() - von_neumann_entropy(pi.rho())?;
    let gibbs = ThermalReference::new(h.total(), beta)?;
    let a = passive_distance(pi.rho(), h, &gibbs)?;
    let b = passive_distance(&pi_eta.to_matrix(), h, &gibbs)?;
    Ok(entropic_check(value, l + pi_eta.entropy() - pi_chi.entropy() - a + b, None, None, beta))
}

/// `delta_E = E(rho) - E(sigma_rho)` in ergotropy, with the closed-form
/// closest separable state of the Horodecki family. The Hamiltonian must
/// give `sigma_rho` the energy of `rho`.
pub fn delta_entanglement(fam: &HorodeckiFamily, h: &BipartiteHamiltonian) -> Result<f64> {
    require_local(h)?;
    let rho = fam.to_state();
    h.check_dims(&rho)?;
    let sigma = horodecki_closest_separable(fam);
    if (sigma.energy(h) - rho.energy(h)).abs() > SAME_ENERGY_TOL {
        return Err(Error::OutOfScopeFamily);
    }
    Ok(ergotropy_of(rho.rho(), h)? - ergotropy_of(sigma.rho(), h)?)
}

/// `delta_E` for any state: `None` outside the Horodecki family.
pub fn delta_entanglement_of(s: &BipartiteState, h: &BipartiteHamiltonian) -> Result<Option<f64>> {
    match HorodeckiFamily::detect(s) {
        Some(fam) => match delta_entanglement(&fam, h) {
            Ok(v) => Ok(Some(v)),
            Err(Error::OutOfScopeFamily) => Ok(None),
            Err(e) => Err(e),
        },
        None => Ok(None),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PrimeContribution {
    /// `E(rho) - E(chi')` in ergotropy.
    pub value: f64,
    pub chi_prime: ClassicalState,
    pub marginal_degenerate: bool,
}

pub fn delta_prime(s: &BipartiteState, h: &BipartiteHamiltonian) -> Result<PrimeContribution> {
    require_local(h)?;
    h.check_dims(s)?;
    let d = measurement_induced_disturbance(s)?;
    Ok(PrimeContribution {
        value: ergotropy_of(s.rho(), h)? - classical_ergotropy(&d.chi_prime, h),
        chi_prime: d.chi_prime,
        marginal_degenerate: d.marginal_degenerate,
    })
}

/// `beta delta' = D' - S(P_rho||rho_beta) + S(P_chi'||rho_beta)` and its bracket.
pub fn delta_prime_bounds(s: &BipartiteState, h: &BipartiteHamiltonian, beta: f64) -> Result<EntropicCheck> {
    check_beta(beta)?;
    let p = delta_prime(s, h)?;
    let d_prime = p.chi_prime.entropy() - von_neumann_entropy(s.rho())?;
    let gibbs = ThermalReference::new(h.total(), beta)?;
    let a = passive_distance(s.rho(), h, &gibbs)?;
    let b = passive_distance(&p.chi_prime.to_matrix(), h, &gibbs)?;
    Ok(entropic_check(p.value, d_prime - a + b, Some(d_prime - a), Some(d_prime + b), beta))
}

/// Variants that charge the energy change of the reference state, usable
/// with interacting Hamiltonians.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TildeContributions {
    /// `E(P_pi) - E(P_rho)`.
    pub tilde_t: f64,
    /// `E(P_chi) - E(P_rho)`.
    pub tilde_d: f64,
    /// `E(P_sigma) - E(P_rho)`, Horodecki family only.
    pub tilde_e: Option<f64>,
}

/// `chi` is the unconstrained closest classical state of `s`.
pub fn tilde_contributions(
    s: &BipartiteState,
    h: &BipartiteHamiltonian,
    chi: &ClassicalState,
) -> Result<TildeContributions> {
    h.check_dims(s)?;
    let e = h.spectrum();
    let p_rho = passive_energy(&s.spectrum()?.eigenvalues, e);
    let p_pi = passive_energy(&s.product_of_marginals().spectrum()?.eigenvalues, e);
    let p_chi = passive_energy(chi.probabilities(), e);
    let tilde_e = match HorodeckiFamily::detect(s) {
        Some(fam) => {
            let sigma = horodecki_closest_separable(&fam);
            Some(passive_energy(&sigma.spectrum()?.eigenvalues, e) - p_rho)
        }
        None => None,
    };
    Ok(TildeContributions {
        tilde_t: p_pi - p_rho,
        tilde_d: p_chi - p_rho,
        tilde_e,
    })
}

/// `[S(rho||rho_beta) - S(pi_rho||rho_beta)] / beta`.
pub fn free_energy_gap(s: &BipartiteState, h: &BipartiteHamiltonian, beta: f64) -> Result<f64> {
    require_local(h)?;
    check_beta(beta)?;
    h.check_dims(s)?;
    let gibbs = ThermalReference::new(h.total(), beta)?;
    let a = gibbs.relative_entropy_from(s.rho())?;
    let b = gibbs.relative_entropy_from(s.product_of_marginals().rho())?;
    Ok((a - b) / beta)
}

#[derive(Debug, Clone, Default)]
pub struct ReportConfig {
    /// Inverse temperature for the entropic forms; defaults to
    /// [`default_beta`].
    pub beta: Option<f64>,
    pub discord: DiscordSearch,
    pub constrained: ConstrainedSearch,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReportBounds {
    pub total: EntropicCheck,
    pub discord: EntropicCheck,
    pub l: EntropicCheck,
    pub prime: EntropicCheck,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReportFlags {
    pub energy_degenerate: bool,
    pub marginal_degenerate: bool,
    pub infinite_term: bool,
    pub discontinuity: bool,
}

/// Every contribution for one state and non-interacting Hamiltonian.
#[derive(Debug, Clone, Serialize)]
pub struct ContributionReport {
    pub beta: f64,
    pub ergotropy: f64,
    pub delta_t: f64,
    pub delta: f64,
    /// `delta_C(eta_rho)`.
    pub delta_c: f64,
    pub delta_l: f64,
    pub delta_e: Option<f64>,
    pub delta_prime: f64,
    /// `delta_C(chi'_rho)`.
    pub delta_c_prime: f64,
    pub gap_eg: f64,
    pub coherence: f64,
    pub free_energy_gap: f64,
    pub tilde: TildeContributions,
    /// `delta_T - (delta + delta_C(eta) - delta_L)`.
    pub decomposition_residual: f64,
    /// `delta_T - (delta' + delta_C(chi'))`.
    pub prime_decomposition_residual: f64,
    pub bounds: ReportBounds,
    pub measures: CorrelationMeasures,
    pub eta: ConstrainedClassicalResult,
    pub flags: ReportFlags,
}

/// Builds the report. A precomputed `eta` (for instance from the
/// example-family curve search) skips the constrained search; it also joins
/// the discord search so that `S(chi) <= S(eta)` holds.
pub fn contribution_report(
    s: &BipartiteState,
    h: &BipartiteHamiltonian,
    cfg: &ReportConfig,
    eta: Option<ConstrainedClassicalResult>,
) -> Result<ContributionReport> {
    require_local(h)?;
    h.check_dims(s)?;
    let beta = cfg.beta.unwrap_or_else(|| default_beta(h));
    check_beta(beta)?;

    let mut discord = discord_and_closest_classical(s, &cfg.discord)?;
    let eta = match eta {
        Some(e) => e,
        None => constrained_closest_classical(s, h, &cfg.constrained)?,
    };
    discord.offer(s, &eta.eta)?;
    let disturbance = measurement_induced_disturbance(s)?;
    let measures = CorrelationMeasures::from_parts(s, &discord, &disturbance)?;

    let ergotropy = ergotropy_of(s.rho(), h)?;
    let delta_t = delta_total(s, h)?;
    let delta = delta_discord(s, h, &eta.eta)?;
    let delta_c = delta_classical(&eta.eta, h)?.value;
    let delta_l = delta_l(s, h, &eta.eta)?;
    let prime = delta_prime(s, h)?;
    let delta_c_prime = delta_classical(&prime.chi_prime, h)?.value;
    let bounds = ReportBounds {
        total: delta_total_bounds(s, h, beta)?,
        discord: delta_discord_bounds(s, h, beta, &eta.eta, &discord.chi)?,
        l: delta_l_identity(s, h, beta, &eta.eta, &discord.chi)?,
        prime: delta_prime_bounds(s, h, beta)?,
    };
    let infinite_term = [bounds.total, bounds.discord, bounds.l, bounds.prime]
        .iter()
        .any(|b| b.infinite_term);
    let coherence = coherence_contribution(s.rho(), h.total())?;
    let flags = ReportFlags {
        energy_degenerate: coherence.degenerate,
        marginal_degenerate: prime.marginal_degenerate,
        infinite_term,
        discontinuity: eta.discontinuity_flag,
    };
    Ok(ContributionReport {
        beta,
        ergotropy,
        delta_t,
        delta,
        delta_c,
        delta_l,
        delta_e: delta_entanglement_of(s, h)?,
        delta_prime: prime.value,
        delta_c_prime,
        gap_eg: ergotropic_gap(s, h)?,
        coherence: coherence.value,
        free_energy_gap: free_energy_gap(s, h, beta)?,
        tilde: tilde_contributions(s, h, &discord.chi)?,
        decomposition_residual: delta_t - (delta + delta_c - delta_l),
        prime_decomposition_residual: delta_t - (prime.value + delta_c_prime),
        bounds,
        measures,
        eta,
        flags,
    })
}

/// Tilde contributions for any Hamiltonian, with the discord search run
/// internally.
pub fn tilde_report(
    s: &BipartiteState,
    h: &BipartiteHamiltonian,
    cfg: &DiscordSearch,
) -> Result<TildeContributions> {
    let discord = discord_and_closest_classical(s, cfg)?;
    tilde_contributions(s, h, &discord.chi)
}
