//! Entropic functionals and the entropy-based correlation measures.
//!
//! All logarithms are natural; results are in nats.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::{hermitian_eig, ComplexMatrix, SUPPORT_CUTOFF};
use crate::optim::{best_grid_points, random_params, NelderMead, ProductBasisProblem};
use crate::qstate::random::rng_from_seed;
use crate::qstate::{
    dephase_by_product_basis, marginal_eigenbases, BipartiteState, ClassicalState, LocalBasisPair,
    Subsystem,
};

/// `rho` with weight above this on the kernel of `eta` gives `S(rho||eta) = +inf`.
pub const SUPPORT_OVERLAP_TOL: f64 = 1e-10;
/// Largest local dimension handled by the basis searches.
pub const MAX_SEARCH_DIM: usize = 4;
/// A search candidate replaces the incumbent only if it is lower by more
/// than this. Keeps exact anchor points when the optimiser only matches them.
pub const IMPROVEMENT_MARGIN: f64 = 1e-10;

/// `-tr(m ln m)` with `0 ln 0 = 0`.
pub fn von_neumann_entropy(m: &ComplexMatrix) -> Result<f64> {
    let eig = hermitian_eig(m)?;
    Ok(eig
        .eigenvalues
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.ln())
        .sum())
}

/// `tr(rho (ln rho - ln eta))`, or `f64::INFINITY` when the support of
/// `rho` is not contained in that of `eta`.
pub fn relative_entropy(rho: &ComplexMatrix, eta: &ComplexMatrix) -> Result<f64> {
    if rho.dim() != eta.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: eta.dim(),
        });
    }
    let er = hermitian_eig(rho)?;
    let ee = hermitian_eig(eta)?;
    let mut cross = 0.0;
    let mut kernel_weight = 0.0;
    for (k, &lam) in ee.eigenvalues.iter().enumerate() {
        let w = rho.quadratic_form(&ee.vector(k)).re;
        if lam > SUPPORT_CUTOFF {
            cross += w * lam.ln();
        } else {
            kernel_weight += w;
        }
    }
    if kernel_weight > SUPPORT_OVERLAP_TOL {
        return Ok(f64::INFINITY);
    }
    let self_term: f64 = er
        .eigenvalues
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| l * l.ln())
        .sum();
    Ok(self_term - cross)
}

/// `S(rho_A) + S(rho_B) - S(rho)`.
pub fn mutual_information(s: &BipartiteState) -> Result<f64> {
    Ok(von_neumann_entropy(&s.partial_trace(Subsystem::A))?
        + von_neumann_entropy(&s.partial_trace(Subsystem::B))?
        - von_neumann_entropy(s.rho())?)
}

/// Settings of the multistart search for the closest classical state.
#[derive(Debug, Clone, Copy)]
pub struct DiscordSearch {
    pub multistarts: usize,
    /// Grid points per Givens angle for the coarse stage.
    pub grid_points: usize,
    /// The coarse grid is used only when the total parameter count is at
    /// most this; otherwise starts are drawn at random.
    pub grid_max_params: usize,
    pub nelder_mead: NelderMead,
    pub seed: u64,
}

impl Default for DiscordSearch {
    fn default() -> Self {
        Self {
            multistarts: 32,
            grid_points: 16,
            grid_max_params: 4,
            nelder_mead: NelderMead::default(),
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscordResult {
    /// `S(chi) - S(rho)`; best found, not certified.
    pub discord: f64,
    pub chi: ClassicalState,
    /// Local searches run (anchors plus multistarts).
    pub multistarts: usize,
}

impl DiscordResult {
    /// Replaces `chi` by `candidate` if it is a lower-entropy dephasing of
    /// the same state. Returns whether it did.
    pub fn offer(&mut self, s: &BipartiteState, candidate: &ClassicalState) -> Result<bool> {
        let current = self.chi.entropy();
        let cand = candidate.entropy();
        if cand < current - IMPROVEMENT_MARGIN {
            self.discord = cand - von_neumann_entropy(s.rho())?;
            self.chi = candidate.clone();
            return Ok(true);
        }
        Ok(false)
    }
}

pub(crate) fn check_search_dims(s: &BipartiteState) -> Result<()> {
    if s.d_a() > MAX_SEARCH_DIM || s.d_b() > MAX_SEARCH_DIM {
        return Err(Error::DimensionTooLarge {
            d_a: s.d_a(),
            d_b: s.d_b(),
            limit: MAX_SEARCH_DIM,
        });
    }
    Ok(())
}

/// Relative entropy of discord and the best-found closest classical state.
///
/// Minimises the entropy of the product-basis dephasing. The marginal
/// eigenbases and the computational bases are evaluated exactly first; the
/// local searches start from those and from the best coarse-grid points
/// (or random points for larger dimensions).
pub fn discord_and_closest_classical(s: &BipartiteState, cfg: &DiscordSearch) -> Result<DiscordResult> {
    check_search_dims(s)?;
    let (marginal, _) = marginal_eigenbases(s)?;
    let computational = LocalBasisPair::computational(s.d_a(), s.d_b());
    let anchors = [marginal, computational];

    let mut best: Option<(f64, LocalBasisPair)> = None;
    let mut consider = |value: f64, bases: LocalBasisPair| match &best {
        Some((b, _)) if value >= b - IMPROVEMENT_MARGIN => {}
        _ => best = Some((value, bases)),
    };

    let problems: Vec<ProductBasisProblem<'_>> = anchors
        .iter()
        .map(|a| ProductBasisProblem::new(s.rho(), None, a))
        .collect();
    let n = problems[0].n_params();
    let zeros = vec![0.0; n];
    for p in &problems {
        consider(p.evaluate(&zeros).entropy, p.bases(&zeros));
    }

    let generic = &problems[1];
    let starts: Vec<Vec<f64>> = if n <= cfg.grid_max_params {
        best_grid_points(generic, cfg.grid_points, cfg.multistarts, |e| e.entropy)
            .into_iter()
            .map(|(x, _)| x)
            .collect()
    } else {
        let mut rng = rng_from_seed(cfg.seed);
        (0..cfg.multistarts).map(|_| random_params(n, &mut rng)).collect()
    };

    let mut runs = 0;
    for p in &problems {
        let m = cfg.nelder_mead.minimize(|x| p.evaluate(x).entropy, &zeros);
        consider(m.value, p.bases(&m.x));
        runs += 1;
    }
    for x0 in &starts {
        let m = cfg.nelder_mead.minimize(|x| generic.evaluate(x).entropy, x0);
        consider(m.value, generic.bases(&m.x));
        runs += 1;
    }

    let (_, bases) = best.expect("anchors always evaluated");
    let chi = dephase_by_product_basis(s, &bases)?;
    Ok(DiscordResult {
        discord: chi.entropy() - von_neumann_entropy(s.rho())?,
        chi,
        multistarts: runs,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DisturbanceResult {
    /// `S(chi') - S(rho)`.
    pub disturbance: f64,
    pub chi_prime: ClassicalState,
    /// Set when a marginal spectrum has a gap below 1e-9, so the marginal
    /// eigenbasis (and `D'`) depends on the eigensolver's convention.
    pub marginal_degenerate: bool,
}

/// `D'(rho)`: dephasing in the eigenbases of the two marginals.
pub fn measurement_induced_disturbance(s: &BipartiteState) -> Result<DisturbanceResult> {
    let (bases, marginal_degenerate) = marginal_eigenbases(s)?;
    let chi_prime = dephase_by_product_basis(s, &bases)?;
    Ok(DisturbanceResult {
        disturbance: chi_prime.entropy() - von_neumann_entropy(s.rho())?,
        chi_prime,
        marginal_degenerate,
    })
}

/// Both expressions of `L`: `S(pi_chi) - S(pi_rho)` and `S(pi_rho || pi_chi)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LQuantity {
    pub entropy_form: f64,
    pub relative_form: f64,
}

pub fn l_quantity(s: &BipartiteState, chi: &ClassicalState) -> Result<LQuantity> {
    let pi_rho = s.product_of_marginals();
    let pi_chi = chi.product_of_marginals();
    Ok(LQuantity {
        entropy_form: pi_chi.entropy() - von_neumann_entropy(pi_rho.rho())?,
        relative_form: relative_entropy(pi_rho.rho(), &pi_chi.to_matrix())?,
    })
}

/// Mutual information of a classical state, from its table.
pub fn classical_mutual_information(chi: &ClassicalState) -> f64 {
    let (pa, pb) = chi.marginals();
    crate::qstate::shannon_entropy(&pa) + crate::qstate::shannon_entropy(&pb) - chi.entropy()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationMeasures {
    /// `T(rho)`.
    pub mutual_information: f64,
    /// `D(rho)`.
    pub discord: f64,
    /// `C(chi_rho) = T(chi_rho)`.
    pub classical: f64,
    /// `D'(rho)`.
    pub disturbance: f64,
    /// `L(rho)`.
    pub l: f64,
}

impl CorrelationMeasures {
    pub fn from_parts(s: &BipartiteState, discord: &DiscordResult, disturbance: &DisturbanceResult) -> Result<Self> {
        Ok(Self {
            mutual_information: mutual_information(s)?,
            discord: discord.discord,
            classical: classical_mutual_information(&discord.chi),
            disturbance: disturbance.disturbance,
            l: l_quantity(s, &discord.chi)?.entropy_form,
        })
    }

    /// `T - (D + C - L)`.
    pub fn decomposition_residual(&self) -> f64 {
        self.mutual_information - (self.discord + self.classical - self.l)
    }
}

pub fn correlation_measures(s: &BipartiteState, cfg: &DiscordSearch) -> Result<CorrelationMeasures> {
    let d = discord_and_closest_classical(s, cfg)?;
    let m = measurement_induced_disturbance(s)?;
    CorrelationMeasures::from_parts(s, &d, &m)
}
