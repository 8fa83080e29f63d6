//! Passive states, ergotropy and related energetic quantities.
//!
//! Functions here take plain matrices so they serve both the joint system
//! and its marginals.

use rand::Rng;
use serde::Serialize;

use crate::entropy::{relative_entropy, von_neumann_entropy};
use crate::error::{Error, Result};
use crate::matcore::{hermitian_eig, ComplexMatrix, HermitianEig};
use crate::qstate::{random::random_unitary, BipartiteHamiltonian, BipartiteState, Subsystem};

/// Energies of two states count as equal within this.
pub const ENERGY_MATCH_TOL: f64 = 1e-8;
/// Energy gaps below this make the energy eigenbasis ambiguous.
pub const ENERGY_DEGENERACY_GAP: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct ErgotropyResult {
    pub ergotropy: f64,
    pub passive_state: ComplexMatrix,
    pub energy_initial: f64,
    pub energy_passive: f64,
    /// `U = sum_k |e_k><r_k|`, with `P = U rho U^dagger`.
    pub extraction_unitary: ComplexMatrix,
}

/// `sum_k r_k e_k` for populations sorted descending against energies
/// sorted ascending.
pub fn passive_energy(populations: &[f64], energies: &[f64]) -> f64 {
    let mut r = populations.to_vec();
    r.sort_by(|a, b| b.total_cmp(a));
    let mut e = energies.to_vec();
    e.sort_by(f64::total_cmp);
    r.iter().zip(&e).map(|(a, b)| a * b).sum()
}

pub fn energy(rho: &ComplexMatrix, h: &ComplexMatrix) -> f64 {
    h.trace_product_re(rho)
}

/// Passive state and ergotropy of `rho` for Hamiltonian `h`.
pub fn passive_state(rho: &ComplexMatrix, h: &ComplexMatrix) -> Result<ErgotropyResult> {
    if rho.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: rho.dim(),
        });
    }
    passive_state_in(rho, h, &hermitian_eig(h)?)
}

/// As [`passive_state`], reusing a precomputed eigendecomposition of `h`.
pub fn passive_state_in(rho: &ComplexMatrix, h: &ComplexMatrix, h_eig: &HermitianEig) -> Result<ErgotropyResult> {
    let n = rho.dim();
    let r_eig = hermitian_eig(rho)?;
    // Ascending energies paired with descending populations; stable under ties.
    let mut u = ComplexMatrix::zeros(n);
    let mut passive = ComplexMatrix::zeros(n);
    let mut energy_passive = 0.0;
    for k in 0..n {
        let rk = n - 1 - k;
        let pop = r_eig.eigenvalues[rk];
        let e_vec = h_eig.vector(k);
        let r_vec = r_eig.vector(rk);
        for i in 0..n {
            for j in 0..n {
                u[(i, j)] += e_vec[i] * r_vec[j].conj();
                passive[(i, j)] += e_vec[i] * e_vec[j].conj() * pop;
            }
        }
        energy_passive += pop * h_eig.eigenvalues[k];
    }
    let energy_initial = energy(rho, h);
    Ok(ErgotropyResult {
        ergotropy: energy_initial - energy_passive,
        passive_state: passive,
        energy_initial,
        energy_passive,
        extraction_unitary: u,
    })
}

pub fn ergotropy(rho: &ComplexMatrix, h: &ComplexMatrix) -> Result<f64> {
    Ok(passive_state(rho, h)?.ergotropy)
}

/// `E(P_rho)` from the spectra alone.
pub fn passive_energy_of(rho: &ComplexMatrix, h_spectrum: &[f64]) -> Result<f64> {
    Ok(passive_energy(&hermitian_eig(rho)?.eigenvalues, h_spectrum))
}

/// Gibbs state `exp(-beta H) / Z`.
#[derive(Debug, Clone)]
pub struct ThermalReference {
    pub beta: f64,
    pub state: ComplexMatrix,
}

impl ThermalReference {
    pub fn new(h: &ComplexMatrix, beta: f64) -> Result<Self> {
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "inverse temperature must be finite and non-negative, got {beta}"
            )));
        }
        let eig = hermitian_eig(h)?;
        let e0 = eig.eigenvalues[0];
        let weights: Vec<f64> = eig
            .eigenvalues
            .iter()
            .map(|e| (-beta * (e - e0)).exp())
            .collect();
        let z: f64 = weights.iter().sum();
        let n = eig.dim();
        let v = &eig.eigenvectors;
        let state = ComplexMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| v[(i, k)] * v[(j, k)].conj() * (weights[k] / z))
                .sum()
        });
        Ok(Self { beta, state })
    }

    /// `S(rho || rho_beta)`.
    pub fn relative_entropy_from(&self, rho: &ComplexMatrix) -> Result<f64> {
        relative_entropy(rho, &self.state)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct IdentityCheck {
    /// `beta (E(rho) - E(eta))` in ergotropy.
    pub lhs: f64,
    /// `S(eta) - S(rho) - S(P_rho||rho_beta) + S(P_eta||rho_beta)`.
    pub rhs: f64,
    /// `|lhs - rhs|`, NaN when a term is infinite.
    pub gap: f64,
    pub infinite_term: bool,
}

/// Checks the same-energy ergotropy identity for `rho`, `eta` at `beta`.
pub fn thermal_identity_gap(
    rho: &ComplexMatrix,
    eta: &ComplexMatrix,
    h: &ComplexMatrix,
    beta: f64,
) -> Result<IdentityCheck> {
    let e_rho = energy(rho, h);
    let e_eta = energy(eta, h);
    if (e_rho - e_eta).abs() > ENERGY_MATCH_TOL {
        return Err(Error::EnergyMismatch {
            first: e_rho,
            second: e_eta,
        });
    }
    let h_eig = hermitian_eig(h)?;
    let pr = passive_state_in(rho, h, &h_eig)?;
    let pe = passive_state_in(eta, h, &h_eig)?;
    let gibbs = ThermalReference::new(h, beta)?;
    let s_pr = gibbs.relative_entropy_from(&pr.passive_state)?;
    let s_pe = gibbs.relative_entropy_from(&pe.passive_state)?;
    let lhs = beta * (pr.ergotropy - pe.ergotropy);
    let infinite_term = !s_pr.is_finite() || !s_pe.is_finite();
    let rhs = von_neumann_entropy(eta)? - von_neumann_entropy(rho)? - s_pr + s_pe;
    Ok(IdentityCheck {
        lhs,
        rhs,
        gap: if infinite_term { f64::NAN } else { (lhs - rhs).abs() },
        infinite_term,
    })
}

/// `E(rho) - E(rho_A) - E(rho_B)` in terms of ergotropies.
pub fn ergotropic_gap(s: &BipartiteState, h: &BipartiteHamiltonian) -> Result<f64> {
    let (h_a, h_b) = h.local_terms().ok_or(Error::InteractingHamiltonian)?;
    h.check_dims(s)?;
    let global = passive_state_in(s.rho(), h.total(), h.eig())?.ergotropy;
    let local_a = ergotropy(&s.partial_trace(Subsystem::A), h_a)?;
    let local_b = ergotropy(&s.partial_trace(Subsystem::B), h_b)?;
    Ok(global - local_a - local_b)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CoherenceResult {
    /// `E(rho) - E(Delta(rho))` in ergotropy.
    pub value: f64,
    /// The energy spectrum has a gap below 1e-9; `Delta` used the
    /// eigensolver's basis within the degenerate subspace.
    pub degenerate: bool,
}

/// Dephasing in the eigenbasis of `h`.
pub fn energy_dephasing(rho: &ComplexMatrix, h_eig: &HermitianEig) -> ComplexMatrix {
    let v = &h_eig.eigenvectors;
    let in_basis = rho.conjugate_by(&v.adjoint()).diagonal_part();
    in_basis.conjugate_by(v)
}

/// Coherence contribution `E(rho) - E(Delta(rho))`.
pub fn coherence_contribution(rho: &ComplexMatrix, h: &ComplexMatrix) -> Result<CoherenceResult> {
    let h_eig = hermitian_eig(h)?;
    let dephased = energy_dephasing(rho, &h_eig);
    let value = passive_state_in(rho, h, &h_eig)?.ergotropy
        - passive_state_in(&dephased, h, &h_eig)?.ergotropy;
    Ok(CoherenceResult {
        value,
        degenerate: h_eig
            .eigenvalues
            .windows(2)
            .any(|w| w[1] - w[0] < ENERGY_DEGENERACY_GAP),
    })
}

/// `eta ≺ rho`: every partial sum of the descending spectrum of `eta` is at
/// most the matching partial sum for `rho` (plus 1e-10).
pub fn majorization_check(rho: &ComplexMatrix, eta: &ComplexMatrix) -> Result<bool> {
    if rho.dim() != eta.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: eta.dim(),
        });
    }
    let r = hermitian_eig(rho)?.descending();
    let q = hermitian_eig(eta)?.descending();
    let (mut sr, mut sq) = (0.0, 0.0);
    for (a, b) in r.iter().zip(&q) {
        sr += a;
        sq += b;
        if sq > sr + 1e-10 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Fits `rho = exp(-beta H)/Z` by least squares on the log-populations in
/// the energy basis. Returns `beta` when the state is diagonal there, full
/// rank, and the fit residual is below 1e-8.
pub fn fit_thermal(rho: &ComplexMatrix, h: &ComplexMatrix) -> Result<Option<f64>> {
    let h_eig = hermitian_eig(h)?;
    let v = &h_eig.eigenvectors;
    let in_basis = rho.conjugate_by(&v.adjoint());
    if (&in_basis - &in_basis.diagonal_part()).max_abs() > 1e-8 {
        return Ok(None);
    }
    let q = in_basis.diag_real();
    if q.iter().any(|&x| x <= 0.0) {
        return Ok(None);
    }
    let e = &h_eig.eigenvalues;
    let y: Vec<f64> = q.iter().map(|x| x.ln()).collect();
    let n = e.len() as f64;
    let me = e.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = e.iter().map(|x| (x - me).powi(2)).sum();
    let sxy: f64 = e.iter().zip(&y).map(|(x, yy)| (x - me) * (yy - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let residual = e
        .iter()
        .zip(&y)
        .map(|(x, yy)| (yy - (my + slope * (x - me))).abs())
        .fold(0.0, f64::max);
    Ok((residual < 1e-8).then_some(-slope))
}

/// Builds `eta = w U1 rho U1^dagger + (1-w) U2 rho U2^dagger` with random
/// unitaries and `w` chosen so that `E(eta) = E(rho)`. `None` if no
/// straddling pair turned up within `attempts` draws.
pub fn same_energy_mixture<R: Rng + ?Sized>(
    rho: &ComplexMatrix,
    h: &ComplexMatrix,
    rng: &mut R,
    attempts: usize,
) -> Option<ComplexMatrix> {
    let target = energy(rho, h);
    let n = rho.dim();
    let mut above: Option<(ComplexMatrix, f64)> = None;
    let mut below: Option<(ComplexMatrix, f64)> = None;
    for _ in 0..attempts {
        let c = rho.conjugate_by(&random_unitary(n, rng)).hermitian_part();
        let e = energy(&c, h);
        if e > target && above.is_none() {
            above = Some((c, e));
        } else if e < target && below.is_none() {
            below = Some((c, e));
        }
        if let (Some((hi, e_hi)), Some((lo, e_lo))) = (&above, &below) {
            // Energy is affine in the weight, so bisection lands exactly.
            let (mut a, mut b) = (0.0_f64, 1.0_f64);
            let mix = |w: f64| &hi.scale(w) + &lo.scale(1.0 - w);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                let e_m = m * e_hi + (1.0 - m) * e_lo;
                if (e_m - target).abs() <= 1e-15 * target.abs().max(1.0) {
                    a = m;
                    b = m;
                    break;
                }
                if e_m > target {
                    b = m;
                } else {
                    a = m;
                }
            }
            let eta = mix(0.5 * (a + b));
            if (energy(&eta, h) - target).abs() <= 1e-10 {
                return Some(eta.hermitian_part());
            }
            return None;
        }
    }
    None
}
