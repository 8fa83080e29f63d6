//! Closest-state constructions: the energy-constrained closest classical
//! state, the marginal-basis dephasing, the product of marginals and the
//! Horodecki-family closest separable state.

mod curve;
mod horodecki;

pub use curve::{constraint_curve_f, CurveSearch, ExampleFamily};
pub use horodecki::{horodecki_closest_separable, HorodeckiFamily, HorodeckiSign};

use serde::Serialize;

use crate::entropy::{check_search_dims, measurement_induced_disturbance, IMPROVEMENT_MARGIN};
use crate::error::{Error, Result};
use crate::matcore::ComplexMatrix;
use crate::optim::{best_grid_points, random_params, BasisEvaluation, NelderMead, ProductBasisProblem};
use crate::qstate::random::rng_from_seed;
use crate::qstate::{
    dephase_by_product_basis, marginal_eigenbases, BipartiteHamiltonian, BipartiteState,
    ClassicalState, LocalBasisPair,
};

/// Largest accepted `|E(eta) - E(rho)|`.
pub const ENERGY_CONSTRAINT_TOL: f64 = 1e-8;
/// Frobenius distance between neighbouring sweep solutions that counts as a
/// branch switch.
pub const BRANCH_JUMP: f64 = 0.1;

#[derive(Debug, Clone, Serialize)]
pub struct ConstrainedClassicalResult {
    pub eta: ClassicalState,
    pub entropy: f64,
    /// `E(eta) - E(rho)`.
    pub energy_residual: f64,
    pub multistart_count: usize,
    /// Set by sweeps when this solution sits on a different branch from the
    /// previous grid point; a single call leaves it false.
    pub discontinuity_flag: bool,
}

/// Settings of the energy-constrained search.
#[derive(Debug, Clone)]
pub struct ConstrainedSearch {
    /// Local searches in total, the two anchors included.
    pub multistarts: usize,
    pub grid_points: usize,
    pub grid_max_params: usize,
    /// Penalty weights on `((E - E_target) / energy_scale)^2`, applied in turn.
    pub penalties: Vec<f64>,
    /// Every other generic start skips the weights below this one. The low
    /// weights pull all starts into one basin, and which feasible branch a
    /// run ends on is then decided by accident; starting late keeps the
    /// starts spread over the constraint surface.
    pub late_start_penalty: f64,
    /// Used for every penalty stage but the last; the final point is always
    /// polished with `nelder_mead`.
    pub stage_nelder_mead: NelderMead,
    pub nelder_mead: NelderMead,
    /// Tight search around the best point found, run once at the end. The
    /// entropy is flat near its minimum, so contributions that depend on
    /// where `eta` sits need more than the multistart tolerance.
    pub polish: NelderMead,
    pub seed: u64,
}

impl Default for ConstrainedSearch {
    fn default() -> Self {
        Self {
            multistarts: 64,
            grid_points: 8,
            grid_max_params: 4,
            penalties: vec![1e1, 1e3, 1e5, 1e7],
            late_start_penalty: 1e5,
            stage_nelder_mead: NelderMead {
                ftol: 1e-6,
                xtol: 1e-5,
                max_evals: 1500,
                restarts: 0,
                ..NelderMead::default()
            },
            nelder_mead: NelderMead::default(),
            polish: NelderMead {
                ftol: 1e-15,
                xtol: 1e-11,
                max_evals: 20_000,
                initial_step: 1e-3,
                restarts: 3,
            },
            seed: 0xc0de,
        }
    }
}

struct Incumbent {
    entropy: f64,
    bases: LocalBasisPair,
}

fn consider(best: &mut Option<Incumbent>, entropy: f64, bases: LocalBasisPair) {
    match best {
        Some(b) if entropy >= b.entropy - IMPROVEMENT_MARGIN => {}
        _ => *best = Some(Incumbent { entropy, bases }),
    }
}

/// Moves `x` along one coordinate until the energy constraint holds to
/// rounding. Tries the smallest steps first so the entropy barely moves.
fn project(problem: &ProductBasisProblem<'_>, x: &[f64], target: f64, scale: f64) -> Option<Vec<f64>> {
    let resid = |y: &[f64]| problem.evaluate(y).energy - target;
    let r0 = resid(x);
    let exact = 1e-13 * scale;
    if r0.abs() <= exact {
        return Some(x.to_vec());
    }
    let mut y = x.to_vec();
    let mut h = 1e-7;
    while h < 4.0 {
        for i in 0..x.len() {
            for sign in [1.0, -1.0] {
                y[i] = x[i] + sign * h;
                let r1 = resid(&y);
                if r1.signum() == r0.signum() && r1 != 0.0 {
                    continue;
                }
                let (mut lo, mut hi) = (0.0, sign * h);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    y[i] = x[i] + mid;
                    let rm = resid(&y);
                    if rm.abs() <= exact {
                        return Some(y);
                    }
                    if rm.signum() == r0.signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                y[i] = x[i] + hi;
                if resid(&y).abs() <= ENERGY_CONSTRAINT_TOL {
                    return Some(y);
                }
                y[i] = x[i];
            }
        }
        h *= 4.0;
    }
    (r0.abs() <= ENERGY_CONSTRAINT_TOL).then(|| x.to_vec())
}

/// Minimises `S(eta)` over product-basis dephasings `eta` of `s` with
/// `E(eta) = E(s)`.
///
/// Both anchors (marginal eigenbases and computational bases) are evaluated
/// exactly. Every local search escalates a quadratic energy penalty, moving
/// the penalty's target by the last residual after each stage, until the
/// residual is within tolerance; it ends with a one-coordinate bisection
/// onto the constraint surface. With a
/// non-interacting Hamiltonian the marginal-basis dephasing is always
/// feasible, so the search cannot come back empty.
pub fn constrained_closest_classical(
    s: &BipartiteState,
    h: &BipartiteHamiltonian,
    cfg: &ConstrainedSearch,
) -> Result<ConstrainedClassicalResult> {
    check_search_dims(s)?;
    h.check_dims(s)?;
    let target = s.energy(h);
    let scale = match h.energy_scale() {
        e if e > 0.0 => e,
        _ => 1.0,
    };
    let (marginal, _) = marginal_eigenbases(s)?;
    let anchors = [marginal, LocalBasisPair::computational(s.d_a(), s.d_b())];
    let problems: Vec<ProductBasisProblem<'_>> = anchors
        .iter()
        .map(|a| ProductBasisProblem::new(s.rho(), Some(h), a))
        .collect();
    let n = problems[0].n_params();
    let zeros = vec![0.0; n];

    let mut best = None;
    let mut closest_miss = f64::INFINITY;
    for p in &problems {
        let e = p.evaluate(&zeros);
        let r = (e.energy - target).abs();
        closest_miss = closest_miss.min(r);
        if r <= ENERGY_CONSTRAINT_TOL {
            consider(&mut best, e.entropy, p.bases(&zeros));
        }
    }

    let generic = &problems[1];
    let extra = cfg.multistarts.saturating_sub(problems.len());
    // Quadratic penalty on the scaled residual, measured from a shifted
    // target; the shift absorbs the penalty's bias between stages.
    let penalty = |e: &BasisEvaluation, kappa: f64, shift: f64| {
        let r = (e.energy - target) / scale + shift;
        e.entropy + kappa * r * r
    };
    let starts: Vec<Vec<f64>> = if n <= cfg.grid_max_params {
        let kappa0 = cfg.penalties.first().copied().unwrap_or(10.0);
        best_grid_points(generic, cfg.grid_points, extra, |e| penalty(e, kappa0, 0.0))
            .into_iter()
            .map(|(x, _)| x)
            .collect()
    } else {
        let mut rng = rng_from_seed(cfg.seed);
        (0..extra).map(|_| random_params(n, &mut rng)).collect()
    };

    let runs: Vec<(&ProductBasisProblem<'_>, &[f64])> = problems
        .iter()
        .map(|p| (p, zeros.as_slice()))
        .chain(starts.iter().map(|x| (generic, x.as_slice())))
        .take(cfg.multistarts.max(problems.len()))
        .collect();
    for (i, &(p, x0)) in runs.iter().enumerate() {
        let late = i >= problems.len() && (i - problems.len()) % 2 == 1;
        let first = if late {
            cfg.penalties
                .iter()
                .position(|&k| k >= cfg.late_start_penalty)
                .unwrap_or(0)
        } else {
            0
        };
        let mut x = x0.to_vec();
        let mut shift = 0.0;
        for (stage, &kappa) in cfg.penalties.iter().enumerate().skip(first) {
            let last = stage + 1 == cfg.penalties.len();
            let nm = if last { cfg.nelder_mead } else { cfg.stage_nelder_mead };
            x = nm.minimize(|y| penalty(&p.evaluate(y), kappa, shift), &x).x;
            let e = p.evaluate(&x);
            let r = e.energy - target;
            if r.abs() <= ENERGY_CONSTRAINT_TOL {
                if !last {
                    // Converged early: polish at this weight with full tolerances.
                    x = cfg.nelder_mead.minimize(|y| penalty(&p.evaluate(y), kappa, shift), &x).x;
                }
                break;
            }
            shift += r / scale;
        }
        match project(p, &x, target, scale) {
            Some(xp) => {
                let e = p.evaluate(&xp);
                consider(&mut best, e.entropy, p.bases(&xp));
            }
            None => {
                closest_miss = closest_miss.min((p.evaluate(&x).energy - target).abs());
            }
        }
    }

    if let Some(b) = &best {
        let p = ProductBasisProblem::new(s.rho(), Some(h), &b.bases);
        let kappa = cfg.penalties.last().copied().unwrap_or(1e7);
        let x = cfg.polish.minimize(|y| penalty(&p.evaluate(y), kappa, 0.0), &zeros).x;
        if let Some(xp) = project(&p, &x, target, scale) {
            let e = p.evaluate(&xp);
            consider(&mut best, e.entropy, p.bases(&xp));
        }
    }

    let best = best.ok_or(Error::InfeasibleConstraint {
        residual: closest_miss,
    })?;
    let eta = dephase_by_product_basis(s, &best.bases)?;
    Ok(ConstrainedClassicalResult {
        entropy: eta.entropy(),
        energy_residual: eta.energy(h) - target,
        eta,
        multistart_count: runs.len(),
        discontinuity_flag: false,
    })
}

/// `chi'`: dephasing in the marginal eigenbases, with the marginal
/// degeneracy flag.
pub fn marginal_eigenbasis_dephasing(s: &BipartiteState) -> Result<(ClassicalState, bool)> {
    let r = measurement_induced_disturbance(s)?;
    Ok((r.chi_prime, r.marginal_degenerate))
}

/// `pi_rho = rho_A ⊗ rho_B` and its energy offset `E(pi_rho) - E(rho)`,
/// which vanishes for non-interacting Hamiltonians.
pub fn product_reference(s: &BipartiteState, h: &BipartiteHamiltonian) -> Result<(BipartiteState, f64)> {
    h.check_dims(s)?;
    let pi = s.product_of_marginals();
    let shift = pi.energy(h) - s.energy(h);
    Ok((pi, shift))
}

/// `true` for each adjacent pair of sweep solutions further apart than
/// [`BRANCH_JUMP`] in Frobenius norm.
pub fn branch_jumps(solutions: &[ComplexMatrix]) -> Vec<bool> {
    solutions
        .windows(2)
        .map(|w| w[0].distance(&w[1]) > BRANCH_JUMP)
        .collect()
}
