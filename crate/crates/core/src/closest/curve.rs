//! Two-qubit reduction of the energy-constrained search for the example
//! family `mu |0,+><0,+| + (1-mu) |1,1><1,1|` with `H_A = R eps |1><1|`,
//! `H_B = eps |1><1|`.
//!
//! Local bases are `|a> = sqrt(a)|0> + sqrt(1-a)|1>` on A (the azimuth on A
//! drops out) and `|b> = sqrt(b)|0> + sqrt(1-b) e^{i phase}|1>` on B. The
//! energy change of the dephasing is `eps * f` with
//!
//! ```text
//! f = 2 a (1-a) R (2 mu - 1) - 2 b (1-b) (1-mu) + (1-2b) sqrt(b(1-b)) mu cos(phase)
//! ```
//!
//! so for fixed `(b, phase)` the constraint `f = 0` fixes `a(1-a)`, and `a`
//! and `1-a` give the same dephasing.

use serde::{Deserialize, Serialize};

use super::{ConstrainedClassicalResult, ENERGY_CONSTRAINT_TOL};
use crate::entropy::IMPROVEMENT_MARGIN;
use crate::error::{Error, Result};
use crate::matcore::{c64, ComplexMatrix};
use crate::optim::{NelderMead, ProductBasisProblem};
use crate::qstate::{dephase_by_product_basis, BipartiteHamiltonian, BipartiteState, LocalBasisPair};

/// The constraint function at `phase = 0`.
pub fn constraint_curve_f(a: f64, b: f64, mu: f64, r: f64) -> f64 {
    curve_f(a, b, 0.0, mu, r)
}

fn curve_f(a: f64, b: f64, phase: f64, mu: f64, r: f64) -> f64 {
    2.0 * (1.0 - a) * a * r * (2.0 * mu - 1.0) - 2.0 * (1.0 - b) * b * (1.0 - mu)
        + (1.0 - 2.0 * b) * ((1.0 - b) * b).sqrt() * mu * phase.cos()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExampleFamily {
    pub mu: f64,
    pub r: f64,
    pub epsilon: f64,
}

/// Settings of the curve search.
#[derive(Debug, Clone, Copy)]
pub struct CurveSearch {
    pub b_points: usize,
    /// Grid over the B azimuth in `[0, pi]`.
    pub phase_points: usize,
    /// Grid over `a in [0, 1/2]`, used only when `f` does not depend on `a`.
    pub a_points: usize,
    /// Best grid points refined by Nelder–Mead over `(b, phase)`.
    pub refine: usize,
    pub nelder_mead: NelderMead,
}

impl Default for CurveSearch {
    fn default() -> Self {
        Self {
            b_points: 2001,
            phase_points: 17,
            a_points: 201,
            refine: 4,
            nelder_mead: NelderMead {
                initial_step: 0.02,
                ..NelderMead::default()
            },
        }
    }
}

/// Point on the constraint curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub a: f64,
    pub b: f64,
    pub phase: f64,
    pub entropy: f64,
}

impl ExampleFamily {
    pub fn new(mu: f64, r: f64, epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&mu) {
            return Err(Error::InvalidArgument(format!("mu = {mu} outside [0, 1]")));
        }
        if !(r.is_finite() && r >= 0.0 && epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "need R >= 0 and eps > 0, got R = {r}, eps = {epsilon}"
            )));
        }
        Ok(Self { mu, r, epsilon })
    }

    pub fn state(&self) -> BipartiteState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let zero_plus = [c64(h, 0.0), c64(h, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)];
        let mut rho = ComplexMatrix::outer(&zero_plus).scale(self.mu);
        rho[(3, 3)] += c64(1.0 - self.mu, 0.0);
        BipartiteState::new(rho, 2, 2).expect("family member is a valid state")
    }

    pub fn hamiltonian(&self) -> BipartiteHamiltonian {
        BipartiteHamiltonian::local_diagonal(&[0.0, self.r * self.epsilon], &[0.0, self.epsilon])
    }

    pub fn bases(a: f64, b: f64, phase: f64) -> LocalBasisPair {
        let (sa, ca) = (a.sqrt(), (1.0 - a).sqrt());
        let (sb, cb) = (b.sqrt(), (1.0 - b).sqrt());
        let e = c64(phase.cos(), phase.sin());
        let basis_a = ComplexMatrix::from_real_rows(&[vec![sa, ca], vec![ca, -sa]]).expect("square");
        let basis_b = ComplexMatrix::from_rows(&[
            vec![c64(sb, 0.0), c64(cb, 0.0)],
            vec![e * cb, -e * sb],
        ])
        .expect("square");
        LocalBasisPair::new(basis_a, basis_b).expect("orthonormal by construction")
    }

    /// `(E(eta) - E(rho)) / eps` for the dephasing in [`Self::bases`].
    pub fn curve_value(&self, a: f64, b: f64, phase: f64) -> f64 {
        curve_f(a, b, phase, self.mu, self.r)
    }

    fn a_coefficient(&self) -> f64 {
        2.0 * self.r * (2.0 * self.mu - 1.0)
    }

    /// The root of `f(., b, phase)` in `[0, 1/2]`, bisected to 1e-12.
    /// `f` is monotone there, so there is at most one.
    pub fn a_root(&self, b: f64, phase: f64) -> Option<f64> {
        let f = |a: f64| self.curve_value(a, b, phase);
        let (f0, f1) = (f(0.0), f(0.5));
        if f0 == 0.0 {
            return Some(0.0);
        }
        if f1 == 0.0 {
            return Some(0.5);
        }
        if f0.signum() == f1.signum() {
            return None;
        }
        let (mut lo, mut hi) = (0.0, 0.5);
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if f(mid).signum() == f0.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }

    fn b_grid(n: usize) -> impl Iterator<Item = f64> {
        (0..n).map(move |k| k as f64 / (n - 1) as f64)
    }

    fn phase_grid(n: usize) -> impl Iterator<Item = f64> {
        (0..n).map(move |k| std::f64::consts::PI * k as f64 / (n - 1).max(1) as f64)
    }

    /// Every point found on the curve: a-roots along the `(b, phase)` grid,
    /// or, when `f` does not depend on `a`, b-roots crossed with an a-grid.
    pub fn scan(&self, cfg: &CurveSearch) -> Vec<CurvePoint> {
        let state = self.state();
        let problem = ProductBasisProblem::new(state.rho(), None, &LocalBasisPair::computational(2, 2));
        let entropy = |a: f64, b: f64, phase: f64| {
            let bases = Self::bases(a, b, phase);
            problem.evaluate_unitaries(bases.basis_a(), bases.basis_b()).entropy
        };
        let mut points = Vec::new();
        if self.a_coefficient().abs() > 1e-12 {
            for phase in Self::phase_grid(cfg.phase_points) {
                for b in Self::b_grid(cfg.b_points) {
                    if let Some(a) = self.a_root(b, phase) {
                        points.push(CurvePoint { a, b, phase, entropy: entropy(a, b, phase) });
                    }
                }
            }
            return points;
        }
        let a_grid: Vec<f64> = (0..cfg.a_points)
            .map(|k| 0.5 * k as f64 / (cfg.a_points - 1) as f64)
            .collect();
        for phase in Self::phase_grid(cfg.phase_points) {
            let g = |b: f64| self.curve_value(0.0, b, phase);
            let bs: Vec<f64> = Self::b_grid(cfg.b_points).collect();
            let mut roots = Vec::new();
            for w in bs.windows(2) {
                let (g0, g1) = (g(w[0]), g(w[1]));
                if g0 == 0.0 {
                    roots.push(w[0]);
                } else if g0.signum() != g1.signum() && g1 != 0.0 {
                    let (mut lo, mut hi) = (w[0], w[1]);
                    while hi - lo > 1e-13 {
                        let mid = 0.5 * (lo + hi);
                        if g(mid).signum() == g0.signum() {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    roots.push(0.5 * (lo + hi));
                }
            }
            if g(1.0) == 0.0 {
                roots.push(1.0);
            }
            for &b in &roots {
                for &a in &a_grid {
                    points.push(CurvePoint { a, b, phase, entropy: entropy(a, b, phase) });
                }
            }
        }
        points
    }

    /// Energy-constrained closest classical state along the curve.
    ///
    /// The B azimuth is searched, not fixed; the best grid points are then
    /// refined over `(b, phase)` with `a` re-solved from the constraint.
    pub fn constrained_closest(&self, cfg: &CurveSearch) -> Result<ConstrainedClassicalResult> {
        let mut points = self.scan(cfg);
        if points.is_empty() {
            return Err(Error::InfeasibleConstraint { residual: f64::NAN });
        }
        points.sort_by(|x, y| x.entropy.total_cmp(&y.entropy));
        let mut best = points[0];
        let state = self.state();
        let problem = ProductBasisProblem::new(state.rho(), None, &LocalBasisPair::computational(2, 2));
        let mut runs = 0;
        if self.a_coefficient().abs() > 1e-12 {
            for start in points.iter().take(cfg.refine) {
                let objective = |x: &[f64]| {
                    let (b, phase) = (x[0], x[1]);
                    if !(0.0..=1.0).contains(&b) {
                        return 1e3;
                    }
                    match self.a_root(b, phase) {
                        Some(a) => {
                            let bases = Self::bases(a, b, phase);
                            problem.evaluate_unitaries(bases.basis_a(), bases.basis_b()).entropy
                        }
                        None => 1e3,
                    }
                };
                let m = cfg.nelder_mead.minimize(objective, &[start.b, start.phase]);
                runs += 1;
                if m.value < best.entropy - IMPROVEMENT_MARGIN {
                    let (b, phase) = (m.x[0], m.x[1]);
                    let a = self.a_root(b, phase).expect("finite value implies a root");
                    best = CurvePoint { a, b, phase, entropy: m.value };
                }
            }
        }
        let eta = dephase_by_product_basis(&state, &Self::bases(best.a, best.b, best.phase))?;
        let h = self.hamiltonian();
        let residual = eta.energy(&h) - state.energy(&h);
        if residual.abs() > ENERGY_CONSTRAINT_TOL {
            return Err(Error::InfeasibleConstraint { residual: residual.abs() });
        }
        Ok(ConstrainedClassicalResult {
            entropy: eta.entropy(),
            energy_residual: residual,
            eta,
            multistart_count: runs,
            discontinuity_flag: false,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closest::{constrained_closest_classical, ConstrainedSearch};
    use crate::qstate::dephase_by_product_basis;

    #[test]
    fn f_examples() {
        assert_eq!(constraint_curve_f(0.0, 0.0, 0.8, 1.3), 0.0);
        assert!((constraint_curve_f(0.5, 0.5, 0.75, 1.0) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn f_is_the_energy_change() {
        for &(mu, r) in &[(0.7, 1.0), (0.3, 2.0), (0.9, 0.5)] {
            let fam = ExampleFamily::new(mu, r, 1.7).unwrap();
            let s = fam.state();
            let h = fam.hamiltonian();
            for &(a, b, ph) in &[(0.1, 0.2, 0.0), (0.4, 0.9, 1.0), (0.25, 0.5, 2.5)] {
                let eta = dephase_by_product_basis(&s, &ExampleFamily::bases(a, b, ph)).unwrap();
                let de = eta.energy(&h) - s.energy(&h);
                assert!((de - 1.7 * fam.curve_value(a, b, ph)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn roots_exist_by_sign_change() {
        let fam = ExampleFamily::new(0.7, 1.0, 1.0).unwrap();
        let grid: Vec<f64> = (0..2001).map(|k| k as f64 / 2000.0).collect();
        let mut changes = 0;
        for &b in &grid[1..grid.len() - 1] {
            let (f0, f1) = (fam.curve_value(0.0, b, 0.0), fam.curve_value(0.5, b, 0.0));
            if f0.signum() != f1.signum() {
                changes += 1;
                let a = fam.a_root(b, 0.0).unwrap();
                assert!(fam.curve_value(a, b, 0.0).abs() < 1e-11);
            }
        }
        assert!(changes > 0);
    }

    #[test]
    fn low_mu_gives_computational_dephasing() {
        let fam = ExampleFamily::new(0.4, 2.0, 1.0).unwrap();
        let r = fam.constrained_closest(&CurveSearch::default()).unwrap();
        let delta = dephase_by_product_basis(&fam.state(), &LocalBasisPair::computational(2, 2)).unwrap();
        assert!(r.eta.to_matrix().distance(&delta.to_matrix()) < 1e-9);
    }

    #[test]
    fn high_mu_leaves_computational_dephasing() {
        let fam = ExampleFamily::new(0.7, 1.0, 1.0).unwrap();
        let r = fam.constrained_closest(&CurveSearch::default()).unwrap();
        let delta = dephase_by_product_basis(&fam.state(), &LocalBasisPair::computational(2, 2)).unwrap();
        assert!(r.eta.to_matrix().distance(&delta.to_matrix()) > 0.1);
        assert!(r.energy_residual.abs() <= ENERGY_CONSTRAINT_TOL);
    }

    #[test]
    fn degenerate_mu_half() {
        let fam = ExampleFamily::new(0.5, 1.0, 1.0).unwrap();
        let r = fam.constrained_closest(&CurveSearch::default()).unwrap();
        let delta = dephase_by_product_basis(&fam.state(), &LocalBasisPair::computational(2, 2)).unwrap();
        assert!((r.entropy - delta.entropy()).abs() < 1e-12);
    }

    #[test]
    fn agrees_with_generic_search() {
        for &(mu, r) in &[(0.3, 1.0), (0.6, 1.0), (0.7, 1.0), (0.9, 1.0), (0.8, 2.0)] {
            let fam = ExampleFamily::new(mu, r, 1.0).unwrap();
            let curve = fam.constrained_closest(&CurveSearch::default()).unwrap();
            let generic =
                constrained_closest_classical(&fam.state(), &fam.hamiltonian(), &ConstrainedSearch::default()).unwrap();
            assert!(
                (curve.entropy - generic.entropy).abs() < 1e-5,
                "mu {mu} R {r}: curve {} generic {}",
                curve.entropy,
                generic.entropy
            );
        }
    }
}
