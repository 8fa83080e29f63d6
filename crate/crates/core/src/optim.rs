//! Derivative-free minimisation and the local-basis parametrisation used by
//! the entropy searches over product-basis dephasings.
//!
//! A local basis of `C^d` is written as `anchor · G(x)` where `G` is an
//! ordered product of complex Givens rotations, one `(theta, phi)` pair per
//! index pair `i < j`. This reaches every orthonormal basis up to the
//! per-vector phases, which a dephasing does not see.

use rand::Rng;

use crate::matcore::{c64, ComplexMatrix};
use crate::qstate::{shannon_entropy, BipartiteHamiltonian, LocalBasisPair};

/// Nelder–Mead with the dimension-adaptive coefficients of Gao and Han.
#[derive(Debug, Clone, Copy)]
pub struct NelderMead {
    /// Stop when the spread of simplex values is at most this...
    pub ftol: f64,
    /// ...and every vertex is within this of the best one (max norm).
    pub xtol: f64,
    pub max_evals: usize,
    pub initial_step: f64,
    /// Fresh simplices built around the best point after convergence.
    pub restarts: usize,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            ftol: 1e-9,
            xtol: 1e-8,
            max_evals: 4000,
            initial_step: 0.3,
            restarts: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
}

impl NelderMead {
    pub fn minimize(&self, mut f: impl FnMut(&[f64]) -> f64, x0: &[f64]) -> Minimum {
        let mut best = Minimum {
            x: x0.to_vec(),
            value: f(x0),
            evals: 1,
        };
        let mut step = self.initial_step;
        for round in 0..=self.restarts {
            let budget = self.max_evals.saturating_sub(best.evals);
            if budget == 0 {
                break;
            }
            let m = self.run(&mut f, &best.x, best.value, step, budget);
            let improved = best.value - m.value;
            best.evals += m.evals;
            if m.value < best.value {
                best.x = m.x;
                best.value = m.value;
            }
            if round > 0 && improved <= self.ftol {
                break;
            }
            step *= 0.1;
        }
        best
    }

    fn run(
        &self,
        f: &mut impl FnMut(&[f64]) -> f64,
        x0: &[f64],
        f0: f64,
        step: f64,
        budget: usize,
    ) -> Minimum {
        let n = x0.len();
        if n == 0 {
            return Minimum {
                x: vec![],
                value: f0,
                evals: 0,
            };
        }
        let nf = n as f64;
        let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);

        let mut evals = 0;
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        simplex.push((x0.to_vec(), f0));
        for i in 0..n {
            let mut x = x0.to_vec();
            x[i] += step;
            let fx = f(&x);
            evals += 1;
            simplex.push((x, fx));
        }

        while evals < budget {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let fspread = simplex[n].1 - simplex[0].1;
            let xspread = simplex[1..]
                .iter()
                .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if fspread <= self.ftol && xspread <= self.xtol {
                break;
            }

            let mut centroid = vec![0.0; n];
            for (x, _) in &simplex[..n] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / nf;
                }
            }
            let worst = simplex[n].clone();
            let toward = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&worst.0)
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };

            let xr = toward(alpha);
            let fr = f(&xr);
            evals += 1;
            if fr < simplex[0].1 {
                let xe = toward(alpha * gamma);
                let fe = f(&xe);
                evals += 1;
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
                continue;
            }
            let (xc, fc) = if fr < worst.1 {
                let xc = toward(alpha * rho);
                let fc = f(&xc);
                (xc, fc)
            } else {
                let xc = toward(-rho);
                let fc = f(&xc);
                (xc, fc)
            };
            evals += 1;
            if fc < worst.1.min(fr) {
                simplex[n] = (xc, fc);
                continue;
            }
            let best = simplex[0].0.clone();
            for (x, fx) in simplex.iter_mut().skip(1) {
                for (xi, bi) in x.iter_mut().zip(&best) {
                    *xi = bi + sigma * (*xi - bi);
                }
                *fx = f(x);
                evals += 1;
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (x, value) = simplex.swap_remove(0);
        Minimum { x, value, evals }
    }
}

/// Number of Givens parameters for a basis of `C^d`.
pub fn givens_param_count(d: usize) -> usize {
    d * (d - 1)
}

/// `anchor · prod_{i<j} G_ij(theta, phi)`.
pub fn givens_basis(anchor: &ComplexMatrix, params: &[f64]) -> ComplexMatrix {
    let d = anchor.dim();
    debug_assert_eq!(params.len(), givens_param_count(d));
    let mut u = anchor.clone();
    let mut k = 0;
    for i in 0..d {
        for j in i + 1..d {
            let (theta, phi) = (params[k], params[k + 1]);
            k += 2;
            let (s, c) = theta.sin_cos();
            let e = c64(phi.cos(), phi.sin());
            for r in 0..d {
                let ui = u[(r, i)];
                let uj = u[(r, j)];
                u[(r, i)] = ui * c + uj * e * s;
                u[(r, j)] = uj * c - ui * e.conj() * s;
            }
        }
    }
    u
}

/// Populations and energies of the product basis selected by a parameter
/// vector.
#[derive(Debug, Clone)]
pub struct BasisEvaluation {
    pub populations: Vec<f64>,
    pub entropy: f64,
    /// `sum_k p_k <w_k|H|w_k>`, when a Hamiltonian is attached.
    pub energy: f64,
}

/// Dephasing of a fixed state in a parametrised product basis.
#[derive(Debug, Clone)]
pub struct ProductBasisProblem<'a> {
    rho: &'a ComplexMatrix,
    hamiltonian: Option<&'a BipartiteHamiltonian>,
    anchor_a: ComplexMatrix,
    anchor_b: ComplexMatrix,
}

impl<'a> ProductBasisProblem<'a> {
    pub fn new(rho: &'a ComplexMatrix, hamiltonian: Option<&'a BipartiteHamiltonian>, anchor: &LocalBasisPair) -> Self {
        Self {
            rho,
            hamiltonian,
            anchor_a: anchor.basis_a().clone(),
            anchor_b: anchor.basis_b().clone(),
        }
    }

    pub fn d_a(&self) -> usize {
        self.anchor_a.dim()
    }

    pub fn d_b(&self) -> usize {
        self.anchor_b.dim()
    }

    pub fn params_a(&self) -> usize {
        givens_param_count(self.d_a())
    }

    pub fn n_params(&self) -> usize {
        self.params_a() + givens_param_count(self.d_b())
    }

    pub fn bases(&self, x: &[f64]) -> LocalBasisPair {
        let (xa, xb) = x.split_at(self.params_a());
        LocalBasisPair::new_unchecked(
            givens_basis(&self.anchor_a, xa),
            givens_basis(&self.anchor_b, xb),
        )
    }

    pub fn evaluate(&self, x: &[f64]) -> BasisEvaluation {
        let bases = self.bases(x);
        self.evaluate_unitaries(bases.basis_a(), bases.basis_b())
    }

    pub fn evaluate_unitaries(&self, u_a: &ComplexMatrix, u_b: &ComplexMatrix) -> BasisEvaluation {
        let (d_a, d_b) = (u_a.dim(), u_b.dim());
        let n = d_a * d_b;
        let mut populations = Vec::with_capacity(n);
        let mut col = vec![c64(0.0, 0.0); n];
        let mut per_vector = Vec::with_capacity(n);
        for i in 0..d_a {
            for j in 0..d_b {
                for r in 0..d_a {
                    let x = u_a[(r, i)];
                    for t in 0..d_b {
                        col[r * d_b + t] = x * u_b[(t, j)];
                    }
                }
                populations.push(self.rho.hermitian_form(&col));
                if let Some(h) = self.hamiltonian {
                    if h.local_terms().is_none() {
                        per_vector.push(h.total().hermitian_form(&col));
                    }
                }
            }
        }
        let energy = match self.hamiltonian.map(|h| (h, h.local_terms())) {
            None => 0.0,
            // Local energies need only the single-party vectors.
            Some((_, Some((h_a, h_b)))) => {
                let ea: Vec<f64> = (0..d_a).map(|i| h_a.hermitian_form(&u_a.column(i))).collect();
                let eb: Vec<f64> = (0..d_b).map(|j| h_b.hermitian_form(&u_b.column(j))).collect();
                populations
                    .iter()
                    .enumerate()
                    .map(|(k, p)| p * (ea[k / d_b] + eb[k % d_b]))
                    .sum()
            }
            Some((_, None)) => populations.iter().zip(&per_vector).map(|(p, e)| p * e).sum(),
        };
        let entropy = shannon_entropy(&populations);
        BasisEvaluation {
            populations,
            entropy,
            energy,
        }
    }
}

/// Grid values for one Givens parameter vector: `theta in [0, pi)`,
/// `phi in [0, 2 pi)`, `points` values each.
fn givens_grid(d: usize, points: usize) -> Vec<Vec<f64>> {
    let np = givens_param_count(d);
    let mut out = vec![vec![]];
    for k in 0..np {
        let range = if k % 2 == 0 {
            std::f64::consts::PI
        } else {
            2.0 * std::f64::consts::PI
        };
        let mut next = Vec::with_capacity(out.len() * points);
        for prefix in &out {
            for g in 0..points {
                let mut v = prefix.clone();
                v.push(range * g as f64 / points as f64);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Evaluates `merit` on the full parameter grid and returns the `keep` best
/// points, best first. Ties keep grid order.
pub fn best_grid_points(
    problem: &ProductBasisProblem<'_>,
    points: usize,
    keep: usize,
    merit: impl Fn(&BasisEvaluation) -> f64,
) -> Vec<(Vec<f64>, f64)> {
    let grid_a = givens_grid(problem.d_a(), points);
    let grid_b = givens_grid(problem.d_b(), points);
    let us_a: Vec<ComplexMatrix> = grid_a.iter().map(|x| givens_basis(&problem.anchor_a, x)).collect();
    let us_b: Vec<ComplexMatrix> = grid_b.iter().map(|x| givens_basis(&problem.anchor_b, x)).collect();
    let mut scored: Vec<(usize, usize, f64)> = Vec::with_capacity(us_a.len() * us_b.len());
    for (ia, ua) in us_a.iter().enumerate() {
        for (ib, ub) in us_b.iter().enumerate() {
            let m = merit(&problem.evaluate_unitaries(ua, ub));
            scored.push((ia, ib, m));
        }
    }
    scored.sort_by(|a, b| a.2.total_cmp(&b.2));
    scored
        .into_iter()
        .take(keep)
        .map(|(ia, ib, m)| {
            let mut x = grid_a[ia].clone();
            x.extend_from_slice(&grid_b[ib]);
            (x, m)
        })
        .collect()
}

/// Uniform random point in the Givens parameter box.
pub fn random_params<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let range = if k % 2 == 0 {
                std::f64::consts::PI
            } else {
                2.0 * std::f64::consts::PI
            };
            rng.random::<f64>() * range
        })
        .collect()
}
