//! Bipartite states, Hamiltonians and the structural maps between them.

pub mod random;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{c64, hermitian_eig, inner, kron, ComplexMatrix, HermitianEig, C64};

/// Tolerance on `tr(rho) = 1`, hermiticity and the smallest eigenvalue.
pub const STATE_TOL: f64 = 1e-10;
/// A state counts as pure when its largest eigenvalue is at least `1 - PURITY_TOL`.
pub const PURITY_TOL: f64 = 1e-9;
const BASIS_TOL: f64 = 1e-10;
const PROB_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

/// Density matrix on `C^{d_a} ⊗ C^{d_b}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BipartiteState {
    rho: ComplexMatrix,
    d_a: usize,
    d_b: usize,
}

impl BipartiteState {
    /// Validates dimensions, hermiticity, unit trace and positivity.
    pub fn new(rho: ComplexMatrix, d_a: usize, d_b: usize) -> Result<Self> {
        if d_a == 0 || d_b == 0 {
            return Err(Error::InvalidState("local dimensions must be positive".into()));
        }
        if rho.dim() != d_a * d_b {
            return Err(Error::DimensionMismatch {
                expected: d_a * d_b,
                found: rho.dim(),
            });
        }
        let herm = rho.hermiticity_error();
        if herm > STATE_TOL {
            return Err(Error::InvalidState(format!(
                "density matrix is not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let rho = rho.hermitian_part();
        let eig = hermitian_eig(&rho)?;
        if eig.eigenvalues[0] < -STATE_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {:e}",
                eig.eigenvalues[0]
            )));
        }
        Ok(Self { rho, d_a, d_b })
    }

    /// `|psi><psi|` for a (not necessarily normalised) vector.
    pub fn from_pure(psi: &[C64], d_a: usize, d_b: usize) -> Result<Self> {
        let norm = crate::matcore::vec_norm(psi);
        if norm == 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let psi: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        Self::new(ComplexMatrix::outer(&psi), d_a, d_b)
    }

    pub fn product(rho_a: &ComplexMatrix, rho_b: &ComplexMatrix) -> Result<Self> {
        Self::new(kron(rho_a, rho_b), rho_a.dim(), rho_b.dim())
    }

    pub fn maximally_mixed(d_a: usize, d_b: usize) -> Self {
        let n = d_a * d_b;
        Self {
            rho: ComplexMatrix::identity(n).scale(1.0 / n as f64),
            d_a,
            d_b,
        }
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn into_rho(self) -> ComplexMatrix {
        self.rho
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn dim(&self) -> usize {
        self.d_a * self.d_b
    }

    pub fn spectrum(&self) -> Result<HermitianEig> {
        hermitian_eig(&self.rho)
    }

    pub fn is_pure(&self) -> Result<bool> {
        let eig = self.spectrum()?;
        Ok(*eig.eigenvalues.last().unwrap() >= 1.0 - PURITY_TOL)
    }

    pub fn energy(&self, h: &BipartiteHamiltonian) -> f64 {
        h.total().trace_product_re(&self.rho)
    }

    /// Reduced density matrix of `keep`.
    pub fn partial_trace(&self, keep: Subsystem) -> ComplexMatrix {
        partial_trace(&self.rho, self.d_a, self.d_b, keep)
    }

    /// `rho_A ⊗ rho_B`.
    pub fn product_of_marginals(&self) -> BipartiteState {
        let rho_a = self.partial_trace(Subsystem::A);
        let rho_b = self.partial_trace(Subsystem::B);
        BipartiteState {
            rho: kron(&rho_a, &rho_b),
            d_a: self.d_a,
            d_b: self.d_b,
        }
    }

    /// `(U_A ⊗ U_B) rho (U_A ⊗ U_B)^dagger`.
    pub fn apply_local_unitaries(&self, u_a: &ComplexMatrix, u_b: &ComplexMatrix) -> Self {
        let u = kron(u_a, u_b);
        Self {
            rho: self.rho.conjugate_by(&u).hermitian_part(),
            d_a: self.d_a,
            d_b: self.d_b,
        }
    }

    /// Same dimensions, new matrix; skips validation. For matrices obtained
    /// from a valid state by a channel.
    /// Partial transpose on B, index `(i k, j l) -> (i l, j k)`.
    pub fn partial_transpose_b(&self) -> ComplexMatrix {
        let (da, db) = (self.d_a, self.d_b);
        let mut out = ComplexMatrix::zeros(da * db);
        for i in 0..da {
            for k in 0..db {
                for j in 0..da {
                    for l in 0..db {
                        out[(i * db + l, j * db + k)] = self.rho[(i * db + k, j * db + l)];
                    }
                }
            }
        }
        out
    }

    /// Positive partial transpose within `tol`.
    pub fn is_ppt(&self, tol: f64) -> Result<bool> {
        let eig = hermitian_eig(&self.partial_transpose_b())?;
        Ok(eig.eigenvalues[0] >= -tol)
    }
}

pub fn partial_trace(rho: &ComplexMatrix, d_a: usize, d_b: usize, keep: Subsystem) -> ComplexMatrix {
    match keep {
        Subsystem::A => ComplexMatrix::from_fn(d_a, |i, j| {
            (0..d_b).map(|k| rho[(i * d_b + k, j * d_b + k)]).sum()
        }),
        Subsystem::B => ComplexMatrix::from_fn(d_b, |k, l| {
            (0..d_a).map(|i| rho[(i * d_b + k, i * d_b + l)]).sum()
        }),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum HamiltonianKind {
    NonInteracting {
        h_a: ComplexMatrix,
        h_b: ComplexMatrix,
    },
    General {
        h: ComplexMatrix,
    },
}

/// Hermitian observable on the joint space, with its spectrum cached.
#[derive(Debug, Clone)]
pub struct BipartiteHamiltonian {
    kind: HamiltonianKind,
    d_a: usize,
    d_b: usize,
    total: ComplexMatrix,
    eig: HermitianEig,
}

impl BipartiteHamiltonian {
    /// `H = H_A ⊗ 1 + 1 ⊗ H_B`.
    pub fn non_interacting(h_a: ComplexMatrix, h_b: ComplexMatrix) -> Result<Self> {
        for h in [&h_a, &h_b] {
            let dev = h.hermiticity_error();
            if dev > crate::matcore::HERMITIAN_TOL * h.max_abs().max(1.0) {
                return Err(Error::NotHermitian { deviation: dev });
            }
        }
        let (d_a, d_b) = (h_a.dim(), h_b.dim());
        let h_a = h_a.hermitian_part();
        let h_b = h_b.hermitian_part();
        let total = &kron(&h_a, &ComplexMatrix::identity(d_b))
            + &kron(&ComplexMatrix::identity(d_a), &h_b);
        let eig = hermitian_eig(&total)?;
        Ok(Self {
            kind: HamiltonianKind::NonInteracting { h_a, h_b },
            d_a,
            d_b,
            total,
            eig,
        })
    }

    /// Non-interacting Hamiltonian diagonal in the computational bases.
    pub fn local_diagonal(eps_a: &[f64], eps_b: &[f64]) -> Self {
        Self::non_interacting(
            ComplexMatrix::from_real_diag(eps_a),
            ComplexMatrix::from_real_diag(eps_b),
        )
        .expect("diagonal matrices are Hermitian")
    }

    pub fn general(h: ComplexMatrix, d_a: usize, d_b: usize) -> Result<Self> {
        if h.dim() != d_a * d_b {
            return Err(Error::DimensionMismatch {
                expected: d_a * d_b,
                found: h.dim(),
            });
        }
        let eig = hermitian_eig(&h)?;
        let total = h.hermitian_part();
        Ok(Self {
            kind: HamiltonianKind::General { h: total.clone() },
            d_a,
            d_b,
            total,
            eig,
        })
    }

    pub fn kind(&self) -> &HamiltonianKind {
        &self.kind
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn total(&self) -> &ComplexMatrix {
        &self.total
    }

    pub fn eig(&self) -> &HermitianEig {
        &self.eig
    }

    /// Ascending spectrum of the total Hamiltonian.
    pub fn spectrum(&self) -> &[f64] {
        &self.eig.eigenvalues
    }

    pub fn is_non_interacting(&self) -> bool {
        matches!(self.kind, HamiltonianKind::NonInteracting { .. })
    }

    pub fn local_terms(&self) -> Option<(&ComplexMatrix, &ComplexMatrix)> {
        match &self.kind {
            HamiltonianKind::NonInteracting { h_a, h_b } => Some((h_a, h_b)),
            HamiltonianKind::General { .. } => None,
        }
    }

    /// Ascending local spectra, for non-interacting Hamiltonians.
    pub fn local_spectra(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let (h_a, h_b) = self.local_terms()?;
        Some((
            hermitian_eig(h_a).ok()?.eigenvalues,
            hermitian_eig(h_b).ok()?.eigenvalues,
        ))
    }

    /// Largest minus smallest eigenvalue.
    pub fn energy_scale(&self) -> f64 {
        self.spectrum().last().unwrap() - self.spectrum()[0]
    }

    /// True if some adjacent pair of eigenvalues is closer than `gap`.
    pub fn is_degenerate(&self, gap: f64) -> bool {
        self.spectrum().windows(2).any(|w| w[1] - w[0] < gap)
    }

    pub fn check_dims(&self, s: &BipartiteState) -> Result<()> {
        if self.d_a != s.d_a() || self.d_b != s.d_b() {
            return Err(Error::DimensionMismatch {
                expected: self.d_a * self.d_b,
                found: s.dim(),
            });
        }
        Ok(())
    }
}

/// A pair of local orthonormal bases, stored as unitaries whose columns
/// are the basis vectors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalBasisPair {
    basis_a: ComplexMatrix,
    basis_b: ComplexMatrix,
}

impl LocalBasisPair {
    pub fn new(basis_a: ComplexMatrix, basis_b: ComplexMatrix) -> Result<Self> {
        for b in [&basis_a, &basis_b] {
            let gram = b.adjoint().matmul(b);
            let err = gram.distance(&ComplexMatrix::identity(b.dim()));
            if err > BASIS_TOL {
                return Err(Error::InvalidArgument(format!(
                    "basis is not orthonormal (||B^dagger B - 1|| = {err:e})"
                )));
            }
        }
        Ok(Self { basis_a, basis_b })
    }

    pub(crate) fn new_unchecked(basis_a: ComplexMatrix, basis_b: ComplexMatrix) -> Self {
        Self { basis_a, basis_b }
    }

    pub fn computational(d_a: usize, d_b: usize) -> Self {
        Self {
            basis_a: ComplexMatrix::identity(d_a),
            basis_b: ComplexMatrix::identity(d_b),
        }
    }

    pub fn basis_a(&self) -> &ComplexMatrix {
        &self.basis_a
    }

    pub fn basis_b(&self) -> &ComplexMatrix {
        &self.basis_b
    }

    pub fn d_a(&self) -> usize {
        self.basis_a.dim()
    }

    pub fn d_b(&self) -> usize {
        self.basis_b.dim()
    }

    /// `U_A ⊗ U_B`; column `i*d_b + j` is `|a_i> ⊗ |b_j>`.
    pub fn product_unitary(&self) -> ComplexMatrix {
        kron(&self.basis_a, &self.basis_b)
    }

    pub fn product_vector(&self, i: usize, j: usize) -> Vec<C64> {
        crate::matcore::kron_vec(&self.basis_a.column(i), &self.basis_b.column(j))
    }
}

/// `chi = sum_ij p_ij |a_i><a_i| ⊗ |b_j><b_j|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalState {
    /// Row-major `d_a x d_b` table.
    p: Vec<f64>,
    d_a: usize,
    d_b: usize,
    bases: LocalBasisPair,
}

impl ClassicalState {
    pub fn new(p: Vec<f64>, d_a: usize, d_b: usize, bases: LocalBasisPair) -> Result<Self> {
        if p.len() != d_a * d_b {
            return Err(Error::DimensionMismatch {
                expected: d_a * d_b,
                found: p.len(),
            });
        }
        if bases.d_a() != d_a || bases.d_b() != d_b {
            return Err(Error::DimensionMismatch {
                expected: d_a * d_b,
                found: bases.d_a() * bases.d_b(),
            });
        }
        if let Some(neg) = p.iter().find(|&&x| x < -PROB_TOL || !x.is_finite()) {
            return Err(Error::InvalidState(format!("negative probability {neg}")));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidState(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        let p = p.into_iter().map(|x| x.max(0.0)).collect();
        Ok(Self { p, d_a, d_b, bases })
    }

    /// Classical state in the computational bases.
    pub fn computational(p: Vec<f64>, d_a: usize, d_b: usize) -> Result<Self> {
        Self::new(p, d_a, d_b, LocalBasisPair::computational(d_a, d_b))
    }

    /// Renormalises `p` and clips rounding-level negatives; for tables
    /// produced by dephasing a valid state.
    pub(crate) fn from_dephased(p: Vec<f64>, d_a: usize, d_b: usize, bases: LocalBasisPair) -> Self {
        let clipped: Vec<f64> = p.into_iter().map(|x| x.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        Self {
            p: clipped.into_iter().map(|x| x / total).collect(),
            d_a,
            d_b,
            bases,
        }
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    pub fn prob(&self, i: usize, j: usize) -> f64 {
        self.p[i * self.d_b + j]
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn bases(&self) -> &LocalBasisPair {
        &self.bases
    }

    /// Marginal distributions `(p_A, p_B)`.
    pub fn marginals(&self) -> (Vec<f64>, Vec<f64>) {
        let mut pa = vec![0.0; self.d_a];
        let mut pb = vec![0.0; self.d_b];
        for i in 0..self.d_a {
            for j in 0..self.d_b {
                pa[i] += self.prob(i, j);
                pb[j] += self.prob(i, j);
            }
        }
        (pa, pb)
    }

    /// `pi_chi`: same bases, `p_ij = p_A(i) p_B(j)`.
    pub fn product_of_marginals(&self) -> ClassicalState {
        let (pa, pb) = self.marginals();
        let p = pa
            .iter()
            .flat_map(|a| pb.iter().map(move |b| a * b))
            .collect();
        Self {
            p,
            d_a: self.d_a,
            d_b: self.d_b,
            bases: self.bases.clone(),
        }
    }

    /// Shannon entropy of the table in nats, which is also the von Neumann
    /// entropy of the state.
    pub fn entropy(&self) -> f64 {
        shannon_entropy(&self.p)
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let w = self.bases.product_unitary();
        let n = self.d_a * self.d_b;
        ComplexMatrix::from_fn(n, |r, c| {
            (0..n).map(|k| w[(r, k)] * w[(c, k)].conj() * self.p[k]).sum()
        })
    }

    pub fn to_state(&self) -> BipartiteState {
        BipartiteState {
            rho: self.to_matrix().hermitian_part(),
            d_a: self.d_a,
            d_b: self.d_b,
        }
    }

    /// `sum_ij p_ij <a_i b_j|H|a_i b_j>`.
    pub fn energy(&self, h: &BipartiteHamiltonian) -> f64 {
        let w = self.bases.product_unitary();
        let hw = h.total().conjugate_by(&w.adjoint());
        self.p
            .iter()
            .enumerate()
            .map(|(k, p)| p * hw[(k, k)].re)
            .sum()
    }
}

/// `-sum p ln p` with `0 ln 0 = 0`.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    p.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.ln())
        .sum()
}

/// `sum_ij (P_i ⊗ P_j) rho (P_i ⊗ P_j)` as a classical state.
pub fn dephase_by_product_basis(s: &BipartiteState, bases: &LocalBasisPair) -> Result<ClassicalState> {
    if bases.d_a() != s.d_a() || bases.d_b() != s.d_b() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            found: bases.d_a() * bases.d_b(),
        });
    }
    let w = bases.product_unitary();
    let p = product_basis_populations(s.rho(), &w);
    Ok(ClassicalState::from_dephased(p, s.d_a(), s.d_b(), bases.clone()))
}

/// Diagonal of `W^dagger M W`.
pub fn product_basis_populations(m: &ComplexMatrix, w: &ComplexMatrix) -> Vec<f64> {
    let n = m.dim();
    (0..n)
        .map(|k| {
            let col = w.column(k);
            m.quadratic_form(&col).re
        })
        .collect()
}

/// Marginal spectra gaps below this make the marginal eigenbasis ambiguous.
pub const MARGINAL_DEGENERACY_GAP: f64 = 1e-9;

/// Eigenbases of `rho_A` and `rho_B` (columns ordered by descending
/// eigenvalue) and whether either spectrum is degenerate.
pub fn marginal_eigenbases(s: &BipartiteState) -> Result<(LocalBasisPair, bool)> {
    let mut degenerate = false;
    let mut bases = Vec::with_capacity(2);
    for keep in [Subsystem::A, Subsystem::B] {
        let eig = hermitian_eig(&s.partial_trace(keep))?;
        degenerate |= eig
            .eigenvalues
            .windows(2)
            .any(|w| w[1] - w[0] < MARGINAL_DEGENERACY_GAP);
        let d = eig.dim();
        let cols: Vec<Vec<C64>> = (0..d).rev().map(|k| eig.vector(k)).collect();
        bases.push(ComplexMatrix::from_columns(&cols)?);
    }
    let basis_b = bases.pop().unwrap();
    let basis_a = bases.pop().unwrap();
    Ok((LocalBasisPair::new_unchecked(basis_a, basis_b), degenerate))
}

/// Schmidt form of a pure bipartite state.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    /// Squared Schmidt coefficients, descending, length `min(d_a, d_b)`.
    pub coefficients: Vec<f64>,
    /// Column `i` of each basis carries the `i`-th Schmidt vector.
    pub bases: LocalBasisPair,
}

impl SchmidtDecomposition {
    /// `sum_i p_i |i_A><i_A| ⊗ |i_B><i_B|`.
    pub fn dephased(&self) -> ClassicalState {
        let (d_a, d_b) = (self.bases.d_a(), self.bases.d_b());
        let mut p = vec![0.0; d_a * d_b];
        for (i, &c) in self.coefficients.iter().enumerate() {
            p[i * d_b + i] = c;
        }
        ClassicalState::from_dephased(p, d_a, d_b, self.bases.clone())
    }

    /// `sum_i sqrt(p_i) |i_A> ⊗ |i_B>`.
    pub fn state_vector(&self) -> Vec<C64> {
        let n = self.bases.d_a() * self.bases.d_b();
        let mut psi = vec![c64(0.0, 0.0); n];
        for (i, &c) in self.coefficients.iter().enumerate() {
            let v = self.bases.product_vector(i, i);
            for (dst, x) in psi.iter_mut().zip(v) {
                *dst += x * c.sqrt();
            }
        }
        psi
    }
}

pub fn schmidt_decompose(s: &BipartiteState) -> Result<SchmidtDecomposition> {
    let eig = s.spectrum()?;
    let top = *eig.eigenvalues.last().unwrap();
    if top < 1.0 - PURITY_TOL {
        return Err(Error::NotPure { max_eigenvalue: top });
    }
    let psi = eig.vector(eig.dim() - 1);
    let (d_a, d_b) = (s.d_a(), s.d_b());
    // psi = sum M_ij |i>|j>; M M^dagger = rho_A.
    let m = |i: usize, j: usize| psi[i * d_b + j];
    let rho_a = ComplexMatrix::from_fn(d_a, |i, k| (0..d_b).map(|j| m(i, j) * m(k, j).conj()).sum());
    let ea = hermitian_eig(&rho_a)?;
    let order: Vec<usize> = (0..d_a).rev().collect();
    let basis_a_cols: Vec<Vec<C64>> = order.iter().map(|&k| ea.vector(k)).collect();
    let r = d_a.min(d_b);
    let mut coefficients = Vec::with_capacity(r);
    let mut b_cols: Vec<Vec<C64>> = Vec::with_capacity(d_b);
    for (i, u) in basis_a_cols.iter().take(r).enumerate() {
        let p = ea.eigenvalues[order[i]].max(0.0);
        coefficients.push(p);
        if p > 1e-12 {
            let mut b: Vec<C64> = (0..d_b)
                .map(|j| (0..d_a).map(|k| u[k].conj() * m(k, j)).sum())
                .collect();
            let n = crate::matcore::vec_norm(&b);
            b.iter_mut().for_each(|z| *z /= n);
            b_cols.push(b);
        }
    }
    complete_basis(&mut b_cols, d_b);
    let total: f64 = coefficients.iter().sum();
    coefficients.iter_mut().for_each(|c| *c /= total);
    Ok(SchmidtDecomposition {
        coefficients,
        bases: LocalBasisPair::new(
            ComplexMatrix::from_columns(&basis_a_cols)?,
            ComplexMatrix::from_columns(&b_cols)?,
        )?,
    })
}

/// Extends an orthonormal family to a basis of `C^d` by Gram–Schmidt on the
/// standard basis vectors.
pub fn complete_basis(cols: &mut Vec<Vec<C64>>, d: usize) {
    for e in 0..d {
        if cols.len() == d {
            break;
        }
        let mut v = vec![c64(0.0, 0.0); d];
        v[e] = c64(1.0, 0.0);
        for _ in 0..2 {
            for c in cols.iter() {
                let ov = inner(c, &v);
                for (x, y) in v.iter_mut().zip(c) {
                    *x -= ov * y;
                }
            }
        }
        let n = crate::matcore::vec_norm(&v);
        if n > 1e-6 {
            v.iter_mut().for_each(|z| *z /= n);
            cols.push(v);
        }
    }
}
