//! Seeded sampling of states, classical tables, spectra and unitaries.
//!
//! Every experiment owns a [`ExperimentRng`]; parallel shards get their own
//! generator seeded with `seed + shard_index`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use super::{BipartiteState, ClassicalState, LocalBasisPair};
use crate::matcore::{c64, inner, vec_norm, ComplexMatrix, C64};

/// Counter-based generator used throughout; bit-reproducible per seed.
pub type ExperimentRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> ExperimentRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for shard `shard` of stream `stream` of an experiment seeded
/// with `seed`.
pub fn shard_rng(seed: u64, shard: u64, stream: u64) -> ExperimentRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(shard));
    rng.set_stream(stream);
    rng
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64(re, im)
}

/// `G G^dagger / tr` with `G` a `d x rank` complex Ginibre matrix.
pub fn random_state<R: Rng + ?Sized>(d_a: usize, d_b: usize, rank: usize, rng: &mut R) -> BipartiteState {
    let n = d_a * d_b;
    let rank = rank.clamp(1, n);
    let g: Vec<Vec<C64>> = (0..n)
        .map(|_| (0..rank).map(|_| complex_normal(rng)).collect())
        .collect();
    let mut rho = ComplexMatrix::from_fn(n, |i, j| {
        g[i].iter().zip(&g[j]).map(|(a, b)| a * b.conj()).sum()
    });
    let tr = rho.trace().re;
    rho = rho.scale(1.0 / tr).hermitian_part();
    BipartiteState::new(rho, d_a, d_b).expect("Ginibre sample is a valid state")
}

pub fn random_pure_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    let mut v: Vec<C64> = (0..n).map(|_| complex_normal(rng)).collect();
    let norm = vec_norm(&v);
    v.iter_mut().for_each(|z| *z /= norm);
    v
}

pub fn random_pure_state<R: Rng + ?Sized>(d_a: usize, d_b: usize, rng: &mut R) -> BipartiteState {
    BipartiteState::from_pure(&random_pure_vector(d_a * d_b, rng), d_a, d_b)
        .expect("normalised vector")
}

/// Flat Dirichlet sample via normalised standard exponentials.
pub fn random_simplex<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = e.iter().sum();
    e.into_iter().map(|x| x / total).collect()
}

/// Uniform table on the simplex, computational bases.
pub fn random_classical<R: Rng + ?Sized>(d_a: usize, d_b: usize, rng: &mut R) -> ClassicalState {
    let p = random_simplex(d_a * d_b, rng);
    ClassicalState::from_dephased(p, d_a, d_b, LocalBasisPair::computational(d_a, d_b))
}

/// I.i.d. uniform on `[0, 1]`, sorted ascending.
pub fn random_local_spectra<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    let mut v: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Haar unitary: Gram–Schmidt on a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v: Vec<C64> = (0..d).map(|_| complex_normal(rng)).collect();
        for _ in 0..2 {
            for c in &cols {
                let ov = inner(c, &v);
                for (x, y) in v.iter_mut().zip(c) {
                    *x -= ov * y;
                }
            }
        }
        let n = vec_norm(&v);
        if n > 1e-8 {
            v.iter_mut().for_each(|z| *z /= n);
            cols.push(v);
        }
    }
    ComplexMatrix::from_columns(&cols).expect("square")
}

/// Hermitian matrix with i.i.d. Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(d, |_, _| complex_normal(rng));
    g.hermitian_part()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::hermitian_eig;

    #[test]
    fn classical_draws_are_distributions() {
        let mut rng = rng_from_seed(1);
        for _ in 0..10_000 {
            let chi = random_classical(2, 3, &mut rng);
            let p = chi.probabilities();
            assert!(p.iter().all(|&x| x >= 0.0));
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let a = random_classical(3, 3, &mut rng_from_seed(42));
        let b = random_classical(3, 3, &mut rng_from_seed(42));
        assert_eq!(a.probabilities(), b.probabilities());
        let c = random_classical(3, 3, &mut rng_from_seed(43));
        assert_ne!(a.probabilities(), c.probabilities());
    }

    #[test]
    fn full_rank_ginibre_is_full_rank() {
        let mut rng = rng_from_seed(7);
        for _ in 0..1000 {
            let s = random_state(2, 2, 4, &mut rng);
            let e = hermitian_eig(s.rho()).unwrap();
            assert!(e.eigenvalues[0] >= 1e-12);
        }
    }

    #[test]
    fn spectra_sorted_in_unit_interval() {
        let mut rng = rng_from_seed(3);
        let v = random_local_spectra(5, &mut rng);
        assert!(v.windows(2).all(|w| w[0] <= w[1]));
        assert!(v.iter().all(|&x| (0.0..=1.0).contains(&x)));
    }

    #[test]
    fn unitary_is_unitary() {
        let mut rng = rng_from_seed(11);
        let u = random_unitary(4, &mut rng);
        assert!(u.adjoint().matmul(&u).distance(&ComplexMatrix::identity(4)) < 1e-12);
    }

    #[test]
    fn shard_streams_differ() {
        let a: f64 = shard_rng(5, 0, 2).random();
        let b: f64 = shard_rng(5, 1, 2).random();
        let c: f64 = shard_rng(5, 0, 3).random();
        assert_ne!(a, b);
        assert_ne!(a, c);
        let again: f64 = shard_rng(5, 0, 2).random();
        assert_eq!(a, again);
    }
}
