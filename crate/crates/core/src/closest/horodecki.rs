use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{c64, ComplexMatrix, C64};
use crate::qstate::BipartiteState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HorodeckiSign {
    Plus,
    Minus,
}

/// `p |psi±><psi±| + (1-p) |00><00|` with `psi± = (|01> ± |10>)/sqrt 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HorodeckiFamily {
    pub p: f64,
    pub sign: HorodeckiSign,
}

fn psi(sign: HorodeckiSign) -> [C64; 4] {
    let v = std::f64::consts::FRAC_1_SQRT_2;
    let s = match sign {
        HorodeckiSign::Plus => v,
        HorodeckiSign::Minus => -v,
    };
    [c64(0.0, 0.0), c64(v, 0.0), c64(s, 0.0), c64(0.0, 0.0)]
}

impl HorodeckiFamily {
    pub fn new(p: f64, sign: HorodeckiSign) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("Horodecki weight p = {p} outside [0, 1]")));
        }
        Ok(Self { p, sign })
    }

    pub fn to_state(&self) -> BipartiteState {
        let mut rho = ComplexMatrix::outer(&psi(self.sign)).scale(self.p);
        rho[(0, 0)] += c64(1.0 - self.p, 0.0);
        BipartiteState::new(rho, 2, 2).expect("family member is a valid state")
    }

    /// Recognises a two-qubit state as a family member within 1e-9.
    pub fn detect(s: &BipartiteState) -> Option<Self> {
        if s.d_a() != 2 || s.d_b() != 2 {
            return None;
        }
        let rho = s.rho();
        let p = 1.0 - rho[(0, 0)].re;
        let sign = if rho[(1, 2)].re >= 0.0 {
            HorodeckiSign::Plus
        } else {
            HorodeckiSign::Minus
        };
        let fam = Self::new(p.clamp(0.0, 1.0), sign).ok()?;
        (fam.to_state().rho().distance(rho) <= 1e-9).then_some(fam)
    }
}

/// `q'^2 |00><00| + 2 p' q' |psi±><psi±| + p'^2 |11><11|` with `p' = p/2`.
pub fn horodecki_closest_separable(fam: &HorodeckiFamily) -> BipartiteState {
    let pp = fam.p / 2.0;
    let qq = 1.0 - pp;
    let mut sigma = ComplexMatrix::outer(&psi(fam.sign)).scale(2.0 * pp * qq);
    sigma[(0, 0)] += c64(qq * qq, 0.0);
    sigma[(3, 3)] += c64(pp * pp, 0.0);
    BipartiteState::new(sigma, 2, 2).expect("closest separable state is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::BipartiteHamiltonian;

    #[test]
    fn p_zero_is_ground_state() {
        let fam = HorodeckiFamily::new(0.0, HorodeckiSign::Plus).unwrap();
        let sigma = horodecki_closest_separable(&fam);
        let g = ComplexMatrix::from_real_diag(&[1.0, 0.0, 0.0, 0.0]);
        assert!(sigma.rho().distance(&g) < 1e-15);
        assert!(fam.to_state().rho().distance(&g) < 1e-15);
    }

    #[test]
    fn half_weights() {
        let fam = HorodeckiFamily::new(0.5, HorodeckiSign::Minus).unwrap();
        let sigma = horodecki_closest_separable(&fam);
        let w = |v: &[C64]| sigma.rho().quadratic_form(v).re;
        let e00 = [c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)];
        let e11 = [c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)];
        assert!((w(&e00) - 9.0 / 16.0).abs() < 1e-15);
        assert!((w(&psi(HorodeckiSign::Minus)) - 6.0 / 16.0).abs() < 1e-15);
        assert!((w(&e11) - 1.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn separable_and_same_energy() {
        let h = BipartiteHamiltonian::local_diagonal(&[0.0, 1.0], &[0.0, 1.0]);
        for k in 0..=20 {
            let p = k as f64 / 20.0;
            for sign in [HorodeckiSign::Plus, HorodeckiSign::Minus] {
                let fam = HorodeckiFamily::new(p, sign).unwrap();
                let sigma = horodecki_closest_separable(&fam);
                assert!(sigma.is_ppt(1e-12).unwrap());
                assert!((sigma.energy(&h) - fam.to_state().energy(&h)).abs() < 1e-12);
                let found = HorodeckiFamily::detect(&fam.to_state()).unwrap();
                assert!(found.to_state().rho().distance(fam.to_state().rho()) < 1e-12);
            }
        }
        let half = HorodeckiFamily::new(0.5, HorodeckiSign::Plus).unwrap();
        assert!((half.to_state().energy(&h) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_others() {
        assert!(HorodeckiFamily::new(1.2, HorodeckiSign::Plus).is_err());
        let mm = BipartiteState::maximally_mixed(2, 2);
        assert!(HorodeckiFamily::detect(&mm).is_none());
    }
}
