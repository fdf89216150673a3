use serde::{Deserialize, Serialize};

use super::element::{ip_endo, LieElement};
use crate::forms4::{pair_slot, sd_project, SdBasis, TwoForm, PAIRS};
use crate::{Error, Result};

/// A 2-form with Lie-algebra coefficients, stored as six matrices in the
/// shared `(12, 13, 14, 23, 24, 34)` order.
///
/// `|P|^2 = 2 * sum_{i<j} |P_ij|^2` with `|A|^2 = -tr(A^2)/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LieValuedTwoForm {
    pub coeffs: [LieElement; 6],
}

impl LieValuedTwoForm {
    pub fn zeros(n: usize) -> Self {
        Self {
            coeffs: std::array::from_fn(|_| LieElement::zeros(n)),
        }
    }

    pub fn dim(&self) -> usize {
        self.coeffs[0].dim()
    }

    /// `form (x) value`.
    pub fn simple(form: &TwoForm, value: &LieElement) -> Self {
        Self {
            coeffs: std::array::from_fn(|s| value * form.components[s]),
        }
    }

    /// `sum_a e_a (x) values[a]`.
    pub fn from_sd(basis: &SdBasis, values: &[LieElement; 3]) -> Self {
        let n = values[0].dim();
        let mut out = Self::zeros(n);
        for (e, v) in basis.e.iter().zip(values) {
            out.add_assign(&Self::simple(e, v));
        }
        out
    }

    /// The coefficients `P^a = <e_a, P>` (form factor only).
    pub fn sd_coefficients(&self, basis: &SdBasis) -> [LieElement; 3] {
        std::array::from_fn(|a| {
            let mut acc = LieElement::zeros(self.dim());
            for s in 0..6 {
                acc += &(&self.coeffs[s] * (2.0 * basis.e[a].components[s]));
            }
            acc
        })
    }

    /// Antisymmetric access with zero-based indices.
    pub fn get(&self, i: usize, j: usize) -> LieElement {
        match pair_slot(i, j) {
            Some((slot, sign)) => &self.coeffs[slot] * sign,
            None => LieElement::zeros(self.dim()),
        }
    }

    pub fn add_assign(&mut self, other: &LieValuedTwoForm) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            coeffs: std::array::from_fn(|k| &self.coeffs[k] * s),
        }
    }

    pub fn sub(&self, other: &LieValuedTwoForm) -> Self {
        Self {
            coeffs: std::array::from_fn(|k| &self.coeffs[k] - &other.coeffs[k]),
        }
    }

    pub fn inner(&self, other: &LieValuedTwoForm) -> Result<f64> {
        let mut s = 0.0;
        for (a, b) in self.coeffs.iter().zip(&other.coeffs) {
            s += ip_endo(a, b)?;
        }
        Ok(2.0 * s)
    }

    pub fn norm_sq(&self) -> f64 {
        2.0 * self.coeffs.iter().map(LieElement::norm_sq).sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.max_abs()))
    }

    /// Hodge star on the form factor.
    pub fn star(&self) -> Self {
        let c = &self.coeffs;
        Self {
            coeffs: [
                c[5].clone(),
                -c[4].clone(),
                c[3].clone(),
                c[2].clone(),
                -c[1].clone(),
                c[0].clone(),
            ],
        }
    }

    /// Self-dual and anti-self-dual parts, entrywise over the matrix coefficients.
    pub fn sd_split(&self) -> (Self, Self) {
        let n = self.dim();
        let mut plus = Self::zeros(n);
        let mut minus = Self::zeros(n);
        for r in 0..n {
            for c in 0..n {
                let form = TwoForm::new(std::array::from_fn(|s| self.coeffs[s].0[(r, c)]));
                let (p, m) = sd_project(&form);
                for s in 0..6 {
                    plus.coeffs[s].0[(r, c)] = p.components[s];
                    minus.coeffs[s].0[(r, c)] = m.components[s];
                }
            }
        }
        (plus, minus)
    }

    pub fn conjugated(&self, g: &nalgebra::DMatrix<f64>) -> Self {
        Self {
            coeffs: std::array::from_fn(|s| self.coeffs[s].conjugated(g)),
        }
    }
}

/// The bracket of Lie-valued 2-forms, index formula
/// `[P,Q]_ij = sum_k ( P_ik Q_jk - Q_jk P_ik - P_jk Q_ik + Q_ik P_jk )`
/// with matrix products taken row-by-column.
pub fn comm2form(p: &LieValuedTwoForm, q: &LieValuedTwoForm) -> Result<LieValuedTwoForm> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            left: p.dim(),
            right: q.dim(),
        });
    }
    let n = p.dim();
    let mut out = LieValuedTwoForm::zeros(n);
    for (slot, &(i, j)) in PAIRS.iter().enumerate() {
        let mut acc = LieElement::zeros(n);
        for k in 0..4 {
            // the k = i and k = j terms vanish identically
            if k == i || k == j {
                continue;
            }
            let pik = p.get(i, k);
            let qjk = q.get(j, k);
            let pjk = p.get(j, k);
            let qik = q.get(i, k);
            acc += &pik.commutator(&qjk);
            acc = &acc - &pjk.commutator(&qik);
        }
        out.coeffs[slot] = acc;
    }
    Ok(out)
}

/// `(2/sqrt3) gamma0 |P|^2 - |[P,P]|`; nonnegative for self-dual `P`.
pub fn bracket_bound_check(p: &LieValuedTwoForm, gamma0: f64) -> Result<f64> {
    let pp = comm2form(p, p)?;
    Ok(2.0 / 3f64.sqrt() * gamma0 * p.norm_sq() - pp.norm())
}

/// `<omega, [omega, omega]> / |omega|^3`, the functional whose supremum is gamma1.
pub fn cubic_ratio(omega: &LieValuedTwoForm) -> Result<f64> {
    let n = omega.norm();
    if n == 0.0 {
        return Err(Error::invalid("cubic ratio of the zero form"));
    }
    Ok(omega.inner(&comm2form(omega, omega)?)? / (n * n * n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::element::quaternion_units;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bpst_shape() -> LieValuedTwoForm {
        LieValuedTwoForm::from_sd(&SdBasis::standard(), &quaternion_units())
    }

    /// Independent oracle: every index written out, matrix entries included.
    fn comm2form_loops(p: &LieValuedTwoForm, q: &LieValuedTwoForm) -> LieValuedTwoForm {
        let n = p.dim();
        let entry = |f: &LieValuedTwoForm, i: usize, j: usize, beta: usize, alpha: usize| -> f64 {
            if i == j {
                return 0.0;
            }
            let (lo, hi, sign) = if i < j { (i, j, 1.0) } else { (j, i, -1.0) };
            let slot = PAIRS.iter().position(|&pr| pr == (lo, hi)).unwrap();
            sign * f.coeffs[slot].0[(beta, alpha)]
        };
        let mut out = LieValuedTwoForm::zeros(n);
        for (slot, &(i, j)) in PAIRS.iter().enumerate() {
            for beta in 0..n {
                for alpha in 0..n {
                    let mut v = 0.0;
                    for k in 0..4 {
                        for delta in 0..n {
                            v += entry(p, i, k, beta, delta) * entry(q, j, k, delta, alpha)
                                - entry(p, i, k, delta, alpha) * entry(q, j, k, beta, delta)
                                - entry(p, j, k, beta, delta) * entry(q, i, k, delta, alpha)
                                + entry(p, j, k, delta, alpha) * entry(q, i, k, beta, delta);
                        }
                    }
                    out.coeffs[slot].0[(beta, alpha)] = v;
                }
            }
        }
        out
    }

    fn random_form(rng: &mut impl Rng, n: usize) -> LieValuedTwoForm {
        let mut f = LieValuedTwoForm::zeros(n);
        for c in f.coeffs.iter_mut() {
            for i in 0..n {
                for j in i + 1..n {
                    let v = rng.random_range(-1.0..1.0);
                    c.0[(i, j)] = v;
                    c.0[(j, i)] = -v;
                }
            }
        }
        f
    }

    #[test]
    fn bpst_shape_values() {
        let p = bpst_shape();
        assert!((p.norm_sq() - 6.0).abs() < 1e-14);
        let pp = comm2form(&p, &p).unwrap();
        assert!((p.inner(&pp).unwrap() - 24.0).abs() < 1e-12);
        assert!((pp.norm() - 4.0 * 6f64.sqrt()).abs() < 1e-12);
        assert!(bracket_bound_check(&p, 2f64.sqrt()).unwrap().abs() < 1e-10);
        assert!((cubic_ratio(&p).unwrap() - 4.0 / 6f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn single_coefficient_has_zero_bracket() {
        let [i, _, _] = quaternion_units();
        let p = LieValuedTwoForm::simple(&SdBasis::standard().e[0], &i);
        assert!(comm2form(&p, &p).unwrap().max_abs() < 1e-15);
        let zero = LieValuedTwoForm::zeros(4);
        assert_eq!(bracket_bound_check(&zero, 2f64.sqrt()).unwrap(), 0.0);
    }

    #[test]
    fn matches_brute_force_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [3, 4, 5] {
            for _ in 0..20 {
                let p = random_form(&mut rng, n);
                let q = random_form(&mut rng, n);
                let fast = comm2form(&p, &q).unwrap();
                let slow = comm2form_loops(&p, &q);
                assert!(fast.sub(&slow).max_abs() < 1e-12);
            }
        }
    }

    #[test]
    fn self_dual_inputs_give_self_dual_output() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let (p, _) = random_form(&mut rng, 4).sd_split();
            let (q, _) = random_form(&mut rng, 4).sd_split();
            let (_, minus) = comm2form(&p, &q).unwrap().sd_split();
            assert!(minus.max_abs() < 1e-12);
        }
    }

    #[test]
    fn sd_coefficients_round_trip() {
        let basis = SdBasis::standard();
        let p = bpst_shape();
        let back = LieValuedTwoForm::from_sd(&basis, &p.sd_coefficients(&basis));
        assert!(back.sub(&p).max_abs() < 1e-15);
    }

    #[test]
    fn rejects_mismatched_dimensions() {
        let a = LieValuedTwoForm::zeros(3);
        let b = LieValuedTwoForm::zeros(4);
        assert!(comm2form(&a, &b).is_err());
    }
}
