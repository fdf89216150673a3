use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A real skew-symmetric `n x n` matrix with `<A, B> = -tr(AB)/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LieElement(pub DMatrix<f64>);

impl LieElement {
    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    /// Row-major entries.
    pub fn from_rows(n: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), n * n, "expected {} entries", n * n);
        Self(DMatrix::from_row_slice(n, n, entries))
    }

    /// `E_ij - E_ji` (zero-based).
    pub fn elementary(n: usize, i: usize, j: usize) -> Self {
        let mut m = DMatrix::zeros(n, n);
        m[(i, j)] = 1.0;
        m[(j, i)] = -1.0;
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    /// Embeds into the upper-left block of an `n x n` zero matrix.
    pub fn padded(&self, n: usize) -> Self {
        let k = self.dim();
        assert!(n >= k, "cannot pad a {k}x{k} element down to {n}");
        let mut m = DMatrix::zeros(n, n);
        m.view_mut((0, 0), (k, k)).copy_from(&self.0);
        Self(m)
    }

    pub fn skew_defect(&self) -> f64 {
        (&self.0 + self.0.transpose()).amax()
    }

    pub fn norm_sq(&self) -> f64 {
        // -tr(A A)/2 = |A|_F^2 / 2 for skew A
        0.5 * self.0.iter().map(|v| v * v).sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.amax()
    }

    /// `g A g^T`.
    pub fn conjugated(&self, g: &DMatrix<f64>) -> Self {
        Self(g * &self.0 * g.transpose())
    }

    /// Commutator without the dimension check, for internal hot loops.
    pub(crate) fn commutator(&self, other: &LieElement) -> LieElement {
        LieElement(&self.0 * &other.0 - &other.0 * &self.0)
    }
}

fn check_dims(a: &LieElement, b: &LieElement) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

/// `<a, b> = -tr(ab)/2`.
pub fn ip_endo(a: &LieElement, b: &LieElement) -> Result<f64> {
    check_dims(a, b)?;
    Ok(-0.5 * (&a.0 * &b.0).trace())
}

/// `ab - ba`.
pub fn bracket(a: &LieElement, b: &LieElement) -> Result<LieElement> {
    check_dims(a, b)?;
    Ok(a.commutator(b))
}

impl Add for &LieElement {
    type Output = LieElement;
    fn add(self, rhs: &LieElement) -> LieElement {
        LieElement(&self.0 + &rhs.0)
    }
}

impl Add for LieElement {
    type Output = LieElement;
    fn add(self, rhs: LieElement) -> LieElement {
        LieElement(self.0 + rhs.0)
    }
}

impl AddAssign<&LieElement> for LieElement {
    fn add_assign(&mut self, rhs: &LieElement) {
        self.0 += &rhs.0;
    }
}

impl Sub for &LieElement {
    type Output = LieElement;
    fn sub(self, rhs: &LieElement) -> LieElement {
        LieElement(&self.0 - &rhs.0)
    }
}

impl Sub for LieElement {
    type Output = LieElement;
    fn sub(self, rhs: LieElement) -> LieElement {
        LieElement(self.0 - rhs.0)
    }
}

impl Neg for LieElement {
    type Output = LieElement;
    fn neg(self) -> LieElement {
        LieElement(-self.0)
    }
}

impl Mul<f64> for &LieElement {
    type Output = LieElement;
    fn mul(self, s: f64) -> LieElement {
        LieElement(&self.0 * s)
    }
}

impl Mul<f64> for LieElement {
    type Output = LieElement;
    fn mul(self, s: f64) -> LieElement {
        LieElement(self.0 * s)
    }
}

/// Real 4x4 quaternion unit `i`.
pub fn quaternion_i() -> LieElement {
    LieElement::from_rows(
        4,
        &[
            0., 0., 1., 0., //
            0., 0., 0., 1., //
            -1., 0., 0., 0., //
            0., -1., 0., 0.,
        ],
    )
}

/// Real 4x4 quaternion unit `j`.
pub fn quaternion_j() -> LieElement {
    LieElement::from_rows(
        4,
        &[
            0., 0., 0., 1., //
            0., 0., -1., 0., //
            0., 1., 0., 0., //
            -1., 0., 0., 0.,
        ],
    )
}

/// Real 4x4 quaternion unit `k`.
pub fn quaternion_k() -> LieElement {
    LieElement::from_rows(
        4,
        &[
            0., 1., 0., 0., //
            -1., 0., 0., 0., //
            0., 0., 0., -1., //
            0., 0., 1., 0.,
        ],
    )
}

/// `[i, j, k]`, after asserting the quaternion relations `i^2 = j^2 = k^2 = -1`
/// and `ij = k` hold for the matrices above.
pub fn quaternion_units() -> [LieElement; 3] {
    let units = [quaternion_i(), quaternion_j(), quaternion_k()];
    let id = DMatrix::<f64>::identity(4, 4);
    for u in &units {
        assert!((&u.0 * &u.0 + &id).amax() == 0.0, "quaternion unit must square to -1");
    }
    assert!(
        (&units[0].0 * &units[1].0 - &units[2].0).amax() == 0.0,
        "quaternion matrices violate ij = k"
    );
    units
}

/// The block pair attaining `|[A, B]| = sqrt(2) |A| |B|`, padded to `n >= 4`.
pub fn pauli_pair(t: f64, s: f64, n: usize) -> (LieElement, LieElement) {
    let a = LieElement::from_rows(
        4,
        &[
            0., t, 0., 0., //
            -t, 0., 0., 0., //
            0., 0., 0., t, //
            0., 0., -t, 0.,
        ],
    );
    let b = LieElement::from_rows(
        4,
        &[
            0., 0., -s, 0., //
            0., 0., 0., s, //
            s, 0., 0., 0., //
            0., -s, 0., 0.,
        ],
    );
    (a.padded(n), b.padded(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratio(a: &LieElement, b: &LieElement) -> f64 {
        bracket(a, b).unwrap().norm() / (a.norm() * b.norm())
    }

    #[test]
    fn quaternion_inner_products() {
        let [i, j, k] = quaternion_units();
        assert_eq!(ip_endo(&i, &i).unwrap(), 2.0);
        assert_eq!(ip_endo(&j, &j).unwrap(), 2.0);
        assert_eq!(ip_endo(&k, &k).unwrap(), 2.0);
        assert_eq!(ip_endo(&i, &j).unwrap(), 0.0);
        assert_eq!(ip_endo(&LieElement::zeros(4), &j).unwrap(), 0.0);
        assert_eq!(i.norm_sq(), 2.0);
    }

    #[test]
    fn quaternion_brackets() {
        let [i, j, k] = quaternion_units();
        assert_eq!(bracket(&i, &j).unwrap(), &k * 2.0);
        assert_eq!(bracket(&j, &k).unwrap(), &i * 2.0);
        assert_eq!(bracket(&k, &i).unwrap(), &j * 2.0);
        assert_eq!(bracket(&i, &i).unwrap(), LieElement::zeros(4));
        assert!((ratio(&i, &j) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let a = LieElement::zeros(3);
        let b = LieElement::zeros(4);
        assert!(matches!(
            ip_endo(&a, &b),
            Err(Error::DimensionMismatch { left: 3, right: 4 })
        ));
        assert!(bracket(&a, &b).is_err());
    }

    #[test]
    fn pauli_pairs_attain_sqrt2() {
        let (a, b) = pauli_pair(1.0, 1.0, 4);
        assert!((ratio(&a, &b) - 2f64.sqrt()).abs() < 1e-15);
        let (a, b) = pauli_pair(2.0, 3.0, 6);
        assert_eq!(a.dim(), 6);
        assert!((ratio(&a, &b) - 2f64.sqrt()).abs() < 1e-15);
        let (a, b) = pauli_pair(0.0, 1.0, 4);
        assert_eq!(a, LieElement::zeros(4));
        assert!(b.norm() > 0.0);
    }

    #[test]
    fn bracket_stays_skew_and_satisfies_jacobi() {
        let a = LieElement::elementary(4, 0, 1) + LieElement::elementary(4, 2, 3) * 0.3;
        let b = LieElement::elementary(4, 1, 2) * -1.7 + LieElement::elementary(4, 0, 3);
        let c = LieElement::elementary(4, 0, 2) * 0.4 + LieElement::elementary(4, 1, 3) * 2.1;
        let ab = bracket(&a, &b).unwrap();
        assert!(ab.skew_defect() < 1e-13);
        assert_eq!(ab, -bracket(&b, &a).unwrap());
        let j = bracket(&a, &bracket(&b, &c).unwrap()).unwrap()
            + bracket(&b, &bracket(&c, &a).unwrap()).unwrap()
            + bracket(&c, &bracket(&a, &b).unwrap()).unwrap();
        assert!(j.max_abs() < 1e-13);
    }
}
