use serde::{Deserialize, Serialize};

use super::element::{ip_endo, quaternion_units, LieElement};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgebraKind {
    /// All skew-symmetric `n x n` matrices.
    So(usize),
    /// `span{i, j, k}` with the real 4x4 quaternion matrices.
    Su2Real,
    /// `so(3)` as 3x3 skew matrices padded by a zero row and column.
    So3Block,
    Custom(String),
}

impl std::fmt::Display for AlgebraKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AlgebraKind::So(n) => write!(f, "so({n})"),
            AlgebraKind::Su2Real => f.write_str("su2_real"),
            AlgebraKind::So3Block => f.write_str("so3_block"),
            AlgebraKind::Custom(name) => f.write_str(name),
        }
    }
}

/// A matrix Lie subalgebra of `so(n)` together with the data the optimizers
/// work in: an orthonormal frame and the structure constants
/// `c[p][q][r] = <f_r, [f_p, f_q]>` of that frame.
#[derive(Debug, Clone)]
pub struct AlgebraSpec {
    pub kind: AlgebraKind,
    /// Matrix size.
    pub n: usize,
    /// The defining basis, as given.
    pub basis: Vec<LieElement>,
    frame: Vec<LieElement>,
    structure: Vec<f64>,
}

impl AlgebraSpec {
    pub const CLOSURE_TOLERANCE: f64 = 1e-12;

    pub fn so(n: usize) -> Self {
        assert!(n >= 2, "so(n) needs n >= 2");
        let mut basis = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                basis.push(LieElement::elementary(n, i, j));
            }
        }
        Self::build(AlgebraKind::So(n), basis).expect("so(n) is a Lie algebra")
    }

    pub fn su2_real() -> Self {
        Self::build(AlgebraKind::Su2Real, quaternion_units().to_vec())
            .expect("su(2) is a Lie algebra")
    }

    pub fn so3_block() -> Self {
        let basis = vec![
            LieElement::elementary(3, 1, 2).padded(4),
            LieElement::elementary(3, 2, 0).padded(4),
            LieElement::elementary(3, 0, 1).padded(4),
        ];
        Self::build(AlgebraKind::So3Block, basis).expect("so(3) is a Lie algebra")
    }

    /// Validates skew-symmetry, linear independence and bracket closure.
    pub fn custom(name: impl Into<String>, basis: Vec<LieElement>) -> Result<Self> {
        Self::build(AlgebraKind::Custom(name.into()), basis)
    }

    fn build(kind: AlgebraKind, basis: Vec<LieElement>) -> Result<Self> {
        let n = basis
            .first()
            .ok_or_else(|| Error::invalid("empty basis"))?
            .dim();
        for b in &basis {
            if b.dim() != n {
                return Err(Error::DimensionMismatch { left: n, right: b.dim() });
            }
            if b.skew_defect() > 1e-14 {
                return Err(Error::invalid("basis element is not skew-symmetric"));
            }
        }
        // Gram-Schmidt (twice, for stability) under -tr(AB)/2.
        let mut frame: Vec<LieElement> = Vec::with_capacity(basis.len());
        for b in &basis {
            let mut v = b.clone();
            for _ in 0..2 {
                for f in &frame {
                    let c = ip_endo(f, &v)?;
                    v = &v - &(f * c);
                }
            }
            let norm = v.norm();
            if norm < 1e-10 * b.norm().max(1.0) {
                return Err(Error::invalid("basis elements are linearly dependent"));
            }
            frame.push(v * (1.0 / norm));
        }
        let d = frame.len();
        let mut structure = vec![0.0; d * d * d];
        for p in 0..d {
            for q in 0..d {
                let br = frame[p].commutator(&frame[q]);
                let mut residual = br.clone();
                for r in 0..d {
                    let c = ip_endo(&frame[r], &br)?;
                    structure[(p * d + q) * d + r] = c;
                    residual = &residual - &(&frame[r] * c);
                }
                if residual.max_abs() > Self::CLOSURE_TOLERANCE * (1.0 + br.max_abs()) {
                    return Err(Error::invalid(format!(
                        "basis is not closed under the bracket (defect {:.3e})",
                        residual.max_abs()
                    )));
                }
            }
        }
        Ok(Self {
            kind,
            n,
            basis,
            frame,
            structure,
        })
    }

    /// Dimension of the algebra.
    pub fn dim(&self) -> usize {
        self.frame.len()
    }

    pub fn frame(&self) -> &[LieElement] {
        &self.frame
    }

    /// `<f_r, [f_p, f_q]>`.
    #[inline]
    pub fn structure_constant(&self, p: usize, q: usize, r: usize) -> f64 {
        let d = self.dim();
        self.structure[(p * d + q) * d + r]
    }

    /// Coordinates of the orthogonal projection onto the algebra.
    pub fn coordinates(&self, a: &LieElement) -> Result<Vec<f64>> {
        self.frame.iter().map(|f| ip_endo(f, a)).collect()
    }

    pub fn element(&self, coords: &[f64]) -> LieElement {
        assert_eq!(coords.len(), self.dim());
        let mut out = LieElement::zeros(self.n);
        for (f, &c) in self.frame.iter().zip(coords) {
            out += &(f * c);
        }
        out
    }

    /// Distance from `a` to the algebra, measured in max-abs entries.
    pub fn projection_residual(&self, a: &LieElement) -> Result<f64> {
        let proj = self.element(&self.coordinates(a)?);
        Ok((a - &proj).max_abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::element::bracket;

    #[test]
    fn dimensions() {
        assert_eq!(AlgebraSpec::so(4).dim(), 6);
        assert_eq!(AlgebraSpec::so(5).dim(), 10);
        assert_eq!(AlgebraSpec::su2_real().dim(), 3);
        assert_eq!(AlgebraSpec::so3_block().dim(), 3);
        assert_eq!(AlgebraSpec::so3_block().n, 4);
    }

    #[test]
    fn su2_basis_is_the_quaternion_matrices() {
        let alg = AlgebraSpec::su2_real();
        assert_eq!(alg.basis, quaternion_units().to_vec());
        // frame is i/sqrt2, j/sqrt2, k/sqrt2: [f1, f2] = sqrt2 f3
        let s = 2f64.sqrt();
        assert!((alg.structure_constant(0, 1, 2) - s).abs() < 1e-14);
        assert!((alg.structure_constant(1, 0, 2) + s).abs() < 1e-14);
    }

    #[test]
    fn structure_constants_reproduce_brackets() {
        for alg in [AlgebraSpec::so(4), AlgebraSpec::su2_real(), AlgebraSpec::so3_block()] {
            let d = alg.dim();
            for p in 0..d {
                for q in 0..d {
                    let direct = bracket(&alg.frame()[p], &alg.frame()[q]).unwrap();
                    let coords: Vec<f64> =
                        (0..d).map(|r| alg.structure_constant(p, q, r)).collect();
                    let rebuilt = alg.element(&coords);
                    assert!((&direct - &rebuilt).max_abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn custom_rejects_non_closed_span() {
        let basis = vec![LieElement::elementary(4, 0, 1), LieElement::elementary(4, 1, 2)];
        assert!(AlgebraSpec::custom("bad", basis).is_err());
        let dup = vec![LieElement::elementary(4, 0, 1), LieElement::elementary(4, 0, 1)];
        assert!(AlgebraSpec::custom("dup", dup).is_err());
    }

    #[test]
    fn projection_residual_detects_outside_elements() {
        let alg = AlgebraSpec::su2_real();
        let inside = &quaternion_units()[0] * 0.3;
        assert!(alg.projection_residual(&inside).unwrap() < 1e-15);
        let outside = LieElement::elementary(4, 0, 1);
        assert!(alg.projection_residual(&outside).unwrap() > 0.1);
    }
}
