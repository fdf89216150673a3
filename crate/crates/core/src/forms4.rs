//! Two-forms on oriented Euclidean 4-space.
//!
//! A [`TwoForm`] stores its six independent components in the fixed order
//! `(12, 13, 14, 23, 24, 34)`. Every other module shares this ordering.
//!
//! Norm convention: `<a, b> = sum over all ordered (i, j) of a_ij b_ij
//! = 2 * sum_{i<j} a_ij b_ij`, so `|dx^12|^2 = 2`.
//!
//! Orientation is `dx^1 ^ dx^2 ^ dx^3 ^ dx^4`, which makes
//! `dx^12 + dx^34`, `dx^13 - dx^24` and `dx^14 + dx^23` self-dual.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Index pairs `(i, j)`, zero based, in storage order.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Extremal ratio `|<w, w*w>| / (|W| |w|^2)` over trace-free symmetric 3x3 operators.
pub const SHARP_WEYL_CONSTANT: f64 = 0.816_496_580_927_726; // 2 / sqrt(6)

/// Storage slot and sign of the component `(i, j)`; `None` on the diagonal.
#[inline]
pub fn pair_slot(i: usize, j: usize) -> Option<(usize, f64)> {
    let (lo, hi, sign) = match i.cmp(&j) {
        std::cmp::Ordering::Less => (i, j, 1.0),
        std::cmp::Ordering::Greater => (j, i, -1.0),
        std::cmp::Ordering::Equal => return None,
    };
    let slot = match (lo, hi) {
        (0, 1) => 0,
        (0, 2) => 1,
        (0, 3) => 2,
        (1, 2) => 3,
        (1, 3) => 4,
        (2, 3) => 5,
        _ => panic!("index pair ({i}, {j}) out of range for 4-space"),
    };
    Some((slot, sign))
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TwoForm {
    pub components: [f64; 6],
}

impl TwoForm {
    pub const ZERO: TwoForm = TwoForm { components: [0.0; 6] };

    pub fn new(components: [f64; 6]) -> Self {
        Self { components }
    }

    /// The basis form `dx^i ^ dx^j` (1-based indices, as written on paper).
    pub fn dx(i: usize, j: usize) -> Self {
        assert!((1..=4).contains(&i) && (1..=4).contains(&j), "indices are 1..=4");
        let mut c = [0.0; 6];
        let (slot, sign) = pair_slot(i - 1, j - 1).expect("dx^ii vanishes");
        c[slot] = sign;
        Self { components: c }
    }

    /// Antisymmetric component access with zero-based indices.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match pair_slot(i, j) {
            Some((slot, sign)) => sign * self.components[slot],
            None => 0.0,
        }
    }

    pub fn to_matrix(&self) -> [[f64; 4]; 4] {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.get(i, j);
            }
        }
        m
    }

    /// Reads the strictly upper triangle; the lower triangle is ignored.
    pub fn from_matrix(m: &[[f64; 4]; 4]) -> Self {
        let mut c = [0.0; 6];
        for (slot, &(i, j)) in PAIRS.iter().enumerate() {
            c[slot] = m[i][j];
        }
        Self { components: c }
    }

    pub fn inner(&self, other: &TwoForm) -> f64 {
        inner_2form(self, other)
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn star(&self) -> TwoForm {
        hodge_star(self)
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

impl Add for TwoForm {
    type Output = TwoForm;
    fn add(self, rhs: TwoForm) -> TwoForm {
        let mut c = self.components;
        for (a, b) in c.iter_mut().zip(rhs.components) {
            *a += b;
        }
        TwoForm { components: c }
    }
}

impl AddAssign for TwoForm {
    fn add_assign(&mut self, rhs: TwoForm) {
        *self = *self + rhs;
    }
}

impl Sub for TwoForm {
    type Output = TwoForm;
    fn sub(self, rhs: TwoForm) -> TwoForm {
        self + (-rhs)
    }
}

impl Neg for TwoForm {
    type Output = TwoForm;
    fn neg(self) -> TwoForm {
        self * -1.0
    }
}

impl Mul<f64> for TwoForm {
    type Output = TwoForm;
    fn mul(self, s: f64) -> TwoForm {
        TwoForm {
            components: self.components.map(|v| v * s),
        }
    }
}

/// `2 * sum_{i<j} a_ij b_ij`.
pub fn inner_2form(a: &TwoForm, b: &TwoForm) -> f64 {
    2.0 * a
        .components
        .iter()
        .zip(&b.components)
        .map(|(x, y)| x * y)
        .sum::<f64>()
}

/// Euclidean Hodge star on 2-forms.
pub fn hodge_star(a: &TwoForm) -> TwoForm {
    let [a12, a13, a14, a23, a24, a34] = a.components;
    TwoForm::new([a34, -a24, a23, a14, -a13, a12])
}

/// Splits `a` into its self-dual and anti-self-dual parts.
pub fn sd_project(a: &TwoForm) -> (TwoForm, TwoForm) {
    let s = hodge_star(a);
    ((*a + s) * 0.5, (*a - s) * 0.5)
}

/// `(a o b)_ij = sum_k (a_ik b_jk - a_jk b_ik)`.
pub fn circ(a: &TwoForm, b: &TwoForm) -> TwoForm {
    let mut c = [0.0; 6];
    for (slot, &(i, j)) in PAIRS.iter().enumerate() {
        c[slot] = (0..4)
            .map(|k| a.get(i, k) * b.get(j, k) - a.get(j, k) * b.get(i, k))
            .sum();
    }
    TwoForm::new(c)
}

/// Three self-dual forms, orthonormal under [`inner_2form`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SdBasis {
    pub e: [TwoForm; 3],
}

impl SdBasis {
    /// `e1 = (dx^12 + dx^34)/2`, `e2 = (dx^13 - dx^24)/2`, `e3 = (dx^14 + dx^23)/2`.
    pub fn standard() -> Self {
        let h = 0.5;
        Self {
            e: [
                (TwoForm::dx(1, 2) + TwoForm::dx(3, 4)) * h,
                (TwoForm::dx(1, 3) - TwoForm::dx(2, 4)) * h,
                (TwoForm::dx(1, 4) + TwoForm::dx(2, 3)) * h,
            ],
        }
    }

    /// The basis `e'_a = sum_b r[a][b] e_b`. Orthonormal whenever `r` is orthogonal.
    pub fn rotated(&self, r: &[[f64; 3]; 3]) -> Self {
        let mut e = [TwoForm::ZERO; 3];
        for (a, ea) in e.iter_mut().enumerate() {
            for b in 0..3 {
                *ea += self.e[b] * r[a][b];
            }
        }
        Self { e }
    }

    pub fn coefficients(&self, form: &TwoForm) -> [f64; 3] {
        [0, 1, 2].map(|a| self.e[a].inner(form))
    }

    pub fn combine(&self, coeffs: &[f64; 3]) -> TwoForm {
        self.e[0] * coeffs[0] + self.e[1] * coeffs[1] + self.e[2] * coeffs[2]
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        gram_defect(&self.e)
    }

    /// The circ products `(e1 o e2, e1 o e3, e2 o e3)`.
    pub fn circ_products(&self) -> [TwoForm; 3] {
        [
            circ(&self.e[0], &self.e[1]),
            circ(&self.e[0], &self.e[2]),
            circ(&self.e[1], &self.e[2]),
        ]
    }
}

/// Largest deviation of the Gram matrix of three forms from the identity.
pub fn gram_defect(forms: &[TwoForm; 3]) -> f64 {
    let mut worst = 0.0_f64;
    for a in 0..3 {
        for b in 0..3 {
            let target = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((forms[a].inner(&forms[b]) - target).abs());
        }
    }
    worst
}

/// Self-dual Weyl-type operator, stored as a symmetric trace-free endomorphism
/// of the self-dual space written in an orthonormal [`SdBasis`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylPlus {
    m: [[f64; 3]; 3],
}

impl WeylPlus {
    pub const TOLERANCE: f64 = 1e-12;

    pub fn new(m: [[f64; 3]; 3]) -> crate::Result<Self> {
        let scale = m.iter().flatten().fold(1.0_f64, |s, v| s.max(v.abs()));
        for a in 0..3 {
            for b in 0..a {
                if (m[a][b] - m[b][a]).abs() > Self::TOLERANCE * scale {
                    return Err(crate::Error::invalid("WeylPlus must be symmetric"));
                }
            }
        }
        let trace = m[0][0] + m[1][1] + m[2][2];
        if trace.abs() > Self::TOLERANCE * scale {
            return Err(crate::Error::invalid(format!(
                "WeylPlus must be trace-free (trace = {trace:e})"
            )));
        }
        Ok(Self { m })
    }

    pub fn zero() -> Self {
        Self { m: [[0.0; 3]; 3] }
    }

    /// `diag(lambda, lambda, -2 lambda)`, which saturates the sharp bound on `e3`.
    pub fn extremal(lambda: f64) -> Self {
        Self {
            m: [[lambda, 0.0, 0.0], [0.0, lambda, 0.0], [0.0, 0.0, -2.0 * lambda]],
        }
    }

    pub fn matrix(&self) -> &[[f64; 3]; 3] {
        &self.m
    }

    /// Square root of the sum of squared eigenvalues (Frobenius norm).
    pub fn norm(&self) -> f64 {
        self.m.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn act(&self, omega: &[f64; 3]) -> [f64; 3] {
        weyl_act(self, omega)
    }

    /// `<omega, W * omega>` for scalar coefficients.
    pub fn quadratic(&self, omega: &[f64; 3]) -> f64 {
        let w = self.act(omega);
        omega.iter().zip(&w).map(|(a, b)| a * b).sum()
    }

    /// `<omega, W * omega>` when the coefficients are vectors (a Lie-valued form
    /// written as `sum_a e_a (x) omega_a`); only their Gram matrix enters.
    pub fn quadratic_gram(&self, gram: &[[f64; 3]; 3]) -> f64 {
        let mut s = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                s += self.m[a][b] * gram[a][b];
            }
        }
        s
    }
}

/// Matrix-vector action of `w` on the self-dual coefficient triple.
pub fn weyl_act(w: &WeylPlus, omega: &[f64; 3]) -> [f64; 3] {
    let m = &w.m;
    [0, 1, 2].map(|a| m[a][0] * omega[0] + m[a][1] * omega[1] + m[a][2] * omega[2])
}
