//! The BPST standard connection and its conformal orbit under dilations and
//! translations, evaluated on the flat chart `R^4 = S^4 \ {N}`.
//!
//! The standard connection is
//! `theta = (theta_1 i + theta_2 j + theta_3 k) / (1 + |x|^2)` with
//! `theta_1 = x1 dx2 - x2 dx1 + x3 dx4 - x4 dx3`,
//! `theta_2 = x1 dx3 - x3 dx1 + x4 dx2 - x2 dx4`,
//! `theta_3 = x1 dx4 - x4 dx1 + x2 dx3 - x3 dx2`,
//! and `i, j, k` the real 4x4 quaternion matrices.
//!
//! Sign convention: with these matrices the closed-form curvature
//! `2 (1+|x|^2)^-2 {(dx12+dx34) i + (dx13-dx24) j + (dx14+dx23) k}` equals
//! `F_ab = d_a theta_b - d_b theta_a - [theta_a, theta_b]`, and the covariant
//! derivative for which the Bianchi identity holds is
//! `nabla_c F = d_c F - [theta_c, F]`. Every evaluator in this module uses that
//! pair of signs.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::forms4::{SdBasis, PAIRS};
use crate::liealg::{comm2form, quaternion_units, AlgebraSpec, LieElement, LieValuedTwoForm};
use crate::{Error, Result};

pub type Point = [f64; 4];

fn norm_sq4(x: &Point) -> f64 {
    x.iter().map(|v| v * v).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstantonParams {
    scale: f64,
    center: Point,
}

impl InstantonParams {
    pub fn new(scale: f64, center: Point) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::invalid(format!("instanton scale must be positive, got {scale}")));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("instanton center must be finite"));
        }
        Ok(Self { scale, center })
    }

    /// Scale 1, centered at the origin.
    pub fn standard() -> Self {
        Self {
            scale: 1.0,
            center: [0.0; 4],
        }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn center(&self) -> Point {
        self.center
    }

    /// `(x - center) / scale`.
    fn local(&self, x: &Point) -> Point {
        std::array::from_fn(|k| (x[k] - self.center[k]) / self.scale)
    }
}

/// Connection 1-form coefficients `theta_1..theta_4` at a point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectionSample {
    pub theta: [LieElement; 4],
}

impl ConnectionSample {
    /// Largest distance of a coefficient from `span{i, j, k}`.
    pub fn su2_residual(&self) -> f64 {
        let alg = su2();
        self.theta
            .iter()
            .map(|t| alg.projection_residual(t).unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureSample {
    pub value: LieValuedTwoForm,
}

impl CurvatureSample {
    pub fn anti_self_dual_part(&self) -> LieValuedTwoForm {
        self.value.sd_split().1
    }
}

fn su2() -> &'static AlgebraSpec {
    static ALG: OnceLock<AlgebraSpec> = OnceLock::new();
    ALG.get_or_init(AlgebraSpec::su2_real)
}

/// `Omega = (dx12+dx34) i + (dx13-dx24) j + (dx14+dx23) k` together with
/// `|Omega+|^2` and `|Omega-|^2`.
struct Shape {
    omega: LieValuedTwoForm,
    plus_sq: f64,
    minus_sq: f64,
}

fn shape() -> &'static Shape {
    static SHAPE: OnceLock<Shape> = OnceLock::new();
    SHAPE.get_or_init(|| {
        // the basis forms carry a factor 1/2
        let omega = LieValuedTwoForm::from_sd(&SdBasis::standard(), &quaternion_units()).scaled(2.0);
        let (plus, minus) = omega.sd_split();
        Shape {
            plus_sq: plus.norm_sq(),
            minus_sq: minus.norm_sq(),
            omega,
        }
    })
}

/// A connection on the trivial bundle over the flat chart.
pub trait Connection {
    /// Matrix size of the Lie algebra values.
    fn dim(&self) -> usize;

    fn connection_at(&self, x: &Point) -> ConnectionSample;

    /// Curvature from a closed-form expression where one exists.
    fn curvature_at(&self, x: &Point) -> CurvatureSample;

    /// `(|F+|^2, |F-|^2)` at `x`.
    fn sd_density(&self, x: &Point) -> (f64, f64) {
        let (p, m) = self.curvature_at(x).value.sd_split();
        (p.norm_sq(), m.norm_sq())
    }

    /// A point about which every gauge-invariant density is radial.
    fn radial_center(&self) -> Option<Point> {
        None
    }
}

impl Connection for InstantonParams {
    fn dim(&self) -> usize {
        4
    }

    fn connection_at(&self, x: &Point) -> ConnectionSample {
        connection_at(self, x)
    }

    fn curvature_at(&self, x: &Point) -> CurvatureSample {
        curvature_closed_at(self, x)
    }

    fn sd_density(&self, x: &Point) -> (f64, f64) {
        let y = self.local(x);
        let l2 = self.scale * self.scale;
        let c = 2.0 / ((1.0 + norm_sq4(&y)).powi(2) * l2);
        let s = shape();
        (c * c * s.plus_sq, c * c * s.minus_sq)
    }

    fn radial_center(&self) -> Option<Point> {
        Some(self.center)
    }
}

/// The trivial connection `theta = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatConnection {
    pub n: usize,
}

impl Default for FlatConnection {
    fn default() -> Self {
        Self { n: 4 }
    }
}

impl Connection for FlatConnection {
    fn dim(&self) -> usize {
        self.n
    }

    fn connection_at(&self, _x: &Point) -> ConnectionSample {
        ConnectionSample {
            theta: std::array::from_fn(|_| LieElement::zeros(self.n)),
        }
    }

    fn curvature_at(&self, _x: &Point) -> CurvatureSample {
        CurvatureSample {
            value: LieValuedTwoForm::zeros(self.n),
        }
    }

    fn sd_density(&self, _x: &Point) -> (f64, f64) {
        (0.0, 0.0)
    }

    fn radial_center(&self) -> Option<Point> {
        Some([0.0; 4])
    }
}

/// A connection conjugated by a fixed orthogonal matrix `g`: `theta -> g theta g^T`.
#[derive(Debug, Clone)]
pub struct Conjugated<C> {
    pub inner: C,
    pub g: DMatrix<f64>,
}

impl<C: Connection> Connection for Conjugated<C> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn connection_at(&self, x: &Point) -> ConnectionSample {
        let s = self.inner.connection_at(x);
        ConnectionSample {
            theta: std::array::from_fn(|k| s.theta[k].conjugated(&self.g)),
        }
    }

    fn curvature_at(&self, x: &Point) -> CurvatureSample {
        CurvatureSample {
            value: self.inner.curvature_at(x).value.conjugated(&self.g),
        }
    }
}

/// An `su(2)`-valued connection pushed to `so(3)` through the adjoint
/// representation, padded to 4x4 like [`AlgebraSpec::so3_block`].
///
/// `ad` is a Lie algebra isomorphism with `|ad q|^2 = 2 |q|^2`.
#[derive(Debug, Clone)]
pub struct AdjointSo3<C> {
    pub inner: C,
}

fn adjoint_map() -> &'static [LieElement; 3] {
    static MAP: OnceLock<[LieElement; 3]> = OnceLock::new();
    MAP.get_or_init(|| {
        let e = AlgebraSpec::so3_block().basis;
        // orientation sign making q_a -> 2 s e_a a homomorphism ([i, j] = 2k)
        let s = crate::liealg::ip_endo(&e[2], &e[0].commutator(&e[1])).expect("same size");
        [0, 1, 2].map(|a| &e[a] * (2.0 * s))
    })
}

/// Image of an element of `span{i, j, k}` under the adjoint representation.
pub fn adjoint_so3(q: &LieElement) -> LieElement {
    let units = quaternion_units();
    let map = adjoint_map();
    let mut out = LieElement::zeros(4);
    for a in 0..3 {
        // coordinate along the (non-normalized) unit q_a, |q_a|^2 = 2
        let c = crate::liealg::ip_endo(&units[a], q).expect("4x4") / 2.0;
        out += &(&map[a] * c);
    }
    out
}

impl<C: Connection> Connection for AdjointSo3<C> {
    fn dim(&self) -> usize {
        4
    }

    fn connection_at(&self, x: &Point) -> ConnectionSample {
        let s = self.inner.connection_at(x);
        ConnectionSample {
            theta: std::array::from_fn(|k| adjoint_so3(&s.theta[k])),
        }
    }

    fn curvature_at(&self, x: &Point) -> CurvatureSample {
        let f = self.inner.curvature_at(x).value;
        CurvatureSample {
            value: LieValuedTwoForm {
                coeffs: std::array::from_fn(|s| adjoint_so3(&f.coeffs[s])),
            },
        }
    }

    fn sd_density(&self, x: &Point) -> (f64, f64) {
        let (p, m) = self.inner.sd_density(x);
        (2.0 * p, 2.0 * m)
    }

    fn radial_center(&self) -> Option<Point> {
        self.inner.radial_center()
    }
}

/// Connection coefficients of the instanton with the given scale and center.
pub fn connection_at(p: &InstantonParams, x: &Point) -> ConnectionSample {
    let [y1, y2, y3, y4] = p.local(x);
    let [i, j, k] = quaternion_units();
    let f = 1.0 / ((1.0 + y1 * y1 + y2 * y2 + y3 * y3 + y4 * y4) * p.scale);
    let comb = |a: f64, b: f64, c: f64| &(&(&i * a) + &(&j * b)) + &(&k * c);
    ConnectionSample {
        theta: [
            comb(-y2, -y3, -y4) * f,
            comb(y1, y4, -y3) * f,
            comb(-y4, y1, y2) * f,
            comb(y3, -y2, y1) * f,
        ],
    }
}

/// Closed-form curvature `2 / (scale^2 (1+|y|^2)^2) * Omega`, `y = (x - center)/scale`.
pub fn curvature_closed_at(p: &InstantonParams, x: &Point) -> CurvatureSample {
    let y = p.local(x);
    let c = 2.0 / ((1.0 + norm_sq4(&y)).powi(2) * p.scale * p.scale);
    CurvatureSample {
        value: shape().omega.scaled(c),
    }
}

/// Finite-difference scheme for spatial partial derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdScheme {
    pub step: f64,
    /// Combine steps `h` and `h/2` to cancel the `h^2` error term.
    pub richardson: bool,
}

impl FdScheme {
    pub const DEFAULT_STEP: f64 = 1e-4;

    pub fn central(step: f64) -> Result<Self> {
        Self::checked(step, false)
    }

    pub fn richardson(step: f64) -> Result<Self> {
        Self::checked(step, true)
    }

    fn checked(step: f64, richardson: bool) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::invalid(format!("finite-difference step must be positive, got {step}")));
        }
        Ok(Self { step, richardson })
    }
}

impl Default for FdScheme {
    fn default() -> Self {
        Self {
            step: Self::DEFAULT_STEP,
            richardson: true,
        }
    }
}

fn shifted(x: &Point, k: usize, h: f64) -> Point {
    let mut y = *x;
    y[k] += h;
    y
}

/// Partial derivative along axis `k` of a vector-valued function (flattened).
fn partial(f: &dyn Fn(&Point) -> Vec<f64>, x: &Point, k: usize, scheme: &FdScheme) -> Vec<f64> {
    let central = |h: f64| -> Vec<f64> {
        let fp = f(&shifted(x, k, h));
        let fm = f(&shifted(x, k, -h));
        fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect()
    };
    let coarse = central(scheme.step);
    if !scheme.richardson {
        return coarse;
    }
    let fine = central(scheme.step / 2.0);
    fine.iter().zip(&coarse).map(|(f, c)| (4.0 * f - c) / 3.0).collect()
}

fn flatten_element(a: &LieElement, out: &mut Vec<f64>) {
    out.extend(a.0.iter().copied());
}

fn unflatten_element(n: usize, data: &[f64]) -> LieElement {
    LieElement(DMatrix::from_column_slice(n, n, data))
}

fn flatten_form(f: &LieValuedTwoForm) -> Vec<f64> {
    let mut v = Vec::with_capacity(6 * f.dim() * f.dim());
    for c in &f.coeffs {
        flatten_element(c, &mut v);
    }
    v
}

fn unflatten_form(n: usize, data: &[f64]) -> LieValuedTwoForm {
    LieValuedTwoForm {
        coeffs: std::array::from_fn(|s| unflatten_element(n, &data[s * n * n..(s + 1) * n * n])),
    }
}

/// Curvature assembled from finite differences of the connection:
/// `F_ab = d_a theta_b - d_b theta_a - [theta_a, theta_b]`.
pub fn curvature_fd_at<C: Connection + ?Sized>(
    conn: &C,
    x: &Point,
    scheme: &FdScheme,
) -> CurvatureSample {
    let n = conn.dim();
    let flat = |y: &Point| {
        let s = conn.connection_at(y);
        let mut v = Vec::with_capacity(4 * n * n);
        for t in &s.theta {
            flatten_element(t, &mut v);
        }
        v
    };
    // d[a] = partial_a of (theta_1..theta_4)
    let d: Vec<Vec<f64>> = (0..4).map(|a| partial(&flat, x, a, scheme)).collect();
    let theta = conn.connection_at(x).theta;
    let dtheta = |a: usize, b: usize| unflatten_element(n, &d[a][b * n * n..(b + 1) * n * n]);
    let mut out = LieValuedTwoForm::zeros(n);
    for (slot, &(a, b)) in PAIRS.iter().enumerate() {
        out.coeffs[slot] = &(&dtheta(a, b) - &dtheta(b, a)) - &theta[a].commutator(&theta[b]);
    }
    CurvatureSample { value: out }
}

/// `nabla_c F = d_c F - [theta_c, F]` for `c = 1..4`, with `d_c F` taken by
/// finite differences of [`Connection::curvature_at`].
pub fn covariant_derivative_at<C: Connection + ?Sized>(
    conn: &C,
    x: &Point,
    scheme: &FdScheme,
) -> [LieValuedTwoForm; 4] {
    let n = conn.dim();
    let flat = |y: &Point| flatten_form(&conn.curvature_at(y).value);
    let theta = conn.connection_at(x).theta;
    let f = conn.curvature_at(x).value;
    std::array::from_fn(|c| {
        let mut df = unflatten_form(n, &partial(&flat, x, c, scheme));
        for s in 0..6 {
            df.coeffs[s] = &df.coeffs[s] - &theta[c].commutator(&f.coeffs[s]);
        }
        df
    })
}

/// `|nabla F|^2 = sum_c |nabla_c F|^2`.
pub fn nabla_norm_sq(nabla: &[LieValuedTwoForm; 4]) -> f64 {
    nabla.iter().map(LieValuedTwoForm::norm_sq).sum()
}

/// Largest norm of the cyclic sum `nabla_c F_ab + nabla_a F_bc + nabla_b F_ca`.
pub fn bianchi_residual_at<C: Connection + ?Sized>(conn: &C, x: &Point, scheme: &FdScheme) -> f64 {
    let nabla = covariant_derivative_at(conn, x, scheme);
    let mut worst = 0.0_f64;
    for a in 0..4 {
        for b in a + 1..4 {
            for c in b + 1..4 {
                let cyc = &(&nabla[c].get(a, b) + &nabla[a].get(b, c)) + &nabla[b].get(c, a);
                worst = worst.max(cyc.norm());
            }
        }
    }
    worst
}

/// Closed-form pointwise quantities implied by `|F|^2 = 96 s^4 / (s^2 + r^2)^4`,
/// `s` the scale and `r = |x - center|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormLaw {
    pub f_sq: f64,
    /// `(1/2) Delta |F|^2`.
    pub half_laplacian_f_sq: f64,
    /// `|d|F||^2`.
    pub d_abs_f_sq: f64,
}

pub fn norm_law(p: &InstantonParams, x: &Point) -> NormLaw {
    let l2 = p.scale * p.scale;
    let l4 = l2 * l2;
    let r2: f64 = (0..4).map(|k| (x[k] - p.center[k]).powi(2)).sum();
    let q = l2 + r2;
    NormLaw {
        f_sq: 96.0 * l4 / q.powi(4),
        half_laplacian_f_sq: l4 * (2304.0 * r2 - 1536.0 * l2) / q.powi(6),
        d_abs_f_sq: 1536.0 * l4 * r2 / q.powi(6),
    }
}

/// Pointwise data of the improved Kato inequality for the self-dual curvature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KatoSample {
    pub point: Point,
    pub f_plus_sq: f64,
    pub nabla_f_plus_sq: f64,
    pub d_abs_f_plus_sq: f64,
    /// `|nabla F+|^2 - (3/2) |d|F+||^2`.
    pub residual: f64,
}

/// Evaluates `|nabla F+|^2` and `|d|F+||^2` by finite differences; `d|F+|` is
/// taken from the curvature norm itself, not from the norm law.
pub fn kato_sample<C: Connection + ?Sized>(conn: &C, x: &Point, scheme: &FdScheme) -> KatoSample {
    let nabla = covariant_derivative_at(conn, x, scheme);
    let nabla_plus: f64 = nabla.iter().map(|d| d.sd_split().0.norm_sq()).sum();
    let abs_plus = |y: &Point| vec![conn.curvature_at(y).value.sd_split().0.norm()];
    let d_abs_sq: f64 = (0..4).map(|k| partial(&abs_plus, x, k, scheme)[0].powi(2)).sum();
    let f_plus_sq = conn.curvature_at(x).value.sd_split().0.norm_sq();
    KatoSample {
        point: *x,
        f_plus_sq,
        nabla_f_plus_sq: nabla_plus,
        d_abs_f_plus_sq: d_abs_sq,
        residual: nabla_plus - 1.5 * d_abs_sq,
    }
}

/// Terms of the flat-chart Bochner identity for `F+` (no Ricci or Weyl terms).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BochnerTerms {
    pub half_laplacian: f64,
    pub nabla_sq: f64,
    pub cubic: f64,
    /// `(1/2) Delta |F+|^2 - |nabla F+|^2 + <F+, [F+, F+]>`.
    pub residual: f64,
}

/// Laplacian term from the norm law, the other two from the curvature tensor.
pub fn bochner_terms(p: &InstantonParams, x: &Point, scheme: &FdScheme) -> Result<BochnerTerms> {
    let law = norm_law(p, x);
    let nabla = covariant_derivative_at(p, x, scheme);
    let nabla_sq: f64 = nabla.iter().map(|d| d.sd_split().0.norm_sq()).sum();
    let plus = curvature_closed_at(p, x).value.sd_split().0;
    let cubic = plus.inner(&comm2form(&plus, &plus)?)?;
    Ok(BochnerTerms {
        half_laplacian: law.half_laplacian_f_sq,
        nabla_sq,
        cubic,
        residual: law.half_laplacian_f_sq - nabla_sq + cubic,
    })
}
