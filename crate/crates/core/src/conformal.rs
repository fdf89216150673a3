//! The modified conformal Laplacian `L = -6 Delta + Phi` on the round unit
//! `S^4`, restricted to functions of the geodesic polar angle `rho` in `[0, pi]`.
//!
//! In that reduction `Delta f = (sin^3 rho)^-1 (sin^3 rho f')'`, and the
//! eigenproblem becomes a singular Sturm-Liouville problem. It is discretized
//! by vertex-centered finite volumes: node `i` owns the cell between the
//! neighbouring midpoints (half cells at the poles), cell masses are
//! `int sin^3` over the cell, and fluxes through the poles vanish. The result
//! is a symmetric generalized eigenproblem `K x = lambda M x`, solved through
//! its symmetric tridiagonal form.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::quad4::{gauss_legendre, tree_sum, SPHERE3_VOLUME};
use crate::{Error, Result};

/// `R = n(n-1)` for the unit `n`-sphere, `n = 4`.
pub fn round_scalar_curvature() -> f64 {
    12.0
}

/// `vol(S^4) = 8 pi^2 / 3`.
pub fn sphere4_volume() -> f64 {
    8.0 * PI * PI / 3.0
}

/// `Y(S^4) = 12 vol(S^4)^(1/2) = 8 sqrt(6) pi`.
pub fn round_yamabe_invariant() -> f64 {
    round_scalar_curvature() * sphere4_volume().sqrt()
}

/// Value and first two derivatives in `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

type JetFn = Arc<dyn Fn(f64) -> Jet + Send + Sync>;
type ValueFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A rotationally symmetric function on `S^4`, as a function of `rho`.
#[derive(Clone)]
pub enum RadialFunction {
    /// Samples at increasing `rho` covering `[0, pi]`, linearly interpolated.
    Sampled { rho: Vec<f64>, values: Vec<f64> },
    /// A closed form with derivatives.
    Smooth(JetFn),
    /// A closed form known only through its values.
    Pointwise(ValueFn),
}

impl fmt::Debug for RadialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadialFunction::Sampled { rho, .. } => write!(f, "Sampled({} points)", rho.len()),
            RadialFunction::Smooth(_) => f.write_str("Smooth(..)"),
            RadialFunction::Pointwise(_) => f.write_str("Pointwise(..)"),
        }
    }
}

impl RadialFunction {
    pub fn constant(c: f64) -> Self {
        RadialFunction::Smooth(Arc::new(move |_| Jet {
            value: c,
            d1: 0.0,
            d2: 0.0,
        }))
    }

    /// `sum_k a_k cos(k rho)`; smooth at both poles.
    pub fn cosine_series(coeffs: Vec<f64>) -> Self {
        RadialFunction::Smooth(Arc::new(move |rho| {
            let mut j = Jet {
                value: 0.0,
                d1: 0.0,
                d2: 0.0,
            };
            for (k, &a) in coeffs.iter().enumerate() {
                let kf = k as f64;
                let (s, c) = (kf * rho).sin_cos();
                j.value += a * c;
                j.d1 -= a * kf * s;
                j.d2 -= a * kf * kf * c;
            }
            j
        }))
    }

    pub fn smooth(f: impl Fn(f64) -> Jet + Send + Sync + 'static) -> Self {
        RadialFunction::Smooth(Arc::new(f))
    }

    pub fn pointwise(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        RadialFunction::Pointwise(Arc::new(f))
    }

    pub fn sampled(rho: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if rho.len() != values.len() {
            return Err(Error::DimensionMismatch {
                left: rho.len(),
                right: values.len(),
            });
        }
        if rho.len() < 2 {
            return Err(Error::invalid("sampled function needs at least two points"));
        }
        if rho.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("sample abscissae must be strictly increasing"));
        }
        let tol = 1e-9;
        if rho[0].abs() > tol || (rho[rho.len() - 1] - PI).abs() > tol {
            return Err(Error::invalid("samples must cover [0, pi]"));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite {
                node: rho[i],
                value: *v,
            });
        }
        Ok(RadialFunction::Sampled { rho, values })
    }

    pub fn value(&self, rho: f64) -> f64 {
        match self {
            RadialFunction::Smooth(f) => f(rho).value,
            RadialFunction::Pointwise(f) => f(rho),
            RadialFunction::Sampled { rho: xs, values } => {
                let k = xs.partition_point(|&x| x <= rho).clamp(1, xs.len() - 1);
                let (x0, x1) = (xs[k - 1], xs[k]);
                let t = ((rho - x0) / (x1 - x0)).clamp(0.0, 1.0);
                values[k - 1] * (1.0 - t) + values[k] * t
            }
        }
    }

    pub fn jet(&self, rho: f64) -> Option<Jet> {
        match self {
            RadialFunction::Smooth(f) => Some(f(rho)),
            _ => None,
        }
    }

    pub fn sample(&self, grid: &PolarGrid) -> Vec<f64> {
        grid.nodes.iter().map(|&r| self.value(r)).collect()
    }

    /// One-sided slopes at `rho = 0` and `rho = pi`, from the first sample
    /// interval or, for closed forms, a step of `h`.
    pub fn pole_slopes(&self, h: f64) -> (f64, f64) {
        match self {
            RadialFunction::Sampled { rho, values } => {
                let n = rho.len();
                (
                    (values[1] - values[0]) / (rho[1] - rho[0]),
                    (values[n - 1] - values[n - 2]) / (rho[n - 1] - rho[n - 2]),
                )
            }
            _ => (
                (self.value(h) - self.value(0.0)) / h,
                (self.value(PI) - self.value(PI - h)) / h,
            ),
        }
    }

    /// Smallest value over the grid nodes.
    pub fn min_on(&self, grid: &PolarGrid) -> f64 {
        grid.nodes.iter().map(|&r| self.value(r)).fold(f64::INFINITY, f64::min)
    }

    /// Two-column CSV `rho,value` on the given grid.
    pub fn write_csv(&self, grid: &PolarGrid, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["rho", "value"])?;
        for &r in &grid.nodes {
            w.write_record([format!("{r:.17e}"), format!("{:.17e}", self.value(r))])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a two-column CSV `rho,value` with a header row.
    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let mut r = csv::Reader::from_path(path)?;
        let (mut rho, mut values) = (Vec::new(), Vec::new());
        for rec in r.records() {
            let rec = rec?;
            if rec.len() != 2 {
                return Err(Error::invalid(format!("expected two columns, found {}", rec.len())));
            }
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::invalid(format!("bad number `{s}`: {e}")))
            };
            rho.push(parse(&rec[0])?);
            values.push(parse(&rec[1])?);
        }
        Self::sampled(rho, values)
    }
}

/// Uniform nodes `rho_i = i pi / (N - 1)` with their finite-volume data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarGrid {
    nodes: Vec<f64>,
    /// `int sin^3` over each node's cell.
    masses: Vec<f64>,
    /// Midpoints between consecutive nodes.
    faces: Vec<f64>,
    step: f64,
}

impl PolarGrid {
    pub const DEFAULT_NODES: usize = 16384;

    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::invalid("polar grid needs at least three nodes"));
        }
        let step = PI / (n - 1) as f64;
        let nodes: Vec<f64> = (0..n).map(|i| i as f64 * step).collect();
        let faces: Vec<f64> = (0..n - 1).map(|i| (i as f64 + 0.5) * step).collect();
        let gl = gauss_legendre(6)?;
        let cell_mass = |a: f64, b: f64| {
            let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
            half * gl.iter().map(|&(t, w)| w * (mid + half * t).sin().powi(3)).sum::<f64>()
        };
        let masses = (0..n)
            .map(|i| {
                let a = if i == 0 { 0.0 } else { faces[i - 1] };
                let b = if i == n - 1 { PI } else { faces[i] };
                cell_mass(a, b)
            })
            .collect();
        Ok(Self {
            nodes,
            masses,
            faces,
            step,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// `2N - 1` nodes containing the current ones.
    pub fn refined(&self) -> Self {
        Self::new(2 * self.len() - 1).expect("refining a valid grid")
    }

    /// Finite-volume Laplacian of nodal values (zero flux through the poles).
    pub fn laplacian(&self, f: &[f64]) -> Vec<f64> {
        let n = self.len();
        let flux: Vec<f64> = (0..n - 1)
            .map(|i| self.faces[i].sin().powi(3) * (f[i + 1] - f[i]) / self.step)
            .collect();
        (0..n)
            .map(|i| {
                let right = if i + 1 < n { flux[i] } else { 0.0 };
                let left = if i > 0 { flux[i - 1] } else { 0.0 };
                (right - left) / self.masses[i]
            })
            .collect()
    }
}

impl PolarGrid {
    /// Fourth-order finite-difference radial Laplacian `f'' + 3 cot(rho) f'`,
    /// reflecting evenly across both poles; `4 f''` at the poles themselves.
    pub fn laplacian_fourth_order(&self, f: &[f64]) -> Vec<f64> {
        let n = self.len();
        let last = (n - 1) as isize;
        let at = |j: isize| {
            let j = if j < 0 { -j } else if j > last { 2 * last - j } else { j };
            f[j as usize]
        };
        let h = self.step;
        (0..n)
            .map(|i| {
                let i = i as isize;
                let (m2, m1, c, p1, p2) = (at(i - 2), at(i - 1), at(i), at(i + 1), at(i + 2));
                let d2 = (-p2 + 16.0 * p1 - 30.0 * c + 16.0 * m1 - m2) / (12.0 * h * h);
                if i == 0 || i == last {
                    return 4.0 * d2;
                }
                let d1 = (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h);
                let rho = self.nodes[i as usize];
                d2 + 3.0 * rho.cos() / rho.sin() * d1
            })
            .collect()
    }
}

impl Default for PolarGrid {
    fn default() -> Self {
        Self::new(Self::DEFAULT_NODES).expect("default node count is valid")
    }
}

/// `Delta f` on the round `S^4` for a radial `f` given by its jet.
pub fn radial_laplacian(rho: f64, j: &Jet) -> f64 {
    let s = rho.sin();
    if s.abs() < 1e-8 {
        // l'Hopital at the poles: 3 cot(rho) f' -> 3 f''
        4.0 * j.d2
    } else {
        j.d2 + 3.0 * rho.cos() / s * j.d1
    }
}

/// `Phi = R - 2 sqrt6 |W+| - 3 gamma1 |F+|` with its constituents.
#[derive(Debug, Clone)]
pub struct ModifiedScalarField {
    pub phi: RadialFunction,
    pub scalar: RadialFunction,
    pub weyl_norm: RadialFunction,
    pub curvature_norm: RadialFunction,
    pub gamma1: f64,
}

impl ModifiedScalarField {
    /// Largest `|Phi - (R - 2 sqrt6 |W+| - 3 gamma1 |F+|)|` over the grid nodes.
    pub fn reconstruction_residual(&self, grid: &PolarGrid) -> f64 {
        grid.nodes
            .iter()
            .map(|&r| {
                let rebuilt = combine(
                    self.scalar.value(r),
                    self.weyl_norm.value(r),
                    self.curvature_norm.value(r),
                    self.gamma1,
                );
                (self.phi.value(r) - rebuilt).abs()
            })
            .fold(0.0, f64::max)
    }
}

fn combine(r: f64, w: f64, f: f64, gamma1: f64) -> f64 {
    r - 2.0 * 6f64.sqrt() * w - 3.0 * gamma1 * f
}

pub fn phi_of(
    scalar: RadialFunction,
    weyl_norm: RadialFunction,
    curvature_norm: RadialFunction,
    gamma1: f64,
) -> Result<ModifiedScalarField> {
    if !(gamma1 >= 0.0 && gamma1.is_finite()) {
        return Err(Error::invalid(format!("gamma1 must be nonnegative, got {gamma1}")));
    }
    let (r, w, f) = (scalar.clone(), weyl_norm.clone(), curvature_norm.clone());
    let phi = RadialFunction::pointwise(move |x| combine(r.value(x), w.value(x), f.value(x), gamma1));
    Ok(ModifiedScalarField {
        phi,
        scalar,
        weyl_norm,
        curvature_norm,
        gamma1,
    })
}

/// The field with `Phi = R = 12`, no Weyl or curvature terms.
pub fn round_field() -> ModifiedScalarField {
    phi_of(
        RadialFunction::constant(round_scalar_curvature()),
        RadialFunction::constant(0.0),
        RadialFunction::constant(0.0),
        0.0,
    )
    .expect("valid constants")
}

/// Discretized `int (6 p |f'|^2 + q f^2) sin^3` over `int w f^2 sin^3`.
#[derive(Debug, Clone)]
pub struct SLProblem {
    grid: PolarGrid,
    /// `6 p sin^3 / h` at each face.
    stiffness: Vec<f64>,
    /// `q` at each node.
    potential: Vec<f64>,
    /// `w` at each node.
    weight: Vec<f64>,
}

impl SLProblem {
    /// `L = -6 Delta + Phi` for the round metric.
    pub fn round(grid: PolarGrid, phi: &RadialFunction) -> Result<Self> {
        let potential = phi.sample(&grid);
        check_finite(&grid, &potential)?;
        let stiffness = grid
            .faces
            .iter()
            .map(|&f| 6.0 * f.sin().powi(3) / grid.step)
            .collect();
        let weight = vec![1.0; grid.len()];
        Ok(Self {
            grid,
            stiffness,
            potential,
            weight,
        })
    }

    /// `L` of the metric `u^2 g`, with its own volume form.
    ///
    /// Gradient term `u^2`, potential `Phi_hat u^4`, weight `u^4`, where `Phi_hat`
    /// is assembled from the transformed constituents of `base`.
    pub fn conformal(grid: PolarGrid, base: &ModifiedScalarField, u: &RadialFunction) -> Result<Self> {
        check_positive(u, &grid)?;
        let phi_hat = transformed_phi(base, u)?;
        let mut potential = Vec::with_capacity(grid.len());
        let mut weight = Vec::with_capacity(grid.len());
        for &r in &grid.nodes {
            let u4 = u.value(r).powi(4);
            potential.push(phi_hat.value(r) * u4);
            weight.push(u4);
        }
        check_finite(&grid, &potential)?;
        let stiffness = grid
            .faces
            .iter()
            .map(|&f| 6.0 * u.value(f).powi(2) * f.sin().powi(3) / grid.step)
            .collect();
        Ok(Self {
            grid,
            stiffness,
            potential,
            weight,
        })
    }

    pub fn grid(&self) -> &PolarGrid {
        &self.grid
    }

    /// Diagonal and off-diagonal of `K + Q`, and the diagonal of `M`.
    fn pencil(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let n = self.grid.len();
        let diag = (0..n)
            .map(|i| {
                let left = if i > 0 { self.stiffness[i - 1] } else { 0.0 };
                let right = if i + 1 < n { self.stiffness[i] } else { 0.0 };
                left + right + self.potential[i] * self.grid.masses[i]
            })
            .collect();
        let off = self.stiffness.iter().map(|k| -k).collect();
        let mass = (0..n).map(|i| self.weight[i] * self.grid.masses[i]).collect();
        (diag, off, mass)
    }

    /// `(K + Q) f` and `M f` for nodal values `f`.
    fn forms(&self, f: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.grid.len();
        let mut kf: Vec<f64> = (0..n).map(|i| self.potential[i] * self.grid.masses[i] * f[i]).collect();
        for i in 0..n - 1 {
            let flux = self.stiffness[i] * (f[i + 1] - f[i]);
            kf[i] -= flux;
            kf[i + 1] += flux;
        }
        let mf = (0..n).map(|i| self.weight[i] * self.grid.masses[i] * f[i]).collect();
        (kf, mf)
    }

    /// Applies `M^-1 (K + Q)`, the discrete operator.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        let (kf, _) = self.forms(f);
        kf.iter()
            .enumerate()
            .map(|(i, v)| v / (self.weight[i] * self.grid.masses[i]))
            .collect()
    }

    /// `<f, g>` weighted by the cell masses and the problem weight.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        let terms: Vec<f64> = (0..self.grid.len())
            .map(|i| self.weight[i] * self.grid.masses[i] * f[i] * g[i])
            .collect();
        tree_sum(&terms)
    }
}

fn check_finite(grid: &PolarGrid, values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::NonFinite {
            node: grid.nodes[i],
            value: values[i],
        }),
        None => Ok(()),
    }
}

fn check_positive(u: &RadialFunction, grid: &PolarGrid) -> Result<()> {
    let min = u.min_on(grid);
    if !(min > 0.0) {
        return Err(Error::invalid(format!("conformal factor must be positive, minimum {min}")));
    }
    Ok(())
}

/// Settings for the eigen-iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenSettings {
    pub max_iter: usize,
    /// Stop when the residual is below `tol * max(1, |rho|)`, or when it is
    /// near the rounding floor of the operator and no longer decreasing.
    pub tol: f64,
}

impl Default for EigenSettings {
    fn default() -> Self {
        Self {
            max_iter: 500,
            tol: 1e-11,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    /// Nodal values, positive for the first pair, `max |f| = 1`.
    pub eigenfunction: RadialFunction,
    pub iterations: usize,
    pub residual: f64,
}

/// Solves `(A - shift M) y = b` for symmetric tridiagonal `A` and diagonal
/// `M`, or returns `None` if a pivot is not positive (the shift is not below
/// the spectrum).
fn solve_shifted(diag: &[f64], off: &[f64], mass: &[f64], shift: f64, b: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len();
    let mut piv = vec![0.0; n];
    let mut y = vec![0.0; n];
    piv[0] = diag[0] - shift * mass[0];
    y[0] = b[0];
    if !(piv[0] > 0.0) {
        return None;
    }
    for i in 1..n {
        let l = off[i - 1] / piv[i - 1];
        piv[i] = diag[i] - shift * mass[i] - l * off[i - 1];
        if !(piv[i] > 0.0) {
            return None;
        }
        y[i] = b[i] - l * y[i - 1];
    }
    y[n - 1] /= piv[n - 1];
    for i in (0..n - 1).rev() {
        y[i] = (y[i] - off[i] * y[i + 1]) / piv[i];
    }
    Some(y)
}

fn tri_apply(diag: &[f64], off: &[f64], x: &[f64]) -> Vec<f64> {
    let n = diag.len();
    (0..n)
        .map(|i| {
            let mut v = diag[i] * x[i];
            if i > 0 {
                v += off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += off[i] * x[i + 1];
            }
            v
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let terms: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
    tree_sum(&terms)
}

fn mass_dot(mass: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let terms: Vec<f64> = (0..a.len()).map(|i| mass[i] * a[i] * b[i]).collect();
    tree_sum(&terms)
}

/// Lower bound on the spectrum of `M^-1 A` from Gershgorin discs.
fn gershgorin_min(diag: &[f64], off: &[f64], mass: &[f64]) -> f64 {
    let n = diag.len();
    (0..n)
        .map(|i| {
            let l = if i > 0 { off[i - 1].abs() } else { 0.0 };
            let r = if i + 1 < n { off[i].abs() } else { 0.0 };
            (diag[i] - l - r) / mass[i]
        })
        .fold(f64::INFINITY, f64::min)
}

/// The `count` smallest eigenpairs, by shifted inverse iteration with deflation.
///
/// The first pair starts from a shift below the Gershgorin bound and moves the
/// shift up to `rho - 2 |r|` whenever the factorization confirms it is still
/// below the spectrum. Later pairs use a fixed shift just below the first
/// eigenvalue and deflate the earlier eigenvectors.
pub fn lowest_eigenpairs(prob: &SLProblem, count: usize, settings: &EigenSettings) -> Result<Vec<EigenPair>> {
    let (diag, off, mass) = prob.pencil();
    let n = diag.len();
    if count == 0 || count > n {
        return Err(Error::invalid(format!("cannot compute {count} eigenpairs on {n} nodes")));
    }
    let scale = (0..n).fold(1.0_f64, |m, i| m.max(diag[i].abs() / mass[i]));
    let floor = 1e3 * f64::EPSILON * scale;
    let mut shift = gershgorin_min(&diag, &off, &mass) - 1.0;
    let mut found: Vec<Vec<f64>> = Vec::new();
    let mut pairs = Vec::new();
    let deflate = |x: &mut Vec<f64>, found: &[Vec<f64>]| {
        for v in found {
            let c = mass_dot(&mass, v, x);
            x.iter_mut().zip(v).for_each(|(a, b)| *a -= c * b);
        }
        let norm = mass_dot(&mass, x, x).sqrt();
        x.iter_mut().for_each(|v| *v /= norm);
    };
    for which in 0..count {
        // deterministic start with components on every low mode
        let mut x: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * ((i * 7 + which * 3) % 11) as f64 / 11.0)
            .collect();
        deflate(&mut x, &found);
        let mut trace = Vec::new();
        let mut result = None;
        for it in 1..=settings.max_iter {
            let rhs: Vec<f64> = (0..n).map(|i| mass[i] * x[i]).collect();
            x = solve_shifted(&diag, &off, &mass, shift, &rhs).ok_or_else(|| {
                Error::invalid("shifted factorization lost positivity; spectrum bound is wrong")
            })?;
            deflate(&mut x, &found);
            let ax = tri_apply(&diag, &off, &x);
            let rho = dot(&x, &ax);
            // residual in the M^-1 norm, x being M-normalized
            let r = (0..n)
                .map(|i| (ax[i] - rho * mass[i] * x[i]).powi(2) / mass[i])
                .sum::<f64>()
                .sqrt();
            // near the rounding floor, stop once the residual stops shrinking
            let stalled = r <= floor && trace.last().is_some_and(|&prev| r > 0.5 * prev);
            trace.push(r);
            if r <= settings.tol * rho.abs().max(1.0) || stalled {
                result = Some((rho, r, it));
                break;
            }
            if which == 0 {
                let candidate = rho - 2.0 * r - 1e-12 * scale;
                if candidate > shift && solve_shifted(&diag, &off, &mass, candidate, &rhs).is_some() {
                    shift = candidate;
                }
            }
        }
        let (value, residual, iterations) = result.ok_or_else(|| Error::NonConvergence {
            iterations: settings.max_iter,
            residual: *trace.last().unwrap_or(&f64::NAN),
            trace: trace.clone(),
        })?;
        if which == 0 {
            // later pairs converge at (lambda_k - s)/(lambda_{k+1} - s); keep some distance
            shift = value - 1.0_f64.max(1e-3 * value.abs());
        }
        found.push(x.clone());
        let big = x.iter().fold(0.0_f64, |m, v| if v.abs() > m.abs() { *v } else { m });
        let f: Vec<f64> = x.iter().map(|v| v / big).collect();
        pairs.push(EigenPair {
            value,
            eigenfunction: RadialFunction::sampled(prob.grid.nodes.clone(), f)?,
            iterations,
            residual,
        });
    }
    Ok(pairs)
}

/// Smallest eigenvalue and its positive eigenfunction.
pub fn lambda1(prob: &SLProblem) -> Result<EigenPair> {
    Ok(lowest_eigenpairs(prob, 1, &EigenSettings::default())?.remove(0))
}

/// The discrete Rayleigh quotient of `phi` sampled on the problem grid.
pub fn rayleigh(prob: &SLProblem, phi: &RadialFunction) -> Result<f64> {
    let f = phi.sample(&prob.grid);
    check_finite(&prob.grid, &f)?;
    let (kf, mf) = prob.forms(&f);
    let den = dot(&f, &mf);
    if den <= 0.0 {
        return Err(Error::invalid("Rayleigh quotient of a function that vanishes on the grid"));
    }
    Ok(dot(&f, &kf) / den)
}

/// `Phi` of `u^2 g` from the transformed constituents:
/// `R_hat = u^-3 (-6 Delta u + R u)`, `|W+|_hat = u^-2 |W+|`, `|F+|_hat = u^-2 |F+|`,
/// with `Delta u` from the derivatives of `u`.
pub fn transformed_phi(base: &ModifiedScalarField, u: &RadialFunction) -> Result<RadialFunction> {
    let RadialFunction::Smooth(jet) = u else {
        return Err(Error::invalid("conformal factor needs closed-form derivatives"));
    };
    let jet = jet.clone();
    let (r, w, f, gamma1) = (
        base.scalar.clone(),
        base.weyl_norm.clone(),
        base.curvature_norm.clone(),
        base.gamma1,
    );
    Ok(RadialFunction::pointwise(move |x| {
        let j = jet(x);
        let u2 = j.value * j.value;
        let r_hat = (-6.0 * radial_laplacian(x, &j) + r.value(x) * j.value) / (u2 * j.value);
        combine(r_hat, w.value(x) / u2, f.value(x) / u2, gamma1)
    }))
}

#[derive(Debug, Clone)]
pub struct CovarianceCheck {
    /// Largest pointwise gap between the two evaluations.
    pub residual: f64,
    /// `u^-3 (-6 Delta_h u + Phi u)` on the grid.
    pub operator_route: Vec<f64>,
    /// `Phi` of the transformed constituents on the grid.
    pub constituent_route: Vec<f64>,
}

/// Nodes used by [`covariance_check`]. Fourth-order truncation at this size is
/// far below the round-off of the `1/h^2` stencil, which sets the floor.
pub const COVARIANCE_NODES: usize = 2049;

/// Compares `u^-3 L u` (fourth-order difference Laplacian of the sampled `u`) with
/// `Phi` rebuilt from the transformed curvature quantities (exact derivatives of `u`).
pub fn covariance_check(u: &RadialFunction, base: &ModifiedScalarField) -> Result<CovarianceCheck> {
    let grid = PolarGrid::new(COVARIANCE_NODES)?;
    check_positive(u, &grid)?;
    let uv = u.sample(&grid);
    let lap = grid.laplacian_fourth_order(&uv);
    let phi = base.phi.sample(&grid);
    let operator_route: Vec<f64> = (0..grid.len())
        .map(|i| (-6.0 * lap[i] + phi[i] * uv[i]) / uv[i].powi(3))
        .collect();
    let constituent_route = transformed_phi(base, u)?.sample(&grid);
    let residual = operator_route
        .iter()
        .zip(&constituent_route)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(CovarianceCheck {
        residual,
        operator_route,
        constituent_route,
    })
}

/// `int (6 |grad u|^2 + 12 u^2) dV / (int u^4 dV)^(1/2)` on the round `S^4`.
pub fn yamabe_quotient(u: &RadialFunction) -> Result<f64> {
    const PANELS: usize = 64;
    if u.jet(0.0).is_none() {
        return Err(Error::invalid("Yamabe quotient needs closed-form derivatives"));
    }
    let gl = gauss_legendre(16)?;
    let h = PI / PANELS as f64;
    let (mut num, mut den) = (Vec::new(), Vec::new());
    for k in 0..PANELS {
        let mid = (k as f64 + 0.5) * h;
        for &(t, w) in &gl {
            let rho = mid + 0.5 * h * t;
            let j = u.jet(rho).expect("checked above");
            if !(j.value > 0.0) {
                return Err(Error::invalid(format!("conformal factor must be positive, got {} at {rho}", j.value)));
            }
            let dv = 0.5 * h * w * rho.sin().powi(3) * SPHERE3_VOLUME;
            num.push((6.0 * j.d1 * j.d1 + round_scalar_curvature() * j.value * j.value) * dv);
            den.push(j.value.powi(4) * dv);
        }
    }
    Ok(tree_sum(&num) / tree_sum(&den).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenConvergenceRow {
    pub nodes: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    /// `|lambda2 - exact|` when an exact value is supplied.
    pub error2: Option<f64>,
    /// `log2` of the error ratio to the previous row.
    pub order: Option<f64>,
}

/// Lowest two eigenvalues on nested grids `N, 2N-1, 4N-3, ...`.
pub fn eigen_convergence(
    phi: &RadialFunction,
    nodes: usize,
    levels: usize,
    exact_lambda2: Option<f64>,
) -> Result<Vec<EigenConvergenceRow>> {
    let mut grid = PolarGrid::new(nodes)?;
    let mut rows: Vec<EigenConvergenceRow> = Vec::with_capacity(levels);
    for _ in 0..levels {
        let prob = SLProblem::round(grid.clone(), phi)?;
        let pairs = lowest_eigenpairs(&prob, 2, &EigenSettings::default())?;
        let error2 = exact_lambda2.map(|e| (pairs[1].value - e).abs());
        let order = match (rows.last().and_then(|r| r.error2), error2) {
            (Some(prev), Some(cur)) if cur > 0.0 => Some((prev / cur).log2()),
            _ => None,
        };
        rows.push(EigenConvergenceRow {
            nodes: grid.len(),
            lambda1: pairs[0].value,
            lambda2: pairs[1].value,
            error2,
            order,
        });
        grid = grid.refined();
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round_problem(n: usize, phi: f64) -> SLProblem {
        SLProblem::round(PolarGrid::new(n).unwrap(), &RadialFunction::constant(phi)).unwrap()
    }

    #[test]
    fn round_constants() {
        assert_eq!(round_scalar_curvature(), 12.0);
        assert!((sphere4_volume() - 8.0 * PI * PI / 3.0).abs() < 1e-14);
        assert!((round_yamabe_invariant() - 8.0 * 6f64.sqrt() * PI).abs() < 1e-12);
    }

    #[test]
    fn grid_masses_sum_to_the_sphere_integral() {
        let g = PolarGrid::new(101).unwrap();
        let total: f64 = g.masses().iter().sum();
        assert!((total - 4.0 / 3.0).abs() < 1e-14);
        assert!(g.masses().iter().all(|&m| m > 0.0));
        assert!(PolarGrid::new(2).is_err());
    }

    #[test]
    fn phi_examples() {
        let g = PolarGrid::new(50).unwrap();
        let bpst = phi_of(
            RadialFunction::constant(12.0),
            RadialFunction::constant(0.0),
            RadialFunction::constant(6f64.sqrt()),
            4.0 / 6f64.sqrt(),
        )
        .unwrap();
        assert!(bpst.phi.sample(&g).iter().all(|v| v.abs() < 1e-14));
        assert!(round_field().phi.sample(&g).iter().all(|&v| v == 12.0));
        let zero = phi_of(
            RadialFunction::constant(0.0),
            RadialFunction::constant(0.0),
            RadialFunction::constant(0.0),
            1.0,
        )
        .unwrap();
        assert!(zero.phi.sample(&g).iter().all(|&v| v == 0.0));
        assert!(bpst.reconstruction_residual(&g) < 1e-12);
        assert!(phi_of(
            RadialFunction::constant(0.0),
            RadialFunction::constant(0.0),
            RadialFunction::constant(0.0),
            -1.0
        )
        .is_err());
    }

    #[test]
    fn operator_is_symmetric_in_the_weighted_product() {
        let phi = RadialFunction::cosine_series(vec![2.0, 3.0, -1.0]);
        let u = RadialFunction::cosine_series(vec![1.0, 0.2, 0.1]);
        let base = phi_of(phi, RadialFunction::constant(0.0), RadialFunction::constant(0.0), 0.0).unwrap();
        for prob in [
            SLProblem::round(PolarGrid::new(300).unwrap(), &base.phi).unwrap(),
            SLProblem::conformal(PolarGrid::new(300).unwrap(), &base, &u).unwrap(),
        ] {
            let n = prob.grid().len();
            let f: Vec<f64> = (0..n).map(|i| ((i * 13) % 7) as f64 - 3.0).collect();
            let g: Vec<f64> = (0..n).map(|i| ((i * 5) % 9) as f64 * 0.3).collect();
            let a = prob.inner(&f, &prob.apply(&g));
            let b = prob.inner(&prob.apply(&f), &g);
            assert!((a - b).abs() < 1e-12 * a.abs().max(b.abs()), "{a} {b}");
        }
    }

    #[test]
    fn constant_potential_eigenvalues() {
        let p = lambda1(&round_problem(2000, 12.0)).unwrap();
        assert!((p.value - 12.0).abs() < 1e-8);
        let f = p.eigenfunction.sample(&PolarGrid::new(2000).unwrap());
        assert!(f.iter().all(|v| (v - 1.0).abs() < 1e-8));
        assert!(lambda1(&round_problem(500, 0.0)).unwrap().value.abs() < 1e-10);
    }

    #[test]
    fn second_eigenvalue_converges_at_second_order() {
        let rows = eigen_convergence(&RadialFunction::constant(12.0), 201, 3, Some(36.0)).unwrap();
        for r in &rows[1..] {
            assert!(r.order.unwrap() > 1.9, "{rows:?}");
        }
        // the second mode is cos(rho)
        let pairs = lowest_eigenpairs(&round_problem(801, 12.0), 2, &EigenSettings::default()).unwrap();
        let f = &pairs[1].eigenfunction;
        assert!((f.value(0.0).abs() - 1.0).abs() < 1e-8 && (f.value(PI).abs() - 1.0).abs() < 1e-8);
        assert!((f.value(PI / 3.0).abs() - 0.5).abs() < 1e-4);
    }

    #[test]
    fn rayleigh_examples() {
        let prob = round_problem(PolarGrid::DEFAULT_NODES, 12.0);
        let c = rayleigh(&prob, &RadialFunction::constant(3.0)).unwrap();
        assert!((c - 12.0).abs() < 1e-12);
        let cos = rayleigh(&prob, &RadialFunction::cosine_series(vec![0.0, 1.0])).unwrap();
        assert!((cos - 36.0).abs() < 1e-6, "{cos}");
        assert!(rayleigh(&prob, &RadialFunction::constant(0.0)).is_err());
    }

    #[test]
    fn covariance_examples() {
        let base = round_field();
        assert!(covariance_check(&RadialFunction::constant(1.0), &base).unwrap().residual < 1e-12);
        let c = covariance_check(&RadialFunction::constant(2.0), &base).unwrap();
        assert!(c.residual < 1e-12);
        assert!(c.operator_route.iter().all(|v| (v - 3.0).abs() < 1e-12));
        let u = RadialFunction::cosine_series(vec![1.0, 0.3]);
        assert!(covariance_check(&u, &base).unwrap().residual < 1e-6);
        let bad = RadialFunction::cosine_series(vec![0.0, 1.0]);
        assert!(covariance_check(&bad, &base).is_err());
    }

    #[test]
    fn fourth_order_laplacian_converges() {
        // Delta cos(2 rho) = -4 cos(2 rho) - 6 cot(rho) sin(2 rho) = -4 cos(2 rho) - 12 cos^2(rho)
        let err = |n: usize| {
            let g = PolarGrid::new(n).unwrap();
            let f: Vec<f64> = g.nodes().iter().map(|r| (2.0 * r).cos()).collect();
            g.laplacian_fourth_order(&f)
                .iter()
                .zip(g.nodes())
                .map(|(l, r)| (l + 4.0 * (2.0 * r).cos() + 12.0 * r.cos().powi(2)).abs())
                .fold(0.0, f64::max)
        };
        let order = (err(65) / err(129)).log2();
        assert!(order > 3.8, "{order}");
    }

    #[test]
    fn yamabe_examples() {
        let y = round_yamabe_invariant();
        assert!((yamabe_quotient(&RadialFunction::constant(1.0)).unwrap() - y).abs() < 1e-8);
        assert!((yamabe_quotient(&RadialFunction::constant(3.7)).unwrap() - y).abs() < 1e-8);
        assert!(yamabe_quotient(&RadialFunction::cosine_series(vec![1.0, 0.5])).unwrap() > y);
        assert!(yamabe_quotient(&RadialFunction::cosine_series(vec![0.0, 1.0])).is_err());
        // pullback of the round metric by the dilation x -> t x of the flat chart
        let t: f64 = 0.6;
        let dilated = RadialFunction::smooth(move |r| {
            let d = |r: f64| t / ((r / 2.0).cos().powi(2) + t * t * (r / 2.0).sin().powi(2));
            let h = 1e-4;
            Jet {
                value: d(r),
                d1: (d(r + h) - d(r - h)) / (2.0 * h),
                d2: (d(r + h) - 2.0 * d(r) + d(r - h)) / (h * h),
            }
        });
        assert!((yamabe_quotient(&dilated).unwrap() - y).abs() < 1e-6);
    }

    #[test]
    fn sampled_round_trip_and_pole_slopes() {
        let g = PolarGrid::new(41).unwrap();
        let f = RadialFunction::cosine_series(vec![1.0, 0.2, 0.3]);
        let s = RadialFunction::sampled(g.nodes().to_vec(), f.sample(&g)).unwrap();
        assert!((s.value(g.nodes()[7]) - f.value(g.nodes()[7])).abs() < 1e-15);
        let (a, b) = s.pole_slopes(0.0);
        assert!(a.abs() < g.step() && b.abs() < g.step());
        let dir = std::env::temp_dir().join(format!("phi_roundtrip_{}.csv", std::process::id()));
        s.write_csv(&g, &dir).unwrap();
        let back = RadialFunction::read_csv(&dir).unwrap();
        std::fs::remove_file(&dir).ok();
        assert!((back.value(1.0) - s.value(1.0)).abs() < 1e-14);
        assert!(RadialFunction::sampled(vec![0.0, 1.0], vec![1.0, 2.0]).is_err());
        assert!(RadialFunction::sampled(vec![0.0, PI], vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn non_convergence_carries_the_trace() {
        let prob = round_problem(400, 5.0);
        let s = EigenSettings { max_iter: 1, tol: 1e-300 };
        match lowest_eigenpairs(&prob, 1, &s) {
            Err(Error::NonConvergence { trace, .. }) => assert_eq!(trace.len(), 1),
            other => panic!("unexpected {other:?}"),
        }
    }
}
