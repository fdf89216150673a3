//! Numerical suprema for the bracket constants gamma0 and gamma1.
//!
//! Both functionals are scale invariant, so they are maximized over products
//! of unit spheres in algebra coordinates (orthonormal frame of the algebra)
//! by projected gradient ascent with Armijo backtracking. Each restart draws
//! its starting point from its own ChaCha stream, so restarts are independent
//! and the reduction (max value, ties to the lowest restart index) does not
//! depend on evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::algebra::AlgebraSpec;
use super::element::LieElement;
use super::twoform::LieValuedTwoForm;
use crate::forms4::{circ, SdBasis};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaSettings {
    pub restarts: usize,
    /// Tangential gradient norm below which a critical point is accepted.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for GammaSettings {
    fn default() -> Self {
        Self {
            restarts: 64,
            tol: 1e-9,
            max_iter: 20_000,
            seed: 0x5eed_0001,
        }
    }
}

/// How the reported maximum was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub grad_norm: f64,
    pub converged: bool,
    pub iterations: usize,
    pub best_restart: usize,
    pub restarts: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GammaEstimate<A> {
    pub value: f64,
    pub argmax: A,
    pub certificate: Certificate,
}

pub type Gamma0Estimate = GammaEstimate<(LieElement, LieElement)>;
pub type Gamma1Estimate = GammaEstimate<LieValuedTwoForm>;

#[derive(Debug, Clone)]
struct LocalMax {
    point: Vec<f64>,
    value: f64,
    grad_norm: f64,
    iterations: usize,
    converged: bool,
}

fn normalize_blocks(x: &mut [f64], blocks: &[usize]) {
    let mut start = 0;
    for &len in blocks {
        let b = &mut x[start..start + len];
        let n = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        b.iter_mut().for_each(|v| *v /= n);
        start += len;
    }
}

fn project_tangent(x: &[f64], g: &mut [f64], blocks: &[usize]) {
    let mut start = 0;
    for &len in blocks {
        let r = start..start + len;
        let dot: f64 = x[r.clone()].iter().zip(&g[r.clone()]).map(|(a, b)| a * b).sum();
        for k in r {
            g[k] -= dot * x[k];
        }
        start += len;
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Projected gradient ascent on a product of unit spheres.
///
/// `objective(x, grad)` returns the value and writes the Euclidean gradient.
/// `grad_scale(value)` converts the tangential gradient of the objective into
/// the gradient of the quantity being certified.
fn ascend(
    objective: &dyn Fn(&[f64], &mut [f64]) -> f64,
    grad_scale: &dyn Fn(f64) -> f64,
    blocks: &[usize],
    mut x: Vec<f64>,
    tol: f64,
    max_iter: usize,
) -> LocalMax {
    let dim = x.len();
    normalize_blocks(&mut x, blocks);
    let mut g = vec![0.0; dim];
    let mut value = objective(&x, &mut g);
    project_tangent(&x, &mut g, blocks);
    let mut step = 1.0;
    let mut trial = vec![0.0; dim];
    let mut trial_g = vec![0.0; dim];
    for it in 0..max_iter {
        let gn = norm(&g);
        if gn * grad_scale(value) < tol {
            return LocalMax {
                point: x,
                value,
                grad_norm: gn * grad_scale(value),
                iterations: it,
                converged: true,
            };
        }
        loop {
            for k in 0..dim {
                trial[k] = x[k] + step * g[k];
            }
            normalize_blocks(&mut trial, blocks);
            let v = objective(&trial, &mut trial_g);
            if v >= value + 1e-4 * step * gn * gn {
                std::mem::swap(&mut x, &mut trial);
                std::mem::swap(&mut g, &mut trial_g);
                value = v;
                project_tangent(&x, &mut g, blocks);
                step = (step * 2.0).min(1e3);
                break;
            }
            step *= 0.5;
            if step < 1e-14 {
                // no ascent possible at working precision
                let gn = norm(&g);
                return LocalMax {
                    point: x,
                    value,
                    grad_norm: gn * grad_scale(value),
                    iterations: it,
                    converged: gn * grad_scale(value) < tol,
                };
            }
        }
    }
    let gn = norm(&g) * grad_scale(value);
    LocalMax {
        point: x,
        value,
        grad_norm: gn,
        iterations: max_iter,
        converged: gn < tol,
    }
}

fn random_start(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| StandardNormal.sample(rng)).collect()
}

fn best_of(
    settings: &GammaSettings,
    dim: usize,
    run: impl Fn(Vec<f64>) -> LocalMax,
) -> Result<(LocalMax, usize)> {
    if settings.restarts == 0 {
        return Err(Error::invalid("at least one restart is required"));
    }
    let mut best: Option<(LocalMax, usize)> = None;
    for r in 0..settings.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
        rng.set_stream(r as u64);
        let local = run(random_start(&mut rng, dim));
        let better = match &best {
            None => true,
            Some((b, _)) => local.value > b.value,
        };
        if better {
            best = Some((local, r));
        }
    }
    Ok(best.expect("restarts >= 1"))
}

/// Bracket norm in frame coordinates: `z_r = sum x_p y_q c_pqr`.
fn bracket_coords(alg: &AlgebraSpec, x: &[f64], y: &[f64], z: &mut [f64]) {
    let d = alg.dim();
    z.iter_mut().for_each(|v| *v = 0.0);
    for p in 0..d {
        for q in 0..d {
            let xy = x[p] * y[q];
            if xy == 0.0 {
                continue;
            }
            for (r, zr) in z.iter_mut().enumerate() {
                *zr += xy * alg.structure_constant(p, q, r);
            }
        }
    }
}

/// `|[A,B]| / (|A||B|)`, or `None` when either argument vanishes.
pub fn gamma0_ratio(a: &LieElement, b: &LieElement) -> Result<Option<f64>> {
    let denom = a.norm() * b.norm();
    if denom == 0.0 {
        return Ok(None);
    }
    Ok(Some(super::element::bracket(a, b)?.norm() / denom))
}

/// Estimates `gamma0 = sup |[A,B]| / (|A||B|)` over the algebra.
pub fn gamma0_estimate(alg: &AlgebraSpec, settings: &GammaSettings) -> Result<Gamma0Estimate> {
    let d = alg.dim();
    let blocks = [d, d];
    let objective = |w: &[f64], grad: &mut [f64]| -> f64 {
        let (x, y) = w.split_at(d);
        let mut z = vec![0.0; d];
        bracket_coords(alg, x, y, &mut z);
        grad.iter_mut().for_each(|v| *v = 0.0);
        for p in 0..d {
            for q in 0..d {
                for (r, zr) in z.iter().enumerate() {
                    let c = alg.structure_constant(p, q, r);
                    grad[p] += 2.0 * zr * c * y[q];
                    grad[d + q] += 2.0 * zr * c * x[p];
                }
            }
        }
        z.iter().map(|v| v * v).sum()
    };
    // d|z| = d|z|^2 / (2|z|)
    let scale = |v: f64| if v > 0.0 { 0.5 / v.sqrt() } else { 1.0 };
    let (best, restart) = best_of(settings, 2 * d, |start| {
        ascend(&objective, &scale, &blocks, start, settings.tol, settings.max_iter)
    })?;
    let (x, y) = best.point.split_at(d);
    Ok(GammaEstimate {
        value: best.value.sqrt(),
        argmax: (alg.element(x), alg.element(y)),
        certificate: Certificate {
            grad_norm: best.grad_norm,
            converged: best.converged,
            iterations: best.iterations,
            best_restart: restart,
            restarts: settings.restarts,
        },
    })
}

/// The cubic `<w, [w, w]>` on self-dual forms `w = sum_a e_a (x) P^a`, written as a
/// symmetric trilinear form over the `3d` frame coordinates of `(P^1, P^2, P^3)`.
///
/// With `[e_a (x) X, e_b (x) Y] = (e_a o e_b) (x) [X, Y]` the coefficient tensor is
/// `<e_c, e_a o e_b> <f_r, [f_p, f_q]>`.
#[derive(Debug, Clone)]
pub struct SdCubic {
    dim: usize,
    sym: Vec<f64>,
}

impl SdCubic {
    pub fn new(alg: &AlgebraSpec) -> Self {
        let basis = SdBasis::standard();
        let mut form_coeff = [[[0.0; 3]; 3]; 3];
        for (a, row) in form_coeff.iter_mut().enumerate() {
            for (b, col) in row.iter_mut().enumerate() {
                let ab = circ(&basis.e[a], &basis.e[b]);
                for (c, v) in col.iter_mut().enumerate() {
                    *v = basis.e[c].inner(&ab);
                }
            }
        }
        let d = alg.dim();
        let m = 3 * d;
        let mut t = vec![0.0; m * m * m];
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    let k = form_coeff[a][b][c];
                    if k.abs() < 1e-15 {
                        continue;
                    }
                    for p in 0..d {
                        for q in 0..d {
                            for r in 0..d {
                                let (i, j, l) = (a * d + p, b * d + q, c * d + r);
                                t[(i * m + j) * m + l] = k * alg.structure_constant(p, q, r);
                            }
                        }
                    }
                }
            }
        }
        let mut sym = vec![0.0; m * m * m];
        for i in 0..m {
            for j in 0..m {
                for l in 0..m {
                    let idx = |a: usize, b: usize, c: usize| (a * m + b) * m + c;
                    sym[idx(i, j, l)] = (t[idx(i, j, l)]
                        + t[idx(i, l, j)]
                        + t[idx(j, i, l)]
                        + t[idx(j, l, i)]
                        + t[idx(l, i, j)]
                        + t[idx(l, j, i)])
                        / 6.0;
                }
            }
        }
        Self { dim: m, sym }
    }

    pub fn len(&self) -> usize {
        self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.dim == 0
    }

    /// Value at `w`; writes the gradient `3 S(., w, w)`.
    pub fn eval(&self, w: &[f64], grad: &mut [f64]) -> f64 {
        let m = self.dim;
        let mut value = 0.0;
        for i in 0..m {
            let mut gi = 0.0;
            let row = &self.sym[i * m * m..(i + 1) * m * m];
            for j in 0..m {
                let wj = w[j];
                if wj == 0.0 {
                    continue;
                }
                let inner: f64 = row[j * m..(j + 1) * m].iter().zip(w).map(|(s, wl)| s * wl).sum();
                gi += wj * inner;
            }
            grad[i] = 3.0 * gi;
            value += w[i] * gi;
        }
        value
    }
}

/// Builds `sum_a e_a (x) P^a` from stacked frame coordinates.
pub fn sd_form_from_coords(alg: &AlgebraSpec, w: &[f64]) -> LieValuedTwoForm {
    let d = alg.dim();
    let values: [LieElement; 3] = std::array::from_fn(|a| alg.element(&w[a * d..(a + 1) * d]));
    LieValuedTwoForm::from_sd(&SdBasis::standard(), &values)
}

/// Estimates `gamma1 = sup <w, [w,w]> / |w|^3` over self-dual forms with values
/// in the algebra.
pub fn gamma1_estimate(alg: &AlgebraSpec, settings: &GammaSettings) -> Result<Gamma1Estimate> {
    let cubic = SdCubic::new(alg);
    let m = cubic.len();
    let blocks = [m];
    let objective = |w: &[f64], grad: &mut [f64]| cubic.eval(w, grad);
    let unit = |_: f64| 1.0;
    let (best, restart) = best_of(settings, m, |start| {
        ascend(&objective, &unit, &blocks, start, settings.tol, settings.max_iter)
    })?;
    Ok(GammaEstimate {
        value: best.value,
        argmax: sd_form_from_coords(alg, &best.point),
        certificate: Certificate {
            grad_norm: best.grad_norm,
            converged: best.converged,
            iterations: best.iterations,
            best_restart: restart,
            restarts: settings.restarts,
        },
    })
}
