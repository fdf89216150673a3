//! Quadrature over the flat chart `R^4`.
//!
//! Radial integrals use Gauss-Legendre panels with geometrically growing
//! edges `r_k = (1 + R)^(k/N) - 1` on `[0, R]`, plus an analytic tail term for
//! integrands decaying like `r^-8` (the curvature density of any finite-energy
//! instanton). Integrands that are not radial about a known center use a
//! tensor product rule on `S^3`.
//!
//! Only conformally invariant quantities (energy, curvature `L^2` norms, the
//! Chern-Weil number) are meaningful when transplanted to `S^4` this way.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::instanton::{Connection, Point};
use crate::{Error, Result};

/// `vol(S^3) = 2 pi^2`.
pub const SPHERE3_VOLUME: f64 = 2.0 * PI * PI;

/// Tail estimates above this trigger a warning.
pub const TAIL_TOLERANCE: f64 = 1e-10;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes increasing.
pub(crate) fn gauss_legendre(order: usize) -> Result<Vec<(f64, f64)>> {
    let n = NonZeroUsize::new(order).ok_or_else(|| Error::invalid("quadrature order must be positive"))?;
    let mut pairs = GaussLegendre::new(n).as_node_weight_pairs().to_vec();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs)
}

/// Sum by recursive halving so the rounding pattern depends only on the length.
pub fn tree_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n => {
            let (a, b) = values.split_at(n / 2);
            tree_sum(a) + tree_sum(b)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    panels: usize,
    order: usize,
    r_max: f64,
    /// Gauss nodes per polar angle of the `S^3` rule (the azimuth uses twice as many).
    angular: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl RadialGrid {
    pub const DEFAULT_PANELS: usize = 48;
    pub const DEFAULT_ORDER: usize = 16;
    pub const DEFAULT_R_MAX: f64 = 1e3;
    pub const DEFAULT_ANGULAR: usize = 8;

    pub fn new(panels: usize, order: usize, r_max: f64) -> Result<Self> {
        if panels == 0 {
            return Err(Error::invalid("radial grid needs at least one panel"));
        }
        if !(r_max > 0.0 && r_max.is_finite()) {
            return Err(Error::invalid(format!("truncation radius must be positive, got {r_max}")));
        }
        let gl = gauss_legendre(order)?;
        let edge = |k: usize| (1.0 + r_max).powf(k as f64 / panels as f64) - 1.0;
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        for k in 0..panels {
            let (a, b) = (edge(k), edge(k + 1));
            let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
            for &(t, w) in &gl {
                nodes.push(mid + half * t);
                weights.push(half * w);
            }
        }
        Ok(Self {
            panels,
            order,
            r_max,
            angular: Self::DEFAULT_ANGULAR,
            nodes,
            weights,
        })
    }

    pub fn with_angular(mut self, angular: usize) -> Result<Self> {
        if angular == 0 {
            return Err(Error::invalid("angular resolution must be positive"));
        }
        self.angular = angular;
        Ok(self)
    }

    /// Same truncation and order with twice as many panels.
    pub fn refined(&self) -> Self {
        Self::new(2 * self.panels, self.order, self.r_max)
            .expect("refining a valid grid")
            .with_angular(self.angular)
            .expect("angular resolution already validated")
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn angular(&self) -> usize {
        self.angular
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl Default for RadialGrid {
    fn default() -> Self {
        Self::new(Self::DEFAULT_PANELS, Self::DEFAULT_ORDER, Self::DEFAULT_R_MAX)
            .expect("default grid parameters are valid")
    }
}

/// `2 pi^2 * int_0^R f(r) r^3 dr`.
pub fn integrate_r4_radial(f: impl Fn(f64) -> f64, grid: &RadialGrid) -> Result<f64> {
    let mut terms = Vec::with_capacity(grid.nodes.len());
    for (&r, &w) in grid.nodes.iter().zip(&grid.weights) {
        let v = f(r);
        if !v.is_finite() {
            return Err(Error::NonFinite { node: r, value: v });
        }
        terms.push(w * v * r * r * r);
    }
    Ok(SPHERE3_VOLUME * tree_sum(&terms))
}

/// `2 pi^2 * int_R^inf f r^3 dr` assuming `f ~ c r^-8` beyond `R`.
pub fn tail_estimate(f_at_r_max: f64, r_max: f64) -> f64 {
    SPHERE3_VOLUME * f_at_r_max * r_max.powi(4) / 4.0
}

/// A tensor product rule on the unit `S^3`: points and weights summing to `2 pi^2`.
///
/// Coordinates `(cos a, sin a cos b, sin a sin b cos c, sin a sin b sin c)`
/// with measure `sin^2 a sin b`. In `t = cos a` the weight is `sqrt(1 - t^2)`
/// (Gauss-Chebyshev of the second kind), in `s = cos b` it is flat
/// (Gauss-Legendre), and `c` uses the uniform rule.
pub fn sphere3_rule(n: usize) -> Result<Vec<(Point, f64)>> {
    let gl = gauss_legendre(n)?;
    let m = 2 * n;
    let dc = 2.0 * PI / m as f64;
    let step = PI / (n + 1) as f64;
    let mut out = Vec::with_capacity(n * n * m);
    for i in 1..=n {
        let (sa, ca) = (step * i as f64).sin_cos();
        let wa = step * sa * sa;
        for &(cb, wb) in &gl {
            let sb = (1.0 - cb * cb).sqrt();
            let w = wa * wb * dc;
            for l in 0..m {
                let (sc, cc) = (dc * l as f64).sin_cos();
                out.push(([ca, sa * cb, sa * sb * cc, sa * sb * sc], w));
            }
        }
    }
    Ok(out)
}

/// `int_{R^4} f` for a general integrand, truncated at the grid radius.
pub fn integrate_r4(f: impl Fn(&Point) -> f64, center: &Point, grid: &RadialGrid) -> Result<f64> {
    let rule = sphere3_rule(grid.angular)?;
    let mut shells = Vec::with_capacity(grid.nodes.len());
    let mut terms = vec![0.0; rule.len()];
    for (&r, &w) in grid.nodes.iter().zip(&grid.weights) {
        for (t, (omega, wo)) in terms.iter_mut().zip(&rule) {
            let x: Point = std::array::from_fn(|k| center[k] + r * omega[k]);
            let v = f(&x);
            if !v.is_finite() {
                return Err(Error::NonFinite { node: r, value: v });
            }
            *t = wo * v;
        }
        shells.push(w * r * r * r * tree_sum(&terms));
    }
    Ok(tree_sum(&shells))
}

/// Integrals of `|F+|^2` and `|F-|^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdIntegrals {
    pub plus_sq: f64,
    pub minus_sq: f64,
    /// Tail correction included in the two values above.
    pub tail: f64,
    pub radial_path: bool,
    pub warning: Option<String>,
}

impl SdIntegrals {
    pub fn energy(&self) -> f64 {
        self.plus_sq + self.minus_sq
    }
}

/// Which of the two routes to use for curvature densities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadraturePath {
    /// Radial rule when the connection reports a radial center, product rule otherwise.
    #[default]
    Auto,
    Spherical,
}

pub fn sd_integrals<C: Connection + ?Sized>(
    conn: &C,
    grid: &RadialGrid,
    path: QuadraturePath,
) -> Result<SdIntegrals> {
    let radial = match path {
        QuadraturePath::Auto => conn.radial_center(),
        QuadraturePath::Spherical => None,
    };
    let (center, plus, minus) = match radial {
        Some(c) => {
            let along = |r: f64| -> Point { [c[0] + r, c[1], c[2], c[3]] };
            let plus = integrate_r4_radial(|r| conn.sd_density(&along(r)).0, grid)?;
            let minus = integrate_r4_radial(|r| conn.sd_density(&along(r)).1, grid)?;
            (c, plus, minus)
        }
        None => {
            // the product rule is centered at the origin
            let c = [0.0; 4];
            let plus = integrate_r4(|x| conn.sd_density(x).0, &c, grid)?;
            let minus = integrate_r4(|x| conn.sd_density(x).1, &c, grid)?;
            (c, plus, minus)
        }
    };
    let edge: Point = [center[0] + grid.r_max, center[1], center[2], center[3]];
    let (dp, dm) = conn.sd_density(&edge);
    let (tp, tm) = (tail_estimate(dp, grid.r_max), tail_estimate(dm, grid.r_max));
    let scale = (plus + minus).abs().max(1.0);
    let tail = tp + tm;
    let warning = (tail > TAIL_TOLERANCE * scale).then(|| {
        format!(
            "tail estimate {tail:.3e} exceeds {TAIL_TOLERANCE:.0e} relative at R = {}",
            grid.r_max
        )
    });
    Ok(SdIntegrals {
        plus_sq: plus + tp,
        minus_sq: minus + tm,
        tail,
        radial_path: radial.is_some(),
        warning,
    })
}

/// An integral with its tail correction and any truncation warning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Integral {
    pub value: f64,
    pub tail: f64,
    pub warning: Option<String>,
}

/// `int |F|^2 dV` over `R^4`.
pub fn ym_energy<C: Connection + ?Sized>(conn: &C, grid: &RadialGrid) -> Result<Integral> {
    let s = sd_integrals(conn, grid, QuadraturePath::Auto)?;
    Ok(Integral {
        value: s.energy(),
        tail: s.tail,
        warning: s.warning,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    #[default]
    Standard,
    /// Self-dual and anti-self-dual roles exchanged.
    Reversed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChernWeil {
    /// `(int |F-|^2 - int |F+|^2) / (16 pi^2)`.
    pub kappa: f64,
    pub abs_kappa: f64,
    pub warning: Option<String>,
}

pub fn chern_weil_kappa<C: Connection + ?Sized>(
    conn: &C,
    grid: &RadialGrid,
    orientation: Orientation,
) -> Result<ChernWeil> {
    let s = sd_integrals(conn, grid, QuadraturePath::Auto)?;
    let (plus, minus) = match orientation {
        Orientation::Standard => (s.plus_sq, s.minus_sq),
        Orientation::Reversed => (s.minus_sq, s.plus_sq),
    };
    let kappa = (minus - plus) / (16.0 * PI * PI);
    Ok(ChernWeil {
        kappa,
        abs_kappa: kappa.abs(),
        warning: s.warning,
    })
}

/// `(||F+||, ||F-||)`.
pub fn l2_sd_norms<C: Connection + ?Sized>(conn: &C, grid: &RadialGrid) -> Result<(f64, f64)> {
    let s = sd_integrals(conn, grid, QuadraturePath::Auto)?;
    Ok((s.plus_sq.max(0.0).sqrt(), s.minus_sq.max(0.0).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub panels: usize,
    pub nodes: usize,
    pub energy: f64,
    /// Change from the previous row; zero on the first.
    pub change: f64,
}

/// Energy on successively doubled panel counts, starting from `grid`.
pub fn energy_convergence<C: Connection + ?Sized>(
    conn: &C,
    grid: &RadialGrid,
    levels: usize,
) -> Result<Vec<ConvergenceRow>> {
    let mut rows = Vec::with_capacity(levels);
    let mut g = grid.clone();
    let mut prev: Option<f64> = None;
    for _ in 0..levels {
        let e = ym_energy(conn, &g)?.value;
        rows.push(ConvergenceRow {
            panels: g.panels,
            nodes: g.nodes.len(),
            energy: e,
            change: prev.map_or(0.0, |p| e - p),
        });
        prev = Some(e);
        g = g.refined();
    }
    Ok(rows)
}
