use std::f64::consts::PI;
use std::time::Instant;

use rand::Rng;

use serde::{Deserialize, Serialize};

use super::{
    corollary_thresholds, flow_admissible, gap_report, gap_rhs, GapConfig, StructureGroup, Verdict,
    INSTANTON_ENERGY,
};
use crate::conformal::{
    covariance_check, eigen_convergence, lambda1, phi_of, rayleigh, round_field, round_yamabe_invariant,
    yamabe_quotient, ModifiedScalarField, PolarGrid, RadialFunction, SLProblem,
};
use crate::forms4::{gram_defect, SdBasis, WeylPlus, SHARP_WEYL_CONSTANT};
use crate::instanton::{
    bochner_terms, curvature_closed_at, kato_sample, BochnerTerms, FdScheme, FlatConnection, InstantonParams,
    KatoSample, Point,
};
use crate::liealg::{
    bracket_bound_check, comm2form, gamma0_estimate, gamma0_ratio, gamma1_estimate, pauli_pair, AlgebraSpec,
    GammaSettings, LieElement, LieValuedTwoForm, GAMMA0_SO3, GAMMA0_SU2, GAMMA1_SO3, GAMMA1_SU2,
};
use crate::quad4::{chern_weil_kappa, l2_sd_norms, ym_energy, Orientation};
use crate::sampling;
use crate::{Error, Result};

pub const SUITES: [&str; 12] = [
    "kato",
    "bochner",
    "bracket-sharpness",
    "weyl-bound",
    "circ-basis",
    "gamma-constants",
    "energy",
    "chern-weil",
    "eigenvalue",
    "covariance",
    "yamabe-quotient",
    "gap",
];

/// One measured quantity compared against a target or a bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// `Some` for two-sided comparisons `|value - target| <= tolerance`.
    pub target: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
    /// Wall-clock bound; dropped from reproducible documents.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub timing: bool,
}

impl Check {
    fn near(name: impl Into<String>, value: f64, target: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            target: Some(target),
            tolerance,
            passed: (value - target).abs() <= tolerance,
            timing: false,
        }
    }

    fn rel(name: impl Into<String>, value: f64, target: f64, tolerance: f64) -> Self {
        Self::near(name, value, target, tolerance * target.abs())
    }

    /// `value <= bound`.
    fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            target: None,
            tolerance: bound,
            passed: value <= bound,
            timing: false,
        }
    }

    /// `value >= bound`, stored as `-value <= -bound`.
    fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            target: None,
            tolerance: bound,
            passed: value >= bound,
            timing: false,
        }
    }

    fn seconds(name: impl Into<String>, elapsed: f64, bound: f64) -> Self {
        Self {
            timing: true,
            ..Self::at_most(name, elapsed, bound)
        }
    }

    fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            target: Some(1.0),
            tolerance: 0.0,
            passed: ok,
            timing: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    /// Wall time; left out of documents unless timings are requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_seconds: Option<f64>,
}

pub fn run_suite(name: &str, cfg: &GapConfig) -> Result<SuiteResult> {
    let start = Instant::now();
    let checks = match name {
        "kato" => kato(cfg)?,
        "bochner" => bochner(cfg)?,
        "bracket-sharpness" => bracket_sharpness(cfg)?,
        "weyl-bound" => weyl_bound(cfg)?,
        "circ-basis" => circ_basis(cfg),
        "gamma-constants" => gamma_constants(cfg)?,
        "energy" => energy(cfg)?,
        "chern-weil" => chern_weil(cfg)?,
        "eigenvalue" => eigenvalue(cfg)?,
        "covariance" => covariance(cfg)?,
        "yamabe-quotient" => yamabe(cfg)?,
        "gap" => gap(cfg)?,
        _ => {
            return Err(Error::UnknownSuite {
                name: name.to_string(),
                available: SUITES.iter().map(|s| s.to_string()).collect(),
            })
        }
    };
    Ok(SuiteResult {
        suite: name.to_string(),
        passed: checks.iter().all(|c| c.passed),
        checks,
        runtime_seconds: Some(start.elapsed().as_secs_f64()),
    })
}

/// Runs every suite, each on its own thread; results come back in [`SUITES`] order.
pub fn run_all(cfg: &GapConfig) -> Result<Vec<SuiteResult>> {
    run_many(&SUITES, cfg)
}

pub fn run_many(names: &[&str], cfg: &GapConfig) -> Result<Vec<SuiteResult>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = names.iter().map(|n| scope.spawn(move || run_suite(n, cfg))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("suite thread panicked"))
            .collect()
    })
}

/// Points spread over the region where the instanton's curvature lives.
fn instanton_points(cfg: &GapConfig, count: usize, stream: u64) -> Vec<Point> {
    let p = cfg.instanton;
    let mut rng = sampling::rng(cfg.seed, stream);
    (0..count)
        .map(|_| sampling::point_in_box(&mut rng, &p.center(), 2.0 * p.scale()))
        .collect()
}

/// Fixed off-center probe points, in units of the scale.
fn probe_points(p: &InstantonParams) -> Vec<Point> {
    [[0.3, -0.1, 0.7, 0.2], [0.9, 0.4, -0.2, 0.1], [-0.5, 0.6, 0.3, -0.8]]
        .iter()
        .map(|y| std::array::from_fn(|k| p.center()[k] + p.scale() * y[k]))
        .collect()
}

/// `|nabla F+|^2 - (3/2) |d|F+||^2` at seeded points with the default Richardson step.
pub fn kato_samples(cfg: &GapConfig, count: usize) -> Result<Vec<KatoSample>> {
    let scheme = FdScheme::default();
    Ok(instanton_points(cfg, count, 0x4a70)
        .iter()
        .map(|x| kato_sample(&cfg.instanton, x, &scheme))
        .collect())
}

fn kato(cfg: &GapConfig) -> Result<Vec<Check>> {
    let samples = kato_samples(cfg, 1000)?;
    let min = samples.iter().map(|s| s.residual).fold(f64::INFINITY, f64::min);
    // |nabla F|^2 scales like s^-6
    let tol = 1e-8 * cfg.instanton.scale().powi(-6).max(1.0);
    let mut checks = vec![
        Check::at_least("min-residual", min, -tol),
        Check::at_least("sample-count", samples.len() as f64, 1000.0),
    ];
    let (coarse, fine) = (FdScheme::central(1e-2)?, FdScheme::central(5e-3)?);
    for (k, x) in probe_points(&cfg.instanton).iter().enumerate() {
        let reference = kato_sample(&cfg.instanton, x, &FdScheme::default()).residual;
        let a = (kato_sample(&cfg.instanton, x, &coarse).residual - reference).abs();
        let b = (kato_sample(&cfg.instanton, x, &fine).residual - reference).abs();
        checks.push(Check::at_least(format!("order-point-{k}"), (a / b).log2(), 1.8));
    }
    let flat = kato_sample(&FlatConnection::default(), &[0.1, 0.2, 0.3, 0.4], &FdScheme::default());
    checks.push(Check::near("flat-residual", flat.residual, 0.0, 0.0));
    Ok(checks)
}

/// Flat-chart Bochner terms at seeded points.
pub fn bochner_samples(cfg: &GapConfig, count: usize, scheme: &FdScheme) -> Result<Vec<(Point, BochnerTerms)>> {
    instanton_points(cfg, count, 0xb0c4)
        .into_iter()
        .map(|x| Ok((x, bochner_terms(&cfg.instanton, &x, scheme)?)))
        .collect()
}

fn bochner(cfg: &GapConfig) -> Result<Vec<Check>> {
    let p = &cfg.instanton;
    let s4 = p.scale().powi(4);
    let at_center = bochner_terms(p, &p.center(), &FdScheme::default())?;
    let mut checks = vec![
        Check::rel("center-laplacian", at_center.half_laplacian, -1536.0 / s4, 1e-5),
        Check::rel("center-cubic", at_center.cubic, 1536.0 / s4, 1e-5),
    ];
    let coarse = bochner_samples(cfg, 12, &FdScheme::central(1e-2)?)?;
    let fine = bochner_samples(cfg, 12, &FdScheme::central(5e-3)?)?;
    let sum = |v: &[(Point, BochnerTerms)]| v.iter().map(|(_, t)| t.residual.abs()).sum::<f64>();
    checks.push(Check::at_least("points", coarse.len() as f64, 10.0));
    checks.push(Check::at_least("order", (sum(&coarse) / sum(&fine)).log2(), 1.8));
    let precise = bochner_samples(cfg, 12, &FdScheme::default())?;
    let worst = precise.iter().map(|(_, t)| t.residual.abs()).fold(0.0, f64::max);
    checks.push(Check::at_most("max-residual", worst, 1e-6 / s4.min(1.0)));
    Ok(checks)
}

fn bracket_sharpness(cfg: &GapConfig) -> Result<Vec<Check>> {
    let mut worst_cubic = 0.0_f64;
    let mut worst_bracket = 0.0_f64;
    for x in instanton_points(cfg, 200, 0xb7ac) {
        let plus = curvature_closed_at(&cfg.instanton, &x).value.sd_split().0;
        let n = plus.norm();
        let pp = comm2form(&plus, &plus)?;
        let cubic = plus.inner(&pp)?;
        worst_cubic = worst_cubic.max((cubic - GAMMA1_SU2 * n.powi(3)).abs() / n.powi(3));
        let bound = 2.0 / 3f64.sqrt() * GAMMA0_SU2 * n * n;
        worst_bracket = worst_bracket.max((pp.norm() - bound).abs() / (n * n));
    }
    let mut checks = vec![
        Check::at_most("cubic-equality", worst_cubic, 1e-10),
        Check::at_most("bracket-equality", worst_bracket, 1e-10),
    ];
    let (a, b) = pauli_pair(0.7, -1.3, 5);
    let ratio = gamma0_ratio(&a, &b)?.unwrap_or(0.0);
    checks.push(Check::near("pauli-pair-ratio", ratio, 2f64.sqrt(), 1e-12));
    // the bracket bound on random self-dual su(2)-valued forms
    let alg = AlgebraSpec::su2_real();
    let mut rng = sampling::rng(cfg.seed, 0xb7ad);
    let mut worst = f64::INFINITY;
    for _ in 0..200 {
        let coords: [f64; 9] = sampling::gaussian_vec(&mut rng);
        let values: [LieElement; 3] = std::array::from_fn(|a| alg.element(&coords[3 * a..3 * a + 3]));
        let w = LieValuedTwoForm::from_sd(&SdBasis::standard(), &values);
        worst = worst.min(bracket_bound_check(&w, GAMMA0_SU2)? / w.norm_sq());
    }
    checks.push(Check::at_least("bracket-bound-random", worst, -1e-10));
    Ok(checks)
}

fn weyl_bound(cfg: &GapConfig) -> Result<Vec<Check>> {
    let mut rng = sampling::rng(cfg.seed, 0x3e71);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..10_000 {
        let w = sampling::weyl_plus(&mut rng, 1.0);
        let omega = sampling::unit3(&mut rng).map(|v| v * 1.7);
        let n2: f64 = omega.iter().map(|v| v * v).sum();
        worst = worst.max(w.quadratic(&omega).abs() - SHARP_WEYL_CONSTANT * w.norm() * n2);
    }
    let mut extremal = 0.0_f64;
    for _ in 0..20 {
        let lambda = rng.random_range(0.1..3.0);
        let r = sampling::rotation3(&mut rng);
        let base = WeylPlus::extremal(lambda);
        let mut m = [[0.0; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                m[a][b] = (0..3).map(|k| r[a][k] * base.matrix()[k][k] * r[b][k]).sum();
            }
        }
        // re-symmetrize against rounding in the product
        for a in 0..3 {
            for b in 0..a {
                let s = 0.5 * (m[a][b] + m[b][a]);
                m[a][b] = s;
                m[b][a] = s;
            }
        }
        let tr = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
        (0..3).for_each(|a| m[a][a] -= tr);
        let w = WeylPlus::new(m)?;
        let omega = [r[0][2], r[1][2], r[2][2]];
        let gap = w.quadratic(&omega).abs() - SHARP_WEYL_CONSTANT * w.norm();
        extremal = extremal.max(gap.abs() / lambda);
    }
    Ok(vec![
        Check::at_most("max-excess", worst, 1e-10),
        Check::at_most("extremal-equality", extremal, 1e-12),
    ])
}

fn circ_basis(cfg: &GapConfig) -> Vec<Check> {
    let mut rng = sampling::rng(cfg.seed, 0xc1bc);
    let (mut basis_defect, mut circ_defect) = (0.0_f64, 0.0_f64);
    for _ in 0..100 {
        let b = SdBasis::standard().rotated(&sampling::rotation3(&mut rng));
        basis_defect = basis_defect.max(b.orthonormality_defect());
        circ_defect = circ_defect.max(gram_defect(&b.circ_products()));
    }
    vec![
        Check::at_most("basis-orthonormality", basis_defect, 1e-12),
        Check::at_most("circ-orthonormality", circ_defect, 1e-10),
    ]
}

fn gamma_constants(cfg: &GapConfig) -> Result<Vec<Check>> {
    let settings = GammaSettings {
        seed: cfg.seed,
        ..GammaSettings::default()
    };
    let (su2, so3) = (AlgebraSpec::su2_real(), AlgebraSpec::so3_block());
    let t = Instant::now();
    let g0_su2 = gamma0_estimate(&su2, &settings)?.value;
    let g0_so3 = gamma0_estimate(&so3, &settings)?.value;
    let g0_time = t.elapsed().as_secs_f64();
    let g1_su2 = gamma1_estimate(&su2, &settings)?.value;
    let g1_so3 = gamma1_estimate(&so3, &settings)?.value;
    let g1_so4 = gamma1_estimate(&AlgebraSpec::so(4), &settings)?.value;
    Ok(vec![
        Check::near("gamma0-su2", g0_su2, GAMMA0_SU2, 1e-6),
        Check::near("gamma0-so3", g0_so3, GAMMA0_SO3, 1e-6),
        Check::seconds("gamma0-seconds", g0_time, 5.0),
        Check::near("gamma1-su2", g1_su2, GAMMA1_SU2, 1e-5),
        Check::near("gamma1-so3", g1_so3, GAMMA1_SO3, 1e-5),
        Check::at_most("gamma1-so4", g1_so4, GAMMA1_SU2 + 1e-5),
    ])
}

fn energy(cfg: &GapConfig) -> Result<Vec<Check>> {
    let grid = cfg.grid.radial()?;
    let t = Instant::now();
    let e = ym_energy(&cfg.instanton, &grid)?;
    let mut checks = vec![Check::rel("energy", e.value, INSTANTON_ENERGY, 1e-8)];
    let mut spread = 0.0_f64;
    for s in [0.25, 0.5, 1.0, 2.0, 4.0] {
        for c in [[0.0; 4], cfg.instanton.center(), [1.0, 0.0, 0.0, 0.0], [0.3, -2.0, 0.5, 1.1]] {
            let v = ym_energy(&InstantonParams::new(s, c)?, &grid)?.value;
            spread = spread.max((v - INSTANTON_ENERGY).abs() / INSTANTON_ENERGY);
        }
    }
    checks.push(Check::at_most("dilation-translation-spread", spread, 1e-6));
    checks.push(Check::seconds("seconds", t.elapsed().as_secs_f64(), 2.0));
    let refined = ym_energy(&cfg.instanton, &grid.refined())?.value;
    checks.push(Check::at_most("refinement-change", (refined - e.value).abs() / INSTANTON_ENERGY, 1e-10));
    checks.push(Check::flag("no-tail-warning", e.warning.is_none()));
    checks.push(Check::near("flat", ym_energy(&FlatConnection::default(), &grid)?.value, 0.0, 0.0));
    Ok(checks)
}

fn chern_weil(cfg: &GapConfig) -> Result<Vec<Check>> {
    let grid = cfg.grid.radial()?;
    let cw = chern_weil_kappa(&cfg.instanton, &grid, Orientation::Standard)?;
    let rev = chern_weil_kappa(&cfg.instanton, &grid, Orientation::Reversed)?;
    let (plus, minus) = l2_sd_norms(&cfg.instanton, &grid)?;
    let e = ym_energy(&cfg.instanton, &grid)?.value;
    let flat = chern_weil_kappa(&FlatConnection::default(), &grid, Orientation::Standard)?;
    Ok(vec![
        Check::near("abs-kappa", cw.abs_kappa, 1.0, 1e-8),
        Check::near("kappa", cw.kappa, -1.0, 1e-8),
        Check::near("kappa-reversed", rev.kappa, 1.0, 1e-8),
        Check::at_most("anti-self-dual-norm", minus, 1e-10),
        Check::near("self-dual-norm", plus, 4.0 * PI, 1e-8),
        Check::rel("norms-sum-to-energy", plus * plus + minus * minus, e, 1e-10),
        Check::near("flat-kappa", flat.kappa, 0.0, 0.0),
    ])
}

/// The constant field `Phi = 0` produced by the standard instanton on the round sphere.
pub fn equality_field() -> ModifiedScalarField {
    phi_of(
        RadialFunction::constant(12.0),
        RadialFunction::constant(0.0),
        RadialFunction::constant(6f64.sqrt()),
        GAMMA1_SU2,
    )
    .expect("valid constants")
}

fn eigenvalue(cfg: &GapConfig) -> Result<Vec<Check>> {
    let nodes = cfg.grid.polar_nodes;
    let twelve = RadialFunction::constant(12.0);
    let l12 = lambda1(&SLProblem::round(PolarGrid::new(2000)?, &twelve)?)?.value;
    let round = SLProblem::round(PolarGrid::new(nodes)?, &twelve)?;
    let cos = rayleigh(&round, &RadialFunction::cosine_series(vec![0.0, 1.0]))?;
    let borderline = lambda1(&SLProblem::round(PolarGrid::new(nodes)?, &equality_field().phi)?)?.value;
    let rows = eigen_convergence(&twelve, 401, 3, Some(36.0))?;
    let order = rows.iter().filter_map(|r| r.order).fold(f64::INFINITY, f64::min);
    let mut checks = vec![
        Check::near("lambda1-constant-12", l12, 12.0, 1e-8),
        Check::near("rayleigh-cos", cos, 36.0, 1e-6),
        Check::near("lambda1-equality-field", borderline, 0.0, 1e-6),
        Check::at_least("convergence-order", order, 1.9),
    ];
    // variational bound and monotonicity on a non-constant potential
    let grid = PolarGrid::new(1000)?;
    let low = RadialFunction::cosine_series(vec![2.0, 3.0, -1.0]);
    let high = RadialFunction::cosine_series(vec![2.5, 3.0, -1.0]);
    let prob = SLProblem::round(grid.clone(), &low)?;
    let l_low = lambda1(&prob)?.value;
    let l_high = lambda1(&SLProblem::round(grid, &high)?)?.value;
    let mut rng = sampling::rng(cfg.seed, 0xe16e);
    let mut gap = f64::INFINITY;
    for _ in 0..10 {
        let f = sampling::conformal_factor(&mut rng, 4, 0.9);
        gap = gap.min(rayleigh(&prob, &f)? - l_low);
    }
    checks.push(Check::at_least("rayleigh-above-lambda1", gap, -1e-8));
    checks.push(Check::at_least("monotonicity", l_high - l_low, -1e-10));
    Ok(checks)
}

fn covariance(cfg: &GapConfig) -> Result<Vec<Check>> {
    let base = round_field();
    let curved = phi_of(
        RadialFunction::constant(12.0),
        RadialFunction::cosine_series(vec![0.2, 0.1]),
        RadialFunction::cosine_series(vec![0.5, 0.3]),
        GAMMA1_SU2,
    )?;
    let mut rng = sampling::rng(cfg.seed, 0xc0fa);
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let u = sampling::conformal_factor(&mut rng, 3, 0.8);
        worst = worst.max(covariance_check(&u, &base)?.residual);
        worst = worst.max(covariance_check(&u, &curved)?.residual);
    }
    let mut checks = vec![Check::at_most("max-residual", worst, 1e-6)];
    // the sign of lambda1 survives conformal changes
    let small = PolarGrid::new(2000)?;
    let mut agree = true;
    for field in [round_field(), curved, constant_field(-6.0)] {
        let l = lambda1(&SLProblem::round(small.clone(), &field.phi)?)?.value;
        for _ in 0..3 {
            let u = sampling::conformal_factor(&mut rng, 3, 0.8);
            let lt = lambda1(&SLProblem::conformal(small.clone(), &field, &u)?)?.value;
            if l.abs() > 1e-6 {
                agree &= l.signum() == lt.signum();
            }
        }
    }
    checks.push(Check::flag("lambda1-sign-invariance", agree));
    Ok(checks)
}

fn constant_field(phi: f64) -> ModifiedScalarField {
    phi_of(
        RadialFunction::constant(phi),
        RadialFunction::constant(0.0),
        RadialFunction::constant(0.0),
        0.0,
    )
    .expect("valid constants")
}

fn yamabe(cfg: &GapConfig) -> Result<Vec<Check>> {
    let y = round_yamabe_invariant();
    let one = yamabe_quotient(&RadialFunction::constant(1.0))?;
    let mut rng = sampling::rng(cfg.seed, 0x7a3b);
    let mut min = f64::INFINITY;
    for _ in 0..50 {
        min = min.min(yamabe_quotient(&sampling::conformal_factor(&mut rng, 4, 0.9))?);
    }
    Ok(vec![
        Check::near("constant-factor", one, y, 1e-8),
        Check::at_least("family-minimum", min, y - 1e-6),
    ])
}

fn gap(cfg: &GapConfig) -> Result<Vec<Check>> {
    let r = gap_report(cfg)?;
    let recomputed = gap_rhs(r.gamma1.value, r.curvature_plus_l2.value, r.weyl_plus_l2.value);
    let mut checks = vec![
        Check::near("rhs-closure", r.rhs.value - recomputed, 0.0, 0.0),
        Check::flag(
            "verdict-consistent",
            r.verdict == super::classify(r.yamabe.value, r.curvature_plus_l2.value, r.slack.value, cfg.equality_tol),
        ),
    ];
    if let Some(eq) = &r.equality_identity {
        checks.push(Check::at_most("equality-identity", eq.max_residual, 1e-8));
    }
    let reference = gap_report(&GapConfig {
        group: StructureGroup::Su2,
        ..GapConfig::default()
    })?;
    checks.push(Check::flag("reference-equality", reference.verdict == Verdict::Equality));
    checks.push(Check::at_most(
        "reference-relative-slack",
        (reference.slack.value / reference.yamabe.value).abs(),
        1e-6,
    ));
    let identity = 12.0 - 3.0 * GAMMA1_SU2 * 6f64.sqrt();
    checks.push(Check::near("equality-constant", identity, 0.0, 1e-8));
    let y = round_yamabe_invariant();
    let su2 = corollary_thresholds(&StructureGroup::Su2, 1.0, y, GAMMA1_SU2)?;
    let so3 = corollary_thresholds(&StructureGroup::So3, 1.0, y, GAMMA1_SO3)?;
    checks.push(Check::near("threshold-su2", su2.specialized.unwrap_or(f64::NAN), 48.0 * PI * PI, 0.0));
    checks.push(Check::near("threshold-so3", so3.specialized.unwrap_or(f64::NAN), 80.0 * PI * PI, 0.0));
    checks.push(Check::flag("flow-at-16pi2", !flow_admissible(INSTANTON_ENERGY)));
    checks.push(Check::flag("flow-at-zero", flow_admissible(0.0)));
    let e = ym_energy(&InstantonParams::standard(), &cfg.grid.radial()?)?.value;
    checks.push(Check::flag("flow-at-instanton-energy", !flow_admissible(e)));
    Ok(checks)
}
