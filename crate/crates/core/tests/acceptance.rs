//! Acceptance gate: every criterion at its stated tolerance, one PASS/FAIL line each.

use std::f64::consts::PI;
use std::time::Instant;

use rand::Rng;
use ymgap::conformal::{
    covariance_check, lambda1, rayleigh, round_field, yamabe_quotient, PolarGrid, RadialFunction, SLProblem,
};
use ymgap::forms4::{gram_defect, SdBasis, WeylPlus};
use ymgap::instanton::{bochner_terms, curvature_closed_at, kato_sample, FdScheme, InstantonParams, Point};
use ymgap::liealg::{comm2form, gamma0_estimate, gamma1_estimate, AlgebraSpec, GammaSettings};
use ymgap::quad4::{chern_weil_kappa, l2_sd_norms, ym_energy, Orientation, RadialGrid};
use ymgap::report::{
    corollary_thresholds, equality_field, flow_admissible, gap_report, run_all, GapConfig, StructureGroup, Verdict,
};
use ymgap::sampling;

const SEED: u64 = 20_241;

fn gamma1_su2() -> f64 {
    4.0 / 6f64.sqrt()
}

fn gamma1_so3() -> f64 {
    2.0 / 3f64.sqrt()
}

fn round_yamabe() -> f64 {
    8.0 * 6f64.sqrt() * PI
}

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn gamma0_criterion() -> Outcome {
    let settings = GammaSettings {
        seed: SEED,
        ..GammaSettings::default()
    };
    let t = Instant::now();
    let su2 = gamma0_estimate(&AlgebraSpec::su2_real(), &settings).unwrap();
    let t_su2 = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let so3 = gamma0_estimate(&AlgebraSpec::so3_block(), &settings).unwrap();
    let t_so3 = t.elapsed().as_secs_f64();
    let ok = (su2.value - 2f64.sqrt()).abs() < 1e-6
        && (so3.value - 1.0).abs() < 1e-6
        && su2.certificate.restarts == 64
        && so3.certificate.restarts == 64
        && t_su2 < 5.0
        && t_so3 < 5.0;
    outcome(ok, format!("su2 {:.12} so3 {:.12} in {t_su2:.2}s/{t_so3:.2}s", su2.value, so3.value))
}

fn gamma1_criterion() -> Outcome {
    let settings = GammaSettings {
        seed: SEED,
        ..GammaSettings::default()
    };
    let su2 = gamma1_estimate(&AlgebraSpec::su2_real(), &settings).unwrap().value;
    let so3 = gamma1_estimate(&AlgebraSpec::so3_block(), &settings).unwrap().value;
    let so4 = gamma1_estimate(&AlgebraSpec::so(4), &settings).unwrap().value;
    let ok = (su2 - gamma1_su2()).abs() < 1e-5 && (so3 - gamma1_so3()).abs() < 1e-5 && so4 <= gamma1_su2() + 1e-5;
    outcome(ok, format!("su2 {su2:.9} so3 {so3:.9} so4 {so4:.9}"))
}

fn energy_criterion() -> Outcome {
    let target = 16.0 * PI * PI;
    let grid = RadialGrid::default();
    let t = Instant::now();
    let e = ym_energy(&InstantonParams::standard(), &grid).unwrap().value;
    let mut spread = 0.0_f64;
    for s in [0.25, 0.5, 1.0, 2.0, 4.0] {
        for c in [[0.0; 4], [1.0, 0.0, 0.0, 0.0], [0.5, -1.5, 2.0, 0.25], [-3.0, 1.0, 0.0, 2.0]] {
            let v = ym_energy(&InstantonParams::new(s, c).unwrap(), &grid).unwrap().value;
            spread = spread.max((v / target - 1.0).abs());
        }
    }
    let secs = t.elapsed().as_secs_f64();
    let rel = (e / target - 1.0).abs();
    outcome(
        rel < 1e-8 && spread < 1e-6 && secs < 2.0,
        format!("rel err {rel:.2e}, sweep spread {spread:.2e}, {secs:.3}s"),
    )
}

fn chern_weil_criterion() -> Outcome {
    let grid = RadialGrid::default();
    let p = InstantonParams::standard();
    let cw = chern_weil_kappa(&p, &grid, Orientation::Standard).unwrap();
    let (_, minus) = l2_sd_norms(&p, &grid).unwrap();
    outcome(
        (cw.abs_kappa - 1.0).abs() < 1e-8 && minus < 1e-10,
        format!("|kappa| {:.12}, ||F-|| {minus:.2e}", cw.abs_kappa),
    )
}

fn sample_points(seed: u64, n: usize, p: &InstantonParams) -> Vec<Point> {
    let mut rng = sampling::rng(seed, 7);
    (0..n)
        .map(|_| sampling::point_in_box(&mut rng, &p.center(), 2.0 * p.scale()))
        .collect()
}

fn kato_criterion() -> Outcome {
    let p = InstantonParams::standard();
    let scheme = FdScheme::richardson(1e-4).unwrap();
    let points = sample_points(SEED, 1000, &p);
    let min = points
        .iter()
        .map(|x| kato_sample(&p, x, &scheme).residual)
        .fold(f64::INFINITY, f64::min);
    let mut orders = Vec::new();
    for x in &points[..3] {
        let reference = kato_sample(&p, x, &scheme).residual;
        let err = |h: f64| (kato_sample(&p, x, &FdScheme::central(h).unwrap()).residual - reference).abs();
        orders.push((err(2e-2) / err(1e-2)).log2());
    }
    let ok = points.len() >= 1000 && min >= -1e-8 && orders.iter().all(|o| (1.8..2.2).contains(o));
    outcome(ok, format!("min residual {min:.2e} over {} points, orders {orders:.3?}", points.len()))
}

/// `(1/2) Delta |F|^2` at the center from a five-point stencil on `96 / (1 + r^2)^4`.
fn center_half_laplacian_oracle() -> f64 {
    let f = |r: f64| 96.0 / (1.0 + r * r).powi(4);
    let h = 1e-3;
    let d2 = (-f(2.0 * h) + 16.0 * f(h) - 30.0 * f(0.0) + 16.0 * f(-h) - f(-2.0 * h)) / (12.0 * h * h);
    // radial Laplacian in four dimensions at the origin is 4 f''
    0.5 * 4.0 * d2
}

fn bochner_criterion() -> Outcome {
    let p = InstantonParams::standard();
    let points = sample_points(SEED + 1, 12, &p);
    let mut orders = Vec::new();
    for x in &points {
        let r = |h: f64| bochner_terms(&p, x, &FdScheme::central(h).unwrap()).unwrap().residual.abs();
        orders.push((r(2e-2) / r(1e-2)).log2());
    }
    let center = bochner_terms(&p, &[0.0; 4], &FdScheme::default()).unwrap();
    let oracle = center_half_laplacian_oracle();
    let lap_ok = (center.half_laplacian / oracle - 1.0).abs() < 1e-5 && (oracle / -1536.0 - 1.0).abs() < 1e-5;
    let cubic_ok = (center.cubic / 1536.0 - 1.0).abs() < 1e-5;
    let ok = points.len() >= 10 && orders.iter().all(|o| *o > 1.8) && lap_ok && cubic_ok;
    let worst = orders.iter().cloned().fold(f64::INFINITY, f64::min);
    outcome(
        ok,
        format!(
            "min order {worst:.3} on {} points; center {:.6} / {:.6}",
            points.len(),
            center.half_laplacian,
            center.cubic
        ),
    )
}

fn sharpness_criterion() -> Outcome {
    let p = InstantonParams::standard();
    let mut worst = 0.0_f64;
    for x in sample_points(SEED + 2, 500, &p) {
        let plus = curvature_closed_at(&p, &x).value.sd_split().0;
        let n = plus.norm();
        let pp = comm2form(&plus, &plus).unwrap();
        let cubic = plus.inner(&pp).unwrap();
        worst = worst.max((cubic - gamma1_su2() * n.powi(3)).abs());
        worst = worst.max((pp.norm() - gamma1_so3() * 2f64.sqrt() * n * n).abs());
    }
    outcome(worst < 1e-10, format!("max deviation {worst:.2e}"))
}

fn circ_criterion() -> Outcome {
    let mut rng = sampling::rng(SEED, 8);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let b = SdBasis::standard().rotated(&sampling::rotation3(&mut rng));
        worst = worst.max(b.orthonormality_defect());
        worst = worst.max(gram_defect(&b.circ_products()));
    }
    outcome(worst < 1e-10, format!("max Gram defect {worst:.2e}"))
}

fn quadratic(m: &[[f64; 3]; 3], w: &[f64; 3]) -> f64 {
    (0..3).map(|a| (0..3).map(|b| w[a] * m[a][b] * w[b]).sum::<f64>()).sum()
}

fn weyl_criterion() -> Outcome {
    let c = 2.0 / 6f64.sqrt();
    let mut rng = sampling::rng(SEED, 9);
    let mut excess = f64::NEG_INFINITY;
    for _ in 0..10_000 {
        let scale = rng.random_range(0.1..10.0);
        let w = sampling::weyl_plus(&mut rng, scale);
        let omega = sampling::gaussian_vec::<3>(&mut rng);
        let n2: f64 = omega.iter().map(|v| v * v).sum();
        let frob = w.matrix().iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
        excess = excess.max(quadratic(w.matrix(), &omega).abs() - c * frob * n2 - 1e-10);
    }
    // extremal pairs: diag(l, l, -2l) against e3, in random orientations
    let mut eq = 0.0_f64;
    for k in 1..=10 {
        let l = 0.3 * k as f64;
        let w = WeylPlus::extremal(l);
        let r = sampling::rotation3(&mut rng);
        let omega = [r[0][2], r[1][2], r[2][2]];
        let mut m = [[0.0; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                m[a][b] = (0..3).map(|j| r[a][j] * w.matrix()[j][j] * r[b][j]).sum();
            }
        }
        let frob = (6.0 * l * l).sqrt();
        eq = eq.max((quadratic(&m, &omega).abs() - c * frob).abs() / l);
        eq = eq.max((w.quadratic(&[0.0, 0.0, 1.0]).abs() - c * w.norm()).abs());
    }
    outcome(
        excess <= 0.0 && eq < 1e-12,
        format!("max excess {:.2e}, extremal gap {eq:.2e}", excess + 1e-10),
    )
}

fn eigen_criterion() -> Outcome {
    let twelve = RadialFunction::constant(12.0);
    let l12 = lambda1(&SLProblem::round(PolarGrid::new(2000).unwrap(), &twelve).unwrap()).unwrap().value;
    let prob = SLProblem::round(PolarGrid::default(), &twelve).unwrap();
    let cos = rayleigh(&prob, &RadialFunction::cosine_series(vec![0.0, 1.0])).unwrap();
    let field = equality_field();
    let borderline = lambda1(&SLProblem::round(PolarGrid::default(), &field.phi).unwrap()).unwrap().value;
    let ok = (l12 - 12.0).abs() < 1e-8 && (cos - 36.0).abs() < 1e-6 && borderline.abs() <= 1e-6;
    outcome(ok, format!("lambda1(12) {l12:.12}, R(cos) {cos:.9}, lambda1(0) {borderline:.2e}"))
}

fn covariance_criterion() -> Outcome {
    let mut rng = sampling::rng(SEED, 10);
    let base = round_field();
    let worst = (0..20)
        .map(|_| covariance_check(&sampling::conformal_factor(&mut rng, 3, 0.8), &base).unwrap().residual)
        .fold(0.0, f64::max);
    outcome(worst < 1e-6, format!("max residual {worst:.2e} over 20 factors"))
}

fn yamabe_criterion() -> Outcome {
    let y = round_yamabe();
    let one = yamabe_quotient(&RadialFunction::constant(1.0)).unwrap();
    let mut rng = sampling::rng(SEED, 11);
    let min = (0..50)
        .map(|_| yamabe_quotient(&sampling::conformal_factor(&mut rng, 4, 0.9)).unwrap())
        .fold(f64::INFINITY, f64::min);
    outcome(
        (one - y).abs() < 1e-8 && min >= y - 1e-6,
        format!("Q(1) - Y {:.2e}, family min - Y {:.3e}", one - y, min - y),
    )
}

fn gap_criterion() -> Outcome {
    let cfg = GapConfig {
        group: StructureGroup::Su2,
        yamabe: Some(round_yamabe()),
        weyl_l2: 0.0,
        ..GapConfig::default()
    };
    let r = gap_report(&cfg).unwrap();
    let rel = (r.slack.value / r.yamabe.value).abs();
    let identity = 12.0 - 3.0 * r.gamma1.value * 6f64.sqrt();
    let ok = r.verdict == Verdict::Equality && rel < 1e-6 && identity.abs() < 1e-8;
    outcome(ok, format!("verdict {:?}, |slack|/Y {rel:.2e}, identity {identity:.2e}", r.verdict))
}

fn thresholds_criterion() -> Outcome {
    let su2 = corollary_thresholds(&StructureGroup::Su2, 1.0, round_yamabe(), gamma1_su2()).unwrap();
    let so3 = corollary_thresholds(&StructureGroup::So3, 1.0, round_yamabe(), gamma1_so3()).unwrap();
    let ok = su2.specialized == Some(48.0 * PI * PI)
        && so3.specialized == Some(80.0 * PI * PI)
        && !flow_admissible(16.0 * PI * PI);
    outcome(ok, format!("SU(2) {:?}, SO(3) {:?}", su2.specialized, so3.specialized))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 14] = [
        ("1 gamma0 constants", gamma0_criterion),
        ("2 gamma1 constants", gamma1_criterion),
        ("3 instanton energy", energy_criterion),
        ("4 Chern-Weil number", chern_weil_criterion),
        ("5 improved Kato", kato_criterion),
        ("6 Bochner identity", bochner_criterion),
        ("7 pointwise sharpness", sharpness_criterion),
        ("8 circ basis", circ_criterion),
        ("9 sharp Weyl bound", weyl_criterion),
        ("10 eigenvalue solver", eigen_criterion),
        ("11 conformal covariance", covariance_criterion),
        ("12 Yamabe quotient", yamabe_criterion),
        ("13 gap report equality", gap_criterion),
        ("14 thresholds and flow", thresholds_criterion),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        let o = run();
        println!("{} {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        if !o.passed {
            failed.push(name);
        }
    }

    let t = Instant::now();
    let suites = run_all(&GapConfig::default()).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let all_ok = suites.iter().all(|s| s.passed) && secs < 60.0;
    println!(
        "{} all suites: {}/{} passed in {secs:.1}s",
        if all_ok { "PASS" } else { "FAIL" },
        suites.iter().filter(|s| s.passed).count(),
        suites.len()
    );
    if !all_ok {
        failed.push("all suites");
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
