use std::f64::consts::PI;

use approx::assert_relative_eq;
use proptest::prelude::*;

use ymgap::conformal::{
    lambda1, phi_of, rayleigh, round_yamabe_invariant, yamabe_quotient, PolarGrid, RadialFunction, SLProblem,
};
use ymgap::forms4::{gram_defect, SdBasis, WeylPlus};
use ymgap::instanton::{Connection, InstantonParams};
use ymgap::liealg::{
    bracket_bound_check, cubic_ratio, AlgebraSpec, LieElement, LieValuedTwoForm, GAMMA0_SU2, GAMMA1_SU2,
};
use ymgap::quad4::{ym_energy, RadialGrid};
use ymgap::report::{
    classify, corollary_thresholds, flow_admissible, gap_report, gap_rhs, render, Document, Format, GapConfig,
    StructureGroup, Verdict,
};

fn rotation_from(q: [f64; 4]) -> [[f64; 3]; 3] {
    let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    let [w, x, y, z] = q.map(|v| v / n);
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

fn quaternion() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-1.0..1.0f64).prop_filter("nonzero", |q| q.iter().map(|v| v * v).sum::<f64>() > 1e-3)
}

fn su2_form(c: &[f64; 9]) -> LieValuedTwoForm {
    let alg = AlgebraSpec::su2_real();
    let values: [LieElement; 3] = std::array::from_fn(|a| alg.element(&c[3 * a..3 * a + 3]));
    LieValuedTwoForm::from_sd(&SdBasis::standard(), &values)
}

fn positive_factor() -> impl Strategy<Value = RadialFunction> {
    prop::collection::vec(-1.0..1.0f64, 1..4).prop_map(|raw| {
        let total: f64 = raw.iter().map(|a| a.abs()).sum::<f64>().max(1e-12);
        let mut coeffs = vec![1.0];
        coeffs.extend(raw.iter().map(|a| 0.7 * a / total));
        RadialFunction::cosine_series(coeffs)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn weyl_bound_holds(g in prop::array::uniform6(-5.0..5.0f64), w in prop::array::uniform3(-3.0..3.0f64)) {
        let mut m = [[g[0], g[3], g[4]], [g[3], g[1], g[5]], [g[4], g[5], g[2]]];
        let tr = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
        (0..3).for_each(|a| m[a][a] -= tr);
        let wp = WeylPlus::new(m).unwrap();
        let n2: f64 = w.iter().map(|v| v * v).sum();
        prop_assert!(wp.quadratic(&w).abs() <= 2.0 / 6f64.sqrt() * wp.norm() * n2 + 1e-10);
    }

    #[test]
    fn circ_products_of_rotated_bases_are_orthonormal(q in quaternion()) {
        let b = SdBasis::standard().rotated(&rotation_from(q));
        prop_assert!(b.orthonormality_defect() < 1e-12);
        prop_assert!(gram_defect(&b.circ_products()) < 1e-10);
    }

    #[test]
    fn bracket_and_cubic_bounds_on_su2(c in prop::array::uniform9(-2.0..2.0f64)) {
        let w = su2_form(&c);
        prop_assume!(w.norm() > 1e-3);
        prop_assert!(bracket_bound_check(&w, GAMMA0_SU2).unwrap() >= -1e-10 * w.norm_sq());
        prop_assert!(cubic_ratio(&w).unwrap().abs() <= GAMMA1_SU2 + 1e-10);
    }

    #[test]
    fn instanton_curvature_is_self_dual(y in prop::array::uniform4(-3.0..3.0f64), s in 0.2..5.0f64) {
        let p = InstantonParams::new(s, [0.3, -0.2, 0.1, 0.5]).unwrap();
        let x = std::array::from_fn(|k| p.center()[k] + s * y[k]);
        let (plus, minus) = p.sd_density(&x);
        prop_assert!(minus <= 1e-24 * plus.max(1.0));
        let r2: f64 = y.iter().map(|v| v * v).sum::<f64>() * s * s;
        let exact = 96.0 * s.powi(4) / (s * s + r2).powi(4);
        prop_assert!((plus - exact).abs() <= 1e-12 * exact);
    }

    #[test]
    fn flow_threshold_is_strict(e in 0.0..400.0f64) {
        prop_assert_eq!(flow_admissible(e), e < 16.0 * PI * PI);
    }

    #[test]
    fn rhs_closes_exactly(f in 0.0..50.0f64, w in 0.0..50.0f64, y in 1.0..200.0f64) {
        let cfg = GapConfig {
            curvature_l2: Some(f),
            weyl_l2: w,
            yamabe: Some(y),
            ..GapConfig::default()
        };
        let r = gap_report(&cfg).unwrap();
        prop_assert_eq!(r.rhs.value, gap_rhs(r.gamma1.value, r.curvature_plus_l2.value, r.weyl_plus_l2.value));
        prop_assert_eq!(r.slack.value, r.rhs.value - r.lhs.value);
        prop_assert_eq!(r.verdict, classify(y, f, r.slack.value, cfg.equality_tol));
        match r.verdict {
            Verdict::InequalityHolds => prop_assert!(r.slack.value > 0.0),
            Verdict::StrictGapViolated => prop_assert!(r.slack.value < 0.0),
            Verdict::Case1 => prop_assert!(f <= 1e-12),
            Verdict::Equality => prop_assert!((r.slack.value / y).abs() < cfg.equality_tol),
        }
    }

    #[test]
    fn general_threshold_matches_universal_at_sharp_gamma(k in 0.0..5.0f64, y in 1.0..100.0f64) {
        let t = corollary_thresholds(&StructureGroup::Su2, k, y, GAMMA1_SU2).unwrap();
        assert_relative_eq!(t.general, t.universal, max_relative = 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn energy_is_scale_and_translation_invariant(s in 0.2..5.0f64, c in prop::array::uniform4(-3.0..3.0f64)) {
        let e = ym_energy(&InstantonParams::new(s, c).unwrap(), &RadialGrid::default()).unwrap().value;
        assert_relative_eq!(e, 16.0 * PI * PI, max_relative = 1e-6);
    }

    #[test]
    fn lambda1_is_monotone(a in prop::collection::vec(-3.0..3.0f64, 1..4), shift in 0.0..2.0f64) {
        let grid = PolarGrid::new(400).unwrap();
        let mut b = a.clone();
        b[0] += shift;
        let low = lambda1(&SLProblem::round(grid.clone(), &RadialFunction::cosine_series(a)).unwrap()).unwrap().value;
        let high = lambda1(&SLProblem::round(grid, &RadialFunction::cosine_series(b)).unwrap()).unwrap().value;
        prop_assert!(low <= high + 1e-9);
    }

    #[test]
    fn rayleigh_bounds_lambda1(a in prop::collection::vec(-3.0..3.0f64, 1..4), u in positive_factor()) {
        let prob = SLProblem::round(PolarGrid::new(400).unwrap(), &RadialFunction::cosine_series(a)).unwrap();
        prop_assert!(rayleigh(&prob, &u).unwrap() >= lambda1(&prob).unwrap().value - 1e-8);
    }

    #[test]
    fn sign_of_lambda1_is_conformally_invariant(c in -8.0..20.0f64, f in 0.0..3.0f64, u in positive_factor()) {
        let base = phi_of(
            RadialFunction::constant(12.0),
            RadialFunction::constant(0.0),
            RadialFunction::cosine_series(vec![f, 0.2 * f]),
            GAMMA1_SU2,
        )
        .unwrap();
        let base = phi_of(
            RadialFunction::cosine_series(vec![c, 1.0]),
            base.weyl_norm,
            base.curvature_norm,
            base.gamma1,
        )
        .unwrap();
        let grid = PolarGrid::new(800).unwrap();
        let l = lambda1(&SLProblem::round(grid.clone(), &base.phi).unwrap()).unwrap().value;
        prop_assume!(l.abs() > 1e-3);
        let lt = lambda1(&SLProblem::conformal(grid, &base, &u).unwrap()).unwrap().value;
        prop_assert_eq!(l.signum(), lt.signum());
    }

    #[test]
    fn round_metric_minimizes_yamabe_quotient(u in positive_factor()) {
        prop_assert!(yamabe_quotient(&u).unwrap() >= round_yamabe_invariant() - 1e-6);
    }

    #[test]
    fn reports_are_deterministic(seed in any::<u64>(), s in 0.5..2.0f64) {
        let cfg = GapConfig {
            seed,
            instanton: InstantonParams::new(s, [0.0; 4]).unwrap(),
            ..GapConfig::default()
        };
        let doc = |cfg: &GapConfig| {
            let r = gap_report(cfg).unwrap();
            let d = Document::new("gap", serde_json::to_value(cfg).unwrap(), serde_json::to_value(r).unwrap());
            render(&d, Format::Json).unwrap()
        };
        prop_assert_eq!(doc(&cfg), doc(&cfg));
    }
}
