//! Gap-inequality evaluation, energy thresholds and the verification suites.
//!
//! The inequality checked is `Y <= 3 gamma1 ||F+|| + 2 sqrt6 ||W+||` for a
//! Yang-Mills connection with `F+` not identically zero. `Y` is always an
//! input: quotients are evaluated elsewhere, the invariant itself is never
//! minimized here.

mod output;
mod suite;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::conformal::{round_scalar_curvature, round_yamabe_invariant, sphere4_volume};
use crate::instanton::{AdjointSo3, Connection, FlatConnection, InstantonParams, Point};
use crate::liealg::{gamma1_estimate, AlgebraSpec, GammaSettings, LieElement, GAMMA1_SO3, GAMMA1_SU2};
use crate::quad4::{l2_sd_norms, RadialGrid};
use crate::sampling;
use crate::{Error, Result};

pub use output::{render, Document, Format, SCHEMA};
pub use suite::{
    bochner_samples, equality_field, kato_samples, run_all, run_many, run_suite, Check, SuiteResult, SUITES,
};

/// `16 pi^2`, the energy of the standard instanton.
pub const INSTANTON_ENERGY: f64 = 16.0 * PI * PI;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureGroup {
    Su2,
    So3,
    /// Skew matrices, each given row-major.
    Custom { name: String, n: usize, basis: Vec<Vec<f64>> },
}

impl StructureGroup {
    pub fn algebra(&self) -> Result<AlgebraSpec> {
        match self {
            StructureGroup::Su2 => Ok(AlgebraSpec::su2_real()),
            StructureGroup::So3 => Ok(AlgebraSpec::so3_block()),
            StructureGroup::Custom { name, n, basis } => {
                let elems = basis
                    .iter()
                    .map(|b| {
                        if b.len() != n * n {
                            return Err(Error::Config(format!("basis element needs {} entries", n * n)));
                        }
                        Ok(LieElement::from_rows(*n, b))
                    })
                    .collect::<Result<Vec<_>>>()?;
                AlgebraSpec::custom(name.clone(), elems).map_err(|e| Error::Config(e.to_string()))
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            StructureGroup::Su2 => "SU(2)".into(),
            StructureGroup::So3 => "SO(3)".into(),
            StructureGroup::Custom { name, .. } => name.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gamma1Source {
    /// The closed-form value for su(2) or so(3).
    #[default]
    Constant,
    /// The sphere-product optimizer, seeded from the config.
    Estimate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConnectionKind {
    /// The standard instanton with the configured scale and center, in the
    /// group's representation.
    #[default]
    Instanton,
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSettings {
    pub radial_panels: usize,
    pub radial_order: usize,
    pub r_max: f64,
    pub polar_nodes: usize,
}

impl Default for GridSettings {
    fn default() -> Self {
        Self {
            radial_panels: RadialGrid::DEFAULT_PANELS,
            radial_order: RadialGrid::DEFAULT_ORDER,
            r_max: RadialGrid::DEFAULT_R_MAX,
            polar_nodes: crate::conformal::PolarGrid::DEFAULT_NODES,
        }
    }
}

impl GridSettings {
    pub fn radial(&self) -> Result<RadialGrid> {
        RadialGrid::new(self.radial_panels, self.radial_order, self.r_max).map_err(|e| Error::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapConfig {
    pub group: StructureGroup,
    pub gamma1_source: Gamma1Source,
    /// `||W+||_{L^2}`; zero for conformally flat metrics.
    pub weyl_l2: f64,
    /// `Y([g])`; `None` means the round `S^4` value.
    pub yamabe: Option<f64>,
    pub connection: ConnectionKind,
    pub instanton: InstantonParams,
    /// Replaces the computed `||F+||` (synthetic configurations).
    pub curvature_l2: Option<f64>,
    pub grid: GridSettings,
    pub seed: u64,
    /// `|slack| / Y` below this is reported as equality.
    pub equality_tol: f64,
}

impl Default for GapConfig {
    fn default() -> Self {
        Self {
            group: StructureGroup::Su2,
            gamma1_source: Gamma1Source::Constant,
            weyl_l2: 0.0,
            yamabe: None,
            connection: ConnectionKind::Instanton,
            instanton: InstantonParams::standard(),
            curvature_l2: None,
            grid: GridSettings::default(),
            seed: 0x5eed_0001,
            equality_tol: 1e-6,
        }
    }
}

impl GapConfig {
    pub fn yamabe_value(&self) -> f64 {
        self.yamabe.unwrap_or_else(round_yamabe_invariant)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.weyl_l2 >= 0.0 && self.weyl_l2.is_finite()) {
            return bad(format!("||W+|| must be a nonnegative number, got {}", self.weyl_l2));
        }
        if let Some(f) = self.curvature_l2 {
            if !(f >= 0.0 && f.is_finite()) {
                return bad(format!("||F+|| must be a nonnegative number, got {f}"));
            }
        }
        if !self.yamabe_value().is_finite() {
            return bad("Yamabe invariant must be finite".into());
        }
        if !(self.equality_tol > 0.0) {
            return bad(format!("equality tolerance must be positive, got {}", self.equality_tol));
        }
        if matches!(self.group, StructureGroup::Custom { .. }) {
            if self.gamma1_source == Gamma1Source::Constant {
                return bad("custom groups need the estimated gamma1".into());
            }
            if self.connection == ConnectionKind::Instanton && self.curvature_l2.is_none() {
                return bad("custom groups need an explicit ||F+|| or a flat connection".into());
            }
        }
        Ok(())
    }

    /// The configured connection in the group's representation.
    pub fn build_connection(&self) -> Box<dyn Connection> {
        match (self.connection, &self.group) {
            (ConnectionKind::Flat, _) => Box::new(FlatConnection::default()),
            (ConnectionKind::Instanton, StructureGroup::So3) => Box::new(AdjointSo3 { inner: self.instanton }),
            (ConnectionKind::Instanton, _) => Box::new(self.instanton),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Computed,
    Configured,
    PaperConstant,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub value: f64,
    pub provenance: Provenance,
}

impl Quantity {
    fn new(value: f64, provenance: Provenance) -> Self {
        Self { value, provenance }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// `F+` vanishes identically.
    #[serde(rename = "case-1")]
    Case1,
    /// `Y > rhs`: no Yang-Mills connection with `F+ != 0` has these data.
    StrictGapViolated,
    InequalityHolds,
    Equality,
}

/// Pointwise `R - 2 sqrt6 |W+| - 3 gamma1 |F+|` on the round metric
/// `(2 s / (s^2 + |x - c|^2))^2 |dx|^2` matched to the instanton.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EqualityIdentity {
    pub scalar_curvature: f64,
    /// `||W+|| / vol(S^4)^(1/2)`, the constant pointwise norm with that `L^2` norm.
    pub weyl_pointwise: f64,
    /// `|F+|` in the round metric at each sample point.
    pub curvature_pointwise: Vec<f64>,
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub group: String,
    pub yamabe: Quantity,
    pub gamma1: Quantity,
    pub curvature_plus_l2: Quantity,
    pub weyl_plus_l2: Quantity,
    pub lhs: Quantity,
    pub rhs: Quantity,
    pub slack: Quantity,
    pub verdict: Verdict,
    pub equality_identity: Option<EqualityIdentity>,
    pub warnings: Vec<String>,
}

/// `3 gamma1 ||F+|| + 2 sqrt6 ||W+||`.
pub fn gap_rhs(gamma1: f64, curvature_l2: f64, weyl_l2: f64) -> f64 {
    3.0 * gamma1 * curvature_l2 + 2.0 * 6f64.sqrt() * weyl_l2
}

/// `||F+||` at or below this counts as `F+ = 0`.
pub const CASE1_THRESHOLD: f64 = 1e-12;

pub fn classify(yamabe: f64, curvature_l2: f64, slack: f64, equality_tol: f64) -> Verdict {
    if curvature_l2 <= CASE1_THRESHOLD {
        Verdict::Case1
    } else if (slack / yamabe).abs() < equality_tol {
        Verdict::Equality
    } else if slack > 0.0 {
        Verdict::InequalityHolds
    } else {
        Verdict::StrictGapViolated
    }
}

fn gamma1_for(cfg: &GapConfig) -> Result<Quantity> {
    let q = match (cfg.gamma1_source, &cfg.group) {
        (Gamma1Source::Constant, StructureGroup::Su2) => Quantity::new(GAMMA1_SU2, Provenance::PaperConstant),
        (Gamma1Source::Constant, StructureGroup::So3) => Quantity::new(GAMMA1_SO3, Provenance::PaperConstant),
        (Gamma1Source::Constant, StructureGroup::Custom { .. }) => {
            return Err(Error::Config("custom groups need the estimated gamma1".into()))
        }
        (Gamma1Source::Estimate, group) => {
            let settings = GammaSettings {
                seed: cfg.seed,
                ..GammaSettings::default()
            };
            Quantity::new(gamma1_estimate(&group.algebra()?, &settings)?.value, Provenance::Computed)
        }
    };
    if !(q.value > 0.0 && q.value <= GAMMA1_SU2 + 1e-5) {
        return Err(Error::Config(format!(
            "gamma1 = {} lies outside (0, 4/sqrt6]",
            q.value
        )));
    }
    Ok(q)
}

/// Round-metric conformal factor `u` with `g_round = u^2 g_flat`.
fn round_factor(p: &InstantonParams, x: &Point) -> f64 {
    let c = p.center();
    let s = p.scale();
    let r2: f64 = (0..4).map(|k| (x[k] - c[k]).powi(2)).sum();
    2.0 * s / (s * s + r2)
}

fn equality_identity(cfg: &GapConfig, conn: &dyn Connection, gamma1: f64) -> EqualityIdentity {
    let p = cfg.instanton;
    let mut rng = sampling::rng(cfg.seed, 0x6a9);
    let mut points = vec![p.center()];
    points.extend((0..15).map(|_| sampling::point_in_box(&mut rng, &p.center(), 3.0 * p.scale())));
    let w = cfg.weyl_l2 / sphere4_volume().sqrt();
    let r = round_scalar_curvature();
    let curvature_pointwise: Vec<f64> = points
        .iter()
        .map(|x| conn.sd_density(x).0.sqrt() / round_factor(&p, x).powi(2))
        .collect();
    let max_residual = curvature_pointwise
        .iter()
        .map(|f| (r - 2.0 * 6f64.sqrt() * w - 3.0 * gamma1 * f).abs())
        .fold(0.0, f64::max);
    EqualityIdentity {
        scalar_curvature: r,
        weyl_pointwise: w,
        curvature_pointwise,
        max_residual,
    }
}

pub fn gap_report(cfg: &GapConfig) -> Result<GapReport> {
    cfg.validate()?;
    let gamma1 = gamma1_for(cfg)?;
    let yamabe = Quantity::new(
        cfg.yamabe_value(),
        if cfg.yamabe.is_some() {
            Provenance::Configured
        } else {
            Provenance::PaperConstant
        },
    );
    let conn = cfg.build_connection();
    let mut warnings = Vec::new();
    let curvature = match cfg.curvature_l2 {
        Some(v) => Quantity::new(v, Provenance::Configured),
        None => {
            let grid = cfg.grid.radial()?;
            let s = crate::quad4::sd_integrals(conn.as_ref(), &grid, Default::default())?;
            warnings.extend(s.warning.clone());
            Quantity::new(s.plus_sq.max(0.0).sqrt(), Provenance::Computed)
        }
    };
    let weyl = Quantity::new(cfg.weyl_l2, Provenance::Configured);
    let rhs = gap_rhs(gamma1.value, curvature.value, weyl.value);
    let slack = rhs - yamabe.value;
    let verdict = classify(yamabe.value, curvature.value, slack, cfg.equality_tol);
    let equality_identity = (verdict == Verdict::Equality
        && cfg.curvature_l2.is_none()
        && cfg.connection == ConnectionKind::Instanton)
        .then(|| equality_identity(cfg, conn.as_ref(), gamma1.value));
    Ok(GapReport {
        group: cfg.group.label(),
        yamabe,
        gamma1,
        curvature_plus_l2: curvature,
        weyl_plus_l2: weyl,
        lhs: yamabe,
        rhs: Quantity::new(rhs, Provenance::Computed),
        slack: Quantity::new(slack, Provenance::Computed),
        verdict,
        equality_identity,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// `16 pi^2 |kappa| + 2 Y^2 / (9 gamma1^2)`.
    pub general: f64,
    /// The `S^4` values for SU(2) and SO(3).
    pub specialized: Option<f64>,
    /// `16 pi^2 |kappa| + Y^2 / 12`, valid for every group.
    pub universal: f64,
}

/// Energy below which a non-instanton Yang-Mills connection cannot exist.
pub fn corollary_thresholds(group: &StructureGroup, kappa_abs: f64, yamabe: f64, gamma1: f64) -> Result<Thresholds> {
    if !(kappa_abs >= 0.0) {
        return Err(Error::invalid(format!("|kappa| must be nonnegative, got {kappa_abs}")));
    }
    if !(yamabe > 0.0) {
        return Err(Error::invalid(format!("the thresholds need a positive Yamabe invariant, got {yamabe}")));
    }
    if !(gamma1 > 0.0) {
        return Err(Error::invalid(format!("gamma1 must be positive, got {gamma1}")));
    }
    let base = 16.0 * PI * PI * kappa_abs;
    let specialized = match group {
        StructureGroup::Su2 => Some((16.0 * kappa_abs + 32.0) * PI * PI),
        StructureGroup::So3 => Some((16.0 * kappa_abs + 64.0) * PI * PI),
        StructureGroup::Custom { .. } => None,
    };
    Ok(Thresholds {
        general: base + 2.0 * yamabe * yamabe / (9.0 * gamma1 * gamma1),
        specialized,
        universal: base + yamabe * yamabe / 12.0,
    })
}

/// `energy < 16 pi^2`: the flow started there exists for all time and converges.
pub fn flow_admissible(energy: f64) -> bool {
    energy < INSTANTON_ENERGY
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowCheck {
    pub energy: f64,
    pub threshold: f64,
    pub admissible: bool,
    pub note: String,
}

pub fn flow_check(energy: f64) -> Result<FlowCheck> {
    if !(energy >= 0.0) {
        return Err(Error::invalid(format!("energy must be nonnegative, got {energy}")));
    }
    let admissible = flow_admissible(energy);
    Ok(FlowCheck {
        energy,
        threshold: INSTANTON_ENERGY,
        admissible,
        note: if admissible {
            "below 16 pi^2: the Yang-Mills flow exists for all time and converges (not simulated)".into()
        } else {
            "at or above 16 pi^2: no global existence claim".into()
        },
    })
}

/// `||F+||` of the configured connection, for callers that only need the number.
pub fn curvature_plus_l2(cfg: &GapConfig) -> Result<f64> {
    Ok(l2_sd_norms(cfg.build_connection().as_ref(), &cfg.grid.radial()?)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bpst_is_the_equality_case() {
        let r = gap_report(&GapConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Equality);
        assert!((r.rhs.value - 8.0 * 6f64.sqrt() * PI).abs() < 1e-6);
        assert!((r.slack.value / r.yamabe.value).abs() < 1e-6);
        let eq = r.equality_identity.unwrap();
        assert!(eq.max_residual < 1e-8);
        assert!(eq.curvature_pointwise.iter().all(|f| (f - 6f64.sqrt()).abs() < 1e-10));
        assert_eq!(r.yamabe.provenance, Provenance::PaperConstant);
        assert_eq!(r.curvature_plus_l2.provenance, Provenance::Computed);
        assert_eq!(r.rhs.value, gap_rhs(r.gamma1.value, r.curvature_plus_l2.value, r.weyl_plus_l2.value));
    }

    #[test]
    fn so3_adjoint_instanton_is_also_extremal() {
        let cfg = GapConfig {
            group: StructureGroup::So3,
            instanton: InstantonParams::new(0.7, [0.2, 0.0, -0.1, 0.3]).unwrap(),
            ..GapConfig::default()
        };
        let r = gap_report(&cfg).unwrap();
        assert_eq!(r.verdict, Verdict::Equality);
        assert!(r.equality_identity.unwrap().max_residual < 1e-8);
    }

    #[test]
    fn other_verdicts() {
        let flat = GapConfig {
            connection: ConnectionKind::Flat,
            ..GapConfig::default()
        };
        assert_eq!(gap_report(&flat).unwrap().verdict, Verdict::Case1);
        let small = GapConfig {
            curvature_l2: Some(1.0),
            ..GapConfig::default()
        };
        assert_eq!(gap_report(&small).unwrap().verdict, Verdict::StrictGapViolated);
        let large = GapConfig {
            weyl_l2: 5.0,
            ..GapConfig::default()
        };
        let r = gap_report(&large).unwrap();
        assert_eq!(r.verdict, Verdict::InequalityHolds);
        assert!(r.equality_identity.is_none());
    }

    #[test]
    fn rejects_inconsistent_configs() {
        let custom = GapConfig {
            group: StructureGroup::Custom {
                name: "so4".into(),
                n: 4,
                basis: vec![vec![0.0; 16]],
            },
            ..GapConfig::default()
        };
        assert!(matches!(gap_report(&custom), Err(Error::Config(_))));
        let neg = GapConfig {
            weyl_l2: -1.0,
            ..GapConfig::default()
        };
        assert!(matches!(gap_report(&neg), Err(Error::Config(_))));
    }

    #[test]
    fn thresholds() {
        let y = round_yamabe_invariant();
        let su2 = corollary_thresholds(&StructureGroup::Su2, 1.0, y, GAMMA1_SU2).unwrap();
        assert_eq!(su2.specialized, Some(48.0 * PI * PI));
        let so3 = corollary_thresholds(&StructureGroup::So3, 1.0, y, GAMMA1_SO3).unwrap();
        assert_eq!(so3.specialized, Some(80.0 * PI * PI));
        // with gamma1 = 4/sqrt6 the general bound is the universal one
        assert!((su2.general - su2.universal).abs() < 1e-12 * su2.universal);
        // and for SU(2) both equal the specialized S^4 value
        assert!((su2.general - 48.0 * PI * PI).abs() < 1e-10);
        assert!((so3.general - 80.0 * PI * PI).abs() < 1e-10);
        assert!(corollary_thresholds(&StructureGroup::Su2, 1.0, 0.0, 1.0).is_err());
        assert!(corollary_thresholds(&StructureGroup::Su2, 1.0, y, 0.0).is_err());
    }

    #[test]
    fn flow_threshold_is_strict() {
        assert!(!flow_admissible(INSTANTON_ENERGY));
        assert!(flow_admissible(0.0));
        assert!(flow_admissible(INSTANTON_ENERGY * (1.0 - 1e-12)));
        assert!(flow_check(-1.0).is_err());
    }
}
