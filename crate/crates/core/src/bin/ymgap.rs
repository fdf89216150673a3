use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ymgap::conformal::{
    covariance_check, eigen_convergence, lowest_eigenpairs, round_field, round_yamabe_invariant, yamabe_quotient,
    EigenSettings, PolarGrid, RadialFunction, SLProblem,
};
use ymgap::forms4::SHARP_WEYL_CONSTANT;
use ymgap::instanton::{FdScheme, InstantonParams};
use ymgap::liealg::{
    gamma0_estimate, gamma1_estimate, AlgebraSpec, GammaSettings, GAMMA0_SO3, GAMMA0_SU2, GAMMA1_SO3, GAMMA1_SU2,
};
use ymgap::quad4::{chern_weil_kappa, energy_convergence, sd_integrals, ym_energy, Orientation};
use ymgap::report::{
    bochner_samples, corollary_thresholds, equality_field, flow_check, gap_report, kato_samples, render, run_all,
    run_many, ConnectionKind, Document, Format, Gamma1Source, GapConfig, GridSettings, StructureGroup,
    INSTANTON_ENERGY,
};
use ymgap::{Error, Result};

#[derive(Parser)]
#[command(name = "ymgap", version, about = "Numerical checks for a conformal gap inequality for Yang-Mills connections")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Structure group.
    #[arg(long, global = true, value_enum, default_value_t = Group::Su2)]
    group: Group,
    /// Instanton scale.
    #[arg(long = "lambda", allow_negative_numbers = true, global = true, default_value_t = 1.0)]
    lambda: f64,
    /// Instanton center as x1,x2,x3,x4.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    center: Option<Vec<f64>>,
    /// Radial quadrature panels.
    #[arg(long, global = true, default_value_t = 48)]
    grid_panels: usize,
    /// Radial truncation.
    #[arg(long, allow_negative_numbers = true, global = true, default_value_t = 1e3)]
    rmax: f64,
    /// Polar grid nodes for eigenvalue problems.
    #[arg(long, global = true, default_value_t = PolarGrid::DEFAULT_NODES)]
    nodes: usize,
    #[arg(long, global = true, default_value_t = GapConfig::default().seed)]
    seed: u64,
    /// Relative tolerance for the equality verdict.
    #[arg(long, allow_negative_numbers = true, global = true, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Json)]
    format: OutFormat,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Include wall-clock times (makes output non-reproducible).
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Group {
    Su2,
    So3,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Base {
    /// `Phi = 12`.
    Round,
    /// The standard instanton's field, `Phi = 0`.
    Equality,
}

#[derive(Subcommand)]
enum Command {
    /// Sharp constants; `--estimate` also runs the optimizers.
    Constants {
        #[arg(long)]
        estimate: bool,
    },
    /// Yang-Mills energy, Chern-Weil number and self-dual norms.
    Energy {
        #[arg(long)]
        flat: bool,
        /// Refinement levels for a convergence table.
        #[arg(long, default_value_t = 0)]
        levels: usize,
        /// CSV file for the convergence table.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Improved Kato inequality at sampled points.
    Kato {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// CSV file for the point samples.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Flat-chart Bochner identity at sampled points.
    Bochner {
        #[arg(long, default_value_t = 12)]
        samples: usize,
        /// Central-difference step; Richardson-extrapolated default when absent.
        #[arg(long, allow_negative_numbers = true)]
        step: Option<f64>,
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Lowest eigenvalues of the modified conformal Laplacian.
    Eigen {
        /// Two-column CSV (rho, Phi); defaults to the equality field.
        #[arg(long, conflicts_with = "phi_constant")]
        phi_csv: Option<PathBuf>,
        #[arg(long, allow_negative_numbers = true)]
        phi_constant: Option<f64>,
        #[arg(long, default_value_t = 2)]
        count: usize,
        /// Write the sampled Phi as CSV.
        #[arg(long)]
        export: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        levels: usize,
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Conformal covariance of the modified scalar curvature.
    Covariance {
        /// Cosine coefficients of the conformal factor, constant term first.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "1,0.3")]
        u: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Base::Round)]
        base: Base,
    },
    /// Yamabe quotient of a radial conformal factor.
    Yamabe {
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "1,0.5")]
        u: Vec<f64>,
    },
    /// Both sides of the gap inequality and the verdict.
    Gap {
        /// ||W+|| in L2.
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
        weyl: f64,
        /// Yamabe invariant; the round S^4 value when absent.
        #[arg(long, allow_negative_numbers = true)]
        yamabe: Option<f64>,
        /// Use this ||F+|| instead of integrating the connection.
        #[arg(long, allow_negative_numbers = true)]
        curvature: Option<f64>,
        /// Estimate gamma1 numerically instead of using the closed form.
        #[arg(long)]
        estimate_gamma1: bool,
        #[arg(long)]
        flat: bool,
    },
    /// Energy thresholds below which Yang-Mills connections are instantons.
    Thresholds {
        #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
        kappa: f64,
        #[arg(long, allow_negative_numbers = true)]
        yamabe: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        gamma1: Option<f64>,
    },
    /// Whether an initial energy is below the flow threshold.
    FlowCheck {
        /// Defaults to the computed instanton energy.
        #[arg(long, allow_negative_numbers = true)]
        energy: Option<f64>,
    },
    /// Every verification suite.
    All,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(passed) => ExitCode::from(if passed { 0 } else { 1 }),
        Err(e) => {
            eprintln!("ymgap: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn base_config(c: &Common) -> Result<GapConfig> {
    let center = match &c.center {
        None => [0.0; 4],
        Some(v) => <[f64; 4]>::try_from(v.as_slice())
            .map_err(|_| Error::Config(format!("--center needs four coordinates, got {}", v.len())))?,
    };
    let instanton = InstantonParams::new(c.lambda, center).map_err(|e| Error::Config(e.to_string()))?;
    if c.nodes < 3 {
        return Err(Error::Config("--nodes must be at least 3".into()));
    }
    let cfg = GapConfig {
        group: match c.group {
            Group::Su2 => StructureGroup::Su2,
            Group::So3 => StructureGroup::So3,
        },
        instanton,
        grid: GridSettings {
            radial_panels: c.grid_panels,
            r_max: c.rmax,
            polar_nodes: c.nodes,
            ..GridSettings::default()
        },
        seed: c.seed,
        equality_tol: c.tol,
        ..GapConfig::default()
    };
    cfg.grid.radial()?;
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<bool> {
    let c = &cli.common;
    let mut cfg = base_config(c)?;
    let doc = match &cli.command {
        Command::Constants { estimate } => constants(&cfg, *estimate)?,
        Command::Energy { flat, levels, table } => {
            if *flat {
                cfg.connection = ConnectionKind::Flat;
            }
            energy(&cfg, *levels, table.as_deref())?
        }
        Command::Kato { samples, dump } => kato(&cfg, *samples, dump.as_deref())?,
        Command::Bochner { samples, step, dump } => bochner(&cfg, *samples, *step, dump.as_deref())?,
        Command::Eigen {
            phi_csv,
            phi_constant,
            count,
            export,
            levels,
            table,
        } => {
            let phi = match (phi_csv, phi_constant) {
                (Some(p), _) => RadialFunction::read_csv(p)?,
                (None, Some(v)) => RadialFunction::constant(*v),
                (None, None) => equality_field().phi,
            };
            eigen(&cfg, &phi, *count, export.as_deref(), *levels, table.as_deref())?
        }
        Command::Covariance { u, base } => covariance(&cfg, u, *base)?,
        Command::Yamabe { u } => yamabe(&cfg, u)?,
        Command::Gap {
            weyl,
            yamabe,
            curvature,
            estimate_gamma1,
            flat,
        } => {
            cfg.weyl_l2 = *weyl;
            cfg.yamabe = *yamabe;
            cfg.curvature_l2 = *curvature;
            if *estimate_gamma1 {
                cfg.gamma1_source = Gamma1Source::Estimate;
            }
            if *flat {
                cfg.connection = ConnectionKind::Flat;
            }
            cfg.validate()?;
            let report = gap_report(&cfg)?;
            Document::new("gap", config_json(&cfg)?, serde_json::to_value(report)?)
                .with_suites(run_many(&["gap"], &cfg)?)
        }
        Command::Thresholds { kappa, yamabe, gamma1 } => thresholds(&cfg, *kappa, *yamabe, *gamma1)?,
        Command::FlowCheck { energy } => {
            let e = match energy {
                Some(e) => *e,
                None => ym_energy(cfg.build_connection().as_ref(), &cfg.grid.radial()?)?.value,
            };
            let check = flow_check(e).map_err(|e| Error::Config(e.to_string()))?;
            Document::new("flow-check", config_json(&cfg)?, serde_json::to_value(check)?)
        }
        Command::All => Document::new("all", config_json(&cfg)?, json!({})).with_suites(run_all(&cfg)?),
    };
    emit(doc, c)
}

fn emit(mut doc: Document, c: &Common) -> Result<bool> {
    if !c.timings {
        doc.strip_timings();
    }
    let format = match c.format {
        OutFormat::Json => Format::Json,
        OutFormat::Csv => Format::Csv,
        OutFormat::Text => Format::Text,
    };
    let text = render(&doc, format)?;
    match &c.out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(doc.passed)
}

fn config_json(cfg: &GapConfig) -> Result<Value> {
    Ok(serde_json::to_value(cfg)?)
}

fn constants(cfg: &GapConfig, estimate: bool) -> Result<Document> {
    let mut results = json!({
        "gamma0_su2": GAMMA0_SU2,
        "gamma0_so3": GAMMA0_SO3,
        "gamma1_su2": GAMMA1_SU2,
        "gamma1_so3": GAMMA1_SO3,
        "sharp_weyl_constant": SHARP_WEYL_CONSTANT,
        "instanton_energy": INSTANTON_ENERGY,
        "round_yamabe_invariant": round_yamabe_invariant(),
    });
    if !estimate {
        return Ok(Document::new("constants", config_json(cfg)?, results));
    }
    let settings = GammaSettings {
        seed: cfg.seed,
        ..GammaSettings::default()
    };
    let mut est = serde_json::Map::new();
    for (name, alg) in [
        ("su2", AlgebraSpec::su2_real()),
        ("so3", AlgebraSpec::so3_block()),
        ("so4", AlgebraSpec::so(4)),
    ] {
        let g0 = gamma0_estimate(&alg, &settings)?;
        let g1 = gamma1_estimate(&alg, &settings)?;
        est.insert(
            name.into(),
            json!({
                "gamma0": g0.value,
                "gamma0_certificate": g0.certificate,
                "gamma1": g1.value,
                "gamma1_certificate": g1.certificate,
            }),
        );
    }
    results["estimates"] = Value::Object(est);
    let suites = run_many(&["gamma-constants", "bracket-sharpness", "weyl-bound", "circ-basis"], cfg)?;
    Ok(Document::new("constants", config_json(cfg)?, results).with_suites(suites))
}

fn energy(cfg: &GapConfig, levels: usize, table: Option<&Path>) -> Result<Document> {
    let conn = cfg.build_connection();
    let grid = cfg.grid.radial()?;
    let sd = sd_integrals(conn.as_ref(), &grid, Default::default())?;
    let cw = chern_weil_kappa(conn.as_ref(), &grid, Orientation::Standard)?;
    let mut results = json!({
        "group": cfg.group.label(),
        "energy": sd.energy(),
        "self_dual_sq": sd.plus_sq,
        "anti_self_dual_sq": sd.minus_sq,
        "self_dual_l2": sd.plus_sq.max(0.0).sqrt(),
        "anti_self_dual_l2": sd.minus_sq.max(0.0).sqrt(),
        "tail": sd.tail,
        "kappa": cw.kappa,
        "abs_kappa": cw.abs_kappa,
        "warnings": sd.warning.iter().chain(cw.warning.iter()).collect::<Vec<_>>(),
    });
    if levels > 0 {
        let rows = energy_convergence(conn.as_ref(), &grid, levels)?;
        if let Some(p) = table {
            write_rows(p, &rows)?;
        }
        results["convergence"] = serde_json::to_value(rows)?;
    }
    let suites = run_many(&["energy", "chern-weil"], cfg)?;
    Ok(Document::new("energy", config_json(cfg)?, results).with_suites(suites))
}

fn write_rows<T: serde::Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn kato(cfg: &GapConfig, count: usize, dump: Option<&Path>) -> Result<Document> {
    let samples = kato_samples(cfg, count)?;
    if let Some(p) = dump {
        let mut w = csv::Writer::from_path(p)?;
        w.write_record(["x1", "x2", "x3", "x4", "f_plus_sq", "nabla_f_plus_sq", "d_abs_f_plus_sq", "residual"])?;
        for s in &samples {
            let mut rec: Vec<String> = s.point.iter().map(|v| v.to_string()).collect();
            rec.extend([s.f_plus_sq, s.nabla_f_plus_sq, s.d_abs_f_plus_sq, s.residual].map(|v| v.to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
    }
    let min = samples.iter().map(|s| s.residual).fold(f64::INFINITY, f64::min);
    let results = json!({ "samples": samples.len(), "min_residual": min });
    Ok(Document::new("kato", config_json(cfg)?, results).with_suites(run_many(&["kato"], cfg)?))
}

fn bochner(cfg: &GapConfig, count: usize, step: Option<f64>, dump: Option<&Path>) -> Result<Document> {
    let scheme = match step {
        Some(h) => FdScheme::central(h).map_err(|e| Error::Config(e.to_string()))?,
        None => FdScheme::default(),
    };
    let samples = bochner_samples(cfg, count, &scheme)?;
    if let Some(p) = dump {
        let mut w = csv::Writer::from_path(p)?;
        w.write_record(["x1", "x2", "x3", "x4", "half_laplacian", "nabla_sq", "cubic", "residual"])?;
        for (x, t) in &samples {
            let mut rec: Vec<String> = x.iter().map(|v| v.to_string()).collect();
            rec.extend([t.half_laplacian, t.nabla_sq, t.cubic, t.residual].map(|v| v.to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
    }
    let worst = samples.iter().map(|(_, t)| t.residual.abs()).fold(0.0, f64::max);
    let results = json!({ "samples": samples.len(), "step": scheme.step, "max_abs_residual": worst });
    Ok(Document::new("bochner", config_json(cfg)?, results).with_suites(run_many(&["bochner"], cfg)?))
}

fn eigen(
    cfg: &GapConfig,
    phi: &RadialFunction,
    count: usize,
    export: Option<&Path>,
    levels: usize,
    table: Option<&Path>,
) -> Result<Document> {
    let grid = PolarGrid::new(cfg.grid.polar_nodes)?;
    if let Some(p) = export {
        phi.write_csv(&grid, p)?;
    }
    let prob = SLProblem::round(grid, phi)?;
    let pairs = lowest_eigenpairs(&prob, count.max(1), &EigenSettings::default())?;
    let eigen: Vec<Value> = pairs
        .iter()
        .map(|p| json!({ "value": p.value, "residual": p.residual, "iterations": p.iterations }))
        .collect();
    let mut results = json!({ "nodes": cfg.grid.polar_nodes, "eigenpairs": eigen });
    if levels > 0 {
        let rows = eigen_convergence(phi, cfg.grid.polar_nodes.min(4097), levels, None)?;
        if let Some(p) = table {
            write_rows(p, &rows)?;
        }
        results["convergence"] = serde_json::to_value(rows)?;
    }
    Ok(Document::new("eigen", config_json(cfg)?, results).with_suites(run_many(&["eigenvalue"], cfg)?))
}

fn factor(coeffs: &[f64]) -> Result<RadialFunction> {
    if coeffs.is_empty() {
        return Err(Error::Config("conformal factor needs at least one coefficient".into()));
    }
    Ok(RadialFunction::cosine_series(coeffs.to_vec()))
}

fn covariance(cfg: &GapConfig, u: &[f64], base: Base) -> Result<Document> {
    let u = factor(u)?;
    let field = match base {
        Base::Round => round_field(),
        Base::Equality => equality_field(),
    };
    let check = covariance_check(&u, &field).map_err(|e| Error::Config(e.to_string()))?;
    let results = json!({ "residual": check.residual });
    Ok(Document::new("covariance", config_json(cfg)?, results).with_suites(run_many(&["covariance"], cfg)?))
}

fn yamabe(cfg: &GapConfig, u: &[f64]) -> Result<Document> {
    let q = yamabe_quotient(&factor(u)?).map_err(|e| Error::Config(e.to_string()))?;
    let y = round_yamabe_invariant();
    let results = json!({ "quotient": q, "round_value": y, "excess": q - y });
    Ok(Document::new("yamabe", config_json(cfg)?, results).with_suites(run_many(&["yamabe-quotient"], cfg)?))
}

fn thresholds(cfg: &GapConfig, kappa: f64, yamabe: Option<f64>, gamma1: Option<f64>) -> Result<Document> {
    let y = yamabe.unwrap_or_else(round_yamabe_invariant);
    let g = gamma1.unwrap_or(match cfg.group {
        StructureGroup::So3 => GAMMA1_SO3,
        _ => GAMMA1_SU2,
    });
    let t = corollary_thresholds(&cfg.group, kappa, y, g).map_err(|e| Error::Config(e.to_string()))?;
    let results = json!({
        "group": cfg.group.label(),
        "kappa_abs": kappa,
        "yamabe": y,
        "gamma1": g,
        "thresholds": t,
    });
    Ok(Document::new("thresholds", config_json(cfg)?, results))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn center_needs_four_coordinates() {
        let cli = Cli::try_parse_from(["ymgap", "--center", "1,2", "energy"]).unwrap();
        assert!(matches!(base_config(&cli.common), Err(Error::Config(_))));
    }

    #[test]
    fn scale_must_be_positive() {
        let cli = Cli::try_parse_from(["ymgap", "--lambda", "-1", "gap"]).unwrap();
        assert_eq!(base_config(&cli.common).unwrap_err().exit_code(), 2);
    }
}
