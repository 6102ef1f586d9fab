//! Batch front-end: config parsing, pipeline dispatch and artifact output.

pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::constitutive::{EnergyFamily3D, GrowthReport, StressLaw, ValidationReport};
use crate::energy::energy_report;
use crate::error::{Error, Result};
use crate::fracture::{build_fan, energy_production, slic_classify_1d};
use crate::selfsim::{
    critical_stretch, precursor_shock_necessity_check, shoot_cavity_solution, CavityCondition,
    CavitySolution,
};
use crate::slic::{
    catalogue_verdict, discrepancy_scaling, layer_bounds_ladder, residual_ladder_1d,
    residual_ladder_3d, slic_energy, MollifierSpec, TestField,
};

pub use config::{Material, MaterialSpec, RunConfig};
pub use output::{ArtifactWriter, Cell, Format, Provenance, Row};

/// Exit status: success.
pub const EXIT_OK: i32 = 0;
/// Exit status: malformed config, invalid material, I/O failure.
pub const EXIT_CONFIG: i32 = 1;
/// Exit status: no cavitating solution exists for the requested stretch.
pub const EXIT_NO_SOLUTION: i32 = 2;
/// Exit status: any other numerical failure.
pub const EXIT_NUMERICAL: i32 = 3;

const AFTER_HELP: &str = "\
Artifacts (CSV tables start with a `# cavitas <version> command=... config_sha256=... seed=...` line, then a header row):
  validate-material  material.json; samples.csv: a, b, P, Phi111
  solve-cavity       solution.csv: s, phi, v, a, b, Q; junction.json
                     (no_solution.json on exit 2)
  sweep-lambda       sweep.csv: lambda, solvable, phi0, sigma, a_minus, root_count; critical.json
  energy-report      energy.csv: t, rho, delta_closed, delta_quadrature, shock_production, relative_discrepancy;
                     energy.json
  fracture           fan.json; profile.csv: xi, Y, dY
  slic-check         slic_check.csv: field, n, action; slic_check.json
  slic-energy        slic_energy.csv: n, energy; slic_energy.json
With --format json every table is written as <name>.json with one object per row.

Exit codes: 0 success, 1 config or validation error, 2 no cavitating solution, 3 other numerical failure.
Environment: CAVITAS_THREADS caps the worker pool.";

#[derive(Debug, Parser)]
#[command(name = "cavitas", version, about = "Self-similar cavitation, energy audit and slic verification", after_help = AFTER_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Table format.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Check the material hypotheses and sample P and Φ111.
    ValidateMaterial,
    /// Shoot the cavitating solution at `lambda`.
    SolveCavity,
    /// Solve over `lambdas`; bisect the critical stretch on `lambda_bracket`.
    SweepLambda,
    /// Energy audit of the cavitating solution at each of `t_values`.
    EnergyReport,
    /// Build the 1-d fracture fan for (`lambda`, `alpha`).
    Fracture,
    /// Mollified-residual ladders on the test-field catalogue.
    SlicCheck,
    /// Mollified energies and their limit.
    SlicEnergy,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::ValidateMaterial => "validate-material",
            Command::SolveCavity => "solve-cavity",
            Command::SweepLambda => "sweep-lambda",
            Command::EnergyReport => "energy-report",
            Command::Fracture => "fracture",
            Command::SlicCheck => "slic-check",
            Command::SlicEnergy => "slic-energy",
        }
    }
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NoCavitatingSolution { .. } => EXIT_NO_SOLUTION,
        Error::Config { .. } | Error::Constitutive(_) | Error::Io(_) | Error::Json(_) => {
            EXIT_CONFIG
        }
        _ => EXIT_NUMERICAL,
    }
}

/// Parse `argv` and run; returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return exit_code(&e);
    }
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("CAVITAS_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config {
            key: "CAVITAS_THREADS".into(),
            msg: format!("expected a positive integer, got `{raw}`"),
        })?;
    // A second initialisation in the same process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

/// Run a parsed command line; returns the exit code on completed runs
/// (including the scientific negative of exit 2).
pub fn run(cli: &Cli) -> Result<i32> {
    let path = cli.config.as_ref().ok_or_else(|| Error::Config {
        key: "--config".into(),
        msg: "a config file is required".into(),
    })?;
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
        key: "--config".into(),
        msg: format!("cannot read {}: {e}", path.display()),
    })?;
    let cfg = RunConfig::from_json(&text)?;
    let prov = Provenance::new(cli.command.name(), &text, cli.seed);
    let mut out = ArtifactWriter::new(&cli.out, cli.format, prov)?;
    let code = match cli.command {
        Command::ValidateMaterial => validate_material(&cfg, cli.seed, &mut out)?,
        Command::SolveCavity => solve_cavity(&cfg, &mut out)?,
        Command::SweepLambda => sweep_lambda(&cfg, &mut out)?,
        Command::EnergyReport => energy(&cfg, &mut out)?,
        Command::Fracture => fracture(&cfg, &mut out)?,
        Command::SlicCheck => slic_check(&cfg, &mut out)?,
        Command::SlicEnergy => slic_energy_cmd(&cfg, &mut out)?,
    };
    for p in out.written() {
        println!("wrote {}", p.display());
    }
    Ok(code)
}

#[derive(Serialize)]
struct MaterialArtifact {
    material: serde_json::Value,
    validation: Option<ValidationReport>,
    growth: GrowthReport,
    predicts_slic: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    stress_free_volume: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<SampleSummary>,
}

#[derive(Serialize)]
struct SampleSummary {
    count: usize,
    min_p: f64,
    max_phi111: f64,
    p_violations: usize,
    phi111_violations: usize,
}

fn validate_material(cfg: &RunConfig, seed: u64, out: &mut ArtifactWriter) -> Result<i32> {
    let art = match cfg.material()? {
        Material::Radial(fam) => {
            let n = cfg.samples.unwrap_or(10_000);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (lo, hi) = (0.1f64.ln(), 10f64.ln());
            let mut rows: Vec<Row> = Vec::with_capacity(n);
            let mut s = SampleSummary {
                count: n,
                min_p: f64::INFINITY,
                max_phi111: f64::NEG_INFINITY,
                p_violations: 0,
                phi111_violations: 0,
            };
            for _ in 0..n {
                let a = rng.gen_range(lo..hi).exp();
                let b = rng.gen_range(lo..hi).exp();
                let p = fam.p_coefficient(a, b)?;
                let d3 = fam.phi_partials(a, b)?.phi111;
                s.min_p = s.min_p.min(p);
                s.max_phi111 = s.max_phi111.max(d3);
                s.p_violations += usize::from(!(p > 1.0));
                s.phi111_violations += usize::from(!(d3 < 0.0));
                rows.push(vec![a.into(), b.into(), p.into(), d3.into()]);
            }
            out.table("samples", &["a", "b", "P", "Phi111"], &rows)?;
            let mut validation = fam.validate();
            if s.p_violations + s.phi111_violations > 0 {
                validation.valid = false;
            }
            MaterialArtifact {
                material: serde_json::to_value(fam)?,
                predicts_slic: fam.growth().predicts_slic(),
                growth: fam.growth(),
                validation: Some(validation),
                stress_free_volume: Some(fam.cavity_pressure_root()?),
                samples: Some(s),
            }
        }
        Material::Line(law) => MaterialArtifact {
            material: match &law {
                StressLaw::Family(f) => serde_json::to_value(f)?,
                StressLaw::Raw(_) => law.label().into(),
            },
            validation: match &law {
                StressLaw::Family(f) => Some(f.validate()),
                StressLaw::Raw(_) => None,
            },
            predicts_slic: law.growth().predicts_slic(),
            growth: law.growth(),
            stress_free_volume: None,
            samples: None,
        },
    };
    out.json("material", &art)?;
    let valid = art.validation.as_ref().is_none_or(|v| v.valid);
    println!(
        "material {}: {}",
        art.material,
        if valid { "valid" } else { "INVALID" }
    );
    Ok(if valid { EXIT_OK } else { EXIT_CONFIG })
}

fn solve(
    cfg: &RunConfig,
    fam: &EnergyFamily3D,
    lambda: f64,
    out: &mut ArtifactWriter,
) -> Result<Option<CavitySolution>> {
    match shoot_cavity_solution(fam, lambda, cfg.cavity.into(), &cfg.solver_controls()) {
        Ok(sol) => Ok(Some(sol)),
        Err(Error::NoCavitatingSolution {
            lambda,
            reason,
            phi_lo,
            phi_hi,
        }) => {
            out.json(
                "no_solution",
                &json!({
                    "lambda": lambda,
                    "reason": reason,
                    "failed_bracket": {"phi_lo": phi_lo, "phi_hi": phi_hi},
                }),
            )?;
            eprintln!("no cavitating solution for lambda = {lambda} ({reason}) on phi0 bracket [{phi_lo}, {phi_hi}]");
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn solve_cavity(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<i32> {
    let fam = cfg.radial_material()?;
    let lambda = cfg.require_lambda()?;
    let Some(sol) = solve(cfg, &fam, lambda, out)? else {
        return Ok(EXIT_NO_SOLUTION);
    };
    let rows: Vec<Row> = sol
        .trajectory
        .grid(4)
        .iter()
        .map(|p| {
            vec![
                p.s.into(),
                p.phi.into(),
                p.v.into(),
                p.a.into(),
                p.b.into(),
                p.q.into(),
            ]
        })
        .collect();
    out.table("solution", &["s", "phi", "v", "a", "b", "Q"], &rows)?;
    let necessity = precursor_shock_necessity_check(&sol, cfg.solver_controls().jump_margin)?;
    let j = &sol.junction;
    out.json(
        "junction",
        &json!({
            "sigma": j.sigma,
            "a_minus": j.a_minus,
            "lambda": j.lambda,
            "lax_ok": j.lax_ok,
            "rh_residual": j.rh_residual,
            "velocity_behind": j.velocity_behind(),
            "phi0": sol.phi0,
            "v0": sol.v0,
            "root_count": sol.root_count,
            "stop_reason": sol.trajectory.stop_reason,
            "shock_necessity": necessity,
        }),
    )?;
    println!(
        "lambda = {lambda}: phi0 = {:.10}, sigma = {:.10}, a- = {:.10}, lax {}",
        sol.phi0, j.sigma, j.a_minus, j.lax_ok
    );
    Ok(EXIT_OK)
}

fn sweep_lambda(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<i32> {
    let fam = cfg.radial_material()?;
    let cond: CavityCondition = cfg.cavity.into();
    let ctrl = cfg.solver_controls();
    let lambdas = cfg.lambdas.clone().unwrap_or_default();
    if lambdas.is_empty() && cfg.lambda_bracket.is_none() {
        return Err(Error::Config {
            key: "lambdas".into(),
            msg: "sweep-lambda needs `lambdas` or `lambda_bracket`".into(),
        });
    }
    let results: Vec<Option<CavitySolution>> = lambdas
        .par_iter()
        .map(|&l| match shoot_cavity_solution(&fam, l, cond, &ctrl) {
            Ok(s) => Ok(Some(s)),
            Err(Error::NoCavitatingSolution { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    let rows: Vec<Row> = lambdas
        .iter()
        .zip(&results)
        .map(|(&l, r)| match r {
            Some(s) => vec![
                l.into(),
                1u32.into(),
                s.phi0.into(),
                s.sigma().into(),
                s.junction.a_minus.into(),
                s.root_count.into(),
            ],
            None => vec![
                l.into(),
                0u32.into(),
                f64::NAN.into(),
                f64::NAN.into(),
                f64::NAN.into(),
                0usize.into(),
            ],
        })
        .collect();
    if !rows.is_empty() {
        out.table(
            "sweep",
            &[
                "lambda",
                "solvable",
                "phi0",
                "sigma",
                "a_minus",
                "root_count",
            ],
            &rows,
        )?;
    }
    for (l, r) in lambdas.iter().zip(&results) {
        println!(
            "lambda {l:>10}: {}",
            r.as_ref().map_or("no solution".to_string(), |s| format!(
                "sigma = {:.8}",
                s.sigma()
            ))
        );
    }
    if let Some([lo, hi]) = cfg.lambda_bracket {
        let crit = critical_stretch(&fam, (lo, hi), cfg.lambda_tol.unwrap_or(1e-2), cond, &ctrl)?;
        out.json(
            "critical",
            &json!({
                "lower": crit.lower,
                "upper": crit.upper,
                "width": crit.width(),
                "monotone": crit.is_monotone(),
                "probes": crit.probes.iter().map(|&(l, ok)| json!({"lambda": l, "solvable": ok})).collect::<Vec<_>>(),
            }),
        )?;
        println!("critical stretch in ({}, {}]", crit.lower, crit.upper);
    }
    Ok(EXIT_OK)
}

fn energy(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<i32> {
    let fam = cfg.radial_material()?;
    let lambda = cfg.require_lambda()?;
    let Some(sol) = solve(cfg, &fam, lambda, out)? else {
        return Ok(EXIT_NO_SOLUTION);
    };
    let times = cfg.t_values.clone().unwrap_or_else(|| vec![cfg.time()]);
    let quad = cfg.quadrature();
    let reports = times
        .par_iter()
        .map(|&t| energy_report(&sol, t, cfg.rho.unwrap_or(2.0 * sol.sigma() * t), &quad))
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<Row> = reports
        .iter()
        .map(|r| {
            vec![
                r.t.into(),
                r.rho.into(),
                r.delta_closed.into(),
                r.delta_quadrature.into(),
                r.shock_production.into(),
                r.relative_discrepancy().into(),
            ]
        })
        .collect();
    out.table(
        "energy",
        &[
            "t",
            "rho",
            "delta_closed",
            "delta_quadrature",
            "shock_production",
            "relative_discrepancy",
        ],
        &rows,
    )?;
    out.json(
        "energy",
        &json!({"lambda": lambda, "sigma": sol.sigma(), "phi0": sol.phi0, "reports": reports}),
    )?;
    for r in &reports {
        println!(
            "t = {}: delta = {:.10e} (quadrature {:.10e}), shock production {:.6e}",
            r.t, r.delta_closed, r.delta_quadrature, r.shock_production
        );
    }
    Ok(if reports.iter().all(|r| r.entropy_sign_ok) {
        EXIT_OK
    } else {
        EXIT_NUMERICAL
    })
}

fn fracture(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<i32> {
    let law = cfg.line_material()?;
    let fan = build_fan(law, cfg.require_lambda()?, cfg.require_alpha()?)?;
    let prod = energy_production(&fan)?;
    let span = 2.0 * fan.sigma;
    let rows: Vec<Row> = fan
        .profile_samples(-span, span, cfg.samples.unwrap_or(401))
        .iter()
        .map(|p| p.iter().map(|&x| Cell::from(x)).collect())
        .collect();
    out.table("profile", &["xi", "Y", "dY"], &rows)?;
    out.json(
        "fan",
        &json!({
            "material": fan.material,
            "lambda": fan.lambda,
            "alpha": fan.alpha,
            "sigma": fan.sigma,
            "Y0": fan.y0,
            "T": prod.total,
            "lax_ok": fan.lax_ok,
            "rh_residual": fan.rh_residual(),
            "energy_production": prod,
            "slic_class": slic_classify_1d(&fan.law),
        }),
    )?;
    println!(
        "sigma = {:.10}, Y0 = {:.10}, T = {}",
        fan.sigma, fan.y0, prod.total
    );
    Ok(EXIT_OK)
}

fn slic_check(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<i32> {
    let m = MollifierSpec::standard();
    let ladder = cfg.ladder();
    let quad = cfg.quadrature();
    let (reports, extra) = match cfg.material()? {
        Material::Radial(fam) => {
            let lambda = cfg.require_lambda()?;
            let Some(sol) = solve(cfg, &fam, lambda, out)? else {
                return Ok(EXIT_NO_SOLUTION);
            };
            let fields = cfg.fields(&TestField::radial_catalogue());
            let reports = fields
                .iter()
                .map(|f| residual_ladder_3d(&sol, m, &ladder, f, &quad))
                .collect::<Result<Vec<_>>>()?;
            let discrepancy = fields
                .iter()
                .map(|f| discrepancy_scaling(&sol, m, &ladder, f, &quad))
                .collect::<Result<Vec<_>>>()?;
            let layer = layer_bounds_ladder(&sol, m, &ladder, cfg.time())?;
            (
                reports,
                json!({"lambda": lambda, "sigma": sol.sigma(), "discrepancy": discrepancy, "layer_bounds": layer}),
            )
        }
        Material::Line(law) => {
            let fan = build_fan(law, cfg.require_lambda()?, cfg.require_alpha()?)?;
            let reports = cfg
                .fields(&TestField::line_catalogue())
                .iter()
                .map(|f| residual_ladder_1d(&fan, m, &ladder, f, &quad))
                .collect::<Result<Vec<_>>>()?;
            (
                reports,
                json!({"lambda": fan.lambda, "alpha": fan.alpha, "sigma": fan.sigma}),
            )
        }
    };
    if reports.is_empty() {
        return Err(Error::Config {
            key: "test_fields".into(),
            msg: "no test field of the selected catalogue matches".into(),
        });
    }
    let rows: Vec<Row> = reports
        .iter()
        .flat_map(|r| {
            r.n_values
                .iter()
                .zip(&r.actions)
                .map(|(&n, &a)| vec![r.field.name.into(), n.into(), a.into()])
        })
        .collect();
    out.table("slic_check", &["field", "n", "action"], &rows)?;
    let verdict = catalogue_verdict(&reports);
    out.json(
        "slic_check",
        &json!({
            "verdict": verdict,
            "theory_verdict": reports[0].theory_verdict,
            "reports": reports,
            "details": extra,
        }),
    )?;
    for r in &reports {
        println!(
            "{:>10}: rate {:?}, {:?}",
            r.field.name, r.fitted_rate, r.verdict
        );
    }
    println!(
        "verdict {verdict:?} (theory {:?})",
        reports[0].theory_verdict
    );
    Ok(EXIT_OK)
}

fn slic_energy_cmd(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<i32> {
    let fam = cfg.radial_material()?;
    let lambda = cfg.require_lambda()?;
    let Some(sol) = solve(cfg, &fam, lambda, out)? else {
        return Ok(EXIT_NO_SOLUTION);
    };
    let t = cfg.time();
    let rho = cfg.rho.unwrap_or(sol.sigma() * t + 1.0);
    let ladder = cfg.ladder();
    let rep = slic_energy(
        &sol,
        MollifierSpec::standard(),
        &ladder,
        t,
        rho,
        false,
        &cfg.quadrature(),
    )?;
    let rows: Vec<Row> = rep
        .n_values
        .iter()
        .zip(&rep.energies)
        .map(|(&n, &e)| vec![n.into(), e.into()])
        .collect();
    out.table("slic_energy", &["n", "energy"], &rows)?;
    out.json(
        "slic_energy",
        &json!({"lambda": lambda, "p_wf_positive": rep.p_wf_positive(), "report": rep}),
    )?;
    match (rep.extrapolated, rep.target) {
        (Some(e), Some(target)) => println!("limit {e:.10} vs target {target:.10}"),
        _ => println!(
            "energies diverge at rate n^{:.3}",
            rep.divergence_rate.unwrap_or(f64::NAN)
        ),
    }
    Ok(EXIT_OK)
}
