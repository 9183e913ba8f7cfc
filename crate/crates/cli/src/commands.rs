//! Subcommand implementations. Every command prints one machine-readable
//! JSON summary on standard output and writes its artifacts atomically
//! under the output directory.

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use serde_json::json;

use gpfield_core::conservation::{drift_report, max_rel_drift};
use gpfield_core::field::Field;
use gpfield_core::forcing::{frequency_split, split_forcing};
use gpfield_core::nonlinearity::{
    check_ff01, check_halpha1prime, check_halpha2, check_hf, max_admissible_dimension,
    HypothesisReport,
};
use gpfield_core::norms::{h1_norm, l2_norm, lp_norm};
use gpfield_core::propagator::strichartz_ratio;
use gpfield_core::rng::{seeded_random_field, SpectrumKind};
use gpfield_core::snapshot::{read_snapshot, slice_csv, write_atomic, write_snapshot};
use gpfield_core::solver::{convergence_order, evolve, picard_solve, Trajectory};

use crate::config::{OutputFormat, RunConfig};

/// Whether a completed command's checks all passed (exit 0) or not (exit 1).
pub enum Outcome {
    Pass,
    CheckFailed,
}

pub struct Ctx {
    pub config: RunConfig,
    pub out_dir: PathBuf,
    pub seed: u64,
}

impl Ctx {
    pub fn new(
        config: RunConfig,
        out_override: Option<PathBuf>,
        seed_override: Option<u64>,
    ) -> Ctx {
        let out_dir = out_override.unwrap_or_else(|| PathBuf::from(&config.output.directory));
        let seed = seed_override.unwrap_or(config.seed);
        Ctx {
            config,
            out_dir,
            seed,
        }
    }

    fn wants(&self, format: OutputFormat) -> bool {
        self.config.output.formats.contains(&format)
    }

    fn artifact(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    fn write_json<T: Serialize>(
        &self,
        name: &str,
        value: &T,
        artifacts: &mut Vec<String>,
    ) -> anyhow::Result<()> {
        if self.wants(OutputFormat::Json) {
            let path = self.artifact(name);
            let bytes = serde_json::to_vec_pretty(value)?;
            write_atomic(&path, &bytes)?;
            artifacts.push(path.display().to_string());
        }
        Ok(())
    }

    fn write_csv(&self, name: &str, text: &str, artifacts: &mut Vec<String>) -> anyhow::Result<()> {
        if self.wants(OutputFormat::Csv) {
            let path = self.artifact(name);
            write_atomic(&path, text.as_bytes())?;
            artifacts.push(path.display().to_string());
        }
        Ok(())
    }
}

fn emit(summary: &serde_json::Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(summary).expect("serializable summary")
    );
}

fn fmt(v: f64) -> String {
    format!("{v:.17e}")
}

/// Certify the configured nonlinearity: the defocusing check, both growth
/// certifiers at the configured exponent, and the admissible simulation
/// dimensions.
pub fn check_hypotheses(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let nl = ctx.config.build_nonlinearity()?;
    let mut reports: Vec<HypothesisReport> = vec![check_hf(&nl, 1e-9)?];
    let alpha1 = ctx.config.nonlinearity.alpha1();
    let mut admissible = None;
    if let Some(alpha1) = alpha1 {
        reports.push(check_halpha1prime(&nl, alpha1, 1e6, 400)?);
        reports.push(check_ff01(&nl, alpha1, 400)?);
        if let Some(alpha2) = ctx.config.nonlinearity.alpha2() {
            reports.push(check_halpha2(&nl, alpha1, alpha2, 1e6, 400)?);
        }
        admissible = Some(max_admissible_dimension(alpha1)?);
    }
    let passed = reports.iter().all(|r| r.passed);

    let mut artifacts = Vec::new();
    ctx.write_json("hypotheses.json", &reports, &mut artifacts)?;
    let summary = json!({
        "subcommand": "check-hypotheses",
        "passed": passed,
        "rho0": ctx.config.nonlinearity.rho0(),
        "alpha1": alpha1,
        "admissible_dimensions": admissible,
        "reports": reports,
        "artifacts": artifacts,
    });
    emit(&summary);
    Ok(if passed {
        Outcome::Pass
    } else {
        Outcome::CheckFailed
    })
}

fn run_csv(traj: &Trajectory) -> String {
    let mut out = String::from("t,energy,mass,h1_w\n");
    for (step, ((e, m), h)) in traj
        .energy_series
        .iter()
        .zip(&traj.mass_series)
        .zip(&traj.h1_series)
        .enumerate()
    {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt(step as f64 * traj.dt),
            fmt(*e),
            fmt(*m),
            fmt(*h)
        ));
    }
    out
}

fn drift_csv(report: &gpfield_core::conservation::EnergyReport) -> String {
    let mut out = String::from("t,energy,rel_drift,mass\n");
    let denom = report.e0.abs().max(report.floor);
    for ((t, e), m) in report
        .times
        .iter()
        .zip(&report.series)
        .zip(&report.mass_series)
    {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt(*t),
            fmt(*e),
            fmt((e - report.e0).abs() / denom),
            fmt(*m)
        ));
    }
    out
}

fn write_trajectory_artifacts(
    ctx: &Ctx,
    traj: &Trajectory,
    rho0: f64,
    artifacts: &mut Vec<String>,
) -> anyhow::Result<()> {
    if ctx.wants(OutputFormat::Snapshots) {
        for (t, w) in traj.times.iter().zip(&traj.w_fields) {
            let step = (t / traj.dt).round() as usize;
            let path = ctx.artifact(&format!("w_{step:08}.gpf"));
            write_snapshot(&path, w, rho0, *t)?;
            artifacts.push(path.display().to_string());
        }
    }
    if ctx.wants(OutputFormat::Csv) && ctx.config.grid.dim >= 1 {
        let final_slice = slice_csv(traj.final_w(), 0)?;
        ctx.write_csv("final_slice.csv", &final_slice, artifacts)?;
    }
    Ok(())
}

/// Evolve the configured initial perturbation with the split-step scheme
/// and report conservation diagnostics.
pub fn evolve_cmd(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let grid = ctx.config.build_grid()?;
    let bg = ctx.config.build_background(&grid)?;
    let nl = ctx.config.build_nonlinearity()?;
    let w0 = ctx.config.build_perturbation(&grid, ctx.seed)?;
    let solver = ctx.config.solver_config()?;
    let traj = evolve(&w0, &bg, &nl, &solver)?;

    let report = drift_report(&traj, &bg, &nl)?;
    let step_drift = max_rel_drift(&traj.energy_series);
    let m0 = traj.mass_series[0];
    let mass_drift = traj
        .mass_series
        .iter()
        .map(|m| (m - m0).abs())
        .fold(0.0, f64::max);

    let mut artifacts = Vec::new();
    ctx.write_csv("run.csv", &run_csv(&traj), &mut artifacts)?;
    ctx.write_csv("drift.csv", &drift_csv(&report), &mut artifacts)?;
    ctx.write_json("drift.json", &report, &mut artifacts)?;
    write_trajectory_artifacts(ctx, &traj, bg.rho0(), &mut artifacts)?;

    let summary = json!({
        "subcommand": "evolve",
        "steps": traj.energy_series.len() - 1,
        "dt": traj.dt,
        "t_final": solver.t_final,
        "initial_energy": report.e0,
        "max_rel_drift": step_drift,
        "snapshot_rel_drift": report.max_rel_drift,
        "max_mass_drift": mass_drift,
        "final_h1": traj.h1_series.last(),
        "xt_norm": traj.xt_norm,
        "artifacts": artifacts,
    });
    emit(&summary);
    Ok(Outcome::Pass)
}

/// Solve the integral equation by fixed-point iteration and report the
/// contraction factors.
pub fn picard_cmd(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let grid = ctx.config.build_grid()?;
    let bg = ctx.config.build_background(&grid)?;
    let nl = ctx.config.build_nonlinearity()?;
    let w0 = ctx.config.build_perturbation(&grid, ctx.seed)?;
    let solver = ctx.config.solver_config()?;
    let traj = picard_solve(&w0, &bg, &nl, &solver)?;

    let report = drift_report(&traj, &bg, &nl)?;
    let diffs = traj.picard_diffs.clone().unwrap_or_default();
    let factors: Vec<f64> = diffs.windows(2).map(|w| w[1] / w[0]).collect();

    let mut artifacts = Vec::new();
    ctx.write_csv("run.csv", &run_csv(&traj), &mut artifacts)?;
    ctx.write_json(
        "contraction.json",
        &json!({"diffs": diffs, "factors": factors}),
        &mut artifacts,
    )?;
    ctx.write_json("drift.json", &report, &mut artifacts)?;
    if ctx.wants(OutputFormat::Snapshots) {
        let path = ctx.artifact("w_final.gpf");
        write_snapshot(&path, traj.final_w(), bg.rho0(), solver.t_final)?;
        artifacts.push(path.display().to_string());
    }

    let summary = json!({
        "subcommand": "picard",
        "steps": traj.times.len() - 1,
        "dt": traj.dt,
        "iterations": diffs.len(),
        "contraction_factors": factors,
        "max_rel_drift": report.max_rel_drift,
        "final_h1": traj.h1_series.last(),
        "xt_norm": traj.xt_norm,
        "artifacts": artifacts,
    });
    emit(&summary);
    Ok(Outcome::Pass)
}

/// Empirical dispersive-estimate probe over seeded random data.
pub fn strichartz_cmd(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let section = ctx
        .config
        .strichartz
        .as_ref()
        .context("config has no [strichartz] section")?;
    let grid = ctx.config.build_grid()?;
    let pair = ctx.config.admissible_pair()?;
    let report = strichartz_ratio(
        &grid,
        ctx.seed,
        &pair,
        section.t,
        section.steps,
        section.num_fields,
        section.spectrum,
    )?;
    let mut artifacts = Vec::new();
    ctx.write_json("strichartz.json", &report, &mut artifacts)?;
    let summary = json!({
        "subcommand": "strichartz",
        "report": report,
        "artifacts": artifacts,
    });
    emit(&summary);
    Ok(Outcome::Pass)
}

/// Reconstruction residual gate for the decomposition identities.
const RECONSTRUCTION_GATE: f64 = 1e-12;

/// Run the splitting identities over seeded random perturbations on the
/// configured lattice and report the worst residuals.
pub fn decompose_test_cmd(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let grid = ctx.config.build_grid()?;
    let bg = ctx.config.build_background(&grid)?;
    let nl = ctx.config.build_nonlinearity()?;

    let cases = 100usize;
    let mut worst_forcing = 0.0f64;
    let mut worst_frequency = 0.0f64;
    let mut worst_lipschitz: f64 = 0.0;
    let mut prev_w: Option<Field> = None;
    for i in 0..cases {
        let w = seeded_random_field(
            &grid,
            ctx.seed.wrapping_add(i as u64),
            SpectrumKind::SobolevDecay,
        );
        let split = split_forcing(&w, &bg, &nl)?;
        let recon = split.f1.add(&split.f2)?;
        let scale = lp_norm(&split.whole, f64::INFINITY).max(1.0);
        worst_forcing = worst_forcing.max(recon.max_abs_diff(&split.whole)? / scale);

        let fs = frequency_split(&w, 1.0)?;
        let recon = fs.low.add(&fs.high)?;
        let scale = lp_norm(&w, f64::INFINITY).max(1.0);
        worst_frequency = worst_frequency.max(recon.max_abs_diff(&w)? / scale);

        if let Some(prev) = prev_w {
            let d_h1 = h1_norm(&w.sub(&prev)?);
            if d_h1 > 0.0 {
                let s1 = split_forcing(&w, &bg, &nl)?.f1;
                let s2 = split_forcing(&prev, &bg, &nl)?.f1;
                worst_lipschitz = worst_lipschitz.max(l2_norm(&s1.sub(&s2)?) / d_h1);
            }
        }
        prev_w = Some(w);
    }
    let passed = worst_forcing <= RECONSTRUCTION_GATE && worst_frequency <= RECONSTRUCTION_GATE;

    let report = json!({
        "cases": cases,
        "forcing_reconstruction_max": worst_forcing,
        "frequency_reconstruction_max": worst_frequency,
        "lipschitz_max_ratio": worst_lipschitz,
        "gate": RECONSTRUCTION_GATE,
        "passed": passed,
    });
    let mut artifacts = Vec::new();
    ctx.write_json("decompose.json", &report, &mut artifacts)?;
    let summary = json!({
        "subcommand": "decompose-test",
        "passed": passed,
        "cases": cases,
        "forcing_reconstruction_max": worst_forcing,
        "frequency_reconstruction_max": worst_frequency,
        "lipschitz_max_ratio": worst_lipschitz,
        "artifacts": artifacts,
    });
    emit(&summary);
    Ok(if passed {
        Outcome::Pass
    } else {
        Outcome::CheckFailed
    })
}

/// Energy/mass of a single snapshot file, interpreted as a perturbation w
/// on the configured background.
pub fn energy_cmd(ctx: &Ctx, snapshot_path: &Path) -> anyhow::Result<Outcome> {
    let snap = read_snapshot(snapshot_path)?;
    let grid = ctx.config.build_grid()?;
    if !grid.same_lattice(snap.field.grid()) {
        anyhow::bail!(
            "snapshot lattice {:?} does not match the configured grid {:?}",
            snap.field.grid().summary(),
            grid.summary()
        );
    }
    let bg = ctx.config.build_background(&grid)?;
    let nl = ctx.config.build_nonlinearity()?;
    let w = Field::from_values(&grid, snap.field.values().to_vec())?;
    let e = gpfield_core::conservation::energy(&w, &bg, &nl)?;
    let u = bg.phi().add(&w)?;
    let mass = gpfield_core::conservation::renormalized_mass(&u, bg.rho0());
    let summary = json!({
        "subcommand": "energy",
        "snapshot": snapshot_path.display().to_string(),
        "time": snap.time,
        "energy": e,
        "renormalized_mass": mass,
        "h1_norm": h1_norm(&w),
    });
    emit(&summary);
    Ok(Outcome::Pass)
}

/// Time-step refinement study of the split-step scheme.
pub fn convergence_cmd(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let section = ctx
        .config
        .convergence
        .as_ref()
        .context("config has no [convergence] section")?;
    let grid = ctx.config.build_grid()?;
    let bg = ctx.config.build_background(&grid)?;
    let nl = ctx.config.build_nonlinearity()?;
    let w0 = ctx.config.build_perturbation(&grid, ctx.seed)?;
    let report = convergence_order(&w0, &bg, &nl, ctx.config.solver.t_final, &section.dt_list)?;
    let mut artifacts = Vec::new();
    ctx.write_json("convergence.json", &report, &mut artifacts)?;
    let summary = json!({
        "subcommand": "convergence",
        "fitted_order": report.fitted_order,
        "exact": report.exact,
        "errors": report.errors,
        "artifacts": artifacts,
    });
    emit(&summary);
    Ok(Outcome::Pass)
}
