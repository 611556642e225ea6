//! Run orchestration: simulate, re-render reports, sweeps.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::diagnostics::bounds::{bound_suite, BoundReport, RunContext};
use crate::diagnostics::ladder::{j_ladder, ladder_check, FdCheck, JContext, LadderReport};
use crate::diagnostics::{record, time_average, DiagnosticsError, DiagnosticsRecord};
use crate::field::{FieldError, SpectralVectorField};
use crate::forcing::{grashof, narrowband_force, ForcingError};
use crate::grid::TorusGrid;
use crate::initial::initial_field;
use crate::integrator::{SimState, StepError, Stepper, CFL_NUMBER, CFL_SAFETY};
use crate::io::checkpoint::{Checkpoint, CheckpointError};
use crate::io::config::{ConfigError, RunConfig, Spinup};
use crate::io::csv::{format_value, read_records, write_table, CsvError, RecordWriter, DIAGNOSTICS_FILE};
use crate::model::{check_forcing, ModelError, ModelParams};
use crate::spectral::Spectral;

pub const CHECKPOINT_FILE: &str = "checkpoint.bin";
pub const REPORT_FILE: &str = "report.json";
pub const CONFIG_ECHO: &str = "config.toml";
pub const SWEEP_SUMMARY: &str = "sweep_summary.csv";

/// Steps between CFL re-checks.
pub const CFL_RECHECK_EVERY: u64 = 100;
/// Every this many output samples gets a finite-difference rate check.
pub const FD_EVERY: u64 = 10;
/// Finite-difference sub-step as a fraction of `dt`.
pub const FD_FRACTION: f64 = 0.1;
/// Highest ladder order evaluated.
pub const LADDER_MAX_N: usize = 3;
/// Spinup `auto` = this many large-eddy times `ℓ/U`.
pub const SPINUP_EDDY_TIMES: f64 = 5.0;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Forcing(#[from] ForcingError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Step(#[from] StepError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
    #[error(transparent)]
    Csv(#[from] CsvError),
    #[error("I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("non-finite state at step {step} (t = {t}); last good checkpoint kept at {checkpoint}")]
    NonFinite { step: u64, t: f64, checkpoint: String },
    #[error("CFL limit violated at step {step}: dt = {dt:e} exceeds admissible {admissible:e}; set time.dt below it")]
    CflDrift { step: u64, dt: f64, admissible: f64 },
    #[error("sweep: {0}")]
    Sweep(String),
    #[error("verify: {0}")]
    Verify(String),
}

impl RunError {
    /// Process exit status: 2 for bad input, 3 for a blown-up state, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Forcing(_) | RunError::Sweep(_) => 2,
            RunError::NonFinite { .. } => 3,
            _ => 1,
        }
    }
}

/// Grid, operators, parameters and force for one configuration.
pub struct Setup {
    pub grid: TorusGrid,
    pub spectral: Spectral,
    pub stepper: Stepper,
    pub params: ModelParams,
    pub forcing: SpectralVectorField,
    pub ell: f64,
    pub gr: f64,
}

impl Setup {
    pub fn new(cfg: &RunConfig) -> Result<Self, RunError> {
        cfg.validate()?;
        let grid = cfg.grid();
        let spectral = Spectral::new(grid);
        let spec = cfg.forcing_spec();
        let forcing = narrowband_force(&grid, &spec)?;
        let params = cfg.params();
        let ell = spec.length_scale(&grid);
        let gr = grashof(&forcing, ell, params.nu());
        Ok(Self {
            grid,
            stepper: Stepper::new(spectral.clone()),
            spectral,
            params,
            forcing,
            ell,
            gr,
        })
    }

    pub fn context(&self) -> RunContext {
        RunContext {
            kind: self.params.kind(),
            nu: self.params.nu(),
            alpha: self.params.effective_alpha(),
            length: self.grid.length(),
            k0: self.grid.k0(),
            ell: self.ell,
            gr: self.gr,
        }
    }

    pub fn initial_state(&self, cfg: &RunConfig) -> Result<SimState, RunError> {
        let u0 = initial_field(&self.spectral, cfg.init.kind, cfg.init.amplitude, cfg.forcing.seed);
        Ok(SimState::new(0.0, u0, self.params, self.forcing.clone())?)
    }

    /// Fixed step: at most `CFL_SAFETY` times the CFL step of a velocity
    /// scale that also covers what the forcing will drive from rest.
    pub fn choose_dt(&self, cfg: &RunConfig, state: &SimState) -> Result<f64, RunError> {
        if let Some(dt) = cfg.time.dt {
            return Ok(dt);
        }
        let u_sup = self.spectral.sup_value(&state.u)?;
        let f_sup = self.spectral.sup_value(&self.forcing)?;
        let nu = self.params.nu();
        let driven = (f_sup * self.ell * self.ell / nu).min(3.0 * (f_sup * self.ell).sqrt());
        let floor = 1e-12 * nu / self.grid.length();
        let scale = u_sup.max(driven).max(floor);
        let dt = CFL_SAFETY * CFL_NUMBER * self.grid.spacing() / scale;
        // Round down so a whole number of steps lands on t_end.
        Ok(cfg.time.t_end / (cfg.time.t_end / dt).ceil())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GridInfo {
    pub n: usize,
    #[serde(rename = "L")]
    pub length: f64,
    pub k0: f64,
    pub dealias_cut: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyCheck {
    pub samples: usize,
    /// `max |dE/dt + visc - inj| / max(|terms|)`.
    pub max_rel_residual: f64,
    /// `max |⟨P(a·∇)b, ū⟩| / max(|terms|)`.
    pub max_rel_skew: f64,
}

impl EnergyCheck {
    pub fn from_records(records: &[DiagnosticsRecord]) -> Self {
        let mut res = 0.0f64;
        let mut skew = 0.0f64;
        for r in records {
            let s = r.energy_scale();
            if s > 0.0 {
                res = res.max(r.energy_residual().abs() / s);
                skew = skew.max(r.nonlinear.abs() / s);
            }
        }
        Self {
            samples: records.len(),
            max_rel_residual: res,
            max_rel_skew: skew,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub grid: GridInfo,
    pub model: String,
    pub seed: u64,
    pub ell: f64,
    pub k_f: f64,
    pub gr: f64,
    pub dt: Option<f64>,
    pub steps: Option<u64>,
    pub spinup: f64,
    pub spinup_auto: bool,
    pub rates_source: &'static str,
    pub energy: EnergyCheck,
    pub ladder: Vec<LadderReport>,
    pub bounds: BoundReport,
    pub notices: Vec<String>,
}

/// Per-order finite-difference errors gathered during a run.
#[derive(Debug, Clone, Default)]
pub struct FdStats {
    pub samples: usize,
    pub max_rel_err: Vec<f64>,
}

impl FdStats {
    fn for_ladder(&self, n: usize) -> Option<FdCheck> {
        if self.samples == 0 {
            return None;
        }
        let worst = self.max_rel_err.iter().skip(n).take(2).fold(0.0f64, |a, &b| a.max(b));
        Some(FdCheck {
            samples: self.samples,
            max_rel_err: worst,
        })
    }
}

/// Resolves `spinup = "auto"` to five large-eddy times, at most half the run.
pub fn resolve_spinup(spinup: Spinup, records: &[DiagnosticsRecord], ell: f64, length: f64, notices: &mut Vec<String>) -> f64 {
    match spinup {
        Spinup::Time(t) => t,
        Spinup::Auto => {
            let ts: Vec<f64> = records.iter().map(|r| r.t).collect();
            let h0: Vec<f64> = records.iter().map(|r| r.h[0]).collect();
            let u = time_average(&ts, &h0, f64::NEG_INFINITY)
                .map(|m| (m / length.powi(3)).sqrt())
                .unwrap_or(0.0);
            let t_last = ts.last().copied().unwrap_or(0.0);
            if u <= 0.0 {
                notices.push("spinup auto: zero velocity, no spinup discarded".into());
                return 0.0;
            }
            let s = SPINUP_EDDY_TIMES * ell / u;
            if s > 0.5 * t_last {
                notices.push(format!(
                    "spinup auto: {SPINUP_EDDY_TIMES} eddy times ({s:.4e}) exceed half the run; clamped to {:.4e}",
                    0.5 * t_last
                ));
                0.5 * t_last
            } else {
                s
            }
        }
    }
}

/// Assembles the run report from a recorded series.
pub fn build_report(
    cfg: &RunConfig,
    setup: &Setup,
    records: &[DiagnosticsRecord],
    fd: Option<&FdStats>,
    dt: Option<f64>,
    steps: Option<u64>,
    rates_exact: bool,
) -> Result<RunReport, RunError> {
    let mut notices = Vec::new();
    let ctx = setup.context();
    let spinup = resolve_spinup(cfg.time.spinup, records, setup.ell, setup.grid.length(), &mut notices);
    let bounds = bound_suite(records, &ctx, spinup)?;

    let n_max = cfg.diagnostics.n_max;
    let alpha = ctx.alpha;
    let unforced = setup.forcing.coeff_sum_sq() == 0.0;
    let tau = ctx.tau_or_zero(unforced);
    let mut ladder = Vec::new();
    for n in 0..=LADDER_MAX_N.min(n_max - 2) {
        let mut rep = ladder_check(records, n, cfg.ladder_c_ref(n), alpha, ctx.nu)?;
        if let (Some(tau), true) = (tau, n >= 1) {
            let jctx = JContext {
                tau,
                alpha,
                nu: ctx.nu,
                ell: ctx.ell,
                re: bounds.re,
            };
            let mut ps = vec![1];
            if n > 1 {
                ps.push(n);
            }
            for p in ps {
                rep.j_form.push(j_ladder(records, n, p, &jctx)?);
            }
        }
        rep.fd_check = fd.and_then(|f| f.for_ladder(n));
        ladder.push(rep);
    }
    if tau.is_none() {
        notices.push("J-form ladder skipped: τ undefined for Gr ≤ 1".into());
    }
    if !rates_exact {
        notices.push("rates.csv missing: moment rates rebuilt by finite differences of the CSV".into());
    }

    Ok(RunReport {
        config: cfg.clone(),
        grid: GridInfo {
            n: setup.grid.n(),
            length: setup.grid.length(),
            k0: setup.grid.k0(),
            dealias_cut: setup.grid.dealias_cut(),
        },
        model: setup.params.kind().to_string(),
        seed: cfg.forcing.seed,
        ell: setup.ell,
        k_f: 1.0 / setup.ell,
        gr: setup.gr,
        dt,
        steps,
        spinup,
        spinup_auto: cfg.time.spinup == Spinup::Auto,
        rates_source: if rates_exact { "exact" } else { "finite-difference" },
        energy: EnergyCheck::from_records(records),
        ladder,
        bounds,
        notices,
    })
}

/// `dH̄_N/dt` by a one-sided three-point difference with sub-step `h`.
pub fn fd_rates(stepper: &Stepper, state: &SimState, h: f64, n_max: usize) -> Result<Vec<f64>, RunError> {
    let alpha = state.params.effective_alpha();
    let a2 = alpha * alpha;
    let moments = |s: &SimState| {
        crate::norms::weighted_moments(&s.u, n_max, |k2| (1.0 + a2 * k2).powi(-2)).expect("order checked")
    };
    let mut s = state.clone();
    let m0 = moments(&s);
    stepper.advance(&mut s, h)?;
    let m1 = moments(&s);
    stepper.advance(&mut s, h)?;
    let m2 = moments(&s);
    Ok((0..=n_max).map(|n| (-3.0 * m0[n] + 4.0 * m1[n] - m2[n]) / (2.0 * h)).collect())
}

/// Everything a finished run produced.
pub struct RunOutcome {
    pub report: RunReport,
    pub records: Vec<DiagnosticsRecord>,
    pub state: SimState,
    pub dt: f64,
    pub steps: u64,
}

fn write_report(dir: &Path, report: &RunReport) -> Result<(), RunError> {
    let text = serde_json::to_string_pretty(report)?;
    fs::write(dir.join(REPORT_FILE), text + "\n")?;
    Ok(())
}

/// Runs a configuration to `t_end`, writing CSV, checkpoints and the report
/// into `cfg.paths.outdir`. With `resume`, continues from a checkpoint of
/// the same configuration.
pub fn simulate(cfg: &RunConfig, resume: Option<&Path>) -> Result<RunOutcome, RunError> {
    let setup = Setup::new(cfg)?;
    let outdir = cfg.paths.outdir.clone();
    fs::create_dir_all(&outdir)?;
    fs::write(outdir.join(CONFIG_ECHO), cfg.to_toml())?;

    let (mut state, mut step, dt) = match resume {
        Some(path) => {
            let ck = Checkpoint::load(path)?;
            check_resume(cfg, &ck)?;
            check_forcing(&setup.forcing)?;
            let state = SimState {
                t: ck.t,
                u: ck.u,
                params: setup.params,
                f: setup.forcing.clone(),
            };
            (state, ck.step, ck.dt)
        }
        None => {
            let state = setup.initial_state(cfg)?;
            let dt = setup.choose_dt(cfg, &state)?;
            (state, 0, dt)
        }
    };
    let n_steps = ((cfg.time.t_end / dt) - 1e-9).ceil().max(1.0) as u64;
    let n_max = cfg.diagnostics.n_max;
    let every = cfg.time.output_every as u64;
    let ck_path = outdir.join(CHECKPOINT_FILE);
    let save = |state: &SimState, step: u64| {
        Checkpoint {
            kind: cfg.model.kind,
            nu: cfg.model.nu,
            alpha: cfg.model.alpha,
            t: state.t,
            seed: cfg.forcing.seed,
            dt,
            step,
            u: state.u.clone(),
        }
        .save(&ck_path)
    };

    // Rows written before the checkpoint survive a resume into the same directory.
    let mut records = Vec::new();
    if resume.is_some() && outdir.join(DIAGNOSTICS_FILE).exists() {
        let (prior, _) = read_records(&outdir)?;
        records.extend(prior.into_iter().filter(|r| r.t < state.t));
    }
    let mut writer = RecordWriter::create(&outdir, n_max)?;
    for r in &records {
        writer.write(r)?;
    }
    let mut fd = FdStats {
        samples: 0,
        max_rel_err: vec![0.0; n_max + 1],
    };
    if resume.is_none() {
        save(&state, step)?;
    }
    loop {
        if step % every == 0 || step == n_steps {
            let rec = record(&setup.spectral, &state, n_max)?;
            if (step / every).is_multiple_of(FD_EVERY) && step.is_multiple_of(every) {
                let rates = fd_rates(&setup.stepper, &state, FD_FRACTION * dt, n_max)?;
                for (n, (&exact, &approx)) in rec.dhbar_dt.iter().zip(&rates).enumerate() {
                    let scale = exact.abs().max(approx.abs()).max(2.0 * setup.params.nu() * rec.hbar[(n + 1).min(n_max)]);
                    if scale > 0.0 {
                        fd.max_rel_err[n] = fd.max_rel_err[n].max((exact - approx).abs() / scale);
                    }
                }
                fd.samples += 1;
            }
            writer.write(&rec)?;
            records.push(rec);
        }
        if step >= n_steps {
            break;
        }
        if step % CFL_RECHECK_EVERY == 0 {
            let admissible = setup.stepper.cfl_dt(&state)?;
            if dt > admissible {
                return Err(RunError::CflDrift { step, dt, admissible });
            }
        }
        setup.stepper.advance(&mut state, dt)?;
        step += 1;
        state.t = step as f64 * dt;
        if !state.u.norm_sq().is_finite() {
            return Err(RunError::NonFinite {
                step,
                t: state.t,
                checkpoint: ck_path.display().to_string(),
            });
        }
        if step % cfg.time.checkpoint_every as u64 == 0 {
            save(&state, step)?;
        }
    }
    save(&state, step)?;

    let report = build_report(cfg, &setup, &records, Some(&fd), Some(dt), Some(step), true)?;
    write_report(&outdir, &report)?;
    Ok(RunOutcome {
        report,
        records,
        state,
        dt,
        steps: step,
    })
}

fn check_resume(cfg: &RunConfig, ck: &Checkpoint) -> Result<(), RunError> {
    let mut diffs = Vec::new();
    if ck.grid().n() != cfg.grid.n {
        diffs.push(format!("grid.n {} vs {}", ck.grid().n(), cfg.grid.n));
    }
    if ck.grid().length() != cfg.grid.length {
        diffs.push(format!("grid.L {} vs {}", ck.grid().length(), cfg.grid.length));
    }
    if ck.nu != cfg.model.nu {
        diffs.push(format!("model.nu {} vs {}", ck.nu, cfg.model.nu));
    }
    if ck.alpha != cfg.model.alpha {
        diffs.push(format!("model.alpha {} vs {}", ck.alpha, cfg.model.alpha));
    }
    if ck.kind != cfg.model.kind {
        diffs.push(format!("model.kind {} vs {}", ck.kind, cfg.model.kind));
    }
    if ck.seed != cfg.forcing.seed {
        diffs.push(format!("forcing.seed {} vs {}", ck.seed, cfg.forcing.seed));
    }
    if diffs.is_empty() {
        Ok(())
    } else {
        Err(CheckpointError::Mismatch(diffs.join(", ")).into())
    }
}

/// Rebuilds `report.json` in `dir` from its CSV files and config echo.
pub fn report(dir: &Path, cfg_override: Option<&RunConfig>) -> Result<RunReport, RunError> {
    let cfg = match cfg_override {
        Some(c) => c.clone(),
        None => RunConfig::load(&dir.join(CONFIG_ECHO))?,
    };
    let setup = Setup::new(&cfg)?;
    let (records, exact) = read_records(dir)?;
    let mut rep = build_report(&cfg, &setup, &records, None, None, None, exact)?;
    rep.notices
        .push("re-rendered from CSV: finite-difference rate check and step count are only available from a live run".into());
    write_report(dir, &rep)?;
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Alpha,
    Amplitude,
}

impl SweepAxis {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepAxis::Alpha => "alpha",
            SweepAxis::Amplitude => "amplitude",
        }
    }

    fn apply(&self, cfg: &mut RunConfig, value: f64) {
        match self {
            SweepAxis::Alpha => cfg.model.alpha = value,
            SweepAxis::Amplitude => cfg.forcing.amplitude = value,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub value: f64,
    pub report: RunReport,
    /// `‖u_α - u_0‖ / ‖u_0‖` at the final time (alpha axis only).
    pub rel_diff: Option<f64>,
}

fn run_dir(base: &Path, axis: SweepAxis, value: f64) -> PathBuf {
    base.join(format!("{}_{}", axis.as_str(), value))
}

/// One run per value plus `sweep_summary.csv` in the base outdir. The alpha
/// axis also runs (or reuses) an `α = 0` reference.
pub fn sweep(cfg: &RunConfig, axis: SweepAxis, values: &[f64]) -> Result<Vec<SweepRow>, RunError> {
    if values.len() < 3 {
        return Err(RunError::Sweep(format!("needs at least 3 values, got {}", values.len())));
    }
    for (i, a) in values.iter().enumerate() {
        if values[..i].contains(a) {
            return Err(RunError::Sweep(format!("duplicate value {a}")));
        }
    }
    let base = cfg.paths.outdir.clone();
    let mut dirs: Vec<PathBuf> = values.iter().map(|&v| run_dir(&base, axis, v)).collect();
    let needs_reference = axis == SweepAxis::Alpha && !values.contains(&0.0);
    if needs_reference {
        dirs.push(run_dir(&base, axis, 0.0));
    }
    for d in &dirs {
        if d.exists() {
            return Err(RunError::Sweep(format!("output directory {} already exists", d.display())));
        }
    }
    // Validate every variant before spending time on any run.
    let mut cfgs = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        let mut c = cfg.clone();
        axis.apply(&mut c, v);
        c.paths.outdir = dirs[i].clone();
        c.validate()?;
        cfgs.push(c);
    }
    fs::create_dir_all(&base)?;

    let mut outcomes = Vec::new();
    for c in &cfgs {
        outcomes.push(simulate(c, None)?);
    }
    let reference = if axis == SweepAxis::Alpha {
        if let Some(i) = values.iter().position(|&v| v == 0.0) {
            Some(outcomes[i].state.u.clone())
        } else {
            let mut c = cfg.clone();
            c.model.alpha = 0.0;
            c.paths.outdir = dirs.last().expect("reference dir").clone();
            Some(simulate(&c, None)?.state.u)
        }
    } else {
        None
    };

    let rows: Vec<SweepRow> = values
        .iter()
        .zip(outcomes)
        .map(|(&value, o)| {
            let rel_diff = reference.as_ref().map(|r| {
                let d = o.state.u.sub(r).expect("same grid");
                d.norm() / r.norm()
            });
            SweepRow {
                value,
                report: o.report,
                rel_diff,
            }
        })
        .collect();
    write_sweep_summary(&base.join(SWEEP_SUMMARY), axis, &rows)?;
    Ok(rows)
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "nan".to_string(), format_value)
}

fn write_sweep_summary(path: &Path, axis: SweepAxis, rows: &[SweepRow]) -> Result<(), RunError> {
    let mut header: Vec<String> = ["value", "Re", "Gr", "epsilon", "ell_lambda_k_inv"].map(String::from).to_vec();
    header.extend((1..=4).map(|n| format!("ell2_kappa2_{n}0")));
    header.extend((1..=LADDER_MAX_N).map(|n| format!("C{n}_fit")));
    header.push("grashof_ratio".into());
    if axis == SweepAxis::Alpha {
        header.push("rel_diff_alpha0".into());
        header.push("ratio".into());
    }
    let mut out = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let b = &r.report.bounds;
        let mut line = vec![
            format_value(r.value),
            format_value(b.re),
            format_value(b.gr),
            format_value(b.epsilon),
            format_value(b.ell_lambda_k_inv),
        ];
        for n in 1..=4 {
            line.push(opt(b.kappa.iter().find(|k| k.n == n && k.r == 0).map(|k| k.ell2_mean_sq)));
        }
        for n in 1..=LADDER_MAX_N {
            line.push(opt(r.report.ladder.iter().find(|l| l.n == n).map(|l| l.fitted)));
        }
        line.push(opt(b.grashof_ratio));
        if axis == SweepAxis::Alpha {
            line.push(opt(r.rel_diff));
            let ratio = match (i, r.rel_diff) {
                (0, _) => None,
                (_, Some(d)) => rows[i - 1].rel_diff.map(|p| p / d),
                _ => None,
            };
            line.push(opt(ratio));
        }
        out.push(line);
    }
    write_table(path, &header, &out)?;
    Ok(())
}
