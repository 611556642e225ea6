//! Acceptance criteria for the solver, one PASS/FAIL line each.
//!
//! Runs as a plain binary (`harness = false`) so the lines always print.
//! Exits non-zero when any criterion fails.

use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use mlaf::io::config::RunConfig;
use mlaf::run::{self, RunOutcome, CHECKPOINT_FILE};
use mlaf::spectral::Faults;
use mlaf::verify::{self, VerifyParams};

const FORCED: &str = include_str!("../../../configs/forced32.toml");
const TAYLOR_GREEN: &str = include_str!("../../../configs/taylor_green.toml");

/// Fixed step shared by the 32³ and 64³ forced runs: 1000 steps to t = 30.
const FORCED_DT: f64 = 0.03;
const LADDER_PASS: f64 = 0.99;
const DOUBLING_TOL: f64 = 0.10;
const ORACLE_BUDGET_SECS: f64 = 60.0;

struct Line {
    name: String,
    pass: bool,
    detail: String,
}

#[derive(Default)]
struct Report {
    lines: Vec<Line>,
}

impl Report {
    fn add(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        let line = Line {
            name: name.into(),
            pass,
            detail: detail.into(),
        };
        println!("{} {}: {}", if line.pass { "PASS" } else { "FAIL" }, line.name, line.detail);
        self.lines.push(line);
    }
}

fn forced_config(n: usize, outdir: &Path) -> RunConfig {
    let mut cfg = RunConfig::from_toml(FORCED).expect("bundled config");
    cfg.grid.n = n;
    cfg.time.dt = Some(FORCED_DT);
    cfg.paths.outdir = outdir.to_path_buf();
    cfg
}

fn forced(report: &mut Report, n: usize, dir: &Path) -> Option<RunOutcome> {
    let start = Instant::now();
    match run::simulate(&forced_config(n, dir), None) {
        Ok(out) => {
            eprintln!("forced {n}³: {} steps in {:.1} s", out.steps, start.elapsed().as_secs_f64());
            Some(out)
        }
        Err(e) => {
            report.add(format!("forced {n}³ run"), false, format!("error: {e}"));
            None
        }
    }
}

fn main() -> ExitCode {
    let mut r = Report::default();
    let none = Faults::default();
    let tmp = tempfile::tempdir().expect("temp dir");

    let p = VerifyParams::default();
    let start = Instant::now();
    let err = verify::oracle_equivalence(none, 8, 10, &p);
    let secs = start.elapsed().as_secs_f64();
    r.add(
        "oracle equivalence",
        err <= verify::ORACLE_TOL && secs < ORACLE_BUDGET_SECS,
        format!("max rel err {err:.3e} (<= {:e}) in {secs:.2} s", verify::ORACLE_TOL),
    );

    let run32 = forced(&mut r, 32, &tmp.path().join("forced32"));
    if let Some(out) = &run32 {
        let (res, skew) = verify::energy_identity(&out.records);
        r.add(
            "energy identity",
            out.steps >= 1000 && res <= verify::ENERGY_TOL && skew <= verify::SKEW_TOL,
            format!(
                "{} steps, residual {res:.3e} (<= {:e}), skew {skew:.3e} (<= {:e})",
                out.steps,
                verify::ENERGY_TOL,
                verify::SKEW_TOL
            ),
        );
        let l0 = &out.report.ladder[0];
        r.add(
            "ladder N = 0",
            l0.c_ref == 0.0 && l0.pass_fraction == 1.0,
            format!("pass fraction {:.4} at C = {}", l0.pass_fraction, l0.c_ref),
        );
        let upper = &out.report.ladder[1..];
        r.add(
            "ladder N = 1..3 pass fraction",
            upper.len() == 3 && upper.iter().all(|l| l.pass_fraction >= LADDER_PASS),
            upper
                .iter()
                .map(|l| format!("N={}: {:.4} at C = {}", l.n, l.pass_fraction, l.c_ref))
                .collect::<Vec<_>>()
                .join(", "),
        );
    }

    if let Some(out32) = &run32 {
        let start = Instant::now();
        if let Some(out64) = forced(&mut r, 64, &tmp.path().join("forced64")) {
            let mut worst = 0.0f64;
            let mut parts = Vec::new();
            for (a, b) in out32.report.ladder[1..].iter().zip(&out64.report.ladder[1..]) {
                let d = (b.fitted - a.fitted).abs() / a.fitted;
                worst = worst.max(d);
                parts.push(format!("N={}: {:.4e} -> {:.4e}", a.n, a.fitted, b.fitted));
            }
            let same_times = out32.records.len() == out64.records.len()
                && out32.records.iter().zip(&out64.records).all(|(a, b)| a.t == b.t);
            r.add(
                "fitted C under resolution doubling",
                same_times && worst < DOUBLING_TOL,
                format!(
                    "{}; worst change {:.2}% (< {}%) in {:.0} s",
                    parts.join(", "),
                    100.0 * worst,
                    100.0 * DOUBLING_TOL,
                    start.elapsed().as_secs_f64()
                ),
            );
        }
    }

    let tg = RunConfig::from_toml(TAYLOR_GREEN).expect("bundled config");
    let tg_params = VerifyParams::from_config(&tg);
    match verify::taylor_green_decay(none, tg.grid.n, tg.time.t_end, &tg_params) {
        Ok((worst, steps)) => r.add(
            "unforced decay",
            worst <= 1.0 + verify::DECAY_SLACK,
            format!("max E/(E0 exp(-2 nu k0^2 t)) = {worst:.12} over {steps} samples"),
        ),
        Err(e) => r.add("unforced decay", false, format!("error: {e}")),
    }

    match verify::integrator_order(none, 16, &p) {
        Ok(f) => r.add(
            "integrator order",
            (verify::ORDER_RANGE.0..=verify::ORDER_RANGE.1).contains(&f),
            format!("factor {f:.3} in [{}, {}]", verify::ORDER_RANGE.0, verify::ORDER_RANGE.1),
        ),
        Err(e) => r.add("integrator order", false, format!("error: {e}")),
    }

    match verify::alpha_limit(none, 32, 0.5, &p) {
        Ok((diffs, ratios)) => r.add(
            "alpha -> 0 limit",
            ratios.len() == 2 && ratios.iter().all(|x| (verify::ALPHA_RATIO_RANGE.0..=verify::ALPHA_RATIO_RANGE.1).contains(x)),
            format!(
                "rel diffs [{}], ratios [{}]",
                diffs.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", "),
                ratios.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join(", ")
            ),
        ),
        Err(e) => r.add("alpha -> 0 limit", false, format!("error: {e}")),
    }

    match verify::shell_identity(32, &p) {
        Ok(w) => r.add(
            "forcing shell identity",
            w <= verify::SHELL_TOL,
            format!("max rel err {w:.3e} for N <= 6"),
        ),
        Err(e) => r.add("forcing shell identity", false, format!("error: {e}")),
    }

    if let Some(out) = &run32 {
        let ctx = setup_context(&out.report.config);
        match verify::exact_suite(&out.records, &ctx) {
            Ok(ex) => r.add(
                "exact inequality suite",
                ex.all_pass(),
                format!(
                    "{} log-convexity violations, H1 interpolation {}, kappa chain {}, kappa floor {}",
                    ex.log_convexity_violations,
                    verdict(ex.cauchy_schwarz.pass),
                    verdict(ex.kappa_chain_pass()),
                    verdict(ex.kappa_floor_pass())
                ),
            ),
            Err(e) => r.add("exact inequality suite", false, format!("error: {e}")),
        }
    }

    let m = verify::exponent_mismatches();
    r.add(
        "exponent table",
        m.is_empty(),
        if m.is_empty() {
            "all ML-alpha entries match".to_string()
        } else {
            format!("{m:?}")
        },
    );

    let w = verify::single_mode(&p);
    r.add(
        "single-mode closed forms",
        w <= verify::CLOSED_FORM_TOL,
        format!("max rel err {w:.3e}"),
    );

    match resume_determinism(tmp.path()) {
        Ok((same, rows)) => r.add(
            "checkpoint resume determinism",
            same,
            format!("{rows} CSV rows {}", if same { "bit-identical" } else { "differ" }),
        ),
        Err(e) => r.add("checkpoint resume determinism", false, format!("error: {e}")),
    }

    let failed: Vec<_> = r.lines.iter().filter(|l| !l.pass).map(|l| l.name.as_str()).collect();
    println!("{} of {} criteria passed", r.lines.len() - failed.len(), r.lines.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed: {}", failed.join("; "));
        ExitCode::FAILURE
    }
}

fn verdict(b: bool) -> &'static str {
    if b {
        "holds"
    } else {
        "violated"
    }
}

fn setup_context(cfg: &RunConfig) -> mlaf::diagnostics::bounds::RunContext {
    run::Setup::new(cfg).expect("config of a finished run").context()
}

/// A 16³ run straight to the end against the same run stopped halfway and
/// resumed from its checkpoint into the same directory.
fn resume_determinism(root: &Path) -> Result<(bool, usize), run::RunError> {
    let mut cfg = RunConfig::from_toml(FORCED).expect("bundled config");
    cfg.grid.n = 16;
    cfg.time.dt = Some(0.05);
    cfg.time.t_end = 4.0;
    cfg.time.output_every = 4;
    cfg.paths.outdir = root.join("straight");
    run::simulate(&cfg, None)?;

    let mut half = cfg.clone();
    half.time.t_end = 2.0;
    half.paths.outdir = root.join("resumed");
    run::simulate(&half, None)?;
    let mut rest = cfg.clone();
    rest.paths.outdir = half.paths.outdir.clone();
    run::simulate(&rest, Some(&half.paths.outdir.join(CHECKPOINT_FILE)))?;

    let a = fs::read_to_string(cfg.paths.outdir.join(mlaf::io::csv::DIAGNOSTICS_FILE))?;
    let b = fs::read_to_string(rest.paths.outdir.join(mlaf::io::csv::DIAGNOSTICS_FILE))?;
    Ok((a == b, a.lines().count().saturating_sub(1)))
}
