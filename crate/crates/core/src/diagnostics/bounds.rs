//! Long-time averaged quantities, Reynolds-number bounds and the exact
//! inequality checks that must hold on every run.
//!
//! Every Table-1 right-hand side is evaluated with prefactor 1 and compared
//! as a dimensionless ratio. Dimensional averages are scaled by
//! `ν, ℓ, L` first: `⟨H̄_N⟩ / (ν² L³ ℓ^{-2N-2})`, `⟨‖ū‖_∞²⟩ / (ν² ℓ⁻² V_α)`,
//! `⟨‖∇ū‖_∞⟩ / (ν ℓ⁻²)`, and `ℓ²⟨κ²⟩`.

use serde::Serialize;

use crate::model::ModelKind;

use super::average::AverageAccumulator;
use super::table::{exponent, full_table, Column, Row, TableEntry};
use super::{j_moments, kappa, tau, DiagnosticsError, DiagnosticsRecord};

/// Relative slack on the exact inequalities.
pub const EXACT_SLACK: f64 = 1e-12;

/// Highest `N` for `κ_{N,r}` and the `κ_{N,0}` rows.
pub const KAPPA_MAX_ORDER: usize = 4;

/// Run constants the bounds depend on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunContext {
    pub kind: ModelKind,
    pub nu: f64,
    /// Filter width actually used (0 for Navier–Stokes).
    pub alpha: f64,
    pub length: f64,
    pub k0: f64,
    pub ell: f64,
    pub gr: f64,
}

impl RunContext {
    pub fn column(&self) -> Column {
        match self.kind {
            ModelKind::MlAlpha => Column::MlAlpha,
            ModelKind::LerayAlpha => Column::LerayAlpha,
            ModelKind::Nse => Column::Ns,
        }
    }

    /// `τ` when defined; `Some(0)` when the forcing vanishes so `τΦ = 0` anyway.
    pub fn tau_or_zero(&self, unforced: bool) -> Option<f64> {
        if unforced {
            Some(0.0)
        } else {
            tau(self.gr, self.ell, self.nu).ok()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KappaEntry {
    pub n: usize,
    pub r: usize,
    /// `ℓ²⟨κ_{N,r}²⟩`.
    pub ell2_mean_sq: f64,
    /// `(⟨J_N⟩/⟨J_r⟩)^{1/(2(N-r))}`.
    pub of_averages: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRatio {
    pub row: Row,
    pub n: Option<usize>,
    pub r: Option<usize>,
    pub exponent: String,
    /// Dimensionless left side.
    pub measured: Option<f64>,
    /// `Re`-power right side with prefactor 1.
    pub rhs: Option<f64>,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Inequality {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl Inequality {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self {
            lhs,
            rhs,
            pass: lhs <= rhs * (1.0 + EXACT_SLACK) + f64::MIN_POSITIVE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactChecks {
    /// Samples and orders with `H̄_N² > H̄_{N-1} H̄_{N+1}`.
    pub log_convexity_violations: usize,
    /// `⟨H̄_1⟩ <= ⟨H̄_0⟩^{1/2} ⟨H̄_2⟩^{1/2}`.
    pub cauchy_schwarz: Inequality,
    /// Largest per-sample relative defect of `κ_{N,0}² = κ_{N,1}^{2(N-1)/N} κ_{1,0}^{2/N}`.
    pub kappa_chain_max_rel_err: Option<f64>,
    /// `⟨κ_{N,0}²⟩ <= ⟨κ_{N,1}²⟩^{(N-1)/N} ⟨κ_{1,0}²⟩^{1/N}` for `N = 2..`.
    pub kappa_holder: Vec<Inequality>,
    /// `min κ_{N,r} / k0` over all samples and pairs.
    pub kappa_min_over_k0: Option<f64>,
}

impl ExactChecks {
    pub fn kappa_chain_pass(&self) -> bool {
        self.kappa_chain_max_rel_err.is_none_or(|e| e <= EXACT_SLACK)
    }

    pub fn kappa_floor_pass(&self) -> bool {
        self.kappa_min_over_k0.is_none_or(|m| m >= 1.0 - EXACT_SLACK)
    }

    pub fn all_pass(&self) -> bool {
        self.log_convexity_violations == 0
            && self.cauchy_schwarz.pass
            && self.kappa_chain_pass()
            && self.kappa_holder.iter().all(|h| h.pass)
            && self.kappa_floor_pass()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Window {
    pub spinup: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub samples: usize,
    /// `Re` from the second half of the window alone.
    pub re_second_half: Option<f64>,
    pub re_rel_change: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub u_rms: f64,
    pub re: f64,
    pub gr: f64,
    pub ell: f64,
    /// `1/ℓ`.
    pub k_f: f64,
    pub epsilon: f64,
    pub lambda_k_inv: f64,
    pub ell_lambda_k_inv: f64,
    pub tau: Option<f64>,
    pub v_alpha: Option<f64>,
    pub d_f_bound: Option<f64>,
    /// `Gr / (Re² + Re)`.
    pub grashof_ratio: Option<f64>,
    /// `max ‖ū‖_∞ / (H̄_1^{1/4} H̄_2^{1/4})` over the window.
    pub agmon: Option<f64>,
    pub mean_hbar: Vec<f64>,
    pub mean_sup_ubar_sq: f64,
    pub mean_sup_grad_ubar: f64,
    pub mean_j: Vec<f64>,
    pub kappa: Vec<KappaEntry>,
    pub model_column: Column,
    pub table: Vec<TableRatio>,
    pub exponents: Vec<TableEntry>,
    pub checks: ExactChecks,
    pub window: Window,
    pub notices: Vec<String>,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn kappa_pairs(nk: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for n in 1..=nk {
        for r in 0..n {
            out.push((n, r));
        }
    }
    out
}

/// Per-sample `κ_{N,r}` for every pair, or `None` if some `J_r` vanishes.
fn sample_kappas(j: &[f64], pairs: &[(usize, usize)]) -> Option<Vec<f64>> {
    pairs.iter().map(|&(n, r)| kappa(j, n, r).ok()).collect()
}

fn pair_index(pairs: &[(usize, usize)], n: usize, r: usize) -> usize {
    pairs.iter().position(|&p| p == (n, r)).expect("pair present")
}

/// Averages over `t >= spinup` and evaluates every bound and exact check.
pub fn bound_suite(
    records: &[DiagnosticsRecord],
    ctx: &RunContext,
    spinup: f64,
) -> Result<BoundReport, DiagnosticsError> {
    if records.is_empty() {
        return Err(DiagnosticsError::InsufficientSamples);
    }
    let n_max = records[0].n_max();
    let mut notices = Vec::new();
    let l3 = ctx.length.powi(3);
    let (nu, ell, alpha) = (ctx.nu, ctx.ell, ctx.alpha);

    let unforced = records.iter().all(|r| r.phi.iter().all(|&p| p == 0.0));
    let tau_eff = ctx.tau_or_zero(unforced);
    if unforced {
        notices.push("forcing is zero: τΦ terms vanish, Gr-dependent quantities are degenerate".into());
    } else if tau_eff.is_none() {
        notices.push(format!("τ undefined: Gr ≤ 1 (Gr = {}); J, κ and J-ladder rows skipped", ctx.gr));
    }

    let nk = KAPPA_MAX_ORDER.min(n_max - 1);
    let pairs = kappa_pairs(nk);
    let mut kappa_ok = tau_eff.is_some();
    let mut chain_err = 0.0f64;
    let mut kappa_min = f64::INFINITY;
    let mut per_sample_kappa = Vec::with_capacity(records.len());
    let mut per_sample_j = Vec::with_capacity(records.len());
    if let Some(tau_v) = tau_eff {
        for rec in records {
            let j = j_moments(rec, tau_v, alpha);
            match sample_kappas(&j, &pairs) {
                Some(k) => {
                    for n in 2..=nk {
                        let lhs = k[pair_index(&pairs, n, 0)].powi(2);
                        let nf = n as f64;
                        let rhs = k[pair_index(&pairs, n, 1)].powf(2.0 * (nf - 1.0) / nf)
                            * k[pair_index(&pairs, 1, 0)].powf(2.0 / nf);
                        chain_err = chain_err.max((lhs - rhs).abs() / lhs);
                    }
                    kappa_min = k.iter().fold(kappa_min, |m, &x| m.min(x / ctx.k0));
                    per_sample_kappa.push(k);
                }
                None => {
                    kappa_ok = false;
                    break;
                }
            }
            per_sample_j.push(j);
        }
        if !kappa_ok {
            notices.push("some J_r vanishes: κ rows skipped".into());
        }
    }

    // Layout of the averaged vector.
    let base = 2 + (n_max + 1) + 2;
    let nj = if kappa_ok { nk + 1 } else { 0 };
    let width = base + nj + if kappa_ok { pairs.len() } else { 0 };
    let mut acc = AverageAccumulator::new(spinup, width);
    let mut agmon = 0.0f64;
    let mut log_violations = 0;
    let mut row = Vec::with_capacity(width);
    for (i, rec) in records.iter().enumerate() {
        for n in 1..n_max {
            if rec.hbar[n] * rec.hbar[n] > rec.hbar[n - 1] * rec.hbar[n + 1] * (1.0 + EXACT_SLACK) {
                log_violations += 1;
            }
        }
        row.clear();
        row.push(rec.h[0]);
        row.push(rec.h[1]);
        row.extend_from_slice(&rec.hbar);
        row.push(rec.sup_ubar * rec.sup_ubar);
        row.push(rec.sup_grad_ubar);
        if kappa_ok {
            row.extend_from_slice(&per_sample_j[i][..=nk]);
            row.extend(per_sample_kappa[i].iter().map(|k| k * k));
        }
        acc.push(rec.t, &row);
        if rec.t >= spinup {
            let d = (rec.hbar[1] * rec.hbar[2]).powf(0.25);
            if d > 0.0 {
                agmon = agmon.max(rec.sup_ubar / d);
            }
        }
    }
    let means = acc.means()?;
    let mean_h0 = means[0];
    let mean_h1 = means[1];
    let mean_hbar = means[2..2 + n_max + 1].to_vec();
    let mean_sup_ubar_sq = means[3 + n_max];
    let mean_sup_grad_ubar = means[4 + n_max];
    let mean_j = means[base..base + nj].to_vec();
    let mean_kappa_sq = &means[base + nj..];

    let u_rms = (mean_h0 / l3).sqrt();
    let re = u_rms * ell / nu;
    let epsilon = nu * mean_h1 / l3;
    let lambda_k_inv = (epsilon / nu.powi(3)).powf(0.25);
    let v_alpha = (alpha > 0.0).then(|| (ctx.length / (ell * alpha).sqrt()).powi(3));
    let d_f_bound =
        (alpha > 0.0).then(|| (l3 * ell.powi(-4) / (alpha * alpha * ctx.k0.powi(3))).powf(0.75) * re.powf(2.25));

    let kappa_entries: Vec<KappaEntry> = if kappa_ok {
        pairs
            .iter()
            .enumerate()
            .map(|(i, &(n, r))| KappaEntry {
                n,
                r,
                ell2_mean_sq: ell * ell * mean_kappa_sq[i],
                of_averages: kappa(&mean_j, n, r).unwrap_or(f64::NAN),
            })
            .collect()
    } else {
        Vec::new()
    };

    let kappa_holder = if kappa_ok {
        (2..=nk)
            .map(|n| {
                let nf = n as f64;
                let k = |a, b| mean_kappa_sq[pair_index(&pairs, a, b)];
                Inequality::new(k(n, 0), k(n, 1).powf((nf - 1.0) / nf) * k(1, 0).powf(1.0 / nf))
            })
            .collect()
    } else {
        Vec::new()
    };

    let checks = ExactChecks {
        log_convexity_violations: log_violations,
        cauchy_schwarz: Inequality::new(mean_hbar[1], (mean_hbar[0] * mean_hbar[2]).sqrt()),
        kappa_chain_max_rel_err: kappa_ok.then_some(chain_err),
        kappa_holder,
        kappa_min_over_k0: kappa_ok.then_some(kappa_min),
    };

    // Table rows for this model's column.
    let column = ctx.column();
    let mut table = Vec::new();
    let mut add = |row: Row, n: Option<usize>, r: Option<usize>, measured: Option<f64>, rhs_scale: Option<f64>| {
        let Some(e) = exponent(column, row) else { return };
        let nn = n.unwrap_or(1) as i64;
        let rhs = e.evaluate(re, nn).and_then(|v| rhs_scale.map(|s| s * v)).and_then(finite);
        let measured = measured.and_then(finite);
        let ratio = match (measured, rhs) {
            (Some(m), Some(r)) if r > 0.0 => finite(m / r),
            _ => None,
        };
        table.push(TableRatio {
            row,
            n,
            r,
            exponent: e.to_string(),
            measured,
            rhs,
            ratio,
        });
    };
    add(Row::EllLambdaKInv, None, None, Some(ell * lambda_k_inv), Some(1.0));
    for (n, row) in [(1, Row::Hbar1), (2, Row::Hbar2), (3, Row::Hbar3)] {
        if n <= n_max {
            let scale = nu * nu * l3 * ell.powi(-2 * n as i32 - 2);
            add(row, Some(n), None, Some(mean_hbar[n] / scale), Some(1.0));
        }
    }
    add(
        Row::DF,
        None,
        None,
        None,
        (alpha > 0.0).then(|| (l3 * ell.powi(-4) / (alpha * alpha * ctx.k0.powi(3))).powf(0.75)),
    );
    if kappa_ok {
        for e in &kappa_entries {
            if e.r >= 1 {
                add(Row::KappaNr, Some(e.n), Some(e.r), Some(e.ell2_mean_sq), Some(1.0));
            }
        }
        let k10 = kappa_entries.iter().find(|e| (e.n, e.r) == (1, 0)).map(|e| e.ell2_mean_sq);
        add(Row::Kappa10, Some(1), Some(0), k10, Some(1.0));
        for e in kappa_entries.iter().filter(|e| e.r == 0 && e.n >= 2) {
            add(Row::KappaN0, Some(e.n), Some(0), Some(e.ell2_mean_sq), Some(1.0));
        }
    }
    add(
        Row::SupUbarSq,
        None,
        None,
        v_alpha.map(|v| mean_sup_ubar_sq / (nu * nu / (ell * ell) * v)),
        Some(1.0),
    );
    add(Row::SupGradUbar, None, None, Some(mean_sup_grad_ubar / (nu / (ell * ell))), Some(1.0));

    // Window sensitivity.
    let t_end = records.last().map(|r| r.t).unwrap_or(0.0);
    let t_start = records.iter().map(|r| r.t).find(|&t| t >= spinup).unwrap_or(t_end);
    let half = 0.5 * (t_start + t_end);
    let late: Vec<&DiagnosticsRecord> = records.iter().filter(|r| r.t >= half).collect();
    let re_second_half = if late.len() >= 2 && t_end > t_start {
        let mut a = AverageAccumulator::new(half, 1);
        for r in &late {
            a.push(r.t, &[r.h[0]]);
        }
        a.means().ok().map(|m| (m[0] / l3).sqrt() * ell / nu)
    } else {
        None
    };

    Ok(BoundReport {
        u_rms,
        re,
        gr: ctx.gr,
        ell,
        k_f: 1.0 / ell,
        epsilon,
        lambda_k_inv,
        ell_lambda_k_inv: ell * lambda_k_inv,
        tau: if unforced { None } else { tau_eff },
        v_alpha,
        d_f_bound: d_f_bound.and_then(finite),
        grashof_ratio: finite(ctx.gr / (re * re + re)),
        agmon: (agmon > 0.0).then_some(agmon),
        mean_hbar,
        mean_sup_ubar_sq,
        mean_sup_grad_ubar,
        mean_j,
        kappa: kappa_entries,
        model_column: column,
        table,
        exponents: full_table(),
        checks,
        window: Window {
            spinup,
            t_start,
            t_end,
            samples: acc.count(),
            re_second_half,
            re_rel_change: re_second_half.and_then(|r2| finite((r2 - re).abs() / re)),
        },
        notices,
    })
}
