//! Convergence-study driver: runs the projection → transform → evolution →
//! recovery pipeline over a family of meshes `Δx_k = 4^{−k}`, measures
//! relative errors against a reference solution, and assembles the
//! *Err/EOC/least-squares* report.

use std::time::Instant;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use hs_core::convergence::{self, Reference};
use hs_core::eulerian::{AlphaFunction, InitialData};
use hs_core::evolution::{solve, Trajectory};
use hs_core::exact;
use hs_core::lagrangian::to_lagrangian_grid;
use hs_core::projection::project;

use crate::schema::fmt17;

/// How the reference solution for a study is produced.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub enum ReferenceSpec {
    /// Closed-form solution (first multipeakon only).
    Exact,
    /// Exact piecewise linear evolution of the unprojected data
    /// (multipeakon data only; every breaking time is resolved).
    SemiExact,
    /// Fine-grid numerical solution.
    FineGrid { dx_ref: f64 },
}

impl ReferenceSpec {
    /// Default choice per builtin example. Fast mode swaps the cusp's
    /// `Δx_ref = 10⁻⁵` for the mesh-aligned `4⁻⁸`.
    pub fn default_for(example: &str, fast: bool, k_max: u32) -> ReferenceSpec {
        match example {
            "ex41" => ReferenceSpec::Exact,
            "ex42" => ReferenceSpec::SemiExact,
            "cusp" => ReferenceSpec::FineGrid {
                dx_ref: if fast { 0.25f64.powi(8) } else { 1e-5 },
            },
            _ => ReferenceSpec::FineGrid {
                dx_ref: 0.25f64.powi(k_max as i32 + 2),
            },
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub example: String,
    pub alpha: String,
    pub k_min: u32,
    pub k_max: u32,
    pub t_end: f64,
    pub reference: ReferenceSpec,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_min == 0 || self.k_min > self.k_max {
            bail!("need 1 <= kmin <= kmax");
        }
        if !(self.t_end > 0.0) {
            bail!("final time must be positive");
        }
        if self.example == "cusp" && self.reference == ReferenceSpec::Exact {
            bail!("the cusp has no exact reference; use a fine grid");
        }
        Ok(())
    }
}

/// One mesh level of the study.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportRow {
    pub k: u32,
    pub dx: f64,
    pub err: f64,
    pub eoc: Option<f64>,
    pub wall_ms: f64,
    /// Largest iteration count of the dissipation fixed point over the
    /// run's schedule intervals.
    pub max_m_it: u32,
    /// Largest observed increase of `V_∞` over the sampled times (0 when
    /// the energy is monotone).
    pub energy_violation: f64,
    /// Worst gap between an energy drop and the dissipated mass booked for
    /// that breaking time.
    pub drop_mismatch: f64,
    pub error_msg: Option<String>,
    pub non_contraction: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub config: ExperimentConfig,
    pub rows: Vec<ReportRow>,
    pub ls_slope: Option<f64>,
    pub ls_intercept: Option<f64>,
    pub total_wall_ms: f64,
}

impl ConvergenceReport {
    pub fn any_failure(&self) -> bool {
        self.rows.iter().any(|r| r.error_msg.is_some())
    }

    pub fn any_non_contraction(&self) -> bool {
        self.rows.iter().any(|r| r.non_contraction)
    }

    /// Fixed-format CSV: `k,dx,err,eoc,wall_ms` with 17 significant digits.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "dx", "err", "eoc", "wall_ms"])?;
        for r in &self.rows {
            w.write_record([
                r.k.to_string(),
                fmt17(r.dx),
                fmt17(r.err),
                r.eoc.map(fmt17).unwrap_or_default(),
                format!("{:.3}", r.wall_ms),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// `(ln Δx, ln Err)` pairs for external plotting.
    pub fn write_loglog<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        for r in self.rows.iter().filter(|r| r.error_msg.is_none()) {
            writeln!(out, "{} {}", fmt17(r.dx.ln()), fmt17(r.err.ln()))?;
        }
        Ok(())
    }
}

/// Builds the reference solution once.
pub enum ReferenceArtifacts {
    Exact,
    Trajectory(Trajectory),
}

impl ReferenceArtifacts {
    pub fn build(
        spec: &ReferenceSpec,
        data: &InitialData,
        alpha: &AlphaFunction,
        t_end: f64,
    ) -> Result<Self> {
        Ok(match spec {
            ReferenceSpec::Exact => ReferenceArtifacts::Exact,
            ReferenceSpec::SemiExact => {
                let grid = hs_core::lagrangian::from_initial_pl(data)?;
                ReferenceArtifacts::Trajectory(solve(&grid, alpha, t_end, 0.0)?)
            }
            ReferenceSpec::FineGrid { dx_ref } => {
                let proj = project(data, *dx_ref)?;
                let grid = to_lagrangian_grid(&proj);
                ReferenceArtifacts::Trajectory(solve(&grid, alpha, t_end, *dx_ref)?)
            }
        })
    }

    pub fn as_reference(&self) -> Reference<'_> {
        match self {
            ReferenceArtifacts::Exact => Reference::Ex41Exact,
            ReferenceArtifacts::Trajectory(t) => Reference::Numeric(t),
        }
    }
}

/// Relative error with the per-time work spread over the thread pool.
pub fn parallel_relative_error(
    reference: &Reference<'_>,
    numeric: &Trajectory,
    t_end: f64,
) -> std::result::Result<f64, hs_core::Error> {
    let times = convergence::sample_times(numeric, reference, t_end);
    let errs: std::result::Result<Vec<f64>, hs_core::Error> = times
        .par_iter()
        .map(|&t| convergence::relative_error_at(reference, numeric, t))
        .collect();
    Ok(errs?.into_iter().fold(0.0, f64::max))
}

/// Energy diagnostics of one trajectory: monotonicity violation of `V_∞`
/// and the worst drop-vs-booked-mass mismatch over the breaking times.
pub fn energy_diagnostics(traj: &Trajectory, t_end: f64) -> (f64, f64) {
    let mut violation = 0.0f64;
    let mut prev = traj.v_inf_at(0.0);
    let n = 4 * convergence::TIME_SAMPLES_PER_UNIT;
    for i in 1..=n {
        let v = traj.v_inf_at(t_end * i as f64 / n as f64);
        violation = violation.max(v - prev);
        prev = v;
    }

    let mut mismatch = 0.0f64;
    let events = traj.events();
    let mut i = 0usize;
    while i < events.len() {
        let tau = events[i].0;
        let mut mass = 0.0;
        let mut j = i;
        while j < events.len() && events[j].0 - tau <= 1e-12 * (1.0 + tau) {
            mass += events[j].1;
            j += 1;
        }
        let before = if i == 0 {
            traj.v_inf_at(0.0)
        } else {
            traj.v_inf_at(0.5 * (events[i - 1].0 + tau))
        };
        let after = traj.v_inf_at(events[j - 1].0);
        mismatch = mismatch.max(((before - after) - mass).abs());
        i = j;
    }
    (violation, mismatch)
}

/// Runs the full study. Rows that fail keep their error message and the
/// remaining mesh levels still run.
pub fn run_convergence(
    data: &InitialData,
    alpha: &AlphaFunction,
    cfg: &ExperimentConfig,
) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let start = Instant::now();
    let reference = ReferenceArtifacts::build(&cfg.reference, data, alpha, cfg.t_end)
        .context("building the reference solution")?;

    let mut rows: Vec<ReportRow> = (cfg.k_min..=cfg.k_max)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|k| {
            let row_start = Instant::now();
            let dx = 0.25f64.powi(k as i32);
            let outcome = (|| -> std::result::Result<(f64, u32, f64, f64), hs_core::Error> {
                let proj = project(data, dx)?;
                let grid = to_lagrangian_grid(&proj);
                let traj = solve(&grid, alpha, cfg.t_end, dx)?;
                let err = parallel_relative_error(&reference.as_reference(), &traj, cfg.t_end)?;
                let (violation, mismatch) = energy_diagnostics(&traj, cfg.t_end);
                Ok((err, traj.max_iterations(), violation, mismatch))
            })();
            let wall_ms = row_start.elapsed().as_secs_f64() * 1e3;
            match outcome {
                Ok((err, max_m_it, energy_violation, drop_mismatch)) => ReportRow {
                    k,
                    dx,
                    err,
                    eoc: None,
                    wall_ms,
                    max_m_it,
                    energy_violation,
                    drop_mismatch,
                    error_msg: None,
                    non_contraction: false,
                },
                Err(e) => ReportRow {
                    k,
                    dx,
                    err: f64::NAN,
                    eoc: None,
                    wall_ms,
                    max_m_it: 0,
                    energy_violation: f64::NAN,
                    drop_mismatch: f64::NAN,
                    non_contraction: matches!(e, hs_core::Error::NonContraction { .. }),
                    error_msg: Some(e.to_string()),
                },
            }
        })
        .collect();

    let good: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.error_msg.is_none() && r.err > 0.0)
        .map(|r| (r.dx, r.err))
        .collect();
    if good.len() >= 2 {
        if let Ok(eoc) = convergence::eoc_rows(&good) {
            let mut it = eoc.iter();
            for row in rows.iter_mut() {
                if row.error_msg.is_none() && row.err > 0.0 {
                    row.eoc = it.next().and_then(|e| e.eoc);
                }
            }
        }
    }
    let fit = (good.len() >= 2)
        .then(|| convergence::ls_fit_loglog(&good).ok())
        .flatten();

    Ok(ConvergenceReport {
        config: cfg.clone(),
        rows,
        ls_slope: fit.map(|f| f.0),
        ls_intercept: fit.map(|f| f.1),
        total_wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Builtin example registry: data plus its conventional dissipation profile.
pub fn builtin_example(name: &str) -> Result<(InitialData, AlphaFunction)> {
    Ok(match name {
        "ex41" => (exact::ex41_data(), AlphaFunction::Alpha1),
        "ex42" => (exact::ex42_data(), AlphaFunction::Ex42),
        "cusp" => (exact::cusp_data(), exact::cusp_alpha(0.95)),
        other => bail!("unknown example {other:?} (expected ex41|ex42|cusp)"),
    })
}
