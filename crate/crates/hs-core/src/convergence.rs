//! Error measurement between solutions and experimental convergence orders.
//!
//! The error of a run is the worst relative sup-norm gap
//! `‖u(t) − u_Δx(t)‖_∞ / ‖u(t)‖_∞` over a time grid of 64 uniform samples
//! per unit time augmented with the run's own schedule and the reference's
//! breaking times. Both solutions are piecewise linear in space, so each
//! spatial sup is exact on the union of their breakpoints.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::evolution::Trajectory;
use crate::exact;
use crate::lagrangian::EulerianSolution;
use crate::math;
use crate::pwl;

/// Uniform samples per unit time in [`relative_error`].
pub const TIME_SAMPLES_PER_UNIT: usize = 64;

/// Reference solution a numerical run is compared against.
pub enum Reference<'a> {
    /// Closed-form solution of the first multipeakon example.
    Ex41Exact,
    /// Another (finer or exact-by-construction) trajectory.
    Numeric(&'a Trajectory),
}

impl Reference<'_> {
    pub fn snapshot(&self, t: f64) -> Result<EulerianSolution> {
        match self {
            Reference::Ex41Exact => Ok(exact::exact_ex41_snapshot(t)),
            Reference::Numeric(traj) => traj.eulerian_at(t),
        }
    }

    /// Breaking times the sampling grid must contain.
    pub fn breaking_times(&self, t_end: f64) -> Vec<f64> {
        match self {
            Reference::Ex41Exact => [1.0, 2.0]
                .into_iter()
                .filter(|&t| t <= t_end)
                .collect(),
            Reference::Numeric(_) => Vec::new(),
        }
    }
}

/// Sup-norm distance between the wave profiles of two snapshots (exact for
/// piecewise linear data).
pub fn u_sup_diff(a: &EulerianSolution, b: &EulerianSolution) -> f64 {
    pwl::sup_diff(&a.u, &b.u)
}

/// Time grid for the sup over `[0, T]`: uniform samples plus the run's
/// schedule plus the reference's breaking times.
pub fn sample_times(numeric: &Trajectory, reference: &Reference, t_end: f64) -> Vec<f64> {
    let n = math::ceil(TIME_SAMPLES_PER_UNIT as f64 * t_end) as usize + 1;
    let mut times: Vec<f64> = (0..=n).map(|i| t_end * i as f64 / n as f64).collect();
    times.extend(numeric.schedule().iter().copied());
    times.extend(reference.breaking_times(t_end));
    times.retain(|&t| t >= 0.0 && t <= t_end);
    times.sort_unstable_by(f64::total_cmp);
    times.dedup();
    times
}

/// Relative sup-norm error at one instant.
pub fn relative_error_at(reference: &Reference, numeric: &Trajectory, t: f64) -> Result<f64> {
    let reference = reference.snapshot(t)?;
    let numeric = numeric.eulerian_at(t)?;
    let denom = reference.u.sup_abs();
    if denom == 0.0 {
        return Err(Error::DegenerateReference { t });
    }
    Ok(u_sup_diff(&reference, &numeric) / denom)
}

/// `sup_t ‖u(t) − u_Δx(t)‖_∞ / ‖u(t)‖_∞` over the sampling grid.
pub fn relative_error(reference: &Reference, numeric: &Trajectory, t_end: f64) -> Result<f64> {
    let mut worst = 0.0f64;
    for t in sample_times(numeric, reference, t_end) {
        worst = worst.max(relative_error_at(reference, numeric, t)?);
    }
    Ok(worst)
}

/// One row of a convergence table.
#[derive(Clone, Copy, Debug)]
pub struct EocRow {
    pub dx: f64,
    pub err: f64,
    /// Undefined on the first row.
    pub eoc: Option<f64>,
}

/// Experimental orders of convergence
/// `EOC_k = ln(Err_{k−1}/Err_k) / ln(Δx_{k−1}/Δx_k)`.
pub fn eoc_rows(errors: &[(f64, f64)]) -> Result<Vec<EocRow>> {
    if errors.len() < 2 {
        return Err(Error::Parameter("need at least two rows".into()));
    }
    if errors.iter().any(|&(dx, err)| !(dx > 0.0) || !(err > 0.0)) {
        return Err(Error::Parameter(
            "mesh widths and errors must be positive".into(),
        ));
    }
    let mut rows = Vec::with_capacity(errors.len());
    for (i, &(dx, err)) in errors.iter().enumerate() {
        let eoc = (i > 0).then(|| {
            let (pdx, perr) = errors[i - 1];
            math::ln(perr / err) / math::ln(pdx / dx)
        });
        rows.push(EocRow { dx, err, eoc });
    }
    Ok(rows)
}

/// Ordinary least squares on `(ln Δx, ln Err)`: returns `(slope, intercept)`.
pub fn ls_fit_loglog(errors: &[(f64, f64)]) -> Result<(f64, f64)> {
    if errors.len() < 2 {
        return Err(Error::Parameter("need at least two rows".into()));
    }
    let n = errors.len() as f64;
    let (mut sx, mut sy) = (0.0, 0.0);
    for &(dx, err) in errors {
        if !(dx > 0.0) || !(err > 0.0) {
            return Err(Error::Parameter(
                "mesh widths and errors must be positive".into(),
            ));
        }
        sx += math::ln(dx);
        sy += math::ln(err);
    }
    let (mx, my) = (sx / n, sy / n);
    let mut num = 0.0;
    let mut den = 0.0;
    for &(dx, err) in errors {
        let x = math::ln(dx) - mx;
        num += x * (math::ln(err) - my);
        den += x * x;
    }
    Ok((num / den, my - num / den * mx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eulerian::AlphaFunction;
    use crate::evolution::solve;
    use crate::lagrangian::to_lagrangian_grid;
    use crate::projection::project;

    #[test]
    fn identical_runs_have_zero_error() {
        let data = exact::ex41_data();
        let grid = to_lagrangian_grid(&project(&data, 0.25).unwrap());
        let traj = solve(&grid, &AlphaFunction::Const(0.4), 3.0, 0.25).unwrap();
        let err = relative_error(&Reference::Numeric(&traj), &traj, 3.0).unwrap();
        assert_eq!(err, 0.0);
    }

    #[test]
    fn degenerate_reference_is_reported() {
        let data = crate::eulerian::InitialData::new(
            crate::eulerian::WaveProfile::constant(0.0),
            crate::eulerian::EnergyMeasure::empty(),
        )
        .unwrap();
        let grid = to_lagrangian_grid(&project(&data, 0.5).unwrap());
        let traj = solve(&grid, &AlphaFunction::Const(0.0), 1.0, 0.5).unwrap();
        match relative_error(&Reference::Numeric(&traj), &traj, 1.0) {
            Err(Error::DegenerateReference { .. }) => {}
            other => panic!("expected degenerate reference, got {other:?}"),
        }
    }

    #[test]
    fn exact_power_law_recovers_order() {
        let errors: Vec<(f64, f64)> = (1..=6)
            .map(|k| {
                let dx = 0.25f64.powi(k);
                (dx, 3.0 * libm::pow(dx, 0.75))
            })
            .collect();
        let rows = eoc_rows(&errors).unwrap();
        for row in rows.iter().skip(1) {
            assert!((row.eoc.unwrap() - 0.75).abs() < 1e-12);
        }
        let (slope, intercept) = ls_fit_loglog(&errors).unwrap();
        assert!((slope - 0.75).abs() < 1e-12);
        assert!((intercept - libm::log(3.0)).abs() < 1e-12);
    }

    #[test]
    fn eoc_from_reported_table_row() {
        let rows = eoc_rows(&[(0.25, 0.12), (0.0625, 5.4e-2)]).unwrap();
        assert!((rows[1].eoc.unwrap() - 0.5759).abs() < 1e-3);
        assert!(rows[0].eoc.is_none());
    }

    #[test]
    fn single_pair_sanity() {
        let rows = eoc_rows(&[(1.0, 0.5), (0.25, 0.25)]).unwrap();
        assert!((rows[1].eoc.unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_nonpositive_errors() {
        assert!(eoc_rows(&[(0.5, 0.0), (0.25, 0.1)]).is_err());
        assert!(ls_fit_loglog(&[(0.5, 1.0)]).is_err());
    }
}
