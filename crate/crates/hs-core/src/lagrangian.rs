//! Characteristic (Lagrangian) coordinates: the transform `L` from Eulerian
//! data, per-cell wave-breaking times, and the pushforward recovery `M` back
//! to Eulerian variables.
//!
//! A grid stores node values of `(y, U, V, H)` over a nonuniform `ξ`-mesh
//! together with per-cell derivatives. Projected data produces three cells
//! per Eulerian double cell: a (possibly zero-width) plateau cell carrying
//! the singular mass at `x_{2j}`, then one cell per linear half.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::eulerian::{InitialData, WaveProfile};
use crate::math;
use crate::projection::ProjectedData;
use crate::pwl::{Breakpoint, PiecewiseLinearFn};

/// Lagrangian state at one instant: nodes, per-cell derivatives, per-cell
/// breaking times and the left asymptotes of `(y − id, U)`.
#[derive(Clone, Debug)]
pub struct LagrangianGrid {
    pub t: f64,
    /// Nondecreasing node coordinates; zero-width cells are kept so that
    /// projected grids have a regular three-cells-per-double-cell layout.
    pub xi: Vec<f64>,
    pub y: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub h: Vec<f64>,
    /// Per-cell derivatives (`len = xi.len() − 1`).
    pub dy: Vec<f64>,
    pub du: Vec<f64>,
    pub dv: Vec<f64>,
    pub dh: Vec<f64>,
    /// Per-cell breaking time: `0` (already broken / plateau), finite, or `∞`.
    pub tau: Vec<f64>,
    /// Left asymptote of `y − id`.
    pub zeta_minus: f64,
    /// Left asymptote of `U`.
    pub u_minus: f64,
}

impl LagrangianGrid {
    pub fn num_nodes(&self) -> usize {
        self.xi.len()
    }

    pub fn num_cells(&self) -> usize {
        self.xi.len().saturating_sub(1)
    }

    /// Total Lagrangian energy `V_∞`.
    pub fn v_inf(&self) -> f64 {
        self.v.last().copied().unwrap_or(0.0)
    }

    pub fn h_inf(&self) -> f64 {
        self.h.last().copied().unwrap_or(0.0)
    }

    /// Right asymptote of `y − id`.
    pub fn zeta_plus(&self) -> f64 {
        match (self.y.last(), self.xi.last()) {
            (Some(y), Some(xi)) => y - xi,
            _ => self.zeta_minus,
        }
    }

    pub fn u_plus(&self) -> f64 {
        self.u.last().copied().unwrap_or(self.u_minus)
    }

    fn node_interp(&self, values: &[f64], tail_left: f64, tail_right: f64, xi: f64) -> f64 {
        if self.xi.is_empty() {
            return tail_left;
        }
        if xi <= self.xi[0] {
            return tail_left;
        }
        let n = self.xi.len();
        if xi >= self.xi[n - 1] {
            return tail_right;
        }
        let i = self.xi.partition_point(|&x| x < xi);
        let (x0, x1) = (self.xi[i - 1], self.xi[i]);
        if x1 == x0 {
            return values[i];
        }
        let w = (xi - x0) / (x1 - x0);
        values[i - 1] + w * (values[i] - values[i - 1])
    }

    /// Characteristic position at the label `xi` (identity plus asymptote in
    /// the tails).
    pub fn y_at(&self, xi: f64) -> f64 {
        if self.xi.is_empty() || xi <= self.xi[0] {
            return xi + self.zeta_minus;
        }
        if xi >= *self.xi.last().unwrap() {
            return xi + self.zeta_plus();
        }
        self.node_interp(&self.y, 0.0, 0.0, xi)
    }

    pub fn u_at(&self, xi: f64) -> f64 {
        if self.xi.is_empty() || xi <= self.xi[0] {
            return self.u_minus;
        }
        self.node_interp(&self.u, self.u_minus, self.u_plus(), xi)
    }

    pub fn v_at(&self, xi: f64) -> f64 {
        if self.xi.is_empty() || xi <= self.xi[0] {
            return 0.0;
        }
        self.node_interp(&self.v, 0.0, self.v_inf(), xi)
    }

    pub fn h_at(&self, xi: f64) -> f64 {
        if self.xi.is_empty() || xi <= self.xi[0] {
            return 0.0;
        }
        self.node_interp(&self.h, 0.0, self.h_inf(), xi)
    }
}

/// Slope classification threshold for the breaking-time trichotomy; the
/// exact-arithmetic cases `U_ξ = 0` are recognized up to this tolerance.
fn slope_tolerance(max_abs_du: f64) -> f64 {
    1e-12 * (1.0 + max_abs_du)
}

fn cell_tau(dy: f64, du: f64, tol: f64) -> f64 {
    if du < -tol {
        -2.0 * dy / du
    } else if math::abs(du) <= tol && math::abs(dy) <= tol {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Per-cell wave-breaking times of a grid at `t = 0`: `0` where the cell is
/// already degenerate, `−2 y_ξ / U_ξ` where `U_ξ < 0`, `∞` otherwise.
pub fn breaking_times(grid: &LagrangianGrid) -> Vec<f64> {
    let max_du = grid.du.iter().fold(0.0f64, |m, &d| m.max(math::abs(d)));
    let tol = slope_tolerance(max_du);
    grid.dy
        .iter()
        .zip(&grid.du)
        .map(|(&dy, &du)| cell_tau(dy, du, tol))
        .collect()
}

/// The transform `L` applied to projected data, using the grid relation
/// `ξ_{3j} = x_{2j} + G_Δx(x_{2j})`, `ξ_{3j+1} = x_{2j} + G_Δx(x_{2j}+)`,
/// `ξ_{3j+2} = x_{2j+1} + G_Δx(x_{2j+1})`.
pub fn to_lagrangian_grid(proj: &ProjectedData) -> LagrangianGrid {
    let n_cells = proj.num_cells();
    let mut xi = Vec::with_capacity(3 * n_cells + 1);
    let mut y = Vec::with_capacity(3 * n_cells + 1);
    let mut u = Vec::with_capacity(3 * n_cells + 1);
    let mut dy = Vec::with_capacity(3 * n_cells);
    let mut du = Vec::with_capacity(3 * n_cells);
    let mut dv = Vec::with_capacity(3 * n_cells);
    let mut dh = Vec::with_capacity(3 * n_cells);

    for (i, c) in proj.cells.iter().enumerate() {
        let x0 = proj.x_left(i);
        let mid = x0 + proj.dx;
        let (f0_left, f0_right) = proj.f_dx(x0);
        let f_mid = proj.f_dx(mid).0;
        let u0 = c.u_left;
        let u_mid = u0 + c.first_slope() * proj.dx;

        // Plateau cell carrying the singular mass at x_{2j}.
        xi.push(x0 + f0_left);
        y.push(x0);
        u.push(u0);
        let plateau = f0_right - f0_left;
        if plateau > 0.0 {
            dy.push(0.0);
            du.push(0.0);
            dv.push(1.0);
            dh.push(1.0);
        } else {
            dy.push(0.0);
            du.push(0.0);
            dv.push(0.0);
            dh.push(0.0);
        }

        // First linear half.
        xi.push(x0 + f0_right);
        y.push(x0);
        u.push(u0);
        let s1 = c.first_slope();
        let g1 = 1.0 / (1.0 + s1 * s1);
        dy.push(g1);
        du.push(s1 * g1);
        dv.push(s1 * s1 * g1);
        dh.push(s1 * s1 * g1);

        // Second linear half.
        xi.push(mid + f_mid);
        y.push(mid);
        u.push(u_mid);
        let s2 = c.second_slope();
        let g2 = 1.0 / (1.0 + s2 * s2);
        dy.push(g2);
        du.push(s2 * g2);
        dv.push(s2 * s2 * g2);
        dh.push(s2 * s2 * g2);
    }
    let x_last = proj.x_last();
    xi.push(x_last + proj.f_dx(x_last).0);
    y.push(x_last);
    u.push(proj.u_right_tail);

    let v: Vec<f64> = xi.iter().zip(&y).map(|(&xi, &y)| xi - y).collect();
    let h = v.clone();
    let mut grid = LagrangianGrid {
        t: 0.0,
        xi,
        y,
        u,
        v,
        h,
        dy,
        du,
        dv,
        dh,
        tau: Vec::new(),
        zeta_minus: 0.0,
        u_minus: proj.u_left_tail,
    };
    grid.tau = breaking_times(&grid);
    grid
}

/// The transform `L` applied directly to piecewise linear initial data, with
/// grid nodes at the data's own breakpoints. Used for exact reference
/// evolutions that bypass the projection.
pub fn from_initial_pl(data: &InitialData) -> Result<LagrangianGrid> {
    let u_pl = match &data.profile {
        WaveProfile::PiecewiseLinear { u, .. } => u,
        WaveProfile::Cusp => {
            return Err(Error::Parameter(
                "exact Lagrangian grids require a piecewise linear profile".into(),
            ))
        }
    };
    let mut xs: Vec<f64> = u_pl.points().iter().map(|p| p.x).collect();
    xs.extend(data.measure.atoms.iter().map(|&(x, _)| x));
    if let Some(sc) = &data.measure.sc {
        xs.extend(sc.points().iter().map(|p| p.x));
    }
    xs.sort_unstable_by(f64::total_cmp);
    xs.dedup();
    if xs.is_empty() {
        xs.push(0.0);
    }

    let mut xi = Vec::new();
    let mut y = Vec::new();
    let mut u = Vec::new();
    let mut dy = Vec::new();
    let mut du = Vec::new();
    let mut dv = Vec::new();
    let mut dh = Vec::new();

    for (i, &x) in xs.iter().enumerate() {
        let (fl, fr) = data.cumulative(x);
        let uval = data.u(x);
        xi.push(x + fl);
        y.push(x);
        u.push(uval);
        if fr > fl {
            dy.push(0.0);
            du.push(0.0);
            dv.push(1.0);
            dh.push(1.0);
        } else {
            dy.push(0.0);
            du.push(0.0);
            dv.push(0.0);
            dh.push(0.0);
        }
        xi.push(x + fr);
        y.push(x);
        u.push(uval);
        if i + 1 < xs.len() {
            let xn = xs[i + 1];
            let seg = xn - x;
            let s = (data.u(xn) - uval) / seg;
            // Energy density of the segment, including any tabulated
            // singular-continuous slope.
            let g = (data.cumulative(xn).0 - fr) / seg;
            let yx = 1.0 / (1.0 + g);
            dy.push(yx);
            du.push(s * yx);
            dv.push(g * yx);
            dh.push(g * yx);
        }
    }

    let v: Vec<f64> = xi.iter().zip(&y).map(|(&xi, &y)| xi - y).collect();
    let h = v.clone();
    let mut grid = LagrangianGrid {
        t: 0.0,
        xi,
        y,
        u,
        v,
        h,
        dy,
        du,
        dv,
        dh,
        tau: Vec::new(),
        zeta_minus: 0.0,
        u_minus: u_pl.left_tail(),
    };
    grid.tau = breaking_times(&grid);
    Ok(grid)
}

/// Pointwise transform `L` for arbitrary data:
/// `y(ξ) = sup{x : x + ν((−∞,x)) < ξ}` by monotone bisection, then
/// `U = u(y)`, `H = ξ − y`, `V = H` (since `μ = ν`).
pub fn lagrangian_at(data: &InitialData, xi: f64) -> (f64, f64, f64, f64) {
    let (w0, w1) = data.window();
    let total = data.f_total();
    let mut lo = xi.min(w0) - 1.0;
    let mut hi = (xi).max(w1) + 1.0;
    debug_assert!(lo + data.cumulative(lo).0 < xi);
    while hi - lo > 1e-14 * (1.0 + math::abs(lo) + math::abs(hi) + total) {
        let mid = 0.5 * (lo + hi);
        if mid + data.cumulative(mid).0 < xi {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let y = 0.5 * (lo + hi);
    let u = data.u(y);
    let h = xi - y;
    (y, u, h, h)
}

/// Eulerian snapshot recovered by the pushforward map `M`.
#[derive(Clone, Debug)]
pub struct EulerianSolution {
    pub t: f64,
    pub u: PiecewiseLinearFn,
    /// Cumulative of `μ`, left-continuous increasing.
    pub f: PiecewiseLinearFn,
    /// Cumulative of `ν`.
    pub g: PiecewiseLinearFn,
}

/// The recovery map `M`: nodes at `{y(ξ_j)}` with coincident nodes merged;
/// the cumulative jumps by `∫ V_ξ` over each collapsed group.
pub fn to_eulerian(grid: &LagrangianGrid) -> Result<EulerianSolution> {
    let n = grid.num_nodes();
    if n == 0 {
        return Ok(EulerianSolution {
            t: grid.t,
            u: PiecewiseLinearFn::constant(grid.u_minus),
            f: PiecewiseLinearFn::constant(0.0),
            g: PiecewiseLinearFn::constant(0.0),
        });
    }
    let mut u_nodes: Vec<(f64, f64)> = Vec::with_capacity(n);
    let mut f_pts: Vec<Breakpoint> = Vec::with_capacity(n);
    let mut g_pts: Vec<Breakpoint> = Vec::with_capacity(n);

    let mut start = 0usize;
    for k in 0..n {
        let last_in_group = if k + 1 < n {
            let step = grid.y[k + 1] - grid.y[k];
            if step < -1e-12 * (1.0 + math::abs(grid.y[k])) {
                return Err(Error::CorruptedState(format!(
                    "y decreases by {step:e} across node {k}"
                )));
            }
            step > 1e-13 * (1.0 + math::abs(grid.y[k]))
        } else {
            true
        };
        if last_in_group {
            let x = grid.y[start];
            u_nodes.push((x, grid.u[start]));
            f_pts.push(Breakpoint {
                x,
                left: grid.v[start],
                right: grid.v[k],
            });
            g_pts.push(Breakpoint {
                x,
                left: grid.h[start],
                right: grid.h[k],
            });
            start = k + 1;
        }
    }

    Ok(EulerianSolution {
        t: grid.t,
        u: PiecewiseLinearFn::continuous(&u_nodes)?,
        f: PiecewiseLinearFn::with_jumps(f_pts)?,
        g: PiecewiseLinearFn::with_jumps(g_pts)?,
    })
}

/// Named worst-case violations of the Lagrangian set membership conditions.
#[derive(Clone, Debug)]
pub struct InvariantReport {
    pub rows: Vec<(&'static str, f64)>,
}

impl InvariantReport {
    pub fn max_violation(&self) -> f64 {
        self.rows.iter().fold(0.0, |m, &(_, v)| m.max(v))
    }

    pub fn worst(&self) -> Option<(&'static str, f64)> {
        self.rows
            .iter()
            .copied()
            .max_by(|a, b| a.1.total_cmp(&b.1))
    }

    pub fn format(&self) -> String {
        let mut s = String::new();
        for (name, v) in &self.rows {
            s.push_str(&format!("{name}: {v:e}\n"));
        }
        s
    }
}

/// Verifies the per-cell membership conditions: monotone `ξ`, `y`, `H`;
/// nonnegative `y_ξ`, `H_ξ`; `0 ≤ V_ξ ≤ H_ξ`; `y_ξ V_ξ = U_ξ²`; consistency
/// of node increments with cell derivatives; and, at `t = 0`, `y + H = id`
/// and `V = H`.
pub fn check_lagrangian_invariants(grid: &LagrangianGrid) -> InvariantReport {
    let mut xi_sorted = 0.0f64;
    let mut y_mono = 0.0f64;
    let mut h_mono = 0.0f64;
    let mut dy_neg = 0.0f64;
    let mut dh_neg = 0.0f64;
    let mut v_range = 0.0f64;
    let mut compat = 0.0f64;
    let mut consistency = 0.0f64;
    let mut id_sum = 0.0f64;
    let mut v_eq_h = 0.0f64;

    for k in 0..grid.num_cells() {
        let w = grid.xi[k + 1] - grid.xi[k];
        xi_sorted = xi_sorted.max(-w);
        y_mono = y_mono.max(grid.y[k] - grid.y[k + 1]);
        h_mono = h_mono.max(grid.h[k] - grid.h[k + 1]);
        dy_neg = dy_neg.max(-grid.dy[k]);
        dh_neg = dh_neg.max(-grid.dh[k]);
        v_range = v_range.max(-grid.dv[k]).max(grid.dv[k] - grid.dh[k]);
        compat = compat.max(math::abs(
            grid.dy[k] * grid.dv[k] - grid.du[k] * grid.du[k],
        ));
        for (nodes, d) in [
            (&grid.y, &grid.dy),
            (&grid.u, &grid.du),
            (&grid.v, &grid.dv),
            (&grid.h, &grid.dh),
        ] {
            consistency = consistency.max(math::abs(nodes[k + 1] - nodes[k] - d[k] * w));
        }
    }
    if grid.t == 0.0 {
        for k in 0..grid.num_nodes() {
            id_sum = id_sum.max(math::abs(grid.y[k] + grid.h[k] - grid.xi[k]));
            v_eq_h = v_eq_h.max(math::abs(grid.v[k] - grid.h[k]));
        }
    }

    InvariantReport {
        rows: alloc::vec![
            ("xi-nondecreasing", xi_sorted),
            ("y-nondecreasing", y_mono),
            ("h-nondecreasing", h_mono),
            ("dy-nonnegative", dy_neg),
            ("dh-nonnegative", dh_neg),
            ("v-between-0-and-h", v_range),
            ("compatibility-yv-u2", compat),
            ("node-derivative-consistency", consistency),
            ("y-plus-h-identity", id_sum),
            ("v-equals-h-initially", v_eq_h),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eulerian::EnergyMeasure;
    use crate::exact;
    use crate::projection::project;

    #[test]
    fn atom_cell_spans_unit_interval() {
        let data = exact::ex41_data();
        let proj = project(&data, 0.5).unwrap();
        let grid = to_lagrangian_grid(&proj);
        // The atom of mass 1 at x = 0 occupies ξ ∈ [0, 1].
        let i0 = grid.xi.iter().position(|&x| x == 0.0).unwrap();
        assert_eq!(grid.y[i0], 0.0);
        assert_eq!(grid.xi[i0 + 1], 1.0);
        assert_eq!(grid.y[i0 + 1], 0.0);
        assert_eq!(grid.dv[i0], 1.0);
        assert_eq!(grid.tau[i0], 0.0);
        let report = check_lagrangian_invariants(&grid);
        assert!(report.max_violation() < 1e-12, "{}", report.format());
    }

    #[test]
    fn matches_appendix_segment() {
        // ȳ = (ξ+2)/5 and V̄ = (4ξ−2)/5 on 3 < ξ ≤ 8.
        let data = exact::ex41_data();
        let grid = from_initial_pl(&data).unwrap();
        assert!((grid.y_at(5.0) - 7.0 / 5.0).abs() < 1e-13);
        assert!((grid.v_at(5.0) - 18.0 / 5.0).abs() < 1e-13);
        assert!((grid.v_inf() - 6.0).abs() < 1e-13);
    }

    #[test]
    fn empty_measure_is_identity() {
        let data = InitialData::new(WaveProfile::constant(1.0), EnergyMeasure::empty()).unwrap();
        let (y, u, v, h) = lagrangian_at(&data, 4.2);
        assert!((y - 4.2).abs() < 1e-12);
        assert_eq!(u, 1.0);
        assert!(v.abs() < 1e-12 && h.abs() < 1e-12);
    }

    #[test]
    fn pointwise_map_on_multipeakon() {
        let data = exact::ex41_data();
        // Inside the atom plateau.
        let (y, u, v, h) = lagrangian_at(&data, 0.5);
        assert!(y.abs() < 1e-13);
        assert!((u - 3.0).abs() < 1e-12);
        assert!((h - 0.5).abs() < 1e-13 && (v - 0.5).abs() < 1e-13);
        // Inverting x + G(x) = 2 on the segment G = 1 + x.
        let (y, u, _, h) = lagrangian_at(&data, 2.0);
        assert!((y - 0.5).abs() < 1e-12);
        assert!((u - 2.5).abs() < 1e-12);
        assert!((h - 1.5).abs() < 1e-12);
    }

    #[test]
    fn breaking_times_multipeakon() {
        let data = exact::ex41_data();
        let grid = from_initial_pl(&data).unwrap();
        for (k, &tau) in grid.tau.iter().enumerate() {
            let mid = 0.5 * (grid.xi[k] + grid.xi[k + 1]);
            if grid.xi[k + 1] == grid.xi[k] {
                continue;
            }
            if mid > 0.0 && mid < 1.0 {
                assert_eq!(tau, 0.0, "atom plateau breaks immediately");
            } else if mid > 1.0 && mid < 3.0 {
                assert!((tau - 2.0).abs() < 1e-12, "slope −1 breaks at t = 2");
            } else if mid > 3.0 && mid < 8.0 {
                assert!((tau - 1.0).abs() < 1e-12, "slope −2 breaks at t = 1");
            } else {
                assert_eq!(tau, f64::INFINITY);
            }
        }
    }

    #[test]
    fn round_trip_reproduces_projection() {
        let data = exact::cusp_data();
        let proj = project(&data, 0.25).unwrap();
        let grid = to_lagrangian_grid(&proj);
        let eul = to_eulerian(&grid).unwrap();
        for p in eul.u.points() {
            assert!((p.left - proj.u_dx(p.x)).abs() < 1e-13);
        }
        for p in eul.f.points() {
            let (fl, fr) = proj.f_dx(p.x);
            assert!((p.left - fl).abs() < 1e-12);
            assert!((p.right - fr).abs() < 1e-12);
        }
        assert!((eul.f.right_tail() - proj.f_total()).abs() < 1e-12);
    }

    #[test]
    fn corrupted_grid_reports_compatibility_violation() {
        let data = exact::ex41_data();
        let proj = project(&data, 0.25).unwrap();
        let mut grid = to_lagrangian_grid(&proj);
        let k = grid.num_cells() / 2;
        grid.du[k] += 0.5;
        let report = check_lagrangian_invariants(&grid);
        let (name, v) = report.worst().unwrap();
        assert!(
            name == "compatibility-yv-u2" || name == "node-derivative-consistency",
            "{name} {v}"
        );
        assert!(v > 1e-3);
    }
}
