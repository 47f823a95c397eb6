//! Time evolution of a Lagrangian grid with position-dependent energy
//! dissipation.
//!
//! Between wave-breaking events every cell evolves in closed form: `H_ξ` is
//! constant, `V_ξ` is constant except for a single drop by the factor
//! `(1 − β)` when the cell's breaking time passes, `U_ξ` integrates `½V_ξ`
//! and `y_ξ` integrates `U_ξ`. Each cell breaks at most once, at the time
//! prescribed by the initial data, so the whole trajectory is parameterized
//! by one `(τ, β)` pair per cell.
//!
//! The dissipation fraction `β` of a cell should be `α` evaluated at the
//! breaking position. Positions depend on all earlier dissipation, so `β` is
//! computed interval by interval over the breaking-time schedule with a
//! contraction iteration: each pass re-evaluates `α` at the positions
//! produced by the previous pass, until successive position functions agree
//! within `ε = Δx²/‖α′‖∞` in sup norm over the interval's event times.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::eulerian::AlphaFunction;
use crate::lagrangian::{to_eulerian, EulerianSolution, LagrangianGrid};
use crate::math;

/// Default iteration guard; the stopping rule is expected to fire after at
/// most three passes.
pub const MAX_ITERATIONS: u32 = 50;

/// Merge tolerance for numerically equal breaking times.
fn dedup_tol(t: f64) -> f64 {
    1e-12 * (1.0 + math::abs(t))
}

/// Non-uniform temporal discretization of `[0, T]`: `0`, the distinct
/// finite breaking times, and `T`.
#[derive(Clone, Debug)]
pub struct BreakingSchedule {
    pub times: Vec<f64>,
}

/// Extracts the sorted, deduplicated cell breaking times in `(0, T]`,
/// prepends `0` and appends `T`. For spatially varying `α` the intervals are
/// additionally capped at `Δt = 1/(1 + ‖α′‖∞(‖U‖∞ + ¼ T V_∞))` so that the
/// per-interval iteration stays contractive.
pub fn extract_breaking_times(
    grid: &LagrangianGrid,
    t_end: f64,
    alpha: &AlphaFunction,
) -> BreakingSchedule {
    let mut times: Vec<f64> = grid
        .tau
        .iter()
        .copied()
        .filter(|&t| t > 0.0 && t <= t_end && t.is_finite())
        .collect();
    times.sort_unstable_by(f64::total_cmp);

    let mut kept: Vec<f64> = vec![0.0];
    for t in times {
        let last = *kept.last().unwrap();
        if t - last <= dedup_tol(t) {
            if kept.len() > 1 {
                // Same event up to round-off; keep the latest representative.
                *kept.last_mut().unwrap() = t;
            }
        } else {
            kept.push(t);
        }
    }
    if t_end - *kept.last().unwrap() > dedup_tol(t_end) {
        kept.push(t_end);
    } else {
        *kept.last_mut().unwrap() = t_end;
    }

    let lip = alpha.lipschitz();
    if lip > 0.0 {
        let sup_u = grid
            .u
            .iter()
            .fold(math::abs(grid.u_minus), |m, &v| m.max(math::abs(v)));
        let cap = 1.0 / (1.0 + lip * (sup_u + 0.25 * t_end * grid.v_inf()));
        let mut refined = Vec::with_capacity(kept.len());
        refined.push(kept[0]);
        for w in kept.windows(2) {
            let gap = w[1] - w[0];
            if gap > cap {
                let parts = math::ceil(gap / cap) as usize;
                for p in 1..parts {
                    refined.push(w[0] + gap * p as f64 / parts as f64);
                }
            }
            refined.push(w[1]);
        }
        kept = refined;
    }
    BreakingSchedule { times: kept }
}

/// Per-cell derivative quadruple `(y_ξ, U_ξ, V_ξ, H_ξ)` at some instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellDerivs {
    pub dy: f64,
    pub du: f64,
    pub dv: f64,
    pub dh: f64,
}

/// Closed-form evolution of one cell from time `s` to `t ≥ s`.
///
/// The `V_ξ` drop by the factor `(1 − β)` fires when `s < τ_break ≤ t`;
/// a state taken at `s ≥ τ_break` is assumed to carry the drop already.
pub fn evolve_half_cell(at_s: CellDerivs, s: f64, t: f64, beta: f64, tau_break: f64) -> CellDerivs {
    debug_assert!(t >= s);
    if beta != 0.0 && tau_break > s && tau_break <= t {
        let dt0 = tau_break - s;
        let du_break = at_s.du + 0.5 * at_s.dv * dt0;
        let dy_break = at_s.dy + at_s.du * dt0 + 0.25 * at_s.dv * dt0 * dt0;
        let dv_post = (1.0 - beta) * at_s.dv;
        let dt1 = t - tau_break;
        CellDerivs {
            dy: dy_break + du_break * dt1 + 0.25 * dv_post * dt1 * dt1,
            du: du_break + 0.5 * dv_post * dt1,
            dv: dv_post,
            dh: at_s.dh,
        }
    } else {
        let dt = t - s;
        CellDerivs {
            dy: at_s.dy + at_s.du * dt + 0.25 * at_s.dv * dt * dt,
            du: at_s.du + 0.5 * at_s.dv * dt,
            dv: at_s.dv,
            dh: at_s.dh,
        }
    }
}

/// Asymptote base state at the start of an interval.
#[derive(Clone, Copy, Debug)]
pub struct AsymptoteBase {
    pub t0: f64,
    pub u_minus: f64,
    pub zeta_minus: f64,
    pub v_inf: f64,
}

/// Left asymptotes `(U_{−∞}(t), ζ_{−∞}(t))` given the dissipation events
/// `(τ_m, β_m V_ξ,m Δξ_m)` with `τ_m > t0` that have fired by time `t`:
///
/// `U_{−∞}(t) = U_{−∞}(t0) − ¼V_∞(t0)(t−t0) + ¼Σ mass·(t−τ_m)` and the
/// analogous quadratic expression with coefficient `⅛` for `ζ_{−∞}`.
pub fn update_asymptotes(base: &AsymptoteBase, events: &[(f64, f64)], t: f64) -> (f64, f64) {
    let dt = t - base.t0;
    let mut lin = 0.0;
    let mut sq = 0.0;
    for &(tau, mass) in events {
        if tau <= t {
            lin += mass * (t - tau);
            sq += mass * (t - tau) * (t - tau);
        }
    }
    let u_minus = base.u_minus - 0.25 * base.v_inf * dt + 0.25 * lin;
    let zeta_minus =
        base.zeta_minus + base.u_minus * dt - 0.125 * base.v_inf * dt * dt + 0.125 * sq;
    (u_minus, zeta_minus)
}

fn kahan_prefix(values: impl Iterator<Item = f64>, n_plus_one: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_plus_one);
    out.push(0.0);
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for v in values {
        let y = v - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
        out.push(sum);
    }
    out
}

/// Binary-indexed tree over cell indices for prefix sums of finalized
/// dissipation events.
struct Fenwick {
    tree: Vec<f64>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Self {
            tree: vec![0.0; n + 1],
        }
    }

    fn add(&mut self, mut i: usize, v: f64) {
        i += 1;
        while i < self.tree.len() {
            self.tree[i] += v;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum over indices `< i`.
    fn prefix(&self, mut i: usize) -> f64 {
        let mut s = 0.0;
        while i > 0 {
            s += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        s
    }
}

/// Result of the dissipation iteration on one schedule interval.
#[derive(Clone, Debug)]
pub struct IntervalOutcome {
    pub m_it: u32,
    /// `(cell index, applied β)` for the cells breaking in the interval.
    pub betas: Vec<(usize, f64)>,
}

/// Evolution driver holding the initial grid in prefix form plus the
/// finalized dissipation events of all intervals processed so far.
pub struct Evolver {
    xi: Vec<f64>,
    tau: Vec<f64>,
    dv0: Vec<f64>,
    widths: Vec<f64>,
    pz: Vec<f64>,
    pu: Vec<f64>,
    pv: Vec<f64>,
    u_minus0: f64,
    v_inf0: f64,
    /// Massive breaking cells ordered by breaking time, so an interval's
    /// cells are one binary-searched slice.
    by_tau: Vec<(f64, usize)>,
    fen_mass: Fenwick,
    fen_mass_tau: Fenwick,
    fen_mass_tau2: Fenwick,
    g_mass: f64,
    g_mass_tau: f64,
    g_mass_tau2: f64,
}

impl Evolver {
    pub fn new(grid: &LagrangianGrid) -> Result<Self> {
        if grid.t != 0.0 {
            return Err(Error::Parameter(
                "evolution starts from a grid at t = 0".into(),
            ));
        }
        let n_cells = grid.num_cells();
        let widths: Vec<f64> = (0..n_cells)
            .map(|k| grid.xi[k + 1] - grid.xi[k])
            .collect();
        let pz = kahan_prefix(
            (0..n_cells).map(|k| (grid.dy[k] - 1.0) * widths[k]),
            n_cells + 1,
        );
        let pu = kahan_prefix((0..n_cells).map(|k| grid.du[k] * widths[k]), n_cells + 1);
        let pv = kahan_prefix((0..n_cells).map(|k| grid.dv[k] * widths[k]), n_cells + 1);
        let v_inf0 = *pv.last().unwrap();
        let mut by_tau: Vec<(f64, usize)> = (0..n_cells)
            .filter(|&k| {
                grid.tau[k] > 0.0 && grid.tau[k].is_finite() && grid.dv[k] * widths[k] > 0.0
            })
            .map(|k| (grid.tau[k], k))
            .collect();
        by_tau.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self {
            xi: grid.xi.clone(),
            tau: grid.tau.clone(),
            dv0: grid.dv.clone(),
            widths,
            pz,
            pu,
            pv,
            u_minus0: grid.u_minus,
            v_inf0,
            by_tau,
            fen_mass: Fenwick::new(n_cells),
            fen_mass_tau: Fenwick::new(n_cells),
            fen_mass_tau2: Fenwick::new(n_cells),
            g_mass: 0.0,
            g_mass_tau: 0.0,
            g_mass_tau2: 0.0,
        })
    }

    /// Characteristic position `y(t, ξ_j)` under the finalized events plus
    /// the tentative events `(cell, mass, τ)` of the interval currently
    /// being iterated.
    fn y_node(&self, t: f64, j: usize, tentative: &[(usize, f64, f64)]) -> f64 {
        let mut sq_all = self.g_mass * t * t - 2.0 * self.g_mass_tau * t + self.g_mass_tau2;
        let mut sq_pref = self.fen_mass.prefix(j) * t * t - 2.0 * self.fen_mass_tau.prefix(j) * t
            + self.fen_mass_tau2.prefix(j);
        for &(cell, mass, tau) in tentative {
            if tau <= t {
                let d = mass * (t - tau) * (t - tau);
                sq_all += d;
                if cell < j {
                    sq_pref += d;
                }
            }
        }
        let zeta_minus = self.u_minus0 * t - 0.125 * self.v_inf0 * t * t + 0.125 * sq_all;
        self.xi[j] + zeta_minus + self.pz[j] + t * self.pu[j] + 0.25 * t * t * self.pv[j]
            - 0.25 * sq_pref
    }

    /// Runs the dissipation iteration on `(t0, t1]` and returns the applied
    /// `β` per breaking cell. `eps = 0` demands exact agreement of
    /// successive iterates, which holds whenever all breaking happens at the
    /// interval endpoint.
    pub fn iterate_interval(
        &self,
        interval_index: usize,
        t0: f64,
        t1: f64,
        alpha: &AlphaFunction,
        eps: f64,
        max_iterations: u32,
    ) -> Result<IntervalOutcome> {
        let lo = self.by_tau.partition_point(|&(tau, _)| tau <= t0);
        let hi = self.by_tau.partition_point(|&(tau, _)| tau <= t1);
        let mut cells: Vec<usize> = self.by_tau[lo..hi].iter().map(|&(_, k)| k).collect();
        cells.sort_unstable();
        if cells.is_empty() {
            return Ok(IntervalOutcome {
                m_it: 1,
                betas: Vec::new(),
            });
        }
        if alpha.is_constant() {
            let b = alpha.eval(0.0).clamp(0.0, 1.0);
            return Ok(IntervalOutcome {
                m_it: 1,
                betas: cells.into_iter().map(|k| (k, b)).collect(),
            });
        }

        let mut event_times: Vec<f64> = cells.iter().map(|&k| self.tau[k]).collect();
        event_times.push(t1);
        event_times.sort_unstable_by(f64::total_cmp);
        event_times.dedup();

        let mut beta_prev: Vec<f64> = vec![0.0; cells.len()];
        let mut last_sup = f64::INFINITY;
        for n in 2..=max_iterations {
            // β^n from the positions of the previous iterate at the left
            // node of each breaking cell.
            let tentative: Vec<(usize, f64, f64)> = cells
                .iter()
                .zip(&beta_prev)
                .map(|(&k, &b)| (k, b * self.dv0[k] * self.widths[k], self.tau[k]))
                .collect();
            let beta_next: Vec<f64> = cells
                .iter()
                .map(|&k| {
                    alpha
                        .eval(self.y_node(t1, k, &tentative))
                        .clamp(0.0, 1.0)
                })
                .collect();

            // sup over event times of the node-wise gap between the two
            // iterates' position functions.
            let mut sup = 0.0f64;
            for &t in &event_times {
                let mut total = 0.0;
                let deltas: Vec<f64> = cells
                    .iter()
                    .enumerate()
                    .map(|(i, &k)| {
                        let tau = self.tau[k];
                        if tau <= t {
                            let d = (beta_next[i] - beta_prev[i])
                                * self.dv0[k]
                                * self.widths[k]
                                * (t - tau)
                                * (t - tau);
                            total += d;
                            d
                        } else {
                            0.0
                        }
                    })
                    .collect();
                let mut running = 0.0;
                let mut best = math::abs(0.125 * total);
                for &d in &deltas {
                    running += d;
                    best = best.max(math::abs(0.125 * total - 0.25 * running));
                }
                sup = sup.max(best);
            }

            if sup <= eps {
                return Ok(IntervalOutcome {
                    m_it: n,
                    betas: cells.into_iter().zip(beta_next).collect(),
                });
            }
            last_sup = sup;
            beta_prev = beta_next;
        }
        Err(Error::NonContraction {
            interval: interval_index,
            t_start: t0,
            t_end: t1,
            iterations: max_iterations,
            residual: last_sup,
            eps,
        })
    }

    /// Commits the interval's betas as finalized events.
    fn finalize(&mut self, betas: &[(usize, f64)]) {
        for &(k, b) in betas {
            let mass = b * self.dv0[k] * self.widths[k];
            if mass == 0.0 {
                continue;
            }
            let tau = self.tau[k];
            self.fen_mass.add(k, mass);
            self.fen_mass_tau.add(k, mass * tau);
            self.fen_mass_tau2.add(k, mass * tau * tau);
            self.g_mass += mass;
            self.g_mass_tau += mass * tau;
            self.g_mass_tau2 += mass * tau * tau;
        }
    }
}

/// Fully solved evolution: every cell's `(τ, β)` is fixed, so any state in
/// `[0, T]` is reconstructed in closed form.
#[derive(Clone, Debug)]
pub struct Trajectory {
    base: LagrangianGrid,
    widths: Vec<f64>,
    pz: Vec<f64>,
    pu: Vec<f64>,
    pv: Vec<f64>,
    ph: Vec<f64>,
    beta: Vec<f64>,
    /// Dissipation events `(τ, β V_ξ Δξ)` sorted by time.
    events: Vec<(f64, f64)>,
    /// Prefix sums of event mass over the time order.
    ev_mass_prefix: Vec<f64>,
    schedule: Vec<f64>,
    m_it: Vec<u32>,
    t_end: f64,
}

/// Runs the full pipeline: schedule extraction followed by the per-interval
/// dissipation iteration. `dx` fixes the stopping threshold
/// `ε = Δx²/‖α′‖∞`; pass `dx = 0` (or a constant `α`) for the exact paths.
pub fn solve(
    grid: &LagrangianGrid,
    alpha: &AlphaFunction,
    t_end: f64,
    dx: f64,
) -> Result<Trajectory> {
    if !(t_end > 0.0) {
        return Err(Error::Parameter("final time must be positive".into()));
    }
    let schedule = extract_breaking_times(grid, t_end, alpha);
    let lip = alpha.lipschitz();
    let eps = if lip > 0.0 && dx > 0.0 {
        dx * dx / lip
    } else {
        0.0
    };
    solve_with_schedule(grid, alpha, &schedule, eps)
}

/// Same as [`solve`] with an explicit schedule and stopping threshold.
pub fn solve_with_schedule(
    grid: &LagrangianGrid,
    alpha: &AlphaFunction,
    schedule: &BreakingSchedule,
    eps: f64,
) -> Result<Trajectory> {
    let mut engine = Evolver::new(grid)?;
    let n_cells = grid.num_cells();
    let mut beta = vec![0.0f64; n_cells];
    let mut m_its = Vec::with_capacity(schedule.times.len().saturating_sub(1));
    for (idx, w) in schedule.times.windows(2).enumerate() {
        let outcome = engine.iterate_interval(idx, w[0], w[1], alpha, eps, MAX_ITERATIONS)?;
        for &(k, b) in &outcome.betas {
            beta[k] = b;
        }
        engine.finalize(&outcome.betas);
        m_its.push(outcome.m_it);
    }

    let mut events: Vec<(f64, f64)> = (0..n_cells)
        .filter(|&k| beta[k] > 0.0 && grid.dv[k] * engine.widths[k] > 0.0)
        .map(|k| (grid.tau[k], beta[k] * grid.dv[k] * engine.widths[k]))
        .collect();
    events.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    let ev_mass_prefix = kahan_prefix(events.iter().map(|e| e.1), events.len() + 1);

    let ph = kahan_prefix(
        (0..n_cells).map(|k| grid.dh[k] * engine.widths[k]),
        n_cells + 1,
    );
    Ok(Trajectory {
        base: grid.clone(),
        widths: engine.widths,
        pz: engine.pz,
        pu: engine.pu,
        pv: engine.pv,
        ph,
        beta,
        events,
        ev_mass_prefix,
        schedule: schedule.times.clone(),
        m_it: m_its,
        t_end: *schedule.times.last().unwrap_or(&0.0),
    })
}

impl Trajectory {
    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn schedule(&self) -> &[f64] {
        &self.schedule
    }

    /// Iteration counts per schedule interval.
    pub fn iteration_counts(&self) -> &[u32] {
        &self.m_it
    }

    pub fn max_iterations(&self) -> u32 {
        self.m_it.iter().copied().max().unwrap_or(0)
    }

    /// Applied dissipation fraction per cell.
    pub fn betas(&self) -> &[f64] {
        &self.beta
    }

    /// Dissipation events `(τ, β V_ξ Δξ)` in time order.
    pub fn events(&self) -> &[(f64, f64)] {
        &self.events
    }

    pub fn base(&self) -> &LagrangianGrid {
        &self.base
    }

    /// Total Lagrangian energy `V_∞(t)`.
    pub fn v_inf_at(&self, t: f64) -> f64 {
        let e = self.events.partition_point(|&(tau, _)| tau <= t);
        self.pv[self.pv.len() - 1] - self.ev_mass_prefix[e]
    }

    /// Left asymptotes `(U_{−∞}(t), ζ_{−∞}(t))`.
    pub fn asymptotes_at(&self, t: f64) -> (f64, f64) {
        let base = AsymptoteBase {
            t0: 0.0,
            u_minus: self.base.u_minus,
            zeta_minus: self.base.zeta_minus,
            v_inf: self.pv[self.pv.len() - 1],
        };
        update_asymptotes(&base, &self.events, t)
    }

    /// Grid state at any `t ∈ [0, T]`, reconstructed in closed form.
    pub fn state_at(&self, t: f64) -> LagrangianGrid {
        debug_assert!(t >= 0.0 && t <= self.t_end + dedup_tol(self.t_end));
        let n_cells = self.base.num_cells();
        let n = n_cells + 1;

        // Fired events, totalled once for the asymptotes.
        let mut total_lin = 0.0;
        let mut total_sq = 0.0;
        for k in 0..n_cells {
            if self.beta[k] > 0.0 && self.base.tau[k] <= t {
                let mass = self.beta[k] * self.base.dv[k] * self.widths[k];
                let dt = t - self.base.tau[k];
                total_lin += mass * dt;
                total_sq += mass * dt * dt;
            }
        }
        let v_inf0 = self.pv[n_cells];
        let u_minus = self.base.u_minus - 0.25 * v_inf0 * t + 0.25 * total_lin;
        let zeta_minus = self.base.zeta_minus + self.base.u_minus * t - 0.125 * v_inf0 * t * t
            + 0.125 * total_sq;

        let mut y = Vec::with_capacity(n);
        let mut u = Vec::with_capacity(n);
        let mut v = Vec::with_capacity(n);
        let mut h = Vec::with_capacity(n);
        let mut dy = Vec::with_capacity(n_cells);
        let mut du = Vec::with_capacity(n_cells);
        let mut dv = Vec::with_capacity(n_cells);
        let mut dh = Vec::with_capacity(n_cells);

        let mut c_mass = 0.0f64;
        let mut c_lin = 0.0f64;
        let mut c_sq = 0.0f64;
        for j in 0..n {
            y.push(
                self.base.xi[j] + zeta_minus + self.pz[j] + t * self.pu[j]
                    + 0.25 * t * t * self.pv[j]
                    - 0.25 * c_sq,
            );
            u.push(u_minus + self.pu[j] + 0.5 * t * self.pv[j] - 0.5 * c_lin);
            v.push(self.pv[j] - c_mass);
            h.push(self.ph[j]);
            if j < n_cells {
                let derivs = evolve_half_cell(
                    CellDerivs {
                        dy: self.base.dy[j],
                        du: self.base.du[j],
                        dv: self.base.dv[j],
                        dh: self.base.dh[j],
                    },
                    0.0,
                    t,
                    self.beta[j],
                    self.base.tau[j],
                );
                dy.push(derivs.dy);
                du.push(derivs.du);
                dv.push(derivs.dv);
                dh.push(derivs.dh);
                if self.beta[j] > 0.0 && self.base.tau[j] <= t {
                    let mass = self.beta[j] * self.base.dv[j] * self.widths[j];
                    let dt = t - self.base.tau[j];
                    c_mass += mass;
                    c_lin += mass * dt;
                    c_sq += mass * dt * dt;
                }
            }
        }

        LagrangianGrid {
            t,
            xi: self.base.xi.clone(),
            y,
            u,
            v,
            h,
            dy,
            du,
            dv,
            dh,
            tau: self.base.tau.clone(),
            zeta_minus,
            u_minus,
        }
    }

    /// Eulerian snapshot at `t` via the recovery map.
    pub fn eulerian_at(&self, t: f64) -> Result<EulerianSolution> {
        to_eulerian(&self.state_at(t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact;
    use crate::lagrangian::{check_lagrangian_invariants, from_initial_pl, to_lagrangian_grid};
    use crate::projection::project;

    fn ex41_grid() -> LagrangianGrid {
        from_initial_pl(&exact::ex41_data()).unwrap()
    }

    #[test]
    fn conservative_cell_matches_reference_regime() {
        // Slope −2 segment: derivatives (1/5, −2/5, 4/5, 4/5), breaking at 1.
        let base = CellDerivs {
            dy: 0.2,
            du: -0.4,
            dv: 0.8,
            dh: 0.8,
        };
        for t in [0.0, 0.3, 0.7, 0.99] {
            let d = evolve_half_cell(base, 0.0, t, 0.0, 1.0);
            assert!((d.dy - (t - 1.0) * (t - 1.0) / 5.0).abs() < 1e-15);
            assert!((d.du - 0.4 * (t - 1.0)).abs() < 1e-15);
            assert_eq!(d.dv, 0.8);
        }
    }

    #[test]
    fn dissipative_drop_at_breaking() {
        let base = CellDerivs {
            dy: 0.2,
            du: -0.4,
            dv: 0.8,
            dh: 0.8,
        };
        let d = evolve_half_cell(base, 0.0, 1.5, 0.75, 1.0);
        assert!((d.dv - 0.2).abs() < 1e-15, "V_ξ drops 4/5 → 1/5");
        // Matches the second-regime slopes (t−1)/10 and (t−1)²/20.
        assert!((d.du - 0.05).abs() < 1e-15);
        assert!((d.dy - 0.0125).abs() < 1e-15);
        assert_eq!(d.dh, 0.8);
    }

    #[test]
    fn zero_cell_stays_zero() {
        let base = CellDerivs {
            dy: 0.0,
            du: 0.0,
            dv: 0.0,
            dh: 0.0,
        };
        let d = evolve_half_cell(base, 0.0, 2.7, 0.9, 1.3);
        assert_eq!(
            d,
            CellDerivs {
                dy: 0.0,
                du: 0.0,
                dv: 0.0,
                dh: 0.0
            }
        );
    }

    #[test]
    fn asymptotes_match_reference_regimes() {
        let base = AsymptoteBase {
            t0: 0.0,
            u_minus: 3.0,
            zeta_minus: 0.0,
            v_inf: 6.0,
        };
        // No breaking: U_{−∞}(t) − U_{−∞}(0) = −3t/2.
        let (u, z) = update_asymptotes(&base, &[], 0.8);
        assert!((u - (3.0 - 1.5 * 0.8)).abs() < 1e-15);
        assert!((z - (3.0 * 0.8 - 0.75 * 0.64)).abs() < 1e-15);
        // After the drop of mass 3 at τ = 1: U(t, ξ≤0) = −3t/4 + 9/4.
        let (u, _) = update_asymptotes(&base, &[(1.0, 3.0)], 1.5);
        assert!((u - (-0.75 * 1.5 + 2.25)).abs() < 1e-14);
        // Zero energy: U_{−∞} frozen, ζ_{−∞} drifts linearly with it.
        let frozen = AsymptoteBase {
            t0: 0.0,
            u_minus: 1.0,
            zeta_minus: -2.0,
            v_inf: 0.0,
        };
        assert_eq!(update_asymptotes(&frozen, &[], 5.0), (1.0, 3.0));
    }

    #[test]
    fn schedule_multipeakon() {
        let grid = ex41_grid();
        let schedule = extract_breaking_times(&grid, 3.0, &AlphaFunction::Const(0.5));
        assert_eq!(schedule.times, alloc::vec![0.0, 1.0, 2.0, 3.0]);
        // No negative slopes ⇒ {0, T}.
        let flat = from_initial_pl(
            &crate::eulerian::InitialData::new(
                crate::eulerian::WaveProfile::piecewise_linear(&[(0.0, 0.0), (1.0, 1.0)]).unwrap(),
                crate::eulerian::EnergyMeasure::empty(),
            )
            .unwrap(),
        )
        .unwrap();
        let schedule = extract_breaking_times(&flat, 2.0, &AlphaFunction::Const(0.0));
        assert_eq!(schedule.times, alloc::vec![0.0, 2.0]);
    }

    #[test]
    fn schedule_subdivides_for_varying_alpha() {
        let grid = ex41_grid();
        let schedule = extract_breaking_times(&grid, 3.0, &AlphaFunction::Alpha1);
        for t in [0.0, 1.0, 2.0, 3.0] {
            assert!(
                schedule.times.iter().any(|&s| (s - t).abs() < 1e-12),
                "breaking time {t} must stay on the schedule"
            );
        }
        let sup_u = 3.0;
        let cap = 1.0 / (1.0 + (3.0 / 11.0) * (sup_u + 0.25 * 3.0 * 6.0));
        for w in schedule.times.windows(2) {
            assert!(w[1] - w[0] <= cap + 1e-12);
        }
    }

    #[test]
    fn eps_formula_example() {
        let lip = AlphaFunction::Alpha1.lipschitz();
        let dx = 1.0 / 16.0;
        assert!((dx * dx / lip - 11.0 / 768.0).abs() < 1e-15);
    }

    #[test]
    fn full_dissipation_energy_drop() {
        let grid = ex41_grid();
        let traj = solve(&grid, &AlphaFunction::Const(1.0), 3.0, 0.0).unwrap();
        assert!((traj.v_inf_at(0.5) - 6.0).abs() < 1e-13);
        // α ≡ 1 removes the full 4 units breaking at t = 1 ...
        assert!((traj.v_inf_at(1.0) - 2.0).abs() < 1e-13);
        // ... and the remaining unit at t = 2.
        assert!((traj.v_inf_at(2.5) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn conservative_evolution_keeps_energy() {
        let grid = ex41_grid();
        let traj = solve(&grid, &AlphaFunction::Const(0.0), 3.0, 0.0).unwrap();
        for t in [0.0, 0.5, 1.0, 1.7, 2.9] {
            assert!((traj.v_inf_at(t) - 6.0).abs() < 1e-13);
            let state = traj.state_at(t);
            assert!((state.v_inf() - 6.0).abs() < 1e-12);
        }
    }

    #[test]
    fn solver_matches_exact_multipeakon() {
        let data = exact::ex41_data();
        let proj = project(&data, 0.25f64.powi(2)).unwrap();
        let grid = to_lagrangian_grid(&proj);
        let traj = solve(&grid, &AlphaFunction::Alpha1, 3.0, 0.25f64.powi(2)).unwrap();
        assert!(traj.max_iterations() <= 3);
        for t in [0.5, 1.5, 2.5] {
            let eul = traj.eulerian_at(t).unwrap();
            let mut worst = 0.0f64;
            for p in eul.u.points() {
                let (u_ref, _) = exact::exact_ex41(t, p.x);
                worst = worst.max((p.left - u_ref).abs());
            }
            assert!(worst < 1e-12, "t = {t}: sup error {worst}");
            let report = check_lagrangian_invariants(&traj.state_at(t));
            assert!(report.max_violation() < 1e-12, "{}", report.format());
        }
    }

    #[test]
    fn semigroup_on_constant_alpha() {
        let grid = ex41_grid();
        let alpha = AlphaFunction::Const(0.6);
        let one = solve(&grid, &alpha, 3.0, 0.0).unwrap();
        let split = BreakingSchedule {
            times: alloc::vec![0.0, 0.4, 1.0, 1.3, 2.0, 2.2, 3.0],
        };
        let two = solve_with_schedule(&grid, &alpha, &split, 0.0).unwrap();
        for t in [0.3, 0.9, 1.0, 1.1, 2.5, 3.0] {
            let a = one.state_at(t);
            let b = two.state_at(t);
            for j in 0..a.num_nodes() {
                assert!((a.y[j] - b.y[j]).abs() < 1e-12);
                assert!((a.u[j] - b.u[j]).abs() < 1e-12);
                assert!((a.v[j] - b.v[j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn interval_chaining_is_bitwise() {
        let data = exact::ex41_data();
        let proj = project(&data, 0.25).unwrap();
        let grid = to_lagrangian_grid(&proj);
        let traj = solve(&grid, &AlphaFunction::Alpha1, 3.0, 0.25).unwrap();
        for &t in traj.schedule() {
            let a = traj.state_at(t);
            let b = traj.state_at(t);
            assert_eq!(a.y, b.y);
            assert_eq!(a.v, b.v);
        }
    }

    #[test]
    fn energy_drop_bookkeeping() {
        let grid = ex41_grid();
        let traj = solve(&grid, &AlphaFunction::Alpha1, 3.0, 0.0).unwrap();
        // Drop at τ = 1: β = α₁(11/4) = 3/4 on mass 4.
        let before = traj.v_inf_at(1.0 - 1e-9);
        let after = traj.v_inf_at(1.0);
        let expected: f64 = traj
            .events()
            .iter()
            .filter(|&&(tau, _)| (tau - 1.0).abs() < 1e-12)
            .map(|&(_, m)| m)
            .sum();
        assert!((before - after - expected).abs() < 1e-13);
        assert!((expected - 3.0).abs() < 1e-12);
    }

    #[test]
    fn non_contraction_is_diagnosed() {
        // A zig-zag α with a huge Lipschitz constant and eps = 0 cannot
        // settle when breaking happens strictly inside the interval.
        let data = exact::ex41_data();
        let grid = from_initial_pl(&data).unwrap();
        let mut nodes = alloc::vec::Vec::new();
        let mut x = -10.0;
        let mut up = true;
        while x <= 10.0 {
            nodes.push((x, if up { 0.0 } else { 1.0 }));
            up = !up;
            x += 1e-3;
        }
        let table = crate::pwl::PiecewiseLinearFn::continuous(&nodes).unwrap();
        let alpha = AlphaFunction::Table {
            table,
            lipschitz: 1e3,
        };
        let schedule = BreakingSchedule {
            times: alloc::vec![0.0, 3.0],
        };
        match solve_with_schedule(&grid, &alpha, &schedule, 0.0) {
            Err(Error::NonContraction { .. }) => {}
            other => panic!("expected non-contraction, got {:?}", other.map(|_| ())),
        }
    }
}
