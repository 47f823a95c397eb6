//! Built-in example data and closed-form reference solutions.
//!
//! The first multipeakon example admits a globally exact solution in both
//! coordinate systems, evaluated here in three time regimes separated by the
//! wave-breaking times `t = 1` and `t = 2`. The second multipeakon has no
//! grid-aligned closed form; its reference is the exact piecewise linear
//! evolution of the unprojected data. The cusp has no usable exact solution
//! at all and is compared against a fine-grid run.

use alloc::vec::Vec;

use crate::error::Result;
use crate::eulerian::{AlphaFunction, EnergyMeasure, InitialData, WaveProfile};
use crate::evolution::{solve, Trajectory};
use crate::lagrangian::{breaking_times, from_initial_pl, EulerianSolution, LagrangianGrid};
use crate::pwl::{Breakpoint, PiecewiseLinearFn};

/// Multipeakon with a unit atom at the origin: `ū = 3, 3−x, 4−2x, 0` on the
/// pieces split at `0, 1, 2`, and `dμ̄ = dν̄ = δ₀ + ū_x² dx`.
pub fn ex41_data() -> InitialData {
    let profile =
        WaveProfile::piecewise_linear(&[(0.0, 3.0), (1.0, 2.0), (2.0, 0.0)]).expect("static nodes");
    InitialData::new(profile, EnergyMeasure::atoms_only(alloc::vec![(0.0, 1.0)]))
        .expect("static data")
}

/// Multipeakon whose interior nodes do not align with any mesh `4^{-k}`.
pub fn ex42_data() -> InitialData {
    let profile = WaveProfile::piecewise_linear(&[
        (0.0, 3.0),
        (1.0, 2.0),
        (400.0 / 361.0, 2.0),
        (800.0 / 361.0, 18.0 / 19.0),
        (200.0 / 81.0, 18.0 / 19.0),
        (100.0 / 27.0, -28.0 / 171.0),
    ])
    .expect("static nodes");
    InitialData::new(profile, EnergyMeasure::empty()).expect("static data")
}

/// Cusped profile `ū = |x|^{2/3}` on `[−1, 1]`; wave breaking occurs along a
/// single characteristic for every `t ∈ [0, 3]`.
pub fn cusp_data() -> InitialData {
    InitialData::new(WaveProfile::Cusp, EnergyMeasure::empty()).expect("static data")
}

/// Dissipation profile used with the cusp: `b` left of `−1`, `b|x|` up to 0,
/// then 0. The experiments use `b = 19/20`.
pub fn cusp_alpha(b: f64) -> AlphaFunction {
    AlphaFunction::CuspRamp { b }
}

/// Region boundaries of the exact first-multipeakon solution at time `t`.
fn ex41_bounds(t: f64) -> [f64; 4] {
    if t < 1.0 {
        [
            -0.75 * t * t + 3.0 * t,
            -0.5 * t * t + 3.0 * t,
            -0.25 * t * t + 2.0 * t + 1.0,
            0.75 * t * t + 2.0,
        ]
    } else if t < 2.0 {
        [
            -0.375 * t * t + 2.25 * t + 0.375,
            -0.125 * t * t + 2.25 * t + 0.375,
            0.125 * t * t + 1.25 * t + 1.375,
            0.375 * t * t + 0.75 * t + 1.625,
        ]
    } else {
        [
            -21.0 / 80.0 * t * t + 1.8 * t + 33.0 / 40.0,
            -1.0 / 80.0 * t * t + 1.8 * t + 33.0 / 40.0,
            1.0 / 80.0 * t * t + 1.7 * t + 37.0 / 40.0,
            21.0 / 80.0 * t * t + 1.2 * t + 47.0 / 40.0,
        ]
    }
}

/// Exact `(u, F)(t, x)` for the first multipeakon example, valid for all
/// `t ≥ 0` with `α(11/4) = 3/4` and `α(35/8) = 9/10`.
pub fn exact_ex41(t: f64, x: f64) -> (f64, f64) {
    let [b1, b2, b3, b4] = ex41_bounds(t);
    if t < 1.0 {
        let u = if x <= b1 {
            -1.5 * t + 3.0
        } else if x <= b2 {
            2.0 / t * (x - 1.5 * t)
        } else if x <= b3 {
            2.0 / (t - 2.0) * (x - 0.5 * t - 3.0)
        } else if x <= b4 {
            2.0 / (t - 1.0) * (x - 0.75 * t - 2.0)
        } else {
            1.5 * t
        };
        let f = if x <= b1 {
            0.0
        } else if x <= b2 {
            4.0 / (t * t) * (x + 0.75 * t * t - 3.0 * t)
        } else if x <= b3 {
            4.0 / ((t - 2.0) * (t - 2.0)) * (x + 0.75 * t * t - 4.0 * t + 1.0)
        } else if x <= b4 {
            4.0 / ((t - 1.0) * (t - 1.0)) * (x + 0.75 * t * t - 3.0 * t - 0.5)
        } else {
            6.0
        };
        (u, f)
    } else if t < 2.0 {
        let u = if x <= b1 {
            -0.75 * t + 2.25
        } else if x <= b2 {
            2.0 / t * (x - 1.125 * t - 0.375)
        } else if x <= b3 {
            2.0 / (t - 2.0) * (x - 0.875 * t - 2.625)
        } else if x <= b4 {
            2.0 / (t - 1.0) * (x - 0.75 * t - 2.0)
        } else {
            0.75 * t + 0.75
        };
        let f = if x <= b1 {
            0.0
        } else if x <= b2 {
            4.0 / (t * t) * (x + 0.375 * t * t - 2.25 * t - 0.375)
        } else if x <= b3 {
            4.0 / ((t - 2.0) * (t - 2.0)) * (x + 0.375 * t * t - 3.25 * t + 0.625)
        } else if x <= b4 {
            4.0 / ((t - 1.0) * (t - 1.0)) * (x + 0.375 * t * t - 2.25 * t - 0.875)
        } else {
            3.0
        };
        (u, f)
    } else {
        let u = if x <= b1 {
            -21.0 / 40.0 * t + 1.8
        } else if x <= b2 {
            2.0 / t * (x - 0.9 * t - 33.0 / 40.0)
        } else if x <= b3 {
            2.0 / (t - 2.0) * (x - 0.875 * t - 2.625)
        } else if x <= b4 {
            2.0 / (t - 1.0) * (x - 69.0 / 80.0 * t - 71.0 / 40.0)
        } else {
            21.0 / 40.0 * t + 1.2
        };
        let f = if x <= b1 {
            0.0
        } else if x <= b2 {
            4.0 / (t * t) * (x + 21.0 / 80.0 * t * t - 1.8 * t - 33.0 / 40.0)
        } else if x <= b3 {
            4.0 / ((t - 2.0) * (t - 2.0)) * (x + 21.0 / 80.0 * t * t - 2.8 * t + 7.0 / 40.0)
        } else if x <= b4 {
            4.0 / ((t - 1.0) * (t - 1.0)) * (x + 21.0 / 80.0 * t * t - 2.25 * t - 0.65)
        } else {
            2.1
        };
        (u, f)
    }
}

/// Exact snapshot of the first multipeakon example as piecewise linear data.
pub fn exact_ex41_snapshot(t: f64) -> EulerianSolution {
    if t == 0.0 {
        let u = PiecewiseLinearFn::continuous(&[(0.0, 3.0), (1.0, 2.0), (2.0, 0.0)])
            .expect("static nodes");
        let f = PiecewiseLinearFn::with_jumps(alloc::vec![
            Breakpoint {
                x: 0.0,
                left: 0.0,
                right: 1.0
            },
            Breakpoint {
                x: 1.0,
                left: 2.0,
                right: 2.0
            },
            Breakpoint {
                x: 2.0,
                left: 6.0,
                right: 6.0
            },
        ])
        .expect("static nodes");
        return EulerianSolution {
            t,
            u,
            f: f.clone(),
            g: f,
        };
    }
    let bounds = ex41_bounds(t);
    let mut u_nodes: Vec<(f64, f64)> = Vec::with_capacity(4);
    let mut f_nodes: Vec<(f64, f64)> = Vec::with_capacity(4);
    for &x in &bounds {
        if u_nodes.last().map_or(true, |&(px, _)| x > px) {
            let (u, f) = exact_ex41(t, x);
            u_nodes.push((x, u));
            f_nodes.push((x, f));
        }
    }
    let u = PiecewiseLinearFn::continuous(&u_nodes).expect("bounds are increasing");
    let f = PiecewiseLinearFn::continuous(&f_nodes).expect("bounds are increasing");
    EulerianSolution {
        t,
        u,
        f: f.clone(),
        g: f,
    }
}

/// Exact Lagrangian solution `(y, U, V, H)(t, ξ)` of the first multipeakon.
pub fn exact_lagrangian_ex41(t: f64, xi: f64) -> (f64, f64, f64, f64) {
    let h = if xi <= 0.0 {
        0.0
    } else if xi <= 1.0 {
        xi
    } else if xi <= 3.0 {
        0.5 * (xi + 1.0)
    } else if xi <= 8.0 {
        (4.0 * xi - 2.0) / 5.0
    } else {
        6.0
    };
    if t < 1.0 {
        let y = if xi <= 0.0 {
            xi - 0.75 * t * t + 3.0 * t
        } else if xi <= 1.0 {
            0.25 * xi * t * t - 0.75 * t * t + 3.0 * t
        } else if xi <= 3.0 {
            0.125 * (t - 2.0) * (t - 2.0) * xi - 0.625 * t * t + 3.5 * t - 0.5
        } else if xi <= 8.0 {
            0.2 * (t - 1.0) * (t - 1.0) * xi - 0.85 * t * t + 3.2 * t + 0.4
        } else {
            xi + 0.75 * t * t - 6.0
        };
        let u = if xi <= 0.0 {
            -1.5 * t + 3.0
        } else if xi <= 1.0 {
            0.5 * xi * t - 1.5 * t + 3.0
        } else if xi <= 3.0 {
            0.25 * (t - 2.0) * xi - 1.25 * t + 3.5
        } else if xi <= 8.0 {
            0.4 * (t - 1.0) * xi - 1.7 * t + 3.2
        } else {
            1.5 * t
        };
        (y, u, h, h)
    } else if t < 2.0 {
        let y = if xi <= 0.0 {
            xi - 0.375 * t * t + 2.25 * t + 0.375
        } else if xi <= 1.0 {
            0.25 * t * t * xi - 0.375 * t * t + 2.25 * t + 0.375
        } else if xi <= 3.0 {
            0.125 * (t - 2.0) * (t - 2.0) * xi - 0.25 * t * t + 2.75 * t - 0.125
        } else if xi <= 8.0 {
            0.05 * (t - 1.0) * (t - 1.0) * xi - 0.025 * t * t + 1.55 * t + 1.225
        } else {
            xi + 0.375 * t * t + 0.75 * t - 6.375
        };
        let u = if xi <= 0.0 {
            -0.75 * t + 2.25
        } else if xi <= 1.0 {
            0.5 * t * xi - 0.75 * t + 2.25
        } else if xi <= 3.0 {
            0.25 * (t - 2.0) * xi - 0.5 * t + 2.75
        } else if xi <= 8.0 {
            0.1 * (t - 1.0) * xi - 0.05 * t + 1.55
        } else {
            0.75 * t + 0.75
        };
        let v = if xi <= 0.0 {
            0.0
        } else if xi <= 1.0 {
            xi
        } else if xi <= 3.0 {
            0.5 * (xi + 1.0)
        } else if xi <= 8.0 {
            (xi + 7.0) / 5.0
        } else {
            3.0
        };
        (y, u, v, h)
    } else {
        let y = if xi <= 0.0 {
            xi - 21.0 / 80.0 * t * t + 1.8 * t + 33.0 / 40.0
        } else if xi <= 1.0 {
            0.25 * t * t * xi - 21.0 / 80.0 * t * t + 1.8 * t + 33.0 / 40.0
        } else if xi <= 3.0 {
            1.0 / 80.0 * (t - 2.0) * (t - 2.0) * xi - 0.025 * t * t + 1.85 * t + 31.0 / 40.0
        } else if xi <= 8.0 {
            0.05 * (t - 1.0) * (t - 1.0) * xi - 11.0 / 80.0 * t * t + 2.0 * t + 31.0 / 40.0
        } else {
            xi + 21.0 / 80.0 * t * t + 1.2 * t - 273.0 / 40.0
        };
        let u = if xi <= 0.0 {
            -21.0 / 40.0 * t + 1.8
        } else if xi <= 1.0 {
            0.5 * t * xi - 21.0 / 40.0 * t + 1.8
        } else if xi <= 3.0 {
            1.0 / 40.0 * (t - 2.0) * xi - 0.05 * t + 1.85
        } else if xi <= 8.0 {
            0.1 * (t - 1.0) * xi - 11.0 / 40.0 * t + 2.0
        } else {
            21.0 / 40.0 * t + 1.2
        };
        let v = if xi <= 0.0 {
            0.0
        } else if xi <= 1.0 {
            xi
        } else if xi <= 3.0 {
            (xi + 19.0) / 20.0
        } else if xi <= 8.0 {
            0.2 * xi + 0.5
        } else {
            2.1
        };
        (y, u, v, h)
    }
}

/// Exact Lagrangian state of the first multipeakon as a grid with nodes at
/// `ξ ∈ {0, 1, 3, 8}`, for cross-checking the recovery map.
pub fn exact_ex41_grid(t: f64) -> LagrangianGrid {
    let xi = alloc::vec![0.0, 1.0, 3.0, 8.0];
    let mut y = Vec::with_capacity(4);
    let mut u = Vec::with_capacity(4);
    let mut v = Vec::with_capacity(4);
    let mut h = Vec::with_capacity(4);
    for &x in &xi {
        let (yy, uu, vv, hh) = exact_lagrangian_ex41(t, x);
        y.push(yy);
        u.push(uu);
        v.push(vv);
        h.push(hh);
    }
    let mut dy = Vec::with_capacity(3);
    let mut du = Vec::with_capacity(3);
    let mut dv = Vec::with_capacity(3);
    let mut dh = Vec::with_capacity(3);
    for k in 0..3 {
        let w = xi[k + 1] - xi[k];
        dy.push((y[k + 1] - y[k]) / w);
        du.push((u[k + 1] - u[k]) / w);
        dv.push((v[k + 1] - v[k]) / w);
        dh.push((h[k + 1] - h[k]) / w);
    }
    let (y_left, u_left, _, _) = exact_lagrangian_ex41(t, -1.0);
    let mut grid = LagrangianGrid {
        t,
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
        zeta_minus: y_left + 1.0,
        u_minus: u_left,
    };
    grid.tau = breaking_times(&grid);
    grid
}

/// Exact reference trajectory for the second multipeakon: the unprojected
/// piecewise linear data evolved with every breaking time resolved as a
/// schedule point, so the dissipation fractions are evaluated at the exact
/// collapse positions.
pub fn ex42_reference(t_end: f64) -> Result<Trajectory> {
    let grid = from_initial_pl(&ex42_data())?;
    solve(&grid, &AlphaFunction::Ex42, t_end, 0.0)
}

/// Depth-`depth` approximation of the Cantor cumulative, scaled to carry
/// `mass` over `[a, b]`. Rises happen on the `2^depth` outer intervals of
/// the construction, so the table has `2^{depth+1}` breakpoints.
pub fn cantor_cumulative(depth: u32, mass: f64, a: f64, b: f64) -> PiecewiseLinearFn {
    let mut segs: Vec<(f64, f64, f64, f64)> = alloc::vec![(0.0, 1.0, 0.0, 1.0)];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(segs.len() * 2);
        for &(x0, x1, v0, v1) in &segs {
            let w = (x1 - x0) / 3.0;
            let vm = 0.5 * (v0 + v1);
            next.push((x0, x0 + w, v0, vm));
            next.push((x1 - w, x1, vm, v1));
        }
        segs = next;
    }
    let mut nodes = Vec::with_capacity(segs.len() * 2);
    for &(x0, x1, v0, v1) in &segs {
        nodes.push((a + x0 * (b - a), v0 * mass));
        nodes.push((a + x1 * (b - a), v1 * mass));
    }
    PiecewiseLinearFn::continuous(&nodes).expect("construction is strictly increasing")
}
