//! Rescaling pair `(φ, ψ)` aligning exact and projected characteristics.
//!
//! `φ(r)` is the smallest intersection of `ȳ(ξ)` with `ȳ_Δx(2r − ξ)` and
//! `ψ = 2r − φ`, so that `ȳ∘φ = ȳ_Δx∘ψ =: Ȳ` with `Ȳ` the monotone inverse
//! of `x + ½(Ḡ + Ḡ_Δx)(x)`. Per projected double cell the sets where `φ̇`
//! respectively `ψ̇` vanish capture the singular energy of the projected and
//! the exact datum; their sizes agree and equal half the cell's singular
//! mass. This module computes those sets and their sizes from the piecewise
//! structure of the combined cumulative.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::eulerian::InitialData;
use crate::lagrangian::{from_initial_pl, to_lagrangian_grid, LagrangianGrid};
use crate::math;
use crate::projection::ProjectedData;
use crate::pwl::{merged_breakpoints, PiecewiseLinearFn};

/// Inverse of the combined cumulative:
/// `Ȳ(r) = sup{x : x + ½(G(x) + G_Δx(x)) < r}`, computed by monotone
/// bisection; at a jump the plateau (jump position) is returned.
pub fn combined_y(g: &PiecewiseLinearFn, g_dx: &PiecewiseLinearFn, r: f64) -> f64 {
    let total = 0.5 * (g.right_tail() - g.left_tail() + g_dx.right_tail() - g_dx.left_tail());
    let lo_span = g
        .span()
        .map_or(r, |(a, _)| a)
        .min(g_dx.span().map_or(r, |(a, _)| a));
    let hi_span = g
        .span()
        .map_or(r, |(_, b)| b)
        .max(g_dx.span().map_or(r, |(_, b)| b));
    let mut lo = (r - total).min(lo_span) - 1.0;
    let mut hi = r.max(hi_span) + 1.0;
    let w = |x: f64| x + 0.5 * (g.eval(x) + g_dx.eval(x));
    while hi - lo > 1e-14 * (1.0 + math::abs(lo) + math::abs(hi) + total) {
        let mid = 0.5 * (lo + hi);
        if w(mid) < r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The rescaling pair for one datum and its projection.
pub struct RescalingPair {
    exact_grid: LagrangianGrid,
    proj_grid: LagrangianGrid,
    g_exact: PiecewiseLinearFn,
    g_proj: PiecewiseLinearFn,
    /// Double-cell boundaries `ξ_{3j}` (length `J + 1`).
    cell_starts: Vec<f64>,
    /// Plateau ends `ξ_{3j+1}` per double cell.
    plateau_ends: Vec<f64>,
    /// Even gridpoints `x_{2j}` (length `J + 1`).
    x_bounds: Vec<f64>,
}

/// Builds the pair from piecewise linear data and its projection.
/// Fails when the exact and projected characteristics disagree at a
/// double-cell boundary (they coincide there by construction of the
/// projection).
pub fn rescaling_pair(data: &InitialData, proj: &ProjectedData) -> Result<RescalingPair> {
    let exact_grid = from_initial_pl(data)?;
    let proj_grid = to_lagrangian_grid(proj);
    let g_exact = data.f_pwl()?;
    let g_proj = proj.to_f_pwl();

    let n_dc = proj.num_cells();
    let mut cell_starts = Vec::with_capacity(n_dc + 1);
    let mut plateau_ends = Vec::with_capacity(n_dc);
    for i in 0..n_dc {
        cell_starts.push(proj_grid.xi[3 * i]);
        plateau_ends.push(proj_grid.xi[3 * i + 1]);
    }
    cell_starts.push(*proj_grid.xi.last().unwrap());
    let x_bounds = proj.even_gridpoints();

    for (i, &xi) in cell_starts.iter().enumerate() {
        let gap = math::abs(exact_grid.y_at(xi) - proj_grid.y_at(xi));
        if gap > 1e-10 {
            return Err(Error::Precondition(alloc::format!(
                "exact and projected characteristics differ by {gap:e} at cell boundary {i}"
            )));
        }
    }
    Ok(RescalingPair {
        exact_grid,
        proj_grid,
        g_exact,
        g_proj,
        cell_starts,
        plateau_ends,
        x_bounds,
    })
}

impl RescalingPair {
    pub fn num_cells(&self) -> usize {
        self.plateau_ends.len()
    }

    /// `Ȳ(r) = ȳ(φ(r)) = ȳ_Δx(ψ(r))`.
    pub fn y_combined(&self, r: f64) -> f64 {
        combined_y(&self.g_exact, &self.g_proj, r)
    }

    /// Smallest intersection of `ȳ(ξ)` with `ȳ_Δx(2r − ξ)`, found by
    /// monotone bisection inside the double cell containing `r`.
    pub fn phi(&self, r: f64) -> f64 {
        let n = self.cell_starts.len();
        if n == 0 || r < self.cell_starts[0] || r >= self.cell_starts[n - 1] {
            return r;
        }
        let j = self.cell_starts.partition_point(|&s| s <= r) - 1;
        let (lo0, hi0) = (self.cell_starts[j], self.cell_starts[j + 1]);
        let pred =
            |xi: f64| self.exact_grid.y_at(xi) >= self.proj_grid.y_at(2.0 * r - xi) - 0.0;
        if pred(lo0) {
            return lo0;
        }
        let (mut lo, mut hi) = (lo0, hi0);
        let tol = 1e-13 * (1.0 + math::abs(lo0) + math::abs(hi0));
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if pred(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn psi(&self, r: f64) -> f64 {
        2.0 * r - self.phi(r)
    }

    /// Symmetric difference quotient of `φ` (step `1e−7`, capped by the
    /// local scale).
    fn phi_rate(&self, r: f64, scale: f64) -> f64 {
        let d = 1e-7f64.min(scale / 8.0).max(1e-12);
        (self.phi(r + d) - self.phi(r - d)) / (2.0 * d)
    }

    /// Transition point where the stalled side switches inside a plateau
    /// shared by both data. The stalled map is exactly constant up to the
    /// transition, so bisecting its departure locates the point to
    /// bisection accuracy (the difference-quotient classifier alone is only
    /// sharp to its step size).
    fn transition_point(
        &self,
        lo: f64,
        hi: f64,
        probe: f64,
        scale: f64,
        class_lo: PieceClass,
    ) -> f64 {
        let stalled: &dyn Fn(f64) -> f64 = match class_lo {
            PieceClass::ProjStall => &|r| self.phi(r),
            PieceClass::ExactStall => &|r| self.psi(r),
            PieceClass::Regular => {
                // No stall on the left side; fall back to the classifier.
                let (mut a, mut b) = (lo + probe, hi - probe);
                while b - a > 1e-9 {
                    let mid = 0.5 * (a + b);
                    if classify(self.phi_rate(mid, scale)) == class_lo {
                        a = mid;
                    } else {
                        b = mid;
                    }
                }
                return 0.5 * (a + b);
            }
        };
        let base = stalled(lo + probe);
        let tol_v = 1e-12 * (1.0 + math::abs(base));
        let (mut a, mut b) = (lo + probe, hi - probe);
        while b - a > 1e-13 * (1.0 + math::abs(a) + math::abs(b)) {
            let mid = 0.5 * (a + b);
            if math::abs(stalled(mid) - base) <= tol_v {
                a = mid;
            } else {
                b = mid;
            }
        }
        0.5 * (a + b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum PieceClass {
    /// `φ̇ ≈ 0`: the projected side stalls (its singular set).
    ProjStall,
    /// `ψ̇ ≈ 0`: the exact side stalls.
    ExactStall,
    Regular,
}

fn classify(rate: f64) -> PieceClass {
    if rate < 0.5 {
        PieceClass::ProjStall
    } else if rate > 1.5 {
        PieceClass::ExactStall
    } else {
        PieceClass::Regular
    }
}

/// Interval of `r` values with homogeneous `Ȳ` behaviour: either the image
/// of a jump of the combined cumulative (`x_len = 0`) or of one linear
/// piece.
#[derive(Clone, Copy, Debug)]
struct Piece {
    r0: f64,
    r1: f64,
    x_len: f64,
}

fn combined_pieces(g: &PiecewiseLinearFn, g_dx: &PiecewiseLinearFn) -> Vec<Piece> {
    let xs = merged_breakpoints(g, g_dx);
    let w_pair = |x: f64| {
        let (gl, gr) = g.eval_pair(x);
        let (dl, dr) = g_dx.eval_pair(x);
        (x + 0.5 * (gl + dl), x + 0.5 * (gr + dr))
    };
    let mut pieces = Vec::with_capacity(2 * xs.len());
    for (i, &x) in xs.iter().enumerate() {
        let (wl, wr) = w_pair(x);
        if wr > wl {
            pieces.push(Piece {
                r0: wl,
                r1: wr,
                x_len: 0.0,
            });
        }
        if i + 1 < xs.len() {
            let xn = xs[i + 1];
            let (wnl, _) = w_pair(xn);
            pieces.push(Piece {
                r0: wr,
                r1: wnl,
                x_len: xn - x,
            });
        }
    }
    pieces
}

/// Sizes of the stalled sets of one double cell, both as plain interval
/// length (`meas`) and as cumulative-rise content (`content = meas − Δx`
/// over the classified pieces). The two agree on true plateaus; the content
/// is the resolution-robust variant for tabulated singular-continuous parts.
#[derive(Clone, Copy, Debug, Default)]
pub struct CellCoincidence {
    pub x_left: f64,
    pub x_right: f64,
    pub sing_mass: f64,
    pub b_proj_meas: f64,
    pub b_proj_content: f64,
    pub b_exact_meas: f64,
    pub b_exact_content: f64,
}

#[derive(Clone, Debug)]
pub struct CoincidenceReport {
    pub cells: Vec<CellCoincidence>,
}

impl CoincidenceReport {
    /// Worst `|meas(B_j) − meas(B_{Δx,j})|` over cells.
    pub fn max_length_gap(&self) -> f64 {
        self.cells
            .iter()
            .fold(0.0, |m, c| m.max(math::abs(c.b_exact_meas - c.b_proj_meas)))
    }

    pub fn max_content_gap(&self) -> f64 {
        self.cells.iter().fold(0.0, |m, c| {
            m.max(math::abs(c.b_exact_content - c.b_proj_content))
        })
    }

    /// Worst `|content(B_j) − ½ ν_sing(cell)|` over cells.
    pub fn max_vs_half_sing(&self) -> f64 {
        self.cells.iter().fold(0.0, |m, c| {
            m.max(math::abs(c.b_exact_content - 0.5 * c.sing_mass))
                .max(math::abs(c.b_proj_content - 0.5 * c.sing_mass))
        })
    }
}

/// Per double cell: measures the sets where `φ̇ = 0` (projected stall) and
/// `ψ̇ = 0` (exact stall) by classifying the pieces of the combined
/// cumulative, splitting a piece at its classification transition when the
/// two ends disagree.
pub fn check_coinciding_lengths(pair: &RescalingPair, data: &InitialData) -> CoincidenceReport {
    let pieces = combined_pieces(&pair.g_exact, &pair.g_proj);
    let mut cells = Vec::with_capacity(pair.num_cells());

    for j in 0..pair.num_cells() {
        let (r_lo, r_hi) = (pair.cell_starts[j], pair.cell_starts[j + 1]);
        let mut row = CellCoincidence {
            x_left: pair.x_bounds[j],
            x_right: pair.x_bounds[j + 1],
            sing_mass: data.sing_mass_in(pair.x_bounds[j], pair.x_bounds[j + 1]),
            ..Default::default()
        };

        for piece in &pieces {
            let lo = piece.r0.max(r_lo);
            let hi = piece.r1.min(r_hi);
            if hi <= lo {
                continue;
            }
            let frac = if piece.r1 > piece.r0 {
                (hi - lo) / (piece.r1 - piece.r0)
            } else {
                0.0
            };
            let x_len = piece.x_len * frac;
            let scale = hi - lo;
            let probe = (0.25 * scale).clamp(1e-11, 1e-6);
            let class_lo = classify(pair.phi_rate(lo + probe, scale));
            let class_hi = classify(pair.phi_rate(hi - probe, scale));
            let mut add = |class: PieceClass, len: f64, xl: f64| match class {
                PieceClass::ProjStall => {
                    row.b_proj_meas += len;
                    row.b_proj_content += len - xl;
                }
                PieceClass::ExactStall => {
                    row.b_exact_meas += len;
                    row.b_exact_content += len - xl;
                }
                PieceClass::Regular => {}
            };
            if class_lo == class_hi {
                add(class_lo, hi - lo, x_len);
            } else {
                let cut = pair.transition_point(lo, hi, probe, scale, class_lo);
                let left_frac = (cut - lo) / (hi - lo);
                add(class_lo, cut - lo, x_len * left_frac);
                add(class_hi, hi - cut, x_len * (1.0 - left_frac));
            }
        }
        cells.push(row);
    }
    CoincidenceReport { cells }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact;
    use crate::projection::project;

    #[test]
    fn combined_inverse_trivial_and_atom() {
        let zero = PiecewiseLinearFn::constant(0.0);
        for r in [-3.0, 0.0, 1.7] {
            assert!((combined_y(&zero, &zero, r) - r).abs() < 1e-12);
        }
        let data = exact::ex41_data();
        let proj = project(&data, 0.5).unwrap();
        let g = data.f_pwl().unwrap();
        let g_dx = proj.to_f_pwl();
        // Inside the shared unit-atom plateau at x = 0.
        assert!(combined_y(&g, &g_dx, 0.5).abs() < 1e-12);
    }

    #[test]
    fn y_combined_anchors_at_even_gridpoints() {
        let data = exact::ex41_data();
        let proj = project(&data, 0.5).unwrap();
        let pair = rescaling_pair(&data, &proj).unwrap();
        for j in 0..pair.num_cells() {
            let y = pair.y_combined(pair.cell_starts[j]);
            assert!(
                (y - pair.x_bounds[j]).abs() < 1e-10,
                "Ȳ(ξ_3j) = x_2j at cell {j}"
            );
        }
    }

    #[test]
    fn identity_without_singular_mass() {
        // Mesh-aligned atomless multipeakon: the projection reproduces the
        // data, both characteristics are strictly increasing and equal, and
        // the intersection is the symmetric one.
        let data = crate::eulerian::InitialData::new(
            crate::eulerian::WaveProfile::piecewise_linear(&[(0.0, 3.0), (1.0, 2.0), (2.0, 0.0)])
                .unwrap(),
            crate::eulerian::EnergyMeasure::empty(),
        )
        .unwrap();
        let proj = project(&data, 0.25).unwrap();
        let pair = rescaling_pair(&data, &proj).unwrap();
        for i in 0..40 {
            let r = -1.0 + 0.2 * i as f64;
            assert!((pair.phi(r) - r).abs() < 1e-9, "phi({r}) = {}", pair.phi(r));
            assert!((pair.psi(r) - r).abs() < 1e-9);
        }
        let report = check_coinciding_lengths(&pair, &data);
        for c in &report.cells {
            assert!(c.sing_mass.abs() < 1e-14);
            assert!(c.b_proj_meas < 1e-9 && c.b_exact_meas < 1e-9);
        }
        // Without equality of the two characteristics φ is not the identity,
        // only anchored at the cell boundaries.
        let mism = exact::ex42_data();
        let proj = project(&mism, 0.25).unwrap();
        let pair = rescaling_pair(&mism, &proj).unwrap();
        let report = check_coinciding_lengths(&pair, &mism);
        for c in &report.cells {
            assert!(c.b_proj_meas < 1e-9 && c.b_exact_meas < 1e-9);
        }
    }

    #[test]
    fn atom_cell_rescaling() {
        let data = exact::ex41_data();
        let proj = project(&data, 0.5).unwrap();
        let pair = rescaling_pair(&data, &proj).unwrap();
        // The cell [0, 1) holds the unit atom: ξ_{3j} = 0, ξ_{3j+1} = 1.
        let j = pair.cell_starts.iter().position(|&s| s == 0.0).unwrap();
        assert!((pair.plateau_ends[j] - 1.0).abs() < 1e-13);
        // On [ξ_{3j}, ½(ξ_{3j}+ξ_{3j+1})]: φ = ξ_{3j}, ψ = ξ_{3j} + 2(r−ξ_{3j}).
        for r in [0.05, 0.2, 0.45] {
            assert!(pair.phi(r).abs() < 1e-10);
            assert!((pair.psi(r) - 2.0 * r).abs() < 1e-10);
        }
        let report = check_coinciding_lengths(&pair, &data);
        let cell = &report.cells[j];
        assert!((cell.sing_mass - 1.0).abs() < 1e-13);
        assert!((cell.b_proj_meas - 0.5).abs() < 1e-10);
        assert!((cell.b_exact_meas - 0.5).abs() < 1e-10);
        assert!(report.max_length_gap() < 1e-10);
        assert!(report.max_vs_half_sing() < 1e-10);
    }

    #[test]
    fn phi_psi_sum_and_monotone() {
        let data = exact::ex41_data();
        let proj = project(&data, 0.25).unwrap();
        let pair = rescaling_pair(&data, &proj).unwrap();
        let mut prev_phi = f64::NEG_INFINITY;
        let mut prev_psi = f64::NEG_INFINITY;
        for i in 0..=400 {
            let r = -1.0 + 10.0 * i as f64 / 400.0;
            let (phi, psi) = (pair.phi(r), pair.psi(r));
            assert!((phi + psi - 2.0 * r).abs() < 1e-10);
            assert!(phi >= prev_phi - 1e-10);
            assert!(psi >= prev_psi - 1e-10);
            prev_phi = phi;
            prev_psi = psi;
            let gap = pair.exact_grid.y_at(phi) - pair.proj_grid.y_at(psi);
            assert!(gap.abs() < 1e-9, "ȳ(φ) = ȳ_Δx(ψ) failed at r = {r}");
        }
    }
}
