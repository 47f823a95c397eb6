//! Breakpoint-based piecewise linear functions.
//!
//! One representation covers both kinds of function the pipeline works with:
//! continuous wave profiles, and left-continuous increasing cumulative
//! energies with jump discontinuities. Every breakpoint carries a left and a
//! right value; the function is constant outside the breakpoint span.

use alloc::string::ToString;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// A breakpoint with the value attained from the left and from the right.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Breakpoint {
    pub x: f64,
    pub left: f64,
    pub right: f64,
}

/// Piecewise linear function with constant tails.
///
/// Evaluation is left-continuous: `eval(x)` at a breakpoint returns the left
/// value, matching the convention for cumulative energies `F(x) = μ((−∞, x))`.
/// Continuous functions simply carry `left == right` at every breakpoint.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PiecewiseLinearFn {
    points: Vec<Breakpoint>,
    left_tail: f64,
    right_tail: f64,
}

impl PiecewiseLinearFn {
    /// Constant function without breakpoints.
    pub fn constant(value: f64) -> Self {
        Self {
            points: Vec::new(),
            left_tail: value,
            right_tail: value,
        }
    }

    /// Continuous function through `(x, value)` nodes, constant outside.
    pub fn continuous(nodes: &[(f64, f64)]) -> Result<Self> {
        let points: Vec<Breakpoint> = nodes
            .iter()
            .map(|&(x, v)| Breakpoint {
                x,
                left: v,
                right: v,
            })
            .collect();
        Self::with_jumps(points)
    }

    /// Function from explicit breakpoints; `x` must be strictly increasing
    /// and all values finite.
    pub fn with_jumps(points: Vec<Breakpoint>) -> Result<Self> {
        for (i, p) in points.iter().enumerate() {
            if !p.x.is_finite() || !p.left.is_finite() || !p.right.is_finite() {
                return Err(Error::Structure {
                    index: i,
                    reason: "non-finite breakpoint".to_string(),
                });
            }
            if i > 0 && points[i - 1].x >= p.x {
                return Err(Error::Structure {
                    index: i,
                    reason: "breakpoints not strictly increasing in x".to_string(),
                });
            }
        }
        let left_tail = points.first().map_or(0.0, |p| p.left);
        let right_tail = points.last().map_or(0.0, |p| p.right);
        Ok(Self {
            points,
            left_tail,
            right_tail,
        })
    }

    pub fn points(&self) -> &[Breakpoint] {
        &self.points
    }

    pub fn left_tail(&self) -> f64 {
        self.left_tail
    }

    pub fn right_tail(&self) -> f64 {
        self.right_tail
    }

    /// Breakpoint span, `None` for constants.
    pub fn span(&self) -> Option<(f64, f64)> {
        match (self.points.first(), self.points.last()) {
            (Some(a), Some(b)) => Some((a.x, b.x)),
            _ => None,
        }
    }

    /// Index of the first breakpoint with `x >= query` (== `points.len()` if none).
    fn lower_bound(&self, x: f64) -> usize {
        self.points.partition_point(|p| p.x < x)
    }

    /// Left-continuous evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.eval_pair(x).0
    }

    /// Right limit at `x`.
    pub fn eval_right(&self, x: f64) -> f64 {
        self.eval_pair(x).1
    }

    /// `(f(x−) , f(x+))`; the two coincide away from jump points.
    pub fn eval_pair(&self, x: f64) -> (f64, f64) {
        if self.points.is_empty() {
            return (self.left_tail, self.left_tail);
        }
        let i = self.lower_bound(x);
        if i == self.points.len() {
            return (self.right_tail, self.right_tail);
        }
        let p = self.points[i];
        if p.x == x {
            return (p.left, p.right);
        }
        if i == 0 {
            return (self.left_tail, self.left_tail);
        }
        let a = self.points[i - 1];
        let s = (p.left - a.right) / (p.x - a.x);
        let v = a.right + s * (x - a.x);
        (v, v)
    }

    /// True when every breakpoint has `left == right`.
    pub fn is_continuous(&self) -> bool {
        self.points.iter().all(|p| p.left == p.right)
    }

    /// True when the function never decreases (including across jumps and tails).
    pub fn is_nondecreasing(&self) -> bool {
        let mut prev = self.left_tail;
        for p in &self.points {
            if p.left < prev || p.right < p.left {
                return false;
            }
            prev = p.right;
        }
        prev <= self.right_tail || self.points.is_empty()
    }

    /// Largest absolute value attained (piecewise linear, so breakpoints and
    /// tails suffice).
    pub fn sup_abs(&self) -> f64 {
        let mut m = math::abs(self.left_tail).max(math::abs(self.right_tail));
        for p in &self.points {
            m = m.max(math::abs(p.left)).max(math::abs(p.right));
        }
        m
    }
}

/// Sorted union of the breakpoint abscissae of two functions.
pub fn merged_breakpoints(a: &PiecewiseLinearFn, b: &PiecewiseLinearFn) -> Vec<f64> {
    let mut xs: Vec<f64> = a
        .points()
        .iter()
        .chain(b.points().iter())
        .map(|p| p.x)
        .collect();
    xs.sort_unstable_by(f64::total_cmp);
    xs.dedup();
    xs
}

/// Exact `sup |a − b|`: the difference is piecewise linear, so the sup is
/// attained at a breakpoint of either function or in a tail.
pub fn sup_diff(a: &PiecewiseLinearFn, b: &PiecewiseLinearFn) -> f64 {
    let mut m = math::abs(a.left_tail() - b.left_tail())
        .max(math::abs(a.right_tail() - b.right_tail()));
    for x in merged_breakpoints(a, b) {
        let (al, ar) = a.eval_pair(x);
        let (bl, br) = b.eval_pair(x);
        m = m.max(math::abs(al - bl)).max(math::abs(ar - br));
    }
    m
}

/// Exact `∫ |a − b| dx` over the union breakpoint span (tails are assumed to
/// agree; their contribution is not integrated).
pub fn l1_diff(a: &PiecewiseLinearFn, b: &PiecewiseLinearFn) -> f64 {
    segment_fold(a, b, 0.0, |acc, len, d0, d1| {
        acc + if d0 * d1 >= 0.0 {
            0.5 * len * (math::abs(d0) + math::abs(d1))
        } else {
            // Sign change: split the segment at the zero of the linear difference.
            0.5 * len * (d0 * d0 + d1 * d1) / (math::abs(d0) + math::abs(d1))
        }
    })
}

/// Exact `(∫ (a − b)² dx)^{1/2}` over the union breakpoint span.
pub fn l2_diff(a: &PiecewiseLinearFn, b: &PiecewiseLinearFn) -> f64 {
    math::sqrt(segment_fold(a, b, 0.0, |acc, len, d0, d1| {
        acc + len * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0
    }))
}

fn segment_fold(
    a: &PiecewiseLinearFn,
    b: &PiecewiseLinearFn,
    init: f64,
    mut f: impl FnMut(f64, f64, f64, f64) -> f64,
) -> f64 {
    let xs = merged_breakpoints(a, b);
    let mut acc = init;
    for w in xs.windows(2) {
        let d0 = a.eval_right(w[0]) - b.eval_right(w[0]);
        let d1 = a.eval(w[1]) - b.eval(w[1]);
        acc = f(acc, w[1] - w[0], d0, d1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_conventions() {
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
        ])
        .unwrap();
        assert_eq!(f.eval(-1.0), 0.0);
        assert_eq!(f.eval(0.0), 0.0);
        assert_eq!(f.eval_right(0.0), 1.0);
        assert_eq!(f.eval(0.5), 1.5);
        assert_eq!(f.eval(1.0), 2.0);
        assert_eq!(f.eval(5.0), 2.0);
        assert!(f.is_nondecreasing());
        assert!(!f.is_continuous());
    }

    #[test]
    fn rejects_unsorted_breakpoints() {
        let err = PiecewiseLinearFn::continuous(&[(0.0, 0.0), (0.0, 1.0)]).unwrap_err();
        match err {
            Error::Structure { index, .. } => assert_eq!(index, 1),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn exact_norm_differences() {
        let a = PiecewiseLinearFn::continuous(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)]).unwrap();
        let b = PiecewiseLinearFn::constant(0.0);
        assert_eq!(sup_diff(&a, &b), 1.0);
        assert!((l1_diff(&a, &b) - 1.0).abs() < 1e-15);
        // ∫ tri² = 2/3 on the hat of height 1 and base 2.
        assert!((l2_diff(&a, &b) - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sign_change_l1() {
        let a = PiecewiseLinearFn::continuous(&[(0.0, -1.0), (1.0, 1.0)]).unwrap();
        let b = PiecewiseLinearFn::constant(0.0);
        // Two triangles of area 1/4 each.
        assert!((l1_diff(&a, &b) - 0.5).abs() < 1e-15);
    }
}
