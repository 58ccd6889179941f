//! Finite differences on regular grids.
//!
//! Weights come from Fornberg's recursion, so any stencil width works. Interior
//! points use centred stencils; near the ends the window is shifted inside the
//! grid (one-sided) and widened by one point for second derivatives so that
//! the formal order is the same everywhere.

use std::ops::{Add, Mul};

use serde::Serialize;

use crate::nkspace::FrameVector;
use crate::quat::{Quaternion, Vec3};

/// Values that can be combined linearly by a stencil.
pub trait Linear: Copy + Add<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
}

impl Linear for f64 {
    fn zero() -> Self {
        0.0
    }
}

impl Linear for Vec3 {
    fn zero() -> Self {
        Vec3::ZERO
    }
}

impl Linear for Quaternion {
    fn zero() -> Self {
        Quaternion::ZERO
    }
}

impl Linear for FrameVector {
    fn zero() -> Self {
        FrameVector::ZERO
    }
}

/// Numerical settings shared by the grid analyses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Numerics {
    /// Formal order of the finite-difference stencils (even, 2..=8).
    pub fd_order: usize,
    /// Cells excluded at every edge when reducing residual fields to statistics.
    pub margin: usize,
    /// Multiplier applied to every certificate tolerance.
    pub tol_scale: f64,
}

impl Default for Numerics {
    fn default() -> Self {
        Numerics { fd_order: 6, margin: 2, tol_scale: 1.0 }
    }
}

impl Numerics {
    pub fn with_order(fd_order: usize) -> Self {
        Numerics { fd_order, ..Default::default() }
    }
}

/// Fornberg weights for derivatives `0..=m` at `x0` from nodes `xs`.
///
/// Returns `w[k][j]`: weight of node `j` in the `k`-th derivative.
pub fn fornberg(x0: f64, xs: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut w = vec![vec![0.0; n]; m + 1];
    if n == 0 {
        return w;
    }
    w[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    w[k][i] = c1 * (k as f64 * w[k - 1][i - 1] - c5 * w[k][i - 1]) / c2;
                }
                w[0][i] = -c1 * c5 * w[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                w[k][j] = (c4 * w[k][j] - k as f64 * w[k - 1][j]) / c3;
            }
            w[0][j] *= c4 / c3;
        }
        c1 = c2;
    }
    w
}

/// Stencils for one derivative order along a line of `n` equally spaced samples.
#[derive(Debug, Clone)]
pub struct LineStencil {
    rows: Vec<(usize, Vec<f64>)>,
}

impl LineStencil {
    /// `deriv` is 1 or 2; the order is clamped so the stencil fits in `n` points.
    pub fn new(n: usize, h: f64, order: usize, deriv: usize) -> Self {
        assert!(n >= 2 && (1..=2).contains(&deriv));
        let order = order.max(2) & !1;
        let centred = (order + 1).min(n);
        let shifted = (order + deriv).min(n);
        let rows = (0..n)
            .map(|i| {
                let half = centred / 2;
                let (start, width) = if i >= half && i + half < n && centred % 2 == 1 {
                    (i - half, centred)
                } else {
                    let width = shifted;
                    let start = i.saturating_sub(width / 2).min(n - width);
                    (start, width)
                };
                let xs: Vec<f64> = (0..width).map(|j| (start + j) as f64).collect();
                let w = fornberg(i as f64, &xs, deriv);
                let scale = h.powi(deriv as i32);
                (start, w[deriv].iter().map(|c| c / scale).collect())
            })
            .collect();
        LineStencil { rows }
    }

    /// Derivative at index `i` of the sequence `f`.
    pub fn apply<T: Linear>(&self, i: usize, f: impl Fn(usize) -> T) -> T {
        let (start, w) = &self.rows[i];
        w.iter().enumerate().fold(T::zero(), |acc, (j, c)| acc + f(start + j) * *c)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// A value per grid node, stored with `u` varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<T> {
    pub nu: usize,
    pub nv: usize,
    pub data: Vec<T>,
}

impl<T: Copy> Field<T> {
    pub fn from_fn(nu: usize, nv: usize, f: impl FnMut(usize, usize) -> T) -> Self {
        let mut f = f;
        let mut data = Vec::with_capacity(nu * nv);
        for iv in 0..nv {
            for iu in 0..nu {
                data.push(f(iu, iv));
            }
        }
        Field { nu, nv, data }
    }

    pub fn try_from_fn<E>(
        nu: usize,
        nv: usize,
        mut f: impl FnMut(usize, usize) -> Result<T, E>,
    ) -> Result<Self, E> {
        let mut data = Vec::with_capacity(nu * nv);
        for iv in 0..nv {
            for iu in 0..nu {
                data.push(f(iu, iv)?);
            }
        }
        Ok(Field { nu, nv, data })
    }

    pub fn get(&self, iu: usize, iv: usize) -> T {
        self.data[iv * self.nu + iu]
    }

    pub fn map<S: Copy>(&self, f: impl Fn(T) -> S) -> Field<S> {
        Field { nu: self.nu, nv: self.nv, data: self.data.iter().map(|x| f(*x)).collect() }
    }

    pub fn zip<S: Copy, R: Copy>(&self, other: &Field<S>, f: impl Fn(T, S) -> R) -> Field<R> {
        assert_eq!((self.nu, self.nv), (other.nu, other.nv));
        Field {
            nu: self.nu,
            nv: self.nv,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    /// Indices at least `margin` cells away from every edge.
    pub fn interior(&self, margin: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let m = margin.min((self.nu - 1) / 2).min((self.nv - 1) / 2);
        let (nu, nv) = (self.nu, self.nv);
        (m..nv - m).flat_map(move |iv| (m..nu - m).map(move |iu| (iu, iv)))
    }
}

impl Field<f64> {
    pub fn max_abs(&self, margin: usize) -> f64 {
        self.interior(margin)
            .map(|(i, j)| self.get(i, j).abs())
            .fold(0.0, |m, x| if x.is_nan() || m.is_nan() { f64::NAN } else { m.max(x) })
    }

    pub fn mean(&self, margin: usize) -> f64 {
        let (s, n) = self.interior(margin).fold((0.0, 0usize), |(s, n), (i, j)| (s + self.get(i, j), n + 1));
        s / n as f64
    }

    pub fn max_dev(&self, margin: usize, centre: f64) -> f64 {
        self.interior(margin)
            .map(|(i, j)| (self.get(i, j) - centre).abs())
            .fold(0.0, f64::max)
    }
}

/// Stencils for a whole grid.
#[derive(Debug, Clone)]
pub struct GridStencils {
    pub du1: LineStencil,
    pub dv1: LineStencil,
    pub du2: LineStencil,
    pub dv2: LineStencil,
}

impl GridStencils {
    pub fn new(nu: usize, nv: usize, du: f64, dv: f64, order: usize) -> Self {
        GridStencils {
            du1: LineStencil::new(nu, du, order, 1),
            dv1: LineStencil::new(nv, dv, order, 1),
            du2: LineStencil::new(nu, du, order, 2),
            dv2: LineStencil::new(nv, dv, order, 2),
        }
    }

    pub fn d_u<T: Linear>(&self, f: &Field<T>) -> Field<T> {
        Field::from_fn(f.nu, f.nv, |iu, iv| self.du1.apply(iu, |k| f.get(k, iv)))
    }

    pub fn d_v<T: Linear>(&self, f: &Field<T>) -> Field<T> {
        Field::from_fn(f.nu, f.nv, |iu, iv| self.dv1.apply(iv, |k| f.get(iu, k)))
    }

    pub fn d_uu<T: Linear>(&self, f: &Field<T>) -> Field<T> {
        Field::from_fn(f.nu, f.nv, |iu, iv| self.du2.apply(iu, |k| f.get(k, iv)))
    }

    pub fn d_vv<T: Linear>(&self, f: &Field<T>) -> Field<T> {
        Field::from_fn(f.nu, f.nv, |iu, iv| self.dv2.apply(iv, |k| f.get(iu, k)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_weights() {
        let w = fornberg(0.0, &[-1.0, 0.0, 1.0], 2);
        assert_eq!(w[1], vec![-0.5, 0.0, 0.5]);
        assert_eq!(w[2], vec![1.0, -2.0, 1.0]);
        let w = fornberg(0.0, &[0.0, 1.0, 2.0], 1);
        assert_eq!(w[1], vec![-1.5, 2.0, -0.5]);
        let w = fornberg(0.0, &[-2.0, -1.0, 0.0, 1.0, 2.0], 1);
        let want = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
        for (a, b) in w[1].iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn exact_on_polynomials_of_the_order() {
        for order in [2usize, 4, 6] {
            let n = 12;
            let h = 0.1;
            let d1 = LineStencil::new(n, h, order, 1);
            let d2 = LineStencil::new(n, h, order, 2);
            let p = |x: f64| (0..=order).map(|k| x.powi(k as i32) * (k as f64 + 1.0)).sum::<f64>();
            let dp = |x: f64| (1..=order).map(|k| k as f64 * x.powi(k as i32 - 1) * (k as f64 + 1.0)).sum::<f64>();
            let ddp = |x: f64| {
                (2..=order)
                    .map(|k| (k * (k - 1)) as f64 * x.powi(k as i32 - 2) * (k as f64 + 1.0))
                    .sum::<f64>()
            };
            for i in 0..n {
                let x = i as f64 * h;
                let a = d1.apply(i, |k| p(k as f64 * h));
                assert!((a - dp(x)).abs() < 1e-9, "order {order} d1 at {i}: {a} vs {}", dp(x));
                let b = d2.apply(i, |k| p(k as f64 * h));
                assert!((b - ddp(x)).abs() < 1e-7, "order {order} d2 at {i}: {b} vs {}", ddp(x));
            }
        }
    }

    #[test]
    fn observed_order_on_sine() {
        for order in [2usize, 4, 6] {
            let err = |h: f64| {
                let n = 41;
                let s = LineStencil::new(n, h, order, 1);
                (0..n).map(|i| (s.apply(i, |k| (k as f64 * h).sin()) - (i as f64 * h).cos()).abs()).fold(0.0, f64::max)
            };
            let (e1, e2) = (err(0.04), err(0.02));
            let observed = (e1 / e2).log2();
            assert!(observed > order as f64 - 0.3, "order {order}: observed {observed}");
        }
    }

    #[test]
    fn interior_iterates_inside_margin() {
        let f = Field::from_fn(6, 5, |i, j| (i + 10 * j) as f64);
        let idx: Vec<_> = f.interior(2).collect();
        assert_eq!(idx, vec![(2, 2), (3, 2)]);
        assert_eq!(f.max_abs(0), 45.0);
    }
}
