//! Straight segments in the z-plane with a continuous branch of w.
//!
//! On the segment z = m + h·x, x ∈ [−1, 1], every factor z − λ_i = h(x − x_i)
//! gets its own continuous n-th root: a principal root of the ratio to its
//! value at x = −1 (which never crosses the cut since the ratio moves along a
//! straight line starting at 1), times a fixed root of the starting value.
//! Branch endpoints contribute (1 ± x)^{1/n} explicitly so the integrand's
//! endpoint singularities are carried by Gauss–Jacobi weights.

use num_complex::Complex64;

use super::curve::{CurveSpec, Differential};
use crate::algebra::principal_root;
use crate::quadrature::{integrate_piecewise, Weighted};
use crate::{Error, Result};

/// Minimal relative distance between a segment and a branch point it does not end at.
pub const CLEARANCE_EPS: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct Segment {
    pub start: Complex64,
    pub end: Complex64,
    pub start_branch: Option<usize>,
    pub end_branch: Option<usize>,
    n: u32,
    lambdas: Vec<Complex64>,
    mid: Complex64,
    half: Complex64,
    xs: Vec<Complex64>,
    anchors: Vec<Complex64>,
    start_root: Complex64,
    end_root: Complex64,
}

impl Segment {
    pub fn new(
        curve: &CurveSpec,
        start: Complex64,
        end: Complex64,
        start_branch: Option<usize>,
        end_branch: Option<usize>,
    ) -> Result<Self> {
        if (end - start).norm() == 0.0 {
            return Err(Error::Path("degenerate segment".into()));
        }
        let n = curve.n();
        let mid = (start + end) / 2.0;
        let half = (end - start) / 2.0;
        let lambdas = curve.lambdas().to_vec();
        let xs: Vec<Complex64> = lambdas.iter().map(|&l| (l - mid) / half).collect();
        let mut anchors = vec![Complex64::new(0.0, 0.0); lambdas.len()];
        for (i, &l) in lambdas.iter().enumerate() {
            if Some(i) == start_branch || Some(i) == end_branch {
                continue;
            }
            let x = xs[i];
            let dist = if x.re.abs() <= 1.0 { x.im.abs() } else { (x - Complex64::new(x.re.signum(), 0.0)).norm() };
            if dist * half.norm() <= CLEARANCE_EPS * curve.scale() {
                return Err(Error::Path(format!("segment passes through branch point {}", i + 1)));
            }
            anchors[i] = principal_root(start - l, n);
        }
        Ok(Segment {
            start,
            end,
            start_branch,
            end_branch,
            n,
            lambdas,
            mid,
            half,
            xs,
            anchors,
            start_root: principal_root(half, n),
            end_root: principal_root(-half, n),
        })
    }

    pub fn z(&self, x: f64) -> Complex64 {
        self.mid + self.half * x
    }

    fn generic_root(&self, i: usize, x: f64) -> Complex64 {
        let xi = self.xs[i];
        let ratio = (Complex64::new(x, 0.0) - xi) / (Complex64::new(-1.0, 0.0) - xi);
        self.anchors[i] * principal_root(ratio, self.n)
    }

    /// w on lift 0 with the endpoint factors (1+x)^{1/n}, (1−x)^{1/n} removed.
    fn smooth_part(&self, x: f64) -> Complex64 {
        let mut w = Complex64::new(1.0, 0.0);
        for i in 0..self.lambdas.len() {
            if Some(i) == self.start_branch {
                w *= self.start_root;
            } else if Some(i) == self.end_branch {
                w *= self.end_root;
            } else {
                w *= self.generic_root(i, x);
            }
        }
        w
    }

    /// w on lift 0 at x ∈ [−1, 1].
    pub fn w(&self, x: f64) -> Complex64 {
        let inv_n = 1.0 / self.n as f64;
        let mut w = self.smooth_part(x);
        if self.start_branch.is_some() {
            w *= (1.0 + x).max(0.0).powf(inv_n);
        }
        if self.end_branch.is_some() {
            w *= (1.0 - x).max(0.0).powf(inv_n);
        }
        w
    }

    /// L with w ≈ L·(1+x)^{1/n} as x → −1 (start must be a branch point).
    pub fn leading_at_start(&self) -> Complex64 {
        let mut l = self.smooth_part(-1.0);
        if self.end_branch.is_some() {
            l *= 2f64.powf(1.0 / self.n as f64);
        }
        l
    }

    /// L with w ≈ L·(1−x)^{1/n} as x → 1 (end must be a branch point).
    pub fn leading_at_end(&self) -> Complex64 {
        let mut l = self.smooth_part(1.0);
        if self.start_branch.is_some() {
            l *= 2f64.powf(1.0 / self.n as f64);
        }
        l
    }

    fn singular_points(&self) -> Vec<Complex64> {
        (0..self.lambdas.len())
            .filter(|&i| Some(i) != self.start_branch && Some(i) != self.end_branch)
            .map(|i| self.xs[i])
            .filter(|x| x.norm() < 8.0)
            .collect()
    }

    /// ∫ z^a dz / w^k along lift 0 from start to end.
    pub fn integrate(&self, d: &Differential, order: usize) -> Complex64 {
        let k = d.w_power as i32;
        let exp = -(k as f64) / self.n as f64;
        let singular = self.singular_points();
        let half = self.half;
        let weighted = Weighted {
            f: |x: f64| half * self.z(x).powi(d.power) * self.smooth_part(x).powi(-k),
            left: if self.start_branch.is_some() { exp } else { 0.0 },
            right: if self.end_branch.is_some() { exp } else { 0.0 },
            singular: &singular,
        };
        integrate_piecewise(&weighted, order)
    }

    /// Integrals of every differential in the list.
    pub fn integrate_all(&self, ds: &[Differential], order: usize) -> Vec<Complex64> {
        ds.iter().map(|d| self.integrate(d, order)).collect()
    }
}
