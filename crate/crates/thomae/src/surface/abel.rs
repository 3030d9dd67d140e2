use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::curve::CurveSpec;
use super::periods::PeriodData;
use super::segment::Segment;
use crate::algebra::{principal_root, root_of_unity};
use crate::quadrature::gauss_legendre;
use crate::{Error, Result};

/// A point of the curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SurfacePoint {
    Infinity,
    /// Finite branch point, 0-based index.
    Branch(usize),
    /// A regular point (z, w) with w^n = f(z).
    Generic { z: Complex64, w: Complex64 },
}

impl SurfacePoint {
    pub fn z(&self, curve: &CurveSpec) -> Option<Complex64> {
        match *self {
            SurfacePoint::Infinity => None,
            SurfacePoint::Branch(i) => Some(curve.lambdas()[i]),
            SurfacePoint::Generic { z, .. } => Some(z),
        }
    }

    /// The regular point over z on sheet `sheet` (w = ω^sheet · principal root of f).
    pub fn on_sheet(curve: &CurveSpec, z: Complex64, sheet: i64) -> Self {
        let w = root_of_unity(sheet, curve.n()) * principal_root(curve.f(z), curve.n());
        SurfacePoint::Generic { z, w }
    }
}

/// Which branch point a path to a regular point starts from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PathHint {
    pub via_branch: Option<usize>,
}

fn check_on_curve(curve: &CurveSpec, z: Complex64, w: Complex64) -> Result<()> {
    let f = curve.f(z);
    let resid = (w.powu(curve.n()) - f).norm();
    if resid > 1e-8 * f.norm().max(1e-300) {
        return Err(Error::Point(format!("w^n ≠ f(z) at z = {z} (residual {resid:e})")));
    }
    let near = curve.lambdas().iter().map(|l| (l - z).norm()).fold(f64::INFINITY, f64::min);
    if near <= 1e-10 * curve.scale() {
        return Err(Error::Point("regular point coincides with a branch point".into()));
    }
    Ok(())
}

/// Lift index m with ω^m·w0 closest to w.
pub(crate) fn match_sheet(n: u32, w0: Complex64, w: Complex64) -> Result<i64> {
    let m = (0..n as i64)
        .min_by(|&a, &b| {
            let da = (root_of_unity(a, n) * w0 - w).norm();
            let db = (root_of_unity(b, n) * w0 - w).norm();
            da.partial_cmp(&db).unwrap()
        })
        .unwrap();
    let err = (root_of_unity(m, n) * w0 - w).norm() / w.norm().max(f64::MIN_POSITIVE);
    if err > 1e-6 {
        return Err(Error::Point(format!("sheet matching failed ({err:e})")));
    }
    Ok(m)
}

/// Raw integrals along a segment on the lift whose w matches `w_at_start` (or
/// `w_at_end`), together with the sheet factor used.
fn lifted_integrals(periods: &PeriodData, seg: &Segment, m: i64) -> DVector<Complex64> {
    let n = periods.curve.n();
    let order = periods.quad_order;
    DVector::from_iterator(
        periods.genus(),
        periods.basis.0.iter().map(|d| root_of_unity(-m * d.w_power as i64, n) * seg.integrate(d, order)),
    )
}

/// Raw-basis integral from P∞ to the point.
pub fn abel_jacobi_raw(periods: &PeriodData, p: &SurfacePoint, hint: PathHint) -> Result<DVector<Complex64>> {
    let curve = &periods.curve;
    match *p {
        SurfacePoint::Infinity => Ok(DVector::zeros(periods.genus())),
        SurfacePoint::Branch(i) => Ok(periods.branch_raw[i].clone()),
        SurfacePoint::Generic { z, w } => {
            check_on_curve(curve, z, w)?;
            let b = match hint.via_branch {
                Some(b) => b,
                None => (0..curve.degree())
                    .min_by(|&a, &c| {
                        (curve.lambdas()[a] - z).norm().partial_cmp(&(curve.lambdas()[c] - z).norm()).unwrap()
                    })
                    .unwrap(),
            };
            let seg = Segment::new(curve, curve.lambdas()[b], z, Some(b), None)?;
            let m = match_sheet(curve.n(), seg.w(1.0), w)?;
            Ok(&periods.branch_raw[b] + lifted_integrals(periods, &seg, m))
        }
    }
}

/// u(P) for the normalized basis with base point P∞.
pub fn abel_jacobi(periods: &PeriodData, p: &SurfacePoint, hint: PathHint) -> Result<DVector<Complex64>> {
    Ok(periods.normalize(&abel_jacobi_raw(periods, p, hint)?))
}

/// Sum of u over a divisor given as a list of points.
pub fn abel_jacobi_sum(periods: &PeriodData, points: &[SurfacePoint]) -> Result<DVector<Complex64>> {
    let mut acc = DVector::zeros(periods.genus());
    for p in points {
        acc += abel_jacobi(periods, p, PathHint::default())?;
    }
    Ok(acc)
}

/// Move a regular point straight to z_new, returning the new point and the
/// raw integrals along the way.
pub fn continue_point(
    periods: &PeriodData,
    from: &SurfacePoint,
    z_new: Complex64,
) -> Result<(SurfacePoint, DVector<Complex64>)> {
    let SurfacePoint::Generic { z, w } = *from else {
        return Err(Error::Point("continuation starts at a regular point".into()));
    };
    let curve = &periods.curve;
    let seg = Segment::new(curve, z, z_new, None, None)?;
    let m = match_sheet(curve.n(), seg.w(-1.0), w)?;
    let w_new = root_of_unity(m, curve.n()) * seg.w(1.0);
    Ok((SurfacePoint::Generic { z: z_new, w: w_new }, lifted_integrals(periods, &seg, m)))
}

/// The point with local coordinate t at branch point i (t^n = z − λ_i,
/// w = t·h(t), h(0) the principal root of f'(λ_i)), and the raw integrals
/// from P_i to it along the ray in t.
pub fn local_point(periods: &PeriodData, i: usize, t: Complex64) -> Result<(SurfacePoint, DVector<Complex64>)> {
    let curve = &periods.curve;
    let n = curve.n();
    let li = curve.lambdas()[i];
    let gaps: Vec<Complex64> = curve.lambdas().iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &l)| li - l).collect();
    let min_gap = gaps.iter().map(|g| g.norm()).fold(f64::INFINITY, f64::min);
    if t.norm().powi(n as i32) > 0.5 * min_gap {
        return Err(Error::Point("local coordinate outside its chart".into()));
    }
    let unit = curve.branch_unit(i);
    let h = |s: Complex64| {
        let sn = s.powu(n);
        gaps.iter().fold(unit, |acc, &g| acc * principal_root(1.0 + sn / g, n))
    };
    if t.norm() == 0.0 {
        return Ok((SurfacePoint::Branch(i), DVector::zeros(periods.genus())));
    }
    let point = SurfacePoint::Generic { z: li + t.powu(n), w: t * h(t) };
    let rule = gauss_legendre(48);
    let nf = n as f64;
    let raw = DVector::from_iterator(
        periods.genus(),
        periods.basis.0.iter().map(|d| {
            let k = d.w_power as i32;
            let mut acc = Complex64::new(0.0, 0.0);
            for (&y, &wt) in rule.nodes.iter().zip(&rule.weights) {
                let sig = (y + 1.0) / 2.0;
                let s = t * sig;
                // n s^{n−1−k} (λ_i + s^n)^a h(s)^{−k} ds
                let v = nf * s.powi(n as i32 - 1 - k) * (li + s.powu(n)).powi(d.power) * h(s).powi(-k);
                acc += v * t * wt * 0.5;
            }
            acc
        }),
    );
    Ok((point, raw))
}

/// A random regular point away from the branch points.
pub fn random_point<R: Rng>(curve: &CurveSpec, rng: &mut R) -> SurfacePoint {
    let l = curve.lambdas();
    let (mut lo_re, mut hi_re, mut lo_im, mut hi_im) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for z in l {
        lo_re = lo_re.min(z.re);
        hi_re = hi_re.max(z.re);
        lo_im = lo_im.min(z.im);
        hi_im = hi_im.max(z.im);
    }
    let pad = 0.5;
    let clearance = 0.05 * curve.scale();
    loop {
        let z = Complex64::new(rng.gen_range(lo_re - pad..hi_re + pad), rng.gen_range(lo_im - pad..hi_im + pad));
        if l.iter().all(|&b| (b - z).norm() > clearance) {
            let sheet = rng.gen_range(0..curve.n() as i64);
            return SurfacePoint::on_sheet(curve, z, sheet);
        }
    }
}
