//! Derivatives of points of Sym^g X with respect to ζ = Σ u(Q_r).

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::abel::SurfacePoint;
use super::periods::PeriodData;
use crate::algebra::poly_from_roots_except;
use crate::{Error, Result};

fn generic_coords(points: &[SurfacePoint]) -> Result<Vec<(Complex64, Complex64)>> {
    points
        .iter()
        .map(|p| match *p {
            SurfacePoint::Generic { z, w } => Ok((z, w)),
            _ => Err(Error::Point("Jacobian needs regular points".into())),
        })
        .collect()
}

fn check_distinct(zs: &[Complex64], scale: f64) -> Result<()> {
    for i in 0..zs.len() {
        for j in i + 1..zs.len() {
            if (zs[i] - zs[j]).norm() <= 1e-10 * scale {
                return Err(Error::Singular(format!("points {} and {} share a z-value", i + 1, j + 1)));
            }
        }
    }
    Ok(())
}

fn check_hyperelliptic(periods: &PeriodData, count: usize) -> Result<()> {
    if periods.curve.n() != 2 {
        return Err(Error::InvalidCurve("hyperelliptic curve expected".into()));
    }
    if count != periods.genus() {
        return Err(Error::Point(format!("{} points given, genus is {}", count, periods.genus())));
    }
    Ok(())
}

/// ∂z(Q_r)/∂ζ_s as A⁻¹C, A_{lr} = z_r^{l−1}/w_r, by a direct solve.
pub fn aj_jacobian_hyper(periods: &PeriodData, points: &[SurfacePoint]) -> Result<DMatrix<Complex64>> {
    check_hyperelliptic(periods, points.len())?;
    let zw = generic_coords(points)?;
    let zs: Vec<Complex64> = zw.iter().map(|p| p.0).collect();
    check_distinct(&zs, periods.curve.scale())?;
    let g = periods.genus();
    let a = DMatrix::from_fn(g, g, |l, r| zw[r].0.powi(l as i32) / zw[r].1);
    let lu = a.lu();
    lu.solve(&periods.a_raw).ok_or_else(|| Error::Singular("A matrix".into()))
}

/// The same matrix from the symmetric-function expression
/// w_r/F'(z_r) · Σ_l (−1)^{g−l} σ_{g−l}(z without z_r) C_{ls}.
pub fn aj_jacobian_hyper_closed(periods: &PeriodData, points: &[SurfacePoint]) -> Result<DMatrix<Complex64>> {
    check_hyperelliptic(periods, points.len())?;
    let zw = generic_coords(points)?;
    let zs: Vec<Complex64> = zw.iter().map(|p| p.0).collect();
    check_distinct(&zs, periods.curve.scale())?;
    let g = periods.genus();
    let c = &periods.a_raw;
    let mut out = DMatrix::zeros(g, g);
    for r in 0..g {
        let fr = poly_from_roots_except(&zs, r);
        let fprime: Complex64 = (0..g).filter(|&j| j != r).map(|j| zs[r] - zs[j]).product();
        let pre = zw[r].1 / fprime;
        for s in 0..g {
            let sum: Complex64 = (0..g).map(|l| fr[l] * c[(l, s)]).sum();
            out[(r, s)] = pre * sum;
        }
    }
    Ok(out)
}

/// Branch-anchored configuration: 2q−1 distinct anchors, the first q−1 of
/// which carry a second point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnchorPattern {
    pub anchors: Vec<usize>,
    pub doubled: usize,
}

impl AnchorPattern {
    pub fn new(periods: &PeriodData, anchors: Vec<usize>) -> Result<Self> {
        let curve = &periods.curve;
        if curve.n() != 3 {
            return Err(Error::InvalidCurve("trigonal curve expected".into()));
        }
        let q = curve.q();
        if anchors.len() != 2 * q - 1 {
            return Err(Error::Point(format!("{} anchors given, expected {}", anchors.len(), 2 * q - 1)));
        }
        for (i, &a) in anchors.iter().enumerate() {
            if a >= curve.degree() {
                return Err(Error::Point(format!("anchor {a} out of range")));
            }
            if anchors[..i].contains(&a) {
                return Err(Error::Point("anchors must be distinct; doubling is implied by position".into()));
            }
        }
        Ok(AnchorPattern { anchors, doubled: q - 1 })
    }
}

#[derive(Clone, Debug)]
pub struct TrigJacobian {
    /// ∂α_r/∂ζ_s, one row per anchor.
    pub d_alpha: DMatrix<Complex64>,
    /// ∂β_r/∂ζ_s, one row per doubled anchor.
    pub d_beta: DMatrix<Complex64>,
    /// ∂(raw integrals)/∂(α, β) at the anchored configuration.
    pub coordinate_matrix: DMatrix<Complex64>,
}

/// Closed-form ∂α/∂ζ and ∂β/∂ζ at the anchored configuration, where α = t + s
/// and β = (t − s)²/2 for doubled anchors and α = t for single ones.
pub fn aj_jacobian_trig(periods: &PeriodData, pattern: &AnchorPattern) -> Result<TrigJacobian> {
    let curve = &periods.curve;
    let q = curve.q();
    let g = periods.genus();
    let lam: Vec<Complex64> = pattern.anchors.iter().map(|&i| curve.lambdas()[i]).collect();
    let units: Vec<Complex64> = pattern.anchors.iter().map(|&i| curve.branch_unit(i)).collect();
    let plus = 2 * q - 1;
    let minus = pattern.doubled;
    let c = &periods.a_raw;
    let mut d_alpha = DMatrix::zeros(plus, g);
    for r in 0..plus {
        let fr = poly_from_roots_except(&lam, r);
        let fprime: Complex64 = (0..plus).filter(|&j| j != r).map(|j| lam[r] - lam[j]).product();
        let pre = units[r] * units[r] / (3.0 * fprime);
        for s in 0..g {
            d_alpha[(r, s)] = pre * (0..plus).map(|l| fr[l] * c[(l, s)]).sum::<Complex64>();
        }
    }
    let low = &lam[..minus];
    let mut d_beta = DMatrix::zeros(minus, g);
    for r in 0..minus {
        let fr = poly_from_roots_except(low, r);
        let fprime: Complex64 = (0..minus).filter(|&j| j != r).map(|j| low[r] - low[j]).product();
        let pre = 2.0 * units[r] / (3.0 * fprime);
        for s in 0..g {
            d_beta[(r, s)] = pre * (0..minus).map(|l| fr[l] * c[(plus + l, s)]).sum::<Complex64>();
        }
    }
    let mut m = DMatrix::zeros(g, g);
    for r in 0..plus {
        for l in 0..plus {
            m[(l, r)] = 3.0 * lam[r].powi(l as i32) / (units[r] * units[r]);
        }
    }
    for r in 0..minus {
        for l in 0..minus {
            m[(plus + l, plus + r)] = 1.5 * lam[r].powi(l as i32) / units[r];
        }
    }
    Ok(TrigJacobian { d_alpha, d_beta, coordinate_matrix: m })
}

/// (∂φ/∂α, ∂φ/∂β) for a symmetric φ(t, s) with α = t + s, β = (t − s)²/2,
/// from central differences of step h. Near the diagonal the β-derivative
/// is (φ_tt − φ_ts)/2.
pub fn sym_coord_derivatives<F>(phi: F, t: Complex64, s: Complex64, h: f64) -> (Complex64, Complex64)
where
    F: Fn(Complex64, Complex64) -> Complex64,
{
    let hc = Complex64::new(h, 0.0);
    let phi_t = (phi(t + hc, s) - phi(t - hc, s)) / (2.0 * h);
    let phi_s = (phi(t, s + hc) - phi(t, s - hc)) / (2.0 * h);
    let d_alpha = (phi_t + phi_s) / 2.0;
    let d_beta = if (t - s).norm() > 1e3 * h {
        (phi_t - phi_s) / (2.0 * (t - s))
    } else {
        let phi_tt = (phi(t + hc, s) - 2.0 * phi(t, s) + phi(t - hc, s)) / (h * h);
        let phi_ts =
            (phi(t + hc, s + hc) - phi(t + hc, s - hc) - phi(t - hc, s + hc) + phi(t - hc, s - hc)) / (4.0 * h * h);
        (phi_tt - phi_ts) / 2.0
    };
    (d_alpha, d_beta)
}
