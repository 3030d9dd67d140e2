//! Riemann theta functions with rational characteristics.
//!
//! Sums run over the lattice points of an ellipsoid defined by the Cholesky
//! factor of π·Im τ, with the radius chosen from a Gaussian tail bound so that
//! the omitted part of the series is below the requested tolerance.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, gamma_ur};

use crate::{Error, Result};

pub const DEFAULT_RADIUS_CAP: f64 = 40.0;
pub const DEFAULT_SYMMETRY_TOL: f64 = 1e-8;

/// exp(2πi x).
pub fn e(x: Complex64) -> Complex64 {
    (Complex64::new(0.0, 2.0 * PI) * x).exp()
}

/// Riemann matrix together with the data needed for certified summation.
#[derive(Clone, Debug)]
pub struct RiemannMatrix {
    tau: DMatrix<Complex64>,
    im_inv: DMatrix<f64>,
    chol: DMatrix<f64>,
    chol_inv_norm: f64,
    shortest: f64,
    radius_cap: f64,
}

impl RiemannMatrix {
    pub fn new(tau: DMatrix<Complex64>) -> Result<Self> {
        Self::with_options(tau, DEFAULT_SYMMETRY_TOL, DEFAULT_RADIUS_CAP)
    }

    pub fn with_options(tau: DMatrix<Complex64>, symmetry_tol: f64, radius_cap: f64) -> Result<Self> {
        let g = tau.nrows();
        if g == 0 || tau.ncols() != g {
            return Err(Error::InvalidCharacteristic("Riemann matrix must be square".into()));
        }
        let asym = (&tau - tau.transpose()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if asym > symmetry_tol * (1.0 + tau.iter().map(|z| z.norm()).fold(0.0, f64::max)) {
            return Err(Error::NotSymmetric(asym));
        }
        let tau = (&tau + tau.transpose()) * Complex64::new(0.5, 0.0);
        let im = tau.map(|z| z.im);
        let chol = (im.clone() * PI).cholesky().ok_or(Error::NotPositiveDefinite)?;
        let upper = chol.l().transpose();
        let im_inv = im.clone().try_inverse().ok_or(Error::NotPositiveDefinite)?;
        let upper_inv = upper.clone().try_inverse().ok_or(Error::NotPositiveDefinite)?;
        let chol_inv_norm = upper_inv.svd(false, false).singular_values.max();
        let shortest = shortest_vector(&upper);
        Ok(RiemannMatrix { tau, im_inv, chol: upper, chol_inv_norm, shortest, radius_cap })
    }

    pub fn genus(&self) -> usize {
        self.tau.nrows()
    }

    pub fn tau(&self) -> &DMatrix<Complex64> {
        &self.tau
    }

    pub fn shortest_vector(&self) -> f64 {
        self.shortest
    }

    /// (ε, δ) with v = τε/2 + δ/2, as real vectors.
    pub fn real_coordinates(&self, v: &DVector<Complex64>) -> (DVector<f64>, DVector<f64>) {
        let eps = &self.im_inv * v.map(|z| z.im) * 2.0;
        let re_tau = self.tau.map(|z| z.re);
        let delta = (v.map(|z| z.re) - re_tau * &eps * 0.5) * 2.0;
        (eps, delta)
    }

    /// Point τε/2 + δ/2 for real ε, δ.
    pub fn point(&self, eps: &DVector<f64>, delta: &DVector<f64>) -> DVector<Complex64> {
        let e = eps.map(|x| Complex64::new(x * 0.5, 0.0));
        &self.tau * e + delta.map(|x| Complex64::new(x * 0.5, 0.0))
    }
}

/// Length of the shortest nonzero vector of the lattice T·Z^g.
fn shortest_vector(upper: &DMatrix<f64>) -> f64 {
    let g = upper.nrows();
    let mut best = (0..g).map(|j| upper.column(j).norm()).fold(f64::INFINITY, f64::min);
    let center = vec![0.0; g];
    enumerate_ellipsoid(upper, &center, best * (1.0 + 1e-12), |m, r2| {
        if m.iter().any(|&x| x != 0) && r2 > 0.0 {
            best = best.min(r2.sqrt());
        }
    });
    best
}

/// Visits every integer m with ‖T(m + center)‖ ≤ radius, passing ‖·‖².
fn enumerate_ellipsoid(upper: &DMatrix<f64>, center: &[f64], radius: f64, mut visit: impl FnMut(&[i64], f64)) {
    let g = upper.nrows();
    let mut m = vec![0i64; g];
    let mut x = vec![0.0; g];
    fn recurse(
        i: usize,
        upper: &DMatrix<f64>,
        center: &[f64],
        r2: f64,
        acc: f64,
        m: &mut [i64],
        x: &mut [f64],
        visit: &mut dyn FnMut(&[i64], f64),
    ) {
        let g = upper.nrows();
        let s: f64 = (i + 1..g).map(|j| upper[(i, j)] * x[j]).sum();
        let d = upper[(i, i)];
        let room = r2 - acc;
        if room < 0.0 {
            return;
        }
        let r = room.sqrt();
        let lo = ((-s - r) / d - center[i]).ceil() as i64;
        let hi = ((-s + r) / d - center[i]).floor() as i64;
        for mi in lo..=hi {
            m[i] = mi;
            x[i] = mi as f64 + center[i];
            let comp = d * x[i] + s;
            let acc2 = acc + comp * comp;
            if acc2 > r2 {
                continue;
            }
            if i == 0 {
                visit(m, acc2);
            } else {
                recurse(i - 1, upper, center, r2, acc2, m, x, visit);
            }
        }
    }
    recurse(g - 1, upper, center, radius * radius, 0.0, &mut m, &mut x, &mut visit);
}

/// Pair (ε, δ) of rational g-vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Characteristic {
    pub eps: Vec<Rational64>,
    pub delta: Vec<Rational64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Characteristic {
    pub fn new(eps: Vec<Rational64>, delta: Vec<Rational64>) -> Result<Self> {
        if eps.len() != delta.len() || eps.is_empty() {
            return Err(Error::InvalidCharacteristic("ε and δ must have equal positive length".into()));
        }
        Ok(Characteristic { eps, delta })
    }

    pub fn zero(g: usize) -> Self {
        Characteristic { eps: vec![Rational64::zero(); g], delta: vec![Rational64::zero(); g] }
    }

    pub fn from_ints(eps: &[i64], delta: &[i64]) -> Result<Self> {
        Self::new(
            eps.iter().map(|&x| Rational64::from_integer(x)).collect(),
            delta.iter().map(|&x| Rational64::from_integer(x)).collect(),
        )
    }

    /// Every integral characteristic with entries in {0,1}, in binary order.
    pub fn all_integral(g: usize) -> Vec<Self> {
        (0..1u64 << (2 * g))
            .map(|bits| {
                let eps: Vec<i64> = (0..g).map(|i| (bits >> i & 1) as i64).collect();
                let delta: Vec<i64> = (0..g).map(|i| (bits >> (g + i) & 1) as i64).collect();
                Self::from_ints(&eps, &delta).unwrap()
            })
            .collect()
    }

    pub fn genus(&self) -> usize {
        self.eps.len()
    }

    pub fn is_integral(&self) -> bool {
        self.eps.iter().chain(&self.delta).all(|x| x.is_integer())
    }

    pub fn parity(&self) -> Result<Parity> {
        if !self.is_integral() {
            return Err(Error::InvalidCharacteristic(format!("{self} is not integral")));
        }
        let dot: i64 = self.eps.iter().zip(&self.delta).map(|(a, b)| a.to_integer() * b.to_integer()).sum();
        Ok(if dot.rem_euclid(2) == 0 { Parity::Even } else { Parity::Odd })
    }

    pub fn eps_f64(&self) -> DVector<f64> {
        DVector::from_iterator(self.genus(), self.eps.iter().map(|x| x.to_f64().unwrap()))
    }

    pub fn delta_f64(&self) -> DVector<f64> {
        DVector::from_iterator(self.genus(), self.delta.iter().map(|x| x.to_f64().unwrap()))
    }

    pub fn negated(&self) -> Self {
        Characteristic {
            eps: self.eps.iter().map(|x| -x).collect(),
            delta: self.delta.iter().map(|x| -x).collect(),
        }
    }

    pub fn add(&self, other: &Characteristic) -> Self {
        Characteristic {
            eps: self.eps.iter().zip(&other.eps).map(|(a, b)| a + b).collect(),
            delta: self.delta.iter().zip(&other.delta).map(|(a, b)| a + b).collect(),
        }
    }

    /// Largest denominator among the entries.
    pub fn denominator(&self) -> i64 {
        self.eps.iter().chain(&self.delta).map(|x| *x.denom()).max().unwrap_or(1)
    }
}

impl fmt::Display for Characteristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let row = |v: &[Rational64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        write!(f, "[{}; {}]", row(&self.eps), row(&self.delta))
    }
}

/// Parses the display form "[ε₁ … ε_g; δ₁ … δ_g]"; brackets are optional
/// and entries may be rationals such as 1/3.
impl std::str::FromStr for Characteristic {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('[').trim_end_matches(']');
        let (eps, delta) = body
            .split_once(';')
            .ok_or_else(|| Error::InvalidCharacteristic(format!("expected \"ε; δ\", got {s:?}")))?;
        let row = |part: &str| -> Result<Vec<Rational64>> {
            part.split_whitespace()
                .map(|x| x.parse::<Rational64>().map_err(|_| Error::InvalidCharacteristic(format!("bad entry {x:?}"))))
                .collect()
        };
        Characteristic::new(row(eps)?, row(delta)?)
    }
}

/// e(q) for rational q, computed from q mod 1.
fn e_rational(q: Rational64) -> Complex64 {
    let frac = q - q.floor();
    Complex64::from_polar(1.0, 2.0 * PI * frac.to_f64().unwrap())
}

/// Reduce entries into [0, 2), returning the reduced characteristic and the
/// phase with θ[original] = phase·θ[reduced].
pub fn reduce_characteristic(ch: &Characteristic) -> (Characteristic, Complex64) {
    let two = Rational64::from_integer(2);
    let split = |x: &Rational64| {
        let n = (x / two).floor();
        (x - n * two, n)
    };
    let eps: Vec<Rational64> = ch.eps.iter().map(|x| split(x).0).collect();
    let (delta, shifts): (Vec<Rational64>, Vec<Rational64>) = ch.delta.iter().map(split).unzip();
    let q: Rational64 = eps.iter().zip(&shifts).map(|(a, l)| a * l).sum::<Rational64>() / two;
    (Characteristic { eps, delta }, e_rational(q))
}

/// ζ' and prefactor with θ[ε;δ](ζ) = prefactor·θ(ζ').
pub fn apply_transchar(
    ch: &Characteristic,
    zeta: &DVector<Complex64>,
    tau: &RiemannMatrix,
) -> (DVector<Complex64>, Complex64) {
    let eps = ch.eps_f64().map(|x| Complex64::new(x, 0.0));
    let delta = ch.delta_f64().map(|x| Complex64::new(x, 0.0));
    let shifted = zeta + tau.tau() * &eps * Complex64::new(0.5, 0.0) + &delta * Complex64::new(0.5, 0.0);
    let quad = (eps.transpose() * tau.tau() * &eps)[(0, 0)] / 8.0;
    let lin = (eps.transpose() * (zeta + &delta * Complex64::new(0.5, 0.0)))[(0, 0)] / 2.0;
    (shifted, e(quad + lin))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaValue {
    pub value: Complex64,
    /// Bound on the omitted tail.
    pub truncation_bound: f64,
    /// Sum of the moduli of the summed terms; the natural scale for vanishing tests.
    pub scale: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaGradient {
    pub value: ThetaValue,
    pub gradient: Vec<Complex64>,
    pub gradient_bound: f64,
}

fn upper_gamma(s: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return gamma(s);
    }
    gamma_ur(s, x) * gamma(s)
}

/// Tail bounds for Σ_{‖x‖>R} ‖x‖^k e^{−‖x‖²} over a shifted lattice, k = 0, 1.
fn tail_bounds(g: usize, rho: f64, radius: f64) -> (f64, f64) {
    let gf = g as f64;
    let x = (radius - rho / 2.0).max(0.0).powi(2);
    let pre = gf / 2.0 * (2.0 / rho).powf(gf);
    let b0 = pre * upper_gamma(gf / 2.0, x);
    let b1 = pre * (rho / 2.0 * upper_gamma(gf / 2.0, x) + upper_gamma((gf + 1.0) / 2.0, x));
    (b0, b1)
}

/// Smallest radius on a fine grid whose tail bound satisfies `ok`.
fn search_radius(tau: &RiemannMatrix, ok: impl Fn(f64, f64) -> bool) -> Result<f64> {
    let g = tau.genus();
    let rho = tau.shortest;
    let start = ((g as f64).sqrt() + rho) / 2.0;
    let step = 1e-3;
    let at = |k: u64| start + k as f64 * step;
    let pass = |k: u64| {
        let (b0, b1) = tail_bounds(g, rho, at(k));
        ok(b0, b1)
    };
    let cap_k = ((tau.radius_cap - start) / step).ceil().max(0.0) as u64;
    if !pass(cap_k) {
        return Err(Error::RadiusCap { radius: f64::INFINITY, cap: tau.radius_cap });
    }
    if pass(0) {
        return Ok(at(0));
    }
    let (mut lo, mut hi) = (0u64, cap_k);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if pass(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(at(hi))
}

/// Radius such that the tail of the series (order 0) or of the series and its
/// term-differentiated gradient (order 1) is below `tol`, for unit prefactor.
pub fn truncation_radius(tau: &RiemannMatrix, tol: f64, deriv_order: u8) -> Result<f64> {
    assert!(tol > 0.0);
    let t_inv = tau.chol_inv_norm;
    match deriv_order {
        0 => search_radius(tau, |b0, _| b0 <= tol),
        _ => search_radius(tau, |b0, b1| b0 <= tol && 2.0 * PI * t_inv * b1 <= tol),
    }
}

struct Prepared {
    zeta: DVector<Complex64>,
    center: DVector<f64>,
    shift: DVector<f64>,
    prefactor: Complex64,
    lattice_shift: DVector<f64>,
    growth: f64,
}

/// Range-reduce ζ by lattice shifts, tracking the quasi-periodicity factor.
fn prepare(ch: &Characteristic, zeta: &DVector<Complex64>, tau: &RiemannMatrix) -> Prepared {
    let g = tau.genus();
    let eps = ch.eps_f64();
    let delta = ch.delta_f64();
    let c0 = &tau.im_inv * zeta.map(|z| z.im);
    let n = c0.map(|x| -x.round());
    let nc = n.map(|x| Complex64::new(x, 0.0));
    let z1 = zeta + tau.tau() * &nc;
    let l = z1.map(|z| -z.re.round());
    let z2 = &z1 + l.map(|x| Complex64::new(x, 0.0));
    // θ(ζ2) = e(−nᵀτn/2 − nᵀζ + (lᵀε − nᵀδ)/2)·θ(ζ)
    let ntn = (nc.transpose() * tau.tau() * &nc)[(0, 0)];
    let nz = (nc.transpose() * zeta)[(0, 0)];
    let le = l.dot(&eps);
    let nd = n.dot(&delta);
    let prefactor = e(ntn / 2.0 + nz - Complex64::new((le - nd) / 2.0, 0.0));
    let center_c = &tau.im_inv * z2.map(|z| z.im);
    let center = &eps * 0.5 + &center_c;
    let im = tau.tau.map(|z| z.im);
    let growth = (PI * (center_c.transpose() * im * &center_c)[(0, 0)]).exp();
    let _ = g;
    Prepared { zeta: z2, center, shift: eps * 0.5, prefactor, lattice_shift: n, growth }
}

fn sum_series(
    ch: &Characteristic,
    zeta: &DVector<Complex64>,
    tau: &RiemannMatrix,
    tol: f64,
    with_gradient: bool,
) -> Result<ThetaGradient> {
    if zeta.len() != tau.genus() || ch.genus() != tau.genus() {
        return Err(Error::InvalidCharacteristic("dimension mismatch".into()));
    }
    let g = tau.genus();
    let prep = prepare(ch, zeta, tau);
    let scale_factor = prep.prefactor.norm() * prep.growth;
    let kmax = prep.lattice_shift.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let cnorm = (&prep.center - &prep.shift).norm();
    let t_inv = tau.chol_inv_norm;
    let target = tol / scale_factor.max(f64::MIN_POSITIVE);
    let radius = if with_gradient {
        search_radius(tau, |b0, b1| {
            b0 <= target && 2.0 * PI * (t_inv * b1 + cnorm * b0) + 2.0 * PI * kmax * b0 <= target
        })?
    } else {
        search_radius(tau, |b0, _| b0 <= target)?
    };
    let (b0, b1) = tail_bounds(g, tau.shortest, radius);
    let value_bound = scale_factor * b0;
    let grad_bound = scale_factor * (2.0 * PI * (t_inv * b1 + cnorm * b0) + 2.0 * PI * kmax * b0);

    let delta_half = ch.delta_f64() * 0.5;
    let arg = &prep.zeta + delta_half.map(|x| Complex64::new(x, 0.0));
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let mut total = Complex64::new(0.0, 0.0);
    let mut abs_total = 0.0;
    let mut grad = vec![Complex64::new(0.0, 0.0); g];
    let mut nvec = vec![0.0; g];
    let center: Vec<f64> = prep.center.iter().copied().collect();
    enumerate_ellipsoid(&tau.chol, &center, radius, |m, _| {
        for i in 0..g {
            nvec[i] = m[i] as f64 + prep.shift[i];
        }
        let mut quad = Complex64::new(0.0, 0.0);
        for i in 0..g {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..g {
                row += tau.tau[(i, j)] * nvec[j];
            }
            quad += row * nvec[i];
        }
        let mut lin = Complex64::new(0.0, 0.0);
        for i in 0..g {
            lin += arg[i] * nvec[i];
        }
        let term = (Complex64::new(0.0, PI) * quad + two_pi_i * lin).exp();
        total += term;
        abs_total += term.norm();
        if with_gradient {
            for i in 0..g {
                grad[i] += two_pi_i * nvec[i] * term;
            }
        }
    });
    let pre = prep.prefactor;
    let value = pre * total;
    let gradient = if with_gradient {
        (0..g).map(|s| pre * (grad[s] + two_pi_i * prep.lattice_shift[s] * total)).collect()
    } else {
        vec![]
    };
    Ok(ThetaGradient {
        value: ThetaValue { value, truncation_bound: value_bound, scale: abs_total * pre.norm() },
        gradient,
        gradient_bound: if with_gradient { grad_bound } else { 0.0 },
    })
}

/// θ[ε;δ](ζ, τ) with the omitted tail below `tol` in absolute value.
pub fn theta_eval(ch: &Characteristic, zeta: &DVector<Complex64>, tau: &RiemannMatrix, tol: f64) -> Result<ThetaValue> {
    Ok(sum_series(ch, zeta, tau, tol, false)?.value)
}

/// Value and gradient in ζ; both tails below `tol` per component.
pub fn theta_grad(ch: &Characteristic, zeta: &DVector<Complex64>, tau: &RiemannMatrix, tol: f64) -> Result<ThetaGradient> {
    sum_series(ch, zeta, tau, tol, true)
}

/// Plain theta function θ(ζ, τ).
pub fn theta_plain(zeta: &DVector<Complex64>, tau: &RiemannMatrix, tol: f64) -> Result<ThetaValue> {
    theta_eval(&Characteristic::zero(tau.genus()), zeta, tau, tol)
}

impl Characteristic {
    /// Snap real (ε, δ) to rationals with denominator dividing `denom`.
    pub fn snap(eps: &DVector<f64>, delta: &DVector<f64>, denom: i64, tol: f64) -> Result<(Self, f64)> {
        let mut residual: f64 = 0.0;
        let mut snap_one = |x: f64| {
            let k = (x * denom as f64).round();
            residual = residual.max((x - k / denom as f64).abs());
            Rational64::new(k as i64, denom)
        };
        let e: Vec<Rational64> = eps.iter().map(|&x| snap_one(x)).collect();
        let d: Vec<Rational64> = delta.iter().map(|&x| snap_one(x)).collect();
        if residual > tol {
            return Err(Error::Snap(residual));
        }
        Ok((Characteristic { eps: e, delta: d }, residual))
    }
}

#[allow(dead_code)]
fn is_unit(x: &Rational64) -> bool {
    x.abs().is_one()
}
