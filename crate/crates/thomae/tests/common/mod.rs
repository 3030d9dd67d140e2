#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thomae::surface::{build_periods, BuildConfig, CurveSpec, PeriodData};
use thomae::thomae::Tolerances;
use thomae::Complex64;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn tolerances(tol: f64) -> Tolerances {
    Tolerances { tol, theta_tol: 1e-13 }
}

/// `count` branch values in the box [−1.5, 1.5]², pairwise at least 0.35 apart.
pub fn random_lambdas<R: Rng>(rng: &mut R, count: usize) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = Vec::with_capacity(count);
    while out.len() < count {
        let z = c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        if out.iter().all(|w| (w - z).norm() > 0.35) {
            out.push(z);
        }
    }
    out
}

pub fn curve(n: u32, lambdas: &[(f64, f64)]) -> CurveSpec {
    CurveSpec::new(n, lambdas.iter().map(|&(a, b)| c(a, b)).collect()).unwrap()
}

pub fn periods(curve: &CurveSpec) -> PeriodData {
    build_periods(curve, &BuildConfig::default()).unwrap()
}

pub fn random_periods(n: u32, count: usize, seed: u64) -> PeriodData {
    let curve = CurveSpec::new(n, random_lambdas(&mut rng(seed), count)).unwrap();
    periods(&curve)
}

/// Random Riemann matrix: symmetric real part in [−½, ½], imaginary part
/// BᵀB + ½·I.
pub fn random_tau<R: Rng>(rng: &mut R, g: usize) -> DMatrix<Complex64> {
    let x = DMatrix::from_fn(g, g, |_, _| rng.gen_range(-0.5..0.5));
    let b = DMatrix::from_fn(g, g, |_, _| rng.gen_range(-0.5..0.5));
    let y = b.transpose() * &b + DMatrix::identity(g, g) * 0.5;
    DMatrix::from_fn(g, g, |i, j| c((x[(i, j)] + x[(j, i)]) / 2.0, y[(i, j)]))
}

/// j(τ) from the Eisenstein q-series after reduction to the fundamental domain.
pub fn j_invariant(tau: Complex64) -> Complex64 {
    let mut t = tau;
    for _ in 0..100 {
        t.re -= t.re.round();
        if t.norm_sqr() < 1.0 - 1e-15 {
            t = -1.0 / t;
        } else {
            break;
        }
    }
    let q = (Complex64::new(0.0, 2.0 * std::f64::consts::PI) * t).exp();
    let sigma = |n: u64, k: u32| (1..=n).filter(|d| n % d == 0).map(|d| (d as f64).powi(k as i32)).sum::<f64>();
    let mut e4 = Complex64::new(1.0, 0.0);
    let mut e6 = Complex64::new(1.0, 0.0);
    let mut qn = Complex64::new(1.0, 0.0);
    for n in 1..60u64 {
        qn *= q;
        e4 += 240.0 * sigma(n, 3) * qn;
        e6 -= 504.0 * sigma(n, 5) * qn;
    }
    let e43 = e4 * e4 * e4;
    1728.0 * e43 / (e43 - e6 * e6)
}

pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
