//! Lattice coordinates and the vector of Riemann constants.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::abel::{abel_jacobi_sum, random_point};
use super::periods::PeriodData;
use crate::theta::{theta_plain, Characteristic, Parity, RiemannMatrix};
use crate::{Error, Result};

/// Denominators tried, in order, when snapping lattice coordinates.
pub const SNAP_DENOMINATORS: [i64; 4] = [1, 2, 3, 6];

/// Relative vanishing threshold of the Riemann-constant search.
pub const VANISHING_TOL: f64 = 1e-7;
/// Truncation tolerance and loose threshold of the coarse first pass.
const PREFILTER_THETA_TOL: f64 = 1e-6;
const PREFILTER_VANISHING: f64 = 1e-3;

/// Real (ε, δ) with v = τε/2 + δ/2.
pub fn lattice_reduce(v: &DVector<Complex64>, tau: &RiemannMatrix) -> (DVector<f64>, DVector<f64>) {
    tau.real_coordinates(v)
}

/// Snap v to a characteristic with the smallest denominator from
/// [`SNAP_DENOMINATORS`] whose residual is below `tol`.
pub fn lattice_snap(v: &DVector<Complex64>, tau: &RiemannMatrix, tol: f64) -> Result<(Characteristic, f64)> {
    let (eps, delta) = lattice_reduce(v, tau);
    let mut best = f64::INFINITY;
    for d in SNAP_DENOMINATORS {
        match Characteristic::snap(&eps, &delta, d, tol) {
            Ok(hit) => return Ok(hit),
            Err(Error::Snap(r)) => best = best.min(r),
            Err(e) => return Err(e),
        }
    }
    Err(Error::Snap(best))
}

/// Max-norm distance from v to the nearest point of Z^g + τZ^g.
pub fn lattice_distance(tau: &RiemannMatrix, v: &DVector<Complex64>) -> f64 {
    let (eps, delta) = lattice_reduce(v, tau);
    let n = eps.map(|x| (x / 2.0).round() * 2.0);
    let l = delta.map(|x| (x / 2.0).round() * 2.0);
    let rest = v - tau.point(&n, &l);
    rest.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn vanishes(value: Complex64, scale: f64) -> bool {
    value.norm() < VANISHING_TOL * scale
}

/// K with base point P∞, found among the 4^g half-periods by the vanishing
/// test on random effective divisors of degree g−1.
pub fn riemann_constants(data: &PeriodData) -> Result<(DVector<Complex64>, Characteristic)> {
    let g = data.genus();
    let mut rng = ChaCha8Rng::seed_from_u64(data.config.seed);
    let samples = data.config.k_samples.max(2);
    let mut divisors = Vec::with_capacity(samples);
    for _ in 0..samples {
        let pts: Vec<_> = (0..g - 1).map(|_| random_point(&data.curve, &mut rng)).collect();
        divisors.push(abel_jacobi_sum(data, &pts)?);
    }
    let tol = data.config.theta_tol;
    let coarse = |k: &DVector<Complex64>| -> Result<bool> {
        let t = theta_plain(&(&divisors[0] + k), &data.tau, tol.max(PREFILTER_THETA_TOL))?;
        Ok(t.value.norm() < PREFILTER_VANISHING * t.scale)
    };
    let test = |k: &DVector<Complex64>, ds: &[DVector<Complex64>]| -> Result<bool> {
        for d in ds {
            let t = theta_plain(&(d + k), &data.tau, tol)?;
            if !vanishes(t.value, t.scale) {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let candidates = Characteristic::all_integral(g);
    let survivors: Vec<Characteristic> = candidates
        .into_par_iter()
        .map(|ch| {
            let k = data.tau.point(&ch.eps_f64(), &ch.delta_f64());
            Ok((coarse(&k)? && test(&k, &divisors)?).then_some(ch))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    match survivors.as_slice() {
        [only] => Ok((data.tau.point(&only.eps_f64(), &only.delta_f64()), only.clone())),
        _ => Err(Error::RiemannConstants),
    }
}

/// Σ u(P_i) over the odd positions of the branch chain (hyperelliptic).
pub fn odd_branch_sum(data: &PeriodData) -> DVector<Complex64> {
    data.homology.chain.iter().step_by(2).fold(DVector::zeros(data.genus()), |acc, &i| acc + &data.aj_branch[i])
}

/// (odd, even) counts of the half-period characteristics of u(P_i) over
/// the finite branch points.
pub fn branch_parity_census(data: &PeriodData) -> Result<(usize, usize)> {
    let mut odd = 0;
    let mut even = 0;
    for u in &data.aj_branch {
        let (ch, _) = lattice_snap(u, &data.tau, 1e-6)?;
        match ch.parity()? {
            Parity::Odd => odd += 1,
            Parity::Even => even += 1,
        }
    }
    Ok((odd, even))
}
