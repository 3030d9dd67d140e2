//! Identities on hyperelliptic curves w² = f(z), deg f = 2g+1.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::partition::{char_from_partition_hyp, HypPartition};
use super::{ratio_report, sigma_contraction, Tolerances, VerificationReport, MAX_RESAMPLES, ZERO_TOL};
use crate::algebra::{poly_from_roots, principal_root, vandermonde_delta, IndexSet, Symbol};
use crate::surface::abel::{abel_jacobi_sum, random_point, SurfacePoint};
use crate::surface::periods::PeriodData;
use crate::theta::{theta_eval, theta_grad, theta_plain, Characteristic};
use crate::{Error, Result};

fn zero(g: usize) -> DVector<Complex64> {
    DVector::zeros(g)
}

/// (det C / 2^{g+extra} π^g)^{1/2}.
fn det_prefactor(periods: &PeriodData, extra: i32) -> Complex64 {
    let g = periods.genus() as i32;
    let det = periods.a_raw.determinant();
    principal_root(det / (2f64.powi(g + extra) * PI.powi(g)), 2)
}

fn quarter_deltas(p: &HypPartition, lambdas: &[Complex64]) -> Complex64 {
    principal_root(vandermonde_delta(&p.i, lambdas), 4) * principal_root(vandermonde_delta(&p.j, lambdas), 4)
}

fn require_hyperelliptic(periods: &PeriodData) -> Result<()> {
    if periods.curve.n() == 2 {
        Ok(())
    } else {
        Err(Error::InvalidCurve("hyperelliptic curve expected".into()))
    }
}

/// θ[e(I₀)](0) against (det C/2^gπ^g)^{1/2} Δ(I₀)^{1/4} Δ(J₀)^{1/4}, as an 8th root.
pub fn verify_thomae_const_hyp(periods: &PeriodData, p: &HypPartition, tol: Tolerances) -> VerificationReport {
    verify_thomae_const_hyp_with(periods, p, periods.curve.lambdas(), tol)
}

/// As [`verify_thomae_const_hyp`], with the branch values of the right-hand side supplied.
pub fn verify_thomae_const_hyp_with(
    periods: &PeriodData,
    p: &HypPartition,
    rhs_lambdas: &[Complex64],
    tol: Tolerances,
) -> VerificationReport {
    const ID: &str = "thomae_const_hyp";
    let run = || -> Result<VerificationReport> {
        require_hyperelliptic(periods)?;
        if p.m != 0 {
            return Err(Error::InvalidPartition(format!("{p} has m = {}, expected 0", p.m)));
        }
        let (ch, snap) = char_from_partition_hyp(p, periods)?;
        let theta = theta_eval(&ch, &zero(periods.genus()), &periods.tau, tol.theta_tol)?;
        let rhs = det_prefactor(periods, 0) * quarter_deltas(p, rhs_lambdas);
        let mut r = ratio_report(ID, p.to_string(), vec![theta.value], vec![rhs], 8, tol);
        r.characteristic = Some(ch.to_string());
        r.extra.insert("snap_residual".into(), snap);
        Ok(r)
    };
    run().unwrap_or_else(|e| VerificationReport::failed(ID, p.to_string(), tol, e.to_string()))
}

/// ∂_s θ[e(I₁)](0) against (det C/2^{g+2}π^g)^{1/2} Δ(I₁)^{1/4} Δ(J₁)^{1/4}
/// Σ_l C_{ls} (−1)^{g−l} σ_{g−l}(I₁), one common 8th root for all s.
///
/// With ∞ ∈ I₁ the σ-sum runs over the polynomial of I₁∖{∞}; that case is
/// flagged experimental.
pub fn verify_thomae_deriv_hyp(periods: &PeriodData, p: &HypPartition, tol: Tolerances) -> VerificationReport {
    const ID: &str = "thomae_deriv_hyp";
    let run = || -> Result<VerificationReport> {
        require_hyperelliptic(periods)?;
        if p.m != 1 {
            return Err(Error::InvalidPartition(format!("{p} has m = {}, expected 1", p.m)));
        }
        let g = periods.genus();
        let lambdas = periods.curve.lambdas();
        let (ch, snap) = char_from_partition_hyp(p, periods)?;
        let grad = theta_grad(&ch, &zero(g), &periods.tau, tol.theta_tol)?;
        let pre = det_prefactor(periods, 2) * quarter_deltas(p, lambdas);
        let rhs = sigma_contraction(&p.i, lambdas, &periods.a_raw, 0, pre);
        let mut r = ratio_report(ID, p.to_string(), grad.gradient.clone(), rhs, 8, tol);
        r.characteristic = Some(ch.to_string());
        r.experimental = p.i.has_infinity();
        r.extra.insert("snap_residual".into(), snap);
        r.extra.insert("theta_value_rel".into(), grad.value.value.norm() / grad.value.scale);
        Ok(r)
    };
    run().unwrap_or_else(|e| VerificationReport::failed(ID, p.to_string(), tol, e.to_string()))
}

fn branch_char(periods: &PeriodData, k: usize) -> Result<Characteristic> {
    let (eps, delta) = periods.tau.real_coordinates(periods.branch_image(k));
    Ok(Characteristic::snap(&eps, &delta, 1, 1e-7)?.0)
}

/// Random sets of g regular points, seeded per branch index.
pub(crate) fn random_divisors(periods: &PeriodData, seed: u64, k: usize) -> impl Iterator<Item = Vec<SurfacePoint>> + '_ {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(k as u64));
    let g = periods.genus();
    std::iter::repeat_with(move || (0..g).map(|_| random_point(&periods.curve, &mut rng)).collect())
}

/// θ²[u(P_k)](ζ)/θ²(ζ) at ζ = Σu(Q_r) + K against Π(λ_k − z(Q_r))/√f'(λ_k):
/// one 4th root of unity across `samples` random divisors.
pub fn verify_quotient_hyp(periods: &PeriodData, k: usize, samples: usize, seed: u64, tol: Tolerances) -> VerificationReport {
    verify_quotient_hyp_with(periods, k, random_divisors(periods, seed, k), samples, tol)
}

/// As [`verify_quotient_hyp`], drawing divisors from `candidates`.
pub fn verify_quotient_hyp_with(
    periods: &PeriodData,
    k: usize,
    candidates: impl Iterator<Item = Vec<SurfacePoint>>,
    samples: usize,
    tol: Tolerances,
) -> VerificationReport {
    const ID: &str = "quotient_hyp";
    let label = format!("k={k}");
    let run = || -> Result<VerificationReport> {
        require_hyperelliptic(periods)?;
        let ch = branch_char(periods, k)?;
        let lk = periods.curve.lambdas()[k - 1];
        let root = principal_root(periods.curve.f_prime(k - 1), 2);
        let sample = |zeta: &DVector<Complex64>| -> Result<Option<Complex64>> {
            let den = theta_plain(zeta, &periods.tau, tol.theta_tol)?;
            if den.value.norm() < ZERO_TOL * den.scale {
                return Ok(None);
            }
            let num = theta_eval(&ch, zeta, &periods.tau, tol.theta_tol)?;
            Ok(Some((num.value / den.value).powi(2)))
        };
        let shift = |d: DVector<Complex64>| d + &periods.k_vector;
        let (lhs, rhs, resamples) = collect_samples(periods, candidates, samples, lk, root, shift, sample)?;
        let mut r = ratio_report(ID, label.clone(), lhs, rhs, 4, tol);
        r.characteristic = Some(ch.to_string());
        r.extra.insert("resamples".into(), resamples as f64);
        Ok(r)
    };
    run().unwrap_or_else(|e| VerificationReport::failed(ID, label.clone(), tol, e.to_string()))
}

/// Evaluate quotient samples, skipping special divisors (at most
/// [`MAX_RESAMPLES`] times).
pub(crate) fn collect_samples(
    periods: &PeriodData,
    candidates: impl Iterator<Item = Vec<SurfacePoint>>,
    samples: usize,
    lk: Complex64,
    norm: Complex64,
    argument: impl Fn(DVector<Complex64>) -> DVector<Complex64>,
    quotient: impl Fn(&DVector<Complex64>) -> Result<Option<Complex64>>,
) -> Result<(Vec<Complex64>, Vec<Complex64>, usize)> {
    let mut lhs = Vec::with_capacity(samples);
    let mut rhs = Vec::with_capacity(samples);
    let mut resamples = 0;
    for points in candidates {
        if lhs.len() == samples {
            break;
        }
        let zeta = argument(abel_jacobi_sum(periods, &points)?);
        match quotient(&zeta)? {
            Some(v) => {
                let prod: Complex64 = points.iter().map(|p| lk - p.z(&periods.curve).unwrap()).product();
                lhs.push(v);
                rhs.push(prod / norm);
            }
            None => {
                resamples += 1;
                if resamples > MAX_RESAMPLES {
                    return Err(Error::Point("too many special divisors in a row".into()));
                }
            }
        }
    }
    if lhs.len() < samples {
        return Err(Error::Point("ran out of sample divisors".into()));
    }
    Ok((lhs, rhs, resamples))
}

/// The g×g matrix of ∂_s θ[e(I₁^{(k)})](0) over the g subsets I₁^{(k)} of
/// I₀∖{∞} of size g−1, against (det C/2^{g+2}π^g)^{1/2}·DΣC with the per-row
/// roots of unity in D; also checks det Σ = Δ(I₀).
pub fn verify_matrix_form_hyp(periods: &PeriodData, i0: &HypPartition, tol: Tolerances) -> VerificationReport {
    const ID: &str = "matrix_form_hyp";
    let label = i0.to_string();
    let run = || -> Result<VerificationReport> {
        require_hyperelliptic(periods)?;
        if i0.m != 0 {
            return Err(Error::InvalidPartition(format!("{i0} has m = {}, expected 0", i0.m)));
        }
        let g = periods.genus();
        let lambdas = periods.curve.lambdas();
        let finite = i0.i.finite();
        let mut lhs = DMatrix::zeros(g, g);
        let mut sigma = DMatrix::zeros(g, g);
        let mut d = DMatrix::zeros(g, g);
        let mut row_failures = 0usize;
        for (k, &drop) in finite.iter().enumerate() {
            let sub = IndexSet::new(finite.iter().filter(|&&i| i != drop).map(|&i| Symbol::Finite(i)))?;
            let pk = HypPartition::new(g, sub)?;
            let row = verify_thomae_deriv_hyp(periods, &pk, tol);
            if !row.pass {
                row_failures += 1;
            }
            let phase = row.tag.map(|t| t.value()).ok_or_else(|| Error::InvalidPartition(format!("row {pk} unclassified")))?;
            for s in 0..g {
                lhs[(k, s)] = row.lhs[s];
            }
            let coeffs = poly_from_roots(&pk.i.values(lambdas));
            for l in 0..g {
                sigma[(k, l)] = coeffs[l];
            }
            d[(k, k)] = phase * quarter_deltas(&pk, lambdas);
        }
        let rhs = &d * &sigma * &periods.a_raw * det_prefactor(periods, 2);
        let scale = lhs.iter().map(|z: &Complex64| z.norm()).fold(0.0, f64::max);
        let residual = (&lhs - &rhs).iter().map(|z| z.norm()).fold(0.0, f64::max) / scale;
        let delta = vandermonde_delta(&i0.i, lambdas);
        let det_residual = (sigma.determinant() - delta).norm() / delta.norm();
        let mut r = VerificationReport::failed(ID, label.clone(), tol, String::new());
        r.note = None;
        r.s_range = (1..=g).collect();
        r.lhs = lhs.transpose().iter().copied().collect();
        r.rhs = rhs.transpose().iter().copied().collect();
        r.rhs_modulus = r.rhs.iter().map(|z| z.norm()).collect();
        r.spread = residual;
        r.modulus_residual = residual;
        r.ratio = Complex64::new(1.0, 0.0);
        r.extra.insert("det_sigma_residual".into(), det_residual);
        r.extra.insert("row_failures".into(), row_failures as f64);
        r.pass = row_failures == 0 && residual < tol.tol && det_residual < 1e-9;
        Ok(r)
    };
    run().unwrap_or_else(|e| VerificationReport::failed(ID, label.clone(), tol, e.to_string()))
}
