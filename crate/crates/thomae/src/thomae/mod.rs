//! Thomae constant and derivative identities, checked numerically.
//!
//! Fractional powers of Δ-products and of det C use principal branches
//! throughout. The branch ambiguity of each factor is a root of unity whose
//! order divides the order a ratio is classified against, so the
//! classification does not depend on the convention.

pub mod hyper;
pub mod partition;
pub mod trigonal;

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{classify_root_of_unity, poly_from_roots, IndexSet, RootOfUnityTag};

pub use hyper::{
    verify_matrix_form_hyp, verify_quotient_hyp, verify_quotient_hyp_with, verify_thomae_const_hyp,
    verify_thomae_const_hyp_with, verify_thomae_deriv_hyp,
};
pub use partition::{
    branch_divisors, char_from_partition_hyp, char_from_partition_trig, enumerate_partitions_hyp,
    enumerate_partitions_trig, HypPartition, TrigKind, TrigPartition,
};
pub use trigonal::{
    char_phase, derived_partitions, estimate_alpha, nonvanishing_check, simple_zero_check, simple_zero_divisor, verify_matrix_form_trig, verify_quotient_trig, verify_quotient_trig_with,
    verify_thomae_deriv_trig, verify_thomae_deriv_trig_scaled, AlphaEstimate, SimpleZero, TYPE2_FACTOR,
    TYPE2_FACTOR_QUADRATIC,
};

/// |θ| below this fraction of the term scale counts as a zero.
pub const ZERO_TOL: f64 = 1e-7;
/// ‖∇θ‖ above this fraction of the term scale counts as non-vanishing.
pub const GRADIENT_TOL: f64 = 1e-4;
/// RHS components below this fraction of the largest are treated as zero.
pub const RHS_ZERO_REL: f64 = 1e-9;
/// Number of resamples allowed when a random divisor is special.
pub const MAX_RESAMPLES: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    pub tol: f64,
    pub theta_tol: f64,
}

/// One checked identity.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub identity: String,
    pub partition: String,
    pub characteristic: Option<String>,
    /// 1-based component indices (s for derivatives, k for quotient samples).
    pub s_range: Vec<usize>,
    pub lhs: Vec<Complex64>,
    /// Right-hand side without the root of unity.
    pub rhs: Vec<Complex64>,
    pub rhs_modulus: Vec<f64>,
    /// lhs/rhs per component; null where the RHS vanishes.
    pub ratios: Vec<Option<Complex64>>,
    pub ratio: Complex64,
    pub modulus_residual: f64,
    /// Nearest root of unity of the asserted order.
    pub tag: Option<RootOfUnityTag>,
    /// Largest deviation of a component ratio from their mean.
    pub spread: f64,
    pub pass: bool,
    pub experimental: bool,
    pub tolerances: Tolerances,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl VerificationReport {
    pub(crate) fn failed(identity: &str, partition: String, tolerances: Tolerances, note: String) -> Self {
        VerificationReport {
            identity: identity.into(),
            partition,
            characteristic: None,
            s_range: Vec::new(),
            lhs: Vec::new(),
            rhs: Vec::new(),
            rhs_modulus: Vec::new(),
            ratios: Vec::new(),
            ratio: Complex64::new(f64::NAN, f64::NAN),
            modulus_residual: f64::INFINITY,
            tag: None,
            spread: f64::INFINITY,
            pass: false,
            experimental: false,
            tolerances,
            extra: BTreeMap::new(),
            note: Some(note),
        }
    }
}

/// Compare lhs with rhs componentwise, requiring a common ratio that is an
/// `order`-th root of unity.
pub(crate) fn ratio_report(
    identity: &str,
    partition: String,
    lhs: Vec<Complex64>,
    rhs: Vec<Complex64>,
    order: u32,
    tolerances: Tolerances,
) -> VerificationReport {
    let tol = tolerances.tol;
    let rhs_max = rhs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let lhs_max = lhs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut zero_ok = true;
    let ratios: Vec<Option<Complex64>> = lhs
        .iter()
        .zip(&rhs)
        .map(|(l, r)| {
            if r.norm() > RHS_ZERO_REL * rhs_max {
                Some(l / r)
            } else {
                zero_ok &= l.norm() <= tol * lhs_max.max(f64::MIN_POSITIVE);
                None
            }
        })
        .collect();
    let defined: Vec<Complex64> = ratios.iter().flatten().copied().collect();
    let mut report = VerificationReport {
        identity: identity.into(),
        partition,
        characteristic: None,
        s_range: (1..=lhs.len()).collect(),
        rhs_modulus: rhs.iter().map(|z| z.norm()).collect(),
        lhs,
        rhs,
        ratios,
        ratio: Complex64::new(f64::NAN, f64::NAN),
        modulus_residual: f64::INFINITY,
        tag: None,
        spread: f64::INFINITY,
        pass: false,
        experimental: false,
        tolerances,
        extra: BTreeMap::new(),
        note: None,
    };
    if defined.is_empty() {
        report.note = Some("every right-hand-side component vanishes".into());
        return report;
    }
    let mean = defined.iter().sum::<Complex64>() / defined.len() as f64;
    report.ratio = mean;
    report.spread = defined.iter().map(|r| (r - mean).norm()).fold(0.0, f64::max);
    report.modulus_residual = (mean.norm() - 1.0).abs();
    let classified = classify_root_of_unity(mean, order, tol);
    report.tag = Some(match classified {
        Ok(t) => t,
        Err(m) => m.nearest,
    });
    report.pass = classified.is_ok() && report.spread < tol && zero_ok;
    if !zero_ok {
        report.note = Some("a component with vanishing right-hand side has non-zero left-hand side".into());
    }
    report
}

/// Σ_l c_{l−1} C_{l,s} over the monic polynomial Π_{i∈set}(z − λ_i), using
/// rows `first..first+deg+1` of C.
pub(crate) fn sigma_contraction(
    set: &IndexSet,
    lambdas: &[Complex64],
    c: &nalgebra::DMatrix<Complex64>,
    first: usize,
    scale: Complex64,
) -> Vec<Complex64> {
    let coeffs = poly_from_roots(&set.values(lambdas));
    (0..c.ncols())
        .map(|s| coeffs.iter().enumerate().map(|(l, a)| a * c[(first + l, s)]).sum::<Complex64>() * scale)
        .collect()
}
