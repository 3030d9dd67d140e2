use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::curve::{CurveSpec, Differential, DifferentialBasis};
use super::homology::{build_homology, Homology};
use super::riemann::{lattice_distance, riemann_constants};
use super::segment::Segment;
use crate::algebra::{principal_root, root_of_unity};
use crate::quadrature::{integrate_piecewise, Weighted};
use crate::theta::{Characteristic, RiemannMatrix};
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct BuildConfig {
    /// Starting number of Gauss nodes per piece.
    pub quad_order: usize,
    pub max_quad_order: usize,
    /// Relative change allowed when the node count doubles.
    pub drift_tol: f64,
    pub theta_tol: f64,
    /// Seed for the random divisors of the Riemann-constant search.
    pub seed: u64,
    pub k_samples: usize,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig { quad_order: 64, max_quad_order: 1024, drift_tol: 1e-9, theta_tol: 1e-12, seed: 1, k_samples: 20 }
    }
}

/// Analytic data of a curve: periods, Riemann matrix, branch-point images
/// and the vector of Riemann constants (base point P∞).
#[derive(Clone, Debug)]
pub struct PeriodData {
    pub curve: CurveSpec,
    pub basis: DifferentialBasis,
    pub homology: Homology,
    /// a-periods of the raw basis, rows indexed by differential (the matrix C).
    pub a_raw: DMatrix<Complex64>,
    pub b_raw: DMatrix<Complex64>,
    pub c_inv: DMatrix<Complex64>,
    /// C⁻¹·B before symmetrization.
    pub tau_raw: DMatrix<Complex64>,
    pub tau: RiemannMatrix,
    /// Raw-basis integrals from P∞ to each finite branch point.
    pub branch_raw: Vec<DVector<Complex64>>,
    /// Normalized Abel–Jacobi images u(P_i), 0-based.
    pub aj_branch: Vec<DVector<Complex64>>,
    pub k_vector: DVector<Complex64>,
    pub k_char: Characteristic,
    pub quad_order: usize,
    pub quad_drift: f64,
    pub config: BuildConfig,
}

#[derive(Clone, Debug, Serialize)]
pub struct Invariants {
    pub symmetry: f64,
    pub min_im_eigenvalue: f64,
    pub quad_drift: f64,
    pub abel_residual: f64,
    pub two_k_residual: f64,
    pub normalization_residual: f64,
}

impl Invariants {
    pub fn holds(&self) -> bool {
        self.symmetry < 1e-8
            && self.min_im_eigenvalue > 0.0
            && self.quad_drift < 1e-9
            && self.abel_residual < 1e-8
            && self.two_k_residual < 1e-8
            && self.normalization_residual < 1e-8
    }
}

fn edge_integrals(segments: &[Segment], basis: &[Differential], order: usize) -> Vec<Vec<Complex64>> {
    segments.par_iter().map(|s| s.integrate_all(basis, order)).collect()
}

/// Raw periods of an integer combination of elementary cycles.
fn cycle_periods(n: u32, basis: &[Differential], edges: &[Vec<Complex64>], combo: &[i64]) -> Vec<Complex64> {
    let per = n as usize - 1;
    basis
        .iter()
        .enumerate()
        .map(|(l, d)| {
            let k = d.w_power as i64;
            combo
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(idx, &c)| {
                    let (t, j) = (idx / per, (idx % per) as i64);
                    let factor = root_of_unity(-j * k, n) - root_of_unity(-(j + 1) * k, n);
                    factor * edges[t][l] * c as f64
                })
                .sum()
        })
        .collect()
}

fn period_matrices(
    curve: &CurveSpec,
    basis: &[Differential],
    homology: &Homology,
    edges: &[Vec<Complex64>],
) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
    let g = basis.len();
    let mut a = DMatrix::zeros(g, g);
    let mut b = DMatrix::zeros(g, g);
    for j in 0..g {
        let pa = cycle_periods(curve.n(), basis, edges, &homology.a_cycles[j]);
        let pb = cycle_periods(curve.n(), basis, edges, &homology.b_cycles[j]);
        for l in 0..g {
            a[(l, j)] = pa[l];
            b[(l, j)] = pb[l];
        }
    }
    (a, b)
}

fn relative_drift(old: &DMatrix<Complex64>, new: &DMatrix<Complex64>) -> f64 {
    let scale = new.iter().map(|z| z.norm()).fold(0.0, f64::max);
    old.iter()
        .zip(new.iter())
        .map(|(a, b)| (a - b).norm() / b.norm().max(1e-6 * scale).max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}

/// Integrals along P_k0 → P∞ for k0 the branch point of largest real part:
/// a horizontal segment to λ_k0 + R, then the local parameter at infinity.
fn infinity_leg(curve: &CurveSpec, basis: &[Differential], chain: &[usize], order: usize) -> Result<Vec<Complex64>> {
    let n = curve.n();
    let nf = n as f64;
    let big_n = curve.degree() as f64;
    let k0 = *chain.last().unwrap();
    let l0 = curve.lambdas()[k0];
    let reach = curve.lambdas().iter().map(|l| (l - l0).norm()).fold(0.0, f64::max);
    let r = 4.0 * reach + 1.0;
    let z1 = l0 + r;
    let seg = Segment::new(curve, l0, z1, Some(k0), None)?;
    let cs: Vec<Complex64> = curve.lambdas().iter().map(|l| (l0 - l) / r).collect();
    // on the tail z = λ_k0 + R v^{−n}, w = R^{N/n} v^{−N} Π (1 + c_i v^n)^{1/n}
    let w_tail_1 = cs.iter().fold(Complex64::new(r.powf(big_n / nf), 0.0), |acc, &c| acc * principal_root(1.0 + c, n));
    let w_seg_1 = seg.w(1.0);
    let m = (0..n as i64)
        .min_by(|&a, &b| {
            let da = (root_of_unity(a, n) * w_seg_1 - w_tail_1).norm();
            let db = (root_of_unity(b, n) * w_seg_1 - w_tail_1).norm();
            da.partial_cmp(&db).unwrap()
        })
        .unwrap();
    let mismatch = (root_of_unity(m, n) * w_seg_1 - w_tail_1).norm() / w_tail_1.norm();
    if mismatch > 1e-8 {
        return Err(Error::Path(format!("sheet matching at infinity failed ({mismatch:e})")));
    }
    let mut singular = Vec::new();
    for &c in &cs {
        if c.norm() > 0.0 {
            let base = principal_root(-1.0 / c, n);
            for j in 0..n as i64 {
                let v = base * root_of_unity(j, n);
                singular.push(2.0 * v - 1.0);
            }
        }
    }
    let shift = l0 / r;
    let mut out = Vec::with_capacity(basis.len());
    for d in basis {
        let k = d.w_power as i32;
        let e = k as f64 * big_n - nf * d.power as f64 - nf - 1.0;
        if e < 0.0 {
            return Err(Error::InvalidCurve("differential not holomorphic at infinity".into()));
        }
        let e = e as i32;
        let coef = nf * r.powf(d.power as f64 + 1.0 - k as f64 * big_n / nf);
        let f = |x: f64| {
            let v = (x + 1.0) / 2.0;
            let vn = v.powi(n as i32);
            let prod = cs.iter().fold(Complex64::new(1.0, 0.0), |acc, &c| acc * principal_root(1.0 + c * vn, n));
            (1.0 + shift * vn).powi(d.power) * prod.powi(-k) * v.powi(e) * coef * 0.5
        };
        let tail = integrate_piecewise(&Weighted { f, left: 0.0, right: 0.0, singular: &singular }, order);
        let segment = root_of_unity(-m * k as i64, n) * seg.integrate(d, order);
        out.push(segment + tail);
    }
    Ok(out)
}

/// Raw integrals P∞ → P_i for all finite branch points.
fn branch_images(
    curve: &CurveSpec,
    basis: &[Differential],
    chain: &[usize],
    edges: &[Vec<Complex64>],
    order: usize,
) -> Result<Vec<DVector<Complex64>>> {
    let g = basis.len();
    let leg = infinity_leg(curve, basis, chain, order)?;
    let mut out = vec![DVector::zeros(g); curve.degree()];
    let mut acc = DVector::from_iterator(g, leg.iter().map(|z| -z));
    let last = chain.len() - 1;
    out[chain[last]] = acc.clone();
    for p in (0..last).rev() {
        for l in 0..g {
            acc[l] -= edges[p][l];
        }
        out[chain[p]] = acc.clone();
    }
    Ok(out)
}

pub fn build_periods(curve: &CurveSpec, config: &BuildConfig) -> Result<PeriodData> {
    let basis = curve.basis();
    let g = basis.len();
    let (homology, segments) = build_homology(curve)?;
    let mut order = config.quad_order;
    let mut edges = edge_integrals(&segments, &basis.0, order);
    let (mut a, mut b) = period_matrices(curve, &basis.0, &homology, &edges);
    let drift = loop {
        let next = (order * 2).min(config.max_quad_order.max(order));
        let edges2 = edge_integrals(&segments, &basis.0, next);
        let (a2, b2) = period_matrices(curve, &basis.0, &homology, &edges2);
        let drift = relative_drift(&a, &a2).max(relative_drift(&b, &b2));
        edges = edges2;
        a = a2;
        b = b2;
        order = next;
        if drift < config.drift_tol {
            break drift;
        }
        if next >= config.max_quad_order {
            return Err(Error::Quadrature { drift, order });
        }
    };
    let c_inv = a.clone().try_inverse().ok_or_else(|| Error::Singular("a-period matrix".into()))?;
    let tau_raw = &c_inv * &b;
    let tau = RiemannMatrix::new(tau_raw.clone()).map_err(|e| match e {
        Error::NotPositiveDefinite => Error::Homology("imaginary part of τ not positive definite".into()),
        other => other,
    })?;
    let branch_raw = branch_images(curve, &basis.0, &homology.chain, &edges, order)?;
    let aj_branch = branch_raw.iter().map(|v| &c_inv * v).collect();
    let mut data = PeriodData {
        curve: curve.clone(),
        basis,
        homology,
        a_raw: a,
        b_raw: b,
        c_inv,
        tau_raw,
        tau,
        branch_raw,
        aj_branch,
        k_vector: DVector::zeros(g),
        k_char: Characteristic::zero(g),
        quad_order: order,
        quad_drift: drift,
        config: config.clone(),
    };
    let (k_vector, k_char) = riemann_constants(&data)?;
    data.k_vector = k_vector;
    data.k_char = k_char;
    Ok(data)
}

impl PeriodData {
    pub fn genus(&self) -> usize {
        self.basis.len()
    }

    /// C⁻¹ applied to a raw-basis vector.
    pub fn normalize(&self, raw: &DVector<Complex64>) -> DVector<Complex64> {
        &self.c_inv * raw
    }

    /// u(P_i) for a 1-based branch index; u(P∞) = 0.
    pub fn branch_image(&self, index: usize) -> &DVector<Complex64> {
        &self.aj_branch[index - 1]
    }

    pub fn lattice_distance(&self, v: &DVector<Complex64>) -> f64 {
        lattice_distance(&self.tau, v)
    }

    pub fn invariants(&self) -> Invariants {
        let g = self.genus();
        let symmetry = (&self.tau_raw - self.tau_raw.transpose()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let im = self.tau.tau().map(|z| z.im);
        let min_im_eigenvalue = im.symmetric_eigen().eigenvalues.min();
        let n = self.curve.n() as f64;
        let abel_residual =
            self.aj_branch.iter().map(|u| self.lattice_distance(&(u * Complex64::new(n, 0.0)))).fold(0.0, f64::max);
        let two_k_residual = self.lattice_distance(&(&self.k_vector * Complex64::new(2.0, 0.0)));
        let normalization_residual = self.normalization_check().unwrap_or(f64::INFINITY);
        let _ = g;
        Invariants {
            symmetry,
            min_im_eigenvalue,
            quad_drift: self.quad_drift,
            abel_residual,
            two_k_residual,
            normalization_residual,
        }
    }

    /// Re-integrate the a-cycles at a different order and check ∮_{a_j} v_s = δ_js.
    pub fn normalization_check(&self) -> Result<f64> {
        let g = self.genus();
        let segments = super::homology::chain_segments(&self.curve, &self.homology.chain)?;
        let order = (self.quad_order * 3 / 4).max(16);
        let edges = edge_integrals(&segments, &self.basis.0, order);
        let mut worst: f64 = 0.0;
        for j in 0..g {
            let raw = cycle_periods(self.curve.n(), &self.basis.0, &edges, &self.homology.a_cycles[j]);
            let v = &self.c_inv * DVector::from_vec(raw);
            for s in 0..g {
                let target = if s == j { 1.0 } else { 0.0 };
                worst = worst.max((v[s] - target).norm());
            }
        }
        Ok(worst)
    }
}
