//! Gauss–Jacobi rules and a piecewise integrator for integrands with
//! algebraic endpoint singularities.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

/// Nodes and weights for ∫_{−1}^{1} (1−x)^α (1+x)^β f(x) dx.
#[derive(Clone, Debug)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

type RuleKey = (usize, u64, u64);

fn cache() -> &'static Mutex<HashMap<RuleKey, Arc<GaussRule>>> {
    static CACHE: OnceLock<Mutex<HashMap<RuleKey, Arc<GaussRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Gauss–Jacobi rule with `n` nodes for weight (1−x)^α (1+x)^β, α, β > −1.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Arc<GaussRule> {
    assert!(n >= 1 && alpha > -1.0 && beta > -1.0);
    let key = (n, alpha.to_bits(), beta.to_bits());
    if let Some(rule) = cache().lock().unwrap().get(&key) {
        return rule.clone();
    }
    let rule = Arc::new(compute_rule(n, alpha, beta));
    cache().lock().unwrap().insert(key, rule.clone());
    rule
}

pub fn gauss_legendre(n: usize) -> Arc<GaussRule> {
    gauss_jacobi(n, 0.0, 0.0)
}

/// Diagonal and off-diagonal of the Jacobi matrix of the orthonormal family.
fn jacobi_matrix(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let ab = a + b;
    let diag = (0..n)
        .map(|k| {
            if k == 0 {
                (b - a) / (ab + 2.0)
            } else {
                let s = 2.0 * k as f64 + ab;
                (b * b - a * a) / (s * (s + 2.0))
            }
        })
        .collect();
    let off = (0..n.saturating_sub(1))
        .map(|k| {
            let k1 = k as f64 + 1.0;
            let s = 2.0 * k as f64 + ab + 2.0;
            if k == 0 {
                // the (k+1+α+β)/(2k+α+β+1) factor is 1 here
                2.0 / s * ((1.0 + a) * (1.0 + b) / (ab + 3.0)).sqrt()
            } else {
                2.0 / s * (k1 * (k1 + a) * (k1 + b) * (k1 + ab) / ((s + 1.0) * (s - 1.0))).sqrt()
            }
        })
        .collect();
    (diag, off)
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit QL.
fn tridiagonal_eigenvalues(mut d: Vec<f64>, off: &[f64]) -> Vec<f64> {
    let n = d.len();
    let mut e = off.to_vec();
    e.push(0.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter < 100, "QL iteration did not converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    d
}

fn compute_rule(n: usize, alpha: f64, beta: f64) -> GaussRule {
    let (diag, off) = jacobi_matrix(n, alpha, beta);
    let nodes = tridiagonal_eigenvalues(diag.clone(), &off);
    let ln_mu0 = (alpha + beta + 1.0) * std::f64::consts::LN_2 + ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0)
        - ln_gamma(alpha + beta + 2.0);
    let p0 = (-0.5 * ln_mu0).exp();
    // Christoffel numbers from the orthonormal recurrence
    let weights = nodes
        .iter()
        .map(|&x| {
            let (mut prev, mut cur) = (0.0, p0);
            let mut sum = cur * cur;
            for k in 0..n - 1 {
                let b_prev = if k == 0 { 0.0 } else { off[k - 1] };
                let next = ((x - diag[k]) * cur - b_prev * prev) / off[k];
                prev = cur;
                cur = next;
                sum += cur * cur;
            }
            1.0 / sum
        })
        .collect();
    GaussRule { nodes, weights, alpha, beta }
}

/// Integrand description for [`integrate_piecewise`] on the interval [−1, 1]:
/// ∫ (1+x)^left (1−x)^right f(x) dx, with f analytic away from `singular`.
pub struct Weighted<'a, F: Fn(f64) -> Complex64> {
    pub f: F,
    pub left: f64,
    pub right: f64,
    pub singular: &'a [Complex64],
}

fn distance_to_interval(p: Complex64, s: f64, t: f64) -> f64 {
    let x = p.re.clamp(s, t);
    ((p.re - x).powi(2) + p.im.powi(2)).sqrt()
}

/// Split [−1,1] until every singular point, and every endpoint singularity not
/// handled by a piece's weight, sits at least a half-length away from the piece.
pub fn pieces(left: f64, right: f64, singular: &[Complex64]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut stack = vec![(-1.0, 1.0, 0u32)];
    while let Some((s, t, depth)) = stack.pop() {
        let half = (t - s) / 2.0;
        let mut ok = singular.iter().all(|&p| distance_to_interval(p, s, t) >= half);
        if left != 0.0 && s > -1.0 && s + 1.0 < half {
            ok = false;
        }
        if right != 0.0 && t < 1.0 && 1.0 - t < half {
            ok = false;
        }
        if ok || depth >= 48 {
            out.push((s, t));
        } else {
            let mid = (s + t) / 2.0;
            stack.push((mid, t, depth + 1));
            stack.push((s, mid, depth + 1));
        }
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

/// Piecewise Gauss–Jacobi/Legendre integration with `order` nodes per piece.
pub fn integrate_piecewise<F: Fn(f64) -> Complex64>(w: &Weighted<'_, F>, order: usize) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    for (s, t) in pieces(w.left, w.right, w.singular) {
        let half = (t - s) / 2.0;
        let mid = (s + t) / 2.0;
        let at_left = s == -1.0 && w.left != 0.0;
        let at_right = t == 1.0 && w.right != 0.0;
        let rule = gauss_jacobi(order, if at_right { w.right } else { 0.0 }, if at_left { w.left } else { 0.0 });
        let mut piece = Complex64::new(0.0, 0.0);
        for (&y, &wt) in rule.nodes.iter().zip(&rule.weights) {
            let x = mid + half * y;
            let mut v = (w.f)(x);
            if w.left != 0.0 {
                v *= if at_left { half.powf(w.left) } else { (1.0 + x).powf(w.left) };
            }
            if w.right != 0.0 {
                v *= if at_right { half.powf(w.right) } else { (1.0 - x).powf(w.right) };
            }
            piece += v * wt;
        }
        total += piece * half;
    }
    total
}
