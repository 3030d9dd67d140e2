//! Symmetric functions, Vandermonde products, polynomials from roots and
//! root-of-unity classification.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::Error;

/// A branch symbol: a finite branch index (1-based) or the point over infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Symbol {
    Finite(usize),
    Infinity,
}

impl Symbol {
    pub fn finite(self) -> Option<usize> {
        match self {
            Symbol::Finite(i) => Some(i),
            Symbol::Infinity => None,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Finite(i) => write!(f, "{i}"),
            Symbol::Infinity => write!(f, "inf"),
        }
    }
}

/// Ordered set of branch symbols, ascending with infinity last.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSet {
    members: Vec<Symbol>,
}

impl IndexSet {
    pub fn new<I: IntoIterator<Item = Symbol>>(items: I) -> Result<Self, Error> {
        let mut members: Vec<Symbol> = items.into_iter().collect();
        members.sort();
        for pair in members.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::InvalidPartition(format!("duplicate symbol {}", pair[0])));
            }
        }
        if members.contains(&Symbol::Finite(0)) {
            return Err(Error::InvalidPartition("branch indices are 1-based".into()));
        }
        Ok(IndexSet { members })
    }

    pub fn empty() -> Self {
        IndexSet::default()
    }

    /// Set of finite indices, optionally with infinity.
    pub fn from_finite(indices: &[usize], with_infinity: bool) -> Result<Self, Error> {
        let extra = with_infinity.then_some(Symbol::Infinity);
        IndexSet::new(indices.iter().map(|&i| Symbol::Finite(i)).chain(extra))
    }

    pub fn members(&self) -> &[Symbol] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, s: Symbol) -> bool {
        self.members.binary_search(&s).is_ok()
    }

    pub fn has_infinity(&self) -> bool {
        self.members.last() == Some(&Symbol::Infinity)
    }

    /// Finite members, ascending.
    pub fn finite(&self) -> Vec<usize> {
        self.members.iter().filter_map(|s| s.finite()).collect()
    }

    pub fn is_disjoint(&self, other: &IndexSet) -> bool {
        self.members.iter().all(|s| !other.contains(*s))
    }

    pub fn union(&self, other: &IndexSet) -> Result<IndexSet, Error> {
        IndexSet::new(self.members.iter().chain(other.members.iter()).copied())
    }

    pub fn with(&self, s: Symbol) -> Result<IndexSet, Error> {
        IndexSet::new(self.members.iter().copied().chain(std::iter::once(s)))
    }

    pub fn without(&self, s: Symbol) -> IndexSet {
        IndexSet { members: self.members.iter().copied().filter(|&m| m != s).collect() }
    }

    /// Branch values of the finite members.
    pub fn values(&self, lambdas: &[Complex64]) -> Vec<Complex64> {
        self.finite().iter().map(|&i| lambdas[i - 1]).collect()
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, s) in self.members.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "}}")
    }
}

/// All elementary symmetric functions σ_0..σ_n of the inputs.
pub fn elementary_symmetric_all(values: &[Complex64]) -> Vec<Complex64> {
    let mut sigma = vec![Complex64::new(0.0, 0.0); values.len() + 1];
    sigma[0] = Complex64::new(1.0, 0.0);
    for (k, &x) in values.iter().enumerate() {
        for j in (1..=k + 1).rev() {
            let prev = sigma[j - 1];
            sigma[j] += x * prev;
        }
    }
    sigma
}

pub fn elementary_symmetric(values: &[Complex64], p: usize) -> Complex64 {
    if p > values.len() {
        return Complex64::new(0.0, 0.0);
    }
    elementary_symmetric_all(values)[p]
}

/// Product of (λ_i − λ_j) over finite members i < j.
pub fn vandermonde_delta(set: &IndexSet, lambdas: &[Complex64]) -> Complex64 {
    let vals = set.values(lambdas);
    let mut prod = Complex64::new(1.0, 0.0);
    for i in 0..vals.len() {
        for j in i + 1..vals.len() {
            prod *= vals[i] - vals[j];
        }
    }
    prod
}

/// Product of (λ_i − λ_j) over finite i ∈ a, j ∈ b.
pub fn pair_delta(a: &IndexSet, b: &IndexSet, lambdas: &[Complex64]) -> Result<Complex64, Error> {
    if !a.is_disjoint(b) {
        return Err(Error::InvalidPartition(format!("{a} and {b} overlap")));
    }
    let mut prod = Complex64::new(1.0, 0.0);
    for x in a.values(lambdas) {
        for y in b.values(lambdas) {
            prod *= x - y;
        }
    }
    Ok(prod)
}

/// Monic polynomial with the given roots, coefficients in ascending degree.
pub fn poly_from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let sigma = elementary_symmetric_all(roots);
    let n = roots.len();
    (0..=n)
        .map(|d| {
            let p = n - d;
            if p % 2 == 0 {
                sigma[p]
            } else {
                -sigma[p]
            }
        })
        .collect()
}

/// The polynomial with root `skip` removed.
pub fn poly_from_roots_except(roots: &[Complex64], skip: usize) -> Vec<Complex64> {
    let rest: Vec<Complex64> =
        roots.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &r)| r).collect();
    poly_from_roots(&rest)
}

pub fn poly_eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Derivative of the monic polynomial with these roots at root `k`.
pub fn derivative_at_root(roots: &[Complex64], k: usize) -> Complex64 {
    roots
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != k)
        .fold(Complex64::new(1.0, 0.0), |acc, (_, &r)| acc * (roots[k] - r))
}

/// Principal n-th root, with negative zero imaginary parts treated as +0.
pub fn principal_root(z: Complex64, n: u32) -> Complex64 {
    let z = Complex64::new(z.re, z.im + 0.0);
    if z.norm() == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::from_polar(z.norm().powf(1.0 / n as f64), z.arg() / n as f64)
}

/// e^{2πi k/n}.
pub fn root_of_unity(k: i64, n: u32) -> Complex64 {
    let k = k.rem_euclid(n as i64);
    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootOfUnityTag {
    pub order: u32,
    pub index: u32,
    pub phase_residual: f64,
}

impl RootOfUnityTag {
    pub fn value(&self) -> Complex64 {
        root_of_unity(self.index as i64, self.order)
    }
}

/// Result of a failed classification; the nearest root is still reported.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Misclassified {
    pub nearest: RootOfUnityTag,
    pub modulus_residual: f64,
}

/// Nearest `order`-th root of unity to `z`, failing when |z| is off the unit
/// circle or the phase is off the root by more than `tol`.
pub fn classify_root_of_unity(
    z: Complex64,
    order: u32,
    tol: f64,
) -> Result<RootOfUnityTag, Misclassified> {
    assert!(order >= 1 && tol > 0.0);
    let step = 2.0 * PI / order as f64;
    let arg = z.arg();
    let k = (arg / step).round();
    let index = (k as i64).rem_euclid(order as i64) as u32;
    let phase_residual = (arg - k * step).abs().min(PI / order as f64);
    let tag = RootOfUnityTag { order, index, phase_residual };
    let modulus_residual = (z.norm() - 1.0).abs();
    if modulus_residual <= tol && phase_residual <= tol && z.norm().is_finite() {
        Ok(tag)
    } else {
        Err(Misclassified { nearest: tag, modulus_residual })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn sigma_examples() {
        let v = [c(1.0), c(2.0), c(3.0)];
        assert_eq!(elementary_symmetric(&v, 0), c(1.0));
        assert_eq!(elementary_symmetric(&v, 2), c(11.0));
        assert_eq!(elementary_symmetric(&v, 4), c(0.0));
        assert_eq!(elementary_symmetric(&[], 0), c(1.0));
    }

    #[test]
    fn delta_examples() {
        let lam = [c(0.0), c(1.0), c(2.0), c(0.0), c(9.0)];
        let one = IndexSet::from_finite(&[5], false).unwrap();
        assert_eq!(vandermonde_delta(&one, &lam), c(1.0));
        let three = IndexSet::from_finite(&[1, 2, 3], false).unwrap();
        assert_eq!(vandermonde_delta(&three, &lam), c(-2.0));
        let lam7 = [c(7.0)];
        let with_inf = IndexSet::from_finite(&[1], true).unwrap();
        assert_eq!(vandermonde_delta(&with_inf, &lam7), c(1.0));
    }

    #[test]
    fn pair_delta_examples() {
        let lam = [c(0.0), c(1.0)];
        let a = IndexSet::from_finite(&[1], false).unwrap();
        let b = IndexSet::from_finite(&[2], false).unwrap();
        assert_eq!(pair_delta(&a, &b, &lam).unwrap(), c(-1.0));
        assert_eq!(pair_delta(&IndexSet::empty(), &b, &lam).unwrap(), c(1.0));
        assert!(pair_delta(&a, &a, &lam).is_err());
    }

    #[test]
    fn index_set_rules() {
        assert!(IndexSet::new([Symbol::Infinity, Symbol::Infinity]).is_err());
        assert!(IndexSet::new([Symbol::Finite(2), Symbol::Finite(2)]).is_err());
        let s = IndexSet::new([Symbol::Infinity, Symbol::Finite(3), Symbol::Finite(1)]).unwrap();
        assert_eq!(s.members(), &[Symbol::Finite(1), Symbol::Finite(3), Symbol::Infinity]);
        assert_eq!(s.to_string(), "{1,3,inf}");
    }

    #[test]
    fn poly_examples() {
        let roots = [c(1.0), c(2.0)];
        assert_eq!(poly_from_roots(&roots), vec![c(2.0), c(-3.0), c(1.0)]);
        assert_eq!(poly_from_roots_except(&roots, 0), vec![c(-2.0), c(1.0)]);
        assert_eq!(derivative_at_root(&roots, 0), c(-1.0));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_root_of_unity(c(1.0), 8, 1e-9).unwrap().index, 0);
        let z = Complex64::from_polar(1.0, 2.0 * PI * 3.0 / 8.0);
        assert_eq!(classify_root_of_unity(z, 8, 1e-9).unwrap().index, 3);
        let err = classify_root_of_unity(c(0.9), 8, 1e-6).unwrap_err();
        assert_eq!(err.nearest.index, 0);
        assert!((err.modulus_residual - 0.1).abs() < 1e-12);
        let minus = classify_root_of_unity(c(-1.0), 8, 1e-9).unwrap();
        assert_eq!(minus.index, 4);
    }

    #[test]
    fn principal_root_ignores_negative_zero() {
        let a = principal_root(Complex64::new(-4.0, -0.0), 2);
        assert!((a - Complex64::new(0.0, 2.0)).norm() < 1e-15);
    }

    fn cplx() -> impl Strategy<Value = Complex64> {
        (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| Complex64::new(a, b))
    }

    proptest! {
        #[test]
        fn sigma_recursion(vals in prop::collection::vec(cplx(), 0..10), x in cplx(), p in 1usize..12) {
            let mut ext = vals.clone();
            ext.push(x);
            let lhs = elementary_symmetric(&ext, p);
            let rhs = elementary_symmetric(&vals, p) + x * elementary_symmetric(&vals, p - 1);
            prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + lhs.norm()));
        }

        #[test]
        fn delta_square_is_symmetric(vals in prop::collection::vec(cplx(), 2..7), seed in 0usize..100) {
            let n = vals.len();
            let all: Vec<usize> = (1..=n).collect();
            let set = IndexSet::from_finite(&all, false).unwrap();
            let mut perm = vals.clone();
            perm.rotate_left(seed % n);
            perm.swap(0, n - 1);
            let a = vandermonde_delta(&set, &vals).powi(2);
            let b = vandermonde_delta(&set, &perm).powi(2);
            prop_assert!((a - b).norm() <= 1e-9 * (1.0 + a.norm()));
        }

        #[test]
        fn poly_vanishes_at_roots(roots in prop::collection::vec(cplx(), 1..13)) {
            let coeffs = poly_from_roots(&roots);
            let scale: f64 = coeffs.iter().map(|c| c.norm()).sum();
            for &r in &roots {
                let v = poly_eval(&coeffs, r);
                prop_assert!(v.norm() <= 1e-12 * scale * (1.0 + r.norm()).powi(roots.len() as i32));
            }
        }

        #[test]
        fn delta_of_union(vals in prop::collection::vec(cplx(), 2..9), mask in 0u32..512) {
            let n = vals.len();
            let (mut a, mut b) = (vec![], vec![]);
            for i in 1..=n {
                if mask >> (i - 1) & 1 == 1 { a.push(i) } else { b.push(i) }
            }
            let sa = IndexSet::from_finite(&a, false).unwrap();
            let sb = IndexSet::from_finite(&b, false).unwrap();
            let inversions = a.iter().map(|&x| b.iter().filter(|&&y| x > y).count()).sum::<usize>();
            let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
            let all = sa.union(&sb).unwrap();
            let lhs = vandermonde_delta(&all, &vals);
            let rhs = vandermonde_delta(&sa, &vals) * vandermonde_delta(&sb, &vals)
                * pair_delta(&sa, &sb, &vals).unwrap() * sign;
            prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + lhs.norm()));
        }

        #[test]
        fn pair_delta_antisymmetry(vals in prop::collection::vec(cplx(), 2..8), mask in 0u32..256) {
            let n = vals.len();
            let (mut a, mut b) = (vec![], vec![]);
            for i in 1..=n {
                if mask >> (i - 1) & 1 == 1 { a.push(i) } else { b.push(i) }
            }
            let sa = IndexSet::from_finite(&a, false).unwrap();
            let sb = IndexSet::from_finite(&b, true).unwrap();
            let sign = if (a.len() * b.len()) % 2 == 0 { 1.0 } else { -1.0 };
            let ab = pair_delta(&sa, &sb, &vals).unwrap();
            let ba = pair_delta(&sb, &sa, &vals).unwrap();
            prop_assert!((ab - sign * ba).norm() <= 1e-10 * (1.0 + ab.norm()));
        }
    }
}
