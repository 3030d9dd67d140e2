use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::algebra::{IndexSet, Symbol};
use crate::surface::periods::PeriodData;
use crate::surface::riemann::lattice_snap;
use crate::theta::{reduce_characteristic, Characteristic};
use crate::{Error, Result};

/// Snap tolerance for characteristics built from branch-point images.
pub const CHAR_SNAP_TOL: f64 = 1e-7;

fn all_symbols(finite: usize) -> Vec<Symbol> {
    (1..=finite).map(Symbol::Finite).chain(std::iter::once(Symbol::Infinity)).collect()
}

fn complement(universe: &[Symbol], parts: &[&IndexSet]) -> IndexSet {
    IndexSet::new(universe.iter().copied().filter(|s| parts.iter().all(|p| !p.contains(*s)))).unwrap()
}

fn image_sum(periods: &PeriodData, set: &IndexSet) -> DVector<Complex64> {
    set.finite().iter().fold(DVector::zeros(periods.genus()), |acc, &i| acc + periods.branch_image(i))
}

fn serialize_display<T: fmt::Display, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// I ∪ J of the 2g+2 hyperelliptic symbols.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypPartition {
    pub m: usize,
    #[serde(serialize_with = "serialize_display")]
    pub i: IndexSet,
    #[serde(serialize_with = "serialize_display")]
    pub j: IndexSet,
}

impl HypPartition {
    pub fn new(g: usize, i: IndexSet) -> Result<Self> {
        let n = 2 * g + 1;
        if i.finite().iter().any(|&k| k > n) {
            return Err(Error::InvalidPartition(format!("{i} has indices beyond {n}")));
        }
        let size = i.len();
        if size > g + 1 || (g + 1 - size) % 2 != 0 {
            return Err(Error::InvalidPartition(format!("|I| = {size} is not g+1−2m for g = {g}")));
        }
        let m = (g + 1 - size) / 2;
        if m == 0 && !i.has_infinity() {
            return Err(Error::InvalidPartition("m = 0 requires ∞ ∈ I".into()));
        }
        let j = complement(&all_symbols(n), &[&i]);
        Ok(HypPartition { m, i, j })
    }
}

impl fmt::Display for HypPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "I={} J={}", self.i, self.j)
    }
}

/// All partitions with index of speciality m (for m = 0, ∞ ∈ I).
pub fn enumerate_partitions_hyp(g: usize, m: usize) -> Vec<HypPartition> {
    if 2 * m > g + 1 {
        return Vec::new();
    }
    let size = g + 1 - 2 * m;
    let n = 2 * g + 1;
    if m == 0 {
        (1..=n)
            .combinations(g)
            .map(|c| HypPartition::new(g, IndexSet::from_finite(&c, true).unwrap()).unwrap())
            .collect()
    } else {
        all_symbols(n)
            .into_iter()
            .combinations(size)
            .map(|c| HypPartition::new(g, IndexSet::new(c).unwrap()).unwrap())
            .collect()
    }
}

/// e(I) = Σ_{i∈I} u(P_i) + K, snapped to an integral characteristic with
/// entries in {0, 1}.
pub fn char_from_partition_hyp(p: &HypPartition, periods: &PeriodData) -> Result<(Characteristic, f64)> {
    if periods.curve.n() != 2 {
        return Err(Error::InvalidCurve("hyperelliptic curve expected".into()));
    }
    let v = image_sum(periods, &p.i) + &periods.k_vector;
    let (eps, delta) = periods.tau.real_coordinates(&v);
    let (ch, residual) = Characteristic::snap(&eps, &delta, 1, CHAR_SNAP_TOL)?;
    Ok((reduce_characteristic(&ch).0, residual))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrigKind {
    /// |Λ0| = |Λ1| = |Λ2| = q, ∞ ∈ Λ2.
    Constant,
    /// |Λ2| = |Λ1| = q−1, |Λ0| = q+2.
    Type1,
    /// |Λ2| = q−2, |Λ1| = |Λ0| = q+1.
    Type2,
}

impl TrigKind {
    fn sizes(self, q: usize) -> Option<[usize; 3]> {
        match self {
            TrigKind::Constant => Some([q, q, q]),
            TrigKind::Type1 if q >= 1 => Some([q + 2, q - 1, q - 1]),
            TrigKind::Type2 if q >= 2 => Some([q + 1, q + 1, q - 2]),
            _ => None,
        }
    }
}

/// Λ0 ∪ Λ1 ∪ Λ2 of the 3q trigonal symbols.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrigPartition {
    #[serde(serialize_with = "serialize_display")]
    pub l0: IndexSet,
    #[serde(serialize_with = "serialize_display")]
    pub l1: IndexSet,
    #[serde(serialize_with = "serialize_display")]
    pub l2: IndexSet,
    pub kind: TrigKind,
}

impl TrigPartition {
    pub fn new(q: usize, l0: IndexSet, l1: IndexSet, l2: IndexSet) -> Result<Self> {
        let n = 3 * q - 1;
        let universe = all_symbols(n);
        let union = l0.union(&l1).and_then(|u| u.union(&l2))?;
        if union.members() != universe.as_slice() {
            return Err(Error::InvalidPartition(format!("{l0} ∪ {l1} ∪ {l2} is not the full symbol set")));
        }
        let sizes = [l0.len(), l1.len(), l2.len()];
        let kind = [TrigKind::Constant, TrigKind::Type1, TrigKind::Type2]
            .into_iter()
            .find(|k| k.sizes(q) == Some(sizes) && (*k != TrigKind::Constant || l2.has_infinity()))
            .ok_or_else(|| Error::InvalidPartition(format!("block sizes {sizes:?} match no partition kind")))?;
        Ok(TrigPartition { l0, l1, l2, kind })
    }

    /// The partition read off a positive divisor Σ n_i P_i supported on branch
    /// points: Λ2 holds the points of multiplicity 2, Λ1 those of multiplicity 1.
    pub fn from_divisor(q: usize, divisor: &BTreeMap<Symbol, u32>) -> Result<Self> {
        let n = 3 * q - 1;
        if let Some((s, k)) = divisor.iter().find(|(_, &k)| k >= 3) {
            return Err(Error::InvalidPartition(format!("branch point {s} appears with multiplicity {k}")));
        }
        let pick = |want: u32| IndexSet::new(divisor.iter().filter(|(_, &k)| k == want).map(|(s, _)| *s));
        let l1 = pick(1)?;
        let l2 = pick(2)?;
        let l0 = complement(&all_symbols(n), &[&l1, &l2]);
        let p = Self::new(q, l0, l1, l2)?;
        if p.kind == TrigKind::Constant {
            return Err(Error::InvalidPartition("divisor has degree g, not g−1".into()));
        }
        Ok(p)
    }

    /// Index of the block holding ∞.
    pub fn infinity_block(&self) -> usize {
        if self.l0.has_infinity() {
            0
        } else if self.l1.has_infinity() {
            1
        } else {
            2
        }
    }

    pub fn blocks(&self) -> [&IndexSet; 3] {
        [&self.l0, &self.l1, &self.l2]
    }
}

impl fmt::Display for TrigPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L0={} L1={} L2={}", self.l0, self.l1, self.l2)
    }
}

/// Every partition of the given kind; ∞ is placed in every allowed block
/// (only Λ2 for the constant kind).
pub fn enumerate_partitions_trig(q: usize, kind: TrigKind) -> Vec<TrigPartition> {
    let Some([s0, s1, s2]) = kind.sizes(q) else { return Vec::new() };
    let universe = all_symbols(3 * q - 1);
    let mut out = Vec::new();
    for l2 in universe.iter().copied().combinations(s2) {
        let l2 = IndexSet::new(l2).unwrap();
        if kind == TrigKind::Constant && !l2.has_infinity() {
            continue;
        }
        let rest: Vec<Symbol> = universe.iter().copied().filter(|s| !l2.contains(*s)).collect();
        for l1 in rest.iter().copied().combinations(s1) {
            let l1 = IndexSet::new(l1).unwrap();
            let l0 = complement(&universe, &[&l1, &l2]);
            debug_assert_eq!(l0.len(), s0);
            if let Ok(p) = TrigPartition::new(q, l0, l1, l2.clone()) {
                out.push(p);
            }
        }
    }
    out
}

/// Every positive divisor of degree g−1 with support on the 3q branch points
/// and multiplicities at most `max_mult`, as multiplicity maps.
pub fn branch_divisors(q: usize, max_mult: u32) -> Vec<BTreeMap<Symbol, u32>> {
    let universe = all_symbols(3 * q - 1);
    let degree = 3 * q - 3;
    let mut out = Vec::new();
    let mut current = vec![0u32; universe.len()];
    fn rec(pos: usize, left: u32, max: u32, cur: &mut Vec<u32>, uni: &[Symbol], out: &mut Vec<BTreeMap<Symbol, u32>>) {
        if pos == uni.len() {
            if left == 0 {
                out.push(uni.iter().zip(cur.iter()).filter(|(_, &k)| k > 0).map(|(s, &k)| (*s, k)).collect());
            }
            return;
        }
        for k in 0..=max.min(left) {
            cur[pos] = k;
            rec(pos + 1, left - k, max, cur, uni, out);
        }
        cur[pos] = 0;
    }
    rec(0, degree as u32, max_mult, &mut current, &universe, &mut out);
    out
}

/// e_Λ = Σ_{Λ1} u(P_i) + 2 Σ_{Λ2} u(P_i) + K, snapped to denominators 1, 2, 3, 6
/// and reduced into [0, 2).
pub fn char_from_partition_trig(p: &TrigPartition, periods: &PeriodData) -> Result<(Characteristic, f64)> {
    if periods.curve.n() != 3 {
        return Err(Error::InvalidCurve("trigonal curve expected".into()));
    }
    let v = image_sum(periods, &p.l1) + image_sum(periods, &p.l2) * Complex64::new(2.0, 0.0) + &periods.k_vector;
    let (ch, residual) = lattice_snap(&v, &periods.tau, CHAR_SNAP_TOL)?;
    Ok((reduce_characteristic(&ch).0, residual))
}
