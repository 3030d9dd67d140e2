//! Homology basis from lifts of a spanning chain of branch points.
//!
//! The finite branch points, sorted by (Re, Im), form an x-monotone chain of
//! segments. Each segment e has n lifts; the elementary cycle (e, j) runs
//! along lift j from start to end and back along lift j+1. These (N−1)(n−1) =
//! 2g cycles form a Z-basis of H_1. Intersections are read off from the
//! cyclic order of lifted half-edges in the local coordinate at each vertex.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::curve::CurveSpec;
use super::segment::Segment;
use crate::algebra::root_of_unity;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    Start,
    End,
}

#[derive(Clone, Debug, Serialize)]
pub struct Homology {
    /// 0-based branch indices in chain order.
    pub chain: Vec<usize>,
    /// Intersection matrix of the elementary cycles.
    pub intersection: Vec<Vec<i64>>,
    /// Canonical a-cycles as integer combinations of elementary cycles.
    pub a_cycles: Vec<Vec<i64>>,
    pub b_cycles: Vec<Vec<i64>>,
}

impl Homology {
    /// Elementary cycle index of lift pair (j, j+1) over chain edge t.
    pub fn cycle_index(n: u32, edge: usize, j: usize) -> usize {
        edge * (n as usize - 1) + j
    }
}

/// Branch indices sorted by (Re λ, Im λ).
pub fn chain_order(curve: &CurveSpec) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..curve.degree()).collect();
    let l = curve.lambdas();
    idx.sort_by(|&a, &b| (l[a].re, l[a].im).partial_cmp(&(l[b].re, l[b].im)).unwrap());
    idx
}

pub fn chain_segments(curve: &CurveSpec, chain: &[usize]) -> Result<Vec<Segment>> {
    let l = curve.lambdas();
    chain.windows(2).map(|p| Segment::new(curve, l[p[0]], l[p[1]], Some(p[0]), Some(p[1]))).collect()
}

fn normalize_angle(a: f64) -> f64 {
    let t = a.rem_euclid(2.0 * PI);
    if t >= 2.0 * PI {
        0.0
    } else {
        t
    }
}

/// Angle of the lift-j half-edge of `seg` in the local coordinate at its
/// start or end branch point.
fn half_edge_angle(curve: &CurveSpec, seg: &Segment, j: usize, side: Side) -> f64 {
    let (lead, unit) = match side {
        Side::Start => (seg.leading_at_start(), curve.branch_unit(seg.start_branch.unwrap())),
        Side::End => (seg.leading_at_end(), curve.branch_unit(seg.end_branch.unwrap())),
    };
    let t: Complex64 = root_of_unity(j as i64, curve.n()) * lead / unit;
    normalize_angle(t.arg())
}

pub fn intersection_matrix(curve: &CurveSpec, chain: &[usize], segments: &[Segment]) -> Vec<Vec<i64>> {
    let n = curve.n() as usize;
    let edges = segments.len();
    let cycles = edges * (n - 1);
    let angle = |t: usize, j: usize, side: Side| half_edge_angle(curve, &segments[t], j % n, side);
    // half-edges at the vertex chain[v]: edge v−1 ends there, edge v starts there
    let incident = |v: usize| {
        let mut hs = Vec::new();
        if v > 0 {
            hs.extend((0..n).map(|j| (v - 1, j, Side::End)));
        }
        if v < edges {
            hs.extend((0..n).map(|j| (v, j, Side::Start)));
        }
        hs
    };
    let flow = |a: (usize, usize), h: (usize, usize, Side)| -> i64 {
        let (ta, ja) = a;
        let (t, j, side) = h;
        if t != ta {
            return 0;
        }
        let sign = if side == Side::Start { 1 } else { -1 };
        if j == ja {
            sign
        } else if j == (ja + 1) % n {
            -sign
        } else {
            0
        }
    };
    let mut m = vec![vec![0i64; cycles]; cycles];
    for ia in 0..cycles {
        let a = (ia / (n - 1), ia % (n - 1));
        for ib in 0..cycles {
            let (tb, jb) = (ib / (n - 1), ib % (n - 1));
            let mut total = 0;
            for (v, side) in [(tb, Side::Start), (tb + 1, Side::End)] {
                let (h_in, h_out) = match side {
                    Side::End => ((tb, jb, Side::End), (tb, (jb + 1) % n, Side::End)),
                    Side::Start => ((tb, (jb + 1) % n, Side::Start), (tb, jb, Side::Start)),
                };
                let th_in = angle(h_in.0, h_in.1, h_in.2);
                let th_out = angle(h_out.0, h_out.1, h_out.2);
                let span = normalize_angle(th_in - th_out);
                for h in incident(v) {
                    if h == h_in || h == h_out {
                        continue;
                    }
                    let rel = normalize_angle(angle(h.0, h.1, h.2) - th_out);
                    if rel > 0.0 && rel < span {
                        total -= flow(a, h);
                    }
                }
            }
            m[ia][ib] = total;
        }
    }
    let _ = chain;
    m
}

fn gram(basis: &[Vec<i64>], j: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let k = basis.len();
    let mut out = vec![vec![0i64; k]; k];
    for r in 0..k {
        for c in 0..k {
            let mut s = 0;
            for (x, row) in basis[r].iter().zip(j) {
                if *x == 0 {
                    continue;
                }
                for (y, v) in basis[c].iter().zip(row) {
                    s += x * v * y;
                }
            }
            out[r][c] = s;
        }
    }
    out
}

/// Rows of an integer basis change T with T·J·Tᵀ = ⊕ [[0,1],[−1,0]].
pub fn symplectic_reduce(j: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let dim = j.len();
    if dim % 2 != 0 {
        return Err(Error::Homology(format!("odd rank {dim}")));
    }
    for r in 0..dim {
        for c in 0..dim {
            if j[r][c] != -j[c][r] {
                return Err(Error::Homology("intersection matrix not skew-symmetric".into()));
            }
        }
    }
    let mut basis: Vec<Vec<i64>> = (0..dim).map(|i| (0..dim).map(|k| (i == k) as i64).collect()).collect();
    for p in (0..dim).step_by(2) {
        let mut guard = 0;
        loop {
            guard += 1;
            if guard > 10_000 {
                return Err(Error::Homology("reduction did not terminate".into()));
            }
            let m = gram(&basis, j);
            let mut best: Option<(usize, usize, i64)> = None;
            for r in p..dim {
                for c in p..dim {
                    let v = m[r][c];
                    if v != 0 && best.map_or(true, |b| v.abs() < b.2.abs()) {
                        best = Some((r, c, v));
                    }
                }
            }
            let (r, c, _) = best.ok_or_else(|| Error::Homology("degenerate intersection form".into()))?;
            basis.swap(p, r);
            let c = if c == p { r } else { c };
            basis.swap(p + 1, c);
            let m = gram(&basis, j);
            if m[p][p + 1] < 0 {
                for x in basis[p + 1].iter_mut() {
                    *x = -*x;
                }
            }
            let m = gram(&basis, j);
            let d = m[p][p + 1];
            let mut clean = true;
            for k in p + 2..dim {
                let q1 = m[p][k].div_euclid(d);
                let q2 = m[p + 1][k].div_euclid(d);
                // ⟨v_p, v_k − q1 v_{p+1}⟩ = m[p][k] − q1 d; ⟨v_{p+1}, v_k + q2 v_p⟩ = m[p+1][k] − q2 d
                let (vp, vp1) = (basis[p].clone(), basis[p + 1].clone());
                for i in 0..dim {
                    basis[k][i] += -q1 * vp1[i] + q2 * vp[i];
                }
            }
            let m = gram(&basis, j);
            for k in p + 2..dim {
                if m[p][k] != 0 || m[p + 1][k] != 0 {
                    clean = false;
                }
            }
            if clean {
                if m[p][p + 1] != 1 {
                    return Err(Error::Homology(format!("intersection form not unimodular (pivot {})", m[p][p + 1])));
                }
                break;
            }
        }
    }
    Ok(basis)
}

fn standard_form(g: usize) -> Vec<Vec<i64>> {
    let mut s = vec![vec![0; 2 * g]; 2 * g];
    for i in 0..g {
        s[2 * i][2 * i + 1] = 1;
        s[2 * i + 1][2 * i] = -1;
    }
    s
}

/// For n = 2: a_i the loop over edge 2i−2, b_i the sum of the loops over
/// edges 2j−1, j ≥ i, with edge orientations chosen so consecutive loops
/// meet with +1. None when the intersections do not have chain shape.
fn hyperelliptic_chain_basis(j: &[Vec<i64>]) -> Option<Vec<Vec<i64>>> {
    let dim = j.len();
    let g = dim / 2;
    let mut sign = vec![1i64; dim];
    for t in 1..dim {
        let v = j[t - 1][t] * sign[t - 1];
        if v.abs() != 1 {
            return None;
        }
        sign[t] = v;
    }
    let unit = |t: usize| (0..dim).map(|k| if k == t { sign[t] } else { 0 }).collect::<Vec<i64>>();
    let mut rows = Vec::with_capacity(dim);
    for i in 0..g {
        rows.push(unit(2 * i));
        let mut b = vec![0i64; dim];
        for k in i..g {
            b[2 * k + 1] = sign[2 * k + 1];
        }
        rows.push(b);
    }
    (gram(&rows, j) == standard_form(g)).then_some(rows)
}

pub fn build_homology(curve: &CurveSpec) -> Result<(Homology, Vec<Segment>)> {
    let chain = chain_order(curve);
    let segments = chain_segments(curve, &chain)?;
    let intersection = intersection_matrix(curve, &chain, &segments);
    let chain_basis = if curve.n() == 2 { hyperelliptic_chain_basis(&intersection) } else { None };
    let t = match chain_basis {
        Some(t) => t,
        None => symplectic_reduce(&intersection)?,
    };
    let a_cycles = t.iter().step_by(2).cloned().collect();
    let b_cycles = t.iter().skip(1).step_by(2).cloned().collect();
    Ok((Homology { chain, intersection, a_cycles, b_cycles }, segments))
}
