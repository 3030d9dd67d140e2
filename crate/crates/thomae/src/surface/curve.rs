use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::principal_root;
use crate::{Error, Result};

/// Cyclic cover w^n = Π (z − λ_i) of the sphere, n ∈ {2, 3}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCurve", into = "RawCurve")]
pub struct CurveSpec {
    n: u32,
    lambdas: Vec<Complex64>,
    units: Vec<Complex64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawCurve {
    n: u32,
    lambdas: Vec<[f64; 2]>,
}

impl TryFrom<RawCurve> for CurveSpec {
    type Error = Error;
    fn try_from(raw: RawCurve) -> Result<Self> {
        CurveSpec::new(raw.n, raw.lambdas.iter().map(|p| Complex64::new(p[0], p[1])).collect())
    }
}

impl From<CurveSpec> for RawCurve {
    fn from(c: CurveSpec) -> Self {
        RawCurve { n: c.n, lambdas: c.lambdas.iter().map(|z| [z.re, z.im]).collect() }
    }
}

/// Relative separation below which branch values count as coincident.
pub const SEPARATION_EPS: f64 = 1e-8;

impl CurveSpec {
    pub fn new(n: u32, lambdas: Vec<Complex64>) -> Result<Self> {
        let count = lambdas.len();
        match n {
            2 if count >= 3 && count % 2 == 1 => {}
            3 if count >= 2 && count % 3 == 2 => {}
            2 => return Err(Error::InvalidCurve(format!("n=2 needs an odd number ≥ 3 of branch values, got {count}"))),
            3 => return Err(Error::InvalidCurve(format!("n=3 needs 3q−1 branch values, got {count}"))),
            _ => return Err(Error::InvalidCurve(format!("cover degree {n} not supported"))),
        }
        if lambdas.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidCurve("branch values must be finite".into()));
        }
        let scale = 1.0 + lambdas.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for i in 0..count {
            for j in i + 1..count {
                if (lambdas[i] - lambdas[j]).norm() <= SEPARATION_EPS * scale {
                    return Err(Error::InvalidCurve(format!("branch points not distinct ({} and {})", i + 1, j + 1)));
                }
            }
        }
        let units = (0..count)
            .map(|i| {
                let fp = (0..count).filter(|&j| j != i).fold(Complex64::new(1.0, 0.0), |acc, j| acc * (lambdas[i] - lambdas[j]));
                principal_root(fp, n)
            })
            .collect();
        Ok(CurveSpec { n, lambdas, units })
    }

    pub fn hyperelliptic(lambdas: Vec<Complex64>) -> Result<Self> {
        Self::new(2, lambdas)
    }

    pub fn trigonal(lambdas: Vec<Complex64>) -> Result<Self> {
        Self::new(3, lambdas)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn lambdas(&self) -> &[Complex64] {
        &self.lambdas
    }

    /// Number of finite branch values.
    pub fn degree(&self) -> usize {
        self.lambdas.len()
    }

    pub fn genus(&self) -> usize {
        match self.n {
            2 => (self.degree() - 1) / 2,
            _ => 3 * self.q() - 2,
        }
    }

    /// q with deg f = 3q − 1 (trigonal curves only; 0 otherwise).
    pub fn q(&self) -> usize {
        if self.n == 3 {
            (self.degree() + 1) / 3
        } else {
            0
        }
    }

    pub fn f(&self, z: Complex64) -> Complex64 {
        self.lambdas.iter().fold(Complex64::new(1.0, 0.0), |acc, &l| acc * (z - l))
    }

    /// f'(λ_i) for a 0-based branch index.
    pub fn f_prime(&self, i: usize) -> Complex64 {
        let li = self.lambdas[i];
        self.lambdas
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .fold(Complex64::new(1.0, 0.0), |acc, (_, &l)| acc * (li - l))
    }

    /// Principal n-th root of f'(λ_i): the value of w/t at P_i in the local
    /// coordinate t^n = z − λ_i.
    pub fn branch_unit(&self, i: usize) -> Complex64 {
        self.units[i]
    }

    pub fn basis(&self) -> DifferentialBasis {
        DifferentialBasis::for_curve(self)
    }

    /// Largest distance between branch values, at least 1.
    pub fn scale(&self) -> f64 {
        let mut s: f64 = 1.0;
        for a in &self.lambdas {
            for b in &self.lambdas {
                s = s.max((a - b).norm());
            }
        }
        s
    }
}

/// The differential z^power dz / w^w_power.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Differential {
    pub power: i32,
    pub w_power: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifferentialBasis(pub Vec<Differential>);

/// Where a local order was computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Place {
    Branch(usize),
    Infinity,
    /// A point over z = 0 that is not a branch point.
    OverZero,
}

impl Differential {
    /// Orders of vanishing at every branch point, at P∞, and over z = 0 when 0
    /// is not a branch value.
    pub fn local_orders(&self, curve: &CurveSpec) -> Vec<(Place, i64)> {
        let n = curve.n() as i64;
        let big_n = curve.degree() as i64;
        let a = self.power as i64;
        let k = self.w_power as i64;
        let mut out: Vec<(Place, i64)> = curve
            .lambdas()
            .iter()
            .enumerate()
            .map(|(i, l)| {
                let z_order = if *l == Complex64::new(0.0, 0.0) { n * a } else { 0 };
                (Place::Branch(i), z_order + (n - 1) - k)
            })
            .collect();
        out.push((Place::Infinity, -n * a - n - 1 + k * big_n));
        if !curve.lambdas().iter().any(|l| *l == Complex64::new(0.0, 0.0)) {
            out.push((Place::OverZero, a));
        }
        out
    }

    pub fn is_holomorphic(&self, curve: &CurveSpec) -> bool {
        self.local_orders(curve).iter().all(|&(_, o)| o >= 0)
    }
}

impl DifferentialBasis {
    /// z^{l−1}dz/w for n = 2; z^{l−1}dz/w² (l ≤ 2q−1) then z^{l−2q}dz/w for n = 3.
    pub fn for_curve(curve: &CurveSpec) -> Self {
        let g = curve.genus();
        match curve.n() {
            2 => DifferentialBasis((0..g as i32).map(|a| Differential { power: a, w_power: 1 }).collect()),
            _ => {
                let q = curve.q() as i32;
                let first = (0..2 * q - 1).map(|a| Differential { power: a, w_power: 2 });
                let second = (0..q - 1).map(|a| Differential { power: a, w_power: 1 });
                DifferentialBasis(first.chain(second).collect())
            }
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}
