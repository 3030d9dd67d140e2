use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use thomae::surface::CurveSpec;
use thomae::Complex64;

use crate::Failure;

/// Curve as written in JSON: cover degree and [re, im] branch values.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveInput {
    pub n: u32,
    pub lambdas: Vec<[f64; 2]>,
}

impl CurveInput {
    pub fn build(&self) -> Result<CurveSpec, Failure> {
        let lambdas = self.lambdas.iter().map(|p| Complex64::new(p[0], p[1])).collect();
        CurveSpec::new(self.n, lambdas).map_err(|e| Failure::Invariant(e.to_string()))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CurveSource {
    Inline(CurveInput),
    File { file: PathBuf },
}

impl CurveSource {
    /// Relative paths are taken from the plan's directory.
    pub fn load(&self, base: &Path) -> Result<CurveInput, Failure> {
        match self {
            CurveSource::Inline(c) => Ok(c.clone()),
            CurveSource::File { file } => read_curve(&base.join(file)),
        }
    }
}

pub fn read_curve(path: &Path) -> Result<CurveInput, Failure> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::Parse)?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display())).map_err(Failure::Parse)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskId {
    ThomaeConstHyp,
    ThomaeDerivHyp,
    QuotientHyp,
    MatrixFormHyp,
    ThomaeConstTrig,
    ThomaeDerivTrigT1,
    ThomaeDerivTrigT2,
    QuotientTrig,
    MatrixFormTrig,
    SimpleZeroTrig,
}

impl TaskId {
    pub fn cover_degree(self) -> u32 {
        match self {
            TaskId::ThomaeConstHyp | TaskId::ThomaeDerivHyp | TaskId::QuotientHyp | TaskId::MatrixFormHyp => 2,
            _ => 3,
        }
    }

    pub fn name(self) -> String {
        serde_json::to_value(self).unwrap().as_str().unwrap().to_string()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub id: TaskId,
    /// Branch indices for the quotient tasks; all of them when absent.
    #[serde(default)]
    pub k: Option<Vec<usize>>,
    /// Random divisors per branch index for the quotient tasks.
    #[serde(default)]
    pub samples: Option<usize>,
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanTolerances {
    pub tol: Option<f64>,
    pub theta_tol: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunPlan {
    pub curve: CurveSource,
    /// Further trigonal curves entering the estimate of |α|.
    #[serde(default)]
    pub alpha_curves: Vec<CurveSource>,
    pub tasks: Vec<TaskSpec>,
    #[serde(default)]
    pub tolerances: PlanTolerances,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub quad_order: Option<usize>,
}

pub fn read_plan(path: &Path) -> Result<RunPlan, Failure> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::Parse)?;
    let plan: RunPlan =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display())).map_err(Failure::Parse)?;
    if plan.tasks.is_empty() {
        return Err(Failure::Parse(anyhow::anyhow!("plan lists no tasks")));
    }
    Ok(plan)
}
