//! JSON documents. Every top-level document carries `"schema": "expzero/1"`.
//! Polynomials in `(x, y)` are lists of `[exponents, coefficient]` pairs with
//! exact coefficient strings; exponential polynomials are their normal-form
//! text, which parses back to the same value.

use expzero::error::{Error, Result};
use expzero::exppoly::{parse_scalar, ExpPoly, Vars};
use expzero::lpoly::LPoly;
use expzero::numeric::RootResult;
use expzero::reduction::{Outcome, ReductionOutcome, Step};
use expzero::variety::VarietySystem;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "expzero/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LPolyJson {
    pub terms: Vec<(Vec<i32>, String)>,
}

impl LPolyJson {
    pub fn from_lpoly(q: &LPoly) -> Self {
        LPolyJson { terms: q.terms().map(|(e, c)| (e.clone(), c.to_string())).collect() }
    }

    pub fn to_lpoly(&self, nvars: usize) -> Result<LPoly> {
        let mut out = LPoly::zero(nvars);
        for (e, c) in &self.terms {
            if e.len() != nvars {
                return Err(Error::Contract(format!("exponent vector {:?} needs {} entries", e, nvars)));
            }
            out.add_term(e.clone(), parse_scalar(c)?);
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarietyJson {
    pub schema: String,
    pub variables: Vec<String>,
    pub target: String,
    pub bricks: Vec<String>,
    pub n: usize,
    pub alpha: usize,
    pub coordinates: Vec<String>,
    pub graph: Vec<LPolyJson>,
    pub graph_text: Vec<String>,
    pub hypersurface: LPolyJson,
    pub hypersurface_text: String,
    pub no_zeros: bool,
}

impl VarietyJson {
    pub fn from_system(v: &VarietySystem) -> Self {
        let names = v.coordinate_names();
        VarietyJson {
            schema: SCHEMA.into(),
            variables: v.target().vars().names().to_vec(),
            target: v.target().to_string(),
            bricks: v.bricks().iter().map(|b| b.to_string()).collect(),
            n: v.n(),
            alpha: v.alpha(),
            coordinates: names.clone(),
            graph: v.graph_polys().iter().map(LPolyJson::from_lpoly).collect(),
            graph_text: v.graph_polys().iter().map(|g| g.render(&names)).collect(),
            hypersurface: LPolyJson::from_lpoly(v.hypersurface()),
            hypersurface_text: v.hypersurface().render(&names),
            no_zeros: v.no_zeros(),
        }
    }

    /// Rebuilds the system; the textual fields are ignored.
    pub fn to_system(&self) -> Result<VarietySystem> {
        if self.schema != SCHEMA {
            return Err(Error::Contract(format!("unknown schema {}", self.schema)));
        }
        let vars = Vars::new(self.variables.clone())?;
        let target = ExpPoly::parse_in(&self.target, &vars)?;
        let bricks = self.bricks.iter().map(|b| ExpPoly::parse_in(b, &vars)).collect::<Result<Vec<_>>>()?;
        let nv = self.n + self.alpha;
        let graph = self.graph.iter().map(|g| g.to_lpoly(nv)).collect::<Result<Vec<_>>>()?;
        VarietySystem::from_parts(target, bricks, graph, self.hypersurface.to_lpoly(nv)?)
    }
}

/// Reads either a bare variety object or a document with a `variety` field.
pub fn variety_from_json(text: &str) -> Result<VarietySystem> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Contract(format!("invalid JSON: {}", e)))?;
    let obj = value.get("variety").cloned().unwrap_or(value);
    let v: VarietyJson =
        serde_json::from_value(obj).map_err(|e| Error::Contract(format!("not a variety document: {}", e)))?;
    v.to_system()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum StepJson {
    Rescale { factor: String },
    Factor { before: String, factors: Vec<(String, u32)>, chosen: usize, after: String },
    HeightReduction { before: String, m: Vec<i64>, b: String, branch: i64, after: String },
}

impl StepJson {
    pub fn from_step(s: &Step) -> Self {
        match s {
            Step::Rescale { factor } => StepJson::Rescale { factor: factor.to_string() },
            Step::Factor { before, factors, chosen, after } => StepJson::Factor {
                before: before.to_string(),
                factors: factors.clone(),
                chosen: *chosen,
                after: after.to_string(),
            },
            Step::HeightReduction { before, m, b, branch, after } => StepJson::HeightReduction {
                before: before.to_string(),
                m: m.clone(),
                b: b.to_string(),
                branch: *branch,
                after: after.to_string(),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OutcomeJson {
    FreeSystem { variety: VarietyJson },
    Polynomial { polynomial: String },
    NoZeros { k: String, g: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReductionJson {
    pub trace: Vec<StepJson>,
    pub height_reductions: usize,
    /// Original coordinates are `scale` times final coordinates.
    pub scale: String,
    pub outcome: OutcomeJson,
}

impl ReductionJson {
    pub fn from_outcome(r: &ReductionOutcome) -> Self {
        let outcome = match &r.outcome {
            Outcome::FreeSystem(v) => OutcomeJson::FreeSystem { variety: VarietyJson::from_system(v) },
            Outcome::Polynomial(q) => OutcomeJson::Polynomial { polynomial: q.to_string() },
            Outcome::NoZeros { k, g } => OutcomeJson::NoZeros { k: k.to_string(), g: g.to_string() },
        };
        ReductionJson {
            trace: r.trace.iter().map(StepJson::from_step).collect(),
            height_reductions: r.height_reductions(),
            scale: r.scale.to_string(),
            outcome,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RootJson {
    Root { assignment: Vec<Complex64>, residual: f64, iterations: usize },
    NoZeros { k: String, g: String },
    NotFound { best_residual: f64, seeds_tried: usize },
}

impl RootJson {
    pub fn from_result(r: &RootResult) -> Self {
        match r {
            RootResult::Root { assignment, residual, iterations } => {
                RootJson::Root { assignment: assignment.clone(), residual: *residual, iterations: *iterations }
            }
            RootResult::NoZeros { k, g } => RootJson::NoZeros { k: k.to_string(), g: g.to_string() },
            RootResult::NotFound { best_residual, seeds_tried } => {
                RootJson::NotFound { best_residual: *best_residual, seeds_tried: *seeds_tried }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorJson {
    pub kind: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub partial: Vec<(String, u32)>,
}

pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Parse(_) => "parse",
        Error::MalformedTerm(_) => "malformed_term",
        Error::ContextMismatch { .. } => "context_mismatch",
        Error::UndefinedInput(_) => "undefined_input",
        Error::DegenerateInput(_) => "degenerate_input",
        Error::Contract(_) => "contract",
        Error::ConstructionBug(_) => "construction_bug",
        Error::NumericRange(_) => "numeric_range",
        Error::Domain(_) => "domain",
        Error::Budget { .. } => "budget",
        Error::SamplingFailure { .. } => "sampling_failure",
        Error::ProbeInconclusive(_) => "probe_inconclusive",
        Error::NotFree(_) => "not_free",
    }
}

impl ErrorJson {
    pub fn from_error(e: &Error) -> Self {
        let (line, column) = match e {
            Error::Parse(p) => (Some(p.line), Some(p.column)),
            _ => (None, None),
        };
        let partial = match e {
            Error::Budget { partial, .. } => partial.clone(),
            _ => Vec::new(),
        };
        ErrorJson { kind: error_kind(e), message: e.to_string(), line, column, partial }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use expzero::scalar::BranchEnv;
    use expzero::variety::variety_of;

    #[test]
    fn variety_round_trip() {
        for s in ["exp(exp(x1/2 + x2^2)) + x1^3", "log(2)*exp(x) - (1 + i)", "exp(x) + exp(-x) - log[1](3)"] {
            let (v, _) = variety_of(&ExpPoly::parse(s).unwrap()).unwrap();
            let text = serde_json::to_string(&VarietyJson::from_system(&v)).unwrap();
            let back = variety_from_json(&text).unwrap();
            assert_eq!(back, v);
            let env = BranchEnv::new();
            let a: Vec<Complex64> = (0..v.n()).map(|k| Complex64::new(0.3 * k as f64 - 0.2, 0.1)).collect();
            let pt = v.witness(&a, &env).unwrap();
            assert_eq!(v.residual(&pt, &env).unwrap(), back.residual(&pt, &env).unwrap());
        }
    }
}
