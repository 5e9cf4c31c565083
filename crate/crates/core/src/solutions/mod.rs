//! Group actions on solutions, numeric residual checks of explicit and
//! implicit candidates, invariant-solution checks and similarity reductions.

mod action;
mod reduce;
mod residual;


use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{parse, Expr, ExprError, SymbolKind};
use crate::jet;

pub use action::{
    born_infeld_actions, graph_relation_defect, infinitesimal_check, transform_solution, transform_solution_symbolic,
    GroupAction, PrintedTransform,
};
pub use reduce::{reduce, Reduction, ReductionAnsatz};
pub use residual::{
    newton_safeguarded, residual, residual_over, residual_with, verify_invariant_solution, InvariantReport, NewtonOptions, PointFailure,
    ResidualReport,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolutionError {
    #[error("explicit candidate may not contain {0}")]
    ExplicitHasDependent(String),
    #[error("candidate may not contain jet symbol {0}")]
    HasJet(String),
    #[error("bad grid spec {0:?}: {1}")]
    Grid(String, String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("ansatz Jacobian vanishes identically")]
    SingularAnsatz,
    #[error("reduced expression vanishes identically")]
    VanishingPrefactor,
    #[error("no separation into prefactor and ODE: {0}")]
    NotSeparable(String),
    #[error("reduction keeps dependence on {0}")]
    ResidualDependence(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// `u = f(x, t)` or `F(x, t, u) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum CandidateForm {
    Explicit(Expr),
    Implicit(Expr),
}

impl CandidateForm {
    pub fn expr(&self) -> &Expr {
        match self {
            CandidateForm::Explicit(e) | CandidateForm::Implicit(e) => e,
        }
    }

    pub fn is_explicit(&self) -> bool {
        matches!(self, CandidateForm::Explicit(_))
    }

    /// Parses `expr` or `implicit:expr`.
    pub fn parse(text: &str) -> Result<CandidateForm, SolutionError> {
        let (implicit, body) = match text.trim().strip_prefix("implicit:") {
            Some(rest) => (true, rest),
            None => (false, text),
        };
        let e = parse(body).map_err(|e| SolutionError::Parse(e.to_string()))?;
        let form = if implicit { CandidateForm::Implicit(e) } else { CandidateForm::Explicit(e) };
        form.validate()?;
        Ok(form)
    }

    pub fn validate(&self) -> Result<(), SolutionError> {
        for s in self.expr().free_symbols() {
            match s.kind() {
                SymbolKind::Jet { .. } => return Err(SolutionError::HasJet(s.name().to_string())),
                SymbolKind::Dependent if self.is_explicit() => {
                    return Err(SolutionError::ExplicitHasDependent(s.name().to_string()))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

impl fmt::Display for CandidateForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CandidateForm::Explicit(e) => write!(f, "u = {e}"),
            CandidateForm::Implicit(e) => write!(f, "{e} = 0"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamRange {
    pub lo: f64,
    pub hi: f64,
}

pub type ParamValues = BTreeMap<String, f64>;

/// Evenly spaced samples `lo, lo + h, …, hi` (`n ≥ 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        if self.n <= 1 {
            return vec![0.5 * (self.lo + self.hi)];
        }
        let h = (self.hi - self.lo) / (self.n - 1) as f64;
        (0..self.n).map(|k| self.lo + h * k as f64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub x: Axis,
    pub t: Axis,
}

impl Grid {
    pub fn new(x: (f64, f64), t: (f64, f64), n: usize) -> Grid {
        Grid {
            x: Axis { lo: x.0, hi: x.1, n },
            t: Axis { lo: t.0, hi: t.1, n },
        }
    }

    /// Points with `x` varying slowest.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let ts = self.t.values();
        self.x.values().into_iter().flat_map(|x| ts.iter().map(move |&t| (x, t))).collect()
    }
}

impl FromStr for Grid {
    type Err = SolutionError;

    /// `x=lo:hi:n,t=lo:hi:n`.
    fn from_str(s: &str) -> Result<Grid, SolutionError> {
        let bad = |why: &str| SolutionError::Grid(s.to_string(), why.to_string());
        let mut axes: BTreeMap<&str, Axis> = BTreeMap::new();
        for part in s.split(',') {
            let (name, spec) = part.trim().split_once('=').ok_or_else(|| bad("expected name=lo:hi:n"))?;
            let fields: Vec<&str> = spec.split(':').collect();
            if fields.len() != 3 {
                return Err(bad("expected lo:hi:n"));
            }
            let num = |k: usize| fields[k].trim().parse::<f64>().map_err(|_| bad("bad number"));
            let n = fields[2].trim().parse::<usize>().map_err(|_| bad("bad count"))?;
            let axis = Axis { lo: num(0)?, hi: num(1)?, n };
            if n == 0 || !(axis.lo <= axis.hi) {
                return Err(bad("empty axis"));
            }
            if axes.insert(name.trim(), axis).is_some() {
                return Err(bad("repeated axis"));
            }
        }
        match (axes.get("x"), axes.get("t"), axes.len()) {
            (Some(x), Some(t), 2) => Ok(Grid { x: *x, t: *t }),
            _ => Err(bad("need exactly the axes x and t")),
        }
    }
}

/// Push-forward of a source candidate by a group element; sampling follows
/// the image of the source's sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct Transport {
    pub source: SolutionCandidate,
    pub action: GroupAction,
    pub eps: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionCandidate {
    pub form: CandidateForm,
    pub params: BTreeMap<String, ParamRange>,
    pub provenance: String,
    /// Declared sampling domain, kept clear of singular sets.
    pub domain: Option<Grid>,
    pub origin: Option<Box<Transport>>,
}

impl SolutionCandidate {
    pub fn new(form: CandidateForm) -> SolutionCandidate {
        SolutionCandidate {
            form,
            params: BTreeMap::new(),
            provenance: String::new(),
            domain: None,
            origin: None,
        }
    }

    pub fn explicit(text: &str) -> Result<SolutionCandidate, SolutionError> {
        let e = parse(text).map_err(|e| SolutionError::Parse(e.to_string()))?;
        let form = CandidateForm::Explicit(e);
        form.validate()?;
        Ok(SolutionCandidate::new(form))
    }

    pub fn implicit(text: &str) -> Result<SolutionCandidate, SolutionError> {
        let e = parse(text).map_err(|e| SolutionError::Parse(e.to_string()))?;
        let form = CandidateForm::Implicit(e);
        form.validate()?;
        Ok(SolutionCandidate::new(form))
    }

    pub fn with_param(mut self, name: &str, lo: f64, hi: f64) -> Self {
        self.params.insert(name.to_string(), ParamRange { lo, hi });
        self
    }

    pub fn with_domain(mut self, grid: Grid) -> Self {
        self.domain = Some(grid);
        self
    }

    pub fn with_provenance(mut self, tag: &str) -> Self {
        self.provenance = tag.to_string();
        self
    }

    /// Midpoints first, then `count − 1` uniform draws from a seeded stream.
    pub fn param_samples(&self, seed: u64, count: usize) -> Vec<ParamValues> {
        let mid: ParamValues = self.params.iter().map(|(k, r)| (k.clone(), 0.5 * (r.lo + r.hi))).collect();
        let mut out = vec![mid];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 1..count.max(1) {
            out.push(
                self.params
                    .iter()
                    .map(|(k, r)| {
                        let v = if r.hi > r.lo { rng.gen_range(r.lo..=r.hi) } else { r.lo };
                        (k.clone(), v)
                    })
                    .collect(),
            );
        }
        out
    }

    /// Explicit candidates lifted to `u − f(x, t)`.
    pub fn implicit_relation(&self) -> Expr {
        match &self.form {
            CandidateForm::Explicit(f) => (Expr::sym(&jet::u()) - f.clone()).normalize(),
            CandidateForm::Implicit(g) => g.clone(),
        }
    }
}
