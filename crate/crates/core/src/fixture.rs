//! The Born-Infeld fixture shipped with the crate, as typed records.

use std::collections::BTreeMap;

use serde::Deserialize;
use thiserror::Error;

use crate::expr::{parse, ParseError};
use crate::jet::{JetError, Pde, PdeSpec};
use crate::liealg::{unit, Subspace};
use crate::solutions::{
    CandidateForm, GroupAction, PrintedTransform, ReductionAnsatz, SolutionCandidate, SolutionError,
};
use crate::symmetry::{VectorField, VectorFieldSpec};

pub const BORN_INFELD_TOML: &str = include_str!("../fixtures/borninfeld.toml");
pub const BORN_INFELD_PDE: &str = include_str!("../fixtures/borninfeld.pde");

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("fixture syntax: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("fixture expression: {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Solution(#[from] SolutionError),
    #[error("unknown basis label {0}")]
    Label(String),
}

#[derive(Debug, Clone, Deserialize)]
pub struct Fixture {
    pub version: u32,
    pub pde: PdeEntry,
    pub symmetry: SymmetryEntry,
    pub generator: Vec<GeneratorEntry>,
    pub commutators: CommutatorEntry,
    pub structure: StructureEntry,
    pub adjoint: Vec<AdjointEntry>,
    pub optimal: OptimalEntry,
    pub action: Vec<ActionEntry>,
    pub transform: Vec<TransformEntry>,
    pub known_solution: Vec<KnownSolution>,
    pub invariant_row: Vec<InvariantRow>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct PdeEntry {
    pub anchor: String,
    pub lhs: String,
    pub principal: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct SymmetryEntry {
    pub anchor: String,
    pub dimension: usize,
    pub printed_general: VectorFieldSpec,
    pub corrected_general: VectorFieldSpec,
    pub general_anchor: String,
    pub determining_anchor: String,
    pub printed_determining: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct GeneratorEntry {
    pub label: String,
    pub xi1: String,
    pub xi2: String,
    pub eta: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct CommutatorEntry {
    pub anchor: String,
    pub printed: Vec<Vec<String>>,
    pub corrected: Vec<Vec<String>>,
    /// 1-based `(row, column)`.
    pub suspected_typos: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct StructureEntry {
    pub anchor: String,
    pub claims_solvable: bool,
    pub claims_semisimple: bool,
    pub derived_with_generators: Vec<String>,
    pub radical: Vec<String>,
    pub levi: Vec<String>,
    pub quotient_anchor: String,
    pub quotient: Vec<Vec<String>>,
    pub levi_killing: Vec<Vec<i64>>,
    pub centralizer_anchor: String,
    pub centralizer_of_radical: Vec<String>,
    pub minimal_ideal_of_radical: Vec<String>,
    pub centralizer_of_levi: Vec<String>,
    pub minimal_ideal_of_levi: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct AdjointEntry {
    pub generator: usize,
    pub anchor: String,
    /// Entries in `eps`, row `j` the image of `v_j`.
    pub rows: Vec<Vec<String>>,
    pub suspected_typos: Vec<[usize; 2]>,
}

impl AdjointEntry {
    pub fn is_flagged(&self, row: usize, col: usize) -> bool {
        self.suspected_typos.contains(&[row + 1, col + 1])
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct OptimalEntry {
    pub anchor: String,
    pub parameter_grid: Vec<f64>,
    pub compositions: usize,
    pub composition_eps: f64,
    pub rep: Vec<OptimalRep>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct OptimalRep {
    pub name: String,
    /// Coordinates in `v1..v7`, possibly in the parameters `a, b, c, d`.
    pub coords: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ActionEntry {
    pub index: usize,
    pub anchor: String,
    pub x: String,
    pub t: String,
    pub u: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct TransformSpec {
    pub prefactor: String,
    pub x_arg: String,
    pub t_arg: String,
    pub offset: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct TransformEntry {
    pub index: usize,
    pub anchor: String,
    pub printed: TransformSpec,
    pub corrected: Option<TransformSpec>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct KnownSolution {
    pub label: String,
    pub anchor: String,
    pub form: String,
    #[serde(default)]
    pub params: BTreeMap<String, [f64; 2]>,
    pub domain: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ReductionSpec {
    pub y: String,
    pub g: String,
    pub chart_var: String,
    pub chart: String,
    pub note: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct CandidateEntry {
    pub label: String,
    /// `printed` or `corrected`.
    pub variant: String,
    pub form: String,
    #[serde(default)]
    pub params: BTreeMap<String, [f64; 2]>,
    /// Label of the printed candidate this one repairs.
    pub corrects: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct InvariantRow {
    pub generator: usize,
    pub anchor: String,
    /// `(y, v)` as functions of `(x, t, u)`.
    pub invariants: Vec<String>,
    pub reduction: Option<ReductionSpec>,
    pub domain: Option<String>,
    pub out_of_scope: Option<String>,
    #[serde(default)]
    pub candidate: Vec<CandidateEntry>,
}

fn candidate(form: &str, params: &BTreeMap<String, [f64; 2]>, tag: &str) -> Result<SolutionCandidate, FixtureError> {
    let mut s = SolutionCandidate::new(CandidateForm::parse(form)?).with_provenance(tag);
    for (k, [lo, hi]) in params {
        s = s.with_param(k, *lo, *hi);
    }
    Ok(s)
}

impl Fixture {
    pub fn parse(text: &str) -> Result<Fixture, FixtureError> {
        Ok(toml::from_str(text)?)
    }

    pub fn born_infeld() -> Fixture {
        Fixture::parse(BORN_INFELD_TOML).expect("shipped fixture parses")
    }

    pub fn pde(&self) -> Result<Pde, FixtureError> {
        let spec = PdeSpec {
            lhs: self.pde.lhs.clone(),
            principal: Some(self.pde.principal.clone()),
            solved: None,
            denominator: None,
            clearing_power: None,
        };
        Ok(Pde::from_spec(&spec)?)
    }

    pub fn generators(&self) -> Result<Vec<VectorField>, FixtureError> {
        self.generator
            .iter()
            .map(|g| Ok(VectorField::parse(&g.xi1, &g.xi2, &g.eta)?))
            .collect()
    }

    pub fn labels(&self) -> Vec<String> {
        self.generator.iter().map(|g| g.label.clone()).collect()
    }

    /// Coordinate subspace spanned by the named basis vectors.
    pub fn span_of(&self, labels: &[String]) -> Result<Subspace, FixtureError> {
        let all = self.labels();
        let n = all.len();
        let vs = labels
            .iter()
            .map(|l| {
                all.iter()
                    .position(|a| a == l)
                    .map(|i| unit(n, i))
                    .ok_or_else(|| FixtureError::Label(l.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Subspace::span(&vs, n))
    }

    pub fn actions(&self) -> Result<Vec<(GroupAction, String)>, FixtureError> {
        self.action
            .iter()
            .map(|a| Ok((GroupAction::parse(a.index, &a.x, &a.t, &a.u)?, a.anchor.clone())))
            .collect()
    }

    pub fn known_solutions(&self) -> Result<Vec<(SolutionCandidate, crate::solutions::Grid)>, FixtureError> {
        self.known_solution
            .iter()
            .map(|k| {
                let grid = k.domain.parse()?;
                Ok((candidate(&k.form, &k.params, &k.label)?.with_domain(grid), grid))
            })
            .collect()
    }
}

impl TransformSpec {
    pub fn build(&self, index: usize) -> Result<PrintedTransform, FixtureError> {
        Ok(PrintedTransform::parse(index, &self.prefactor, &self.x_arg, &self.t_arg, &self.offset)?)
    }
}

impl CandidateEntry {
    pub fn build(&self) -> Result<SolutionCandidate, FixtureError> {
        candidate(&self.form, &self.params, &self.label)
    }
}

impl InvariantRow {
    pub fn ansatz(&self, generator: &VectorField) -> Result<Option<ReductionAnsatz>, FixtureError> {
        let Some(r) = &self.reduction else { return Ok(None) };
        Ok(Some(ReductionAnsatz::parse(
            generator.clone(),
            &r.y,
            &r.g,
            &r.chart_var,
            &r.chart,
            &r.note,
        )?))
    }

    pub fn invariant_exprs(&self) -> Result<Vec<crate::expr::Expr>, FixtureError> {
        self.invariants.iter().map(|s| Ok(parse(s)?)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_fixture_is_consistent() {
        let f = Fixture::born_infeld();
        assert_eq!(f.generator.len(), f.symmetry.dimension);
        assert_eq!(f.generators().unwrap(), crate::symmetry::born_infeld_generators());
        assert_eq!(f.adjoint.len(), 7);
        assert!(f.adjoint.iter().all(|m| m.rows.len() == 7 && m.rows.iter().all(|r| r.len() == 7)));
        assert_eq!(f.optimal.rep.len(), 8);
        assert_eq!(f.actions().unwrap().len(), 7);
        assert_eq!(f.known_solutions().unwrap().len(), 4);
        let pde = f.pde().unwrap();
        assert!((pde.lhs.clone() - Pde::born_infeld().lhs).is_zero());
        let from_json = Pde::from_json(BORN_INFELD_PDE).unwrap();
        assert!((from_json.lhs - pde.lhs).is_zero());
        for row in &f.invariant_row {
            for c in &row.candidate {
                c.build().unwrap();
                if let Some(target) = &c.corrects {
                    assert!(row.candidate.iter().any(|o| &o.label == target), "{target}");
                }
            }
        }
    }

    #[test]
    fn labels_map_to_coordinates() {
        let f = Fixture::born_infeld();
        let s = f.span_of(&["v1".into(), "v7".into()]).unwrap();
        assert_eq!(s.coordinate_support(), Some(vec![0, 6]));
        assert!(matches!(f.span_of(&["w9".into()]), Err(FixtureError::Label(_))));
        assert!(Fixture::parse("version = ").is_err());
    }
}
