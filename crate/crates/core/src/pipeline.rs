//! Enumeration and classification assembled into a report.

use thiserror::Error;

use crate::classify::{classify_all, classify_with, pool_factorizations, span_analysis, ClassifyError};
use crate::commutant::{
    commutant_basis, enumerate_invariants, twist_sparsity, verify_invariant, CommutantError, CouplingMatrix,
    EnumerationOptions, Rejection,
};
use crate::modular::ModularData;
use crate::report::{
    classification_entry, enumeration_summary, invariant_entries, relation_summary, Report,
};

#[derive(Clone, Debug, PartialEq)]
pub enum Target {
    Index(usize),
    Matrix(Vec<Vec<i64>>),
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Commutant(#[from] CommutantError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error("given matrix is not a modular invariant: {0}")]
    Rejected(Rejection),
    #[error("invariant index {index} out of range ({count} invariants)")]
    IndexOutOfRange { index: usize, count: usize },
}

pub struct Outcome {
    pub report: Report,
    /// False when the node budget ran out.
    pub complete: bool,
}

/// Enumerates the invariants and, when `classify` is set, classifies the
/// whole pool or the single `target`.
pub fn run(md: &ModularData, opts: &EnumerationOptions, classify: bool, target: Option<&Target>) -> Result<Outcome, PipelineError> {
    let given = match target {
        Some(Target::Matrix(m)) => Some(verify_invariant(md, m).map_err(PipelineError::Rejected)?),
        _ => None,
    };
    let basis = commutant_basis(md, &twist_sparsity(md.ring()))?;
    let mut report = Report::new(md);
    let (pool, nodes, complete) = match enumerate_invariants(md, &basis, opts) {
        Ok(en) => (en.invariants, en.nodes, true),
        Err(CommutantError::BudgetExhausted { budget, partial }) => (partial, budget, false),
        Err(e) => return Err(e.into()),
    };
    report.enumeration = Some(enumeration_summary(&basis, opts, nodes, complete));
    report.invariants = invariant_entries(&pool);
    report.relations = Some(relation_summary(&span_analysis(&pool)));
    if !classify || !complete {
        return Ok(Outcome { report, complete });
    }
    report.classifications = match (target, given) {
        (None, _) => {
            let cls = classify_all(md, &pool)?;
            pool.iter().zip(&cls).enumerate().map(|(i, (z, c))| classification_entry(Some(i), z, c)).collect()
        }
        (Some(Target::Index(i)), _) => {
            let z = pool.get(*i).ok_or(PipelineError::IndexOutOfRange { index: *i, count: pool.len() })?;
            vec![classify_one(md, &pool, z, Some(*i))?]
        }
        (Some(Target::Matrix(_)), Some(z)) => {
            let own = pool.iter().position(|p| p.z == z.z);
            vec![classify_one(md, &pool, &z, own)?]
        }
        (Some(Target::Matrix(_)), None) => unreachable!("matrix targets are verified above"),
    };
    Ok(Outcome { report, complete })
}

fn classify_one(
    md: &ModularData,
    pool: &[CouplingMatrix],
    z: &CouplingMatrix,
    own: Option<usize>,
) -> Result<crate::report::ClassificationEntry, PipelineError> {
    let facts = pool_factorizations(md, pool)?;
    let c = classify_with(md, pool, &facts, z, own)?;
    Ok(classification_entry(own, z, &c))
}

/// Reads a matrix file: either `[[..], ..]` or `{"matrix": [[..], ..]}`.
pub fn parse_matrix(text: &str) -> Result<Vec<Vec<i64>>, serde_json::Error> {
    #[derive(serde::Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Bare(Vec<Vec<i64>>),
        Wrapped { matrix: Vec<Vec<i64>> },
    }
    Ok(match serde_json::from_str(text)? {
        Repr::Bare(m) | Repr::Wrapped { matrix: m } => m,
    })
}
