//! Independent homogeneity classifications used to cross-check the lattice.
//!
//! Neither classifier looks at the lattice registers. The direct one applies
//! the definition (deterministic, or non-deterministic within a single
//! subcontext); the other compares disagreement of the whole supracontext
//! against the sum over its subcontexts.

use std::collections::BTreeMap;
use std::fmt;

use crate::bitmask::BitMask;
use crate::dataset::{
    compute_intersect, ensure_valid, mask_includes, Dataset, EngineConfig, GivenContext, Outcome,
    LATTICE_MAX_VARS,
};
use crate::error::{Error, Result};
use crate::lattice::evaluate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    Empty,
    DeterministicHomogeneous,
    NonDeterministicHomogeneous,
    Heterogeneous,
}

impl Classification {
    pub fn is_heterogeneous(self) -> bool {
        self == Classification::Heterogeneous
    }

    pub fn is_empty(self) -> bool {
        self == Classification::Empty
    }

    pub fn label(self) -> &'static str {
        match self {
            Classification::Empty => "empty",
            Classification::DeterministicHomogeneous => "deterministic",
            Classification::NonDeterministicHomogeneous => "non-deterministic",
            Classification::Heterogeneous => "heterogeneous",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// The occurrences a supracontext contains, as (intersect, outcome) pairs.
fn members<'a>(
    supra: BitMask,
    dataset: &'a Dataset,
    given: &GivenContext,
) -> Result<Vec<(BitMask, &'a Outcome)>> {
    let cfg = EngineConfig {
        max_vars: LATTICE_MAX_VARS,
        ..EngineConfig::default()
    };
    ensure_valid(dataset, given, &cfg)?;
    if supra.width() != given.len() {
        return Err(Error::WidthMismatch {
            left: supra.width(),
            right: given.len(),
        });
    }
    let mut out = Vec::new();
    for occ in dataset.occurrences() {
        let intersect = compute_intersect(occ, given)?;
        if mask_includes(supra, intersect)? {
            out.push((intersect, &occ.outcome));
        }
    }
    Ok(out)
}

fn classify_by_occupancy(members: &[(BitMask, &Outcome)]) -> Classification {
    let first = match members.first() {
        None => return Classification::Empty,
        Some(first) => first,
    };
    if members.iter().all(|(_, o)| *o == first.1) {
        Classification::DeterministicHomogeneous
    } else if members.iter().all(|(i, _)| *i == first.0) {
        Classification::NonDeterministicHomogeneous
    } else {
        Classification::Heterogeneous
    }
}

/// Classifies by definition from the occurrences the supracontext contains.
pub fn classify_direct(supra: BitMask, dataset: &Dataset, given: &GivenContext) -> Result<Classification> {
    Ok(classify_by_occupancy(&members(supra, dataset, given)?))
}

/// Ordered pairs `(i, j)`, `i != j`, whose outcomes differ.
pub fn disagreeing_pairs<'a, I>(outcomes: I) -> u64
where
    I: IntoIterator<Item = &'a Outcome>,
{
    let mut counts: BTreeMap<&Outcome, u64> = BTreeMap::new();
    for o in outcomes {
        *counts.entry(o).or_default() += 1;
    }
    let total: u64 = counts.values().sum();
    total * total - counts.values().map(|c| c * c).sum::<u64>()
}

/// Whole-supracontext and summed per-subcontext disagreement.
pub fn disagreement_split(supra: BitMask, dataset: &Dataset, given: &GivenContext) -> Result<(u64, u64)> {
    let members = members(supra, dataset, given)?;
    let whole = disagreeing_pairs(members.iter().map(|(_, o)| *o));
    let mut parts: BTreeMap<u64, Vec<&Outcome>> = BTreeMap::new();
    for (intersect, outcome) in &members {
        parts.entry(intersect.bits()).or_default().push(outcome);
    }
    let split = parts
        .values()
        .map(|p| disagreeing_pairs(p.iter().copied()))
        .sum();
    Ok((whole, split))
}

/// Heterogeneous iff splitting into subcontexts (by intersect) loses
/// disagreement; otherwise classified by occupancy and outcome count.
pub fn classify_by_disagreement(
    supra: BitMask,
    dataset: &Dataset,
    given: &GivenContext,
) -> Result<Classification> {
    let members = members(supra, dataset, given)?;
    let (whole, split) = disagreement_split(supra, dataset, given)?;
    if whole > split {
        return Ok(Classification::Heterogeneous);
    }
    let first = match members.first() {
        None => return Ok(Classification::Empty),
        Some(f) => f.1,
    };
    Ok(if members.iter().all(|(_, o)| *o == first) {
        Classification::DeterministicHomogeneous
    } else {
        Classification::NonDeterministicHomogeneous
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossCheckRow {
    pub supra: BitMask,
    pub direct: Classification,
    pub by_disagreement: Classification,
    pub whole_disagreement: u64,
    pub split_disagreement: u64,
    pub lattice_sum: u32,
    pub lattice_hetero: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub supra: BitMask,
    pub what: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossCheckReport {
    pub rows: Vec<CrossCheckRow>,
    pub mismatches: Vec<Mismatch>,
}

impl CrossCheckReport {
    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Runs both classifiers and the lattice on every supracontext and lists
/// every place they disagree.
pub fn cross_check(dataset: &Dataset, given: &GivenContext, cfg: &EngineConfig) -> Result<CrossCheckReport> {
    let lattice = evaluate(dataset, given, cfg)?;
    let mut rows = Vec::new();
    let mut mismatches = Vec::new();
    for supra in lattice.canonical_masks() {
        let direct = classify_direct(supra, dataset, given)?;
        let by_disagreement = classify_by_disagreement(supra, dataset, given)?;
        let (whole, split) = disagreement_split(supra, dataset, given)?;
        let cell = lattice.cell(supra);
        let mut flag = |what: String| mismatches.push(Mismatch { supra, what });
        if direct != by_disagreement {
            flag(format!("direct says {direct}, disagreement says {by_disagreement}"));
        }
        if direct.is_heterogeneous() != cell.hetero() {
            flag(format!("direct says {direct}, lattice hetero = {}", cell.hetero()));
        }
        if direct.is_empty() != (cell.sum() == 0) {
            flag(format!("direct says {direct}, lattice sum = {}", cell.sum()));
        }
        rows.push(CrossCheckRow {
            supra,
            direct,
            by_disagreement,
            whole_disagreement: whole,
            split_disagreement: split,
            lattice_sum: cell.sum(),
            lattice_hetero: cell.hetero(),
        });
    }
    Ok(CrossCheckReport { rows, mismatches })
}
