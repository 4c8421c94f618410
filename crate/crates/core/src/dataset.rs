//! Domain types: outcomes, occurrences, datasets, given contexts, and the
//! intersect/inclusion algebra over them.

use std::fmt;

use crate::bitmask::{check_widths, BitMask};
use crate::error::{Error, Result, Violation};

/// Largest variable count a lattice can be built for, whatever the config says.
pub const LATTICE_MAX_VARS: usize = 30;

/// An outcome token such as `e` or `r`. Never empty.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Outcome(String);

impl Outcome {
    pub fn new(token: impl Into<String>) -> Result<Self> {
        let token = token.into();
        if token.is_empty() {
            return Err(Error::Consistency("outcome token must be non-empty".into()));
        }
        Ok(Self(token))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// One stored exemplar: variable tokens plus its outcome.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Occurrence {
    pub vars: Vec<String>,
    pub outcome: Outcome,
}

impl Occurrence {
    pub fn new<S: Into<String>>(vars: impl IntoIterator<Item = S>, outcome: Outcome) -> Self {
        Self {
            vars: vars.into_iter().map(Into::into).collect(),
            outcome,
        }
    }

    /// Parses `"3 1 0 e"`: whitespace-separated tokens, last one is the outcome.
    pub fn parse(line: &str) -> Result<Self> {
        let mut tokens: Vec<&str> = line.split_whitespace().collect();
        let outcome = tokens.pop().ok_or_else(|| Error::Parse {
            line: 0,
            message: "empty occurrence".into(),
        })?;
        Ok(Self::new(tokens, Outcome::new(outcome)?))
    }
}

impl fmt::Display for Occurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.vars {
            write!(f, "{v} ")?;
        }
        write!(f, "{}", self.outcome)
    }
}

/// An ordered collection of occurrences.
///
/// The declared arity is `None` only for an empty dataset read from a file,
/// where nothing fixes it; validation then defers to the given context.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Dataset {
    arity: Option<usize>,
    occurrences: Vec<Occurrence>,
}

impl Dataset {
    pub fn new(arity: usize, occurrences: Vec<Occurrence>) -> Self {
        Self {
            arity: Some(arity),
            occurrences,
        }
    }

    /// Takes the arity from the first occurrence.
    pub fn from_occurrences(occurrences: Vec<Occurrence>) -> Self {
        Self {
            arity: occurrences.first().map(|o| o.vars.len()),
            occurrences,
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn arity(&self) -> Option<usize> {
        self.arity
    }

    pub fn occurrences(&self) -> &[Occurrence] {
        &self.occurrences
    }

    pub fn len(&self) -> usize {
        self.occurrences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occurrences.is_empty()
    }

    /// Keeps the occurrences whose index satisfies `keep`, preserving order.
    pub fn select<F: FnMut(usize) -> bool>(&self, mut keep: F) -> Self {
        Self {
            arity: self.arity,
            occurrences: self
                .occurrences
                .iter()
                .enumerate()
                .filter(|(i, _)| keep(*i))
                .map(|(_, o)| o.clone())
                .collect(),
        }
    }

    /// Parses the line-oriented dataset format: one occurrence per line,
    /// whitespace-separated variable tokens followed by the outcome token.
    /// `#` starts a comment; blank lines are skipped. Arity mismatches
    /// between lines are left for [`validate`] to report.
    pub fn parse(text: &str) -> Result<Self> {
        let mut occurrences = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let occ = Occurrence::parse(line).map_err(|e| Error::Parse {
                line: lineno + 1,
                message: e.to_string(),
            })?;
            occurrences.push(occ);
        }
        Ok(Self::from_occurrences(occurrences))
    }
}

impl FromIterator<Occurrence> for Dataset {
    fn from_iter<T: IntoIterator<Item = Occurrence>>(iter: T) -> Self {
        Self::from_occurrences(iter.into_iter().collect())
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(at) => &line[..at],
        None => line,
    }
}

/// The variable vector whose outcome is being predicted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GivenContext {
    pub vars: Vec<String>,
}

impl GivenContext {
    pub fn new<S: Into<String>>(vars: impl IntoIterator<Item = S>) -> Self {
        Self {
            vars: vars.into_iter().map(Into::into).collect(),
        }
    }

    /// Whitespace-separated tokens, e.g. `"3 1 2"`. Comments and blank
    /// lines are ignored so a one-line file can be passed verbatim.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(|l| strip_comment(l).trim())
            .filter(|l| !l.is_empty());
        let first = lines.next().unwrap_or("");
        if lines.next().is_some() {
            return Err(Error::Parse {
                line: 2,
                message: "given context must be a single line".into(),
            });
        }
        Ok(Self::new(first.split_whitespace()))
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }
}

impl fmt::Display for GivenContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.vars.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineConfig {
    /// Largest variable count accepted; the lattice holds `2^max_vars` cells.
    pub max_vars: usize,
    /// Keep the per-occurrence include bits for later audit.
    pub retain_include_matrix: bool,
    pub seed: u64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            max_vars: 24,
            retain_include_matrix: true,
            seed: 0,
        }
    }
}

impl EngineConfig {
    pub fn check(&self) -> Result<()> {
        match self.violation() {
            Some(v) => Err(Error::Validation(vec![v])),
            None => Ok(()),
        }
    }

    fn violation(&self) -> Option<Violation> {
        if self.max_vars == 0 {
            Some(Violation::Config("max_vars must be at least 1".into()))
        } else if self.max_vars > LATTICE_MAX_VARS {
            Some(Violation::Config(format!(
                "max_vars {} exceeds the supported maximum of {LATTICE_MAX_VARS}",
                self.max_vars
            )))
        } else {
            None
        }
    }

    pub(crate) fn check_capacity(&self, n: usize) -> Result<()> {
        self.check()?;
        if n > self.max_vars {
            return Err(Error::Capacity(
                Violation::Capacity {
                    n,
                    max_vars: self.max_vars,
                }
                .to_string(),
            ));
        }
        Ok(())
    }
}

/// Bit `i` is set iff the occurrence agrees with the given context at variable `i`.
pub fn compute_intersect(occ: &Occurrence, given: &GivenContext) -> Result<BitMask> {
    if occ.vars.len() != given.vars.len() {
        return Err(Error::Validation(vec![Violation::OccurrenceArity {
            occurrence: 0,
            expected: given.vars.len(),
            found: occ.vars.len(),
        }]));
    }
    BitMask::from_flags(occ.vars.iter().zip(&given.vars).map(|(a, b)| a == b))
}

/// True iff the supracontext only constrains variables the intersect matches.
pub fn mask_includes(supra: BitMask, intersect: BitMask) -> Result<bool> {
    check_widths(supra, intersect)?;
    Ok(supra.bits() & !intersect.bits() == 0)
}

/// All `2^n` supracontexts in canonical order (see [`BitMask::canonical_cmp`]).
pub fn enumerate_supracontexts(n: usize, cfg: &EngineConfig) -> Result<Vec<BitMask>> {
    cfg.check_capacity(n)?;
    Ok(canonical_order(n))
}

pub(crate) fn canonical_order(n: usize) -> Vec<BitMask> {
    let mut masks: Vec<BitMask> = (0..1u64 << n).map(|b| BitMask::from_raw(b, n)).collect();
    masks.sort_by(BitMask::canonical_cmp);
    masks
}

/// Collects every problem with the inputs; an empty list means they are usable.
pub fn validate(dataset: &Dataset, given: &GivenContext, cfg: &EngineConfig) -> Vec<Violation> {
    let mut out = Vec::new();
    if let Some(v) = cfg.violation() {
        out.push(v);
    }
    let n = given.len();
    for (position, tok) in given.vars.iter().enumerate() {
        if tok.is_empty() {
            out.push(Violation::EmptyGivenToken { position });
        }
    }
    let reference = match dataset.arity() {
        Some(arity) if arity != n => {
            out.push(Violation::DatasetArity {
                expected: n,
                found: arity,
            });
            arity
        }
        _ => n,
    };
    for (i, occ) in dataset.occurrences().iter().enumerate() {
        if occ.vars.len() != reference {
            out.push(Violation::OccurrenceArity {
                occurrence: i,
                expected: reference,
                found: occ.vars.len(),
            });
        }
        for (position, tok) in occ.vars.iter().enumerate() {
            if tok.is_empty() {
                out.push(Violation::EmptyToken {
                    occurrence: i,
                    position,
                });
            }
        }
    }
    if n > cfg.max_vars.min(LATTICE_MAX_VARS) {
        out.push(Violation::Capacity {
            n,
            max_vars: cfg.max_vars.min(LATTICE_MAX_VARS),
        });
    }
    out
}

/// [`validate`] folded into a `Result`.
pub fn ensure_valid(dataset: &Dataset, given: &GivenContext, cfg: &EngineConfig) -> Result<()> {
    let violations = validate(dataset, given, cfg);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::from_violations(violations))
    }
}
