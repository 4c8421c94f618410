//! From lattice to prediction: the analogical set, pointer counting, exact
//! outcome distributions, wave-style reports, and pointer selection.
//!
//! A homogeneous supracontext holding `a` occurrences carries `a` pointers
//! from each of its occurrences to each of its occurrences, `a²` in all. An
//! outcome with `c` occurrences in that supracontext therefore receives
//! `c · a` pointers. Probabilities are ratios of pointer counts and stay
//! exact rationals throughout.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;

use crate::bitmask::BitMask;
use crate::dataset::{compute_intersect, mask_includes, Dataset, EngineConfig, GivenContext, Outcome};
use crate::error::{Error, Result};
use crate::lattice::{evaluate, LatticeState};
use crate::rational::Rational;

/// Either a concrete outcome or the null outcome `∅` (no prediction).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Prediction {
    Outcome(Outcome),
    Null,
}

impl fmt::Display for Prediction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prediction::Outcome(o) => o.fmt(f),
            Prediction::Null => f.write_str("∅"),
        }
    }
}

/// Outcome probabilities as exact rationals, with an optional null mass.
/// Zero masses are never stored, so equal distributions compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Distribution {
    masses: BTreeMap<Outcome, Rational>,
    null: Rational,
}

impl Distribution {
    /// `{∅: 1}`.
    pub fn null_outcome() -> Self {
        Self {
            masses: BTreeMap::new(),
            null: Rational::one(),
        }
    }

    /// Normalises integer weights. All-zero weights give `{∅: 1}`.
    pub fn from_weights<I>(weights: I, null_weight: BigInt) -> Self
    where
        I: IntoIterator<Item = (Outcome, BigInt)>,
    {
        let mut raw: BTreeMap<Outcome, BigInt> = BTreeMap::new();
        for (o, w) in weights {
            *raw.entry(o).or_insert_with(BigInt::zero) += w;
        }
        let total: BigInt = raw.values().sum::<BigInt>() + &null_weight;
        if total.is_zero() {
            return Self::null_outcome();
        }
        let mut masses = BTreeMap::new();
        for (o, w) in raw {
            if !w.is_zero() {
                masses.insert(o, Rational::new(w, total.clone()));
            }
        }
        Self {
            masses,
            null: Rational::new(null_weight, total),
        }
    }

    /// Builds from already-normalised masses; zero entries are dropped.
    pub fn from_masses<I>(masses: I, null: Rational) -> Self
    where
        I: IntoIterator<Item = (Outcome, Rational)>,
    {
        let mut out = Self {
            masses: BTreeMap::new(),
            null,
        };
        for (o, p) in masses {
            out.add(&Prediction::Outcome(o), &p);
        }
        out
    }

    pub fn get(&self, outcome: &Outcome) -> Rational {
        self.masses.get(outcome).cloned().unwrap_or_else(Rational::zero)
    }

    /// Mass by outcome token; `"∅"` is not special here, use [`null_mass`].
    ///
    /// [`null_mass`]: Distribution::null_mass
    pub fn get_str(&self, token: &str) -> Rational {
        self.masses
            .iter()
            .find(|(o, _)| o.as_str() == token)
            .map(|(_, p)| p.clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn null_mass(&self) -> &Rational {
        &self.null
    }

    pub fn has_null(&self) -> bool {
        !self.null.is_zero()
    }

    /// Non-null masses in outcome order.
    pub fn iter(&self) -> impl Iterator<Item = (&Outcome, &Rational)> {
        self.masses.iter()
    }

    pub fn total(&self) -> Rational {
        self.masses.values().sum::<Rational>() + &self.null
    }

    /// Adds `mass` to one point.
    pub fn add(&mut self, point: &Prediction, mass: &Rational) {
        match point {
            Prediction::Null => self.null += mass,
            Prediction::Outcome(o) => {
                let slot = self.masses.entry(o.clone()).or_insert_with(Rational::zero);
                *slot += mass;
                if slot.is_zero() {
                    self.masses.remove(o);
                }
            }
        }
    }

    /// `self += weight · other`.
    pub fn add_scaled(&mut self, other: &Distribution, weight: &Rational) {
        for (o, p) in other.iter() {
            self.add(&Prediction::Outcome(o.clone()), &(p * weight));
        }
        self.null += &other.null * weight;
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        let mut first = true;
        for (o, p) in self.iter() {
            if !first {
                f.write_str(", ")?;
            }
            write!(f, "{o}: {p}")?;
            first = false;
        }
        if self.has_null() {
            if !first {
                f.write_str(", ")?;
            }
            write!(f, "∅: {}", self.null)?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalogicalEntry {
    pub supra: BitMask,
    pub amplitude: u64,
    /// Dataset indices of the occurrences this supracontext contains.
    pub occurrences: Vec<usize>,
    pub outcome_counts: BTreeMap<Outcome, u64>,
}

/// The occurring homogeneous supracontexts, in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AnalogicalSet {
    pub entries: Vec<AnalogicalEntry>,
}

impl AnalogicalSet {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }
}

/// Collects every cell with non-zero amplitude and recovers its members
/// from the dataset. Membership is cross-checked against the cell sums and,
/// when retained, against the include matrix.
pub fn build_analogical_set(
    lattice: &LatticeState,
    dataset: &Dataset,
    given: &GivenContext,
) -> Result<AnalogicalSet> {
    if lattice.processed() != dataset.len() {
        return Err(Error::Consistency(format!(
            "lattice has read {} occurrences but the dataset holds {}",
            lattice.processed(),
            dataset.len()
        )));
    }
    if lattice.n() != given.len() {
        return Err(Error::Consistency(format!(
            "lattice has {} variables but the given context has {}",
            lattice.n(),
            given.len()
        )));
    }
    let intersects: Vec<BitMask> = dataset
        .occurrences()
        .iter()
        .map(|o| compute_intersect(o, given))
        .collect::<Result<_>>()?;

    let mut supras: Vec<BitMask> = lattice
        .cells()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.amplitude() > 0)
        .map(|(idx, _)| BitMask::new(idx as u64, lattice.n()))
        .collect::<Result<_>>()?;
    supras.sort_by(BitMask::canonical_cmp);

    let mut entries = Vec::with_capacity(supras.len());
    for supra in supras {
        let mut occurrences = Vec::new();
        let mut outcome_counts: BTreeMap<Outcome, u64> = BTreeMap::new();
        for (i, (occ, &intersect)) in dataset.occurrences().iter().zip(&intersects).enumerate() {
            let included = mask_includes(supra, intersect)?;
            if let Some(bit) = lattice.include(i, supra) {
                if bit != included {
                    return Err(Error::Consistency(format!(
                        "include bit of occurrence {} in {supra} disagrees with its intersect",
                        i + 1
                    )));
                }
            }
            if included {
                occurrences.push(i);
                *outcome_counts.entry(occ.outcome.clone()).or_default() += 1;
            }
        }
        let amplitude = u64::from(lattice.cell(supra).amplitude());
        if occurrences.len() as u64 != amplitude {
            return Err(Error::Consistency(format!(
                "{supra} has amplitude {amplitude} but contains {} occurrences",
                occurrences.len()
            )));
        }
        entries.push(AnalogicalEntry {
            supra,
            amplitude,
            occurrences,
            outcome_counts,
        });
    }
    Ok(AnalogicalSet { entries })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointerRow {
    pub supra: BitMask,
    pub amplitude: u64,
    /// `amplitude²`.
    pub total: u64,
    /// `outcome_count · amplitude` per outcome.
    pub per_outcome: BTreeMap<Outcome, u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PointerTable {
    pub rows: Vec<PointerRow>,
}

impl PointerTable {
    pub fn total(&self) -> u64 {
        self.rows.iter().map(|r| r.total).sum()
    }

    /// Pointer counts pooled across supracontexts, by outcome.
    pub fn pooled(&self) -> BTreeMap<Outcome, u64> {
        let mut out: BTreeMap<Outcome, u64> = BTreeMap::new();
        for row in &self.rows {
            for (o, c) in &row.per_outcome {
                *out.entry(o.clone()).or_default() += c;
            }
        }
        out
    }
}

pub fn pointer_table(aset: &AnalogicalSet) -> PointerTable {
    let rows = aset
        .entries
        .iter()
        .map(|e| PointerRow {
            supra: e.supra,
            amplitude: e.amplitude,
            total: e.amplitude * e.amplitude,
            per_outcome: e
                .outcome_counts
                .iter()
                .map(|(o, c)| (o.clone(), c * e.amplitude))
                .collect(),
        })
        .collect();
    PointerTable { rows }
}

/// Probability of each outcome = its pointers / all pointers.
/// An empty table predicts `{∅: 1}`.
pub fn outcome_distribution(ptable: &PointerTable) -> Distribution {
    Distribution::from_weights(
        ptable
            .pooled()
            .into_iter()
            .map(|(o, c)| (o, BigInt::from(c))),
        BigInt::zero(),
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WaveTerm {
    pub supra: BitMask,
    pub amplitude: u64,
    /// `amplitude² / norm`.
    pub probability: Rational,
}

/// Amplitudes over the occurring homogeneous supracontexts, normed by
/// `sqrt(Σa²)`. The norm is kept as the integer `Σa²`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WaveReport {
    pub terms: Vec<WaveTerm>,
    pub norm_squared: u64,
}

impl WaveReport {
    /// ASCII ket form, e.g. `1/sqrt(14)|101> + 3/sqrt(14)|100> + 2/sqrt(14)|010>`.
    pub fn render(&self) -> String {
        self.terms
            .iter()
            .map(|t| format!("{}/sqrt({})|{}>", t.amplitude, self.norm_squared, t.supra))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

pub fn wave_report(aset: &AnalogicalSet) -> Result<WaveReport> {
    if aset.is_empty() {
        return Err(Error::EmptyAnalogicalSet);
    }
    let norm_squared: u64 = aset.entries.iter().map(|e| e.amplitude * e.amplitude).sum();
    let terms = aset
        .entries
        .iter()
        .map(|e| WaveTerm {
            supra: e.supra,
            amplitude: e.amplitude,
            probability: Rational::new(
                BigInt::from(e.amplitude * e.amplitude),
                BigInt::from(norm_squared),
            ),
        })
        .collect();
    Ok(WaveReport {
        terms,
        norm_squared,
    })
}

/// Picks one pointer uniformly from the pooled pointer multiset and reports
/// the outcome it points to. An empty table yields `∅`.
pub fn select_pointer<R: Rng + ?Sized>(ptable: &PointerTable, rng: &mut R) -> Prediction {
    let total = ptable.total();
    if total == 0 {
        return Prediction::Null;
    }
    let mut draw = rng.random_range(0..total);
    for row in &ptable.rows {
        for (o, c) in &row.per_outcome {
            if draw < *c {
                return Prediction::Outcome(o.clone());
            }
            draw -= c;
        }
    }
    unreachable!("pointer counts sum to the table total")
}

/// `Σ p²`: the chance two independent draws agree in outcome.
pub fn agreement(dist: &Distribution) -> Result<Rational> {
    if dist.has_null() {
        return Err(Error::NullMass);
    }
    Ok(dist.iter().map(|(_, p)| p * p).sum())
}

/// `1 − Σ p²`.
pub fn disagreement(dist: &Distribution) -> Result<Rational> {
    Ok(Rational::one() - agreement(dist)?)
}

/// Everything computed for one prediction.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub lattice: LatticeState,
    pub analogical_set: AnalogicalSet,
    pub pointers: PointerTable,
    pub distribution: Distribution,
}

impl Analysis {
    /// `None` when the analogical set is empty.
    pub fn wave(&self) -> Option<WaveReport> {
        wave_report(&self.analogical_set).ok()
    }
}

/// Evaluates the lattice and carries it through to an outcome distribution.
pub fn analyze(dataset: &Dataset, given: &GivenContext, cfg: &EngineConfig) -> Result<Analysis> {
    let lattice = evaluate(dataset, given, cfg)?;
    let analogical_set = build_analogical_set(&lattice, dataset, given)?;
    let pointers = pointer_table(&analogical_set);
    let distribution = outcome_distribution(&pointers);
    Ok(Analysis {
        lattice,
        analogical_set,
        pointers,
        distribution,
    })
}

/// Only the distribution, skipping the include matrix.
pub fn predict_distribution(dataset: &Dataset, given: &GivenContext, cfg: &EngineConfig) -> Result<Distribution> {
    let cfg = EngineConfig {
        retain_include_matrix: false,
        ..cfg.clone()
    };
    Ok(analyze(dataset, given, &cfg)?.distribution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::ratio;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn m(s: &str) -> BitMask {
        s.parse().unwrap()
    }

    fn o(s: &str) -> Outcome {
        Outcome::new(s).unwrap()
    }

    fn entry(mask: &str, counts: &[(&str, u64)]) -> AnalogicalEntry {
        let outcome_counts: BTreeMap<Outcome, u64> =
            counts.iter().map(|(k, c)| (o(k), *c)).collect();
        let amplitude = outcome_counts.values().sum();
        AnalogicalEntry {
            supra: m(mask),
            amplitude,
            occurrences: (0..amplitude as usize).collect(),
            outcome_counts,
        }
    }

    fn ceiling_set() -> AnalogicalSet {
        AnalogicalSet {
            entries: vec![
                entry("101", &[("s", 1)]),
                entry("100", &[("s", 3)]),
                entry("010", &[("k", 1), ("ch", 1)]),
            ],
        }
    }

    fn worked() -> Analysis {
        analyze(
            &fixtures::dataset_312(),
            &fixtures::given_312(),
            &EngineConfig::default(),
        )
        .unwrap()
    }

    type EntrySummary = (String, u64, Vec<(String, u64)>);

    #[test]
    fn analogical_set_of_worked_example() {
        let a = worked();
        let got: Vec<EntrySummary> = a
            .analogical_set
            .entries
            .iter()
            .map(|e| {
                (
                    e.supra.to_string(),
                    e.amplitude,
                    e.outcome_counts
                        .iter()
                        .map(|(o, c)| (o.to_string(), *c))
                        .collect(),
                )
            })
            .collect();
        let want = vec![
            ("110".to_string(), 2, vec![("e".to_string(), 1), ("r".to_string(), 1)]),
            ("011".to_string(), 1, vec![("r".to_string(), 1)]),
            ("100".to_string(), 2, vec![("e".to_string(), 1), ("r".to_string(), 1)]),
            ("001".to_string(), 2, vec![("r".to_string(), 2)]),
        ];
        assert_eq!(got, want);
        assert_eq!(a.analogical_set.entries[0].occurrences, vec![0, 4]);
    }

    #[test]
    fn pointer_table_of_worked_example() {
        let t = worked().pointers;
        let rows: Vec<(String, u64, u64, u64)> = t
            .rows
            .iter()
            .map(|r| {
                (
                    r.supra.to_string(),
                    r.total,
                    r.per_outcome.get(&o("e")).copied().unwrap_or(0),
                    r.per_outcome.get(&o("r")).copied().unwrap_or(0),
                )
            })
            .collect();
        assert_eq!(
            rows,
            vec![
                ("110".into(), 4, 2, 2),
                ("011".into(), 1, 0, 1),
                ("100".into(), 4, 2, 2),
                ("001".into(), 4, 0, 4),
            ]
        );
    }

    #[test]
    fn worked_distribution_is_exact() {
        let d = worked().distribution;
        assert_eq!(d.get(&o("e")), ratio(4, 13));
        assert_eq!(d.get(&o("r")), ratio(9, 13));
        assert!(!d.has_null());
        assert_eq!(d.total(), Rational::one());
    }

    #[test]
    fn ceiling_pointers_and_distribution() {
        let t = pointer_table(&ceiling_set());
        let totals: Vec<u64> = t.rows.iter().map(|r| r.total).collect();
        assert_eq!(totals, [1, 9, 4]);
        let d = outcome_distribution(&t);
        assert_eq!(d.get(&o("s")), ratio(10, 14));
        assert_eq!(d.get(&o("k")), ratio(2, 14));
        assert_eq!(d.get(&o("ch")), ratio(2, 14));
    }

    #[test]
    fn ceiling_wave() {
        let w = wave_report(&ceiling_set()).unwrap();
        assert_eq!(w.norm_squared, 14);
        let probs: Vec<Rational> = w.terms.iter().map(|t| t.probability.clone()).collect();
        assert_eq!(probs, [ratio(1, 14), ratio(9, 14), ratio(4, 14)]);
        assert_eq!(w.render(), "1/sqrt(14)|101> + 3/sqrt(14)|100> + 2/sqrt(14)|010>");
    }

    #[test]
    fn wave_of_worked_and_single() {
        let w = worked().wave().unwrap();
        let probs: Vec<Rational> = w.terms.iter().map(|t| t.probability.clone()).collect();
        assert_eq!(probs, [ratio(4, 13), ratio(1, 13), ratio(4, 13), ratio(4, 13)]);
        let single = AnalogicalSet {
            entries: vec![entry("1", &[("x", 5)])],
        };
        assert_eq!(wave_report(&single).unwrap().terms[0].probability, Rational::one());
        assert_eq!(wave_report(&AnalogicalSet::default()), Err(Error::EmptyAnalogicalSet));
    }

    #[test]
    fn empty_dataset_predicts_null() {
        let a = analyze(&Dataset::empty(), &fixtures::given_312(), &EngineConfig::default()).unwrap();
        assert!(a.analogical_set.is_empty());
        assert_eq!(a.distribution, Distribution::null_outcome());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(select_pointer(&a.pointers, &mut rng), Prediction::Null);
    }

    #[test]
    fn deterministic_dataset_keeps_every_occupied_supracontext() {
        let ds = Dataset::parse("3 1 0 r\n0 3 2 r\n2 1 0 r\n").unwrap();
        let a = analyze(&ds, &fixtures::given_312(), &EngineConfig::default()).unwrap();
        let occupied = a.lattice.cells().iter().filter(|c| c.sum() > 0).count();
        assert_eq!(a.analogical_set.len(), occupied);
    }

    #[test]
    fn mismatched_lattice_is_rejected() {
        let a = worked();
        let shorter = fixtures::dataset_312().select(|i| i < 4);
        assert!(matches!(
            build_analogical_set(&a.lattice, &shorter, &fixtures::given_312()),
            Err(Error::Consistency(_))
        ));
    }

    #[test]
    fn single_outcome_table_always_selects_it() {
        let t = pointer_table(&AnalogicalSet {
            entries: vec![entry("10", &[("r", 3)]), entry("00", &[("r", 1)])],
        });
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            assert_eq!(select_pointer(&t, &mut rng), Prediction::Outcome(o("r")));
        }
    }

    #[test]
    fn selection_frequency_tracks_pointers() {
        let t = worked().pointers;
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let e = (0..13_000)
            .filter(|_| select_pointer(&t, &mut rng) == Prediction::Outcome(o("e")))
            .count() as i64;
        // mean 4000, sd ~ 52.6
        assert!((e - 4000).abs() <= 300, "e drawn {e} times");
    }

    #[test]
    fn agreement_examples() {
        let d = worked().distribution;
        assert_eq!(agreement(&d).unwrap(), ratio(97, 169));
        assert_eq!(disagreement(&d).unwrap(), ratio(72, 169));
        let det = Distribution::from_weights([(o("x"), BigInt::from(3))], BigInt::zero());
        assert_eq!(agreement(&det).unwrap(), Rational::one());
        assert_eq!(disagreement(&det).unwrap(), Rational::zero());
        let uniform = Distribution::from_weights(
            [(o("a"), BigInt::one()), (o("b"), BigInt::one())],
            BigInt::zero(),
        );
        assert_eq!(agreement(&uniform).unwrap(), ratio(1, 2));
        assert_eq!(agreement(&Distribution::null_outcome()), Err(Error::NullMass));
    }

    #[test]
    fn distribution_drops_zero_masses() {
        let d = Distribution::from_weights(
            [(o("a"), BigInt::zero()), (o("b"), BigInt::from(2))],
            BigInt::zero(),
        );
        assert_eq!(d.iter().count(), 1);
        assert_eq!(d.to_string(), "{b: 1}");
        let mut acc = Distribution::default();
        acc.add_scaled(&Distribution::null_outcome(), &ratio(1, 2));
        acc.add_scaled(&d, &ratio(1, 2));
        assert_eq!(acc.to_string(), "{b: 1/2, ∅: 1/2}");
    }
}
