//! Natural statistics under imperfect memory.
//!
//! Each stored occurrence is independently accessible with probability `r`.
//! Every quantity here is either an exact expectation over all `2^m`
//! memory subsets (each weighted `r^k (1-r)^(m-k)` for `k` remembered) or a
//! Monte Carlo estimate over sampled subsets. Both are reported as exact
//! rationals; Monte Carlo values are exact ratios of sample tallies.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Pow, Zero};
use rand::Rng;

use crate::dataset::{ensure_valid, Dataset, EngineConfig, GivenContext, Outcome};
use crate::error::{Error, Result};
use crate::predict::{predict_distribution, Distribution};
use crate::rational::Rational;

/// Subset enumeration stops here unless the caller raises it.
pub const DEFAULT_ENUMERATION_CAP: usize = 20;

/// Independent retention probability for each occurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemoryModel {
    r: Ratio<u64>,
}

impl Default for MemoryModel {
    fn default() -> Self {
        Self::half()
    }
}

impl MemoryModel {
    pub fn new(r: Ratio<u64>) -> Result<Self> {
        if r > Ratio::one() {
            return Err(Error::Consistency(format!("retention probability {r} exceeds 1")));
        }
        Ok(Self { r })
    }

    pub fn half() -> Self {
        Self { r: Ratio::new(1, 2) }
    }

    pub fn perfect() -> Self {
        Self { r: Ratio::one() }
    }

    pub fn r(&self) -> Ratio<u64> {
        self.r
    }

    /// One Bernoulli(r) draw, realised exactly as a uniform integer below the denominator.
    pub fn remembers<R: Rng + ?Sized>(&self, rng: &mut R) -> bool {
        rng.random_range(0..*self.r.denom()) < *self.r.numer()
    }

    /// Numerator of the weight of a subset keeping `kept` of `total`
    /// occurrences; the common denominator is `den^total`.
    fn weight_numer(&self, kept: usize, total: usize) -> BigInt {
        let a = BigInt::from(*self.r.numer());
        let b_minus_a = BigInt::from(*self.r.denom() - *self.r.numer());
        Pow::pow(a, kept as u32) * Pow::pow(b_minus_a, (total - kept) as u32)
    }

    fn weight_denom(&self, total: usize) -> BigInt {
        Pow::pow(BigInt::from(*self.r.denom()), total as u32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    MonteCarlo { trials: u64 },
}

impl Mode {
    pub fn label(&self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::MonteCarlo { .. } => "monte-carlo",
        }
    }
}

fn check_cap(m: usize, cap: usize) -> Result<()> {
    if m > cap || m >= 64 {
        return Err(Error::Capacity(format!(
            "{m} occurrences exceeds the exact enumeration cap of {cap}; use Monte Carlo mode"
        )));
    }
    Ok(())
}

/// Indices kept by one memory draw, in order.
pub fn sample_indices<R: Rng + ?Sized>(m: usize, model: &MemoryModel, rng: &mut R) -> Vec<usize> {
    (0..m).filter(|_| model.remembers(rng)).collect()
}

/// Keeps each occurrence independently with probability `r`, preserving order.
pub fn sample_memory<R: Rng + ?Sized>(dataset: &Dataset, model: &MemoryModel, rng: &mut R) -> Dataset {
    let kept = sample_indices(dataset.len(), model, rng);
    let mut it = kept.into_iter().peekable();
    dataset.select(|i| {
        if it.peek() == Some(&i) {
            it.next();
            true
        } else {
            false
        }
    })
}

/// Relative frequency of each outcome; `{∅: 1}` for an empty list.
pub fn relative_frequency_estimate(outcomes: &[Outcome]) -> Distribution {
    Distribution::from_weights(outcomes.iter().map(|o| (o.clone(), BigInt::one())), BigInt::zero())
}

/// Parses whitespace-separated outcome tokens.
pub fn parse_outcomes(text: &str) -> Result<Vec<Outcome>> {
    text.split_whitespace().map(Outcome::new).collect()
}

/// Probability of each outcome being (or tying for) the most frequent among
/// the remembered occurrences. Ties split the subset's weight equally; the
/// empty subset contributes to `∅`.
pub type DecisionDistribution = Distribution;

struct Interned {
    table: Vec<Outcome>,
    ids: Vec<usize>,
}

fn intern(outcomes: &[Outcome]) -> Interned {
    let mut table: Vec<Outcome> = Vec::new();
    let ids = outcomes
        .iter()
        .map(|o| match table.iter().position(|t| t == o) {
            Some(i) => i,
            None => {
                table.push(o.clone());
                table.len() - 1
            }
        })
        .collect();
    Interned { table, ids }
}

/// Bitset over outcome ids of those tied for the highest count. Zero for an
/// empty subset.
fn winners(counts: &[u32]) -> u64 {
    let best = counts.iter().copied().max().unwrap_or(0);
    if best == 0 {
        return 0;
    }
    counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c == best)
        .fold(0u64, |acc, (i, _)| acc | 1 << i)
}

/// Visits every subset of `m` items in Gray-code order, handing the callback
/// the item toggled in (`true`) or out (`false`) before each visit after the
/// first (the empty subset).
fn for_each_subset<F: FnMut(Option<(usize, bool)>)>(m: usize, mut visit: F) {
    visit(None);
    let mut gray = 0u64;
    for i in 1..1u64 << m {
        let next = i ^ (i >> 1);
        let flipped = (gray ^ next).trailing_zeros() as usize;
        gray = next;
        visit(Some((flipped, gray >> flipped & 1 == 1)));
    }
}

fn decision_from_tally(
    table: &[Outcome],
    tally: impl IntoIterator<Item = (u64, BigInt)>,
) -> DecisionDistribution {
    // every weight is scaled by lcm(1..=k) so tie splits stay integral
    let lcm = (1..=table.len().max(1) as u64).fold(BigInt::one(), |acc, x| acc.lcm(&BigInt::from(x)));
    let mut weights: Vec<BigInt> = vec![BigInt::zero(); table.len()];
    let mut null = BigInt::zero();
    for (win, w) in tally {
        if win == 0 {
            null += w * &lcm;
            continue;
        }
        let share = &lcm / win.count_ones();
        for (id, slot) in weights.iter_mut().enumerate() {
            if win >> id & 1 == 1 {
                *slot += &w * &share;
            }
        }
    }
    Distribution::from_weights(table.iter().cloned().zip(weights), null)
}

/// Exact enumeration over all `2^m` memory subsets.
pub fn exact_decision_distribution(
    outcomes: &[Outcome],
    model: &MemoryModel,
    cap: usize,
) -> Result<DecisionDistribution> {
    let m = outcomes.len();
    check_cap(m, cap)?;
    let Interned { table, ids } = intern(outcomes);
    if table.len() > 63 {
        return Err(Error::Capacity("more than 63 distinct outcomes".into()));
    }

    let mut counts = vec![0u32; table.len()];
    let mut size = 0usize;
    let mut tally: HashMap<(usize, u64), u64> = HashMap::new();
    for_each_subset(m, |step| {
        if let Some((item, added)) = step {
            if added {
                counts[ids[item]] += 1;
                size += 1;
            } else {
                counts[ids[item]] -= 1;
                size -= 1;
            }
        }
        *tally.entry((size, winners(&counts))).or_default() += 1;
    });

    let weighted = tally
        .into_iter()
        .map(|((size, win), n)| (win, model.weight_numer(size, m) * n));
    Ok(decision_from_tally(&table, weighted))
}

/// Monte Carlo estimate of [`exact_decision_distribution`].
pub fn monte_carlo_decision_distribution<R: Rng + ?Sized>(
    outcomes: &[Outcome],
    model: &MemoryModel,
    trials: u64,
    rng: &mut R,
) -> Result<DecisionDistribution> {
    if trials == 0 {
        return Err(Error::Undefined("Monte Carlo needs at least one trial".into()));
    }
    let Interned { table, ids } = intern(outcomes);
    if table.len() > 63 {
        return Err(Error::Capacity("more than 63 distinct outcomes".into()));
    }
    let mut tally: HashMap<u64, u64> = HashMap::new();
    let mut counts = vec![0u32; table.len()];
    for _ in 0..trials {
        counts.iter_mut().for_each(|c| *c = 0);
        for &id in &ids {
            if model.remembers(rng) {
                counts[id] += 1;
            }
        }
        *tally.entry(winners(&counts)).or_default() += 1;
    }
    Ok(decision_from_tally(
        &table,
        tally.into_iter().map(|(w, n)| (w, BigInt::from(n))),
    ))
}

/// Estimator statistics for the probability of one target outcome,
/// conditioned on at least one occurrence being remembered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarianceReport {
    pub target: Outcome,
    /// Number of data occurrences.
    pub n: usize,
    pub mode: Mode,
    /// Relative frequency of the target in the full data.
    pub frequency: Rational,
    /// Probability (or observed fraction) of a non-empty memory subset.
    pub p_nonempty: Rational,
    pub e_p: Rational,
    pub empirical_var: Rational,
    /// `E(n/m)` over non-empty subsets.
    pub e_n_over_m: Rational,
    /// `1/(n-1) · E(p)(1-E(p)) · (E(n/m) - 1)`.
    pub formula_var: Rational,
}

/// Moments from a weighted tally of `(remembered, remembered targets)`.
fn variance_from_tally(
    target: Outcome,
    n: usize,
    targets: usize,
    mode: Mode,
    tally: &HashMap<(usize, usize), BigInt>,
    total_weight: BigInt,
) -> Result<VarianceReport> {
    let nonempty: BigInt = tally
        .iter()
        .filter(|((k, _), _)| *k > 0)
        .map(|(_, w)| w)
        .sum();
    if nonempty.is_zero() {
        return Err(Error::Undefined(
            "no non-empty memory subset has positive weight".into(),
        ));
    }
    let mut e_p = Rational::zero();
    let mut e_p2 = Rational::zero();
    let mut e_ratio = Rational::zero();
    for (&(k, j), w) in tally {
        if k == 0 {
            continue;
        }
        let w = Rational::new(w.clone(), nonempty.clone());
        let p = Rational::new(BigInt::from(j), BigInt::from(k));
        e_ratio += &w * Rational::new(BigInt::from(n), BigInt::from(k));
        e_p2 += &w * &p * &p;
        e_p += w * p;
    }
    let empirical_var = &e_p2 - &e_p * &e_p;
    let formula_var = Rational::new(BigInt::one(), BigInt::from(n - 1))
        * &e_p
        * (Rational::one() - &e_p)
        * (&e_ratio - Rational::one());
    Ok(VarianceReport {
        target,
        n,
        mode,
        frequency: Rational::new(BigInt::from(targets), BigInt::from(n)),
        p_nonempty: Rational::new(nonempty, total_weight),
        e_p,
        empirical_var,
        e_n_over_m: e_ratio,
        formula_var,
    })
}

/// Variance of the relative-frequency estimate of `target` over memory
/// subsets, next to the closed-form expression. `target` defaults to the
/// first outcome in the list.
pub fn variance_experiment<R: Rng + ?Sized>(
    outcomes: &[Outcome],
    target: Option<&Outcome>,
    model: &MemoryModel,
    mode: Mode,
    cap: usize,
    rng: &mut R,
) -> Result<VarianceReport> {
    let n = outcomes.len();
    if n < 2 {
        return Err(Error::Undefined(
            "the variance expression needs at least two occurrences".into(),
        ));
    }
    let target = target.unwrap_or(&outcomes[0]).clone();
    let is_target: Vec<bool> = outcomes.iter().map(|o| *o == target).collect();
    let targets = is_target.iter().filter(|&&t| t).count();

    let mut tally: HashMap<(usize, usize), BigInt> = HashMap::new();
    let total_weight = match mode {
        Mode::Exact => {
            check_cap(n, cap)?;
            let mut counts: HashMap<(usize, usize), u64> = HashMap::new();
            let (mut k, mut j) = (0usize, 0usize);
            for_each_subset(n, |step| {
                if let Some((item, added)) = step {
                    let dj = usize::from(is_target[item]);
                    if added {
                        k += 1;
                        j += dj;
                    } else {
                        k -= 1;
                        j -= dj;
                    }
                }
                *counts.entry((k, j)).or_default() += 1;
            });
            for ((k, j), c) in counts {
                tally.insert((k, j), model.weight_numer(k, n) * c);
            }
            model.weight_denom(n)
        }
        Mode::MonteCarlo { trials } => {
            if trials == 0 {
                return Err(Error::Undefined("Monte Carlo needs at least one trial".into()));
            }
            for _ in 0..trials {
                let (mut k, mut j) = (0usize, 0usize);
                for &t in &is_target {
                    if model.remembers(rng) {
                        k += 1;
                        j += usize::from(t);
                    }
                }
                *tally.entry((k, j)).or_insert_with(BigInt::zero) += 1;
            }
            BigInt::from(trials)
        }
    };
    variance_from_tally(target, n, targets, mode, &tally, total_weight)
}

/// Expected lattice prediction over memory subsets of the dataset. Subsets
/// whose analogical set is empty contribute their weight to `∅`.
pub fn predict_with_imperfect_memory<R: Rng + ?Sized>(
    dataset: &Dataset,
    given: &GivenContext,
    model: &MemoryModel,
    mode: Mode,
    cap: usize,
    cfg: &EngineConfig,
    rng: &mut R,
) -> Result<Distribution> {
    ensure_valid(dataset, given, cfg)?;
    let m = dataset.len();
    let mut by_dist: HashMap<Distribution, BigInt> = HashMap::new();
    let denom = match mode {
        Mode::Exact => {
            check_cap(m, cap)?;
            let r = model.r();
            for mask in 0..1u64 << m {
                let kept = mask.count_ones() as usize;
                // r = 0 or r = 1 leave a single subset with positive weight
                if (r.numer() == &0 && kept > 0) || (r.numer() == r.denom() && kept < m) {
                    continue;
                }
                let subset = dataset.select(|i| mask >> i & 1 == 1);
                let dist = predict_distribution(&subset, given, cfg)?;
                *by_dist.entry(dist).or_insert_with(BigInt::zero) += model.weight_numer(kept, m);
            }
            model.weight_denom(m)
        }
        Mode::MonteCarlo { trials } => {
            if trials == 0 {
                return Err(Error::Undefined("Monte Carlo needs at least one trial".into()));
            }
            let mut memo: HashMap<Vec<usize>, Distribution> = HashMap::new();
            for _ in 0..trials {
                let kept = sample_indices(m, model, rng);
                let dist = match memo.get(&kept) {
                    Some(d) => d.clone(),
                    None => {
                        let subset = dataset.select(|i| kept.binary_search(&i).is_ok());
                        let d = predict_distribution(&subset, given, cfg)?;
                        memo.insert(kept, d.clone());
                        d
                    }
                };
                *by_dist.entry(dist).or_insert_with(BigInt::zero) += 1;
            }
            BigInt::from(trials)
        }
    };

    let mut out = Distribution::default();
    let mut groups: Vec<(Distribution, BigInt)> = by_dist.into_iter().collect();
    // fixed accumulation order keeps the result independent of hash order
    groups.sort_by_key(|g| g.0.to_string());
    for (dist, w) in groups {
        out.add_scaled(&dist, &Rational::new(w, denom.clone()));
    }
    Ok(out)
}

/// Exact probability that the memory draw forgets everything: `(1-r)^m`.
pub fn forget_all_probability(m: usize, model: &MemoryModel) -> Rational {
    Rational::new(model.weight_numer(0, m), model.weight_denom(m))
}
