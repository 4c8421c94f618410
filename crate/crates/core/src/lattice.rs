//! The supracontext lattice and the operator sequence applied to it as each
//! occurrence is read.
//!
//! Cells are indexed by the raw bits of their supracontext mask. Reading an
//! occurrence touches every one of the `2^n` cells: each cell derives its
//! include bit from the contain register and, when included, updates its
//! sum, first/plurality registers, heterogeneity and amplitude.

use crate::bitmask::{check_widths, low_bits, BitMask};
use crate::dataset::{
    canonical_order, compute_intersect, ensure_valid, Dataset, EngineConfig, GivenContext,
    Occurrence, Outcome,
};
use crate::error::{Error, Result};

const NONE: u32 = u32::MAX;
const PLUR_OUTCOME: u8 = 1;
const PLUR_INTERSECT: u8 = 1 << 1;
const HETERO: u8 = 1 << 2;

/// Index into a lattice's outcome table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OutcomeId(pub u32);

/// Per-supracontext registers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    sum: u32,
    amplitude: u32,
    first_outcome: u32,
    first_intersect: u32,
    flags: u8,
}

impl Default for Cell {
    fn default() -> Self {
        Self {
            sum: 0,
            amplitude: 0,
            first_outcome: NONE,
            first_intersect: NONE,
            flags: 0,
        }
    }
}

impl Cell {
    pub fn sum(&self) -> u32 {
        self.sum
    }

    pub fn amplitude(&self) -> u32 {
        self.amplitude
    }

    pub fn first_outcome(&self) -> Option<OutcomeId> {
        (self.first_outcome != NONE).then_some(OutcomeId(self.first_outcome))
    }

    /// Raw bits of the first intersect; pair with the lattice width to get a mask.
    pub fn first_intersect_bits(&self) -> Option<u64> {
        (self.first_intersect != NONE).then_some(u64::from(self.first_intersect))
    }

    pub fn plur_outcome(&self) -> bool {
        self.flags & PLUR_OUTCOME != 0
    }

    pub fn plur_intersect(&self) -> bool {
        self.flags & PLUR_INTERSECT != 0
    }

    pub fn hetero(&self) -> bool {
        self.flags & HETERO != 0
    }

    /// The sum, first outcome, plurality of outcome, first intersect,
    /// plurality of intersect, heterogeneity and amplitude operators, in
    /// that order, for an occurrence this cell includes.
    #[inline]
    fn absorb(&mut self, outcome: u32, intersect: u32) {
        self.sum += 1;

        if self.first_outcome == NONE {
            self.first_outcome = outcome;
        } else if self.first_outcome != outcome {
            self.flags |= PLUR_OUTCOME;
        }

        if self.first_intersect == NONE {
            self.first_intersect = intersect;
        } else if self.first_intersect != intersect {
            self.flags |= PLUR_INTERSECT;
        }

        if self.flags & (PLUR_OUTCOME | PLUR_INTERSECT) == PLUR_OUTCOME | PLUR_INTERSECT {
            self.flags |= HETERO;
        }

        self.amplitude = if self.hetero() { 0 } else { self.sum };
    }

    /// The order-independent part of the registers: everything except which
    /// value was seen first.
    pub fn order_invariant_key(&self) -> (u32, bool, bool, bool, u32, bool, bool) {
        (
            self.sum,
            self.plur_outcome(),
            self.plur_intersect(),
            self.hetero(),
            self.amplitude,
            self.first_outcome().is_some(),
            self.first_intersect_bits().is_some(),
        )
    }

    /// Checks the register invariants that must hold after any sequence of reads.
    pub fn invariants_hold(&self) -> bool {
        let ampl_ok = self.amplitude == if self.hetero() { 0 } else { self.sum };
        let plur_ok = (!self.plur_outcome() || self.first_outcome().is_some())
            && (!self.plur_intersect() || self.first_intersect_bits().is_some());
        let hetero_ok = !self.hetero() || (self.plur_outcome() && self.plur_intersect());
        let empty_ok = self.sum != 0
            || (self.flags == 0
                && self.first_outcome().is_none()
                && self.first_intersect_bits().is_none());
        ampl_ok && plur_ok && hetero_ok && empty_ok
    }
}

/// Include bits, one row per occurrence read, one bit per supracontext index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncludeMatrix {
    columns: usize,
    words_per_row: usize,
    words: Vec<u64>,
}

impl IncludeMatrix {
    fn new(columns: usize) -> Self {
        Self {
            columns,
            words_per_row: columns.div_ceil(64),
            words: Vec::new(),
        }
    }

    fn push_row(&mut self) -> &mut [u64] {
        let start = self.words.len();
        self.words.resize(start + self.words_per_row, 0);
        &mut self.words[start..]
    }

    pub fn rows(&self) -> usize {
        self.words.len().checked_div(self.words_per_row).unwrap_or(0)
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn get(&self, row: usize, column: usize) -> bool {
        assert!(row < self.rows() && column < self.columns);
        let word = self.words[row * self.words_per_row + column / 64];
        word >> (column % 64) & 1 == 1
    }

    /// Number of supracontexts the occurrence in `row` was included in.
    pub fn row_count(&self, row: usize) -> u64 {
        let start = row * self.words_per_row;
        self.words[start..start + self.words_per_row]
            .iter()
            .map(|w| u64::from(w.count_ones()))
            .sum()
    }

    /// Number of occurrences included in supracontext `column`.
    pub fn column_count(&self, column: usize) -> u64 {
        (0..self.rows()).filter(|&r| self.get(r, column)).count() as u64
    }
}

/// The full lattice after some number of reads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeState {
    n: usize,
    cells: Vec<Cell>,
    outcomes: Vec<Outcome>,
    include: Option<IncludeMatrix>,
    processed: usize,
}

/// Fresh lattice with every register zeroed.
pub fn init_lattice(n: usize, cfg: &EngineConfig) -> Result<LatticeState> {
    cfg.check_capacity(n)?;
    let size = 1usize << n;
    Ok(LatticeState {
        n,
        cells: vec![Cell::default(); size],
        outcomes: Vec::new(),
        include: cfg.retain_include_matrix.then(|| IncludeMatrix::new(size)),
        processed: 0,
    })
}

/// The contain operator: starting from an all-ones register, clear bit `i`
/// wherever the intersect is 0 and the supracontext is 1.
pub fn apply_contain(supra: BitMask, intersect: BitMask) -> Result<BitMask> {
    check_widths(supra, intersect)?;
    let full = low_bits(supra.width());
    Ok(BitMask::from_raw(
        full & !(supra.bits() & !intersect.bits()),
        supra.width(),
    ))
}

/// The reverse contain operator: set bit `i` back to 1 wherever the
/// intersect is 0 and the supracontext is 1.
pub fn reverse_contain(contain: BitMask, supra: BitMask, intersect: BitMask) -> Result<BitMask> {
    check_widths(contain, supra)?;
    check_widths(supra, intersect)?;
    Ok(BitMask::from_raw(
        contain.bits() | (supra.bits() & !intersect.bits()),
        contain.width(),
    ))
}

/// The include operator: 1 iff the contain register has no zero bit.
/// A zero-width register has no variables to clear and so always includes.
pub fn derive_include(contain: BitMask) -> bool {
    contain.bits() == low_bits(contain.width())
}

impl LatticeState {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn processed(&self) -> usize {
        self.processed
    }

    /// Cells indexed by raw supracontext bits.
    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, supra: BitMask) -> &Cell {
        assert_eq!(supra.width(), self.n, "mask width does not match lattice");
        &self.cells[supra.bits() as usize]
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn outcome(&self, id: OutcomeId) -> &Outcome {
        &self.outcomes[id.0 as usize]
    }

    pub fn first_outcome(&self, supra: BitMask) -> Option<&Outcome> {
        self.cell(supra).first_outcome().map(|id| self.outcome(id))
    }

    pub fn first_intersect(&self, supra: BitMask) -> Option<BitMask> {
        self.cell(supra)
            .first_intersect_bits()
            .map(|b| BitMask::from_raw(b, self.n))
    }

    pub fn include_matrix(&self) -> Option<&IncludeMatrix> {
        self.include.as_ref()
    }

    /// Include bit of occurrence `row` in `supra`, if the matrix was retained.
    pub fn include(&self, row: usize, supra: BitMask) -> Option<bool> {
        self.include
            .as_ref()
            .map(|m| m.get(row, supra.bits() as usize))
    }

    /// Supracontexts in canonical display order.
    pub fn canonical_masks(&self) -> Vec<BitMask> {
        canonical_order(self.n)
    }

    fn intern(&mut self, outcome: &Outcome) -> u32 {
        match self.outcomes.iter().position(|o| o == outcome) {
            Some(i) => i as u32,
            None => {
                self.outcomes.push(outcome.clone());
                (self.outcomes.len() - 1) as u32
            }
        }
    }

    /// Reads one occurrence, applying the operator sequence to every cell.
    pub fn read(&mut self, occ: &Occurrence, given: &GivenContext) -> Result<BitMask> {
        if given.len() != self.n {
            return Err(Error::Consistency(format!(
                "given context has {} variables, lattice has {}",
                given.len(),
                self.n
            )));
        }
        let intersect = compute_intersect(occ, given)?;
        let outcome = self.intern(&occ.outcome);
        let int_bits = intersect.bits();
        let outside = !int_bits;

        match self.include.as_mut() {
            Some(matrix) => {
                let row = matrix.push_row();
                for (idx, cell) in self.cells.iter_mut().enumerate() {
                    if idx as u64 & outside == 0 {
                        row[idx / 64] |= 1 << (idx % 64);
                        cell.absorb(outcome, int_bits as u32);
                    }
                }
            }
            None => {
                for (idx, cell) in self.cells.iter_mut().enumerate() {
                    if idx as u64 & outside == 0 {
                        cell.absorb(outcome, int_bits as u32);
                    }
                }
            }
        }
        self.processed += 1;
        Ok(intersect)
    }

    /// Rebuilds every cell from the retained include bits and the dataset
    /// alone, without consulting the incremental registers.
    pub fn reconstruct(&self, dataset: &Dataset, given: &GivenContext) -> Result<Vec<Cell>> {
        let matrix = self.include.as_ref().ok_or_else(|| {
            Error::Consistency("include matrix was not retained".into())
        })?;
        if matrix.rows() != dataset.len() {
            return Err(Error::Consistency(format!(
                "include matrix has {} rows, dataset has {} occurrences",
                matrix.rows(),
                dataset.len()
            )));
        }
        let mut table: Vec<&Outcome> = Vec::new();
        let reads: Vec<(u32, u32)> = dataset
            .occurrences()
            .iter()
            .map(|occ| {
                let id = match table.iter().position(|o| *o == &occ.outcome) {
                    Some(i) => i,
                    None => {
                        table.push(&occ.outcome);
                        table.len() - 1
                    }
                };
                compute_intersect(occ, given).map(|m| (id as u32, m.bits() as u32))
            })
            .collect::<Result<_>>()?;

        let mut cells = vec![Cell::default(); matrix.columns()];
        for (row, &(outcome, intersect)) in reads.iter().enumerate() {
            for (col, cell) in cells.iter_mut().enumerate() {
                if matrix.get(row, col) {
                    cell.absorb(outcome, intersect);
                }
            }
        }
        Ok(cells)
    }

    /// Checks the retained include bits against the inclusion relation, the
    /// row/column counts against the cell sums, and the reconstructed cells
    /// against the incremental ones.
    pub fn audit(&self, dataset: &Dataset, given: &GivenContext) -> Result<()> {
        let cells = self.reconstruct(dataset, given)?;
        let matrix = self.include.as_ref().expect("checked by reconstruct");
        for (row, occ) in dataset.occurrences().iter().enumerate() {
            let intersect = compute_intersect(occ, given)?;
            let expected = 1u64 << intersect.count_ones();
            if matrix.row_count(row) != expected {
                return Err(Error::Consistency(format!(
                    "occurrence {} included in {} supracontexts, expected {expected}",
                    row + 1,
                    matrix.row_count(row)
                )));
            }
            for col in 0..matrix.columns() {
                let supra = BitMask::from_raw(col as u64, self.n);
                if matrix.get(row, col) != crate::dataset::mask_includes(supra, intersect)? {
                    return Err(Error::Consistency(format!(
                        "include bit for occurrence {} in {supra} is wrong",
                        row + 1
                    )));
                }
            }
        }
        for (col, cell) in self.cells.iter().enumerate() {
            if matrix.column_count(col) != u64::from(cell.sum) {
                return Err(Error::Consistency(format!(
                    "sum of {} disagrees with its include column",
                    BitMask::from_raw(col as u64, self.n)
                )));
            }
        }
        if cells != self.cells {
            return Err(Error::Consistency(
                "reconstructed lattice differs from incremental lattice".into(),
            ));
        }
        Ok(())
    }
}

/// Functional form of [`LatticeState::read`].
pub fn read_occurrence(
    mut state: LatticeState,
    occ: &Occurrence,
    given: &GivenContext,
) -> Result<LatticeState> {
    state.read(occ, given)?;
    Ok(state)
}

/// Validates the inputs and folds every occurrence into a fresh lattice.
pub fn evaluate(dataset: &Dataset, given: &GivenContext, cfg: &EngineConfig) -> Result<LatticeState> {
    ensure_valid(dataset, given, cfg)?;
    let mut state = init_lattice(given.len(), cfg)?;
    for occ in dataset.occurrences() {
        state.read(occ, given)?;
    }
    Ok(state)
}

/// The lattice as it stood right after one occurrence was read.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceSnapshot {
    /// 1-based step number.
    pub step: usize,
    pub occurrence: Occurrence,
    pub intersect: BitMask,
    /// Include bits for every occurrence read so far are always retained here.
    pub state: LatticeState,
}

/// One snapshot per occurrence read, in dataset order.
pub fn trace(dataset: &Dataset, given: &GivenContext, cfg: &EngineConfig) -> Result<Vec<TraceSnapshot>> {
    ensure_valid(dataset, given, cfg)?;
    let cfg = EngineConfig {
        retain_include_matrix: true,
        ..cfg.clone()
    };
    let mut state = init_lattice(given.len(), &cfg)?;
    let mut out = Vec::with_capacity(dataset.len());
    for (i, occ) in dataset.occurrences().iter().enumerate() {
        let intersect = state.read(occ, given)?;
        out.push(TraceSnapshot {
            step: i + 1,
            occurrence: occ.clone(),
            intersect,
            state: state.clone(),
        });
    }
    Ok(out)
}
