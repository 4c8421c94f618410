//! Classical reversible gates and a bijection check over truth tables.

use std::collections::HashSet;
use std::fmt;

use crate::bitmask::BitMask;
use crate::lattice::{apply_contain, reverse_contain};

pub type Bit = u8;

/// One line of a truth table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateRow {
    pub inputs: Vec<Bit>,
    pub outputs: Vec<Bit>,
}

impl fmt::Display for GateRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.inputs {
            write!(f, "{b}")?;
        }
        f.write_str(" -> ")?;
        for b in &self.outputs {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// Negation.
pub fn n_gate(a: Bit) -> Bit {
    a ^ 1
}

/// Control-control-not: flips `c` iff both controls are 1; `a` and `b`
/// pass through.
pub fn ccn_gate(a: Bit, b: Bit, c: Bit) -> (Bit, Bit, Bit) {
    (a, b, c ^ (a & b))
}

/// `a AND b` as the third output of a ccn gate whose target starts at 0.
pub fn and_via_ccn(a: Bit, b: Bit) -> Bit {
    ccn_gate(a, b, 0).2
}

/// Irreversible AND, padded to two outputs with a constant so it can be
/// compared against reversible gates of the same shape.
pub fn and_gate_padded(inputs: &[Bit]) -> Vec<Bit> {
    vec![inputs[0] & inputs[1], 0]
}

/// All `2^arity` rows, inputs in ascending binary order (first input most significant).
pub fn truth_table<F>(arity: usize, gate: F) -> Vec<GateRow>
where
    F: Fn(&[Bit]) -> Vec<Bit>,
{
    assert!(arity < 24, "truth table too large to enumerate");
    (0..1u32 << arity)
        .map(|row| {
            let inputs: Vec<Bit> = (0..arity)
                .map(|i| (row >> (arity - 1 - i) & 1) as Bit)
                .collect();
            let outputs = gate(&inputs);
            GateRow { inputs, outputs }
        })
        .collect()
}

/// True iff the gate's full truth table is a bijection on `arity`-bit tuples.
pub fn reversibility_check<F>(arity: usize, gate: F) -> bool
where
    F: Fn(&[Bit]) -> Vec<Bit>,
{
    let table = truth_table(arity, gate);
    let mut seen = HashSet::with_capacity(table.len());
    table
        .into_iter()
        .all(|row| row.outputs.len() == arity && seen.insert(row.outputs))
}

pub fn ccn_slice(bits: &[Bit]) -> Vec<Bit> {
    let (a, b, c) = ccn_gate(bits[0], bits[1], bits[2]);
    vec![a, b, c]
}

pub fn n_slice(bits: &[Bit]) -> Vec<Bit> {
    vec![n_gate(bits[0])]
}

pub fn identity_slice(bits: &[Bit]) -> Vec<Bit> {
    bits.to_vec()
}

/// Runs contain then reverse contain and reports whether the register is
/// back to all ones.
pub fn contain_round_trip(supra: BitMask, intersect: BitMask) -> bool {
    match apply_contain(supra, intersect)
        .and_then(|contain| reverse_contain(contain, supra, intersect))
    {
        Ok(reg) => reg == BitMask::full(supra.width()),
        Err(_) => false,
    }
}

/// Checks the contain round trip for every (supracontext, intersect) pair of a width.
pub fn contain_round_trip_exhaustive(width: usize) -> bool {
    assert!(width <= 12, "exhaustive check limited to width 12");
    (0..1u64 << width).all(|s| {
        (0..1u64 << width).all(|i| {
            let supra = BitMask::new(s, width).expect("in range");
            let intersect = BitMask::new(i, width).expect("in range");
            contain_round_trip(supra, intersect)
        })
    })
}
