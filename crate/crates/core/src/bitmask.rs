//! Fixed-width variable masks.
//!
//! A [`BitMask`] names a subset of the given context's variables. Variable
//! `i` (zero-based, left to right) lives at bit `width - 1 - i`, so the
//! integer value of a mask reads the same as its printed 0/1 string:
//! `"110"` is `0b110`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Widest mask representable. Lattice cells additionally reserve `u32::MAX`
/// as a sentinel, so lattice widths stay below this.
pub const MAX_WIDTH: usize = 63;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitMask {
    bits: u64,
    width: u8,
}

impl BitMask {
    /// Builds a mask from raw bits. Bits above `width` are rejected.
    pub fn new(bits: u64, width: usize) -> Result<Self> {
        if width > MAX_WIDTH {
            return Err(Error::Capacity(format!(
                "mask width {width} exceeds {MAX_WIDTH}"
            )));
        }
        if bits & !low_bits(width) != 0 {
            return Err(Error::Consistency(format!(
                "bits {bits:#b} do not fit in width {width}"
            )));
        }
        Ok(Self {
            bits,
            width: width as u8,
        })
    }

    /// Caller guarantees `bits` fits in `width`.
    pub(crate) fn from_raw(bits: u64, width: usize) -> Self {
        debug_assert!(width <= MAX_WIDTH && bits & !low_bits(width) == 0);
        Self {
            bits,
            width: width as u8,
        }
    }

    pub fn empty(width: usize) -> Self {
        Self::from_raw(0, width.min(MAX_WIDTH))
    }

    pub fn full(width: usize) -> Self {
        let width = width.min(MAX_WIDTH);
        Self::from_raw(low_bits(width), width)
    }

    /// Builds a mask from per-variable flags, variable 0 first.
    pub fn from_flags<I: IntoIterator<Item = bool>>(flags: I) -> Result<Self> {
        let mut bits = 0u64;
        let mut width = 0usize;
        for flag in flags {
            if width == MAX_WIDTH {
                return Err(Error::Capacity(format!("mask width exceeds {MAX_WIDTH}")));
            }
            bits = (bits << 1) | u64::from(flag);
            width += 1;
        }
        Ok(Self::from_raw(bits, width))
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn width(self) -> usize {
        usize::from(self.width)
    }

    /// Whether variable `i` (zero-based, leftmost first) is set.
    pub fn is_set(self, i: usize) -> bool {
        assert!(i < self.width(), "variable {i} out of range for width {}", self.width);
        self.bits >> (self.width() - 1 - i) & 1 == 1
    }

    pub fn count_ones(self) -> u32 {
        self.bits.count_ones()
    }

    /// True iff every variable set here is also set in `other`.
    pub fn is_subset_of(self, other: BitMask) -> Result<bool> {
        check_widths(self, other)?;
        Ok(self.bits & !other.bits == 0)
    }

    /// Canonical supracontext order: more active variables first, then
    /// larger binary value first. For width 3 this gives
    /// 111, 110, 101, 011, 100, 010, 001, 000.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        other
            .count_ones()
            .cmp(&self.count_ones())
            .then_with(|| other.bits.cmp(&self.bits))
    }
}

pub(crate) fn check_widths(a: BitMask, b: BitMask) -> Result<()> {
    if a.width != b.width {
        Err(Error::WidthMismatch {
            left: a.width(),
            right: b.width(),
        })
    } else {
        Ok(())
    }
}

#[inline]
pub(crate) fn low_bits(width: usize) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

impl fmt::Display for BitMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.width() {
            f.write_str(if self.is_set(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitMask({self})")
    }
}

impl FromStr for BitMask {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let flags = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse {
                    line: 0,
                    message: format!("invalid mask character {other:?} in {s:?}"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_flags(flags)
    }
}
