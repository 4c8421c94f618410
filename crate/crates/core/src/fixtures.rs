//! Small reference inputs used across tests, docs and the CLI examples.

use crate::dataset::{Dataset, GivenContext, Occurrence};

/// Five occurrences over three variables with outcomes `e` and `r`.
pub const DATASET_312: &str = "\
3 1 0 e
0 3 2 r
2 1 0 r
2 1 2 r
3 1 1 r
";

pub fn dataset_312() -> Dataset {
    Dataset::parse(DATASET_312).expect("fixture parses")
}

pub fn given_312() -> GivenContext {
    GivenContext::new(["3", "1", "2"])
}

/// The twenty-symbol outcome string used by the natural-statistics examples.
pub const SST_STRING: &str = "s s s t s t t t t t s t s t t t t s s t";

/// Five words sharing the letters after an initial `c`, against the given
/// context `e i l`: *cell*, *cent*, *certain* (`s`), *chin* (`ch`) and
/// *coin* (`k`). Only the part of the lexicon that lands in homogeneous
/// supracontexts is reproduced.
pub const CEILING_PARTIAL: &str = "\
e l l s
e n t s
e r t s
h i n ch
o i n k
";

pub fn ceiling_partial() -> Dataset {
    Dataset::parse(CEILING_PARTIAL).expect("fixture parses")
}

pub fn given_eil() -> GivenContext {
    GivenContext::new(["e", "i", "l"])
}

pub fn occurrence(line: &str) -> Occurrence {
    Occurrence::parse(line).expect("fixture parses")
}
