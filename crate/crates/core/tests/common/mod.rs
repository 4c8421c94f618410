#![allow(dead_code)]

use proptest::prelude::*;
use qam_core::{Dataset, GivenContext, Occurrence, Outcome};
use rand::Rng;

/// A given context of `n` variables drawn from a 3-token alphabet and a
/// dataset of up to `max_m` occurrences over the same alphabet, so that
/// partial matches are common.
pub fn instance(max_n: usize, max_m: usize, outcomes: usize) -> impl Strategy<Value = (Dataset, GivenContext)> {
    (0..=max_n).prop_flat_map(move |n| {
        let given = prop::collection::vec(0u8..3, n);
        let occ = (prop::collection::vec(0u8..3, n), 0..outcomes);
        let rows = prop::collection::vec(occ, 0..=max_m);
        (given, rows).prop_map(move |(given, rows)| {
            let given = GivenContext::new(given.iter().map(u8::to_string));
            let occs = rows
                .into_iter()
                .map(|(vars, o)| {
                    Occurrence::new(
                        vars.iter().map(u8::to_string),
                        Outcome::new(((b'a' + o as u8) as char).to_string()).unwrap(),
                    )
                })
                .collect();
            (Dataset::new(n, occs), given)
        })
    })
}

/// Same shape as [`instance`], drawn from a seeded RNG instead of proptest.
pub fn random_instance<R: Rng>(rng: &mut R, max_n: usize, max_m: usize, outcomes: usize) -> (Dataset, GivenContext) {
    let n = rng.random_range(0..=max_n);
    let m = rng.random_range(0..=max_m);
    let token = |rng: &mut R| rng.random_range(0..3u8).to_string();
    let given = GivenContext::new((0..n).map(|_| token(rng)).collect::<Vec<_>>());
    let occs = (0..m)
        .map(|_| {
            let vars: Vec<String> = (0..n).map(|_| token(rng)).collect();
            let o = (b'a' + rng.random_range(0..outcomes) as u8) as char;
            Occurrence::new(vars, Outcome::new(o.to_string()).unwrap())
        })
        .collect();
    (Dataset::new(n, occs), given)
}
