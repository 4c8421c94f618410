mod common;

use proptest::prelude::*;
use qam_core::{
    apply_contain, compute_intersect, derive_include, evaluate, mask_includes, reverse_contain,
    trace, BitMask, Dataset, EngineConfig, GivenContext, LatticeState,
};

/// Registers of one supracontext computed straight from its member list.
#[derive(Debug, PartialEq, Eq)]
struct Expected {
    sum: u32,
    first_outcome: Option<String>,
    plur_outcome: bool,
    first_intersect: Option<BitMask>,
    plur_intersect: bool,
    hetero: bool,
    amplitude: u32,
}

fn brute_force(supra: BitMask, dataset: &Dataset, given: &GivenContext) -> Expected {
    let members: Vec<(BitMask, String)> = dataset
        .occurrences()
        .iter()
        .filter_map(|o| {
            let i = compute_intersect(o, given).unwrap();
            // inclusion by explicit per-variable check
            let inside = (0..supra.width()).all(|v| !supra.is_set(v) || i.is_set(v));
            inside.then(|| (i, o.outcome.to_string()))
        })
        .collect();
    let first = members.first();
    let plur_outcome = members.iter().any(|(_, o)| Some(o) != first.map(|f| &f.1));
    let plur_intersect = members.iter().any(|(i, _)| Some(i) != first.map(|f| &f.0));
    let hetero = plur_outcome && plur_intersect;
    Expected {
        sum: members.len() as u32,
        first_outcome: first.map(|f| f.1.clone()),
        plur_outcome,
        first_intersect: first.map(|f| f.0),
        plur_intersect,
        hetero,
        amplitude: if hetero { 0 } else { members.len() as u32 },
    }
}

fn observed(state: &LatticeState, supra: BitMask) -> Expected {
    let c = state.cell(supra);
    Expected {
        sum: c.sum(),
        first_outcome: state.first_outcome(supra).map(ToString::to_string),
        plur_outcome: c.plur_outcome(),
        first_intersect: state.first_intersect(supra),
        plur_intersect: c.plur_intersect(),
        hetero: c.hetero(),
        amplitude: c.amplitude(),
    }
}

fn keys(state: &LatticeState) -> Vec<(u32, bool, bool, bool, u32, bool, bool)> {
    state.cells().iter().map(|c| c.order_invariant_key()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn lattice_matches_definitional_registers((ds, given) in common::instance(5, 12, 3)) {
        let state = evaluate(&ds, &given, &EngineConfig::default()).unwrap();
        for supra in state.canonical_masks() {
            prop_assert_eq!(observed(&state, supra), brute_force(supra, &ds, &given), "{}", supra);
        }
    }

    #[test]
    fn every_snapshot_matches_its_prefix((ds, given) in common::instance(4, 10, 3)) {
        let snaps = trace(&ds, &given, &EngineConfig::default()).unwrap();
        prop_assert_eq!(snaps.len(), ds.len());
        let mut prev: Option<&LatticeState> = None;
        for (k, snap) in snaps.iter().enumerate() {
            let prefix = ds.select(|i| i <= k);
            for supra in snap.state.canonical_masks() {
                prop_assert_eq!(observed(&snap.state, supra), brute_force(supra, &prefix, &given));
                let included = mask_includes(supra, snap.intersect).unwrap();
                let before = prev.map_or(0, |p| p.cell(supra).sum());
                prop_assert_eq!(snap.state.cell(supra).sum(), before + u32::from(included));
                prop_assert_eq!(snap.state.include(k, supra), Some(included));
            }
            prev = Some(&snap.state);
        }
    }

    #[test]
    fn registers_are_monotone_across_snapshots((ds, given) in common::instance(4, 14, 3)) {
        let snaps = trace(&ds, &given, &EngineConfig::default()).unwrap();
        for pair in snaps.windows(2) {
            for (a, b) in pair[0].state.cells().iter().zip(pair[1].state.cells()) {
                prop_assert!(b.sum() >= a.sum());
                prop_assert!(!a.plur_outcome() || b.plur_outcome());
                prop_assert!(!a.plur_intersect() || b.plur_intersect());
                prop_assert!(!a.hetero() || b.hetero());
                if a.hetero() {
                    prop_assert_eq!(b.amplitude(), 0);
                } else if !b.hetero() {
                    prop_assert!(b.amplitude() >= a.amplitude());
                }
                prop_assert!(b.invariants_hold());
            }
        }
    }

    #[test]
    fn order_of_reading_does_not_matter(
        (ds, given) in common::instance(5, 12, 3),
        seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let base = evaluate(&ds, &given, &EngineConfig::default()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut occs = ds.occurrences().to_vec();
        occs.shuffle(&mut rng);
        let shuffled = Dataset::new(given.len(), occs);
        let other = evaluate(&shuffled, &given, &EngineConfig::default()).unwrap();
        prop_assert_eq!(keys(&base), keys(&other));
    }

    #[test]
    fn occupancy_is_downward_closed((ds, given) in common::instance(5, 12, 3)) {
        let state = evaluate(&ds, &given, &EngineConfig::default()).unwrap();
        let cells = state.cells();
        for (s, cs) in cells.iter().enumerate() {
            for (t, ct) in cells.iter().enumerate() {
                if s & !t == 0 {
                    prop_assert!(cs.sum() >= ct.sum(), "{s:b} subset of {t:b}");
                }
            }
        }
    }

    #[test]
    fn incremental_state_is_recoverable((ds, given) in common::instance(5, 15, 3)) {
        let state = evaluate(&ds, &given, &EngineConfig::default()).unwrap();
        prop_assert!(state.audit(&ds, &given).is_ok());
        let lean = evaluate(&ds, &given, &EngineConfig { retain_include_matrix: false, ..EngineConfig::default() }).unwrap();
        prop_assert_eq!(lean.cells(), state.cells());
    }

    #[test]
    fn intersect_support_has_power_of_two_supracontexts((ds, given) in common::instance(6, 6, 2)) {
        let n = given.len();
        for occ in ds.occurrences() {
            let i = compute_intersect(occ, &given).unwrap();
            for v in 0..n {
                prop_assert_eq!(i.is_set(v), occ.vars[v] == given.vars[v]);
            }
            let count = (0..1u64 << n)
                .filter(|&s| mask_includes(BitMask::new(s, n).unwrap(), i).unwrap())
                .count();
            prop_assert_eq!(count, 1usize << i.count_ones());
        }
    }

    #[test]
    fn contain_register_agrees_with_inclusion(width in 0usize..=20, s in any::<u64>(), i in any::<u64>()) {
        let mask = if width == 0 { 0 } else { u64::MAX >> (64 - width) };
        let supra = BitMask::new(s & mask, width).unwrap();
        let int = BitMask::new(i & mask, width).unwrap();
        let contain = apply_contain(supra, int).unwrap();
        prop_assert_eq!(derive_include(contain), mask_includes(supra, int).unwrap());
        prop_assert_eq!(reverse_contain(contain, supra, int).unwrap(), BitMask::full(width));
    }

    #[test]
    fn inclusion_is_a_partial_order(width in 1usize..=8, a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let mask = u64::MAX >> (64 - width);
        let [a, b, c] = [a, b, c].map(|x| BitMask::new(x & mask, width).unwrap());
        prop_assert!(mask_includes(a, a).unwrap());
        if mask_includes(a, b).unwrap() && mask_includes(b, a).unwrap() {
            prop_assert_eq!(a, b);
        }
        if mask_includes(a, b).unwrap() && mask_includes(b, c).unwrap() {
            prop_assert!(mask_includes(a, c).unwrap());
        }
    }
}

#[test]
fn enumeration_has_full_and_empty_masks() {
    let cfg = EngineConfig::default();
    for n in 0..=10 {
        let all = qam_core::enumerate_supracontexts(n, &cfg).unwrap();
        assert_eq!(all.len(), 1 << n);
        let distinct: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(distinct.len(), all.len());
        assert_eq!(all[0], BitMask::full(n));
        assert_eq!(*all.last().unwrap(), BitMask::empty(n));
    }
}
