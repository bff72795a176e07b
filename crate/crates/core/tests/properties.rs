use proptest::prelude::*;

use rmconv::bounds::{audit, ParamSet};
use rmconv::code::DEFAULT_K_LIMIT;
use rmconv::conversion::{
    apply_conversion, classify_symbols, default_conversion, verify_conversion,
};
use rmconv::oracle::{enumerate_conversions, min_access_cost, SearchLimits};
use rmconv::report::{merge_report, ReportRecord, REPORT_K_LIMIT};
use rmconv::{BitMatrix, BitVector, ConvertibleInstance, LinearCode};

fn full_rank(n: usize, k: usize) -> impl Strategy<Value = LinearCode> {
    proptest::collection::vec(any::<bool>(), n * k).prop_filter_map("full rank", move |bits| {
        let rows: Vec<BitVector> = bits.chunks(n).map(BitVector::from_bools).collect();
        let g = BitMatrix::from_rows(&rows).ok()?;
        LinearCode::from_generator(g).ok()
    })
}

/// Two initial codes of dimension 1 or 2 with at most one redundant symbol,
/// merged into a final code of length at most 5.
fn small_instance() -> impl Strategy<Value = ConvertibleInstance> {
    (1usize..=2, 1usize..=2, 0usize..=1, 0usize..=1, 0usize..=1)
        .prop_flat_map(|(k1, k2, r1, r2, extra)| {
            let n_f = k1 + k2 + extra;
            (
                full_rank(k1 + r1, k1),
                full_rank(k2 + r2, k2),
                full_rank(n_f, k1 + k2),
            )
        })
        .prop_map(|(a, b, f)| ConvertibleInstance::new(vec![a, b], f).unwrap())
}

fn limits() -> SearchLimits {
    SearchLimits {
        time_budget: None,
        ..SearchLimits::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn oracle_matches_enumeration(inst in small_instance()) {
        let (y, rep) = min_access_cost(&inst, &limits()).unwrap();
        prop_assert!(verify_conversion(&inst, &y).unwrap());
        let brute = enumerate_conversions(&inst, &limits())
            .unwrap()
            .map(|(_, r)| r.access_cost())
            .min()
            .unwrap();
        prop_assert_eq!(rep.access_cost(), brute);
        let default = classify_symbols(&inst, &default_conversion(&inst)).unwrap();
        prop_assert!(rep.access_cost() <= default.access_cost());
    }

    #[test]
    fn optimal_conversion_passes_audit(inst in small_instance()) {
        let (_, rep) = min_access_cost(&inst, &limits()).unwrap();
        let p = ParamSet::from_instance(&inst, DEFAULT_K_LIMIT).unwrap();
        let a = audit(&p, &rep.summary()).unwrap();
        prop_assert!(a.violations().is_empty(), "{:?}", a.violations());
    }

    #[test]
    fn conversion_maps_codewords_to_the_merged_codeword(inst in small_instance(), seed in any::<u64>()) {
        let y = default_conversion(&inst);
        let mut bits = seed;
        let mut next = || { bits = bits.rotate_left(1); bits & 1 == 1 };
        let msgs: Vec<BitVector> = inst
            .initial_dimensions()
            .iter()
            .map(|&k| BitVector::from_bools(&(0..k).map(|_| next()).collect::<Vec<_>>()))
            .collect();
        let words: Vec<BitVector> = inst
            .initial_codes()
            .iter()
            .zip(&msgs)
            .map(|(c, u)| c.encode(u).unwrap())
            .collect();
        let out = apply_conversion(&inst, &y, &words).unwrap();
        prop_assert!(inst.final_code().contains(&out));
    }
}

#[test]
fn report_round_trips_through_json() {
    let rec = merge_report(2, 4, REPORT_K_LIMIT).unwrap();
    let text = serde_json::to_string(&rec).unwrap();
    let back: ReportRecord = serde_json::from_str(&text).unwrap();
    assert_eq!(back, rec);

    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["costs"]["U"], serde_json::json!([8, 4]));
    assert_eq!(v["costs"]["access"], 15);
    assert_eq!(v["params"]["dFdual"], 8);
    let first = &v["bounds"][0];
    for key in [
        "name",
        "i",
        "kind",
        "scope",
        "value",
        "applicable",
        "observed",
        "satisfied",
        "tight",
        "slack",
    ] {
        assert!(first.get(key).is_some(), "missing {key}");
    }
}
