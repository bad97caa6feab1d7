mod common;

use common::*;
use useqmine::dataio::{split_db, IncrementSpec, SplitSpec};
use useqmine::fuws::{fuws_with, FuwsOptions};
use useqmine::incremental::IncrementalState;
use useqmine::MiningParams;

#[test]
fn split_reproduces_the_increments() {
    let all = base_db().concat(&delta1()).concat(&delta2());
    assert_eq!(all.size(), 13);
    let spec = SplitSpec {
        initial_fraction: 6.0 / 13.0,
        increments: IncrementSpec::Sizes(vec![4, 3]),
    };
    let (init, incs) = split_db(&all, &spec).unwrap();
    assert_eq!(init, base_db());
    assert_eq!(incs, vec![delta1(), delta2()]);
}

#[test]
fn local_frequent_sets_of_the_increments() {
    // LWES = 2 * 0.2 * 0.7 * |delta| * WAM(delta) * wgt_fct
    let lfs = fuws_with(&delta1(), &weights(), 2.0 * 0.2 * 0.7, 1.0, &FuwsOptions::default()).unwrap();
    assert!((lfs.thresholds.min_wes - 0.96).abs() < 0.005);
    let want = [
        ("(a)", 2.32),
        ("(c)", 2.7),
        ("(d)", 1.53),
        ("(f)", 1.98),
        ("(a)(f)", 0.99),
        ("(a c)", 0.97),
        ("(c)(a)", 1.83),
        ("(c)(f)", 1.25),
        ("(c)(d)", 1.23),
        ("(f)(c)", 0.96),
    ];
    matches(&by_name(&lfs.patterns), &want, 0.01).unwrap();

    let lfs = fuws_with(&delta2(), &weights(), 2.0 * 0.2 * 0.7, 1.0, &FuwsOptions::default()).unwrap();
    let got = by_name(&lfs.patterns);
    for (k, v) in [("(a)(d)", 1.15), ("(c)(a)", 0.99), ("(c)(a)(d)", 0.77), ("(e)", 0.77), ("(d)", 1.35)] {
        assert!((got[k] - v).abs() < 0.01, "{k}: {}", got[k]);
    }
}

#[test]
fn buffer_ratio_one_keeps_only_frequent() {
    let st = IncrementalState::init_mining(&base_db(), &weights(), MiningParams::new(0.2, 1.0, 1.0).unwrap()).unwrap();
    matches(&by_name(&st.seq_trie.patterns()), &[("(a)", 2.24), ("(b)", 1.4), ("(c)", 1.8)], 1e-9).unwrap();
}

#[test]
fn weight_factor_scales_the_threshold() {
    let out = fuws_with(&base_db(), &weights(), 0.2, 0.75, &FuwsOptions::default()).unwrap();
    assert!((out.thresholds.min_wes - 0.792).abs() < 0.005);
    // (a)(a) at 1.032 and (a c) at 1.02 now clear the lowered bar
    let names: Vec<String> = out.patterns.iter().map(|s| s.pattern.to_string()).collect();
    assert_eq!(names, ["(a)", "(a c)", "(a)(a)", "(b)", "(c)"]);
}
