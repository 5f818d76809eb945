use std::collections::BTreeMap;
use std::sync::OnceLock;

use proptest::prelude::*;
use qtower::arith::PrimeDiscriminant;
use qtower::classify::{
    check_preconditions, classify, classify_factors, tables, tower_verdict, tower_verdict_for_label, verify_appendix_row,
    CaseType, Verdict, VERDICT_PARTITION,
};
use qtower::error::Error;

fn product(f: &[i64]) -> i64 {
    f.iter().product()
}

const EXAMPLES: &[(&[i64], &str)] = &[
    (&[8, 17, -3, -47], "a1"),
    (&[8, 113, -3, -7], "a2"),
    (&[8, 5, -7, -79], "a3"),
    (&[8, 5, -31, -7], "a4"),
    (&[8, 41, -3, -7], "a6"),
    (&[5, 17, -11, -31], "a8"),
    (&[13, 5, -131, -7], "a9"),
    (&[61, 5, -11, -4], "b5"),
    (&[41, 5, -7, -4], "b6"),
    (&[29, 5, -3, -4], "b1"),
    (&[61, 5, -7, -4], "b1"),
    (&[17, 5, -19, -4], "b8"),
    (&[401, 5, -3, -4], "b6"),
    (&[-7, -3, -43, -31], "c2"),
    (&[-3, -8, -11, -23], "c3"),
    (&[-7, -3, -47, -4], "d5"),
    (&[-11, -43, -7, -4], "d8"),
    (&[-7, -31, -23, -4], "d1"),
];

#[test]
fn worked_examples_classify() {
    for (f, label) in EXAMPLES {
        let rec = classify(product(f)).unwrap();
        assert_eq!(rec.label, *label, "{f:?}");
    }
}

#[test]
fn the_41_8_79_3_example_lands_in_a6() {
    // Listed under a5 in the worked examples; the symbol rows only admit a6.
    let rec = classify(41 * 8 * 79 * 3).unwrap();
    assert_eq!(rec.label, "a6");
    assert_eq!(rec.values(), [8, 41, -3, -79]);
    assert_eq!(rec.gplus_label, tables().row("a5").unwrap().1.gplus_label);
}

#[test]
fn first_example_assignment() {
    let rec = classify(19176).unwrap();
    assert_eq!(rec.case_type, CaseType::I);
    assert_eq!(rec.values(), [8, 17, -47, -3]);
    assert_eq!(rec.gplus_label, "64.144");
    assert_eq!(tower_verdict(&rec, None).verdict, Verdict::AtLeast3);
}

#[test]
fn preconditions_reject() {
    assert!(matches!(check_preconditions(15), Err(Error::NotFundamental(15))));
    assert!(matches!(check_preconditions(-19176), Err(Error::Precondition(_))));
    assert!(matches!(check_preconditions(21 * 8), Err(Error::Precondition(_))));
    // 5*13*17*29 is a sum of two squares.
    assert!(check_preconditions(5 * 13 * 17 * 29).is_err());
}

#[test]
fn verdict_partition() {
    let (two, three, unknown) = VERDICT_PARTITION;
    assert_eq!(two, &["32.034", "32.036", "32.037", "32.039", "32.041"]);
    assert_eq!(three, &["32.033", "64.144", "64.146", "64.147"]);
    assert_eq!(unknown, &["64.150"]);
    for l in two {
        assert_eq!(tower_verdict_for_label(l, None).verdict, Verdict::Exactly2);
    }
    for l in three {
        assert_eq!(tower_verdict_for_label(l, None).verdict, Verdict::AtLeast3);
    }
    assert_eq!(tower_verdict_for_label("64.150", None).verdict, Verdict::Unknown64_150);
    assert_eq!(tower_verdict_for_label("64.150", Some(&[2, 4, 4])).verdict, Verdict::Exactly2_By8Rank);
    assert_eq!(tower_verdict_for_label("64.150", Some(&[2, 4, 8])).verdict, Verdict::Unknown64_150);
    for t in &tables().types {
        for row in &t.rows {
            let all: Vec<&str> = two.iter().chain(three).chain(unknown).copied().collect();
            assert!(all.contains(&row.gplus_label.as_str()), "{}", row.label);
        }
    }
}

#[test]
fn listed_verdicts() {
    let b9 = classify(19020).unwrap();
    assert_eq!(b9.label, "b9");
    assert_eq!(tower_verdict(&b9, None).verdict, Verdict::Exactly2);
    for f in [&[-7i64, -3, -43, -31][..], &[-7, -3, -47, -4], &[-11, -43, -7, -4]] {
        let rec = classify(product(f)).unwrap();
        assert_eq!(rec.gplus_label, "32.033");
        assert_eq!(tower_verdict(&rec, None).verdict, Verdict::AtLeast3);
    }
    let c3 = classify(6072).unwrap();
    assert_eq!(tower_verdict(&c3, Some(&[2, 4, 4])).verdict, Verdict::Exactly2_By8Rank);
    let d1 = classify(7 * 31 * 23 * 4).unwrap();
    assert_eq!(tower_verdict(&d1, Some(&[2, 4, 8])).verdict, Verdict::Unknown64_150);
}

/// Every discriminant passing the preconditions has exactly one row.
fn classified() -> &'static Vec<(i64, String)> {
    static CELL: OnceLock<Vec<(i64, String)>> = OnceLock::new();
    CELL.get_or_init(|| {
        (5..60_000i64)
            .filter_map(|d| {
                let f = check_preconditions(d).ok()?;
                let rec = classify_factors(d, &f.factors).unwrap_or_else(|e| panic!("d = {d}: {e}"));
                Some((d, rec.label))
            })
            .collect()
    })
}

#[test]
fn totality_below_sixty_thousand() {
    let mut hist: BTreeMap<&str, usize> = BTreeMap::new();
    for (_, l) in classified() {
        *hist.entry(l).or_default() += 1;
    }
    let labels: usize = tables().types.iter().map(|t| t.rows.len()).sum();
    assert!(hist.len() >= labels - 4, "{hist:?}");
}

#[test]
fn unit_table_rows_verify_below_thirty_thousand() {
    let mut seen = BTreeMap::new();
    for (d, l) in classified() {
        if *d >= 30_000 || !(l.starts_with('a') || l.starts_with('b')) {
            continue;
        }
        let rep = verify_appendix_row(*d).unwrap();
        assert!(rep.all_match(), "d = {d} {l}: {rep:?}");
        *seen.entry(l.clone()).or_insert(0) += 1;
    }
    assert!(seen.len() >= 20, "{seen:?}");
}

#[test]
fn unit_table_rows_for_named_fields() {
    for f in [&[8i64, 17, -3, -47][..], &[13, 5, -131, -7], &[61, 5, -11, -4], &[41, 5, -7, -4]] {
        let rep = verify_appendix_row(product(f)).unwrap();
        assert!(rep.all_match(), "{f:?}: {rep:?}");
        assert_eq!(rep.entries.len(), 11);
    }
}

#[test]
fn two_sylow_of_narrow_genus_field_is_elementary() {
    for (d, _) in classified().iter().filter(|(d, _)| *d < 20_000) {
        let g = qtower::qform::class_group(*d, true).unwrap();
        assert_eq!(qtower::qform::two_sylow(&g).elementary_divisors, vec![2, 2, 2], "d = {d}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn classification_ignores_factor_order(i in 0usize..1000, perm in Just(vec![0usize, 1, 2, 3]).prop_shuffle()) {
        let all = classified();
        let (d, label) = &all[i % all.len()];
        let f = check_preconditions(*d).unwrap().factors;
        let shuffled: Vec<PrimeDiscriminant> = perm.iter().map(|&k| f[k]).collect();
        let rec = classify_factors(*d, &shuffled).unwrap();
        prop_assert_eq!(&rec.label, label);
        prop_assert_eq!(rec, classify(*d).unwrap());
    }

    #[test]
    fn assignment_multiplies_back(i in 0usize..5000) {
        let all = classified();
        let (d, _) = &all[i % all.len()];
        let rec = classify(*d).unwrap();
        prop_assert_eq!(rec.values().iter().product::<i64>(), *d);
        prop_assert!(rec.case_type.admits(&rec.values()));
    }
}
