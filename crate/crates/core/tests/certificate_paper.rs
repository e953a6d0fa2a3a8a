//! The three published certificates, their exact slacks, and the frozen
//! verdicts of every single-coordinate perturbation.

use num::BigInt;

use sqfree_core::certificate::{read_certificate, Certificate, ParsedCertificate, Rational};

const SIX_LETTER: &str = "\
CERT v1
k=6
p=12
pattern .
pattern {. a .}
pattern {. a . b}
f 1 3
f 3 6
f 4 6
x 1 2/5
x 3 1/4
x 4 1/4
";

const QUATERNARY: &str = "\
CERT v1
k=4
p=18
pattern .
pattern {. . a .}
pattern {. . a . . b}
f 1 2
f 4 5
f 6 8
x 1 11/20
x 4 1/4
x 6 1/5
";

const TERNARY: &str = "\
CERT v1
k=3
p=61
pattern {.^9}
pattern {.^i a : i=18..26}
f 9 4
f 19 19
f 20 22
f 21 28
f 22 36
f 23 50
f 24 63
f 25 88
f 26 118
f 27 148
x 9 27/100
x 19 7/100
x 20 13/200
x 21 11/200
x 22 9/200
x 23 1/25
x 24 3/100
x 25 1/40
x 26 1/40
x 27 1/50
";

fn parsed(text: &str) -> ParsedCertificate {
    read_certificate(text.as_bytes()).unwrap()
}

fn cert(text: &str) -> Certificate {
    parsed(text).certificate().unwrap()
}

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn six_letter_passes_with_exact_slacks() {
    let report = cert(SIX_LETTER).check_main();
    assert!(report.pass());
    let slacks: Vec<(usize, Rational)> = report
        .verdicts()
        .iter()
        .map(|v| (v.length, v.slack.clone()))
        .collect();
    assert_eq!(
        slacks,
        vec![(1, rat(31, 96)), (3, rat(29, 48)), (4, rat(0, 1))]
    );
}

#[test]
fn quaternary_passes_with_exact_slacks() {
    let report = cert(QUATERNARY).check_main();
    assert!(report.pass());
    let slacks: Vec<(usize, Rational)> = report
        .verdicts()
        .iter()
        .map(|v| (v.length, v.slack.clone()))
        .collect();
    assert_eq!(
        slacks,
        vec![(1, rat(169, 2200)), (4, rat(1, 100)), (6, rat(67, 400))]
    );
}

#[test]
fn ternary_passes_and_the_tight_length_is_nine() {
    let c = cert(TERNARY);
    assert_eq!(c.pattern_set().patterns().len(), 1 + 9 * 3);
    let report = c.check_main();
    assert!(report.pass());
    let worst = report.worst();
    assert_eq!(worst.length, 9);
    assert_eq!(worst.slack, rat(33_029, 3_307_500));
}

#[test]
fn perturbed_six_letter_weight_fails() {
    let mut p = parsed(SIX_LETTER);
    p.weights.insert(1, rat(1, 100));
    let report = p.certificate().unwrap().check_main();
    assert!(!report.pass());
}

/// Verdicts of every single-coordinate perturbation: each weight scaled by
/// 11/10 and each threshold lowered by one; frozen once computed.
#[test]
fn perturbation_verdicts_are_locked() {
    type Verdicts = &'static [(usize, bool)];
    let scale = rat(11, 10);
    let cases: &[(&str, Verdicts, Verdicts)] = &[
        (
            SIX_LETTER,
            &[(1, true), (3, true), (4, false)],
            &[(1, false), (3, false), (4, false)],
        ),
        (
            QUATERNARY,
            &[(1, false), (4, true), (6, false)],
            &[(1, false), (4, false), (6, false)],
        ),
        (
            TERNARY,
            &[
                (9, false),
                (19, false),
                (20, false),
                (21, false),
                (22, false),
                (23, false),
                (24, true),
                (25, true),
                (26, false),
                (27, false),
            ],
            &[
                (9, false),
                (19, false),
                (20, false),
                (21, true),
                (22, true),
                (23, true),
                (24, true),
                (25, true),
                (26, true),
                (27, true),
            ],
        ),
    ];
    for (text, weight_verdicts, threshold_verdicts) in cases {
        for &(len, expect_pass) in *weight_verdicts {
            let mut p = parsed(text);
            let bumped = &p.weights[&len] * &scale;
            p.weights.insert(len, bumped);
            let pass = p.certificate().unwrap().check_main().pass();
            assert_eq!(pass, expect_pass, "weight at length {len}");
        }
        for &(len, expect_pass) in *threshold_verdicts {
            let mut p = parsed(text);
            let lowered = p.thresholds[&len] - 1;
            p.thresholds.insert(len, lowered);
            let pass = p.certificate().unwrap().check_main().pass();
            assert_eq!(pass, expect_pass, "threshold at length {len}");
        }
    }
}

/// Brute-force check of the weight-product table against enumeration of all
/// decompositions, on many random instances.
#[test]
fn beta_matches_decomposition_enumeration() {
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use sqfree_core::words::{Alphabet, PartialWord, PatternSet};
    use std::collections::BTreeMap;

    fn best_product(lengths: &[usize], x: &BTreeMap<usize, Rational>, j: usize) -> Rational {
        // max over multiplicity vectors (n_l) with sum l*n_l = j
        fn rec(
            lengths: &[usize],
            x: &BTreeMap<usize, Rational>,
            rem: usize,
            acc: &Rational,
            best: &mut Rational,
        ) {
            match lengths.split_first() {
                None => {
                    if rem == 0 && acc > best {
                        *best = acc.clone();
                    }
                }
                Some((&l, rest)) => {
                    let mut factor = acc.clone();
                    let mut used = 0;
                    loop {
                        rec(rest, x, rem - used, &factor, best);
                        used += l;
                        if used > rem {
                            break;
                        }
                        factor *= &x[&l];
                    }
                }
            }
        }
        let mut best = rat(0, 1);
        rec(lengths, x, j, &rat(1, 1), &mut best);
        best
    }

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let alphabet = Alphabet::new(3).unwrap();
    for _ in 0..200 {
        let n_lengths = rng.gen_range(1..=3);
        let mut lengths: Vec<usize> = Vec::new();
        while lengths.len() < n_lengths {
            let l = rng.gen_range(1..=8);
            if !lengths.contains(&l) {
                lengths.push(l);
            }
        }
        lengths.sort_unstable();
        let p = 2 * lengths.iter().max().unwrap() + rng.gen_range(0..=12);
        let mut thresholds = BTreeMap::new();
        let mut weights = BTreeMap::new();
        let mut patterns = Vec::new();
        for &l in &lengths {
            patterns.push(PartialWord::all_holes(l));
            thresholds.insert(l, 1u64);
            let den = rng.gen_range(2..=12i64);
            let num = rng.gen_range(1..den);
            weights.insert(l, rat(num, den));
        }
        let cert = Certificate::new(
            alphabet,
            PatternSet::new(patterns, p, thresholds).unwrap(),
            weights.clone(),
        )
        .unwrap();
        let beta = cert.beta_table();
        let j = rng.gen_range(0..=p.min(30));
        assert_eq!(
            beta.value(j),
            &best_product(&lengths, &weights, j),
            "lengths {lengths:?} j={j}"
        );
    }
}
