mod common;

use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use succinct_dyn::annet::{expand_dynamics_with, lookup_table_network};
use succinct_dyn::arith::{coprime_power, find_solutions, periodicity};
use succinct_dyn::graph::{delta, delta_size};
use succinct_dyn::logic::{ef_equiv, ef_equiv_by_game, evaluate_with, random_corpus};
use succinct_dyn::par::Exec;
use succinct_dyn::reduce::{truth_word, PropFormula};
use succinct_dyn::treedec::remark2_check;
use succinct_dyn::Digraph;

#[test]
fn class_counts_match_known_sequences() {
    let functional: Vec<usize> = (1..=6).map(|n| common::functional_classes(n).len()).collect();
    assert_eq!(functional, [1, 3, 7, 19, 47, 130]);
    let all: Vec<usize> = (0..=3).map(|n| common::digraph_classes(n).len()).collect();
    assert_eq!(all, [1, 2, 10, 104]);
}

#[test]
fn coprime_power_is_minimal() {
    for q in 2..=6u64 {
        for a in 1..=30u64 {
            let cp = coprime_power(a, q);
            let brute = (0..=8u32)
                .find(|&eta| {
                    let g = num_integer::gcd(a, q.pow(eta));
                    num_integer::gcd(a / g, q) == 1
                })
                .unwrap();
            assert_eq!(cp.eta, brute, "({a},{q})");
            assert_eq!(cp.a_prime * num_integer::gcd(a, q.pow(cp.eta)), a);
        }
    }
}

#[test]
fn period_multiples_stay_periods() {
    for q in 2..=6u64 {
        for a in 1..=30u64 {
            for b in 1..=30u64 {
                let Some((mu, _)) = periodicity(a, b, q) else { continue };
                for m in 1..=8u32 {
                    let big = BigUint::from(b) * BigUint::from(q).pow(m * mu);
                    assert_eq!(big % a, BigUint::from(b % a), "({a},{b},{q}) m={m}");
                }
            }
        }
    }
}

#[test]
fn ef_typer_agrees_with_game_search() {
    let graphs: Vec<Digraph> = (0..=2).flat_map(common::digraph_classes).collect();
    for g in &graphs {
        for h in &graphs {
            for m in 0..=2 {
                assert_eq!(ef_equiv(g, h, m).unwrap(), ef_equiv_by_game(g, h, m), "{g:?} {h:?} m={m}");
            }
        }
    }
}

#[test]
fn execution_modes_agree() {
    let corpus = random_corpus(11, 60, 2);
    for g in common::digraph_classes(3).iter().step_by(7) {
        for f in &corpus {
            assert_eq!(evaluate_with(f, g, Exec::Sequential).unwrap(), evaluate_with(f, g, Exec::Parallel).unwrap());
        }
    }
    for g in common::functional_classes(5) {
        let d = lookup_table_network(&g, &[5]).unwrap();
        let seq = expand_dynamics_with(&d, Exec::Sequential, 1 << 10).unwrap();
        let par = expand_dynamics_with(&d, Exec::Parallel, 1 << 10).unwrap();
        assert!(seq.same_indexed_edges(&par));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn word_size_law(seed in any::<u64>(), symbols in 1usize..=3, word in prop::collection::vec(0usize..3, 1..6)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (gamma, tfam) = common::random_family(&mut rng, symbols);
        let word: Vec<String> = word.iter().map(|&i| ((b'a' + (i % symbols) as u8) as char).to_string()).collect();
        let parts: Vec<usize> = word.iter().map(|w| gamma.get(w).unwrap().len()).collect();
        let k = gamma.get(&word[0]).unwrap().k();
        let want = parts.iter().sum::<usize>() - (word.len() - 1) * k;
        prop_assert_eq!(delta(&gamma, &word).unwrap().len(), want);
        prop_assert_eq!(delta_size(&gamma, &word).unwrap(), want);
        prop_assert!(remark2_check(&gamma, &tfam, &word).unwrap());
    }

    #[test]
    fn solutions_satisfy_the_equation(a in 1u64..60, b in 0u64..60, q in 2u64..7) {
        for w in find_solutions(a, b, q, 30) {
            prop_assert_eq!(BigUint::from(a) * &w.k + b, BigUint::from(q).pow(w.n));
        }
    }

    #[test]
    fn truth_word_round_trips(table in prop::collection::vec(any::<bool>(), 8)) {
        let f = PropFormula::from_truth_table(3, &table).unwrap();
        let word: String = table.iter().map(|&b| if b { '1' } else { '0' }).collect();
        prop_assert_eq!(truth_word(&f), word.clone());
        let reparsed = PropFormula::parse(&f.to_string(), Some(3)).unwrap();
        prop_assert_eq!(truth_word(&reparsed), word);
    }
}
