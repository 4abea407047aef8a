//! Invariants over generated tables and words.

use cfree::coalgebra::{coproduct, half_coproduct_left, half_coproduct_right};
use cfree::cumulants::{self, CumulantKind, StatePair};
use cfree::partitions::{self, SetPartition};
use cfree::series::{self, LieElement};
use cfree::{Alphabet, BarWord, CumulantTable, Domain, MomentTable, Scalar, Word, WordTable};
use num_bigint::BigInt;
use proptest::prelude::*;

fn domain(letters: usize, max_len: usize) -> Domain {
    let names: Vec<String> = ["a", "b", "c"][..letters].iter().map(|s| s.to_string()).collect();
    Domain::new(Alphabet::new(&names).unwrap(), max_len).unwrap()
}

fn scalar() -> impl Strategy<Value = Scalar> {
    (-9i64..=9, 1i64..=9).prop_map(|(p, q)| Scalar::new(BigInt::from(p), BigInt::from(q)))
}

/// A table on `d` with independent small rational entries.
fn table(d: Domain) -> impl Strategy<Value = WordTable> {
    let n = d.words().len();
    prop::collection::vec(scalar(), n).prop_map(move |values| {
        let mut it = values.into_iter();
        WordTable::from_fn(&d, |_| it.next().unwrap())
    })
}

fn moments(d: Domain) -> impl Strategy<Value = MomentTable> {
    table(d).prop_map(MomentTable::new)
}

fn cumulant_table(d: Domain) -> impl Strategy<Value = CumulantTable> {
    table(d).prop_map(CumulantTable::new)
}

fn word(letters: usize, max_len: usize) -> impl Strategy<Value = Word> {
    let names = ["a", "b", "c"];
    prop::collection::vec(0..letters, 1..=max_len)
        .prop_map(move |ix| Word::from_names(&ix.iter().map(|&i| names[i]).collect::<Vec<_>>()).unwrap())
}

fn same(left: &WordTable, right: &WordTable) -> bool {
    left.entries() == right.entries()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transforms_invert(phi in moments(domain(2, 4))) {
        for kind in CumulantKind::ALL {
            let table = cumulants::cumulants(&phi, kind).unwrap();
            prop_assert!(same(&cumulants::moments(&table, kind).unwrap(), &phi), "{kind}");
        }
    }

    #[test]
    fn conversion_triangle_closes(phi in moments(domain(2, 4))) {
        use CumulantKind::*;
        let kappa = cumulants::free_cumulants(&phi).unwrap();
        let beta = cumulants::convert(&kappa, Free, Boolean).unwrap();
        prop_assert!(same(&beta, &cumulants::boolean_cumulants(&phi).unwrap()));
        let rho = cumulants::convert(&beta, Boolean, Monotone).unwrap();
        prop_assert!(same(&rho, &cumulants::monotone_cumulants(&phi).unwrap()));
        prop_assert!(same(&cumulants::convert(&rho, Monotone, Free).unwrap(), &kappa));
    }

    #[test]
    fn single_letter_cumulants_are_moments(phi in moments(domain(3, 2))) {
        for kind in CumulantKind::ALL {
            let table = cumulants::cumulants(&phi, kind).unwrap();
            for w in phi.domain().words_of_len(1) {
                prop_assert_eq!(table.get(&w).unwrap(), phi.get(&w).unwrap());
            }
        }
    }

    #[test]
    fn free_and_boolean_convolutions_add_cumulants(
        phi1 in moments(domain(2, 4)),
        phi2 in moments(domain(2, 4)),
    ) {
        let free = cumulants::convolve_free(&phi1, &phi2).unwrap();
        let k = cumulants::free_cumulants(&phi1).unwrap().add(&cumulants::free_cumulants(&phi2).unwrap()).unwrap();
        prop_assert!(same(&cumulants::free_cumulants(&free).unwrap(), &k));
        let boolean = cumulants::convolve_boolean(&phi1, &phi2).unwrap();
        let b = cumulants::boolean_cumulants(&phi1).unwrap().add(&cumulants::boolean_cumulants(&phi2).unwrap()).unwrap();
        prop_assert!(same(&cumulants::boolean_cumulants(&boolean).unwrap(), &b));
    }

    #[test]
    fn unit_state_is_neutral(phi in moments(domain(2, 4))) {
        let unit = MomentTable::unit_state(phi.domain());
        prop_assert!(same(&cumulants::convolve_free(&phi, &unit).unwrap(), &phi));
        prop_assert!(same(&cumulants::convolve_boolean(&unit, &phi).unwrap(), &phi));
        prop_assert!(same(&cumulants::convolve_monotone(&phi, &unit).unwrap(), &phi));
        prop_assert!(same(&cumulants::convolve_monotone(&unit, &phi).unwrap(), &phi));
    }

    #[test]
    fn cfree_round_trip(phi in moments(domain(2, 4)), psi in moments(domain(2, 4))) {
        let pair = StatePair::new(phi.clone(), psi.clone()).unwrap();
        let r = cumulants::cfree_cumulants(&pair).unwrap();
        prop_assert!(same(&cumulants::moments_from_cfree(&r, &psi).unwrap(), &phi));
        let back = StatePair::from_json(&pair.to_json()).unwrap();
        prop_assert_eq!(back, pair);
    }

    #[test]
    fn adjoint_actions_are_mutually_inverse(
        x in cumulant_table(domain(2, 4)),
        y in cumulant_table(domain(2, 4)),
    ) {
        let (x, y) = (LieElement::from_table(&x), LieElement::from_table(&y));
        let d = domain(2, 4);
        let there = series::ad_upper(&x, &series::ad_lower(&x, &y)).materialize(&d).unwrap();
        prop_assert!(same(&there, &y.materialize(&d).unwrap()));
        let back = series::ad_lower(&x, &series::ad_upper(&x, &y)).materialize(&d).unwrap();
        prop_assert!(same(&back, &y.materialize(&d).unwrap()));
    }

    #[test]
    fn coproduct_splits_and_counts(w in word(3, 7)) {
        let b = BarWord::from(w.clone());
        let full = coproduct(&b);
        let halves = half_coproduct_left(&b).unwrap().add(&half_coproduct_right(&b).unwrap());
        prop_assert_eq!(&halves, &full);
        prop_assert_eq!(full.total_weight(), 1i64 << w.len());
        for (l, r, _) in half_coproduct_left(&b).unwrap().terms() {
            prop_assert_eq!(l.factors().first().map(|f| f.letters()[0]), Some(w.letters()[0]));
            prop_assert_eq!(l.degree() + r.degree(), w.len());
        }
    }

    #[test]
    fn bar_words_round_trip_through_text(a in word(3, 4), b in word(3, 4)) {
        let bar = BarWord::new(vec![a, b]);
        prop_assert_eq!(BarWord::parse(&bar.to_string()).unwrap(), bar);
    }

    #[test]
    fn tables_round_trip_through_json(t in table(domain(2, 3))) {
        prop_assert_eq!(WordTable::from_json(&t.to_json()).unwrap(), t);
    }

    #[test]
    fn partitions_canonicalize(n in 1usize..=7, seed in any::<u64>()) {
        // Random restricted growth string, then blocks in scrambled order.
        let mut labels = vec![0usize];
        let mut s = seed;
        for i in 1..n {
            let top = labels.iter().max().unwrap() + 2;
            labels.push((s % top as u64) as usize);
            s = s.rotate_left(7) ^ (i as u64).wrapping_mul(0x9e37_79b9);
        }
        let k = labels.iter().max().unwrap() + 1;
        let mut blocks: Vec<Vec<usize>> = (0..k).map(|j| (1..=n).filter(|&i| labels[i - 1] == j).collect()).collect();
        blocks.reverse();
        let pi = SetPartition::new(n, blocks).unwrap();
        prop_assert_eq!(pi.len(), k);
        prop_assert_eq!(pi.blocks().iter().map(Vec::len).sum::<usize>(), n);
        if pi.is_noncrossing() {
            let all = partitions::enumerate_nc(n).unwrap();
            prop_assert!(all.contains(&pi));
            let sizes = partitions::nesting_forest(&pi).unwrap().subtree_sizes();
            let product: BigInt = sizes.iter().map(|&s| BigInt::from(s)).product();
            prop_assert_eq!(partitions::tree_factorial(&pi).unwrap(), product);
        }
    }
}

/// With all cumulants equal to 1 the partition sums count partitions.
#[test]
fn unit_cumulants_count_partitions() {
    let d = Domain::univariate("a", 8).unwrap();
    let ones = CumulantTable::new(WordTable::from_fn(&d, |_| Scalar::from_integer(1.into())));
    for w in d.words() {
        let n = w.len();
        let free = partitions::free_moment_sum(&ones, &w).unwrap();
        let boolean = partitions::boolean_moment_sum(&ones, &w).unwrap();
        assert_eq!(free, Scalar::from_integer(partitions::catalan(n)));
        assert_eq!(boolean, Scalar::from_integer(BigInt::from(1u64 << (n - 1))));
        let engine = series::exp_left(&LieElement::from_table(&ones)).eval_word(&w).unwrap();
        assert_eq!(engine, free);
    }
}

/// Semicircle: free cumulants vanish past order 2.
#[test]
fn semicircle_moments_are_catalan() {
    let d = Domain::univariate("s", 8).unwrap();
    let kappa =
        CumulantTable::new(WordTable::from_fn(&d, |w| Scalar::from_integer(BigInt::from((w.len() == 2) as u8))));
    let phi = cumulants::moments_from_free(&kappa).unwrap();
    for w in d.words() {
        let n = w.len();
        let expected = if n % 2 == 0 { partitions::catalan(n / 2) } else { BigInt::from(0) };
        assert_eq!(phi.get(&w).unwrap(), &Scalar::from_integer(expected), "m_{n}");
    }
}
