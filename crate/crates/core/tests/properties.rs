use std::collections::BTreeSet;

use proptest::prelude::*;

use pisotfactor::algebra::{eventual_rank, perron_data, IntMatrix, RankField};
use pisotfactor::cohomology::h1_lower_bound;
use pisotfactor::factors::isomorphic_up_to_relabeling;
use pisotfactor::properize::properize;
use pisotfactor::{Substitution, Symbol};

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
}

fn substitution(n: usize, max_len: usize) -> impl Strategy<Value = Substitution> {
    prop::collection::vec(prop::collection::vec(0..n, 1..=max_len), n).prop_map(move |rules| {
        let words = rules.into_iter().map(|r| r.into_iter().map(Symbol).collect()).collect();
        Substitution::new("random", names(n), words).unwrap()
    })
}

/// Primitive and aperiodic, on two or three letters.
fn analysable() -> impl Strategy<Value = Substitution> {
    (2usize..=3)
        .prop_flat_map(|n| substitution(n, 4))
        .prop_filter("primitive and aperiodic", |s| {
            s.is_primitive() && s.is_aperiodic().map(|a| a.aperiodic).unwrap_or(false)
        })
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn small_matrix(n: usize) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec(prop::collection::vec(-4i64..=4, n), n).prop_map(|rows| IntMatrix::from_i64(&rows))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn abelianization_is_a_homomorphism(
        (a, b) in (2usize..=3).prop_flat_map(|n| (substitution(n, 3), substitution(n, 3)))
    ) {
        let c = a.compose(&b).unwrap();
        prop_assert_eq!(c.abelianization(), a.abelianization().mul(&b.abelianization()));
    }

    #[test]
    fn eventual_rank_is_invariant_under_relabeling(
        (m, perm) in (1usize..=5).prop_flat_map(|n| (small_matrix(n), permutation(n)))
    ) {
        let p = m.permuted(&perm);
        prop_assert_eq!(eventual_rank(&m, RankField::Rationals), eventual_rank(&p, RankField::Rationals));
        prop_assert_eq!(eventual_rank(&m, RankField::Gf2), eventual_rank(&p, RankField::Gf2));
    }

    #[test]
    fn eventual_rank_is_the_rank_of_a_high_power(m in (1usize..=5).prop_flat_map(small_matrix)) {
        let n = m.nrows();
        let r = eventual_rank(&m, RankField::Rationals);
        prop_assert_eq!(r, m.pow(n).rank(RankField::Rationals));
        prop_assert_eq!(r, m.pow(n + 3).rank(RankField::Rationals));
    }

    #[test]
    fn pair_blocks_split(
        (x, y) in (1usize..=4).prop_flat_map(|n| (small_matrix(n), small_matrix(n)))
    ) {
        // [[X, Y], [Y, X]] ~ [[X+Y, Y], [0, X-Y]], so the ranks of the diagonal blocks add up
        let n = x.nrows();
        let id = IntMatrix::identity(n);
        let z = IntMatrix::zeros(n, n);
        let m = IntMatrix::from_blocks(&x, &y, &y, &x);
        let b = IntMatrix::from_blocks(&x.add(&y), &y, &z, &x.sub(&y));
        let p = IntMatrix::from_blocks(&id, &z, &id.neg(), &id);
        prop_assert_eq!(p.mul(&m), b.mul(&p));
        prop_assert_eq!(m.determinant(), x.add(&y).determinant() * x.sub(&y).determinant());
    }

    #[test]
    fn language_is_factorial(s in analysable(), k in 1usize..6) {
        let short = s.language(k).unwrap();
        let long = s.language(k + 1).unwrap();
        for w in &long {
            prop_assert!(short.contains(&w[..k].to_vec()));
            prop_assert!(short.contains(&w[1..].to_vec()));
        }
        // every word extends to the right
        let prefixes: BTreeSet<_> = long.iter().map(|w| w[..k].to_vec()).collect();
        prop_assert_eq!(prefixes, short);
    }

    #[test]
    fn properization_commutes_with_decoding(s in analysable()) {
        let pr = properize(&s).unwrap();
        prop_assert!(pr.proper.is_proper());
        for a in pr.proper.symbols() {
            let lhs = pr.decode(pr.proper.rule(a));
            let rhs = s.iterate(&pr.word_alphabet[a.0], pr.power);
            prop_assert_eq!(lhs, rhs);
        }
        let k = 6;
        let decoded: BTreeSet<_> = {
            let mut w = vec![Symbol(0)];
            while pr.decode(&w).len() < 4000 {
                w = pr.proper.apply(&w);
            }
            pr.decode(&w).windows(k).map(|x| x.to_vec()).collect()
        };
        prop_assert!(decoded.is_subset(&s.language(k).unwrap()));
    }

    #[test]
    fn cohomology_bound_is_relabeling_invariant(s in analysable(), seed in any::<u64>()) {
        let n = s.size();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.rotate_left(seed as usize % n);
        let t = s.relabeled(&perm, names(n)).unwrap();
        prop_assert!(isomorphic_up_to_relabeling(&s, &t).is_some());
        let (a, b) = (h1_lower_bound(&s).unwrap(), h1_lower_bound(&t).unwrap());
        prop_assert_eq!((a.evrank_q, a.n_periodic, a.lower_bound), (b.evrank_q, b.n_periodic, b.lower_bound));
    }

    #[test]
    fn periodic_words_are_nonempty_and_legal(s in analysable()) {
        let seeds = s.periodic_biinfinite_words().unwrap();
        prop_assert!(!seeds.is_empty());
        let two = s.language(2).unwrap();
        for sd in &seeds {
            prop_assert!(two.contains(&vec![sd.left, sd.right]));
            let (l, r) = (s.iterate(&[sd.left], sd.period), s.iterate(&[sd.right], sd.period));
            prop_assert_eq!(l.last(), Some(&sd.left));
            prop_assert_eq!(r.first(), Some(&sd.right));
        }
    }

    #[test]
    fn perron_root_lies_between_the_extreme_column_sums(s in analysable()) {
        let p = perron_data(&s.abelianization()).unwrap();
        let sums: Vec<usize> = s.rules().iter().map(Vec::len).collect();
        let l = p.lambda_f64();
        prop_assert!(l >= *sums.iter().min().unwrap() as f64 - 1e-9);
        prop_assert!(l <= *sums.iter().max().unwrap() as f64 + 1e-9);
    }
}
