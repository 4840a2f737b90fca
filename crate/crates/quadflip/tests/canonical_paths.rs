use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use quadflip::canonical_paths::*;
use quadflip::trees::{count_formula, enumerate, random_tree, ColouredTree};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

#[test]
fn constants_small_values() {
    assert_eq!(constant(3, 1).unwrap(), q(1, 2));
    assert_eq!(constant(3, 0).unwrap(), BigRational::zero());
    assert_eq!(constant(3, 2).unwrap(), BigRational::one());
    // 2 * 3 * (12 - 4 - 1) / (3 * 4 * 5)
    assert_eq!(constant(4, 2).unwrap(), q(7, 10));
    for n in 2..=30 {
        assert!(constants_consistent(n), "n={n}");
        assert_eq!(constants(n).unwrap().len(), n);
    }
}

#[test]
fn single_edge_deletes_with_weight_one() {
    let h = Hierarchy::new();
    for r in 1..=3 {
        for t in enumerate(1, r) {
            let w = h.weights(&t);
            assert_eq!(w, vec![(ColouredTree::single(r), BigRational::one())]);
        }
    }
}

#[test]
fn hierarchy_identities_exhaustive() {
    for (n, r) in [(2, 1), (4, 1), (6, 1), (3, 2), (5, 2), (3, 3)] {
        let a = audit_hierarchy(n, r, 5).unwrap();
        assert!(a.rows_ok && a.columns_ok && a.support_ok, "n={n} r={r}");
        assert_eq!(a.support_checked, n <= 5);
        assert_eq!(BigInt::from(a.trees), BigInt::from(count_formula(n, r)));
    }
}

#[test]
fn column_sum_for_two_colours_at_five_edges() {
    // |T_5| / |T_4| = 1344 / 224
    let h = Hierarchy::new();
    let big = enumerate(5, 2);
    let mut col: HashMap<ColouredTree, BigRational> = HashMap::new();
    for t in &big {
        for (s, w) in h.weights(t) {
            *col.entry(s).or_insert_with(BigRational::zero) += w;
        }
    }
    assert_eq!(col.len(), 224);
    assert!(col.values().all(|v| *v == q(6, 1)));
}

#[test]
fn rank_and_unrank_agree_with_enumeration() {
    let ix = TreeIndex::new(2, 5).unwrap();
    for n in 0..=5 {
        let all = enumerate(n, 2);
        assert_eq!(ix.count(n), all.len() as u128);
        let mut ranks: Vec<u128> = all.iter().map(|t| ix.rank(t)).collect();
        for (t, &k) in all.iter().zip(&ranks) {
            assert_eq!(&ix.unrank(n, k), t);
        }
        ranks.sort_unstable();
        assert!(ranks.iter().enumerate().all(|(i, &k)| k == i as u128));
    }
}

#[test]
fn fibers_are_balanced() {
    for r in 1..=3u8 {
        for n in 1..=4 {
            if r == 3 && n == 4 {
                continue;
            }
            let fib = FiberMap::new(n, r).unwrap();
            let (big, small) = (fib.trees.len(), fib.targets.len());
            assert_eq!(fib.max_fiber(), big.div_ceil(small), "n={n} r={r}");
            assert!(fib.max_fiber() <= 8 * r as usize);
        }
    }
}

#[test]
fn gamma_masses_sum_to_one_and_paths_are_valid() {
    let h = Hierarchy::new();
    for (n, r) in [(1, 1), (2, 1), (3, 1), (2, 2)] {
        let fib = FiberMap::new(n, r).unwrap();
        for x in &fib.trees {
            for y in &fib.trees {
                let paths = enumerate_gamma(x, y, &h, &fib).unwrap();
                let total: BigRational = paths.iter().map(|(_, m)| m.clone()).sum();
                assert!(total.is_one(), "{} -> {}", x.code(), y.code());
                for (p, m) in &paths {
                    assert_eq!(&p.mass(&h), m);
                    p.validate(&fib).unwrap();
                    let st = p.states();
                    assert_eq!(st.len(), 2 * n + 1);
                    assert_eq!((&st[0], &st[2 * n]), (x, y));
                    assert!(st.windows(2).all(|w| w[0] == w[1] || is_replant_step(&w[0], &w[1])));
                    assert_eq!(&ReplantPath::from_states(&st).unwrap(), p);
                }
            }
        }
    }
}

#[test]
fn congestion_matches_brute_force() {
    let h = Hierarchy::new();
    for (n, r) in [(2, 1), (2, 2), (3, 1)] {
        let fib = FiberMap::new(n, r).unwrap();
        let mut brute: Vec<HashMap<ColouredTree, BigRational>> = vec![HashMap::new(); 2 * n + 1];
        for x in &fib.trees {
            for y in &fib.trees {
                for (p, m) in enumerate_gamma(x, y, &h, &fib).unwrap() {
                    for (i, s) in p.states().into_iter().enumerate() {
                        *brute[i].entry(s).or_insert_with(BigRational::zero) += &m;
                    }
                }
            }
        }
        for (i, want) in brute.iter().enumerate() {
            assert_eq!(&congestion_at(n, i, &h, &fib).unwrap(), want, "n={n} r={r} i={i}");
        }
    }
}

#[test]
fn congestion_stays_under_the_bound() {
    let h = Hierarchy::new();
    for (n, r) in [(2, 1), (3, 1), (4, 1), (3, 2)] {
        let fib = FiberMap::new(n, r).unwrap();
        let worst = (0..=2 * n).map(|i| audit_congestion(n, i, &h, &fib).unwrap()).max().unwrap();
        assert!(worst <= congestion_bound(n, r), "n={n} r={r}");
        if (n, r) == (3, 1) {
            assert_eq!(worst, q(25, 1));
        }
    }
}

#[test]
fn partial_sums_exhaustive() {
    let h = Hierarchy::new();
    for (n, r) in [(3, 1), (4, 1), (3, 2)] {
        for i in 0..=n {
            assert_eq!(partial_sum_mismatches(n, r, i, &h).unwrap(), 0, "n={n} r={r} i={i}");
        }
    }
}

#[test]
fn spot_checks_past_the_exhaustive_range() {
    let h = Hierarchy::new();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in [8, 12, 20] {
        assert_eq!(spot_check_rows(n, 2, 10, &h, &mut rng), 0, "n={n}");
    }
}

#[test]
fn deletion_sequences_are_distributions() {
    let h = Hierarchy::new();
    for t in enumerate(4, 1) {
        let seqs = deletion_sequences(&t, &h);
        let total: BigRational = seqs.iter().map(|(_, m)| m.clone()).sum();
        assert!(total.is_one());
        for (s, m) in &seqs {
            assert_eq!(&deletion_mass(s, &h), m);
            assert_eq!(s.len(), 5);
        }
        let marg = level_marginal(&t, 2, &h);
        assert!(marg.values().cloned().sum::<BigRational>().is_one());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sampled_paths_expand_and_contract(n in 1usize..7, r in 1u8..=2, sx in any::<u64>(), sy in any::<u64>()) {
        let h = Hierarchy::new();
        let fib = FiberMap::new(n, r).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(sx ^ sy.rotate_left(17));
        let x = random_tree(n, r, &mut ChaCha8Rng::seed_from_u64(sx));
        let y = random_tree(n, r, &mut ChaCha8Rng::seed_from_u64(sy));
        let p = sample_gamma(&x, &y, &h, &fib, &mut rng).unwrap();
        p.validate(&fib).unwrap();
        let st = p.states();
        let ex = expand_translations(&st).unwrap();
        prop_assert!(ex.len() <= 4 * n * n);
        prop_assert_eq!(ex.contract(), st);
        let recolours = ex.moves.iter().filter(|m| matches!(m, XMove::Recolour(_))).count();
        prop_assert_eq!(recolours, 2 * n);
    }

    #[test]
    fn replant_witness_reproduces_the_move(n in 2usize..10, seed in any::<u64>(), pick in any::<prop::sample::Index>(), k in any::<prop::sample::Index>(), c in 1u8..=2) {
        let t = random_tree(n, 2, &mut ChaCha8Rng::seed_from_u64(seed));
        let leaves = t.leaves();
        let v = leaves[pick.index(leaves.len())];
        let s = t.replant(v, k.index(2 * n - 1) + 1, c).unwrap();
        if s != t {
            let (w, kk, cc) = replant_witness(&t, &s).unwrap();
            prop_assert_eq!(t.replant(w, kk, cc).unwrap(), s);
        }
    }
}
