use proptest::prelude::*;
use quadflip::maps::*;
use quadflip::schaeffer::{enumerate_pointed, enumerate_rooted, phi, SignedTree};
use quadflip::trees::random_tree;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn plus_then_minus_is_identity_on_small_maps() {
    for n in 1..=3 {
        for (_, q) in enumerate_rooted(n) {
            for e in 0..q.edge_count() {
                let p = q.flip(FlipMove::plus(e)).unwrap();
                p.validate().unwrap();
                assert_eq!(p.flip(FlipMove::minus(e)).unwrap().code(), q.code(), "edge {e} of {}", q.code());
                let m = q.flip(FlipMove::minus(e)).unwrap();
                assert_eq!(m.flip(FlipMove::plus(e)).unwrap().code(), q.code());
            }
        }
    }
}

#[test]
fn degenerate_edges_flip_the_same_both_ways() {
    let mut seen = 0;
    for (_, q) in enumerate_rooted(3) {
        for e in 0..q.edge_count() {
            if q.is_degenerate(e) {
                seen += 1;
                assert_eq!(q.flip(FlipMove::plus(e)).unwrap().code(), q.flip(FlipMove::minus(e)).unwrap().code());
            }
        }
    }
    assert!(seen > 0);
}

#[test]
fn counts() {
    assert_eq!(enumerate_rooted(1).len(), 2);
    assert_eq!(enumerate_rooted(2).len(), 9);
    assert_eq!(enumerate_rooted(3).len(), 54);
    assert_eq!(enumerate_pointed(2).len(), 36);
}

#[test]
fn q0_has_radius_one() {
    for n in 1..=8 {
        let q = Quadrangulation::q0(n).unwrap();
        q.validate().unwrap();
        assert_eq!(q.radius(), 1);
        assert_eq!(q.vertex_count(), n + 2);
        assert_eq!(q.edge_count(), 2 * n);
    }
}

#[test]
fn flips_to_q0_from_every_small_state() {
    for n in 1..=4 {
        let target = Quadrangulation::q0(n).unwrap().code();
        for (_, q) in enumerate_rooted(n) {
            assert_eq!(q.apply(&flips_to_q0(&q)).unwrap().code(), target, "from {}", q.code());
        }
        let target = PointedQuadrangulation::q0(n).unwrap().code();
        for (_, q) in enumerate_pointed(n) {
            assert_eq!(q.apply(&flips_to_q0_pointed(&q)).unwrap().code(), target, "from {}", q.code());
        }
    }
}

#[test]
fn malformed_codes_are_rejected() {
    assert!(decode("QM v2 n=1 root=0 point=- sigma=0,1,2,3").is_err());
    assert!(decode("QM v1 n=1 root=0 point=- sigma=0,1").is_err());
    assert!(decode("hello").is_err());
    assert!(matches!(Quadrangulation::q0(2).unwrap().flip(FlipMove::plus(99)), Err(quadflip::Error::InvalidEdge(99))));
}

#[test]
fn ball_and_far_set_small_cases() {
    for (_, q) in enumerate_rooted(2) {
        let d = q.distances_from(q.origin());
        assert_eq!(q.ball_size(0), 1);
        assert_eq!(q.ball_size(q.radius()), q.vertex_count());
        assert!(q.far_set_size() >= 1 && q.far_set_size() < q.vertex_count());
        assert_eq!(d.iter().filter(|&&x| x == 0).count(), 1);
    }
}

fn arb_pointed() -> impl Strategy<Value = PointedQuadrangulation> {
    (1usize..10, any::<u64>(), any::<bool>()).prop_map(|(n, seed, plus)| {
        let t = random_tree(n, 3, &mut ChaCha8Rng::seed_from_u64(seed));
        phi(&SignedTree::new(t, if plus { 1 } else { -1 }))
    })
}

proptest! {
    #[test]
    fn flips_preserve_validity_and_invert(q in arb_pointed(), e in any::<prop::sample::Index>(), plus in any::<bool>()) {
        let e = e.index(q.map.edge_count());
        let m = if plus { FlipMove::plus(e) } else { FlipMove::minus(e) };
        let p = q.flip(m).unwrap();
        p.map.validate().unwrap();
        prop_assert_eq!(p.flip(m.reversed()).unwrap().code(), q.code());
    }

    #[test]
    fn codes_round_trip(q in arb_pointed()) {
        match decode(&q.code()).unwrap() {
            Decoded::Pointed(p) => prop_assert_eq!(p.code(), q.code()),
            Decoded::Plain(_) => prop_assert!(false, "lost the point"),
        }
    }

    #[test]
    fn flips_change_distances_by_at_most_two(q in arb_pointed(), e in any::<prop::sample::Index>()) {
        let e = e.index(q.map.edge_count());
        let p = q.map.flip(FlipMove::plus(e)).unwrap();
        let (a, b) = (q.map.distances_from(q.map.origin()), p.distances_from(p.origin()));
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((*x as i64 - *y as i64).abs() <= 2);
        }
    }
}
