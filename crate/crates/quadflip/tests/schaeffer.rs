use proptest::prelude::*;
use quadflip::maps::PointedQuadrangulation;
use quadflip::schaeffer::*;
use quadflip::trees::{enumerate, random_tree, ColouredTree};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Tree labels against distances to the distinguished vertex, measured from
/// the tree's root vertex.
fn distance_identity(t: &ColouredTree, q: &PointedQuadrangulation) -> bool {
    let d = q.map.distances_from(q.point);
    let lab = t.labels();
    let base = d[t.root() as usize] as i32;
    (0..=t.n()).all(|v| lab[v] == d[v] as i32 - base)
}

#[test]
fn phi_is_a_bijection_on_small_sizes() {
    for n in 1..=4 {
        let all = enumerate_pointed(n);
        let mut codes: Vec<String> = all.iter().map(|(_, q)| q.code()).collect();
        codes.sort();
        codes.dedup();
        assert_eq!(codes.len(), all.len());
        for (st, q) in &all {
            assert_eq!(&phi_inverse(q), st);
            assert!(distance_identity(&st.tree, q), "{}", st.tree.code());
        }
    }
}

#[test]
fn literal_origin_identity_needs_an_offset_for_plus() {
    // with the map origin in place of the tree root the identity is exact for
    // sign -1 and off by one for sign +1
    for t in enumerate(3, 3) {
        for eps in [1i8, -1] {
            let q = phi(&SignedTree::new(t.clone(), eps));
            let d = q.map.distances_from(q.point);
            let rho = d[q.map.origin() as usize] as i32;
            let shift = if eps == 1 { 1 } else { 0 };
            let lab = t.labels();
            for v in 0..=t.n() {
                assert_eq!(lab[v], d[v] as i32 - rho - shift);
            }
        }
    }
}

#[test]
fn nonnegative_trees_give_maps_pointed_at_their_origin() {
    let t = ColouredTree::parse("(+(=))(+)", 3).unwrap();
    let q = phi_origin_pointed(&t).unwrap();
    q.validate().unwrap();
    assert_eq!(q.radius() as i32, t.labels().iter().max().unwrap() + 1);
    assert!(phi_origin_pointed(&ColouredTree::parse("(-)", 3).unwrap()).is_err());
}

proptest! {
    #[test]
    fn round_trip_on_random_trees(n in 1usize..25, seed in any::<u64>(), plus in any::<bool>()) {
        let t = random_tree(n, 3, &mut ChaCha8Rng::seed_from_u64(seed));
        let st = SignedTree::new(t, if plus { 1 } else { -1 });
        let q = phi(&st);
        q.map.validate().unwrap();
        prop_assert_eq!(q.map.vertex_count(), n + 2);
        prop_assert!(distance_identity(&st.tree, &q));
        prop_assert_eq!(phi_inverse(&q), st);
    }
}
