use quadflip::flip_paths::*;
use quadflip::schaeffer::{phi, SignedTree};
use quadflip::trees::{ColouredTree, Dir};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn every_label_verifies_up_to_three_edges() {
    for n in 1..=3 {
        let labels = all_labels(n);
        for l in &labels {
            let rep = verify_label(l);
            assert!(rep.ok, "{} {:?}", rep.params, rep.error);
        }
    }
    assert_eq!(all_labels(3).len(), 2835);
}

#[test]
fn random_labels_verify_on_larger_trees() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in [6, 10, 15] {
        for _ in 0..60 {
            let l = random_label(n, &mut rng);
            let rep = verify_label(&l);
            assert!(rep.ok, "{} {:?}", rep.params, rep.error);
        }
    }
}

#[test]
fn root_reversal_swaps_the_sign() {
    let t = ColouredTree::parse("(+(-))(=)", 3).unwrap();
    let p = path_root_reversal(&t);
    assert!(p.len() <= 5);
    assert_eq!(p.start.code(), phi(&SignedTree::new(t.clone(), 1)).code());
    assert!(ends_at(&p, &SignedTree::new(t, -1)));
}

#[test]
fn translation_path_reaches_the_translated_tree() {
    let t = ColouredTree::parse("(+(+)(=))(-)", 3).unwrap();
    for v in t.leaves() {
        for dir in [Dir::Right, Dir::Left] {
            for eps in [1, -1] {
                let p = path_leaf_translation(&t, v, dir, eps).unwrap();
                assert!(p.len() <= 6 * t.n() + 17);
                assert!(ends_at(&p, &SignedTree::new(t.translate(v, dir).unwrap(), eps)));
                let back = p.reversed();
                assert_eq!(back.end().code(), p.start.code());
            }
        }
    }
}

#[test]
fn colour_change_rejects_internal_vertices() {
    let t = ColouredTree::parse("(+(+))", 3).unwrap();
    let internal = (0..=2).find(|&v| v != t.root() && !t.is_leaf(v)).unwrap();
    assert!(path_colour_change(&t, internal, PLUS, 1).is_err());
}

#[test]
fn congestion_is_frozen_for_small_sizes() {
    // recorded from exhaustive audits
    let s2 = audit_flip_congestion(2).unwrap().summary(2);
    assert_eq!((s2.root_reversal_max, s2.colour_change_max, s2.translation_max, s2.max_length), (6, 4, 10, 19));
    let s3 = audit_flip_congestion(3).unwrap().summary(3);
    assert_eq!((s3.root_reversal_max, s3.colour_change_max, s3.translation_max, s3.max_length), (5, 4, 10, 23));
}
