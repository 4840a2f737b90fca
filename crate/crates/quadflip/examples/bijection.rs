//! Labelled trees with a sign to pointed quadrangulations and back.
//!
//! cargo run --example bijection

use quadflip::schaeffer::{phi, phi_inverse, SignedTree};
use quadflip::trees::random_tree;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> quadflip::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for n in [3, 8, 40] {
        let t = random_tree(n, 3, &mut rng);
        for eps in [1, -1] {
            let st = SignedTree::new(t.clone(), eps);
            let q = phi(&st);
            q.map.validate()?;
            let d = q.map.distances_from(q.point);
            let max_label = t.labels().iter().max().copied().unwrap();
            let far = d.iter().max().copied().unwrap();
            println!(
                "n={n:>2} eps={eps:+}  {} vertices, max label {max_label}, farthest from the point {far}",
                q.map.vertex_count()
            );
            assert_eq!(phi_inverse(&q), st);
        }
    }

    let st = SignedTree::new(quadflip::trees::ColouredTree::parse("(+)(-(=))", 3)?, 1);
    println!("\n{} -> {}", st.tree.code(), phi(&st).code());
    Ok(())
}
