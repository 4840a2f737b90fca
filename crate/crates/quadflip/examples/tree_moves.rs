//! Coloured plane trees and the leaf moves on them.
//!
//! cargo run --example tree_moves

use quadflip::trees::{count_formula, enumerate, ColouredTree, Dir};

fn main() -> quadflip::Result<()> {
    for r in 1..=3 {
        let sizes: Vec<String> = (0..=6).map(|n| count_formula(n, r).to_string()).collect();
        println!("r={r}: {}", sizes.join(" "));
    }

    // labelled trees write colours as label increments
    let t = ColouredTree::parse("(+(=)(-))(+)", 3)?;
    println!("\n{}  labels {:?}  height {}", t.code(), t.labels(), t.height());
    for v in t.leaves() {
        println!(
            "leaf {v}: right {}  left {}  recolour- {}",
            t.translate(v, Dir::Right)?.code(),
            t.translate(v, Dir::Left)?.code(),
            t.recolour(v, 3)?.code()
        );
    }

    // every replanting of the first leaf
    let v = t.leaves()[0];
    let mut seen: Vec<String> = (1..2 * t.n()).flat_map(|k| (1..=3).map(move |c| (k, c))).map(|(k, c)| t.replant(v, k, c).unwrap().code()).collect();
    seen.sort();
    seen.dedup();
    println!("\nleaf {v} replants to {} distinct trees", seen.len());

    let (left, right, c) = t.split_lr()?;
    println!("split: left {} right {} colour {c}", left.code(), right.code());
    assert_eq!(ColouredTree::join_lr(&left, &right, c), t);

    let small = enumerate(2, 2);
    println!("\nT^(2)_2: {}", small.iter().map(|t| t.code()).collect::<Vec<_>>().join(" "));
    Ok(())
}
