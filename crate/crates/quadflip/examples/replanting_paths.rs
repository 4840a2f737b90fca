//! The weight hierarchy on leaf deletions and the random replanting paths
//! built from it.
//!
//! cargo run --release --example replanting_paths

use num_traits::Zero;
use quadflip::canonical_paths::*;
use quadflip::trees::ColouredTree;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> quadflip::Result<()> {
    println!("constants at n=6: {:?}", constants(6)?.iter().map(|c| c.to_string()).collect::<Vec<_>>());

    let h = Hierarchy::new();
    let t = ColouredTree::parse("(1(2)(1))(2(1))", 2)?;
    println!("\nweights from {}:", t.code());
    for (s, w) in h.weights(&t) {
        println!("  {} : {w}", s.code());
    }

    let audit = audit_hierarchy(6, 2, 6)?;
    println!("\naudit n=6 r=2 over {} trees: rows {} columns {} support {}", audit.trees, audit.rows_ok, audit.columns_ok, audit.support_ok);

    let fib = FiberMap::new(3, 1)?;
    let (x, y) = (&fib.trees[0], &fib.trees[4]);
    let paths = enumerate_gamma(x, y, &h, &fib)?;
    let total = paths.iter().fold(num_rational::BigRational::zero(), |a, (_, m)| a + m);
    println!("\n{} -> {}: {} paths, total mass {total}", x.code(), y.code(), paths.len());

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let fib = FiberMap::new(5, 2)?;
    let (x, y) = (&fib.trees[17], &fib.trees[900]);
    let p = sample_gamma(x, y, &h, &fib, &mut rng)?;
    p.validate(&fib)?;
    let states = p.states();
    println!("\nsampled path:");
    for s in &states {
        println!("  {}", s.code());
    }
    let ex = expand_translations(&states)?;
    println!("as translations and recolourings: {} moves", ex.len());

    let worst = (0..=6).map(|i| audit_congestion(3, i, &h, &FiberMap::new(3, 1).unwrap())).collect::<quadflip::Result<Vec<_>>>()?;
    println!("\ncongestion by position at n=3 r=1: {:?}", worst.iter().map(|c| c.to_string()).collect::<Vec<_>>());
    Ok(())
}
