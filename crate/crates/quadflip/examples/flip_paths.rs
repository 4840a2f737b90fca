//! Flip sequences realising each tree move on the map side.
//!
//! cargo run --release --example flip_paths

use quadflip::flip_paths::{audit_flip_congestion, random_label, verify_label};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> quadflip::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..6 {
        let label = random_label(12, &mut rng);
        let rep = verify_label(&label);
        println!("{:?} {}: {} flips (bound {}) ok={}", rep.family, rep.params, rep.length, rep.bound, rep.ok);
    }

    for n in 2..=3 {
        let s = audit_flip_congestion(n)?.summary(n);
        println!(
            "\nn={n}: most labels through one flip: reversal {}, colour {}, translation {}; longest path {}",
            s.root_reversal_max, s.colour_change_max, s.translation_max, s.max_length
        );
    }
    Ok(())
}
