//! Finite-size gap comparisons between the chains, and the far-set law check.
//!
//! cargo run --release --example comparison_checks

use quadflip::chains::DEFAULT_CEILING;
use quadflip::spectral::{law_identity_check, verify_inequalities};

fn main() -> quadflip::Result<()> {
    let rep = verify_inequalities(3, DEFAULT_CEILING)?;
    println!(
        "n=3 gaps: flip {:.5} pointed {:.5} translate {:.5} xtilde {:.5} replant {:.5}",
        rep.flip, rep.flip_pointed, rep.translate, rep.xtilde, rep.replant
    );
    println!("path length {} congestion {} constant {:.2}", rep.comparison.max_length, rep.comparison.max_congestion, rep.comparison.comparison_constant);
    for c in &rep.checks {
        println!("  [{}] {}: {:.6} vs {:.6}", if c.ok { "ok" } else { "FAIL" }, c.name, c.lhs, c.rhs);
    }

    for n in 1..=3 {
        let law = law_identity_check(n);
        println!("\nn={n} far {:?}\n    ball-1 {:?}  equal={}", law.far_set, law.ball_minus_one, law.equal);
    }
    Ok(())
}
