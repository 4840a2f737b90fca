//! Edge flips on rooted quadrangulations, and a flip sequence down to the
//! radius-one map.
//!
//! cargo run --example map_flips

use quadflip::maps::{flips_to_q0, FlipMove, Quadrangulation};
use quadflip::schaeffer::enumerate_rooted;

fn main() -> quadflip::Result<()> {
    let q0 = Quadrangulation::q0(3)?;
    println!("q0(3) = {}", q0.code());

    let maps = enumerate_rooted(3);
    println!("|Q_3| = {}", maps.len());

    let (_, q) = maps.iter().max_by_key(|(_, q)| q.radius()).unwrap();
    println!("\nstart {}  radius {}", q.code(), q.radius());
    for e in 0..q.edge_count() {
        let plus = q.flip(FlipMove::plus(e))?;
        let tag = if q.is_degenerate(e) { " (degenerate)" } else { "" };
        println!("  flip {e}+ -> radius {}{tag}", plus.radius());
        assert_eq!(plus.flip(FlipMove::minus(e))?.code(), q.code());
    }

    let moves = flips_to_q0(q);
    let mut cur = q.clone();
    print!("\nto q0 in {} flips:", moves.len());
    for m in &moves {
        cur = cur.flip(*m)?;
        print!(" {}{}", m.edge, if m.sign == quadflip::maps::Sign::Plus { '+' } else { '-' });
    }
    println!();
    assert_eq!(cur.code(), q0.code());
    Ok(())
}
