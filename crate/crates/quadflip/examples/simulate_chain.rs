//! Seeded runs of each chain with a few observables.
//!
//! cargo run --release --example simulate_chain

use quadflip::chains::{default_start, simulate, ChainKind, Observable, SimConfig};

fn main() -> quadflip::Result<()> {
    let runs = [
        (ChainKind::Flip, vec![Observable::Radius, Observable::Degree]),
        (ChainKind::FlipPointed, vec![Observable::Radius, Observable::Far]),
        (ChainKind::Translate, vec![Observable::Height, Observable::Leaves]),
        (ChainKind::Replant, vec![Observable::Height, Observable::Leaves]),
        (ChainKind::Xtilde, vec![Observable::Height, Observable::Radius]),
    ];
    for (kind, observables) in runs {
        let n = 30;
        let cfg = SimConfig { kind, n, r: 2, steps: 20_000, seed: 1, observables, every: 5_000 };
        let mut trace = Vec::new();
        let summary = simulate(&cfg, default_start(kind, n, 2)?, |t, v| trace.push((t, v.to_vec())))?;
        println!("{kind}:");
        for (t, v) in trace {
            println!("  t={t:>6} {v:?}");
        }
        for (o, s) in &summary.observables {
            println!("  {:<7} mean {:.3} range [{}, {}]", o.name(), s.mean, s.min, s.max);
        }
    }
    Ok(())
}
