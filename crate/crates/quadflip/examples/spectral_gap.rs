//! Exact kernels and their spectral gaps over the enumerable range.
//!
//! cargo run --release --example spectral_gap

use quadflip::chains::{ChainKind, Kernel, Observable, DEFAULT_CEILING};
use quadflip::spectral::{observable_values, rayleigh, scaling, spectral_gap};

fn main() -> quadflip::Result<()> {
    for (kind, r) in [(ChainKind::Flip, 3), (ChainKind::Translate, 1), (ChainKind::Replant, 2)] {
        for n in 1..=3 {
            let k = Kernel::build(kind, n, r, DEFAULT_CEILING)?;
            let g = spectral_gap(&k)?;
            println!("{kind:<9} n={n} states {:>4}  gap {:.6}  residual {:.1e}", g.states, g.gap, g.solver_residual);
        }
    }

    let k = Kernel::build(ChainKind::Flip, 3, 3, DEFAULT_CEILING)?;
    let f = observable_values(&k, Observable::Radius)?;
    println!("\nradius Rayleigh quotient on Q_3: {:.6}", rayleigh(&k, &f)?);

    let s = scaling(ChainKind::Translate, 1, &[2, 3, 4, 5, 6], DEFAULT_CEILING)?;
    println!("translate gaps {:?}, log-log slope {:.3}", s.gaps, s.slope.unwrap_or(f64::NAN));
    Ok(())
}
