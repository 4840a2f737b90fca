//! One line per acceptance criterion. Runs without the libtest harness so the
//! lines show in `cargo test` output; exits non-zero if a criterion outside
//! `KNOWN_FAILURES` fails.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use quadflip::canonical_paths::*;
use quadflip::chains::{ChainKind, Kernel, Observable, DEFAULT_CEILING};
use quadflip::flip_paths::{all_labels, audit_flip_congestion, random_label, verify_label};
use quadflip::maps::{decode, flips_to_q0, flips_to_q0_pointed, Decoded, FlipMove, PointedQuadrangulation, Quadrangulation};
use quadflip::schaeffer::{enumerate_pointed, enumerate_rooted, phi, phi_inverse, SignedTree};
use quadflip::spectral::*;
use quadflip::trees::{count_formula, enumerate};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::time::Instant;

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

/// Criteria that cannot pass as stated, with the measured reason.
const KNOWN_FAILURES: [(u32, &str); 2] = [
    (8, "translation congestion grows from 10 at n=3 to 12 at n=4"),
    (10, "far-set and ball histograms differ at n=3"),
];

/// Reported without a pass/fail judgement.
const DESCRIPTIVE: u32 = 11;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e(err: quadflip::Error) -> String {
    err.to_string()
}

fn catalan(n: u32) -> BigUint {
    (0..n).fold(BigUint::one(), |c, k| c * BigUint::from(2 * (2 * k + 1)) / BigUint::from(k + 2))
}

/// Rooted maps recovered from pointed ones by forgetting the point.
fn rooted_by_dedup(n: usize) -> BTreeSet<String> {
    enumerate_pointed(n).into_iter().map(|(_, q)| q.map.code()).collect()
}

fn cardinalities() -> Outcome {
    for r in 1..=3u8 {
        for n in 0..=10u32 {
            let want = BigUint::from(r).pow(n) * catalan(n);
            ensure(count_formula(n as usize, r) == want, || format!("|T^({r})_{n}|"))?;
            if n <= 5 || (r < 3 && n <= 7) {
                ensure(BigUint::from(enumerate(n as usize, r).len()) == want, || format!("enumerated |T^({r})_{n}|"))?;
            }
        }
    }
    let mut sizes = Vec::new();
    for n in 1..=4 {
        let lt = enumerate(n, 3).len();
        let pointed = enumerate_pointed(n).len();
        let rooted = rooted_by_dedup(n).len();
        ensure(2 * lt == pointed && pointed == (n + 2) * rooted, || format!("n={n}: 2*{lt}, {pointed}, {rooted}"))?;
        sizes.push(rooted);
    }
    ensure(sizes == [2, 9, 54, 378], || format!("|Q_n| = {sizes:?}"))?;
    Ok(format!("|Q_1..4| = {sizes:?}"))
}

fn round_trip() -> Outcome {
    let mut checked = 0;
    for n in 1..=4 {
        for t in enumerate(n, 3) {
            for eps in [1i8, -1] {
                let st = SignedTree::new(t.clone(), eps);
                let q = phi(&st);
                ensure(phi_inverse(&q) == st, || format!("phi^-1 phi at {}", t.code()))?;
                let d = q.map.distances_from(q.point);
                let base = d[t.root() as usize] as i32;
                let lab = t.labels();
                ensure((0..=n).all(|v| lab[v] == d[v] as i32 - base), || format!("distances at {}", t.code()))?;
                checked += 1;
            }
        }
        // every rooted map with every choice of distinguished vertex
        for code in rooted_by_dedup(n) {
            let Decoded::Plain(map) = decode(&code).map_err(e)? else {
                return Err("unexpected point".into());
            };
            for point in 0..map.vertex_count() as u32 {
                let q = PointedQuadrangulation { map: map.clone(), point };
                ensure(phi(&phi_inverse(&q)).code() == q.code(), || format!("phi phi^-1 at {code} point {point}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} states"))
}

fn flip_algebra() -> Outcome {
    for n in 1..=3 {
        for (_, q) in enumerate_rooted(n) {
            for edge in 0..q.edge_count() {
                let p = q.flip(FlipMove::plus(edge)).map_err(e)?;
                ensure(p.flip(FlipMove::minus(edge)).map_err(e)?.code() == q.code(), || format!("edge {edge} of {}", q.code()))?;
            }
        }
    }
    for n in 1..=4 {
        let k = Kernel::build(ChainKind::Flip, n, 3, DEFAULT_CEILING).map_err(e)?;
        ensure(k.is_symmetric() && k.rows_stochastic(), || format!("kernel n={n}"))?;
        let lo = num_rational::Ratio::new(1, 6 * n as u64);
        let hi = num_rational::Ratio::new(2, 3 * n as u64);
        for i in 0..k.len() {
            for &(j, _) in &k.rows[i] {
                let p = k.transition_prob(i, j);
                ensure(i == j || (lo <= p && p <= hi), || format!("p={p} at n={n}"))?;
            }
        }
    }
    Ok("inverse flips at n<=3, symmetric kernels with bounded entries at n<=4".into())
}

fn irreducibility() -> Outcome {
    let target = Quadrangulation::q0(3).map_err(e)?.code();
    let maps = enumerate_rooted(3);
    for (_, q) in &maps {
        ensure(q.apply(&flips_to_q0(q)).map_err(e)?.code() == target, || q.code())?;
    }
    let target = PointedQuadrangulation::q0(3).map_err(e)?.code();
    let pointed = enumerate_pointed(3);
    for (_, q) in &pointed {
        ensure(q.apply(&flips_to_q0_pointed(q)).map_err(e)?.code() == target, || q.code())?;
    }
    Ok(format!("{} rooted and {} pointed maps reach q0", maps.len(), pointed.len()))
}

fn hierarchy() -> Outcome {
    for r in 1..=3u8 {
        for n in 1..=8 {
            let a = audit_hierarchy(n, r, 8).map_err(e)?;
            ensure(a.rows_ok && a.columns_ok && a.support_ok, || format!("n={n} r={r}: {a:?}"))?;
        }
    }
    // the BigRational weights, separately from the rank-space audit
    let h = Hierarchy::new();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for r in 1..=3 {
        ensure(spot_check_rows(8, r, 2000, &h, &mut rng) == 0, || format!("support at n=8 r={r}"))?;
    }
    for n in 2..=50 {
        ensure(constants_consistent(n), || format!("constants n={n}"))?;
    }
    Ok("rows, columns and support exact for n<=8, r<=3; constants for n<=50".into())
}

fn path_measure() -> Outcome {
    let h = Hierarchy::new();
    let fib = FiberMap::new(3, 1).map_err(e)?;
    for x in &fib.trees {
        for y in &fib.trees {
            let paths = enumerate_gamma(x, y, &h, &fib).map_err(e)?;
            let total: BigRational = paths.iter().map(|(_, m)| m.clone()).sum();
            ensure(total.is_one(), || format!("mass {total} for {} -> {}", x.code(), y.code()))?;
            for (p, _) in &paths {
                ensure(p.states().len() == 7, || "path length".into())?;
            }
        }
    }
    let mut worst = Vec::new();
    for n in 1..=4 {
        let fib = FiberMap::new(n, 1).map_err(e)?;
        let mut m = BigRational::zero();
        for i in 0..=2 * n {
            m = m.max(audit_congestion(n, i, &h, &fib).map_err(e)?);
        }
        ensure(m <= congestion_bound(n, 1), || format!("congestion {m} at n={n}"))?;
        worst.push(m.to_string());
    }
    Ok(format!("masses exact over T^(1)_3; congestion maxima {worst:?} under 2(4r)^(n+1)"))
}

fn flip_paths() -> Outcome {
    let mut count = 0;
    for n in 1..=3 {
        for l in all_labels(n) {
            let rep = verify_label(&l);
            ensure(rep.ok, || format!("{} {:?}", rep.params, rep.error))?;
            count += 1;
        }
    }
    for n in [10, 20] {
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        for _ in 0..10_000 {
            let rep = verify_label(&random_label(n, &mut rng));
            ensure(rep.ok, || format!("{} {:?}", rep.params, rep.error))?;
            count += 1;
        }
    }
    Ok(format!("{count} paths replayed within their length bounds"))
}

fn congestion() -> Outcome {
    let sums: Vec<_> = (2..=4).map(|n| audit_flip_congestion(n).map(|a| a.summary(n))).collect::<Result<_, _>>().map_err(e)?;
    let desc = sums
        .iter()
        .map(|s| format!("n={} rr={} cc={} tr={}", s.n, s.root_reversal_max, s.colour_change_max, s.translation_max))
        .collect::<Vec<_>>()
        .join(", ");
    ensure(sums.iter().all(|s| s.root_reversal_max <= 9), || format!("root reversal over 9: {desc}"))?;
    let (a, b) = (&sums[1], &sums[2]);
    ensure(a.colour_change_max == b.colour_change_max && a.translation_max == b.translation_max, || {
        format!("maxima differ between n=3 and n=4: {desc}")
    })?;
    Ok(desc)
}

fn spectral() -> Outcome {
    let mut lines = Vec::new();
    for n in 2..=4 {
        let flip = Kernel::build(ChainKind::Flip, n, 3, DEFAULT_CEILING).map_err(e)?;
        let pointed = Kernel::build(ChainKind::FlipPointed, n, 3, DEFAULT_CEILING).map_err(e)?;
        let (g, gp) = (spectral_gap(&flip).map_err(e)?, spectral_gap(&pointed).map_err(e)?);
        for rep in [&g, &gp] {
            let agree = (rep.power_gap.unwrap() - rep.gap).abs();
            ensure(agree < 1e-8 && rep.solver_residual < 1e-8, || format!("solvers differ by {agree} at n={n}"))?;
        }
        ensure(gp.gap <= g.gap + 1e-8, || format!("pointed {} over rooted {} at n={n}", gp.gap, g.gap))?;
        let radius = rayleigh(&flip, &observable_values(&flip, Observable::Radius).map_err(e)?).map_err(e)?;
        // height of the labelled tree behind each pointed map
        let heights: Vec<f64> = pointed
            .states
            .iter()
            .map(|c| match decode(c) {
                Ok(Decoded::Pointed(q)) => Ok(phi_inverse(&q).tree.height() as f64),
                _ => Err(format!("bad state {c}")),
            })
            .collect::<Result<_, _>>()?;
        let height = rayleigh(&pointed, &heights).map_err(e)?;
        ensure(g.gap <= radius + 1e-8 && gp.gap <= height + 1e-8, || format!("Rayleigh bound at n={n}"))?;
        lines.push(format!("n={n} gap={:.6} pointed={:.6}", g.gap, gp.gap));
    }
    for n in 2..=3 {
        let rep = verify_inequalities(n, DEFAULT_CEILING).map_err(e)?;
        if let Some(c) = rep.checks.iter().find(|c| !c.ok) {
            return Err(format!("n={n} {}: {} vs {}", c.name, c.lhs, c.rhs));
        }
    }
    Ok(lines.join(", "))
}

fn law() -> Outcome {
    let mut out = Vec::new();
    for n in 2..=3 {
        let rep = law_identity_check(n);
        ensure(rep.equal, || format!("n={n}: far {:?} vs ball-1 {:?}", rep.far_set, rep.ball_minus_one))?;
        out.push(format!("n={n} equal over {} maps", rep.maps));
    }
    Ok(out.join(", "))
}

fn exponents() -> Outcome {
    let mut out = Vec::new();
    for (kind, r, sizes) in [(ChainKind::Flip, 3, vec![2, 3, 4]), (ChainKind::Translate, 1, vec![3, 4, 5, 6])] {
        let s = scaling(kind, r, &sizes, DEFAULT_CEILING).map_err(e)?;
        out.push(format!("{kind} slope {:.3}", s.slope.unwrap_or(f64::NAN)));
    }
    Ok(format!("descriptive only: {}", out.join(", ")))
}

fn main() {
    let criteria: [Criterion; 11] = [
        (1, "cardinalities", cardinalities),
        (2, "bijection round trip", round_trip),
        (3, "flip algebra", flip_algebra),
        (4, "constructive irreducibility", irreducibility),
        (5, "hierarchy exactness", hierarchy),
        (6, "canonical path measure", path_measure),
        (7, "flip path exactness", flip_paths),
        (8, "flip path congestion", congestion),
        (9, "spectral inequalities", spectral),
        (10, "law identity", law),
        (11, "asymptotic exponents", exponents),
    ];
    let mut unexpected = 0;
    for (id, name, run) in criteria {
        let start = Instant::now();
        let res = run();
        let secs = start.elapsed().as_secs_f64();
        let known = KNOWN_FAILURES.iter().find(|(k, _)| *k == id);
        match (&res, known) {
            (Ok(msg), _) if id == DESCRIPTIVE => println!("criterion {id:>2} INFO  {name}: {msg} ({secs:.1}s)"),
            (Ok(msg), _) => println!("criterion {id:>2} PASS  {name}: {msg} ({secs:.1}s)"),
            (Err(msg), Some((_, why))) => println!("criterion {id:>2} FAIL  {name}: {msg} [known: {why}] ({secs:.1}s)"),
            (Err(msg), None) => {
                unexpected += 1;
                println!("criterion {id:>2} FAIL  {name}: {msg} ({secs:.1}s)");
            }
        }
    }
    if unexpected > 0 {
        println!("{unexpected} unexpected failure(s)");
        std::process::exit(1);
    }
}
