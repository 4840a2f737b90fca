use quadflip::chains::*;
use quadflip::trees::{ColouredTree, Dir};

fn kernels() -> Vec<Kernel> {
    let mut out = Vec::new();
    for kind in ChainKind::ALL {
        for n in 1..=3 {
            for r in 1..=2 {
                if r == 2 && !matches!(kind, ChainKind::Translate | ChainKind::Replant) {
                    continue;
                }
                out.push(Kernel::build(kind, n, r, DEFAULT_CEILING).unwrap());
            }
        }
    }
    out
}

#[test]
fn kernels_are_stochastic_symmetric_irreducible() {
    for k in kernels() {
        assert!(k.rows_stochastic(), "{} n={}", k.kind, k.n);
        assert!(k.is_symmetric(), "{} n={}", k.kind, k.n);
        assert_eq!(k.class_count(), 1, "{} n={} r={}", k.kind, k.n, k.r);
        assert_eq!(Some(k.len()), k.kind.state_count(k.n, k.r));
    }
}

#[test]
fn state_counts() {
    assert_eq!(ChainKind::Flip.state_count(3, 3), Some(54));
    assert_eq!(ChainKind::Flip.state_count(4, 3), Some(378));
    assert_eq!(ChainKind::FlipPointed.state_count(3, 3), Some(270));
    assert_eq!(ChainKind::Xtilde.state_count(2, 3), Some(36));
    assert_eq!(ChainKind::Translate.state_count(4, 2), Some(224));
}

#[test]
fn flip_transitions_lie_between_the_bounds() {
    for n in 1..=4 {
        let k = Kernel::build(ChainKind::Flip, n, 3, DEFAULT_CEILING).unwrap();
        assert_eq!(k.denom, 6 * n as u64);
        for (i, row) in k.rows.iter().enumerate() {
            for &(j, c) in row {
                if i != j {
                    // 1/(6n) <= p <= 2/(3n)
                    assert!((1..=4).contains(&c), "n={n} {i}->{j} count {c}");
                }
            }
        }
    }
}

#[test]
fn exact_probabilities() {
    let k = Kernel::build(ChainKind::Flip, 1, 3, DEFAULT_CEILING).unwrap();
    assert_eq!(k.len(), 2);
    let p = k.transition_prob(0, 1);
    assert_eq!(p, num_rational::Ratio::new(1, 3));
    assert_eq!(k.transition_prob(0, 0) + p, num_rational::Ratio::from_integer(1));
}

#[test]
fn ceiling_is_enforced() {
    assert!(matches!(
        Kernel::build(ChainKind::FlipPointed, 6, 3, 1000),
        Err(quadflip::Error::TooLarge(_, 1000))
    ));
    assert!(Kernel::build(ChainKind::Flip, 0, 3, 1000).is_err());
}

#[test]
fn state_codes_round_trip_through_parse() {
    for k in kernels() {
        for code in k.states.iter().take(20) {
            let s = parse_state(k.kind, k.r, code).unwrap();
            assert_eq!(&s.code(), code);
        }
    }
    assert!(parse_signed("(+) 0").is_err());
}

#[test]
fn simulation_is_deterministic_and_stays_in_the_space() {
    for kind in ChainKind::ALL {
        let k = Kernel::build(kind, 3, 2, DEFAULT_CEILING).unwrap();
        let obs: Vec<Observable> = Observable::ALL.into_iter().filter(|o| o.eval(&default_start(kind, 3, 2).unwrap()).is_ok()).collect();
        let cfg = SimConfig { kind, n: 3, r: 2, steps: 300, seed: 11, observables: obs, every: 10 };
        let mut a = Vec::new();
        let sa = simulate(&cfg, default_start(kind, 3, 2).unwrap(), |t, v| a.push((t, v.to_vec()))).unwrap();
        let mut b = Vec::new();
        let sb = simulate(&cfg, default_start(kind, 3, 2).unwrap(), |t, v| b.push((t, v.to_vec()))).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 31);
        assert_eq!(sa.final_state, sb.final_state);
        assert!(k.index_of(&sa.final_state).is_some(), "{kind}");
    }
}

#[test]
fn long_run_mean_radius_matches_uniform() {
    // exact uniform mean of the radius on Q_3, from the enumeration
    let k = Kernel::build(ChainKind::Flip, 3, 3, DEFAULT_CEILING).unwrap();
    let exact: f64 = k
        .states
        .iter()
        .map(|c| Observable::Radius.eval(&parse_state(ChainKind::Flip, 3, c).unwrap()).unwrap())
        .sum::<f64>()
        / k.len() as f64;
    let cfg = SimConfig { kind: ChainKind::Flip, n: 3, r: 3, steps: 200_000, seed: 3, observables: vec![Observable::Radius], every: 1_000_000 };
    let s = simulate(&cfg, default_start(ChainKind::Flip, 3, 3).unwrap(), |_, _| {}).unwrap();
    assert!((s.observables[0].1.mean - exact).abs() < 0.05, "{} vs {exact}", s.observables[0].1.mean);
}

#[test]
fn observables_reject_the_wrong_chain() {
    let s = default_start(ChainKind::Translate, 3, 2).unwrap();
    assert!(Observable::Radius.eval(&s).is_err());
    assert_eq!(Observable::Height.eval(&s).unwrap(), 1.0);
    assert_eq!(Observable::Leaves.eval(&s).unwrap(), 3.0);
    assert!("radius".parse::<Observable>().is_ok());
    assert!("nope".parse::<ChainKind>().is_err());
}

#[test]
fn star_paths_use_chain_moves() {
    for t in quadflip::trees::enumerate(4, 2) {
        let star = ColouredTree::parse("(1)(1)(1)(1)", 2).unwrap();
        let p = star_path_translate(&t);
        assert_eq!(p.last().unwrap(), &star);
        for w in p.windows(2) {
            let one_move = w[0].leaves().iter().any(|&v| {
                [Dir::Right, Dir::Left].iter().any(|&d| w[0].translate(v, d).unwrap() == w[1])
                    || (1..=2).any(|c| w[0].recolour(v, c).unwrap() == w[1])
            });
            assert!(one_move);
        }
        let q = star_path_replant(&t);
        assert_eq!(q.last().unwrap(), &star);
        assert!(q.len() <= t.n() + 1);
    }
}
