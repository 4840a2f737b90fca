//! Transition kernels and samplers for the flip chains on rooted and pointed
//! quadrangulations, leaf translation and leaf replanting on coloured trees,
//! and the signed translation chain on labelled trees.
//!
//! Every kernel is uniform over a fixed number of move slots: a state has
//! `denom` slots, each taken with probability `1 / denom`, and a slot that
//! does not apply holds. Exact entries are therefore integer multiplicities
//! over `denom`, and one sampler draw is a single integer in `0..denom`.
//!
//! | chain          | slots            | slot `i`                                                    |
//! |----------------|------------------|-------------------------------------------------------------|
//! | `flip`         | `6n`             | edge `i / 3`; `+`, `-`, hold by `i % 3`                     |
//! | `flip-pointed` | `6n`             | same                                                        |
//! | `translate`    | `n (r + 2)`      | vertex `i / (r+2) + 1`; right, left, then colours `1..=r`   |
//! | `replant`      | `n (2n - 1) r`   | vertex, corner `1..=2n-1`, colour, in that nesting          |
//! | `xtilde`       | `5 (n + 1)`      | `i < 5` flips the sign, otherwise a `translate` slot, r = 3 |

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::maps::{FlipMove, PointedQuadrangulation, Quadrangulation, Sign};
use crate::schaeffer::{enumerate_pointed, enumerate_rooted, phi, SignedTree};
use crate::trees::{count_formula, enumerate, ColouredTree, Dir};

/// Default limit on materialised state spaces.
pub const DEFAULT_CEILING: usize = 30_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainKind {
    Flip,
    FlipPointed,
    Translate,
    Replant,
    Xtilde,
}

impl ChainKind {
    pub const ALL: [ChainKind; 5] =
        [ChainKind::Flip, ChainKind::FlipPointed, ChainKind::Translate, ChainKind::Replant, ChainKind::Xtilde];

    pub fn name(self) -> &'static str {
        match self {
            ChainKind::Flip => "flip",
            ChainKind::FlipPointed => "flip-pointed",
            ChainKind::Translate => "translate",
            ChainKind::Replant => "replant",
            ChainKind::Xtilde => "xtilde",
        }
    }

    /// Move slots per state.
    pub fn denom(self, n: usize, r: u8) -> u64 {
        let (n, r) = (n as u64, r as u64);
        match self {
            ChainKind::Flip | ChainKind::FlipPointed => 6 * n,
            ChainKind::Translate => n * (r + 2),
            ChainKind::Replant => n * (2 * n - 1) * r,
            ChainKind::Xtilde => 5 * (n + 1),
        }
    }

    /// Colour count actually used (the map chains and `xtilde` fix it).
    pub fn colours(self, r: u8) -> u8 {
        match self {
            ChainKind::Translate | ChainKind::Replant => r,
            _ => 3,
        }
    }

    /// Size of the state space, without enumerating it.
    pub fn state_count(self, n: usize, r: u8) -> Option<usize> {
        let trees = |r: u8| usize::try_from(count_formula(n, r)).ok();
        match self {
            ChainKind::Translate | ChainKind::Replant => trees(r),
            ChainKind::Xtilde => trees(3).map(|c| 2 * c),
            ChainKind::FlipPointed => trees(3).map(|c| 2 * c),
            // (n + 2) |Q_n| = 2 |LT_n|
            ChainKind::Flip => trees(3).map(|c| 2 * c / (n + 2)),
        }
    }
}

impl fmt::Display for ChainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChainKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ChainKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown chain {s:?}")))
    }
}

/// A state of one of the chains.
#[derive(Debug, Clone)]
pub enum State {
    Map(Quadrangulation),
    Pointed(PointedQuadrangulation),
    Tree(ColouredTree),
    Signed(SignedTree),
}

impl State {
    pub fn code(&self) -> String {
        match self {
            State::Map(q) => q.code(),
            State::Pointed(q) => q.code(),
            State::Tree(t) => t.code(),
            State::Signed(s) => signed_code(s),
        }
    }
}

/// `"<tree code> +1"` or `"<tree code> -1"`.
pub fn signed_code(s: &SignedTree) -> String {
    format!("{} {:+}", s.tree.code(), s.eps)
}

pub fn parse_signed(code: &str) -> Result<SignedTree> {
    let (t, e) = code.rsplit_once(' ').ok_or_else(|| Error::MalformedCode(code.into()))?;
    let eps = match e {
        "+1" => 1,
        "-1" => -1,
        _ => return Err(Error::MalformedCode(format!("sign {e:?}"))),
    };
    Ok(SignedTree::new(ColouredTree::parse(t, 3)?, eps))
}

/// Non-root vertex ids in increasing order; slot vertex `k` is the `k`-th.
fn tree_vertices(t: &ColouredTree) -> Vec<u32> {
    let mut vs: Vec<u32> = (0..=t.n() as u32).filter(|&v| v != t.root()).collect();
    vs.sort_unstable();
    vs
}

fn translate_slot(t: &ColouredTree, r: u8, slot: u64) -> ColouredTree {
    let per = r as u64 + 2;
    let v = tree_vertices(t)[(slot / per) as usize];
    if !t.is_leaf(v) {
        return t.clone();
    }
    match slot % per {
        0 => t.translate(v, Dir::Right),
        1 => t.translate(v, Dir::Left),
        x => t.recolour(v, (x - 1) as u8),
    }
    .expect("leaf move")
}

fn replant_slot(t: &ColouredTree, r: u8, slot: u64) -> ColouredTree {
    let corners = 2 * t.n() as u64 - 1;
    let per = corners * r as u64;
    let v = tree_vertices(t)[(slot / per) as usize];
    if !t.is_leaf(v) {
        return t.clone();
    }
    let rest = slot % per;
    let k = (rest / r as u64) as usize + 1;
    let c = (rest % r as u64) as u8 + 1;
    t.replant(v, k, c).expect("leaf replant")
}

fn flip_slot(slot: u64) -> Option<FlipMove> {
    let e = (slot / 3) as usize;
    match slot % 3 {
        0 => Some(FlipMove::new(e, Sign::Plus)),
        1 => Some(FlipMove::new(e, Sign::Minus)),
        _ => None,
    }
}

/// The state reached from `s` through move slot `slot`.
pub fn apply_slot(kind: ChainKind, r: u8, s: &State, slot: u64) -> Result<State> {
    Ok(match (kind, s) {
        (ChainKind::Flip, State::Map(q)) => State::Map(match flip_slot(slot) {
            Some(m) => q.flip(m)?,
            None => q.clone(),
        }),
        (ChainKind::FlipPointed, State::Pointed(q)) => State::Pointed(match flip_slot(slot) {
            Some(m) => q.flip(m)?,
            None => q.clone(),
        }),
        (ChainKind::Translate, State::Tree(t)) => State::Tree(translate_slot(t, r, slot)),
        (ChainKind::Replant, State::Tree(t)) => State::Tree(replant_slot(t, r, slot)),
        (ChainKind::Xtilde, State::Signed(st)) => State::Signed(if slot < 5 {
            SignedTree::new(st.tree.clone(), -st.eps)
        } else {
            SignedTree::new(translate_slot(&st.tree, 3, slot - 5), st.eps)
        }),
        _ => return Err(Error::Usage(format!("state does not belong to chain {kind}"))),
    })
}

/// Parses a state code for `kind`.
pub fn parse_state(kind: ChainKind, r: u8, code: &str) -> Result<State> {
    use crate::maps::{decode, Decoded};
    Ok(match kind {
        ChainKind::Flip => match decode(code)? {
            Decoded::Plain(q) => State::Map(q),
            Decoded::Pointed(p) => State::Map(p.map),
        },
        ChainKind::FlipPointed => match decode(code)? {
            Decoded::Pointed(p) => State::Pointed(p),
            Decoded::Plain(q) => {
                let point = q.origin();
                State::Pointed(PointedQuadrangulation { map: q, point })
            }
        },
        ChainKind::Translate | ChainKind::Replant => State::Tree(ColouredTree::parse(code, r)?),
        ChainKind::Xtilde => State::Signed(parse_signed(code)?),
    })
}

/// The simplest state of each chain: `q0(n)`, or the star with all edges of
/// colour 1 (sign `+1`).
pub fn default_start(kind: ChainKind, n: usize, r: u8) -> Result<State> {
    if n == 0 {
        return Err(Error::EmptyTree);
    }
    let star = |r: u8| {
        let code = format!("({})", crate::trees::colour_char(r, 1)).repeat(n);
        ColouredTree::parse(&code, r)
    };
    Ok(match kind {
        ChainKind::Flip => State::Map(Quadrangulation::q0(n)?),
        ChainKind::FlipPointed => State::Pointed(PointedQuadrangulation::q0(n)?),
        ChainKind::Translate | ChainKind::Replant => State::Tree(star(r)?),
        ChainKind::Xtilde => State::Signed(SignedTree::new(star(3)?, 1)),
    })
}

/// Exact kernel over an enumerated state space: `rows[i]` lists
/// `(j, count)` with `p(i, j) = count / denom`, sorted by `j`.
#[derive(Debug, Clone)]
pub struct Kernel {
    pub kind: ChainKind,
    pub n: usize,
    pub r: u8,
    pub states: Vec<String>,
    pub denom: u64,
    pub rows: Vec<Vec<(usize, u64)>>,
    index: HashMap<String, usize>,
}

fn enumerate_states(kind: ChainKind, n: usize, r: u8) -> Vec<State> {
    match kind {
        ChainKind::Flip => enumerate_rooted(n).into_iter().map(|(_, q)| State::Map(q)).collect(),
        ChainKind::FlipPointed => enumerate_pointed(n).into_iter().map(|(_, q)| State::Pointed(q)).collect(),
        ChainKind::Translate | ChainKind::Replant => enumerate(n, r).into_iter().map(State::Tree).collect(),
        ChainKind::Xtilde => enumerate(n, 3)
            .into_iter()
            .flat_map(|t| [1i8, -1].map(|e| State::Signed(SignedTree::new(t.clone(), e))))
            .collect(),
    }
}

impl Kernel {
    /// Builds the kernel of `kind` on size `n`, refusing spaces above `ceiling`.
    pub fn build(kind: ChainKind, n: usize, r: u8, ceiling: usize) -> Result<Kernel> {
        if n == 0 {
            return Err(Error::EmptyTree);
        }
        let r = kind.colours(r);
        if r == 0 {
            return Err(Error::Usage("need at least one colour".into()));
        }
        let count = kind.state_count(n, r).unwrap_or(usize::MAX);
        if count > ceiling {
            return Err(Error::TooLarge(count, ceiling));
        }
        let states = enumerate_states(kind, n, r);
        let codes: Vec<String> = states.par_iter().map(State::code).collect();
        let index: HashMap<String, usize> = codes.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        if index.len() != codes.len() {
            return Err(Error::InvalidMap("duplicate state codes".into()));
        }
        let denom = kind.denom(n, r);
        let rows = states
            .par_iter()
            .map(|s| {
                let mut counts: HashMap<usize, u64> = HashMap::new();
                for slot in 0..denom {
                    let next = apply_slot(kind, r, s, slot)?.code();
                    let j = *index
                        .get(&next)
                        .ok_or_else(|| Error::InvalidMap(format!("move leaves the state space: {next}")))?;
                    *counts.entry(j).or_default() += 1;
                }
                let mut row: Vec<(usize, u64)> = counts.into_iter().collect();
                row.sort_unstable();
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Kernel { kind, n, r, states: codes, denom, rows, index })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, code: &str) -> Option<usize> {
        self.index.get(code).copied()
    }

    pub fn count(&self, i: usize, j: usize) -> u64 {
        self.rows[i].binary_search_by_key(&j, |&(k, _)| k).map_or(0, |p| self.rows[i][p].1)
    }

    pub fn transition_prob(&self, i: usize, j: usize) -> Ratio<u64> {
        Ratio::new(self.count(i, j), self.denom)
    }

    pub fn rows_stochastic(&self) -> bool {
        self.rows.iter().all(|row| row.iter().map(|&(_, c)| c).sum::<u64>() == self.denom)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.len()).all(|i| self.rows[i].iter().all(|&(j, c)| self.count(j, i) == c))
    }

    /// Number of communicating classes of the transition graph.
    pub fn class_count(&self) -> usize {
        let mut comp = vec![usize::MAX; self.len()];
        let mut classes = 0;
        for s in 0..self.len() {
            if comp[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            comp[s] = classes;
            while let Some(i) = stack.pop() {
                for &(j, _) in &self.rows[i] {
                    if comp[j] == usize::MAX {
                        comp[j] = classes;
                        stack.push(j);
                    }
                }
            }
            classes += 1;
        }
        classes
    }

    /// Row-major dense copy as floats.
    pub fn dense(&self) -> Vec<f64> {
        let m = self.len();
        let mut out = vec![0.0; m * m];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, c) in row {
                out[i * m + j] = c as f64 / self.denom as f64;
            }
        }
        out
    }
}

/// Counter-based stream `stream` of seed `seed`.
pub fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One step: a uniform slot in `0..denom`.
pub fn step<R: Rng + ?Sized>(kind: ChainKind, n: usize, r: u8, s: &State, rng: &mut R) -> Result<State> {
    let r = kind.colours(r);
    let slot = rng.gen_range(0..kind.denom(n, r));
    apply_slot(kind, r, s, slot)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Observable {
    /// Largest distance from the root vertex (maps; `phi` image for signed trees).
    Radius,
    /// Tree height.
    Height,
    /// Degree of the root vertex.
    Degree,
    Leaves,
    /// Vertices other than the root vertex at distance at least radius - 1 from it.
    Far,
}

impl Observable {
    pub const ALL: [Observable; 5] =
        [Observable::Radius, Observable::Height, Observable::Degree, Observable::Leaves, Observable::Far];

    pub fn name(self) -> &'static str {
        match self {
            Observable::Radius => "radius",
            Observable::Height => "height",
            Observable::Degree => "degree",
            Observable::Leaves => "leaves",
            Observable::Far => "far",
        }
    }

    pub fn eval(self, s: &State) -> Result<f64> {
        let map_value = |q: &Quadrangulation| -> Option<f64> {
            Some(match self {
                Observable::Radius => q.radius() as f64,
                Observable::Degree => q.degree(q.origin()) as f64,
                Observable::Far => q.far_set_size() as f64,
                _ => return None,
            })
        };
        let tree_value = |t: &ColouredTree| -> Option<f64> {
            Some(match self {
                Observable::Height => t.height() as f64,
                Observable::Degree => t.parents().iter().filter(|p| **p == Some(t.root())).count() as f64,
                Observable::Leaves => t.leaves().len() as f64,
                _ => return None,
            })
        };
        let v = match s {
            State::Map(q) => map_value(q),
            State::Pointed(q) => map_value(&q.map),
            State::Tree(t) => tree_value(t),
            State::Signed(st) => match self {
                Observable::Radius | Observable::Far => map_value(&phi(st).map),
                _ => tree_value(&st.tree),
            },
        };
        v.ok_or_else(|| Error::Usage(format!("observable {} not defined on this chain", self.name())))
    }
}

impl FromStr for Observable {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Observable::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown observable {s:?}")))
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Stats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

/// Streaming summary of a trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub chain: ChainKind,
    pub n: usize,
    pub steps: u64,
    pub seed: u64,
    pub observables: Vec<(Observable, Stats)>,
    pub final_state: String,
}

/// What to simulate and record.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub kind: ChainKind,
    pub n: usize,
    pub r: u8,
    pub steps: u64,
    pub seed: u64,
    pub observables: Vec<Observable>,
    /// Record every `every` steps (time 0 included).
    pub every: u64,
}

/// Runs `cfg.steps` moves from `start`, passing `(t, values)` to `record`
/// at recorded times and returning running statistics over every step.
pub fn simulate(cfg: &SimConfig, start: State, mut record: impl FnMut(u64, &[f64])) -> Result<Summary> {
    let r = cfg.kind.colours(cfg.r);
    let mut rng = rng_stream(cfg.seed, 0);
    let mut cur = start;
    let mut acc: Vec<Stats> = cfg
        .observables
        .iter()
        .map(|_| Stats { mean: 0.0, min: f64::INFINITY, max: f64::NEG_INFINITY })
        .collect();
    let mut values = vec![0.0; cfg.observables.len()];
    let every = cfg.every.max(1);
    for t in 0..=cfg.steps {
        if t > 0 {
            cur = step(cfg.kind, cfg.n, r, &cur, &mut rng)?;
        }
        for (k, o) in cfg.observables.iter().enumerate() {
            let x = o.eval(&cur)?;
            values[k] = x;
            let a = &mut acc[k];
            a.mean += (x - a.mean) / (t + 1) as f64;
            a.min = a.min.min(x);
            a.max = a.max.max(x);
        }
        if t % every == 0 {
            record(t, &values);
        }
    }
    Ok(Summary {
        chain: cfg.kind,
        n: cfg.n,
        steps: cfg.steps,
        seed: cfg.seed,
        observables: cfg.observables.iter().copied().zip(acc).collect(),
        final_state: cur.code(),
    })
}

/// Translation and recolouring moves from `t` to the star whose edges all
/// have colour 1: the last leaf outside the star's trailing run is pushed
/// right until it hangs from the root, then every edge is recoloured.
pub fn star_path_translate(t: &ColouredTree) -> Vec<ColouredTree> {
    let mut cur = t.clone();
    let mut out = vec![cur.clone()];
    // contour position where the finished run of root leaves begins
    let mut done_from = cur.steps().len();
    loop {
        let leaves = cur.leaves();
        let Some(&v) = leaves.iter().rev().find(|&&v| cur.leaf_corner(v).unwrap() <= done_from) else {
            break;
        };
        let depth = |t: &ColouredTree| {
            let par = t.parents();
            let mut d = 0;
            let mut x = v;
            while let Some(p) = par[x as usize] {
                d += 1;
                x = p;
            }
            d
        };
        while depth(&cur) > 1 {
            cur = cur.translate(v, Dir::Right).expect("leaf");
            out.push(cur.clone());
        }
        done_from = cur.leaf_corner(v).unwrap() - 2;
        if done_from == 0 {
            break;
        }
    }
    for v in tree_vertices(&cur) {
        if cur.leaf_colour(v).ok() != Some(1) {
            cur = cur.recolour(v, 1).expect("star leaf");
            out.push(cur.clone());
        }
    }
    out
}

/// At most `n` replanting moves from `t` to the star with all colours 1:
/// the last leaf not yet in place is moved to the final corner.
pub fn star_path_replant(t: &ColouredTree) -> Vec<ColouredTree> {
    let mut cur = t.clone();
    let mut out = vec![cur.clone()];
    let m = cur.steps().len();
    let mut placed = 0usize;
    while placed < cur.n() {
        let boundary = m - 2 * placed;
        let v = *cur
            .leaves()
            .iter()
            .rev()
            .find(|&&v| cur.leaf_corner(v).unwrap() <= boundary)
            .expect("a leaf before the placed run");
        let l = cur.leaf_corner(v).unwrap();
        let in_place = l == boundary && cur.parents()[v as usize] == Some(cur.root()) && cur.leaf_colour(v).unwrap() == 1;
        if !in_place {
            cur = cur.replant(v, m - 1, 1).expect("leaf replant");
            out.push(cur.clone());
        }
        placed += 1;
    }
    out
}
