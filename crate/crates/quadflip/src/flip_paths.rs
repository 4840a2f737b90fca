//! Flip sequences between Schaeffer images of neighbouring signed trees.
//!
//! Every path starts at `phi(t, eps)` and its moves use that map's edge
//! indices (edge `i - 1` is the chord of corner `c_i`). Flips keep indices, so
//! an edge named in the start map can be flipped at any later step. Paths
//! built on other start maps are carried over through the unique rooted
//! isomorphism before concatenation.

use std::collections::HashMap;

use rand::Rng;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::maps::{FlipMove, PointedQuadrangulation, Quadrangulation, Sign};
use crate::schaeffer::{corner_targets, phi, SignedTree};
use crate::trees::{for_each_tree, random_tree, ColouredTree, Dir};

pub const PLUS: u8 = 1;
pub const EQUAL: u8 = 2;
pub const MINUS: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathKind {
    RootReversal,
    ColourChange,
    Translation,
}

#[derive(Debug, Clone)]
pub struct FlipPath {
    pub start: PointedQuadrangulation,
    pub moves: Vec<FlipMove>,
}

impl FlipPath {
    pub fn empty(start: PointedQuadrangulation) -> Self {
        FlipPath { start, moves: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }
    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn end(&self) -> PointedQuadrangulation {
        self.start.apply(&self.moves).expect("path moves in range")
    }

    /// Every intermediate map, validated; `states[i]` is the map before move `i`.
    pub fn replay(&self) -> Result<Vec<PointedQuadrangulation>> {
        let mut out = Vec::with_capacity(self.moves.len() + 1);
        let mut cur = self.start.clone();
        out.push(cur.clone());
        for &m in &self.moves {
            cur = cur.flip(m)?;
            cur.map.validate()?;
            out.push(cur.clone());
        }
        Ok(out)
    }

    /// The same flips undone in reverse order, starting from the end map.
    pub fn reversed(&self) -> FlipPath {
        FlipPath {
            start: self.end(),
            moves: self.moves.iter().rev().map(|m| m.reversed()).collect(),
        }
    }

    /// Appends `next`, whose start must be isomorphic to this path's end.
    pub fn concat(mut self, next: &FlipPath) -> Result<FlipPath> {
        let end = self.end();
        let iso = isomorphism(&next.start, &end)
            .ok_or_else(|| Error::InvalidMap("paths do not meet".into()))?;
        self.moves
            .extend(next.moves.iter().map(|m| FlipMove::new((iso[2 * m.edge] / 2) as usize, m.sign)));
        Ok(self)
    }

    /// Re-expresses the path on an isomorphic start map.
    pub fn transported(&self, onto: &PointedQuadrangulation) -> Result<FlipPath> {
        FlipPath::empty(onto.clone()).concat(self)
    }
}

/// Half-edge bijection `a -> b` respecting roots, rotations and points.
pub fn isomorphism(a: &PointedQuadrangulation, b: &PointedQuadrangulation) -> Option<Vec<u32>> {
    if a.code() != b.code() {
        return None;
    }
    let (_, na, _) = a.map.normalize_with();
    let (_, nb, _) = b.map.normalize_with();
    let mut binv = vec![0u32; nb.len()];
    for (h, &k) in nb.iter().enumerate() {
        binv[k as usize] = h as u32;
    }
    Some(na.iter().map(|&k| binv[k as usize]).collect())
}

fn root_edge(q: &Quadrangulation) -> usize {
    (q.root() / 2) as usize
}

/// Shortest word over `edges` (both signs, at most `max_len` flips) taking
/// `start` to a map with code `target`; `first` is tried before the search.
pub fn find_word(
    start: &PointedQuadrangulation,
    target: &str,
    first: &[FlipMove],
    edges: &[usize],
    max_len: usize,
) -> Option<Vec<FlipMove>> {
    if start.apply(first).ok()?.code() == target {
        return Some(first.to_vec());
    }
    let alphabet: Vec<FlipMove> = edges.iter().flat_map(|&e| [FlipMove::plus(e), FlipMove::minus(e)]).collect();
    let k = alphabet.len();
    for len in 0..=max_len {
        let mut digits = vec![0usize; len];
        loop {
            let word: Vec<FlipMove> = digits.iter().map(|&d| alphabet[d]).collect();
            if start.apply(&word).ok()?.code() == target {
                return Some(word);
            }
            let mut i = 0;
            while i < len && digits[i] + 1 == k {
                digits[i] = 0;
                i += 1;
            }
            if i == len {
                break;
            }
            digits[i] += 1;
        }
    }
    None
}

/// Rotation gadget: moves the root onto the edge after it clockwise around
/// `pivot`. Returns at most five moves and the new root half-edge.
///
/// The generic word is `eta+ e+ eta+ e- eta-`. When the two faces of `e`
/// are also the two faces of `eta` that word misses, and a shorter word over
/// the same two edges is used instead.
pub fn root_rotation_moves(q: &PointedQuadrangulation, pivot: u32) -> Result<(Vec<FlipMove>, u32)> {
    let map = &q.map;
    let e = root_edge(map);
    let h = if map.vertex(2 * e as u32) == pivot { 2 * e as u32 } else { 2 * e as u32 + 1 };
    if map.vertex(h) != pivot {
        return Err(Error::InvalidMap(format!("vertex {pivot} is not on the root edge")));
    }
    let eta_h = map.sigma_inv(h);
    let eta = (eta_h / 2) as usize;
    if eta == e {
        return Err(Error::DegenerateRotation);
    }
    let generic = [
        FlipMove::plus(eta),
        FlipMove::plus(e),
        FlipMove::plus(eta),
        FlipMove::minus(e),
        FlipMove::minus(eta),
    ];
    // the new root leaves the pivot exactly when the old one did
    let new_root = if map.root() == h { eta_h } else { eta_h ^ 1 };
    let target = PointedQuadrangulation { map: map.with_root(new_root), point: q.point }.code();
    let moves = find_word(q, &target, &generic, &[eta, e], 5).ok_or(Error::DegenerateRotation)?;
    Ok((moves, new_root))
}

/// Five flips or fewer rerooting `q` in the next edge clockwise around its origin.
pub fn path_root_rotation(q: &PointedQuadrangulation) -> Result<FlipPath> {
    let (moves, _) = root_rotation_moves(q, q.map.origin())?;
    Ok(FlipPath { start: q.clone(), moves })
}

/// `phi(t, 1)` to `phi(t, -1)` in at most five flips.
///
/// Three `+` flips of the root edge when it bounds two faces; otherwise the
/// pendant partner is flipped out of the way first and back afterwards. With
/// one face both edges are pendant and the shortest word over them is used.
pub fn path_root_reversal(t: &ColouredTree) -> FlipPath {
    let start = phi(&SignedTree::new(t.clone(), 1));
    let e = root_edge(&start.map);
    let (first, edges) = if start.map.is_degenerate(e) {
        let e1 = (start.map.pendant_partner(e) / 2) as usize;
        let word = vec![
            FlipMove::plus(e1),
            FlipMove::plus(e),
            FlipMove::plus(e),
            FlipMove::plus(e),
            FlipMove::minus(e1),
        ];
        (word, vec![e1, e])
    } else {
        (vec![FlipMove::plus(e); 3], vec![e])
    };
    let target = phi(&SignedTree::new(t.clone(), -1)).code();
    let moves = find_word(&start, &target, &first, &edges, 5).expect("root reversal within five flips");
    FlipPath { start, moves }
}

/// Flips `edges` with `-` in order, inserting the rotation gadget around
/// the far endpoint (away from `w`) before flipping the root. After a
/// rotation the remaining edge names are carried through the isomorphism
/// with the rerooted map.
fn sweep(start: &PointedQuadrangulation, edges: &[usize], w: u32) -> Vec<FlipMove> {
    let mut cur = start.clone();
    let mut todo: Vec<usize> = edges.to_vec();
    let mut moves = Vec::new();
    let mut i = 0;
    while i < todo.len() {
        let e = todo[i];
        if e == root_edge(&cur.map) {
            let h = 2 * e as u32;
            let pivot = if cur.map.vertex(h) == w { cur.map.target(h) } else { cur.map.vertex(h) };
            let (rot, eta_h) = root_rotation_moves(&cur, pivot).expect("rotation");
            let expected = PointedQuadrangulation { map: cur.map.with_root(eta_h), point: cur.point };
            cur = cur.apply(&rot).unwrap();
            moves.extend(rot);
            let iso = isomorphism(&expected, &cur).expect("rotation reroots");
            for f in &mut todo[i..] {
                *f = (iso[2 * *f] / 2) as usize;
            }
        }
        let m = FlipMove::minus(todo[i]);
        cur = cur.flip(m).unwrap();
        moves.push(m);
        i += 1;
    }
    moves
}

/// Corners feeding corner `p` (0-based), nearest after `p` first.
fn incoming(targ: &[Option<usize>], p: usize) -> Vec<usize> {
    let m = targ.len();
    let mut inc: Vec<usize> = (0..m).filter(|&i| targ[i] == Some(p)).collect();
    inc.sort_by_key(|&i| (i + m - p) % m);
    inc
}

fn label_gap(t: &ColouredTree, v: u32) -> Result<i32> {
    let lab = t.labels();
    let p = t.parents()[v as usize].ok_or(Error::NotALeaf(v))?;
    Ok(lab[v as usize] - lab[p as usize])
}

/// Single flip raising a leaf from `=` to `+`.
fn equal_to_plus(t: &ColouredTree, v: u32, eps: i8) -> Result<FlipPath> {
    let l = t.leaf_corner(v)?;
    let start = phi(&SignedTree::new(t.clone(), eps));
    Ok(FlipPath { start, moves: vec![FlipMove::plus(l - 1)] })
}

/// Sweep lowering a leaf from `+` to `-`.
fn plus_to_minus(t: &ColouredTree, v: u32, eps: i8) -> Result<FlipPath> {
    let l = t.leaf_corner(v)?;
    let start = phi(&SignedTree::new(t.clone(), eps));
    let m = 2 * t.n();
    let cl = t.corner_labels();
    let targ = corner_targets(&cl);
    let c = l % m; // corner c_{l+1}
    let before = l - 2; // corner c_{l-1}
    let (edges, w) = match targ[c] {
        Some(p) => {
            let inc = incoming(&targ, p);
            let a = inc.iter().position(|&i| i == before).expect("c_{l-1} shares the target");
            let edges: Vec<usize> = inc[..=a].iter().rev().copied().collect();
            (edges, t.contour()[p])
        }
        None => {
            let mins: Vec<usize> = (0..m).filter(|&i| targ[i].is_none()).collect();
            let s = mins.iter().position(|&i| i == before).expect("c_{l-1} is minimal");
            let k = mins.len();
            let edges: Vec<usize> = (0..k).map(|j| mins[(s + k - j) % k]).collect();
            debug_assert_eq!(*edges.last().unwrap(), c);
            (edges, start.point)
        }
    };
    let moves = sweep(&start, &edges, w);
    Ok(FlipPath { start, moves })
}

fn recoloured(t: &ColouredTree, v: u32, x: u8) -> ColouredTree {
    t.recolour(v, x).expect("leaf")
}

/// `phi(t, eps)` to `phi(t^{v,x}, eps)`.
pub fn path_colour_change(t: &ColouredTree, v: u32, x: u8, eps: i8) -> Result<FlipPath> {
    if t.r() != 3 {
        return Err(Error::Usage("colour changes need three colours".into()));
    }
    let c0 = t.leaf_colour(v)?;
    if !(1..=3).contains(&x) {
        return Err(Error::BadColour(x, 3));
    }
    debug_assert_eq!(label_gap(t, v)?, crate::trees::colour_increment(c0));
    Ok(match (c0, x) {
        _ if c0 == x => FlipPath::empty(phi(&SignedTree::new(t.clone(), eps))),
        (EQUAL, PLUS) => equal_to_plus(t, v, eps)?,
        (PLUS, MINUS) => plus_to_minus(t, v, eps)?,
        (EQUAL, MINUS) => {
            let up = equal_to_plus(t, v, eps)?;
            up.concat(&plus_to_minus(&recoloured(t, v, PLUS), v, eps)?)?
        }
        _ => {
            // the reverse of the path from t^{v,x} back to t
            let other = recoloured(t, v, x);
            let back = path_colour_change(&other, v, c0, eps)?.reversed();
            back.transported(&phi(&SignedTree::new(t.clone(), eps)))?
        }
    })
}

pub const SAME_LABEL_SIGN: Sign = Sign::Plus;
pub const UPHILL_SIGNS: [Sign; 3] = [Sign::Plus; 3];

/// Right translation of a leaf whose label equals its parent's.
fn translate_level(t: &ColouredTree, v: u32, eps: i8) -> Result<FlipPath> {
    let l = t.leaf_corner(v)?;
    let start = phi(&SignedTree::new(t.clone(), eps));
    let m = 2 * t.n();
    if l == m {
        return Ok(FlipPath::empty(start));
    }
    let cl = t.corner_labels();
    let lv = cl[l - 1];
    let wc = (l + 1) % m; // corner c_{l+2}
    let lw = cl[wc];
    let moves = if lw == lv {
        vec![FlipMove::new(l, SAME_LABEL_SIGN)]
    } else if lw == lv + 1 {
        vec![
            FlipMove::new(l, UPHILL_SIGNS[0]),
            FlipMove::new(l - 1, UPHILL_SIGNS[1]),
            FlipMove::new(l, UPHILL_SIGNS[2]),
        ]
    } else {
        let targ = corner_targets(&cl);
        let inc = incoming(&targ, wc);
        let a = inc.iter().position(|&i| i == l - 1).expect("c_l feeds c_{l+2}");
        let mut edges: Vec<usize> = inc[..a].iter().rev().copied().collect();
        edges.push(l - 1);
        sweep(&start, &edges, t.contour()[wc])
    };
    Ok(FlipPath { start, moves })
}

/// `phi(t, eps)` to `phi(t^{v,dir}, eps)`.
pub fn path_leaf_translation(t: &ColouredTree, v: u32, dir: Dir, eps: i8) -> Result<FlipPath> {
    let c0 = t.leaf_colour(v)?;
    let start = phi(&SignedTree::new(t.clone(), eps));
    match dir {
        Dir::Right => {
            let moved = t.translate(v, Dir::Right)?;
            if moved == *t {
                return Ok(FlipPath::empty(start));
            }
            let level = recoloured(t, v, EQUAL);
            let shifted = level.translate(v, Dir::Right)?;
            let p = path_colour_change(t, v, EQUAL, eps)?
                .concat(&translate_level(&level, v, eps)?)?
                .concat(&path_colour_change(&shifted, v, c0, eps)?)?;
            Ok(p)
        }
        Dir::Left => {
            let moved = t.translate(v, Dir::Left)?;
            if moved == *t {
                return Ok(FlipPath::empty(start));
            }
            let forward = path_leaf_translation(&moved, v, Dir::Right, eps)?;
            forward.reversed().transported(&start)
        }
    }
}

/// Endpoint check: the path ends at the Schaeffer image of `target`.
pub fn ends_at(p: &FlipPath, target: &SignedTree) -> bool {
    p.end().code() == phi(target).code()
}

/// One member of a path family, with everything that determines it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathLabel {
    RootReversal { tree: ColouredTree },
    ColourChange { tree: ColouredTree, leaf: u32, colour: u8, eps: i8 },
    Translation { tree: ColouredTree, leaf: u32, dir: Dir, eps: i8 },
}

impl PathLabel {
    pub fn kind(&self) -> PathKind {
        match self {
            PathLabel::RootReversal { .. } => PathKind::RootReversal,
            PathLabel::ColourChange { .. } => PathKind::ColourChange,
            PathLabel::Translation { .. } => PathKind::Translation,
        }
    }

    pub fn tree(&self) -> &ColouredTree {
        match self {
            PathLabel::RootReversal { tree }
            | PathLabel::ColourChange { tree, .. }
            | PathLabel::Translation { tree, .. } => tree,
        }
    }

    pub fn build(&self) -> Result<FlipPath> {
        match self {
            PathLabel::RootReversal { tree } => Ok(path_root_reversal(tree)),
            PathLabel::ColourChange { tree, leaf, colour, eps } => path_colour_change(tree, *leaf, *colour, *eps),
            PathLabel::Translation { tree, leaf, dir, eps } => path_leaf_translation(tree, *leaf, *dir, *eps),
        }
    }

    /// The signed tree whose image the path must reach.
    pub fn target(&self) -> Result<SignedTree> {
        Ok(match self {
            PathLabel::RootReversal { tree } => SignedTree::new(tree.clone(), -1),
            PathLabel::ColourChange { tree, leaf, colour, eps } => SignedTree::new(tree.recolour(*leaf, *colour)?, *eps),
            PathLabel::Translation { tree, leaf, dir, eps } => SignedTree::new(tree.translate(*leaf, *dir)?, *eps),
        })
    }

    /// Length bound of the family: 5, `2n + 6` or `6n + 17`.
    pub fn length_bound(&self) -> usize {
        let n = self.tree().n();
        match self.kind() {
            PathKind::RootReversal => 5,
            PathKind::ColourChange => 2 * n + 6,
            PathKind::Translation => 6 * n + 17,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            PathLabel::RootReversal { tree } => format!("tree={}", tree.code()),
            PathLabel::ColourChange { tree, leaf, colour, eps } => {
                format!("tree={} leaf={leaf} colour={colour} eps={eps}", tree.code())
            }
            PathLabel::Translation { tree, leaf, dir, eps } => {
                format!("tree={} leaf={leaf} dir={dir:?} eps={eps}", tree.code())
            }
        }
    }
}

/// Every path label over `LT_n`.
pub fn all_labels(n: usize) -> Vec<PathLabel> {
    let mut out = Vec::new();
    for_each_tree(n, 3, |t| {
        out.push(PathLabel::RootReversal { tree: t.clone() });
        for v in t.leaves() {
            for eps in [1i8, -1] {
                for colour in [PLUS, EQUAL, MINUS] {
                    out.push(PathLabel::ColourChange { tree: t.clone(), leaf: v, colour, eps });
                }
                for dir in [Dir::Right, Dir::Left] {
                    out.push(PathLabel::Translation { tree: t.clone(), leaf: v, dir, eps });
                }
            }
        }
    });
    out
}

/// A random label: family uniform, then a uniform tree and uniform leaf,
/// colour, direction and sign.
pub fn random_label<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PathLabel {
    let tree = random_tree(n, 3, rng);
    let leaf = *tree.leaves().choose(rng).expect("a tree with edges has leaves");
    let eps = if rng.gen::<bool>() { 1 } else { -1 };
    match rng.gen_range(0..3) {
        0 => PathLabel::RootReversal { tree },
        1 => PathLabel::ColourChange { tree, leaf, colour: rng.gen_range(1..=3), eps },
        _ => {
            let dir = if rng.gen::<bool>() { Dir::Right } else { Dir::Left };
            PathLabel::Translation { tree, leaf, dir, eps }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PathReport {
    pub family: PathKind,
    pub params: String,
    pub length: usize,
    pub bound: usize,
    pub ok: bool,
    pub endpoint_code: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Builds and replays a path, validating every state, the endpoint and the
/// length bound.
pub fn verify_label(label: &PathLabel) -> PathReport {
    let mut rep = PathReport {
        family: label.kind(),
        params: label.describe(),
        length: 0,
        bound: label.length_bound(),
        ok: false,
        endpoint_code: String::new(),
        error: None,
    };
    let checked = (|| -> Result<()> {
        let path = label.build()?;
        rep.length = path.len();
        let states = path.replay()?;
        let end = states.last().expect("replay keeps the start");
        rep.endpoint_code = end.code();
        if rep.endpoint_code != phi(&label.target()?).code() {
            return Err(Error::InvalidMap("wrong endpoint".into()));
        }
        if rep.length > rep.bound {
            return Err(Error::InvalidMap(format!("length {} over {}", rep.length, rep.bound)));
        }
        Ok(())
    })();
    match checked {
        Ok(()) => rep.ok = true,
        Err(e) => rep.error = Some(e.to_string()),
    }
    rep
}

/// One step `(q, e, s)` of a path, keyed by the canonical form of `q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StepKey {
    pub code: String,
    pub edge: u32,
    pub sign: Sign,
}

pub fn step_key(q: &PointedQuadrangulation, m: FlipMove) -> StepKey {
    let (_, newi, _) = q.map.normalize_with();
    StepKey { code: q.code(), edge: newi[2 * m.edge] / 2, sign: m.sign }
}

/// For each family, the number of labels whose path uses each `(q, e, s)`,
/// and the labels behind each step.
#[derive(Debug, Clone, Default)]
pub struct CongestionAudit {
    pub counts: HashMap<PathKind, HashMap<StepKey, usize>>,
    pub users: HashMap<StepKey, Vec<usize>>,
    pub labels: Vec<PathLabel>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CongestionSummary {
    pub n: usize,
    pub root_reversal_max: usize,
    pub colour_change_max: usize,
    pub translation_max: usize,
    pub max_length: usize,
}

impl CongestionAudit {
    pub fn max(&self, kind: PathKind) -> usize {
        self.counts.get(&kind).and_then(|c| c.values().copied().max()).unwrap_or(0)
    }

    pub fn summary(&self, n: usize) -> CongestionSummary {
        let max_length = self.labels.par_iter().map(|l| l.build().map_or(0, |p| p.len())).max().unwrap_or(0);
        CongestionSummary {
            n,
            root_reversal_max: self.max(PathKind::RootReversal),
            colour_change_max: self.max(PathKind::ColourChange),
            translation_max: self.max(PathKind::Translation),
            max_length,
        }
    }
}

/// Counts the labels using each `(q, e, s)` across every path of size `n`.
pub fn audit_flip_congestion(n: usize) -> Result<CongestionAudit> {
    let labels = all_labels(n);
    let steps: Vec<Vec<StepKey>> = labels
        .par_iter()
        .map(|l| {
            let path = l.build()?;
            let states = path.replay()?;
            Ok(path.moves.iter().zip(&states).map(|(&m, q)| step_key(q, m)).collect())
        })
        .collect::<Result<_>>()?;
    let mut audit = CongestionAudit::default();
    for (i, mut keys) in steps.into_iter().enumerate() {
        let kind = labels[i].kind();
        // a label counts once per step even if its path repeats the step
        keys.sort_by(|a, b| (&a.code, a.edge, a.sign).cmp(&(&b.code, b.edge, b.sign)));
        keys.dedup();
        for k in keys {
            *audit.counts.entry(kind).or_default().entry(k.clone()).or_default() += 1;
            audit.users.entry(k).or_default().push(i);
        }
    }
    audit.labels = labels;
    Ok(audit)
}
