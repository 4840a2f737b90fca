//! Rooted plane trees with coloured edges, stored as a contour word.
//!
//! A tree with `n` edges is a sequence of `2n` steps. `Up` descends to a new
//! child (carrying that child's id and the colour of the edge to its parent),
//! `Down` returns to the parent. Corner `c_i` (1-based) is the vertex reached
//! after `i - 1` steps, so `c_1` is the root corner and the contour runs
//! clockwise with children listed left to right.
//!
//! With `r = 3` the colours 1, 2, 3 read as label increments +1, 0, -1 and a
//! tree doubles as a labelled tree.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use num_bigint::BigUint;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Up { vertex: u32, colour: u8 },
    Down,
}

impl Step {
    pub fn is_up(self) -> bool {
        matches!(self, Step::Up { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Dir {
    Right,
    Left,
}

/// Colour value read as a label increment (three colours only).
pub fn colour_increment(c: u8) -> i32 {
    match c {
        1 => 1,
        2 => 0,
        3 => -1,
        _ => panic!("colour {c} has no label reading"),
    }
}

pub fn increment_colour(d: i32) -> u8 {
    match d {
        1 => 1,
        0 => 2,
        -1 => 3,
        _ => panic!("label step {d} out of range"),
    }
}

pub fn colour_char(r: u8, c: u8) -> char {
    if r == 3 {
        ['+', '=', '-'][(c - 1) as usize]
    } else {
        (b'0' + c) as char
    }
}

fn char_colour(r: u8, ch: char) -> Option<u8> {
    if r == 3 {
        match ch {
            '+' => Some(1),
            '=' => Some(2),
            '-' => Some(3),
            _ => None,
        }
    } else {
        let d = ch.to_digit(10)? as u8;
        (1..=r).contains(&d).then_some(d)
    }
}

/// Colours in the order their code characters sort.
pub fn colour_order(r: u8) -> Vec<u8> {
    if r == 3 {
        vec![1, 3, 2]
    } else {
        (1..=r).collect()
    }
}

#[derive(Debug, Clone)]
pub struct ColouredTree {
    r: u8,
    root: u32,
    steps: Vec<Step>,
}

impl PartialEq for ColouredTree {
    fn eq(&self, other: &Self) -> bool {
        self.r == other.r && self.shape().eq(other.shape())
    }
}
impl Eq for ColouredTree {}

impl Hash for ColouredTree {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.r.hash(state);
        for s in self.shape() {
            s.hash(state);
        }
    }
}

impl PartialOrd for ColouredTree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for ColouredTree {
    // Byte order of the tree codes.
    fn cmp(&self, other: &Self) -> Ordering {
        self.code().cmp(&other.code())
    }
}

impl fmt::Display for ColouredTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TreeJson {
    pub parent: Vec<Option<u32>>,
    pub colour: Vec<Option<u8>>,
}

impl ColouredTree {
    /// The single-vertex tree.
    pub fn single(r: u8) -> Self {
        ColouredTree { r, root: 0, steps: Vec::new() }
    }

    /// Builds a tree from raw steps; ids must be dense and the word balanced.
    pub fn from_steps(r: u8, root: u32, steps: Vec<Step>) -> Result<Self> {
        let t = ColouredTree { r, root, steps };
        t.check()?;
        Ok(t)
    }

    fn check(&self) -> Result<()> {
        let n = self.n();
        let mut seen = vec![false; n + 1];
        if self.root as usize > n {
            return Err(Error::MalformedCode("root id".into()));
        }
        seen[self.root as usize] = true;
        let mut depth = 0i64;
        for s in &self.steps {
            match *s {
                Step::Up { vertex, colour } => {
                    depth += 1;
                    if colour == 0 || colour > self.r {
                        return Err(Error::BadColour(colour, self.r));
                    }
                    let v = vertex as usize;
                    if v > n || seen[v] {
                        return Err(Error::MalformedCode(format!("vertex id {v}")));
                    }
                    seen[v] = true;
                }
                Step::Down => {
                    depth -= 1;
                    if depth < 0 {
                        return Err(Error::MalformedCode("unbalanced".into()));
                    }
                }
            }
        }
        if depth != 0 {
            return Err(Error::MalformedCode("unbalanced".into()));
        }
        Ok(())
    }

    /// Parses a tree code (`(c S) S` grammar) with preorder vertex ids.
    pub fn parse(code: &str, r: u8) -> Result<Self> {
        if r == 0 || r > 9 {
            return Err(Error::Usage(format!("colour count {r} not in 1..=9")));
        }
        let chars: Vec<char> = code.chars().collect();
        let mut steps = Vec::with_capacity(chars.len() * 2 / 3);
        let mut next = 1u32;
        let mut depth = 0usize;
        let mut i = 0;
        while i < chars.len() {
            match chars[i] {
                '(' => {
                    let c = chars
                        .get(i + 1)
                        .and_then(|&ch| char_colour(r, ch))
                        .ok_or_else(|| Error::MalformedCode(format!("bad colour at {}", i + 1)))?;
                    steps.push(Step::Up { vertex: next, colour: c });
                    next += 1;
                    depth += 1;
                    i += 2;
                }
                ')' => {
                    if depth == 0 {
                        return Err(Error::MalformedCode(format!("unbalanced at {i}")));
                    }
                    depth -= 1;
                    steps.push(Step::Down);
                    i += 1;
                }
                ch => return Err(Error::MalformedCode(format!("unexpected {ch:?}"))),
            }
        }
        if depth != 0 {
            return Err(Error::MalformedCode("unbalanced".into()));
        }
        Ok(ColouredTree { r, root: 0, steps })
    }

    pub fn code(&self) -> String {
        let mut s = String::with_capacity(self.steps.len() * 3 / 2);
        for st in &self.steps {
            match *st {
                Step::Up { colour, .. } => {
                    s.push('(');
                    s.push(colour_char(self.r, colour));
                }
                Step::Down => s.push(')'),
            }
        }
        s
    }

    /// Steps with vertex ids erased.
    pub fn shape(&self) -> impl Iterator<Item = u8> + '_ {
        self.steps.iter().map(|s| match *s {
            Step::Up { colour, .. } => colour,
            Step::Down => 0,
        })
    }

    pub fn r(&self) -> u8 {
        self.r
    }
    pub fn n(&self) -> usize {
        self.steps.len() / 2
    }
    pub fn root(&self) -> u32 {
        self.root
    }
    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// Same shape with ids reassigned in preorder (root 0).
    pub fn normalized(&self) -> Self {
        let mut next = 1;
        let steps = self
            .steps
            .iter()
            .map(|s| match *s {
                Step::Up { colour, .. } => {
                    next += 1;
                    Step::Up { vertex: next - 1, colour }
                }
                Step::Down => Step::Down,
            })
            .collect();
        ColouredTree { r: self.r, root: 0, steps }
    }

    /// Parent of each vertex id (`None` for the root).
    pub fn parents(&self) -> Vec<Option<u32>> {
        let mut parent = vec![None; self.n() + 1];
        let mut stack = vec![self.root];
        for s in &self.steps {
            match *s {
                Step::Up { vertex, .. } => {
                    parent[vertex as usize] = Some(*stack.last().unwrap());
                    stack.push(vertex);
                }
                Step::Down => {
                    stack.pop();
                }
            }
        }
        parent
    }

    /// Colour of the edge to the parent, per vertex id (0 for the root).
    pub fn colours(&self) -> Vec<u8> {
        let mut col = vec![0; self.n() + 1];
        for s in &self.steps {
            if let Step::Up { vertex, colour } = *s {
                col[vertex as usize] = colour;
            }
        }
        col
    }

    pub fn to_json(&self) -> TreeJson {
        let col = self.colours();
        TreeJson {
            parent: self.parents(),
            colour: col.iter().map(|&c| (c != 0).then_some(c)).collect(),
        }
    }

    /// Vertex at each corner; entry `i - 1` holds corner `c_i`.
    pub fn contour(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.steps.len().max(1));
        let mut stack = vec![self.root];
        out.push(self.root);
        for s in &self.steps[..self.steps.len().saturating_sub(1)] {
            match *s {
                Step::Up { vertex, .. } => stack.push(vertex),
                Step::Down => {
                    stack.pop();
                }
            }
            out.push(*stack.last().unwrap());
        }
        out
    }

    /// Labels from root-path colour sums (three colours), per vertex id.
    pub fn labels(&self) -> Vec<i32> {
        assert_eq!(self.r, 3, "labels need three colours");
        let mut lab = vec![0; self.n() + 1];
        let mut stack = vec![self.root];
        for s in &self.steps {
            match *s {
                Step::Up { vertex, colour } => {
                    let p = *stack.last().unwrap();
                    lab[vertex as usize] = lab[p as usize] + colour_increment(colour);
                    stack.push(vertex);
                }
                Step::Down => {
                    stack.pop();
                }
            }
        }
        lab
    }

    /// Label at each corner, same indexing as [`Self::contour`].
    pub fn corner_labels(&self) -> Vec<i32> {
        let lab = self.labels();
        self.contour().iter().map(|&v| lab[v as usize]).collect()
    }

    /// Builds a labelled tree from a shape and a label per preorder position.
    pub fn from_labels(dyck: &[bool], labels_preorder: &[i32]) -> Result<Self> {
        let mut steps = Vec::with_capacity(dyck.len());
        let mut stack = vec![0usize];
        let mut next = 1usize;
        for &up in dyck {
            if up {
                let p = *stack.last().unwrap();
                let d = labels_preorder[next] - labels_preorder[p];
                if d.abs() > 1 {
                    return Err(Error::MalformedCode("label jump".into()));
                }
                steps.push(Step::Up { vertex: next as u32, colour: increment_colour(d) });
                stack.push(next);
                next += 1;
            } else {
                stack.pop();
                steps.push(Step::Down);
            }
        }
        ColouredTree::from_steps(3, 0, steps)
    }

    pub fn height(&self) -> usize {
        let (mut d, mut h) = (0usize, 0usize);
        for s in &self.steps {
            if s.is_up() {
                d += 1;
                h = h.max(d);
            } else {
                d -= 1;
            }
        }
        h
    }

    /// 0-based position of the `Up` step entering `v`.
    fn up_pos(&self, v: u32) -> Option<usize> {
        self.steps
            .iter()
            .position(|s| matches!(*s, Step::Up { vertex, .. } if vertex == v))
    }

    pub fn is_leaf(&self, v: u32) -> bool {
        self.up_pos(v)
            .is_some_and(|p| self.steps.get(p + 1) == Some(&Step::Down))
    }

    /// Leaves in contour order.
    pub fn leaves(&self) -> Vec<u32> {
        self.steps
            .windows(2)
            .filter_map(|w| match (w[0], w[1]) {
                (Step::Up { vertex, .. }, Step::Down) => Some(vertex),
                _ => None,
            })
            .collect()
    }

    /// Corner index (1-based) of leaf `v`.
    pub fn leaf_corner(&self, v: u32) -> Result<usize> {
        match self.up_pos(v) {
            Some(p) if self.steps.get(p + 1) == Some(&Step::Down) => Ok(p + 2),
            _ => Err(Error::NotALeaf(v)),
        }
    }

    pub fn leaf_colour(&self, v: u32) -> Result<u8> {
        let l = self.leaf_corner(v)?;
        match self.steps[l - 2] {
            Step::Up { colour, .. } => Ok(colour),
            Step::Down => unreachable!(),
        }
    }

    fn check_colour(&self, c: u8) -> Result<()> {
        if c == 0 || c > self.r {
            Err(Error::BadColour(c, self.r))
        } else {
            Ok(())
        }
    }

    /// Removes leaf `v` and re-inserts it (colour `c`) after `pos` steps of the
    /// remaining word.
    fn reinsert(&self, v: u32, pos: usize, c: u8) -> Self {
        let l = self.leaf_corner(v).expect("leaf");
        let mut steps = self.steps.clone();
        steps.drain(l - 2..l);
        steps.insert(pos, Step::Down);
        steps.insert(pos, Step::Up { vertex: v, colour: c });
        ColouredTree { r: self.r, root: self.root, steps }
    }

    pub fn translate(&self, v: u32, dir: Dir) -> Result<Self> {
        let l = self.leaf_corner(v)?;
        let c = self.leaf_colour(v)?;
        let n2 = self.steps.len();
        Ok(match dir {
            Dir::Right if l == n2 => self.clone(),
            Dir::Right => self.reinsert(v, l - 1, c),
            Dir::Left if l == 2 => self.clone(),
            Dir::Left => self.reinsert(v, l - 3, c),
        })
    }

    pub fn recolour(&self, v: u32, c: u8) -> Result<Self> {
        let l = self.leaf_corner(v)?;
        self.check_colour(c)?;
        let mut t = self.clone();
        t.steps[l - 2] = Step::Up { vertex: v, colour: c };
        Ok(t)
    }

    /// Replants leaf `v` in corner `k` (1..=2n-1) of the tree without `v`.
    pub fn replant(&self, v: u32, k: usize, c: u8) -> Result<Self> {
        self.leaf_corner(v)?;
        self.check_colour(c)?;
        if k == 0 || k + 1 > self.steps.len() {
            return Err(Error::BadCorner(k));
        }
        Ok(self.reinsert(v, k - 1, c))
    }

    /// Deletes leaf `v`; the largest id takes over `v`'s id.
    pub fn delete_leaf(&self, v: u32) -> Result<Self> {
        let l = self.leaf_corner(v)?;
        let mut steps = self.steps.clone();
        steps.drain(l - 2..l);
        let max = self.n() as u32;
        let mut root = self.root;
        if v != max {
            if root == max {
                root = v;
            }
            for s in steps.iter_mut() {
                if let Step::Up { vertex, .. } = s {
                    if *vertex == max {
                        *vertex = v;
                    }
                }
            }
        }
        Ok(ColouredTree { r: self.r, root, steps })
    }

    /// Dyck word, `true` for an up step.
    pub fn to_dyck(&self) -> Vec<bool> {
        self.steps.iter().map(|s| s.is_up()).collect()
    }

    /// Splits into the subtree of the root's first child, the rest, and the
    /// first edge's colour.
    pub fn split_lr(&self) -> Result<(Self, Self, u8)> {
        let c = match self.steps.first() {
            Some(Step::Up { colour, .. }) => *colour,
            _ => return Err(Error::EmptyTree),
        };
        let mut depth = 0i32;
        let mut close = 0;
        for (i, s) in self.steps.iter().enumerate() {
            depth += if s.is_up() { 1 } else { -1 };
            if depth == 0 {
                close = i;
                break;
            }
        }
        let left = ColouredTree { r: self.r, root: 0, steps: self.steps[1..close].to_vec() };
        let right = ColouredTree { r: self.r, root: 0, steps: self.steps[close + 1..].to_vec() };
        Ok((left.normalized(), right.normalized(), c))
    }

    pub fn join_lr(left: &Self, right: &Self, c: u8) -> Self {
        let mut steps = Vec::with_capacity(left.steps.len() + right.steps.len() + 2);
        steps.push(Step::Up { vertex: 0, colour: c });
        steps.extend_from_slice(&left.steps);
        steps.push(Step::Down);
        steps.extend_from_slice(&right.steps);
        ColouredTree { r: left.r, root: 0, steps }.normalized()
    }

    /// Re-roots at corner `j` (1-based), keeping vertex ids and edge colours.
    pub fn reroot(&self, j: usize) -> Result<Self> {
        let m = self.steps.len();
        if m == 0 {
            return if j == 1 { Ok(self.clone()) } else { Err(Error::BadCorner(j)) };
        }
        if j == 0 || j > m {
            return Err(Error::BadCorner(j));
        }
        let cont = self.contour();
        let col = self.colours();
        let parent = self.parents();
        let new_root = cont[j - 1];
        let mut seen = vec![false; self.n() + 1];
        seen[new_root as usize] = true;
        let mut steps = Vec::with_capacity(m);
        for i in 0..m {
            let b = cont[(j - 1 + i + 1) % m];
            let a = cont[(j - 1 + i) % m];
            if seen[b as usize] {
                steps.push(Step::Down);
            } else {
                seen[b as usize] = true;
                let child = if parent[b as usize] == Some(a) { b } else { a };
                steps.push(Step::Up { vertex: b, colour: col[child as usize] });
            }
        }
        Ok(ColouredTree { r: self.r, root: new_root, steps })
    }

    /// Relabels a three-colour tree from explicit vertex labels, keeping shape.
    pub fn with_labels(&self, lab: &[i32]) -> Result<Self> {
        let mut stack = vec![self.root];
        let mut steps = Vec::with_capacity(self.steps.len());
        for s in &self.steps {
            match *s {
                Step::Up { vertex, .. } => {
                    let p = *stack.last().unwrap();
                    let d = lab[vertex as usize] - lab[p as usize];
                    if d.abs() > 1 {
                        return Err(Error::MalformedCode("label jump".into()));
                    }
                    steps.push(Step::Up { vertex, colour: increment_colour(d) });
                    stack.push(vertex);
                }
                Step::Down => {
                    stack.pop();
                    steps.push(Step::Down);
                }
            }
        }
        Ok(ColouredTree { r: 3, root: self.root, steps })
    }
}

/// Visits every tree in `T^(r)_n` in code order.
pub fn for_each_tree(n: usize, r: u8, mut f: impl FnMut(&ColouredTree)) {
    let order = colour_order(r);
    let mut t = ColouredTree { r, root: 0, steps: Vec::with_capacity(2 * n) };
    fn rec(
        t: &mut ColouredTree,
        ups: usize,
        depth: usize,
        n: usize,
        order: &[u8],
        f: &mut dyn FnMut(&ColouredTree),
    ) {
        if t.steps.len() == 2 * n {
            f(t);
            return;
        }
        if ups < n {
            for &c in order {
                t.steps.push(Step::Up { vertex: ups as u32 + 1, colour: c });
                rec(t, ups + 1, depth + 1, n, order, f);
                t.steps.pop();
            }
        }
        if depth > 0 {
            t.steps.push(Step::Down);
            rec(t, ups, depth - 1, n, order, f);
            t.steps.pop();
        }
    }
    rec(&mut t, 0, 0, n, &order, &mut f);
}

pub fn enumerate(n: usize, r: u8) -> Vec<ColouredTree> {
    let mut out = Vec::new();
    for_each_tree(n, r, |t| out.push(t.clone()));
    out
}

/// Uniform tree of `T^(r)_n`: a shuffled word of `n` ups and `n + 1` downs
/// is rotated by the cycle lemma, the final down dropped and colours drawn
/// uniformly.
pub fn random_tree<R: Rng + ?Sized>(n: usize, r: u8, rng: &mut R) -> ColouredTree {
    let mut word: Vec<bool> = (0..2 * n + 1).map(|i| i < n).collect();
    word.shuffle(rng);
    let mut h = 0i64;
    let (mut low, mut at) = (0i64, 0usize);
    for (i, &up) in word.iter().enumerate() {
        h += if up { 1 } else { -1 };
        if h < low {
            low = h;
            at = i + 1;
        }
    }
    let len = word.len();
    word.rotate_left(at % len);
    let mut steps = Vec::with_capacity(2 * n);
    let mut next = 1u32;
    for &up in &word[..2 * n] {
        if up {
            steps.push(Step::Up { vertex: next, colour: rng.gen_range(1..=r) });
            next += 1;
        } else {
            steps.push(Step::Down);
        }
    }
    ColouredTree { r, root: 0, steps }
}

/// `r^n C_n` by the closed form.
pub fn count_formula(n: usize, r: u8) -> BigUint {
    let mut b = BigUint::one();
    for k in 0..n {
        b = b * BigUint::from(2 * n - k) / BigUint::from(k + 1);
    }
    b / BigUint::from(n + 1) * BigUint::from(r).pow(n as u32)
}

/// `|T^(r)_n|` through the first-child split recursion.
pub fn count_recursive(n: usize, r: u8) -> BigUint {
    let mut t = vec![BigUint::one()];
    for m in 1..=n {
        let mut s = BigUint::default();
        for a in 0..m {
            s += &t[a] * &t[m - 1 - a];
        }
        t.push(s * BigUint::from(r));
    }
    t[n].clone()
}

/// Shifts peak `i` (1-based up step followed by a down step) one place.
pub fn peak_shift(d: &[bool], i: usize, dir: Dir) -> Result<Vec<bool>> {
    if i == 0 || i >= d.len() || !d[i - 1] || d[i] {
        return Err(Error::NotAPeak(i));
    }
    let mut out = d.to_vec();
    match dir {
        Dir::Right if i + 2 <= d.len() => out[i - 1..i + 2].rotate_right(1),
        Dir::Left if i >= 2 => out[i - 2..i + 1].rotate_left(1),
        _ => {}
    }
    Ok(out)
}

fn check_nonneg(t: &ColouredTree) -> Result<Vec<i32>> {
    let lab = t.labels();
    if lab.iter().any(|&l| l < 0) {
        return Err(Error::NegativeLabel);
    }
    Ok(lab)
}

/// Re-roots a non-negative labelled tree at the first corner carrying the
/// maximum label `M` and relabels every vertex `M - l`.
pub fn reroot_max_label(t: &ColouredTree) -> Result<ColouredTree> {
    let lab = check_nonneg(t)?;
    let cl = t.corner_labels();
    let m = *lab.iter().max().unwrap();
    let j = cl.iter().position(|&l| l == m).unwrap() + 1;
    let rt = t.reroot(j)?;
    let new: Vec<i32> = lab.iter().map(|&l| m - l).collect();
    Ok(rt.with_labels(&new)?.normalized())
}

/// Re-roots at the last corner carrying the maximum label and relabels
/// `M - l`; the intended inverse of [`reroot_max_label`].
pub fn reroot_max_label_inverse(t: &ColouredTree) -> Result<ColouredTree> {
    let lab = check_nonneg(t)?;
    let cl = t.corner_labels();
    let m = *lab.iter().max().unwrap();
    let j = cl.iter().rposition(|&l| l == m).unwrap() + 1;
    let rt = t.reroot(j)?;
    let new: Vec<i32> = lab.iter().map(|&l| m - l).collect();
    Ok(rt.with_labels(&new)?.normalized())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn code_roundtrip_and_counts() {
        for r in 1..=3u8 {
            for n in 0..=5 {
                let all = enumerate(n, r);
                assert_eq!(BigUint::from(all.len()), count_formula(n, r));
                for w in all.windows(2) {
                    assert!(w[0].code() < w[1].code());
                }
                for t in &all {
                    assert_eq!(&ColouredTree::parse(&t.code(), r).unwrap(), t);
                }
            }
        }
    }

    #[test]
    fn translate_inverse_and_peak_shift() {
        for t in enumerate(5, 1) {
            for v in t.leaves() {
                let l = t.leaf_corner(v).unwrap();
                let rt = t.translate(v, Dir::Right).unwrap();
                assert_eq!(rt.to_dyck(), peak_shift(&t.to_dyck(), l - 1, Dir::Right).unwrap());
                if rt != t {
                    assert_eq!(rt.translate(v, Dir::Left).unwrap(), t);
                }
                let lt = t.translate(v, Dir::Left).unwrap();
                assert_eq!(lt.to_dyck(), peak_shift(&t.to_dyck(), l - 1, Dir::Left).unwrap());
            }
        }
    }

    #[test]
    fn reroot_keeps_shape_when_at_root_corner() {
        for t in enumerate(4, 2) {
            assert_eq!(t.reroot(1).unwrap(), t);
        }
    }

    #[test]
    fn split_join() {
        for t in enumerate(5, 2) {
            let (l, r, c) = t.split_lr().unwrap();
            assert_eq!(l.n() + r.n() + 1, 5);
            assert_eq!(ColouredTree::join_lr(&l, &r, c), t);
        }
    }
}
