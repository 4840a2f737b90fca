//! Canonical path measures for the leaf replanting chain.
//!
//! Trees are split at the root's first edge into `(L, R, c)`: `L` is the
//! subtree below the first child, `R` the rest, `c` the first edge's colour.
//! The deletion weights `f_n(t, .)` are defined through that split with the
//! constants `C(n, i) = i (i + 1) (3n - 2i - 1) / ((n - 1) n (n + 1))`; they
//! drive random leaf-deletion sequences, which assemble into random replanting
//! paths between any two trees.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::trees::{enumerate, ColouredTree, Dir};

fn rat(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

/// Numerator of `C(n, i)` over `(n - 1) n (n + 1)`.
fn c_numerator(n: usize, i: usize) -> u128 {
    (i * (i + 1) * (3 * n - 2 * i - 1)) as u128
}

/// `C(n, i)` for `0 <= i < n`, `n >= 2`.
pub fn constant(n: usize, i: usize) -> Result<BigRational> {
    if n < 2 || i >= n {
        return Err(Error::Usage(format!("constant needs n >= 2 and i < n, got n={n} i={i}")));
    }
    let num = c_numerator(n, i) as i64;
    let den = ((n - 1) * n * (n + 1)) as i64;
    Ok(rat(num, den))
}

/// `C(n, 0) = 0`, `C(n, i) + C(n, n - 1 - i) = 1` and `C(n, i) >= 0`.
pub fn constants_consistent(n: usize) -> bool {
    let cs = match constants(n) {
        Ok(cs) => cs,
        Err(_) => return false,
    };
    cs[0].is_zero()
        && cs.iter().all(|c| *c >= BigRational::zero())
        && (0..n).all(|i| (&cs[i] + &cs[n - 1 - i]).is_one())
}

pub fn constants(n: usize) -> Result<Vec<BigRational>> {
    (0..n).map(|i| constant(n, i)).collect()
}

/// Deletion weights `f_n(t, .)`, memoised by tree.
#[derive(Debug, Default)]
pub struct Hierarchy {
    memo: std::sync::Mutex<HashMap<ColouredTree, Vec<(ColouredTree, BigRational)>>>,
}

impl Hierarchy {
    pub fn new() -> Self {
        Hierarchy::default()
    }

    /// Every `t'` with `f_n(t, t') > 0`, with its weight.
    pub fn weights(&self, t: &ColouredTree) -> Vec<(ColouredTree, BigRational)> {
        if let Some(w) = self.memo.lock().unwrap().get(t) {
            return w.clone();
        }
        let n = t.n();
        let out = match n {
            0 => Vec::new(),
            1 => vec![(ColouredTree::single(t.r()), BigRational::one())],
            _ => {
                let (left, right, c) = t.split_lr().expect("non-empty");
                let (k, m) = (left.n(), right.n());
                let mut out = Vec::new();
                if k >= 1 {
                    let ck = constant(n, k).unwrap();
                    for (l2, w) in self.weights(&left) {
                        out.push((ColouredTree::join_lr(&l2, &right, c), &ck * w));
                    }
                }
                if m >= 1 {
                    let cm = constant(n, m).unwrap();
                    for (r2, w) in self.weights(&right) {
                        out.push((ColouredTree::join_lr(&left, &r2, c), &cm * w));
                    }
                }
                out
            }
        };
        self.memo.lock().unwrap().insert(t.clone(), out.clone());
        out
    }

    pub fn f(&self, t: &ColouredTree, t2: &ColouredTree) -> BigRational {
        self.weights(t).into_iter().find(|(s, _)| s == t2).map_or_else(BigRational::zero, |(_, w)| w)
    }
}

/// Ranks trees of `T^(r)_k` by their split: first `|L|`, then colour, then
/// the rank of `L`, then the rank of `R`.
#[derive(Debug, Clone)]
pub struct TreeIndex {
    r: u8,
    counts: Vec<u128>,
}

impl TreeIndex {
    pub fn new(r: u8, max_n: usize) -> Result<Self> {
        let mut counts = vec![1u128];
        for k in 1..=max_n {
            let mut s = 0u128;
            for j in 0..k {
                s = s
                    .checked_add(counts[j].checked_mul(counts[k - 1 - j]).ok_or(Error::TooLarge(k, max_n))?)
                    .ok_or(Error::TooLarge(k, max_n))?;
            }
            counts.push(s.checked_mul(r as u128).ok_or(Error::TooLarge(k, max_n))?);
        }
        Ok(TreeIndex { r, counts })
    }

    pub fn count(&self, n: usize) -> u128 {
        self.counts[n]
    }

    fn offset(&self, n: usize, k: usize) -> u128 {
        (0..k).map(|j| self.r as u128 * self.counts[j] * self.counts[n - 1 - j]).sum()
    }

    fn encode(&self, n: usize, k: usize, c: u8, il: u128, ir: u128) -> u128 {
        let m = n - 1 - k;
        self.offset(n, k) + ((c as u128 - 1) * self.counts[k] + il) * self.counts[m] + ir
    }

    /// `(|L|, colour, rank L, rank R)` of the tree with rank `idx` in `T_n`.
    fn decode(&self, n: usize, mut idx: u128) -> (usize, u8, u128, u128) {
        let mut k = 0;
        loop {
            let block = self.r as u128 * self.counts[k] * self.counts[n - 1 - k];
            if idx < block {
                break;
            }
            idx -= block;
            k += 1;
        }
        let m = n - 1 - k;
        let ir = idx % self.counts[m];
        let rest = idx / self.counts[m];
        let il = rest % self.counts[k];
        let c = (rest / self.counts[k]) as u8 + 1;
        (k, c, il, ir)
    }

    pub fn rank(&self, t: &ColouredTree) -> u128 {
        let n = t.n();
        if n == 0 {
            return 0;
        }
        let (l, r, c) = t.split_lr().expect("non-empty");
        self.encode(n, l.n(), c, self.rank(&l), self.rank(&r))
    }

    pub fn unrank(&self, n: usize, idx: u128) -> ColouredTree {
        if n == 0 {
            return ColouredTree::single(self.r);
        }
        let (k, c, il, ir) = self.decode(n, idx);
        ColouredTree::join_lr(&self.unrank(k, il), &self.unrank(n - 1 - k, ir), c)
    }
}

/// `prod_{k=2}^{n} (k - 1) k (k + 1)`, the common denominator of `f_n`.
fn common_denominator(n: usize) -> Option<u128> {
    (2..=n).try_fold(1u128, |d, k| d.checked_mul(((k - 1) * k * (k + 1)) as u128))
}

/// Weights of `f_n(t, .)` in rank space: `(rank t', numerator)` over
/// `common_denominator(n)`.
fn weights_by_rank(ix: &TreeIndex, dens: &[u128], n: usize, idx: u128, out: &mut Vec<(u128, u128)>) {
    if n == 1 {
        out.push((0, 1));
        return;
    }
    let (k, c, il, ir) = ix.decode(n, idx);
    let m = n - 1 - k;
    let mut sub = Vec::new();
    if k >= 1 {
        weights_by_rank(ix, dens, k, il, &mut sub);
        let scale = c_numerator(n, k) * (dens[n - 1] / dens[k]);
        out.extend(sub.drain(..).map(|(il2, w)| (ix.encode(n - 1, k - 1, c, il2, ir), w * scale)));
    }
    if m >= 1 {
        weights_by_rank(ix, dens, m, ir, &mut sub);
        let scale = c_numerator(n, m) * (dens[n - 1] / dens[m]);
        out.extend(sub.drain(..).map(|(ir2, w)| (ix.encode(n - 1, k, c, il, ir2), w * scale)));
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HierarchyAudit {
    pub n: usize,
    pub r: u8,
    pub trees: u128,
    /// Identity (ii): every row sums to one.
    pub rows_ok: bool,
    /// Identity (iii): every column sums to `|T_n| / |T_(n-1)|`.
    pub columns_ok: bool,
    /// Identity (i): positive weight only on leaf deletions, checked against
    /// explicit deletions when `support_checked`.
    pub support_ok: bool,
    pub support_checked: bool,
    pub denominator: String,
}

/// Checks the three weight identities exactly over all of `T^(r)_n`. The
/// support is compared with explicit leaf deletions when `n <= support_up_to`.
pub fn audit_hierarchy(n: usize, r: u8, support_up_to: usize) -> Result<HierarchyAudit> {
    if n < 1 {
        return Err(Error::EmptyTree);
    }
    let ix = TreeIndex::new(r, n)?;
    let dens: Vec<u128> = (0..=n).map(|k| common_denominator(k.max(1))).collect::<Option<_>>().ok_or(Error::TooLarge(n, 10))?;
    let d = dens[n];
    let total = ix.count(n);
    let below = ix.count(n - 1) as usize;
    let check_support = n <= support_up_to;
    let chunk = 4096u128;
    let chunks = total.div_ceil(chunk);
    let (rows_ok, support_ok, cols) = (0..chunks)
        .into_par_iter()
        .map(|ci| {
            let mut cols = vec![0u128; below];
            let mut rows_ok = true;
            let mut support_ok = true;
            let mut buf = Vec::new();
            for idx in ci * chunk..((ci + 1) * chunk).min(total) {
                buf.clear();
                weights_by_rank(&ix, &dens, n, idx, &mut buf);
                let mut sum = 0u128;
                for &(j, w) in &buf {
                    cols[j as usize] += w;
                    sum += w;
                }
                rows_ok &= sum == d;
                if check_support {
                    let t = ix.unrank(n, idx);
                    let mut del: Vec<u128> = t.leaves().iter().map(|&v| ix.rank(&t.delete_leaf(v).unwrap().normalized())).collect();
                    del.sort_unstable();
                    del.dedup();
                    let mut got: Vec<u128> = buf.iter().map(|&(j, _)| j).collect();
                    got.sort_unstable();
                    support_ok &= got.windows(2).all(|w| w[0] != w[1])
                        && got.iter().all(|j| del.binary_search(j).is_ok())
                        && buf.iter().all(|&(_, w)| w > 0);
                }
            }
            (rows_ok, support_ok, cols)
        })
        .reduce(
            || (true, true, vec![0u128; below]),
            |mut a, b| {
                for (x, y) in a.2.iter_mut().zip(&b.2) {
                    *x += y;
                }
                (a.0 && b.0, a.1 && b.1, a.2)
            },
        );
    // column sum = |T_n| / |T_(n-1)|, i.e. col * |T_(n-1)| = |T_n| * d
    let target = total.checked_mul(d).ok_or(Error::TooLarge(n, 10))?;
    let columns_ok = cols.iter().all(|&c| c.checked_mul(below as u128) == Some(target));
    Ok(HierarchyAudit {
        n,
        r,
        trees: total,
        rows_ok,
        columns_ok,
        support_ok,
        support_checked: check_support,
        denominator: d.to_string(),
    })
}

/// `F(t_a, t_b) = tau_((a + b) mod |T_(n-1)|)` with both families in code
/// order (indices from 0).
#[derive(Debug, Clone)]
pub struct FiberMap {
    pub n: usize,
    pub r: u8,
    pub trees: Vec<ColouredTree>,
    pub targets: Vec<ColouredTree>,
    index: HashMap<ColouredTree, usize>,
}

impl FiberMap {
    pub fn new(n: usize, r: u8) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyTree);
        }
        let trees = enumerate(n, r);
        let targets = enumerate(n - 1, r);
        let index = trees.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
        Ok(FiberMap { n, r, trees, targets, index })
    }

    pub fn index_of(&self, t: &ColouredTree) -> Option<usize> {
        self.index.get(t).copied()
    }

    pub fn apply_index(&self, a: usize, b: usize) -> usize {
        (a + b) % self.targets.len()
    }

    pub fn apply(&self, x: &ColouredTree, y: &ColouredTree) -> Result<&ColouredTree> {
        let a = self.index_of(x).ok_or_else(|| Error::Usage(format!("{} not in the family", x.code())))?;
        let b = self.index_of(y).ok_or_else(|| Error::Usage(format!("{} not in the family", y.code())))?;
        Ok(&self.targets[self.apply_index(a, b)])
    }

    /// Largest fiber `{t' : F(t, t') = tau}` or `{t' : F(t', t) = tau}` over
    /// all `t`, `tau`.
    pub fn max_fiber(&self) -> usize {
        let m = self.targets.len();
        let mut best = 0;
        for a in 0..self.trees.len() {
            let mut left = vec![0usize; m];
            let mut right = vec![0usize; m];
            for b in 0..self.trees.len() {
                left[self.apply_index(a, b)] += 1;
                right[self.apply_index(b, a)] += 1;
            }
            best = best.max(*left.iter().chain(&right).max().unwrap());
        }
        best
    }
}

/// All leaf-deletion sequences from `t` down to the single vertex, each with
/// its mass `prod f(t_i, t_(i+1))`.
pub fn deletion_sequences(t: &ColouredTree, h: &Hierarchy) -> Vec<(Vec<ColouredTree>, BigRational)> {
    if t.n() == 0 {
        return vec![(vec![t.clone()], BigRational::one())];
    }
    let mut out = Vec::new();
    for (next, w) in h.weights(t) {
        for (mut rest, m) in deletion_sequences(&next, h) {
            rest.insert(0, t.clone());
            out.push((rest, &w * m));
        }
    }
    out
}

/// Mass of a deletion sequence; zero unless every step has positive weight.
pub fn deletion_mass(seq: &[ColouredTree], h: &Hierarchy) -> BigRational {
    seq.windows(2).map(|w| h.f(&w[0], &w[1])).fold(BigRational::one(), |a, b| a * b)
}

fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(0.0)
}

/// One deletion sequence drawn step by step from `f(t_i, .)`.
pub fn sample_deletion<R: Rng + ?Sized>(t: &ColouredTree, h: &Hierarchy, rng: &mut R) -> Vec<ColouredTree> {
    let mut seq = vec![t.clone()];
    let mut cur = t.clone();
    while cur.n() > 0 {
        let ws = h.weights(&cur);
        let dist = WeightedIndex::new(ws.iter().map(|(_, w)| to_f64(w))).expect("positive weights");
        cur = ws[dist.sample(rng)].0.clone();
        seq.push(cur.clone());
    }
    seq
}

/// Distribution of the `j`-th tree of a random deletion sequence from `t`.
pub fn level_marginal(t: &ColouredTree, j: usize, h: &Hierarchy) -> HashMap<ColouredTree, BigRational> {
    let mut cur: HashMap<ColouredTree, BigRational> = HashMap::from([(t.clone(), BigRational::one())]);
    for _ in 0..j {
        let mut next: HashMap<ColouredTree, BigRational> = HashMap::new();
        for (s, p) in &cur {
            for (s2, w) in h.weights(s) {
                *next.entry(s2).or_insert_with(BigRational::zero) += p * w;
            }
        }
        cur = next;
    }
    cur
}

/// A replanting path `x = t_0, ..., t_2n = y` from its four deletion
/// sequences: `r1` from `x`, `r2` from `y`, `l1` and `l2` from the midpoint
/// subtree `F(x, y)`. The root edge of `t_1 .. t_(2n-1)` has colour `colour`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplantPath {
    pub colour: u8,
    pub r1: Vec<ColouredTree>,
    pub r2: Vec<ColouredTree>,
    pub l1: Vec<ColouredTree>,
    pub l2: Vec<ColouredTree>,
}

/// Colour of the midpoint root edge.
pub const MIDPOINT_COLOUR: u8 = 1;

impl ReplantPath {
    pub fn n(&self) -> usize {
        self.r1[0].n()
    }

    /// `t_0, ..., t_2n`.
    pub fn states(&self) -> Vec<ColouredTree> {
        let n = self.n();
        let c = self.colour;
        let mut out = Vec::with_capacity(2 * n + 1);
        out.push(self.r1[0].clone());
        for i in 1..=n {
            out.push(ColouredTree::join_lr(&self.l1[n - i], &self.r1[i], c));
        }
        for i in n + 1..2 * n {
            out.push(ColouredTree::join_lr(&self.l2[i - n], &self.r2[2 * n - i], c));
        }
        out.push(self.r2[0].clone());
        out
    }

    /// Splits `t_0, ..., t_2n` back into its four sequences.
    pub fn from_states(states: &[ColouredTree]) -> Result<Self> {
        let m = states.len();
        if m < 3 || m.is_multiple_of(2) {
            return Err(Error::Usage("a replanting path has 2n + 1 states".into()));
        }
        let n = (m - 1) / 2;
        let split = |t: &ColouredTree| t.split_lr();
        let (_, _, colour) = split(&states[n])?;
        let mut r1 = vec![states[0].clone()];
        let mut l1 = vec![ColouredTree::single(states[0].r()); n];
        for i in 1..=n {
            let (l, r, c) = split(&states[i])?;
            if c != colour {
                return Err(Error::Usage(format!("state {i} has root colour {c}")));
            }
            r1.push(r);
            l1[n - i] = l;
        }
        let mut r2 = vec![ColouredTree::single(states[0].r()); n + 1];
        r2[0] = states[2 * n].clone();
        let mut l2 = vec![ColouredTree::single(states[0].r()); n];
        for i in n..2 * n {
            let (l, r, c) = split(&states[i])?;
            if c != colour {
                return Err(Error::Usage(format!("state {i} has root colour {c}")));
            }
            r2[2 * n - i] = r;
            l2[i - n] = l;
        }
        Ok(ReplantPath { colour, r1, r2, l1, l2 })
    }

    /// Mass `Q^x(r1) Q^y(r2) Q^F(l1) Q^F(l2)`.
    pub fn mass(&self, h: &Hierarchy) -> BigRational {
        deletion_mass(&self.r1, h) * deletion_mass(&self.r2, h) * deletion_mass(&self.l1, h) * deletion_mass(&self.l2, h)
    }

    /// Checks the endpoint, midpoint and step structure, and that every step
    /// is one replanting move.
    pub fn validate(&self, fib: &FiberMap) -> Result<()> {
        let st = self.states();
        let n = self.n();
        let bad = |s: String| Err(Error::Usage(s));
        let f = fib.apply(&st[0], &st[2 * n])?;
        if self.l1[0] != *f || self.l2[0] != *f {
            return bad("midpoint subtree differs from F(x, y)".into());
        }
        for (i, w) in st.windows(2).enumerate() {
            if !is_replant_step(&w[0], &w[1]) {
                return bad(format!("step {i} is not a replanting move: {} -> {}", w[0].code(), w[1].code()));
            }
        }
        for seq in [&self.r1, &self.r2, &self.l1, &self.l2] {
            for (i, s) in seq.iter().enumerate() {
                if s.n() + i != seq[0].n() {
                    return bad("deletion sequence sizes".into());
                }
            }
        }
        Ok(())
    }
}

/// Whether `b` is `a` with one leaf replanted and recoloured (or `a` itself).
pub fn is_replant_step(a: &ColouredTree, b: &ColouredTree) -> bool {
    a == b || replant_witness(a, b).is_some()
}

/// Leftmost leaf `v` (contour order), then smallest corner `k`, then colour,
/// with `a^{v,k,c} = b`.
pub fn replant_witness(a: &ColouredTree, b: &ColouredTree) -> Option<(u32, usize, u8)> {
    let corners = 2 * a.n() - 1;
    for v in a.leaves() {
        for k in 1..=corners {
            for c in 1..=a.r() {
                if a.replant(v, k, c).ok().as_ref() == Some(b) {
                    return Some((v, k, c));
                }
            }
        }
    }
    None
}

/// Every path of `Gamma_(x -> y)` with its mass.
pub fn enumerate_gamma(
    x: &ColouredTree,
    y: &ColouredTree,
    h: &Hierarchy,
    fib: &FiberMap,
) -> Result<Vec<(ReplantPath, BigRational)>> {
    let f = fib.apply(x, y)?.clone();
    let (sx, sy, sf) = (deletion_sequences(x, h), deletion_sequences(y, h), deletion_sequences(&f, h));
    let mut out = Vec::with_capacity(sx.len() * sy.len() * sf.len() * sf.len());
    for (r1, m1) in &sx {
        for (r2, m2) in &sy {
            for (l1, m3) in &sf {
                for (l2, m4) in &sf {
                    let p = ReplantPath {
                        colour: MIDPOINT_COLOUR,
                        r1: r1.clone(),
                        r2: r2.clone(),
                        l1: l1.clone(),
                        l2: l2.clone(),
                    };
                    out.push((p, m1 * m2 * m3 * m4));
                }
            }
        }
    }
    Ok(out)
}

pub fn sample_gamma<R: Rng + ?Sized>(
    x: &ColouredTree,
    y: &ColouredTree,
    h: &Hierarchy,
    fib: &FiberMap,
    rng: &mut R,
) -> Result<ReplantPath> {
    let f = fib.apply(x, y)?.clone();
    Ok(ReplantPath {
        colour: MIDPOINT_COLOUR,
        r1: sample_deletion(x, h, rng),
        r2: sample_deletion(y, h, rng),
        l1: sample_deletion(&f, h, rng),
        l2: sample_deletion(&f, h, rng),
    })
}

/// `sum_(x, y) P_(x -> y)(gamma(i) = t)` for every `t`, from level marginals.
pub fn congestion_at(n: usize, i: usize, h: &Hierarchy, fib: &FiberMap) -> Result<HashMap<ColouredTree, BigRational>> {
    if i > 2 * n {
        return Err(Error::Usage(format!("position {i} beyond path length {}", 2 * n)));
    }
    let trees = &fib.trees;
    let size = BigRational::from_integer(BigInt::from(trees.len()));
    let mut out: HashMap<ColouredTree, BigRational> = HashMap::new();
    if i == 0 || i == 2 * n {
        for t in trees {
            out.insert(t.clone(), size.clone());
        }
        return Ok(out);
    }
    // gamma(i) = join(L, R, c) with R from the endpoint side at depth d and
    // L from F(x, y) at depth n - d
    let d = if i <= n { i } else { 2 * n - i };
    let side: Vec<HashMap<ColouredTree, BigRational>> = trees.iter().map(|x| level_marginal(x, d, h)).collect();
    let mids: Vec<HashMap<ColouredTree, BigRational>> = fib.targets.iter().map(|f| level_marginal(f, n - d, h)).collect();
    for a in 0..trees.len() {
        for b in 0..trees.len() {
            let end = if i <= n { a } else { b };
            let mid = &mids[fib.apply_index(a, b)];
            for (rt, pr) in &side[end] {
                for (lt, pl) in mid {
                    let t = ColouredTree::join_lr(lt, rt, MIDPOINT_COLOUR);
                    *out.entry(t).or_insert_with(BigRational::zero) += pr * pl;
                }
            }
        }
    }
    Ok(out)
}

/// Largest congestion at position `i` over all trees.
pub fn audit_congestion(n: usize, i: usize, h: &Hierarchy, fib: &FiberMap) -> Result<BigRational> {
    Ok(congestion_at(n, i, h, fib)?.into_values().max().unwrap_or_else(BigRational::zero))
}

/// `2 (4r)^(n+1)`.
pub fn congestion_bound(n: usize, r: u8) -> BigRational {
    BigRational::from_integer(BigInt::from(2) * BigInt::from(4 * r as u64).pow(n as u32 + 1))
}

/// A move of the translation chain inside an expanded path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum XMove {
    Translate(Dir),
    Recolour(u8),
}

/// A replanting path rewritten with translations and recolourings; each
/// replanting step ends with exactly one recolouring.
#[derive(Debug, Clone)]
pub struct TranslationPath {
    pub states: Vec<ColouredTree>,
    pub moves: Vec<XMove>,
}

impl TranslationPath {
    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    /// The replanting path: the start and the state after each recolouring.
    pub fn contract(&self) -> Vec<ColouredTree> {
        let mut out = vec![self.states[0].clone()];
        for (i, m) in self.moves.iter().enumerate() {
            if matches!(m, XMove::Recolour(_)) {
                out.push(self.states[i + 1].clone());
            }
        }
        out
    }
}

/// Translations of the leftmost movable leaf to its target corner, then its
/// recolouring.
pub fn expand_step(a: &ColouredTree, b: &ColouredTree) -> Result<TranslationPath> {
    let (v, k, c) = if a == b {
        let v = a.leaves()[0];
        (v, a.leaf_corner(v)? - 1, a.leaf_colour(v)?)
    } else {
        replant_witness(a, b).ok_or_else(|| Error::Usage(format!("{} -> {} is not a replanting move", a.code(), b.code())))?
    };
    let own = a.leaf_corner(v)? - 1;
    let dir = if k >= own { Dir::Right } else { Dir::Left };
    let mut cur = a.clone();
    let mut states = vec![cur.clone()];
    let mut moves = Vec::new();
    for _ in 0..own.abs_diff(k) {
        cur = cur.translate(v, dir)?;
        states.push(cur.clone());
        moves.push(XMove::Translate(dir));
    }
    cur = cur.recolour(v, c)?;
    states.push(cur.clone());
    moves.push(XMove::Recolour(c));
    if cur != *b {
        return Err(Error::Usage(format!("expansion of {} -> {} ends at {}", a.code(), b.code(), cur.code())));
    }
    Ok(TranslationPath { states, moves })
}

pub fn expand_translations(path: &[ColouredTree]) -> Result<TranslationPath> {
    let mut out = TranslationPath { states: vec![path[0].clone()], moves: Vec::new() };
    for w in path.windows(2) {
        let step = expand_step(&w[0], &w[1])?;
        out.states.extend(step.states.into_iter().skip(1));
        out.moves.extend(step.moves);
    }
    Ok(out)
}

/// `sum_x Q^x(R_i = t)` against `|T_n| / |T_(n-i)|` for every `t` in
/// `T_(n-i)`; returns the number of mismatches.
pub fn partial_sum_mismatches(n: usize, r: u8, i: usize, h: &Hierarchy) -> Result<usize> {
    if i > n {
        return Err(Error::Usage(format!("depth {i} beyond {n}")));
    }
    let trees = enumerate(n, r);
    let lower = enumerate(n - i, r);
    let mut sums: HashMap<ColouredTree, BigRational> = HashMap::new();
    for x in &trees {
        for (t, p) in level_marginal(x, i, h) {
            *sums.entry(t).or_insert_with(BigRational::zero) += p;
        }
    }
    let want = BigRational::new(BigInt::from(trees.len()), BigInt::from(lower.len()));
    Ok(lower.iter().filter(|t| sums.get(*t) != Some(&want)).count())
}

/// Row sums and support of `f_n` on random trees, for sizes past the
/// exhaustive range. Returns the number of bad rows.
pub fn spot_check_rows<R: Rng + ?Sized>(n: usize, r: u8, samples: usize, h: &Hierarchy, rng: &mut R) -> usize {
    (0..samples)
        .filter(|_| {
            let t = crate::trees::random_tree(n, r, rng);
            let ws = h.weights(&t);
            let sum: BigRational = ws.iter().map(|(_, w)| w.clone()).sum();
            let dels: Vec<ColouredTree> = t.leaves().iter().map(|&v| t.delete_leaf(v).unwrap()).collect();
            !sum.is_one() || ws.iter().any(|(s, w)| *w <= BigRational::zero() || !dels.contains(s))
        })
        .count()
}
