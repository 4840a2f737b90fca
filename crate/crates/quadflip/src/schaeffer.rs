//! The Schaeffer correspondence between signed labelled trees and pointed
//! quadrangulations.
//!
//! Edge `k` of `phi(t, eps)` is the chord drawn from corner `c_{k+1}` of `t`:
//! half-edge `2k` sits at that corner's vertex and `2k + 1` at its successor
//! (the next corner with label one less, or the extra vertex `delta`). Tree
//! vertex ids carry over to the map and `delta` gets id `n + 1`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::maps::{alpha, PointedQuadrangulation, Quadrangulation};
use crate::trees::{increment_colour, ColouredTree, Step};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SignedTree {
    #[serde(serialize_with = "ser_code")]
    pub tree: ColouredTree,
    pub eps: i8,
}

fn ser_code<S: serde::Serializer>(t: &ColouredTree, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&t.code())
}

impl SignedTree {
    pub fn new(tree: ColouredTree, eps: i8) -> Self {
        assert!(eps == 1 || eps == -1, "sign must be +1 or -1");
        SignedTree { tree, eps }
    }
}

/// Successor corner (0-based) of each corner, `None` for minimum-label corners.
pub fn corner_targets(labels: &[i32]) -> Vec<Option<usize>> {
    let m = labels.len();
    let min = labels.iter().copied().min().unwrap_or(0);
    (0..m)
        .map(|i| {
            if labels[i] == min {
                return None;
            }
            (1..m).map(|j| (i + j) % m).find(|&j| labels[j] == labels[i] - 1)
        })
        .collect()
}

/// Chord edge index of corner `c_i` (1-based) in `phi(t, eps)`.
pub fn corner_edge(i: usize) -> usize {
    i - 1
}

pub fn phi(st: &SignedTree) -> PointedQuadrangulation {
    let t = &st.tree;
    let n = t.n();
    assert!(n >= 1, "phi needs at least one edge");
    let m = 2 * n;
    let cont = t.contour();
    let cl = t.corner_labels();
    let targ = corner_targets(&cl);
    let delta = (n + 1) as u32;

    let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (i, tg) in targ.iter().enumerate() {
        if let Some(p) = *tg {
            incoming[p].push(i);
        }
    }
    for (p, inc) in incoming.iter_mut().enumerate() {
        inc.sort_by_key(|&i| (i + m - p) % m);
    }

    let mut vert = vec![0u32; 2 * m];
    for i in 0..m {
        vert[2 * i] = cont[i];
        vert[2 * i + 1] = targ[i].map_or(delta, |p| cont[p]);
    }

    let mut corners_of: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for (i, &v) in cont.iter().enumerate() {
        corners_of[v as usize].push(i);
    }

    let mut sigma = vec![0u32; 2 * m];
    let mut close = |seq: &[u32]| {
        for k in 0..seq.len() {
            sigma[seq[k] as usize] = seq[(k + 1) % seq.len()];
        }
    };
    for cs in &corners_of {
        let mut seq = Vec::new();
        for &p in cs.iter().rev() {
            seq.push(2 * p as u32);
            seq.extend(incoming[p].iter().map(|&i| 2 * i as u32 + 1));
        }
        close(&seq);
    }
    let dseq: Vec<u32> = (0..m).filter(|&i| targ[i].is_none()).map(|i| 2 * i as u32 + 1).collect();
    close(&dseq);

    let root = if st.eps == 1 { 1 } else { 0 };
    let map = Quadrangulation::from_parts_unchecked(n, sigma, vert, root);
    debug_assert!(map.validate().is_ok(), "phi produced an invalid map");
    PointedQuadrangulation { map, point: delta }
}

pub fn phi_inverse(q: &PointedQuadrangulation) -> SignedTree {
    let map = &q.map;
    let nv = map.vertex_count();
    let he = map.half_edges() as u32;
    let lab: Vec<i32> = map.distances_from(q.point).iter().map(|&d| d as i32).collect();
    let (fid, nf) = map.face_ids();

    // Tree corners: a corner (h, sigma h) at v != delta whose second side
    // descends.
    let mut in_face: Vec<Vec<u32>> = vec![Vec::new(); nf];
    for h in 0..he {
        let v = map.vertex(h);
        if v == q.point {
            continue;
        }
        let s = map.sigma_of(h);
        if lab[map.target(s) as usize] < lab[v as usize] {
            in_face[fid[s as usize] as usize].push(h);
        }
    }
    // Tree half-edge k sits right after map half-edge h when tree_at[h] = k.
    let mut tree_at: Vec<Option<u32>> = vec![None; he as usize];
    let mut tree_vert = Vec::new();
    for pair in &in_face {
        assert_eq!(pair.len(), 2, "a face without exactly two descending corners");
        let k = tree_vert.len() as u32;
        tree_at[pair[0] as usize] = Some(k);
        tree_at[pair[1] as usize] = Some(k + 1);
        tree_vert.push(map.vertex(pair[0]));
        tree_vert.push(map.vertex(pair[1]));
    }
    // Tree rotation: tree half-edges in counterclockwise order at each vertex.
    let mut tsig = vec![u32::MAX; tree_vert.len()];
    let mut visited = vec![false; nv];
    for h0 in 0..he {
        let v = map.vertex(h0);
        if v == q.point || visited[v as usize] {
            continue;
        }
        visited[v as usize] = true;
        let ring: Vec<u32> = map.orbit(h0).iter().filter_map(|&h| tree_at[h as usize]).collect();
        for k in 0..ring.len() {
            tsig[ring[k] as usize] = ring[(k + 1) % ring.len()];
        }
    }

    let root = map.root();
    let (em, ep) = (map.vertex(root), map.target(root));
    let eps: i8 = if lab[em as usize] < lab[ep as usize] { 1 } else { -1 };
    let chord = if eps == 1 { alpha(root) } else { root };
    // The tree half-edge at the origin just before the chord, counterclockwise.
    let h1 = {
        let mut g = map.sigma_inv(chord);
        loop {
            if let Some(k) = tree_at[g as usize] {
                break k;
            }
            g = map.sigma_inv(g);
        }
    };
    let tinv = {
        let mut inv = vec![0u32; tsig.len()];
        for (a, &b) in tsig.iter().enumerate() {
            inv[b as usize] = a as u32;
        }
        inv
    };
    let origin = tree_vert[h1 as usize];
    let nt = tree_vert.len() / 2;
    let mut ids = vec![u32::MAX; nv];
    ids[origin as usize] = 0;
    let mut next = 1u32;
    let mut steps = Vec::with_capacity(2 * nt);
    let mut g = h1;
    for _ in 0..2 * nt {
        let a = tree_vert[g as usize];
        let b = tree_vert[(g ^ 1) as usize];
        if ids[b as usize] == u32::MAX {
            ids[b as usize] = next;
            let d = lab[b as usize] - lab[a as usize];
            steps.push(Step::Up { vertex: next, colour: increment_colour(d) });
            next += 1;
        } else {
            steps.push(Step::Down);
        }
        g = tinv[(g ^ 1) as usize];
    }
    let tree = ColouredTree::from_steps(3, 0, steps).expect("tree contour");
    SignedTree { tree, eps }
}

/// The map `phi(t, +1)` with its distinguished vertex at the origin, for a
/// tree whose labels are all non-negative.
pub fn phi_origin_pointed(t: &ColouredTree) -> Result<Quadrangulation> {
    if t.labels().iter().any(|&l| l < 0) {
        return Err(Error::NegativeLabel);
    }
    let p = phi(&SignedTree::new(t.clone(), 1));
    debug_assert_eq!(p.map.origin(), p.point);
    Ok(p.map)
}

/// Every pointed quadrangulation with `n` faces, as `phi` images in tree
/// code order, sign `+1` before `-1`.
pub fn enumerate_pointed(n: usize) -> Vec<(SignedTree, PointedQuadrangulation)> {
    let mut out = Vec::new();
    crate::trees::for_each_tree(n, 3, |t| {
        for eps in [1i8, -1] {
            let st = SignedTree::new(t.clone(), eps);
            let q = phi(&st);
            out.push((st, q));
        }
    });
    out
}

/// Distinct rooted quadrangulations with `n` faces, by code, sorted.
pub fn enumerate_rooted(n: usize) -> Vec<(String, Quadrangulation)> {
    let mut seen = std::collections::BTreeMap::new();
    crate::trees::for_each_tree(n, 3, |t| {
        if t.labels().iter().all(|&l| l >= 0) {
            let q = phi_origin_pointed(t).unwrap();
            seen.entry(q.code()).or_insert(q);
        }
    });
    seen.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::enumerate;

    #[test]
    fn phi_valid_and_roundtrip() {
        for n in 1..=4 {
            for t in enumerate(n, 3) {
                for eps in [1i8, -1] {
                    let st = SignedTree::new(t.clone(), eps);
                    let q = phi(&st);
                    q.map.validate().unwrap_or_else(|e| panic!("{} {eps}: {e}", t.code()));
                    let back = phi_inverse(&q);
                    assert_eq!(back, st, "tree {} eps {eps}", t.code());
                }
            }
        }
    }
}
