//! Rooted quadrangulations as rotation systems.
//!
//! Half-edges are dense indices; `alpha(h) = h ^ 1` pairs the two halves of
//! an edge and `sigma` turns counterclockwise around a vertex. Faces are the
//! orbits of `sigma ∘ alpha`, each visited with the face on the right.
//! "Clockwise around a vertex" is `sigma⁻¹`.
//!
//! Every half-edge also carries a stable vertex id so that a flip keeps the
//! identity of every vertex and every edge.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[inline]
pub fn alpha(h: u32) -> u32 {
    h ^ 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn opposite(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FlipMove {
    pub edge: usize,
    pub sign: Sign,
}

impl FlipMove {
    pub fn new(edge: usize, sign: Sign) -> Self {
        FlipMove { edge, sign }
    }
    pub fn plus(edge: usize) -> Self {
        FlipMove { edge, sign: Sign::Plus }
    }
    pub fn minus(edge: usize) -> Self {
        FlipMove { edge, sign: Sign::Minus }
    }
    pub fn reversed(self) -> Self {
        FlipMove { edge: self.edge, sign: self.sign.opposite() }
    }
}

impl fmt::Display for FlipMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.edge, self.sign.as_char())
    }
}

#[derive(Debug, Clone)]
pub struct Quadrangulation {
    n: usize,
    sigma: Vec<u32>,
    vert: Vec<u32>,
    root: u32,
}

#[derive(Debug, Clone)]
pub struct PointedQuadrangulation {
    pub map: Quadrangulation,
    pub point: u32,
}

/// Vertex ids numbered by first appearance along half-edge index order.
fn orbit_ids(sigma: &[u32]) -> Vec<u32> {
    let mut vert = vec![u32::MAX; sigma.len()];
    let mut next = 0;
    for h in 0..sigma.len() {
        if vert[h] == u32::MAX {
            let mut g = h;
            loop {
                vert[g] = next;
                g = sigma[g] as usize;
                if g == h {
                    break;
                }
            }
            next += 1;
        }
    }
    vert
}

impl Quadrangulation {
    /// Builds a map from `sigma` and a root; vertex ids follow orbit order.
    pub fn from_sigma(n: usize, sigma: Vec<u32>, root: u32) -> Result<Self> {
        if sigma.len() != 4 * n {
            return Err(Error::InvalidMap(format!("{} half-edges for n={n}", sigma.len())));
        }
        let mut seen = vec![false; sigma.len()];
        for &s in &sigma {
            if s as usize >= sigma.len() || seen[s as usize] {
                return Err(Error::InvalidMap("sigma is not a permutation".into()));
            }
            seen[s as usize] = true;
        }
        if root as usize >= sigma.len() {
            return Err(Error::InvalidMap("root out of range".into()));
        }
        let vert = orbit_ids(&sigma);
        let q = Quadrangulation { n, sigma, vert, root };
        q.validate()?;
        Ok(q)
    }

    pub(crate) fn from_parts_unchecked(n: usize, sigma: Vec<u32>, vert: Vec<u32>, root: u32) -> Self {
        Quadrangulation { n, sigma, vert, root }
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn half_edges(&self) -> usize {
        self.sigma.len()
    }
    pub fn edge_count(&self) -> usize {
        self.sigma.len() / 2
    }
    pub fn vertex_count(&self) -> usize {
        self.n + 2
    }
    pub fn sigma(&self) -> &[u32] {
        &self.sigma
    }
    pub fn root(&self) -> u32 {
        self.root
    }
    pub fn with_root(&self, root: u32) -> Self {
        let mut q = self.clone();
        q.root = root;
        q
    }
    /// Vertex id at the origin of `h`.
    pub fn vertex(&self, h: u32) -> u32 {
        self.vert[h as usize]
    }
    pub fn target(&self, h: u32) -> u32 {
        self.vert[alpha(h) as usize]
    }
    pub fn origin(&self) -> u32 {
        self.vert[self.root as usize]
    }
    pub fn sigma_of(&self, h: u32) -> u32 {
        self.sigma[h as usize]
    }
    pub fn sigma_inv(&self, h: u32) -> u32 {
        let mut g = h;
        loop {
            let s = self.sigma[g as usize];
            if s == h {
                return g;
            }
            g = s;
        }
    }
    /// Next half-edge along the face on the right of `h`.
    pub fn face_next(&self, h: u32) -> u32 {
        self.sigma[alpha(h) as usize]
    }

    /// Half-edges out of vertex `v`, counterclockwise, starting anywhere.
    pub fn around(&self, v: u32) -> Vec<u32> {
        let start = self.vert.iter().position(|&x| x == v).expect("vertex") as u32;
        self.orbit(start)
    }

    /// Counterclockwise orbit starting at `h`.
    pub fn orbit(&self, h: u32) -> Vec<u32> {
        let mut out = vec![h];
        let mut g = self.sigma[h as usize];
        while g != h {
            out.push(g);
            g = self.sigma[g as usize];
        }
        out
    }

    pub fn degree(&self, v: u32) -> usize {
        self.vert.iter().filter(|&&x| x == v).count()
    }

    pub fn face(&self, h: u32) -> Vec<u32> {
        let mut out = vec![h];
        let mut g = self.face_next(h);
        while g != h {
            out.push(g);
            g = self.face_next(g);
        }
        out
    }

    /// Face id per half-edge.
    pub fn face_ids(&self) -> (Vec<u32>, usize) {
        let mut f = vec![u32::MAX; self.sigma.len()];
        let mut k = 0;
        for h in 0..self.sigma.len() as u32 {
            if f[h as usize] == u32::MAX {
                for g in self.face(h) {
                    f[g as usize] = k;
                }
                k += 1;
            }
        }
        (f, k as usize)
    }

    /// Whether both halves of edge `e` bound the same face.
    pub fn is_degenerate(&self, e: usize) -> bool {
        let h = 2 * e as u32;
        self.face(h).contains(&alpha(h))
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.sigma.len();
        if m != 4 * self.n || self.vert.len() != m {
            return Err(Error::InvalidMap("half-edge count".into()));
        }
        let ids = orbit_ids(&self.sigma);
        let nv = ids.iter().max().map_or(0, |&x| x as usize + 1);
        if nv != self.n + 2 {
            return Err(Error::InvalidMap(format!("{nv} vertices, expected {}", self.n + 2)));
        }
        for h in 0..m {
            if self.vert[self.sigma[h] as usize] != self.vert[h] {
                return Err(Error::InvalidMap("vertex ids disagree with sigma".into()));
            }
        }
        let mut distinct = self.vert.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() != self.n + 2 || *distinct.last().unwrap() as usize != self.n + 1 {
            return Err(Error::InvalidMap("vertex ids not dense".into()));
        }
        let (fid, nf) = self.face_ids();
        if nf != self.n {
            return Err(Error::InvalidMap(format!("{nf} faces, expected {}", self.n)));
        }
        let mut sizes = vec![0; nf];
        for &f in &fid {
            sizes[f as usize] += 1;
        }
        if sizes.iter().any(|&s| s != 4) {
            return Err(Error::InvalidMap("face of degree other than 4".into()));
        }
        // connectivity and bipartiteness in one BFS
        let mut side = vec![-1i8; self.n + 2];
        let adj = self.adjacency();
        side[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                let w = w as usize;
                if side[w] < 0 {
                    side[w] = 1 - side[v];
                    queue.push_back(w);
                } else if side[w] == side[v] {
                    return Err(Error::InvalidMap("not bipartite".into()));
                }
            }
        }
        if side.iter().any(|&s| s < 0) {
            return Err(Error::InvalidMap("disconnected".into()));
        }
        Ok(())
    }

    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.n + 2];
        for h in 0..self.sigma.len() as u32 {
            adj[self.vertex(h) as usize].push(self.target(h));
        }
        adj
    }

    /// Graph distances from `v` to every vertex id.
    pub fn distances_from(&self, v: u32) -> Vec<u32> {
        let adj = self.adjacency();
        let mut d = vec![u32::MAX; self.n + 2];
        d[v as usize] = 0;
        let mut queue = VecDeque::from([v]);
        while let Some(x) = queue.pop_front() {
            for &w in &adj[x as usize] {
                if d[w as usize] == u32::MAX {
                    d[w as usize] = d[x as usize] + 1;
                    queue.push_back(w);
                }
            }
        }
        d
    }

    pub fn graph_distance(&self, v: u32, w: u32) -> u32 {
        self.distances_from(v)[w as usize]
    }

    /// Largest distance from the origin.
    pub fn radius(&self) -> u32 {
        *self.distances_from(self.origin()).iter().max().unwrap()
    }

    /// Number of vertices within distance `r` of the origin.
    pub fn ball_size(&self, r: u32) -> usize {
        self.distances_from(self.origin()).iter().filter(|&&d| d <= r).count()
    }

    /// Number of vertices other than the origin at distance at least
    /// `radius - 1` from it.
    pub fn far_set_size(&self) -> usize {
        let d = self.distances_from(self.origin());
        let rad = *d.iter().max().unwrap();
        d.iter().filter(|&&x| x > 0 && x + 1 >= rad).count()
    }

    fn splice_out(&mut self, h: u32) {
        let p = self.sigma_inv(h);
        self.sigma[p as usize] = self.sigma[h as usize];
        self.sigma[h as usize] = h;
    }

    fn splice_after(&mut self, anchor: u32, h: u32) {
        let s = self.sigma[anchor as usize];
        self.sigma[anchor as usize] = h;
        self.sigma[h as usize] = s;
        self.vert[h as usize] = self.vert[anchor as usize];
    }

    /// The flip `q^{e,s}`. Half-edge indices and vertex ids are preserved.
    pub fn flip(&self, m: FlipMove) -> Result<Self> {
        if m.edge >= self.edge_count() {
            return Err(Error::InvalidEdge(m.edge));
        }
        let mut q = self.clone();
        q.flip_in_place(m);
        Ok(q)
    }

    pub(crate) fn flip_in_place(&mut self, m: FlipMove) {
        let h = 2 * m.edge as u32;
        let hp = alpha(h);
        if self.is_degenerate(m.edge) {
            // The half at the degree-one end stays; the other half moves to
            // the vertex of the face that is not an endpoint.
            let (hy, _hz) = if self.sigma[hp as usize] == hp { (h, hp) } else { (hp, h) };
            let g4 = self.sigma[hy as usize];
            self.splice_out(hy);
            self.splice_after(alpha(g4), hy);
            return;
        }
        let x1 = self.face_next(h);
        let x2 = self.face_next(x1);
        let y1 = self.face_next(hp);
        let y2 = self.face_next(y1);
        self.splice_out(h);
        self.splice_out(hp);
        match m.sign {
            Sign::Plus => {
                self.splice_after(alpha(y1), h);
                self.splice_after(alpha(x1), hp);
            }
            Sign::Minus => {
                self.splice_after(alpha(x2), h);
                self.splice_after(alpha(y2), hp);
            }
        }
    }

    /// Replays a move sequence.
    pub fn apply(&self, moves: &[FlipMove]) -> Result<Self> {
        let mut q = self.clone();
        for &m in moves {
            if m.edge >= q.edge_count() {
                return Err(Error::InvalidEdge(m.edge));
            }
            q.flip_in_place(m);
        }
        Ok(q)
    }

    /// `make_q0`: `n` degenerate faces around an origin of degree `2n`.
    pub fn q0(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Usage("q0 needs n >= 1".into()));
        }
        // edge 2i: parallel edge P_{i+1}, halves 4i (origin) / 4i+1 (v)
        // edge 2i+1: pendant W_{i+1}, halves 4i+2 (origin) / 4i+3 (tip)
        let mut sigma = vec![0u32; 4 * n];
        for i in 0..n {
            let p = 4 * i as u32;
            sigma[p as usize] = p + 2;
            sigma[p as usize + 2] = (4 * ((i + 1) % n)) as u32;
            sigma[p as usize + 1] = 4 * ((i + n - 1) % n) as u32 + 1;
            sigma[p as usize + 3] = p + 3;
        }
        Quadrangulation::from_sigma(n, sigma, 0)
    }

    /// Canonical relabelling: new index per old half-edge, root first.
    fn canonical_order(&self) -> Vec<u32> {
        let m = self.sigma.len();
        let mut newi = vec![u32::MAX; m];
        let mut inv = Vec::with_capacity(m);
        newi[self.root as usize] = 0;
        newi[alpha(self.root) as usize] = 1;
        inv.push(self.root);
        inv.push(alpha(self.root));
        let mut i = 0;
        while i < inv.len() {
            let s = self.sigma[inv[i] as usize];
            if newi[s as usize] == u32::MAX {
                let k = inv.len() as u32;
                newi[s as usize] = k;
                newi[alpha(s) as usize] = k + 1;
                inv.push(s);
                inv.push(alpha(s));
            }
            i += 1;
        }
        newi
    }

    /// Isomorphic copy with canonical half-edge indices, root 0, and vertex
    /// ids by first appearance. Also returns old vertex id -> new id.
    pub fn normalize_with(&self) -> (Self, Vec<u32>, Vec<u32>) {
        let newi = self.canonical_order();
        let m = self.sigma.len();
        let mut sigma = vec![0u32; m];
        for h in 0..m {
            sigma[newi[h] as usize] = newi[self.sigma[h] as usize];
        }
        let vert = orbit_ids(&sigma);
        let mut vmap = vec![0u32; self.n + 2];
        for h in 0..m {
            vmap[self.vert[h] as usize] = vert[newi[h] as usize];
        }
        (Quadrangulation { n: self.n, sigma, vert, root: 0 }, newi, vmap)
    }

    pub fn normalize(&self) -> Self {
        self.normalize_with().0
    }

    pub fn code(&self) -> String {
        encode(&self.normalize(), None)
    }
}

fn encode(q: &Quadrangulation, point: Option<u32>) -> String {
    let sig: Vec<String> = q.sigma.iter().map(|s| s.to_string()).collect();
    format!(
        "QM v1 n={} root={} point={} sigma={}",
        q.n,
        q.root,
        point.map_or("-".to_string(), |p| p.to_string()),
        sig.join(",")
    )
}

impl PointedQuadrangulation {
    pub fn new(map: Quadrangulation, point: u32) -> Result<Self> {
        if point as usize >= map.vertex_count() {
            return Err(Error::InvalidMap(format!("point {point} out of range")));
        }
        Ok(PointedQuadrangulation { map, point })
    }

    pub fn q0(n: usize) -> Result<Self> {
        let map = Quadrangulation::q0(n)?;
        let point = map.origin();
        Ok(PointedQuadrangulation { map, point })
    }

    pub fn flip(&self, m: FlipMove) -> Result<Self> {
        Ok(PointedQuadrangulation { map: self.map.flip(m)?, point: self.point })
    }

    pub fn apply(&self, moves: &[FlipMove]) -> Result<Self> {
        Ok(PointedQuadrangulation { map: self.map.apply(moves)?, point: self.point })
    }

    pub fn normalize(&self) -> Self {
        let (map, _, vmap) = self.map.normalize_with();
        PointedQuadrangulation { map, point: vmap[self.point as usize] }
    }

    pub fn code(&self) -> String {
        let p = self.normalize();
        encode(&p.map, Some(p.point))
    }
}

/// Either kind of decoded map.
#[derive(Debug, Clone)]
pub enum Decoded {
    Plain(Quadrangulation),
    Pointed(PointedQuadrangulation),
}

/// Parses a canonical code and validates the map.
pub fn decode(code: &str) -> Result<Decoded> {
    let bad = |s: &str| Error::MalformedCode(s.to_string());
    let mut parts = code.split(' ');
    if parts.next() != Some("QM") || parts.next() != Some("v1") {
        return Err(bad("missing QM v1 header"));
    }
    let mut field = |name: &str| -> Result<String> {
        let p = parts.next().ok_or_else(|| bad(name))?;
        p.strip_prefix(name)
            .and_then(|s| s.strip_prefix('='))
            .map(str::to_string)
            .ok_or_else(|| bad(name))
    };
    let n: usize = field("n")?.parse().map_err(|_| bad("n"))?;
    let root: u32 = field("root")?.parse().map_err(|_| bad("root"))?;
    let point = field("point")?;
    let sigma: Vec<u32> = field("sigma")?
        .split(',')
        .map(|s| s.parse().map_err(|_| bad("sigma")))
        .collect::<Result<_>>()?;
    if parts.next().is_some() {
        return Err(bad("trailing fields"));
    }
    if n == 0 {
        return Err(bad("n"));
    }
    let q = Quadrangulation::from_sigma(n, sigma, root).map_err(|e| bad(&e.to_string()))?;
    if point == "-" {
        Ok(Decoded::Plain(q))
    } else {
        let p: u32 = point.parse().map_err(|_| bad("point"))?;
        Ok(Decoded::Pointed(PointedQuadrangulation::new(q, p).map_err(|e| bad(&e.to_string()))?))
    }
}

/// Flip sequence taking `q` to `q0(n)`.
pub fn flips_to_q0(q: &Quadrangulation) -> Vec<FlipMove> {
    let mut cur = q.clone();
    let mut path = Vec::new();
    let rho = cur.origin();
    raise_degree(&mut cur, rho, &mut path);
    raise_second_endpoint(&mut cur, &mut path);
    path
}

/// Flip sequence taking a pointed map to the pointed `q0(n)` (point at origin).
pub fn flips_to_q0_pointed(q: &PointedQuadrangulation) -> Vec<FlipMove> {
    let mut cur = q.map.clone();
    let mut path = Vec::new();
    let delta = q.point;
    raise_degree(&mut cur, delta, &mut path);
    if cur.origin() != delta {
        // every edge now meets delta: reverse the root onto it
        let e = (cur.root / 2) as usize;
        let (first, edges) = if cur.is_degenerate(e) {
            let e1 = (cur.pendant_partner(e) / 2) as usize;
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
        let here = PointedQuadrangulation { map: cur.clone(), point: delta };
        let target = PointedQuadrangulation { map: cur.with_root(alpha(cur.root)), point: delta }.code();
        let moves = crate::flip_paths::find_word(&here, &target, &first, &edges, 5).expect("root reversal");
        for &m in &moves {
            cur.flip_in_place(m);
        }
        path.extend(moves);
        debug_assert_eq!(cur.origin(), delta);
    }
    raise_second_endpoint(&mut cur, &mut path);
    path
}

impl Quadrangulation {
    /// For a pendant edge `e` inside a degenerate face, the half-edge that
    /// precedes `e` in that face's contour.
    pub fn pendant_partner(&self, e: usize) -> u32 {
        let h = 2 * e as u32;
        let hy = if self.sigma[alpha(h) as usize] == alpha(h) { h } else { alpha(h) };
        alpha(self.sigma_inv(hy))
    }
}

fn raise_degree(cur: &mut Quadrangulation, rho: u32, path: &mut Vec<FlipMove>) {
    let total = cur.half_edges() / 2;
    loop {
        let deg = cur.degree(rho);
        if deg == total {
            return;
        }
        // a half-edge v->w, w != rho, whose clockwise successor at v reaches rho
        let m = (0..cur.half_edges() as u32)
            .find(|&h| {
                cur.target(h) != rho
                    && cur.vertex(h) != rho
                    && cur.target(cur.sigma_inv(h)) == rho
            })
            .map(|h| FlipMove::minus((h / 2) as usize))
            .expect("a neighbour of the distinguished vertex has another neighbour");
        cur.flip_in_place(m);
        path.push(m);
        assert_eq!(cur.degree(rho), deg + 1, "flip failed to raise degree");
    }
}

fn raise_second_endpoint(cur: &mut Quadrangulation, path: &mut Vec<FlipMove>) {
    let n = cur.n();
    let rho = cur.origin();
    let v = cur.target(cur.root);
    loop {
        let deg = cur.degree(v);
        if deg == n {
            return;
        }
        let mut done = false;
        'search: for e in 0..cur.edge_count() {
            let h = 2 * e as u32;
            if cur.vertex(h) == v || cur.target(h) == v {
                continue;
            }
            for sign in [Sign::Minus, Sign::Plus] {
                let m = FlipMove::new(e, sign);
                let next = cur.flip(m).unwrap();
                if next.degree(v) == deg + 1 && next.degree(rho) == 2 * n {
                    *cur = next;
                    path.push(m);
                    done = true;
                    break 'search;
                }
            }
        }
        assert!(done, "no flip raises the degree of the second root endpoint");
    }
}
