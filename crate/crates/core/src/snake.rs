//! Snake graphs of arcs, the modified graphs of arcs ending at the
//! basepoint, and the glued graphs of orbits, with their perfect matchings.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use thiserror::Error;

use crate::poly::{ExponentVector, LaurentPolynomial, PolyError, Var};
use crate::surface::{ArcPath, BasepointData, Edge, Orbit, SurfaceError, Triangulation};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SnakeError {
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("arc has no crossings")]
    EmptyArc,
    #[error("inconsistent tile layout: {0}")]
    Layout(String),
    #[error("the minimal matching is not perfect")]
    NotPerfect,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("cross-check failed: {0}")]
    CrossCheckFailed(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeLabel {
    Arc(usize),
    Boundary(usize),
    /// The third side of the triangle at the invariant arc, written `[i]`
    /// after the arc `i` it accompanies.
    Bracket(usize),
}

impl EdgeLabel {
    fn from_edge(e: Edge) -> Self {
        match e {
            Edge::Arc(a) => EdgeLabel::Arc(a),
            Edge::Boundary(b) => EdgeLabel::Boundary(b),
        }
    }

    pub fn render(&self, t: &Triangulation) -> String {
        match self {
            EdgeLabel::Arc(a) => t.arcs[*a].clone(),
            EdgeLabel::Boundary(b) => t.boundary[*b].clone(),
            EdgeLabel::Bracket(a) => format!("[{}]", t.arcs[*a]),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GEdge {
    pub a: usize,
    pub b: usize,
    pub label: EdgeLabel,
    /// Tiles whose boundary contains the edge.
    pub tiles: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Hexagon {
    pub u: usize,
    pub p: usize,
    pub q: usize,
    pub v: usize,
    pub middle: usize,
    pub far: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tile {
    pub diagonal: usize,
    /// SW, SE, NE, NW.
    pub corners: [usize; 4],
    /// S, E, N, W edge ids (before any subdivision).
    pub sides: [usize; 4],
    pub rel: i8,
    /// 1 for tiles of the first arc, 2 for tiles of the second.
    pub part: u8,
    pub hexagon: Option<Hexagon>,
}

impl Tile {
    /// Boundary edges of the tile, including the subdivision of a hexagon.
    pub fn edge_ids(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.sides.to_vec();
        if let Some(h) = &self.hexagon {
            out.push(h.middle);
            out.push(h.far);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SnakeGraph {
    pub points: Vec<(f64, f64)>,
    pub edges: Vec<GEdge>,
    pub tiles: Vec<Tile>,
    pub extra_edge: Option<usize>,
    /// Crossed arcs, with multiplicity, subtracted in the g-vector.
    pub crossings: Vec<usize>,
    /// The minimal matching.
    pub minimal: Vec<usize>,
    /// Edges of the invariant arc are exempt in the height rule of modified graphs.
    pub exempt: Option<usize>,
    pub rank: usize,
}

struct Builder {
    points: Vec<(f64, f64)>,
    at: BTreeMap<(i64, i64), usize>,
    edges: Vec<GEdge>,
    by_ends: BTreeMap<(usize, usize), usize>,
}

impl Builder {
    fn vertex(&mut self, x: i64, y: i64) -> usize {
        let n = self.points.len();
        let id = *self.at.entry((x, y)).or_insert(n);
        if id == n {
            self.points.push((x as f64, y as f64));
        }
        id
    }

    fn edge(&mut self, a: usize, b: usize, label: EdgeLabel, tile: usize) -> Result<usize, SnakeError> {
        let key = (a.min(b), a.max(b));
        if let Some(&e) = self.by_ends.get(&key) {
            if self.edges[e].label != label {
                return Err(SnakeError::Layout(format!(
                    "shared edge labelled {:?} and {:?}",
                    self.edges[e].label, label
                )));
            }
            self.edges[e].tiles.push(tile);
            return Ok(e);
        }
        let id = self.edges.len();
        self.edges.push(GEdge { a, b, label, tiles: vec![tile] });
        self.by_ends.insert(key, id);
        Ok(id)
    }
}

impl SnakeGraph {
    pub fn num_vertices(&self) -> usize {
        self.points.len()
    }

    pub fn is_external(&self, e: usize) -> bool {
        self.edges[e].tiles.len() == 1
    }

    fn tile_edges(&self, i: usize) -> Vec<usize> {
        self.tiles[i].edge_ids()
    }

    /// All perfect matchings, each as a sorted list of edge ids.
    pub fn perfect_matchings(&self) -> Vec<Vec<usize>> {
        let nv = self.num_vertices();
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nv];
        for (id, e) in self.edges.iter().enumerate() {
            adj[e.a].push((e.b, id));
            adj[e.b].push((e.a, id));
        }
        let mut out = Vec::new();
        let mut covered = vec![false; nv];
        let mut chosen = Vec::new();
        fn rec(
            adj: &[Vec<(usize, usize)>],
            covered: &mut Vec<bool>,
            chosen: &mut Vec<usize>,
            out: &mut Vec<Vec<usize>>,
        ) {
            let Some(v) = covered.iter().position(|c| !c) else {
                let mut m = chosen.clone();
                m.sort();
                out.push(m);
                return;
            };
            covered[v] = true;
            for &(w, id) in &adj[v] {
                if !covered[w] {
                    covered[w] = true;
                    chosen.push(id);
                    rec(adj, covered, chosen, out);
                    chosen.pop();
                    covered[w] = false;
                }
            }
            covered[v] = false;
        }
        if nv % 2 == 0 {
            rec(&adj, &mut covered, &mut chosen, &mut out);
        }
        out.sort();
        out
    }

    pub fn is_perfect(&self, m: &[usize]) -> bool {
        let mut seen = vec![false; self.num_vertices()];
        for &e in m {
            for v in [self.edges[e].a, self.edges[e].b] {
                if seen[v] {
                    return false;
                }
                seen[v] = true;
            }
        }
        seen.iter().all(|&s| s)
    }

    /// Faces on either side of each edge: tiles are `0..k`, the face cut off
    /// by the extra edge is `k` and the outer face is `k + 1`.
    fn dual_faces(&self) -> Vec<Option<(usize, usize)>> {
        let k = self.tiles.len();
        let (x, o) = (k, k + 1);
        let mut fp: Vec<Option<(usize, usize)>> = self
            .edges
            .iter()
            .map(|e| match e.tiles.as_slice() {
                [i] => Some((*i, o)),
                [i, j] => Some((*i, *j)),
                _ => None,
            })
            .collect();
        let Some(xe) = self.extra_edge else { return fp };
        fp[xe] = Some((x, o));
        let (a, b) = (self.edges[xe].a, self.edges[xe].b);
        let ext: Vec<usize> = (0..self.edges.len()).filter(|&e| self.is_external(e)).collect();
        let at = |v: usize| -> Vec<usize> {
            ext.iter().copied().filter(|&e| self.edges[e].a == v || self.edges[e].b == v).collect()
        };
        // walk the boundary from a, through the tile of the invariant arc in
        // the first part, until b
        let tau1 = self.tiles.iter().position(|t| t.part == 1 && Some(t.diagonal) == self.exempt);
        let Some(mut e) = at(a).into_iter().find(|&e| Some(self.edges[e].tiles[0]) == tau1) else {
            return fp;
        };
        let mut v = a;
        for _ in 0..ext.len() {
            fp[e] = fp[e].map(|(i, _)| (i, x));
            v = if self.edges[e].a == v { self.edges[e].b } else { self.edges[e].a };
            if v == b {
                break;
            }
            match at(v).into_iter().find(|&f| f != e) {
                Some(f) => e = f,
                None => break,
            }
        }
        fp
    }

    /// Number of cycles of `m` minus the minimal matching enclosing each
    /// face (tiles, then the extra face).
    fn enclosure_counts(&self, faces: &[Option<(usize, usize)>], m: &[usize]) -> Vec<i64> {
        let k = self.tiles.len();
        let pm: BTreeSet<usize> = self.minimal.iter().copied().collect();
        let mm: BTreeSet<usize> = m.iter().copied().collect();
        let diff: Vec<usize> = (0..self.edges.len()).filter(|e| pm.contains(e) != mm.contains(e)).collect();
        // group the symmetric difference into cycles by shared vertices
        let mut root: Vec<usize> = (0..self.points.len()).collect();
        fn find(r: &mut [usize], mut v: usize) -> usize {
            while r[v] != v {
                r[v] = r[r[v]];
                v = r[v];
            }
            v
        }
        for &e in &diff {
            let (x, y) = (find(&mut root, self.edges[e].a), find(&mut root, self.edges[e].b));
            root[x] = y;
        }
        let mut cycles: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for &e in &diff {
            let r = find(&mut root, self.edges[e].a);
            cycles.entry(r).or_default().insert(e);
        }
        let mut count = vec![0i64; k + 2];
        for cyc in cycles.values() {
            let mut reach = vec![false; k + 2];
            reach[k + 1] = true;
            let mut stack = vec![k + 1];
            while let Some(f) = stack.pop() {
                for (id, pair) in faces.iter().enumerate() {
                    let Some((p, q)) = *pair else { continue };
                    if cyc.contains(&id) {
                        continue;
                    }
                    for (u, w) in [(p, q), (q, p)] {
                        if u == f && !reach[w] {
                            reach[w] = true;
                            stack.push(w);
                        }
                    }
                }
            }
            for (c, r) in count.iter_mut().zip(&reach) {
                if !r {
                    *c += 1;
                }
            }
        }
        count.truncate(k + 1);
        count
    }

    fn height_with(&self, faces: &[Option<(usize, usize)>], m: &[usize]) -> ExponentVector {
        let count = self.enclosure_counts(faces, m);
        let k = self.tiles.len();
        let mut pairs: Vec<(Var, i64)> = (0..k)
            .filter(|&i| count[i] > 0)
            .map(|i| (Var::y(self.tiles[i].diagonal), count[i]))
            .collect();
        // the extra face cancels the crossings of the second arc
        if count[k] > 0 && self.extra_edge.is_some() {
            pairs.extend(self.tiles.iter().filter(|t| t.part == 2).map(|t| (Var::y(t.diagonal), -count[k])));
        }
        ExponentVector::from_pairs(pairs)
    }

    /// Height monomial of a matching: each face is weighted by the number of
    /// cycles of `m` minus the minimal matching around it.
    pub fn height(&self, m: &[usize]) -> ExponentVector {
        self.height_with(&self.dual_faces(), m)
    }

    /// Tiles enclosed by the symmetric difference with the minimal matching,
    /// found by parity along the chain. Only meaningful for plain graphs.
    pub fn enclosed_tiles(&self, m: &[usize]) -> Vec<usize> {
        let pm: BTreeSet<usize> = self.minimal.iter().copied().collect();
        let mm: BTreeSet<usize> = m.iter().copied().collect();
        let in_diff = |e: &usize| pm.contains(e) != mm.contains(e);
        let mut out = Vec::new();
        let mut inside = self.tile_edges(0).iter().any(|e| self.is_external(*e) && in_diff(e));
        for i in 0..self.tiles.len() {
            if i > 0 {
                let shared: Vec<usize> = self
                    .tile_edges(i)
                    .into_iter()
                    .filter(|e| self.edges[*e].tiles.contains(&(i - 1)))
                    .collect();
                if shared.iter().any(in_diff) {
                    inside = !inside;
                }
            }
            if inside {
                out.push(self.tiles[i].diagonal);
            }
        }
        out
    }

    pub fn matching_polynomial(&self) -> LaurentPolynomial {
        let faces = self.dual_faces();
        LaurentPolynomial::from_terms(self.perfect_matchings().iter().map(|m| (self.height_with(&faces, m), BigInt::from(1))))
    }

    /// Sum over the minimal matching of its arc labels minus the crossings.
    pub fn g_vector(&self) -> Vec<i64> {
        let mut g = vec![0i64; self.rank];
        for &e in &self.minimal {
            if let EdgeLabel::Arc(a) = self.edges[e].label {
                g[a] += 1;
            }
        }
        for &c in &self.crossings {
            g[c] -= 1;
        }
        g
    }

    /// Edge labels of the minimal matching, counted per arc.
    pub fn minimal_label_counts(&self) -> Vec<i64> {
        let mut g = vec![0i64; self.rank];
        for &e in &self.minimal {
            if let EdgeLabel::Arc(a) = self.edges[e].label {
                g[a] += 1;
            }
        }
        g
    }

    /// Full expansion `sum x(P) y(P) / cross` for plain graphs.
    pub fn laurent_expansion(&self) -> LaurentPolynomial {
        let mut cross = ExponentVector::one();
        for &c in &self.crossings {
            cross = cross.mul(&ExponentVector::var(Var::x(c)));
        }
        let inv = cross.pow(-1);
        let mut out = LaurentPolynomial::zero();
        for m in self.perfect_matchings() {
            let xs = ExponentVector::from_pairs(m.iter().filter_map(|&e| match self.edges[e].label {
                EdgeLabel::Arc(a) => Some((Var::x(a), 1)),
                _ => None,
            }));
            out = &out + &LaurentPolynomial::monomial(xs.mul(&self.height(&m)).mul(&inv), 1);
        }
        out
    }

    /// Edge of a tile with the given side index (0 S, 1 E, 2 N, 3 W).
    fn side(&self, tile: usize, s: usize) -> usize {
        self.tiles[tile].sides[s]
    }
}

/// The plain snake graph of an arc.
pub fn build_snake(t: &Triangulation, arc: &ArcPath) -> Result<SnakeGraph, SnakeError> {
    let d = arc.len();
    if d == 0 {
        return Err(SnakeError::EmptyArc);
    }
    let mut b = Builder { points: Vec::new(), at: BTreeMap::new(), edges: Vec::new(), by_ends: BTreeMap::new() };
    let mut tiles = Vec::new();
    let (mut x, mut y) = (0i64, 0i64);
    let mut rel: i8 = 1;
    for j in 0..d {
        let c = arc.crossings[j];
        let before = t.rotated(arc.triangles[j], Edge::Arc(c));
        let after = t.rotated(arc.triangles[j + 1], Edge::Arc(c));
        let (w, s) = if rel > 0 { (before[1], before[2]) } else { (before[2], before[1]) };
        let (e, nn) = if rel > 0 { (after[1], after[2]) } else { (after[2], after[1]) };
        let sw = b.vertex(x, y);
        let se = b.vertex(x + 1, y);
        let ne = b.vertex(x + 1, y + 1);
        let nw = b.vertex(x, y + 1);
        let es = b.edge(sw, se, EdgeLabel::from_edge(s), j)?;
        let ee = b.edge(se, ne, EdgeLabel::from_edge(e), j)?;
        let en = b.edge(ne, nw, EdgeLabel::from_edge(nn), j)?;
        let ew = b.edge(nw, sw, EdgeLabel::from_edge(w), j)?;
        tiles.push(Tile {
            diagonal: c,
            corners: [sw, se, ne, nw],
            sides: [es, ee, en, ew],
            rel,
            part: 1,
            hexagon: None,
        });
        if j + 1 < d {
            let next = arc.crossings[j + 1];
            // glue along the side that is neither crossed arc
            if e == Edge::Arc(next) {
                y += 1;
            } else if nn == Edge::Arc(next) {
                x += 1;
            } else {
                return Err(SnakeError::Layout(format!("crossing {} is not a side of tile {}", j + 1, j)));
            }
        }
        rel = -rel;
    }
    let mut g = SnakeGraph {
        points: b.points,
        edges: b.edges,
        tiles,
        extra_edge: None,
        crossings: arc.crossings.clone(),
        minimal: Vec::new(),
        exempt: None,
        rank: t.n(),
    };
    g.minimal = boundary_matching(&g, g.side(0, 0))?;
    Ok(g)
}

/// The matching made of every other boundary edge, starting with `first`.
fn boundary_matching(g: &SnakeGraph, first: usize) -> Result<Vec<usize>, SnakeError> {
    let mut inc: Vec<Vec<usize>> = vec![Vec::new(); g.num_vertices()];
    for (id, e) in g.edges.iter().enumerate() {
        if g.is_external(id) {
            inc[e.a].push(id);
            inc[e.b].push(id);
        }
    }
    let mut out = vec![first];
    let mut prev = first;
    let mut v = g.edges[first].b;
    let start = g.edges[first].a;
    let mut take = false;
    while v != start {
        let next = *inc[v]
            .iter()
            .find(|&&e| e != prev)
            .ok_or_else(|| SnakeError::Layout("boundary is not a cycle".into()))?;
        if take {
            out.push(next);
        }
        take = !take;
        let e = &g.edges[next];
        v = if e.a == v { e.b } else { e.a };
        prev = next;
    }
    out.sort();
    if !g.is_perfect(&out) {
        return Err(SnakeError::NotPerfect);
    }
    Ok(out)
}

/// Plain matching polynomial and g-vector of an arc.
pub fn arc_expansion(t: &Triangulation, arc: &ArcPath) -> Result<(LaurentPolynomial, Vec<i64>), SnakeError> {
    if arc.is_empty() {
        return Ok((LaurentPolynomial::one(), vec![0; t.n()]));
    }
    let g = build_snake(t, arc)?;
    Ok((g.matching_polynomial(), g.g_vector()))
}

/// The expansion attached to an arc of the triangulation itself.
pub fn initial_expansion(n: usize, i: usize) -> (LaurentPolynomial, Vec<i64>) {
    let mut g = vec![0; n];
    g[i] = 1;
    (LaurentPolynomial::one(), g)
}

/// Maps a plain matching to the modified graph (see [`modify`]).
#[derive(Clone, Debug)]
struct Subdivision {
    /// Original side edge (now `u - p`), middle edge, far edge `q - v`.
    side: usize,
    middle: usize,
    far: usize,
}

/// Subdivides the invariant-arc side of every tile crossing the preceding
/// arc next to it, and relabels the tile of the invariant arc.
fn modify(t: &Triangulation, bp: &BasepointData, mut g: SnakeGraph) -> Result<SnakeGraph, SnakeError> {
    let mut subs = Vec::new();
    for i in 0..g.tiles.len() {
        if g.tiles[i].diagonal != bp.prev {
            continue;
        }
        let sides = g.tiles[i].sides;
        let Some(&side) = sides.iter().find(|&&e| g.edges[e].label == EdgeLabel::Arc(bp.tau)) else {
            continue;
        };
        let third = sides
            .iter()
            .copied()
            .find(|&e| {
                matches!(g.edges[e].label, EdgeLabel::Boundary(_))
                    && shares_vertex(&g, e, side)
                    && t.triangles[bp.delta_n].contains(&match g.edges[e].label {
                        EdgeLabel::Boundary(b) => Edge::Boundary(b),
                        _ => unreachable!(),
                    })
            })
            .ok_or_else(|| SnakeError::Layout("no boundary side next to the invariant arc".into()))?;
        let (sa, sb) = (g.edges[side].a, g.edges[side].b);
        let (ta, tb) = (g.edges[third].a, g.edges[third].b);
        let u = if sa == ta || sa == tb { sa } else { sb };
        let v = if u == sa { sb } else { sa };
        // push the new vertices away from the tile
        let c = tile_center(&g, i);
        let (pu, pv) = (g.points[u], g.points[v]);
        let mid = ((pu.0 + pv.0) / 2.0, (pu.1 + pv.1) / 2.0);
        let out = (mid.0 - c.0, mid.1 - c.1);
        let h = 0.5 / (out.0 * out.0 + out.1 * out.1).sqrt();
        let p = g.points.len();
        g.points.push((pu.0 + out.0 * h, pu.1 + out.1 * h));
        let q = g.points.len();
        g.points.push((pv.0 + out.0 * h, pv.1 + out.1 * h));
        g.edges[side] = GEdge { a: u, b: p, label: EdgeLabel::Arc(bp.tau), tiles: vec![i] };
        let middle = g.edges.len();
        g.edges.push(GEdge { a: p, b: q, label: EdgeLabel::Bracket(bp.prev), tiles: vec![i] });
        let far = g.edges.len();
        g.edges.push(GEdge { a: q, b: v, label: EdgeLabel::Arc(bp.tau), tiles: vec![i] });
        g.tiles[i].hexagon = Some(Hexagon { u, p, q, v, middle, far });
        subs.push(Subdivision { side, middle, far });
    }
    for i in 0..g.tiles.len() {
        if g.tiles[i].diagonal != bp.tau {
            continue;
        }
        let sides = g.tiles[i].sides;
        for s in 0..4 {
            if g.edges[sides[s]].tiles.len() > 1 {
                let opp = sides[(s + 2) % 4];
                g.edges[opp].label = EdgeLabel::Bracket(bp.prev);
            }
        }
    }
    let mut m: BTreeSet<usize> = g.minimal.iter().copied().collect();
    for s in &subs {
        if m.contains(&s.side) {
            m.insert(s.far);
        } else {
            m.insert(s.middle);
        }
    }
    g.minimal = m.into_iter().collect();
    if !g.is_perfect(&g.minimal) {
        return Err(SnakeError::NotPerfect);
    }
    g.exempt = Some(bp.tau);
    Ok(g)
}

fn shares_vertex(g: &SnakeGraph, e: usize, f: usize) -> bool {
    let (a, b) = (&g.edges[e], &g.edges[f]);
    a.a == b.a || a.a == b.b || a.b == b.a || a.b == b.b
}

fn tile_center(g: &SnakeGraph, i: usize) -> (f64, f64) {
    let c = g.tiles[i].corners;
    let (mut x, mut y) = (0.0, 0.0);
    for v in c {
        x += g.points[v].0 / 4.0;
        y += g.points[v].1 / 4.0;
    }
    (x, y)
}

/// The modified snake graph of an arc of the restricted surface.
pub fn build_modified(t: &Triangulation, arc: &ArcPath) -> Result<SnakeGraph, SnakeError> {
    let bp = t.basepoint_data()?;
    let g = build_snake(t, arc)?;
    modify(t, &bp, g)
}

/// The graph of an orbit: the modified graph of the first arc, glued with
/// the modified graph of the second arc for a kind Two orbit.
pub fn build_orbit_graph(t: &Triangulation, orbit: &Orbit) -> Result<SnakeGraph, SnakeError> {
    let bp = t.basepoint_data()?;
    match orbit {
        Orbit::One(g1) => build_modified(t, g1),
        Orbit::Two(g1, g2) => {
            let a = build_modified(t, g1)?;
            let b = build_modified(t, g2)?;
            glue(&bp, a, b)
        }
    }
}

fn glue(bp: &BasepointData, a: SnakeGraph, b: SnakeGraph) -> Result<SnakeGraph, SnakeError> {
    let ka = a.tiles.len();
    let kb = b.tiles.len();
    if ka < 2 || a.tiles[ka - 2].diagonal != bp.prev || a.tiles[ka - 1].diagonal != bp.tau {
        return Err(SnakeError::HypothesisViolated("first arc must end by crossing the preceding arc and the invariant arc".into()));
    }
    let hex = a.tiles[ka - 2]
        .hexagon
        .clone()
        .ok_or_else(|| SnakeError::Layout("first arc has no hexagonal tile".into()))?;
    let last_b = kb - 1;
    if b.tiles[last_b].diagonal != bp.tau {
        return Err(SnakeError::HypothesisViolated("second arc must end at the basepoint".into()));
    }
    let bt = &b.tiles[last_b];
    // the side of the last tile of the second arc that gets glued
    let glue_edge = if kb >= 2 {
        *bt.sides
            .iter()
            .find(|&&e| b.edges[e].label == EdgeLabel::Bracket(bp.prev) && b.edges[e].tiles.len() == 1)
            .ok_or_else(|| SnakeError::Layout("relabelled side missing".into()))?
    } else {
        let lower = [bt.sides[0], bt.sides[3]];
        *lower
            .iter()
            .find(|&&e| matches!(b.edges[e].label, EdgeLabel::Boundary(_)))
            .ok_or_else(|| SnakeError::Layout("boundary side missing".into()))?
    };
    let prev_side = *[bt.sides[0], bt.sides[3]]
        .iter()
        .find(|&&e| b.edges[e].label == EdgeLabel::Arc(bp.prev))
        .ok_or_else(|| SnakeError::Layout("side of the preceding arc missing".into()))?;
    let ge = &b.edges[glue_edge];
    let pe = &b.edges[prev_side];
    let w_adj = if ge.a == pe.a || ge.a == pe.b { ge.a } else { ge.b };
    let w_other = if w_adj == ge.a { ge.b } else { ge.a };

    let mut g = a.clone();
    let offset_tiles = ka;
    let mut vmap = vec![usize::MAX; b.num_vertices()];
    vmap[w_adj] = hex.q;
    vmap[w_other] = hex.p;
    // similarity placing the second graph against the hexagon
    let place = placement(&a, &hex, ka - 2, &b, w_adj, w_other, last_b);
    for v in 0..b.num_vertices() {
        if vmap[v] == usize::MAX {
            vmap[v] = g.points.len();
            g.points.push(place(b.points[v]));
        }
    }
    let mut emap = vec![usize::MAX; b.edges.len()];
    for (id, e) in b.edges.iter().enumerate() {
        let tiles: Vec<usize> = e.tiles.iter().map(|t| t + offset_tiles).collect();
        if id == glue_edge {
            g.edges[hex.middle].tiles.extend(tiles);
            emap[id] = hex.middle;
        } else {
            emap[id] = g.edges.len();
            g.edges.push(GEdge { a: vmap[e.a], b: vmap[e.b], label: e.label.clone(), tiles });
        }
    }
    for t in &b.tiles {
        let mut t2 = t.clone();
        t2.corners = t.corners.map(|v| vmap[v]);
        t2.sides = t.sides.map(|e| emap[e]);
        t2.part = 2;
        if let Some(h) = &t.hexagon {
            t2.hexagon = Some(Hexagon {
                u: vmap[h.u],
                p: vmap[h.p],
                q: vmap[h.q],
                v: vmap[h.v],
                middle: emap[h.middle],
                far: emap[h.far],
            });
        }
        g.tiles.push(t2);
    }
    if kb >= 2 {
        let from = a.tiles[ka - 1].corners[0];
        let to = vmap[b.tiles[kb - 2].corners[0]];
        g.extra_edge = Some(g.edges.len());
        g.edges.push(GEdge { a: from, b: to, label: EdgeLabel::Arc(bp.prev), tiles: vec![] });
    }
    g.crossings.extend(b.crossings.iter());
    let mut m: BTreeSet<usize> = a.minimal.iter().copied().collect();
    m.extend(b.minimal.iter().map(|&e| emap[e]));
    if !g.is_perfect(&m.iter().copied().collect::<Vec<_>>()) {
        // p and q are already covered on both sides
        m.remove(&hex.middle);
    }
    g.minimal = m.into_iter().collect();
    if !g.is_perfect(&g.minimal) {
        return Err(SnakeError::NotPerfect);
    }
    Ok(g)
}

type Placement = Box<dyn Fn((f64, f64)) -> (f64, f64)>;

fn placement(
    a: &SnakeGraph,
    hex: &Hexagon,
    hex_tile: usize,
    b: &SnakeGraph,
    w_adj: usize,
    w_other: usize,
    b_tile: usize,
) -> Placement {
    type C = (f64, f64);
    fn sub(x: C, y: C) -> C {
        (x.0 - y.0, x.1 - y.1)
    }
    fn mul(x: C, y: C) -> C {
        (x.0 * y.0 - x.1 * y.1, x.0 * y.1 + x.1 * y.0)
    }
    fn div(x: C, y: C) -> C {
        let d = y.0 * y.0 + y.1 * y.1;
        ((x.0 * y.0 + x.1 * y.1) / d, (x.1 * y.0 - x.0 * y.1) / d)
    }
    let (zq, zp) = (a.points[hex.q], a.points[hex.p]);
    let (wa, wo) = (b.points[w_adj], b.points[w_other]);
    let hc = tile_center(a, hex_tile);
    let bc = tile_center(b, b_tile);
    let side = |z: C| {
        let d = sub(zp, zq);
        let r = sub(z, zq);
        d.0 * r.1 - d.1 * r.0
    };
    let direct = {
        let al = div(sub(zp, zq), sub(wo, wa));
        move |z: C| {
            let m = mul(al, sub(z, wa));
            (m.0 + zq.0, m.1 + zq.1)
        }
    };
    let conj = |z: C| (z.0, -z.1);
    let mirrored = {
        let al = div(sub(zp, zq), sub(conj(wo), conj(wa)));
        move |z: C| {
            let m = mul(al, sub(conj(z), conj(wa)));
            (m.0 + zq.0, m.1 + zq.1)
        }
    };
    if side(direct(bc)) * side(hc) < 0.0 {
        Box::new(direct)
    } else {
        Box::new(mirrored)
    }
}

/// Result of expanding an orbit, with the data used to check it.
#[derive(Clone, Debug)]
pub struct OrbitExpansion {
    pub f: LaurentPolynomial,
    pub g: Vec<i64>,
    pub graph: SnakeGraph,
    pub matchings: usize,
    /// For kind Two: the monomial `d` and quotient of `F1 F2 - F`.
    pub division: Option<(ExponentVector, LaurentPolynomial)>,
    pub gamma3: Option<ArcPath>,
}

/// Matching polynomial and g-vector of an orbit, checked against the
/// expressions in terms of the restricted arcs.
pub fn orbit_expansion(t: &Triangulation, orbit: &Orbit) -> Result<OrbitExpansion, SnakeError> {
    let bp = t.basepoint_data()?;
    let graph = build_orbit_graph(t, orbit)?;
    let matchings = graph.perfect_matchings().len();
    let f = graph.matching_polynomial();
    let g = graph.g_vector();
    let dscale = |v: &[i64]| -> Vec<i64> {
        v.iter().enumerate().map(|(i, &x)| if i == bp.tau { 2 * x } else { x }).collect()
    };
    let mut out = OrbitExpansion { f: f.clone(), g: g.clone(), graph, matchings, division: None, gamma3: None };
    match orbit {
        Orbit::One(g1) => {
            let (f1, gv1) = arc_expansion(t, g1)?;
            let mut expect = dscale(&gv1);
            if g1.crosses(bp.tau) {
                expect[bp.tau] += 1;
            }
            if f1 != f {
                return Err(SnakeError::CrossCheckFailed(format!("F = {} but the arc gives {}", f, f1)));
            }
            if expect != g {
                return Err(SnakeError::CrossCheckFailed(format!("g = {:?} but expected {:?}", g, expect)));
            }
        }
        Orbit::Two(g1, g2) => {
            let (f1, gv1) = arc_expansion(t, g1)?;
            let (f2, gv2) = arc_expansion(t, g2)?;
            let diff = &(&f1 * &f2) - &f;
            if diff.is_zero() {
                return Err(SnakeError::CrossCheckFailed("F1 F2 - F vanishes".into()));
            }
            let (d, q) = diff.monomial_content()?;
            if q.constant_term() != BigInt::from(1) || !q.all_coefficients_positive() || q.has_negative_exponent() {
                return Err(SnakeError::CrossCheckFailed(format!("quotient {} is not an F-polynomial", q)));
            }
            let g3 = match t.smooth_at_basepoint(g1, g2) {
                Ok(g3) => {
                    let (f3, _) = arc_expansion(t, &g3)?;
                    if f3 != q {
                        return Err(SnakeError::CrossCheckFailed(format!("quotient {} differs from the smoothing {}", q, f3)));
                    }
                    Some(g3)
                }
                Err(SurfaceError::SmoothingUnresolved(_)) => None,
                Err(e) => return Err(e.into()),
            };
            let mut sum: Vec<i64> = gv1.iter().zip(&gv2).map(|(a, b)| a + b).collect();
            sum[bp.tau] += 1;
            let expect = dscale(&sum);
            if expect != g {
                return Err(SnakeError::CrossCheckFailed(format!("g = {:?} but expected {:?}", g, expect)));
            }
            out.division = Some((d, q));
            out.gamma3 = g3;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::ArcSpec;

    fn running() -> Triangulation {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        let t3 = |a: &str, b: &str, c: &str| [a.to_string(), b.to_string(), c.to_string()];
        Triangulation::new(
            s(&["1", "2", "3", "4", "5"]),
            s(&["b1", "b2", "b3", "bL", "bR"]),
            vec![t3("4", "2", "3"), t3("2", "1", "b1"), t3("3", "1", "b2"), t3("5", "4", "b3"), t3("5", "bL", "bR")],
            Some("5"),
            Some(4),
        )
        .unwrap()
    }

    fn arc(t: &Triangulation, c: &[&str]) -> ArcPath {
        t.validate_arc(&ArcSpec { cross: c.iter().map(|x| x.to_string()).collect(), hints: None, to_basepoint: true })
            .unwrap()
    }

    #[test]
    fn first_arc_of_running_example() {
        let t = running();
        let g = build_snake(&t, &arc(&t, &["4", "5"])).unwrap();
        assert_eq!(g.matching_polynomial().to_string(), "y4*y5 + y4 + 1");
        assert_eq!(g.g_vector(), vec![0, 0, 1, -1, 0]);
    }

    #[test]
    fn second_arc_of_running_example() {
        let t = running();
        let g = build_snake(&t, &arc(&t, &["1", "3", "4", "5"])).unwrap();
        assert_eq!(g.g_vector(), vec![-1, 1, 1, -1, 0]);
        for m in g.perfect_matchings() {
            let b = g.enclosed_tiles(&m);
            assert_eq!(g.height(&m), ExponentVector::from_pairs(b.into_iter().map(|a| (Var::y(a), 1))));
        }
    }

    #[test]
    fn golden_orbit() {
        let t = running();
        let o = t.make_pair(arc(&t, &["4", "5"]), arc(&t, &["1", "3", "4", "5"])).unwrap();
        let e = orbit_expansion(&t, &o).unwrap();
        assert_eq!(e.graph.num_vertices(), 18);
        assert_eq!(e.matchings, 23);
        assert_eq!(e.graph.minimal_label_counts(), vec![0, 1, 3, 0, 4]);
        assert_eq!(e.g, vec![-1, 1, 2, -2, 2]);
        let expected: LaurentPolynomial = "y1*y3*y4^2*y5^2 + 2*y1*y3*y4^2*y5 + y1*y4^2*y5^2 + y1*y3*y4^2 + 2*y1*y4^2*y5 \
            + y4^2*y5^2 + y1*y3*y4 + y1*y4^2 + 2*y1*y4*y5 + 2*y4^2*y5 + 2*y1*y4 + y4^2 + 2*y4*y5 + y1 + 2*y4 + 1"
            .parse()
            .unwrap();
        assert_eq!(e.f, expected);
        let (d, q) = e.division.unwrap();
        assert_eq!(d.to_string(), "y1*y3*y4*y5");
        assert_eq!(q, LaurentPolynomial::one());
    }

    #[test]
    fn single_arc_orbit_doubles_tau() {
        let t = running();
        let a = arc(&t, &["1", "3", "4", "5"]);
        let e = orbit_expansion(&t, &Orbit::One(a.clone())).unwrap();
        let (f, g) = arc_expansion(&t, &a).unwrap();
        assert_eq!(e.f, f);
        assert_eq!(e.g, vec![g[0], g[1], g[2], g[3], 2 * g[4] + 1]);
        assert!(e.division.is_none());
    }
}

