//! Triangulated surfaces, arcs as crossing sequences, and the passage between
//! the orbifold-symmetric surface, its restriction and its reflected double.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("label {0:?} is declared twice")]
    DuplicateLabel(String),
    #[error("arc {label:?} appears {count} times (expected 2)")]
    ArcMultiplicity { label: String, count: usize },
    #[error("boundary segment {label:?} appears {count} times (expected 1)")]
    BoundaryMultiplicity { label: String, count: usize },
    #[error("triangle {0} repeats an edge")]
    RepeatedEdge(usize),
    #[error("triangle index {0} out of range")]
    BadTriangle(usize),
    #[error("surface is not a manifold with boundary: {0}")]
    NotASurface(String),
    #[error("arc {0:?} cannot be flipped")]
    NotFlippable(String),
    #[error("arc is empty")]
    EmptyArc,
    #[error("crossings {pos} and {} share no triangle", .pos + 1)]
    NoSharedTriangle { pos: usize },
    #[error("crossings {pos} and {} share more than one triangle; give hints", .pos + 1)]
    AmbiguousTriangle { pos: usize },
    #[error("crossing {pos} immediately backtracks")]
    ImmediateBacktrack { pos: usize },
    #[error("triangle hints are inconsistent at position {pos}")]
    BadHint { pos: usize },
    #[error("arc does not end at the basepoint")]
    NotToBasepoint,
    #[error("triangulation has no basepoint data")]
    NoBasepoint,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("triangulation is not admissible: {0}")]
    NotAdmissible(String),
    #[error("not an orbit: {0}")]
    NotAnOrbit(String),
    #[error("arc crosses the invariant arc more than once")]
    MultipleTauNCrossings,
    #[error("smoothing at the basepoint is unresolved: {0}")]
    SmoothingUnresolved(String),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Edge {
    Arc(usize),
    Boundary(usize),
}

impl Edge {
    pub fn arc(self) -> Option<usize> {
        match self {
            Edge::Arc(a) => Some(a),
            Edge::Boundary(_) => None,
        }
    }
}

/// JSON form of a triangulation. Arc labels default to `"1".."n"`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TriangulationSpec {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arcs: Option<Vec<String>>,
    pub boundary: Vec<String>,
    pub triangles: Vec<[String; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_n: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basepoint_triangle: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Topology {
    pub vertices: usize,
    pub euler_characteristic: i64,
    pub boundary_components: usize,
    pub genus: i64,
    pub punctures: usize,
    pub boundary_marked_points: usize,
}

/// Ideal triangulation. Triangles list their edges counterclockwise; edge `p`
/// runs from corner `p` to corner `p + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangulation {
    pub arcs: Vec<String>,
    pub boundary: Vec<String>,
    pub triangles: Vec<[Edge; 3]>,
    pub tau_n: Option<usize>,
    pub basepoint_triangle: Option<usize>,
    slots: Vec<[(usize, usize); 2]>,
}

impl Triangulation {
    pub fn new(
        arcs: Vec<String>,
        boundary: Vec<String>,
        triangles: Vec<[String; 3]>,
        tau_n: Option<&str>,
        basepoint_triangle: Option<usize>,
    ) -> Result<Self, SurfaceError> {
        let mut index: BTreeMap<&str, Edge> = BTreeMap::new();
        for (i, a) in arcs.iter().enumerate() {
            if index.insert(a, Edge::Arc(i)).is_some() {
                return Err(SurfaceError::DuplicateLabel(a.clone()));
            }
        }
        for (i, b) in boundary.iter().enumerate() {
            if index.insert(b, Edge::Boundary(i)).is_some() {
                return Err(SurfaceError::DuplicateLabel(b.clone()));
            }
        }
        let mut tris = Vec::new();
        for t in &triangles {
            let mut e = [Edge::Arc(0); 3];
            for p in 0..3 {
                e[p] = *index.get(t[p].as_str()).ok_or_else(|| SurfaceError::UnknownLabel(t[p].clone()))?;
            }
            tris.push(e);
        }
        let tau = match tau_n {
            None => None,
            Some(l) => match index.get(l) {
                Some(Edge::Arc(a)) => Some(*a),
                _ => return Err(SurfaceError::UnknownLabel(l.to_string())),
            },
        };
        Self::from_edges(arcs, boundary, tris, tau, basepoint_triangle)
    }

    pub fn from_edges(
        arcs: Vec<String>,
        boundary: Vec<String>,
        triangles: Vec<[Edge; 3]>,
        tau_n: Option<usize>,
        basepoint_triangle: Option<usize>,
    ) -> Result<Self, SurfaceError> {
        let mut arc_slots: Vec<Vec<(usize, usize)>> = vec![Vec::new(); arcs.len()];
        let mut bd_count = vec![0usize; boundary.len()];
        for (t, tri) in triangles.iter().enumerate() {
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(SurfaceError::RepeatedEdge(t));
            }
            for (p, e) in tri.iter().enumerate() {
                match *e {
                    Edge::Arc(a) => arc_slots[a].push((t, p)),
                    Edge::Boundary(b) => bd_count[b] += 1,
                }
            }
        }
        for (a, s) in arc_slots.iter().enumerate() {
            if s.len() != 2 {
                return Err(SurfaceError::ArcMultiplicity { label: arcs[a].clone(), count: s.len() });
            }
        }
        for (b, &c) in bd_count.iter().enumerate() {
            if c != 1 {
                return Err(SurfaceError::BoundaryMultiplicity { label: boundary[b].clone(), count: c });
            }
        }
        if let Some(bp) = basepoint_triangle {
            if bp >= triangles.len() {
                return Err(SurfaceError::BadTriangle(bp));
            }
        }
        let slots = arc_slots.into_iter().map(|s| [s[0], s[1]]).collect();
        let t = Triangulation { arcs, boundary, triangles, tau_n, basepoint_triangle, slots };
        t.topology()?;
        Ok(t)
    }

    pub fn from_spec(spec: &TriangulationSpec) -> Result<Self, SurfaceError> {
        let arcs = spec.arcs.clone().unwrap_or_else(|| (1..=spec.n).map(|i| i.to_string()).collect());
        if arcs.len() != spec.n {
            return Err(SurfaceError::NotASurface(format!("{} arc labels for n = {}", arcs.len(), spec.n)));
        }
        Self::new(arcs, spec.boundary.clone(), spec.triangles.clone(), spec.tau_n.as_deref(), spec.basepoint_triangle)
    }

    pub fn to_spec(&self) -> TriangulationSpec {
        let default: Vec<String> = (1..=self.n()).map(|i| i.to_string()).collect();
        TriangulationSpec {
            n: self.n(),
            arcs: if self.arcs == default { None } else { Some(self.arcs.clone()) },
            boundary: self.boundary.clone(),
            triangles: self.triangles.iter().map(|t| t.map(|e| self.label(e).to_string())).collect(),
            tau_n: self.tau_n.map(|a| self.arcs[a].clone()),
            basepoint_triangle: self.basepoint_triangle,
        }
    }

    pub fn n(&self) -> usize {
        self.arcs.len()
    }

    pub fn label(&self, e: Edge) -> &str {
        match e {
            Edge::Arc(a) => &self.arcs[a],
            Edge::Boundary(b) => &self.boundary[b],
        }
    }

    pub fn arc_index(&self, label: &str) -> Result<usize, SurfaceError> {
        self.arcs.iter().position(|a| a == label).ok_or_else(|| SurfaceError::UnknownLabel(label.to_string()))
    }

    pub fn edge_of(&self, label: &str) -> Result<Edge, SurfaceError> {
        if let Some(a) = self.arcs.iter().position(|a| a == label) {
            return Ok(Edge::Arc(a));
        }
        self.boundary
            .iter()
            .position(|b| b == label)
            .map(Edge::Boundary)
            .ok_or_else(|| SurfaceError::UnknownLabel(label.to_string()))
    }

    /// The two `(triangle, position)` slots of an arc.
    pub fn slots(&self, a: usize) -> [(usize, usize); 2] {
        self.slots[a]
    }

    pub fn triangles_of(&self, a: usize) -> [usize; 2] {
        [self.slots[a][0].0, self.slots[a][1].0]
    }

    pub fn position_in(&self, t: usize, e: Edge) -> Option<usize> {
        self.triangles[t].iter().position(|&f| f == e)
    }

    /// The triangle on the other side of arc `a` from triangle `t`.
    pub fn across(&self, a: usize, t: usize) -> usize {
        let [s0, s1] = self.slots[a];
        if s0.0 == t {
            s1.0
        } else {
            debug_assert_eq!(s1.0, t);
            s0.0
        }
    }

    /// The triangle rotated so that `e` comes first.
    pub fn rotated(&self, t: usize, e: Edge) -> [Edge; 3] {
        let p = self.position_in(t, e).expect("edge not in triangle");
        let tri = self.triangles[t];
        [tri[p], tri[(p + 1) % 3], tri[(p + 2) % 3]]
    }

    /// Signed adjacency: `b[i][j] = +1` for each triangle in which arc i
    /// follows arc j counterclockwise, `-1` for the reverse.
    pub fn signed_adjacency(&self) -> Vec<Vec<i64>> {
        let n = self.n();
        let mut b = vec![vec![0i64; n]; n];
        for tri in &self.triangles {
            for p in 0..3 {
                if let (Edge::Arc(i), Edge::Arc(j)) = (tri[p], tri[(p + 1) % 3]) {
                    b[j][i] += 1;
                    b[i][j] -= 1;
                }
            }
        }
        b
    }

    /// Union-find over triangle corners; returns the vertex class of each corner.
    pub fn corner_classes(&self) -> Vec<[usize; 3]> {
        let f = self.triangles.len();
        let mut parent: Vec<usize> = (0..3 * f).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nx = p[y];
                p[y] = r;
                y = nx;
            }
            r
        }
        for s in &self.slots {
            let [(t1, p1), (t2, p2)] = *s;
            let pairs = [(3 * t1 + p1, 3 * t2 + (p2 + 1) % 3), (3 * t1 + (p1 + 1) % 3, 3 * t2 + p2)];
            for (a, b) in pairs {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
        let mut ids: BTreeMap<usize, usize> = BTreeMap::new();
        let mut out = vec![[0usize; 3]; f];
        for t in 0..f {
            for c in 0..3 {
                let r = find(&mut parent, 3 * t + c);
                let next = ids.len();
                out[t][c] = *ids.entry(r).or_insert(next);
            }
        }
        out
    }

    pub fn topology(&self) -> Result<Topology, SurfaceError> {
        let cls = self.corner_classes();
        let v = cls.iter().flat_map(|c| c.iter()).collect::<BTreeSet<_>>().len();
        let e = self.arcs.len() + self.boundary.len();
        let f = self.triangles.len();
        let chi = v as i64 - e as i64 + f as i64;
        // boundary segments as directed edges between vertex classes
        let mut out_edges: BTreeMap<usize, usize> = BTreeMap::new();
        let mut in_edges: BTreeMap<usize, usize> = BTreeMap::new();
        let mut segs = Vec::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            for p in 0..3 {
                if let Edge::Boundary(_) = tri[p] {
                    let (a, b) = (cls[t][p], cls[t][(p + 1) % 3]);
                    if out_edges.insert(a, b).is_some() || in_edges.insert(b, a).is_some() {
                        return Err(SurfaceError::NotASurface(format!(
                            "two boundary segments meet badly at vertex {}",
                            a
                        )));
                    }
                    segs.push(a);
                }
            }
        }
        let mut seen = BTreeSet::new();
        let mut comps = 0;
        for &s in &segs {
            if seen.contains(&s) {
                continue;
            }
            comps += 1;
            let mut cur = s;
            loop {
                seen.insert(cur);
                cur = match out_edges.get(&cur) {
                    Some(&c) => c,
                    None => return Err(SurfaceError::NotASurface("open boundary chain".into())),
                };
                if cur == s {
                    break;
                }
            }
        }
        let bmarked = out_edges.len();
        let punctures = v - bmarked;
        let twice_genus = 2 - chi - comps as i64;
        if twice_genus < 0 || twice_genus % 2 != 0 {
            return Err(SurfaceError::NotASurface(format!("euler characteristic {} with {} boundary components", chi, comps)));
        }
        Ok(Topology {
            vertices: v,
            euler_characteristic: chi,
            boundary_components: comps,
            genus: twice_genus / 2,
            punctures,
            boundary_marked_points: bmarked,
        })
    }

    /// Flip of arc `k` inside its quadrilateral. Basepoint data is dropped
    /// when the flip touches it.
    pub fn flip(&self, k: usize) -> Result<Triangulation, SurfaceError> {
        let [(t1, _), (t2, _)] = self.slots[k];
        if t1 == t2 {
            return Err(SurfaceError::NotFlippable(self.arcs[k].clone()));
        }
        let [_, a, b] = self.rotated(t1, Edge::Arc(k));
        let [_, c, d] = self.rotated(t2, Edge::Arc(k));
        let mut tris = self.triangles.clone();
        tris[t1] = [Edge::Arc(k), b, c];
        tris[t2] = [Edge::Arc(k), d, a];
        let touches = self.tau_n == Some(k) || self.basepoint_triangle.map_or(false, |bp| bp == t1 || bp == t2);
        let (tau, bp) = if touches { (None, None) } else { (self.tau_n, self.basepoint_triangle) };
        Triangulation::from_edges(self.arcs.clone(), self.boundary.clone(), tris, tau, bp)
    }

    /// The non-basepoint triangle at the invariant arc and the arc sharing it.
    pub fn basepoint_data(&self) -> Result<BasepointData, SurfaceError> {
        let tau = self.tau_n.ok_or(SurfaceError::NoBasepoint)?;
        let bp = self.basepoint_triangle.ok_or(SurfaceError::NoBasepoint)?;
        let rot = self.rotated(bp, Edge::Arc(tau));
        if rot[1].arc().is_some() || rot[2].arc().is_some() {
            return Err(SurfaceError::HypothesisViolated("basepoint triangle must have two boundary sides".into()));
        }
        let delta_n = self.across(tau, bp);
        let r = self.rotated(delta_n, Edge::Arc(tau));
        let (prev, sign) = match (r[1], r[2]) {
            (Edge::Arc(a), Edge::Boundary(_)) => (a, 1),
            (Edge::Boundary(_), Edge::Arc(a)) => (a, -1),
            _ => {
                return Err(SurfaceError::HypothesisViolated(
                    "the triangle at the invariant arc must contain one more arc and one boundary segment".into(),
                ))
            }
        };
        Ok(BasepointData { tau, basepoint: bp, delta_n, prev, sign })
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct BasepointData {
    /// Index of the invariant arc.
    pub tau: usize,
    pub basepoint: usize,
    /// The other triangle at the invariant arc.
    pub delta_n: usize,
    /// The second arc of `delta_n`.
    pub prev: usize,
    /// +1 when `delta_n` reads (tau, prev, boundary) counterclockwise.
    pub sign: i8,
}

/// JSON form of an arc.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq, Default)]
pub struct ArcSpec {
    pub cross: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hints: Option<Vec<usize>>,
    #[serde(default)]
    pub to_basepoint: bool,
}

/// An arc as its crossing sequence with the triangles it passes through:
/// `triangles[j]` lies between crossings `j` and `j + 1`. Each endpoint is
/// the corner opposite the first (last) crossed arc.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArcPath {
    pub crossings: Vec<usize>,
    pub triangles: Vec<usize>,
    pub to_basepoint: bool,
}

impl ArcPath {
    pub fn len(&self) -> usize {
        self.crossings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.crossings.is_empty()
    }

    pub fn reversed(&self) -> ArcPath {
        let mut c = self.crossings.clone();
        c.reverse();
        let mut t = self.triangles.clone();
        t.reverse();
        ArcPath { crossings: c, triangles: t, to_basepoint: false }
    }

    pub fn crosses(&self, a: usize) -> bool {
        self.crossings.contains(&a)
    }

    pub fn labels<'a>(&self, t: &'a Triangulation) -> Vec<&'a str> {
        self.crossings.iter().map(|&a| t.arcs[a].as_str()).collect()
    }

    pub fn to_spec(&self, t: &Triangulation) -> ArcSpec {
        ArcSpec {
            cross: self.labels(t).into_iter().map(String::from).collect(),
            hints: Some(self.triangles.clone()),
            to_basepoint: self.to_basepoint,
        }
    }
}

impl Triangulation {
    /// Checks a crossing sequence and resolves its triangle sequence.
    pub fn validate_arc(&self, spec: &ArcSpec) -> Result<ArcPath, SurfaceError> {
        let cross: Vec<usize> = spec.cross.iter().map(|l| self.arc_index(l)).collect::<Result<_, _>>()?;
        self.arc_from_indices(&cross, spec.hints.as_deref(), spec.to_basepoint)
    }

    pub fn arc_from_indices(
        &self,
        cross: &[usize],
        hints: Option<&[usize]>,
        to_basepoint: bool,
    ) -> Result<ArcPath, SurfaceError> {
        let d = cross.len();
        if d == 0 {
            return Err(SurfaceError::EmptyArc);
        }
        for j in 1..d {
            if cross[j] == cross[j - 1] {
                return Err(SurfaceError::ImmediateBacktrack { pos: j });
            }
        }
        let tris: Vec<usize> = match hints {
            Some(h) => {
                if h.len() != d + 1 {
                    return Err(SurfaceError::BadHint { pos: h.len().min(d + 1) });
                }
                for &t in h {
                    if t >= self.triangles.len() {
                        return Err(SurfaceError::BadTriangle(t));
                    }
                }
                h.to_vec()
            }
            None => {
                let mut mids = Vec::new();
                for j in 1..d {
                    let a = self.triangles_of(cross[j - 1]);
                    let b = self.triangles_of(cross[j]);
                    let shared: BTreeSet<usize> =
                        a.iter().filter(|t| b.contains(t)).copied().collect();
                    match shared.len() {
                        0 => return Err(SurfaceError::NoSharedTriangle { pos: j }),
                        1 => mids.push(*shared.iter().next().unwrap()),
                        _ => return Err(SurfaceError::AmbiguousTriangle { pos: j }),
                    }
                }
                let first = if d == 1 {
                    let [t0, t1] = self.triangles_of(cross[0]);
                    if to_basepoint && self.basepoint_triangle == Some(t0) {
                        t1
                    } else {
                        t0
                    }
                } else {
                    self.across(cross[0], mids[0])
                };
                let last = self.across(cross[d - 1], if d == 1 { first } else { mids[d - 2] });
                let mut t = vec![first];
                t.extend(mids);
                t.push(last);
                t
            }
        };
        for j in 0..d {
            let (a, b) = (tris[j], tris[j + 1]);
            let [s0, s1] = self.slots[cross[j]];
            let ok = (s0.0 == a && s1.0 == b) || (s1.0 == a && s0.0 == b);
            if !ok {
                return Err(SurfaceError::BadHint { pos: j });
            }
        }
        let path = ArcPath { crossings: cross.to_vec(), triangles: tris, to_basepoint };
        if to_basepoint {
            let bp = self.basepoint_data()?;
            if *path.crossings.last().unwrap() != bp.tau || *path.triangles.last().unwrap() != bp.basepoint {
                return Err(SurfaceError::NotToBasepoint);
            }
        }
        Ok(path)
    }

    /// Is the path's final corner the basepoint?
    pub fn ends_at_basepoint(&self, p: &ArcPath) -> bool {
        match (self.tau_n, self.basepoint_triangle) {
            (Some(tau), Some(bp)) => p.crossings.last() == Some(&tau) && p.triangles.last() == Some(&bp),
            _ => false,
        }
    }

    /// A non-backtracking walk through the triangulation of at most `max_len`
    /// crossings, normalised so that a basepoint endpoint comes last.
    pub fn random_arc<R: Rng>(&self, rng: &mut R, max_len: usize, stop_prob: f64) -> ArcPath {
        let n = self.n();
        loop {
            let a = rng.gen_range(0..n);
            let side = rng.gen_range(0..2);
            let start = self.slots[a][side].0;
            let mut cross = vec![a];
            let mut tris = vec![start, self.across(a, start)];
            while cross.len() < max_len {
                let t = *tris.last().unwrap();
                let entry = Edge::Arc(*cross.last().unwrap());
                let r = self.rotated(t, entry);
                let exits: Vec<usize> = [r[1], r[2]].iter().filter_map(|e| e.arc()).collect();
                if exits.is_empty() || rng.gen_bool(stop_prob) {
                    break;
                }
                let e = exits[rng.gen_range(0..exits.len())];
                cross.push(e);
                tris.push(self.across(e, t));
            }
            let mut p = ArcPath { crossings: cross, triangles: tris, to_basepoint: false };
            let starts_bp = self.basepoint_triangle == Some(p.triangles[0]);
            if starts_bp && self.ends_at_basepoint(&p.reversed()) {
                p = p.reversed();
            }
            if self.ends_at_basepoint(&p) {
                if self.ends_at_basepoint(&p.reversed()) {
                    // loop at the basepoint; not used
                    continue;
                }
                p.to_basepoint = true;
            }
            return p;
        }
    }

    /// A random arc ending at the basepoint, of at most `max_len` crossings.
    pub fn random_basepoint_arc<R: Rng>(&self, rng: &mut R, max_len: usize, stop_prob: f64) -> Result<ArcPath, SurfaceError> {
        let bp = self.basepoint_data()?;
        loop {
            let mut cross = vec![bp.tau];
            let mut tris = vec![bp.basepoint, bp.delta_n];
            while cross.len() < max_len {
                let t = *tris.last().unwrap();
                let r = self.rotated(t, Edge::Arc(*cross.last().unwrap()));
                let exits: Vec<usize> = [r[1], r[2]].iter().filter_map(|e| e.arc()).collect();
                if exits.is_empty() || rng.gen_bool(stop_prob) {
                    break;
                }
                let e = exits[rng.gen_range(0..exits.len())];
                cross.push(e);
                tris.push(self.across(e, t));
            }
            let mut p = ArcPath { crossings: cross, triangles: tris, to_basepoint: false }.reversed();
            if self.ends_at_basepoint(&p.reversed()) {
                continue;
            }
            p.to_basepoint = true;
            return Ok(p);
        }
    }
}

/// An orbit of arcs in the symmetric surface, described on the restricted
/// surface: one arc (`One`) or two arcs ending at the basepoint (`Two`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Orbit {
    One(ArcPath),
    Two(ArcPath, ArcPath),
}

/// JSON form of an orbit.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct OrbitSpec {
    pub kind: String,
    pub gamma1: ArcSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma2: Option<ArcSpec>,
}

impl Orbit {
    pub fn gamma1(&self) -> &ArcPath {
        match self {
            Orbit::One(a) | Orbit::Two(a, _) => a,
        }
    }

    pub fn to_spec(&self, t: &Triangulation) -> OrbitSpec {
        match self {
            Orbit::One(a) => OrbitSpec { kind: "One".into(), gamma1: a.to_spec(t), gamma2: None },
            Orbit::Two(a, b) => OrbitSpec { kind: "Two".into(), gamma1: a.to_spec(t), gamma2: Some(b.to_spec(t)) },
        }
    }
}

impl Triangulation {
    pub fn orbit_from_spec(&self, spec: &OrbitSpec) -> Result<Orbit, SurfaceError> {
        let g1 = self.validate_arc(&spec.gamma1)?;
        match spec.kind.as_str() {
            "One" | "one" | "1" => {
                if spec.gamma2.is_some() {
                    return Err(SurfaceError::NotAnOrbit("kind One takes a single arc".into()));
                }
                Ok(Orbit::One(g1))
            }
            "Two" | "two" | "2" => {
                let g2 = self.validate_arc(spec.gamma2.as_ref().ok_or_else(|| {
                    SurfaceError::NotAnOrbit("kind Two needs gamma2".into())
                })?)?;
                self.make_pair(g1, g2)
            }
            k => Err(SurfaceError::NotAnOrbit(format!("unknown kind {:?}", k))),
        }
    }

    /// The arc as segments `(triangle, from, to)`, with boundary positions
    /// numbered around the triangle: side `p` is `2p + 1`, the corner between
    /// sides `p - 1` and `p` is `2p`.
    fn segments(&self, a: &ArcPath) -> Vec<(usize, usize, usize)> {
        let d = a.crossings.len();
        // slot positions of each crossing on the two sides
        let mut exit = Vec::with_capacity(d);
        let mut entry = Vec::with_capacity(d);
        for j in 0..d {
            let [s0, s1] = self.slots[a.crossings[j]];
            let (x, y) = if s0.0 == a.triangles[j] { (s0, s1) } else { (s1, s0) };
            exit.push(2 * x.1 + 1);
            entry.push(2 * y.1 + 1);
        }
        let corner = |side: usize| 2 * ((side / 2 + 2) % 3);
        (0..=d)
            .map(|i| {
                let from = if i == 0 { corner(exit[0]) } else { entry[i - 1] };
                let to = if i == d { corner(entry[d - 1]) } else { exit[i] };
                (a.triangles[i], from, to)
            })
            .collect()
    }

    /// Number of transverse intersections of two arcs away from their
    /// endpoints, both taken in minimal position.
    pub fn interior_crossings(&self, a: &ArcPath, b: &ArcPath) -> usize {
        let sa = self.segments(a);
        let sb = self.segments(b);
        let before = |s: usize, x: usize, y: usize| (x + 6 - s) % 6 < (y + 6 - s) % 6;
        let mut count = 0;
        for (i, &(ta, a0, a1)) in sa.iter().enumerate() {
            for (j, &(tb, b0, b1)) in sb.iter().enumerate() {
                if ta != tb {
                    continue;
                }
                let shared: Vec<usize> = [a0, a1].into_iter().filter(|p| *p == b0 || *p == b1).collect();
                match shared.len() {
                    0 => {
                        let inside = |p: usize| {
                            let (lo, hi) = (a0.min(a1), a0.max(a1));
                            p > lo && p < hi
                        };
                        if inside(b0) != inside(b1) {
                            count += 1;
                        }
                    }
                    1 if shared[0] % 2 == 1 => {
                        // the start of a run through side `s`: follow it to its end
                        let s = shared[0];
                        let (x, fwd_a) = if a1 == s { (a0, true) } else { (a1, false) };
                        let (y, fwd_b) = if b1 == s { (b0, true) } else { (b1, false) };
                        if x % 2 == 0 && x == y {
                            continue;
                        }
                        let left_start = before(s, x, y);
                        let step = |k: usize, fwd: bool, len: usize| -> Option<usize> {
                            if fwd {
                                (k + 1 < len).then_some(k + 1)
                            } else {
                                k.checked_sub(1)
                            }
                        };
                        let (mut ka, mut kb) = (i, j);
                        let end = loop {
                            let (Some(na), Some(nb)) = (step(ka, fwd_a, sa.len()), step(kb, fwd_b, sb.len())) else {
                                break None;
                            };
                            ka = na;
                            kb = nb;
                            let orient = |seg: (usize, usize, usize), fwd: bool| if fwd { (seg.1, seg.2) } else { (seg.2, seg.1) };
                            let (ea, xa) = orient(sa[ka], fwd_a);
                            let (eb, xb) = orient(sb[kb], fwd_b);
                            if sa[ka].0 != sb[kb].0 || ea != eb {
                                break None;
                            }
                            if xa != xb {
                                break Some((ea, xa, xb));
                            }
                            if xa % 2 == 0 {
                                break None;
                            }
                        };
                        // only count each run once, from the end with the smaller index in `a`
                        if let Some((e, xa, xb)) = end {
                            let left_end = before(e, xb, xa);
                            if fwd_a && left_start != left_end {
                                count += 1;
                            }
                        }
                    }
                    _ => {}
                }
            }
        }
        count
    }

    /// Builds a kind Two orbit from two distinct arcs ending at the basepoint,
    /// putting them in the canonical order.
    pub fn make_pair(&self, a: ArcPath, b: ArcPath) -> Result<Orbit, SurfaceError> {
        for p in [&a, &b] {
            if !self.ends_at_basepoint(p) {
                return Err(SurfaceError::NotToBasepoint);
            }
        }
        if a.crossings == b.crossings && a.triangles == b.triangles {
            return Err(SurfaceError::NotAnOrbit("the two arcs coincide".into()));
        }
        if self.interior_crossings(&a, &b) > 0 {
            return Err(SurfaceError::NotAnOrbit("the two arcs cross".into()));
        }
        let (g1, g2) = self.order_pair(&a, &b)?;
        let mut g1 = g1.clone();
        let mut g2 = g2.clone();
        g1.to_basepoint = true;
        g2.to_basepoint = true;
        Ok(Orbit::Two(g1, g2))
    }

    /// Orders two arcs ending at the basepoint. Tracing both back from the
    /// basepoint to where they part, the first arc is the one that leaves on
    /// the side where the arc preceding the invariant arc sits.
    pub fn order_pair<'a>(&self, a: &'a ArcPath, b: &'a ArcPath) -> Result<(&'a ArcPath, &'a ArcPath), SurfaceError> {
        let bp = self.basepoint_data()?;
        let (ka, kb) = (a.crossings.len(), b.crossings.len());
        let mut s = 0;
        while s < ka && s < kb && a.crossings[ka - 1 - s] == b.crossings[kb - 1 - s] {
            s += 1;
        }
        // both sit in the same triangle, entered backwards through the last common crossing
        let d = a.triangles[ka - s];
        if d != b.triangles[kb - s] {
            return Err(SurfaceError::NotAnOrbit("arcs do not share their final segment".into()));
        }
        let entry = Edge::Arc(a.crossings[ka - s]);
        let r = self.rotated(d, entry);
        let side = |p: &ArcPath, k: usize| -> u8 {
            if k == s {
                1
            } else {
                let e = Edge::Arc(p.crossings[k - 1 - s]);
                if e == r[1] {
                    0
                } else {
                    2
                }
            }
        };
        let (sa, sb) = (side(a, ka), side(b, kb));
        if sa == sb {
            return Err(SurfaceError::NotAnOrbit("arcs coincide".into()));
        }
        let a_right = sa < sb;
        let a_first = if bp.sign > 0 { a_right } else { !a_right };
        Ok(if a_first { (a, b) } else { (b, a) })
    }
}

/// A corner of a triangle: the vertex between edges `p - 1` and `p`.
type Corner = (usize, usize);

impl Triangulation {
    fn opposite_corner(&self, t: usize, e: Edge) -> Corner {
        let p = self.position_in(t, e).unwrap();
        (t, (p + 2) % 3)
    }

    /// The same vertex seen from the triangle across arc `a`.
    fn corner_across(&self, c: Corner, a: usize) -> Option<Corner> {
        let [(t1, p1), (t2, p2)] = self.slots[a];
        let (t, v) = c;
        let map = |pp: usize, to: usize, po: usize| -> Option<Corner> {
            if v == pp {
                Some((to, (po + 1) % 3))
            } else if v == (pp + 1) % 3 {
                Some((to, po))
            } else {
                None
            }
        };
        if t == t1 {
            map(p1, t2, p2)
        } else if t == t2 {
            map(p2, t1, p1)
        } else {
            None
        }
    }

    /// Resolves the crossing at the basepoint of two arcs that end there:
    /// follow the first arc, turn before the basepoint and return along the
    /// second, then remove bigons. The result may have no crossings at all, in
    /// which case it is an edge of the triangulation or a boundary segment.
    pub fn smooth_at_basepoint(&self, g1: &ArcPath, g2: &ArcPath) -> Result<ArcPath, SurfaceError> {
        let bp = self.basepoint_data()?;
        for g in [g1, g2] {
            if !self.ends_at_basepoint(g) {
                return Err(SurfaceError::SmoothingUnresolved("arc does not end at the basepoint".into()));
            }
        }
        let start = self.opposite_corner(g1.triangles[0], Edge::Arc(g1.crossings[0]));
        let end = self.opposite_corner(g2.triangles[0], Edge::Arc(g2.crossings[0]));
        let mut cross: Vec<usize> = g1.crossings[..g1.len() - 1].to_vec();
        let mut tris: Vec<usize> = g1.triangles[..g1.len()].to_vec();
        if *tris.last().unwrap() != bp.delta_n || g2.triangles[g2.len() - 1] != bp.delta_n {
            return Err(SurfaceError::SmoothingUnresolved("arcs do not pass through the triangle at the invariant arc".into()));
        }
        for j in (0..g2.len() - 1).rev() {
            cross.push(g2.crossings[j]);
            tris.push(g2.triangles[j]);
        }
        let (mut start, mut end) = (start, end);
        loop {
            let mut changed = false;
            // adjacent backtracks
            let mut j = 1;
            while j < cross.len() {
                if cross[j] == cross[j - 1] {
                    cross.drain(j - 1..=j);
                    tris.drain(j - 1..=j);
                    changed = true;
                    j = j.saturating_sub(1).max(1);
                } else {
                    j += 1;
                }
            }
            // an endpoint lying on the last crossed arc can be pulled back
            if let Some(&a) = cross.last() {
                let t = *tris.last().unwrap();
                if self.opposite_corner(t, Edge::Arc(a)) != end {
                    end = self
                        .corner_across(end, a)
                        .ok_or_else(|| SurfaceError::SmoothingUnresolved("lost the end corner".into()))?;
                    cross.pop();
                    tris.pop();
                    changed = true;
                }
            }
            if let Some(&a) = cross.first() {
                let t = tris[0];
                if self.opposite_corner(t, Edge::Arc(a)) != start {
                    start = self
                        .corner_across(start, a)
                        .ok_or_else(|| SurfaceError::SmoothingUnresolved("lost the start corner".into()))?;
                    cross.remove(0);
                    tris.remove(0);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if cross.is_empty() && start == end {
            return Err(SurfaceError::SmoothingUnresolved("smoothing is contractible".into()));
        }
        Ok(ArcPath { crossings: cross, triangles: tris, to_basepoint: false })
    }
}

/// Symmetric triangulation: the surface with its order-two rotation `sigma`.
/// Arcs are ordered as the restricted arcs (with the invariant arc last) and
/// then their images.
#[derive(Clone, Debug)]
pub struct SigmaTriangulation {
    pub tri: Triangulation,
    /// Number of arcs of the restricted surface.
    pub n: usize,
    pub sigma_arc: Vec<usize>,
    pub sigma_tri: Vec<usize>,
    pub tau: usize,
}

/// Reflected double: the restricted surface without its basepoint triangle
/// glued to a mirror copy along the invariant arc, with the reflection `rho`.
#[derive(Clone, Debug)]
pub struct ReflectedTriangulation {
    pub tri: Triangulation,
    pub n: usize,
    pub rho_arc: Vec<usize>,
    pub rho_tri: Vec<usize>,
    pub tau: usize,
    /// Triangle of the restricted surface for each triangle of the left half.
    pub left_of: Vec<Option<usize>>,
    /// Triangle of the double for each triangle of the restricted surface
    /// (none for the basepoint triangle).
    pub from_collapsed: Vec<Option<usize>>,
}

fn mirror_label(l: &str, mark: &str) -> String {
    format!("{}{}", l, mark)
}

/// Shared construction for the symmetric surface (`reverse = false`) and
/// the reflected double (`reverse = true`).
fn double(
    t: &Triangulation,
    mark: &str,
    reverse: bool,
) -> Result<(Triangulation, Vec<usize>, Vec<usize>, Vec<Option<usize>>, Vec<Option<usize>>), SurfaceError> {
    let bp = t.basepoint_data()?;
    if bp.tau != t.n() - 1 {
        return Err(SurfaceError::HypothesisViolated("the invariant arc must be listed last".into()));
    }
    let n = t.n();
    let mut arcs = t.arcs.clone();
    for a in 0..n - 1 {
        arcs.push(mirror_label(&t.arcs[a], mark));
    }
    let bp_tri = t.triangles[bp.basepoint];
    let dropped: Vec<usize> = bp_tri.iter().filter_map(|e| match e {
        Edge::Boundary(b) => Some(*b),
        _ => None,
    }).collect();
    let kept_bd: Vec<usize> = (0..t.boundary.len()).filter(|b| !dropped.contains(b)).collect();
    let mut boundary: Vec<String> = kept_bd.iter().map(|&b| t.boundary[b].clone()).collect();
    for &b in &kept_bd {
        boundary.push(mirror_label(&t.boundary[b], mark));
    }
    let m = kept_bd.len();
    let bd_new = |b: usize, copy: bool| -> Edge {
        let i = kept_bd.iter().position(|&x| x == b).unwrap();
        Edge::Boundary(if copy { m + i } else { i })
    };
    let map_edge = |e: Edge, copy: bool| -> Edge {
        match e {
            Edge::Arc(a) if a == bp.tau => Edge::Arc(a),
            Edge::Arc(a) => Edge::Arc(if copy { n + a } else { a }),
            Edge::Boundary(b) => bd_new(b, copy),
        }
    };
    let mut tris = Vec::new();
    let mut left_of = Vec::new();
    let mut from_collapsed = vec![None; t.triangles.len()];
    for (i, tri) in t.triangles.iter().enumerate() {
        if i == bp.basepoint {
            continue;
        }
        from_collapsed[i] = Some(tris.len());
        tris.push(tri.map(|e| map_edge(e, false)));
        left_of.push(Some(i));
    }
    let half = tris.len();
    for k in 0..half {
        let tri = tris[k];
        let unmap = |e: Edge| -> Edge {
            match e {
                Edge::Arc(a) if a == bp.tau => Edge::Arc(a),
                Edge::Arc(a) => Edge::Arc(n + a),
                Edge::Boundary(b) => Edge::Boundary(m + b),
            }
        };
        let c = tri.map(unmap);
        tris.push(if reverse { [c[0], c[2], c[1]] } else { c });
        left_of.push(None);
    }
    let mut sigma_arc: Vec<usize> = (0..2 * n - 1).collect();
    for a in 0..n - 1 {
        sigma_arc[a] = n + a;
        sigma_arc[n + a] = a;
    }
    let sigma_tri: Vec<usize> = (0..2 * half).map(|k| if k < half { k + half } else { k - half }).collect();
    let tri = Triangulation::from_edges(arcs, boundary, tris, Some(bp.tau), None)?;
    Ok((tri, sigma_arc, sigma_tri, left_of, from_collapsed))
}

impl Triangulation {
    /// The symmetric surface obtained by gluing two copies of the restricted
    /// surface (minus its basepoint triangle) along the invariant arc.
    pub fn unfold(&self) -> Result<SigmaTriangulation, SurfaceError> {
        let (tri, sigma_arc, sigma_tri, _, _) = double(self, "'", false)?;
        let bp = self.basepoint_data()?;
        Ok(SigmaTriangulation { tri, n: self.n(), sigma_arc, sigma_tri, tau: bp.tau })
    }

    /// The reflected double used for the symmetric algebra.
    pub fn reflect(&self) -> Result<ReflectedTriangulation, SurfaceError> {
        let (tri, rho_arc, rho_tri, left_of, from_collapsed) = double(self, "''", true)?;
        let bp = self.basepoint_data()?;
        Ok(ReflectedTriangulation { tri, n: self.n(), rho_arc, rho_tri, tau: bp.tau, left_of, from_collapsed })
    }
}

impl SigmaTriangulation {
    /// Builds from a triangulation whose arcs are ordered `1..n-1, n, 1'..(n-1)'`
    /// and a triangle involution. Checks that sigma preserves the triangles.
    pub fn new(tri: Triangulation, n: usize, sigma_tri: Vec<usize>) -> Result<Self, SurfaceError> {
        if tri.n() != 2 * n - 1 {
            return Err(SurfaceError::NotAdmissible(format!("expected {} arcs", 2 * n - 1)));
        }
        let tau = n - 1;
        let mut sigma_arc: Vec<usize> = (0..2 * n - 1).collect();
        for a in 0..n - 1 {
            sigma_arc[a] = n + a;
            sigma_arc[n + a] = a;
        }
        let s = SigmaTriangulation { tri, n, sigma_arc, sigma_tri, tau };
        s.check()?;
        Ok(s)
    }

    fn is_left_arc(&self, a: usize) -> bool {
        a < self.n - 1
    }

    fn check(&self) -> Result<(), SurfaceError> {
        for (t, tri) in self.tri.triangles.iter().enumerate() {
            let img = self.sigma_tri[t];
            if self.sigma_tri[img] != t || img == t {
                return Err(SurfaceError::NotAdmissible("sigma must swap triangles in pairs".into()));
            }
            let arcs: Vec<usize> = tri.iter().filter_map(|e| e.arc()).collect();
            for (p, e) in tri.iter().enumerate() {
                if let Edge::Arc(a) = e {
                    let q = (0..3).find(|&q| self.tri.triangles[img][q] == Edge::Arc(self.sigma_arc[*a]));
                    let Some(q) = q else {
                        return Err(SurfaceError::NotAdmissible(format!("triangle {} is not mapped onto triangle {}", t, img)));
                    };
                    // orientation-preserving: cyclic order is kept
                    let next = tri[(p + 1) % 3];
                    if let Edge::Arc(b) = next {
                        if self.tri.triangles[img][(q + 1) % 3] != Edge::Arc(self.sigma_arc[b]) {
                            return Err(SurfaceError::NotAdmissible("sigma must preserve orientation".into()));
                        }
                    }
                }
            }
            let left = arcs.iter().any(|&a| self.is_left_arc(a));
            let right = arcs.iter().any(|&a| a >= self.n);
            if left && right {
                return Err(SurfaceError::NotAdmissible(format!(
                    "triangle {} contains an arc and its image side",
                    t
                )));
            }
        }
        let tau_tris = self.tri.triangles_of(self.tau);
        if self.sigma_tri[tau_tris[0]] != tau_tris[1] {
            return Err(SurfaceError::NotAdmissible("invariant arc must separate a triangle from its image".into()));
        }
        Ok(())
    }

    fn is_left_triangle(&self, t: usize) -> bool {
        let tri = self.tri.triangles[t];
        if tri.iter().any(|e| matches!(e, Edge::Arc(a) if self.is_left_arc(*a))) {
            return true;
        }
        if tri.iter().any(|e| matches!(e, Edge::Arc(a) if *a >= self.n)) {
            return false;
        }
        // only the invariant arc: use the triangle index order as a tie break
        t < self.sigma_tri[t]
    }

    /// The restricted surface: left triangles plus a basepoint triangle in
    /// place of the image of the triangle at the invariant arc.
    pub fn restrict(&self) -> Result<(Triangulation, Vec<Option<usize>>), SurfaceError> {
        let n = self.n;
        let arcs: Vec<String> = self.tri.arcs[..n].to_vec();
        let mut boundary = Vec::new();
        let mut bmap: BTreeMap<usize, usize> = BTreeMap::new();
        let mut tris = Vec::new();
        let mut map = vec![None; self.tri.triangles.len()];
        let left: Vec<usize> = (0..self.tri.triangles.len()).filter(|&t| self.is_left_triangle(t)).collect();
        for &t in &left {
            let mut out = [Edge::Arc(0); 3];
            for (p, e) in self.tri.triangles[t].iter().enumerate() {
                out[p] = match *e {
                    Edge::Arc(a) => Edge::Arc(a),
                    Edge::Boundary(b) => {
                        let next = boundary.len();
                        let i = *bmap.entry(b).or_insert(next);
                        if i == next {
                            boundary.push(self.tri.boundary[b].clone());
                        }
                        Edge::Boundary(i)
                    }
                };
            }
            map[t] = Some(tris.len());
            tris.push(out);
        }
        let [t0, t1] = self.tri.triangles_of(self.tau);
        let right = if left.contains(&t0) { t1 } else { t0 };
        let r = self.tri.rotated(right, Edge::Arc(self.tau));
        let bl = boundary.len();
        boundary.push("bL".into());
        boundary.push("bR".into());
        let _ = r;
        tris.push([Edge::Arc(self.tau), Edge::Boundary(bl), Edge::Boundary(bl + 1)]);
        let bp_index = tris.len() - 1;
        let t = Triangulation::from_edges(arcs, boundary, tris, Some(self.tau), Some(bp_index))?;
        t.basepoint_data()?;
        Ok((t, map))
    }

    /// Converts a sigma-orbit of arcs (one invariant arc, or an arc with its
    /// image) into an orbit on the restricted surface.
    pub fn restrict_orbit(&self, arcs: &[ArcPath]) -> Result<Orbit, SurfaceError> {
        let (t, map) = self.restrict()?;
        let bp = t.basepoint_data()?;
        let sig = |p: &ArcPath| ArcPath {
            crossings: p.crossings.iter().map(|&a| self.sigma_arc[a]).collect(),
            triangles: p.triangles.iter().map(|&x| self.sigma_tri[x]).collect(),
            to_basepoint: false,
        };
        let same = |a: &ArcPath, b: &ArcPath| {
            (a.crossings == b.crossings && a.triangles == b.triangles) || {
                let r = b.reversed();
                a.crossings == r.crossings && a.triangles == r.triangles
            }
        };
        let gamma = arcs.first().ok_or_else(|| SurfaceError::NotAnOrbit("no arcs".into()))?;
        match arcs.len() {
            1 => {
                if !same(gamma, &sig(gamma)) {
                    return Err(SurfaceError::NotAnOrbit("single arc is not invariant".into()));
                }
            }
            2 => {
                if !same(&arcs[1], &sig(gamma)) {
                    return Err(SurfaceError::NotAnOrbit("arcs are not images of each other".into()));
                }
                if same(gamma, &arcs[1]) {
                    return Err(SurfaceError::NotAnOrbit("pair of equal arcs".into()));
                }
            }
            _ => return Err(SurfaceError::NotAnOrbit("an orbit has one or two arcs".into())),
        }
        let taus = gamma.crossings.iter().filter(|&&a| a == self.tau).count();
        let to_restricted = |cross: &[usize], tris: &[usize]| -> Result<ArcPath, SurfaceError> {
            let mut tt = Vec::new();
            for &x in tris {
                tt.push(map[x].ok_or_else(|| SurfaceError::NotAnOrbit("segment leaves the left half".into()))?);
            }
            Ok(ArcPath { crossings: cross.to_vec(), triangles: tt, to_basepoint: false })
        };
        let left_side = |p: &ArcPath| p.crossings.iter().all(|&a| a < self.n) && p.triangles.iter().all(|&x| map[x].is_some());
        match taus {
            0 => {
                let g = if left_side(gamma) {
                    gamma.clone()
                } else {
                    let s = sig(gamma);
                    if !left_side(&s) {
                        return Err(SurfaceError::NotAnOrbit("arc does not lie in one half".into()));
                    }
                    s
                };
                Ok(Orbit::One(to_restricted(&g.crossings, &g.triangles)?))
            }
            1 => {
                let mut g = gamma.clone();
                if map[g.triangles[0]].is_none() {
                    g = g.reversed();
                }
                let k = g.crossings.iter().position(|&a| a == self.tau).unwrap();
                let mut half = to_restricted(&g.crossings[..k], &g.triangles[..=k])?;
                half.crossings.push(self.tau);
                half.triangles.push(bp.basepoint);
                half.to_basepoint = true;
                if arcs.len() == 1 {
                    return Ok(Orbit::One(half));
                }
                // the other half: image of the part after the invariant arc, reversed
                let s = sig(&g).reversed();
                let mut other = to_restricted(&s.crossings[..s.len() - 1 - k], &s.triangles[..s.len() - k])?;
                other.crossings.push(self.tau);
                other.triangles.push(bp.basepoint);
                other.to_basepoint = true;
                t.make_pair(half, other)
            }
            _ => Err(SurfaceError::MultipleTauNCrossings),
        }
    }
}

impl ReflectedTriangulation {
    /// Lifts a path of the restricted surface that avoids the basepoint
    /// triangle (except possibly as its last triangle, which is dropped).
    fn lift_prefix(&self, p: &ArcPath) -> Vec<usize> {
        p.triangles.iter().filter_map(|&t| self.from_collapsed[t]).collect()
    }

    pub fn rho_path(&self, p: &ArcPath) -> ArcPath {
        ArcPath {
            crossings: p.crossings.iter().map(|&a| self.rho_arc[a]).collect(),
            triangles: p.triangles.iter().map(|&t| self.rho_tri[t]).collect(),
            to_basepoint: false,
        }
    }

    /// Arc of the double that agrees with `g` on the left and crosses the
    /// invariant arc; `g` must end at the basepoint. The continuation on the
    /// mirror side is the mirror of `h` traversed backwards.
    pub fn join(&self, g: &ArcPath, h: &ArcPath) -> ArcPath {
        let mut cross: Vec<usize> = g.crossings.clone();
        let mut tris = self.lift_prefix(g);
        let hl = ArcPath { crossings: h.crossings[..h.len() - 1].to_vec(), triangles: self.lift_prefix(h), to_basepoint: false };
        let m = self.rho_path(&hl).reversed();
        cross.extend(m.crossings.iter());
        tris.extend(m.triangles.iter());
        ArcPath { crossings: cross, triangles: tris, to_basepoint: false }
    }

    /// Lift of a path that stays off the basepoint triangle.
    pub fn lift(&self, p: &ArcPath) -> ArcPath {
        ArcPath { crossings: p.crossings.clone(), triangles: self.lift_prefix(p), to_basepoint: false }
    }
}

/// Convex polygon triangulations, used for the finite type examples.
pub mod polygon {
    use super::*;

    #[derive(Clone, Debug)]
    pub struct Polygon {
        pub vertices: usize,
        pub tri: Triangulation,
        pub arc_ends: Vec<(usize, usize)>,
        pub tri_vertices: Vec<[usize; 3]>,
    }

    fn norm(a: usize, b: usize) -> (usize, usize) {
        if a < b {
            (a, b)
        } else {
            (b, a)
        }
    }

    /// `diagonals[i]` is the arc labelled `labels[i]`; side `v -- v+1` is
    /// labelled `side_label(v)`. Vertices are ordered counterclockwise.
    pub fn build(
        vertices: usize,
        diagonals: &[(usize, usize)],
        labels: &[String],
        side_label: impl Fn(usize) -> String,
        tau_n: Option<usize>,
    ) -> Result<Polygon, SurfaceError> {
        let mut edge: BTreeMap<(usize, usize), Edge> = BTreeMap::new();
        for (i, &(a, b)) in diagonals.iter().enumerate() {
            edge.insert(norm(a, b), Edge::Arc(i));
        }
        let mut boundary = Vec::new();
        for v in 0..vertices {
            edge.insert(norm(v, (v + 1) % vertices), Edge::Boundary(v));
            boundary.push(side_label(v));
        }
        let mut tris = Vec::new();
        let mut tv = Vec::new();
        for i in 0..vertices {
            for j in i + 1..vertices {
                for k in j + 1..vertices {
                    if let (Some(&e0), Some(&e1), Some(&e2)) =
                        (edge.get(&(i, j)), edge.get(&(j, k)), edge.get(&(i, k)))
                    {
                        tris.push([e0, e1, e2]);
                        tv.push([i, j, k]);
                    }
                }
            }
        }
        let tri = Triangulation::from_edges(labels.to_vec(), boundary, tris, tau_n, None)?;
        Ok(Polygon { vertices, tri, arc_ends: diagonals.to_vec(), tri_vertices: tv })
    }

    impl Polygon {
        fn point(&self, v: usize) -> (f64, f64) {
            let th = 2.0 * std::f64::consts::PI * v as f64 / self.vertices as f64;
            (th.cos(), th.sin())
        }

        /// Crossing sequence of the straight diagonal from `a` to `b`.
        pub fn diagonal(&self, a: usize, b: usize) -> Result<ArcPath, SurfaceError> {
            let interleave = |x: usize, y: usize| {
                let inside = |v: usize| {
                    let (lo, hi) = norm(a, b);
                    v > lo && v < hi
                };
                x != a && x != b && y != a && y != b && inside(x) != inside(y)
            };
            let (pa, pb) = (self.point(a), self.point(b));
            let mut hits = Vec::new();
            for (i, &(c, d)) in self.arc_ends.iter().enumerate() {
                if interleave(c, d) {
                    let (pc, pd) = (self.point(c), self.point(d));
                    // solve pa + t (pb - pa) = pc + s (pd - pc)
                    let (rx, ry) = (pb.0 - pa.0, pb.1 - pa.1);
                    let (sx, sy) = (pd.0 - pc.0, pd.1 - pc.1);
                    let den = rx * sy - ry * sx;
                    let t = ((pc.0 - pa.0) * sy - (pc.1 - pa.1) * sx) / den;
                    hits.push((t, i));
                }
            }
            hits.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
            let cross: Vec<usize> = hits.into_iter().map(|(_, i)| i).collect();
            if cross.is_empty() {
                return Err(SurfaceError::EmptyArc);
            }
            let first = self
                .tri
                .triangles_of(cross[0])
                .into_iter()
                .find(|&t| self.tri_vertices[t].contains(&a))
                .ok_or(SurfaceError::BadHint { pos: 0 })?;
            let mut tris = vec![first];
            for &c in &cross {
                let t = *tris.last().unwrap();
                tris.push(self.tri.across(c, t));
            }
            let to_bp = self.tri.basepoint_triangle.is_some() && self.tri.ends_at_basepoint(&ArcPath {
                crossings: cross.clone(),
                triangles: tris.clone(),
                to_basepoint: false,
            });
            self.tri.arc_from_indices(&cross, Some(&tris), to_bp)
        }

        pub fn is_side_or_arc(&self, a: usize, b: usize) -> bool {
            let (x, y) = norm(a, b);
            y - x == 1 || (x == 0 && y == self.vertices - 1) || self.arc_ends.iter().any(|&(c, d)| norm(c, d) == (x, y))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    fn t3(a: &str, b: &str, c: &str) -> [String; 3] {
        [a.into(), b.into(), c.into()]
    }

    pub(crate) fn running() -> Triangulation {
        Triangulation::new(
            s(&["1", "2", "3", "4", "5"]),
            s(&["b1", "b2", "b3", "bL", "bR"]),
            vec![
                t3("4", "2", "3"),
                t3("2", "1", "b1"),
                t3("3", "1", "b2"),
                t3("5", "4", "b3"),
                t3("5", "bL", "bR"),
            ],
            Some("5"),
            Some(4),
        )
        .unwrap()
    }

    #[test]
    fn running_surface_adjacency_and_topology() {
        let t = running();
        let b = t.signed_adjacency();
        let expect = vec![
            vec![0, 1, 1, 0, 0],
            vec![-1, 0, -1, 1, 0],
            vec![-1, 1, 0, -1, 0],
            vec![0, -1, 1, 0, 1],
            vec![0, 0, 0, -1, 0],
        ];
        assert_eq!(b, expect);
        let top = t.topology().unwrap();
        assert_eq!(top.euler_characteristic, 0);
        assert_eq!(top.boundary_components, 2);
        assert_eq!(top.genus, 0);
        assert_eq!(top.punctures, 0);
        let bp = t.basepoint_data().unwrap();
        assert_eq!((bp.tau, bp.prev, bp.delta_n, bp.sign), (4, 3, 3, 1));
    }

    #[test]
    fn flip_is_involutive_and_matches_mutation() {
        let t = running();
        for k in 0..4 {
            let f = t.flip(k).unwrap();
            let ff = f.flip(k).unwrap();
            assert_eq!(ff.signed_adjacency(), t.signed_adjacency());
            let m = crate::cluster::mutate_matrix(&t.signed_adjacency(), k);
            assert_eq!(f.signed_adjacency(), m);
        }
    }

    #[test]
    fn annulus_orientations() {
        let kron = Triangulation::new(s(&["1", "2"]), s(&["b1", "b2"]), vec![t3("1", "2", "b1"), t3("1", "2", "b2")], None, None).unwrap();
        assert_eq!(kron.signed_adjacency(), vec![vec![0, -2], vec![2, 0]]);
        let top = kron.topology().unwrap();
        assert_eq!((top.boundary_components, top.punctures, top.genus), (2, 0, 0));
        let digon = Triangulation::new(s(&["1", "2"]), s(&["b1", "b2"]), vec![t3("1", "2", "b1"), t3("2", "1", "b2")], None, None).unwrap();
        assert_eq!(digon.signed_adjacency(), vec![vec![0, 0], vec![0, 0]]);
        let top = digon.topology().unwrap();
        assert_eq!((top.boundary_components, top.punctures), (1, 1));
    }

    #[test]
    fn arc_validation() {
        let t = running();
        let spec = |c: &[&str]| ArcSpec { cross: s(c), hints: None, to_basepoint: false };
        let g = t.validate_arc(&ArcSpec { cross: s(&["1", "3", "4", "5"]), hints: None, to_basepoint: true }).unwrap();
        assert_eq!(g.triangles, vec![1, 2, 0, 3, 4]);
        assert!(matches!(t.validate_arc(&spec(&["4", "4"])), Err(SurfaceError::ImmediateBacktrack { .. })));
        assert!(matches!(t.validate_arc(&spec(&["1", "5"])), Err(SurfaceError::NoSharedTriangle { .. })));
        assert!(matches!(t.validate_arc(&spec(&["9"])), Err(SurfaceError::UnknownLabel(_))));
    }

    #[test]
    fn ordering_on_running_example() {
        let t = running();
        let a = t.validate_arc(&ArcSpec { cross: s(&["1", "3", "4", "5"]), hints: None, to_basepoint: true }).unwrap();
        let b = t.validate_arc(&ArcSpec { cross: s(&["4", "5"]), hints: None, to_basepoint: true }).unwrap();
        match t.make_pair(a.clone(), b.clone()).unwrap() {
            Orbit::Two(g1, g2) => {
                assert_eq!(g1.crossings, b.crossings);
                assert_eq!(g2.crossings, a.crossings);
            }
            _ => unreachable!(),
        }
        match t.make_pair(b.clone(), a.clone()).unwrap() {
            Orbit::Two(g1, _) => assert_eq!(g1.crossings, b.crossings),
            _ => unreachable!(),
        }
    }

    #[test]
    fn smoothing_examples() {
        let t = running();
        let a = t.validate_arc(&ArcSpec { cross: s(&["1", "3", "4", "5"]), hints: None, to_basepoint: true }).unwrap();
        let b = t.validate_arc(&ArcSpec { cross: s(&["4", "5"]), hints: None, to_basepoint: true }).unwrap();
        // both arcs leave the inner boundary point, so the smoothing is the
        // boundary loop around the hole
        let g3 = t.smooth_at_basepoint(&b, &a).unwrap();
        assert!(g3.is_empty());
        assert_eq!(g3.triangles, vec![1]);
        let only = t.validate_arc(&ArcSpec { cross: s(&["5"]), hints: None, to_basepoint: true }).unwrap();
        let g = t.smooth_at_basepoint(&b, &only).unwrap();
        assert!(g.is_empty());
    }

    #[test]
    fn unfold_and_restrict_roundtrip() {
        let t = running();
        let st = t.unfold().unwrap();
        assert_eq!(st.tri.n(), 9);
        let (r, _) = st.restrict().unwrap();
        assert_eq!(r.signed_adjacency(), t.signed_adjacency());
        let top = st.tri.topology().unwrap();
        assert_eq!(top.euler_characteristic, -1);
        assert_eq!(top.boundary_components, 3);
        let tb = t.reflect().unwrap();
        assert_eq!(tb.tri.n(), 9);
        assert_eq!(tb.tri.topology().unwrap().euler_characteristic, -1);
    }
}
