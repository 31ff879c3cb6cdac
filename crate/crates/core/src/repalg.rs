//! Gentle algebras of triangulations, their symmetric doubles, string
//! modules, twisted duals, injective presentations and the evaluation of
//! cluster variables from orthogonal indecomposable modules.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{q, Matrix, Q};
use crate::poly::{ExponentVector, LaurentPolynomial, PolyError, Var};
use crate::surface::{ArcPath, Edge, Orbit, ReflectedTriangulation, SurfaceError, Triangulation};

#[derive(Debug, Error)]
pub enum RepError {
    #[error("no arrow connects crossings {pos} and {} in their shared triangle", .pos + 1)]
    NoConnectingArrow { pos: usize },
    #[error("invalid walk: {0}")]
    InvalidWalk(String),
    #[error("relation {0} does not compose to zero")]
    RelationViolated(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("not an involution of the quiver: {0}")]
    NotAnInvolution(String),
    #[error("not admissible: {0}")]
    NotAdmissible(String),
    #[error("not an orthogonal indecomposable: {0}")]
    NotOrthogonalIndecomposable(String),
    #[error("injective envelope failed: {0}")]
    EnvelopeFailed(String),
    #[error("quiver is not of the expected kind: {0}")]
    Unsupported(String),
    #[error("paths of length above {0} do not vanish")]
    InfinitePaths(usize),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("cross-check failed for {what}: expected {expected}, found {found}")]
    CrossCheckFailed { what: String, expected: String, found: String },
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub label: String,
    pub src: usize,
    pub tgt: usize,
}

/// A bound quiver whose relations are paths of length two, written in
/// composition order `(first, second)`.
#[derive(Clone, Debug)]
pub struct Quiver {
    pub vertices: Vec<String>,
    pub arrows: Vec<Arrow>,
    pub relations: Vec<(usize, usize)>,
    /// Triangle an arrow comes from, when built from a triangulation.
    pub arrow_triangle: Vec<Option<usize>>,
}

fn letter(k: usize) -> String {
    let c = (b'a' + (k % 26) as u8) as char;
    if k < 26 {
        c.to_string()
    } else {
        format!("{}{}", c, k / 26)
    }
}

/// Serialized quiver.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct QuiverSpec {
    pub vertices: Vec<String>,
    pub arrows: Vec<ArrowSpec>,
    pub relations: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub involution: Option<InvolutionSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ArrowSpec {
    pub label: String,
    pub src: String,
    pub tgt: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct InvolutionSpec {
    pub vertices: BTreeMap<String, String>,
    pub arrows: BTreeMap<String, String>,
}

impl Quiver {
    /// `b_ij` arrows `j -> i` for `b_ij > 0`; relations are the compositions
    /// of two arrows inside one triangle.
    pub fn of_triangulation(t: &Triangulation) -> Result<Quiver, RepError> {
        let mut arrows = Vec::new();
        let mut arrow_triangle = Vec::new();
        let mut relations = Vec::new();
        for (ti, tri) in t.triangles.iter().enumerate() {
            let mut local = [None; 3];
            for p in 0..3 {
                if let (Edge::Arc(i), Edge::Arc(j)) = (tri[p], tri[(p + 1) % 3]) {
                    local[p] = Some(arrows.len());
                    arrows.push(Arrow { label: letter(arrows.len()), src: i, tgt: j });
                    arrow_triangle.push(Some(ti));
                }
            }
            for p in 0..3 {
                if let (Some(a), Some(b)) = (local[p], local[(p + 1) % 3]) {
                    relations.push((a, b));
                }
            }
        }
        let q = Quiver { vertices: t.arcs.clone(), arrows, relations, arrow_triangle };
        let b = t.signed_adjacency();
        for i in 0..q.vertices.len() {
            for j in 0..q.vertices.len() {
                let into_i = q.arrows.iter().filter(|a| a.src == j && a.tgt == i).count() as i64;
                let out_i = q.arrows.iter().filter(|a| a.src == i && a.tgt == j).count() as i64;
                if into_i > 0 && out_i > 0 {
                    return Err(RepError::Unsupported(format!("arrows in both directions between {} and {}", i, j)));
                }
                if into_i - out_i != b[i][j] {
                    return Err(RepError::Unsupported("arrows disagree with the signed adjacency".into()));
                }
            }
        }
        Ok(q)
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn arrow_index(&self, label: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.label == label)
    }

    pub fn vertex_index(&self, label: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == label)
    }

    pub fn is_relation(&self, a: usize, b: usize) -> bool {
        self.relations.contains(&(a, b))
    }

    /// The arrow of triangle `t` between arcs `i` and `j`, with `true` when it
    /// points from `i` to `j`.
    pub fn connecting_arrow(&self, t: usize, i: usize, j: usize) -> Option<(usize, bool)> {
        self.arrows.iter().enumerate().find_map(|(k, a)| {
            if self.arrow_triangle[k] != Some(t) {
                None
            } else if a.src == i && a.tgt == j {
                Some((k, true))
            } else if a.src == j && a.tgt == i {
                Some((k, false))
            } else {
                None
            }
        })
    }

    /// Full subquiver on the first `n` vertices, with the index of each kept
    /// arrow in the new quiver.
    pub fn restrict(&self, n: usize) -> (Quiver, Vec<Option<usize>>) {
        let mut map = vec![None; self.arrows.len()];
        let mut arrows = Vec::new();
        let mut tri = Vec::new();
        for (k, a) in self.arrows.iter().enumerate() {
            if a.src < n && a.tgt < n {
                map[k] = Some(arrows.len());
                arrows.push(a.clone());
                tri.push(self.arrow_triangle[k]);
            }
        }
        let relations = self
            .relations
            .iter()
            .filter_map(|&(a, b)| Some((map[a]?, map[b]?)))
            .collect();
        (Quiver { vertices: self.vertices[..n].to_vec(), arrows, relations, arrow_triangle: tri }, map)
    }

    /// Checks the gentle conditions.
    pub fn is_gentle(&self) -> bool {
        for v in 0..self.n() {
            let out: Vec<usize> = (0..self.arrows.len()).filter(|&a| self.arrows[a].src == v).collect();
            let inc: Vec<usize> = (0..self.arrows.len()).filter(|&a| self.arrows[a].tgt == v).collect();
            if out.len() > 2 || inc.len() > 2 {
                return false;
            }
            for &a in &inc {
                let zero = out.iter().filter(|&&b| self.is_relation(a, b)).count();
                let nonzero = out.len() - zero;
                if zero > 1 || nonzero > 1 {
                    return false;
                }
            }
            for &b in &out {
                let zero = inc.iter().filter(|&&a| self.is_relation(a, b)).count();
                let nonzero = inc.len() - zero;
                if zero > 1 || nonzero > 1 {
                    return false;
                }
            }
        }
        true
    }

    pub fn to_spec(&self, rho: Option<&Involution>) -> QuiverSpec {
        QuiverSpec {
            vertices: self.vertices.clone(),
            arrows: self
                .arrows
                .iter()
                .map(|a| ArrowSpec { label: a.label.clone(), src: self.vertices[a.src].clone(), tgt: self.vertices[a.tgt].clone() })
                .collect(),
            relations: self
                .relations
                .iter()
                .map(|&(a, b)| [self.arrows[a].label.clone(), self.arrows[b].label.clone()])
                .collect(),
            involution: rho.map(|r| InvolutionSpec {
                vertices: (0..self.n()).map(|v| (self.vertices[v].clone(), self.vertices[r.vertex[v]].clone())).collect(),
                arrows: (0..self.arrows.len())
                    .map(|a| (self.arrows[a].label.clone(), self.arrows[r.arrow[a]].label.clone()))
                    .collect(),
            }),
        }
    }

    pub fn from_spec(spec: &QuiverSpec) -> Result<(Quiver, Option<Involution>), RepError> {
        let vid = |l: &str| {
            spec.vertices
                .iter()
                .position(|v| v == l)
                .ok_or_else(|| RepError::ShapeMismatch(format!("unknown vertex {}", l)))
        };
        let mut arrows = Vec::new();
        for a in &spec.arrows {
            arrows.push(Arrow { label: a.label.clone(), src: vid(&a.src)?, tgt: vid(&a.tgt)? });
        }
        let aid = |l: &str| {
            arrows
                .iter()
                .position(|a: &Arrow| a.label == l)
                .ok_or_else(|| RepError::ShapeMismatch(format!("unknown arrow {}", l)))
        };
        let mut relations = Vec::new();
        for [a, b] in &spec.relations {
            let (a, b) = (aid(a)?, aid(b)?);
            if arrows[a].tgt != arrows[b].src {
                return Err(RepError::ShapeMismatch(format!("relation {}{} is not a path", arrows[a].label, arrows[b].label)));
            }
            relations.push((a, b));
        }
        let rho = match &spec.involution {
            None => None,
            Some(inv) => {
                let mut vertex = vec![usize::MAX; spec.vertices.len()];
                for (k, v) in &inv.vertices {
                    vertex[vid(k)?] = vid(v)?;
                }
                let mut arrow = vec![usize::MAX; arrows.len()];
                for (k, v) in &inv.arrows {
                    arrow[aid(k)?] = aid(v)?;
                }
                if vertex.contains(&usize::MAX) || arrow.contains(&usize::MAX) {
                    return Err(RepError::NotAnInvolution("partial involution".into()));
                }
                Some(Involution { vertex, arrow })
            }
        };
        let n_arrows = arrows.len();
        let q = Quiver { vertices: spec.vertices.clone(), arrows, relations, arrow_triangle: vec![None; n_arrows] };
        if let Some(r) = &rho {
            r.validate(&q)?;
        }
        Ok((q, rho))
    }
}

/// An involution of a quiver that reverses arrows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Involution {
    pub vertex: Vec<usize>,
    pub arrow: Vec<usize>,
}

impl Involution {
    pub fn validate(&self, q: &Quiver) -> Result<(), RepError> {
        if self.vertex.len() != q.n() || self.arrow.len() != q.arrows.len() {
            return Err(RepError::NotAnInvolution("wrong sizes".into()));
        }
        for v in 0..q.n() {
            if self.vertex[self.vertex[v]] != v {
                return Err(RepError::NotAnInvolution(format!("vertex {} is not swapped back", q.vertices[v])));
            }
        }
        for (k, a) in q.arrows.iter().enumerate() {
            let r = self.arrow[k];
            if self.arrow[r] != k {
                return Err(RepError::NotAnInvolution(format!("arrow {} is not swapped back", a.label)));
            }
            let b = &q.arrows[r];
            if b.src != self.vertex[a.tgt] || b.tgt != self.vertex[a.src] {
                return Err(RepError::NotAnInvolution(format!("arrow {} is not reversed", a.label)));
            }
        }
        for &(a, b) in &q.relations {
            if !q.is_relation(self.arrow[b], self.arrow[a]) {
                return Err(RepError::NotAnInvolution(format!(
                    "relation {}{} has no image",
                    q.arrows[a].label, q.arrows[b].label
                )));
            }
        }
        Ok(())
    }

    pub fn fixed_vertices(&self) -> Vec<usize> {
        (0..self.vertex.len()).filter(|&v| self.vertex[v] == v).collect()
    }

    pub fn fixed_arrows(&self) -> Vec<usize> {
        (0..self.arrow.len()).filter(|&a| self.arrow[a] == a).collect()
    }
}

/// Searches for an arrow-reversing involution preserving the relations.
pub fn find_involution(q: &Quiver) -> Option<Involution> {
    let n = q.n();
    let mut vertex = vec![usize::MAX; n];
    fn vertex_rec(q: &Quiver, vertex: &mut Vec<usize>, out: &mut Option<Involution>) {
        if out.is_some() {
            return;
        }
        let Some(v) = vertex.iter().position(|&x| x == usize::MAX) else {
            let mut arrow = vec![usize::MAX; q.arrows.len()];
            arrow_rec(q, vertex, &mut arrow, out);
            return;
        };
        for w in v..vertex.len() {
            if vertex[w] != usize::MAX {
                continue;
            }
            vertex[v] = w;
            vertex[w] = v;
            let ok = (0..vertex.len()).all(|i| {
                (0..vertex.len()).all(|j| {
                    if vertex[i] == usize::MAX || vertex[j] == usize::MAX {
                        return true;
                    }
                    let c = |s: usize, t: usize| q.arrows.iter().filter(|a| a.src == s && a.tgt == t).count();
                    c(i, j) == c(vertex[j], vertex[i])
                })
            });
            if ok {
                vertex_rec(q, vertex, out);
            }
            vertex[v] = usize::MAX;
            vertex[w] = usize::MAX;
        }
    }
    fn arrow_rec(q: &Quiver, vertex: &[usize], arrow: &mut Vec<usize>, out: &mut Option<Involution>) {
        if out.is_some() {
            return;
        }
        let Some(a) = arrow.iter().position(|&x| x == usize::MAX) else {
            let inv = Involution { vertex: vertex.to_vec(), arrow: arrow.clone() };
            if inv.validate(q).is_ok() {
                *out = Some(inv);
            }
            return;
        };
        let (s, t) = (vertex[q.arrows[a].tgt], vertex[q.arrows[a].src]);
        for b in a..q.arrows.len() {
            if arrow[b] != usize::MAX || q.arrows[b].src != s || q.arrows[b].tgt != t {
                continue;
            }
            if b == a && s != q.arrows[a].src {
                continue;
            }
            arrow[a] = b;
            arrow[b] = a;
            arrow_rec(q, vertex, arrow, out);
            arrow[a] = usize::MAX;
            arrow[b] = usize::MAX;
        }
    }
    let mut out = None;
    vertex_rec(q, &mut vertex, &mut out);
    out
}

/// Quiver of the reflected double with its reflection. Arrows of the first
/// half keep letters in triangle order; their mirror images get `''`.
pub fn symmetric_double(refl: &ReflectedTriangulation) -> Result<(Quiver, Involution), RepError> {
    let mut q = Quiver::of_triangulation(&refl.tri)?;
    let half = refl.tri.triangles.len() / 2;
    let mut arrow = vec![usize::MAX; q.arrows.len()];
    for k in 0..q.arrows.len() {
        let t = q.arrow_triangle[k].expect("arrow from a triangle");
        let a = &q.arrows[k];
        let (s, tg) = (refl.rho_arc[a.tgt], refl.rho_arc[a.src]);
        let (img, dir) = q
            .connecting_arrow(refl.rho_tri[t], s, tg)
            .ok_or_else(|| RepError::NotAdmissible(format!("arrow {} has no mirror", a.label)))?;
        if !dir {
            return Err(RepError::NotAdmissible("mirror arrow has the wrong orientation".into()));
        }
        arrow[k] = img;
    }
    let mut count = 0;
    for k in 0..q.arrows.len() {
        if q.arrow_triangle[k].unwrap() < half {
            let l = letter(count);
            count += 1;
            q.arrows[arrow[k]].label = format!("{}''", l);
            q.arrows[k].label = l;
        }
    }
    let rho = Involution { vertex: refl.rho_arc.clone(), arrow };
    rho.validate(&q)?;
    if rho.fixed_vertices() != vec![refl.tau] || !rho.fixed_arrows().is_empty() {
        return Err(RepError::NotAdmissible("expected one fixed vertex and no fixed arrows".into()));
    }
    Ok((q, rho))
}

/// A walk in the quiver: each step is an arrow taken forwards (`true`) or
/// backwards.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StringWalk {
    pub start: usize,
    pub steps: Vec<(usize, bool)>,
}

impl StringWalk {
    pub fn simple(v: usize) -> Self {
        StringWalk { start: v, steps: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.steps.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn vertices(&self, q: &Quiver) -> Vec<usize> {
        let mut out = vec![self.start];
        for &(a, dir) in &self.steps {
            out.push(if dir { q.arrows[a].tgt } else { q.arrows[a].src });
        }
        out
    }

    pub fn validate(&self, q: &Quiver) -> Result<(), RepError> {
        let mut v = self.start;
        for (j, &(a, dir)) in self.steps.iter().enumerate() {
            let arr = q.arrows.get(a).ok_or_else(|| RepError::InvalidWalk(format!("unknown arrow {}", a)))?;
            let from = if dir { arr.src } else { arr.tgt };
            if from != v {
                return Err(RepError::InvalidWalk(format!("step {} does not start at the current vertex", j)));
            }
            v = if dir { arr.tgt } else { arr.src };
            if j > 0 {
                let (b, bdir) = self.steps[j - 1];
                if b == a && bdir != dir {
                    return Err(RepError::InvalidWalk(format!("step {} backtracks", j)));
                }
                if bdir && dir && q.is_relation(b, a) {
                    return Err(RepError::InvalidWalk(format!("steps {} and {} form a relation", j - 1, j)));
                }
                if !bdir && !dir && q.is_relation(a, b) {
                    return Err(RepError::InvalidWalk(format!("steps {} and {} form a relation", j - 1, j)));
                }
            }
        }
        Ok(())
    }

    pub fn reversed(&self, q: &Quiver) -> Self {
        let vs = self.vertices(q);
        StringWalk {
            start: *vs.last().unwrap(),
            steps: self.steps.iter().rev().map(|&(a, d)| (a, !d)).collect(),
        }
    }

    /// The walk of the twisted dual.
    pub fn dual(&self, rho: &Involution) -> Self {
        StringWalk {
            start: rho.vertex[self.start],
            steps: self.steps.iter().map(|&(a, d)| (rho.arrow[a], !d)).collect(),
        }
    }

    /// Same string up to reading direction.
    pub fn equivalent(&self, other: &Self, q: &Quiver) -> bool {
        self == other || *self == other.reversed(q)
    }

    pub fn render(&self, q: &Quiver) -> String {
        let vs = self.vertices(q);
        let mut s = q.vertices[vs[0]].clone();
        for (j, &(a, dir)) in self.steps.iter().enumerate() {
            let l = &q.arrows[a].label;
            if dir {
                s += &format!(" -{}-> ", l);
            } else {
                s += &format!(" <-{}- ", l);
            }
            s += &q.vertices[vs[j + 1]];
        }
        s
    }

    pub fn dim_vector(&self, q: &Quiver) -> Vec<usize> {
        let mut d = vec![0; q.n()];
        for v in self.vertices(q) {
            d[v] += 1;
        }
        d
    }

    /// Maximal pieces of the walk that stay on the first `n` vertices,
    /// rewritten for the restricted quiver.
    pub fn restrict(&self, q: &Quiver, n: usize, arrow_map: &[Option<usize>]) -> Vec<StringWalk> {
        let vs = self.vertices(q);
        let mut out = Vec::new();
        let mut cur: Option<StringWalk> = None;
        for (p, &v) in vs.iter().enumerate() {
            if v < n {
                match cur.as_mut() {
                    Some(w) => {
                        let (a, d) = self.steps[p - 1];
                        w.steps.push((arrow_map[a].expect("arrow between kept vertices"), d));
                    }
                    None => cur = Some(StringWalk::simple(v)),
                }
            } else if let Some(w) = cur.take() {
                out.push(w);
            }
        }
        out.extend(cur);
        out
    }

    /// Number of submodules per dimension vector, as a polynomial in the y's:
    /// successor-closed sets of positions.
    pub fn f_polynomial(&self, q: &Quiver) -> LaurentPolynomial {
        let vs = self.vertices(q);
        let yv = |v: usize| ExponentVector::var(Var::y(v));
        let mut inside = LaurentPolynomial::monomial(yv(vs[0]), 1);
        let mut outside = LaurentPolynomial::one();
        for (j, &(_, dir)) in self.steps.iter().enumerate() {
            let m = yv(vs[j + 1]);
            let (ni, no) = if dir {
                // position j maps onto j + 1
                ((&inside + &outside).mul_monomial(&m), outside.clone())
            } else {
                (inside.mul_monomial(&m), &inside + &outside)
            };
            inside = ni;
            outside = no;
        }
        &inside + &outside
    }
}

/// The walk of an arc: one position per crossing, consecutive crossings
/// joined by the arrow of the triangle between them.
pub fn string_of_arc(q: &Quiver, crossings: &[usize], middle_triangles: &[usize]) -> Result<StringWalk, RepError> {
    if crossings.is_empty() {
        return Err(RepError::InvalidWalk("arc without crossings".into()));
    }
    if middle_triangles.len() + 1 != crossings.len() {
        return Err(RepError::ShapeMismatch("one triangle between each pair of crossings".into()));
    }
    let mut w = StringWalk::simple(crossings[0]);
    for j in 0..crossings.len() - 1 {
        let step = q
            .connecting_arrow(middle_triangles[j], crossings[j], crossings[j + 1])
            .ok_or(RepError::NoConnectingArrow { pos: j })?;
        w.steps.push(step);
    }
    w.validate(q)?;
    Ok(w)
}

/// String of an arc given as a path of the triangulation the quiver was
/// built from.
pub fn string_of_path(q: &Quiver, p: &ArcPath) -> Result<StringWalk, RepError> {
    string_of_arc(q, &p.crossings, &p.triangles[1..p.len()])
}

/// A direct sum of string modules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Module {
    pub summands: Vec<StringWalk>,
}

impl Module {
    pub fn new(summands: Vec<StringWalk>) -> Self {
        Module { summands }
    }

    pub fn zero() -> Self {
        Module { summands: Vec::new() }
    }

    pub fn representation(&self, q: &Quiver) -> Representation {
        self.summands
            .iter()
            .fold(Representation::zero(q), |acc, w| acc.direct_sum(&Representation::of_string(q, w)))
    }

    pub fn dim_vector(&self, q: &Quiver) -> Vec<usize> {
        let mut d = vec![0; q.n()];
        for w in &self.summands {
            for (i, x) in w.dim_vector(q).into_iter().enumerate() {
                d[i] += x;
            }
        }
        d
    }

    pub fn f_polynomial(&self, q: &Quiver) -> LaurentPolynomial {
        self.summands.iter().fold(LaurentPolynomial::one(), |acc, w| &acc * &w.f_polynomial(q))
    }

    pub fn restrict(&self, q: &Quiver, n: usize, arrow_map: &[Option<usize>]) -> Module {
        Module { summands: self.summands.iter().flat_map(|w| w.restrict(q, n, arrow_map)).collect() }
    }

    pub fn dual(&self, rho: &Involution) -> Module {
        Module { summands: self.summands.iter().map(|w| w.dual(rho)).collect() }
    }

    pub fn render(&self, q: &Quiver) -> String {
        if self.summands.is_empty() {
            return "0".into();
        }
        self.summands.iter().map(|w| format!("({})", w.render(q))).collect::<Vec<_>>().join(" + ")
    }
}

/// A representation: a vector space per vertex and a matrix per arrow,
/// `maps[a]` of shape `dims[tgt] x dims[src]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Representation {
    pub dims: Vec<usize>,
    pub maps: Vec<Matrix>,
}

impl Representation {
    pub fn zero(q: &Quiver) -> Self {
        Representation { dims: vec![0; q.n()], maps: q.arrows.iter().map(|_| Matrix::zeros(0, 0)).collect() }
    }

    pub fn of_string(q: &Quiver, w: &StringWalk) -> Self {
        let vs = w.vertices(q);
        let mut dims = vec![0; q.n()];
        let mut coord = Vec::new();
        for &v in &vs {
            coord.push(dims[v]);
            dims[v] += 1;
        }
        let mut maps: Vec<Matrix> = q.arrows.iter().map(|a| Matrix::zeros(dims[a.tgt], dims[a.src])).collect();
        for (j, &(a, dir)) in w.steps.iter().enumerate() {
            let (from, to) = if dir { (j, j + 1) } else { (j + 1, j) };
            maps[a].set(coord[to], coord[from], Q::one());
        }
        Representation { dims, maps }
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn check(&self, q: &Quiver) -> Result<(), RepError> {
        for (k, a) in q.arrows.iter().enumerate() {
            let m = &self.maps[k];
            if m.rows() != self.dims[a.tgt] || m.cols() != self.dims[a.src] {
                return Err(RepError::ShapeMismatch(format!("map of arrow {}", a.label)));
            }
        }
        for &(a, b) in &q.relations {
            if !(&self.maps[b] * &self.maps[a]).is_zero() {
                return Err(RepError::RelationViolated(format!("{}{}", q.arrows[a].label, q.arrows[b].label)));
            }
        }
        Ok(())
    }

    pub fn direct_sum(&self, o: &Representation) -> Representation {
        let dims: Vec<usize> = self.dims.iter().zip(&o.dims).map(|(a, b)| a + b).collect();
        let maps = self
            .maps
            .iter()
            .zip(&o.maps)
            .map(|(a, b)| {
                let mut m = Matrix::zeros(a.rows() + b.rows(), a.cols() + b.cols());
                for r in 0..a.rows() {
                    for c in 0..a.cols() {
                        m.set(r, c, a.get(r, c).clone());
                    }
                }
                for r in 0..b.rows() {
                    for c in 0..b.cols() {
                        m.set(a.rows() + r, a.cols() + c, b.get(r, c).clone());
                    }
                }
                m
            })
            .collect();
        Representation { dims, maps }
    }

    /// Restriction to the first `n` vertices.
    pub fn restrict(&self, n: usize, arrow_map: &[Option<usize>]) -> Representation {
        let kept = arrow_map.iter().filter(|m| m.is_some()).count();
        let mut maps = vec![Matrix::zeros(0, 0); kept];
        for (k, m) in arrow_map.iter().enumerate() {
            if let Some(j) = m {
                maps[*j] = self.maps[k].clone();
            }
        }
        Representation { dims: self.dims[..n].to_vec(), maps }
    }

    /// `(nabla V)_i = V_rho(i)^*`, `nabla phi_a = -phi_rho(a)^T`.
    pub fn twisted_dual(&self, rho: &Involution) -> Representation {
        Representation {
            dims: (0..self.dims.len()).map(|i| self.dims[rho.vertex[i]]).collect(),
            maps: (0..self.maps.len()).map(|a| -&self.maps[rho.arrow[a]].transpose()).collect(),
        }
    }

    /// Matrix of a path of arrows listed in composition order.
    pub fn path_map(&self, q: &Quiver, start: usize, path: &[usize]) -> Matrix {
        let mut m = Matrix::identity(self.dims[start]);
        let mut v = start;
        for &a in path {
            debug_assert_eq!(q.arrows[a].src, v);
            v = q.arrows[a].tgt;
            m = &self.maps[a] * &m;
        }
        m
    }

    /// Per vertex, a matrix whose columns span the socle.
    pub fn socle_basis(&self, q: &Quiver) -> Vec<Matrix> {
        (0..q.n())
            .map(|v| {
                let out: Vec<usize> = (0..q.arrows.len()).filter(|&a| q.arrows[a].src == v).collect();
                let mut stacked = Matrix::zeros(0, self.dims[v]);
                for a in out {
                    stacked = stacked.vstack(&self.maps[a]);
                }
                if stacked.rows() == 0 {
                    Matrix::identity(self.dims[v])
                } else {
                    stacked.kernel_matrix()
                }
            })
            .collect()
    }

    pub fn socle(&self, q: &Quiver) -> Vec<usize> {
        self.socle_basis(q).iter().map(|m| m.cols()).collect()
    }
}

/// Basis of `Hom(r, s)`, each element a matrix per vertex.
pub fn hom_space(q: &Quiver, r: &Representation, s: &Representation) -> Vec<Vec<Matrix>> {
    let mut offset = Vec::new();
    let mut total = 0;
    for v in 0..q.n() {
        offset.push(total);
        total += s.dims[v] * r.dims[v];
    }
    let var = |v: usize, row: usize, col: usize| offset[v] + row * r.dims[v] + col;
    let mut eqs: Vec<Vec<Q>> = Vec::new();
    for (k, a) in q.arrows.iter().enumerate() {
        let (i, j) = (a.src, a.tgt);
        // s_a X_i - X_j r_a = 0, a dims s_j x r_i system
        for row in 0..s.dims[j] {
            for col in 0..r.dims[i] {
                let mut e = vec![Q::zero(); total];
                for m in 0..s.dims[i] {
                    let c = s.maps[k].get(row, m);
                    if !c.is_zero() {
                        e[var(i, m, col)] += c;
                    }
                }
                for m in 0..r.dims[j] {
                    let c = r.maps[k].get(m, col);
                    if !c.is_zero() {
                        e[var(j, row, m)] -= c;
                    }
                }
                eqs.push(e);
            }
        }
    }
    let basis = if eqs.is_empty() {
        (0..total)
            .map(|t| {
                let mut v = vec![Q::zero(); total];
                v[t] = Q::one();
                v
            })
            .collect()
    } else {
        Matrix::from_rows(total, &eqs).nullspace()
    };
    basis
        .into_iter()
        .map(|v| {
            (0..q.n())
                .map(|i| {
                    let mut m = Matrix::zeros(s.dims[i], r.dims[i]);
                    for row in 0..s.dims[i] {
                        for col in 0..r.dims[i] {
                            m.set(row, col, v[var(i, row, col)].clone());
                        }
                    }
                    m
                })
                .collect()
        })
        .collect()
}

fn random_combination(basis: &[Vec<Matrix>], rng: &mut StdRng) -> Vec<Matrix> {
    let mut acc: Vec<Matrix> = basis[0].iter().map(|m| Matrix::zeros(m.rows(), m.cols())).collect();
    for b in basis {
        let c = q(rng.gen_range(-97..=97));
        for (x, m) in acc.iter_mut().zip(b) {
            *x = &*x + &m.scale(&c);
        }
    }
    acc
}

/// Isomorphism test: a random element of `Hom(r, s)` is invertible with
/// high probability when an isomorphism exists.
pub fn is_isomorphic(q: &Quiver, r: &Representation, s: &Representation) -> bool {
    if r.dims != s.dims {
        return false;
    }
    if r.total_dim() == 0 {
        return true;
    }
    let basis = hom_space(q, r, s);
    if basis.is_empty() {
        return false;
    }
    let mut rng = StdRng::seed_from_u64(0x5eed);
    (0..6).any(|_| {
        let f = random_combination(&basis, &mut rng);
        f.iter().all(|m| m.rank() == m.rows())
    })
}

/// A representation is indecomposable when a random endomorphism is a
/// scalar plus a nilpotent.
pub fn is_indecomposable(q: &Quiver, r: &Representation) -> bool {
    let n = r.total_dim();
    if n == 0 {
        return false;
    }
    let basis = hom_space(q, r, r);
    let mut rng = StdRng::seed_from_u64(0x1dec);
    (0..3).all(|_| {
        let f = random_combination(&basis, &mut rng);
        let trace = f.iter().fold(Q::zero(), |acc, m| acc + m.trace());
        let lambda = trace / crate::linalg::q(n as i64);
        f.iter().all(|m| {
            let d = m.rows();
            let shifted = m - &Matrix::identity(d).scale(&lambda);
            let mut p = Matrix::identity(d);
            for _ in 0..d {
                p = &p * &shifted;
            }
            p.is_zero()
        })
    })
}

/// Nonzero paths ending at `i`, as (start vertex, arrows in composition order).
pub fn paths_ending_at(q: &Quiver, i: usize) -> Result<Vec<(usize, Vec<usize>)>, RepError> {
    let cap = 2 * q.arrows.len() + 2;
    let mut out = vec![(i, Vec::new())];
    let mut frontier = vec![(i, Vec::<usize>::new())];
    while let Some((s, p)) = frontier.pop() {
        for (a, arr) in q.arrows.iter().enumerate() {
            if arr.tgt != s {
                continue;
            }
            if let Some(&first) = p.first() {
                if q.is_relation(a, first) {
                    continue;
                }
            }
            let mut np = vec![a];
            np.extend(p.iter().copied());
            if np.len() > cap {
                return Err(RepError::InfinitePaths(cap));
            }
            out.push((arr.src, np.clone()));
            frontier.push((arr.src, np));
        }
    }
    out.sort();
    Ok(out)
}

/// The indecomposable injective at `i`: basis the nonzero paths ending at
/// `i`; an arrow sends a path starting with it to the rest of the path.
pub fn injective(q: &Quiver, i: usize) -> Result<(Representation, Vec<Vec<Vec<usize>>>), RepError> {
    let paths = paths_ending_at(q, i)?;
    let mut at: Vec<Vec<Vec<usize>>> = vec![Vec::new(); q.n()];
    for (s, p) in paths {
        at[s].push(p);
    }
    let dims: Vec<usize> = at.iter().map(|v| v.len()).collect();
    let mut maps: Vec<Matrix> = q.arrows.iter().map(|a| Matrix::zeros(dims[a.tgt], dims[a.src])).collect();
    for (a, arr) in q.arrows.iter().enumerate() {
        for (c, p) in at[arr.src].iter().enumerate() {
            if p.first() == Some(&a) {
                let rest = &p[1..];
                let r = at[arr.tgt].iter().position(|x| x.as_slice() == rest).expect("suffix of a nonzero path");
                maps[a].set(r, c, Q::one());
            }
        }
    }
    let rep = Representation { dims, maps };
    let soc = rep.socle(q);
    let mut e = vec![0; q.n()];
    e[i] = 1;
    if soc != e {
        return Err(RepError::EnvelopeFailed(format!("socle of I({}) is {:?}", q.vertices[i], soc)));
    }
    rep.check(q)?;
    Ok((rep, at))
}

/// Minimal injective presentation `0 -> R -> I_0 -> I_1`, by multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InjectivePresentation {
    pub i0: Vec<usize>,
    pub i1: Vec<usize>,
}

impl InjectivePresentation {
    pub fn g_vector(&self) -> Vec<i64> {
        self.i1.iter().zip(&self.i0).map(|(&b, &a)| b as i64 - a as i64).collect()
    }
}

pub fn injective_presentation(q: &Quiver, r: &Representation) -> Result<InjectivePresentation, RepError> {
    r.check(q)?;
    let soc = r.socle_basis(q);
    let a: Vec<usize> = soc.iter().map(|m| m.cols()).collect();
    // the copies of injectives, with a functional on R_i for each
    let mut copies: Vec<(usize, Vec<Q>)> = Vec::new();
    for i in 0..q.n() {
        if a[i] == 0 {
            continue;
        }
        let phi = soc[i].left_inverse().ok_or_else(|| RepError::EnvelopeFailed("socle basis is degenerate".into()))?;
        for k in 0..a[i] {
            copies.push((i, phi.row(k)));
        }
    }
    let mut inj: BTreeMap<usize, (Representation, Vec<Vec<Vec<usize>>>)> = BTreeMap::new();
    for &(i, _) in &copies {
        if let std::collections::btree_map::Entry::Vacant(e) = inj.entry(i) {
            e.insert(injective(q, i)?);
        }
    }
    let i0 = copies
        .iter()
        .fold(Representation::zero(q), |acc, (i, _)| acc.direct_sum(&inj[i].0));
    // the embedding, one block of rows per copy
    let mut iota: Vec<Matrix> = Vec::new();
    for j in 0..q.n() {
        let mut m = Matrix::zeros(0, r.dims[j]);
        for (i, phi) in &copies {
            let paths = &inj[i].1[j];
            for p in paths {
                let rp = r.path_map(q, j, p);
                let row: Vec<Q> = (0..r.dims[j])
                    .map(|c| (0..phi.len()).fold(Q::zero(), |s, k| s + &phi[k] * rp.get(k, c)))
                    .collect();
                m = m.vstack(&Matrix::from_rows(r.dims[j], &[row]));
            }
        }
        iota.push(m);
    }
    for j in 0..q.n() {
        if iota[j].rank() != r.dims[j] {
            return Err(RepError::EnvelopeFailed(format!("embedding is not injective at {}", q.vertices[j])));
        }
    }
    for (k, arr) in q.arrows.iter().enumerate() {
        if &i0.maps[k] * &iota[arr.src] != &iota[arr.tgt] * &r.maps[k] {
            return Err(RepError::EnvelopeFailed(format!("embedding does not commute with {}", arr.label)));
        }
    }
    let proj: Vec<Matrix> = iota.iter().map(|m| m.cokernel_projection()).collect();
    let mut cmaps = Vec::new();
    for (k, arr) in q.arrows.iter().enumerate() {
        let ps = &proj[arr.src];
        let pt = &proj[arr.tgt];
        let m = if ps.rows() == 0 {
            Matrix::zeros(pt.rows(), 0)
        } else {
            let ri = ps.right_inverse().ok_or_else(|| RepError::EnvelopeFailed("projection rank".into()))?;
            &(pt * &i0.maps[k]) * &ri
        };
        cmaps.push(m);
    }
    let coker = Representation { dims: proj.iter().map(|m| m.rows()).collect(), maps: cmaps };
    coker.check(q)?;
    Ok(InjectivePresentation { i0: a, i1: coker.socle(q) })
}

pub fn g_vector_module(q: &Quiver, r: &Representation) -> Result<Vec<i64>, RepError> {
    Ok(injective_presentation(q, r)?.g_vector())
}

/// Submodule counts of a string module by testing every set of basis
/// vectors against the matrices.
pub fn submodule_counts_brute_force(q: &Quiver, w: &StringWalk) -> LaurentPolynomial {
    let r = Representation::of_string(q, w);
    let vs = w.vertices(q);
    let mut coord = Vec::new();
    let mut seen = vec![0; q.n()];
    for &v in &vs {
        coord.push(seen[v]);
        seen[v] += 1;
    }
    let pos_of = |v: usize, c: usize| (0..vs.len()).find(|&p| vs[p] == v && coord[p] == c).unwrap();
    let mut out = LaurentPolynomial::zero();
    for mask in 0u64..(1u64 << vs.len()) {
        let inside = |p: usize| mask >> p & 1 == 1;
        let closed = q.arrows.iter().enumerate().all(|(k, a)| {
            (0..vs.len()).filter(|&p| inside(p) && vs[p] == a.src).all(|p| {
                let col = r.maps[k].column(coord[p]);
                col.iter().enumerate().all(|(row, x)| x.is_zero() || inside(pos_of(a.tgt, row)))
            })
        });
        if closed {
            let e = ExponentVector::from_pairs((0..vs.len()).filter(|&p| inside(p)).map(|p| (Var::y(vs[p]), 1)));
            out = &out + &LaurentPolynomial::monomial(e, 1);
        }
    }
    out
}

/// `CC(L) = sum_e chi(Gr_e L) x^(B e + g_L) y^e`.
pub fn cc_map(q: &Quiver, m: &Module, b: &[Vec<i64>]) -> Result<LaurentPolynomial, RepError> {
    let f = m.f_polynomial(q);
    let g = g_vector_module(q, &m.representation(q))?;
    let n = q.n();
    let mut out = LaurentPolynomial::zero();
    for (e, c) in f.terms() {
        let ev = e.y_exponents(n);
        let xs: Vec<i64> = (0..n).map(|i| g[i] + (0..n).map(|j| b[i][j] * ev[j]).sum::<i64>()).collect();
        let mono = ExponentVector::x_dense(&xs).mul(e);
        out = &out + &LaurentPolynomial::monomial(mono, c.clone());
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymmetricType {
    /// An indecomposable isomorphic to its twisted dual.
    TypeI(StringWalk),
    /// `L + nabla L` with `L` not self-dual.
    TypeS(StringWalk, StringWalk),
}

pub fn classify_symmetric_type(q: &Quiver, rho: &Involution, m: &Module) -> Result<SymmetricType, RepError> {
    let rep = |w: &StringWalk| Representation::of_string(q, w);
    for w in &m.summands {
        w.validate(q)?;
    }
    match m.summands.as_slice() {
        [l] => {
            let r = rep(l);
            if !is_indecomposable(q, &r) {
                return Err(RepError::NotOrthogonalIndecomposable("summand is decomposable".into()));
            }
            if is_isomorphic(q, &r, &r.twisted_dual(rho)) {
                Ok(SymmetricType::TypeI(l.clone()))
            } else {
                Err(RepError::NotOrthogonalIndecomposable("indecomposable but not self-dual".into()))
            }
        }
        [l, k] => {
            let (rl, rk) = (rep(l), rep(k));
            if !is_indecomposable(q, &rl) || !is_indecomposable(q, &rk) {
                return Err(RepError::NotOrthogonalIndecomposable("summand is decomposable".into()));
            }
            if is_isomorphic(q, &rl, &rl.twisted_dual(rho)) {
                return Err(RepError::NotOrthogonalIndecomposable("summand is self-dual".into()));
            }
            if !is_isomorphic(q, &rk, &rl.twisted_dual(rho)) {
                return Err(RepError::NotOrthogonalIndecomposable("second summand is not the dual of the first".into()));
            }
            Ok(SymmetricType::TypeS(l.clone(), k.clone()))
        }
        _ => Err(RepError::NotOrthogonalIndecomposable("expected one or two summands".into())),
    }
}

/// Everything needed to pass between the collapsed surface, its reflected
/// double and their algebras.
#[derive(Clone, Debug)]
pub struct SymmetricContext {
    pub collapsed: Triangulation,
    pub refl: ReflectedTriangulation,
    pub qbar: Quiver,
    pub rho: Involution,
    /// Quiver of the collapsed surface, as the full subquiver on `0..n`.
    pub q: Quiver,
    pub arrow_map: Vec<Option<usize>>,
    pub n: usize,
    pub tau: usize,
}

impl SymmetricContext {
    pub fn new(t: &Triangulation) -> Result<Self, RepError> {
        let refl = t.reflect()?;
        let (qbar, rho) = symmetric_double(&refl)?;
        let n = t.n();
        let (q, arrow_map) = qbar.restrict(n);
        // the restriction must be the quiver of the collapsed surface
        let direct = Quiver::of_triangulation(t)?;
        let ends = |q: &Quiver| {
            let mut v: Vec<(usize, usize)> = q.arrows.iter().map(|a| (a.src, a.tgt)).collect();
            v.sort();
            v
        };
        if ends(&direct) != ends(&q) || direct.relations.len() != q.relations.len() {
            return Err(RepError::NotAdmissible("restricted double differs from the collapsed quiver".into()));
        }
        Ok(SymmetricContext { collapsed: t.clone(), refl, qbar, rho, q, arrow_map, n, tau: t.n() - 1 })
    }

    /// String over the restricted quiver of an arc of the collapsed surface.
    pub fn collapsed_string(&self, p: &ArcPath) -> Result<StringWalk, RepError> {
        let mut mids = Vec::new();
        for j in 1..p.len() {
            let t = self.refl.from_collapsed[p.triangles[j]]
                .ok_or_else(|| RepError::HypothesisViolated("arc passes through the basepoint triangle".into()))?;
            mids.push(t);
        }
        let w = string_of_arc(&self.qbar, &p.crossings, &mids)?;
        let pieces = w.restrict(&self.qbar, self.n, &self.arrow_map);
        match pieces.as_slice() {
            [one] => Ok(one.clone()),
            _ => Err(RepError::HypothesisViolated("arc leaves the collapsed surface".into())),
        }
    }

    pub fn double_string(&self, p: &ArcPath) -> Result<StringWalk, RepError> {
        string_of_path(&self.qbar, p)
    }

    /// The module of the reflection orbit matching an orbit of the collapsed
    /// surface.
    pub fn module_of_orbit(&self, orbit: &Orbit) -> Result<Module, RepError> {
        match orbit {
            Orbit::One(g) if g.to_basepoint => Ok(Module::new(vec![self.double_string(&self.refl.join(g, g))?])),
            Orbit::One(g) => {
                let l = self.double_string(&self.refl.lift(g))?;
                let d = l.dual(&self.rho);
                Ok(Module::new(vec![l, d]))
            }
            Orbit::Two(g1, g2) => {
                let l = self.double_string(&self.refl.join(g1, g2))?;
                let d = l.dual(&self.rho);
                Ok(Module::new(vec![l, d]))
            }
        }
    }

    /// The half of a walk through the invariant vertex that ends there,
    /// as an arc of the collapsed surface ending at the basepoint.
    fn half_to_basepoint(&self, w: &StringWalk) -> Result<ArcPath, RepError> {
        let vs = w.vertices(&self.qbar);
        let k = vs.iter().position(|&v| v == self.tau).expect("walk crosses the invariant arc");
        let mut cross = Vec::new();
        let mut mids = Vec::new();
        for j in 0..=k {
            cross.push(vs[j]);
        }
        for j in 0..k {
            let t = self.qbar.arrow_triangle[w.steps[j].0].expect("arrow from a triangle");
            mids.push(self.refl.left_of[t].ok_or_else(|| RepError::HypothesisViolated("half leaves the left side".into()))?);
        }
        let bp = self.collapsed.basepoint_data()?;
        let first = if k == 0 { bp.delta_n } else { self.collapsed.across(cross[0], mids[0]) };
        let mut tris = vec![first];
        tris.extend(mids);
        tris.push(bp.basepoint);
        Ok(self.collapsed.arc_from_indices(&cross, Some(&tris), true)?)
    }

    /// Mirror-symmetric walk made of the part of `w` before the invariant
    /// vertex followed by its mirror image.
    fn symmetric_closure(&self, w: &StringWalk) -> StringWalk {
        let vs = w.vertices(&self.qbar);
        let k = vs.iter().position(|&v| v == self.tau).expect("walk crosses the invariant arc");
        let mut steps: Vec<(usize, bool)> = w.steps[..k].to_vec();
        for j in (0..k).rev() {
            let (a, d) = w.steps[j];
            steps.push((self.rho.arrow[a], d));
        }
        StringWalk { start: w.start, steps }
    }
}

/// Output of the module-theoretic evaluation of an orbit.
#[derive(Clone, Debug)]
pub struct ModuleExpansion {
    pub f: LaurentPolynomial,
    pub g: Vec<i64>,
    pub kind: SymmetricType,
    pub restricted: Module,
    pub f_restricted: LaurentPolynomial,
    pub g_restricted: Vec<i64>,
    /// Case of a decomposable restriction: the monomial and `F` of the
    /// restricted extension module.
    pub correction: Option<(ExponentVector, LaurentPolynomial)>,
    /// Whether the correction was compared with the smoothed arc.
    pub smoothing_checked: bool,
}

fn double_last(mut g: Vec<i64>) -> Vec<i64> {
    if let Some(x) = g.last_mut() {
        *x *= 2;
    }
    g
}

fn y_only_below(p: &LaurentPolynomial, n: usize) -> LaurentPolynomial {
    LaurentPolynomial::from_terms(
        p.terms()
            .filter(|(e, _)| e.entries().iter().all(|(v, _)| v.index() < n))
            .map(|(e, c)| (e.clone(), c.clone())),
    )
}

/// `F` and `g` of the cluster variable of an orthogonal indecomposable
/// module over the reflected double.
pub fn orbit_module_expansion(ctx: &SymmetricContext, m: &Module) -> Result<ModuleExpansion, RepError> {
    let kind = classify_symmetric_type(&ctx.qbar, &ctx.rho, m)?;
    let restricted = m.restrict(&ctx.qbar, ctx.n, &ctx.arrow_map);
    let f_res = restricted.f_polynomial(&ctx.q);
    let g_res = g_vector_module(&ctx.q, &restricted.representation(&ctx.q))?;
    let tau = ctx.tau;
    let dim_tau = m.dim_vector(&ctx.qbar)[tau];
    if restricted.summands.len() == 1 {
        let mut g = double_last(g_res.clone());
        if dim_tau != 0 {
            g[tau] += 1;
        }
        return Ok(ModuleExpansion { f: f_res.clone(), g, kind, restricted, f_restricted: f_res, g_restricted: g_res, correction: None, smoothing_checked: false });
    }
    let SymmetricType::TypeS(l, dl) = &kind else {
        return Err(RepError::HypothesisViolated("self-dual module with decomposable restriction".into()));
    };
    let crossings = l.vertices(&ctx.qbar).iter().filter(|&&v| v == tau).count();
    if crossings != 1 {
        return Err(RepError::HypothesisViolated(format!("summand meets the invariant vertex {} times", crossings)));
    }
    // the two invariant walks resolving the crossing of L and its dual
    let g1 = ctx.symmetric_closure(l);
    let g2 = ctx.symmetric_closure(&l.reversed(&ctx.qbar));
    g1.validate(&ctx.qbar)?;
    g2.validate(&ctx.qbar)?;
    let fl = &l.f_polynomial(&ctx.qbar) * &dl.f_polynomial(&ctx.qbar);
    let fg = &g1.f_polynomial(&ctx.qbar) * &g2.f_polynomial(&ctx.qbar);
    let diff = &fl - &fg;
    if diff.is_zero() {
        return Err(RepError::CrossCheckFailed {
            what: "extension term".into(),
            expected: "nonzero".into(),
            found: "0".into(),
        });
    }
    let (h, fm) = diff.monomial_content()?;
    if fm.constant_term() != BigInt::one() || !fm.all_coefficients_positive() {
        return Err(RepError::CrossCheckFailed {
            what: "extension F-polynomial".into(),
            expected: "constant term 1 and positive coefficients".into(),
            found: fm.to_string(),
        });
    }
    // F of the extension splits into a left and a mirrored right factor
    let f_res_m = y_only_below(&fm, ctx.n);
    // the right summand is the dual of the left one: its submodules are the
    // mirrored quotients of the left summand
    let top = f_res_m.terms().map(|(e, _)| e.clone()).max_by_key(|e| e.total_degree()).unwrap_or_else(ExponentVector::one);
    let mirrored = LaurentPolynomial::from_terms(f_res_m.terms().map(|(e, c)| (top.div(e), c.clone())))
        .rename(|v| if v.is_y() { Var::y(ctx.rho.vertex[v.index()]) } else { v });
    if &f_res_m * &mirrored != fm {
        return Err(RepError::CrossCheckFailed {
            what: "extension module splitting".into(),
            expected: (&f_res_m * &mirrored).to_string(),
            found: fm.to_string(),
        });
    }
    let res_h = ExponentVector::from_pairs(h.entries().iter().filter(|(v, _)| v.index() < ctx.n).copied());
    // compare with the string of the smoothing on the collapsed surface
    let a1 = ctx.half_to_basepoint(l)?;
    let a2 = ctx.half_to_basepoint(&l.reversed(&ctx.qbar).dual(&ctx.rho).reversed(&ctx.qbar))
        .or_else(|_| ctx.half_to_basepoint(&dl.reversed(&ctx.qbar)))
        .or_else(|_| ctx.half_to_basepoint(dl))?;
    let mut smoothing_checked = false;
    if let Ok(Orbit::Two(o1, o2)) = ctx.collapsed.make_pair(a1, a2) {
        if let Ok(g3) = ctx.collapsed.smooth_at_basepoint(&o1, &o2) {
            smoothing_checked = true;
            let f3 = if g3.is_empty() { LaurentPolynomial::one() } else { ctx.collapsed_string(&g3)?.f_polynomial(&ctx.q) };
            if f3 != f_res_m {
                return Err(RepError::CrossCheckFailed {
                    what: "restricted extension against the smoothing".into(),
                    expected: f3.to_string(),
                    found: f_res_m.to_string(),
                });
            }
        }
    }
    let f = &f_res - &f_res_m.mul_monomial(&res_h);
    let mut g = g_res.clone();
    g[tau] += 1;
    let g = double_last(g);
    Ok(ModuleExpansion {
        f,
        g,
        kind: kind.clone(),
        restricted,
        f_restricted: f_res,
        g_restricted: g_res,
        correction: Some((res_h, f_res_m)),
        smoothing_checked,
    })
}

impl fmt::Display for SymmetricType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymmetricType::TypeI(_) => write!(f, "I"),
            SymmetricType::TypeS(_, _) => write!(f, "S"),
        }
    }
}

/// Turns a y-exponent vector of a product into a set of vertices, for reports.
pub fn support(e: &ExponentVector) -> BTreeSet<usize> {
    e.entries().iter().map(|(v, _)| v.index()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::running;

    fn ends(q: &Quiver) -> Vec<(String, String)> {
        let mut v: Vec<(String, String)> =
            q.arrows.iter().map(|a| (q.vertices[a.src].clone(), q.vertices[a.tgt].clone())).collect();
        v.sort();
        v
    }

    fn rel_ends(q: &Quiver) -> BTreeSet<(String, String, String)> {
        q.relations
            .iter()
            .map(|&(a, b)| {
                (
                    q.vertices[q.arrows[a].src].clone(),
                    q.vertices[q.arrows[a].tgt].clone(),
                    q.vertices[q.arrows[b].tgt].clone(),
                )
            })
            .collect()
    }

    fn arc(t: &Triangulation, c: &[&str], bp: bool) -> ArcPath {
        t.validate_arc(&crate::surface::ArcSpec { cross: c.iter().map(|x| x.to_string()).collect(), hints: None, to_basepoint: bp })
            .unwrap()
    }

    #[test]
    fn quiver_of_running_example() {
        let q = Quiver::of_triangulation(&running()).unwrap();
        let s = |a: &str, b: &str| (a.to_string(), b.to_string());
        let mut want = vec![s("2", "1"), s("4", "2"), s("2", "3"), s("3", "1"), s("3", "4"), s("5", "4")];
        want.sort();
        assert_eq!(ends(&q), want);
        let r = |a: &str, b: &str, c: &str| (a.to_string(), b.to_string(), c.to_string());
        let want: BTreeSet<_> = [r("4", "2", "3"), r("2", "3", "4"), r("3", "4", "2")].into_iter().collect();
        assert_eq!(rel_ends(&q), want);
        assert!(q.is_gentle());
    }

    #[test]
    fn double_of_running_example() {
        let ctx = SymmetricContext::new(&running()).unwrap();
        let q = &ctx.qbar;
        assert_eq!(q.vertices, vec!["1", "2", "3", "4", "5", "1''", "2''", "3''", "4''"]);
        assert_eq!(q.relations.len(), 6);
        assert!(q.is_gentle());
        // the mirror of 5 -> 4 is 4'' -> 5
        let f = q.arrows.iter().position(|a| q.vertices[a.src] == "5" && q.vertices[a.tgt] == "4").unwrap();
        let fr = &q.arrows[ctx.rho.arrow[f]];
        assert_eq!((q.vertices[fr.src].as_str(), q.vertices[fr.tgt].as_str()), ("4''", "5"));
        assert_eq!(fr.label, format!("{}''", q.arrows[f].label));
        assert_eq!(ctx.rho.fixed_vertices(), vec![4]);
    }

    #[test]
    fn unfolded_quiver_has_no_reflection() {
        let s = running().unfold().unwrap();
        let q = Quiver::of_triangulation(&s.tri).unwrap();
        assert!(find_involution(&q).is_none());
        let ctx = SymmetricContext::new(&running()).unwrap();
        assert!(find_involution(&ctx.qbar).is_some());
    }

    #[test]
    fn string_of_second_arc() {
        let t = running();
        let ctx = SymmetricContext::new(&t).unwrap();
        let w = ctx.collapsed_string(&arc(&t, &["1", "3", "4", "5"], true)).unwrap();
        assert_eq!(w.vertices(&ctx.q), vec![0, 2, 3, 4]);
        let dirs: Vec<bool> = w.steps.iter().map(|s| s.1).collect();
        assert_eq!(dirs, vec![false, true, false]);
        let f = w.f_polynomial(&ctx.q);
        let want: LaurentPolynomial = "y1*y3*y4*y5 + y1*y3*y4 + y1*y4*y5 + y1*y4 + y4*y5 + y1 + y4 + 1".parse().unwrap();
        assert_eq!(f, want);
        assert_eq!(submodule_counts_brute_force(&ctx.q, &w), want);
        let g = g_vector_module(&ctx.q, &Representation::of_string(&ctx.q, &w)).unwrap();
        assert_eq!(g, vec![-1, 1, 1, -1, 0]);
        let g5 = g_vector_module(&ctx.q, &Representation::of_string(&ctx.q, &StringWalk::simple(4))).unwrap();
        assert_eq!(g5, vec![0, 0, 0, 0, -1]);
    }

    #[test]
    fn injectives_have_g_minus_e() {
        let ctx = SymmetricContext::new(&running()).unwrap();
        for i in 0..ctx.qbar.n() {
            let (r, _) = injective(&ctx.qbar, i).unwrap();
            let g = g_vector_module(&ctx.qbar, &r).unwrap();
            let mut e = vec![0; ctx.qbar.n()];
            e[i] = -1;
            assert_eq!(g, e);
        }
    }

    #[test]
    fn dual_twice_is_isomorphic() {
        let ctx = SymmetricContext::new(&running()).unwrap();
        let t = running();
        let w = ctx.double_string(&ctx.refl.join(&arc(&t, &["1", "3", "4", "5"], true), &arc(&t, &["5"], true))).unwrap();
        let r = Representation::of_string(&ctx.qbar, &w);
        r.check(&ctx.qbar).unwrap();
        let dd = r.twisted_dual(&ctx.rho).twisted_dual(&ctx.rho);
        assert!(is_isomorphic(&ctx.qbar, &r, &dd));
        assert!(!is_isomorphic(&ctx.qbar, &r, &r.twisted_dual(&ctx.rho)));
        let walk_dual = Representation::of_string(&ctx.qbar, &w.dual(&ctx.rho));
        assert!(is_isomorphic(&ctx.qbar, &walk_dual, &r.twisted_dual(&ctx.rho)));
        assert!(is_indecomposable(&ctx.qbar, &r));
        assert!(!is_indecomposable(&ctx.qbar, &r.direct_sum(&walk_dual)));
    }

    #[test]
    fn final_example() {
        let t = running();
        let ctx = SymmetricContext::new(&t).unwrap();
        let orbit = t.make_pair(arc(&t, &["1", "3", "4", "5"], true), arc(&t, &["5"], true)).unwrap();
        let m = ctx.module_of_orbit(&orbit).unwrap();
        assert_eq!(m.dim_vector(&ctx.qbar), vec![1, 0, 1, 1, 2, 1, 0, 1, 1]);
        let e = orbit_module_expansion(&ctx, &m).unwrap();
        assert!(matches!(e.kind, SymmetricType::TypeS(_, _)));
        let want: LaurentPolynomial = "y1*y3*y4*y5^2 + 2*y1*y3*y4*y5 + y1*y4*y5^2 + y1*y3*y4 + 2*y1*y4*y5 + y4*y5^2 + y1*y4 + 2*y4*y5 + y1 + y4 + 1"
            .parse()
            .unwrap();
        assert_eq!(e.f, want);
        assert_eq!(e.g, vec![-1, 1, 1, -1, 0]);
        assert!(e.smoothing_checked);
        let (h, fm) = e.correction.unwrap();
        assert_eq!(h.to_string(), "y5");
        assert_eq!(fm.to_string(), "y1 + 1");
    }
}
