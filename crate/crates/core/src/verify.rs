//! Independent oracles and the sweeps that compare the three pipelines.

use std::collections::BTreeSet;

use rand::rngs::StdRng;
use rand::SeedableRng;
use thiserror::Error;

use crate::cluster::{enumerate, scale_row, ClusterError, ExchangeMatrix, Seed};
use crate::fixtures::TypeB;
use crate::poly::LaurentPolynomial;
use crate::repalg::{self, Quiver, RepError, Representation, SymmetricContext};
use crate::snake::{self, SnakeError};
use crate::surface::{ArcPath, Edge, Orbit, SurfaceError, Triangulation};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Snake(#[from] SnakeError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
    #[error("{0}")]
    Mismatch(String),
}

impl VerifyError {
    /// Mismatches between pipelines, as opposed to invalid input.
    pub fn is_cross_check(&self) -> bool {
        matches!(
            self,
            VerifyError::Mismatch(_)
                | VerifyError::Snake(SnakeError::CrossCheckFailed(_))
                | VerifyError::Rep(RepError::CrossCheckFailed { .. })
        )
    }
}

fn mismatch(what: &str, a: impl std::fmt::Display, b: impl std::fmt::Display) -> VerifyError {
    VerifyError::Mismatch(format!("{}: {} vs {}", what, a, b))
}

/// Expansion of an arc computed by mutation in the polygon cut out by the
/// triangles it passes through. The polygon's diagonals are the crossed
/// arcs in order; flipping them one after the other produces the arc. Sides
/// carry the surface variables they come from.
pub fn lift_expansion(t: &Triangulation, arc: &ArcPath) -> Result<(LaurentPolynomial, Vec<i64>), VerifyError> {
    let d = arc.len();
    if d == 0 {
        return Ok((LaurentPolynomial::one(), vec![0; t.n()]));
    }
    // polygon edges as (surface edge, is diagonal); triangles as edge ids
    let mut edges: Vec<Edge> = Vec::new();
    let mut polygon_tris: Vec<[usize; 3]> = Vec::new();
    let place = |tri: usize, e: Edge| -> Result<[Edge; 3], VerifyError> {
        let count = t.triangles[tri].iter().filter(|&&f| f == e).count();
        if count != 1 {
            return Err(VerifyError::Mismatch("arc repeats an edge of a triangle it crosses".into()));
        }
        Ok(t.rotated(tri, e))
    };
    // diagonal ids are 0..d
    for &c in &arc.crossings {
        edges.push(Edge::Arc(c));
    }
    let r0 = place(arc.triangles[0], Edge::Arc(arc.crossings[0]))?;
    edges.push(r0[1]);
    edges.push(r0[2]);
    polygon_tris.push([0, edges.len() - 2, edges.len() - 1]);
    for j in 1..=d {
        let entry = arc.crossings[j - 1];
        let r = place(arc.triangles[j], Edge::Arc(entry))?;
        let mut ids = [j - 1, 0, 0];
        for p in 1..3 {
            if j < d && r[p] == Edge::Arc(arc.crossings[j]) {
                ids[p] = j;
            } else {
                edges.push(r[p]);
                ids[p] = edges.len() - 1;
            }
        }
        if j < d && ids[1] != j && ids[2] != j {
            return Err(VerifyError::Mismatch(format!("crossing {} is not in the next triangle", j)));
        }
        polygon_tris.push(ids);
    }
    let sides = edges.len() - d;
    let mut ext = vec![vec![0i64; d]; d + sides + d];
    for tri in &polygon_tris {
        for p in 0..3 {
            let (i, j) = (tri[p], tri[(p + 1) % 3]);
            if i < d {
                ext[j][i] += 1;
            }
            if j < d {
                ext[i][j] -= 1;
            }
        }
    }
    for k in 0..d {
        ext[d + sides + k][k] = 1;
    }
    let frozen: Vec<LaurentPolynomial> = edges[d..]
        .iter()
        .map(|e| match e {
            Edge::Arc(a) => LaurentPolynomial::x(*a),
            Edge::Boundary(_) => LaurentPolynomial::one(),
        })
        .chain(arc.crossings.iter().map(|&c| LaurentPolynomial::y(c)))
        .collect();
    let cluster = arc.crossings.iter().map(|&c| LaurentPolynomial::x(c)).collect();
    let seed = Seed::with_values(ext, cluster, frozen, t.signed_adjacency());
    let order: Vec<usize> = (0..d).collect();
    let out = seed.mutate_sequence(&order)?;
    Ok((out.f_polynomial(d - 1), out.g_vector(d - 1)?))
}

/// F and g of the string module of an arc.
pub fn string_expansion(t: &Triangulation, q: &Quiver, arc: &ArcPath) -> Result<(LaurentPolynomial, Vec<i64>), VerifyError> {
    if arc.is_empty() {
        return Ok((LaurentPolynomial::one(), vec![0; t.n()]));
    }
    let w = repalg::string_of_path(q, arc)?;
    let g = repalg::g_vector_module(q, &Representation::of_string(q, &w))?;
    Ok((w.f_polynomial(q), g))
}

/// Snake graph, polygon lift and string module agree on one arc.
pub fn check_arc(t: &Triangulation, q: &Quiver, arc: &ArcPath) -> Result<(LaurentPolynomial, Vec<i64>), VerifyError> {
    let (f, g) = snake::arc_expansion(t, arc)?;
    let (fl, gl) = lift_expansion(t, arc)?;
    if f != fl {
        return Err(mismatch("F against the polygon lift", &f, &fl));
    }
    if g != gl {
        return Err(mismatch("g against the polygon lift", format!("{:?}", g), format!("{:?}", gl)));
    }
    let (fs, gs) = string_expansion(t, q, arc)?;
    if f != fs {
        return Err(mismatch("F against the string module", &f, &fs));
    }
    if g != gs {
        return Err(mismatch("g against the string module", format!("{:?}", g), format!("{:?}", gs)));
    }
    Ok((f, g))
}

#[derive(Clone, Debug, Default)]
pub struct ArcSweep {
    pub arcs: usize,
    pub distinct: usize,
    pub longest: usize,
}

/// Random arcs on `t`, each checked with [`check_arc`].
pub fn arc_sweep(t: &Triangulation, seed: u64, count: usize, max_len: usize) -> Result<ArcSweep, VerifyError> {
    let q = Quiver::of_triangulation(t)?;
    let mut rng = StdRng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    let mut longest = 0;
    for _ in 0..count {
        let arc = t.random_arc(&mut rng, max_len, 0.25);
        check_arc(t, &q, &arc)?;
        longest = longest.max(arc.len());
        let r = arc.reversed();
        seen.insert(if r.crossings < arc.crossings { r.crossings } else { arc.crossings.clone() });
    }
    Ok(ArcSweep { arcs: count, distinct: seen.len(), longest })
}

/// One orbit through all pipelines that apply to it. Returns the snake
/// result.
pub fn check_orbit(t: &Triangulation, ctx: &SymmetricContext, orbit: &Orbit) -> Result<snake::OrbitExpansion, VerifyError> {
    let e = snake::orbit_expansion(t, orbit)?;
    let m = ctx.module_of_orbit(orbit)?;
    let r = repalg::orbit_module_expansion(ctx, &m)?;
    if r.f != e.f {
        return Err(mismatch("orbit F against the module", &e.f, &r.f));
    }
    if r.g != e.g {
        return Err(mismatch("orbit g against the module", format!("{:?}", e.g), format!("{:?}", r.g)));
    }
    Ok(e)
}

#[derive(Clone, Debug, Default)]
pub struct OrbitSweep {
    pub orbits: usize,
    pub smoothed: usize,
    pub module_smoothed: usize,
}

/// Random pairs of arcs to the basepoint. For each pair the product of the
/// arc polynomials exceeds the orbit polynomial by a monomial times an
/// F-polynomial, equal to the one of the smoothed arc when it exists.
pub fn orbit_sweep(t: &Triangulation, seed: u64, count: usize, max_len: usize) -> Result<OrbitSweep, VerifyError> {
    let ctx = SymmetricContext::new(t)?;
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = OrbitSweep::default();
    while out.orbits < count {
        let a = t.random_basepoint_arc(&mut rng, max_len, 0.3)?;
        let b = t.random_basepoint_arc(&mut rng, max_len, 0.3)?;
        if a.crossings == b.crossings && a.triangles == b.triangles {
            continue;
        }
        // pairs that cross each other are not orbits
        let orbit = match t.make_pair(a, b) {
            Ok(o) => o,
            Err(SurfaceError::NotAnOrbit(_)) => continue,
            Err(e) => return Err(e.into()),
        };
        let e = check_orbit(t, &ctx, &orbit)?;
        let (d, quotient) = e.division.as_ref().expect("pairs have a division");
        if d.entries().iter().any(|(_, k)| *k < 0) {
            return Err(VerifyError::Mismatch(format!("monomial content {} has a negative exponent", d)));
        }
        if quotient.constant_term() != 1.into() || !quotient.all_coefficients_positive() {
            return Err(VerifyError::Mismatch(format!("quotient {} is not an F-polynomial", quotient)));
        }
        out.orbits += 1;
        if e.gamma3.is_some() {
            out.smoothed += 1;
        }
        let m = ctx.module_of_orbit(&orbit)?;
        if repalg::orbit_module_expansion(&ctx, &m)?.smoothing_checked {
            out.module_smoothed += 1;
        }
    }
    Ok(out)
}

/// Result of comparing the three pipelines on a type `B_n` polygon.
#[derive(Clone, Debug)]
pub struct TypeBReport {
    pub n: usize,
    pub variables: usize,
    pub seeds: usize,
    pub matched: usize,
}

/// Enumerates the cluster variables of the folded exchange matrix and
/// matches every non-initial one with an orbit of diagonals, evaluated by
/// the snake and the module pipelines.
pub fn type_b(n: usize) -> Result<TypeBReport, VerifyError> {
    let tb = TypeB::new(n)?;
    let t = &tb.collapsed;
    let bp = t.basepoint_data()?;
    let b = scale_row(&t.signed_adjacency(), bp.tau, 2);
    let en = enumerate(&ExchangeMatrix::new(b)?, 4 * n * n)?;
    if en.variables.len() != tb.expected_variables() {
        return Err(mismatch("number of cluster variables", en.variables.len(), tb.expected_variables()));
    }
    let ctx = SymmetricContext::new(t)?;
    let targets = en.non_initial();
    let mut hit = vec![false; targets.len()];
    for orbit_diagonals in tb.diagonal_orbits() {
        if orbit_diagonals.iter().any(|&(a, c)| tb.polygon.is_side_or_arc(a, c)) {
            continue;
        }
        let arcs: Vec<ArcPath> =
            orbit_diagonals.iter().map(|&(a, c)| tb.polygon.diagonal(a, c)).collect::<Result<_, _>>()?;
        let orbit = tb.sigma.restrict_orbit(&arcs)?;
        let e = check_orbit(t, &ctx, &orbit)?;
        let k = targets
            .iter()
            .position(|v| v.f == e.f && v.g == e.g)
            .ok_or_else(|| VerifyError::Mismatch(format!("orbit {:?} gives F = {}, g = {:?}, not a cluster variable", orbit_diagonals, e.f, e.g)))?;
        if hit[k] {
            return Err(VerifyError::Mismatch(format!("two orbits give F = {}", e.f)));
        }
        hit[k] = true;
    }
    let matched = hit.iter().filter(|&&h| h).count();
    if matched != targets.len() {
        return Err(mismatch("matched cluster variables", matched, targets.len()));
    }
    Ok(TypeBReport { n, variables: en.variables.len(), seeds: en.seeds, matched })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{running, sweep_surfaces};
    use crate::surface::ArcSpec;

    #[test]
    fn lift_matches_printed_arc() {
        let t = running();
        let arc = t
            .validate_arc(&ArcSpec { cross: vec!["1".into(), "3".into(), "4".into(), "5".into()], hints: None, to_basepoint: true })
            .unwrap();
        let (f, g) = lift_expansion(&t, &arc).unwrap();
        assert_eq!(f.len(), 8);
        assert_eq!(g, vec![-1, 1, 1, -1, 0]);
    }

    #[test]
    fn small_sweeps() {
        for (name, t) in sweep_surfaces() {
            arc_sweep(&t, 7, 10, 6).unwrap_or_else(|e| panic!("{}: {}", name, e));
            orbit_sweep(&t, 7, 5, 5).unwrap_or_else(|e| panic!("{}: {}", name, e));
        }
    }

    #[test]
    fn type_b2() {
        let r = type_b(2).unwrap();
        assert_eq!((r.variables, r.matched), (6, 4));
    }

    #[test]
    fn type_b3() {
        let r = type_b(3).unwrap();
        assert_eq!((r.variables, r.matched), (12, 9));
    }
}
