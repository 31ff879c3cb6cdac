//! Small triangulated surfaces used by the tests and the `verify` command.

use crate::surface::polygon::{self, Polygon};
use crate::surface::{SigmaTriangulation, SurfaceError, Triangulation};

fn s(v: &[&str]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

fn t3(a: &str, b: &str, c: &str) -> [String; 3] {
    [a.into(), b.into(), c.into()]
}

/// The running example: five arcs, `5` invariant and the basepoint
/// triangle last.
pub fn running() -> Triangulation {
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
    .expect("running example is valid")
}

/// An annulus with two marked points outside and one inside, one outer
/// segment replaced by the arc `4` that cuts off a triangle carrying the
/// invariant arc `5` and the basepoint.
pub fn annulus() -> Triangulation {
    Triangulation::new(
        s(&["1", "2", "3", "4", "5"]),
        s(&["s1", "c", "b", "bL", "bR"]),
        vec![
            t3("2", "s1", "1"),
            t3("c", "3", "2"),
            t3("1", "4", "3"),
            t3("4", "b", "5"),
            t3("5", "bL", "bR"),
        ],
        Some("5"),
        Some(4),
    )
    .expect("annulus is valid")
}

/// The `(2n+2)`-gon with the fan triangulation from vertex `0` and its
/// image under the half turn. Arcs are `1..n-1`, the diameter `n`, and
/// the images `1'..(n-1)'`.
pub struct TypeB {
    pub n: usize,
    pub polygon: Polygon,
    pub sigma: SigmaTriangulation,
    /// Restriction of the quotient: the `(n+2)`-gon with the basepoint
    /// triangle glued to the diameter.
    pub collapsed: Triangulation,
}

impl TypeB {
    pub fn new(n: usize) -> Result<TypeB, SurfaceError> {
        assert!(n >= 2);
        let m = 2 * n + 2;
        let h = n + 1;
        let mut diagonals = Vec::new();
        let mut labels = Vec::new();
        for k in 2..=n {
            diagonals.push((0, k));
            labels.push(format!("{}", k - 1));
        }
        diagonals.push((0, h));
        labels.push(format!("{}", n));
        for k in 2..=n {
            diagonals.push((h, (k + h) % m));
            labels.push(format!("{}'", k - 1));
        }
        let polygon = polygon::build(m, &diagonals, &labels, |v| format!("s{}", v), Some(n - 1))?;
        let rot = |v: usize| (v + h) % m;
        let sigma_tri: Vec<usize> = polygon
            .tri_vertices
            .iter()
            .map(|t| {
                let mut img = t.map(rot);
                img.sort();
                polygon.tri_vertices.iter().position(|u| *u == img).expect("rotation maps triangles to triangles")
            })
            .collect();
        let sigma = SigmaTriangulation::new(polygon.tri.clone(), n, sigma_tri)?;
        let (collapsed, _) = sigma.restrict()?;
        Ok(TypeB { n, polygon, sigma, collapsed })
    }

    /// Number of cluster variables of type `B_n`.
    pub fn expected_variables(&self) -> usize {
        self.n * (self.n + 1)
    }

    /// All diagonals `(a, b)` with `a < b`, grouped into half-turn orbits.
    pub fn diagonal_orbits(&self) -> Vec<Vec<(usize, usize)>> {
        let m = self.polygon.vertices;
        let h = m / 2;
        let norm = |a: usize, b: usize| if a < b { (a, b) } else { (b, a) };
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::new();
        for a in 0..m {
            for b in a + 2..m {
                if (a == 0 && b == m - 1) || seen.contains(&(a, b)) {
                    continue;
                }
                let img = norm((a + h) % m, (b + h) % m);
                seen.insert((a, b));
                seen.insert(img);
                if img == (a, b) {
                    out.push(vec![(a, b)]);
                } else {
                    out.push(vec![(a, b), img]);
                }
            }
        }
        out
    }
}

/// Collapsed surfaces used in the random sweeps.
pub fn sweep_surfaces() -> Vec<(&'static str, Triangulation)> {
    vec![
        ("quadrilateral", TypeB::new(2).expect("valid").collapsed),
        ("pentagon", TypeB::new(3).expect("valid").collapsed),
        ("annulus", annulus()),
        ("running", running()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_have_basepoints() {
        for (name, t) in sweep_surfaces() {
            let bp = t.basepoint_data().unwrap_or_else(|e| panic!("{}: {}", name, e));
            assert_eq!(bp.tau, t.n() - 1, "{}", name);
        }
        let a = annulus().topology().unwrap();
        assert_eq!((a.boundary_components, a.punctures, a.genus), (2, 0, 0));
    }

    #[test]
    fn type_b_orbit_counts() {
        for n in 2..=4 {
            let b = TypeB::new(n).unwrap();
            assert_eq!(b.collapsed.n(), n);
            assert_eq!(b.diagonal_orbits().len(), b.expected_variables());
        }
    }
}
