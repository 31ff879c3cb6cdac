//! Seeds with principal (or arbitrary frozen) coefficients and their mutation.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_integer::Integer;
use thiserror::Error;

use crate::poly::{Grading, LaurentPolynomial, PolyError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClusterError {
    #[error("exchange matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("diagonal entry b[{0}][{0}] is nonzero")]
    NonzeroDiagonal(usize),
    #[error("entries b[{i}][{j}] and b[{j}][{i}] are not sign-coherent")]
    SignIncoherent { i: usize, j: usize },
    #[error("matrix is not skew-symmetrizable (conflict at {i},{j})")]
    NotSkewSymmetrizable { i: usize, j: usize },
    #[error("mutation index {k} out of range for rank {n}")]
    IndexOutOfRange { k: usize, n: usize },
    #[error("exchange polynomial is not divisible by x{}", .k + 1)]
    NotLaurent { k: usize },
    #[error("enumeration did not close within depth {depth} ({found} variables found)")]
    DepthExceeded { depth: usize, found: usize, explored: Box<Enumeration> },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A validated skew-symmetrizable matrix with its symmetrizer `S`
/// (`S B` skew-symmetric, entries positive and coprime per component).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExchangeMatrix {
    pub b: Vec<Vec<i64>>,
    pub symmetrizer: Vec<i64>,
}

impl ExchangeMatrix {
    pub fn new(b: Vec<Vec<i64>>) -> Result<Self, ClusterError> {
        let n = b.len();
        for row in &b {
            if row.len() != n {
                return Err(ClusterError::NotSquare { rows: n, cols: row.len() });
            }
        }
        for i in 0..n {
            if b[i][i] != 0 {
                return Err(ClusterError::NonzeroDiagonal(i));
            }
            for j in 0..n {
                let (p, q) = (b[i][j], b[j][i]);
                if (p == 0) != (q == 0) || (p != 0 && p.signum() == q.signum()) {
                    return Err(ClusterError::SignIncoherent { i, j });
                }
            }
        }
        // s_j / s_i = -b_ij / b_ji along every nonzero pair
        let mut num = vec![0i64; n];
        let mut den = vec![0i64; n];
        let mut comp = vec![usize::MAX; n];
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = start;
            num[start] = 1;
            den[start] = 1;
            let mut members = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(i) = queue.pop_front() {
                for j in 0..n {
                    if b[i][j] == 0 {
                        continue;
                    }
                    // s_j = s_i * (-b_ij) / b_ji
                    let (mut a, mut d) = (num[i] * -b[i][j], den[i] * b[j][i]);
                    if d < 0 {
                        a = -a;
                        d = -d;
                    }
                    let g = a.gcd(&d);
                    let (a, d) = (a / g, d / g);
                    if comp[j] == usize::MAX {
                        comp[j] = start;
                        num[j] = a;
                        den[j] = d;
                        members.push(j);
                        queue.push_back(j);
                    } else if num[j] * d != a * den[j] {
                        return Err(ClusterError::NotSkewSymmetrizable { i, j });
                    }
                }
            }
            let l = members.iter().fold(1i64, |acc, &m| acc.lcm(&den[m]));
            let vals: Vec<i64> = members.iter().map(|&m| num[m] * (l / den[m])).collect();
            let g = vals.iter().fold(0i64, |acc, &v| acc.gcd(&v));
            for (&m, v) in members.iter().zip(vals) {
                num[m] = v / g;
                den[m] = 1;
            }
        }
        Ok(ExchangeMatrix { b, symmetrizer: num })
    }

    pub fn rank(&self) -> usize {
        self.b.len()
    }
}

/// Matrix mutation of an extended `(n+m) x n` matrix at column `k`.
pub fn mutate_matrix(b: &[Vec<i64>], k: usize) -> Vec<Vec<i64>> {
    let n = b[0].len();
    let mut out = b.to_vec();
    for i in 0..b.len() {
        for j in 0..n {
            out[i][j] = if i == k || j == k {
                -b[i][j]
            } else {
                b[i][j] + (b[i][k].abs() * b[k][j] + b[i][k] * b[k][j].abs()) / 2
            };
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct Seed {
    pub n: usize,
    /// Extended exchange matrix: `n` mutable rows then one row per frozen value.
    pub ext: Vec<Vec<i64>>,
    pub cluster: Vec<LaurentPolynomial>,
    pub frozen: Vec<LaurentPolynomial>,
    pub initial_b: Vec<Vec<i64>>,
    pub history: Vec<usize>,
}

impl Seed {
    /// Initial seed with principal coefficients: frozen values `y1..yn`.
    pub fn principal(b: &ExchangeMatrix) -> Self {
        let n = b.rank();
        let mut ext = b.b.clone();
        for i in 0..n {
            let mut row = vec![0; n];
            row[i] = 1;
            ext.push(row);
        }
        Seed {
            n,
            ext,
            cluster: (0..n).map(LaurentPolynomial::x).collect(),
            frozen: (0..n).map(LaurentPolynomial::y).collect(),
            initial_b: b.b.clone(),
            history: Vec::new(),
        }
    }

    /// Seed with explicit initial values for mutable and frozen rows.
    pub fn with_values(
        ext: Vec<Vec<i64>>,
        cluster: Vec<LaurentPolynomial>,
        frozen: Vec<LaurentPolynomial>,
        initial_b: Vec<Vec<i64>>,
    ) -> Self {
        let n = cluster.len();
        assert_eq!(ext.len(), n + frozen.len());
        Seed { n, ext, cluster, frozen, initial_b, history: Vec::new() }
    }

    pub fn exchange_matrix(&self) -> Vec<Vec<i64>> {
        self.ext[..self.n].to_vec()
    }

    fn value(&self, row: usize) -> &LaurentPolynomial {
        if row < self.n {
            &self.cluster[row]
        } else {
            &self.frozen[row - self.n]
        }
    }

    pub fn mutate(&self, k: usize) -> Result<Seed, ClusterError> {
        if k >= self.n {
            return Err(ClusterError::IndexOutOfRange { k, n: self.n });
        }
        let mut pos = LaurentPolynomial::one();
        let mut neg = LaurentPolynomial::one();
        for i in 0..self.ext.len() {
            let e = self.ext[i][k];
            if e > 0 {
                pos = &pos * &self.value(i).pow(e as u32);
            } else if e < 0 {
                neg = &neg * &self.value(i).pow((-e) as u32);
            }
        }
        let sum = &pos + &neg;
        let new = sum.div_exact(&self.cluster[k]).ok_or(ClusterError::NotLaurent { k })?;
        let mut out = self.clone();
        out.ext = mutate_matrix(&self.ext, k);
        out.cluster[k] = new;
        out.history.push(k);
        Ok(out)
    }

    pub fn mutate_sequence(&self, ks: &[usize]) -> Result<Seed, ClusterError> {
        let mut s = self.clone();
        for &k in ks {
            s = s.mutate(k)?;
        }
        Ok(s)
    }

    pub fn f_polynomial(&self, i: usize) -> LaurentPolynomial {
        self.cluster[i].set_x_to_one()
    }

    pub fn g_vector(&self, i: usize) -> Result<Vec<i64>, ClusterError> {
        Ok(self.cluster[i].graded_degree(&Grading::principal(&self.initial_b))?)
    }

    fn key(&self) -> Vec<String> {
        let mut k: Vec<String> = self.cluster.iter().map(|p| p.to_string()).collect();
        k.sort();
        k
    }
}

/// A cluster variable with its F-polynomial and g-vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterVariable {
    pub value: LaurentPolynomial,
    pub f: LaurentPolynomial,
    pub g: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Enumeration {
    pub variables: Vec<ClusterVariable>,
    pub seeds: usize,
    pub complete: bool,
}

impl Enumeration {
    /// Variables other than the initial `x1..xn`.
    pub fn non_initial(&self) -> Vec<&ClusterVariable> {
        self.variables.iter().filter(|v| !is_initial(&v.value)).collect()
    }
}

fn is_initial(p: &LaurentPolynomial) -> bool {
    p.len() == 1 && p.constant_term() == 0.into() && {
        let (m, c) = p.leading().unwrap();
        m.entries().len() == 1 && m.entries()[0].1 == 1 && m.entries()[0].0.is_x() && *c == 1.into()
    }
}

/// Breadth-first search over seeds reachable from the principal seed of `b`.
/// Seeds are identified by the multiset of their cluster variables.
pub fn explore(b: &ExchangeMatrix, max_depth: usize) -> Result<Enumeration, ClusterError> {
    let root = Seed::principal(b);
    let mut seen: BTreeSet<Vec<String>> = BTreeSet::new();
    let mut vars: BTreeMap<String, LaurentPolynomial> = BTreeMap::new();
    seen.insert(root.key());
    for p in &root.cluster {
        vars.insert(p.to_string(), p.clone());
    }
    let mut frontier = vec![root.clone()];
    let mut complete = true;
    for depth in 0..=max_depth {
        let mut next = Vec::new();
        for s in &frontier {
            for k in 0..s.n {
                if s.history.last() == Some(&k) {
                    continue;
                }
                let t = s.mutate(k)?;
                let key = t.key();
                if seen.contains(&key) {
                    continue;
                }
                if depth == max_depth {
                    complete = false;
                    break;
                }
                seen.insert(key);
                for p in &t.cluster {
                    vars.entry(p.to_string()).or_insert_with(|| p.clone());
                }
                next.push(t);
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    let grading = Grading::principal(&b.b);
    let mut variables = Vec::new();
    for p in vars.into_values() {
        let g = p.graded_degree(&grading)?;
        variables.push(ClusterVariable { f: p.set_x_to_one(), g, value: p });
    }
    variables.sort_by(|a, b| (&a.g, a.f.to_string()).cmp(&(&b.g, b.f.to_string())));
    Ok(Enumeration { variables, seeds: seen.len(), complete })
}

/// Like [`explore`] but fails when the exchange graph does not close by `max_depth`.
pub fn enumerate(b: &ExchangeMatrix, max_depth: usize) -> Result<Enumeration, ClusterError> {
    let e = explore(b, max_depth)?;
    if e.complete {
        Ok(e)
    } else {
        Err(ClusterError::DepthExceeded { depth: max_depth, found: e.variables.len(), explored: Box::new(e) })
    }
}

/// `D B` with `D = diag(1,..,1,c)`: row `row` of `b` scaled by `c`.
pub fn scale_row(b: &[Vec<i64>], row: usize, c: i64) -> Vec<Vec<i64>> {
    let mut out = b.to_vec();
    for e in out[row].iter_mut() {
        *e *= c;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> LaurentPolynomial {
        s.parse().unwrap()
    }

    #[test]
    fn symmetrizer_of_b2() {
        let b = ExchangeMatrix::new(vec![vec![0, 1], vec![-2, 0]]).unwrap();
        assert_eq!(b.symmetrizer, vec![2, 1]);
        assert!(matches!(
            ExchangeMatrix::new(vec![vec![0, 1], vec![1, 0]]),
            Err(ClusterError::SignIncoherent { .. })
        ));
        assert!(matches!(
            ExchangeMatrix::new(vec![vec![0, 1, 1], vec![-1, 0, 1], vec![-2, -1, 0]]),
            Err(ClusterError::NotSkewSymmetrizable { .. })
        ));
    }

    #[test]
    fn a2_first_mutation() {
        let b = ExchangeMatrix::new(vec![vec![0, 1], vec![-1, 0]]).unwrap();
        let s = Seed::principal(&b).mutate(0).unwrap();
        assert_eq!(s.cluster[0], p("x1^-1*x2 + x1^-1*y1"));
        assert_eq!(s.f_polynomial(0), p("y1 + 1"));
        assert_eq!(s.g_vector(0).unwrap(), vec![-1, 1]);
        assert_eq!(s.exchange_matrix(), vec![vec![0, -1], vec![1, 0]]);
    }

    #[test]
    fn mutation_is_an_involution() {
        let b = ExchangeMatrix::new(vec![vec![0, 1, 0], vec![-2, 0, 1], vec![0, -1, 0]]).unwrap();
        let s = Seed::principal(&b);
        for k in 0..3 {
            let t = s.mutate(k).unwrap().mutate(k).unwrap();
            assert_eq!(t.cluster, s.cluster);
            assert_eq!(t.ext, s.ext);
        }
    }

    #[test]
    fn finite_type_counts() {
        let a2 = ExchangeMatrix::new(vec![vec![0, 1], vec![-1, 0]]).unwrap();
        let e = enumerate(&a2, 10).unwrap();
        assert_eq!(e.variables.len(), 5);
        assert_eq!(e.seeds, 5);
        let b2 = ExchangeMatrix::new(vec![vec![0, 1], vec![-2, 0]]).unwrap();
        assert_eq!(enumerate(&b2, 10).unwrap().variables.len(), 6);
        let b3 = ExchangeMatrix::new(vec![vec![0, 1, 0], vec![-1, 0, 1], vec![0, -2, 0]]).unwrap();
        assert_eq!(enumerate(&b3, 20).unwrap().variables.len(), 12);
    }

    #[test]
    fn depth_zero_keeps_initial_seed() {
        let b2 = ExchangeMatrix::new(vec![vec![0, 1], vec![-2, 0]]).unwrap();
        match enumerate(&b2, 0) {
            Err(ClusterError::DepthExceeded { explored, .. }) => {
                assert_eq!(explored.variables.len(), 2);
                assert_eq!(explored.seeds, 1);
            }
            other => panic!("unexpected {:?}", other.map(|e| e.variables.len())),
        }
        let kronecker = ExchangeMatrix::new(vec![vec![0, 2], vec![-2, 0]]).unwrap();
        assert!(matches!(enumerate(&kronecker, 6), Err(ClusterError::DepthExceeded { .. })));
    }
}
