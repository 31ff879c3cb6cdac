//! Sparse Laurent polynomials over the integers.
//!
//! Variables are indexed: `Var::x(k)` and `Var::y(k)` with `k` zero based.
//! Every x sorts before every y, and within a block the lower index is the
//! more significant one. Terms are kept in graded-lex order.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

const Y_BASE: u32 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("negative exponent of {var} cannot be specialised at zero")]
    NegativeExponentAtZero { var: Var },
    #[error("substituting {var} = {value} with a negative exponent leaves the integers")]
    NonIntegralSubstitution { var: Var, value: BigInt },
    #[error("variable {0} has no grading")]
    MissingGrading(Var),
    #[error("polynomial is not homogeneous: {first} has degree {first_degree:?}, {second} has degree {second_degree:?}")]
    NotHomogeneous {
        first: String,
        first_degree: Vec<i64>,
        second: String,
        second_degree: Vec<i64>,
    },
    #[error("the zero polynomial has no degree")]
    ZeroPolynomial,
    #[error("cannot parse polynomial: {0}")]
    Parse(String),
}

#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Var(u32);

impl Var {
    pub fn x(k: usize) -> Var {
        assert!(k < Y_BASE as usize);
        Var(k as u32)
    }

    pub fn y(k: usize) -> Var {
        assert!(k < Y_BASE as usize);
        Var(Y_BASE + k as u32)
    }

    pub fn is_x(self) -> bool {
        self.0 < Y_BASE
    }

    pub fn is_y(self) -> bool {
        !self.is_x()
    }

    /// Zero based index inside its block.
    pub fn index(self) -> usize {
        if self.is_x() {
            self.0 as usize
        } else {
            (self.0 - Y_BASE) as usize
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_x() {
            write!(f, "x{}", self.index() + 1)
        } else {
            write!(f, "y{}", self.index() + 1)
        }
    }
}

/// Sparse exponent vector, sorted by variable, never holding a zero entry.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct ExponentVector(Vec<(Var, i64)>);

impl ExponentVector {
    pub fn one() -> Self {
        ExponentVector(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        ExponentVector(vec![(v, 1)])
    }

    pub fn from_pairs<I: IntoIterator<Item = (Var, i64)>>(pairs: I) -> Self {
        let mut map: BTreeMap<Var, i64> = BTreeMap::new();
        for (v, e) in pairs {
            *map.entry(v).or_insert(0) += e;
        }
        ExponentVector(map.into_iter().filter(|&(_, e)| e != 0).collect())
    }

    /// Monomial in the y block with the given dense exponents.
    pub fn y_dense(exps: &[i64]) -> Self {
        Self::from_pairs(exps.iter().enumerate().map(|(i, &e)| (Var::y(i), e)))
    }

    /// Monomial in the x block with the given dense exponents.
    pub fn x_dense(exps: &[i64]) -> Self {
        Self::from_pairs(exps.iter().enumerate().map(|(i, &e)| (Var::x(i), e)))
    }

    pub fn entries(&self) -> &[(Var, i64)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, v: Var) -> i64 {
        match self.0.binary_search_by(|(w, _)| w.cmp(&v)) {
            Ok(i) => self.0[i].1,
            Err(_) => 0,
        }
    }

    pub fn total_degree(&self) -> i64 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    /// Dense exponents of `y1..yk`.
    pub fn y_exponents(&self, k: usize) -> Vec<i64> {
        (0..k).map(|i| self.get(Var::y(i))).collect()
    }

    fn merge(&self, other: &Self, sign: i64) -> Self {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            let take = match (self.0.get(i), other.0.get(j)) {
                (Some(a), Some(b)) => a.0.cmp(&b.0),
                (Some(_), None) => Ordering::Less,
                (None, _) => Ordering::Greater,
            };
            match take {
                Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    let (v, e) = other.0[j];
                    out.push((v, sign * e));
                    j += 1;
                }
                Ordering::Equal => {
                    let e = self.0[i].1 + sign * other.0[j].1;
                    if e != 0 {
                        out.push((self.0[i].0, e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        ExponentVector(out)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.merge(other, 1)
    }

    pub fn div(&self, other: &Self) -> Self {
        self.merge(other, -1)
    }

    pub fn pow(&self, k: i64) -> Self {
        if k == 0 {
            return Self::one();
        }
        ExponentVector(self.0.iter().map(|&(v, e)| (v, e * k)).collect())
    }

    /// Componentwise minimum, treating absent variables as exponent zero.
    pub fn meet(&self, other: &Self) -> Self {
        let vars: Vec<Var> = self.0.iter().chain(other.0.iter()).map(|&(v, _)| v).collect();
        Self::from_pairs(vars.into_iter().collect::<std::collections::BTreeSet<_>>().into_iter().map(|v| {
            (v, self.get(v).min(other.get(v)))
        }))
    }

    fn lex_cmp(&self, other: &Self) -> Ordering {
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(&(_, e)), None) => return e.cmp(&0),
                (None, Some(&(_, e))) => return 0.cmp(&e),
                (Some(&(v, e)), Some(&(w, f))) => match v.cmp(&w) {
                    Ordering::Less => return e.cmp(&0),
                    Ordering::Greater => return 0.cmp(&f),
                    Ordering::Equal => {
                        if e != f {
                            return e.cmp(&f);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

/// Graded lex: total degree first, then the first differing variable decides.
impl Ord for ExponentVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.lex_cmp(other))
    }
}

impl PartialOrd for ExponentVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, &(v, e)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if e == 1 {
                write!(f, "{}", v)?;
            } else {
                write!(f, "{}^{}", v, e)?;
            }
        }
        Ok(())
    }
}

/// Degree map used by `graded_degree`.
#[derive(Clone, Debug, Default)]
pub struct Grading {
    pub dim: usize,
    pub degrees: BTreeMap<Var, Vec<i64>>,
}

impl Grading {
    pub fn new(dim: usize) -> Self {
        Grading { dim, degrees: BTreeMap::new() }
    }

    pub fn set(&mut self, v: Var, deg: Vec<i64>) {
        assert_eq!(deg.len(), self.dim);
        self.degrees.insert(v, deg);
    }

    /// deg x_i = e_i and deg y_j = -(column j of b).
    pub fn principal(b: &[Vec<i64>]) -> Self {
        let n = b.len();
        let mut g = Grading::new(n);
        for i in 0..n {
            let mut e = vec![0; n];
            e[i] = 1;
            g.set(Var::x(i), e);
            g.set(Var::y(i), (0..n).map(|r| -b[r][i]).collect());
        }
        g
    }

    pub fn degree_of(&self, m: &ExponentVector) -> Result<Vec<i64>, PolyError> {
        let mut d = vec![0; self.dim];
        for &(v, e) in m.entries() {
            let dv = self.degrees.get(&v).ok_or(PolyError::MissingGrading(v))?;
            for (a, b) in d.iter_mut().zip(dv) {
                *a += e * b;
            }
        }
        Ok(d)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct LaurentPolynomial {
    terms: BTreeMap<ExponentVector, BigInt>,
}

impl LaurentPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant<C: Into<BigInt>>(c: C) -> Self {
        Self::monomial(ExponentVector::one(), c)
    }

    pub fn monomial<C: Into<BigInt>>(m: ExponentVector, c: C) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        LaurentPolynomial { terms }
    }

    pub fn var(v: Var) -> Self {
        Self::monomial(ExponentVector::var(v), 1)
    }

    pub fn x(k: usize) -> Self {
        Self::var(Var::x(k))
    }

    pub fn y(k: usize) -> Self {
        Self::var(Var::y(k))
    }

    pub fn from_terms<I: IntoIterator<Item = (ExponentVector, BigInt)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: ExponentVector, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical (descending) order.
    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &BigInt)> {
        self.terms.iter().rev()
    }

    pub fn leading(&self) -> Option<(&ExponentVector, &BigInt)> {
        self.terms.iter().next_back()
    }

    pub fn trailing(&self) -> Option<(&ExponentVector, &BigInt)> {
        self.terms.iter().next()
    }

    pub fn coefficient(&self, m: &ExponentVector) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn constant_term(&self) -> BigInt {
        self.coefficient(&ExponentVector::one())
    }

    pub fn vars(&self) -> std::collections::BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.entries().iter().map(|&(v, _)| v)).collect()
    }

    pub fn has_x(&self) -> bool {
        self.vars().iter().any(|v| v.is_x())
    }

    pub fn has_negative_exponent(&self) -> bool {
        self.terms.keys().any(|m| m.entries().iter().any(|&(_, e)| e < 0))
    }

    pub fn all_coefficients_positive(&self) -> bool {
        self.terms.values().all(|c| c.is_positive())
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPolynomial { terms: self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &ExponentVector) -> Self {
        LaurentPolynomial { terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect() }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Returns `q` with `self == q * d`, or `None` when `d` does not divide.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let (lt_d, lc_d) = d.leading()?;
        let (lt_d, lc_d) = (lt_d.clone(), lc_d.clone());
        if self.is_zero() {
            return Some(Self::zero());
        }
        let tt_d = d.trailing().unwrap().0.clone();
        let floor = self.trailing().unwrap().0.div(&tt_d);
        let mut r = self.clone();
        let mut q = Self::zero();
        let limit = 64 + 4 * self.len() * d.len().max(1) + 4 * self.len();
        let mut steps = 0;
        while let Some((lt_r, lc_r)) = r.leading() {
            steps += 1;
            if steps > limit.max(1 << 16) {
                return None;
            }
            let t = lt_r.div(&lt_d);
            if t < floor {
                return None;
            }
            let (c, rem) = num_integer::Integer::div_rem(lc_r, &lc_d);
            if !rem.is_zero() {
                return None;
            }
            let step = Self::monomial(t, c);
            r = &r - &(&step * d);
            q = &q + &step;
        }
        Some(q)
    }

    /// `(m, q)` with `self == x^m * q` and every variable of `q` attaining exponent zero.
    pub fn monomial_content(&self) -> Result<(ExponentVector, Self), PolyError> {
        let mut keys = self.terms.keys();
        let first = keys.next().ok_or(PolyError::ZeroPolynomial)?;
        let m = keys.fold(first.clone(), |acc, k| acc.meet(k));
        let q = self.mul_monomial(&m.pow(-1));
        Ok((m, q))
    }

    pub fn specialize(&self, assignment: &BTreeMap<Var, BigInt>) -> Result<Self, PolyError> {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest = Vec::new();
            for &(v, e) in m.entries() {
                match assignment.get(&v) {
                    None => rest.push((v, e)),
                    Some(val) => {
                        if e >= 0 {
                            coeff *= num_traits::pow(val.clone(), e as usize);
                        } else if val.is_zero() {
                            return Err(PolyError::NegativeExponentAtZero { var: v });
                        } else if val.abs().is_one() {
                            coeff *= num_traits::pow(val.clone(), (-e) as usize);
                        } else {
                            return Err(PolyError::NonIntegralSubstitution { var: v, value: val.clone() });
                        }
                    }
                }
            }
            out.add_term(ExponentVector(rest), coeff);
        }
        Ok(out)
    }

    /// Sets every x variable to one.
    pub fn set_x_to_one(&self) -> Self {
        let assignment = self.vars().into_iter().filter(|v| v.is_x()).map(|v| (v, BigInt::one())).collect();
        self.specialize(&assignment).expect("x = 1 is always admissible")
    }

    /// Sets every variable in `vars` to zero, dropping the affected terms.
    pub fn drop_vars(&self, keep: impl Fn(Var) -> bool) -> Self {
        LaurentPolynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.entries().iter().all(|&(v, _)| keep(v)))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Applies a substitution of variables by variables (used to rename y's).
    pub fn rename(&self, f: impl Fn(Var) -> Var) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, c)| {
            (ExponentVector::from_pairs(m.entries().iter().map(|&(v, e)| (f(v), e))), c.clone())
        }))
    }

    /// Replaces each variable by a Laurent polynomial. Negative powers need the
    /// image to be a monomial.
    pub fn substitute(&self, f: impl Fn(Var) -> Option<LaurentPolynomial>) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut t = Self::constant(c.clone());
            for &(v, e) in m.entries() {
                let img = f(v).unwrap_or_else(|| Self::var(v));
                if e >= 0 {
                    t = &t * &img.pow(e as u32);
                } else {
                    assert_eq!(img.len(), 1, "negative power of a non-monomial");
                    let (mm, cc) = img.leading().unwrap();
                    assert!(cc.abs().is_one());
                    let inv = Self::monomial(mm.pow(-1), cc.clone());
                    t = &t * &inv.pow((-e) as u32);
                }
            }
            out = &out + &t;
        }
        out
    }

    pub fn graded_degree(&self, grading: &Grading) -> Result<Vec<i64>, PolyError> {
        let mut first: Option<(&ExponentVector, Vec<i64>)> = None;
        for m in self.terms.keys().rev() {
            let d = grading.degree_of(m)?;
            match &first {
                None => first = Some((m, d)),
                Some((m0, d0)) => {
                    if *d0 != d {
                        return Err(PolyError::NotHomogeneous {
                            first: m0.to_string(),
                            first_degree: d0.clone(),
                            second: m.to_string(),
                            second_degree: d,
                        });
                    }
                }
            }
        }
        first.map(|(_, d)| d).ok_or(PolyError::ZeroPolynomial)
    }

    /// Evaluates at small integer points, used by tests.
    pub fn eval_i64(&self, point: impl Fn(Var) -> i64) -> Option<BigInt> {
        let mut acc = BigInt::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in m.entries() {
                let val = point(v);
                if e < 0 {
                    if val.abs() != 1 {
                        return None;
                    }
                    t *= BigInt::from(val).pow((-e) as u32);
                } else {
                    t *= BigInt::from(val).pow(e as u32);
                }
            }
            acc += t;
        }
        Some(acc)
    }

    pub fn max_abs_coefficient(&self) -> BigInt {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_else(BigInt::zero)
    }

    pub fn to_i64_coefficients(&self) -> Option<Vec<(ExponentVector, i64)>> {
        self.terms().map(|(m, c)| c.to_i64().map(|c| (m.clone(), c))).collect()
    }
}

impl<'a> Add<&'a LaurentPolynomial> for &'a LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn add(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a LaurentPolynomial> for &'a LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn sub(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl<'a> Mul<&'a LaurentPolynomial> for &'a LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn mul(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        let mut out = LaurentPolynomial::zero();
        for (m, c) in &self.terms {
            for (k, d) in &rhs.terms {
                out.add_term(m.mul(k), c * d);
            }
        }
        out
    }
}

impl Neg for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn neg(self) -> LaurentPolynomial {
        LaurentPolynomial { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Add for LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn add(self, rhs: Self) -> Self {
        &self + &rhs
    }
}

impl Sub for LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn sub(self, rhs: Self) -> Self {
        &self - &rhs
    }
}

impl Mul for LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = c.abs();
            if m.is_one() {
                write!(f, "{}", a)?;
            } else if a.is_one() {
                write!(f, "{}", m)?;
            } else {
                write!(f, "{}*{}", a, m)?;
            }
        }
        Ok(())
    }
}

fn parse_factor(s: &str) -> Result<(Option<BigInt>, Option<(Var, i64)>), PolyError> {
    let err = || PolyError::Parse(s.to_string());
    if let Ok(c) = s.parse::<BigInt>() {
        return Ok((Some(c), None));
    }
    let (base, exp) = match s.split_once('^') {
        Some((b, e)) => (b, e.trim_matches(|c| c == '(' || c == ')').parse::<i64>().map_err(|_| err())?),
        None => (s, 1),
    };
    let mut chars = base.chars();
    let kind = chars.next().ok_or_else(err)?;
    let idx: usize = chars.as_str().parse().map_err(|_| err())?;
    if idx == 0 {
        return Err(err());
    }
    let v = match kind {
        'x' => Var::x(idx - 1),
        'y' => Var::y(idx - 1),
        _ => return Err(err()),
    };
    Ok((None, Some((v, exp))))
}

/// Parses the canonical rendering, e.g. `y1*y4^2 + 2*y4 - 1`.
impl FromStr for LaurentPolynomial {
    type Err = PolyError;
    fn from_str(s: &str) -> Result<Self, PolyError> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(PolyError::Parse(s));
        }
        let mut out = LaurentPolynomial::zero();
        let mut term = String::new();
        let mut sign = 1i64;
        let mut prev: Option<char> = None;
        let flush = |term: &str, sign: i64, out: &mut LaurentPolynomial| -> Result<(), PolyError> {
            if term.is_empty() {
                return Err(PolyError::Parse(term.to_string()));
            }
            let mut c = BigInt::from(sign);
            let mut pairs = Vec::new();
            for f in term.split('*') {
                match parse_factor(f)? {
                    (Some(k), _) => c *= k,
                    (_, Some(p)) => pairs.push(p),
                    _ => unreachable!(),
                }
            }
            out.add_term(ExponentVector::from_pairs(pairs), c);
            Ok(())
        };
        for ch in s.chars() {
            if (ch == '+' || ch == '-') && prev.is_some() && prev != Some('^') && prev != Some('(') {
                flush(&term, sign, &mut out)?;
                term.clear();
                sign = if ch == '-' { -1 } else { 1 };
            } else if (ch == '+' || ch == '-') && prev.is_none() {
                sign = if ch == '-' { -1 } else { 1 };
            } else {
                term.push(ch);
            }
            prev = Some(ch);
        }
        flush(&term, sign, &mut out)?;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> LaurentPolynomial {
        s.parse().unwrap()
    }

    #[test]
    fn renders_in_graded_lex_order() {
        let f = p("1 + y1 + 2*y4 + y1*y3*y4^2*y5^2 + y4^2");
        assert_eq!(f.to_string(), "y1*y3*y4^2*y5^2 + y4^2 + y1 + 2*y4 + 1");
        let g = p("x1^-1*y2 - x2");
        assert_eq!(g.to_string(), "-x2 + x1^-1*y2");
        assert_eq!(LaurentPolynomial::zero().to_string(), "0");
    }

    #[test]
    fn parse_roundtrip() {
        for s in ["y1*y3*y4^2*y5^2 + 2*y1*y3*y4^2*y5 + 1", "-3 + x1^-2*x2", "-y1"] {
            assert_eq!(p(s).to_string(), s);
        }
    }

    #[test]
    fn monomial_content_example() {
        let (m, q) = p("y1*y3 + y1*y4").monomial_content().unwrap();
        assert_eq!(m, ExponentVector::var(Var::y(0)));
        assert_eq!(q, p("y3 + y4"));
        let (m, q) = p("y1 + 1").monomial_content().unwrap();
        assert!(m.is_one());
        assert_eq!(q, p("y1 + 1"));
    }

    #[test]
    fn exact_division() {
        let a = p("x1 + y1*x2^-1");
        let b = p("x2^2 - 3*x1*y2 + 1");
        let prod = &a * &b;
        assert_eq!(prod.div_exact(&b), Some(a.clone()));
        assert_eq!(prod.div_exact(&a), Some(b));
        assert_eq!(p("x1 + 1").div_exact(&p("x1 - 1")), None);
        assert_eq!(p("x1^2 + 1").div_exact(&p("2*x1")), None);
    }

    #[test]
    fn specialize_rejects_negative_power_at_zero() {
        let f = p("x1^-1 + y1");
        let mut a = BTreeMap::new();
        a.insert(Var::x(0), BigInt::zero());
        assert!(matches!(f.specialize(&a), Err(PolyError::NegativeExponentAtZero { .. })));
        assert_eq!(f.set_x_to_one(), p("y1 + 1"));
    }

    #[test]
    fn graded_degree_of_exchange_binomial() {
        let b = vec![vec![0, 1], vec![-1, 0]];
        let g = Grading::principal(&b);
        // x1' = (x2 + y1) / x1 for B = [[0,1],[-1,0]]
        let x1p = p("x1^-1*x2 + x1^-1*y1");
        assert_eq!(x1p.graded_degree(&g).unwrap(), vec![-1, 1]);
        let bad = p("x1 + x2");
        assert!(matches!(bad.graded_degree(&g), Err(PolyError::NotHomogeneous { .. })));
    }
}
