//! Sparse multivariate polynomials with integer coefficients.
//!
//! Variables are `x<e>` for edge identifiers `e`. A [`Polynomial`] is kept in
//! canonical form (no zero coefficients, no zero exponents), so structural
//! equality is polynomial equality.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::ids::EdgeId;
use crate::scalar::{EuclideanInt, Ring};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("variable x{0} has no assigned value")]
    MissingVariable(EdgeId),
    #[error("cannot parse polynomial {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

/// A product of variables. Stored as `(edge, exponent)` pairs sorted by edge,
/// all exponents positive; the empty product is the unit monomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    factors: Vec<(EdgeId, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(e: EdgeId) -> Self {
        Monomial { factors: vec![(e, 1)] }
    }

    /// Builds a monomial from arbitrary `(edge, exponent)` pairs, merging
    /// repeats and dropping zero exponents.
    pub fn from_factors<I: IntoIterator<Item = (EdgeId, u32)>>(factors: I) -> Self {
        let mut map: BTreeMap<EdgeId, u32> = BTreeMap::new();
        for (e, k) in factors {
            *map.entry(e).or_insert(0) += k;
        }
        Monomial {
            factors: map.into_iter().filter(|&(_, k)| k > 0).collect(),
        }
    }

    pub fn factors(&self) -> &[(EdgeId, u32)] {
        &self.factors
    }

    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|&(_, k)| k).sum()
    }

    pub fn exponent(&self, e: EdgeId) -> u32 {
        self.factors
            .binary_search_by_key(&e, |&(v, _)| v)
            .map(|i| self.factors[i].1)
            .unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// Removes `e` from the monomial, returning its former exponent.
    fn split_off(&self, e: EdgeId) -> (Monomial, u32) {
        match self.factors.binary_search_by_key(&e, |&(v, _)| v) {
            Ok(i) => {
                let mut factors = self.factors.clone();
                let (_, k) = factors.remove(i);
                (Monomial { factors }, k)
            }
            Err(_) => (self.clone(), 0),
        }
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.factors.len() + other.factors.len());
        let (mut i, mut j) = (0, 0);
        while i < self.factors.len() && j < other.factors.len() {
            let (a, b) = (self.factors[i], other.factors[j]);
            match a.0.cmp(&b.0) {
                Ordering::Less => {
                    out.push(a);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a.0, a.1 + b.1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.factors[i..]);
        out.extend_from_slice(&other.factors[j..]);
        Monomial { factors: out }
    }
}

// Higher total degree first, then lexicographic on the sorted factor list.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .degree()
            .cmp(&self.degree())
            .then_with(|| self.factors.cmp(&other.factors))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (n, &(e, k)) in self.factors.iter().enumerate() {
            if n > 0 {
                write!(f, "*")?;
            }
            if k == 1 {
                write!(f, "x{e}")?;
            } else {
                write!(f, "x{e}^{k}")?;
            }
        }
        Ok(())
    }
}

/// Polynomial in the edge variables with coefficients in `T`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial<T> {
    terms: BTreeMap<Monomial, T>,
}

impl<T: EuclideanInt> Polynomial<T> {
    pub fn constant(c: T) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn var(e: EdgeId) -> Self {
        Self::term(T::one(), Monomial::var(e))
    }

    pub fn term(c: T, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { terms }
    }

    /// Sum of the given variables, each with coefficient one.
    pub fn linear_sum<I: IntoIterator<Item = EdgeId>>(vars: I) -> Self {
        vars.into_iter()
            .fold(Self::zero(), |acc, e| acc + Self::var(e))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &T)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> T {
        self.terms.get(m).cloned().unwrap_or_else(T::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// True when every term has total degree `d`. The zero polynomial is
    /// homogeneous of every degree.
    pub fn is_homogeneous_of(&self, d: u32) -> bool {
        self.terms.keys().all(|m| m.degree() == d)
    }

    pub fn variables(&self) -> Vec<EdgeId> {
        let mut vars: Vec<EdgeId> = self
            .terms
            .keys()
            .flat_map(|m| m.factors.iter().map(|&(e, _)| e))
            .collect();
        vars.sort();
        vars.dedup();
        vars
    }

    fn add_term(&mut self, m: Monomial, c: T) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a.clone() * c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Evaluates the polynomial under `x_e ↦ assignment[e]`.
    pub fn eval<S, F>(&self, mut assignment: F) -> Result<S, PolyError>
    where
        S: Ring,
        F: FnMut(EdgeId) -> Option<S>,
        T: Into<S>,
    {
        let mut total = S::zero();
        for (m, c) in &self.terms {
            let mut value: S = c.clone().into();
            for &(e, k) in m.factors() {
                let x = assignment(e).ok_or(PolyError::MissingVariable(e))?;
                for _ in 0..k {
                    value = value * x.clone();
                }
            }
            total = total + value;
        }
        Ok(total)
    }

    /// Evaluation against a map, the common case.
    pub fn eval_map(&self, assignment: &BTreeMap<EdgeId, T>) -> Result<T, PolyError> {
        self.eval(|e| assignment.get(&e).cloned())
    }

    /// Ring homomorphism `x_var ↦ replacement`, identity on the other variables.
    pub fn substitute(&self, var: EdgeId, replacement: &Polynomial<T>) -> Self {
        let mut out = Self::zero();
        let mut powers: Vec<Polynomial<T>> = vec![Self::one()];
        for (m, c) in &self.terms {
            let (rest, k) = m.split_off(var);
            if k == 0 {
                out.add_term(rest, c.clone());
                continue;
            }
            while powers.len() <= k as usize {
                let next = powers.last().unwrap() * replacement;
                powers.push(next);
            }
            let head = Polynomial::term(c.clone(), rest);
            out = out + &head * &powers[k as usize];
        }
        out
    }

    /// Applies `f` to every variable simultaneously.
    pub fn rename<F: Fn(EdgeId) -> EdgeId>(&self, f: F) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let renamed = Monomial::from_factors(m.factors.iter().map(|&(e, k)| (f(e), k)));
            out.add_term(renamed, c.clone());
        }
        out
    }
}

impl<T: EuclideanInt> Zero for Polynomial<T> {
    fn zero() -> Self {
        Polynomial {
            terms: BTreeMap::new(),
        }
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<T: EuclideanInt> One for Polynomial<T> {
    fn one() -> Self {
        Self::constant(T::one())
    }
}

impl<T: EuclideanInt> Ring for Polynomial<T> {
    fn from_i64(n: i64) -> Self {
        Self::constant(T::from_i64(n))
    }
}

impl<T: EuclideanInt> Add<&Polynomial<T>> for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn add(self, rhs: &Polynomial<T>) -> Polynomial<T> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<T: EuclideanInt> AddAssign<&Polynomial<T>> for Polynomial<T> {
    fn add_assign(&mut self, rhs: &Polynomial<T>) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl<T: EuclideanInt> Add for Polynomial<T> {
    type Output = Polynomial<T>;

    fn add(mut self, rhs: Polynomial<T>) -> Polynomial<T> {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl<T: EuclideanInt> Neg for Polynomial<T> {
    type Output = Polynomial<T>;

    fn neg(self) -> Polynomial<T> {
        Polynomial {
            terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect(),
        }
    }
}

impl<T: EuclideanInt> Neg for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn neg(self) -> Polynomial<T> {
        -self.clone()
    }
}

impl<T: EuclideanInt> Sub for Polynomial<T> {
    type Output = Polynomial<T>;

    fn sub(self, rhs: Polynomial<T>) -> Polynomial<T> {
        self + (-rhs)
    }
}

impl<T: EuclideanInt> Sub<&Polynomial<T>> for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn sub(self, rhs: &Polynomial<T>) -> Polynomial<T> {
        self.clone() + (-rhs)
    }
}

impl<T: EuclideanInt> Mul<&Polynomial<T>> for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn mul(self, rhs: &Polynomial<T>) -> Polynomial<T> {
        let mut out = Polynomial::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1.clone() * c2.clone());
            }
        }
        out
    }
}

impl<T: EuclideanInt> Mul for Polynomial<T> {
    type Output = Polynomial<T>;

    fn mul(self, rhs: Polynomial<T>) -> Polynomial<T> {
        &self * &rhs
    }
}

impl<T: EuclideanInt> fmt::Display for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            let magnitude = c.abs();
            match (n, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_one() {
                write!(f, "{magnitude}")?;
            } else if magnitude.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{magnitude}*{m}")?;
            }
        }
        Ok(())
    }
}

impl<T: EuclideanInt + FromStr> FromStr for Polynomial<T> {
    type Err = PolyError;

    /// Parses the rendering produced by `Display`, e.g. `x1*x2 + 2*x5*x6 - x3`.
    /// Whitespace is insignificant.
    fn from_str(input: &str) -> Result<Self, PolyError> {
        let fail = |reason: &str| PolyError::Parse {
            input: input.to_string(),
            reason: reason.to_string(),
        };
        let compact: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(fail("empty input"));
        }
        let mut out = Polynomial::zero();
        let mut chunks: Vec<(bool, String)> = Vec::new();
        let mut current = String::new();
        let mut negative = false;
        for (i, ch) in compact.chars().enumerate() {
            if (ch == '+' || ch == '-') && !(i > 0 && current.ends_with('^')) {
                if i > 0 {
                    if current.is_empty() {
                        return Err(fail("dangling sign"));
                    }
                    chunks.push((negative, std::mem::take(&mut current)));
                }
                negative = ch == '-';
            } else {
                current.push(ch);
            }
        }
        if current.is_empty() {
            return Err(fail("dangling sign"));
        }
        chunks.push((negative, current));

        for (negative, chunk) in chunks {
            let mut coeff = T::one();
            let mut factors = Vec::new();
            for factor in chunk.split('*') {
                if let Some(var) = factor.strip_prefix('x') {
                    let (id, exp) = match var.split_once('^') {
                        Some((id, exp)) => (id, exp.parse::<u32>().map_err(|_| fail("bad exponent"))?),
                        None => (var, 1),
                    };
                    let id = id.parse::<u32>().map_err(|_| fail("bad variable index"))?;
                    factors.push((EdgeId(id), exp));
                } else {
                    let c = factor
                        .parse::<T>()
                        .map_err(|_| fail("bad coefficient"))?;
                    coeff = coeff * c;
                }
            }
            if negative {
                coeff = -coeff;
            }
            out.add_term(Monomial::from_factors(factors), coeff);
        }
        Ok(out)
    }
}
