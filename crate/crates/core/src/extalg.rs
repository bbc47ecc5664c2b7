//! The symplectic module `H` with basis `α_1..α_g, β_1..β_g`, its third
//! exterior power `L = ∧³H` with the filtration by number of `β` factors,
//! and the unipotent endomorphisms `δ_ℓ`, `δ_G` acting on both.
//!
//! Scalars are any [`Ring`]: polynomials over the edge variables for the
//! graph-level maps, integers once lengths have been substituted.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::graph::CycleBasisContext;
use crate::ids::EdgeId;
use crate::intlin::Matrix;
use crate::scalar::{EuclideanInt, Ring};
use crate::polyring::Polynomial;
use crate::IntPolynomial;

/// 1-based index triple `(i, j, k)`.
pub type Index3 = (usize, usize, usize);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtAlgError {
    #[error("index triple {0:?} out of range for genus {1}")]
    IndexOutOfRange(Index3, usize),
    #[error("index triple {0:?} is not in the expected order")]
    BadOrder(Index3),
    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Alpha,
    Beta,
}

/// `α_i` or `β_i`. Ordered with every `α` before every `β`, then by index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymplecticLabel {
    pub kind: Kind,
    pub index: usize,
}

impl SymplecticLabel {
    pub fn alpha(index: usize) -> Self {
        SymplecticLabel { kind: Kind::Alpha, index }
    }

    pub fn beta(index: usize) -> Self {
        SymplecticLabel { kind: Kind::Beta, index }
    }
}

impl fmt::Display for SymplecticLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            Kind::Alpha => write!(f, "a{}", self.index),
            Kind::Beta => write!(f, "b{}", self.index),
        }
    }
}

impl FromStr for SymplecticLabel {
    type Err = ExtAlgError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let fail = || ExtAlgError::Parse {
            input: s.to_string(),
            reason: "expected a<i> or b<i> with i >= 1".into(),
        };
        let (kind, rest) = match s.split_at_checked(1) {
            Some(("a", rest)) => (Kind::Alpha, rest),
            Some(("b", rest)) => (Kind::Beta, rest),
            _ => return Err(fail()),
        };
        let index: usize = rest.parse().map_err(|_| fail())?;
        if index == 0 {
            return Err(fail());
        }
        Ok(SymplecticLabel { kind, index })
    }
}

/// The intersection pairing: `⟨α_i, β_i⟩ = 1 = −⟨β_i, α_i⟩`, all other
/// basis pairings vanish.
pub fn pairing(a: SymplecticLabel, b: SymplecticLabel) -> i64 {
    if a.index != b.index {
        return 0;
    }
    match (a.kind, b.kind) {
        (Kind::Alpha, Kind::Beta) => 1,
        (Kind::Beta, Kind::Alpha) => -1,
        _ => 0,
    }
}

/// An element `Σ a_i α_i + Σ b_i β_i` of `H ⊗ R`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HElement<T> {
    pub alpha: Vec<T>,
    pub beta: Vec<T>,
}

impl<T: Ring> HElement<T> {
    pub fn zero(g: usize) -> Self {
        HElement {
            alpha: vec![T::zero(); g],
            beta: vec![T::zero(); g],
        }
    }

    pub fn basis(label: SymplecticLabel, g: usize) -> Self {
        let mut h = Self::zero(g);
        match label.kind {
            Kind::Alpha => h.alpha[label.index - 1] = T::one(),
            Kind::Beta => h.beta[label.index - 1] = T::one(),
        }
        h
    }

    /// `Σ_j c_j β_j`.
    pub fn from_beta(coeffs: Vec<T>) -> Self {
        HElement {
            alpha: vec![T::zero(); coeffs.len()],
            beta: coeffs,
        }
    }

    pub fn genus(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_zero(&self) -> bool {
        self.alpha.iter().chain(&self.beta).all(Zero::is_zero)
    }

    /// Membership in the Lagrangian `Y = span(β_1, …, β_g)`.
    pub fn in_y(&self) -> bool {
        self.alpha.iter().all(Zero::is_zero)
    }

    pub fn coefficient(&self, label: SymplecticLabel) -> &T {
        match label.kind {
            Kind::Alpha => &self.alpha[label.index - 1],
            Kind::Beta => &self.beta[label.index - 1],
        }
    }

    /// Nonzero coefficients with their labels, `α` block first.
    pub fn terms(&self) -> impl Iterator<Item = (SymplecticLabel, &T)> {
        let alphas = self
            .alpha
            .iter()
            .enumerate()
            .map(|(i, c)| (SymplecticLabel::alpha(i + 1), c));
        let betas = self
            .beta
            .iter()
            .enumerate()
            .map(|(i, c)| (SymplecticLabel::beta(i + 1), c));
        alphas.chain(betas).filter(|(_, c)| !c.is_zero())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        let combine = |a: &[T], b: &[T]| {
            a.iter()
                .zip(b)
                .map(|(x, y)| f(x.clone(), y.clone()))
                .collect()
        };
        HElement {
            alpha: combine(&self.alpha, &other.alpha),
            beta: combine(&self.beta, &other.beta),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &T) -> Self {
        HElement {
            alpha: self.alpha.iter().map(|a| c.clone() * a.clone()).collect(),
            beta: self.beta.iter().map(|b| c.clone() * b.clone()).collect(),
        }
    }

    /// `⟨self, other⟩`.
    pub fn pair(&self, other: &Self) -> T {
        let mut total = T::zero();
        for i in 0..self.genus() {
            total = total + self.alpha[i].clone() * other.beta[i].clone()
                - self.beta[i].clone() * other.alpha[i].clone();
        }
        total
    }
}

/// `[ℓ_e] = Σ_j s_j(e) β_j` with coefficients in `T`.
pub fn edge_class<T: Ring>(ctx: &CycleBasisContext, e: EdgeId) -> HElement<T> {
    HElement::from_beta(ctx.beta_class(e).into_iter().map(T::from_i64).collect())
}

/// `δ_ℓ^a(h) = h + a⟨h,[ℓ]⟩[ℓ] x_ℓ`. Since `(δ_ℓ − I)² = 0` this covers
/// every integer power, `a = −1` being the inverse.
pub fn delta_ell_h_pow(
    ctx: &CycleBasisContext,
    ell: EdgeId,
    power: i64,
    h: &HElement<IntPolynomial>,
) -> HElement<IntPolynomial> {
    let class: HElement<IntPolynomial> = edge_class(ctx, ell);
    let factor = h.pair(&class) * IntPolynomial::var(ell) * IntPolynomial::from_i64(power);
    h.add(&class.scale(&factor))
}

pub fn delta_ell_h(
    ctx: &CycleBasisContext,
    ell: EdgeId,
    h: &HElement<IntPolynomial>,
) -> HElement<IntPolynomial> {
    delta_ell_h_pow(ctx, ell, 1, h)
}

pub fn delta_ell_h_inv(
    ctx: &CycleBasisContext,
    ell: EdgeId,
    h: &HElement<IntPolynomial>,
) -> HElement<IntPolynomial> {
    delta_ell_h_pow(ctx, ell, -1, h)
}

/// `δ = [[I, 0], [Q, I]]`: `α_j ↦ α_j + Σ_i q_ij β_i`, `β_j ↦ β_j`.
pub fn delta_q_h<T: Ring>(q: &Matrix<T>, h: &HElement<T>) -> HElement<T> {
    let mut out = h.clone();
    for i in 0..h.genus() {
        for j in 0..h.genus() {
            out.beta[i] = out.beta[i].clone() + q[(i, j)].clone() * h.alpha[j].clone();
        }
    }
    out
}

/// `(δ − I)(h) = Q(α-part of h)`, an element of `Y`.
pub fn delta_q_minus_i_h<T: Ring>(q: &Matrix<T>, h: &HElement<T>) -> HElement<T> {
    delta_q_h(q, h).sub(h)
}

pub fn delta_g_h(ctx: &CycleBasisContext, h: &HElement<IntPolynomial>) -> HElement<IntPolynomial> {
    delta_q_h(ctx.q(), h)
}

/// `(∏ δ_ℓ^{a_ℓ} − I)(h) − Σ a_ℓ (δ_ℓ − I)(h)`, which vanishes identically.
/// The product is applied in ascending edge order.
pub fn delta_minus_i_sum_check(
    ctx: &CycleBasisContext,
    exponents: &BTreeMap<EdgeId, i64>,
    h: &HElement<IntPolynomial>,
) -> HElement<IntPolynomial> {
    let mut product = h.clone();
    let mut sum = HElement::zero(h.genus());
    for (&ell, &a) in exponents {
        product = delta_ell_h_pow(ctx, ell, a, &product);
        let step = delta_ell_h(ctx, ell, h).sub(h);
        sum = sum.add(&step.scale(&IntPolynomial::from_i64(a)));
    }
    product.sub(h).sub(&sum)
}

/// A basis vector `l_1 ∧ l_2 ∧ l_3` of `L` with strictly increasing labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WedgeTriple([SymplecticLabel; 3]);

impl WedgeTriple {
    /// Sorts the labels, returning the sign of the sorting permutation, or
    /// `None` when two labels coincide.
    pub fn new(a: SymplecticLabel, b: SymplecticLabel, c: SymplecticLabel) -> Option<(i64, Self)> {
        let mut labels = [a, b, c];
        let mut sign = 1;
        for i in 0..3 {
            for j in 0..2 - i {
                if labels[j] > labels[j + 1] {
                    labels.swap(j, j + 1);
                    sign = -sign;
                }
            }
        }
        if labels[0] == labels[1] || labels[1] == labels[2] {
            return None;
        }
        Some((sign, WedgeTriple(labels)))
    }

    /// `β_r ∧ β_s ∧ β_t` for `r < s < t`.
    pub fn betas(r: usize, s: usize, t: usize) -> Self {
        let (sign, w) = WedgeTriple::new(
            SymplecticLabel::beta(r),
            SymplecticLabel::beta(s),
            SymplecticLabel::beta(t),
        )
        .expect("distinct indices");
        assert_eq!(sign, 1, "indices must be increasing");
        w
    }

    pub fn labels(&self) -> [SymplecticLabel; 3] {
        self.0
    }

    /// Filtration level: the number of `β` factors.
    pub fn beta_count(&self) -> usize {
        self.0.iter().filter(|l| l.kind == Kind::Beta).count()
    }

    /// The indices as a triple.
    pub fn indices(&self) -> Index3 {
        (self.0[0].index, self.0[1].index, self.0[2].index)
    }
}

impl fmt::Display for WedgeTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}^{}", self.0[0], self.0[1], self.0[2])
    }
}

/// An element of `L ⊗ R`; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LElement<T> {
    terms: BTreeMap<WedgeTriple, T>,
}

impl<T: Ring> Default for LElement<T> {
    fn default() -> Self {
        LElement { terms: BTreeMap::new() }
    }
}

impl<T: Ring> LElement<T> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `c · (a ∧ b ∧ d)` for labels in any order.
    pub fn wedge_labels(c: T, a: SymplecticLabel, b: SymplecticLabel, d: SymplecticLabel) -> Self {
        let mut out = Self::zero();
        if let Some((sign, w)) = WedgeTriple::new(a, b, d) {
            out.add_term(w, if sign < 0 { -c } else { c });
        }
        out
    }

    pub fn add_term(&mut self, w: WedgeTriple, c: T) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&w) {
            Some(old) => old + c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(w, sum);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&WedgeTriple, &T)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: &WedgeTriple) -> T {
        self.terms.get(w).cloned().unwrap_or_else(T::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(*w, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(*w, -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &T) -> Self {
        let mut out = Self::zero();
        for (w, x) in &self.terms {
            out.add_term(*w, c.clone() * x.clone());
        }
        out
    }

    /// Least number of `β` factors over the terms; `None` for zero, which
    /// lies in every filtration step.
    pub fn filtration_level(&self) -> Option<usize> {
        self.terms.keys().map(WedgeTriple::beta_count).min()
    }

    /// Membership in `F_q L`.
    pub fn in_filtration(&self, q: usize) -> bool {
        self.filtration_level().map_or(true, |level| level >= q)
    }

    /// `h_1 ∧ h_2 ∧ h_3`, expanded trilinearly.
    pub fn wedge(h1: &HElement<T>, h2: &HElement<T>, h3: &HElement<T>) -> Self {
        let mut out = Self::zero();
        for (a, ca) in h1.terms() {
            for (b, cb) in h2.terms() {
                if a == b {
                    continue;
                }
                for (d, cd) in h3.terms() {
                    if let Some((sign, w)) = WedgeTriple::new(a, b, d) {
                        let c = ca.clone() * cb.clone() * cd.clone();
                        out.add_term(w, if sign < 0 { -c } else { c });
                    }
                }
            }
        }
        out
    }

    /// Coefficients of the `β_r ∧ β_s ∧ β_t` terms, i.e. the `F_3` part.
    pub fn f3_coefficients(&self) -> BTreeMap<Index3, T> {
        self.terms
            .iter()
            .filter(|(w, _)| w.beta_count() == 3)
            .map(|(w, c)| (w.indices(), c.clone()))
            .collect()
    }

    /// Applies the map induced on `∧³` by a linear map on `H` given on basis
    /// labels.
    pub fn apply_induced<F>(&self, g: usize, mut on_label: F) -> Self
    where
        F: FnMut(SymplecticLabel, usize) -> HElement<T>,
    {
        let mut out = Self::zero();
        for (w, c) in &self.terms {
            let [a, b, d] = w.labels();
            let image = Self::wedge(&on_label(a, g), &on_label(b, g), &on_label(d, g));
            out = out.add(&image.scale(c));
        }
        out
    }
}

/// `h ∧ ω` with `ω = Σ_i α_i ∧ β_i`.
pub fn wedge_with_omega<T: Ring>(h: &HElement<T>) -> LElement<T> {
    let g = h.genus();
    let mut out = LElement::zero();
    for i in 1..=g {
        let ai = HElement::basis(SymplecticLabel::alpha(i), g);
        let bi = HElement::basis(SymplecticLabel::beta(i), g);
        out = out.add(&LElement::wedge(h, &ai, &bi));
    }
    out
}

/// `∧³δ` for `δ = [[I, 0], [Q, I]]`.
pub fn delta_q_l<T: Ring>(q: &Matrix<T>, x: &LElement<T>) -> LElement<T> {
    let g = q.nrows();
    x.apply_induced(g, |label, g| delta_q_h(q, &HElement::basis(label, g)))
}

/// `(∧³δ − I)(x)`.
pub fn delta_q_minus_i_l<T: Ring>(q: &Matrix<T>, x: &LElement<T>) -> LElement<T> {
    delta_q_l(q, x).sub(x)
}

pub fn delta_g_l(ctx: &CycleBasisContext, x: &LElement<IntPolynomial>) -> LElement<IntPolynomial> {
    delta_q_l(ctx.q(), x)
}

/// `∧³δ_ℓ`.
pub fn delta_ell_l(
    ctx: &CycleBasisContext,
    ell: EdgeId,
    x: &LElement<IntPolynomial>,
) -> LElement<IntPolynomial> {
    x.apply_induced(ctx.genus(), |label, g| {
        delta_ell_h(ctx, ell, &HElement::basis(label, g))
    })
}

/// `ψ_G = (δ_G − I) ∘ Σ_e (δ_e − I)` on `L ⊗ R`.
pub fn psi_g(ctx: &CycleBasisContext, x: &LElement<IntPolynomial>) -> LElement<IntPolynomial> {
    let mut inner = LElement::zero();
    for e in ctx.graph().edge_ids() {
        inner = inner.add(&delta_ell_l(ctx, e, x).sub(x));
    }
    delta_q_minus_i_l(ctx.q(), &inner)
}

fn check_index(g: usize, idx: Index3) -> Result<(), ExtAlgError> {
    let (i, j, k) = idx;
    if [i, j, k].iter().any(|&n| n == 0 || n > g) {
        return Err(ExtAlgError::IndexOutOfRange(idx, g));
    }
    Ok(())
}

/// `F_3` coefficients of `(δ − I)(Σ b_ijk α_i ∧ β_j ∧ β_k)` in closed form:
/// `c_rst = Σ_i (b_irs q_ti − b_irt q_si + b_ist q_ri)`. Keys of `b` need
/// `j < k`; only nonzero `c` are returned.
pub fn image1_coeffs<T: Ring>(
    q: &Matrix<T>,
    b: &BTreeMap<Index3, T>,
) -> Result<BTreeMap<Index3, T>, ExtAlgError> {
    let g = q.nrows();
    for &idx in b.keys() {
        check_index(g, idx)?;
        if idx.1 >= idx.2 {
            return Err(ExtAlgError::BadOrder(idx));
        }
    }
    let coeff = |i: usize, j: usize, k: usize| b.get(&(i, j, k)).cloned().unwrap_or_else(T::zero);
    let q_at = |r: usize, s: usize| q[(r - 1, s - 1)].clone();
    let mut out = BTreeMap::new();
    for r in 1..=g {
        for s in r + 1..=g {
            for t in s + 1..=g {
                let mut c = T::zero();
                for i in 1..=g {
                    c = c + coeff(i, r, s) * q_at(t, i) - coeff(i, r, t) * q_at(s, i)
                        + coeff(i, s, t) * q_at(r, i);
                }
                if !c.is_zero() {
                    out.insert((r, s, t), c);
                }
            }
        }
    }
    Ok(out)
}

fn det3<T: Ring>(m: [[T; 3]; 3]) -> T {
    let [[a, b, c], [d, e, f], [g, h, i]] = m;
    a.clone() * (e.clone() * i.clone() - f.clone() * h.clone())
        - b.clone() * (d.clone() * i.clone() - f.clone() * g.clone())
        + c * (d * h - e * g)
}

/// `F_3` coefficients of `(δ − I)²(Σ a_ijk α_i ∧ α_j ∧ β_k)` in closed form:
/// `c_rst = 2 Σ_{i<j} det [[q_ri, q_rj, a_ijr], [q_si, q_sj, a_ijs], [q_ti, q_tj, a_ijt]]`.
/// Keys of `a` need `i < j`; only nonzero `c` are returned.
pub fn image2_coeffs<T: Ring>(
    q: &Matrix<T>,
    a: &BTreeMap<Index3, T>,
) -> Result<BTreeMap<Index3, T>, ExtAlgError> {
    let g = q.nrows();
    for &idx in a.keys() {
        check_index(g, idx)?;
        if idx.0 >= idx.1 {
            return Err(ExtAlgError::BadOrder(idx));
        }
    }
    let mut pairs: BTreeMap<(usize, usize), Vec<(usize, T)>> = BTreeMap::new();
    for (&(i, j, k), c) in a {
        if !c.is_zero() {
            pairs.entry((i, j)).or_default().push((k, c.clone()));
        }
    }
    let q_at = |r: usize, s: usize| q[(r - 1, s - 1)].clone();
    let two = T::from_i64(2);
    let mut out = BTreeMap::new();
    for r in 1..=g {
        for s in r + 1..=g {
            for t in s + 1..=g {
                let mut c = T::zero();
                for (&(i, j), ks) in &pairs {
                    let coeff = |k: usize| {
                        ks.iter()
                            .find(|(kk, _)| *kk == k)
                            .map(|(_, v)| v.clone())
                            .unwrap_or_else(T::zero)
                    };
                    c = c + det3([
                        [q_at(r, i), q_at(r, j), coeff(r)],
                        [q_at(s, i), q_at(s, j), coeff(s)],
                        [q_at(t, i), q_at(t, j), coeff(t)],
                    ]);
                }
                let c = two.clone() * c;
                if !c.is_zero() {
                    out.insert((r, s, t), c);
                }
            }
        }
    }
    Ok(out)
}

/// `Σ b_ijk α_i ∧ β_j ∧ β_k`.
pub fn alpha_beta_beta<T: Ring>(b: &BTreeMap<Index3, T>) -> LElement<T> {
    let mut out = LElement::zero();
    for (&(i, j, k), c) in b {
        out = out.add(&LElement::wedge_labels(
            c.clone(),
            SymplecticLabel::alpha(i),
            SymplecticLabel::beta(j),
            SymplecticLabel::beta(k),
        ));
    }
    out
}

/// `Σ a_ijk α_i ∧ α_j ∧ β_k`.
pub fn alpha_alpha_beta<T: Ring>(a: &BTreeMap<Index3, T>) -> LElement<T> {
    let mut out = LElement::zero();
    for (&(i, j, k), c) in a {
        out = out.add(&LElement::wedge_labels(
            c.clone(),
            SymplecticLabel::alpha(i),
            SymplecticLabel::alpha(j),
            SymplecticLabel::beta(k),
        ));
    }
    out
}

impl<T: EuclideanInt> fmt::Display for LElement<Polynomial<T>> {
    /// Terms in basis order as `±p·a1^a2^b3`; a coefficient with several
    /// monomials is parenthesized.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (w, c)) in self.terms.iter().enumerate() {
            let negate = c.num_terms() == 1 && c.terms().next().is_some_and(|(_, k)| k.is_negative());
            let shown = if negate { -c.clone() } else { c.clone() };
            match (n, negate) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if shown.is_one() {
                write!(f, "{w}")?;
            } else if shown.num_terms() == 1 {
                write!(f, "{shown}·{w}")?;
            } else {
                write!(f, "({shown})·{w}")?;
            }
        }
        Ok(())
    }
}

impl<T: EuclideanInt + FromStr> FromStr for LElement<Polynomial<T>> {
    type Err = ExtAlgError;

    /// Parses the `Display` rendering; triples may be unsorted.
    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let fail = |reason: &str| ExtAlgError::Parse {
            input: input.to_string(),
            reason: reason.to_string(),
        };
        let compact: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if compact == "0" {
            return Ok(Self::zero());
        }
        // Split on signs outside parentheses and not inside a monomial power.
        let mut chunks: Vec<(bool, String)> = Vec::new();
        let mut current = String::new();
        let mut negative = false;
        let mut depth = 0i32;
        for ch in compact.chars() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                _ => {}
            }
            let splits = depth == 0 && (ch == '+' || ch == '-') && !current.ends_with('^') && !current.ends_with('*');
            if splits {
                if !current.is_empty() {
                    chunks.push((negative, std::mem::take(&mut current)));
                } else if !chunks.is_empty() {
                    return Err(fail("dangling sign"));
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

        let mut out = Self::zero();
        for (negative, chunk) in chunks {
            let (coeff, triple) = match chunk.rsplit_once('·') {
                Some((c, t)) => {
                    let c = c.strip_prefix('(').and_then(|c| c.strip_suffix(')')).unwrap_or(c);
                    let p: Polynomial<T> = c.parse().map_err(|_| fail("bad coefficient"))?;
                    (p, t)
                }
                None => (Polynomial::one(), chunk.as_str()),
            };
            let labels: Vec<SymplecticLabel> = triple
                .split('^')
                .map(str::parse)
                .collect::<Result<_, _>>()?;
            let [a, b, d] = labels[..] else {
                return Err(fail("expected three wedge factors"));
            };
            let coeff = if negative { -coeff } else { coeff };
            out = out.add(&LElement::wedge_labels(coeff, a, b, d));
        }
        Ok(out)
    }
}

/// Integer coefficients of an `F_3` class, as used by the lattice tests.
pub type IntF3 = BTreeMap<Index3, BigInt>;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::specialize_q;
    use crate::graph::TropicalCurve;

    fn a(i: usize) -> SymplecticLabel {
        SymplecticLabel::alpha(i)
    }

    fn b(i: usize) -> SymplecticLabel {
        SymplecticLabel::beta(i)
    }

    fn p(s: &str) -> IntPolynomial {
        s.parse().unwrap()
    }

    fn h(label: SymplecticLabel, g: usize) -> HElement<IntPolynomial> {
        HElement::basis(label, g)
    }

    #[test]
    fn pairing_values() {
        assert_eq!(pairing(a(1), b(1)), 1);
        assert_eq!(pairing(a(1), a(2)), 0);
        assert_eq!(pairing(b(1), a(1)), -1);
        assert_eq!(pairing(a(1), b(2)), 0);
    }

    #[test]
    fn delta_ell_on_h() {
        let ctx = fixtures::k4_context();
        let image = delta_ell_h(&ctx, EdgeId(1), &h(a(1), 3));
        let mut expected = h(a(1), 3);
        expected.beta[0] = p("x1");
        assert_eq!(image, expected);
        for ell in ctx.graph().edge_ids() {
            for j in 1..=3 {
                assert_eq!(delta_ell_h(&ctx, ell, &h(b(j), 3)), h(b(j), 3));
            }
        }
        let x = h(a(2), 3).add(&h(b(3), 3).scale(&p("x4")));
        assert_eq!(delta_ell_h(&ctx, EdgeId(6), &delta_ell_h_inv(&ctx, EdgeId(6), &x)), x);
    }

    #[test]
    fn delta_g_on_h() {
        let ctx = fixtures::k4_context();
        let image = delta_g_h(&ctx, &h(a(1), 3));
        let expected = HElement {
            alpha: vec![p("1"), p("0"), p("0")],
            beta: vec![p("x1 + x5 + x6"), p("-x6"), p("-x5")],
        };
        assert_eq!(image, expected);
        assert_eq!(delta_g_h(&ctx, &h(b(2), 3)), h(b(2), 3));
        let x = h(a(1), 3).scale(&p("x2")).add(&h(a(3), 3)).add(&h(b(1), 3));
        let once = delta_q_minus_i_h(ctx.q(), &x);
        assert!(delta_q_minus_i_h(ctx.q(), &once).is_zero());
    }

    #[test]
    fn product_of_deltas_is_sum() {
        let ctx = fixtures::k4_context();
        let x = h(a(1), 3);
        let ones: BTreeMap<EdgeId, i64> = ctx.graph().edge_ids().map(|e| (e, 1)).collect();
        assert!(delta_minus_i_sum_check(&ctx, &ones, &x).is_zero());
        let mixed = BTreeMap::from([(EdgeId(1), -2), (EdgeId(4), 3), (EdgeId(6), -1)]);
        assert!(delta_minus_i_sum_check(&ctx, &mixed, &h(a(3), 3)).is_zero());
        assert!(delta_minus_i_sum_check(&ctx, &BTreeMap::new(), &x).is_zero());
        // With every exponent 1 the sum is δ_G − I.
        let sum_form = delta_g_h(&ctx, &x).sub(&x);
        let mut product = x.clone();
        for e in ctx.graph().edge_ids() {
            product = delta_ell_h(&ctx, e, &product);
        }
        assert_eq!(product.sub(&x), sum_form);
    }

    #[test]
    fn wedge_sorting_and_omega() {
        assert_eq!(WedgeTriple::new(b(1), a(2), b(2)).unwrap().0, -1);
        assert!(WedgeTriple::new(a(1), a(1), b(2)).is_none());
        let omega_a1 = wedge_with_omega(&HElement::<IntPolynomial>::basis(a(1), 2));
        assert_eq!(omega_a1, LElement::wedge_labels(p("1"), a(1), a(2), b(2)));
        let omega_b1 = wedge_with_omega(&HElement::<IntPolynomial>::basis(b(1), 2));
        assert_eq!(omega_b1, LElement::wedge_labels(p("-1"), a(2), b(1), b(2)));
        assert!(wedge_with_omega(&HElement::<IntPolynomial>::zero(2)).is_zero());
    }

    #[test]
    fn delta_g_on_l_formulas() {
        let ctx = fixtures::l3_context();
        let q = ctx.q();
        let g = 4;
        let qa = |i: usize| delta_q_minus_i_h(q, &h(a(i), g));
        let x = LElement::wedge_labels(p("1"), a(2), b(1), b(3));
        assert_eq!(
            delta_q_minus_i_l(q, &x),
            LElement::wedge(&qa(2), &h(b(1), g), &h(b(3), g))
        );
        let bbb = LElement::wedge_labels(p("1"), b(1), b(2), b(4));
        assert!(delta_q_minus_i_l(q, &bbb).is_zero());
        let aab = LElement::wedge_labels(p("1"), a(1), a(3), b(2));
        let twice = delta_q_minus_i_l(q, &delta_q_minus_i_l(q, &aab));
        let expected = LElement::wedge(&qa(1), &qa(3), &h(b(2), g)).scale(&p("2"));
        assert_eq!(twice, expected);
    }

    #[test]
    fn image1_on_shipped_cocycles() {
        let k4 = fixtures::k4_context();
        let v = crate::ceresa::v_tau_k4();
        let c = image1_coeffs(k4.q(), v.b()).unwrap();
        assert_eq!(c, BTreeMap::from([((1, 2, 3), p("-2*x2*x5"))]));
        let direct = delta_q_minus_i_l(k4.q(), &alpha_beta_beta(v.b())).f3_coefficients();
        assert_eq!(direct, c);

        let l3 = fixtures::l3_context();
        let v = crate::ceresa::v_tau_l3();
        let c = image1_coeffs(l3.q(), v.b()).unwrap();
        assert_eq!(
            c,
            BTreeMap::from([((1, 2, 3), p("-2*x5*x6")), ((1, 2, 4), p("-2*x5*x6"))])
        );
        assert!(image1_coeffs(l3.q(), &BTreeMap::new()).unwrap().is_empty());
    }

    #[test]
    fn image_index_validation() {
        let q = fixtures::k4_context().q().clone();
        let bad = BTreeMap::from([((1, 3, 2), p("x1"))]);
        assert_eq!(image1_coeffs(&q, &bad), Err(ExtAlgError::BadOrder((1, 3, 2))));
        let out = BTreeMap::from([((1, 2, 4), p("x1"))]);
        assert!(matches!(image2_coeffs(&q, &out), Err(ExtAlgError::IndexOutOfRange(..))));
    }

    #[test]
    fn image2_matches_direct_on_k4_units() {
        let ctx = fixtures::k4_context();
        let q = specialize_q(&ctx, &TropicalCurve::all_ones(fixtures::k4())).unwrap();
        for (i, j) in [(1, 2), (1, 3), (2, 3)] {
            for k in 1..=3 {
                let a = BTreeMap::from([((i, j, k), BigInt::from(1))]);
                let closed = image2_coeffs(&q, &a).unwrap();
                let x = alpha_alpha_beta(&a);
                let direct = delta_q_minus_i_l(&q, &delta_q_minus_i_l(&q, &x)).f3_coefficients();
                assert_eq!(closed, direct);
                assert!(closed.values().all(|c| c % 2 == BigInt::from(0)));
            }
        }
    }

    #[test]
    fn psi_case_formulas() {
        let ctx = fixtures::k4_context();
        let q = ctx.q();
        let g = 3;
        let qa = |i: usize| delta_q_minus_i_h(q, &h(a(i), g));
        let bbb = LElement::wedge_labels(p("1"), b(1), b(2), b(3));
        assert!(psi_g(&ctx, &bbb).is_zero());
        let abb = LElement::wedge_labels(p("1"), a(1), b(2), b(3));
        assert!(psi_g(&ctx, &abb).is_zero());
        let aab = LElement::wedge_labels(p("1"), a(1), a(2), b(3));
        let expected = LElement::wedge(&qa(1), &qa(2), &h(b(3), g)).scale(&p("2"));
        assert_eq!(psi_g(&ctx, &aab), expected);
        assert_eq!(psi_g(&ctx, &aab), delta_q_minus_i_l(q, &delta_q_minus_i_l(q, &aab)));

        let aaa = LElement::wedge_labels(p("1"), a(1), a(2), a(3));
        let cubic = LElement::wedge(&qa(1), &qa(2), &qa(3)).scale(&p("3"));
        let f3 = psi_g(&ctx, &aaa).f3_coefficients();
        assert_eq!(f3[&(1, 2, 3)], cubic.f3_coefficients()[&(1, 2, 3)]);
    }

    #[test]
    fn rendering_round_trip() {
        let x = LElement::wedge_labels(p("x2"), a(1), b(1), b(2))
            .add(&LElement::wedge_labels(p("-x5"), a(2), b(1), b(2)))
            .add(&LElement::wedge_labels(p("x1 + x3"), a(2), b(2), b(3)))
            .add(&LElement::wedge_labels(p("1"), b(1), b(2), b(3)));
        let text = x.to_string();
        assert_eq!(text, "x2·a1^b1^b2 - x5·a2^b1^b2 + (x1 + x3)·a2^b2^b3 + b1^b2^b3");
        assert_eq!(text.parse::<LElement<IntPolynomial>>().unwrap(), x);
        let swapped: LElement<IntPolynomial> = "-2*x2*x5·b2^b1^b3".parse().unwrap();
        assert_eq!(swapped, LElement::wedge_labels(p("2*x2*x5"), b(1), b(2), b(3)));
        assert!("a1^b2".parse::<LElement<IntPolynomial>>().is_err());
        assert_eq!("0".parse::<LElement<IntPolynomial>>().unwrap(), LElement::zero());
    }
}
