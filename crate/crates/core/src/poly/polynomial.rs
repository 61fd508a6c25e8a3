use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::monomial::{Monomial, MonomialOrder};
use crate::error::{Error, Result};

pub type Coeff = BigRational;

/// Sparse polynomial with exact rational coefficients.
///
/// Terms are kept sorted in descending order under `order` with no zero
/// coefficients, so the leading term is always `terms[0]`.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    nvars: usize,
    order: MonomialOrder,
    terms: Vec<(Monomial, Coeff)>,
}

impl Polynomial {
    pub fn zero(nvars: usize, order: MonomialOrder) -> Self {
        Polynomial {
            nvars,
            order,
            terms: Vec::new(),
        }
    }

    pub fn constant(nvars: usize, order: MonomialOrder, c: Coeff) -> Self {
        let mut p = Self::zero(nvars, order);
        if !c.is_zero() {
            p.terms.push((Monomial::one(nvars), c));
        }
        p
    }

    pub fn one(nvars: usize, order: MonomialOrder) -> Self {
        Self::constant(nvars, order, Coeff::one())
    }

    /// The variable `z_{var+1}` (0-based index).
    pub fn var(nvars: usize, order: MonomialOrder, var: usize) -> Self {
        Self::term(Monomial::var(nvars, var, 1), Coeff::one(), order)
    }

    pub fn term(m: Monomial, c: Coeff, order: MonomialOrder) -> Self {
        let mut p = Self::zero(m.nvars(), order);
        if !c.is_zero() {
            p.terms.push((m, c));
        }
        p
    }

    /// Builds a polynomial from arbitrary terms, combining repeats and dropping zeros.
    pub fn from_terms(
        nvars: usize,
        order: MonomialOrder,
        terms: impl IntoIterator<Item = (Monomial, Coeff)>,
    ) -> Self {
        let mut terms: Vec<(Monomial, Coeff)> = terms.into_iter().collect();
        debug_assert!(terms.iter().all(|(m, _)| m.nvars() == nvars));
        terms.sort_by(|(a, _), (b, _)| order.compare(b, a));
        let mut out: Vec<(Monomial, Coeff)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc += c,
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        Polynomial {
            nvars,
            order,
            terms: out,
        }
    }

    /// Integer-coefficient convenience constructor: `(coefficient, exponents)`.
    pub fn from_int_terms(nvars: usize, order: MonomialOrder, terms: &[(i64, &[u16])]) -> Self {
        Self::from_terms(
            nvars,
            order,
            terms.iter().map(|(c, e)| {
                assert_eq!(e.len(), nvars);
                (Monomial::new(e.to_vec()), Coeff::from_integer(BigInt::from(*c)))
            }),
        )
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn terms(&self) -> &[(Monomial, Coeff)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Nonzero constant.
    pub fn is_constant(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one()
    }

    pub fn is_one(&self) -> bool {
        self.is_constant() && self.terms[0].1.is_one()
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.first().map(|(m, _)| m)
    }

    pub fn leading_coefficient(&self) -> Option<&Coeff> {
        self.terms.first().map(|(_, c)| c)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Coeff)> {
        self.terms.first().map(|(m, c)| (m, c))
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.degree()).max().unwrap_or(0)
    }

    pub fn constant_term(&self) -> Coeff {
        match self.terms.last() {
            Some((m, c)) if m.is_one() => c.clone(),
            _ => Coeff::zero(),
        }
    }

    /// Indices of the variables that occur.
    pub fn variables(&self) -> Vec<usize> {
        (0..self.nvars)
            .filter(|&i| self.terms.iter().any(|(m, _)| m.exponents()[i] > 0))
            .collect()
    }

    pub fn with_order(&self, order: MonomialOrder) -> Self {
        if order == self.order {
            return self.clone();
        }
        Self::from_terms(self.nvars, order, self.terms.iter().cloned())
    }

    pub(crate) fn check_compatible(&self, other: &Polynomial) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch(self.nvars, other.nvars));
        }
        Ok(())
    }

    /// Scales so the leading coefficient is 1.
    pub fn monic(&self) -> Self {
        match self.leading_coefficient() {
            None => self.clone(),
            Some(lc) if lc.is_one() => self.clone(),
            Some(lc) => {
                let inv = lc.recip();
                self.scale(&inv)
            }
        }
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars, self.order);
        }
        Polynomial {
            nvars: self.nvars,
            order: self.order,
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Polynomial {
            nvars: self.nvars,
            order: self.order,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn add(&self, other: &Polynomial) -> Self {
        self.combine(other, &Coeff::one(), &Monomial::one(self.nvars), 0)
    }

    pub fn sub(&self, other: &Polynomial) -> Self {
        self.combine(other, &-Coeff::one(), &Monomial::one(self.nvars), 0)
    }

    /// `self - c * m * other`.
    pub fn sub_scaled(&self, c: &Coeff, m: &Monomial, other: &Polynomial) -> Self {
        self.combine(other, &-c, m, 0)
    }

    pub fn add_constant(&self, c: &Coeff) -> Self {
        self.add(&Self::constant(self.nvars, self.order, c.clone()))
    }

    pub fn mul(&self, other: &Polynomial) -> Self {
        let mut acc = Self::zero(self.nvars, self.order);
        for (m, c) in &other.terms {
            acc = acc.combine(self, c, m, 0);
        }
        acc
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nvars, self.order);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `self[skip_self..] + c * m * other[skip_other..]`, merged in order.
    pub(crate) fn combine(
        &self,
        other: &Polynomial,
        c: &Coeff,
        m: &Monomial,
        skip_other: usize,
    ) -> Self {
        let converted;
        let other = if other.order == self.order {
            other
        } else {
            converted = other.with_order(self.order);
            &converted
        };
        merge_scaled(&self.terms, &other.terms[skip_other.min(other.terms.len())..], c, m, self.order)
            .into_polynomial(self.nvars, self.order)
    }

    pub fn evaluate(&self, point: &[i64]) -> Coeff {
        let mut acc = Coeff::zero();
        for (m, c) in &self.terms {
            let mut v = BigInt::one();
            for (&e, &x) in m.exponents().iter().zip(point) {
                for _ in 0..e {
                    v *= x;
                }
            }
            acc += c * Coeff::from_integer(v);
        }
        acc
    }

    /// Renames variables: variable `i` becomes `map(i)` in a ring of `nvars` variables.
    pub fn relabel(&self, nvars: usize, map: impl Fn(usize) -> usize) -> Self {
        Self::from_terms(
            nvars,
            self.order,
            self.terms.iter().map(|(m, c)| {
                let mut e = vec![0u16; nvars];
                for (i, &x) in m.exponents().iter().enumerate() {
                    if x > 0 {
                        e[map(i)] += x;
                    }
                }
                (Monomial::new(e), c.clone())
            }),
        )
    }

    pub(crate) fn from_sorted(nvars: usize, order: MonomialOrder, terms: Vec<(Monomial, Coeff)>) -> Self {
        Polynomial { nvars, order, terms }
    }

}

pub(crate) struct Merged(pub(crate) Vec<(Monomial, Coeff)>);

impl Merged {
    fn into_polynomial(self, nvars: usize, order: MonomialOrder) -> Polynomial {
        Polynomial::from_sorted(nvars, order, self.0)
    }
}

/// Merges `a + c * m * b` where both inputs are sorted descending.
pub(crate) fn merge_scaled(
    a: &[(Monomial, Coeff)],
    b: &[(Monomial, Coeff)],
    c: &Coeff,
    m: &Monomial,
    order: MonomialOrder,
) -> Merged {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut i = 0;
    let mut j = 0;
    let unit = m.is_one();
    let next_b = |j: usize| -> Monomial {
        if unit {
            b[j].0.clone()
        } else {
            b[j].0.mul(m)
        }
    };
    let mut pending: Option<Monomial> = if b.is_empty() { None } else { Some(next_b(0)) };
    while i < a.len() || j < b.len() {
        let ord = match (&pending, a.get(i)) {
            (None, _) => Ordering::Less,
            (Some(_), None) => Ordering::Greater,
            (Some(bm), Some((am, _))) => order.compare(bm, am),
        };
        match ord {
            Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Greater => {
                let bm = pending.take().unwrap();
                out.push((bm, &b[j].1 * c));
                j += 1;
                pending = if j < b.len() { Some(next_b(j)) } else { None };
            }
            Ordering::Equal => {
                let bm = pending.take().unwrap();
                let sum = &a[i].1 + &b[j].1 * c;
                if !sum.is_zero() {
                    out.push((bm, sum));
                }
                i += 1;
                j += 1;
                pending = if j < b.len() { Some(next_b(j)) } else { None };
            }
        }
    }
    Merged(out)
}

fn write_coeff_magnitude(f: &mut fmt::Formatter<'_>, c: &Coeff) -> fmt::Result {
    if c.is_integer() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Polynomial {
    /// Descending terms, e.g. `z5^2 + z5*z6 + z6^2 - 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            match (idx, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mag = c.abs();
            if m.is_one() {
                write_coeff_magnitude(f, &mag)?;
            } else {
                if !mag.is_one() {
                    write_coeff_magnitude(f, &mag)?;
                    f.write_str("*")?;
                }
                write!(f, "{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Parses the textual rendering produced by `Display` (and slightly looser
/// input: optional spaces, `*` between every factor, rational coefficients).
pub fn parse_polynomial(text: &str, nvars: usize, order: MonomialOrder) -> Result<Polynomial> {
    let err = |msg: String| Error::parse(0, format!("polynomial {text:?}: {msg}"));
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(err("empty".into()));
    }
    let mut terms = Vec::new();
    let mut rest = compact.as_str();
    while !rest.is_empty() {
        let (sign, body_start) = match rest.as_bytes()[0] {
            b'+' => (1, 1),
            b'-' => (-1, 1),
            _ if terms.is_empty() => (1, 0),
            _ => return Err(err("expected + or -".into())),
        };
        let body_rest = &rest[body_start..];
        let end = body_rest
            .find(['+', '-'])
            .unwrap_or(body_rest.len());
        let body = &body_rest[..end];
        if body.is_empty() {
            return Err(err("empty term".into()));
        }
        let mut coeff = Coeff::from_integer(BigInt::from(sign));
        let mut exps = vec![0u16; nvars];
        for factor in body.split('*') {
            if let Some(v) = factor.strip_prefix('z') {
                let (idx, pow) = match v.split_once('^') {
                    Some((i, p)) => (i, p.parse::<u16>().map_err(|_| err(format!("bad power in {factor}")))?),
                    None => (v, 1),
                };
                let idx: usize = idx.parse().map_err(|_| err(format!("bad variable {factor}")))?;
                if idx == 0 || idx > nvars {
                    return Err(err(format!("variable {factor} outside z1..z{nvars}")));
                }
                exps[idx - 1] += pow;
            } else {
                let value = match factor.split_once('/') {
                    Some((n, d)) => {
                        let n: BigInt = n.parse().map_err(|_| err(format!("bad number {factor}")))?;
                        let d: BigInt = d.parse().map_err(|_| err(format!("bad number {factor}")))?;
                        if d.is_zero() {
                            return Err(err("zero denominator".into()));
                        }
                        Coeff::new(n, d)
                    }
                    None => Coeff::from_integer(
                        factor.parse::<BigInt>().map_err(|_| err(format!("bad factor {factor}")))?,
                    ),
                };
                coeff *= value;
            }
        }
        terms.push((Monomial::new(exps), coeff));
        rest = &body_rest[end..];
    }
    Ok(Polynomial::from_terms(nvars, order, terms))
}
