//! Groebner bases over the prime field `F_p`, `p = 2^31 - 1`.
//!
//! Used as a fast screen: every rational root of an integer system is also
//! a root of its reduction mod `p`, so a modular basis never rules out a
//! genuine root.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::groebner::{pair_loop, replay_reaches_constant, BuchbergerStats, GbElement, Step};
use super::monomial::{Monomial, MonomialOrder};
use super::polynomial::{Coeff, Polynomial};
use super::reduction::{remainder, Field};

pub const PRIME: u64 = 2_147_483_647;

fn mul(a: u64, b: u64) -> u64 {
    a * b % PRIME
}

fn add(a: u64, b: u64) -> u64 {
    (a + b) % PRIME
}

fn neg(a: u64) -> u64 {
    (PRIME - a) % PRIME
}

fn inv(a: u64) -> u64 {
    let (mut base, mut e, mut acc) = (a, PRIME - 2, 1);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(acc, base);
        }
        base = mul(base, base);
        e >>= 1;
    }
    acc
}

fn residue(n: &BigInt) -> u64 {
    n.mod_floor(&BigInt::from(PRIME)).to_u64().expect("reduced residue")
}

fn coeff_residue(c: &Coeff) -> Option<u64> {
    let d = residue(c.denom());
    (d != 0).then(|| mul(residue(c.numer()), inv(d)))
}

/// Sparse polynomial over `F_p`, terms sorted descending with the leading term first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModPoly {
    order: MonomialOrder,
    terms: Vec<(Monomial, u64)>,
}

impl ModPoly {
    /// Reduction of a rational polynomial; `None` when a denominator vanishes mod `p`.
    pub fn from_polynomial(p: &Polynomial, order: MonomialOrder) -> Option<Self> {
        let mut terms = Vec::with_capacity(p.len());
        for (m, c) in p.with_order(order).terms() {
            let r = coeff_residue(c)?;
            if r != 0 {
                terms.push((m.clone(), r));
            }
        }
        Some(ModPoly { order, terms })
    }

    pub fn terms(&self) -> &[(Monomial, u64)] {
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

    /// Indices of the variables that occur.
    pub fn variables(&self) -> Vec<usize> {
        let nvars = self.terms.first().map_or(0, |(m, _)| m.nvars());
        (0..nvars)
            .filter(|&i| self.terms.iter().any(|(m, _)| m.exponents()[i] > 0))
            .collect()
    }

    /// Value at a point of `{-1, 0, 1}^n` is zero mod `p`.
    pub fn vanishes_at(&self, z: &[i8]) -> bool {
        let mut acc = 0;
        for (m, c) in &self.terms {
            let mut sign = 1i8;
            for (v, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match z[v] {
                    0 => {
                        sign = 0;
                        break;
                    }
                    -1 if e % 2 == 1 => sign = -sign,
                    _ => {}
                }
            }
            acc = match sign {
                1 => add(acc, *c),
                -1 => add(acc, neg(*c)),
                _ => acc,
            };
        }
        acc == 0
    }

    fn scale_shift(&self, c: u64, m: &Monomial) -> impl Iterator<Item = (Monomial, u64)> + '_ {
        let m = m.clone();
        self.terms.iter().map(move |(t, x)| (t.mul(&m), mul(*x, c)))
    }
}

/// `a + c * m * b`, both sorted descending.
fn merge(a: &[(Monomial, u64)], b: &[(Monomial, u64)], c: u64, m: &Monomial, order: MonomialOrder) -> Vec<(Monomial, u64)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut i = 0;
    let mut bs = b.iter().map(|(t, x)| (t.mul(m), mul(*x, c))).peekable();
    while i < a.len() || bs.peek().is_some() {
        let ord = match (bs.peek(), a.get(i)) {
            (None, _) => Ordering::Less,
            (Some(_), None) => Ordering::Greater,
            (Some((bm, _)), Some((am, _))) => order.compare(bm, am),
        };
        match ord {
            Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Greater => out.push(bs.next().expect("peeked")),
            Ordering::Equal => {
                let (bm, bx) = bs.next().expect("peeked");
                let s = add(a[i].1, bx);
                if s != 0 {
                    out.push((bm, s));
                }
                i += 1;
            }
        }
    }
    out
}

impl GbElement for ModPoly {
    fn lm(&self) -> &Monomial {
        &self.terms[0].0
    }

    fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.degree()).max().unwrap_or(0)
    }

    fn is_zero(&self) -> bool {
        ModPoly::is_zero(self)
    }

    fn is_constant(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one()
    }

    fn monic(&self) -> Self {
        let c = inv(self.terms[0].1);
        ModPoly {
            order: self.order,
            terms: self.terms.iter().map(|(m, x)| (m.clone(), mul(*x, c))).collect(),
        }
    }

    fn s_poly(&self, other: &Self) -> Self {
        let (pm, pc) = &self.terms[0];
        let (qm, qc) = &other.terms[0];
        let lcm = pm.lcm(qm);
        let left: Vec<_> = self.scale_shift(inv(*pc), &lcm.div(pm)).skip(1).collect();
        let terms = merge(&left, &other.terms[1..], neg(inv(*qc)), &lcm.div(qm), self.order);
        ModPoly { order: self.order, terms }
    }

    fn remainder(&self, basis: &[Self], used: Option<&mut [bool]>) -> Self {
        let lists: Vec<&[(Monomial, u64)]> = basis.iter().map(|d| d.terms.as_slice()).collect();
        ModPoly {
            order: self.order,
            terms: remainder(&self.terms, &lists, self.order, used),
        }
    }
}

// residues in `0..PRIME`
impl Field for u64 {
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn mul(&self, other: &Self) -> Self {
        mul(*self, *other)
    }
    fn add_assign(&mut self, other: Self) {
        *self = add(*self, other);
    }
    fn neg(&self) -> Self {
        neg(*self)
    }
    fn inv(&self) -> Self {
        inv(*self)
    }
}

/// Reduced Groebner basis over `F_p` of the reductions of `input`.
///
/// `None` when some denominator vanishes mod `p`. A unit ideal yields the
/// single constant `1`.
pub fn modular_groebner(input: &[Polynomial], order: MonomialOrder) -> Option<(Vec<ModPoly>, BuchbergerStats)> {
    modular_groebner_traced(input, order).map(|(g, stats, _)| (g, stats))
}

/// How the constant of a unit modular basis was derived, replayable over `Q`.
#[derive(Clone, Debug)]
pub struct UnitDerivation {
    order: MonomialOrder,
    sources: Vec<usize>,
    steps: Vec<Step>,
}

impl UnitDerivation {
    /// Number of S-polynomial steps recorded.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Replays the derivation with exact arithmetic on `input` (the system
    /// the derivation was computed from). True proves that the rational
    /// ideal of `input` is the unit ideal; false proves nothing.
    pub fn certifies_unit(&self, input: &[Polynomial]) -> bool {
        let base: Option<Vec<Polynomial>> = self
            .sources
            .iter()
            .map(|&k| input.get(k).map(|p| p.with_order(self.order)))
            .collect();
        base.is_some_and(|b| replay_reaches_constant(&b, &self.steps))
    }
}

/// [`modular_groebner`] plus, for a unit ideal reached by the pair loop,
/// the derivation of its constant.
pub fn modular_groebner_traced(
    input: &[Polynomial],
    order: MonomialOrder,
) -> Option<(Vec<ModPoly>, BuchbergerStats, Option<UnitDerivation>)> {
    let mut basis = Vec::with_capacity(input.len());
    let mut sources = Vec::with_capacity(input.len());
    for (k, p) in input.iter().enumerate() {
        let m = ModPoly::from_polynomial(p, order)?;
        if !m.is_zero() {
            basis.push(m);
            sources.push(k);
        }
    }
    let mut stats = BuchbergerStats::default();
    if basis.is_empty() {
        return Some((basis, stats, None));
    }
    if basis.iter().any(GbElement::is_constant) {
        stats.basis_size = basis.len();
        let nvars = basis[0].lm().nvars();
        return Some((vec![unit(nvars, order)], stats, None));
    }
    let (g, stats, steps) = pair_loop(basis, order, stats);
    let derivation = g
        .last()
        .filter(|p| p.is_constant())
        .map(|_| UnitDerivation { order, sources, steps });
    Some((interreduce(g, order), stats, derivation))
}

fn unit(nvars: usize, order: MonomialOrder) -> ModPoly {
    ModPoly {
        order,
        terms: vec![(Monomial::one(nvars), 1)],
    }
}

fn interreduce(basis: Vec<ModPoly>, order: MonomialOrder) -> Vec<ModPoly> {
    let mut g: Vec<ModPoly> = basis.iter().map(GbElement::monic).collect();
    if g.iter().any(GbElement::is_constant) {
        return vec![unit(g[0].lm().nvars(), order)];
    }
    // drop elements whose leading monomial is a multiple of another's
    let mut keep = Vec::new();
    for (i, p) in g.iter().enumerate() {
        let redundant = g.iter().enumerate().any(|(j, q)| {
            j != i && q.lm().divides(p.lm()) && (q.lm() != p.lm() || j < i)
        });
        if !redundant {
            keep.push(p.clone());
        }
    }
    g = keep;
    for i in 0..g.len() {
        let current = g[i].clone();
        let others: Vec<ModPoly> = g.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, p)| p.clone()).collect();
        let head = current.terms[0].clone();
        let tail = ModPoly {
            order,
            terms: current.terms[1..].to_vec(),
        };
        let mut terms = vec![head];
        if !others.is_empty() {
            terms.extend(tail.remainder(&others, None).terms);
        } else {
            terms.extend(tail.terms);
        }
        g[i] = ModPoly { order, terms };
    }
    g.sort_by(|a, b| order.compare(a.lm(), b.lm()));
    g
}

pub fn is_unit_mod(basis: &[ModPoly]) -> bool {
    basis.len() == 1 && basis[0].is_constant()
}


#[cfg(test)]
mod replay_tests {
    use super::*;
    use crate::poly::parse_polynomial;

    #[test]
    fn replay_refuses_non_unit_systems() {
        let unit_input: Vec<Polynomial> = ["z1*z2 - 1", "z2^2 - z1", "z1^2 - 2*z2"]
            .iter()
            .map(|t| parse_polynomial(t, 2, MonomialOrder::Lex).unwrap())
            .collect();
        let (g, _, d) = modular_groebner_traced(&unit_input, MonomialOrder::Lex).unwrap();
        assert!(is_unit_mod(&g));
        let d = d.unwrap();
        assert!(d.certifies_unit(&unit_input));
        // same derivation applied to a system with a common root never yields a constant
        let other: Vec<Polynomial> = ["z1*z2 - 1", "z2^2 - z1", "z1^2 - z2"]
            .iter()
            .map(|t| parse_polynomial(t, 2, MonomialOrder::Lex).unwrap())
            .collect();
        assert!(!d.certifies_unit(&other));
    }
}
