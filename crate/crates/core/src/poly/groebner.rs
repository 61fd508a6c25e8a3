//! Multivariate division, S-polynomials, Buchberger's algorithm and
//! reduction of Groebner bases.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use num_traits::One;

use super::monomial::{Monomial, MonomialOrder};
use super::polynomial::{Coeff, Polynomial};
use super::reduction::{remainder, Field};
use crate::error::{Error, Result};

/// Multivariate long division of `f` by the ordered list `divisors`.
///
/// Returns the remainder: no monomial of it is divisible by any leading
/// monomial of the list, and `f - remainder` lies in the ideal they generate.
/// At each step the first divisor (by list position) whose leading monomial
/// divides the current leading monomial is used.
pub fn reduce(f: &Polynomial, list: &[Polynomial]) -> Result<Polynomial> {
    if list.is_empty() {
        return Err(Error::MalformedModel("empty divisor list".into()));
    }
    let order = f.order();
    let mut converted = Vec::with_capacity(list.len());
    for p in list {
        f.check_compatible(p)?;
        if p.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        converted.push(if p.order() == order {
            std::borrow::Cow::Borrowed(p)
        } else {
            std::borrow::Cow::Owned(p.with_order(order))
        });
    }
    let lists: Vec<&[(Monomial, Coeff)]> = converted.iter().map(|p| p.terms()).collect();
    let rem = remainder(f.terms(), &lists, order, None);
    Ok(Polynomial::from_sorted(f.nvars(), order, rem))
}

impl Field for Coeff {
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn add_assign(&mut self, other: Self) {
        *self += other;
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Self {
        self.recip()
    }
}

/// `lcm * (p / LT(p) - q / LT(q))`.
pub fn s_polynomial(p: &Polynomial, q: &Polynomial) -> Result<Polynomial> {
    p.check_compatible(q)?;
    let (pm, pc) = p.leading_term().ok_or(Error::ZeroPolynomial)?;
    let (qm, qc) = q.leading_term().ok_or(Error::ZeroPolynomial)?;
    let lcm = pm.lcm(qm);
    let left = p.scale(&pc.recip());
    let zero = Polynomial::zero(p.nvars(), p.order());
    let left = zero.combine(&left, &Coeff::one(), &lcm.div(pm), 1);
    let q = q.with_order(p.order());
    Ok(left.combine(&q, &-qc.recip(), &lcm.div(qm), 1))
}

struct Pair {
    order: MonomialOrder,
    sugar: u32,
    lcm: Monomial,
    i: usize,
    j: usize,
}

impl PartialEq for Pair {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Pair {}

impl PartialOrd for Pair {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Pair {
    // BinaryHeap is a max-heap: the smallest sugar, then smallest lcm, then
    // oldest pair must compare greatest.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .sugar
            .cmp(&self.sugar)
            .then_with(|| self.order.compare(&other.lcm, &self.lcm))
            .then_with(|| (other.j, other.i).cmp(&(self.j, self.i)))
    }
}

/// Counters reported by [`buchberger_with_stats`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BuchbergerStats {
    pub pairs_considered: usize,
    pub pairs_reduced: usize,
    pub skipped_coprime: usize,
    pub skipped_chain: usize,
    pub basis_size: usize,
}

/// Buchberger's algorithm under `order`.
///
/// Pairs are processed by smallest sugar degree, ties broken by smallest
/// lcm. A pair is skipped when the leading monomials are coprime, or when some third element's leading
/// monomial divides the lcm and both of its pairs with the current pair's
/// members have already been handled. Returns early with the partial basis
/// plus the constant as soon as a nonzero constant appears, since that
/// basis already generates the unit ideal.
pub fn buchberger(input: &[Polynomial], order: MonomialOrder) -> Result<Vec<Polynomial>> {
    buchberger_with_stats(input, order).map(|(g, _)| g)
}

pub fn buchberger_with_stats(
    input: &[Polynomial],
    order: MonomialOrder,
) -> Result<(Vec<Polynomial>, BuchbergerStats)> {
    let first = input.first().ok_or(Error::EmptySet)?;
    let mut basis: Vec<Polynomial> = Vec::with_capacity(input.len());
    for p in input {
        first.check_compatible(p)?;
        if p.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        basis.push(p.with_order(order));
    }
    let mut stats = BuchbergerStats::default();
    if let Some(c) = basis.iter().find(|p| p.is_constant()) {
        let c = c.clone();
        stats.basis_size = basis.len();
        return Ok((vec![c], stats));
    }

    let (g, stats, _) = pair_loop(basis, order, stats);
    Ok((g, stats))
}

/// What the pair loop needs from a polynomial representation.
pub(crate) trait GbElement: Sized {
    /// Leading monomial; only called on nonzero elements.
    fn lm(&self) -> &Monomial;
    fn total_degree(&self) -> u32;
    fn is_zero(&self) -> bool;
    fn is_constant(&self) -> bool;
    fn monic(&self) -> Self;
    fn s_poly(&self, other: &Self) -> Self;
    /// Remainder on division by `basis`, marking in `used` the divisors applied.
    fn remainder(&self, basis: &[Self], used: Option<&mut [bool]>) -> Self;
}

impl GbElement for Polynomial {
    fn lm(&self) -> &Monomial {
        self.leading_monomial().expect("nonzero")
    }
    fn total_degree(&self) -> u32 {
        Polynomial::total_degree(self)
    }
    fn is_zero(&self) -> bool {
        Polynomial::is_zero(self)
    }
    fn is_constant(&self) -> bool {
        Polynomial::is_constant(self)
    }
    fn monic(&self) -> Self {
        Polynomial::monic(self)
    }
    fn s_poly(&self, other: &Self) -> Self {
        s_polynomial(self, other).expect("compatible nonzero inputs")
    }
    fn remainder(&self, basis: &[Self], used: Option<&mut [bool]>) -> Self {
        let lists: Vec<&[(Monomial, Coeff)]> = basis.iter().map(|p| p.terms()).collect();
        let rem = remainder(self.terms(), &lists, self.order(), used);
        Polynomial::from_sorted(self.nvars(), self.order(), rem)
    }
}

/// One element appended by the pair loop: the remainder of the S-polynomial
/// of `i` and `j` using the listed reducers (indices into the basis).
#[derive(Clone, Debug)]
pub(crate) struct Step {
    pub i: usize,
    pub j: usize,
    pub reducers: Vec<usize>,
}

/// Buchberger's pair loop on a basis of nonzero, mutually compatible
/// elements with no constant among them. Also returns one step per
/// appended element.
pub(crate) fn pair_loop<P: GbElement>(
    mut basis: Vec<P>,
    order: MonomialOrder,
    mut stats: BuchbergerStats,
) -> (Vec<P>, BuchbergerStats, Vec<Step>) {
    let mut steps = Vec::new();
    let mut lms: Vec<Monomial> = basis.iter().map(|g| g.lm().clone()).collect();
    let mut sugars: Vec<u32> = basis.iter().map(P::total_degree).collect();
    let pair_sugar = |sugars: &[u32], lms: &[Monomial], lcm: &Monomial, i: usize, j: usize| {
        let d = lcm.degree();
        (sugars[i] + d - lms[i].degree()).max(sugars[j] + d - lms[j].degree())
    };
    let mut heap = BinaryHeap::new();
    let mut pending: HashSet<(usize, usize)> = HashSet::new();
    for j in 0..basis.len() {
        for i in 0..j {
            let lcm = lms[i].lcm(&lms[j]);
            heap.push(Pair {
                order,
                sugar: pair_sugar(&sugars, &lms, &lcm, i, j),
                lcm,
                i,
                j,
            });
            pending.insert((i, j));
        }
    }

    while let Some(Pair { lcm, sugar, i, j, .. }) = heap.pop() {
        pending.remove(&(i, j));
        stats.pairs_considered += 1;
        if lms[i].is_coprime(&lms[j]) {
            stats.skipped_coprime += 1;
            continue;
        }
        let key = |a: usize, b: usize| if a < b { (a, b) } else { (b, a) };
        let chain = (0..basis.len()).any(|l| {
            l != i
                && l != j
                && lms[l].divides(&lcm)
                && !pending.contains(&key(i, l))
                && !pending.contains(&key(j, l))
        });
        if chain {
            stats.skipped_chain += 1;
            continue;
        }
        stats.pairs_reduced += 1;
        let mut used = vec![false; basis.len()];
        let r = basis[i].s_poly(&basis[j]).remainder(&basis, Some(&mut used));
        if r.is_zero() {
            continue;
        }
        let r = r.monic();
        steps.push(Step {
            i,
            j,
            reducers: (0..used.len()).filter(|&l| used[l]).collect(),
        });
        if r.is_constant() {
            basis.push(r);
            stats.basis_size = basis.len();
            return (basis, stats, steps);
        }
        let new_lm = r.lm().clone();
        let n = basis.len();
        lms.push(new_lm.clone());
        sugars.push(sugar.max(r.total_degree()));
        for l in 0..n {
            let lcm = lms[l].lcm(&new_lm);
            heap.push(Pair {
                order,
                sugar: pair_sugar(&sugars, &lms, &lcm, l, n),
                lcm,
                i: l,
                j: n,
            });
            pending.insert((l, n));
        }
        basis.push(r);
    }
    stats.basis_size = basis.len();
    (basis, stats, steps)
}

/// Exact replay of the derivation of the last step in `steps`, starting
/// from `base`. Only the ancestors of that step are recomputed. Returns true
/// when the replay ends in a nonzero constant, which proves `1` lies in the
/// ideal of `base` whatever the origin of `steps`.
pub(crate) fn replay_reaches_constant(base: &[Polynomial], steps: &[Step]) -> bool {
    let n0 = base.len();
    let Some(last) = steps.len().checked_sub(1) else {
        return false;
    };
    let mut needed = vec![false; steps.len()];
    needed[last] = true;
    for s in (0..=last).rev() {
        if !needed[s] {
            continue;
        }
        let st = &steps[s];
        for &e in [st.i, st.j].iter().chain(&st.reducers) {
            if e >= n0 {
                needed[e - n0] = true;
            }
        }
    }
    let mut derived: Vec<Option<Polynomial>> = vec![None; steps.len()];
    let get = |derived: &[Option<Polynomial>], e: usize| -> Option<Polynomial> {
        if e < n0 {
            Some(base[e].clone())
        } else {
            derived[e - n0].clone()
        }
    };
    for s in 0..=last {
        if !needed[s] {
            continue;
        }
        let st = &steps[s];
        let (Some(a), Some(b)) = (get(&derived, st.i), get(&derived, st.j)) else {
            return false;
        };
        let mut reducers = Vec::with_capacity(st.reducers.len());
        for &e in &st.reducers {
            match get(&derived, e) {
                Some(p) => reducers.push(p),
                None => return false,
            }
        }
        if a.is_zero() || b.is_zero() {
            return false;
        }
        let sp = a.s_poly(&b);
        let r = if reducers.is_empty() { sp } else { sp.remainder(&reducers, None) };
        if r.is_zero() {
            return false;
        }
        derived[s] = Some(r.monic());
    }
    derived[last].as_ref().is_some_and(|p| p.is_constant())
}

/// True when every S-pair of `basis` reduces to zero (coprime pairs skipped).
pub fn is_groebner_basis(basis: &[Polynomial]) -> Result<bool> {
    for j in 0..basis.len() {
        for i in 0..j {
            let (a, b) = (&basis[i], &basis[j]);
            match (a.leading_monomial(), b.leading_monomial()) {
                (Some(x), Some(y)) if x.is_coprime(y) => continue,
                (None, _) | (_, None) => return Err(Error::ZeroPolynomial),
                _ => {}
            }
            if !reduce(&s_polynomial(a, b)?, basis)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Turns a Groebner basis into the reduced one, sorted by ascending leading monomial.
///
/// Fails with `NotAGroebnerBasis` if the input does not satisfy Buchberger's
/// criterion.
pub fn reduce_basis(basis: &[Polynomial], order: MonomialOrder) -> Result<Vec<Polynomial>> {
    let reduced = reduce_basis_unchecked(basis, order)?;
    if !is_groebner_basis(&reduced)? {
        return Err(Error::NotAGroebnerBasis);
    }
    Ok(reduced)
}

/// Reduction step without the Buchberger-criterion check; the caller
/// guarantees the input is a Groebner basis.
pub fn reduce_basis_unchecked(basis: &[Polynomial], order: MonomialOrder) -> Result<Vec<Polynomial>> {
    let first = basis.first().ok_or(Error::EmptySet)?;
    let mut g: Vec<Polynomial> = Vec::with_capacity(basis.len());
    for p in basis {
        first.check_compatible(p)?;
        if p.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        g.push(p.with_order(order).monic());
    }
    if g.iter().any(Polynomial::is_constant) {
        return Ok(vec![Polynomial::one(first.nvars(), order)]);
    }
    let mut idx = 0;
    while idx < g.len() {
        if g.len() == 1 {
            break;
        }
        let current = g.remove(idx);
        let r = reduce(&current, &g)?;
        if r.is_zero() {
            continue;
        }
        g.insert(idx, r.monic());
        idx += 1;
    }
    g.sort_by(|a, b| {
        order.compare(
            a.leading_monomial().expect("nonzero"),
            b.leading_monomial().expect("nonzero"),
        )
    });
    Ok(g)
}

/// The reduced Groebner basis of the ideal generated by `input`.
pub fn reduced_groebner_basis(input: &[Polynomial], order: MonomialOrder) -> Result<Vec<Polynomial>> {
    let g = buchberger(input, order)?;
    reduce_basis_unchecked(&g, order)
}

/// True when `basis` is exactly `{1}`.
pub fn is_unit_basis(basis: &[Polynomial]) -> bool {
    basis.len() == 1 && basis[0].is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;
    use proptest::prelude::*;

    const LEX: MonomialOrder = MonomialOrder::Lex;

    fn p(s: &str, n: usize) -> Polynomial {
        parse_polynomial(s, n, LEX).unwrap()
    }

    #[test]
    fn long_division_example() {
        // z1^2 - z1(z1 + z2) = -z1 z2; -z1 z2 + z2(z1 + z2) = z2^2
        let r = reduce(&p("z1^2", 2), &[p("z1 + z2", 2)]).unwrap();
        assert_eq!(r, p("z2^2", 2));
    }

    #[test]
    fn exact_divisor_leaves_nothing() {
        let q = p("z1^2*z2 - 3*z2 + 1/2", 2);
        assert!(reduce(&q, std::slice::from_ref(&q)).unwrap().is_zero());
    }

    #[test]
    fn remainder_terms_are_irreducible() {
        let g = [p("z1*z2 - 1", 2), p("z2^2 - z1", 2)];
        let r = reduce(&p("z1^3*z2^3 + z1*z2^5 + z2", 2), &g).unwrap();
        for (m, _) in r.terms() {
            for d in &g {
                assert!(!d.leading_monomial().unwrap().divides(m));
            }
        }
    }

    #[test]
    fn s_polynomial_examples() {
        let a = p("z1 + z2", 2);
        let b = p("z2^3 - z2", 2);
        assert_eq!(s_polynomial(&a, &b).unwrap(), p("z2^4 + z1*z2", 2));
        assert!(s_polynomial(&a, &a).unwrap().is_zero());
    }

    #[test]
    fn reduce_basis_examples() {
        let g = reduce_basis(&[p("2*z1 + 2*z2", 2), p("z2^3 - z2", 2)], LEX).unwrap();
        assert_eq!(g, vec![p("z2^3 - z2", 2), p("z1 + z2", 2)]);
        let unit = reduce_basis(&[p("1", 2), p("z1", 2)], LEX).unwrap();
        assert!(is_unit_basis(&unit));
    }

    #[test]
    fn reduce_basis_rejects_non_basis() {
        let bad = [p("z1^2 - z2", 2), p("z1*z2 - 1", 2)];
        assert!(matches!(reduce_basis(&bad, LEX), Err(Error::NotAGroebnerBasis)));
    }

    #[test]
    fn known_basis() {
        // x^2 - y, x y - 1 under lex x > y: reduced basis {x - y^2, y^3 - 1}
        let g = reduced_groebner_basis(&[p("z1^2 - z2", 2), p("z1*z2 - 1", 2)], LEX).unwrap();
        assert_eq!(g, vec![p("z2^3 - 1", 2), p("z1 - z2^2", 2)]);
    }

    #[test]
    fn inconsistent_system_gives_unit() {
        let g = reduced_groebner_basis(&[p("z1 + z2 - 1", 2), p("z1 + z2 - 2", 2)], LEX).unwrap();
        assert!(is_unit_basis(&g));
    }

    #[test]
    fn grevlex_basis_matches_lex_ideal() {
        let input = [p("z1^2 - z2", 2), p("z1*z2 - 1", 2)];
        let g = reduced_groebner_basis(&input, MonomialOrder::GRevLex).unwrap();
        for f in &input {
            assert!(reduce(&f.with_order(MonomialOrder::GRevLex), &g).unwrap().is_zero());
        }
        assert!(is_groebner_basis(&g).unwrap());
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            reduce(&p("z1", 2), &[p("z1", 3)]),
            Err(Error::DimensionMismatch(2, 3))
        ));
        assert!(matches!(
            reduce(&p("z1", 2), &[Polynomial::zero(2, LEX)]),
            Err(Error::ZeroPolynomial)
        ));
    }

    fn small_poly() -> impl Strategy<Value = Polynomial> {
        proptest::collection::vec((-3i64..=3, proptest::collection::vec(0u16..3, 3)), 1..4).prop_map(
            |terms| {
                Polynomial::from_terms(
                    3,
                    LEX,
                    terms
                        .into_iter()
                        .map(|(c, e)| (Monomial::new(e), Coeff::from_integer(c.into()))),
                )
            },
        )
    }

    fn generators() -> Vec<Polynomial> {
        vec![p("z1^2 + z2*z3 - 1", 3), p("z1*z2 - z3^2", 3), p("z2^2 - z1 + z3", 3)]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn ideal_members_reduce_to_zero(qs in proptest::collection::vec(small_poly(), 3)) {
            let gens = generators();
            let g = buchberger(&gens, LEX).unwrap();
            let member = gens.iter().zip(&qs).fold(Polynomial::zero(3, LEX), |acc, (gi, qi)| acc.add(&gi.mul(qi)));
            prop_assert!(reduce(&member, &g).unwrap().is_zero());
        }

        #[test]
        fn reduced_basis_is_permutation_invariant(seed in 0u64..1000) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut gens = generators();
            let reference = reduced_groebner_basis(&gens, LEX).unwrap();
            gens.shuffle(&mut rng);
            let mut g = buchberger(&gens, LEX).unwrap();
            g.shuffle(&mut rng);
            prop_assert_eq!(reduce_basis(&g, LEX).unwrap(), reference.clone());
            // reduction by a reduced basis does not depend on list order
            let f = p("z1^3*z2 + z3^4 - z1*z2*z3 + 2", 3);
            let r = reduce(&f, &reference).unwrap();
            let mut shuffled = reference.clone();
            shuffled.shuffle(&mut rng);
            prop_assert_eq!(reduce(&f, &shuffled).unwrap(), r);
        }

        #[test]
        fn constant_shift(f in small_poly(), c in -5i64..=5) {
            let g = reduced_groebner_basis(&generators(), LEX).unwrap();
            prop_assume!(!is_unit_basis(&g));
            let c = Coeff::from_integer(c.into());
            let lhs = reduce(&f.add_constant(&c), &g).unwrap();
            let rhs = reduce(&f, &g).unwrap().add_constant(&c);
            prop_assert_eq!(lhs, rhs);
        }
    }
}
