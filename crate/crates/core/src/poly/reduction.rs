//! Multivariate division driven by a max-heap of pending monomials and a
//! hash map of their coefficients, generic over the coefficient field.

use std::cmp::Ordering;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap};

use super::monomial::{Monomial, MonomialOrder};

pub(crate) trait Field: Clone {
    fn is_zero(&self) -> bool;
    fn mul(&self, other: &Self) -> Self;
    fn add_assign(&mut self, other: Self);
    fn neg(&self) -> Self;
    fn inv(&self) -> Self;
}

struct Keyed {
    order: MonomialOrder,
    m: Monomial,
}

impl PartialEq for Keyed {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m
    }
}

impl Eq for Keyed {}

impl PartialOrd for Keyed {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Keyed {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order.compare(&self.m, &other.m)
    }
}

type Divisor<'a, F> = (&'a [(Monomial, F)], F, u64);

/// Remainder of `f` on division by `divisors` (each sorted descending,
/// nonzero). At each step the first divisor, by list position, whose
/// leading monomial divides the current leading monomial is used, and its
/// slot in `used` (when given) is set.
pub(crate) fn remainder<F: Field>(
    f: &[(Monomial, F)],
    divisors: &[&[(Monomial, F)]],
    order: MonomialOrder,
    mut used: Option<&mut [bool]>,
) -> Vec<(Monomial, F)> {
    let divs: Vec<Divisor<F>> = divisors
        .iter()
        .map(|d| (*d, d[0].1.inv(), d[0].0.support_mask()))
        .collect();
    let mut coeffs: HashMap<Monomial, F> = HashMap::with_capacity(f.len() * 2);
    let mut heap: BinaryHeap<Keyed> = BinaryHeap::with_capacity(f.len() * 2);
    for (m, c) in f {
        coeffs.insert(m.clone(), c.clone());
        heap.push(Keyed { order, m: m.clone() });
    }
    let mut rem = Vec::new();
    while let Some(Keyed { m, .. }) = heap.pop() {
        // stale heap entries (cancelled or already handled) have no coefficient
        let Some(c) = coeffs.remove(&m) else { continue };
        let mask = m.support_mask();
        let hit = divs
            .iter()
            .position(|(d, _, dm)| dm & !mask == 0 && d[0].0.divides(&m));
        match hit {
            Some(at) => {
                if let Some(u) = used.as_deref_mut() {
                    u[at] = true;
                }
                let (d, lc_inv, _) = &divs[at];
                let q = m.div(&d[0].0);
                let factor = c.mul(lc_inv).neg();
                for (t, x) in &d[1..] {
                    let tm = t.mul(&q);
                    let delta = x.mul(&factor);
                    match coeffs.entry(tm) {
                        Entry::Occupied(mut e) => {
                            e.get_mut().add_assign(delta);
                            if e.get().is_zero() {
                                e.remove();
                            }
                        }
                        Entry::Vacant(e) => {
                            heap.push(Keyed { order, m: e.key().clone() });
                            e.insert(delta);
                        }
                    }
                }
            }
            None => rem.push((m, c)),
        }
    }
    rem
}
