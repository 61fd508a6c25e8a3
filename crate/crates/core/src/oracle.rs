//! Ground-truth checks by direct distance computation.

use std::collections::HashSet;
use std::sync::Arc;
use std::time::Instant;

use itertools::Itertools;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kmer::{common_instance, dedup_kmers, symbol_distance, HammingInstance, Kmer};
use crate::verdict::{Method, Verdict, VerdictStats};

pub const DEFAULT_BRUTE_CAP: u128 = 10_000_000;
pub const DEFAULT_MINDIM_CAP: u128 = 32;
/// Largest `k` for which the hypercube check enumerates `{0, ±1}^k` outright.
pub const HYPERCUBE_EXHAUSTIVE_K: usize = 12;

/// Colliding vertex pairs under `Φ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnresolvedReport {
    pub pairs: Vec<(Kmer, Kmer)>,
    pub truncated: bool,
}

/// Sorted table of packed distance vectors, one row of `words` u64s per vertex.
struct PhiTable {
    instance: Arc<HammingInstance>,
    words: usize,
    keys: Vec<u64>,
    /// Vertex indices in sorted key order.
    order: Vec<u32>,
}

impl PhiTable {
    fn build(set: &[Kmer], cap: u128) -> Result<Self> {
        let instance = common_instance(set)?;
        let count = instance.vertex_count();
        if count > cap || count > u32::MAX as u128 {
            return Err(Error::InstanceTooLarge {
                vertices: count,
                cap: cap.min(u32::MAX as u128),
            });
        }
        let set = dedup_kmers(set);
        let count = count as usize;
        let (k, a) = (instance.k(), instance.a());
        let bits = (usize::BITS - k.leading_zeros()) as usize;
        let per_word = 64 / bits;
        let words = set.len().div_ceil(per_word);
        let refs: Vec<&[u8]> = set.iter().map(Kmer::symbols).collect();
        let mut keys = vec![0u64; count * words];
        const CHUNK: usize = 4096;
        keys.par_chunks_mut(CHUNK * words)
            .enumerate()
            .for_each(|(c, chunk)| {
                let first = c * CHUNK;
                let mut v = Kmer::from_index(&instance, first as u128).symbols().to_vec();
                for row in chunk.chunks_mut(words) {
                    for (i, r) in refs.iter().enumerate() {
                        let d = symbol_distance(&v, r) as u64;
                        row[i / per_word] |= d << ((i % per_word) * bits);
                    }
                    // odometer step, last coordinate fastest
                    for s in v.iter_mut().rev() {
                        *s += 1;
                        if (*s as usize) < a {
                            break;
                        }
                        *s = 0;
                    }
                }
            });
        let mut order: Vec<u32> = (0..count as u32).collect();
        let key = |i: u32| &keys[i as usize * words..(i as usize + 1) * words];
        order.par_sort_unstable_by(|&x, &y| key(x).cmp(key(y)).then(x.cmp(&y)));
        Ok(PhiTable {
            instance,
            words,
            keys,
            order,
        })
    }

    fn key(&self, i: u32) -> &[u64] {
        &self.keys[i as usize * self.words..(i as usize + 1) * self.words]
    }

    fn vertex(&self, i: u32) -> Kmer {
        Kmer::from_index(&self.instance, i as u128)
    }

    /// Runs of equal keys in sorted order.
    fn groups(&self) -> impl Iterator<Item = &[u32]> + '_ {
        self.order
            .chunk_by(move |&x, &y| self.key(x) == self.key(y))
            .filter(|g| g.len() > 1)
    }
}

pub fn brute_force_verify(set: &[Kmer]) -> Result<Verdict> {
    brute_force_verify_with_cap(set, DEFAULT_BRUTE_CAP)
}

/// `R` resolves iff no two vertices share a distance vector; the first
/// collision in sorted order is returned as the witness.
pub fn brute_force_verify_with_cap(set: &[Kmer], cap: u128) -> Result<Verdict> {
    let start = Instant::now();
    let table = PhiTable::build(set, cap)?;
    let verdict = match table.groups().next() {
        None => Verdict::resolving(Method::Brute),
        Some(g) => Verdict::not_resolving(Method::Brute, Some((table.vertex(g[0]), table.vertex(g[1])))),
    };
    Ok(verdict.with_stats(VerdictStats {
        elapsed: start.elapsed(),
        ..VerdictStats::default()
    }))
}

/// Every colliding pair, ordered by the sorted table; at most `limit` pairs.
pub fn all_unresolved_pairs(set: &[Kmer], limit: Option<usize>) -> Result<UnresolvedReport> {
    let table = PhiTable::build(set, DEFAULT_BRUTE_CAP)?;
    let limit = limit.unwrap_or(usize::MAX);
    let mut pairs = Vec::new();
    for g in table.groups() {
        for (i, j) in g.iter().tuple_combinations() {
            if pairs.len() == limit {
                return Ok(UnresolvedReport { pairs, truncated: true });
            }
            pairs.push((table.vertex(*i), table.vertex(*j)));
        }
    }
    Ok(UnresolvedReport { pairs, truncated: false })
}

/// Smallest resolving set size by increasing-size enumeration, with one minimal set.
pub fn metric_dimension_exhaustive(instance: &Arc<HammingInstance>, cap: u128) -> Result<(usize, Vec<Kmer>)> {
    let count = instance.vertex_count();
    if count > cap {
        return Err(Error::InstanceTooLarge { vertices: count, cap });
    }
    let vertices: Vec<Kmer> = (0..count).map(|i| Kmer::from_index(instance, i)).collect();
    let n = vertices.len();
    let dist: Vec<Vec<u8>> = vertices
        .iter()
        .map(|u| vertices.iter().map(|v| symbol_distance(u.symbols(), v.symbols()) as u8).collect())
        .collect();
    for s in 1..=n {
        let found = (0..n).combinations(s).find(|subset| {
            let mut seen = HashSet::with_capacity(n);
            (0..n).all(|v| seen.insert(subset.iter().map(|&r| dist[v][r]).collect::<Vec<u8>>()))
        });
        if let Some(subset) = found {
            return Ok((s, subset.into_iter().map(|i| vertices[i].clone()).collect()));
        }
    }
    unreachable!("the full vertex set always resolves")
}

/// Matrix forms for binary sets: `B` has rows `2v - 1`, `C` has rows `v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HypercubeForm {
    B,
    C,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypercubeMatrix {
    pub rows: Vec<Vec<i8>>,
    pub form: HypercubeForm,
}

impl HypercubeMatrix {
    pub fn build(set: &[Kmer], form: HypercubeForm) -> Result<Self> {
        let instance = common_instance(set)?;
        if instance.a() != 2 {
            return Err(Error::NotBinary);
        }
        let set = dedup_kmers(set);
        if form == HypercubeForm::C && !set.iter().any(|v| v.symbols().iter().all(|&s| s == 1)) {
            return Err(Error::MissingAllOnes);
        }
        let rows = set
            .iter()
            .map(|v| {
                v.symbols()
                    .iter()
                    .map(|&s| match form {
                        HypercubeForm::B => 2 * s as i8 - 1,
                        HypercubeForm::C => s as i8,
                    })
                    .collect()
            })
            .collect();
        Ok(HypercubeMatrix { rows, form })
    }
}

/// Flips every coordinate where the first element is 0, so the first element becomes `1^k`.
pub fn normalize_to_ones(set: &[Kmer]) -> Result<Vec<Kmer>> {
    let instance = common_instance(set)?;
    if instance.a() != 2 {
        return Err(Error::NotBinary);
    }
    let flip: Vec<bool> = set[0].symbols().iter().map(|&s| s == 0).collect();
    set.iter()
        .map(|v| {
            let symbols = v
                .symbols()
                .iter()
                .zip(&flip)
                .map(|(&s, &f)| if f { 1 - s } else { s })
                .collect();
            Kmer::new(&instance, symbols)
        })
        .collect()
}

/// Decides resolvability of a binary set through `ker(M) ∩ {0, ±1}^k = {0}`.
pub fn hypercube_verify(set: &[Kmer], form: HypercubeForm) -> Result<Verdict> {
    let start = Instant::now();
    let matrix = HypercubeMatrix::build(set, form)?;
    let instance = common_instance(set)?;
    let k = instance.k();
    let mut nodes = 0u64;
    let y = if k <= HYPERCUBE_EXHAUSTIVE_K {
        kernel_exhaustive(&matrix.rows, k, &mut nodes)
    } else {
        kernel_branch_and_bound(&matrix.rows, k, &mut nodes)
    };
    let method = match form {
        HypercubeForm::B => Method::HypercubeB,
        HypercubeForm::C => Method::HypercubeC,
    };
    let verdict = match y {
        None => Verdict::resolving(method),
        Some(y) => {
            let (x, u) = hypercube_pair(&y, &instance)?;
            Verdict::not_resolving(method, Some((x, u)))
        }
    };
    Ok(verdict.with_stats(VerdictStats {
        elapsed: start.elapsed(),
        basis_sizes: Vec::new(),
        nodes,
    }))
}

/// The pair separated by a kernel vector `y`: `x` has 1 where `y = 1`, `u` has 1 where `y = -1`.
pub fn hypercube_pair(y: &[i8], instance: &Arc<HammingInstance>) -> Result<(Kmer, Kmer)> {
    let x = y.iter().map(|&v| (v == 1) as u8).collect();
    let u = y.iter().map(|&v| (v == -1) as u8).collect();
    Ok((Kmer::new(instance, x)?, Kmer::new(instance, u)?))
}

fn in_kernel(rows: &[Vec<i8>], y: &[i8]) -> bool {
    rows.iter()
        .all(|r| r.iter().zip(y).map(|(&a, &b)| a as i64 * b as i64).sum::<i64>() == 0)
}

/// Odometer over `{0, 1, -1}^k` for a nonzero kernel vector whose first nonzero entry is 1.
fn kernel_exhaustive(rows: &[Vec<i8>], k: usize, nodes: &mut u64) -> Option<Vec<i8>> {
    let mut y = vec![0i8; k];
    loop {
        let mut i = k;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            y[i] = match y[i] {
                0 => 1,
                1 => -1,
                _ => 0,
            };
            if y[i] != 0 {
                break;
            }
        }
        *nodes += 1;
        if y.iter().find(|&&v| v != 0) == Some(&1) && in_kernel(rows, &y) {
            return Some(y);
        }
    }
}

fn kernel_branch_and_bound(rows: &[Vec<i8>], k: usize, nodes: &mut u64) -> Option<Vec<i8>> {
    let mut residual = vec![0i64; rows.len()];
    let mut room: Vec<i64> = rows.iter().map(|r| r.iter().map(|&x| (x as i64).abs()).sum()).collect();
    let mut y = vec![0i8; k];
    fn go(
        i: usize,
        rows: &[Vec<i8>],
        y: &mut [i8],
        residual: &mut [i64],
        room: &mut [i64],
        nodes: &mut u64,
    ) -> bool {
        *nodes += 1;
        if residual.iter().zip(room.iter()).any(|(s, t)| s.abs() > *t) {
            return false;
        }
        if i == y.len() {
            return y.iter().any(|&v| v != 0);
        }
        let leading = y[..i].iter().all(|&v| v == 0);
        let choices: &[i8] = if leading { &[0, 1] } else { &[0, 1, -1] };
        for &v in choices {
            y[i] = v;
            for (r, row) in rows.iter().enumerate() {
                residual[r] += row[i] as i64 * v as i64;
                room[r] -= (row[i] as i64).abs();
            }
            let hit = go(i + 1, rows, y, residual, room, nodes);
            for (r, row) in rows.iter().enumerate() {
                residual[r] -= row[i] as i64 * v as i64;
                room[r] += (row[i] as i64).abs();
            }
            if hit {
                return true;
            }
        }
        y[i] = 0;
        false
    }
    go(0, rows, &mut y, &mut residual, &mut room, nodes).then_some(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verdict::{is_valid_witness, Status};

    fn inst(k: usize, a: usize) -> Arc<HammingInstance> {
        Arc::new(HammingInstance::new(k, a).unwrap())
    }

    fn set(inst: &Arc<HammingInstance>, words: &[&str]) -> Vec<Kmer> {
        words.iter().map(|w| Kmer::parse(w, inst).unwrap()).collect()
    }

    fn unordered(report: &UnresolvedReport) -> HashSet<(String, String)> {
        report
            .pairs
            .iter()
            .map(|(x, y)| {
                let (x, y) = (x.render(), y.render());
                if x < y { (x, y) } else { (y, x) }
            })
            .collect()
    }

    #[test]
    fn illustrative_sets() {
        let h = inst(2, 3);
        let r0 = set(&h, &["02", "11"]);
        let r1 = set(&h, &["02", "11", "22"]);
        let v = brute_force_verify(&r0).unwrap();
        assert_eq!(v.status, Status::NotResolving);
        let (x, y) = v.witness.unwrap();
        assert!(is_valid_witness(&x, &y, &r0).unwrap());
        assert_eq!(brute_force_verify(&r1).unwrap().status, Status::Resolving);

        let report = all_unresolved_pairs(&r0, None).unwrap();
        let expected: HashSet<(String, String)> = [("01", "12"), ("10", "21"), ("00", "22")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        assert_eq!(unordered(&report), expected);
        assert!(!report.truncated);
        assert!(all_unresolved_pairs(&r1, None).unwrap().pairs.is_empty());
        let one = all_unresolved_pairs(&r0, Some(1)).unwrap();
        assert_eq!((one.pairs.len(), one.truncated), (1, true));
    }

    #[test]
    fn full_vertex_set_resolves_and_cap_applies() {
        let h = inst(3, 3);
        let all: Vec<Kmer> = (0..27).map(|i| Kmer::from_index(&h, i)).collect();
        assert_eq!(brute_force_verify(&all).unwrap().status, Status::Resolving);
        assert!(matches!(
            brute_force_verify_with_cap(&all, 10),
            Err(Error::InstanceTooLarge { vertices: 27, cap: 10 })
        ));
    }

    #[test]
    fn packing_spans_several_words() {
        // k = 12 needs 4 bits per entry, 16 entries per word; 40 references take 3 words
        let h = inst(12, 2);
        let refs: Vec<Kmer> = (0..40u128).map(|i| Kmer::from_index(&h, i * 811 % 4096)).collect();
        let v = brute_force_verify(&refs).unwrap();
        let naive = naive_collision(&refs);
        assert_eq!(v.status == Status::Resolving, naive.is_none());
    }

    fn naive_collision(set: &[Kmer]) -> Option<(u128, u128)> {
        let h = set[0].instance().clone();
        let n = h.vertex_count();
        let phi = |i: u128| {
            let v = Kmer::from_index(&h, i);
            set.iter().map(|r| v.distance(r).unwrap()).collect::<Vec<_>>()
        };
        let table: Vec<Vec<usize>> = (0..n).map(phi).collect();
        for i in 0..n as usize {
            for j in i + 1..n as usize {
                if table[i] == table[j] {
                    return Some((i as u128, j as u128));
                }
            }
        }
        None
    }

    #[test]
    fn sorting_matches_naive_scan() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for (k, a) in [(2, 3), (3, 3), (4, 2), (2, 5), (3, 4), (9, 2), (4, 4)] {
            let h = inst(k, a);
            for _ in 0..10 {
                let size = rng.gen_range(1..=4);
                let refs: Vec<Kmer> = (0..size)
                    .map(|_| Kmer::from_index(&h, rng.gen_range(0..h.vertex_count())))
                    .collect();
                let v = brute_force_verify(&refs).unwrap();
                assert_eq!(v.status == Status::Resolving, naive_collision(&refs).is_none());
            }
        }
    }

    #[test]
    fn metric_dimension_small() {
        for a in 2..=6 {
            assert_eq!(metric_dimension_exhaustive(&inst(1, a), DEFAULT_MINDIM_CAP).unwrap().0, a - 1);
        }
        let (beta, witness) = metric_dimension_exhaustive(&inst(2, 3), DEFAULT_MINDIM_CAP).unwrap();
        assert_eq!(beta, 3);
        assert_eq!(brute_force_verify(&witness).unwrap().status, Status::Resolving);
        assert!(metric_dimension_exhaustive(&inst(3, 4), DEFAULT_MINDIM_CAP).is_err());
    }

    #[test]
    fn hypercube_examples() {
        let h = inst(2, 2);
        assert_eq!(hypercube_verify(&set(&h, &["11", "10"]), HypercubeForm::C).unwrap().status, Status::Resolving);
        let v = hypercube_verify(&set(&h, &["11"]), HypercubeForm::C).unwrap();
        assert_eq!(v.status, Status::NotResolving);
        let (x, u) = v.witness.unwrap();
        assert_eq!((x.render().as_str(), u.render().as_str()), ("10", "01"));
        let h1 = inst(1, 2);
        assert_eq!(hypercube_verify(&set(&h1, &["1"]), HypercubeForm::C).unwrap().status, Status::Resolving);
        assert!(matches!(hypercube_verify(&set(&h, &["01"]), HypercubeForm::C), Err(Error::MissingAllOnes)));
        assert!(matches!(
            hypercube_verify(&set(&inst(2, 3), &["01"]), HypercubeForm::B),
            Err(Error::NotBinary)
        ));
    }

    #[test]
    fn normalization() {
        let h = inst(2, 2);
        let render = |s: Vec<Kmer>| s.iter().map(Kmer::render).collect::<Vec<_>>();
        assert_eq!(render(normalize_to_ones(&set(&h, &["00", "01"])).unwrap()), ["11", "10"]);
        assert_eq!(render(normalize_to_ones(&set(&h, &["11", "01"])).unwrap()), ["11", "01"]);
    }

    #[test]
    fn branch_and_bound_matches_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for k in 2..=9 {
            for _ in 0..20 {
                let rows: Vec<Vec<i8>> = (0..rng.gen_range(1..=k))
                    .map(|_| (0..k).map(|_| if rng.gen() { 1 } else { -1 }).collect())
                    .collect();
                let (mut n1, mut n2) = (0, 0);
                let e = kernel_exhaustive(&rows, k, &mut n1);
                let b = kernel_branch_and_bound(&rows, k, &mut n2);
                assert_eq!(e.is_some(), b.is_some());
                if let Some(y) = b {
                    assert!(in_kernel(&rows, &y));
                }
            }
        }
    }
}
