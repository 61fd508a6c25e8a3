//! Resolvability through the weak Nullstellensatz.
//!
//! Variables `z1..z_{ak}` follow the column-major one-hot layout, so block `i`
//! (0-based) owns `z_{ia+1}..z_{(i+1)a}`. A set `R` resolves `H(k, a)` iff for
//! every `i` in `1..=k` the system `{A z = 0} ∪ P ∪ {f - 2i}` has no common
//! root, i.e. its reduced Groebner basis is `{1}`.

use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::error::Result;
use crate::ilp::decode_witness;
use crate::kmer::{HammingInstance, Kmer};
use crate::matrix::ModelMatrix;
use crate::poly::{
    is_unit_basis, is_unit_mod, modular_groebner, modular_groebner_traced, reduce, reduced_groebner_basis, Coeff, ModPoly, Monomial,
    MonomialOrder, Polynomial,
};
use crate::verdict::{is_valid_witness, Method, Verdict, VerdictStats};

const ORDER: MonomialOrder = MonomialOrder::Lex;

/// Root search budget for witness extraction from a non-unit basis.
const WITNESS_NODE_CAP: u64 = 2_000_000;

/// The constraint polynomials split into the three families and per-block groups.
#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    pub instance: HammingInstance,
    /// `z_j^3 - z_j` for every variable.
    pub p1: Vec<Polynomial>,
    /// Block sums.
    pub p2: Vec<Polynomial>,
    /// `(2 - s_i) s_i` with `s_i` the block sum of squares.
    pub p3: Vec<Polynomial>,
    /// Block `i`: its cubics, then its sum, then its quartic.
    pub blocks: Vec<Vec<Polynomial>>,
}

impl ConstraintSystem {
    pub fn nvars(&self) -> usize {
        self.instance.dimension()
    }

    pub fn all(&self) -> Vec<Polynomial> {
        self.blocks.iter().flatten().cloned().collect()
    }
}

fn int(c: i64) -> Coeff {
    Coeff::from_integer(BigInt::from(c))
}

fn var_pow(n: usize, v: usize, e: u16) -> Monomial {
    Monomial::var(n, v, e)
}

fn sum_of_squares(n: usize, vars: impl Iterator<Item = usize>) -> Polynomial {
    Polynomial::from_terms(n, ORDER, vars.map(|v| (var_pow(n, v, 2), Coeff::one())))
}

pub fn build_constraints(instance: &HammingInstance) -> ConstraintSystem {
    let (k, a) = (instance.k(), instance.a());
    let n = instance.dimension();
    let mut p1 = Vec::with_capacity(n);
    let mut p2 = Vec::with_capacity(k);
    let mut p3 = Vec::with_capacity(k);
    let mut blocks = Vec::with_capacity(k);
    for i in 0..k {
        let vars = i * a..(i + 1) * a;
        let cubics: Vec<Polynomial> = vars
            .clone()
            .map(|v| {
                Polynomial::from_terms(n, ORDER, [(var_pow(n, v, 3), int(1)), (var_pow(n, v, 1), int(-1))])
            })
            .collect();
        let sum = Polynomial::from_terms(n, ORDER, vars.clone().map(|v| (var_pow(n, v, 1), int(1))));
        let s = sum_of_squares(n, vars);
        let quartic = Polynomial::constant(n, ORDER, int(2)).sub(&s).mul(&s);
        let mut block = cubics.clone();
        block.push(sum.clone());
        block.push(quartic.clone());
        p1.extend(cubics);
        p2.push(sum);
        p3.push(quartic);
        blocks.push(block);
    }
    ConstraintSystem {
        instance: instance.clone(),
        p1,
        p2,
        p3,
        blocks,
    }
}

/// `f = z_1^2 + ... + z_{ak}^2`.
pub fn auxiliary_polynomial(instance: &HammingInstance) -> Polynomial {
    let n = instance.dimension();
    sum_of_squares(n, 0..n)
}

/// The reduced lex Groebner basis of the constraint system, written down
/// directly block by block. Sorted by ascending leading monomial.
pub fn closed_form_reduced_basis(instance: &HammingInstance) -> Vec<Polynomial> {
    let (k, a) = (instance.k(), instance.a());
    let n = instance.dimension();
    let mut out = Vec::new();
    for block in 0..k {
        let z = |i: usize| block * a + i;
        out.push(Polynomial::from_terms(n, ORDER, (0..a).map(|i| (var_pow(n, z(i), 1), int(1)))));
        for i in 1..a {
            out.push(Polynomial::from_terms(
                n,
                ORDER,
                [(var_pow(n, z(i), 3), int(1)), (var_pow(n, z(i), 1), int(-1))],
            ));
        }
        for i in 1..a {
            for j in i + 1..a {
                let (zi, zj) = (var_pow(n, z(i), 1), var_pow(n, z(j), 1));
                out.push(Polynomial::from_terms(
                    n,
                    ORDER,
                    [
                        (zi.mul(&zi).mul(&zj), int(1)),
                        (zi.mul(&zj).mul(&zj), int(1)),
                    ],
                ));
            }
        }
        for i in 1..a {
            for j in i + 1..a {
                for l in j + 1..a {
                    let m = var_pow(n, z(i), 1).mul(&var_pow(n, z(j), 1)).mul(&var_pow(n, z(l), 1));
                    out.push(Polynomial::term(m, int(1), ORDER));
                }
            }
        }
    }
    out.sort_by(|p, q| ORDER.compare(p.leading_monomial().unwrap(), q.leading_monomial().unwrap()));
    out
}

/// Rows of `A` as linear forms `sum_j A[i,j] z_j`.
pub fn linear_forms(matrix: &ModelMatrix) -> Vec<Polynomial> {
    let n = matrix.n_cols();
    matrix
        .rows()
        .iter()
        .map(|row| {
            Polynomial::from_terms(
                n,
                ORDER,
                row.iter()
                    .enumerate()
                    .filter(|(_, &x)| x != 0)
                    .map(|(j, &x)| (var_pow(n, j, 1), int(x as i64))),
            )
        })
        .collect()
}

/// Outcome of one `f - 2i` certification.
#[derive(Clone, Debug)]
pub enum Certificate {
    /// The exact reduced basis, equal to `{1}`.
    Unit(Vec<Polynomial>),
    /// A common root of the exact input system, so the reduced basis is not `{1}`.
    Root(Vec<i8>),
    /// The exact reduced basis, not `{1}`.
    Basis(Vec<Polynomial>),
}

impl Certificate {
    pub fn is_unit(&self) -> bool {
        matches!(self, Certificate::Unit(_))
    }
}

/// Everything needed to run the `k` certifications for one set.
struct Certifier {
    matrix: ModelMatrix,
    forms: Vec<Polynomial>,
    basis: Vec<Polynomial>,
    /// `f` reduced by the closed-form basis.
    f_rem: Polynomial,
}

impl Certifier {
    fn new(set: &[Kmer]) -> Result<Self> {
        let matrix = ModelMatrix::build(set)?;
        let instance = matrix.instance().clone();
        let forms = linear_forms(&matrix);
        let basis = closed_form_reduced_basis(&instance);
        let f_rem = reduce(&auxiliary_polynomial(&instance), &basis)?;
        Ok(Certifier {
            matrix,
            forms,
            basis,
            f_rem,
        })
    }

    fn k(&self) -> usize {
        self.matrix.instance().k()
    }

    /// `{A z} ∪ G ∪ {r - 2i}`.
    fn input_for(&self, i: usize) -> Vec<Polynomial> {
        let mut input = self.forms.clone();
        input.extend(self.basis.iter().cloned());
        input.push(self.f_rem.add_constant(&int(-2 * i as i64)));
        input
    }

    fn exact(&self, input: &[Polynomial]) -> Result<(Certificate, usize)> {
        let basis = reduced_groebner_basis(input, ORDER)?;
        let size = basis.len();
        Ok(if is_unit_basis(&basis) {
            (Certificate::Unit(basis), size)
        } else {
            (Certificate::Basis(basis), size)
        })
    }

    /// Exact reduced basis for `i`, with no screening.
    fn audit(&self, i: usize) -> Result<(Certificate, usize, u64)> {
        let (c, size) = self.exact(&self.input_for(i))?;
        Ok((c, size, 0))
    }

    /// Screens `i` with a basis over `F_p`. A unit modular basis is
    /// confirmed by replaying over `Q` the derivation of its constant in
    /// degree reverse lex, where coefficients stay small;
    /// otherwise a root search pruned by the modular basis looks for a
    /// point that zeroes the exact input. Anything inconclusive falls back
    /// to the exact basis.
    fn certify(&self, i: usize) -> Result<(Certificate, usize, u64)> {
        let input = self.input_for(i);
        let Some((modular, _)) = modular_groebner(&input, ORDER) else {
            let (c, size) = self.exact(&input)?;
            return Ok((c, size, 0));
        };
        if is_unit_mod(&modular) {
            let derivation = modular_groebner_traced(&input, MonomialOrder::GRevLex).and_then(|(_, _, d)| d);
            if derivation.is_some_and(|d| d.certifies_unit(&input)) {
                let one = Polynomial::one(self.matrix.n_cols(), ORDER);
                return Ok((Certificate::Unit(vec![one]), 1, 0));
            }
            let (c, size) = self.exact(&input)?;
            return Ok((c, size, 0));
        }
        let exact_input: Option<Vec<Evaluator>> = input.iter().map(Evaluator::new).collect();
        let exact_input = exact_input.expect("integer input system");
        let prune: Vec<(usize, &ModPoly)> = modular
            .iter()
            .map(|p| (p.variables().into_iter().min().unwrap_or(0), p))
            .collect();
        let n = self.matrix.n_cols();
        let (root, nodes) = find_root(
            n,
            |v, z| prune.iter().filter(|(t, _)| *t == v).all(|(_, p)| p.vanishes_at(z)),
            |z| exact_input.iter().all(|e| e.vanishes(z)),
        );
        match root {
            Some(z) => Ok((Certificate::Root(z), modular.len(), nodes)),
            None => {
                let (c, size) = self.exact(&input)?;
                Ok((c, size, nodes))
            }
        }
    }

    fn conclude(
        &self,
        failing: Option<(usize, Certificate)>,
        stats: VerdictStats,
    ) -> Result<Verdict> {
        let Some((i, cert)) = failing else {
            return Ok(Verdict::resolving(Method::Groebner).with_stats(stats));
        };
        let (witness, nodes) = match cert {
            Certificate::Root(z) => (self.decode(&z)?, 0),
            Certificate::Basis(basis) => extract_witness(&basis, &self.matrix)?,
            Certificate::Unit(_) => unreachable!("unit certificates never fail"),
        };
        let v = Verdict::not_resolving(Method::Groebner, witness.clone());
        let v = if witness.is_none() {
            v.with_reason(format!("nontrivial root with f = {}; no witness extracted", 2 * i))
        } else {
            v
        };
        Ok(v.with_stats(VerdictStats {
            nodes: stats.nodes + nodes,
            ..stats
        }))
    }

    fn decode(&self, z: &[i8]) -> Result<Option<(Kmer, Kmer)>> {
        let zi: Vec<i64> = z.iter().map(|&x| x as i64).collect();
        let Ok((x, y)) = decode_witness(&zi, self.matrix.instance()) else {
            return Ok(None);
        };
        Ok(is_valid_witness(&x, &y, self.matrix.source())?.then_some((x, y)))
    }
}

/// Per-`i` exact reduced bases computed during a run, for external audit.
#[derive(Clone, Debug, Default)]
pub struct Transcript {
    pub entries: Vec<(usize, Vec<Polynomial>)>,
}

impl Transcript {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, basis) in &self.entries {
            let _ = writeln!(out, "# f - {} : {} polynomials", 2 * i, basis.len());
            for p in basis {
                let _ = writeln!(out, "{p}");
            }
        }
        out
    }
}

/// Serial certification, smallest `i` first, stopping at the first
/// non-unit ideal. Uses the modular screen.
pub fn verify_groebner(set: &[Kmer]) -> Result<Verdict> {
    let start = Instant::now();
    let cert = Certifier::new(set)?;
    let mut sizes = Vec::new();
    let mut nodes = 0;
    let mut failing = None;
    for i in 1..=cert.k() {
        let (c, size, n) = cert.certify(i)?;
        sizes.push(size);
        nodes += n;
        if !c.is_unit() {
            failing = Some((i, c));
            break;
        }
    }
    finish(&cert, failing, sizes, nodes, start)
}

/// As [`verify_groebner`], but every `i` gets its exact reduced basis,
/// recorded in the transcript.
pub fn verify_groebner_with_transcript(set: &[Kmer]) -> Result<(Verdict, Transcript)> {
    let start = Instant::now();
    let cert = Certifier::new(set)?;
    let mut transcript = Transcript::default();
    let mut sizes = Vec::new();
    let mut failing = None;
    for i in 1..=cert.k() {
        let (c, size, _) = cert.audit(i)?;
        sizes.push(size);
        if let Certificate::Unit(b) | Certificate::Basis(b) = &c {
            transcript.entries.push((i, b.clone()));
        }
        if !c.is_unit() {
            failing = Some((i, c));
            break;
        }
    }
    Ok((finish(&cert, failing, sizes, 0, start)?, transcript))
}

fn finish(
    cert: &Certifier,
    failing: Option<(usize, Certificate)>,
    basis_sizes: Vec<usize>,
    nodes: u64,
    start: Instant,
) -> Result<Verdict> {
    let stats = VerdictStats {
        elapsed: Duration::ZERO,
        basis_sizes,
        nodes,
    };
    let mut verdict = cert.conclude(failing, stats)?;
    verdict.stats.elapsed = start.elapsed();
    Ok(verdict)
}

/// The `k` certifications spread over `workers` threads. The verdict equals
/// the serial one: the smallest failing `i` decides, and workers skip any
/// `i` above the smallest failure seen so far.
pub fn verify_groebner_parallel(set: &[Kmer], workers: usize) -> Result<Verdict> {
    let workers = workers.max(1);
    if workers == 1 {
        return verify_groebner(set);
    }
    let start = Instant::now();
    let cert = Certifier::new(set)?;
    let k = cert.k();
    let next = AtomicUsize::new(1);
    let min_fail = AtomicUsize::new(usize::MAX);
    type Slot = Option<Result<(Certificate, usize, u64)>>;
    let results: Mutex<Vec<Slot>> = Mutex::new((0..=k).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers.min(k) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i > k || i > min_fail.load(Ordering::SeqCst) {
                    break;
                }
                let res = cert.certify(i);
                if !matches!(&res, Ok((c, _, _)) if c.is_unit()) {
                    min_fail.fetch_min(i, Ordering::SeqCst);
                }
                results.lock().unwrap()[i] = Some(res);
            });
        }
    });
    let results = results.into_inner().unwrap();
    let mut sizes = Vec::new();
    let mut nodes = 0;
    let mut failing = None;
    for (i, slot) in results.into_iter().enumerate().skip(1) {
        let Some(res) = slot else { break };
        let (c, size, n) = res?;
        sizes.push(size);
        nodes += n;
        if !c.is_unit() {
            failing = Some((i, c));
            break;
        }
    }
    finish(&cert, failing, sizes, nodes, start)
}

/// A polynomial prepared for evaluation at points of `{-1, 0, 1}^n`.
struct Evaluator {
    /// Smallest variable index present; the polynomial is checkable once it is assigned.
    trigger: usize,
    terms: Vec<(Vec<(usize, u16)>, i128)>,
}

impl Evaluator {
    /// Clears denominators; `None` when the scaled coefficients do not fit in `i128`.
    fn new(p: &Polynomial) -> Option<Self> {
        let lcm = p
            .terms()
            .iter()
            .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
        let mut terms = Vec::with_capacity(p.len());
        for (m, c) in p.terms() {
            let scaled = (c * Coeff::from_integer(lcm.clone())).to_integer();
            let vars = m
                .exponents()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(v, &e)| (v, e))
                .collect();
            terms.push((vars, scaled.to_i128()?));
        }
        let trigger = p.variables().into_iter().min().unwrap_or(0);
        Some(Evaluator { trigger, terms })
    }

    fn vanishes(&self, z: &[i8]) -> bool {
        let mut acc: i128 = 0;
        for (vars, c) in &self.terms {
            let mut sign = 1i128;
            for &(v, e) in vars {
                match z[v] {
                    0 => {
                        sign = 0;
                        break;
                    }
                    -1 if e % 2 == 1 => sign = -sign,
                    _ => {}
                }
            }
            acc += sign * c;
        }
        acc == 0
    }
}

/// Searches `{-1, 0, 1}^n` for a common root of an exact non-unit basis,
/// then decodes and re-validates the pair.
fn extract_witness(basis: &[Polynomial], matrix: &ModelMatrix) -> Result<(Option<(Kmer, Kmer)>, u64)> {
    let n = matrix.n_cols();
    let Some(evals) = basis.iter().map(Evaluator::new).collect::<Option<Vec<_>>>() else {
        return Ok((None, 0));
    };
    let (root, nodes) = find_root(
        n,
        |v, z| evals.iter().filter(|e| e.trigger == v).all(|e| e.vanishes(z)),
        |z| z.iter().any(|&x| x != 0),
    );
    let Some(z) = root else { return Ok((None, nodes)) };
    let zi: Vec<i64> = z.iter().map(|&x| x as i64).collect();
    let Ok((x, y)) = decode_witness(&zi, matrix.instance()) else {
        return Ok((None, nodes));
    };
    if is_valid_witness(&x, &y, matrix.source())? {
        Ok((Some((x, y)), nodes))
    } else {
        Ok((None, nodes))
    }
}

/// Depth-first search over `{-1, 0, 1}^n`, assigning the last variable
/// first so lex-triangular bases prune early. `holds(v, z)` checks the
/// polynomials whose smallest variable is `v` once `z[v..]` is assigned;
/// `accept` filters complete points. Stops at [`WITNESS_NODE_CAP`] nodes.
fn find_root(
    n: usize,
    holds: impl Fn(usize, &[i8]) -> bool,
    accept: impl Fn(&[i8]) -> bool,
) -> (Option<Vec<i8>>, u64) {
    let mut z = vec![0i8; n];
    let mut nodes = 0u64;
    let found = search(n, &mut z, &holds, &accept, &mut nodes);
    (found.then_some(z), nodes)
}

fn search(
    var: usize,
    z: &mut [i8],
    holds: &impl Fn(usize, &[i8]) -> bool,
    accept: &impl Fn(&[i8]) -> bool,
    nodes: &mut u64,
) -> bool {
    if var == 0 {
        return accept(z);
    }
    let v = var - 1;
    for value in [0i8, 1, -1] {
        *nodes += 1;
        if *nodes > WITNESS_NODE_CAP {
            return false;
        }
        z[v] = value;
        if holds(v, z) && search(v, z, holds, accept, nodes) {
            return true;
        }
    }
    z[v] = 0;
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{buchberger, parse_polynomial, reduce_basis};
    use crate::verdict::Status;
    use num_traits::Zero;
    use std::sync::Arc;

    fn set(inst: &Arc<HammingInstance>, words: &[&str]) -> Vec<Kmer> {
        words.iter().map(|w| Kmer::parse(w, inst).unwrap()).collect()
    }

    fn polys(n: usize, texts: &[&str]) -> Vec<Polynomial> {
        texts.iter().map(|t| parse_polynomial(t, n, ORDER).unwrap()).collect()
    }

    #[test]
    fn constraint_shapes() {
        let inst = HammingInstance::new(2, 3).unwrap();
        let sys = build_constraints(&inst);
        assert_eq!((sys.p1.len(), sys.p2.len(), sys.p3.len()), (6, 2, 2));
        assert_eq!(sys.blocks.iter().map(Vec::len).collect::<Vec<_>>(), [5, 5]);
        for (b, block) in sys.blocks.iter().enumerate() {
            for p in block {
                assert!(p.variables().iter().all(|&v| v / 3 == b));
            }
        }
        let root = [-1, 1, 0, 0, -1, 1];
        assert!(sys.all().iter().all(|p| p.evaluate(&root).is_zero()));
    }

    #[test]
    fn constraints_for_single_binary_coordinate() {
        let sys = build_constraints(&HammingInstance::new(1, 2).unwrap());
        let expected = polys(
            2,
            &["z1^3 - z1", "z2^3 - z2", "z1 + z2", "-z1^4 - 2*z1^2*z2^2 - z2^4 + 2*z1^2 + 2*z2^2"],
        );
        assert_eq!(sys.all(), expected);
    }

    #[test]
    fn closed_form_small_cases() {
        let b = closed_form_reduced_basis(&HammingInstance::new(1, 2).unwrap());
        assert_eq!(b, polys(2, &["z2^3 - z2", "z1 + z2"]));
        let b = closed_form_reduced_basis(&HammingInstance::new(1, 3).unwrap());
        assert_eq!(b, polys(3, &["z3^3 - z3", "z2^2*z3 + z2*z3^2", "z2^3 - z2", "z1 + z2 + z3"]));
        let b = closed_form_reduced_basis(&HammingInstance::new(2, 3).unwrap());
        assert_eq!(b.len(), 8);
        assert!(b.iter().any(|p| p.to_string() == "z5^2*z6 + z5*z6^2"));
    }

    #[test]
    fn closed_form_matches_buchberger_for_small_blocks() {
        for a in 2..=4 {
            let inst = HammingInstance::new(1, a).unwrap();
            let g = reduce_basis(&buchberger(&build_constraints(&inst).all(), ORDER).unwrap(), ORDER).unwrap();
            assert_eq!(g, closed_form_reduced_basis(&inst), "a = {a}");
        }
    }

    #[test]
    fn illustrative_basis_for_f_minus_4() {
        let inst = Arc::new(HammingInstance::new(2, 3).unwrap());
        let a0 = ModelMatrix::build(&set(&inst, &["02", "11"])).unwrap();
        let mut input = linear_forms(&a0);
        input.extend(build_constraints(&inst).all());
        input.push(auxiliary_polynomial(&inst).add_constant(&int(-4)));
        let g = reduced_groebner_basis(&input, ORDER).unwrap();
        let mut expected = polys(
            6,
            &["z1 + z6", "z2 + z5", "z3 - z5 - z6", "z4 + z5 + z6", "z5^2 + z5*z6 + z6^2 - 1", "z6^3 - z6"],
        );
        expected.sort_by(|p, q| ORDER.compare(p.leading_monomial().unwrap(), q.leading_monomial().unwrap()));
        assert_eq!(g, expected);
    }

    #[test]
    fn shift_identity_on_closed_form() {
        let inst = HammingInstance::new(2, 3).unwrap();
        let g = closed_form_reduced_basis(&inst);
        let f = auxiliary_polynomial(&inst);
        let r = reduce(&f, &g).unwrap();
        for i in 1..=2 {
            let shifted = reduce(&f.add_constant(&int(-2 * i)), &g).unwrap();
            assert_eq!(shifted, r.add_constant(&int(-2 * i)));
        }
    }

    #[test]
    fn illustrative_verdicts() {
        let inst = Arc::new(HammingInstance::new(2, 3).unwrap());
        let r0 = set(&inst, &["02", "11"]);
        let r1 = set(&inst, &["02", "11", "22"]);
        let (v0, transcript) = verify_groebner_with_transcript(&r0).unwrap();
        assert_eq!(v0.status, Status::NotResolving);
        let (x, y) = v0.witness.clone().expect("witness");
        assert!(is_valid_witness(&x, &y, &r0).unwrap());
        assert!(transcript.render().contains("z5^2 + z5*z6 + z6^2 - 1"));
        assert_eq!(verify_groebner(&r1).unwrap().status, Status::Resolving);

        for workers in [1, 2, 3] {
            assert!(verify_groebner_parallel(&r1, workers).unwrap().same_outcome(&verify_groebner(&r1).unwrap()));
            assert!(verify_groebner_parallel(&r0, workers).unwrap().same_outcome(&v0));
        }
    }

    #[test]
    fn single_vertex_of_k1_a2_resolves() {
        let inst = Arc::new(HammingInstance::new(1, 2).unwrap());
        assert_eq!(verify_groebner(&set(&inst, &["0"])).unwrap().status, Status::Resolving);
    }
}
