use std::sync::Arc;
use std::time::Instant;

use super::model::{build_membership_model, ModeKind};
use super::solver::{solve_with, SolveOptions, SolveStatus};
use crate::error::{Error, Result};
use crate::kmer::{common_instance, HammingInstance, Kmer};
use crate::verdict::{is_valid_witness, Method, Verdict, VerdictStats};

/// Splits a blockwise difference of canonical vectors into the two k-mers
/// it separates: `+1` at offset `p` gives `x` the symbol `p`, `-1` at `q`
/// gives `y` the symbol `q`, zero blocks give both the symbol 0.
pub fn decode_witness(z: &[i64], instance: &Arc<HammingInstance>) -> Result<(Kmer, Kmer)> {
    let (k, a) = (instance.k(), instance.a());
    if z.len() != k * a {
        return Err(Error::NotAWitness(format!("expected {} entries, found {}", k * a, z.len())));
    }
    let mut xs = Vec::with_capacity(k);
    let mut ys = Vec::with_capacity(k);
    for (b, block) in z.chunks(a).enumerate() {
        let plus: Vec<usize> = (0..a).filter(|&i| block[i] == 1).collect();
        let minus: Vec<usize> = (0..a).filter(|&i| block[i] == -1).collect();
        let others = block.iter().filter(|&&v| v != 0 && v != 1 && v != -1).count();
        match (plus.as_slice(), minus.as_slice(), others) {
            ([], [], 0) => {
                xs.push(0);
                ys.push(0);
            }
            ([p], [q], 0) => {
                xs.push(*p as u8);
                ys.push(*q as u8);
            }
            _ => {
                return Err(Error::NotAWitness(format!(
                    "block {} is not a difference of canonical vectors",
                    b + 1
                )))
            }
        }
    }
    if xs == ys {
        return Err(Error::NotAWitness("zero vector".into()));
    }
    Ok((Kmer::new(instance, xs)?, Kmer::new(instance, ys)?))
}

/// Maximum number of coefficient draws in random-objective mode.
pub const MAX_DRAWS: u64 = 3;

fn method_for(mode: ModeKind) -> Method {
    match mode {
        ModeKind::PowersOfTwo => Method::IlpExact,
        ModeKind::RandomNormal => Method::IlpRandomObjective,
        ModeKind::Feasibility => Method::IlpFeasibility,
    }
}

/// Resolvability through the built-in exact solver.
///
/// Any point the solver returns, or a kernel point rejected only by the
/// `delta` row, is decoded and re-checked by direct distance comparison
/// before `NotResolving` is reported.
pub fn verify_ilp(set: &[Kmer], mode: ModeKind, seed: Option<u64>, budget: Option<u64>) -> Result<Verdict> {
    let start = Instant::now();
    let instance = common_instance(set)?;
    let method = method_for(mode);
    let draws = if mode == ModeKind::RandomNormal { MAX_DRAWS } else { 1 };
    let mut nodes = 0;
    let mut last_reason = String::new();
    for draw in 0..draws {
        let seed = seed.map(|s| s.wrapping_add(draw));
        let model = build_membership_model(set, mode, seed)?;
        let out = solve_with(&model, SolveOptions {
            node_budget: budget,
            stop_at_first: true,
            break_symmetry: true,
        })?;
        nodes += out.nodes_explored;
        let stats = || VerdictStats {
            elapsed: start.elapsed(),
            basis_sizes: Vec::new(),
            nodes,
        };
        let candidate = out.z.clone().or_else(|| out.near_miss.clone());
        if let Some(z) = candidate {
            match decode_witness(&z, &instance) {
                Ok((x, y)) if is_valid_witness(&x, &y, set)? => {
                    let v = Verdict::not_resolving(method, Some((x, y))).with_stats(stats());
                    return Ok(if out.z.is_none() {
                        v.with_reason("point found below the delta threshold, re-validated exactly")
                    } else {
                        v
                    });
                }
                _ => {
                    last_reason = format!("draw {} returned a point that failed re-validation", draw + 1);
                    continue;
                }
            }
        }
        return Ok(match out.status {
            SolveStatus::BudgetExhausted => {
                Verdict::inconclusive(method, format!("node budget exhausted after {nodes} nodes")).with_stats(stats())
            }
            _ => Verdict::resolving(method).with_stats(stats()),
        });
    }
    Ok(Verdict::inconclusive(method, last_reason).with_stats(VerdictStats {
        elapsed: start.elapsed(),
        basis_sizes: Vec::new(),
        nodes,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verdict::Status;

    fn inst23() -> Arc<HammingInstance> {
        Arc::new(HammingInstance::new(2, 3).unwrap())
    }

    fn set(inst: &Arc<HammingInstance>, words: &[&str]) -> Vec<Kmer> {
        words.iter().map(|w| Kmer::parse(w, inst).unwrap()).collect()
    }

    #[test]
    fn decodes_illustrative_pairs() {
        let inst = inst23();
        let cases: [(&[i64], &str, &str); 3] = [
            (&[-1, 1, 0, 0, -1, 1], "12", "01"),
            (&[0, 1, -1, 1, -1, 0], "10", "21"),
            (&[1, 0, -1, 1, 0, -1], "00", "22"),
        ];
        for (z, x, y) in cases {
            let (a, b) = decode_witness(z, &inst).unwrap();
            assert_eq!((a.render().as_str(), b.render().as_str()), (x, y));
        }
    }

    #[test]
    fn rejects_non_witnesses() {
        let inst = inst23();
        assert!(decode_witness(&[0; 6], &inst).is_err());
        assert!(decode_witness(&[1, 1, -1, 0, 0, 0], &inst).is_err());
        assert!(decode_witness(&[1, -1, 0], &inst).is_err());
        assert!(decode_witness(&[2, -2, 0, 0, 0, 0], &inst).is_err());
    }

    #[test]
    fn verdicts_on_illustrative_sets() {
        let inst = inst23();
        let r0 = set(&inst, &["02", "11"]);
        let r1 = set(&inst, &["02", "11", "22"]);
        for (mode, seed) in [
            (ModeKind::PowersOfTwo, None),
            (ModeKind::Feasibility, Some(1)),
            (ModeKind::Feasibility, None),
            (ModeKind::RandomNormal, Some(5)),
        ] {
            let v = verify_ilp(&r0, mode, seed, None).unwrap();
            assert_eq!(v.status, Status::NotResolving);
            let (x, y) = v.witness.unwrap();
            assert!(is_valid_witness(&x, &y, &r0).unwrap());
            assert_eq!(verify_ilp(&r1, mode, seed, None).unwrap().status, Status::Resolving);
        }
        let v = verify_ilp(&r0, ModeKind::PowersOfTwo, None, Some(1)).unwrap();
        assert_eq!(v.status, Status::Inconclusive);
    }
}
