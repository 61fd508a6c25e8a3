//! Shrinking a known resolving set by binary search over subset sizes.
//!
//! At each size `s` a batch of random `s`-subsets of the current best set is
//! screened with the integer-programming verifier; the first passing subset
//! (in sample order) becomes the new best set. The final set is confirmed
//! with the Groebner verifier.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::groebner_verifier::verify_groebner_parallel;
use crate::ilp::{verify_ilp, ModeKind};
use crate::kmer::{common_instance, dedup_kmers, Kmer};
use crate::oracle::brute_force_verify;
use crate::verdict::Status;

/// Instances up to this many vertices get a brute-force pre-check of the input.
pub const PRECHECK_CAP: u128 = 10_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ScreenMethod {
    #[default]
    IlpExact,
    IlpFeasibility,
}

#[derive(Clone, Debug)]
pub struct ShrinkConfig {
    pub samples_per_size: usize,
    pub seed: u64,
    pub screen_method: ScreenMethod,
    pub confirm_with_groebner: bool,
    /// Wall-clock budget for the search; the size in progress counts as failed when it runs out.
    pub time_budget: Option<Duration>,
    /// Node budget per ILP screen; an exhausted screen counts as a failure.
    pub node_budget: Option<u64>,
    pub workers: usize,
}

impl Default for ShrinkConfig {
    fn default() -> Self {
        ShrinkConfig {
            samples_per_size: 1000,
            seed: 0,
            screen_method: ScreenMethod::IlpExact,
            confirm_with_groebner: true,
            time_budget: None,
            node_budget: None,
            workers: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShrinkStep {
    pub lower: usize,
    pub upper: usize,
    pub size: usize,
    pub tried: usize,
    pub found: bool,
}

#[derive(Clone, Debug)]
pub struct ShrinkTrace {
    pub steps: Vec<ShrinkStep>,
    pub final_set: Vec<Kmer>,
    pub confirmed: bool,
    /// The time budget ran out before the bracket closed.
    pub budget_exhausted: bool,
}

impl ShrinkTrace {
    /// Line-oriented log, one `step` line per iteration.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str("# samples are drawn from the current best set (re-anchored after each success)\n");
        for s in &self.steps {
            let _ = writeln!(
                out,
                "step L={} U={} s={} tried={} found={}",
                s.lower,
                s.upper,
                s.size,
                s.tried,
                u8::from(s.found)
            );
        }
        let _ = writeln!(
            out,
            "final size={} confirmed={} budget_exhausted={}",
            self.final_set.len(),
            u8::from(self.confirmed),
            u8::from(self.budget_exhausted)
        );
        out
    }
}

fn binomial(n: usize, s: usize) -> u128 {
    let s = s.min(n - s);
    let mut c: u128 = 1;
    for i in 0..s {
        c = c.saturating_mul((n - i) as u128) / (i as u128 + 1);
        if c == u128::MAX {
            break;
        }
    }
    c
}

/// Up to `n` distinct uniformly random `s`-subsets of `set`, each keeping
/// the order of `set`. When there are at most `n` subsets in total, all of
/// them are returned (in random order).
pub fn sample_subsets(set: &[Kmer], s: usize, n: usize, seed: u64) -> Result<Vec<Vec<Kmer>>> {
    if s == 0 || s > set.len() {
        return Err(Error::BadSize { size: s, len: set.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = binomial(set.len(), s);
    let mut picks: Vec<Vec<usize>> = Vec::new();
    if total <= n as u128 {
        picks = itertools::Itertools::combinations(0..set.len(), s).collect();
        picks.shuffle(&mut rng);
    } else {
        let mut seen = HashSet::with_capacity(n);
        let mut idx: Vec<usize> = (0..set.len()).collect();
        // duplicates are rare unless n is close to the number of subsets
        let max_draws = n.saturating_mul(64);
        let mut draws = 0;
        while picks.len() < n && draws < max_draws {
            draws += 1;
            let (head, _) = idx.partial_shuffle(&mut rng, s);
            let mut pick = head.to_vec();
            pick.sort_unstable();
            if seen.insert(pick.clone()) {
                picks.push(pick);
            }
        }
    }
    Ok(picks
        .into_iter()
        .map(|p| p.into_iter().map(|i| set[i].clone()).collect())
        .collect())
}

fn screen(subset: &[Kmer], cfg: &ShrinkConfig, seed: u64) -> Result<bool> {
    let exact = || verify_ilp(subset, ModeKind::PowersOfTwo, None, cfg.node_budget);
    match cfg.screen_method {
        ScreenMethod::IlpExact => Ok(exact()?.status == Status::Resolving),
        ScreenMethod::IlpFeasibility => {
            let quick = verify_ilp(subset, ModeKind::Feasibility, Some(seed), cfg.node_budget)?;
            Ok(quick.status == Status::Resolving && exact()?.status == Status::Resolving)
        }
    }
}

/// Binary search from `L = 1`, `U = |R|` with `s = (L + U) / 2` until `L = U - 1`.
///
/// Duplicates in `set` are dropped first. When the instance has at most
/// [`PRECHECK_CAP`] vertices the input is checked by brute force and
/// rejected with `InputNotResolving` if it fails.
pub fn shrink(set: &[Kmer], cfg: &ShrinkConfig) -> Result<ShrinkTrace> {
    let start = Instant::now();
    let instance = common_instance(set)?;
    if cfg.samples_per_size == 0 {
        return Err(Error::BadSize { size: 0, len: set.len() });
    }
    let mut best = dedup_kmers(set);
    if instance.vertex_count() <= PRECHECK_CAP && brute_force_verify(&best)?.status != Status::Resolving {
        return Err(Error::InputNotResolving);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.max(1))
        .build()
        .map_err(|e| Error::InvalidInstance(format!("worker pool: {e}")))?;
    let (mut lower, mut upper) = (1, best.len());
    let mut steps = Vec::new();
    let mut budget_exhausted = false;
    let out_of_time = || cfg.time_budget.is_some_and(|b| start.elapsed() >= b);
    while lower + 1 < upper {
        if out_of_time() {
            budget_exhausted = true;
            break;
        }
        let size = (lower + upper) / 2;
        let step_seed = cfg.seed.wrapping_add(steps.len() as u64);
        let samples = sample_subsets(&best, size, cfg.samples_per_size, step_seed)?;
        // first non-failure in sample order; later screens are cancelled
        let first = pool.install(|| {
            samples
                .par_iter()
                .enumerate()
                .map(|(n, sub)| {
                    let r = if out_of_time() {
                        None
                    } else {
                        Some(screen(sub, cfg, step_seed.wrapping_add(n as u64)))
                    };
                    (n, r)
                })
                .find_first(|(_, r)| !matches!(r, Some(Ok(false))))
        });
        let hit = match first {
            None => None,
            Some((n, Some(Ok(_)))) => Some(n),
            Some((_, Some(Err(e)))) => return Err(e),
            Some((_, None)) => {
                budget_exhausted = true;
                None
            }
        };
        let tried = hit.map_or(samples.len(), |n| n + 1);
        steps.push(ShrinkStep {
            lower,
            upper,
            size,
            tried,
            found: hit.is_some(),
        });
        match hit {
            Some(n) => {
                best = samples[n].clone();
                upper = size;
            }
            None => lower = size,
        }
        log::debug!("shrink s={size} found={} L={lower} U={upper}", hit.is_some());
        if budget_exhausted {
            break;
        }
    }
    let confirmed = !budget_exhausted
        && cfg.confirm_with_groebner
        && verify_groebner_parallel(&best, cfg.workers.max(1))?.status == Status::Resolving;
    Ok(ShrinkTrace {
        steps,
        final_set: best,
        confirmed,
        budget_exhausted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kmer::HammingInstance;
    use std::sync::Arc;

    fn words(inst: &Arc<HammingInstance>, ws: &[&str]) -> Vec<Kmer> {
        ws.iter().map(|w| Kmer::parse(w, inst).unwrap()).collect()
    }

    fn r1() -> Vec<Kmer> {
        words(&Arc::new(HammingInstance::new(2, 3).unwrap()), &["02", "11", "22"])
    }

    #[test]
    fn all_small_subsets_are_returned() {
        let r = r1();
        let subs = sample_subsets(&r, 2, 1000, 5).unwrap();
        assert_eq!(subs.len(), 3);
        let distinct: HashSet<_> = subs.iter().map(|s| s.iter().map(Kmer::render).collect::<Vec<_>>()).collect();
        assert_eq!(distinct.len(), 3);
        assert_eq!(sample_subsets(&r, 3, 5, 1).unwrap(), vec![r.clone()]);
    }

    #[test]
    fn sampling_is_deterministic_and_distinct() {
        let inst = Arc::new(HammingInstance::new(2, 4).unwrap());
        let all: Vec<Kmer> = (0..16).map(|i| Kmer::from_index(&inst, i)).collect();
        let a = sample_subsets(&all, 5, 40, 9).unwrap();
        assert_eq!(a, sample_subsets(&all, 5, 40, 9).unwrap());
        assert_eq!(a.len(), 40);
        let distinct: HashSet<Vec<u128>> = a.iter().map(|s| s.iter().map(Kmer::index).collect()).collect();
        assert_eq!(distinct.len(), 40);
    }

    #[test]
    fn bad_sizes() {
        let r = r1();
        assert!(matches!(sample_subsets(&r, 0, 1, 0), Err(Error::BadSize { .. })));
        assert!(matches!(sample_subsets(&r, 4, 1, 0), Err(Error::BadSize { .. })));
    }

    #[test]
    fn minimal_input_is_returned_unchanged() {
        let r = r1();
        let t = shrink(&r, &ShrinkConfig::default()).unwrap();
        assert_eq!(t.final_set, r);
        assert!(t.confirmed);
        assert_eq!(t.steps.len(), 1);
        assert!(!t.steps[0].found);
    }

    #[test]
    fn single_vertex_returns_immediately() {
        let inst = Arc::new(HammingInstance::new(1, 2).unwrap());
        let t = shrink(&words(&inst, &["0"]), &ShrinkConfig::default()).unwrap();
        assert!(t.steps.is_empty());
        assert_eq!(t.final_set.len(), 1);
    }

    #[test]
    fn non_resolving_input_is_rejected() {
        let inst = Arc::new(HammingInstance::new(2, 3).unwrap());
        let r0 = words(&inst, &["00", "11"]);
        assert!(matches!(shrink(&r0, &ShrinkConfig::default()), Err(Error::InputNotResolving)));
    }

    #[test]
    fn trace_lines() {
        let inst = Arc::new(HammingInstance::new(2, 3).unwrap());
        let all: Vec<Kmer> = (0..9).map(|i| Kmer::from_index(&inst, i)).collect();
        let cfg = ShrinkConfig {
            seed: 7,
            ..ShrinkConfig::default()
        };
        let t = shrink(&all, &cfg).unwrap();
        assert_eq!(t.final_set.len(), 3);
        let text = t.render();
        assert!(text.lines().any(|l| l.starts_with("step L=1 U=9 s=5 tried=1 found=1")));
    }
}
