//! Timing harness: random labeled test sets, per-method wall-clock runs,
//! and CSV output.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::{mpsc, Arc};
use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::groebner_verifier::{closed_form_reduced_basis, linear_forms, verify_groebner};
use crate::ilp::{build_membership_model, verify_ilp, ModeKind};
use crate::kmer::{HammingInstance, Kmer};
use crate::matrix::ModelMatrix;
use crate::oracle::{brute_force_verify, DEFAULT_BRUTE_CAP};
use crate::verdict::{Status, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BenchMethod {
    Brute,
    Groebner,
    IlpExact,
    IlpFeasibility,
}

impl BenchMethod {
    pub const ALL: [BenchMethod; 4] = [
        BenchMethod::Brute,
        BenchMethod::Groebner,
        BenchMethod::IlpExact,
        BenchMethod::IlpFeasibility,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BenchMethod::Brute => "brute",
            BenchMethod::Groebner => "groebner",
            BenchMethod::IlpExact => "ilp-exact",
            BenchMethod::IlpFeasibility => "ilp-feasibility",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == name)
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub instances: Vec<(usize, usize)>,
    pub n_resolving: usize,
    pub n_non_resolving: usize,
    pub replicates: usize,
    pub methods: Vec<BenchMethod>,
    pub seed: u64,
    pub time_cap: Option<Duration>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            instances: vec![(2, 2)],
            n_resolving: 50,
            n_non_resolving: 50,
            replicates: 5,
            methods: BenchMethod::ALL.to_vec(),
            seed: 0,
            time_cap: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LabeledSet {
    pub id: usize,
    pub kmers: Vec<Kmer>,
    pub truth: Status,
}

/// Largest random set size drawn for `H(k, a)`: the upper bound
/// `(k - 1) * floor(a / 2) + (a - 1)` on the metric dimension, plus 2.
pub fn max_set_size(k: usize, a: usize) -> usize {
    (k - 1) * (a / 2) + (a - 1) + 2
}

const DRAWS_PER_SET: usize = 1000;

/// Draws uniform random vertex subsets, sizes uniform in
/// `1..=max_set_size`, labels each with the brute-force oracle, and keeps
/// them until both quotas are filled.
pub fn generate_test_sets(
    instance: &Arc<HammingInstance>,
    n_res: usize,
    n_non: usize,
    seed: u64,
) -> Result<Vec<LabeledSet>> {
    let count = instance.vertex_count();
    if count > DEFAULT_BRUTE_CAP {
        return Err(Error::InstanceTooLarge {
            vertices: count,
            cap: DEFAULT_BRUTE_CAP,
        });
    }
    let count = count as usize;
    let bound = max_set_size(instance.k(), instance.a()).min(count);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_draws = DRAWS_PER_SET * (n_res + n_non + 1);
    let (mut have_res, mut have_non) = (0, 0);
    let mut out = Vec::with_capacity(n_res + n_non);
    let mut draws = 0;
    while have_res < n_res || have_non < n_non {
        if draws == max_draws {
            let label = if have_res < n_res { "resolving" } else { "non-resolving" };
            return Err(Error::QuotaUnreachable { label, draws });
        }
        draws += 1;
        let size = rng.gen_range(1..=bound);
        let kmers: Vec<Kmer> = sample(&mut rng, count, size)
            .into_iter()
            .map(|i| Kmer::from_index(instance, i as u128))
            .collect();
        let truth = brute_force_verify(&kmers)?.status;
        let slot = match truth {
            Status::Resolving => &mut have_res,
            _ => &mut have_non,
        };
        let quota = if truth == Status::Resolving { n_res } else { n_non };
        if *slot < quota {
            *slot += 1;
            out.push(LabeledSet {
                id: out.len(),
                kmers,
                truth,
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub k: usize,
    pub a: usize,
    pub n_nodes: u128,
    pub set_id: usize,
    pub set_size: usize,
    pub truth_label: Status,
    pub method: BenchMethod,
    /// `None` when the run hit the time cap.
    pub verdict: Option<Status>,
    pub time_seconds: f64,
    pub build_seconds: f64,
    pub replicate: usize,
}

impl BenchRecord {
    /// `Some(agreement)` for a definite verdict; `None` for Inconclusive or a timeout.
    pub fn agrees(&self) -> Option<bool> {
        match self.verdict {
            Some(Status::Inconclusive) | None => None,
            Some(v) => Some(v == self.truth_label),
        }
    }

    fn verdict_label(&self) -> &'static str {
        match self.verdict {
            Some(s) => status_label(s),
            None => "timeout",
        }
    }
}

fn status_label(s: Status) -> &'static str {
    match s {
        Status::Resolving => "resolving",
        Status::NotResolving => "not-resolving",
        Status::Inconclusive => "inconclusive",
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub k: usize,
    pub a: usize,
    pub n_nodes: u128,
    pub method: BenchMethod,
    pub mean_s: f64,
    pub sd_s: f64,
}

#[derive(Clone, Debug, Default)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
    pub summary: Vec<SummaryRow>,
}

pub const RECORDS_HEADER: &str =
    "k,a,n_nodes,set_id,set_size,truth_label,method,verdict,agrees,time_seconds,build_seconds,replicate";
pub const SUMMARY_HEADER: &str = "k,a,n_nodes,method,mean_s,sd_s";

impl BenchReport {
    pub fn records_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# random sets: uniform vertex subsets, size uniform in 1..=(k-1)*floor(a/2)+(a-1)+2, labeled by brute force"
        );
        let _ = writeln!(out, "{RECORDS_HEADER}");
        for r in &self.records {
            let agrees = match r.agrees() {
                Some(true) => "true",
                Some(false) => "false",
                None => "inconclusive",
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{:.6},{:.6},{}",
                r.k,
                r.a,
                r.n_nodes,
                r.set_id,
                r.set_size,
                status_label(r.truth_label),
                r.method.name(),
                r.verdict_label(),
                agrees,
                r.time_seconds,
                r.build_seconds,
                r.replicate
            );
        }
        out
    }

    pub fn summary_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{SUMMARY_HEADER}");
        for s in &self.summary {
            let _ = writeln!(
                out,
                "{},{},{},{},{:.6},{:.6}",
                s.k,
                s.a,
                s.n_nodes,
                s.method.name(),
                s.mean_s,
                s.sd_s
            );
        }
        out
    }

    /// Writes `records.csv` and `summary.csv` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (name, body) in [("records.csv", self.records_csv()), ("summary.csv", self.summary_csv())] {
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }
}

fn run_method(method: BenchMethod, set: &[Kmer], seed: u64) -> Result<Verdict> {
    match method {
        BenchMethod::Brute => brute_force_verify(set),
        BenchMethod::Groebner => verify_groebner(set),
        BenchMethod::IlpExact => verify_ilp(set, ModeKind::PowersOfTwo, None, None),
        BenchMethod::IlpFeasibility => verify_ilp(set, ModeKind::Feasibility, Some(seed), None),
    }
}

/// Time spent building the method's model alone.
fn build_time(method: BenchMethod, set: &[Kmer], seed: u64) -> Result<f64> {
    let start = Instant::now();
    match method {
        BenchMethod::Brute => {}
        BenchMethod::Groebner => {
            let m = ModelMatrix::build(set)?;
            let _ = (linear_forms(&m), closed_form_reduced_basis(m.instance()));
        }
        BenchMethod::IlpExact => {
            build_membership_model(set, ModeKind::PowersOfTwo, None)?;
        }
        BenchMethod::IlpFeasibility => {
            build_membership_model(set, ModeKind::Feasibility, Some(seed))?;
        }
    }
    Ok(start.elapsed().as_secs_f64())
}

/// Runs one method, abandoning it after `cap`. An abandoned run keeps its
/// thread until it finishes on its own.
fn timed(method: BenchMethod, set: &[Kmer], seed: u64, cap: Option<Duration>) -> Result<(Option<Status>, f64)> {
    let Some(cap) = cap else {
        let start = Instant::now();
        let v = run_method(method, set, seed)?;
        return Ok((Some(v.status), start.elapsed().as_secs_f64()));
    };
    let (tx, rx) = mpsc::channel();
    let owned = set.to_vec();
    let start = Instant::now();
    std::thread::spawn(move || {
        let _ = tx.send(run_method(method, &owned, seed));
    });
    match rx.recv_timeout(cap) {
        Ok(v) => Ok((Some(v?.status), start.elapsed().as_secs_f64())),
        Err(_) => Ok((None, cap.as_secs_f64())),
    }
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Every set times every method times every replicate, run sequentially.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    let mut report = BenchReport::default();
    for (idx, &(k, a)) in cfg.instances.iter().enumerate() {
        let instance = Arc::new(HammingInstance::new(k, a)?);
        let set_seed = cfg.seed.wrapping_add(idx as u64);
        let sets = generate_test_sets(&instance, cfg.n_resolving, cfg.n_non_resolving, set_seed)?;
        log::info!("bench H({k},{a}): {} sets", sets.len());
        let first = report.records.len();
        for set in &sets {
            let run_seed = set_seed.wrapping_mul(1_000_003).wrapping_add(set.id as u64);
            for &method in &cfg.methods {
                let build_seconds = build_time(method, &set.kmers, run_seed)?;
                for replicate in 0..cfg.replicates {
                    let (verdict, time_seconds) = timed(method, &set.kmers, run_seed, cfg.time_cap)?;
                    report.records.push(BenchRecord {
                        k,
                        a,
                        n_nodes: instance.vertex_count(),
                        set_id: set.id,
                        set_size: set.kmers.len(),
                        truth_label: set.truth,
                        method,
                        verdict,
                        time_seconds,
                        build_seconds,
                        replicate,
                    });
                }
            }
        }
        for &method in &cfg.methods {
            let times: Vec<f64> = report.records[first..]
                .iter()
                .filter(|r| r.method == method)
                .map(|r| r.time_seconds)
                .collect();
            let (mean_s, sd_s) = mean_sd(&times);
            report.summary.push(SummaryRow {
                k,
                a,
                n_nodes: instance.vertex_count(),
                method,
                mean_s,
                sd_s,
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_sets_are_labeled_and_bounded() {
        let inst = Arc::new(HammingInstance::new(2, 2).unwrap());
        let sets = generate_test_sets(&inst, 50, 50, 3).unwrap();
        assert_eq!(sets.len(), 100);
        assert!(sets.iter().all(|s| (1..=4).contains(&s.kmers.len())));
        let res = sets.iter().filter(|s| s.truth == Status::Resolving).count();
        assert_eq!(res, 50);
        for s in &sets {
            assert_eq!(brute_force_verify(&s.kmers).unwrap().status, s.truth);
            let mut idx: Vec<u128> = s.kmers.iter().map(Kmer::index).collect();
            idx.sort_unstable();
            idx.dedup();
            assert_eq!(idx.len(), s.kmers.len());
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let inst = Arc::new(HammingInstance::new(3, 3).unwrap());
        let a = generate_test_sets(&inst, 5, 5, 11).unwrap();
        let b = generate_test_sets(&inst, 5, 5, 11).unwrap();
        let key = |v: &[LabeledSet]| {
            v.iter()
                .map(|s| (s.kmers.iter().map(Kmer::index).collect::<Vec<_>>(), s.truth))
                .collect::<Vec<_>>()
        };
        assert_eq!(key(&a), key(&b));
    }

    #[test]
    fn non_resolving_quota_starves_on_two_vertices() {
        let inst = Arc::new(HammingInstance::new(1, 2).unwrap());
        match generate_test_sets(&inst, 1, 1, 0) {
            Err(Error::QuotaUnreachable { label, .. }) => assert_eq!(label, "non-resolving"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn record_count_and_summary_shape() {
        let cfg = BenchConfig {
            instances: vec![(2, 2)],
            n_resolving: 2,
            n_non_resolving: 2,
            replicates: 2,
            methods: vec![BenchMethod::Brute, BenchMethod::Groebner, BenchMethod::IlpExact],
            seed: 5,
            time_cap: None,
        };
        let report = run_bench(&cfg).unwrap();
        assert_eq!(report.records.len(), 24);
        assert!(report.records.iter().all(|r| r.agrees() == Some(true)));
        assert_eq!(report.summary.len(), 3);
        let summary = report.summary_csv();
        assert_eq!(summary.lines().next(), Some(SUMMARY_HEADER));
        assert_eq!(summary.lines().count(), 4);
        let records = report.records_csv();
        assert!(records.lines().nth(1) == Some(RECORDS_HEADER));
    }

    #[test]
    fn sample_standard_deviation() {
        let (m, s) = mean_sd(&[1.0, 2.0, 3.0, 4.0]);
        assert!((m - 2.5).abs() < 1e-12);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert_eq!(mean_sd(&[7.0]), (7.0, 0.0));
    }
}
