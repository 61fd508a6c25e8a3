use std::fmt;
use std::time::Duration;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kmer::{common_instance, Kmer};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Resolving,
    NotResolving,
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Resolving => "RESOLVING",
            Status::NotResolving => "NOT RESOLVING",
            Status::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Brute,
    Groebner,
    IlpExact,
    IlpFeasibility,
    IlpRandomObjective,
    HypercubeB,
    HypercubeC,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Brute => "brute",
            Method::Groebner => "groebner",
            Method::IlpExact => "ilp-exact",
            Method::IlpFeasibility => "ilp-feasibility",
            Method::IlpRandomObjective => "ilp-random-objective",
            Method::HypercubeB => "hypercube-b",
            Method::HypercubeC => "hypercube-c",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerdictStats {
    pub elapsed: Duration,
    /// Size of each reduced basis computed (Groebner), in order of `i`.
    pub basis_sizes: Vec<usize>,
    /// Search nodes explored (ILP, hypercube branch-and-bound).
    pub nodes: u64,
}

/// Outcome of a resolvability check.
#[derive(Clone, Debug)]
pub struct Verdict {
    pub status: Status,
    pub witness: Option<(Kmer, Kmer)>,
    pub method: Method,
    pub reason: Option<String>,
    pub stats: VerdictStats,
}

impl Verdict {
    pub fn resolving(method: Method) -> Self {
        Verdict {
            status: Status::Resolving,
            witness: None,
            method,
            reason: None,
            stats: VerdictStats::default(),
        }
    }

    pub fn not_resolving(method: Method, witness: Option<(Kmer, Kmer)>) -> Self {
        Verdict {
            status: Status::NotResolving,
            witness,
            method,
            reason: None,
            stats: VerdictStats::default(),
        }
    }

    pub fn inconclusive(method: Method, reason: impl Into<String>) -> Self {
        Verdict {
            status: Status::Inconclusive,
            witness: None,
            method,
            reason: Some(reason.into()),
            stats: VerdictStats::default(),
        }
    }

    pub fn with_stats(mut self, stats: VerdictStats) -> Self {
        self.stats = stats;
        self
    }

    pub fn with_reason(mut self, reason: impl Into<String>) -> Self {
        self.reason = Some(reason.into());
        self
    }

    /// Status, witness and method agree; timings are ignored.
    pub fn same_outcome(&self, other: &Verdict) -> bool {
        self.status == other.status && self.witness == other.witness && self.method == other.method
    }

    /// One-line human-readable summary, e.g. `NOT RESOLVING witness: 12 01`.
    pub fn summary_line(&self) -> String {
        match (&self.witness, &self.reason) {
            (Some((x, y)), _) => format!("{} witness: {} {}", self.status, x.render(), y.render()),
            (None, Some(reason)) if self.status != Status::Resolving => {
                format!("{} ({reason})", self.status)
            }
            _ => self.status.to_string(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "status": self.status,
            "method": self.method,
            "witness": self.witness.as_ref().map(|(x, y)| [x.render(), y.render()]),
            "reason": self.reason,
            "elapsed_s": self.stats.elapsed.as_secs_f64(),
            "basis_sizes": self.stats.basis_sizes,
            "nodes": self.stats.nodes,
        })
    }
}

/// Checks that `x != y` and `d(x, r) == d(y, r)` for every `r` in `set`.
pub fn is_valid_witness(x: &Kmer, y: &Kmer, set: &[Kmer]) -> Result<bool> {
    let instance = common_instance(set)?;
    if !instance.same_graph(x.instance()) || !instance.same_graph(y.instance()) {
        return Err(Error::InstanceMismatch);
    }
    if x == y {
        return Ok(false);
    }
    for r in set {
        if x.distance(r)? != y.distance(r)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kmer::HammingInstance;
    use std::sync::Arc;

    #[test]
    fn witness_check() {
        let inst = Arc::new(HammingInstance::new(2, 3).unwrap());
        let p = |s: &str| Kmer::parse(s, &inst).unwrap();
        let r0 = [p("02"), p("11")];
        assert!(is_valid_witness(&p("12"), &p("01"), &r0).unwrap());
        assert!(!is_valid_witness(&p("12"), &p("12"), &r0).unwrap());
        assert!(!is_valid_witness(&p("12"), &p("00"), &r0).unwrap());
    }

    #[test]
    fn summary_lines() {
        let inst = Arc::new(HammingInstance::new(2, 3).unwrap());
        let p = |s: &str| Kmer::parse(s, &inst).unwrap();
        let v = Verdict::not_resolving(Method::IlpExact, Some((p("12"), p("01"))));
        assert_eq!(v.summary_line(), "NOT RESOLVING witness: 12 01");
        assert_eq!(Verdict::resolving(Method::Brute).summary_line(), "RESOLVING");
        let json = v.to_json();
        assert_eq!(json["status"], "not-resolving");
        assert_eq!(json["witness"][1], "01");
    }
}
