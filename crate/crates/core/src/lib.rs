//! Certifying whether a set of vertices resolves a Hamming graph `H(k, a)`.

pub mod bench;
pub mod cli;
pub mod embed;
pub mod error;
pub mod groebner_verifier;
pub mod ilp;
pub mod kmer;
pub mod matrix;
pub mod oracle;
pub mod poly;
pub mod setfile;
pub mod shrink;
pub mod verdict;

pub use error::{Error, Result};
pub use groebner_verifier::{verify_groebner, verify_groebner_parallel};
pub use ilp::verify_ilp;
pub use kmer::{hamming_distance, parse_kmer, HammingInstance, Kmer};
pub use matrix::{build_a, ModelMatrix};
pub use oracle::brute_force_verify;
pub use verdict::{Method, Status, Verdict};
