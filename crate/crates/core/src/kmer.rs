//! k-mers over `{0, ..., a-1}` and the Hamming metric on them.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Parameters of the Hamming graph `H(k, a)`.
///
/// The optional alphabet only affects how k-mers are read and printed;
/// internally every symbol is its index `0..a`.
#[derive(Clone, Debug)]
pub struct HammingInstance {
    k: usize,
    a: usize,
    alphabet: Option<Vec<char>>,
}

/// Largest alphabet supported; symbols are stored as bytes.
pub const MAX_ALPHABET: usize = 256;

impl HammingInstance {
    pub fn new(k: usize, a: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInstance("k must be at least 1".into()));
        }
        if a < 2 {
            return Err(Error::InvalidInstance("a must be at least 2".into()));
        }
        if a > MAX_ALPHABET {
            return Err(Error::InvalidInstance(format!(
                "a = {a} exceeds the supported maximum {MAX_ALPHABET}"
            )));
        }
        Ok(HammingInstance {
            k,
            a,
            alphabet: None,
        })
    }

    pub fn with_alphabet(k: usize, a: usize, alphabet: &str) -> Result<Self> {
        let mut inst = Self::new(k, a)?;
        let symbols: Vec<char> = alphabet.chars().collect();
        if symbols.len() != a {
            return Err(Error::InvalidInstance(format!(
                "alphabet {alphabet:?} has {} symbols, expected {a}",
                symbols.len()
            )));
        }
        for (i, c) in symbols.iter().enumerate() {
            if symbols[..i].contains(c) {
                return Err(Error::InvalidInstance(format!(
                    "alphabet symbol {c:?} is repeated"
                )));
            }
            if c.is_whitespace() || c.is_control() || *c == ',' || *c == '#' {
                return Err(Error::InvalidInstance(format!(
                    "alphabet symbol {c:?} is not printable"
                )));
            }
        }
        inst.alphabet = Some(symbols);
        Ok(inst)
    }

    /// The 20 amino acids, in the order used by the shipped octapeptide set.
    pub fn amino_acids(k: usize) -> Result<Self> {
        Self::with_alphabet(k, 20, AMINO_ACIDS)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn alphabet(&self) -> Option<&[char]> {
        self.alphabet.as_deref()
    }

    /// Number of variables `a*k` of the polynomial and integer formulations.
    pub fn dimension(&self) -> usize {
        self.a * self.k
    }

    /// `a^k`, saturating at `u128::MAX`.
    pub fn vertex_count(&self) -> u128 {
        let mut n: u128 = 1;
        for _ in 0..self.k {
            n = n.saturating_mul(self.a as u128);
        }
        n
    }

    /// Same graph (alphabet is presentation only).
    pub fn same_graph(&self, other: &HammingInstance) -> bool {
        self.k == other.k && self.a == other.a
    }

    fn symbol_of(&self, c: char) -> Option<u8> {
        match &self.alphabet {
            Some(alpha) => alpha.iter().position(|&x| x == c).map(|i| i as u8),
            None => c
                .to_digit(10)
                .filter(|&d| (d as usize) < self.a)
                .map(|d| d as u8),
        }
    }

    /// True when k-mers are written as comma-separated integers.
    fn uses_integer_lists(&self) -> bool {
        self.alphabet.is_none() && self.a > 10
    }

    /// Header line of the `hrs-set v1` format.
    pub fn header_line(&self) -> String {
        match &self.alphabet {
            Some(alpha) => format!(
                "k={} a={} alphabet={}",
                self.k,
                self.a,
                alpha.iter().collect::<String>()
            ),
            None => format!("k={} a={}", self.k, self.a),
        }
    }
}

impl PartialEq for HammingInstance {
    fn eq(&self, other: &Self) -> bool {
        self.same_graph(other)
    }
}

impl Eq for HammingInstance {}

impl fmt::Display for HammingInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "H({},{})", self.k, self.a)
    }
}

pub const AMINO_ACIDS: &str = "arndcqeghilkmfpstwyv";

/// A vertex of `H(k, a)`.
#[derive(Clone)]
pub struct Kmer {
    symbols: Vec<u8>,
    instance: Arc<HammingInstance>,
}

impl Kmer {
    pub fn new(instance: &Arc<HammingInstance>, symbols: Vec<u8>) -> Result<Self> {
        if symbols.len() != instance.k {
            return Err(Error::LengthMismatch {
                expected: instance.k,
                found: symbols.len(),
            });
        }
        if let Some((position, &s)) = symbols
            .iter()
            .enumerate()
            .find(|(_, &s)| s as usize >= instance.a)
        {
            return Err(Error::UnknownSymbol {
                symbol: s.to_string(),
                position,
            });
        }
        Ok(Kmer {
            symbols,
            instance: Arc::clone(instance),
        })
    }

    /// Parses a k-mer written in the instance's alphabet.
    pub fn parse(text: &str, instance: &Arc<HammingInstance>) -> Result<Self> {
        let text = text.trim();
        let symbols = if instance.uses_integer_lists() {
            let parts: Vec<&str> = text.split(',').map(str::trim).collect();
            if parts.len() != instance.k {
                return Err(Error::LengthMismatch {
                    expected: instance.k,
                    found: parts.len(),
                });
            }
            parts
                .iter()
                .enumerate()
                .map(|(position, p)| {
                    p.parse::<usize>()
                        .ok()
                        .filter(|&s| s < instance.a)
                        .map(|s| s as u8)
                        .ok_or_else(|| Error::UnknownSymbol {
                            symbol: p.to_string(),
                            position,
                        })
                })
                .collect::<Result<Vec<u8>>>()?
        } else {
            let chars: Vec<char> = text.chars().collect();
            if chars.len() != instance.k {
                return Err(Error::LengthMismatch {
                    expected: instance.k,
                    found: chars.len(),
                });
            }
            chars
                .iter()
                .enumerate()
                .map(|(position, &c)| {
                    instance.symbol_of(c).ok_or_else(|| Error::UnknownSymbol {
                        symbol: c.to_string(),
                        position,
                    })
                })
                .collect::<Result<Vec<u8>>>()?
        };
        Ok(Kmer {
            symbols,
            instance: Arc::clone(instance),
        })
    }

    /// Inverse of the lexicographic vertex numbering, first coordinate most significant.
    pub fn from_index(instance: &Arc<HammingInstance>, mut index: u128) -> Self {
        let a = instance.a as u128;
        let mut symbols = vec![0u8; instance.k];
        for s in symbols.iter_mut().rev() {
            *s = (index % a) as u8;
            index /= a;
        }
        Kmer {
            symbols,
            instance: Arc::clone(instance),
        }
    }

    pub fn index(&self) -> u128 {
        let a = self.instance.a as u128;
        self.symbols
            .iter()
            .fold(0u128, |acc, &s| acc * a + s as u128)
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn instance(&self) -> &Arc<HammingInstance> {
        &self.instance
    }

    pub fn k(&self) -> usize {
        self.symbols.len()
    }

    pub fn render(&self) -> String {
        match &self.instance.alphabet {
            Some(alpha) => self.symbols.iter().map(|&s| alpha[s as usize]).collect(),
            None if self.instance.a <= 10 => self
                .symbols
                .iter()
                .map(|&s| char::from(b'0' + s))
                .collect(),
            None => self
                .symbols
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(","),
        }
    }

    /// Column-major vectorization of the `a x k` one-hot matrix: block `j`
    /// has a single 1 at offset `self[j]`.
    pub fn one_hot_vec(&self) -> Vec<u8> {
        let a = self.instance.a;
        let mut out = vec![0u8; a * self.symbols.len()];
        for (j, &s) in self.symbols.iter().enumerate() {
            out[j * a + s as usize] = 1;
        }
        out
    }

    /// Number of coordinates where the two k-mers differ.
    pub fn distance(&self, other: &Kmer) -> Result<usize> {
        if !self.instance.same_graph(&other.instance) {
            return Err(Error::InstanceMismatch);
        }
        Ok(symbol_distance(&self.symbols, &other.symbols))
    }
}

impl PartialEq for Kmer {
    fn eq(&self, other: &Self) -> bool {
        self.symbols == other.symbols && self.instance.same_graph(&other.instance)
    }
}

impl Eq for Kmer {}

impl std::hash::Hash for Kmer {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.symbols.hash(state);
    }
}

impl PartialOrd for Kmer {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Kmer {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.symbols.cmp(&other.symbols)
    }
}

impl fmt::Display for Kmer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for Kmer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Kmer({})", self.render())
    }
}

pub fn parse_kmer(text: &str, instance: &Arc<HammingInstance>) -> Result<Kmer> {
    Kmer::parse(text, instance)
}

pub fn hamming_distance(u: &Kmer, v: &Kmer) -> Result<usize> {
    u.distance(v)
}

#[inline]
pub(crate) fn symbol_distance(u: &[u8], v: &[u8]) -> usize {
    u.iter().zip(v).filter(|(x, y)| x != y).count()
}

/// Checks that every k-mer lives in the same graph and returns that instance.
pub fn common_instance(set: &[Kmer]) -> Result<Arc<HammingInstance>> {
    let first = set.first().ok_or(Error::EmptySet)?;
    if set
        .iter()
        .any(|v| !v.instance.same_graph(&first.instance))
    {
        return Err(Error::InstanceMismatch);
    }
    Ok(Arc::clone(&first.instance))
}

/// Removes repeated k-mers, keeping first occurrences in order.
pub fn dedup_kmers(set: &[Kmer]) -> Vec<Kmer> {
    let mut seen = std::collections::HashSet::with_capacity(set.len());
    let mut out = Vec::with_capacity(set.len());
    for v in set {
        if seen.insert(v.symbols.clone()) {
            out.push(v.clone());
        }
    }
    if out.len() < set.len() {
        log::warn!(
            "removed {} duplicate vertices from the input set",
            set.len() - out.len()
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(k: usize, a: usize) -> Arc<HammingInstance> {
        Arc::new(HammingInstance::new(k, a).unwrap())
    }

    #[test]
    fn parse_digits() {
        let inst = h(2, 3);
        assert_eq!(Kmer::parse("02", &inst).unwrap().symbols(), &[0, 2]);
        assert!(matches!(
            Kmer::parse("03", &inst),
            Err(Error::UnknownSymbol { position: 1, .. })
        ));
        assert!(matches!(
            Kmer::parse("021", &inst),
            Err(Error::LengthMismatch { expected: 2, found: 3 })
        ));
    }

    #[test]
    fn parse_amino_acids() {
        let inst = Arc::new(HammingInstance::amino_acids(8).unwrap());
        let v = Kmer::parse("aaaraaaa", &inst).unwrap();
        assert_eq!(v.symbols(), &[0, 0, 0, 1, 0, 0, 0, 0]);
        assert_eq!(v.render(), "aaaraaaa");
        assert!(Kmer::parse("aaaZaaaa", &inst).is_err());
    }

    #[test]
    fn parse_integer_lists_for_large_alphabets() {
        let inst = h(3, 12);
        let v = Kmer::parse("11,0,7", &inst).unwrap();
        assert_eq!(v.symbols(), &[11, 0, 7]);
        assert_eq!(v.render(), "11,0,7");
        assert!(Kmer::parse("12,0,7", &inst).is_err());
    }

    #[test]
    fn instance_validation() {
        assert!(HammingInstance::new(0, 2).is_err());
        assert!(HammingInstance::new(1, 1).is_err());
        assert!(HammingInstance::with_alphabet(2, 3, "abb").is_err());
        assert!(HammingInstance::with_alphabet(2, 3, "ab").is_err());
        assert!(HammingInstance::with_alphabet(2, 3, "abc").is_ok());
    }

    #[test]
    fn distances() {
        let inst = h(2, 3);
        let p = |s| Kmer::parse(s, &inst).unwrap();
        assert_eq!(hamming_distance(&p("02"), &p("11")).unwrap(), 2);
        assert_eq!(hamming_distance(&p("02"), &p("02")).unwrap(), 0);
        assert_eq!(hamming_distance(&p("00"), &p("22")).unwrap(), 2);
        let other = Kmer::parse("020", &h(3, 3)).unwrap();
        assert!(matches!(
            hamming_distance(&p("02"), &other),
            Err(Error::InstanceMismatch)
        ));
    }

    #[test]
    fn one_hot_rows() {
        let inst = h(2, 3);
        let p = |s| Kmer::parse(s, &inst).unwrap();
        assert_eq!(p("02").one_hot_vec(), vec![1, 0, 0, 0, 0, 1]);
        assert_eq!(p("11").one_hot_vec(), vec![0, 1, 0, 0, 1, 0]);
        assert_eq!(p("22").one_hot_vec(), vec![0, 0, 1, 0, 0, 1]);
    }

    #[test]
    fn index_round_trip() {
        let inst = h(3, 4);
        for i in 0..64u128 {
            assert_eq!(Kmer::from_index(&inst, i).index(), i);
        }
        assert_eq!(Kmer::from_index(&inst, 6).symbols(), &[0, 1, 2]);
    }
}
