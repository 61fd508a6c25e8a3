//! Reader and writer for the `hrs-set v1` vertex-set format.
//!
//! ```text
//! # comment
//! k=2 a=3
//! 02
//! 11
//! ```
//!
//! The header may carry `alphabet=<a distinct chars>`. Without an alphabet,
//! k-mers are digit strings when `a <= 10` and comma-separated integers otherwise.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kmer::{dedup_kmers, HammingInstance, Kmer};

#[derive(Clone, Debug)]
pub struct VertexSet {
    pub instance: Arc<HammingInstance>,
    pub kmers: Vec<Kmer>,
}

impl VertexSet {
    pub fn new(instance: Arc<HammingInstance>, kmers: Vec<Kmer>) -> Self {
        VertexSet { instance, kmers }
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse_lines(text.lines().map(|l| Ok(l.to_string())))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let lines = BufReader::new(file)
            .lines()
            .map(|l| l.map_err(|e| Error::io(path, e)));
        parse_lines(lines)
    }

    pub fn render(&self) -> String {
        let mut out = String::from("# hrs-set v1\n");
        out.push_str(&self.instance.header_line());
        out.push('\n');
        for v in &self.kmers {
            out.push_str(&v.render());
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut file = File::create(path).map_err(|e| Error::io(path, e))?;
        file.write_all(self.render().as_bytes())
            .map_err(|e| Error::io(path, e))
    }
}

/// Parses a `k=<int> a=<int> [alphabet=<chars>]` header line.
pub fn parse_header(line: &str, line_no: usize) -> Result<HammingInstance> {
    let mut k = None;
    let mut a = None;
    let mut alphabet = None;
    for field in line.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| Error::parse(line_no, format!("malformed header field {field:?}")))?;
        let int = |v: &str| {
            v.parse::<usize>()
                .map_err(|_| Error::parse(line_no, format!("bad integer {v:?} for {key}")))
        };
        match key {
            "k" => k = Some(int(value)?),
            "a" => a = Some(int(value)?),
            "alphabet" => alphabet = Some(value.to_string()),
            _ => return Err(Error::parse(line_no, format!("unknown header key {key:?}"))),
        }
    }
    let k = k.ok_or_else(|| Error::parse(line_no, "header is missing k"))?;
    let a = a.ok_or_else(|| Error::parse(line_no, "header is missing a"))?;
    match alphabet {
        Some(alpha) => HammingInstance::with_alphabet(k, a, &alpha),
        None => HammingInstance::new(k, a),
    }
}

fn parse_lines(lines: impl Iterator<Item = Result<String>>) -> Result<VertexSet> {
    let mut instance: Option<Arc<HammingInstance>> = None;
    let mut kmers = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let line_no = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        match &instance {
            None => instance = Some(Arc::new(parse_header(trimmed, line_no)?)),
            Some(inst) => {
                let v = Kmer::parse(trimmed, inst).map_err(|e| Error::parse(line_no, e.to_string()))?;
                kmers.push(v);
            }
        }
    }
    let instance = instance.ok_or_else(|| Error::parse(0, "missing k=/a= header"))?;
    if kmers.is_empty() {
        return Err(Error::EmptySet);
    }
    let kmers = dedup_kmers(&kmers);
    Ok(VertexSet { instance, kmers })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_digits_with_comments() {
        let set = VertexSet::parse("# R0\nk=2 a=3\n02\n# inner\n11\n\n").unwrap();
        assert_eq!(set.instance.k(), 2);
        let words: Vec<String> = set.kmers.iter().map(Kmer::render).collect();
        assert_eq!(words, ["02", "11"]);
    }

    #[test]
    fn parse_alphabet_and_dedup() {
        let set = VertexSet::parse("k=3 a=4 alphabet=acgt\nacg\ntta\nacg\n").unwrap();
        assert_eq!(set.kmers.len(), 2);
        assert_eq!(set.kmers[1].symbols(), &[3, 3, 0]);
    }

    #[test]
    fn parse_integer_lists() {
        let set = VertexSet::parse("k=2 a=11\n10,3\n0,0\n").unwrap();
        assert_eq!(set.kmers[0].symbols(), &[10, 3]);
        let again = VertexSet::parse(&set.render()).unwrap();
        assert_eq!(again.kmers, set.kmers);
    }

    #[test]
    fn errors_carry_line_numbers() {
        match VertexSet::parse("k=2 a=3\n02\n0x\n") {
            Err(Error::Parse { line: 3, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(VertexSet::parse("k=2\n02\n").is_err());
        assert!(matches!(VertexSet::parse("k=2 a=3\n"), Err(Error::EmptySet)));
    }
}
