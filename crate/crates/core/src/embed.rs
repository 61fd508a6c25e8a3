//! Distance-vector embedding `Phi(v) = (d(v, r))_{r in R}` of k-mers.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kmer::{HammingInstance, Kmer};
use crate::setfile::VertexSet;
use crate::verdict::Method;

/// The shipped 77-element resolving set of octapeptides, in `hrs-set v1` format.
pub const OCTAPEPTIDE_77: &str = include_str!("../data/octapeptide77.hrs");

/// Name accepted by [`BasisSource::parse`] for the shipped set.
pub const SHIPPED_NAME: &str = "shipped-octapeptide-77";

const CHUNK_LINES: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    ShippedOctapeptide77,
    UserFile(PathBuf),
    ShrinkOutput,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BasisSource {
    Shipped,
    File(PathBuf),
}

impl BasisSource {
    /// `shipped-octapeptide-77` or a path.
    pub fn parse(text: &str) -> Self {
        if text == SHIPPED_NAME {
            BasisSource::Shipped
        } else {
            BasisSource::File(PathBuf::from(text))
        }
    }
}

/// An ordered resolving set used as embedding coordinates.
#[derive(Clone, Debug)]
pub struct EmbeddingBasis {
    pub set: Vec<Kmer>,
    pub instance: Arc<HammingInstance>,
    pub provenance: Provenance,
    /// Method that verified the set, if any.
    pub verified: Option<Method>,
}

impl EmbeddingBasis {
    pub fn new(set: VertexSet, provenance: Provenance) -> Self {
        EmbeddingBasis {
            set: set.kmers,
            instance: set.instance,
            provenance,
            verified: None,
        }
    }

    pub fn dimension(&self) -> usize {
        self.set.len()
    }

    pub fn into_set(self) -> VertexSet {
        VertexSet::new(self.instance, self.set)
    }
}

pub fn load_basis(source: &BasisSource) -> Result<EmbeddingBasis> {
    match source {
        BasisSource::Shipped => Ok(EmbeddingBasis::new(
            VertexSet::parse(OCTAPEPTIDE_77)?,
            Provenance::ShippedOctapeptide77,
        )),
        BasisSource::File(path) => Ok(EmbeddingBasis::new(
            VertexSet::read(path)?,
            Provenance::UserFile(path.clone()),
        )),
    }
}

/// `Phi(v)`: entry `i` is the Hamming distance from `v` to `basis.set[i]`.
pub fn embed(v: &Kmer, basis: &EmbeddingBasis) -> Result<Vec<u32>> {
    if !v.instance().same_graph(&basis.instance) {
        return Err(Error::InstanceMismatch);
    }
    let s = v.symbols();
    Ok(basis
        .set
        .iter()
        .map(|r| r.symbols().iter().zip(s).filter(|(x, y)| x != y).count() as u32)
        .collect())
}

fn embed_line(text: &str, line: usize, basis: &EmbeddingBasis) -> Result<String> {
    let at = |e: Error| Error::AtLine {
        line,
        source: Box::new(e),
    };
    let v = Kmer::parse(text, &basis.instance).map_err(at)?;
    let phi = embed(&v, basis).map_err(at)?;
    let mut row = String::with_capacity(text.len() + 3 * phi.len());
    row.push_str(text.trim());
    for x in phi {
        row.push(',');
        row.push_str(&x.to_string());
    }
    row.push('\n');
    Ok(row)
}

fn flush_chunk(
    chunk: &mut Vec<(usize, String)>,
    basis: &EmbeddingBasis,
    out: &mut impl Write,
    output: &Path,
) -> Result<usize> {
    let rows: Vec<String> = chunk
        .par_iter()
        .map(|(line, text)| embed_line(text, *line, basis))
        .collect::<Result<_>>()?;
    for row in &rows {
        out.write_all(row.as_bytes()).map_err(|e| Error::io(output, e))?;
    }
    chunk.clear();
    Ok(rows.len())
}

/// Embeds one sequence per line of `input` into the CSV `output` with
/// header `sequence,phi_1,...,phi_n`. Blank lines are skipped. Returns the
/// number of rows written. Input is processed in fixed-size chunks, so
/// memory does not grow with the input length.
pub fn embed_file(input: impl AsRef<Path>, basis: &EmbeddingBasis, output: impl AsRef<Path>) -> Result<usize> {
    let (input, output) = (input.as_ref(), output.as_ref());
    let reader = BufReader::new(File::open(input).map_err(|e| Error::io(input, e))?);
    let mut out = BufWriter::new(File::create(output).map_err(|e| Error::io(output, e))?);
    let mut header = String::from("sequence");
    for i in 1..=basis.dimension() {
        header.push_str(&format!(",phi_{i}"));
    }
    header.push('\n');
    out.write_all(header.as_bytes()).map_err(|e| Error::io(output, e))?;
    let mut chunk = Vec::with_capacity(CHUNK_LINES);
    let mut count = 0;
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(input, e))?;
        if line.trim().is_empty() {
            continue;
        }
        chunk.push((i + 1, line));
        if chunk.len() == CHUNK_LINES {
            count += flush_chunk(&mut chunk, basis, &mut out, output)?;
        }
    }
    count += flush_chunk(&mut chunk, basis, &mut out, output)?;
    out.flush().map_err(|e| Error::io(output, e))?;
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis_r1() -> EmbeddingBasis {
        EmbeddingBasis::new(VertexSet::parse("k=2 a=3\n02\n11\n22\n").unwrap(), Provenance::ShrinkOutput)
    }

    #[test]
    fn distances_to_the_basis() {
        let b = basis_r1();
        let v = Kmer::parse("00", &b.instance).unwrap();
        assert_eq!(embed(&v, &b).unwrap(), vec![1, 2, 2]);
        assert_eq!(embed(&b.set[1], &b).unwrap()[1], 0);
    }

    #[test]
    fn instance_mismatch() {
        let b = basis_r1();
        let other = Arc::new(HammingInstance::new(2, 4).unwrap());
        let v = Kmer::parse("00", &other).unwrap();
        assert!(matches!(embed(&v, &b), Err(Error::InstanceMismatch)));
    }

    #[test]
    fn shipped_basis_shape() {
        let b = load_basis(&BasisSource::Shipped).unwrap();
        assert_eq!(b.dimension(), 77);
        assert_eq!((b.instance.k(), b.instance.a()), (8, 20));
        assert_eq!(b.set[0].render(), "aaaraaaa");
        assert_eq!(b.provenance, Provenance::ShippedOctapeptide77);
        assert!(b.verified.is_none());
        assert_eq!(BasisSource::parse(SHIPPED_NAME), BasisSource::Shipped);
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("in.txt");
        let output = dir.path().join("out.csv");
        std::fs::write(&input, "aaaraaaa\ncccccccc\n\nwwwwwwww\n").unwrap();
        let b = load_basis(&BasisSource::Shipped).unwrap();
        assert_eq!(embed_file(&input, &b, &output).unwrap(), 3);
        let text = std::fs::read_to_string(&output).unwrap();
        let rows: Vec<&str> = text.lines().collect();
        assert_eq!(rows.len(), 4);
        assert!(rows[0].starts_with("sequence,phi_1,phi_2,"));
        assert!(rows[0].ends_with(",phi_77"));
        assert!(rows.iter().all(|r| r.split(',').count() == 78));
        assert!(rows[1].starts_with("aaaraaaa,0,"));
    }

    #[test]
    fn unknown_symbol_reports_its_line() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("in.txt");
        std::fs::write(&input, "aaaraaaa\naaaZaaaa\n").unwrap();
        let b = load_basis(&BasisSource::Shipped).unwrap();
        let err = embed_file(&input, &b, dir.path().join("o.csv")).unwrap_err();
        match err {
            Error::AtLine { line, source } => {
                assert_eq!(line, 2);
                assert!(matches!(*source, Error::UnknownSymbol { position: 3, .. }));
            }
            other => panic!("unexpected error {other}"),
        }
    }
}
