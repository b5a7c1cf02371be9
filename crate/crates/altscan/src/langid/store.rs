//! Versioned binary container for trained models: an 8-byte magic header,
//! a family tag, the label set, then family-specific parameters. All
//! numbers little-endian; strings length-prefixed UTF-8. Training is
//! deterministic and the maps are ordered, so saving the same model twice
//! produces identical bytes.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::ngram::ContextCounts;
use super::{
    CharNgramModel, HashedLinearModel, HashedLinearParams, LabelSet, NaiveBayesModel, Predictor,
};
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"ALTSCN01";
const FAMILY_NAIVE_BAYES: u8 = 1;
const FAMILY_CHAR_NGRAM: u8 = 2;
const FAMILY_HASHED_LINEAR: u8 = 3;

/// Any trained model, for storage and family-agnostic prediction.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyModel {
    NaiveBayes(NaiveBayesModel),
    CharNgram(CharNgramModel),
    HashedLinear(HashedLinearModel),
}

impl Predictor for AnyModel {
    fn label_set(&self) -> &LabelSet {
        match self {
            AnyModel::NaiveBayes(m) => m.label_set(),
            AnyModel::CharNgram(m) => m.label_set(),
            AnyModel::HashedLinear(m) => m.label_set(),
        }
    }

    fn predict(&self, text: &str) -> Vec<f64> {
        match self {
            AnyModel::NaiveBayes(m) => m.predict(text),
            AnyModel::CharNgram(m) => m.predict(text),
            AnyModel::HashedLinear(m) => m.predict(text),
        }
    }
}

impl AnyModel {
    pub fn family(&self) -> &'static str {
        match self {
            AnyModel::NaiveBayes(_) => "naive-bayes",
            AnyModel::CharNgram(_) => "char-ngram",
            AnyModel::HashedLinear(_) => "hashed-linear",
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut writer = BufWriter::new(File::create(path)?);
        self.write_to(&mut writer)?;
        writer.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_from(&mut BufReader::new(File::open(path)?))
    }

    pub fn write_to(&self, writer: &mut impl Write) -> Result<()> {
        writer.write_all(MAGIC)?;
        match self {
            AnyModel::NaiveBayes(m) => {
                write_u8(writer, FAMILY_NAIVE_BAYES)?;
                write_labels(writer, &m.labels)?;
                write_usize(writer, m.n_min)?;
                write_usize(writer, m.n_max)?;
                write_f64(writer, m.alpha)?;
                write_f64_slice(writer, &m.log_priors)?;
                write_usize(writer, m.totals.len())?;
                for &t in &m.totals {
                    write_u64(writer, t)?;
                }
                write_usize(writer, m.counts.len())?;
                for (gram, counts) in &m.counts {
                    write_str(writer, gram)?;
                    for &c in counts {
                        write_u64(writer, c)?;
                    }
                }
            }
            AnyModel::CharNgram(m) => {
                write_u8(writer, FAMILY_CHAR_NGRAM)?;
                write_labels(writer, &m.labels)?;
                write_usize(writer, m.order)?;
                write_f64(writer, m.smoothing)?;
                write_f64_slice(writer, &m.log_priors)?;
                write_usize(writer, m.vocab.len())?;
                for &c in &m.vocab {
                    write_char(writer, c)?;
                }
                for table in &m.tables {
                    write_usize(writer, table.len())?;
                    for (context, counts) in table {
                        write_str(writer, context)?;
                        write_u64(writer, counts.total)?;
                        write_usize(writer, counts.next.len())?;
                        for (&c, &count) in &counts.next {
                            write_char(writer, c)?;
                            write_u64(writer, count)?;
                        }
                    }
                }
            }
            AnyModel::HashedLinear(m) => {
                write_u8(writer, FAMILY_HASHED_LINEAR)?;
                write_labels(writer, &m.labels)?;
                let p = &m.params;
                write_usize(writer, p.n_min)?;
                write_usize(writer, p.n_max)?;
                write_usize(writer, p.bucket_count)?;
                write_usize(writer, p.dim)?;
                write_usize(writer, p.epochs)?;
                write_f64(writer, p.learning_rate)?;
                write_u64(writer, p.seed)?;
                write_f64_slice(writer, &m.embeddings)?;
                write_f64_slice(writer, &m.output)?;
            }
        }
        Ok(())
    }

    pub fn read_from(reader: &mut impl Read) -> Result<Self> {
        let mut magic = [0u8; 8];
        reader.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::BadModelFile("unrecognized header".into()));
        }
        let family = read_u8(reader)?;
        let labels = read_labels(reader)?;
        match family {
            FAMILY_NAIVE_BAYES => {
                let n_min = read_usize(reader)?;
                let n_max = read_usize(reader)?;
                let alpha = read_f64(reader)?;
                let log_priors = read_f64_vec(reader, labels.len())?;
                let total_count = read_usize(reader)?;
                if total_count != labels.len() {
                    return Err(Error::BadModelFile("total count mismatch".into()));
                }
                let mut totals = Vec::with_capacity(labels.len());
                for _ in 0..total_count {
                    totals.push(read_u64(reader)?);
                }
                let gram_count = read_usize(reader)?;
                let mut counts = BTreeMap::new();
                for _ in 0..gram_count {
                    let gram = read_str(reader)?;
                    let mut row = Vec::with_capacity(labels.len());
                    for _ in 0..labels.len() {
                        row.push(read_u64(reader)?);
                    }
                    counts.insert(gram, row);
                }
                Ok(AnyModel::NaiveBayes(NaiveBayesModel {
                    labels,
                    n_min,
                    n_max,
                    alpha,
                    log_priors,
                    counts,
                    totals,
                }))
            }
            FAMILY_CHAR_NGRAM => {
                let order = read_usize(reader)?;
                let smoothing = read_f64(reader)?;
                let log_priors = read_f64_vec(reader, labels.len())?;
                let vocab_len = read_usize(reader)?;
                let mut vocab = BTreeSet::new();
                for _ in 0..vocab_len {
                    vocab.insert(read_char(reader)?);
                }
                let mut tables = Vec::with_capacity(labels.len());
                for _ in 0..labels.len() {
                    let context_count = read_usize(reader)?;
                    let mut table = BTreeMap::new();
                    for _ in 0..context_count {
                        let context = read_str(reader)?;
                        let total = read_u64(reader)?;
                        let pair_count = read_usize(reader)?;
                        let mut next = BTreeMap::new();
                        for _ in 0..pair_count {
                            let c = read_char(reader)?;
                            next.insert(c, read_u64(reader)?);
                        }
                        table.insert(context, ContextCounts { total, next });
                    }
                    tables.push(table);
                }
                Ok(AnyModel::CharNgram(CharNgramModel {
                    labels,
                    order,
                    smoothing,
                    log_priors,
                    tables,
                    vocab,
                }))
            }
            FAMILY_HASHED_LINEAR => {
                let params = HashedLinearParams {
                    n_min: read_usize(reader)?,
                    n_max: read_usize(reader)?,
                    bucket_count: read_usize(reader)?,
                    dim: read_usize(reader)?,
                    epochs: read_usize(reader)?,
                    learning_rate: read_f64(reader)?,
                    seed: read_u64(reader)?,
                };
                if !params.bucket_count.is_power_of_two() {
                    return Err(Error::BadModelFile("bucket count not a power of two".into()));
                }
                let embeddings = read_f64_vec(reader, params.bucket_count * params.dim)?;
                let output = read_f64_vec(reader, labels.len() * params.dim)?;
                Ok(AnyModel::HashedLinear(HashedLinearModel {
                    labels,
                    params,
                    embeddings,
                    output,
                }))
            }
            other => Err(Error::BadModelFile(format!("unknown model family {other}"))),
        }
    }
}

fn write_u8(w: &mut impl Write, v: u8) -> Result<()> {
    Ok(w.write_all(&[v])?)
}

fn write_u32(w: &mut impl Write, v: u32) -> Result<()> {
    Ok(w.write_all(&v.to_le_bytes())?)
}

fn write_u64(w: &mut impl Write, v: u64) -> Result<()> {
    Ok(w.write_all(&v.to_le_bytes())?)
}

fn write_usize(w: &mut impl Write, v: usize) -> Result<()> {
    write_u64(w, v as u64)
}

fn write_f64(w: &mut impl Write, v: f64) -> Result<()> {
    Ok(w.write_all(&v.to_le_bytes())?)
}

fn write_f64_slice(w: &mut impl Write, values: &[f64]) -> Result<()> {
    write_usize(w, values.len())?;
    for &v in values {
        write_f64(w, v)?;
    }
    Ok(())
}

fn write_str(w: &mut impl Write, s: &str) -> Result<()> {
    write_u32(w, s.len() as u32)?;
    Ok(w.write_all(s.as_bytes())?)
}

fn write_char(w: &mut impl Write, c: char) -> Result<()> {
    write_u32(w, c as u32)
}

fn write_labels(w: &mut impl Write, labels: &LabelSet) -> Result<()> {
    write_usize(w, labels.len())?;
    for label in labels.labels() {
        write_str(w, label)?;
    }
    Ok(())
}

fn read_u8(r: &mut impl Read) -> Result<u8> {
    let mut buf = [0u8; 1];
    r.read_exact(&mut buf)?;
    Ok(buf[0])
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

fn read_usize(r: &mut impl Read) -> Result<usize> {
    let v = read_u64(r)?;
    usize::try_from(v).map_err(|_| Error::BadModelFile(format!("length {v} too large")))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(f64::from_le_bytes(buf))
}

fn read_f64_vec(r: &mut impl Read, expected: usize) -> Result<Vec<f64>> {
    let len = read_usize(r)?;
    if len != expected {
        return Err(Error::BadModelFile(format!(
            "expected {expected} values, file declares {len}"
        )));
    }
    let mut values = Vec::with_capacity(len.min(1 << 20));
    for _ in 0..len {
        values.push(read_f64(r)?);
    }
    Ok(values)
}

fn read_str(r: &mut impl Read) -> Result<String> {
    let len = read_u32(r)? as usize;
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf)?;
    String::from_utf8(buf).map_err(|_| Error::BadModelFile("invalid UTF-8 string".into()))
}

fn read_char(r: &mut impl Read) -> Result<char> {
    let v = read_u32(r)?;
    char::from_u32(v).ok_or_else(|| Error::BadModelFile(format!("invalid char {v:#x}")))
}

fn read_labels(r: &mut impl Read) -> Result<LabelSet> {
    let count = read_usize(r)?;
    let mut labels = Vec::with_capacity(count.min(1 << 16));
    for _ in 0..count {
        labels.push(read_str(r)?);
    }
    Ok(LabelSet::new(labels))
}
