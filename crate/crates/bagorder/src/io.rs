//! Corpus loading and deterministic table persistence.
//!
//! All tables serialize as TSV with a one-line version header and rows
//! sorted by key ids, so identical tables always produce byte-identical
//! files. Totals, distances, and context counts are derived from the
//! stored rows on load.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use bagorder_core::corpus::{parse_corpus, Sentence, Vocab};
use bagorder_core::tables::{NGramTables, PairKey, PairTable};
use bagorder_core::{Error as CoreError, TokenId};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const VOCAB_FILE: &str = "vocab.tsv";
pub const PAIRS_FILE: &str = "pairs.tsv";
pub const NGRAMS_FILE: &str = "ngrams.tsv";

pub const VOCAB_HEADER: &str = "bagorder-vocab v1";
pub const PAIRS_HEADER: &str = "bagorder-pairs v1";
pub const NGRAMS_HEADER: &str = "bagorder-ngrams v1";

/// Errors from file loading, parsing, and saving.
#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}:1: expected header `{expected}`, found `{found}`")]
    Version {
        path: PathBuf,
        expected: &'static str,
        found: String,
    },
}

impl IoError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        IoError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn parse(path: &Path, line: usize, message: impl Into<String>) -> Self {
        IoError::Parse {
            path: path.to_path_buf(),
            line,
            message: message.into(),
        }
    }
}

/// Load a whitespace-tokenized corpus file, interning into `vocab`.
pub fn load_corpus(path: &Path, vocab: &mut Vocab) -> Result<Vec<Sentence>, IoError> {
    let text = fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    parse_corpus(&text, vocab).map_err(|e| match e {
        CoreError::ReservedToken { line } => {
            IoError::parse(path, line, "reserved marker token `*` in corpus text")
        }
        other => IoError::parse(path, 0, other.to_string()),
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), IoError> {
    fs::write(path, contents).map_err(|e| IoError::io(path, e))
}

/// Lines of a table file after its verified version header, with
/// 1-based line numbers.
fn read_table_lines<'a>(
    path: &Path,
    text: &'a str,
    header: &'static str,
) -> Result<Vec<(usize, &'a str)>, IoError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, first)) if first == header => {}
        Some((_, first)) => {
            return Err(IoError::Version {
                path: path.to_path_buf(),
                expected: header,
                found: first.to_string(),
            })
        }
        None => {
            return Err(IoError::Version {
                path: path.to_path_buf(),
                expected: header,
                found: String::new(),
            })
        }
    }
    Ok(lines
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| (i + 1, l))
        .collect())
}

fn parse_count(path: &Path, line: usize, field: &str) -> Result<u64, IoError> {
    let count: u64 = field
        .parse()
        .map_err(|_| IoError::parse(path, line, format!("count is not an integer: `{field}`")))?;
    if count == 0 {
        return Err(IoError::parse(path, line, "count must be at least 1"));
    }
    Ok(count)
}

/// Write the vocabulary: `id<TAB>surface`, one row per id, id 0 = `*`.
pub fn save_vocab(vocab: &Vocab, path: &Path) -> Result<(), IoError> {
    let mut out = String::from(VOCAB_HEADER);
    out.push('\n');
    for (id, surface) in vocab.iter() {
        out.push_str(&format!("{}\t{}\n", id.0, surface));
    }
    write_file(path, &out)
}

pub fn load_vocab(path: &Path) -> Result<Vocab, IoError> {
    let text = fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    let rows = read_table_lines(path, &text, VOCAB_HEADER)?;
    let mut surfaces = Vec::with_capacity(rows.len());
    for (expected_id, (line, row)) in rows.into_iter().enumerate() {
        let (id_field, surface) = row
            .split_once('\t')
            .ok_or_else(|| IoError::parse(path, line, "expected `id<TAB>surface`"))?;
        let id: usize = id_field
            .parse()
            .map_err(|_| IoError::parse(path, line, format!("bad id `{id_field}`")))?;
        if id != expected_id {
            return Err(IoError::parse(
                path,
                line,
                format!("ids must be consecutive from 0, found {id}"),
            ));
        }
        if surface.is_empty() || surface.contains(|c: char| c.is_ascii_whitespace()) {
            return Err(IoError::parse(path, line, "surface must be a single token"));
        }
        surfaces.push(surface.to_string());
    }
    Vocab::from_surfaces(&surfaces)
        .ok_or_else(|| IoError::parse(path, 1, "id 0 must be `*` and surfaces must be distinct"))
}

/// Write the pair table: `left<TAB>right<TAB>distance<TAB>count`, rows
/// sorted by (left, right, distance).
pub fn save_pairs(table: &PairTable, path: &Path) -> Result<(), IoError> {
    let mut out = String::from(PAIRS_HEADER);
    out.push('\n');
    for (key, count) in table.iter() {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            key.left.0, key.right.0, key.distance, count
        ));
    }
    write_file(path, &out)
}

pub fn load_pairs(path: &Path) -> Result<PairTable, IoError> {
    let text = fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    let rows = read_table_lines(path, &text, PAIRS_HEADER)?;
    let mut parsed = Vec::with_capacity(rows.len());
    let mut seen = BTreeSet::new();
    for (line, row) in rows {
        let fields: Vec<&str> = row.split('\t').collect();
        let [left, right, distance, count] = fields[..] else {
            return Err(IoError::parse(
                path,
                line,
                "expected `left<TAB>right<TAB>distance<TAB>count`",
            ));
        };
        let left: u32 = left
            .parse()
            .map_err(|_| IoError::parse(path, line, format!("bad token id `{left}`")))?;
        let right: u32 = right
            .parse()
            .map_err(|_| IoError::parse(path, line, format!("bad token id `{right}`")))?;
        let distance: u32 = distance
            .parse()
            .map_err(|_| IoError::parse(path, line, format!("bad distance `{distance}`")))?;
        if distance == 0 {
            return Err(IoError::parse(path, line, "distance must be at least 1"));
        }
        let count = parse_count(path, line, count)?;
        let key = PairKey::new(TokenId(left), TokenId(right), distance);
        if !seen.insert(key) {
            return Err(IoError::parse(path, line, "duplicate pair key"));
        }
        parsed.push((key, count));
    }
    Ok(PairTable::from_counts(parsed).expect("rows validated"))
}

/// Write the n-gram tables: `k<TAB>id1 id2 … idk<TAB>count`, rows sorted
/// by (k, ids).
pub fn save_ngrams(tables: &NGramTables, path: &Path) -> Result<(), IoError> {
    let mut out = String::from(NGRAMS_HEADER);
    out.push('\n');
    for k in 1..=tables.order() {
        for (gram, count) in tables.iter_k(k) {
            let ids: Vec<String> = gram.iter().map(|t| t.0.to_string()).collect();
            out.push_str(&format!("{}\t{}\t{}\n", k, ids.join(" "), count));
        }
    }
    write_file(path, &out)
}

/// Load n-gram tables. The order is the largest gram length present;
/// token totals and context counts are re-derived from the rows.
pub fn load_ngrams(path: &Path) -> Result<NGramTables, IoError> {
    let text = fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    let rows = read_table_lines(path, &text, NGRAMS_HEADER)?;
    let mut parsed = Vec::with_capacity(rows.len());
    let mut seen = BTreeSet::new();
    for (line, row) in rows {
        let fields: Vec<&str> = row.split('\t').collect();
        let [k, ids, count] = fields[..] else {
            return Err(IoError::parse(
                path,
                line,
                "expected `k<TAB>id1 id2 … idk<TAB>count`",
            ));
        };
        let k: usize = k
            .parse()
            .map_err(|_| IoError::parse(path, line, format!("bad gram length `{k}`")))?;
        let gram = ids
            .split(' ')
            .map(|id| {
                id.parse::<u32>()
                    .map(TokenId)
                    .map_err(|_| IoError::parse(path, line, format!("bad token id `{id}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if gram.is_empty() || gram.len() != k {
            return Err(IoError::parse(
                path,
                line,
                format!("gram has {} ids but k = {k}", gram.len()),
            ));
        }
        let count = parse_count(path, line, count)?;
        if !seen.insert(gram.clone()) {
            return Err(IoError::parse(path, line, "duplicate gram"));
        }
        parsed.push((gram, count));
    }
    Ok(NGramTables::from_counts(parsed).expect("rows validated"))
}

/// The trained artifacts as one on-disk directory.
#[derive(Debug, Clone, PartialEq)]
pub struct TableSet {
    pub vocab: Vocab,
    pub pairs: PairTable,
    pub ngrams: NGramTables,
}

impl TableSet {
    /// Write `vocab.tsv`, `pairs.tsv`, and `ngrams.tsv` into a directory,
    /// creating it if needed.
    pub fn save(&self, dir: &Path) -> Result<(), IoError> {
        fs::create_dir_all(dir).map_err(|e| IoError::io(dir, e))?;
        save_vocab(&self.vocab, &dir.join(VOCAB_FILE))?;
        save_pairs(&self.pairs, &dir.join(PAIRS_FILE))?;
        save_ngrams(&self.ngrams, &dir.join(NGRAMS_FILE))?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<TableSet, IoError> {
        Ok(TableSet {
            vocab: load_vocab(&dir.join(VOCAB_FILE))?,
            pairs: load_pairs(&dir.join(PAIRS_FILE))?,
            ngrams: load_ngrams(&dir.join(NGRAMS_FILE))?,
        })
    }

    /// SHA-256 of each table file, for the reproducibility header.
    pub fn checksums(dir: &Path) -> Result<Vec<(&'static str, String)>, IoError> {
        [VOCAB_FILE, PAIRS_FILE, NGRAMS_FILE]
            .iter()
            .map(|name| {
                let path = dir.join(name);
                let bytes = fs::read(&path).map_err(|e| IoError::io(&path, e))?;
                let digest = Sha256::digest(&bytes);
                let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
                Ok((*name, hex))
            })
            .collect()
    }
}
