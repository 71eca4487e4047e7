//! Prefix-frequency model.
//!
//! A [`FrequencyModel`] is a character trie where every node carries the
//! aggregate corpus frequency of all words starting with the node's path,
//! i.e. the answer to a wildcard query `prefix*` against the corpus. The
//! root holds the total token count (the frequency of the empty prefix).
//!
//! Models come from three sources:
//!
//! - word lists (`word<TAB>count`), via [`ingest_word_list`] / [`read_word_list`];
//! - raw text split by a [`TokenizerConfig`], via [`ingest_raw_text`];
//! - explicit prefix tables (`prefix<TAB>count`), via [`load_prefix_table`] /
//!   [`read_prefix_table`], which is how small hand-written fixtures are loaded.
//!
//! Strings are NFC-normalized on the way in and on every query. Case folding
//! is a model-level flag applied per character at ingestion and at query time.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{BufRead, Read, Write};

use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

/// Version of the persisted model layout.
pub const FORMAT_VERSION: u16 = 1;

const MAGIC: &[u8; 8] = b"IPSTEMFM";

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("entry for {word:?} has a zero count")]
    ZeroCount { word: String },
    #[error("empty word in input")]
    EmptyWord,
    #[error("input contains no entries")]
    EmptyModel,
    #[error("input is not valid UTF-8 at byte offset {offset}")]
    Decode { offset: usize },
    #[error("prefix {prefix:?} has count {count}, exceeding {parent_count} stored for {parent:?}")]
    Monotonicity {
        prefix: String,
        count: u64,
        parent: String,
        parent_count: u64,
    },
    #[error("prefix {prefix:?} is stored but its parent {parent:?} is not")]
    MissingParent { prefix: String, parent: String },
    #[error("prefix {prefix:?} is listed more than once")]
    DuplicatePrefix { prefix: String },
    #[error("count overflow while ingesting {word:?}")]
    Overflow { word: String },
    #[error("not a model file (bad magic bytes)")]
    BadMagic,
    #[error("unsupported model format version {found} (expected {expected})")]
    UnsupportedVersion { found: u16, expected: u16 },
    #[error("model file is truncated")]
    Truncated,
    #[error("model file is corrupt: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = CorpusError> = std::result::Result<T, E>;

/// Options shared by every model constructor.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestOptions {
    pub case_fold: bool,
    /// Free-form description of where the counts came from.
    pub source: String,
}

impl IngestOptions {
    pub fn new(source: impl Into<String>) -> Self {
        IngestOptions {
            case_fold: false,
            source: source.into(),
        }
    }

    pub fn with_case_fold(mut self, case_fold: bool) -> Self {
        self.case_fold = case_fold;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelMetadata {
    pub source: String,
    pub case_fold: bool,
    pub version: u16,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Node {
    count: u64,
    children: BTreeMap<char, usize>,
}

impl Node {
    fn new(count: u64) -> Self {
        Node {
            count,
            children: BTreeMap::new(),
        }
    }
}

/// Character trie of aggregate prefix frequencies. Immutable once built.
#[derive(Clone)]
pub struct FrequencyModel {
    nodes: Vec<Node>,
    metadata: ModelMetadata,
}

// Node numbering depends on insertion order, so compare the tries by
// walking both in parallel.
impl PartialEq for FrequencyModel {
    fn eq(&self, other: &Self) -> bool {
        if self.metadata != other.metadata || self.nodes.len() != other.nodes.len() {
            return false;
        }
        let mut stack = vec![(0usize, 0usize)];
        while let Some((a, b)) = stack.pop() {
            let (na, nb) = (&self.nodes[a], &other.nodes[b]);
            if na.count != nb.count || na.children.len() != nb.children.len() {
                return false;
            }
            for ((ca, &ia), (cb, &ib)) in na.children.iter().zip(&nb.children) {
                if ca != cb {
                    return false;
                }
                stack.push((ia, ib));
            }
        }
        true
    }
}

impl Eq for FrequencyModel {}

impl fmt::Debug for FrequencyModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FrequencyModel")
            .field("total_tokens", &self.total_tokens())
            .field("nodes", &self.nodes.len())
            .field("metadata", &self.metadata)
            .finish()
    }
}

fn fold_char(c: char, case_fold: bool, out: &mut Vec<char>) {
    if case_fold {
        out.extend(c.to_lowercase());
    } else {
        out.push(c);
    }
}

fn trie_key(s: &str, case_fold: bool) -> Vec<char> {
    let mut key = Vec::with_capacity(s.len());
    for c in s.nfc() {
        fold_char(c, case_fold, &mut key);
    }
    key
}

impl FrequencyModel {
    fn empty(opts: &IngestOptions) -> Self {
        FrequencyModel {
            nodes: vec![Node::new(0)],
            metadata: ModelMetadata {
                source: opts.source.clone(),
                case_fold: opts.case_fold,
                version: FORMAT_VERSION,
            },
        }
    }

    pub fn metadata(&self) -> &ModelMetadata {
        &self.metadata
    }

    pub fn case_fold(&self) -> bool {
        self.metadata.case_fold
    }

    /// Frequency of the empty prefix.
    pub fn total_tokens(&self) -> u64 {
        self.nodes[0].count
    }

    /// Number of distinct non-empty prefixes stored.
    pub fn prefix_count(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Applies the model's string policy (NFC, then optional case folding).
    pub fn normalize(&self, s: &str) -> String {
        trie_key(s, self.metadata.case_fold).into_iter().collect()
    }

    /// Aggregate frequency of all corpus words starting with `prefix`.
    /// Absent prefixes yield 0; the empty prefix yields the token total.
    pub fn prefix_frequency(&self, prefix: &str) -> u64 {
        let mut node = 0;
        for c in trie_key(prefix, self.metadata.case_fold) {
            match self.nodes[node].children.get(&c) {
                Some(&next) => node = next,
                None => return 0,
            }
        }
        self.nodes[node].count
    }

    /// Frequencies of every prefix of `chars`, one entry per character:
    /// entry `i` is the frequency of the first `i + 1` characters.
    ///
    /// `chars` is taken as already NFC-normalized; case folding is applied
    /// per character, so a fold that expands one character into several
    /// still yields exactly one entry for it.
    pub fn prefix_frequencies(&self, chars: &[char]) -> Vec<u64> {
        let mut out = Vec::with_capacity(chars.len());
        let mut node = Some(0);
        let mut folded = Vec::with_capacity(2);
        for &c in chars {
            folded.clear();
            fold_char(c, self.metadata.case_fold, &mut folded);
            for k in &folded {
                node = node.and_then(|n| self.nodes[n].children.get(k).copied());
            }
            out.push(node.map_or(0, |n| self.nodes[n].count));
        }
        out
    }

    /// Visits every stored prefix with its count, in lexicographic order.
    pub fn for_each_prefix(&self, mut f: impl FnMut(&str, u64)) {
        let mut path = String::new();
        let mut stack: Vec<(usize, std::collections::btree_map::Iter<'_, char, usize>)> =
            vec![(0, self.nodes[0].children.iter())];
        while let Some((_, iter)) = stack.last_mut() {
            match iter.next() {
                Some((&c, &child)) => {
                    path.push(c);
                    f(&path, self.nodes[child].count);
                    stack.push((child, self.nodes[child].children.iter()));
                }
                None => {
                    stack.pop();
                    if !stack.is_empty() {
                        path.pop();
                    }
                }
            }
        }
    }

    /// Writes the versioned binary form of the model.
    ///
    /// Layout (little endian): magic `IPSTEMFM`, `u16` version, `u64`
    /// length of the remainder, then the body and a trailing CRC-32 of the
    /// body. The body is a `u8` flag byte, a `u32`-length-prefixed source
    /// string, a `u64` node count, and the nodes in pre-order as
    /// `(u64 count, u32 char, u32 child count)`.
    pub fn save<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut body = Vec::with_capacity(16 * self.nodes.len() + 32);
        body.push(u8::from(self.metadata.case_fold));
        let source = self.metadata.source.as_bytes();
        body.extend_from_slice(&(source.len() as u32).to_le_bytes());
        body.extend_from_slice(source);
        body.extend_from_slice(&(self.nodes.len() as u64).to_le_bytes());

        let mut stack = vec![('\0', 0usize)];
        while let Some((c, idx)) = stack.pop() {
            let node = &self.nodes[idx];
            body.extend_from_slice(&node.count.to_le_bytes());
            body.extend_from_slice(&(c as u32).to_le_bytes());
            body.extend_from_slice(&(node.children.len() as u32).to_le_bytes());
            // Reverse so children pop in ascending character order.
            stack.extend(node.children.iter().rev().map(|(&c, &i)| (c, i)));
        }
        let crc = crc32fast::hash(&body);
        body.extend_from_slice(&crc.to_le_bytes());

        let mut bytes = Vec::with_capacity(body.len() + 18);
        bytes.extend_from_slice(MAGIC);
        bytes.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        bytes.extend_from_slice(&(body.len() as u64).to_le_bytes());
        bytes.extend_from_slice(&body);
        bytes
    }

    pub fn load<R: Read>(mut input: R) -> Result<Self> {
        let mut bytes = Vec::new();
        input.read_to_end(&mut bytes)?;
        Self::from_bytes(&bytes)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let n = bytes.len().min(MAGIC.len());
        if bytes[..n] != MAGIC[..n] {
            return Err(CorpusError::BadMagic);
        }
        if bytes.len() < MAGIC.len() + 10 {
            return Err(CorpusError::Truncated);
        }
        let version = u16::from_le_bytes([bytes[8], bytes[9]]);
        if version != FORMAT_VERSION {
            return Err(CorpusError::UnsupportedVersion {
                found: version,
                expected: FORMAT_VERSION,
            });
        }
        let declared = u64::from_le_bytes(bytes[10..18].try_into().unwrap());
        let rest = &bytes[18..];
        if (rest.len() as u64) < declared {
            return Err(CorpusError::Truncated);
        }
        if rest.len() as u64 > declared {
            return Err(CorpusError::Corrupt("trailing bytes after payload".into()));
        }
        if rest.len() < 4 {
            return Err(CorpusError::Corrupt("payload too short".into()));
        }
        let (body, crc) = rest.split_at(rest.len() - 4);
        if crc32fast::hash(body) != u32::from_le_bytes(crc.try_into().unwrap()) {
            return Err(CorpusError::Corrupt("checksum mismatch".into()));
        }
        decode_body(body)
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| CorpusError::Corrupt("payload ends early".into()))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

fn decode_body(body: &[u8]) -> Result<FrequencyModel> {
    let mut cur = Cursor {
        bytes: body,
        pos: 0,
    };
    let flags = cur.take(1)?[0];
    if flags > 1 {
        return Err(CorpusError::Corrupt(format!(
            "unknown flag bits {flags:#x}"
        )));
    }
    let source_len = cur.u32()? as usize;
    let source = std::str::from_utf8(cur.take(source_len)?)
        .map_err(|_| CorpusError::Corrupt("source description is not UTF-8".into()))?
        .to_owned();
    let node_count = cur.u64()?;
    if node_count == 0 || node_count > (body.len() / 16) as u64 + 1 {
        return Err(CorpusError::Corrupt(format!(
            "implausible node count {node_count}"
        )));
    }

    let root_count = cur.u64()?;
    if cur.u32()? != 0 {
        return Err(CorpusError::Corrupt("root node carries a character".into()));
    }
    let root_children = cur.u32()?;
    let mut nodes = vec![Node::new(root_count)];
    let mut stack = vec![(0usize, root_children)];
    while let Some((parent, remaining)) = stack.last_mut() {
        if *remaining == 0 {
            stack.pop();
            continue;
        }
        *remaining -= 1;
        let parent = *parent;
        let count = cur.u64()?;
        let c = char::from_u32(cur.u32()?)
            .ok_or_else(|| CorpusError::Corrupt("invalid character in trie".into()))?;
        let children = cur.u32()?;
        if count > nodes[parent].count {
            return Err(CorpusError::Corrupt(format!(
                "node count {count} exceeds parent count {}",
                nodes[parent].count
            )));
        }
        let idx = nodes.len();
        if nodes[parent].children.insert(c, idx).is_some() {
            return Err(CorpusError::Corrupt(format!("duplicate edge {c:?}")));
        }
        nodes.push(Node::new(count));
        if nodes.len() as u64 > node_count {
            return Err(CorpusError::Corrupt("more nodes than declared".into()));
        }
        stack.push((idx, children));
    }
    if nodes.len() as u64 != node_count {
        return Err(CorpusError::Corrupt("fewer nodes than declared".into()));
    }
    if cur.pos != body.len() {
        return Err(CorpusError::Corrupt("unused bytes after trie".into()));
    }
    Ok(FrequencyModel {
        nodes,
        metadata: ModelMetadata {
            source,
            case_fold: flags == 1,
            version: FORMAT_VERSION,
        },
    })
}

/// Builds a model from `(word, count)` pairs. Repeated words accumulate.
pub fn ingest_word_list<I, S>(entries: I, opts: &IngestOptions) -> Result<FrequencyModel>
where
    I: IntoIterator<Item = (S, u64)>,
    S: AsRef<str>,
{
    let mut model = FrequencyModel::empty(opts);
    let mut any = false;
    for (word, count) in entries {
        let word = word.as_ref();
        let key = trie_key(word, opts.case_fold);
        if key.is_empty() {
            return Err(CorpusError::EmptyWord);
        }
        if count == 0 {
            return Err(CorpusError::ZeroCount {
                word: word.to_owned(),
            });
        }
        add_word(&mut model.nodes, &key, count).ok_or_else(|| CorpusError::Overflow {
            word: word.to_owned(),
        })?;
        any = true;
    }
    if !any {
        return Err(CorpusError::EmptyModel);
    }
    Ok(model)
}

fn add_word(nodes: &mut Vec<Node>, key: &[char], count: u64) -> Option<()> {
    nodes[0].count = nodes[0].count.checked_add(count)?;
    let mut node = 0;
    for &c in key {
        node = match nodes[node].children.get(&c) {
            Some(&next) => next,
            None => {
                let idx = nodes.len();
                nodes.push(Node::new(0));
                nodes[node].children.insert(c, idx);
                idx
            }
        };
        nodes[node].count = nodes[node].count.checked_add(count)?;
    }
    Some(())
}

/// Parses `key<TAB>count` records. Blank lines and `#` comments are skipped.
/// Returned pairs carry their 1-based line numbers.
pub fn parse_count_lines<R: BufRead>(reader: R) -> Result<Vec<(usize, String, u64)>> {
    let mut out = Vec::new();
    for (idx, line) in reader.split(b'\n').enumerate() {
        let lineno = idx + 1;
        let raw = line?;
        let text = std::str::from_utf8(&raw).map_err(|e| CorpusError::Parse {
            line: lineno,
            message: format!("invalid UTF-8 at column byte {}", e.valid_up_to()),
        })?;
        let text = text.strip_suffix('\r').unwrap_or(text);
        if text.trim().is_empty() || text.starts_with('#') {
            continue;
        }
        let (key, count) = text.split_once('\t').ok_or_else(|| CorpusError::Parse {
            line: lineno,
            message: "expected `<key><TAB><count>`".into(),
        })?;
        if key.is_empty() {
            return Err(CorpusError::Parse {
                line: lineno,
                message: "empty key".into(),
            });
        }
        let count: u64 = count.trim().parse().map_err(|_| CorpusError::Parse {
            line: lineno,
            message: format!("count {:?} is not a nonnegative integer", count.trim()),
        })?;
        if count == 0 {
            return Err(CorpusError::Parse {
                line: lineno,
                message: "count must be positive".into(),
            });
        }
        out.push((lineno, key.to_owned(), count));
    }
    Ok(out)
}

/// Reads a `word<TAB>count` list and builds a model from it.
pub fn read_word_list<R: BufRead>(reader: R, opts: &IngestOptions) -> Result<FrequencyModel> {
    let rows = parse_count_lines(reader)?;
    ingest_word_list(rows.into_iter().map(|(_, w, c)| (w, c)), opts)
}

/// How raw text is cut into tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Delimiters {
    /// Split on Unicode whitespace only.
    Whitespace,
    /// Split on anything that is not alphanumeric.
    NonAlphanumeric,
    /// Split on the listed characters.
    Chars(Vec<char>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizerConfig {
    pub delimiters: Delimiters,
    pub case_fold: bool,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        TokenizerConfig {
            delimiters: Delimiters::NonAlphanumeric,
            case_fold: false,
        }
    }
}

impl TokenizerConfig {
    fn is_delimiter(&self, c: char) -> bool {
        match &self.delimiters {
            Delimiters::Whitespace => c.is_whitespace(),
            Delimiters::NonAlphanumeric => !c.is_alphanumeric(),
            Delimiters::Chars(set) => set.contains(&c),
        }
    }

    pub fn tokens<'a>(&'a self, text: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        text.split(move |c| self.is_delimiter(c))
            .filter(|t| !t.is_empty())
    }
}

/// Tokenizes raw UTF-8 text and ingests the token multiset.
pub fn ingest_raw_text<R: Read>(
    mut input: R,
    tokenizer: &TokenizerConfig,
    source: &str,
) -> Result<FrequencyModel> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let text = std::str::from_utf8(&bytes).map_err(|e| CorpusError::Decode {
        offset: e.valid_up_to(),
    })?;
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for token in tokenizer.tokens(text) {
        *counts.entry(token).or_default() += 1;
    }
    let mut entries: Vec<_> = counts.into_iter().collect();
    entries.sort_unstable();
    let opts = IngestOptions {
        case_fold: tokenizer.case_fold,
        source: source.to_owned(),
    };
    ingest_word_list(entries, &opts)
}

/// Builds a model from explicit prefix counts.
///
/// Every stored prefix must have its immediate parent stored as well (the
/// empty prefix excepted), and no count may exceed its parent's. The token
/// total is the sum of the single-character prefix counts.
pub fn load_prefix_table<I, S>(entries: I, opts: &IngestOptions) -> Result<FrequencyModel>
where
    I: IntoIterator<Item = (S, u64)>,
    S: AsRef<str>,
{
    let mut table: BTreeMap<Vec<char>, (String, u64)> = BTreeMap::new();
    for (prefix, count) in entries {
        let prefix = prefix.as_ref();
        let key = trie_key(prefix, opts.case_fold);
        if key.is_empty() {
            return Err(CorpusError::EmptyWord);
        }
        if count == 0 {
            return Err(CorpusError::ZeroCount {
                word: prefix.to_owned(),
            });
        }
        if table.insert(key, (prefix.to_owned(), count)).is_some() {
            return Err(CorpusError::DuplicatePrefix {
                prefix: prefix.to_owned(),
            });
        }
    }
    if table.is_empty() {
        return Err(CorpusError::EmptyModel);
    }

    let mut model = FrequencyModel::empty(opts);
    let mut total: u64 = 0;
    // BTreeMap order visits every parent before its extensions.
    for (key, (label, count)) in &table {
        let (last, parent_key) = key.split_last().unwrap();
        let mut parent = 0;
        for c in parent_key {
            parent = match model.nodes[parent].children.get(c) {
                Some(&p) => p,
                None => {
                    return Err(CorpusError::MissingParent {
                        prefix: label.clone(),
                        parent: parent_key.iter().collect(),
                    })
                }
            };
        }
        if parent == 0 {
            total = total
                .checked_add(*count)
                .ok_or_else(|| CorpusError::Overflow {
                    word: label.clone(),
                })?;
        } else if *count > model.nodes[parent].count {
            return Err(CorpusError::Monotonicity {
                prefix: label.clone(),
                count: *count,
                parent: table[parent_key].0.clone(),
                parent_count: model.nodes[parent].count,
            });
        }
        let idx = model.nodes.len();
        model.nodes.push(Node::new(*count));
        model.nodes[parent].children.insert(*last, idx);
    }
    model.nodes[0].count = total;
    Ok(model)
}

/// Reads a `prefix<TAB>count` table.
pub fn read_prefix_table<R: BufRead>(reader: R, opts: &IngestOptions) -> Result<FrequencyModel> {
    let rows = parse_count_lines(reader)?;
    load_prefix_table(rows.into_iter().map(|(_, p, c)| (p, c)), opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn talk_model() -> FrequencyModel {
        ingest_word_list(
            [("talk", 3), ("talks", 2), ("tall", 1)],
            &IngestOptions::default(),
        )
        .unwrap()
    }

    pub(crate) fn parsons_rows() -> Vec<(&'static str, u64)> {
        vec![
            ("P", 1863235),
            ("Pa", 536621),
            ("Par", 250520),
            ("Pars", 2284),
            ("Parso", 606),
            ("Parson", 606),
            ("Parsons", 542),
        ]
    }

    #[test]
    fn word_list_prefix_sums() {
        let m = talk_model();
        assert_eq!(m.prefix_frequency("tal"), 6);
        assert_eq!(m.prefix_frequency("talk"), 5);
        assert_eq!(m.prefix_frequency("talks"), 2);
        assert_eq!(m.prefix_frequency(""), 6);
        assert_eq!(m.total_tokens(), 6);
    }

    #[test]
    fn absent_prefix_is_zero() {
        let m = ingest_word_list([("a", 1)], &IngestOptions::default()).unwrap();
        assert_eq!(m.prefix_frequency("b"), 0);
        assert_eq!(m.prefix_frequency("ab"), 0);
    }

    #[test]
    fn word_list_errors() {
        let opts = IngestOptions::default();
        let empty: Vec<(&str, u64)> = vec![];
        assert!(matches!(
            ingest_word_list(empty, &opts),
            Err(CorpusError::EmptyModel)
        ));
        assert!(matches!(
            ingest_word_list([("a", 0)], &opts),
            Err(CorpusError::ZeroCount { .. })
        ));
        assert!(matches!(
            ingest_word_list([("", 2)], &opts),
            Err(CorpusError::EmptyWord)
        ));

        let text = "# comment\ntalk\t3\ntalks\n";
        match read_word_list(text.as_bytes(), &opts) {
            Err(CorpusError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        match read_word_list("talk\tmany\n".as_bytes(), &opts) {
            Err(CorpusError::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            read_word_list("# only comments\n\n".as_bytes(), &opts),
            Err(CorpusError::EmptyModel)
        ));
    }

    #[test]
    fn word_list_file_format() {
        let text = "# header\ntalk\t3\r\n\ntalks\t2\ntall\t1\ntalk\t1\n";
        let m = read_word_list(text.as_bytes(), &IngestOptions::default()).unwrap();
        assert_eq!(m.prefix_frequency("talk"), 6);
        assert_eq!(m.prefix_frequency("tal"), 7);
    }

    #[test]
    fn raw_text_ingestion() {
        let cfg = TokenizerConfig {
            delimiters: Delimiters::Whitespace,
            case_fold: false,
        };
        let m = ingest_raw_text("talk talk tall".as_bytes(), &cfg, "t").unwrap();
        assert_eq!(m.prefix_frequency("tal"), 3);
        assert!(matches!(
            ingest_raw_text("".as_bytes(), &cfg, "t"),
            Err(CorpusError::EmptyModel)
        ));

        let folding = TokenizerConfig {
            case_fold: true,
            ..cfg.clone()
        };
        let m = ingest_raw_text("Talk talk".as_bytes(), &folding, "t").unwrap();
        assert_eq!(m.prefix_frequency("talk"), 2);
        assert_eq!(m.prefix_frequency("TALK"), 2);

        let m = ingest_raw_text("Talk talk".as_bytes(), &cfg, "t").unwrap();
        assert_eq!(m.prefix_frequency("talk"), 1);
    }

    #[test]
    fn raw_text_default_tokenizer_strips_punctuation() {
        let m = ingest_raw_text(
            "Talk, talk; tall!".as_bytes(),
            &TokenizerConfig::default(),
            "",
        )
        .unwrap();
        assert_eq!(m.prefix_frequency("tal"), 2);
        assert_eq!(m.total_tokens(), 3);
    }

    #[test]
    fn raw_text_reports_byte_offset() {
        let bytes = b"talk \xff tall";
        match ingest_raw_text(&bytes[..], &TokenizerConfig::default(), "") {
            Err(CorpusError::Decode { offset }) => assert_eq!(offset, 5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn prefix_table_fixture() {
        let m = load_prefix_table(parsons_rows(), &IngestOptions::default()).unwrap();
        assert_eq!(m.prefix_frequency("Pars"), 2284);
        assert_eq!(m.prefix_frequency("Parso"), 606);
        assert_eq!(m.prefix_frequency(""), 1863235);
        assert_eq!(m.prefix_frequency("Q"), 0);
        assert_eq!(m.prefix_count(), 7);
    }

    #[test]
    fn prefix_table_errors() {
        let opts = IngestOptions::default();
        let m = load_prefix_table([("a", 5)], &opts).unwrap();
        assert_eq!(m.prefix_frequency("a"), 5);

        assert!(matches!(
            load_prefix_table([("a", 5), ("ab", 9)], &opts),
            Err(CorpusError::Monotonicity {
                count: 9,
                parent_count: 5,
                ..
            })
        ));
        assert!(matches!(
            load_prefix_table([("a", 5), ("abc", 1)], &opts),
            Err(CorpusError::MissingParent { .. })
        ));
        assert!(matches!(
            load_prefix_table([("a", 5), ("a", 1)], &opts),
            Err(CorpusError::DuplicatePrefix { .. })
        ));
    }

    #[test]
    fn case_fold_applies_at_query() {
        let opts = IngestOptions::new("x").with_case_fold(true);
        let m = ingest_word_list([("Parsons", 4), ("parson", 1)], &opts).unwrap();
        assert_eq!(m.prefix_frequency("PARSON"), 5);
        assert_eq!(m.prefix_frequency("parsons"), 4);

        let m = ingest_word_list([("Parsons", 4)], &IngestOptions::default()).unwrap();
        assert_eq!(m.prefix_frequency("parsons"), 0);
    }

    #[test]
    fn nfc_normalizes_both_sides() {
        let composed = "Dif\u{ed}cil";
        let decomposed = "Difi\u{301}cil";
        let m = ingest_word_list([(decomposed, 3)], &IngestOptions::default()).unwrap();
        assert_eq!(m.prefix_frequency(composed), 3);
        assert_eq!(m.prefix_frequency("Dif\u{ed}"), 3);
        assert_eq!(m.prefix_frequency("Difi"), 0);
    }

    #[test]
    fn prefix_frequencies_walks_once() {
        let m = talk_model();
        let chars: Vec<char> = "talkx".chars().collect();
        assert_eq!(m.prefix_frequencies(&chars), vec![6, 6, 6, 5, 0]);
    }

    #[test]
    fn for_each_prefix_lists_all() {
        let m = talk_model();
        let mut seen = Vec::new();
        m.for_each_prefix(|p, c| seen.push((p.to_owned(), c)));
        let expected: Vec<(String, u64)> = [
            ("t", 6),
            ("ta", 6),
            ("tal", 6),
            ("talk", 5),
            ("talks", 2),
            ("tall", 1),
        ]
        .iter()
        .map(|(p, c)| (p.to_string(), *c))
        .collect();
        assert_eq!(seen, expected);
    }

    #[test]
    fn persistence_round_trip() {
        let m = load_prefix_table(parsons_rows(), &IngestOptions::new("table")).unwrap();
        let back = FrequencyModel::from_bytes(&m.to_bytes()).unwrap();
        assert_eq!(back, m);
        for (p, c) in parsons_rows() {
            assert_eq!(back.prefix_frequency(p), c);
        }
        assert_eq!(back.metadata().source, "table");

        let single = ingest_word_list([("a", 1)], &IngestOptions::default()).unwrap();
        let back = FrequencyModel::from_bytes(&single.to_bytes()).unwrap();
        assert_eq!(back.prefix_frequency("a"), 1);
        assert_eq!(back.total_tokens(), 1);
    }

    #[test]
    fn persistence_errors_are_distinct() {
        let m = talk_model();
        let bytes = m.to_bytes();

        let mut flipped = bytes.clone();
        flipped[8] ^= 0xff;
        assert!(matches!(
            FrequencyModel::from_bytes(&flipped),
            Err(CorpusError::UnsupportedVersion { .. })
        ));

        assert!(matches!(
            FrequencyModel::from_bytes(&bytes[..bytes.len() - 3]),
            Err(CorpusError::Truncated)
        ));
        assert!(matches!(
            FrequencyModel::from_bytes(&bytes[..12]),
            Err(CorpusError::Truncated)
        ));

        let mut corrupt = bytes.clone();
        let mid = bytes.len() / 2 + 9;
        corrupt[mid] ^= 0x10;
        assert!(matches!(
            FrequencyModel::from_bytes(&corrupt),
            Err(CorpusError::Corrupt(_))
        ));

        assert!(matches!(
            FrequencyModel::from_bytes(b"not a model at all"),
            Err(CorpusError::BadMagic)
        ));
    }
}
