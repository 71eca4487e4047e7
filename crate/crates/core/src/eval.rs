//! Gold-list agreement and cluster conflation reports.
//!
//! Gold file: one `word<TAB>stem[/stem...][<TAB>tag]` record per line.
//! Cluster file: one cluster per line, member words separated by commas.
//! Both skip blank lines and `#` comments.
//!
//! Reports render either as an aligned text table or as JSON lines. The JSON
//! schema is one object per line with a `kind` field:
//!
//! - `{"kind":"summary","total","matches","mismatches","agreement_rate"}`
//! - `{"kind":"tag","tag","total","matches","agreement_rate"}`
//! - `{"kind":"word","word","produced","accepted":[..],"tag","matched"}`
//! - `{"kind":"cluster_summary","clusters","perfectly_conflated"}`
//! - `{"kind":"cluster","words":[..],"stems":[..],"distinct"}`

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io::BufRead;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::stemmer::{StemError, Stemmer};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("gold list is empty")]
    EmptyGold,
    #[error("cluster {index} has {len} word(s); at least 2 are required")]
    SmallCluster { index: usize, len: usize },
    #[error("stemming {word:?}: {source}")]
    Stem {
        word: String,
        #[source]
        source: StemError,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GoldEntry {
    pub word: String,
    pub accepted: Vec<String>,
    pub tag: Option<String>,
}

impl GoldEntry {
    pub fn new(word: &str, accepted: &[&str], tag: Option<&str>) -> Self {
        GoldEntry {
            word: word.to_owned(),
            accepted: accepted.iter().map(|s| s.to_string()).collect(),
            tag: tag.map(str::to_owned),
        }
    }
}

fn content_lines<R: BufRead>(
    reader: R,
) -> impl Iterator<Item = Result<(usize, String), EvalError>> {
    reader
        .lines()
        .enumerate()
        .filter_map(|(i, line)| match line {
            Err(e) => Some(Err(EvalError::Io(e))),
            Ok(l) => {
                let l = l.strip_suffix('\r').map(str::to_owned).unwrap_or(l);
                if l.trim().is_empty() || l.starts_with('#') {
                    None
                } else {
                    Some(Ok((i + 1, l)))
                }
            }
        })
}

pub fn parse_gold<R: BufRead>(reader: R) -> Result<Vec<GoldEntry>, EvalError> {
    let mut out = Vec::new();
    for item in content_lines(reader) {
        let (line, text) = item?;
        let mut fields = text.split('\t');
        let word = fields.next().unwrap_or_default().trim();
        let stems = fields.next().ok_or_else(|| EvalError::Parse {
            line,
            message: "expected `word<TAB>stem[/stem...]`".into(),
        })?;
        let tag = fields.next().map(str::trim).filter(|t| !t.is_empty());
        if fields.next().is_some() {
            return Err(EvalError::Parse {
                line,
                message: "too many fields".into(),
            });
        }
        if word.is_empty() {
            return Err(EvalError::Parse {
                line,
                message: "empty word".into(),
            });
        }
        let accepted: Vec<String> = stems.split('/').map(|s| s.trim().to_owned()).collect();
        if accepted.iter().any(String::is_empty) {
            return Err(EvalError::Parse {
                line,
                message: "empty accepted stem".into(),
            });
        }
        out.push(GoldEntry {
            word: word.to_owned(),
            accepted,
            tag: tag.map(str::to_owned),
        });
    }
    Ok(out)
}

pub fn parse_clusters<R: BufRead>(reader: R) -> Result<Vec<Vec<String>>, EvalError> {
    let mut out = Vec::new();
    for item in content_lines(reader) {
        let (line, text) = item?;
        let words: Vec<String> = text
            .split(',')
            .map(str::trim)
            .filter(|w| !w.is_empty())
            .map(str::to_owned)
            .collect();
        if words.len() < 2 {
            return Err(EvalError::Parse {
                line,
                message: format!(
                    "cluster has {} word(s); at least 2 are required",
                    words.len()
                ),
            });
        }
        out.push(words);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WordOutcome {
    pub word: String,
    pub produced: String,
    pub accepted: Vec<String>,
    pub tag: Option<String>,
    pub matched: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct TagCounts {
    pub total: usize,
    pub matches: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    /// Per-word outcomes in gold order.
    pub outcomes: Vec<WordOutcome>,
    pub per_tag: BTreeMap<String, TagCounts>,
}

fn rate(matches: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        matches as f64 / total as f64
    }
}

impl EvalReport {
    pub fn total(&self) -> usize {
        self.outcomes.len()
    }

    pub fn matches(&self) -> usize {
        self.outcomes.iter().filter(|o| o.matched).count()
    }

    pub fn mismatches(&self) -> Vec<&WordOutcome> {
        self.outcomes.iter().filter(|o| !o.matched).collect()
    }

    pub fn agreement_rate(&self) -> f64 {
        rate(self.matches(), self.total())
    }

    pub fn render_table(&self) -> String {
        let w = self
            .outcomes
            .iter()
            .map(|o| o.word.chars().count().max(o.produced.chars().count()))
            .max()
            .unwrap_or(4)
            .max(8)
            + 2;
        let mut out = String::new();
        let _ = writeln!(out, "{:<w$}{:<w$}Accepted", "Word", "Produced");
        for o in &self.outcomes {
            let _ = writeln!(
                out,
                "{:<w$}{:<w$}{:<w$}{}",
                o.word,
                o.produced,
                o.accepted.join("/"),
                if o.matched { "ok" } else { "MISMATCH" }
            );
        }
        out.push('\n');
        for (tag, c) in &self.per_tag {
            let _ = writeln!(
                out,
                "tag {tag}: {}/{} ({:.1}%)",
                c.matches,
                c.total,
                100.0 * rate(c.matches, c.total)
            );
        }
        let _ = writeln!(
            out,
            "agreement: {}/{} ({:.1}%)",
            self.matches(),
            self.total(),
            100.0 * self.agreement_rate()
        );
        out
    }

    pub fn to_json_lines(&self) -> String {
        let mut lines = vec![json!({
            "kind": "summary",
            "total": self.total(),
            "matches": self.matches(),
            "mismatches": self.total() - self.matches(),
            "agreement_rate": self.agreement_rate(),
        })];
        for (tag, c) in &self.per_tag {
            lines.push(json!({
                "kind": "tag",
                "tag": tag,
                "total": c.total,
                "matches": c.matches,
                "agreement_rate": rate(c.matches, c.total),
            }));
        }
        for o in &self.outcomes {
            let mut v = serde_json::to_value(o).expect("outcome serializes");
            v["kind"] = json!("word");
            lines.push(v);
        }
        join_json(lines)
    }
}

fn join_json(lines: Vec<serde_json::Value>) -> String {
    let mut out = String::new();
    for l in lines {
        out.push_str(&l.to_string());
        out.push('\n');
    }
    out
}

/// Stems every gold word and compares with its accepted stems. Comparison
/// is exact after applying the model's string policy.
pub fn evaluate(stemmer: &Stemmer<'_>, gold: &[GoldEntry]) -> Result<EvalReport, EvalError> {
    if gold.is_empty() {
        return Err(EvalError::EmptyGold);
    }
    let model = stemmer.model();
    let outcomes: Vec<WordOutcome> = gold
        .par_iter()
        .map(|entry| {
            let result = stemmer
                .stem(&entry.word)
                .map_err(|source| EvalError::Stem {
                    word: entry.word.clone(),
                    source,
                })?;
            let produced = model.normalize(&result.stem);
            let matched = entry
                .accepted
                .iter()
                .any(|a| model.normalize(a) == produced);
            Ok(WordOutcome {
                word: entry.word.clone(),
                produced: result.stem,
                accepted: entry.accepted.clone(),
                tag: entry.tag.clone(),
                matched,
            })
        })
        .collect::<Result<_, EvalError>>()?;

    let mut per_tag: BTreeMap<String, TagCounts> = BTreeMap::new();
    for o in &outcomes {
        if let Some(tag) = &o.tag {
            let c = per_tag.entry(tag.clone()).or_default();
            c.total += 1;
            c.matches += usize::from(o.matched);
        }
    }
    Ok(EvalReport { outcomes, per_tag })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClusterOutcome {
    pub words: Vec<String>,
    pub stems: Vec<String>,
    pub distinct: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterReport {
    pub clusters: Vec<ClusterOutcome>,
}

impl ClusterReport {
    pub fn perfectly_conflated(&self) -> usize {
        self.clusters.iter().filter(|c| c.distinct == 1).count()
    }

    pub fn render_table(&self) -> String {
        let mut out = String::new();
        for (i, c) in self.clusters.iter().enumerate() {
            let _ = writeln!(out, "Cluster {} ({} distinct)", i + 1, c.distinct);
            let w = c.words.iter().map(|w| w.chars().count()).max().unwrap_or(0) + 2;
            for (word, stem) in c.words.iter().zip(&c.stems) {
                let _ = writeln!(out, "  {word:<w$}{stem}");
            }
        }
        let _ = writeln!(
            out,
            "perfectly conflated: {}/{}",
            self.perfectly_conflated(),
            self.clusters.len()
        );
        out
    }

    pub fn to_json_lines(&self) -> String {
        let mut lines = vec![json!({
            "kind": "cluster_summary",
            "clusters": self.clusters.len(),
            "perfectly_conflated": self.perfectly_conflated(),
        })];
        for c in &self.clusters {
            let mut v = serde_json::to_value(c).expect("cluster serializes");
            v["kind"] = json!("cluster");
            lines.push(v);
        }
        join_json(lines)
    }
}

pub fn cluster_consistency(
    stemmer: &Stemmer<'_>,
    clusters: &[Vec<String>],
) -> Result<ClusterReport, EvalError> {
    if let Some((index, c)) = clusters.iter().enumerate().find(|(_, c)| c.len() < 2) {
        return Err(EvalError::SmallCluster {
            index,
            len: c.len(),
        });
    }
    let model = stemmer.model();
    let clusters = clusters
        .par_iter()
        .map(|words| {
            let stems = words
                .iter()
                .map(|w| {
                    stemmer
                        .stem(w)
                        .map(|r| r.stem)
                        .map_err(|source| EvalError::Stem {
                            word: w.clone(),
                            source,
                        })
                })
                .collect::<Result<Vec<_>, _>>()?;
            let distinct = stems
                .iter()
                .map(|s| model.normalize(s))
                .collect::<BTreeSet<_>>()
                .len();
            Ok(ClusterOutcome {
                words: words.clone(),
                stems,
                distinct,
            })
        })
        .collect::<Result<_, EvalError>>()?;
    Ok(ClusterReport { clusters })
}
