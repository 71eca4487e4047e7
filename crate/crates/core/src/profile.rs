//! Sequential maximum-likelihood profiles.
//!
//! For a word `w1 w2 ... wn` the profile holds one score per prefix:
//! `C[0] = 0` for the single first character, and for `e >= 1`
//! `C[e] = f(w1..w(e+1)) / f(w1..we)`, the relative frequency with which the
//! `(e+1)`-th character follows the first `e`. Once the word leaves the
//! corpus (a zero denominator) every remaining score is 0.
//!
//! The whole-word flag is set when the last score does not drop below the
//! one before it.

use std::fmt::Write as _;

use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use crate::corpus::FrequencyModel;

#[derive(Debug, Error, PartialEq)]
pub enum ProfileError {
    #[error("cannot profile an empty word")]
    EmptyWord,
    #[error("word has {chars} characters but {scores} scores were given")]
    LengthMismatch { chars: usize, scores: usize },
    #[error("score {index} is {value}; scores must lie in [0, 1] with the first equal to 0")]
    InvalidScore { index: usize, value: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityProfile {
    word: String,
    chars: Vec<char>,
    scores: Vec<f64>,
    whole_word: bool,
}

impl ProbabilityProfile {
    /// Builds a profile from precomputed scores, e.g. values copied from a
    /// printed table. `scores[0]` must be 0 and all scores must lie in [0, 1].
    pub fn from_scores(word: &str, scores: Vec<f64>) -> Result<Self, ProfileError> {
        let word: String = word.nfc().collect();
        let chars: Vec<char> = word.chars().collect();
        if chars.is_empty() {
            return Err(ProfileError::EmptyWord);
        }
        if scores.len() != chars.len() {
            return Err(ProfileError::LengthMismatch {
                chars: chars.len(),
                scores: scores.len(),
            });
        }
        for (index, &value) in scores.iter().enumerate() {
            let bad = !(0.0..=1.0).contains(&value) || (index == 0 && value != 0.0);
            if bad {
                return Err(ProfileError::InvalidScore { index, value });
            }
        }
        let whole_word = whole_word_flag(&scores);
        Ok(ProbabilityProfile {
            word,
            chars,
            scores,
            whole_word,
        })
    }

    /// The NFC form of the profiled word.
    pub fn word(&self) -> &str {
        &self.word
    }

    pub fn chars(&self) -> &[char] {
        &self.chars
    }

    /// Word length in characters.
    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }

    /// `C[0..n]`.
    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    /// Score of the full word, `C[n-1]`.
    pub fn whole_word_score(&self) -> f64 {
        *self.scores.last().unwrap()
    }

    pub fn gamma_whole(&self) -> bool {
        self.whole_word
    }

    /// The first `len` characters of the word.
    pub fn prefix(&self, len: usize) -> String {
        self.chars[..len].iter().collect()
    }
}

fn whole_word_flag(scores: &[f64]) -> bool {
    match scores {
        [.., prev, last] => last >= prev,
        _ => false,
    }
}

/// Computes the profile of `word` under `model`.
pub fn probability_profile(
    model: &FrequencyModel,
    word: &str,
) -> Result<ProbabilityProfile, ProfileError> {
    let word: String = word.nfc().collect();
    let chars: Vec<char> = word.chars().collect();
    if chars.is_empty() {
        return Err(ProfileError::EmptyWord);
    }
    let freqs = model.prefix_frequencies(&chars);
    let scores = mle_scores(&freqs);
    let whole_word = whole_word_flag(&scores);
    Ok(ProbabilityProfile {
        word,
        chars,
        scores,
        whole_word,
    })
}

/// Sequential relative frequencies of a prefix-frequency column.
pub fn mle_scores(freqs: &[u64]) -> Vec<f64> {
    let mut scores = Vec::with_capacity(freqs.len());
    if freqs.is_empty() {
        return scores;
    }
    scores.push(0.0);
    for pair in freqs.windows(2) {
        let (denom, num) = (pair[0], pair[1]);
        scores.push(if denom == 0 {
            0.0
        } else {
            num as f64 / denom as f64
        });
    }
    scores
}

/// Formats a score for display: truncated (not rounded) to three decimals,
/// trailing zeros and the leading `0` dropped, so 0.28800 prints as `.288`,
/// 1.0 as `1` and 0.0 as `0`.
pub fn format_score(value: f64) -> String {
    // Nudge before flooring so 0.3 stored as 0.29999.. still reads .3.
    let milli = (value * 1000.0 + 1e-7).floor() as i64;
    if milli <= 0 {
        return "0".into();
    }
    let (int, frac) = (milli / 1000, milli % 1000);
    if frac == 0 {
        return int.to_string();
    }
    let frac = format!("{frac:03}");
    let frac = frac.trim_end_matches('0');
    if int == 0 {
        format!(".{frac}")
    } else {
        format!("{int}.{frac}")
    }
}

/// Renders the profile as a table with columns Word / N-Gram / Frequency /
/// P_MLE, one row per prefix.
pub fn render_profile_table(profile: &ProbabilityProfile, model: &FrequencyModel) -> String {
    let freqs = model.prefix_frequencies(profile.chars());
    let grams: Vec<String> = (1..=profile.len()).map(|k| profile.prefix(k)).collect();
    let word_w = profile.len().max(4) + 2;
    let gram_w = word_w.max(8);
    let freq_w = freqs
        .iter()
        .map(|f| f.to_string().len())
        .max()
        .unwrap_or(0)
        .max("Frequency (f)".len())
        + 2;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<word_w$}{:<gram_w$}{:<freq_w$}P_MLE (C_e)",
        "Word", "N-Gram", "Frequency (f)"
    );
    let _ = writeln!(out, "{}", profile.word());
    for ((gram, freq), score) in grams.iter().zip(&freqs).zip(profile.scores()) {
        let _ = writeln!(
            out,
            "{:<word_w$}{:<gram_w$}{:<freq_w$}{}",
            "",
            gram,
            freq,
            format_score(*score)
        );
    }
    out
}
