//! The stem-selection 0/1 program.
//!
//! Given profile scores `C[1..N]` of a word of length `n = N + 1`, the
//! program is
//!
//! ```text
//! maximize   Z = sum_{e=1}^{N-1} C[e] g[e] + C[N] g[N]
//! subject to C[e+1] g[e+1] - C[e] g[e] >= 0      e = 1..N-2
//!            g[e] in {0, 1}
//! ```
//!
//! where `g[N]` is fixed beforehand (1 iff `C[N] >= C[N-1]`) so the last
//! term is a constant. Two-character words have no fixed term; their only
//! score is the single decision variable.
//!
//! Writing `v[e] = C[e] g[e]`, the constraints say `v` is non-decreasing.
//! With positive coefficients the feasible supports are therefore trailing
//! blocks on which `C` is non-decreasing, and the optimum takes the longest
//! one. [`solve_analytic`] uses that; [`solve_exhaustive`] enumerates every
//! assignment and serves as the reference.
//!
//! Ties among optimal assignments (which only arise through zero
//! coefficients) are broken canonically: prefer assignments whose ones form
//! a single block ending at the last variable, then the most ones. Both
//! solvers implement this rule and return bit-identical results.

use std::fmt::Write as _;

use thiserror::Error;

use crate::profile::{format_score, ProbabilityProfile};

/// Largest instance the exhaustive solver will enumerate.
pub const EXHAUSTIVE_CAP: usize = 24;

#[derive(Debug, Error, PartialEq)]
pub enum IpError {
    #[error("a word of length {len} has no decision variables")]
    Degenerate { len: usize },
    #[error("coefficient {index} is {value}; coefficients must be finite and nonnegative")]
    InvalidCoefficient { index: usize, value: f64 },
    #[error("assignment has {found} entries, instance has {expected} variables")]
    LengthMismatch { expected: usize, found: usize },
    #[error("{vars} variables exceed the enumeration cap of {cap}; use the analytic solver")]
    TooManyVariables { vars: usize, cap: usize },
}

/// The fixed whole-word term: `C[N]` and its flag `g[N]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WholeWordTerm {
    pub score: f64,
    pub selected: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IpInstance {
    coeffs: Vec<f64>,
    whole_word: Option<WholeWordTerm>,
    constant_term: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IpSolution {
    pub gamma: Vec<bool>,
    /// Objective value including the constant term.
    pub objective: f64,
}

impl IpSolution {
    pub fn ones(&self) -> usize {
        self.gamma.iter().filter(|&&g| g).count()
    }
}

fn validate(values: &[f64]) -> Result<(), IpError> {
    for (index, &value) in values.iter().enumerate() {
        if !value.is_finite() || value < 0.0 {
            return Err(IpError::InvalidCoefficient { index, value });
        }
    }
    Ok(())
}

impl IpInstance {
    /// An instance over `coeffs` with an arbitrary constant term.
    pub fn new(coeffs: Vec<f64>, constant_term: f64) -> Result<Self, IpError> {
        if coeffs.is_empty() {
            return Err(IpError::Degenerate { len: 1 });
        }
        validate(&coeffs)?;
        validate(&[constant_term]).map_err(|_| IpError::InvalidCoefficient {
            index: coeffs.len(),
            value: constant_term,
        })?;
        Ok(IpInstance {
            coeffs,
            whole_word: None,
            constant_term,
        })
    }

    /// An instance whose constant is the whole-word term `score * selected`.
    pub fn with_whole_word(coeffs: Vec<f64>, score: f64, selected: bool) -> Result<Self, IpError> {
        let constant_term = if selected { score } else { 0.0 };
        let mut inst = IpInstance::new(coeffs, constant_term)?;
        inst.whole_word = Some(WholeWordTerm { score, selected });
        Ok(inst)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn n_vars(&self) -> usize {
        self.coeffs.len()
    }

    pub fn n_constraints(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn constant_term(&self) -> f64 {
        self.constant_term
    }

    pub fn whole_word(&self) -> Option<WholeWordTerm> {
        self.whole_word
    }

    /// Length of the word this instance was posed for.
    pub fn word_len(&self) -> usize {
        self.coeffs.len() + 1 + usize::from(self.whole_word.is_some())
    }

    fn check_len(&self, gamma: &[bool]) -> Result<(), IpError> {
        if gamma.len() != self.coeffs.len() {
            return Err(IpError::LengthMismatch {
                expected: self.coeffs.len(),
                found: gamma.len(),
            });
        }
        Ok(())
    }

    /// `sum C[e] g[e]` in index order, plus the constant.
    pub fn objective(&self, gamma: &[bool]) -> Result<f64, IpError> {
        self.check_len(gamma)?;
        Ok(self.objective_unchecked(gamma))
    }

    fn objective_unchecked(&self, gamma: &[bool]) -> f64 {
        let mut z = 0.0;
        for (&c, &g) in self.coeffs.iter().zip(gamma) {
            if g {
                z += c;
            }
        }
        z + self.constant_term
    }

    /// True iff every constraint `C[e+1] g[e+1] - C[e] g[e] >= 0` holds.
    pub fn check_feasible(&self, gamma: &[bool]) -> Result<bool, IpError> {
        self.check_len(gamma)?;
        Ok(self.feasible_unchecked(gamma))
    }

    fn feasible_unchecked(&self, gamma: &[bool]) -> bool {
        let value = |e: usize| if gamma[e] { self.coeffs[e] } else { 0.0 };
        (0..self.coeffs.len().saturating_sub(1)).all(|e| value(e + 1) - value(e) >= 0.0)
    }
}

/// Builds the program for a profile of a word with at least two characters.
pub fn build_instance(profile: &ProbabilityProfile) -> Result<IpInstance, IpError> {
    let scores = profile.scores();
    match scores.len() {
        0 | 1 => Err(IpError::Degenerate { len: scores.len() }),
        2 => IpInstance::new(vec![scores[1]], 0.0),
        n => IpInstance::with_whole_word(
            scores[1..n - 1].to_vec(),
            scores[n - 1],
            profile.gamma_whole(),
        ),
    }
}

fn is_trailing_block(gamma: &[bool]) -> bool {
    let first_one = gamma.iter().position(|&g| g).unwrap_or(gamma.len());
    gamma[first_one..].iter().all(|&g| g)
}

/// Enumerates all `2^n` assignments. Limited to [`EXHAUSTIVE_CAP`] variables.
pub fn solve_exhaustive(instance: &IpInstance) -> Result<IpSolution, IpError> {
    solve_exhaustive_capped(instance, EXHAUSTIVE_CAP)
}

pub fn solve_exhaustive_capped(instance: &IpInstance, cap: usize) -> Result<IpSolution, IpError> {
    let n = instance.n_vars();
    if n > cap || n >= 64 {
        return Err(IpError::TooManyVariables { vars: n, cap });
    }
    let mut gamma = vec![false; n];
    let mut best: Option<(f64, bool, usize, Vec<bool>)> = None;
    for mask in 0u64..(1u64 << n) {
        for (i, g) in gamma.iter_mut().enumerate() {
            *g = mask >> i & 1 == 1;
        }
        if !instance.feasible_unchecked(&gamma) {
            continue;
        }
        let z = instance.objective_unchecked(&gamma);
        let trailing = is_trailing_block(&gamma);
        let ones = mask.count_ones() as usize;
        let better = match &best {
            None => true,
            Some((bz, bt, bo, _)) => z > *bz || (z == *bz && (trailing, ones) > (*bt, *bo)),
        };
        if better {
            best = Some((z, trailing, ones, gamma.clone()));
        }
    }
    // The all-zero assignment is always feasible, so `best` is set.
    let (objective, _, _, gamma) = best.expect("zero assignment is feasible");
    Ok(IpSolution { gamma, objective })
}

/// Closed-form solution: the longest trailing block of positive,
/// non-decreasing coefficients, extended leftwards over zero coefficients.
pub fn solve_analytic(instance: &IpInstance) -> IpSolution {
    let c = instance.coeffs();
    let n = c.len();
    let mut start = n;
    if c[n - 1] > 0.0 {
        start = n - 1;
        while start > 0 && c[start - 1] > 0.0 && c[start - 1] <= c[start] {
            start -= 1;
        }
    }
    while start > 0 && c[start - 1] == 0.0 {
        start -= 1;
    }
    let gamma: Vec<bool> = (0..n).map(|e| e >= start).collect();
    let objective = instance.objective_unchecked(&gamma);
    IpSolution { gamma, objective }
}

/// Which solver a pipeline uses.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Solver {
    #[default]
    Analytic,
    /// Enumeration, bounded by [`EXHAUSTIVE_CAP`].
    Exhaustive,
}

impl Solver {
    pub fn solve(self, instance: &IpInstance) -> Result<IpSolution, IpError> {
        match self {
            Solver::Analytic => Ok(solve_analytic(instance)),
            Solver::Exhaustive => solve_exhaustive(instance),
        }
    }
}

fn term(coeff: f64, var: usize) -> String {
    match format_score(coeff).as_str() {
        "1" => format!("γ{var}"),
        c => format!("{c}γ{var}"),
    }
}

/// Human-readable statement of the program, e.g.
/// `Max Z = .288γ1 + .466γ2 + ... + γ5 + .894 × 0` followed by the
/// constraint list.
pub fn display_formulation(instance: &IpInstance) -> String {
    let c = instance.coeffs();
    let mut terms: Vec<String> = c.iter().enumerate().map(|(e, &v)| term(v, e + 1)).collect();
    if let Some(w) = instance.whole_word() {
        terms.push(format!(
            "{} × {}",
            format_score(w.score),
            u8::from(w.selected)
        ));
    }
    let mut out = format!("Max Z = {}\n", terms.join(" + "));
    if instance.n_constraints() == 0 {
        out.push_str("Subject to no constraints\n");
        return out;
    }
    out.push_str("Subject to the constraints\n");
    for e in 0..instance.n_constraints() {
        let _ = writeln!(
            out,
            "  {} - {} ≥ 0",
            term(c[e + 1], e + 2),
            term(c[e], e + 1)
        );
    }
    out
}

/// Emits the program as an AMPL model plus data section for `word`.
///
/// The data block lists every score `C[1..N]` (three decimals, truncated),
/// fixes the whole-word variable and sets the constant term. The
/// `option solver cplex;` directive is emitted as text only.
pub fn export_ampl(instance: &IpInstance, word: &str) -> String {
    let mut out = String::from(
        "#-----Integer Program for Suffix stripping-----
#-----Model-----
param n;
param N=n-1;

set I={1..N};
var Gama{I} binary;
param C{I};
param const;

maximize z: sum {e in 1..N-1}
    C[e]*Gama[e]+const;

subject to

difference{x in 1..N-2}:
    C[x+1]*Gama[x+1]-C[x]*Gama[x]>=0;

",
    );
    let _ = writeln!(out, "#-----Data: For the word {}-----", word.to_uppercase());
    out.push('\n');
    out.push_str("data;\n");
    let _ = writeln!(out, "param n:={};", instance.word_len());
    out.push_str("param C:=\n");
    let mut scores: Vec<f64> = instance.coeffs().to_vec();
    if let Some(w) = instance.whole_word() {
        scores.push(w.score);
    }
    for (e, s) in scores.iter().enumerate() {
        let _ = writeln!(out, "{} {}", e + 1, format_score(*s));
    }
    out.push_str(";\n");
    if let Some(w) = instance.whole_word() {
        let _ = writeln!(out, "var Gama[{}] {};", scores.len(), u8::from(w.selected));
    }
    let _ = writeln!(
        out,
        "param const:={};",
        format_score(instance.constant_term())
    );
    out.push_str("\noption solver cplex;\nsolve ;\n\ndisplay z, Gama;\n");
    out
}

/// Collapses runs of spaces/tabs, trims each line and drops blank lines.
pub fn normalize_whitespace(text: &str) -> String {
    text.lines()
        .map(|l| {
            l.split([' ', '\t'])
                .filter(|t| !t.is_empty())
                .collect::<Vec<_>>()
                .join(" ")
        })
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join("\n")
}
