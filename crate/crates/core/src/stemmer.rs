//! From profile to stem.
//!
//! The pipeline is profile -> program -> canonical solution -> append the
//! whole-word flag -> split into maximal runs -> keep the longest run (the
//! rightmost on ties) -> the stem is the prefix ending at that run's last
//! position. Position `e` of the extended vector stands for the first `e + 1`
//! characters.

use std::fmt::{self, Write as _};

use serde::Serialize;
use thiserror::Error;

use crate::corpus::FrequencyModel;
use crate::ip::{build_instance, display_formulation, IpError, IpInstance, Solver};
use crate::profile::{probability_profile, render_profile_table, ProbabilityProfile, ProfileError};

#[derive(Debug, Error, PartialEq)]
pub enum StemError {
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Ip(#[from] IpError),
}

/// A maximal block of equal values in the extended assignment, with
/// 1-based inclusive bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Run {
    pub value: bool,
    pub start: usize,
    pub end: usize,
}

impl Run {
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl fmt::Display for Run {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}s at γ{}..γ{} (length {})",
            u8::from(self.value),
            self.start,
            self.end,
            self.len()
        )
    }
}

/// Splits `gamma` into maximal runs, left to right.
pub fn runs(gamma: &[bool]) -> Vec<Run> {
    let mut out: Vec<Run> = Vec::new();
    for (i, &g) in gamma.iter().enumerate() {
        match out.last_mut() {
            Some(run) if run.value == g => run.end = i + 1,
            _ => out.push(Run {
                value: g,
                start: i + 1,
                end: i + 1,
            }),
        }
    }
    out
}

/// Index of the longest run; ties go to the rightmost.
pub fn select_run(runs: &[Run]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, run) in runs.iter().enumerate() {
        if best.is_none_or(|b| run.len() >= runs[b].len()) {
            best = Some(i);
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct StemResult {
    pub stem: String,
    pub profile: ProbabilityProfile,
    /// `None` for one-character words, which are their own stem.
    pub instance: Option<IpInstance>,
    /// Solution variables with the whole-word flag appended when the
    /// program has one.
    pub gamma_extended: Vec<bool>,
    pub runs: Vec<Run>,
    pub chosen_run: Option<usize>,
    pub objective: f64,
}

impl StemResult {
    pub fn word(&self) -> &str {
        self.profile.word()
    }

    pub fn chosen(&self) -> Option<&Run> {
        self.chosen_run.map(|i| &self.runs[i])
    }
}

/// Stems words against one model with a fixed solver.
#[derive(Debug, Clone, Copy)]
pub struct Stemmer<'m> {
    model: &'m FrequencyModel,
    solver: Solver,
}

impl<'m> Stemmer<'m> {
    pub fn new(model: &'m FrequencyModel) -> Self {
        Stemmer {
            model,
            solver: Solver::Analytic,
        }
    }

    pub fn with_solver(mut self, solver: Solver) -> Self {
        self.solver = solver;
        self
    }

    pub fn model(&self) -> &'m FrequencyModel {
        self.model
    }

    pub fn solver(&self) -> Solver {
        self.solver
    }

    pub fn stem(&self, word: &str) -> Result<StemResult, StemError> {
        let profile = probability_profile(self.model, word)?;
        stem_profile(profile, self.solver)
    }

    /// Multi-line trace of how `result` was obtained: the profile table,
    /// the program, its solution, the runs and the chosen run.
    pub fn explain(&self, result: &StemResult) -> String {
        explain(self.model, result)
    }
}

/// Runs the selection pipeline on a ready-made profile.
pub fn stem_profile(profile: ProbabilityProfile, solver: Solver) -> Result<StemResult, StemError> {
    if profile.len() == 1 {
        return Ok(StemResult {
            stem: profile.word().to_owned(),
            profile,
            instance: None,
            gamma_extended: Vec::new(),
            runs: Vec::new(),
            chosen_run: None,
            objective: 0.0,
        });
    }
    let instance = build_instance(&profile)?;
    let solution = solver.solve(&instance)?;
    let mut gamma_extended = solution.gamma;
    if let Some(w) = instance.whole_word() {
        gamma_extended.push(w.selected);
    }
    let runs = runs(&gamma_extended);
    let chosen = select_run(&runs).expect("word of length >= 2 has at least one run");
    let stem = profile.prefix(runs[chosen].end + 1);
    Ok(StemResult {
        stem,
        profile,
        instance: Some(instance),
        gamma_extended,
        runs,
        chosen_run: Some(chosen),
        objective: solution.objective,
    })
}

fn gamma_string(gamma: &[bool]) -> String {
    gamma
        .iter()
        .map(|&g| if g { "1" } else { "0" })
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn explain(model: &FrequencyModel, result: &StemResult) -> String {
    let mut out = String::new();
    out.push_str(&render_profile_table(&result.profile, model));
    out.push('\n');
    let Some(instance) = &result.instance else {
        let _ = writeln!(out, "Single character: no program is posed.");
        let _ = writeln!(out, "Stem: {}", result.stem);
        return out;
    };
    out.push_str(&display_formulation(instance));
    out.push('\n');
    if let Some(w) = instance.whole_word() {
        let n = instance.n_vars() + 1;
        let cmp = if w.selected { ">=" } else { "<" };
        let _ = writeln!(
            out,
            "C{n} {cmp} C{}, so γ{n} = {}",
            n - 1,
            u8::from(w.selected)
        );
    }
    let n_vars = instance.n_vars();
    let _ = writeln!(
        out,
        "Solution: γ = ({}), Z = {:.6}",
        gamma_string(&result.gamma_extended[..n_vars]),
        result.objective
    );
    let _ = writeln!(out, "Extended: ({})", gamma_string(&result.gamma_extended));
    out.push_str("Runs:\n");
    for (i, run) in result.runs.iter().enumerate() {
        let mark = if Some(i) == result.chosen_run {
            " <- selected"
        } else {
            ""
        };
        let _ = writeln!(out, "  {run}{mark}");
    }
    if let Some(run) = result.chosen() {
        let _ = writeln!(out, "Last variable: γ{}", run.end);
    }
    let _ = writeln!(out, "Stem: {}", result.stem);
    out
}
