//! End-to-end pipeline (translate, solve, extract) and the cross-checks
//! between the answer-set route and the direct semantics.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::program::NormalProgram;
use crate::q::{q_learning_table, sarsa_table, Mode, QError};
use crate::semantics::{Engine, Episode, Limits, SemanticsError};
use crate::solver::{
    extract_episode, naive_answer_sets, sat_answer_sets, AnswerSet, ExtractError, Interpretation, SatOutcome,
    SolveError, SolverLimits,
};
use crate::theory::ActionTheory;
use crate::translate::{translate, TranslateOptions};

/// Tolerance between floating-point values computed along different routes.
pub const FLOAT_TOLERANCE: f64 = 1e-9;
/// One fixed-point unit; the fixed-point fold may drift by one unit per step.
pub const FIXED_UNIT: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error(transparent)]
    Q(#[from] QError),
}

impl PipelineError {
    pub fn is_cap(&self) -> bool {
        match self {
            PipelineError::Semantics(e) => e.is_cap(),
            PipelineError::Solve(e) => e.is_cap(),
            PipelineError::Q(QError::Semantics(e)) => e.is_cap(),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolvePath {
    #[default]
    Naive,
    Sat,
}

impl std::str::FromStr for SolvePath {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "naive" => Ok(SolvePath::Naive),
            "sat" => Ok(SolvePath::Sat),
            _ => Err(format!("unknown solver path `{s}` (expected naive or sat)")),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CheckConfig {
    pub translate: TranslateOptions,
    pub mode: Mode,
    pub semantics: Limits,
    pub solver: SolverLimits,
}

impl CheckConfig {
    pub fn new(translate: TranslateOptions) -> Self {
        CheckConfig { translate, ..CheckConfig::default() }
    }
}

/// Answer sets of a program with their traces and Q layers.
pub fn solve_program(
    program: &NormalProgram,
    path: SolvePath,
    limits: &SolverLimits,
) -> Result<(Vec<AnswerSet>, Option<SatOutcome>), PipelineError> {
    let (sets, outcome) = match path {
        SolvePath::Naive => (naive_answer_sets(program, limits)?, None),
        SolvePath::Sat => {
            let out = sat_answer_sets(program, limits)?;
            (out.answer_sets.clone(), Some(out))
        }
    };
    let answers = sets.into_iter().map(|s| AnswerSet::new(program, s)).collect::<Result<_, _>>()?;
    Ok((answers, outcome))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpisodeCheck {
    pub passed: bool,
    pub episodes: usize,
    pub answer_sets: usize,
    /// Episodes with no matching answer set.
    pub missing: Vec<String>,
    /// Answer sets that are not episodes, or duplicate one.
    pub spurious: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QComparison {
    pub state: Vec<String>,
    pub action: String,
    pub direct: Option<f64>,
    pub pipeline: Option<f64>,
    pub fixed: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QCheck {
    pub passed: bool,
    pub mode: Mode,
    pub compared: usize,
    pub max_float_diff: f64,
    pub max_fixed_diff: f64,
    pub fixed_bound: f64,
    pub mismatches: Vec<QComparison>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverCheck {
    pub passed: bool,
    pub naive: usize,
    pub sat: usize,
    pub sat_path: String,
    pub loop_clauses: usize,
    pub restarts: usize,
    pub only_naive: Vec<Vec<String>>,
    pub only_sat: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub passed: bool,
    pub fluents: usize,
    pub actions: usize,
    pub horizon: u32,
    pub gamma: f64,
    pub program_atoms: usize,
    pub program_rules: usize,
    pub episodes_check: EpisodeCheck,
    pub q_check: QCheck,
    pub solver_check: SolverCheck,
}

fn episode_text(e: &Episode) -> String {
    let mut s = e.states[0].to_string();
    for t in 0..e.actions.len() {
        let _ = write!(s, " -{}/{}-> {}", e.actions[t], e.rewards[t], e.states[t + 1]);
    }
    s
}

fn interpretation_strings(s: &Interpretation) -> Vec<String> {
    s.iter().map(ToString::to_string).collect()
}

/// Episodes read off answer sets versus enumerated episodes, as multisets.
pub fn check_episodes(engine: &Engine<'_>, episodes: &[Episode], answers: &[AnswerSet]) -> EpisodeCheck {
    let mut expected: BTreeMap<&Episode, usize> = episodes.iter().map(|e| (e, 1)).collect();
    let mut spurious = Vec::new();
    for answer in answers {
        match extract_episode(&answer.atoms, engine) {
            Ok((trace, episode)) => match expected.get_mut(&episode) {
                Some(left) if *left > 0 => *left -= 1,
                Some(_) => spurious.push(format!("duplicate: {trace}")),
                None => spurious.push(format!("not an episode: {}", episode_text(&episode))),
            },
            Err(e) => spurious.push(format!("{e}: {}", answer.trace)),
        }
    }
    let missing: Vec<String> =
        expected.iter().filter(|(_, &left)| left > 0).map(|(e, _)| episode_text(e)).collect();
    EpisodeCheck {
        passed: missing.is_empty() && spurious.is_empty(),
        episodes: episodes.len(),
        answer_sets: answers.len(),
        missing,
        spurious,
    }
}

fn row<'a>(rows: &'a mut BTreeMap<(String, String), QComparison>, e: &Episode) -> &'a mut QComparison {
    let (state, action) = (e.states[0].to_string(), e.actions[0].to_string());
    rows.entry((state, action.clone())).or_insert_with(|| QComparison {
        state: e.states[0].to_strings(),
        action,
        direct: None,
        pipeline: None,
        fixed: None,
    })
}

fn vacuous(mode: Mode, note: &str) -> QCheck {
    QCheck {
        passed: true,
        mode,
        compared: 0,
        max_float_diff: 0.0,
        max_fixed_diff: 0.0,
        fixed_bound: 0.0,
        mismatches: Vec::new(),
        note: Some(note.into()),
    }
}

/// Final Q atoms of the answer sets versus the direct estimates.
///
/// Q-learning compares, per initial pair, the maximum over answer sets with
/// the direct table at depth 0. SARSA compares each answer set with the
/// episode it encodes.
pub fn check_q_values(
    engine: &Engine<'_>,
    episodes: &[Episode],
    answers: &[AnswerSet],
    mode: Mode,
) -> Result<QCheck, PipelineError> {
    let theory = engine.theory();
    if theory.horizon == 0 {
        return Ok(vacuous(mode, "horizon 0: no Q values"));
    }
    if episodes.is_empty() && answers.is_empty() {
        return Ok(vacuous(mode, "no episodes"));
    }
    let n = theory.horizon as f64;
    let fixed_bound = n * FIXED_UNIT;
    let gamma = theory.gamma;
    let mut rows: BTreeMap<(String, String), QComparison> = BTreeMap::new();
    let mut sarsa_rows = Vec::new();
    match mode {
        Mode::QLearning => {
            let table = if episodes.is_empty() { None } else { Some(q_learning_table(episodes, gamma)?) };
            for e in episodes {
                let value = table.as_ref().and_then(|t| t.get(&e.states[0], &e.actions[0], 0));
                row(&mut rows, e).direct = value;
            }
            for answer in answers {
                let (_, episode) = extract_episode(&answer.atoms, engine)?;
                let r = row(&mut rows, &episode);
                let (float, fixed) = (answer.q.final_float(), answer.q.final_value().to_f64());
                r.pipeline = Some(r.pipeline.map_or(float, |v| v.max(float)));
                r.fixed = Some(r.fixed.map_or(fixed, |v| v.max(fixed)));
            }
        }
        Mode::Sarsa => {
            let direct: BTreeMap<&Episode, f64> = if episodes.is_empty() {
                BTreeMap::new()
            } else {
                let table = sarsa_table(episodes, gamma)?;
                episodes.iter().zip(table.episodes.iter().map(|s| s.q0)).collect()
            };
            for answer in answers {
                let (_, episode) = extract_episode(&answer.atoms, engine)?;
                sarsa_rows.push(QComparison {
                    state: episode.states[0].to_strings(),
                    action: episode.actions[0].to_string(),
                    direct: direct.get(&episode).copied(),
                    pipeline: Some(answer.q.final_float()),
                    fixed: Some(answer.q.final_value().to_f64()),
                });
            }
        }
    }
    let compared: Vec<QComparison> = match mode {
        Mode::QLearning => rows.into_values().collect(),
        Mode::Sarsa => sarsa_rows,
    };
    let (mut max_float_diff, mut max_fixed_diff) = (0.0f64, 0.0f64);
    let mut mismatches = Vec::new();
    for c in &compared {
        match (c.direct, c.pipeline, c.fixed) {
            (Some(d), Some(p), Some(f)) => {
                let (df, dx) = ((d - p).abs(), (d - f).abs());
                max_float_diff = max_float_diff.max(df);
                max_fixed_diff = max_fixed_diff.max(dx);
                if df > FLOAT_TOLERANCE || dx > fixed_bound + FLOAT_TOLERANCE {
                    mismatches.push(c.clone());
                }
            }
            _ => mismatches.push(c.clone()),
        }
    }
    if mode == Mode::Sarsa && compared.len() != episodes.len() {
        mismatches.extend(
            episodes
                .iter()
                .filter(|e| !answers.iter().any(|a| extract_episode(&a.atoms, engine).is_ok_and(|(_, x)| x == **e)))
                .map(|e| QComparison {
                    state: e.states[0].to_strings(),
                    action: e.actions[0].to_string(),
                    direct: Some(e.reward_values().iter().rev().fold(0.0, |acc, r| r + gamma * acc)),
                    pipeline: None,
                    fixed: None,
                }),
        );
    }
    Ok(QCheck {
        passed: mismatches.is_empty(),
        mode,
        compared: compared.len(),
        max_float_diff,
        max_fixed_diff,
        fixed_bound,
        mismatches,
        note: None,
    })
}

/// Naive answer sets versus the SAT route.
pub fn check_solvers(program: &NormalProgram, limits: &SolverLimits) -> Result<SolverCheck, PipelineError> {
    let naive = naive_answer_sets(program, limits)?;
    let sat = sat_answer_sets(program, limits)?;
    let only_naive: Vec<Vec<String>> =
        naive.iter().filter(|s| !sat.answer_sets.contains(s)).map(interpretation_strings).collect();
    let only_sat: Vec<Vec<String>> =
        sat.answer_sets.iter().filter(|s| !naive.contains(s)).map(interpretation_strings).collect();
    Ok(SolverCheck {
        passed: only_naive.is_empty() && only_sat.is_empty() && naive.len() == sat.answer_sets.len(),
        naive: naive.len(),
        sat: sat.answer_sets.len(),
        sat_path: sat.path.to_string(),
        loop_clauses: sat.loop_clauses,
        restarts: sat.restarts,
        only_naive,
        only_sat,
    })
}

/// Runs the three cross-checks on one theory.
pub fn check_theory(theory: &ActionTheory, config: &CheckConfig) -> Result<CheckReport, PipelineError> {
    let engine = Engine::with_limits(theory, config.semantics);
    let episodes = engine.enumerate_episodes(config.translate.require_goal)?;
    let program = translate(theory, &config.translate)?;
    let (answers, _) = solve_program(&program, SolvePath::Naive, &config.solver)?;
    let episodes_check = check_episodes(&engine, &episodes, &answers);
    let q_check = if episodes_check.passed {
        check_q_values(&engine, &episodes, &answers, config.mode)?
    } else {
        vacuous(config.mode, "skipped: answer sets do not match the episodes")
    };
    let q_check = QCheck { passed: q_check.passed && episodes_check.passed, ..q_check };
    let solver_check = check_solvers(&program, &config.solver)?;
    Ok(CheckReport {
        passed: episodes_check.passed && q_check.passed && solver_check.passed,
        fluents: theory.atoms().len(),
        actions: theory.actions().len(),
        horizon: theory.horizon,
        gamma: theory.gamma,
        program_atoms: program.atoms().len(),
        program_rules: program.rules.len() + program.q_rules.len(),
        episodes_check,
        q_check,
        solver_check,
    })
}

fn verdict(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

impl CheckReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "theory: {} fluents, {} actions, horizon {}, discount {}",
            self.fluents, self.actions, self.horizon, self.gamma
        );
        let _ = writeln!(out, "program: {} atoms, {} rules", self.program_atoms, self.program_rules);
        let t1 = &self.episodes_check;
        let _ = writeln!(
            out,
            "{} episodes/answer sets: {} episodes, {} answer sets",
            verdict(t1.passed),
            t1.episodes,
            t1.answer_sets
        );
        for m in &t1.missing {
            let _ = writeln!(out, "  missing: {m}");
        }
        for s in &t1.spurious {
            let _ = writeln!(out, "  spurious: {s}");
        }
        let t2 = &self.q_check;
        let _ = writeln!(
            out,
            "{} q values ({}): {} compared, max diff {:e}, fixed-point diff {:e} (bound {:e})",
            verdict(t2.passed),
            t2.mode,
            t2.compared,
            t2.max_float_diff,
            t2.max_fixed_diff,
            t2.fixed_bound
        );
        if let Some(note) = &t2.note {
            let _ = writeln!(out, "  note: {note}");
        }
        for m in &t2.mismatches {
            let show = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v}"));
            let _ = writeln!(
                out,
                "  mismatch: {{{}}} {}: direct {}, answer sets {}",
                m.state.join(", "),
                m.action,
                show(m.direct),
                show(m.pipeline)
            );
        }
        let t3 = &self.solver_check;
        let _ = writeln!(
            out,
            "{} naive/sat: {} naive, {} sat via {} ({} loop clauses, {} restarts)",
            verdict(t3.passed),
            t3.naive,
            t3.sat,
            t3.sat_path,
            t3.loop_clauses,
            t3.restarts
        );
        for s in &t3.only_naive {
            let _ = writeln!(out, "  only naive: {{{}}}", s.join(", "));
        }
        for s in &t3.only_sat {
            let _ = writeln!(out, "  only sat: {{{}}}", s.join(", "));
        }
        let _ = writeln!(out, "{}", if self.passed { "all checks passed" } else { "checks failed" });
        out
    }
}
