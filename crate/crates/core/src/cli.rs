//! The `bq` command line. [`run`] takes its streams as arguments so tests can
//! drive it without a process.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::check::{check_q_values, check_theory, solve_program, CheckConfig, PipelineError, SolvePath};
use crate::program::parse_program;
use crate::q::{extract_policy, q_learning_table, sarsa_table, Mode, QTable};
use crate::semantics::{episodes_to_jsonl, Engine, Limits};
use crate::solver::{clark_completion, emit_dimacs, tightness_check, SolverLimits};
use crate::theory::{parse_theory, scoping_violations, validate_source, validate_theory, ActionTheory, Theory};
use crate::translate::{translate, translation_report, TranslateOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CAP: i32 = 3;
pub const EXIT_CHECK: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "bq", version, about = "Action theories with rewards: episodes, Q estimates and answer set encodings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Asp,
    Dimacs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PathArg {
    Naive,
    Sat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Qlearning,
    Sarsa,
}

#[derive(Debug, Args)]
struct TheoryArgs {
    /// Theory file, or `-` for standard input.
    input: PathBuf,
    /// Override the horizon.
    #[arg(long)]
    horizon: Option<u32>,
    /// Override the discount factor; must lie in (0, 1).
    #[arg(long)]
    discount: Option<f64>,
    /// Keep only episodes that end in a goal state.
    #[arg(long)]
    require_goal: bool,
    /// Reject initial completions that no initial description allows.
    #[arg(long)]
    strict_initial: bool,
    /// Translate with the base rules only.
    #[arg(long, alias = "paper-literal")]
    core_only: bool,
    /// Forbid occurrences of inexecutable actions (default unless --core-only).
    #[arg(long, overrides_with = "no_enforce_exec")]
    enforce_exec: bool,
    #[arg(long, overrides_with = "enforce_exec")]
    no_enforce_exec: bool,
    #[arg(long, value_enum)]
    output: Option<Output>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate a theory, echoing it back.
    Parse(TheoryArgs),
    /// Ground a theory and print its canonical form.
    Ground(TheoryArgs),
    /// Enumerate every episode with its discounted return.
    Episodes(TheoryArgs),
    /// Translate a theory into a normal program or a CNF.
    Translate {
        #[command(flatten)]
        theory: TheoryArgs,
        #[arg(long, value_enum, default_value = "asp")]
        format: Format,
        /// Print rule counts per category to standard error.
        #[arg(long)]
        report: bool,
    },
    /// Compute answer sets with their Q atoms.
    Solve {
        #[command(flatten)]
        theory: TheoryArgs,
        #[arg(long, value_enum, default_value = "naive")]
        path: PathArg,
        /// Read a translated program instead of a theory.
        #[arg(long)]
        program: bool,
    },
    /// Q estimates from the episodes, checked against the answer sets.
    Qtable {
        #[command(flatten)]
        theory: TheoryArgs,
        #[arg(long, value_enum, default_value = "qlearning")]
        mode: ModeArg,
    },
    /// Greedy policy from the Q estimates.
    Policy {
        #[command(flatten)]
        theory: TheoryArgs,
        #[arg(long, value_enum, default_value = "qlearning")]
        mode: ModeArg,
    },
    /// Cross-check episodes, Q values and both solver routes.
    Check {
        #[command(flatten)]
        theory: TheoryArgs,
        #[arg(long, value_enum, default_value = "qlearning")]
        mode: ModeArg,
    },
}

/// A failure with its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INPUT, message: message.into() }
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        let code = match &e {
            e if e.is_cap() => EXIT_CAP,
            PipelineError::Extract(_) | PipelineError::Solve(_) => EXIT_CHECK,
            _ => EXIT_INPUT,
        };
        Failure { code, message: e.to_string() }
    }
}

type Outcome = Result<i32, Failure>;

struct Io<'a> {
    stdin: &'a mut dyn Read,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn print(&mut self, text: &str) -> Outcome {
        self.out.write_all(text.as_bytes()).map_err(|e| Failure::input(format!("cannot write output: {e}")))?;
        Ok(EXIT_OK)
    }

    fn warn(&mut self, text: &str) {
        let _ = writeln!(self.err, "warning: {text}");
    }

    fn read(&mut self, path: &PathBuf) -> Result<String, Failure> {
        if path.as_os_str() == "-" {
            let mut s = String::new();
            self.stdin.read_to_string(&mut s).map_err(|e| Failure::input(format!("cannot read standard input: {e}")))?;
            return Ok(s);
        }
        std::fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
    }
}

fn env_cap(name: &str, default: usize) -> Result<usize, Failure> {
    match std::env::var(name) {
        Ok(v) => v.trim().parse().map_err(|_| Failure::input(format!("{name} must be a nonnegative integer, got `{v}`"))),
        Err(_) => Ok(default),
    }
}

/// Caps, overridable through `BQ_*` environment variables.
fn limits() -> Result<(Limits, SolverLimits), Failure> {
    let s = Limits::default();
    let v = SolverLimits::default();
    Ok((
        Limits {
            max_state_atoms: env_cap("BQ_MAX_STATE_ATOMS", s.max_state_atoms)?,
            max_nodes: env_cap("BQ_MAX_EPISODE_NODES", s.max_nodes)?,
        },
        SolverLimits {
            max_nodes: env_cap("BQ_MAX_SEARCH_NODES", v.max_nodes)?,
            max_brute_atoms: env_cap("BQ_MAX_BRUTE_ATOMS", v.max_brute_atoms)?,
            max_models: env_cap("BQ_MAX_MODELS", v.max_models)?,
        },
    ))
}

impl TheoryArgs {
    fn options(&self) -> TranslateOptions {
        let mut options = if self.core_only { TranslateOptions::core_only() } else { TranslateOptions::default() };
        if self.enforce_exec {
            options.enforce_exec = true;
        }
        if self.no_enforce_exec {
            options.enforce_exec = false;
        }
        options.require_goal = self.require_goal;
        options.strict_initial = self.strict_initial;
        options
    }

    fn output(&self, default: Output) -> Output {
        self.output.unwrap_or(default)
    }

    fn parse(&self, io: &mut Io<'_>) -> Result<Theory, Failure> {
        let source = io.read(&self.input)?;
        parse_theory(&source).map_err(|e| Failure::input(e.to_string()))
    }

    /// Parsed, grounded, overridden and validated theory.
    fn load(&self, io: &mut Io<'_>) -> Result<ActionTheory, Failure> {
        let parsed = self.parse(io)?;
        let (mut theory, mut report) = validate_source(&parsed).map_err(|e| Failure::input(e.to_string()))?;
        if let Some(h) = self.horizon {
            theory = theory.with_horizon(h);
        }
        if let Some(g) = self.discount {
            if !(g > 0.0 && g < 1.0) {
                return Err(Failure::input(format!("discount {g} is not in (0, 1)")));
            }
            theory = theory.with_gamma(g);
        }
        if self.horizon.is_some() || self.discount.is_some() {
            report = validate_theory(&theory);
            report.merge(scoping_violations(&parsed));
        }
        for w in report.warnings() {
            io.warn(&w.message);
        }
        if let Some(v) = report.violations().next() {
            return Err(Failure::input(v.message.clone()));
        }
        Ok(theory)
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn mode(m: ModeArg) -> Mode {
    match m {
        ModeArg::Qlearning => Mode::QLearning,
        ModeArg::Sarsa => Mode::Sarsa,
    }
}

fn semantics_failure(e: crate::semantics::SemanticsError) -> Failure {
    PipelineError::from(e).into()
}

fn cmd_parse(args: &TheoryArgs, io: &mut Io<'_>) -> Outcome {
    let parsed = args.parse(io)?;
    let (_, report) = validate_source(&parsed).map_err(|e| Failure::input(e.to_string()))?;
    let text = match args.output(Output::Text) {
        Output::Json => json(&report),
        Output::Text => {
            let mut s = parsed.to_string();
            for issue in &report.issues {
                let _ = writeln!(s, "% {issue}");
            }
            s
        }
    };
    io.print(&text)?;
    if report.is_valid() {
        Ok(EXIT_OK)
    } else {
        Err(Failure::input("theory is not valid"))
    }
}

#[derive(Serialize)]
struct GroundJson {
    fluents: Vec<String>,
    actions: Vec<String>,
    horizon: u32,
    discount: f64,
    text: String,
}

fn cmd_ground(args: &TheoryArgs, io: &mut Io<'_>) -> Outcome {
    let theory = args.load(io)?;
    let text = match args.output(Output::Text) {
        Output::Text => theory.pretty(),
        Output::Json => json(&GroundJson {
            fluents: theory.atoms().iter().map(ToString::to_string).collect(),
            actions: theory.actions().iter().map(ToString::to_string).collect(),
            horizon: theory.horizon,
            discount: theory.gamma,
            text: theory.pretty(),
        }),
    };
    io.print(&text)
}

fn cmd_episodes(args: &TheoryArgs, io: &mut Io<'_>, limits: Limits) -> Outcome {
    let theory = args.load(io)?;
    let engine = Engine::with_limits(&theory, limits);
    let episodes = engine.enumerate_episodes(args.require_goal).map_err(semantics_failure)?;
    if episodes.is_empty() {
        io.warn("no episodes");
    }
    let text = match args.output(Output::Json) {
        Output::Json => episodes_to_jsonl(&episodes, Some(theory.gamma)),
        Output::Text => {
            let mut s = String::new();
            for e in &episodes {
                let _ = write!(s, "{}", e.states[0]);
                for t in 0..e.actions.len() {
                    let _ = write!(s, " --{} [{}]--> {}", e.actions[t], e.rewards[t], e.states[t + 1]);
                }
                s.push('\n');
            }
            s
        }
    };
    io.print(&text)
}

fn cmd_translate(args: &TheoryArgs, format: Format, report: bool, io: &mut Io<'_>) -> Outcome {
    let theory = args.load(io)?;
    let program = translate(&theory, &args.options()).map_err(semantics_failure)?;
    if report {
        for c in translation_report(&program).counts {
            let _ = writeln!(io.err, "{:>6} {}", c.count, c.category);
        }
    }
    match format {
        Format::Asp => io.print(&program.to_text()),
        Format::Dimacs => {
            let tightness = tightness_check(&program);
            if !tightness.tight {
                let cycle: Vec<String> = tightness.cycle.iter().map(ToString::to_string).collect();
                return Err(Failure {
                    code: EXIT_CAP,
                    message: format!(
                        "program is not tight (positive cycle {}); its loop formulas are added during solving and cannot be exported",
                        cycle.join(" -> ")
                    ),
                });
            }
            io.print(&emit_dimacs(&clark_completion(&program)))
        }
    }
}

#[derive(Serialize)]
struct SolveJson {
    path: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    sat_path: Option<String>,
    count: usize,
    answer_sets: Vec<crate::solver::AnswerSetRecord>,
}

fn cmd_solve(args: &TheoryArgs, path: PathArg, from_program: bool, io: &mut Io<'_>, solver: SolverLimits) -> Outcome {
    let program = if from_program {
        let text = io.read(&args.input)?;
        parse_program(&text).map_err(|e| Failure::input(e.to_string()))?
    } else {
        let theory = args.load(io)?;
        translate(&theory, &args.options()).map_err(semantics_failure)?
    };
    let route = match path {
        PathArg::Naive => SolvePath::Naive,
        PathArg::Sat => SolvePath::Sat,
    };
    let (answers, outcome) = solve_program(&program, route, &solver)?;
    let silent: usize = answers.iter().map(|a| a.q.notes.len()).sum();
    if silent > 0 {
        io.warn(&format!("{silent} steps have no reward atom and count as 0"));
    }
    let text = match args.output(Output::Json) {
        Output::Json => json(&SolveJson {
            path: match route {
                SolvePath::Naive => "naive",
                SolvePath::Sat => "sat",
            },
            sat_path: outcome.map(|o| o.path.to_string()),
            count: answers.len(),
            answer_sets: answers.iter().map(|a| a.record()).collect(),
        }),
        Output::Text => {
            let mut s = String::new();
            for (i, a) in answers.iter().enumerate() {
                let _ = writeln!(s, "answer {}: {}", i + 1, a.trace);
                if let Some(last) = a.q.steps.last() {
                    let _ = writeln!(s, "  {last}");
                }
            }
            let _ = writeln!(s, "{} answer sets", answers.len());
            s
        }
    };
    io.print(&text)
}

#[derive(Serialize)]
struct QtableJson<'a> {
    mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    table: Option<Vec<crate::q::QEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    episodes: Option<Vec<crate::q::SarsaEpisode>>,
    check: &'a crate::check::QCheck,
}

fn cmd_qtable(args: &TheoryArgs, m: Mode, io: &mut Io<'_>, limits: (Limits, SolverLimits)) -> Outcome {
    let theory = args.load(io)?;
    let engine = Engine::with_limits(&theory, limits.0);
    let episodes = engine.enumerate_episodes(args.require_goal).map_err(semantics_failure)?;
    let program = translate(&theory, &args.options()).map_err(semantics_failure)?;
    let (answers, _) = solve_program(&program, SolvePath::Naive, &limits.1)?;
    let report = check_q_values(&engine, &episodes, &answers, m)?;
    let (mut table, mut per_episode) = (None, None);
    if !episodes.is_empty() {
        match m {
            Mode::QLearning => table = Some(q_learning_table(&episodes, theory.gamma).map_err(PipelineError::from)?.to_entries()),
            Mode::Sarsa => per_episode = Some(sarsa_table(&episodes, theory.gamma).map_err(PipelineError::from)?.episodes),
        }
    } else {
        io.warn("no episodes");
    }
    let text = match args.output(Output::Json) {
        Output::Json => json(&QtableJson { mode: m, table, episodes: per_episode, check: &report }),
        Output::Text => {
            let mut s = String::new();
            for e in table.iter().flatten() {
                let _ = writeln!(s, "{{{}}} {} @{}: {}", e.state.join(", "), e.action, e.depth.unwrap_or(0), e.value);
            }
            for e in per_episode.iter().flatten() {
                let _ = writeln!(
                    s,
                    "episode {}: {{{}}} {}: {}",
                    e.index,
                    e.initial_state.join(", "),
                    e.initial_action.as_deref().unwrap_or("-"),
                    e.q0
                );
            }
            let _ = writeln!(
                s,
                "answer sets agree: {} ({} compared, max diff {:e})",
                if report.passed { "yes" } else { "no" },
                report.compared,
                report.max_float_diff
            );
            s
        }
    };
    io.print(&text)?;
    if report.passed {
        Ok(EXIT_OK)
    } else {
        Err(Failure { code: EXIT_CHECK, message: "Q values from the answer sets disagree with the direct estimates".into() })
    }
}

fn cmd_policy(args: &TheoryArgs, m: Mode, io: &mut Io<'_>, limits: Limits) -> Outcome {
    let theory = args.load(io)?;
    let engine = Engine::with_limits(&theory, limits);
    let episodes = engine.enumerate_episodes(args.require_goal).map_err(semantics_failure)?;
    let table = if episodes.is_empty() {
        io.warn("no episodes; the policy is empty");
        QTable::new(theory.gamma, theory.horizon as usize)
    } else {
        match m {
            Mode::QLearning => q_learning_table(&episodes, theory.gamma),
            Mode::Sarsa => sarsa_table(&episodes, theory.gamma).map(|t| t.max_aggregate()),
        }
        .map_err(PipelineError::from)?
    };
    let policy = extract_policy(&table);
    let text = match args.output(Output::Json) {
        Output::Json => json(&policy.to_entries()),
        Output::Text => {
            let mut s = String::new();
            for e in policy.to_entries() {
                let _ = writeln!(s, "{{{}}} -> {}", e.state.join(", "), e.action);
            }
            s
        }
    };
    io.print(&text)
}

fn cmd_check(args: &TheoryArgs, m: Mode, io: &mut Io<'_>, limits: (Limits, SolverLimits)) -> Outcome {
    let theory = args.load(io)?;
    let config = CheckConfig { translate: args.options(), mode: m, semantics: limits.0, solver: limits.1 };
    let report = check_theory(&theory, &config)?;
    let text = match args.output(Output::Text) {
        Output::Json => report.to_json() + "\n",
        Output::Text => report.to_text(),
    };
    io.print(&text)?;
    if report.passed {
        Ok(EXIT_OK)
    } else {
        Err(Failure { code: EXIT_CHECK, message: "cross-checks failed".into() })
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
            } else {
                let _ = out.write_all(text.as_bytes());
            }
            return e.exit_code();
        }
    };
    let mut io = Io { stdin, out, err };
    let outcome = limits().and_then(|limits| match &cli.command {
        Command::Parse(a) => cmd_parse(a, &mut io),
        Command::Ground(a) => cmd_ground(a, &mut io),
        Command::Episodes(a) => cmd_episodes(a, &mut io, limits.0),
        Command::Translate { theory, format, report } => cmd_translate(theory, *format, *report, &mut io),
        Command::Solve { theory, path, program } => cmd_solve(theory, *path, *program, &mut io, limits.1),
        Command::Qtable { theory, mode: m } => cmd_qtable(theory, mode(*m), &mut io, limits),
        Command::Policy { theory, mode: m } => cmd_policy(theory, mode(*m), &mut io, limits.0),
        Command::Check { theory, mode: m } => cmd_check(theory, mode(*m), &mut io, limits),
    });
    match outcome {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(io.err, "error: {}", f.message);
            f.code
        }
    }
}
