//! Action theories with rewards, and the two ways of reading them.
//!
//! A theory names fluents and actions, says what each action causes and what
//! it pays, which actions are executable where, and which literals follow
//! from others. The crate enumerates its episodes directly and estimates
//! Q values from them, and it also translates the theory into a normal logic
//! program whose answer sets are those same episodes. A small solver (a
//! branch-and-bound search and a completion-based SAT route) closes the loop,
//! so either side can be checked against the other.
//!
//! ## Examples
//!
//! The examples are the main documentation. Each one is short and runs
//! on the bundled fixtures or on a theory written inline.
//!
//! - **`parse_and_ground`** - theory syntax, grounding, validation messages
//! - **`transitions`** - closure, states, executability, single steps
//! - **`episodes`** - enumeration, goal filtering, JSON lines
//! - **`q_estimates`** - Q-learning and SARSA tables, the greedy policy
//! - **`online_q`** - incremental returns and recovering the value at a step
//! - **`translate_program`** - the logic program and where each rule comes from
//! - **`solve_answer_sets`** - both solver routes, Q atoms, episode extraction
//! - **`sat_encoding`** - completion, tightness, loop formulas, DIMACS
//! - **`verify_theorems`** - every cross-check on every fixture
//! - **`custom_domain`** - a new domain from scratch through the whole pipeline
//!
//! ```bash
//! cargo run --example episodes
//! cargo run --example verify_theorems
//! ```
//!
//! The `bq` binary exposes the same pipeline on files.

pub mod check;
pub mod cli;
pub mod fixed;
pub mod fixtures;
pub mod lex;
pub mod program;
pub mod q;
pub mod semantics;
pub mod solver;
pub mod theory;
pub mod translate;
