//! Theories bundled with the crate, used by tests, examples and `bq check`.

use crate::theory::{ground_theory, parse_theory, ActionTheory, TheoryError};

/// Two floors, horizon 2, with the "current" static law.
pub const ELEVATOR: &str = include_str!("../fixtures/elevator.bq");
/// Two floors without static laws; moves switch the old floor off directly.
pub const ELEVATOR_MOVES: &str = include_str!("../fixtures/elevator_moves.bq");
/// 3x3 grid, horizon 4.
pub const GRIDWORLD: &str = include_str!("../fixtures/gridworld.bq");
/// Mutually supporting static laws; the translation is not tight.
pub const COUPLED: &str = include_str!("../fixtures/coupled.bq");

pub const ALL: [(&str, &str); 4] = [
    ("elevator", ELEVATOR),
    ("elevator_moves", ELEVATOR_MOVES),
    ("gridworld", GRIDWORLD),
    ("coupled", COUPLED),
];

/// Parses and grounds `source`.
pub fn load(source: &str) -> Result<ActionTheory, TheoryError> {
    ground_theory(&parse_theory(source)?)
}

pub fn by_name(name: &str) -> Option<&'static str> {
    ALL.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}
