use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::{ground_theory, ActionTheory, Condition, ConjunctiveFormula, Pos, Theory, TheoryError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{tag}: {}", self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<Violation>,
}

impl ValidationReport {
    fn error(&mut self, message: impl Into<String>) {
        self.issues.push(Violation { severity: Severity::Error, message: message.into() });
    }

    fn warning(&mut self, message: impl Into<String>) {
        self.issues.push(Violation { severity: Severity::Warning, message: message.into() });
    }

    pub fn violations(&self) -> impl Iterator<Item = &Violation> {
        self.issues.iter().filter(|v| v.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Violation> {
        self.issues.iter().filter(|v| v.severity == Severity::Warning)
    }

    pub fn is_valid(&self) -> bool {
        self.violations().next().is_none()
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.issues.extend(other.issues);
        self.issues.sort();
        self.issues.dedup();
    }
}

/// Structural checks on a ground theory. An empty violation list means valid.
pub fn validate_theory(theory: &ActionTheory) -> ValidationReport {
    let mut report = ValidationReport::default();
    if !(theory.gamma > 0.0 && theory.gamma < 1.0) {
        report.error(format!("discount out of range: {} is not in (0, 1)", theory.gamma));
    }
    if theory.horizon == 0 {
        report.warning("horizon is 0: every episode is a single initial state");
    }
    if theory.initial_states.is_empty() {
        report.error("no initial state declared");
    }
    for (i, formula) in theory.initial_states.iter().enumerate() {
        if !formula.is_consistent() {
            report.error(format!("inconsistent initial description #{}: {{ {formula} }}", i + 1));
        }
    }
    if !theory.goal.is_consistent() {
        report.error(format!("inconsistent goal: {}", theory.goal));
    }
    let mut check = |what: &str, law: &dyn fmt::Display, formula: &ConjunctiveFormula| {
        if !formula.is_consistent() {
            report.error(format!("inconsistent {what} in `{law}`"));
        }
    };
    for law in &theory.causal_laws {
        check("effects", law, &law.effects);
        check("condition", law, &law.condition);
    }
    for law in &theory.executability_laws {
        check("condition", law, &law.condition);
    }
    for law in &theory.static_laws {
        check("condition", law, &law.condition);
    }
    // Guards usually leave some ground instances inexecutable on purpose, so
    // only an action name with no executability law at all is suspicious.
    let executable: BTreeSet<&str> = theory.executability_laws.iter().map(|l| l.action.name.as_str()).collect();
    let mut warned = BTreeSet::new();
    for action in theory.caused_actions() {
        if !executable.contains(action.name.as_str()) && warned.insert(action.name.as_str()) {
            report.warning(format!("action `{}` has causal laws but no executability law", action.name));
        }
    }
    report.issues.sort();
    report
}

fn condition_vars(condition: &Condition) -> BTreeSet<String> {
    let mut vars = BTreeSet::new();
    for literal in &condition.literals {
        literal.atom.collect_vars(&mut vars);
    }
    for cmp in &condition.comparisons {
        for expr in [&cmp.lhs, &cmp.rhs] {
            if let super::Term::Var(v) = &expr.term {
                vars.insert(v.clone());
            }
        }
    }
    vars
}

/// Variable scoping rules that only make sense before grounding.
pub fn scoping_violations(theory: &Theory) -> ValidationReport {
    let mut report = ValidationReport::default();
    let at = |pos: Pos| format!("{pos}");
    for law in &theory.executability_laws {
        let mut action_vars = BTreeSet::new();
        law.action.collect_vars(&mut action_vars);
        let bound = condition_vars(&law.condition);
        for var in action_vars.difference(&bound) {
            report.error(format!("{}: variable `{var}` of action `{}` does not appear in its condition", at(law.pos), law.action));
        }
    }
    for law in &theory.causal_laws {
        let mut effect_vars = BTreeSet::new();
        for literal in &law.effects {
            literal.atom.collect_vars(&mut effect_vars);
        }
        let mut bound = condition_vars(&law.condition);
        law.action.collect_vars(&mut bound);
        for var in effect_vars.difference(&bound) {
            report.error(format!("{}: effect variable `{var}` appears in neither the action nor the condition", at(law.pos)));
        }
    }
    report
}

/// Grounds `theory` and returns it with the combined validation report.
pub fn validate_source(theory: &Theory) -> Result<(ActionTheory, ValidationReport), TheoryError> {
    let ground = ground_theory(theory)?;
    let mut report = validate_theory(&ground);
    report.merge(scoping_violations(theory));
    Ok((ground, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::parse_theory;

    const DECLS: &str = "domain floor = 1..2.\nfluent on(floor), current(floor), opened.\naction up(floor), close.\nhorizon 2.\n";

    fn report(body: &str, discount: &str) -> ValidationReport {
        let theory = parse_theory(&format!("{DECLS}discount {discount}.\n{body}")).unwrap();
        validate_source(&theory).unwrap().1
    }

    #[test]
    fn discount_boundary() {
        let r = report("initially { opened }.", "1.0");
        assert!(r.violations().any(|v| v.message.starts_with("discount out of range")));
        let r = report("initially { opened }.", "0.9");
        assert!(r.is_valid());
    }

    #[test]
    fn inconsistent_initial_description() {
        let r = report("initially { opened, -opened }.", "0.9");
        assert!(r.violations().any(|v| v.message.starts_with("inconsistent initial description")));
    }

    #[test]
    fn missing_executability_is_a_warning() {
        let r = report("initially { opened }.\nclose causes -opened : 1.0 if opened.", "0.9");
        assert!(r.is_valid());
        assert_eq!(r.warnings().count(), 1);
    }

    #[test]
    fn scoping_rules() {
        let r = report("initially { opened }.\nexecutable up(N) if opened.", "0.9");
        assert!(r.violations().any(|v| v.message.contains("variable `N` of action `up(N)`")));
        let r = report("initially { opened }.\nclose causes on(N) if opened.", "0.9");
        assert!(r.violations().any(|v| v.message.contains("effect variable `N`")));
        let r = report("initially { opened }.\nexecutable up(N) if current(M), M < N.", "0.9");
        assert!(r.is_valid());
    }
}
