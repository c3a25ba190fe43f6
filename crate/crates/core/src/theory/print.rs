//! Canonical text for ground theories and a plain echo for source theories.

use std::fmt::{self, Write as _};

use super::{ActionTheory, Literal, Signature, Term, Theory};

fn write_decls<'a>(
    out: &mut String,
    keyword: &str,
    decls: impl Iterator<Item = (&'a String, &'a Vec<String>)>,
) {
    for (name, types) in decls {
        if types.is_empty() {
            let _ = writeln!(out, "{keyword} {name}.");
        } else {
            let _ = writeln!(out, "{keyword} {name}({}).", types.join(", "));
        }
    }
}

fn join_terms(values: &[Term]) -> String {
    values.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

fn join_literals(literals: &[Literal]) -> String {
    literals.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

fn format_discount(gamma: f64) -> String {
    let text = format!("{gamma}");
    if text.contains('.') || text.contains('e') || text.contains("inf") || text.contains("NaN") {
        text
    } else {
        format!("{text}.0")
    }
}

impl ActionTheory {
    /// Deterministic text that parses and grounds back to an equal theory.
    ///
    /// Laws are grouped by kind (causal, executability, static) and sorted
    /// by their printed form inside each group.
    pub fn pretty(&self) -> String {
        let mut out = String::new();
        for (name, values) in &self.domains {
            let _ = writeln!(out, "domain {name} = {{{}}}.", join_terms(values));
        }
        write_decls(&mut out, "fluent", self.fluent_decls.iter());
        write_decls(&mut out, "action", self.action_decls.iter());
        if !self.initial_states.is_empty() {
            let alternatives: Vec<String> = self
                .initial_states
                .iter()
                .map(|f| if f.is_empty() { "{}".to_string() } else { format!("{{ {f} }}") })
                .collect();
            let _ = writeln!(out, "initially {}.", alternatives.join(" | "));
        }
        for laws in [
            sorted(self.causal_laws.iter().map(ToString::to_string)),
            sorted(self.executability_laws.iter().map(ToString::to_string)),
            sorted(self.static_laws.iter().map(ToString::to_string)),
        ] {
            for law in laws {
                let _ = writeln!(out, "{law}");
            }
        }
        if !self.goal.is_empty() {
            let _ = writeln!(out, "goal {}.", self.goal);
        }
        let _ = writeln!(out, "horizon {}.", self.horizon);
        let _ = writeln!(out, "discount {}.", format_discount(self.gamma));
        out
    }
}

fn sorted(items: impl Iterator<Item = String>) -> Vec<String> {
    let mut v: Vec<String> = items.collect();
    v.sort();
    v
}

fn write_signature(f: &mut fmt::Formatter<'_>, keyword: &str, sig: &Signature) -> fmt::Result {
    if sig.arg_types.is_empty() {
        writeln!(f, "{keyword} {}.", sig.name)
    } else {
        writeln!(f, "{keyword} {}({}).", sig.name, sig.arg_types.join(", "))
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for decl in &self.domains {
            writeln!(f, "domain {} = {{{}}}.", decl.name, join_terms(&decl.values))?;
        }
        for sig in &self.fluents {
            write_signature(f, "fluent", sig)?;
        }
        for sig in &self.actions {
            write_signature(f, "action", sig)?;
        }
        if !self.initially.is_empty() {
            let alternatives: Vec<String> = self
                .initially
                .iter()
                .map(|(lits, _)| if lits.is_empty() { "{}".into() } else { format!("{{ {} }}", join_literals(lits)) })
                .collect();
            writeln!(f, "initially {}.", alternatives.join(" | "))?;
        }
        for law in &self.causal_laws {
            let effects = if law.effects.is_empty() { "{}".to_string() } else { join_literals(&law.effects) };
            writeln!(f, "{} causes {} : {} if {}.", law.action, effects, law.reward, law.condition)?;
        }
        for law in &self.executability_laws {
            writeln!(f, "executable {} if {}.", law.action, law.condition)?;
        }
        for law in &self.static_laws {
            writeln!(f, "static {} if {}.", law.head, law.condition)?;
        }
        if let Some((goal, _)) = &self.goal {
            if goal.is_empty() {
                writeln!(f, "goal {{}}.")?;
            } else {
                writeln!(f, "goal {}.", join_literals(goal))?;
            }
        }
        if let Some(h) = self.horizon {
            writeln!(f, "horizon {h}.")?;
        }
        if let Some(g) = self.discount {
            writeln!(f, "discount {}.", format_discount(g))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use crate::theory::{ground_theory, parse_theory};

    const SOURCE: &str = "domain floor = 1..2.
fluent on(floor), current(floor), opened.
action up(floor), close.
initially { on(2), -opened, current(1) }.
up(N) causes current(N), -on(N), opened : 1.0 if on(N), -opened.
close causes -opened : 1.0 if opened.
executable up(N) if current(M), M < N.
executable close if {}.
static current(N) if -current(M), N != M.
goal -on(2).
horizon 2.
discount 0.9.
";

    #[test]
    fn canonical_text_is_a_fixpoint() {
        let ground = ground_theory(&parse_theory(SOURCE).unwrap()).unwrap();
        let text = ground.pretty();
        let again = ground_theory(&parse_theory(&text).unwrap()).unwrap();
        assert_eq!(again, ground);
        assert_eq!(again.pretty(), text);
    }

    #[test]
    fn canonical_layout() {
        let ground = ground_theory(&parse_theory(SOURCE).unwrap()).unwrap();
        let text = ground.pretty();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "domain floor = {1, 2}.");
        assert!(lines.contains(&"close causes -opened : 1.0 if opened."));
        assert!(lines.contains(&"executable close if {}."));
        assert!(lines.contains(&"static current(1) if -current(2)."));
        assert_eq!(lines[lines.len() - 1], "discount 0.9.");
        let causal = lines.iter().position(|l| l.contains("causes")).unwrap();
        let exec = lines.iter().position(|l| l.starts_with("executable")).unwrap();
        let stat = lines.iter().position(|l| l.starts_with("static")).unwrap();
        assert!(causal < exec && exec < stat);
    }

    #[test]
    fn source_echo_reparses() {
        let theory = parse_theory(SOURCE).unwrap();
        let echoed = parse_theory(&theory.to_string()).unwrap();
        assert_eq!(ground_theory(&echoed).unwrap(), ground_theory(&theory).unwrap());
    }
}
