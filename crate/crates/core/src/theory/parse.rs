//! Reader for `.bq` theory files.
//!
//! ```text
//! domain floor = 1..2.
//! fluent on(floor), current(floor), opened.
//! action up(floor), down(floor), close.
//! initially { on(1), -opened, current(2) } | { ... }.
//! up(N) causes current(N), -on(N), opened : 1.0 if on(N), -opened.
//! static current(N) if -current(M), N != M.
//! executable up(N) if current(M), M < N.
//! executable close if {}.
//! goal -on(1), -on(2).
//! horizon 2.
//! discount 0.9.
//! ```

use std::collections::BTreeSet;

use crate::fixed::Fixed;
use crate::lex::{end_pos, tokenize, Cursor, Pos, Tok};

use super::{
    Atom, CmpOp, Comparison, Condition, DomainDecl, Expr, Literal, Signature, SourceCausalLaw,
    SourceExecutabilityLaw, SourceStaticLaw, Term, Theory, TheoryError,
};

const KEYWORDS: &[&str] = &[
    "domain",
    "fluent",
    "action",
    "initially",
    "executable",
    "static",
    "causes",
    "if",
    "goal",
    "horizon",
    "discount",
    "not",
    "neg",
];

pub fn parse_theory(source: &str) -> Result<Theory, TheoryError> {
    let tokens = tokenize(source)
        .map_err(|e| TheoryError::Syntax { pos: e.pos, message: e.message })?
        .into_iter()
        .filter(|t| !matches!(t.tok, Tok::Comment(_)))
        .collect();
    let mut parser = Parser { cur: Cursor::new(tokens, end_pos(source)), theory: Theory::default() };
    while !parser.cur.at_end() {
        parser.statement()?;
    }
    parser.check_declarations()?;
    Ok(parser.theory)
}

struct Parser {
    cur: Cursor,
    theory: Theory,
}

impl Parser {
    fn error<T>(&self, message: impl Into<String>) -> Result<T, TheoryError> {
        Err(TheoryError::Syntax { pos: self.cur.pos(), message: message.into() })
    }

    fn expected<T>(&self, what: &str) -> Result<T, TheoryError> {
        self.error(format!("expected {what}, found {}", self.cur.describe_next()))
    }

    fn expect(&mut self, tok: Tok) -> Result<(), TheoryError> {
        if self.cur.eat(&tok) {
            Ok(())
        } else {
            self.expected(&tok.to_string())
        }
    }

    fn peek_keyword(&self, word: &str) -> bool {
        matches!(self.cur.peek(), Some(Tok::Ident(w)) if w == word)
    }

    fn eat_keyword(&mut self, word: &str) -> bool {
        if self.peek_keyword(word) {
            self.cur.next();
            true
        } else {
            false
        }
    }

    fn name(&mut self, what: &str) -> Result<String, TheoryError> {
        match self.cur.peek() {
            Some(Tok::Ident(w)) if !KEYWORDS.contains(&w.as_str()) => {
                let w = w.clone();
                self.cur.next();
                Ok(w)
            }
            Some(Tok::Ident(w)) => {
                let w = w.clone();
                self.error(format!("`{w}` is a reserved word and cannot name {what}"))
            }
            _ => self.expected(what),
        }
    }

    fn statement(&mut self) -> Result<(), TheoryError> {
        let pos = self.cur.pos();
        let keyword = match self.cur.peek() {
            Some(Tok::Ident(w)) => w.clone(),
            Some(Tok::Minus) => String::new(),
            _ => return self.expected("a statement"),
        };
        match keyword.as_str() {
            "domain" => {
                self.cur.next();
                self.domain(pos)
            }
            "fluent" | "action" => {
                self.cur.next();
                loop {
                    let sig = self.signature()?;
                    if keyword == "fluent" {
                        self.theory.fluents.push(sig);
                    } else {
                        self.theory.actions.push(sig);
                    }
                    if !self.cur.eat(&Tok::Comma) {
                        break;
                    }
                }
                self.expect(Tok::Dot)
            }
            "initially" => {
                self.cur.next();
                loop {
                    let alt_pos = self.cur.pos();
                    self.expect(Tok::LBrace)?;
                    let literals = self.literal_list(Some(Tok::RBrace))?;
                    self.expect(Tok::RBrace)?;
                    self.theory.initially.push((literals, alt_pos));
                    if !self.cur.eat(&Tok::Bar) {
                        break;
                    }
                }
                self.expect(Tok::Dot)
            }
            "executable" => {
                self.cur.next();
                let action = self.atom()?;
                let condition = if self.eat_keyword("if") { self.condition()? } else { Condition::default() };
                self.expect(Tok::Dot)?;
                self.theory.executability_laws.push(SourceExecutabilityLaw { action, condition, pos });
                Ok(())
            }
            "static" => {
                self.cur.next();
                let head = self.literal()?;
                let condition = if self.eat_keyword("if") { self.condition()? } else { Condition::default() };
                self.expect(Tok::Dot)?;
                self.theory.static_laws.push(SourceStaticLaw { head, condition, pos });
                Ok(())
            }
            "goal" => {
                self.cur.next();
                if self.theory.goal.is_some() {
                    return Err(TheoryError::Duplicate { pos, kind: "directive", name: "goal".into() });
                }
                let literals = self.formula()?;
                self.expect(Tok::Dot)?;
                self.theory.goal = Some((literals, pos));
                Ok(())
            }
            "horizon" => {
                self.cur.next();
                if self.theory.horizon.is_some() {
                    return Err(TheoryError::Duplicate { pos, kind: "directive", name: "horizon".into() });
                }
                let value = match self.cur.next().map(|t| t.tok) {
                    Some(Tok::Int(v)) if v >= 0 && v <= i64::from(u32::MAX) => v as u32,
                    _ => return self.error("horizon must be a non-negative integer"),
                };
                self.expect(Tok::Dot)?;
                self.theory.horizon = Some(value);
                Ok(())
            }
            "discount" => {
                self.cur.next();
                if self.theory.discount.is_some() {
                    return Err(TheoryError::Duplicate { pos, kind: "directive", name: "discount".into() });
                }
                let value = match self.cur.next().map(|t| t.tok) {
                    Some(Tok::Int(v)) => v as f64,
                    Some(Tok::Decimal(text)) => text.parse::<f64>().map_err(|_| TheoryError::Syntax {
                        pos,
                        message: format!("bad discount `{text}`"),
                    })?,
                    _ => return self.error("discount must be a number"),
                };
                self.expect(Tok::Dot)?;
                self.theory.discount = Some(value);
                Ok(())
            }
            _ => self.law(pos),
        }
    }

    fn domain(&mut self, pos: Pos) -> Result<(), TheoryError> {
        let name = self.name("a domain")?;
        self.expect(Tok::Eq)?;
        let mut values = Vec::new();
        if self.cur.eat(&Tok::LBrace) {
            if !self.cur.eat(&Tok::RBrace) {
                loop {
                    values.push(self.constant()?);
                    if !self.cur.eat(&Tok::Comma) {
                        break;
                    }
                }
                self.expect(Tok::RBrace)?;
            }
        } else {
            let lo = self.integer()?;
            self.expect(Tok::DotDot)?;
            let hi = self.integer()?;
            values.extend((lo..=hi).map(Term::Int));
        }
        self.expect(Tok::Dot)?;
        self.theory.domains.push(DomainDecl { name, values, pos });
        Ok(())
    }

    fn integer(&mut self) -> Result<i64, TheoryError> {
        let negative = self.cur.eat(&Tok::Minus);
        match self.cur.peek() {
            Some(Tok::Int(v)) => {
                let v = *v;
                self.cur.next();
                Ok(if negative { -v } else { v })
            }
            _ => self.expected("an integer"),
        }
    }

    fn constant(&mut self) -> Result<Term, TheoryError> {
        match self.cur.peek() {
            Some(Tok::Int(_)) | Some(Tok::Minus) => Ok(Term::Int(self.integer()?)),
            Some(Tok::Ident(_)) => Ok(Term::Sym(self.name("a constant")?)),
            _ => self.expected("a constant"),
        }
    }

    fn signature(&mut self) -> Result<Signature, TheoryError> {
        let pos = self.cur.pos();
        let name = self.name("a fluent or action")?;
        let mut arg_types = Vec::new();
        if self.cur.eat(&Tok::LParen) {
            loop {
                arg_types.push(self.name("a type")?);
                if !self.cur.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(Tok::RParen)?;
        }
        Ok(Signature { name, arg_types, pos })
    }

    fn term(&mut self) -> Result<Term, TheoryError> {
        match self.cur.peek() {
            Some(Tok::Var(v)) => {
                let v = v.clone();
                self.cur.next();
                Ok(Term::Var(v))
            }
            _ => self.constant(),
        }
    }

    fn atom(&mut self) -> Result<Atom, TheoryError> {
        let name = self.name("an atom")?;
        let mut args = Vec::new();
        if self.cur.eat(&Tok::LParen) {
            loop {
                args.push(self.term()?);
                if !self.cur.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(Tok::RParen)?;
        }
        Ok(Atom { name, args })
    }

    fn literal(&mut self) -> Result<Literal, TheoryError> {
        let positive = !self.cur.eat(&Tok::Minus);
        let atom = self.atom()?;
        Ok(Literal { atom, positive })
    }

    /// Comma-separated literals, stopping before `stop` or a statement end.
    fn literal_list(&mut self, stop: Option<Tok>) -> Result<Vec<Literal>, TheoryError> {
        let mut out = Vec::new();
        if stop.is_some() && self.cur.peek() == stop.as_ref() {
            return Ok(out);
        }
        loop {
            out.push(self.literal()?);
            if !self.cur.eat(&Tok::Comma) {
                break;
            }
        }
        Ok(out)
    }

    /// `{}` | `{ l, ... }` | `l, ...`
    fn formula(&mut self) -> Result<Vec<Literal>, TheoryError> {
        if self.cur.eat(&Tok::LBrace) {
            let literals = self.literal_list(Some(Tok::RBrace))?;
            self.expect(Tok::RBrace)?;
            Ok(literals)
        } else {
            self.literal_list(None)
        }
    }

    fn condition(&mut self) -> Result<Condition, TheoryError> {
        let braced = self.cur.eat(&Tok::LBrace);
        let mut condition = Condition::default();
        if braced && self.cur.eat(&Tok::RBrace) {
            return Ok(condition);
        }
        loop {
            self.condition_item(&mut condition)?;
            if !self.cur.eat(&Tok::Comma) {
                break;
            }
        }
        if braced {
            self.expect(Tok::RBrace)?;
        }
        Ok(condition)
    }

    fn condition_item(&mut self, condition: &mut Condition) -> Result<(), TheoryError> {
        let is_comparison = match (self.cur.peek(), self.cur.peek_at(1)) {
            (Some(Tok::Var(_)), _) | (Some(Tok::Int(_)), _) | (Some(Tok::Minus), Some(Tok::Int(_))) => true,
            (Some(Tok::Ident(_)), Some(next)) => cmp_op(next).is_some(),
            _ => false,
        };
        if is_comparison {
            let lhs = self.expr()?;
            let op = match self.cur.peek().and_then(cmp_op) {
                Some(op) => op,
                None => return self.expected("a comparison operator"),
            };
            self.cur.next();
            let rhs = self.expr()?;
            condition.comparisons.push(Comparison { lhs, op, rhs });
        } else {
            condition.literals.push(self.literal()?);
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr, TheoryError> {
        let term = self.term()?;
        let offset = if self.cur.eat(&Tok::Plus) {
            self.integer()?
        } else if matches!(self.cur.peek(), Some(Tok::Minus)) && matches!(self.cur.peek_at(1), Some(Tok::Int(_))) {
            self.cur.next();
            -self.integer()?
        } else {
            0
        };
        Ok(Expr { term, offset })
    }

    fn reward(&mut self) -> Result<Fixed, TheoryError> {
        let pos = self.cur.pos();
        let negative = self.cur.eat(&Tok::Minus);
        let text = match self.cur.next().map(|t| t.tok) {
            Some(Tok::Int(v)) => v.to_string(),
            Some(Tok::Decimal(d)) => d,
            _ => return Err(TheoryError::Syntax { pos, message: "expected a reward value".into() }),
        };
        let text = if negative { format!("-{text}") } else { text };
        text.parse::<Fixed>().map_err(|e| TheoryError::Syntax { pos, message: e.to_string() })
    }

    /// `a causes φ [: r] [if ψ].` or `l if ψ.`
    fn law(&mut self, pos: Pos) -> Result<(), TheoryError> {
        let head = self.literal()?;
        if self.eat_keyword("causes") {
            if !head.positive {
                return Err(TheoryError::Syntax { pos, message: "an action cannot be negated".into() });
            }
            let effects = self.formula()?;
            let reward = if self.cur.eat(&Tok::Colon) { self.reward()? } else { Fixed::ZERO };
            let condition = if self.eat_keyword("if") { self.condition()? } else { Condition::default() };
            self.expect(Tok::Dot)?;
            self.theory.causal_laws.push(SourceCausalLaw { action: head.atom, effects, reward, condition, pos });
            Ok(())
        } else if self.eat_keyword("if") {
            let condition = self.condition()?;
            self.expect(Tok::Dot)?;
            self.theory.static_laws.push(SourceStaticLaw { head, condition, pos });
            Ok(())
        } else {
            self.expected("`causes` or `if`")
        }
    }

    fn check_declarations(&self) -> Result<(), TheoryError> {
        let mut domains = BTreeSet::new();
        for decl in &self.theory.domains {
            if !domains.insert(decl.name.as_str()) {
                return Err(TheoryError::Duplicate { pos: decl.pos, kind: "domain", name: decl.name.clone() });
            }
        }
        let mut symbols = BTreeSet::new();
        for (kind, sig) in self
            .theory
            .fluents
            .iter()
            .map(|s| ("fluent", s))
            .chain(self.theory.actions.iter().map(|s| ("action", s)))
        {
            if !symbols.insert(sig.name.as_str()) {
                return Err(TheoryError::Duplicate { pos: sig.pos, kind, name: sig.name.clone() });
            }
            for ty in &sig.arg_types {
                if !domains.contains(ty.as_str()) {
                    return Err(TheoryError::UnknownType { pos: sig.pos, name: ty.clone() });
                }
            }
        }
        Ok(())
    }
}

fn cmp_op(tok: &Tok) -> Option<CmpOp> {
    Some(match tok {
        Tok::Lt => CmpOp::Lt,
        Tok::Le => CmpOp::Le,
        Tok::Gt => CmpOp::Gt,
        Tok::Ge => CmpOp::Ge,
        Tok::Eq => CmpOp::Eq,
        Tok::Ne => CmpOp::Ne,
        _ => return None,
    })
}
