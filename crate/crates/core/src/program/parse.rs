use thiserror::Error;

use super::{Category, GroundAtom, NormalProgram, Provenance, QRule, Rule, Term};
use crate::fixed::Fixed;
use crate::lex::{end_pos, tokenize, Cursor, Pos, Tok, Token};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: {message}")]
pub struct ProgramParseError {
    pub pos: Pos,
    pub message: String,
}

struct Parser {
    cur: Cursor,
}

type Result<T> = std::result::Result<T, ProgramParseError>;

impl Parser {
    fn fail<T>(&self, what: &str) -> Result<T> {
        Err(ProgramParseError {
            pos: self.cur.pos(),
            message: format!("expected {what}, found {}", self.cur.describe_next()),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.cur.eat(&tok) {
            Ok(())
        } else {
            self.fail(what)
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.cur.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.cur.next();
                Ok(s)
            }
            _ => self.fail("an identifier"),
        }
    }

    fn number(&mut self, negative: bool) -> Result<Term> {
        let pos = self.cur.pos();
        match self.cur.next().map(|t| t.tok) {
            Some(Tok::Int(i)) => Ok(Term::Int(if negative { -i } else { i })),
            Some(Tok::Decimal(text)) => {
                let text = if negative { format!("-{text}") } else { text };
                text.parse::<Fixed>()
                    .map(Term::Num)
                    .map_err(|e| ProgramParseError { pos, message: format!("bad number `{text}`: {e}") })
            }
            _ => Err(ProgramParseError { pos, message: "expected a number".into() }),
        }
    }

    fn term(&mut self) -> Result<Term> {
        match self.cur.peek() {
            Some(Tok::Minus) => {
                self.cur.next();
                self.number(true)
            }
            Some(Tok::Int(_)) | Some(Tok::Decimal(_)) => self.number(false),
            Some(Tok::Ident(_)) => {
                let name = self.ident()?;
                if self.cur.eat(&Tok::LParen) {
                    Ok(Term::Fn(name, self.args()?))
                } else {
                    Ok(Term::Sym(name))
                }
            }
            _ => self.fail("a term"),
        }
    }

    /// Arguments after `(`, through the closing `)`.
    fn args(&mut self) -> Result<Vec<Term>> {
        let mut args = vec![self.term()?];
        while self.cur.eat(&Tok::Comma) {
            args.push(self.term()?);
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(args)
    }

    fn atom(&mut self) -> Result<GroundAtom> {
        let predicate = self.ident()?;
        let args = if self.cur.eat(&Tok::LParen) { self.args()? } else { vec![] };
        Ok(GroundAtom { predicate, args })
    }

    fn body(&mut self) -> Result<(Vec<GroundAtom>, Vec<GroundAtom>)> {
        let (mut pos, mut neg) = (vec![], vec![]);
        if self.cur.peek() == Some(&Tok::Dot) {
            return Ok((pos, neg));
        }
        loop {
            let negated = matches!(self.cur.peek(), Some(Tok::Ident(s)) if s == "not")
                && matches!(self.cur.peek_at(1), Some(Tok::Ident(_)));
            if negated {
                self.cur.next();
                neg.push(self.atom()?);
            } else {
                pos.push(self.atom()?);
            }
            if !self.cur.eat(&Tok::Comma) {
                return Ok((pos, neg));
            }
        }
    }
}

fn provenance(comment: &str) -> Option<Provenance> {
    let rest = comment.strip_prefix('[')?;
    let (label, source) = rest.split_once(']')?;
    let category = Category::from_label(label)?;
    let source = source.trim();
    Some(Provenance { category, source: (!source.is_empty()).then(|| source.to_string()) })
}

/// Reads the text produced by [`NormalProgram::to_text`]. A `% [n] text`
/// comment on the line a rule ends becomes that rule's provenance.
pub fn parse_program(source: &str) -> Result<NormalProgram> {
    let tokens = tokenize(source).map_err(|e| ProgramParseError { pos: e.pos, message: e.message })?;
    let mut comments: Vec<(usize, String)> = Vec::new();
    let tokens: Vec<Token> = tokens
        .into_iter()
        .filter(|t| match &t.tok {
            Tok::Comment(text) => {
                comments.push((t.pos.line, text.clone()));
                false
            }
            _ => true,
        })
        .collect();
    let provenance_on = |line: usize| comments.iter().find(|(l, _)| *l == line).and_then(|(_, c)| provenance(c));

    let mut p = Parser { cur: Cursor::new(tokens, end_pos(source)) };
    let mut program = NormalProgram { rules: vec![], q_rules: vec![], horizon: 0, gamma: 0.0 };
    let (mut horizon, mut gamma) = (None, None);
    while !p.cur.at_end() {
        let start = p.cur.pos();
        if p.cur.eat(&Tok::Hash) {
            let name = p.ident()?;
            match name.as_str() {
                "horizon" => match p.cur.next().map(|t| t.tok) {
                    Some(Tok::Int(n)) if n >= 0 => horizon = Some(n as u32),
                    _ => return Err(ProgramParseError { pos: start, message: "bad #horizon".into() }),
                },
                "discount" => {
                    let text = match p.cur.next().map(|t| t.tok) {
                        Some(Tok::Decimal(s)) => s,
                        Some(Tok::Int(i)) => i.to_string(),
                        _ => return Err(ProgramParseError { pos: start, message: "bad #discount".into() }),
                    };
                    gamma = text.parse::<f64>().ok();
                }
                "q" => {
                    p.expect(Tok::LParen, "`(`")?;
                    let args = p.args()?;
                    p.expect(Tok::Neck, "`:-`")?;
                    let (body, neg) = p.body()?;
                    let end = p.cur.pos();
                    p.expect(Tok::Dot, "`.`")?;
                    match (args.as_slice(), neg.is_empty()) {
                        ([action, Term::Num(reward), Term::Int(time)], true) if *time >= 0 => {
                            program.q_rules.push(QRule {
                                action: action.clone(),
                                reward: *reward,
                                time: *time as u32,
                                body,
                                provenance: provenance_on(end.line),
                            });
                        }
                        _ => return Err(ProgramParseError { pos: start, message: "malformed #q rule".into() }),
                    }
                    continue;
                }
                other => {
                    return Err(ProgramParseError { pos: start, message: format!("unknown directive `#{other}`") })
                }
            }
            p.expect(Tok::Dot, "`.`")?;
            continue;
        }
        let head = if p.cur.peek() == Some(&Tok::Neck) { None } else { Some(p.atom()?) };
        let (pos, neg) = if p.cur.eat(&Tok::Neck) { p.body()? } else { (vec![], vec![]) };
        let end = p.cur.pos();
        p.expect(Tok::Dot, "`.`")?;
        program.rules.push(Rule { head, pos, neg, provenance: provenance_on(end.line) });
    }
    program.horizon = horizon.ok_or(ProgramParseError { pos: end_pos(source), message: "missing #horizon".into() })?;
    program.gamma = gamma.ok_or(ProgramParseError { pos: end_pos(source), message: "missing #discount".into() })?;
    Ok(program)
}
