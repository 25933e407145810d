//! Recursive-descent reader for the line-oriented KB format.
//!
//! ```text
//! @mode datalog
//! fact taOf(v, kd).
//! rule r1: lect(X) -> emp(X).
//! constraint c1: ta(X), rese(X) -> !.
//! ```

use std::collections::{BTreeSet, HashMap};

use super::kb::{KnowledgeBase, Mode};
use super::syntax::{Atom, Head, Literal, Rule, Strength, Term};
use crate::error::KbError;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Tilde,
    LParen,
    RParen,
    Comma,
    Colon,
    Dot,
    Arrow,
    DArrow,
    Bang,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

fn tokenize(text: &str, first_line: usize) -> Result<Vec<Spanned>, KbError> {
    let mut out = Vec::new();
    for (offset, line) in text.lines().enumerate() {
        let lineno = first_line + offset;
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            let simple = match c {
                '#' => break,
                c if c.is_whitespace() => {
                    i += 1;
                    continue;
                }
                '~' => Some(Tok::Tilde),
                '(' => Some(Tok::LParen),
                ')' => Some(Tok::RParen),
                ',' => Some(Tok::Comma),
                ':' => Some(Tok::Colon),
                '.' => Some(Tok::Dot),
                '!' => Some(Tok::Bang),
                _ => None,
            };
            if let Some(tok) = simple {
                out.push(Spanned {
                    tok,
                    line: lineno,
                    col,
                });
                i += 1;
                continue;
            }
            if (c == '-' || c == '=') && chars.get(i + 1) == Some(&'>') {
                let tok = if c == '-' { Tok::Arrow } else { Tok::DArrow };
                out.push(Spanned {
                    tok,
                    line: lineno,
                    col,
                });
                i += 2;
                continue;
            }
            if is_ident_char(c) {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                out.push(Spanned {
                    tok: Tok::Ident(chars[start..i].iter().collect()),
                    line: lineno,
                    col,
                });
                continue;
            }
            return Err(KbError::Syntax {
                line: lineno,
                col,
                msg: format!("unexpected character '{c}'"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end_line: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        match self.toks.get(self.pos) {
            Some(s) => (s.line, s.col),
            None => (self.end_line, 1),
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, KbError> {
        let (line, col) = self.here();
        Err(KbError::Syntax {
            line,
            col,
            msg: msg.into(),
        })
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), KbError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, KbError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.err(format!("expected {what}")),
        }
    }

    fn term(&mut self) -> Result<Term, KbError> {
        let name = self.ident("a term")?;
        let first = name.chars().next().unwrap_or('a');
        Ok(if first.is_uppercase() || first == '_' {
            Term::Var(name)
        } else {
            Term::Const(name)
        })
    }

    fn literal(&mut self) -> Result<Literal, KbError> {
        let mut negated = false;
        while self.peek() == Some(&Tok::Tilde) {
            negated = !negated;
            self.pos += 1;
        }
        let predicate = self.ident("a predicate name")?;
        let mut args = Vec::new();
        if self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            loop {
                args.push(self.term()?);
                match self.peek() {
                    Some(Tok::Comma) => self.pos += 1,
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        break;
                    }
                    _ => return self.err("expected ',' or ')'"),
                }
            }
        }
        Ok(Literal {
            atom: Atom::new(predicate, args),
            negated,
        })
    }

    fn body(&mut self) -> Result<Vec<Literal>, KbError> {
        let mut body = vec![self.literal()?];
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            body.push(self.literal()?);
        }
        Ok(body)
    }
}

/// Parse a single literal, e.g. a query string.
pub fn parse_literal(text: &str) -> Result<Literal, KbError> {
    let toks = tokenize(text, 1)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end_line: 1,
    };
    let lit = p.literal()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input after literal");
    }
    Ok(lit)
}

struct Stmt {
    line: usize,
    kind: StmtKind,
}

enum StmtKind {
    Fact(Literal),
    Rule(Rule),
}

/// Parse and validate a knowledge base.
pub fn parse_kb(text: &str) -> Result<KnowledgeBase, KbError> {
    // Locate the mode header: first line that is neither blank nor a comment.
    let lines: Vec<&str> = text.lines().collect();
    let mut header = None;
    for (i, raw) in lines.iter().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        header = Some((i, line));
        break;
    }
    let (hidx, hline) = header.ok_or(KbError::Syntax {
        line: 1,
        col: 1,
        msg: "missing '@mode' header".into(),
    })?;
    let mut parts = hline.split_whitespace();
    if parts.next() != Some("@mode") {
        return Err(KbError::Syntax {
            line: hidx + 1,
            col: 1,
            msg: "the first statement must be '@mode <datalog|defeasible|defeasible-contrapositive>'".into(),
        });
    }
    let mode = match (parts.next(), parts.next()) {
        (Some(m), None) => Mode::from_name(m).ok_or_else(|| KbError::Syntax {
            line: hidx + 1,
            col: 7,
            msg: format!("unknown mode '{m}'"),
        })?,
        _ => {
            return Err(KbError::Syntax {
                line: hidx + 1,
                col: 1,
                msg: "malformed '@mode' header".into(),
            })
        }
    };

    let rest = lines[hidx + 1..].join("\n");
    if rest.contains("@mode") {
        let line = lines
            .iter()
            .enumerate()
            .skip(hidx + 1)
            .find(|(_, l)| l.split('#').next().unwrap_or("").contains("@mode"))
            .map(|(i, _)| i + 1)
            .unwrap_or(hidx + 2);
        return Err(KbError::Syntax {
            line,
            col: 1,
            msg: "exactly one '@mode' header is allowed".into(),
        });
    }
    let toks = tokenize(&rest, hidx + 2)?;
    let end_line = lines.len().max(1);
    let mut p = Parser {
        toks,
        pos: 0,
        end_line,
    };

    let mut stmts = Vec::new();
    while p.pos < p.toks.len() {
        let (line, _) = p.here();
        let kw = p.ident("'fact', 'rule' or 'constraint'")?;
        match kw.as_str() {
            "fact" => {
                let lit = p.literal()?;
                p.expect(Tok::Dot, "'.'")?;
                stmts.push(Stmt {
                    line,
                    kind: StmtKind::Fact(lit),
                });
            }
            "rule" | "constraint" => {
                let id = p.ident("a rule id")?;
                p.expect(Tok::Colon, "':'")?;
                let body = p.body()?;
                let strength = match p.peek() {
                    Some(Tok::Arrow) => Strength::Strict,
                    Some(Tok::DArrow) => Strength::Defeasible,
                    _ => return p.err("expected '->' or '=>'"),
                };
                p.pos += 1;
                let head = if p.peek() == Some(&Tok::Bang) {
                    p.pos += 1;
                    Head::Bottom
                } else {
                    Head::Lit(p.literal()?)
                };
                p.expect(Tok::Dot, "'.'")?;
                let is_constraint = kw == "constraint";
                if is_constraint != matches!(head, Head::Bottom) {
                    return Err(KbError::Invalid {
                        line,
                        msg: if is_constraint {
                            format!("constraint {id} must have head '!'")
                        } else {
                            format!("rule {id} has head '!'; declare it as a constraint")
                        },
                    });
                }
                stmts.push(Stmt {
                    line,
                    kind: StmtKind::Rule(Rule {
                        id,
                        body,
                        head,
                        strength,
                    }),
                });
            }
            other => {
                return Err(KbError::Syntax {
                    line,
                    col: 1,
                    msg: format!("unknown statement '{other}'"),
                })
            }
        }
    }

    validate(mode, stmts)
}

fn validate(mode: Mode, stmts: Vec<Stmt>) -> Result<KnowledgeBase, KbError> {
    let mut arity: HashMap<String, usize> = HashMap::new();
    let mut ids: BTreeSet<String> = BTreeSet::new();
    let mut facts = BTreeSet::new();
    let mut rules = Vec::new();
    let mut constraints = Vec::new();

    let mut check_lit = |lit: &Literal, line: usize| -> Result<(), KbError> {
        let n = lit.atom.args.len();
        match arity.get(&lit.atom.predicate) {
            Some(&m) if m != n => Err(KbError::Arity {
                line,
                predicate: lit.atom.predicate.clone(),
                expected: m,
                found: n,
            }),
            Some(_) => Ok(()),
            None => {
                arity.insert(lit.atom.predicate.clone(), n);
                Ok(())
            }
        }
    };

    for st in stmts {
        match st.kind {
            StmtKind::Fact(lit) => {
                check_lit(&lit, st.line)?;
                if !lit.is_ground() {
                    return Err(KbError::Invalid {
                        line: st.line,
                        msg: format!("fact {lit} is not ground"),
                    });
                }
                if mode == Mode::Datalog && lit.negated {
                    return Err(KbError::Invalid {
                        line: st.line,
                        msg: format!("strong negation is not available in datalog mode: {lit}"),
                    });
                }
                facts.insert(lit);
            }
            StmtKind::Rule(rule) => {
                for l in &rule.body {
                    check_lit(l, st.line)?;
                }
                if let Some(h) = rule.head_literal() {
                    check_lit(h, st.line)?;
                }
                if !ids.insert(rule.id.clone()) {
                    return Err(KbError::DuplicateId {
                        line: st.line,
                        id: rule.id,
                    });
                }
                match mode {
                    Mode::Datalog => {
                        if rule.strength == Strength::Defeasible {
                            return Err(KbError::Invalid {
                                line: st.line,
                                msg: format!("defeasible rule {} is not available in datalog mode", rule.id),
                            });
                        }
                        let negated = rule.body.iter().chain(rule.head_literal()).any(|l| l.negated);
                        if negated {
                            return Err(KbError::Invalid {
                                line: st.line,
                                msg: format!("strong negation is not available in datalog mode (rule {})", rule.id),
                            });
                        }
                        let body_vars: BTreeSet<&str> = rule
                            .body
                            .iter()
                            .flat_map(|l| l.atom.args.iter())
                            .filter(|t| t.is_var())
                            .map(Term::name)
                            .collect();
                        if let Some(h) = rule.head_literal() {
                            if let Some(v) = h.atom.args.iter().find(|t| t.is_var() && !body_vars.contains(t.name())) {
                                return Err(KbError::Existential {
                                    rule: rule.id.clone(),
                                    var: v.name().to_string(),
                                });
                            }
                        }
                    }
                    Mode::Defeasible | Mode::DefeasibleContrapositive => {
                        if !rule.is_ground() {
                            return Err(KbError::Invalid {
                                line: st.line,
                                msg: format!("rule {} must be ground in defeasible modes", rule.id),
                            });
                        }
                    }
                }
                if rule.is_constraint() {
                    constraints.push(rule);
                } else {
                    rules.push(rule);
                }
            }
        }
    }

    Ok(KnowledgeBase::new(mode, facts.into_iter().collect(), rules, constraints))
}
