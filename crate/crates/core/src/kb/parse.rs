//! Line-oriented recursive-descent parser for KB files.

use num_traits::{One, Zero};
use thiserror::Error;

use super::rational::{parse_rational, Rational};
use super::{
    DefaultRule, Document, Formula, GroundLiteral, KnowledgeBase, StatStatement, VacuousReference,
};

const RESERVED: &[&str] = &["not", "and", "or", "in", "true", "false"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("undeclared predicate `{0}`")]
    UndeclaredPredicate(String),
    #[error("undeclared constant `{0}`")]
    UndeclaredConstant(String),
    #[error("`{0}` is already declared")]
    Duplicate(String),
    #[error("`{0}` is a reserved word")]
    Reserved(String),
    #[error("malformed interval [{0}, {1}]: need 0 <= lower <= upper <= 1")]
    MalformedInterval(String, String),
    #[error("{0} must lie in {1}")]
    OutOfRange(&'static str, &'static str),
    #[error("domain size must be at least 1")]
    DomainTooSmall,
    #[error("domain size declared twice")]
    DuplicateDomain,
    #[error("missing `domain` declaration")]
    MissingDomain,
    #[error("unknown config key `{0}`")]
    UnknownConfig(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Slash,
    Bar,
    Bang,
    Amp,
    OrOp,
    Arrow,
    DoubleArrow,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::Number(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Amp => "`&`".into(),
            Tok::OrOp => "`||`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::DoubleArrow => "`<->`".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    column: usize,
}

fn lex(line_no: usize, text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            ':' => Some(Tok::Colon),
            '/' => Some(Tok::Slash),
            '!' | '~' => Some(Tok::Bang),
            '&' => Some(Tok::Amp),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Spanned { tok, column });
            i += 1;
            continue;
        }
        let rest: String = chars[i..].iter().take(3).collect();
        if rest.starts_with("<->") {
            out.push(Spanned {
                tok: Tok::DoubleArrow,
                column,
            });
            i += 3;
        } else if rest.starts_with("->") {
            out.push(Spanned {
                tok: Tok::Arrow,
                column,
            });
            i += 2;
        } else if rest.starts_with("||") {
            out.push(Spanned {
                tok: Tok::OrOp,
                column,
            });
            i += 2;
        } else if c == '|' {
            out.push(Spanned {
                tok: Tok::Bar,
                column,
            });
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.' || chars[i] == '/')
            {
                i += 1;
            }
            out.push(Spanned {
                tok: Tok::Number(chars[start..i].iter().collect()),
                column,
            });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len()
                && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
            {
                i += 1;
            }
            out.push(Spanned {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                column,
            });
        } else {
            return Err(ParseError {
                line: line_no,
                column,
                kind: ParseErrorKind::Syntax(format!("unexpected character `{c}`")),
            });
        }
    }
    Ok(out)
}

struct LineParser<'a> {
    line: usize,
    toks: Vec<Spanned>,
    pos: usize,
    end_column: usize,
    kb: &'a KnowledgeBase,
}

impl<'a> LineParser<'a> {
    fn err(&self, column: usize, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: self.line,
            column,
            kind,
        }
    }

    fn column(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|t| t.column)
            .unwrap_or(self.end_column)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        let found = self
            .peek()
            .map(Tok::describe)
            .unwrap_or_else(|| "end of line".into());
        self.err(
            self.column(),
            ParseErrorKind::Syntax(format!("expected {wanted}, found {found}")),
        )
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        if self.pos < self.toks.len() {
            Err(self.unexpected("end of line"))
        } else {
            Ok(())
        }
    }

    fn is_keyword(&self, word: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == word)
    }

    fn ident(&mut self, wanted: &str) -> Result<(String, usize), ParseError> {
        let column = self.column();
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok((s, column))
            }
            _ => Err(self.unexpected(wanted)),
        }
    }

    fn number(&mut self, wanted: &str) -> Result<(Rational, String, usize), ParseError> {
        let column = self.column();
        match self.peek() {
            Some(Tok::Number(s)) => {
                let s = s.clone();
                self.pos += 1;
                match parse_rational(&s) {
                    Some(r) => Ok((r, s, column)),
                    None => Err(self.err(
                        column,
                        ParseErrorKind::Syntax(format!("malformed number `{s}`")),
                    )),
                }
            }
            _ => Err(self.unexpected(wanted)),
        }
    }

    // iff := implies ('<->' implies)*
    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.implication()?;
        while self.peek() == Some(&Tok::DoubleArrow) {
            self.pos += 1;
            let rhs = self.implication()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    // implies := or ('->' implies)?
    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while self.peek() == Some(&Tok::OrOp) || self.is_keyword("or") {
            self.pos += 1;
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::Amp) || self.is_keyword("and") {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if self.peek() == Some(&Tok::Bang) || self.is_keyword("not") {
            self.pos += 1;
            return Ok(Formula::not(self.unary()?));
        }
        if self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            let inner = self.formula()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(inner);
        }
        if self.is_keyword("true") {
            self.pos += 1;
            return Ok(Formula::True);
        }
        if self.is_keyword("false") {
            self.pos += 1;
            return Ok(Formula::False);
        }
        let column = self.column();
        match self.peek() {
            Some(Tok::Ident(name)) if !RESERVED.contains(&name.as_str()) => {
                let name = name.clone();
                self.pos += 1;
                self.kb
                    .predicate(&name)
                    .map(Formula::Atom)
                    .ok_or_else(|| self.err(column, ParseErrorKind::UndeclaredPredicate(name)))
            }
            _ => Err(self.unexpected("a formula")),
        }
    }

    fn literal(&mut self) -> Result<GroundLiteral, ParseError> {
        let mut positive = true;
        while self.peek() == Some(&Tok::Bang) || self.is_keyword("not") {
            self.pos += 1;
            positive = !positive;
        }
        let (pred, pcol) = self.ident("a predicate")?;
        let predicate = self
            .kb
            .predicate(&pred)
            .ok_or_else(|| self.err(pcol, ParseErrorKind::UndeclaredPredicate(pred)))?;
        self.expect(Tok::LParen, "`(`")?;
        let (name, ccol) = self.ident("a constant")?;
        let constant = self
            .kb
            .constant(&name)
            .ok_or_else(|| self.err(ccol, ParseErrorKind::UndeclaredConstant(name)))?;
        self.expect(Tok::RParen, "`)`")?;
        Ok(GroundLiteral {
            positive,
            predicate,
            constant,
        })
    }
}

fn declare(
    table: &mut Vec<String>,
    other: &[String],
    name: String,
    line: usize,
    column: usize,
) -> Result<(), ParseError> {
    let err = |kind| ParseError { line, column, kind };
    if RESERVED.contains(&name.as_str()) {
        return Err(err(ParseErrorKind::Reserved(name)));
    }
    if table.contains(&name) || other.contains(&name) {
        return Err(err(ParseErrorKind::Duplicate(name)));
    }
    table.push(name);
    Ok(())
}

/// Parses one formula over the vocabulary of `kb`.
pub fn parse_formula(kb: &KnowledgeBase, text: &str) -> Result<Formula, ParseError> {
    let toks = lex(1, text)?;
    let mut p = LineParser {
        line: 1,
        toks,
        pos: 0,
        end_column: text.trim_end().chars().count() + 1,
        kb,
    };
    let f = p.formula()?;
    p.expect_end()?;
    Ok(f)
}

/// Parses a KB file into its knowledge base, evidence, declared rules and thresholds.
pub fn parse_kb(text: &str) -> Result<Document, ParseError> {
    let mut kb = KnowledgeBase::new(0);
    let mut domain: Option<usize> = None;
    let mut doc_evidence = Vec::new();
    let mut rules = Vec::new();
    let mut config = super::ThresholdConfig::default();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let content = raw.split('#').next().unwrap_or("");
        let toks = lex(line_no, content)?;
        if toks.is_empty() {
            continue;
        }
        let mut p = LineParser {
            line: line_no,
            toks,
            pos: 0,
            end_column: content.trim_end().chars().count() + 1,
            kb: &kb,
        };
        let (keyword, kcol) = p.ident("a declaration keyword")?;
        match keyword.as_str() {
            "domain" => {
                let (value, text, col) = p.number("a domain size")?;
                p.expect_end()?;
                if !value.is_integer() || text.contains('.') || text.contains('/') {
                    return Err(p.err(
                        col,
                        ParseErrorKind::Syntax(format!("domain size `{text}` is not an integer")),
                    ));
                }
                if domain.is_some() {
                    return Err(p.err(kcol, ParseErrorKind::DuplicateDomain));
                }
                let n: usize = text.parse().map_err(|_| {
                    p.err(col, ParseErrorKind::Syntax(format!("domain size `{text}` too large")))
                })?;
                if n < 1 {
                    return Err(p.err(col, ParseErrorKind::DomainTooSmall));
                }
                domain = Some(n);
            }
            "pred" | "const" => {
                let mut names = Vec::new();
                while p.pos < p.toks.len() {
                    names.push(p.ident("an identifier")?);
                }
                if names.is_empty() {
                    return Err(p.unexpected("an identifier"));
                }
                drop(p);
                for (name, col) in names {
                    if keyword == "pred" {
                        declare(&mut kb.predicates, &kb.constants, name, line_no, col)?;
                    } else {
                        declare(&mut kb.constants, &kb.predicates, name, line_no, col)?;
                    }
                }
            }
            "axiom" => {
                let f = p.formula()?;
                p.expect_end()?;
                drop(p);
                kb.axioms.push(f);
            }
            "stat" => {
                let target = p.formula()?;
                p.expect(Tok::Bar, "`|`")?;
                let reference = p.formula()?;
                if !p.is_keyword("in") {
                    return Err(p.unexpected("`in`"));
                }
                p.pos += 1;
                p.expect(Tok::LBracket, "`[`")?;
                let (lower, ltext, lcol) = p.number("a lower bound")?;
                p.expect(Tok::Comma, "`,`")?;
                let (upper, utext, _) = p.number("an upper bound")?;
                p.expect(Tok::RBracket, "`]`")?;
                p.expect_end()?;
                let stat = StatStatement::new(target, reference, lower, upper);
                if !stat.interval_is_valid() {
                    return Err(p.err(lcol, ParseErrorKind::MalformedInterval(ltext, utext)));
                }
                drop(p);
                kb.stats.push(stat);
            }
            "fact" => {
                loop {
                    doc_evidence.push(p.literal()?);
                    if p.peek() == Some(&Tok::Comma) {
                        p.pos += 1;
                    } else {
                        break;
                    }
                }
                p.expect_end()?;
            }
            "default" => {
                let prerequisite = p.formula()?;
                p.expect(Tok::Colon, "`:`")?;
                let mut justifications = vec![p.formula()?];
                while p.peek() == Some(&Tok::Comma) {
                    p.pos += 1;
                    justifications.push(p.formula()?);
                }
                p.expect(Tok::Slash, "`/`")?;
                let consequent = p.formula()?;
                p.expect_end()?;
                rules.push(DefaultRule::declared(prerequisite, justifications, consequent));
            }
            "config" => {
                let (key, key_col) = p.ident("a config key")?;
                match key.as_str() {
                    "delta" => {
                        let (v, _, col) = p.number("a rational")?;
                        p.expect_end()?;
                        if v <= Rational::zero() || v >= Rational::one() {
                            return Err(p.err(col, ParseErrorKind::OutOfRange("delta", "(0, 1)")));
                        }
                        config.delta = Some(v);
                    }
                    "epsilon_star" => {
                        let (v, _, col) = p.number("a rational")?;
                        p.expect_end()?;
                        if v <= Rational::zero() || v > Rational::one() {
                            return Err(p.err(
                                col,
                                ParseErrorKind::OutOfRange("epsilon_star", "(0, 1]"),
                            ));
                        }
                        config.epsilon_star = Some(v);
                    }
                    "vacuous" => {
                        let (v, col) = p.ident("`satisfied` or `violated`")?;
                        p.expect_end()?;
                        let policy = match v.as_str() {
                            "satisfied" => VacuousReference::Satisfied,
                            "violated" => VacuousReference::Violated,
                            _ => {
                                return Err(p.err(
                                    col,
                                    ParseErrorKind::Syntax(format!(
                                        "expected `satisfied` or `violated`, found `{v}`"
                                    )),
                                ))
                            }
                        };
                        drop(p);
                        kb.vacuous = policy;
                    }
                    _ => return Err(p.err(key_col, ParseErrorKind::UnknownConfig(key))),
                }
            }
            other => {
                return Err(p.err(
                    kcol,
                    ParseErrorKind::Syntax(format!("unknown declaration `{other}`")),
                ))
            }
        }
    }

    kb.domain_size = domain.ok_or(ParseError {
        line: last_line.max(1),
        column: 1,
        kind: ParseErrorKind::MissingDomain,
    })?;
    Ok(Document {
        kb,
        evidence: doc_evidence,
        rules,
        config,
    })
}
