//! Textual specification language.
//!
//! ```text
//! system := defn+
//! defn   := IDENT "=" expr
//! expr   := "Epsilon" | "Atom" | "Atom" "(" IDENT ")" | IDENT
//!         | ("Union" | "Prod") "(" expr ("," expr)+ ")"
//!         | ("Seq" | "MSet" | "PSet" | "Cycle") "(" expr ("," restr)? ")"
//! restr  := "card" ("=" | "<=" | ">=") INT | INT "<=" "card" "<=" INT
//! ```
//!
//! `#` starts a comment running to the end of the line. The root class is the
//! first definition unless the caller names another one.

use std::fmt;

use crate::analyzer::check_well_founded;
use crate::error::Error;
use crate::grammar::{build_system, CollectionKind, Expr, Mode, Restriction, SpecSystem, DEFAULT_ATOM_LABEL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceDiagnostic {
    /// 1-based.
    pub line: usize,
    /// 1-based, counted in characters.
    pub column: usize,
    pub message: String,
    pub severity: Severity,
}

impl SourceDiagnostic {
    fn error(pos: Pos, message: impl Into<String>) -> Self {
        SourceDiagnostic {
            line: pos.line,
            column: pos.column,
            message: message.into(),
            severity: Severity::Error,
        }
    }
}

impl fmt::Display for SourceDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{level} at {}:{}: {}", self.line, self.column, self.message)
    }
}

/// A successfully parsed system and the warnings found along the way.
#[derive(Debug, Clone)]
pub struct Parsed {
    pub system: SpecSystem,
    pub warnings: Vec<SourceDiagnostic>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pos {
    line: usize,
    column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(usize),
    LParen,
    RParen,
    Comma,
    Eq,
    Le,
    Ge,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Int(n) => write!(f, "'{n}'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::Comma => f.write_str("','"),
            Tok::Eq => f.write_str("'='"),
            Tok::Le => f.write_str("'<='"),
            Tok::Ge => f.write_str("'>='"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, SourceDiagnostic> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let mut pos = Pos { line: 1, column: 1 };
    let advance = |pos: &mut Pos, c: char| {
        if c == '\n' {
            pos.line += 1;
            pos.column = 1;
        } else {
            pos.column += 1;
        }
    };
    while let Some(&c) = chars.peek() {
        let start = pos;
        if c == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
                advance(&mut pos, c);
            }
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            advance(&mut pos, c);
            continue;
        }
        if c.is_ascii_alphabetic() {
            let mut ident = String::new();
            while let Some(&c) = chars.peek() {
                if !(c.is_ascii_alphanumeric() || c == '_') {
                    break;
                }
                ident.push(c);
                chars.next();
                advance(&mut pos, c);
            }
            out.push((Tok::Ident(ident), start));
            continue;
        }
        if c.is_ascii_digit() {
            let mut digits = String::new();
            while let Some(&c) = chars.peek() {
                if !c.is_ascii_digit() {
                    break;
                }
                digits.push(c);
                chars.next();
                advance(&mut pos, c);
            }
            let n = digits
                .parse()
                .map_err(|_| SourceDiagnostic::error(start, format!("integer {digits} is too large")))?;
            out.push((Tok::Int(n), start));
            continue;
        }
        chars.next();
        advance(&mut pos, c);
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '=' => Tok::Eq,
            '<' | '>' => {
                if chars.peek() == Some(&'=') {
                    chars.next();
                    advance(&mut pos, '=');
                    if c == '<' {
                        Tok::Le
                    } else {
                        Tok::Ge
                    }
                } else {
                    return Err(SourceDiagnostic::error(start, format!("expected '{c}='")));
                }
            }
            other => {
                return Err(SourceDiagnostic::error(
                    start,
                    format!("unexpected character '{other}'"),
                ))
            }
        };
        out.push((tok, start));
    }
    out.push((Tok::Eof, pos));
    Ok(out)
}

const CONSTRUCTORS: [&str; 8] = ["Epsilon", "Atom", "Union", "Prod", "Seq", "MSet", "PSet", "Cycle"];

fn is_reserved(word: &str) -> bool {
    CONSTRUCTORS.contains(&word) || word == "card"
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

type PResult<T> = Result<T, SourceDiagnostic>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, context: &str) -> PResult<Pos> {
        let (tok, pos) = self.bump();
        if tok == want {
            Ok(pos)
        } else {
            Err(SourceDiagnostic::error(
                pos,
                format!("expected {want} {context}, found {tok}"),
            ))
        }
    }

    fn ident(&mut self, context: &str) -> PResult<(String, Pos)> {
        match self.bump() {
            (Tok::Ident(s), pos) => Ok((s, pos)),
            (tok, pos) => Err(SourceDiagnostic::error(
                pos,
                format!("expected identifier {context}, found {tok}"),
            )),
        }
    }

    fn int(&mut self) -> PResult<usize> {
        match self.bump() {
            (Tok::Int(n), _) => Ok(n),
            (tok, pos) => Err(SourceDiagnostic::error(pos, format!("expected integer, found {tok}"))),
        }
    }

    fn system(&mut self) -> PResult<Vec<(String, Expr, Pos)>> {
        let mut defs = Vec::new();
        while *self.peek() != Tok::Eof {
            let (name, pos) = self.ident("at start of definition")?;
            if is_reserved(&name) {
                return Err(SourceDiagnostic::error(
                    pos,
                    format!("'{name}' is reserved and cannot name a class"),
                ));
            }
            self.expect(Tok::Eq, &format!("after class name {name}"))?;
            let expr = self.expr()?;
            defs.push((name, expr, pos));
        }
        if defs.is_empty() {
            return Err(SourceDiagnostic::error(self.pos(), "specification has no definitions"));
        }
        Ok(defs)
    }

    fn expr(&mut self) -> PResult<Expr> {
        let (word, pos) = self.ident("at start of expression")?;
        let has_args = *self.peek() == Tok::LParen;
        match word.as_str() {
            "Epsilon" => Ok(Expr::Epsilon),
            "Atom" => {
                if has_args {
                    self.bump();
                    let (label, _) = self.ident("as atom label")?;
                    self.expect(Tok::RParen, "after atom label")?;
                    Ok(Expr::Atom(label))
                } else {
                    Ok(Expr::Atom(DEFAULT_ATOM_LABEL.to_string()))
                }
            }
            "Union" | "Prod" => {
                self.expect(Tok::LParen, &format!("after {word}"))?;
                let mut items = vec![self.expr()?];
                loop {
                    match self.bump() {
                        (Tok::Comma, _) => items.push(self.expr()?),
                        (Tok::RParen, close) => {
                            if items.len() < 2 {
                                return Err(SourceDiagnostic::error(
                                    close,
                                    format!("{word} needs at least 2 arguments"),
                                ));
                            }
                            break;
                        }
                        (tok, p) => {
                            return Err(SourceDiagnostic::error(
                                p,
                                format!("expected ',' or ')' in {word}, found {tok}"),
                            ))
                        }
                    }
                }
                Ok(if word == "Union" {
                    Expr::Union(items)
                } else {
                    Expr::Prod(items)
                })
            }
            "Seq" | "MSet" | "PSet" | "Cycle" => {
                let kind = match word.as_str() {
                    "Seq" => CollectionKind::Seq,
                    "MSet" => CollectionKind::MSet,
                    "PSet" => CollectionKind::PSet,
                    _ => CollectionKind::Cycle,
                };
                self.expect(Tok::LParen, &format!("after {word}"))?;
                let arg = self.expr()?;
                let restr = match self.bump() {
                    (Tok::RParen, _) => Restriction::UNRESTRICTED,
                    (Tok::Comma, rpos) => {
                        let r = self.restriction()?;
                        if !r.is_valid() {
                            return Err(SourceDiagnostic::error(
                                rpos,
                                format!(
                                    "restriction error: min card {} exceeds max card {}",
                                    r.min_card,
                                    r.max_card.unwrap_or(0)
                                ),
                            ));
                        }
                        match self.bump() {
                            (Tok::RParen, _) => r,
                            (Tok::Comma, p) => {
                                return Err(SourceDiagnostic::error(
                                    p,
                                    format!("{word} takes one argument and an optional restriction"),
                                ))
                            }
                            (tok, p) => {
                                return Err(SourceDiagnostic::error(
                                    p,
                                    format!("expected ')' after restriction, found {tok}"),
                                ))
                            }
                        }
                    }
                    (tok, p) => {
                        return Err(SourceDiagnostic::error(
                            p,
                            format!("expected ',' or ')' in {word}, found {tok}"),
                        ))
                    }
                };
                Ok(Expr::collection(kind, arg, restr))
            }
            "card" => Err(SourceDiagnostic::error(pos, "'card' may only appear in a restriction")),
            _ if has_args => Err(SourceDiagnostic::error(pos, format!("unknown constructor {word}"))),
            _ => Ok(Expr::ClassRef(word)),
        }
    }

    fn restriction(&mut self) -> PResult<Restriction> {
        match self.bump() {
            (Tok::Ident(w), _) if w == "card" => {
                let (op, p) = self.bump();
                let n = self.int()?;
                match op {
                    Tok::Eq => Ok(Restriction::exactly(n)),
                    Tok::Le => Ok(Restriction::at_most(n)),
                    Tok::Ge => Ok(Restriction::at_least(n)),
                    tok => Err(SourceDiagnostic::error(
                        p,
                        format!("expected '=', '<=' or '>=' after card, found {tok}"),
                    )),
                }
            }
            (Tok::Int(lo), _) => {
                self.expect(Tok::Le, "in restriction")?;
                match self.bump() {
                    (Tok::Ident(w), _) if w == "card" => {}
                    (tok, p) => {
                        return Err(SourceDiagnostic::error(p, format!("expected 'card', found {tok}")))
                    }
                }
                self.expect(Tok::Le, "in restriction")?;
                let hi = self.int()?;
                Ok(Restriction::between(lo, hi))
            }
            (tok, p) => Err(SourceDiagnostic::error(
                p,
                format!("expected restriction ('card ...' or 'a <= card <= b'), found {tok}"),
            )),
        }
    }
}

/// Parses and validates a specification.
///
/// `root` overrides the default root (the first definition). Unreachable
/// classes are reported as warnings; well-foundedness is left to the analyzer.
pub fn parse_system(text: &str, root: Option<&str>, mode: Mode) -> Result<Parsed, Vec<SourceDiagnostic>> {
    let toks = lex(text).map_err(|d| vec![d])?;
    let mut parser = Parser { toks, at: 0 };
    let defs = parser.system().map_err(|d| vec![d])?;

    let first = defs[0].2;
    let root_name = root.unwrap_or(&defs[0].0).to_string();
    let positions: Vec<(String, Pos)> = defs.iter().map(|(n, _, p)| (n.clone(), *p)).collect();
    let pairs = defs.into_iter().map(|(n, e, _)| (n, e)).collect();
    let system = build_system(pairs, &root_name, mode).map_err(|err| match err {
        Error::Validation(issues) => {
            let mut seen = std::collections::HashMap::new();
            issues
                .into_iter()
                .map(|issue| {
                    // Duplicates point at the second definition.
                    let nth = if issue.message.starts_with("duplicate") {
                        *seen.entry(issue.class.clone()).or_insert(0) + 1
                    } else {
                        0
                    };
                    let pos = positions
                        .iter()
                        .filter(|(n, _)| *n == issue.class)
                        .nth(nth)
                        .map(|(_, p)| *p)
                        .unwrap_or(first);
                    SourceDiagnostic::error(pos, format!("class {}: {}", issue.class, issue.message))
                })
                .collect()
        }
        other => vec![SourceDiagnostic::error(first, other.to_string())],
    })?;

    let warnings = check_well_founded(&system)
        .warnings()
        .map(|d| {
            let pos = positions
                .iter()
                .find(|(n, _)| *n == d.class)
                .map(|(_, p)| *p)
                .unwrap_or(first);
            SourceDiagnostic {
                line: pos.line,
                column: pos.column,
                message: format!("class {}: {}", d.class, d.message),
                severity: Severity::Warning,
            }
        })
        .collect();
    Ok(Parsed { system, warnings })
}

fn render_restriction(r: &Restriction) -> Option<String> {
    match (r.min_card, r.max_card) {
        (0, None) => None,
        (lo, None) => Some(format!("card >= {lo}")),
        (0, Some(hi)) => Some(format!("card <= {hi}")),
        (lo, Some(hi)) if lo == hi => Some(format!("card = {lo}")),
        (lo, Some(hi)) => Some(format!("{lo} <= card <= {hi}")),
    }
}

/// Canonical text of an expression.
pub fn render_expr(expr: &Expr) -> String {
    match expr {
        Expr::Epsilon => "Epsilon".to_string(),
        Expr::Atom(label) if label == DEFAULT_ATOM_LABEL => "Atom".to_string(),
        Expr::Atom(label) => format!("Atom({label})"),
        Expr::ClassRef(name) => name.clone(),
        Expr::Union(items) | Expr::Prod(items) => {
            let kw = if matches!(expr, Expr::Union(_)) { "Union" } else { "Prod" };
            let inner: Vec<String> = items.iter().map(render_expr).collect();
            format!("{kw}({})", inner.join(", "))
        }
        _ => {
            let (kind, arg, restr) = expr.as_collection().expect("collection");
            match render_restriction(&restr) {
                Some(r) => format!("{}({}, {r})", kind.keyword(), render_expr(arg)),
                None => format!("{}({})", kind.keyword(), render_expr(arg)),
            }
        }
    }
}

/// One definition per line, in definition order.
///
/// Root and mode are not part of the text: re-parse with the same root and
/// mode to get an equal system back.
pub fn render_system(sys: &SpecSystem) -> String {
    let mut out = String::new();
    for (name, expr) in sys.defs() {
        out.push_str(name);
        out.push_str(" = ");
        out.push_str(&render_expr(expr));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Parsed, Vec<SourceDiagnostic>> {
        parse_system(text, None, Mode::Unlabeled)
    }

    #[test]
    fn trees_grammar() {
        let p = parse("T = Prod(Atom, Seq(T))").unwrap();
        let expected = build_system(
            vec![(
                "T".into(),
                Expr::Prod(vec![Expr::atom(), Expr::seq(Expr::class("T"))]),
            )],
            "T",
            Mode::Unlabeled,
        )
        .unwrap();
        assert_eq!(p.system, expected);
        assert!(p.warnings.is_empty());
    }

    #[test]
    fn binary_trees_grammar() {
        let p = parse("B = Union(Atom, Prod(Atom, B, B))").unwrap();
        assert_eq!(p.system.root(), "B");
        assert_eq!(
            p.system.get("B"),
            Some(&Expr::Union(vec![
                Expr::atom(),
                Expr::Prod(vec![Expr::atom(), Expr::class("B"), Expr::class("B")])
            ]))
        );
    }

    #[test]
    fn missing_comma_is_positioned() {
        let errs = parse("T = Prod(Atom Seq(T))").unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!((errs[0].line, errs[0].column), (1, 15));
        assert_eq!(errs[0].severity, Severity::Error);
        assert!(errs[0].message.contains("expected ',' or ')'"), "{}", errs[0].message);
    }

    #[test]
    fn restrictions_and_comments() {
        let p = parse(
            "# partitions\nP = MSet(I, card >= 1)  # parts\nI = Seq(Atom, 1 <= card <= 4)\nJ = PSet(I, card = 2)\nK = Cycle(Atom(a), card <= 3)",
        )
        .unwrap();
        let sys = p.system;
        assert_eq!(sys.get("P"), Some(&Expr::MSet(Box::new(Expr::class("I")), Restriction::at_least(1))));
        assert_eq!(sys.get("I"), Some(&Expr::Seq(Box::new(Expr::atom()), Restriction::between(1, 4))));
        assert_eq!(sys.get("J"), Some(&Expr::PSet(Box::new(Expr::class("I")), Restriction::exactly(2))));
        assert_eq!(
            sys.get("K"),
            Some(&Expr::Cycle(Box::new(Expr::labeled_atom("a")), Restriction::at_most(3)))
        );
        // J and K are unused.
        assert_eq!(p.warnings.len(), 2);
        assert!(p.warnings.iter().all(|w| w.severity == Severity::Warning));
        assert_eq!(p.warnings[0].line, 4);
    }

    #[test]
    fn errors() {
        let e = parse("T = Foo(Atom)").unwrap_err();
        assert!(e[0].message.contains("unknown constructor Foo"));
        assert_eq!(e[0].column, 5);

        let e = parse("T = Union(Atom)").unwrap_err();
        assert!(e[0].message.contains("at least 2"));

        let e = parse("T = Seq(Atom, 3 <= card <= 1)").unwrap_err();
        assert!(e[0].message.contains("restriction error"));

        let e = parse("T = Atom\nT = Epsilon").unwrap_err();
        assert_eq!(e[0].line, 2);
        assert!(e[0].message.contains("duplicate"));

        let e = parse("T = Prod(Atom, U)").unwrap_err();
        assert!(e[0].message.contains("unresolved class U"));

        let e = parse("").unwrap_err();
        assert!(e[0].message.contains("no definitions"));

        let e = parse("T = Seq(Atom, card < 3)").unwrap_err();
        assert_eq!(e[0].column, 20);

        let e = parse("Seq = Atom").unwrap_err();
        assert!(e[0].message.contains("reserved"));
    }

    #[test]
    fn root_override() {
        let p = parse_system("A = Atom\nB = Seq(A)", Some("B"), Mode::Unlabeled).unwrap();
        assert_eq!(p.system.root(), "B");
        assert!(parse_system("A = Atom", Some("C"), Mode::Unlabeled).is_err());
    }

    #[test]
    fn render_examples() {
        let p = parse("T = Prod(Atom,Seq( T ))").unwrap();
        assert_eq!(render_system(&p.system), "T = Prod(Atom, Seq(T))\n");
        let p = parse("P = MSet(I, card>=1)\nI = Seq(Atom(x), 2<=card<=5)").unwrap();
        assert_eq!(
            render_system(&p.system),
            "P = MSet(I, card >= 1)\nI = Seq(Atom(x), 2 <= card <= 5)\n"
        );
    }
}
