//! The `.tas` text format: a lexer, a recursive-descent parser and a
//! canonical renderer. `parse_spec(&render_spec(s, ps))` reproduces `s` and
//! `ps` exactly for any parser output.
//!
//! ```text
//! schema { relation ITEMS { id; price: VAL; } }
//! variables { item: ITEMS; status: VAL; }
//! init: status == "Init" && item == null;
//! service Pick {
//!   pre: status == "Init";
//!   propagate: ;
//!   post: exists p: VAL . ITEMS(item, p) && status == "Picked";
//! }
//! property Done: G ((status == "Picked") -> F service(Pick));
//! ```

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::buchi::Ltl;
use crate::model::{
    AttrKind, Attribute, Condition, DatabaseSchema, LtlFo, Prop, RelAtom, Relation, Service, TasSpec, Term, TypedVar,
    VarType,
};

const RESERVED: &[&str] = &[
    "schema",
    "relation",
    "id",
    "VAL",
    "variables",
    "init",
    "service",
    "pre",
    "propagate",
    "post",
    "property",
    "forall",
    "exists",
    "true",
    "false",
    "null",
    "G",
    "F",
    "X",
    "U",
    "V",
];

pub fn is_reserved(word: &str) -> bool {
    RESERVED.contains(&word)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SourceSpan {
    pub file: String,
    /// 1-based.
    pub line: usize,
    /// 1-based, in characters.
    pub column: usize,
    pub length: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ParseErrorCode {
    EmptySpec,
    InvalidCharacter,
    UnterminatedString,
    UnexpectedToken,
    UnexpectedEof,
    ReservedWord,
}

impl fmt::Display for ParseErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("{}:{}:{}: {code}: {message}", span.file, span.line, span.column)]
pub struct ParseError {
    pub span: SourceSpan,
    pub code: ParseErrorCode,
    pub message: String,
    pub expected: Vec<String>,
}

/// A parsed file: one system and its properties.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecFile {
    pub spec: TasSpec,
    pub properties: Vec<LtlFo>,
}

impl SpecFile {
    pub fn property(&self, name: &str) -> Option<&LtlFo> {
        self.properties.iter().find(|p| p.name == name)
    }
}

// ---------------------------------------------------------------------------
// Lexer

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Str(String),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Str(s) => write!(f, "string {s:?}"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
    length: usize,
}

const SYMBOLS: &[&str] = &["==", "!=", "&&", "||", "->", "{", "}", "(", ")", ";", ":", ",", ".", "!"];

fn lex(text: &str, file: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let mut out = Vec::new();
    let err = |code, line, column, length, message: String| ParseError {
        span: SourceSpan { file: file.to_string(), line, column, length },
        code,
        message,
        expected: Vec::new(),
    };
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            out.push(Token { tok: Tok::Ident(word), line, column: col, length: i - start });
            col += i - start;
            continue;
        }
        if c == '"' {
            let start = i;
            let mut s = String::new();
            i += 1;
            loop {
                match chars.get(i) {
                    None | Some('\n') => {
                        return Err(err(
                            ParseErrorCode::UnterminatedString,
                            line,
                            col,
                            i - start,
                            "unterminated string literal".into(),
                        ))
                    }
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some('\\') if matches!(chars.get(i + 1), Some('"') | Some('\\')) => {
                        s.push(chars[i + 1]);
                        i += 2;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            out.push(Token { tok: Tok::Str(s), line, column: col, length: i - start });
            col += i - start;
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        if let Some(sym) = SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            out.push(Token { tok: Tok::Sym(sym), line, column: col, length: sym.len() });
            i += sym.len();
            col += sym.len();
            continue;
        }
        return Err(err(ParseErrorCode::InvalidCharacter, line, col, 1, format!("unexpected character {c:?}")));
    }
    out.push(Token { tok: Tok::Eof, line, column: col, length: 1 });
    Ok(out)
}

// ---------------------------------------------------------------------------
// Parser

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    file: &'a str,
}

type PResult<T> = Result<T, ParseError>;

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let t = &self.toks[self.pos];
        let (code, found) = match &t.tok {
            Tok::Eof => (ParseErrorCode::UnexpectedEof, t.tok.to_string()),
            other => (ParseErrorCode::UnexpectedToken, other.to_string()),
        };
        ParseError {
            span: SourceSpan { file: self.file.to_string(), line: t.line, column: t.column, length: t.length },
            code,
            message: format!("expected {}, found {found}", expected.join(" or ")),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == k)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        if self.is_kw(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.error(&[&format!("`{s}`")]))
        }
    }

    fn expect_kw(&mut self, k: &str) -> PResult<()> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            Err(self.error(&[&format!("`{k}`")]))
        }
    }

    fn name(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if is_reserved(&s) => {
                let mut e = self.error(&["identifier"]);
                e.code = ParseErrorCode::ReservedWord;
                e.message = format!("`{s}` is a reserved word");
                Err(e)
            }
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    fn var_type(&mut self) -> PResult<VarType> {
        if self.eat_kw("VAL") {
            Ok(VarType::Val)
        } else {
            Ok(VarType::Id(self.name()?))
        }
    }

    fn typed_vars(&mut self) -> PResult<Vec<TypedVar>> {
        let mut out = Vec::new();
        loop {
            let name = self.name()?;
            self.expect_sym(":")?;
            out.push(TypedVar::new(name, self.var_type()?));
            if !self.eat_sym(",") {
                return Ok(out);
            }
        }
    }

    fn file(&mut self) -> PResult<SpecFile> {
        self.expect_kw("schema")?;
        self.expect_sym("{")?;
        let mut relations = Vec::new();
        while self.eat_kw("relation") {
            relations.push(self.relation()?);
        }
        self.expect_sym("}")?;

        self.expect_kw("variables")?;
        self.expect_sym("{")?;
        let mut variables = Vec::new();
        while !self.is_sym("}") {
            let name = self.name()?;
            self.expect_sym(":")?;
            variables.push(TypedVar::new(name, self.var_type()?));
            self.expect_sym(";")?;
        }
        self.expect_sym("}")?;

        self.expect_kw("init")?;
        self.expect_sym(":")?;
        let init = self.cond()?;
        self.expect_sym(";")?;

        let mut services = Vec::new();
        while self.eat_kw("service") {
            services.push(self.service()?);
        }
        let mut properties = Vec::new();
        while self.eat_kw("property") {
            properties.push(self.property()?);
        }
        if *self.peek() != Tok::Eof {
            return Err(self.error(&["`service`", "`property`", "end of input"]));
        }
        Ok(SpecFile { spec: TasSpec { schema: DatabaseSchema { relations }, variables, init, services }, properties })
    }

    fn relation(&mut self) -> PResult<Relation> {
        let name = self.name()?;
        self.expect_sym("{")?;
        self.expect_kw("id")?;
        self.expect_sym(";")?;
        let mut attributes = Vec::new();
        while !self.is_sym("}") {
            let a = self.name()?;
            self.expect_sym(":")?;
            let kind = if self.eat_sym("->") {
                AttrKind::ForeignKey(self.name()?)
            } else {
                self.expect_kw("VAL")?;
                AttrKind::Val
            };
            self.expect_sym(";")?;
            attributes.push(Attribute { name: a, kind });
        }
        self.expect_sym("}")?;
        Ok(Relation { name, attributes })
    }

    fn service(&mut self) -> PResult<Service> {
        let name = self.name()?;
        self.expect_sym("{")?;
        self.expect_kw("pre")?;
        self.expect_sym(":")?;
        let pre = self.cond()?;
        self.expect_sym(";")?;
        self.expect_kw("propagate")?;
        self.expect_sym(":")?;
        let mut propagated = Vec::new();
        if !self.is_sym(";") {
            loop {
                propagated.push(self.name()?);
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        self.expect_sym(";")?;
        self.expect_kw("post")?;
        self.expect_sym(":")?;
        let post = self.cond()?;
        self.expect_sym(";")?;
        self.expect_sym("}")?;
        Ok(Service { name, pre, post, propagated })
    }

    fn property(&mut self) -> PResult<LtlFo> {
        let name = self.name()?;
        self.expect_sym(":")?;
        let globals = if self.eat_kw("forall") {
            let vs = self.typed_vars()?;
            self.expect_sym(".")?;
            vs
        } else {
            Vec::new()
        };
        let formula = collapse(self.ltl()?);
        self.expect_sym(";")?;
        Ok(LtlFo { name, globals, formula })
    }

    // Conditions: exists < -> < || < && < ! < atoms.

    fn cond(&mut self) -> PResult<Condition> {
        if self.eat_kw("exists") {
            let vs = self.typed_vars()?;
            self.expect_sym(".")?;
            return Ok(Condition::Exists(vs, Box::new(self.cond()?)));
        }
        let lhs = self.cond_or()?;
        if self.eat_sym("->") {
            let rhs = self.cond()?;
            return Ok(Condition::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn cond_or(&mut self) -> PResult<Condition> {
        let mut parts = vec![self.cond_and()?];
        while self.eat_sym("||") {
            parts.push(self.cond_and()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Condition::Or(parts) })
    }

    fn cond_and(&mut self) -> PResult<Condition> {
        let mut parts = vec![self.cond_unary()?];
        while self.eat_sym("&&") {
            parts.push(self.cond_unary()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Condition::And(parts) })
    }

    fn cond_unary(&mut self) -> PResult<Condition> {
        if self.eat_sym("!") {
            return Ok(Condition::not(self.cond_unary()?));
        }
        if self.is_kw("exists") {
            return self.cond();
        }
        if self.eat_sym("(") {
            let c = self.cond()?;
            self.expect_sym(")")?;
            return Ok(c);
        }
        self.cond_atom()
    }

    fn cond_atom(&mut self) -> PResult<Condition> {
        if self.eat_kw("true") {
            return Ok(Condition::True);
        }
        if self.eat_kw("false") {
            return Ok(Condition::False);
        }
        if let (Tok::Ident(name), Tok::Sym("(")) = (self.peek().clone(), self.peek_at(1).clone()) {
            if !is_reserved(&name) {
                self.bump();
                self.bump();
                let mut args = Vec::new();
                if !self.is_sym(")") {
                    loop {
                        args.push(self.term()?);
                        if !self.eat_sym(",") {
                            break;
                        }
                    }
                }
                self.expect_sym(")")?;
                return Ok(Condition::Rel(RelAtom { relation: name, args }));
            }
        }
        let a = self.term()?;
        let eq = if self.eat_sym("==") {
            true
        } else if self.eat_sym("!=") {
            false
        } else {
            return Err(self.error(&["`==`", "`!=`"]));
        };
        let b = self.term()?;
        Ok(if eq { Condition::Eq(a, b) } else { Condition::Neq(a, b) })
    }

    fn term(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Str(s) => {
                self.bump();
                Ok(Term::Str(s))
            }
            Tok::Ident(s) if s == "null" => {
                self.bump();
                Ok(Term::Null)
            }
            Tok::Ident(_) => Ok(Term::Var(self.name()?)),
            _ => Err(self.error(&["variable", "string", "`null`"])),
        }
    }

    // LTL: -> < || < && < U,V (right) < unary < primary.

    fn ltl(&mut self) -> PResult<Ltl<Prop>> {
        let lhs = self.ltl_or()?;
        if self.eat_sym("->") {
            return Ok(Ltl::implies(lhs, self.ltl()?));
        }
        Ok(lhs)
    }

    fn ltl_or(&mut self) -> PResult<Ltl<Prop>> {
        let mut acc = self.ltl_and()?;
        while self.eat_sym("||") {
            acc = Ltl::or(acc, self.ltl_and()?);
        }
        Ok(acc)
    }

    fn ltl_and(&mut self) -> PResult<Ltl<Prop>> {
        let mut acc = self.ltl_until()?;
        while self.eat_sym("&&") {
            acc = Ltl::and(acc, self.ltl_until()?);
        }
        Ok(acc)
    }

    fn ltl_until(&mut self) -> PResult<Ltl<Prop>> {
        let lhs = self.ltl_unary()?;
        if self.eat_kw("U") {
            return Ok(Ltl::until(lhs, self.ltl_until()?));
        }
        if self.eat_kw("V") {
            return Ok(Ltl::release(lhs, self.ltl_until()?));
        }
        Ok(lhs)
    }

    fn ltl_unary(&mut self) -> PResult<Ltl<Prop>> {
        if self.eat_sym("!") {
            return Ok(Ltl::not(self.ltl_unary()?));
        }
        for (kw, mk) in [("G", Ltl::globally as fn(Ltl<Prop>) -> Ltl<Prop>), ("F", Ltl::finally), ("X", Ltl::next)] {
            if self.eat_kw(kw) {
                return Ok(mk(self.ltl_unary()?));
            }
        }
        self.ltl_primary()
    }

    fn ltl_primary(&mut self) -> PResult<Ltl<Prop>> {
        if self.eat_kw("true") {
            return Ok(Ltl::True);
        }
        if self.eat_kw("false") {
            return Ok(Ltl::False);
        }
        if self.eat_kw("service") {
            self.expect_sym("(")?;
            let s = self.name()?;
            self.expect_sym(")")?;
            return Ok(Ltl::Atom(Prop::Service(s)));
        }
        if self.is_sym("(") {
            let save = self.pos;
            self.bump();
            if let Ok(c) = self.cond() {
                if self.eat_sym(")") {
                    return Ok(Ltl::Atom(Prop::Cond(c)));
                }
            }
            self.pos = save + 1;
            let f = self.ltl()?;
            self.expect_sym(")")?;
            return Ok(f);
        }
        Ok(Ltl::Atom(Prop::Cond(self.cond_atom()?)))
    }
}

/// Whether `f` is a Boolean combination of condition atoms and constants
/// that mentions at least one condition.
fn is_pure(f: &Ltl<Prop>) -> (bool, bool) {
    match f {
        Ltl::True | Ltl::False => (true, false),
        Ltl::Atom(Prop::Cond(_)) => (true, true),
        Ltl::Atom(Prop::Service(_)) => (false, false),
        Ltl::Not(x) => is_pure(x),
        Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::Implies(a, b) => {
            let (pa, ca) = is_pure(a);
            let (pb, cb) = is_pure(b);
            (pa && pb, ca || cb)
        }
        _ => (false, false),
    }
}

fn to_condition(f: &Ltl<Prop>) -> Condition {
    match f {
        Ltl::True => Condition::True,
        Ltl::False => Condition::False,
        Ltl::Atom(Prop::Cond(c)) => c.clone(),
        Ltl::Not(x) => Condition::not(to_condition(x)),
        Ltl::And(a, b) => Condition::And(vec![to_condition(a), to_condition(b)]),
        Ltl::Or(a, b) => Condition::Or(vec![to_condition(a), to_condition(b)]),
        Ltl::Implies(a, b) => Condition::implies(to_condition(a), to_condition(b)),
        _ => unreachable!("checked by is_pure"),
    }
}

/// Canonical form of a property formula: every maximal propositional
/// subtree over condition atoms becomes a single condition atom. Parsing
/// always yields canonical formulas.
pub fn collapse(f: Ltl<Prop>) -> Ltl<Prop> {
    if let (true, true) = is_pure(&f) {
        return match f {
            Ltl::Atom(_) => f,
            _ => Ltl::Atom(Prop::Cond(to_condition(&f))),
        };
    }
    let b = |x: Box<Ltl<Prop>>| Box::new(collapse(*x));
    match f {
        Ltl::Not(x) => Ltl::Not(b(x)),
        Ltl::Next(x) => Ltl::Next(b(x)),
        Ltl::Globally(x) => Ltl::Globally(b(x)),
        Ltl::Finally(x) => Ltl::Finally(b(x)),
        Ltl::And(x, y) => Ltl::And(b(x), b(y)),
        Ltl::Or(x, y) => Ltl::Or(b(x), b(y)),
        Ltl::Implies(x, y) => Ltl::Implies(b(x), b(y)),
        Ltl::Until(x, y) => Ltl::Until(b(x), b(y)),
        Ltl::Release(x, y) => Ltl::Release(b(x), b(y)),
        other => other,
    }
}

/// Parses a whole `.tas` file.
pub fn parse_spec(text: &str) -> Result<SpecFile, ParseError> {
    parse_spec_named(text, "<input>")
}

/// As [`parse_spec`], with `file` recorded in error spans.
pub fn parse_spec_named(text: &str, file: &str) -> Result<SpecFile, ParseError> {
    let toks = lex(text, file)?;
    if toks.len() == 1 {
        let t = &toks[0];
        return Err(ParseError {
            span: SourceSpan { file: file.to_string(), line: t.line, column: t.column, length: 1 },
            code: ParseErrorCode::EmptySpec,
            message: "the input contains no specification".into(),
            expected: vec!["`schema`".into()],
        });
    }
    Parser { toks, pos: 0, file }.file()
}

/// Parses a standalone condition, e.g. for tests and tooling.
pub fn parse_condition(text: &str) -> Result<Condition, ParseError> {
    let mut p = Parser { toks: lex(text, "<condition>")?, pos: 0, file: "<condition>" };
    let c = p.cond()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error(&["end of input"]));
    }
    Ok(c)
}

/// Parses a standalone LTL-FO formula (without `forall`).
pub fn parse_ltl(text: &str) -> Result<Ltl<Prop>, ParseError> {
    let mut p = Parser { toks: lex(text, "<ltl>")?, pos: 0, file: "<ltl>" };
    let f = p.ltl()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error(&["end of input"]));
    }
    Ok(collapse(f))
}

// ---------------------------------------------------------------------------
// Renderer

fn render_str(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Str(s) => f.write_str(&render_str(s)),
            Term::Null => f.write_str("null"),
        }
    }
}

fn write_typed(out: &mut String, vs: &[TypedVar]) {
    for (i, v) in vs.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{}: {}", v.name, v.ty);
    }
}

fn write_cond(out: &mut String, c: &Condition) {
    let child = |out: &mut String, x: &Condition| {
        if matches!(x, Condition::And(_) | Condition::Or(_) | Condition::Exists(..)) {
            out.push('(');
            write_cond(out, x);
            out.push(')');
        } else {
            write_cond(out, x);
        }
    };
    match c {
        Condition::True => out.push_str("true"),
        Condition::False => out.push_str("false"),
        Condition::Eq(a, b) => {
            let _ = write!(out, "{a} == {b}");
        }
        Condition::Neq(a, b) => {
            let _ = write!(out, "{a} != {b}");
        }
        Condition::Rel(r) => {
            out.push_str(&r.relation);
            out.push('(');
            for (i, t) in r.args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{t}");
            }
            out.push(')');
        }
        Condition::Not(x) => {
            out.push('!');
            if matches!(**x, Condition::Rel(_) | Condition::True | Condition::False | Condition::Not(_)) {
                write_cond(out, x);
            } else {
                out.push('(');
                write_cond(out, x);
                out.push(')');
            }
        }
        Condition::And(cs) | Condition::Or(cs) => {
            if cs.is_empty() {
                out.push_str(if matches!(c, Condition::And(_)) { "true" } else { "false" });
            }
            let sep = if matches!(c, Condition::And(_)) { " && " } else { " || " };
            for (i, x) in cs.iter().enumerate() {
                if i > 0 {
                    out.push_str(sep);
                }
                child(out, x);
            }
        }
        Condition::Exists(vs, body) => {
            out.push_str("exists ");
            write_typed(out, vs);
            out.push_str(" . ");
            write_cond(out, body);
        }
    }
}

pub fn render_condition(c: &Condition) -> String {
    let mut s = String::new();
    write_cond(&mut s, c);
    s
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_condition(self))
    }
}

impl fmt::Display for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prop::Cond(c) => write!(f, "({c})"),
            Prop::Service(s) => write!(f, "service({s})"),
        }
    }
}

pub fn render_property(p: &LtlFo) -> String {
    let mut out = format!("property {}: ", p.name);
    if !p.globals.is_empty() {
        out.push_str("forall ");
        write_typed(&mut out, &p.globals);
        out.push_str(" . ");
    }
    let _ = write!(out, "{};", p.formula);
    out
}

/// Canonical text of a system and its properties.
pub fn render_spec(spec: &TasSpec, props: &[LtlFo]) -> String {
    let mut out = String::from("schema {\n");
    for r in &spec.schema.relations {
        let _ = writeln!(out, "  relation {} {{\n    id;", r.name);
        for a in &r.attributes {
            match &a.kind {
                AttrKind::Val => {
                    let _ = writeln!(out, "    {}: VAL;", a.name);
                }
                AttrKind::ForeignKey(t) => {
                    let _ = writeln!(out, "    {}: -> {t};", a.name);
                }
            }
        }
        out.push_str("  }\n");
    }
    out.push_str("}\n\nvariables {\n");
    for v in &spec.variables {
        let _ = writeln!(out, "  {}: {};", v.name, v.ty);
    }
    let _ = writeln!(out, "}}\n\ninit: {};", render_condition(&spec.init));
    for s in &spec.services {
        let _ = write!(
            out,
            "\nservice {} {{\n  pre: {};\n  propagate: {};\n  post: {};\n}}\n",
            s.name,
            render_condition(&s.pre),
            s.propagated.join(", "),
            render_condition(&s.post)
        );
    }
    if !props.is_empty() {
        out.push('\n');
    }
    for p in props {
        out.push_str(&render_property(p));
        out.push('\n');
    }
    out
}
