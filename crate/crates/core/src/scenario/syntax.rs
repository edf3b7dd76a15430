//! Lexer, parser and printer for the scenario format.
//!
//! The format is line oriented: every statement fits on one line, blocks
//! open with a keyword line and close with `end`. `#` starts a comment.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

fn err<T>(pos: Pos, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line: pos.line, col: pos.col, message: message.into() })
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    Sym(&'static str),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(i) => write!(f, "`{i}`"),
            Tok::Str(s) => write!(f, "\"{s}\""),
            Tok::Sym(s) => write!(f, "`{s}`"),
        }
    }
}

const SYMBOLS: [&str; 12] = [">=", "..", "+", "-", "*", "(", ")", ",", "=", ":", "[", "]"];

fn lex_line(text: &str, line: usize) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col: i + 1 };
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let v = s.parse::<i64>().or_else(|_| err(pos, format!("integer literal {s} out of range")))?;
            out.push((Tok::Int(v), pos));
            continue;
        }
        if c == '"' {
            let start = i + 1;
            i += 1;
            while i < chars.len() && chars[i] != '"' {
                i += 1;
            }
            if i == chars.len() {
                return err(pos, "unterminated string");
            }
            out.push((Tok::Str(chars[start..i].iter().collect()), pos));
            i += 1;
            continue;
        }
        let rest: String = chars[i..].iter().take(2).collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(s) => {
                out.push((Tok::Sym(s), pos));
                i += s.chars().count();
            }
            None => return err(pos, format!("unexpected character `{c}`")),
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Int(i64),
    Ident(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pair(Box<Expr>, Box<Expr>),
    Call(String, Vec<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Literal {
    Int(i64),
    Bool(bool),
    Unknown,
    Str(String),
    Tuple(Vec<Literal>),
    Interval(i64, i64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactDecl {
    H0(Expr, i64),
    Bpf(Expr),
    Noneffective(Expr),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorDecl {
    pub name: String,
    pub degree: i64,
    pub point: bool,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveDecl {
    pub name: String,
    pub genus: Option<i64>,
    pub generators: Vec<GeneratorDecl>,
    pub relations: Vec<Expr>,
    pub canonical: Option<Expr>,
    pub facts: Vec<FactDecl>,
    pub double_cover: Option<(Expr, Vec<i64>)>,
    pub theta: Vec<Expr>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceDecl {
    pub name: String,
    pub base: Option<(String, Pos)>,
    pub twist: Option<Expr>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductDecl {
    pub name: String,
    pub surface: Option<(String, Pos)>,
    pub curve: Option<(String, Pos)>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypersurfaceDecl {
    pub name: String,
    pub ambient: Option<(String, Pos)>,
    pub class: Option<Expr>,
    pub assumptions: Vec<String>,
    pub kernel: Vec<Expr>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckDecl {
    pub name: String,
    pub expr: Expr,
    pub guard: Option<i64>,
    pub expected: Literal,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableDecl {
    pub name: String,
    pub var: String,
    pub from: i64,
    pub to: i64,
    pub expr: Expr,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerdictDecl {
    pub base: String,
    pub polarization: Option<Expr>,
    pub boundary: Option<Expr>,
    pub expects: Vec<(String, Literal, Pos)>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineDecl {
    pub nmax: Option<i64>,
    pub run: Vec<String>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Curve(CurveDecl),
    Surface(SurfaceDecl),
    Product(ProductDecl),
    Hypersurface(HypersurfaceDecl),
    Let(String, Expr, Pos),
    Table(TableDecl),
    Check(CheckDecl),
    Pipeline(PipelineDecl),
    Verdict(VerdictDecl),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScenarioAst {
    pub name: String,
    pub items: Vec<Item>,
}

/// Check names accepted after `expect` in a verdict block.
pub const VERDICT_EXPECTATIONS: [&str; 4] = ["db_pair", "db_space", "witness", "index"];

struct Cursor<'a> {
    toks: &'a [(Tok, Pos)],
    i: usize,
    end: Pos,
}

impl<'a> Cursor<'a> {
    fn new(toks: &'a [(Tok, Pos)], line: usize, len: usize) -> Self {
        Cursor { toks, i: 0, end: Pos { line, col: len + 1 } }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|(t, _)| t)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.i).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<(Tok, Pos)> {
        let t = self.toks.get(self.i).cloned();
        if t.is_some() {
            self.i += 1;
        }
        t
    }

    fn describe(&self) -> String {
        match self.peek() {
            Some(t) => t.to_string(),
            None => "end of line".to_string(),
        }
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(x)) if *x == s) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            err(self.pos(), format!("expected `{s}`, found {}", self.describe()))
        }
    }

    fn eat_keyword(&mut self, k: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Ident(x)) if x == k) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect_keyword(&mut self, k: &str) -> Result<(), ParseError> {
        if self.eat_keyword(k) {
            Ok(())
        } else {
            err(self.pos(), format!("expected `{k}`, found {}", self.describe()))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, Pos), ParseError> {
        match self.peek() {
            Some(Tok::Ident(_)) => match self.next() {
                Some((Tok::Ident(s), p)) => Ok((s, p)),
                _ => unreachable!(),
            },
            _ => err(self.pos(), format!("expected {what}, found {}", self.describe())),
        }
    }

    fn pos_back(&self) -> Pos {
        self.toks.get(self.i.saturating_sub(1)).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        let neg = self.eat_sym("-");
        match self.next() {
            Some((Tok::Int(v), _)) => Ok(if neg { -v } else { v }),
            _ => err(self.pos_back(), "expected an integer"),
        }
    }

    fn done(&self) -> Result<(), ParseError> {
        if self.i < self.toks.len() {
            err(self.pos(), format!("unexpected {} at end of statement", self.describe()))
        } else {
            Ok(())
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let pos = self.pos();
            if self.eat_sym("+") {
                let rhs = self.term()?;
                lhs = Expr { kind: ExprKind::Add(Box::new(lhs), Box::new(rhs)), pos };
            } else if self.eat_sym("-") {
                let rhs = self.term()?;
                lhs = Expr { kind: ExprKind::Sub(Box::new(lhs), Box::new(rhs)), pos };
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let pos = self.pos();
            if self.eat_sym("*") {
                let rhs = self.unary()?;
                lhs = Expr { kind: ExprKind::Mul(Box::new(lhs), Box::new(rhs)), pos };
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        if self.eat_sym("-") {
            let inner = self.unary()?;
            return Ok(Expr { kind: ExprKind::Neg(Box::new(inner)), pos });
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.next() {
            Some((Tok::Int(v), _)) => Ok(Expr { kind: ExprKind::Int(v), pos }),
            Some((Tok::Ident(name), _)) => {
                if RESERVED.contains(&name.as_str()) {
                    return err(pos, format!("`{name}` is a keyword and cannot start an expression"));
                }
                if self.eat_sym("(") {
                    let mut args = Vec::new();
                    if !self.eat_sym(")") {
                        loop {
                            args.push(self.expr()?);
                            if self.eat_sym(")") {
                                break;
                            }
                            self.expect_sym(",")?;
                        }
                    }
                    Ok(Expr { kind: ExprKind::Call(name, args), pos })
                } else {
                    Ok(Expr { kind: ExprKind::Ident(name), pos })
                }
            }
            Some((Tok::Sym("("), _)) => {
                let first = self.expr()?;
                if self.eat_sym(",") {
                    let second = self.expr()?;
                    self.expect_sym(")")?;
                    return Ok(Expr { kind: ExprKind::Pair(Box::new(first), Box::new(second)), pos });
                }
                self.expect_sym(")")?;
                Ok(first)
            }
            Some((t, _)) => err(pos, format!("expected an expression, found {t}")),
            None => err(pos, "expected an expression, found end of line"),
        }
    }

    fn literal(&mut self) -> Result<Literal, ParseError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Sym("-")) | Some(Tok::Int(_)) => Ok(Literal::Int(self.int()?)),
            Some(Tok::Ident(s)) if s == "true" || s == "false" || s == "unknown" => {
                self.i += 1;
                Ok(match s.as_str() {
                    "true" => Literal::Bool(true),
                    "false" => Literal::Bool(false),
                    _ => Literal::Unknown,
                })
            }
            Some(Tok::Str(s)) => {
                self.i += 1;
                Ok(Literal::Str(s))
            }
            Some(Tok::Sym("(")) => {
                self.i += 1;
                let mut items = vec![self.literal()?];
                while self.eat_sym(",") {
                    items.push(self.literal()?);
                }
                self.expect_sym(")")?;
                Ok(Literal::Tuple(items))
            }
            Some(Tok::Sym("[")) => {
                self.i += 1;
                let lo = self.int()?;
                self.expect_sym(",")?;
                let hi = self.int()?;
                self.expect_sym("]")?;
                Ok(Literal::Interval(lo, hi))
            }
            _ => err(pos, format!("expected a literal, found {}", self.describe())),
        }
    }
}

/// Words that cannot be used as expression atoms.
const RESERVED: [&str; 3] = ["for", "end", "let"];

/// Names reserved by the evaluator.
pub const BUILTIN_NAMES: [&str; 1] = ["n"];

#[derive(Clone, Copy, PartialEq, Eq)]
enum Block {
    Curve,
    Surface,
    Product,
    Hypersurface,
    Pipeline,
    Verdict,
}

/// Parse a complete scenario file.
pub fn parse_scenario(src: &str) -> Result<ScenarioAst, ParseError> {
    let mut name: Option<String> = None;
    let mut items: Vec<Item> = Vec::new();
    let mut open: Option<(Block, Item)> = None;
    let mut last_line = 0;
    for (idx, text) in src.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let toks = lex_line(text, line)?;
        if toks.is_empty() {
            continue;
        }
        let mut c = Cursor::new(&toks, line, text.chars().count());
        let (head, head_pos) = match c.next() {
            Some((Tok::Ident(s), p)) => (s, p),
            Some((t, p)) => return err(p, format!("expected a statement keyword, found {t}")),
            None => unreachable!(),
        };
        if let Some((kind, item)) = open.as_mut() {
            if head == "end" {
                c.done()?;
                let (_, item) = open.take().expect("open block");
                items.push(item);
                continue;
            }
            block_line(*kind, item, &head, head_pos, &mut c)?;
            c.done()?;
            continue;
        }
        if name.is_none() && head != "scenario" {
            return err(head_pos, "a scenario file must start with `scenario NAME`");
        }
        match head.as_str() {
            "scenario" => {
                if name.is_some() {
                    return err(head_pos, "duplicate `scenario` header");
                }
                name = Some(c.ident("a scenario name")?.0);
            }
            "curve" => {
                let (n, _) = c.ident("a curve name")?;
                open = Some((
                    Block::Curve,
                    Item::Curve(CurveDecl {
                        name: n,
                        genus: None,
                        generators: vec![],
                        relations: vec![],
                        canonical: None,
                        facts: vec![],
                        double_cover: None,
                        theta: vec![],
                        pos: head_pos,
                    }),
                ));
            }
            "surface" => {
                let (n, _) = c.ident("a surface name")?;
                open = Some((
                    Block::Surface,
                    Item::Surface(SurfaceDecl { name: n, base: None, twist: None, pos: head_pos }),
                ));
            }
            "product" => {
                let (n, _) = c.ident("a product name")?;
                open = Some((
                    Block::Product,
                    Item::Product(ProductDecl { name: n, surface: None, curve: None, pos: head_pos }),
                ));
            }
            "hypersurface" => {
                let (n, _) = c.ident("a hypersurface name")?;
                open = Some((
                    Block::Hypersurface,
                    Item::Hypersurface(HypersurfaceDecl {
                        name: n,
                        ambient: None,
                        class: None,
                        assumptions: vec![],
                        kernel: vec![],
                        pos: head_pos,
                    }),
                ));
            }
            "pipeline" => {
                open = Some((Block::Pipeline, Item::Pipeline(PipelineDecl { nmax: None, run: vec![], pos: head_pos })));
            }
            "verdict" => {
                let (b, _) = c.ident("a model name")?;
                open = Some((
                    Block::Verdict,
                    Item::Verdict(VerdictDecl {
                        base: b,
                        polarization: None,
                        boundary: None,
                        expects: vec![],
                        pos: head_pos,
                    }),
                ));
            }
            "let" => {
                let (n, p) = c.ident("a name")?;
                if BUILTIN_NAMES.contains(&n.as_str()) || RESERVED.contains(&n.as_str()) {
                    return err(p, format!("`{n}` is reserved"));
                }
                c.expect_sym("=")?;
                let e = c.expr()?;
                items.push(Item::Let(n, e, head_pos));
            }
            "table" => {
                let (n, _) = c.ident("a table name")?;
                let (var, p) = c.ident("a variable name")?;
                if var == "n" {
                    return err(p, "table variable cannot be `n`");
                }
                c.expect_sym("=")?;
                let from = c.int()?;
                c.expect_sym("..")?;
                let to = c.int()?;
                c.expect_sym(":")?;
                let e = c.expr()?;
                items.push(Item::Table(TableDecl { name: n, var, from, to, expr: e, pos: head_pos }));
            }
            "check" => {
                let (n, _) = c.ident("a check name")?;
                c.expect_sym(":")?;
                let e = c.expr()?;
                let guard = if c.eat_keyword("for") {
                    c.expect_keyword("n")?;
                    c.expect_sym(">=")?;
                    Some(c.int()?)
                } else {
                    None
                };
                c.expect_sym("=")?;
                let expected = c.literal()?;
                items.push(Item::Check(CheckDecl { name: n, expr: e, guard, expected, pos: head_pos }));
            }
            "end" => return err(head_pos, "`end` without an open block"),
            other => return err(head_pos, format!("unknown statement `{other}`")),
        }
        c.done()?;
    }
    if let Some((_, item)) = open {
        let pos = item_pos(&item);
        return err(pos, format!("block opened here is not closed by `end` (file ends at line {last_line})"));
    }
    match name {
        Some(name) => Ok(ScenarioAst { name, items }),
        None => err(Pos { line: last_line.max(1), col: 1 }, "missing `scenario NAME` header"),
    }
}

fn item_pos(item: &Item) -> Pos {
    match item {
        Item::Curve(d) => d.pos,
        Item::Surface(d) => d.pos,
        Item::Product(d) => d.pos,
        Item::Hypersurface(d) => d.pos,
        Item::Let(_, _, p) => *p,
        Item::Table(d) => d.pos,
        Item::Check(d) => d.pos,
        Item::Pipeline(d) => d.pos,
        Item::Verdict(d) => d.pos,
    }
}

fn set_once<T>(slot: &mut Option<T>, v: T, pos: Pos, what: &str) -> Result<(), ParseError> {
    if slot.is_some() {
        return err(pos, format!("duplicate `{what}`"));
    }
    *slot = Some(v);
    Ok(())
}

fn block_line(kind: Block, item: &mut Item, head: &str, pos: Pos, c: &mut Cursor<'_>) -> Result<(), ParseError> {
    match (kind, item) {
        (Block::Curve, Item::Curve(d)) => match head {
            "genus" => {
                let g = c.int()?;
                set_once(&mut d.genus, g, pos, "genus")
            }
            "generator" => {
                let (name, p) = c.ident("a generator name")?;
                c.expect_keyword("degree")?;
                let degree = c.int()?;
                let point = c.eat_keyword("point");
                d.generators.push(GeneratorDecl { name, degree, point, pos: p });
                Ok(())
            }
            "relation" => {
                d.relations.push(c.expr()?);
                Ok(())
            }
            "canonical" => {
                let e = c.expr()?;
                set_once(&mut d.canonical, e, pos, "canonical")
            }
            "fact" => {
                let (kind, p) = c.ident("a fact kind")?;
                match kind.as_str() {
                    "h0" => {
                        let e = c.expr()?;
                        c.expect_sym("=")?;
                        let v = c.int()?;
                        if v < 0 {
                            return err(p, "h0 facts are non-negative");
                        }
                        d.facts.push(FactDecl::H0(e, v));
                    }
                    "bpf" => d.facts.push(FactDecl::Bpf(c.expr()?)),
                    "noneffective" => d.facts.push(FactDecl::Noneffective(c.expr()?)),
                    other => return err(p, format!("unknown fact kind `{other}` (h0, bpf, noneffective)")),
                }
                Ok(())
            }
            "double_cover" => {
                let e = c.expr()?;
                c.expect_keyword("twists")?;
                let mut twists = vec![c.int()?];
                while c.peek().is_some() {
                    twists.push(c.int()?);
                }
                set_once(&mut d.double_cover, (e, twists), pos, "double_cover")
            }
            "theta" => {
                d.theta.push(c.expr()?);
                Ok(())
            }
            other => err(pos, format!("unknown curve statement `{other}`")),
        },
        (Block::Surface, Item::Surface(d)) => match head {
            "base" => {
                let b = c.ident("a curve name")?;
                set_once(&mut d.base, b, pos, "base")
            }
            "twist" => {
                let e = c.expr()?;
                set_once(&mut d.twist, e, pos, "twist")
            }
            other => err(pos, format!("unknown surface statement `{other}`")),
        },
        (Block::Product, Item::Product(d)) => match head {
            "surface" => {
                let s = c.ident("a surface name")?;
                set_once(&mut d.surface, s, pos, "surface")
            }
            "curve" => {
                let s = c.ident("a curve name")?;
                set_once(&mut d.curve, s, pos, "curve")
            }
            other => err(pos, format!("unknown product statement `{other}`")),
        },
        (Block::Hypersurface, Item::Hypersurface(d)) => match head {
            "ambient" => {
                let s = c.ident("a product name")?;
                set_once(&mut d.ambient, s, pos, "ambient")
            }
            "class" => {
                let e = c.expr()?;
                set_once(&mut d.class, e, pos, "class")
            }
            "assume" => {
                let (a, _) = c.ident("an assumption")?;
                d.assumptions.push(a);
                Ok(())
            }
            "kernel" => {
                d.kernel.push(c.expr()?);
                Ok(())
            }
            other => err(pos, format!("unknown hypersurface statement `{other}`")),
        },
        (Block::Pipeline, Item::Pipeline(d)) => match head {
            "nmax" => {
                let v = c.int()?;
                if v < 1 {
                    return err(pos, "nmax must be at least 1");
                }
                set_once(&mut d.nmax, v, pos, "nmax")
            }
            "run" => {
                d.run.push(c.ident("a check name")?.0);
                while c.peek().is_some() {
                    d.run.push(c.ident("a check name")?.0);
                }
                Ok(())
            }
            other => err(pos, format!("unknown pipeline statement `{other}`")),
        },
        (Block::Verdict, Item::Verdict(d)) => match head {
            "polarization" => {
                let e = c.expr()?;
                set_once(&mut d.polarization, e, pos, "polarization")
            }
            "boundary" => {
                let e = c.expr()?;
                set_once(&mut d.boundary, e, pos, "boundary")
            }
            "expect" => {
                let (what, p) = c.ident("a verdict field")?;
                if !VERDICT_EXPECTATIONS.contains(&what.as_str()) {
                    return err(p, format!("unknown verdict field `{what}` (db_pair, db_space, witness, index)"));
                }
                c.expect_sym("=")?;
                let lit = c.literal()?;
                d.expects.push((what, lit, p));
                Ok(())
            }
            other => err(pos, format!("unknown verdict statement `{other}`")),
        },
        _ => unreachable!("block kind matches item"),
    }
}

/// Parse a standalone expression (CLI `eval`/`explain`).
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    if src.contains('\n') {
        let col = src.find('\n').map(|i| i + 1).unwrap_or(1);
        return err(Pos { line: 1, col }, "expression must be on one line");
    }
    let toks = lex_line(src, 1)?;
    let mut c = Cursor::new(&toks, 1, src.chars().count());
    let e = c.expr()?;
    c.done()?;
    Ok(e)
}

fn prec(e: &Expr) -> u8 {
    match e.kind {
        ExprKind::Add(..) | ExprKind::Sub(..) => 1,
        ExprKind::Mul(..) => 2,
        ExprKind::Neg(..) => 3,
        _ => 4,
    }
}

fn wrap(e: &Expr, min: u8) -> String {
    if prec(e) < min {
        format!("({e})")
    } else {
        e.to_string()
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Int(v) => write!(f, "{v}"),
            ExprKind::Ident(s) => write!(f, "{s}"),
            ExprKind::Neg(e) => write!(f, "-{}", wrap(e, 3)),
            ExprKind::Add(a, b) => write!(f, "{} + {}", wrap(a, 1), wrap(b, 2)),
            ExprKind::Sub(a, b) => write!(f, "{} - {}", wrap(a, 1), wrap(b, 2)),
            ExprKind::Mul(a, b) => write!(f, "{}*{}", wrap(a, 2), wrap(b, 3)),
            ExprKind::Pair(a, b) => write!(f, "({a}, {b})"),
            ExprKind::Call(name, args) => {
                let parts: Vec<String> = args.iter().map(|a| a.to_string()).collect();
                write!(f, "{name}({})", parts.join(", "))
            }
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Int(v) => write!(f, "{v}"),
            Literal::Bool(b) => write!(f, "{b}"),
            Literal::Unknown => write!(f, "unknown"),
            Literal::Str(s) => write!(f, "\"{s}\""),
            Literal::Tuple(items) => {
                let parts: Vec<String> = items.iter().map(|l| l.to_string()).collect();
                write!(f, "({})", parts.join(", "))
            }
            Literal::Interval(lo, hi) => write!(f, "[{lo}, {hi}]"),
        }
    }
}

impl fmt::Display for ScenarioAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario {}", self.name)?;
        let mut prev_block = true;
        for item in &self.items {
            let block = !matches!(item, Item::Let(..) | Item::Table(..) | Item::Check(..));
            if block || prev_block {
                writeln!(f)?;
            }
            prev_block = block;
            match item {
                Item::Curve(d) => {
                    writeln!(f, "curve {}", d.name)?;
                    if let Some(g) = d.genus {
                        writeln!(f, "  genus {g}")?;
                    }
                    for g in &d.generators {
                        writeln!(
                            f,
                            "  generator {} degree {}{}",
                            g.name,
                            g.degree,
                            if g.point { " point" } else { "" }
                        )?;
                    }
                    for r in &d.relations {
                        writeln!(f, "  relation {r}")?;
                    }
                    if let Some(k) = &d.canonical {
                        writeln!(f, "  canonical {k}")?;
                    }
                    for fact in &d.facts {
                        match fact {
                            FactDecl::H0(e, v) => writeln!(f, "  fact h0 {e} = {v}")?,
                            FactDecl::Bpf(e) => writeln!(f, "  fact bpf {e}")?,
                            FactDecl::Noneffective(e) => writeln!(f, "  fact noneffective {e}")?,
                        }
                    }
                    if let Some((e, twists)) = &d.double_cover {
                        let ts: Vec<String> = twists.iter().map(|t| t.to_string()).collect();
                        writeln!(f, "  double_cover {e} twists {}", ts.join(" "))?;
                    }
                    for t in &d.theta {
                        writeln!(f, "  theta {t}")?;
                    }
                    writeln!(f, "end")?;
                }
                Item::Surface(d) => {
                    writeln!(f, "surface {}", d.name)?;
                    if let Some((b, _)) = &d.base {
                        writeln!(f, "  base {b}")?;
                    }
                    if let Some(t) = &d.twist {
                        writeln!(f, "  twist {t}")?;
                    }
                    writeln!(f, "end")?;
                }
                Item::Product(d) => {
                    writeln!(f, "product {}", d.name)?;
                    if let Some((s, _)) = &d.surface {
                        writeln!(f, "  surface {s}")?;
                    }
                    if let Some((c, _)) = &d.curve {
                        writeln!(f, "  curve {c}")?;
                    }
                    writeln!(f, "end")?;
                }
                Item::Hypersurface(d) => {
                    writeln!(f, "hypersurface {}", d.name)?;
                    if let Some((a, _)) = &d.ambient {
                        writeln!(f, "  ambient {a}")?;
                    }
                    if let Some(c) = &d.class {
                        writeln!(f, "  class {c}")?;
                    }
                    for k in &d.kernel {
                        writeln!(f, "  kernel {k}")?;
                    }
                    for a in &d.assumptions {
                        writeln!(f, "  assume {a}")?;
                    }
                    writeln!(f, "end")?;
                }
                Item::Let(n, e, _) => writeln!(f, "let {n} = {e}")?,
                Item::Table(t) => writeln!(f, "table {} {} = {}..{} : {}", t.name, t.var, t.from, t.to, t.expr)?,
                Item::Check(c) => match c.guard {
                    Some(g) => writeln!(f, "check {} : {} for n >= {g} = {}", c.name, c.expr, c.expected)?,
                    None => writeln!(f, "check {} : {} = {}", c.name, c.expr, c.expected)?,
                },
                Item::Pipeline(p) => {
                    writeln!(f, "pipeline")?;
                    if let Some(n) = p.nmax {
                        writeln!(f, "  nmax {n}")?;
                    }
                    if !p.run.is_empty() {
                        writeln!(f, "  run {}", p.run.join(" "))?;
                    }
                    writeln!(f, "end")?;
                }
                Item::Verdict(v) => {
                    writeln!(f, "verdict {}", v.base)?;
                    if let Some(p) = &v.polarization {
                        writeln!(f, "  polarization {p}")?;
                    }
                    if let Some(b) = &v.boundary {
                        writeln!(f, "  boundary {b}")?;
                    }
                    for (what, lit, _) in &v.expects {
                        writeln!(f, "  expect {what} = {lit}")?;
                    }
                    writeln!(f, "end")?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expressions_round_trip() {
        for src in [
            "5*L - K_S",
            "h1(S, 4*n*L - E)",
            "(4*L, 4*Theta)",
            "-(a - b)",
            "a - (b - c)",
            "a - b - c",
            "2*(g12 + R1)",
            "-3*x",
            "intersect(5*L - K_S, 5*L - K_S)",
            "restrict(T, (E, 0))",
        ] {
            let e = parse_expr(src).unwrap();
            assert_eq!(e.to_string(), src);
            assert_eq!(parse_expr(&e.to_string()).unwrap().to_string(), src);
        }
    }

    #[test]
    fn precedence() {
        let e = parse_expr("a + 2*b - c").unwrap();
        assert!(matches!(e.kind, ExprKind::Sub(..)));
        assert_eq!(parse_expr("(a + b)*c").unwrap().to_string(), "(a + b)*c");
        assert_eq!(parse_expr("((a))").unwrap().to_string(), "a");
    }

    #[test]
    fn diagnostics_are_positioned() {
        let e = parse_expr("h1(S, 4*L").unwrap_err();
        assert_eq!((e.line, e.col), (1, 10));
        let e = parse_expr("a $ b").unwrap_err();
        assert_eq!((e.line, e.col), (1, 3));
        let e = parse_scenario("scenario x\ncurve C\n  genus 7\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_scenario("scenario x\ncheck a : 1 + = 2\n").unwrap_err();
        assert_eq!((e.line, e.col), (2, 15));
        let e = parse_scenario("curve C\nend\n").unwrap_err();
        assert_eq!(e.line, 1);
    }

    #[test]
    fn scenario_round_trip() {
        let src = "scenario t\ncurve C\n  genus 1\n  generator p degree 1 point\n  canonical 0\nend\n\
                   let D = 3*p\ncheck d : deg(D) = 3\ncheck v : h1(C, n*D) for n >= 1 = 0\n\
                   pipeline\n  nmax 4\nend\n";
        let ast = parse_scenario(src).unwrap();
        let printed = ast.to_string();
        let again = parse_scenario(&printed).unwrap();
        assert_eq!(again.to_string(), printed);
    }
}
