//! HOA v1 input and output.
//!
//! Only transition-based acceptance is read. Label expressions are expanded
//! to explicit symbols while parsing, so the emitted text always uses one
//! full-cube label per edge.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{Acceptance, Alphabet, AutomatonError, DetAutomaton, DetEdge, EdgeAcc, Ngba, NgbaBuilder, Symbol};
use crate::bits::AccSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HoaError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
}

/// Result of parsing: Büchi-type conditions give an NGBA, Rabin and parity
/// conditions a deterministic automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HoaAutomaton {
    Ngba(Ngba),
    Deterministic(DetAutomaton),
}

impl HoaAutomaton {
    pub fn num_states(&self) -> usize {
        match self {
            HoaAutomaton::Ngba(b) => b.num_states(),
            HoaAutomaton::Deterministic(a) => a.num_states(),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        match self {
            HoaAutomaton::Ngba(b) => b.alphabet(),
            HoaAutomaton::Deterministic(a) => a.alphabet(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Header(String),
    Ident(String),
    Int(u64),
    Str(String),
    Alias(String),
    Punct(char),
    Body,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, HoaError> {
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let mut out = Vec::new();
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize| {
        if chars[*i] == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
        *i += 1;
    };
    let err = |line, col, msg: &str| HoaError::Syntax { line, col, msg: msg.to_string() };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col);
        } else if c == '/' && chars.get(i + 1) == Some(&'*') {
            while i < chars.len() && !(chars[i] == '*' && chars.get(i + 1) == Some(&'/')) {
                advance(&mut i, &mut line, &mut col);
            }
            if i >= chars.len() {
                return Err(err(l0, c0, "unterminated comment"));
            }
            advance(&mut i, &mut line, &mut col);
            advance(&mut i, &mut line, &mut col);
        } else if c == '"' {
            advance(&mut i, &mut line, &mut col);
            let mut s = String::new();
            loop {
                match chars.get(i) {
                    None => return Err(err(l0, c0, "unterminated string")),
                    Some('"') => break,
                    Some('\\') => {
                        advance(&mut i, &mut line, &mut col);
                        match chars.get(i) {
                            Some(&e) => s.push(e),
                            None => return Err(err(l0, c0, "unterminated string")),
                        }
                    }
                    Some(&ch) => s.push(ch),
                }
                advance(&mut i, &mut line, &mut col);
            }
            advance(&mut i, &mut line, &mut col);
            out.push(Token { tok: Tok::Str(s), line: l0, col: c0 });
        } else if c.is_ascii_digit() {
            let mut n: u64 = 0;
            while i < chars.len() && chars[i].is_ascii_digit() {
                n = n
                    .checked_mul(10)
                    .and_then(|n| n.checked_add(chars[i] as u64 - '0' as u64))
                    .ok_or_else(|| err(l0, c0, "integer too large"))?;
                advance(&mut i, &mut line, &mut col);
            }
            out.push(Token { tok: Tok::Int(n), line: l0, col: c0 });
        } else if c.is_ascii_alphabetic() || c == '_' || c == '@' {
            if c == '@' {
                advance(&mut i, &mut line, &mut col);
            }
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '-') {
                advance(&mut i, &mut line, &mut col);
            }
            let word: String = chars[start..i].iter().collect();
            let tok = if c == '@' {
                if word.is_empty() {
                    return Err(err(l0, c0, "empty alias name"));
                }
                Tok::Alias(word)
            } else if chars.get(i) == Some(&':') {
                advance(&mut i, &mut line, &mut col);
                Tok::Header(word)
            } else {
                Tok::Ident(word)
            };
            out.push(Token { tok, line: l0, col: c0 });
        } else if c == '-' && chars.get(i + 1) == Some(&'-') {
            let start = i;
            advance(&mut i, &mut line, &mut col);
            advance(&mut i, &mut line, &mut col);
            while i < chars.len() && chars[i].is_ascii_uppercase() {
                advance(&mut i, &mut line, &mut col);
            }
            let word: String = chars[start..i].iter().collect();
            if !(chars.get(i) == Some(&'-') && chars.get(i + 1) == Some(&'-')) {
                return Err(err(l0, c0, "malformed section marker"));
            }
            advance(&mut i, &mut line, &mut col);
            advance(&mut i, &mut line, &mut col);
            let tok = match &word[2..] {
                "BODY" => Tok::Body,
                "END" => Tok::End,
                "ABORT" => return Err(HoaError::Unsupported("aborted automaton".into())),
                _ => return Err(err(l0, c0, "unknown section marker")),
            };
            out.push(Token { tok, line: l0, col: c0 });
        } else if "[]{}()!&|".contains(c) {
            advance(&mut i, &mut line, &mut col);
            out.push(Token { tok: Tok::Punct(c), line: l0, col: c0 });
        } else {
            return Err(err(l0, c0, &format!("unexpected character '{c}'")));
        }
    }
    out.push(Token { tok: Tok::End, line, col });
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
enum Label {
    Const(bool),
    Ap(usize),
    Not(Box<Label>),
    And(Box<Label>, Box<Label>),
    Or(Box<Label>, Box<Label>),
}

impl Label {
    fn eval(&self, sym: Symbol) -> bool {
        match self {
            Label::Const(b) => *b,
            Label::Ap(i) => sym >> i & 1 == 1,
            Label::Not(a) => !a.eval(sym),
            Label::And(a, b) => a.eval(sym) && b.eval(sym),
            Label::Or(a, b) => a.eval(sym) || b.eval(sym),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Cond {
    Const(bool),
    Inf(u32),
    Fin(u32),
    And(Box<Cond>, Box<Cond>),
    Or(Box<Cond>, Box<Cond>),
}

impl Cond {
    fn conjuncts(&self) -> Vec<&Cond> {
        match self {
            Cond::And(a, b) => [a.conjuncts(), b.conjuncts()].concat(),
            c => vec![c],
        }
    }

    fn disjuncts(&self) -> Vec<&Cond> {
        match self {
            Cond::Or(a, b) => [a.disjuncts(), b.disjuncts()].concat(),
            c => vec![c],
        }
    }
}

fn parity_min_even(n: u32) -> Cond {
    fn from(i: u32, n: u32) -> Cond {
        let atom = if i % 2 == 0 { Cond::Inf(i) } else { Cond::Fin(i) };
        if i + 1 == n {
            atom
        } else if i % 2 == 0 {
            Cond::Or(Box::new(atom), Box::new(from(i + 1, n)))
        } else {
            Cond::And(Box::new(atom), Box::new(from(i + 1, n)))
        }
    }
    if n == 0 {
        Cond::Const(true)
    } else {
        from(0, n)
    }
}

enum Kind {
    All,
    Buchi(Vec<u32>),
    Rabin(Vec<(u32, u32)>),
    Parity(u32),
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

struct RawEdge {
    src: usize,
    symbols: Vec<Symbol>,
    dst: usize,
    sets: Vec<u32>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, msg: impl Into<String>) -> HoaError {
        let t = &self.toks[self.pos];
        HoaError::Syntax { line: t.line, col: t.col, msg: msg.into() }
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Punct(c) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), HoaError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    fn int(&mut self) -> Result<u64, HoaError> {
        match self.peek() {
            Tok::Int(n) => {
                let n = *n;
                self.next();
                Ok(n)
            }
            _ => Err(self.error("expected an integer")),
        }
    }

    fn index(&mut self) -> Result<u32, HoaError> {
        let n = self.int()?;
        u32::try_from(n).map_err(|_| self.error("index too large"))
    }

    fn label_or(&mut self, ctx: &LabelCtx) -> Result<Label, HoaError> {
        let mut l = self.label_and(ctx)?;
        while self.eat('|') {
            l = Label::Or(Box::new(l), Box::new(self.label_and(ctx)?));
        }
        Ok(l)
    }

    fn label_and(&mut self, ctx: &LabelCtx) -> Result<Label, HoaError> {
        let mut l = self.label_atom(ctx)?;
        while self.eat('&') {
            l = Label::And(Box::new(l), Box::new(self.label_atom(ctx)?));
        }
        Ok(l)
    }

    fn label_atom(&mut self, ctx: &LabelCtx) -> Result<Label, HoaError> {
        match self.peek().clone() {
            Tok::Punct('!') => {
                self.next();
                Ok(Label::Not(Box::new(self.label_atom(ctx)?)))
            }
            Tok::Punct('(') => {
                self.next();
                let l = self.label_or(ctx)?;
                self.expect(')')?;
                Ok(l)
            }
            Tok::Ident(w) if w == "t" || w == "f" => {
                self.next();
                Ok(Label::Const(w == "t"))
            }
            Tok::Int(n) => {
                if n as usize >= ctx.num_aps {
                    return Err(self.error(format!("proposition {n} is not declared")));
                }
                self.next();
                Ok(Label::Ap(n as usize))
            }
            Tok::Alias(a) => {
                let l = ctx.aliases.get(&a).cloned().ok_or_else(|| self.error(format!("undefined alias @{a}")))?;
                self.next();
                Ok(l)
            }
            _ => Err(self.error("expected a label expression")),
        }
    }

    fn cond_or(&mut self) -> Result<Cond, HoaError> {
        let mut c = self.cond_and()?;
        while self.eat('|') {
            c = Cond::Or(Box::new(c), Box::new(self.cond_and()?));
        }
        Ok(c)
    }

    fn cond_and(&mut self) -> Result<Cond, HoaError> {
        let mut c = self.cond_atom()?;
        while self.eat('&') {
            c = Cond::And(Box::new(c), Box::new(self.cond_atom()?));
        }
        Ok(c)
    }

    fn cond_atom(&mut self) -> Result<Cond, HoaError> {
        match self.peek().clone() {
            Tok::Punct('(') => {
                self.next();
                let c = self.cond_or()?;
                self.expect(')')?;
                Ok(c)
            }
            Tok::Ident(w) if w == "t" || w == "f" => {
                self.next();
                Ok(Cond::Const(w == "t"))
            }
            Tok::Ident(w) if w == "Inf" || w == "Fin" => {
                self.next();
                self.expect('(')?;
                if *self.peek() == Tok::Punct('!') {
                    return Err(HoaError::Unsupported("complemented acceptance sets".into()));
                }
                let i = self.index()?;
                self.expect(')')?;
                Ok(if w == "Inf" { Cond::Inf(i) } else { Cond::Fin(i) })
            }
            _ => Err(self.error("expected an acceptance condition")),
        }
    }

    fn acc_sets(&mut self) -> Result<Vec<u32>, HoaError> {
        let mut sets = Vec::new();
        if self.eat('{') {
            while !self.eat('}') {
                sets.push(self.index()?);
            }
        }
        Ok(sets)
    }

    /// Skips the items of an uninterpreted header.
    fn skip_items(&mut self) {
        while !matches!(self.peek(), Tok::Header(_) | Tok::Body | Tok::End) {
            self.next();
        }
    }
}

struct LabelCtx {
    num_aps: usize,
    aliases: HashMap<String, Label>,
}

fn classify(cond: &Cond, acc_name: &[Tok]) -> Result<Kind, HoaError> {
    if let Some(Tok::Ident(name)) = acc_name.first() {
        if name == "parity" {
            let params: Vec<&Tok> = acc_name[1..].iter().collect();
            return match params.as_slice() {
                [Tok::Ident(a), Tok::Ident(b), Tok::Int(n)] if a == "min" && b == "even" => {
                    let n = u32::try_from(*n).map_err(|_| HoaError::Unsupported("too many priorities".into()))?;
                    if *cond != parity_min_even(n) {
                        return Err(HoaError::Unsupported("acceptance formula does not match its parity name".into()));
                    }
                    Ok(Kind::Parity(n))
                }
                _ => Err(HoaError::Unsupported("parity conditions other than min even".into())),
            };
        }
    }
    match cond {
        Cond::Const(true) => return Ok(Kind::All),
        Cond::Const(false) => return Ok(Kind::Rabin(Vec::new())),
        _ => {}
    }
    let conj = cond.conjuncts();
    if conj.iter().all(|c| matches!(c, Cond::Inf(_))) {
        let mut sets = Vec::new();
        for c in conj {
            if let Cond::Inf(i) = c {
                if !sets.contains(i) {
                    sets.push(*i);
                }
            }
        }
        return Ok(Kind::Buchi(sets));
    }
    let mut pairs = Vec::new();
    for d in cond.disjuncts() {
        match d.conjuncts().as_slice() {
            [Cond::Fin(r), Cond::Inf(a)] | [Cond::Inf(a), Cond::Fin(r)] => pairs.push((*r, *a)),
            _ => return Err(HoaError::Unsupported("acceptance condition is not Büchi, Rabin or parity".into())),
        }
    }
    Ok(Kind::Rabin(pairs))
}

/// Parses the first automaton of a HOA v1 document.
pub fn hoa_parse(text: &str) -> Result<HoaAutomaton, HoaError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    match (p.next(), p.next()) {
        (Tok::Header(h), Tok::Ident(v)) if h == "HOA" && v == "v1" => {}
        _ => {
            p.pos = 0;
            return Err(p.error("expected 'HOA: v1'"));
        }
    }
    let mut num_states: Option<usize> = None;
    let mut starts = Vec::new();
    let mut aps: Option<Vec<String>> = None;
    let mut ctx = LabelCtx { num_aps: 0, aliases: HashMap::new() };
    let mut acceptance: Option<(u32, Cond)> = None;
    let mut acc_name = Vec::new();
    loop {
        match p.next() {
            Tok::Body => break,
            Tok::Header(h) => match h.as_str() {
                "States" => num_states = Some(p.int()? as usize),
                "Start" => {
                    starts.push(p.int()? as usize);
                    if *p.peek() == Tok::Punct('&') {
                        return Err(HoaError::Unsupported("universal initial states".into()));
                    }
                }
                "AP" => {
                    let n = p.int()? as usize;
                    let mut names = Vec::with_capacity(n.min(64));
                    while let Tok::Str(s) = p.peek().clone() {
                        p.next();
                        names.push(s);
                    }
                    if names.len() != n {
                        return Err(p.error(format!("AP header declares {n} propositions but names {}", names.len())));
                    }
                    ctx.num_aps = n;
                    aps = Some(names);
                }
                "Alias" => {
                    let Tok::Alias(name) = p.next() else {
                        return Err(p.error("expected an alias name"));
                    };
                    let l = p.label_or(&ctx)?;
                    ctx.aliases.insert(name, l);
                }
                "Acceptance" => {
                    let n = p.index()?;
                    acceptance = Some((n, p.cond_or()?));
                }
                "acc-name" => {
                    let start = p.pos;
                    p.skip_items();
                    acc_name = p.toks[start..p.pos].iter().map(|t| t.tok.clone()).collect();
                }
                _ => p.skip_items(),
            },
            _ => {
                p.pos = p.pos.saturating_sub(1);
                return Err(p.error("expected a header or --BODY--"));
            }
        }
    }
    let alphabet = Alphabet::new(aps.unwrap_or_default())?;
    let (num_sets, cond) = acceptance.ok_or_else(|| p.error("missing Acceptance header"))?;
    let kind = classify(&cond, &acc_name)?;

    let mut edges: Vec<RawEdge> = Vec::new();
    let mut max_state = 0usize;
    let mut seen_states = 0usize;
    loop {
        match p.next() {
            Tok::End => break,
            Tok::Header(h) if h == "State" => {}
            _ => {
                p.pos = p.pos.saturating_sub(1);
                return Err(p.error("expected 'State:' or --END--"));
            }
        }
        let state_label = if p.eat('[') {
            let l = p.label_or(&ctx)?;
            p.expect(']')?;
            Some(l)
        } else {
            None
        };
        let src = p.int()? as usize;
        if num_states.is_some_and(|n| src >= n) {
            return Err(p.error(format!("state {src} is out of range")));
        }
        seen_states += 1;
        max_state = max_state.max(src + 1);
        if let Tok::Str(_) = p.peek() {
            p.next();
        }
        if *p.peek() == Tok::Punct('{') {
            return Err(HoaError::Unsupported("state-based acceptance".into()));
        }
        let mut implicit = 0u64;
        loop {
            let label = if p.eat('[') {
                let l = p.label_or(&ctx)?;
                p.expect(']')?;
                Some(l)
            } else if matches!(p.peek(), Tok::Int(_)) {
                None
            } else {
                break;
            };
            let dst = p.int()? as usize;
            if num_states.is_some_and(|n| dst >= n) {
                return Err(p.error(format!("state {dst} is out of range")));
            }
            if *p.peek() == Tok::Punct('&') {
                return Err(HoaError::Unsupported("universal branching".into()));
            }
            max_state = max_state.max(dst + 1);
            let sets = p.acc_sets()?;
            if let Some(&s) = sets.iter().find(|&&s| s >= num_sets) {
                return Err(p.error(format!("acceptance set {s} is not declared")));
            }
            let symbols: Vec<Symbol> = match label.as_ref().or(state_label.as_ref()) {
                Some(l) => alphabet.symbols().filter(|&s| l.eval(s)).collect(),
                None => {
                    if implicit >= alphabet.num_symbols() as u64 {
                        return Err(p.error("too many implicitly labelled edges"));
                    }
                    implicit += 1;
                    vec![(implicit - 1) as Symbol]
                }
            };
            edges.push(RawEdge { src, symbols, dst, sets });
        }
    }
    let n = num_states.unwrap_or(max_state.max(seen_states));
    build(alphabet, n, &starts, &edges, kind)
}

fn build(alphabet: Alphabet, n: usize, starts: &[usize], edges: &[RawEdge], kind: Kind) -> Result<HoaAutomaton, HoaError> {
    let ngba = |k: usize, marks: &dyn Fn(&[u32]) -> AccSet| -> Result<HoaAutomaton, HoaError> {
        let mut bd = NgbaBuilder::new(alphabet.clone(), n, k);
        for &q in starts {
            bd.add_initial(q);
        }
        for e in edges {
            for &s in &e.symbols {
                bd.add_edge(e.src, s, e.dst, marks(&e.sets));
            }
        }
        Ok(HoaAutomaton::Ngba(bd.build()?))
    };
    let det = |acceptance: Acceptance, acc: &dyn Fn(&[u32]) -> EdgeAcc| -> Result<HoaAutomaton, HoaError> {
        let init = match starts {
            [q] => *q,
            [] => return Err(AutomatonError::NoInitialState.into()),
            _ => return Err(HoaError::Unsupported("several initial states in a deterministic automaton".into())),
        };
        let mut lists: Vec<Vec<DetEdge>> = vec![Vec::new(); n];
        for e in edges {
            for &symbol in &e.symbols {
                lists[e.src].push(DetEdge { symbol, target: e.dst, acc: acc(&e.sets) });
            }
        }
        Ok(HoaAutomaton::Deterministic(DetAutomaton::new(alphabet.clone(), init, lists, acceptance)?))
    };
    match kind {
        Kind::All => ngba(1, &|_| AccSet::single(0)),
        Kind::Buchi(sets) => ngba(sets.len(), &|es| {
            sets.iter().enumerate().filter(|(_, s)| es.contains(s)).fold(AccSet::EMPTY, |m, (i, _)| m.union(AccSet::single(i)))
        }),
        Kind::Rabin(pairs) => det(Acceptance::Rabin { pairs: pairs.len() }, &|es| {
            let pick = |f: fn(&(u32, u32)) -> u32| {
                (0..pairs.len() as u32).filter(|&i| es.contains(&f(&pairs[i as usize]))).collect()
            };
            EdgeAcc::Rabin { acc: pick(|p| p.1), rej: pick(|p| p.0) }
        }),
        Kind::Parity(np) => {
            let uncoloured = edges.iter().any(|e| e.sets.is_empty());
            let priorities = np as u64 + uncoloured as u64;
            det(Acceptance::Parity { priorities }, &|es| {
                EdgeAcc::Parity(es.iter().min().map_or(np as u64, |&p| p as u64))
            })
        }
    }
}

fn cube(sym: Symbol, num_aps: usize) -> String {
    if num_aps == 0 {
        return "t".into();
    }
    (0..num_aps)
        .map(|i| if sym >> i & 1 == 1 { i.to_string() } else { format!("!{i}") })
        .collect::<Vec<_>>()
        .join("&")
}

fn header(out: &mut String, al: &Alphabet, n: usize, starts: impl Iterator<Item = usize>) {
    out.push_str("HOA: v1\n");
    let _ = writeln!(out, "States: {n}");
    for q in starts {
        let _ = writeln!(out, "Start: {q}");
    }
    let _ = write!(out, "AP: {}", al.aps().len());
    for a in al.aps() {
        let _ = write!(out, " \"{}\"", a.replace('\\', "\\\\").replace('"', "\\\""));
    }
    out.push('\n');
}

fn sets_suffix(sets: &[u32]) -> String {
    if sets.is_empty() {
        String::new()
    } else {
        format!(" {{{}}}", sets.iter().map(u32::to_string).collect::<Vec<_>>().join(" "))
    }
}

fn buchi_acceptance(out: &mut String, k: usize) {
    match k {
        0 => out.push_str("acc-name: all\nAcceptance: 0 t\n"),
        1 => out.push_str("acc-name: Buchi\nAcceptance: 1 Inf(0)\n"),
        _ => {
            let conj: Vec<String> = (0..k).map(|i| format!("Inf({i})")).collect();
            let _ = writeln!(out, "acc-name: generalized-Buchi {k}\nAcceptance: {k} {}", conj.join("&"));
        }
    }
}

/// Writes an NGBA with one explicit edge per `(q, σ, q')`. An NGBA without
/// acceptance sets is written with condition `t` and reads back with a
/// single set containing every transition.
pub fn emit_ngba(b: &Ngba) -> String {
    let mut out = String::new();
    header(&mut out, b.alphabet(), b.num_states(), b.initial().iter());
    buchi_acceptance(&mut out, b.num_acc());
    out.push_str("properties: trans-labels explicit-labels trans-acc\n--BODY--\n");
    let n = b.alphabet().aps().len();
    for q in 0..b.num_states() {
        let _ = writeln!(out, "State: {q}");
        for e in b.edges(q) {
            let sets: Vec<u32> = e.marks.iter().map(|i| i as u32).collect();
            let _ = writeln!(out, "[{}] {}{}", cube(e.symbol, n), e.target, sets_suffix(&sets));
        }
    }
    out.push_str("--END--\n");
    out
}

/// Writes a deterministic automaton. Rabin pair `i` uses sets `2i` (finite)
/// and `2i+1` (infinite); parity priorities are written as set indices.
pub fn emit_det(a: &DetAutomaton) -> String {
    let mut out = String::new();
    header(&mut out, a.alphabet(), a.num_states(), std::iter::once(a.initial()));
    match a.acceptance() {
        Acceptance::Buchi { sets } => buchi_acceptance(&mut out, sets),
        Acceptance::Rabin { pairs } => {
            let cond = if pairs == 0 {
                "f".to_string()
            } else {
                (0..pairs).map(|i| format!("(Fin({})&Inf({}))", 2 * i, 2 * i + 1)).collect::<Vec<_>>().join(" | ")
            };
            let _ = writeln!(out, "acc-name: Rabin {pairs}\nAcceptance: {} {cond}", 2 * pairs);
        }
        Acceptance::Parity { priorities } => {
            let _ = writeln!(
                out,
                "acc-name: parity min even {priorities}\nAcceptance: {priorities} {}",
                show_cond(&parity_min_even(priorities as u32))
            );
        }
    }
    out.push_str("properties: trans-labels explicit-labels trans-acc deterministic\n--BODY--\n");
    let n = a.alphabet().aps().len();
    for q in 0..a.num_states() {
        let _ = writeln!(out, "State: {q}");
        for e in a.edges(q) {
            let sets: Vec<u32> = match &e.acc {
                EdgeAcc::Buchi(m) => m.iter().map(|i| i as u32).collect(),
                EdgeAcc::Rabin { acc, rej } => {
                    let mut s: Vec<u32> = rej.iter().map(|i| 2 * i).chain(acc.iter().map(|i| 2 * i + 1)).collect();
                    s.sort_unstable();
                    s
                }
                EdgeAcc::Parity(p) => vec![*p as u32],
            };
            let _ = writeln!(out, "[{}] {}{}", cube(e.symbol, n), e.target, sets_suffix(&sets));
        }
    }
    out.push_str("--END--\n");
    out
}

pub fn hoa_emit(aut: &HoaAutomaton) -> String {
    match aut {
        HoaAutomaton::Ngba(b) => emit_ngba(b),
        HoaAutomaton::Deterministic(a) => emit_det(a),
    }
}

fn show_cond(c: &Cond) -> String {
    match c {
        Cond::Const(b) => if *b { "t" } else { "f" }.into(),
        Cond::Inf(i) => format!("Inf({i})"),
        Cond::Fin(i) => format!("Fin({i})"),
        Cond::And(a, b) => format!("{} & ({})", show_cond(a), show_cond(b)),
        Cond::Or(a, b) => format!("{} | ({})", show_cond(a), show_cond(b)),
    }
}
