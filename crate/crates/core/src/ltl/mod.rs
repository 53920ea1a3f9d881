//! LTL formulas: parsing, printing, negation normal form and evaluation on
//! lasso words.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! or     := and ('|' and)*
//! and    := until ('&' until)*
//! until  := unary (('U' | 'R') until)?
//! unary  := ('!' | 'X' | 'F' | 'G') unary | atom
//! atom   := 'true' | 'false' | ident | '(' or ')'
//! ident  := [a-z_][a-z0-9_]*
//! ```
//!
//! The uppercase letters `X U R F G` are always operators, so `GFa` reads as
//! `G F a`.

mod translate;

use std::fmt;

use thiserror::Error;

use crate::automata::{Alphabet, LassoWord};

pub use translate::{translate_ltl, translate_with_alphabet};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Ap(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Release(Box<Formula>, Box<Formula>),
    Finally(Box<Formula>),
    Globally(Box<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LtlError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("formula uses proposition {0:?} outside the alphabet")]
    UnknownAp(String),
    #[error("formula uses more than 16 propositions")]
    TooManyAps,
}

impl Formula {
    pub fn negated(self) -> Formula {
        Formula::Not(Box::new(self))
    }

    /// Number of operators and atoms.
    pub fn size(&self) -> usize {
        use Formula::*;
        match self {
            True | False | Ap(_) => 1,
            Not(a) | Next(a) | Finally(a) | Globally(a) => 1 + a.size(),
            And(a, b) | Or(a, b) | Until(a, b) | Release(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Propositions in order of first occurrence.
    pub fn aps(&self) -> Vec<String> {
        fn go(f: &Formula, out: &mut Vec<String>) {
            use Formula::*;
            match f {
                True | False => {}
                Ap(p) => {
                    if !out.contains(p) {
                        out.push(p.clone());
                    }
                }
                Not(a) | Next(a) | Finally(a) | Globally(a) => go(a, out),
                And(a, b) | Or(a, b) | Until(a, b) | Release(a, b) => {
                    go(a, out);
                    go(b, out);
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    /// Negation normal form over `true, false, p, !p, &, |, X, U, R`, with
    /// `F ψ = true U ψ` and `G ψ = false R ψ`.
    pub fn to_nnf(&self) -> Formula {
        nnf(self, false)
    }

    pub fn is_nnf(&self) -> bool {
        use Formula::*;
        match self {
            True | False | Ap(_) => true,
            Not(a) => matches!(**a, Ap(_)),
            Next(a) => a.is_nnf(),
            And(a, b) | Or(a, b) | Until(a, b) | Release(a, b) => a.is_nnf() && b.is_nnf(),
            Finally(_) | Globally(_) => false,
        }
    }
}

fn nnf(f: &Formula, neg: bool) -> Formula {
    use Formula::*;
    let bx = |g: Formula| Box::new(g);
    match (f, neg) {
        (True, false) | (False, true) => True,
        (True, true) | (False, false) => False,
        (Ap(p), false) => Ap(p.clone()),
        (Ap(p), true) => Not(bx(Ap(p.clone()))),
        (Not(a), _) => nnf(a, !neg),
        (Next(a), _) => Next(bx(nnf(a, neg))),
        (And(a, b), false) | (Or(a, b), true) => And(bx(nnf(a, neg)), bx(nnf(b, neg))),
        (Or(a, b), false) | (And(a, b), true) => Or(bx(nnf(a, neg)), bx(nnf(b, neg))),
        (Until(a, b), false) | (Release(a, b), true) => Until(bx(nnf(a, neg)), bx(nnf(b, neg))),
        (Release(a, b), false) | (Until(a, b), true) => Release(bx(nnf(a, neg)), bx(nnf(b, neg))),
        (Finally(a), false) | (Globally(a), true) => Until(bx(True), bx(nnf(a, neg))),
        (Globally(a), false) | (Finally(a), true) => Release(bx(False), bx(nnf(a, neg))),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Formula::*;
        match self {
            True => write!(f, "true"),
            False => write!(f, "false"),
            Ap(p) => write!(f, "{p}"),
            Not(a) => write!(f, "!{a}"),
            Next(a) => write!(f, "X {a}"),
            Finally(a) => write!(f, "F {a}"),
            Globally(a) => write!(f, "G {a}"),
            And(a, b) => write!(f, "({a} & {b})"),
            Or(a, b) => write!(f, "({a} | {b})"),
            Until(a, b) => write!(f, "({a} U {b})"),
            Release(a, b) => write!(f, "({a} R {b})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Op(char),
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, LtlError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        i += 1;
        let tok = match c {
            c if c.is_whitespace() => continue,
            '!' => Tok::Not,
            '&' => Tok::And,
            '|' => Tok::Or,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            'X' | 'U' | 'R' | 'F' | 'G' => Tok::Op(c),
            c if c.is_ascii_lowercase() || c == '_' => {
                let mut word = c.to_string();
                while i < chars.len() && (chars[i].1.is_ascii_lowercase() || chars[i].1.is_ascii_digit() || chars[i].1 == '_') {
                    word.push(chars[i].1);
                    i += 1;
                }
                match word.as_str() {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    _ => Tok::Ident(word),
                }
            }
            other => return Err(LtlError::Syntax { pos, msg: format!("unexpected character {other:?}") }),
        };
        out.push((pos, tok));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.1)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |t| t.0)
    }

    fn error<T>(&self, msg: &str) -> Result<T, LtlError> {
        let found = match self.peek() {
            None => "end of input".to_string(),
            Some(t) => format!("{t:?}"),
        };
        Err(LtlError::Syntax { pos: self.pos(), msg: format!("{msg}, found {found}") })
    }

    fn or(&mut self) -> Result<Formula, LtlError> {
        let mut f = self.and()?;
        while self.peek() == Some(&Tok::Or) {
            self.at += 1;
            f = Formula::Or(Box::new(f), Box::new(self.and()?));
        }
        Ok(f)
    }

    fn and(&mut self) -> Result<Formula, LtlError> {
        let mut f = self.until()?;
        while self.peek() == Some(&Tok::And) {
            self.at += 1;
            f = Formula::And(Box::new(f), Box::new(self.until()?));
        }
        Ok(f)
    }

    fn until(&mut self) -> Result<Formula, LtlError> {
        let f = self.unary()?;
        match self.peek() {
            Some(Tok::Op('U')) => {
                self.at += 1;
                Ok(Formula::Until(Box::new(f), Box::new(self.until()?)))
            }
            Some(Tok::Op('R')) => {
                self.at += 1;
                Ok(Formula::Release(Box::new(f), Box::new(self.until()?)))
            }
            _ => Ok(f),
        }
    }

    fn unary(&mut self) -> Result<Formula, LtlError> {
        let wrap: fn(Box<Formula>) -> Formula = match self.peek() {
            Some(Tok::Not) => Formula::Not,
            Some(Tok::Op('X')) => Formula::Next,
            Some(Tok::Op('F')) => Formula::Finally,
            Some(Tok::Op('G')) => Formula::Globally,
            _ => return self.atom(),
        };
        self.at += 1;
        Ok(wrap(Box::new(self.unary()?)))
    }

    fn atom(&mut self) -> Result<Formula, LtlError> {
        let f = match self.peek() {
            Some(Tok::True) => Formula::True,
            Some(Tok::False) => Formula::False,
            Some(Tok::Ident(p)) => Formula::Ap(p.clone()),
            Some(Tok::LParen) => {
                self.at += 1;
                let f = self.or()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.error("expected ')'");
                }
                f
            }
            _ => return self.error("expected a formula"),
        };
        self.at += 1;
        Ok(f)
    }
}

pub fn parse_ltl(text: &str) -> Result<Formula, LtlError> {
    let mut p = Parser { toks: lex(text)?, at: 0, end: text.len() };
    let f = p.or()?;
    if p.at < p.toks.len() {
        return p.error("expected end of input");
    }
    Ok(f)
}

/// Evaluates `φ` on `u·v^ω` by fixpoint iteration over the lasso positions.
/// Propositions outside `alphabet` are false everywhere.
pub fn eval_ltl_on_lasso(phi: &Formula, alphabet: &Alphabet, w: &LassoWord) -> bool {
    eval(phi, alphabet, w)[0]
}

fn eval(phi: &Formula, al: &Alphabet, w: &LassoWord) -> Vec<bool> {
    use Formula::*;
    let n = w.positions();
    let next = |v: &[bool]| (0..n).map(|i| v[w.next_position(i)]).collect::<Vec<bool>>();
    match phi {
        True => vec![true; n],
        False => vec![false; n],
        Ap(p) => match al.index_of(p) {
            Some(i) => (0..n).map(|pos| w.symbol_at(pos) >> i & 1 == 1).collect(),
            None => vec![false; n],
        },
        Not(a) => eval(a, al, w).into_iter().map(|x| !x).collect(),
        And(a, b) => eval(a, al, w).into_iter().zip(eval(b, al, w)).map(|(x, y)| x && y).collect(),
        Or(a, b) => eval(a, al, w).into_iter().zip(eval(b, al, w)).map(|(x, y)| x || y).collect(),
        Next(a) => next(&eval(a, al, w)),
        Finally(a) => eval(&Until(Box::new(True), a.clone()), al, w),
        Globally(a) => eval(&Release(Box::new(False), a.clone()), al, w),
        Until(a, b) | Release(a, b) => {
            let until = matches!(phi, Until(..));
            let (va, vb) = (eval(a, al, w), eval(b, al, w));
            let mut cur = vec![!until; n];
            loop {
                let x = next(&cur);
                let upd: Vec<bool> = (0..n)
                    .map(|i| if until { vb[i] || (va[i] && x[i]) } else { vb[i] && (va[i] || x[i]) })
                    .collect();
                if upd == cur {
                    return cur;
                }
                cur = upd;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use proptest::prelude::*;

    fn ap(p: &str) -> Box<Formula> {
        Box::new(Formula::Ap(p.into()))
    }

    #[test]
    fn parses_canonical_forms() {
        assert_eq!(parse_ltl("G F a").unwrap(), Formula::Globally(Box::new(Formula::Finally(ap("a")))));
        assert_eq!(parse_ltl("GFa").unwrap(), parse_ltl("G F a").unwrap());
        assert_eq!(
            parse_ltl("a U (b U c)").unwrap(),
            Formula::Until(ap("a"), Box::new(Formula::Until(ap("b"), ap("c"))))
        );
        assert_eq!(parse_ltl("a U b U c").unwrap(), parse_ltl("a U (b U c)").unwrap());
        assert_eq!(
            parse_ltl("a | b & !c").unwrap(),
            Formula::Or(ap("a"), Box::new(Formula::And(ap("b"), Box::new(Formula::Not(ap("c"))))))
        );
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_ltl("a UU b"), Err(LtlError::Syntax { pos: 3, .. })));
        assert!(matches!(parse_ltl("(a"), Err(LtlError::Syntax { pos: 2, .. })));
        assert!(matches!(parse_ltl("a b"), Err(LtlError::Syntax { .. })));
        assert!(matches!(parse_ltl("A"), Err(LtlError::Syntax { pos: 0, .. })));
        assert!(parse_ltl("").is_err());
    }

    #[test]
    fn evaluation_examples() {
        let al = Alphabet::new(["a", "b"]).unwrap();
        let (a, b) = (1, 2);
        let eval = |f: &str, u: Vec<u32>, v: Vec<u32>| eval_ltl_on_lasso(&parse_ltl(f).unwrap(), &al, &LassoWord::new(u, v));
        assert!(eval("G a", vec![], vec![a]));
        assert!(eval("F b", vec![a, a, a, a, a, b], vec![a]));
        assert!(eval("X a", vec![b], vec![a]));
        assert!(!eval("G F b", vec![b], vec![a]));
        assert!(eval("a U b", vec![a, a, b], vec![0]));
        assert!(!eval("a U b", vec![], vec![a]));
        assert!(eval("false R a", vec![], vec![a | b]));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn printing_is_a_fixpoint(seed in any::<u64>()) {
            let mut rng = gen::rng(seed);
            let al = gen::alphabet(3);
            let f = gen::random_ltl(&mut rng, 9, &al);
            let once = parse_ltl(&f.to_string()).unwrap();
            prop_assert_eq!(&once, &f);
            prop_assert_eq!(once.to_string(), f.to_string());
        }

        #[test]
        fn nnf_preserves_semantics(seed in any::<u64>()) {
            let mut rng = gen::rng(seed);
            let al = gen::alphabet(2);
            let f = gen::random_ltl(&mut rng, 8, &al);
            let g = f.to_nnf();
            prop_assert!(g.is_nnf());
            for _ in 0..20 {
                let w = gen::random_lasso(&mut rng, &al, 4, 4);
                prop_assert_eq!(eval_ltl_on_lasso(&f, &al, &w), eval_ltl_on_lasso(&g, &al, &w));
                prop_assert_ne!(eval_ltl_on_lasso(&f, &al, &w), eval_ltl_on_lasso(&f.clone().negated(), &al, &w));
            }
        }
    }
}
