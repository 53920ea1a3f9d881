//! Tableau translation from LTL to transition-based NGBAs.
//!
//! A state is a set of NNF obligations. Expanding a state yields terms
//! `(pos, neg, next, postponed)`: literal constraints on the current letter,
//! the successor obligations, and the untils deferred to the next step. A
//! transition is in the acceptance set of an until iff that until is not
//! deferred.

use std::collections::{BTreeSet, HashMap};

use super::{Formula, LtlError};
use crate::automata::{Alphabet, Ngba, NgbaBuilder};
use crate::bits::AccSet;

type Id = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Node {
    True,
    False,
    Lit(usize, bool),
    And(Id, Id),
    Or(Id, Id),
    Next(Id),
    Until(Id, Id),
    Release(Id, Id),
}

#[derive(Default)]
struct Arena {
    nodes: Vec<Node>,
    ids: HashMap<Node, Id>,
    untils: Vec<Id>,
}

impl Arena {
    fn intern(&mut self, n: Node) -> Id {
        if let Some(&i) = self.ids.get(&n) {
            return i;
        }
        let i = self.nodes.len();
        if matches!(n, Node::Until(..)) {
            self.untils.push(i);
        }
        self.nodes.push(n.clone());
        self.ids.insert(n, i);
        i
    }

    fn add(&mut self, f: &Formula, al: &Alphabet) -> Result<Id, LtlError> {
        use Formula::*;
        let n = match f {
            True => Node::True,
            False => Node::False,
            Ap(p) => Node::Lit(al.index_of(p).ok_or_else(|| LtlError::UnknownAp(p.clone()))?, true),
            Not(a) => match &**a {
                Ap(p) => Node::Lit(al.index_of(p).ok_or_else(|| LtlError::UnknownAp(p.clone()))?, false),
                _ => unreachable!("input is in negation normal form"),
            },
            And(a, b) => Node::And(self.add(a, al)?, self.add(b, al)?),
            Or(a, b) => Node::Or(self.add(a, al)?, self.add(b, al)?),
            Next(a) => Node::Next(self.add(a, al)?),
            Until(a, b) => Node::Until(self.add(a, al)?, self.add(b, al)?),
            Release(a, b) => Node::Release(self.add(a, al)?, self.add(b, al)?),
            Finally(_) | Globally(_) => unreachable!("input is in negation normal form"),
        };
        Ok(self.intern(n))
    }

    fn until_index(&self, id: Id) -> usize {
        self.untils.iter().position(|&u| u == id).expect("registered until")
    }
}

#[derive(Debug, Clone, Default)]
struct Term {
    pos: u32,
    neg: u32,
    next: BTreeSet<Id>,
    postponed: u64,
}

fn expand(ar: &Arena, mut todo: Vec<Id>, mut term: Term, out: &mut Vec<Term>) {
    while let Some(f) = todo.pop() {
        match ar.nodes[f] {
            Node::True => {}
            Node::False => return,
            Node::Lit(i, positive) => {
                if positive {
                    term.pos |= 1 << i;
                } else {
                    term.neg |= 1 << i;
                }
                if term.pos & term.neg != 0 {
                    return;
                }
            }
            Node::And(a, b) => todo.extend([a, b]),
            Node::Next(a) => {
                term.next.insert(a);
            }
            Node::Or(a, b) => {
                let mut left = todo.clone();
                left.push(a);
                expand(ar, left, term.clone(), out);
                todo.push(b);
            }
            Node::Until(a, b) => {
                let mut now = todo.clone();
                now.push(b);
                expand(ar, now, term.clone(), out);
                todo.push(a);
                term.next.insert(f);
                term.postponed |= 1 << ar.until_index(f);
            }
            Node::Release(a, b) => {
                let mut both = todo.clone();
                both.extend([a, b]);
                expand(ar, both, term.clone(), out);
                todo.push(b);
                term.next.insert(f);
            }
        }
    }
    out.push(term);
}

/// Translates `φ` over the alphabet of its own propositions.
pub fn translate_ltl(phi: &Formula) -> Result<Ngba, LtlError> {
    let al = Alphabet::new(phi.aps()).map_err(|_| LtlError::TooManyAps)?;
    translate_with_alphabet(phi, &al)
}

/// Translates `φ` to an NGBA over `al`. The result has one acceptance set per
/// until subformula of the negation normal form (`F` counts as an until), or
/// a single all-accepting set if there is none.
pub fn translate_with_alphabet(phi: &Formula, al: &Alphabet) -> Result<Ngba, LtlError> {
    let mut ar = Arena::default();
    let root = ar.add(&phi.to_nnf(), al)?;
    let k = ar.untils.len().max(1);
    let all = AccSet::all(k);
    let truth = ar.intern(Node::True);
    let start: BTreeSet<Id> = [root].into_iter().filter(|&f| f != truth).collect();
    let mut states = vec![start.clone()];
    let mut index = HashMap::from([(start, 0usize)]);
    let mut edges = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let mut terms = Vec::new();
        expand(&ar, states[i].iter().copied().collect(), Term::default(), &mut terms);
        let mut merged: HashMap<(u32, u32, BTreeSet<Id>), AccSet> = HashMap::new();
        for mut t in terms {
            t.next.remove(&truth);
            let marks = AccSet(all.0 & !t.postponed);
            let slot = merged.entry((t.pos, t.neg, t.next)).or_insert(AccSet::EMPTY);
            *slot = slot.union(marks);
        }
        let mut merged: Vec<_> = merged.into_iter().collect();
        merged.sort_by(|a, b| a.0.cmp(&b.0));
        for ((pos, neg, next), marks) in merged {
            let target = *index.entry(next.clone()).or_insert_with(|| {
                states.push(next);
                states.len() - 1
            });
            edges.push((i, pos, neg, target, marks));
        }
        i += 1;
    }
    let mut bd = NgbaBuilder::new(al.clone(), states.len(), k);
    bd.add_initial(0);
    for (src, pos, neg, dst, marks) in edges {
        for sym in al.symbols().filter(|s| s & pos == pos && s & neg == 0) {
            bd.add_edge(src, sym, dst, marks);
        }
    }
    Ok(bd.build().expect("tableau automaton is well formed"))
}
