//! LTL formulas and their translation to Büchi automata.
//!
//! The construction is the classic on-the-fly tableau: a generalized Büchi
//! automaton with one acceptance set per until-subformula, degeneralized by
//! a round-robin counter. Automata are state-labelled: a state carries the
//! literals the current letter must satisfy.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Ltl<A> {
    True,
    False,
    Atom(A),
    Not(Box<Ltl<A>>),
    And(Box<Ltl<A>>, Box<Ltl<A>>),
    Or(Box<Ltl<A>>, Box<Ltl<A>>),
    Implies(Box<Ltl<A>>, Box<Ltl<A>>),
    Next(Box<Ltl<A>>),
    Until(Box<Ltl<A>>, Box<Ltl<A>>),
    Release(Box<Ltl<A>>, Box<Ltl<A>>),
    Globally(Box<Ltl<A>>),
    Finally(Box<Ltl<A>>),
}

impl<A> Ltl<A> {
    pub fn atom(a: A) -> Self {
        Ltl::Atom(a)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Ltl<A>) -> Self {
        Ltl::Not(Box::new(a))
    }

    pub fn and(a: Ltl<A>, b: Ltl<A>) -> Self {
        Ltl::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Ltl<A>, b: Ltl<A>) -> Self {
        Ltl::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Ltl<A>, b: Ltl<A>) -> Self {
        Ltl::Implies(Box::new(a), Box::new(b))
    }

    pub fn next(a: Ltl<A>) -> Self {
        Ltl::Next(Box::new(a))
    }

    pub fn until(a: Ltl<A>, b: Ltl<A>) -> Self {
        Ltl::Until(Box::new(a), Box::new(b))
    }

    pub fn release(a: Ltl<A>, b: Ltl<A>) -> Self {
        Ltl::Release(Box::new(a), Box::new(b))
    }

    pub fn globally(a: Ltl<A>) -> Self {
        Ltl::Globally(Box::new(a))
    }

    pub fn finally(a: Ltl<A>) -> Self {
        Ltl::Finally(Box::new(a))
    }

    /// Atom occurrences in left-to-right order.
    pub fn atoms(&self) -> Vec<&A> {
        let mut out = Vec::new();
        self.visit_atoms(&mut |a| out.push(a));
        out
    }

    fn visit_atoms<'a>(&'a self, f: &mut impl FnMut(&'a A)) {
        match self {
            Ltl::True | Ltl::False => {}
            Ltl::Atom(a) => f(a),
            Ltl::Not(x) | Ltl::Next(x) | Ltl::Globally(x) | Ltl::Finally(x) => x.visit_atoms(f),
            Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::Implies(a, b) | Ltl::Until(a, b) | Ltl::Release(a, b) => {
                a.visit_atoms(f);
                b.visit_atoms(f);
            }
        }
    }

    pub fn map_atoms<B>(&self, f: &mut impl FnMut(&A) -> B) -> Ltl<B> {
        self.map_dyn(f)
    }

    fn map_dyn<B>(&self, f: &mut dyn FnMut(&A) -> B) -> Ltl<B> {
        match self {
            Ltl::True => Ltl::True,
            Ltl::False => Ltl::False,
            Ltl::Atom(a) => Ltl::Atom(f(a)),
            Ltl::Not(x) => Ltl::Not(Box::new(x.map_dyn(f))),
            Ltl::Next(x) => Ltl::Next(Box::new(x.map_dyn(f))),
            Ltl::Globally(x) => Ltl::Globally(Box::new(x.map_dyn(f))),
            Ltl::Finally(x) => Ltl::Finally(Box::new(x.map_dyn(f))),
            Ltl::And(x, y) => Ltl::And(Box::new(x.map_dyn(f)), Box::new(y.map_dyn(f))),
            Ltl::Or(x, y) => Ltl::Or(Box::new(x.map_dyn(f)), Box::new(y.map_dyn(f))),
            Ltl::Implies(x, y) => Ltl::Implies(Box::new(x.map_dyn(f)), Box::new(y.map_dyn(f))),
            Ltl::Until(x, y) => Ltl::Until(Box::new(x.map_dyn(f)), Box::new(y.map_dyn(f))),
            Ltl::Release(x, y) => Ltl::Release(Box::new(x.map_dyn(f)), Box::new(y.map_dyn(f))),
        }
    }

    /// Number of nodes in the syntax tree.
    pub fn size(&self) -> usize {
        match self {
            Ltl::True | Ltl::False | Ltl::Atom(_) => 1,
            Ltl::Not(x) | Ltl::Next(x) | Ltl::Globally(x) | Ltl::Finally(x) => 1 + x.size(),
            Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::Implies(a, b) | Ltl::Until(a, b) | Ltl::Release(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }
}

impl<A: fmt::Display> fmt::Display for Ltl<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn paren<A: fmt::Display>(x: &Ltl<A>, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match x {
                Ltl::True | Ltl::False | Ltl::Atom(_) => write!(f, "{x}"),
                _ => write!(f, "({x})"),
            }
        }
        let bin = |f: &mut fmt::Formatter<'_>, a: &Ltl<A>, op: &str, b: &Ltl<A>| {
            paren(a, f)?;
            write!(f, " {op} ")?;
            paren(b, f)
        };
        match self {
            Ltl::True => f.write_str("true"),
            Ltl::False => f.write_str("false"),
            Ltl::Atom(a) => write!(f, "{a}"),
            Ltl::Not(x) => {
                f.write_str("!")?;
                paren(x, f)
            }
            Ltl::Next(x) => {
                f.write_str("X ")?;
                paren(x, f)
            }
            Ltl::Globally(x) => {
                f.write_str("G ")?;
                paren(x, f)
            }
            Ltl::Finally(x) => {
                f.write_str("F ")?;
                paren(x, f)
            }
            Ltl::And(a, b) => bin(f, a, "&&", b),
            Ltl::Or(a, b) => bin(f, a, "||", b),
            Ltl::Implies(a, b) => bin(f, a, "->", b),
            Ltl::Until(a, b) => bin(f, a, "U", b),
            Ltl::Release(a, b) => bin(f, a, "V", b),
        }
    }
}

/// Negation normal form. Negation is pushed onto atoms; `->`, `G` and `F`
/// are expanded into `||`, `R` and `U`.
pub fn ltl_nnf<A: Clone>(f: &Ltl<A>) -> Ltl<A> {
    fn go<A: Clone>(f: &Ltl<A>, neg: bool) -> Ltl<A> {
        match (f, neg) {
            (Ltl::True, false) | (Ltl::False, true) => Ltl::True,
            (Ltl::True, true) | (Ltl::False, false) => Ltl::False,
            (Ltl::Atom(a), false) => Ltl::Atom(a.clone()),
            (Ltl::Atom(a), true) => Ltl::not(Ltl::Atom(a.clone())),
            (Ltl::Not(x), _) => go(x, !neg),
            (Ltl::And(a, b), false) | (Ltl::Or(a, b), true) => Ltl::and(go(a, neg), go(b, neg)),
            (Ltl::Or(a, b), false) | (Ltl::And(a, b), true) => Ltl::or(go(a, neg), go(b, neg)),
            (Ltl::Implies(a, b), false) => Ltl::or(go(a, true), go(b, false)),
            (Ltl::Implies(a, b), true) => Ltl::and(go(a, false), go(b, true)),
            (Ltl::Next(x), _) => Ltl::next(go(x, neg)),
            (Ltl::Until(a, b), false) | (Ltl::Release(a, b), true) => Ltl::until(go(a, neg), go(b, neg)),
            (Ltl::Release(a, b), false) | (Ltl::Until(a, b), true) => Ltl::release(go(a, neg), go(b, neg)),
            (Ltl::Globally(x), false) | (Ltl::Finally(x), true) => Ltl::release(Ltl::False, go(x, neg)),
            (Ltl::Finally(x), false) | (Ltl::Globally(x), true) => Ltl::until(Ltl::True, go(x, neg)),
        }
    }
    go(f, false)
}

/// Evaluates `f` at position 0 of the ultimately periodic word
/// `prefix · cycle^ω`, where `holds(letter, atom)` interprets atoms.
/// This is the direct semantics used by replay and by the tests.
pub fn eval_lasso<A, L>(f: &Ltl<A>, prefix: &[L], cycle: &[L], holds: &impl Fn(&L, &A) -> bool) -> bool {
    assert!(!cycle.is_empty(), "lasso cycle must be non-empty");
    let word: Vec<&L> = prefix.iter().chain(cycle.iter()).collect();
    let g = desugar_gf(f);
    lasso_table(&g, &word, prefix.len(), holds)[0]
}

fn lasso_table<A, L>(f: &Ltl<&A>, word: &[&L], loop_start: usize, holds: &impl Fn(&L, &A) -> bool) -> Vec<bool> {
    let n = word.len();
    let rec = |g: &Ltl<&A>| lasso_table(g, word, loop_start, holds);
    let zip = |a: Vec<bool>, b: Vec<bool>, op: fn(bool, bool) -> bool| -> Vec<bool> {
        a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
    };
    match f {
        Ltl::True => vec![true; n],
        Ltl::False => vec![false; n],
        Ltl::Atom(a) => word.iter().map(|l| holds(l, a)).collect(),
        Ltl::Not(x) => rec(x).into_iter().map(|b| !b).collect(),
        Ltl::And(a, b) => zip(rec(a), rec(b), |x, y| x && y),
        Ltl::Or(a, b) => zip(rec(a), rec(b), |x, y| x || y),
        Ltl::Implies(a, b) => zip(rec(a), rec(b), |x, y| !x || y),
        Ltl::Next(x) => {
            let t = rec(x);
            (0..n).map(|i| if i + 1 < n { t[i + 1] } else { t[loop_start] }).collect()
        }
        Ltl::Until(a, b) => until_table(&rec(a), &rec(b), loop_start),
        Ltl::Release(a, b) => {
            let na: Vec<bool> = rec(a).into_iter().map(|x| !x).collect();
            let nb: Vec<bool> = rec(b).into_iter().map(|x| !x).collect();
            until_table(&na, &nb, loop_start).into_iter().map(|x| !x).collect()
        }
        Ltl::Globally(_) | Ltl::Finally(_) => unreachable!("removed by desugar_gf"),
    }
}

/// Least solution of `u = b || (a && X u)` on a lasso. Two backward sweeps
/// suffice: the first fixes the loop entry, the second the rest of the loop.
fn until_table(a: &[bool], b: &[bool], loop_start: usize) -> Vec<bool> {
    let n = a.len();
    let mut u = vec![false; n];
    for _ in 0..2 {
        for i in (0..n).rev() {
            let next = if i + 1 < n { u[i + 1] } else { u[loop_start] };
            u[i] = b[i] || (a[i] && next);
        }
    }
    u
}

/// Rewrites `G x` to `false R x` and `F x` to `true U x`, borrowing atoms.
fn desugar_gf<A>(f: &Ltl<A>) -> Ltl<&A> {
    fn b<A>(x: &Ltl<A>) -> Box<Ltl<&A>> {
        Box::new(desugar_gf(x))
    }
    match f {
        Ltl::True => Ltl::True,
        Ltl::False => Ltl::False,
        Ltl::Atom(a) => Ltl::Atom(a),
        Ltl::Not(x) => Ltl::Not(b(x)),
        Ltl::Next(x) => Ltl::Next(b(x)),
        Ltl::Globally(x) => Ltl::Release(Box::new(Ltl::False), b(x)),
        Ltl::Finally(x) => Ltl::Until(Box::new(Ltl::True), b(x)),
        Ltl::And(x, y) => Ltl::And(b(x), b(y)),
        Ltl::Or(x, y) => Ltl::Or(b(x), b(y)),
        Ltl::Implies(x, y) => Ltl::Implies(b(x), b(y)),
        Ltl::Until(x, y) => Ltl::Until(b(x), b(y)),
        Ltl::Release(x, y) => Ltl::Release(b(x), b(y)),
    }
}

// ---------------------------------------------------------------------------
// Automaton

/// Conjunction of atom literals over atom indices `0..64`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Label {
    pub pos: u64,
    pub neg: u64,
}

impl Label {
    /// Whether a letter, given as the bitmask of true atoms, satisfies the label.
    #[inline]
    pub fn matches(&self, letter: u64) -> bool {
        letter & self.pos == self.pos && letter & self.neg == 0
    }

    pub fn is_satisfiable(&self) -> bool {
        self.pos & self.neg == 0
    }
}

/// State-labelled Büchi automaton over letters in `2^atoms`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuchiAutomaton {
    /// Number of atoms; atom `i` is bit `i` of a letter.
    pub num_atoms: usize,
    pub labels: Vec<Label>,
    pub initial: Vec<usize>,
    pub accepting: Vec<bool>,
    pub successors: Vec<Vec<usize>>,
}

impl BuchiAutomaton {
    pub fn num_states(&self) -> usize {
        self.labels.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.successors.iter().map(Vec::len).sum()
    }

    /// Acceptance of the word `prefix · cycle^ω` by search in the product
    /// of the automaton with the word's lasso graph.
    pub fn accepts_lasso(&self, prefix: &[u64], cycle: &[u64]) -> bool {
        assert!(!cycle.is_empty(), "lasso cycle must be non-empty");
        let word: Vec<u64> = prefix.iter().chain(cycle.iter()).copied().collect();
        let n = word.len();
        let next_pos = |i: usize| if i + 1 < n { i + 1 } else { prefix.len() };
        let q = self.num_states();
        let id = |pos: usize, s: usize| pos * q + s;
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n * q];
        let mut reach = vec![false; n * q];
        let mut queue = VecDeque::new();
        for &s in &self.initial {
            if self.labels[s].matches(word[0]) && !reach[id(0, s)] {
                reach[id(0, s)] = true;
                queue.push_back((0, s));
            }
        }
        while let Some((pos, s)) = queue.pop_front() {
            let np = next_pos(pos);
            for &t in &self.successors[s] {
                if self.labels[t].matches(word[np]) {
                    adj[id(pos, s)].push(id(np, t));
                    if !reach[id(np, t)] {
                        reach[id(np, t)] = true;
                        queue.push_back((np, t));
                    }
                }
            }
        }
        let accepting: Vec<bool> = (0..n * q).map(|v| reach[v] && self.accepting[v % q]).collect();
        has_accepting_cycle(&adj, &accepting)
    }
}

/// Whether some non-trivial strongly connected component contains an
/// accepting vertex. Only vertices with out-edges are relevant.
pub(crate) fn has_accepting_cycle(adj: &[Vec<usize>], accepting: &[bool]) -> bool {
    crate::model::strongly_connected(adj).iter().any(|vs| {
        let nontrivial = vs.len() > 1 || adj[vs[0]].contains(&vs[0]);
        nontrivial && vs.iter().any(|&v| accepting[v])
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Node {
    True,
    False,
    Lit(usize, bool),
    And(usize, usize),
    Or(usize, usize),
    Next(usize),
    Until(usize, usize),
    Release(usize, usize),
}

/// Hash-consed subformula table of an NNF formula.
struct Closure {
    nodes: Vec<Node>,
    index: HashMap<Node, usize>,
}

impl Closure {
    fn intern(&mut self, n: Node) -> usize {
        if let Some(&i) = self.index.get(&n) {
            return i;
        }
        self.nodes.push(n);
        self.index.insert(n, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    fn build(&mut self, f: &Ltl<usize>) -> usize {
        let n = match f {
            Ltl::True => Node::True,
            Ltl::False => Node::False,
            Ltl::Atom(a) => Node::Lit(*a, true),
            Ltl::Not(x) => match &**x {
                Ltl::Atom(a) => Node::Lit(*a, false),
                _ => panic!("formula is not in negation normal form"),
            },
            Ltl::And(a, b) => Node::And(self.build(a), self.build(b)),
            Ltl::Or(a, b) => Node::Or(self.build(a), self.build(b)),
            Ltl::Next(x) => Node::Next(self.build(x)),
            Ltl::Until(a, b) => Node::Until(self.build(a), self.build(b)),
            Ltl::Release(a, b) => Node::Release(self.build(a), self.build(b)),
            Ltl::Implies(..) | Ltl::Globally(_) | Ltl::Finally(_) => {
                panic!("formula is not in negation normal form")
            }
        };
        self.intern(n)
    }
}

struct TableauNode {
    incoming: BTreeSet<usize>,
    old: BTreeSet<usize>,
    next: BTreeSet<usize>,
}

const INIT: usize = usize::MAX;

/// Translates an NNF formula over atom indices into a Büchi automaton that
/// accepts exactly its models.
///
/// # Panics
/// If `f` is not in negation normal form or uses an atom index ≥ 64.
pub fn ltl_to_buchi(f: &Ltl<usize>) -> BuchiAutomaton {
    let num_atoms = f.atoms().into_iter().copied().max().map_or(0, |m| m + 1);
    assert!(num_atoms <= 64, "at most 64 atoms are supported");
    let mut cl = Closure { nodes: Vec::new(), index: HashMap::new() };
    let root = cl.build(f);

    let mut states: Vec<TableauNode> = Vec::new();
    // (incoming, new, old, next) of nodes still being expanded.
    type Pending = (BTreeSet<usize>, BTreeSet<usize>, BTreeSet<usize>, BTreeSet<usize>);
    let mut work: Vec<Pending> = vec![([INIT].into(), [root].into(), BTreeSet::new(), BTreeSet::new())];
    while let Some((incoming, mut new, mut old, mut next)) = work.pop() {
        let Some(&eta) = new.iter().next() else {
            if let Some(s) = states.iter_mut().find(|s| s.old == old && s.next == next) {
                s.incoming.extend(incoming);
            } else {
                let id = states.len();
                states.push(TableauNode { incoming, old, next: next.clone() });
                work.push(([id].into(), next, BTreeSet::new(), BTreeSet::new()));
            }
            continue;
        };
        new.remove(&eta);
        let add_new = |new: &mut BTreeSet<usize>, old: &BTreeSet<usize>, xs: &[usize]| {
            for &x in xs {
                if !old.contains(&x) {
                    new.insert(x);
                }
            }
        };
        match cl.nodes[eta] {
            Node::True => work.push((incoming, new, old, next)),
            Node::False => {}
            Node::Lit(a, pol) => {
                let contra = cl.index.get(&Node::Lit(a, !pol)).is_some_and(|c| old.contains(c));
                if !contra {
                    old.insert(eta);
                    work.push((incoming, new, old, next));
                }
            }
            Node::And(a, b) => {
                add_new(&mut new, &old, &[a, b]);
                old.insert(eta);
                work.push((incoming, new, old, next));
            }
            Node::Next(a) => {
                old.insert(eta);
                next.insert(a);
                work.push((incoming, new, old, next));
            }
            Node::Or(a, b) | Node::Until(a, b) | Node::Release(a, b) => {
                let (first, first_next, second): (Vec<usize>, bool, Vec<usize>) = match cl.nodes[eta] {
                    Node::Or(..) => (vec![a], false, vec![b]),
                    Node::Until(..) => (vec![a], true, vec![b]),
                    _ => (vec![b], true, vec![a, b]),
                };
                old.insert(eta);
                let (mut new1, mut next1) = (new.clone(), next.clone());
                add_new(&mut new1, &old, &first);
                if first_next {
                    next1.insert(eta);
                }
                let mut new2 = new;
                add_new(&mut new2, &old, &second);
                // Pushed in reverse so the first branch is expanded first.
                work.push((incoming.clone(), new2, old.clone(), next));
                work.push((incoming, new1, old, next1));
            }
        }
    }

    let untils: Vec<usize> = (0..cl.nodes.len()).filter(|&i| matches!(cl.nodes[i], Node::Until(..))).collect();
    let in_acc = |set: usize, s: &TableauNode| {
        let Node::Until(_, b) = cl.nodes[untils[set]] else { unreachable!() };
        !s.old.contains(&untils[set]) || s.old.contains(&b)
    };
    let labels: Vec<Label> = states
        .iter()
        .map(|s| {
            let mut l = Label::default();
            for &x in &s.old {
                if let Node::Lit(a, pol) = cl.nodes[x] {
                    if pol {
                        l.pos |= 1 << a;
                    } else {
                        l.neg |= 1 << a;
                    }
                }
            }
            l
        })
        .collect();
    let mut gsucc: Vec<Vec<usize>> = vec![Vec::new(); states.len()];
    for (t, s) in states.iter().enumerate() {
        for &p in &s.incoming {
            if p != INIT {
                gsucc[p].push(t);
            }
        }
    }
    let ginit: Vec<usize> = (0..states.len()).filter(|&i| states[i].incoming.contains(&INIT)).collect();

    // Degeneralize: copy `i` waits for acceptance set `i`.
    let k = untils.len().max(1);
    let acc_of = |i: usize, s: usize| untils.is_empty() || in_acc(i, &states[s]);
    let mut ids: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut order: Vec<(usize, usize)> = Vec::new();
    let mut queue: VecDeque<(usize, usize)> = VecDeque::new();
    let mut get = |key: (usize, usize), order: &mut Vec<(usize, usize)>, queue: &mut VecDeque<(usize, usize)>| {
        *ids.entry(key).or_insert_with(|| {
            order.push(key);
            queue.push_back(key);
            order.len() - 1
        })
    };
    let initial: Vec<usize> = ginit.iter().map(|&s| get((s, 0), &mut order, &mut queue)).collect();
    let mut successors: Vec<Vec<usize>> = Vec::new();
    while let Some((s, i)) = queue.pop_front() {
        let j = if acc_of(i, s) { (i + 1) % k } else { i };
        let succ: Vec<usize> = gsucc[s].iter().map(|&t| get((t, j), &mut order, &mut queue)).collect();
        successors.push(succ);
    }
    let labels_out = order.iter().map(|&(s, _)| labels[s]).collect();
    let accepting = order.iter().map(|&(s, i)| i == 0 && acc_of(0, s)).collect();
    let mut succ_sorted = successors;
    for v in &mut succ_sorted {
        v.sort_unstable();
        v.dedup();
    }
    BuchiAutomaton { num_atoms, labels: labels_out, initial, accepting, successors: succ_sorted }
}

/// Interns atoms in order of first occurrence and returns the automaton for
/// `nnf(f)` together with the atom table.
pub fn translate<A: Clone + PartialEq>(f: &Ltl<A>) -> (BuchiAutomaton, Vec<A>) {
    let mut table: Vec<A> = Vec::new();
    let indexed = f.map_atoms(&mut |a: &A| match table.iter().position(|x| x == a) {
        Some(i) => i,
        None => {
            table.push(a.clone());
            table.len() - 1
        }
    });
    (ltl_to_buchi(&ltl_nnf(&indexed)), table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(i: usize) -> Ltl<usize> {
        Ltl::Atom(i)
    }

    #[test]
    fn nnf_dualities() {
        assert_eq!(ltl_nnf(&Ltl::not(Ltl::globally(p(0)))), ltl_nnf(&Ltl::finally(Ltl::not(p(0)))));
        assert_eq!(ltl_nnf(&Ltl::not(Ltl::until(p(0), p(1)))), Ltl::release(Ltl::not(p(0)), Ltl::not(p(1))));
        assert_eq!(ltl_nnf::<usize>(&Ltl::not(Ltl::False)), Ltl::True);
    }

    #[test]
    fn true_is_single_accepting_state() {
        let a = ltl_to_buchi(&Ltl::True);
        assert_eq!(a.num_states(), 1);
        assert_eq!(a.initial, vec![0]);
        assert!(a.accepting[0]);
        assert_eq!(a.successors[0], vec![0]);
        assert_eq!(a.labels[0], Label::default());
    }

    #[test]
    fn globally_not_p_is_single_state() {
        let a = ltl_to_buchi(&ltl_nnf(&Ltl::not(Ltl::finally(p(0)))));
        assert_eq!(a.num_states(), 1);
        assert!(a.accepting[0]);
        assert_eq!(a.successors[0], vec![0]);
        assert_eq!(a.labels[0], Label { pos: 0, neg: 1 });
    }

    #[test]
    fn false_has_empty_language() {
        let a = ltl_to_buchi(&Ltl::<usize>::False);
        assert!(!a.accepts_lasso(&[], &[0]));
        assert!(!a.accepts_lasso(&[1], &[0, 1]));
    }

    #[test]
    fn labels_are_satisfiable() {
        let f = ltl_nnf(&Ltl::and(Ltl::globally(p(0)), Ltl::finally(Ltl::not(p(0)))));
        let a = ltl_to_buchi(&f);
        assert!(a.labels.iter().all(Label::is_satisfiable));
        assert!(!a.accepts_lasso(&[], &[1]));
        assert!(!a.accepts_lasso(&[1], &[0]));
    }

    #[test]
    fn until_requires_eventuality() {
        let a = ltl_to_buchi(&ltl_nnf(&Ltl::until(p(0), p(1))));
        assert!(a.accepts_lasso(&[0b01, 0b10], &[0]));
        assert!(!a.accepts_lasso(&[], &[0b01]));
        assert!(!a.accepts_lasso(&[0b00, 0b10], &[0]));
    }

    #[test]
    fn lasso_semantics_basics() {
        let holds = |l: &u64, a: &usize| l >> a & 1 == 1;
        let gf = Ltl::globally(Ltl::finally(p(0)));
        assert!(eval_lasso(&gf, &[0], &[0, 1], &holds));
        assert!(!eval_lasso(&gf, &[1, 1], &[0], &holds));
        let fg = Ltl::finally(Ltl::globally(p(0)));
        assert!(eval_lasso(&fg, &[0, 0], &[1], &holds));
        assert!(!eval_lasso(&fg, &[], &[1, 0], &holds));
        let x = Ltl::next(p(0));
        assert!(eval_lasso(&x, &[], &[0, 1], &holds));
        assert!(eval_lasso(&x, &[0], &[1], &holds));
        assert!(!eval_lasso(&x, &[1], &[0], &holds));
    }
}
