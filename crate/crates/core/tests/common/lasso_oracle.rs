//! Exhaustive comparison of Büchi acceptance with direct lasso semantics.
//!
//! For a fixed period `v`, the truth of every subformula at the start of
//! `v^ω` comes from `eval_lasso`; prefix letters are then prepended one at a
//! time with the one-step expansion laws, which are exact outside the cycle.
//! On the automaton side, the states accepting `v^ω` are computed once and
//! prefix letters are prepended by taking predecessors.

use rand::Rng;
use tascheck::buchi::{eval_lasso, translate, BuchiAutomaton, Ltl};

/// Subformulas in postorder; children precede parents.
struct Flat {
    nodes: Vec<Ltl<usize>>,
    kids: Vec<[usize; 2]>,
}

fn flatten(f: &Ltl<usize>, out: &mut Flat) -> usize {
    use Ltl::*;
    let kids = match f {
        True | False | Atom(_) => [usize::MAX; 2],
        Not(a) | Next(a) | Globally(a) | Finally(a) => [flatten(a, out), usize::MAX],
        And(a, b) | Or(a, b) | Implies(a, b) | Until(a, b) | Release(a, b) => [flatten(a, out), flatten(b, out)],
    };
    out.nodes.push(f.clone());
    out.kids.push(kids);
    out.nodes.len() - 1
}

/// Truth of every node at a position with letter `a` (bitmask over the
/// formula's atoms), given the truth vector at the next position.
fn step(flat: &Flat, a: u64, next: &[bool], out: &mut Vec<bool>) {
    use Ltl::*;
    out.clear();
    for (i, n) in flat.nodes.iter().enumerate() {
        let [x, y] = flat.kids[i];
        let v = match n {
            True => true,
            False => false,
            Atom(k) => a >> k & 1 == 1,
            Not(_) => !out[x],
            And(..) => out[x] && out[y],
            Or(..) => out[x] || out[y],
            Implies(..) => !out[x] || out[y],
            Next(_) => next[x],
            Until(..) => out[y] || (out[x] && next[i]),
            Release(..) => out[y] && (out[x] || next[i]),
            Globally(_) => out[x] && next[i],
            Finally(_) => out[x] || next[i],
        };
        out.push(v);
    }
}

fn atoms_of(f: &Ltl<usize>) -> usize {
    f.atoms().into_iter().map(|&a| a + 1).max().unwrap_or(0)
}

/// Maps a letter over formula atoms to the automaton's atom numbering.
fn to_aut_letter(table: &[usize], a: u64) -> u64 {
    table.iter().enumerate().fold(0, |acc, (i, &atom)| acc | ((a >> atom & 1) << i))
}

fn holds(a: &u64, k: &usize) -> bool {
    a >> k & 1 == 1
}

pub struct Report {
    pub words: u64,
    pub mismatches: u64,
    pub example: Option<(Vec<u64>, Vec<u64>)>,
}

fn all_words(letters: u64, len: usize) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out.into_iter().flat_map(|w| (0..letters).map(move |a| [w.clone(), vec![a]].concat())).collect();
    }
    out
}

/// Compares `translate(f)` with `eval_lasso` on every lasso with prefix
/// length `<= max_prefix` and period length `1..=max_period`.
pub fn exhaustive(f: &Ltl<usize>, max_prefix: usize, max_period: usize) -> Report {
    exhaustive_against(f, f, max_prefix, max_period)
}

/// Like [`exhaustive`] with the automaton built from `g` instead of `f`.
pub fn exhaustive_against(f: &Ltl<usize>, g: &Ltl<usize>, max_prefix: usize, max_period: usize) -> Report {
    let (aut, table) = translate(g);
    let mut flat = Flat { nodes: Vec::new(), kids: Vec::new() };
    let root = flatten(f, &mut flat);
    let letters = 1u64 << atoms_of(f).max(atoms_of(g));
    let q = aut.num_states();
    let mut rep = Report { words: 0, mismatches: 0, example: None };
    for period in 1..=max_period {
        for v in all_words(letters, period) {
            let truth: Vec<bool> = flat.nodes.iter().map(|n| eval_lasso(n, &[], &v, &holds)).collect();
            let av: Vec<u64> = v.iter().map(|&a| to_aut_letter(&table, a)).collect();
            let good: Vec<bool> =
                (0..q).map(|s| BuchiAutomaton { initial: vec![s], ..aut.clone() }.accepts_lasso(&[], &av)).collect();
            let mut prefix = Vec::new();
            walk(&aut, &table, &flat, root, letters, max_prefix, &v, &truth, &good, &mut prefix, &mut rep);
        }
    }
    rep
}

#[allow(clippy::too_many_arguments)]
fn walk(
    aut: &BuchiAutomaton,
    table: &[usize],
    flat: &Flat,
    root: usize,
    letters: u64,
    left: usize,
    v: &[u64],
    truth: &[bool],
    good: &[bool],
    prefix: &mut Vec<u64>,
    rep: &mut Report,
) {
    rep.words += 1;
    let by_formula = truth[root];
    let by_automaton = aut.initial.iter().any(|&s| good[s]);
    if by_formula != by_automaton {
        rep.mismatches += 1;
        if rep.example.is_none() {
            let mut p = prefix.clone();
            p.reverse();
            rep.example = Some((p, v.to_vec()));
        }
    }
    if left == 0 {
        return;
    }
    let mut t = Vec::with_capacity(truth.len());
    for a in 0..letters {
        step(flat, a, truth, &mut t);
        let la = to_aut_letter(table, a);
        let g: Vec<bool> = (0..aut.num_states())
            .map(|s| aut.labels[s].matches(la) && aut.successors[s].iter().any(|&n| good[n]))
            .collect();
        prefix.push(a);
        walk(aut, table, flat, root, letters, left - 1, v, &t, &g, prefix, rep);
        prefix.pop();
    }
}

/// Direct comparison on random lassos, independent of the dynamic program.
pub fn sampled(f: &Ltl<usize>, samples: usize, rng: &mut impl Rng) -> u64 {
    let (aut, table) = translate(f);
    let letters = 1u64 << atoms_of(f);
    let mut bad = 0;
    for _ in 0..samples {
        let p: Vec<u64> = (0..rng.gen_range(0..=4)).map(|_| rng.gen_range(0..letters)).collect();
        let c: Vec<u64> = (0..rng.gen_range(1..=4)).map(|_| rng.gen_range(0..letters)).collect();
        let ap: Vec<u64> = p.iter().map(|&a| to_aut_letter(&table, a)).collect();
        let ac: Vec<u64> = c.iter().map(|&a| to_aut_letter(&table, a)).collect();
        if eval_lasso(f, &p, &c, &holds) != aut.accepts_lasso(&ap, &ac) {
            bad += 1;
        }
    }
    bad
}

/// A random formula over atoms `0..atoms` with at most `max_size` nodes.
pub fn random_ltl(rng: &mut impl Rng, atoms: usize, max_size: usize) -> Ltl<usize> {
    if max_size <= 1 {
        return match rng.gen_range(0..10) {
            0 => Ltl::True,
            1 => Ltl::False,
            _ => Ltl::Atom(rng.gen_range(0..atoms)),
        };
    }
    let sub = |rng: &mut _, n| Box::new(random_ltl(rng, atoms, n));
    let kinds = if max_size >= 3 { 12 } else { 6 };
    match rng.gen_range(0..kinds) {
        0..=1 => Ltl::Atom(rng.gen_range(0..atoms)),
        2 => Ltl::Not(sub(rng, max_size - 1)),
        3 => Ltl::Next(sub(rng, max_size - 1)),
        4 => Ltl::Globally(sub(rng, max_size - 1)),
        5 => Ltl::Finally(sub(rng, max_size - 1)),
        k => {
            let left = rng.gen_range(1..max_size - 1);
            let (a, b) = (sub(rng, left), sub(rng, max_size - 1 - left));
            match k {
                6 => Ltl::And(a, b),
                7 => Ltl::Or(a, b),
                8 => Ltl::Implies(a, b),
                9 | 10 => Ltl::Until(a, b),
                _ => Ltl::Release(a, b),
            }
        }
    }
}
