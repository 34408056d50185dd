//! The twelve property templates used for benchmarking, over two
//! placeholder sub-formulas `p` and `q`.

use crate::buchi::Ltl;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Template {
    /// 1-based position in the template table.
    pub id: usize,
    /// Short name, used in CSV output.
    pub name: &'static str,
    /// Display form over `p` and `q`.
    pub shape: &'static str,
    /// Number of placeholders used (0, 1 or 2).
    pub arity: usize,
}

pub const TEMPLATES: [Template; 12] = [
    Template { id: 1, name: "false", shape: "false", arity: 0 },
    Template { id: 2, name: "always", shape: "G p", arity: 1 },
    Template { id: 3, name: "until", shape: "!p U q", arity: 2 },
    Template { id: 4, name: "until_each", shape: "(!p U q) && G (p -> X (!p U q))", arity: 2 },
    Template { id: 5, name: "response_2", shape: "G (p -> (q || X q || X X q))", arity: 2 },
    Template { id: 6, name: "once_off", shape: "G (p || G !p)", arity: 1 },
    Template { id: 7, name: "response", shape: "G (p -> F q)", arity: 2 },
    Template { id: 8, name: "eventually", shape: "F p", arity: 1 },
    Template { id: 9, name: "fair_response", shape: "G F p -> G F q", arity: 2 },
    Template { id: 10, name: "infinitely_often", shape: "G F p", arity: 1 },
    Template { id: 11, name: "always_or_settle", shape: "G (p || G q)", arity: 2 },
    Template { id: 12, name: "persistence_response", shape: "F G p -> G F q", arity: 2 },
];

pub fn template_by_name(name: &str) -> Option<&'static Template> {
    TEMPLATES.iter().find(|t| t.name == name || t.id.to_string() == name)
}

/// Instantiates template `id` (1-based) with `p` and `q`.
///
/// # Panics
/// If `id` is not in `1..=12`.
pub fn instantiate<A: Clone>(id: usize, p: Ltl<A>, q: Ltl<A>) -> Ltl<A> {
    use Ltl as L;
    let not_p_until_q = || L::until(L::not(p.clone()), q.clone());
    match id {
        1 => L::False,
        2 => L::globally(p),
        3 => not_p_until_q(),
        4 => L::and(not_p_until_q(), L::globally(L::implies(p.clone(), L::next(not_p_until_q())))),
        5 => L::globally(L::implies(p, L::or(q.clone(), L::or(L::next(q.clone()), L::next(L::next(q)))))),
        6 => L::globally(L::or(p.clone(), L::globally(L::not(p)))),
        7 => L::globally(L::implies(p, L::finally(q))),
        8 => L::finally(p),
        9 => L::implies(L::globally(L::finally(p)), L::globally(L::finally(q))),
        10 => L::globally(L::finally(p)),
        11 => L::globally(L::or(p, L::globally(q))),
        12 => L::implies(L::finally(L::globally(p)), L::globally(L::finally(q))),
        _ => panic!("template id {id} out of range"),
    }
}
