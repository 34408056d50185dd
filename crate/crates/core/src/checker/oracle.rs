//! Reference checker over explicit set partitions of the navigation set.
//! Existential quantifiers are evaluated by enumerating extensions of a
//! partition; no valuations or assignment sets are involved.

use std::collections::{HashMap, VecDeque};

use crate::buchi::{has_accepting_cycle, translate, Ltl};
use crate::model::{
    collect_constants, eliminate_globals, AttrKind, Condition, Constant, LtlFo, Prop, TasSpec, Term, TypedVar, VarType,
};
use crate::symbolic::{build_navigation_set, ExprId, NavigationSet};

use super::{check_valid, CheckError};

pub const ORACLE_MAX_EXPRESSIONS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleVerdict {
    Holds,
    Violated,
}

/// A partition as block ids, canonical when blocks are numbered by first
/// occurrence.
type Partition = Vec<u8>;

fn canonical(p: &[u8]) -> Partition {
    let mut map = [u8::MAX; 256];
    let mut next = 0u8;
    p.iter()
        .map(|&b| {
            if map[b as usize] == u8::MAX {
                map[b as usize] = next;
                next += 1;
            }
            map[b as usize]
        })
        .collect()
}

/// Two paths and the pairs of their same-attribute children.
type CongruencePair = (ExprId, ExprId, Vec<(ExprId, ExprId)>);

struct Ctx {
    nav: NavigationSet,
    /// Pairs of same-typed paths with attributes, with their child pairs.
    congruence: Vec<CongruencePair>,
}

impl Ctx {
    fn new(spec: &TasSpec, vars: &[TypedVar], constants: &std::collections::BTreeSet<Constant>) -> Ctx {
        let nav = build_navigation_set(&spec.schema, vars, constants);
        let mut congruence = Vec::new();
        for a in 0..nav.num_paths() as ExprId {
            for b in a + 1..nav.num_paths() as ExprId {
                if nav.ty(a) != nav.ty(b) || nav.children(a).is_empty() {
                    continue;
                }
                let kids = nav
                    .children(a)
                    .iter()
                    .map(|(attr, ca)| (*ca, nav.child(b, attr).expect("same relation")))
                    .collect();
                congruence.push((a, b, kids));
            }
        }
        Ctx { nav, congruence }
    }

    fn congruent(&self, p: &[u8]) -> bool {
        self.congruence.iter().all(|(a, b, kids)| {
            p[*a as usize] != p[*b as usize] || kids.iter().all(|(x, y)| p[*x as usize] == p[*y as usize])
        })
    }

    fn var_type(&self, t: &Term) -> Option<VarType> {
        match t {
            Term::Var(v) => self.nav.var_index(v).map(|i| self.nav.variables()[i].ty.clone()),
            Term::Str(_) => Some(VarType::Val),
            Term::Null => None,
        }
    }

    fn term(&self, t: &Term, ty: Option<VarType>) -> ExprId {
        match t {
            Term::Var(v) => self.nav.var_expr(self.nav.var_index(v).expect("bound variable")),
            Term::Str(s) => self.nav.constant(&Constant::Str(s.clone())).expect("collected constant"),
            Term::Null => self.nav.constant(&Constant::Null(ty.expect("typed null"))).expect("collected null"),
        }
    }

    /// Calls `f` on every typed partition agreeing with `base` on its
    /// `Some` entries, until `f` returns true.
    fn extensions(&self, base: &[Option<u8>], f: &mut dyn FnMut(&[u8]) -> bool) -> bool {
        let n = base.len();
        let mut block_type: Vec<usize> = Vec::new();
        let mut p = vec![0u8; n];
        for (i, b) in base.iter().enumerate() {
            if let Some(b) = b {
                let b = *b as usize;
                if block_type.len() <= b {
                    block_type.resize(b + 1, usize::MAX);
                }
                block_type[b] = self.nav.type_id(i as ExprId);
                p[i] = b as u8;
            }
        }
        let free: Vec<usize> = (0..n).filter(|&i| base[i].is_none()).collect();
        fn go(
            ctx: &Ctx,
            free: &[usize],
            p: &mut Vec<u8>,
            block_type: &mut Vec<usize>,
            f: &mut dyn FnMut(&[u8]) -> bool,
        ) -> bool {
            let Some((&e, rest)) = free.split_first() else {
                return f(p);
            };
            let t = ctx.nav.type_id(e as ExprId);
            for b in 0..block_type.len() {
                if block_type[b] == t {
                    p[e] = b as u8;
                    if go(ctx, rest, p, block_type, f) {
                        return true;
                    }
                }
            }
            p[e] = block_type.len() as u8;
            block_type.push(t);
            let found = go(ctx, rest, p, block_type, f);
            block_type.pop();
            found
        }
        go(self, &free, &mut p, &mut block_type, f)
    }
}

/// Extension context of one existential node.
struct Ext {
    ctx: Ctx,
    /// For each outer expression, its index in the extended set.
    map: Vec<Option<ExprId>>,
}

struct Oracle<'a> {
    spec: &'a TasSpec,
    base: Ctx,
    exts: HashMap<*const Condition, Ext>,
}

impl<'a> Oracle<'a> {
    fn prepare_exists(&mut self, c: &Condition, vars: &[TypedVar], constants: &std::collections::BTreeSet<Constant>) {
        match c {
            Condition::Not(x) => self.prepare_exists(x, vars, constants),
            Condition::And(cs) | Condition::Or(cs) => cs.iter().for_each(|x| self.prepare_exists(x, vars, constants)),
            Condition::Exists(bound, body) => {
                let mut inner: Vec<TypedVar> =
                    vars.iter().filter(|v| !bound.iter().any(|b| b.name == v.name)).cloned().collect();
                inner.extend(bound.iter().cloned());
                let ctx = Ctx::new(self.spec, &inner, constants);
                let outer = Ctx::new(self.spec, vars, constants);
                let map = (0..outer.nav.len() as ExprId)
                    .map(|e| {
                        ctx.nav.index_of(&outer.nav.name(e)).filter(|_| {
                            outer.nav.root_var(e).is_none_or(|v| !bound.iter().any(|b| b.name == vars[v].name))
                        })
                    })
                    .collect();
                self.exts.insert(c as *const Condition, Ext { ctx, map });
                self.prepare_exists(body, &inner, constants);
            }
            _ => {}
        }
    }

    fn eval(&self, ctx: &Ctx, c: &Condition, p: &[u8]) -> bool {
        match c {
            Condition::True => true,
            Condition::False => false,
            Condition::Eq(a, b) | Condition::Neq(a, b) => {
                let ia = ctx.term(a, ctx.var_type(b));
                let ib = ctx.term(b, ctx.var_type(a));
                (p[ia as usize] == p[ib as usize]) == matches!(c, Condition::Eq(..))
            }
            Condition::Rel(atom) => {
                if atom.args[0] == Term::Null {
                    return false;
                }
                let rel = self.spec.schema.relation(&atom.relation).expect("validated relation");
                let id_ty = VarType::Id(rel.name.clone());
                let x = ctx.term(&atom.args[0], Some(id_ty.clone()));
                if let Some(null) = ctx.nav.constant(&Constant::Null(id_ty)) {
                    if p[x as usize] == p[null as usize] {
                        return false;
                    }
                }
                rel.attributes.iter().zip(&atom.args[1..]).all(|(attr, arg)| {
                    let ty = match &attr.kind {
                        AttrKind::Val => VarType::Val,
                        AttrKind::ForeignKey(r) => VarType::Id(r.clone()),
                    };
                    let xa = ctx.nav.child(x, &attr.name).expect("attribute path");
                    p[xa as usize] == p[ctx.term(arg, Some(ty)) as usize]
                })
            }
            Condition::Not(x) => !self.eval(ctx, x, p),
            Condition::And(cs) => cs.iter().all(|x| self.eval(ctx, x, p)),
            Condition::Or(cs) => cs.iter().any(|x| self.eval(ctx, x, p)),
            Condition::Exists(_, body) => {
                let ext = &self.exts[&(c as *const Condition)];
                let mut base = vec![None; ext.ctx.nav.len()];
                for (e, m) in ext.map.iter().enumerate() {
                    if let Some(m) = m {
                        base[*m as usize] = Some(p[e]);
                    }
                }
                ext.ctx.extensions(&base, &mut |q| ext.ctx.congruent(q) && self.eval(&ext.ctx, body, q))
            }
        }
    }
}

/// Decides `prop` on `spec` by exploring isomorphism types as explicit
/// partitions. Limited to navigation sets of at most
/// [`ORACLE_MAX_EXPRESSIONS`] expressions.
pub fn partition_oracle_check(spec: &TasSpec, prop: &LtlFo) -> Result<OracleVerdict, CheckError> {
    check_valid(spec, prop)?;
    let ge = eliminate_globals(spec, prop);
    let spec = &ge.spec;
    let property = &ge.property;
    let constants = collect_constants(spec, &[property]);
    let base = Ctx::new(spec, &spec.variables, &constants);
    if base.nav.len() > ORACLE_MAX_EXPRESSIONS {
        return Err(CheckError::OracleTooLarge(base.nav.len()));
    }
    let mut oracle = Oracle { spec, base, exts: HashMap::new() };
    for (_, c) in spec.conditions() {
        oracle.prepare_exists(c, &spec.variables, &constants);
    }
    let oracle = oracle;
    let nav = &oracle.base.nav;
    let n = nav.len();

    let (aut, table) = translate(&Ltl::not(property.formula.clone()));
    let letter = |p: &[u8], last: u16| -> u64 {
        let mut bits = 0;
        for (i, a) in table.iter().enumerate() {
            let holds = match a {
                Prop::Cond(c) => oracle.eval(&oracle.base, c, p),
                Prop::Service(s) => last > 0 && spec.services[last as usize - 1].name == *s,
            };
            if holds {
                bits |= 1u64 << i;
            }
        }
        bits
    };

    // System states.
    let mut index: HashMap<(Partition, u16), usize> = HashMap::new();
    let mut states: Vec<(Partition, u16)> = Vec::new();
    let mut letters: Vec<u64> = Vec::new();
    let mut intern = |p: Partition, last: u16, states: &mut Vec<(Partition, u16)>, letters: &mut Vec<u64>| {
        *index.entry((p.clone(), last)).or_insert_with(|| {
            letters.push(letter(&p, last));
            states.push((p, last));
            states.len() - 1
        })
    };

    let mut const_base = vec![None; n];
    for (k, c) in nav.constants().enumerate() {
        const_base[c as usize] = Some(k as u8);
    }
    let mut initial = Vec::new();
    oracle.base.extensions(&const_base, &mut |p| {
        if oracle.base.congruent(p) && oracle.eval(&oracle.base, &spec.init, p) {
            initial.push(canonical(p));
        }
        false
    });
    let initial: Vec<usize> = initial.into_iter().map(|p| intern(p, 0, &mut states, &mut letters)).collect();

    let kept: Vec<Vec<bool>> = spec
        .services
        .iter()
        .map(|s| {
            let mut k: Vec<bool> = (0..n as ExprId).map(|e| nav.is_const(e)).collect();
            for v in &s.propagated {
                for e in nav.rooted_at(nav.var_index(v).expect("validated")) {
                    k[e as usize] = true;
                }
            }
            k
        })
        .collect();

    // Successor partitions depend only on the service and the projection.
    let mut cache: HashMap<(usize, Vec<Option<u8>>), Vec<Partition>> = HashMap::new();
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut frontier: VecDeque<usize> = initial.iter().copied().collect();
    let mut seen = vec![false; states.len()];
    for &i in &initial {
        seen[i] = true;
    }
    while let Some(i) = frontier.pop_front() {
        let (p, _) = states[i].clone();
        let mut out = Vec::new();
        for (j, svc) in spec.services.iter().enumerate() {
            if !oracle.eval(&oracle.base, &svc.pre, &p) {
                continue;
            }
            let proj: Vec<Option<u8>> = (0..n).map(|e| kept[j][e].then_some(p[e])).collect();
            let key = (j, canonical_proj(&proj));
            let posts = cache.entry(key.clone()).or_insert_with(|| {
                let mut v = Vec::new();
                oracle.base.extensions(&key.1, &mut |q| {
                    if oracle.base.congruent(q) && oracle.eval(&oracle.base, &svc.post, q) {
                        v.push(canonical(q));
                    }
                    false
                });
                v
            });
            for q in posts.clone() {
                let t = intern(q, j as u16 + 1, &mut states, &mut letters);
                if seen.len() <= t {
                    seen.resize(t + 1, false);
                }
                if !seen[t] {
                    seen[t] = true;
                    frontier.push_back(t);
                }
                out.push(t);
            }
        }
        if succ.len() <= i {
            succ.resize(i + 1, Vec::new());
        }
        succ[i] = out;
    }
    succ.resize(states.len(), Vec::new());

    // Product with the automaton.
    let q = aut.num_states();
    let id = |s: usize, b: usize| s * q + b;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); states.len() * q];
    let mut reach = vec![false; states.len() * q];
    let mut queue = VecDeque::new();
    for &s in &initial {
        for &b in &aut.initial {
            if aut.labels[b].matches(letters[s]) && !reach[id(s, b)] {
                reach[id(s, b)] = true;
                queue.push_back((s, b));
            }
        }
    }
    while let Some((s, b)) = queue.pop_front() {
        for &t in &succ[s] {
            for &c in &aut.successors[b] {
                if aut.labels[c].matches(letters[t]) {
                    adj[id(s, b)].push(id(t, c));
                    if !reach[id(t, c)] {
                        reach[id(t, c)] = true;
                        queue.push_back((t, c));
                    }
                }
            }
        }
    }
    let accepting: Vec<bool> = (0..states.len() * q).map(|v| reach[v] && aut.accepting[v % q]).collect();
    Ok(if has_accepting_cycle(&adj, &accepting) { OracleVerdict::Violated } else { OracleVerdict::Holds })
}

fn canonical_proj(p: &[Option<u8>]) -> Vec<Option<u8>> {
    let mut map = [u8::MAX; 256];
    let mut next = 0u8;
    p.iter()
        .map(|b| {
            b.map(|b| {
                if map[b as usize] == u8::MAX {
                    map[b as usize] = next;
                    next += 1;
                }
                map[b as usize]
            })
        })
        .collect()
}
