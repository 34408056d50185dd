//! Promela text for a system and property: one `do` option per service,
//! guarded by the pre-condition, followed by non-deterministic selects, a
//! post-condition check and, without lazy dependency tests, the pairwise
//! key/foreign-key check.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::buchi::Ltl;
use crate::checker::{prepare, CheckError};
use crate::model::{Constant, LtlFo, Prop, TasSpec};
use crate::optimize::ldt_expand;
use crate::symbolic::{compile_condition, AssignmentSets, ExprCond, ExprId, Expression, Mode, NavigationSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EmitOptions {
    pub ldt: bool,
    pub asm: bool,
}

/// Emitted program in its four sections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PromelaProgram {
    pub declarations: String,
    pub init: String,
    pub body: String,
    pub ltl: String,
    /// Characters of the tests (guard, post-condition check and congruence
    /// check) of each service's option.
    pub test_sizes: Vec<usize>,
}

impl PromelaProgram {
    pub fn text(&self) -> String {
        format!("{}\n{}{}\n{}", self.declarations, self.init, self.body, self.ltl)
    }
}

impl fmt::Display for PromelaProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

const KEYWORDS: &[&str] = &[
    "active",
    "assert",
    "atomic",
    "bit",
    "bool",
    "break",
    "byte",
    "c_code",
    "c_expr",
    "chan",
    "d_step",
    "do",
    "else",
    "empty",
    "enabled",
    "eval",
    "false",
    "fi",
    "full",
    "goto",
    "hidden",
    "if",
    "init",
    "inline",
    "int",
    "len",
    "local",
    "ltl",
    "mtype",
    "nempty",
    "never",
    "nfull",
    "np_",
    "od",
    "of",
    "pc_value",
    "printf",
    "priority",
    "proctype",
    "provided",
    "run",
    "select",
    "short",
    "show",
    "skip",
    "timeout",
    "true",
    "typedef",
    "unless",
    "unsigned",
    "xr",
    "xs",
    "N",
    "stable",
    "last_service",
];

/// Promela identifiers for the expressions of a navigation set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Identifiers {
    names: Vec<String>,
}

fn sanitize(s: &str) -> String {
    let mut out: String = s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' }).collect();
    if out.is_empty() || out.starts_with(|c: char| c.is_ascii_digit()) {
        out.insert_str(0, "c_");
    }
    out
}

impl Identifiers {
    /// Paths flatten dots to underscores. A string constant uses its own
    /// text when that is a free identifier, `c_<text>` otherwise; `null` of
    /// relation `R` is `null_R`. Clashes get a numeric suffix.
    pub fn new(nav: &NavigationSet) -> Self {
        let mut taken: HashSet<String> = KEYWORDS.iter().map(|s| s.to_string()).collect();
        let mut names = Vec::with_capacity(nav.len());
        let paths: Vec<String> = (0..nav.num_paths() as ExprId).map(|e| nav.name(e).replace('.', "_")).collect();
        taken.extend(paths.iter().cloned());
        names.extend(paths);
        for c in nav.constants() {
            let base = match nav.expr(c) {
                Expression::Const(Constant::Str(s)) => {
                    let s = sanitize(s);
                    if taken.contains(&s) {
                        format!("c_{s}")
                    } else {
                        s
                    }
                }
                Expression::Const(Constant::Null(ty)) => format!("null_{}", sanitize(ty.name())),
                Expression::Path { .. } => unreachable!("constants follow paths"),
            };
            let mut name = base.clone();
            let mut k = 1;
            while taken.contains(&name) {
                name = format!("{base}_{k}");
                k += 1;
            }
            taken.insert(name.clone());
            names.push(name);
        }
        Identifiers { names }
    }

    pub fn get(&self, e: ExprId) -> &str {
        &self.names[e as usize]
    }
}

fn atom(ids: &Identifiers, a: ExprId, op: &str, b: ExprId) -> String {
    format!("({} {op} {})", ids.get(a), ids.get(b))
}

/// C-style rendering: atoms are parenthesized, nested junctions are
/// parenthesized, negation is prefix `!`.
pub fn render(ids: &Identifiers, c: &ExprCond) -> String {
    fn child(ids: &Identifiers, c: &ExprCond) -> String {
        match c {
            ExprCond::And(cs) | ExprCond::Or(cs) if cs.len() > 1 => format!("({})", render(ids, c)),
            _ => render(ids, c),
        }
    }
    match c {
        ExprCond::True => "true".into(),
        ExprCond::False => "false".into(),
        ExprCond::Eq(a, b) => atom(ids, *a, "==", *b),
        ExprCond::Neq(a, b) => atom(ids, *a, "!=", *b),
        ExprCond::Not(x) => match x.as_ref() {
            ExprCond::Eq(..) | ExprCond::Neq(..) => format!("!{}", render(ids, x)),
            _ => format!("!({})", render(ids, x)),
        },
        ExprCond::And(cs) if cs.is_empty() => "true".into(),
        ExprCond::Or(cs) if cs.is_empty() => "false".into(),
        ExprCond::And(cs) => cs.iter().map(|x| child(ids, x)).collect::<Vec<_>>().join(" && "),
        ExprCond::Or(cs) => cs.iter().map(|x| child(ids, x)).collect::<Vec<_>>().join(" || "),
    }
}

/// The translation `f`, optionally followed by the lazy dependency
/// expansion, rendered as Promela.
pub fn translate_condition(nav: &NavigationSet, c: &ExprCond, ldt: bool) -> String {
    let ids = Identifiers::new(nav);
    let c = if ldt { ldt_expand(nav, c) } else { c.clone() };
    render(&ids, &c)
}

/// Pairwise key and foreign-key test, one clause per pair of same-typed
/// expressions with attributes, ordered by distance then position.
fn congruence_test(nav: &NavigationSet, ids: &Identifiers) -> Option<String> {
    let mut clauses: Vec<((ExprId, ExprId), Vec<String>)> = Vec::new();
    for [a, b, ca, cb] in nav.congruence_constraints() {
        let eq = format!("{} == {}", ids.get(ca), ids.get(cb));
        match clauses.last_mut() {
            Some((pair, v)) if *pair == (a, b) => v.push(eq),
            _ => clauses.push(((a, b), vec![eq])),
        }
    }
    if clauses.is_empty() {
        return None;
    }
    let text: Vec<String> = clauses
        .into_iter()
        .map(|((a, b), eqs)| {
            let rhs = if eqs.len() == 1 { eqs[0].clone() } else { format!("({})", eqs.join(" && ")) };
            format!("({} != {} || {rhs})", ids.get(a), ids.get(b))
        })
        .collect();
    Some(text.join(" && "))
}

/// Untyped numbering of values: constants first, then the fresh values of
/// each type in type order.
struct Numbering {
    offset: Vec<usize>,
    const_global: BTreeMap<ExprId, usize>,
    max: usize,
}

impl Numbering {
    fn new(nav: &NavigationSet, pools: &AssignmentSets) -> Numbering {
        let mut const_global = BTreeMap::new();
        for (k, c) in nav.constants().enumerate() {
            const_global.insert(c, k);
        }
        let mut fresh = vec![0usize; nav.types().len()];
        for e in 0..nav.num_paths() as ExprId {
            let t = nav.type_id(e);
            let top = pools.pool(e).iter().map(|&v| v as usize + 1).max().unwrap_or(0);
            fresh[t] = fresh[t].max(top.saturating_sub(nav.consts_of_type(t) as usize));
        }
        let mut offset = Vec::new();
        let mut next = const_global.len();
        for f in fresh {
            offset.push(next);
            next += f;
        }
        Numbering { offset, const_global, max: next }
    }

    fn global(&self, nav: &NavigationSet, e: ExprId, v: u16) -> usize {
        let t = nav.type_id(e);
        let c = nav.consts_of_type(t);
        if v < c {
            let k = nav.constants().find(|&k| nav.type_id(k) == t && nav.const_value(k) == Some(v)).unwrap();
            self.const_global[&k]
        } else {
            self.offset[t] + (v - c) as usize
        }
    }
}

struct Emitter<'a> {
    nav: &'a NavigationSet,
    ids: Identifiers,
    pools: Option<(&'a AssignmentSets, Numbering)>,
}

impl Emitter<'_> {
    fn selects(&self, free: &[ExprId], indent: &str, out: &mut String) {
        for &e in free {
            let id = self.ids.get(e);
            match &self.pools {
                None => out.push_str(&format!("{indent}select({id} : 0 .. N - 1);\n")),
                Some((pools, num)) => {
                    let pool = pools.pool(e);
                    let t = self.nav.type_id(e);
                    let consts: Vec<u16> = pool.iter().copied().filter(|&v| v < self.nav.consts_of_type(t)).collect();
                    let fresh: Vec<usize> = pool
                        .iter()
                        .copied()
                        .filter(|&v| v >= self.nav.consts_of_type(t))
                        .map(|v| num.global(self.nav, e, v))
                        .collect();
                    let range = match (fresh.first(), fresh.last()) {
                        (Some(lo), Some(hi)) if lo == hi => Some(format!("{id} = {lo};")),
                        (Some(lo), Some(hi)) => Some(format!("select({id} : {lo} .. {hi});")),
                        _ => None,
                    };
                    if consts.is_empty() {
                        if let Some(r) = range {
                            out.push_str(&format!("{indent}{r}\n"));
                        }
                        continue;
                    }
                    out.push_str(&format!("{indent}if\n"));
                    for v in consts {
                        let k = self
                            .nav
                            .constants()
                            .find(|&k| self.nav.type_id(k) == t && self.nav.const_value(k) == Some(v))
                            .unwrap();
                        out.push_str(&format!("{indent}:: {id} = {};\n", self.ids.get(k)));
                    }
                    if let Some(r) = range {
                        out.push_str(&format!("{indent}:: {r}\n"));
                    }
                    out.push_str(&format!("{indent}fi;\n"));
                }
            }
        }
    }
}

fn check_block(indent: &str, comment: &str, test: &str, out: &mut String) {
    out.push_str(&format!("{indent}// {comment}\n{indent}if\n{indent}:: ({test}) -> skip;\n{indent}fi;\n"));
}

fn service_macro(name: &str) -> String {
    format!("svc_{}", sanitize(name))
}

/// Rewrites a property so that it only observes snapshots taken between
/// complete service applications, marked by `stable`.
fn stabilize(f: &Ltl<String>) -> Ltl<String> {
    let s = || Ltl::Atom("stable".to_string());
    match f {
        Ltl::True | Ltl::False | Ltl::Atom(_) => f.clone(),
        Ltl::Not(a) => Ltl::not(stabilize(a)),
        Ltl::And(a, b) => Ltl::and(stabilize(a), stabilize(b)),
        Ltl::Or(a, b) => Ltl::or(stabilize(a), stabilize(b)),
        Ltl::Implies(a, b) => Ltl::implies(stabilize(a), stabilize(b)),
        Ltl::Next(a) => Ltl::next(Ltl::until(Ltl::not(s()), Ltl::and(s(), stabilize(a)))),
        Ltl::Until(a, b) => Ltl::until(Ltl::implies(s(), stabilize(a)), Ltl::and(s(), stabilize(b))),
        Ltl::Release(a, b) => Ltl::release(Ltl::and(s(), stabilize(a)), Ltl::implies(s(), stabilize(b))),
        Ltl::Globally(a) => Ltl::globally(Ltl::implies(s(), stabilize(a))),
        Ltl::Finally(a) => Ltl::finally(Ltl::and(s(), stabilize(a))),
    }
}

/// Spin syntax: `[]`, `<>`, `X`, `U`, `V`.
fn spin_ltl(f: &Ltl<String>) -> String {
    fn sub(f: &Ltl<String>) -> String {
        match f {
            Ltl::True | Ltl::False | Ltl::Atom(_) => spin_ltl(f),
            _ => format!("({})", spin_ltl(f)),
        }
    }
    match f {
        Ltl::True => "true".into(),
        Ltl::False => "false".into(),
        Ltl::Atom(a) => a.clone(),
        Ltl::Not(a) => format!("!{}", sub(a)),
        Ltl::And(a, b) => format!("{} && {}", sub(a), sub(b)),
        Ltl::Or(a, b) => format!("{} || {}", sub(a), sub(b)),
        Ltl::Implies(a, b) => format!("{} -> {}", sub(a), sub(b)),
        Ltl::Next(a) => format!("X {}", sub(a)),
        Ltl::Until(a, b) => format!("{} U {}", sub(a), sub(b)),
        Ltl::Release(a, b) => format!("{} V {}", sub(a), sub(b)),
        Ltl::Globally(a) => format!("[] {}", sub(a)),
        Ltl::Finally(a) => format!("<> {}", sub(a)),
    }
}

/// Emits the program for `spec` and `prop`. Globals become variables that
/// every service keeps; existential variables become variables that no
/// service keeps.
pub fn emit(spec: &TasSpec, prop: &LtlFo, opts: &EmitOptions) -> Result<PromelaProgram, CheckError> {
    let mode = if opts.ldt { Mode::Ldt } else { Mode::Naive };
    let prep = prepare(spec, prop, mode, opts.asm)?;
    let spec = &prep.spec;
    let nav = &prep.system.nav;
    let ids = Identifiers::new(nav);
    let numbering = Numbering::new(nav, &prep.system.pools);
    let max_value = if opts.asm { numbering.max } else { nav.len() };
    let em = Emitter { nav, ids, pools: opts.asm.then_some((&prep.system.pools, numbering)) };
    let cond = |c: &crate::model::Condition| -> Result<String, CheckError> {
        let e = compile_condition(&spec.schema, nav, c)?;
        let e = if opts.ldt { ldt_expand(nav, &e) } else { e };
        Ok(render(&em.ids, &e))
    };
    let congruence = if opts.ldt { None } else { congruence_test(nav, &em.ids) };

    let mut decl = String::new();
    if !opts.asm {
        decl.push_str(&format!("#define N {}\n", nav.len()));
    }
    let num = em.pools.as_ref().map(|p| &p.1);
    for (k, c) in nav.constants().enumerate() {
        let v = num.map_or(k, |n| n.const_global[&c]);
        decl.push_str(&format!("#define {} {v}\n", em.ids.get(c)));
    }
    decl.push_str(&format!("#define {} 0\n", service_macro("init")));
    for (j, s) in spec.services.iter().enumerate() {
        decl.push_str(&format!("#define {} {}\n", service_macro(&s.name), j + 1));
    }
    decl.push('\n');
    let ty = if max_value <= 256 { "byte" } else { "short" };
    for e in 0..nav.num_paths() as ExprId {
        decl.push_str(&format!("{ty} {};\n", em.ids.get(e)));
    }
    decl.push_str("byte last_service;\nbool stable = false;\n");

    let all_free: Vec<ExprId> = (0..nav.num_paths() as ExprId).collect();
    let mut init = String::from("init {\n  // choose initial values\n");
    em.selects(&all_free, "  ", &mut init);
    check_block("  ", "validate the initial condition", &cond(&spec.init)?, &mut init);
    if let Some(c) = &congruence {
        check_block("  ", "validate the Keys and FKs", c, &mut init);
    }
    init.push_str(&format!("  last_service = {};\n  stable = true;\n", service_macro("init")));

    let mut body = String::from("  do\n");
    let mut test_sizes = Vec::new();
    for (j, s) in spec.services.iter().enumerate() {
        let svc = &prep.system.services[j];
        let guard = cond(&s.pre)?;
        let post = cond(&s.post)?;
        let mut kept = vec![false; nav.num_paths()];
        for &v in &svc.propagated {
            for e in nav.rooted_at(v) {
                kept[e as usize] = true;
            }
        }
        let free: Vec<ExprId> = all_free.iter().copied().filter(|&e| !kept[e as usize]).collect();
        let ind = "     ";
        body.push_str(&format!("  // service {}: check the pre-condition\n", s.name));
        body.push_str(&format!("  :: ({guard}) ->\n{ind}stable = false;\n"));
        if !free.is_empty() {
            let names: Vec<&str> = free.iter().map(|&e| em.ids.get(e)).collect();
            body.push_str(&format!("{ind}// choose values for {} non-deterministically\n", names.join(", ")));
            em.selects(&free, ind, &mut body);
        }
        check_block(ind, "validate the post-condition", &post, &mut body);
        let mut size = guard.len() + post.len();
        if let Some(c) = &congruence {
            check_block(ind, "validate the Keys and FKs", c, &mut body);
            size += c.len();
        }
        body.push_str(&format!("{ind}last_service = {};\n{ind}stable = true;\n", service_macro(&s.name)));
        test_sizes.push(size);
    }
    body.push_str("  od\n}\n");

    let mut atoms: Vec<(Prop, String)> = Vec::new();
    let formula = prep.property.formula.map_atoms(&mut |p: &Prop| {
        if let Some((_, t)) = atoms.iter().find(|(q, _)| q == p) {
            return t.clone();
        }
        let text = match p {
            Prop::Cond(c) => cond(c).map(|s| format!("({s})")).unwrap_or_else(|e| format!("/* {e} */ false")),
            Prop::Service(s) => format!("(last_service == {})", service_macro(s)),
        };
        atoms.push((p.clone(), text.clone()));
        text
    });
    let rewritten =
        Ltl::until(Ltl::not(Ltl::Atom("stable".into())), Ltl::and(Ltl::Atom("stable".into()), stabilize(&formula)));
    let ltl = format!("ltl {} {{ {} }}\n", sanitize(&prop.name), spin_ltl(&rewritten));

    Ok(PromelaProgram { declarations: decl, init, body, ltl, test_sizes })
}

/// Per-service test sizes of the emitted program.
pub fn service_test_sizes(spec: &TasSpec, prop: &LtlFo, ldt: bool) -> Result<Vec<usize>, CheckError> {
    Ok(emit(spec, prop, &EmitOptions { ldt, asm: false })?.test_sizes)
}
