//! Domain types for tuple artifact systems: database schemas with keys and
//! acyclic foreign keys, artifact variables, conditions, services and LTL-FO
//! properties, plus the validation and normalization passes that run before
//! any symbolic analysis.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::buchi::Ltl;

/// Type of an artifact variable, a term or an expression.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VarType {
    /// Data values (the domain of non-key attributes).
    Val,
    /// Identifiers of tuples of the named relation.
    Id(String),
}

impl VarType {
    pub fn is_id(&self) -> bool {
        matches!(self, VarType::Id(_))
    }

    /// Name used in the surface syntax and in value tags.
    pub fn name(&self) -> &str {
        match self {
            VarType::Val => "VAL",
            VarType::Id(r) => r,
        }
    }
}

impl fmt::Display for VarType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AttrKind {
    Val,
    /// Foreign key referencing the ID of the named relation.
    ForeignKey(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    pub kind: AttrKind,
}

impl Attribute {
    pub fn val(name: impl Into<String>) -> Self {
        Attribute { name: name.into(), kind: AttrKind::Val }
    }

    pub fn fk(name: impl Into<String>, target: impl Into<String>) -> Self {
        Attribute { name: name.into(), kind: AttrKind::ForeignKey(target.into()) }
    }

    pub fn ty(&self) -> VarType {
        match &self.kind {
            AttrKind::Val => VarType::Val,
            AttrKind::ForeignKey(r) => VarType::Id(r.clone()),
        }
    }
}

/// A relation `R(ID, attributes...)`. The key is implicit and always first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Relation {
    pub name: String,
    pub attributes: Vec<Attribute>,
}

impl Relation {
    pub fn new(name: impl Into<String>, attributes: Vec<Attribute>) -> Self {
        Relation { name: name.into(), attributes }
    }

    pub fn attribute(&self, name: &str) -> Option<&Attribute> {
        self.attributes.iter().find(|a| a.name == name)
    }

    /// Arity of relational atoms over this relation (ID included).
    pub fn arity(&self) -> usize {
        self.attributes.len() + 1
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DatabaseSchema {
    pub relations: Vec<Relation>,
}

impl DatabaseSchema {
    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.iter().find(|r| r.name == name)
    }

    /// Relation names lying on a foreign-key cycle, one sorted group per
    /// strongly connected component (self-references included).
    pub fn fk_cycles(&self) -> Vec<Vec<String>> {
        let names: Vec<&str> = self.relations.iter().map(|r| r.name.as_str()).collect();
        let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        let mut adj = vec![Vec::new(); names.len()];
        let mut self_loop = vec![false; names.len()];
        for (i, r) in self.relations.iter().enumerate() {
            for a in &r.attributes {
                if let AttrKind::ForeignKey(t) = &a.kind {
                    if let Some(&j) = index.get(t.as_str()) {
                        adj[i].push(j);
                        if i == j {
                            self_loop[i] = true;
                        }
                    }
                }
            }
        }
        let mut cycles: Vec<Vec<String>> = strongly_connected(&adj)
            .into_iter()
            .filter(|c| c.len() > 1 || self_loop[c[0]])
            .map(|c| {
                let mut v: Vec<String> = c.iter().map(|&i| names[i].to_string()).collect();
                v.sort();
                v
            })
            .collect();
        cycles.sort();
        cycles
    }

    pub fn is_acyclic(&self) -> bool {
        self.fk_cycles().is_empty()
    }
}

/// Tarjan's algorithm, iterative; components are returned in no particular
/// order.
pub(crate) fn strongly_connected(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut index: Vec<Option<usize>> = vec![None; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut next = 0;
    let mut call: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root].is_some() {
            continue;
        }
        call.push((root, 0));
        index[root] = Some(next);
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut k)) = call.last_mut() {
            if *k < adj[v].len() {
                let w = adj[v][*k];
                *k += 1;
                match index[w] {
                    None => {
                        index[w] = Some(next);
                        low[w] = next;
                        next += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    }
                    Some(iw) if on_stack[w] => low[v] = low[v].min(iw),
                    _ => {}
                }
                continue;
            }
            call.pop();
            if let Some(&(u, _)) = call.last() {
                low[u] = low[u].min(low[v]);
            }
            if Some(low[v]) == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                out.push(comp);
            }
        }
    }
    out
}

/// A term of a condition: a variable or a constant.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Term {
    Var(String),
    /// String literal, a constant of type `VAL`.
    Str(String),
    /// The distinguished `null`; its type comes from the other side of the
    /// atom it occurs in.
    Null,
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn str(s: impl Into<String>) -> Self {
        Term::Str(s.into())
    }
}

/// `R(id, a1, ..., an)` with arguments in the relation's declaration order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RelAtom {
    pub relation: String,
    pub args: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TypedVar {
    pub name: String,
    pub ty: VarType,
}

impl TypedVar {
    pub fn new(name: impl Into<String>, ty: VarType) -> Self {
        TypedVar { name: name.into(), ty }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Condition {
    True,
    False,
    Eq(Term, Term),
    Neq(Term, Term),
    Rel(RelAtom),
    Not(Box<Condition>),
    And(Vec<Condition>),
    Or(Vec<Condition>),
    Exists(Vec<TypedVar>, Box<Condition>),
}

impl Condition {
    pub fn eq(a: Term, b: Term) -> Self {
        Condition::Eq(a, b)
    }

    pub fn neq(a: Term, b: Term) -> Self {
        Condition::Neq(a, b)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(c: Condition) -> Self {
        Condition::Not(Box::new(c))
    }

    pub fn rel(relation: impl Into<String>, args: Vec<Term>) -> Self {
        Condition::Rel(RelAtom { relation: relation.into(), args })
    }

    /// `a -> b`, encoded as `!a || b`.
    pub fn implies(a: Condition, b: Condition) -> Self {
        Condition::Or(vec![Condition::not(a), b])
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Condition::Exists(..) => false,
            Condition::Not(c) => c.is_quantifier_free(),
            Condition::And(cs) | Condition::Or(cs) => cs.iter().all(|c| c.is_quantifier_free()),
            _ => true,
        }
    }

    /// Preorder walk over all sub-conditions, `self` first.
    pub fn subformulas(&self) -> Vec<&Condition> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(c) = stack.pop() {
            out.push(c);
            match c {
                Condition::Not(x) | Condition::Exists(_, x) => stack.push(x),
                Condition::And(cs) | Condition::Or(cs) => stack.extend(cs.iter().rev()),
                _ => {}
            }
        }
        out
    }

    /// Free variable names in order of first occurrence.
    pub fn free_vars(&self) -> Vec<String> {
        fn go(c: &Condition, bound: &mut Vec<String>, out: &mut Vec<String>) {
            let term = |t: &Term, bound: &Vec<String>, out: &mut Vec<String>| {
                if let Term::Var(v) = t {
                    if !bound.contains(v) && !out.contains(v) {
                        out.push(v.clone());
                    }
                }
            };
            match c {
                Condition::True | Condition::False => {}
                Condition::Eq(a, b) | Condition::Neq(a, b) => {
                    term(a, bound, out);
                    term(b, bound, out);
                }
                Condition::Rel(r) => r.args.iter().for_each(|t| term(t, bound, out)),
                Condition::Not(x) => go(x, bound, out),
                Condition::And(cs) | Condition::Or(cs) => cs.iter().for_each(|x| go(x, bound, out)),
                Condition::Exists(vs, body) => {
                    let n = bound.len();
                    bound.extend(vs.iter().map(|v| v.name.clone()));
                    go(body, bound, out);
                    bound.truncate(n);
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Renames free occurrences of variable `from` to `to`.
    pub fn rename_var(&self, from: &str, to: &str) -> Condition {
        let t = |t: &Term| match t {
            Term::Var(v) if v == from => Term::Var(to.to_string()),
            other => other.clone(),
        };
        match self {
            Condition::True => Condition::True,
            Condition::False => Condition::False,
            Condition::Eq(a, b) => Condition::Eq(t(a), t(b)),
            Condition::Neq(a, b) => Condition::Neq(t(a), t(b)),
            Condition::Rel(r) => {
                Condition::Rel(RelAtom { relation: r.relation.clone(), args: r.args.iter().map(t).collect() })
            }
            Condition::Not(x) => Condition::not(x.rename_var(from, to)),
            Condition::And(cs) => Condition::And(cs.iter().map(|c| c.rename_var(from, to)).collect()),
            Condition::Or(cs) => Condition::Or(cs.iter().map(|c| c.rename_var(from, to)).collect()),
            Condition::Exists(vs, body) => {
                if vs.iter().any(|v| v.name == from) {
                    self.clone()
                } else {
                    Condition::Exists(vs.clone(), Box::new(body.rename_var(from, to)))
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Service {
    pub name: String,
    pub pre: Condition,
    pub post: Condition,
    /// Variables whose values carry over unchanged, in declaration order.
    pub propagated: Vec<String>,
}

/// Tuple artifact system: schema, artifact variables, global pre-condition
/// and services.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TasSpec {
    pub schema: DatabaseSchema,
    pub variables: Vec<TypedVar>,
    pub init: Condition,
    pub services: Vec<Service>,
}

impl TasSpec {
    pub fn variable(&self, name: &str) -> Option<&TypedVar> {
        self.variables.iter().find(|v| v.name == name)
    }

    pub fn service(&self, name: &str) -> Option<&Service> {
        self.services.iter().find(|s| s.name == name)
    }

    pub fn is_quantifier_free(&self) -> bool {
        self.init.is_quantifier_free()
            && self.services.iter().all(|s| s.pre.is_quantifier_free() && s.post.is_quantifier_free())
    }

    /// All conditions of the system, labelled with their location.
    pub fn conditions(&self) -> Vec<(String, &Condition)> {
        let mut out = vec![("init".to_string(), &self.init)];
        for s in &self.services {
            out.push((format!("service {}.pre", s.name), &s.pre));
            out.push((format!("service {}.post", s.name), &s.post));
        }
        out
    }

    fn type_env(&self) -> HashMap<String, VarType> {
        self.variables.iter().map(|v| (v.name.clone(), v.ty.clone())).collect()
    }
}

/// Atomic proposition of an LTL-FO formula.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Prop {
    /// Condition over the artifact and global variables.
    Cond(Condition),
    /// Holds in a snapshot produced by the named service.
    Service(String),
}

/// An LTL-FO property `forall globals . formula`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LtlFo {
    pub name: String,
    pub globals: Vec<TypedVar>,
    pub formula: Ltl<Prop>,
}

impl LtlFo {
    pub fn new(name: impl Into<String>, globals: Vec<TypedVar>, formula: Ltl<Prop>) -> Self {
        LtlFo { name: name.into(), globals, formula }
    }

    /// Distinct propositions in order of first occurrence.
    pub fn propositions(&self) -> Vec<&Prop> {
        let mut out: Vec<&Prop> = Vec::new();
        for p in self.formula.atoms() {
            if !out.contains(&p) {
                out.push(p);
            }
        }
        out
    }
}

/// Constant of the navigation set. Every type has its own `null`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Constant {
    Null(VarType),
    Str(String),
}

impl Constant {
    pub fn ty(&self) -> VarType {
        match self {
            Constant::Null(t) => t.clone(),
            Constant::Str(_) => VarType::Val,
        }
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constant::Null(t) => write!(f, "null@{t}"),
            Constant::Str(s) => write!(f, "{s:?}"),
        }
    }
}

// ---------------------------------------------------------------------------
// Validation

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DiagCode {
    CyclicSchema,
    DuplicateRelation,
    DuplicateAttribute,
    UnknownRelation,
    DuplicateVariable,
    UnknownVariable,
    TypeMismatch,
    ArityMismatch,
    AmbiguousNull,
    NoServices,
    DuplicateService,
    UnknownService,
    UnknownPropagated,
    DuplicateGlobal,
    ExistsInProperty,
}

impl fmt::Display for DiagCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: DiagCode,
    pub location: String,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub diagnostics: Vec<Diagnostic>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.diagnostics.is_empty()
    }

    pub fn codes(&self) -> Vec<DiagCode> {
        self.diagnostics.iter().map(|d| d.code).collect()
    }

    fn push(&mut self, code: DiagCode, location: impl Into<String>, message: impl Into<String>) {
        self.diagnostics.push(Diagnostic { code, location: location.into(), message: message.into() });
    }
}

/// Checks every structural and typing invariant of `spec`. Diagnostics are
/// sorted, so permuting relations or services does not change the report.
pub fn validate(spec: &TasSpec) -> ValidationReport {
    let mut r = ValidationReport::default();
    validate_schema(&spec.schema, &mut r);

    let mut seen = HashSet::new();
    for v in &spec.variables {
        if !seen.insert(v.name.as_str()) {
            r.push(DiagCode::DuplicateVariable, format!("variable {}", v.name), "variable declared twice");
        }
        check_type_exists(&spec.schema, &v.ty, &format!("variable {}", v.name), &mut r);
    }

    if spec.services.is_empty() {
        r.push(DiagCode::NoServices, "spec", "at least one service is required");
    }
    let mut names = HashSet::new();
    for s in &spec.services {
        if !names.insert(s.name.as_str()) {
            r.push(DiagCode::DuplicateService, format!("service {}", s.name), "service declared twice");
        }
        for p in &s.propagated {
            if spec.variable(p).is_none() {
                r.push(
                    DiagCode::UnknownPropagated,
                    format!("service {}.propagate", s.name),
                    format!("`{p}` is not an artifact variable"),
                );
            }
        }
    }

    let env = spec.type_env();
    let checker = TypeChecker { schema: &spec.schema };
    for (loc, cond) in spec.conditions() {
        checker.check(cond, &env, &loc, &mut r);
    }
    r.diagnostics.sort();
    r.diagnostics.dedup();
    r
}

/// Checks a property against the system it is meant for.
pub fn validate_property(spec: &TasSpec, prop: &LtlFo) -> ValidationReport {
    let mut r = ValidationReport::default();
    let loc = format!("property {}", prop.name);
    let mut env = spec.type_env();
    let mut seen = HashSet::new();
    for g in &prop.globals {
        if !seen.insert(g.name.as_str()) {
            r.push(DiagCode::DuplicateGlobal, &loc, format!("global `{}` declared twice", g.name));
        }
        check_type_exists(&spec.schema, &g.ty, &loc, &mut r);
        env.insert(g.name.clone(), g.ty.clone());
    }
    let checker = TypeChecker { schema: &spec.schema };
    for p in prop.propositions() {
        match p {
            Prop::Service(s) => {
                if spec.service(s).is_none() {
                    r.push(DiagCode::UnknownService, &loc, format!("no service named `{s}`"));
                }
            }
            Prop::Cond(c) => {
                if !c.is_quantifier_free() {
                    r.push(DiagCode::ExistsInProperty, &loc, "quantifiers are not allowed in properties");
                }
                checker.check(c, &env, &loc, &mut r);
            }
        }
    }
    r.diagnostics.sort();
    r.diagnostics.dedup();
    r
}

fn validate_schema(schema: &DatabaseSchema, r: &mut ValidationReport) {
    let mut names = HashSet::new();
    for rel in &schema.relations {
        if !names.insert(rel.name.as_str()) {
            r.push(DiagCode::DuplicateRelation, format!("relation {}", rel.name), "relation declared twice");
        }
        let mut attrs = HashSet::new();
        for a in &rel.attributes {
            let loc = format!("relation {}.{}", rel.name, a.name);
            if a.name == "id" || a.name == "ID" || !attrs.insert(a.name.as_str()) {
                r.push(DiagCode::DuplicateAttribute, &loc, "attribute names must be distinct and differ from the key");
            }
            if let AttrKind::ForeignKey(t) = &a.kind {
                if schema.relation(t).is_none() {
                    r.push(DiagCode::UnknownRelation, &loc, format!("foreign key references unknown relation `{t}`"));
                }
            }
        }
    }
    for cycle in schema.fk_cycles() {
        r.push(DiagCode::CyclicSchema, format!("relations {}", cycle.join(", ")), "foreign keys form a cycle");
    }
}

fn check_type_exists(schema: &DatabaseSchema, ty: &VarType, loc: &str, r: &mut ValidationReport) {
    if let VarType::Id(rel) = ty {
        if schema.relation(rel).is_none() {
            r.push(DiagCode::UnknownRelation, loc, format!("unknown relation type `{rel}`"));
        }
    }
}

struct TypeChecker<'a> {
    schema: &'a DatabaseSchema,
}

impl TypeChecker<'_> {
    fn check(&self, c: &Condition, env: &HashMap<String, VarType>, loc: &str, r: &mut ValidationReport) {
        match c {
            Condition::True | Condition::False => {}
            Condition::Eq(a, b) | Condition::Neq(a, b) => {
                let ta = self.term_type(a, env, loc, r);
                let tb = self.term_type(b, env, loc, r);
                match (a, b, ta, tb) {
                    (Term::Null, Term::Null, ..) => {
                        r.push(DiagCode::AmbiguousNull, loc, "comparison of null with null has no type")
                    }
                    (_, _, Some(Some(x)), Some(Some(y))) if x != y => {
                        r.push(DiagCode::TypeMismatch, loc, format!("cannot compare a {x} term with a {y} term"))
                    }
                    _ => {}
                }
            }
            Condition::Rel(atom) => {
                let Some(rel) = self.schema.relation(&atom.relation) else {
                    r.push(DiagCode::UnknownRelation, loc, format!("unknown relation `{}`", atom.relation));
                    return;
                };
                if atom.args.len() != rel.arity() {
                    r.push(
                        DiagCode::ArityMismatch,
                        loc,
                        format!("`{}` expects {} arguments, got {}", rel.name, rel.arity(), atom.args.len()),
                    );
                    return;
                }
                let expected =
                    std::iter::once(VarType::Id(rel.name.clone())).chain(rel.attributes.iter().map(|a| a.ty()));
                for (t, want) in atom.args.iter().zip(expected) {
                    if let Some(Some(got)) = self.term_type(t, env, loc, r) {
                        if got != want {
                            r.push(
                                DiagCode::TypeMismatch,
                                loc,
                                format!("argument of `{}` must be {want}, found {got}", rel.name),
                            );
                        }
                    }
                }
            }
            Condition::Not(x) => self.check(x, env, loc, r),
            Condition::And(cs) | Condition::Or(cs) => cs.iter().for_each(|x| self.check(x, env, loc, r)),
            Condition::Exists(vs, body) => {
                let mut inner = env.clone();
                for v in vs {
                    check_type_exists(self.schema, &v.ty, loc, r);
                    inner.insert(v.name.clone(), v.ty.clone());
                }
                self.check(body, &inner, loc, r);
            }
        }
    }

    /// `None` when the term is in error, `Some(None)` for an untyped `null`.
    fn term_type(
        &self,
        t: &Term,
        env: &HashMap<String, VarType>,
        loc: &str,
        r: &mut ValidationReport,
    ) -> Option<Option<VarType>> {
        match t {
            Term::Var(v) => match env.get(v) {
                Some(ty) => Some(Some(ty.clone())),
                None => {
                    r.push(DiagCode::UnknownVariable, loc, format!("unknown variable `{v}`"));
                    None
                }
            },
            Term::Str(_) => Some(Some(VarType::Val)),
            Term::Null => Some(None),
        }
    }
}

// ---------------------------------------------------------------------------
// Constants

/// Typed constants of a condition. `null` takes the type of the term it is
/// compared with, or of the relation position it fills. Assumes `c` is
/// well-typed under `env`.
pub fn condition_constants(
    schema: &DatabaseSchema,
    env: &HashMap<String, VarType>,
    c: &Condition,
    out: &mut BTreeSet<Constant>,
) {
    match c {
        Condition::True | Condition::False => {}
        Condition::Eq(a, b) | Condition::Neq(a, b) => {
            for (t, other) in [(a, b), (b, a)] {
                match t {
                    Term::Str(s) => {
                        out.insert(Constant::Str(s.clone()));
                    }
                    Term::Null => {
                        let ty = match other {
                            Term::Var(v) => env.get(v).cloned(),
                            Term::Str(_) => Some(VarType::Val),
                            Term::Null => None,
                        };
                        if let Some(ty) = ty {
                            out.insert(Constant::Null(ty));
                        }
                    }
                    Term::Var(_) => {}
                }
            }
        }
        Condition::Rel(atom) => {
            if let Some(rel) = schema.relation(&atom.relation) {
                let types = std::iter::once(VarType::Id(rel.name.clone())).chain(rel.attributes.iter().map(|a| a.ty()));
                for (t, ty) in atom.args.iter().zip(types) {
                    match t {
                        Term::Str(s) => {
                            out.insert(Constant::Str(s.clone()));
                        }
                        Term::Null => {
                            out.insert(Constant::Null(ty));
                        }
                        Term::Var(_) => {}
                    }
                }
            }
        }
        Condition::Not(x) => condition_constants(schema, env, x, out),
        Condition::And(cs) | Condition::Or(cs) => cs.iter().for_each(|x| condition_constants(schema, env, x, out)),
        Condition::Exists(vs, body) => {
            let mut inner = env.clone();
            for v in vs {
                inner.insert(v.name.clone(), v.ty.clone());
            }
            condition_constants(schema, &inner, body, out);
        }
    }
}

/// Constants of the system together with those of the given properties.
pub fn collect_constants(spec: &TasSpec, props: &[&LtlFo]) -> BTreeSet<Constant> {
    let mut out = BTreeSet::new();
    let env = spec.type_env();
    for (_, c) in spec.conditions() {
        condition_constants(&spec.schema, &env, c, &mut out);
    }
    for p in props {
        let mut env = env.clone();
        for g in &p.globals {
            env.insert(g.name.clone(), g.ty.clone());
        }
        for prop in p.propositions() {
            if let Prop::Cond(c) = prop {
                condition_constants(&spec.schema, &env, c, &mut out);
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Normalization passes

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("condition contains a quantifier")]
    Quantified,
    #[error("existential quantifier in a negative position ({0})")]
    ExistsUnderNegation(String),
}

/// Negation normal form: negations are pushed to the atoms and absorbed
/// into `==`/`!=`; only relational atoms may remain negated. Nested
/// conjunctions and disjunctions are flattened.
pub fn to_nnf(c: &Condition) -> Result<Condition, ModelError> {
    fn go(c: &Condition, neg: bool) -> Result<Condition, ModelError> {
        Ok(match (c, neg) {
            (Condition::Exists(..), _) => return Err(ModelError::Quantified),
            (Condition::True, false) | (Condition::False, true) => Condition::True,
            (Condition::True, true) | (Condition::False, false) => Condition::False,
            (Condition::Eq(a, b), false) | (Condition::Neq(a, b), true) => Condition::Eq(a.clone(), b.clone()),
            (Condition::Eq(a, b), true) | (Condition::Neq(a, b), false) => Condition::Neq(a.clone(), b.clone()),
            (Condition::Rel(r), false) => Condition::Rel(r.clone()),
            (Condition::Rel(r), true) => Condition::not(Condition::Rel(r.clone())),
            (Condition::Not(x), _) => go(x, !neg)?,
            (Condition::And(cs), false) | (Condition::Or(cs), true) => Condition::And(flatten(cs, neg, true)?),
            (Condition::Or(cs), false) | (Condition::And(cs), true) => Condition::Or(flatten(cs, neg, false)?),
        })
    }
    fn flatten(cs: &[Condition], neg: bool, conj: bool) -> Result<Vec<Condition>, ModelError> {
        let mut out = Vec::with_capacity(cs.len());
        for c in cs {
            match go(c, neg)? {
                Condition::And(inner) if conj => out.extend(inner),
                Condition::Or(inner) if !conj => out.extend(inner),
                other => out.push(other),
            }
        }
        Ok(out)
    }
    go(c, false)
}

fn fresh_name(base: &str, taken: &HashSet<String>) -> String {
    if !taken.contains(base) {
        return base.to_string();
    }
    (1..).map(|k| format!("{base}_{k}")).find(|n| !taken.contains(n)).expect("unbounded suffix search")
}

/// Replaces each positively occurring existential quantifier by fresh
/// artifact variables that no service propagates. Witness variables are
/// named `<owner>__<var>` where the owner is `init`, `<service>__pre` or
/// `<service>__post`.
pub fn desugar_exists(spec: &TasSpec) -> Result<TasSpec, ModelError> {
    if spec.is_quantifier_free() {
        return Ok(spec.clone());
    }
    let mut out = spec.clone();
    let mut taken: HashSet<String> = spec.variables.iter().map(|v| v.name.clone()).collect();
    let mut fresh = Vec::new();

    let mut run = |c: &Condition, owner: &str, fresh: &mut Vec<TypedVar>| -> Result<Condition, ModelError> {
        strip_exists(c, false, owner, &mut taken, fresh)
    };
    out.init = run(&spec.init, "init", &mut fresh)?;
    for (i, s) in spec.services.iter().enumerate() {
        out.services[i].pre = run(&s.pre, &format!("{}__pre", s.name), &mut fresh)?;
        out.services[i].post = run(&s.post, &format!("{}__post", s.name), &mut fresh)?;
    }
    out.variables.extend(fresh);
    Ok(out)
}

fn strip_exists(
    c: &Condition,
    negative: bool,
    owner: &str,
    taken: &mut HashSet<String>,
    fresh: &mut Vec<TypedVar>,
) -> Result<Condition, ModelError> {
    Ok(match c {
        Condition::Exists(vs, body) => {
            if negative {
                return Err(ModelError::ExistsUnderNegation(owner.replace("__", ".")));
            }
            let mut body = (**body).clone();
            for v in vs {
                let name = fresh_name(&format!("{owner}__{}", v.name), taken);
                taken.insert(name.clone());
                body = body.rename_var(&v.name, &name);
                fresh.push(TypedVar::new(name, v.ty.clone()));
            }
            strip_exists(&body, negative, owner, taken, fresh)?
        }
        Condition::Not(x) => Condition::not(strip_exists(x, !negative, owner, taken, fresh)?),
        Condition::And(cs) => {
            Condition::And(cs.iter().map(|x| strip_exists(x, negative, owner, taken, fresh)).collect::<Result<_, _>>()?)
        }
        Condition::Or(cs) => {
            Condition::Or(cs.iter().map(|x| strip_exists(x, negative, owner, taken, fresh)).collect::<Result<_, _>>()?)
        }
        other => other.clone(),
    })
}

/// Result of turning a property's universally quantified globals into
/// artifact variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalElimination {
    pub spec: TasSpec,
    pub property: LtlFo,
    /// `(original, new)` for every global that had to be renamed.
    pub renames: Vec<(String, String)>,
}

/// Adds each global to the artifact variables and to the propagated set of
/// every service. A global whose name clashes with an existing variable is
/// renamed to `<name>__g<k>` with the smallest free `k`.
pub fn eliminate_globals(spec: &TasSpec, prop: &LtlFo) -> GlobalElimination {
    let mut spec = spec.clone();
    let mut formula = prop.formula.clone();
    let mut renames = Vec::new();
    let mut taken: HashSet<String> = spec.variables.iter().map(|v| v.name.clone()).collect();
    for g in &prop.globals {
        let name = if taken.contains(&g.name) {
            let n = (0..)
                .map(|k| format!("{}__g{k}", g.name))
                .find(|n| !taken.contains(n) && !prop.globals.iter().any(|o| &o.name == n))
                .expect("unbounded suffix search");
            renames.push((g.name.clone(), n.clone()));
            formula = formula.map_atoms(&mut |p| match p {
                Prop::Cond(c) => Prop::Cond(c.rename_var(&g.name, &n)),
                other => other.clone(),
            });
            n
        } else {
            g.name.clone()
        };
        taken.insert(name.clone());
        spec.variables.push(TypedVar::new(name.clone(), g.ty.clone()));
        for s in &mut spec.services {
            s.propagated.push(name.clone());
        }
    }
    GlobalElimination { spec, property: LtlFo { name: prop.name.clone(), globals: Vec::new(), formula }, renames }
}

/// Variable types keyed by name, for callers outside this module.
pub fn variable_types(vars: &[TypedVar]) -> BTreeMap<String, VarType> {
    vars.iter().map(|v| (v.name.clone(), v.ty.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> Term {
        Term::var(n)
    }

    pub(crate) fn order_schema() -> DatabaseSchema {
        DatabaseSchema {
            relations: vec![
                Relation::new(
                    "CUSTOMERS",
                    vec![Attribute::val("name"), Attribute::val("address"), Attribute::fk("record", "CREDIT_RECORD")],
                ),
                Relation::new("ITEMS", vec![Attribute::val("item_name"), Attribute::val("price")]),
                Relation::new("CREDIT_RECORD", vec![Attribute::val("status")]),
            ],
        }
    }

    fn tiny_spec(schema: DatabaseSchema, vars: Vec<TypedVar>, pre: Condition) -> TasSpec {
        TasSpec {
            schema,
            variables: vars,
            init: Condition::True,
            services: vec![Service { name: "S".into(), pre, post: Condition::True, propagated: vec![] }],
        }
    }

    #[test]
    fn order_schema_is_valid() {
        let spec =
            tiny_spec(order_schema(), vec![TypedVar::new("cust_id", VarType::Id("CUSTOMERS".into()))], Condition::True);
        assert!(validate(&spec).is_valid(), "{:?}", validate(&spec));
    }

    #[test]
    fn self_reference_is_cyclic() {
        let schema = DatabaseSchema { relations: vec![Relation::new("R", vec![Attribute::fk("f", "R")])] };
        let r = validate(&tiny_spec(schema, vec![], Condition::True));
        assert_eq!(r.codes(), vec![DiagCode::CyclicSchema]);
    }

    #[test]
    fn longer_cycle_reported_once_per_component() {
        let schema = DatabaseSchema {
            relations: vec![
                Relation::new("A", vec![Attribute::fk("b", "B")]),
                Relation::new("B", vec![Attribute::fk("c", "C")]),
                Relation::new("C", vec![Attribute::fk("a", "A")]),
                Relation::new("D", vec![Attribute::fk("a", "A")]),
            ],
        };
        assert_eq!(schema.fk_cycles(), vec![vec!["A".to_string(), "B".into(), "C".into()]]);
    }

    #[test]
    fn id_domains_are_disjoint() {
        let spec = tiny_spec(
            order_schema(),
            vec![TypedVar::new("c", VarType::Id("CUSTOMERS".into())), TypedVar::new("i", VarType::Id("ITEMS".into()))],
            Condition::eq(v("c"), v("i")),
        );
        assert_eq!(validate(&spec).codes(), vec![DiagCode::TypeMismatch]);
    }

    #[test]
    fn relational_atom_arity_and_types() {
        let vars = vec![TypedVar::new("c", VarType::Id("CUSTOMERS".into())), TypedVar::new("x", VarType::Val)];
        let bad_arity = tiny_spec(order_schema(), vars.clone(), Condition::rel("CUSTOMERS", vec![v("c")]));
        assert_eq!(validate(&bad_arity).codes(), vec![DiagCode::ArityMismatch]);
        let bad_type =
            tiny_spec(order_schema(), vars, Condition::rel("CUSTOMERS", vec![v("c"), v("x"), v("x"), v("x")]));
        assert_eq!(validate(&bad_type).codes(), vec![DiagCode::TypeMismatch]);
    }

    #[test]
    fn unknown_names() {
        let mut spec = tiny_spec(order_schema(), vec![], Condition::eq(v("ghost"), Term::Null));
        spec.services[0].propagated.push("ghost".into());
        spec.variables.push(TypedVar::new("z", VarType::Id("NOPE".into())));
        let mut codes = validate(&spec).codes();
        codes.sort();
        assert_eq!(codes, vec![DiagCode::UnknownRelation, DiagCode::UnknownVariable, DiagCode::UnknownPropagated]);
    }

    #[test]
    fn validation_is_order_independent() {
        let schema = DatabaseSchema {
            relations: vec![
                Relation::new("A", vec![Attribute::fk("b", "B")]),
                Relation::new("B", vec![Attribute::fk("a", "A")]),
                Relation::new("C", vec![Attribute::fk("c", "C"), Attribute::val("v")]),
            ],
        };
        let mut spec = tiny_spec(schema, vec![TypedVar::new("x", VarType::Val)], Condition::eq(v("x"), v("q")));
        spec.services.push(Service {
            name: "T".into(),
            pre: Condition::eq(v("y"), Term::Null),
            post: Condition::True,
            propagated: vec![],
        });
        let a = validate(&spec);
        spec.schema.relations.reverse();
        spec.services.reverse();
        let b = validate(&spec);
        assert_eq!(a, b);
        assert_eq!(a.diagnostics.iter().filter(|d| d.code == DiagCode::CyclicSchema).count(), 2);
    }

    #[test]
    fn nnf_de_morgan_and_double_negation() {
        let x_eq_y = Condition::eq(v("x"), v("y"));
        let z_eq_c = Condition::eq(v("z"), Term::str("c0"));
        assert_eq!(
            to_nnf(&Condition::not(Condition::And(vec![x_eq_y.clone(), z_eq_c.clone()]))).unwrap(),
            Condition::Or(vec![Condition::neq(v("x"), v("y")), Condition::neq(v("z"), Term::str("c0"))])
        );
        assert_eq!(to_nnf(&Condition::not(Condition::not(x_eq_y.clone()))).unwrap(), x_eq_y);
        let r = Condition::rel("R", vec![v("x"), v("y")]);
        assert_eq!(
            to_nnf(&Condition::not(Condition::Or(vec![r.clone(), x_eq_y]))).unwrap(),
            Condition::And(vec![Condition::not(r), Condition::neq(v("x"), v("y"))])
        );
    }

    #[test]
    fn nnf_rejects_quantifiers() {
        let q = Condition::Exists(vec![TypedVar::new("n", VarType::Val)], Box::new(Condition::True));
        assert_eq!(to_nnf(&q), Err(ModelError::Quantified));
    }

    #[test]
    fn desugar_adds_one_fresh_variable_per_binder() {
        let body = Condition::And(vec![
            Condition::rel("CUSTOMERS", vec![v("cust_id"), v("n"), v("a"), v("r")]),
            Condition::rel("CREDIT_RECORD", vec![v("r"), Term::str("Good")]),
        ]);
        let is_good = Condition::Exists(
            vec![
                TypedVar::new("n", VarType::Val),
                TypedVar::new("a", VarType::Val),
                TypedVar::new("r", VarType::Id("CREDIT_RECORD".into())),
            ],
            Box::new(body),
        );
        let spec = tiny_spec(order_schema(), vec![TypedVar::new("cust_id", VarType::Id("CUSTOMERS".into()))], is_good);
        let out = desugar_exists(&spec).unwrap();
        assert!(out.is_quantifier_free());
        let names: Vec<&str> = out.variables.iter().map(|v| v.name.as_str()).collect();
        assert_eq!(names, ["cust_id", "S__pre__n", "S__pre__a", "S__pre__r"]);
        assert!(out.services[0].propagated.is_empty());
        assert_eq!(out.services[0].pre.free_vars(), vec!["cust_id", "S__pre__n", "S__pre__a", "S__pre__r"]);
        assert!(validate(&out).is_valid());
    }

    #[test]
    fn desugar_identity_and_negative_rejection() {
        let spec = tiny_spec(order_schema(), vec![], Condition::True);
        assert_eq!(desugar_exists(&spec).unwrap(), spec);
        let neg = Condition::not(Condition::Exists(
            vec![TypedVar::new("z", VarType::Val)],
            Box::new(Condition::eq(v("z"), Term::str("a"))),
        ));
        let bad = tiny_spec(order_schema(), vec![], neg);
        assert!(matches!(desugar_exists(&bad), Err(ModelError::ExistsUnderNegation(_))));
    }

    #[test]
    fn eliminate_globals_renames_clashes_deterministically() {
        let spec = tiny_spec(
            order_schema(),
            vec![TypedVar::new("x", VarType::Val), TypedVar::new("x__g0", VarType::Val)],
            Condition::True,
        );
        let prop = LtlFo::new(
            "p",
            vec![TypedVar::new("x", VarType::Val)],
            Ltl::Globally(Box::new(Ltl::Atom(Prop::Cond(Condition::eq(v("x"), Term::str("a")))))),
        );
        let out = eliminate_globals(&spec, &prop);
        assert_eq!(out.renames, vec![("x".to_string(), "x__g1".to_string())]);
        assert!(out.property.globals.is_empty());
        assert_eq!(out.spec.services[0].propagated, vec!["x__g1"]);
        assert_eq!(
            out.property.formula,
            Ltl::Globally(Box::new(Ltl::Atom(Prop::Cond(Condition::eq(v("x__g1"), Term::str("a"))))))
        );
        let again = eliminate_globals(&out.spec, &out.property);
        assert_eq!(again.spec, out.spec);
        assert_eq!(again.property, out.property);
    }
}
