//! Symbolic semantics. An isomorphism type of the navigation set is
//! represented by a typed valuation: two expressions are equivalent iff they
//! have the same type and the same value. Constants of each type own the
//! lowest values of that type.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{AttrKind, Condition, Constant, DatabaseSchema, Term, TypedVar, VarType};

pub type Value = u16;
pub type ExprId = u32;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Expression {
    /// `root.a1.a2...`, typed by its last step.
    Path {
        root: String,
        attrs: Vec<String>,
        ty: VarType,
    },
    Const(Constant),
}

impl Expression {
    pub fn ty(&self) -> VarType {
        match self {
            Expression::Path { ty, .. } => ty.clone(),
            Expression::Const(c) => c.ty(),
        }
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expression::Path { root, attrs, .. } => {
                f.write_str(root)?;
                for a in attrs {
                    write!(f, ".{a}")?;
                }
                Ok(())
            }
            Expression::Const(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mode {
    /// Global key and foreign-key congruence check after every step.
    Naive,
    /// Lazy dependency tests: equalities carry their continuations and the
    /// congruence check is dropped.
    Ldt,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Naive => "naive",
            Mode::Ldt => "ldt",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SymbolicError {
    #[error("condition contains a quantifier")]
    Quantified,
    #[error("`{0}` is not in the navigation set")]
    UnknownExpression(String),
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
}

/// The navigation set `E(x)`: all foreign-key paths from the variables plus
/// the constants, in canonical order (variables in declaration order, each
/// followed by its paths in preorder by attribute declaration order; then
/// constants).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NavigationSet {
    exprs: Vec<Expression>,
    type_of: Vec<u16>,
    types: Vec<VarType>,
    root_var: Vec<Option<u32>>,
    parent: Vec<Option<ExprId>>,
    children: Vec<Vec<(String, ExprId)>>,
    const_value: Vec<Option<Value>>,
    consts_per_type: Vec<Value>,
    vars: Vec<TypedVar>,
    var_range: Vec<(ExprId, ExprId)>,
    by_name: HashMap<String, ExprId>,
    num_paths: usize,
}

/// Builds the navigation set for `variables` and `constants`.
///
/// # Panics
/// If the schema has a foreign-key cycle or a variable has an unknown type;
/// both are rejected by validation.
pub fn build_navigation_set(
    schema: &DatabaseSchema,
    variables: &[TypedVar],
    constants: &BTreeSet<Constant>,
) -> NavigationSet {
    let mut var_range = Vec::new();

    #[allow(clippy::too_many_arguments)]
    fn walk(
        schema: &DatabaseSchema,
        root: &str,
        attrs: &mut Vec<String>,
        ty: VarType,
        par: Option<ExprId>,
        var: u32,
        depth: usize,
        out: &mut (Vec<Expression>, Vec<Option<ExprId>>, Vec<Option<u32>>),
    ) {
        assert!(depth <= schema.relations.len() + 1, "foreign-key cycle reached from `{root}`");
        let me = out.0.len() as ExprId;
        out.0.push(Expression::Path { root: root.to_string(), attrs: attrs.clone(), ty: ty.clone() });
        out.1.push(par);
        out.2.push(Some(var));
        if let VarType::Id(r) = &ty {
            let rel = schema.relation(r).unwrap_or_else(|| panic!("unknown relation `{r}`"));
            for a in &rel.attributes {
                attrs.push(a.name.clone());
                walk(schema, root, attrs, a.ty(), Some(me), var, depth + 1, out);
                attrs.pop();
            }
        }
    }

    let mut acc = (Vec::new(), Vec::new(), Vec::new());
    for (vi, v) in variables.iter().enumerate() {
        let start = acc.0.len() as ExprId;
        walk(schema, &v.name, &mut Vec::new(), v.ty.clone(), None, vi as u32, 0, &mut acc);
        var_range.push((start, acc.0.len() as ExprId));
    }
    let (mut exprs, mut parent, mut root_var) = acc;
    let num_paths = exprs.len();
    for c in constants {
        exprs.push(Expression::Const(c.clone()));
        parent.push(None);
        root_var.push(None);
    }

    let mut types: Vec<VarType> = Vec::new();
    let mut type_of = Vec::with_capacity(exprs.len());
    for e in &exprs {
        let t = e.ty();
        let id = match types.iter().position(|x| *x == t) {
            Some(i) => i,
            None => {
                types.push(t);
                types.len() - 1
            }
        };
        type_of.push(id as u16);
    }
    let mut consts_per_type = vec![0 as Value; types.len()];
    let mut const_value = vec![None; exprs.len()];
    for i in num_paths..exprs.len() {
        let t = type_of[i] as usize;
        const_value[i] = Some(consts_per_type[t]);
        consts_per_type[t] += 1;
    }
    let mut children: Vec<Vec<(String, ExprId)>> = vec![Vec::new(); exprs.len()];
    for (i, p) in parent.iter().enumerate() {
        if let (Some(p), Expression::Path { attrs, .. }) = (p, &exprs[i]) {
            children[*p as usize].push((attrs.last().expect("child path").clone(), i as ExprId));
        }
    }
    let by_name = exprs.iter().enumerate().map(|(i, e)| (e.to_string(), i as ExprId)).collect();
    NavigationSet {
        exprs,
        type_of,
        types,
        root_var,
        parent,
        children,
        const_value,
        consts_per_type,
        vars: variables.to_vec(),
        var_range,
        by_name,
        num_paths,
    }
}

impl NavigationSet {
    pub fn len(&self) -> usize {
        self.exprs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exprs.is_empty()
    }

    pub fn expressions(&self) -> &[Expression] {
        &self.exprs
    }

    pub fn expr(&self, e: ExprId) -> &Expression {
        &self.exprs[e as usize]
    }

    pub fn name(&self, e: ExprId) -> String {
        self.exprs[e as usize].to_string()
    }

    pub fn index_of(&self, name: &str) -> Option<ExprId> {
        self.by_name.get(name).copied()
    }

    pub fn variables(&self) -> &[TypedVar] {
        &self.vars
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    /// Expression of the variable itself.
    pub fn var_expr(&self, var: usize) -> ExprId {
        self.var_range[var].0
    }

    /// Expressions rooted at a variable, in canonical order.
    pub fn rooted_at(&self, var: usize) -> std::ops::Range<ExprId> {
        self.var_range[var].0..self.var_range[var].1
    }

    pub fn root_var(&self, e: ExprId) -> Option<usize> {
        self.root_var[e as usize].map(|v| v as usize)
    }

    pub fn num_paths(&self) -> usize {
        self.num_paths
    }

    pub fn is_const(&self, e: ExprId) -> bool {
        (e as usize) >= self.num_paths
    }

    pub fn constants(&self) -> impl Iterator<Item = ExprId> + '_ {
        (self.num_paths as ExprId)..(self.exprs.len() as ExprId)
    }

    pub fn const_value(&self, e: ExprId) -> Option<Value> {
        self.const_value[e as usize]
    }

    pub fn constant(&self, c: &Constant) -> Option<ExprId> {
        self.constants().find(|&e| matches!(&self.exprs[e as usize], Expression::Const(x) if x == c))
    }

    pub fn types(&self) -> &[VarType] {
        &self.types
    }

    pub fn type_id(&self, e: ExprId) -> usize {
        self.type_of[e as usize] as usize
    }

    pub fn ty(&self, e: ExprId) -> &VarType {
        &self.types[self.type_of[e as usize] as usize]
    }

    pub fn consts_of_type(&self, t: usize) -> Value {
        self.consts_per_type[t]
    }

    pub fn parent(&self, e: ExprId) -> Option<ExprId> {
        self.parent[e as usize]
    }

    pub fn children(&self, e: ExprId) -> &[(String, ExprId)] {
        &self.children[e as usize]
    }

    pub fn child(&self, e: ExprId, attr: &str) -> Option<ExprId> {
        self.children[e as usize].iter().find(|(a, _)| a == attr).map(|(_, c)| *c)
    }

    /// Pairs `(e.w, e'.w)` for every non-empty attribute sequence `w` with
    /// both sides in the set, in preorder.
    pub fn continuations(&self, a: ExprId, b: ExprId) -> Vec<(ExprId, ExprId)> {
        let mut out = Vec::new();
        let mut stack = vec![(a, b)];
        while let Some((x, y)) = stack.pop() {
            let mut level = Vec::new();
            for (attr, cx) in self.children(x) {
                if let Some(cy) = self.child(y, attr) {
                    level.push((*cx, cy));
                }
            }
            for p in level.iter().rev() {
                stack.push(*p);
            }
            out.extend(level.iter().map(|p| (p.0, p.1)));
        }
        // Re-sort into preorder of the left side, which is the canonical order.
        out.sort_by_key(|p| p.0);
        out
    }

    /// Stable text for a value of expression `e`: the constant's name when
    /// the value is reserved for a constant, `t<TYPE>#<n>` otherwise.
    pub fn value_tag(&self, e: ExprId, v: Value) -> String {
        let t = self.type_id(e);
        if v < self.consts_per_type[t] {
            let c = self.constants().find(|&c| self.type_id(c) == t && self.const_value(c) == Some(v));
            return self.name(c.expect("reserved value has a constant"));
        }
        format!("t{}#{v}", self.types[t])
    }

    /// Inverse of [`value_tag`](Self::value_tag).
    pub fn parse_value_tag(&self, e: ExprId, tag: &str) -> Option<Value> {
        let t = self.type_id(e);
        if let Some(rest) = tag.strip_prefix('t') {
            if let Some((ty, n)) = rest.rsplit_once('#') {
                if ty == self.types[t].name() {
                    return n.parse().ok();
                }
            }
        }
        let c = self.index_of(tag)?;
        if self.is_const(c) && self.type_id(c) == t {
            self.const_value(c)
        } else {
            None
        }
    }

    /// Pairs of same-typed path expressions that have attributes, each with
    /// one entry per attribute: `(e, e', e.A, e'.A)`. Pairs are ordered by
    /// their distance in canonical order, then by position.
    pub fn congruence_constraints(&self) -> Vec<[ExprId; 4]> {
        let with_attrs: Vec<ExprId> = (0..self.num_paths as ExprId).filter(|&e| !self.children(e).is_empty()).collect();
        let n = with_attrs.len();
        let mut out = Vec::new();
        for gap in 1..n {
            for i in 0..n - gap {
                let (a, b) = (with_attrs[i], with_attrs[i + gap]);
                if self.type_of[a as usize] != self.type_of[b as usize] {
                    continue;
                }
                for (attr, ca) in self.children(a) {
                    let cb = self.child(b, attr).expect("same type has same attributes");
                    out.push([a, b, *ca, cb]);
                }
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Conditions over expressions

/// A condition compiled to expression indices. Relational atoms are expanded
/// to equalities over the id's attributes, guarded by `id != null` when the
/// id type's null is in the navigation set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ExprCond {
    True,
    False,
    Eq(ExprId, ExprId),
    Neq(ExprId, ExprId),
    Not(Box<ExprCond>),
    And(Vec<ExprCond>),
    Or(Vec<ExprCond>),
}

impl ExprCond {
    pub fn eval(&self, v: &[Value]) -> bool {
        match self {
            ExprCond::True => true,
            ExprCond::False => false,
            ExprCond::Eq(a, b) => v[*a as usize] == v[*b as usize],
            ExprCond::Neq(a, b) => v[*a as usize] != v[*b as usize],
            ExprCond::Not(x) => !x.eval(v),
            ExprCond::And(cs) => cs.iter().all(|c| c.eval(v)),
            ExprCond::Or(cs) => cs.iter().any(|c| c.eval(v)),
        }
    }

    /// Three-valued evaluation where only expressions with `known(e)` have
    /// meaningful values.
    pub fn eval_partial(&self, v: &[Value], known: &impl Fn(ExprId) -> bool) -> Option<bool> {
        match self {
            ExprCond::True => Some(true),
            ExprCond::False => Some(false),
            ExprCond::Eq(a, b) | ExprCond::Neq(a, b) => {
                if known(*a) && known(*b) {
                    Some((v[*a as usize] == v[*b as usize]) == matches!(self, ExprCond::Eq(..)))
                } else {
                    None
                }
            }
            ExprCond::Not(x) => x.eval_partial(v, known).map(|b| !b),
            ExprCond::And(cs) => {
                let mut all = true;
                for c in cs {
                    match c.eval_partial(v, known) {
                        Some(false) => return Some(false),
                        None => all = false,
                        Some(true) => {}
                    }
                }
                all.then_some(true)
            }
            ExprCond::Or(cs) => {
                let mut none = true;
                for c in cs {
                    match c.eval_partial(v, known) {
                        Some(true) => return Some(true),
                        None => none = false,
                        Some(false) => {}
                    }
                }
                none.then_some(false)
            }
        }
    }

    /// Negation normal form: no `Not` nodes remain, nested conjunctions and
    /// disjunctions are flattened.
    pub fn nnf(&self) -> ExprCond {
        fn go(c: &ExprCond, neg: bool) -> ExprCond {
            match (c, neg) {
                (ExprCond::True, false) | (ExprCond::False, true) => ExprCond::True,
                (ExprCond::True, true) | (ExprCond::False, false) => ExprCond::False,
                (ExprCond::Eq(a, b), false) | (ExprCond::Neq(a, b), true) => ExprCond::Eq(*a, *b),
                (ExprCond::Eq(a, b), true) | (ExprCond::Neq(a, b), false) => ExprCond::Neq(*a, *b),
                (ExprCond::Not(x), _) => go(x, !neg),
                (ExprCond::And(cs), false) | (ExprCond::Or(cs), true) => ExprCond::And(flat(cs, neg, true)),
                (ExprCond::Or(cs), false) | (ExprCond::And(cs), true) => ExprCond::Or(flat(cs, neg, false)),
            }
        }
        fn flat(cs: &[ExprCond], neg: bool, conj: bool) -> Vec<ExprCond> {
            let mut out = Vec::new();
            for c in cs {
                match go(c, neg) {
                    ExprCond::And(xs) if conj => out.extend(xs),
                    ExprCond::Or(xs) if !conj => out.extend(xs),
                    x => out.push(x),
                }
            }
            out
        }
        go(self, false)
    }

    /// Expressions mentioned, deduplicated, ascending.
    pub fn expressions(&self) -> Vec<ExprId> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |_, a, b| {
            out.insert(a);
            out.insert(b);
        });
        out.into_iter().collect()
    }

    /// Calls `f(is_eq, a, b)` for each atom, with the polarity it has in the
    /// negation normal form.
    pub fn visit_atoms(&self, f: &mut impl FnMut(bool, ExprId, ExprId)) {
        fn go(c: &ExprCond, neg: bool, f: &mut dyn FnMut(bool, ExprId, ExprId)) {
            match c {
                ExprCond::True | ExprCond::False => {}
                ExprCond::Eq(a, b) => f(!neg, *a, *b),
                ExprCond::Neq(a, b) => f(neg, *a, *b),
                ExprCond::Not(x) => go(x, !neg, f),
                ExprCond::And(cs) | ExprCond::Or(cs) => cs.iter().for_each(|x| go(x, neg, f)),
            }
        }
        go(self, false, f)
    }

    /// Number of atoms.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit_atoms(&mut |_, _, _| n += 1);
        n
    }
}

/// Compiles a quantifier-free, well-typed condition over the variables of
/// `nav`.
pub fn compile_condition(
    schema: &DatabaseSchema,
    nav: &NavigationSet,
    c: &Condition,
) -> Result<ExprCond, SymbolicError> {
    let var_ty = |v: &str| nav.var_index(v).map(|i| nav.variables()[i].ty.clone());
    let term = |t: &Term, ty: Option<&VarType>| -> Result<ExprId, SymbolicError> {
        match t {
            Term::Var(v) => {
                nav.var_index(v).map(|i| nav.var_expr(i)).ok_or_else(|| SymbolicError::UnknownExpression(v.clone()))
            }
            Term::Str(s) => nav
                .constant(&Constant::Str(s.clone()))
                .ok_or_else(|| SymbolicError::UnknownExpression(format!("{s:?}"))),
            Term::Null => {
                let ty = ty.ok_or_else(|| SymbolicError::UnknownExpression("null".into()))?;
                nav.constant(&Constant::Null(ty.clone()))
                    .ok_or_else(|| SymbolicError::UnknownExpression(format!("null@{ty}")))
            }
        }
    };
    let side_type = |t: &Term| match t {
        Term::Var(v) => var_ty(v),
        Term::Str(_) => Some(VarType::Val),
        Term::Null => None,
    };
    Ok(match c {
        Condition::True => ExprCond::True,
        Condition::False => ExprCond::False,
        Condition::Eq(a, b) | Condition::Neq(a, b) => {
            let ea = term(a, side_type(b).as_ref())?;
            let eb = term(b, side_type(a).as_ref())?;
            if matches!(c, Condition::Eq(..)) {
                ExprCond::Eq(ea, eb)
            } else {
                ExprCond::Neq(ea, eb)
            }
        }
        Condition::Rel(atom) => {
            let rel =
                schema.relation(&atom.relation).ok_or_else(|| SymbolicError::UnknownRelation(atom.relation.clone()))?;
            let id_ty = VarType::Id(rel.name.clone());
            if atom.args[0] == Term::Null {
                return Ok(ExprCond::False);
            }
            let x = term(&atom.args[0], Some(&id_ty))?;
            let mut parts = Vec::new();
            if let Some(null) = nav.constant(&Constant::Null(id_ty)) {
                parts.push(ExprCond::Neq(x, null));
            }
            for (attr, arg) in rel.attributes.iter().zip(&atom.args[1..]) {
                let ty = match &attr.kind {
                    AttrKind::Val => VarType::Val,
                    AttrKind::ForeignKey(r) => VarType::Id(r.clone()),
                };
                let xa = nav
                    .child(x, &attr.name)
                    .ok_or_else(|| SymbolicError::UnknownExpression(format!("{}.{}", nav.name(x), attr.name)))?;
                parts.push(ExprCond::Eq(xa, term(arg, Some(&ty))?));
            }
            match parts.len() {
                0 => ExprCond::True,
                1 => parts.pop().unwrap(),
                _ => ExprCond::And(parts),
            }
        }
        Condition::Not(x) => ExprCond::Not(Box::new(compile_condition(schema, nav, x)?)),
        Condition::And(cs) => {
            ExprCond::And(cs.iter().map(|x| compile_condition(schema, nav, x)).collect::<Result<_, _>>()?)
        }
        Condition::Or(cs) => {
            ExprCond::Or(cs.iter().map(|x| compile_condition(schema, nav, x)).collect::<Result<_, _>>()?)
        }
        Condition::Exists(..) => return Err(SymbolicError::Quantified),
    })
}

// ---------------------------------------------------------------------------
// States and transitions

/// A valuation of the navigation set plus the service that produced it
/// (0 is `init`, `i + 1` is service `i`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SymbolicState {
    pub values: Vec<Value>,
    pub last_service: u16,
}

/// Restriction of a valuation to some expressions, as `(expression, value)`
/// pairs in canonical order. Fresh values are renamed per type in order of
/// first occurrence, so isomorphic restrictions compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProjectedState(pub Vec<(ExprId, Value)>);

/// Projection onto the expressions rooted at `vars` plus the constants.
pub fn project(nav: &NavigationSet, state: &SymbolicState, vars: &[usize]) -> ProjectedState {
    let mut keep: Vec<ExprId> = vars.iter().flat_map(|&v| nav.rooted_at(v)).collect();
    keep.extend(nav.constants());
    keep.sort_unstable();
    keep.dedup();
    let mut next: Vec<Value> = (0..nav.types().len()).map(|t| nav.consts_of_type(t)).collect();
    let mut renamed: std::collections::HashMap<(usize, Value), Value> = std::collections::HashMap::new();
    ProjectedState(
        keep.into_iter()
            .map(|e| {
                let (t, v) = (nav.type_id(e), state.values[e as usize]);
                if v < nav.consts_of_type(t) {
                    return (e, v);
                }
                let r = *renamed.entry((t, v)).or_insert_with(|| {
                    next[t] += 1;
                    next[t] - 1
                });
                (e, r)
            })
            .collect(),
    )
}

/// Whether `v(e) = v(e')` implies `v(e.A) = v(e'.A)` for every constraint.
pub fn is_congruent(constraints: &[[ExprId; 4]], v: &[Value]) -> bool {
    constraints.iter().all(|[a, b, ca, cb]| v[*a as usize] != v[*b as usize] || v[*ca as usize] == v[*cb as usize])
}

/// Non-constant values grouped by type and by the set of pools they occur
/// in. Renaming values within a class maps pools to pools and preserves
/// every atom, so states related by such a renaming are interchangeable.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ValueClasses {
    /// Members of each class in increasing order.
    pub classes: Vec<Vec<Value>>,
    /// Per type and value, the class and position in it.
    index: Vec<Vec<Option<(usize, usize)>>>,
}

impl ValueClasses {
    pub fn new(nav: &NavigationSet, pools: &AssignmentSets) -> Self {
        let types = nav.types().len();
        let mut occurs: Vec<BTreeMap<Value, Vec<ExprId>>> = vec![BTreeMap::new(); types];
        for e in 0..nav.num_paths() as ExprId {
            let t = nav.type_id(e);
            for &v in pools.pool(e) {
                if v >= nav.consts_of_type(t) {
                    occurs[t].entry(v).or_default().push(e);
                }
            }
        }
        let mut classes = Vec::new();
        let mut index = vec![Vec::new(); types];
        for (t, by_value) in occurs.into_iter().enumerate() {
            let mut groups: BTreeMap<Vec<ExprId>, Vec<Value>> = BTreeMap::new();
            for (v, exprs) in by_value {
                groups.entry(exprs).or_default().push(v);
            }
            let mut groups: Vec<Vec<Value>> = groups.into_values().collect();
            groups.sort();
            for members in groups {
                for chunk in members.chunks(64) {
                    for (i, &v) in chunk.iter().enumerate() {
                        if index[t].len() <= v as usize {
                            index[t].resize(v as usize + 1, None);
                        }
                        index[t][v as usize] = Some((classes.len(), i));
                    }
                    classes.push(chunk.to_vec());
                }
            }
        }
        ValueClasses { classes, index }
    }

    pub fn class_of(&self, t: usize, v: Value) -> Option<(usize, usize)> {
        self.index[t].get(v as usize).copied().flatten()
    }
}

/// Candidate values per expression. Constants map to their reserved value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignmentSets {
    pub pools: Vec<Vec<Value>>,
}

impl AssignmentSets {
    pub fn pool(&self, e: ExprId) -> &[Value] {
        &self.pools[e as usize]
    }

    /// Mean pool size over non-constant expressions.
    pub fn average_size(&self, nav: &NavigationSet) -> f64 {
        let n = nav.num_paths();
        if n == 0 {
            return 0.0;
        }
        self.pools[..n].iter().map(Vec::len).sum::<usize>() as f64 / n as f64
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledService {
    pub name: String,
    pub pre: ExprCond,
    pub post: ExprCond,
    /// Variable indices kept by the service.
    pub propagated: Vec<usize>,
}

/// One enumeration schedule: which expressions are drawn, and which checks
/// become decidable after each draw.
#[derive(Clone, Debug)]
struct Plan {
    free: Vec<ExprId>,
    /// 0 for fixed expressions, `k + 1` for `free[k]`.
    order: Vec<u32>,
    check_cond: Vec<bool>,
    congruence_at: Vec<Vec<usize>>,
}

impl Plan {
    fn new(nav: &NavigationSet, fixed: &[bool], cond: &ExprCond, constraints: &[[ExprId; 4]]) -> Plan {
        let free: Vec<ExprId> = (0..nav.len() as ExprId).filter(|&e| !fixed[e as usize]).collect();
        let mut order = vec![0u32; nav.len()];
        for (k, &e) in free.iter().enumerate() {
            order[e as usize] = k as u32 + 1;
        }
        let mentioned = cond.expressions();
        let check_cond = free.iter().map(|e| mentioned.binary_search(e).is_ok()).collect();
        let mut congruence_at = vec![Vec::new(); free.len()];
        for (i, c) in constraints.iter().enumerate() {
            let last = c.iter().map(|&e| order[e as usize]).max().unwrap_or(0);
            if last > 0 {
                congruence_at[last as usize - 1].push(i);
            }
        }
        Plan { free, order, check_cond, congruence_at }
    }
}

/// The finite transition system of isomorphism types for a compiled,
/// mode-rewritten system and a choice of assignment sets.
#[derive(Clone, Debug)]
pub struct TransitionSystem {
    pub nav: NavigationSet,
    pub init: ExprCond,
    pub services: Vec<CompiledService>,
    pub pools: AssignmentSets,
    pub mode: Mode,
    pub constraints: Vec<[ExprId; 4]>,
    /// Interchangeable values: states are enumerated once per renaming
    /// within each class and relabelled canonically.
    pub symmetry: ValueClasses,
    init_plan: Plan,
    plans: Vec<Plan>,
}

impl TransitionSystem {
    pub fn new(
        nav: NavigationSet,
        init: ExprCond,
        services: Vec<CompiledService>,
        pools: AssignmentSets,
        mode: Mode,
    ) -> Self {
        let constraints = nav.congruence_constraints();
        let checks: &[[ExprId; 4]] = if mode == Mode::Naive { &constraints } else { &[] };
        let mut fixed: Vec<bool> = (0..nav.len() as ExprId).map(|e| nav.is_const(e)).collect();
        let init_plan = Plan::new(&nav, &fixed, &init, checks);
        let plans = services
            .iter()
            .map(|s| {
                fixed.iter_mut().enumerate().for_each(|(e, f)| *f = nav.is_const(e as ExprId));
                for &v in &s.propagated {
                    for e in nav.rooted_at(v) {
                        fixed[e as usize] = true;
                    }
                }
                Plan::new(&nav, &fixed, &s.post, checks)
            })
            .collect();
        let symmetry = ValueClasses::new(&nav, &pools);
        TransitionSystem { nav, init, services, pools, mode, constraints, symmetry, init_plan, plans }
    }

    /// Used members of each value class among the fixed non-constant
    /// expressions of `plan`.
    fn used_masks(&self, plan: &Plan, vals: &[Value]) -> Vec<u64> {
        let mut used = vec![0u64; self.symmetry.classes.len()];
        for (e, &v) in vals.iter().enumerate().take(self.nav.num_paths()) {
            if plan.order[e] == 0 {
                if let Some((c, i)) = self.symmetry.class_of(self.nav.type_id(e as ExprId), v) {
                    used[c] |= 1 << i;
                }
            }
        }
        used
    }

    /// Renames values within each class in order of first occurrence.
    fn canonicalize(&self, vals: &mut [Value]) {
        let classes = &self.symmetry.classes;
        let mut next = vec![0usize; classes.len()];
        let mut map: Vec<[u8; 64]> = vec![[u8::MAX; 64]; classes.len()];
        for (e, v) in vals.iter_mut().enumerate().take(self.nav.num_paths()) {
            if let Some((c, i)) = self.symmetry.class_of(self.nav.type_id(e as ExprId), *v) {
                if map[c][i] == u8::MAX {
                    map[c][i] = next[c] as u8;
                    next[c] += 1;
                }
                *v = classes[c][map[c][i] as usize];
            }
        }
    }

    pub fn service_name(&self, last: u16) -> &str {
        if last == 0 {
            "init"
        } else {
            &self.services[last as usize - 1].name
        }
    }

    fn base_values(&self) -> Vec<Value> {
        (0..self.nav.len() as ExprId).map(|e| self.nav.const_value(e).unwrap_or(0)).collect()
    }

    /// Initial states in canonical enumeration order.
    pub fn initial_states(&self) -> Vec<SymbolicState> {
        let mut out = Vec::new();
        self.for_each_initial(&mut |s| out.push(s));
        out
    }

    pub fn for_each_initial(&self, out: &mut impl FnMut(SymbolicState)) {
        self.try_for_each_initial(&mut |s| {
            out(s);
            true
        });
    }

    /// Stops as soon as `out` returns false. Returns false if stopped.
    pub fn try_for_each_initial(&self, out: &mut impl FnMut(SymbolicState) -> bool) -> bool {
        let mut vals = self.base_values();
        let mut used = self.used_masks(&self.init_plan, &vals);
        self.enumerate(&self.init_plan, &self.init, &mut vals, &mut used, 0, 0, out)
    }

    /// Successors of `state` under service `j`, in canonical order. Empty if
    /// the pre-condition fails or every candidate is filtered.
    pub fn successors(&self, state: &SymbolicState, j: usize) -> Vec<SymbolicState> {
        let mut out = Vec::new();
        self.for_each_successor(state, j, &mut |s| out.push(s));
        out
    }

    pub fn for_each_successor(&self, state: &SymbolicState, j: usize, out: &mut impl FnMut(SymbolicState)) {
        self.try_for_each_successor(state, j, &mut |s| {
            out(s);
            true
        });
    }

    /// Like [`Self::for_each_successor`], stopping as soon as `out` returns
    /// false. Returns false if stopped.
    pub fn try_for_each_successor(
        &self,
        state: &SymbolicState,
        j: usize,
        out: &mut impl FnMut(SymbolicState) -> bool,
    ) -> bool {
        let svc = &self.services[j];
        if !svc.pre.eval(&state.values) {
            return true;
        }
        let mut vals = state.values.clone();
        let mut used = self.used_masks(&self.plans[j], &vals);
        self.enumerate(&self.plans[j], &svc.post, &mut vals, &mut used, 0, j as u16 + 1, out)
    }

    /// Depth-first assignment of the free expressions of `plan`. Within a
    /// value class only used members and the first unused one are tried.
    #[allow(clippy::too_many_arguments)]
    fn enumerate(
        &self,
        plan: &Plan,
        cond: &ExprCond,
        vals: &mut Vec<Value>,
        used: &mut [u64],
        k: usize,
        last: u16,
        out: &mut impl FnMut(SymbolicState) -> bool,
    ) -> bool {
        if k == plan.free.len() {
            if cond.eval(vals) {
                let mut values = vals.clone();
                self.canonicalize(&mut values);
                return out(SymbolicState { values, last_service: last });
            }
            return true;
        }
        let e = plan.free[k] as usize;
        let t = self.nav.type_id(e as ExprId);
        let known = |x: ExprId| plan.order[x as usize] <= k as u32 + 1;
        'values: for &v in &self.pools.pools[e] {
            let class = self.symmetry.class_of(t, v);
            if let Some((c, i)) = class {
                if used[c] & (1 << i) == 0 && i != used[c].trailing_ones() as usize {
                    continue;
                }
            }
            vals[e] = v;
            if plan.check_cond[k] && cond.eval_partial(vals, &known) == Some(false) {
                continue;
            }
            for &ci in &plan.congruence_at[k] {
                let [a, b, ca, cb] = self.constraints[ci];
                if vals[a as usize] == vals[b as usize] && vals[ca as usize] != vals[cb as usize] {
                    continue 'values;
                }
            }
            let go_on = match class {
                Some((c, i)) => {
                    let saved = used[c];
                    used[c] |= 1 << i;
                    let r = self.enumerate(plan, cond, vals, used, k + 1, last, out);
                    used[c] = saved;
                    r
                }
                None => self.enumerate(plan, cond, vals, used, k + 1, last, out),
            };
            if !go_on {
                return false;
            }
        }
        true
    }

    /// Whether `to` is a valid successor of `from` under service `j`,
    /// ignoring assignment sets.
    pub fn is_transition(&self, from: &SymbolicState, j: usize, to: &SymbolicState) -> bool {
        let svc = &self.services[j];
        if to.last_service as usize != j + 1 || !svc.pre.eval(&from.values) || !svc.post.eval(&to.values) {
            return false;
        }
        if project(&self.nav, from, &svc.propagated) != project(&self.nav, to, &svc.propagated) {
            return false;
        }
        self.mode == Mode::Ldt || is_congruent(&self.constraints, &to.values)
    }

    /// Whether `s` is a valid initial state, ignoring assignment sets.
    pub fn is_initial(&self, s: &SymbolicState) -> bool {
        s.last_service == 0
            && self.nav.constants().all(|c| Some(s.values[c as usize]) == self.nav.const_value(c))
            && self.init.eval(&s.values)
            && (self.mode == Mode::Ldt || is_congruent(&self.constraints, &s.values))
    }
}
