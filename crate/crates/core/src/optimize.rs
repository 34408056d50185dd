//! Lazy dependency tests and assignment set minimization.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::model::{Constant, VarType};
use crate::symbolic::{AssignmentSets, ExprCond, ExprId, Mode, NavigationSet, Value};

/// Rewrites `c` into negation normal form and expands every equality into
/// the equalities over its shared attribute continuations, and every
/// inequality into the dual disjunction.
pub fn ldt_rewrite(nav: &NavigationSet, c: &ExprCond) -> ExprCond {
    ldt_expand(nav, &c.nnf())
}

/// The same expansion without normalizing first. `e == e'` becomes the
/// conjunction of `e.w == e'.w` over shared continuations `w`, `e != e'`
/// the disjunction of `e.w != e'.w`. Inside a conjunction each maximal run
/// of equalities is followed by the continuations of the atoms in the run,
/// and dually for inequalities inside a disjunction.
pub fn ldt_expand(nav: &NavigationSet, c: &ExprCond) -> ExprCond {
    match c {
        ExprCond::Eq(a, b) | ExprCond::Neq(a, b) => {
            let eq = matches!(c, ExprCond::Eq(..));
            let conts = cont_atoms(nav, *a, *b, eq);
            if conts.is_empty() {
                return c.clone();
            }
            let mut parts = vec![c.clone()];
            parts.extend(conts);
            if eq {
                ExprCond::And(parts)
            } else {
                ExprCond::Or(parts)
            }
        }
        ExprCond::Not(x) => ExprCond::Not(Box::new(ldt_expand(nav, x))),
        ExprCond::And(cs) | ExprCond::Or(cs) => {
            let conj = matches!(c, ExprCond::And(_));
            let mut out = Vec::new();
            let mut pending = Vec::new();
            for x in cs {
                match x {
                    ExprCond::Eq(a, b) if conj => {
                        out.push(x.clone());
                        pending.extend(cont_atoms(nav, *a, *b, true));
                    }
                    ExprCond::Neq(a, b) if !conj => {
                        out.push(x.clone());
                        pending.extend(cont_atoms(nav, *a, *b, false));
                    }
                    _ => {
                        out.append(&mut pending);
                        out.push(ldt_expand(nav, x));
                    }
                }
            }
            out.append(&mut pending);
            if conj {
                ExprCond::And(out)
            } else {
                ExprCond::Or(out)
            }
        }
        other => other.clone(),
    }
}

/// The tests `e.w == e'.w` (or `!=`) over shared continuations, in preorder.
/// When `null` of the type of `a` is in the set, the tests below `a` are
/// gated on `a != null`: a null reference has no attribute values.
fn cont_atoms(nav: &NavigationSet, a: ExprId, b: ExprId, eq: bool) -> Vec<ExprCond> {
    let atom = |x, y| if eq { ExprCond::Eq(x, y) } else { ExprCond::Neq(x, y) };
    let mut rest = Vec::new();
    for (attr, ca) in nav.children(a) {
        if let Some(cb) = nav.child(b, attr) {
            rest.push(atom(*ca, cb));
            rest.extend(cont_atoms(nav, *ca, cb, eq));
        }
    }
    let null = match nav.ty(a) {
        ty @ VarType::Id(_) => nav.constant(&Constant::Null(ty.clone())),
        VarType::Val => None,
    };
    match null {
        Some(n) if !rest.is_empty() => {
            let inner = if rest.len() == 1 {
                rest.pop().unwrap()
            } else if eq {
                ExprCond::And(rest)
            } else {
                ExprCond::Or(rest)
            };
            vec![if eq {
                ExprCond::Or(vec![ExprCond::Eq(a, n), inner])
            } else {
                ExprCond::And(vec![ExprCond::Neq(a, n), inner])
            }]
        }
        _ => rest,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EdgeLabel {
    Eq,
    Neq,
}

/// Undirected labelled edge with `a < b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub a: ExprId,
    pub b: ExprId,
    pub label: EdgeLabel,
}

impl Edge {
    pub fn new(a: ExprId, b: ExprId, label: EdgeLabel) -> Self {
        Edge { a: a.min(b), b: a.max(b), label }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConstraintGraph {
    pub num_nodes: usize,
    pub edges: BTreeSet<Edge>,
}

impl ConstraintGraph {
    pub fn eq_edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(|e| e.label == EdgeLabel::Eq)
    }

    pub fn neq_edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(|e| e.label == EdgeLabel::Neq)
    }
}

/// Collects one edge per distinct atom of the given conditions, taken with
/// their polarity in negation normal form. In naive mode the congruence
/// check tests `e != e'` and `e.A == e'.A`; those atoms are added too.
pub fn build_constraint_graph(nav: &NavigationSet, conds: &[&ExprCond], mode: Mode) -> ConstraintGraph {
    let mut edges = BTreeSet::new();
    for c in conds {
        c.visit_atoms(&mut |is_eq, a, b| {
            if a != b {
                edges.insert(Edge::new(a, b, if is_eq { EdgeLabel::Eq } else { EdgeLabel::Neq }));
            }
        });
    }
    if mode == Mode::Naive {
        for [a, b, ca, cb] in nav.congruence_constraints() {
            edges.insert(Edge::new(a, b, EdgeLabel::Neq));
            if ca != cb {
                edges.insert(Edge::new(ca, cb, EdgeLabel::Eq));
            }
        }
    }
    ConstraintGraph { num_nodes: nav.len(), edges }
}

/// Smallest `k >= 1` with `k(k-1) >= 2m`.
pub fn chromatic_bound(m: usize) -> usize {
    let mut k = ((1.0 + (1.0 + 8.0 * m as f64).sqrt()) / 2.0).ceil() as usize;
    k = k.max(1);
    while k > 1 && (k - 1) * (k - 2) >= 2 * m {
        k -= 1;
    }
    while k * (k - 1) < 2 * m {
        k += 1;
    }
    k
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// An `=`-connected component of the constraint graph with its pool size.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub members: Vec<ExprId>,
    /// `!=`-edges with at least one endpoint in the component.
    pub m: usize,
    /// Number of fresh values given to the component.
    pub k: usize,
    pub constants: Vec<ExprId>,
}

/// Components in order of their smallest member.
pub fn components(g: &ConstraintGraph, nav: &NavigationSet) -> Vec<Component> {
    let mut uf = UnionFind::new(g.num_nodes);
    for e in g.eq_edges() {
        uf.union(e.a as usize, e.b as usize);
    }
    let mut by_root: Vec<Option<usize>> = vec![None; g.num_nodes];
    let mut comps: Vec<Component> = Vec::new();
    for n in 0..g.num_nodes {
        let r = uf.find(n);
        let ci = *by_root[r].get_or_insert_with(|| {
            comps.push(Component { members: Vec::new(), m: 0, k: 0, constants: Vec::new() });
            comps.len() - 1
        });
        comps[ci].members.push(n as ExprId);
        if nav.is_const(n as ExprId) {
            comps[ci].constants.push(n as ExprId);
        }
    }
    for e in g.neq_edges() {
        let (ca, cb) = (by_root[uf.find(e.a as usize)].unwrap(), by_root[uf.find(e.b as usize)].unwrap());
        comps[ca].m += 1;
        if cb != ca {
            comps[cb].m += 1;
        }
    }
    for c in &mut comps {
        let non_const = c.members.len() - c.constants.len();
        c.k = chromatic_bound(c.m).min(non_const.max(1));
    }
    comps
}

/// Pools from the constraint graph: every expression of a component draws
/// from the component's constants plus `k` fresh values, never shared with
/// another component.
pub fn minimize_assignment_sets(g: &ConstraintGraph, nav: &NavigationSet) -> AssignmentSets {
    let mut next_fresh: Vec<Value> = (0..nav.types().len()).map(|t| nav.consts_of_type(t)).collect();
    let mut pools = vec![Vec::new(); nav.len()];
    for comp in components(g, nav) {
        let non_const: Vec<ExprId> = comp.members.iter().copied().filter(|&e| !nav.is_const(e)).collect();
        for &c in &comp.constants {
            pools[c as usize] = vec![nav.const_value(c).unwrap()];
        }
        let Some(&first) = non_const.first() else { continue };
        let t = nav.type_id(first);
        let mut pool: Vec<Value> = comp.constants.iter().map(|&c| nav.const_value(c).unwrap()).collect();
        pool.extend(next_fresh[t]..next_fresh[t] + comp.k as Value);
        next_fresh[t] += comp.k as Value;
        pool.sort_unstable();
        for e in non_const {
            pools[e as usize] = pool.clone();
        }
    }
    AssignmentSets { pools }
}

/// Per type, every expression draws from the type's constants plus one
/// fresh value per non-constant expression of the type.
pub fn naive_assignment_sets(nav: &NavigationSet) -> AssignmentSets {
    let mut count = vec![0 as Value; nav.types().len()];
    for e in 0..nav.num_paths() as ExprId {
        count[nav.type_id(e)] += 1;
    }
    let pools = (0..nav.len() as ExprId)
        .map(|e| match nav.const_value(e) {
            Some(v) => vec![v],
            None => {
                let t = nav.type_id(e);
                (0..nav.consts_of_type(t) + count[t]).collect()
            }
        })
        .collect();
    AssignmentSets { pools }
}

/// Whether some valuation with distinct constants satisfies all `edges`.
pub fn is_consistent(nav: &NavigationSet, edges: &[Edge]) -> bool {
    let mut uf = UnionFind::new(nav.len());
    for e in edges.iter().filter(|e| e.label == EdgeLabel::Eq) {
        uf.union(e.a as usize, e.b as usize);
    }
    let mut const_root = BTreeSet::new();
    for c in nav.constants() {
        if !const_root.insert(uf.find(c as usize)) {
            return false;
        }
    }
    edges.iter().filter(|e| e.label == EdgeLabel::Neq).all(|e| uf.find(e.a as usize) != uf.find(e.b as usize))
}

/// Pool condition: every `=`-edge joins non-constant expressions
/// with equal pools. An edge to a constant needs the constant's value in
/// the other pool.
pub fn eq_edges_share_pools(nav: &NavigationSet, g: &ConstraintGraph, pools: &AssignmentSets) -> bool {
    g.eq_edges().all(|e| match (nav.const_value(e.a), nav.const_value(e.b)) {
        (None, None) => pools.pool(e.a) == pools.pool(e.b),
        (Some(v), None) => pools.pool(e.b).contains(&v),
        (None, Some(v)) => pools.pool(e.a).contains(&v),
        (Some(_), Some(_)) => true,
    })
}

/// A random consistent subgraph of `g`. Edges are visited in random order
/// and each is kept with probability `density` when the kept set stays
/// consistent.
pub fn sample_consistent_subgraph(
    nav: &NavigationSet,
    g: &ConstraintGraph,
    density: f64,
    rng: &mut impl Rng,
) -> Vec<Edge> {
    let mut edges: Vec<Edge> = g.edges.iter().copied().collect();
    edges.shuffle(rng);
    let mut kept = Vec::new();
    for e in edges {
        if rng.gen_bool(density) {
            kept.push(e);
            if !is_consistent(nav, &kept) {
                kept.pop();
            }
        }
    }
    kept.sort();
    kept
}

/// Looks for a valuation drawing from `pools` that satisfies the consistent
/// edge set `edges`. Classes of `=` are colored greedily in smallest-last
/// order, which needs at most one more color than the degeneracy.
pub fn greedy_witness(nav: &NavigationSet, pools: &AssignmentSets, edges: &[Edge]) -> Option<Vec<Value>> {
    let n = nav.len();
    let mut uf = UnionFind::new(n);
    for e in edges.iter().filter(|e| e.label == EdgeLabel::Eq) {
        uf.union(e.a as usize, e.b as usize);
    }
    let roots: Vec<usize> = (0..n).map(|i| uf.find(i)).collect();
    let mut fixed: Vec<Option<Value>> = vec![None; n];
    for c in nav.constants() {
        fixed[roots[c as usize]] = nav.const_value(c);
    }
    // Allowed values per class: intersection of members' pools.
    let mut allowed: Vec<Option<Vec<Value>>> = vec![None; n];
    for (i, &r) in roots.iter().enumerate() {
        let p = pools.pool(i as ExprId);
        allowed[r] = Some(match allowed[r].take() {
            None => p.to_vec(),
            Some(a) => a.into_iter().filter(|v| p.contains(v)).collect(),
        });
    }
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for e in edges.iter().filter(|e| e.label == EdgeLabel::Neq) {
        let (a, b) = (roots[e.a as usize], roots[e.b as usize]);
        adj[a].insert(b);
        adj[b].insert(a);
    }
    let classes: Vec<usize> = (0..n).filter(|&i| roots[i] == i).collect();
    // Smallest-last order over free classes.
    let mut free: BTreeSet<usize> = classes.iter().copied().filter(|&c| fixed[c].is_none()).collect();
    let mut order = Vec::new();
    while !free.is_empty() {
        let &v = free.iter().min_by_key(|&&v| (adj[v].iter().filter(|u| free.contains(u)).count(), v)).unwrap();
        free.remove(&v);
        order.push(v);
    }
    order.reverse();
    let mut value: Vec<Option<Value>> = fixed.clone();
    for c in &classes {
        if let Some(v) = fixed[*c] {
            if !allowed[*c].as_ref().is_some_and(|a| a.contains(&v)) {
                return None;
            }
        }
    }
    for v in order {
        let used: BTreeSet<Value> = adj[v].iter().filter_map(|&u| value[u]).collect();
        let pick = allowed[v].as_ref()?.iter().copied().find(|x| !used.contains(x))?;
        value[v] = Some(pick);
    }
    let vals: Vec<Value> = (0..n).map(|i| value[roots[i]].expect("every class colored")).collect();
    let sat = edges.iter().all(|e| {
        let eq = vals[e.a as usize] == vals[e.b as usize];
        eq == (e.label == EdgeLabel::Eq)
    });
    sat.then_some(vals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Attribute, DatabaseSchema, Relation, TypedVar};
    use crate::symbolic::build_navigation_set;

    fn nav_r_a(vars: &[&str], consts: &[&str]) -> NavigationSet {
        let schema = DatabaseSchema { relations: vec![Relation::new("R", vec![Attribute::val("A")])] };
        let vars: Vec<TypedVar> = vars.iter().map(|v| TypedVar::new(*v, VarType::Id("R".into()))).collect();
        let consts = consts.iter().map(|c| Constant::Str(c.to_string())).collect();
        build_navigation_set(&schema, &vars, &consts)
    }

    #[test]
    fn chromatic_bound_values() {
        assert_eq!(chromatic_bound(0), 1);
        assert_eq!(chromatic_bound(1), 2);
        assert_eq!(chromatic_bound(2), 3);
        assert_eq!(chromatic_bound(3), 3);
        assert_eq!(chromatic_bound(4), 4);
        assert_eq!(chromatic_bound(6), 4);
        assert_eq!(chromatic_bound(7), 5);
        for m in 0..500 {
            let k = chromatic_bound(m);
            assert!(k >= 1 && k * (k - 1) >= 2 * m);
            assert!(k == 1 || (k - 1) * (k - 2) < 2 * m);
        }
    }

    #[test]
    fn guard_gains_one_term() {
        let nav = nav_r_a(&["x", "y", "z"], &["c0"]);
        let id = |s: &str| nav.index_of(s).unwrap();
        let pre = ExprCond::And(vec![
            ExprCond::Eq(id("x"), id("y")),
            ExprCond::Not(Box::new(ExprCond::Eq(id("z.A"), id("\"c0\"")))),
        ]);
        assert_eq!(
            ldt_rewrite(&nav, &pre),
            ExprCond::And(vec![
                ExprCond::Eq(id("x"), id("y")),
                ExprCond::Eq(id("x.A"), id("y.A")),
                ExprCond::Neq(id("z.A"), id("\"c0\"")),
            ])
        );
        assert_eq!(
            ldt_expand(&nav, &pre),
            ExprCond::And(vec![
                ExprCond::Eq(id("x"), id("y")),
                ExprCond::Eq(id("x.A"), id("y.A")),
                ExprCond::Not(Box::new(ExprCond::Eq(id("z.A"), id("\"c0\"")))),
            ])
        );
    }

    #[test]
    fn val_atom_is_unchanged() {
        let nav = nav_r_a(&["x", "y"], &[]);
        let c = ExprCond::Eq(nav.index_of("x.A").unwrap(), nav.index_of("y.A").unwrap());
        assert_eq!(ldt_rewrite(&nav, &c), c);
    }

    #[test]
    fn negated_inequality_is_expanded_under_negation() {
        let nav = nav_r_a(&["x", "y"], &[]);
        let (x, y) = (nav.index_of("x").unwrap(), nav.index_of("y").unwrap());
        let (xa, ya) = (nav.index_of("x.A").unwrap(), nav.index_of("y.A").unwrap());
        let c = ExprCond::Not(Box::new(ExprCond::Neq(x, y)));
        assert_eq!(
            ldt_expand(&nav, &c),
            ExprCond::Not(Box::new(ExprCond::Or(vec![ExprCond::Neq(x, y), ExprCond::Neq(xa, ya)])))
        );
        assert_eq!(ldt_rewrite(&nav, &c), ExprCond::And(vec![ExprCond::Eq(x, y), ExprCond::Eq(xa, ya)]));
    }

    #[test]
    fn inequality_is_expanded_dually() {
        let nav = nav_r_a(&["x", "y"], &[]);
        let (x, y) = (nav.index_of("x").unwrap(), nav.index_of("y").unwrap());
        let (xa, ya) = (nav.index_of("x.A").unwrap(), nav.index_of("y.A").unwrap());
        assert_eq!(
            ldt_rewrite(&nav, &ExprCond::Neq(x, y)),
            ExprCond::Or(vec![ExprCond::Neq(x, y), ExprCond::Neq(xa, ya)])
        );
        // !(x == y) || x == y stays valid on states where x == y but x.A != y.A.
        let taut = ExprCond::Or(vec![ExprCond::Not(Box::new(ExprCond::Eq(x, y))), ExprCond::Eq(x, y)]);
        let rewritten = ldt_rewrite(&nav, &taut);
        let mut v = vec![0; nav.len()];
        v[xa as usize] = 1;
        assert!(rewritten.eval(&v));
    }

    /// One `=`-component over e1..e5 with three `!=`-edges. The consistent
    /// subgraph keeping e2 = e3, e4 = e5 and all `!=`-edges is a triangle
    /// after merging, so three values are needed and suffice.
    fn five_node_component() -> (NavigationSet, ConstraintGraph, Vec<Edge>) {
        let schema = DatabaseSchema { relations: vec![] };
        let vars: Vec<TypedVar> = (1..=5).map(|i| TypedVar::new(format!("e{i}"), VarType::Val)).collect();
        let nav = build_navigation_set(&schema, &vars, &Default::default());
        let e = |i: u32| i - 1;
        let eq = [(2, 3), (4, 5), (3, 4), (1, 3)].map(|(a, b)| Edge::new(e(a), e(b), EdgeLabel::Eq));
        let neq = [(1, 2), (3, 4), (1, 5)].map(|(a, b)| Edge::new(e(a), e(b), EdgeLabel::Neq));
        let g = ConstraintGraph { num_nodes: 5, edges: eq.iter().chain(neq.iter()).copied().collect() };
        let mut g1 = vec![eq[0], eq[1]];
        g1.extend(neq);
        (nav, g, g1)
    }

    #[test]
    fn five_node_component_needs_three_values() {
        let (nav, g, g1) = five_node_component();
        let comps = components(&g, &nav);
        assert_eq!(comps.len(), 1);
        assert_eq!((comps[0].members.len(), comps[0].m, comps[0].k), (5, 3, 3));
        let pools = minimize_assignment_sets(&g, &nav);
        assert!(pools.pools.iter().all(|p| p.len() == 3));
        assert!(eq_edges_share_pools(&nav, &g, &pools));
        assert!(is_consistent(&nav, &g1));
        assert!(greedy_witness(&nav, &pools, &g1).is_some());
        // Every consistent subset of the seven edges has a witness.
        let all: Vec<Edge> = g.edges.iter().copied().collect();
        for mask in 0u32..1 << all.len() {
            let sub: Vec<Edge> = (0..all.len()).filter(|i| mask >> i & 1 == 1).map(|i| all[i]).collect();
            if is_consistent(&nav, &sub) {
                assert!(greedy_witness(&nav, &pools, &sub).is_some(), "{sub:?}");
            }
        }
        // Two values are not enough for the triangle.
        let two = AssignmentSets { pools: vec![vec![0, 1]; 5] };
        let exhaustive = (0..32u32).any(|bits| {
            let v: Vec<Value> = (0..5).map(|i| (bits >> i & 1) as Value).collect();
            g1.iter().all(|e| (v[e.a as usize] == v[e.b as usize]) == (e.label == EdgeLabel::Eq))
        });
        assert!(!exhaustive);
        assert!(greedy_witness(&nav, &two, &g1).is_none());
    }

    #[test]
    fn sampled_subgraphs_are_consistent() {
        use rand::SeedableRng;
        let (nav, g, _) = five_node_component();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for density in [0.3, 0.7, 1.0] {
            for _ in 0..100 {
                let sub = sample_consistent_subgraph(&nav, &g, density, &mut rng);
                assert!(is_consistent(&nav, &sub));
                assert!(sub.iter().all(|e| g.edges.contains(e)));
            }
        }
    }

    #[test]
    fn edgeless_graph_gives_singletons() {
        let nav = nav_r_a(&["x", "y"], &["k"]);
        let g = build_constraint_graph(&nav, &[&ExprCond::True], Mode::Ldt);
        assert!(g.edges.is_empty());
        let sets = minimize_assignment_sets(&g, &nav);
        assert!(sets.pools.iter().all(|p| p.len() == 1));
    }

    #[test]
    fn constants_join_the_pool() {
        let schema = DatabaseSchema { relations: vec![] };
        let nav = build_navigation_set(
            &schema,
            &[TypedVar::new("instock", VarType::Val)],
            &[Constant::Str("No".into()), Constant::Str("Yes".into())].into(),
        );
        let (v, yes, no) =
            (nav.index_of("instock").unwrap(), nav.index_of("\"Yes\"").unwrap(), nav.index_of("\"No\"").unwrap());
        let c = ExprCond::Or(vec![ExprCond::Eq(v, yes), ExprCond::Eq(v, no), ExprCond::Neq(v, yes)]);
        let g = build_constraint_graph(&nav, &[&c], Mode::Ldt);
        let sets = minimize_assignment_sets(&g, &nav);
        let pool = sets.pool(v);
        assert!(pool.contains(&nav.const_value(yes).unwrap()) && pool.contains(&nav.const_value(no).unwrap()));
        assert_eq!(pool.len(), 2 + 1);
    }

    #[test]
    fn naive_pools_are_typed() {
        let schema = DatabaseSchema {
            relations: vec![
                Relation::new(
                    "C",
                    vec![Attribute::val("name"), Attribute::val("address"), Attribute::fk("record", "CR")],
                ),
                Relation::new("CR", vec![Attribute::val("status")]),
            ],
        };
        let nav = build_navigation_set(&schema, &[TypedVar::new("cust_id", VarType::Id("C".into()))], &BTreeSet::new());
        let sets = naive_assignment_sets(&nav);
        let sizes: Vec<usize> = sets.pools.iter().map(Vec::len).collect();
        assert_eq!(sizes, [1, 3, 3, 1, 3]);
        let single = build_navigation_set(&schema, &[TypedVar::new("v", VarType::Val)], &BTreeSet::new());
        assert_eq!(naive_assignment_sets(&single).pools, vec![vec![0]]);
    }

    #[test]
    fn eq_edges_get_equal_pools() {
        let nav = nav_r_a(&["x", "y", "z"], &["c0"]);
        let id = |s: &str| nav.index_of(s).unwrap();
        let c =
            ldt_rewrite(&nav, &ExprCond::And(vec![ExprCond::Eq(id("x"), id("y")), ExprCond::Neq(id("y"), id("z"))]));
        let g = build_constraint_graph(&nav, &[&c], Mode::Ldt);
        let sets = minimize_assignment_sets(&g, &nav);
        for e in g.eq_edges() {
            assert_eq!(sets.pool(e.a), sets.pool(e.b));
        }
    }
}
