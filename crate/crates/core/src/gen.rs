//! Seeded random systems and template properties.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::buchi::Ltl;
use crate::checker::{check, CheckOptions};
use crate::model::{
    collect_constants, desugar_exists, AttrKind, Attribute, Condition, DatabaseSchema, LtlFo, Prop, Relation, Service,
    TasSpec, Term, TypedVar, VarType,
};
use crate::symbolic::{build_navigation_set, Mode};
use crate::templates::{instantiate, TEMPLATES};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenConfig {
    pub relations: usize,
    pub variables: usize,
    pub services: usize,
    /// Longest chain of foreign keys.
    pub fk_depth: usize,
    /// Atoms per pre- or post-condition.
    pub condition_size: usize,
    /// Upper bound on the navigation set of the system.
    pub max_navigation: Option<usize>,
    /// Give one post-condition an existential variable.
    pub exists: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            relations: 2,
            variables: 3,
            services: 3,
            fk_depth: 2,
            condition_size: 2,
            max_navigation: Some(12),
            exists: false,
        }
    }
}

const VALS: [&str; 2] = ["a", "b"];

fn gen_schema(cfg: &GenConfig, rng: &mut impl Rng) -> DatabaseSchema {
    let n = cfg.relations.max(1);
    let mut depth = vec![0usize; n];
    let mut rels: Vec<Relation> = Vec::new();
    for k in (0..n).rev() {
        let mut attrs = Vec::new();
        for a in 0..rng.gen_range(1..=2) {
            let targets: Vec<usize> = (k + 1..n).filter(|&j| depth[j] < cfg.fk_depth).collect();
            if !targets.is_empty() && rng.gen_bool(0.5) {
                let j = *targets.choose(rng).unwrap();
                depth[k] = depth[k].max(depth[j] + 1);
                attrs.push(Attribute::fk(format!("a{a}"), format!("R{j}")));
            } else {
                attrs.push(Attribute::val(format!("a{a}")));
            }
        }
        rels.push(Relation::new(format!("R{k}"), attrs));
    }
    rels.reverse();
    DatabaseSchema { relations: rels }
}

struct CondGen<'a> {
    schema: &'a DatabaseSchema,
    vars: Vec<TypedVar>,
}

impl CondGen<'_> {
    fn constant(&self, ty: &VarType, rng: &mut impl Rng) -> Term {
        match ty {
            VarType::Val => Term::str(*VALS.choose(rng).unwrap()),
            VarType::Id(_) => Term::Null,
        }
    }

    fn term_of(&self, ty: &VarType, rng: &mut impl Rng) -> Term {
        let same: Vec<&TypedVar> = self.vars.iter().filter(|v| &v.ty == ty).collect();
        if !same.is_empty() && rng.gen_bool(0.6) {
            Term::var(same.choose(rng).unwrap().name.clone())
        } else {
            self.constant(ty, rng)
        }
    }

    fn atom(&self, rng: &mut impl Rng) -> Condition {
        let ids: Vec<&TypedVar> = self.vars.iter().filter(|v| v.ty.is_id()).collect();
        let kind = rng.gen_range(0..3);
        if kind == 2 && !ids.is_empty() {
            let x = ids.choose(rng).unwrap();
            let rel = self.schema.relation(x.ty.name()).unwrap();
            let mut args = vec![Term::var(x.name.clone())];
            for a in &rel.attributes {
                let ty = match &a.kind {
                    AttrKind::Val => VarType::Val,
                    AttrKind::ForeignKey(r) => VarType::Id(r.clone()),
                };
                args.push(self.term_of(&ty, rng));
            }
            return Condition::rel(rel.name.clone(), args);
        }
        let v = self.vars.choose(rng).unwrap();
        let others: Vec<&TypedVar> = self.vars.iter().filter(|w| w.ty == v.ty && w.name != v.name).collect();
        let rhs = if kind == 0 && !others.is_empty() {
            Term::var(others.choose(rng).unwrap().name.clone())
        } else {
            self.constant(&v.ty, rng)
        };
        if rng.gen_bool(0.5) {
            Condition::eq(Term::var(v.name.clone()), rhs)
        } else {
            Condition::neq(Term::var(v.name.clone()), rhs)
        }
    }

    fn condition(&self, size: usize, rng: &mut impl Rng) -> Condition {
        if size <= 1 {
            let a = self.atom(rng);
            return if rng.gen_bool(0.2) { Condition::not(a) } else { a };
        }
        let left = rng.gen_range(1..size);
        let (a, b) = (self.condition(left, rng), self.condition(size - left, rng));
        if rng.gen_bool(0.6) {
            Condition::And(vec![a, b])
        } else {
            Condition::Or(vec![a, b])
        }
    }
}

/// Size of the navigation set the checker builds, after existential
/// variables become artifact variables.
fn navigation_size(spec: &TasSpec) -> usize {
    let spec = desugar_exists(spec).expect("generated specs are valid");
    let constants = collect_constants(&spec, &[]);
    build_navigation_set(&spec.schema, &spec.variables, &constants).len()
}

/// One random system. Draws again until the navigation bound holds.
pub fn generate_spec(cfg: &GenConfig, rng: &mut impl Rng) -> TasSpec {
    loop {
        let schema = gen_schema(cfg, rng);
        let variables: Vec<TypedVar> = (0..cfg.variables.max(1))
            .map(|i| {
                let ty = if rng.gen_bool(0.5) {
                    VarType::Val
                } else {
                    VarType::Id(format!("R{}", rng.gen_range(0..schema.relations.len())))
                };
                TypedVar::new(format!("v{i}"), ty)
            })
            .collect();
        let g = CondGen { schema: &schema, vars: variables.clone() };
        let mut init_parts = Vec::new();
        for v in &variables {
            if rng.gen_bool(0.5) {
                init_parts.push(Condition::eq(Term::var(v.name.clone()), g.constant(&v.ty, rng)));
            }
        }
        let init = match init_parts.len() {
            0 => Condition::True,
            1 => init_parts.pop().unwrap(),
            _ => Condition::And(init_parts),
        };
        let mut services = Vec::new();
        let with_exists = cfg.exists.then(|| rng.gen_range(0..cfg.services.max(1)));
        for s in 0..cfg.services.max(1) {
            let pre = g.condition(rng.gen_range(1..=cfg.condition_size.max(1)), rng);
            let mut post = g.condition(rng.gen_range(1..=cfg.condition_size.max(1)), rng);
            if with_exists == Some(s) {
                let ty = if rng.gen_bool(0.5) {
                    VarType::Val
                } else {
                    VarType::Id(format!("R{}", rng.gen_range(0..schema.relations.len())))
                };
                let z = TypedVar::new("z", ty.clone());
                let mut vars = variables.clone();
                vars.push(z.clone());
                let inner = CondGen { schema: &schema, vars };
                let mut body = inner.atom(rng);
                // Make sure the bound variable occurs.
                if !body.free_vars().contains(&"z".to_string()) {
                    let partner = variables.iter().find(|v| v.ty == ty);
                    let rhs = partner.map_or_else(|| g.constant(&ty, rng), |v| Term::var(v.name.clone()));
                    body = Condition::And(vec![body, Condition::eq(Term::var("z"), rhs)]);
                }
                post = Condition::Exists(vec![z], Box::new(Condition::And(vec![body, post])));
            }
            let propagated = variables.iter().filter(|_| rng.gen_bool(0.4)).map(|v| v.name.clone()).collect();
            services.push(Service { name: format!("S{s}"), pre, post, propagated });
        }
        let spec = TasSpec { schema, variables, init, services };
        if cfg.max_navigation.is_none_or(|m| navigation_size(&spec) <= m) {
            return spec;
        }
    }
}

/// Whether the system has at least one infinite run, decided by checking
/// the property `false`. Hitting the state bound counts as no; there is no
/// time bound, so the answer does not depend on the machine.
pub fn has_infinite_run(spec: &TasSpec) -> bool {
    let prop = LtlFo::new("false", vec![], Ltl::False);
    let opts = CheckOptions { max_states: 200_000, max_seconds: u64::MAX, ..CheckOptions::new(Mode::Ldt, true) };
    matches!(check(spec, &prop, &opts), Ok((v, _)) if v.is_violated())
}

/// `count` systems with at least one infinite run, drawn in order from the
/// seeded generator.
pub fn generate_corpus(cfg: &GenConfig, seed: u64, count: usize) -> Vec<TasSpec> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let spec = generate_spec(cfg, &mut rng);
        if has_infinite_run(&spec) {
            out.push(spec);
        }
    }
    out
}

/// Quantifier-free sub-formulas over artifact variables of all pre- and
/// post-conditions, in service order then preorder.
pub fn candidate_conditions(spec: &TasSpec) -> Vec<Condition> {
    let mut out = Vec::new();
    for s in &spec.services {
        for c in [&s.pre, &s.post] {
            for sub in c.subformulas() {
                if sub.is_quantifier_free()
                    && sub.free_vars().iter().all(|v| spec.variable(v).is_some())
                    && !out.contains(sub)
                {
                    out.push(sub.clone());
                }
            }
        }
    }
    out
}

/// One property per selected template, placeholders drawn uniformly from
/// [`candidate_conditions`].
pub fn template_properties(spec: &TasSpec, templates: &[usize], rng: &mut impl Rng) -> Vec<LtlFo> {
    let cands = candidate_conditions(spec);
    templates
        .iter()
        .map(|&id| {
            let mut pick = || {
                let c = cands.choose(rng).cloned().unwrap_or(Condition::True);
                Ltl::Atom(Prop::Cond(c))
            };
            let (p, q) = (pick(), pick());
            LtlFo::new(TEMPLATES[id - 1].name, vec![], instantiate(id, p, q))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate;
    use rand::SeedableRng;

    #[test]
    fn generated_specs_are_valid_and_bounded() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for exists in [false, true] {
            let cfg = GenConfig { exists, ..GenConfig::default() };
            for _ in 0..50 {
                let spec = generate_spec(&cfg, &mut rng);
                let report = validate(&spec);
                assert!(report.is_valid(), "{:?}\n{}", report, crate::speclang::render_spec(&spec, &[]));
                assert!(navigation_size(&spec) <= 12);
                assert!(spec.schema.is_acyclic());
            }
        }
    }

    #[test]
    fn generation_is_seeded() {
        let a = generate_corpus(&GenConfig::default(), 3, 3);
        let b = generate_corpus(&GenConfig::default(), 3, 3);
        assert_eq!(a, b);
    }
}
