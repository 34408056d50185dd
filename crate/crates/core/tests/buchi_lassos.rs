//! Büchi translation against direct lasso semantics.

mod common;

use common::lasso_oracle::{exhaustive, random_ltl, sampled};
use rand::SeedableRng;
use tascheck::buchi::Ltl;
use tascheck::templates::{instantiate, TEMPLATES};

#[test]
fn negated_templates_match_lasso_semantics() {
    for t in &TEMPLATES {
        let f = Ltl::not(instantiate(t.id, Ltl::Atom(0), Ltl::Atom(1)));
        let rep = exhaustive(&f, 4, 4);
        assert_eq!(rep.mismatches, 0, "template {} first mismatch {:?}", t.name, rep.example);
        assert!(rep.words > 0);
    }
}

#[test]
fn random_formulas_match_lasso_semantics() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    for _ in 0..60 {
        let f = random_ltl(&mut rng, 3, 7);
        assert!(f.size() <= 7, "{f}");
        let rep = exhaustive(&f, 4, 4);
        assert_eq!(rep.mismatches, 0, "{f} first mismatch {:?}", rep.example);
        assert_eq!(sampled(&f, 300, &mut rng), 0, "{f}");
    }
}

#[test]
fn harness_detects_a_wrong_formula() {
    use common::lasso_oracle::exhaustive_against;
    let f = Ltl::Until(Box::new(Ltl::Atom(0)), Box::new(Ltl::Atom(1)));
    let weak = Ltl::Release(Box::new(Ltl::Atom(1)), Box::new(Ltl::Or(Box::new(Ltl::Atom(0)), Box::new(Ltl::Atom(1)))));
    assert_eq!(exhaustive_against(&f, &f, 4, 4).mismatches, 0);
    assert!(exhaustive_against(&f, &weak, 4, 4).mismatches > 0);
}
