//! The order fulfillment workflow against the restock property.

mod common;

use common::order::{load, ships_without_restock};
use tascheck::checker::{check, replay, CheckOptions, Verdict};
use tascheck::symbolic::Mode;

const WITH_ASM: [(Mode, bool); 2] = [(Mode::Naive, true), (Mode::Ldt, true)];

#[test]
fn correct_spec_holds_with_asm() {
    let f = load("order.tas");
    let prop = f.property("RestockBeforeShip").unwrap();
    for (mode, asm) in WITH_ASM {
        let (v, stats) = check(&f.spec, prop, &CheckOptions::new(mode, asm)).unwrap();
        assert_eq!(v, Verdict::Holds, "{mode} asm={asm}");
        assert!(stats.states < 200_000, "{mode} asm={asm}: {} states", stats.states);
    }
}

#[test]
fn faulty_spec_ships_without_restock() {
    let f = load("order_faulty.tas");
    let prop = f.property("RestockBeforeShip").unwrap();
    for (mode, asm) in WITH_ASM {
        let (v, stats) = check(&f.spec, prop, &CheckOptions::new(mode, asm)).unwrap();
        let lasso = v.lasso().unwrap_or_else(|| panic!("{mode} asm={asm}: {v}"));
        assert_eq!(replay(&f.spec, prop, lasso, mode), Ok(()));
        assert!(ships_without_restock(lasso), "{}", lasso.to_json());
        assert!(stats.states < 200_000);
    }
}

#[test]
fn shape_check_rejects_a_restocked_lasso() {
    let f = load("order_faulty.tas");
    let prop = f.property("RestockBeforeShip").unwrap();
    let (v, _) = check(&f.spec, prop, &CheckOptions::default()).unwrap();
    let mut lasso = v.lasso().unwrap().clone();
    for s in lasso.prefix.iter_mut().chain(lasso.cycle.iter_mut()) {
        if s.service == "ShipItem" {
            s.service = "Restock".into();
        }
    }
    assert!(!ships_without_restock(&lasso));
}

#[test]
fn naive_pools_exceed_the_state_bound() {
    let f = load("order.tas");
    let prop = f.property("RestockBeforeShip").unwrap();
    for mode in [Mode::Naive, Mode::Ldt] {
        let opts = CheckOptions { max_states: 200_000, ..CheckOptions::new(mode, false) };
        let (v, _) = check(&f.spec, prop, &opts).unwrap();
        assert!(matches!(v, Verdict::ResourceLimit { .. }), "{mode}: {v}");
    }
}
