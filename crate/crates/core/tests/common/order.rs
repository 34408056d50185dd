//! The order fulfillment fixtures.

use tascheck::checker::Lasso;
use tascheck::speclang::{parse_spec, SpecFile};

use super::golden::fixtures;

pub fn load(name: &str) -> SpecFile {
    parse_spec(&std::fs::read_to_string(fixtures().join(name)).expect("fixture")).expect("fixture parses")
}

/// Whether the lasso, with its cycle unrolled twice, enters an out-of-stock
/// item and later ships with no `Restock` in between.
pub fn ships_without_restock(lasso: &Lasso) -> bool {
    let steps: Vec<_> = lasso.prefix.iter().chain(&lasso.cycle).chain(&lasso.cycle).collect();
    let out_of_stock = |s: &&tascheck::checker::LassoStep| {
        s.service == "EnterItem" && s.assignments.get("instock").map(String::as_str) == Some("\"No\"")
    };
    steps
        .iter()
        .enumerate()
        .filter(|(_, s)| out_of_stock(s))
        .any(|(k, _)| steps[k + 1..].iter().take_while(|s| s.service != "Restock").any(|s| s.service == "ShipItem"))
}
