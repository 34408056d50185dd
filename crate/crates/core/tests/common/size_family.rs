//! Systems with growing navigation sets and a fixed service, for
//! measuring emitted test sizes.

use tascheck::buchi::Ltl;
use tascheck::promela::service_test_sizes;
use tascheck::speclang::parse_spec;
use tascheck::LtlFo;

/// Family sizes. With two variables the congruence check is still
/// shorter than the expanded tests.
pub const FAMILY: std::ops::RangeInclusive<usize> = 3..=10;

/// `n` variables over `R(ID, A: VAL, B: -> S)`, `S(ID, C: VAL)`; the only
/// service tests `x0 == x1` and `R(x0, "a", x2)`-free equalities.
pub fn family_member(n: usize) -> String {
    let vars: String = (0..n).map(|i| format!("  x{i}: R;\n")).collect();
    format!(
        "schema {{\n  relation R {{\n    id;\n    A: VAL;\n    B: -> S;\n  }}\n  relation S {{\n    id;\n    C: VAL;\n  }}\n}}\n\n\
         variables {{\n{vars}}}\n\ninit: true;\n\n\
         service Move {{\n  pre: x0 == x1;\n  propagate: x0;\n  post: x0 != x1 || R(x1, \"a\", null);\n}}\n"
    )
}

/// `(size without LDT, size with LDT)` of the service test for each `n`.
pub fn test_sizes(ns: impl IntoIterator<Item = usize>) -> Vec<(usize, usize, usize)> {
    let prop = LtlFo::new("p", vec![], Ltl::True);
    ns.into_iter()
        .map(|n| {
            let spec = parse_spec(&family_member(n)).expect("family member parses").spec;
            let off = service_test_sizes(&spec, &prop, false).expect("emit")[0];
            let on = service_test_sizes(&spec, &prop, true).expect("emit")[0];
            (n, off, on)
        })
        .collect()
}
