//! Emitted test size with and without lazy dependency tests.

mod common;

use common::size_family::{test_sizes, FAMILY};

#[test]
fn ldt_tests_grow_slower() {
    let rows = test_sizes(FAMILY);
    for &(n, off, on) in &rows {
        assert!(on <= off, "n={n}: {on} > {off}");
    }
    for w in rows.windows(2) {
        let r0 = w[0].2 as f64 / w[0].1 as f64;
        let r1 = w[1].2 as f64 / w[1].1 as f64;
        assert!(r1 < r0, "ratio does not decrease at n={}", w[1].0);
    }
}

#[test]
fn two_variables_favour_the_congruence_check() {
    let rows = test_sizes([2]);
    assert!(rows[0].2 > rows[0].1);
}
