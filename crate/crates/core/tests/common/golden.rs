//! Emitter golden files under `fixtures/golden`.

use std::path::PathBuf;

use tascheck::buchi::Ltl;
use tascheck::promela::{emit, EmitOptions};
use tascheck::speclang::parse_spec;
use tascheck::LtlFo;

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// Emits `fixtures/<name>.tas` without ASM, checking the first property
/// or `true` when the file has none.
pub fn emit_fixture(name: &str, ldt: bool) -> String {
    let src = std::fs::read_to_string(fixtures().join(format!("{name}.tas"))).expect("fixture");
    let file = parse_spec(&src).expect("fixture parses");
    let prop = file.properties.first().cloned().unwrap_or_else(|| LtlFo::new("p", vec![], Ltl::True));
    emit(&file.spec, &prop, &EmitOptions { ldt, asm: false }).expect("emit").text()
}

pub fn golden(name: &str, ldt: bool) -> (String, String) {
    let file = format!("{name}_ldt_{}.pml", if ldt { "on" } else { "off" });
    let expected = std::fs::read_to_string(fixtures().join("golden").join(file)).expect("golden file");
    (emit_fixture(name, ldt), expected)
}

/// Line indices of the service block markers in emission order:
/// guard, selects, post-condition check, congruence check.
pub fn service_block_order(text: &str, service: &str) -> Option<[usize; 4]> {
    let lines: Vec<&str> = text.lines().collect();
    let start = lines.iter().position(|l| l.contains(&format!("// service {service}:")))?;
    let find = |from: usize, pat: &str| (from..lines.len()).find(|&i| lines[i].contains(pat));
    let guard = find(start, ") ->")?;
    let select = find(guard, "select(")?;
    let post = find(select, "// validate the post-condition")?;
    let keys = find(post, "// validate the Keys and FKs")?;
    let next_service = find(start + 1, "// service ").unwrap_or(lines.len());
    (keys < next_service).then_some([guard, select, post, keys])
}

pub fn guard_of(text: &str, service: &str) -> Option<String> {
    let mut lines = text.lines().skip_while(|l| !l.contains(&format!("// service {service}:")));
    lines.next()?;
    let l = lines.next()?.trim();
    Some(l.strip_prefix(":: ")?.strip_suffix(" ->")?.to_string())
}
