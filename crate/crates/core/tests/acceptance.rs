//! Acceptance criteria 1-8, one PASS/FAIL line each. Runs without the test
//! harness so the lines are always printed; exits non-zero on any FAIL.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tascheck::bench::{overhead_report, run_bench, BenchConfig, CONFIGS};
use tascheck::buchi::Ltl;
use tascheck::checker::{check, partition_oracle_check, prepare, replay, CheckOptions, OracleVerdict, Verdict};
use tascheck::gen::{generate_corpus, template_properties, GenConfig};
use tascheck::optimize::{
    eq_edges_share_pools, greedy_witness, minimize_assignment_sets, naive_assignment_sets, sample_consistent_subgraph,
};
use tascheck::symbolic::Mode;
use tascheck::templates::{instantiate, TEMPLATES};
use tascheck::{LtlFo, TasSpec};

const CORPUS_SEED: u64 = 2024;
const CORPUS_SIZE: usize = 200;
const SUBGRAPH_SAMPLES: usize = 1000;

struct Report {
    failed: usize,
}

impl Report {
    fn line(&mut self, n: usize, pass: bool, detail: impl AsRef<str>) {
        if !pass {
            self.failed += 1;
        }
        println!("criterion {n}: {} ({})", if pass { "PASS" } else { "FAIL" }, detail.as_ref());
    }
}

fn spec_rng(i: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(CORPUS_SEED ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn criterion1(r: &mut Report) {
    use common::order::{load, ships_without_restock};
    let start = Instant::now();
    let ok = load("order.tas");
    let bad = load("order_faulty.tas");
    let prop = ok.property("RestockBeforeShip").expect("property");
    let opts = CheckOptions::default();
    let (v_ok, s_ok) = check(&ok.spec, prop, &opts).expect("check");
    let (v_bad, s_bad) = check(&bad.spec, prop, &opts).expect("check");
    let elapsed = start.elapsed();
    let lasso_ok =
        v_bad.lasso().is_some_and(|l| replay(&bad.spec, prop, l, opts.mode).is_ok() && ships_without_restock(l));
    let states = s_ok.states.max(s_bad.states);
    r.line(
        1,
        v_ok.is_holds() && lasso_ok && elapsed < Duration::from_secs(10) && states < 200_000,
        format!(
            "correct: {v_ok}, faulty: {v_bad} with replay-valid lasso {lasso_ok}, {states} states max, {:.2} s",
            elapsed.as_secs_f64()
        ),
    );
}

/// Verdicts per (spec, template): the oracle and the four configurations.
struct CorpusRun {
    runs: usize,
    oracle_mismatches: usize,
    config_disagreements: usize,
    limits: usize,
    errors: usize,
    bad_replays: usize,
    elapsed: Duration,
}

fn run_corpus(specs: &[TasSpec]) -> CorpusRun {
    let start = Instant::now();
    let templates: Vec<usize> = (1..=TEMPLATES.len()).collect();
    let mut out = CorpusRun {
        runs: 0,
        oracle_mismatches: 0,
        config_disagreements: 0,
        limits: 0,
        errors: 0,
        bad_replays: 0,
        elapsed: Duration::ZERO,
    };
    for (i, spec) in specs.iter().enumerate() {
        for prop in template_properties(spec, &templates, &mut spec_rng(i)) {
            let oracle = match partition_oracle_check(spec, &prop) {
                Ok(o) => o,
                Err(e) => {
                    println!("  spec {i} {}: oracle error {e}", prop.name);
                    out.errors += 1;
                    continue;
                }
            };
            let mut verdicts = Vec::new();
            for (mode, asm) in CONFIGS {
                out.runs += 1;
                let opts = CheckOptions { max_states: 5_000_000, max_seconds: 300, ..CheckOptions::new(mode, asm) };
                match check(spec, &prop, &opts) {
                    Ok((v @ (Verdict::Holds | Verdict::Violated(_)), _)) => {
                        if (oracle == OracleVerdict::Holds) != v.is_holds() {
                            println!("  spec {i} {} {mode} asm={asm}: check {v}, oracle {oracle:?}", prop.name);
                            out.oracle_mismatches += 1;
                        }
                        if let Some(l) = v.lasso() {
                            if let Err(e) = replay(spec, &prop, l, mode) {
                                println!("  spec {i} {} {mode} asm={asm}: replay {e}", prop.name);
                                out.bad_replays += 1;
                            }
                        }
                        verdicts.push(v.is_holds());
                    }
                    Ok((v, _)) => {
                        println!("  spec {i} {} {mode} asm={asm}: {v}", prop.name);
                        out.limits += 1;
                    }
                    Err(e) => {
                        println!("  spec {i} {} {mode} asm={asm}: error {e}", prop.name);
                        out.errors += 1;
                    }
                }
            }
            if verdicts.len() != CONFIGS.len() || verdicts.iter().any(|&h| h != verdicts[0]) {
                out.config_disagreements += 1;
            }
        }
    }
    out.elapsed = start.elapsed();
    out
}

/// One property holding every template instance, so the constraint graph
/// carries all template atoms of the system.
fn all_templates(spec: &TasSpec, i: usize) -> LtlFo {
    let templates: Vec<usize> = (1..=TEMPLATES.len()).collect();
    let formula = template_properties(spec, &templates, &mut spec_rng(i))
        .into_iter()
        .map(|p| p.formula)
        .reduce(|a, b| Ltl::And(Box::new(a), Box::new(b)))
        .expect("at least one template");
    LtlFo::new("all", vec![], formula)
}

fn criterion4(r: &mut Report, specs: &[TasSpec]) {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    let (mut asm_sum, mut naive_sum, mut graphs) = (0.0, 0.0, 0usize);
    let (mut cond1_failures, mut cond2_failures, mut samples) = (0usize, 0usize, 0usize);
    let mut min_samples_per_spec = usize::MAX;
    for (i, spec) in specs.iter().enumerate() {
        let prop = all_templates(spec, i);
        let mut spec_samples = 0;
        for mode in [Mode::Naive, Mode::Ldt] {
            let p = prepare(spec, &prop, mode, true).expect("prepare");
            let nav = &p.system.nav;
            let asm = minimize_assignment_sets(&p.graph, nav);
            asm_sum += asm.average_size(nav);
            naive_sum += naive_assignment_sets(nav).average_size(nav);
            graphs += 1;
            if !eq_edges_share_pools(nav, &p.graph, &asm) {
                cond1_failures += 1;
            }
            for _ in 0..SUBGRAPH_SAMPLES {
                let sub = sample_consistent_subgraph(nav, &p.graph, rng.gen_range(0.1..=1.0), &mut rng);
                if greedy_witness(nav, &asm, &sub).is_none() {
                    cond2_failures += 1;
                }
                spec_samples += 1;
            }
        }
        samples += spec_samples;
        min_samples_per_spec = min_samples_per_spec.min(spec_samples);
    }
    let (asm_mean, naive_mean) = (asm_sum / graphs as f64, naive_sum / graphs as f64);
    r.line(
        4,
        asm_mean < naive_mean && cond1_failures == 0 && cond2_failures == 0 && min_samples_per_spec >= 1000,
        format!(
            "mean pool asm {asm_mean:.3} < naive {naive_mean:.3}; condition (1) failures {cond1_failures}; \
             condition (2) failures {cond2_failures} of {samples} sampled subgraphs, at least {min_samples_per_spec} per spec"
        ),
    );
}

fn criterion5(r: &mut Report) {
    use common::lasso_oracle::{exhaustive, random_ltl};
    let start = Instant::now();
    let (mut words, mut mismatches, mut formulas) = (0u64, 0u64, 0usize);
    for t in &TEMPLATES {
        let rep = exhaustive(&Ltl::not(instantiate(t.id, Ltl::Atom(0), Ltl::Atom(1))), 4, 4);
        words += rep.words;
        mismatches += rep.mismatches;
        formulas += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    for _ in 0..60 {
        let rep = exhaustive(&random_ltl(&mut rng, 3, 7), 4, 4);
        words += rep.words;
        mismatches += rep.mismatches;
        formulas += 1;
    }
    r.line(
        5,
        mismatches == 0,
        format!(
            "{formulas} formulas, {words} lassos with prefix <= 4 and period <= 4, {mismatches} mismatches, {:.1} s",
            start.elapsed().as_secs_f64()
        ),
    );
}

fn criterion6(r: &mut Report) {
    use common::golden::{golden, guard_of, service_block_order};
    let (off, off_want) = golden("reassign", false);
    let (on, on_want) = golden("reassign", true);
    let (refs, refs_want) = golden("two_refs", true);
    let order_ok = service_block_order(&off, "S").is_some_and(|[g, s, p, k]| g < s && s < p && p < k);
    let added_term_ok = guard_of(&on, "S").as_deref() == Some("((x == y) && (x_A == y_A) && !(z_A == c0))")
        && !on.contains("Keys and FKs");
    let expansion_ok = guard_of(&refs, "T").as_deref()
        == Some("((x_A == y) && (x_B == z) && (x_A_C == y_C) && (x_A_D == y_D) && (x_B_C == z_C) && (x_B_D == z_D))");
    let exact = off == off_want && on == on_want && refs == refs_want;
    r.line(
        6,
        exact && order_ok && expansion_ok && added_term_ok,
        format!("golden files equal {exact}, block order {order_ok}, six-conjunct expansion {expansion_ok}, added term {added_term_ok}"),
    );
}

fn criterion7(r: &mut Report) {
    use common::size_family::{test_sizes, FAMILY};
    let rows = test_sizes(FAMILY);
    let bounded = rows.iter().all(|&(_, off, on)| on <= off);
    let ratios: Vec<f64> = rows.iter().map(|&(_, off, on)| on as f64 / off as f64).collect();
    let decreasing = ratios.windows(2).all(|w| w[1] < w[0]);
    let sizes: Vec<String> = rows.iter().map(|(n, off, on)| format!("{n}:{on}/{off}")).collect();
    r.line(7, bounded && decreasing, format!("ldt/congruence size per variable count {}", sizes.join(" ")));
}

fn criterion8(r: &mut Report) {
    let cfg = BenchConfig { seed: 1, variables: 2, repetitions: 5, threads: Some(1), ..BenchConfig::default() };
    let rows = run_bench(&cfg).expect("valid bench config");
    let report = overhead_report(&rows);
    let false_rows = (0..cfg.repetitions).all(|i| {
        CONFIGS
            .iter()
            .all(|&(m, a)| rows.iter().any(|x| x.spec_id == i && x.template == "false" && x.mode == m && x.asm == a))
    });
    let templates_reported = TEMPLATES.iter().all(|t| report.iter().any(|o| o.template == t.name));
    r.line(
        8,
        false_rows && templates_reported && !report.is_empty(),
        format!(
            "{} rows over {} systems, false rows for every system and configuration {false_rows}, {} overhead rows",
            rows.len(),
            cfg.repetitions,
            report.len()
        ),
    );
}

fn main() -> ExitCode {
    // `cargo test -- <filter>` passes arguments; run only when unfiltered or
    // asked for by name.
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if !args.is_empty() && !args.iter().any(|a| "acceptance".contains(a.as_str())) {
        return ExitCode::SUCCESS;
    }
    let mut r = Report { failed: 0 };
    criterion1(&mut r);

    let specs = generate_corpus(&GenConfig::default(), CORPUS_SEED, CORPUS_SIZE);
    let corpus = run_corpus(&specs);
    let complete = corpus.limits == 0 && corpus.errors == 0;
    r.line(
        2,
        specs.len() >= 200 && corpus.oracle_mismatches == 0 && complete && corpus.bad_replays == 0 && corpus.elapsed < Duration::from_secs(900),
        format!(
            "{} systems x {} templates, {} checks, {} oracle mismatches, {} limits, {} errors, {} failed replays, {:.0} s",
            specs.len(),
            TEMPLATES.len(),
            corpus.runs,
            corpus.oracle_mismatches,
            corpus.limits,
            corpus.errors,
            corpus.bad_replays,
            corpus.elapsed.as_secs_f64()
        ),
    );
    r.line(
        3,
        corpus.config_disagreements == 0 && complete,
        format!(
            "{} of {} properties differ across the four configurations",
            corpus.config_disagreements,
            corpus.runs / CONFIGS.len()
        ),
    );
    criterion4(&mut r, &specs);
    criterion5(&mut r);
    criterion6(&mut r);
    criterion7(&mut r);
    criterion8(&mut r);
    if r.failed == 0 {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} criteria fail", r.failed);
        ExitCode::FAILURE
    }
}
