//! Benchmark harness: random systems times templates times the four
//! checker configurations, with CSV output and overhead against `false`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::checker::{check, CheckOptions};
use crate::gen::{generate_corpus, template_properties, GenConfig};
use crate::symbolic::Mode;
use crate::templates::TEMPLATES;

pub const CSV_HEADER: &str = "spec_id,template,mode,asm,verdict,states,transitions,ms,avg_pool";

/// The four configurations, in row order.
pub const CONFIGS: [(Mode, bool); 4] =
    [(Mode::Naive, false), (Mode::Naive, true), (Mode::Ldt, false), (Mode::Ldt, true)];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub seed: u64,
    pub relations: usize,
    pub variables: usize,
    pub services: usize,
    pub fk_depth: usize,
    pub condition_size: usize,
    /// Template ids, 1-based.
    pub templates: Vec<usize>,
    /// Number of systems.
    pub repetitions: usize,
    pub max_states: usize,
    pub max_seconds: u64,
    /// Worker threads; `None` uses all logical cores.
    pub threads: Option<usize>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            seed: 1,
            relations: 2,
            variables: 4,
            services: 3,
            fk_depth: 2,
            condition_size: 2,
            templates: (1..=12).collect(),
            repetitions: 5,
            max_states: 1_000_000,
            max_seconds: 60,
            threads: None,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BenchError {
    #[error("{0} must be at least 1")]
    Zero(&'static str),
    #[error("unknown template {0}")]
    Template(usize),
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        for (name, v) in [
            ("relations", self.relations),
            ("variables", self.variables),
            ("services", self.services),
            ("fk-depth", self.fk_depth),
            ("condition-size", self.condition_size),
            ("repetitions", self.repetitions),
            ("templates", self.templates.len()),
        ] {
            if v == 0 {
                return Err(BenchError::Zero(name));
            }
        }
        match self.templates.iter().find(|&&t| t == 0 || t > TEMPLATES.len()) {
            Some(&t) => Err(BenchError::Template(t)),
            None => Ok(()),
        }
    }

    /// At least 5 relations, 16 variables or 16 services. Such runs may
    /// take hours and hit the per-run limits often.
    pub fn exceeds_desk_scale(&self) -> bool {
        self.relations >= 5 || self.variables >= 16 || self.services >= 16
    }

    pub fn gen_config(&self) -> GenConfig {
        GenConfig {
            relations: self.relations,
            variables: self.variables,
            services: self.services,
            fk_depth: self.fk_depth,
            condition_size: self.condition_size,
            max_navigation: None,
            exists: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub spec_id: usize,
    pub template: String,
    pub mode: Mode,
    pub asm: bool,
    /// `holds`, `violated`, `limit-states`, `limit-time` or `error`.
    pub verdict: String,
    pub states: usize,
    pub transitions: usize,
    pub ms: f64,
    pub avg_pool: f64,
}

impl BenchRow {
    pub fn csv_line(&self, with_time: bool) -> String {
        format!(
            "{},{},{},{},{},{},{},{:.3},{:.3}",
            self.spec_id,
            self.template,
            mode_name(self.mode),
            if self.asm { "on" } else { "off" },
            self.verdict,
            self.states,
            self.transitions,
            if with_time { self.ms } else { 0.0 },
            self.avg_pool
        )
    }
}

pub fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Naive => "naive",
        Mode::Ldt => "ldt",
    }
}

/// Runs every (system, template, configuration) combination. Rows come
/// out in that order whatever the worker scheduling.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRow>, BenchError> {
    cfg.validate()?;
    if cfg.exceeds_desk_scale() {
        log::warn!("bench configuration may exceed desk-scale limits");
    }
    let specs = generate_corpus(&cfg.gen_config(), cfg.seed, cfg.repetitions);
    let mut jobs = Vec::new();
    for (i, spec) in specs.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        for prop in template_properties(spec, &cfg.templates, &mut rng) {
            for (mode, asm) in CONFIGS {
                jobs.push((i, prop.clone(), mode, asm));
            }
        }
    }
    let run = |(i, prop, mode, asm): &(usize, crate::model::LtlFo, Mode, bool)| {
        let opts =
            CheckOptions { max_states: cfg.max_states, max_seconds: cfg.max_seconds, ..CheckOptions::new(*mode, *asm) };
        let mut row = BenchRow {
            spec_id: *i,
            template: prop.name.clone(),
            mode: *mode,
            asm: *asm,
            verdict: "error".into(),
            states: 0,
            transitions: 0,
            ms: 0.0,
            avg_pool: 0.0,
        };
        match check(&specs[*i], prop, &opts) {
            Ok((v, st)) => {
                row.verdict = v.to_string();
                row.states = st.states;
                row.transitions = st.transitions;
                row.ms = st.elapsed.as_secs_f64() * 1e3;
                row.avg_pool = st.avg_pool;
            }
            Err(e) => log::error!("spec {i} {}: {e}", prop.name),
        }
        row
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads.unwrap_or(0)).build().expect("thread pool");
    Ok(pool.install(|| jobs.par_iter().map(run).collect()))
}

pub fn to_csv(rows: &[BenchRow], with_time: bool) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_line(with_time));
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverheadRow {
    pub template: String,
    pub mode: Mode,
    pub asm: bool,
    /// Systems with a usable `false` baseline.
    pub runs: usize,
    /// Mean over systems of `time(template) / time(false) - 1`.
    pub overhead: f64,
}

/// Per-template overhead against the `false` run of the same system and
/// configuration, averaged over systems. Systems whose `false` run took no
/// measurable time are skipped.
pub fn overhead_report(rows: &[BenchRow]) -> Vec<OverheadRow> {
    let mut baseline: BTreeMap<(usize, Mode, bool), f64> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.template == "false") {
        baseline.insert((r.spec_id, r.mode, r.asm), r.ms);
    }
    let mut acc: BTreeMap<(usize, Mode, bool), (String, usize, f64)> = BTreeMap::new();
    for r in rows {
        let Some(&base) = baseline.get(&(r.spec_id, r.mode, r.asm)) else { continue };
        if base <= 0.0 {
            continue;
        }
        let order = TEMPLATES.iter().position(|t| t.name == r.template).unwrap_or(usize::MAX);
        let e = acc.entry((order, r.mode, r.asm)).or_insert((r.template.clone(), 0, 0.0));
        e.1 += 1;
        e.2 += r.ms / base - 1.0;
    }
    acc.into_iter()
        .map(|((_, mode, asm), (template, runs, sum))| OverheadRow {
            template,
            mode,
            asm,
            runs,
            overhead: sum / runs as f64,
        })
        .collect()
}

pub fn render_overhead(report: &[OverheadRow]) -> String {
    let mut out = String::from("template,mode,asm,runs,overhead\n");
    for r in report {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.3}",
            r.template,
            mode_name(r.mode),
            if r.asm { "on" } else { "off" },
            r.runs,
            r.overhead
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> BenchConfig {
        BenchConfig {
            variables: 3,
            templates: vec![1, 2, 7],
            repetitions: 2,
            max_states: 50_000,
            max_seconds: 600,
            threads: Some(2),
            ..BenchConfig::default()
        }
    }

    #[test]
    fn rows_are_ordered_and_deterministic() {
        let a = run_bench(&small()).unwrap();
        assert_eq!(a.len(), 2 * 3 * 4);
        for (k, r) in a.iter().enumerate() {
            assert_eq!(r.spec_id, k / 12);
            assert_eq!((r.mode, r.asm), CONFIGS[k % 4]);
        }
        let b = run_bench(&small()).unwrap();
        assert_eq!(to_csv(&a, false), to_csv(&b, false));
    }

    #[test]
    fn false_is_never_satisfied() {
        let rows = run_bench(&BenchConfig { templates: vec![1], ..small() }).unwrap();
        assert!(rows.iter().all(|r| r.verdict == "violated" || r.verdict.starts_with("limit")));
    }

    #[test]
    fn overhead_of_false_is_zero() {
        let rows = vec![
            BenchRow {
                spec_id: 0,
                template: "false".into(),
                mode: Mode::Ldt,
                asm: true,
                verdict: "violated".into(),
                states: 1,
                transitions: 1,
                ms: 2.0,
                avg_pool: 1.0,
            },
            BenchRow {
                spec_id: 0,
                template: "always".into(),
                mode: Mode::Ldt,
                asm: true,
                verdict: "holds".into(),
                states: 1,
                transitions: 1,
                ms: 3.0,
                avg_pool: 1.0,
            },
        ];
        let rep = overhead_report(&rows);
        assert_eq!(rep.len(), 2);
        assert_eq!((rep[0].template.as_str(), rep[0].overhead), ("false", 0.0));
        assert_eq!((rep[1].template.as_str(), rep[1].overhead), ("always", 0.5));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        assert_eq!(BenchConfig { services: 0, ..small() }.validate(), Err(BenchError::Zero("services")));
        assert_eq!(BenchConfig { templates: vec![13], ..small() }.validate(), Err(BenchError::Template(13)));
        assert!(BenchConfig { relations: 5, variables: 75, services: 75, ..small() }.exceeds_desk_scale());
        assert!(!small().exceeds_desk_scale());
    }
}
