//! `tascheck`: validate, check, emit, bench and stats for `.tas` files.
//!
//! Exit codes: 0 success or `holds`, 1 `violated` or an invalid
//! specification, 2 errors and resource limits.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tascheck::bench::{overhead_report, render_overhead, run_bench, to_csv, BenchConfig};
use tascheck::buchi::Ltl;
use tascheck::checker::{check, prepare, CheckOptions, Verdict};
use tascheck::model::{validate, validate_property};
use tascheck::optimize::{components, minimize_assignment_sets, naive_assignment_sets};
use tascheck::promela::{emit, EmitOptions};
use tascheck::speclang::{parse_spec_named, SpecFile};
use tascheck::symbolic::Mode;
use tascheck::templates::TEMPLATES;
use tascheck::LtlFo;

#[derive(Parser)]
#[command(name = "tascheck", version, about = "Verifier for tuple artifact systems against LTL-FO properties")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

impl Switch {
    fn on(self) -> bool {
        matches!(self, Switch::On)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Naive,
    Ldt,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Naive => Mode::Naive,
            ModeArg::Ldt => Mode::Ldt,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse and type-check a specification.
    Validate { file: PathBuf },
    /// Check a property: exit 0 if it holds, 1 if violated, 2 on errors or limits.
    Check {
        file: PathBuf,
        /// Property name; may be omitted when the file has exactly one.
        #[arg(long)]
        property: Option<String>,
        #[arg(long, value_enum, default_value = "ldt")]
        mode: ModeArg,
        #[arg(long, value_enum, default_value = "on")]
        asm: Switch,
        #[arg(long, default_value_t = 5_000_000)]
        max_states: usize,
        #[arg(long, default_value_t = 600)]
        max_seconds: u64,
        /// Write the counterexample lasso as JSON.
        #[arg(long)]
        counterexample: Option<PathBuf>,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Emit the Promela encoding of a specification and property.
    Emit {
        file: PathBuf,
        #[arg(long)]
        property: Option<String>,
        #[arg(long, value_enum, default_value = "on")]
        ldt: Switch,
        #[arg(long, value_enum, default_value = "off")]
        asm: Switch,
        /// Output file; standard output when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run random systems against the templates in all four configurations.
    Bench {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        relations: usize,
        #[arg(long, default_value_t = 4)]
        variables: usize,
        #[arg(long, default_value_t = 3)]
        services: usize,
        #[arg(long, default_value_t = 2)]
        fk_depth: usize,
        #[arg(long, default_value_t = 2)]
        condition_size: usize,
        /// Comma-separated template ids (1-12) or names; all when absent.
        #[arg(long, value_delimiter = ',')]
        templates: Vec<String>,
        /// Number of systems.
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[arg(long, default_value_t = 1_000_000)]
        max_states: usize,
        #[arg(long, default_value_t = 60)]
        max_seconds: u64,
        /// Worker threads; all logical cores when absent.
        #[arg(long)]
        threads: Option<usize>,
        /// Write 0 in the `ms` column so reruns are byte-identical.
        #[arg(long)]
        no_time: bool,
        /// CSV output; standard output when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write the overhead report against `false`.
        #[arg(long)]
        overhead: Option<PathBuf>,
    },
    /// Navigation set, constraint graph components and pool sizes.
    Stats {
        file: PathBuf,
        #[arg(long)]
        property: Option<String>,
        #[arg(long, value_enum, default_value = "ldt")]
        mode: ModeArg,
    },
}

/// An error with a stable code, reported as `error[Code]: message`.
#[derive(Debug)]
struct CliError {
    code: &'static str,
    message: String,
}

impl CliError {
    fn new(code: &'static str, message: impl Into<String>) -> Self {
        CliError { code, message: message.into() }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn read_spec(path: &Path) -> Result<SpecFile> {
    let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => CliError::new("FileNotFound", format!("{}: no such file", path.display())),
        _ => CliError::new("Io", format!("{}: {e}", path.display())),
    })?;
    parse_spec_named(&text, &path.display().to_string())
        .map_err(|e| CliError::new("ParseError", format!("{e} (code {})", e.code)))
}

fn select_property(file: &SpecFile, name: Option<&str>) -> Result<LtlFo> {
    match name {
        Some(n) => {
            file.property(n).cloned().ok_or_else(|| CliError::new("UnknownProperty", format!("no property `{n}`")))
        }
        None => match file.properties.as_slice() {
            [p] => Ok(p.clone()),
            [] => Ok(LtlFo::new("p", vec![], Ltl::True)),
            _ => Err(CliError::new("AmbiguousProperty", "several properties; pass --property")),
        },
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::new("Io", format!("{}: {e}", p.display()))),
        None => {
            emit_stdout(text);
            Ok(())
        }
    }
}

/// Writes to standard output, ignoring a closed pipe.
fn emit_stdout(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn cmd_validate(file: &Path) -> Result<u8> {
    let f = read_spec(file)?;
    let mut report = validate(&f.spec);
    for p in &f.properties {
        report.diagnostics.extend(validate_property(&f.spec, p).diagnostics);
    }
    let mut out = String::new();
    if report.is_valid() {
        let _ = writeln!(
            out,
            "{}: valid ({} relations, {} variables, {} services, {} properties)",
            file.display(),
            f.spec.schema.relations.len(),
            f.spec.variables.len(),
            f.spec.services.len(),
            f.properties.len()
        );
        emit_stdout(&out);
        return Ok(0);
    }
    for d in &report.diagnostics {
        let _ = writeln!(out, "{}: {:?} at {}: {}", file.display(), d.code, d.location, d.message);
    }
    emit_stdout(&out);
    Ok(1)
}

#[allow(clippy::too_many_arguments)]
fn cmd_check(
    file: &Path,
    property: Option<&str>,
    mode: Mode,
    asm: bool,
    max_states: usize,
    max_seconds: u64,
    counterexample: Option<&Path>,
    json: bool,
) -> Result<u8> {
    let f = read_spec(file)?;
    let prop = select_property(&f, property)?;
    let opts = CheckOptions { mode, asm, max_states, max_seconds };
    let (verdict, stats) = check(&f.spec, &prop, &opts).map_err(|e| CliError::new("CheckError", e.to_string()))?;
    if let (Some(path), Some(lasso)) = (counterexample, verdict.lasso()) {
        std::fs::write(path, lasso.to_json()).map_err(|e| CliError::new("Io", format!("{}: {e}", path.display())))?;
    }
    if json {
        let report = serde_json::json!({ "property": prop.name, "verdict": verdict, "stats": stats });
        emit_stdout(&format!("{}\n", serde_json::to_string_pretty(&report).expect("report serializes")));
    } else {
        let mut out = String::new();
        let _ = writeln!(out, "property: {}", prop.name);
        let _ = writeln!(out, "verdict: {verdict}");
        let _ = writeln!(
            out,
            "mode: {mode}, asm: {}\nstates: {}\nsystem states: {}\ntransitions: {}\ntime: {:.3} s\navg pool: {:.3}",
            if asm { "on" } else { "off" },
            stats.states,
            stats.system_states,
            stats.transitions,
            stats.elapsed.as_secs_f64(),
            stats.avg_pool
        );
        if let Some(lasso) = verdict.lasso() {
            let names =
                |s: &[tascheck::checker::LassoStep]| s.iter().map(|x| x.service.clone()).collect::<Vec<_>>().join(" ");
            let _ = writeln!(out, "prefix: {}\ncycle: {}", names(&lasso.prefix), names(&lasso.cycle));
        }
        emit_stdout(&out);
    }
    Ok(match verdict {
        Verdict::Holds => 0,
        Verdict::Violated(_) => 1,
        Verdict::ResourceLimit { .. } => 2,
    })
}

fn cmd_emit(file: &Path, property: Option<&str>, ldt: bool, asm: bool, output: Option<&Path>) -> Result<u8> {
    let f = read_spec(file)?;
    let prop = select_property(&f, property)?;
    let program =
        emit(&f.spec, &prop, &EmitOptions { ldt, asm }).map_err(|e| CliError::new("CheckError", e.to_string()))?;
    write_output(output, &program.text())?;
    Ok(0)
}

fn template_id(s: &str) -> Result<usize> {
    let s = s.trim();
    if let Ok(id) = s.parse::<usize>() {
        return Ok(id);
    }
    TEMPLATES
        .iter()
        .position(|t| t.name == s)
        .map(|i| i + 1)
        .ok_or_else(|| CliError::new("UnknownTemplate", format!("unknown template `{s}`")))
}

fn cmd_bench(cfg: &BenchConfig, no_time: bool, output: Option<&Path>, overhead: Option<&Path>) -> Result<u8> {
    let rows = run_bench(cfg).map_err(|e| CliError::new("BadConfig", e.to_string()))?;
    write_output(output, &to_csv(&rows, !no_time))?;
    if let Some(path) = overhead {
        let text = render_overhead(&overhead_report(&rows));
        std::fs::write(path, text).map_err(|e| CliError::new("Io", format!("{}: {e}", path.display())))?;
    }
    Ok(0)
}

fn cmd_stats(file: &Path, property: Option<&str>, mode: Mode) -> Result<u8> {
    let f = read_spec(file)?;
    let prop = select_property(&f, property)?;
    let prep = prepare(&f.spec, &prop, mode, true).map_err(|e| CliError::new("CheckError", e.to_string()))?;
    let nav = &prep.system.nav;
    let asm = minimize_assignment_sets(&prep.graph, nav);
    let naive = naive_assignment_sets(nav);
    let mut out = String::new();
    let _ = writeln!(out, "navigation set: {} expressions ({} paths)", nav.len(), nav.num_paths());
    let _ = writeln!(
        out,
        "constraint graph: {} = edges, {} != edges",
        prep.graph.eq_edges().count(),
        prep.graph.neq_edges().count()
    );
    let _ = writeln!(out, "component  m  k  members");
    for (i, c) in components(&prep.graph, nav).iter().enumerate() {
        let names: Vec<String> = c.members.iter().map(|&e| nav.name(e)).collect();
        let _ = writeln!(out, "{i:>9} {:>2} {:>2}  {}", c.m, c.k, names.join(", "));
    }
    let _ = writeln!(out, "avg pool (asm): {:.3}", asm.average_size(nav));
    let _ = writeln!(out, "avg pool (naive): {:.3}", naive.average_size(nav));
    emit_stdout(&out);
    Ok(0)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Validate { file } => cmd_validate(&file),
        Command::Check { file, property, mode, asm, max_states, max_seconds, counterexample, json } => cmd_check(
            &file,
            property.as_deref(),
            mode.into(),
            asm.on(),
            max_states,
            max_seconds,
            counterexample.as_deref(),
            json,
        ),
        Command::Emit { file, property, ldt, asm, output } => {
            cmd_emit(&file, property.as_deref(), ldt.on(), asm.on(), output.as_deref())
        }
        Command::Bench {
            seed,
            relations,
            variables,
            services,
            fk_depth,
            condition_size,
            templates,
            reps,
            max_states,
            max_seconds,
            threads,
            no_time,
            output,
            overhead,
        } => {
            let templates = if templates.is_empty() {
                (1..=TEMPLATES.len()).collect()
            } else {
                templates.iter().map(|t| template_id(t)).collect::<Result<Vec<_>>>()?
            };
            let cfg = BenchConfig {
                seed,
                relations,
                variables,
                services,
                fk_depth,
                condition_size,
                templates,
                repetitions: reps,
                max_states,
                max_seconds,
                threads,
            };
            cmd_bench(&cfg, no_time, output.as_deref(), overhead.as_deref())
        }
        Command::Stats { file, property, mode } => cmd_stats(&file, property.as_deref(), mode.into()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("TASCHECK_LOG", "warn")).init();
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error[{}]: {}", e.code, e.message);
            ExitCode::from(2)
        }
    }
}
