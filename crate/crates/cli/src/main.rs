//! `ramsum`: Ramanujan sums over free abelian monoids from the command line.
//!
//! Exit codes: 0 on success, 1 when a check suite reports failures, 2 on
//! invalid input.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ramsum::arith::von_mangoldt;
use ramsum::checks::{run_suite, CheckConfig, Suite};
use ramsum::fields::{cf_from_formula, field_invariants, h_from_counting, instance};
use ramsum::notation::{format_element, parse_element};
use ramsum::ramanujan::ramanujan_sum;
use ramsum::series::{decades, double_sum, residue_series, ResidueMode};
use ramsum::Monoid;
use serde_json::{json, Value};

use output::{round_floats, Cell, Table};

#[derive(Parser, Debug)]
#[command(
    name = "ramsum",
    version,
    about = "Generalized Ramanujan sums over free abelian monoids"
)]
struct Cli {
    #[command(flatten)]
    run: RunConfig,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct RunConfig {
    /// Monoid instance: `z` or `q:<d>` for Q(sqrt d)
    #[arg(long, global = true, default_value = "z")]
    instance: String,

    /// Worker threads (0 picks the number of cores)
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Largest accepted x
    #[arg(long, global = true, default_value_t = 1e7)]
    max_x: f64,

    /// Largest accepted y
    #[arg(long, global = true, default_value_t = 1e3)]
    max_y: f64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the atoms with norm <= x
    Atoms {
        #[arg(long, default_value_t = 100.0)]
        x: f64,
    },
    /// Print C_K(M)
    Csum {
        #[arg(long)]
        k: String,
        #[arg(long)]
        m: String,
    },
    /// Tabulate C_K(M) for norms <= bound (all K unless --k is given)
    Table {
        #[arg(long)]
        k: Option<String>,
        #[arg(long, default_value_t = 30)]
        bound: u64,
    },
    /// Run an identity suite and print its JSON report
    Check {
        /// th1, th2, apostol, holder, oracle, algebra, inner or all
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        bound: Option<u64>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Count elements with norm <= x
    Count {
        #[arg(long)]
        x: f64,
        /// Also report every power of ten below x
        #[arg(long)]
        scan: bool,
    },
    /// Partial sums of sum_M C_K(M)/N(M) against -c Lambda(K)
    Residue {
        #[arg(long)]
        k: String,
        #[arg(long)]
        x: f64,
        #[arg(long, conflicts_with = "direct")]
        grouped: bool,
        /// Sum term by term instead of grouping by divisors of K
        #[arg(long)]
        direct: bool,
        #[arg(long)]
        scan: bool,
    },
    /// S(x, y) with its main term and the bound x^a y^(2-a)
    Sxy {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        y: f64,
        #[arg(long)]
        scan: bool,
    },
    /// Class number formula data
    Invariants {
        #[arg(long, default_value_t = 1e6)]
        x: f64,
    },
}

enum Outcome {
    Ok,
    CheckFailed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.run.workers)
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(2);
        }
    };
    let result = pool.install(|| run(&cli));
    if let Err(msg) = &result {
        eprintln!("error: {msg}");
    }
    ExitCode::from(exit_status(&result))
}

fn exit_status(result: &CliResult<Outcome>) -> u8 {
    match result {
        Ok(Outcome::Ok) => 0,
        Ok(Outcome::CheckFailed) => 1,
        Err(_) => 2,
    }
}

type CliResult<T> = Result<T, String>;

fn run(cli: &Cli) -> CliResult<Outcome> {
    let cfg = &cli.run;
    let monoid = instance(&cfg.instance).map_err(|e| e.to_string())?;
    match &cli.command {
        Command::Atoms { x } => {
            check_x(cfg, *x)?;
            let view = monoid.extend(*x);
            let mut table = Table::new(&["id", "label", "norm", "prime"]);
            for a in view.atoms().iter().take_while(|a| a.norm as f64 <= *x) {
                table.push(vec![
                    Cell::from(a.id as u64),
                    Cell::from(a.label.clone()),
                    Cell::from(a.norm),
                    Cell::from(a.prime),
                ]);
            }
            emit_table(cfg, &table)?;
        }
        Command::Csum { k, m } => {
            let k = parse_element(&monoid, k).map_err(|e| e.to_string())?;
            let m = parse_element(&monoid, m).map_err(|e| e.to_string())?;
            let view = monoid.atoms();
            let value = ramanujan_sum(&view, &k, &m);
            match cfg.format {
                Format::Csv => emit(cfg, &format!("{value}\n"))?,
                Format::Json => emit_json(cfg, json!({ "C": value.to_string() }))?,
            }
        }
        Command::Table { k, bound } => {
            check_x(cfg, *bound as f64)?;
            let table = ramanujan_table(&monoid, k.as_deref(), *bound)?;
            emit_table(cfg, &table)?;
        }
        Command::Check {
            suite,
            bound,
            trials,
            seed,
        } => {
            let suite = Suite::parse(suite).map_err(|e| e.to_string())?;
            let config = CheckConfig {
                bound: *bound,
                trials: *trials,
                seed: *seed,
            };
            let report = run_suite(&monoid, suite, &config).map_err(|e| e.to_string())?;
            let value = serde_json::to_value(&report).map_err(|e| e.to_string())?;
            emit_json(cfg, value)?;
            if !report.passed() {
                return Ok(Outcome::CheckFailed);
            }
        }
        Command::Count { x, scan } => {
            check_x(cfg, *x)?;
            let nt = monoid.norm_table(*x);
            let mut table = Table::new(&["x", "count", "count/x"]);
            for t in scan_points(*x, *scan) {
                let count = nt.count_up_to(t);
                table.push(vec![
                    number(t),
                    Cell::from(count),
                    Cell::from(count as f64 / t),
                ]);
            }
            emit_table(cfg, &table)?;
        }
        Command::Residue {
            k, x, direct, scan, ..
        } => {
            check_x(cfg, *x)?;
            let k = parse_element(&monoid, k).map_err(|e| e.to_string())?;
            let mode = if *direct {
                ResidueMode::Direct
            } else {
                ResidueMode::Grouped
            };
            let lambda = von_mangoldt(&monoid.atoms(), &k);
            // With Lambda(K) = 0 the limit is 0 whatever c is.
            let target = if lambda == 0.0 {
                Some(0.0)
            } else {
                monoid.density().c.map(|c| -c * lambda)
            };
            let mut table = Table::new(&["x", "estimate", "target", "abs_err"]);
            for t in scan_points(*x, *scan) {
                let estimate = residue_series(&monoid, &k, t, mode).map_err(|e| e.to_string())?;
                let err = target.map(|v| (estimate - v).abs());
                table.push(vec![
                    number(t),
                    Cell::from(estimate),
                    Cell::from(target),
                    Cell::from(err),
                ]);
            }
            emit_table(cfg, &table)?;
        }
        Command::Sxy { x, y, scan } => {
            check_x(cfg, *x)?;
            if !(*y >= 1.0 && *y <= cfg.max_y) {
                return Err(format!(
                    "y = {y} is outside [1, {}]; raise --max-y to allow it",
                    cfg.max_y
                ));
            }
            let mut table = Table::new(&["x", "y", "S", "S-cx", "bound"]);
            for t in scan_points(*x, *scan) {
                let r = double_sum(&monoid, t, *y);
                table.push(vec![
                    number(t),
                    number(*y),
                    Cell::from(r.s),
                    Cell::from(r.residual),
                    Cell::from(r.bound),
                ]);
            }
            emit_table(cfg, &table)?;
        }
        Command::Invariants { x } => {
            check_x(cfg, *x)?;
            emit_json(cfg, invariants_report(&monoid, *x)?)?;
        }
    }
    Ok(Outcome::Ok)
}

fn check_x(cfg: &RunConfig, x: f64) -> CliResult<()> {
    if !(x >= 1.0) {
        return Err(format!("x = {x} must be at least 1"));
    }
    if x > cfg.max_x {
        return Err(format!(
            "x = {x} exceeds the cap {}; raise --max-x to allow it",
            cfg.max_x
        ));
    }
    Ok(())
}

fn scan_points(x: f64, scan: bool) -> Vec<f64> {
    if scan {
        decades(x)
    } else {
        vec![x]
    }
}

/// Integral values print without a fractional part.
fn number(v: f64) -> Cell {
    if v.fract() == 0.0 && v.abs() < 1e18 {
        Cell::Int(v as i128)
    } else {
        Cell::Float(v)
    }
}

fn ramanujan_table(monoid: &Monoid, k: Option<&str>, bound: u64) -> CliResult<Table> {
    let ks = match k {
        Some(text) => vec![parse_element(monoid, text).map_err(|e| e.to_string())?],
        None => monoid.enumerate_up_to(bound as f64),
    };
    let ms = monoid.enumerate_up_to(bound as f64);
    let view = monoid.atoms();
    let mut table = Table::new(&["k", "m", "C"]);
    for kk in &ks {
        for mm in &ms {
            let value = ramanujan_sum(&view, kk, mm);
            let cell =
                i128::try_from(&value).map_or_else(|_| Cell::Text(value.to_string()), Cell::Int);
            table.push(vec![
                Cell::from(format_element(&view, kk)),
                Cell::from(format_element(&view, mm)),
                cell,
            ]);
        }
    }
    Ok(table)
}

fn invariants_report(monoid: &Monoid, x: f64) -> CliResult<Value> {
    let inv = field_invariants(monoid, x).map_err(|e| e.to_string())?;
    let count = monoid.count_up_to(x);
    let counted = match h_from_counting(monoid, x) {
        Ok(h) => json!({ "estimate": h.estimate, "rounded": h.rounded }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    Ok(json!({
        "instance": monoid.name(),
        "x": x,
        "invariants": inv,
        "c_F": cf_from_formula(&inv),
        "count": count,
        "count/x": count as f64 / x,
        "h_from_counting": counted,
    }))
}

fn emit_table(cfg: &RunConfig, table: &Table) -> CliResult<()> {
    match cfg.format {
        Format::Csv => emit(cfg, &table.to_csv()),
        Format::Json => emit_json(cfg, table.to_json()),
    }
}

fn emit_json(cfg: &RunConfig, value: Value) -> CliResult<()> {
    let text = serde_json::to_string_pretty(&round_floats(value)).map_err(|e| e.to_string())?;
    emit(cfg, &(text + "\n"))
}

fn emit(cfg: &RunConfig, text: &str) -> CliResult<()> {
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
