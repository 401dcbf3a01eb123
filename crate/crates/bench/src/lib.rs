//! Command-line harness: generate instances, solve, sweep k, validate and
//! re-cost solutions.
//!
//! Exit codes: 0 success, 2 usage, 3 input data error, 4 solver failure,
//! 5 validation findings.

pub mod sweep;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use vnstt::cost::{cost_of_map, hard_violations, Scope, COST_TOLERANCE};
use vnstt::gen::{self, GenSpec};
use vnstt::io::{load_instance, save_instance, save_solution, SolutionFile};
use vnstt::model::{validate_instance, Calendar};
use vnstt::trace::{format_cost, rotation_table, stage_table, trace_csv};
use vnstt::vns::{max_k, solve_vns};
use vnstt::{Error, Problem};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_SOLVER: i32 = 4;
pub const EXIT_FINDINGS: i32 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "vnstt",
    version,
    about = "Course timetabling by neighborhood-structure rotation"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic instance
    Gen(GenArgs),
    /// Solve an instance with k neighborhood structures
    Solve(SolveArgs),
    /// Solve an instance for several values of k
    Sweep(SweepArgs),
    /// Check an instance file for structural problems
    Validate(ValidateArgs),
    /// Check a solution and recompute its cost
    Cost(CostArgs),
}

#[derive(Debug, Args)]
struct GenArgs {
    /// Dataset shape: N18, N90 or N130
    #[arg(long, conflicts_with_all = ["events", "students", "groups", "lecturers", "rooms"])]
    preset: Option<String>,
    #[arg(long)]
    events: Option<usize>,
    #[arg(long)]
    students: Option<usize>,
    #[arg(long)]
    groups: Option<usize>,
    #[arg(long)]
    lecturers: Option<usize>,
    #[arg(long)]
    rooms: Option<usize>,
    #[arg(long, default_value_t = 5)]
    days: usize,
    #[arg(long, default_value_t = 8)]
    periods: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 0.0)]
    fixed_fraction: f64,
    #[arg(long, default_value_t = 0.1)]
    unpref_fraction: f64,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(short, long)]
    instance: PathBuf,
    /// Number of neighborhood structures
    #[arg(short)]
    k: usize,
    /// Solution file to write
    #[arg(short, long)]
    output: PathBuf,
    /// Trace CSV to write
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Print the per-rotation table
    #[arg(long)]
    table: bool,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(short, long)]
    instance: PathBuf,
    /// Comma-separated k values
    #[arg(
        long,
        value_delimiter = ',',
        required_unless_present = "k_all_divisors"
    )]
    k_list: Vec<usize>,
    /// Every divisor d of N with 2 <= d <= N/2
    #[arg(long, conflicts_with = "k_list")]
    k_all_divisors: bool,
    /// Report CSV to write
    #[arg(long)]
    report: PathBuf,
    /// Combined trace CSV to write
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Worker threads
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Print the per-structure table for every k
    #[arg(long)]
    table: bool,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(short, long)]
    instance: PathBuf,
}

#[derive(Debug, Args)]
struct CostArgs {
    #[arg(short, long)]
    instance: PathBuf,
    #[arg(short, long)]
    solution: PathBuf,
}

/// A failed command: exit code plus message for stderr.
struct Failure(i32, String);

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Self(EXIT_USAGE, msg.into())
    }

    fn input(msg: impl Into<String>) -> Self {
        Self(EXIT_INPUT, msg.into())
    }
}

type CmdResult = std::result::Result<i32, Failure>;

/// Parses `args` (program name first) and runs the command, writing
/// normal output to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a, out),
        Command::Solve(a) => cmd_solve(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Validate(a) => cmd_validate(a, out),
        Command::Cost(a) => cmd_cost(a, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn write_file(path: &Path, contents: &str) -> std::result::Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_problem(path: &Path) -> std::result::Result<Problem, Failure> {
    let instance = load_instance(path).map_err(|e| Failure::input(e.to_string()))?;
    Problem::new(instance).map_err(|e| match e {
        Error::InvalidInstance(v) => Failure::input(format!(
            "{}: invalid instance:\n{}",
            path.display(),
            v.iter()
                .map(|v| format!("  {v}"))
                .collect::<Vec<_>>()
                .join("\n")
        )),
        other => Failure::input(other.to_string()),
    })
}

fn check_k(problem: &Problem, k: usize) -> std::result::Result<(), Failure> {
    let n = problem.num_events();
    if k < 2 || k > max_k(n) {
        return Err(Failure::usage(format!(
            "k = {k} out of range: need k >= 2 and k <= N/2 = {} (N = {n})",
            max_k(n)
        )));
    }
    Ok(())
}

fn cmd_gen(a: GenArgs, out: &mut dyn Write) -> CmdResult {
    let mut spec = match &a.preset {
        Some(name) => gen::preset(name, a.seed).map_err(|e| Failure::usage(e.to_string()))?,
        None => match (a.events, a.students, a.groups, a.lecturers, a.rooms) {
            (Some(n), Some(s), Some(g), Some(l), Some(r)) => GenSpec::new(n, s, g, l, r, a.seed),
            _ => {
                return Err(Failure::usage(format!(
                    "give --preset ({}) or all of --events --students --groups --lecturers --rooms",
                    gen::PRESETS.join(", ")
                )))
            }
        },
    };
    spec.calendar = Calendar::new(a.days, a.periods);
    spec.fixed_fraction = a.fixed_fraction;
    spec.unpref_fraction = a.unpref_fraction;

    let instance = gen::generate(&spec).map_err(|e| match e {
        Error::UnsatisfiableSpec(_) => Failure::input(e.to_string()),
        other => Failure::usage(other.to_string()),
    })?;
    save_instance(&instance, &a.output).map_err(|e| Failure::input(e.to_string()))?;
    let _ = writeln!(
        out,
        "{}: N={} G={} L={} R={} T={} -> {}",
        instance.id,
        instance.events.len(),
        instance.groups.len(),
        instance.lecturers.len(),
        instance.rooms.len(),
        instance.calendar.timeslots(),
        a.output.display()
    );
    Ok(EXIT_OK)
}

fn cmd_solve(a: SolveArgs, out: &mut dyn Write) -> CmdResult {
    let problem = load_problem(&a.instance)?;
    check_k(&problem, a.k)?;
    let run = solve_vns(&problem, a.k).map_err(|e| Failure::usage(e.to_string()))?;
    if let Some(path) = &a.trace {
        write_file(path, &trace_csv([&run]))?;
    }
    if a.table {
        let _ = write!(out, "{}", rotation_table(&run));
    }
    let _ = writeln!(
        out,
        "k={} structures={:?} construct_calls={} cost_evaluations={} elapsed_ms={:.3}",
        run.k,
        run.structure_sizes,
        run.construct_calls,
        run.cost_evaluations,
        run.elapsed.as_secs_f64() * 1e3
    );
    let Some(solution) = &run.final_solution else {
        return Err(Failure(
            EXIT_SOLVER,
            "no construction succeeded; no solution written".into(),
        ));
    };
    save_solution(&problem, solution, &a.output).map_err(|e| Failure::input(e.to_string()))?;
    let _ = writeln!(out, "cost={}", format_cost(solution.cost()));
    Ok(EXIT_OK)
}

fn cmd_sweep(a: SweepArgs, out: &mut dyn Write) -> CmdResult {
    let problem = load_problem(&a.instance)?;
    let n = problem.num_events();
    if a.jobs == 0 {
        return Err(Failure::usage("--jobs must be >= 1"));
    }
    let mut ks = if a.k_all_divisors {
        sweep::all_divisor_ks(n)
    } else {
        a.k_list.clone()
    };
    ks.sort_unstable();
    ks.dedup();
    if ks.is_empty() {
        return Err(Failure::usage(format!("no admissible k for N = {n}")));
    }
    for &k in &ks {
        check_k(&problem, k)?;
    }

    let runs =
        sweep::run_sweep(&problem, &ks, a.jobs).map_err(|e| Failure::usage(e.to_string()))?;
    let report = sweep::report(&problem, &runs);
    write_file(&a.report, &report.to_csv())?;
    if let Some(path) = &a.trace {
        write_file(path, &trace_csv(&runs))?;
    }
    if a.table {
        let _ = write!(out, "{}", stage_table(&runs));
    }
    for row in &report.rows {
        let _ = writeln!(
            out,
            "k={:<3} final={:>12} evaluations={:>10} elapsed_ms={:.1}",
            row.k,
            row.final_cost
                .map(format_cost)
                .unwrap_or_else(|| "FAILED".into()),
            row.cost_evaluations,
            row.elapsed.as_secs_f64() * 1e3
        );
    }
    match report.best_k() {
        Some(best) => {
            let _ = writeln!(
                out,
                "best k = {} (cost {}), structure size {} = {:.1}% of {} events",
                best.k,
                format_cost(best.final_cost.unwrap()),
                best.structure_size,
                100.0 * best.ratio(n),
                n
            );
            Ok(EXIT_OK)
        }
        None => Err(Failure(EXIT_SOLVER, "no k produced a solution".into())),
    }
}

fn cmd_validate(a: ValidateArgs, out: &mut dyn Write) -> CmdResult {
    let instance = load_instance(&a.instance).map_err(|e| Failure::input(e.to_string()))?;
    let violations = validate_instance(&instance);
    if violations.is_empty() {
        let _ = writeln!(out, "OK");
        return Ok(EXIT_OK);
    }
    for v in &violations {
        let _ = writeln!(out, "{v}");
    }
    Ok(EXIT_FINDINGS)
}

fn cmd_cost(a: CostArgs, out: &mut dyn Write) -> CmdResult {
    let problem = load_problem(&a.instance)?;
    let file = SolutionFile::load(&a.solution).map_err(|e| Failure::input(e.to_string()))?;
    let map = file
        .resolve(&problem)
        .map_err(|e| Failure::input(format!("{}: {e}", a.solution.display())))?;
    let violations = hard_violations(&problem, &map, Scope::Full);
    let mut findings = !violations.is_empty();
    for v in &violations {
        let _ = writeln!(out, "{}", v.describe(&problem));
    }
    for (e, p) in map.iter().enumerate() {
        if let (Some(fixed), Some(p)) = (problem.fixed(e), p) {
            if fixed != *p {
                findings = true;
                let _ = writeln!(out, "FIXED_MOVED: event {}", problem.event_id(e));
            }
        }
    }
    let recomputed = cost_of_map(&problem, &map);
    let _ = writeln!(
        out,
        "cost={} stored={}",
        format_cost(recomputed),
        format_cost(file.cost)
    );
    if (recomputed - file.cost).abs() > COST_TOLERANCE {
        findings = true;
        let _ = writeln!(
            out,
            "COST_MISMATCH: stored cost differs from recomputed cost"
        );
    }
    if findings {
        Ok(EXIT_FINDINGS)
    } else {
        let _ = writeln!(out, "OK");
        Ok(EXIT_OK)
    }
}
