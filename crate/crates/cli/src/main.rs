use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use twisted_graph::moves::{fuzz, invariance_holds};
use twisted_graph::states::state_count;
use twisted_graph::{
    enumerate_states, q_poly, r_poly, resolve, to_ribbon, vcr_bound_of, Diagram, EvalOptions,
    MoveKind, Poly, Strategy,
};

#[derive(Parser)]
#[command(name = "tgd", version, about = "Invariants of twisted graph diagrams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute R, Q or the Yamada specialization of a diagram.
    Compute {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = What::R)]
        what: What,
        #[arg(long, value_enum, default_value_t = StrategyArg::Brute)]
        strategy: StrategyArg,
        #[arg(long, value_enum, default_value_t = Format::Plain)]
        format: Format,
        /// Evaluate states on all cores.
        #[arg(long)]
        parallel: bool,
    },
    /// Compare R of two diagrams up to a factor (-a)^n.
    Equiv {
        a: PathBuf,
        b: PathBuf,
        /// Also accept a <-> 1/a.
        #[arg(long)]
        mirror: bool,
    },
    /// List the states of a diagram with the surface statistics of each.
    States {
        file: PathBuf,
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Apply random moves and print the resulting diagram.
    Fuzz {
        file: PathBuf,
        #[arg(long, default_value_t = 10)]
        length: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated move kinds or groups (safe, exact, classical,
        /// virtual, twisted, R1, R2, V1, V2, T2).
        #[arg(long, default_value = "safe")]
        kinds: String,
        /// Recompute R and fail if it changed.
        #[arg(long)]
        check: bool,
        /// Permit moves that are not equivalences.
        #[arg(long = "unsafe")]
        allow_unsafe: bool,
        /// Write the move log as JSON lines.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Parse and validate a diagram.
    Validate { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum What {
    R,
    Q,
    Yamada,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Brute,
    ContractDelete,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Plain,
    Json,
    Latex,
}

/// Failure with the exit status it maps to.
struct Failure(u8, String);

fn usage(msg: impl ToString) -> Failure {
    Failure(2, msg.to_string())
}

fn load(path: &Path) -> Result<Diagram, Failure> {
    let text =
        std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Diagram::parse(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn eval_r(d: &Diagram, opts: &EvalOptions) -> Result<Poly, Failure> {
    r_poly(d, opts).map_err(usage)
}

fn compute(
    file: &Path,
    what: What,
    strategy: StrategyArg,
    format: Format,
    parallel: bool,
) -> Result<(), Failure> {
    let d = load(file)?;
    let strategy = match strategy {
        StrategyArg::Brute => Strategy::Brute,
        StrategyArg::ContractDelete => Strategy::ContractDelete,
    };
    let opts = EvalOptions { strategy, parallel };
    let start = Instant::now();
    let (poly, states, bound) = match what {
        What::R | What::Yamada => {
            let r = eval_r(&d, &opts)?;
            let bound = vcr_bound_of(&r);
            let p = if matches!(what, What::Yamada) {
                r.at_z1_w1()
            } else {
                r
            };
            (p, state_count(&d), bound)
        }
        What::Q => {
            if !d.is_pure() {
                return Err(usage("Q needs a diagram without classical crossings"));
            }
            let q = q_poly(&d, &opts).map_err(usage)?;
            let bound = vcr_bound_of(&q.subst_y());
            (q, 1, bound)
        }
    };
    let ms = start.elapsed().as_secs_f64() * 1e3;
    match format {
        Format::Json => {
            let out = json!({
                "polynomial": poly.to_json(),
                "z_degree": poly.z_degree(),
                "vcr_lower_bound": bound,
                "states": states.to_string().parse::<serde_json::Number>().expect("integer"),
                "strategy": strategy.name(),
                "wall_time_ms": ms,
            });
            println!("{out}");
        }
        Format::Plain | Format::Latex => {
            let text = if matches!(format, Format::Latex) {
                poly.to_latex()
            } else {
                poly.to_plain()
            };
            println!("{text}");
            let z = poly
                .z_degree()
                .map_or("none".to_string(), |z| z.to_string());
            eprintln!("states: {states}\nz-degree: {z}\nvcr lower bound: {bound}\nstrategy: {}\ntime: {ms:.3} ms", strategy.name());
        }
    }
    Ok(())
}

fn equiv(a: &Path, b: &Path, mirror: bool) -> Result<bool, Failure> {
    let opts = EvalOptions::default();
    let (ra, rb) = (eval_r(&load(a)?, &opts)?, eval_r(&load(b)?, &opts)?);
    for (path, r) in [(a, &ra), (b, &rb)] {
        match r.unit_normalize() {
            Ok(n) => println!("{}: (-a)^{} * ({})", path.display(), n.shift, n.normalized),
            Err(_) => println!("{}: 0", path.display()),
        }
    }
    let same = ra.equal_up_to_unit(&rb, mirror);
    println!("{}", if same { "equivalent" } else { "not equivalent" });
    Ok(same)
}

fn states(file: &Path, limit: Option<usize>) -> Result<(), Failure> {
    let d = load(file)?;
    for s in enumerate_states(&d).take(limit.unwrap_or(usize::MAX)) {
        let pure = resolve(&d, &s).map_err(usage)?;
        let (g, circles) = to_ribbon(&pure).map_err(usage)?;
        let st = g.surface_stats();
        let spins = if s.assignment.is_empty() {
            "-".to_string()
        } else {
            s.spin_string()
        };
        println!(
            "{spins}\tp-q={}\tk={} n={} b={} t={}\tcircles={}+{}",
            s.weight_exp(),
            st.k,
            st.n,
            st.b,
            st.t,
            circles.e,
            circles.o
        );
    }
    Ok(())
}

struct FuzzArgs<'a> {
    file: &'a Path,
    length: usize,
    seed: u64,
    kinds: &'a str,
    check: bool,
    allow_unsafe: bool,
    log: Option<&'a Path>,
}

fn fuzz_cmd(a: FuzzArgs) -> Result<bool, Failure> {
    let d = load(a.file)?;
    let kinds = MoveKind::parse_set(a.kinds, a.allow_unsafe).map_err(usage)?;
    let (e, log) = fuzz(&d, a.length, a.seed, &kinds);
    if let Some(path) = a.log {
        std::fs::write(path, log.to_json_lines())
            .map_err(|err| usage(format!("{}: {err}", path.display())))?;
    }
    print!("{}", e.serialize());
    if a.check {
        let opts = EvalOptions::default();
        if !invariance_holds(&eval_r(&d, &opts)?, &eval_r(&e, &opts)?, &log) {
            eprintln!(
                "R changed after {} moves:\n{}",
                log.steps.len(),
                log.to_json_lines()
            );
            return Ok(false);
        }
        eprintln!("R invariant over {} moves", log.steps.len());
    }
    Ok(true)
}

fn validate(file: &Path) -> Result<(), Failure> {
    let d = load(file)?;
    let s = d.stats();
    println!(
        "valid: {} vertices, {} classical, {} virtual, {} circles, {} bars",
        s.num_vertices, s.num_classical, s.num_virtual, s.num_circles, s.total_bars
    );
    Ok(())
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::Compute {
            file,
            what,
            strategy,
            format,
            parallel,
        } => compute(&file, what, strategy, format, parallel).map(|_| true),
        Command::Equiv { a, b, mirror } => equiv(&a, &b, mirror),
        Command::States { file, limit } => states(&file, limit).map(|_| true),
        Command::Fuzz {
            file,
            length,
            seed,
            kinds,
            check,
            allow_unsafe,
            log,
        } => fuzz_cmd(FuzzArgs {
            file: &file,
            length,
            seed,
            kinds: &kinds,
            check,
            allow_unsafe,
            log: log.as_deref(),
        }),
        Command::Validate { file } => validate(&file).map(|_| true),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
