//! `qel`: command-line front end for the `qel` library.
//!
//! Every subcommand emits a table, as CSV (default) or as a JSON object with
//! `meta` and `rows`. Exit status is 2 for argument errors, 1 for numeric
//! failures and golden mismatches, 0 otherwise.

mod output;
mod reproduce;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use output::{emit, render, Cell, Format, OutputSpec, Table};
use qel::superstable::{enumerate_cycles, solve_cycle, uniqueness_audit, CycleSolution};
use qel::{branch, entropy, misiurewicz, multimodal, poly, quad, QuadParam, Signature, SymbolicCycle};

#[derive(Debug)]
pub struct Fail {
    code: u8,
    message: String,
}

impl Fail {
    pub fn usage(message: impl Into<String>) -> Self {
        Fail {
            code: 2,
            message: message.into(),
        }
    }

    pub fn numeric(message: impl Into<String>) -> Self {
        Fail {
            code: 1,
            message: message.into(),
        }
    }
}

impl fmt::Display for Fail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<qel::Error> for Fail {
    fn from(e: qel::Error) -> Self {
        use qel::Error::*;
        match e {
            AmbiguousExtremum { .. } | NonMonotonePiece { .. } => Fail::numeric(e.to_string()),
            _ => Fail::usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Fail {
    fn from(e: std::io::Error) -> Self {
        Fail::numeric(format!("output: {e}"))
    }
}

#[derive(Parser)]
#[command(name = "qel", version, about = "Root branches, entropy and special parameters of t - x^2")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    #[arg(long, value_enum, default_value = "csv", global = true)]
    format: Format,
    /// Write to a file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Decimal digits for floating-point fields.
    #[arg(long, default_value_t = 12, global = true)]
    precision: usize,
    /// Worker threads for parameter grids (default: available parallelism).
    #[arg(long, env = "QEL_THREADS", global = true)]
    threads: Option<usize>,
    /// Accepted for harness compatibility; every computation is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Args, Clone, Copy)]
struct Range {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    t_min: f64,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    t_max: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Entropy estimate (1/n) log(1 + s_0 + ... + s_{n-1}).
    Entropy {
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[arg(long, default_value_t = entropy::DEFAULT_ENTROPY_DEPTH)]
        depth: usize,
    },
    /// The staircase t -> s_n(t) on a parameter grid.
    Staircase {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        range: Range,
        #[arg(long, default_value_t = 2000)]
        steps: usize,
        /// Add rows at both ends of each jump, bisected to 1e-9.
        #[arg(long)]
        refine_jumps: bool,
    },
    /// Root branches phi_sigma.
    #[command(subcommand)]
    Branch(BranchCmd),
    /// Superstable parameters.
    #[command(subcommand)]
    Superstable(SuperstableCmd),
    /// Misiurewicz parameters M_{h,T} in a parameter range.
    Misiurewicz {
        #[arg(long)]
        h: usize,
        #[arg(long = "T")]
        period: usize,
        #[command(flatten)]
        range: Range,
        #[arg(long, default_value_t = 1e-4)]
        grid_step: f64,
    },
    /// Samples of P_n(t) for n <= max-n.
    Darklines {
        #[arg(long)]
        max_n: usize,
        #[arg(long)]
        steps: usize,
        #[command(flatten)]
        range: Range,
    },
    /// Orbit of the critical point after a transient, per parameter.
    Bifurcation {
        #[command(flatten)]
        range: Range,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 1000)]
        transient: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Piecewise monotone maps read from a map file.
    #[command(subcommand)]
    Multimodal(MultimodalCmd),
    /// Integer coefficients of P_n(t), lowest power first.
    CriticalPoly {
        #[arg(long)]
        n: usize,
    },
    /// Recompute a published table or figure and compare with its golden file.
    Reproduce {
        #[arg(value_enum)]
        target: reproduce::Target,
    },
}

#[derive(Subcommand)]
enum BranchCmd {
    /// Value and regularity of phi_sigma(t).
    Eval {
        #[arg(long, allow_hyphen_values = true)]
        sig: Signature,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
    },
    /// Branching point t_sigma.
    Point {
        #[arg(long, allow_hyphen_values = true)]
        sig: Signature,
    },
    /// Radical and trigonometric forms at t = 2.
    AtTwo {
        #[arg(long, allow_hyphen_values = true)]
        sig: Signature,
    },
}

#[derive(Subcommand)]
enum SuperstableCmd {
    /// Parameter of one symbolic cycle such as "+--C".
    Solve {
        #[arg(long, allow_hyphen_values = true)]
        cycle: SymbolicCycle,
    },
    /// Every superstable parameter of prime period p.
    Enumerate {
        #[arg(long)]
        period: usize,
    },
    /// Pairwise distinctness and solver agreement up to a period.
    Audit {
        #[arg(long)]
        max_period: usize,
    },
}

#[derive(Subcommand)]
enum MultimodalCmd {
    /// Crossing counts, lap numbers and entropy estimate.
    Entropy {
        #[arg(long)]
        map: PathBuf,
        #[arg(long, default_value_t = 12)]
        depth: usize,
    },
}

fn param(t: f64) -> Result<QuadParam, Fail> {
    Ok(QuadParam::new(t)?)
}

fn range(r: Range) -> Result<(QuadParam, QuadParam), Fail> {
    let (lo, hi) = (param(r.t_min)?, param(r.t_max)?);
    if r.t_min >= r.t_max {
        return Err(Fail::usage("--t-min must be below --t-max"));
    }
    Ok((lo, hi))
}

fn steps_at_least_one(steps: usize) -> Result<usize, Fail> {
    if steps == 0 {
        return Err(Fail::usage("--steps must be at least 1"));
    }
    Ok(steps)
}

struct Outcome {
    name: &'static str,
    parameters: Map<String, Value>,
    table: Table,
    /// Reported after the table has been written.
    failure: Option<Fail>,
}

fn outcome(name: &'static str, parameters: Value, table: Table) -> Outcome {
    let Value::Object(parameters) = parameters else {
        unreachable!("parameters are built with json!({{..}})")
    };
    Outcome {
        name,
        parameters,
        table,
        failure: None,
    }
}

fn run_command(cmd: Command) -> Result<Outcome, Fail> {
    match cmd {
        Command::Entropy { t, depth } => {
            let e = entropy::entropy_estimate(param(t)?, depth)?;
            let mut table = Table::new(&["t", "depth", "h"]);
            table.push(vec![e.t.into(), e.depth.into(), e.h.into()]);
            Ok(outcome("entropy", json!({"t": t, "depth": depth}), table))
        }
        Command::Staircase {
            n,
            range: r,
            steps,
            refine_jumps,
        } => {
            let (lo, hi) = range(r)?;
            let s = entropy::staircase_with(n, lo, hi, steps, refine_jumps)?;
            let mut rows: Vec<(f64, u64)> = s.grid.iter().copied().zip(s.values.iter().copied()).collect();
            if refine_jumps {
                for j in &s.jumps {
                    rows.push((j.bracket.0, j.before));
                    rows.push((j.bracket.1, j.after));
                }
                rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                rows.dedup();
            }
            let mut table = Table::new(&["t", "s_n"]);
            for (t, v) in rows {
                table.push(vec![t.into(), v.into()]);
            }
            let params = json!({"n": n, "t_min": r.t_min, "t_max": r.t_max, "steps": steps, "refine_jumps": refine_jumps});
            Ok(outcome("staircase", params, table))
        }
        Command::Branch(BranchCmd::Eval { sig, t }) => {
            let e = branch::eval_branch(&sig, param(t)?);
            let mut table = Table::new(&["signature", "t", "defined", "regular", "value"]);
            table.push(vec![sig.to_string().into(), t.into(), e.defined.into(), e.regular.into(), e.value.into()]);
            Ok(outcome("branch eval", json!({"sig": sig.to_string(), "t": t}), table))
        }
        Command::Branch(BranchCmd::Point { sig }) => {
            let bp = branch::branching_point(&sig)?;
            let mut table = Table::new(&["signature", "t_sigma"]);
            table.push(vec![sig.to_string().into(), bp.t_sigma.into()]);
            Ok(outcome("branch point", json!({"sig": sig.to_string()}), table))
        }
        Command::Branch(BranchCmd::AtTwo { sig }) => {
            let (radical, trig) = branch::branch_at_two(&sig);
            let mut table = Table::new(&["signature", "radical", "trigonometric", "difference"]);
            table.push(vec![sig.to_string().into(), radical.into(), trig.into(), (radical - trig).abs().into()]);
            Ok(outcome("branch at-two", json!({"sig": sig.to_string()}), table))
        }
        Command::Superstable(SuperstableCmd::Solve { cycle }) => {
            let params = json!({"cycle": cycle.to_string()});
            match solve_cycle(&cycle) {
                CycleSolution::Solved(c) => {
                    let mut table = Table::new(&["period", "cycle", "t"]);
                    table.push(vec![c.period().into(), c.cycle.to_string().into(), c.t0.into()]);
                    Ok(outcome("superstable solve", params, table))
                }
                CycleSolution::NotAdmissible => Err(Fail::numeric(format!(
                    "{cycle} is not realized by any parameter with prime period {}",
                    cycle.period()
                ))),
                CycleSolution::Ambiguous { t, step } => Err(Fail::numeric(format!(
                    "{cycle}: candidate t = {t} passes near 0 at step {step}"
                ))),
            }
        }
        Command::Superstable(SuperstableCmd::Enumerate { period }) => {
            let mut table = Table::new(&["period", "cycle", "t"]);
            for c in enumerate_cycles(period)? {
                table.push(vec![period.into(), c.cycle.to_string().into(), c.t0.into()]);
            }
            Ok(outcome("superstable enumerate", json!({"period": period}), table))
        }
        Command::Superstable(SuperstableCmd::Audit { max_period }) => {
            let report = uniqueness_audit(max_period)?;
            let mut table = Table::new(&["period", "cycle", "t"]);
            for (p, c, t) in &report.parameters {
                table.push(vec![(*p).into(), c.to_string().into(), (*t).into()]);
            }
            let mut out = outcome("superstable audit", json!({"max_period": max_period}), table);
            if !report.passed() {
                out.failure = Some(Fail::numeric(format!(
                    "uniqueness audit failed: {} collisions, {} solver mismatches",
                    report.collisions.len(),
                    report.mismatches.len()
                )));
            }
            Ok(out)
        }
        Command::Misiurewicz {
            h,
            period,
            range: r,
            grid_step,
        } => {
            let (lo, hi) = range(r)?;
            let mut table = Table::new(&["h", "T", "t"]);
            for m in misiurewicz::find_misiurewicz(h, period, lo, hi, grid_step)? {
                table.push(vec![m.h.into(), m.period.into(), m.t.into()]);
            }
            let params = json!({"h": h, "T": period, "t_min": r.t_min, "t_max": r.t_max, "grid_step": grid_step});
            Ok(outcome("misiurewicz", params, table))
        }
        Command::Darklines { max_n, steps, range: r } => {
            let (lo, hi) = range(r)?;
            if max_n == 0 {
                return Err(Fail::usage("--max-n must be at least 1"));
            }
            let mut table = Table::new(&["t", "n", "P_n(t)"]);
            for (t, n, v) in misiurewicz::dark_lines(max_n, lo, hi, steps_at_least_one(steps)?) {
                table.push(vec![t.into(), n.into(), v.into()]);
            }
            let params = json!({"max_n": max_n, "steps": steps, "t_min": r.t_min, "t_max": r.t_max});
            Ok(outcome("darklines", params, table))
        }
        Command::Bifurcation {
            range: r,
            steps,
            transient,
            samples,
        } => {
            let (lo, hi) = range(r)?;
            let steps = steps_at_least_one(steps)?;
            let ts: Vec<f64> = (0..=steps)
                .map(|i| lo.get() + (hi.get() - lo.get()) * i as f64 / steps as f64)
                .collect();
            let tails: Vec<Vec<f64>> = ts
                .par_iter()
                .map(|&t| quad::critical_orbit_tail(QuadParam::saturating(t), transient, samples))
                .collect();
            let mut table = Table::new(&["t", "k", "x"]);
            for (t, tail) in ts.iter().zip(&tails) {
                for (k, x) in tail.iter().enumerate() {
                    table.push(vec![(*t).into(), (transient + k).into(), (*x).into()]);
                }
            }
            let params = json!({"t_min": r.t_min, "t_max": r.t_max, "steps": steps, "transient": transient, "samples": samples});
            Ok(outcome("bifurcation", params, table))
        }
        Command::Multimodal(MultimodalCmd::Entropy { map, depth }) => {
            let src = std::fs::read_to_string(&map).map_err(|e| Fail::usage(format!("{}: {e}", map.display())))?;
            let f = multimodal::parse_map(&src)?;
            let counts = multimodal::crossing_counts(&f, depth)?;
            let laps = entropy::lap_numbers(&counts.iter().map(|c| c.total).collect::<Vec<_>>());
            // l_n = 1 + s_0 + ... + s_{n-1}; h_n = log(l_n) / n.
            let mut table = Table::new(&["n", "s_n", "l_n", "h_n"]);
            for (c, &l) in counts.iter().zip(&laps) {
                let h = (c.n > 0).then(|| (l as f64).ln() / c.n as f64);
                table.push(vec![c.n.into(), c.total.into(), l.into(), h.into()]);
            }
            let params = json!({"map": map.display().to_string(), "depth": depth});
            Ok(outcome("multimodal entropy", params, table))
        }
        Command::CriticalPoly { n } => {
            let p = poly::critical_poly(n)?;
            let mut table = Table::new(&["power", "coefficient"]);
            for (k, c) in p.coeffs_big().iter().enumerate() {
                table.push(vec![k.into(), Cell::Text(c.to_string())]);
            }
            Ok(outcome("critical-poly", json!({"n": n}), table))
        }
        Command::Reproduce { target } => {
            let (table, bad) = reproduce::run(target)?;
            let name = format!("{target:?}").to_lowercase();
            let mut out = outcome("reproduce", json!({"target": name}), table);
            if bad > 0 {
                out.failure = Some(Fail::numeric(format!("reproduce {name}: {bad} rows differ from the golden file")));
            }
            Ok(out)
        }
    }
}

fn run(cli: Cli) -> Result<(), Fail> {
    let g = cli.global;
    if let Some(n) = g.threads {
        if n == 0 {
            return Err(Fail::usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Fail::numeric(e.to_string()))?;
    }
    let out = run_command(cli.command)?;
    let spec = OutputSpec {
        format: g.format,
        path: g.output.as_deref(),
        precision: g.precision,
    };
    let bytes = render(&out.table, &spec, out.name, out.parameters)?;
    emit(&bytes, spec.path)?;
    out.failure.map_or(Ok(()), Err)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qel: {e}");
            ExitCode::from(e.code)
        }
    }
}
