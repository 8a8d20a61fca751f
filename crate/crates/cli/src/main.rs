//! `qcw`: exact computations on hyper m-expansion weight polynomials and
//! the q-deformed Calkin-Wilf trees they label.
//!
//! Exit codes: 0 on success, 1 when a verification sweep reports failures,
//! 2 on usage or domain errors.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use serde::Serialize;

use qcw_core::{
    build_tree, enumerate_expansions, extract_branch, f_poly, find_path, format_rational, g_poly,
    newman_seq, replay_path, stern, verify_branch_theorems, verify_classic, verify_density,
    verify_f_equals_g, verify_tree_vs_ratio, Fraction, HyperParams, QRat, Rational, RootMode,
    TreeParams, VerifyReport,
};

#[derive(Parser)]
#[command(
    name = "qcw",
    version,
    about = "Exact hyper m-expansion polynomials and generalized q-Calkin-Wilf trees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RootModeArg {
    Definition,
    Theorem,
}

impl From<RootModeArg> for RootMode {
    fn from(mode: RootModeArg) -> Self {
        match mode {
            RootModeArg::Definition => RootMode::Definition,
            RootModeArg::Theorem => RootMode::Theorem,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the weight polynomial f(n) computed by the base-m recurrence.
    Poly(PolyArgs),
    /// Enumerate expansions of n; print the weight polynomial g(n).
    Expand(ExpandArgs),
    /// Build a tree breadth-first and print its levels.
    Tree(TreeArgs),
    /// Extract the labels along one branch of a tree.
    Branch(BranchArgs),
    /// Find a root-to-vertex path whose q=1 label is the given fraction.
    Find(FindArgs),
    /// Stern diatomic value b_n.
    Stern {
        #[arg(long)]
        n: u64,
    },
    /// First terms of the Calkin-Wilf sequence via the floor recurrence.
    Newman {
        #[arg(long)]
        count: usize,
    },
    /// Verification sweeps; exit code 1 if any check fails.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Args)]
struct PolyArgs {
    #[arg(long)]
    m: u32,
    #[arg(long)]
    c: u32,
    #[arg(long)]
    n: u64,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct ExpandArgs {
    #[arg(long)]
    m: u32,
    #[arg(long)]
    c: u32,
    #[arg(long)]
    n: u64,
    /// Also print every expansion with its statistic h.
    #[arg(long)]
    list: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct TreeArgs {
    #[arg(long)]
    m: u32,
    #[arg(long)]
    c: u32,
    /// Root convention for c = 0 (definition: 1/1, theorem: 1/(1+q)).
    #[arg(long, value_enum, default_value = "definition")]
    root_mode: RootModeArg,
    #[arg(long)]
    depth: u32,
    /// Evaluate labels exactly at q = R (an integer or A/B; floats rejected).
    #[arg(long, allow_hyphen_values = true)]
    at_q: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Raise the depth guard (default 8).
    #[arg(long)]
    depth_guard: Option<u32>,
}

#[derive(Args)]
struct BranchArgs {
    #[arg(long)]
    m: u32,
    #[arg(long)]
    c: u32,
    /// Starting vertex in breadth-first reading order.
    #[arg(long)]
    vertex: u64,
    /// Child position to follow repeatedly (1..=m).
    #[arg(long)]
    child: u32,
    /// Number of branch elements, counting the starting vertex.
    #[arg(long)]
    len: usize,
    #[arg(long, allow_hyphen_values = true)]
    at_q: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct FindArgs {
    #[arg(long)]
    m: u32,
    #[arg(long)]
    c: u32,
    /// Target fraction A/B in lowest terms with A <= B.
    #[arg(long)]
    frac: String,
    /// Replay the found path through the structural rules at q = 1.
    #[arg(long)]
    replay: bool,
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Recurrence vs full enumeration for 0 <= n <= nmax.
    Expansions {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        c: u32,
        #[arg(long)]
        nmax: u32,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Structural tree labels vs the ratio oracle.
    Tree {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        c: u32,
        #[arg(long, value_enum, default_value = "definition")]
        root_mode: RootModeArg,
        #[arg(long)]
        depth: u32,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Branch closed forms and the Chebyshev cross-check (c = m-1).
    Branches {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        c: u32,
        #[arg(long)]
        jmax: u32,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Find-and-replay every reduced fraction with denominator <= bound.
    Density {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        c: u32,
        #[arg(long)]
        bound: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Stern / Calkin-Wilf / polynomial cross-checks up to bound.
    Classic {
        #[arg(long)]
        bound: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Every suite above over its standard parameter grid.
    All {
        /// Smaller bounds for a fast smoke run.
        #[arg(long)]
        quick: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, String> {
    match command {
        Command::Poly(args) => cmd_poly(args),
        Command::Expand(args) => cmd_expand(args),
        Command::Tree(args) => cmd_tree(args),
        Command::Branch(args) => cmd_branch(args),
        Command::Find(args) => cmd_find(args),
        Command::Stern { n } => {
            if n == 0 {
                return Err("stern is defined for n >= 1".into());
            }
            println!("{}", stern(n));
            Ok(ExitCode::SUCCESS)
        }
        Command::Newman { count } => {
            if count == 0 {
                return Err("count must be at least 1".into());
            }
            let terms: Vec<String> = newman_seq(count).iter().map(format_rational).collect();
            println!("{}", terms.join(" "));
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify(verify) => cmd_verify(verify),
    }
}

fn hyper_params(m: u32, c: u32) -> Result<HyperParams, String> {
    HyperParams::new(m, c).map_err(|e| e.to_string())
}

fn tree_params(
    m: u32,
    c: u32,
    mode: RootModeArg,
    guard: Option<u32>,
) -> Result<TreeParams, String> {
    let params = TreeParams::new(m, c, mode.into()).map_err(|e| e.to_string())?;
    Ok(match guard {
        Some(guard) => params.with_depth_guard(guard),
        None => params,
    })
}

/// Parses an exact rational literal: an integer or "A/B". Floats rejected.
fn parse_rational(s: &str) -> Result<Rational, String> {
    let err = |reason: &str| format!("invalid rational {s:?}: {reason}");
    if s.contains(['.', 'e', 'E']) {
        return Err(err(
            "floating-point literals are not accepted; use an integer or A/B",
        ));
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| err("bad numerator"))?;
    let den: BigInt = den.parse().map_err(|_| err("bad denominator"))?;
    if den.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(Rational::new(num, den))
}

fn parse_fraction(s: &str) -> Result<Fraction, String> {
    let err = |reason: &str| format!("invalid fraction {s:?}: {reason}");
    let (a, b) = s
        .split_once('/')
        .ok_or_else(|| err("expected the form A/B"))?;
    let a: BigUint = a.trim().parse().map_err(|_| err("bad numerator"))?;
    let b: BigUint = b.trim().parse().map_err(|_| err("bad denominator"))?;
    Fraction::new(a, b).map_err(|e| e.to_string())
}

fn cmd_poly(args: PolyArgs) -> Result<ExitCode, String> {
    let params = hyper_params(args.m, args.c)?;
    let n = i64::try_from(args.n).map_err(|_| "n out of range".to_string())?;
    let f = f_poly(n, &params);
    match args.format {
        Format::Text => println!("{f}"),
        Format::Json => println!("{}", serde_json::to_string(&f).expect("serializable")),
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct ExpansionOut {
    parts: Vec<(u32, u32)>,
    h: u32,
}

#[derive(Serialize)]
struct ExpandOut<'a> {
    g: &'a qcw_core::QPoly,
    count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    expansions: Option<Vec<ExpansionOut>>,
}

fn cmd_expand(args: ExpandArgs) -> Result<ExitCode, String> {
    let params = hyper_params(args.m, args.c)?;
    let n = i64::try_from(args.n).map_err(|_| "n out of range".to_string())?;
    let g = g_poly(n, &params);
    let expansions = enumerate_expansions(args.n, &params);
    match args.format {
        Format::Text => {
            println!("g = {g}");
            println!("expansions = {}", expansions.len());
            if args.list {
                for x in &expansions {
                    println!("{}  h={}", x.render(args.m), x.weight(&params));
                }
            }
        }
        Format::Json => {
            let listed = args.list.then(|| {
                expansions
                    .iter()
                    .map(|x| ExpansionOut {
                        parts: x.multiplicities().iter().map(|(&e, &k)| (e, k)).collect(),
                        h: x.weight(&params),
                    })
                    .collect()
            });
            let out = ExpandOut {
                g: &g,
                count: expansions.len(),
                expansions: listed,
            };
            println!("{}", serde_json::to_string(&out).expect("serializable"));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn render_label(label: &QRat, at_q: Option<&Rational>) -> Result<String, String> {
    match at_q {
        Some(point) => {
            let value = label.eval(point).map_err(|e| e.to_string())?;
            Ok(format_rational(&value))
        }
        None => Ok(label.to_string()),
    }
}

#[derive(Serialize)]
struct EvaluatedNode {
    n: u64,
    parent: Option<u64>,
    pos: Option<u32>,
    value: String,
}

fn cmd_tree(args: TreeArgs) -> Result<ExitCode, String> {
    let params = tree_params(args.m, args.c, args.root_mode, args.depth_guard)?;
    let at_q = args.at_q.as_deref().map(parse_rational).transpose()?;
    let nodes = build_tree(&params, args.depth).map_err(|e| e.to_string())?;
    match args.format {
        Format::Text => {
            let mut start = 0usize;
            let mut width = 1usize;
            while start < nodes.len() {
                let level: Result<Vec<String>, String> = nodes[start..start + width]
                    .iter()
                    .map(|node| render_label(&node.label, at_q.as_ref()))
                    .collect();
                println!("{}", level?.join(" "));
                start += width;
                width *= args.m as usize;
            }
        }
        Format::Json => match &at_q {
            None => println!("{}", serde_json::to_string(&nodes).expect("serializable")),
            Some(point) => {
                let evaluated: Result<Vec<EvaluatedNode>, String> = nodes
                    .iter()
                    .map(|node| {
                        Ok(EvaluatedNode {
                            n: node.index,
                            parent: node.parent,
                            pos: node.child_pos,
                            value: render_label(&node.label, Some(point))?,
                        })
                    })
                    .collect();
                println!(
                    "{}",
                    serde_json::to_string(&evaluated?).expect("serializable")
                );
            }
        },
    }
    Ok(ExitCode::SUCCESS)
}

/// Level of a vertex in an m-ary breadth-first layout. Saturates once the
/// layout exceeds the index space; the depth guard rejects such requests.
fn level_of(index: u64, m: u64) -> u32 {
    let mut level = 0;
    let mut first_beyond = 1u64; // index one past the current level
    let mut width = 1u64;
    while index >= first_beyond {
        let next = width
            .checked_mul(m)
            .and_then(|w| first_beyond.checked_add(w));
        match next {
            Some(beyond) => {
                width *= m;
                first_beyond = beyond;
                level += 1;
            }
            None => return u32::MAX,
        }
    }
    level
}

fn cmd_branch(args: BranchArgs) -> Result<ExitCode, String> {
    let params = tree_params(args.m, args.c, RootModeArg::Definition, None)?;
    let at_q = args.at_q.as_deref().map(parse_rational).transpose()?;
    if args.len == 0 {
        return Err("len must be at least 1".into());
    }
    let extra = u32::try_from(args.len - 1).map_err(|_| "len out of range".to_string())?;
    let depth = level_of(args.vertex, u64::from(args.m)).saturating_add(extra);
    let nodes = build_tree(&params, depth).map_err(|e| e.to_string())?;
    let labels = extract_branch(&nodes, args.vertex, args.child, args.len, &params)
        .map_err(|e| e.to_string())?;
    match args.format {
        Format::Text => {
            for label in &labels {
                println!("{}", render_label(label, at_q.as_ref())?);
            }
        }
        Format::Json => match &at_q {
            None => println!("{}", serde_json::to_string(&labels).expect("serializable")),
            Some(point) => {
                let values: Result<Vec<String>, String> = labels
                    .iter()
                    .map(|label| render_label(label, Some(point)))
                    .collect();
                println!("{}", serde_json::to_string(&values?).expect("serializable"));
            }
        },
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_find(args: FindArgs) -> Result<ExitCode, String> {
    let params = tree_params(args.m, args.c, RootModeArg::Definition, None)?;
    let target = parse_fraction(&args.frac)?;
    let path = find_path(&target, &params).map_err(|e| e.to_string())?;
    println!("path: {path}");
    if args.replay {
        let replayed = replay_path(&path, &params).map_err(|e| e.to_string())?;
        println!("replay: {replayed}");
    }
    Ok(ExitCode::SUCCESS)
}

fn print_reports(reports: &[VerifyReport], format: Format) -> ExitCode {
    match format {
        Format::Text => {
            for (i, report) in reports.iter().enumerate() {
                if i > 0 {
                    println!();
                }
                println!("{report}");
            }
            let failures: usize = reports.iter().map(|r| r.failures.len()).sum();
            if reports.len() > 1 {
                println!();
                println!(
                    "suites: {}, checks: {}, failures: {failures}",
                    reports.len(),
                    reports.iter().map(|r| r.checks).sum::<u64>()
                );
            }
        }
        Format::Json => {
            if reports.len() == 1 {
                println!(
                    "{}",
                    serde_json::to_string(&reports[0]).expect("serializable")
                );
            } else {
                println!("{}", serde_json::to_string(reports).expect("serializable"));
            }
        }
    }
    if reports.iter().all(VerifyReport::passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn cmd_verify(command: VerifyCommand) -> Result<ExitCode, String> {
    match command {
        VerifyCommand::Expansions { m, c, nmax, format } => {
            let params = hyper_params(m, c)?;
            let report = verify_f_equals_g(&params, i64::from(nmax));
            Ok(print_reports(&[report], format))
        }
        VerifyCommand::Tree {
            m,
            c,
            root_mode,
            depth,
            format,
        } => {
            let params = tree_params(m, c, root_mode, None)?;
            let report = verify_tree_vs_ratio(&params, depth).map_err(|e| e.to_string())?;
            Ok(print_reports(&[report], format))
        }
        VerifyCommand::Branches { m, c, jmax, format } => {
            let params = tree_params(m, c, RootModeArg::Definition, None)?;
            let report = verify_branch_theorems(&params, jmax).map_err(|e| e.to_string())?;
            Ok(print_reports(&[report], format))
        }
        VerifyCommand::Density {
            m,
            c,
            bound,
            format,
        } => {
            if bound == 0 {
                return Err("bound must be at least 1".into());
            }
            let params = tree_params(m, c, RootModeArg::Definition, None)?;
            let report = verify_density(&params, bound).map_err(|e| e.to_string())?;
            Ok(print_reports(&[report], format))
        }
        VerifyCommand::Classic { bound, format } => {
            if bound == 0 {
                return Err("bound must be at least 1".into());
            }
            Ok(print_reports(&[verify_classic(bound)], format))
        }
        VerifyCommand::All { quick, format } => {
            let reports = verify_all(quick)?;
            Ok(print_reports(&reports, format))
        }
    }
}

/// The standard grid: every family and every suite, at bounds where the
/// identities are expected to hold. The middle-family tree comparison runs
/// at depth 1 only (deeper levels diverge at final children; the report
/// note explains, and `verify tree` exposes the full-depth behavior).
fn verify_all(quick: bool) -> Result<Vec<VerifyReport>, String> {
    let mut reports = Vec::new();

    let nmax = if quick { 60 } else { 200 };
    for m in 2..=5u32 {
        for c in 0..m {
            reports.push(verify_f_equals_g(&hyper_params(m, c)?, nmax));
        }
    }

    let depth = if quick { 3 } else { 4 };
    for (m, c) in [(3, 2), (4, 3), (5, 4), (2, 1)] {
        let params = tree_params(m, c, RootModeArg::Definition, None)?;
        reports.push(verify_tree_vs_ratio(&params, depth).map_err(|e| e.to_string())?);
    }
    for (m, c) in [(3, 1), (4, 1), (4, 2), (5, 2), (5, 3)] {
        let params = tree_params(m, c, RootModeArg::Definition, None)?;
        reports.push(verify_tree_vs_ratio(&params, 1).map_err(|e| e.to_string())?);
    }
    let zero_depth = if quick { 2 } else { 3 };
    for m in [2, 3, 4] {
        let params = tree_params(m, 0, RootModeArg::Theorem, None)?;
        reports.push(verify_tree_vs_ratio(&params, zero_depth).map_err(|e| e.to_string())?);
    }

    let jmax = if quick { 3 } else { 4 };
    for (m, c) in [(3, 2), (4, 3), (2, 1)] {
        let params = tree_params(m, c, RootModeArg::Definition, None)?;
        reports.push(verify_branch_theorems(&params, jmax).map_err(|e| e.to_string())?);
    }

    let bound = if quick { 10 } else { 25 };
    for (m, c) in [
        (3, 2),
        (4, 3),
        (5, 4),
        (2, 0),
        (3, 0),
        (4, 0),
        (3, 1),
        (4, 2),
        (5, 2),
    ] {
        let params = tree_params(m, c, RootModeArg::Definition, None)?;
        reports.push(verify_density(&params, bound).map_err(|e| e.to_string())?);
    }

    reports.push(verify_classic(if quick { 100 } else { 500 }));
    Ok(reports)
}
