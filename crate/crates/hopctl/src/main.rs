//! hopctl: build, validate, query and benchmark exact hopsets.
//!
//! Exit codes: 0 ok, 2 validation failure, 3 parse/config error,
//! 4 infeasible model or solver/rounding failure.

mod bench;

use std::io::BufRead;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hopset_core::generate::{generate, GraphKind};
use hopset_core::hopset::{validate_hopset, Hopset};
use hopset_core::io;
use hopset_core::lp;
use hopset_core::oracle::{validate_oracle, ThreeHopOracle, ValidationScope};
use hopset_core::ratio::Ratio;
use hopset_core::skeleton;
use hopset_core::tree;
use hopset_core::treewidth;
use hopset_core::usp;
use hopset_core::WeightedGraph;

#[derive(Parser)]
#[command(
    name = "hopctl",
    version,
    about = "exact h-hopsets and 3-hop distance oracles"
)]
struct Cli {
    /// Rayon worker threads (0 = default).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a graph file.
    Gen(GenArgs),
    /// Build a hopset (and oracle sidecar for 3-hop methods).
    Build(BuildArgs),
    /// Re-load and re-verify a hopset (and optional oracle) against its graph.
    Validate(ValidateArgs),
    /// Answer `u v` distance queries from standard input.
    Query(QueryArgs),
    /// Sweep sizes and print one report line per run.
    Bench(bench::BenchArgs),
    /// Size and growth statistics.
    Stats(StatsArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Path,
    Star,
    BalancedTree,
    Grid,
    Gnm,
    Caterpillar,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Node count (path, star, balanced-tree, gnm, caterpillar).
    #[arg(long, default_value_t = 0)]
    n: u32,
    /// Edge count (gnm).
    #[arg(long, default_value_t = 0)]
    m: u32,
    #[arg(long, default_value_t = 0)]
    rows: u32,
    #[arg(long, default_value_t = 0)]
    cols: u32,
    /// Branching factor (balanced-tree).
    #[arg(long, default_value_t = 2)]
    arity: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Reweight for unique shortest paths before writing.
    #[arg(long)]
    usp: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Tree,
    Treewidth,
    Skeleton,
    Lp,
    Lp3,
}

impl MethodArg {
    fn name(self) -> &'static str {
        match self {
            MethodArg::Tree => "tree",
            MethodArg::Treewidth => "treewidth",
            MethodArg::Skeleton => "skeleton",
            MethodArg::Lp => "lp",
            MethodArg::Lp3 => "lp3",
        }
    }
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum)]
    method: MethodArg,
    /// Hopbound (tree, treewidth, lp). Skeleton and lp3 fix h = 3.
    #[arg(long, default_value_t = 3)]
    h: u32,
    /// Linear-size variant at hopbound 2(alpha(n)+1) (tree, treewidth).
    #[arg(long)]
    linear: bool,
    /// Tree decomposition file (treewidth); min-fill heuristic otherwise.
    #[arg(long)]
    td: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Total size bound (lp3).
    #[arg(long)]
    size_bound: Option<u64>,
    /// Short-range cutoff override (skeleton).
    #[arg(long)]
    dprime: Option<u64>,
    /// Level growth override as `num/den` (skeleton).
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    max_levels: Option<u32>,
    /// Write the hopset even if validation fails.
    #[arg(long = "unsafe")]
    unsafe_write: bool,
    #[arg(long)]
    out: PathBuf,
    /// Oracle sidecar path (default: <out>.oracle for 3-hop methods).
    #[arg(long)]
    oracle_out: Option<PathBuf>,
    /// Export the LP model in LP file format (lp, lp3).
    #[arg(long)]
    lp_out: Option<PathBuf>,
    /// Import an externally solved LP solution instead of solving.
    #[arg(long)]
    solution: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    hopset: PathBuf,
    #[arg(long)]
    oracle: Option<PathBuf>,
    /// Validate at this hopbound instead of the stored one.
    #[arg(long)]
    h: Option<u32>,
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    hopset: Option<PathBuf>,
    #[arg(long)]
    oracle: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    /// Bench JSONL file for growth tables.
    #[arg(long)]
    bench: Option<PathBuf>,
    /// Normalize by t * n * lambda_h(n) with this width.
    #[arg(long)]
    t: Option<u32>,
    /// One-off graph/hopset statistics.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    hopset: Option<PathBuf>,
    /// Also measure the skeleton profile at this alpha (`num/den`).
    #[arg(long)]
    alpha: Option<String>,
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("hopctl: {msg}");
    ExitCode::from(code)
}

fn parse_ratio(s: &str) -> Result<Ratio, String> {
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a, b),
        None => (s, "1"),
    };
    let n: u128 = num.trim().parse().map_err(|_| format!("bad ratio `{s}`"))?;
    let d: u128 = den.trim().parse().map_err(|_| format!("bad ratio `{s}`"))?;
    if d == 0 || n == 0 {
        return Err(format!("ratio `{s}` must be positive"));
    }
    Ok(Ratio::new(n, d))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    match cli.cmd {
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Build(a) => cmd_build(a),
        Cmd::Validate(a) => cmd_validate(a),
        Cmd::Query(a) => cmd_query(a),
        Cmd::Bench(a) => bench::cmd_bench(a),
        Cmd::Stats(a) => cmd_stats(a),
    }
}

fn graph_kind(a: &GenArgs) -> Result<GraphKind, String> {
    Ok(match a.kind {
        KindArg::Path => GraphKind::Path { n: a.n },
        KindArg::Star => GraphKind::Star { n: a.n },
        KindArg::BalancedTree => GraphKind::BalancedTree {
            n: a.n,
            arity: a.arity,
        },
        KindArg::Grid => GraphKind::Grid {
            rows: a.rows,
            cols: a.cols,
        },
        KindArg::Gnm => GraphKind::Gnm { n: a.n, m: a.m },
        KindArg::Caterpillar => GraphKind::Caterpillar { n: a.n },
    })
}

fn cmd_gen(a: GenArgs) -> ExitCode {
    let kind = match graph_kind(&a) {
        Ok(k) => k,
        Err(e) => return fail(3, e),
    };
    let g = match generate(kind, a.seed) {
        Ok(g) => g,
        Err(e) => return fail(3, e),
    };
    let g = if a.usp {
        match usp::make_usp(&g, a.seed) {
            Ok((g, _)) => g,
            Err(e) => return fail(3, e),
        }
    } else {
        g
    };
    match io::write_graph(&g, &a.out) {
        Ok(()) => {
            println!("wrote {} (n={} m={})", a.out.display(), g.n(), g.m());
            ExitCode::SUCCESS
        }
        Err(e) => fail(3, e),
    }
}

/// Loads a graph and attaches a USP certificate, verifying uniqueness.
fn load_usp_graph(path: &Path) -> Result<WeightedGraph, (u8, String)> {
    let g = io::read_graph(path).map_err(|e| (3u8, e.to_string()))?;
    usp::verify_usp(&g).map_err(|_| {
        (
            3u8,
            "graph does not have unique shortest paths; regenerate with `gen --usp`".to_string(),
        )
    })
}

struct Built {
    hopset: Hopset,
    oracle: Option<ThreeHopOracle>,
    note: String,
}

/// Method/parameter compatibility, checked before any work starts.
fn check_config(a: &BuildArgs) -> Result<(), String> {
    let m = a.method;
    if a.size_bound.is_some() && m != MethodArg::Lp3 {
        return Err("--size-bound applies to lp3 only".into());
    }
    if (a.dprime.is_some() || a.epsilon.is_some() || a.max_levels.is_some())
        && m != MethodArg::Skeleton
    {
        return Err("--dprime/--epsilon/--max-levels apply to skeleton only".into());
    }
    if a.td.is_some() && m != MethodArg::Treewidth {
        return Err("--td applies to treewidth only".into());
    }
    if a.linear && !matches!(m, MethodArg::Tree | MethodArg::Treewidth) {
        return Err("--linear applies to tree and treewidth only".into());
    }
    if (a.lp_out.is_some() || a.solution.is_some()) && !matches!(m, MethodArg::Lp | MethodArg::Lp3)
    {
        return Err("--lp-out/--solution apply to lp and lp3 only".into());
    }
    if matches!(m, MethodArg::Skeleton | MethodArg::Lp3) && a.h != 3 {
        eprintln!(
            "note: {} fixes the hopbound at 3; --h {} ignored",
            m.name(),
            a.h
        );
    }
    Ok(())
}

fn run_method(a: &BuildArgs, g: &WeightedGraph) -> Result<Built, (u8, String)> {
    match a.method {
        MethodArg::Tree => {
            if a.linear {
                let (hopset, hb) = tree::linear_tree_hopset(g).map_err(|e| (3, e.to_string()))?;
                Ok(Built {
                    hopset,
                    oracle: None,
                    note: format!("linear variant, hopbound {hb}"),
                })
            } else {
                let hopset = tree::tree_hopset(g, a.h).map_err(|e| (3, e.to_string()))?;
                Ok(Built {
                    hopset,
                    oracle: None,
                    note: String::new(),
                })
            }
        }
        MethodArg::Treewidth => {
            let td = match &a.td {
                Some(p) => io::read_td(p).map_err(|e| (3, e.to_string()))?,
                None => treewidth::heuristic_td(g),
            };
            let std = treewidth::normalize_td(g, &td).map_err(|e| (3, e.to_string()))?;
            if a.linear {
                let (hopset, hb) =
                    treewidth::tw_linear_hopset(g, &std).map_err(|e| (3, e.to_string()))?;
                Ok(Built {
                    hopset,
                    oracle: None,
                    note: format!("linear variant, width {}, hopbound {hb}", std.width),
                })
            } else if a.h == 3 {
                let (oracle, hopset, stats) =
                    treewidth::tw_three_hop_oracle(g, &std).map_err(|e| (3, e.to_string()))?;
                Ok(Built {
                    hopset,
                    oracle: Some(oracle),
                    note: format!(
                        "width {}, bag/separator/tree-hopset = {}/{}/{}",
                        std.width, stats.bag_edges, stats.separator_edges, stats.tree_hopset_edges
                    ),
                })
            } else {
                let (hopset, stats) =
                    treewidth::tw_hopset(g, &std, a.h).map_err(|e| (3, e.to_string()))?;
                Ok(Built {
                    hopset,
                    oracle: None,
                    note: format!(
                        "width {}, bag/separator/tree-hopset = {}/{}/{}",
                        std.width, stats.bag_edges, stats.separator_edges, stats.tree_hopset_edges
                    ),
                })
            }
        }
        MethodArg::Skeleton => {
            let overrides = skeleton::SkeletonOverrides {
                dprime: a.dprime,
                epsilon: match &a.epsilon {
                    Some(s) => Some(parse_ratio(s).map_err(|e| (3, e))?),
                    None => None,
                },
                max_levels: a.max_levels,
            };
            if overrides.dprime.is_none() {
                eprintln!(
                    "note: default D' collapses to the diameter at this scale (pure short-range \
                     oracle); pass --dprime to exercise distance levels"
                );
            }
            let b = skeleton::build_skeleton_oracle(g, a.seed, &overrides)
                .map_err(|e| (4, e.to_string()))?;
            Ok(Built {
                hopset: b.hopset,
                oracle: Some(b.oracle),
                note: format!(
                    "k={}, levels={}, attempts={}",
                    b.k,
                    b.levels.len(),
                    b.attempts
                ),
            })
        }
        MethodArg::Lp => {
            let model = lp::build_lp(g, a.h).map_err(|e| (3, e.to_string()))?;
            if let Some(p) = &a.lp_out {
                lp::write_lp_file(g, &model, p).map_err(|e| (3, e.to_string()))?;
            }
            let sol = match &a.solution {
                Some(p) => lp::import_solution(g, &model, p).map_err(lp_code)?,
                None => lp::solve_lp(g, &model).map_err(lp_code)?,
            };
            let out = lp::round_solution(g, &model, &sol, a.seed).map_err(lp_code)?;
            Ok(Built {
                hopset: out.hopset,
                oracle: None,
                note: format!(
                    "COST_LP={:.4}, support={}, attempts={}",
                    sol.objective, out.support_size, out.attempts
                ),
            })
        }
        MethodArg::Lp3 => {
            let bound = a
                .size_bound
                .ok_or_else(|| (3u8, "lp3 requires --size-bound".to_string()))?;
            let model = lp::build_lp_tradeoff(g, bound).map_err(|e| (3, e.to_string()))?;
            if let Some(p) = &a.lp_out {
                lp::write_lp_file(g, &model, p).map_err(|e| (3, e.to_string()))?;
            }
            let sol = match &a.solution {
                Some(p) => lp::import_solution(g, &model, p).map_err(lp_code)?,
                None => lp::solve_lp(g, &model).map_err(lp_code)?,
            };
            let out = lp::round_tradeoff(g, &model, &sol, a.seed).map_err(lp_code)?;
            Ok(Built {
                hopset: out.hopset,
                oracle: Some(out.oracle),
                note: format!(
                    "COST_LP={:.4}, rounded={}, attempts={}",
                    sol.objective, out.rounded_size, out.attempts
                ),
            })
        }
    }
}

fn lp_code(e: hopset_core::LpError) -> (u8, String) {
    let code = match &e {
        hopset_core::LpError::Parse(_) => 3,
        _ => 4,
    };
    (code, e.to_string())
}

fn cmd_build(a: BuildArgs) -> ExitCode {
    if let Err(msg) = check_config(&a) {
        return fail(3, msg);
    }
    let needs_usp = matches!(
        a.method,
        MethodArg::Skeleton | MethodArg::Lp | MethodArg::Lp3
    );
    let g = if needs_usp {
        match load_usp_graph(&a.graph) {
            Ok(g) => g,
            Err((c, m)) => return fail(c, m),
        }
    } else {
        match io::read_graph(&a.graph) {
            Ok(g) => g,
            Err(e) => return fail(3, e),
        }
    };
    let built = match run_method(&a, &g) {
        Ok(b) => b,
        Err((c, m)) => return fail(c, m),
    };

    // Validation gate: nothing unvalidated is written without --unsafe-write.
    let hs_report = validate_hopset(&g, &built.hopset, built.hopset.hopbound());
    let oracle_report = built
        .oracle
        .as_ref()
        .map(|o| validate_oracle(&g, o, ValidationScope::Auto));
    let valid = hs_report.pass && oracle_report.as_ref().is_none_or(|r| r.pass);
    if !valid && !a.unsafe_write {
        let v = hs_report
            .violations
            .first()
            .or_else(|| oracle_report.as_ref().and_then(|r| r.violations.first()));
        return fail(
            2,
            format!(
                "validation failed{}; nothing written",
                v.map(|v| format!(
                    " (pair {},{}: got {}, want {})",
                    v.u, v.v, v.limited, v.exact
                ))
                .unwrap_or_default()
            ),
        );
    }

    if let Err(e) = io::write_hopset(&built.hopset, g.n(), &a.out) {
        return fail(3, e);
    }
    let mut sidecar = None;
    if let Some(oracle) = &built.oracle {
        let path = a.oracle_out.clone().unwrap_or_else(|| {
            let mut p = a.out.clone().into_os_string();
            p.push(".oracle");
            PathBuf::from(p)
        });
        if let Err(e) = io::write_oracle(oracle, &path) {
            return fail(3, e);
        }
        sidecar = Some(path);
    }
    println!(
        "method={} h={} |H|={} valid={}{}{}",
        a.method.name(),
        built.hopset.hopbound(),
        built.hopset.len(),
        if valid { "PASS" } else { "FAIL(unsafe)" },
        if built.note.is_empty() {
            String::new()
        } else {
            format!(" [{}]", built.note)
        },
        sidecar
            .map(|p| format!(" oracle={}", p.display()))
            .unwrap_or_default()
    );
    ExitCode::SUCCESS
}

fn cmd_validate(a: ValidateArgs) -> ExitCode {
    let g = match io::read_graph(&a.graph) {
        Ok(g) => g,
        Err(e) => return fail(3, e),
    };
    let hs = match io::read_hopset(&g, &a.hopset) {
        Ok(h) => h,
        Err(e) => return fail(3, e),
    };
    let h = a.h.unwrap_or_else(|| hs.hopbound());
    let rep = validate_hopset(&g, &hs, h);
    println!(
        "hopset: {} ({} pairs checked, |H|={}, h={})",
        if rep.pass { "PASS" } else { "FAIL" },
        rep.pairs_checked,
        hs.len(),
        h
    );
    for v in rep.violations.iter().take(4) {
        println!(
            "  violation {},{}: d^h={} d={}",
            v.u, v.v, v.limited, v.exact
        );
    }
    let mut ok = rep.pass;
    if let Some(p) = &a.oracle {
        let oracle = match io::read_oracle(&g, p) {
            Ok(o) => o,
            Err(e) => return fail(3, e),
        };
        let rep = validate_oracle(&g, &oracle, ValidationScope::Auto);
        println!(
            "oracle: {} ({} pairs checked, |H1|={}, |H2|={})",
            if rep.pass { "PASS" } else { "FAIL" },
            rep.pairs_checked,
            oracle.h1_size(),
            oracle.h2_size()
        );
        ok &= rep.pass;
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn cmd_query(a: QueryArgs) -> ExitCode {
    let g = match io::read_graph(&a.graph) {
        Ok(g) => g,
        Err(e) => return fail(3, e),
    };
    enum Engine {
        Oracle(ThreeHopOracle),
        Generic(Hopset),
    }
    let engine = if let Some(p) = &a.oracle {
        match io::read_oracle(&g, p) {
            Ok(o) => Engine::Oracle(o),
            Err(e) => return fail(3, e),
        }
    } else if let Some(p) = &a.hopset {
        match io::read_hopset(&g, p) {
            Ok(h) => Engine::Generic(h),
            Err(e) => return fail(3, e),
        }
    } else {
        return fail(3, "query needs --oracle or --hopset");
    };
    let stdin = std::io::stdin();
    for line in stdin.lock().lines() {
        let line = match line {
            Ok(l) => l,
            Err(e) => return fail(3, e),
        };
        let mut tok = line.split_whitespace();
        let (Some(u), Some(v)) = (tok.next(), tok.next()) else {
            continue;
        };
        let (Ok(u), Ok(v)) = (u.parse::<u32>(), v.parse::<u32>()) else {
            return fail(3, format!("bad query line `{line}`"));
        };
        if u == 0 || u > g.n() || v == 0 || v > g.n() {
            return fail(3, format!("query node out of range in `{line}`"));
        }
        match &engine {
            Engine::Oracle(o) => match o.query(u, v) {
                Ok(r) => println!("{} {}", r.distance, r.lookups),
                Err(e) => return fail(2, e),
            },
            Engine::Generic(hs) => {
                println!("{} -", hopset_core::generic_query(&g, hs, u, v));
            }
        }
    }
    ExitCode::SUCCESS
}

fn cmd_stats(a: StatsArgs) -> ExitCode {
    if let Some(bench_path) = &a.bench {
        return bench::growth_table(bench_path, a.t);
    }
    let Some(gpath) = &a.graph else {
        return fail(3, "stats needs --bench or --graph");
    };
    let g = match io::read_graph(gpath) {
        Ok(g) => g,
        Err(e) => return fail(3, e),
    };
    println!(
        "n={} m={} max_w={} diameter={}",
        g.n(),
        g.m(),
        g.max_weight(),
        g.diameter()
    );
    if let Some(alpha) = &a.alpha {
        let alpha = match parse_ratio(alpha) {
            Ok(r) => r,
            Err(e) => return fail(3, e),
        };
        match usp::verify_usp(&g) {
            Ok(gu) => match skeleton::skeleton_dimension(&gu, alpha) {
                Ok(p) => println!(
                    "skeleton: k={} k_alpha={} (alpha={})",
                    p.k, p.k_alpha, p.alpha
                ),
                Err(e) => return fail(3, e),
            },
            Err(_) => {
                return fail(
                    3,
                    "skeleton profile needs unique shortest paths (gen --usp)",
                )
            }
        }
    }
    if let Some(hpath) = &a.hopset {
        let hs = match io::read_hopset(&g, hpath) {
            Ok(h) => h,
            Err(e) => return fail(3, e),
        };
        let h = hs.hopbound();
        let lam = hopset_core::ackermann::lambda(h as u64, g.n() as u64).max(1);
        let norm = g.n() as f64 * lam as f64;
        let by_t = a.t.map(|t| hs.len() as f64 / (norm * (t as f64 + 1.0)));
        println!(
            "|H|={} h={} lambda_h(n)={} |H|/(n*lambda)={:.4}{}",
            hs.len(),
            h,
            lam,
            hs.len() as f64 / norm,
            by_t.map(|v| format!(" |H|/(t+1)n*lambda={v:.4}"))
                .unwrap_or_default()
        );
    }
    ExitCode::SUCCESS
}
