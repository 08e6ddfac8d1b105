//! Benchmark harness: generate, build, validate, sample queries, report.
//!
//! Reports are line-oriented key=value, one line per run, with an optional
//! JSONL emission for machine diffing.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use hopset_core::ackermann::lambda;
use hopset_core::generate::{generate, GraphKind};
use hopset_core::hopset::validate_hopset;
use hopset_core::lp;
use hopset_core::oracle::{validate_oracle, ThreeHopOracle, ValidationScope};
use hopset_core::skeleton;
use hopset_core::tree;
use hopset_core::treewidth;
use hopset_core::usp::make_usp;
use hopset_core::{Part, WeightedGraph};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchMethod {
    Tree,
    TreeLinear,
    Treewidth,
    Skeleton,
    Lp,
    Lp3,
}

impl BenchMethod {
    fn name(self) -> &'static str {
        match self {
            BenchMethod::Tree => "tree",
            BenchMethod::TreeLinear => "tree-linear",
            BenchMethod::Treewidth => "treewidth",
            BenchMethod::Skeleton => "skeleton",
            BenchMethod::Lp => "lp",
            BenchMethod::Lp3 => "lp3",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchKind {
    Path,
    Caterpillar,
    Grid4,
    Gnm,
}

#[derive(Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    method: BenchMethod,
    /// Instance family; grid4 builds 4 x (n/4) grids, gnm uses m = 2n.
    #[arg(long, value_enum, default_value = "path")]
    kind: BenchKind,
    /// Comma-separated node counts.
    #[arg(long, value_delimiter = ',')]
    n: Vec<u32>,
    #[arg(long, default_value_t = 3)]
    h: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Query sample size (exhaustive below 300 nodes).
    #[arg(long, default_value_t = 10_000)]
    sample: u64,
    /// Append JSONL records to this file.
    #[arg(long)]
    json: Option<PathBuf>,
    /// lp3 size bound; defaults to 2n.
    #[arg(long)]
    size_bound: Option<u64>,
    #[arg(long)]
    dprime: Option<u64>,
}

#[derive(Serialize, Deserialize)]
pub struct BenchReport {
    pub n: u32,
    pub m: usize,
    pub method: String,
    pub h: u32,
    pub hopset_size: usize,
    pub h1: usize,
    pub h2: usize,
    /// N1 out-degree histogram (degree -> node count), oracle methods only.
    pub deg_hist: Vec<(usize, usize)>,
    pub avg_query_cost: Option<f64>,
    pub probe_mean: Option<f64>,
    pub build_ms: u128,
    pub validate_ms: u128,
    pub validation: String,
    pub seed: u64,
}

impl BenchReport {
    fn line(&self) -> String {
        let hist = self
            .deg_hist
            .iter()
            .map(|(d, c)| format!("{d}:{c}"))
            .collect::<Vec<_>>()
            .join(";");
        format!(
            "n={} m={} method={} h={} H={} H1={} H2={} avg_cost={} probe_mean={} build_ms={} validate_ms={} valid={} seed={} deg_hist={}",
            self.n,
            self.m,
            self.method,
            self.h,
            self.hopset_size,
            self.h1,
            self.h2,
            self.avg_query_cost.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into()),
            self.probe_mean.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into()),
            self.build_ms,
            self.validate_ms,
            self.validation,
            self.seed,
            hist
        )
    }
}

fn instance(kind: BenchKind, n: u32, seed: u64) -> Result<WeightedGraph, String> {
    let k = match kind {
        BenchKind::Path => GraphKind::Path { n },
        BenchKind::Caterpillar => GraphKind::Caterpillar { n },
        BenchKind::Grid4 => GraphKind::Grid {
            rows: 4,
            cols: n.div_ceil(4).max(1),
        },
        BenchKind::Gnm => GraphKind::Gnm { n, m: 2 * n },
    };
    generate(k, seed).map_err(|e| e.to_string())
}

/// Mean probe count over sampled (or exhaustive) queries.
pub fn probe_mean(oracle: &ThreeHopOracle, n: u32, sample: u64, seed: u64) -> f64 {
    use rand::{Rng, SeedableRng};
    let mut total: u128 = 0;
    let mut count: u128 = 0;
    if n < 300 {
        for u in 1..=n {
            for v in 1..=n {
                total += oracle.query(u, v).map(|r| r.lookups as u128).unwrap_or(0);
                count += 1;
            }
        }
    } else {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..sample {
            let u = rng.random_range(1..=n);
            let v = rng.random_range(1..=n);
            total += oracle.query(u, v).map(|r| r.lookups as u128).unwrap_or(0);
            count += 1;
        }
    }
    total as f64 / count as f64
}

fn deg_hist(oracle: &ThreeHopOracle) -> Vec<(usize, usize)> {
    let mut hist = std::collections::BTreeMap::new();
    for s in oracle.n1_sizes() {
        *hist.entry(s).or_insert(0usize) += 1;
    }
    hist.into_iter().collect()
}

pub fn cmd_bench(a: BenchArgs) -> ExitCode {
    if a.n.is_empty() {
        eprintln!("hopctl: bench needs --n");
        return ExitCode::from(3);
    }
    let mut json_lines = Vec::new();
    for &n in &a.n {
        let g = match instance(a.kind, n, a.seed) {
            Ok(g) => g,
            Err(e) => {
                eprintln!("hopctl: {e}");
                return ExitCode::from(3);
            }
        };
        let needs_usp = matches!(
            a.method,
            BenchMethod::Skeleton | BenchMethod::Lp | BenchMethod::Lp3
        );
        let g = if needs_usp {
            match make_usp(&g, a.seed) {
                Ok((g, _)) => g,
                Err(e) => {
                    eprintln!("hopctl: {e}");
                    return ExitCode::from(3);
                }
            }
        } else {
            g
        };

        let t0 = Instant::now();
        let built: Result<(hopset_core::Hopset, Option<ThreeHopOracle>), String> = match a.method {
            BenchMethod::Tree => tree::tree_hopset(&g, a.h)
                .map(|h| (h, None))
                .map_err(|e| e.to_string()),
            BenchMethod::TreeLinear => tree::linear_tree_hopset(&g)
                .map(|(h, _)| (h, None))
                .map_err(|e| e.to_string()),
            BenchMethod::Treewidth => {
                let td = treewidth::heuristic_td(&g);
                treewidth::normalize_td(&g, &td)
                    .map_err(|e| e.to_string())
                    .and_then(|std| {
                        if a.h == 3 {
                            treewidth::tw_three_hop_oracle(&g, &std)
                                .map(|(o, h, _)| (h, Some(o)))
                                .map_err(|e| e.to_string())
                        } else {
                            treewidth::tw_hopset(&g, &std, a.h)
                                .map(|(h, _)| (h, None))
                                .map_err(|e| e.to_string())
                        }
                    })
            }
            BenchMethod::Skeleton => {
                let overrides = skeleton::SkeletonOverrides {
                    dprime: a.dprime,
                    ..Default::default()
                };
                skeleton::build_skeleton_oracle(&g, a.seed, &overrides)
                    .map(|b| (b.hopset, Some(b.oracle)))
                    .map_err(|e| e.to_string())
            }
            BenchMethod::Lp => lp::build_lp(&g, a.h)
                .map_err(|e| e.to_string())
                .and_then(|m| {
                    let sol = lp::solve_lp(&g, &m).map_err(|e| e.to_string())?;
                    lp::round_solution(&g, &m, &sol, a.seed).map_err(|e| e.to_string())
                })
                .map(|o| (o.hopset, None)),
            BenchMethod::Lp3 => {
                let bound = a.size_bound.unwrap_or(2 * n as u64);
                lp::build_lp_tradeoff(&g, bound)
                    .map_err(|e| e.to_string())
                    .and_then(|m| {
                        let sol = lp::solve_lp(&g, &m).map_err(|e| e.to_string())?;
                        lp::round_tradeoff(&g, &m, &sol, a.seed).map_err(|e| e.to_string())
                    })
                    .map(|o| (o.hopset, Some(o.oracle)))
            }
        };
        let (hopset, oracle) = match built {
            Ok(b) => b,
            Err(e) => {
                eprintln!("hopctl: n={n}: {e}");
                return ExitCode::from(4);
            }
        };
        let build_ms = t0.elapsed().as_millis();

        let t1 = Instant::now();
        let mut valid = validate_hopset(&g, &hopset, hopset.hopbound()).pass;
        if let Some(o) = &oracle {
            valid &= validate_oracle(&g, o, ValidationScope::Auto).pass;
        }
        let validate_ms = t1.elapsed().as_millis();

        let report = BenchReport {
            n,
            m: g.m(),
            method: a.method.name().into(),
            h: hopset.hopbound(),
            hopset_size: hopset.len(),
            h1: oracle
                .as_ref()
                .map(|o| o.h1_size())
                .unwrap_or_else(|| hopset.count_part(Part::FirstLast)),
            h2: oracle
                .as_ref()
                .map(|o| o.h2_size())
                .unwrap_or_else(|| hopset.count_part(Part::Middle)),
            deg_hist: oracle.as_ref().map(deg_hist).unwrap_or_default(),
            avg_query_cost: oracle.as_ref().map(|o| o.average_query_cost().to_f64()),
            probe_mean: oracle
                .as_ref()
                .map(|o| probe_mean(o, g.n(), a.sample, a.seed)),
            build_ms,
            validate_ms,
            validation: if valid { "PASS".into() } else { "FAIL".into() },
            seed: a.seed,
        };
        println!("{}", report.line());
        if a.json.is_some() {
            json_lines.push(serde_json::to_string(&report).expect("report serializes"));
        }
        if !valid {
            return ExitCode::from(2);
        }
    }
    if let Some(path) = &a.json {
        let mut text = json_lines.join("\n");
        text.push('\n');
        if let Err(e) = std::fs::write(path, text) {
            eprintln!("hopctl: {e}");
            return ExitCode::from(3);
        }
    }
    ExitCode::SUCCESS
}

/// Growth table from a bench JSONL file: |H| normalized by n * lambda_h(n)
/// (or (t+1) * n * lambda_h(n) with --t).
pub fn growth_table(path: &Path, t: Option<u32>) -> ExitCode {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("hopctl: {e}");
            return ExitCode::from(3);
        }
    };
    let mut rows: Vec<BenchReport> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<BenchReport>(line) {
            Ok(r) => rows.push(r),
            Err(e) => {
                eprintln!("hopctl: line {}: {e}", i + 1);
                return ExitCode::from(3);
            }
        }
    }
    rows.sort_by_key(|a| (a.method.clone(), a.h, a.n));
    let tf = t.map(|t| (t + 1) as f64).unwrap_or(1.0);
    println!("method        h   n        |H|        |H|/norm");
    for r in &rows {
        let lam = lambda(r.h as u64, r.n as u64).max(1) as f64;
        let norm = r.n as f64 * lam * tf;
        println!(
            "{:<12} {:>2} {:>7} {:>10} {:>11.4}",
            r.method,
            r.h,
            r.n,
            r.hopset_size,
            r.hopset_size as f64 / norm
        );
    }
    ExitCode::SUCCESS
}
