//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (run with `--nocapture` to see them on success).
//!
//! Every tolerance is pinned here, in code. Growth criteria compare size
//! ratios across instance scales; exactness criteria are integer-exact.

mod common;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hopset_core::ackermann::{inv_ackermann, lambda};
use hopset_core::generate::{generate, GraphKind};
use hopset_core::hopset::validate_hopset;
use hopset_core::lp;
use hopset_core::oracle::{validate_oracle, ValidationScope};
use hopset_core::ratio::Ratio;
use hopset_core::skeleton;
use hopset_core::tree;
use hopset_core::treewidth;
use hopset_core::usp::make_usp;
use hopset_core::{dijkstra, WeightedGraph};

fn criterion(n: u32, pass: bool, detail: &str) {
    println!(
        "criterion {n}: {}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {n} failed: {detail}");
}

fn usp(kind: GraphKind, seed: u64) -> WeightedGraph {
    let g = generate(kind, seed).expect("corpus instance");
    make_usp(&g, seed).expect("usp reweighting").0
}

fn tree_corpus() -> Vec<(&'static str, WeightedGraph)> {
    vec![
        ("path64", usp(GraphKind::Path { n: 64 }, 1)),
        ("star33", usp(GraphKind::Star { n: 33 }, 2)),
        (
            "btree40",
            usp(GraphKind::BalancedTree { n: 40, arity: 3 }, 3),
        ),
        ("caterpillar48", usp(GraphKind::Caterpillar { n: 48 }, 4)),
    ]
}

fn general_corpus() -> Vec<(&'static str, WeightedGraph)> {
    let mut all = tree_corpus();
    all.push(("grid12x12", usp(GraphKind::Grid { rows: 12, cols: 12 }, 5)));
    all.push(("grid4x16", usp(GraphKind::Grid { rows: 4, cols: 16 }, 6)));
    all.push(("gnm60", usp(GraphKind::Gnm { n: 60, m: 120 }, 7)));
    all.push(("gnm200", usp(GraphKind::Gnm { n: 200, m: 400 }, 8)));
    all
}

fn lp_corpus() -> Vec<(&'static str, WeightedGraph)> {
    vec![
        ("path12", usp(GraphKind::Path { n: 12 }, 1)),
        (
            "btree10",
            usp(GraphKind::BalancedTree { n: 10, arity: 2 }, 2),
        ),
        ("caterpillar12", usp(GraphKind::Caterpillar { n: 12 }, 3)),
        ("gnm12", usp(GraphKind::Gnm { n: 12, m: 20 }, 4)),
        ("star9", usp(GraphKind::Star { n: 9 }, 5)),
    ]
}

/// Criterion 1: every corpus graph, every construction at its hopbound,
/// full exactness validation. Integer-exact.
#[test]
fn criterion_01_universal_exactness() {
    let mut all_pass = true;
    let mut failomat = |name: &str, what: &str, pass: bool| {
        if !pass {
            all_pass = false;
            println!("  criterion 1 violation: {name} {what}");
        }
    };

    for (name, g) in tree_corpus() {
        for h in [2u32, 3, 4] {
            let hs = tree::tree_hopset(&g, h).unwrap();
            failomat(
                name,
                &format!("tree h={h}"),
                validate_hopset(&g, &hs, h).pass,
            );
        }
        let (hs, hb) = tree::linear_tree_hopset(&g).unwrap();
        failomat(name, "tree-linear", validate_hopset(&g, &hs, hb).pass);
    }

    for (name, g) in general_corpus() {
        let td = treewidth::heuristic_td(&g);
        let std = treewidth::normalize_td(&g, &td).unwrap();
        for h in [2u32, 3, 4] {
            let (hs, _) = treewidth::tw_hopset(&g, &std, h).unwrap();
            failomat(
                name,
                &format!("treewidth h={h}"),
                validate_hopset(&g, &hs, h).pass,
            );
        }
        let (oracle, hs, _) = treewidth::tw_three_hop_oracle(&g, &std).unwrap();
        failomat(name, "tw-oracle hopset", validate_hopset(&g, &hs, 3).pass);
        failomat(
            name,
            "tw-oracle",
            validate_oracle(&g, &oracle, ValidationScope::Auto).pass,
        );
        let (hs, hb) = treewidth::tw_linear_hopset(&g, &std).unwrap();
        failomat(name, "tw-linear", validate_hopset(&g, &hs, hb).pass);

        let b = skeleton::build_skeleton_oracle(&g, 11, &Default::default()).unwrap();
        failomat(
            name,
            "skeleton hopset",
            validate_hopset(&g, &b.hopset, 3).pass,
        );
        failomat(
            name,
            "skeleton oracle",
            validate_oracle(&g, &b.oracle, ValidationScope::Auto).pass,
        );
    }

    for (name, g) in lp_corpus() {
        for h in [2u32, 3] {
            let model = lp::build_lp(&g, h).unwrap();
            let sol = lp::solve_lp(&g, &model).unwrap();
            let out = lp::round_solution(&g, &model, &sol, 17).unwrap();
            failomat(
                name,
                &format!("lp h={h}"),
                validate_hopset(&g, &out.hopset, h).pass,
            );
        }
        let model = lp::build_lp_tradeoff(&g, 3 * g.n() as u64).unwrap();
        let sol = lp::solve_lp(&g, &model).unwrap();
        let out = lp::round_tradeoff(&g, &model, &sol, 17).unwrap();
        failomat(name, "lp3 hopset", validate_hopset(&g, &out.hopset, 3).pass);
        failomat(
            name,
            "lp3 oracle",
            validate_oracle(&g, &out.oracle, ValidationScope::Exhaustive).pass,
        );
    }

    criterion(
        1,
        all_pass,
        "all constructions validate exactly on the full corpus",
    );
}

/// Criterion 2: probe counts equal |N1(u)| * |N1(v)| on sampled queries,
/// and the exhaustive mean equals (sum |N1|)^2 / n^2 as an exact identity.
#[test]
fn criterion_02_query_model_identity() {
    let g = usp(GraphKind::Grid { rows: 4, cols: 16 }, 6);
    let td = treewidth::heuristic_td(&g);
    let std = treewidth::normalize_td(&g, &td).unwrap();
    let (oracle, _, _) = treewidth::tw_three_hop_oracle(&g, &std).unwrap();

    let sizes = oracle.n1_sizes();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut sampled_ok = true;
    for _ in 0..10_000u32 {
        let u = rng.random_range(1..=g.n());
        let v = rng.random_range(1..=g.n());
        let r = oracle.query(u, v).unwrap();
        sampled_ok &= r.lookups == sizes[(u - 1) as usize] as u64 * sizes[(v - 1) as usize] as u64;
    }

    // Exhaustive probe total vs the closed form, exactly.
    let mut total: u128 = 0;
    for u in 1..=g.n() {
        for v in 1..=g.n() {
            total += oracle.query(u, v).unwrap().lookups as u128;
        }
    }
    let sum_n1: u128 = sizes.iter().map(|&s| s as u128).sum();
    let exact = total == sum_n1 * sum_n1;
    let cost = oracle.average_query_cost();
    let exact_ratio = cost == Ratio::new(sum_n1 * sum_n1, (g.n() as u128) * (g.n() as u128));

    criterion(
        2,
        sampled_ok && exact && exact_ratio,
        &format!("10^4 sampled lookups match; exhaustive mean = (sum |N1|)^2/n^2 = {cost}"),
    );
}

/// Criterion 3: |H| / (n lambda_h(n)) on paths varies by less than a
/// factor 2 across n in {2^8, 2^10, 2^12, 2^14}, for h in {2, 3, 4}.
#[test]
fn criterion_03_tree_growth() {
    const SIZES: [u32; 4] = [1 << 8, 1 << 10, 1 << 12, 1 << 14];
    let mut detail = String::new();
    let mut pass = true;
    for h in [2u32, 3, 4] {
        let mut ratios = Vec::new();
        for n in SIZES {
            let g = generate(GraphKind::Path { n }, 0).unwrap();
            let hs = tree::tree_hopset(&g, h).unwrap();
            let lam = lambda(h as u64, n as u64) as f64;
            ratios.push(hs.len() as f64 / (n as f64 * lam));
        }
        let spread = ratios.iter().cloned().fold(f64::MIN, f64::max)
            / ratios.iter().cloned().fold(f64::MAX, f64::min);
        pass &= spread < 2.0;
        detail.push_str(&format!("h={h}: spread {spread:.3}; "));
    }
    criterion(3, pass, &detail);
}

/// Criterion 4: the linear-size construction has |H|/n varying by less
/// than a factor 2 across path sizes, and validates at 2(alpha(n)+1).
/// Validation is exhaustive up to 2^10 and over 128 seeded sources above.
#[test]
fn criterion_04_linear_size() {
    const SIZES: [u32; 4] = [1 << 8, 1 << 10, 1 << 12, 1 << 14];
    let mut ratios = Vec::new();
    let mut valid = true;
    for n in SIZES {
        let g = generate(GraphKind::Path { n }, 0).unwrap();
        let (hs, hb) = tree::linear_tree_hopset(&g).unwrap();
        assert_eq!(hb, 2 * (inv_ackermann(n as u64) as u32 + 1));
        ratios.push(hs.len() as f64 / n as f64);
        if n <= 1 << 10 {
            valid &= validate_hopset(&g, &hs, hb).pass;
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            for _ in 0..128 {
                let s = rng.random_range(1..=n);
                let exact = dijkstra(&g, s).dist;
                let lim = hopset_core::graph::limited_hop_distances(&g, &hs, s, hb);
                valid &= lim[1..] == exact[1..];
            }
        }
    }
    let spread = ratios.iter().cloned().fold(f64::MIN, f64::max)
        / ratios.iter().cloned().fold(f64::MAX, f64::min);
    criterion(
        4,
        valid && spread < 2.0,
        &format!("|H|/n = {ratios:.3?}, spread {spread:.3}, validation ok"),
    );
}

/// Criterion 5: on 4 x m grids the per-node first-hop lists stay within
/// c (t+1) lambda_3(n) for the single pinned constant c = 4.
#[test]
fn criterion_05_treewidth_degrees() {
    const C: f64 = 4.0;
    let mut detail = String::new();
    let mut pass = true;
    for cols in [16u32, 64, 256] {
        let g = usp(GraphKind::Grid { rows: 4, cols }, 9);
        let td = treewidth::heuristic_td(&g);
        let t = td.width();
        assert!(t <= 4, "min-fill width {t} on a 4-row grid");
        let std = treewidth::normalize_td(&g, &td).unwrap();
        let (oracle, _, _) = treewidth::tw_three_hop_oracle(&g, &std).unwrap();
        let max_n1 = oracle.n1_sizes().into_iter().max().unwrap() as f64;
        let bound = C * (t as f64 + 1.0) * lambda(3, g.n() as u64) as f64;
        pass &= max_n1 <= bound;
        pass &= oracle.average_query_cost().to_f64() <= bound * bound;
        detail.push_str(&format!("n={}: max|N1|={max_n1} <= {bound:.0}; ", g.n()));
    }
    criterion(5, pass, &detail);
}

fn active_level_overrides(g: &WeightedGraph, k: u32) -> skeleton::SkeletonOverrides {
    // Smallest cutoff whose window [D/4, D/2] is guaranteed to contain a
    // node on every long path: twice the maximum edge length.
    let dprime = 2 * g.max_weight();
    let mut ov = skeleton::SkeletonOverrides {
        dprime: Some(dprime),
        ..Default::default()
    };
    // With the default growth rate the second level may overshoot the
    // diameter on bench-scale graphs; flatten epsilon until two levels fit.
    let params = skeleton::compute_params(g, k, 0, &ov);
    if params.levels.len() < 2 {
        ov.epsilon = Some(Ratio::new(1, 8));
    }
    ov
}

/// Criterion 6: per level, max_u |R^(D)(u)| never exceeds the measured
/// skeleton dimension. Exact check over corpus graphs with active levels.
#[test]
fn criterion_06_r_set_bound() {
    let corpus = vec![
        ("path128", usp(GraphKind::Path { n: 128 }, 1)),
        ("grid12x12", usp(GraphKind::Grid { rows: 12, cols: 12 }, 5)),
        ("grid4x16", usp(GraphKind::Grid { rows: 4, cols: 16 }, 6)),
        ("caterpillar64", usp(GraphKind::Caterpillar { n: 64 }, 2)),
        ("gnm32", usp(GraphKind::Gnm { n: 32, m: 64 }, 3)),
    ];
    let mut pass = true;
    let mut levels_seen = 0usize;
    let mut detail = String::new();
    for (name, g) in corpus {
        let k = skeleton::skeleton_dimension(&g, Ratio::new(1, 2))
            .unwrap()
            .k;
        let ov = active_level_overrides(&g, k);
        let params = skeleton::compute_params(&g, k, 21, &ov);
        for spec in &params.levels {
            let lv = skeleton::build_level(&g, *spec, &params.rho);
            let max_r = (1..=g.n())
                .map(|u| lv.r_sets[u as usize].len())
                .max()
                .unwrap_or(0) as u32;
            pass &= max_r <= k;
            levels_seen += 1;
            if max_r > k {
                detail.push_str(&format!("{name} D={}: max|R|={max_r} > k={k}; ", spec.d));
            }
        }
    }
    criterion(
        6,
        pass && levels_seen > 0,
        &format!("max |R^(D)(u)| <= k on {levels_seen} active levels"),
    );
}

/// Criterion 7: with the cutoff overridden so at least two levels are
/// active on grid(12,12), every pair in each level's band has a witness
/// q in R(u), r in R(v) with d(u,q) + d(q,r) + d(r,v) = d(u,v).
#[test]
fn criterion_07_level_band_coverage() {
    let g = usp(GraphKind::Grid { rows: 12, cols: 12 }, 5);
    let k = skeleton::skeleton_dimension(&g, Ratio::new(1, 2))
        .unwrap()
        .k;
    let ov = active_level_overrides(&g, k);
    let params = skeleton::compute_params(&g, k, 33, &ov);
    assert!(
        params.levels.len() >= 2,
        "need at least two active levels, got {}",
        params.levels.len()
    );

    let trees: Vec<_> = (1..=g.n()).map(|u| dijkstra(&g, u)).collect();
    let dist = |a: u32, b: u32| trees[(a - 1) as usize].dist[b as usize];
    let mut pairs_checked = 0u64;
    let mut pass = true;
    for spec in &params.levels {
        let lv = skeleton::build_level(&g, *spec, &params.rho);
        for u in 1..=g.n() {
            for v in 1..=g.n() {
                let d = dist(u, v);
                if u == v || d < spec.d || d > spec.band_hi {
                    continue;
                }
                pairs_checked += 1;
                let witness = lv.r_sets[u as usize].iter().any(|&q| {
                    lv.r_sets[v as usize]
                        .iter()
                        .any(|&r| dist(u, q) + dist(q, r) + dist(r, v) == d)
                });
                if !witness {
                    pass = false;
                }
            }
        }
    }
    criterion(
        7,
        pass && pairs_checked > 0,
        &format!(
            "3-hop witness exists for all {pairs_checked} band pairs over {} levels",
            params.levels.len()
        ),
    );
}

/// Criterion 8: brute-force ILP optimum brackets the LP cost and the
/// rounded size, the path-5 anchor is exactly 2, and rounding succeeds
/// within its retry budget for 20 seeds on every instance.
#[test]
fn criterion_08_lp_bracket() {
    // Anchor: path of 5 at h = 2.
    let p5 = usp(GraphKind::Path { n: 5 }, 0);
    let anchor = common::ilp_optimum(&p5, 2, 3);
    assert_eq!(anchor, Some(2), "path-5 ILP anchor");

    let instances: Vec<(&str, WeightedGraph, u32)> = vec![
        ("path5/h2", usp(GraphKind::Path { n: 5 }, 0), 2),
        ("path7/h2", usp(GraphKind::Path { n: 7 }, 1), 2),
        ("path8/h3", usp(GraphKind::Path { n: 8 }, 2), 3),
        (
            "btree9/h2",
            usp(GraphKind::BalancedTree { n: 9, arity: 2 }, 3),
            2,
        ),
        ("gnm10/h2", usp(GraphKind::Gnm { n: 10, m: 15 }, 4), 2),
        ("gnm12/h3", usp(GraphKind::Gnm { n: 12, m: 20 }, 5), 3),
    ];
    let mut pass = true;
    let mut detail = String::new();
    for (name, g, h) in instances {
        let ilp = common::ilp_optimum(&g, h, 7).expect("optimum within cap") as f64;
        let model = lp::build_lp(&g, h).unwrap();
        let sol = lp::solve_lp(&g, &model).unwrap();
        pass &= sol.objective <= ilp + 1e-6;
        for seed in 0..20u64 {
            let out = lp::round_solution(&g, &model, &sol, seed).expect("rounding in budget");
            pass &= ilp <= out.hopset.len() as f64;
            pass &= validate_hopset(&g, &out.hopset, h).pass;
        }
        detail.push_str(&format!("{name}: LP={:.3} ILP={ilp}; ", sol.objective));
    }
    criterion(8, pass, &detail);
}

/// Criterion 9: the mean prefix-minima count of a random permutation of
/// length 1000, over 1000 permutations, lies in [ln 1000 - 2, ln 1000 + 2].
#[test]
fn criterion_09_prefix_minima_statistics() {
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    let mut total = 0usize;
    const RUNS: usize = 1000;
    for _ in 0..RUNS {
        let mut perm: Vec<u64> = (0..1000).collect();
        perm.shuffle(&mut rng);
        total += lp::prefix_minima(&perm).len();
    }
    let mean = total as f64 / RUNS as f64;
    let ln1000 = (1000.0f64).ln();
    let pass = mean >= ln1000 - 2.0 && mean <= ln1000 + 2.0;
    criterion(
        9,
        pass,
        &format!(
            "mean prefix minima {mean:.3} within [{:.3}, {:.3}]",
            ln1000 - 2.0,
            ln1000 + 2.0
        ),
    );
}

/// Criterion 10: with the size bound set to the plain-mode rounded size,
/// the tradeoff oracle validates and |H''|/S stays within the pinned
/// c ln^3 n for c = 4 across sizes.
#[test]
fn criterion_10_tradeoff_shape() {
    const C: f64 = 4.0;
    let instances: Vec<(&str, WeightedGraph)> = vec![
        ("path10", usp(GraphKind::Path { n: 10 }, 0)),
        ("path14", usp(GraphKind::Path { n: 14 }, 1)),
        ("path18", usp(GraphKind::Path { n: 18 }, 2)),
        ("path24", usp(GraphKind::Path { n: 24 }, 3)),
        ("gnm12", usp(GraphKind::Gnm { n: 12, m: 20 }, 4)),
        ("caterpillar16", usp(GraphKind::Caterpillar { n: 16 }, 5)),
    ];
    let mut pass = true;
    let mut detail = String::new();
    for (name, g) in instances {
        let plain = lp::build_lp(&g, 3).unwrap();
        let sol = lp::solve_lp(&g, &plain).unwrap();
        let out = lp::round_solution(&g, &plain, &sol, 7).unwrap();
        let s = out.hopset.len().max(1) as u64;

        let model = lp::build_lp_tradeoff(&g, s).unwrap();
        let tsol = lp::solve_lp(&g, &model).unwrap();
        let tout = lp::round_tradeoff(&g, &model, &tsol, 7).unwrap();
        pass &= validate_oracle(&g, &tout.oracle, ValidationScope::Exhaustive).pass;
        let ln3 = (g.n() as f64).ln().powi(3);
        let ratio = tout.rounded_size as f64 / s as f64;
        pass &= ratio <= C * ln3;
        detail.push_str(&format!(
            "{name}: |H''|/S = {ratio:.2} (cap {:.1}); ",
            C * ln3
        ));
    }
    criterion(10, pass, &detail);
}

/// Criterion 11: pinned inverse-Ackermann values and alpha behavior.
#[test]
fn criterion_11_ackermann_tables() {
    let lambdas =
        lambda(0, 7) == 4 && lambda(1, 16) == 4 && lambda(2, 16) == 4 && lambda(3, 65536) == 4;
    let mut alpha_ok = true;
    let mut prev = 0;
    for exp in [0u32, 1, 2, 4, 8, 16, 17, 32, 48, 63] {
        let a = inv_ackermann(1u64 << exp);
        alpha_ok &= a >= prev && a <= 4;
        prev = a;
    }
    alpha_ok &= inv_ackermann(u64::MAX) == 4;
    criterion(
        11,
        lambdas && alpha_ok,
        "lambda_0(7) = lambda_1(16) = lambda_2(16) = lambda_3(65536) = 4; alpha <= 4 and monotone",
    );
}
