//! Text LP interface for routing models through an external solver.
//!
//! Export emits the full flow formulation in the standard LP file format
//! (variables `x_u_v`, `x1_u_v`, `f_s_t_u_i_v_j`, 1-indexed). Import reads
//! `<varname> <value>` lines, keeps the shortcut variables, and re-verifies
//! the solution against the model before accepting it.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{LpError, ParseError};
use crate::graph::WeightedGraph;

use super::model::{ArcCap, LpKind, LpModel};
use super::solve::{verify_solution, LpSolution, SolveStatus};

pub fn write_lp_file(g: &WeightedGraph, model: &LpModel, path: &Path) -> std::io::Result<()> {
    let mut out = String::new();
    out.push_str("Minimize\n obj:");
    let obj_prefix = if matches!(model.kind, LpKind::Tradeoff { .. }) {
        "x1"
    } else {
        "x"
    };
    if model.x_pairs.is_empty() {
        out.push_str(" 0 x_0_0");
    }
    for (i, &(u, v)) in model.x_pairs.iter().enumerate() {
        if i % 8 == 0 {
            out.push_str("\n ");
        }
        let _ = write!(out, " + {obj_prefix}_{u}_{v}");
    }
    out.push_str("\nSubject To\n");

    if let LpKind::Tradeoff { size_bound } = model.kind {
        out.push_str(" size:");
        for (i, &(u, v)) in model.x_pairs.iter().enumerate() {
            if i % 8 == 0 {
                out.push_str("\n ");
            }
            let _ = write!(out, " + x_{u}_{v}");
        }
        let _ = writeln!(out, " <= {size_bound}");
        for &(u, v) in &model.x_pairs {
            let _ = writeln!(out, " cpl_{u}_{v}: x1_{u}_{v} - x_{u}_{v} <= 0");
        }
    }

    for c in &model.commodities {
        let l = c.path.len();
        let h = model.h as usize;
        // Capacity rows for variable-backed arcs.
        for layer in 0..h {
            for a in 0..l {
                for b in a..l {
                    let (pu, pv) = (c.path[a], c.path[b]);
                    let fname = format!("f_{}_{}_{}_{}_{}_{}", c.s, c.t, pu, layer, pv, layer + 1);
                    match model.arc_capacity(g, pu, pv, layer as u32) {
                        ArcCap::Unit => {}
                        ArcCap::X(i) => {
                            let (xu, xv) = model.x_pairs[i];
                            let _ = writeln!(out, " cap_{fname}: {fname} - x_{xu}_{xv} <= 0");
                        }
                        ArcCap::X1(i) => {
                            let (xu, xv) = model.x_pairs[i];
                            let _ = writeln!(out, " cap_{fname}: {fname} - x1_{xu}_{xv} <= 0");
                        }
                    }
                }
            }
        }
        // Conservation: one unit out of s at layer 0, one into t at layer
        // h, balance everywhere else.
        for layer in 0..=h {
            for (pos, &node) in c.path.iter().enumerate() {
                let mut row = String::new();
                if layer < h {
                    for b in pos..l {
                        let _ = write!(
                            row,
                            " + f_{}_{}_{}_{}_{}_{}",
                            c.s,
                            c.t,
                            node,
                            layer,
                            c.path[b],
                            layer + 1
                        );
                    }
                }
                if layer > 0 {
                    for a in 0..=pos {
                        let _ = write!(
                            row,
                            " - f_{}_{}_{}_{}_{}_{}",
                            c.s,
                            c.t,
                            c.path[a],
                            layer - 1,
                            node,
                            layer
                        );
                    }
                }
                if row.is_empty() {
                    continue;
                }
                let rhs = if pos == 0 && layer == 0 {
                    1
                } else if pos == l - 1 && layer == h {
                    -1
                } else {
                    0
                };
                let _ = writeln!(
                    out,
                    " bal_{}_{}_{}_{}:{} = {}",
                    c.s, c.t, node, layer, row, rhs
                );
            }
        }
    }

    out.push_str("Bounds\n");
    for &(u, v) in &model.x_pairs {
        let _ = writeln!(out, " 0 <= x_{u}_{v} <= 1");
        if matches!(model.kind, LpKind::Tradeoff { .. }) {
            let _ = writeln!(out, " 0 <= x1_{u}_{v} <= 1");
        }
    }
    out.push_str("End\n");
    std::fs::write(path, out)
}

/// Reads `<varname> <value>` lines (flow variables are accepted and
/// ignored), then re-verifies the imported point against the model.
pub fn import_solution(
    g: &WeightedGraph,
    model: &LpModel,
    path: &Path,
) -> Result<LpSolution, LpError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ParseError::new(0, format!("{}: {}", path.display(), e)))?;
    let tradeoff = matches!(model.kind, LpKind::Tradeoff { .. });
    let mut x = vec![0.0f64; model.x_pairs.len()];
    let mut x1 = vec![0.0f64; if tradeoff { model.x_pairs.len() } else { 0 }];
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('c') && !line.contains('_')
        {
            continue;
        }
        let mut tok = line.split_whitespace();
        let (Some(name), Some(val)) = (tok.next(), tok.next()) else {
            return Err(ParseError::new(lineno, "expected `<varname> <value>`").into());
        };
        let value: f64 = val
            .parse()
            .map_err(|_| ParseError::new(lineno, format!("bad value for {name}")))?;
        let parts: Vec<&str> = name.split('_').collect();
        match parts.as_slice() {
            ["x", u, v] => {
                let key = parse_pair(u, v, lineno)?;
                if let Some(&idx) = model.x_index.get(&key) {
                    x[idx] = value;
                } else {
                    return Err(ParseError::new(lineno, format!("unknown variable {name}")).into());
                }
            }
            ["x1", u, v] => {
                if !tradeoff {
                    return Err(ParseError::new(lineno, "x1 variable in a plain model").into());
                }
                let key = parse_pair(u, v, lineno)?;
                if let Some(&idx) = model.x_index.get(&key) {
                    x1[idx] = value;
                } else {
                    return Err(ParseError::new(lineno, format!("unknown variable {name}")).into());
                }
            }
            ["f", ..] => {}
            _ => {
                return Err(ParseError::new(lineno, format!("unrecognized variable {name}")).into())
            }
        }
    }
    let objective = if tradeoff {
        x1.iter().sum()
    } else {
        x.iter().sum()
    };
    let sol = LpSolution {
        x,
        x1,
        objective,
        status: SolveStatus::Imported,
    };
    verify_solution(g, model, &sol)?;
    Ok(sol)
}

fn parse_pair(u: &str, v: &str, lineno: usize) -> Result<(u32, u32), LpError> {
    let a: u32 = u
        .parse()
        .map_err(|_| ParseError::new(lineno, "bad node id"))?;
    let b: u32 = v
        .parse()
        .map_err(|_| ParseError::new(lineno, "bad node id"))?;
    Ok((a.min(b), a.max(b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, GraphKind};
    use crate::lp::model::build_lp;
    use crate::lp::solve::solve_lp;
    use crate::usp::verify_usp;

    #[test]
    fn export_then_import_roundtrip() {
        let g = verify_usp(&generate(GraphKind::Path { n: 6 }, 0).unwrap()).unwrap();
        let m = build_lp(&g, 2).unwrap();
        let dir = std::env::temp_dir().join("hopset-lp-tests");
        std::fs::create_dir_all(&dir).unwrap();
        let lp_path = dir.join("model.lp");
        write_lp_file(&g, &m, &lp_path).unwrap();
        let text = std::fs::read_to_string(&lp_path).unwrap();
        assert!(text.contains("Minimize"));
        assert!(text.contains("bal_"));
        assert!(text.contains("End"));

        // Round-trip the embedded solver's answer through the text format.
        let sol = solve_lp(&g, &m).unwrap();
        let sol_path = dir.join("model.sol");
        let mut out = String::new();
        for (i, &(u, v)) in m.x_pairs.iter().enumerate() {
            out.push_str(&format!("x_{u}_{v} {}\n", sol.x[i]));
        }
        std::fs::write(&sol_path, out).unwrap();
        let imported = import_solution(&g, &m, &sol_path).unwrap();
        assert!((imported.objective - sol.objective).abs() < 1e-6);
    }

    #[test]
    fn infeasible_import_is_rejected() {
        let g = verify_usp(&generate(GraphKind::Path { n: 6 }, 0).unwrap()).unwrap();
        let m = build_lp(&g, 2).unwrap();
        let dir = std::env::temp_dir().join("hopset-lp-tests");
        std::fs::create_dir_all(&dir).unwrap();
        let sol_path = dir.join("zero.sol");
        std::fs::write(&sol_path, "").unwrap();
        // All-zero x cannot route the far commodities.
        assert!(matches!(
            import_solution(&g, &m, &sol_path),
            Err(LpError::BadSolution(_))
        ));
    }
}
