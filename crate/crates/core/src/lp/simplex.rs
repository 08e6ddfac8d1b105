//! Small dense two-phase simplex for the cut-generation master problems.
//! Dantzig pricing with a Bland fallback against cycling.

const EPS: f64 = 1e-9;
/// Minimum magnitude of an eligible pivot element. Degenerate cut systems
/// pile up near-zero entries; pivoting on them explodes the tableau.
const PIVOT_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    #[allow(dead_code)]
    Eq,
}

#[derive(Debug, Clone)]
pub struct Row {
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SimplexOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
}

/// Minimizes c.x subject to the rows and x >= 0.
pub fn minimize(c: &[f64], rows: &[Row]) -> SimplexOutcome {
    let nv = c.len();
    let m = rows.len();
    if m == 0 {
        return SimplexOutcome::Optimal {
            x: vec![0.0; nv],
            objective: 0.0,
        };
    }

    // Column layout: [vars | slacks/surplus | artificials | rhs].
    let mut nslack = 0usize;
    let mut nart = 0usize;
    for r in rows {
        let flip = r.rhs < 0.0;
        let sense = effective_sense(r.sense, flip);
        match sense {
            Sense::Le => nslack += 1,
            Sense::Ge => {
                nslack += 1;
                nart += 1;
            }
            Sense::Eq => nart += 1,
        }
    }
    let cols = nv + nslack + nart + 1;
    let rhs_col = cols - 1;
    let mut t = vec![vec![0.0f64; cols]; m];
    let mut basis = vec![0usize; m];
    let mut si = nv;
    let mut ai = nv + nslack;
    for (i, r) in rows.iter().enumerate() {
        let flip = r.rhs < 0.0;
        let sgn = if flip { -1.0 } else { 1.0 };
        for &(j, v) in &r.terms {
            t[i][j] += sgn * v;
        }
        t[i][rhs_col] = sgn * r.rhs;
        match effective_sense(r.sense, flip) {
            Sense::Le => {
                t[i][si] = 1.0;
                basis[i] = si;
                si += 1;
            }
            Sense::Ge => {
                t[i][si] = -1.0;
                si += 1;
                t[i][ai] = 1.0;
                basis[i] = ai;
                ai += 1;
            }
            Sense::Eq => {
                t[i][ai] = 1.0;
                basis[i] = ai;
                ai += 1;
            }
        }
    }

    // Phase 1: minimize the artificial sum.
    if nart > 0 {
        let mut obj = vec![0.0f64; cols];
        for v in obj[nv + nslack..nv + nslack + nart].iter_mut() {
            *v = 1.0;
        }
        for i in 0..m {
            if basis[i] >= nv + nslack {
                for (v, &row) in obj.iter_mut().zip(&t[i]) {
                    *v -= row;
                }
            }
        }
        if !run(&mut t, &mut obj, &mut basis, nv + nslack + nart) {
            return SimplexOutcome::Unbounded; // cannot happen in phase 1
        }
        if -obj[rhs_col] > 1e-7 {
            return SimplexOutcome::Infeasible;
        }
        // Pivot any artificial still in the basis out onto a real column.
        for i in 0..m {
            if basis[i] >= nv + nslack {
                if let Some(j) = (0..nv + nslack).find(|&j| t[i][j].abs() > EPS) {
                    pivot(&mut t, &mut basis, i, j);
                } // else the row is all-zero and harmless
            }
        }
    }

    // Phase 2 on the original objective, artificial columns frozen.
    let limit = nv + nslack;
    let mut obj = vec![0.0f64; cols];
    obj[..nv].copy_from_slice(c);
    for i in 0..m {
        if basis[i] < limit && obj[basis[i]].abs() > 0.0 {
            let coef = obj[basis[i]];
            for (v, &row) in obj.iter_mut().zip(&t[i]) {
                *v -= coef * row;
            }
        }
    }
    if !run(&mut t, &mut obj, &mut basis, limit) {
        return SimplexOutcome::Unbounded;
    }

    let mut x = vec![0.0f64; nv];
    for i in 0..m {
        if basis[i] < nv {
            x[basis[i]] = t[i][rhs_col];
        }
    }
    let objective = c.iter().zip(&x).map(|(a, b)| a * b).sum();
    SimplexOutcome::Optimal { x, objective }
}

fn effective_sense(s: Sense, flipped: bool) -> Sense {
    if !flipped {
        return s;
    }
    match s {
        Sense::Le => Sense::Ge,
        Sense::Ge => Sense::Le,
        Sense::Eq => Sense::Eq,
    }
}

fn pivot(t: &mut [Vec<f64>], basis: &mut [usize], pr: usize, pc: usize) {
    let pv = t[pr][pc];
    for v in t[pr].iter_mut() {
        *v /= pv;
    }
    let prow = t[pr].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i != pr && row[pc].abs() > EPS {
            let f = row[pc];
            for (v, &p) in row.iter_mut().zip(&prow) {
                *v -= f * p;
            }
        }
    }
    basis[pr] = pc;
}

/// Runs simplex iterations on the tableau; columns >= `limit` never enter.
/// Returns false on unboundedness.
fn run(t: &mut [Vec<f64>], obj: &mut [f64], basis: &mut [usize], limit: usize) -> bool {
    let m = t.len();
    let rhs_col = t[0].len() - 1;
    let max_dantzig = 20 * (m + limit) + 200;
    let mut iter = 0usize;
    loop {
        iter += 1;
        let bland = iter > max_dantzig;
        let mut enter = None;
        if bland {
            enter = (0..limit).find(|&j| obj[j] < -EPS);
        } else {
            let mut best = -EPS;
            for (j, &v) in obj.iter().enumerate().take(limit) {
                if v < best {
                    best = v;
                    enter = Some(j);
                }
            }
        }
        let Some(pc) = enter else {
            return true;
        };
        // Two-pass ratio test: find the minimum ratio, then among near-ties
        // pick the numerically largest pivot (or the smallest basis index
        // under Bland's rule).
        let mut best_ratio = f64::INFINITY;
        for row in t.iter() {
            if row[pc] > PIVOT_TOL {
                best_ratio = best_ratio.min(row[rhs_col] / row[pc]);
            }
        }
        let mut pr: Option<usize> = None;
        for i in 0..m {
            if t[i][pc] > PIVOT_TOL && t[i][rhs_col] / t[i][pc] <= best_ratio + EPS {
                let better = match pr {
                    None => true,
                    Some(p) => {
                        if bland {
                            basis[i] < basis[p]
                        } else {
                            t[i][pc] > t[p][pc]
                        }
                    }
                };
                if better {
                    pr = Some(i);
                }
            }
        }
        let Some(pr) = pr else {
            return false;
        };
        let f = obj[pc];
        pivot(t, basis, pr, pc);
        for (v, &p) in obj.iter_mut().zip(&t[pr]) {
            *v -= f * p;
        }
        if iter > 200 * (m + limit) + 10_000 {
            // Defensive stop: report the current (feasible) point as
            // optimal rather than spin; callers re-verify feasibility.
            return true;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(terms: &[(usize, f64)], sense: Sense, rhs: f64) -> Row {
        Row {
            terms: terms.to_vec(),
            sense,
            rhs,
        }
    }

    #[test]
    fn simple_cover() {
        // min x0 + x1 s.t. x0 + x1 >= 1, x0 >= 0.3
        let out = minimize(
            &[1.0, 1.0],
            &[
                row(&[(0, 1.0), (1, 1.0)], Sense::Ge, 1.0),
                row(&[(0, 1.0)], Sense::Ge, 0.3),
            ],
        );
        match out {
            SimplexOutcome::Optimal { objective, .. } => assert!((objective - 1.0).abs() < 1e-7),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn detects_infeasible() {
        // x0 <= 1 and x0 >= 2
        let out = minimize(
            &[1.0],
            &[
                row(&[(0, 1.0)], Sense::Le, 1.0),
                row(&[(0, 1.0)], Sense::Ge, 2.0),
            ],
        );
        assert_eq!(out, SimplexOutcome::Infeasible);
    }

    #[test]
    fn equality_and_negative_rhs() {
        // min x0 + 2 x1 s.t. x0 - x1 = -1, x0 + x1 >= 2 -> x0 = 0.5, x1 = 1.5
        let out = minimize(
            &[1.0, 2.0],
            &[
                row(&[(0, 1.0), (1, -1.0)], Sense::Eq, -1.0),
                row(&[(0, 1.0), (1, 1.0)], Sense::Ge, 2.0),
            ],
        );
        match out {
            SimplexOutcome::Optimal { x, objective } => {
                assert!((x[0] - 0.5).abs() < 1e-7, "{x:?}");
                assert!((x[1] - 1.5).abs() < 1e-7);
                assert!((objective - 3.5).abs() < 1e-7);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fractional_vertex() {
        // min x0+x1+x2 with pairwise sums >= 1: optimum 1.5 at (0.5,0.5,0.5)
        let out = minimize(
            &[1.0, 1.0, 1.0],
            &[
                row(&[(0, 1.0), (1, 1.0)], Sense::Ge, 1.0),
                row(&[(1, 1.0), (2, 1.0)], Sense::Ge, 1.0),
                row(&[(0, 1.0), (2, 1.0)], Sense::Ge, 1.0),
            ],
        );
        match out {
            SimplexOutcome::Optimal { objective, .. } => assert!((objective - 1.5).abs() < 1e-7),
            other => panic!("{other:?}"),
        }
    }
}
