//! Flow-based LP machinery for minimum h-hopsets on unique-shortest-path
//! graphs: the layered-flow model, an embedded solver, randomized rounding
//! to an integral hopset, and the size/query-time tradeoff variant.

mod file;
mod model;
mod round;
mod simplex;
mod solve;

pub use file::{import_solution, write_lp_file};
pub use model::{build_lp, build_lp_tradeoff, Commodity, LpKind, LpModel, ModelSize};
pub use round::{prefix_minima, round_solution, round_tradeoff, RoundOutcome, TradeoffOutcome};
pub use solve::{solve_lp, verify_solution, LpSolution, SolveStatus};
