//! Tree decompositions of the overall conflict graph and the table DP that
//! decides fairness in time exponential only in `width * m`.

mod decomposition;
pub mod dp;
pub mod heuristics;
mod nice;

pub use decomposition::{parse_pace, to_pace, TreeDecomposition};
pub use dp::{enumerate_sigma, solve_treewidth_dp, PartialSchedule};
pub use heuristics::compute_tree_decomposition;
pub use nice::{to_nice, NiceKind, NiceNode, NiceTreeDecomposition};
