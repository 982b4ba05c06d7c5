//! Exact oracles for small instances and solution-space counting.

mod count;
mod enumerate;

pub use count::{
    balanced_occupancy, count_lower_bound_log10, count_solutions, count_solutions_exact, CountResult, LowerBound,
};
pub use enumerate::{brute_force_optimum, enumerate_feasible, FeasibleAssignments, Optimum, ENUMERATION_LIMIT};
