//! NSGA-II over masked objective vectors, with the within-front criterion
//! (crowding distance, learned utility or true utility) supplied by the caller.

mod engine;
mod sort;
pub mod variation;

pub use engine::{EvalContext, Nsga2, Population, Ranking, SecondaryCriterion};
pub use sort::{crowding_distance, fast_nondominated_sort, nondominated_fronts};
pub use variation::VariationConfig;
