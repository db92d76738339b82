//! Rate-region evaluators: bound formulas at a fixed auxiliary joint, seeded
//! searches over auxiliaries, and the specialized capacity regions.

mod bounds;
mod capacity;
mod hull;
mod info;
mod model;
mod search;

pub use bounds::{
    eval_inner, eval_outer_cor, eval_outer_thm1, inner_constraints, outer_cor_constraints, outer_thm1_constraints,
    thm1_factorization_defect, Constraints, InnerEval, SideCondition, INNER_AUX, OUTER_COR_AUX, OUTER_THM1_AUX,
};
pub use capacity::{
    capacity_degraded, capacity_deterministic, capacity_less_noisy, capacity_product, capacity_semidet,
    degraded_constraints, deterministic_constraints, eval_product, less_noisy_constraints, less_noisy_premises,
    product_constraints, product_premises, semidet_constraints, GRID_POINT_CAP,
};
pub use hull::{hausdorff, sweep_lambdas, RatePoint, RateRegion};
pub use model::{AuxSpec, FactorModel, ModelShape, VarSpec, AUX_NAMES};
pub use search::{search_region, search_region_outcome, Bound, SearchOutcome, DEFAULT_BUDGET};
