//! Integer-programming route: kernel-membership models, an exact
//! branch-and-bound solver, LP-format export and witness decoding.

mod classic;
mod lp_format;
mod model;
mod normal;
mod solver;
mod witness;

pub use classic::{build_classic_min_model, solve_covering, DEFAULT_CLASSIC_CAP};
pub use lp_format::{export_model, parse_lp, read_lp, write_lp};
pub use model::{
    build_membership_model, build_membership_model_with_delta, decimal_string, default_delta, powers_of_two,
    random_normal_coefficients, BlockLayout, Constraint, IlpModel, ModeKind, ObjectiveMode, Sense, VarKind,
    Variable,
};
pub use normal::{normal_vector, standard_normal};
pub use solver::{solve_exact, solve_with, SolveOptions, SolveOutcome, SolveStatus};
pub use witness::{decode_witness, verify_ilp, MAX_DRAWS};
