//! Sound inner and outer approximations of the solution set of nonlinear
//! inequality systems, possibly with one universally quantified parameter.

pub mod bench;
pub mod boxes;
pub mod contract;
pub mod expr;
pub mod interval;
pub mod io;
pub mod parse;
pub mod scalar;
pub mod solver;

pub use boxes::{box_diff, hull, split, BoxError, BoxSet, IntervalBox, SplitPolicy};
pub use expr::{decompose, eval_natural, negate, Constraint, Expr, Problem, Quantifier, Rel};
pub use interval::Interval;
pub use parse::{parse, ParseError};
