//! Qualitative probability orders, discrete cones, and the simplicial
//! complexes arising as their initial segments.
//!
//! All arithmetic is exact. Subsets of `[n]` are bitsets ([`Subset`]),
//! comparisons between subsets are ternary vectors ([`TernaryVector`]), and
//! weights are arbitrary-precision rationals ([`Rational`]).

pub mod cancellation;
pub mod catalog;
pub mod cli;
pub mod complex;
pub mod cone;
pub mod error;
pub mod example26;
pub mod feasibility;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod order;
mod packed;
pub mod rational;
pub mod report;
pub mod subset;
pub mod ternary;
pub mod transform;
pub mod winder;

pub use cancellation::{find_cck_star_violation, find_cck_violation, reduce_transform, SearchLimits, SearchOutcome};
pub use complex::{has_shift_obstruction, is_shifted, isbell_leq, shift_closure, FaceOracle, SimpleGame, SimplicialComplex};
pub use cone::{verify_cone_axioms, DiscreteCone};
pub use error::{Error, Result};
pub use feasibility::{is_almost_representable, is_representable, is_threshold, Certificate};
pub use lp::{lp_solve, LinearProgram, LpOutcome, Relation};
pub use order::{cone_of, initial_segment, order_from_weights, terminal_segment, untie, verify_qp_axioms, QPOrder};
pub use rational::Rational;
pub use subset::Subset;
pub use ternary::{characteristic_vector, restricted_sum, TernaryVector};
pub use transform::{is_compatible, is_trading_transform, TradingTransform};
