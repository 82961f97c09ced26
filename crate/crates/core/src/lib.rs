//! Composed S-metric spaces.
//!
//! A composed S-metric on a set `A` is a function `C_S : A³ → [0, ∞)` that
//! vanishes exactly on constant triples and satisfies
//!
//! ```text
//! C_S(q, h, w) <= α(C_S(q, q, u)) + α(C_S(h, h, u)) + α(C_S(w, w, u))
//! ```
//!
//! for a non-constant composing function `α`. This crate provides
//!
//! * [`spaces`]: domains, composing functions, triple metrics, self-maps and
//!   the built-in spaces;
//! * [`audit`]: seeded, replayable falsifiers for the axioms and for the
//!   hypotheses of the Banach-type fixed-point theorem;
//! * [`fixed_point`]: Picard iteration with orbit diagnostics, contraction
//!   estimates and the generalized (Kannan, Bianchini) contraction checks;
//! * [`poly`]: the polynomial equation solved as a fixed point and checked
//!   against a bisection oracle.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod audit;
pub mod error;
pub mod expr;
pub mod fixed_point;
pub mod poly;
pub mod sampling;
pub mod spaces;
pub mod spec;

pub use audit::{SeriesReport, TailVariant, Verdict};
pub use error::{CsError, Result};
pub use fixed_point::{ContractionEstimate, MfFunction, Orbit, SolveResult};
pub use poly::{PolyProblem, Thm41Options, Thm41Report};
pub use sampling::{SampleConfig, Strategy};
pub use spaces::{
    make_builtin_space, AlphaFunction, ComposedSpace, PointDomain, SelfMap, TripleMetric,
};
