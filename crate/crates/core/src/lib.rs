//! Exact rational solver for semidefinite programs
//!
//! ```text
//! minimize ⟨C, X⟩  subject to  ⟨A_j, X⟩ = b_j,  X ⪰ 0
//! ```
//!
//! by a two-phase short-step interior point method. All arithmetic is over
//! [`BigRational`](num_rational::BigRational); after every step the iterate is
//! rounded coordinatewise by simultaneous Diophantine approximation, which
//! keeps encoding lengths bounded independently of the iteration count.
//!
//! The modules build on each other:
//!
//! - [`exact`]: rationals, encoding lengths, rational square-root and logarithm bounds
//! - [`linalg`]: dense rational matrices, Bareiss elimination, LDLᵀ definiteness test
//! - [`diophantine`]: best rational approximations
//! - [`model`]: instance validation and the coordinate system on the feasible slice
//! - [`barrier`]: Newton systems for the log-det barrier
//! - [`path`]: rational bounds on path parameters and rounding tolerances
//! - [`solver`]: the two phases, rounding and the iteration trace
//! - [`io`]: JSON instance and solution files
//!
//! ```
//! use ratsdp::io::parse_instance;
//! use ratsdp::solver::{solve, SolveOptions};
//!
//! let text = r#"{"n": 1, "m": 1, "C": [["1"]], "A": [[["1"]]], "b": ["1"],
//!     "X0": [["1"]], "r": "1/2", "R": "1", "epsilon": "1/10"}"#;
//! let problem = parse_instance(text).unwrap();
//! let solution = solve(&problem, &SolveOptions::default()).unwrap();
//! assert_eq!(solution.objective, ratsdp::exact::int(1));
//! ```

// error variants carry the offending rationals
#![allow(clippy::result_large_err)]

pub mod barrier;
pub mod diophantine;
pub mod exact;
pub mod io;
pub mod linalg;
pub mod model;
pub mod path;
pub mod solver;
