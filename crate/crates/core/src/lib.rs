//! Inhomogeneous second-order linear dynamic equations on time scales.
//!
//! `y^ΔΔ + p y^Δ + q y = r` is solved on finite grids (`Z`, `hZ`, `h^Z`,
//! explicit points, or a uniform mesh standing in for `R`). Particular
//! solutions come from reduction of order, which needs a single homogeneous
//! solution, and are cross-checked against variation of parameters. The
//! [`bounds`] module checks the exponential growth bound that yields
//! uniqueness of the initial value problem forward of `t0`.
//!
//! ```
//! use dyneq::prelude::*;
//!
//! let ts = make_timescale(Family::Integers { a: 0, b: 10 }).unwrap();
//! let spec = ProblemSpec::new(
//!     GridFn::zeros(&ts),
//!     GridFn::zeros(&ts),
//!     GridFn::constant(&ts, 1.0).unwrap(),
//!     Initial { t0_idx: 0, value: 0.0, delta: 0.0 },
//!     0,
//! )
//! .unwrap();
//! let (y1, y2) = fundamental_pair(&spec).unwrap();
//! let yd = reduction_order_particular(&spec, &y1, 0).unwrap();
//! let sol = assemble_general(&spec, &y1, &y2, &yd).unwrap();
//! assert_eq!(sol.y.get(10), 45.0);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod config;
pub mod error;
pub mod particular;
pub mod solver;
pub mod table;
pub mod timescale;
pub mod tol;
pub mod zspec;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::bounds::{
        gronwall_check, growth_bound_check, nonmultiplicity_check, sol_norm2, BoundMode, BoundReport,
    };
    pub use crate::error::{Error, Result};
    pub use crate::particular::{
        assemble_general, convert_sigma_form, reduction_order_particular, roo_second_solution, sigma_form_forcing,
        sigma_residual, variation_particular, SolutionBundle,
    };
    pub use crate::solver::{fundamental_pair, residual, step_ivp, wronskian, Initial, ProblemSpec};
    pub use crate::timescale::{
        check_regressive, circle_plus, cumulative_integral, delta_derivative, delta_integral, exp_delta,
        make_timescale, ominus, ominus_fn, Family, GridFn, Mode, RegressiveFn, TimeScale,
    };
}
