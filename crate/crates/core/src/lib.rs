//! Computational toolkit for unit-monogenised cubic fields.
//!
//! The crate covers the whole pipeline from integer cubic polynomials to
//! class group statistics:
//!
//! * [`exactmath`]: arbitrary precision polynomial, matrix and lattice kernels.
//! * [`cubicforms`]: monic cubics, binary cubic forms, maximality and reduction.
//! * [`numberfield`]: the cubic field `Q[x]/(f)` with its monogenic maximal order.
//! * [`classgroup`]: class groups, regulators and analytic certification.
//! * [`families`]: the `+B^2_{1,1}` and `F_1` families with their heights.
//! * [`moments`]: exact convex-hull feasibility for `|Cl[2]|` moment vectors.
//! * [`experiments`]: family statistics and audits.
//! * [`cli`]: the batch command line front end, cache and reference tables.

pub mod classgroup;
pub mod cli;
pub mod cubicforms;
pub mod error;
pub mod exactmath;
pub mod experiments;
pub mod families;
pub mod moments;
pub mod numberfield;

pub use error::{Error, Result};
