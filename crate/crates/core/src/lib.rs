//! Dimension truncation and surrogate assembly for Lipschitz operators
//! between spaces with weighted coefficient norms.
//!
//! Inputs and outputs are coefficient vectors in Riesz bases
//! ([`basis`]); smoothness is measured by weight sequences ([`weights`]).
//! [`planner`] turns a target accuracy into truncation indices,
//! [`surrogate`] fits and assembles the component maps, and [`harness`]
//! runs rate and accuracy studies on the bundled examples ([`evi`], [`hs`]).

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod error;
pub mod evi;
pub mod harness;
pub mod hs;
pub mod numeric;
pub mod planner;
pub mod surrogate;
pub mod weights;

pub use error::{Error, Result};
