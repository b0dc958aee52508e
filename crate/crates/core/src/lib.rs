//! Rotationally symmetric homothetic solitons of inverse mean curvature flow.
//!
//! The profile curve `r(y)` of a soliton with speed parameter `lambda` is
//! computed from the singular start on the axis, through the slope blow-up,
//! into the decaying tail, and checked against its qualitative properties.

// `!(x > 0.0)` is used deliberately so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod integrate;
pub mod model;
pub mod solver;
pub mod verify;
