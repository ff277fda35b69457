//! Experiment harness for the contraction library: parameter handling, the
//! named experiments and their JSON reports.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod experiments;
pub mod params;
pub mod report;
pub mod rng;
