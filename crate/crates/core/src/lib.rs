// SPDX-License-Identifier: Apache-2.0

//! Simply generated random trees: weight sequences, exact partition functions,
//! samplers for conditioned trees and their local limits, and Monte Carlo
//! convergence experiments.

pub mod exact;
pub mod lab;
pub mod par;
pub mod rng;
pub mod samplers;
pub mod tree;
pub mod weights;
