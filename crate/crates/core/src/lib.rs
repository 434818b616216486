//! Hamilton-Jacobi reachability on grids and neural-operator surrogates that
//! map an initial value function to its converged infinite-horizon value.

pub mod cli;
mod clock;
pub mod data;
pub mod dynamics;
pub mod geometry;
pub mod grid;
pub mod hji;
pub mod nn;
pub mod render;
