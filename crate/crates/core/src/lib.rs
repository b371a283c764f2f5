//! Exact Benders cut generation: alternative polyhedra, reverse polar
//! formulations, cut selection strategies and the oracles that check them.

pub mod benders;
pub mod cglp;
pub mod fixtures;
pub mod io;
pub mod lp;
pub mod model;
pub mod rational;
pub mod separation;
pub mod verify;

pub use model::{EpiPoint, Instance, MasterDomain};
pub use rational::Rational;
