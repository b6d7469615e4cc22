//! Constructive objects of sharp weighted-inequality theory on finite dyadic
//! grids: Young functions and Luxemburg norms, exact dyadic (Orlicz) maximal
//! operators, Calderón–Zygmund decompositions, sparse families and sparse
//! operators, weight characteristics, the Rubio de Francia iteration, and
//! verifiers that compare both sides of the classical estimates.

pub mod dyadic;
pub mod error;
pub mod maximal;
pub mod norms;
pub mod orlicz;
pub mod rdf;
pub mod sparse;
pub mod verify;
pub mod weights;

pub use dyadic::{Cube, DyadicGrid, GridFunction};
pub use error::{Error, Result};
pub use orlicz::{LuxemburgResult, YoungFunction};
