pub mod contour;
pub mod dense;
pub mod error;
pub mod forge;
pub mod harness;
pub mod moments;
pub mod solvers;
