//! Warped-convolution deformations of quantum operators in three dimensions.
//!
//! Deformed Hamiltonians and momenta are computed in closed form on an exact
//! symbolic algebra, gauge fields are read off from the deformed momenta, and
//! transverse spectra are computed numerically on a grid.

pub mod deform;
pub mod gauge;
pub mod models;
pub mod opalg;
pub mod spectra;
pub mod verify;
