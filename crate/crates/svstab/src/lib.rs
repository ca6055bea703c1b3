//! Spectral stability toolkit for planar hydraulic shocks and roll waves of
//! the 2d inviscid Saint-Venant equations: wave construction, Evans and
//! (periodic) Evans-Lopatinsky determinants, frequency-regime stability
//! classification, critical channel widths, finite-volume time evolution, and
//! the Brock experiment rescaling pipeline.

pub mod error;
pub mod highfreq;
pub mod io;
pub mod lowfreq;
pub mod model;
pub mod numerics;
pub mod brock;
pub mod continuation;
pub mod contour;
pub mod essential;
pub mod evans;
pub mod oblique;
pub mod profiles;
pub mod sim;
pub mod surface;

pub use error::{Error, Result};
