pub mod hydro;
pub mod roll;
