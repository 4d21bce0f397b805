pub mod cli;
pub mod qfield;
pub mod repcalc;
pub mod spectra;
pub mod stability;
pub mod wbk;
