//! Library side of the `qfed` command-line tool: configuration parsing,
//! grid sweeps and table encoding.

pub mod config;
pub mod sweep;
pub mod table;
