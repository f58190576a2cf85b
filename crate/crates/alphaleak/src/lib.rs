//! File formats, verification suites and the command-line front end for
//! [`alphaleak_core`].

pub mod cli;
pub mod experiments;
pub mod io;
