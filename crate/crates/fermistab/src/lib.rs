//! File formats, parallel sampling, sweeps and plots on top of
//! `fermistab-core`.

pub mod batch;
pub mod cli;
pub mod config;
pub mod format;
pub mod plot;
pub mod report;
pub mod run;
pub mod sample;
