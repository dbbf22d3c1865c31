//! Orchestration behind the `xideform` command: acceptance suite, figure rendering,
//! zero cache and file output.

pub mod acceptance;
pub mod cache;
pub mod figure;
pub mod output;
