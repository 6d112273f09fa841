//! CLI internals: output emission, report rendering, the validation check
//! suite, and the argument surface. The binary in `main.rs` is a thin shell
//! over [`app::run`].

pub mod app;
pub mod checks;
pub mod output;
pub mod report;
