#[macro_use]
#[path = "../common/mod.rs"]
mod common;

mod models;
mod proof;
mod terms;
