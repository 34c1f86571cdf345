pub mod bounds;
pub mod coxeter;
pub mod exact;
#[cfg(feature = "cli")]
pub mod cli;
pub mod gap;
pub mod group;
pub mod heat;
pub mod nilpotent;
pub mod tower;
pub mod words;
