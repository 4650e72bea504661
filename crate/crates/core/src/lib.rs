pub mod cli;
pub mod debruijn;
pub mod digitcore;
pub mod error;
pub mod globaldyn;
pub mod lattice;
pub mod realmap;
pub mod rulespace;

pub use error::{Error, ErrorKind, Result};
