pub mod error;
pub mod linalg;

pub use error::{Error, Result};
pub mod complexes;
pub mod dold_kan;
pub mod graded;
pub mod dalg;
pub mod cli;
