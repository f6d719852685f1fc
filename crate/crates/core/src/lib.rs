pub mod bounds;
pub mod cli;
pub mod constants;
pub mod corrections;
pub mod error;
pub mod hydrogen;
pub mod nc_model;
pub mod ns_series;
pub mod operator_oracle;
pub mod specfun;

pub use error::{Error, Result};
