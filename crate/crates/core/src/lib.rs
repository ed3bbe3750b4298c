
pub mod arith;
pub mod cm;
pub mod config;
pub mod error;
pub mod hypergeom;
pub mod poly;
pub mod polymod;
pub mod quadratic;
pub mod quaternion;
pub mod reduction;
pub mod search;
mod serde_util;
pub mod table;

pub use error::{Error, Result};
