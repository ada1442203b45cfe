pub mod analyzer;
pub mod display;
pub mod emit;
pub mod error;
pub mod learn;
pub mod planner;
pub mod result;
pub mod store;
pub mod syntax;
pub mod table;
pub mod wrangler;

pub use error::{MqlError, Result};
