pub mod cluster;
pub mod dataset;
pub mod error;
pub mod icon;
pub mod multi;
pub mod pipeline;
pub mod report;
pub mod rough;
pub mod trend;

pub use error::{Result, TrecError};
