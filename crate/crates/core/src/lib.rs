pub mod angular;
pub mod assembly;
pub mod error;
pub mod model;
pub mod nu;
pub mod oracle;
pub mod radial;
pub mod report;
pub mod specfun;

pub use error::{Error, Result};
