pub mod datasets;
pub mod error;
pub mod harness;
pub mod hbasis;
pub mod hpfit;
pub mod net;
pub mod oracle;
pub mod seeds;
pub mod stability;
pub mod wavelets;

pub use error::{Error, Result};
