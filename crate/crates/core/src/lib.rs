pub mod activation;
pub mod bigru;
pub mod dbn;
pub mod error;
mod flagged;
pub mod fusion;
mod linalg;
pub mod metrics;
pub mod objective;
pub mod pipeline;
pub mod preprocess;
pub mod sujfo;

pub use error::{Error, Result};
pub use flagged::Flagged;
pub use linalg::Mat;
