pub mod abgroup;
pub mod arith;
pub mod equations;
pub mod error;
pub mod oracle;
pub mod phik;
pub mod phiproduct;
pub mod report;
pub mod units;
pub mod verify;

pub use abgroup::CyclicDecomposition;
pub use error::{Error, Result};
pub use units::RingSpec;
