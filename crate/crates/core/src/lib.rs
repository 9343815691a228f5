pub mod cli;
pub mod doc;
pub mod dynamics;
pub mod error;
pub mod fpmod;
pub mod oracle;
pub mod ring;
pub mod scalars;
pub mod shiftmod;

pub use error::{Error, Result};
pub use scalars::{LengthValue, Rational};
