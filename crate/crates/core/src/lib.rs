//! Finite soft sheaf representations of algebras and the frames of
//! commuting congruences that classify them.

pub mod corpus;
pub mod dlat;
pub mod dot;
pub mod error;
pub mod format;
pub mod mv;
pub mod oracle;
pub mod par;
pub mod perm;
pub mod poset;
pub mod sheafrep;
pub mod subset;
pub mod suite;
pub mod ualg;

pub use error::{Error, Result};
pub use subset::Subset;
