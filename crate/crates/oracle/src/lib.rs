//! Extended-precision reference implementation used to validate
//! `laguerre-difmat`.
//!
//! Everything here runs in double-word arithmetic (about 31 significant
//! digits) and shares no code with the library it checks: roots are isolated
//! by Sturm bisection and polished by Newton's method on the difference
//! recurrence, and matrix diagonals are formed from their defining sums.

pub mod cache;
pub mod difmat;
pub mod dw;
pub mod roots;

pub use difmat::{
    oracle_difmat, oracle_first_order, oracle_nodes, oracle_second_order, Family, OracleMatrix, OracleNodes,
};
pub use dw::DoubleWord;
pub use roots::{oracle_roots, OracleError, OracleRoots};

/// Environment variable naming the oracle cache directory.
pub const CACHE_ENV: &str = "LAGUERRE_ORACLE_CACHE";
