//! Stable Laguerre pseudospectral differentiation matrices.
//!
//! Nodes and the Laguerre-function derivatives at them come from one
//! Glaser–Liu–Rokhlin sweep ([`glr::sweep_roots`]). Matrices are assembled
//! from ratios of scaled coefficients ([`difmat`]), which stay in range at
//! node counts where the product-weight construction overflows.
//!
//! ```
//! use std::sync::Arc;
//! use laguerre_difmat::collocation::{collocate, NodeFamily};
//! use laguerre_difmat::difmat::difmat;
//!
//! let (nodes, coeffs) = collocate(NodeFamily::augmented_gauss(), 300)?;
//! let d2 = difmat(&Arc::new(nodes), &coeffs, 2)?;
//! assert!(d2.matrix.all_finite());
//! # Ok::<(), laguerre_difmat::Error>(())
//! ```

pub mod collocation;
pub mod difmat;
mod dw;
pub mod error;
pub mod eval;
pub mod glr;
pub mod linalg;
pub mod solvers;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/roots.md")]
    mod roots {}
    #[doc = include_str!("../../../book/src/nodes.md")]
    mod nodes {}
    #[doc = include_str!("../../../book/src/matrices.md")]
    mod matrices {}
    #[doc = include_str!("../../../book/src/solvers.md")]
    mod solvers {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/accuracy.md")]
    mod accuracy {}
}
