#![doc = include_str!("../../../book/src/introduction.md")]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod certificates;
pub mod error;
pub mod fock;
pub mod numerics;
pub mod prolate;
pub mod spectrum;

pub use error::{Error, Result};
pub use spectrum::{Spectrum, SpectrumKind, VALIDITY_FLOOR};

/// The book's chapters, compiled as doctests so the snippets stay in sync.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/prolate.md")]
    mod prolate {}
    #[doc = include_str!("../../../book/src/fock.md")]
    mod fock {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
    #[doc = include_str!("../../../book/src/certificates.md")]
    mod certificates {}
    #[doc = include_str!("../../../book/src/gadgets.md")]
    mod gadgets {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
