//! Strands algebras of arc diagrams, their differential bimodules `E_I`, and
//! the decategorified action of `E_I` on exterior algebras of relative
//! homology, checked over `F₂`.

pub mod arc_diagram;
pub mod corpus;
pub mod decat;
pub mod e_bimodule;
pub mod error;
pub mod gf2;
pub mod gluing;
pub mod nilcoxeter;
pub mod report;
pub mod strands_algebra;
pub mod suite;
pub mod surface;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/gf2.md")]
    mod gf2 {}
    #[doc = include_str!("../../../book/src/arc-diagrams.md")]
    mod arc_diagrams {}
    #[doc = include_str!("../../../book/src/strands.md")]
    mod strands {}
    #[doc = include_str!("../../../book/src/nilcoxeter.md")]
    mod nilcoxeter {}
    #[doc = include_str!("../../../book/src/bimodule.md")]
    mod bimodule {}
    #[doc = include_str!("../../../book/src/decategorification.md")]
    mod decategorification {}
    #[doc = include_str!("../../../book/src/gluing.md")]
    mod gluing {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
