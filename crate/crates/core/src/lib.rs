pub mod auxpoly;
pub mod error;
pub mod families;
pub mod fixed;
pub mod measure;
pub mod perturb;
pub mod poly;
pub mod rootfind;
pub mod search;
pub mod table;
pub mod verify;

pub use error::{Error, Result};
pub use measure::{measure, measure_with, quality, MeasureKind, MeasureOptions, PairClass, SeparationResult};
pub use poly::{canonicalize, parse_poly, reciprocal, IntPolynomial, RatPolynomial};

// The guide's snippets run as doctests so they cannot drift from the code.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/measures.md")]
    mod measures {}
    #[doc = include_str!("../../../book/src/certification.md")]
    mod certification {}
    #[doc = include_str!("../../../book/src/search.md")]
    mod search {}
    #[doc = include_str!("../../../book/src/families.md")]
    mod families {}
    #[doc = include_str!("../../../book/src/perturbation.md")]
    mod perturbation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
