//! Harmonic analysis on the Boolean hypercube `{0,1}^n`.
//!
//! * [`cube`]: dense functions, Walsh-Hadamard transforms, convolution.
//! * [`krawtchouk`]: exact Krawtchouk tables, their differences and the
//!   complex binomial coefficients used by the Cesaro means.
//! * [`spherical`]: sphere kernels, radial multipliers, the noise semigroup.
//! * [`maximal`]: spherical maximal functions, weak-type quantities, the
//!   point-mass lower bound and the sphere-avoiding center search.
//! * [`cesaro`]: Cesaro means of complex order over the even spheres and
//!   the associated square functions.
//! * [`harness`]: seeded test families, dimension sweeps with JSON/CSV
//!   reports, and the named identity suite.
//!
//! ```
//! use cube_harmonics::cube::CubeFunction;
//! use cube_harmonics::maximal::{maximal_function, MaximalVariant};
//!
//! let f = CubeFunction::indicator(10, |x| x.count_ones() == 3)?;
//! let star = maximal_function(&f, MaximalVariant::Half)?;
//! assert_eq!(star.values()[0], 1.0);
//! # Ok::<(), cube_harmonics::error::Error>(())
//! ```

pub mod cesaro;
pub mod cube;
pub mod error;
pub mod harness;
pub mod krawtchouk;
pub mod maximal;
pub mod spherical;

// The book's snippets run as doctests, one module per chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/cube.md")]
    mod cube {}
    #[doc = include_str!("../../../book/src/krawtchouk.md")]
    mod krawtchouk {}
    #[doc = include_str!("../../../book/src/spherical.md")]
    mod spherical {}
    #[doc = include_str!("../../../book/src/maximal.md")]
    mod maximal {}
    #[doc = include_str!("../../../book/src/cesaro.md")]
    mod cesaro {}
    #[doc = include_str!("../../../book/src/harness.md")]
    mod harness {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
