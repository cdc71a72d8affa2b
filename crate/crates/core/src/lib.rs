//! Exact convex geometry for lattice covering density bounds.
//!
//! The crate is organised bottom-up:
//!
//! * [`geom`]: exact-rational polytopes (hulls, volumes, slices, skeleta).
//! * [`bodies`]: anti-blocking and locally anti-blocking polytopes, and
//!   seeded instance generators.
//! * [`inscribe`]: optimal slice cylinders, k-fold cylinder chains and the
//!   exact cylinder of a polytope with `n + 2` vertices.
//! * [`covering`]: lattice bases, covering certificates, covering search and
//!   coverings lifted through cylinder chains.
//! * [`bounds`]: high-precision evaluation of the closed-form density bounds.
//! * [`fixtures`]: built-in bodies for the CLI and the acceptance suite.
//!
//! Axes are zero-based throughout: axis `n - 1` is the last coordinate.

pub mod bodies;
pub mod bounds;
pub mod covering;
pub mod error;
pub mod fixtures;
pub mod geom;
pub mod inscribe;
pub mod linalg;
pub mod rational;

pub use error::{Error, Result};
pub use geom::{Hyperplane, Polytope};
pub use rational::{Rational, RationalVector};
