#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod abel;
pub mod analysis;
pub mod bumps;
pub mod config;
pub mod error;
pub mod geometry;
pub mod heat;
pub mod io;
pub mod model_space;
pub mod operators;
pub mod quadrature;
pub mod radial;
pub mod spherical;
pub mod suite;

pub use error::{Error, Result};
pub use model_space::{ModelSpace, SpaceKind};
