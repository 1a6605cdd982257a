//! Exact-arithmetic toolkit for the T-fractal translation surface.

pub mod address;
pub mod atlas;
pub mod billiard;
pub mod direction;
pub mod dynamics;
pub mod error;
pub mod metric;
pub mod rat;
pub mod sample;
pub mod render;
pub mod singularity;
pub mod tracer;

pub use address::{Address, ElusiveAddress};
pub use direction::Direction;
pub use error::{Error, Result};
pub use rat::Rat;
