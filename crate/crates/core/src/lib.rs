// `!(x > 0.0)` is used on purpose throughout: it rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod oracle;
pub mod product;
pub mod quantizer;
pub mod roots;
pub mod rotation;
pub mod special;
pub mod specfun;

pub use error::{Error, Result};
pub use product::{fit_tail, fit_tail_shift, EntireProduct, ZeroTail};
pub use rotation::RotationParams;
