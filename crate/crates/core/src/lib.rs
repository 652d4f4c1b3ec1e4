// Float checks are written as !(x >= lo) so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Index loops mirror the summation indices of the formulas.
#![allow(clippy::needless_range_loop)]

pub mod accum;
pub mod arith;
pub mod central;
pub mod characters;
pub mod empirical;
pub mod error;
pub mod jet;
pub mod kernels;
pub mod limits;
pub mod moments;
pub mod optimizer;
pub mod poly;
pub mod quadrature;
pub mod rational;
pub mod spec;
pub mod special;

pub use error::{Error, Result};
