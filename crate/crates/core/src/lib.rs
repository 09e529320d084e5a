// `!(x > 0.0)` guards reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curves;
pub mod error;
pub mod extrema;
pub mod geom;
pub mod hyperspace;
pub mod io;
pub mod profiles;
pub mod schedules;
pub mod session;
pub mod spline;
pub mod sweep;
pub mod validate;

#[cfg(test)]
mod proptests;
