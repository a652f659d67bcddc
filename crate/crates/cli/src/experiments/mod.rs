//! One module per experiment kind. Each validates its own parameter block
//! and fills a [`Report`](crate::report::Report).

pub mod flowout;
pub mod forward;
pub mod linearize;
pub mod recover;
pub mod series;
pub mod trace;
