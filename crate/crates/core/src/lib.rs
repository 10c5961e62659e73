#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod domain;
pub mod elliptic;
pub mod error;
pub mod gauge;
pub mod liealg;
pub mod math;
pub mod pipeline;
pub mod subcritical;

pub use error::{Error, Monitor, Result};
