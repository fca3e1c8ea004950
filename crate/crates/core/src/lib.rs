#![cfg_attr(not(test), no_std)]
extern crate alloc;

pub mod categorify;
pub mod category;
pub mod error;
pub mod fincat;
pub mod model;
pub mod presentation;
pub mod search;
pub mod standard;
pub mod structure;
pub mod svk;
pub mod table;
pub mod theta;
pub mod util;

pub use error::{Error, Result};
