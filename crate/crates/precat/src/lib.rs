//! File formats, corpus generation and the command-line front end for `precat-core`.

pub mod cli;
pub mod corpus;
pub mod dot;
pub mod formats;
