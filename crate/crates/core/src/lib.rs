#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod constructions;
pub mod enumerate;
pub mod geometry;
pub mod jet;
pub mod mobility;
pub mod projective;
pub mod symexpr;

#[cfg(test)]
mod testutil;
