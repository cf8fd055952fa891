//! Exact verification of Lie conformal superalgebras of rank (2+1), their
//! conformal modules, annihilation superalgebras and automorphisms.
#![no_std]

extern crate alloc;

pub mod error;
pub mod polyring;
pub mod lcsa;
pub mod catalog;
pub mod repmod;
pub mod annih;
pub mod autgrp;
pub mod classify;

pub use error::{Error, Result};
