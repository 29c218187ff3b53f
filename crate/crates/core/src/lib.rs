//! Landau levels on (Γ,χ)-automorphic functions over ℂⁿ: quantization
//! checks, automorphic reproducing kernels and their traces, Selberg
//! transforms, and a finite-difference spectral cross-check.

// `!(x > 0.0)` is the house idiom for rejecting NaN along with bad values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod character;
pub mod cli;
pub mod config;
pub mod error;
pub mod kernels;
pub mod lattice;
pub mod operators;
pub mod quadrature;
pub mod specfun;
pub mod verify;
