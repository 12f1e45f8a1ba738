//! Exact arithmetic for abelian number fields of odd prime degree.
//!
//! The crate computes, entirely in exact arithmetic, the objects needed to
//! certify Euclidean-ideal-class hypotheses for pairs of Galois number
//! fields: subfield lattices of cyclotomic fields, rings of integers, ideal
//! class groups with principality witnesses, genus numbers, fundamental unit
//! systems with regulators, the residue-class certificate `d mod f`, and the
//! finite-height sieve sets used in the primitive-root experiments.
//!
//! The crate is `no_std` (with `alloc`); all IO, serialization and the CLI
//! live in the companion `euclass-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod certify;
pub mod polyarith;
pub mod classgrp;
pub mod cyclo;
pub mod lattice;
pub mod order;
pub mod sieve;
pub mod units;
pub mod zmod;
