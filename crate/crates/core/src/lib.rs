//! Algorithms for finite-domain constraint satisfaction and graph
//! homomorphism problems.
//!
//! The crate is organised around finite relational [`Structure`]s
//! (digraphs are the special case of a single binary relation) and
//! provides:
//!
//! * constructions on structures: products, powers, disjoint unions,
//!   contractions, cores and automorphism groups ([`relstruct`]);
//! * the local-consistency procedures AC-3, (strong) path consistency,
//!   k-consistency and singleton arc consistency ([`consistency`]);
//! * homomorphism search with precolourings and lists ([`homsearch`]);
//! * the powerset structure and the tree-duality test ([`powerset`]);
//! * the Bulatov-Dalmau solver for templates with a Maltsev
//!   polymorphism ([`maltsev`]);
//! * primitive positive logic: canonical queries and databases,
//!   pp-definability via the Inv-Pol connection, instance rewriting and
//!   the binary (dual) encoding ([`pplogic`]);
//! * polymorphism search for linear identity systems, driven by the
//!   indicator construction ([`polymorphism`]);
//! * complexity classifiers: Schaefer, Hell-Nesetril, smooth digraphs,
//!   the CSP dichotomy via Siggers operations, and bounded width
//!   ([`classify`]).
//!
//! The crate is `no_std` (it requires `alloc`); everything is a pure
//! function over immutable inputs, and all collections iterate in a
//! deterministic order, so results are reproducible bit for bit.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bitset;
pub mod classify;
pub mod consistency;
pub mod homsearch;
pub mod maltsev;
pub mod polymorphism;
pub mod powerset;
pub mod pplogic;
pub mod relstruct;

mod power_csp;

use alloc::string::String;
use core::fmt;

pub use relstruct::{Mapping, Signature, Structure};

/// Resource limits for the operations that perform exhaustive search.
///
/// Exceeding a limit is always a reported [`Error`], never silent
/// truncation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest domain for automorphism, core and isomorphism search.
    pub exhaustive_domain: usize,
    /// Largest template domain for the powerset construction
    /// (`P(B)` has `2^n - 1` elements).
    pub powerset_domain: usize,
    /// Bound on `domain^k` when a structure power or an indicator
    /// instance is built, explicitly or implicitly.
    pub power_points: u64,
    /// Bound on the total number of explicit tuples a constructed
    /// structure may hold.
    pub tuples: u64,
    /// Bound on the internal state count of the implicit power-instance
    /// engine.
    pub engine_states: usize,
    /// Bound on assignments enumerated by brute-force homomorphism
    /// search.
    pub brute_force: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            exhaustive_domain: 12,
            powerset_domain: 10,
            power_points: 1_000_000,
            tuples: 10_000_000,
            engine_states: 200_000_000,
            brute_force: 200_000_000,
        }
    }
}

/// Errors reported by the operations in this crate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// Two structures that must share a signature do not.
    SignatureMismatch,
    /// A structure failed validation; the message names the first
    /// violation.
    InvalidStructure(String),
    /// The operation required a digraph (one binary symbol).
    NotADigraph,
    /// An argument was outside the operation's domain of definition.
    BadArgument(String),
    /// A configured search or size limit was exceeded.
    /// Callers surface this as an inconclusive verdict.
    GuardExceeded(String),
    /// A decision oracle accepted an instance but every extension of a
    /// partial solution was rejected.
    OracleInconsistent,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::SignatureMismatch => write!(f, "structures do not share a signature"),
            Error::InvalidStructure(m) => write!(f, "invalid structure: {m}"),
            Error::NotADigraph => write!(f, "expected a digraph (single binary symbol E)"),
            Error::BadArgument(m) => write!(f, "bad argument: {m}"),
            Error::GuardExceeded(m) => write!(f, "guard exceeded: {m}"),
            Error::OracleInconsistent => {
                write!(f, "oracle accepted but no single-variable extension was accepted")
            }
        }
    }
}

#[cfg(test)]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
