//! Counting definable sets along families of finite structures.
//!
//! The crate is organised bottom-up: first-order syntax ([`logic`]),
//! finite structures and their indexed families ([`structures`]),
//! satisfaction and counting ([`eval`]), exact finite measures
//! ([`measure`]), growth-rate comparison ([`dimension`]), dividing
//! witnesses ([`dividing`]) and asymptotic-class fitting ([`asymclass`]).

pub mod asymclass;
pub mod dimension;
pub mod dividing;
pub mod eval;
pub mod logic;
pub mod measure;
pub mod scheme;
pub mod structures;
