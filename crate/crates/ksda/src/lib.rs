//! Toolkit for one-way deterministic depth-k storage automata (k-sda's).
//!
//! A k-sda has a read-once input tape and a storage tape whose cells may be
//! rewritten only during their first k accesses, a turn of the storage head
//! counting as two accesses. The crate provides:
//!
//! * [`model`]: machine descriptions and static validation,
//! * [`engine`]: direct simulation of k-sda's, auxiliary and multi-head variants,
//! * [`dcfl`]: a 1dpda engine and both conversions between 2-sda's and pda's,
//! * [`transforms`]: FL transducers, their composition with a k-sda, the three
//!   input transforms and the embedding of k-limited automata,
//! * [`encoding`]: the instance encoding `⟨M,x⟩` and the reduction `x ↦ ⟨M,x⟩`,
//! * [`universal`]: a block-based universal simulator over `⟨M,x⟩`,
//! * [`scspace`]: the marker and contingency-list simulation of depth-immune machines,
//! * [`corpus`]: fixture machines written in the [`dsl`].

pub mod corpus;
pub mod dcfl;
pub mod dsl;
pub mod encoding;
pub mod engine;
pub mod model;
pub mod par;
pub mod scspace;
pub mod transforms;
pub mod universal;
