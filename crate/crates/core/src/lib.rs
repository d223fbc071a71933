//! Typelogical parsing and compositional distributional semantics for a
//! Lambek calculus with control modalities and bounded contraction.
//!
//! The crate derives sentences — including elliptical ones, whose verb
//! phrases must be copied under the `◇`/`□` regime — and evaluates each
//! reading to a concrete vector under two interchangeable backends:
//!
//! * [`frobenius`]: proofs compile functorially to linear maps built from
//!   compact-closed and Frobenius primitives, then evaluate on word tensors;
//!   copying is entangled.
//! * [`lambda`]: proofs translate to non-linear simply typed lambda terms,
//!   lexical homomorphisms substitute tensor-operation terms for the word
//!   constants, and the closed term evaluates numerically; copying is
//!   classical variable reuse.

pub mod embeddings;
pub mod frobenius;
pub mod lambda;
pub mod prover;
pub mod syntax;
pub mod tensor;
