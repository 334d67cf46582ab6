//! A workbench for two verification pipelines over finite systems.
//!
//! On the process side: CCS terms ([`ccs`]), their labelled transition
//! systems, Hennessy-Milner logic ([`hml`]) and strong bisimilarity
//! ([`bisim`]). On the program side: regular programs with relational
//! semantics ([`regprog`]), automata ([`automata`]), propositional dynamic
//! logic ([`pdl`]) and Kleene-algebra proofs ([`ka`]). [`correspondence`]
//! checks how the logical and equational views line up on bounded
//! instances, and [`cli`] exposes everything as commands.

pub mod automata;
pub mod bisim;
pub mod ccs;
pub mod cli;
pub mod correspondence;
pub mod generate;
pub mod hml;
pub mod ka;
pub mod pdl;
pub mod regprog;
mod syntax;

pub use syntax::ParseError;
