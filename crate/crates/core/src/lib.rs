//! Requirements equivalence verification: controlled-language and Gherkin
//! frontends lower into a typed propositional IR, a grounding map merges the
//! two sides, and an exhaustive engine decides biconditional equivalence
//! with counterexample witnesses. Formulas and theorems can be exchanged
//! with Lean 4.

pub mod engine;
pub mod frontend;
pub mod grounding;
pub mod ir;
pub mod lean;
pub mod pipeline;
pub mod sexpr;
