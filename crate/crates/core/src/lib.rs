//! Mutation testing and test-suite utility toolkit for Python subject code.

pub mod advantage;
pub mod exec;
pub mod linemap;
pub mod mutation;
pub mod prompt;
pub mod repair;
pub mod rerank;
pub mod reward;
pub mod suite;
pub mod syntax;
