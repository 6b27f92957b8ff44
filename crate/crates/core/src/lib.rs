pub mod catalog;
pub mod classify;
pub mod cli;
pub mod cliques;
pub mod enumerate;
pub mod error;
pub mod pattern;
pub mod rational;
pub mod horn;
pub mod mle;
pub mod numeric;

#[cfg(test)]
mod testgen;
