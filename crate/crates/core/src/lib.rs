//! Core of the logic tutor: propositional formulas, the rule set, proof and
//! hint checking, bounded proof search, and problem-solving-state extraction.

pub mod data;
pub mod formula;
pub mod kernel;
pub mod pss;
pub mod random;
pub mod rules;
pub mod search;
