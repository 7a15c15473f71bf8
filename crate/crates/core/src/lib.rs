//! Existence-graph knowledge base with three-valued reasoning.

pub mod abduction;
pub mod agency;
pub mod kb;
pub mod lang;
pub mod logic3;
pub mod qa;
pub mod syllogistics;
