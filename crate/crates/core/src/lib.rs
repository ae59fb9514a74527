pub mod cli;
pub mod gadget;
pub mod graph;
pub mod hom;
pub mod poset;
pub mod prune;
pub mod report;
