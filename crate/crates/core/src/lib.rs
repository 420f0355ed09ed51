pub mod chain;
pub mod delta;
pub mod forcing;
pub mod ordinal;
pub mod poset;
pub mod report;
pub mod sample;
pub mod tree;
pub mod universe;
pub mod walks;
