pub mod amalgam;
pub mod condition;
pub mod density;
pub mod gen;
pub mod oracle;
pub mod point;
