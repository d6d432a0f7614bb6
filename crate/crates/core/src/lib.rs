pub mod cli;
pub mod descent;
pub mod error;
pub mod field;
pub mod gha;
pub mod hg;
pub mod linalg;
pub mod report;
pub mod tower;
pub mod trunc;
