pub mod analysis;
pub mod elements;
pub mod error;
pub mod fock;
pub mod pipelines;
