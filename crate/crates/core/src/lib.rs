pub mod cyclo;
pub mod fusion;
pub mod linalg;
pub mod modular;
pub mod commutant;
pub mod classify;
pub mod ringfile;
pub mod report;
pub mod pipeline;
