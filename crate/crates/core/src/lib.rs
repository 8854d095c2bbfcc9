pub mod cli;
pub mod config;
pub mod error;
pub mod functionals;
pub mod lebesgue;
pub mod nonuniq;
pub mod numkernel;
pub mod opdecomp;
pub mod sampling;
pub mod staralg;
