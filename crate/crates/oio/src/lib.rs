pub mod atoms;
pub mod cli;
pub mod config;
pub mod decay;
pub mod dyadic;
pub mod error;
pub mod fractional;
pub mod grid;
pub mod integrate;
pub mod norms;
pub mod operator;
pub mod pitt;
pub mod report;
pub mod sharp;
pub mod suite;
pub mod witness;
