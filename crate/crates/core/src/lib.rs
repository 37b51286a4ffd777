//! Multilingual offensive-language identification toolkit.

pub mod augment;
pub mod cli;
pub mod corpus;
pub mod encoder;
pub mod eval;
pub mod normalize;
pub mod synth;
pub mod train;
pub mod weaklabel;
