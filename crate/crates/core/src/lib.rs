//! Bounded pushdown gamblers and compressors over finite alphabets, with
//! exact rational capital, the block constructions between the two models,
//! LZ78 and the separation sequence.

pub mod alphabet;
pub mod arith;
pub mod capital;
pub mod compressor;
pub mod constructions;
pub mod error;
pub mod fixtures;
pub mod gale;
pub mod lz;
pub mod machine;
pub mod separation;
pub mod suite;

pub use alphabet::{Alphabet, EnumCap, Symbol, Word};
pub use capital::{Capital, GaleValue, Precision};
pub use error::{Error, Result};
pub use machine::{
    BetDistribution, BpdMachine, Compressor, Configuration, Gambler, Machine, MachineKind, StateId,
};
