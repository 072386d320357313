//! Deciding whether a product of powers `p_1^x_1 ... p_n^x_n` with
//! arbitrary-precision exponents is the identity, without expanding it.
//!
//! Supported groups: free groups ([`shorten::solve_free`]), wreath products
//! `G wr Z` over several base groups ([`wreath::solve_wreath`]) and the
//! Grigorchuk group ([`grigorchuk::solve_grigorchuk`]).

pub mod error;
pub mod free_words;
pub mod power_words;
pub mod preprocess;
pub mod rewrite_t;
pub mod perm;
pub mod shorten;
pub mod wreath;
pub mod hardness;
pub mod grigorchuk;
pub mod oracle;

pub use error::{Error, ParseError, Result};
pub use free_words::{Letter, OmegaWord, ReducedWord, Word};
pub use power_words::{BigExponent, Factor, PowerWord, SymbolicLetter, SymbolicWord};
