//! Exact p-adic solver for pairs of additive forms of degree `p^tau (p-1)`.

pub mod certificate;
pub mod congruence;
pub mod error;
pub mod generate;
pub mod hensel;
pub mod io;
pub mod lemmas;
pub mod padic;
pub mod normalize;
pub mod pipeline;
pub mod system;
mod subset;
pub mod zerosum;

pub use error::{Error, Result};
pub use padic::{degree, is_prime, Modulus, Residue};
pub use system::{apply_move, level_of, q_of, select_h, theta, Census, EquivalenceMove, ProjClass, System, Theta};
