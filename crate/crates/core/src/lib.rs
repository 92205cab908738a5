//! Probabilistic entailment over finite propositional world spaces, with two
//! non-monotonic extensions: specificity-prioritized maximization of
//! conditional independence, and maximum entropy.
//!
//! The pipeline is: parse a knowledge base ([`kb`]), enumerate its worlds
//! ([`worlds`]), linearize the probability statements over the world simplex
//! ([`entail`]) and solve the resulting linear programs ([`lp`]). Default
//! reasoning lives in [`spmci`], the maximum-entropy extension in [`maxent`].

pub mod cli;
pub mod entail;
mod error;
pub mod kb;
pub mod lp;
pub mod maxent;
pub mod spmci;
pub mod worlds;

pub use error::{Error, Result};

/// Default number of atoms a knowledge base may declare (4096 worlds).
pub const DEFAULT_ATOM_CAP: usize = 12;

/// Default tolerance used whenever two reals are compared.
pub const DEFAULT_TOL: f64 = 1e-7;

/// Engine-wide configuration knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub atom_cap: usize,
    pub tol: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            atom_cap: DEFAULT_ATOM_CAP,
            tol: DEFAULT_TOL,
        }
    }
}
