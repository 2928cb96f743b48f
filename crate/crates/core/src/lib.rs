//! Hardy's two-qubit model, local hidden-variable polytopes and the
//! CHSH/Tsirelson structure of pure two-qubit states.
//!
//! The crate is split by concern:
//!
//! - [`qcore`]: dense complex linear algebra in dimensions 2, 4 and 8.
//! - [`hardy`]: Hardy's state, projectors and their quantum predictions.
//! - [`lhv`]: deterministic strategies, LP feasibility over hidden-variable
//!   distributions, and the dispersion-free single-qubit model.
//! - [`nonlocal`]: the CHSH operator, settings optimization, the
//!   correlation-matrix bound and the three-qubit GHZ checks.
//! - [`cli`]: the command implementations behind the `hardy` binary.

pub mod cli;
pub mod error;
pub mod hardy;
pub mod lhv;
pub mod nonlocal;
pub mod optimize;
pub mod qcore;

pub use error::{Error, Result};
