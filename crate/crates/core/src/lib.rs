//! Exact (p,q)-adic Fourier analysis on `Z_p`.
//!
//! For distinct primes p and q, this crate computes with continuous functions
//! `Z_p -> C_q` through their locally constant representatives: Haar
//! integrals, Fourier transforms in both directions, convolutions, measures
//! given by bounded Fourier-Stieltjes transforms, and the non-archimedean
//! norms that drive the finite-level Wiener-Tauberian checks.
//!
//! Two value backends share one interface: an exact cyclotomic backend
//! ([`cyclo::CycloNum`]), in which every transform identity holds exactly,
//! and a truncated q-adic backend ([`qadic::QAdicNum`]) realizing the
//! embedding of the cyclotomics into an unramified extension of `Q_q`, which
//! supplies q-adic valuations and norms.

pub mod base;
pub mod cyclo;
pub mod dual;
pub mod error;
pub mod exec;
pub mod fourier;
pub mod measures;
pub mod qadic;
pub mod value;
pub mod wire;
pub mod wtt;

pub use base::{Config, ZpPoint};
pub use cyclo::CycloNum;
pub use dual::PHat;
pub use error::{Error, Result};
pub use qadic::{FieldCtx, QAdicNum, QVal};
pub use value::{Backend, ExactBackend, QAdicBackend, QNorm};
