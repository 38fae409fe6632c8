//! Combinatorial codes and multiple-access modulation for visible light networks.
//!
//! The crate builds cyclic BIBD codes from difference sets and optical orthogonal codes (OOCs),
//! synthesizes coded-MEPPM, divided-MEPPM and OOK OOC-OCDMA symbols, and estimates their
//! bit-error rates over a Poisson photon-counting multi-user downlink with a seeded Monte Carlo
//! engine.
//!
//! Modules follow the signal chain:
//!
//! - [`design`]: difference sets and the cyclic BIBD codes they generate.
//! - [`ooc`]: the Johnson bound and a seeded search for optical orthogonal codes.
//! - [`modem`]: constellations and symbol mapping for every scheme.
//! - [`channel`]: superposition of users, photon-count means and shot-noise sampling.
//! - [`receiver`]: the differential BIBD correlator, the OOC shift-register correlator and the
//!   decision rules.
//! - [`simulator`]: BER estimation, sweeps and distance metrics.

pub mod channel;
pub mod design;
mod error;
pub mod modem;
pub mod ooc;
pub mod receiver;
pub mod simulator;
mod util;

pub use error::{Error, Result};
pub use util::{rotate_right, VerificationReport};
