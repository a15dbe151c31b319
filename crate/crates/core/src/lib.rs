//! Six-state quantum key distribution under intercept/resend and collective
//! attacks: closed-form security curves, their Monte Carlo counterparts, and
//! the singlet-correlation view of the same attacks.

// matrix code reads better with explicit indices
#![allow(clippy::needless_range_loop)]

pub mod collective;
pub mod e91;
pub mod error;
pub mod intercept_resend;
pub mod protocol;
pub mod quantum;
pub mod rng;
pub mod stats;

pub use error::{QkdError, Result};
