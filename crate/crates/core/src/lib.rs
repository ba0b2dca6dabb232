//! Frequency-domain passivity analysis and passive physical equivalents for
//! series elastic (SEA) and series damped elastic (SDEA) actuators driven by a
//! cascaded velocity-sourced impedance controller.
//!
//! The crate is organised bottom-up:
//!
//! * [`ratfun`]: real polynomials and rational impedances `Z(s) = N(s)/D(s)`.
//! * [`models`]: plant, controller and virtual-environment parameters and the
//!   closed-loop interaction-port impedance built from the block diagram.
//! * [`passivity`]: a positive-realness engine that works on any rational `Z(s)`.
//! * [`conditions`]: closed-form passivity and realization-feasibility conditions
//!   for the five analysed configurations.
//! * [`synthesis`]: spring/damper/inerter networks that realize each closed loop.
//! * [`analysis`]: effective impedance, parasitic dynamics and Bode data.
//! * [`coupsim`]: coupled-environment eigenvalue sweeps and impulse simulation.
//! * [`cli`]: the command-line front end used by the `elastpass` binary.
//!
//! Runnable walkthroughs for each capability live in the crate's `examples/`
//! directory (`cargo run -p elastpass --example <name>`).

pub mod analysis;
pub mod cli;
pub mod conditions;
pub mod coupsim;
mod error;
pub mod models;
pub mod passivity;
pub mod ratfun;
pub mod synthesis;

pub use error::{Error, Result};
