//! First-passage times of the Jacobi diffusion with state-dependent downward jumps.
//!
//! The membrane potential of a leaky integrate-and-fire neuron with reversal
//! potentials is mapped onto `[0, 1]`, where it follows a Jacobi process
//! that jumps from `y` to `exp(-r) y` at rate `Pi(dr) / y`. The crate
//! computes the Laplace transform and the mean of the time to reach a
//! threshold `a` through a generalised hypergeometric series, checks them
//! against closed forms and Monte Carlo, and tabulates firing-rate sweeps.
//!
//! Module map:
//! - [`params`]: membrane parameters and the reduction to the unit interval
//! - [`jumps`]: the jump measure `Pi`
//! - [`bernstein`]: the Bernstein function `phi` and `W_phi`
//! - [`hyper`]: Pochhammer symbols and hypergeometric series
//! - [`fpt`]: Laplace transforms, means, moments and firing regimes
//! - [`sim`]: Monte Carlo paths and estimators
//! - [`config`], [`tables`]: configuration files and CSV sweeps

pub mod bernstein;
pub mod config;
pub mod error;
pub mod fpt;
pub mod hyper;
pub mod jumps;
pub mod params;
pub mod sim;
pub mod tables;

pub use bernstein::{entrance_check, special_preset, BernsteinPhi, EntranceReport};
pub use error::{Error, Result};
pub use hyper::{ComplexParam, SeriesControl, SeriesResult};
pub use jumps::{JumpMeasure, TabulatedDensity};
pub use params::{reduce, PhysiologicalParams, ReducedModel};
