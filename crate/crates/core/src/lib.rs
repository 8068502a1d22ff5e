//! Exact optimal transport on the circle and the unit interval, Fourier-side
//! bounds for Wasserstein distances, discrepancy of point sets, and the
//! number-theoretic and spectral test measures used to probe them.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cdf;
pub mod discrepancy;
pub mod error;
pub mod experiments;
pub mod fit;
pub mod heat;
pub mod io;
pub mod measures;
pub mod oracle;
pub mod ot;
pub mod quad;
pub mod random;
pub mod sequences;
pub mod trig;

pub use cdf::{cdf, Cdf, CdfKind, HasCdf};
pub use error::{Error, Result};
pub use experiments::{
    run_experiment, ExperimentConfig, ExperimentId, ExperimentOutput, OutputFormat,
};
pub use fit::{fit_linear, fit_loglog, SlopeFit};
pub use measures::{
    circle_distance, fourier_of_atoms, fourier_of_density, synthesize_grid, Atom, AtomicMeasure,
    CircleMetric, FourierSeries, IntervalDensity, TorusDensity,
};
pub use oracle::{discrete_ot_oracle, DiscretePlan, PlanEntry};
pub use ot::{mass_scaled_wp, w1_circle, w1_interval, wp_circle, wp_interval, TransportCost};
