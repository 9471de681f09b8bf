//! Spectral toolkit for the periodic quantum-graph operator with a weighted
//! line defect: essential spectrum, gap classification, guided modes and a
//! truncated-lattice cross-check.

pub mod error;
pub mod essential;
pub mod lattice;
pub mod params;
pub mod point;
pub mod quadrature;
pub mod roots;
pub mod symbols;

pub use error::{Error, Result};
pub use essential::{
    classify_gap, default_resolution, dispersion_roots, dispersion_roots_with, find_gaps,
    in_essential_spectrum, BandScan, DispersionRoot, GapType, Interval, SpectralGap,
};
pub use lattice::{
    fd_residual, oracle_eigenfrequencies, oracle_eigenfrequencies_with,
    smallest_singular_indicator, IndicatorMethod, OracleConfig, TruncatedSystem,
};
pub use params::{normalize_params, FrequencyWindow, LatticeParams, RawParams, Tolerances};
pub use point::{
    decay_rate, f_beta, f_beta_2d, find_guided_modes, mode_profile, GuidedMode, LatticeField,
    ModeSearch,
};
pub use symbols::{
    f_range, f_value, g_beta, phi_beta, sigma_points, w_points, FRange, PhiValue, SigmaPoints,
};
