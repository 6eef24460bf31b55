//! Numerical tolerances shared by the library checks and the acceptance suite.

/// Largest fraction of `Σ|f|²` allowed in the velocity boundary shell.
pub const BOUNDARY_MASS: f64 = 1e-8;

/// Relative amplitude below which a sample counts as outside the support.
pub const SUPPORT_THRESHOLD: f64 = 1e-10;

/// Round trip of forward and inverse transforms.
pub const ROUND_TRIP: f64 = 1e-12;

/// Parseval identity in the continuum convention.
pub const PARSEVAL: f64 = 1e-10;

/// Energy identity, one dimension, Gaussian datum at `N = 256`, `L = 12`.
pub const ENERGY_IDENTITY: f64 = 1e-3;

/// Required gap reduction of the energy identity from `N = 128` to `N = 512`.
pub const ENERGY_DECREASE: f64 = 4.0;

/// Commutator identity with an analytic Gaussian symbol at `N = 256`.
pub const COMMUTATOR: f64 = 1e-6;

/// Hilbert transform of `cos` against `i sin`.
pub const HILBERT_EIGEN: f64 = 1e-10;

/// Parametrix reconstruction with 64 Gauss–Legendre nodes per piece.
pub const PARAMETRIX: f64 = 1e-6;

/// Relative tolerance on fitted decay exponents, one and two dimensions.
pub const DECAY_REL_1D: f64 = 0.02;
pub const DECAY_REL_2D: f64 = 0.05;

/// Bessel kernel mass, closed form at `s = 2`, and quadrature target.
pub const BESSEL_MASS: f64 = 1e-6;
pub const BESSEL_CLOSED_FORM: f64 = 1e-8;
pub const BESSEL_QUADRATURE: f64 = 1e-10;

/// Stability of the Marcinkiewicz sum under scan-domain doubling.
pub const MARCINKIEWICZ_STABILITY: f64 = 0.10;

/// Minimal growth factor of the Hörmander sum per scan-domain doubling.
pub const HORMANDER_GROWTH: f64 = 1.5;

/// Refinement stability of theorem ratios.
pub const RATIO_STABILITY: f64 = 0.10;

/// Agreement of degenerate theorem configurations.
pub const DEGENERATION: f64 = 1e-12;

/// Renormalized norm against its limit at `λ = 1/8`.
pub const RENORMALIZATION: f64 = 0.02;

/// Final over initial mollifier commutator defect.
pub const FRIEDRICHS_DECAY: f64 = 0.05;

/// Anomaly factor between refinements that fails a sweep.
pub const ANOMALY_GROWTH: f64 = 10.0;

/// Window-doubling stability of Strichartz ratios.
pub const STRICHARTZ_WINDOW: f64 = 0.10;
