//! Numerical laboratory for the symbol calculus of type-1 thermo-elasticity
//! in anisotropic two-dimensional media.
//!
//! The crate assembles the coupled 5×5 first-order symbol `B(ξ)`, classifies
//! phase-space directions, checks eigenvalue asymptotics and the recursive
//! diagonalisation schemes, measures Fresnel contact orders, predicts Lp–Lq
//! decay exponents and measures them with an exact per-mode FFT simulator.
//!
//! ```no_run
//! use te_lab::media::Medium;
//! use te_lab::symbol::spectrum;
//!
//! let m = Medium::cubic(3.0, 1.0, 0.0, 1.0, 1.0).unwrap();
//! let rep = spectrum(&m, [0.3, 0.4]).unwrap();
//! for (nu, label) in rep.eigenvalues.iter().zip(rep.labels.iter()) {
//!     println!("{label}: {nu}");
//! }
//! ```

pub mod asymptotics;
pub mod classify;
pub mod cli;
pub mod config;
pub mod decay;
pub mod error;
pub mod fit;
pub mod fresnel;
pub mod linalg;
pub mod media;
pub mod poly;
pub mod series;
pub mod simulator;
pub mod spectral;
pub mod symbol;

pub use error::{LabError, Result};
pub use media::{ElasticEigenFrame, Medium, MediumKind};

/// Complex double used throughout.
pub type C64 = num_complex::Complex64;

/// Unit vector at angle `phi`.
pub fn unit(phi: f64) -> [f64; 2] {
    [phi.cos(), phi.sin()]
}

/// Angle of a vector, mapped to `[0, 2π)`.
pub fn angle_of(v: [f64; 2]) -> f64 {
    let a = v[1].atan2(v[0]);
    if a < 0.0 {
        a + std::f64::consts::TAU
    } else {
        a
    }
}
