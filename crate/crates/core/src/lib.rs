//! Spin-c geometry of the flat 4-torus.
//!
//! Positive spinors are squared into self-dual 2-forms, a U(1) lattice
//! connection on the determinant line drives a gauge-covariant Dirac
//! operator, and nowhere-zero harmonic spinors are pushed through the
//! squaring map to produce candidate symplectic and Kähler forms.
//!
//! Module map:
//!
//! * [`clifford`]: pointwise Clifford algebra of ℝ⁴ acting on `W⁺ ⊕ W⁻`.
//! * [`forms`]: Hodge star, self-dual splitting, wedge, almost-complex structures.
//! * [`squaring`]: the squaring map `W⁺ → Λ⁺`, its Bloch data and preimages.
//! * [`grid`], [`lattice`]: periodic grids, link connections, difference operators.
//! * [`harmonic`]: inverse-power kernel solver and the Kähler/symplectic pipelines.
//! * [`topology`]: sphere-map degrees over the six coordinate 2-tori.
//! * [`calibration`]: spectral oracle pinning the normalization of the
//!   differential identity linking `D^A`, `d*σ` and `⟨∇^Aφ, iφ⟩`.
//! * [`fieldio`], [`report`]: field archives and machine-readable run reports.

// `!(x > tol)` rejects NaN as well; index loops mirror the tensor formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod calibration;
pub mod checks;
pub mod clifford;
mod error;
pub mod fieldio;
pub mod forms;
pub mod grid;
pub mod harmonic;
pub mod lattice;
pub mod report;
pub mod smooth;
pub mod squaring;
pub mod topology;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Sum in a fixed pairwise (tree) order so reductions are reproducible and
/// accumulate error like `O(log n)` rather than `O(n)`.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 16;
    if values.len() <= BLOCK {
        return values.iter().fold(0.0, |acc, v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}
