//! Pointwise exterior algebra of oriented Euclidean ℝ⁴.
//!
//! Two-forms are stored in the basis `e^i∧e^j` (i<j) ordered
//! `(01, 02, 03, 12, 13, 23)`; these basis elements are orthonormal, so
//! `|ω_k| = √2` for the self-dual basis
//! `ω₁ = e⁰¹+e²³`, `ω₂ = e⁰²+e³¹`, `ω₃ = e⁰³+e¹²`.

use std::ops::{Add, Mul, Neg, Sub};

use crate::clifford::Covector;
use crate::{Error, Result};

/// Index pairs of the stored 2-form components.
pub const PLANES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Index triples of the stored 3-form components.
pub const TRIPLES: [(usize, usize, usize); 4] = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)];

pub type OneForm = Covector;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TwoForm(pub [f64; 6]);

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ThreeForm(pub [f64; 4]);

/// Self-dual 2-form `s₁ω₁ + s₂ω₂ + s₃ω₃`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SdForm(pub [f64; 3]);

/// Position of the plane `(i, j)` in [`PLANES`] and the orientation sign.
pub fn plane_index(i: usize, j: usize) -> Option<(usize, f64)> {
    if i == j {
        return None;
    }
    let (lo, hi, sign) = if i < j { (i, j, 1.0) } else { (j, i, -1.0) };
    PLANES
        .iter()
        .position(|&p| p == (lo, hi))
        .map(|k| (k, sign))
}

impl TwoForm {
    pub const ZERO: Self = Self([0.0; 6]);

    pub fn basis(i: usize, j: usize) -> Self {
        let mut out = Self::ZERO;
        if let Some((k, sign)) = plane_index(i, j) {
            out.0[k] = sign;
        }
        out
    }

    /// Antisymmetric component `β_ij`.
    pub fn component(&self, i: usize, j: usize) -> f64 {
        plane_index(i, j).map_or(0.0, |(k, sign)| sign * self.0[k])
    }

    pub fn to_matrix(&self) -> [[f64; 4]; 4] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.component(i, j)))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }
}

impl Add for TwoForm {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|k| self.0[k] + rhs.0[k]))
    }
}

impl Sub for TwoForm {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|k| self.0[k] - rhs.0[k]))
    }
}

impl Neg for TwoForm {
    type Output = Self;
    fn neg(self) -> Self {
        Self(self.0.map(|c| -c))
    }
}

impl Mul<f64> for TwoForm {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self(self.0.map(|c| c * rhs))
    }
}

impl ThreeForm {
    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum()
    }
}

impl SdForm {
    pub const ZERO: Self = Self([0.0; 3]);

    pub fn basis(k: usize) -> Self {
        let mut s = [0.0; 3];
        s[k] = 1.0;
        Self(s)
    }

    pub fn to_two_form(&self) -> TwoForm {
        let [s1, s2, s3] = self.0;
        // ω₂ = e⁰² + e³¹ = e⁰² − e¹³
        TwoForm([s1, s2, s3, s3, -s2, s1])
    }

    /// Norm as a 2-form, `√2·|s|`.
    pub fn norm(&self) -> f64 {
        std::f64::consts::SQRT_2 * self.coeff_norm()
    }

    /// Euclidean length of the coefficient vector `(s₁, s₂, s₃)`.
    pub fn coeff_norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

impl Add for SdForm {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|k| self.0[k] + rhs.0[k]))
    }
}

impl Sub for SdForm {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|k| self.0[k] - rhs.0[k]))
    }
}

impl Mul<f64> for SdForm {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self(self.0.map(|c| c * rhs))
    }
}

/// Anti-self-dual partner `ω̄_k` of `ω_k` (sign flipped on the second term).
pub fn asd_basis(k: usize) -> TwoForm {
    match k {
        0 => TwoForm([1.0, 0.0, 0.0, 0.0, 0.0, -1.0]),
        1 => TwoForm([0.0, 1.0, 0.0, 0.0, 1.0, 0.0]),
        _ => TwoForm([0.0, 0.0, 1.0, -1.0, 0.0, 0.0]),
    }
}

/// Hodge star on 2-forms for the volume form `e⁰∧e¹∧e²∧e³`.
pub fn hodge_star2(beta: &TwoForm) -> TwoForm {
    let [b01, b02, b03, b12, b13, b23] = beta.0;
    TwoForm([b23, -b13, b12, b03, -b02, b01])
}

/// Self-dual part `(β + *β)/2` in the `ω_k` basis.
pub fn sd_project(beta: &TwoForm) -> SdForm {
    let [b01, b02, b03, b12, b13, b23] = beta.0;
    SdForm([(b01 + b23) / 2.0, (b02 - b13) / 2.0, (b03 + b12) / 2.0])
}

/// Anti-self-dual part `(β − *β)/2`.
pub fn asd_project(beta: &TwoForm) -> TwoForm {
    (*beta - hodge_star2(beta)) * 0.5
}

/// Coefficient of `e⁰∧e¹∧e²∧e³` in `β∧δ`.
pub fn wedge22(beta: &TwoForm, delta: &TwoForm) -> f64 {
    let [a01, a02, a03, a12, a13, a23] = beta.0;
    let [b01, b02, b03, b12, b13, b23] = delta.0;
    a01 * b23 + a23 * b01 - a02 * b13 - a13 * b02 + a03 * b12 + a12 * b03
}

/// Almost-complex structure as a real 4×4 matrix acting on column vectors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Acs(pub [[f64; 4]; 4]);

impl Acs {
    pub fn apply(&self, v: &[f64; 4]) -> [f64; 4] {
        std::array::from_fn(|i| (0..4).map(|j| self.0[i][j] * v[j]).sum())
    }

    pub fn square(&self) -> [[f64; 4]; 4] {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| (0..4).map(|k| self.0[i][k] * self.0[k][j]).sum())
        })
    }

    /// Largest entry of `J² + Id`.
    pub fn square_defect(&self) -> f64 {
        let sq = self.square();
        let mut worst: f64 = 0.0;
        for (i, row) in sq.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let id = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((v + id).abs());
            }
        }
        worst
    }

    /// Largest entry of `JᵀJ − Id`.
    pub fn orthogonality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                let g: f64 = (0..4).map(|k| self.0[k][i] * self.0[k][j]).sum();
                let id = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - id).abs());
            }
        }
        worst
    }
}

/// Almost-complex structure with fundamental form proportional to `α`:
/// `Jv = sharp(ι_v α̂)` where `α̂ = √2·α/|α|`, so that `α(v, Jv) > 0`.
pub fn acs_from_sd(alpha: &SdForm, tol: f64) -> Result<Acs> {
    let modulus = alpha.norm();
    if !(modulus > tol) {
        return Err(Error::DegenerateForm {
            site: None,
            modulus,
            tol,
        });
    }
    // √2·α/|α| = α/|s|.
    let unit = alpha.to_two_form() * (1.0 / alpha.coeff_norm());
    let m = unit.to_matrix();
    // (Jv)_j = Σ_i α̂_ij v_i, i.e. J = α̂ᵀ.
    Ok(Acs(std::array::from_fn(|j| std::array::from_fn(|i| m[i][j]))))
}

/// Constant `c` such that `α` has norm `√2` for the metric `c·g`.
pub fn conformal_factor(alpha: &SdForm) -> Result<f64> {
    let modulus = alpha.norm();
    if !(modulus > 0.0) {
        return Err(Error::DegenerateForm {
            site: None,
            modulus,
            tol: 0.0,
        });
    }
    Ok((modulus / std::f64::consts::SQRT_2).sqrt())
}
