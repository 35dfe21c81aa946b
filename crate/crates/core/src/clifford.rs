//! Pointwise Clifford algebra of oriented Euclidean ℝ⁴ on `W = W⁺ ⊕ W⁻`.
//!
//! Each gamma matrix is block off-diagonal,
//!
//! ```text
//!        ⎡ 0     −T_μ* ⎤
//!  γ_μ = ⎣ T_μ    0    ⎦      (W⁺ first, W⁻ second)
//! ```
//!
//! with `T₀ = 1`, `T₁ = iσ₃`, `T₂ = iσ₁`, `T₃ = iσ₂`. This gives
//! `γ_μγ_ν + γ_νγ_μ = −2δ_μν`, skew-adjoint `γ_μ`, and volume element
//! `γ₀γ₁γ₂γ₃ = −1` on `W⁺`, so self-dual 2-forms act on `W⁺` and
//! anti-self-dual ones annihilate it.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::forms::{TwoForm, PLANES};

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// Real covector in the oriented orthonormal coframe `e⁰..e³`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Covector(pub [f64; 4]);

impl Covector {
    pub const ZERO: Self = Self([0.0; 4]);

    pub fn basis(mu: usize) -> Self {
        let mut c = [0.0; 4];
        c[mu] = 1.0;
        Self(c)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }
}

impl Add for Covector {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl Sub for Covector {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl Mul<f64> for Covector {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self(self.0.map(|c| c * rhs))
    }
}

/// Values that live in a rank-2 complex spinor fiber. Lets the lattice
/// stencils run on both chiralities.
pub trait SpinorValue:
    Copy
    + Default
    + Add<Output = Self>
    + Sub<Output = Self>
    + Neg<Output = Self>
    + Mul<Complex64, Output = Self>
    + Mul<f64, Output = Self>
{
    fn components(&self) -> [Complex64; 2];
    fn from_components(c: [Complex64; 2]) -> Self;

    fn norm_sqr(&self) -> f64 {
        let [a, b] = self.components();
        a.norm_sqr() + b.norm_sqr()
    }

    /// Hermitian product, linear in `self`, conjugate-linear in `other`.
    fn inner(&self, other: &Self) -> Complex64 {
        let [a, b] = self.components();
        let [c, d] = other.components();
        a * c.conj() + b * d.conj()
    }

    fn real_inner(&self, other: &Self) -> f64 {
        self.inner(other).re
    }
}

macro_rules! spinor_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, Default, PartialEq)]
        pub struct $name(pub [Complex64; 2]);

        impl $name {
            pub const ZERO: Self = Self([ZERO, ZERO]);

            pub fn new(first: Complex64, second: Complex64) -> Self {
                Self([first, second])
            }

            pub fn norm(&self) -> f64 {
                SpinorValue::norm_sqr(self).sqrt()
            }

            /// Multiplication by `i`, the complex structure of the fiber.
            pub fn times_i(self) -> Self {
                self * I
            }
        }

        impl SpinorValue for $name {
            fn components(&self) -> [Complex64; 2] {
                self.0
            }
            fn from_components(c: [Complex64; 2]) -> Self {
                Self(c)
            }
        }

        impl Add for $name {
            type Output = Self;
            fn add(self, rhs: Self) -> Self {
                Self([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1]])
            }
        }

        impl AddAssign for $name {
            fn add_assign(&mut self, rhs: Self) {
                self.0[0] += rhs.0[0];
                self.0[1] += rhs.0[1];
            }
        }

        impl Sub for $name {
            type Output = Self;
            fn sub(self, rhs: Self) -> Self {
                Self([self.0[0] - rhs.0[0], self.0[1] - rhs.0[1]])
            }
        }

        impl SubAssign for $name {
            fn sub_assign(&mut self, rhs: Self) {
                self.0[0] -= rhs.0[0];
                self.0[1] -= rhs.0[1];
            }
        }

        impl Neg for $name {
            type Output = Self;
            fn neg(self) -> Self {
                Self([-self.0[0], -self.0[1]])
            }
        }

        impl Mul<Complex64> for $name {
            type Output = Self;
            fn mul(self, rhs: Complex64) -> Self {
                Self([self.0[0] * rhs, self.0[1] * rhs])
            }
        }

        impl Mul<f64> for $name {
            type Output = Self;
            fn mul(self, rhs: f64) -> Self {
                Self([self.0[0] * rhs, self.0[1] * rhs])
            }
        }
    };
}

spinor_type!(
    /// Positive (self-dual) spinor, a point of `W⁺`.
    SpinorPlus
);
spinor_type!(
    /// Negative spinor, a point of `W⁻`.
    SpinorMinus
);

/// 2×2 complex matrix, row-major.
pub type Block = [[Complex64; 2]; 2];

/// Complex 4×4 matrix acting on `W⁺ ⊕ W⁻`.
pub type Matrix4 = [[Complex64; 4]; 4];

/// The four `W⁺ → W⁻` blocks `T_μ` of a set of gamma matrices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaSet {
    pub blocks: [Block; 4],
}

/// The gamma matrices used throughout the crate.
pub const GAMMA: GammaSet = GammaSet {
    blocks: [
        [[ONE, ZERO], [ZERO, ONE]],
        [[I, ZERO], [ZERO, Complex64::new(0.0, -1.0)]],
        [[ZERO, I], [I, ZERO]],
        [[ZERO, ONE], [Complex64::new(-1.0, 0.0), ZERO]],
    ],
};

/// Sign `ε` in `γ(ω₁)γ(ω₂) = 2ε·γ(ω₃)` on `W⁺` for [`GAMMA`].
pub const QUATERNION_SIGN: f64 = 1.0;

fn apply(block: &Block, v: [Complex64; 2]) -> [Complex64; 2] {
    [
        block[0][0] * v[0] + block[0][1] * v[1],
        block[1][0] * v[0] + block[1][1] * v[1],
    ]
}

fn adjoint(block: &Block) -> Block {
    [
        [block[0][0].conj(), block[1][0].conj()],
        [block[0][1].conj(), block[1][1].conj()],
    ]
}

pub(crate) fn block_mul(a: &Block, b: &Block) -> Block {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j]))
}

impl GammaSet {
    /// Full 4×4 matrix of `γ_μ`.
    pub fn matrix(&self, mu: usize) -> Matrix4 {
        let t = &self.blocks[mu];
        let back = adjoint(t);
        let mut m = [[ZERO; 4]; 4];
        for i in 0..2 {
            for j in 0..2 {
                m[2 + i][j] = t[i][j];
                m[i][2 + j] = -back[i][j];
            }
        }
        m
    }

    /// `W⁺ → W⁺` block of `γ_iγ_j`, which is `−T_i* T_j`.
    pub fn pair_on_plus(&self, i: usize, j: usize) -> Block {
        let prod = block_mul(&adjoint(&self.blocks[i]), &self.blocks[j]);
        prod.map(|row| row.map(|z| -z))
    }

    /// `W⁻ → W⁻` block of `γ_iγ_j`, which is `−T_i T_j*`.
    pub fn pair_on_minus(&self, i: usize, j: usize) -> Block {
        let prod = block_mul(&self.blocks[i], &adjoint(&self.blocks[j]));
        prod.map(|row| row.map(|z| -z))
    }

    /// `W⁺` block of the Clifford action of a 2-form, `Σ_{i<j} β_ij γ_iγ_j`.
    pub fn two_form_on_plus(&self, beta: &TwoForm) -> Block {
        self.two_form_block(beta, |i, j| self.pair_on_plus(i, j))
    }

    /// `W⁻` block of the Clifford action of a 2-form.
    pub fn two_form_on_minus(&self, beta: &TwoForm) -> Block {
        self.two_form_block(beta, |i, j| self.pair_on_minus(i, j))
    }

    fn two_form_block(&self, beta: &TwoForm, pair: impl Fn(usize, usize) -> Block) -> Block {
        let mut out = [[ZERO; 2]; 2];
        for (k, &(i, j)) in PLANES.iter().enumerate() {
            let c = beta.0[k];
            if c == 0.0 {
                continue;
            }
            let p = pair(i, j);
            for r in 0..2 {
                for s in 0..2 {
                    out[r][s] += p[r][s] * c;
                }
            }
        }
        out
    }
}

/// Clifford multiplication `v·φ` of a covector on a positive spinor.
pub fn gamma_vec(v: &Covector, phi: &SpinorPlus) -> SpinorMinus {
    let mut out = [ZERO; 2];
    for (mu, t) in GAMMA.blocks.iter().enumerate() {
        let c = v.0[mu];
        if c != 0.0 {
            let w = apply(t, phi.0);
            out[0] += w[0] * c;
            out[1] += w[1] * c;
        }
    }
    SpinorMinus(out)
}

/// Clifford multiplication `v·ψ` of a covector on a negative spinor,
/// through the blocks `−T_μ*`.
pub fn gamma_vec_back(v: &Covector, psi: &SpinorMinus) -> SpinorPlus {
    let mut out = [ZERO; 2];
    for (mu, t) in GAMMA.blocks.iter().enumerate() {
        let c = v.0[mu];
        if c != 0.0 {
            let w = apply(&adjoint(t), psi.0);
            out[0] -= w[0] * c;
            out[1] -= w[1] * c;
        }
    }
    SpinorPlus(out)
}

/// Clifford action of a 2-form on `W⁺`. Anti-self-dual forms act as zero.
pub fn gamma_2form(beta: &TwoForm, phi: &SpinorPlus) -> SpinorPlus {
    SpinorPlus(apply(&GAMMA.two_form_on_plus(beta), phi.0))
}

/// Hermitian product on a spinor fiber (linear in the first slot).
pub fn inner<S: SpinorValue>(s: &S, t: &S) -> Complex64 {
    s.inner(t)
}

/// `Re⟨s, t⟩`, the real inner product on the underlying real fiber.
pub fn real_inner<S: SpinorValue>(s: &S, t: &S) -> f64 {
    s.real_inner(t)
}

#[cfg(test)]
pub(crate) fn mat_mul(a: &Matrix4, b: &Matrix4) -> Matrix4 {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| (0..4).fold(ZERO, |acc, k| acc + a[i][k] * b[k][j]))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::SdForm;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rand_spinor(rng: &mut ChaCha8Rng) -> SpinorPlus {
        SpinorPlus::new(
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        )
    }

    fn rand_covector(rng: &mut ChaCha8Rng) -> Covector {
        Covector(std::array::from_fn(|_| rng.gen_range(-1.0..1.0)))
    }

    fn block_close(a: &Block, b: &Block, tol: f64) -> bool {
        (0..2).all(|i| (0..2).all(|j| (a[i][j] - b[i][j]).norm() <= tol))
    }

    #[test]
    fn anticommutation_is_exact() {
        for mu in 0..4 {
            for nu in 0..4 {
                let a = mat_mul(&GAMMA.matrix(mu), &GAMMA.matrix(nu));
                let b = mat_mul(&GAMMA.matrix(nu), &GAMMA.matrix(mu));
                for i in 0..4 {
                    for j in 0..4 {
                        let expected = if mu == nu && i == j { -2.0 } else { 0.0 };
                        assert_eq!(a[i][j] + b[i][j], c(expected, 0.0));
                    }
                }
            }
        }
    }

    #[test]
    fn volume_element_splits_chiralities() {
        let g = |m| GAMMA.matrix(m);
        let vol = mat_mul(&mat_mul(&g(0), &g(1)), &mat_mul(&g(2), &g(3)));
        for i in 0..4 {
            for j in 0..4 {
                let expected = match (i == j, i < 2) {
                    (false, _) => 0.0,
                    (true, true) => -1.0,
                    (true, false) => 1.0,
                };
                assert_eq!(vol[i][j], c(expected, 0.0));
            }
        }
    }

    #[test]
    fn gamma_vec_basis_examples() {
        let phi = SpinorPlus::new(ONE, ZERO);
        assert_eq!(gamma_vec(&Covector::basis(0), &phi), SpinorMinus::new(ONE, ZERO));
        assert_eq!(gamma_vec(&Covector::ZERO, &phi), SpinorMinus::ZERO);
        let psi = SpinorMinus::new(ONE, ZERO);
        assert_eq!(gamma_vec_back(&Covector::basis(0), &psi), SpinorPlus::new(-ONE, ZERO));
        assert_eq!(gamma_vec_back(&Covector::ZERO, &psi), SpinorPlus::ZERO);
    }

    #[test]
    fn clifford_square_and_skew_adjointness() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let v = rand_covector(&mut rng);
            let phi = rand_spinor(&mut rng);
            let twice = gamma_vec_back(&v, &gamma_vec(&v, &phi));
            let expected = phi * (-v.norm_sqr());
            assert!((twice - expected).norm() < 1e-14);

            let psi = SpinorMinus(rand_spinor(&mut rng).0);
            let lhs = inner(&gamma_vec(&v, &phi), &psi) + inner(&phi, &gamma_vec_back(&v, &psi));
            assert!(lhs.norm() < 1e-14);
        }
    }

    #[test]
    fn fundamental_form_eigenvector() {
        let omega1 = SdForm([1.0, 0.0, 0.0]).to_two_form();
        let out = gamma_2form(&omega1, &SpinorPlus::new(ONE, ZERO));
        assert_eq!(out, SpinorPlus::new(c(0.0, -2.0), ZERO));
    }

    #[test]
    fn self_dual_and_anti_self_dual_actions() {
        let identity: Block = [[ONE, ZERO], [ZERO, ONE]];
        let zero: Block = [[ZERO; 2]; 2];
        let mut sd_blocks = Vec::new();
        for k in 0..3 {
            let mut s = [0.0; 3];
            s[k] = 1.0;
            let omega = SdForm(s).to_two_form();
            let asd = crate::forms::asd_basis(k);
            assert!(block_close(&GAMMA.two_form_on_minus(&omega), &zero, 0.0));
            assert!(block_close(&GAMMA.two_form_on_plus(&asd), &zero, 0.0));

            let b = GAMMA.two_form_on_plus(&omega);
            let sq = block_mul(&b, &b);
            assert!(block_close(&sq, &identity.map(|r| r.map(|z| z * -4.0)), 0.0));
            assert_eq!(b[0][0] + b[1][1], ZERO);
            sd_blocks.push(b);
        }
        let prod = block_mul(&sd_blocks[0], &sd_blocks[1]);
        let expected = sd_blocks[2].map(|r| r.map(|z| z * (2.0 * QUATERNION_SIGN)));
        assert!(block_close(&prod, &expected, 0.0));
    }

    #[test]
    fn inner_product_conventions() {
        let e1 = SpinorPlus::new(ONE, ZERO);
        let e2 = SpinorPlus::new(ZERO, ONE);
        assert_eq!(inner(&e1, &e1), ONE);
        assert_eq!(inner(&e1, &e2), ZERO);
        let phi = SpinorPlus::new(c(0.3, -1.2), c(2.0, 0.5));
        assert_eq!(real_inner(&phi, &phi.times_i()), 0.0);
        // Linear in the first slot.
        let z = inner(&phi.times_i(), &phi);
        assert!(z.re.abs() < 1e-15 && (z.im - phi.norm().powi(2)).abs() < 1e-14);
    }
}
