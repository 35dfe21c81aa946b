//! The squaring map `σ: W⁺ → Λ⁺`.
//!
//! `σ(φ) = κ Σ_k Re⟨iγ(ω_k)φ, φ⟩ ω_k`. With the default `κ = ½` this is
//! `σ(φ) = Σ_k ⟨τ_kφ, φ⟩ ω_k` for Pauli-type matrices `τ = (σ₃, σ₁, σ₂)`,
//! so `σ((1,0)) = ω₁`, `|σ(φ)| = √2|φ|²` and the coefficient vector of
//! `σ(φ)` is `|φ|²` times the Bloch direction of `φ`.

use num_complex::Complex64;

use crate::clifford::{gamma_2form, real_inner, SpinorPlus, SpinorValue, ZERO};
use crate::forms::SdForm;
use crate::grid::Field;
use crate::topology::{self, DegreeVector};
use crate::{Error, Result};

/// Normalization of [`sigma`].
pub const DEFAULT_KAPPA: f64 = 0.5;

/// Largest nearest-neighbor phase jump accepted by [`field_preimage`].
pub const MAX_PHASE_JUMP: f64 = std::f64::consts::FRAC_PI_2;

/// `σ_κ(φ) = κ Σ_k Re⟨iγ(ω_k)φ, φ⟩ ω_k`.
pub fn sigma_with_kappa(phi: &SpinorPlus, kappa: f64) -> SdForm {
    SdForm(std::array::from_fn(|k| {
        let omega = SdForm::basis(k).to_two_form();
        kappa * real_inner(&gamma_2form(&omega, phi).times_i(), phi)
    }))
}

pub fn sigma(phi: &SpinorPlus) -> SdForm {
    let [a, b] = phi.0;
    let ab = a.conj() * b;
    // Closed form of sigma_with_kappa(phi, 0.5).
    SdForm([a.norm_sqr() - b.norm_sqr(), 2.0 * ab.re, 2.0 * ab.im])
}

/// `|φ|²` and the unit direction of `σ(φ)` in the `ω_k` basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochData {
    pub r: f64,
    /// `None` when `φ = 0`.
    pub n: Option<[f64; 3]>,
}

pub fn bloch(phi: &SpinorPlus) -> BlochData {
    let r = phi.norm_sqr();
    if r == 0.0 {
        return BlochData { r, n: None };
    }
    let s = sigma(phi).0;
    let len = (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt();
    BlochData {
        r,
        n: Some(s.map(|c| c / len)),
    }
}

/// Spinor `φ` with `σ(φ) = α`, phase fixed so the first component is real
/// and non-negative (the second, when the first vanishes).
pub fn pointwise_preimage(alpha: &SdForm, tol: f64) -> Result<SpinorPlus> {
    let modulus = alpha.norm();
    if !(modulus > tol) {
        return Err(Error::DegenerateForm {
            site: None,
            modulus,
            tol,
        });
    }
    let [s1, s2, s3] = alpha.0;
    let r = alpha.coeff_norm();
    // |a|² = (r + s₁)/2, |b|² = (r − s₁)/2, 2·conj(a)·b = s₂ + i s₃.
    let w = Complex64::new(s2, s3);
    let phi = if s1 >= 0.0 {
        let a = ((r + s1) / 2.0).sqrt();
        SpinorPlus::new(Complex64::new(a, 0.0), w / (2.0 * a))
    } else {
        let b = ((r - s1) / 2.0).sqrt();
        let a = w.conj() / (2.0 * b);
        let spinor = SpinorPlus::new(a, Complex64::new(b, 0.0));
        if a.norm() > 0.0 {
            spinor * (a.conj() / a.norm())
        } else {
            spinor
        }
    };
    Ok(canonical_phase(phi))
}

fn canonical_phase(phi: SpinorPlus) -> SpinorPlus {
    let [a, b] = phi.0;
    let lead = if a != ZERO { a } else { b };
    if lead == ZERO {
        return phi;
    }
    let mut out = phi * (lead.conj() / lead.norm());
    // Exact zero imaginary part on the pivot.
    if a != ZERO {
        out.0[0] = Complex64::new(out.0[0].norm(), 0.0);
    } else {
        out.0[1] = Complex64::new(out.0[1].norm(), 0.0);
    }
    out
}

/// Why a global preimage could not be assembled.
#[derive(Clone, Debug, PartialEq)]
pub struct ObstructionReport {
    /// Sphere-map degrees of the form over the six coordinate 2-tori (slice 0).
    pub degrees: DegreeVector,
    /// Largest nearest-neighbor phase jump after continuation.
    pub max_jump: f64,
    /// Site pair carrying `max_jump`.
    pub edge: (usize, usize),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Preimage {
    Lifted(Field<SpinorPlus>),
    Obstructed(ObstructionReport),
}

/// Phase of `⟨φ(y), φ(x)⟩`, in `[0, π]`.
fn phase_jump(x: &SpinorPlus, y: &SpinorPlus) -> f64 {
    let z = y.inner(x);
    if z.norm() == 0.0 {
        std::f64::consts::PI
    } else {
        z.arg().abs()
    }
}

/// Global spinor field with `σ(φ) = α`, assembled by greedy phase
/// continuation along the lexicographic site order. Each site is aligned
/// with its backward neighbor along the fastest axis whose coordinate is
/// nonzero; continuation fails when any nearest-neighbor phase jump exceeds
/// [`MAX_PHASE_JUMP`], and the degree data of `α` is reported instead.
pub fn field_preimage(alpha: &Field<SdForm>, tol: f64) -> Result<Preimage> {
    let grid = *alpha.grid();
    let mut phi = Vec::with_capacity(grid.num_sites());
    for (site, a) in alpha.iter().enumerate() {
        let local = pointwise_preimage(a, tol).map_err(|e| match e {
            Error::DegenerateForm { modulus, tol, .. } => Error::DegenerateForm {
                site: Some(site),
                modulus,
                tol,
            },
            other => other,
        })?;
        let coords = grid.coords(site);
        let aligned = match (0..4).rev().find(|&mu| coords[mu] > 0) {
            None => local,
            Some(mu) => {
                let parent: &SpinorPlus = &phi[grid.backward(site, mu)];
                let overlap = local.inner(parent);
                if overlap.norm() > 0.0 {
                    local * (overlap.conj() / overlap.norm())
                } else {
                    local
                }
            }
        };
        phi.push(aligned);
    }

    let mut max_jump = 0.0;
    let mut edge = (0, 0);
    for x in 0..grid.num_sites() {
        for mu in 0..4 {
            let y = grid.forward(x, mu);
            let jump = phase_jump(&phi[x], &phi[y]);
            if jump > max_jump {
                max_jump = jump;
                edge = (x, y);
            }
        }
    }
    if max_jump > MAX_PHASE_JUMP {
        let n = topology::sphere_map(alpha, tol)?;
        let degrees = topology::degree_vector(&n, [0; 4])?;
        return Ok(Preimage::Obstructed(ObstructionReport {
            degrees,
            max_jump,
            edge,
        }));
    }
    Ok(Preimage::Lifted(Field::from_vec(grid, phi)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::ONE;
    use crate::forms::{asd_project, hodge_star2, wedge22};
    use crate::grid::Grid;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn spinor() -> impl Strategy<Value = SpinorPlus> {
        prop::array::uniform4(-2.0f64..2.0).prop_map(|v| SpinorPlus::new(c(v[0], v[1]), c(v[2], v[3])))
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma(&SpinorPlus::new(ONE, ZERO)), SdForm::basis(0));
        assert_eq!(sigma(&SpinorPlus::new(ZERO, ONE)), SdForm([-1.0, 0.0, 0.0]));
        assert_eq!(sigma(&SpinorPlus::ZERO), SdForm::ZERO);
        assert_eq!(sigma_with_kappa(&SpinorPlus::new(ONE, ZERO), DEFAULT_KAPPA), SdForm::basis(0));
    }

    #[test]
    fn bloch_examples() {
        let b = bloch(&SpinorPlus::new(ONE, ZERO));
        assert_eq!(b, BlochData { r: 1.0, n: Some([1.0, 0.0, 0.0]) });
        let b = bloch(&SpinorPlus::new(ZERO, ONE));
        assert_eq!(b, BlochData { r: 1.0, n: Some([-1.0, 0.0, 0.0]) });
        assert_eq!(bloch(&SpinorPlus::ZERO).n, None);
    }

    #[test]
    fn preimage_examples() {
        assert_eq!(pointwise_preimage(&SdForm::basis(0), 1e-12).unwrap(), SpinorPlus::new(ONE, ZERO));
        assert_eq!(pointwise_preimage(&SdForm([-1.0, 0.0, 0.0]), 1e-12).unwrap(), SpinorPlus::new(ZERO, ONE));
        assert!(matches!(
            pointwise_preimage(&SdForm::ZERO, 1e-12),
            Err(Error::DegenerateForm { .. })
        ));
    }

    #[test]
    fn constant_field_lifts() {
        let grid = Grid::cubic(4).unwrap();
        let alpha = Field::constant(grid, SdForm::basis(1));
        match field_preimage(&alpha, 1e-10).unwrap() {
            Preimage::Lifted(phi) => {
                for p in phi.iter() {
                    assert!((sigma(p) - SdForm::basis(1)).coeff_norm() < 1e-14);
                    assert_eq!(*p, phi[0]);
                }
            }
            Preimage::Obstructed(r) => panic!("unexpected obstruction {r:?}"),
        }
    }

    #[test]
    fn field_preimage_names_degenerate_site() {
        let grid = Grid::cubic(4).unwrap();
        let mut alpha = Field::constant(grid, SdForm::basis(0));
        alpha[7] = SdForm::ZERO;
        match field_preimage(&alpha, 1e-10) {
            Err(Error::DegenerateForm { site, .. }) => assert_eq!(site, Some(7)),
            other => panic!("expected DegenerateForm, got {other:?}"),
        }
    }

    proptest! {
        #[test]
        fn sigma_laws(phi in spinor(), theta in -4.0f64..4.0) {
            let s = sigma(&phi);
            let two = s.to_two_form();
            prop_assert!((hodge_star2(&two) - two).norm() <= 1e-14 * (1.0 + two.norm()));
            prop_assert_eq!(asd_project(&two).norm(), 0.0);
            let n2 = phi.norm_sqr();
            prop_assert!((s.norm() - std::f64::consts::SQRT_2 * n2).abs() < 1e-12 * (1.0 + n2));
            prop_assert!((wedge22(&two, &two) - 2.0 * n2 * n2).abs() < 1e-12 * (1.0 + n2 * n2));
            let rotated = sigma(&(phi * Complex64::from_polar(1.0, theta)));
            prop_assert!((rotated - s).coeff_norm() < 1e-12 * (1.0 + n2));
            let general = sigma_with_kappa(&phi, DEFAULT_KAPPA);
            prop_assert!((general - s).coeff_norm() < 1e-12 * (1.0 + n2));
        }

        #[test]
        fn preimage_round_trip_up_to_phase(phi in spinor()) {
            prop_assume!(phi.norm_sqr() > 1e-6);
            let s = sigma(&phi);
            let back = pointwise_preimage(&s, 1e-12).unwrap();
            prop_assert!((sigma(&back) - s).coeff_norm() < 1e-10 * (1.0 + s.coeff_norm()));
            // Equal Bloch data forces equality up to phase.
            let overlap = phi.inner(&back);
            prop_assert!((overlap.norm() - phi.norm_sqr()).abs() < 1e-10 * phi.norm_sqr());
            let [a, b] = back.0;
            if a != ZERO {
                prop_assert!(a.im == 0.0 && a.re > 0.0);
            } else {
                prop_assert!(b.im == 0.0 && b.re >= 0.0);
            }
        }
    }
}
