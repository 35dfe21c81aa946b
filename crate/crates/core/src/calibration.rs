//! Spectral oracle for the normalization of the differential identity
//!
//! ```text
//! |φ|²·D^Aφ = ε·i(2·d*σ_κ(φ) + ⟨∇^Aφ, iφ⟩)·φ.
//! ```
//!
//! Smooth band-limited `(φ, A)` are sampled on a grid and every derivative is
//! taken spectrally (FFT along each axis line), so the only error left is
//! roundoff. Writing `X = 2·d*σ₁(φ)·(iφ)` and `Y = ⟨∇^Aφ, iφ⟩·(iφ)` (both
//! Clifford products), the left side is fitted as `c₁X + c₂Y` by least
//! squares; then `ε = sign c₂` and `κ = c₁/c₂`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::clifford::{gamma_vec, Covector, SpinorMinus, SpinorPlus, SpinorValue};
use crate::forms::SdForm;
use crate::grid::Grid;
use crate::smooth::{random_one_form, TrigSpinor};
use crate::squaring::sigma_with_kappa;
use crate::{pairwise_sum, Error, Result};

/// Spectral `∂_μ` of a periodic complex scalar sampled on `grid`, with the
/// Nyquist mode dropped.
pub fn spectral_derivative(grid: &Grid, values: &[Complex64], mu: usize) -> Vec<Complex64> {
    let n = grid.dims()[mu];
    let stride = grid.stride(mu);
    let period = grid.periods()[mu];
    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for start in 0..values.len() {
        // A line starts at every site whose coordinate along `mu` is zero.
        if !(start / stride).is_multiple_of(n) {
            continue;
        }
        for (j, v) in line.iter_mut().enumerate() {
            *v = values[start + j * stride];
        }
        forward.process(&mut line);
        for (j, v) in line.iter_mut().enumerate() {
            let k = if j < n / 2 {
                j as f64
            } else if j == n / 2 {
                0.0
            } else {
                j as f64 - n as f64
            };
            *v *= Complex64::new(0.0, 2.0 * PI * k / period) / n as f64;
        }
        inverse.process(&mut line);
        for (j, v) in line.iter().enumerate() {
            out[start + j * stride] = *v;
        }
    }
    out
}

fn real_derivative(grid: &Grid, values: &[f64], mu: usize) -> Vec<f64> {
    let c: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    spectral_derivative(grid, &c, mu).into_iter().map(|z| z.re).collect()
}

/// Per-site ingredients of the identity, all evaluated spectrally.
pub struct IdentityTerms {
    /// `|φ|²·D^Aφ`.
    pub lhs: Vec<SpinorMinus>,
    /// `2·d*σ₁(φ)·(iφ)`, with `σ₁` the squaring map at `κ = 1`.
    pub x: Vec<SpinorMinus>,
    /// `⟨∇^Aφ, iφ⟩·(iφ)`.
    pub y: Vec<SpinorMinus>,
}

/// Evaluate the identity terms for the smooth pair `(φ, A)` on `grid`
/// (periods scaled so the fields are 1-periodic in each unit coordinate),
/// with `∇^A = ∂ + iA`.
pub fn identity_terms(grid: &Grid, phi: &TrigSpinor, potential: impl Fn([f64; 4]) -> [f64; 4]) -> IdentityTerms {
    let periods = grid.periods();
    let sites = grid.num_sites();
    let unit = |x: [f64; 4]| -> [f64; 4] { std::array::from_fn(|mu| x[mu] / periods[mu]) };
    let points: Vec<[f64; 4]> = (0..sites).map(|s| unit(grid.position(grid.coords(s)))).collect();
    let values: Vec<SpinorPlus> = points.iter().map(|&x| phi.eval(x)).collect();
    let pots: Vec<[f64; 4]> = points.iter().map(|&x| potential(x)).collect();

    let components: [Vec<Complex64>; 2] = std::array::from_fn(|c| values.iter().map(|p| p.0[c]).collect());
    // ∇_μφ = ∂_μφ + iA_μφ; A is given in unit coordinates, rescaled with ∂.
    let mut cov: Vec<[SpinorPlus; 4]> = vec![[SpinorPlus::ZERO; 4]; sites];
    for mu in 0..4 {
        let d0 = spectral_derivative(grid, &components[0], mu);
        let d1 = spectral_derivative(grid, &components[1], mu);
        for s in 0..sites {
            let a = Complex64::new(0.0, pots[s][mu] / periods[mu]);
            cov[s][mu] = SpinorPlus::new(d0[s], d1[s]) + values[s] * a;
        }
    }

    let sig: Vec<SdForm> = values.iter().map(|p| sigma_with_kappa(p, 1.0)).collect();
    let two: Vec<_> = sig.iter().map(SdForm::to_two_form).collect();
    let mut dstar = vec![[0.0; 4]; sites];
    for mu in 0..4 {
        for nu in 0..4 {
            if mu == nu {
                continue;
            }
            let comp: Vec<f64> = two.iter().map(|t| t.component(mu, nu)).collect();
            let d = real_derivative(grid, &comp, mu);
            for s in 0..sites {
                dstar[s][nu] -= d[s];
            }
        }
    }

    let mut lhs = Vec::with_capacity(sites);
    let mut x = Vec::with_capacity(sites);
    let mut y = Vec::with_capacity(sites);
    for s in 0..sites {
        let p = values[s];
        let ip = p.times_i();
        let dirac = (0..4).fold(SpinorMinus::ZERO, |acc, mu| acc + gamma_vec(&Covector::basis(mu), &cov[s][mu]));
        lhs.push(dirac * p.norm_sqr());
        x.push(gamma_vec(&Covector(dstar[s].map(|v| 2.0 * v)), &ip));
        let t = Covector(std::array::from_fn(|nu| cov[s][nu].real_inner(&ip)));
        y.push(gamma_vec(&t, &ip));
    }
    IdentityTerms { lhs, x, y }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CalibrationFit {
    pub seed: u64,
    /// Fitted coefficient of `X`, equal to `ε·κ`.
    pub c_sigma: f64,
    /// Fitted coefficient of `Y`, equal to `ε`.
    pub c_transverse: f64,
    pub kappa: f64,
    pub epsilon: f64,
    /// `‖lhs − c₁X − c₂Y‖ / ‖lhs‖`.
    pub residual: f64,
}

fn real_parts(v: &[SpinorMinus]) -> Vec<f64> {
    v.iter().flat_map(|s| [s.0[0].re, s.0[0].im, s.0[1].re, s.0[1].im]).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let p: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
    pairwise_sum(&p)
}

/// Least-squares fit of one seeded random pair on `grid`.
pub fn fit(grid: &Grid, seed: u64) -> Result<CalibrationFit> {
    let phi = TrigSpinor::random(seed, 1, 0.5);
    let a = random_one_form(seed.wrapping_add(0x5eed), 1, 0.5);
    let terms = identity_terms(grid, &phi, |x| a.eval(x));
    let (l, x, y) = (real_parts(&terms.lhs), real_parts(&terms.x), real_parts(&terms.y));
    let (xx, xy, yy) = (dot(&x, &x), dot(&x, &y), dot(&y, &y));
    let (xl, yl) = (dot(&x, &l), dot(&y, &l));
    let det = xx * yy - xy * xy;
    if !(det.abs() > 1e-12 * xx * yy) {
        return Err(Error::DegenerateForm {
            site: None,
            modulus: det,
            tol: 1e-12 * xx * yy,
        });
    }
    let c1 = (yy * xl - xy * yl) / det;
    let c2 = (xx * yl - xy * xl) / det;
    let resid: Vec<f64> = (0..l.len()).map(|i| l[i] - c1 * x[i] - c2 * y[i]).collect();
    let residual = dot(&resid, &resid).sqrt() / dot(&l, &l).sqrt();
    Ok(CalibrationFit {
        seed,
        c_sigma: c1,
        c_transverse: c2,
        kappa: c1 / c2,
        epsilon: c2.signum(),
        residual,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Calibration {
    pub fits: Vec<CalibrationFit>,
    pub kappa: f64,
    pub epsilon: f64,
    /// `max κ − min κ` over the trials.
    pub kappa_spread: f64,
    pub max_residual: f64,
    /// Every trial agrees on `ε`.
    pub epsilon_consistent: bool,
}

/// Fits for seeds `seed, seed+1, …, seed+trials−1`.
pub fn calibrate(grid: &Grid, seed: u64, trials: usize) -> Result<Calibration> {
    if trials == 0 {
        return Err(Error::InvalidGrid("calibration needs at least one trial".into()));
    }
    let fits: Vec<CalibrationFit> = (0..trials as u64).map(|t| fit(grid, seed + t)).collect::<Result<_>>()?;
    let kappas: Vec<f64> = fits.iter().map(|f| f.kappa).collect();
    let lo = kappas.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = kappas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(Calibration {
        kappa: pairwise_sum(&kappas) / kappas.len() as f64,
        epsilon: fits[0].epsilon,
        kappa_spread: hi - lo,
        max_residual: fits.iter().map(|f| f.residual).fold(0.0, f64::max),
        epsilon_consistent: fits.iter().all(|f| f.epsilon == fits[0].epsilon),
        fits,
    })
}
