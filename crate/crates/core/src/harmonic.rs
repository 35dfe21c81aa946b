//! Harmonic spinors and the Kähler / symplectic pipelines.
//!
//! [`solve_smallest`] runs inverse power iteration on `D†D + shift` with
//! conjugate-gradient inner solves. Pipelines take a pair `(A, φ)`, square
//! `φ` into `α = σ(φ)` and measure every condition that makes `α` a
//! symplectic (resp. Kähler) form: harmonicity, transversality
//! `⟨∇^Aφ, iφ⟩ = 0`, nowhere-vanishing, closedness of `α`, and the
//! compatible almost-complex structure.

use num_complex::Complex64;
use serde::Serialize;

use crate::clifford::SpinorValue;
use crate::forms::{acs_from_sd, conformal_factor, Acs, SdForm};
use crate::grid::Field;
use crate::lattice::{
    corollary_form, cov_deriv, d2, dirac, dirac_normal, inner_one_form, l2_inner, l2_norm, sigma_field,
    SpinorField, U1Connection,
};
use crate::smooth::smooth_start;
use crate::topology::{degree_vector, sphere_map, DegreeVector};
use crate::{pairwise_sum, Error, Result};

/// Modulus floor, relative to the mean modulus, below which a field counts
/// as vanishing somewhere.
pub const NOWHERE_ZERO_RATIO: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveReport {
    /// `⟨D†Dφ, φ⟩` for unit `φ`.
    pub rayleigh: f64,
    /// `‖D^Aφ‖ / (‖D‖_bound·‖φ‖)`.
    pub dirac_rel_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Rayleigh quotient after each outer iteration, starting vector first.
    pub rayleigh_history: Vec<f64>,
    pub cg_iterations: usize,
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub tol: f64,
    pub maxiter: usize,
    pub seed: u64,
    pub shift: f64,
    pub cg_tol: f64,
    pub cg_maxiter: usize,
    /// Start vector; a seeded smooth random field when absent.
    pub start: Option<SpinorField>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            maxiter: 200,
            seed: 0,
            shift: 1e-8,
            cg_tol: 1e-12,
            cg_maxiter: 5000,
            start: None,
        }
    }
}

fn axpy(y: &mut SpinorField, a: Complex64, x: &SpinorField) {
    for (yi, xi) in y.data_mut().iter_mut().zip(x.iter()) {
        *yi += *xi * a;
    }
}

fn scale(x: &mut SpinorField, a: f64) {
    for v in x.data_mut() {
        *v = *v * a;
    }
}

/// Modified Gram–Schmidt against `basis` (assumed orthonormal), run twice.
fn orthogonalize(x: &mut SpinorField, basis: &[SpinorField]) {
    for _ in 0..2 {
        for b in basis {
            let c = l2_inner(x, b);
            axpy(x, -c, b);
        }
    }
}

fn normalize(x: &mut SpinorField) -> Result<()> {
    let n = l2_norm(x);
    if !(n > 0.0) {
        return Err(Error::ZeroField);
    }
    scale(x, 1.0 / n);
    Ok(())
}

/// Solve `(D†D + shift)·y = b` by conjugate gradients from `y = 0`.
/// Returns the solution and the iteration count.
pub fn cg_solve(a: &U1Connection, b: &SpinorField, shift: f64, tol: f64, maxiter: usize) -> Result<(SpinorField, usize)> {
    let apply = |v: &SpinorField| -> Result<SpinorField> {
        let mut out = dirac_normal(a, v)?;
        axpy(&mut out, Complex64::new(shift, 0.0), v);
        Ok(out)
    };
    let mut y = crate::lattice::zeros(*b.grid());
    let mut r = b.clone();
    let mut p = r.clone();
    let b_norm = l2_norm(b);
    let mut rr = l2_inner(&r, &r).re;
    if b_norm == 0.0 {
        return Ok((y, 0));
    }
    for it in 1..=maxiter {
        let ap = apply(&p)?;
        let pap = l2_inner(&p, &ap).re;
        if !(pap > 0.0) {
            return Ok((y, it));
        }
        let alpha = rr / pap;
        axpy(&mut y, Complex64::new(alpha, 0.0), &p);
        axpy(&mut r, Complex64::new(-alpha, 0.0), &ap);
        let rr_new = l2_inner(&r, &r).re;
        if rr_new.sqrt() <= tol * b_norm {
            return Ok((y, it));
        }
        let beta = rr_new / rr;
        rr = rr_new;
        for (pi, ri) in p.data_mut().iter_mut().zip(r.iter()) {
            *pi = *ri + *pi * beta;
        }
    }
    Ok((y, maxiter))
}

fn rayleigh(a: &U1Connection, x: &SpinorField) -> Result<f64> {
    let d = dirac(a, x)?;
    Ok(l2_norm(&d).powi(2))
}

/// Smallest eigenpair of `D†D` orthogonal to `deflate` (an orthonormal set).
///
/// Converged when the Rayleigh quotient moves by less than `tol·‖D‖²_bound`
/// and the eigenpair residual `‖D†Dφ − λφ‖` is below `√tol·‖D‖²_bound`.
/// Returns [`Error::NotConverged`] after `maxiter` outer iterations.
pub fn solve_smallest(a: &U1Connection, opts: &SolveOptions, deflate: &[SpinorField]) -> Result<(SpinorField, SolveReport)> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidGrid(format!("solver tolerance must be positive, got {}", opts.tol)));
    }
    let grid = *a.grid();
    for d in deflate {
        grid.check_same(d.grid())?;
    }
    let mut x = match &opts.start {
        Some(s) => {
            grid.check_same(s.grid())?;
            s.clone()
        }
        None => smooth_start(grid, opts.seed),
    };
    orthogonalize(&mut x, deflate);
    normalize(&mut x)?;

    let bound = grid.dirac_norm_bound();
    let op_scale = bound * bound;
    let mut lambda = rayleigh(a, &x)?;
    let mut history = vec![lambda];
    let mut cg_total = 0;
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=opts.maxiter {
        iterations = it;
        let (mut y, cg_its) = cg_solve(a, &x, opts.shift, opts.cg_tol, opts.cg_maxiter)?;
        cg_total += cg_its;
        orthogonalize(&mut y, deflate);
        normalize(&mut y)?;
        x = y;
        let new_lambda = rayleigh(a, &x)?;
        history.push(new_lambda);
        let mut resid = dirac_normal(a, &x)?;
        axpy(&mut resid, Complex64::new(-new_lambda, 0.0), &x);
        let eig_resid = l2_norm(&resid);
        let change = (new_lambda - lambda).abs();
        lambda = new_lambda;
        if change < opts.tol * op_scale && eig_resid < opts.tol.sqrt() * op_scale {
            converged = true;
            break;
        }
    }
    let report = SolveReport {
        rayleigh: lambda,
        dirac_rel_residual: dirac_rel_residual(a, &x)?,
        iterations,
        converged,
        rayleigh_history: history,
        cg_iterations: cg_total,
    };
    if !converged {
        return Err(Error::NotConverged { report });
    }
    Ok((x, report))
}

/// The `count` lowest modes, each deflated against those found before.
pub fn solve_modes(a: &U1Connection, count: usize, opts: &SolveOptions) -> Result<Vec<(SpinorField, SolveReport)>> {
    let mut found: Vec<SpinorField> = Vec::new();
    let mut out = Vec::new();
    for k in 0..count {
        let mut o = opts.clone();
        o.seed = opts.seed.wrapping_add(k as u64);
        if k > 0 {
            o.start = None;
        }
        let (phi, report) = solve_smallest(a, &o, &found)?;
        found.push(phi.clone());
        out.push((phi, report));
    }
    Ok(out)
}

/// `‖D^Aφ‖ / (‖D‖_bound·‖φ‖)`.
pub fn dirac_rel_residual(a: &U1Connection, phi: &SpinorField) -> Result<f64> {
    let n = l2_norm(phi);
    if !(n > 0.0) {
        return Err(Error::ZeroField);
    }
    Ok(l2_norm(&dirac(a, phi)?) / (a.grid().dirac_norm_bound() * n))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ParallelCheck {
    pub parallel: bool,
    /// `(Σ_μ‖∇_μφ‖²)^{1/2} / ‖φ‖`.
    pub defect: f64,
}

pub fn is_parallel(a: &U1Connection, phi: &SpinorField, tol: f64) -> Result<ParallelCheck> {
    let n = l2_norm(phi);
    if !(n > 0.0) {
        return Err(Error::ZeroField);
    }
    let mut total = 0.0;
    for mu in 0..4 {
        total += l2_norm(&cov_deriv(a, phi, mu)?).powi(2);
    }
    let defect = total.sqrt() / n;
    Ok(ParallelCheck {
        parallel: defect < tol,
        defect,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineReport {
    pub dirac_rel_residual: f64,
    /// L² norm of `⟨∇^Aφ, iφ⟩`.
    pub transversality_norm: f64,
    pub min_modulus: f64,
    pub mean_modulus: f64,
    pub nowhere_zero: bool,
    /// L² norm of `dσ(φ)`.
    pub closedness_residual: f64,
    /// Largest entry of `J² + Id` over sites; absent when `φ` has zeros.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub acs_defect: Option<f64>,
    /// Sphere-map degrees of `σ(φ)`; absent when `φ` has zeros or the
    /// degree is not resolved at this grid size.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree_vector: Option<DegreeVector>,
    /// L² norm of `2d*σ(φ) + ⟨∇^Aφ, iφ⟩` at the calibrated normalization.
    pub corollary_residual: f64,
    /// Smallest and largest conformal factor of `σ(φ)` over sites.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conformal_factor_range: Option<(f64, f64)>,
}

/// `α = σ(φ)` and every condition for it to be a symplectic form
/// compatible with a metric conformal to the flat one.
pub fn symplectic_pipeline(a: &U1Connection, phi: &SpinorField) -> Result<PipelineReport> {
    a.grid().check_same(phi.grid())?;
    let moduli: Vec<f64> = phi.iter().map(|p| p.norm_sqr().sqrt()).collect();
    let min_modulus = moduli.iter().copied().fold(f64::INFINITY, f64::min);
    let mean_modulus = pairwise_sum(&moduli) / moduli.len() as f64;
    let nowhere_zero = mean_modulus > 0.0 && min_modulus > NOWHERE_ZERO_RATIO * mean_modulus;

    let alpha = sigma_field(phi);
    let closedness = d2(&alpha.map(SdForm::to_two_form)).l2_norm_by(|t| t.norm_sqr());
    let transversality = inner_one_form(a, phi)?.l2_norm_by(|v| v.norm_sqr());
    let corollary = corollary_form(a, phi)?.l2_norm_by(|v| v.norm_sqr());
    let dirac_rel = if mean_modulus > 0.0 { dirac_rel_residual(a, phi)? } else { 0.0 };

    let (acs_defect, degrees, range) = if nowhere_zero {
        let tol = 1e-10 * alpha.max_by(|s| s.norm());
        let mut worst: f64 = 0.0;
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for s in alpha.iter() {
            worst = worst.max(acs_from_sd(s, tol)?.square_defect());
            let c = conformal_factor(s)?;
            lo = lo.min(c);
            hi = hi.max(c);
        }
        let degrees = sphere_map(&alpha, tol).and_then(|n| degree_vector(&n, [0; 4])).ok();
        (Some(worst), degrees, Some((lo, hi)))
    } else {
        (None, None, None)
    };

    Ok(PipelineReport {
        dirac_rel_residual: dirac_rel,
        transversality_norm: transversality,
        min_modulus,
        mean_modulus,
        nowhere_zero,
        closedness_residual: closedness,
        acs_defect,
        degree_vector: degrees,
        corollary_residual: corollary,
        conformal_factor_range: range,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KahlerReport {
    pub pipeline: PipelineReport,
    pub parallel: ParallelCheck,
    /// Largest deviation of `σ(φ)` from its value at site 0 (as a 2-form).
    pub sigma_deviation: f64,
    /// Site variance of the conformal factor of `σ(φ)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conformal_factor_variance: Option<f64>,
    /// Almost-complex structure at site 0; constant when `φ` is parallel.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub acs: Option<[[f64; 4]; 4]>,
}

/// Symplectic pipeline plus the parallel-spinor checks for the Kähler case.
pub fn kahler_pipeline(a: &U1Connection, phi: &SpinorField, parallel_tol: f64) -> Result<KahlerReport> {
    let pipeline = symplectic_pipeline(a, phi)?;
    let parallel = is_parallel(a, phi, parallel_tol)?;
    let alpha = sigma_field(phi);
    let n = alpha.data().len() as f64;
    let first = alpha[0];
    let sigma_deviation = alpha.max_by(|s| (*s - first).norm());

    let (variance, acs) = if pipeline.nowhere_zero {
        let factors: Vec<f64> = alpha.iter().map(conformal_factor).collect::<Result<_>>()?;
        let m = pairwise_sum(&factors) / n;
        let sq: Vec<f64> = factors.iter().map(|c| (c - m) * (c - m)).collect();
        let tol = 1e-10 * alpha.max_by(|s| s.norm());
        let j: Acs = acs_from_sd(&alpha[0], tol)?;
        (Some(pairwise_sum(&sq) / n), Some(j.0))
    } else {
        (None, None)
    };
    Ok(KahlerReport {
        pipeline,
        parallel,
        sigma_deviation,
        conformal_factor_variance: variance,
        acs,
    })
}

/// Relative site variance `mean|φ − φ̄|² / mean|φ|²` after removing the
/// global phase that makes `Σφ` real (a no-op on the variance, kept for
/// reporting aligned fields).
pub fn site_variance(phi: &SpinorField) -> f64 {
    let n = phi.data().len() as f64;
    let comp_mean = |c: usize| {
        let re: Vec<f64> = phi.iter().map(|p| p.0[c].re).collect();
        let im: Vec<f64> = phi.iter().map(|p| p.0[c].im).collect();
        Complex64::new(pairwise_sum(&re), pairwise_sum(&im)) / n
    };
    let mean = crate::clifford::SpinorPlus([comp_mean(0), comp_mean(1)]);
    let dev: Vec<f64> = phi.iter().map(|p| (*p - mean).norm_sqr()).collect();
    let mag: Vec<f64> = phi.iter().map(|p| p.norm_sqr()).collect();
    pairwise_sum(&dev) / pairwise_sum(&mag)
}

/// Multiply by the unit phase that makes the first nonzero component of the
/// field sum real and positive.
pub fn align_phase(phi: &SpinorField) -> SpinorField {
    let sum = phi.iter().fold(crate::clifford::SpinorPlus::ZERO, |acc, p| acc + *p);
    let lead = if sum.0[0].norm() > 0.0 { sum.0[0] } else { sum.0[1] };
    if lead.norm() == 0.0 {
        return phi.clone();
    }
    let u = lead.conj() / lead.norm();
    Field::from_fn(*phi.grid(), |x| phi[x] * u)
}
