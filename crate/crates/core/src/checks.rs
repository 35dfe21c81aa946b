//! Invariant suites shared by the command-line tool and the test suites.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::clifford::{gamma_2form, inner, Covector, Matrix4, SpinorPlus, SpinorValue, GAMMA, ZERO};
use crate::forms::{acs_from_sd, asd_basis, asd_project, hodge_star2, sd_project, wedge22, SdForm, TwoForm};
use crate::grid::{Field, Grid};
use crate::harmonic::{symplectic_pipeline, PipelineReport};
use crate::lattice::{flux_integers, gauge_apply, identity_residual, sigma_field, GaugeTransform, SpinorField, U1Connection};
use crate::smooth::{random_one_form, TrigSpinor};
use crate::squaring::{pointwise_preimage, sigma};
use crate::{Error, Result};

/// Worst error of one invariant over a batch of random inputs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteCheck {
    pub name: String,
    pub max_error: f64,
    pub tol: f64,
    pub pass: bool,
}

impl SuiteCheck {
    fn new(name: &str, max_error: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            max_error,
            tol,
            pass: max_error <= tol,
        }
    }
}

fn c(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn spinor4(rng: &mut ChaCha8Rng) -> [Complex64; 4] {
    std::array::from_fn(|_| c(rng))
}

fn covector(rng: &mut ChaCha8Rng) -> Covector {
    Covector(std::array::from_fn(|_| rng.gen_range(-1.0..1.0)))
}

fn mat_vec(m: &Matrix4, v: &[Complex64; 4]) -> [Complex64; 4] {
    std::array::from_fn(|i| (0..4).fold(ZERO, |acc, j| acc + m[i][j] * v[j]))
}

fn clifford(v: &Covector, psi: &[Complex64; 4]) -> [Complex64; 4] {
    let mut out = [ZERO; 4];
    for mu in 0..4 {
        let w = mat_vec(&GAMMA.matrix(mu), psi);
        for i in 0..4 {
            out[i] += w[i] * v.0[mu];
        }
    }
    out
}

fn dist(a: &[Complex64; 4], b: &[Complex64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

fn herm(a: &[Complex64; 4], b: &[Complex64; 4]) -> Complex64 {
    a.iter().zip(b).fold(ZERO, |acc, (x, y)| acc + x * y.conj())
}

fn two_form(rng: &mut ChaCha8Rng) -> TwoForm {
    TwoForm(std::array::from_fn(|_| rng.gen_range(-1.0..1.0)))
}

/// Clifford relations on random covectors and spinors: anticommutation
/// `v·w + w·v = −2⟨v,w⟩`, skew-adjointness, the volume element `−1` on
/// `W⁺` and `+1` on `W⁻`, and anti-self-dual forms annihilating `W⁺`.
pub fn clifford_suite(samples: usize, seed: u64) -> Vec<SuiteCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut anti, mut skew, mut vol, mut asd) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..samples {
        let (v, w) = (covector(&mut rng), covector(&mut rng));
        let (psi, chi) = (spinor4(&mut rng), spinor4(&mut rng));
        let vw = clifford(&v, &clifford(&w, &psi));
        let wv = clifford(&w, &clifford(&v, &psi));
        let expected: [Complex64; 4] = psi.map(|z| z * (-2.0 * v.dot(&w)));
        let sum: [Complex64; 4] = std::array::from_fn(|i| vw[i] + wv[i]);
        anti = anti.max(dist(&sum, &expected));

        let lhs = herm(&clifford(&v, &psi), &chi);
        let rhs = herm(&psi, &clifford(&v, &chi));
        skew = skew.max((lhs + rhs).norm());

        let mut e = psi;
        for mu in (0..4).rev() {
            e = mat_vec(&GAMMA.matrix(mu), &e);
        }
        let split = [-psi[0], -psi[1], psi[2], psi[3]];
        vol = vol.max(dist(&e, &split));

        let phi = SpinorPlus::new(psi[0], psi[1]);
        let beta = asd_project(&two_form(&mut rng));
        asd = asd.max(gamma_2form(&beta, &phi).norm());
        for k in 0..3 {
            asd = asd.max(gamma_2form(&asd_basis(k), &phi).norm());
        }
    }
    vec![
        SuiteCheck::new("clifford_anticommutation", anti, 1e-12),
        SuiteCheck::new("clifford_skew_adjoint", skew, 1e-12),
        SuiteCheck::new("volume_element_split", vol, 1e-12),
        SuiteCheck::new("asd_annihilates_positive", asd, 1e-12),
    ]
}

/// Hodge star and self-dual splitting, plus the almost-complex structure
/// built from random self-dual forms.
pub fn forms_suite(samples: usize, seed: u64) -> Vec<SuiteCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut star, mut split, mut wedge, mut jsq, mut orth) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..samples {
        let b = two_form(&mut rng);
        star = star.max((hodge_star2(&hodge_star2(&b)) - b).norm());
        let sd = sd_project(&b).to_two_form();
        let asd = asd_project(&b);
        split = split.max((sd + asd - b).norm()).max(wedge22(&sd, &asd).abs());
        wedge = wedge.max((wedge22(&sd, &sd) - sd.norm_sqr()).abs());
        let alpha = SdForm(std::array::from_fn(|_| rng.gen_range(-1.0..1.0)));
        if let Ok(j) = acs_from_sd(&alpha, 1e-8) {
            jsq = jsq.max(j.square_defect());
            orth = orth.max(j.orthogonality_defect());
        }
    }
    vec![
        SuiteCheck::new("hodge_involution", star, 1e-12),
        SuiteCheck::new("self_dual_splitting", split, 1e-12),
        SuiteCheck::new("self_dual_wedge_is_norm", wedge, 1e-12),
        SuiteCheck::new("acs_square_minus_one", jsq, 1e-12),
        SuiteCheck::new("acs_orthogonal", orth, 1e-12),
    ]
}

/// Laws of the squaring map on random spinors: exact self-duality, phase
/// invariance, `|σ(φ)| = √2|φ|²`, `σ∧σ = 2|φ|⁴` and the pointwise preimage
/// round trip up to phase.
pub fn squaring_suite(samples: usize, seed: u64) -> Vec<SuiteCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sd, mut phase, mut norm, mut wedge, mut pre) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..samples {
        let phi = SpinorPlus::new(c(&mut rng), c(&mut rng));
        let s = sigma(&phi);
        let two = s.to_two_form();
        sd = sd.max((hodge_star2(&two) - two).norm()).max(asd_project(&two).norm());
        let theta = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        phase = phase.max((sigma(&(phi * Complex64::from_polar(1.0, theta))) - s).coeff_norm());
        let n2 = phi.norm_sqr();
        norm = norm.max((s.norm() - std::f64::consts::SQRT_2 * n2).abs());
        wedge = wedge.max((wedge22(&two, &two) - 2.0 * n2 * n2).abs());
        match pointwise_preimage(&s, 1e-12) {
            Ok(back) => {
                let err = (sigma(&back) - s).coeff_norm();
                let overlap = (inner(&phi, &back).norm() - n2).abs();
                pre = pre.max(err).max(overlap);
            }
            Err(_) => pre = f64::INFINITY,
        }
    }
    vec![
        SuiteCheck::new("sigma_self_dual", sd, 0.0),
        SuiteCheck::new("sigma_phase_invariant", phase, 1e-12),
        SuiteCheck::new("sigma_norm", norm, 1e-12),
        SuiteCheck::new("sigma_wedge", wedge, 1e-12),
        SuiteCheck::new("preimage_round_trip", pre, 1e-10),
    ]
}

/// All algebra suites, 1000 samples each.
pub fn algebra_suite(seed: u64) -> Vec<SuiteCheck> {
    let mut out = clifford_suite(1000, seed);
    out.extend(forms_suite(1000, seed.wrapping_add(1)));
    out.extend(squaring_suite(1000, seed.wrapping_add(2)));
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub h: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    /// `log(r_i/r_{i+1}) / log(h_i/h_{i+1})` for consecutive rows.
    pub orders: Vec<f64>,
}

impl ConvergenceTable {
    pub fn from_rows(rows: Vec<ConvergenceRow>) -> Self {
        let orders = rows
            .windows(2)
            .map(|w| (w[0].residual / w[1].residual).ln() / (w[0].h / w[1].h).ln())
            .collect();
        Self { rows, orders }
    }

    /// Order between the two finest grids.
    pub fn observed_order(&self) -> Option<f64> {
        self.orders.last().copied()
    }
}

/// The smooth seeded pair used for identity convergence studies: a
/// trigonometric spinor and potential with modes `|k_μ| ≤ 1`, ingested as
/// lattice data on `grid`.
pub fn smooth_pair(grid: Grid, seed: u64) -> (U1Connection, SpinorField) {
    let phi = TrigSpinor::random(seed, 1, 0.5);
    let a = random_one_form(seed.wrapping_add(1000), 1, 0.5);
    (U1Connection::from_smooth(grid, |x, mu| a.components[mu].eval(x)), phi.sample(grid))
}

/// `identity_residual` of [`smooth_pair`] on cubic grids of the given sizes.
pub fn identity_convergence(sizes: &[usize], seed: u64) -> Result<ConvergenceTable> {
    let mut rows = Vec::new();
    for &n in sizes {
        let grid = Grid::cubic(n)?;
        let (a, phi) = smooth_pair(grid, seed);
        rows.push(ConvergenceRow {
            n,
            h: grid.spacing(0),
            residual: identity_residual(&a, &phi)?,
        });
    }
    Ok(ConvergenceTable::from_rows(rows))
}

/// `identity_residual` for a constant spinor and the trivial connection.
pub fn constant_identity_residual(n: usize) -> Result<f64> {
    let grid = Grid::cubic(n)?;
    let phi = Field::constant(grid, SpinorPlus::new(Complex64::new(0.3, -0.8), Complex64::new(0.5, 0.1)));
    identity_residual(&U1Connection::trivial(grid), &phi)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaugeSuite {
    pub transforms: usize,
    pub max_sigma_change: f64,
    pub max_identity_change: f64,
    pub max_pipeline_change: f64,
    pub flux_unchanged: bool,
    pub degrees_unchanged: bool,
    pub flux: Option<[i64; 6]>,
}

impl GaugeSuite {
    pub fn passed(&self, tol: f64) -> bool {
        self.max_sigma_change <= tol
            && self.max_identity_change <= tol
            && self.max_pipeline_change <= tol
            && self.flux_unchanged
            && self.degrees_unchanged
    }
}

fn pipeline_change(a: &PipelineReport, b: &PipelineReport) -> f64 {
    let opt = |x: Option<f64>, y: Option<f64>| match (x, y) {
        (Some(x), Some(y)) => (x - y).abs(),
        (None, None) => 0.0,
        _ => f64::INFINITY,
    };
    let range = |r: Option<(f64, f64)>| r.map(|(lo, _)| lo);
    let range_hi = |r: Option<(f64, f64)>| r.map(|(_, hi)| hi);
    [
        (a.dirac_rel_residual - b.dirac_rel_residual).abs(),
        (a.transversality_norm - b.transversality_norm).abs(),
        (a.min_modulus - b.min_modulus).abs(),
        (a.mean_modulus - b.mean_modulus).abs(),
        (a.closedness_residual - b.closedness_residual).abs(),
        (a.corollary_residual - b.corollary_residual).abs(),
        opt(a.acs_defect, b.acs_defect),
        opt(range(a.conformal_factor_range), range(b.conformal_factor_range)),
        opt(range_hi(a.conformal_factor_range), range_hi(b.conformal_factor_range)),
        if a.nowhere_zero == b.nowhere_zero { 0.0 } else { f64::INFINITY },
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

/// Apply `count` seeded random gauge transforms to `(A, φ)` and record how
/// far every gauge-invariant quantity moves.
pub fn gauge_suite(a: &U1Connection, phi: &SpinorField, seed: u64, count: usize) -> Result<GaugeSuite> {
    a.grid().check_same(phi.grid())?;
    let sigma0 = sigma_field(phi);
    let ident0 = identity_residual(a, phi)?;
    let pipe0 = symplectic_pipeline(a, phi)?;
    let flux0 = match flux_integers(a) {
        Ok(f) => Some(f),
        Err(Error::NonQuantizedFlux { .. } | Error::FluxSliceMismatch { .. }) => None,
        Err(e) => return Err(e),
    };
    let mut out = GaugeSuite {
        transforms: count,
        max_sigma_change: 0.0,
        max_identity_change: 0.0,
        max_pipeline_change: 0.0,
        flux_unchanged: true,
        degrees_unchanged: true,
        flux: flux0,
    };
    for k in 0..count {
        let s = GaugeTransform::random(*a.grid(), seed.wrapping_add(k as u64));
        let (a2, phi2) = gauge_apply(&s, a, phi)?;
        let sigma2 = sigma_field(&phi2);
        let change = sigma0.zip_map(&sigma2, |x, y| (*x - *y).coeff_norm())?.max_by(|v| *v);
        out.max_sigma_change = out.max_sigma_change.max(change);
        out.max_identity_change = out.max_identity_change.max((identity_residual(&a2, &phi2)? - ident0).abs());
        let pipe2 = symplectic_pipeline(&a2, &phi2)?;
        out.max_pipeline_change = out.max_pipeline_change.max(pipeline_change(&pipe0, &pipe2));
        out.degrees_unchanged &= pipe0.degree_vector == pipe2.degree_vector;
        let flux2 = flux_integers(&a2).ok();
        out.flux_unchanged &= flux2 == flux0;
    }
    Ok(out)
}
