//! U(1) link connections, gauge transformations and central-difference
//! operators on the periodic grid.
//!
//! A connection is stored as unit link phases `u(x, μ)` transporting from
//! `x + μ̂` back to `x`. The covariant derivative is the symmetric stencil
//!
//! ```text
//! (∇_μφ)(x) = [u(x,μ)·φ(x+μ̂) − conj(u(x−μ̂,μ))·φ(x−μ̂)] / (2h_μ)
//! ```
//!
//! which is skew-adjoint for the volume-weighted inner product and exactly
//! covariant under `φ ↦ sφ`, `u(x,μ) ↦ s(x)·u(x,μ)·conj(s(x+μ̂))`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clifford::{gamma_vec, gamma_vec_back, Covector, SpinorMinus, SpinorPlus, SpinorValue, ONE, ZERO};
use crate::forms::{OneForm, SdForm, ThreeForm, TwoForm, PLANES, TRIPLES};
use crate::grid::{Field, Grid};
use crate::squaring::sigma;
use crate::{pairwise_sum, Error, Result};

pub type SpinorField = Field<SpinorPlus>;
pub type MinusField = Field<SpinorMinus>;
pub type OneFormField = Field<OneForm>;
pub type TwoFormField = Field<TwoForm>;
pub type ThreeFormField = Field<ThreeForm>;
pub type SdField = Field<SdForm>;

/// Normalization `κ` of the squaring map at which the differential identity
///
/// ```text
/// |φ|²·D^Aφ = ε·i(2·d*σ_κ(φ) + ⟨∇^Aφ, iφ⟩)·φ
/// ```
///
/// holds, as measured by [`crate::calibration`]. It is a quarter of
/// [`crate::squaring::DEFAULT_KAPPA`].
pub const IDENTITY_KAPPA: f64 = 0.125;

/// Sign `ε` in the identity above.
pub const IDENTITY_EPSILON: f64 = 1.0;

/// Lattice connection on the determinant line: one unit phase per site and
/// direction.
#[derive(Clone, Debug, PartialEq)]
pub struct U1Connection {
    grid: Grid,
    links: Vec<[Complex64; 4]>,
}

impl U1Connection {
    pub fn trivial(grid: Grid) -> Self {
        Self {
            grid,
            links: vec![[ONE; 4]; grid.num_sites()],
        }
    }

    pub fn from_links(grid: Grid, links: Vec<[Complex64; 4]>) -> Result<Self> {
        if links.len() != grid.num_sites() {
            return Err(Error::ShapeMismatch(format!(
                "{} link sets for {} sites",
                links.len(),
                grid.num_sites()
            )));
        }
        Ok(Self { grid, links })
    }

    /// Ingest a smooth real 1-form `A` by exponentiating `h_μ·A_μ` at link
    /// midpoints, so that `∇_μ ≈ ∂_μ + iA_μ`. `potential(x, μ)` returns `A_μ(x)`.
    pub fn from_smooth(grid: Grid, potential: impl Fn([f64; 4], usize) -> f64) -> Self {
        let h = grid.spacings();
        let links = (0..grid.num_sites())
            .map(|i| {
                let x = grid.position(grid.coords(i));
                std::array::from_fn(|mu| {
                    let mut mid = x;
                    mid[mu] += h[mu] / 2.0;
                    let angle = h[mu] * potential(mid, mu);
                    Complex64::new(angle.cos(), angle.sin())
                })
            })
            .collect();
        Self { grid, links }
    }

    /// Constant-curvature connection whose plaquettes in plane `(μ, ν)` all
    /// carry phase `2π·k_μν/(N_μN_ν)`; the transition twist sits on the last
    /// layer of `ν`-links.
    pub fn constant_flux(grid: Grid, flux: [i64; 6]) -> Self {
        let dims = grid.dims();
        let mut phases = vec![[0.0f64; 4]; grid.num_sites()];
        for (site, ph) in phases.iter_mut().enumerate() {
            let c = grid.coords(site);
            for (p, &(mu, nu)) in PLANES.iter().enumerate() {
                let k = flux[p] as f64;
                if k == 0.0 {
                    continue;
                }
                let area = (dims[mu] * dims[nu]) as f64;
                ph[mu] -= 2.0 * PI * k * c[nu] as f64 / area;
                if c[nu] + 1 == dims[nu] {
                    ph[nu] += 2.0 * PI * k * c[mu] as f64 / dims[mu] as f64;
                }
            }
        }
        let links = phases
            .into_iter()
            .map(|ph| ph.map(|t| Complex64::from_polar(1.0, t)))
            .collect();
        Self { grid, links }
    }

    /// Links with independent uniform phases in `[−amplitude, amplitude]`.
    /// Flux-free whenever `amplitude < π/4`, since every plaquette phase then
    /// stays on the principal branch.
    pub fn random(grid: Grid, seed: u64, amplitude: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let links = (0..grid.num_sites())
            .map(|_| std::array::from_fn(|_| Complex64::from_polar(1.0, rng.gen_range(-amplitude..=amplitude))))
            .collect();
        Self { grid, links }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn links(&self) -> &[[Complex64; 4]] {
        &self.links
    }

    pub fn link(&self, site: usize, mu: usize) -> Complex64 {
        self.links[site][mu]
    }

    /// `u_μ(x)·u_ν(x+μ̂)·conj(u_μ(x+ν̂))·conj(u_ν(x))`.
    pub fn plaquette(&self, site: usize, mu: usize, nu: usize) -> Complex64 {
        let g = &self.grid;
        self.link(site, mu)
            * self.link(g.forward(site, mu), nu)
            * self.link(g.forward(site, nu), mu).conj()
            * self.link(site, nu).conj()
    }

    /// Largest `| |u| − 1 |` over all links.
    pub fn unitarity_defect(&self) -> f64 {
        self.links
            .iter()
            .flat_map(|l| l.iter())
            .map(|u| (u.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Site-wise unit phases acting on pairs `(A, φ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeTransform {
    grid: Grid,
    phases: Vec<Complex64>,
}

impl GaugeTransform {
    pub fn identity(grid: Grid) -> Self {
        Self {
            grid,
            phases: vec![ONE; grid.num_sites()],
        }
    }

    pub fn from_angles(grid: Grid, angle: impl Fn(usize) -> f64) -> Self {
        Self {
            grid,
            phases: (0..grid.num_sites()).map(|i| Complex64::from_polar(1.0, angle(i))).collect(),
        }
    }

    pub fn from_phases(grid: Grid, phases: Vec<Complex64>) -> Result<Self> {
        if phases.len() != grid.num_sites() {
            return Err(Error::ShapeMismatch(format!(
                "{} phases for {} sites",
                phases.len(),
                grid.num_sites()
            )));
        }
        Ok(Self { grid, phases })
    }

    /// Uniformly random phases; rough at the grid scale.
    pub fn random(grid: Grid, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let angles: Vec<f64> = (0..grid.num_sites()).map(|_| rng.gen_range(-PI..PI)).collect();
        Self::from_angles(grid, |i| angles[i])
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn phases(&self) -> &[Complex64] {
        &self.phases
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn compose(&self, first: &GaugeTransform) -> Result<GaugeTransform> {
        self.grid.check_same(&first.grid)?;
        Ok(GaugeTransform {
            grid: self.grid,
            phases: self.phases.iter().zip(&first.phases).map(|(a, b)| a * b).collect(),
        })
    }

    pub fn apply_connection(&self, a: &U1Connection) -> Result<U1Connection> {
        self.grid.check_same(&a.grid)?;
        let g = &self.grid;
        let links = (0..g.num_sites())
            .map(|x| std::array::from_fn(|mu| self.phases[x] * a.link(x, mu) * self.phases[g.forward(x, mu)].conj()))
            .collect();
        Ok(U1Connection { grid: *g, links })
    }

    pub fn apply_spinor<S: SpinorValue>(&self, phi: &Field<S>) -> Result<Field<S>> {
        self.grid.check_same(phi.grid())?;
        Ok(Field::from_fn(self.grid, |x| phi[x] * self.phases[x]))
    }
}

/// `(A, φ) ↦ (A^s, s·φ)`.
pub fn gauge_apply(s: &GaugeTransform, a: &U1Connection, phi: &SpinorField) -> Result<(U1Connection, SpinorField)> {
    Ok((s.apply_connection(a)?, s.apply_spinor(phi)?))
}

/// Covariant central difference along `mu`.
pub fn cov_deriv<S: SpinorValue>(a: &U1Connection, phi: &Field<S>, mu: usize) -> Result<Field<S>> {
    a.grid.check_same(phi.grid())?;
    let g = a.grid;
    let scale = 1.0 / (2.0 * g.spacing(mu));
    Ok(Field::from_fn(g, |x| {
        let fwd = g.forward(x, mu);
        let bwd = g.backward(x, mu);
        (phi[fwd] * a.link(x, mu) - phi[bwd] * a.link(bwd, mu).conj()) * scale
    }))
}

fn all_cov_derivs<S: SpinorValue>(a: &U1Connection, phi: &Field<S>) -> Result<[Field<S>; 4]> {
    Ok([
        cov_deriv(a, phi, 0)?,
        cov_deriv(a, phi, 1)?,
        cov_deriv(a, phi, 2)?,
        cov_deriv(a, phi, 3)?,
    ])
}

/// `D^A = Σ_μ γ(e^μ)∇_μ : Γ(W⁺) → Γ(W⁻)`.
pub fn dirac(a: &U1Connection, phi: &SpinorField) -> Result<MinusField> {
    a.grid.check_same(phi.grid())?;
    let g = a.grid;
    let h = g.spacings();
    Ok(Field::from_fn(g, |x| {
        let mut out = SpinorMinus::ZERO;
        for mu in 0..4 {
            let fwd = g.forward(x, mu);
            let bwd = g.backward(x, mu);
            let d = (phi[fwd] * a.link(x, mu) - phi[bwd] * a.link(bwd, mu).conj()) * (0.5 / h[mu]);
            out += gamma_vec(&Covector::basis(mu), &d);
        }
        out
    }))
}

/// Formal adjoint `(D^A)† = −Σ_μ T_μ*∇_μ : Γ(W⁻) → Γ(W⁺)`.
pub fn dirac_adjoint(a: &U1Connection, psi: &MinusField) -> Result<SpinorField> {
    a.grid.check_same(psi.grid())?;
    let g = a.grid;
    let h = g.spacings();
    Ok(Field::from_fn(g, |x| {
        let mut out = SpinorPlus::ZERO;
        for mu in 0..4 {
            let fwd = g.forward(x, mu);
            let bwd = g.backward(x, mu);
            let d = (psi[fwd] * a.link(x, mu) - psi[bwd] * a.link(bwd, mu).conj()) * (0.5 / h[mu]);
            out += gamma_vec_back(&Covector::basis(mu), &d);
        }
        out
    }))
}

/// `D†D φ`.
pub fn dirac_normal(a: &U1Connection, phi: &SpinorField) -> Result<SpinorField> {
    dirac_adjoint(a, &dirac(a, phi)?)
}

/// Volume-weighted Hermitian product of two fields.
pub fn l2_inner<S: SpinorValue>(a: &Field<S>, b: &Field<S>) -> Complex64 {
    let re: Vec<f64> = a.iter().zip(b.iter()).map(|(x, y)| x.inner(y).re).collect();
    let im: Vec<f64> = a.iter().zip(b.iter()).map(|(x, y)| x.inner(y).im).collect();
    Complex64::new(pairwise_sum(&re), pairwise_sum(&im)) * a.grid().cell_volume()
}

pub fn l2_norm<S: SpinorValue>(a: &Field<S>) -> f64 {
    a.l2_norm_by(|s| s.norm_sqr())
}

fn central<T>(g: &Grid, f: &Field<T>, x: usize, mu: usize, get: impl Fn(&T) -> f64) -> f64 {
    (get(&f[g.forward(x, mu)]) - get(&f[g.backward(x, mu)])) / (2.0 * g.spacing(mu))
}

/// Exterior derivative of a 1-form, `(dη)_μν = ∂_μη_ν − ∂_νη_μ`.
pub fn d1(eta: &OneFormField) -> TwoFormField {
    let g = *eta.grid();
    Field::from_fn(g, |x| {
        TwoForm(PLANES.map(|(mu, nu)| {
            central(&g, eta, x, mu, |e| e.0[nu]) - central(&g, eta, x, nu, |e| e.0[mu])
        }))
    })
}

/// Exterior derivative of a 2-form, components ordered `(012, 013, 023, 123)`.
pub fn d2(beta: &TwoFormField) -> ThreeFormField {
    let g = *beta.grid();
    Field::from_fn(g, |x| {
        ThreeForm(TRIPLES.map(|(l, m, n)| {
            central(&g, beta, x, l, |b| b.component(m, n)) - central(&g, beta, x, m, |b| b.component(l, n))
                + central(&g, beta, x, n, |b| b.component(l, m))
        }))
    })
}

/// Codifferential of a 2-form, `(d*β)_ν = −Σ_μ ∂_μβ_μν`.
pub fn dstar2(beta: &TwoFormField) -> OneFormField {
    let g = *beta.grid();
    Field::from_fn(g, |x| {
        Covector(std::array::from_fn(|nu| {
            -(0..4)
                .filter(|&mu| mu != nu)
                .map(|mu| central(&g, beta, x, mu, |b| b.component(mu, nu)))
                .sum::<f64>()
        }))
    })
}

pub fn sigma_field(phi: &SpinorField) -> SdField {
    phi.map(sigma)
}

/// `σ_κ(φ)` as a field of general 2-forms, `κ` relative to
/// [`crate::squaring::DEFAULT_KAPPA`].
fn scaled_sigma_two_forms(phi: &SpinorField, kappa: f64) -> TwoFormField {
    let scale = kappa / crate::squaring::DEFAULT_KAPPA;
    phi.map(|p| sigma(p).to_two_form() * scale)
}

/// `ν ↦ Re⟨∇_νφ, iφ⟩`.
pub fn inner_one_form(a: &U1Connection, phi: &SpinorField) -> Result<OneFormField> {
    let derivs = all_cov_derivs(a, phi)?;
    Ok(Field::from_fn(*phi.grid(), |x| {
        let i_phi = phi[x].times_i();
        Covector(std::array::from_fn(|nu| derivs[nu][x].real_inner(&i_phi)))
    }))
}

/// `2·d*σ_κ(φ) + ⟨∇^Aφ, iφ⟩` at the calibrated `κ`. Vanishes wherever `φ`
/// is nonzero and harmonic.
pub fn corollary_form(a: &U1Connection, phi: &SpinorField) -> Result<OneFormField> {
    let dstar = dstar2(&scaled_sigma_two_forms(phi, IDENTITY_KAPPA));
    let transverse = inner_one_form(a, phi)?;
    dstar.zip_map(&transverse, |d, t| *d * 2.0 + *t)
}

/// Both sides of the identity as `W⁻` fields: `|φ|²D^Aφ` and
/// `ε·τ·(iφ)` with `τ` from [`corollary_form`].
pub fn identity_sides(a: &U1Connection, phi: &SpinorField) -> Result<(MinusField, MinusField)> {
    let d = dirac(a, phi)?;
    let lhs = d.zip_map(phi, |dp, p| *dp * p.norm_sqr())?;
    let tau = corollary_form(a, phi)?;
    let rhs = tau.zip_map(phi, |t, p| gamma_vec(t, &p.times_i()) * IDENTITY_EPSILON)?;
    Ok((lhs, rhs))
}

/// L² norm of `|φ|²D^Aφ − ε·i(2d*σ(φ) + ⟨∇^Aφ, iφ⟩)·φ`.
pub fn identity_residual(a: &U1Connection, phi: &SpinorField) -> Result<f64> {
    let (lhs, rhs) = identity_sides(a, phi)?;
    let diff = lhs.zip_map(&rhs, |l, r| *l - *r)?;
    Ok(l2_norm(&diff))
}

fn principal_arg(z: Complex64) -> f64 {
    z.arg()
}

/// Flux integers `(1/2π)·Σ arg P_μν` over each coordinate 2-torus, ordered
/// like [`PLANES`]. Every parallel slice is summed and must agree.
pub fn flux_integers(a: &U1Connection) -> Result<[i64; 6]> {
    let g = a.grid;
    let dims = g.dims();
    let mut out = [0i64; 6];
    for (p, &(mu, nu)) in PLANES.iter().enumerate() {
        let others: Vec<usize> = (0..4).filter(|&r| r != mu && r != nu).collect();
        let mut first: Option<i64> = None;
        for s0 in 0..dims[others[0]] {
            for s1 in 0..dims[others[1]] {
                let mut args = Vec::with_capacity(dims[mu] * dims[nu]);
                for i in 0..dims[mu] {
                    for j in 0..dims[nu] {
                        let mut c = [0usize; 4];
                        c[mu] = i;
                        c[nu] = j;
                        c[others[0]] = s0;
                        c[others[1]] = s1;
                        args.push(principal_arg(a.plaquette(g.index(c), mu, nu)));
                    }
                }
                let value = pairwise_sum(&args) / (2.0 * PI);
                let rounded = value.round();
                if (value - rounded).abs() > 1e-6 {
                    return Err(Error::NonQuantizedFlux { plane: p, value });
                }
                let k = rounded as i64;
                match first {
                    None => first = Some(k),
                    Some(f) if f != k => {
                        return Err(Error::FluxSliceMismatch {
                            plane: p,
                            first: f,
                            other: k,
                        })
                    }
                    _ => {}
                }
            }
        }
        out[p] = first.unwrap_or(0);
    }
    Ok(out)
}

/// Zero spinor field helper for solvers.
pub(crate) fn zeros(grid: Grid) -> SpinorField {
    Field::constant(grid, SpinorPlus([ZERO; 2]))
}
