//! Seeded trigonometric-polynomial fields with analytic derivatives, on the
//! unit-period torus. Used as smooth test data, as solver start vectors and
//! by the calibration oracle.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clifford::{gamma_vec, Covector, SpinorMinus, SpinorPlus, SpinorValue, GAMMA};
use crate::grid::{Field, Grid};

fn modes(kmax: i32) -> Vec<[i32; 4]> {
    let r = -kmax..=kmax;
    let mut out = Vec::new();
    for a in r.clone() {
        for b in r.clone() {
            for c in r.clone() {
                for d in r.clone() {
                    if [a, b, c, d] != [0; 4] {
                        out.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    out
}

/// `e^{2πi k·x}` for integer wave vectors `|k_μ| ≤ kmax`, from per-axis
/// power tables.
struct Waves {
    kmax: i32,
    tables: [Vec<Complex64>; 4],
}

impl Waves {
    fn new<'a>(x: [f64; 4], modes: impl Iterator<Item = &'a [i32; 4]>) -> Self {
        let kmax = modes.flat_map(|k| k.iter().map(|c| c.abs())).max().unwrap_or(0);
        let tables = std::array::from_fn(|mu| {
            let z = Complex64::from_polar(1.0, 2.0 * PI * x[mu]);
            (-kmax..=kmax).map(|j| z.powi(j)).collect()
        });
        Self { kmax, tables }
    }

    fn get(&self, k: &[i32; 4]) -> Complex64 {
        (0..4).fold(Complex64::new(1.0, 0.0), |acc, mu| acc * self.tables[mu][(k[mu] + self.kmax) as usize])
    }
}

fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// `φ(x) = φ₀ + Σ_k c_k·e^{2πi k·x}` with nonzero wave vectors `|k_μ| ≤ kmax`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigSpinor {
    pub base: SpinorPlus,
    pub modes: Vec<([i32; 4], SpinorPlus)>,
}

impl TrigSpinor {
    /// Random base spinor of unit length plus oscillating modes whose
    /// coefficient norms sum to `amplitude`. For `amplitude < 1` the field
    /// is nowhere zero: `|φ(x)| ≥ 1 − amplitude`.
    pub fn random(seed: u64, kmax: i32, amplitude: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = SpinorPlus::new(random_complex(&mut rng), random_complex(&mut rng));
        let base = base * (1.0 / base.norm());
        let mut terms: Vec<([i32; 4], SpinorPlus)> = modes(kmax)
            .into_iter()
            .map(|k| {
                let weight = 1.0 / (1.0 + k.iter().map(|c| (c * c) as f64).sum::<f64>());
                (k, SpinorPlus::new(random_complex(&mut rng), random_complex(&mut rng)) * weight)
            })
            .collect();
        let total: f64 = terms.iter().map(|(_, c)| c.norm()).sum();
        if total > 0.0 {
            for (_, c) in &mut terms {
                *c = *c * (amplitude / total);
            }
        }
        Self { base, modes: terms }
    }

    pub fn constant(base: SpinorPlus) -> Self {
        Self {
            base,
            modes: Vec::new(),
        }
    }

    pub fn eval(&self, x: [f64; 4]) -> SpinorPlus {
        let waves = Waves::new(x, self.modes.iter().map(|(k, _)| k));
        self.modes.iter().fold(self.base, |acc, (k, c)| acc + *c * waves.get(k))
    }

    /// `∂_μφ(x)`.
    pub fn derivative(&self, x: [f64; 4], mu: usize) -> SpinorPlus {
        let waves = Waves::new(x, self.modes.iter().map(|(k, _)| k));
        self.modes.iter().fold(SpinorPlus::ZERO, |acc, (k, c)| {
            let factor = Complex64::new(0.0, 2.0 * PI * k[mu] as f64) * waves.get(k);
            acc + *c * factor
        })
    }

    /// Flat Dirac operator `Σ_μ T_μ∂_μφ`.
    pub fn flat_dirac(&self, x: [f64; 4]) -> SpinorMinus {
        (0..4).fold(SpinorMinus::ZERO, |acc, mu| {
            acc + gamma_vec(&Covector::basis(mu), &self.derivative(x, mu))
        })
    }

    pub fn sample(&self, grid: Grid) -> Field<SpinorPlus> {
        Field::sample(grid, |x| self.eval(x))
    }
}

/// Real trigonometric polynomial `Σ_k (a_k cos 2πk·x + b_k sin 2πk·x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigScalar {
    pub terms: Vec<([i32; 4], f64, f64)>,
}

impl TrigScalar {
    /// Random polynomial whose coefficients sum to `amplitude` in absolute value.
    pub fn random(seed: u64, kmax: i32, amplitude: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut terms: Vec<([i32; 4], f64, f64)> = modes(kmax)
            .into_iter()
            .map(|k| (k, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let total: f64 = terms.iter().map(|(_, a, b)| a.abs() + b.abs()).sum();
        for (_, a, b) in &mut terms {
            *a *= amplitude / total;
            *b *= amplitude / total;
        }
        Self { terms }
    }

    pub fn eval(&self, x: [f64; 4]) -> f64 {
        let waves = Waves::new(x, self.terms.iter().map(|(k, _, _)| k));
        self.terms.iter().map(|(k, a, b)| {
            let w = waves.get(k);
            a * w.re + b * w.im
        }).sum()
    }

    pub fn gradient(&self, x: [f64; 4]) -> [f64; 4] {
        let mut g = [0.0; 4];
        let waves = Waves::new(x, self.terms.iter().map(|(k, _, _)| k));
        for (k, a, b) in &self.terms {
            let w = waves.get(k);
            let d = -a * w.im + b * w.re;
            for mu in 0..4 {
                g[mu] += 2.0 * PI * k[mu] as f64 * d;
            }
        }
        g
    }
}

/// Smooth real 1-form with trigonometric components.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigOneForm {
    pub components: [TrigScalar; 4],
}

impl TrigOneForm {
    pub fn eval(&self, x: [f64; 4]) -> [f64; 4] {
        std::array::from_fn(|mu| self.components[mu].eval(x))
    }
}

pub fn random_one_form(seed: u64, kmax: i32, amplitude: f64) -> TrigOneForm {
    TrigOneForm {
        components: std::array::from_fn(|mu| TrigScalar::random(seed.wrapping_mul(4).wrapping_add(mu as u64), kmax, amplitude)),
    }
}

/// The unique real potential `A` with `D^Aφ = 0` at `x` for a nonzero `φ`:
/// Clifford multiplication `v ↦ v·φ` is a real isometry (up to `|φ|`) from
/// ℝ⁴ onto `W⁻`, so `A·φ = i·D⁰φ` can be solved componentwise as
/// `A_μ = Re⟨iD⁰φ, T_μφ⟩ / |φ|²`.
pub fn harmonic_potential(phi: &TrigSpinor, x: [f64; 4]) -> [f64; 4] {
    let p = phi.eval(x);
    let target = phi.flat_dirac(x) * Complex64::new(0.0, 1.0);
    let n2 = p.norm_sqr();
    std::array::from_fn(|mu| {
        let t = GAMMA.blocks[mu];
        let tp = SpinorMinus::new(t[0][0] * p.0[0] + t[0][1] * p.0[1], t[1][0] * p.0[0] + t[1][1] * p.0[1]);
        target.real_inner(&tp) / n2
    })
}

/// Deterministic smooth start vector: random complex coefficients on the
/// Fourier modes `|k_μ| ≤ 1` (constant mode included), sampled on `grid`.
pub fn smooth_start(grid: Grid, seed: u64) -> Field<SpinorPlus> {
    let mut field = TrigSpinor::random(seed, 1, 1.0);
    let periods = grid.periods();
    field.base = field.base * 0.5;
    Field::sample(grid, |x| {
        let unit = std::array::from_fn(|mu| x[mu] / periods[mu]);
        field.eval(unit)
    })
}
