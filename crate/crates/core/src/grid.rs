//! Periodic 4D grids and site-indexed fields.
//!
//! Sites are ordered lexicographically with axis 3 fastest:
//! `index = ((n₀·N₁ + n₁)·N₂ + n₂)·N₃ + n₃`.

use std::ops::{Index, IndexMut};

use crate::{pairwise_sum, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    dims: [usize; 4],
    periods: [f64; 4],
}

impl Grid {
    /// Grid with unit periods. Every axis needs an even site count of at least 4.
    pub fn new(dims: [usize; 4]) -> Result<Self> {
        Self::with_periods(dims, [1.0; 4])
    }

    pub fn cubic(n: usize) -> Result<Self> {
        Self::new([n; 4])
    }

    pub fn with_periods(dims: [usize; 4], periods: [f64; 4]) -> Result<Self> {
        for (mu, &n) in dims.iter().enumerate() {
            if n < 4 || n % 2 != 0 {
                return Err(Error::InvalidGrid(format!(
                    "axis {mu} has {n} sites; need an even count >= 4"
                )));
            }
        }
        for (mu, &l) in periods.iter().enumerate() {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidGrid(format!("axis {mu} has period {l}")));
            }
        }
        Ok(Self { dims, periods })
    }

    pub fn dims(&self) -> [usize; 4] {
        self.dims
    }

    pub fn periods(&self) -> [f64; 4] {
        self.periods
    }

    pub fn spacing(&self, mu: usize) -> f64 {
        self.periods[mu] / self.dims[mu] as f64
    }

    pub fn spacings(&self) -> [f64; 4] {
        std::array::from_fn(|mu| self.spacing(mu))
    }

    /// Volume of one grid cell, `Π h_μ`.
    pub fn cell_volume(&self) -> f64 {
        self.spacings().iter().product()
    }

    pub fn num_sites(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn index(&self, coords: [usize; 4]) -> usize {
        let [_, n1, n2, n3] = self.dims;
        ((coords[0] * n1 + coords[1]) * n2 + coords[2]) * n3 + coords[3]
    }

    pub fn coords(&self, mut index: usize) -> [usize; 4] {
        let mut c = [0; 4];
        for mu in (0..4).rev() {
            c[mu] = index % self.dims[mu];
            index /= self.dims[mu];
        }
        c
    }

    /// Physical position `n_μ·h_μ` of a site.
    pub fn position(&self, coords: [usize; 4]) -> [f64; 4] {
        std::array::from_fn(|mu| coords[mu] as f64 * self.spacing(mu))
    }

    /// Neighbor index one step forward along `mu`, wrapping periodically.
    pub fn forward(&self, index: usize, mu: usize) -> usize {
        let stride = self.stride(mu);
        let n = self.dims[mu];
        let c = (index / stride) % n;
        if c + 1 == n {
            index + stride - n * stride
        } else {
            index + stride
        }
    }

    /// Neighbor index one step backward along `mu`, wrapping periodically.
    pub fn backward(&self, index: usize, mu: usize) -> usize {
        let stride = self.stride(mu);
        let n = self.dims[mu];
        let c = (index / stride) % n;
        if c == 0 {
            index + (n - 1) * stride
        } else {
            index - stride
        }
    }

    pub fn stride(&self, mu: usize) -> usize {
        self.dims[mu + 1..].iter().product()
    }

    /// Operator-norm bound for a unit-link central difference along each
    /// axis, combined: `(Σ_μ h_μ⁻²)^{1/2}`.
    pub fn dirac_norm_bound(&self) -> f64 {
        self.spacings().iter().map(|h| h.powi(-2)).sum::<f64>().sqrt()
    }

    pub fn check_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "{:?}/{:?} vs {:?}/{:?}",
                self.dims, self.periods, other.dims, other.periods
            )))
        }
    }
}

/// One value per grid site.
#[derive(Clone, Debug, PartialEq)]
pub struct Field<T> {
    grid: Grid,
    data: Vec<T>,
}

impl<T> Field<T> {
    pub fn from_vec(grid: Grid, data: Vec<T>) -> Result<Self> {
        if data.len() != grid.num_sites() {
            return Err(Error::ShapeMismatch(format!(
                "{} values for {} sites",
                data.len(),
                grid.num_sites()
            )));
        }
        Ok(Self { grid, data })
    }

    pub fn from_fn(grid: Grid, mut f: impl FnMut(usize) -> T) -> Self {
        let data = (0..grid.num_sites()).map(&mut f).collect();
        Self { grid, data }
    }

    /// Sample a function of the physical position.
    pub fn sample(grid: Grid, mut f: impl FnMut([f64; 4]) -> T) -> Self {
        Self::from_fn(grid, |i| f(grid.position(grid.coords(i))))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.data.iter()
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Field<U> {
        Field {
            grid: self.grid,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn zip_map<U, V>(&self, other: &Field<U>, mut f: impl FnMut(&T, &U) -> V) -> Result<Field<V>> {
        self.grid.check_same(&other.grid)?;
        Ok(Field {
            grid: self.grid,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    /// `(Π h_μ · Σ_x q(x))^{1/2}` for a pointwise squared magnitude `q`.
    pub fn l2_norm_by(&self, q: impl Fn(&T) -> f64) -> f64 {
        let values: Vec<f64> = self.data.iter().map(q).collect();
        (self.grid.cell_volume() * pairwise_sum(&values)).sqrt()
    }

    /// Largest pointwise value of `q`.
    pub fn max_by(&self, q: impl Fn(&T) -> f64) -> f64 {
        self.data.iter().map(q).fold(0.0, f64::max)
    }
}

impl<T: Clone> Field<T> {
    pub fn constant(grid: Grid, value: T) -> Self {
        Self {
            grid,
            data: vec![value; grid.num_sites()],
        }
    }
}

impl<T> Index<usize> for Field<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.data[i]
    }
}

impl<T> IndexMut<usize> for Field<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.data[i]
    }
}
