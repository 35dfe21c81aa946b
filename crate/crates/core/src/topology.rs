//! Degrees of nowhere-zero self-dual forms viewed as maps to S².
//!
//! A nowhere-zero `α = s₁ω₁ + s₂ω₂ + s₃ω₃` determines the unit vector
//! `n = s/|s|`. Restricting `n` to a coordinate 2-torus and summing the
//! signed solid angles of the image triangles gives `4π·deg`; the six
//! degrees over the planes `(01, 02, 03, 12, 13, 23)` are the computable
//! stand-in for the first Chern class of the almost-complex structure
//! defined by `α`.

use std::f64::consts::PI;

use crate::forms::{SdForm, PLANES};
use crate::grid::{Field, Grid};
use crate::{pairwise_sum, Error, Result};

pub type DegreeVector = [i64; 6];

/// Adjacent images closer than this to antipodal make the degree ill-defined.
pub const ANTIPODAL_TOL: f64 = 1e-9;

/// Allowed distance of `Σ Ω / 4π` from the nearest integer.
pub const ROUNDING_TOL: f64 = 1e-3;

/// Unit 3-vector per site.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereMapField(pub Field<[f64; 3]>);

impl SphereMapField {
    pub fn grid(&self) -> &Grid {
        self.0.grid()
    }
}

pub fn sphere_map(alpha: &Field<SdForm>, tol: f64) -> Result<SphereMapField> {
    let mut out = Vec::with_capacity(alpha.grid().num_sites());
    for (site, a) in alpha.iter().enumerate() {
        let modulus = a.norm();
        if !(modulus > tol) {
            return Err(Error::DegenerateForm {
                site: Some(site),
                modulus,
                tol,
            });
        }
        let len = a.coeff_norm();
        out.push(a.0.map(|c| c / len));
    }
    Ok(SphereMapField(Field::from_vec(*alpha.grid(), out)?))
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn triple(a: &[f64; 3], b: &[f64; 3], c: &[f64; 3]) -> f64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0])
}

/// Signed solid angle of the geodesic triangle `(a, b, c)` on the unit sphere.
pub fn signed_solid_angle(a: &[f64; 3], b: &[f64; 3], c: &[f64; 3]) -> f64 {
    2.0 * triple(a, b, c).atan2(1.0 + dot(a, b) + dot(b, c) + dot(c, a))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Degree {
    pub degree: i64,
    /// `|Σ Ω / 4π − degree|`.
    pub defect: f64,
}

/// Degree of `n` restricted to the 2-torus through `base` spanned by the
/// axes of plane `plane` (an index into [`PLANES`]).
pub fn degree_2torus(n: &SphereMapField, plane: usize, base: [usize; 4]) -> Result<Degree> {
    let (mu, nu) = PLANES[plane];
    let g = *n.grid();
    let dims = g.dims();
    let at = |i: usize, j: usize| {
        let mut c = base;
        c[mu] = i % dims[mu];
        c[nu] = j % dims[nu];
        g.index(c)
    };
    let check = |a: usize, b: usize| -> Result<()> {
        if 1.0 + dot(&n.0[a], &n.0[b]) < ANTIPODAL_TOL {
            Err(Error::AntipodalEdge { a, b })
        } else {
            Ok(())
        }
    };
    let mut angles = Vec::with_capacity(2 * dims[mu] * dims[nu]);
    for i in 0..dims[mu] {
        for j in 0..dims[nu] {
            let (p00, p10, p11, p01) = (at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1));
            check(p00, p10)?;
            check(p00, p01)?;
            check(p00, p11)?;
            let v = |s: usize| &n.0[s];
            angles.push(signed_solid_angle(v(p00), v(p10), v(p11)));
            angles.push(signed_solid_angle(v(p00), v(p11), v(p01)));
        }
    }
    let value = pairwise_sum(&angles) / (4.0 * PI);
    let degree = value.round();
    let defect = (value - degree).abs();
    if defect > ROUNDING_TOL {
        return Err(Error::NonIntegerDegree { value });
    }
    Ok(Degree {
        degree: degree as i64,
        defect,
    })
}

/// Degrees over the six coordinate 2-tori through `base`.
pub fn degree_vector(n: &SphereMapField, base: [usize; 4]) -> Result<DegreeVector> {
    let mut out = [0; 6];
    for (p, d) in out.iter_mut().enumerate() {
        *d = degree_2torus(n, p, base)?.degree;
    }
    Ok(out)
}

/// Degree of plane `plane` on every parallel slice, in lexicographic order
/// of the two transverse coordinates.
pub fn slice_degrees(n: &SphereMapField, plane: usize) -> Result<Vec<i64>> {
    let (mu, nu) = PLANES[plane];
    let dims = n.grid().dims();
    let others: Vec<usize> = (0..4).filter(|&r| r != mu && r != nu).collect();
    let mut out = Vec::new();
    for a in 0..dims[others[0]] {
        for b in 0..dims[others[1]] {
            let mut base = [0; 4];
            base[others[0]] = a;
            base[others[1]] = b;
            out.push(degree_2torus(n, plane, base)?.degree);
        }
    }
    Ok(out)
}

/// True when every plane has the same degree on all parallel slices.
pub fn slice_independent(n: &SphereMapField) -> Result<bool> {
    for p in 0..6 {
        let d = slice_degrees(n, p)?;
        if d.iter().any(|&v| v != d[0]) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq)]
pub struct C1Comparison {
    pub equal: bool,
    pub alpha: DegreeVector,
    pub reference: DegreeVector,
    /// Both fields have slice-independent degrees in every plane.
    pub slice_independent: bool,
}

/// Compare the degree data of `alpha` with that of the reference structure.
pub fn c1_equal(alpha: &Field<SdForm>, reference: &Field<SdForm>, tol: f64) -> Result<C1Comparison> {
    alpha.grid().check_same(reference.grid())?;
    let na = sphere_map(alpha, tol)?;
    let nr = sphere_map(reference, tol)?;
    let da = degree_vector(&na, [0; 4])?;
    let dr = degree_vector(&nr, [0; 4])?;
    Ok(C1Comparison {
        equal: da == dr,
        alpha: da,
        reference: dr,
        slice_independent: slice_independent(&na)? && slice_independent(&nr)?,
    })
}

/// Unit direction of a planar winding map on the unit square: the disk of
/// radius `radius` about the center wraps `degree` times around S² (north
/// pole at the center, azimuth `degree·atan2`), everything outside maps to
/// the south pole.
pub fn winding_direction(u: f64, v: f64, degree: i64, radius: f64) -> [f64; 3] {
    let wrap = |t: f64| t - t.floor();
    let (du, dv) = (wrap(u) - 0.5, wrap(v) - 0.5);
    let rho = (du * du + dv * dv).sqrt();
    if rho >= radius {
        return [0.0, 0.0, -1.0];
    }
    let theta = PI * rho / radius;
    let phi = degree as f64 * dv.atan2(du);
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

/// Default disk radius for [`winding_field`].
pub const WINDING_RADIUS: f64 = 0.45;

/// Unit self-dual form field whose direction winds `degree` times over the
/// coordinate 2-torus of plane `plane` and is constant along the other axes.
pub fn winding_field(grid: Grid, plane: usize, degree: i64) -> Field<SdForm> {
    let (mu, nu) = PLANES[plane];
    let periods = grid.periods();
    Field::sample(grid, |x| {
        SdForm(winding_direction(x[mu] / periods[mu], x[nu] / periods[nu], degree, WINDING_RADIUS))
    })
}
