//! Browser bindings for the static demo page in `www/`.
//!
//! Each export takes plain numbers and returns a JSON string. The functions
//! with a `_json` suffix build `serde_json::Value`s and run natively too.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use spinc_core::checks::identity_convergence;
use spinc_core::clifford::SpinorPlus;
use spinc_core::forms::{acs_from_sd, conformal_factor, PLANES};
use spinc_core::grid::Grid;
use spinc_core::Complex64;
use spinc_core::squaring::{bloch, field_preimage, pointwise_preimage, sigma, Preimage};
use spinc_core::topology::{degree_vector, slice_independent, sphere_map, winding_field};

const TOL: f64 = 1e-12;

fn error(e: impl std::fmt::Display) -> Value {
    json!({ "error": e.to_string() })
}

/// σ of the spinor `(a, b)` with its Bloch data, the almost complex
/// structure it induces and the preimage round trip.
pub fn square_json(a_re: f64, a_im: f64, b_re: f64, b_im: f64) -> Value {
    let phi = SpinorPlus::new(Complex64::new(a_re, a_im), Complex64::new(b_re, b_im));
    let s = sigma(&phi);
    let b = bloch(&phi);
    let mut out = json!({
        "sigma": s.0,
        "norm_sqr": b.r,
        "sigma_norm": s.norm(),
        "direction": b.n,
    });
    if let (Ok(j), Ok(f)) = (acs_from_sd(&s, TOL), conformal_factor(&s)) {
        out["acs"] = json!(j.0);
        out["conformal_factor"] = json!(f);
    }
    match pointwise_preimage(&s, TOL) {
        Ok(psi) => {
            let back = sigma(&psi);
            let err = (0..3).map(|k| (back.0[k] - s.0[k]).abs()).fold(0.0, f64::max);
            out["preimage"] = json!([[psi.0[0].re, psi.0[0].im], [psi.0[1].re, psi.0[1].im]]);
            out["roundtrip_error"] = json!(err);
        }
        Err(e) => out["preimage_error"] = json!(e.to_string()),
    }
    out
}

/// Slice image of a self-dual form winding `degree` times over `plane`,
/// with its degree vector and whether a global square root exists.
pub fn winding_json(n: usize, plane: usize, degree: i64) -> Value {
    if plane >= 6 {
        return error("plane must be in 0..6");
    }
    let (mu, nu) = PLANES[plane];
    let mut dims = [4; 4];
    dims[mu] = n;
    dims[nu] = n;
    let grid = match Grid::new(dims) {
        Ok(g) => g,
        Err(e) => return error(e),
    };
    let alpha = winding_field(grid, plane, degree);
    let map = match sphere_map(&alpha, TOL) {
        Ok(m) => m,
        Err(e) => return error(e),
    };
    let mut rgb = Vec::with_capacity(3 * n * n);
    for i in 0..n {
        for j in 0..n {
            let mut c = [0; 4];
            c[mu] = i;
            c[nu] = j;
            let v = map.0[grid.index(c)];
            rgb.extend(v.map(|x| (127.5 * (x + 1.0)).round() as u8));
        }
    }
    let degrees = degree_vector(&map, [0; 4]);
    let independent = slice_independent(&map);
    let lift = match field_preimage(&alpha, TOL) {
        Ok(Preimage::Lifted(_)) => json!({ "lifted": true }),
        Ok(Preimage::Obstructed(r)) => json!({ "lifted": false, "max_jump": r.max_jump }),
        Err(e) => error(e),
    };
    match (degrees, independent) {
        (Ok(d), Ok(s)) => json!({
            "size": n,
            "axes": [mu, nu],
            "rgb": rgb,
            "degrees": d,
            "slice_independent": s,
            "preimage": lift,
        }),
        (Err(e), _) | (_, Err(e)) => error(e),
    }
}

/// Residual of the differential identity on smooth random data for the
/// given grid sizes, with the observed order between the last two.
pub fn identity_json(sizes: &[usize], seed: u64) -> Value {
    match identity_convergence(sizes, seed) {
        Ok(t) => json!({ "rows": t.rows, "orders": t.orders, "observed_order": t.observed_order() }),
        Err(e) => error(e),
    }
}

#[wasm_bindgen]
pub fn square(a_re: f64, a_im: f64, b_re: f64, b_im: f64) -> String {
    square_json(a_re, a_im, b_re, b_im).to_string()
}

#[wasm_bindgen]
pub fn winding(n: usize, plane: usize, degree: i32) -> String {
    winding_json(n, plane, degree.into()).to_string()
}

#[wasm_bindgen]
pub fn identity(sizes: Vec<u32>, seed: u32) -> String {
    let sizes: Vec<usize> = sizes.into_iter().map(|n| n as usize).collect();
    identity_json(&sizes, seed.into()).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_of_up_spinor() {
        let v = square_json(1.0, 0.0, 0.0, 0.0);
        assert_eq!(v["sigma"], json!([1.0, 0.0, 0.0]));
        assert_eq!(v["roundtrip_error"], json!(0.0));
        assert!(v.get("acs").is_some());
        let zero = square_json(0.0, 0.0, 0.0, 0.0);
        assert!(zero["direction"].is_null());
        assert!(zero.get("preimage_error").is_some());
    }

    #[test]
    fn winding_reports_degree_and_obstruction() {
        let v = winding_json(16, 3, 2);
        assert_eq!(v["degrees"], json!([0, 0, 0, 2, 0, 0]));
        assert_eq!(v["rgb"].as_array().unwrap().len(), 3 * 16 * 16);
        assert_eq!(v["preimage"]["lifted"], false);
        assert_eq!(winding_json(8, 0, 0)["preimage"]["lifted"], true);
        assert!(winding_json(6, 9, 1).get("error").is_some());
        assert!(winding_json(5, 0, 1).get("error").is_some());
    }

    #[test]
    fn identity_small_run() {
        let v = identity_json(&[4, 8], 3);
        assert_eq!(v["rows"].as_array().unwrap().len(), 2);
        assert!(v["observed_order"].as_f64().unwrap() > 1.0);
    }
}
