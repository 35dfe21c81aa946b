use thiserror::Error;

use crate::harmonic::SolveReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("degenerate form (modulus {modulus:e} <= tolerance {tol:e}){}", site_suffix(*.site))]
    DegenerateForm {
        site: Option<usize>,
        modulus: f64,
        tol: f64,
    },

    #[error("field vanishes identically")]
    ZeroField,

    #[error("plaquette flux in plane {plane} is not quantized: {value}")]
    NonQuantizedFlux { plane: usize, value: f64 },

    #[error("flux in plane {plane} depends on the slice: {first} vs {other}")]
    FluxSliceMismatch { plane: usize, first: i64, other: i64 },

    #[error("adjacent sphere-map images at sites {a} and {b} are antipodal")]
    AntipodalEdge { a: usize, b: usize },

    #[error("degree sum {value} is not close to an integer")]
    NonIntegerDegree { value: f64 },

    #[error("eigensolver did not converge after {} iterations", .report.iterations)]
    NotConverged { report: SolveReport },

    #[error("corrupt archive header: {0}")]
    CorruptHeader(String),

    #[error("archive payload length {actual} does not match expected {expected}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("unsupported archive version {0}")]
    UnsupportedVersion(u32),

    #[error("archive holds a {found} field, expected {expected}")]
    KindMismatch { expected: String, found: String },

    #[error("invalid report: {0}")]
    Report(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn site_suffix(site: Option<usize>) -> String {
    site.map(|s| format!(" at site {s}")).unwrap_or_default()
}
