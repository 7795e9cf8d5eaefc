//! The one-line quadrilateral text form: `s t phi` or eight vertex coordinates.

use peg_core::quadrilateral::{params_from_points, vertices_from_params};
use peg_core::{Complex64, Params, QuadError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuadSpecError {
    #[error("bad number {0:?}")]
    Number(String),
    #[error("expected 3 numbers (s t phi) or 8 (vertex coordinates), got {0}")]
    Count(usize),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// Splits every argument on whitespace and parses the pieces.
pub fn numbers(args: &[String]) -> Result<Vec<f64>, QuadSpecError> {
    args.iter()
        .flat_map(|a| a.split_whitespace())
        .map(|tok| {
            tok.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| QuadSpecError::Number(tok.to_string()))
        })
        .collect()
}

pub fn points(v: &[f64]) -> [Complex64; 4] {
    [0, 1, 2, 3].map(|i| Complex64::new(v[2 * i], v[2 * i + 1]))
}

/// Parameters from either form; vertex input is checked with the chord
/// theorem at relative tolerance `cyclic_tol`.
pub fn parse(args: &[String], cyclic_tol: f64) -> Result<Params, QuadSpecError> {
    let v = numbers(args)?;
    match v.len() {
        3 => Ok(Params::new(v[0], v[1], v[2])?),
        8 => Ok(params_from_points(&points(&v), cyclic_tol)?),
        n => Err(QuadSpecError::Count(n)),
    }
}

pub fn format_params(q: &Params) -> String {
    format!("{} {} {}", q.s(), q.t(), q.phi())
}

pub fn format_vertices(q: &Params) -> String {
    vertices_from_params(q)
        .points()
        .iter()
        .map(|p| format!("{} {}", p.re, p.im))
        .collect::<Vec<_>>()
        .join(" ")
}
