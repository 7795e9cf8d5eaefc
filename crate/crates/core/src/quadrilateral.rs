//! Cyclic quadrilaterals, their `(s, t, phi)` parameters and the linear maps
//! `F_r`, `R_phi` of `C^2` whose equation characterizes them.
//!
//! Conventions. For a convex quadrilateral `ABCD` labelled counterclockwise with
//! diagonals meeting at `X`, the parameters are
//!
//! * `s = |CX| / |AC|`, `t = |DX| / |BD|`, both in `(0, 1/2]`,
//! * `phi` the counterclockwise angle from `XA` to `XB`, in `(0, pi)`.
//!
//! This is the labelling under which `R_phi F_s (A, C) = F_t (B, D)` holds.
//! Measuring the ratios from `A` and `B` instead names the same oriented
//! similarity class after relabelling `(A, B, C, D) -> (C, D, A, B)`.

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::{lit, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum QuadError {
    #[error("ratio {0} outside (0, 1/2]")]
    RatioOutOfRange(f64),
    #[error("angle {0} outside (0, pi)")]
    AngleOutOfRange(f64),
    #[error("non-finite input")]
    NonFinite,
    #[error("vertices are not pairwise distinct")]
    RepeatedVertex,
    #[error("not convex: diagonals AC and BD do not cross")]
    NotConvex,
    #[error("vertices are not labelled counterclockwise")]
    NotCounterclockwise,
    #[error("not cyclic: chord products {ac} and {bd} differ")]
    NotCyclic { ac: f64, bd: f64 },
}

/// An oriented similarity class of cyclic quadrilaterals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CyclicQuadParams<T> {
    s: T,
    t: T,
    phi: T,
}

fn check_ratio<T: Scalar>(r: T) -> Result<(), QuadError> {
    if !r.is_finite() {
        return Err(QuadError::NonFinite);
    }
    if r > T::zero() && r <= lit(0.5) {
        Ok(())
    } else {
        Err(QuadError::RatioOutOfRange(r.to_f64().unwrap_or(f64::NAN)))
    }
}

impl<T: Scalar> CyclicQuadParams<T> {
    pub fn new(s: T, t: T, phi: T) -> Result<Self, QuadError> {
        check_ratio(s)?;
        check_ratio(t)?;
        if !phi.is_finite() {
            return Err(QuadError::NonFinite);
        }
        if !(phi > T::zero() && phi < T::PI()) {
            return Err(QuadError::AngleOutOfRange(phi.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self { s, t, phi })
    }

    /// The square: `s = t = 1/2`, `phi = pi/2`.
    pub fn square() -> Self {
        let half = lit(0.5);
        Self {
            s: half,
            t: half,
            phi: T::FRAC_PI_2(),
        }
    }

    pub fn s(&self) -> T {
        self.s
    }

    pub fn t(&self) -> T {
        self.t
    }

    pub fn phi(&self) -> T {
        self.phi
    }
}

/// A point `(z, w)` of `C^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexPair<T> {
    pub z: Complex<T>,
    pub w: Complex<T>,
}

impl<T: Scalar> ComplexPair<T> {
    pub fn new(z: Complex<T>, w: Complex<T>) -> Self {
        Self { z, w }
    }
}

/// `F_r (z, w) = (r z + (1 - r) w, sqrt(r (1 - r)) (z - w))`.
pub fn apply_f<T: Scalar>(r: T, p: ComplexPair<T>) -> Result<ComplexPair<T>, QuadError> {
    check_ratio(r)?;
    Ok(f_unchecked(r, p))
}

#[inline]
fn f_unchecked<T: Scalar>(r: T, p: ComplexPair<T>) -> ComplexPair<T> {
    let q = T::one() - r;
    let k = (r * q).sqrt();
    ComplexPair {
        z: p.z * r + p.w * q,
        w: (p.z - p.w) * k,
    }
}

/// `R_phi (z, w) = (z, e^{i phi} w)`.
pub fn apply_r<T: Scalar>(phi: T, p: ComplexPair<T>) -> ComplexPair<T> {
    ComplexPair {
        z: p.z,
        w: p.w * Complex::from_polar(T::one(), phi),
    }
}

/// Real and imaginary parts of `R_phi F_s (A, C) - F_t (B, D)`, in the order
/// `[re z, im z, re w, im w]`. Vanishes exactly on inscriptions of `q`
/// (together with the degenerate configurations `A = B = C = D`).
pub fn inscription_residual<T: Scalar>(q: &CyclicQuadParams<T>, pts: &[Complex<T>; 4]) -> [T; 4] {
    let [a, b, c, d] = *pts;
    let lhs = apply_r(q.phi, f_unchecked(q.s, ComplexPair::new(a, c)));
    let rhs = f_unchecked(q.t, ComplexPair::new(b, d));
    let dz = lhs.z - rhs.z;
    let dw = lhs.w - rhs.w;
    [dz.re, dz.im, dw.re, dw.im]
}

/// `true` when `A` and `C` are within `tol` of each other.
pub fn is_degenerate<T: Scalar>(pts: &[Complex<T>; 4], tol: T) -> bool {
    (pts[0] - pts[2]).norm() < tol
}

#[inline]
fn cross<T: Scalar>(u: Complex<T>, v: Complex<T>) -> T {
    u.re * v.im - u.im * v.re
}

/// Intersection of the open segments `AC` and `BD`.
///
/// Returns `(X, u, v)` with `X = A + u (C - A) = B + v (D - B)`, `u, v in (0, 1)`.
fn diagonal_intersection<T: Scalar>(pts: &[Complex<T>; 4]) -> Result<(Complex<T>, T, T), QuadError> {
    let [a, b, c, d] = *pts;
    if pts.iter().any(|p| !p.re.is_finite() || !p.im.is_finite()) {
        return Err(QuadError::NonFinite);
    }
    let e = c - a;
    let f = d - b;
    let denom = cross(e, f);
    if denom == T::zero() {
        return Err(QuadError::NotConvex);
    }
    let g = b - a;
    let u = cross(g, f) / denom;
    let v = cross(g, e) / denom;
    let inside = |x: T| x > T::zero() && x < T::one();
    if !(inside(u) && inside(v)) {
        return Err(QuadError::NotConvex);
    }
    Ok((a + e * u, u, v))
}

/// Chord products `(|AX||CX|, |BX||DX|)` at the diagonal intersection.
pub fn chord_products<T: Scalar>(pts: &[Complex<T>; 4]) -> Result<(T, T), QuadError> {
    let (x, _, _) = diagonal_intersection(pts)?;
    let [a, b, c, d] = *pts;
    Ok(((a - x).norm() * (c - x).norm(), (b - x).norm() * (d - x).norm()))
}

/// Chord-theorem test with relative tolerance `tol`.
pub fn is_cyclic<T: Scalar>(pts: &[Complex<T>; 4], tol: T) -> Result<bool, QuadError> {
    let (ac, bd) = chord_products(pts)?;
    Ok((ac - bd).abs() <= tol * ac.max(bd))
}

/// Four pairwise distinct points in convex counterclockwise position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadVertices<T> {
    pts: [Complex<T>; 4],
}

impl<T: Scalar> QuadVertices<T> {
    pub fn new(pts: [Complex<T>; 4]) -> Result<Self, QuadError> {
        for i in 0..4 {
            for j in i + 1..4 {
                if pts[i] == pts[j] {
                    return Err(QuadError::RepeatedVertex);
                }
            }
        }
        diagonal_intersection(&pts)?;
        if signed_area(&pts) <= T::zero() {
            return Err(QuadError::NotCounterclockwise);
        }
        Ok(Self { pts })
    }

    pub fn points(&self) -> &[Complex<T>; 4] {
        &self.pts
    }

    pub fn a(&self) -> Complex<T> {
        self.pts[0]
    }
    pub fn b(&self) -> Complex<T> {
        self.pts[1]
    }
    pub fn c(&self) -> Complex<T> {
        self.pts[2]
    }
    pub fn d(&self) -> Complex<T> {
        self.pts[3]
    }
}

/// Shoelace area of the polygon `ABCD`, positive when counterclockwise.
pub fn signed_area<T: Scalar>(pts: &[Complex<T>; 4]) -> T {
    let mut acc = T::zero();
    for i in 0..4 {
        acc += cross(pts[i], pts[(i + 1) % 4]);
    }
    acc * lit(0.5)
}

/// Recovers `(s, t, phi)` from a labelled cyclic quadrilateral.
///
/// All four cyclic relabellings are tried; among those with both ratios in
/// `(0, 1/2]` the smallest `(s, t, phi)` in lexicographic order is returned.
pub fn params_from_vertices<T: Scalar>(
    v: &QuadVertices<T>,
    tol: T,
) -> Result<CyclicQuadParams<T>, QuadError> {
    let pts = v.points();
    let (x, u, w) = diagonal_intersection(pts)?;
    let [a, b, c, d] = *pts;
    let ac = (a - x).norm() * (c - x).norm();
    let bd = (b - x).norm() * (d - x).norm();
    if (ac - bd).abs() > tol * ac.max(bd) {
        return Err(QuadError::NotCyclic {
            ac: ac.to_f64().unwrap_or(f64::NAN),
            bd: bd.to_f64().unwrap_or(f64::NAN),
        });
    }
    let one = T::one();
    let half: T = lit(0.5);
    // Ratios measured from C and D.
    let s0 = one - u;
    let t0 = one - w;
    let phi0 = ((b - d) * (a - c).conj()).arg();
    let pi = T::PI();
    let candidates = [
        (s0, t0, phi0),
        (t0, one - s0, pi - phi0),
        (one - s0, one - t0, phi0),
        (one - t0, s0, pi - phi0),
    ];
    let slack = lit::<T>(8.0) * T::epsilon();
    let mut best: Option<(T, T, T)> = None;
    for (s, t, phi) in candidates {
        if s > half + slack || t > half + slack {
            continue;
        }
        let cand = (s.min(half), t.min(half), phi);
        best = match best {
            None => Some(cand),
            Some(cur) => {
                let key = |p: &(T, T, T)| (p.0, p.1, p.2);
                if key(&cand).partial_cmp(&key(&cur)) == Some(std::cmp::Ordering::Less) {
                    Some(cand)
                } else {
                    Some(cur)
                }
            }
        };
    }
    let (s, t, phi) = best.expect("one relabelling always has both ratios at most 1/2");
    CyclicQuadParams::new(s, t, phi)
}

/// Convexity, then the chord theorem, then orientation; the order in which a
/// user-supplied vertex list is checked.
pub fn params_from_points<T: Scalar>(
    pts: &[Complex<T>; 4],
    tol: T,
) -> Result<CyclicQuadParams<T>, QuadError> {
    if !is_cyclic(pts, tol)? {
        let (ac, bd) = chord_products(pts)?;
        return Err(QuadError::NotCyclic {
            ac: ac.to_f64().unwrap_or(f64::NAN),
            bd: bd.to_f64().unwrap_or(f64::NAN),
        });
    }
    params_from_vertices(&QuadVertices::new(*pts)?, tol)
}

/// Canonical representative: `X = 0`, `A = -(1 - s)`, `C = s`,
/// `B = -(1 - t) k e^{i phi}`, `D = t k e^{i phi}` with
/// `k = sqrt(s (1 - s) / (t (1 - t)))`.
pub fn vertices_from_params<T: Scalar>(q: &CyclicQuadParams<T>) -> QuadVertices<T> {
    let one = T::one();
    let k = (q.s * (one - q.s) / (q.t * (one - q.t))).sqrt();
    let e = Complex::from_polar(k, q.phi);
    QuadVertices {
        pts: [
            Complex::new(-(one - q.s), T::zero()),
            -e * (one - q.t),
            Complex::new(q.s, T::zero()),
            e * q.t,
        ],
    }
}

/// Equality of oriented similarity classes, including the identification of
/// `(s, t, phi)` with `(t, s, pi - phi)` when one ratio is `1/2`.
pub fn similarity_class_equal<T: Scalar>(
    q1: &CyclicQuadParams<T>,
    q2: &CyclicQuadParams<T>,
    tol: T,
) -> bool {
    let close = |x: T, y: T| (x - y).abs() <= tol;
    if close(q1.s, q2.s) && close(q1.t, q2.t) && close(q1.phi, q2.phi) {
        return true;
    }
    let half = lit(0.5);
    (close(q1.s, half) || close(q1.t, half))
        && close(q2.s, q1.t)
        && close(q2.t, q1.s)
        && close(q2.phi, T::PI() - q1.phi)
}
