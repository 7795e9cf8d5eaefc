//! Maslov indices of loops of Lagrangian planes in `C^2` carrying the product
//! form `c1 dz1 ^ dz1bar + c2 dz2 ^ dz2bar`.
//!
//! A plane is framed by rescaling coordinates by `sqrt(c_i)` and
//! orthonormalizing a real basis; the frame is then unitary and the index of
//! a loop is the winding number of `det^2` of its frames.

use num_complex::Complex;
use num_integer::Integer;
use thiserror::Error;

use crate::curve::FourierCurve;
use crate::quadrilateral::{apply_f, apply_r, ComplexPair, QuadError};
use crate::scalar::{lit, Scalar};
use crate::winding::{winding_number, WindingError};

/// Tolerance on the relative symplectic defect of a plane.
pub const LAGRANGIAN_TOL: f64 = 1e-10;

pub const DEFAULT_LOOP_SAMPLES: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum MaslovError {
    #[error("form weights must be positive")]
    BadWeights,
    #[error("basis vectors are linearly dependent")]
    DegeneratePlane,
    #[error("plane is not Lagrangian: relative defect {defect:e}")]
    NotLagrangian { defect: f64 },
    #[error("map parameters: {0}")]
    Map(#[from] QuadError),
    #[error("{0}")]
    Winding(#[from] WindingError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormWeights<T> {
    c1: T,
    c2: T,
}

impl<T: Scalar> FormWeights<T> {
    pub fn new(c1: T, c2: T) -> Result<Self, MaslovError> {
        if c1 > T::zero() && c2 > T::zero() && c1.is_finite() && c2.is_finite() {
            Ok(Self { c1, c2 })
        } else {
            Err(MaslovError::BadWeights)
        }
    }

    /// The standard form, `c1 = c2 = 1`.
    pub fn standard() -> Self {
        Self {
            c1: T::one(),
            c2: T::one(),
        }
    }

    /// `(r, 1 - r)`, the pullback of the standard form under `F_r`.
    pub fn pullback(r: T) -> Result<Self, MaslovError> {
        Self::new(r, T::one() - r)
    }

    pub fn c1(&self) -> T {
        self.c1
    }

    pub fn c2(&self) -> T {
        self.c2
    }

    fn rescale(&self, v: [Complex<T>; 2]) -> [Complex<T>; 2] {
        [v[0] * self.c1.sqrt(), v[1] * self.c2.sqrt()]
    }
}

fn hermitian<T: Scalar>(u: &[Complex<T>; 2], v: &[Complex<T>; 2]) -> Complex<T> {
    u[0] * v[0].conj() + u[1] * v[1].conj()
}

fn real_norm<T: Scalar>(u: &[Complex<T>; 2]) -> T {
    (u[0].norm_sqr() + u[1].norm_sqr()).sqrt()
}

/// A real 2-plane in `C^2` given by a basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagrangianPlane<T> {
    v1: [Complex<T>; 2],
    v2: [Complex<T>; 2],
}

impl<T: Scalar> LagrangianPlane<T> {
    /// Checks independence and that the weighted form vanishes on `(v1, v2)`.
    pub fn new(v1: [Complex<T>; 2], v2: [Complex<T>; 2], weights: &FormWeights<T>) -> Result<Self, MaslovError> {
        let plane = Self { v1, v2 };
        let (a, b) = (weights.rescale(v1), weights.rescale(v2));
        let (na, nb) = (real_norm(&a), real_norm(&b));
        if !(na > T::zero() && nb > T::zero()) {
            return Err(MaslovError::DegeneratePlane);
        }
        let defect = (hermitian(&a, &b).im / (na * nb)).abs();
        if !(defect <= lit(LAGRANGIAN_TOL)) {
            return Err(MaslovError::NotLagrangian {
                defect: defect.to_f64().unwrap_or(f64::NAN),
            });
        }
        // Independence is checked when framing.
        unitary_frame(&plane, weights)?;
        Ok(plane)
    }

    pub fn basis(&self) -> ([Complex<T>; 2], [Complex<T>; 2]) {
        (self.v1, self.v2)
    }

    /// Distance from `v` to this plane's real span (Euclidean metric on
    /// `C^2 = R^4`), relative to `|v|`.
    pub fn relative_distance(&self, v: [Complex<T>; 2]) -> T {
        let frame = orthonormalize(self.v1, self.v2).expect("plane basis is independent");
        let mut rest = v;
        for e in frame {
            let coef = hermitian(&rest, &e).re;
            rest = [rest[0] - e[0] * coef, rest[1] - e[1] * coef];
        }
        real_norm(&rest) / real_norm(&v)
    }
}

/// Gram-Schmidt under the real inner product `Re <u, v>`.
fn orthonormalize<T: Scalar>(a: [Complex<T>; 2], b: [Complex<T>; 2]) -> Result<[[Complex<T>; 2]; 2], MaslovError> {
    let na = real_norm(&a);
    if !(na > T::zero()) {
        return Err(MaslovError::DegeneratePlane);
    }
    let e1 = [a[0] / na, a[1] / na];
    let p = hermitian(&b, &e1).re;
    let r = [b[0] - e1[0] * p, b[1] - e1[1] * p];
    let nr = real_norm(&r);
    if !(nr > lit::<T>(1e-12) * real_norm(&b)) {
        return Err(MaslovError::DegeneratePlane);
    }
    Ok([e1, [r[0] / nr, r[1] / nr]])
}

/// Unitary frame of a plane after the `sqrt(c_i)` rescaling. `frame[j]` is
/// column `j`.
pub fn unitary_frame<T: Scalar>(plane: &LagrangianPlane<T>, weights: &FormWeights<T>) -> Result<[[Complex<T>; 2]; 2], MaslovError> {
    orthonormalize(weights.rescale(plane.v1), weights.rescale(plane.v2))
}

/// `det(U)^2` for a frame given by columns.
pub fn det_squared<T: Scalar>(frame: &[[Complex<T>; 2]; 2]) -> Complex<T> {
    let det = frame[0][0] * frame[1][1] - frame[1][0] * frame[0][1];
    det * det
}

/// A closed loop of Lagrangian planes sampled at `theta_j = j / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianLoop<T> {
    samples: Vec<LagrangianPlane<T>>,
    weights: FormWeights<T>,
}

impl<T: Scalar> LagrangianLoop<T> {
    pub fn new(samples: Vec<LagrangianPlane<T>>, weights: FormWeights<T>) -> Self {
        Self { samples, weights }
    }

    pub fn samples(&self) -> &[LagrangianPlane<T>] {
        &self.samples
    }

    pub fn weights(&self) -> &FormWeights<T> {
        &self.weights
    }
}

/// Winding number of `det^2` of the unitary frames around the loop.
pub fn maslov_index<T: Scalar>(lp: &LagrangianLoop<T>) -> Result<i64, MaslovError> {
    let phases = lp
        .samples
        .iter()
        .map(|p| unitary_frame(p, &lp.weights).map(|f| det_squared(&f)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(winding_number(&phases)?)
}

fn loop_parameters<T: Scalar>(samples: usize) -> impl Iterator<Item = T> {
    let n = T::from_usize(samples).unwrap();
    (0..samples).map(move |j| T::from_usize(j).unwrap() / n)
}

/// Tangent planes of `gamma x gamma` along a loop in the class
/// `m [gamma x pt] + n [pt x gamma]`, based at `(gamma(0), gamma(0))`.
pub fn torus_loop<T: Scalar>(
    curve: &FourierCurve<T>,
    weights: FormWeights<T>,
    m: i64,
    n: i64,
    samples: usize,
) -> Result<LagrangianLoop<T>, MaslovError> {
    let (mm, nn) = (T::from_i64(m).unwrap(), T::from_i64(n).unwrap());
    let zero = Complex::new(T::zero(), T::zero());
    let planes = loop_parameters::<T>(samples)
        .map(|th| {
            let u = curve.deriv(mm * th);
            let v = curve.deriv(nn * th);
            LagrangianPlane::new([u, zero], [zero, v], &weights)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(LagrangianLoop::new(planes, weights))
}

/// The two C-linear maps `F_t` and `R_phi F_s` carrying `gamma x gamma` to
/// the tori `T_2` and `T_1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TorusMap<T> {
    F { r: T },
    RotatedF { s: T, phi: T },
}

impl<T: Scalar> TorusMap<T> {
    pub fn apply(&self, v: [Complex<T>; 2]) -> Result<[Complex<T>; 2], MaslovError> {
        let p = ComplexPair::new(v[0], v[1]);
        let out = match *self {
            TorusMap::F { r } => apply_f(r, p)?,
            TorusMap::RotatedF { s, phi } => apply_r(phi, apply_f(s, p)?),
        };
        Ok([out.z, out.w])
    }

    /// The weights `(r, 1 - r)` whose form this map carries to the standard one.
    pub fn source_weights(&self) -> Result<FormWeights<T>, MaslovError> {
        match *self {
            TorusMap::F { r } => FormWeights::pullback(r),
            TorusMap::RotatedF { s, .. } => FormWeights::pullback(s),
        }
    }
}

/// Pushes the `(m, n)` tangent loop of `gamma x gamma` forward through `map`.
/// Every image plane is checked to be Lagrangian for the standard form.
pub fn image_torus_loop<T: Scalar>(
    curve: &FourierCurve<T>,
    map: TorusMap<T>,
    m: i64,
    n: i64,
    samples: usize,
) -> Result<LagrangianLoop<T>, MaslovError> {
    let source = torus_loop(curve, map.source_weights()?, m, n, samples)?;
    let weights = FormWeights::standard();
    let planes = source
        .samples
        .iter()
        .map(|p| LagrangianPlane::new(map.apply(p.v1)?, map.apply(p.v2)?, &weights))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(LagrangianLoop::new(planes, weights))
}

/// Non-negative generator of the subgroup of `Z` spanned by the indices of a
/// homology basis.
pub fn minimum_maslov_number(first: i64, second: i64) -> u64 {
    first.gcd(&second).unsigned_abs()
}
