//! Closed plane curves given by truncated Fourier series
//! `z(theta) = sum_{k=-K..K} c_k e^{2 pi i k theta}`, `theta` in `R/Z`.

use std::fmt::Write as _;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::scalar::{lit, wrap_unit, Scalar};
use crate::winding::{winding_number, WindingError};

pub const FILE_HEADER: &str = "fourier-curve v1";

/// Retry budget for random curve generation.
pub const MAX_GENERATE_ATTEMPTS: u64 = 200;

/// Scale applied to the `|k|^{-decay}` magnitude profile of random curves.
const RANDOM_AMPLITUDE: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurveError {
    #[error("expected {expected} coefficients for K = {k_max}, got {got}")]
    CoefficientCount { k_max: usize, expected: usize, got: usize },
    #[error("turning number: {0}")]
    Winding(#[from] WindingError),
    #[error("no valid curve after {attempts} attempts")]
    GenerationFailed { attempts: u64 },
    #[error("invalid generator argument: {0}")]
    BadArgument(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurveFileError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing header line \"{FILE_HEADER}\"")]
    Header,
    #[error("duplicate coefficient index k = {0}")]
    Duplicate(i64),
    #[error("missing coefficient index k = {0}")]
    Missing(i64),
    #[error("coefficient index k = {0} outside -K..K")]
    OutOfRange(i64),
    #[error("coefficients are not in increasing k (k = {0})")]
    Order(i64),
}

/// A point of the curve together with its velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSample<T> {
    pub theta: T,
    pub point: Complex<T>,
    pub tangent: Complex<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourierCurve<T> {
    k_max: usize,
    /// `coeffs[k + K]` is `c_k`.
    coeffs: Vec<Complex<T>>,
}

impl<T: Scalar> FourierCurve<T> {
    /// Builds a curve from `c_{-K}, ..., c_K`.
    pub fn from_coefficients(k_max: usize, coeffs: Vec<Complex<T>>) -> Result<Self, CurveError> {
        let expected = 2 * k_max + 1;
        if coeffs.len() != expected {
            return Err(CurveError::CoefficientCount {
                k_max,
                expected,
                got: coeffs.len(),
            });
        }
        Ok(Self { k_max, coeffs })
    }

    /// Unit circle, counterclockwise.
    pub fn circle() -> Self {
        let mut coeffs = vec![Complex::new(T::zero(), T::zero()); 3];
        coeffs[2] = Complex::new(T::one(), T::zero());
        Self { k_max: 1, coeffs }
    }

    /// The ellipse `(a cos 2 pi theta, b sin 2 pi theta)`.
    pub fn ellipse(a: T, b: T) -> Self {
        let half = lit::<T>(0.5);
        Self {
            k_max: 1,
            coeffs: vec![
                Complex::new((a - b) * half, T::zero()),
                Complex::new(T::zero(), T::zero()),
                Complex::new((a + b) * half, T::zero()),
            ],
        }
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn coefficients(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    /// `c_k`, zero outside `-K..K`.
    pub fn coefficient(&self, k: i64) -> Complex<T> {
        let idx = k + self.k_max as i64;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            Complex::new(T::zero(), T::zero())
        } else {
            self.coeffs[idx as usize]
        }
    }

    /// The curve `alpha z + beta`.
    pub fn transformed(&self, alpha: Complex<T>, beta: Complex<T>) -> Self {
        let mut coeffs: Vec<_> = self.coeffs.iter().map(|c| c * alpha).collect();
        coeffs[self.k_max] += beta;
        Self {
            k_max: self.k_max,
            coeffs,
        }
    }

    /// The same trace traversed backwards, `theta -> -theta`.
    pub fn reversed(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        Self {
            k_max: self.k_max,
            coeffs,
        }
    }

    pub fn eval(&self, theta: T) -> Complex<T> {
        self.eval_with_deriv(theta).0
    }

    pub fn deriv(&self, theta: T) -> Complex<T> {
        self.eval_with_deriv(theta).1
    }

    /// `(z(theta), z'(theta))` from a single pass over the coefficients.
    pub fn eval_with_deriv(&self, theta: T) -> (Complex<T>, Complex<T>) {
        let two_pi = lit::<T>(2.0) * T::PI();
        let base = Complex::from_polar(T::one(), two_pi * wrap_unit(theta));
        let k_max = self.k_max;
        let mut value = self.coeffs[k_max];
        let mut slope = Complex::new(T::zero(), T::zero());
        let mut pow = Complex::new(T::one(), T::zero());
        for k in 1..=k_max {
            pow *= base;
            let pos = self.coeffs[k_max + k] * pow;
            let neg = self.coeffs[k_max - k] * pow.conj();
            value = value + pos + neg;
            slope += (pos - neg) * T::from_usize(k).unwrap();
        }
        (value, slope * Complex::new(T::zero(), two_pi))
    }

    pub fn sample(&self, theta: T) -> CurveSample<T> {
        let (point, tangent) = self.eval_with_deriv(theta);
        CurveSample {
            theta: wrap_unit(theta),
            point,
            tangent,
        }
    }

    /// Samples at `theta_j = j / n`.
    pub fn samples(&self, n: usize) -> Vec<CurveSample<T>> {
        let nn = T::from_usize(n).unwrap();
        (0..n)
            .map(|j| self.sample(T::from_usize(j).unwrap() / nn))
            .collect()
    }

    /// Largest distance between two of `n` uniform samples.
    pub fn diameter(&self, n: usize) -> T {
        let pts: Vec<_> = self.samples(n).into_iter().map(|s| s.point).collect();
        let mut best = T::zero();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                best = best.max((pts[i] - pts[j]).norm_sqr());
            }
        }
        best.sqrt()
    }

    /// Default sample count for the validity checks, `max(1024, 64 K)`.
    pub fn default_validation_samples(&self) -> usize {
        1024.max(64 * self.k_max)
    }

    pub fn validate(&self, opts: &ValidationOptions<T>) -> ValidityReport<T> {
        let n = opts.n_samples.max(4 * self.k_max + 16);
        let delta_sep = opts
            .delta_sep
            .unwrap_or_else(|| lit::<T>(2.0) / T::from_usize(n).unwrap());
        let samples = self.samples(n);
        let pts: Vec<Complex<T>> = samples.iter().map(|s| s.point).collect();

        let min_speed = samples
            .iter()
            .map(|s| s.tangent.norm())
            .fold(T::infinity(), T::min);

        let mut diam_sq = T::zero();
        for i in 0..n {
            for j in i + 1..n {
                diam_sq = diam_sq.max((pts[i] - pts[j]).norm_sqr());
            }
        }
        let diameter = diam_sq.sqrt();
        let eps_emb = opts.eps_emb.unwrap_or(lit::<T>(1e-6) * diameter);

        // Segment i joins samples i and i + 1. Two segments are compared when
        // the parameter gap between their nearest endpoints is at least delta_sep.
        let nn = T::from_usize(n).unwrap();
        let mut closest = T::infinity();
        for i in 0..n {
            let p0 = pts[i];
            let p1 = pts[(i + 1) % n];
            for j in i + 1..n {
                let d = j - i;
                let circ = d.min(n - d);
                if circ < 1 || T::from_usize(circ - 1).unwrap() / nn < delta_sep {
                    continue;
                }
                let q0 = pts[j];
                let q1 = pts[(j + 1) % n];
                closest = closest.min(segment_distance(p0, p1, q0, q1));
            }
        }

        let immersed = min_speed > lit::<T>(1e-9) * diameter;
        let embedded = closest >= eps_emb;
        ValidityReport {
            n_samples: n,
            min_speed,
            closest_approach: closest,
            diameter,
            immersed,
            embedded,
        }
    }

    /// Winding number of the unit tangent, sampled at `n` points.
    pub fn turning_number(&self, n: usize) -> Result<i64, CurveError> {
        let tangents: Vec<_> = self.samples(n).into_iter().map(|s| s.tangent).collect();
        Ok(winding_number(&tangents)?)
    }

    /// Deterministic curve generator.
    ///
    /// Random curves fix `c_0 = 0`, `c_1 = 1` and draw every other `c_k` with
    /// magnitude `u |k|^{-decay} / 2` (`u` uniform in `[0, 1)`) and a uniform
    /// phase. Attempts that fail validation are redrawn from a fresh stream
    /// derived from `(seed, attempt)`; clockwise draws are reversed.
    pub fn generate(kind: CurveKind<T>, seed: u64, k_max: usize, decay: T) -> Result<Self, CurveError> {
        match kind {
            CurveKind::Circle => Ok(Self::circle()),
            CurveKind::Ellipse { a, b } => {
                if !(a > T::zero() && b > T::zero()) {
                    return Err(CurveError::BadArgument("ellipse axes must be positive".into()));
                }
                Ok(Self::ellipse(a, b))
            }
            CurveKind::Random => {
                if k_max < 1 {
                    return Err(CurveError::BadArgument("K must be at least 1".into()));
                }
                if !(decay > T::one()) {
                    return Err(CurveError::BadArgument("decay must exceed 1".into()));
                }
                let decay = decay.to_f64().unwrap();
                for attempt in 0..MAX_GENERATE_ATTEMPTS {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(attempt);
                    let mut coeffs = Vec::with_capacity(2 * k_max + 1);
                    for k in -(k_max as i64)..=(k_max as i64) {
                        let c = match k {
                            0 => Complex::new(0.0, 0.0),
                            1 => Complex::new(1.0, 0.0),
                            _ => {
                                let u: f64 = rng.gen();
                                let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                                let mag = RANDOM_AMPLITUDE * u * (k.unsigned_abs() as f64).powf(-decay);
                                Complex::from_polar(mag, phase)
                            }
                        };
                        coeffs.push(Complex::new(lit::<T>(c.re), lit::<T>(c.im)));
                    }
                    let mut curve = Self { k_max, coeffs };
                    let report = curve.validate(&ValidationOptions::for_curve(&curve));
                    if !report.is_valid() {
                        continue;
                    }
                    let n = 4 * report.n_samples;
                    match curve.turning_number(n) {
                        Ok(1) => return Ok(curve),
                        Ok(-1) => {
                            curve = curve.reversed();
                            if curve.turning_number(n) == Ok(1) {
                                return Ok(curve);
                            }
                        }
                        _ => {}
                    }
                }
                Err(CurveError::GenerationFailed {
                    attempts: MAX_GENERATE_ATTEMPTS,
                })
            }
        }
    }

    /// Text form: header, `K`, then one `k re im` line per coefficient.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{FILE_HEADER}").unwrap();
        writeln!(out, "{}", self.k_max).unwrap();
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = i as i64 - self.k_max as i64;
            writeln!(out, "{k} {} {}", c.re, c.im).unwrap();
        }
        out
    }

    pub fn parse_file(text: &str) -> Result<Self, CurveFileError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        match lines.next() {
            Some((_, h)) if h == FILE_HEADER => {}
            _ => return Err(CurveFileError::Header),
        }
        let (kl, kline) = lines.next().ok_or(CurveFileError::Syntax {
            line: 2,
            msg: "missing K".into(),
        })?;
        let k_max: usize = kline.parse().map_err(|_| CurveFileError::Syntax {
            line: kl,
            msg: format!("K must be a non-negative integer, got {kline:?}"),
        })?;
        let kk = k_max as i64;
        let mut coeffs: Vec<Option<Complex<T>>> = vec![None; 2 * k_max + 1];
        let mut last: Option<i64> = None;
        for (ln, line) in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(CurveFileError::Syntax {
                    line: ln,
                    msg: format!("expected \"k re im\", got {line:?}"),
                });
            }
            let k: i64 = fields[0].parse().map_err(|_| CurveFileError::Syntax {
                line: ln,
                msg: format!("bad index {:?}", fields[0]),
            })?;
            let num = |s: &str| -> Result<T, CurveFileError> {
                s.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .and_then(T::from_f64)
                    .ok_or(CurveFileError::Syntax {
                        line: ln,
                        msg: format!("bad number {s:?}"),
                    })
            };
            let c = Complex::new(num(fields[1])?, num(fields[2])?);
            if k < -kk || k > kk {
                return Err(CurveFileError::OutOfRange(k));
            }
            let slot = &mut coeffs[(k + kk) as usize];
            if slot.is_some() {
                return Err(CurveFileError::Duplicate(k));
            }
            if let Some(prev) = last {
                if k < prev {
                    return Err(CurveFileError::Order(k));
                }
            }
            *slot = Some(c);
            last = Some(k);
        }
        let coeffs = coeffs
            .into_iter()
            .enumerate()
            .map(|(i, c)| c.ok_or(CurveFileError::Missing(i as i64 - kk)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { k_max, coeffs })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurveKind<T> {
    Circle,
    Ellipse { a: T, b: T },
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationOptions<T> {
    pub n_samples: usize,
    /// Absolute threshold; `None` means `1e-6 * diameter`.
    pub eps_emb: Option<T>,
    /// Parameter separation; `None` means `2 / n_samples`.
    pub delta_sep: Option<T>,
}

impl<T: Scalar> ValidationOptions<T> {
    pub fn for_curve(curve: &FourierCurve<T>) -> Self {
        Self {
            n_samples: curve.default_validation_samples(),
            eps_emb: None,
            delta_sep: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityReport<T> {
    pub n_samples: usize,
    pub min_speed: T,
    pub closest_approach: T,
    pub diameter: T,
    pub immersed: bool,
    pub embedded: bool,
}

impl<T: Scalar> ValidityReport<T> {
    pub fn is_valid(&self) -> bool {
        self.immersed && self.embedded
    }
}

fn point_segment_distance<T: Scalar>(p: Complex<T>, a: Complex<T>, b: Complex<T>) -> T {
    let ab = b - a;
    let len_sq = ab.norm_sqr();
    if len_sq == T::zero() {
        return (p - a).norm();
    }
    let ap = p - a;
    let u = ((ap.re * ab.re + ap.im * ab.im) / len_sq).max(T::zero()).min(T::one());
    (p - (a + ab * u)).norm()
}

fn orient<T: Scalar>(a: Complex<T>, b: Complex<T>, c: Complex<T>) -> T {
    let u = b - a;
    let v = c - a;
    u.re * v.im - u.im * v.re
}

/// Euclidean distance between segments `p0 p1` and `q0 q1`; zero when they cross.
pub(crate) fn segment_distance<T: Scalar>(p0: Complex<T>, p1: Complex<T>, q0: Complex<T>, q1: Complex<T>) -> T {
    let d1 = orient(p0, p1, q0);
    let d2 = orient(p0, p1, q1);
    let d3 = orient(q0, q1, p0);
    let d4 = orient(q0, q1, p1);
    let zero = T::zero();
    if ((d1 > zero && d2 < zero) || (d1 < zero && d2 > zero)) && ((d3 > zero && d4 < zero) || (d3 < zero && d4 > zero)) {
        return zero;
    }
    point_segment_distance(p0, q0, q1)
        .min(point_segment_distance(p1, q0, q1))
        .min(point_segment_distance(q0, p0, p1))
        .min(point_segment_distance(q1, p0, p1))
}
