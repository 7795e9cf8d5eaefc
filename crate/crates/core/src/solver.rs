//! Multistart damped Newton search for inscriptions of a cyclic quadrilateral
//! in a Fourier curve, plus a brute-force grid oracle.
//!
//! Unknowns are the curve parameters `x = (a, b, c, d)` on the 4-torus. The
//! residual is `inscription_residual(q, (z(a), z(b), z(c), z(d)))`.

use std::cmp::Ordering;

use num_complex::Complex;
use rayon::prelude::*;
use thiserror::Error;

use crate::curve::{FourierCurve, ValidationOptions, ValidityReport};
use crate::linalg::{lu_solve, norm, Mat4, Svd4, Vec4};
use crate::quadrilateral::{inscription_residual, params_from_points, similarity_class_equal, CyclicQuadParams};
use crate::scalar::{circle_distance, lit, wrap_unit, Scalar};

/// Condition number above which the Newton step is truncated.
const SINGULAR_CONDITION: f64 = 1e14;
/// `sigma_min / sigma_max` below which a solution is flagged rank deficient.
const RANK_DEFICIENT_RATIO: f64 = 1e-8;
/// Tolerance used when recovering `(s, t, phi)` from a solution.
const RECOVERY_TOL: f64 = 1e-6;
const MAX_HALVINGS: usize = 30;
/// Pivot ratio below which the LU step defers to the SVD.
const LU_PIVOT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions<T> {
    /// Seeds per axis.
    pub grid: usize,
    /// Residual tolerance as a multiple of the curve diameter.
    pub newton_tol: T,
    pub max_iter: usize,
    /// Cluster radius in the max-of-circle-distances metric on the 4-torus.
    pub dedup_tol: T,
    /// Minimum `|A - C|` as a multiple of the curve diameter.
    pub degen_tol: T,
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
}

impl<T: Scalar> Default for SolverOptions<T> {
    fn default() -> Self {
        Self {
            grid: 12,
            newton_tol: lit(1e-11),
            max_iter: 50,
            dedup_tol: lit(1e-4),
            degen_tol: lit(1e-3),
            workers: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("curve fails validation (immersion: {}, embeddedness: {})", pass(.0.immersed), pass(.0.embedded))]
    InvalidCurve(ValidityReport<f64>),
    #[error("invalid solver option: {0}")]
    BadOption(&'static str),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

/// Why a single Newton run did not produce an inscription.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum RefineFailure {
    #[error("no convergence (residual {residual:e})")]
    NoConvergence { residual: f64 },
    #[error("singular jacobian")]
    SingularJacobian,
    #[error("converged to a degenerate configuration, |A - C| = {separation:e}")]
    Degenerate { separation: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inscription<T> {
    /// Curve parameters `(a, b, c, d)` in `[0, 1)`.
    pub params: [T; 4],
    pub vertices: [Complex<T>; 4],
    pub residual_norm: T,
    pub converged: bool,
    /// The Jacobian at the solution is numerically rank deficient; the
    /// solution is likely a member of a continuous family.
    pub rank_deficient: bool,
}

impl<T: Scalar> Inscription<T> {
    /// `"a b c d residual_norm"`.
    pub fn to_line(&self) -> String {
        let [a, b, c, d] = self.params;
        format!("{a} {b} {c} {d} {}", self.residual_norm)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveDiagnostics {
    pub seeds: usize,
    pub converged: usize,
    pub degenerate: usize,
    pub no_convergence: usize,
    pub singular: usize,
    /// Converged, non-degenerate, but the recovered parameters disagreed.
    pub rejected: usize,
    pub rank_deficient: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport<T> {
    pub inscriptions: Vec<Inscription<T>>,
    pub diagnostics: SolveDiagnostics,
}

impl<T> SolveReport<T> {
    pub fn is_none_found(&self) -> bool {
        self.inscriptions.is_empty()
    }
}

/// A grid point that is a local minimum of the residual norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridMinimum<T> {
    pub params: [T; 4],
    pub residual_norm: T,
}

#[derive(Debug, Clone)]
pub struct InscriptionProblem<T> {
    curve: FourierCurve<T>,
    params: CyclicQuadParams<T>,
    options: SolverOptions<T>,
    diameter: T,
    /// Linear coefficients of A, B, C, D in the two residual components.
    coef_z: [T; 4],
    coef_w: [Complex<T>; 4],
}

impl<T: Scalar> InscriptionProblem<T> {
    pub fn new(curve: FourierCurve<T>, params: CyclicQuadParams<T>, options: SolverOptions<T>) -> Result<Self, SolverError> {
        let pos = |x: T| x > T::zero() && x.is_finite();
        if options.grid < 4 {
            return Err(SolverError::BadOption("grid density must be at least 4"));
        }
        if !pos(options.newton_tol) {
            return Err(SolverError::BadOption("newton tolerance must be positive"));
        }
        if !pos(options.dedup_tol) {
            return Err(SolverError::BadOption("dedup tolerance must be positive"));
        }
        if !pos(options.degen_tol) {
            return Err(SolverError::BadOption("degeneracy tolerance must be positive"));
        }
        if options.max_iter == 0 {
            return Err(SolverError::BadOption("max iterations must be positive"));
        }
        if options.workers == Some(0) {
            return Err(SolverError::BadOption("worker count must be positive"));
        }
        let report = curve.validate(&ValidationOptions::for_curve(&curve));
        if !report.is_valid() {
            return Err(SolverError::InvalidCurve(ValidityReport {
                n_samples: report.n_samples,
                min_speed: report.min_speed.to_f64().unwrap_or(f64::NAN),
                closest_approach: report.closest_approach.to_f64().unwrap_or(f64::NAN),
                diameter: report.diameter.to_f64().unwrap_or(f64::NAN),
                immersed: report.immersed,
                embedded: report.embedded,
            }));
        }
        let one = T::one();
        let (s, t) = (params.s(), params.t());
        let rot = Complex::from_polar(one, params.phi());
        let ks = (s * (one - s)).sqrt();
        let kt = (t * (one - t)).sqrt();
        let real = |x: T| Complex::new(x, T::zero());
        Ok(Self {
            curve,
            params,
            options,
            diameter: report.diameter,
            coef_z: [s, -t, one - s, -(one - t)],
            coef_w: [rot * ks, real(-kt), -rot * ks, real(kt)],
        })
    }

    pub fn curve(&self) -> &FourierCurve<T> {
        &self.curve
    }

    pub fn params(&self) -> &CyclicQuadParams<T> {
        &self.params
    }

    pub fn options(&self) -> &SolverOptions<T> {
        &self.options
    }

    pub fn diameter(&self) -> T {
        self.diameter
    }

    /// Absolute residual tolerance.
    pub fn newton_tolerance(&self) -> T {
        self.options.newton_tol * self.diameter
    }

    /// Absolute lower bound on `|A - C|`.
    pub fn degeneracy_threshold(&self) -> T {
        self.options.degen_tol * self.diameter
    }

    pub fn vertices(&self, x: &[T; 4]) -> [Complex<T>; 4] {
        x.map(|p| self.curve.eval(p))
    }

    pub fn residual(&self, x: &[T; 4]) -> Vec4<T> {
        inscription_residual(&self.params, &self.vertices(x))
    }

    fn residual_and_jacobian(&self, x: &[T; 4]) -> ([Complex<T>; 4], Vec4<T>, Mat4<T>) {
        let mut pts = [Complex::new(T::zero(), T::zero()); 4];
        let mut jac = [[T::zero(); 4]; 4];
        for i in 0..4 {
            let (p, dp) = self.curve.eval_with_deriv(x[i]);
            pts[i] = p;
            let dz = dp * self.coef_z[i];
            let dw = dp * self.coef_w[i];
            jac[0][i] = dz.re;
            jac[1][i] = dz.im;
            jac[2][i] = dw.re;
            jac[3][i] = dw.im;
        }
        (pts, inscription_residual(&self.params, &pts), jac)
    }

    /// Analytic Jacobian of [`Self::residual`]; rows follow the residual
    /// layout, columns are `a, b, c, d`.
    pub fn jacobian(&self, x: &[T; 4]) -> Mat4<T> {
        self.residual_and_jacobian(x).2
    }

    /// Damped Newton from `x0`, halving the step until the residual norm drops.
    pub fn newton_refine(&self, x0: &[T; 4]) -> Result<Inscription<T>, RefineFailure> {
        let tol = self.newton_tolerance();
        let rcond = T::one() / lit::<T>(SINGULAR_CONDITION);
        let mut x = x0.map(wrap_unit);
        let (mut pts, mut r, mut jac) = self.residual_and_jacobian(&x);
        let mut rn = norm(&r);
        for _ in 0..self.options.max_iter {
            if rn < tol {
                break;
            }
            let (step, truncated) = match lu_solve(&jac, &r, lit(LU_PIVOT_TOL)) {
                Some(step) => (step, false),
                None => {
                    let svd = Svd4::new(&jac);
                    let smax = svd.max_singular();
                    if !(smax > T::zero()) || !smax.is_finite() {
                        return Err(RefineFailure::SingularJacobian);
                    }
                    (svd.solve(&r, rcond), svd.condition() > lit(SINGULAR_CONDITION))
                }
            };
            let mut lambda = T::one();
            let mut accepted = None;
            for _ in 0..MAX_HALVINGS {
                let trial = [0, 1, 2, 3].map(|i| wrap_unit(x[i] - lambda * step[i]));
                let tr = self.residual(&trial);
                let tn = norm(&tr);
                if tn < rn {
                    accepted = Some(trial);
                    break;
                }
                lambda *= lit(0.5);
            }
            match accepted {
                Some(next) => {
                    x = next;
                    (pts, r, jac) = self.residual_and_jacobian(&x);
                    rn = norm(&r);
                }
                None if truncated => return Err(RefineFailure::SingularJacobian),
                None => {
                    return Err(RefineFailure::NoConvergence {
                        residual: rn.to_f64().unwrap_or(f64::NAN),
                    })
                }
            }
        }
        if !(rn < tol) {
            return Err(RefineFailure::NoConvergence {
                residual: rn.to_f64().unwrap_or(f64::NAN),
            });
        }
        let separation = (pts[0] - pts[2]).norm();
        if separation < self.degeneracy_threshold() {
            return Err(RefineFailure::Degenerate {
                separation: separation.to_f64().unwrap_or(f64::NAN),
            });
        }
        let svd = Svd4::new(&jac);
        let rank_deficient = !(svd.min_singular() > lit::<T>(RANK_DEFICIENT_RATIO) * svd.max_singular());
        Ok(Inscription {
            params: x,
            vertices: pts,
            residual_norm: rn,
            converged: true,
            rank_deficient,
        })
    }

    /// Uniform `g^4` grid minus the points within `1/g` of the diagonal.
    fn grid_points(&self, g: usize) -> Vec<[T; 4]> {
        let gg = T::from_usize(g).unwrap();
        let step = T::one() / gg;
        let mut out = Vec::with_capacity(g * g * g * g);
        for i in 0..g {
            for j in 0..g {
                for k in 0..g {
                    for l in 0..g {
                        let x = [i, j, k, l].map(|n| T::from_usize(n).unwrap() / gg);
                        if diagonal_distance(&x) >= step {
                            out.push(x);
                        }
                    }
                }
            }
        }
        out
    }

    /// Multistart Newton over the seed grid, deduplicated and sorted.
    ///
    /// Results are independent of the worker count: seeds are refined
    /// independently and merged in seed order.
    pub fn solve_all(&self) -> Result<SolveReport<T>, SolverError> {
        let seeds = self.grid_points(self.options.grid);
        let refine = |x: &[T; 4]| self.newton_refine(x);
        let results: Vec<_> = match self.options.workers {
            Some(1) => seeds.iter().map(refine).collect(),
            Some(w) => rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| SolverError::ThreadPool(e.to_string()))?
                .install(|| seeds.par_iter().map(refine).collect()),
            None => seeds.par_iter().map(refine).collect(),
        };

        let mut diag = SolveDiagnostics {
            seeds: seeds.len(),
            ..Default::default()
        };
        let recovery_tol = lit::<T>(RECOVERY_TOL);
        let mut found = Vec::new();
        for res in results {
            match res {
                Ok(ins) => {
                    diag.converged += 1;
                    let recovered = params_from_points(&ins.vertices, recovery_tol)
                        .map(|q| similarity_class_equal(&self.params, &q, recovery_tol))
                        .unwrap_or(false);
                    if recovered {
                        found.push(ins);
                    } else {
                        diag.rejected += 1;
                    }
                }
                Err(RefineFailure::Degenerate { .. }) => diag.degenerate += 1,
                Err(RefineFailure::NoConvergence { .. }) => diag.no_convergence += 1,
                Err(RefineFailure::SingularJacobian) => diag.singular += 1,
            }
        }
        let inscriptions = dedupe(found, self.options.dedup_tol);
        diag.rank_deficient = inscriptions.iter().filter(|i| i.rank_deficient).count();
        Ok(SolveReport { inscriptions, diagnostics: diag })
    }

    /// Brute-force oracle: local minima of the residual norm on the `g^4`
    /// grid (same diagonal margin as the seeds) whose value is within a
    /// factor 10 of the best grid value.
    pub fn oracle_grid_search(&self, g: usize) -> Vec<GridMinimum<T>> {
        assert!(g >= 8, "oracle grid density must be at least 8");
        let gg = T::from_usize(g).unwrap();
        let step = T::one() / gg;
        let idx = |i: usize, j: usize, k: usize, l: usize| ((i * g + j) * g + k) * g + l;
        let mut values = vec![T::infinity(); g * g * g * g];
        for i in 0..g {
            for j in 0..g {
                for k in 0..g {
                    for l in 0..g {
                        let x = [i, j, k, l].map(|n| T::from_usize(n).unwrap() / gg);
                        if diagonal_distance(&x) >= step {
                            values[idx(i, j, k, l)] = norm(&self.residual(&x));
                        }
                    }
                }
            }
        }
        let best = values.iter().copied().fold(T::infinity(), T::min);
        let cutoff = best * lit(10.0);
        let mut out = Vec::new();
        let wrapped = |base: usize, off: usize| (base + g + off - 1) % g;
        for i in 0..g {
            for j in 0..g {
                for k in 0..g {
                    for l in 0..g {
                        let v = values[idx(i, j, k, l)];
                        if !v.is_finite() || v > cutoff {
                            continue;
                        }
                        let mut is_min = true;
                        'nbr: for di in 0..3 {
                            for dj in 0..3 {
                                for dk in 0..3 {
                                    for dl in 0..3 {
                                        let w = values[idx(wrapped(i, di), wrapped(j, dj), wrapped(k, dk), wrapped(l, dl))];
                                        if w < v {
                                            is_min = false;
                                            break 'nbr;
                                        }
                                    }
                                }
                            }
                        }
                        if is_min {
                            out.push(GridMinimum {
                                params: [i, j, k, l].map(|n| T::from_usize(n).unwrap() / gg),
                                residual_norm: v,
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

/// Distance from `x` to the diagonal `{(u, u, u, u)}` in the max-of-circle
/// metric: half the shortest arc of `R/Z` containing all four coordinates.
pub fn diagonal_distance<T: Scalar>(x: &[T; 4]) -> T {
    let mut v = x.map(wrap_unit);
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let mut largest_gap = T::one() - v[3] + v[0];
    for i in 0..3 {
        largest_gap = largest_gap.max(v[i + 1] - v[i]);
    }
    (T::one() - largest_gap) * lit(0.5)
}

/// `max_i dist_circ(x_i, y_i)`.
pub fn torus_distance<T: Scalar>(x: &[T; 4], y: &[T; 4]) -> T {
    (0..4).map(|i| circle_distance(x[i], y[i])).fold(T::zero(), T::max)
}

fn lex_cmp<T: Scalar>(x: &[T; 4], y: &[T; 4]) -> Ordering {
    for i in 0..4 {
        match x[i].partial_cmp(&y[i]) {
            Some(Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    Ordering::Equal
}

/// Greedy clustering: solutions are visited in increasing residual order and
/// kept unless within `tol` of one already kept. The output is sorted
/// lexicographically by `(a, b, c, d)`.
pub fn dedupe<T: Scalar>(mut solutions: Vec<Inscription<T>>, tol: T) -> Vec<Inscription<T>> {
    solutions.sort_by(|x, y| {
        x.residual_norm
            .partial_cmp(&y.residual_norm)
            .unwrap_or(Ordering::Equal)
            .then_with(|| lex_cmp(&x.params, &y.params))
    });
    let mut kept: Vec<Inscription<T>> = Vec::new();
    for s in solutions {
        if kept.iter().all(|k| torus_distance(&k.params, &s.params) > tol) {
            kept.push(s);
        }
    }
    kept.sort_by(|x, y| lex_cmp(&x.params, &y.params));
    kept
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::CurveKind;
    use std::f64::consts::FRAC_PI_2;

    fn problem(curve: FourierCurve<f64>, q: CyclicQuadParams<f64>) -> InscriptionProblem<f64> {
        InscriptionProblem::new(curve, q, SolverOptions::default()).unwrap()
    }

    fn fake(params: [f64; 4], residual_norm: f64) -> Inscription<f64> {
        Inscription {
            params,
            vertices: [Complex::new(0.0, 0.0); 4],
            residual_norm,
            converged: true,
            rank_deficient: false,
        }
    }

    #[test]
    fn residual_examples() {
        let p = problem(FourierCurve::circle(), CyclicQuadParams::square());
        assert!(norm(&p.residual(&[0.0, 0.25, 0.5, 0.75])) < 1e-15);
        assert!(norm(&p.residual(&[0.3; 4])) < 1e-15);

        // Axis points 2, i, -2, -i: z-component 0, w-component i (4)/2 - (2i)/2 = i.
        let e = problem(FourierCurve::ellipse(2.0, 1.0), CyclicQuadParams::square());
        let r = e.residual(&[0.0, 0.25, 0.5, 0.75]);
        let expected = [0.0, 0.0, 0.0, 1.0];
        for i in 0..4 {
            assert!((r[i] - expected[i]).abs() < 1e-15, "{r:?}");
        }
    }

    #[test]
    fn jacobian_kernel_on_circle_contains_rotation() {
        let p = problem(FourierCurve::circle(), CyclicQuadParams::new(0.3, 0.2, 1.3).unwrap());
        let sol = p.newton_refine(&[0.05, 0.3, 0.45, 0.8]).unwrap();
        let jac = p.jacobian(&sol.params);
        for row in jac {
            let s: f64 = row.iter().sum();
            assert!(s.abs() < 1e-9, "{row:?}");
        }
        assert!(sol.rank_deficient);
    }

    #[test]
    fn jacobian_scales_with_curve() {
        let c = FourierCurve::generate(CurveKind::Random, 9, 5, 2.5).unwrap();
        let q = CyclicQuadParams::new(0.25, 0.4, 1.0).unwrap();
        let p1 = problem(c.clone(), q);
        let p2 = problem(c.transformed(Complex::new(2.0, 0.0), Complex::new(0.0, 0.0)), q);
        let x = [0.1, 0.35, 0.6, 0.9];
        let (j1, j2) = (p1.jacobian(&x), p2.jacobian(&x));
        for i in 0..4 {
            for k in 0..4 {
                assert_eq!(j2[i][k], 2.0 * j1[i][k]);
            }
        }
    }

    #[test]
    fn newton_on_circle_lands_on_rotated_square() {
        let p = problem(FourierCurve::circle(), CyclicQuadParams::square());
        let sol = p.newton_refine(&[0.01, 0.26, 0.49, 0.74]).unwrap();
        assert!(sol.residual_norm < 1e-11);
        let h = sol.params[0];
        for (i, x) in sol.params.iter().enumerate() {
            assert!(circle_distance(*x, h + 0.25 * i as f64) < 1e-9, "{:?}", sol.params);
        }
    }

    #[test]
    fn newton_on_diagonal_is_degenerate() {
        let p = problem(FourierCurve::circle(), CyclicQuadParams::square());
        assert!(matches!(p.newton_refine(&[0.2; 4]), Err(RefineFailure::Degenerate { .. })));
    }

    #[test]
    fn newton_finds_ellipse_square() {
        let p = problem(FourierCurve::ellipse(2.0, 1.0), CyclicQuadParams::square());
        // (2 cos 2 pi a, sin 2 pi a) = (k, k) with k = 2 / sqrt 5 at a = atan2(2, 1) / 2 pi.
        let a0 = 2f64.atan2(1.0) / std::f64::consts::TAU;
        let x0 = [a0 + 0.01, 0.5 - a0 - 0.01, 0.5 + a0, 1.0 - a0 + 0.02];
        let sol = p.newton_refine(&x0).unwrap();
        let k = 2.0 / 5f64.sqrt();
        let expected = [(k, k), (-k, k), (-k, -k), (k, -k)];
        for (v, e) in sol.vertices.iter().zip(expected) {
            assert!((v - Complex::new(e.0, e.1)).norm() < 1e-9, "{:?}", sol.vertices);
        }
    }

    #[test]
    fn dedupe_cases() {
        assert!(dedupe(Vec::<Inscription<f64>>::new(), 1e-4).is_empty());
        let a = fake([0.0, 0.25, 0.5, 0.75], 1e-13);
        let b = fake([0.5, 0.75, 0.0, 0.25], 1e-13);
        assert_eq!(dedupe(vec![a, a], 1e-4).len(), 1);
        assert_eq!(dedupe(vec![b, a], 1e-4), vec![a, b]);
        // Keeps the lower residual, wrapping across 0.
        let c = fake([0.99999, 0.25, 0.5, 0.75], 1e-14);
        assert_eq!(dedupe(vec![a, c], 1e-4), vec![c]);
        let once = dedupe(vec![a, b, c], 1e-4);
        assert_eq!(dedupe(once.clone(), 1e-4), once);
    }

    #[test]
    fn diagonal_distance_examples() {
        assert_eq!(diagonal_distance(&[0.3; 4]), 0.0);
        assert!((diagonal_distance(&[0.95_f64, 0.0, 0.05, 0.0]) - 0.05).abs() < 1e-15);
        assert!((diagonal_distance(&[0.0_f64, 0.25, 0.5, 0.75]) - 0.375).abs() < 1e-15);
    }

    #[test]
    fn invalid_options_and_curves_are_rejected() {
        let q = CyclicQuadParams::square();
        let opts = SolverOptions {
            grid: 3,
            ..SolverOptions::default()
        };
        assert!(matches!(
            InscriptionProblem::new(FourierCurve::circle(), q, opts),
            Err(SolverError::BadOption(_))
        ));
        let constant = FourierCurve::from_coefficients(0, vec![Complex::new(0.0, 0.0)]).unwrap();
        assert!(matches!(
            InscriptionProblem::new(constant, q, SolverOptions::default()),
            Err(SolverError::InvalidCurve(_))
        ));
    }

    #[test]
    fn square_in_circle_via_solve_all() {
        let opts = SolverOptions {
            grid: 6,
            ..SolverOptions::default()
        };
        let p = InscriptionProblem::new(FourierCurve::circle(), CyclicQuadParams::new(0.5, 0.5, FRAC_PI_2).unwrap(), opts).unwrap();
        let rep = p.solve_all().unwrap();
        assert!(!rep.is_none_found());
        assert!(rep.inscriptions.iter().all(|i| i.rank_deficient));
        assert_eq!(rep.diagnostics.rank_deficient, rep.inscriptions.len());
    }
}
