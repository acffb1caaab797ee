//! Square polynomial systems solved by total-degree homotopy continuation.
//!
//! [`solve_all`] tracks one path per Bezout start solution, deduplicates the
//! finite endpoints, and reports how every path ended. [`real_solutions`]
//! then picks the real points, dropping those with a vanishing coordinate.
//!
//! The tracker works with anything implementing [`Target`], so the coamoeba
//! fiber code can feed it either coefficient-twisted polynomials or a
//! closure-style evaluator.

mod compiled;
mod linalg;
mod tracker;

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::MultiPoly;
use crate::rng::{standard_complex_normal, unit_phase, SeedContext};

pub(crate) use compiled::CompiledPoly;
use tracker::{Homotopy, PathEnd};

/// Target equations of a homotopy, seen through their homogenizations.
pub trait Target: Sync {
    fn nvars(&self) -> usize;

    /// Degree of each equation; the homogenization degree and the start
    /// system degree.
    fn degrees(&self) -> &[u32];

    /// Evaluates the homogenized equations at `x = (x_0, x_1, ..., x_n)`.
    /// `jac` is row-major, `n` rows by `n + 1` columns.
    fn eval_homogeneous(&self, x: &[Complex64], values: &mut [Complex64], jac: &mut [Complex64]);

    /// Scale-invariant residual of an affine point: the largest
    /// `|f_i(x)| / (||f_i||_1 max(1, |x|_inf)^{d_i})`.
    fn residual(&self, x: &[Complex64]) -> f64;
}

#[derive(Clone, Debug)]
pub struct PolySystem {
    equations: Vec<MultiPoly>,
    nvars: usize,
    degrees: Vec<u32>,
    homogenized: Vec<CompiledPoly>,
    affine: Vec<CompiledPoly>,
}

impl PartialEq for PolySystem {
    fn eq(&self, other: &Self) -> bool {
        self.equations == other.equations
    }
}

impl PolySystem {
    pub fn new(equations: Vec<MultiPoly>) -> Result<Self> {
        let nvars = equations.first().map_or(0, MultiPoly::nvars);
        if equations.len() != nvars || nvars == 0 {
            return Err(Error::InvalidArgument(format!(
                "system is not square: {} equations in {nvars} variables",
                equations.len()
            )));
        }
        if let Some(e) = equations.iter().find(|e| e.nvars() != nvars) {
            return Err(Error::DimensionMismatch {
                expected: nvars,
                got: e.nvars(),
            });
        }
        let mut degrees = Vec::with_capacity(nvars);
        for e in &equations {
            match e.degree() {
                None => {
                    return Err(Error::InvalidArgument("identically zero equation".into()));
                }
                Some(0) => {
                    return Err(Error::InvalidArgument("constant equation".into()));
                }
                Some(d) => degrees.push(d),
            }
        }
        let homogenized = equations
            .iter()
            .zip(&degrees)
            .map(|(e, &d)| e.homogenize(0, d).map(|h| CompiledPoly::new(&h)))
            .collect::<Result<_>>()?;
        let affine = equations.iter().map(CompiledPoly::new).collect();
        Ok(Self {
            equations,
            nvars,
            degrees,
            homogenized,
            affine,
        })
    }

    pub fn equations(&self) -> &[MultiPoly] {
        &self.equations
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn bezout_number(&self) -> usize {
        self.degrees.iter().map(|&d| d as usize).product()
    }
}

impl Target for PolySystem {
    fn nvars(&self) -> usize {
        self.nvars
    }

    fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    fn eval_homogeneous(&self, x: &[Complex64], values: &mut [Complex64], jac: &mut [Complex64]) {
        let m = self.nvars + 1;
        for (i, h) in self.homogenized.iter().enumerate() {
            values[i] = h.eval_grad(x, &mut jac[i * m..(i + 1) * m]);
        }
    }

    fn residual(&self, x: &[Complex64]) -> f64 {
        let scale = x.iter().map(|z| z.norm()).fold(1.0, f64::max);
        self.affine
            .iter()
            .zip(&self.degrees)
            .map(|(f, &d)| f.eval(x).norm() / (f.coeff_l1() * scale.powi(d as i32)))
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    /// Accepted scale-invariant residual for a reported solution.
    pub residual_tol: f64,
    /// Max-norm radius (relative to `max(1, |x|)`) for merging endpoints.
    pub dedupe_radius: f64,
    /// Affine norm past which a path is declared to be at infinity.
    pub divergence_norm: f64,
    /// Fraction of failed paths above which the solve is rejected.
    pub max_failed_fraction: f64,
    pub initial_step: f64,
    pub max_step: f64,
    pub min_step: f64,
    pub max_steps: usize,
    pub corrector_iterations: usize,
    pub corrector_tol: f64,
    /// Largest first Newton correction, relative to `|X|`, accepted in a step.
    pub max_first_correction: f64,
    /// A path stalling below this `s` still gets the endpoint refinement.
    pub endgame_s: f64,
    pub endgame_iterations: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            residual_tol: 1e-8,
            dedupe_radius: 1e-6,
            divergence_norm: 1e8,
            max_failed_fraction: 0.05,
            initial_step: 0.02,
            max_step: 0.1,
            min_step: 1e-14,
            max_steps: 20_000,
            corrector_iterations: 3,
            corrector_tol: 1e-10,
            max_first_correction: 1e-2,
            endgame_s: 1e-6,
            endgame_iterations: 60,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveReport {
    pub solutions: Vec<Vec<Complex64>>,
    pub residuals: Vec<f64>,
    pub paths_tracked: usize,
    pub paths_failed: usize,
    pub paths_diverged: usize,
    pub dedupe_merges: usize,
}

/// Path accounting without the solution list, for trial logs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SolveSummary {
    pub paths_tracked: usize,
    pub paths_failed: usize,
    pub paths_diverged: usize,
    pub dedupe_merges: usize,
    pub finite_solutions: usize,
}

impl SolveReport {
    pub fn summary(&self) -> SolveSummary {
        SolveSummary {
            paths_tracked: self.paths_tracked,
            paths_failed: self.paths_failed,
            paths_diverged: self.paths_diverged,
            dedupe_merges: self.dedupe_merges,
            finite_solutions: self.solutions.len(),
        }
    }
}

pub fn solve_all(system: &PolySystem, seed: &SeedContext) -> Result<SolveReport> {
    solve_target(system, seed, &SolveOptions::default())
}

pub fn solve_all_with(
    system: &PolySystem,
    seed: &SeedContext,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    solve_target(system, seed, opts)
}

/// Tracks every total-degree path of `target`. Fails with
/// [`Error::UnreliableSolve`] when too many paths fail.
pub fn solve_target<T: Target + ?Sized>(
    target: &T,
    seed: &SeedContext,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    let n = target.nvars();
    let degrees = target.degrees().to_vec();
    if degrees.len() != n || degrees.contains(&0) {
        return Err(Error::InvalidArgument(
            "every equation needs degree >= 1".into(),
        ));
    }
    let mut rng = seed.rng();
    let gamma = unit_phase(&mut rng);
    let start_consts: Vec<Complex64> = (0..n).map(|_| unit_phase(&mut rng)).collect();
    let patch: Vec<Complex64> = (0..=n).map(|_| standard_complex_normal(&mut rng)).collect();
    let homotopy = Homotopy {
        target,
        gamma,
        start_consts,
        patch,
    };

    let mut finite: Vec<(Vec<Complex64>, f64)> = Vec::new();
    let (mut failed, mut diverged) = (0, 0);
    let tracked: usize = degrees.iter().map(|&d| d as usize).product();
    for idx in 0..tracked {
        let start = start_point(&homotopy, &degrees, idx);
        match homotopy.track(start, opts) {
            PathEnd::Finite { point, residual } => finite.push((point, residual)),
            PathEnd::Diverged => diverged += 1,
            PathEnd::Failed => failed += 1,
        }
    }
    if failed as f64 > opts.max_failed_fraction * tracked as f64 {
        return Err(Error::UnreliableSolve { failed, tracked });
    }

    finite.sort_by(|a, b| canonical_cmp(&a.0, &b.0));
    let mut kept: Vec<(Vec<Complex64>, f64)> = Vec::with_capacity(finite.len());
    let mut merges = 0;
    for (p, r) in finite {
        let scale = p.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let dup = kept.iter().any(|(q, _)| {
            p.iter()
                .zip(q)
                .all(|(a, b)| (a - b).norm() <= opts.dedupe_radius * scale)
        });
        if dup {
            merges += 1;
        } else {
            kept.push((p, r));
        }
    }
    let (solutions, residuals) = kept.into_iter().unzip();
    Ok(SolveReport {
        solutions,
        residuals,
        paths_tracked: tracked,
        paths_failed: failed,
        paths_diverged: diverged,
        dedupe_merges: merges,
    })
}

/// The `idx`-th start solution, `x_i = c_i^{1/d_i} e^{2 pi i k_i / d_i}`,
/// placed on the affine patch.
fn start_point<T: Target + ?Sized>(h: &Homotopy<'_, T>, degrees: &[u32], idx: usize) -> Vec<Complex64> {
    let mut rem = idx;
    let mut y = vec![Complex64::new(1.0, 0.0)];
    for (i, &d) in degrees.iter().enumerate() {
        let k = rem % d as usize;
        rem /= d as usize;
        let c = h.start_consts[i];
        let root = Complex64::from_polar(
            c.norm().powf(1.0 / f64::from(d)),
            (c.arg() + std::f64::consts::TAU * k as f64) / f64::from(d),
        );
        y.push(root);
    }
    let dot: Complex64 = h.patch.iter().zip(&y).map(|(a, z)| a * z).sum();
    y.iter().map(|z| z / dot).collect()
}

/// Lexicographic order on coordinates rounded to a 1e-6 grid, exact values
/// breaking ties.
fn canonical_cmp(a: &[Complex64], b: &[Complex64]) -> Ordering {
    let key = |v: &[Complex64]| -> Vec<i64> {
        v.iter()
            .flat_map(|z| [(z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64])
            .collect()
    };
    key(a).cmp(&key(b)).then_with(|| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RealSolutions {
    pub points: Vec<Vec<f64>>,
    /// Real solutions dropped because some coordinate is (numerically) zero.
    pub excluded_near_zero: usize,
}

/// Real solutions with every coordinate nonzero. A solution whose imaginary
/// part falls in `(real_tol, 10 real_tol]` (relative to `1 + |Re x|`) cannot be
/// classified and fails the whole call.
pub fn real_solutions(
    report: &SolveReport,
    real_tol: f64,
    exclude_zero_tol: f64,
) -> Result<RealSolutions> {
    let mut out = RealSolutions::default();
    for sol in &report.solutions {
        let re_max = sol.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
        let im_max = sol.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        let scale = 1.0 + re_max;
        if im_max > 10.0 * real_tol * scale {
            continue;
        }
        if im_max > real_tol * scale {
            return Err(Error::AmbiguousClassification { imag: im_max });
        }
        if sol.iter().any(|z| z.re.abs() <= exclude_zero_tol) {
            out.excluded_near_zero += 1;
        } else {
            out.points.push(sol.iter().map(|z| z.re).collect());
        }
    }
    Ok(out)
}
