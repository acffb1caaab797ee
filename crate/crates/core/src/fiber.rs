//! Coamoeba fiber counts.
//!
//! For `f_1, ..., f_n` in `2n` variables and angles `theta`, the fiber over
//! `theta` is the set of common zeros of the form `z_j = r_j e^{i theta_j}`
//! with real, nonzero `r_j` (negative `r_j` is allowed, angles live modulo
//! pi). Those `r` are the real zeros of the `2n` real equations obtained by
//! splitting every `f_i(r e^{i theta})` into real and imaginary parts.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{MultiPoly, ThetaPoint};
use crate::rng::SeedContext;
use crate::solve::{
    real_solutions, solve_target, CompiledPoly, PolySystem, SolveOptions, SolveSummary, Target,
};

/// Relative size below which one half of a split equation counts as zero.
pub const DEGENERATE_RATIO: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct FiberOptions {
    pub solve: SolveOptions,
    pub real_tol: f64,
    pub exclude_zero_tol: f64,
}

impl Default for FiberOptions {
    fn default() -> Self {
        Self {
            solve: SolveOptions::default(),
            real_tol: 1e-8,
            exclude_zero_tol: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiberCount {
    pub theta: ThetaPoint,
    pub count: usize,
    /// Real solutions dropped for having a (numerically) zero coordinate.
    pub excluded_near_zero: usize,
    pub solve: SolveSummary,
}

/// Counts the fiber over `theta` by twisting coefficients and splitting.
pub fn count_fiber(
    polys: &[MultiPoly],
    theta: &ThetaPoint,
    seed: &SeedContext,
) -> Result<FiberCount> {
    count_fiber_with(polys, theta.angles(), seed, &FiberOptions::default())
}

/// [`count_fiber`] for arbitrary real angles; the reported `theta` is
/// reduced modulo pi.
pub fn count_fiber_with(
    polys: &[MultiPoly],
    angles: &[f64],
    seed: &SeedContext,
    opts: &FiberOptions,
) -> Result<FiberCount> {
    check_shape(polys, angles)?;
    let theta = ThetaPoint::wrapped(angles);
    let mut equations = Vec::with_capacity(2 * polys.len());
    for f in polys {
        let (re, im) = f.rotate_by_angles(angles)?.re_im_split();
        check_nondegenerate(re.max_coeff_abs(), im.max_coeff_abs())?;
        // a nonzero constant half has no zeros at all
        if re.degree() == Some(0) || im.degree() == Some(0) {
            return Ok(FiberCount {
                theta,
                count: 0,
                excluded_near_zero: 0,
                solve: SolveSummary::default(),
            });
        }
        equations.push(re);
        equations.push(im);
    }
    let system = PolySystem::new(equations)?;
    finish(&system, theta, seed, opts)
}

/// Independent route to the same count: the solver evaluates the original
/// polynomials at rotated points instead of working with twisted
/// coefficients.
pub fn count_fiber_direct(
    polys: &[MultiPoly],
    theta: &ThetaPoint,
    seed: &SeedContext,
) -> Result<FiberCount> {
    count_fiber_direct_with(polys, theta.angles(), seed, &FiberOptions::default())
}

pub fn count_fiber_direct_with(
    polys: &[MultiPoly],
    angles: &[f64],
    seed: &SeedContext,
    opts: &FiberOptions,
) -> Result<FiberCount> {
    check_shape(polys, angles)?;
    let target = RotatedSplit::new(polys, angles)?;
    for i in 0..polys.len() {
        target.check_halves(i)?;
    }
    finish(&target, ThetaPoint::wrapped(angles), seed, opts)
}

fn finish<T: Target + ?Sized>(
    target: &T,
    theta: ThetaPoint,
    seed: &SeedContext,
    opts: &FiberOptions,
) -> Result<FiberCount> {
    let report = solve_target(target, &seed.child("solve"), &opts.solve)?;
    let real = real_solutions(&report, opts.real_tol, opts.exclude_zero_tol)?;
    Ok(FiberCount {
        theta,
        count: real.points.len(),
        excluded_near_zero: real.excluded_near_zero,
        solve: report.summary(),
    })
}

fn check_shape(polys: &[MultiPoly], angles: &[f64]) -> Result<()> {
    if polys.is_empty() {
        return Err(Error::InvalidArgument("no equations".into()));
    }
    let m = 2 * polys.len();
    if angles.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: angles.len(),
        });
    }
    if let Some(f) = polys.iter().find(|f| f.nvars() != m) {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: f.nvars(),
        });
    }
    if polys.iter().any(MultiPoly::is_zero) {
        return Err(Error::InvalidArgument("identically zero equation".into()));
    }
    Ok(())
}

fn check_nondegenerate(re_max: f64, im_max: f64) -> Result<()> {
    if re_max <= DEGENERATE_RATIO * im_max || im_max <= DEGENERATE_RATIO * re_max {
        return Err(Error::DegenerateFiber("critical theta".into()));
    }
    Ok(())
}

/// Real and imaginary parts of `f_i(r e^{i theta})`, continued analytically
/// to complex `r` as `(F(y) + conj F(conj y)) / 2` and
/// `(F(y) - conj F(conj y)) / 2i` with `y_j = r_j e^{i theta_j}`.
struct RotatedSplit {
    nvars: usize,
    phases: Vec<Complex64>,
    degrees: Vec<u32>,
    homogenized: Vec<CompiledPoly>,
    affine: Vec<CompiledPoly>,
    l1: Vec<f64>,
}

impl RotatedSplit {
    fn new(polys: &[MultiPoly], angles: &[f64]) -> Result<Self> {
        let mut degrees = Vec::with_capacity(2 * polys.len());
        let mut homogenized = Vec::with_capacity(polys.len());
        for f in polys {
            let d = f.degree().unwrap_or(0);
            if d == 0 {
                return Err(Error::InvalidArgument("constant equation".into()));
            }
            degrees.extend([d, d]);
            homogenized.push(CompiledPoly::new(&f.homogenize(0, d)?));
        }
        Ok(Self {
            nvars: 2 * polys.len(),
            phases: angles.iter().map(|&t| Complex64::from_polar(1.0, t)).collect(),
            degrees,
            homogenized,
            affine: polys.iter().map(CompiledPoly::new).collect(),
            l1: polys.iter().map(|f| f.terms().map(|(_, c)| c.norm()).sum()).collect(),
        })
    }

    /// Compares the halves at a few fixed real points; both vanishing
    /// identically relative to the other marks a critical theta.
    fn check_halves(&self, i: usize) -> Result<()> {
        let (mut re_max, mut im_max) = (0.0f64, 0.0f64);
        for k in 0..5 {
            let r: Vec<f64> = (0..self.nvars)
                .map(|j| 0.3 + 0.61 * ((k * self.nvars + j) as f64 * 0.754_877_666).fract())
                .collect();
            let (p, q) = self.split_at(i, &r);
            re_max = re_max.max(p.abs());
            im_max = im_max.max(q.abs());
        }
        check_nondegenerate(re_max, im_max)
    }

    fn split_at(&self, i: usize, r: &[f64]) -> (f64, f64) {
        let y: Vec<Complex64> = r.iter().zip(&self.phases).map(|(x, p)| p * x).collect();
        let v = self.affine[i].eval(&y);
        (v.re, v.im)
    }
}

impl Target for RotatedSplit {
    fn nvars(&self) -> usize {
        self.nvars
    }

    fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    fn eval_homogeneous(&self, x: &[Complex64], values: &mut [Complex64], jac: &mut [Complex64]) {
        let m = self.nvars + 1;
        let mut y = Vec::with_capacity(m);
        let mut w = Vec::with_capacity(m);
        y.push(x[0]);
        w.push(x[0].conj());
        for (xj, p) in x[1..].iter().zip(&self.phases) {
            y.push(xj * p);
            w.push(xj.conj() * p);
        }
        let mut ga = vec![Complex64::new(0.0, 0.0); m];
        let mut gb = vec![Complex64::new(0.0, 0.0); m];
        let inv_2i = Complex64::new(0.0, -0.5);
        for (i, h) in self.homogenized.iter().enumerate() {
            let a = h.eval_grad(&y, &mut ga);
            let b = h.eval_grad(&w, &mut gb).conj();
            values[2 * i] = (a + b) * 0.5;
            values[2 * i + 1] = (a - b) * inv_2i;
            let (re_row, im_row) = jac[2 * i * m..(2 * i + 2) * m].split_at_mut(m);
            for j in 0..m {
                let phase = if j == 0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    self.phases[j - 1]
                };
                let da = ga[j] * phase;
                let db = (gb[j] * phase).conj();
                re_row[j] = (da + db) * 0.5;
                im_row[j] = (da - db) * inv_2i;
            }
        }
    }

    fn residual(&self, r: &[Complex64]) -> f64 {
        let scale = r.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let y: Vec<Complex64> = r.iter().zip(&self.phases).map(|(x, p)| x * p).collect();
        let w: Vec<Complex64> = r.iter().zip(&self.phases).map(|(x, p)| x.conj() * p).collect();
        let mut worst = 0.0f64;
        for (i, f) in self.affine.iter().enumerate() {
            let a = f.eval(&y);
            let b = f.eval(&w).conj();
            let denom = self.l1[i] * scale.powi(self.degrees[2 * i] as i32);
            let p = (a + b) * 0.5;
            let q = (a - b) * Complex64::new(0.0, -0.5);
            worst = worst.max(p.norm() / denom).max(q.norm() / denom);
        }
        worst
    }
}

/// One line of a fiber-count trial stream.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiberRecord {
    pub trial: u64,
    pub theta: Vec<f64>,
    pub count: Option<usize>,
    pub excluded: usize,
    pub discarded: bool,
    pub reason: Option<String>,
    pub paths_failed: usize,
}

impl FiberRecord {
    /// Turns a fiber result into a record. Degenerate fibers, unreliable
    /// solves and ambiguous classifications become discards; any other error
    /// is returned.
    pub fn from_result(trial: u64, theta: &ThetaPoint, result: Result<FiberCount>) -> Result<Self> {
        let discard = |reason: &str, paths_failed: usize| Self {
            trial,
            theta: theta.angles().to_vec(),
            count: None,
            excluded: 0,
            discarded: true,
            reason: Some(reason.to_owned()),
            paths_failed,
        };
        match result {
            Ok(fc) => Ok(Self {
                trial,
                theta: fc.theta.angles().to_vec(),
                count: Some(fc.count),
                excluded: fc.excluded_near_zero,
                discarded: false,
                reason: None,
                paths_failed: fc.solve.paths_failed,
            }),
            Err(Error::DegenerateFiber(r)) => Ok(discard(&r, 0)),
            Err(Error::UnreliableSolve { failed, .. }) => Ok(discard("unreliable solve", failed)),
            Err(Error::AmbiguousClassification { .. }) => {
                Ok(discard("ambiguous real classification", 0))
            }
            Err(e) => Err(e),
        }
    }
}
