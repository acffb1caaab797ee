//! Jacobians of `Log` and `Arg` restricted to a plane curve.
//!
//! Along the chart `z1 -> (z1, z2(z1))` with real coordinates `z1 = u + iv`,
//! the logarithmic derivatives `m1 = 1/z1` and `m2 = z2'/z2` give
//! `d log|z_k| = Re(m_k dz1)` and `d arg z_k = Im(m_k dz1)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::MultiPoly;
use crate::rng::{standard_complex_normal, SeedContext};
use crate::univariate::UniPoly;

/// Step of the central differences in [`finite_difference_determinants`].
pub const FD_STEP: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub z: [Complex64; 2],
    /// `dz2/dz1 = -(df/dz1) / (df/dz2)`.
    pub branch_derivative: Complex64,
}

/// A curve `f(z1, z2) = 0` with its first partial derivatives.
#[derive(Clone, Debug)]
pub struct Curve {
    f: MultiPoly,
    d1: MultiPoly,
    d2: MultiPoly,
}

impl Curve {
    pub fn new(f: &MultiPoly) -> Result<Self> {
        if f.nvars() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: f.nvars(),
            });
        }
        if f.degree_in(1).unwrap_or(0) == 0 {
            return Err(Error::InvalidArgument(
                "curve does not involve the second variable".into(),
            ));
        }
        let f = f.to_complex();
        Ok(Self {
            d1: f.partial_derivative(0)?,
            d2: f.partial_derivative(1)?,
            f,
        })
    }

    pub fn polynomial(&self) -> &MultiPoly {
        &self.f
    }

    /// Valid curve points over `z1`: slice roots polished by Newton, kept
    /// when the residual is below `1e-10` of the term scale, `df/dz2` is
    /// above `1e-8` of it, and both coordinates are nonzero.
    pub fn points_over(&self, z1: Complex64) -> Result<Vec<CurvePoint>> {
        let Some(slice) = UniPoly::slice_second(&self.f, z1)? else {
            return Ok(Vec::new());
        };
        if slice.degree() == 0 || z1 == Complex64::new(0.0, 0.0) {
            return Ok(Vec::new());
        }
        let roots = match slice.all_complex_roots() {
            Ok(r) => r,
            Err(Error::RootFindingFailure { .. }) => return Ok(Vec::new()),
            Err(e) => return Err(e),
        };
        let mut out = Vec::with_capacity(roots.len());
        for root in roots {
            let Some(z2) = self.polish(z1, root) else {
                continue;
            };
            if let Some(p) = self.point(z1, z2)? {
                out.push(p);
            }
        }
        Ok(out)
    }

    fn point(&self, z1: Complex64, z2: Complex64) -> Result<Option<CurvePoint>> {
        let z = [z1, z2];
        let scale = self.f.evaluate_abs(&z)?.max(f64::MIN_POSITIVE);
        let fz = self.f.evaluate(&z)?;
        let d2 = self.d2.evaluate(&z)?;
        if fz.norm() > 1e-10 * scale || d2.norm() <= 1e-8 * scale || z2.norm() <= 1e-12 {
            return Ok(None);
        }
        let d1 = self.d1.evaluate(&z)?;
        Ok(Some(CurvePoint {
            z,
            branch_derivative: -d1 / d2,
        }))
    }

    /// Newton on `w -> f(z1, w)` from `w`; `None` if a derivative vanishes.
    fn polish(&self, z1: Complex64, mut w: Complex64) -> Option<Complex64> {
        for _ in 0..8 {
            let z = [z1, w];
            let fz = self.f.evaluate(&z).ok()?;
            let d2 = self.d2.evaluate(&z).ok()?;
            if d2 == Complex64::new(0.0, 0.0) {
                return None;
            }
            let step = fz / d2;
            w -= step;
            if step.norm() <= 1e-15 * w.norm() {
                break;
            }
        }
        (w.re.is_finite() && w.im.is_finite()).then_some(w)
    }

    /// The branch through `p` evaluated at `z1 + dz`.
    fn follow(&self, p: &CurvePoint, dz: Complex64) -> Option<Complex64> {
        self.polish(p.z[0] + dz, p.z[1] + p.branch_derivative * dz)
    }
}

/// Draws `z1` from the standard complex Gaussian (rejecting `|z1| < 0.1`)
/// and collects curve points over it until `count` points are found. Fails
/// after `20 * count + 100` draws.
pub fn sample_curve_points(
    f: &MultiPoly,
    count: usize,
    seed: &SeedContext,
) -> Result<Vec<CurvePoint>> {
    let curve = Curve::new(f)?;
    let mut rng = seed.rng();
    let cap = 20 * count + 100;
    let mut out = Vec::with_capacity(count);
    for _ in 0..cap {
        if out.len() >= count {
            break;
        }
        let z1 = standard_complex_normal(&mut rng);
        if z1.norm() < 0.1 {
            continue;
        }
        for p in curve.points_over(z1)? {
            if out.len() < count {
                out.push(p);
            }
        }
    }
    if out.len() < count {
        return Err(Error::SamplingFailure(format!(
            "found {} of {count} curve points in {cap} draws",
            out.len()
        )));
    }
    Ok(out)
}

/// `(det DLog, det DArg)` with respect to `(Re z1, Im z1)`.
pub fn jacobian_determinants(p: &CurvePoint) -> (f64, f64) {
    let m1 = p.z[0].inv();
    let m2 = p.branch_derivative / p.z[1];
    let det_log = m1.re * (-m2.im) - (-m1.im) * m2.re;
    let det_arg = m1.im * m2.re - m1.re * m2.im;
    (det_log, det_arg)
}

/// Central-difference estimates of both determinants along the branch
/// through `p`; angle differences are reduced modulo pi. `None` when the
/// branch cannot be followed.
pub fn finite_difference_determinants(curve: &Curve, p: &CurvePoint, h: f64) -> Option<(f64, f64)> {
    let columns = |dir: Complex64| -> Option<([f64; 2], [f64; 2])> {
        let fwd = curve.follow(p, dir * h)?;
        let bwd = curve.follow(p, -dir * h)?;
        let z1f = p.z[0] + dir * h;
        let z1b = p.z[0] - dir * h;
        let log = [
            (z1f.norm().ln() - z1b.norm().ln()) / (2.0 * h),
            (fwd.norm().ln() - bwd.norm().ln()) / (2.0 * h),
        ];
        let arg = [
            angle_diff(z1f.arg(), z1b.arg()) / (2.0 * h),
            angle_diff(fwd.arg(), bwd.arg()) / (2.0 * h),
        ];
        Some((log, arg))
    };
    let (log_u, arg_u) = columns(Complex64::new(1.0, 0.0))?;
    let (log_v, arg_v) = columns(Complex64::new(0.0, 1.0))?;
    let det_log = log_u[0] * log_v[1] - log_v[0] * log_u[1];
    let det_arg = arg_u[0] * arg_v[1] - arg_v[0] * arg_u[1];
    Some((det_log, det_arg))
}

/// `a - b` reduced to `[-pi/2, pi/2)`.
fn angle_diff(a: f64, b: f64) -> f64 {
    (a - b + PI / 2.0).rem_euclid(PI) - PI / 2.0
}

pub fn relative_difference(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-12)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JacobianSummary {
    pub points: usize,
    pub max_rel_err_analytic: f64,
    pub max_rel_err_fd: f64,
}

/// Compares the two analytic determinants with each other and with finite
/// differences on `points_per_curve` sampled points of every curve.
pub fn check_curves(
    curves: &[MultiPoly],
    points_per_curve: usize,
    seed: &SeedContext,
) -> Result<JacobianSummary> {
    let mut summary = JacobianSummary {
        points: 0,
        max_rel_err_analytic: 0.0,
        max_rel_err_fd: 0.0,
    };
    for (i, f) in curves.iter().enumerate() {
        let curve = Curve::new(f)?;
        let points = sample_curve_points(f, points_per_curve, &seed.child(&format!("curve{i}")))?;
        for p in &points {
            let (det_log, det_arg) = jacobian_determinants(p);
            let (fd_log, fd_arg) = finite_difference_determinants(&curve, p, FD_STEP)
                .ok_or_else(|| Error::SamplingFailure("branch could not be followed".into()))?;
            summary.max_rel_err_analytic = summary
                .max_rel_err_analytic
                .max(relative_difference(det_arg, det_log));
            summary.max_rel_err_fd = summary
                .max_rel_err_fd
                .max(relative_difference(fd_log, det_log))
                .max(relative_difference(fd_arg, det_arg));
            summary.points += 1;
        }
    }
    Ok(summary)
}
