//! Path tracking for the total-degree homotopy in projective coordinates.
//!
//! Unknowns are `X = (x_0, x_1, ..., x_n)` restricted to a random affine patch
//! `a . X = 1`, so paths heading to infinity converge to finite points with
//! `x_0 -> 0` instead of blowing up. The homotopy is parametrized by
//! `s = 1 - t`, running from the start system at `s = 1` to the target at
//! `s = 0`, which keeps full floating-point resolution near the target:
//!
//! `H(X, s) = gamma s (x_i^{d_i} - c_i x_0^{d_i}) + (1 - s) F_i(X)`.

use num_complex::Complex64;

use super::linalg::{max_norm, solve_in_place};
use super::{SolveOptions, Target};

pub(crate) enum PathEnd {
    Finite { point: Vec<Complex64>, residual: f64 },
    Diverged,
    Failed,
}

pub(crate) struct Homotopy<'a, T: Target + ?Sized> {
    pub target: &'a T,
    pub gamma: Complex64,
    pub start_consts: Vec<Complex64>,
    pub patch: Vec<Complex64>,
}

/// Scratch buffers for one path.
struct Work {
    vals: Vec<Complex64>,
    fjac: Vec<Complex64>,
    jac: Vec<Complex64>,
    hs: Vec<Complex64>,
}

impl<T: Target + ?Sized> Homotopy<'_, T> {
    fn size(&self) -> usize {
        self.target.nvars() + 1
    }

    /// Fills `w.jac` with `dH/dX` and `w.hs` with `H` (if `want_h`) or
    /// `dH/ds` (otherwise).
    fn eval(&self, x: &[Complex64], s: f64, w: &mut Work, want_h: bool) {
        let n = self.target.nvars();
        let m = n + 1;
        self.target.eval_homogeneous(x, &mut w.vals, &mut w.fjac);
        let degrees = self.target.degrees();
        let gs = self.gamma * s;
        let one_minus = 1.0 - s;
        for i in 0..n {
            let d = degrees[i] as i32;
            let c = self.start_consts[i];
            let xi = x[i + 1];
            let x0 = x[0];
            let start = xi.powi(d) - c * x0.powi(d);
            let row = &mut w.jac[i * m..(i + 1) * m];
            for (j, r) in row.iter_mut().enumerate() {
                *r = w.fjac[i * m + j] * one_minus;
            }
            row[0] -= gs * c * f64::from(d) * x0.powi(d - 1);
            row[i + 1] += gs * f64::from(d) * xi.powi(d - 1);
            w.hs[i] = if want_h {
                gs * start + one_minus * w.vals[i]
            } else {
                self.gamma * start - w.vals[i]
            };
        }
        let patch_row = &mut w.jac[n * m..];
        patch_row.copy_from_slice(&self.patch);
        w.hs[n] = if want_h {
            self.patch.iter().zip(x).map(|(a, z)| a * z).sum::<Complex64>() - 1.0
        } else {
            Complex64::new(0.0, 0.0)
        };
    }

    /// `dX/ds = -J^{-1} dH/ds`.
    fn velocity(&self, x: &[Complex64], s: f64, w: &mut Work) -> Option<Vec<Complex64>> {
        self.eval(x, s, w, false);
        let m = self.size();
        let mut rhs: Vec<Complex64> = w.hs.iter().map(|v| -v).collect();
        solve_in_place(&mut w.jac, &mut rhs, m).then_some(rhs)
    }

    /// One Newton update at fixed `s`; returns the correction's max norm.
    fn newton(&self, x: &mut [Complex64], s: f64, w: &mut Work) -> Option<f64> {
        self.eval(x, s, w, true);
        let m = self.size();
        let mut delta = w.hs.clone();
        if !solve_in_place(&mut w.jac, &mut delta, m) {
            return None;
        }
        for (xi, d) in x.iter_mut().zip(&delta) {
            *xi -= d;
        }
        Some(max_norm(&delta))
    }

    fn rk4(&self, x: &[Complex64], s: f64, h: f64, w: &mut Work) -> Option<Vec<Complex64>> {
        // integrate dX/ds from s to s - h
        let axpy = |a: &[Complex64], k: &[Complex64], f: f64| -> Vec<Complex64> {
            a.iter().zip(k).map(|(x, v)| x + v * f).collect()
        };
        let k1 = self.velocity(x, s, w)?;
        let k2 = self.velocity(&axpy(x, &k1, -h / 2.0), s - h / 2.0, w)?;
        let k3 = self.velocity(&axpy(x, &k2, -h / 2.0), s - h / 2.0, w)?;
        let k4 = self.velocity(&axpy(x, &k3, -h), s - h, w)?;
        Some(
            x.iter()
                .enumerate()
                .map(|(i, xi)| xi - (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0))
                .collect(),
        )
    }

    fn affine_norm(x: &[Complex64]) -> f64 {
        let x0 = x[0].norm();
        let rest = max_norm(&x[1..]);
        if x0 == 0.0 {
            f64::INFINITY
        } else {
            rest / x0
        }
    }

    pub(crate) fn track(&self, start: Vec<Complex64>, opts: &SolveOptions) -> PathEnd {
        let m = self.size();
        let n = m - 1;
        let mut w = Work {
            vals: vec![Complex64::new(0.0, 0.0); n],
            fjac: vec![Complex64::new(0.0, 0.0); n * m],
            jac: vec![Complex64::new(0.0, 0.0); m * m],
            hs: vec![Complex64::new(0.0, 0.0); m],
        };
        let mut x = start;
        let mut s = 1.0f64;
        let mut h = opts.initial_step;
        let mut streak = 0;
        let mut steps = 0usize;
        while s > 0.0 {
            steps += 1;
            if steps > opts.max_steps {
                return PathEnd::Failed;
            }
            let h_try = h.min(s);
            let s_next = if h_try >= s { 0.0 } else { s - h_try };
            match self.step(&x, s, s - s_next, &mut w, opts) {
                Some(next) => {
                    x = next;
                    s = s_next;
                    if Self::affine_norm(&x) > opts.divergence_norm {
                        return PathEnd::Diverged;
                    }
                    streak += 1;
                    if streak >= 5 {
                        h = (2.0 * h).min(opts.max_step);
                        streak = 0;
                    }
                }
                None => {
                    streak = 0;
                    h /= 2.0;
                    if h < opts.min_step {
                        if s <= opts.endgame_s {
                            break;
                        }
                        return PathEnd::Failed;
                    }
                }
            }
        }
        self.finish(x, &mut w, opts)
    }

    fn step(
        &self,
        x: &[Complex64],
        s: f64,
        h: f64,
        w: &mut Work,
        opts: &SolveOptions,
    ) -> Option<Vec<Complex64>> {
        let mut y = self.rk4(x, s, h, w)?;
        let s_next = (s - h).max(0.0);
        let scale = max_norm(x);
        let mut prev = f64::INFINITY;
        for it in 0..opts.corrector_iterations {
            let d = self.newton(&mut y, s_next, w)?;
            if it == 0 && d > opts.max_first_correction * scale {
                return None;
            }
            if d > prev {
                return None;
            }
            if d <= opts.corrector_tol * max_norm(&y) {
                return Some(y);
            }
            prev = d;
        }
        None
    }

    /// Newton at the target followed by classification of the endpoint.
    fn finish(&self, mut x: Vec<Complex64>, w: &mut Work, opts: &SolveOptions) -> PathEnd {
        let mut best = x.clone();
        let mut best_d = f64::INFINITY;
        for _ in 0..opts.endgame_iterations {
            let Some(d) = self.newton(&mut x, 0.0, w) else {
                break;
            };
            if !d.is_finite() {
                break;
            }
            if d < best_d {
                best_d = d;
                best.clone_from(&x);
            }
            if d <= 1e-15 * max_norm(&x) {
                break;
            }
        }
        let x = best;
        if Self::affine_norm(&x) > opts.divergence_norm {
            return PathEnd::Diverged;
        }
        let point: Vec<Complex64> = x[1..].iter().map(|z| z / x[0]).collect();
        let residual = self.target.residual(&point);
        if residual <= opts.residual_tol {
            PathEnd::Finite { point, residual }
        } else {
            PathEnd::Failed
        }
    }
}
