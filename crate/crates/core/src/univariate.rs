//! Univariate polynomials: Sturm real-root counting and all complex roots by
//! Weierstrass (Durand-Kerner) simultaneous iteration.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::{Field, MultiPoly};

const MAX_ITER: usize = 200;

#[derive(Clone, Debug, PartialEq)]
pub struct UniPoly {
    /// Ascending degree order; the last entry is nonzero.
    coeffs: Vec<Complex64>,
    field: Field,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Complex64>, field: Field) -> Result<Self> {
        while coeffs.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("zero polynomial".into()));
        }
        if field == Field::Real && coeffs.iter().any(|c| c.im != 0.0) {
            return Err(Error::InvalidArgument(
                "real polynomial given complex coefficients".into(),
            ));
        }
        Ok(Self { coeffs, field })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(
            coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect(),
            Field::Real,
        )
    }

    pub fn from_complex(coeffs: &[Complex64]) -> Result<Self> {
        Self::new(coeffs.to_vec(), Field::Complex)
    }

    /// Restriction of a one-variable [`MultiPoly`].
    pub fn from_multi(p: &MultiPoly) -> Result<Self> {
        if p.nvars() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: p.nvars(),
            });
        }
        let deg = p.degree().ok_or_else(|| Error::InvalidArgument("zero polynomial".into()))?;
        let mut c = vec![Complex64::new(0.0, 0.0); deg as usize + 1];
        for (e, v) in p.terms() {
            c[e.entries()[0] as usize] = *v;
        }
        Self::new(c, p.field())
    }

    /// The polynomial `w -> f(z1, w)` of a two-variable `f`, or `None` when
    /// it vanishes identically.
    pub fn slice_second(f: &MultiPoly, z1: Complex64) -> Result<Option<Self>> {
        if f.nvars() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: f.nvars(),
            });
        }
        let deg = f.degree_in(1).unwrap_or(0) as usize;
        let mut c = vec![Complex64::new(0.0, 0.0); deg + 1];
        for (e, v) in f.terms() {
            let [a, b] = [e.entries()[0], e.entries()[1]];
            c[b as usize] += v * z1.powu(a);
        }
        match Self::new(c, Field::Complex) {
            Ok(p) => Ok(Some(p)),
            Err(Error::InvalidArgument(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// Number of distinct real roots from the sign variations of the Sturm
    /// chain at minus and plus infinity.
    pub fn sturm_count_real_roots(&self) -> Result<usize> {
        if self.coeffs.iter().any(|c| c.im != 0.0) {
            return Err(Error::InvalidArgument("Sturm counting needs real coefficients".into()));
        }
        let p: Vec<f64> = self.coeffs.iter().map(|c| c.re).collect();
        if p.len() == 1 {
            return Ok(0);
        }
        let dp: Vec<f64> = p
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| k as f64 * c)
            .collect();
        let mut chain = vec![normalized(p), normalized(dp)];
        while chain.last().unwrap().len() > 1 {
            let k = chain.len();
            let (r, noise) = remainder(&chain[k - 2], &chain[k - 1]);
            let lead = r.last().copied().unwrap_or(0.0);
            if lead.abs() <= noise {
                return Err(Error::UnreliableCount(format!(
                    "remainder of degree {} lost to round-off (|lead| = {lead:e})",
                    r.len().saturating_sub(1)
                )));
            }
            chain.push(normalized(r.iter().map(|x| -x).collect()));
        }
        let signs_at = |neg_inf: bool| -> Vec<f64> {
            chain
                .iter()
                .map(|q| {
                    let lead = *q.last().unwrap();
                    let odd = (q.len() - 1) % 2 == 1;
                    if neg_inf && odd {
                        -lead
                    } else {
                        lead
                    }
                })
                .collect()
        };
        let lo = sign_changes(&signs_at(true));
        let hi = sign_changes(&signs_at(false));
        Ok(lo.saturating_sub(hi))
    }

    /// All `deg p` complex roots, with multiplicity.
    pub fn all_complex_roots(&self) -> Result<Vec<Complex64>> {
        let d = self.degree();
        if d == 0 {
            return Err(Error::InvalidArgument("constant polynomial has no roots".into()));
        }
        if d == 1 {
            return Ok(vec![-self.coeffs[0] / self.coeffs[1]]);
        }
        let lead = self.coeffs[d];
        let monic: Vec<Complex64> = self.coeffs.iter().map(|c| c / lead).collect();
        // Geometric mean of the root moduli; zero roots fall back to 1.
        let radius = match monic[0].norm() {
            r if r > 0.0 => r.powf(1.0 / d as f64),
            _ => 1.0,
        };
        if let Ok(roots) = self.weierstrass(&monic, radius, 0.4) {
            return Ok(roots);
        }
        // one deterministic restart on a wider, rotated circle
        self.weierstrass(&monic, 1.5 * radius, 0.4 + TAU / (4.0 * d as f64))
            .map_err(|(partial, converged)| Error::RootFindingFailure { partial, converged })
    }

    #[allow(clippy::type_complexity)]
    fn weierstrass(
        &self,
        monic: &[Complex64],
        radius: f64,
        phase: f64,
    ) -> std::result::Result<Vec<Complex64>, (Vec<Complex64>, Vec<bool>)> {
        let d = monic.len() - 1;
        let horner = |z: Complex64| {
            monic
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
        };
        let mut z: Vec<Complex64> = (0..d)
            .map(|k| Complex64::from_polar(radius, phase + TAU * k as f64 / d as f64))
            .collect();
        for _ in 0..MAX_ITER {
            let mut max_rel = 0.0f64;
            for i in 0..d {
                let mut denom = Complex64::new(1.0, 0.0);
                for j in 0..d {
                    if j != i {
                        denom *= z[i] - z[j];
                    }
                }
                if denom.norm() == 0.0 {
                    // coincident iterates: nudge apart deterministically
                    let bump = Complex64::new(1e-8, 1e-8) * (1.0 + z[i].norm());
                    z[i] += bump;
                    max_rel = f64::INFINITY;
                    continue;
                }
                let step = horner(z[i]) / denom;
                z[i] -= step;
                max_rel = max_rel.max(step.norm() / (1.0 + z[i].norm()));
            }
            if max_rel <= 1e-14 {
                break;
            }
        }
        let converged: Vec<bool> = z.iter().map(|&r| self.root_ok(r)).collect();
        if converged.iter().all(|&c| c) {
            Ok(z)
        } else {
            Err((z, converged))
        }
    }

    /// `|p(z)| <= 1e-8 (1 + max |c_k|)`, or at the rounding floor of evaluating
    /// `p` at `z`.
    fn root_ok(&self, z: Complex64) -> bool {
        if !z.re.is_finite() || !z.im.is_finite() {
            return false;
        }
        let val = self.eval(z).norm();
        let max_c = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let abs_scale = self
            .coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * z.norm() + c.norm());
        val <= 1e-8 * (1.0 + max_c) || val <= 64.0 * f64::EPSILON * abs_scale
    }
}

fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let m = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if m > 0.0 {
        v.iter_mut().for_each(|x| *x /= m);
    }
    v
}

/// Remainder of `a` divided by `b` (both ascending), with an estimate of the
/// round-off level in its coefficients.
fn remainder(a: &[f64], b: &[f64]) -> (Vec<f64>, f64) {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = b[db];
    let mut qmax = 0.0f64;
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let q = r[r.len() - 1] / lead;
        qmax = qmax.max(q.abs());
        for (k, bk) in b.iter().enumerate() {
            r[shift + k] -= q * bk;
        }
        r.pop();
    }
    let scale_b = b.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let scale_a = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let noise = 1e-12 * (scale_a + qmax * scale_b);
    while r.last().is_some_and(|x| *x == 0.0) {
        r.pop();
    }
    (r, noise)
}

fn sign_changes(vals: &[f64]) -> usize {
    vals.windows(2)
        .filter(|w| (w[0] < 0.0) != (w[1] < 0.0))
        .count()
}
