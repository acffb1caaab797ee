//! Sparse multivariate polynomials over real or complex double-precision
//! coefficients.
//!
//! Terms are keyed by [`ExponentVector`] and iterated in graded lexicographic
//! order, so everything derived from a polynomial (text dumps, compiled
//! evaluators, solver start points) is deterministic. Zero coefficients are
//! never stored; pruning is exact, with no epsilon.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Multi-index of a monomial `x_1^{a_1} ... x_m^{a_m}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExponentVector(Vec<u32>);

impl ExponentVector {
    pub fn new(entries: Vec<u32>) -> Self {
        Self(entries)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0; len])
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Componentwise sum.
    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.len(), other.len());
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl From<Vec<u32>> for ExponentVector {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

impl From<&[u32]> for ExponentVector {
    fn from(v: &[u32]) -> Self {
        Self(v.to_vec())
    }
}

// Graded lexicographic: total degree first, then entrywise.
impl Ord for ExponentVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for ExponentVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

/// A point of the rolled coamoeba torus `(R / pi Z)^m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaPoint {
    angles: Vec<f64>,
}

impl ThetaPoint {
    /// Every angle must lie in `[0, pi)`.
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if let Some(a) = angles.iter().find(|a| !(0.0..PI).contains(*a)) {
            return Err(Error::InvalidArgument(format!(
                "angle {a} outside [0, pi)"
            )));
        }
        Ok(Self { angles })
    }

    /// Reduces arbitrary angles modulo pi.
    pub fn wrapped(angles: &[f64]) -> Self {
        let angles = angles
            .iter()
            .map(|a| {
                let r = a.rem_euclid(PI);
                // rem_euclid can round up to exactly pi
                if r >= PI {
                    0.0
                } else {
                    r
                }
            })
            .collect();
        Self { angles }
    }

    pub fn zero(len: usize) -> Self {
        Self {
            angles: vec![0.0; len],
        }
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoly {
    nvars: usize,
    field: Field,
    terms: BTreeMap<ExponentVector, Complex64>,
}

impl MultiPoly {
    pub fn zero(nvars: usize, field: Field) -> Self {
        Self {
            nvars,
            field,
            terms: BTreeMap::new(),
        }
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs. Repeated
    /// exponents are summed; exact zeros are dropped.
    pub fn from_terms<I, E>(nvars: usize, field: Field, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (E, Complex64)>,
        E: Into<ExponentVector>,
    {
        let mut p = Self::zero(nvars, field);
        for (e, c) in terms {
            let e = e.into();
            if e.len() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    got: e.len(),
                });
            }
            if field == Field::Real && c.im != 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "real polynomial given complex coefficient {c}"
                )));
            }
            *p.terms.entry(e).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        p.prune();
        Ok(p)
    }

    /// Convenience constructor for real coefficients.
    pub fn from_real_terms<I, E>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (E, f64)>,
        E: Into<ExponentVector>,
    {
        Self::from_terms(
            nvars,
            Field::Real,
            terms.into_iter().map(|(e, c)| (e, Complex64::new(c, 0.0))),
        )
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| *c != Complex64::new(0.0, 0.0));
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in graded lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &Complex64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exponent: &[u32]) -> Complex64 {
        self.terms
            .get(&ExponentVector::from(exponent))
            .copied()
            .unwrap_or_default()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(ExponentVector::total_degree).max()
    }

    /// Degree in a single variable; `None` for the zero polynomial.
    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|e| e.entries()[var]).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(ExponentVector::total_degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn max_coeff_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Reinterprets the polynomial as complex without touching coefficients.
    pub fn to_complex(&self) -> Self {
        Self {
            field: Field::Complex,
            ..self.clone()
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let field = if factor.im == 0.0 {
            self.field
        } else {
            Field::Complex
        };
        let mut out = Self {
            nvars: self.nvars,
            field,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * factor)).collect(),
        };
        out.prune();
        out
    }

    pub fn evaluate(&self, point: &[Complex64]) -> Result<Complex64> {
        self.check_len(point.len())?;
        Ok(self
            .terms
            .iter()
            .map(|(e, c)| c * monomial(e.entries(), point))
            .sum())
    }

    /// `sum |c_a| |x|^a`, the natural scale against which residuals are judged.
    pub fn evaluate_abs(&self, point: &[Complex64]) -> Result<f64> {
        self.check_len(point.len())?;
        Ok(self
            .terms
            .iter()
            .map(|(e, c)| {
                c.norm()
                    * e.entries()
                        .iter()
                        .zip(point)
                        .map(|(&a, z)| z.norm().powi(a as i32))
                        .product::<f64>()
            })
            .sum())
    }

    pub fn partial_derivative(&self, var: usize) -> Result<Self> {
        if var >= self.nvars {
            return Err(Error::IndexOutOfRange {
                index: var,
                nvars: self.nvars,
            });
        }
        let mut out = Self::zero(self.nvars, self.field);
        for (e, c) in &self.terms {
            let a = e.entries()[var];
            if a == 0 {
                continue;
            }
            let mut d = e.entries().to_vec();
            d[var] -= 1;
            out.terms.insert(ExponentVector(d), c * f64::from(a));
        }
        out.prune();
        Ok(out)
    }

    /// Sets `X_chart = 1` on a homogeneous polynomial and drops that variable.
    pub fn dehomogenize(&self, chart: usize) -> Result<Self> {
        if chart >= self.nvars {
            return Err(Error::IndexOutOfRange {
                index: chart,
                nvars: self.nvars,
            });
        }
        if !self.is_homogeneous() {
            return Err(Error::NotHomogeneous);
        }
        let terms = self.terms.iter().map(|(e, c)| {
            let mut v = e.entries().to_vec();
            v.remove(chart);
            (ExponentVector(v), *c)
        });
        Self::from_terms(self.nvars - 1, self.field, terms)
    }

    /// Inverse of [`dehomogenize`](Self::dehomogenize): inserts a new variable
    /// at position `chart` raised to make every term degree `degree`.
    pub fn homogenize(&self, chart: usize, degree: u32) -> Result<Self> {
        if chart > self.nvars {
            return Err(Error::IndexOutOfRange {
                index: chart,
                nvars: self.nvars + 1,
            });
        }
        if let Some(d) = self.degree() {
            if d > degree {
                return Err(Error::InvalidArgument(format!(
                    "cannot homogenize degree {d} polynomial to degree {degree}"
                )));
            }
        }
        let terms = self.terms.iter().map(|(e, c)| {
            let mut v = e.entries().to_vec();
            v.insert(chart, degree - e.total_degree());
            (ExponentVector(v), *c)
        });
        Self::from_terms(self.nvars + 1, self.field, terms)
    }

    /// Substitutes `z_j = r_j e^{i theta_j}`: the coefficient at `a` becomes
    /// `c_a e^{i <a, theta>}`.
    pub fn rotate_arguments(&self, theta: &ThetaPoint) -> Result<Self> {
        self.rotate_by_angles(theta.angles())
    }

    /// Same as [`rotate_arguments`](Self::rotate_arguments) but for arbitrary
    /// real angles (used for inverse rotations and the modulo-pi shift).
    pub fn rotate_by_angles(&self, angles: &[f64]) -> Result<Self> {
        self.check_len(angles.len())?;
        let mut out = Self::zero(self.nvars, Field::Complex);
        for (e, c) in &self.terms {
            let phase: f64 = e
                .entries()
                .iter()
                .zip(angles)
                .map(|(&a, t)| f64::from(a) * t)
                .sum();
            out.terms
                .insert(e.clone(), c * Complex64::from_polar(1.0, phase));
        }
        out.prune();
        Ok(out)
    }

    /// Splits `f = Re f + i Im f` into two real-coefficient polynomials.
    pub fn re_im_split(&self) -> (Self, Self) {
        let part = |pick: fn(&Complex64) -> f64| {
            let mut p = Self::zero(self.nvars, Field::Real);
            p.terms = self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), Complex64::new(pick(c), 0.0)))
                .collect();
            p.prune();
            p
        };
        (part(|c| c.re), part(|c| c.im))
    }

    pub fn support(&self) -> Result<Vec<ExponentVector>> {
        if self.is_zero() {
            return Err(Error::EmptySupport);
        }
        Ok(self.terms.keys().cloned().collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_len(other.nvars)?;
        let field = if self.field == Field::Real && other.field == Field::Real {
            Field::Real
        } else {
            Field::Complex
        };
        Self::from_terms(
            self.nvars,
            field,
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|(e, c)| (e.clone(), *c)),
        )
    }

    /// Serializes to the line format `c_re c_im : a_1 ... a_m`, preceded by a
    /// `# nvars <m> field <real|complex>` header.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "# nvars {} field {}\n",
            self.nvars,
            match self.field {
                Field::Real => "real",
                Field::Complex => "complex",
            }
        );
        for (e, c) in &self.terms {
            let exps: Vec<String> = e.entries().iter().map(u32::to_string).collect();
            s.push_str(&format!("{} {} : {}\n", c.re, c.im, exps.join(" ")));
        }
        s
    }

    /// Parses [`to_text`](Self::to_text) output. Without a header, `nvars`
    /// comes from the first term and the field is real iff every imaginary
    /// part is zero.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut nvars = None;
        let mut field = None;
        let mut terms = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix('#') {
                let words: Vec<&str> = header.split_whitespace().collect();
                for pair in words.chunks(2) {
                    match pair {
                        ["nvars", v] => {
                            nvars = Some(v.parse::<usize>().map_err(|e| {
                                Error::Parse(format!("line {}: {e}", lineno + 1))
                            })?)
                        }
                        ["field", "real"] => field = Some(Field::Real),
                        ["field", "complex"] => field = Some(Field::Complex),
                        _ => {}
                    }
                }
                continue;
            }
            let (coef, exps) = line
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("line {}: missing ':'", lineno + 1)))?;
            let nums: Vec<f64> = coef
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            let [re, im] = nums[..] else {
                return Err(Error::Parse(format!(
                    "line {}: expected two coefficient numbers",
                    lineno + 1
                )));
            };
            let exps: Vec<u32> = exps
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            terms.push((exps, Complex64::new(re, im)));
        }
        let nvars = match (nvars, terms.first()) {
            (Some(n), _) => n,
            (None, Some((e, _))) => e.len(),
            (None, None) => return Err(Error::Parse("empty polynomial without header".into())),
        };
        let field = field.unwrap_or(if terms.iter().all(|(_, c)| c.im == 0.0) {
            Field::Real
        } else {
            Field::Complex
        });
        Self::from_terms(nvars, field, terms.into_iter().map(|(e, c)| (ExponentVector(e), c)))
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: len,
            });
        }
        Ok(())
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match self.field {
                Field::Real => write!(f, "{}", c.re)?,
                Field::Complex => write!(f, "({c})")?,
            }
            for (j, &a) in e.entries().iter().enumerate() {
                match a {
                    0 => {}
                    1 => write!(f, "*x{}", j + 1)?,
                    _ => write!(f, "*x{}^{a}", j + 1)?,
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn monomial(exps: &[u32], point: &[Complex64]) -> Complex64 {
    exps.iter()
        .zip(point)
        .fold(Complex64::new(1.0, 0.0), |acc, (&a, z)| acc * z.powu(a))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn line() -> MultiPoly {
        MultiPoly::from_real_terms(2, [(vec![1, 0], 1.0), (vec![0, 1], 1.0), (vec![0, 0], -1.0)])
            .unwrap()
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(line().evaluate(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap(), c(1.0, 0.0));
        let xy = MultiPoly::from_real_terms(2, [(vec![1, 1], 1.0)]).unwrap();
        assert_eq!(xy.evaluate(&[c(0.0, 1.0), c(0.0, 1.0)]).unwrap(), c(-1.0, 0.0));
        let circle =
            MultiPoly::from_real_terms(2, [(vec![2, 0], 1.0), (vec![0, 2], 1.0), (vec![0, 0], -1.0)])
                .unwrap();
        let v = circle.evaluate(&[c(0.6, 0.0), c(0.8, 0.0)]).unwrap();
        assert!(v.norm() < 1e-15);
        assert!(matches!(
            line().evaluate(&[c(1.0, 0.0)]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn derivative_examples() {
        let p = MultiPoly::from_real_terms(2, [(vec![2, 1], 1.0)]).unwrap();
        let d = p.partial_derivative(0).unwrap();
        assert_eq!(d, MultiPoly::from_real_terms(2, [(vec![1, 1], 2.0)]).unwrap());

        let p = MultiPoly::from_real_terms(2, [(vec![1, 0], 1.0), (vec![0, 0], 1.0)]).unwrap();
        assert!(p.partial_derivative(1).unwrap().is_zero());

        let p = MultiPoly::from_real_terms(1, [(vec![3], 1.0), (vec![1], -1.0)]).unwrap();
        assert_eq!(
            p.partial_derivative(0).unwrap(),
            MultiPoly::from_real_terms(1, [(vec![2], 3.0), (vec![0], -1.0)]).unwrap()
        );
        assert!(matches!(
            p.partial_derivative(1),
            Err(Error::IndexOutOfRange { index: 1, nvars: 1 })
        ));
    }

    #[test]
    fn dehomogenize_examples() {
        let f = MultiPoly::from_real_terms(
            3,
            [(vec![2, 0, 0], 1.0), (vec![1, 1, 0], 1.0), (vec![0, 1, 1], 1.0)],
        )
        .unwrap();
        let g = f.dehomogenize(0).unwrap();
        let want =
            MultiPoly::from_real_terms(2, [(vec![0, 0], 1.0), (vec![1, 0], 1.0), (vec![1, 1], 1.0)])
                .unwrap();
        assert_eq!(g, want);

        let f = MultiPoly::from_real_terms(2, [(vec![1, 1], 1.0)]).unwrap();
        assert_eq!(
            f.dehomogenize(1).unwrap(),
            MultiPoly::from_real_terms(1, [(vec![1], 1.0)]).unwrap()
        );

        let f = MultiPoly::from_real_terms(3, [(vec![0, 2, 0], 1.0)]).unwrap();
        assert_eq!(
            f.dehomogenize(0).unwrap(),
            MultiPoly::from_real_terms(2, [(vec![2, 0], 1.0)]).unwrap()
        );

        assert_eq!(line().dehomogenize(0), Err(Error::NotHomogeneous));
    }

    #[test]
    fn rotation_examples() {
        let xy = MultiPoly::from_real_terms(2, [(vec![1, 1], 1.0)]).unwrap();
        let t = ThetaPoint::new(vec![PI / 2.0, PI / 2.0]).unwrap();
        let r = xy.rotate_arguments(&t).unwrap();
        assert!((r.coeff(&[1, 1]) - c(-1.0, 0.0)).norm() < 1e-15);

        let same = line().rotate_arguments(&ThetaPoint::zero(2)).unwrap();
        assert_eq!(same, line().to_complex());

        let t = ThetaPoint::new(vec![PI / 2.0, PI / 4.0]).unwrap();
        let r = line().rotate_arguments(&t).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((r.coeff(&[1, 0]) - c(0.0, 1.0)).norm() < 1e-15);
        assert!((r.coeff(&[0, 1]) - c(h, h)).norm() < 1e-15);
        assert_eq!(r.coeff(&[0, 0]), c(-1.0, 0.0));

        let (re, im) = r.re_im_split();
        assert!(re.coeff(&[1, 0]).re.abs() < 1e-15);
        assert!((re.coeff(&[0, 1]).re - h).abs() < 1e-15);
        assert_eq!(re.coeff(&[0, 0]).re, -1.0);
        assert!((im.coeff(&[1, 0]).re - 1.0).abs() < 1e-15);
        assert!((im.coeff(&[0, 1]).re - h).abs() < 1e-15);
        assert_eq!(im.coeff(&[0, 0]), c(0.0, 0.0));
        assert_eq!(re.field(), Field::Real);

        assert!(line().rotate_arguments(&ThetaPoint::zero(3)).is_err());
    }

    #[test]
    fn split_examples() {
        let (re, im) = line().re_im_split();
        assert_eq!(re, line());
        assert!(im.is_zero());

        let p = MultiPoly::from_terms(1, Field::Complex, [(vec![2], c(2.0, 3.0))]).unwrap();
        let (re, im) = p.re_im_split();
        assert_eq!(re, MultiPoly::from_real_terms(1, [(vec![2], 2.0)]).unwrap());
        assert_eq!(im, MultiPoly::from_real_terms(1, [(vec![2], 3.0)]).unwrap());
    }

    #[test]
    fn support_examples() {
        let s = line().support().unwrap();
        assert_eq!(
            s,
            vec![
                ExponentVector::new(vec![0, 0]),
                ExponentVector::new(vec![0, 1]),
                ExponentVector::new(vec![1, 0]),
            ]
        );
        let p = MultiPoly::from_real_terms(2, [(vec![2, 3], 1.0)]).unwrap();
        assert_eq!(p.support().unwrap(), vec![ExponentVector::new(vec![2, 3])]);
        assert_eq!(MultiPoly::zero(2, Field::Real).support(), Err(Error::EmptySupport));
    }

    #[test]
    fn graded_lex_order() {
        let mut v = [ExponentVector::new(vec![0, 2]),
            ExponentVector::new(vec![1, 0]),
            ExponentVector::new(vec![0, 0]),
            ExponentVector::new(vec![1, 1])];
        v.sort();
        let got: Vec<&[u32]> = v.iter().map(|e| e.entries()).collect();
        assert_eq!(got, vec![&[0, 0][..], &[1, 0], &[0, 2], &[1, 1]]);
    }

    #[test]
    fn zero_terms_are_pruned() {
        let p = MultiPoly::from_real_terms(1, [(vec![1], 1.0), (vec![1], -1.0), (vec![0], 2.0)])
            .unwrap();
        assert_eq!(p.num_terms(), 1);
        assert!(MultiPoly::from_real_terms(1, [(vec![1, 0], 1.0)]).is_err());
        assert!(MultiPoly::from_terms(1, Field::Real, [(vec![1], c(0.0, 1.0))]).is_err());
    }

    #[test]
    fn theta_point_range() {
        assert!(ThetaPoint::new(vec![0.0, 3.0]).is_ok());
        assert!(ThetaPoint::new(vec![PI]).is_err());
        assert!(ThetaPoint::new(vec![-0.1]).is_err());
        let w = ThetaPoint::wrapped(&[PI + 0.5, -0.5]);
        assert!((w.angles()[0] - 0.5).abs() < 1e-15);
        assert!((w.angles()[1] - (PI - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn text_round_trip() {
        let p = MultiPoly::from_terms(
            2,
            Field::Complex,
            [(vec![1, 0], c(0.1, -2.5e-17)), (vec![0, 3], c(-1.0 / 3.0, 7.0))],
        )
        .unwrap();
        assert_eq!(MultiPoly::from_text(&p.to_text()).unwrap(), p);
        let z = MultiPoly::zero(3, Field::Real);
        assert_eq!(MultiPoly::from_text(&z.to_text()).unwrap(), z);
        let bare = MultiPoly::from_text("1 0 : 1 0\n-1 0 : 0 0\n").unwrap();
        assert_eq!(bare.field(), Field::Real);
        assert!(MultiPoly::from_text("1 0 1 0").is_err());
    }
}
