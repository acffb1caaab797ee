//! Gaussian polynomial ensembles.
//!
//! Dense Kostlan ensembles draw every monomial of degree `d` in `m + 1`
//! homogeneous variables with variance equal to its multinomial coefficient
//! (the reciprocal of the monomial's squared Fubini-Study norm). Sparse toric
//! ensembles draw one independent coefficient per lattice point of a support
//! set, with per-point variances; dilating the support by `d` convolves those
//! variances `d` times.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{ExponentVector, Field, MultiPoly};
use crate::polytope::{affine_dimension, LatticePoint};
use crate::rng::{standard_complex_normal, standard_normal, SeedContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    DenseKostlan,
    SparseToric,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    /// `m + 1` homogeneous variables for dense ensembles, `m` for sparse ones.
    pub nvars_ambient: usize,
    /// Degree `d` (dense) or dilation factor (sparse).
    pub degree_or_dilation: u32,
    pub support: Option<Vec<ExponentVector>>,
    pub base_variances: Option<Vec<f64>>,
    pub field: Field,
}

impl EnsembleSpec {
    pub fn dense(nvars_ambient: usize, degree: u32, field: Field) -> Result<Self> {
        let spec = Self {
            kind: EnsembleKind::DenseKostlan,
            nvars_ambient,
            degree_or_dilation: degree,
            support: None,
            base_variances: None,
            field,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Sparse ensemble on `support`, dilated by `dilation`. Missing variances
    /// default to all ones.
    pub fn sparse(
        support: Vec<ExponentVector>,
        base_variances: Option<Vec<f64>>,
        dilation: u32,
        field: Field,
    ) -> Result<Self> {
        let nvars = support.first().map_or(0, ExponentVector::len);
        let spec = Self {
            kind: EnsembleKind::SparseToric,
            nvars_ambient: nvars,
            degree_or_dilation: dilation,
            support: Some(support),
            base_variances,
            field,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree_or_dilation == 0 {
            return Err(Error::InvalidArgument("degree/dilation must be >= 1".into()));
        }
        match self.kind {
            EnsembleKind::DenseKostlan => {
                if self.support.is_some() || self.base_variances.is_some() {
                    return Err(Error::InvalidArgument(
                        "dense ensembles take no support".into(),
                    ));
                }
                if self.nvars_ambient == 0 {
                    return Err(Error::InvalidArgument("no variables".into()));
                }
            }
            EnsembleKind::SparseToric => {
                let support = self
                    .support
                    .as_ref()
                    .filter(|s| !s.is_empty())
                    .ok_or_else(|| Error::InvalidArgument("sparse ensemble needs a support".into()))?;
                if let Some(e) = support.iter().find(|e| e.len() != self.nvars_ambient) {
                    return Err(Error::DimensionMismatch {
                        expected: self.nvars_ambient,
                        got: e.len(),
                    });
                }
                let pts: Vec<LatticePoint> = support.iter().map(to_point).collect();
                let dim = affine_dimension(&pts);
                if dim < self.nvars_ambient {
                    return Err(Error::DegenerateSupport {
                        dim,
                        ambient: self.nvars_ambient,
                    });
                }
                if let Some(v) = &self.base_variances {
                    if v.len() != support.len() {
                        return Err(Error::DimensionMismatch {
                            expected: support.len(),
                            got: v.len(),
                        });
                    }
                    if v.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
                        return Err(Error::InvalidArgument(
                            "base variances must be positive".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// The retained monomials with their coefficient variances, in graded
    /// lexicographic order.
    pub fn variance_profile(&self) -> Result<Vec<(ExponentVector, f64)>> {
        self.validate()?;
        match self.kind {
            EnsembleKind::DenseKostlan => Ok(homogeneous_exponents(
                self.nvars_ambient,
                self.degree_or_dilation,
            )
            .into_iter()
            .map(|e| {
                let v = multinomial(&e);
                (e, v)
            })
            .collect()),
            EnsembleKind::SparseToric => {
                let support = self.support.clone().unwrap_or_default();
                let base = self
                    .base_variances
                    .clone()
                    .unwrap_or_else(|| vec![1.0; support.len()]);
                let (s, v) = dilated_variances(&support, &base, self.degree_or_dilation)?;
                Ok(s.into_iter().zip(v).collect())
            }
        }
    }
}

fn to_point(e: &ExponentVector) -> LatticePoint {
    e.entries().iter().map(|&a| i64::from(a)).collect()
}

/// All exponent vectors of total degree `d` in `nvars` variables, graded-lex
/// sorted.
pub fn homogeneous_exponents(nvars: usize, d: u32) -> Vec<ExponentVector> {
    fn rec(prefix: &mut Vec<u32>, left: u32, slots: usize, out: &mut Vec<ExponentVector>) {
        if slots == 1 {
            prefix.push(left);
            out.push(ExponentVector::new(prefix.clone()));
            prefix.pop();
            return;
        }
        for a in 0..=left {
            prefix.push(a);
            rec(prefix, left - a, slots - 1, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if nvars > 0 {
        rec(&mut Vec::with_capacity(nvars), d, nvars, &mut out);
    }
    out.sort();
    out
}

/// `d! / (a_0! ... a_m!)` for `d = sum a_i`.
pub fn multinomial(e: &ExponentVector) -> f64 {
    let mut acc = 1.0;
    let mut n = 0u32;
    for &a in e.entries() {
        for k in 1..=a {
            n += 1;
            acc *= f64::from(n) / f64::from(k);
        }
    }
    acc.round()
}

fn draw(field: Field, rng: &mut impl rand::Rng) -> Complex64 {
    match field {
        Field::Real => Complex64::new(standard_normal(rng), 0.0),
        Field::Complex => standard_complex_normal(rng),
    }
}

fn sample_profile(
    nvars: usize,
    field: Field,
    profile: Vec<(ExponentVector, f64)>,
    seed: &SeedContext,
) -> Result<MultiPoly> {
    let mut rng = seed.rng();
    let terms: Vec<(ExponentVector, Complex64)> = profile
        .into_iter()
        .map(|(e, v)| (e, draw(field, &mut rng) * v.sqrt()))
        .collect();
    MultiPoly::from_terms(nvars, field, terms)
}

/// Homogeneous complex Kostlan polynomial: `c_a = g_a sqrt(multinomial(a))`
/// with `g_a` standard complex Gaussians.
pub fn sample_dense_complex(spec: &EnsembleSpec, seed: &SeedContext) -> Result<MultiPoly> {
    if spec.kind != EnsembleKind::DenseKostlan || spec.field != Field::Complex {
        return Err(Error::InvalidArgument(
            "sample_dense_complex needs a complex dense Kostlan spec".into(),
        ));
    }
    sample_profile(spec.nvars_ambient, Field::Complex, spec.variance_profile()?, seed)
}

/// Real Kostlan polynomial: as the complex case with real standard Gaussians.
pub fn sample_dense_real(spec: &EnsembleSpec, seed: &SeedContext) -> Result<MultiPoly> {
    if spec.kind != EnsembleKind::DenseKostlan || spec.field != Field::Real {
        return Err(Error::InvalidArgument(
            "sample_dense_real needs a real dense Kostlan spec".into(),
        ));
    }
    sample_profile(spec.nvars_ambient, Field::Real, spec.variance_profile()?, seed)
}

/// Sparse toric polynomial `sum_m g_m sqrt(v_m) x^m` over the dilated support.
pub fn sample_sparse(spec: &EnsembleSpec, seed: &SeedContext) -> Result<MultiPoly> {
    if spec.kind != EnsembleKind::SparseToric {
        return Err(Error::InvalidArgument(
            "sample_sparse needs a sparse toric spec".into(),
        ));
    }
    sample_profile(spec.nvars_ambient, spec.field, spec.variance_profile()?, seed)
}

/// Dispatches on the spec's kind and field.
pub fn sample(spec: &EnsembleSpec, seed: &SeedContext) -> Result<MultiPoly> {
    match (spec.kind, spec.field) {
        (EnsembleKind::DenseKostlan, Field::Complex) => sample_dense_complex(spec, seed),
        (EnsembleKind::DenseKostlan, Field::Real) => sample_dense_real(spec, seed),
        (EnsembleKind::SparseToric, _) => sample_sparse(spec, seed),
    }
}

/// `d`-fold convolution of the weighted counting measure on `support`: the
/// variance at `m` sums `prod v[m_i]` over ordered tuples with `sum m_i = m`.
/// Returned in graded-lex order.
pub fn dilated_variances(
    support: &[ExponentVector],
    base_variances: &[f64],
    d: u32,
) -> Result<(Vec<ExponentVector>, Vec<f64>)> {
    if d == 0 {
        return Err(Error::InvalidArgument("dilation must be >= 1".into()));
    }
    if support.is_empty() {
        return Err(Error::EmptySupport);
    }
    if support.len() != base_variances.len() {
        return Err(Error::DimensionMismatch {
            expected: support.len(),
            got: base_variances.len(),
        });
    }
    let mut base: BTreeMap<ExponentVector, f64> = BTreeMap::new();
    for (e, &v) in support.iter().zip(base_variances) {
        *base.entry(e.clone()).or_default() += v;
    }
    let mut acc = base.clone();
    for _ in 1..d {
        let mut next: BTreeMap<ExponentVector, f64> = BTreeMap::new();
        for (a, va) in &acc {
            for (b, vb) in &base {
                *next.entry(a.add(b)).or_default() += va * vb;
            }
        }
        acc = next;
    }
    Ok(acc.into_iter().unzip())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(v: &[u32]) -> ExponentVector {
        ExponentVector::new(v.to_vec())
    }

    fn variance_of(spec: &EnsembleSpec, e: &[u32]) -> f64 {
        spec.variance_profile()
            .unwrap()
            .into_iter()
            .find(|(x, _)| x.entries() == e)
            .map(|(_, v)| v)
            .unwrap()
    }

    #[test]
    fn kostlan_variances_are_multinomial() {
        let s = EnsembleSpec::dense(3, 2, Field::Complex).unwrap();
        assert_eq!(variance_of(&s, &[1, 1, 0]), 2.0);
        let s = EnsembleSpec::dense(3, 3, Field::Complex).unwrap();
        assert_eq!(variance_of(&s, &[2, 1, 0]), 3.0);
        let s = EnsembleSpec::dense(4, 1, Field::Complex).unwrap();
        for (_, v) in s.variance_profile().unwrap() {
            assert_eq!(v, 1.0);
        }
        let s = EnsembleSpec::dense(2, 2, Field::Real).unwrap();
        let v: Vec<f64> = s.variance_profile().unwrap().into_iter().map(|(_, v)| v).collect();
        assert_eq!(v, vec![1.0, 2.0, 1.0]);
    }

    #[test]
    fn homogeneous_exponent_count() {
        // C(d + m, m) monomials
        assert_eq!(homogeneous_exponents(3, 2).len(), 6);
        assert_eq!(homogeneous_exponents(5, 3).len(), 35);
        assert!(homogeneous_exponents(3, 4).iter().all(|e| e.total_degree() == 4));
    }

    #[test]
    fn dilation_examples() {
        let (s, v) = dilated_variances(&[ev(&[0]), ev(&[1])], &[1.0, 1.0], 2).unwrap();
        assert_eq!(s, vec![ev(&[0]), ev(&[1]), ev(&[2])]);
        assert_eq!(v, vec![1.0, 2.0, 1.0]);

        let support = vec![ev(&[0, 0]), ev(&[1, 0]), ev(&[0, 1]), ev(&[1, 1])];
        let (s1, v1) = dilated_variances(&support, &[1.0, 2.0, 3.0, 4.0], 1).unwrap();
        let mut sorted = support.clone();
        sorted.sort();
        assert_eq!(s1, sorted);
        assert_eq!(v1, vec![1.0, 3.0, 2.0, 4.0]);

        let (s, v) = dilated_variances(&support, &[1.0; 4], 2).unwrap();
        let at = |e: &[u32]| v[s.iter().position(|x| x.entries() == e).unwrap()];
        assert_eq!(at(&[1, 1]), 4.0);
        assert_eq!(at(&[2, 2]), 1.0);
        assert_eq!(at(&[1, 0]), 2.0);
        assert_eq!(s.len(), 9);

        assert!(dilated_variances(&support, &[1.0; 4], 0).is_err());
    }

    #[test]
    fn simplex_dilation_reproduces_kostlan() {
        let simplex = vec![ev(&[0, 0]), ev(&[1, 0]), ev(&[0, 1])];
        for d in 1..=4 {
            let (s, v) = dilated_variances(&simplex, &[1.0; 3], d).unwrap();
            let dense = EnsembleSpec::dense(3, d, Field::Complex).unwrap();
            for (e, var) in s.iter().zip(&v) {
                let mut h = vec![d - e.total_degree()];
                h.extend_from_slice(e.entries());
                assert_eq!(*var, variance_of(&dense, &h), "d={d} e={e:?}");
            }
            assert_eq!(s.len(), dense.variance_profile().unwrap().len());
        }
    }

    #[test]
    fn spec_validation() {
        assert!(EnsembleSpec::dense(3, 0, Field::Complex).is_err());
        let line = vec![ev(&[0, 0]), ev(&[1, 1])];
        assert!(matches!(
            EnsembleSpec::sparse(line, None, 1, Field::Complex),
            Err(Error::DegenerateSupport { dim: 1, ambient: 2 })
        ));
        let sq = vec![ev(&[0, 0]), ev(&[1, 0]), ev(&[0, 1]), ev(&[1, 1])];
        assert!(EnsembleSpec::sparse(sq.clone(), Some(vec![1.0; 3]), 1, Field::Complex).is_err());
        assert!(EnsembleSpec::sparse(sq.clone(), Some(vec![1.0, 1.0, 0.0, 1.0]), 1, Field::Complex)
            .is_err());
        assert!(EnsembleSpec::sparse(sq, None, 1, Field::Complex).is_ok());
    }

    #[test]
    fn samplers_check_kind() {
        let dense = EnsembleSpec::dense(3, 2, Field::Complex).unwrap();
        let seed = SeedContext::new(1, 0, "t");
        assert!(sample_dense_real(&dense, &seed).is_err());
        assert!(sample_sparse(&dense, &seed).is_err());
        let p = sample_dense_complex(&dense, &seed).unwrap();
        assert!(p.is_homogeneous());
        assert_eq!(p.degree(), Some(2));
        assert_eq!(p.num_terms(), 6);
    }

    #[test]
    fn determinism_and_separation() {
        let spec = EnsembleSpec::dense(2, 3, Field::Real).unwrap();
        let a = sample_dense_real(&spec, &SeedContext::new(9, 1, "p")).unwrap();
        let b = sample_dense_real(&spec, &SeedContext::new(9, 1, "p")).unwrap();
        let c = sample_dense_real(&spec, &SeedContext::new(9, 2, "p")).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.field(), Field::Real);
    }
}
