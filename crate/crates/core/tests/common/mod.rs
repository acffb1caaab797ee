#![allow(dead_code)]

use amoebalab::poly::{Field, MultiPoly};
use amoebalab::rng::SeedContext;
use amoebalab::sampler::{sample, EnsembleSpec};
use amoebalab::Complex64;
use proptest::prelude::*;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn complex() -> impl Strategy<Value = Complex64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| c(re, im))
}

/// Nonzero complex polynomials in `nvars` variables, exponents at most 3.
pub fn complex_poly(nvars: usize) -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec((prop::collection::vec(0u32..4, nvars), complex()), 1..7)
        .prop_map(move |terms| MultiPoly::from_terms(nvars, Field::Complex, terms).unwrap())
        .prop_filter("nonzero", |p| !p.is_zero())
}

/// Affine dense Kostlan polynomial of degree `d` in `nvars` variables.
pub fn kostlan(nvars: usize, d: u32, field: Field, seed: &SeedContext) -> MultiPoly {
    let spec = EnsembleSpec::dense(nvars + 1, d, field).unwrap();
    sample(&spec, seed).unwrap().dehomogenize(0).unwrap()
}

pub fn max_rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}
