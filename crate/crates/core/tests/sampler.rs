mod common;

use amoebalab::poly::{ExponentVector, Field};
use amoebalab::rng::SeedContext;
use amoebalab::sampler::{
    dilated_variances, multinomial, sample, sample_dense_complex, sample_dense_real, EnsembleSpec,
};
use amoebalab::Error;

const N: usize = 100_000;

/// Empirical `E|c|^2` of every retained coefficient against its variance,
/// within `4 sqrt(2/N) v`.
fn check_calibration(spec: &EnsembleSpec, label: &str) {
    let profile = spec.variance_profile().unwrap();
    let mut second = vec![0.0; profile.len()];
    for t in 0..N {
        let f = sample(spec, &SeedContext::new(7, t as u64, label)).unwrap();
        for (k, (e, _)) in profile.iter().enumerate() {
            second[k] += f.coeff(e.entries()).norm_sqr();
        }
    }
    let band = 4.0 * (2.0 / N as f64).sqrt();
    for (k, (e, v)) in profile.iter().enumerate() {
        let m = second[k] / N as f64;
        assert!((m - v).abs() <= band * v, "{label} {e:?}: {m} vs {v}");
    }
}

#[test]
fn dense_complex_calibration() {
    check_calibration(&EnsembleSpec::dense(3, 3, Field::Complex).unwrap(), "cal-complex");
}

#[test]
fn dense_real_calibration() {
    check_calibration(&EnsembleSpec::dense(2, 4, Field::Real).unwrap(), "cal-real");
}

#[test]
fn dilated_toric_calibration() {
    let square = ["0 0", "1 0", "0 1", "1 1"]
        .iter()
        .map(|s| ExponentVector::new(s.split(' ').map(|a| a.parse().unwrap()).collect()))
        .collect();
    let spec = EnsembleSpec::sparse(square, Some(vec![1.0, 0.5, 2.0, 1.5]), 2, Field::Complex)
        .unwrap();
    check_calibration(&spec, "cal-toric");
}

/// Real and imaginary coefficient arrays of complex draws are uncorrelated.
#[test]
fn real_and_imaginary_parts_are_uncorrelated() {
    let spec = EnsembleSpec::dense(3, 2, Field::Complex).unwrap();
    let profile = spec.variance_profile().unwrap();
    let k = profile.len();
    let mut re = vec![Vec::with_capacity(N); k];
    let mut im = vec![Vec::with_capacity(N); k];
    for t in 0..N {
        let f = sample_dense_complex(&spec, &SeedContext::new(8, t as u64, "reim")).unwrap();
        for (j, (e, _)) in profile.iter().enumerate() {
            let v = f.coeff(e.entries());
            re[j].push(v.re);
            im[j].push(v.im);
        }
    }
    let corr = |a: &[f64], b: &[f64]| {
        let n = a.len() as f64;
        let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
        let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / n;
        let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum::<f64>() / n;
        let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum::<f64>() / n;
        cov / (va * vb).sqrt()
    };
    let limit = 4.0 / (N as f64).sqrt();
    for (i, a) in re.iter().enumerate() {
        for (j, b) in im.iter().enumerate() {
            let r = corr(a, b);
            assert!(r.abs() < limit, "corr(Re c{i}, Im c{j}) = {r}");
        }
    }
}

#[test]
fn real_draws_are_centered() {
    let spec = EnsembleSpec::dense(2, 2, Field::Real).unwrap();
    let mut sum = [0.0; 3];
    for t in 0..N {
        let f = sample_dense_real(&spec, &SeedContext::new(9, t as u64, "center")).unwrap();
        for (k, e) in [[2, 0], [1, 1], [0, 2]].iter().enumerate() {
            sum[k] += f.coeff(e).re;
        }
    }
    for (k, v) in [1.0f64, 2.0, 1.0].iter().enumerate() {
        let se = (v / N as f64).sqrt();
        assert!((sum[k] / N as f64).abs() <= 4.0 * se);
    }
}

#[test]
fn identical_seeds_give_identical_draws() {
    let spec = EnsembleSpec::dense(4, 3, Field::Complex).unwrap();
    let s = SeedContext::new(123, 45, "det");
    assert_eq!(sample(&spec, &s).unwrap(), sample(&spec, &s).unwrap());
    let other = SeedContext::new(123, 46, "det");
    assert_ne!(sample(&spec, &s).unwrap(), sample(&spec, &other).unwrap());
}

#[test]
fn kostlan_variances_are_multinomial() {
    let spec = EnsembleSpec::dense(3, 2, Field::Complex).unwrap();
    let v: Vec<_> = spec.variance_profile().unwrap();
    let at = |e: [u32; 3]| v.iter().find(|(x, _)| x.entries() == e).unwrap().1;
    assert_eq!(at([1, 1, 0]), 2.0);
    let spec3 = EnsembleSpec::dense(3, 3, Field::Complex).unwrap();
    assert_eq!(multinomial(&ExponentVector::new(vec![2, 1, 0])), 3.0);
    assert_eq!(spec3.variance_profile().unwrap().len(), 10);
}

#[test]
fn convolution_fixtures() {
    let seg = vec![ExponentVector::new(vec![0]), ExponentVector::new(vec![1])];
    let (s, v) = dilated_variances(&seg, &[1.0, 1.0], 2).unwrap();
    assert_eq!(s.len(), 3);
    let mut pairs: Vec<(u32, f64)> = s.iter().map(|e| e.entries()[0]).zip(v).collect();
    pairs.sort_by_key(|p| p.0);
    assert_eq!(pairs, vec![(0, 1.0), (1, 2.0), (2, 1.0)]);
    assert!(matches!(dilated_variances(&seg, &[1.0, 1.0], 0), Err(Error::InvalidArgument(_))));
}

#[test]
fn lower_dimensional_support_is_rejected() {
    let diag = vec![ExponentVector::new(vec![0, 0]), ExponentVector::new(vec![1, 1])];
    assert!(matches!(
        EnsembleSpec::sparse(diag, None, 1, Field::Complex),
        Err(Error::DegenerateSupport { .. })
    ));
}
