use num_complex::Complex64;

/// Solves `a x = b` in place (`a` row-major `n x n`, overwritten) by LU with
/// partial pivoting. Returns `false` if a pivot vanishes.
pub(crate) fn solve_in_place(a: &mut [Complex64], b: &mut [Complex64], n: usize) -> bool {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    for k in 0..n {
        let (p, pmax) = (k..n)
            .map(|r| (r, a[r * n + k].norm()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pmax == 0.0 || !pmax.is_finite() {
            return false;
        }
        if p != k {
            for c in 0..n {
                a.swap(k * n + c, p * n + c);
            }
            b.swap(k, p);
        }
        let piv = a[k * n + k];
        for r in k + 1..n {
            let f = a[r * n + k] / piv;
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for c in k + 1..n {
                let t = a[k * n + c];
                a[r * n + c] -= f * t;
            }
            let t = b[k];
            b[r] -= f * t;
        }
    }
    for k in (0..n).rev() {
        let mut acc = b[k];
        for c in k + 1..n {
            acc -= a[k * n + c] * b[c];
        }
        b[k] = acc / a[k * n + k];
    }
    b.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub(crate) fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
