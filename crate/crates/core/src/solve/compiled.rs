use num_complex::Complex64;

use crate::poly::MultiPoly;

/// A polynomial flattened for repeated evaluation with its gradient.
#[derive(Clone, Debug)]
pub(crate) struct CompiledPoly {
    nvars: usize,
    max_exp: usize,
    exps: Vec<u32>,
    coeffs: Vec<Complex64>,
}

impl CompiledPoly {
    pub(crate) fn new(p: &MultiPoly) -> Self {
        let nvars = p.nvars();
        let mut exps = Vec::with_capacity(nvars * p.num_terms());
        let mut coeffs = Vec::with_capacity(p.num_terms());
        for (e, c) in p.terms() {
            exps.extend_from_slice(e.entries());
            coeffs.push(*c);
        }
        let max_exp = exps.iter().copied().max().unwrap_or(0) as usize;
        Self {
            nvars,
            max_exp,
            exps,
            coeffs,
        }
    }

    /// Value at `x`; the gradient is written into `grad`.
    pub(crate) fn eval_grad(&self, x: &[Complex64], grad: &mut [Complex64]) -> Complex64 {
        let n = self.nvars;
        debug_assert_eq!(x.len(), n);
        let k = self.max_exp + 1;
        // powers[j * k + a] = x_j^a
        let mut powers = vec![Complex64::new(1.0, 0.0); n * k];
        for j in 0..n {
            for a in 1..k {
                powers[j * k + a] = powers[j * k + a - 1] * x[j];
            }
        }
        grad.iter_mut().for_each(|g| *g = Complex64::new(0.0, 0.0));
        let mut value = Complex64::new(0.0, 0.0);
        for (t, c) in self.coeffs.iter().enumerate() {
            let e = &self.exps[t * n..(t + 1) * n];
            let mut m = *c;
            for j in 0..n {
                m *= powers[j * k + e[j] as usize];
            }
            value += m;
            for j in 0..n {
                if e[j] == 0 {
                    continue;
                }
                let mut d = c * f64::from(e[j]) * powers[j * k + e[j] as usize - 1];
                for l in 0..n {
                    if l != j {
                        d *= powers[l * k + e[l] as usize];
                    }
                }
                grad[j] += d;
            }
        }
        value
    }

    pub(crate) fn eval(&self, x: &[Complex64]) -> Complex64 {
        let n = self.nvars;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(t, c)| {
                let e = &self.exps[t * n..(t + 1) * n];
                e.iter()
                    .zip(x)
                    .fold(*c, |acc, (&a, z)| acc * z.powu(a))
            })
            .sum()
    }

    pub(crate) fn coeff_l1(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Field;

    #[test]
    fn gradient_matches_formal_derivative() {
        let p = MultiPoly::from_terms(
            3,
            Field::Complex,
            [
                (vec![2, 1, 0], Complex64::new(1.0, 2.0)),
                (vec![0, 3, 1], Complex64::new(-0.5, 0.0)),
                (vec![0, 0, 0], Complex64::new(0.0, 1.0)),
            ],
        )
        .unwrap();
        let x = [
            Complex64::new(0.3, -1.1),
            Complex64::new(2.0, 0.5),
            Complex64::new(-0.7, 0.2),
        ];
        let cp = CompiledPoly::new(&p);
        let mut g = [Complex64::new(0.0, 0.0); 3];
        let v = cp.eval_grad(&x, &mut g);
        assert!((v - p.evaluate(&x).unwrap()).norm() < 1e-12);
        assert!((cp.eval(&x) - v).norm() < 1e-12);
        for (j, gj) in g.iter().enumerate() {
            let want = p.partial_derivative(j).unwrap().evaluate(&x).unwrap();
            assert!((gj - want).norm() < 1e-12);
        }
    }
}
