//! Dense complex polynomials and simultaneous root finding.
//!
//! Coefficients are stored in ascending powers. Roots are found with the
//! Aberth–Ehrlich iteration started from a perturbed circle, then polished by
//! Newton steps on the original polynomial.

use num_complex::Complex64;
use thiserror::Error;

/// A polynomial with complex coefficients, ascending powers.
#[derive(Clone, Debug, PartialEq)]
pub struct CPoly {
    coeffs: Vec<Complex64>,
}

#[derive(Debug, Error, PartialEq)]
pub enum PolyError {
    #[error("the zero polynomial has no roots")]
    ZeroPolynomial,
    #[error("root iteration failed to converge")]
    RootsDiverged,
}

impl CPoly {
    /// Builds a polynomial from ascending coefficients, trimming high-order zeros.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && coeffs.last().map_or(false, |c| c.norm() == 0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        CPoly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        CPoly::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn constant(c: Complex64) -> Self {
        CPoly::new(vec![c])
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() == 0.0)
    }

    pub fn leading(&self) -> Complex64 {
        *self.coeffs.last().unwrap()
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn derivative(&self) -> CPoly {
        if self.coeffs.len() == 1 {
            return CPoly::constant(Complex64::new(0.0, 0.0));
        }
        let d: Vec<Complex64> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * k as f64)
            .collect();
        CPoly::new(d)
    }

    pub fn scale(&self, s: Complex64) -> CPoly {
        CPoly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn mul(&self, other: &CPoly) -> CPoly {
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        CPoly::new(out)
    }

    /// Coefficients in the u = 1/z chart: p(1/u) * u^deg, ascending in u.
    pub fn reversed(&self) -> CPoly {
        let mut c = self.coeffs.clone();
        c.reverse();
        CPoly::new(c)
    }

    /// Taylor shift: returns q with q(t) = p(t + z0).
    pub fn shifted(&self, z0: Complex64) -> CPoly {
        // Synthetic division by (z - z0), repeated.
        let n = self.coeffs.len();
        let mut work = self.coeffs.clone();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for slot in out.iter_mut() {
            // divide work by (z - z0): remainder is the next Taylor coefficient
            let mut rem = Complex64::new(0.0, 0.0);
            for c in work.iter_mut().rev() {
                let t = *c + rem * z0;
                rem = t;
                *c = t;
            }
            // after the loop `work[0]` holds the remainder; shift down
            *slot = work[0];
            work.remove(0);
            if work.is_empty() {
                break;
            }
        }
        CPoly::new(out)
    }

    /// All complex roots with multiplicity, via Aberth–Ehrlich + Newton polish.
    pub fn roots(&self) -> Result<Vec<Complex64>, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let mut coeffs = self.coeffs.clone();
        // strip roots at the origin
        let mut zero_roots = 0usize;
        while coeffs.len() > 1 && coeffs[0].norm() == 0.0 {
            coeffs.remove(0);
            zero_roots += 1;
        }
        let n = coeffs.len() - 1;
        let mut roots = vec![Complex64::new(0.0, 0.0); zero_roots];
        if n == 0 {
            return Ok(roots);
        }
        let p = CPoly::new(coeffs);
        let dp = p.derivative();

        // Cauchy-style radius for the initial circle.
        let lead = p.leading().norm();
        let radius = 1.0
            + p.coeffs
                .iter()
                .take(n)
                .map(|c| (c.norm() / lead).powf(1.0 / n as f64))
                .fold(0.0f64, f64::max);
        let mut xs: Vec<Complex64> = (0..n)
            .map(|k| {
                let ang = 2.0 * std::f64::consts::PI * (k as f64 + 0.35) / n as f64 + 0.42;
                Complex64::from_polar(radius * (0.8 + 0.1 * (k % 3) as f64), ang)
            })
            .collect();

        let mut converged = false;
        for _ in 0..600 {
            let mut max_step = 0.0f64;
            for i in 0..n {
                let pz = p.eval(xs[i]);
                let dpz = dp.eval(xs[i]);
                if pz.norm() == 0.0 {
                    continue;
                }
                let newton = if dpz.norm() > 0.0 { pz / dpz } else { pz };
                let mut sum = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    if j != i {
                        let d = xs[i] - xs[j];
                        if d.norm() > 1e-300 {
                            sum += Complex64::new(1.0, 0.0) / d;
                        }
                    }
                }
                let denom = Complex64::new(1.0, 0.0) - newton * sum;
                let step = if denom.norm() > 1e-300 { newton / denom } else { newton };
                xs[i] -= step;
                max_step = max_step.max(step.norm() / (1.0 + xs[i].norm()));
            }
            if max_step < 1e-14 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(PolyError::RootsDiverged);
        }
        // Newton polish on the original polynomial.
        for x in xs.iter_mut() {
            for _ in 0..4 {
                let pz = p.eval(*x);
                let dpz = dp.eval(*x);
                if dpz.norm() > 0.0 {
                    *x -= pz / dpz;
                }
            }
        }
        roots.extend(xs);
        Ok(roots)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eval_and_derivative() {
        // p = 1 + 2z + 3z^2
        let p = CPoly::from_real(&[1.0, 2.0, 3.0]);
        assert_eq!(p.eval(c(2.0, 0.0)), c(17.0, 0.0));
        let dp = p.derivative();
        assert_eq!(dp.coeffs(), &[c(2.0, 0.0), c(6.0, 0.0)]);
    }

    #[test]
    fn roots_of_quadratic() {
        // z^2 - 1
        let p = CPoly::from_real(&[-1.0, 0.0, 1.0]);
        let mut roots = p.roots().unwrap();
        roots.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((roots[0] - c(-1.0, 0.0)).norm() < 1e-12);
        assert!((roots[1] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn roots_match_constructed_factors() {
        // (z - (1+2i)) (z - 3) (z + 0.5i) expanded via mul
        let f1 = CPoly::new(vec![-c(1.0, 2.0), c(1.0, 0.0)]);
        let f2 = CPoly::new(vec![-c(3.0, 0.0), c(1.0, 0.0)]);
        let f3 = CPoly::new(vec![c(0.0, 0.5), c(1.0, 0.0)]);
        let p = f1.mul(&f2).mul(&f3);
        let roots = p.roots().unwrap();
        for target in [c(1.0, 2.0), c(3.0, 0.0), c(0.0, -0.5)] {
            assert!(
                roots.iter().any(|r| (r - target).norm() < 1e-10),
                "missing root {target}"
            );
        }
    }

    #[test]
    fn roots_with_origin_multiplicity() {
        // z^3 (z - 2)
        let p = CPoly::new(vec![
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(-2.0, 0.0),
            c(1.0, 0.0),
        ]);
        let roots = p.roots().unwrap();
        assert_eq!(roots.iter().filter(|r| r.norm() < 1e-12).count(), 3);
        assert!(roots.iter().any(|r| (r - c(2.0, 0.0)).norm() < 1e-12));
    }

    #[test]
    fn shifted_recenters() {
        // p(z) = z^2, q(t) = p(t + 1) = 1 + 2t + t^2
        let p = CPoly::from_real(&[0.0, 0.0, 1.0]);
        let q = p.shifted(c(1.0, 0.0));
        assert!((q.eval(c(0.0, 0.0)) - c(1.0, 0.0)).norm() < 1e-14);
        assert!((q.eval(c(0.5, 0.0)) - p.eval(c(1.5, 0.0))).norm() < 1e-14);
    }

    #[test]
    fn reversed_is_infinity_chart() {
        // p = 2 + 3z^2; p(1/u) u^2 = 2u^2 + 3
        let p = CPoly::from_real(&[2.0, 0.0, 3.0]);
        let r = p.reversed();
        assert_eq!(r.coeffs(), &[c(3.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]);
    }
}
