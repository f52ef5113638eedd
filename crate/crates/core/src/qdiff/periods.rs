//! Periods of standard saddle classes: Z(γ) = 2∫√φ along the saddle,
//! normalized to the upper half plane.
//!
//! The segment quadrature removes the square-root endpoint singularities at
//! the two zeros with a cosine substitution and continues the branch of √φ
//! chunk by chunk along the path.

use super::{QdError, RationalQD};
use num_complex::Complex64;

/// 16-point Gauss–Legendre nodes and weights on [-1, 1].
const GL_NODES: [f64; 16] = [
    -0.9894009349916499,
    -0.9445750230732326,
    -0.8656312023878318,
    -0.7554044083550030,
    -0.6178762444026438,
    -0.4580167776572274,
    -0.2816035507792589,
    -0.0950125098376374,
    0.0950125098376374,
    0.2816035507792589,
    0.4580167776572274,
    0.6178762444026438,
    0.7554044083550030,
    0.8656312023878318,
    0.9445750230732326,
    0.9894009349916499,
];
const GL_WEIGHTS: [f64; 16] = [
    0.0271524594117541,
    0.0622535239386479,
    0.0951585116824928,
    0.1246289712555339,
    0.1495959888165767,
    0.1691565193950025,
    0.1826034150449236,
    0.1894506104550685,
    0.1894506104550685,
    0.1826034150449236,
    0.1691565193950025,
    0.1495959888165767,
    0.1246289712555339,
    0.0951585116824928,
    0.0622535239386479,
    0.0271524594117541,
];

/// ∫√φ dz along the straight segment from `a` to `b`, both simple zeros of φ.
///
/// Substitutes s = (1 − cos πτ)/2 so the √-singularities at the endpoints
/// vanish, then applies composite Gauss–Legendre in τ with branch tracking.
/// The branch is fixed by `reference`: the value of √φ at the midpoint is
/// aligned with it (pass the desired approximate direction).
pub fn saddle_segment_integral(
    phi: &RationalQD,
    a: Complex64,
    b: Complex64,
    reference: Complex64,
    chunks: usize,
) -> Result<Complex64, QdError> {
    if (b - a).norm() < 1e-14 {
        return Err(QdError::QuadratureFailure("segment endpoints coincide"));
    }
    let dz = b - a;
    let z_of = |tau: f64| {
        let s = 0.5 * (1.0 - (std::f64::consts::PI * tau).cos());
        a + dz * s
    };
    let jac = |tau: f64| {
        let ds = 0.5 * std::f64::consts::PI * (std::f64::consts::PI * tau).sin();
        dz * ds
    };
    // fix the branch at the midpoint and continue outward in both directions
    let mid = z_of(0.5);
    let mut ref_val = phi.eval(mid).sqrt();
    if (ref_val - reference).norm() > (ref_val + reference).norm() {
        ref_val = -ref_val;
    }
    // walk τ from 0.5 to 1 and from 0.5 to 0 with a persistent reference
    let mut total = Complex64::new(0.0, 0.0);
    for half in 0..2 {
        let mut branch = ref_val;
        for c in 0..chunks {
            let (t0, t1) = if half == 0 {
                (0.5 + 0.5 * c as f64 / chunks as f64, 0.5 + 0.5 * (c + 1) as f64 / chunks as f64)
            } else {
                (0.5 - 0.5 * c as f64 / chunks as f64, 0.5 - 0.5 * (c + 1) as f64 / chunks as f64)
            };
            let hm = 0.5 * (t1 - t0);
            let cm = 0.5 * (t1 + t0);
            let mut acc = Complex64::new(0.0, 0.0);
            for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
                let tau = cm + hm * x;
                let z = z_of(tau);
                let mut s = phi.eval(z).sqrt();
                if (s - branch).norm() > (s + branch).norm() {
                    s = -s;
                }
                acc += s * jac(tau) * *w;
            }
            // the outward walk on the left half runs against the τ direction
            total += acc * hm * if half == 0 { 1.0 } else { -1.0 };
            // update the running branch reference at the chunk's far end
            let zf = z_of(t1);
            let mut s = phi.eval(zf).sqrt();
            if (s - branch).norm() > (s + branch).norm() {
                s = -s;
            }
            branch = s;
        }
    }
    if !total.re.is_finite() || !total.im.is_finite() {
        return Err(QdError::QuadratureFailure("non-finite integral"));
    }
    Ok(total)
}

/// ∫√φ dz along a polyline, branch-continued from `branch0` at the first
/// point. Composite Gauss–Legendre per segment. Returns the integral and the
/// branch value at the end.
pub fn polyline_integral(
    phi: &RationalQD,
    points: &[Complex64],
    branch0: Complex64,
) -> (Complex64, Complex64) {
    let mut total = Complex64::new(0.0, 0.0);
    let mut branch = branch0;
    for pair in points.windows(2) {
        let (z0, z1) = (pair[0], pair[1]);
        let dz = z1 - z0;
        if dz.norm() == 0.0 {
            continue;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
            let z = z0 + dz * (0.5 + 0.5 * x);
            let mut s = phi.eval(z).sqrt();
            if (s - branch).norm() > (s + branch).norm() {
                s = -s;
            }
            acc += s * *w;
        }
        total += acc * dz * 0.5;
        let mut s = phi.eval(z1).sqrt();
        if (s - branch).norm() > (s + branch).norm() {
            s = -s;
        }
        branch = s;
    }
    (total, branch)
}

/// Normalize a period representative to the upper half plane.
pub fn normalize_period(z: Complex64) -> Result<Complex64, QdError> {
    let tol = 1e-10 * (1.0 + z.norm());
    if z.im.abs() < tol {
        return Err(QdError::RealPeriod);
    }
    Ok(if z.im > 0.0 { z } else { -z })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Composite-Simpson oracle for ∫√φ over a segment, with the same cosine
    /// substitution but an entirely separate integration rule.
    fn simpson_oracle(phi: &RationalQD, a: Complex64, b: Complex64, n: usize) -> Complex64 {
        assert!(n % 2 == 0);
        let dz = b - a;
        let z_of = |tau: f64| a + dz * 0.5 * (1.0 - (std::f64::consts::PI * tau).cos());
        let jac = |tau: f64| dz * 0.5 * std::f64::consts::PI * (std::f64::consts::PI * tau).sin();
        // continue the branch from the left endpoint outward
        let h = 1.0 / n as f64;
        let mut branch = phi.eval(z_of(h)).sqrt();
        // choose the branch with positive imaginary part on [−1,1] for z²−1
        if branch.im < 0.0 {
            branch = -branch;
        }
        let mut vals = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let tau = k as f64 * h;
            let z = z_of(tau);
            let mut s = phi.eval(z).sqrt();
            if (s - branch).norm() > (s + branch).norm() {
                s = -s;
            }
            branch = s;
            vals.push(s * jac(tau));
        }
        let mut acc = vals[0] + vals[n];
        for (k, v) in vals.iter().enumerate().take(n).skip(1) {
            acc += *v * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        acc * (h / 3.0)
    }

    #[test]
    fn saddle_integral_of_square_family_is_half_i_pi() {
        // ∫_{−1}^{1} √(z²−1) dz = iπ/2 on the upper branch
        let phi = RationalQD::square_family();
        let val = saddle_segment_integral(&phi, c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 1.0), 8).unwrap();
        let expected = c(0.0, std::f64::consts::FRAC_PI_2);
        assert!(
            (val - expected).norm() < 1e-10 * expected.norm(),
            "got {val}, expected {expected}"
        );
        // the full period is 2ζ = iπ
        let z = normalize_period(2.0 * val).unwrap();
        assert!((z - c(0.0, std::f64::consts::PI)).norm() < 1e-9);
    }

    #[test]
    fn quadrature_agrees_with_simpson_oracle() {
        // several rotated members of the family, 1e−8 relative agreement
        let base = RationalQD::square_family();
        for &theta in &[-0.3, 0.17, 0.45, -0.88] {
            let phi = base.rotated(theta);
            let gl = saddle_segment_integral(&phi, c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 1.0), 10).unwrap();
            let mut simp = simpson_oracle(&phi, c(-1.0, 0.0), c(1.0, 0.0), 4000);
            // the oracle's branch is only fixed up to sign
            if (simp - gl).norm() > (simp + gl).norm() {
                simp = -simp;
            }
            assert!(
                (gl - simp).norm() < 1e-8 * gl.norm(),
                "theta={theta}: gl={gl} simpson={simp}"
            );
        }
    }

    #[test]
    fn rotation_equivariance_of_periods() {
        // Z(e^{2iθ}φ) = e^{iθ}Z(φ) while the branch is tracked consistently
        let base = RationalQD::square_family();
        let z0 = saddle_segment_integral(&base, c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 1.0), 10).unwrap();
        for &theta in &[-0.3, 0.12, 0.31] {
            let phi = base.rotated(theta);
            let rot = Complex64::from_polar(1.0, theta);
            let zt = saddle_segment_integral(&phi, c(-1.0, 0.0), c(1.0, 0.0), rot * c(0.0, 1.0), 10)
                .unwrap();
            assert!((zt - rot * z0).norm() < 1e-9, "theta={theta}");
        }
    }

    #[test]
    fn real_period_is_refused() {
        assert!(matches!(normalize_period(c(1.0, 0.0)), Err(QdError::RealPeriod)));
        let z = normalize_period(c(0.5, -2.0)).unwrap();
        assert!(z.im > 0.0);
    }
}
