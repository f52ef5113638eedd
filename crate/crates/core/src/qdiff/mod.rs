//! Numerical engine for meromorphic quadratic differentials φ = (N/D)·dz⊗²
//! on the Riemann sphere: critical data, principal parts, horizontal
//! trajectories, strip decompositions, WKB triangulations, periods, and the
//! octagon contour identity.

pub mod octagon;
pub mod periods;
pub mod strips;
pub mod trace;

use crate::cpoly::CPoly;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A rational quadratic differential scale·(N/D)·dz⊗² on the sphere. The
/// scale factor carries family parameters such as e^{2iθ}R².
#[derive(Clone, Debug)]
pub struct RationalQD {
    pub numerator: CPoly,
    pub denominator: CPoly,
    pub scale: Complex64,
}

#[derive(Debug, Error, PartialEq)]
pub enum QdError {
    #[error("root finding failed: {0}")]
    Roots(#[from] crate::cpoly::PolyError),
    #[error("roots cluster within tolerance near {0}")]
    DegenerateRoots(Complex64),
    #[error("not a GMN differential: {0}")]
    NotGMN(&'static str),
    #[error("{0} is not a pole")]
    NotAPole(Complex64),
    #[error("branch tracking lost near a zero at {0}")]
    BranchTrackingLost(Complex64),
    #[error("a separatrix connects two finite critical points (saddle within tolerance)")]
    SaddleDetected,
    #[error("the differential has a simple pole; strip decompositions need a complete differential")]
    Incomplete,
    #[error("a separatrix did not resolve within the maximum flat length")]
    UnresolvedSeparatrix,
    #[error("the residue at a double pole is real; no signing half-plane exists")]
    RealResidue,
    #[error("period lies on the real axis; no upper-half-plane normalization exists")]
    RealPeriod,
    #[error("quadrature failed: {0}")]
    QuadratureFailure(&'static str),
    #[error("octagon construction hit another critical point")]
    OctagonCollision,
    #[error("octagon contour failed to close (error {0:.3e})")]
    OctagonNotClosed(f64),
    #[error("strip decomposition is inconsistent: {0}")]
    DecompositionInconsistent(String),
}

/// Location of a pole: a finite point or ∞.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum PolePoint {
    Finite(Complex64),
    Infinity,
}

/// One pole with its locally computed data.
#[derive(Clone, Debug)]
pub struct Pole {
    pub location: PolePoint,
    pub order: usize,
    /// Leading Laurent coefficient a₀ of φ in the local coordinate
    /// (z − p, or u = 1/z at ∞).
    pub leading: Complex64,
    /// Asymptotic horizontal directions as angles in the z-plane (order ≥ 3).
    pub directions: Vec<f64>,
    /// The two residues ±4πi√a₀ at order-2 poles.
    pub residues: Option<(Complex64, Complex64)>,
}

/// Zeros, poles, and the derived local data of a GMN differential.
#[derive(Clone, Debug)]
pub struct CriticalData {
    pub zeros: Vec<Complex64>,
    pub poles: Vec<Pole>,
}

impl CriticalData {
    /// Finite critical points: zeros and simple poles.
    pub fn finite_critical_points(&self) -> Vec<Complex64> {
        let mut pts = self.zeros.clone();
        for p in &self.poles {
            if p.order == 1 {
                if let PolePoint::Finite(z) = p.location {
                    pts.push(z);
                }
            }
        }
        pts
    }

    pub fn is_complete(&self) -> bool {
        self.poles.iter().all(|p| p.order >= 2)
    }

    /// Distance from z to the nearest zero.
    pub fn nearest_zero(&self, z: Complex64) -> f64 {
        self.zeros.iter().map(|&w| (z - w).norm()).fold(f64::INFINITY, f64::min)
    }

    /// Distance from z to the nearest finite critical point or finite pole.
    pub fn nearest_finite(&self, z: Complex64) -> f64 {
        let mut d = self.nearest_zero(z);
        for p in &self.poles {
            if let PolePoint::Finite(w) = p.location {
                d = d.min((z - w).norm());
            }
        }
        d
    }
}

/// A principal differential z^{−ε}(c_r z^{−r} + … + c₁ z^{−1}) dz with
/// ε ∈ {0, ½}, recorded by its coefficients c₁..c_r (ascending index).
#[derive(Clone, Debug)]
pub struct PrincipalPart {
    pub half_power: bool,
    /// `coefficients[j]` is c_{j+1}, the coefficient of z^{−ε} z^{−(j+1)} dz.
    pub coefficients: Vec<Complex64>,
}

impl PrincipalPart {
    /// The coefficient of z^{−1} dz; zero for half-integer expansions.
    pub fn analytic_residue(&self) -> Complex64 {
        if self.half_power {
            Complex64::new(0.0, 0.0)
        } else {
            self.coefficients.first().copied().unwrap_or(Complex64::new(0.0, 0.0))
        }
    }
}

impl RationalQD {
    pub fn new(numerator: CPoly, denominator: CPoly) -> Self {
        RationalQD { numerator, denominator, scale: Complex64::new(1.0, 0.0) }
    }

    /// Polynomial differential P(z)·dz⊗².
    pub fn polynomial(coeffs: Vec<Complex64>) -> Self {
        RationalQD::new(CPoly::new(coeffs), CPoly::constant(Complex64::new(1.0, 0.0)))
    }

    /// The standard two-zero example (z² − 1)·dz⊗².
    pub fn square_family() -> Self {
        RationalQD::polynomial(vec![
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ])
    }

    /// Same differential rescaled by `s` (e.g. e^{2iθ} or R²).
    pub fn scaled(&self, s: Complex64) -> Self {
        RationalQD {
            numerator: self.numerator.clone(),
            denominator: self.denominator.clone(),
            scale: self.scale * s,
        }
    }

    /// Rotated family member e^{2iθ}·φ.
    pub fn rotated(&self, theta: f64) -> Self {
        self.scaled(Complex64::from_polar(1.0, 2.0 * theta))
    }

    /// Value of φ at a non-pole point.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.scale * self.numerator.eval(z) / self.denominator.eval(z)
    }

    /// |φ(z)|.
    pub fn abs(&self, z: Complex64) -> f64 {
        self.eval(z).norm()
    }

    /// Pole order at ∞ in the u = 1/z chart: deg N − deg D + 4. Nonpositive
    /// values mean ∞ is not a pole.
    pub fn infinity_order(&self) -> isize {
        let dn = if self.numerator.is_zero() { 0 } else { self.numerator.degree() as isize };
        let dd = self.denominator.degree() as isize;
        dn - dd + 4
    }

    /// Zeros, poles, leading coefficients, asymptotic directions, residues.
    pub fn critical_data(&self, tol: f64) -> Result<CriticalData, QdError> {
        if self.numerator.is_zero() {
            return Err(QdError::NotGMN("the differential vanishes identically"));
        }
        let zeros = if self.numerator.degree() == 0 { vec![] } else { self.numerator.roots()? };
        // zeros must be simple
        for i in 0..zeros.len() {
            for j in i + 1..zeros.len() {
                if (zeros[i] - zeros[j]).norm() < 10.0 * tol {
                    return Err(QdError::NotGMN("zero of order > 1 detected"));
                }
            }
        }
        // cluster denominator roots into poles with multiplicity
        let droots =
            if self.denominator.degree() == 0 { vec![] } else { self.denominator.roots()? };
        let mut clusters: Vec<(Complex64, usize)> = Vec::new();
        'outer: for r in droots {
            for c in clusters.iter_mut() {
                if (c.0 - r).norm() < (10.0 * tol).max(1e-8) {
                    let n = c.1 as f64;
                    c.0 = (c.0 * n + r) / (n + 1.0);
                    c.1 += 1;
                    continue 'outer;
                }
            }
            clusters.push((r, 1));
        }
        // zeros must stay away from poles
        for &(p, _) in &clusters {
            for &z in &zeros {
                if (z - p).norm() < 10.0 * tol {
                    return Err(QdError::DegenerateRoots(p));
                }
            }
        }
        let mut poles = Vec::new();
        for (p, order) in clusters {
            let leading = self.leading_coefficient_at(p, order);
            poles.push(make_pole(PolePoint::Finite(p), order, leading));
        }
        let m_inf = self.infinity_order();
        if m_inf > 0 {
            let leading = self.scale * self.numerator.leading() / self.denominator.leading();
            poles.push(make_pole(PolePoint::Infinity, m_inf as usize, leading));
        }
        if poles.is_empty() {
            return Err(QdError::NotGMN("a GMN differential has at least one pole"));
        }
        let has_finite_crit = !zeros.is_empty() || poles.iter().any(|p| p.order == 1);
        if !has_finite_crit {
            return Err(QdError::NotGMN("a GMN differential has at least one finite critical point"));
        }
        Ok(CriticalData { zeros, poles })
    }

    /// Leading Laurent coefficient of φ at a finite pole p of the given order.
    fn leading_coefficient_at(&self, p: Complex64, order: usize) -> Complex64 {
        // deflate (z − p)^order out of the denominator
        let mut den = self.denominator.shifted(p).coeffs().to_vec();
        den.drain(..order.min(den.len() - 1));
        let dtilde_at_p = den.first().copied().unwrap_or(Complex64::new(1.0, 0.0));
        self.scale * self.numerator.eval(p) / dtilde_at_p
    }

    /// Taylor coefficients of the unit part g where φ = t^{−order}·g(t) in the
    /// local coordinate t at the pole (t = z − p, or t = u = 1/z at ∞).
    fn unit_part_series(&self, pole: &Pole, nterms: usize) -> Vec<Complex64> {
        match pole.location {
            PolePoint::Finite(p) => {
                let num = self.numerator.shifted(p);
                let mut den = self.denominator.shifted(p).coeffs().to_vec();
                den.drain(..pole.order.min(den.len() - 1));
                series_div(num.coeffs(), &den, nterms)
                    .into_iter()
                    .map(|c| c * self.scale)
                    .collect()
            }
            PolePoint::Infinity => {
                // in the u chart φ = u^{−m}·(N_rev/D_rev), m = deg N − deg D + 4
                debug_assert!(self.infinity_order() > 0);
                let nrev = self.numerator.reversed();
                let drev = self.denominator.reversed();
                series_div(nrev.coeffs(), drev.coeffs(), nterms)
                    .into_iter()
                    .map(|c| c * self.scale)
                    .collect()
            }
        }
    }

    /// The principal part of √φ at a pole: the degree ≤ −1 terms of the
    /// expansion in the local coordinate, up to the global sign.
    pub fn principal_part(&self, pole: &Pole) -> Result<PrincipalPart, QdError> {
        let m = pole.order;
        if m == 0 {
            return Err(QdError::NotAPole(match pole.location {
                PolePoint::Finite(p) => p,
                PolePoint::Infinity => Complex64::new(f64::INFINITY, 0.0),
            }));
        }
        let half_power = m % 2 == 1;
        let r = if half_power { (m - 1) / 2 } else { m / 2 };
        if r == 0 {
            // simple pole: no integer-degree principal terms
            return Ok(PrincipalPart { half_power, coefficients: vec![] });
        }
        let g = self.unit_part_series(pole, r);
        let s = series_sqrt(&g, r);
        // √φ = t^{−ε}·Σ_k s_k t^{k−r}; the coefficient of t^{−ε}t^{−j} is s_{r−j}
        let coefficients: Vec<Complex64> = (1..=r).map(|j| s[r - j]).collect();
        Ok(PrincipalPart { half_power, coefficients })
    }
}

fn make_pole(location: PolePoint, order: usize, leading: Complex64) -> Pole {
    let directions = if order >= 3 {
        let m = order as f64;
        let base = leading.arg();
        (0..order - 2)
            .map(|k| {
                let local = (base + 2.0 * std::f64::consts::PI * k as f64) / (m - 2.0);
                // at ∞ the local chart is u = 1/z, so z-plane angles negate
                let z_angle = match location {
                    PolePoint::Finite(_) => local,
                    PolePoint::Infinity => -local,
                };
                z_angle.rem_euclid(2.0 * std::f64::consts::PI)
            })
            .collect()
    } else {
        Vec::new()
    };
    let residues = if order == 2 {
        let r = 4.0 * std::f64::consts::PI * Complex64::new(0.0, 1.0) * leading.sqrt();
        Some((r, -r))
    } else {
        None
    };
    Pole { location, order, leading, directions, residues }
}

/// Truncated power-series division a/b to `n + 1` coefficients (b(0) ≠ 0).
fn series_div(a: &[Complex64], b: &[Complex64], n: usize) -> Vec<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    let b0 = b[0];
    let mut q = vec![zero; n + 1];
    for k in 0..=n {
        let mut acc = a.get(k).copied().unwrap_or(zero);
        for i in 1..=k {
            let bi = b.get(i).copied().unwrap_or(zero);
            acc -= bi * q[k - i];
        }
        q[k] = acc / b0;
    }
    q
}

/// Truncated power-series square root of g (g(0) ≠ 0), principal branch,
/// to `n + 1` coefficients.
fn series_sqrt(g: &[Complex64], n: usize) -> Vec<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    let s0 = g[0].sqrt();
    let mut s = vec![zero; n + 1];
    s[0] = s0;
    for k in 1..=n {
        let mut acc = g.get(k).copied().unwrap_or(zero);
        for i in 1..k {
            acc -= s[i] * s[k - i];
        }
        s[k] = acc / (2.0 * s0);
    }
    s
}
