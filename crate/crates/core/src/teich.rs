//! Cross ratios, cluster (Fock–Goncharov) coordinates, the flip
//! transformation law, chart gluing for seeds, and the asymptotic diagnostic.
//!
//! Chart points are plain positive coordinate vectors; which chart they live
//! on (a triangulation or a seed) is carried by the caller. The two mutation
//! laws implemented here agree under `Seed::from_exchange_matrix`, which pairs
//! a triangulation chart with its seed chart.

use crate::quiver::{mutate_seed, QuiverError, Seed};
use crate::surface::{FlipError, IdealTriangulation};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TeichError {
    #[error("boundary points must be pairwise distinct")]
    CoincidentPoints,
    #[error("at most one boundary point may be infinite")]
    TwoInfinities,
    #[error("inputs must be strictly positive")]
    NonPositiveInput,
    #[error("coordinate vector has length {found}, chart has {expected}")]
    SizeMismatch { found: usize, expected: usize },
    #[error("pole order {0} needs a principal differential")]
    InvalidOrder(usize),
    #[error("result overflows the floating-point range")]
    Overflow,
    #[error(transparent)]
    Flip(#[from] FlipError),
    #[error(transparent)]
    Seed(#[from] QuiverError),
}

/// A point of the circle boundary: a real number or ∞.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryPoint {
    Finite(f64),
    Infinity,
}

/// Four boundary points in cyclic order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryQuadruple(pub [BoundaryPoint; 4]);

impl BoundaryQuadruple {
    pub fn finite(z1: f64, z2: f64, z3: f64, z4: f64) -> Self {
        BoundaryQuadruple([
            BoundaryPoint::Finite(z1),
            BoundaryPoint::Finite(z2),
            BoundaryPoint::Finite(z3),
            BoundaryPoint::Finite(z4),
        ])
    }
}

/// The cross ratio (z1−z2)(z3−z4) / ((z2−z3)(z1−z4)). When one point is ∞ the
/// two factors containing it are dropped.
pub fn cross_ratio(q: &BoundaryQuadruple) -> Result<f64, TeichError> {
    use BoundaryPoint::*;
    let pts = q.0;
    let infinities = pts.iter().filter(|p| matches!(p, Infinity)).count();
    if infinities > 1 {
        return Err(TeichError::TwoInfinities);
    }
    for i in 0..4 {
        for j in i + 1..4 {
            if pts[i] == pts[j] {
                return Err(TeichError::CoincidentPoints);
            }
        }
    }
    // factor (z_i − z_j), or None when it contains the infinite point
    let diff = |i: usize, j: usize| -> Option<f64> {
        match (pts[i], pts[j]) {
            (Finite(a), Finite(b)) => Some(a - b),
            _ => None,
        }
    };
    let mut num = 1.0;
    let mut den = 1.0;
    if let Some(d) = diff(0, 1) {
        num *= d;
    }
    if let Some(d) = diff(2, 3) {
        num *= d;
    }
    if let Some(d) = diff(1, 2) {
        den *= d;
    }
    if let Some(d) = diff(0, 3) {
        den *= d;
    }
    if den == 0.0 {
        return Err(TeichError::CoincidentPoints);
    }
    Ok(num / den)
}

/// The cross ratio expressed in lambda lengths: λ12·λ34 / (λ23·λ14). Invariant
/// under rescaling the horocycle at any vertex.
pub fn lambda_cross_ratio(l12: f64, l23: f64, l34: f64, l14: f64) -> Result<f64, TeichError> {
    if l12 <= 0.0 || l23 <= 0.0 || l34 <= 0.0 || l14 <= 0.0 {
        return Err(TeichError::NonPositiveInput);
    }
    Ok(l12 * l34 / (l23 * l14))
}

/// Cluster coordinates from raw cross ratios: X_α = Y_α unless α is the
/// internal edge of a self-folded triangle, in which case X_α = Y_α·Y_β with β
/// the encircling edge.
pub fn cluster_from_y(t: &IdealTriangulation, y: &[f64]) -> Result<Vec<f64>, TeichError> {
    if y.len() != t.n_arcs {
        return Err(TeichError::SizeMismatch { found: y.len(), expected: t.n_arcs });
    }
    let pi = t.resolve_self_folded();
    let mut x = y.to_vec();
    for (alpha, &beta) in pi.iter().enumerate() {
        if beta != alpha {
            x[alpha] = y[alpha] * y[beta];
        }
    }
    Ok(x)
}

/// Coordinate change under a flip of the arc `gamma`:
/// X'_γ = 1/X_γ and X'_α = X_α (1 + X_γ^{−sgn ε_αγ})^{−ε_αγ} for α ≠ γ.
/// Returns the flipped triangulation alongside the new coordinates.
pub fn flip_coordinates(
    t: &IdealTriangulation,
    gamma: usize,
    x: &[f64],
) -> Result<(IdealTriangulation, Vec<f64>), TeichError> {
    if x.len() != t.n_arcs {
        return Err(TeichError::SizeMismatch { found: x.len(), expected: t.n_arcs });
    }
    if x.iter().any(|&v| v <= 0.0) {
        return Err(TeichError::NonPositiveInput);
    }
    let flipped = t.flip(gamma)?;
    let eps = t.exchange_matrix();
    let mut out = vec![0.0; t.n_arcs];
    for alpha in 0..t.n_arcs {
        if alpha == gamma {
            out[alpha] = 1.0 / x[gamma];
        } else {
            let e = eps[alpha][gamma];
            if e == 0 {
                out[alpha] = x[alpha];
            } else {
                let s = if e > 0 { 1.0 } else { -1.0 };
                out[alpha] = x[alpha] * (1.0 + x[gamma].powf(-s)).powi(-e as i32);
            }
        }
    }
    Ok((flipped, out))
}

/// Chart gluing at the seed level. Coordinates extend from the basis to the
/// lattice multiplicatively (X_{γ+δ} = X_γ X_δ); the new coordinate of basis
/// vector e'_j of μ_k(seed) is X_{e'_j} · (1 + X_{e_k})^{⟨e'_j, e_k⟩}.
pub fn mutate_chart(s: &Seed, k: usize, x: &[f64]) -> Result<(Seed, Vec<f64>), TeichError> {
    if x.len() != s.rank {
        return Err(TeichError::SizeMismatch { found: x.len(), expected: s.rank });
    }
    if x.iter().any(|&v| v <= 0.0) {
        return Err(TeichError::NonPositiveInput);
    }
    let mutated = mutate_seed(s, k)?;
    let g = s.gram();
    let mut out = vec![0.0; s.rank];
    for j in 0..s.rank {
        if j == k {
            out[j] = 1.0 / x[k];
        } else {
            // e'_j = e_j + [⟨e_k, e_j⟩]₊ e_k in basis coordinates, and
            // ⟨e'_j, e_k⟩ = ⟨e_j, e_k⟩
            let c = g[k][j].max(0);
            let x_new_basis = x[j] * x[k].powi(c as i32);
            out[j] = x_new_basis * (1.0 + x[k]).powi(g[j][k] as i32);
        }
    }
    Ok((mutated, out))
}

/// Length datum of a pole from its leading coefficient (order ≤ 2) or the
/// real part of the analytic residue of its principal differential (order ≥ 3).
pub fn compatible_length(
    leading: Complex64,
    order: usize,
    analytic_residue: Option<Complex64>,
) -> Result<f64, TeichError> {
    if order <= 2 {
        let theta = leading.arg().rem_euclid(2.0 * std::f64::consts::PI);
        Ok(4.0 * std::f64::consts::PI * leading.norm().sqrt() * (theta / 2.0).sin().abs())
    } else {
        match analytic_residue {
            Some(r) => Ok(r.re),
            None => Err(TeichError::InvalidOrder(order)),
        }
    }
}

/// The diagnostic X · exp(R · Re Z) whose convergence to 1 the vortex
/// experiment measures.
pub fn asymptotic_ratio(x: f64, z: Complex64, r: f64) -> Result<f64, TeichError> {
    let v = x * (r * z.re).exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(TeichError::Overflow)
    }
}
