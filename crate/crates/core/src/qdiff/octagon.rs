//! The octagon contour around a standard saddle connection.
//!
//! Eight legs of alternating vertical/horizontal developed direction wind
//! once around the two saddle endpoints. In the developed plane the walk is,
//! with ζ = a + ib the saddle integral (Im ζ = b > 0), margins m (vertical)
//! and M (horizontal), x_E = max(0,a) + M and x_W = min(0,a) − M:
//!
//! ```text
//! start (x_E, −m)
//!   ρ3: +i·(b+2m)            σ3: −(x_E − a + M)       ρ4: −i·2m
//!   σ4: +(a − x_W + M)       ρ1: +i·(b+2m)            σ1: −(M − x_W)
//!   ρ2: −i·2m                σ2: +(x_E + M)
//! ```
//!
//! The developed endpoint is start + 2ζ; on the surface the contour closes
//! because the loop's holonomy around the two simple zeros is a translation
//! by the period Z = 2ζ. The alternating sum of the horizontal side lengths
//! −L₁+L₂−L₃+L₄ telescopes to 2a = Re Z, which the contour quadrature of √φ
//! verifies independently.

use super::periods::polyline_integral;
use super::strips::Strip;
use super::trace::{StopReason, TraceParams, Tracer};
use super::{CriticalData, QdError, RationalQD};
use num_complex::Complex64;

/// Which developed role a leg plays.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LegKind {
    /// Horizontal side σ_i, i ∈ 1..4; enters the identity with sign (−1)^i.
    Horizontal(usize),
    /// Vertical side ρ_i.
    Vertical(usize),
}

/// One traced leg of the octagon.
#[derive(Clone, Debug)]
pub struct OctagonLeg {
    pub kind: LegKind,
    /// Developed direction (±1 or ±i).
    pub dir: Complex64,
    pub flat_length: f64,
    pub points: Vec<Complex64>,
    /// Flat parameter of each point, for trajectory-aware measurements.
    pub ts: Vec<f64>,
}

/// The octagon with both sides of the contour identity.
#[derive(Clone, Debug)]
pub struct Octagon {
    /// Legs in walk order: ρ3 σ3 ρ4 σ4 ρ1 σ1 ρ2 σ2.
    pub legs: Vec<OctagonLeg>,
    /// Flat lengths L₁..L₄ of the horizontal sides.
    pub side_lengths: [f64; 4],
    /// Re ∮λ by branch-tracked quadrature along the traced contour.
    pub lhs: f64,
    /// Σ (−1)^i L_i from the flat side lengths.
    pub rhs: f64,
    /// Im ∮λ (should be Im Z > 0).
    pub im_loop: f64,
    /// |z_end − z_start| of the traced contour.
    pub closure_error: f64,
}

/// Margins of the construction: `vertical` = m, `horizontal` = M.
#[derive(Clone, Copy, Debug)]
pub struct OctagonMargins {
    pub vertical: f64,
    pub horizontal: f64,
}

/// Builds the octagon around a strip's standard saddle connection and
/// evaluates both sides of the contour identity.
pub fn octagon_check(
    phi: &RationalQD,
    crit: &CriticalData,
    strip: &Strip,
    margins: OctagonMargins,
    trace: &TraceParams,
) -> Result<Octagon, QdError> {
    let zeta = strip.zeta;
    let (a, b) = (zeta.re, zeta.im);
    let m = margins.vertical;
    let big_m = margins.horizontal;
    if m <= 0.0 || big_m <= 0.0 || m >= b {
        return Err(QdError::OctagonCollision);
    }
    let x_e = a.max(0.0) + big_m;
    let x_w = a.min(0.0) - big_m;

    let tracer = Tracer::new(phi, crit, trace.clone());
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);

    // orient the saddle midpoint branch so the developed direction is ζ/|ζ|
    let mut z = strip.mid_z;
    let mut lam = strip.mid_sqrt;

    // approach: horizontal to Re = x_E, then vertical down to Im = −m
    let approach = [(one, x_e - 0.5 * a), (-i, 0.5 * b + m)];
    for (dir, len) in approach {
        let leg = flow_leg(&tracer, &mut z, &mut lam, dir, len)?;
        drop(leg);
    }
    let start = z;
    let start_lam = lam;

    // the eight legs
    let l1 = big_m - x_w;
    let l2 = x_e + big_m;
    let l3 = x_e - a + big_m;
    let l4 = a - x_w + big_m;
    let spec: [(LegKind, Complex64, f64); 8] = [
        (LegKind::Vertical(3), i, b + 2.0 * m),
        (LegKind::Horizontal(3), -one, l3),
        (LegKind::Vertical(4), -i, 2.0 * m),
        (LegKind::Horizontal(4), one, l4),
        (LegKind::Vertical(1), i, b + 2.0 * m),
        (LegKind::Horizontal(1), -one, l1),
        (LegKind::Vertical(2), -i, 2.0 * m),
        (LegKind::Horizontal(2), one, l2),
    ];
    let mut legs = Vec::with_capacity(8);
    for (kind, dir, len) in spec {
        let (points, ts) = flow_leg(&tracer, &mut z, &mut lam, dir, len)?;
        legs.push(OctagonLeg { kind, dir, flat_length: len, points, ts });
    }
    let closure_error = (z - start).norm();
    if closure_error > 1e-5 * (1.0 + zeta.norm()) {
        return Err(QdError::OctagonNotClosed(closure_error));
    }

    // independent quadrature of ∮λ along the traced contour
    let mut loop_integral = Complex64::new(0.0, 0.0);
    let mut branch = start_lam;
    for leg in &legs {
        let (val, end_branch) = polyline_integral(phi, &leg.points, branch);
        loop_integral += val;
        branch = end_branch;
    }
    // breaking the loop at the start must return the flipped branch的 continuation
    // consistency: the developed displacement is 2ζ
    let rhs = -l1 + l2 - l3 + l4;
    Ok(Octagon {
        legs,
        side_lengths: [l1, l2, l3, l4],
        lhs: loop_integral.re,
        rhs,
        im_loop: loop_integral.im,
        closure_error,
    })
}

/// Flow one leg, advancing the running point and branch; fails when the leg
/// stops on a critical point instead of completing its length.
fn flow_leg(
    tracer: &Tracer,
    z: &mut Complex64,
    lam: &mut Complex64,
    dir: Complex64,
    len: f64,
) -> Result<(Vec<Complex64>, Vec<f64>), QdError> {
    let leg = tracer.flow(*z, *lam, dir, len, None)?;
    if leg.stop != StopReason::Length {
        return Err(QdError::OctagonCollision);
    }
    *z = leg.end;
    *lam = leg.end_sqrt;
    Ok((leg.points, leg.ts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qdiff::strips::{strip_decomposition, DecompParams};

    fn octagon_for(theta: f64, margins: OctagonMargins) -> (Octagon, f64) {
        let phi = RationalQD::square_family().rotated(theta);
        let params = DecompParams::default();
        let dec = strip_decomposition(&phi, &params).unwrap();
        let strip = dec.strips[0].clone();
        let re_z = strip.period.re;
        let oct = octagon_check(&phi, &dec.crit, &strip, margins, &params.trace).unwrap();
        (oct, re_z)
    }

    #[test]
    fn identity_for_theta_minus_03() {
        // Re Z = π·sin 0.3 ≈ 0.92830
        let margins = OctagonMargins { vertical: 0.35, horizontal: 0.6 };
        let (oct, re_z) = octagon_for(-0.3, margins);
        assert!((re_z - std::f64::consts::PI * 0.3f64.sin()).abs() < 1e-8);
        assert!((oct.lhs - oct.rhs).abs() < 1e-6, "lhs {} rhs {}", oct.lhs, oct.rhs);
        assert!((oct.lhs - re_z).abs() < 1e-6);
        assert!(oct.im_loop > 0.0);
        assert!((oct.im_loop - std::f64::consts::PI * 0.3f64.cos()).abs() < 1e-6);
    }

    #[test]
    fn lhs_vanishes_as_theta_goes_to_zero() {
        let margins = OctagonMargins { vertical: 0.3, horizontal: 0.5 };
        let mut last = f64::INFINITY;
        for &theta in &[-0.2, -0.1, -0.05, -0.01] {
            let (oct, re_z) = octagon_for(theta, margins);
            assert!((oct.lhs - re_z).abs() < 1e-6);
            assert!(oct.lhs.abs() < last);
            last = oct.lhs.abs();
        }
    }

    #[test]
    fn margin_independence() {
        let (oct1, re_z) = octagon_for(-0.3, OctagonMargins { vertical: 0.4, horizontal: 0.8 });
        let (oct2, _) = octagon_for(-0.3, OctagonMargins { vertical: 0.2, horizontal: 0.4 });
        assert!((oct1.lhs - oct2.lhs).abs() < 1e-6);
        assert!((oct1.lhs - re_z).abs() < 1e-6 && (oct2.lhs - re_z).abs() < 1e-6);
        // the flat side lengths themselves change with the margin
        assert!((oct1.side_lengths[1] - oct2.side_lengths[1]).abs() > 0.1);
    }

    #[test]
    fn contour_closes() {
        let (oct, _) = octagon_for(-0.3, OctagonMargins { vertical: 0.35, horizontal: 0.6 });
        assert!(oct.closure_error < 1e-6, "closure {}", oct.closure_error);
    }
}
