//! Pullback-metric length functionals and the decay profile of w̃.
//!
//! Along a path, ds² = 2 Re(φ ż²) + (e^{2w} + |φ|² e^{−2w})|ż|²: the (2,0)
//! part is φ itself and never gets renormalized; only w is interpolated from
//! the grid.

use super::grid::NodeClass;
use super::solve::VortexField;
use super::VortexError;
use num_complex::Complex64;

const GL4_NODES: [f64; 4] = [
    -0.8611363115940526,
    -0.3399810435848563,
    0.3399810435848563,
    0.8611363115940526,
];
const GL4_WEIGHTS: [f64; 4] = [
    0.3478548451374538,
    0.6521451548625461,
    0.6521451548625461,
    0.3478548451374538,
];

/// Length of a polyline in the pullback metric of the harmonic image.
pub fn path_length(
    field: &VortexField,
    phi: impl Fn(Complex64) -> Complex64,
    path: &[Complex64],
) -> Result<f64, VortexError> {
    let mut total = 0.0;
    for pair in path.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let dz = b - a;
        let len = dz.norm();
        if len == 0.0 {
            continue;
        }
        // subdivide to the grid scale so the bilinear interpolation resolves w
        let chunks = (len / field.dom.h).ceil().max(1.0) as usize;
        for c in 0..chunks {
            let t0 = c as f64 / chunks as f64;
            let t1 = (c + 1) as f64 / chunks as f64;
            let hm = 0.5 * (t1 - t0);
            let cm = 0.5 * (t0 + t1);
            for (x, wgt) in GL4_NODES.iter().zip(GL4_WEIGHTS.iter()) {
                let t = cm + hm * x;
                let z = a + dz * t;
                let w = field
                    .interp_w(z.re, z.im)
                    .ok_or(VortexError::PathLeavesDomain(z))?;
                let phiv = phi(z);
                let quad = 2.0 * (phiv * dz * dz).re
                    + ((2.0 * w).exp() + phiv.norm_sqr() * (-2.0 * w).exp()) * dz.norm_sqr();
                total += quad.max(0.0).sqrt() * wgt * hm;
            }
        }
    }
    Ok(total)
}

/// Bins active nodes by flat distance to the nearest zero and reports the
/// per-bin supremum of w̃. Distances are shortest paths over the grid graph
/// with edge weights √|φ|·(step length).
pub fn decay_profile(
    field: &VortexField,
    zeros: &[Complex64],
    nbins: usize,
) -> Vec<(f64, f64)> {
    let dom = &field.dom;
    let n = dom.nx * dom.ny;
    let mut dist = vec![f64::INFINITY; n];
    // Dijkstra from all zeros (seeded at their nearest grid nodes)
    let mut heap = std::collections::BinaryHeap::new();
    for &z in zeros {
        let i = ((z.re - dom.x0) / dom.h).round() as isize;
        let j = ((z.im - dom.y0) / dom.h).round() as isize;
        if i < 0 || j < 0 || i as usize >= dom.nx || j as usize >= dom.ny {
            continue;
        }
        let idx = dom.index(i as usize, j as usize);
        dist[idx] = 0.0;
        heap.push(std::cmp::Reverse((ordered(0.0), idx)));
    }
    let steps: [(isize, isize, f64); 8] = [
        (1, 0, 1.0),
        (-1, 0, 1.0),
        (0, 1, 1.0),
        (0, -1, 1.0),
        (1, 1, std::f64::consts::SQRT_2),
        (1, -1, std::f64::consts::SQRT_2),
        (-1, 1, std::f64::consts::SQRT_2),
        (-1, -1, std::f64::consts::SQRT_2),
    ];
    while let Some(std::cmp::Reverse((d, idx))) = heap.pop() {
        let d = d.0;
        if d > dist[idx] {
            continue;
        }
        let (i, j) = ((idx % dom.nx) as isize, (idx / dom.nx) as isize);
        for (di, dj, fac) in steps {
            let (ii, jj) = (i + di, j + dj);
            if ii < 0 || jj < 0 || ii as usize >= dom.nx || jj as usize >= dom.ny {
                continue;
            }
            let nidx = dom.index(ii as usize, jj as usize);
            if dom.class[nidx] == NodeClass::Excluded {
                continue;
            }
            let za = dom.point(i as usize, j as usize);
            let zb = dom.point(ii as usize, jj as usize);
            let mid = 0.5 * (za + zb);
            // flat speed from the stored |φ|² at the midpoint via interpolation
            let sp = interp_absphi(field, mid).sqrt().sqrt();
            let nd = d + fac * dom.h * sp;
            if nd < dist[nidx] {
                dist[nidx] = nd;
                heap.push(std::cmp::Reverse((ordered(nd), nidx)));
            }
        }
    }
    let dmax = dist
        .iter()
        .enumerate()
        .filter(|(idx, d)| dom.class[*idx] == NodeClass::Interior && d.is_finite())
        .map(|(_, d)| *d)
        .fold(0.0f64, f64::max);
    let mut bins = vec![(0.0f64, f64::NEG_INFINITY); nbins];
    for (k, bin) in bins.iter_mut().enumerate() {
        bin.0 = (k as f64 + 0.5) * dmax / nbins as f64;
    }
    for idx in 0..n {
        if dom.class[idx] != NodeClass::Interior || !dist[idx].is_finite() {
            continue;
        }
        let k = ((dist[idx] / dmax) * nbins as f64).floor().min(nbins as f64 - 1.0) as usize;
        let wt = field.w_tilde(idx);
        if wt > bins[k].1 {
            bins[k].1 = wt;
        }
    }
    bins.retain(|(_, sup)| sup.is_finite());
    bins
}

/// Pullback length of a traced flat leg of constant developed direction.
///
/// In flat parametrization the integrand closes up exactly:
/// ds = 2R·cosh(w̃)·dt on horizontal legs and 2R·|sinh(w̃)|·dt on vertical
/// ones, so only w̃ = w − ½ log|φ_R| needs interpolation. The leg must have
/// been traced for the unscaled differential; `r` is the rescaling with
/// φ_R = R²·φ.
pub fn leg_pullback_length(
    field: &VortexField,
    horizontal: bool,
    r: f64,
    points: &[Complex64],
    ts: &[f64],
) -> Result<f64, VortexError> {
    assert_eq!(points.len(), ts.len());
    let mut total = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for (z, &t) in points.iter().zip(ts.iter()) {
        let wt = interp_w_tilde(field, *z)?;
        let integrand = if horizontal { wt.cosh() } else { wt.sinh().abs() };
        if let Some((t0, f0)) = prev {
            total += 0.5 * (f0 + integrand) * (t - t0);
        }
        prev = Some((t, integrand));
    }
    Ok(2.0 * r * total)
}

/// w̃ = w − ½ log|φ| bilinearly interpolated from node values. Unaffected by
/// rescaling φ ↦ R²φ, which shifts w and ½ log|φ| by the same constant.
fn interp_w_tilde(field: &VortexField, z: Complex64) -> Result<f64, VortexError> {
    let dom = &field.dom;
    let gx = (z.re - dom.x0) / dom.h;
    let gy = (z.im - dom.y0) / dom.h;
    if gx < 0.0 || gy < 0.0 {
        return Err(VortexError::PathLeavesDomain(z));
    }
    let (i, j) = (gx.floor() as usize, gy.floor() as usize);
    if i + 1 >= dom.nx || j + 1 >= dom.ny {
        return Err(VortexError::PathLeavesDomain(z));
    }
    let (fx, fy) = (gx - i as f64, gy - j as f64);
    let mut val = 0.0;
    for (di, dj, wgt) in [
        (0, 0, (1.0 - fx) * (1.0 - fy)),
        (1, 0, fx * (1.0 - fy)),
        (0, 1, (1.0 - fx) * fy),
        (1, 1, fx * fy),
    ] {
        let idx = dom.index(i + di, j + dj);
        if dom.class[idx] == NodeClass::Excluded || field.absphi2[idx] <= 0.0 {
            return Err(VortexError::PathLeavesDomain(z));
        }
        val += wgt * field.w_tilde(idx);
    }
    Ok(val)
}

/// |φ(z)|² bilinearly interpolated from the field's node values.
fn interp_absphi(field: &VortexField, z: Complex64) -> f64 {
    let dom = &field.dom;
    let gx = ((z.re - dom.x0) / dom.h).clamp(0.0, (dom.nx - 1) as f64 - 1e-9);
    let gy = ((z.im - dom.y0) / dom.h).clamp(0.0, (dom.ny - 1) as f64 - 1e-9);
    let (i, j) = (gx.floor() as usize, gy.floor() as usize);
    let (fx, fy) = (gx - i as f64, gy - j as f64);
    let v00 = field.absphi2[dom.index(i, j)];
    let v10 = field.absphi2[dom.index(i + 1, j)];
    let v01 = field.absphi2[dom.index(i, j + 1)];
    let v11 = field.absphi2[dom.index(i + 1, j + 1)];
    v00 * (1.0 - fx) * (1.0 - fy) + v10 * fx * (1.0 - fy) + v01 * (1.0 - fx) * fy + v11 * fx * fy
}

#[derive(PartialEq, PartialOrd)]
struct Ordered(f64);
impl Eq for Ordered {}
#[allow(clippy::derive_ord_xor_partial_ord)]
impl Ord for Ordered {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.partial_cmp(other).unwrap()
    }
}
fn ordered(x: f64) -> Ordered {
    Ordered(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vortex::grid::GridDomain;
    use crate::vortex::solve::{solve, SolveParams};

    fn unit_field() -> VortexField {
        // φ = dz² on [−2,2]²: w ≡ 0
        let dom = GridDomain::new(-2.0, 2.0, -2.0, 2.0, 0.05, vec![]).unwrap();
        solve(&dom, |_, _| 1.0, &SolveParams::default()).unwrap()
    }

    #[test]
    fn horizontal_segment_has_twice_flat_length() {
        let field = unit_field();
        let phi = |_z: Complex64| Complex64::new(1.0, 0.0);
        let path = [Complex64::new(-1.0, 0.3), Complex64::new(0.5, 0.3)];
        let len = path_length(&field, phi, &path).unwrap();
        assert!((len - 2.0 * 1.5).abs() < 1e-9, "len {len}");
    }

    #[test]
    fn vertical_segment_has_zero_length() {
        let field = unit_field();
        let phi = |_z: Complex64| Complex64::new(1.0, 0.0);
        let path = [Complex64::new(0.25, -1.0), Complex64::new(0.25, 1.0)];
        let len = path_length(&field, phi, &path).unwrap();
        assert!(len.abs() < 1e-9, "len {len}");
    }

    #[test]
    fn leaving_the_domain_errors() {
        let field = unit_field();
        let phi = |_z: Complex64| Complex64::new(1.0, 0.0);
        let path = [Complex64::new(0.0, 0.0), Complex64::new(5.0, 0.0)];
        assert!(matches!(
            path_length(&field, phi, &path),
            Err(VortexError::PathLeavesDomain(_))
        ));
    }

    #[test]
    fn decay_profile_vanishes_for_constant_differential() {
        let field = unit_field();
        let bins = decay_profile(&field, &[Complex64::new(0.0, 0.0)], 8);
        for (_, sup) in bins {
            assert!(sup.abs() < 1e-9);
        }
    }
}
