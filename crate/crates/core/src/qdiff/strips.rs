//! Horizontal strip decompositions of complete saddle-free differentials and
//! the WKB triangulation they induce.
//!
//! The separatrix graph (zeros of valence 3, poles with their cyclically
//! ordered separatrix ends) is an embedded graph on the sphere; its faces are
//! exactly the horizontal strips and half planes. Faces are traced from the
//! rotation system, then each strip's standard saddle connection is built by
//! quadrature along the straight segment between its two boundary zeros and
//! validated by re-flowing the saddle as a trajectory.

use super::periods::{normalize_period, saddle_segment_integral};
use super::trace::{StopReason, TraceParams, Tracer};
use super::{CriticalData, PolePoint, QdError, RationalQD};
use crate::surface::{EdgeRef, IdealTriangulation, MarkedBorderedSurface, Signing, Triangle};
use num_complex::Complex64;

/// Tunables for building a strip decomposition.
#[derive(Clone, Debug)]
pub struct DecompParams {
    pub trace: TraceParams,
    /// Root-finding tolerance for the critical data.
    pub tol: f64,
    /// Chunk count for the saddle quadrature.
    pub saddle_chunks: usize,
}

impl Default for DecompParams {
    fn default() -> Self {
        DecompParams {
            trace: TraceParams {
                max_flat_length: 1e4,
                eps_hit: 1e-6,
                r_escape: 12.0,
                ..TraceParams::default()
            },
            tol: 1e-10,
            saddle_chunks: 12,
        }
    }
}

/// A traced separatrix with its combinatorial endpoint data.
#[derive(Clone, Debug)]
pub struct SeparatrixData {
    pub zero: usize,
    pub ray: usize,
    pub points: Vec<Complex64>,
    pub pole: usize,
    pub direction: Option<usize>,
    /// Counterclockwise ordering key around the pole.
    strand_angle: f64,
}

/// A horizontal strip with its standard saddle connection.
#[derive(Clone, Debug)]
pub struct Strip {
    /// The two boundary zeros (saddle endpoints).
    pub zeros: (usize, usize),
    /// The zero sectors this strip occupies: (zero index, sector index).
    pub zero_sectors: [(usize, usize); 2],
    /// The strip's two ends: (pole index, asymptotic direction index).
    pub pole_ends: [(usize, usize); 2],
    /// ζ = ∫√φ over the saddle, normalized to Im ζ > 0.
    pub zeta: Complex64,
    /// The standard saddle class period Z = 2ζ.
    pub period: Complex64,
    /// The saddle connection as a z-plane polyline.
    pub saddle_polyline: Vec<Complex64>,
    /// Flat midpoint of the saddle and the branch of √φ there, oriented so
    /// that the saddle's developed direction is ζ/|ζ|.
    pub mid_z: Complex64,
    pub mid_sqrt: Complex64,
}

/// A half plane: one pole sector between consecutive asymptotic directions.
#[derive(Clone, Debug)]
pub struct HalfPlaneFace {
    pub pole: usize,
    /// Gap index in the pole's counterclockwise direction order.
    pub gap: usize,
    /// The zero sector on its boundary: (zero index, sector index).
    pub zero_sector: (usize, usize),
}

/// The full decomposition.
#[derive(Clone, Debug)]
pub struct StripDecomposition {
    pub crit: CriticalData,
    pub separatrices: Vec<SeparatrixData>,
    pub strips: Vec<Strip>,
    pub half_planes: Vec<HalfPlaneFace>,
}

impl StripDecomposition {
    /// The marked bordered surface determined by the pole orders alone:
    /// genus 0, one boundary component with m−2 marked points per pole of
    /// order ≥ 3, one puncture per pole of order ≤ 2.
    pub fn associated_surface(&self) -> Result<MarkedBorderedSurface, QdError> {
        associated_surface(&self.crit)
    }
}

pub fn associated_surface(crit: &CriticalData) -> Result<MarkedBorderedSurface, QdError> {
    let mut boundary = Vec::new();
    let mut punctures = 0usize;
    for p in sorted_pole_indices(crit) {
        let pole = &crit.poles[p];
        if pole.order >= 3 {
            boundary.push(pole.order - 2);
        } else {
            punctures += 1;
        }
    }
    MarkedBorderedSurface::new(0, boundary, punctures)
        .map_err(|e| QdError::DecompositionInconsistent(format!("bad associated surface: {e}")))
}

/// Poles in a canonical order: finite poles by (re, im), then ∞.
fn sorted_pole_indices(crit: &CriticalData) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..crit.poles.len()).collect();
    idx.sort_by(|&a, &b| {
        let key = |i: usize| match crit.poles[i].location {
            PolePoint::Finite(z) => (0, z.re, z.im),
            PolePoint::Infinity => (1, 0.0, 0.0),
        };
        key(a).partial_cmp(&key(b)).unwrap()
    });
    idx
}

/// Builds the strip decomposition of a complete, saddle-free differential.
pub fn strip_decomposition(
    phi: &RationalQD,
    params: &DecompParams,
) -> Result<StripDecomposition, QdError> {
    let crit = phi.critical_data(params.tol)?;
    if !crit.is_complete() {
        return Err(QdError::Incomplete);
    }
    // adapt the escape radius to the configuration's scale
    let mut trace = params.trace.clone();
    let scale = crit
        .zeros
        .iter()
        .map(|z| z.norm())
        .chain(crit.poles.iter().filter_map(|p| match p.location {
            PolePoint::Finite(z) => Some(z.norm()),
            PolePoint::Infinity => None,
        }))
        .fold(1.0f64, f64::max);
    trace.r_escape = trace.r_escape.max(6.0 * scale);
    let tracer = Tracer::new(phi, &crit, trace);

    // trace the three separatrices of every zero
    let mut separatrices = Vec::new();
    for i in 0..crit.zeros.len() {
        for k in 0..3 {
            let leg = tracer.separatrix(i, k)?;
            match leg.stop {
                StopReason::HitZero(_) => return Err(QdError::SaddleDetected),
                StopReason::Length | StopReason::Truncated => {
                    return Err(QdError::UnresolvedSeparatrix)
                }
                StopReason::IntoPole { pole, direction } => {
                    if crit.poles[pole].order <= 2 {
                        return Err(QdError::DecompositionInconsistent(
                            "a separatrix spirals into an order-2 pole; \
                             strip reconstruction supports poles of order ≥ 3 only"
                                .into(),
                        ));
                    }
                    // counterclockwise around a finite pole is the plane angle;
                    // around ∞ it is the u = 1/z chart's angle, the negation.
                    // Strands of one direction bundle converge slowly, so all
                    // angles are read off at a common probe radius.
                    let strand_angle = match crit.poles[pole].location {
                        PolePoint::Finite(p) => {
                            let probe = 1.02 * tracer.finite_capture_radius(pole);
                            crossing_angle(&leg.points, p, probe, false)?
                        }
                        PolePoint::Infinity => {
                            let probe = 0.98 * tracer.params.r_escape;
                            let a = crossing_angle(&leg.points, Complex64::new(0.0, 0.0), probe, true)?;
                            (-a).rem_euclid(2.0 * std::f64::consts::PI)
                        }
                    };
                    separatrices.push(SeparatrixData {
                        zero: i,
                        ray: k,
                        points: leg.points,
                        pole,
                        direction,
                        strand_angle,
                    });
                }
            }
        }
    }

    // rotation system: ccw dart order at every vertex
    // darts: (separatrix, true = leaving the zero / false = leaving the pole)
    let nz = crit.zeros.len();
    let np = crit.poles.len();
    let mut zero_rotation: Vec<Vec<usize>> = vec![Vec::new(); nz];
    for i in 0..nz {
        let dirs = tracer.separatrix_directions(i);
        let mut at: Vec<(f64, usize)> = separatrices
            .iter()
            .enumerate()
            .filter(|(_, s)| s.zero == i)
            .map(|(si, s)| (dirs[s.ray], si))
            .collect();
        at.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        zero_rotation[i] = at.into_iter().map(|(_, si)| si).collect();
    }
    let mut pole_rotation: Vec<Vec<usize>> = vec![Vec::new(); np];
    for j in 0..np {
        let mut at: Vec<(f64, usize)> = separatrices
            .iter()
            .enumerate()
            .filter(|(_, s)| s.pole == j)
            .map(|(si, s)| (s.strand_angle, si))
            .collect();
        at.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        pole_rotation[j] = at.into_iter().map(|(_, si)| si).collect();
    }

    // counterclockwise order of each pole's direction angles, for gap labels
    // (same chart convention as the strand keys)
    let mut dir_rank: Vec<Vec<usize>> = Vec::with_capacity(np);
    for p in &crit.poles {
        let mut order: Vec<usize> = (0..p.directions.len()).collect();
        let key = |k: usize| match p.location {
            PolePoint::Finite(_) => p.directions[k],
            PolePoint::Infinity => (-p.directions[k]).rem_euclid(2.0 * std::f64::consts::PI),
        };
        order.sort_by(|&a, &b| key(a).partial_cmp(&key(b)).unwrap());
        // rank[d] = position of direction d in the rotation order
        let mut rank = vec![0usize; p.directions.len()];
        for (pos, &d) in order.iter().enumerate() {
            rank[d] = pos;
        }
        dir_rank.push(rank);
    }

    // face tracing: next(d) = successor of rev(d) in the rotation at the
    // vertex rev(d) leaves
    let dart_count = 2 * separatrices.len();
    let dart = |s: usize, from_zero: bool| 2 * s + usize::from(!from_zero);
    let next_dart = |d: usize| -> usize {
        let s = d / 2;
        let from_zero = d % 2 == 0;
        // rev(d) leaves the vertex that d points into
        if from_zero {
            let list = &pole_rotation[separatrices[s].pole];
            let pos = list.iter().position(|&x| x == s).unwrap();
            let succ = list[(pos + 1) % list.len()];
            dart(succ, false)
        } else {
            let list = &zero_rotation[separatrices[s].zero];
            let pos = list.iter().position(|&x| x == s).unwrap();
            let succ = list[(pos + 1) % list.len()];
            dart(succ, true)
        }
    };

    let mut face_of = vec![usize::MAX; dart_count];
    let mut faces: Vec<Vec<usize>> = Vec::new();
    for d0 in 0..dart_count {
        if face_of[d0] != usize::MAX {
            continue;
        }
        let mut cycle = Vec::new();
        let mut d = d0;
        loop {
            face_of[d] = faces.len();
            cycle.push(d);
            d = next_dart(d);
            if d == d0 {
                break;
            }
        }
        faces.push(cycle);
    }
    // Euler check on the sphere
    let v = (nz + np) as isize;
    let e = separatrices.len() as isize;
    let f = faces.len() as isize;
    if v - e + f != 2 {
        return Err(QdError::DecompositionInconsistent(format!(
            "separatrix graph has V−E+F = {}",
            v - e + f
        )));
    }

    // classify faces by their corners
    #[derive(Default)]
    struct FaceCorners {
        zero_sectors: Vec<(usize, usize)>,
        pole_gaps: Vec<(usize, usize, usize)>, // (pole, strand a, strand b) ccw-adjacent
    }
    let mut corners: Vec<FaceCorners> = (0..faces.len()).map(|_| FaceCorners::default()).collect();
    for (fi, cycle) in faces.iter().enumerate() {
        for &d in cycle {
            // walking d, the corner sits at the vertex d points into, between
            // the arriving strand rev(d) and its ccw-successor next(d)
            let s = d / 2;
            let from_zero = d % 2 == 0;
            let nd = next_dart(d);
            let s2 = nd / 2;
            if from_zero {
                // corner at the pole, ccw from strand s to strand s2
                let pole = separatrices[s].pole;
                corners[fi].pole_gaps.push((pole, s, s2));
            } else {
                // corner at the zero: the sector starting at the arriving ray
                let zero = separatrices[s].zero;
                let list = &zero_rotation[zero];
                let pos = list.iter().position(|&x| x == s).unwrap();
                corners[fi].zero_sectors.push((zero, pos));
            }
        }
    }

    // every zero sector must be covered exactly once
    let mut sector_seen = vec![[false; 3]; nz];
    for fc in &corners {
        for &(z, s) in &fc.zero_sectors {
            if sector_seen[z][s] {
                return Err(QdError::DecompositionInconsistent(format!(
                    "zero {z} sector {s} appears in two faces"
                )));
            }
            sector_seen[z][s] = true;
        }
    }

    let mut strips = Vec::new();
    let mut half_planes = Vec::new();
    for fc in corners.iter() {
        match (fc.zero_sectors.len(), fc.pole_gaps.len()) {
            (1, 1) => {
                // half plane: the pole corner must span a gap between
                // consecutive asymptotic directions
                let (pole, sa, sb) = fc.pole_gaps[0];
                let (da, db) = (separatrices[sa].direction, separatrices[sb].direction);
                let (Some(da), Some(db)) = (da, db) else {
                    return Err(QdError::DecompositionInconsistent(
                        "half-plane strands lack direction data".into(),
                    ));
                };
                let nd = crit.poles[pole].directions.len();
                let (ra, rb) = (dir_rank[pole][da], dir_rank[pole][db]);
                // the ccw-later strand sb sits at the ccw-later direction
                if (ra + 1) % nd != rb && !(nd == 1 && ra == rb) {
                    return Err(QdError::DecompositionInconsistent(format!(
                        "half plane at pole {pole} spans non-adjacent directions {ra},{rb}"
                    )));
                }
                half_planes.push(HalfPlaneFace { pole, gap: ra, zero_sector: fc.zero_sectors[0] });
            }
            (2, 2) => {
                // strip: both pole corners join strands of one direction
                let mut pole_ends = [(0usize, 0usize); 2];
                for (slot, &(pole, sa, sb)) in fc.pole_gaps.iter().enumerate() {
                    let (Some(da), Some(db)) =
                        (separatrices[sa].direction, separatrices[sb].direction)
                    else {
                        return Err(QdError::DecompositionInconsistent(
                            "strip strands lack direction data".into(),
                        ));
                    };
                    if da != db {
                        return Err(QdError::DecompositionInconsistent(format!(
                            "strip end at pole {pole} spans two directions"
                        )));
                    }
                    pole_ends[slot] = (pole, da);
                }
                let (za, sa) = fc.zero_sectors[0];
                let (zb, sb) = fc.zero_sectors[1];
                if za == zb {
                    return Err(QdError::DecompositionInconsistent(
                        "strip with both boundary zeros equal is unsupported".into(),
                    ));
                }
                let (zeta, saddle_polyline, mid_z, mid_sqrt) =
                    build_saddle(phi, &crit, &tracer, za, zb, params)?;
                strips.push(Strip {
                    zeros: (za, zb),
                    zero_sectors: [(za, sa), (zb, sb)],
                    pole_ends,
                    zeta,
                    period: 2.0 * zeta,
                    saddle_polyline,
                    mid_z,
                    mid_sqrt,
                });
            }
            (zc, pc) => {
                return Err(QdError::DecompositionInconsistent(format!(
                    "face with {zc} zero corners and {pc} pole corners"
                )))
            }
        }
    }

    // count checks against the associated surface
    let surface = associated_surface(&crit)?;
    let expected_arcs = surface
        .arc_count()
        .map_err(|e| QdError::DecompositionInconsistent(format!("{e}")))?;
    if strips.len() != expected_arcs {
        return Err(QdError::DecompositionInconsistent(format!(
            "{} strips found, surface expects {expected_arcs}",
            strips.len()
        )));
    }
    let expected_hp: usize = crit.poles.iter().map(|p| p.order.saturating_sub(2)).sum();
    if half_planes.len() != expected_hp {
        return Err(QdError::DecompositionInconsistent(format!(
            "{} half planes found, pole orders give {expected_hp}",
            half_planes.len()
        )));
    }

    Ok(StripDecomposition { crit, separatrices, strips, half_planes })
}

/// Quadrature + saddle reconstruction between two zeros.
fn build_saddle(
    phi: &RationalQD,
    crit: &CriticalData,
    tracer: &Tracer,
    za: usize,
    zb: usize,
    params: &DecompParams,
) -> Result<(Complex64, Vec<Complex64>, Complex64, Complex64), QdError> {
    let a = crit.zeros[za];
    let b = crit.zeros[zb];
    // guard: the straight segment must stay clear of other critical points
    let seg_len = (b - a).norm();
    for step in 1..40 {
        let z = a + (b - a) * (step as f64 / 40.0);
        for (i, &w) in crit.zeros.iter().enumerate() {
            if i != za && i != zb && (z - w).norm() < 0.05 * seg_len {
                return Err(QdError::QuadratureFailure("saddle segment passes near another zero"));
            }
        }
        for p in &crit.poles {
            if let PolePoint::Finite(w) = p.location {
                if (z - w).norm() < 0.05 * seg_len {
                    return Err(QdError::QuadratureFailure("saddle segment passes near a pole"));
                }
            }
        }
    }
    let raw = saddle_segment_integral(phi, a, b, Complex64::new(0.0, 1.0), params.saddle_chunks)?;
    let zeta = normalize_period(raw)?;

    // re-flow the saddle from `a` in the developed direction ζ/|ζ|, trying the
    // three sheet lifts; the physical one lands on `b`
    let dir = zeta / zeta.norm();
    let dphi = {
        let n = phi.numerator.eval(a);
        let dn = phi.numerator.derivative().eval(a);
        let d = phi.denominator.eval(a);
        let dd = phi.denominator.derivative().eval(a);
        phi.scale * (dn * d - n * dd) / (d * d)
    };
    let base = (zeta.arg() - 0.5 * dphi.arg()) * 2.0 / 3.0;
    for j in 0..3 {
        let psi = base + j as f64 * 4.0 * std::f64::consts::PI / 3.0;
        let r0 = (3.0 * tracer.params.eps_hit).min(1e-3 * seg_len);
        let start = a + Complex64::from_polar(r0, psi);
        let lam = tracer.sqrt_near(start, dir * Complex64::from_polar(1.0, -psi));
        let Ok(leg) = tracer.flow(start, lam, dir, 1.05 * zeta.norm(), Some(za)) else {
            continue;
        };
        if leg.stop == StopReason::HitZero(zb) {
            let mut pts = leg.points.clone();
            pts.insert(0, a);
            pts.push(b);
            // midpoint for downstream anchoring
            let half = tracer.flow(start, lam, dir, 0.5 * zeta.norm(), Some(za))?;
            return Ok((zeta, pts, half.end, half.end_sqrt));
        }
    }
    Err(QdError::DecompositionInconsistent(
        "no saddle lift lands on the opposite zero".into(),
    ))
}

/// Angle (mod 2π) at which a polyline last crosses the circle of the given
/// radius around `center`; `outward` selects escape (|z| rising through the
/// radius) versus capture (falling).
fn crossing_angle(
    points: &[Complex64],
    center: Complex64,
    radius: f64,
    outward: bool,
) -> Result<f64, QdError> {
    for pair in points.windows(2).rev() {
        let (r0, r1) = ((pair[0] - center).norm(), (pair[1] - center).norm());
        let crosses = if outward { r0 <= radius && r1 > radius } else { r0 >= radius && r1 < radius };
        if crosses {
            let t = (radius - r0) / (r1 - r0);
            let z = pair[0] + (pair[1] - pair[0]) * t;
            return Ok((z - center).arg().rem_euclid(2.0 * std::f64::consts::PI));
        }
    }
    Err(QdError::DecompositionInconsistent(
        "separatrix does not cross its pole's probe circle".into(),
    ))
}

/// The WKB signing: +1 at a puncture iff the chosen residue lies in the upper
/// half plane.
pub fn signing_from_residues(chosen: &[Complex64]) -> Result<Signing, QdError> {
    let mut signs = Vec::with_capacity(chosen.len());
    for r in chosen {
        if r.im.abs() < 1e-12 * (1.0 + r.norm()) {
            return Err(QdError::RealResidue);
        }
        signs.push(if r.im > 0.0 { 1 } else { -1 });
    }
    Ok(Signing(signs))
}

/// The WKB triangulation: one arc per strip, one boundary segment per half
/// plane, one triangle per zero. Returns the triangulation, the signing (empty
/// without punctures), and the arc ↔ strip correspondence.
pub fn wkb_triangulation(
    dec: &StripDecomposition,
) -> Result<(IdealTriangulation, Signing, Vec<usize>), QdError> {
    let surface = dec.associated_surface()?;
    // boundary segment ids: poles of order ≥ 3 in canonical order, one block
    // of m−2 segments per pole, indexed by ccw gap
    let pole_order = sorted_pole_indices(&dec.crit);
    let mut seg_offset = vec![usize::MAX; dec.crit.poles.len()];
    let mut offset = 0usize;
    for &p in &pole_order {
        if dec.crit.poles[p].order >= 3 {
            seg_offset[p] = offset;
            offset += dec.crit.poles[p].order - 2;
        }
    }
    // edge of each zero sector
    let nz = dec.crit.zeros.len();
    let mut sector_edge = vec![[None::<EdgeRef>; 3]; nz];
    for (si, strip) in dec.strips.iter().enumerate() {
        for &(z, s) in &strip.zero_sectors {
            sector_edge[z][s] = Some(EdgeRef::Arc(si));
        }
    }
    for hp in &dec.half_planes {
        let (z, s) = hp.zero_sector;
        sector_edge[z][s] = Some(EdgeRef::Boundary(seg_offset[hp.pole] + hp.gap));
    }
    let mut triangles = Vec::with_capacity(nz);
    for z in 0..nz {
        let edges: Option<Vec<EdgeRef>> = sector_edge[z].iter().copied().collect();
        let edges = edges.ok_or_else(|| {
            QdError::DecompositionInconsistent(format!("zero {z} has an unassigned sector"))
        })?;
        triangles.push(Triangle([edges[0], edges[1], edges[2]]));
    }
    let tri = IdealTriangulation::new(surface, triangles)
        .map_err(|e| QdError::DecompositionInconsistent(format!("invalid WKB complex: {e}")))?;
    let arc_to_strip: Vec<usize> = (0..dec.strips.len()).collect();
    Ok((tri, Signing(vec![]), arc_to_strip))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn square_family_decomposition() {
        // (z²−1)dz²: 1 strip, 4 half planes; saddle joins −1 and 1
        let phi = RationalQD::square_family();
        let dec = strip_decomposition(&phi, &DecompParams::default()).unwrap();
        assert_eq!(dec.strips.len(), 1);
        assert_eq!(dec.half_planes.len(), 4);
        let s = &dec.strips[0];
        let (a, b) = (dec.crit.zeros[s.zeros.0], dec.crit.zeros[s.zeros.1]);
        assert!((a + b).norm() < 1e-9, "saddle endpoints should be ±1");
        // Z = iπ
        assert!((s.period - c(0.0, std::f64::consts::PI)).norm() < 1e-9);
        // strip count equals the arc count of the square
        assert_eq!(dec.associated_surface().unwrap().arc_count().unwrap(), 1);
        // the saddle polyline stays on the segment [−1, 1]
        for p in &s.saddle_polyline {
            assert!(p.im.abs() < 1e-6 && p.re.abs() < 1.0 + 1e-6);
        }
    }

    #[test]
    fn rotated_family_keeps_combinatorics() {
        for &theta in &[-0.3, 0.2, 0.05] {
            let phi = RationalQD::square_family().rotated(theta);
            let dec = strip_decomposition(&phi, &DecompParams::default()).unwrap();
            assert_eq!(dec.strips.len(), 1, "theta = {theta}");
            assert_eq!(dec.half_planes.len(), 4);
            // rotation equivariance of the period
            let expect = Complex64::from_polar(std::f64::consts::PI, std::f64::consts::FRAC_PI_2 + theta);
            let expect = if expect.im > 0.0 { expect } else { -expect };
            assert!(
                (dec.strips[0].period - expect).norm() < 1e-8,
                "theta={theta}: {} vs {expect}",
                dec.strips[0].period
            );
        }
    }

    #[test]
    fn quarter_turn_detects_saddle() {
        let phi = RationalQD::square_family().rotated(std::f64::consts::FRAC_PI_2);
        match strip_decomposition(&phi, &DecompParams::default()) {
            Err(QdError::SaddleDetected) => {}
            other => panic!("expected SaddleDetected, got {other:?}"),
        }
    }

    #[test]
    fn unrotated_cubic_has_horizontal_saddles() {
        // t³−t > 0 on (−1, 0): the segment [−1, 0] is a horizontal saddle
        let phi = RationalQD::polynomial(vec![c(0.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            strip_decomposition(&phi, &DecompParams::default()),
            Err(QdError::SaddleDetected)
        ));
    }

    #[test]
    fn cubic_family_has_two_strips() {
        // e^{2iθ}(z³−z)dz²: 3 zeros, ∞ pole of order 7: pentagon with 2 strips
        let theta = 0.3;
        let phi = RationalQD::polynomial(vec![c(0.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])
            .rotated(theta);
        let dec = strip_decomposition(&phi, &DecompParams::default()).unwrap();
        assert_eq!(dec.strips.len(), 2);
        assert_eq!(dec.half_planes.len(), 5);
        // the two saddles are the segments [−1,0] and [0,1]; the mirror
        // symmetry t ↦ −t makes their flat lengths equal
        let z1 = dec.strips[0].period;
        let z2 = dec.strips[1].period;
        assert!((z1.norm() - z2.norm()).abs() < 1e-8);
        assert!(z1.im > 0.0 && z2.im > 0.0);
        // one period has phase θ, the other θ + π/2
        let mut args = [z1.arg(), z2.arg()];
        args.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((args[0] - theta).abs() < 1e-8);
        assert!((args[1] - (theta + std::f64::consts::FRAC_PI_2)).abs() < 1e-8);
    }

    #[test]
    fn wkb_of_square_family_is_square() {
        let phi = RationalQD::square_family();
        let dec = strip_decomposition(&phi, &DecompParams::default()).unwrap();
        let (tri, signing, arc_map) = wkb_triangulation(&dec).unwrap();
        assert_eq!(tri.surface, MarkedBorderedSurface::new(0, vec![4], 0).unwrap());
        assert_eq!(tri.n_arcs, 1);
        assert_eq!(tri.triangles.len(), 2);
        assert!(signing.0.is_empty());
        assert_eq!(arc_map, vec![0]);
        assert_eq!(tri.exchange_matrix(), vec![vec![0]]);
    }

    #[test]
    fn wkb_of_cubic_family_is_pentagon() {
        let phi = RationalQD::polynomial(vec![c(0.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])
            .rotated(0.3);
        let dec = strip_decomposition(&phi, &DecompParams::default()).unwrap();
        let (tri, _, _) = wkb_triangulation(&dec).unwrap();
        assert_eq!(tri.surface, MarkedBorderedSurface::new(0, vec![5], 0).unwrap());
        assert_eq!(tri.n_arcs, 2);
        let eps = tri.exchange_matrix();
        assert_eq!(eps[0][1].abs(), 1);
    }

    #[test]
    fn quartic_family_has_three_strips() {
        // (z⁴−1) rotated slightly off symmetry: hexagon with 3 strips
        let phi = RationalQD::polynomial(vec![
            c(-1.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(1.0, 0.0),
        ])
        .rotated(0.07);
        let dec = strip_decomposition(&phi, &DecompParams::default()).unwrap();
        assert_eq!(dec.strips.len(), 3);
        assert_eq!(dec.half_planes.len(), 6);
        let (tri, _, _) = wkb_triangulation(&dec).unwrap();
        assert_eq!(tri.surface, MarkedBorderedSurface::new(0, vec![6], 0).unwrap());
        for s in &dec.strips {
            assert!(s.period.im > 0.0);
        }
    }

    #[test]
    fn simple_pole_is_incomplete() {
        // (z−1)/(z+1): a simple pole at −1
        let phi = RationalQD::new(
            crate::cpoly::CPoly::new(vec![c(-1.0, 0.0), c(1.0, 0.0)]),
            crate::cpoly::CPoly::new(vec![c(1.0, 0.0), c(1.0, 0.0)]),
        );
        assert!(matches!(
            strip_decomposition(&phi, &DecompParams::default()),
            Err(QdError::Incomplete)
        ));
    }

    #[test]
    fn signing_follows_residue_half_plane() {
        let s = signing_from_residues(&[c(0.3, 2.0), c(-1.0, -0.5)]).unwrap();
        assert_eq!(s.0, vec![1, -1]);
        assert!(matches!(
            signing_from_residues(&[c(1.0, 0.0)]),
            Err(QdError::RealResidue)
        ));
    }
}
