//! Marked bordered surfaces, ideal triangulations, taggings, and flips.
//!
//! Triangulations are stored as a pure gluing complex: triangles are cyclic
//! triples of edge references in counterclockwise order, and arcs are abstract
//! indices. A self-folded triangle is a triple in which the internal edge
//! occupies two slots, `[encircling, internal, internal]` up to rotation; the
//! flip rule below then needs no special cases. Vertices (marked points) are
//! never stored: they are recovered as orbits of triangle corners.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// A compact oriented surface with marked points, each boundary component
/// carrying at least one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedBorderedSurface {
    pub genus: usize,
    /// Marked-point count per boundary component; every entry must be ≥ 1.
    pub boundary: Vec<usize>,
    /// Number of punctures (interior marked points).
    pub punctures: usize,
}

#[derive(Debug, Error, PartialEq)]
pub enum SurfaceError {
    #[error("boundary component {0} has no marked points")]
    EmptyBoundaryComponent(usize),
    #[error("surface has no marked points")]
    NoMarkedPoints,
    #[error("no ideal triangulation exists (arc count {0} < 1)")]
    NoTriangulation(isize),
}

impl MarkedBorderedSurface {
    pub fn new(genus: usize, boundary: Vec<usize>, punctures: usize) -> Result<Self, SurfaceError> {
        let s = MarkedBorderedSurface { genus, boundary, punctures };
        s.check()?;
        Ok(s)
    }

    fn check(&self) -> Result<(), SurfaceError> {
        for (i, &k) in self.boundary.iter().enumerate() {
            if k == 0 {
                return Err(SurfaceError::EmptyBoundaryComponent(i));
            }
        }
        if self.boundary.iter().sum::<usize>() + self.punctures == 0 {
            return Err(SurfaceError::NoMarkedPoints);
        }
        Ok(())
    }

    /// Boundary components of the blown-up surface: the original list plus one
    /// zero-marked-point entry per puncture.
    pub fn blown_up_boundary(&self) -> Vec<usize> {
        let mut v = self.boundary.clone();
        v.extend(std::iter::repeat(0).take(self.punctures));
        v
    }

    /// Number of arcs in any ideal triangulation: 6g − 6 + Σ_i (k_i + 3),
    /// summed over boundary components of the blown-up surface.
    pub fn arc_count(&self) -> Result<usize, SurfaceError> {
        self.check()?;
        let mut n = 6 * self.genus as isize - 6;
        for k in self.blown_up_boundary() {
            n += k as isize + 3;
        }
        if n < 1 {
            return Err(SurfaceError::NoTriangulation(n));
        }
        Ok(n as usize)
    }

    pub fn total_boundary_marked(&self) -> usize {
        self.boundary.iter().sum()
    }

    /// A closed surface with a single puncture is not amenable; such surfaces
    /// are accepted here but the differential/Teichmüller correspondence does
    /// not apply to them.
    pub fn is_amenable(&self) -> bool {
        let closed = self.boundary.is_empty();
        let marked = self.total_boundary_marked() + self.punctures;
        if closed && self.punctures == 1 {
            return false;
        }
        if closed && self.genus == 0 && self.punctures <= 5 {
            return false;
        }
        if self.genus == 0 && self.boundary.len() == 1 {
            let k = self.boundary[0];
            match self.punctures {
                0 if k <= 4 => return false,
                1 if k == 1 || k == 2 || k == 4 => return false,
                2 if k == 2 => return false,
                _ => {}
            }
        }
        if self.genus == 0 && self.boundary.len() == 2 && self.punctures == 0 && self.boundary == vec![1, 1] {
            return false;
        }
        let _ = marked;
        true
    }
}

/// Reference to an edge of the gluing complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EdgeRef {
    Arc(usize),
    Boundary(usize),
}

impl EdgeRef {
    pub fn arc(self) -> Option<usize> {
        match self {
            EdgeRef::Arc(a) => Some(a),
            EdgeRef::Boundary(_) => None,
        }
    }
}

/// A triangle: three edge references in counterclockwise order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Triangle(pub [EdgeRef; 3]);

impl Triangle {
    /// Lexicographically minimal rotation, for canonical comparison.
    fn normalized(&self) -> Triangle {
        let mut best = *self;
        for r in 1..3 {
            let rot = Triangle([self.0[r % 3], self.0[(r + 1) % 3], self.0[(r + 2) % 3]]);
            if rot.0 < best.0 {
                best = rot;
            }
        }
        best
    }

    /// For a self-folded triangle, `(internal, encircling)`.
    pub fn self_folded(&self) -> Option<(usize, usize)> {
        let [a, b, c] = self.0;
        let pair = |x: EdgeRef, y: EdgeRef, z: EdgeRef| match (x, y, z) {
            (EdgeRef::Arc(i), EdgeRef::Arc(j), EdgeRef::Arc(e)) if i == j && i != e => Some((i, e)),
            _ => None,
        };
        // repeated slot must be an arc; the remaining edge is the encircling one
        pair(a, b, c).or_else(|| pair(b, c, a)).or_else(|| pair(c, a, b))
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum TriangulationError {
    #[error("arc {0} occurs in {1} edge slots (expected 2)")]
    ArcSlotCount(usize, usize),
    #[error("boundary segment {0} occurs in {1} edge slots (expected 1)")]
    BoundarySlotCount(usize, usize),
    #[error("arc count {found} does not match the surface's expected {expected}")]
    ArcCountMismatch { found: usize, expected: usize },
    #[error("boundary segment count {found} does not match the surface's {expected}")]
    BoundaryCountMismatch { found: usize, expected: usize },
    #[error("triangle {0} repeats an edge in an invalid pattern")]
    BadTriangle(usize),
    #[error("Euler characteristic mismatch: V−E+F = {found}, surface requires {expected}")]
    EulerMismatch { found: isize, expected: isize },
    #[error("interior vertex count {found} does not match puncture count {expected}")]
    PunctureCountMismatch { found: usize, expected: usize },
    #[error("boundary cycle lengths {found:?} do not match the surface's {expected:?}")]
    BoundaryCycleMismatch { found: Vec<usize>, expected: Vec<usize> },
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

#[derive(Debug, Error, PartialEq)]
pub enum FlipError {
    #[error("arc {0} is the internal edge of a self-folded triangle")]
    NotFlippable(usize),
    #[error("arc index {0} out of range")]
    UnknownArc(usize),
}

/// An ideal triangulation as a gluing complex over a fixed surface.
#[derive(Clone, Debug)]
pub struct IdealTriangulation {
    pub surface: MarkedBorderedSurface,
    pub n_arcs: usize,
    pub n_boundary: usize,
    pub triangles: Vec<Triangle>,
}

/// A corner of a triangle: sits at the start vertex of edge slot `slot`,
/// between the incoming slot `(slot+2)%3` and the outgoing slot `slot`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Corner {
    pub(crate) tri: usize,
    pub(crate) slot: usize,
}

/// A vertex of the triangulation, recovered as an orbit of corners.
#[derive(Clone, Debug)]
pub struct VertexInfo {
    /// Corners in clockwise order around the vertex.
    pub(crate) corners: Vec<Corner>,
    /// Interior vertex (puncture) or boundary vertex.
    pub interior: bool,
    /// Arc indices of the outgoing half-arcs, in clockwise order around the vertex.
    pub incident_arcs_cw: Vec<usize>,
}

impl VertexInfo {
    /// Number of half-arcs incident to the vertex.
    pub fn valency(&self) -> usize {
        self.incident_arcs_cw.len()
    }
}

impl IdealTriangulation {
    pub fn new(
        surface: MarkedBorderedSurface,
        triangles: Vec<Triangle>,
    ) -> Result<Self, TriangulationError> {
        let n_arcs = surface.arc_count()?;
        let n_boundary = surface.total_boundary_marked();
        let t = IdealTriangulation { surface, n_arcs, n_boundary, triangles };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<(), TriangulationError> {
        let expected_arcs = self.surface.arc_count()?;
        if self.n_arcs != expected_arcs {
            return Err(TriangulationError::ArcCountMismatch {
                found: self.n_arcs,
                expected: expected_arcs,
            });
        }
        let expected_bd = self.surface.total_boundary_marked();
        if self.n_boundary != expected_bd {
            return Err(TriangulationError::BoundaryCountMismatch {
                found: self.n_boundary,
                expected: expected_bd,
            });
        }
        let mut arc_slots = vec![0usize; self.n_arcs];
        let mut bd_slots = vec![0usize; self.n_boundary];
        for (ti, t) in self.triangles.iter().enumerate() {
            let mut arcs_in_t: Vec<usize> = Vec::new();
            for e in t.0 {
                match e {
                    EdgeRef::Arc(a) => {
                        if a >= self.n_arcs {
                            return Err(TriangulationError::ArcSlotCount(a, 0));
                        }
                        arc_slots[a] += 1;
                        arcs_in_t.push(a);
                    }
                    EdgeRef::Boundary(b) => {
                        if b >= self.n_boundary {
                            return Err(TriangulationError::BoundarySlotCount(b, 0));
                        }
                        bd_slots[b] += 1;
                    }
                }
            }
            // a repeated edge is only allowed in the self-folded pattern
            let has_repeat = t.0[0] == t.0[1] || t.0[1] == t.0[2] || t.0[0] == t.0[2];
            if has_repeat && t.self_folded().is_none() {
                return Err(TriangulationError::BadTriangle(ti));
            }
        }
        for (a, &c) in arc_slots.iter().enumerate() {
            if c != 2 {
                return Err(TriangulationError::ArcSlotCount(a, c));
            }
        }
        for (b, &c) in bd_slots.iter().enumerate() {
            if c != 1 {
                return Err(TriangulationError::BoundarySlotCount(b, c));
            }
        }

        // Euler characteristic and vertex structure.
        let verts = self.vertices();
        let v = verts.len() as isize;
        let e = (self.n_arcs + self.n_boundary) as isize;
        let f = self.triangles.len() as isize;
        let expected_chi = 2 - 2 * self.surface.genus as isize - self.surface.boundary.len() as isize;
        if v - e + f != expected_chi {
            return Err(TriangulationError::EulerMismatch { found: v - e + f, expected: expected_chi });
        }
        let interior = verts.iter().filter(|vi| vi.interior).count();
        if interior != self.surface.punctures {
            return Err(TriangulationError::PunctureCountMismatch {
                found: interior,
                expected: self.surface.punctures,
            });
        }
        let mut cycles = self.boundary_cycle_lengths();
        let mut expected_cycles = self.surface.boundary.clone();
        cycles.sort_unstable();
        expected_cycles.sort_unstable();
        if cycles != expected_cycles {
            return Err(TriangulationError::BoundaryCycleMismatch {
                found: cycles,
                expected: expected_cycles,
            });
        }
        Ok(())
    }

    /// The two (triangle, slot) occurrences of each arc; boundary edges have one.
    fn arc_occurrences(&self) -> Vec<Vec<Corner>> {
        let mut occ = vec![Vec::new(); self.n_arcs];
        for (ti, t) in self.triangles.iter().enumerate() {
            for (s, e) in t.0.iter().enumerate() {
                if let EdgeRef::Arc(a) = e {
                    occ[*a].push(Corner { tri: ti, slot: s });
                }
            }
        }
        occ
    }

    /// Rotate clockwise around the start vertex of slot `c`: cross the
    /// outgoing edge and land on the matching corner of the partner triangle.
    /// Returns `None` when the outgoing edge is a boundary segment.
    fn next_corner_cw(&self, c: Corner, occ: &[Vec<Corner>]) -> Option<Corner> {
        match self.triangles[c.tri].0[c.slot] {
            EdgeRef::Boundary(_) => None,
            EdgeRef::Arc(a) => {
                let slots = &occ[a];
                let partner = if slots[0] == c { slots[1] } else { slots[0] };
                Some(Corner { tri: partner.tri, slot: (partner.slot + 1) % 3 })
            }
        }
    }

    /// Inverse rotation: step counterclockwise around the vertex.
    fn next_corner_ccw(&self, c: Corner, occ: &[Vec<Corner>]) -> Option<Corner> {
        let prev_slot = (c.slot + 2) % 3;
        match self.triangles[c.tri].0[prev_slot] {
            EdgeRef::Boundary(_) => None,
            EdgeRef::Arc(a) => {
                let here = Corner { tri: c.tri, slot: prev_slot };
                let slots = &occ[a];
                let partner = if slots[0] == here { slots[1] } else { slots[0] };
                Some(partner)
            }
        }
    }

    /// All vertices as corner orbits. Interior vertices have closed orbits;
    /// boundary vertices are open chains bounded by boundary segments.
    pub fn vertices(&self) -> Vec<VertexInfo> {
        let occ = self.arc_occurrences();
        let ncorners = 3 * self.triangles.len();
        let mut seen = vec![false; ncorners];
        let idx = |c: Corner| 3 * c.tri + c.slot;
        let mut out = Vec::new();
        for t in 0..self.triangles.len() {
            for s in 0..3 {
                let start = Corner { tri: t, slot: s };
                if seen[idx(start)] {
                    continue;
                }
                // rewind counterclockwise as far as possible (stop at boundary or on wrap)
                let mut first = start;
                let mut interior = false;
                loop {
                    match self.next_corner_ccw(first, &occ) {
                        Some(c) => {
                            if c == start {
                                interior = true;
                                break;
                            }
                            first = c;
                        }
                        None => break,
                    }
                }
                // walk clockwise collecting the orbit
                let mut corners = vec![first];
                seen[idx(first)] = true;
                let mut cur = first;
                while let Some(c) = self.next_corner_cw(cur, &occ) {
                    if c == first {
                        break;
                    }
                    corners.push(c);
                    seen[idx(c)] = true;
                    cur = c;
                }
                let incident_arcs_cw = corners
                    .iter()
                    .filter_map(|c| self.triangles[c.tri].0[c.slot].arc())
                    .collect();
                out.push(VertexInfo { corners, interior, incident_arcs_cw });
            }
        }
        out
    }

    /// Lengths of the boundary cycles (marked points per boundary component).
    fn boundary_cycle_lengths(&self) -> Vec<usize> {
        // successor of a boundary segment: the boundary segment that leaves the
        // vertex at which it arrives
        let occ = self.arc_occurrences();
        let mut arrives_at = BTreeMap::new(); // boundary seg -> chain key of its end vertex
        let mut leaves_from = BTreeMap::new(); // chain key -> boundary seg leaving it
        for t in 0..self.triangles.len() {
            for s in 0..3 {
                if let EdgeRef::Boundary(b) = self.triangles[t].0[s] {
                    // end vertex of segment (t,s): start vertex of slot (s+1)%3
                    let mut c = Corner { tri: t, slot: (s + 1) % 3 };
                    // rewind to the chain head for a canonical vertex key
                    while let Some(prev) = self.next_corner_ccw(c, &occ) {
                        c = prev;
                    }
                    arrives_at.insert(b, (c.tri, c.slot));
                    // start vertex of segment (t,s): chain containing corner (t,s)
                    let mut d = Corner { tri: t, slot: s };
                    while let Some(prev) = self.next_corner_ccw(d, &occ) {
                        d = prev;
                    }
                    leaves_from.insert((d.tri, d.slot), b);
                }
            }
        }
        let mut seen = vec![false; self.n_boundary];
        let mut lens = Vec::new();
        for b0 in 0..self.n_boundary {
            if seen[b0] {
                continue;
            }
            let mut len = 0;
            let mut b = b0;
            loop {
                seen[b] = true;
                len += 1;
                let v = arrives_at[&b];
                b = leaves_from[&v];
                if b == b0 {
                    break;
                }
            }
            lens.push(len);
        }
        lens
    }

    /// Resolution map π: internal edges of self-folded triangles map to their
    /// encircling edge, all other arcs to themselves.
    pub fn resolve_self_folded(&self) -> Vec<usize> {
        let mut pi: Vec<usize> = (0..self.n_arcs).collect();
        for t in &self.triangles {
            if let Some((internal, encircling)) = t.self_folded() {
                pi[internal] = encircling;
            }
        }
        pi
    }

    /// The skew-symmetric exchange matrix ε indexed by arcs.
    ///
    /// Per non-self-folded triangle: +1 on each counterclockwise-consecutive
    /// resolved pair, −1 on the reverse, pulled back along π to all arcs that
    /// resolve to the pair.
    pub fn exchange_matrix(&self) -> Vec<Vec<i64>> {
        let pi = self.resolve_self_folded();
        let mut pre: Vec<Vec<usize>> = vec![Vec::new(); self.n_arcs];
        for (a, &p) in pi.iter().enumerate() {
            pre[p].push(a);
        }
        let mut eps = vec![vec![0i64; self.n_arcs]; self.n_arcs];
        for t in &self.triangles {
            if t.self_folded().is_some() {
                continue;
            }
            for s in 0..3 {
                let (x, y) = (t.0[s], t.0[(s + 1) % 3]);
                if let (EdgeRef::Arc(x), EdgeRef::Arc(y)) = (x, y) {
                    let (rx, ry) = (pi[x], pi[y]);
                    for &a in &pre[rx] {
                        for &b in &pre[ry] {
                            eps[a][b] += 1;
                            eps[b][a] -= 1;
                        }
                    }
                }
            }
        }
        eps
    }

    /// Whether every puncture has valency ≥ 3.
    pub fn is_regular(&self) -> bool {
        self.vertices()
            .iter()
            .filter(|v| v.interior)
            .all(|v| v.valency() >= 3)
    }

    /// Flip the arc `gamma`. The new arc inherits the flipped arc's index.
    pub fn flip(&self, gamma: usize) -> Result<IdealTriangulation, FlipError> {
        if gamma >= self.n_arcs {
            return Err(FlipError::UnknownArc(gamma));
        }
        for t in &self.triangles {
            if let Some((internal, _)) = t.self_folded() {
                if internal == gamma {
                    return Err(FlipError::NotFlippable(gamma));
                }
            }
        }
        let mut slots = Vec::new();
        for (ti, t) in self.triangles.iter().enumerate() {
            for (s, e) in t.0.iter().enumerate() {
                if *e == EdgeRef::Arc(gamma) {
                    slots.push((ti, s));
                }
            }
        }
        debug_assert_eq!(slots.len(), 2);
        let (t1, s1) = slots[0];
        let (t2, s2) = slots[1];
        debug_assert_ne!(t1, t2, "internal edges were rejected above");
        let rot = |t: &Triangle, s: usize| [t.0[s], t.0[(s + 1) % 3], t.0[(s + 2) % 3]];
        let [_, x, y] = rot(&self.triangles[t1], s1);
        let [_, u, v] = rot(&self.triangles[t2], s2);
        let g = EdgeRef::Arc(gamma);
        let mut triangles = self.triangles.clone();
        triangles[t1] = Triangle([g, y, u]);
        triangles[t2] = Triangle([g, v, x]);
        let out = IdealTriangulation {
            surface: self.surface.clone(),
            n_arcs: self.n_arcs,
            n_boundary: self.n_boundary,
            triangles,
        };
        debug_assert!(out.validate().is_ok(), "flip produced an invalid complex");
        Ok(out)
    }

    /// Canonical key: rotation-normalized triangles in sorted order. Two
    /// complexes over the same surface are equal iff their keys agree.
    pub fn canonical_key(&self) -> Vec<[EdgeRef; 3]> {
        let mut ts: Vec<[EdgeRef; 3]> = self.triangles.iter().map(|t| t.normalized().0).collect();
        ts.sort();
        ts
    }

    pub fn structurally_equal(&self, other: &IdealTriangulation) -> bool {
        self.surface == other.surface && self.canonical_key() == other.canonical_key()
    }

    /// Canonical key with arcs quotiented out by relabeling (boundary segments
    /// stay pinned to their marked points). Brute-forces arc permutations, so
    /// only suitable for small surfaces.
    pub fn canonical_key_unlabeled(&self) -> Vec<[EdgeRef; 3]> {
        assert!(self.n_arcs <= 8, "unlabeled keys are brute-forced; too many arcs");
        let mut perm: Vec<usize> = (0..self.n_arcs).collect();
        let mut best: Option<Vec<[EdgeRef; 3]>> = None;
        permute(&mut perm, 0, &mut |p| {
            let relabeled: Vec<Triangle> = self
                .triangles
                .iter()
                .map(|t| {
                    Triangle(t.0.map(|e| match e {
                        EdgeRef::Arc(a) => EdgeRef::Arc(p[a]),
                        b => b,
                    }))
                })
                .collect();
            let mut key: Vec<[EdgeRef; 3]> = relabeled.iter().map(|t| t.normalized().0).collect();
            key.sort();
            if best.as_ref().map_or(true, |b| key < *b) {
                best = Some(key);
            }
        });
        best.unwrap()
    }

    /// Structural equality up to arc relabeling.
    pub fn structurally_equal_up_to_relabel(&self, other: &IdealTriangulation) -> bool {
        self.surface == other.surface
            && self.canonical_key_unlabeled() == other.canonical_key_unlabeled()
    }

    /// Indices (into `vertices()` order) of interior vertices, with a stable
    /// puncture numbering: sorted by their clockwise incident-arc lists.
    pub fn punctures(&self) -> Vec<VertexInfo> {
        let mut ps: Vec<VertexInfo> = self.vertices().into_iter().filter(|v| v.interior).collect();
        ps.sort_by(|a, b| {
            let ka = sorted(&a.incident_arcs_cw);
            let kb = sorted(&b.incident_arcs_cw);
            ka.cmp(&kb)
        });
        ps
    }

    /// For each self-folded triangle, the puncture index (in `punctures()`
    /// numbering) of its interior marked point.
    pub fn self_folded_punctures(&self) -> Vec<usize> {
        let punctures = self.punctures();
        let mut out = Vec::new();
        for t in &self.triangles {
            if let Some((internal, _)) = t.self_folded() {
                // the enclosed puncture is the valency-1 vertex on the internal edge
                let pi = punctures
                    .iter()
                    .position(|v| v.interior && v.incident_arcs_cw == vec![internal] && v.valency() == 1)
                    .expect("self-folded triangle must enclose a valency-1 puncture");
                out.push(pi);
            }
        }
        out
    }
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v
}

/// Heap's algorithm, calling `visit` on every permutation of `items`.
fn permute(items: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// A choice of sign at every puncture.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signing(pub Vec<i8>);

impl Signing {
    pub fn all_plus(punctures: usize) -> Signing {
        Signing(vec![1; punctures])
    }

    pub fn is_valid(&self) -> bool {
        self.0.iter().all(|&s| s == 1 || s == -1)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum TaggedError {
    #[error("tagged triangulations live over different surfaces")]
    SurfaceMismatch,
    #[error("signing has {found} entries, surface has {expected} punctures")]
    SigningSize { found: usize, expected: usize },
    #[error("signing values must be ±1")]
    BadSigning,
}

/// An equivalence class of signed triangulations: representatives differing
/// only at the interior puncture of a self-folded triangle are equal.
#[derive(Clone, Debug)]
pub struct TaggedTriangulation {
    triangulation: IdealTriangulation,
    signing: Signing,
    canonical: bool,
}

impl TaggedTriangulation {
    pub fn new(
        triangulation: IdealTriangulation,
        signing: Signing,
    ) -> Result<TaggedTriangulation, TaggedError> {
        if signing.0.len() != triangulation.surface.punctures {
            return Err(TaggedError::SigningSize {
                found: signing.0.len(),
                expected: triangulation.surface.punctures,
            });
        }
        if !signing.is_valid() {
            return Err(TaggedError::BadSigning);
        }
        Ok(TaggedTriangulation { triangulation, signing, canonical: false })
    }

    pub fn triangulation(&self) -> &IdealTriangulation {
        &self.triangulation
    }

    pub fn signing(&self) -> &Signing {
        &self.signing
    }

    /// Canonical representative: the sign at the interior puncture of every
    /// self-folded triangle is forced to +1.
    pub fn canonicalize(&self) -> TaggedTriangulation {
        if self.canonical {
            return self.clone();
        }
        let mut signing = self.signing.clone();
        for p in self.triangulation.self_folded_punctures() {
            signing.0[p] = 1;
        }
        TaggedTriangulation { triangulation: self.triangulation.clone(), signing, canonical: true }
    }

    /// Equality of tagged triangulations: canonical forms coincide.
    pub fn tagged_equal(&self, other: &TaggedTriangulation) -> Result<bool, TaggedError> {
        if self.triangulation.surface != other.triangulation.surface {
            return Err(TaggedError::SurfaceMismatch);
        }
        let a = self.canonicalize();
        let b = other.canonicalize();
        Ok(a.triangulation.structurally_equal(&b.triangulation) && a.signing == b.signing)
    }
}

/// Catalog constructors used across tests, the CLI, and the book.
pub mod catalog {
    use super::*;

    /// Unpunctured disk with `k ≥ 4` boundary marked points, fan-triangulated
    /// from vertex 0. Boundary segment `i` joins vertices `i` and `i+1`.
    pub fn polygon(k: usize) -> IdealTriangulation {
        assert!(k >= 4, "a fan triangulation needs k ≥ 4");
        let surface = MarkedBorderedSurface::new(0, vec![k], 0).unwrap();
        let b = EdgeRef::Boundary;
        let a = EdgeRef::Arc;
        // arc j (j = 0..k-3) joins vertex 0 and vertex j+2
        let mut triangles = Vec::new();
        triangles.push(Triangle([b(0), b(1), a(0)]));
        for j in 1..k - 3 {
            triangles.push(Triangle([a(j - 1), b(j + 1), a(j)]));
        }
        triangles.push(Triangle([a(k - 4), b(k - 2), b(k - 1)]));
        IdealTriangulation::new(surface, triangles).unwrap()
    }

    /// The once-punctured torus with its standard three-arc triangulation.
    pub fn once_punctured_torus() -> IdealTriangulation {
        let surface = MarkedBorderedSurface::new(1, vec![], 1).unwrap();
        let a = EdgeRef::Arc;
        let triangles = vec![Triangle([a(0), a(1), a(2)]), Triangle([a(0), a(1), a(2)])];
        IdealTriangulation::new(surface, triangles).unwrap()
    }

    /// Annulus with one marked point on each boundary component.
    pub fn annulus_1_1() -> IdealTriangulation {
        let surface = MarkedBorderedSurface::new(0, vec![1, 1], 0).unwrap();
        let b = EdgeRef::Boundary;
        let a = EdgeRef::Arc;
        let triangles = vec![Triangle([b(0), a(0), a(1)]), Triangle([b(1), a(0), a(1)])];
        IdealTriangulation::new(surface, triangles).unwrap()
    }

    /// Once-punctured disk with `k ≥ 2` boundary marked points, fanned from
    /// the puncture: arc `i` joins boundary vertex `i` to the puncture.
    pub fn once_punctured_polygon(k: usize) -> IdealTriangulation {
        assert!(k >= 2);
        let surface = MarkedBorderedSurface::new(0, vec![k], 1).unwrap();
        let b = EdgeRef::Boundary;
        let a = EdgeRef::Arc;
        let triangles: Vec<Triangle> = (0..k)
            .map(|i| Triangle([b(i), a((i + 1) % k), a(i)]))
            .collect();
        IdealTriangulation::new(surface, triangles).unwrap()
    }

    /// Once-punctured digon carrying a self-folded triangle: arc 0 is the
    /// internal edge, arc 1 the encircling loop.
    pub fn once_punctured_digon_selffolded() -> IdealTriangulation {
        let surface = MarkedBorderedSurface::new(0, vec![2], 1).unwrap();
        let b = EdgeRef::Boundary;
        let a = EdgeRef::Arc;
        let triangles = vec![Triangle([a(1), a(0), a(0)]), Triangle([a(1), b(0), b(1)])];
        IdealTriangulation::new(surface, triangles).unwrap()
    }

    /// The same digon triangulated by two radii (no self-folded triangle).
    pub fn once_punctured_digon_radii() -> IdealTriangulation {
        once_punctured_polygon(2)
    }
}

/// Exhaustive flip-graph exploration from a starting triangulation.
///
/// States are gluing complexes up to arc relabeling (boundary segments stay
/// pinned), matching the usual count of triangulations of a labeled polygon.
/// Intended for small surfaces.
pub fn enumerate_flip_graph(
    start: &IdealTriangulation,
    max_states: usize,
) -> (Vec<IdealTriangulation>, Vec<(usize, usize)>) {
    let mut states: Vec<IdealTriangulation> = vec![start.clone()];
    let mut keys: BTreeMap<Vec<[EdgeRef; 3]>, usize> = BTreeMap::new();
    keys.insert(start.canonical_key_unlabeled(), 0);
    let mut edges = Vec::new();
    let mut frontier = vec![0usize];
    while let Some(i) = frontier.pop() {
        let t = states[i].clone();
        for gamma in 0..t.n_arcs {
            let Ok(flipped) = t.flip(gamma) else { continue };
            let key = flipped.canonical_key_unlabeled();
            let next_index = states.len();
            let j = *keys.entry(key).or_insert_with(|| {
                states.push(flipped);
                next_index
            });
            if j == next_index {
                assert!(states.len() <= max_states, "flip graph exceeded {max_states} states");
                frontier.push(j);
            }
            if i != j {
                edges.push((i.min(j), i.max(j)));
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    (states, edges)
}

#[cfg(test)]
mod tests {
    use super::catalog::*;
    use super::*;

    #[test]
    fn arc_counts_match_catalog() {
        // once-punctured torus → 3
        let t = MarkedBorderedSurface::new(1, vec![], 1).unwrap();
        assert_eq!(t.arc_count().unwrap(), 3);
        // unpunctured disk, 5 boundary marks → 2; 4 marks → 1
        assert_eq!(MarkedBorderedSurface::new(0, vec![5], 0).unwrap().arc_count().unwrap(), 2);
        assert_eq!(MarkedBorderedSurface::new(0, vec![4], 0).unwrap().arc_count().unwrap(), 1);
        // annulus(1,1) → 2
        assert_eq!(MarkedBorderedSurface::new(0, vec![1, 1], 0).unwrap().arc_count().unwrap(), 2);
        // triangle has no interior arc
        assert!(matches!(
            MarkedBorderedSurface::new(0, vec![3], 0).unwrap().arc_count(),
            Err(SurfaceError::NoTriangulation(0))
        ));
    }

    #[test]
    fn arc_count_agrees_with_direct_formula() {
        // 6g + 3b + 3p + c − 6 with b boundary components, p punctures, c boundary marks
        let catalog = [
            MarkedBorderedSurface::new(1, vec![], 1).unwrap(),
            MarkedBorderedSurface::new(0, vec![5], 0).unwrap(),
            MarkedBorderedSurface::new(0, vec![1, 1], 0).unwrap(),
            MarkedBorderedSurface::new(0, vec![2], 1).unwrap(),
            MarkedBorderedSurface::new(0, vec![3, 2], 2).unwrap(),
            MarkedBorderedSurface::new(2, vec![4], 3).unwrap(),
        ];
        for s in catalog {
            let direct = 6 * s.genus as isize + 3 * s.boundary.len() as isize
                + 3 * s.punctures as isize
                + s.total_boundary_marked() as isize
                - 6;
            assert_eq!(s.arc_count().unwrap() as isize, direct, "{s:?}");
        }
    }

    #[test]
    fn invalid_surfaces_rejected() {
        assert_eq!(
            MarkedBorderedSurface::new(0, vec![0, 2], 0),
            Err(SurfaceError::EmptyBoundaryComponent(0))
        );
        assert_eq!(MarkedBorderedSurface::new(1, vec![], 0), Err(SurfaceError::NoMarkedPoints));
    }

    #[test]
    fn amenability_flags() {
        assert!(!MarkedBorderedSurface::new(2, vec![], 1).unwrap().is_amenable());
        assert!(!MarkedBorderedSurface::new(0, vec![4], 0).unwrap().is_amenable());
        assert!(!MarkedBorderedSurface::new(0, vec![1, 1], 0).unwrap().is_amenable());
        assert!(MarkedBorderedSurface::new(0, vec![5], 0).unwrap().is_amenable());
        assert!(MarkedBorderedSurface::new(1, vec![], 2).unwrap().is_amenable());
    }

    #[test]
    fn square_exchange_matrix_is_zero() {
        let t = polygon(4);
        assert_eq!(t.exchange_matrix(), vec![vec![0]]);
    }

    #[test]
    fn torus_exchange_matrix_is_markov() {
        let t = once_punctured_torus();
        let eps = t.exchange_matrix();
        assert_eq!(eps, vec![vec![0, 2, -2], vec![-2, 0, 2], vec![2, -2, 0]]);
    }

    #[test]
    fn pentagon_exchange_matrix() {
        // two diagonals sharing vertex 0: a single shared triangle gives ±1
        let t = polygon(5);
        let eps = t.exchange_matrix();
        assert_eq!(eps[0][0], 0);
        assert_eq!(eps[1][1], 0);
        assert_eq!(eps[0][1].abs(), 1);
        assert_eq!(eps[0][1], -eps[1][0]);
    }

    #[test]
    fn exchange_matrices_skew_symmetric_and_bounded() {
        let catalog = [
            polygon(4),
            polygon(6),
            polygon(8),
            once_punctured_torus(),
            annulus_1_1(),
            once_punctured_polygon(3),
            once_punctured_polygon(6),
            once_punctured_digon_selffolded(),
        ];
        for t in catalog {
            let eps = t.exchange_matrix();
            for i in 0..eps.len() {
                for j in 0..eps.len() {
                    assert_eq!(eps[i][j], -eps[j][i]);
                    assert!(eps[i][j].abs() <= 2);
                }
            }
        }
    }

    #[test]
    fn self_folded_rows_duplicate_encircling() {
        let t = once_punctured_digon_selffolded();
        let eps = t.exchange_matrix();
        // internal arc 0 and encircling arc 1 carry identical rows
        assert_eq!(eps[0], eps[1]);
        // and ε_{01} = 0
        assert_eq!(eps[0][1], 0);
    }

    #[test]
    fn flip_square_is_involution() {
        let t = polygon(4);
        let f = t.flip(0).unwrap();
        assert!(!f.structurally_equal(&t));
        let ff = f.flip(0).unwrap();
        assert!(ff.structurally_equal(&t));
    }

    #[test]
    fn flip_preserves_counts_and_is_involutive_on_catalog() {
        let catalog = [
            polygon(5),
            polygon(7),
            once_punctured_torus(),
            annulus_1_1(),
            once_punctured_polygon(4),
            once_punctured_digon_selffolded(),
        ];
        for t in catalog {
            for gamma in 0..t.n_arcs {
                match t.flip(gamma) {
                    Ok(f) => {
                        assert_eq!(f.triangles.len(), t.triangles.len());
                        assert_eq!(f.n_arcs, t.n_arcs);
                        let ff = f.flip(gamma).unwrap();
                        assert!(ff.structurally_equal(&t), "double flip at {gamma}");
                    }
                    Err(FlipError::NotFlippable(_)) => {}
                    Err(e) => panic!("unexpected flip error {e:?}"),
                }
            }
        }
    }

    #[test]
    fn internal_edge_not_flippable() {
        let t = once_punctured_digon_selffolded();
        assert_eq!(t.flip(0).err(), Some(FlipError::NotFlippable(0)));
    }

    #[test]
    fn digon_flip_creates_and_removes_self_folded() {
        // flipping the encircling loop of the self-folded digon yields the
        // two-radii triangulation, and flipping a radius brings it back
        let sf = once_punctured_digon_selffolded();
        let radii = sf.flip(1).unwrap();
        assert!(radii.triangles.iter().all(|t| t.self_folded().is_none()));
        assert!(radii.structurally_equal_up_to_relabel(&once_punctured_digon_radii()));
        let back = radii.flip(1).unwrap();
        assert!(back.triangles.iter().any(|t| t.self_folded().is_some()));
    }

    #[test]
    fn pentagon_flip_graph_is_associahedron_cycle() {
        let (states, edges) = enumerate_flip_graph(&polygon(5), 64);
        assert_eq!(states.len(), 5);
        assert_eq!(edges.len(), 5);
        // every state has exactly two neighbors: a 5-cycle
        let mut deg = vec![0; states.len()];
        for (i, j) in &edges {
            deg[*i] += 1;
            deg[*j] += 1;
        }
        assert!(deg.iter().all(|&d| d == 2));
    }

    #[test]
    fn flip_graph_counts_match_catalan() {
        let catalan = [1usize, 1, 2, 5, 14, 42, 132];
        for k in 4..=8 {
            let (states, _) = enumerate_flip_graph(&polygon(k), 2000);
            assert_eq!(states.len(), catalan[k - 2], "disk with {k} marked points");
        }
    }

    #[test]
    fn pentagon_five_flip_cycle_returns_to_start() {
        // around the associahedron: flip arcs alternately, five times
        let t0 = polygon(5);
        let mut t = t0.clone();
        let mut arc = 0usize;
        let mut seen = vec![t0.canonical_key_unlabeled()];
        for _ in 0..5 {
            t = t.flip(arc).unwrap();
            arc = 1 - arc;
            seen.push(t.canonical_key_unlabeled());
        }
        assert!(t.structurally_equal_up_to_relabel(&t0));
        // the five intermediate states are pairwise distinct
        let mut mid = seen[..5].to_vec();
        mid.sort();
        mid.dedup();
        assert_eq!(mid.len(), 5);
    }

    #[test]
    fn vertices_of_catalog() {
        let torus = once_punctured_torus();
        let vs = torus.vertices();
        assert_eq!(vs.len(), 1);
        assert!(vs[0].interior);
        assert_eq!(vs[0].valency(), 6);
        assert!(!torus.triangles.iter().any(|t| t.self_folded().is_some()));
        assert!(torus.is_regular());

        let digon = once_punctured_digon_selffolded();
        assert!(!digon.is_regular());
        assert_eq!(digon.self_folded_punctures(), vec![0]);

        let hex = once_punctured_polygon(6);
        let punctures: Vec<_> = hex.vertices().into_iter().filter(|v| v.interior).collect();
        assert_eq!(punctures.len(), 1);
        assert_eq!(punctures[0].valency(), 6);
    }

    #[test]
    fn tagged_equality() {
        let t = once_punctured_digon_selffolded();
        let plus = TaggedTriangulation::new(t.clone(), Signing(vec![1])).unwrap();
        let minus = TaggedTriangulation::new(t.clone(), Signing(vec![-1])).unwrap();
        // reflexivity
        assert!(plus.tagged_equal(&plus).unwrap());
        // the puncture sits inside a self-folded triangle: signs are equivalent
        assert!(plus.tagged_equal(&minus).unwrap());

        // a puncture of valency ≥ 3 distinguishes signs
        let torus = once_punctured_torus();
        let p = TaggedTriangulation::new(torus.clone(), Signing(vec![1])).unwrap();
        let m = TaggedTriangulation::new(torus, Signing(vec![-1])).unwrap();
        assert!(!p.tagged_equal(&m).unwrap());

        // different surfaces are rejected
        let sq = TaggedTriangulation::new(polygon(4), Signing(vec![])).unwrap();
        assert_eq!(plus.tagged_equal(&sq), Err(TaggedError::SurfaceMismatch));
    }
}
