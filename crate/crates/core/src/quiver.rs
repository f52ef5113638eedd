//! Quivers with potential from triangulations, cyclic derivatives, and
//! seed/matrix mutation.
//!
//! A triangulation quiver has one vertex per arc and, for each
//! counterclockwise-consecutive arc pair (α, β) of a triangle, one arrow
//! β → α; the per-triangle clockwise 3-cycles and the counterclockwise
//! puncture cycles assemble the canonical potential Σ_t τ(t) − Σ_p ε(p)π(p).

use crate::surface::{IdealTriangulation, Signing};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// An arrow of a quiver, by arc indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arrow {
    pub source: usize,
    pub target: usize,
}

/// A quiver on the arc set of a triangulation. Arrows are identified by their
/// index in `arrows`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quiver {
    pub vertices: usize,
    pub arrows: Vec<Arrow>,
}

#[derive(Debug, Error, PartialEq)]
pub enum QuiverError {
    #[error("triangulation is not regular (a puncture has valency < 3)")]
    NonRegularTriangulation,
    #[error("arrow index {0} out of range")]
    UnknownArrow(usize),
    #[error("index {0} out of range for rank {1}")]
    IndexOutOfRange(usize, usize),
    #[error("matrix is not skew-symmetric")]
    NotSkewSymmetric,
}

impl Quiver {
    /// Arrow multiplicity matrix: entry (i, j) counts arrows j → i.
    pub fn arrow_counts(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0i64; self.vertices]; self.vertices];
        for a in &self.arrows {
            m[a.target][a.source] += 1;
        }
        m
    }

    /// True when the quiver has no 2-cycles (and no loops).
    pub fn is_two_acyclic(&self) -> bool {
        let counts = self.arrow_counts();
        for i in 0..self.vertices {
            if counts[i][i] != 0 {
                return false;
            }
            for j in 0..self.vertices {
                if i != j && counts[i][j] > 0 && counts[j][i] > 0 {
                    return false;
                }
            }
        }
        true
    }
}

/// The quiver of a regular ideal triangulation, together with the arrow
/// labelling used by the potential: `arrow_at[(triangle, slot)]` is the arrow
/// for the consecutive pair at that slot.
pub struct TriangulationQuiver {
    pub quiver: Quiver,
    arrow_at: BTreeMap<(usize, usize), usize>,
}

/// Builds the quiver of a regular triangulation.
pub fn quiver_from_triangulation(t: &IdealTriangulation) -> Result<TriangulationQuiver, QuiverError> {
    if !t.is_regular() {
        return Err(QuiverError::NonRegularTriangulation);
    }
    let mut arrows = Vec::new();
    let mut arrow_at = BTreeMap::new();
    for (ti, tri) in t.triangles.iter().enumerate() {
        debug_assert!(tri.self_folded().is_none(), "regular triangulations have no self-folded triangles");
        for c in 0..3 {
            let (alpha, beta) = (tri.0[c], tri.0[(c + 1) % 3]);
            if let (Some(alpha), Some(beta)) = (alpha.arc(), beta.arc()) {
                arrow_at.insert((ti, c), arrows.len());
                arrows.push(Arrow { source: beta, target: alpha });
            }
        }
    }
    let quiver = Quiver { vertices: t.n_arcs, arrows };
    // the arrow counts must reproduce the positive part of the exchange matrix
    let eps = t.exchange_matrix();
    let counts = quiver.arrow_counts();
    for i in 0..t.n_arcs {
        for j in 0..t.n_arcs {
            if counts[i][j] != eps[i][j].max(0) {
                return Err(QuiverError::NonRegularTriangulation);
            }
        }
    }
    Ok(TriangulationQuiver { quiver, arrow_at })
}

/// A potential: a finite signed list of cyclic words of arrows, each stored in
/// its lexicographically minimal rotation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Potential {
    pub terms: Vec<(i64, Vec<usize>)>,
}

fn canonical_rotation(cycle: &[usize]) -> Vec<usize> {
    let n = cycle.len();
    let mut best = cycle.to_vec();
    for r in 1..n {
        let rot: Vec<usize> = (0..n).map(|i| cycle[(i + r) % n]).collect();
        if rot < best {
            best = rot;
        }
    }
    best
}

impl Potential {
    pub fn new(terms: Vec<(i64, Vec<usize>)>) -> Potential {
        let mut combined: BTreeMap<Vec<usize>, i64> = BTreeMap::new();
        for (c, cycle) in terms {
            assert!(cycle.len() >= 3, "potentials are reduced: cycles have length ≥ 3");
            *combined.entry(canonical_rotation(&cycle)).or_insert(0) += c;
        }
        Potential {
            terms: combined.into_iter().filter(|(_, c)| *c != 0).map(|(w, c)| (c, w)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// The canonical potential of a regular signed triangulation:
/// one +1 clockwise 3-cycle per internal triangle and one −ε(p) cycle per
/// puncture p.
pub fn potential_from_triangulation(
    t: &IdealTriangulation,
    signing: &Signing,
) -> Result<(TriangulationQuiver, Potential), QuiverError> {
    let tq = quiver_from_triangulation(t)?;
    let mut terms = Vec::new();
    // triangle cycles
    for (ti, tri) in t.triangles.iter().enumerate() {
        if tri.0.iter().all(|e| e.arc().is_some()) {
            let cycle: Vec<usize> = (0..3).map(|c| tq.arrow_at[&(ti, c)]).collect();
            debug_assert!(is_composable(&tq.quiver, &cycle));
            terms.push((1, cycle));
        }
    }
    // puncture cycles, in the stable puncture numbering
    for (pi, v) in t.punctures().iter().enumerate() {
        let cycle: Vec<usize> = v
            .corners
            .iter()
            .map(|c| tq.arrow_at[&(c.tri, (c.slot + 2) % 3)])
            .collect();
        debug_assert!(is_composable(&tq.quiver, &cycle));
        terms.push((-(signing.0[pi] as i64), cycle));
    }
    Ok((tq, Potential::new(terms)))
}

fn is_composable(q: &Quiver, cycle: &[usize]) -> bool {
    let n = cycle.len();
    (0..n).all(|i| q.arrows[cycle[i]].source == q.arrows[cycle[(i + 1) % n]].target)
}

/// A formal integer combination of paths (each a composable arrow sequence).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathSum {
    pub terms: Vec<(i64, Vec<usize>)>,
}

impl PathSum {
    fn combine(terms: Vec<(i64, Vec<usize>)>) -> PathSum {
        let mut map: BTreeMap<Vec<usize>, i64> = BTreeMap::new();
        for (c, p) in terms {
            *map.entry(p).or_insert(0) += c;
        }
        PathSum { terms: map.into_iter().filter(|(_, c)| *c != 0).map(|(p, c)| (c, p)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Cyclic derivative ∂_a W: every occurrence of `a` in a cycle contributes the
/// rotated remainder path, with the cycle's coefficient.
pub fn cyclic_derivative(q: &Quiver, w: &Potential, a: usize) -> Result<PathSum, QuiverError> {
    if a >= q.arrows.len() {
        return Err(QuiverError::UnknownArrow(a));
    }
    let mut terms = Vec::new();
    for (coeff, cycle) in &w.terms {
        for (i, &arrow) in cycle.iter().enumerate() {
            if arrow == a {
                let mut path = cycle[i + 1..].to_vec();
                path.extend_from_slice(&cycle[..i]);
                terms.push((*coeff, path));
            }
        }
    }
    Ok(PathSum::combine(terms))
}

/// Matrix mutation at index k:
/// ε'_ij = −ε_ij when i = k or j = k, otherwise ε_ij + sgn(ε_ik)·[ε_ik ε_kj]₊.
pub fn mutate_matrix(eps: &[Vec<i64>], k: usize) -> Result<Vec<Vec<i64>>, QuiverError> {
    let n = eps.len();
    if k >= n {
        return Err(QuiverError::IndexOutOfRange(k, n));
    }
    for i in 0..n {
        for j in 0..n {
            if eps[i][j] != -eps[j][i] {
                return Err(QuiverError::NotSkewSymmetric);
            }
        }
    }
    let mut out = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = if i == k || j == k {
                -eps[i][j]
            } else {
                eps[i][j] + eps[i][k].signum() * (eps[i][k] * eps[k][j]).max(0)
            };
        }
    }
    Ok(out)
}

/// A seed: a rank-n lattice with a distinguished basis and an integer skew
/// form on the ambient lattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seed {
    pub rank: usize,
    /// Basis vectors as rows, in ambient coordinates.
    pub basis: Vec<Vec<i64>>,
    /// Skew form on the ambient lattice: ⟨u, v⟩ = uᵀ A v.
    pub skew_form: Vec<Vec<i64>>,
}

impl Seed {
    /// Standard seed attached to a triangulation's exchange matrix: the
    /// standard basis, with the form chosen so that ⟨e_i, e_j⟩ = ε_ji. With
    /// this convention the seed-level chart gluing reproduces the flip law for
    /// cluster coordinates (see the teich module tests).
    pub fn from_exchange_matrix(eps: &[Vec<i64>]) -> Result<Seed, QuiverError> {
        let n = eps.len();
        for i in 0..n {
            for j in 0..n {
                if eps[i][j] != -eps[j][i] {
                    return Err(QuiverError::NotSkewSymmetric);
                }
            }
        }
        let basis = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1 } else { 0 }).collect())
            .collect();
        let mut form = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in 0..n {
                form[i][j] = eps[j][i];
            }
        }
        Ok(Seed { rank: n, basis, skew_form: form })
    }

    /// ⟨e_i, e_j⟩ for the current basis.
    pub fn gram(&self) -> Vec<Vec<i64>> {
        let n = self.rank;
        let mut g = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in 0..n {
                g[i][j] = self.pair(&self.basis[i], &self.basis[j]);
            }
        }
        g
    }

    pub fn pair(&self, u: &[i64], v: &[i64]) -> i64 {
        let n = self.rank;
        let mut s = 0i64;
        for i in 0..n {
            if u[i] == 0 {
                continue;
            }
            for j in 0..n {
                s += u[i] * self.skew_form[i][j] * v[j];
            }
        }
        s
    }

    /// |det(basis)| = 1?
    pub fn is_unimodular(&self) -> bool {
        det_bareiss(&self.basis).map_or(false, |d| d.abs() == 1)
    }

    /// Seed isomorphism: same form, bases equal after sorting by a fixed total
    /// order on integer vectors.
    pub fn is_isomorphic_to(&self, other: &Seed) -> bool {
        if self.rank != other.rank || self.skew_form != other.skew_form {
            return false;
        }
        let mut a = self.basis.clone();
        let mut b = other.basis.clone();
        a.sort();
        b.sort();
        a == b
    }
}

/// Seed mutation at index k: e'_k = −e_k, e'_j = e_j + [⟨e_k, e_j⟩]₊ · e_k.
/// The skew form is unchanged.
pub fn mutate_seed(s: &Seed, k: usize) -> Result<Seed, QuiverError> {
    if k >= s.rank {
        return Err(QuiverError::IndexOutOfRange(k, s.rank));
    }
    let g = s.gram();
    let mut basis = Vec::with_capacity(s.rank);
    for j in 0..s.rank {
        if j == k {
            basis.push(s.basis[k].iter().map(|x| -x).collect());
        } else {
            let c = g[k][j].max(0);
            basis.push(
                s.basis[j]
                    .iter()
                    .zip(&s.basis[k])
                    .map(|(x, y)| x + c * y)
                    .collect(),
            );
        }
    }
    let out = Seed { rank: s.rank, basis, skew_form: s.skew_form.clone() };
    debug_assert!(out.is_unimodular());
    Ok(out)
}

/// Integer determinant by fraction-free Gaussian elimination.
fn det_bareiss(m: &[Vec<i64>]) -> Option<i64> {
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            let pivot = (k + 1..n).find(|&r| a[r][k] != 0)?;
            a.swap(k, pivot);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    let d = sign * a[n - 1][n - 1];
    i64::try_from(d).ok()
}
