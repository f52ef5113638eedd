//! JSON wire formats for triangulations, quivers, seeds, chart points, and
//! differentials.
//!
//! Triangulations use edge ids 0..n−1 for arcs and n..n+s−1 for boundary
//! segments, with self-folded triangles spelled out as
//! `{"kind": "selffolded", "edges": {"internal": …, "encircling": …}}`.

use crate::cpoly::CPoly;
use crate::quiver::{Potential, Quiver, Seed};
use crate::surface::{
    EdgeRef, IdealTriangulation, MarkedBorderedSurface, Signing, TaggedTriangulation, Triangle,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad triangulation payload: {0}")]
    BadTriangulation(String),
    #[error(transparent)]
    Surface(#[from] crate::surface::SurfaceError),
    #[error(transparent)]
    Complex(#[from] crate::surface::TriangulationError),
    #[error(transparent)]
    Tagged(#[from] crate::surface::TaggedError),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum TriangleDto {
    Ordinary { edges: [usize; 3] },
    Selffolded { edges: SelfFoldedEdges },
}

#[derive(Serialize, Deserialize)]
struct SelfFoldedEdges {
    internal: usize,
    encircling: usize,
}

/// The on-disk schema for (tagged) triangulations.
#[derive(Serialize, Deserialize)]
pub struct TriangulationDto {
    surface: MarkedBorderedSurface,
    triangles: Vec<TriangleDto>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    signing: BTreeMap<String, i8>,
}

pub fn triangulation_to_json(t: &IdealTriangulation, signing: Option<&Signing>) -> TriangulationDto {
    let n = t.n_arcs;
    let enc = |e: EdgeRef| match e {
        EdgeRef::Arc(a) => a,
        EdgeRef::Boundary(b) => n + b,
    };
    let triangles = t
        .triangles
        .iter()
        .map(|tri| match tri.self_folded() {
            Some((internal, encircling)) => TriangleDto::Selffolded {
                edges: SelfFoldedEdges { internal, encircling },
            },
            None => TriangleDto::Ordinary { edges: [enc(tri.0[0]), enc(tri.0[1]), enc(tri.0[2])] },
        })
        .collect();
    let signing = signing
        .map(|s| s.0.iter().enumerate().map(|(i, &v)| (i.to_string(), v)).collect())
        .unwrap_or_default();
    TriangulationDto { surface: t.surface.clone(), triangles, signing }
}

pub fn triangulation_from_json(dto: &TriangulationDto) -> Result<TaggedTriangulation, IoError> {
    let n = dto.surface.arc_count()?;
    let total_edges = n + dto.surface.total_boundary_marked();
    let dec = |id: usize| -> Result<EdgeRef, IoError> {
        if id < n {
            Ok(EdgeRef::Arc(id))
        } else if id < total_edges {
            Ok(EdgeRef::Boundary(id - n))
        } else {
            Err(IoError::BadTriangulation(format!("edge id {id} out of range")))
        }
    };
    let mut triangles = Vec::new();
    for t in &dto.triangles {
        match t {
            TriangleDto::Ordinary { edges } => {
                triangles.push(Triangle([dec(edges[0])?, dec(edges[1])?, dec(edges[2])?]));
            }
            TriangleDto::Selffolded { edges } => {
                if edges.internal >= n || edges.encircling >= n {
                    return Err(IoError::BadTriangulation(
                        "self-folded edges must be arcs".into(),
                    ));
                }
                triangles.push(Triangle([
                    EdgeRef::Arc(edges.encircling),
                    EdgeRef::Arc(edges.internal),
                    EdgeRef::Arc(edges.internal),
                ]));
            }
        }
    }
    let tri = IdealTriangulation::new(dto.surface.clone(), triangles)?;
    let mut signing = Signing::all_plus(tri.surface.punctures);
    for (key, val) in &dto.signing {
        let idx: usize = key
            .parse()
            .map_err(|_| IoError::BadTriangulation(format!("bad puncture id {key}")))?;
        if idx >= signing.0.len() {
            return Err(IoError::BadTriangulation(format!("puncture id {idx} out of range")));
        }
        signing.0[idx] = *val;
    }
    Ok(TaggedTriangulation::new(tri, signing)?)
}

/// Quiver + potential payload.
#[derive(Serialize, Deserialize)]
pub struct QuiverDto {
    pub vertices: usize,
    pub arrows: Vec<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential: Option<Vec<(i64, Vec<usize>)>>,
}

pub fn quiver_to_json(q: &Quiver, w: Option<&Potential>) -> QuiverDto {
    QuiverDto {
        vertices: q.vertices,
        arrows: q.arrows.iter().map(|a| [a.source, a.target]).collect(),
        potential: w.map(|w| w.terms.clone()),
    }
}

/// Seed payload: basis rows as integer matrices.
#[derive(Serialize, Deserialize)]
pub struct SeedDto {
    pub rank: usize,
    pub basis: Vec<Vec<i64>>,
    pub skew_form: Vec<Vec<i64>>,
}

impl From<&Seed> for SeedDto {
    fn from(s: &Seed) -> SeedDto {
        SeedDto { rank: s.rank, basis: s.basis.clone(), skew_form: s.skew_form.clone() }
    }
}

impl From<SeedDto> for Seed {
    fn from(d: SeedDto) -> Seed {
        Seed { rank: d.rank, basis: d.basis, skew_form: d.skew_form }
    }
}

/// Chart point payload.
#[derive(Serialize, Deserialize)]
pub struct ChartPointDto {
    pub chart_id: String,
    pub coords: BTreeMap<String, f64>,
}

pub fn chart_point_to_json(chart_id: &str, coords: &[f64]) -> ChartPointDto {
    ChartPointDto {
        chart_id: chart_id.to_string(),
        coords: coords.iter().enumerate().map(|(i, &x)| (i.to_string(), x)).collect(),
    }
}

/// Differential payload: ascending coefficient lists as [re, im] pairs.
#[derive(Serialize, Deserialize)]
pub struct DifferentialDto {
    pub numerator: Vec<[f64; 2]>,
    #[serde(default = "one_poly")]
    pub denominator: Vec<[f64; 2]>,
    #[serde(default)]
    pub theta: f64,
}

fn one_poly() -> Vec<[f64; 2]> {
    vec![[1.0, 0.0]]
}

impl DifferentialDto {
    pub fn to_differential(&self) -> crate::qdiff::RationalQD {
        let conv = |c: &[[f64; 2]]| CPoly::new(c.iter().map(|p| Complex64::new(p[0], p[1])).collect());
        crate::qdiff::RationalQD::new(conv(&self.numerator), conv(&self.denominator))
            .rotated(self.theta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::catalog;

    #[test]
    fn triangulation_round_trip() {
        for t in [
            catalog::polygon(5),
            catalog::once_punctured_torus(),
            catalog::once_punctured_digon_selffolded(),
        ] {
            let signing = Signing(vec![-1; t.surface.punctures]);
            let dto = triangulation_to_json(&t, Some(&signing));
            let text = serde_json::to_string(&dto).unwrap();
            let parsed: TriangulationDto = serde_json::from_str(&text).unwrap();
            let tagged = triangulation_from_json(&parsed).unwrap();
            assert!(tagged.triangulation().structurally_equal(&t));
            assert_eq!(tagged.signing().0, signing.0);
        }
    }

    #[test]
    fn self_folded_schema_shape() {
        let t = catalog::once_punctured_digon_selffolded();
        let dto = triangulation_to_json(&t, None);
        let text = serde_json::to_string(&dto).unwrap();
        assert!(text.contains("\"selffolded\""));
        assert!(text.contains("\"internal\":0"));
        assert!(text.contains("\"encircling\":1"));
    }

    #[test]
    fn bad_edge_ids_rejected() {
        let text = r#"{"surface":{"genus":0,"boundary":[4],"punctures":0},
            "triangles":[{"kind":"ordinary","edges":[0,1,9]},
                         {"kind":"ordinary","edges":[0,3,4]}]}"#;
        let dto: TriangulationDto = serde_json::from_str(text).unwrap();
        assert!(triangulation_from_json(&dto).is_err());
    }
}
