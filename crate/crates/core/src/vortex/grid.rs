//! Rectangular grid domains with pole excisions.

use super::VortexError;
use crate::qdiff::{CriticalData, PolePoint};
use num_complex::Complex64;

/// Classification of a grid node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeClass {
    /// Unknown of the solve.
    Interior,
    /// Carries boundary data (outer rectangle ring or excision rim).
    Dirichlet,
    /// Inside an excised disk; carries no value.
    Excluded,
}

/// A uniform grid on [x0, x1]×[y0, y1] with disks excised around poles.
#[derive(Clone, Debug)]
pub struct GridDomain {
    pub x0: f64,
    pub y0: f64,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    pub excisions: Vec<(Complex64, f64)>,
    pub class: Vec<NodeClass>,
}

impl GridDomain {
    pub fn new(
        x0: f64,
        x1: f64,
        y0: f64,
        y1: f64,
        h: f64,
        excisions: Vec<(Complex64, f64)>,
    ) -> Result<GridDomain, VortexError> {
        if h <= 0.0 || x1 <= x0 || y1 <= y0 {
            return Err(VortexError::BadDomain("degenerate rectangle or spacing".into()));
        }
        let nx = ((x1 - x0) / h).round() as usize + 1;
        let ny = ((y1 - y0) / h).round() as usize + 1;
        if nx < 5 || ny < 5 {
            return Err(VortexError::BadDomain("grid too coarse".into()));
        }
        let mut class = vec![NodeClass::Interior; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                let idx = j * nx + i;
                if i == 0 || j == 0 || i == nx - 1 || j == ny - 1 {
                    class[idx] = NodeClass::Dirichlet;
                    continue;
                }
                let z = Complex64::new(x0 + i as f64 * h, y0 + j as f64 * h);
                if excisions.iter().any(|(c, r)| (z - c).norm() < *r) {
                    class[idx] = NodeClass::Excluded;
                }
            }
        }
        // interior nodes adjacent to an excluded one become the excision rim
        let mut rim = Vec::new();
        for j in 1..ny - 1 {
            for i in 1..nx - 1 {
                let idx = j * nx + i;
                if class[idx] != NodeClass::Interior {
                    continue;
                }
                let nbrs = [idx - 1, idx + 1, idx - nx, idx + nx];
                if nbrs.iter().any(|&n| class[n] == NodeClass::Excluded) {
                    rim.push(idx);
                }
            }
        }
        for idx in rim {
            class[idx] = NodeClass::Dirichlet;
        }
        Ok(GridDomain { x0, y0, h, nx, ny, excisions, class })
    }

    pub fn point(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.x0 + i as f64 * self.h, self.y0 + j as f64 * self.h)
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// Checks the domain against a differential's critical data: every zero
    /// strictly inside the active region, well away from excisions and the
    /// outer boundary, and |φ| bounded below on the excision rims.
    pub fn validate_for(
        &self,
        crit: &CriticalData,
        phi_abs: impl Fn(Complex64) -> f64,
        min_abs_on_rim: f64,
    ) -> Result<(), VortexError> {
        let x1 = self.x0 + (self.nx - 1) as f64 * self.h;
        let y1 = self.y0 + (self.ny - 1) as f64 * self.h;
        for &z in &crit.zeros {
            let inside = z.re > self.x0 + 3.0 * self.h
                && z.re < x1 - 3.0 * self.h
                && z.im > self.y0 + 3.0 * self.h
                && z.im < y1 - 3.0 * self.h;
            if !inside {
                return Err(VortexError::BadDomain(format!("zero {z} too close to the boundary")));
            }
            for (c, r) in &self.excisions {
                if (z - c).norm() < r + 3.0 * self.h {
                    return Err(VortexError::BadDomain(format!("zero {z} within 3h of an excision")));
                }
            }
        }
        for p in &crit.poles {
            if let PolePoint::Finite(zp) = p.location {
                let in_box = zp.re > self.x0 && zp.re < x1 && zp.im > self.y0 && zp.im < y1;
                if in_box && !self.excisions.iter().any(|(c, r)| (zp - c).norm() < 0.5 * r) {
                    return Err(VortexError::BadDomain(format!("pole {zp} is not excised")));
                }
            }
        }
        for (c, r) in &self.excisions {
            for k in 0..32 {
                let ang = 2.0 * std::f64::consts::PI * k as f64 / 32.0;
                let z = c + Complex64::from_polar(*r, ang);
                if phi_abs(z) < min_abs_on_rim {
                    return Err(VortexError::BadDomain(format!(
                        "|φ| below threshold on the excision circle at {c}"
                    )));
                }
            }
        }
        Ok(())
    }
}
