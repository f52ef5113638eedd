//! Damped Newton solve of Δw = e^{2w} − |φ|²e^{−2w} on a masked grid.
//!
//! The linearization Δ − diag(2e^{2w} + 2|φ|²e^{−2w}) is symmetric negative
//! definite, so each Newton step solves an SPD system (−Δ + D)δ = F by
//! conjugate gradients preconditioned with one geometric multigrid V-cycle
//! (red-black Gauss–Seidel smoothing, full-weighting restriction, bilinear
//! prolongation). Everything runs in fixed sweep orders for determinism.

use super::grid::{GridDomain, NodeClass};
use super::VortexError;

/// Convergence targets for the nonlinear solve.
#[derive(Clone, Copy, Debug)]
pub struct SolveParams {
    /// Newton stops when ‖F(w)‖∞ drops below this.
    pub tol: f64,
    pub max_newton: usize,
    /// Relative residual for the inner linear solves.
    pub linear_tol: f64,
    pub max_cg: usize,
}

impl Default for SolveParams {
    fn default() -> Self {
        SolveParams { tol: 1e-10, max_newton: 60, linear_tol: 1e-10, max_cg: 400 }
    }
}

/// The converged field w = ½ log H with its diagnostics.
#[derive(Clone, Debug)]
pub struct VortexField {
    pub dom: GridDomain,
    /// w on all nodes (Dirichlet data included; excluded nodes hold 0).
    pub w: Vec<f64>,
    /// |φ|² on all nodes.
    pub absphi2: Vec<f64>,
    pub residual: f64,
    pub newton_iters: usize,
    pub cg_iters_total: usize,
}

impl VortexField {
    /// w̃ = w − ½ log|φ| at a node.
    pub fn w_tilde(&self, idx: usize) -> f64 {
        self.w[idx] - 0.25 * self.absphi2[idx].ln()
    }

    /// Jacobian density J = e^{2w} − |φ|² e^{−2w} at a node.
    pub fn jacobian_density(&self, idx: usize) -> f64 {
        (2.0 * self.w[idx]).exp() - self.absphi2[idx] * (-2.0 * self.w[idx]).exp()
    }

    /// Energy density e = H + L = e^{2w} + |φ|² e^{−2w}.
    pub fn energy_density(&self, idx: usize) -> f64 {
        (2.0 * self.w[idx]).exp() + self.absphi2[idx] * (-2.0 * self.w[idx]).exp()
    }

    /// Bilinear interpolation of w at a point; `None` when the cell touches an
    /// excluded node or leaves the grid.
    pub fn interp_w(&self, x: f64, y: f64) -> Option<f64> {
        let gx = (x - self.dom.x0) / self.dom.h;
        let gy = (y - self.dom.y0) / self.dom.h;
        if gx < 0.0 || gy < 0.0 {
            return None;
        }
        let i = gx.floor() as usize;
        let j = gy.floor() as usize;
        if i + 1 >= self.dom.nx || j + 1 >= self.dom.ny {
            return None;
        }
        let (fx, fy) = (gx - i as f64, gy - j as f64);
        let mut val = 0.0;
        for (di, dj, wgt) in [
            (0, 0, (1.0 - fx) * (1.0 - fy)),
            (1, 0, fx * (1.0 - fy)),
            (0, 1, (1.0 - fx) * fy),
            (1, 1, fx * fy),
        ] {
            let idx = self.dom.index(i + di, j + dj);
            if self.dom.class[idx] == NodeClass::Excluded {
                return None;
            }
            val += wgt * self.w[idx];
        }
        Some(val)
    }
}

/// Solves the vortex equation with Dirichlet data w = ½ log|φ| on the outer
/// rectangle and excision rims. `absphi2` evaluates |φ(z)|².
pub fn solve(
    dom: &GridDomain,
    absphi2: impl Fn(f64, f64) -> f64 + Copy,
    params: &SolveParams,
) -> Result<VortexField, VortexError> {
    let boundary = |x: f64, y: f64| 0.25 * absphi2(x, y).ln();
    solve_with_boundary(dom, absphi2, boundary, params)
}

/// Solve with explicit Dirichlet data (used by manufactured-solution checks).
pub fn solve_with_boundary(
    dom: &GridDomain,
    absphi2: impl Fn(f64, f64) -> f64,
    boundary: impl Fn(f64, f64) -> f64,
    params: &SolveParams,
) -> Result<VortexField, VortexError> {
    let n = dom.nx * dom.ny;
    let mut f = vec![0.0; n];
    for j in 0..dom.ny {
        for i in 0..dom.nx {
            let z = dom.point(i, j);
            f[dom.index(i, j)] = absphi2(z.re, z.im);
        }
    }
    let fmax = f.iter().cloned().fold(0.0f64, f64::max);
    if !(fmax > 0.0) {
        return Err(VortexError::BadDomain("|φ|² vanishes on the whole grid".into()));
    }
    // regularized initializer ½ log(|φ| + δ); exact data on Dirichlet nodes
    let delta = 1e-6 * fmax.sqrt();
    let mut w = vec![0.0; n];
    for j in 0..dom.ny {
        for i in 0..dom.nx {
            let idx = dom.index(i, j);
            match dom.class[idx] {
                NodeClass::Interior => w[idx] = (f[idx].sqrt() + delta).ln() * 0.5,
                NodeClass::Dirichlet => {
                    let z = dom.point(i, j);
                    w[idx] = boundary(z.re, z.im);
                }
                NodeClass::Excluded => w[idx] = 0.0,
            }
        }
    }

    let hierarchy = Hierarchy::build(dom);
    let mut res = vec![0.0; n];
    residual(dom, &w, &f, &mut res);
    let mut rnorm = inf_norm(&res);
    let mut newton_iters = 0;
    let mut cg_total = 0;
    while rnorm > params.tol {
        newton_iters += 1;
        if newton_iters > params.max_newton {
            return Err(VortexError::NewtonDiverged(rnorm));
        }
        // D = 2e^{2w} + 2|φ|²e^{−2w}
        let diag: Vec<f64> = (0..n)
            .map(|idx| 2.0 * (2.0 * w[idx]).exp() + 2.0 * f[idx] * (-2.0 * w[idx]).exp())
            .collect();
        let (delta_w, iters) = pcg(&hierarchy, &diag, &res, params)?;
        cg_total += iters;
        // damped update with a sufficient-decrease backtrack
        let mut alpha = 1.0;
        let mut trial = vec![0.0; n];
        loop {
            for idx in 0..n {
                trial[idx] = w[idx] + alpha * delta_w[idx];
            }
            residual(dom, &trial, &f, &mut res);
            let tnorm = inf_norm(&res);
            if tnorm <= (1.0 - 0.25 * alpha) * rnorm || tnorm <= params.tol {
                w.copy_from_slice(&trial);
                rnorm = tnorm;
                break;
            }
            alpha *= 0.5;
            if alpha < 1e-6 {
                return Err(VortexError::NewtonDiverged(rnorm));
            }
        }
    }
    Ok(VortexField {
        dom: dom.clone(),
        w,
        absphi2: f,
        residual: rnorm,
        newton_iters,
        cg_iters_total: cg_total,
    })
}

/// F(w) = Δ_h w − e^{2w} + |φ|² e^{−2w} on interior nodes, 0 elsewhere.
pub fn residual(dom: &GridDomain, w: &[f64], f: &[f64], out: &mut [f64]) {
    let (nx, ny) = (dom.nx, dom.ny);
    let h2 = dom.h * dom.h;
    for idx in 0..out.len() {
        out[idx] = 0.0;
    }
    for j in 1..ny - 1 {
        for i in 1..nx - 1 {
            let idx = j * nx + i;
            if dom.class[idx] != NodeClass::Interior {
                continue;
            }
            let lap = (w[idx - 1] + w[idx + 1] + w[idx - nx] + w[idx + nx] - 4.0 * w[idx]) / h2;
            out[idx] = lap - (2.0 * w[idx]).exp() + f[idx] * (-2.0 * w[idx]).exp();
        }
    }
}

/// Directional derivative of F at w: (Δ_h − diag(D))·v with v = 0 off-interior.
pub fn jacobian_apply(dom: &GridDomain, w: &[f64], f: &[f64], v: &[f64], out: &mut [f64]) {
    let (nx, ny) = (dom.nx, dom.ny);
    let h2 = dom.h * dom.h;
    for idx in 0..out.len() {
        out[idx] = 0.0;
    }
    let val = |idx: usize| if dom.class[idx] == NodeClass::Interior { v[idx] } else { 0.0 };
    for j in 1..ny - 1 {
        for i in 1..nx - 1 {
            let idx = j * nx + i;
            if dom.class[idx] != NodeClass::Interior {
                continue;
            }
            let d = 2.0 * (2.0 * w[idx]).exp() + 2.0 * f[idx] * (-2.0 * w[idx]).exp();
            let lap =
                (val(idx - 1) + val(idx + 1) + val(idx - nx) + val(idx + nx) - 4.0 * val(idx)) / h2;
            out[idx] = lap - d * val(idx);
        }
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

// ---------------------------------------------------------------------------
// linear algebra: PCG with a geometric multigrid V-cycle preconditioner
// ---------------------------------------------------------------------------

struct Level {
    nx: usize,
    ny: usize,
    h: f64,
    interior: Vec<bool>,
    diag: Vec<f64>, // the D part; (4/h² + D) is the full diagonal
}

struct Hierarchy {
    levels: Vec<Level>,
}

impl Hierarchy {
    fn build(dom: &GridDomain) -> Hierarchy {
        let mut levels = vec![Level {
            nx: dom.nx,
            ny: dom.ny,
            h: dom.h,
            interior: dom.class.iter().map(|c| *c == NodeClass::Interior).collect(),
            diag: vec![0.0; dom.nx * dom.ny],
        }];
        loop {
            let last = levels.last().unwrap();
            if (last.nx - 1) % 2 != 0 || (last.ny - 1) % 2 != 0 {
                break;
            }
            let (nxc, nyc) = ((last.nx - 1) / 2 + 1, (last.ny - 1) / 2 + 1);
            if nxc < 5 || nyc < 5 {
                break;
            }
            let mut interior = vec![false; nxc * nyc];
            for jc in 1..nyc - 1 {
                for ic in 1..nxc - 1 {
                    interior[jc * nxc + ic] = last.interior[(2 * jc) * last.nx + 2 * ic];
                }
            }
            levels.push(Level { nx: nxc, ny: nyc, h: last.h * 2.0, interior, diag: vec![0.0; nxc * nyc] });
        }
        Hierarchy { levels }
    }

    /// Refresh the D coefficients on every level by decimating the fine D.
    fn set_diag(&mut self, diag_fine: &[f64]) {
        self.levels[0].diag.copy_from_slice(diag_fine);
        for l in 1..self.levels.len() {
            let (head, tail) = self.levels.split_at_mut(l);
            let fine = &head[l - 1];
            let coarse = &mut tail[0];
            for jc in 0..coarse.ny {
                for ic in 0..coarse.nx {
                    coarse.diag[jc * coarse.nx + ic] = fine.diag[(2 * jc) * fine.nx + 2 * ic];
                }
            }
        }
    }
}

/// One red-black Gauss–Seidel sweep pair on A u = b, A = −Δ + D.
fn rbgs(level: &Level, u: &mut [f64], b: &[f64], sweeps: usize) {
    let (nx, ny) = (level.nx, level.ny);
    let h2 = level.h * level.h;
    for _ in 0..sweeps {
        for color in 0..2 {
            for j in 1..ny - 1 {
                let i0 = 1 + (j + color + 1) % 2;
                let mut i = i0;
                while i < nx - 1 {
                    let idx = j * nx + i;
                    if level.interior[idx] {
                        let nb = neighbor_sum(level, u, idx, nx);
                        u[idx] = (b[idx] + nb / h2) / (4.0 / h2 + level.diag[idx]);
                    }
                    i += 2;
                }
            }
        }
    }
}

#[inline]
fn neighbor_sum(level: &Level, u: &[f64], idx: usize, nx: usize) -> f64 {
    let pick = |k: usize| if level.interior[k] { u[k] } else { 0.0 };
    pick(idx - 1) + pick(idx + 1) + pick(idx - nx) + pick(idx + nx)
}

fn apply_a(level: &Level, u: &[f64], out: &mut [f64]) {
    let (nx, ny) = (level.nx, level.ny);
    let h2 = level.h * level.h;
    for v in out.iter_mut() {
        *v = 0.0;
    }
    for j in 1..ny - 1 {
        for i in 1..nx - 1 {
            let idx = j * nx + i;
            if level.interior[idx] {
                let nb = neighbor_sum(level, u, idx, nx);
                out[idx] = (4.0 * u[idx] - nb) / h2 + level.diag[idx] * u[idx];
            }
        }
    }
}

fn vcycle(levels: &[Level], l: usize, u: &mut [f64], b: &[f64]) {
    let level = &levels[l];
    if l + 1 == levels.len() {
        rbgs(level, u, b, 30);
        return;
    }
    rbgs(level, u, b, 2);
    // fine residual
    let mut au = vec![0.0; u.len()];
    apply_a(level, u, &mut au);
    let mut r = vec![0.0; u.len()];
    for idx in 0..u.len() {
        if level.interior[idx] {
            r[idx] = b[idx] - au[idx];
        }
    }
    // restrict (full weighting over interior nodes)
    let coarse = &levels[l + 1];
    let mut bc = vec![0.0; coarse.nx * coarse.ny];
    for jc in 1..coarse.ny - 1 {
        for ic in 1..coarse.nx - 1 {
            let idxc = jc * coarse.nx + ic;
            if !coarse.interior[idxc] {
                continue;
            }
            let (i, j) = (2 * ic, 2 * jc);
            let at = |di: isize, dj: isize| -> f64 {
                let k = (j as isize + dj) as usize * level.nx + (i as isize + di) as usize;
                if level.interior[k] {
                    r[k]
                } else {
                    0.0
                }
            };
            bc[idxc] = 0.25 * at(0, 0)
                + 0.125 * (at(1, 0) + at(-1, 0) + at(0, 1) + at(0, -1))
                + 0.0625 * (at(1, 1) + at(1, -1) + at(-1, 1) + at(-1, -1));
        }
    }
    let mut uc = vec![0.0; bc.len()];
    vcycle(levels, l + 1, &mut uc, &bc);
    // prolong (bilinear) and correct
    for jc in 0..coarse.ny {
        for ic in 0..coarse.nx {
            let idxc = jc * coarse.nx + ic;
            if !coarse.interior[idxc] {
                continue;
            }
            let v = uc[idxc];
            let (i, j) = (2 * ic, 2 * jc);
            let mut add = |ii: isize, jj: isize, wgt: f64| {
                if ii >= 0 && jj >= 0 && (ii as usize) < level.nx && (jj as usize) < level.ny {
                    let k = jj as usize * level.nx + ii as usize;
                    if level.interior[k] {
                        u[k] += wgt * v;
                    }
                }
            };
            add(i as isize, j as isize, 1.0);
            add(i as isize + 1, j as isize, 0.5);
            add(i as isize - 1, j as isize, 0.5);
            add(i as isize, j as isize + 1, 0.5);
            add(i as isize, j as isize - 1, 0.5);
            add(i as isize + 1, j as isize + 1, 0.25);
            add(i as isize + 1, j as isize - 1, 0.25);
            add(i as isize - 1, j as isize + 1, 0.25);
            add(i as isize - 1, j as isize - 1, 0.25);
        }
    }
    rbgs(level, u, b, 2);
}

/// PCG on (−Δ + D)·δ = rhs, preconditioned by one V-cycle.
fn pcg(
    hierarchy: &Hierarchy,
    diag: &[f64],
    rhs: &[f64],
    params: &SolveParams,
) -> Result<(Vec<f64>, usize), VortexError> {
    let mut hier_local = Hierarchy { levels: Vec::new() };
    // rebuild light-weight: reuse the structural hierarchy, refresh diag
    hier_local.levels = hierarchy
        .levels
        .iter()
        .map(|l| Level {
            nx: l.nx,
            ny: l.ny,
            h: l.h,
            interior: l.interior.clone(),
            diag: vec![0.0; l.nx * l.ny],
        })
        .collect();
    hier_local.set_diag(diag);
    let levels = &hier_local.levels;
    let fine = &levels[0];
    let n = rhs.len();
    let dot = |a: &[f64], b: &[f64]| -> f64 {
        let mut s = 0.0;
        for idx in 0..n {
            if fine.interior[idx] {
                s += a[idx] * b[idx];
            }
        }
        s
    };
    let mut x = vec![0.0; n];
    let mut r = rhs.to_vec();
    for idx in 0..n {
        if !fine.interior[idx] {
            r[idx] = 0.0;
        }
    }
    let rhs_norm = dot(&r, &r).sqrt();
    if rhs_norm == 0.0 {
        return Ok((x, 0));
    }
    let mut z = vec![0.0; n];
    vcycle(levels, 0, &mut z, &r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 1..=params.max_cg {
        apply_a(fine, &p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(VortexError::LinearSolveFailed("lost positive definiteness".into()));
        }
        let alpha = rz / pap;
        for idx in 0..n {
            if fine.interior[idx] {
                x[idx] += alpha * p[idx];
                r[idx] -= alpha * ap[idx];
            }
        }
        let rnorm = dot(&r, &r).sqrt();
        if rnorm <= params.linear_tol * rhs_norm {
            // the Newton step solves (−Δ+D)δ = F, i.e. J·δ = −F
            return Ok((x, it));
        }
        for v in z.iter_mut() {
            *v = 0.0;
        }
        vcycle(levels, 0, &mut z, &r);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for idx in 0..n {
            if fine.interior[idx] {
                p[idx] = z[idx] + beta * p[idx];
            }
        }
    }
    Err(VortexError::LinearSolveFailed("PCG iteration cap reached".into()))
}
