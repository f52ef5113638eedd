//! Adaptive tracing of straight arcs of the flat structure |√φ dz|.
//!
//! A leg flows dz/dt = dir/λ(z) at unit flat speed, where λ is a branch of
//! √φ continued along the path and `dir` is the constant developed direction
//! (+1 for horizontal, ±i for vertical). Branch continuation picks, at every
//! evaluation, the square root closest to the branch carried so far; steps
//! are kept small relative to the distance to the nearest zero so the branch
//! can never flip silently.

use super::{CriticalData, PolePoint, QdError, RationalQD};
use num_complex::Complex64;

/// Step-control and termination parameters for trajectory tracing.
#[derive(Clone, Debug)]
pub struct TraceParams {
    /// Stop after this much flat length.
    pub max_flat_length: f64,
    /// A trajectory passing within this distance of a zero terminates there.
    pub eps_hit: f64,
    /// |z| beyond which the trajectory has entered the pole at ∞.
    pub r_escape: f64,
    /// Capture radius around a finite pole, as a fraction of its clearance.
    pub pole_capture_factor: f64,
    /// Local error target per unit flat length.
    pub rel_tol: f64,
    /// Hard cap on accepted steps.
    pub max_steps: usize,
    /// Cap on the flat step, for dense output along measurement legs.
    pub max_step: f64,
}

impl Default for TraceParams {
    fn default() -> Self {
        TraceParams {
            max_flat_length: 60.0,
            eps_hit: 1e-6,
            r_escape: 1e3,
            pole_capture_factor: 0.2,
            rel_tol: 1e-10,
            max_steps: 200_000,
            max_step: f64::INFINITY,
        }
    }
}

/// How a traced leg stopped.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StopReason {
    /// Reached the requested flat length.
    Length,
    /// Came within `eps_hit` of the zero with this index.
    HitZero(usize),
    /// Entered the capture region of the pole with this index; the payload is
    /// the matched asymptotic direction, when the pole has direction data.
    IntoPole { pole: usize, direction: Option<usize> },
    /// Exceeded the step budget.
    Truncated,
}

/// A traced leg of constant developed direction.
#[derive(Clone, Debug)]
pub struct Leg {
    pub points: Vec<Complex64>,
    /// Velocity dz/dt = dir/λ at each point (unit flat speed).
    pub velocities: Vec<Complex64>,
    /// Cumulative flat parameter at each point.
    pub ts: Vec<f64>,
    pub end: Complex64,
    /// The branch value λ(end) carried by continuation.
    pub end_sqrt: Complex64,
    pub flat_length: f64,
    /// ∫ λ dz along the leg, by per-step quadrature (independent of the exact
    /// value dir·flat_length).
    pub integral: Complex64,
    pub stop: StopReason,
}

impl Leg {
    /// |∫λdz − dir·length|: conservation of the transverse coordinate.
    pub fn drift(&self, dir: Complex64) -> f64 {
        (self.integral - dir * self.flat_length).norm()
    }
}

/// A public trajectory: a horizontal leg from a starting point.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub leg: Leg,
    /// Max per-step deviation of Im ∫λ dz from its starting value.
    pub im_drift: f64,
}

/// Shared tracer over one differential's critical data.
pub struct Tracer<'a> {
    pub phi: &'a RationalQD,
    pub crit: &'a CriticalData,
    pub params: TraceParams,
}

impl<'a> Tracer<'a> {
    pub fn new(phi: &'a RationalQD, crit: &'a CriticalData, params: TraceParams) -> Self {
        Tracer { phi, crit, params }
    }

    /// The square root of φ(z) closest in direction to `reference`.
    pub fn sqrt_near(&self, z: Complex64, reference: Complex64) -> Complex64 {
        let s = self.phi.eval(z).sqrt();
        if (s - reference).norm_sqr() <= (s + reference).norm_sqr() {
            s
        } else {
            -s
        }
    }

    /// Estimated flat distance from z to the nearest zero.
    fn flat_clearance(&self, z: Complex64) -> f64 {
        let d = self.crit.nearest_zero(z);
        if !d.is_finite() {
            return f64::INFINITY;
        }
        // near a simple zero, flat distance ≈ (2/3)|z−z₀|·√|φ(z)|
        0.666 * d * self.phi.abs(z).sqrt()
    }

    /// Capture radius for a finite pole (∞ uses `r_escape`).
    pub fn finite_capture_radius(&self, pole_idx: usize) -> f64 {
        self.capture_radius(pole_idx)
    }

    fn capture_radius(&self, pole_idx: usize) -> f64 {
        let p = &self.crit.poles[pole_idx];
        match p.location {
            PolePoint::Infinity => f64::INFINITY,
            PolePoint::Finite(zp) => {
                let mut clearance: f64 = f64::INFINITY;
                for &z in &self.crit.zeros {
                    clearance = clearance.min((z - zp).norm());
                }
                for (j, q) in self.crit.poles.iter().enumerate() {
                    if j != pole_idx {
                        if let PolePoint::Finite(zq) = q.location {
                            clearance = clearance.min((zq - zp).norm());
                        }
                    }
                }
                self.params.pole_capture_factor * clearance.min(self.params.r_escape)
            }
        }
    }

    /// Check the termination conditions at z; `skip_zero` suppresses the
    /// hit test against one zero (the one a separatrix just left).
    fn stopped_at(&self, z: Complex64, skip_zero: Option<usize>) -> Option<StopReason> {
        for (i, &z0) in self.crit.zeros.iter().enumerate() {
            if Some(i) == skip_zero {
                continue;
            }
            if (z - z0).norm() < self.params.eps_hit {
                return Some(StopReason::HitZero(i));
            }
        }
        for (i, p) in self.crit.poles.iter().enumerate() {
            match p.location {
                PolePoint::Infinity => {
                    if z.norm() > self.params.r_escape {
                        let dir = classify_direction(z.arg(), &p.directions);
                        return Some(StopReason::IntoPole { pole: i, direction: dir });
                    }
                }
                PolePoint::Finite(zp) => {
                    if (z - zp).norm() < self.capture_radius(i) {
                        let dir = classify_direction((z - zp).arg(), &p.directions);
                        return Some(StopReason::IntoPole { pole: i, direction: dir });
                    }
                }
            }
        }
        None
    }

    /// Flow a leg of developed direction `dir` (|dir| = 1) for at most
    /// `flat_len` of flat length, starting at `start` with branch `sqrt0`.
    pub fn flow(
        &self,
        start: Complex64,
        sqrt0: Complex64,
        dir: Complex64,
        flat_len: f64,
        skip_zero: Option<usize>,
    ) -> Result<Leg, QdError> {
        let mut z = start;
        let mut lam = sqrt0;
        let mut t = 0.0f64;
        let mut integral = Complex64::new(0.0, 0.0);
        let mut points = vec![z];
        let mut velocities = vec![dir / lam];
        let mut ts = vec![0.0f64];
        let mut h = (flat_len / 64.0).min(0.1).min(self.params.max_step);
        let mut stop = StopReason::Length;
        let mut steps = 0usize;
        // allow leaving the starting zero's hit region before testing it
        let mut armed_skip = skip_zero;

        while t < flat_len {
            steps += 1;
            if steps > self.params.max_steps {
                stop = StopReason::Truncated;
                break;
            }
            if lam.norm() < 1e-14 {
                return Err(QdError::BranchTrackingLost(z));
            }
            // keep steps below a fraction of the flat clearance to the zeros
            let clearance = self.flat_clearance(z);
            let h_cap = (0.25 * clearance).max(1e-9).min(self.params.max_step);
            h = h.min(h_cap).min(flat_len - t);

            // one RK4 step and two half steps for error control
            let big = self.rk4(z, lam, dir, h)?;
            let half1 = self.rk4(z, lam, dir, 0.5 * h)?;
            let lam_mid = self.sqrt_near(half1.0, lam);
            let half2 = self.rk4(half1.0, lam_mid, dir, 0.5 * h)?;
            let err = (big.0 - half2.0).norm();
            // per-step budget proportional to h: total error ~ rel_tol·length
            let tol = self.params.rel_tol * (1.0 + z.norm()) * h;
            if err > tol && h > 1e-10 {
                h *= 0.5;
                continue;
            }

            // accept the half-step composition
            let z_new = half2.0;
            let lam_new = self.sqrt_near(z_new, lam_mid);
            // per-step quadrature of ∫λdz over the two chords
            integral += (half1.0 - z) / 6.0
                * (lam + 4.0 * self.sqrt_near(0.5 * (z + half1.0), lam) + lam_mid);
            integral += (z_new - half1.0) / 6.0
                * (lam_mid + 4.0 * self.sqrt_near(0.5 * (half1.0 + z_new), lam_mid) + lam_new);
            z = z_new;
            lam = lam_new;
            t += h;
            points.push(z);
            velocities.push(dir / lam);
            ts.push(t);
            if err < 0.25 * tol {
                h *= 1.6;
            }

            // re-arm the start-zero test once we have left its neighborhood
            if let Some(i) = armed_skip {
                if (z - self.crit.zeros[i]).norm() > 3.0 * self.params.eps_hit {
                    armed_skip = None;
                }
            }
            if let Some(s) = self.stopped_at(z, armed_skip) {
                stop = s;
                break;
            }
        }
        Ok(Leg { points, velocities, ts, end: z, end_sqrt: lam, flat_length: t, integral, stop })
    }

    fn rk4(
        &self,
        z: Complex64,
        lam: Complex64,
        dir: Complex64,
        h: f64,
    ) -> Result<(Complex64, Complex64), QdError> {
        let f = |z: Complex64, lam_ref: Complex64| -> Result<Complex64, QdError> {
            let s = self.sqrt_near(z, lam_ref);
            if s.norm() < 1e-14 {
                return Err(QdError::BranchTrackingLost(z));
            }
            Ok(dir / s)
        };
        let k1 = f(z, lam)?;
        let k2 = f(z + 0.5 * h * k1, lam)?;
        let k3 = f(z + 0.5 * h * k2, lam)?;
        let k4 = f(z + h * k3, lam)?;
        let z_new = z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        Ok((z_new, lam))
    }

    /// The three horizontal ray directions at the zero with index `i`.
    pub fn separatrix_directions(&self, i: usize) -> [f64; 3] {
        let z0 = self.crit.zeros[i];
        // φ ≈ φ'(z₀)(z−z₀): rays where (3/2)ψ + ½·arg φ' ≡ 0 (mod 2π)
        let dphi = self.derivative_at(z0);
        let base = -dphi.arg() / 3.0;
        [
            base.rem_euclid(2.0 * std::f64::consts::PI),
            (base + 2.0 * std::f64::consts::PI / 3.0).rem_euclid(2.0 * std::f64::consts::PI),
            (base + 4.0 * std::f64::consts::PI / 3.0).rem_euclid(2.0 * std::f64::consts::PI),
        ]
    }

    fn derivative_at(&self, z: Complex64) -> Complex64 {
        let n = self.phi.numerator.eval(z);
        let dn = self.phi.numerator.derivative().eval(z);
        let d = self.phi.denominator.eval(z);
        let dd = self.phi.denominator.derivative().eval(z);
        self.phi.scale * (dn * d - n * dd) / (d * d)
    }

    /// Trace the separatrix leaving zero `i` along its `k`-th ray.
    pub fn separatrix(&self, i: usize, k: usize) -> Result<Leg, QdError> {
        let z0 = self.crit.zeros[i];
        let psi = self.separatrix_directions(i)[k];
        let clearance = self.crit.zeros.iter().enumerate().fold(f64::INFINITY, |d, (j, &w)| {
            if j == i {
                d
            } else {
                d.min((w - z0).norm())
            }
        });
        let r0 = (3.0 * self.params.eps_hit).min(0.01 * clearance.min(1.0)).max(1e-7);
        let start = z0 + Complex64::from_polar(r0, psi);
        // pick the branch so the horizontal flow moves outward along e^{iψ}:
        // the velocity is 1/λ, and Re((1/λ)·conj(e^{iψ})) = Re(λ e^{iψ})/|λ|²
        let outward = Complex64::from_polar(1.0, psi);
        let s = self.phi.eval(start).sqrt();
        let lam = if (s * outward).re > 0.0 { s } else { -s };
        let mut leg = self.flow(start, lam, Complex64::new(1.0, 0.0), self.params.max_flat_length, Some(i))?;
        leg.points.insert(0, z0);
        leg.velocities.insert(0, leg.velocities[0]);
        leg.ts.insert(0, leg.ts[0]);
        Ok(leg)
    }

    /// Public horizontal trajectory from `start` with the given branch sign.
    pub fn trace_trajectory(&self, start: Complex64, branch_plus: bool) -> Result<Trajectory, QdError> {
        let s = self.phi.eval(start).sqrt();
        let lam = if branch_plus { s } else { -s };
        let leg = self.flow(start, lam, Complex64::new(1.0, 0.0), self.params.max_flat_length, None)?;
        let im_drift = leg.drift(Complex64::new(1.0, 0.0));
        Ok(Trajectory { leg, im_drift })
    }
}

/// Nearest asymptotic direction to the approach angle, if directions exist.
fn classify_direction(angle: f64, directions: &[f64]) -> Option<usize> {
    if directions.is_empty() {
        return None;
    }
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, &d) in directions.iter().enumerate() {
        let mut diff = (angle - d).rem_euclid(2.0 * std::f64::consts::PI);
        if diff > std::f64::consts::PI {
            diff = 2.0 * std::f64::consts::PI - diff;
        }
        if diff < best_d {
            best_d = diff;
            best = i;
        }
    }
    Some(best)
}
