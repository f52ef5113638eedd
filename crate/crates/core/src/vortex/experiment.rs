//! The length-asymptotics experiment: for the rescaled family R²φ, the
//! alternating half-sum of pullback lengths of the octagon's horizontal sides
//! converges to R·Re Z of the saddle class.

use super::grid::GridDomain;
use super::lengths::leg_pullback_length;
use super::solve::{solve, SolveParams, VortexField};
use super::VortexError;
use crate::qdiff::octagon::{octagon_check, LegKind, Octagon, OctagonMargins};
use crate::qdiff::strips::{strip_decomposition, DecompParams, StripDecomposition};
use crate::qdiff::RationalQD;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Full configuration of one experiment run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Numerator coefficients of φ, ascending, as [re, im] pairs.
    pub numerator: Vec<[f64; 2]>,
    /// Denominator coefficients (defaults to the constant 1).
    #[serde(default = "default_denominator")]
    pub denominator: Vec<[f64; 2]>,
    /// Phase: the experiment runs on e^{2iθ}·φ.
    pub theta: f64,
    /// Strictly increasing scaling parameters R.
    pub r_list: Vec<f64>,
    /// Solve rectangle [x0, x1]×[y0, y1].
    pub domain: [f64; 4],
    /// Grid spacing.
    pub grid_h: f64,
    /// Newton residual target.
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Octagon margins (vertical m, horizontal M).
    #[serde(default = "default_margins")]
    pub margins: [f64; 2],
    /// Which strip's saddle class to measure.
    #[serde(default)]
    pub strip_index: usize,
    /// Verdict tolerance: the final ratio must land in [1−ε, 1+ε].
    #[serde(default = "default_ratio_eps")]
    pub ratio_eps: f64,
}

fn default_denominator() -> Vec<[f64; 2]> {
    vec![[1.0, 0.0]]
}
fn default_tol() -> f64 {
    1e-10
}
fn default_margins() -> [f64; 2] {
    [0.35, 0.6]
}
fn default_ratio_eps() -> f64 {
    0.1
}

impl ExperimentConfig {
    /// The θ = −0.3 family of (z²−1)dz² on [−4,4]²: the bundled default.
    pub fn default_square_family() -> ExperimentConfig {
        ExperimentConfig {
            numerator: vec![[-1.0, 0.0], [0.0, 0.0], [1.0, 0.0]],
            denominator: default_denominator(),
            theta: -0.3,
            r_list: vec![2.0, 4.0, 6.0, 8.0],
            domain: [-4.0, 4.0, -4.0, 4.0],
            grid_h: 0.02,
            tol: 1e-10,
            margins: default_margins(),
            strip_index: 0,
            ratio_eps: 0.1,
        }
    }

    pub fn validate(&self) -> Result<(), VortexError> {
        if self.grid_h <= 0.0 || self.tol <= 0.0 || self.margins.iter().any(|m| *m <= 0.0) {
            return Err(VortexError::BadConfig("tolerances and margins must be positive".into()));
        }
        if self.r_list.is_empty() || self.r_list.windows(2).any(|p| p[0] >= p[1]) {
            return Err(VortexError::BadConfig("r_list must be strictly increasing".into()));
        }
        Ok(())
    }

    pub fn differential(&self) -> RationalQD {
        let to_poly = |c: &[[f64; 2]]| {
            crate::cpoly::CPoly::new(c.iter().map(|p| Complex64::new(p[0], p[1])).collect())
        };
        RationalQD::new(to_poly(&self.numerator), to_poly(&self.denominator)).rotated(self.theta)
    }
}

/// One measured row of the experiment table.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentRow {
    pub r: f64,
    /// S(R) = Σ (−1)^i · (pullback length of σ_i)/2.
    pub s: f64,
    pub r_re_z: f64,
    /// |S(R) − R·Re Z|.
    pub deviation: f64,
    /// exp(S(R) − R·Re Z): the asymptotic-theorem diagnostic.
    pub ratio: f64,
    /// Pullback lengths of the vertical sides ρ_1..ρ_4.
    pub vertical_lengths: [f64; 4],
    pub newton_iters: usize,
    pub residual: f64,
}

/// The experiment output: the table plus the verdict data.
#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub rows: Vec<ExperimentRow>,
    pub re_z: f64,
    pub octagon: Octagon,
    pub decomposition: StripDecomposition,
    /// Deviations strictly decrease and the final ratio is within ratio_eps.
    pub verdict_pass: bool,
}

/// Runs the full pipeline: decomposition, octagon, one vortex solve per R,
/// and the alternating-half-length measurement.
pub fn asymptotic_experiment(config: &ExperimentConfig) -> Result<ExperimentResult, VortexError> {
    config.validate()?;
    let phi = config.differential();
    let decomp_params = DecompParams::default();
    let dec = strip_decomposition(&phi, &decomp_params).map_err(VortexError::Differential)?;
    if config.strip_index >= dec.strips.len() {
        return Err(VortexError::BadConfig(format!(
            "strip index {} out of range ({} strips)",
            config.strip_index,
            dec.strips.len()
        )));
    }
    let strip = &dec.strips[config.strip_index];
    let margins = OctagonMargins { vertical: config.margins[0], horizontal: config.margins[1] };
    // dense leg output so the trajectory-aware length quadrature resolves w̃
    let mut measure_trace = decomp_params.trace.clone();
    measure_trace.max_step = 2e-3;
    let octagon = octagon_check(&phi, &dec.crit, strip, margins, &measure_trace)
        .map_err(VortexError::Differential)?;
    let re_z = strip.period.re;

    let [x0, x1, y0, y1] = config.domain;
    let dom = GridDomain::new(x0, x1, y0, y1, config.grid_h, vec![])?;
    dom.validate_for(&dec.crit, |z| phi.abs(z), 1e-12)?;

    let solve_params = SolveParams { tol: config.tol, ..SolveParams::default() };
    let mut rows = Vec::new();
    for &r in &config.r_list {
        let phi_r = phi.scaled(Complex64::new(r * r, 0.0));
        let field = solve(&dom, |x, y| phi_r.eval(Complex64::new(x, y)).norm_sqr(), &solve_params)?;
        let row = measure(&field, &octagon, r, re_z)?;
        rows.push(row);
    }
    let decreasing = rows.windows(2).all(|p| p[1].deviation < p[0].deviation);
    let last_ratio = rows.last().map(|r| r.ratio).unwrap_or(f64::NAN);
    let verdict_pass = decreasing && (last_ratio - 1.0).abs() <= config.ratio_eps;
    Ok(ExperimentResult { rows, re_z, octagon, decomposition: dec, verdict_pass })
}

/// S(R) and the per-side pullback lengths for one solved field.
pub fn measure(
    field: &VortexField,
    octagon: &Octagon,
    r: f64,
    re_z: f64,
) -> Result<ExperimentRow, VortexError> {
    let mut s = 0.0;
    let mut vertical = [0.0f64; 4];
    for leg in &octagon.legs {
        match leg.kind {
            LegKind::Horizontal(i) => {
                let len = leg_pullback_length(field, true, r, &leg.points, &leg.ts)?;
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                s += sign * 0.5 * len;
            }
            LegKind::Vertical(i) => {
                vertical[i - 1] = leg_pullback_length(field, false, r, &leg.points, &leg.ts)?;
            }
        }
    }
    let r_re_z = r * re_z;
    Ok(ExperimentRow {
        r,
        s,
        r_re_z,
        deviation: (s - r_re_z).abs(),
        ratio: (s - r_re_z).exp(),
        vertical_lengths: vertical,
        newton_iters: field.newton_iters,
        residual: field.residual,
    })
}
