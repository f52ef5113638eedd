//! Command-line driver: triangulation combinatorics, quiver mutation, the
//! trajectory/period engine, and the vortex experiments, with JSON/CSV/SVG
//! outputs.
//!
//! Exit codes: 0 success, 2 validation error, 3 numerical failure.

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::{Path, PathBuf};

use teichflow::io::{
    chart_point_to_json, quiver_to_json, triangulation_from_json, triangulation_to_json,
    DifferentialDto, SeedDto, TriangulationDto,
};
use teichflow::qdiff::octagon::{octagon_check, OctagonMargins};
use teichflow::qdiff::strips::{strip_decomposition, wkb_triangulation, DecompParams};
use teichflow::qdiff::QdError;
use teichflow::quiver::{mutate_matrix, mutate_seed, potential_from_triangulation, Seed};
use teichflow::render::render_decomposition;
use teichflow::surface::{catalog, enumerate_flip_graph};
use teichflow::teich::mutate_chart;
use teichflow::vortex::{
    asymptotic_experiment, decay_profile, solve, ExperimentConfig, GridDomain, NodeClass,
    SolveParams, VortexError,
};

#[derive(Parser)]
#[command(name = "teichflow", about = "Flat geometry of quadratic differentials on the sphere")]
struct Cli {
    /// Output directory for generated files (defaults to stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a catalog triangulation and enumerate its flip graph.
    Triangulate(TriangulateArgs),
    /// Flip an arc of a triangulation (JSON in, JSON out).
    Flip(FlipArgs),
    /// Quiver and canonical potential of a triangulation.
    Quiver(QuiverArgs),
    /// Mutate an exchange matrix, a seed, or a seed chart point.
    Mutate(MutateArgs),
    /// Strip decomposition and WKB triangulation of a differential.
    Wkb(WkbArgs),
    /// Periods of the standard saddle classes.
    Periods(WkbArgs),
    /// The octagon contour identity, optionally swept over random configs.
    Octagon(OctagonArgs),
    /// One vortex-equation solve with diagnostics.
    Vortex(ConfigArgs),
    /// The full length-asymptotics experiment (CSV + verdict).
    Asymptotics(ConfigArgs),
}

#[derive(Args)]
struct TriangulateArgs {
    /// Catalog surface: disk:K, punctured-disk:K, torus, annulus, digon-selffolded.
    #[arg(long)]
    surface: String,
    /// Skip the flip-graph enumeration.
    #[arg(long)]
    no_enumerate: bool,
}

#[derive(Args)]
struct FlipArgs {
    /// Triangulation JSON file.
    #[arg(long)]
    triangulation: PathBuf,
    /// Arc index to flip.
    #[arg(long)]
    arc: usize,
}

#[derive(Args)]
struct QuiverArgs {
    #[arg(long)]
    triangulation: PathBuf,
}

#[derive(Args)]
struct MutateArgs {
    /// JSON file holding either an exchange matrix [[…]] or a seed object.
    #[arg(long)]
    input: PathBuf,
    /// Mutation index.
    #[arg(long)]
    k: usize,
    /// Optional positive chart coordinates (comma separated) to transport.
    #[arg(long, value_delimiter = ',')]
    coords: Vec<f64>,
}

#[derive(Args)]
struct WkbArgs {
    /// Differential JSON file ({"numerator": …, "denominator": …, "theta": …}).
    #[arg(long)]
    differential: PathBuf,
    /// Extra phase added to the file's theta.
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    /// Root-finding tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Also write an SVG of the separatrix plot.
    #[arg(long)]
    svg: bool,
}

#[derive(Args)]
struct OctagonArgs {
    #[command(flatten)]
    wkb: WkbArgs,
    /// Vertical margin of the octagon.
    #[arg(long, default_value_t = 0.35)]
    margin_v: f64,
    /// Horizontal margin of the octagon.
    #[arg(long, default_value_t = 0.6)]
    margin_h: f64,
    /// Randomized (θ, margin) sweep size; 0 runs only the given config.
    #[arg(long, default_value_t = 0)]
    sweep: usize,
    /// RNG seed for the sweep.
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

#[derive(Args)]
struct ConfigArgs {
    /// Experiment config JSON.
    #[arg(long)]
    config: PathBuf,
    /// Override the grid spacing.
    #[arg(long)]
    grid_h: Option<f64>,
    /// Override the Newton tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Also write an SVG of the separatrix plot.
    #[arg(long)]
    svg: bool,
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(exit_code(&err));
        }
    }
}

/// 2 for validation problems, 3 for numerical failures.
fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(q) = cause.downcast_ref::<QdError>() {
            return match q {
                QdError::NotGMN(_)
                | QdError::DegenerateRoots(_)
                | QdError::NotAPole(_)
                | QdError::Incomplete => 2,
                _ => 3,
            };
        }
        if let Some(v) = cause.downcast_ref::<VortexError>() {
            return match v {
                VortexError::BadDomain(_) | VortexError::BadConfig(_) => 2,
                VortexError::Differential(QdError::NotGMN(_))
                | VortexError::Differential(QdError::Incomplete) => 2,
                _ => 3,
            };
        }
        if cause.downcast_ref::<teichflow::surface::SurfaceError>().is_some()
            || cause.downcast_ref::<teichflow::surface::TriangulationError>().is_some()
            || cause.downcast_ref::<teichflow::surface::FlipError>().is_some()
            || cause.downcast_ref::<teichflow::quiver::QuiverError>().is_some()
            || cause.downcast_ref::<teichflow::teich::TeichError>().is_some()
            || cause.downcast_ref::<teichflow::io::IoError>().is_some()
            || cause.downcast_ref::<serde_json::Error>().is_some()
        {
            return 2;
        }
    }
    3
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Triangulate(args) => cmd_triangulate(args, cli.out.as_deref()),
        Command::Flip(args) => cmd_flip(args, cli.out.as_deref()),
        Command::Quiver(args) => cmd_quiver(args, cli.out.as_deref()),
        Command::Mutate(args) => cmd_mutate(args, cli.out.as_deref()),
        Command::Wkb(args) => cmd_wkb(args, cli.out.as_deref(), true),
        Command::Periods(args) => cmd_wkb(args, cli.out.as_deref(), false),
        Command::Octagon(args) => cmd_octagon(args, cli.out.as_deref()),
        Command::Vortex(args) => cmd_vortex(args, cli.out.as_deref()),
        Command::Asymptotics(args) => cmd_asymptotics(args, cli.out.as_deref()),
    }
}

/// Writes atomically when an output directory is given, otherwise prints.
fn emit(out: Option<&Path>, name: &str, contents: &str) -> Result<()> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let tmp = dir.join(format!(".{name}.tmp"));
            std::fs::write(&tmp, contents)?;
            std::fs::rename(&tmp, dir.join(name))?;
            Ok(())
        }
        None => {
            println!("{contents}");
            Ok(())
        }
    }
}

fn parse_catalog_surface(spec: &str) -> Result<teichflow::surface::IdealTriangulation> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["disk", k] => {
            let k: usize = k.parse().context("disk:K needs an integer K")?;
            if k < 4 {
                let s = teichflow::surface::MarkedBorderedSurface::new(0, vec![k], 0)?;
                s.arc_count()?;
                return Err(anyhow!("disk with {k} marked points has no interior arc"));
            }
            Ok(catalog::polygon(k))
        }
        ["punctured-disk", k] => {
            let k: usize = k.parse().context("punctured-disk:K needs an integer K")?;
            if k < 2 {
                return Err(anyhow!("punctured-disk:K needs K ≥ 2"));
            }
            Ok(catalog::once_punctured_polygon(k))
        }
        ["torus"] => Ok(catalog::once_punctured_torus()),
        ["annulus"] => Ok(catalog::annulus_1_1()),
        ["digon-selffolded"] => Ok(catalog::once_punctured_digon_selffolded()),
        _ => Err(anyhow!("unknown surface spec {spec}")),
    }
}

fn cmd_triangulate(args: TriangulateArgs, out: Option<&Path>) -> Result<()> {
    let tri = parse_catalog_surface(&args.surface)?;
    let mut payload = serde_json::json!({
        "surface": tri.surface,
        "triangulation": triangulation_to_json(&tri, None),
    });
    if !args.no_enumerate && tri.n_arcs <= 7 && tri.surface.genus == 0 && tri.surface.punctures == 0
    {
        let (states, edges) = enumerate_flip_graph(&tri, 5000);
        payload["flip_graph"] = serde_json::json!({
            "states": states.len(),
            "edges": edges,
        });
    }
    emit(out, "triangulation.json", &serde_json::to_string_pretty(&payload)?)
}

fn cmd_flip(args: FlipArgs, out: Option<&Path>) -> Result<()> {
    let text = std::fs::read_to_string(&args.triangulation)?;
    let dto: TriangulationDto = serde_json::from_str(&text)?;
    let tagged = triangulation_from_json(&dto)?;
    let flipped = tagged.triangulation().flip(args.arc)?;
    let payload = triangulation_to_json(&flipped, Some(tagged.signing()));
    emit(out, "flipped.json", &serde_json::to_string_pretty(&payload)?)
}

fn cmd_quiver(args: QuiverArgs, out: Option<&Path>) -> Result<()> {
    let text = std::fs::read_to_string(&args.triangulation)?;
    let dto: TriangulationDto = serde_json::from_str(&text)?;
    let tagged = triangulation_from_json(&dto)?;
    let (tq, w) = potential_from_triangulation(tagged.triangulation(), tagged.signing())?;
    let payload = quiver_to_json(&tq.quiver, Some(&w));
    emit(out, "quiver.json", &serde_json::to_string_pretty(&payload)?)
}

fn cmd_mutate(args: MutateArgs, out: Option<&Path>) -> Result<()> {
    let text = std::fs::read_to_string(&args.input)?;
    // accept either a bare matrix or a seed object
    if let Ok(matrix) = serde_json::from_str::<Vec<Vec<i64>>>(&text) {
        let mutated = mutate_matrix(&matrix, args.k)?;
        return emit(out, "mutated.json", &serde_json::to_string_pretty(&mutated)?);
    }
    let seed: Seed = serde_json::from_str::<SeedDto>(&text)?.into();
    if args.coords.is_empty() {
        let mutated = mutate_seed(&seed, args.k)?;
        emit(out, "mutated.json", &serde_json::to_string_pretty(&SeedDto::from(&mutated))?)
    } else {
        let (mutated, coords) = mutate_chart(&seed, args.k, &args.coords)?;
        let payload = serde_json::json!({
            "seed": SeedDto::from(&mutated),
            "chart_point": chart_point_to_json(&format!("mu_{}", args.k), &coords),
        });
        emit(out, "mutated.json", &serde_json::to_string_pretty(&payload)?)
    }
}

fn load_differential(args: &WkbArgs) -> Result<teichflow::qdiff::RationalQD> {
    let text = std::fs::read_to_string(&args.differential)?;
    let dto: DifferentialDto = serde_json::from_str(&text)?;
    Ok(dto.to_differential().rotated(args.theta))
}

fn cmd_wkb(args: WkbArgs, out: Option<&Path>, full: bool) -> Result<()> {
    let phi = load_differential(&args)?;
    let params = DecompParams { tol: args.tol, ..DecompParams::default() };
    let dec = match strip_decomposition(&phi, &params) {
        Err(QdError::SaddleDetected) => {
            return Err(anyhow!(QdError::SaddleDetected)
                .context("the phase sits on a wall; perturb it, e.g. rerun with --theta 0.05"));
        }
        other => other?,
    };
    let periods: Vec<[f64; 2]> = dec.strips.iter().map(|s| [s.period.re, s.period.im]).collect();
    let mut payload = serde_json::json!({
        "strips": dec.strips.len(),
        "half_planes": dec.half_planes.len(),
        "periods": periods,
    });
    if full {
        let (tri, signing, arc_map) = wkb_triangulation(&dec)?;
        payload["arcs"] = serde_json::json!(tri.n_arcs);
        payload["triangulation"] =
            serde_json::to_value(triangulation_to_json(&tri, Some(&signing)))?;
        payload["arc_to_strip"] = serde_json::json!(arc_map);
    }
    if args.svg {
        let window = plot_window(&dec.crit);
        let svg = render_decomposition(&phi, &dec, window, 8);
        emit(out, "wkb.svg", &svg)?;
    }
    emit(
        out,
        if full { "wkb.json" } else { "periods.json" },
        &serde_json::to_string_pretty(&payload)?,
    )
}

fn plot_window(crit: &teichflow::qdiff::CriticalData) -> (f64, f64, f64, f64) {
    let r = crit.zeros.iter().map(|z| z.norm()).fold(1.0f64, f64::max) * 2.5;
    (-r, r, -r, r)
}

fn cmd_octagon(args: OctagonArgs, out: Option<&Path>) -> Result<()> {
    let phi0 = load_differential(&args.wkb)?;
    let params = DecompParams { tol: args.wkb.tol, ..DecompParams::default() };
    let mut runs = Vec::new();
    let mut worst: f64 = 0.0;
    let configs: Vec<(f64, f64, f64)> = if args.sweep == 0 {
        vec![(0.0, args.margin_v, args.margin_h)]
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
        (0..args.sweep)
            .map(|_| {
                let dtheta: f64 = rng.gen_range(-0.45..0.45);
                let mv: f64 = rng.gen_range(0.15..0.5);
                let mh: f64 = rng.gen_range(0.3..0.9);
                (dtheta, mv, mh)
            })
            .collect()
    };
    for (dtheta, mv, mh) in configs {
        let phi = phi0.rotated(dtheta);
        let dec = strip_decomposition(&phi, &params)?;
        let oct = octagon_check(
            &phi,
            &dec.crit,
            &dec.strips[0],
            OctagonMargins { vertical: mv, horizontal: mh },
            &params.trace,
        )?;
        worst = worst.max((oct.lhs - oct.rhs).abs());
        runs.push(serde_json::json!({
            "dtheta": dtheta,
            "margins": [mv, mh],
            "lhs": oct.lhs,
            "rhs": oct.rhs,
            "side_lengths": oct.side_lengths,
            "im_loop": oct.im_loop,
            "closure_error": oct.closure_error,
        }));
    }
    let payload = serde_json::json!({ "max_abs_difference": worst, "runs": runs });
    emit(out, "octagon.json", &serde_json::to_string_pretty(&payload)?)
}

fn load_config(args: &ConfigArgs) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(&args.config)?;
    let mut config: ExperimentConfig = serde_json::from_str(&text)?;
    if let Some(h) = args.grid_h {
        config.grid_h = h;
    }
    if let Some(tol) = args.tol {
        config.tol = tol;
    }
    config.validate()?;
    Ok(config)
}

fn cmd_vortex(args: ConfigArgs, out: Option<&Path>) -> Result<()> {
    let config = load_config(&args)?;
    let phi = config.differential();
    let crit = phi.critical_data(1e-10).map_err(VortexError::Differential)?;
    let [x0, x1, y0, y1] = config.domain;
    let dom = GridDomain::new(x0, x1, y0, y1, config.grid_h, vec![])?;
    dom.validate_for(&crit, |z| phi.abs(z), 1e-12)?;
    let r = config.r_list.first().copied().unwrap_or(1.0);
    let phi_r = phi.scaled(Complex64::new(r * r, 0.0));
    let field = solve(
        &dom,
        |x, y| phi_r.eval(Complex64::new(x, y)).norm_sqr(),
        &SolveParams { tol: config.tol, ..SolveParams::default() },
    )?;
    // invariant diagnostics
    let mut min_j = f64::INFINITY;
    let mut min_wt = f64::INFINITY;
    for j in 0..dom.ny {
        for i in 0..dom.nx {
            let idx = dom.index(i, j);
            if dom.class[idx] != NodeClass::Interior {
                continue;
            }
            min_j = min_j.min(field.jacobian_density(idx));
            let z = dom.point(i, j);
            if crit.zeros.iter().all(|&z0| (z - z0).norm() > 3.0 * dom.h) {
                min_wt = min_wt.min(field.w_tilde(idx));
            }
        }
    }
    let profile = decay_profile(&field, &crit.zeros, 16);
    let mut csv = String::from("r_flat,sup_w_tilde\n");
    for (rr, sup) in &profile {
        csv.push_str(&format!("{rr:.6e},{sup:.6e}\n"));
    }
    emit(out, "decay_profile.csv", &csv)?;
    let payload = serde_json::json!({
        "r": r,
        "grid": { "nx": dom.nx, "ny": dom.ny, "h": dom.h },
        "newton_iters": field.newton_iters,
        "cg_iters_total": field.cg_iters_total,
        "residual": field.residual,
        "min_jacobian_density": min_j,
        "min_w_tilde_off_zeros": min_wt,
    });
    emit(out, "vortex.json", &serde_json::to_string_pretty(&payload)?)
}

fn cmd_asymptotics(args: ConfigArgs, out: Option<&Path>) -> Result<()> {
    let config = load_config(&args)?;
    let result = asymptotic_experiment(&config)?;
    let mut csv = String::from("R,S,R_ReZ,deviation,ratio\n");
    for row in &result.rows {
        csv.push_str(&format!(
            "{:.6e},{:.12e},{:.12e},{:.6e},{:.12e}\n",
            row.r, row.s, row.r_re_z, row.deviation, row.ratio
        ));
    }
    emit(out, "asymptotics.csv", &csv)?;
    if args.svg {
        let phi = config.differential();
        let window = plot_window(&result.decomposition.crit);
        let svg = render_decomposition(&phi, &result.decomposition, window, 8);
        emit(out, "asymptotics.svg", &svg)?;
    }
    let payload = serde_json::json!({
        "re_z": result.re_z,
        "octagon": {
            "lhs": result.octagon.lhs,
            "rhs": result.octagon.rhs,
            "closure_error": result.octagon.closure_error,
        },
        "rows": result.rows,
        "verdict": if result.verdict_pass { "PASS" } else { "FAIL" },
    });
    emit(out, "asymptotics.json", &serde_json::to_string_pretty(&payload)?)?;
    println!("verdict: {}", if result.verdict_pass { "PASS" } else { "FAIL" });
    Ok(())
}
