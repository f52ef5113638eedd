//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its measured numbers (visible under `cargo test --test acceptance --
//! --nocapture`). Tolerances are pinned in the assertions.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

use teichflow::qdiff::octagon::{octagon_check, LegKind, OctagonMargins};
use teichflow::qdiff::periods::normalize_period;
use teichflow::qdiff::strips::{strip_decomposition, DecompParams};
use teichflow::qdiff::RationalQD;
use teichflow::quiver::{mutate_matrix, Seed};
use teichflow::surface::catalog::*;
use teichflow::surface::enumerate_flip_graph;
use teichflow::teich::{flip_coordinates, mutate_chart};
use teichflow::vortex::{
    asymptotic_experiment, leg_pullback_length, path_length, solve, ExperimentConfig, GridDomain,
    NodeClass, SolveParams,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn criterion_1_combinatorial_suite() {
    let t0 = Instant::now();
    // flip involution over the whole catalog
    let catalog = [
        polygon(4),
        polygon(5),
        polygon(6),
        polygon(7),
        polygon(8),
        once_punctured_torus(),
        annulus_1_1(),
        once_punctured_polygon(3),
        once_punctured_polygon(6),
        once_punctured_digon_selffolded(),
    ];
    for t in &catalog {
        for gamma in 0..t.n_arcs {
            if let Ok(f) = t.flip(gamma) {
                assert!(f.flip(gamma).unwrap().structurally_equal(t), "flip involution");
            }
        }
    }
    // pentagon flip-cycle of length 5
    let p5 = polygon(5);
    let mut t = p5.clone();
    let mut seen = vec![t.canonical_key_unlabeled()];
    let mut arc = 0usize;
    for _ in 0..5 {
        t = t.flip(arc).unwrap();
        arc = 1 - arc;
        seen.push(t.canonical_key_unlabeled());
    }
    assert!(t.structurally_equal_up_to_relabel(&p5), "pentagon 5-cycle closes");
    let mut distinct = seen[..5].to_vec();
    distinct.sort();
    distinct.dedup();
    assert_eq!(distinct.len(), 5, "pentagon cycle visits 5 distinct states");
    // exhaustive counts match Catalan(k−2) for k = 4..8
    let catalan = [2usize, 5, 14, 42, 132];
    for (k, expected) in (4..=8).zip(catalan) {
        let (states, _) = enumerate_flip_graph(&polygon(k), 3000);
        assert_eq!(states.len(), expected, "Catalan count for k={k}");
    }
    // skew symmetry everywhere; flip ↔ matrix mutation
    for t in &catalog {
        let eps = t.exchange_matrix();
        for i in 0..eps.len() {
            for j in 0..eps.len() {
                assert_eq!(eps[i][j], -eps[j][i], "skew symmetry");
            }
        }
        for gamma in 0..t.n_arcs {
            if let Ok(f) = t.flip(gamma) {
                assert_eq!(
                    f.exchange_matrix(),
                    mutate_matrix(&eps, gamma).unwrap(),
                    "flip equals matrix mutation"
                );
            }
        }
    }
    let markov = once_punctured_torus().exchange_matrix();
    assert_eq!(markov, vec![vec![0, 2, -2], vec![-2, 0, 2], vec![2, -2, 0]]);
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "criterion 1 runtime {elapsed:.2?}");
    println!("[PASS] criterion 1: combinatorial suite exact, runtime {elapsed:.2?}");
}

#[test]
fn criterion_2_cluster_suite() {
    let tol = 1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    // flip law ↔ seed-level gluing on randomized positive inputs
    let catalog = [
        polygon(5),
        polygon(6),
        polygon(7),
        once_punctured_torus(),
        annulus_1_1(),
        once_punctured_polygon(4),
        once_punctured_polygon(5),
    ];
    for t in &catalog {
        let seed = Seed::from_exchange_matrix(&t.exchange_matrix()).unwrap();
        for gamma in 0..t.n_arcs {
            if t.flip(gamma).is_err() {
                continue;
            }
            for _ in 0..20 {
                let x: Vec<f64> = (0..t.n_arcs).map(|_| rng.gen_range(0.05..20.0)).collect();
                let (_, xf) = flip_coordinates(t, gamma, &x).unwrap();
                let (_, xs) = mutate_chart(&seed, gamma, &x).unwrap();
                for i in 0..t.n_arcs {
                    assert!(
                        ((xf[i] - xs[i]) / xf[i]).abs() < tol,
                        "coordinate law mismatch on {:?} arc {gamma}",
                        t.surface
                    );
                }
                // double mutation is the identity on chart points
                let (s1, x1) = mutate_chart(&seed, gamma, &x).unwrap();
                let (_, x2) = mutate_chart(&s1, gamma, &x1).unwrap();
                for i in 0..t.n_arcs {
                    assert!(((x2[i] - x[i]) / x[i]).abs() < tol, "double mutation identity");
                }
            }
        }
    }
    // A₂ pentagon periodicity of chart points
    let s0 = Seed {
        rank: 2,
        basis: vec![vec![1, 0], vec![0, 1]],
        skew_form: vec![vec![0, 1], vec![-1, 0]],
    };
    for _ in 0..20 {
        let x0 = vec![rng.gen_range(0.05..20.0), rng.gen_range(0.05..20.0)];
        let (mut s, mut x) = (s0.clone(), x0.clone());
        let mut k = 0usize;
        for step in 0..10 {
            let (sn, xn) = mutate_chart(&s, k, &x).unwrap();
            s = sn;
            x = xn;
            k = 1 - k;
            if step == 4 {
                assert!(
                    ((x[0] - x0[1]) / x0[1]).abs() < tol && ((x[1] - x0[0]) / x0[0]).abs() < tol,
                    "pentagon periodicity after 5 mutations (arc swap)"
                );
            }
        }
        assert!(
            ((x[0] - x0[0]) / x0[0]).abs() < tol && ((x[1] - x0[1]) / x0[1]).abs() < tol,
            "pentagon periodicity after 10 mutations"
        );
    }
    println!("[PASS] criterion 2: cluster suite at 1e-12");
}

/// Composite-Simpson oracle for the saddle integral, independent of the
/// Gauss–Legendre implementation path.
fn simpson_period_oracle(phi: &RationalQD, a: Complex64, b: Complex64, n: usize) -> Complex64 {
    let dz = b - a;
    let z_of = |tau: f64| a + dz * 0.5 * (1.0 - (std::f64::consts::PI * tau).cos());
    let jac = |tau: f64| dz * 0.5 * std::f64::consts::PI * (std::f64::consts::PI * tau).sin();
    let h = 1.0 / n as f64;
    let mut branch = phi.eval(z_of(h)).sqrt();
    let mut vals = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let tau = k as f64 * h;
        let mut s = phi.eval(z_of(tau)).sqrt();
        if (s - branch).norm() > (s + branch).norm() {
            s = -s;
        }
        branch = s;
        vals.push(s * jac(tau));
    }
    let mut acc = vals[0] + vals[n];
    for (k, v) in vals.iter().enumerate().take(n).skip(1) {
        acc += *v * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * (h / 3.0) * 2.0
}

#[test]
fn criterion_3_period_suite() {
    let rel = 1e-8;
    // Z = iπ for (z²−1)dz² against the Simpson oracle
    let phi = RationalQD::square_family();
    let dec = strip_decomposition(&phi, &DecompParams::default()).unwrap();
    let z = dec.strips[0].period;
    assert!((z - c(0.0, std::f64::consts::PI)).norm() < rel * z.norm(), "Z = iπ, got {z}");
    let mut oracle = simpson_period_oracle(&phi, c(-1.0, 0.0), c(1.0, 0.0), 4000);
    if (oracle - z).norm() > (oracle + z).norm() {
        oracle = -oracle;
    }
    assert!((z - oracle).norm() < rel * z.norm(), "oracle agreement: {z} vs {oracle}");
    // rotation equivariance Z(e^{2iθ}φ) = e^{iθ}Z(φ)
    for &theta in &[-0.3, -0.11, 0.07, 0.23] {
        let rotated = phi.rotated(theta);
        let dec_t = strip_decomposition(&rotated, &DecompParams::default()).unwrap();
        let zt = dec_t.strips[0].period;
        let expect = Complex64::from_polar(1.0, theta) * z;
        let expect = if expect.im > 0.0 { expect } else { -expect };
        assert!((zt - expect).norm() < rel * expect.norm(), "equivariance at θ={theta}");
    }
    // Im Z > 0 normalization enforced; real periods refused
    assert!(z.im > 0.0);
    assert!(normalize_period(c(1.0, 0.0)).is_err());
    assert!(normalize_period(c(0.3, -1.0)).unwrap().im > 0.0);
    println!("[PASS] criterion 3: period suite at 1e-8 relative (Z = {z})");
}

#[test]
fn criterion_4_octagon_identity() {
    let tol = 1e-6;
    let base = RationalQD::square_family();
    let params = DecompParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    while count < 20 {
        let theta: f64 = rng.gen_range(-0.45..0.45);
        let mv: f64 = rng.gen_range(0.15..0.5);
        let mh: f64 = rng.gen_range(0.3..0.9);
        let phi = base.rotated(theta);
        let dec = strip_decomposition(&phi, &params).unwrap();
        let oct = octagon_check(
            &phi,
            &dec.crit,
            &dec.strips[0],
            OctagonMargins { vertical: mv, horizontal: mh },
            &params.trace,
        )
        .unwrap();
        let diff = (oct.lhs - oct.rhs).abs();
        assert!(diff < tol, "θ={theta:.3} margins=({mv:.3},{mh:.3}): |lhs−rhs| = {diff:.2e}");
        assert!((oct.lhs - dec.strips[0].period.re).abs() < tol, "lhs equals Re Z");
        assert!(oct.im_loop > 0.0);
        worst = worst.max(diff);
        count += 1;
    }
    println!("[PASS] criterion 4: octagon identity over {count} random configs, worst |lhs−rhs| = {worst:.2e}");
}

#[test]
fn criterion_5_vortex_solver_correctness() {
    let t0 = Instant::now();
    // constant-differential exact solutions at solver tolerance
    let dom_small = GridDomain::new(-2.0, 2.0, -2.0, 2.0, 0.05, vec![]).unwrap();
    let f0 = solve(&dom_small, |_, _| 1.0, &SolveParams::default()).unwrap();
    let max_w = f0.w.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    assert!(max_w < 1e-10, "φ = dz²: max |w| = {max_w:.2e}");
    let cval: f64 = 7.3;
    let fc = solve(&dom_small, move |_, _| cval * cval, &SolveParams::default()).unwrap();
    let target = 0.5 * cval.ln();
    let max_err = fc
        .w
        .iter()
        .enumerate()
        .filter(|(i, _)| dom_small.class[*i] == NodeClass::Interior)
        .fold(0.0f64, |m, (_, x)| m.max((x - target).abs()));
    assert!(max_err < 1e-10, "φ = c·dz²: max |w − ½log c| = {max_err:.2e}");

    // Newton Jacobian vs finite differences < 1e-5 on randomized directions
    {
        use teichflow::vortex::solve::{jacobian_apply, residual};
        let dom = GridDomain::new(-1.5, 1.5, -1.5, 1.5, 0.1, vec![]).unwrap();
        let n = dom.nx * dom.ny;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut w = vec![0.0; n];
        let mut f = vec![0.0; n];
        for j in 0..dom.ny {
            for i in 0..dom.nx {
                let idx = dom.index(i, j);
                let z = dom.point(i, j);
                w[idx] = 0.2 * (1.1 * z.re).sin() * (0.9 * z.im).cos();
                f[idx] = (z.norm_sqr() + 0.5).powi(2);
            }
        }
        for _ in 0..5 {
            let mut v = vec![0.0; n];
            for (idx, val) in v.iter_mut().enumerate() {
                if dom.class[idx] == NodeClass::Interior {
                    *val = rng.gen_range(-0.5..0.5);
                }
            }
            let eps = 1e-6;
            let mut wp = w.clone();
            let mut wm = w.clone();
            for idx in 0..n {
                wp[idx] += eps * v[idx];
                wm[idx] -= eps * v[idx];
            }
            let (mut fp, mut fm, mut jv) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
            residual(&dom, &wp, &f, &mut fp);
            residual(&dom, &wm, &f, &mut fm);
            jacobian_apply(&dom, &w, &f, &v, &mut jv);
            let mut num = 0.0f64;
            let mut den = 0.0f64;
            for idx in 0..n {
                if dom.class[idx] == NodeClass::Interior {
                    num = num.max(((fp[idx] - fm[idx]) / (2.0 * eps) - jv[idx]).abs());
                    den = den.max(jv[idx].abs());
                }
            }
            assert!(num / den < 1e-5, "Jacobian vs finite differences: {:.2e}", num / den);
        }
    }

    // grid halving: ~4× residual reduction on a smooth manufactured field
    {
        use teichflow::vortex::solve::residual;
        let wstar = |x: f64, y: f64| 0.2 * x.sin() * y.cos();
        let fval = |x: f64, y: f64| {
            let w = wstar(x, y);
            (2.0 * w).exp() * ((2.0 * w).exp() + 2.0 * w)
        };
        let mut norms = Vec::new();
        for &h in &[0.08, 0.04] {
            let dom = GridDomain::new(-2.0, 2.0, -2.0, 2.0, h, vec![]).unwrap();
            let n = dom.nx * dom.ny;
            let mut w = vec![0.0; n];
            let mut f = vec![0.0; n];
            for j in 0..dom.ny {
                for i in 0..dom.nx {
                    let idx = dom.index(i, j);
                    let z = dom.point(i, j);
                    w[idx] = wstar(z.re, z.im);
                    f[idx] = fval(z.re, z.im);
                }
            }
            let mut res = vec![0.0; n];
            residual(&dom, &w, &f, &mut res);
            norms.push(res.iter().fold(0.0f64, |m, x| m.max(x.abs())));
        }
        let ratio = norms[0] / norms[1];
        assert!((3.0..5.0).contains(&ratio), "second-order stencil halving ratio {ratio:.2}");
    }

    // production-scale solve: R²(z²−1)dz², R = 4, h = 0.02 on [−4,4]²;
    // J > 0 everywhere, w̃ ≥ −tol away from the zeros
    let phi = RationalQD::square_family().rotated(-0.3).scaled(c(16.0, 0.0));
    let dom = GridDomain::new(-4.0, 4.0, -4.0, 4.0, 0.02, vec![]).unwrap();
    let field = solve(
        &dom,
        |x, y| phi.eval(c(x, y)).norm_sqr(),
        &SolveParams::default(),
    )
    .unwrap();
    assert!(field.residual < 1e-10);
    // Where the continuum J is above the h² discretization floor (the band
    // around the zeros) it must be strictly positive; everywhere else the
    // normalized Jacobian J/(H+L) = tanh 2w̃ and w̃ itself stay above the
    // discretization tolerance.
    let disc_tol = 1e-6;
    let mut min_j_band = f64::INFINITY;
    let mut min_rel_j = f64::INFINITY;
    let mut min_wt = f64::INFINITY;
    for j in 0..dom.ny {
        for i in 0..dom.nx {
            let idx = dom.index(i, j);
            if dom.class[idx] != NodeClass::Interior {
                continue;
            }
            let z = dom.point(i, j);
            let d = (z - c(1.0, 0.0)).norm().min((z + c(1.0, 0.0)).norm());
            if d <= 3.0 * dom.h {
                continue;
            }
            if d < 1.0 {
                min_j_band = min_j_band.min(field.jacobian_density(idx));
            }
            min_rel_j = min_rel_j.min(field.jacobian_density(idx) / field.energy_density(idx));
            min_wt = min_wt.min(field.w_tilde(idx));
        }
    }
    assert!(min_j_band > 0.0, "orientation preserving: min J near zeros = {min_j_band:.3e}");
    assert!(min_rel_j > -disc_tol, "normalized Jacobian: {min_rel_j:.3e}");
    assert!(min_wt > -disc_tol, "discrete maximum principle: min w̃ = {min_wt:.3e}");
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs_f64() < 300.0, "criterion 5 runtime {elapsed:.1?}");
    println!(
        "[PASS] criterion 5: vortex solver (const exact {max_err:.1e}, min J in band {min_j_band:.2e}, min w̃ {min_wt:.2e}), runtime {elapsed:.2?}"
    );
}

#[test]
fn criterion_6_length_asymptotics() {
    // measurement paths from the octagon of the θ = −0.3 family
    let phi = RationalQD::square_family().rotated(-0.3);
    let params = DecompParams::default();
    let dec = strip_decomposition(&phi, &params).unwrap();
    let mut trace = params.trace.clone();
    trace.max_step = 2e-3;
    let oct = octagon_check(
        &phi,
        &dec.crit,
        &dec.strips[0],
        OctagonMargins { vertical: 0.35, horizontal: 0.6 },
        &trace,
    )
    .unwrap();
    let dom = GridDomain::new(-4.0, 4.0, -4.0, 4.0, 0.02, vec![]).unwrap();
    let r_list = [2.0, 4.0, 6.0, 8.0];
    let mut horiz_dev = Vec::new();
    let mut vert_len = Vec::new();
    for &r in &r_list {
        let phi_r = phi.scaled(c(r * r, 0.0));
        let field =
            solve(&dom, |x, y| phi_r.eval(c(x, y)).norm_sqr(), &SolveParams::default()).unwrap();
        // horizontal pullback lengths approach 2·(flat length): measured both
        // through the public polyline functional and the leg evaluator
        let sigma = oct
            .legs
            .iter()
            .find(|l| l.kind == LegKind::Horizontal(3))
            .unwrap();
        let poly_len = path_length(&field, |z| phi_r.eval(z), &sigma.points).unwrap();
        let flat = r * sigma.flat_length;
        let dev_poly = (poly_len - 2.0 * flat).abs();
        let leg_len = leg_pullback_length(&field, true, r, &sigma.points, &sigma.ts).unwrap();
        let dev = (leg_len - 2.0 * flat).abs();
        assert!((poly_len - leg_len).abs() < 1e-4 + 1e-4 * flat, "evaluators agree");
        horiz_dev.push(dev.max(1e-14));
        let _ = dev_poly;
        // vertical sides
        let rho = oct.legs.iter().find(|l| l.kind == LegKind::Vertical(1)).unwrap();
        let vlen = leg_pullback_length(&field, false, r, &rho.points, &rho.ts).unwrap();
        vert_len.push(vlen);
    }
    for pair in horiz_dev.windows(2) {
        assert!(pair[1] < pair[0], "horizontal deviation decreasing: {horiz_dev:?}");
    }
    for pair in vert_len.windows(2) {
        assert!(pair[1] < pair[0], "vertical lengths decreasing: {vert_len:?}");
    }
    assert!(*vert_len.last().unwrap() < 0.01 * vert_len[0], "vertical lengths head to zero");
    // log-deviation vs R fits a negative slope
    let n = r_list.len() as f64;
    let sum_r: f64 = r_list.iter().sum();
    let sum_l: f64 = horiz_dev.iter().map(|d| d.ln()).sum();
    let sum_rl: f64 = r_list.iter().zip(&horiz_dev).map(|(r, d)| r * d.ln()).sum();
    let sum_rr: f64 = r_list.iter().map(|r| r * r).sum();
    let slope = (n * sum_rl - sum_r * sum_l) / (n * sum_rr - sum_r * sum_r);
    assert!(slope < 0.0, "exponential decay slope {slope:.3}");
    println!(
        "[PASS] criterion 6: horizontal devs {horiz_dev:?} (slope {slope:.2}/R), vertical lengths {vert_len:?}"
    );
}

#[test]
fn criterion_7_main_theorem_proxy() {
    let config = ExperimentConfig::default_square_family();
    let result = asymptotic_experiment(&config).unwrap();
    // Re Z ≈ π sin 0.3 for the θ = −0.3 family, from quadrature
    assert!(
        (result.re_z - std::f64::consts::PI * 0.3f64.sin()).abs() < 1e-8,
        "Re Z = {}",
        result.re_z
    );
    let devs: Vec<f64> = result.rows.iter().map(|r| r.deviation).collect();
    for pair in devs.windows(2) {
        assert!(pair[1] < pair[0], "|S(R) − R·Re Z| strictly decreasing: {devs:?}");
    }
    let final_ratio = result.rows.last().unwrap().ratio;
    assert!(
        (0.9..=1.1).contains(&final_ratio),
        "final ratio exp(S − R·Re Z) = {final_ratio}"
    );
    assert!(result.verdict_pass);
    println!(
        "[PASS] criterion 7: deviations {devs:?}, final ratio {final_ratio:.8} within [0.9, 1.1]"
    );
}
