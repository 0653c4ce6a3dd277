//! Batch front end: parse a config, dispatch a subcommand, emit CSV or a
//! plain-text report. Exit codes: 0 all enabled checks passed, 1 a check
//! failed, 2 configuration or I/O error.

mod config;
mod report;

use clap::{Parser, Subcommand};
use config::RunConfig;
use kerr_rkg::discretization::{assemble, min_eigenvalue_shifted, verify_mass_bound, Grid};
use kerr_rkg::evolution::{
    conserved_series_check, evolve, growth_rate_estimate, max_norm, AOperator, BOperator,
    EvolutionConfig,
};
use kerr_rkg::geometry::{
    killing_norm, metric_components, mu_bounds, region_membership, special_s, KerrParams,
    ModeSpec, Point,
};
use kerr_rkg::pencil::{
    char_poly_coefficients, example_stable, example_unstable, pencil_eigenvalues,
    HermitianOperator, QuadraticState, Stability,
};
use kerr_rkg::{matio, C64};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use report::Report;

#[derive(Parser)]
#[command(name = "rkg", about = "Stability laboratory for the separated Klein-Gordon equation on a Kerr background")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Path to a key = value config file; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<std::path::PathBuf>,
    /// Output path for the primary artifact (CSV or report); stdout if omitted.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
    /// Seed for randomized initial data / samplers.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for parallel sweeps (0 = library default).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// CSV map of metric and region quantities over an (r, θ) lattice.
    GeometryMap,
    /// Eigenvalues of the quadratic pencil read from matrix files.
    Pencil,
    /// Integrate the discretized equation and emit the trajectory CSV.
    Evolve,
    /// Mass-bound verification and shifted-positivity scan.
    Stability,
    /// Reproduce both built-in 2x2 examples end to end.
    DemoExamples,
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = Cli::parse();
    if cli.threads > 0 {
        kerr_rkg::par::set_threads(cli.threads);
    }
    let cfg = match load_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return 2;
        }
    };
    let outcome = match cli.command {
        Command::GeometryMap => geometry_map(&cfg),
        Command::Pencil => pencil_cmd(&cfg),
        Command::Evolve => evolve_cmd(&cfg, cli.seed),
        Command::Stability => stability_cmd(&cfg),
        Command::DemoExamples => demo_examples(),
    };
    match outcome {
        Err(e) => {
            eprintln!("config error: {e}");
            2
        }
        Ok((artifact, all_passed)) => {
            let wrote = match &cli.out {
                Some(path) => std::fs::write(path, &artifact),
                None => {
                    print!("{artifact}");
                    Ok(())
                }
            };
            if let Err(e) = wrote {
                eprintln!("config error: cannot write output: {e}");
                return 2;
            }
            if all_passed {
                0
            } else {
                1
            }
        }
    }
}

fn load_config(cli: &Cli) -> kerr_rkg::error::Result<RunConfig> {
    match &cli.config {
        None => Ok(RunConfig::default()),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                kerr_rkg::error::Error::Parse(format!("cannot read {}: {e}", path.display()))
            })?;
            RunConfig::parse(&text)
        }
    }
}

type Outcome = kerr_rkg::error::Result<(String, bool)>;

fn geometry_map(cfg: &RunConfig) -> Outcome {
    let p = KerrParams::new(cfg.mass, cfg.spin)?;
    let g = Grid::new(&p, cfg.eps_h * p.mass, cfg.r_max * p.mass, cfg.nr, cfg.ntheta)?;
    let s = special_s(&p);
    let rows = kerr_rkg::par::map_range(g.n(), |idx| {
        let (i, j) = (idx / g.ntheta, idx % g.ntheta);
        let q = Point { r: g.r_node(i), theta: g.theta_node(j) };
        let met = metric_components(&p, &q);
        let kn = killing_norm(&p, s, &q);
        let rm = region_membership(&p, &q);
        format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{},{}\n",
            q.r, q.theta, met.g_tt, kn.direct, rm.in_ergoregion, rm.in_omega_e2
        )
    });
    let mut csv = String::from("r,theta,g_tt,killing_norm,in_ergoregion,in_omega_e2\n");
    csv.extend(rows);
    Ok((csv, true))
}

fn pencil_cmd(cfg: &RunConfig) -> Outcome {
    let (Some(apath), Some(bpath)) = (&cfg.atil_path, &cfg.b_path) else {
        return Err(kerr_rkg::error::Error::Parse(
            "pencil subcommand needs [pencil] atil_path and b_path".into(),
        ));
    };
    let read = |path: &str| -> kerr_rkg::error::Result<HermitianOperator> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| kerr_rkg::error::Error::Parse(format!("cannot read {path}: {e}")))?;
        HermitianOperator::new(matio::read_matrix(&text)?)
    };
    let atil = read(apath)?;
    let b = read(bpath)?;
    let spec = pencil_eigenvalues(&atil, &b)?;
    let mut out = String::new();
    out.push_str(&format!(
        "classification={}\n",
        if spec.classification == Stability::Stable { "stable" } else { "unstable" }
    ));
    out.push_str(&format!("growth_rate={:.16e}\n", spec.growth_rate));
    out.push_str(&format!("tol_imag={:.16e}\n", spec.tol_imag));
    for lam in &spec.eigenvalues {
        let sign = if lam.im >= 0.0 { "+" } else { "-" };
        out.push_str(&format!("{:.16e}{sign}{:.16e}i\n", lam.re, lam.im.abs()));
    }
    Ok((out, true))
}

fn evolve_cmd(cfg: &RunConfig, seed: u64) -> Outcome {
    let p = KerrParams::new(cfg.mass, cfg.spin)?;
    let mode = ModeSpec::new(cfg.m, cfg.mu)?;
    let g = Grid::new(&p, cfg.eps_h * p.mass, cfg.r_max * p.mass, cfg.nr, cfg.ntheta)?;
    let sys = assemble(&p, &mode, &g)?;
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u0 = DVector::from_fn(n, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let initial = QuadraticState::new(u0, DVector::from_element(n, C64::new(0.0, 0.0)), 0.0)?;
    let ecfg = EvolutionConfig::new(cfg.dt, cfg.t_final, cfg.record_every, cfg.s_list.clone())?;
    let traj = evolve(
        &AOperator::Banded(sys.sym.clone()),
        &BOperator::Diagonal(sys.b_diag.clone()),
        &initial,
        &ecfg,
    )?;
    let drift = conserved_series_check(&traj);
    let passed = traj.completed && drift.max_rel_drift_e <= 1e-6 && drift.max_rel_drift_es <= 1e-6;
    let mut out = traj.to_csv();
    out.push_str(&format!(
        "# completed={} max_rel_drift_E={:.16e} max_rel_drift_Es={:.16e} (tol 1e-6 each)\n",
        traj.completed, drift.max_rel_drift_e, drift.max_rel_drift_es
    ));
    Ok((out, passed))
}

fn stability_cmd(cfg: &RunConfig) -> Outcome {
    let p = KerrParams::new(cfg.mass, cfg.spin)?;
    let g = Grid::new(&p, cfg.eps_h * p.mass, cfg.r_max * p.mass, cfg.nr, cfg.ntheta)?;
    let bounds = mu_bounds(&p, cfg.m);
    let mut rep = Report::new("stability");
    rep.input("M", cfg.mass);
    rep.input("a", cfg.spin);
    rep.input("m", cfg.m);
    rep.input("grid", format!("{}x{}", cfg.nr, cfg.ntheta));
    rep.value("mu_old", bounds.mu_old);
    rep.value("mu_new", bounds.mu_new);
    rep.value("alpha", bounds.alpha);
    rep.value("special_s", special_s(&p));

    let mb = verify_mass_bound(&p, cfg.m, &g)?;
    rep.value("mass_bound_min_eigenvalue", mb.min_eigenvalue);
    rep.check_ge(
        "mass-bound positivity: min eig(A_h + sB_h - s^2) at mu = mu_new, s = m a/(2Mr_+)",
        mb.min_eigenvalue,
        -mb.tol_pos,
    );
    if cfg.m != 0 {
        rep.check_flag("improved bound is strict: mu_new < mu_old", bounds.mu_new < bounds.mu_old);
    }

    // Shifted-positivity scan over the configured s grid at mu = mu_new.
    let mode = ModeSpec::new(cfg.m, bounds.mu_new)?;
    let sys = assemble(&p, &mode, &g)?;
    let s_grid = cfg.s_grid();
    let evals: Vec<kerr_rkg::error::Result<f64>> =
        kerr_rkg::par::map_slice(&s_grid, |&s| min_eigenvalue_shifted(&sys, s));
    let mut best: Option<(f64, f64)> = None;
    for (&s, ev) in s_grid.iter().zip(evals.iter()) {
        let ev = *ev.as_ref().map_err(|e| kerr_rkg::error::Error::EigenFailure(e.to_string()))?;
        let better = match best {
            None => true,
            Some((bs, bev)) => ev > bev || (ev == bev && s.abs() < bs.abs()),
        };
        if better {
            best = Some((s, ev));
        }
    }
    let (best_s, best_eig) = best.expect("nonempty s grid");
    rep.value("scan_best_s", best_s);
    rep.value("scan_min_eigenvalue_at_best_s", best_eig);
    rep.check_ge(
        "shifted positivity certificate exists on the s grid",
        best_eig,
        -1e-8 * sys.scale,
    );
    Ok((rep.render(), rep.all_passed()))
}

fn demo_examples() -> Outcome {
    let mut rep = Report::new("demo-examples");

    // Example with negative energy but a stable pencil.
    let (atil, b) = example_stable();
    let coeffs = char_poly_coefficients(&atil, &b)?;
    let want = [1.0, 6.0, 8.0, 0.0, -1.0];
    let exact = coeffs
        .iter()
        .zip(want.iter())
        .all(|(c, w)| c.re == *w && c.im == 0.0);
    rep.check_flag("stable: characteristic coefficients (1, 6, 8, 0, -1) exact", exact);
    let spec = pencil_eigenvalues(&atil, &b)?;
    let real_roots: Vec<f64> = spec
        .eigenvalues
        .iter()
        .filter(|z| z.im.abs() <= spec.tol_imag)
        .map(|z| z.re)
        .collect();
    let intervals = [(-5.0, -4.0), (-4.0, -1.0), (-1.0, 0.0), (0.0, 1.0)];
    let located = real_roots.len() == 4
        && intervals
            .iter()
            .zip(real_roots.iter())
            .all(|((lo, hi), r)| lo < r && r < hi);
    rep.check_flag("stable: 4 real roots in (-5,-4), (-4,-1), (-1,0), (0,1)", located);

    let init = QuadraticState::new(
        DVector::from_vec(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)]),
        DVector::from_element(2, C64::new(0.0, 0.0)),
        0.0,
    )?;
    let cfg = EvolutionConfig::new(1e-3, 200.0, 50, vec![])?;
    let traj = evolve(
        &AOperator::Dense(atil.matrix().clone()),
        &BOperator::Dense(b.matrix().clone()),
        &init,
        &cfg,
    )?;
    rep.value("stable_energy", traj.e_u[0]);
    rep.check_abs_le("stable: E_u = -1 for u(0) = (0,1), u'(0) = 0 (+1 within 1e-12)", traj.e_u[0] + 1.0, 1e-12);
    let ratio = max_norm(&traj) / traj.norms[0];
    rep.value("stable_norm_ratio", ratio);
    rep.check_flag("stable: max norm / initial norm <= 50 over T = 200", ratio <= 50.0);
    let rate = growth_rate_estimate(&traj, 0.75)?;
    rep.value("stable_fitted_rate", rate);
    rep.check_abs_le("stable: fitted growth rate below 1e-3", rate, 1e-3);

    // Example with strictly positive Atil + B^2/4 but a growing mode.
    let (atil, b) = example_unstable();
    let coeffs = char_poly_coefficients(&atil, &b)?;
    let want = [1.0, 4.6, 4.29, 0.0, -1.0];
    let close = coeffs
        .iter()
        .zip(want.iter())
        .all(|(c, w)| (c.re - w).abs() <= 1e-12 && c.im.abs() <= 1e-12);
    rep.check_flag("unstable: characteristic coefficients (1, 4.6, 4.29, 0, -1) to 1e-12", close);
    let spec = pencil_eigenvalues(&atil, &b)?;
    rep.check_flag("unstable: nonreal conjugate pair present", spec.classification == Stability::Unstable);
    rep.value("unstable_pencil_rate", spec.growth_rate);
    let cfg = EvolutionConfig::new(1e-3, 60.0, 50, vec![])?;
    let init = QuadraticState::new(
        DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.5, 0.2)]),
        DVector::from_vec(vec![C64::new(0.0, 0.1), C64::new(0.3, 0.0)]),
        0.0,
    )?;
    let traj = evolve(
        &AOperator::Dense(atil.matrix().clone()),
        &BOperator::Dense(b.matrix().clone()),
        &init,
        &cfg,
    )?;
    let est = growth_rate_estimate(&traj, 0.4)?;
    rep.value("unstable_fitted_rate", est);
    rep.check_abs_le(
        "unstable: fitted rate matches pencil growth rate within 5%",
        est - spec.growth_rate,
        0.05 * spec.growth_rate,
    );
    let core = atil.matrix() + (b.matrix() * b.matrix()) * C64::new(0.25, 0.0);
    let min_core = core
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    rep.value("unstable_min_eig_core", min_core);
    // Exact min eigenvalue is 1.5725 - sqrt(2.3225) = 0.04852...
    rep.check_ge("unstable: Atil + B^2/4 strictly positive (min eig > 0.04)", min_core, 0.04);

    Ok((rep.render(), rep.all_passed()))
}
