//! Command-line front end: width/radius/richness estimation, single fits,
//! packing reports, full experiment runs, rate fitting, and bound
//! verification over result tables.
//!
//! Exit codes: 0 success, 1 contract/config error, 2 bound-violation verdict
//! from `verify`.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use erm_lab::bounds::{
    concentration_check, isometry_gap, BoundReport, ConcentrationConfig, IsometryConfig, Verdict,
};
use erm_lab::complexity::{
    critical_radius, empirical_width, expected_width, packing, sudakov_check, t_star_multi,
    BallNorm, BallSpec,
};
use erm_lab::complexity::radius::RadiusConfig;
use erm_lab::complexity::tstar::{TStarConfig, TStarRhs};
use erm_lab::core::{DesignSample, NoiseVector, SeedPolicy};
use erm_lab::erm::erm_fit_oracle;
use erm_lab::harness::{self, canonical_sort, fit_rate, group_cells, read_rows, ExperimentConfig};

#[derive(Parser)]
#[command(name = "erm-lab", about = "error floors of least-squares ERM over convex classes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// experiment config (TOML)
    #[arg(long)]
    config: PathBuf,
    /// master seed override
    #[arg(long)]
    seed: Option<u64>,
    /// worker threads (0: all cores)
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// sample size override (single-shot commands; default: first n in the grid)
    #[arg(long)]
    n: Option<usize>,
    /// f0 panel index
    #[arg(long, default_value_t = 0)]
    f0: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the Gaussian width of the class, optionally ball-localized
    Width {
        #[command(flatten)]
        common: Common,
        /// localize to a ball of this radius around f0
        #[arg(long)]
        ball_radius: Option<f64>,
        /// ball norm: empirical | population
        #[arg(long, default_value = "empirical")]
        ball_norm: String,
        /// also estimate the design-averaged width W
        #[arg(long)]
        expected: bool,
    },
    /// Fit the least-squares estimator once and dump fitted values
    Erm {
        #[command(flatten)]
        common: Common,
        /// write x, f0, y, fitted values as CSV here (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Critical radius r(f0)
    Radius {
        #[command(flatten)]
        common: Common,
    },
    /// Localized-richness radius t*
    Tstar {
        #[command(flatten)]
        common: Common,
        /// comma-separated l_xi values (default: the configured one)
        #[arg(long)]
        l_xi: Option<String>,
    },
    /// Greedy packing numbers and the Sudakov minoration report
    Pack {
        #[command(flatten)]
        common: Common,
        /// comma-separated epsilons
        #[arg(long, default_value = "0.1,0.2,0.4")]
        epsilons: String,
        /// minoration constant c1
        #[arg(long, default_value_t = 0.05)]
        c1: f64,
    },
    /// Run the full experiment from the config
    Run {
        #[command(flatten)]
        common: Common,
        /// results table path (overrides config `out`)
        #[arg(long)]
        out: Option<PathBuf>,
        /// continue an existing results table, skipping completed rows
        #[arg(long)]
        resume: bool,
    },
    /// Fit log-log slopes from a results table
    Rates {
        /// results table path
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Evaluate every bound report from a results table
    Verify {
        /// results table path
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Concentration of ||fhat - f0||_n around r(f0)
    CheckConcentration {
        #[command(flatten)]
        common: Common,
        /// replicates
        #[arg(long, default_value_t = 500)]
        replicates: usize,
        /// t grid in multiples of r_hat
        #[arg(long, default_value = "1.0,1.5,2.0")]
        t_multiples: String,
        /// also run the isometry-gap check at this n
        #[arg(long)]
        isometry: bool,
    },
}

fn main() {
    // dying quietly on a closed pipe is what a table-emitting CLI should do
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap usage errors (and --help) print themselves; map usage
            // errors to the config-error exit code
            let is_help = e.kind() == clap::error::ErrorKind::DisplayHelp
                || e.kind() == clap::error::ErrorKind::DisplayVersion;
            let _ = e.print();
            std::process::exit(if is_help { 0 } else { 1 });
        }
    };
    match dispatch(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}

fn load(common: &Common) -> anyhow::Result<(ExperimentConfig, usize)> {
    let text = std::fs::read_to_string(&common.config)?;
    let mut cfg = ExperimentConfig::from_toml(&text)?;
    if let Some(seed) = common.seed {
        cfg.master_seed = seed;
    }
    if common.jobs > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(common.jobs).build_global().ok();
    }
    let n = common.n.unwrap_or(cfg.experiment.n_grid[0]);
    Ok((cfg, n))
}

fn parse_list(text: &str) -> anyhow::Result<Vec<f64>> {
    text.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| anyhow::anyhow!("bad list entry: {e}")))
        .collect()
}

fn dispatch(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Width { common, ball_radius, ball_norm, expected } => {
            let (cfg, n) = load(&common)?;
            let class = cfg.build_class(n, common.f0)?;
            let seeds = SeedPolicy::new(cfg.master_seed);
            let design = harness::cell_design(&cfg, n, &seeds.derive_policy("cli", 0))?;
            let reference;
            let ball = match ball_radius {
                None => None,
                Some(r) => {
                    let norm = match ball_norm.as_str() {
                        "empirical" => BallNorm::Empirical,
                        "population" => {
                            reference = DesignSample::draw(
                                cfg.distribution()?,
                                cfg.width_reference_size(n),
                                seeds.derive("reference", 0),
                            )?;
                            BallNorm::Population(&reference)
                        }
                        other => anyhow::bail!("unknown ball norm {other}"),
                    };
                    Some(BallSpec { center: &class.f0, radius: r, norm })
                }
            };
            let est = empirical_width(
                &class,
                &design,
                ball.as_ref(),
                cfg.estimators.width_replicates,
                &seeds.derive_policy("width", 0),
                "w",
            )?;
            println!(
                "W_hat[{}] = {:.6} (se {:.2e}, replicates {}, seed {}{}{})",
                est.target,
                est.mean,
                est.std_error,
                est.replicates,
                est.seed,
                est.dual_mean.map(|d| format!(", dual {d:.6}")).unwrap_or_default(),
                if est.flagged { ", FLAGGED" } else { "" },
            );
            if expected {
                let west = expected_width(
                    &class,
                    &cfg.distribution()?,
                    n,
                    ball.as_ref(),
                    cfg.estimators.outer_designs,
                    cfg.estimators.inner_replicates,
                    &seeds.derive_policy("expected", 0),
                    "w",
                )?;
                println!(
                    "W[{}] = {:.6} (se {:.2e}, replicates {})",
                    west.target, west.mean, west.std_error, west.replicates
                );
            }
            Ok(0)
        }
        Command::Erm { common, out } => {
            let (cfg, n) = load(&common)?;
            let class = cfg.build_class(n, common.f0)?;
            let seeds = SeedPolicy::new(cfg.master_seed);
            let design = harness::cell_design(&cfg, n, &seeds.derive_policy("cli", 0))?;
            let f0_vals = class.f0.eval_on(&design);
            let y = if cfg.experiment.zero_noise {
                f0_vals.clone()
            } else {
                NoiseVector::standard(n, seeds.derive("noise", 0)).targets(&f0_vals)
            };
            let oracle = class.oracle(&design)?;
            let fit = erm_fit_oracle(&oracle, &y, &harness::runner::erm_config(&cfg))?;
            let loss = erm_lab::erm::empirical_loss(&fit.values, &y);
            let err = erm_lab::erm::empirical_loss(&fit.values, &f0_vals);
            let mut table = String::from("x1,f0,y,fitted\n");
            for i in 0..n {
                table.push_str(&format!(
                    "{},{},{},{}\n",
                    design.point(i)[0],
                    f0_vals[i],
                    y[i],
                    fit.values[i]
                ));
            }
            match out {
                Some(p) => std::fs::write(p, table)?,
                None => print!("{table}"),
            }
            eprintln!(
                "loss {loss:.6e}  err_fixed {err:.6e}  gap {:.2e}  converged {}",
                fit.gap, fit.converged
            );
            Ok(0)
        }
        Command::Radius { common } => {
            let (cfg, n) = load(&common)?;
            let class = cfg.build_class(n, common.f0)?;
            let seeds = SeedPolicy::new(cfg.master_seed);
            let design = harness::cell_design(&cfg, n, &seeds.derive_policy("cli", 0))?;
            let rad = critical_radius(
                &class,
                &design,
                &class.f0,
                None,
                &RadiusConfig {
                    grid_points: cfg.estimators.radius_grid,
                    replicates: cfg.estimators.radius_replicates,
                    lambda_points: cfg.estimators.lambda_points,
                },
                &seeds.derive_policy("radius", 0),
            )?;
            println!(
                "r_star = {:.6}  objective {:.6}{}{}",
                rad.r_star,
                rad.objective_at_max,
                if rad.at_boundary { "  AT-BOUNDARY" } else { "" },
                if rad.non_unimodal { "  NON-UNIMODAL" } else { "" },
            );
            println!("radius,width,width_se,objective");
            for (r, w, se, obj) in &rad.grid {
                println!("{r:.6},{w:.6},{se:.2e},{obj:.6}");
            }
            Ok(0)
        }
        Command::Tstar { common, l_xi } => {
            let (cfg, n) = load(&common)?;
            let class = cfg.build_class(n, common.f0)?;
            let seeds = SeedPolicy::new(cfg.master_seed);
            let l_list = match l_xi {
                Some(t) => parse_list(&t)?,
                None => vec![cfg.estimators.l_xi],
            };
            let outs = t_star_multi(
                &class,
                &class.f0,
                n,
                &l_list,
                &cfg.distribution()?,
                &TStarConfig {
                    outer_designs: cfg.estimators.tstar_outer,
                    noise_replicates: cfg.estimators.tstar_noise,
                    lambda_points: cfg.estimators.lambda_points,
                    bisection_tolerance: cfg.estimators.tstar_tolerance,
                    cap: 2.0,
                    rhs: if cfg.estimators.tstar_rhs == "global-width" {
                        TStarRhs::GlobalWidth
                    } else {
                        TStarRhs::UnitEmpiricalBall
                    },
                    reference_size: cfg.width_reference_size(n),
                    grid_points: cfg.estimators.tstar_grid,
                },
                &seeds.derive_policy("tstar", 0),
            )?;
            for o in &outs {
                println!(
                    "t_star(l_xi={}) = {:.6}  threshold {:.6}  cap {}  iterations {}",
                    o.l_xi, o.t_star, o.l_xi * o.reference_width, o.cap, o.bisection_iterations
                );
            }
            Ok(0)
        }
        Command::Pack { common, epsilons, c1 } => {
            let (cfg, n) = load(&common)?;
            let class = cfg.build_class(n, common.f0)?;
            let seeds = SeedPolicy::new(cfg.master_seed);
            let design = harness::cell_design(&cfg, n, &seeds.derive_policy("cli", 0))?;
            let eps = parse_list(&epsilons)?;
            let rep = sudakov_check(
                &class,
                &design,
                &eps,
                &packing::SudakovConfig {
                    member_samples: 200,
                    c1,
                    width_replicates: cfg.estimators.width_replicates,
                },
                &seeds.derive_policy("pack", 0),
            )?;
            println!("members sampled: {}", rep.member_count);
            println!("epsilon,packing_M,lhs,rhs,ratio,holds");
            for row in &rep.rows {
                println!(
                    "{},{},{:.6e},{:.6e},{:.4},{}",
                    row.epsilon, row.packing_size, row.lhs, row.rhs, row.ratio, row.holds
                );
            }
            Ok(if rep.all_hold() { 0 } else { 2 })
        }
        Command::Run { common, out, resume } => {
            let (cfg, _) = load(&common)?;
            let out_path = out
                .or_else(|| cfg.out.clone().map(PathBuf::from))
                .ok_or_else(|| anyhow::anyhow!("run needs --out or `out` in the config"))?;
            let rows = harness::run_experiment(&cfg, &out_path, resume)?;
            eprintln!("wrote {} rows to {}", rows.len(), out_path.display());
            Ok(0)
        }
        Command::Rates { input } => {
            let rows = read_rows(&input)?;
            let cells = group_cells(&rows);
            println!("class,f0,error,slope,slope_se,r2,n_min,n_max");
            for ((class, f0), ests) in &cells {
                for (label, pick) in [
                    ("err_fixed", 0usize),
                    ("err_random", 1usize),
                ] {
                    let pts: Vec<(usize, f64)> = ests
                        .iter()
                        .map(|e| {
                            (e.n, if pick == 0 { e.mean_fixed } else { e.mean_random })
                        })
                        .collect();
                    match fit_rate(&pts) {
                        Ok(fit) => println!(
                            "{class},{f0},{label},{:.4},{:.4},{:.4},{},{}",
                            fit.slope, fit.slope_se, fit.r2, fit.n_range.0, fit.n_range.1
                        ),
                        Err(e) => println!("{class},{f0},{label},fit-failed({e}),,,,"),
                    }
                }
            }
            Ok(0)
        }
        Command::Verify { input } => {
            let rows = read_rows(&input)?;
            let mut sorted = rows.clone();
            canonical_sort(&mut sorted);
            let cells = group_cells(&sorted);
            let mut any_violated = false;
            println!("class,f0,n,bound,left,left_se,right,margin,verdict");
            for ((class, f0), ests) in &cells {
                for e in ests {
                    // bound values are constant within a cell; read them off
                    // the first row of that cell
                    let row = sorted
                        .iter()
                        .find(|r| r.class_id == *class && r.f0_id == *f0 && r.n == e.n)
                        .expect("cell row");
                    let fixed = BoundReport::new(
                        "fixed-design-floor",
                        e.mean_fixed,
                        e.se_fixed,
                        row.bound_fixed,
                        0.0,
                        format!("W_hat={}", row.w_hat),
                    );
                    let random = BoundReport::new(
                        "random-design-floor",
                        e.mean_random,
                        e.se_random,
                        row.bound_random,
                        0.0,
                        format!("W={},t_star={}", row.w, row.t_star),
                    );
                    for rep in [fixed, random] {
                        any_violated |= rep.verdict == Verdict::Violated;
                        println!(
                            "{class},{f0},{},{},{:.6e},{:.2e},{:.6e},{:.3},{}",
                            e.n, rep.bound_id, rep.left, rep.left_se, rep.right, rep.margin,
                            rep.verdict
                        );
                    }
                }
            }
            Ok(if any_violated { 2 } else { 0 })
        }
        Command::CheckConcentration { common, replicates, t_multiples, isometry } => {
            let (cfg, n) = load(&common)?;
            let class = cfg.build_class(n, common.f0)?;
            let seeds = SeedPolicy::new(cfg.master_seed);
            let design = harness::cell_design(&cfg, n, &seeds.derive_policy("cli", 0))?;
            let rep = concentration_check(
                &class,
                &design,
                &class.f0,
                &ConcentrationConfig {
                    replicates,
                    t_multiples: parse_list(&t_multiples)?,
                    radius: RadiusConfig {
                        grid_points: cfg.estimators.radius_grid,
                        replicates: cfg.estimators.radius_replicates,
                        lambda_points: cfg.estimators.lambda_points,
                    },
                    erm: harness::runner::erm_config(&cfg),
                },
                &seeds.derive_policy("concentration", 0),
            )?;
            println!(
                "r_hat {:.6}  W(B(f0,r_hat)) {:.6}  median ||fhat-f0||_n {:.6}",
                rep.r_hat, rep.w_at_r_hat, rep.median_norm
            );
            println!("t,bound,norm_freq,width_freq,norm_holds,width_holds");
            for row in &rep.rows {
                println!(
                    "{:.6},{:.6e},{:.4},{:.4},{},{}",
                    row.t, row.bound, row.norm_frequency, row.width_frequency, row.norm_holds,
                    row.width_holds
                );
            }
            if isometry {
                let iso = isometry_gap(
                    &class,
                    n,
                    &cfg.distribution()?,
                    &IsometryConfig::default(),
                    &seeds.derive_policy("isometry", 0),
                )?;
                println!(
                    "isometry: W {:.6} threshold {:.6} mean-max-gap {:.6} exceedance {:.4}",
                    iso.w_global, iso.threshold, iso.mean_max_gap, iso.exceedance_fraction
                );
            }
            Ok(if rep.all_hold { 0 } else { 2 })
        }
    }
}
