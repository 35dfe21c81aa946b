//! `spinc`: experiments on the flat 4-torus. Every command prints a JSON run
//! report on stdout and exits 0 when all checks pass, 1 when a check fails
//! and 2 on usage or input errors.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use spinc_core::calibration::calibrate;
use spinc_core::checks::{algebra_suite, constant_identity_residual, gauge_suite, identity_convergence};
use spinc_core::fieldio::{load_field, save_field, FieldArchive};
use spinc_core::forms::SdForm;
use spinc_core::grid::{Field, Grid};
use spinc_core::harmonic::{kahler_pipeline, solve_modes, SolveOptions};
use spinc_core::lattice::{flux_integers, sigma_field, SpinorField, U1Connection};
use spinc_core::report::RunReport;
use spinc_core::smooth::{random_one_form, TrigSpinor};
use spinc_core::topology::{c1_equal, degree_vector, slice_independent, sphere_map, winding_field};

#[derive(Parser)]
#[command(name = "spinc", version, about = "Spin-c squaring map and lattice Dirac experiments on T^4")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the normalization of the differential identity spectrally.
    CalibrateSigma {
        #[arg(long, default_value_t = 16)]
        grid: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        trials: usize,
    },
    /// Clifford, forms and squaring-map invariant suites.
    VerifyAlgebra {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Convergence table of the identity residual on smooth data.
    VerifyIdentity {
        #[arg(long, value_delimiter = ',', default_values_t = [8, 16, 32])]
        grid: Vec<usize>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Lowest mode of D†D for a constant-flux connection.
    Solve {
        #[arg(long)]
        grid: usize,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_values_t = [0, 0, 0, 0, 0, 0])]
        flux: Vec<i64>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of lower modes to find and project out first.
        #[arg(long, default_value_t = 0)]
        deflate: usize,
        #[arg(long, default_value_t = 200)]
        maxiter: usize,
        #[arg(long)]
        out: PathBuf,
        /// Also write the connection used.
        #[arg(long)]
        links_out: Option<PathBuf>,
    },
    /// Symplectic and Kähler checks for a stored pair (A, φ).
    Pipeline {
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        links: PathBuf,
        /// Bound for the relative Dirac, transversality and closedness residuals.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Sphere-map degree vectors of a self-dual form field.
    Degrees {
        #[arg(long)]
        alpha: PathBuf,
        #[arg(long = "ref")]
        reference: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Gauge invariance of every derived quantity for a stored pair.
    GaugeCheck {
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        links: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Write a synthetic field archive.
    Generate {
        #[arg(value_enum)]
        what: Fixture,
        #[arg(long)]
        grid: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_values_t = [0, 0, 0, 0, 0, 0])]
        flux: Vec<i64>,
        /// Plane index (0..6, order 01,02,03,12,13,23) for winding forms.
        #[arg(long, default_value_t = 0)]
        plane: usize,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        degree: i64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Fixture {
    /// Constant spinor (1, 0).
    ConstantSpinor,
    /// Smooth nowhere-zero trigonometric spinor.
    SmoothSpinor,
    /// Trivial connection times a constant-flux twist.
    FluxLinks,
    /// Smooth flux-free connection.
    SmoothLinks,
    /// Constant ω₁.
    ConstantForm,
    /// Self-dual form winding `degree` times over `plane`.
    WindingForm,
    /// σ of the smooth spinor.
    SquaredForm,
}

/// An error caused by bad input rather than a failed check.
#[derive(Debug)]
struct InputError(anyhow::Error);

fn input<T>(r: Result<T>) -> std::result::Result<T, InputError> {
    r.map_err(InputError)
}

fn load_pair(phi: &PathBuf, links: &PathBuf) -> Result<(U1Connection, SpinorField)> {
    let phi: SpinorField = load_field(phi).with_context(|| format!("reading {}", phi.display()))?;
    let a = FieldArchive::load(links)
        .and_then(|f| f.to_connection())
        .with_context(|| format!("reading {}", links.display()))?;
    a.grid().check_same(phi.grid()).context("phi and links live on different grids")?;
    Ok((a, phi))
}

fn flux_array(v: &[i64]) -> Result<[i64; 6]> {
    match v.try_into() {
        Ok(a) => Ok(a),
        Err(_) => bail!("--flux needs six integers, got {}", v.len()),
    }
}

fn run(command: Command, report: &mut RunReport) -> std::result::Result<(), InputError> {
    match command {
        Command::CalibrateSigma { grid, seed, trials } => {
            report.config("grid", grid).and_then(|r| r.config("trials", trials)).map_err(|e| InputError(e.into()))?;
            for t in 0..trials as u64 {
                report.seed(seed + t);
            }
            let g = input(Grid::cubic(grid).map_err(Into::into))?;
            let c = input(calibrate(&g, seed, trials).map_err(Into::into))?;
            put(report, "kappa", c.kappa)?;
            put(report, "epsilon", c.epsilon)?;
            put(report, "kappa_spread", c.kappa_spread)?;
            put(report, "max_residual", c.max_residual)?;
            put(report, "fits", &c.fits)?;
            report.check_below("kappa_spread", c.kappa_spread, 1e-6);
            report.check_below("identity_residual", c.max_residual, 1e-8);
            report.check_flag("epsilon_consistent", c.epsilon_consistent);
        }
        Command::VerifyAlgebra { seed } => {
            report.seed(seed);
            let checks = algebra_suite(seed);
            put(report, "suites", &checks)?;
            for c in &checks {
                if c.tol == 0.0 {
                    report.check_flag(&c.name, c.max_error == 0.0);
                } else {
                    report.check_below(&c.name, c.max_error, c.tol * (1.0 + f64::EPSILON));
                }
            }
        }
        Command::VerifyIdentity { grid, seed } => {
            put_config(report, "grid", &grid)?;
            report.seed(seed);
            if grid.len() < 2 {
                return Err(InputError(anyhow::anyhow!("--grid needs at least two sizes")));
            }
            let table = input(identity_convergence(&grid, seed).map_err(Into::into))?;
            let constant = input(constant_identity_residual(grid[0]).map_err(Into::into))?;
            put(report, "table", &table)?;
            put(report, "constant_residual", constant)?;
            match table.observed_order() {
                Some(order) => {
                    put(report, "observed_order", order)?;
                    report.check_within("observed_order", order, 1.7, 2.3);
                }
                None => {
                    report.check_flag("observed_order", false);
                }
            }
            report.check_below("constant_residual", constant, 1e-14 * (1.0 + f64::EPSILON));
        }
        Command::Solve {
            grid,
            flux,
            tol,
            seed,
            deflate,
            maxiter,
            out,
            links_out,
        } => {
            let flux = input(flux_array(&flux))?;
            put_config(report, "grid", grid)?;
            put_config(report, "flux", flux)?;
            put_config(report, "tol", tol)?;
            put_config(report, "deflate", deflate)?;
            put_config(report, "maxiter", maxiter)?;
            report.seed(seed);
            let g = input(Grid::cubic(grid).map_err(Into::into))?;
            let a = U1Connection::constant_flux(g, flux);
            let measured = input(flux_integers(&a).map_err(Into::into))?;
            put(report, "flux_integers", measured)?;
            let opts = SolveOptions {
                tol,
                seed,
                maxiter,
                ..Default::default()
            };
            let modes = match solve_modes(&a, deflate + 1, &opts) {
                Ok(m) => m,
                Err(spinc_core::Error::NotConverged { report: r }) => {
                    put(report, "solve", &r)?;
                    report.check_flag("converged", false);
                    return Ok(());
                }
                Err(e) => return Err(InputError(e.into())),
            };
            let reports: Vec<_> = modes.iter().map(|(_, r)| r.clone()).collect();
            let (phi, last) = modes.last().expect("at least one mode");
            put(report, "modes", &reports)?;
            put(report, "rayleigh", last.rayleigh)?;
            put(report, "dirac_rel_residual", last.dirac_rel_residual)?;
            input(save_field(phi, &out).with_context(|| format!("writing {}", out.display())))?;
            put(report, "phi_archive", out.display().to_string())?;
            if let Some(path) = links_out {
                input(FieldArchive::from_connection(&a).save(&path).with_context(|| format!("writing {}", path.display())))?;
                put(report, "links_archive", path.display().to_string())?;
            }
            report.check_flag("converged", last.converged);
            report.check_flag("flux_recovered", measured == flux);
        }
        Command::Pipeline { phi, links, tol } => {
            put_config(report, "phi", phi.display().to_string())?;
            put_config(report, "links", links.display().to_string())?;
            put_config(report, "tol", tol)?;
            let (a, phi) = input(load_pair(&phi, &links))?;
            let k = input(kahler_pipeline(&a, &phi, tol).map_err(Into::into))?;
            let p = &k.pipeline;
            put(report, "pipeline", p)?;
            put(report, "parallel", k.parallel)?;
            put(report, "sigma_deviation", k.sigma_deviation)?;
            if let Some(v) = k.conformal_factor_variance {
                put(report, "conformal_factor_variance", v)?;
            }
            report.check_below("dirac_rel_residual", p.dirac_rel_residual, tol);
            report.check_flag("nowhere_zero", p.nowhere_zero);
            report.check_below("transversality_norm", p.transversality_norm, tol);
            report.check_below("closedness_residual", p.closedness_residual, tol);
            report.check_below("acs_defect", p.acs_defect.unwrap_or(f64::INFINITY), 1e-10);
            report.check_flag("degree_vector_defined", p.degree_vector.is_some());
        }
        Command::Degrees { alpha, reference, tol } => {
            put_config(report, "alpha", alpha.display().to_string())?;
            put_config(report, "tol", tol)?;
            let field: Field<SdForm> =
                input(load_field(&alpha).with_context(|| format!("reading {}", alpha.display())))?;
            match reference {
                Some(path) => {
                    put_config(report, "ref", path.display().to_string())?;
                    let r: Field<SdForm> =
                        input(load_field(&path).with_context(|| format!("reading {}", path.display())))?;
                    let cmp = input(c1_equal(&field, &r, tol).map_err(Into::into))?;
                    put(report, "alpha_degrees", cmp.alpha)?;
                    put(report, "reference_degrees", cmp.reference)?;
                    put(report, "c1_equal", cmp.equal)?;
                    report.check_flag("slice_independent", cmp.slice_independent);
                    report.check_flag("c1_equal", cmp.equal);
                }
                None => {
                    let map = input(sphere_map(&field, tol).map_err(Into::into))?;
                    let degrees = input(degree_vector(&map, [0; 4]).map_err(Into::into))?;
                    let independent = input(slice_independent(&map).map_err(Into::into))?;
                    put(report, "alpha_degrees", degrees)?;
                    report.check_flag("slice_independent", independent);
                }
            }
        }
        Command::GaugeCheck {
            phi,
            links,
            seed,
            count,
            tol,
        } => {
            put_config(report, "phi", phi.display().to_string())?;
            put_config(report, "links", links.display().to_string())?;
            put_config(report, "count", count)?;
            put_config(report, "tol", tol)?;
            report.seed(seed);
            let (a, phi) = input(load_pair(&phi, &links))?;
            let suite = input(gauge_suite(&a, &phi, seed, count).map_err(Into::into))?;
            put(report, "suite", &suite)?;
            report.check_below("sigma_change", suite.max_sigma_change, tol);
            report.check_below("identity_change", suite.max_identity_change, tol);
            report.check_below("pipeline_change", suite.max_pipeline_change, tol);
            report.check_flag("flux_unchanged", suite.flux_unchanged);
            report.check_flag("degrees_unchanged", suite.degrees_unchanged);
        }
        Command::Generate {
            what,
            grid,
            seed,
            flux,
            plane,
            degree,
            out,
        } => {
            let flux = input(flux_array(&flux))?;
            let name = what.to_possible_value().expect("named").get_name().to_string();
            put_config(report, "fixture", &name)?;
            put_config(report, "grid", grid)?;
            report.seed(seed);
            if plane >= 6 {
                return Err(InputError(anyhow::anyhow!("--plane must be in 0..6")));
            }
            let g = input(Grid::cubic(grid).map_err(Into::into))?;
            let smooth = || TrigSpinor::random(seed, 1, 0.5);
            let archive = match what {
                Fixture::ConstantSpinor => FieldArchive::from_field(&Field::constant(
                    g,
                    spinc_core::clifford::SpinorPlus::new(1.0.into(), 0.0.into()),
                )),
                Fixture::SmoothSpinor => FieldArchive::from_field(&smooth().sample(g)),
                Fixture::FluxLinks => FieldArchive::from_connection(&U1Connection::constant_flux(g, flux)),
                Fixture::SmoothLinks => {
                    let pot = random_one_form(seed, 1, 0.5);
                    FieldArchive::from_connection(&U1Connection::from_smooth(g, |x, mu| pot.components[mu].eval(x)))
                }
                Fixture::ConstantForm => FieldArchive::from_field(&Field::constant(g, SdForm::basis(0))),
                Fixture::WindingForm => FieldArchive::from_field(&winding_field(g, plane, degree)),
                Fixture::SquaredForm => FieldArchive::from_field(&sigma_field(&smooth().sample(g))),
            };
            input(archive.save(&out).with_context(|| format!("writing {}", out.display())))?;
            put(report, "kind", archive.kind.name())?;
            put(report, "archive", out.display().to_string())?;
        }
    }
    Ok(())
}

fn put(report: &mut RunReport, key: &str, value: impl serde::Serialize) -> std::result::Result<(), InputError> {
    report.result(key, value).map(|_| ()).map_err(|e| InputError(e.into()))
}

fn put_config(report: &mut RunReport, key: &str, value: impl serde::Serialize) -> std::result::Result<(), InputError> {
    report.config(key, value).map(|_| ()).map_err(|e| InputError(e.into()))
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::CalibrateSigma { .. } => "calibrate-sigma",
        Command::VerifyAlgebra { .. } => "verify-algebra",
        Command::VerifyIdentity { .. } => "verify-identity",
        Command::Solve { .. } => "solve",
        Command::Pipeline { .. } => "pipeline",
        Command::Degrees { .. } => "degrees",
        Command::GaugeCheck { .. } => "gauge-check",
        Command::Generate { .. } => "generate",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            eprint!("{}", e.render());
            let mut report = RunReport::new("spinc");
            report.fail(e.kind().to_string());
            print!("{}", report.to_json());
            return ExitCode::from(2);
        }
        Err(e) => {
            // --help and --version
            print!("{}", e.render());
            return ExitCode::SUCCESS;
        }
    };
    let mut report = RunReport::new(command_name(&cli.command));
    let code = match run(cli.command, &mut report) {
        Ok(()) if report.passed() => 0,
        Ok(()) => 1,
        Err(InputError(e)) => {
            report.fail(format!("{e:#}"));
            2
        }
    };
    print!("{}", report.to_json());
    ExitCode::from(code)
}
