use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand};

use trotter_bench::config::{ExperimentConfig, ModelSelector};
use trotter_bench::csv::fmt_f64;
use trotter_bench::error::{HarnessError, Result};
use trotter_bench::experiments::{
    format_order, max_summand_norm, run_anneal_trials, run_heisenberg_comparison,
    write_anneal_csvs, AnnealMeta,
};
use trotter_bench::scaling::fit_from_csv;
use trotter_bench::svg::{render_plot, PlotKind};
use trotter_core::anneal::AnnealSchedule;
use trotter_core::bounds::{
    commutator_bound, error_kernel, kernel_observation_bound, lloyd_bound, observation_cost_fast,
    observation_error_fixed_state, observation_error_worst_case, principal_bound_integral,
    random_input_bound, BoundFamily,
};
use trotter_core::dense::{validate_density_matrix, DenseOperator};
use trotter_core::formula::{
    equivalent_hamiltonian_dense, exact_evolution, product_formula, FormulaSpec,
};
use trotter_core::model::parse_hamiltonian;
use trotter_core::{CoreError, HamiltonianModel};

#[derive(Parser)]
#[command(name = "trotter-bench", version, about = "Trotter error bounds and order annealing")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every bound family for one model, time, and step count.
    Bounds {
        #[arg(long)]
        hamiltonian: PathBuf,
        #[arg(long)]
        observable: PathBuf,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        order: u32,
        /// Optional density-matrix file; switches the empirical row from the
        /// worst case to this fixed state.
        #[arg(long)]
        rho: Option<PathBuf>,
    },
    /// Anneal the summand evolution order and write trace CSVs.
    Anneal {
        #[arg(long)]
        hamiltonian: PathBuf,
        #[arg(long)]
        observable: PathBuf,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        order: u32,
        #[arg(long)]
        theta0: f64,
        #[arg(long)]
        theta_inf: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        trials: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare Trotter numbers across bound families on a model family.
    Compare {
        #[arg(long)]
        model: String,
        #[arg(long)]
        n_min: usize,
        #[arg(long)]
        n_max: usize,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        order: u32,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit the growth exponent of one family's Trotter numbers.
    Scaling {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        family: String,
    },
    /// Render a CSV artifact as an SVG chart.
    Plot {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        kind: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli.cmd) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn load_model(path: &Path) -> Result<HamiltonianModel> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    Ok(parse_hamiltonian(&text)?)
}

fn load_operator(path: &Path, n: usize) -> Result<DenseOperator> {
    let m = load_model(path)?;
    if m.n() != n {
        return Err(HarnessError::Config(format!(
            "{} acts on {} qubits, the model on {n}",
            path.display(),
            m.n()
        )));
    }
    Ok(DenseOperator::from_pauli_sum(&m.total()))
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Bounds { hamiltonian, observable, t, r, order, rho } => {
            let h = load_model(&hamiltonian)?;
            let o = load_operator(&observable, h.n())?;
            let rho = match rho {
                Some(path) => {
                    let m = load_operator(&path, h.n())?;
                    validate_density_matrix(&m)?;
                    Some(m)
                }
                None => None,
            };
            let spec = FormulaSpec::new(order, t, r)?;
            print_bounds(&h, &o, rho.as_ref(), &spec)
        }
        Command::Anneal {
            hamiltonian,
            observable,
            t,
            r,
            order,
            theta0,
            theta_inf,
            alpha,
            seed,
            trials,
            out,
        } => {
            if trials == 0 {
                return Err(HarnessError::Config("at least one trial is required".into()));
            }
            let h = load_model(&hamiltonian)?;
            let o = load_operator(&observable, h.n())?;
            let spec = FormulaSpec::new(order, t, r)?;
            let schedule = AnnealSchedule::new(theta0, theta_inf, alpha, seed)?;
            let run = run_anneal_trials(&h, &o, &spec, &schedule, trials, seed)?;
            let meta = AnnealMeta {
                model: format!("file:{}", hamiltonian.display()),
                n: h.n(),
                t,
                epsilon: None,
                formula_order: order,
                theta0,
                theta_inf,
                alpha,
                base_seed: seed,
                trials,
            };
            let files = write_anneal_csvs(&run, &meta, &out)?;
            println!(
                "annealed {} trials of {} proposals at r={}",
                trials, run.iterations, run.r
            );
            println!(
                "mean cost {} -> {}, best {} at order {}",
                fmt_f64(run.mean_initial),
                fmt_f64(run.mean_final),
                fmt_f64(run.best_cost),
                format_order(&run.best_order)
            );
            for f in files {
                println!("wrote {}", f.display());
            }
            Ok(())
        }
        Command::Compare { model, n_min, n_max, epsilon, order, seed, out } => {
            if model != "heisenberg" {
                return Err(HarnessError::Config(format!(
                    "unsupported comparison model '{model}', expected heisenberg"
                )));
            }
            let mut cfg = ExperimentConfig::heisenberg_defaults(&out)?;
            cfg.model = ModelSelector::Heisenberg;
            cfg.n_min = n_min;
            cfg.n_max = n_max;
            cfg.epsilon = epsilon;
            cfg.formula_order = order;
            cfg.seed = seed;
            cfg.validate()?;
            let arts = run_heisenberg_comparison(&cfg)?;
            for row in &arts.rows {
                match row.r_star {
                    Some(r) => println!("n={} {} r*={}", row.n, row.family.name(), r),
                    None => println!("n={} {} r* exceeds the step cap", row.n, row.family.name()),
                }
            }
            for f in arts.files {
                println!("wrote {}", f.display());
            }
            Ok(())
        }
        Command::Scaling { csv, family } => {
            let fit = fit_from_csv(&csv, &family)?;
            println!(
                "family={family} points={} exponent={} intercept={} r_squared={}",
                fit.points, fit.exponent, fit.intercept, fit.r_squared
            );
            Ok(())
        }
        Command::Plot { csv, kind, out } => {
            let kind = PlotKind::from_str(&kind)?;
            render_plot(&csv, kind, &out)?;
            println!("wrote {}", out.display());
            Ok(())
        }
    }
}

fn print_bounds(
    h: &HamiltonianModel,
    o: &DenseOperator,
    rho: Option<&DenseOperator>,
    spec: &FormulaSpec,
) -> Result<()> {
    let t = spec.t();
    let lambda = max_summand_norm(h)?;
    let lloyd = lloyd_bound(spec, h.len(), lambda)?;
    let comm = commutator_bound(h, spec)?;
    let rand = random_input_bound(h, spec, h.n() as u32)?;
    let obs = observation_cost_fast(h, o, spec)?;

    let u = exact_evolution(h, t)?;
    let v = product_formula(h, spec)?;
    let kernel = error_kernel(&u, &v, t)?;
    if kernel.branch_warning {
        eprintln!("warning: an eigenphase sat at the branch point and was mapped to +pi");
    }
    let kernel_value = kernel_observation_bound(&kernel.e, o, t)?;

    let (htilde, branch) = equivalent_hamiltonian_dense(h, spec)?;
    if branch {
        eprintln!("warning: a block eigenphase sat at the branch point and was mapped to +pi");
    }
    let h_dense = DenseOperator::from_pauli_sum(&h.total());
    let hp = htilde.sub(&h_dense)?;
    let pint = principal_bound_integral(&htilde, &hp, o, t)?;
    if !pint.converged {
        return Err(HarnessError::Core(CoreError::Numerical(
            "the principal bound quadrature did not converge".into(),
        )));
    }

    let empirical = match rho {
        Some(rho) => observation_error_fixed_state(&u, &v, o, rho)?,
        None => observation_error_worst_case(&u, &v, o)?,
    };

    println!("family,formula_order,t,r,approx,value");
    let rows: [(BoundFamily, bool, f64); 7] = [
        (BoundFamily::Lloyd, false, lloyd.value),
        (BoundFamily::Commutator, false, comm.value),
        (BoundFamily::RandomInput, false, rand.value),
        (BoundFamily::Observation, true, obs.value),
        (BoundFamily::KernelExact, false, kernel_value),
        (BoundFamily::PrincipalIntegral, false, pint.value),
        (BoundFamily::Empirical, false, empirical),
    ];
    for (family, approx, value) in rows {
        println!(
            "{},{},{},{},{},{}",
            family.name(),
            spec.order(),
            fmt_f64(t),
            spec.r(),
            approx,
            fmt_f64(value)
        );
    }
    Ok(())
}
