use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use lipdon::evi::{solve_vi, ProblemFile, SolverConfig};
use lipdon::harness::config::{certify_components, run_end_to_end, ExampleKind, ExperimentConfig};
use lipdon::harness::{truncation_rate_study, universality_study, RateMode};
use lipdon::hs::{functional_calculus, read_matrix, truncated_calculus, write_matrix, MatrixFormat, ScalarFn};
use lipdon::planner::{plan, PlannerConstants};
use lipdon::surrogate::Backend;
use lipdon::weights::{SmoothnessParams, WeightSequence};

#[derive(Parser)]
#[command(name = "lipdon", version, about = "Truncation planning and surrogate experiments for Lipschitz operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Example {
    Evi,
    Hs,
    Synthetic,
}

impl From<Example> for ExampleKind {
    fn from(e: Example) -> Self {
        match e {
            Example::Evi => ExampleKind::Evi,
            Example::Hs => ExampleKind::Hs,
            Example::Synthetic => ExampleKind::Synthetic,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Output,
    Input,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Grid,
    Net,
}

/// Flags shared by the experiment subcommands; each overrides the config file.
#[derive(clap::Args)]
struct ExperimentArgs {
    #[arg(long, value_enum)]
    example: Option<Example>,
    /// JSON experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Where to write results; defaults to `$LIPDON_OUT_DIR` or the working directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ExperimentArgs {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = match (&self.config, self.example) {
            (Some(path), _) => ExperimentConfig::from_file(path)
                .with_context(|| format!("reading config {}", path.display()))?,
            (None, Some(e)) => ExperimentConfig::for_example(e.into()),
            (None, None) => bail!("pass --example or --config"),
        };
        if let (Some(e), Some(_)) = (self.example, &self.config) {
            if cfg.example != ExampleKind::from(e) {
                bail!("--example disagrees with the config file");
            }
        }
        if let Some(n) = self.samples {
            cfg.samples = n;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(o) = &self.out {
            cfg.out = Some(o.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the truncation plan for accuracy `eps` as JSON.
    Plan {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        /// Exponent of the power weights `i^-p`.
        #[arg(long, default_value_t = 1.0)]
        weight_power: f64,
        /// JSON file with planner constants.
        #[arg(long)]
        constants: Option<PathBuf>,
    },
    /// Measure truncation errors and fit their decay rate.
    Rates {
        #[command(flatten)]
        exp: ExperimentArgs,
        #[arg(long, value_enum, default_value = "output")]
        mode: Mode,
        /// Comma-separated, strictly increasing.
        #[arg(long, value_delimiter = ',')]
        indices: Option<Vec<usize>>,
    },
    /// Calibrate, plan, assemble a surrogate and report its error.
    Run {
        #[command(flatten)]
        exp: ExperimentArgs,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_enum, default_value = "grid")]
        backend: BackendArg,
    },
    /// Sup error of the level-n surrogates for n = 1..=n_max.
    Universality {
        #[command(flatten)]
        exp: ExperimentArgs,
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        /// Size of the fixed sample set.
        #[arg(long, default_value_t = 100)]
        compact: usize,
    },
    /// Lipschitz certificates for the operator and its components.
    Certify {
        #[command(flatten)]
        exp: ExperimentArgs,
        #[arg(long, default_value_t = 1000)]
        pairs: usize,
        #[arg(long, default_value_t = 8)]
        components: usize,
    },
    /// Solve an obstacle problem file and print the solution as JSON.
    Solve {
        problem: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply a scalar function to the singular values of a matrix file.
    Calculus {
        input: PathBuf,
        /// `identity`, `soft:<level>`, `clip:<level>` or `scale:<factor>`.
        #[arg(long, default_value = "identity")]
        f: String,
        /// Keep only the largest singular triples.
        #[arg(long)]
        truncate: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_scalar_fn(spec: &str) -> Result<ScalarFn> {
    let (name, arg) = match spec.split_once(':') {
        Some((n, a)) => (n, Some(a.parse::<f64>().with_context(|| format!("bad number in {spec:?}"))?)),
        None => (spec, None),
    };
    let f = match (name, arg) {
        ("identity", None) => ScalarFn::Identity,
        ("soft", Some(c)) => ScalarFn::SoftThreshold(c),
        ("clip", Some(c)) => ScalarFn::Clip(c),
        ("scale", Some(a)) => ScalarFn::Scaled(a),
        _ => bail!("unknown function {spec:?}"),
    };
    f.check()?;
    Ok(f)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("writing {}", path.display()))?,
    ))
}

fn write_json(value: &impl serde::Serialize, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            let mut w = create(path)?;
            serde_json::to_writer_pretty(&mut w, value)?;
            writeln!(w)?;
            w.flush()?;
        }
        None => println!("{}", serde_json::to_string_pretty(value)?),
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Plan {
            eps,
            s,
            t,
            gamma,
            r,
            weight_power,
            constants,
        } => {
            let params = SmoothnessParams::new(s, t, r, gamma)?;
            let consts = match constants {
                Some(path) => serde_json::from_reader(BufReader::new(
                    File::open(&path).with_context(|| format!("opening {}", path.display()))?,
                ))?,
                None => PlannerConstants::defaults(&params),
            };
            let p = plan(eps, &params, &consts, &WeightSequence::power(weight_power)?)?;
            println!("{}", serde_json::to_string(&p)?);
        }
        Command::Rates { exp, mode, indices } => {
            let mut cfg = exp.load()?;
            if let Some(ix) = indices {
                cfg.indices = ix;
            }
            let mode = match mode {
                Mode::Output => RateMode::Output,
                Mode::Input => RateMode::Input,
            };
            let study = cfg.study()?;
            let report = truncation_rate_study(study.as_ref(), &cfg.indices, mode, cfg.samples)?;
            let path = cfg.output_path("rates.csv");
            let mut w = create(&path)?;
            report.write_csv(&mut w)?;
            w.flush()?;
            println!(
                "slope={:.4} predicted={} pass={} -> {}",
                report.slope,
                report.predicted,
                report.pass,
                path.display()
            );
        }
        Command::Run { exp, eps, backend } => {
            let cfg = exp.load()?;
            let backend = match backend {
                BackendArg::Grid => Backend::GridInterpolant,
                BackendArg::Net => Backend::TrainedNet,
            };
            let report = run_end_to_end(&cfg, eps, backend)?;
            let path = cfg.output_path("run.json");
            write_json(&report, Some(&path))?;
            println!(
                "rmse={:.4e} ci={:.1e} eps={} pass={} -> {}",
                report.rmse,
                report.ci,
                eps,
                report.pass,
                path.display()
            );
        }
        Command::Universality { exp, n_max, compact } => {
            let cfg = exp.load()?;
            let levels: Vec<usize> = (1..=n_max).collect();
            let op = cfg.operator()?;
            let law = cfg.law()?;
            let report = universality_study(
                &op,
                &law,
                &levels,
                compact,
                &cfg.fit_options(Backend::GridInterpolant),
            )?;
            let path = cfg.output_path("universality.csv");
            let mut w = create(&path)?;
            report.write_csv(&mut w)?;
            w.flush()?;
            println!("pass={} -> {}", report.pass(), path.display());
        }
        Command::Certify {
            exp,
            pairs,
            components,
        } => {
            let cfg = exp.load()?;
            let report = certify_components(&cfg, pairs, components, 8)?;
            write_json(&report, exp.out.as_deref())?;
        }
        Command::Solve { problem, tol, out } => {
            let file: ProblemFile = serde_json::from_reader(BufReader::new(
                File::open(&problem).with_context(|| format!("opening {}", problem.display()))?,
            ))?;
            let mut solver = SolverConfig::default();
            if let Some(t) = tol {
                solver.tol = t;
            }
            let sol = solve_vi(&file.to_problem()?, &solver)?;
            write_json(&sol, out.as_deref())?;
        }
        Command::Calculus {
            input,
            f,
            truncate,
            out,
        } => {
            let f = parse_scalar_fn(&f)?;
            let a = read_matrix(
                BufReader::new(File::open(&input).with_context(|| format!("opening {}", input.display()))?),
                MatrixFormat::from_path(&input),
            )?;
            let b = match truncate {
                Some(n) => truncated_calculus(&a, &f, n)?,
                None => functional_calculus(&a, &f)?,
            };
            match out {
                Some(path) => {
                    let mut w = create(&path)?;
                    write_matrix(&mut w, &b, MatrixFormat::from_path(&path))?;
                    w.flush()?;
                }
                None => write_matrix(std::io::stdout().lock(), &b, MatrixFormat::Csv)?,
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_function_specs() {
        assert!(matches!(parse_scalar_fn("identity").unwrap(), ScalarFn::Identity));
        assert!(matches!(parse_scalar_fn("soft:0.5").unwrap(), ScalarFn::SoftThreshold(c) if c == 0.5));
        assert!(matches!(parse_scalar_fn("scale:-2").unwrap(), ScalarFn::Scaled(a) if a == -2.0));
        assert!(parse_scalar_fn("soft").is_err());
        assert!(parse_scalar_fn("soft:x").is_err());
        assert!(parse_scalar_fn("cube").is_err());
    }
}
