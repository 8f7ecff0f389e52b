mod commands;
mod config;
mod schema;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use wellfilled::Error;

use commands::{ApproximateInputs, Outcome, PalaisSource, Pi1Source};
use config::RunConfig;

const EXIT_INPUT: u8 = 2;
const EXIT_RESOLUTION: u8 = 3;
const EXIT_PROPERTY: u8 = 4;

/// Exact experiments on filtered spaces: subdivision, filling, direct limits,
/// chart validation and homotopies into finite steps.
#[derive(Parser, Debug)]
#[command(name = "wellfilled", version)]
struct Cli {
    /// Print the JSON schema of an input kind (or of all kinds) and exit.
    #[arg(long, value_name = "KIND", num_args = 0..=1, default_missing_value = "all")]
    schema: Option<String>,
    /// Seed of every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Times checked along each homotopy.
    #[arg(long, global = true)]
    t_grid: Option<usize>,
    /// Random points per simplex in sampled checks.
    #[arg(long, global = true)]
    samples_per_simplex: Option<usize>,
    /// Cap on barycentric subdivisions in the approximation engine.
    #[arg(long, global = true)]
    max_subdivision: Option<usize>,
    /// Samples of the density check.
    #[arg(long, global = true)]
    density_samples: Option<usize>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Barycentric subdivision until every simplex is shorter than delta.
    Subdivide {
        #[arg(long)]
        input: PathBuf,
        /// Threshold as a rational or decimal literal.
        #[arg(long)]
        delta: String,
        /// Writes the subdivided complex here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the a-priori bound on the number of subdivisions.
        #[arg(long)]
        max_level: Option<usize>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Evaluates the filling of a boundary map at probe points.
    Fill {
        #[arg(long)]
        simplex: PathBuf,
        #[arg(long)]
        boundary: PathBuf,
        #[arg(long)]
        probe: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Direct limit of a finite system of finite sets.
    Colimit {
        #[arg(long)]
        system: PathBuf,
        /// A cone to factor through the colimit.
        #[arg(long)]
        cone: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Checks the conditions of a translation chart against a model.
    ValidateChart {
        #[arg(long)]
        chart: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Homotopes a PL map into a finite step relative to a subcomplex.
    Approximate {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        relative: Option<PathBuf>,
        #[arg(long)]
        model: PathBuf,
        /// Step holding the values on the relative subcomplex; defaults to the bottom step.
        #[arg(long)]
        alpha: Option<usize>,
        /// Writes the homotopy record here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Direct-limit experiments.
    Experiment {
        #[command(subcommand)]
        which: Experiment,
    },
}

#[derive(Subcommand, Debug)]
enum Experiment {
    /// Path components of the steps against those of the carrier.
    Pi0 {
        /// A component model; random models are generated when absent.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        random: usize,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Winding classes of loops in a punctured model.
    Pi1 {
        #[arg(long, required_unless_present = "builtin")]
        model: Option<PathBuf>,
        #[arg(long, required_unless_present = "builtin")]
        probes: Option<PathBuf>,
        #[arg(long)]
        step_loops: Option<PathBuf>,
        /// Runs the built-in eight-dimensional punctured model.
        #[arg(long, conflicts_with_all = ["model", "probes", "step_loops"])]
        builtin: bool,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// The union of the steps against the carrier on pi_0 and pi_1.
    Palais {
        #[arg(long, requires = "input", conflicts_with = "builtin")]
        model: Option<PathBuf>,
        #[arg(long, requires = "model")]
        input: Option<PathBuf>,
        #[arg(long, required_unless_present = "model")]
        builtin: Option<BuiltinPalais>,
        /// Ambient sample points of a built-in model.
        #[arg(long, default_value_t = 24)]
        samples: usize,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        plot: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BuiltinPalais {
    TwoBall,
    PuncturedSlab,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::ResolutionExceeded(_) => EXIT_RESOLUTION,
        Error::ChartCover(_) | Error::AbsorptionFailure { .. } => EXIT_PROPERTY,
        _ => EXIT_INPUT,
    }
}

fn write(path: &Path, text: &str) -> wellfilled::Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

/// Writes the report (to `report` or stdout), the plot data and any artifact.
fn emit(
    outcome: &Outcome,
    report: Option<&Path>,
    plot: Option<&Path>,
    artifact: Option<&Path>,
) -> wellfilled::Result<()> {
    match report {
        Some(p) => {
            write(p, &pretty(&outcome.report))?;
            for line in &outcome.summary {
                println!("{line}");
            }
        }
        None => print!("{}", pretty(&outcome.report)),
    }
    if let (Some(p), Some(text)) = (plot, &outcome.plot) {
        write(p, text)?;
    }
    if let (Some(p), Some(v)) = (artifact, &outcome.artifact) {
        write(p, &pretty(v))?;
    }
    Ok(())
}

fn run(cli: Cli) -> wellfilled::Result<bool> {
    let mut cfg = RunConfig {
        seed: cli.seed,
        jobs: cli.jobs.max(1),
        ..RunConfig::default()
    };
    cfg.t_grid = cli.t_grid.unwrap_or(cfg.t_grid);
    cfg.samples_per_simplex = cli.samples_per_simplex.unwrap_or(cfg.samples_per_simplex);
    cfg.max_subdivision = cli.max_subdivision.unwrap_or(cfg.max_subdivision);
    cfg.density_samples = cli.density_samples.unwrap_or(cfg.density_samples);
    rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build_global()
        .map_err(|e| Error::input(e.to_string()))?;

    let Some(command) = cli.command else {
        return Err(Error::input("no subcommand given; see --help"));
    };
    let (outcome, report, plot, artifact) = match command {
        Command::Subdivide {
            input,
            delta,
            out,
            max_level,
            report,
        } => (
            commands::subdivide(&mut cfg, &input, &delta, max_level)?,
            report,
            None,
            out,
        ),
        Command::Fill {
            simplex,
            boundary,
            probe,
            report,
        } => (
            commands::fill(&mut cfg, &simplex, &boundary, &probe)?,
            report,
            None,
            None,
        ),
        Command::Colimit {
            system,
            cone,
            report,
        } => (
            commands::colimit(&mut cfg, &system, cone.as_deref())?,
            report,
            None,
            None,
        ),
        Command::ValidateChart {
            chart,
            model,
            report,
        } => (
            commands::validate_chart(&mut cfg, &chart, &model)?,
            report,
            None,
            None,
        ),
        Command::Approximate {
            complex,
            map,
            spec,
            relative,
            model,
            alpha,
            out,
        } => {
            let inp = ApproximateInputs {
                complex: &complex,
                map: &map,
                spec: &spec,
                relative: relative.as_deref(),
                model: &model,
                alpha,
            };
            (commands::approximate(&mut cfg, &inp)?, out, None, None)
        }
        Command::Experiment { which } => match which {
            Experiment::Pi0 {
                model,
                random,
                report,
                plot,
            } => (
                commands::pi0(&mut cfg, model.as_deref(), random)?,
                report,
                plot,
                None,
            ),
            Experiment::Pi1 {
                model,
                probes,
                step_loops,
                builtin,
                report,
                plot,
            } => {
                let src = match (builtin, &model, &probes) {
                    (false, Some(model), Some(probes)) => Pi1Source::Files {
                        model,
                        probes,
                        step_loops: step_loops.as_deref(),
                    },
                    _ => Pi1Source::Punctured,
                };
                (commands::pi1(&mut cfg, src)?, report, plot, None)
            }
            Experiment::Palais {
                model,
                input,
                builtin,
                samples,
                report,
                plot,
            } => {
                let src = match (builtin, &model, &input) {
                    (Some(BuiltinPalais::TwoBall), _, _) => PalaisSource::TwoBall { samples },
                    (Some(BuiltinPalais::PuncturedSlab), _, _) => {
                        PalaisSource::PuncturedSlab { samples }
                    }
                    (None, Some(model), Some(input)) => PalaisSource::Files { model, input },
                    _ => {
                        return Err(Error::input(
                            "palais needs --builtin or both --model and --input",
                        ))
                    }
                };
                (commands::palais(&mut cfg, src)?, report, plot, None)
            }
        },
    };
    emit(
        &outcome,
        report.as_deref(),
        plot.as_deref(),
        artifact.as_deref(),
    )?;
    Ok(outcome.holds)
}

fn print_schema(kind: &str) -> ExitCode {
    let all = schema::schemas();
    let picked: Vec<_> = all
        .iter()
        .filter(|(name, _)| kind == "all" || *name == kind)
        .collect();
    if picked.is_empty() {
        let names: Vec<&str> = all.iter().map(|(n, _)| *n).collect();
        eprintln!("unknown schema {kind:?}; known: {}", names.join(", "));
        return ExitCode::from(EXIT_INPUT);
    }
    for (name, s) in picked {
        if kind == "all" {
            println!("# {name}");
        }
        print!("{}", pretty(s));
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(kind) = &cli.schema {
        return print_schema(kind);
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("property check failed; the report was written");
            ExitCode::from(EXIT_PROPERTY)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
