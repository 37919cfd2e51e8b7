use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use quantiles_core::dataset::{earthquake_demo, read_earthquakes, table_one, EarthquakeRecord};
use quantiles_core::diagnostics::{
    check_decreasing_equivariance, check_left_equivariance, check_right_equivariance,
    check_sandwich, check_symmetry, search_counterexamples, DecreasingVariant, DropHypothesis,
    TheoremReport,
};
use quantiles_core::io::{parse_distribution, parse_map, render_distribution, render_number};
use quantiles_core::quantile::{left_quantile, right_quantile};
use quantiles_core::{Distribution, ExtendedReal, PiecewiseAffineMap, ProbabilityLevel, Rational};

#[derive(Parser)]
#[command(name = "quantiles", disable_help_subcommand = true)]
#[command(about = "Exact quantiles, pushforwards and equivariance checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the left/right quantile of a distribution file
    Quantile {
        #[arg(long)]
        dist: PathBuf,
        /// probability level, rational ("1/2") or decimal ("0.5")
        #[arg(long)]
        p: String,
        #[arg(long, value_enum, default_value_t = Side::Both)]
        side: Side,
    },
    /// Write the exact image distribution under a map
    Pushforward {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check one equivariance identity on concrete inputs
    Check {
        #[arg(long)]
        theorem: TheoremArg,
        #[arg(long)]
        dist: PathBuf,
        /// required for every theorem except symmetry
        #[arg(long)]
        map: Option<PathBuf>,
        #[arg(long)]
        p: String,
    },
    /// Randomized counterexample search
    Search {
        #[arg(long, value_enum, default_value_t = DropArg::None)]
        drop: DropArg,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Bundled demonstrations
    Demo {
        #[command(subcommand)]
        which: DemoCommand,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Side {
    Left,
    Right,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum TheoremArg {
    LeftEquivariance,
    RightEquivariance,
    DecreasingA,
    DecreasingB,
    Symmetry,
    Sandwich,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DropArg {
    None,
    LeftContinuity,
    RightContinuity,
}

#[derive(Subcommand)]
enum DemoCommand {
    /// Median rescaling comparison on the bundled seismic table
    Earthquake {
        /// CSV with "ml" and "amplitude" columns; bundled table if absent
        #[arg(long)]
        csv: Option<PathBuf>,
        /// significant digits for the rescaling comparison
        #[arg(long, default_value_t = 7)]
        precision: u32,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
        Err(e) => {
            // help or version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Quantile { dist, p, side } => {
            let d = load_distribution(&dist)?;
            let p = parse_level(&p)?;
            cmd_quantile(&d, &p, side);
            Ok(ExitCode::SUCCESS)
        }
        Command::Pushforward { dist, map, out } => {
            let d = load_distribution(&dist)?;
            let phi = load_map(&map)?;
            let image = quantiles_core::transform::pushforward(&d, &phi);
            fs::write(&out, render_distribution(&image) + "\n")
                .with_context(|| format!("writing {}", out.display()))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Check {
            theorem,
            dist,
            map,
            p,
        } => {
            let d = load_distribution(&dist)?;
            let p = parse_level(&p)?;
            let reports = cmd_check(theorem, &d, map.as_deref(), &p)?;
            let mut violation = false;
            for report in &reports {
                println!("{report}");
                violation |= report.is_violation();
            }
            Ok(if violation {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Search { drop, trials, seed } => {
            let hypothesis = match drop {
                DropArg::None => DropHypothesis::None,
                DropArg::LeftContinuity => DropHypothesis::LeftContinuity,
                DropArg::RightContinuity => DropHypothesis::RightContinuity,
            };
            let violations = search_counterexamples(seed, trials, hypothesis)
                .map_err(|e| anyhow!("{e}"))?;
            for report in &violations {
                println!("{report}");
                if let Some(witness) = &report.witness {
                    println!("  witness: {witness}");
                }
            }
            println!("trials={trials} violations={}", violations.len());
            Ok(if drop == DropArg::None && !violations.is_empty() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Demo { which } => {
            let DemoCommand::Earthquake { csv, precision } = which;
            let records = match csv {
                Some(path) => load_earthquakes(&path)?,
                None => table_one(),
            };
            if precision == 0 {
                bail!("--precision must be at least 1");
            }
            let report =
                earthquake_demo(&records, precision).map_err(|e| anyhow!("{e}"))?;
            println!("precision={}", report.precision);
            print_comparison("weighted", &report.weighted);
            print_comparison("left", &report.left);
            print_comparison("right", &report.right);
            println!("discrepancy={}", render_number(&report.discrepancy));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn cmd_quantile(d: &Distribution, p: &ProbabilityLevel, side: Side) {
    let lq = (side != Side::Right).then(|| left_quantile(d, p));
    let rq = (side != Side::Left).then(|| right_quantile(d, p));
    let exact: Vec<String> = [
        lq.as_ref().map(|v| format!("lq={v}")),
        rq.as_ref().map(|v| format!("rq={v}")),
    ]
    .into_iter()
    .flatten()
    .collect();
    println!("{}", exact.join(" "));

    // a second line with decimal renderings, unless nothing is finite
    let decimal = |v: &ExtendedReal| match v.finite() {
        Some(q) => q.to_decimal_string(),
        None => v.to_string(),
    };
    if lq.iter().chain(rq.iter()).any(ExtendedReal::is_finite) {
        let approx: Vec<String> = [
            lq.as_ref().map(|v| format!("lq={}", decimal(v))),
            rq.as_ref().map(|v| format!("rq={}", decimal(v))),
        ]
        .into_iter()
        .flatten()
        .collect();
        println!("{}", approx.join(" "));
    }
}

fn cmd_check(
    theorem: TheoremArg,
    d: &Distribution,
    map: Option<&std::path::Path>,
    p: &ProbabilityLevel,
) -> Result<Vec<TheoremReport>> {
    let load = || -> Result<PiecewiseAffineMap> {
        let path = map.ok_or_else(|| anyhow!("--map is required for this theorem"))?;
        load_map(path)
    };
    Ok(match theorem {
        TheoremArg::LeftEquivariance => vec![check_left_equivariance(d, &load()?, p)],
        TheoremArg::RightEquivariance => vec![check_right_equivariance(d, &load()?, p)],
        TheoremArg::DecreasingA => {
            vec![check_decreasing_equivariance(d, &load()?, p, DecreasingVariant::A)]
        }
        TheoremArg::DecreasingB => {
            vec![check_decreasing_equivariance(d, &load()?, p, DecreasingVariant::B)]
        }
        TheoremArg::Symmetry => vec![check_symmetry(d, p)],
        TheoremArg::Sandwich => {
            let (a, b) = check_sandwich(d, &load()?, p)
                .map_err(|e| anyhow!("sandwich check rejected the map: {e}"))?;
            vec![a, b]
        }
    })
}

fn print_comparison(label: &str, c: &quantiles_core::dataset::MedianComparison) {
    println!(
        "{label} amplitude_median={} magnitude_median={} rescaled={} agree={}",
        render_number(&c.amplitude_median),
        render_number(&c.magnitude_median),
        render_number(&c.rescaled_magnitude_median),
        c.agree
    );
}

fn load_distribution(path: &std::path::Path) -> Result<Distribution> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    parse_distribution(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn load_map(path: &std::path::Path) -> Result<PiecewiseAffineMap> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    parse_map(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn load_earthquakes(path: &std::path::Path) -> Result<Vec<EarthquakeRecord>> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    read_earthquakes(bytes.as_slice(), "ml", "amplitude")
        .map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn parse_level(text: &str) -> Result<ProbabilityLevel> {
    let value = Rational::parse(text).map_err(|e| anyhow!("bad probability: {e}"))?;
    ProbabilityLevel::new(value).map_err(|e| anyhow!("bad probability: {e}"))
}
