use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use torus_transport::bounds::bound_report;
use torus_transport::experiments::{
    manifest, run_experiment, ExperimentConfig, ExperimentId, OutputFormat, DEFAULT_SEED,
};
use torus_transport::io::{read_atoms_csv, read_named_columns, read_values_csv};
use torus_transport::measures::DEFAULT_GRID;
use torus_transport::{
    discrete_ot_oracle, fit_linear, fit_loglog, fourier_of_atoms, fourier_of_density, w1_circle,
    w1_interval, wp_circle, wp_interval, Cdf, Error, TorusDensity,
};

/// Exact 1-D optimal transport, Fourier-side bounds and reproducible
/// experiments on the circle.
#[derive(Parser)]
#[command(name = "torus-transport", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and print its table, fits and gates.
    Experiment(Box<ExperimentArgs>),
    /// Transport cost between two atomic measures, or one against uniform.
    Ot(OtArgs),
    /// Every bound functional of an atomic measure or a sampled density.
    Bounds(BoundsArgs),
    /// Least-squares slope between two columns of a CSV report.
    Fit(FitArgs),
}

#[derive(Args)]
struct Output {
    /// csv or json.
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
    /// Write here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// quadres, kronecker, uncertainty, eigen, heat, littlewood, sandwich or twostep.
    id: Option<String>,
    /// Print the parameters, declared laws and gates instead of running.
    #[arg(long)]
    describe: bool,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Grid size for sampled densities.
    #[arg(long, default_value_t = DEFAULT_GRID)]
    grid: usize,
    /// Exponent, or a comma list where the experiment accepts several.
    #[arg(long)]
    p: Option<String>,
    /// Primes as a list, or a..b.
    #[arg(long)]
    primes: Option<String>,
    /// Point counts, as a list or a..b.
    #[arg(long = "N")]
    big_n: Option<String>,
    /// Frequencies, as a list or a..b.
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    count: Option<String>,
    #[arg(long)]
    degree: Option<String>,
    /// Heat times, as a list or a..b.
    #[arg(long)]
    t: Option<String>,
    /// Term counts, as a list or a..b.
    #[arg(long = "K")]
    big_k: Option<String>,
    #[arg(long)]
    k0: Option<String>,
    #[arg(long)]
    width: Option<String>,
    #[arg(long)]
    densities: Option<String>,
    #[arg(long)]
    atoms: Option<String>,
    /// Any other parameter as key=value; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum Domain {
    Circle,
    Interval,
}

#[derive(Args)]
struct OtArgs {
    /// CSV of location,weight rows.
    #[arg(long)]
    mu: PathBuf,
    /// Second measure; uniform of the same mass when omitted.
    #[arg(long)]
    nu: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long, value_enum, default_value = "circle")]
    domain: Domain,
    /// Also solve the discrete problem with the simplex oracle (circle, two atomic inputs).
    #[arg(long)]
    oracle: bool,
    /// Write the oracle's transport plan to this CSV.
    #[arg(long, requires = "oracle")]
    plan_out: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct BoundsArgs {
    /// CSV of location,weight rows.
    #[arg(long, required_unless_present = "density", conflicts_with = "density")]
    atoms: Option<PathBuf>,
    /// CSV of grid samples of a probability density, one per row.
    #[arg(long)]
    density: Option<PathBuf>,
    /// Erdős–Turán cutoff.
    #[arg(long)]
    n: usize,
    /// Exponents for the negative Sobolev functional.
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    p: Vec<f64>,
    /// Highest frequency computed; defaults to n.
    #[arg(long)]
    max_freq: Option<usize>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    x: String,
    #[arg(long)]
    y: String,
    /// Fit y against x instead of log y against log x.
    #[arg(long)]
    linear: bool,
    #[command(flatten)]
    output: Output,
}

fn open(path: &Path) -> Result<File, Error> {
    File::open(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn json_text(v: &serde_json::Value) -> Result<String, Error> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn experiment(args: ExperimentArgs) -> Result<(), Error> {
    if args.describe {
        let ids: Vec<ExperimentId> = match &args.id {
            Some(id) => vec![id.parse()?],
            None => ExperimentId::ALL.to_vec(),
        };
        let text = match args.output.format {
            OutputFormat::Csv => ids
                .iter()
                .map(|&id| manifest(id).to_text())
                .collect::<Vec<_>>()
                .join("\n"),
            OutputFormat::Json => {
                let all: Vec<_> = ids.iter().map(|&id| manifest(id)).collect();
                serde_json::to_string_pretty(&all)? + "\n"
            }
        };
        return emit(&text, &args.output.out);
    }
    let id: ExperimentId = args
        .id
        .as_deref()
        .ok_or_else(|| Error::InvalidParameter("missing experiment id".into()))?
        .parse()?;
    let mut cfg = ExperimentConfig::new(id)
        .with_seed(args.seed)
        .with_grid(args.grid);
    let flags = [
        ("p", &args.p),
        ("primes", &args.primes),
        ("N", &args.big_n),
        ("n", &args.n),
        ("alpha", &args.alpha),
        ("family", &args.family),
        ("count", &args.count),
        ("degree", &args.degree),
        ("t", &args.t),
        ("K", &args.big_k),
        ("k0", &args.k0),
        ("width", &args.width),
        ("densities", &args.densities),
        ("atoms", &args.atoms),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg = cfg.with(key, v);
        }
    }
    for kv in &args.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| {
            Error::InvalidParameter(format!("--set expects KEY=VALUE, got {kv:?}"))
        })?;
        cfg = cfg.with(k.trim(), v.trim());
    }
    cfg.format = args.output.format;
    cfg.output = args.output.out.clone();
    let out = run_experiment(&cfg)?;
    emit(&out.render(cfg.format)?, &cfg.output)
}

fn ot(args: OtArgs) -> Result<(), Error> {
    let a = read_atoms_csv(open(&args.mu)?)?;
    let b = args
        .nu
        .as_deref()
        .map(|p| read_atoms_csv(open(p)?))
        .transpose()?;
    let fa = Cdf::from_atoms(&a);
    let fb = match &b {
        Some(b) => Cdf::from_atoms(b),
        None => Cdf::uniform(fa.total_mass()),
    };
    let (cost, shift) = match args.domain {
        Domain::Circle => {
            let c = if args.p == 1.0 {
                w1_circle(&fa, &fb)?
            } else {
                wp_circle(&fa, &fb, args.p)?
            };
            (c.cost, Some(c.shift))
        }
        Domain::Interval => {
            let c = if args.p == 1.0 {
                w1_interval(&fa, &fb)?
            } else {
                wp_interval(&fa, &fb, args.p)?
            };
            (c, None)
        }
    };
    let oracle = if args.oracle {
        let b = b
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("--oracle needs an atomic --nu".into()))?;
        if matches!(args.domain, Domain::Interval) {
            return Err(Error::InvalidParameter(
                "--oracle is available on the circle only".into(),
            ));
        }
        let (cost_p, plan) = discrete_ot_oracle(&a, b, args.p)?;
        if let Some(path) = &args.plan_out {
            plan.write_csv(File::create(path)?)?;
        }
        Some(cost_p.powf(1.0 / args.p))
    } else {
        None
    };
    let domain = match args.domain {
        Domain::Circle => "circle",
        Domain::Interval => "interval",
    };
    let text = match args.output.format {
        OutputFormat::Json => json_text(&json!({
            "domain": domain,
            "p": args.p,
            "cost": cost,
            "shift": shift,
            "oracle_cost": oracle,
        }))?,
        OutputFormat::Csv => {
            let opt = |v: Option<f64>| v.map_or(String::new(), |v| format!("{v:?}"));
            format!(
                "domain,p,cost,shift,oracle_cost\n{domain},{:?},{cost:?},{},{}\n",
                args.p,
                opt(shift),
                opt(oracle)
            )
        }
    };
    emit(&text, &args.output.out)
}

fn bounds(args: BoundsArgs) -> Result<(), Error> {
    let k = args.max_freq.unwrap_or(args.n);
    let s = match (&args.atoms, &args.density) {
        (Some(path), _) => fourier_of_atoms(&read_atoms_csv(open(path)?)?, k),
        (None, Some(path)) => {
            fourier_of_density(&TorusDensity::new(read_values_csv(open(path)?)?)?, k)?
        }
        (None, None) => unreachable!("clap requires one input"),
    };
    let report = bound_report(&s, args.n, &args.p);
    for (name, msg) in &report.flags {
        eprintln!("warning: {name} not evaluated: {msg}");
    }
    let text = match args.output.format {
        OutputFormat::Json => report.to_json()? + "\n",
        OutputFormat::Csv => {
            let mut buf = Vec::new();
            report.write_csv(&mut buf)?;
            String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))?
        }
    };
    emit(&text, &args.output.out)
}

fn fit(args: FitArgs) -> Result<(), Error> {
    let cols = read_named_columns(open(&args.input)?, &[&args.x, &args.y])?;
    let (kind, f) = if args.linear {
        ("linear", fit_linear(&cols[0], &cols[1])?)
    } else {
        ("loglog", fit_loglog(&cols[0], &cols[1])?)
    };
    let text = match args.output.format {
        OutputFormat::Json => json_text(&json!({
            "x": args.x,
            "y": args.y,
            "kind": kind,
            "points": cols[0].len(),
            "slope": f.slope,
            "intercept": f.intercept,
            "r_squared": f.r_squared,
        }))?,
        OutputFormat::Csv => format!(
            "x,y,kind,points,slope,intercept,r_squared\n{},{},{kind},{},{:?},{:?},{:?}\n",
            args.x,
            args.y,
            cols[0].len(),
            f.slope,
            f.intercept,
            f.r_squared
        ),
    };
    emit(&text, &args.output.out)
}

/// 3 for numerical non-convergence, 2 for every other failure.
fn exit_code(e: &Error) -> u8 {
    if e.is_convergence_failure() {
        3
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Experiment(a) => experiment(*a),
        Command::Ot(a) => ot(a),
        Command::Bounds(a) => bounds(a),
        Command::Fit(a) => fit(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
