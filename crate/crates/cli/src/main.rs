mod report;

use std::fmt::Write as _;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gmak::matrix::{format_rational, parse_rational, to_f64};
use gmak::signs::enum_limit_from_env;
use gmak::{
    conservation_residuals, decompose, find_complex_balancing, integrate,
    multistationarity_witness, orthogonal_complement, parse_network, pseudo_reaction_transform,
    solve_in_class, stoichiometric_subspace, Error, GeneralizedNetwork, Rational,
};
use serde_json::{json, Map, Value};

/// Analysis of reaction networks with generalized mass-action kinetics.
#[derive(Parser)]
#[command(name = "gmak", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Structural report: graph, subspaces, deficiencies and sign conditions.
    Analyze {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Complex balancing equilibria in the compatibility class of --init.
    Equilibria {
        file: PathBuf,
        #[command(flatten)]
        rates: RateArgs,
        /// Point of the class, in species order (defaults to the computed c*).
        #[arg(long)]
        init: Option<String>,
        #[arg(long, default_value_t = 32)]
        starts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Rate constants with two complex balancing equilibria in one class.
    Witness {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Integrate the dynamics and print the trajectory as CSV.
    Simulate {
        file: PathBuf,
        #[command(flatten)]
        rates: RateArgs,
        /// Initial concentrations, in species order.
        #[arg(long)]
        init: String,
        #[arg(long, default_value_t = 100.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-8)]
        rtol: f64,
        #[arg(long, default_value_t = 1e-10)]
        atol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Rewrite every reaction y -> y' as y~ -> y~ + (y' - y) with classical kinetics.
    Transform {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct RateArgs {
    /// Rate constants in reaction order; overrides rates given in the file.
    #[arg(long)]
    rates: Option<String>,
}

/// Exit status with a message for stderr.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn solver(message: impl Into<String>) -> Self {
        Failure {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Validation(_)
            | Error::RateCount { .. }
            | Error::MissingRates
            | Error::NonPositiveRate { .. }
            | Error::DimensionMismatch { .. }
            | Error::NegativeConcentration { .. }
            | Error::ZeroConcentration { .. }
            | Error::InvalidArgument(_) => 2,
            _ => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: 1,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn load(path: &Path) -> CliResult<GeneralizedNetwork> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    parse_network(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn rates_for(net: &GeneralizedNetwork, args: &RateArgs) -> CliResult<Vec<Rational>> {
    let rates = match &args.rates {
        Some(text) => text
            .split(',')
            .map(|s| {
                parse_rational(s.trim())
                    .ok_or_else(|| Failure::input(format!("invalid rate constant {:?}", s.trim())))
            })
            .collect::<CliResult<Vec<_>>>()?,
        None => net.rates().ok_or(Error::MissingRates)?,
    };
    gmak::network::check_rates(net, &rates)?;
    Ok(rates)
}

fn floats(text: &str, what: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Failure::input(format!("invalid {what} value {:?}", s.trim())))
        })
        .collect()
}

fn rate_map(net: &GeneralizedNetwork, rates: &[f64]) -> Map<String, Value> {
    (0..net.reaction_count())
        .map(|i| (net.reaction_label(i), json!(rates[i])))
        .collect()
}

fn print_json(value: &impl serde::Serialize) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::solver(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.12e}")).collect();
    format!("({})", parts.join(", "))
}

fn cmd_analyze(file: &Path, json: bool) -> CliResult<()> {
    let net = load(file)?;
    let report = report::build(&net, enum_limit_from_env())?;
    if json {
        print_json(&report)
    } else {
        print!("{}", report::render(&report));
        Ok(())
    }
}

fn cmd_equilibria(
    file: &Path,
    rate_args: &RateArgs,
    init: Option<&str>,
    starts: usize,
    seed: u64,
    json: bool,
) -> CliResult<()> {
    let net = load(file)?;
    let rates = rates_for(&net, rate_args)?;
    let cstar = match find_complex_balancing(&net, &rates) {
        Ok(Some(c)) => c,
        Ok(None) => {
            return Err(Failure::solver(
                "no complex balancing equilibrium found via the log-linear solve",
            ))
        }
        Err(Error::NotWeaklyReversible) => {
            return Err(Failure::solver(
                "the network is not weakly reversible; complex balancing equilibria exist only for weakly reversible networks",
            ))
        }
        Err(e) => return Err(e.into()),
    };
    let cprime = match init {
        Some(text) => floats(text, "--init")?,
        None => cstar.clone(),
    };
    let rates_f: Vec<f64> = rates.iter().map(to_f64).collect();
    let sols = solve_in_class(&net, &rates_f, &cstar, &cprime, starts, seed)?;
    if json {
        return print_json(&json!({
            "rates": rate_map(&net, &rates_f),
            "cstar": cstar,
            "class": { "init": cprime, "gamma": sols.gamma },
            "equilibria": sols.equilibria,
            "residuals": sols.balance_residuals,
            "class_residuals": sols.class_residuals,
            "starts": sols.starts,
            "failures": sols.failures,
        }));
    }
    let mut out = String::new();
    let names = net.species_names().join(", ");
    let _ = writeln!(out, "species              {names}");
    let _ = writeln!(out, "rates                {}", rates.iter().map(format_rational).collect::<Vec<_>>().join(", "));
    let _ = writeln!(out, "c*                   {}", fmt_vec(&cstar));
    let _ = writeln!(out, "class of             {}", fmt_vec(&cprime));
    let _ = writeln!(out, "equilibria found     {} (from {} starts, {} failed)", sols.equilibria.len(), sols.starts, sols.failures.len());
    for (i, c) in sols.equilibria.iter().enumerate() {
        let _ = writeln!(
            out,
            "  [{}] {}  balance residual {:.2e}",
            i + 1,
            fmt_vec(c),
            sols.balance_residuals[i]
        );
    }
    print!("{out}");
    Ok(())
}

fn cmd_witness(file: &Path, json: bool) -> CliResult<()> {
    let net = load(file)?;
    let w = match multistationarity_witness(&net, enum_limit_from_env()) {
        Ok(w) => w,
        Err(Error::HypothesisNotMet(msg)) => {
            return Err(Failure {
                code: 4,
                message: format!("no witness: {msg}"),
            })
        }
        Err(e) => return Err(e.into()),
    };
    if json {
        return print_json(&w.to_json(&net));
    }
    let mut out = String::new();
    let _ = writeln!(out, "sign vector          {}", w.sign_vector);
    for i in 0..net.reaction_count() {
        let _ = writeln!(out, "rate  {:<28} {:.12e}", net.reaction_label(i), w.rates[i]);
    }
    let _ = writeln!(out, "c*                   {}", fmt_vec(&w.cstar));
    for (i, c) in w.equilibria.iter().enumerate() {
        let _ = writeln!(
            out,
            "equilibrium {}        {}  residual {:.2e}",
            i + 1,
            fmt_vec(c),
            w.residuals[i]
        );
    }
    print!("{out}");
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    file: &Path,
    rate_args: &RateArgs,
    init: &str,
    t_end: f64,
    rtol: f64,
    atol: f64,
    json: bool,
) -> CliResult<()> {
    let net = load(file)?;
    let rates: Vec<f64> = rates_for(&net, rate_args)?.iter().map(to_f64).collect();
    let c0 = floats(init, "--init")?;
    let traj = integrate(&net, &rates, &c0, t_end, rtol, atol)?;
    let drift = conservation_residuals(&traj, &orthogonal_complement(&stoichiometric_subspace(&net)));
    if json {
        return print_json(&json!({
            "species": net.species_names(),
            "times": traj.times,
            "states": traj.states,
            "rejected_steps": traj.rejected_steps,
            "conservation_residuals": drift,
        }));
    }
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    traj.write_csv(&net.species_names(), &mut lock)?;
    lock.flush()?;
    let max = drift.iter().fold(0.0f64, |a, &b| a.max(b));
    eprintln!(
        "{} steps, {} rejected, conservation drift {:.3e}",
        traj.len() - 1,
        traj.rejected_steps,
        max
    );
    Ok(())
}

fn cmd_transform(file: &Path, json: bool) -> CliResult<()> {
    let net = load(file)?;
    let t = pseudo_reaction_transform(&net)?;
    let def = gmak::deficiencies(&t)?;
    let d = decompose(&t);
    if json {
        return print_json(&json!({
            "network": t.to_json(),
            "text": t.serialize(),
            "graph": report::graph_section(&t),
            "deficiency": def,
        }));
    }
    print!("{}", t.serialize());
    println!(
        "# complexes {}, linkage classes {}, weakly reversible {}, deficiency {}",
        t.complex_count(),
        d.l(),
        if d.weakly_reversible { "yes" } else { "no" },
        def.delta
    );
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Analyze { file, json } => cmd_analyze(&file, json),
        Command::Equilibria {
            file,
            rates,
            init,
            starts,
            seed,
            json,
        } => cmd_equilibria(&file, &rates, init.as_deref(), starts, seed, json),
        Command::Witness { file, json } => cmd_witness(&file, json),
        Command::Simulate {
            file,
            rates,
            init,
            t_end,
            rtol,
            atol,
            json,
        } => cmd_simulate(&file, &rates, &init, t_end, rtol, atol, json),
        Command::Transform { file, json } => cmd_transform(&file, json),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
