use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gsieve::harness::{self, Command, ConfigError, ExperimentConfig, HarnessError};

#[derive(Parser)]
#[command(name = "gsieve", version, about = "Large sieve experiments over the Gaussian integers")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Run the identity suite.
    Identities,
    /// Sweep T against every bound over the (family, Q, N, coefficients) grid.
    Sweep,
    /// Compare the K formulations.
    Spacing,
    /// Weyl-sum identities and the differenced bound.
    Weyl,
    /// Best constants of the dual forms of random matrices.
    Duality,
    /// Summarize a sweep (from --input, or a fresh run).
    Report,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    All,
    Squares,
    Power,
    SquareNorm,
}

#[derive(Clone, Copy, ValueEnum)]
enum Associates {
    Literal,
    Units,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(clap::Args)]
struct Flags {
    /// TOML file with the same keys as these flags; flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_delimiter = ',')]
    family: Vec<Family>,
    #[arg(long, global = true)]
    k: Option<i64>,
    /// Comma list; `a..b` is inclusive.
    #[arg(long = "Q", global = true)]
    q: Option<String>,
    #[arg(long = "N", global = true, value_delimiter = ',')]
    n: Vec<f64>,
    /// Comma list; `a..b` is inclusive.
    #[arg(long, global = true)]
    seeds: Option<String>,
    #[arg(long, global = true)]
    eps: Option<f64>,
    /// Tolerance of the Poisson-summation identities.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    associates: Option<Associates>,
    #[arg(long, global = true)]
    out: Option<String>,
    #[arg(long, global = true)]
    format: Option<OutFormat>,
    /// Sweep CSV for `report`.
    #[arg(long, global = true)]
    input: Option<String>,
    /// Record wall time per row (breaks byte-identical reruns).
    #[arg(long, global = true)]
    timing: bool,
}

fn int_list(key: &'static str, s: &str) -> Result<toml::Value, ConfigError> {
    let bad = || ConfigError::Invalid {
        key,
        message: format!("cannot parse `{s}` as integers"),
    };
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let (a, b): (i64, i64) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
            out.extend((a..=b).map(toml::Value::Integer));
        } else {
            out.push(toml::Value::Integer(part.parse().map_err(|_| bad())?));
        }
    }
    Ok(toml::Value::Array(out))
}

fn text<T: ValueEnum>(v: &T) -> toml::Value {
    toml::Value::String(v.to_possible_value().expect("no skipped variants").get_name().to_string())
}

impl Flags {
    fn overrides(&self) -> Result<toml::Table, ConfigError> {
        let mut t = toml::Table::new();
        if !self.family.is_empty() {
            t.insert("family".into(), toml::Value::Array(self.family.iter().map(text).collect()));
        }
        if let Some(k) = self.k {
            t.insert("k".into(), k.into());
        }
        if let Some(q) = &self.q {
            t.insert("Q".into(), int_list("Q", q)?);
        }
        if !self.n.is_empty() {
            t.insert("N".into(), toml::Value::Array(self.n.iter().map(|&x| x.into()).collect()));
        }
        if let Some(s) = &self.seeds {
            t.insert("seeds".into(), int_list("seeds", s)?);
        }
        if let Some(e) = self.eps {
            t.insert("eps".into(), e.into());
        }
        if let Some(tol) = self.tol {
            t.insert("tol".into(), tol.into());
        }
        if let Some(a) = &self.associates {
            t.insert("associates".into(), text(a));
        }
        if let Some(o) = &self.out {
            t.insert("out".into(), o.clone().into());
        }
        if let Some(f) = &self.format {
            t.insert("format".into(), text(f));
        }
        if let Some(i) = &self.input {
            t.insert("input".into(), i.clone().into());
        }
        if self.timing {
            t.insert("timing".into(), true.into());
        }
        Ok(t)
    }

    fn load(&self) -> Result<ExperimentConfig, HarnessError> {
        let file = match &self.config {
            Some(p) => Some(std::fs::read_to_string(p).map_err(|e| HarnessError::Input {
                path: p.display().to_string(),
                message: e.to_string(),
            })?),
            None => None,
        };
        Ok(ExperimentConfig::from_layers(file.as_deref(), self.overrides()?)?)
    }
}

fn run(cli: &Cli) -> Result<i32, HarnessError> {
    let cfg = cli.flags.load()?;
    let cmd = match cli.command {
        Cmd::Identities => Command::Identities,
        Cmd::Sweep => Command::Sweep,
        Cmd::Spacing => Command::Spacing,
        Cmd::Weyl => Command::Weyl,
        Cmd::Duality => Command::Duality,
        Cmd::Report => Command::Report,
    };
    let outcome = harness::run(cmd, &cfg)?;
    outcome.emit(&cfg)?;
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
