use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::solver::Method;

#[derive(Debug, Parser)]
#[command(
    name = "imcf-soliton",
    version,
    about = "Profile curves of self-similar inverse mean curvature flow solitons"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Solve one profile from the axis and write it as CSV.
    Solve(Flags),
    /// Solve, run every check, and write the CSV and a JSON report.
    Verify(Flags),
    /// Solve a grid of parameters and write one CSV row per point.
    Sweep(Flags),
    /// Solve the even solution with maximum radius r1.
    Even(Flags),
}

/// Every flag is taken as text so that type errors can name the offending key.
#[derive(Debug, Args)]
struct Flags {
    #[arg(long, allow_hyphen_values = true)]
    n: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Sweep only: lambda as fractions of the window, `1/n + q (1/(n-1) - 1/n)`.
    #[arg(long = "lambda-fraction", allow_hyphen_values = true)]
    lambda_fraction: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    r1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    h0: Option<String>,
    #[arg(long = "slope-switch", allow_hyphen_values = true)]
    slope_switch: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    ymax: Option<String>,
    #[arg(long = "r-floor", allow_hyphen_values = true)]
    r_floor: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    rel: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    abs: Option<String>,
    #[arg(long = "event-tol", allow_hyphen_values = true)]
    event_tol: Option<String>,
    /// chart, arc or both.
    #[arg(long)]
    method: Option<String>,
    #[arg(long = "allow-any-lambda")]
    allow_any_lambda: bool,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    report: Option<String>,
    #[arg(long)]
    plot: Option<String>,
    /// key=value file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    quiet: bool,
}

impl Flags {
    fn pairs(&self) -> Vec<(&'static str, Option<String>)> {
        let flag = |b: bool| b.then(|| "true".to_string());
        vec![
            ("n", self.n.clone()),
            ("lambda", self.lambda.clone()),
            ("lambda_fraction", self.lambda_fraction.clone()),
            ("mu", self.mu.clone()),
            ("r1", self.r1.clone()),
            ("h0", self.h0.clone()),
            ("slope_switch", self.slope_switch.clone()),
            ("ymax", self.ymax.clone()),
            ("r_floor", self.r_floor.clone()),
            ("rel", self.rel.clone()),
            ("abs", self.abs.clone()),
            ("event_tol", self.event_tol.clone()),
            ("method", self.method.clone()),
            ("allow_any_lambda", flag(self.allow_any_lambda)),
            ("out", self.out.clone()),
            ("report", self.report.clone()),
            ("plot", self.plot.clone()),
            ("quiet", flag(self.quiet)),
        ]
    }
}

const KEYS: &[&str] = &[
    "n",
    "lambda",
    "lambda_fraction",
    "mu",
    "r1",
    "h0",
    "slope_switch",
    "ymax",
    "r_floor",
    "rel",
    "abs",
    "event_tol",
    "method",
    "allow_any_lambda",
    "out",
    "report",
    "plot",
    "quiet",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Verify,
    Sweep,
    Even,
}

/// Fully typed run configuration. Unset optional numbers fall back to the
/// solver defaults for the chosen parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub n: Vec<i64>,
    pub lambda: Vec<f64>,
    pub lambda_fraction: Vec<f64>,
    pub mu: Vec<f64>,
    pub r1: Option<f64>,
    pub h0: Option<f64>,
    pub slope_switch: Option<f64>,
    pub y_max: Option<f64>,
    pub r_floor: Option<f64>,
    pub rel: Option<f64>,
    pub abs: Option<f64>,
    pub event_tol: Option<f64>,
    pub method: Method,
    pub profile_csv: Option<PathBuf>,
    pub report_json: Option<PathBuf>,
    pub plot_script: Option<PathBuf>,
    pub allow_any_lambda: bool,
    pub quiet: bool,
}

/// Outcome of argument parsing: a configuration, or text clap wants printed (help, version).
#[derive(Debug)]
pub enum Parsed {
    Run(Box<RunConfig>),
    Display(String),
}

/// Parses command-line arguments (without the program name), merging an
/// optional `--config` file underneath the flags.
pub fn parse_config(argv: &[String]) -> Result<Parsed> {
    let args = std::iter::once("imcf-soliton".to_string()).chain(argv.iter().cloned());
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => return clap_error(e),
    };
    let (command, flags) = match cli.command {
        Cmd::Solve(f) => (Command::Solve, f),
        Cmd::Verify(f) => (Command::Verify, f),
        Cmd::Sweep(f) => (Command::Sweep, f),
        Cmd::Even(f) => (Command::Even, f),
    };
    let mut values = match &flags.config {
        Some(path) => read_config_file(path)?,
        None => BTreeMap::new(),
    };
    for (key, value) in flags.pairs() {
        if let Some(v) = value {
            values.insert(key.to_string(), v);
        }
    }
    build(command, &values).map(|c| Parsed::Run(Box::new(c)))
}

fn clap_error(e: clap::Error) -> Result<Parsed> {
    use clap::error::{ContextKind, ContextValue, ErrorKind};
    let context = |kind| match e.get(kind) {
        Some(ContextValue::String(s)) => s.clone(),
        Some(ContextValue::Strings(v)) => v.join(","),
        _ => String::new(),
    };
    match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            Ok(Parsed::Display(e.render().to_string()))
        }
        ErrorKind::UnknownArgument | ErrorKind::InvalidSubcommand => {
            Err(Error::UnknownKey { key: context(ContextKind::InvalidArg).trim_start_matches('-').to_string() })
        }
        ErrorKind::MissingRequiredArgument | ErrorKind::MissingSubcommand => {
            Err(Error::MissingRequired { key: context(ContextKind::InvalidArg) })
        }
        _ => Err(Error::TypeMismatch {
            key: context(ContextKind::InvalidArg).trim_start_matches('-').to_string(),
            value: context(ContextKind::InvalidValue),
        }),
    }
}

/// Reads `key=value` lines; `#` starts a comment, `-` and `_` are interchangeable in keys.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::TypeMismatch { key: line.to_string(), value: String::new() });
        };
        let key = key.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(Error::UnknownKey { key });
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn build(command: Command, values: &BTreeMap<String, String>) -> Result<RunConfig> {
    let get = |key: &str| values.get(key).map(String::as_str);
    let f64_opt = |key: &str| get(key).map(|v| parse_f64(key, v)).transpose();
    let list = |key: &str| -> Result<Vec<f64>> {
        match get(key) {
            None => Ok(Vec::new()),
            Some(v) => v.split(',').map(|s| parse_f64(key, s.trim())).collect(),
        }
    };
    let n: Vec<i64> = match get("n") {
        None => Vec::new(),
        Some(v) => {
            v.split(',').map(|s| s.trim().parse::<i64>().map_err(|_| mismatch("n", v))).collect::<Result<_>>()?
        }
    };
    let boolean = |key: &str| -> Result<bool> {
        match get(key) {
            None => Ok(false),
            Some("true" | "1" | "yes") => Ok(true),
            Some("false" | "0" | "no") => Ok(false),
            Some(v) => Err(mismatch(key, v)),
        }
    };
    let method = match get("method") {
        None | Some("chart") => Method::ChartSwitch,
        Some("arc") => Method::ArcLength,
        Some("both") => Method::Both,
        Some(v) => return Err(mismatch("method", v)),
    };
    let path = |key: &str| -> Result<Option<PathBuf>> {
        match get(key) {
            Some("") => Err(mismatch(key, "")),
            Some(v) => Ok(Some(PathBuf::from(v))),
            None => Ok(None),
        }
    };

    let mut cfg = RunConfig {
        command,
        n,
        lambda: list("lambda")?,
        lambda_fraction: list("lambda_fraction")?,
        mu: list("mu")?,
        r1: f64_opt("r1")?,
        h0: f64_opt("h0")?,
        slope_switch: f64_opt("slope_switch")?,
        y_max: f64_opt("ymax")?,
        r_floor: f64_opt("r_floor")?,
        rel: f64_opt("rel")?,
        abs: f64_opt("abs")?,
        event_tol: f64_opt("event_tol")?,
        method,
        profile_csv: path("out")?,
        report_json: path("report")?,
        plot_script: path("plot")?,
        allow_any_lambda: boolean("allow_any_lambda")?,
        quiet: boolean("quiet")?,
    };

    let single = |key: &str, len: usize| -> Result<()> {
        match len {
            0 => Err(Error::MissingRequired { key: key.to_string() }),
            1 => Ok(()),
            _ => Err(mismatch(key, get(key).unwrap_or_default())),
        }
    };
    match command {
        Command::Solve | Command::Verify => {
            single("n", cfg.n.len())?;
            single("lambda", cfg.lambda.len())?;
            single("mu", cfg.mu.len())?;
        }
        Command::Even => {
            single("n", cfg.n.len())?;
            single("lambda", cfg.lambda.len())?;
            if cfg.r1.is_none() {
                return Err(Error::MissingRequired { key: "r1".into() });
            }
        }
        Command::Sweep => {
            // the default grid is the 3 x 3 x 3 quartile lattice
            if cfg.n.is_empty() {
                cfg.n = vec![2, 3, 4];
            }
            if cfg.mu.is_empty() {
                cfg.mu = vec![-0.5, -1.0, -2.0];
            }
            if cfg.lambda.is_empty() && cfg.lambda_fraction.is_empty() {
                cfg.lambda_fraction = vec![0.25, 0.5, 0.75];
            }
            if !cfg.lambda.is_empty() && !cfg.lambda_fraction.is_empty() {
                return Err(mismatch("lambda_fraction", get("lambda_fraction").unwrap_or_default()));
            }
        }
    }
    if cfg.profile_csv.is_none() {
        return Err(Error::MissingRequired { key: "out".into() });
    }
    if command == Command::Verify && cfg.report_json.is_none() {
        return Err(Error::MissingRequired { key: "report".into() });
    }
    Ok(cfg)
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value.parse::<f64>().map_err(|_| mismatch(key, value))
}

fn mismatch(key: &str, value: &str) -> Error {
    Error::TypeMismatch { key: key.to_string(), value: value.to_string() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &[&str]) -> Vec<String> {
        s.iter().map(|x| x.to_string()).collect()
    }

    fn run_config(s: &[&str]) -> Result<RunConfig> {
        match parse_config(&args(s))? {
            Parsed::Run(c) => Ok(*c),
            Parsed::Display(_) => panic!("unexpected display"),
        }
    }

    #[test]
    fn parses_solve_flags() {
        let c = run_config(&["solve", "--n", "2", "--lambda", "0.7", "--mu", "-1", "--out", "p.csv"]).unwrap();
        assert_eq!(c.command, Command::Solve);
        assert_eq!((c.n[0], c.lambda[0], c.mu[0]), (2, 0.7, -1.0));
        assert_eq!(c.profile_csv.unwrap(), PathBuf::from("p.csv"));
        assert_eq!(c.method, Method::ChartSwitch);
    }

    #[test]
    fn type_mismatch_names_key() {
        let e = run_config(&["solve", "--n", "2", "--lambda", "abc", "--mu", "-1", "--out", "p.csv"]).unwrap_err();
        assert_eq!(e, Error::TypeMismatch { key: "lambda".into(), value: "abc".into() });
        let e = run_config(&["solve", "--n", "2.5", "--lambda", "0.7", "--mu", "-1", "--out", "p.csv"]).unwrap_err();
        assert_eq!(e.code(), "TYPE_MISMATCH");
        let e = run_config(&["solve", "--n", "2", "--lambda", "0.7", "--mu", "-1", "--method", "rk", "--out", "p"])
            .unwrap_err();
        assert_eq!(e, Error::TypeMismatch { key: "method".into(), value: "rk".into() });
    }

    #[test]
    fn missing_and_unknown() {
        let e = run_config(&["solve", "--n", "2", "--lambda", "0.7", "--out", "p.csv"]).unwrap_err();
        assert_eq!(e, Error::MissingRequired { key: "mu".into() });
        let e = run_config(&["solve", "--n", "2", "--lambda", "0.7", "--mu", "-1"]).unwrap_err();
        assert_eq!(e, Error::MissingRequired { key: "out".into() });
        let e = run_config(&["solve", "--bogus", "1"]).unwrap_err();
        assert_eq!(e, Error::UnknownKey { key: "bogus".into() });
        let e = run_config(&["verify", "--n", "2", "--lambda", "0.7", "--mu", "-1", "--out", "p.csv"]).unwrap_err();
        assert_eq!(e, Error::MissingRequired { key: "report".into() });
    }

    #[test]
    fn config_text() {
        let m = parse_config_text("# comment\nlambda=0.7\nn = 2 # trailing\n\nslope-switch=1.5\n").unwrap();
        assert_eq!(m["lambda"], "0.7");
        assert_eq!(m["n"], "2");
        assert_eq!(m["slope_switch"], "1.5");
        assert_eq!(parse_config_text("speed=3").unwrap_err(), Error::UnknownKey { key: "speed".into() });
    }

    #[test]
    fn sweep_defaults_to_lattice() {
        let c = run_config(&["sweep", "--out", "s.csv"]).unwrap();
        assert_eq!(c.n, [2, 3, 4]);
        assert_eq!(c.mu, [-0.5, -1.0, -2.0]);
        assert_eq!(c.lambda_fraction, [0.25, 0.5, 0.75]);
        let c = run_config(&["sweep", "--n", "2", "--lambda", "0.6,0.7", "--mu", "-1", "--out", "s.csv"]).unwrap();
        assert_eq!(c.lambda, [0.6, 0.7]);
    }

    #[test]
    fn help_is_displayed() {
        assert!(matches!(parse_config(&args(&["--help"])).unwrap(), Parsed::Display(_)));
    }
}
