use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use parasasaki::cli::{
    error_exit_code, eta_einstein_curve, parse_range, run_suite, summarize, Command, RunConfig, SuiteReport, SCHEMA,
};
use parasasaki::report::{DEFAULT_POINTS, DEFAULT_SEED};
use parasasaki::GeometryError;

#[derive(Parser)]
#[command(name = "psl", version, about = "Checks for para-Sasaki-like and paracontact structures")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the structural checks of a named fixture.
    Verify {
        suite: String,
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<f64>,
        /// Emit a CSV curve instead of the JSON report.
        #[arg(long, value_enum, requires = "t")]
        curve: Option<Curve>,
        /// Range `start:stop:step` for the curve.
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
    },
    /// Apply a conformal transformation `(u, v, w)` and check its laws.
    Transform {
        suite: String,
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        u: String,
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        v: String,
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        w: String,
        /// With `--q`, also check the η-Einstein form after the `(p, q)` homothety.
        #[arg(long, allow_hyphen_values = true, requires = "q")]
        p: Option<f64>,
        #[arg(long, allow_hyphen_values = true, requires = "p")]
        q: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<f64>,
    },
    /// Check the metric cone over a fixture.
    Cone {
        suite: String,
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "0.7,1,1.5")]
        radii: Vec<f64>,
    },
    /// Summarize a saved JSON report; exits with its verdict.
    Report { file: PathBuf },
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    points: usize,
    #[arg(long, env = "PSL_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    tol: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Curve {
    EtaEinstein,
}

impl Common {
    fn config(&self, command: Command, suite: &str) -> RunConfig {
        let mut cfg = RunConfig::new(command, suite);
        cfg.n = self.n;
        cfg.points = self.points;
        cfg.seed = self.seed;
        cfg.tol = self.tol;
        cfg
    }
}

fn set(slot: &mut f64, v: Option<f64>) {
    if let Some(v) = v {
        *slot = v;
    }
}

/// Exit code and message.
struct Failure(i32, String);

impl From<GeometryError> for Failure {
    fn from(e: GeometryError) -> Self {
        Failure(error_exit_code(&e), e.to_string())
    }
}

fn io_failure(path: &std::path::Path, e: std::io::Error) -> Failure {
    Failure(2, format!("{}: {e}", path.display()))
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<(), Failure> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| io_failure(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn finish(report: &SuiteReport, output: Option<&PathBuf>) -> Result<i32, Failure> {
    emit(&report.to_json(), output)?;
    if let Some((check, sub)) = report.first_failure() {
        eprintln!(
            "FAIL {}/{}: residual {:.3e} exceeds tol {:.0e}{}",
            check.check,
            sub.name,
            sub.max_residual,
            check.tol,
            sub.worst_point.map(|i| format!(" at sample {i}")).unwrap_or_default()
        );
    }
    Ok(report.exit_code())
}

fn run(cli: Cli) -> Result<i32, Failure> {
    match cli.cmd {
        Cmd::Verify { suite, common, lambda, mu, a, b, curve, t } => {
            let mut cfg = common.config(Command::Verify, &suite);
            set(&mut cfg.lambda, lambda);
            set(&mut cfg.mu, mu);
            set(&mut cfg.a, a);
            set(&mut cfg.b, b);
            if let Some(Curve::EtaEinstein) = curve {
                let ts = parse_range(t.as_deref().unwrap_or_default())?;
                emit(&eta_einstein_curve(&cfg, &ts)?, common.output.as_ref())?;
                return Ok(0);
            }
            finish(&run_suite(&cfg)?, common.output.as_ref())
        }
        Cmd::Transform { suite, common, u, v, w, p, q, lambda, a, b } => {
            let mut cfg = common.config(Command::Transform, &suite);
            (cfg.u, cfg.v, cfg.w, cfg.p, cfg.q) = (u, v, w, p, q);
            set(&mut cfg.lambda, lambda);
            set(&mut cfg.a, a);
            set(&mut cfg.b, b);
            finish(&run_suite(&cfg)?, common.output.as_ref())
        }
        Cmd::Cone { suite, common, radii } => {
            let mut cfg = common.config(Command::Cone, &suite);
            cfg.radii = radii;
            finish(&run_suite(&cfg)?, common.output.as_ref())
        }
        Cmd::Report { file } => {
            let text = std::fs::read_to_string(&file).map_err(|e| io_failure(&file, e))?;
            let report: SuiteReport = serde_json::from_str(&text)
                .map_err(|e| Failure(2, format!("{}: not a report: {e}", file.display())))?;
            if report.schema != SCHEMA {
                return Err(Failure(2, format!("unsupported report schema '{}'", report.schema)));
            }
            print!("{}", summarize(&report));
            Ok(report.exit_code())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code as u8)
        }
    }
}
