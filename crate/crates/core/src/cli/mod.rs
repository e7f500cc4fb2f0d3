//! Command-line front end.
//!
//! Exit codes: 0 when every verdict passes, 1 when a verdict fails, 2 on
//! usage or input errors.

mod commands;
mod suite;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::algebra::AlgebraSpec;
use crate::certify::Certificate;
use crate::report::Format;
use crate::towers::TowerSpec;
use crate::{Error, Result};

pub use commands::{build_certificate, certificate_outcome, execute, Kind, Outcome, Params};
pub use suite::{run_suite, SUITES};

#[derive(Parser, Debug)]
#[command(name = "milnor-kahler", version, about = "Milnor K-theory of truncated algebras, checked against Kähler differentials")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, default_value = "text")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Common {
    /// Algebra file (TOML); the field ℚ when omitted.
    #[arg(long)]
    algebra: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    p: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    n: Option<i64>,
    /// Unit of the base algebra, as an expression.
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    /// Truncation order for the dlog crosscheck.
    #[arg(long, allow_negative_numbers = true)]
    precision: Option<i64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Gröbner basis, dimension and monomial basis of an algebra.
    AlgebraInfo(Common),
    /// Dimension and basis of Ω^p.
    Omega(Common),
    /// Direct dim Ω^p of A[σ]/σⁿ against the two-summand splittings.
    Decomposition(Common),
    /// Generators of K_p(A[σ]/σⁿ⁺¹, (σⁿ)).
    Phi(Common),
    /// Span of the realized generator images in Ω^{p-1}_A.
    Theorem2(Common),
    /// Span of the tangent-symbol images in Ω^{p-1}_A.
    TangentSpan(Common),
    /// Builds and checks the certificate for {1+cσⁿ⁺¹, c} over A((σ)).
    CertifyEq7 {
        #[command(flatten)]
        common: Common,
        /// Also write the certificate as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Builds and checks the certificate for {1-σ, 1-(n+1)cσⁿ} = 0.
    CertifyEq8 {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Transport along τ: A'[λ]/λⁿ⁺¹ → B/σⁿ⁺¹.
    Tau(Common),
    /// Surjectivity, Mittag-Leffler window and limit of a tower.
    Tower {
        /// Tower file (TOML with `dims` and `maps`).
        #[arg(long)]
        tower: PathBuf,
    },
    /// Checks a certificate file.
    CheckCertificate {
        file: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        precision: Option<i64>,
    },
    /// Runs a scenario file (TOML).
    Run { scenario: PathBuf },
    /// Runs a built-in verification suite: all, kahler, milnor, certify or towers.
    Suite { name: String },
}

/// Scenario file: a `kind`, an optional `output` path, and the kind's
/// parameters as top-level keys (`algebra` and `tower` are tables).
fn parse_scenario(src: &str) -> Result<(Kind, Option<PathBuf>, Params)> {
    let bad = |e: String| Error::Parse(format!("scenario file: {e}"));
    let mut table: toml::Table = toml::from_str(src).map_err(|e| bad(e.to_string()))?;
    let kind = match table.remove("kind") {
        Some(toml::Value::String(k)) => Kind::from_name(&k)?,
        _ => return Err(bad("missing string key `kind`".into())),
    };
    let output = match table.remove("output") {
        None => None,
        Some(toml::Value::String(p)) => Some(PathBuf::from(p)),
        Some(_) => return Err(bad("`output` must be a string".into())),
    };
    let params = Params::deserialize(table).map_err(|e| bad(e.to_string()))?;
    Ok((kind, output, params))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn params(c: Common) -> Result<Params> {
    let algebra = match &c.algebra {
        Some(path) => Some(AlgebraSpec::from_toml(&read(path)?)?),
        None => None,
    };
    Ok(Params { algebra, p: c.p, n: c.n, c: c.c, precision: c.precision, tower: None })
}

fn certify(kind: Kind, common: Common, out: Option<PathBuf>) -> Result<Outcome> {
    let p = params(common)?;
    let cert = build_certificate(kind, &p)?;
    if let Some(path) = out {
        write_file(&path, &cert.to_json())?;
    }
    certificate_outcome(&cert, p.precision.map(|x| x as u32))
}

/// Runs a command; the path, when present, is where the report goes.
fn dispatch(command: Command) -> Result<(Outcome, Option<PathBuf>)> {
    let simple = |kind: Kind, c: Common| -> Result<Outcome> { execute(kind, &params(c)?) };
    let outcome = match command {
        Command::AlgebraInfo(c) => simple(Kind::AlgebraInfo, c)?,
        Command::Omega(c) => simple(Kind::Omega, c)?,
        Command::Decomposition(c) => simple(Kind::Decomposition, c)?,
        Command::Phi(c) => simple(Kind::Phi, c)?,
        Command::Theorem2(c) => simple(Kind::Theorem2, c)?,
        Command::TangentSpan(c) => simple(Kind::TangentSpan, c)?,
        Command::Tau(c) => simple(Kind::Tau, c)?,
        Command::CertifyEq7 { common, out } => certify(Kind::CertifyEq7, common, out)?,
        Command::CertifyEq8 { common, out } => certify(Kind::CertifyEq8, common, out)?,
        Command::Tower { tower } => {
            let spec: TowerSpec =
                toml::from_str(&read(&tower)?).map_err(|e| Error::Parse(format!("tower file: {e}")))?;
            execute(Kind::Tower, &Params { tower: Some(spec), ..Params::default() })?
        }
        Command::CheckCertificate { file, precision } => {
            if let Some(p) = precision.filter(|&p| p < 1 || p > i64::from(u32::MAX)) {
                return Err(Error::InvalidSpec(format!("precision must be positive, got {p}")));
            }
            let cert = Certificate::from_json(&read(&file)?)?;
            certificate_outcome(&cert, precision.map(|p| p as u32))?
        }
        Command::Run { scenario } => {
            let (kind, output, params) = parse_scenario(&read(&scenario)?)?;
            return Ok((execute(kind, &params)?, output));
        }
        Command::Suite { name } => {
            let (report, ok) = run_suite(&name)?;
            Outcome { report, ok }
        }
    };
    Ok((outcome, None))
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let sink: &mut dyn Write = if code == 0 { out } else { err };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let format = cli.format;
    let written = dispatch(cli.command).and_then(|(outcome, path)| {
        let text = outcome.report.render(format);
        match path {
            Some(p) => write_file(&p, &text)?,
            None => out.write_all(text.as_bytes()).map_err(|e| Error::Io(e.to_string()))?,
        }
        Ok(outcome.ok)
    });
    match written {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}
