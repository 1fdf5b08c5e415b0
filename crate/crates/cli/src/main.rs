mod config;
mod forms;
mod output;

use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kida_core::kida::{
    resolve_local_type, transition, InvariantKind, InvariantRecord, KidaError, LocalSource,
    Provenance, TransitionInput,
};
use kida_core::localfactor::{h_v, local_factor, m_extension, LocalError, LocalPath, LocalType};
use kida_core::qexp::{tau, QexpError, DEFAULT_PRECISION};
use kida_core::splitting::{ramified_set, AbelianField, SplittingError};
use kida_core::verify::{run_suite, Suite};
use serde::Serialize;

const EXIT_USAGE: u8 = 64;

#[derive(Debug)]
pub struct CliError {
    code: u8,
    msg: String,
}

impl CliError {
    fn new(code: u8, msg: impl Into<String>) -> Self {
        CliError {
            code,
            msg: msg.into(),
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        Self::new(EXIT_USAGE, msg)
    }
}

#[derive(Parser)]
#[command(
    name = "kida",
    version,
    about = "λ/μ transitions for modular forms along abelian p-extensions"
)]
struct Cli {
    /// Emit JSON instead of key=value lines.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// τ(n), optionally reduced mod m.
    #[command(args_override_self = true)]
    Tau(TauArgs),
    /// The local term h_v at one prime.
    #[command(args_override_self = true)]
    Hv(HvArgs),
    /// λ and μ over an extension from their values over a base field.
    #[command(args_override_self = true)]
    Transition(TransitionArgs),
    /// Seeded property suites.
    #[command(args_override_self = true)]
    Verify(VerifyArgs),
}

#[derive(Args)]
struct TauArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    #[arg(long = "mod", value_parser = clap::value_parser!(u64).range(1..))]
    modulus: Option<u64>,
}

#[derive(Args)]
struct HvArgs {
    /// A form spec, or a local type such as `sc` or `ups:a=2,c=1`.
    #[arg(long)]
    form: String,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    ell: Option<u64>,
    /// Local degree of the extension at ℓ.
    #[arg(long, required_unless_present = "ext", conflicts_with = "ext")]
    e: Option<u64>,
    /// Extension field; the local degree at ℓ is read off from it.
    #[arg(long)]
    ext: Option<String>,
    #[arg(long, default_value = "Q")]
    base: String,
}

#[derive(Args)]
struct TransitionArgs {
    #[arg(long)]
    form: Option<String>,
    #[arg(long)]
    p: u64,
    #[arg(long, default_value = "Q")]
    base: String,
    #[arg(long)]
    ext: String,
    #[arg(long)]
    lambda: Option<u64>,
    #[arg(long, default_value_t = 0)]
    mu: u64,
    #[arg(long, default_value = "algebraic")]
    kind: InvariantKind,
    /// Local type at a prime, as `ℓ=<typespec>`; repeatable.
    #[arg(long = "local", value_name = "ELL=TYPE")]
    locals: Vec<String>,
    #[arg(long)]
    assert_hypotheses: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    suite: Suite,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    size: Option<u64>,
}

fn precision() -> Result<usize, CliError> {
    match std::env::var("KIDA_PRECISION") {
        Ok(v) => v
            .trim()
            .parse()
            .ok()
            .filter(|&b: &usize| b > 0)
            .ok_or_else(|| {
                CliError::usage(format!(
                    "KIDA_PRECISION must be a positive integer, got `{v}`"
                ))
            }),
        Err(_) => Ok(DEFAULT_PRECISION),
    }
}

fn parse_field(spec: &str) -> Result<AbelianField, CliError> {
    spec.parse::<AbelianField>()
        .map_err(|e| CliError::new(3, e.to_string()))
}

fn field_error(e: SplittingError) -> CliError {
    CliError::new(3, e.to_string())
}

fn local_parse(spec: &str, p: u64) -> Result<LocalType, CliError> {
    LocalType::parse(spec, p).map_err(|e| CliError::usage(e.to_string()))
}

fn cmd_tau(args: &TauArgs, json: bool) -> Result<String, CliError> {
    let precision = precision()?;
    let n = usize::try_from(args.n).map_err(|_| CliError::usage("n is too large"))?;
    let value = tau(n, precision).map_err(|e| match e {
        QexpError::PrecisionExceeded { .. } => CliError::new(2, e.to_string()),
        e => CliError::new(1, e.to_string()),
    })?;
    let value = match args.modulus {
        Some(m) => value.rem_euclid(m as i128),
        None => value,
    };
    // Written by hand: τ(n) can exceed the 64-bit range of JSON values.
    Ok(match (json, args.modulus) {
        (false, _) => format!("{value}\n"),
        (true, Some(m)) => format!(
            "{{\n  \"mod\": {m},\n  \"n\": {},\n  \"tau\": {value}\n}}\n",
            args.n
        ),
        (true, None) => format!("{{\n  \"n\": {},\n  \"tau\": {value}\n}}\n", args.n),
    })
}

#[derive(Serialize)]
struct HvRecord {
    ell: Option<u64>,
    p: Option<u64>,
    local_degree: u64,
    places: Option<u64>,
    local_type: String,
    case: &'static str,
    a: Option<u64>,
    c: Option<u64>,
    m: i64,
    h: Option<i64>,
    path: LocalPath,
}

fn hv_error(ell: u64, e: KidaError) -> CliError {
    match e {
        KidaError::MissingLocalType { .. } => CliError::new(2, e.to_string()),
        KidaError::Field(e) => field_error(e),
        e => CliError::new(1, format!("at {ell}: {e}")),
    }
}

fn local_error(e: LocalError) -> CliError {
    match e {
        LocalError::NotPPower { .. } | LocalError::Parse { .. } => CliError::usage(e.to_string()),
        e => CliError::new(1, e.to_string()),
    }
}

fn cmd_hv(args: &HvArgs) -> Result<HvRecord, CliError> {
    let mut places = None;
    let (v, e) = if forms::is_form_spec(&args.form) {
        let (Some(p), Some(ell)) = (args.p, args.ell) else {
            return Err(CliError::usage("a form needs --p and --ell"));
        };
        let form = forms::parse_form(&args.form, precision()?)?;
        let base = parse_field(&args.base)?;
        let e = match (&args.ext, args.e) {
            (Some(ext), _) => {
                let ext = parse_field(ext)?;
                let report = ramified_set(&base, &ext, p).map_err(field_error)?;
                let hit = report.primes.iter().find(|r| r.ell == ell);
                places = Some(hit.map_or(0, |r| r.places));
                hit.map_or(1, |r| r.local_degree)
            }
            (None, Some(e)) => e,
            (None, None) => unreachable!("clap requires --e or --ext"),
        };
        let v = resolve_local_type(&LocalSource::from_form(&form), &base, ell, p)
            .map_err(|err| hv_error(ell, err))?;
        (v, e)
    } else {
        if args.ext.is_some() {
            return Err(CliError::usage(
                "--ext needs a form; give --e with a local type",
            ));
        }
        let e = args.e.expect("clap requires --e without --ext");
        let v = match args.p {
            Some(p) => local_parse(&args.form, p)?,
            None if args.form.trim_start().starts_with("ups") => {
                return Err(CliError::usage("an unramified principal series needs --p"))
            }
            None => local_parse(&args.form, 0)?,
        };
        (v, e)
    };
    let (m, h, path) = match args.p {
        Some(p) => {
            let r = local_factor(&v, args.ell.unwrap_or(0), e, p).map_err(local_error)?;
            (r.m, r.h, r.path)
        }
        None => {
            let m = m_extension(&v, e).map_err(local_error)?;
            match h_v(&v, e) {
                Ok(h) => (m, Some(h), LocalPath::Table),
                Err(_) => (m, None, LocalPath::Generic),
            }
        }
    };
    let (a, c) = match v {
        LocalType::UnramifiedPS { a, c, .. } => (Some(a), Some(c)),
        _ => (None, None),
    };
    Ok(HvRecord {
        ell: args.ell,
        p: args.p,
        local_degree: e,
        places,
        local_type: v.to_string(),
        case: v.table_case(),
        a,
        c,
        m,
        h,
        path,
    })
}

fn parse_locals(specs: &[String], p: u64) -> Result<BTreeMap<u64, LocalType>, CliError> {
    let mut out = BTreeMap::new();
    for spec in specs {
        let (ell, ty) = spec
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("--local expects ℓ=<type>, got `{spec}`")))?;
        let ell: u64 = ell
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("--local: `{ell}` is not a prime")))?;
        out.insert(ell, local_parse(ty, p)?);
    }
    Ok(out)
}

fn transition_error(e: KidaError) -> CliError {
    let code = match &e {
        KidaError::MuNonzero(_) => 2,
        KidaError::Field(_) => 3,
        KidaError::MissingLocalType { .. }
        | KidaError::Local { .. }
        | KidaError::Form(QexpError::MissingCoefficient(_)) => 4,
        KidaError::HypothesisRequired(_) | KidaError::MissingLambda => EXIT_USAGE,
        _ => 1,
    };
    CliError::new(code, e.to_string())
}

fn cmd_transition(args: &TransitionArgs, json: bool) -> Result<String, CliError> {
    let base = parse_field(&args.base)?;
    let ext = parse_field(&args.ext)?;
    let form = match &args.form {
        Some(spec) => Some(forms::parse_form(spec, precision()?)?),
        None => None,
    };
    let mut source = match &form {
        Some(f) => LocalSource::from_form(f),
        None => LocalSource::default(),
    };
    for (ell, v) in parse_locals(&args.locals, args.p)? {
        source = source.with_override(ell, v);
    }
    let record = InvariantRecord {
        kind: args.kind,
        mu: Some(args.mu),
        lambda: args.lambda,
        provenance: Provenance::AssertedInput,
    };
    let report = transition(&TransitionInput {
        source,
        p: args.p,
        base: &base,
        extension: &ext,
        record,
        hypotheses_asserted: args.assert_hypotheses,
    })
    .map_err(transition_error)?;
    Ok(output::render(&report, json))
}

#[derive(Serialize)]
struct VerifyRecord {
    #[serde(flatten)]
    report: kida_core::verify::SuiteReport,
    status: &'static str,
}

fn cmd_verify(args: &VerifyArgs, json: bool) -> Result<String, CliError> {
    let report = run_suite(args.suite, args.seed, args.size);
    let passed = report.passed();
    let status = if passed { "pass" } else { "fail" };
    let text = output::render(&VerifyRecord { report, status }, json);
    if passed {
        Ok(text)
    } else {
        print!("{text}");
        Err(CliError::new(1, "counterexamples found"))
    }
}

fn run(args: Vec<String>) -> Result<String, CliError> {
    let args = config::expand(args)?;
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version.
            return Ok(e.to_string());
        }
        Err(e) => return Err(CliError::usage(e.render().to_string().trim_end())),
    };
    match &cli.command {
        Command::Tau(a) => cmd_tau(a, cli.json),
        Command::Hv(a) => cmd_hv(a).map(|r| output::render(&r, cli.json)),
        Command::Transition(a) => cmd_transition(a, cli.json),
        Command::Verify(a) => cmd_verify(a, cli.json),
    }
}

fn main() -> ExitCode {
    match run(std::env::args().collect()) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let msg = e.msg.strip_prefix("error: ").unwrap_or(&e.msg);
            eprintln!("error: {msg}");
            ExitCode::from(e.code)
        }
    }
}
