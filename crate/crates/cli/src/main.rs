//! `siegelkit` command-line front end.
//!
//! Every subcommand is a thin adapter over a library call. Reports are JSON
//! (or CSV where a tabular form exists) on stdout or in `--output`.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails (the report
//! carries the diagnostics), 2 for usage errors.

mod parse;

use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use siegelkit::fourier::{self, FourierExpansion, SlashContext};
use siegelkit::generaltype::{self, GeneralTypeCertificate};
use siegelkit::hodge;
use siegelkit::numeric::relative_spread;
use siegelkit::siegelspace::{self, SiegelPoint, TangentDirection};
use siegelkit::thetaforms::{self, LatticeGram, TruncationParams};
use siegelkit::toroidal;
use siegelkit::Error;

const DEFAULT_SEED: u64 = 20240917;
const THREADS_ENV: &str = "SIEGELKIT_THREADS";

#[derive(Parser)]
#[command(name = "siegelkit", version, about = "Siegel modular varieties: metrics, modular forms, toroidal charts")]
struct Cli {
    /// Seed for all randomized sampling.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum LatticeName {
    E8,
    E8e8,
    E16,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormName {
    Chi10,
    Chi18,
    Schottky,
}

impl FormName {
    fn genus(self) -> usize {
        match self {
            FormName::Chi10 => 2,
            FormName::Chi18 => 3,
            FormName::Schottky => 4,
        }
    }

    fn label(self) -> &'static str {
        match self {
            FormName::Chi10 => "chi10",
            FormName::Chi18 => "chi18",
            FormName::Schottky => "schottky",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Hodge/Bergman ratio over random samples and closedness of the Kähler form.
    MetricCheck {
        #[arg(long, default_value_t = 2)]
        genus: usize,
        /// Number of random points.
        #[arg(long, default_value_t = 20)]
        samples: usize,
        /// Random tangent directions per point.
        #[arg(long, default_value_t = 3)]
        directions: usize,
        /// Allowed relative spread of the ratio.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Kähler–Einstein constant of the Hodge metric.
    EinsteinCheck {
        #[arg(long, default_value_t = 2)]
        genus: usize,
        /// Points: `iI` followed by random ones.
        #[arg(long, default_value_t = 3)]
        samples: usize,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
    },
    /// Curvature of the Hodge bundles against the Higgs field.
    CurvatureCheck {
        /// Base point, e.g. "1i,0.2;0.2,1.5i"; defaults to iI_2.
        #[arg(long)]
        tau: Option<String>,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
    },
    /// Growth of Bergman metric components towards the cusp.
    BoundaryGrowth {
        #[arg(long, default_value_t = 2)]
        genus: usize,
        /// Comma-separated radii |q| in (0, e^(-2π)).
        #[arg(long)]
        radii: Option<String>,
    },
    /// Theta constant with characteristic.
    Theta {
        /// Characteristic bits "a:b", e.g. "10:01".
        #[arg(long = "char")]
        characteristic: String,
        #[arg(long)]
        tau: String,
        /// Summation radius; chosen from --target when omitted.
        #[arg(long)]
        radius: Option<usize>,
        #[arg(long, default_value_t = thetaforms::DEFAULT_THETA_TARGET)]
        target: f64,
    },
    /// Exact Fourier coefficients of a lattice theta series.
    LatticeTheta {
        #[arg(long, value_enum)]
        lattice: LatticeName,
        #[arg(long)]
        genus: usize,
        /// Trace bound T: coefficients with Tr(A) ≤ T.
        #[arg(long)]
        bound: u64,
    },
    /// Values of chi10 or chi18, or coefficients of the Schottky form.
    NamedForm {
        #[arg(long, value_enum)]
        name: FormName,
        /// Evaluation point for chi10 and chi18; defaults to iI.
        #[arg(long)]
        tau: Option<String>,
        #[arg(long)]
        genus: Option<usize>,
        /// Trace bound for the Schottky coefficients.
        #[arg(long, default_value_t = 2)]
        bound: u64,
    },
    /// Siegel Φ operator applied to an expansion file.
    Phi {
        #[arg(long)]
        input: PathBuf,
    },
    /// Level-one cusp test on an expansion file.
    CuspCheck {
        #[arg(long)]
        input: PathBuf,
    },
    /// Fourier symmetry under M(V, U); all of a standard GL set when --v is omitted.
    SymmetryCheck {
        #[arg(long)]
        input: PathBuf,
        /// Integer matrix V in GL(g, Z), e.g. "0,1;1,0".
        #[arg(long)]
        v: Option<String>,
        /// Integer symmetric matrix U; zero when omitted.
        #[arg(long)]
        u: Option<String>,
    },
    /// Toroidal chart computations.
    Toroidal {
        #[command(subcommand)]
        command: ToroidalCommand,
    },
    /// General-type certificate from recomputed cusp-form evidence.
    Certify {
        #[arg(long)]
        g: usize,
        #[arg(long)]
        l: u64,
        #[arg(long, value_enum)]
        form: FormName,
    },
    /// Certificates for g = 2, 3, 4 at level one.
    ExamplesTable,
}

#[derive(Subcommand)]
enum ToroidalCommand {
    /// Multiplicities of boundary divisors under the level-m to level-n chart map.
    VerifyPullback {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u64,
        /// Cone rays in ζ-coordinates, e.g. "1,0,0;0,1,0;1,1,-1"; the
        /// principal genus-2 cone when omitted.
        #[arg(long)]
        rays: Option<String>,
        #[arg(long, default_value_t = 2)]
        genus: usize,
    },
}

impl Command {
    fn supports_csv(&self) -> bool {
        matches!(self, Command::MetricCheck { .. } | Command::ExamplesTable)
    }
}

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

struct Report {
    json: Value,
    table: Option<Table>,
    passed: bool,
}

impl Report {
    fn new(json: Value, passed: bool) -> Self {
        Report { json, table: None, passed }
    }

    fn ok(json: Value) -> Self {
        Self::new(json, true)
    }
}

enum CliError {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NumericalDegeneracy(_) | Error::Truncation { .. } | Error::Unverified(_) => CliError::Runtime(e),
            other => CliError::Usage(other.to_string()),
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::NumericalDegeneracy(_) => "numerical_degeneracy",
        Error::Truncation { .. } => "truncation",
        Error::Unverified(_) => "unverified",
        _ => "error",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let outcome = if cli.format == Format::Csv && !cli.command.supports_csv() {
        Err(usage("csv output is only available for metric-check and examples-table"))
    } else {
        run(&cli)
    };
    let report = match outcome {
        Ok(r) => r,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(CliError::Runtime(e)) => Report::new(
            json!({ "passed": false, "error": error_kind(&e), "message": e.to_string() }),
            false,
        ),
    };
    if let Err(msg) = emit(&cli, &report) {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn emit(cli: &Cli, report: &Report) -> Result<(), String> {
    let text = match (cli.format, &report.table) {
        (Format::Csv, Some(table)) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&table.header).map_err(|e| e.to_string())?;
            for row in &table.rows {
                w.write_record(row).map_err(|e| e.to_string())?;
            }
            String::from_utf8(w.into_inner().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?
        }
        _ => serde_json::to_string_pretty(&report.json).map_err(|e| e.to_string())? + "\n",
    };
    match &cli.output {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}

fn to_json<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn positive(name: &str, x: f64) -> Result<f64, CliError> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(usage(format!("{name} must be positive, got {x}")))
    }
}

fn genus_at_least_one(g: usize) -> Result<usize, CliError> {
    if g == 0 {
        Err(usage("genus must be at least 1"))
    } else {
        Ok(g)
    }
}

fn siegel_point(s: &str) -> Result<SiegelPoint, CliError> {
    let m = parse::complex_matrix(s).map_err(CliError::Usage)?;
    Ok(SiegelPoint::new(m)?)
}

fn tau_json(tau: &SiegelPoint) -> Value {
    let t = tau.tau();
    Value::from(
        (0..t.nrows())
            .map(|i| (0..t.ncols()).map(|j| json!([t[(i, j)].re, t[(i, j)].im])).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    )
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn read_expansion(path: &Path) -> Result<FourierExpansion, CliError> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Ok(FourierExpansion::from_json(&text)?)
}

fn lattice(name: LatticeName) -> LatticeGram {
    match name {
        LatticeName::E8 => LatticeGram::e8(),
        LatticeName::E8e8 => LatticeGram::e8_e8(),
        LatticeName::E16 => LatticeGram::e16(),
    }
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::MetricCheck {
            genus,
            samples,
            directions,
            tol,
        } => metric_check(genus_at_least_one(*genus)?, *samples, *directions, positive("tol", *tol)?, cli.seed),
        Command::EinsteinCheck { genus, samples, step } => {
            einstein_check(genus_at_least_one(*genus)?, *samples, *step, cli.seed)
        }
        Command::CurvatureCheck { tau, step } => {
            let tau = match tau {
                Some(s) => siegel_point(s)?,
                None => SiegelPoint::scaled_identity(2, 1.0),
            };
            let r = hodge::higgs_curvature_identity_check(&tau, *step)?;
            let passed = r.curvature_residual <= 1e-3
                && r.theta_wedge_theta <= 1e-10
                && r.theta_star_wedge_theta_star <= 1e-10
                && r.sym2_residual <= siegelkit::TOL_ALGEBRAIC;
            let mut json = to_json(&r);
            json["tau"] = tau_json(&tau);
            json["passed"] = passed.into();
            Ok(Report::new(json, passed))
        }
        Command::BoundaryGrowth { genus, radii } => {
            let radii: Vec<f64> = match radii {
                Some(s) => s
                    .split(',')
                    .map(|r| r.trim().parse::<f64>().map_err(|e| usage(format!("radius {r:?}: {e}"))))
                    .collect::<Result<_, _>>()?,
                None => [3.0, 5.0, 8.0, 12.0].iter().map(|t| (-2.0 * PI * t).exp()).collect(),
            };
            let r = siegelspace::boundary_growth_probe(*genus, &radii)?;
            let bound = if *genus == 1 { 0.0 } else { 2.0 };
            let passed = r.max_exponent <= bound;
            let mut json = to_json(&r);
            json["exponent_bound"] = bound.into();
            json["passed"] = passed.into();
            Ok(Report::new(json, passed))
        }
        Command::Theta {
            characteristic,
            tau,
            radius,
            target,
        } => {
            let eps = parse::characteristic(characteristic).map_err(CliError::Usage)?;
            let tau = siegel_point(tau)?;
            let target = positive("target", *target)?;
            let params = match radius {
                Some(r) => TruncationParams::new(*r, target)?,
                None => TruncationParams::auto(&tau, target)?,
            };
            let v = thetaforms::theta_constant(&eps, &tau, params)?;
            Ok(Report::ok(json!({
                "char": characteristic,
                "tau": tau_json(&tau),
                "radius": params.radius,
                "value": complex_json(v.value),
                "tail_bound": v.tail_bound,
            })))
        }
        Command::LatticeTheta { lattice: name, genus, bound } => {
            let f = thetaforms::lattice_theta_coefficients(&lattice(*name), genus_at_least_one(*genus)?, *bound)?;
            Ok(Report::ok(f.to_json_value()))
        }
        Command::NamedForm { name, tau, genus, bound } => named_form(*name, tau.as_deref(), *genus, *bound),
        Command::Phi { input } => {
            let f = read_expansion(input)?;
            Ok(Report::ok(fourier::siegel_phi(&f)?.to_json_value()))
        }
        Command::CuspCheck { input } => {
            let f = read_expansion(input)?;
            let t = fourier::is_cusp_level1(&f)?;
            let passed = t.is_cusp;
            let mut json = to_json(&t);
            json["passed"] = passed.into();
            Ok(Report::new(json, passed))
        }
        Command::SymmetryCheck { input, v, u } => symmetry_check(input, v.as_deref(), u.as_deref()),
        Command::Toroidal {
            command: ToroidalCommand::VerifyPullback { n, m, rays, genus },
        } => {
            let cone = match rays {
                Some(s) => toroidal::ConeSigma::new(*genus, parse::int_rows(s).map_err(CliError::Usage)?)?,
                None => toroidal::principal_cone_fixture(*genus)?.cone,
            };
            let r = toroidal::verify_divisor_pullback(*n, *m, &cone)?;
            let passed = r.consistent;
            let mut json = to_json(&r);
            json["passed"] = passed.into();
            Ok(Report::new(json, passed))
        }
        Command::Certify { g, l, form } => {
            if form.genus() != *g {
                return Err(usage(format!("{} is a genus-{} form; got --g {g}", form.label(), form.genus())));
            }
            let evidence = match form {
                FormName::Chi10 => generaltype::chi10_evidence(cli.seed),
                FormName::Chi18 => generaltype::chi18_evidence(),
                FormName::Schottky => generaltype::schottky_evidence(),
            };
            match generaltype::certify(*g, *l, &evidence) {
                Ok(cert) => Ok(Report::ok(to_json(&cert))),
                Err(Error::Unverified(msg)) => Ok(Report::new(
                    json!({ "passed": false, "error": "unverified", "message": msg, "records": to_json(&evidence.records) }),
                    false,
                )),
                Err(e) => Err(e.into()),
            }
        }
        Command::ExamplesTable => {
            let certs = generaltype::reproduce_example_table(cli.seed)?;
            let mut report = Report::ok(to_json(&certs));
            report.table = Some(certificate_table(&certs));
            Ok(report)
        }
    }
}

#[derive(Serialize)]
struct MetricRow {
    tau_id: usize,
    direction_id: usize,
    bergman: f64,
    hodge: f64,
    ratio: f64,
}

fn metric_check(g: usize, samples: usize, directions: usize, tol: f64, seed: u64) -> Result<Report, CliError> {
    if samples == 0 || directions == 0 {
        return Err(usage("--samples and --directions must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(samples);
    let mut rows = Vec::with_capacity(samples * directions);
    for tau_id in 0..samples {
        let tau = SiegelPoint::random(g, &mut rng);
        for direction_id in 0..directions {
            let x = TangentDirection::random(g, &mut rng);
            let bergman = siegelspace::bergman_metric(&tau, &x, &x).re;
            let hodge = hodge::hodge_metric_tangent(&tau, &x, &x)?.re;
            rows.push(MetricRow {
                tau_id,
                direction_id,
                bergman,
                hodge,
                ratio: hodge / bergman,
            });
        }
        points.push(tau);
    }
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let spread = relative_spread(&ratios);
    let kahler_points = [SiegelPoint::scaled_identity(g, 1.0), points[0].clone()];
    let dw = hodge::kahler_einstein_check(&kahler_points, 1e-3)?.max_dw_residual;
    let passed = spread <= tol && dw <= siegelkit::TOL_FINITE_DIFF;
    let table = Table {
        header: vec!["tau_id", "direction_id", "bergman", "hodge", "ratio"],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.tau_id.to_string(),
                    r.direction_id.to_string(),
                    format!("{:e}", r.bergman),
                    format!("{:e}", r.hodge),
                    format!("{:e}", r.ratio),
                ]
            })
            .collect(),
    };
    let json = json!({
        "genus": g,
        "seed": seed,
        "ratio_mean": ratios.iter().sum::<f64>() / ratios.len() as f64,
        "ratio_relative_spread": spread,
        "tolerance": tol,
        "kahler_dw_residual": dw,
        "samples": to_json(&rows),
        "passed": passed,
    });
    Ok(Report {
        json,
        table: Some(table),
        passed,
    })
}

fn einstein_check(g: usize, samples: usize, step: f64, seed: u64) -> Result<Report, CliError> {
    if samples == 0 {
        return Err(usage("--samples must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = vec![SiegelPoint::scaled_identity(g, 1.0)];
    points.extend((1..samples).map(|_| SiegelPoint::random(g, &mut rng)));
    let r = hodge::kahler_einstein_check(&points, step)?;
    let passed = r.max_dw_residual <= siegelkit::TOL_FINITE_DIFF
        && r.max_einstein_residual <= 1e-3
        && r.lambda_relative_spread <= 1e-3;
    Ok(Report::new(
        json!({
            "genus": g,
            "seed": seed,
            "step": step,
            "lambda": r.lambda,
            "dw_residual": r.max_dw_residual,
            "curvature_residual": r.max_einstein_residual,
            "lambda_relative_spread": r.lambda_relative_spread,
            "samples": to_json(&r.samples),
            "passed": passed,
        }),
        passed,
    ))
}

fn named_form(name: FormName, tau: Option<&str>, genus: Option<usize>, bound: u64) -> Result<Report, CliError> {
    if name == FormName::Schottky {
        if tau.is_some() {
            return Err(usage("schottky is available as coefficients only; drop --tau"));
        }
        let g = genus.unwrap_or(2);
        let f = thetaforms::schottky_chi8_coefficients(genus_at_least_one(g)?, bound)?;
        return Ok(Report::ok(f.to_json_value()));
    }
    let expected = name.genus();
    if let Some(g) = genus.filter(|&g| g != expected) {
        return Err(usage(format!("{} is defined for g = {expected}, got g = {g}", name.label())));
    }
    let point = match tau {
        Some(s) => siegel_point(s)?,
        None => SiegelPoint::scaled_identity(expected, 1.0),
    };
    if point.g() != expected {
        return Err(usage(format!(
            "{} is defined for g = {expected}; --tau has size {}",
            name.label(),
            point.g()
        )));
    }
    let value = match name {
        FormName::Chi10 => thetaforms::chi10(&point)?,
        _ => thetaforms::chi18(&point)?,
    };
    Ok(Report::ok(json!({
        "name": name.label(),
        "genus": expected,
        "tau": tau_json(&point),
        "value": complex_json(value),
    })))
}

fn symmetry_check(input: &Path, v: Option<&str>, u: Option<&str>) -> Result<Report, CliError> {
    let f = read_expansion(input)?;
    let contexts: Vec<(Vec<Vec<i64>>, SlashContext)> = match v {
        Some(vs) => {
            let v = parse::int_matrix(vs).map_err(CliError::Usage)?;
            let g = v.len();
            let u = match u {
                Some(us) => parse::int_matrix(us).map_err(CliError::Usage)?,
                None => vec![vec![0; g]; g],
            };
            vec![(v.clone(), SlashContext::new(v, u, f.level)?)]
        }
        None => {
            if u.is_some() {
                return Err(usage("--u needs --v"));
            }
            fourier::gl_test_set(f.genus)
                .into_iter()
                .map(|v| Ok((v.clone(), SlashContext::new(v.clone(), vec![vec![0; v.len()]; v.len()], f.level)?)))
                .collect::<Result<_, CliError>>()?
        }
    };
    let mut checks = Vec::new();
    let mut total = 0;
    for (v, ctx) in &contexts {
        let violations = fourier::symmetry_check(&f, ctx)?;
        total += violations.len();
        checks.push(json!({ "v": v, "violations": to_json(&violations) }));
    }
    let passed = total == 0;
    Ok(Report::new(
        json!({ "genus": f.genus, "level": f.level, "weight": f.weight, "checks": checks, "violations": total, "passed": passed }),
        passed,
    ))
}

fn certificate_table(certs: &[GeneralTypeCertificate]) -> Table {
    Table {
        header: vec!["g", "l", "form", "weight", "power", "threshold", "statement"],
        rows: certs
            .iter()
            .map(|c| {
                vec![
                    c.g.to_string(),
                    c.l.to_string(),
                    c.form.clone(),
                    c.weight.to_string(),
                    c.power.to_string(),
                    c.threshold.to_string(),
                    c.statement.clone(),
                ]
            })
            .collect(),
    }
}
