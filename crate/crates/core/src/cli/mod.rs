//! Command implementations behind the `detkit` binary.
//!
//! Every command produces a [`RunReport`]; `--json` prints it, otherwise a
//! short text summary is printed. Exit codes: 0 success, 1 input error,
//! 2 budget exceeded, 3 construction cap reached.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::auxpoly::{
    audit_inequality, construct, count_points_bound, degree_bound, threshold, ConstructError,
    ConstructOptions,
};
use crate::coords::{height_inflation_factor, normalize, BoundConstants};
use crate::exactla::IntMatrix;
use crate::detmethod::{
    gcd_det_log_lower_bound, prime_report, det_valuation_lower_bound, square_monomial_system, DetMethodError,
};
use crate::forms::{infer_nvars, is_abs_irreducible_mod_p, parse_form, Form, FormError, IrreducibilityConfig};
use crate::points::{enumerate_points_with_budget, PointError, ProjPoint, DEFAULT_BUDGET};

pub const SCHEMA_VERSION: u32 = 1;
pub const BUDGET_ENV: &str = "DETKIT_BUDGET";

#[derive(Parser, Debug)]
#[command(name = "detkit", version, about = "Exact determinant-method toolkit for rational points on hypersurfaces")]
pub struct Cli {
    /// Print the machine-readable JSON report.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads for point enumeration.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Include wall-clock timing in the report (makes output run-dependent).
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the points of height at most N.
    Enumerate(EnumerateArgs),
    /// Normalize coordinates and build the auxiliary form.
    Construct(ConstructArgs),
    /// Compare observed and guaranteed p-adic determinant valuations.
    Valuation(ValuationArgs),
    /// Evaluate the bound calculators.
    Bounds(BoundsArgs),
    /// Point counts over several heights and their log-log slope.
    Scaling(ScalingArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct PolyArgs {
    /// The form, e.g. "x0^2 + x1^2 - x2^2".
    #[arg(long, conflicts_with = "poly_file")]
    pub poly: Option<String>,
    /// File holding the form.
    #[arg(long)]
    pub poly_file: Option<PathBuf>,
    /// Variable count; inferred from the text when absent (at least 3).
    #[arg(long)]
    pub nvars: Option<usize>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ConstantsArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub c_m: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub c_add: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub kappa_v: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub c_sqrt: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub c_lin: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub c_gcd_det: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub c_count: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub c_count_add: Option<f64>,
    /// Comma-separated radii for the large-value tuple search.
    #[arg(long, value_delimiter = ',')]
    pub radius_schedule: Option<Vec<u32>>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EnumerateArgs {
    #[command(flatten)]
    pub poly: PolyArgs,
    #[arg(short = 'N', allow_negative_numbers = true)]
    pub height: i64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ConstructArgs {
    #[command(flatten)]
    pub poly: PolyArgs,
    #[arg(short = 'N', allow_negative_numbers = true)]
    pub height: i64,
    /// Force the degree of the auxiliary form; disables escalation unless
    /// --escalate is given.
    #[arg(long)]
    pub degree: Option<u32>,
    #[arg(long)]
    pub escalate: bool,
    /// Use the form as given instead of normalizing coordinates first.
    #[arg(long)]
    pub skip_normalize: bool,
    /// Primes at which absolute irreducibility of the input is tested; one
    /// success certifies it, otherwise a warning is reported.
    #[arg(long, value_delimiter = ',', default_value = "3,5,7,11,13")]
    pub irreducibility_primes: Vec<u64>,
    #[command(flatten)]
    pub constants: ConstantsArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ValuationArgs {
    #[command(flatten)]
    pub poly: PolyArgs,
    #[arg(short = 'N', allow_negative_numbers = true)]
    pub height: i64,
    #[arg(long)]
    pub prime: u64,
    #[arg(long, default_value_t = 4)]
    pub tuple_size: usize,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BoundsArgs {
    /// Degree of the form.
    #[arg(short = 'd', long = "form-degree")]
    pub d: u32,
    /// Dimension of the variety (1 for curves).
    #[arg(short = 'n', long = "dim", default_value_t = 1)]
    pub n: u32,
    #[arg(short = 'N')]
    pub height: u64,
    /// Norm of the form (decimal integer).
    #[arg(long, default_value = "1")]
    pub normf: String,
    /// Degree of the auxiliary form; defaults to the degree bound.
    #[arg(long)]
    pub degree: Option<u32>,
    /// Rank used by the calculators; defaults to `|B[M]| - |B[M-d]|`.
    #[arg(long)]
    pub s: Option<u64>,
    #[arg(long, default_value_t = 5)]
    pub prime: u64,
    #[command(flatten)]
    pub constants: ConstantsArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ScalingArgs {
    #[command(flatten)]
    pub poly: PolyArgs,
    /// Comma-separated heights.
    #[arg(long, value_delimiter = ',', default_value = "10,20,40,80")]
    pub heights: Vec<i64>,
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Budget(String),
    /// Construction stopped at its degree cap; carries the failure report.
    Cap(String, Value),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Budget(_) => 2,
            CliError::Cap(..) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Budget(m) | CliError::Cap(m, _) => m,
        }
    }
}

impl From<FormError> for CliError {
    fn from(e: FormError) -> Self {
        match e {
            FormError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<PointError> for CliError {
    fn from(e: PointError) -> Self {
        match e {
            PointError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<DetMethodError> for CliError {
    fn from(e: DetMethodError) -> Self {
        match e {
            DetMethodError::Form(f) => f.into(),
            DetMethodError::Point(p) => p.into(),
            DetMethodError::LinAlg(l) => CliError::Input(l.to_string()),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub subcommand: String,
    pub input: Value,
    pub output: Value,
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn budget_from_env() -> Result<u128, CliError> {
    match std::env::var(BUDGET_ENV) {
        Ok(s) => s
            .trim()
            .parse::<u128>()
            .map_err(|_| CliError::Input(format!("{BUDGET_ENV} must be a nonnegative integer, got {s:?}"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

impl PolyArgs {
    fn text(&self) -> Result<String, CliError> {
        match (&self.poly, &self.poly_file) {
            (Some(p), None) => Ok(p.clone()),
            (None, Some(path)) => std::fs::read_to_string(path)
                .map(|s| s.trim().to_string())
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display()))),
            _ => Err(CliError::Input("exactly one of --poly or --poly-file is required".into())),
        }
    }

    fn form(&self) -> Result<Form, CliError> {
        let text = self.text()?;
        let nvars = match self.nvars {
            Some(n) => n,
            None => infer_nvars(&text, 3)?,
        };
        Ok(parse_form(&text, nvars)?)
    }
}

impl ConstantsArgs {
    pub fn constants(&self) -> Result<BoundConstants, CliError> {
        let mut c = BoundConstants::default();
        let set = |dst: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *dst = v;
            }
        };
        set(&mut c.c_m, self.c_m);
        set(&mut c.c_add, self.c_add);
        set(&mut c.kappa_v, self.kappa_v);
        set(&mut c.c_sqrt, self.c_sqrt);
        set(&mut c.c_lin, self.c_lin);
        set(&mut c.c_gcd_det, self.c_gcd_det);
        set(&mut c.c_count, self.c_count);
        set(&mut c.c_count_add, self.c_count_add);
        if let Some(r) = &self.radius_schedule {
            c.box_radius_schedule = r.clone();
        }
        c.validate().map_err(CliError::Input)?;
        Ok(c)
    }
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Result<RunReport, CliError> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Input("--threads must be at least 1".into()));
        }
        // a second initialization in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let start = Instant::now();
    let (name, input, output, seed) = match &cli.command {
        Command::Enumerate(a) => ("enumerate", to_value(a), cmd_enumerate(a)?, None),
        Command::Construct(a) => ("construct", to_value(a), cmd_construct(a)?, None),
        Command::Valuation(a) => ("valuation", to_value(a), cmd_valuation(a)?, Some(a.seed)),
        Command::Bounds(a) => ("bounds", to_value(a), cmd_bounds(a)?, None),
        Command::Scaling(a) => ("scaling", to_value(a), cmd_scaling(a)?, None),
    };
    Ok(RunReport {
        schema_version: SCHEMA_VERSION,
        subcommand: name.to_string(),
        input,
        output,
        seed,
        timing_ms: cli.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
    })
}

pub fn cmd_enumerate(a: &EnumerateArgs) -> Result<Value, CliError> {
    let f = a.poly.form()?;
    let pts = enumerate_points_with_budget(&f, a.height, budget_from_env()?)?;
    Ok(json!({ "form": f, "count": pts.len(), "points": pts }))
}

pub fn cmd_construct(a: &ConstructArgs) -> Result<Value, CliError> {
    let f = a.poly.form()?;
    let constants = a.constants.constants()?;
    if a.height < 1 {
        return Err(PointError::BadBound(a.height).into());
    }
    if !f.is_primitive() {
        return Err(CliError::Input("input form is not primitive".into()));
    }
    let irreducibility = irreducibility_screen(&f, &a.irreducibility_primes)?;
    let norm = if a.skip_normalize { None } else { Some(normalize(&f, &constants).map_err(|e| CliError::Input(e.to_string()))?) };
    let work = norm.as_ref().map_or(&f, |n| &n.g);
    // points of f of height <= N land among the points of g of height
    // <= N * inflation, so the construction has to cover that range
    let construct_height = match &norm {
        Some(n) if n.a != IntMatrix::identity(f.nvars()) => height_inflation_factor(&n.a_inv)
            .to_u64()
            .and_then(|k| k.checked_mul(a.height as u64))
            .ok_or_else(|| CliError::Input("inflated height overflows".into()))?,
        _ => a.height as u64,
    };
    let opts = ConstructOptions {
        m_start: a.degree,
        escalate: a.degree.is_none() || a.escalate,
        constants,
        enumeration_budget: budget_from_env()?,
        ..Default::default()
    };
    let result = match construct(work, construct_height, &opts) {
        Ok(r) => r,
        Err(ConstructError::CapReached { m_cap, attempts }) => {
            let report = json!({
                "form": f,
                "normalization": norm.as_ref().map(|n| &n.certificate),
                "m_cap": m_cap,
                "attempts": attempts,
            });
            return Err(CliError::Cap(format!("no auxiliary form found up to degree {m_cap}"), report));
        }
        Err(ConstructError::NotPrimitive) => return Err(CliError::Input("input form is not primitive".into())),
        Err(ConstructError::Points(e)) => return Err(e.into()),
    };
    // pull g back to the original coordinates: g(A^-1 x)
    let pulled_back = match &norm {
        Some(n) => Some(result.g.compose_linear(&n.a_inv)?),
        None => None,
    };
    let vanishes_on_original = match &pulled_back {
        Some(g) => {
            let pts = enumerate_points_with_budget(&f, a.height, opts.enumeration_budget)?;
            Some(pts.iter().all(|x| g.evaluate_i64(x.coords()).is_zero()))
        }
        None => None,
    };
    Ok(json!({
        "form": f,
        "normalization": norm.as_ref().map(|n| json!({ "g": n.g, "a": n.a, "certificate": n.certificate })),
        "construct_height": construct_height,
        "result": result,
        "g_original_coordinates": pulled_back,
        "vanishes_on_original_points": vanishes_on_original,
        "irreducibility": irreducibility,
    }))
}

/// Outcome of testing absolute irreducibility mod small primes.
#[derive(Debug, Serialize)]
pub struct IrreducibilityScreen {
    /// First prime where the reduction is absolutely irreducible, which
    /// implies the same over the rationals.
    pub certified_at: Option<u64>,
    /// Primes where a factor was found.
    pub reducible_at: Vec<u64>,
    /// Primes where the factor search ran out of budget or `f` vanished.
    pub undecided_at: Vec<u64>,
    pub warning: Option<String>,
}

pub fn irreducibility_screen(f: &Form, primes: &[u64]) -> Result<IrreducibilityScreen, CliError> {
    let cfg = IrreducibilityConfig::default();
    let mut screen = IrreducibilityScreen { certified_at: None, reducible_at: Vec::new(), undecided_at: Vec::new(), warning: None };
    for &p in primes {
        if !crate::arith::is_prime(p) {
            return Err(CliError::Input(format!("{p} is not a prime")));
        }
        match is_abs_irreducible_mod_p(f, p, &cfg) {
            Ok(true) => {
                screen.certified_at = Some(p);
                break;
            }
            Ok(false) => screen.reducible_at.push(p),
            Err(_) => screen.undecided_at.push(p),
        }
    }
    if screen.certified_at.is_none() {
        let w = "absolute irreducibility not certified at any tested prime; proceeding".to_string();
        eprintln!("warning: {w}");
        screen.warning = Some(w);
    }
    Ok(screen)
}

pub fn cmd_valuation(a: &ValuationArgs) -> Result<Value, CliError> {
    let f = a.poly.form()?;
    if f.nvars() != 3 {
        return Err(CliError::Input("valuation checks need a plane curve (3 variables)".into()));
    }
    if a.tuple_size == 0 {
        return Err(CliError::Input("--tuple-size must be at least 1".into()));
    }
    let pts = enumerate_points_with_budget(&f, a.height, budget_from_env()?)?;
    if pts.len() < a.tuple_size {
        return Err(CliError::Input(format!(
            "only {} points of height <= {}, fewer than the tuple size {}",
            pts.len(),
            a.height,
            a.tuple_size
        )));
    }
    let cfg = IrreducibilityConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut trials = Vec::with_capacity(a.trials);
    for _ in 0..a.trials {
        let mut idx = sample(&mut rng, pts.len(), a.tuple_size).into_vec();
        idx.sort_unstable();
        let tuple: Vec<ProjPoint> = idx.iter().map(|&i| pts[i].clone()).collect();
        let forms = square_monomial_system(&tuple, 3, 2 * a.tuple_size as u32);
        let report = prime_report(&f, &forms, &tuple, a.prime, &cfg)?;
        let holds = report.observed_valuation.0.is_none_or(|v| v as u64 >= report.guaranteed_valuation);
        trials.push(json!({ "tuple": tuple, "forms": forms, "report": report, "bound_holds": holds }));
    }
    Ok(json!({ "form": f, "points": pts.len(), "trials": trials }))
}

pub fn cmd_bounds(a: &BoundsArgs) -> Result<Value, CliError> {
    let c = a.constants.constants()?;
    let normf: BigInt = a.normf.parse().map_err(|_| CliError::Input(format!("bad --normf {:?}", a.normf)))?;
    if a.d == 0 || a.n == 0 || a.height == 0 || normf < BigInt::from(1) {
        return Err(CliError::Input("need d >= 1, n >= 1, N >= 1 and normf >= 1".into()));
    }
    let nvars = a.n as usize + 2;
    let m = a.degree.unwrap_or_else(|| degree_bound(a.d, a.n, a.height, &normf, &c));
    let s = a.s.unwrap_or_else(|| threshold(m, a.d, nvars) as u64);
    let main_term = (a.height as f64).powf(2.0 / a.d as f64);
    Ok(json!({
        "degree_bound": degree_bound(a.d, a.n, a.height, &normf, &c),
        "m": m,
        "s": s,
        "count_points_bound": count_points_bound(a.d, a.height, &normf, &c),
        "count_main_term": main_term,
        "det_valuation_lower_bound": det_valuation_lower_bound(s as f64, a.prime, a.n, &c),
        "gcd_det_log_lower_bound": gcd_det_log_lower_bound(s as f64, &normf, a.n, &c),
        "audit": audit_inequality(s, m, a.height, &normf, a.d, a.n, &c),
        "constants": c,
    }))
}

#[derive(Debug, Serialize)]
pub struct ScalingRow {
    pub height: i64,
    pub count: usize,
    /// `count / N^(2/d)`.
    pub normalized: f64,
}

/// Least-squares slope of `log count` against `log N` over positive counts.
pub fn loglog_slope(rows: &[(i64, usize)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        rows.iter().filter(|(_, c)| *c > 0).map(|&(n, c)| ((n as f64).ln(), (c as f64).ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Counts of points with height at most each `N`, from one enumeration at
/// the largest height.
pub fn scaling_counts(f: &Form, heights: &[i64], budget: u128) -> Result<Vec<(i64, usize)>, PointError> {
    let max = heights.iter().copied().max().unwrap_or(0);
    let pts = enumerate_points_with_budget(f, max, budget)?;
    Ok(heights.iter().map(|&n| (n, pts.iter().filter(|p| p.height() <= n as u64).count())).collect())
}

pub fn cmd_scaling(a: &ScalingArgs) -> Result<Value, CliError> {
    let f = a.poly.form()?;
    if a.heights.is_empty() || a.heights.iter().any(|&n| n < 1) {
        return Err(CliError::Input("heights must be a nonempty list of integers >= 1".into()));
    }
    let counts = scaling_counts(&f, &a.heights, budget_from_env()?)?;
    let expected = 2.0 / f.degree() as f64;
    let rows: Vec<ScalingRow> = counts
        .iter()
        .map(|&(n, c)| ScalingRow { height: n, count: c, normalized: c as f64 / (n as f64).powf(expected) })
        .collect();
    Ok(json!({
        "form": f,
        "rows": rows,
        "slope": loglog_slope(&counts),
        "expected_slope": expected,
    }))
}

/// Text rendering of a report for terminals.
pub fn summary(r: &RunReport) -> String {
    let o = &r.output;
    match r.subcommand.as_str() {
        "enumerate" => {
            let mut s = format!("{} points on {}\n", o["count"], o["form"].as_str().unwrap_or(""));
            for p in o["points"].as_array().into_iter().flatten() {
                s.push_str(&format!("  {p}\n"));
            }
            s
        }
        "construct" => {
            let res = &o["result"];
            format!(
                "form {}\nM = {}, r = {}, threshold = {}, s = {}, |S| = {}\ng = {}\nchecks: {}\n",
                o["form"].as_str().unwrap_or(""),
                res["m"],
                res["r"],
                res["threshold"],
                res["s"],
                res["points"].as_array().map_or(0, |v| v.len()),
                res["g"].as_str().unwrap_or(""),
                res["checks"],
            )
        }
        "valuation" => {
            let mut s = String::new();
            for t in o["trials"].as_array().into_iter().flatten() {
                let rep = &t["report"];
                s.push_str(&format!(
                    "p = {} tuple {} guaranteed {} observed {} holds {}\n",
                    rep["p"], t["tuple"], rep["guaranteed_valuation"], rep["observed_valuation"], t["bound_holds"]
                ));
            }
            s
        }
        "scaling" => {
            let mut s = String::new();
            for row in o["rows"].as_array().into_iter().flatten() {
                s.push_str(&format!("N = {:>6}  X = {:>8}  X/N^(2/d) = {}\n", row["height"], row["count"], row["normalized"]));
            }
            s.push_str(&format!("slope {} (expected {})\n", o["slope"], o["expected_slope"]));
            s
        }
        _ => serde_json::to_string_pretty(o).expect("json"),
    }
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with(cli: Cli) -> i32 {
    match run(&cli) {
        Ok(report) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&report).expect("json"));
            } else {
                print!("{}", summary(&report));
            }
            0
        }
        Err(e) => {
            if let CliError::Cap(_, report) = &e {
                if cli.json {
                    println!("{}", serde_json::to_string_pretty(report).expect("json"));
                }
            }
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}
