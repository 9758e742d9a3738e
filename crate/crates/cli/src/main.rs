use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use mwright::ggbm::{ensemble_stats, sample_paths, CovSpec, MIN_STATS_PATHS};
use mwright::greens::{
    delta_surrogate, drift_green, green_density, green_profile, recommended_halfwidth, solve_volterra, DriftSpec,
    GreenSpec,
};
use mwright::grid::uniform_points;
use mwright::specfun::{f_wright, m_wright_symmetric, mittag_leffler_neg, AuxIndex, EvalResult};
use mwright::verify::{run_suite, Suite, VerifyOptions};

const DEFAULT_TOL: f64 = 1e-10;
const DEFAULT_VERIFY_TOL: f64 = 1e-6;
const DEFAULT_SEED: u64 = 42;

/// Wright-function toolkit for time-fractional diffusion: evaluation,
/// tabulation, Green functions, a Volterra solver, ggBm simulation and
/// self-verification.
#[derive(Parser, Debug)]
#[command(name = "fracdiff", version)]
struct Cli {
    /// Evaluation tolerance (default 1e-10; for `verify`, the pair tolerance, default 1e-6)
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Random seed for `simulate` and `verify` (default 42)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (output prefix for `simulate`); stdout when omitted
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON file of parameter values; command-line flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one function at one point
    Eval(EvalArgs),
    /// Tabulate a function for several parameter values on an x grid
    Tabulate(TabulateArgs),
    /// Green function profile G(x, t) as CSV
    Green(GreenArgs),
    /// Solve the integral equation from a mollified delta and write u(x, t)
    Solve(SolveArgs),
    /// Sample ggBm paths and write the ensemble, its sidecar and statistics
    Simulate(SimulateArgs),
    /// Run the self-check suites and write a JSON report
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Function {
    /// symmetric M-Wright function M_ν(|x|)
    Mwright,
    /// F-Wright function F_ν(x), x ≥ 0
    Fwright,
    /// Mittag-Leffler function E_ν(−s), s ≥ 0
    Mlf,
    /// Green function G_{α,β}(x, t)
    Green,
    /// drift Green function t^{−β} M_β(x t^{−β})
    Drift,
}

impl Function {
    fn name(self) -> &'static str {
        match self {
            Function::Mwright => "mwright",
            Function::Fwright => "fwright",
            Function::Mlf => "mlf",
            Function::Green => "green",
            Function::Drift => "drift",
        }
    }

    fn param_name(self) -> &'static str {
        match self {
            Function::Mwright | Function::Fwright | Function::Mlf => "nu",
            Function::Green | Function::Drift => "beta",
        }
    }
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long, value_enum)]
    function: Option<Function>,
    /// Order ν (mwright, fwright, mlf)
    #[arg(long)]
    nu: Option<f64>,
    /// Space exponent α (green; defaults to β)
    #[arg(long)]
    alpha: Option<f64>,
    /// Time order β (green, drift)
    #[arg(long)]
    beta: Option<f64>,
    /// Diffusivity K (green, default 1)
    #[arg(long)]
    k: Option<f64>,
    /// Time (green, drift, default 1)
    #[arg(long)]
    t: Option<f64>,
    /// Argument (x, or s for mlf)
    #[arg(long, allow_hyphen_values = true)]
    x: Option<f64>,
}

#[derive(Args, Debug)]
struct TabulateArgs {
    #[arg(long, value_enum)]
    function: Option<Function>,
    /// Comma-separated parameter values (ν or β)
    #[arg(long, value_delimiter = ',')]
    params: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    from: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    to: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    /// Space exponent α (green; defaults to β per column)
    #[arg(long)]
    alpha: Option<f64>,
    /// Diffusivity K (green, default 1)
    #[arg(long)]
    k: Option<f64>,
    /// Time (green, drift, default 1)
    #[arg(long)]
    t: Option<f64>,
    /// Add a log10|y| column per parameter value
    #[arg(long)]
    log10: bool,
}

#[derive(Args, Debug)]
struct GreenArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    /// Half-width of the x window (default: where G drops below 1e-12)
    #[arg(long)]
    halfwidth: Option<f64>,
    #[arg(long)]
    nx: Option<usize>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    halfwidth: Option<f64>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    nt: Option<usize>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Last sampling time; times are t_end/n, 2 t_end/n, ..., t_end
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    n_times: Option<usize>,
    #[arg(long)]
    n_paths: Option<usize>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// all, specfun, pairs, fraccalc, greens or ggbm
    #[arg(long)]
    suite: Option<String>,
    /// Paths per Monte Carlo check
    #[arg(long)]
    n_paths: Option<usize>,
}

const CONFIG_KEYS: [&str; 22] = [
    "tol", "seed", "out", "function", "nu", "alpha", "beta", "k", "t", "x", "params", "from", "to", "step",
    "log10", "halfwidth", "nx", "nt", "t_end", "n_times", "n_paths", "suite",
];

/// Command-line value if given, else the config file value, else `default`.
struct Resolver {
    cfg: Map<String, Value>,
}

impl Resolver {
    fn load(path: Option<&Path>) -> Result<Self, String> {
        let Some(path) = path else {
            return Ok(Self { cfg: Map::new() });
        };
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let value: Value =
            serde_json::from_str(&text).map_err(|e| format!("config {} is not valid JSON: {e}", path.display()))?;
        let Value::Object(cfg) = value else {
            return Err(format!("config {} must be a JSON object", path.display()));
        };
        for key in cfg.keys() {
            if !CONFIG_KEYS.contains(&key.as_str()) {
                return Err(format!("unknown config key {key:?}"));
            }
        }
        Ok(Self { cfg })
    }

    fn opt<T: DeserializeOwned>(&self, cli: Option<T>, key: &str) -> Result<Option<T>, String> {
        if cli.is_some() {
            return Ok(cli);
        }
        match self.cfg.get(key) {
            None => Ok(None),
            Some(v) => serde_json::from_value(v.clone())
                .map(Some)
                .map_err(|e| format!("config key {key:?} has the wrong type: {e}")),
        }
    }

    fn get<T: DeserializeOwned>(&self, cli: Option<T>, key: &str, default: T) -> Result<T, String> {
        Ok(self.opt(cli, key)?.unwrap_or(default))
    }

    fn require<T: DeserializeOwned>(&self, cli: Option<T>, key: &str) -> Result<T, String> {
        self.opt(cli, key)?.ok_or_else(|| format!("missing required parameter --{}", key.replace('_', "-")))
    }
}

fn function_from(r: &Resolver, cli: Option<Function>) -> Result<Function, String> {
    if let Some(f) = cli {
        return Ok(f);
    }
    let name: String = r.require(None, "function")?;
    Function::from_str(&name, true).map_err(|_| format!("unknown function {name:?}"))
}

fn err(e: mwright::Error) -> String {
    e.to_string()
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), String> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn positive(name: &str, v: f64) -> Result<f64, String> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{name} must be positive, got {v}"))
    }
}

/// One function value for the given column parameter `p`.
struct Evaluator {
    function: Function,
    alpha: Option<f64>,
    k: f64,
    t: f64,
    tol: f64,
}

impl Evaluator {
    fn check_param(&self, p: f64) -> Result<(), String> {
        let name = self.function.param_name();
        match self.function {
            Function::Mwright | Function::Fwright => AuxIndex::new(p).map(|_| ()).map_err(err),
            Function::Mlf if !(p > 0.0 && p <= 2.0) => Err(format!("nu must lie in (0, 2], got {p}")),
            Function::Green => GreenSpec::new(self.alpha.unwrap_or(p), p, self.k).map(|_| ()).map_err(err),
            Function::Drift => DriftSpec::new(p).map(|_| ()).map_err(err),
            _ => Ok(()),
        }
        .map_err(|e| format!("{name}={p}: {e}"))
    }

    fn eval(&self, p: f64, x: f64) -> Result<EvalResult, String> {
        let exact = |v: f64| EvalResult { value: v, abs_err_estimate: 0.0, method: mwright::specfun::EvalMethod::ClosedForm };
        let r = match self.function {
            Function::Mwright => m_wright_symmetric(AuxIndex::new(p).map_err(err)?, x, self.tol),
            Function::Fwright => {
                if x < 0.0 {
                    return Err(format!("fwright needs x >= 0, got {x}"));
                }
                f_wright(AuxIndex::new(p).map_err(err)?, x, self.tol)
            }
            Function::Mlf => mittag_leffler_neg(p, x, self.tol),
            Function::Green => {
                let spec = GreenSpec::new(self.alpha.unwrap_or(p), p, self.k).map_err(err)?;
                green_density(spec, x, self.t).map(exact)
            }
            Function::Drift => drift_green(DriftSpec::new(p).map_err(err)?, x, self.t).map(exact),
        };
        r.map_err(|e| format!("{}={p}, x={x}: {e}", self.function.param_name()))
    }
}

fn cmd_eval(a: EvalArgs, r: &Resolver, tol: f64, out: Option<&Path>) -> Result<(), String> {
    let function = function_from(r, a.function)?;
    let x = r.require(a.x, "x")?;
    let p = match function {
        Function::Mwright | Function::Fwright | Function::Mlf => r.require(a.nu, "nu")?,
        Function::Green | Function::Drift => r.require(a.beta, "beta")?,
    };
    let ev = Evaluator {
        function,
        alpha: r.opt(a.alpha, "alpha")?,
        k: r.get(a.k, "k", 1.0)?,
        t: positive("t", r.get(a.t, "t", 1.0)?)?,
        tol,
    };
    ev.check_param(p)?;
    let v = ev.eval(p, x)?;
    let report = serde_json::json!({
        "function": function.name(),
        function.param_name(): p,
        "x": x,
        "value": v.value,
        "abs_err_estimate": v.abs_err_estimate,
        "method": v.method,
    });
    write_output(out, &(serde_json::to_string_pretty(&report).map_err(|e| e.to_string())? + "\n"))
}

fn cmd_tabulate(a: TabulateArgs, r: &Resolver, tol: f64, out: Option<&Path>) -> Result<(), String> {
    let function = function_from(r, a.function)?;
    let params: Vec<f64> = r.require(a.params, "params")?;
    if params.is_empty() {
        return Err("params must not be empty".into());
    }
    let from = r.require(a.from, "from")?;
    let to = r.require(a.to, "to")?;
    let step = positive("step", r.require(a.step, "step")?)?;
    if !(to > from) {
        return Err(format!("need from < to, got from={from}, to={to}"));
    }
    let n = ((to - from) / step).round();
    if n < 1.0 || n > 1e7 || ((to - from) / n - step).abs() > 1e-9 * step {
        return Err(format!("step {step} does not divide [{from}, {to}] into a whole number of intervals"));
    }
    let log10 = a.log10 || r.get(None, "log10", false)?;
    let ev = Evaluator {
        function,
        alpha: r.opt(a.alpha, "alpha")?,
        k: r.get(a.k, "k", 1.0)?,
        t: positive("t", r.get(a.t, "t", 1.0)?)?,
        tol,
    };
    for &p in &params {
        ev.check_param(p)?;
    }
    let xs = uniform_points(from, to, n as usize);
    let mut cols = Vec::with_capacity(params.len());
    for &p in &params {
        cols.push(xs.iter().map(|&x| ev.eval(p, x).map(|v| v.value)).collect::<Result<Vec<_>, _>>()?);
    }
    let pname = function.param_name();
    let mut csv = String::new();
    let _ = writeln!(csv, "# function={}", function.name());
    match function {
        Function::Green => {
            if let Some(al) = ev.alpha {
                let _ = writeln!(csv, "# alpha={al}");
            } else {
                csv.push_str("# alpha=beta\n");
            }
            let _ = writeln!(csv, "# K={}\n# t={}", ev.k, ev.t);
        }
        Function::Drift => {
            let _ = writeln!(csv, "# t={}", ev.t);
        }
        _ => {}
    }
    csv.push('x');
    for p in &params {
        let _ = write!(csv, ",{pname}={p}");
    }
    if log10 {
        for p in &params {
            let _ = write!(csv, ",log10|{pname}={p}|");
        }
    }
    csv.push('\n');
    for (i, x) in xs.iter().enumerate() {
        let _ = write!(csv, "{x:?}");
        for c in &cols {
            let _ = write!(csv, ",{:?}", c[i]);
        }
        if log10 {
            for c in &cols {
                let _ = write!(csv, ",{:?}", c[i].abs().log10());
            }
        }
        csv.push('\n');
    }
    write_output(out, &csv)
}

fn green_spec(r: &Resolver, alpha: Option<f64>, beta: Option<f64>, k: Option<f64>) -> Result<GreenSpec, String> {
    let beta = r.require(beta, "beta")?;
    let alpha = r.get(alpha, "alpha", beta)?;
    GreenSpec::new(alpha, beta, r.get(k, "k", 1.0)?).map_err(err)
}

fn cmd_green(a: GreenArgs, r: &Resolver, out: Option<&Path>) -> Result<(), String> {
    let spec = green_spec(r, a.alpha, a.beta, a.k)?;
    let t = positive("t", r.get(a.t, "t", 1.0)?)?;
    let half = match r.opt(a.halfwidth, "halfwidth")? {
        Some(h) => positive("halfwidth", h)?,
        None => recommended_halfwidth(spec, t, 1e-12, 0.0).map_err(err)?,
    };
    let nx = r.get(a.nx, "nx", 801)?;
    let g = green_profile(spec, t, half, nx).map_err(err)?;
    write_output(out, &g.to_csv(("x", "G")))
}

fn cmd_solve(a: SolveArgs, r: &Resolver, out: Option<&Path>) -> Result<(), String> {
    let spec = green_spec(r, a.alpha, a.beta, a.k)?;
    let t = positive("t", r.get(a.t, "t", 1.0)?)?;
    let half = match r.opt(a.halfwidth, "halfwidth")? {
        Some(h) => positive("halfwidth", h)?,
        None => recommended_halfwidth(spec, t, 1e-10, 0.0).map_err(err)?.max(4.0),
    };
    let nx = r.get(a.nx, "nx", 801)?;
    let nt = r.get(a.nt, "nt", 512)?;
    let u0 = delta_surrogate(half, nx).map_err(err)?;
    let u = solve_volterra(&u0, spec, t, nt, half).map_err(err)?;
    write_output(out, &u.to_csv(("x", "u")))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn cmd_simulate(a: SimulateArgs, r: &Resolver, seed: u64, out: Option<&Path>) -> Result<(), String> {
    let out = out.ok_or("simulate needs --out PREFIX (writes PREFIX.csv, PREFIX.json, PREFIX.stats.json)")?;
    let alpha = r.require(a.alpha, "alpha")?;
    let beta = r.require(a.beta, "beta")?;
    let t_end = r.get(a.t_end, "t_end", 1.0)?;
    let n_times = r.get(a.n_times, "n_times", 64)?;
    let n_paths = r.get(a.n_paths, "n_paths", 10_000)?;
    if n_paths == 0 {
        return Err("n_paths must be at least 1".into());
    }
    let spec = CovSpec::uniform(alpha, beta, t_end, n_times).map_err(err)?;
    let e = sample_paths(&spec, n_paths, seed).map_err(err)?;
    let write = |suffix: &str, text: &str| write_output(Some(&with_suffix(out, suffix)), text);
    write(".csv", &e.to_csv())?;
    write(".json", &(e.sidecar_json() + "\n"))?;
    if n_paths >= MIN_STATS_PATHS {
        let stats = ensemble_stats(&e).map_err(err)?;
        write(".stats.json", &(serde_json::to_string_pretty(&stats).map_err(|e| e.to_string())? + "\n"))?;
    } else {
        eprintln!("note: statistics need at least {MIN_STATS_PATHS} paths; skipped");
    }
    Ok(())
}

fn cmd_verify(a: VerifyArgs, r: &Resolver, tol: Option<f64>, seed: Option<u64>, out: Option<&Path>) -> Result<bool, String> {
    let suite: Suite = r.get(a.suite, "suite", "all".to_string())?.parse().map_err(err)?;
    let mut opts = VerifyOptions::default();
    opts.pair_tol = positive("tol", tol.unwrap_or(DEFAULT_VERIFY_TOL))?;
    if let Some(s) = seed {
        opts.seed = s;
    }
    opts.n_paths = r.get(a.n_paths, "n_paths", opts.n_paths)?;
    if opts.n_paths < MIN_STATS_PATHS {
        return Err(format!("n_paths must be at least {MIN_STATS_PATHS}, got {}", opts.n_paths));
    }
    let report = run_suite(suite, &opts);
    let passed = report.checks.iter().filter(|c| c.passed).count();
    write_output(out, &(serde_json::to_string_pretty(&report).map_err(|e| e.to_string())? + "\n"))?;
    eprintln!("verify {}: {passed}/{} checks passed", Suite::NAMES[suite as usize], report.checks.len());
    Ok(report.passed)
}

fn run(cli: Cli) -> Result<bool, String> {
    let r = Resolver::load(cli.config.as_deref())?;
    let tol = r.opt(cli.tol, "tol")?;
    if let Some(t) = tol {
        positive("tol", t)?;
    }
    let seed = r.opt(cli.seed, "seed")?;
    let out: Option<PathBuf> = r.opt(cli.out, "out")?;
    let out = out.as_deref();
    let eval_tol = tol.unwrap_or(DEFAULT_TOL);
    match cli.command {
        Command::Eval(a) => cmd_eval(a, &r, eval_tol, out).map(|_| true),
        Command::Tabulate(a) => cmd_tabulate(a, &r, eval_tol, out).map(|_| true),
        Command::Green(a) => cmd_green(a, &r, out).map(|_| true),
        Command::Solve(a) => cmd_solve(a, &r, out).map(|_| true),
        Command::Simulate(a) => cmd_simulate(a, &r, seed.unwrap_or(DEFAULT_SEED), out).map(|_| true),
        Command::Verify(a) => cmd_verify(a, &r, tol, seed, out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let text = e.to_string();
            let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("error: invalid arguments");
            eprintln!("{first}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {}", msg.replace('\n', " "));
            ExitCode::from(2)
        }
    }
}
