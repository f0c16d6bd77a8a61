//! The `unidecon` command line.
//!
//! Exit codes: 0 on success, 2 on usage or validation errors, 1 on runtime
//! errors (I/O, malformed input files, quadrature failures).

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::deconv::{evaluate_curve, Cdf, Curve, Estimator, EstimatorSpec, Grid, WeightSpec};
use crate::error::Error;
use crate::io::{self as csv, fmt17};
use crate::kde::{Bandwidth, Sample};
use crate::kernels::{kernel_functionals, validate_w1, Kernel};
use crate::montecarlo::{self, EvalPoints, McConfig};
use crate::rng::SplitMix64;
use crate::theory::{self, TrueModel};
use crate::TOOL_VERSION;

/// Environment variable bounding the worker thread count.
pub const THREADS_ENV: &str = "UNIDECON_THREADS";

#[derive(Debug, Parser)]
#[command(name = "unidecon", version, about = "Kernel estimators for uniform deconvolution")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw a sample X = Y + Z, Z ~ Uniform[0, 1).
    Simulate {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evaluate an estimator on a grid, from a sample file or a simulated sample.
    Estimate {
        /// Sample file (one value per line); if absent a sample is simulated.
        #[arg(long = "in", value_name = "PATH", conflicts_with_all = ["model", "n", "seed"])]
        input: Option<PathBuf>,
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        est: EstimatorArgs,
        /// Evaluation grid `lo:hi:step`.
        #[arg(long, allow_hyphen_values = true, default_value = "-4:4:0.01")]
        grid: String,
        /// Clip density curves at zero and rescale to unit integral.
        #[arg(long)]
        normalize: bool,
        /// Also write a companion plotting script next to `--out`.
        #[arg(long, value_name = "FORMAT", value_parser = ["gnuplot"])]
        emit: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Print closed-form asymptotic quantities as labeled rows.
    Theory {
        #[arg(long, default_value = "stdnormal")]
        model: String,
        #[arg(long, default_value = "biweight")]
        kernel: String,
        #[arg(long, default_value_t = 500)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        h: f64,
        /// Evaluation points (comma separated).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0")]
        x: Vec<f64>,
        /// Fixed weight for the weighted-variance rows.
        #[arg(long)]
        t: Option<f64>,
        /// Point for the smoothed-NPMLE variance integral (compact models only).
        #[arg(long, allow_hyphen_values = true)]
        npmle_t: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte Carlo study of an estimator at individual points.
    McPoint {
        #[command(flatten)]
        mc: McArgs,
        /// Evaluation points (comma separated).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "grid")]
        x: Vec<f64>,
        /// Evaluation grid `lo:hi:step`.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte Carlo integrated squared error of an estimator.
    McMise {
        #[command(flatten)]
        mc: McArgs,
        /// Integration grid `lo:hi:step`; defaults to the model's support
        /// widened by `1.5 + h` with step `h/20`.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Print the moment functionals of a kernel and the checks it passes.
    KernelInfo {
        #[arg(long, default_value = "biweight")]
        kernel: String,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Args)]
struct DataArgs {
    /// Law of Y: stdnormal, uniform, beta22 or pointmass:<a>.
    #[arg(long)]
    model: Option<String>,
    /// Sample size [default: 500].
    #[arg(long)]
    n: Option<usize>,
    /// Random seed [default: 1].
    #[arg(long)]
    seed: Option<u64>,
}

impl DataArgs {
    fn model(&self) -> &str {
        self.model.as_deref().unwrap_or("stdnormal")
    }
    fn n(&self) -> usize {
        self.n.unwrap_or(500)
    }
    fn seed(&self) -> u64 {
        self.seed.unwrap_or(1)
    }
}

#[derive(Debug, Args)]
struct EstimatorArgs {
    #[arg(long, default_value = "biweight")]
    kernel: String,
    /// g-hat, f-minus, f-plus, f-weighted, f-combined, cdf-minus, cdf-plus,
    /// cdf-weighted, cdf-combined, pivot-half or pivot-h.
    #[arg(long, default_value = "f-combined")]
    estimator: String,
    #[arg(long, default_value_t = 1.0)]
    h: f64,
    /// Bandwidth of the pivot estimate.
    #[arg(long = "h-pivot", default_value_t = 0.7)]
    h_pivot: f64,
    /// fixed, pivot-half, pivot-h or external [default: fixed if --t is
    /// given, else pivot-half].
    #[arg(long)]
    weight: Option<String>,
    /// Fixed weight on the left-shift estimator, in [0, 1].
    #[arg(long)]
    t: Option<f64>,
    /// Scale of the logistic H used by pivot-h (centered at the sample median).
    #[arg(long, default_value_t = 1.0)]
    pivot_scale: f64,
    /// Pivot curve file for `--weight external`.
    #[arg(long, value_name = "PATH")]
    pivot_curve: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct McArgs {
    #[arg(long, default_value = "stdnormal")]
    model: String,
    #[arg(long, default_value_t = 500)]
    n: usize,
    /// Number of replications.
    #[arg(long, default_value_t = 500)]
    reps: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    est: EstimatorArgs,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output file; standard output if absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

/// Failure of a subcommand, split by exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::InvalidGrid(_) | Error::ModelSupport(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

type CmdResult = std::result::Result<(), Failure>;

/// Run with process stdout and stderr.
pub fn run(argv: &[String]) -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// Run with explicit output streams; `argv[0]` is the program name.
pub fn run_with(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    2
                }
            };
        }
    };
    if let Err(msg) = configure_threads() {
        let _ = writeln!(err, "error: {msg}");
        return 2;
    }
    let provenance = vec![
        ("version".to_string(), TOOL_VERSION.to_string()),
        ("command".to_string(), shell_join(argv)),
    ];
    match dispatch(cli.command, &provenance, out) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Runtime(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
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
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got '{raw}'"))?;
    // a pool configured earlier in this process keeps its size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn shell_join(argv: &[String]) -> String {
    argv.iter()
        .map(|a| {
            if !a.is_empty() && a.chars().all(|c| c.is_ascii_alphanumeric() || "-_.:/,=+".contains(c)) {
                a.clone()
            } else {
                format!("'{}'", a.replace('\'', r"'\''"))
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn dispatch(cmd: Command, provenance: &[(String, String)], out: &mut dyn Write) -> CmdResult {
    match cmd {
        Command::Simulate { data, output } => simulate(&data, &output, provenance, out),
        Command::Estimate {
            input,
            data,
            est,
            grid,
            normalize,
            emit,
            output,
        } => {
            let curve = estimate(input.as_deref(), &data, &est, &grid, normalize, provenance)?;
            emit_text(&output, out, |w| csv::write_curve_to(w, &curve))?;
            if emit.is_some() {
                let path = output
                    .out
                    .as_deref()
                    .ok_or_else(|| Failure::Usage("--emit gnuplot needs --out".into()))?;
                write_gnuplot(path, &curve)?;
            }
            Ok(())
        }
        Command::Theory {
            model,
            kernel,
            n,
            h,
            x,
            t,
            npmle_t,
            output,
        } => {
            let rows = theory_rows(&model, &kernel, n, h, &x, t, npmle_t)?;
            emit_text(&output, out, |w| write_rows(w, provenance, "quantity,x,value", &rows))
        }
        Command::McPoint { mc, x, grid, output } => {
            let eval = match (grid, x.is_empty()) {
                (Some(g), _) => EvalPoints::Grid(parse_grid(&g)?),
                (None, false) => EvalPoints::Points(x),
                (None, true) => EvalPoints::Points(vec![0.0]),
            };
            let cfg = mc_config(&mc, eval)?;
            let report = if cfg.estimator.is_density() {
                montecarlo::pointwise_study(&cfg)?
            } else {
                montecarlo::pivot_mse_study(&cfg)?
            };
            emit_text(&output, out, |w| csv::write_report_to(w, &report, provenance))
        }
        Command::McMise { mc, grid, output } => {
            let model = TrueModel::from_name(&mc.model)?;
            let grid = match grid {
                Some(g) => parse_grid(&g)?,
                None => McConfig::default_mise_grid(&model, mc.est.h)?,
            };
            let cfg = mc_config(&mc, EvalPoints::Grid(grid))?;
            let report = montecarlo::mise_study(&cfg)?;
            emit_text(&output, out, |w| csv::write_report_to(w, &report, provenance))
        }
        Command::KernelInfo { kernel, output } => {
            let k = Kernel::by_name(&kernel)?;
            let rows = kernel_rows(&k)?;
            emit_text(&output, out, |w| write_rows(w, provenance, "quantity,value", &rows))
        }
    }
}

fn emit_text<F>(output: &OutputArgs, out: &mut dyn Write, body: F) -> CmdResult
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    let mut buf = Vec::new();
    body(&mut buf).map_err(|e| Failure::Runtime(e.to_string()))?;
    match &output.out {
        Some(path) => fs::write(path, &buf).map_err(|e| Error::io(path, e).into()),
        None => out.write_all(&buf).map_err(|e| Failure::Runtime(e.to_string())),
    }
}

fn write_rows(
    w: &mut dyn Write,
    provenance: &[(String, String)],
    columns: &str,
    rows: &[Vec<String>],
) -> io::Result<()> {
    for (k, v) in provenance {
        writeln!(w, "# {k}={v}")?;
    }
    writeln!(w, "{columns}")?;
    for r in rows {
        writeln!(w, "{}", r.join(","))?;
    }
    Ok(())
}

/// Parse `lo:hi:step`.
pub fn parse_grid(text: &str) -> Result<Grid, Error> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidGrid(format!("expected lo:hi:step, got '{text}'")));
    }
    let mut nums = [0.0; 3];
    for (slot, p) in nums.iter_mut().zip(&parts) {
        *slot = p
            .trim()
            .parse()
            .map_err(|_| Error::InvalidGrid(format!("'{p}' is not a number in '{text}'")))?;
    }
    Grid::from_range(nums[0], nums[1], nums[2])
}

fn weight_spec(est: &EstimatorArgs) -> Result<WeightSpec, Failure> {
    let kind = match (&est.weight, est.t) {
        (Some(w), _) => w.as_str(),
        (None, Some(_)) => "fixed",
        (None, None) => "pivot-half",
    };
    if est.t.is_some() && kind != "fixed" {
        return Err(Failure::Usage(format!("--t only applies to --weight fixed, got --weight {kind}")));
    }
    let spec = match kind {
        "fixed" => WeightSpec::FixedT(
            est.t
                .ok_or_else(|| Failure::Usage("--weight fixed needs --t".into()))?,
        ),
        "pivot-half" => WeightSpec::PivotHalf,
        "pivot-h" => {
            if !(est.pivot_scale.is_finite() && est.pivot_scale > 0.0) {
                return Err(Failure::Usage(format!(
                    "--pivot-scale must be positive, got {}",
                    est.pivot_scale
                )));
            }
            WeightSpec::PivotH(Cdf::LogisticAtMedian { scale: est.pivot_scale })
        }
        "external" => {
            let path = est
                .pivot_curve
                .as_deref()
                .ok_or_else(|| Failure::Usage("--weight external needs --pivot-curve".into()))?;
            WeightSpec::PivotExternal(csv::read_curve(path)?)
        }
        other => {
            return Err(Failure::Usage(format!(
                "unknown weight '{other}' (expected fixed, pivot-half, pivot-h or external)"
            )))
        }
    };
    if est.pivot_curve.is_some() && !matches!(spec, WeightSpec::PivotExternal(_)) {
        return Err(Failure::Usage("--pivot-curve only applies to --weight external".into()));
    }
    spec.validate()?;
    Ok(spec)
}

fn estimator_spec(est: &EstimatorArgs) -> Result<(Kernel, EstimatorSpec), Failure> {
    let kernel = Kernel::by_name(&est.kernel)?;
    let spec = EstimatorSpec {
        estimator: Estimator::from_name(&est.estimator)?,
        h: Bandwidth::new(est.h).map_err(|_| Failure::Usage(format!("--h must be positive, got {}", est.h)))?,
        h_pivot: Bandwidth::new(est.h_pivot)
            .map_err(|_| Failure::Usage(format!("--h-pivot must be positive, got {}", est.h_pivot)))?,
        weight: weight_spec(est)?,
    };
    spec.validate()?;
    Ok((kernel, spec))
}

fn simulated_sample(data: &DataArgs) -> Result<Sample, Failure> {
    let model = TrueModel::from_name(data.model())?;
    if data.n() == 0 {
        return Err(Failure::Usage("--n must be at least 1".into()));
    }
    let mut rng = SplitMix64::new(data.seed());
    Ok(montecarlo::sample_convolution(&model, data.n(), &mut rng)?)
}

fn data_header(data: &DataArgs) -> Vec<(String, String)> {
    vec![
        ("model".into(), data.model().to_string()),
        ("seed".into(), data.seed().to_string()),
    ]
}

fn simulate(data: &DataArgs, output: &OutputArgs, provenance: &[(String, String)], out: &mut dyn Write) -> CmdResult {
    let sample = simulated_sample(data)?;
    let mut header = data_header(data);
    header.push(("n".into(), data.n().to_string()));
    header.extend(provenance.iter().cloned());
    // the sample is written sorted, which is how every estimator sees it
    emit_text(output, out, |w| csv::write_sample_to(w, &sample, &header))
}

fn estimate(
    input: Option<&Path>,
    data: &DataArgs,
    est: &EstimatorArgs,
    grid: &str,
    normalize: bool,
    provenance: &[(String, String)],
) -> Result<Curve, Failure> {
    let (kernel, spec) = estimator_spec(est)?;
    let grid = parse_grid(grid)?;
    if normalize && !spec.estimator.is_density() {
        return Err(Failure::Usage(format!(
            "--normalize applies to density estimators, not '{}'",
            spec.estimator.name()
        )));
    }
    let (sample, mut extra) = match input {
        Some(path) => (
            csv::read_sample(path)?,
            vec![("input".to_string(), path.display().to_string())],
        ),
        None => (simulated_sample(data)?, data_header(data)),
    };
    let mut curve = evaluate_curve(&sample, &kernel, &spec, grid)?;
    if normalize {
        curve = curve.clip_and_rescale()?;
    }
    extra.append(&mut curve.meta.extra);
    extra.extend(provenance.iter().cloned());
    curve.meta.extra = extra;
    Ok(curve)
}

fn write_gnuplot(csv_path: &Path, curve: &Curve) -> CmdResult {
    let mut script_path = csv_path.as_os_str().to_owned();
    script_path.push(".gp");
    let script_path = PathBuf::from(script_path);
    let name = csv_path.display().to_string().replace('\'', "''");
    let text = format!(
        "# {TOOL_VERSION}\n\
         set datafile separator ','\n\
         set datafile commentschars '#'\n\
         set key autotitle columnhead\n\
         set xlabel 'x'\n\
         set title '{est} (n={n}, h={h}, kernel={k})'\n\
         plot '{name}' using 1:2 with lines\n",
        est = curve.meta.estimator,
        n = curve.meta.n,
        h = curve.meta.h,
        k = curve.meta.kernel,
    );
    fs::write(&script_path, text).map_err(|e| Error::io(&script_path, e).into())
}

fn mc_config(mc: &McArgs, eval: EvalPoints) -> Result<McConfig, Failure> {
    let (kernel, spec) = estimator_spec(&mc.est)?;
    let cfg = McConfig {
        model: TrueModel::from_name(&mc.model)?,
        kernel,
        n: mc.n,
        reps: mc.reps,
        h: spec.h.get(),
        h_pivot: spec.h_pivot.get(),
        estimator: spec.estimator,
        weight: spec.weight,
        eval,
        seed: mc.seed,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn row3(q: &str, x: Option<f64>, v: f64) -> Vec<String> {
    vec![q.to_string(), x.map(fmt17).unwrap_or_default(), fmt17(v)]
}

fn theory_rows(
    model: &str,
    kernel: &str,
    n: usize,
    h: f64,
    xs: &[f64],
    t: Option<f64>,
    npmle_t: Option<f64>,
) -> Result<Vec<Vec<String>>, Failure> {
    let model = TrueModel::from_name(model)?;
    let k = Kernel::by_name(kernel)?;
    Bandwidth::new(h)?;
    if n < 2 {
        return Err(Failure::Usage(format!("--n must be at least 2, got {n}")));
    }
    if let Some(t) = t {
        WeightSpec::FixedT(t).validate()?;
    }
    let mut rows = Vec::new();
    for &x in xs {
        let x1 = Some(x);
        rows.push(row3("f", x1, model.f(x)));
        rows.push(row3("F", x1, model.cdf(x)));
        rows.push(row3("bias_density", x1, theory::asymp_bias_density(&model, x, h, &k)));
        rows.push(row3("var_density_minus", x1, theory::asymp_var_density_t(&model, x, 1.0, n, h, &k)));
        rows.push(row3("var_density_plus", x1, theory::asymp_var_density_t(&model, x, 0.0, n, h, &k)));
        rows.push(row3("var_density_combined", x1, theory::asymp_var_density_combined(&model, x, n, h, &k)));
        rows.push(row3("bias_cdf", x1, theory::asymp_bias_cdf(&model, x, h, &k)));
        rows.push(row3("var_cdf_minus", x1, theory::asymp_var_cdf_t(&model, x, 1.0, n, h, &k)));
        rows.push(row3("var_cdf_plus", x1, theory::asymp_var_cdf_t(&model, x, 0.0, n, h, &k)));
        rows.push(row3("var_cdf_combined", x1, theory::asymp_var_cdf_combined(&model, x, n, h, &k)));
        if let Some(t) = t {
            rows.push(row3("var_density_t", x1, theory::asymp_var_density_t(&model, x, t, n, h, &k)));
            rows.push(row3("var_cdf_t", x1, theory::asymp_var_cdf_t(&model, x, t, n, h, &k)));
        }
    }
    match theory::mise_expansion(&model, n, h, &k) {
        Ok(m) => {
            rows.push(row3("mise_bias_term", None, m.bias_term));
            rows.push(row3("mise_var_term", None, m.var_term));
            rows.push(row3("mise_total", None, m.total));
        }
        Err(Error::DegenerateModel(_)) => {}
        Err(e) => return Err(e.into()),
    }
    for (name, choice) in [
        ("h_opt_density", theory::optimal_bandwidth_density(&model, n, &k)),
        ("h_opt_cdf", theory::optimal_bandwidth_cdf(&model, n, &k)),
    ] {
        match choice {
            Ok(c) => rows.push(row3(name, None, c.h)),
            Err(Error::DegenerateModel(_)) => {}
            Err(e) => return Err(e.into()),
        }
    }
    if let Some(tp) = npmle_t {
        let v = theory::npmle_variance_integral(&model, h, tp, &k)?;
        rows.push(row3("npmle_variance_integral", Some(tp), v));
        rows.push(row3("npmle_h3_scaled", Some(tp), h.powi(3) * v));
        rows.push(row3("npmle_limit", Some(tp), model.cdf(tp) * (1.0 - model.cdf(tp)) * k.dl2()));
    }
    Ok(rows)
}

fn kernel_rows(k: &Kernel) -> Result<Vec<Vec<String>>, Failure> {
    let f = kernel_functionals(k)?;
    let mut rows = vec![
        vec!["m2".to_string(), fmt17(f.m2)],
        vec!["l2".to_string(), fmt17(f.l2)],
        vec!["dl2".to_string(), fmt17(f.dl2)],
        vec!["int_w_deriv_4".to_string(), fmt17(k.deriv_power_integral(4)?)],
    ];
    for c in validate_w1(k).checks {
        rows.push(vec![format!("check_{}", c.name), if c.passed { "pass" } else { "fail" }.to_string()]);
    }
    Ok(rows)
}
