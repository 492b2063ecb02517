use std::fs::File;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use wishdiff::asymptotic::AsymptoticModel;
use wishdiff::diagonal_law::DiagonalLaw;
use wishdiff::helstrom::{helstrom_asymptotic, lookup, HelstromFixture};
use wishdiff::montecarlo::{ks_distance, simulate_eigenvalues, EmpiricalSpectrum, Ensemble, DEFAULT_BINS};
use wishdiff::oracle::{Oracle1, ORACLE_MAX_N};
use wishdiff::positivity::{SpectralStatistics, DEFAULT_GAMMA_CAP};
use wishdiff::specfun::{decimal, parse_rational};
use wishdiff::spectral::build_kernel;
use wishdiff::verify::verify_identities;
use wishdiff::{BigFloat, EnsembleParams, Error, Rational};

/// Largest n for which `simulate` compares against the exact density.
const EXACT_MAX_N: u32 = 10;

const CDF_PREC: u32 = 256;

#[derive(Parser)]
#[command(name = "wishdiff", version, about = "Spectral statistics of differences of complex Wishart and density matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Law of a diagonal element and its derivatives.
    Wlaw(WlawArgs),
    /// Exact finite-n spectral density.
    Density(DensityArgs),
    /// r-point correlation function det[S(λᵢ, λⱼ)].
    Correlate(CorrelateArgs),
    /// Large-n spectral density.
    Asymptotic(AsymptoticArgs),
    /// Monte Carlo eigenvalue histogram.
    Simulate(SimulateArgs),
    /// Probabilities of positive eigenvalues.
    Positivity(PositivityArgs),
    /// Moments ⟨λ^γ⟩ and ⟨|λ|^γ⟩.
    Moments(MomentsArgs),
    /// Difference of two random density matrices.
    Helstrom(HelstromArgs),
    /// Checks every exact identity for one parameter set.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Clone)]
struct Output {
    /// Output file, or - for standard output.
    #[arg(long, default_value = "-")]
    output: String,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Also write the JSON document to this file when the format is csv.
    #[arg(long)]
    summary: Option<String>,
}

#[derive(Args, Clone)]
struct Ensemble5 {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    n1: u32,
    #[arg(long)]
    n2: u32,
    /// Weight of W₁ as p/q.
    #[arg(long, allow_hyphen_values = true)]
    a1: String,
    /// Weight of W₂ as p/q.
    #[arg(long, allow_hyphen_values = true)]
    a2: String,
}

impl Ensemble5 {
    fn params(&self) -> Result<EnsembleParams, Error> {
        EnsembleParams::new(self.n, self.n1, self.n2, parse_rational(&self.a1)?, parse_rational(&self.a2)?)
    }
}

#[derive(Args)]
struct WlawArgs {
    #[arg(long)]
    n1: u32,
    #[arg(long)]
    n2: u32,
    #[arg(long, allow_hyphen_values = true)]
    a1: String,
    #[arg(long, allow_hyphen_values = true)]
    a2: String,
    /// Basis index j: the (j−1)-th derivative of w.
    #[arg(long, default_value_t = 1)]
    deriv: u32,
    /// lo:hi:steps
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Include the exact piecewise form in the JSON output.
    #[arg(long)]
    exact_form: bool,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct DensityArgs {
    #[command(flatten)]
    ens: Ensemble5,
    /// lo:hi:steps
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Add a column from the independent floating-point route.
    #[arg(long)]
    oracle: bool,
    /// Include the exact piecewise form in the JSON output.
    #[arg(long)]
    exact_form: bool,
    /// Working precision in bits.
    #[arg(long, default_value_t = 128)]
    prec: u32,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct CorrelateArgs {
    #[command(flatten)]
    ens: Ensemble5,
    /// Comma-separated evaluation points.
    #[arg(long, allow_hyphen_values = true)]
    points: String,
    #[arg(long, default_value_t = 128)]
    prec: u32,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct AsymptoticArgs {
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    n1: Option<u32>,
    #[arg(long)]
    n2: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    a1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    a2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    c1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    c2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha2: Option<String>,
    /// lo:hi:steps, default the support with 201 points.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Clone)]
struct McArgs {
    /// Number of matrices to draw.
    #[arg(long)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    bins: usize,
    /// Worker threads; 0 uses every core.
    #[arg(long, env = "WISHDIFF_WORKERS", default_value_t = 0)]
    workers: usize,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    n1: u32,
    #[arg(long)]
    n2: u32,
    #[arg(long, allow_hyphen_values = true)]
    a1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    a2: Option<String>,
    /// Sample ρ₁ − ρ₂ instead of a₁W₁ − a₂W₂.
    #[arg(long)]
    density_matrices: bool,
    #[command(flatten)]
    mc: McArgs,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct PositivityArgs {
    #[command(flatten)]
    ens: Ensemble5,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct MomentsArgs {
    #[command(flatten)]
    ens: Ensemble5,
    #[arg(long, default_value_t = 4)]
    gamma_max: u32,
    /// Raise the largest permitted order.
    #[arg(long, default_value_t = DEFAULT_GAMMA_CAP)]
    gamma_cap: u32,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct HelstromArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    n1: u32,
    #[arg(long)]
    n2: u32,
    /// lo:hi:steps, default -1:1:201.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Answer by Monte Carlo with this many matrix pairs.
    #[arg(long)]
    simulate: Option<usize>,
    /// Answer with the large-n model.
    #[arg(long)]
    asymptotic: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    bins: usize,
    #[arg(long, env = "WISHDIFF_WORKERS", default_value_t = 0)]
    workers: usize,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    ens: Ensemble5,
    #[arg(long)]
    json: bool,
    #[arg(long, default_value = "-")]
    output: String,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParams(_) | Error::Parse(_) | Error::Domain(_) => 2,
            Error::Unsupported(_) | Error::Degenerate(_) => 3,
            Error::Consistency(_) | Error::Numeric(_) | Error::BranchSelection(_) => 4,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self {
            code: 1,
            message: format!("i/o error: {e}"),
        }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

type Run = Result<(), Failure>;

/// Tabular result plus its JSON document.
struct Artifact {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    json: Value,
}

fn sink(path: &str) -> io::Result<Box<dyn Write>> {
    if path == "-" {
        Ok(Box::new(io::stdout().lock()))
    } else {
        Ok(Box::new(File::create(path)?))
    }
}

fn write_json(path: &str, v: &Value) -> Run {
    let mut w = sink(path)?;
    serde_json::to_writer_pretty(&mut w, v).map_err(io::Error::from)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn emit(out: &Output, a: &Artifact) -> Run {
    match out.format {
        Format::Json => write_json(&out.output, &a.json)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(sink(&out.output)?);
            let map = |e: csv::Error| Failure {
                code: 1,
                message: format!("csv error: {e}"),
            };
            w.write_record(&a.header).map_err(map)?;
            for r in &a.rows {
                w.write_record(r).map_err(map)?;
            }
            w.flush()?;
            if let Some(path) = &out.summary {
                write_json(path, &a.json)?;
            }
        }
    }
    Ok(())
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn exact(r: &Rational) -> Value {
    json!({"exact": r.to_string(), "decimal": decimal(r, 15)})
}

fn parse_point(s: &str) -> Result<f64, Failure> {
    let t = s.trim();
    if let Ok(r) = parse_rational(t) {
        return Ok(r.to_f64());
    }
    t.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| invalid(format!("'{t}' is not a number")))
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(invalid(format!("grid '{spec}' must be lo:hi:steps")));
    }
    let lo = parse_point(parts[0])?;
    let hi = parse_point(parts[1])?;
    let steps: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| invalid(format!("grid steps '{}' is not a positive integer", parts[2])))?;
    if steps < 2 {
        return Err(invalid("grid needs at least 2 steps"));
    }
    if !(lo < hi) {
        return Err(invalid(format!("grid needs lo < hi, got {lo} and {hi}")));
    }
    Ok((0..steps)
        .map(|i| if i + 1 == steps { hi } else { lo + (hi - lo) * i as f64 / (steps - 1) as f64 })
        .collect())
}

fn params_json(p: &EnsembleParams) -> Value {
    json!({"n": p.n, "n1": p.n1, "n2": p.n2, "a1": p.a1.to_string(), "a2": p.a2.to_string()})
}

fn wlaw(a: WlawArgs) -> Run {
    let n = a.n1.min(a.n2).max(1);
    let p = EnsembleParams::new(n, a.n1, a.n2, parse_rational(&a.a1)?, parse_rational(&a.a2)?)?;
    if a.deriv == 0 {
        return Err(invalid("--deriv counts from 1"));
    }
    let law = DiagonalLaw::with_order(&p, a.deriv)?;
    let f = law.ftilde(a.deriv);
    let xs = match &a.grid {
        Some(g) => parse_grid(g)?,
        None if a.exact_form => Vec::new(),
        None => return Err(invalid("wlaw needs --grid or --exact-form")),
    };
    let vals: Vec<f64> = xs.iter().map(|&x| f.eval_f64(x)).collect();
    let mut doc = json!({
        "n1": p.n1, "n2": p.n2, "a1": p.a1.to_string(), "a2": p.a2.to_string(),
        "deriv": a.deriv,
        "points": xs.iter().zip(&vals).map(|(x, v)| json!({"lambda": x, "value": v})).collect::<Vec<_>>(),
    });
    if a.exact_form {
        doc["exact_form"] = f.to_json();
    }
    emit(
        &a.out,
        &Artifact {
            header: vec!["lambda", "value"],
            rows: xs.iter().zip(&vals).map(|(x, v)| vec![num(*x), num(*v)]).collect(),
            json: doc,
        },
    )
}

fn density(a: DensityArgs) -> Run {
    let p = a.ens.params()?;
    let prec = a.prec.max(53);
    let dens = build_kernel(&p)?.density();
    let xs = match &a.grid {
        Some(g) => parse_grid(g)?,
        None if a.exact_form => Vec::new(),
        None => return Err(invalid("density needs --grid or --exact-form")),
    };
    let oracle = if a.oracle {
        if p.n > ORACLE_MAX_N {
            return Err(Error::Unsupported(format!("--oracle supports n <= {ORACLE_MAX_N}")).into());
        }
        Some(Oracle1::new(&p, prec)?)
    } else {
        None
    };
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for &x in &xs {
        let lam = BigFloat::with_val(prec, x);
        let v = dens.evaluate(&lam).to_f64();
        let mut row = vec![num(x), num(v)];
        let mut pt = json!({"lambda": x, "p": v});
        if let Some(o) = &oracle {
            let w = o.density(&lam)?.to_f64();
            row.push(num(w));
            pt["oracle"] = json!(w);
        }
        rows.push(row);
        points.push(pt);
    }
    let mut doc = json!({"params": params_json(&p), "points": points});
    if a.exact_form {
        doc["exact_form"] = dens.to_json();
    }
    let mut header = vec!["lambda", "p"];
    if oracle.is_some() {
        header.push("oracle");
    }
    emit(&a.out, &Artifact { header, rows, json: doc })
}

fn correlate(a: CorrelateArgs) -> Run {
    let p = a.ens.params()?;
    let xs = a.points.split(',').map(parse_point).collect::<Result<Vec<_>, _>>()?;
    let prec = a.prec.max(53);
    let pts: Vec<BigFloat> = xs.iter().map(|&x| BigFloat::with_val(prec, x)).collect();
    let v = build_kernel(&p)?.correlation(&pts)?.to_f64();
    let doc = json!({"params": params_json(&p), "points": xs, "order": xs.len(), "value": v});
    emit(
        &a.out,
        &Artifact {
            header: vec!["order", "value"],
            rows: vec![vec![xs.len().to_string(), num(v)]],
            json: doc,
        },
    )
}

fn asymptotic(a: AsymptoticArgs) -> Run {
    let direct = [&a.c1, &a.c2, &a.alpha1, &a.alpha2];
    let scaled = (a.n, a.n1, a.n2, &a.a1, &a.a2);
    let model = match (direct.iter().all(|x| x.is_some()), scaled) {
        (true, (None, None, None, None, None)) => {
            let r = |s: &Option<String>| parse_rational(s.as_deref().expect("checked"));
            AsymptoticModel::new(r(&a.c1)?, r(&a.c2)?, r(&a.alpha1)?, r(&a.alpha2)?)?
        }
        (false, (Some(n), Some(n1), Some(n2), Some(a1), Some(a2))) if direct.iter().all(|x| x.is_none()) => {
            AsymptoticModel::from_unscaled(&EnsembleParams::new(n, n1, n2, parse_rational(a1)?, parse_rational(a2)?)?)?
        }
        _ => {
            return Err(invalid(
                "give either --n --n1 --n2 --a1 --a2 or --c1 --c2 --alpha1 --alpha2",
            ))
        }
    };
    let (lo, hi) = model.support();
    let xs = match &a.grid {
        Some(g) => parse_grid(g)?,
        None => (0..201).map(|i| lo + (hi - lo) * i as f64 / 200.0).collect(),
    };
    let vals = xs.iter().map(|&x| model.density(x)).collect::<Result<Vec<_>, _>>()?;
    let doc = json!({
        "model": {
            "c1": model.c1.to_string(), "c2": model.c2.to_string(),
            "alpha1": model.alpha1.to_string(), "alpha2": model.alpha2.to_string(),
        },
        "support": [lo, hi],
        "points": xs.iter().zip(&vals).map(|(x, v)| json!({"lambda": x, "density": v})).collect::<Vec<_>>(),
    });
    emit(
        &a.out,
        &Artifact {
            header: vec!["lambda", "density"],
            rows: xs.iter().zip(&vals).map(|(x, v)| vec![num(*x), num(*v)]).collect(),
            json: doc,
        },
    )
}

fn histogram_artifact(emp: &EmpiricalSpectrum, doc: Value) -> Artifact {
    let heights = emp.heights();
    let rows = emp
        .edges()
        .windows(2)
        .zip(emp.counts())
        .zip(&heights)
        .map(|((e, c), h)| vec![num(e[0]), num(e[1]), c.to_string(), num(*h)])
        .collect();
    Artifact {
        header: vec!["bin_lo", "bin_hi", "count", "density"],
        rows,
        json: doc,
    }
}

fn check_mc(mc: &McArgs) -> Run {
    if mc.samples == 0 {
        return Err(invalid("--samples must be at least 1"));
    }
    if mc.bins == 0 {
        return Err(invalid("--bins must be at least 1"));
    }
    Ok(())
}

fn simulate(a: SimulateArgs) -> Run {
    check_mc(&a.mc)?;
    let (ensemble, exact_cdf, model): (Ensemble, Option<Box<dyn Fn(f64) -> f64 + Sync>>, _) = if a.density_matrices {
        if a.n == 0 || a.n > a.n1 || a.n > a.n2 {
            return Err(invalid("need 1 <= n <= n1, n2"));
        }
        let fixture = if a.n1 <= a.n2 {
            lookup(a.n, a.n1, a.n2).ok().map(|f| (f, false))
        } else {
            lookup(a.n, a.n2, a.n1).ok().map(|f| (f, true))
        };
        let cdf: Option<Box<dyn Fn(f64) -> f64 + Sync>> = fixture.map(|(f, flip)| {
            let c = f.cdf();
            let b: Box<dyn Fn(f64) -> f64 + Sync> = if flip {
                Box::new(move |x: f64| 1.0 - c.eval_f64(-x))
            } else {
                Box::new(move |x: f64| c.eval_f64(x))
            };
            b
        });
        (
            Ensemble::Helstrom { n: a.n, n1: a.n1, n2: a.n2 },
            cdf,
            helstrom_asymptotic(a.n, a.n1, a.n2).ok(),
        )
    } else {
        let (Some(a1), Some(a2)) = (&a.a1, &a.a2) else {
            return Err(invalid("simulate needs --a1 and --a2 unless --density-matrices is set"));
        };
        let p = EnsembleParams::new(a.n, a.n1, a.n2, parse_rational(a1)?, parse_rational(a2)?)?;
        let cdf: Option<Box<dyn Fn(f64) -> f64 + Sync>> = if p.n <= EXACT_MAX_N {
            let c = build_kernel(&p)?.density().cdf_function();
            Some(Box::new(move |x: f64| c.eval_f64(x, CDF_PREC)))
        } else {
            None
        };
        let model = AsymptoticModel::from_unscaled(&p).ok();
        (Ensemble::WishartDifference(p), cdf, model)
    };
    let ev = simulate_eigenvalues(&ensemble, a.mc.samples, a.mc.seed, a.mc.workers)?;
    let emp = EmpiricalSpectrum::new(ev, a.mc.bins)?;
    let ks_exact = exact_cdf.map(|c| ks_distance(&emp, c));
    let ks_asym = match &model {
        Some(m) => {
            let c = m.cdf_table(4000)?;
            Some(ks_distance(&emp, |x| c.eval(x)))
        }
        None => None,
    };
    let doc = json!({
        "ensemble": if a.density_matrices { "helstrom" } else { "wishart_difference" },
        "n": a.n, "n1": a.n1, "n2": a.n2,
        "a1": if a.density_matrices { Value::Null } else { json!(a.a1) },
        "a2": if a.density_matrices { Value::Null } else { json!(a.a2) },
        "matrices": a.mc.samples,
        "eigenvalues": emp.len(),
        "seed": a.mc.seed,
        "mean": emp.mean(),
        "variance": emp.variance(),
        "ks_vs_exact": ks_exact,
        "ks_vs_asymptotic": ks_asym,
        "histogram": {"edges": emp.edges(), "counts": emp.counts()},
    });
    emit(&a.out, &histogram_artifact(&emp, doc))
}

fn positivity(a: PositivityArgs) -> Run {
    let p = a.ens.params()?;
    let r = SpectralStatistics::new(&p, 0)?.report()?;
    let mut doc = r.to_json();
    doc["params"] = params_json(&p);
    let rows = [
        ("P_plus", &r.p_all_pos),
        ("P_minus", &r.p_all_neg),
        ("p_plus", &r.frac_pos),
        ("p_minus", &r.frac_neg),
    ]
    .iter()
    .map(|(k, v)| vec![k.to_string(), v.to_string(), decimal(v, 15)])
    .collect();
    emit(
        &a.out,
        &Artifact {
            header: vec!["quantity", "exact", "decimal"],
            rows,
            json: doc,
        },
    )
}

fn moments(a: MomentsArgs) -> Run {
    let p = a.ens.params()?;
    if a.gamma_max > a.gamma_cap {
        return Err(invalid(format!(
            "--gamma-max {} exceeds the cap {}; pass --gamma-cap to raise it",
            a.gamma_max, a.gamma_cap
        )));
    }
    let s = SpectralStatistics::new(&p, a.gamma_max)?;
    let mut rows = Vec::new();
    let mut list = Vec::new();
    for g in 0..=a.gamma_max {
        let m = s.moment(g)?;
        let am = s.abs_moment(g)?;
        rows.push(vec![g.to_string(), m.to_string(), decimal(&m, 15), am.to_string(), decimal(&am, 15)]);
        list.push(json!({"gamma": g, "moment": exact(&m), "abs_moment": exact(&am)}));
    }
    emit(
        &a.out,
        &Artifact {
            header: vec!["gamma", "moment", "moment_decimal", "abs_moment", "abs_moment_decimal"],
            rows,
            json: json!({"params": params_json(&p), "moments": list}),
        },
    )
}

fn fixture_for(n: u32, n1: u32, n2: u32) -> Option<(HelstromFixture, bool)> {
    if n1 <= n2 {
        lookup(n, n1, n2).ok().map(|f| (f, false))
    } else {
        lookup(n, n2, n1).ok().map(|f| (f, true))
    }
}

fn helstrom(a: HelstromArgs) -> Run {
    if a.n == 0 || a.n > a.n1 || a.n > a.n2 {
        return Err(invalid("need 1 <= n <= n1, n2"));
    }
    let xs = match &a.grid {
        Some(g) => parse_grid(g)?,
        None => (0..201).map(|i| -1.0 + i as f64 / 100.0).collect(),
    };
    let head = json!({"n": a.n, "n1": a.n1, "n2": a.n2});
    if let Some(samples) = a.simulate {
        let mc = McArgs {
            samples,
            seed: a.seed,
            bins: a.bins,
            workers: a.workers,
        };
        check_mc(&mc)?;
        let ens = Ensemble::Helstrom { n: a.n, n1: a.n1, n2: a.n2 };
        let ev = simulate_eigenvalues(&ens, samples, a.seed, a.workers)?;
        let abs_mean = ev.iter().map(|x| x.abs()).sum::<f64>() / ev.len() as f64;
        let positive = ev.iter().filter(|&&x| x > 0.0).count() as f64 / ev.len() as f64;
        let emp = EmpiricalSpectrum::with_range(ev, a.bins, -1.0, 1.0)?;
        let mut doc = head;
        doc["backend"] = json!("mc");
        doc["abs_mean"] = Value::Null;
        doc["abs_mean_estimate"] = json!(abs_mean);
        doc["positive_fraction"] = json!(positive);
        doc["matrices"] = json!(samples);
        doc["seed"] = json!(a.seed);
        doc["histogram"] = json!({"edges": emp.edges(), "counts": emp.counts()});
        return emit(&a.out, &histogram_artifact(&emp, doc));
    }
    let (backend, vals, mut doc) = if a.asymptotic {
        let m = helstrom_asymptotic(a.n, a.n1, a.n2)?;
        let vals = xs.iter().map(|&x| m.density(x)).collect::<Result<Vec<_>, _>>()?;
        let mut doc = head;
        doc["abs_mean"] = Value::Null;
        doc["support"] = json!([m.support().0, m.support().1]);
        ("asymptotic", vals, doc)
    } else {
        let Some((f, flip)) = fixture_for(a.n, a.n1, a.n2) else {
            return Err(Error::Unsupported(format!(
                "no exact density for ({}, {}, {}); use --simulate N or --asymptotic",
                a.n, a.n1, a.n2
            ))
            .into());
        };
        let sign = if flip { -1.0 } else { 1.0 };
        let vals: Vec<f64> = xs.iter().map(|&x| f.density_f64(sign * x)).collect();
        let frac = if flip {
            Rational::from(1) - f.positive_mass()
        } else {
            f.positive_mass()
        };
        let mut doc = head;
        doc["abs_mean"] = json!(f.abs_mean.to_string());
        doc["abs_mean_decimal"] = json!(decimal(&f.abs_mean, 15));
        doc["positive_fraction"] = exact(&frac);
        ("fixture", vals, doc)
    };
    doc["backend"] = json!(backend);
    doc["points"] = json!(xs.iter().zip(&vals).map(|(x, v)| json!({"x": x, "density": v})).collect::<Vec<_>>());
    emit(
        &a.out,
        &Artifact {
            header: vec!["x", "density"],
            rows: xs.iter().zip(&vals).map(|(x, v)| vec![num(*x), num(*v)]).collect(),
            json: doc,
        },
    )
}

fn verify(a: VerifyArgs) -> Run {
    let p = a.ens.params()?;
    let checks = verify_identities(&p);
    let failed = checks.iter().filter(|c| !c.passed).count();
    if a.json {
        write_json(
            &a.output,
            &json!({"params": params_json(&p), "checks": checks, "failed": failed}),
        )?;
    } else {
        let mut w = sink(&a.output)?;
        for c in &checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            if c.detail.is_empty() {
                writeln!(w, "{tag} {}", c.name)?;
            } else {
                writeln!(w, "{tag} {}: {}", c.name, c.detail)?;
            }
        }
        w.flush()?;
    }
    if failed > 0 {
        return Err(Failure {
            code: 4,
            message: format!("{failed} identity check(s) failed for {p}"),
        });
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Wlaw(a) => wlaw(a),
        Command::Density(a) => density(a),
        Command::Correlate(a) => correlate(a),
        Command::Asymptotic(a) => asymptotic(a),
        Command::Simulate(a) => simulate(a),
        Command::Positivity(a) => positivity(a),
        Command::Moments(a) => moments(a),
        Command::Helstrom(a) => helstrom(a),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
