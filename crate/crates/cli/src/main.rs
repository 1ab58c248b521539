use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use modlab::autoseries::{
    eisenstein, g_series, p_classical, p_second, q_series, u_series, z_series, SeriesKind, SeriesRequest, SumMode,
};
use modlab::crossing::{crossing_curve, crossing_reports, KzForm, DEFAULT_KZ_ORDER};
use modlab::dims::dim_row;
use modlab::eval::{eval_qexp, ModularForm};
use modlab::group::{gamma0_context, theta_context, GroupContext, Mat2};
use modlab::qseries::resolve_form;
use modlab::symbols::{period_polynomial, Base, Hom0Spec};
use modlab::verify::{run_suite, OutputFormat, RunConfig, Suite};
use modlab::Error;
use num_complex::Complex64 as C64;
use serde_json::json;

#[derive(Parser)]
#[command(name = "modlab", version, about = "Second-order modular forms laboratory")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Dimension table for Gamma0(N).
    Dims(DimsArgs),
    /// Evaluate one automorphic series.
    Series(SeriesArgs),
    /// Evaluate a form from its q-expansion.
    Eval(EvalArgs),
    /// Period polynomial of a form at a group element.
    Periods(PeriodsArgs),
    /// Crossing probability curve from the weight 2 form K.
    Crossing(CrossingArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct DimsArgs {
    #[arg(long)]
    level: u64,
    /// Largest weight; rows for even k from --kmin up to this.
    #[arg(long, conflicts_with = "k")]
    kmax: Option<i64>,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    kmin: i64,
    /// A single weight.
    #[arg(long, allow_hyphen_values = true)]
    k: Option<i64>,
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Args)]
struct SeriesArgs {
    #[arg(long)]
    series: String,
    #[arg(long, default_value_t = 1)]
    level: u64,
    /// Use the theta group instead of Gamma0(level).
    #[arg(long)]
    theta: bool,
    #[arg(long, default_value = "inf")]
    cusp: String,
    #[arg(long, default_value_t = 0)]
    m: i64,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    k: i64,
    /// re,im
    #[arg(long, default_value = "2,0", allow_hyphen_values = true)]
    s: String,
    /// x,y
    #[arg(long, allow_hyphen_values = true)]
    z: String,
    #[arg(long, default_value_t = 100)]
    cmax: u64,
    #[arg(long, default_value = "repro")]
    mode: String,
    /// Weight 2 cusp form for Q, G, Z; also defines L for P2.
    #[arg(long, default_value = "f11")]
    form: String,
    /// Index n of the Q-series.
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    n: i64,
    #[arg(long, default_value_t = 600)]
    order: usize,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    form: String,
    #[arg(long, allow_hyphen_values = true)]
    z: String,
    #[arg(long, default_value_t = 512)]
    order: usize,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
}

#[derive(Args)]
struct PeriodsArgs {
    #[arg(long)]
    form: String,
    /// a,b,c,d
    #[arg(long, allow_hyphen_values = true)]
    gamma: String,
    #[arg(long)]
    k: Option<i64>,
    /// i or inf
    #[arg(long, default_value = "i")]
    base: String,
    #[arg(long, default_value_t = 600)]
    order: usize,
}

#[derive(Args)]
struct CrossingArgs {
    #[arg(long, default_value_t = 0.5)]
    rmin: f64,
    #[arg(long, default_value_t = 2.0)]
    rmax: f64,
    #[arg(long, default_value_t = 31)]
    steps: usize,
    #[arg(long, default_value_t = DEFAULT_KZ_ORDER)]
    order: usize,
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long)]
    seed: Option<u64>,
    /// key = value file; flags win over it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    mode: Option<String>,
    /// Leave wall-clock timings out of the reports.
    #[arg(long)]
    no_timing: bool,
}

/// Failure with its exit code: 1 computation, 2 usage or config.
struct Fail(u8, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Quadrature(_) | Error::Overflow | Error::InsufficientOrder { .. } => 1,
            _ => 2,
        };
        Fail(code, e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Fail {
    Fail(2, msg.into())
}

fn parse_floats(s: &str, n: usize, what: &str) -> Result<Vec<f64>, Fail> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| usage(format!("--{what}: expected {n} comma-separated numbers, got '{s}'")))?;
    if v.len() != n {
        return Err(usage(format!("--{what}: expected {n} comma-separated numbers, got '{s}'")));
    }
    Ok(v)
}

fn parse_c64(s: &str, what: &str) -> Result<C64, Fail> {
    let v = parse_floats(s, 2, what)?;
    Ok(C64::new(v[0], v[1]))
}

/// println! that treats a closed reader (`| head`) as a normal end of output.
macro_rules! out {
    ($($t:tt)*) => {
        if let Err(e) = writeln!(std::io::stdout().lock(), $($t)*) {
            closed_or_fail(e);
        }
    };
}

fn closed_or_fail(e: std::io::Error) {
    if e.kind() == std::io::ErrorKind::BrokenPipe {
        std::process::exit(0);
    }
    eprintln!("error: {e}");
    std::process::exit(1);
}

fn csv_fail(e: csv::Error) -> Fail {
    if let csv::ErrorKind::Io(io) = e.kind() {
        if io.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
    }
    Fail(1, e.to_string())
}

fn c_json(z: C64) -> serde_json::Value {
    json!([z.re, z.im])
}

fn print_json(v: &serde_json::Value) {
    out!("{}", serde_json::to_string_pretty(v).expect("json"));
}

fn format_of(s: &str) -> Result<OutputFormat, Fail> {
    s.parse().map_err(|e: Error| usage(e.to_string()))
}

fn cmd_dims(a: DimsArgs) -> Result<(), Fail> {
    let ctx = gamma0_context(a.level)?;
    let ks: Vec<i64> = match (a.k, a.kmax) {
        (Some(k), _) => vec![k],
        (None, Some(kmax)) => (a.kmin..=kmax).collect(),
        (None, None) => (a.kmin..=12).collect(),
    };
    if let Some(&odd) = ks.iter().find(|k| *k % 2 != 0 && a.k.is_some()) {
        return Err(usage(format!("k = {odd}: even weight only")));
    }
    let mut rows = Vec::new();
    for k in ks.into_iter().filter(|k| k % 2 == 0) {
        rows.push(dim_row(&ctx, k)?);
    }
    match format_of(&a.format)? {
        OutputFormat::Json => print_json(&serde_json::to_value(&rows).expect("json")),
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(std::io::stdout());
            for r in &rows {
                w.serialize(r).map_err(csv_fail)?;
            }
            w.flush().map_err(|e| csv_fail(e.into()))?;
        }
        OutputFormat::Text => {
            out!("{:>4} {:>4} {:>5} {:>5} {:>5} {:>6} {:>6} {:>6} {:>6} {:>6}", "N", "k", "S", "M", "E", "S2", "M2", "H1", "lower", "upper");
            for r in &rows {
                let h1 = r.h1.map(|h| h.to_string()).unwrap_or_else(|| "-".into());
                out!(
                    "{:>4} {:>4} {:>5} {:>5} {:>5} {:>6} {:>6} {:>6} {:>6} {:>6}",
                    r.level, r.k, r.s, r.m, r.e, r.s2, r.m2, h1, r.lower, r.upper
                );
            }
        }
    }
    Ok(())
}

fn weight2_form(label: &str, order: usize) -> Result<Arc<ModularForm>, Fail> {
    let entry = resolve_form(label, order)?;
    let level = entry.series.level.max(1);
    Ok(Arc::new(ModularForm::new(entry.series, 2, level)?))
}

fn cmd_series(a: SeriesArgs) -> Result<(), Fail> {
    let kind: SeriesKind = a.series.parse()?;
    let ctx: GroupContext = if a.theta { theta_context() } else { gamma0_context(a.level)? };
    let mode = match a.mode.as_str() {
        "repro" => SumMode::Repro,
        "fast" => SumMode::Fast,
        m => return Err(usage(format!("--mode: expected repro or fast, got '{m}'"))),
    };
    let mut req = SeriesRequest::new(ctx, parse_c64(&a.z, "z")?)
        .cusp(&a.cusp)
        .m(a.m)
        .k(a.k)
        .s(parse_c64(&a.s, "s")?)
        .c_max(a.cmax)
        .mode(mode);
    if matches!(kind, SeriesKind::Q | SeriesKind::G | SeriesKind::Z | SeriesKind::P2) {
        let f = weight2_form(&a.form, a.order)?;
        req = req.with_l(Hom0Spec::symbol_of(f.clone())).with_form(f);
    }
    let out = match kind {
        SeriesKind::E => serde_json::to_value(eisenstein(&req)?),
        SeriesKind::U => serde_json::to_value(u_series(&req)?),
        SeriesKind::P => serde_json::to_value(p_classical(&req)?),
        SeriesKind::P2 => serde_json::to_value(p_second(&req)?),
        SeriesKind::Q => serde_json::to_value(q_series(&req, a.n)?),
        SeriesKind::G => serde_json::to_value(g_series(&req)?),
        SeriesKind::Z => serde_json::to_value(z_series(&req)?),
    }
    .expect("json");
    print_json(&out);
    Ok(())
}

fn cmd_eval(a: EvalArgs) -> Result<(), Fail> {
    if !(a.tol > 0.0) {
        return Err(usage("--tol must be positive"));
    }
    let z = parse_c64(&a.z, "z")?;
    let entry = resolve_form(&a.form, a.order)?;
    let out = match eval_qexp(&entry.series, z, a.tol) {
        Ok(v) => json!({"form": entry.label, "z": c_json(z), "value": c_json(v.value), "tail": v.tail, "terms": v.terms, "method": "q-expansion"}),
        Err(Error::InsufficientOrder { .. }) if entry.series.weight.is_integer() => {
            // low point: fall back to modular reduction when the level allows it
            let k = entry.series.weight.to_integer();
            let mf = ModularForm::new(entry.series.clone(), k, entry.series.level.max(1))?;
            json!({"form": entry.label, "z": c_json(z), "value": c_json(mf.eval(z)?), "method": "modular reduction"})
        }
        Err(e) => return Err(e.into()),
    };
    print_json(&out);
    Ok(())
}

fn cmd_periods(a: PeriodsArgs) -> Result<(), Fail> {
    let v = parse_floats(&a.gamma, 4, "gamma")?;
    if v.iter().any(|x| x.fract() != 0.0) {
        return Err(usage("--gamma: entries must be integers"));
    }
    let g = Mat2::new(v[0] as i64, v[1] as i64, v[2] as i64, v[3] as i64)?;
    let base = match a.base.as_str() {
        "i" => Base::Interior,
        "inf" | "oo" => Base::Cusp,
        b => return Err(usage(format!("--base: expected i or inf, got '{b}'"))),
    };
    let entry = resolve_form(&a.form, a.order)?;
    let k = match a.k {
        Some(k) => k,
        None if entry.series.weight.is_integer() => entry.series.weight.to_integer(),
        None => return Err(usage("--k is required for forms of fractional weight")),
    };
    if k % 2 != 0 {
        return Err(Error::UnsupportedWeight(k).into());
    }
    let level = entry.series.level.max(1);
    let mf = Arc::new(ModularForm::new(entry.series, k, level)?);
    let p = period_polynomial(&mf.evaluator(), k, &g, base, true)?;
    print_json(&json!({
        "form": a.form,
        "gamma": [g.a, g.b, g.c, g.d],
        "k": k,
        "base": a.base,
        "coefficients": p.coeffs.iter().map(|c| c_json(*c)).collect::<Vec<_>>(),
    }));
    Ok(())
}

fn cmd_crossing(a: CrossingArgs) -> Result<(), Fail> {
    let form = KzForm::new(a.order)?;
    let curve = crossing_curve(&form, a.rmin, a.rmax, a.steps)?;
    let csv = curve.to_csv();
    match &a.output {
        Some(p) => {
            fs::write(p, csv).map_err(|e| Fail(1, format!("{}: {e}", p.display())))?;
            let reports = crossing_reports(&curve, 1e-4);
            print_json(&json!({
                "output": p.display().to_string(),
                "points": curve.points.len(),
                "fitted_constant": curve.fitted_constant,
                "max_abs_dev": curve.max_abs_dev,
                "cardy_minus_watts_fitted_constant": curve.watts_fitted_constant,
                "cardy_minus_watts_max_abs_dev": curve.watts_max_abs_dev,
                "reports": reports,
            }));
        }
        None => {
            if let Err(e) = std::io::stdout().write_all(csv.as_bytes()) {
                closed_or_fail(e);
            }
        }
    }
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> Result<bool, Fail> {
    let suite: Suite = match a.suite.as_str() {
        // period cochains and the cohomology count live with the symbols suite
        "cohomology" => Suite::Symbols,
        s => s.parse()?,
    };
    let mut cfg = RunConfig::default();
    if let Some(p) = &a.config {
        let text = fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
        cfg.apply_text(&text)?;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(f) = &a.format {
        cfg.set("format", f)?;
    }
    if let Some(m) = &a.mode {
        cfg.set("mode", m)?;
    }
    if a.no_timing {
        cfg.timing = false;
    }
    let report = run_suite(suite, &cfg);
    match cfg.format {
        OutputFormat::Json => out!("{}", serde_json::to_string_pretty(&report).expect("json")),
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(std::io::stdout());
            for r in &report.reports {
                w.serialize(r).map_err(csv_fail)?;
            }
            w.flush().map_err(|e| csv_fail(e.into()))?;
        }
        OutputFormat::Text => {
            for r in &report.reports {
                out!(
                    "{} {} [{}] residual={:.3e} tol={:.3e}{}",
                    if r.pass { "PASS" } else { "FAIL" },
                    r.identity,
                    r.parameters,
                    r.residual,
                    r.tolerance,
                    if r.note.is_empty() { String::new() } else { format!(" ({})", r.note) }
                );
            }
        }
    }
    let failures = report.failures();
    if !failures.is_empty() {
        eprintln!("{} of {} reports failed:", failures.len(), report.reports.len());
        for r in failures {
            eprintln!("  {} [{}]", r.identity, r.parameters);
        }
    }
    Ok(report.all_pass())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Dims(a) => cmd_dims(a).map(|_| true),
        Cmd::Series(a) => cmd_series(a).map(|_| true),
        Cmd::Eval(a) => cmd_eval(a).map(|_| true),
        Cmd::Periods(a) => cmd_periods(a).map(|_| true),
        Cmd::Crossing(a) => cmd_crossing(a).map(|_| true),
        Cmd::Verify(a) => cmd_verify(a),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
