//! Batch front end: every computation of the library as a reproducible
//! table. Floats print in Rust's shortest round-trip form, rationals always
//! as `p/q`, so identical invocations produce byte-identical output.
//!
//! Exit codes: 0 success, 2 usage error, 3 domain/accuracy/numeric error,
//! 4 failed check suite.

use std::fmt::Write as _;
use std::fs;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use strebel::amplitudes::{
    one_point_d3mu, one_point_eval, one_point_exact, one_point_resummed, one_point_resummed_dmu,
    stratum_volume, volume_uniform_table, zhat_series, zhat_value, Stratum,
};
use strebel::asymptotics::{
    self, eps_window, fit_line, kpz_double_scaled_samples, kpz_fixed_ratio_samples,
    saddle_regime_forced, volume_asymptotic_log,
};
use strebel::checks;
use strebel::series::{frac_string, ln_rational_abs, rational_to_f64, Rational};
use strebel::spectral::{blowup, build_curve};
use strebel::ucurve::critical_constants;
use strebel::Error;

#[derive(Parser)]
#[command(
    name = "strebel",
    about = "Exact volumes, correlation functions and critical asymptotics of uniform-perimeter planar metric ribbon graphs",
    version
)]
struct Cli {
    /// Write the primary output to a file instead of stdout.
    #[arg(long, global = true)]
    output: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Print the critical constants as JSON.
    Critical,
    /// Exact uniform volumes with asymptotic-law comparison.
    Volumes(VolumesArgs),
    /// Exact volume of one stratum with prescribed perimeters.
    Stratum(StratumArgs),
    /// Exact one-point volume and its saddle-point regimes.
    OnePoint(OnePointArgs),
    /// Resummed one-point generating function and its derivatives.
    H(HArgs),
    /// Spectral-curve times and sampled (x, y) data.
    Curve(CurveArgs),
    /// Critical blow-up of the spectral curve.
    Blowup(BlowupArgs),
    /// n-point generating function at fixed coupling.
    Zhat(ZhatArgs),
    /// Critical-exponent fit across a window below m_c.
    FitKpz(FitKpzArgs),
    /// Run invariant check suites.
    Check(CheckArgs),
}

#[derive(Args)]
struct VolumesArgs {
    /// Largest N in the table.
    #[arg(long = "n-max")]
    n_max: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct StratumArgs {
    /// Comma-separated perimeters, integers or fractions (e.g. 1,3/2,2).
    #[arg(long)]
    perimeters: String,
}

#[derive(Args)]
struct OnePointArgs {
    /// Number of unmarked faces minus 3 (the polynomial degree in r^2).
    #[arg(long = "N", visible_alias = "n")]
    n: usize,
    /// Ratio L_1/L of the marked perimeter, integer or fraction.
    #[arg(long)]
    ratio: String,
}

#[derive(Args)]
struct HArgs {
    #[arg(long)]
    mu: f64,
    /// Uniform perimeter L.
    #[arg(long = "L", default_value = "1")]
    l: f64,
    /// Marked perimeter L_1.
    #[arg(long = "L1", default_value = "1")]
    l1: f64,
}

#[derive(Args)]
struct CurveArgs {
    /// Coupling m = mu L^2, in [0, m_c).
    #[arg(long)]
    m: f64,
    /// Number of stored times (y-polynomial degree is 2*order - 1); times
    /// beyond k = 40 are below 1e-20 for any coupling on the branch.
    #[arg(long, default_value = "40")]
    order: usize,
    /// Where to write the sampled (z, x, y) CSV; '-' for stdout.
    #[arg(long)]
    emit: Option<String>,
    /// Largest sampled z.
    #[arg(long = "z-max", default_value = "2.5")]
    z_max: f64,
    /// Number of sample steps.
    #[arg(long, default_value = "200")]
    steps: usize,
}

#[derive(Args)]
struct BlowupArgs {
    /// Distance from criticality, eps = 1 - m/m_c.
    #[arg(long)]
    eps: f64,
}

#[derive(Args)]
struct ZhatArgs {
    /// Number of marked faces (3 or 4 for float evaluation).
    #[arg(long)]
    n: usize,
    /// Comma-separated perimeter ratios L_i/L.
    #[arg(long)]
    ratios: String,
    /// Coupling m = mu L^2.
    #[arg(long)]
    m: f64,
    /// Uniform perimeter L.
    #[arg(long = "L", default_value = "1")]
    l: f64,
    /// Also emit the exact series coefficients up to this order (CSV).
    #[arg(long = "series-order")]
    series_order: Option<usize>,
}

#[derive(Args)]
struct FitKpzArgs {
    /// Number of marked faces (3 or 4).
    #[arg(long)]
    n: usize,
    /// Fit window in eps = 1 - m/m_c, as 'lo,hi'.
    #[arg(long, default_value = "1e-7,1e-3")]
    window: String,
    /// Number of log-spaced samples.
    #[arg(long, default_value = "13")]
    points: usize,
    /// Use the double-scaled regime L_i/L = c b/sqrt(eps) instead of
    /// fixed ratios.
    #[arg(long = "double-scaled")]
    double_scaled: bool,
    /// Scale constant c of the double-scaled regime.
    #[arg(long = "c-scale", default_value = "1")]
    c_scale: f64,
    /// Fixed perimeter ratios (ignored when double-scaled).
    #[arg(long, default_value = "1,1,1")]
    ratios: String,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct CheckArgs {
    /// Suite name or 'all'.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Seed for the randomized algebra checks.
    #[arg(long, default_value = "24301")]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let status = run(&cli, &mut out);
    match status {
        Ok(code) => {
            if let Some(path) = &cli.output {
                if let Err(e) = fs::write(path, out) {
                    eprintln!("error: cannot write {path}: {e}");
                    return ExitCode::from(1);
                }
            } else {
                print!("{out}");
            }
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Domain(_) | Error::Accuracy(_) | Error::Numeric(_) => ExitCode::from(3),
            }
        }
    }
}

fn run(cli: &Cli, out: &mut String) -> Result<ExitCode, Error> {
    match &cli.command {
        Command::Critical => {
            let c = critical_constants();
            writeln!(out, "{}", c.to_json()).unwrap();
        }
        Command::Volumes(args) => volumes(args, out)?,
        Command::Stratum(args) => {
            let perims = parse_rationals(&args.perimeters)?;
            if perims.len() < 3 {
                return Err(Error::Domain(
                    "a stratum needs at least 3 perimeters".into(),
                ));
            }
            let v = stratum_volume(&Stratum::new(perims));
            writeln!(
                out,
                "{{\"volume\":\"{}\",\"degree\":{},\"float\":{}}}",
                frac_string(&v.value),
                v.degree,
                rational_to_f64(&v.value)
            )
            .unwrap();
        }
        Command::OnePoint(args) => one_point(args, out)?,
        Command::H(args) => {
            let h = one_point_resummed(args.mu, args.l, args.l1)?;
            let dh = one_point_resummed_dmu(args.mu, args.l, args.l1)?;
            let d3 = one_point_d3mu(args.mu, args.l, args.l1)?;
            writeln!(
                out,
                "{{\"mu\":{},\"L\":{},\"L1\":{},\"H\":{h},\"dH_dmu\":{dh},\"d3H_dmu3\":{d3}}}",
                args.mu, args.l, args.l1
            )
            .unwrap();
        }
        Command::Curve(args) => curve(args, out)?,
        Command::Blowup(args) => {
            if !(args.eps > 0.0 && args.eps < 1.0) {
                return Err(Error::Domain("eps must lie in (0, 1)".into()));
            }
            let c = critical_constants();
            let b = blowup(c.m_c * (1.0 - args.eps), 1.0)?;
            writeln!(
                out,
                "{{\"eps\":{},\"u_gap\":{},\"px\":{},\"py\":{},\"px_measured\":{},\"py_measured\":{},\"x_tilde\":[{},{},{}],\"y_tilde\":[{},{},{},{}],\"remainder_estimate\":{}}}",
                args.eps,
                b.u_gap,
                b.px,
                b.py,
                b.px_measured,
                b.py_measured,
                b.x_tilde[0],
                b.x_tilde[1],
                b.x_tilde[2],
                b.y_tilde[0],
                b.y_tilde[1],
                b.y_tilde[2],
                b.y_tilde[3],
                b.remainder_estimate
            )
            .unwrap();
        }
        Command::Zhat(args) => zhat(args, out)?,
        Command::FitKpz(args) => fit_kpz(args, out)?,
        Command::Check(args) => {
            let outcomes = checks::run_suite_with_seed(&args.suite, args.seed)?;
            let mut failed = 0usize;
            for o in &outcomes {
                if o.passed {
                    writeln!(out, "ok   {:<13} {}", o.suite, o.name).unwrap();
                } else {
                    failed += 1;
                    writeln!(out, "FAIL {:<13} {} — {}", o.suite, o.name, o.detail).unwrap();
                }
            }
            writeln!(out, "{} checks, {} failed", outcomes.len(), failed).unwrap();
            if failed > 0 {
                return Ok(ExitCode::from(4));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn volumes(args: &VolumesArgs, out: &mut String) -> Result<(), Error> {
    let table = volume_uniform_table(args.n_max);
    match args.format {
        Format::Csv => {
            writeln!(
                out,
                "N,value_numerator,value_denominator,float_value,log_exact,log_asymptotic,ratio"
            )
            .unwrap();
            for (n, v) in table.iter().enumerate() {
                let log_exact = ln_rational_abs(v);
                if n >= 1 {
                    let log_asym = volume_asymptotic_log(n as u64);
                    writeln!(
                        out,
                        "{n},{},{},{},{},{},{}",
                        v.numer(),
                        v.denom(),
                        rational_to_f64(v),
                        log_exact,
                        log_asym,
                        (log_exact - log_asym).exp()
                    )
                    .unwrap();
                } else {
                    writeln!(
                        out,
                        "{n},{},{},{},{},,",
                        v.numer(),
                        v.denom(),
                        rational_to_f64(v),
                        log_exact
                    )
                    .unwrap();
                }
            }
        }
        Format::Json => {
            writeln!(out, "[").unwrap();
            for (n, v) in table.iter().enumerate() {
                let sep = if n + 1 == table.len() { "" } else { "," };
                writeln!(
                    out,
                    "{{\"N\":{n},\"value\":\"{}\",\"float\":{}}}{sep}",
                    frac_string(v),
                    rational_to_f64(v)
                )
                .unwrap();
            }
            writeln!(out, "]").unwrap();
        }
    }
    Ok(())
}

fn one_point(args: &OnePointArgs, out: &mut String) -> Result<(), Error> {
    let r = parse_rational(&args.ratio)?;
    if r <= Rational::from(num_bigint_int(0)) {
        return Err(Error::Domain("the perimeter ratio must be positive".into()));
    }
    let exact = one_point_eval(args.n, &r);
    let coeffs = one_point_exact(args.n);
    let r_f = rational_to_f64(&r);
    let n = args.n;
    write!(
        out,
        "{{\"N\":{n},\"ratio\":\"{}\",\"exact\":\"{}\",\"float\":{},\"coefficients\":[",
        frac_string(&r),
        frac_string(&exact),
        rational_to_f64(&exact)
    )
    .unwrap();
    for (d, c) in coeffs.iter().enumerate() {
        let sep = if d + 1 == coeffs.len() { "" } else { "," };
        write!(out, "\"{}\"{sep}", frac_string(c)).unwrap();
    }
    write!(out, "]").unwrap();
    // saddle regimes at l = r/N, when defined
    if n >= 1 {
        let l = r_f / n as f64;
        for (regime, key) in [(1u8, "regime1_log"), (2, "regime2_log"), (3, "regime3_log")] {
            match saddle_regime_forced(n as u64, l, regime) {
                Ok(s) => write!(out, ",\"{key}\":{}", s.log_fn_minus_log_prefactor).unwrap(),
                Err(_) => write!(out, ",\"{key}\":null").unwrap(),
            }
        }
        let chosen = asymptotics::saddle_regime(n as u64, l)?;
        write!(out, ",\"regime\":{}", chosen.regime).unwrap();
        write!(
            out,
            ",\"exact_log\":{}",
            asymptotics::one_point_exact_log(n, r_f)
        )
        .unwrap();
    }
    writeln!(out, "}}").unwrap();
    Ok(())
}

fn curve(args: &CurveArgs, out: &mut String) -> Result<(), Error> {
    let model = build_curve(args.m, 1.0, args.order)?;
    write!(
        out,
        "{{\"m\":{},\"u\":{},\"tail_bound\":{},\"times\":[",
        model.m, model.u, model.tail_bound
    )
    .unwrap();
    for (k, t) in model.times.iter().enumerate() {
        let sep = if k + 1 == model.times.len() { "" } else { "," };
        write!(out, "{t}{sep}").unwrap();
    }
    writeln!(out, "]}}").unwrap();
    if let Some(path) = &args.emit {
        let mut csv = String::from("z,x,y\n");
        for (z, x, y) in model.sample(args.z_max, args.steps.max(1)) {
            writeln!(csv, "{z},{x},{y}").unwrap();
        }
        if path == "-" {
            out.push_str(&csv);
        } else {
            fs::write(path, csv)
                .map_err(|e| Error::Numeric(format!("cannot write {path}: {e}")))?;
        }
    }
    Ok(())
}

fn zhat(args: &ZhatArgs, out: &mut String) -> Result<(), Error> {
    let ratios_f = parse_floats(&args.ratios)?;
    if ratios_f.len() != args.n {
        return Err(Error::Domain(format!(
            "expected {} ratios, got {}",
            args.n,
            ratios_f.len()
        )));
    }
    if let Some(order) = args.series_order {
        let ratios_q = parse_rationals(&args.ratios)?;
        let series = zhat_series(args.n, &ratios_q, order);
        writeln!(out, "k,coefficient_numerator,coefficient_denominator").unwrap();
        for (k, c) in series.coeffs().iter().enumerate() {
            writeln!(out, "{k},{},{}", c.numer(), c.denom()).unwrap();
        }
    } else {
        let value = zhat_value(args.n, &ratios_f, args.m, args.l)?;
        writeln!(
            out,
            "{{\"n\":{},\"m\":{},\"L\":{},\"value\":{value}}}",
            args.n, args.m, args.l
        )
        .unwrap();
    }
    Ok(())
}

fn fit_kpz(args: &FitKpzArgs, out: &mut String) -> Result<(), Error> {
    let bounds = parse_floats(&args.window)?;
    if bounds.len() != 2 || !(bounds[0] > 0.0 && bounds[1] > bounds[0]) {
        return Err(Error::Domain(
            "window must be 'lo,hi' with 0 < lo < hi".into(),
        ));
    }
    if args.points < 2 {
        return Err(Error::Domain("need at least 2 fit points".into()));
    }
    let window = eps_window(bounds[0], bounds[1], args.points);
    let samples = if args.double_scaled {
        kpz_double_scaled_samples(args.n, args.c_scale, &window)?
    } else {
        let ratios = parse_floats(&args.ratios)?;
        if ratios.len() != args.n {
            return Err(Error::Domain(format!(
                "expected {} ratios, got {}",
                args.n,
                ratios.len()
            )));
        }
        kpz_fixed_ratio_samples(args.n, &ratios, &window)?
    };
    let fit = fit_line(&samples)?;
    match args.format {
        Format::Csv => {
            writeln!(out, "log_gap,log_value,fit_residual").unwrap();
            for (x, y) in &samples {
                writeln!(out, "{x},{y},{}", y - fit.slope * x - fit.intercept).unwrap();
            }
            writeln!(
                out,
                "# slope = {}, intercept = {}, rms_residual = {}",
                fit.slope, fit.intercept, fit.rms_residual
            )
            .unwrap();
        }
        Format::Json => {
            writeln!(
                out,
                "{{\"n\":{},\"double_scaled\":{},\"slope\":{},\"intercept\":{},\"rms_residual\":{}}}",
                args.n, args.double_scaled, fit.slope, fit.intercept, fit.rms_residual
            )
            .unwrap();
        }
    }
    Ok(())
}

fn parse_rational(text: &str) -> Result<Rational, Error> {
    let text = text.trim();
    if let Some((p, q)) = text.split_once('/') {
        let num = i64::from_str(p.trim())
            .map_err(|_| Error::Domain(format!("invalid rational '{text}'")))?;
        let den = i64::from_str(q.trim())
            .map_err(|_| Error::Domain(format!("invalid rational '{text}'")))?;
        if den == 0 {
            return Err(Error::Domain("zero denominator".into()));
        }
        Ok(Rational::new(num.into(), den.into()))
    } else {
        let num =
            i64::from_str(text).map_err(|_| Error::Domain(format!("invalid rational '{text}'")))?;
        Ok(Rational::from(num_bigint_int(num)))
    }
}

fn num_bigint_int(v: i64) -> num_bigint::BigInt {
    num_bigint::BigInt::from(v)
}

fn parse_rationals(text: &str) -> Result<Vec<Rational>, Error> {
    text.split(',').map(parse_rational).collect()
}

fn parse_floats(text: &str) -> Result<Vec<f64>, Error> {
    text.split(',')
        .map(|t| {
            f64::from_str(t.trim()).map_err(|_| Error::Domain(format!("invalid number '{t}'")))
        })
        .collect()
}
