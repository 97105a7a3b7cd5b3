use std::collections::HashMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use metab_kzb::assoc::{a_inf_closed, b_inf_closed};
use metab_kzb::kzbmetab::{main_theorem, Side};
use metab_kzb::modular::{eichler_csv, eichler_table};
use metab_kzb::numeric::parse_tau;
use metab_kzb::periods::{corollary56_check, period_poly_direct};
use metab_kzb::symring::{eichler_symbols, eval_numeric};
use metab_kzb::verify::{run, VerifyOptions};
use metab_kzb::{modular, EichlerIndex, Error, MetabElem, NumContext};

const PRECISION_ENV: &str = "METAB_KZB_PRECISION";

#[derive(Parser, Debug)]
#[command(name = "metab-kzb", version, about = "Meta-abelian elliptic KZB associator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write output to a file instead of stdout.
    #[arg(long, short = 'o', global = true)]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
    Latex,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SeriesSide {
    #[value(name = "Ainf")]
    Ainf,
    #[value(name = "Binf")]
    Binf,
    #[value(name = "Atau")]
    Atau,
    #[value(name = "Btau")]
    Btau,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Table {
    Eichler,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print a meta-abelian series up to weight N.
    Series {
        side: SeriesSide,
        #[arg(short = 'N', long = "trunc", default_value_t = 12)]
        trunc: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Replace symbols by complex numbers at --tau.
        #[arg(long)]
        numeric: bool,
        #[arg(long, allow_hyphen_values = true)]
        tau: Option<String>,
        #[arg(long, default_value_t = NumContext::DEFAULT_Q_CUTOFF)]
        q_cutoff: usize,
    },
    /// Run the identity suite; exits 1 if any identity fails.
    Verify {
        #[arg(short = 'N', long = "trunc", default_value_t = 12)]
        trunc: usize,
        /// Also run the numeric checks at this point.
        #[arg(long, allow_hyphen_values = true)]
        tau: Option<String>,
        #[arg(long, default_value_t = NumContext::DEFAULT_Q_CUTOFF)]
        q_cutoff: usize,
        #[arg(long, default_value_t = NumContext::DEFAULT_TOL)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long, hide = true)]
        inject_fault: Option<String>,
    },
    /// Tabulate Eichler integrals I_n(G_2k; tau).
    Eval {
        /// Evaluation point "re,im"; repeat for a grid.
        #[arg(long, required = true, allow_hyphen_values = true)]
        tau: Vec<String>,
        #[arg(long, value_enum, default_value_t = Table::Eichler)]
        table: Table,
        /// Largest n.
        #[arg(short = 'n', default_value_t = 4)]
        max_n: u32,
        /// Largest weight 2k.
        #[arg(short = 'k', default_value_t = 12)]
        max_weight: u32,
        #[arg(long, default_value_t = NumContext::DEFAULT_Q_CUTOFF)]
        q_cutoff: usize,
        #[arg(long, default_value_t = NumContext::DEFAULT_TOL)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Print the extended period polynomial of G_2k.
    Periods {
        #[arg(long)]
        weight: u32,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Compare g(tau)(a) with special values of elliptic polylogarithms.
    Polylog {
        #[arg(long, allow_hyphen_values = true)]
        tau: String,
        #[arg(long, default_value_t = 10)]
        degree: i32,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = NumContext::DEFAULT_Q_CUTOFF)]
        q_cutoff: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

enum Failure {
    Input(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn precision() -> Result<u32, Failure> {
    match std::env::var(PRECISION_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| Failure::Input(format!("{PRECISION_ENV} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(NumContext::DEFAULT_PRECISION),
    }
}

fn context(tau: Complex64, q_cutoff: usize, tol: f64) -> Result<NumContext, Failure> {
    Ok(NumContext::new(tau, q_cutoff, precision()?, tol)?)
}

fn unsupported(format: Format, what: &str) -> Failure {
    Failure::Input(format!("format {format:?} is not available for {what}"))
}

fn eval_elem(m: &MetabElem, ctx: &NumContext) -> Result<serde_json::Value, Failure> {
    let mut symbols: Vec<EichlerIndex> = eichler_symbols(&m.alpha);
    symbols.extend(eichler_symbols(&m.beta));
    for (_, _, c) in m.depth1.terms() {
        symbols.extend(eichler_symbols(c));
    }
    let values: HashMap<EichlerIndex, Complex64> = modular::eichler_values(symbols, ctx)?;
    let num = |c| -> Result<serde_json::Value, Failure> {
        let z = eval_numeric(c, ctx, &values)?;
        Ok(serde_json::json!([z.re, z.im]))
    };
    let mut depth1 = Vec::new();
    for (u, v, c) in m.depth1.terms() {
        depth1.push(serde_json::json!({ "u": u, "v": v, "c": num(c)? }));
    }
    Ok(serde_json::json!({
        "trunc": m.trunc_weight(),
        "tau": [ctx.tau.re, ctx.tau.im],
        "alpha": num(&m.alpha)?,
        "beta": num(&m.beta)?,
        "depth1": depth1,
    }))
}

fn numeric_text(v: &serde_json::Value) -> String {
    let c = |x: &serde_json::Value| format!("({:.15e}{:+.15e}i)", x[0].as_f64().unwrap_or(f64::NAN), x[1].as_f64().unwrap_or(f64::NAN));
    let mut out = format!("{}*a + {}*b", c(&v["alpha"]), c(&v["beta"]));
    for t in v["depth1"].as_array().into_iter().flatten() {
        out.push_str(&format!(" + {}*Ū^{}*V^{}", c(&t["c"]), t["u"], t["v"]));
    }
    out
}

fn cmd_series(
    side: SeriesSide,
    trunc: usize,
    format: Format,
    numeric: bool,
    tau: Option<String>,
    q_cutoff: usize,
) -> Result<String, Failure> {
    let elem = match side {
        SeriesSide::Ainf => a_inf_closed(trunc)?,
        SeriesSide::Binf => b_inf_closed(trunc)?,
        SeriesSide::Atau => main_theorem(Side::A, trunc)?,
        SeriesSide::Btau => main_theorem(Side::B, trunc)?,
    };
    if numeric {
        let tau = tau.ok_or_else(|| Failure::Input("--numeric requires --tau".into()))?;
        let ctx = context(parse_tau(&tau)?, q_cutoff, NumContext::DEFAULT_TOL)?;
        let v = eval_elem(&elem, &ctx)?;
        return match format {
            Format::Json => Ok(v.to_string()),
            Format::Text => Ok(numeric_text(&v)),
            f => Err(unsupported(f, "numeric series")),
        };
    }
    match format {
        Format::Text => Ok(elem.to_string()),
        Format::Json => Ok(elem.to_json()),
        Format::Latex => Ok(elem.to_latex()),
        Format::Csv => Err(unsupported(format, "series")),
    }
}

fn cmd_verify(
    trunc: usize,
    tau: Option<String>,
    q_cutoff: usize,
    tol: f64,
    format: Format,
    inject_fault: Option<String>,
) -> Result<String, Failure> {
    let tau = tau.as_deref().map(parse_tau).transpose()?;
    if let Some(f) = inject_fault.as_deref() {
        if f != "main_theorem" {
            return Err(Failure::Input(format!("unknown fault {f:?}")));
        }
    }
    let opts = VerifyOptions { trunc, tau, q_cutoff, tol, precision: precision()?, inject_fault };
    let report = run(&opts)?;
    let rendered = match format {
        Format::Json => report.to_json(),
        Format::Text => report
            .identities
            .iter()
            .chain(&report.numeric)
            .map(|r| {
                let status = serde_json::to_value(r.status).unwrap();
                let mut line = format!("{:<40} {}", r.identity, status.as_str().unwrap_or(""));
                if let Some(m) = &r.first_discrepant_monomial {
                    line.push_str(&format!("  first discrepancy {m}"));
                }
                if let Some(d) = &r.detail {
                    line.push_str(&format!("  {d}"));
                }
                line
            })
            .collect::<Vec<_>>()
            .join("\n"),
        f => return Err(unsupported(f, "verify")),
    };
    if report.all_passed() {
        Ok(rendered)
    } else {
        Err(Failure::Verification(rendered))
    }
}

fn cmd_eval(taus: &[String], max_n: u32, max_weight: u32, q_cutoff: usize, tol: f64, format: Format) -> Result<String, Failure> {
    if max_weight < 2 || !max_weight.is_multiple_of(2) {
        return Err(Failure::Input(format!("-k must be an even weight >= 2, got {max_weight}")));
    }
    let points = taus.iter().map(|t| parse_tau(t)).collect::<Result<Vec<_>, _>>()?;
    precision()?;
    let rows = eichler_table(&points, max_n, max_weight, q_cutoff, tol)?;
    match format {
        Format::Csv => Ok(eichler_csv(&rows, points.len() > 1).trim_end().to_string()),
        Format::Json => {
            let v: Vec<_> = rows
                .iter()
                .map(|r| serde_json::json!({ "tau": [r.tau.re, r.tau.im], "n": r.n, "2k": r.weight, "value": [r.value.re, r.value.im] }))
                .collect();
            Ok(serde_json::Value::Array(v).to_string())
        }
        f => Err(unsupported(f, "eval")),
    }
}

fn cmd_periods(weight: u32, format: Format) -> Result<String, Failure> {
    let r = period_poly_direct(weight)?;
    match format {
        Format::Text => Ok(r.to_text()),
        Format::Json => Ok(r.to_json()),
        Format::Latex => Ok(r.to_latex()),
        Format::Csv => Err(unsupported(format, "periods")),
    }
}

fn cmd_polylog(tau: &str, degree: i32, tol: f64, q_cutoff: usize, format: Format) -> Result<String, Failure> {
    let ctx = context(parse_tau(tau)?, q_cutoff, NumContext::DEFAULT_TOL)?;
    let samples = [
        (Complex64::new(0.3, 0.0), Complex64::new(0.2, 0.0)),
        (Complex64::new(0.1, 0.0), Complex64::new(-0.4, 0.0)),
        (Complex64::new(0.25, 0.0), Complex64::new(0.15, 0.0)),
    ];
    let report = corollary56_check(&ctx, degree, &samples, tol)?;
    let rendered = match format {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serialization is infallible"),
        Format::Text => format!(
            "{} max error {:.3e} at tolerance {:.1e} (degree {}, {} samples)",
            if report.pass { "pass" } else { "fail" },
            report.max_abs_err,
            report.tolerance,
            report.degree,
            report.samples.len()
        ),
        f => return Err(unsupported(f, "polylog")),
    };
    if report.pass {
        Ok(rendered)
    } else {
        Err(Failure::Verification(rendered))
    }
}

fn emit(text: &str, output: &Option<PathBuf>) -> Result<(), Failure> {
    match output {
        Some(path) => fs::write(path, format!("{text}\n")).map_err(|e| Failure::Input(format!("{}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Series { side, trunc, format, numeric, tau, q_cutoff } => cmd_series(side, trunc, format, numeric, tau, q_cutoff),
        Command::Verify { trunc, tau, q_cutoff, tol, format, inject_fault } => {
            cmd_verify(trunc, tau, q_cutoff, tol, format, inject_fault)
        }
        Command::Eval { tau, table: Table::Eichler, max_n, max_weight, q_cutoff, tol, format } => {
            cmd_eval(&tau, max_n, max_weight, q_cutoff, tol, format)
        }
        Command::Periods { weight, format } => cmd_periods(weight, format),
        Command::Polylog { tau, degree, tol, q_cutoff, format } => cmd_polylog(&tau, degree, tol, q_cutoff, format),
    };
    match result.and_then(|text| emit(&text, &cli.output)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(text)) => {
            let _ = emit(&text, &cli.output);
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
