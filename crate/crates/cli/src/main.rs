//! `codrisk`: conditional distortion risk measures from the command line.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use codrisk::copula::{Copula, Dependence};
use codrisk::distortion::Distortion;
use codrisk::error::Error;
use codrisk::figures::{run_figure, FigureId, FigureOptions, FigureTable, DEFAULT_GRID};
use codrisk::marginal::Marginal;
use codrisk::oracle::{mc_cod, mc_cod_at, mc_delta_cod, mc_delta_cod_at};
use codrisk::orders::{check_order, StochasticOrder};
use codrisk::riskcore::{psi_convexity, psi_curve, BivariateModel, Engine};

use output::{Format, Table};

const EXIT_CHECK_FAILED: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_USAGE: u8 = 4;

/// Conditional distortion (CoD) risk measures, risk contributions, order and
/// dependence checks, and the data behind the numerical-example figures.
///
/// Marginals: normal:MU,SIGMA  gamma:SHAPE,RATE  weibull:SCALE,SHAPE  exp:RATE  uniform:LO,HI
/// Copulas: gumbel:THETA  fgm:ALPHA  indep  comono
/// Distortions: var:A  es:B  power:G  dualpower:K  wang:L  id  (prefix dual: for the dual)
/// Models: COPULA,MARGINAL_X,MARGINAL_Y, e.g. gumbel:2,normal:0,1,gamma:0.5,1
#[derive(Debug, Parser)]
#[command(name = "codrisk", version, verbatim_doc_comment)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format (default: csv for figures, json otherwise).
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Absolute quadrature tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Grid size for order, dependence and Psi checks, or points per figure axis.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Seed for the Monte Carlo oracle.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Distortion risk measure D_g[X].
    Dmeasure {
        #[arg(long)]
        g: Distortion,
        #[arg(long)]
        x: Marginal,
    },
    /// Threshold quantile u_g = F(D_g[X]).
    Threshold {
        #[arg(long)]
        g: Distortion,
        #[arg(long)]
        x: Marginal,
    },
    /// CoD_{g,h}[Y|X].
    Cod(CodArgs),
    /// Type-I contribution CoD_{g,h}[Y|X] - D_h[Y].
    Delta(CodArgs),
    /// Type-II contribution between the thresholds of g and g~.
    Delta2 {
        #[arg(long)]
        model: BivariateModel,
        #[arg(long)]
        g: Option<Distortion>,
        #[arg(long = "g-tilde")]
        g_tilde: Option<Distortion>,
        #[arg(long)]
        h: Distortion,
        /// Threshold quantile for g, overriding --g.
        #[arg(long)]
        u: Option<f64>,
        /// Threshold quantile for g~, overriding --g-tilde.
        #[arg(long = "u-tilde")]
        u_tilde: Option<f64>,
    },
    /// CoVaR, CoES and MES at levels alpha (for X) and beta (for Y).
    Classic {
        #[arg(long)]
        model: BivariateModel,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
    },
    /// Data and qualitative checks for one figure panel, or `all`.
    Figure {
        /// 1a 1b 1c 2a 2b 2c 2d 3a 3b 4 5a 5b 6a 6b 6c 6d 7a 7b, or all.
        id: String,
        /// Also write a gnuplot script that plots the CSV output.
        #[arg(long)]
        gnuplot: Option<PathBuf>,
    },
    /// Checks X <=_order Y on a grid.
    CheckOrder {
        #[arg(long)]
        x: Marginal,
        #[arg(long)]
        y: Marginal,
        /// st, hr, lr, icx, icv, disp or ew.
        #[arg(long)]
        order: StochasticOrder,
    },
    /// Checks a dependence notion of a copula on a grid.
    CheckDep {
        #[arg(long)]
        copula: Copula,
        /// PQD, NQD, RTI_V_in_U, ..., TP2, RR2, PDS, NDS, or all.
        #[arg(long)]
        notion: String,
    },
    /// Convexity of Psi(t) = hbar(A(hbar^-1(t))).
    Psi {
        #[arg(long)]
        copula: Copula,
        #[arg(long)]
        u: f64,
        #[arg(long)]
        h: Distortion,
        /// Emit the curve instead of the verdict.
        #[arg(long)]
        curve: bool,
    },
    /// Monte Carlo estimate of CoD (or its Type-I contribution) by rejection.
    Oracle {
        #[arg(long)]
        model: BivariateModel,
        #[arg(long)]
        g: Option<Distortion>,
        #[arg(long)]
        h: Distortion,
        /// Threshold quantile, overriding --g.
        #[arg(long)]
        u: Option<f64>,
        #[arg(long, default_value_t = 200_000)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        batches: usize,
        /// Estimate the Type-I contribution instead of CoD.
        #[arg(long)]
        delta: bool,
    },
}

#[derive(Debug, Args)]
struct CodArgs {
    #[arg(long)]
    model: BivariateModel,
    #[arg(long)]
    g: Option<Distortion>,
    #[arg(long)]
    h: Distortion,
    /// Threshold quantile, overriding --g.
    #[arg(long)]
    u: Option<f64>,
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

/// What a command produced and whether its checks passed.
struct Outcome {
    json: Value,
    table: Table,
    default_format: Format,
    passed: bool,
}

impl Outcome {
    fn record<T: Serialize>(value: &T) -> Outcome {
        let json = serde_json::to_value(value).expect("serializable");
        Outcome {
            table: Table::from_record(&json),
            json,
            default_format: Format::Json,
            passed: true,
        }
    }

    fn checked(mut self, passed: bool) -> Outcome {
        self.passed = passed;
        self
    }
}

fn threshold(
    e: &Engine,
    g: Option<&Distortion>,
    u: Option<f64>,
    x: &Marginal,
    flag: &str,
) -> Result<f64, Failure> {
    match (u, g) {
        (Some(u), _) => Ok(u),
        (None, Some(g)) => Ok(e.threshold_quantile(g, x)?),
        (None, None) => Err(Failure::Usage(format!(
            "one of --{flag} or --u is required"
        ))),
    }
}

fn figure_outcome(tables: Vec<FigureTable>) -> Outcome {
    let passed = tables.iter().all(FigureTable::all_checks_pass);
    let table = Table::figure_rows(&tables);
    let json = if tables.len() == 1 {
        serde_json::to_value(&tables[0])
    } else {
        serde_json::to_value(&tables)
    }
    .expect("serializable");
    Outcome {
        json,
        table,
        default_format: Format::Csv,
        passed,
    }
}

fn run(cli: Cli) -> Result<Outcome, Failure> {
    let g = &cli.global;
    let engine = match g.tol {
        Some(t) if t > 0.0 && t.is_finite() => Engine::with_tolerance(t),
        Some(t) => return Err(Failure::Usage(format!("--tol must be positive, got {t}"))),
        None => Engine::default(),
    };
    let grid = g.grid;
    Ok(match cli.command {
        Command::Dmeasure { g, x } => {
            let v = engine.distortion_measure(&g, &x)?;
            Outcome::record(&json!({ "g": g.to_string(), "x": x.to_string(), "value": v }))
        }
        Command::Threshold { g, x } => {
            let v = engine.threshold_quantile(&g, &x)?;
            Outcome::record(&json!({ "g": g.to_string(), "x": x.to_string(), "u_g": v }))
        }
        Command::Cod(a) => {
            let u = threshold(&engine, a.g.as_ref(), a.u, &a.model.marginal_x, "g")?;
            Outcome::record(&engine.cod_at(&a.model, u, &a.h)?)
        }
        Command::Delta(a) => {
            let u = threshold(&engine, a.g.as_ref(), a.u, &a.model.marginal_x, "g")?;
            Outcome::record(&engine.delta_cod_at(&a.model, u, &a.h)?)
        }
        Command::Delta2 {
            model,
            g,
            g_tilde,
            h,
            u,
            u_tilde,
        } => {
            let u = threshold(&engine, g.as_ref(), u, &model.marginal_x, "g")?;
            let ut = match (u_tilde, g_tilde) {
                (Some(v), _) => v,
                (None, Some(gt)) => engine.threshold_quantile(&gt, &model.marginal_x)?,
                (None, None) => {
                    return Err(Failure::Usage(
                        "one of --g-tilde or --u-tilde is required".into(),
                    ))
                }
            };
            Outcome::record(&engine.delta_cod_type2_at(&model, u, ut, &h)?)
        }
        Command::Classic { model, alpha, beta } => {
            Outcome::record(&engine.classic_measures(&model, alpha, beta)?)
        }
        Command::Figure { id, gnuplot } => {
            let ids: Vec<FigureId> = if id.eq_ignore_ascii_case("all") {
                FigureId::ALL.to_vec()
            } else {
                vec![id.parse()?]
            };
            let opts = FigureOptions {
                grid: grid.unwrap_or(DEFAULT_GRID),
                engine,
            };
            let mut tables = Vec::with_capacity(ids.len());
            for id in ids {
                let t = run_figure(id, &opts)?;
                for c in &t.checks {
                    eprintln!(
                        "figure {} check {:<50} {} margin {:e}",
                        t.id,
                        c.name,
                        if c.holds { "pass" } else { "FAIL" },
                        c.margin
                    );
                }
                tables.push(t);
            }
            if let Some(path) = gnuplot {
                let data = cli
                    .global
                    .out
                    .clone()
                    .unwrap_or_else(|| PathBuf::from("figure.csv"));
                std::fs::write(&path, output::gnuplot_script(&tables, &data))
                    .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
            }
            figure_outcome(tables)
        }
        Command::CheckOrder { x, y, order } => {
            let v = check_order(&x, &y, order, grid.unwrap_or(1000))?;
            let holds = v.holds;
            Outcome::record(&v).checked(holds)
        }
        Command::CheckDep { copula, notion } => {
            let n = grid.unwrap_or(50);
            if notion.eq_ignore_ascii_case("all") {
                let mut rows = Vec::new();
                for d in Dependence::ALL {
                    let v = copula.check_dependence(d, n)?;
                    rows.push(json!({ "notion": d.name(), "holds": v.holds, "margin": v.margin }));
                }
                let json = Value::Array(rows);
                Outcome {
                    table: Table::from_records(&json),
                    json,
                    default_format: Format::Json,
                    passed: true,
                }
            } else {
                let d: Dependence = notion.parse()?;
                let v = copula.check_dependence(d, n)?;
                let holds = v.holds;
                Outcome::record(&v).checked(holds)
            }
        }
        Command::Psi {
            copula,
            u,
            h,
            curve,
        } => {
            let n = grid.unwrap_or(400);
            if curve {
                let pts = psi_curve(&copula, u, &h, n)?;
                let json = Value::Array(
                    pts.iter()
                        .map(|(t, p)| json!({ "t": t, "psi": p }))
                        .collect(),
                );
                Outcome {
                    table: Table::from_records(&json),
                    json,
                    default_format: Format::Csv,
                    passed: true,
                }
            } else {
                let v = psi_convexity(&copula, u, &h, n)?;
                let holds = v.holds;
                Outcome::record(&v).checked(holds)
            }
        }
        Command::Oracle {
            model,
            g,
            h,
            u,
            n,
            batches,
            delta,
        } => {
            let seed = cli.global.seed;
            let est = match (u, g, delta) {
                (Some(u), _, false) => mc_cod_at(&model, u, &h, n, seed, batches)?,
                (Some(u), _, true) => mc_delta_cod_at(&model, u, &h, n, seed, batches)?,
                (None, Some(g), false) => mc_cod(&model, &g, &h, n, seed, batches)?,
                (None, Some(g), true) => mc_delta_cod(&model, &g, &h, n, seed, batches)?,
                (None, None, _) => {
                    return Err(Failure::Usage("one of --g or --u is required".into()))
                }
            };
            Outcome::record(&est)
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let out = cli.global.out.clone();
    let format = cli.global.format;
    let outcome = match run(cli) {
        Ok(o) => o,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical error: {msg}");
            return ExitCode::from(EXIT_NUMERICAL);
        }
    };
    let format = match format {
        Some(FormatArg::Csv) => Format::Csv,
        Some(FormatArg::Json) => Format::Json,
        None => outcome.default_format,
    };
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&outcome.json).expect("serializable") + "\n",
        Format::Csv => outcome.table.to_csv(),
    };
    if let Err(e) = output::emit(out.as_deref(), &text) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK_FAILED)
    }
}
