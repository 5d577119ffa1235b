use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use e7sp6::jordan::JordanElement;
use e7sp6::lattice::{self, TABLE1_COLUMNS};
use e7sp6::qseries::{eigen_table, named_series, to_i64, EigenvalueTable};
use e7sp6::restriction::{restrict_eisenstein, restrict_ikeda, NamedIndex, Restriction, Route};
use e7sp6::solver::{self, CoefficientTable, SolveError, SolveResult};
use e7sp6::{coeff, Error};

const DEFAULT_PREC: usize = 20;

#[derive(Parser)]
#[command(name = "e7sp6", version, about = "Restriction of exceptional-domain modular forms to the degree-3 Siegel space")]
struct Cli {
    /// Worker threads for the enumeration kernels (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ShellKind {
    Full,
    Imaginary,
    Half,
}

#[derive(Clone, Copy, ValueEnum)]
enum Form {
    Ikeda,
    Eisenstein,
}

#[derive(Clone, Copy, ValueEnum)]
enum RouteArg {
    Closed,
    Enum,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Table1Route {
    Combine,
    Direct,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum RhsFrom {
    Computed,
    File,
}

#[derive(Subcommand)]
enum Cmd {
    /// Shell sizes of the integral octonions.
    Shells {
        #[arg(long, default_value_t = 6)]
        max: u64,
        #[arg(long, value_enum, default_value = "full")]
        kind: ShellKind,
    },
    /// Trace histogram of norm-(n1,n2,n3) imaginary triples.
    Triples {
        /// Comma separated norms, each at most 3.
        #[arg(long, value_parser = parse_norms)]
        norms: [u64; 3],
        /// Only report this trace value.
        #[arg(long, allow_hyphen_values = true)]
        t: Option<i64>,
    },
    /// Counts of the diag(2,2,2) fiber by (content, adjoint content, det).
    Table1 {
        #[arg(long, value_enum, default_value = "combine")]
        route: Table1Route,
    },
    /// Coefficients of a named q-series.
    Qseries {
        #[arg(long)]
        series: String,
        #[arg(long, env = "E7SP6_PREC")]
        prec: Option<usize>,
    },
    /// Fourier coefficient at one integral Jordan element.
    Coeff {
        #[arg(long, value_enum)]
        form: Form,
        #[arg(long)]
        weight: u32,
        /// JSON element, e.g. {"diag":[1,1,1],"x":[..8 doubled coords..]}.
        #[arg(long)]
        element: String,
    },
    /// Restriction coefficient at a named index.
    Restrict {
        #[arg(long, value_enum)]
        form: Form,
        #[arg(long)]
        weight: u32,
        #[arg(long)]
        index: String,
        #[arg(long, value_enum, default_value = "closed")]
        route: RouteArg,
    },
    /// Expansion of a restriction in a supplied basis.
    Solve {
        #[arg(long)]
        basis: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "computed")]
        rhs_from: RhsFrom,
        /// Right-hand side table when `--rhs-from file`.
        #[arg(long)]
        rhs: Option<PathBuf>,
        /// Form whose restriction is expanded when `--rhs-from computed`.
        #[arg(long, value_enum, default_value = "eisenstein")]
        form: Form,
        /// Defaults to the `# weight` line of the basis file.
        #[arg(long)]
        weight: Option<u32>,
    },
}

fn parse_norms(v: &str) -> Result<[u64; 3], String> {
    let n: Vec<u64> = v.split(',').map(|x| x.trim().parse::<u64>().map_err(|e| e.to_string())).collect::<Result<_, _>>()?;
    n.try_into().map_err(|_| "expected three comma separated norms".to_string())
}

fn s(x: &BigRational) -> Value {
    Value::String(x.to_string())
}

fn route(r: RouteArg) -> Route {
    match r {
        RouteArg::Closed => Route::Closed,
        RouteArg::Enum => Route::Enum,
        RouteArg::Both => Route::Both,
    }
}

fn ikeda_table(weight: u32, max: u64) -> Result<EigenvalueTable, Error> {
    if weight < 8 {
        return Err(coeff::CoeffError::InvalidWeight(weight, 20).into());
    }
    Ok(eigen_table(weight - 8, max.max(8))?)
}

fn restrict(form: Form, weight: u32, index: NamedIndex, r: Route) -> Result<Restriction, Error> {
    Ok(match form {
        Form::Ikeda => {
            let det = to_i64(&index.matrix().det()).unwrap_or(0).max(0) as u64;
            restrict_ikeda(index, weight, &ikeda_table(weight, det)?, r)?
        }
        Form::Eisenstein => restrict_eisenstein(index, weight, r)?,
    })
}

fn solve_json(r: &SolveResult, report: &solver::RankReport) -> Value {
    let coeffs: Vec<Value> = r
        .forms
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let mut v = json!({"label": f, "value": s(&r.coefficients[i])});
            if let Some(rad) = &r.radii {
                v["radius"] = s(&rad[i]);
            }
            v
        })
        .collect();
    json!({
        "rank": report.rank,
        "exact": r.is_exact(),
        "coefficients": coeffs,
        "pivot_columns": r.pivot_columns.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "check_columns": r.check_columns.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "residuals": r.residuals.iter().map(|(c, v)| json!({"index": c.to_string(), "value": s(v)})).collect::<Vec<_>>(),
    })
}

fn run(cmd: Cmd) -> Result<Value, Error> {
    Ok(match cmd {
        Cmd::Shells { max, kind } => {
            let rows: Vec<Value> = (1..=max)
                .map(|n| {
                    let c = match kind {
                        ShellKind::Full => lattice::count_full(n),
                        ShellKind::Imaginary => lattice::count_imaginary(n),
                        ShellKind::Half => lattice::count_half_shifted(n),
                    };
                    json!({"case": [n], "count": c.to_string()})
                })
                .collect();
            Value::Array(rows)
        }
        Cmd::Triples { norms, t } => {
            let [n1, n2, n3] = norms;
            let hist = lattice::triple_histogram(n1, n2, n3)?;
            let rows = hist
                .iter()
                .filter(|(k, _)| t.map_or(true, |t| **k == t))
                .map(|(k, c)| json!({"case": [n1, n2, n3, k], "count": c.to_string()}))
                .collect::<Vec<_>>();
            if rows.is_empty() {
                if let Some(t) = t {
                    return Ok(json!([{"case": [n1, n2, n3, t], "count": "0"}]));
                }
            }
            Value::Array(rows)
        }
        Cmd::Table1 { route } => {
            let table = match route {
                Table1Route::Combine => lattice::table_diag222(),
                Table1Route::Direct => lattice::table_diag222_direct(),
            };
            let rows = TABLE1_COLUMNS
                .iter()
                .map(|&(a, b, c)| {
                    let n = table.get(&(a, b, c)).cloned().unwrap_or_default();
                    json!({"case": [a, b, c], "count": n.to_string()})
                })
                .collect();
            Value::Array(rows)
        }
        Cmd::Qseries { series, prec } => {
            let p = named_series(&series, prec.unwrap_or(DEFAULT_PREC))?;
            json!({"series": series, "coefficients": p.coeffs().iter().map(s).collect::<Vec<_>>()})
        }
        Cmd::Coeff { form, weight, element } => {
            let t = JordanElement::from_json_str(&element)?;
            let (rank, value) = match form {
                Form::Ikeda => {
                    let det = to_i64(&t.det()).unwrap_or(0).max(0) as u64;
                    let v = coeff::ikeda_coeff(&t, weight, &ikeda_table(weight, det)?)?;
                    (None, BigRational::from_integer(v))
                }
                Form::Eisenstein => {
                    let e = coeff::eisenstein_coeff(&t, weight)?;
                    (Some(e.rank), e.normalized())
                }
            };
            let mut v = json!({"element": t.to_json(), "weight": weight, "value": s(&value)});
            if let Some(r) = rank {
                v["rank"] = json!(r);
            }
            v
        }
        Cmd::Restrict { form, weight, index, route: r } => {
            let index: NamedIndex = index.parse().map_err(e7sp6::restriction::RestrictionError::from)?;
            let res = restrict(form, weight, index, route(r))?;
            json!({"index": index.to_string(), "value": s(&res.value), "routes_agree": res.routes_agree()})
        }
        Cmd::Solve { basis, rhs_from, rhs, form, weight } => {
            let basis = basis.ok_or(SolveError::MissingFile("--basis"))?;
            let (table, report) = solver::ingest(&basis)?;
            if !report.is_full() {
                eprintln!("warning: {report}");
            }
            let rhs = match rhs_from {
                RhsFrom::File => {
                    let p = rhs.ok_or(SolveError::MissingFile("--rhs"))?;
                    CoefficientTable::read(p)?
                }
                RhsFrom::Computed => {
                    let w = weight.or(table.weight).ok_or_else(|| SolveError::Malformed { line: 1, msg: "weight unknown: pass --weight or add `# weight: k`".into() })?;
                    let mut vals = Vec::new();
                    for &c in &table.columns {
                        let route = if matches!((form, c), (Form::Eisenstein, NamedIndex::G | NamedIndex::H)) { Route::Enum } else { Route::Closed };
                        vals.push((c, restrict(form, w, c, route)?.value));
                    }
                    CoefficientTable::new("F", vals)
                }
            };
            let r = solver::solve_expansion(&table, &rhs)?;
            solve_json(&r, &report)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.cmd) {
        Ok(v) => {
            println!("{}", serde_json::to_string(&v).expect("json"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
