use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use qmk::discrepancy::{random_search_lower_bound, star_discrepancy_with, DiscrepancyResult, ExactOptions, PointSet};
use qmk::integrate::{integral_under_measure, kh_certificate_with, qmc_estimate_grid};
use qmk::schema::{GridDoc, MeasureDoc};
use qmk::sequences::{halton, van_der_corput};
use qmk::transforms::{
    chelson_identity_check, conditional_transform_2d, image_boundary, product_transform, ChelsonFixture,
};
use qmk::{Anchor, Error, GridFunction, MeasureSpec};

/// Discrepancy, variation and quasi-Monte Carlo integration for general measures on the unit cube.
#[derive(Parser, Serialize)]
#[command(name = "qmk", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Point set JSON: {"d": 2, "points": [[..], ..]}
    #[arg(long, global = true)]
    points: Option<PathBuf>,

    /// Measure JSON, tagged by "type": uniform, discrete, product or chelson
    #[arg(long, global = true)]
    measure: Option<PathBuf>,

    /// Grid function JSON: {"breakpoints": [[..], ..], "values": [..], "interp": "step"}
    #[arg(long = "f", global = true)]
    function: Option<PathBuf>,

    /// Numerical tolerance for comparisons and pruning
    #[arg(long, global = true, default_value_t = 1e-12)]
    tolerance: f64,

    /// Maximum number of cells the exact discrepancy engine may visit
    #[arg(long, global = true, default_value_t = 100_000_000)]
    budget: u64,

    /// Seed for every random choice
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Report path; stdout when absent
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum MethodArg {
    Exact,
    Search,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum Kind {
    Halton,
    VanDerCorput,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
enum Command {
    /// Star-discrepancy of --points with respect to --measure
    Discrepancy {
        #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
        method: MethodArg,
        /// Random boxes tried by the search method
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
    },
    /// Hardy–Krause and Vitali variation of --f
    Variation,
    /// Jordan and Leonov decompositions of --f and its measure round trip
    Decompose,
    /// Inverse-CDF transform of --points under --measure
    Transform,
    /// QMC estimate of the integral of --f under --measure at --points
    Integrate {
        /// Also compute the exact integral and the Koksma–Hlawka bound
        #[arg(long)]
        certify: bool,
    },
    /// Write a low-discrepancy point set
    Generate {
        #[arg(long, value_enum, default_value_t = Kind::Halton)]
        kind: Kind,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        d: usize,
        /// Base for the van der Corput sequence
        #[arg(long, default_value_t = 2)]
        base: u64,
    },
    /// Report showing that the conditional inverse transform does not preserve discrepancy
    Counterexample {
        /// Also write samples of the image-set and box boundaries here
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

enum Failure {
    Validation(String),
    Budget(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            other => Failure::Validation(other.to_string()),
        }
    }
}

type Outcome<T> = Result<T, Failure>;

fn required<'a>(path: &'a Option<PathBuf>, flag: &str) -> Outcome<&'a Path> {
    path.as_deref()
        .ok_or_else(|| Failure::Validation(format!("--{flag} is required for this subcommand")))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Outcome<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        // serde_json already appends "at line L column C"
        Failure::Validation(format!("{}: field `{}`: {}", path.display(), field, inner))
    })
}

fn load_points(cli: &Cli) -> Outcome<PointSet> {
    read_json(required(&cli.points, "points")?)
}

fn load_measure(cli: &Cli) -> Outcome<MeasureSpec> {
    let doc: MeasureDoc = read_json(required(&cli.measure, "measure")?)?;
    Ok(doc.into_spec()?)
}

fn load_function(cli: &Cli) -> Outcome<GridFunction> {
    let doc: GridDoc = read_json(required(&cli.function, "f")?)?;
    Ok(doc.into_function()?)
}

fn options(cli: &Cli) -> ExactOptions {
    ExactOptions {
        cell_budget: cli.budget as u128,
        ..ExactOptions::default()
    }
}

fn discrepancy_json(r: &DiscrepancyResult) -> Value {
    json!({
        "value": r.value,
        "witness": r.witness.upper,
        "witness_limits": r.limits,
        "attained": r.attained,
        "method": r.method,
    })
}

fn points_csv(ps: &PointSet) -> String {
    let mut out = String::new();
    for p in ps.points() {
        let row: Vec<String> = p.iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn json_only(cli: &Cli) -> Outcome<()> {
    if cli.format == Format::Csv {
        return Err(Failure::Validation("this subcommand only writes JSON".into()));
    }
    Ok(())
}

fn rational(label: &str, fraction: &str, exact: f64, computed: f64, tol: f64) -> Value {
    json!({
        "quantity": label,
        "rational": fraction,
        "exact": exact,
        "computed": computed,
        "matches": (exact - computed).abs() <= tol,
    })
}

enum Report {
    Json(Value),
    Text(String),
}

fn run(cli: &Cli) -> Outcome<Report> {
    if !(cli.tolerance > 0.0) {
        return Err(Failure::Validation("--tolerance must be positive".into()));
    }
    if cli.budget == 0 {
        return Err(Failure::Validation("--budget must be at least 1".into()));
    }
    let body = match &cli.command {
        Command::Discrepancy { method, trials } => {
            json_only(cli)?;
            let ps = load_points(cli)?;
            let m = load_measure(cli)?;
            let r = match method {
                MethodArg::Exact => star_discrepancy_with(&ps, &m, &options(cli))?,
                MethodArg::Search => random_search_lower_bound(&ps, &m, *trials, cli.seed)?,
            };
            discrepancy_json(&r)
        }
        Command::Variation => {
            json_only(cli)?;
            let f = load_function(cli)?;
            json!({
                "hk_one": f.hk_variation(Anchor::One),
                "hk_zero": f.hk_variation(Anchor::Zero),
                "vitali": f.vitali_variation(None),
            })
        }
        Command::Decompose => {
            json_only(cli)?;
            let f = load_function(cli)?;
            let jordan = f.jordan_decompose();
            let (f1, f2) = f.leonov_decompose();
            let measure = match f.to_measure() {
                Ok(nu) => {
                    let back = GridFunction::from_measure(&nu);
                    let mut max_error = 0.0_f64;
                    let mut off_grid = false;
                    for (idx, v) in f.values().iter().enumerate() {
                        let mut multi = vec![0; f.dim()];
                        let mut lin = idx;
                        for s in (0..f.dim()).rev() {
                            multi[s] = lin % f.shape()[s];
                            lin /= f.shape()[s];
                        }
                        match back.eval(&f.vertex(&multi)) {
                            Ok(w) => max_error = max_error.max((w - v).abs()),
                            Err(_) => off_grid = true,
                        }
                    }
                    json!({
                        "atoms": nu.atoms(),
                        "total_variation": nu.total_variation(),
                        "round_trip_max_error": max_error,
                        "round_trip_ok": !off_grid && max_error <= cli.tolerance * f.values().iter().fold(1.0_f64, |a, v| a.max(v.abs())),
                    })
                }
                Err(Error::NotStep) => Value::Null,
                Err(e) => return Err(e.into()),
            };
            json!({
                "f_origin": f.at_origin(),
                "jordan": {
                    "plus": GridDoc::from(&jordan.plus),
                    "minus": GridDoc::from(&jordan.minus),
                    "plus_completely_monotone": jordan.plus.is_completely_monotone(),
                    "minus_completely_monotone": jordan.minus.is_completely_monotone(),
                },
                "leonov": { "f1": GridDoc::from(&f1), "f2": GridDoc::from(&f2) },
                "hk_zero": f.hk_variation(Anchor::Zero),
                "measure": measure,
            })
        }
        Command::Transform => {
            let ps = load_points(cli)?;
            let m = load_measure(cli)?;
            let out = match &m {
                MeasureSpec::Analytic(a) if a.name() == "chelson" => {
                    let pts = ps
                        .iter()
                        .map(|x| conditional_transform_2d(x, &ChelsonFixture).map(|z| z.to_vec()))
                        .collect::<Result<Vec<_>, _>>()?;
                    PointSet::new(2, pts)?
                }
                _ => product_transform(&ps, &m)?,
            };
            if cli.format == Format::Csv {
                return Ok(Report::Text(points_csv(&out)));
            }
            json!({ "d": out.dim(), "points": out.points() })
        }
        Command::Integrate { certify } => {
            json_only(cli)?;
            let f = load_function(cli)?;
            let ps = load_points(cli)?;
            let m = load_measure(cli)?;
            if *certify {
                serde_json::to_value(kh_certificate_with(&f, &ps, &m, &options(cli))?).expect("certificate serializes")
            } else {
                let estimate = qmc_estimate_grid(&f, &ps)?;
                let reference = match integral_under_measure(&f, &m) {
                    Ok(v) => json!(v),
                    Err(Error::Unsupported(_)) => Value::Null,
                    Err(e) => return Err(e.into()),
                };
                json!({ "estimate": estimate, "reference_integral": reference })
            }
        }
        Command::Generate { kind, n, d, base } => {
            let ps = match kind {
                Kind::Halton => halton(*n, *d)?,
                Kind::VanDerCorput => {
                    if *d != 1 {
                        return Err(Failure::Validation("van der Corput points are one-dimensional".into()));
                    }
                    let pts = (1..=*n as u64)
                        .map(|i| van_der_corput(i, *base).map(|x| vec![x]))
                        .collect::<Result<Vec<_>, _>>()?;
                    PointSet::new(1, pts)?
                }
            };
            if cli.format == Format::Csv {
                return Ok(Report::Text(points_csv(&ps)));
            }
            json!({ "d": ps.dim(), "points": ps.points() })
        }
        Command::Counterexample { csv, samples } => {
            json_only(cli)?;
            counterexample(cli, csv.as_deref(), *samples)?
        }
    };
    let mut report = serde_json::Map::new();
    report.insert("config".into(), serde_json::to_value(cli).expect("config serializes"));
    match body {
        Value::Object(map) => report.extend(map),
        other => {
            report.insert("result".into(), other);
        }
    }
    Ok(Report::Json(Value::Object(report)))
}

fn counterexample(cli: &Cli, csv: Option<&Path>, samples: usize) -> Outcome<Value> {
    let tol = 1e-12_f64.max(cli.tolerance);
    let x = [56.0 / 81.0, 20.0 / 23.0];
    let a = [1.0, 0.8];
    let ps = PointSet::new(2, vec![x.to_vec()])?;
    let m = ChelsonFixture.measure();
    let report = chelson_identity_check(&ps, &ChelsonFixture, &m, &a)?;
    let z = report.images[0];
    let f_at_witness = m.cdf_eval(&[1.0, 20.0 / 27.0])?;
    let checks = vec![
        rational("z_1 = G_1^{-1}(x_1)", "7/9", 7.0 / 9.0, z[0], tol),
        rational("z_2 = G_2^{-1}(x_2 | z_1)", "20/27", 20.0 / 27.0, z[1], tol),
        rational("mu([0,(1,20/27)])", "610/729", 610.0 / 729.0, f_at_witness, tol),
        rational("D*({z}; mu)", "610/729", 610.0 / 729.0, report.transformed.value, tol),
        rational("D*({x}; lambda)", "20/23", 20.0 / 23.0, report.uniform.value, tol),
        rational("mu([0,(1,8/10)])", "22/25", 22.0 / 25.0, report.probe.measure_of_box, tol),
        rational("G~(1,8/10)_1", "1", 1.0, report.probe.tilde_a[0], tol),
        rational("G~(1,8/10)_2", "8/10", 0.8, report.probe.tilde_a[1], tol),
        rational("lambda([0,G~(1,8/10)])", "8/10", 0.8, report.probe.lebesgue_of_tilde_box, tol),
    ];
    let mut csv_path = Value::Null;
    if let Some(path) = csv {
        let mut text = String::from("set,x1,x2\n");
        for p in image_boundary(&ChelsonFixture, &a, samples)? {
            text.push_str(&format!("{},{:?},{:?}\n", p.set, p.x1, p.x2));
        }
        fs::write(path, text).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))?;
        csv_path = json!(path.display().to_string());
    }
    Ok(json!({
        "point": x,
        "image": z,
        "transformed_discrepancy": discrepancy_json(&report.transformed),
        "uniform_discrepancy": discrepancy_json(&report.uniform),
        "difference": report.difference,
        "identity_holds": report.identity_holds,
        "probe": report.probe,
        "checks": checks,
        "boundary_csv": csv_path,
    }))
}

fn configure_threads() {
    if let Some(n) = std::env::var("QMK_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(3);
        }
    };
    let mut text = match report {
        Report::Json(v) => serde_json::to_string_pretty(&v).expect("report serializes"),
        Report::Text(t) => t,
    };
    if !text.ends_with('\n') {
        text.push('\n');
    }
    let written = match &cli.out {
        Some(path) => fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}
