mod instance;
mod report;
mod suite;
mod table1;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hdrflow::algebra::Field;
use hdrflow::cartier::{compare_routes, inv_cartier_par, inv_cartier_triv, CartierOutput, GluedConn, Route};
use hdrflow::connections::{p_curvature, residue, validate_log, HiggsField};
use hdrflow::flow::{interpolate_selfmap, orbit, periodic_scan, selfmap_step, ScanMode, TwistMode};
use hdrflow::oracle::torsion_periodicity_check;
use hdrflow::parabolic::{MarkedLine, ParLine};
use hdrflow::Error;
use num_rational::Rational64;
use serde_json::{json, Value};

use instance::InstanceSpec;
use report::{csv_string, json_string, mat_strings, Provenance};

#[derive(Parser)]
#[command(name = "hdrflow", version, about = "Parabolic inverse Cartier transforms and Higgs-de Rham flows over finite fields")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum RouteArg {
    Direct,
    Cover,
}

#[derive(Clone, Copy, ValueEnum)]
enum TwistArg {
    Strict,
    Twisted,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScanModeArg {
    Enumerate,
    PolySolve,
}

#[derive(Args)]
struct Output {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Inverse Cartier transform of the Higgs field in an instance file.
    Cartier {
        instance: PathBuf,
        #[arg(long, value_enum)]
        route: Option<RouteArg>,
        /// Move coefficients back along sigma (trivial weights only).
        #[arg(long)]
        transport: bool,
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        output: Output,
    },
    /// One step of the flow.
    Selfmap {
        instance: PathBuf,
        #[arg(long, value_enum)]
        twist_mode: Option<TwistArg>,
        #[command(flatten)]
        output: Output,
    },
    /// Iterate the flow until the orbit closes.
    Orbit {
        instance: PathBuf,
        #[arg(long, default_value_t = 100)]
        max_iter: usize,
        #[arg(long, value_enum)]
        twist_mode: Option<TwistArg>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[command(flatten)]
        output: Output,
    },
    /// Periodic points of a component over an extension.
    Scan {
        instance: PathBuf,
        #[arg(long, default_value_t = 1)]
        ext: u32,
        #[arg(long, value_enum, default_value = "enumerate")]
        mode: ScanModeArg,
        /// Keep points whose period divides k.
        #[arg(long)]
        k: Option<u32>,
        #[arg(long, value_enum)]
        twist_mode: Option<TwistArg>,
        /// Also interpolate the map as a rational function.
        #[arg(long)]
        interpolate: bool,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[command(flatten)]
        output: Output,
    },
    /// Elliptic curve oracles.
    Oracle {
        #[command(subcommand)]
        cmd: OracleCmd,
    },
    /// Reference table of hypergeometric fibrations.
    Table1 {
        #[command(subcommand)]
        cmd: Table1Cmd,
    },
    /// Randomized invariant suite.
    Check {
        #[arg(long, default_value = "all", value_parser = clap::builder::PossibleValuesParser::new(suite::SUITES))]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Periodicity of torsion x-coordinates on the Legendre curve.
    TorsionCheck {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        lambda: String,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[arg(long, default_value_t = 1)]
        ext: u32,
        #[arg(long, default_value_t = 200)]
        budget: usize,
        /// Number of non-torsion comparison points.
        #[arg(long, default_value_t = 0)]
        complement: usize,
        #[arg(long, value_enum)]
        twist_mode: Option<TwistArg>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Subcommand)]
enum Table1Cmd {
    List {
        #[arg(long = "N")]
        n: Option<u32>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Lib(Error),
    Failed(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) => 5,
            CliError::Lib(e) => match e {
                Error::OutOfTheory(_) => 3,
                Error::Indeterminacy(_) => 4,
                Error::Verification(_) | Error::RouteDisagreement(_) | Error::SplittingInconsistent(_) => 5,
                Error::InterpolationBound { .. } => 5,
                _ => 2,
            },
        }
    }

    fn kind(&self) -> String {
        match self {
            CliError::Usage(_) => "usage".into(),
            CliError::Failed(_) => "check_failed".into(),
            CliError::Lib(e) => format!("{e:?}").split(['(', ' ', '{']).next().unwrap_or("error").to_string(),
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) | CliError::Failed(m) => m.clone(),
            CliError::Lib(e) => e.to_string(),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn rat(r: Rational64) -> String {
    r.to_string()
}

fn twist(arg: Option<TwistArg>, spec: TwistMode) -> TwistMode {
    match arg {
        Some(TwistArg::Strict) => TwistMode::Strict,
        Some(TwistArg::Twisted) => TwistMode::Twisted,
        None => spec,
    }
}

fn load(path: &PathBuf) -> CliResult<InstanceSpec> {
    let src = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&src).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn emit(output: &Output, s: &str) -> CliResult<()> {
    match &output.out {
        Some(p) => fs::write(p, s).map_err(|e| CliError::Usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{s}");
            Ok(())
        }
    }
}

fn line_json(line: &MarkedLine) -> Value {
    let k = line.field();
    json!({
        "points": line.points().iter().map(|p| p.format(k)).collect::<Vec<_>>(),
        "N": line.n(),
        "weight_point": line.points()[line.weight_point()].format(k),
    })
}

fn parline_json(l: &ParLine, k: &Field) -> Value {
    json!({
        "deg": l.deg,
        "weights": l.weights.iter().map(|(p, w)| (p.format(k), Value::String(rat(*w)))).collect::<serde_json::Map<_, _>>(),
    })
}

fn conn_json(out: &CartierOutput) -> CliResult<Value> {
    let c = &out.conn;
    let k = c.line.field();
    let mut residues = Vec::new();
    for &pt in c.line.points() {
        let r = residue(c, pt)?;
        residues.push(json!({
            "point": pt.format(k),
            "matrix": r.matrix.iter().map(|row| row.iter().map(|&a| k.format(a)).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "eigenvalues": r.eigenvalues.iter().map(|&a| k.format(a)).collect::<Vec<_>>(),
        }));
    }
    Ok(json!({
        "line": line_json(&c.line),
        "summands": c.base.summands.iter().map(|l| parline_json(l, k)).collect::<Vec<_>>(),
        "degrees": out.degrees().into_iter().map(rat).collect::<Vec<_>>(),
        "connection_matrix": mat_strings(&c.a),
        "frame": mat_strings(&out.frame),
        "transported": out.transported,
        "residues": residues,
    }))
}

fn has_weights(h: &HiggsField) -> bool {
    h.base.summands.iter().any(|l| !l.weights.is_empty())
}

fn verify_cartier(h: &HiggsField, out: &CartierOutput) -> CliResult<Value> {
    let diag = validate_log(&out.conn);
    let psi = p_curvature(&out.conn)?;
    let p_curv = psi == out.expected_p_curvature()?;
    let k = h.line.field();
    let pr = Rational64::from_integer(k.p() as i64);
    let degrees = h.real_degrees().iter().map(|d| d * pr).collect();
    let glued = GluedConn::build(h, degrees, h.line.n())?;
    let cocycle = glued.check_cocycle().is_ok();
    let compat = glued.check_compatibility().is_ok();
    let routes = if has_weights(h) {
        match compare_routes(h) {
            Ok(_) => json!(true),
            Err(Error::FieldTooSmall(m)) => json!({"unavailable": m}),
            Err(e) => return Err(e.into()),
        }
    } else {
        Value::Null
    };
    let ok = diag.is_valid() && p_curv && cocycle && compat;
    let v = json!({
        "log_valid": diag.is_valid(),
        "violations": diag.violations,
        "p_curvature": p_curv,
        "cocycle": cocycle,
        "compatibility": compat,
        "routes_agree": routes,
    });
    if !ok {
        return Err(CliError::Lib(Error::Verification(v.to_string())));
    }
    Ok(v)
}

fn cmd_cartier(path: &PathBuf, route: Option<RouteArg>, transport: bool, verify: bool, output: &Output) -> CliResult<()> {
    let spec = load(path)?;
    let k = spec.field()?;
    let h = spec.higgs(&k)?;
    let route = match route {
        Some(RouteArg::Direct) => Route::Direct,
        Some(RouteArg::Cover) => Route::Cover,
        None => spec.route,
    };
    let out = if has_weights(&h) {
        if transport {
            return Err(CliError::Usage("--transport applies to trivial weights only".into()));
        }
        inv_cartier_par(&h, route)?
    } else {
        inv_cartier_triv(&h, transport)?
    };
    let mut v = json!({
        "provenance": Provenance::new(&k, None),
        "route": if has_weights(&h) { serde_json::to_value(route).unwrap() } else { json!("trivial") },
        "output": conn_json(&out)?,
    });
    if verify || spec.verify {
        v["verification"] = verify_cartier(&h, &out)?;
    }
    emit(output, &json_string(&v))
}

fn cmd_selfmap(path: &PathBuf, mode: Option<TwistArg>, output: &Output) -> CliResult<()> {
    let spec = load(path)?;
    let k = spec.field()?;
    let mode = twist(mode, spec.twist_mode);
    let pt = spec.moduli_point(&k)?;
    let step = selfmap_step(&pt, mode)?;
    let v = json!({
        "provenance": Provenance::new(&k, Some(mode)),
        "input": {"component": [pt.n(), pt.d], "point": pt.format()},
        "image": {
            "component": [step.image.n(), step.image.d],
            "point": step.image.format(),
            "line": line_json(&step.image.line),
            "theta": step.image.coeffs.iter().map(|&c| k.format(c)).collect::<Vec<_>>(),
        },
        "de_rham_degrees": [rat(step.de_rham_degrees.0), rat(step.de_rham_degrees.1)],
        "weights": [rat(step.weights.0), rat(step.weights.1)],
        "predicted_weights": [rat(step.predicted.0), rat(step.predicted.1)],
        "checks": step.checks,
    });
    if !step.checks.all() {
        emit(output, &json_string(&v))?;
        return Err(CliError::Lib(Error::Verification(format!("{:?}", step.checks))));
    }
    emit(output, &json_string(&v))
}

fn cmd_orbit(path: &PathBuf, max_iter: usize, mode: Option<TwistArg>, format: Format, output: &Output) -> CliResult<()> {
    let spec = load(path)?;
    let k = spec.field()?;
    let mode = twist(mode, spec.twist_mode);
    let pt = spec.moduli_point(&k)?;
    let rec = orbit(&pt, max_iter, mode)?;
    let prov = Provenance::new(&k, Some(mode));
    let s = match format {
        Format::Json => json_string(&json!({
            "provenance": prov,
            "start": pt.format(),
            "preperiod": rec.preperiod,
            "period": rec.period,
            "steps": rec.steps.iter().map(|s| json!({
                "point": s.point,
                "component": [s.component.0, s.component.1],
                "de_rham_degrees": [rat(s.de_rham_degrees.0), rat(s.de_rham_degrees.1)],
                "weights": [rat(s.weights.0), rat(s.weights.1)],
                "checks": s.checks,
                "digest": s.digest,
            })).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let extra = vec![format!(
                "# preperiod={} period={}",
                rec.preperiod.map_or("none".into(), |x| x.to_string()),
                rec.period.map_or("none".into(), |x| x.to_string())
            )];
            let rows: Vec<Vec<String>> = rec
                .steps
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    vec![
                        i.to_string(),
                        s.point.clone(),
                        format!("({},{})", s.component.0, s.component.1),
                        rat(s.de_rham_degrees.0),
                        rat(s.de_rham_degrees.1),
                        rat(s.weights.0),
                        rat(s.weights.1),
                        s.digest.clone(),
                    ]
                })
                .collect();
            csv_string(&prov, &extra, &["step", "point", "component", "deg_1", "deg_2", "weight_1", "weight_2", "digest"], &rows)
        }
    };
    emit(output, &s)
}

#[allow(clippy::too_many_arguments)]
fn cmd_scan(
    path: &PathBuf,
    ext: u32,
    mode: ScanModeArg,
    kk: Option<u32>,
    tm: Option<TwistArg>,
    interpolate: bool,
    format: Format,
    output: &Output,
) -> CliResult<()> {
    let spec = load(path)?;
    let k = spec.field()?;
    let line = spec.line(&k)?;
    let tm = twist(tm, spec.twist_mode);
    let mode = match mode {
        ScanModeArg::Enumerate => ScanMode::Enumerate,
        ScanModeArg::PolySolve => ScanMode::PolySolve,
    };
    let rep = periodic_scan(&line, spec.d, ext, mode, kk, tm)?;
    let map = if interpolate { Some(interpolate_selfmap(&line, spec.d, spec.seed)?) } else { rep.map.clone() };
    let prov = Provenance::new(&k, Some(tm));
    let scan_modulus = if k.s() == ext { k.modulus_string() } else { Field::new(k.p(), ext, k.seed())?.modulus_string() };
    let s = match format {
        Format::Json => json_string(&json!({
            "provenance": prov,
            "scan_modulus": scan_modulus,
            "mode": rep.mode,
            "component": [rep.component.0, rep.component.1],
            "ext_degree": rep.ext_degree,
            "k": rep.k,
            "examined": rep.examined,
            "indeterminate": rep.indeterminate,
            "leaving": rep.leaving,
            "image_size": rep.image_size,
            "periodic": rep.rows.len(),
            "rows": rep.rows,
            "map": map.as_ref().map(|m| json!({
                "source": [m.source.0, m.source.1],
                "target": [m.target.0, m.target.1],
                "phi": m.phi.to_string(),
                "degree": m.degree,
                "bound": m.bound,
                "samples": m.samples,
                "field": {"p": m.field.p(), "s": m.field.s(), "modulus": m.field.modulus_string()},
            })),
        })),
        Format::Csv => {
            let mut extra = vec![format!(
                "# component=({},{}) ext={} scan_modulus={} examined={} indeterminate={} leaving={} image_size={}",
                rep.component.0, rep.component.1, rep.ext_degree, scan_modulus, rep.examined, rep.indeterminate, rep.leaving, rep.image_size
            )];
            if let Some(m) = &map {
                extra.push(format!("# map target=({},{}) degree={} phi={}", m.target.0, m.target.1, m.degree, m.phi));
            }
            let rows: Vec<Vec<String>> =
                rep.rows.iter().map(|r| vec![r.point.clone(), r.field_degree.to_string(), r.period.to_string()]).collect();
            csv_string(&prov, &extra, &["point", "field_degree", "period"], &rows)
        }
    };
    emit(output, &s)
}

fn cmd_oracle(cmd: &OracleCmd) -> CliResult<()> {
    let OracleCmd::TorsionCheck { p, lambda, n_max, ext, budget, complement, twist_mode, format, output } = cmd;
    let k = Field::prime(*p)?;
    let lam = k.parse(lambda)?;
    let line = MarkedLine::legendre(&k, lam, 2)?.normalized();
    let mode = twist(*twist_mode, TwistMode::Twisted);
    let rep = torsion_periodicity_check(&line, *n_max, *ext, *budget, *complement, mode)?;
    let prov = Provenance::new(&k, Some(mode));
    let s = match format {
        Format::Json => json_string(&json!({
            "provenance": prov,
            "report": rep,
            "all_torsion_periodic": rep.all_torsion_periodic(),
        })),
        Format::Csv => {
            let tag = if rep.supersingular { "supersingular" } else { "ordinary" };
            let extra = vec![
                format!("# lambda={} ext={} n_max={} budget={} curve={}", rep.lambda, rep.e, n_max, budget, tag),
                format!("# all_torsion_periodic={}", rep.all_torsion_periodic()),
            ];
            let opt = |x: Option<usize>| x.map_or(String::new(), |v| v.to_string());
            let mut rows = Vec::new();
            for (set, rs) in [("torsion", &rep.torsion), ("complement", &rep.complement)] {
                for r in rs.iter() {
                    rows.push(vec![
                        r.z.clone(),
                        r.order.map_or(String::new(), |v| v.to_string()),
                        opt(r.period),
                        opt(r.preperiod),
                        if r.notes.is_empty() { set.to_string() } else { format!("{set}; {}", r.notes) },
                    ]);
                }
            }
            csv_string(&prov, &extra, &["z", "order", "period", "preperiod", "notes"], &rows)
        }
    };
    emit(output, &s)
}

fn cmd_table1(cmd: &Table1Cmd) -> CliResult<()> {
    let Table1Cmd::List { n, format, output } = cmd;
    let rows = table1::rows(*n);
    let s = match format {
        Format::Json => json_string(&json!({
            "parameters": table1::PARAMETERS.iter().map(|(a, b)| json!({"name": a, "definition": b})).collect::<Vec<_>>(),
            "rows": rows,
        })),
        Format::Csv => {
            let mut out = Vec::new();
            {
                let mut w = csv::Writer::from_writer(&mut out);
                w.write_record(["N", "weights", "fiber_combination", "fiber_0", "fiber_1", "fiber_lambda", "fiber_inf", "singular_locus", "j_invariant"])
                    .map_err(|e| CliError::Usage(e.to_string()))?;
                for r in &rows {
                    let (a, b) = r.weights();
                    let wts = format!("{a} {b}");
                    let n = r.n.to_string();
                    let mut rec = vec![n.as_str(), wts.as_str(), r.fiber_combination];
                    rec.extend(r.fibers.iter().copied());
                    rec.extend([r.singular_locus, r.j_invariant]);
                    w.write_record(rec).map_err(|e| CliError::Usage(e.to_string()))?;
                }
                w.flush().map_err(|e| CliError::Usage(e.to_string()))?;
            }
            String::from_utf8(out).unwrap()
        }
    };
    emit(output, &s)
}

fn cmd_check(suite_name: &str, seed: u64, output: &Output) -> CliResult<()> {
    let results = suite::run(suite_name, seed);
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.name).collect();
    let v = json!({
        "suite": suite_name,
        "seed": seed,
        "passed": failed.is_empty(),
        "checks": results,
    });
    emit(output, &json_string(&v))?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!("failed checks: {}", failed.join(", "))))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::Cartier { instance, route, transport, verify, output } => cmd_cartier(instance, *route, *transport, *verify, output),
        Cmd::Selfmap { instance, twist_mode, output } => cmd_selfmap(instance, *twist_mode, output),
        Cmd::Orbit { instance, max_iter, twist_mode, format, output } => cmd_orbit(instance, *max_iter, *twist_mode, *format, output),
        Cmd::Scan { instance, ext, mode, k, twist_mode, interpolate, format, output } => {
            cmd_scan(instance, *ext, *mode, *k, *twist_mode, *interpolate, *format, output)
        }
        Cmd::Oracle { cmd } => cmd_oracle(cmd),
        Cmd::Table1 { cmd } => cmd_table1(cmd),
        Cmd::Check { suite, seed, output } => cmd_check(suite, *seed, output),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let diag = json!({"error": e.kind(), "message": e.message(), "exit_code": e.code()});
            eprintln!("{}", diag);
            ExitCode::from(e.code())
        }
    }
}
