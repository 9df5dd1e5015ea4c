use std::path::PathBuf;
use std::process::ExitCode;

use abssep::auxpoly::{build_aux_with, certified_gap_threshold_with, AuxKind, AuxOptions};
use abssep::families::{
    equal_modulus_cubic_check, family_parts, family_quality_table, family_rows_by_height, verify_sqrt3_surface,
    FamilyName, FamilyRow,
};
use abssep::measure::{measure_with, MeasureKind, MeasureOptions, PairClass};
use abssep::perturb::{
    cancellation_order, common_factor_guard, invert_series, modulus_sq, rational_str, BaseRoot,
};
use abssep::poly::{parse_poly, IntPolynomial};
use abssep::rootfind::DEFAULT_PRECISION_CEILING;
use abssep::search::{run_search, RecordStore, SearchConfig, SearchMode, SearchSpec};
use abssep::table::{emit_rows, emit_table, round_sci, Format, Layout, TableInput};
use abssep::verify::{run_all, VerifyOptions};
use abssep::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

/// Certified root separation measures for integer polynomials.
#[derive(Parser, Debug)]
#[command(name = "abssep", version)]
struct Cli {
    /// Largest working precision in bits.
    #[arg(long, global = true, env = "ABSSEP_PRECISION_CEILING", default_value_t = DEFAULT_PRECISION_CEILING)]
    precision_ceiling: u32,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Fmt::Json)]
    format: Fmt,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Fmt {
    Json,
    Csv,
    Md,
}

impl From<Fmt> for Format {
    fn from(f: Fmt) -> Self {
        match f {
            Fmt::Json => Format::Json,
            Fmt::Csv => Format::Csv,
            Fmt::Md => Format::Md,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Measure one polynomial.
    Compute(ComputeArgs),
    /// Exhaustive or random record search.
    Search(SearchArgs),
    /// Members of the explicit families and their qualities.
    Family(FamilyArgs),
    /// Auxiliary polynomials and gap thresholds.
    Aux(AuxArgs),
    /// Perturbative root expansions and cancellation checks.
    Perturb(PerturbArgs),
    /// Run the property suite.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct ComputeArgs {
    /// Polynomial, e.g. "10X^3-3X^2-2X+3" or ascending coefficients "3,-2,-3,10".
    #[arg(long)]
    poly: String,
    /// Measure (sep, abssep, re_gap, im_gap, top_two_abs_gap); repeatable.
    #[arg(long, default_value = "abssep")]
    measure: Vec<String>,
    /// Measure the squarefree part when the input has repeated roots.
    #[arg(long)]
    squarefree: bool,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long)]
    degree: usize,
    #[arg(long)]
    height: u64,
    /// Measures to track (default: the four table measures).
    #[arg(long)]
    measure: Vec<String>,
    #[arg(long, default_value_t = 1)]
    top_k: usize,
    /// Also keep every polynomial at or above this quality.
    #[arg(long)]
    min_quality: Option<f64>,
    /// Random sampling instead of exhaustive enumeration.
    #[arg(long, requires = "count")]
    seed: Option<u64>,
    #[arg(long)]
    count: Option<u64>,
    /// Append final records to this JSON-lines file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Checkpoint file; resumed when present.
    #[arg(long)]
    resume: Option<PathBuf>,
    /// Stop after this many slices (the checkpoint keeps the progress).
    #[arg(long)]
    max_slices: Option<usize>,
    /// Table layout for standard output.
    #[arg(long, default_value = "table1")]
    table: String,
    /// Record timestamps in the output file.
    #[arg(long)]
    timestamps: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum By {
    Height,
    M,
}

#[derive(Args, Debug)]
struct FamilyArgs {
    /// deg3_sqrt3, deg4, deg5a, deg5 (= deg5b), deg6, extra_deg4, extra_deg3a, extra_deg3b, extra_deg5a, extra_deg5b.
    #[arg(long, required_unless_present_any = ["equal_modulus", "surface"])]
    name: Option<String>,
    /// Parameter values (index n, target height or M); comma separated or repeated.
    #[arg(long, value_delimiter = ',')]
    param: Vec<String>,
    /// How --param is read for the M-parametrized families.
    #[arg(long, value_enum, default_value_t = By::Height)]
    by: By,
    /// The q of the degree-5 families.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    q: i64,
    /// Only abssep is tabulated.
    #[arg(long, default_value = "abssep")]
    measure: String,
    /// Equal-modulus report for a cubic.
    #[arg(long, conflicts_with_all = ["name", "surface"])]
    equal_modulus: Option<String>,
    /// Check the √3 surface at a,b,c.
    #[arg(long, value_delimiter = ',', num_args = 3, allow_hyphen_values = true, conflicts_with = "name")]
    surface: Vec<i64>,
}

#[derive(Args, Debug)]
struct AuxArgs {
    #[arg(long)]
    poly: String,
    /// M_diff, M_sum, R_realcomplex, S_complexcomplex, T1_repart, T2_partdiff, T3_impart; default all admissible.
    #[arg(long)]
    kind: Vec<String>,
    /// Print the gap threshold for this measure instead.
    #[arg(long)]
    threshold: Option<String>,
    /// Pair class for --threshold: real-real, real-complex, complex-complex.
    #[arg(long, default_value = "complex-complex")]
    class: String,
}

#[derive(Args, Debug)]
struct PerturbArgs {
    /// Family supplying R and Q (deg4, deg5, deg6, extra_*).
    #[arg(long, required_unless_present = "r")]
    family: Option<String>,
    /// Explicit R (with --q-poly).
    #[arg(long, requires = "q_poly", conflicts_with = "family")]
    r: Option<String>,
    #[arg(long)]
    q_poly: Option<String>,
    /// The q of the degree-5 families.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    q: i64,
    /// Base root: an integer, "i", or a monic quadratic such as "X^2+X+1".
    #[arg(long, allow_hyphen_values = true)]
    root: Option<String>,
    #[arg(long, default_value_t = 4)]
    order: usize,
    /// Print the squared-modulus series too.
    #[arg(long)]
    modulus: bool,
    /// Two base roots separated by ';' for a cancellation check.
    #[arg(long, allow_hyphen_values = true)]
    pair: Option<String>,
    #[arg(long)]
    depth: Option<usize>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Smaller corpora.
    #[arg(long)]
    quick: bool,
    #[arg(long, default_value_t = VerifyOptions::default().seed)]
    seed: u64,
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::InvalidParameter(_) => Failure::Usage(e.to_string()),
            e => Failure::Domain(e.to_string()),
        }
    }
}

type Outcome = std::result::Result<String, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Domain(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    let format: Format = cli.format.into();
    let opts = MeasureOptions { ceiling_bits: cli.precision_ceiling, ..Default::default() };
    let in_pool = |f: &(dyn Fn() -> Outcome + Sync)| -> Outcome {
        match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.unwrap_or(0)).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    };
    match &cli.cmd {
        Cmd::Compute(a) => compute(a, opts, format),
        Cmd::Search(a) => search(a, cli, format),
        Cmd::Family(a) => in_pool(&|| family(a, opts, format)),
        Cmd::Aux(a) => aux(a, cli.precision_ceiling, format),
        Cmd::Perturb(a) => perturb(a, format),
        Cmd::Verify(a) => {
            let checks = run_all(VerifyOptions { seed: a.seed, quick: a.quick, jobs: cli.jobs });
            let rows: Vec<Vec<String>> = checks
                .iter()
                .map(|c| vec![c.name.clone(), if c.passed { "PASS" } else { "FAIL" }.into(), c.detail.clone()])
                .collect();
            let out = emit_rows(&["check", "result", "detail"], &rows, format)?;
            if checks.iter().all(|c| c.passed) {
                Ok(out)
            } else {
                print!("{out}");
                Err(Failure::Domain("property suite failed".into()))
            }
        }
    }
}

fn parse_measure(s: &str) -> std::result::Result<MeasureKind, Failure> {
    s.parse::<MeasureKind>().map_err(|_| usage(format!("unknown measure {s:?}")))
}

fn compute(a: &ComputeArgs, mut opts: MeasureOptions, format: Format) -> Outcome {
    let p = parse_poly(&a.poly)?;
    opts.squarefree_part = a.squarefree;
    let kinds = a.measure.iter().map(|m| parse_measure(m)).collect::<std::result::Result<Vec<_>, _>>()?;
    let mut reports = Vec::new();
    for k in kinds {
        reports.push(measure_with(&p, k, opts)?.report());
    }
    match format {
        Format::Json => {
            let s = if reports.len() == 1 {
                serde_json::to_string_pretty(&reports[0])
            } else {
                serde_json::to_string_pretty(&reports)
            };
            Ok(format!("{}\n", s.expect("report serializes")))
        }
        _ => {
            let rows = reports
                .iter()
                .map(|r| {
                    Ok(vec![
                        r.polynomial.clone(),
                        r.measure.tag().to_string(),
                        round_sci(&r.value, 4)?,
                        r.quality.as_deref().map(|q| format!("{:.2}", q.parse::<f64>().unwrap_or(f64::NAN))).unwrap_or_default(),
                    ])
                })
                .collect::<abssep::Result<Vec<_>>>()?;
            Ok(emit_rows(&["polynomial", "measure", "value", "quality"], &rows, format)?)
        }
    }
}

fn search(a: &SearchArgs, cli: &Cli, format: Format) -> Outcome {
    let measures = if a.measure.is_empty() {
        MeasureKind::TABLE.to_vec()
    } else {
        a.measure.iter().map(|m| parse_measure(m)).collect::<std::result::Result<Vec<_>, _>>()?
    };
    let mut spec = SearchSpec::exhaustive(a.degree, a.height, &measures);
    spec.top_k = a.top_k;
    spec.min_quality = a.min_quality;
    if let (Some(seed), Some(count)) = (a.seed, a.count) {
        spec.mode = SearchMode::Random { seed, count };
    }
    spec.validate()?;
    let layout: Layout = a.table.parse()?;
    let store = match &a.out {
        Some(p) => Some(RecordStore::open(p)?),
        None => None,
    };
    let cfg = SearchConfig {
        jobs: cli.jobs,
        ceiling_bits: cli.precision_ceiling,
        checkpoint: a.resume.clone(),
        timestamps: a.timestamps,
        max_slices: a.max_slices,
    };
    let summary = run_search(&spec, store.as_ref(), &cfg)?;
    eprintln!(
        "slices {}/{} enumerated {} certified {} skipped {}{}",
        summary.slices_done,
        summary.slices_total,
        summary.enumerated,
        summary.certified,
        summary.skipped,
        if summary.complete { "" } else { " (incomplete; rerun with the same --resume)" }
    );
    let records: Vec<_> = if layout == Layout::Table2 {
        summary.records.into_iter().filter(|r| r.measure == MeasureKind::AbsSep).collect()
    } else {
        summary.records
    };
    Ok(emit_table(layout, TableInput::Records(&records), format)?)
}

fn parse_big(s: &str) -> std::result::Result<BigInt, Failure> {
    let t = s.trim();
    if let Some((b, e)) = t.split_once('^').or_else(|| t.split_once("e")) {
        let b: BigInt = b.parse().map_err(|_| usage(format!("bad parameter {s:?}")))?;
        let e: u32 = e.parse().map_err(|_| usage(format!("bad parameter {s:?}")))?;
        let base = if t.contains('^') { b } else { BigInt::from(10) };
        let scale = if t.contains('^') { BigInt::from(1) } else { t.split_once('e').unwrap().0.parse().unwrap() };
        return Ok(scale * num_traits::pow(base, e as usize));
    }
    t.parse().map_err(|_| usage(format!("bad parameter {s:?}")))
}

fn family(a: &FamilyArgs, opts: MeasureOptions, format: Format) -> Outcome {
    if let Some(p) = &a.equal_modulus {
        let rep = equal_modulus_cubic_check(&parse_poly(p)?)?;
        return Ok(format!("{}\n", serde_json::to_string_pretty(&rep).expect("report serializes")));
    }
    if a.surface.len() == 3 {
        let ok = verify_sqrt3_surface(a.surface[0], a.surface[1], a.surface[2])?;
        return Ok(format!("{}\n", serde_json::json!({ "a": a.surface[0], "b": a.surface[1], "c": a.surface[2], "equal_moduli": ok })));
    }
    if parse_measure(&a.measure)? != MeasureKind::AbsSep {
        return Err(usage("family tables report abssep only"));
    }
    let name: FamilyName = a.name.as_deref().unwrap_or_default().parse()?;
    if a.param.is_empty() {
        return Err(usage("at least one --param is required"));
    }
    let params = a.param.iter().map(|p| parse_big(p)).collect::<std::result::Result<Vec<_>, _>>()?;
    let by_height = matches!(a.by, By::Height)
        && matches!(name, FamilyName::Deg4 | FamilyName::Deg6 | FamilyName::Deg5A | FamilyName::Deg5B);
    let rows: Vec<FamilyRow> = if by_height && a.q == 0 {
        family_rows_by_height(name, &params, opts)?
    } else {
        family_quality_table(name, &params, a.q, opts)?
    };
    let layout = match name {
        FamilyName::Deg3Sqrt3 => Some(Layout::Table3),
        FamilyName::Deg4 | FamilyName::Deg6 if by_height => Some(Layout::Table4),
        FamilyName::Deg5A | FamilyName::Deg5B if by_height && a.q == 0 => Some(Layout::Table5),
        _ => None,
    };
    match layout {
        Some(l) => Ok(emit_table(l, TableInput::Family(&rows), format)?),
        None => {
            let cells = rows
                .iter()
                .map(|r| {
                    Ok(vec![
                        r.param.clone(),
                        r.polynomial.clone(),
                        r.height.clone(),
                        round_sci(&r.abssep, 4)?,
                        r.quality.as_deref().map(|q| format!("{:.2}", q.parse::<f64>().unwrap_or(f64::NAN))).unwrap_or_default(),
                    ])
                })
                .collect::<abssep::Result<Vec<_>>>()?;
            Ok(emit_rows(&["M", "polynomial", "height", "abssep", "quality"], &cells, format)?)
        }
    }
}

fn aux(a: &AuxArgs, ceiling: u32, format: Format) -> Outcome {
    let p = parse_poly(&a.poly)?;
    let opts = AuxOptions { ceiling_bits: ceiling };
    if let Some(m) = &a.threshold {
        let kind = parse_measure(m)?;
        let class: PairClass = a.class.parse().map_err(|_| usage(format!("unknown class {:?}", a.class)))?;
        let tau = certified_gap_threshold_with(&p, kind, class, opts)?;
        let rows = vec![vec![kind.tag().to_string(), class.tag().to_string(), rational_str(&tau), format!("{:.6e}", num_traits::ToPrimitive::to_f64(&tau).unwrap_or(0.0))]];
        return Ok(emit_rows(&["measure", "class", "tau", "approx"], &rows, format)?);
    }
    let kinds: Vec<AuxKind> = if a.kind.is_empty() {
        AuxKind::ALL.iter().copied().filter(|k| p.degree() >= k.min_degree()).collect()
    } else {
        a.kind
            .iter()
            .map(|k| AuxKind::from_tag(k).ok_or_else(|| usage(format!("unknown aux kind {k:?}"))))
            .collect::<std::result::Result<_, _>>()?
    };
    let mut rows = Vec::new();
    for k in kinds {
        let ap = build_aux_with(&p, k, opts)?;
        rows.push(vec![k.tag().to_string(), ap.poly.degree().to_string(), ap.height.to_string(), ap.poly.to_string()]);
    }
    Ok(emit_rows(&["kind", "degree", "height", "polynomial"], &rows, format)?)
}

fn parse_root(s: &str) -> std::result::Result<BaseRoot, Failure> {
    let t = s.trim();
    if t == "i" {
        return Ok(BaseRoot::i());
    }
    if let Ok(x) = t.parse::<i64>() {
        return Ok(BaseRoot::rational(x));
    }
    let q = parse_poly(t)?;
    let c = q.to_i64s().ok_or_else(|| usage("root polynomial coefficients too large"))?;
    match c.as_slice() {
        [p, s, 1] => Ok(BaseRoot::quadratic(*s, *p)),
        [x0, 1] => Ok(BaseRoot::rational(-x0)),
        _ => Err(usage(format!("base root must be an integer, \"i\" or a monic quadratic, got {s:?}"))),
    }
}

fn perturb(a: &PerturbArgs, format: Format) -> Outcome {
    let (r, q): (IntPolynomial, IntPolynomial) = match (&a.family, &a.r, &a.q_poly) {
        (Some(f), _, _) => {
            let name: FamilyName = f.parse()?;
            family_parts(name, a.q).ok_or_else(|| usage(format!("{f} has no M·R − Q form")))?
        }
        (None, Some(r), Some(q)) => (parse_poly(r)?, parse_poly(q)?),
        _ => return Err(usage("give --family or both --r and --q-poly")),
    };
    if common_factor_guard(&r, &q) {
        return Err(Failure::Domain("Q shares a factor with R; excluded".into()));
    }
    if let Some(pair) = &a.pair {
        let (x, y) = pair.split_once(';').ok_or_else(|| usage("--pair takes two roots separated by ';'"))?;
        let depth = a.depth.unwrap_or(r.degree().max(q.degree()) + 2);
        let order = cancellation_order(&r, &q, parse_root(x)?, parse_root(y)?, depth)?;
        let verdict = match order {
            Some(k) => format!("moduli agree through order {}, differ at order {k}", k - 1),
            None => format!("moduli agree through order {depth}"),
        };
        let rows = vec![vec![x.trim().into(), y.trim().into(), depth.to_string(), order.map(|k| k.to_string()).unwrap_or_default(), verdict]];
        return Ok(emit_rows(&["root_a", "root_b", "depth", "first_difference", "verdict"], &rows, format)?);
    }
    let root = parse_root(a.root.as_deref().ok_or_else(|| usage("give --root or --pair"))?)?;
    let s = invert_series(&r, &q, &root, a.order)?;
    let terms = s.render();
    let modulus = if a.modulus { Some(modulus_sq(&s)?) } else { None };
    let rows: Vec<Vec<String>> = terms
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let mut row = vec![k.to_string(), c.clone()];
            if let Some(m) = &modulus {
                row.push(rational_str(&m[k]));
            }
            row
        })
        .collect();
    let headers: &[&str] = if a.modulus { &["k", "coefficient", "modulus_sq"] } else { &["k", "coefficient"] };
    Ok(emit_rows(headers, &rows, format)?)
}
