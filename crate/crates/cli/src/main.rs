//! `sll`: batch front end for the lattice, flow and fractal experiments.
//!
//! Every command prints (or writes to `--output`) either a JSON envelope
//! `{schema, config, result}` or RFC 4180 CSV whose first column is the
//! schema tag. Errors are reported as a JSON object with a nonzero exit.

mod selftest;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use sll_core::counting::{self, CountingScene};
use sll_core::flow::{self, FlowTime, WeightVector};
use sll_core::fractal::{self, ConstructionParams, TimeOffset};
use sll_core::lattice::json::parse_lattice_json;
use sll_core::lattice::{default_budget, Lattice, WeightedBox};
use sll_core::report::{envelope, to_string, SCHEMA};
use sll_core::scalar::{format_rational, int, parse_rational, rational::parse_rational_list, PowerScalar, Rational};
use sll_core::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "sll", version, about = "Weighted lattice counting, diagonal flows and self-affine trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Seed for the random-lattice suites
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: available parallelism)
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Write to this file instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Output format
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Primitive counts against the zeta density, q-thresholds and the bad set
    Count(CountArgs),
    /// Systole trace of a_t h(x) Z^(d+1) along grid times
    Flow(FlowArgs),
    /// Approximation profile D_w(T) and the singular-at-horizon flag
    SingularCheck(SingularArgs),
    /// Expand the tree of rational vectors
    Tree(TreeArgs),
    /// d - 1/(1 + w_1) and the limit quotient
    Dimension(DimensionArgs),
    /// Cover counts and the box-dimension proxy per depth
    Boxdim(TreeArgs),
    /// Which largeness inequalities hold at the given parameters
    Largeness(LargenessArgs),
    /// Run the seeded property suite
    Selftest(SelftestArgs),
}

#[derive(Args, Debug, Clone)]
struct CountArgs {
    /// Lattice JSON file; defaults to Z^dim
    #[arg(long)]
    lattice: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Box half-widths to sweep for the primitive count
    #[arg(long, default_value = "10,20,50")]
    half_widths: String,
    /// Scene radii r_1,...,r_d,1 for thresholds and the bad set
    #[arg(long)]
    r: Option<String>,
    /// Slab width s of the scene
    #[arg(long)]
    s: Option<String>,
}

#[derive(Args, Debug, Clone)]
struct FlowArgs {
    #[arg(long)]
    x: String,
    #[arg(long)]
    weights: String,
    #[arg(long, default_value_t = 2)]
    lambda: u64,
    /// Grid step in units of ln(lambda)
    #[arg(long, default_value = "1")]
    t_step: String,
    #[arg(long, default_value_t = 20)]
    steps: u64,
}

#[derive(Args, Debug, Clone)]
struct SingularArgs {
    #[arg(long)]
    x: String,
    #[arg(long)]
    weights: String,
    /// Horizons T_k = 2^k for k = 1..=steps
    #[arg(long, default_value_t = 12)]
    steps: u32,
    #[arg(long, default_value = "1/2")]
    threshold: String,
}

#[derive(Args, Debug, Clone)]
struct TreeArgs {
    #[arg(long, default_value = "3/5,2/5")]
    weights: String,
    #[arg(long, default_value = "1/2")]
    epsilon: String,
    #[arg(long, default_value = "1/4")]
    r: String,
    #[arg(long, default_value_t = 2)]
    lambda: u64,
    #[arg(long, default_value = "3")]
    t_step: String,
    /// t_0 in units of ln(lambda)
    #[arg(long, default_value = "0")]
    t0_step: String,
    #[arg(long, default_value_t = 1)]
    depth: u64,
    /// Cap on tree nodes and per-node candidates (default SLL_BUDGET or 10^7)
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Args, Debug, Clone)]
struct DimensionArgs {
    #[arg(long)]
    weights: String,
    /// Also sweep the finite-horizon estimate of s up to this n
    #[arg(long)]
    estimate: Option<u64>,
}

#[derive(Args, Debug, Clone)]
struct LargenessArgs {
    #[arg(long, default_value = "2/3,1/3")]
    weights: String,
    #[arg(long, default_value = "1/2")]
    epsilon: String,
    #[arg(long, default_value = "1/4")]
    r: String,
    #[arg(long, default_value_t = 2)]
    lambda: u64,
    #[arg(long, default_value = "3")]
    t_step: String,
    #[arg(long, default_value = "0")]
    t0_step: String,
    #[arg(long, default_value_t = 20)]
    n_max: u64,
}

#[derive(Args, Debug, Clone)]
struct SelftestArgs {
    /// Lattices per randomized property
    #[arg(long, default_value_t = 50)]
    cases: usize,
}

/// What a command produced.
enum Output {
    Json(Value),
    Csv { header: Vec<String>, rows: Vec<Vec<String>>, config: Value },
    Text(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.common.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("worker pool: {e}");
        }
    }
    match run(&cli).and_then(|out| emit(&cli.common, out)) {
        Ok(code) => code,
        Err(e) => {
            let v = json!({ "schema": SCHEMA, "error": { "kind": e.kind(), "message": e.to_string() } });
            print!("{}", to_string(&v));
            ExitCode::from(2)
        }
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::InvalidInput(format!("io: {e}"))
}

fn csv_string(header: &[String], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    let mut head = vec!["schema".to_string()];
    head.extend_from_slice(header);
    w.write_record(&head).map_err(|e| Error::InvalidInput(e.to_string()))?;
    for r in rows {
        let mut row = vec![SCHEMA.to_string()];
        row.extend_from_slice(r);
        w.write_record(&row).map_err(|e| Error::InvalidInput(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidInput(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::InvalidInput(e.to_string()))
}

fn emit(common: &Common, out: Output) -> Result<ExitCode> {
    let mut code = ExitCode::SUCCESS;
    let (text, sidecar) = match out {
        Output::Json(v) => {
            if v.pointer("/result/passed") == Some(&Value::Bool(false)) {
                code = ExitCode::from(1);
            }
            (to_string(&v), None)
        }
        Output::Csv { header, rows, config } => (csv_string(&header, &rows)?, Some(config)),
        Output::Text(s) => (s, None),
    };
    match &common.output {
        None => {
            std::io::stdout().write_all(text.as_bytes()).map_err(io_err)?;
        }
        Some(path) => {
            std::fs::write(path, text).map_err(io_err)?;
            if let Some(cfg) = sidecar {
                let mut p = path.clone().into_os_string();
                p.push(".config.json");
                std::fs::write(p, to_string(&json!({ "schema": SCHEMA, "config": cfg }))).map_err(io_err)?;
            }
        }
    }
    Ok(code)
}

fn format_or(common: &Common, default: Format) -> Format {
    common.format.unwrap_or(default)
}

fn run(cli: &Cli) -> Result<Output> {
    let c = &cli.common;
    match &cli.command {
        Command::Dimension(a) => dimension(c, a),
        Command::Count(a) => count(c, a),
        Command::Flow(a) => flow_cmd(c, a),
        Command::SingularCheck(a) => singular(c, a),
        Command::Tree(a) => tree(c, a),
        Command::Boxdim(a) => boxdim(c, a),
        Command::Largeness(a) => largeness(c, a),
        Command::Selftest(a) => Ok(Output::Json(selftest::run(c.seed, a.cases)?)),
    }
}

fn dimension(c: &Common, a: &DimensionArgs) -> Result<Output> {
    let w = WeightVector::parse(&a.weights)?;
    let dim = fractal::dimension_lower_bound(&w);
    let limit = fractal::growth_quotient_limit(&w);
    let config = json!({ "command": "dimension", "weights": w.to_string(), "estimate": a.estimate });
    match format_or(c, Format::Text) {
        Format::Text => Ok(Output::Text(format!("{}\n", format_rational(&dim)))),
        Format::Csv => Ok(Output::Csv {
            header: vec!["weights".into(), "d".into(), "ell".into(), "lower_bound".into(), "limit".into()],
            rows: vec![vec![
                w.to_string(),
                w.d().to_string(),
                w.ell().to_string(),
                format_rational(&dim),
                format_rational(&limit),
            ]],
            config,
        }),
        Format::Json => {
            let mut result = json!({
                "d": w.d(),
                "ell": w.ell(),
                "lower_bound": format_rational(&dim),
                "quotient_limit": format_rational(&limit),
                "xi": format_rational(w.xi()),
                "delta": format_rational(w.delta()),
            });
            if let Some(n_max) = a.estimate {
                let t = FlowTime::new(2, int(3))?;
                let p = ConstructionParams::new(
                    w.clone(),
                    Rational::new(1.into(), 2.into()),
                    t,
                    Rational::new(1.into(), 4.into()),
                    TimeOffset { e: int(1), grid: int(0) },
                )?;
                let est = fractal::thm21_s_estimate(&p, &fractal::default_tau_grid(w.d()), n_max, 17)?;
                result["estimate"] = json!({
                    "sup": est.sup.as_ref().map(format_rational),
                    "n_max": est.n_max,
                    "d_n_bounded": est.d_n_bounded,
                    "note": "finite-horizon estimate",
                });
            }
            Ok(Output::Json(envelope(config, result)))
        }
    }
}

fn parse_radii(s: &str) -> Result<Vec<PowerScalar>> {
    s.split(',').map(|x| PowerScalar::parse(x.trim())).collect()
}

fn count(c: &Common, a: &CountArgs) -> Result<Output> {
    let lat = match &a.lattice {
        Some(path) => parse_lattice_json(&std::fs::read_to_string(path).map_err(io_err)?)?,
        None => Lattice::integer_standard(a.dim),
    };
    let dim = lat.dim();
    let widths: Vec<Rational> = parse_rational_list(&a.half_widths)?;
    let config = json!({
        "command": "count",
        "lattice": sll_core::lattice::json::to_json(&lat),
        "half_widths": widths.iter().map(format_rational).collect::<Vec<_>>(),
        "r": a.r,
        "s": a.s,
        "budget": default_budget(),
    });
    let mut rows = Vec::new();
    let mut sweep = Vec::new();
    for hw in &widths {
        let k = WeightedBox::cube(dim, PowerScalar::rational(hw.clone()))?;
        let pd = counting::primitive_count_vs_zeta(&lat, &k)?;
        rows.push(vec![
            format_rational(hw),
            pd.count.to_string(),
            pd.theta.to_string(),
            format!("{:.12}", pd.ratio),
            pd.precondition.to_string(),
        ]);
        sweep.push(json!({
            "half_width": format_rational(hw),
            "primitive": pd.count,
            "theta": pd.theta.to_string(),
            "ratio": pd.ratio,
            "precondition": pd.precondition,
        }));
    }
    if format_or(c, Format::Json) == Format::Csv {
        return Ok(Output::Csv {
            header: vec![
                "half_width".into(),
                "primitive".into(),
                "theta".into(),
                "ratio".into(),
                "precondition".into(),
            ],
            rows,
            config,
        });
    }
    let mut result = json!({ "density": sweep });
    if let (Some(r), Some(s)) = (&a.r, &a.s) {
        let scene = CountingScene::new(lat.clone(), parse_radii(r)?, PowerScalar::parse(s)?)?;
        let th = counting::q_thresholds(&scene)?;
        let v = counting::bad_set(&scene)?;
        let phi = counting::bad_set_phi_major(&scene)?;
        result["scene"] = json!({
            "q_thresholds": th.values.iter().map(|q| q.as_ref().map(|x| x.to_string())).collect::<Vec<_>>(),
            "bad_set_size": v.len(),
            "orders_agree": v == phi,
            "bad_set": v.iter().map(|p| p.iter().map(BigInt::to_string).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "cases": counting::lemma38_hypotheses(&scene)?.to_json(),
        });
    } else if a.r.is_some() || a.s.is_some() {
        return Err(Error::InvalidInput("--r and --s go together".into()));
    }
    Ok(Output::Json(envelope(config, result)))
}

fn grid_times(lambda: u64, step: &Rational, steps: u64) -> Result<Vec<FlowTime>> {
    (0..=steps).map(|k| FlowTime::new(lambda, step * int(k as i64))).collect()
}

fn flow_cmd(c: &Common, a: &FlowArgs) -> Result<Output> {
    let x = parse_rational_list(&a.x)?;
    let w = WeightVector::parse(&a.weights)?;
    let step = parse_rational(&a.t_step)?;
    let ts = grid_times(a.lambda, &step, a.steps)?;
    let trace = flow::systole_trace(&x, &w, &ts)?;
    let config = json!({
        "command": "flow",
        "x": x.iter().map(format_rational).collect::<Vec<_>>(),
        "weights": w.to_string(),
        "lambda": a.lambda,
        "t_step": format_rational(&step),
        "steps": a.steps,
    });
    let d = w.d();
    if format_or(c, Format::Csv) == Format::Json {
        let rows: Vec<Value> = trace
            .iter()
            .map(|p| {
                json!({
                    "t": p.t.to_string(),
                    "norm_sq": p.norm_sq.to_interval(128).mid().to_string(),
                    "norm": p.norm(64).to_f64(),
                    "witness": p.witness.iter().map(BigInt::to_string).collect::<Vec<_>>(),
                    "vector": p.vector.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                })
            })
            .collect();
        return Ok(Output::Json(envelope(config, json!({ "trace": rows }))));
    }
    let mut header = vec!["t".to_string(), "t_value".into(), "systole".into(), "e_minus_t".into()];
    header.extend((1..=d + 1).map(|i| format!("m{i}")));
    let rows = trace
        .iter()
        .map(|p| {
            let tv = p.t.to_f64();
            let mut row = vec![
                p.t.to_string(),
                format!("{tv:.12}"),
                format!("{:.12e}", p.norm(64).to_f64()),
                format!("{:.12e}", (-tv).exp()),
            ];
            row.extend(p.witness.iter().map(BigInt::to_string));
            row
        })
        .collect();
    Ok(Output::Csv { header, rows, config })
}

fn singular(c: &Common, a: &SingularArgs) -> Result<Output> {
    let x = parse_rational_list(&a.x)?;
    let w = WeightVector::parse(&a.weights)?;
    let threshold = parse_rational(&a.threshold)?;
    if a.steps == 0 || a.steps > 40 {
        return Err(Error::InvalidInput("steps must be in 1..=40".into()));
    }
    let horizons: Vec<u64> = (1..=a.steps).map(|k| 1u64 << k).collect();
    let prof = flow::approximation_profile(&x, &w, &horizons, &threshold)?;
    let config = json!({
        "command": "singular-check",
        "x": x.iter().map(format_rational).collect::<Vec<_>>(),
        "weights": w.to_string(),
        "horizons": horizons,
        "threshold": format_rational(&threshold),
    });
    if format_or(c, Format::Json) == Format::Csv {
        let mut header = vec!["T".to_string(), "value".into(), "exact".into(), "q".into()];
        header.extend((1..=w.d()).map(|i| format!("p{i}")));
        let rows = prof
            .entries
            .iter()
            .map(|e| {
                let mut row = vec![
                    e.horizon.to_string(),
                    format!("{:.12e}", e.value.to_f64()),
                    e.value.to_string(),
                    e.q.to_string(),
                ];
                row.extend(e.p.iter().map(BigInt::to_string));
                row
            })
            .collect();
        return Ok(Output::Csv { header, rows, config });
    }
    let entries: Vec<Value> = prof
        .entries
        .iter()
        .map(|e| {
            json!({
                "T": e.horizon,
                "value": e.value.to_string(),
                "approx": e.value.to_f64(),
                "q": e.q,
                "p": e.p.iter().map(BigInt::to_string).collect::<Vec<_>>(),
            })
        })
        .collect();
    let result = json!({
        "profile": entries,
        "singular_consistent_at_horizon": prof.singular_consistent,
        "note": "finite-horizon reading",
    });
    Ok(Output::Json(envelope(config, result)))
}

fn tree_params(a: &TreeArgs) -> Result<ConstructionParams> {
    let w = WeightVector::parse(&a.weights)?;
    let t = FlowTime::new(a.lambda, parse_rational(&a.t_step)?)?;
    let t0 = TimeOffset::grid(parse_rational(&a.t0_step)?);
    ConstructionParams::new(w, parse_rational(&a.epsilon)?, t, parse_rational(&a.r)?, t0)
}

fn params_json(p: &ConstructionParams, depth: u64, budget: u64) -> Value {
    json!({
        "weights": p.w.to_string(),
        "epsilon": format_rational(&p.eps),
        "r": format_rational(&p.r),
        "lambda": p.t.lambda,
        "t_step": format_rational(&p.t.step),
        "t0_step": format_rational(&p.t0.grid),
        "c_prime": format_rational(&p.c_prime),
        "depth": depth,
        "budget": budget,
    })
}

fn tree(c: &Common, a: &TreeArgs) -> Result<Output> {
    let p = tree_params(a)?;
    let budget = a.budget.unwrap_or_else(default_budget);
    let t = fractal::expand_tree(&p, a.depth, budget)?;
    let mut config = params_json(&p, a.depth, budget);
    config["command"] = json!("tree");
    if format_or(c, Format::Json) == Format::Csv {
        let rows = fractal::child_count_rows(&t)
            .into_iter()
            .map(|(i, d, cand, kids, lo, hi)| {
                vec![
                    i.to_string(),
                    d.to_string(),
                    cand.to_string(),
                    kids.to_string(),
                    format!("{lo:.6}"),
                    format!("{hi:.6}"),
                ]
            })
            .collect();
        return Ok(Output::Csv {
            header: vec![
                "node".into(),
                "depth".into(),
                "candidates".into(),
                "children".into(),
                "window_lo".into(),
                "window_hi".into(),
            ],
            rows,
            config,
        });
    }
    let mut result = t.to_json();
    result["report"] = fractal::tree_report(&t)?.to_json();
    let seps: Vec<Value> = (1..=a.depth)
        .map(|n| fractal::separation_check(&t, n).map(|s| s.to_record(&t).to_json()))
        .collect::<Result<_>>()?;
    result["separation"] = json!(seps);
    Ok(Output::Json(envelope(config, result)))
}

fn boxdim(c: &Common, a: &TreeArgs) -> Result<Output> {
    let p = tree_params(a)?;
    let budget = a.budget.unwrap_or_else(default_budget);
    let t = fractal::expand_tree(&p, a.depth, budget)?;
    let mut config = params_json(&p, a.depth, budget);
    config["command"] = json!("boxdim");
    let mut rows = Vec::new();
    let mut items = Vec::new();
    for n in 0..=a.depth {
        let count = fractal::cover_count(&t, n)?;
        let side = p.l_n(n, 0).to_f64();
        let proxy = fractal::box_dimension_proxy(&t, n)?;
        rows.push(vec![
            n.to_string(),
            t.levels[n as usize].len().to_string(),
            count.to_string(),
            format!("{side:.12e}"),
            format!("{proxy:.12}"),
        ]);
        items.push(
            json!({ "n": n, "nodes": t.levels[n as usize].len(), "cover_count": count, "side": side, "proxy": proxy }),
        );
    }
    if format_or(c, Format::Csv) == Format::Json {
        return Ok(Output::Json(envelope(config, json!({ "levels": items, "d": p.d() }))));
    }
    Ok(Output::Csv {
        header: vec!["n".into(), "nodes".into(), "cover_count".into(), "side".into(), "proxy".into()],
        rows,
        config,
    })
}

fn largeness(_c: &Common, a: &LargenessArgs) -> Result<Output> {
    let w = WeightVector::parse(&a.weights)?;
    let t = FlowTime::new(a.lambda, parse_rational(&a.t_step)?)?;
    let p = ConstructionParams::new(
        w,
        parse_rational(&a.epsilon)?,
        t,
        parse_rational(&a.r)?,
        TimeOffset::grid(parse_rational(&a.t0_step)?),
    )?;
    let rec = fractal::largeness_record(&p, a.n_max)?;
    let mut config = params_json(&p, 0, 0);
    config["command"] = json!("largeness");
    config["n_max"] = json!(a.n_max);
    Ok(Output::Json(envelope(config, rec.to_json())))
}
