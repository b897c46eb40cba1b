use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use barbridge_core::analogous::{build_context, feature_centric, similarity_centric, Mode};
use barbridge_core::complex::{clique_complex_with, GradedComplex, Simplex, TieBreak};
use barbridge_core::dowker::barcode_check_of;
use barbridge_core::extension::{bar_to_bars, cycle_to_bar, BarExtensionOutput, BarMode};
use barbridge_core::field::FieldSpec;
use barbridge_core::persistence::{compute_persistence, Chain, PersistenceResult};
use barbridge_core::Error;

mod doc;
mod gen;
mod io;
mod svg;

#[derive(Debug)]
pub struct CliError {
    code: i32,
    msg: String,
}

impl CliError {
    fn input(msg: impl Into<String>) -> Self {
        CliError { code: 2, msg: msg.into() }
    }

    fn from_core(e: Error) -> Self {
        let code = match &e {
            Error::InvalidInput(_) | Error::TrivialClass => 2,
            Error::AssumptionViolated(_) => 3,
            Error::Truncated => 4,
        };
        CliError { code, msg: e.to_string() }
    }
}

#[derive(Parser)]
#[command(name = "barbridge", version, about = "Persistence barcodes with cycle representatives, bar extension between filtrations, and analogous bar search across a cross-dissimilarity")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum TieArg {
    Error,
    Jitter,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Feature,
    Similarity,
}

#[derive(Args)]
struct Common {
    /// Homology degree.
    #[arg(long, default_value_t = 1)]
    k: usize,

    /// Field characteristic (prime).
    #[arg(long, default_value_t = 2)]
    field: u64,

    /// Maximum simplex dimension kept (default k+1).
    #[arg(long)]
    max_dim: Option<usize>,

    /// How to handle tied dissimilarity values (default: collapse to
    /// one grade).
    #[arg(long, value_enum)]
    tie_break: Option<TieArg>,

    /// Enumeration budget for class/member streaming.
    #[arg(long, default_value_t = 65536)]
    cap: usize,

    /// Evaluate the bar at this grade instead of its terminal one.
    #[arg(long)]
    psi_override: Option<usize>,

    /// Fail (exit 4) if any enumeration was truncated by --cap.
    #[arg(long)]
    strict_complete: bool,

    /// Seed for built-in generators.
    #[arg(long, default_value_t = 7)]
    seed: u64,

    /// Write the JSON result document here.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Write an SVG barcode rendering here.
    #[arg(long)]
    svg: Option<PathBuf>,

    /// Inputs are n x d point clouds (Euclidean) instead of matrices.
    #[arg(long)]
    points: bool,

    /// Include wall-clock timings in diagnostics (breaks byte-stable
    /// output).
    #[arg(long)]
    timings: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Barcode of the clique filtration of one input.
    Persistence {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Extend a bar (or explicit cycle) of the first input's filtration
    /// into the second one.
    Extend {
        z: PathBuf,
        y: PathBuf,
        /// Bar rank as printed by the persistence command.
        #[arg(long, conflicts_with = "cycle")]
        bar: Option<usize>,
        /// CSV cycle file: one line per term, coefficient then vertex
        /// ids.
        #[arg(long)]
        cycle: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Relate bars of two point clouds through a cross-dissimilarity.
    Analogous {
        /// Either three inputs (Q, P, cross) or one generator spec
        /// (gen:circles, gen:clusters, gen:torus).
        inputs: Vec<String>,
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Bar rank on the starting side (default 0, the longest).
        #[arg(long, default_value_t = 0)]
        bar: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Verify barcode agreement of the two witness complexes of a
    /// rectangular matrix.
    DowkerCheck {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

fn main() {
    let cli = Cli::parse();
    let threads = match std::env::var("BARBRIDGE_THREADS") {
        Ok(v) => match v.parse::<usize>() {
            Ok(n) if n >= 1 => n,
            _ => {
                eprintln!("error: BARBRIDGE_THREADS must be a positive integer");
                std::process::exit(2);
            }
        },
        Err(_) => 1,
    };
    let result = match cli.cmd {
        Cmd::Persistence { input, common } => cmd_persistence(&input, &common),
        Cmd::Extend { z, y, bar, cycle, common } => cmd_extend(&z, &y, bar, cycle.as_deref(), &common),
        Cmd::Analogous { inputs, mode, bar, common } => cmd_analogous(&inputs, mode, bar, &common),
        Cmd::DowkerCheck { input, common } => cmd_dowker_check(&input, &common, threads),
    };
    if let Err(e) = result {
        eprintln!("error: {}", e.msg);
        std::process::exit(e.code);
    }
}

fn tie_break(common: &Common) -> TieBreak {
    match common.tie_break {
        None => TieBreak::Collapse,
        Some(TieArg::Error) => TieBreak::Error,
        Some(TieArg::Jitter) => TieBreak::Jitter,
    }
}

fn field_of(common: &Common) -> Result<FieldSpec, CliError> {
    FieldSpec::new(common.field).map_err(CliError::from_core)
}

fn max_dim_of(common: &Common) -> usize {
    common.max_dim.unwrap_or(common.k + 1)
}

/// Loads a square input as a dissimilarity matrix, honoring --points.
fn load_square(path: &Path, common: &Common) -> Result<(barbridge_core::complex::DissimilarityMatrix, String), CliError> {
    let table = io::read_table(path)?;
    let digest = io::file_digest(path)?;
    let m = if common.points {
        io::euclidean(&table)?
    } else {
        io::square_matrix(&table)?
    };
    Ok((m, digest))
}

fn file_label(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn config_echo(common: &Common, cmd: &str, inputs: Vec<Value>) -> Value {
    json!({
        "command": cmd,
        "inputs": inputs,
        "k": common.k,
        "field": common.field,
        "max_dim": max_dim_of(common),
        "tie_break": match common.tie_break {
            None => "collapse",
            Some(TieArg::Error) => "error",
            Some(TieArg::Jitter) => "jitter",
        },
        "cap": common.cap,
        "psi_override": common.psi_override,
        "points": common.points,
        "seed": common.seed,
    })
}

fn finish(
    mut document: Map<String, Value>,
    common: &Common,
    panels: &[svg::Panel],
    started: std::time::Instant,
) -> Result<(), CliError> {
    let mut diagnostics = document
        .remove("diagnostics")
        .and_then(|v| v.as_object().cloned())
        .unwrap_or_default();
    if common.timings {
        diagnostics.insert(
            "timings_ms".into(),
            json!({"total": started.elapsed().as_millis() as u64}),
        );
    }
    document.insert("diagnostics".into(), Value::Object(diagnostics));
    let rendered = doc::render(&Value::Object(document));
    if let Some(path) = &common.out {
        std::fs::write(path, &rendered)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    } else {
        print!("{rendered}");
    }
    if let Some(path) = &common.svg {
        std::fs::write(path, svg::render(panels))
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn new_document(common: &Common, cmd: &str, inputs: Vec<Value>) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema".into(), doc::SCHEMA.into());
    m.insert("config".into(), config_echo(common, cmd, inputs));
    m
}

fn cmd_persistence(input: &Path, common: &Common) -> Result<(), CliError> {
    let started = std::time::Instant::now();
    let field = field_of(common)?;
    let (m, digest) = load_square(input, common)?;
    let x = clique_complex_with(&m, max_dim_of(common), tie_break(common))
        .map_err(CliError::from_core)?;
    let res = compute_persistence(&x, common.k, field).map_err(CliError::from_core)?;
    print_ranks(&res, common.k);
    let mut document = new_document(
        common,
        "persistence",
        vec![json!({"name": file_label(input), "sha256": digest})],
    );
    document.insert("barcodes".into(), json!({"input": doc::barcode_json(&res, common.k)}));
    let panels = [svg::Panel {
        title: format!("bc_{}({})", common.k, file_label(input)),
        res: &res,
        marks: BTreeMap::new(),
    }];
    finish(document, common, &panels, started)
}

fn print_ranks(res: &PersistenceResult, k: usize) {
    println!("rank\tbar\tbirth\tdeath");
    for (rank, id) in doc::ranked_bars(res, k).iter().enumerate() {
        let bar = res.bar(*id);
        let death = res
            .scale()
            .value(bar.death)
            .map(|v| format!("{v:.6}"))
            .unwrap_or_else(|| "inf".into());
        println!(
            "{rank}\t{id}\t{:.6}\t{death}",
            res.scale().value(bar.birth).unwrap()
        );
    }
}

fn parse_cycle_file(path: &Path, field: &FieldSpec) -> Result<Chain, CliError> {
    let table = io::read_table(path)?;
    let mut terms = Vec::new();
    for row in &table {
        if row.len() < 2 {
            return Err(CliError::input("cycle rows need a coefficient and vertices"));
        }
        let coeff = row[0] as u64;
        let verts: Vec<u32> = row[1..].iter().map(|&v| v as u32).collect();
        let simplex = Simplex::new(verts).map_err(CliError::from_core)?;
        terms.push((simplex, coeff));
    }
    Ok(Chain::from_terms(terms, field))
}

fn select_bar(res: &PersistenceResult, k: usize, rank: usize) -> Result<usize, CliError> {
    doc::ranked_bars(res, k)
        .get(rank)
        .copied()
        .ok_or_else(|| CliError::input(format!("bar rank {rank} out of range")))
}

fn marks_from_output(out: &BarExtensionOutput) -> BTreeMap<usize, svg::Mark> {
    let mut marks = BTreeMap::new();
    for res in &out.per_class {
        for g in &res.grades {
            if let Some(bars) = &g.bars {
                for &(_, id) in &bars.baseline.terms {
                    marks.insert(id, svg::Mark::Baseline);
                }
                for off in &bars.offsets {
                    for &(_, id) in &off.terms {
                        marks.entry(id).or_insert(svg::Mark::Offset);
                    }
                }
            }
        }
    }
    marks
}

fn check_complete(truncated: bool, common: &Common) -> Result<(), CliError> {
    if truncated && common.strict_complete {
        return Err(CliError::from_core(Error::Truncated));
    }
    Ok(())
}

fn cmd_extend(
    z_path: &Path,
    y_path: &Path,
    bar: Option<usize>,
    cycle: Option<&Path>,
    common: &Common,
) -> Result<(), CliError> {
    let started = std::time::Instant::now();
    let field = field_of(common)?;
    let (mz, dz) = load_square(z_path, common)?;
    let (my, dy) = load_square(y_path, common)?;
    if mz.size() != my.size() {
        return Err(CliError::input(format!(
            "inputs must share the vertex count ({} vs {})",
            mz.size(),
            my.size()
        )));
    }
    let tie = tie_break(common);
    let z = clique_complex_with(&mz, max_dim_of(common), tie).map_err(CliError::from_core)?;
    let y = clique_complex_with(&my, max_dim_of(common), tie).map_err(CliError::from_core)?;
    let z_res = compute_persistence(&z, common.k, field).map_err(CliError::from_core)?;
    let y_res = compute_persistence(&y, common.k, field).map_err(CliError::from_core)?;

    let (output, tau) = if let Some(cycle_path) = cycle {
        let chain = parse_cycle_file(cycle_path, &field)?;
        let psi = common.psi_override.unwrap_or_else(|| z.scale().len());
        let out = cycle_to_bar(&z, &y, psi, &chain, common.k, field).map_err(CliError::from_core)?;
        (
            BarExtensionOutput { psi, per_class: vec![out], truncated: false },
            None,
        )
    } else {
        let tau = select_bar(&z_res, common.k, bar.unwrap_or(0))?;
        let out = bar_to_bars(
            &z,
            &y,
            &z_res,
            tau,
            BarMode::General,
            common.psi_override,
            common.cap,
        )
        .map_err(CliError::from_core)?;
        (out, Some(tau))
    };
    check_complete(output.truncated, common)?;

    let mut document = new_document(
        common,
        "extend",
        vec![
            json!({"name": file_label(z_path), "sha256": dz}),
            json!({"name": file_label(y_path), "sha256": dy}),
        ],
    );
    document.insert(
        "barcodes".into(),
        json!({
            "z": doc::barcode_json(&z_res, common.k),
            "y": doc::barcode_json(&y_res, common.k),
        }),
    );
    document.insert("selected_bar".into(), tau.map_or(Value::Null, Into::into));
    document.insert("extension".into(), doc::bar_extension_json(&output));
    document.insert(
        "diagnostics".into(),
        json!({"truncated": output.truncated}),
    );

    let mut z_marks = BTreeMap::new();
    if let Some(tau) = tau {
        z_marks.insert(tau, svg::Mark::Baseline);
    }
    let panels = [
        svg::Panel { title: format!("bc_{}(Z)", common.k), res: &z_res, marks: z_marks },
        svg::Panel {
            title: format!("bc_{}(Y)", common.k),
            res: &y_res,
            marks: marks_from_output(&output),
        },
    ];
    finish(document, common, &panels, started)
}

struct AnalogousInputs {
    m_q: barbridge_core::complex::DissimilarityMatrix,
    m_p: barbridge_core::complex::DissimilarityMatrix,
    m_qp: barbridge_core::complex::CrossDissimilarityMatrix,
    echo: Vec<Value>,
}

fn load_analogous_inputs(inputs: &[String], common: &Common) -> Result<AnalogousInputs, CliError> {
    if inputs.len() == 1 && inputs[0].starts_with("gen:") {
        let scenario = gen::generate(&inputs[0][4..], common.seed)?;
        let m_q = io::euclidean(&scenario.q)?;
        let m_p = io::euclidean(&scenario.p)?;
        let m_qp = io::euclidean_cross(&scenario.q, &scenario.p)?;
        let echo = vec![json!({
            "generator": scenario.name,
            "seed": common.seed,
            "sha256": io::table_digest(&scenario.q.iter().chain(&scenario.p).cloned().collect::<Vec<_>>()),
        })];
        return Ok(AnalogousInputs { m_q, m_p, m_qp, echo });
    }
    if common.points {
        if inputs.len() != 2 && inputs.len() != 3 {
            return Err(CliError::input(
                "with --points give two point clouds (cross is computed), or a generator spec",
            ));
        }
        let q = io::read_table(Path::new(&inputs[0]))?;
        let p = io::read_table(Path::new(&inputs[1]))?;
        let echo = vec![
            json!({"name": file_label(Path::new(&inputs[0])), "sha256": io::file_digest(Path::new(&inputs[0]))?}),
            json!({"name": file_label(Path::new(&inputs[1])), "sha256": io::file_digest(Path::new(&inputs[1]))?}),
        ];
        return Ok(AnalogousInputs {
            m_q: io::euclidean(&q)?,
            m_p: io::euclidean(&p)?,
            m_qp: io::euclidean_cross(&q, &p)?,
            echo,
        });
    }
    if inputs.len() != 3 {
        return Err(CliError::input(
            "expected three matrix inputs (Q, P, cross) or a generator spec",
        ));
    }
    let paths: Vec<&Path> = inputs.iter().map(Path::new).collect();
    let m_q = io::square_matrix(&io::read_table(paths[0])?)?;
    let m_p = io::square_matrix(&io::read_table(paths[1])?)?;
    let m_qp = io::rect_matrix(&io::read_table(paths[2])?)?;
    let echo = paths
        .iter()
        .map(|p| Ok(json!({"name": file_label(p), "sha256": io::file_digest(p)?})))
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(AnalogousInputs { m_q, m_p, m_qp, echo })
}

fn cmd_analogous(
    inputs: &[String],
    mode: ModeArg,
    bar: usize,
    common: &Common,
) -> Result<(), CliError> {
    let started = std::time::Instant::now();
    let field = field_of(common)?;
    let loaded = load_analogous_inputs(inputs, common)?;
    if loaded.m_qp.rows() != loaded.m_q.size() || loaded.m_qp.cols() != loaded.m_p.size() {
        return Err(CliError::input(format!(
            "cross matrix is {}x{}, expected {}x{}",
            loaded.m_qp.rows(),
            loaded.m_qp.cols(),
            loaded.m_q.size(),
            loaded.m_p.size()
        )));
    }
    let ctx = build_context(
        &loaded.m_q,
        &loaded.m_p,
        &loaded.m_qp,
        common.k,
        field,
        tie_break(common),
    )
    .map_err(CliError::from_core)?;

    let result = match mode {
        ModeArg::Feature => {
            let tau = select_bar(&ctx.x_q_res, common.k, bar)?;
            feature_centric(&ctx, tau, common.cap).map_err(CliError::from_core)?
        }
        ModeArg::Similarity => {
            let tau = select_bar(&ctx.w_qp_res, common.k, bar)?;
            similarity_centric(&ctx, tau, common.cap).map_err(CliError::from_core)?
        }
    };
    check_complete(result.truncated, common)?;

    let mut document = new_document(common, "analogous", loaded.echo);
    document.insert(
        "barcodes".into(),
        json!({
            "x_q": doc::barcode_json(&ctx.x_q_res, common.k),
            "w_qp": doc::barcode_json(&ctx.w_qp_res, common.k),
            "w_pq": doc::barcode_json(&ctx.w_pq_res, common.k),
            "x_p": doc::barcode_json(&ctx.x_p_res, common.k),
        }),
    );
    let mut payload = Map::new();
    payload.insert(
        "mode".into(),
        match result.mode {
            Mode::Feature => "feature",
            Mode::Similarity => "similarity",
        }
        .into(),
    );
    payload.insert("bar".into(), result.bar.id.into());
    payload.insert(
        "legs".into(),
        Value::Array(
            result
                .legs
                .iter()
                .map(|leg| {
                    json!({
                        "source_grade": leg.source_grade,
                        "eps": doc::num(leg.dual.eps),
                        "dual": doc::chain_json(&leg.dual.dual),
                        "psi": leg.psi,
                        "extension": doc::extension_json(&leg.extension),
                    })
                })
                .collect(),
        ),
    );
    if let Some(q_side) = &result.q_side {
        payload.insert("q_side".into(), doc::bar_extension_json(q_side));
    }
    if let Some((tau_p, p_side)) = &result.p_side {
        payload.insert(
            "p_side".into(),
            json!({"bar": tau_p, "payload": doc::bar_extension_json(p_side)}),
        );
    }
    document.insert("analogous".into(), Value::Object(payload));
    document.insert(
        "diagnostics".into(),
        json!({
            "notes": result.diagnostics,
            "truncated": result.truncated,
        }),
    );

    let mut xq_marks = BTreeMap::new();
    let mut w_marks = BTreeMap::new();
    let mut xp_marks = BTreeMap::new();
    match result.mode {
        Mode::Feature => {
            xq_marks.insert(result.bar.id, svg::Mark::Baseline);
            for leg in &result.legs {
                for g in &leg.extension.grades {
                    if let Some(bars) = &g.bars {
                        for &(_, id) in &bars.baseline.terms {
                            xp_marks.insert(id, svg::Mark::Baseline);
                        }
                        for off in &bars.offsets {
                            for &(_, id) in &off.terms {
                                xp_marks.entry(id).or_insert(svg::Mark::Offset);
                            }
                        }
                    }
                }
            }
        }
        Mode::Similarity => {
            w_marks.insert(result.bar.id, svg::Mark::Baseline);
            if let Some(q_side) = &result.q_side {
                xq_marks = marks_from_output(q_side);
            }
            if let Some((_, p_side)) = &result.p_side {
                xp_marks = marks_from_output(p_side);
            }
        }
    }
    let panels = [
        svg::Panel { title: format!("bc_{}(X_Q)", common.k), res: &ctx.x_q_res, marks: xq_marks },
        svg::Panel { title: format!("bc_{}(W_QP)", common.k), res: &ctx.w_qp_res, marks: w_marks },
        svg::Panel { title: format!("bc_{}(X_P)", common.k), res: &ctx.x_p_res, marks: xp_marks },
    ];
    finish(document, common, &panels, started)
}

fn cmd_dowker_check(input: &Path, common: &Common, threads: usize) -> Result<(), CliError> {
    let started = std::time::Instant::now();
    let field = field_of(common)?;
    let table = io::read_table(input)?;
    let digest = io::file_digest(input)?;
    let b = io::rect_matrix(&table)?;
    let k = common.k;
    let wl = barbridge_core::complex::witness_complex(&b, k + 1).map_err(CliError::from_core)?;
    let ww = barbridge_core::complex::witness_complex(&b.transpose(), k + 1)
        .map_err(CliError::from_core)?;
    let (landmark, witness) = compute_pair(&wl, &ww, k, field, threads)?;
    let check = barcode_check_of(landmark, witness, k);
    println!(
        "dowker check: {}",
        if check.equal { "barcodes equal" } else { "BARCODES DIFFER" }
    );
    let mut document = new_document(
        common,
        "dowker-check",
        vec![json!({"name": file_label(input), "sha256": digest})],
    );
    document.insert(
        "barcodes".into(),
        json!({
            "landmark": doc::barcode_json(&check.landmark, k),
            "witness": doc::barcode_json(&check.witness, k),
        }),
    );
    document.insert("equal".into(), check.equal.into());
    let panels = [
        svg::Panel { title: format!("bc_{}(W(B))", k), res: &check.landmark, marks: BTreeMap::new() },
        svg::Panel { title: format!("bc_{}(W(Bt))", k), res: &check.witness, marks: BTreeMap::new() },
    ];
    finish(document, common, &panels, started)?;
    if !check.equal {
        return Err(CliError {
            code: 3,
            msg: "witness barcodes differ between the two sides".into(),
        });
    }
    Ok(())
}

/// Computes persistence of the two complexes, in parallel when the
/// thread budget allows.
fn compute_pair(
    a: &GradedComplex,
    b: &GradedComplex,
    k: usize,
    field: FieldSpec,
    threads: usize,
) -> Result<(PersistenceResult, PersistenceResult), CliError> {
    if threads >= 2 {
        let (ra, rb) = std::thread::scope(|scope| {
            let ha = scope.spawn(|| compute_persistence(a, k, field));
            let hb = scope.spawn(|| compute_persistence(b, k, field));
            (ha.join().expect("worker"), hb.join().expect("worker"))
        });
        Ok((ra.map_err(CliError::from_core)?, rb.map_err(CliError::from_core)?))
    } else {
        Ok((
            compute_persistence(a, k, field).map_err(CliError::from_core)?,
            compute_persistence(b, k, field).map_err(CliError::from_core)?,
        ))
    }
}
