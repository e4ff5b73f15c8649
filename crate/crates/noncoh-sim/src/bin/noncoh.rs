//! Command-line front end over the simulation workbench: BER sweeps from
//! JSON configs, design searches, codebook analysis, structural
//! validation, and constellation export.
//!
//! Exit codes: 0 success, 1 failed validation checks, 2 configuration or
//! parse error, 3 capability guard, 4 I/O error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use noncoh_core::alphabets::{self, BuildSpec};
use noncoh_core::cxmat::{self, CMatrix};
use noncoh_core::design_analysis::{
    distance_spectrum, grid_search, mdc_min_det, search_mdc_8qam, Grid, SearchObjective,
};
use noncoh_core::dustm::{make_cyclic, search_u};
use noncoh_core::stcodes::{
    assemble, assemble_ab, gram, gram_closed_form, make_code, validate_mdc, validate_ostbc,
    CodeKind, STCode,
};
use noncoh_core::Complex64;
use noncoh_sim::audit::{code_to_json, constellation_to_json, report_to_json};
use noncoh_sim::config::fnv1a64;
use noncoh_sim::harness::{csv_line, CSV_HEADER};
use noncoh_sim::{run_ber, write_csv, AlphabetSpec, SimConfig, SimError};
use serde_json::{json, Value};

/// Codebooks larger than this are refused by `analyze-code`; the pairwise
/// scan is quadratic in the codebook size.
const ANALYZE_LIMIT: u64 = 4096;

#[derive(Parser)]
#[command(
    name = "noncoh",
    version,
    about = "Differential and non-coherent transmission workbench",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a Monte Carlo BER/SER sweep described by a JSON config file.
    Sim {
        /// Path to the JSON simulation config.
        #[arg(short, long)]
        config: PathBuf,
        /// Override a config field before the run, e.g. `stop.max_frames=5000`
        /// or `channel.kind=rbf`. Dotted paths descend into objects and
        /// 0-based array indices; values parse as JSON, else as strings.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Replace the config seed for this run.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker thread count (default: all cores). Results do not depend
        /// on this.
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Append to --out instead of truncating it.
        #[arg(long)]
        append: bool,
    },
    /// Exhaustive diagonal-codebook exponent search maximizing coding gain.
    SearchU {
        /// Transmit antennas (diagonal entries per generator).
        #[arg(long)]
        m: usize,
        /// Codebook size.
        #[arg(long)]
        l: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        append: bool,
    },
    /// Sweep the two-ring amplitude ratio of a phase/amplitude alphabet by
    /// simulated BER at one Eb/N0 point.
    SearchRing {
        /// Total alphabet order (2 amplitude circles, q/2 phases).
        #[arg(long, default_value_t = 16)]
        q: usize,
        /// Ratio grid as start:stop:step.
        #[arg(long, default_value = "1.2:3.2:0.1")]
        grid: String,
        #[arg(long, default_value_t = 18.0)]
        ebn0: f64,
        /// Simulated information bits per grid point.
        #[arg(long, default_value_t = 200_000)]
        bits_per_point: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        append: bool,
    },
    /// Scan the rotation angle of a square QAM grid under the
    /// component-interleaved minimum-determinant objective.
    SearchRotation {
        /// Angle grid in degrees as start:stop:step, within [0, 90).
        #[arg(long, default_value = "0:45:0.01")]
        grid: String,
        /// QAM order.
        #[arg(long, default_value_t = 16)]
        q: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        append: bool,
    },
    /// Scan both ring rotations of the two-ring 8-point set at a fixed
    /// radius ratio under the same minimum-determinant objective.
    #[command(name = "search-8qam")]
    Search8qam {
        /// Radius ratio of the outer to the inner circle.
        #[arg(long, default_value_t = 1.37)]
        r: f64,
        /// Angle step in degrees.
        #[arg(long, default_value_t = 0.25)]
        step: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        append: bool,
    },
    /// Distance spectrum and diversity/coding-gain report for a codebook:
    /// either a block code over an alphabet, or a cyclic diagonal group.
    AnalyzeCode {
        /// Block code: alamouti | th4 | mdc4 | mdc8.
        #[arg(long, conflicts_with_all = ["cyclic_u", "cyclic_l"])]
        stbc: Option<String>,
        /// Alphabet per symbol, comma-separated if mixed: qam16 | psk4 |
        /// circ8 | omdc4 | omdc8 | rot13.28(qam16) | inline JSON.
        #[arg(long, requires = "stbc")]
        alphabet: Option<String>,
        /// Cyclic diagonal exponents, comma-separated (e.g. 1,7).
        #[arg(long, requires = "cyclic_l")]
        cyclic_u: Option<String>,
        /// Cyclic codebook size.
        #[arg(long, requires = "cyclic_u")]
        cyclic_l: Option<usize>,
        /// Receive antennas entering the diversity order.
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the structural property suite and print a pass/fail table.
    Validate,
    /// Print a constellation (points, labels, energies) as JSON.
    EmitConstellation {
        /// Alphabet spec, same grammar as analyze-code --alphabet.
        #[arg(long)]
        spec: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                SimError::Config(_) => 2,
                SimError::Capability(_) => 3,
                SimError::Io { .. } => 4,
            };
            ExitCode::from(code)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, SimError> {
    match cli.cmd {
        Cmd::Sim { config, set, seed, workers, out, append } => {
            cmd_sim(&config, &set, seed, workers, out.as_deref(), append)
        }
        Cmd::SearchU { m, l, out, append } => cmd_search_u(m, l, out.as_deref(), append),
        Cmd::SearchRing { q, grid, ebn0, bits_per_point, seed, out, append } => {
            cmd_search_ring(q, &grid, ebn0, bits_per_point, seed, out.as_deref(), append)
        }
        Cmd::SearchRotation { grid, q, out, append } => {
            cmd_search_rotation(&grid, q, out.as_deref(), append)
        }
        Cmd::Search8qam { r, step, out, append } => cmd_search_8qam(r, step, out.as_deref(), append),
        Cmd::AnalyzeCode { stbc, alphabet, cyclic_u, cyclic_l, n, out } => {
            cmd_analyze(stbc, alphabet, cyclic_u, cyclic_l, n, out.as_deref())
        }
        Cmd::Validate => Ok(cmd_validate()),
        Cmd::EmitConstellation { spec, out } => cmd_emit_constellation(&spec, out.as_deref()),
    }
}

fn config_err(msg: impl Into<String>) -> SimError {
    SimError::Config(msg.into())
}

fn io_err(path: &Path, source: std::io::Error) -> SimError {
    SimError::Io { path: path.to_path_buf(), source }
}

/// Writes to `out` (truncating unless `append`) or to stdout.
fn emit(out: Option<&Path>, append: bool, text: &str) -> Result<(), SimError> {
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => {
            use std::io::Write;
            let mut f = std::fs::OpenOptions::new()
                .create(true)
                .write(true)
                .append(append)
                .truncate(!append)
                .open(path)
                .map_err(|e| io_err(path, e))?;
            f.write_all(text.as_bytes()).map_err(|e| io_err(path, e))
        }
    }
}

/// Comment header identifying a run: the fully resolved parameters and a
/// content hash over them, so every output file is self-describing.
fn run_header(resolved_params: &Value) -> String {
    let text = serde_json::to_string(resolved_params).expect("parameters serialize");
    format!("# config: {text}\n# config_hash: {:016x}\n", fnv1a64(text.as_bytes()))
}

// ---------------------------------------------------------------- sim --

fn cmd_sim(
    config_path: &Path,
    overrides: &[String],
    seed: Option<u64>,
    workers: Option<usize>,
    out: Option<&Path>,
    append: bool,
) -> Result<ExitCode, SimError> {
    let raw = std::fs::read_to_string(config_path).map_err(|e| io_err(config_path, e))?;
    let mut value: Value = serde_json::from_str(&raw)
        .map_err(|e| config_err(format!("{}: {e}", config_path.display())))?;
    for spec in overrides {
        apply_override(&mut value, spec)?;
    }
    let mut cfg: SimConfig = serde_json::from_value(value)
        .map_err(|e| config_err(format!("{}: {e}", config_path.display())))?;
    if let Some(s) = seed {
        cfg.seed = s;
    }

    // Resolve up front: config rejections precede any simulation work and
    // the header wants the defaults made explicit.
    let resolved = cfg.resolve()?;
    let header = format!(
        "# config: {}\n# config_hash: {}\n# axes: rho = eta*Eb/N0 with eta = {} \
         bit per channel use; rho_db = ebn0_db + 10*log10(eta)\n",
        resolved.resolved_json(),
        resolved.content_hash(),
        resolved.eta,
    );

    let rows = match workers {
        None => run_ber(&cfg)?,
        Some(w) => {
            if w == 0 {
                return Err(config_err("--workers must be at least 1"));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| config_err(format!("thread pool: {e}")))?;
            pool.install(|| run_ber(&cfg))?
        }
    };

    match out {
        None => {
            let mut text = header;
            text.push_str(CSV_HEADER);
            text.push('\n');
            for r in &rows {
                text.push_str(&csv_line(r));
                text.push('\n');
            }
            emit(None, false, &text)?;
        }
        Some(path) => {
            // Comment block first (fresh file unless --append), then rows;
            // the writer adds the column header only when missing.
            emit(Some(path), append, &header)?;
            write_csv(&rows, path, true)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// Sets one `key=value` override inside the parsed config. Dotted path
/// segments descend into objects (created on demand) and into arrays by
/// 0-based index; the value is parsed as JSON when possible, else kept as
/// a string.
fn apply_override(root: &mut Value, spec: &str) -> Result<(), SimError> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| config_err(format!("override '{spec}' must look like key=value")))?;
    if path.is_empty() {
        return Err(config_err(format!("override '{spec}' has an empty key")));
    }
    let leaf: Value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let segments: Vec<&str> = path.split('.').collect();
    let (last, init) = segments.split_last().expect("split checked nonempty");
    let mut cur = root;
    for (i, seg) in init.iter().enumerate() {
        let here = || segments[..=i].join(".");
        cur = if let Ok(idx) = seg.parse::<usize>() {
            let arr = cur
                .as_array_mut()
                .ok_or_else(|| config_err(format!("'{}' does not index an array", here())))?;
            arr.get_mut(idx)
                .ok_or_else(|| config_err(format!("'{}' is out of bounds", here())))?
        } else {
            let obj = cur
                .as_object_mut()
                .ok_or_else(|| config_err(format!("'{}' does not name an object field", here())))?;
            obj.entry(seg.to_string()).or_insert(Value::Object(Default::default()))
        };
    }
    if let Ok(idx) = last.parse::<usize>() {
        let arr = cur
            .as_array_mut()
            .ok_or_else(|| config_err(format!("'{path}' does not index an array")))?;
        *arr.get_mut(idx)
            .ok_or_else(|| config_err(format!("'{path}' is out of bounds")))? = leaf;
    } else {
        let obj = cur
            .as_object_mut()
            .ok_or_else(|| config_err(format!("'{path}' does not name an object field")))?;
        obj.insert(last.to_string(), leaf);
    }
    Ok(())
}

// ----------------------------------------------------------- searches --

/// Parses a `start:stop:step` grid description.
fn parse_grid(text: &str) -> Result<(f64, f64, f64), SimError> {
    let parts: Vec<&str> = text.split(':').collect();
    let [start, stop, step] = parts[..] else {
        return Err(config_err(format!("grid '{text}' must look like start:stop:step")));
    };
    let parse = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| config_err(format!("grid '{text}' has a non-numeric part '{s}'")))
    };
    let (start, stop, step) = (parse(start)?, parse(stop)?, parse(step)?);
    if !(step > 0.0 && stop >= start && start.is_finite() && stop.is_finite()) {
        return Err(config_err(format!("grid '{text}' must ascend with a positive step")));
    }
    Ok((start, stop, step))
}

fn grid_axis(start: f64, stop: f64, step: f64) -> Vec<f64> {
    // Inclusive endpoint up to float slack, mirroring the design module.
    let count = ((stop - start) / step + 1.5).floor() as usize;
    (0..count).map(|i| start + i as f64 * step).collect()
}

fn cmd_search_u(m: usize, l: usize, out: Option<&Path>, append: bool) -> Result<ExitCode, SimError> {
    let found = search_u(m, l)?;
    let params = json!({"command": "search-u", "m": m, "l": l});
    let mut text = run_header(&params);
    text.push_str("m,l,u,coding_gain,candidates_scanned\n");
    let u_text =
        found.u.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("-");
    let _ = writeln!(text, "{m},{l},{u_text},{},{}", found.coding_gain, found.candidates_scanned);
    emit(out, append, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_search_ring(
    q: usize,
    grid: &str,
    ebn0: f64,
    bits_per_point: u64,
    seed: u64,
    out: Option<&Path>,
    append: bool,
) -> Result<ExitCode, SimError> {
    let (start, stop, step) = parse_grid(grid)?;
    if start <= 1.0 {
        return Err(config_err("ring ratios must exceed 1"));
    }
    let ratios = grid_axis(start, stop, step);
    let search = noncoh_sim::searches::BerSearch { ebn0_db: ebn0, bits_per_point, seed };
    let outcome = noncoh_sim::searches::search_ring_ratio(q, &ratios, &search)?;
    let params = json!({
        "command": "search-ring", "q": q, "grid": grid, "ebn0_db": ebn0,
        "bits_per_point": bits_per_point, "seed": seed,
    });
    let mut text = run_header(&params);
    let _ = writeln!(text, "# argmin: a = {:.4}, ber = {:.6e}", outcome.best_params[0], outcome.best_value);
    text.push_str("a,ber\n");
    for (p, v) in &outcome.trace {
        let _ = writeln!(text, "{:.4},{}", p[0], v);
    }
    emit(out, append, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_search_rotation(
    grid: &str,
    q: usize,
    out: Option<&Path>,
    append: bool,
) -> Result<ExitCode, SimError> {
    let (start, stop, step) = parse_grid(grid)?;
    if !(0.0..90.0).contains(&start) || stop >= 90.0 {
        return Err(config_err("rotation grid must stay within [0, 90) degrees"));
    }
    let base = alphabets::rect_qam(q)?;
    let axis_deg = grid_axis(start, stop, step);
    let g = Grid::new(vec![axis_deg])?;
    let outcome = grid_search(SearchObjective::QamRotation, &g, g.len(), |p| {
        let c = alphabets::rotated(&base, p[0].to_radians()).expect("grid stays in range");
        mdc_min_det(&c, 4, 4).0
    });
    let params = json!({"command": "search-rotation", "q": q, "grid": grid});
    let mut text = run_header(&params);
    let _ = writeln!(
        text,
        "# argmax: theta_deg = {:.4}, min_det = {:.6e}",
        outcome.best_params[0], outcome.best_value
    );
    text.push_str("theta_deg,min_det\n");
    for (p, v) in &outcome.trace {
        let _ = writeln!(text, "{},{}", p[0], v);
    }
    emit(out, append, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_search_8qam(
    r: f64,
    step: f64,
    out: Option<&Path>,
    append: bool,
) -> Result<ExitCode, SimError> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(config_err("--step must be positive"));
    }
    let outcome = search_mdc_8qam(r, step)?;
    let params = json!({"command": "search-8qam", "r": r, "step_deg": step});
    let mut text = run_header(&params);
    let _ = writeln!(
        text,
        "# argmax: theta1_deg = {:.4}, theta2_deg = {:.4}, min_det = {:.6e}",
        outcome.best_params[0].to_degrees(),
        outcome.best_params[1].to_degrees(),
        outcome.best_value
    );
    text.push_str("theta1_deg,theta2_deg,min_det\n");
    for (p, v) in &outcome.trace {
        let _ = writeln!(text, "{:.4},{:.4},{}", p[0].to_degrees(), p[1].to_degrees(), v);
    }
    emit(out, append, &text)?;
    Ok(ExitCode::SUCCESS)
}

// ----------------------------------------------------------- analysis --

/// Alphabet grammar shared by analyze-code and emit-constellation:
/// `pskQ`, `qamQ`, `circ8`, `omdc4`, `omdc8`, `mdc8qam(r,t1,t2)`,
/// `rotDEG(inner)`, or an inline JSON spec.
fn parse_alphabet(text: &str) -> Result<AlphabetSpec, SimError> {
    let t = text.trim();
    if t.starts_with('{') {
        return serde_json::from_str(t).map_err(|e| config_err(format!("alphabet '{t}': {e}")));
    }
    let bad = || config_err(format!("unrecognized alphabet '{t}'"));
    if let Some(rest) = t.strip_prefix("rot") {
        let (deg, inner) = rest.split_once('(').ok_or_else(bad)?;
        let inner = inner.strip_suffix(')').ok_or_else(bad)?;
        let theta_deg: f64 = deg.parse().map_err(|_| bad())?;
        return Ok(AlphabetSpec::Rotated { theta_deg, base: Box::new(parse_alphabet(inner)?) });
    }
    if let Some(rest) = t.strip_prefix("mdc8qam(") {
        let rest = rest.strip_suffix(')').ok_or_else(bad)?;
        let parts: Vec<&str> = rest.split(',').collect();
        let [r, t1, t2] = parts[..] else { return Err(bad()) };
        return Ok(AlphabetSpec::Mdc8Qam {
            r: r.trim().parse().map_err(|_| bad())?,
            theta1_deg: t1.trim().parse().map_err(|_| bad())?,
            theta2_deg: t2.trim().parse().map_err(|_| bad())?,
        });
    }
    if let Some(q) = t.strip_prefix("psk") {
        return Ok(AlphabetSpec::Psk { q: q.parse().map_err(|_| bad())? });
    }
    if let Some(q) = t.strip_prefix("qam") {
        return Ok(AlphabetSpec::RectQam { q: q.parse().map_err(|_| bad())? });
    }
    match t {
        "circ8" => Ok(AlphabetSpec::Circ8Qam),
        "omdc4" => Ok(AlphabetSpec::Omdc4),
        "omdc8" => Ok(AlphabetSpec::Omdc8),
        _ => Err(bad()),
    }
}

fn parse_code_kind(text: &str) -> Result<CodeKind, SimError> {
    match text {
        "alamouti" => Ok(CodeKind::Alamouti),
        "th4" => Ok(CodeKind::Th4),
        "mdc4" => Ok(CodeKind::Mdc4),
        "mdc8" => Ok(CodeKind::Mdc8),
        other => Err(config_err(format!(
            "unknown code '{other}' (expected alamouti, th4, mdc4, or mdc8)"
        ))),
    }
}

/// Every codeword of a block code over per-symbol alphabets, refusing
/// products beyond the quadratic-scan budget.
fn enumerate_codebook(
    code: &STCode,
    specs: &[AlphabetSpec],
) -> Result<Vec<CMatrix>, SimError> {
    let k = code.symbols_per_block();
    let constellations: Vec<_> = match specs.len() {
        1 => vec![specs[0].build()?; k],
        n if n == k => specs.iter().map(|s| s.build()).collect::<Result<_, _>>()?,
        n => {
            return Err(config_err(format!(
                "expected 1 or {k} alphabets for this code, got {n}"
            )))
        }
    };
    let mut total: u64 = 1;
    for c in &constellations {
        total = total.saturating_mul(c.size() as u64);
        if total > ANALYZE_LIMIT {
            return Err(SimError::Capability(format!(
                "codebook of more than {ANALYZE_LIMIT} words; the pairwise scan is quadratic"
            )));
        }
    }
    let mut codebook = Vec::with_capacity(total as usize);
    let mut symbols = vec![Complex64::new(0.0, 0.0); k];
    for index in 0..total {
        let mut rem = index as usize;
        for (slot, c) in symbols.iter_mut().zip(&constellations) {
            *slot = c.point(rem % c.size());
            rem /= c.size();
        }
        codebook.push(assemble(code, &symbols)?);
    }
    Ok(codebook)
}

fn cmd_analyze(
    stbc: Option<String>,
    alphabet: Option<String>,
    cyclic_u: Option<String>,
    cyclic_l: Option<usize>,
    n: usize,
    out: Option<&Path>,
) -> Result<ExitCode, SimError> {
    if n == 0 {
        return Err(config_err("--n must be at least 1"));
    }
    let mut doc = serde_json::Map::new();
    let params;
    let codebook: Vec<CMatrix> = match (&stbc, &cyclic_u, cyclic_l) {
        (Some(kind_text), _, None) => {
            let kind = parse_code_kind(kind_text)?;
            let code = make_code(kind);
            let alphabet = alphabet
                .as_deref()
                .ok_or_else(|| config_err("--stbc needs --alphabet"))?;
            let specs: Vec<AlphabetSpec> = alphabet
                .split(',')
                .map(parse_alphabet)
                .collect::<Result<_, _>>()?;
            params = json!({
                "command": "analyze-code", "stbc": kind_text, "alphabet": alphabet, "n": n,
            });
            doc.insert("code".into(), code_to_json(&code));
            enumerate_codebook(&code, &specs)?
        }
        (None, Some(u_text), Some(l)) => {
            let u: Vec<usize> = u_text
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|_| config_err(format!("exponents '{u_text}' must be integers")))?;
            if l as u64 > ANALYZE_LIMIT {
                return Err(SimError::Capability(format!(
                    "codebook of more than {ANALYZE_LIMIT} words; the pairwise scan is quadratic"
                )));
            }
            let code = make_cyclic(&u, l)?;
            params = json!({"command": "analyze-code", "cyclic_u": u, "cyclic_l": l, "n": n});
            (0..l).map(|i| code.power(i)).collect()
        }
        _ => {
            return Err(config_err(
                "analyze-code needs either --stbc with --alphabet, or --cyclic-u with --cyclic-l",
            ))
        }
    };
    let report = distance_spectrum(&codebook, n, 1e-9);
    doc.insert("report".into(), report_to_json(&report));

    let text = format!(
        "{}{}\n",
        run_header(&params),
        serde_json::to_string_pretty(&Value::Object(doc)).expect("report serializes")
    );
    emit(out, false, &text)?;
    Ok(ExitCode::SUCCESS)
}

// --------------------------------------------------------- validation --

struct CheckRow {
    name: String,
    pass: bool,
}

fn push_report(rows: &mut Vec<CheckRow>, prefix: &str, report: &noncoh_core::stcodes::ValidationReport) {
    for check in &report.checks {
        rows.push(CheckRow { name: format!("{prefix}: {}", check.name), pass: check.pass });
    }
}

/// Structural suite over everything cheap and exact: dispersion-family
/// properties, dual assembly agreement, the closed Gram form, diagonal
/// group closure, and constellation invariants.
fn cmd_validate() -> ExitCode {
    let mut rows: Vec<CheckRow> = Vec::new();
    let tol = 1e-12;

    // Probe symbols with irrational angles so structural identities cannot
    // pass by coincidence.
    let probe = |k: usize| -> Vec<Complex64> {
        (0..k)
            .map(|i| Complex64::from_polar(0.6 + 0.45 * i as f64, 0.71 + 1.13 * i as f64))
            .collect()
    };

    for kind in [CodeKind::Alamouti, CodeKind::Th4, CodeKind::Mdc4, CodeKind::Mdc8] {
        let code = make_code(kind);
        let label = match kind {
            CodeKind::Alamouti => "alamouti",
            CodeKind::Th4 => "th4",
            CodeKind::Mdc4 => "mdc4",
            CodeKind::Mdc8 => "mdc8",
        };
        match kind {
            CodeKind::Alamouti | CodeKind::Th4 => {
                push_report(&mut rows, label, &validate_ostbc(&code))
            }
            CodeKind::Mdc4 | CodeKind::Mdc8 => push_report(&mut rows, label, &validate_mdc(&code)),
        }

        let symbols = probe(code.symbols_per_block());
        let direct = assemble(&code, &symbols).expect("probe symbol count matches");
        let dual = assemble_ab(&code, &symbols).expect("probe symbol count matches");
        rows.push(CheckRow {
            name: format!("{label}: dual dispersion forms agree"),
            pass: direct.max_abs_diff(&dual) < tol,
        });

        // The two-scalar closed Gram form exists for the
        // component-interleaved codes only.
        if matches!(kind, CodeKind::Mdc4 | CodeKind::Mdc8) {
            let (form, product) = gram(&code, &symbols).expect("probe symbol count matches");
            let closed = gram_closed_form(&code, form);
            rows.push(CheckRow {
                name: format!("{label}: closed gram form matches the product"),
                pass: closed.max_abs_diff(&product) < tol,
            });
        }
    }

    // Distance matrices of the 2-antenna orthogonal code stay proportional
    // to the identity over the exhaustive quaternary alphabet.
    {
        let code = make_code(CodeKind::Alamouti);
        let qpsk = alphabets::psk(4).expect("quaternary alphabet builds");
        let mut words = Vec::new();
        for i in 0..4 {
            for k in 0..4 {
                words.push(
                    assemble(&code, &[qpsk.point(i), qpsk.point(k)]).expect("two symbols"),
                );
            }
        }
        let mut pass = true;
        for a in 0..words.len() {
            for b in (a + 1)..words.len() {
                let d = words[a].sub(&words[b]);
                let dd = cxmat::matmul(&d.conj().transpose(), &d);
                let lead = dd.get(0, 0);
                let scaled = CMatrix::identity(2).scale(lead);
                if dd.max_abs_diff(&scaled) > tol {
                    pass = false;
                }
            }
        }
        rows.push(CheckRow {
            name: "alamouti: distance matrices proportional to identity (quaternary, exhaustive)"
                .into(),
            pass,
        });
    }

    // Diagonal group closure: powers multiply by exponent addition mod L.
    {
        let code = make_cyclic(&[1, 7], 16).expect("exponents are valid");
        let mut pass = true;
        for a in 0..16 {
            for b in 0..16 {
                let prod = cxmat::matmul(&code.power(a), &code.power(b));
                if prod.max_abs_diff(&code.power((a + b) % 16)) > tol {
                    pass = false;
                }
            }
        }
        rows.push(CheckRow { name: "cyclic [1,7] l=16: group closure".into(), pass });
        rows.push(CheckRow {
            name: "cyclic [1,7] l=16: generator order divides l".into(),
            pass: code.power(16).max_abs_diff(&CMatrix::identity(2)) < tol,
        });
    }

    // Constellation invariants: unit mean energy, labels a permutation.
    let alphabet_specs: Vec<(&str, BuildSpec)> = vec![
        ("psk4", BuildSpec::Psk { q: 4 }),
        ("psk16", BuildSpec::Psk { q: 16 }),
        ("dapsk 8x2 a=2.1", BuildSpec::Dapsk { q_p: 8, q_a: 2, a: 2.1 }),
        ("qam16", BuildSpec::RectQam { q: 16 }),
        ("qam64", BuildSpec::RectQam { q: 64 }),
        ("circ8", BuildSpec::Circ8Qam),
        ("omdc4", BuildSpec::Omdc4),
        ("omdc8", BuildSpec::Omdc8),
        (
            "mdc 8qam optimum",
            BuildSpec::Mdc8Qam {
                r: alphabets::MDC_8QAM_RADIUS_RATIO,
                theta1: alphabets::MDC_8QAM_THETA1_DEG.to_radians(),
                theta2: alphabets::MDC_8QAM_THETA2_DEG.to_radians(),
            },
        ),
        (
            "rotated qam16",
            BuildSpec::Rotated {
                base: Box::new(BuildSpec::RectQam { q: 16 }),
                theta: alphabets::optimal_qam_rotation(),
            },
        ),
    ];
    for (label, spec) in &alphabet_specs {
        match alphabets::build(spec) {
            Err(_) => rows.push(CheckRow { name: format!("{label}: builds"), pass: false }),
            Ok(c) => {
                let energy_ok = (c.avg_energy() - 1.0).abs() < 1e-9;
                let mut seen = vec![false; c.size()];
                for &l in c.labels() {
                    if let Some(slot) = seen.get_mut(l as usize) {
                        *slot = true;
                    }
                }
                rows.push(CheckRow {
                    name: format!("{label}: unit mean energy, labels a permutation"),
                    pass: energy_ok && seen.iter().all(|&s| s),
                });
            }
        }
    }

    let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut all_pass = true;
    for row in &rows {
        let status = if row.pass { "pass" } else { "FAIL" };
        println!("{:width$}  {status}", row.name);
        all_pass &= row.pass;
    }
    println!("{:width$}  {}", "overall", if all_pass { "pass" } else { "FAIL" });
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

// ------------------------------------------------------ constellation --

fn cmd_emit_constellation(spec: &str, out: Option<&Path>) -> Result<ExitCode, SimError> {
    let alphabet = parse_alphabet(spec)?;
    let c = alphabet.build()?;
    let params = json!({"command": "emit-constellation", "spec": spec});
    let text = format!(
        "{}{}\n",
        run_header(&params),
        serde_json::to_string_pretty(&constellation_to_json(&c)).expect("constellation serializes")
    );
    emit(out, false, &text)?;
    Ok(ExitCode::SUCCESS)
}
