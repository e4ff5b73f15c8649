//! The Monte Carlo loop: deterministic frame-parallel error counting, the
//! Eb/N0 ↔ ρ conversion, Wilson confidence intervals, and CSV output.
//!
//! Determinism contract: every frame owns a counter-based RNG substream
//! keyed by (grid index, frame index), frames are processed in fixed-size
//! rounds, and partial counters merge by integer addition. The result is
//! byte-identical output for any worker count.

use crate::config::{Resolved, SimConfig};
use crate::schemes::{Counts, Runner};
use crate::SimError;
use noncoh_core::channels::RngStream;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write as _;
use std::path::Path;

/// ρ = η·(Eb/N0): symbol SNR from per-bit SNR in dB at spectral efficiency
/// η bits per channel use. At η = 1 the two axes coincide.
pub fn ebn0_to_rho(ebn0_db: f64, eta: f64) -> f64 {
    assert!(eta > 0.0 && eta.is_finite(), "spectral efficiency must be positive");
    eta * 10f64.powf(ebn0_db / 10.0)
}

/// Inverse of [`ebn0_to_rho`].
pub fn rho_to_ebn0(rho: f64, eta: f64) -> f64 {
    assert!(eta > 0.0 && eta.is_finite(), "spectral efficiency must be positive");
    10.0 * (rho / eta).log10()
}

/// Wilson score interval for a binomial proportion at 95% confidence.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.96f64;
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// One CSV row: the error counts for a single Eb/N0 grid point together
/// with enough context to re-run it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorStats {
    pub scheme: String,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "T")]
    pub t: usize,
    pub constellation: String,
    pub metric: String,
    pub fdts: f64,
    pub ebn0_db: f64,
    pub rho_db: f64,
    pub frames: u64,
    pub bits: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub ber_ci_low: f64,
    pub ber_ci_high: f64,
    pub symbols: u64,
    pub symbol_errors: u64,
    pub ser: f64,
    pub seed: u64,
    pub config_hash: String,
}

/// Frames per parallel work unit and per stop-rule check. The round size
/// quantizes frame counts, so results never depend on worker count.
const CHUNK_FRAMES: u64 = 128;
const ROUND_FRAMES: u64 = 8 * CHUNK_FRAMES;

fn grid_substream(grid_idx: usize, frame_idx: u64) -> u64 {
    debug_assert!(frame_idx < 1 << 40);
    ((grid_idx as u64) << 40) | frame_idx
}

/// Runs the configured schedule over its whole Eb/N0 grid and returns one
/// row per grid point. Configuration errors surface before any frame is
/// simulated; for a fixed seed the rows are identical for any worker count.
pub fn run_ber(cfg: &SimConfig) -> Result<Vec<ErrorStats>, SimError> {
    let resolved = cfg.resolve()?;
    let hash = resolved.content_hash();
    let mut rows = Vec::with_capacity(resolved.config.ebn0_grid_db.len());
    for (grid_idx, &ebn0_db) in resolved.config.ebn0_grid_db.iter().enumerate() {
        let rho = ebn0_to_rho(ebn0_db, resolved.eta);
        let runner = Runner::build(&resolved, rho)?;
        let counts = run_grid_point(&resolved, &runner, grid_idx);
        debug_assert!(
            counts.bit_errors >= resolved.stop.min_bit_errors
                || counts.frames == resolved.stop.max_frames,
            "stop rule violated"
        );
        rows.push(stats_row(&resolved, &hash, ebn0_db, rho, counts));
    }
    if let (Some(first), Some(last)) = (rows.first(), rows.last()) {
        if rows.len() > 1 && last.ber > first.ber && first.bit_errors > 0 {
            eprintln!(
                "warning: BER at {} dB exceeds BER at {} dB; treat this grid as suspect",
                last.ebn0_db, first.ebn0_db
            );
        }
    }
    Ok(rows)
}

fn run_grid_point(resolved: &Resolved, runner: &Runner, grid_idx: usize) -> Counts {
    let stop = resolved.stop;
    let seed = resolved.seed;
    let mut total = Counts::default();
    let mut next_frame = 0u64;
    while total.bit_errors < stop.min_bit_errors && next_frame < stop.max_frames {
        let round = ROUND_FRAMES.min(stop.max_frames - next_frame);
        let round_counts = (0..round as usize)
            .into_par_iter()
            .with_min_len(CHUNK_FRAMES as usize)
            .map(|offset| {
                let mut rng = RngStream::new(
                    seed,
                    grid_substream(grid_idx, next_frame + offset as u64),
                )
                .rng();
                runner.frame(&mut rng)
            })
            .reduce(Counts::default, Counts::merge);
        total = total.merge(round_counts);
        next_frame += round;
    }
    total
}

fn stats_row(
    resolved: &Resolved,
    hash: &str,
    ebn0_db: f64,
    rho: f64,
    c: Counts,
) -> ErrorStats {
    let (ber_ci_low, ber_ci_high) = wilson_interval(c.bit_errors, c.bits);
    ErrorStats {
        scheme: resolved.scheme.name().to_string(),
        m: resolved.m,
        n: resolved.n,
        t: resolved.t,
        constellation: resolved.alphabet_text.clone(),
        metric: resolved.metric.name().to_string(),
        fdts: resolved.fdts,
        ebn0_db,
        rho_db: 10.0 * rho.log10(),
        frames: c.frames,
        bits: c.bits,
        bit_errors: c.bit_errors,
        ber: ratio(c.bit_errors, c.bits),
        ber_ci_low,
        ber_ci_high,
        symbols: c.symbols,
        symbol_errors: c.symbol_errors,
        ser: ratio(c.symbol_errors, c.symbols),
        seed: resolved.seed,
        config_hash: hash.to_string(),
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub const CSV_HEADER: &str = "scheme,M,N,T,constellation,metric,fdts,ebn0_db,rho_db,frames,\
bits,bit_errors,ber,ber_ci_low,ber_ci_high,symbols,symbol_errors,ser,seed,config_hash";

fn io_err(path: &Path, source: std::io::Error) -> SimError {
    SimError::Io { path: path.to_path_buf(), source }
}

/// One row in the exact column order of `CSV_HEADER`, no trailing newline.
pub fn csv_line(r: &ErrorStats) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        r.scheme,
        r.m,
        r.n,
        r.t,
        r.constellation,
        r.metric,
        r.fdts,
        r.ebn0_db,
        r.rho_db,
        r.frames,
        r.bits,
        r.bit_errors,
        r.ber,
        r.ber_ci_low,
        r.ber_ci_high,
        r.symbols,
        r.symbol_errors,
        r.ser,
        r.seed,
        r.config_hash
    )
}

/// Writes rows to `path`. Without `append` the file is created or
/// truncated and starts with the column header; with `append` rows are
/// added and the header is written only if the file does not already
/// contain one, so repeated appends never duplicate it. An empty row set
/// still produces the header.
pub fn write_csv(rows: &[ErrorStats], path: &Path, append: bool) -> Result<(), SimError> {
    let mut body = String::new();
    let needs_header = if append && path.exists() {
        let existing = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        !existing.lines().any(|l| l == CSV_HEADER)
    } else {
        true
    };
    if needs_header {
        body.push_str(CSV_HEADER);
        body.push('\n');
    }
    for r in rows {
        body.push_str(&csv_line(r));
        body.push('\n');
    }
    let mut file = std::fs::OpenOptions::new()
        .create(true)
        .append(append)
        .write(true)
        .truncate(!append)
        .open(path)
        .map_err(|e| io_err(path, e))?;
    file.write_all(body.as_bytes()).map_err(|e| io_err(path, e))?;
    Ok(())
}

/// Reads rows back from a results file. Lines starting with `#` (run
/// metadata) and repeated headers are skipped.
pub fn read_csv(path: &Path) -> Result<Vec<ErrorStats>, SimError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.is_empty() || line.starts_with('#') || line == CSV_HEADER {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 20 {
            return Err(SimError::Config(format!(
                "{}:{}: expected 20 columns, found {}",
                path.display(),
                lineno + 1,
                f.len()
            )));
        }
        let parse_err = |what: &str| {
            SimError::Config(format!("{}:{}: bad {what}", path.display(), lineno + 1))
        };
        rows.push(ErrorStats {
            scheme: f[0].to_string(),
            m: f[1].parse().map_err(|_| parse_err("M"))?,
            n: f[2].parse().map_err(|_| parse_err("N"))?,
            t: f[3].parse().map_err(|_| parse_err("T"))?,
            constellation: f[4].to_string(),
            metric: f[5].to_string(),
            fdts: f[6].parse().map_err(|_| parse_err("fdts"))?,
            ebn0_db: f[7].parse().map_err(|_| parse_err("ebn0_db"))?,
            rho_db: f[8].parse().map_err(|_| parse_err("rho_db"))?,
            frames: f[9].parse().map_err(|_| parse_err("frames"))?,
            bits: f[10].parse().map_err(|_| parse_err("bits"))?,
            bit_errors: f[11].parse().map_err(|_| parse_err("bit_errors"))?,
            ber: f[12].parse().map_err(|_| parse_err("ber"))?,
            ber_ci_low: f[13].parse().map_err(|_| parse_err("ber_ci_low"))?,
            ber_ci_high: f[14].parse().map_err(|_| parse_err("ber_ci_high"))?,
            symbols: f[15].parse().map_err(|_| parse_err("symbols"))?,
            symbol_errors: f[16].parse().map_err(|_| parse_err("symbol_errors"))?,
            ser: f[17].parse().map_err(|_| parse_err("ser"))?,
            seed: f[18].parse().map_err(|_| parse_err("seed"))?,
            config_hash: f[19].to_string(),
        });
    }
    Ok(rows)
}

/// Log-linear interpolation of the Eb/N0 value where the BER curve crosses
/// `target`; `None` when the curve never brackets it. Rows must be sorted
/// by `ebn0_db` ascending.
pub fn ebn0_at_ber(rows: &[ErrorStats], target: f64) -> Option<f64> {
    for w in rows.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.ber <= 0.0 || b.ber <= 0.0 {
            continue;
        }
        let (hi, lo) = (a.ber.max(b.ber), a.ber.min(b.ber));
        if target <= hi && target >= lo && a.ber != b.ber {
            let (la, lb, lt) = (a.ber.log10(), b.ber.log10(), target.log10());
            return Some(a.ebn0_db + (lt - la) / (lb - la) * (b.ebn0_db - a.ebn0_db));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{AlphabetSpec, ChannelSpec, Scheme, SimConfig, StopRule};

    fn tiny_cfg() -> SimConfig {
        SimConfig {
            scheme: Scheme::DpskMsdd,
            m: None,
            n: None,
            t: Some(2),
            constellation: vec![AlphabetSpec::Psk { q: 4 }],
            metric: None,
            mode: None,
            code: None,
            dustm: None,
            channel: ChannelSpec::Rbf,
            ebn0_grid_db: vec![0.0, 20.0],
            frame_len: None,
            stop: StopRule { min_bit_errors: 50, max_frames: 4000 },
            seed: 99,
            genie_amplitude: false,
            disable_noise: false,
        }
    }

    #[test]
    fn rho_conversion_examples_and_round_trip() {
        assert!((ebn0_to_rho(10.0, 2.0) - 20.0).abs() < 1e-12);
        assert_eq!(ebn0_to_rho(7.0, 1.0), 10f64.powf(0.7));
        for &db in &[-3.0, 0.0, 8.5, 30.0] {
            for &eta in &[0.5, 1.0, 4.0] {
                assert!((rho_to_ebn0(ebn0_to_rho(db, eta), eta) - db).abs() < 1e-12);
            }
        }
    }

    #[test]
    #[should_panic(expected = "positive")]
    fn rho_conversion_rejects_nonpositive_eta() {
        ebn0_to_rho(10.0, 0.0);
    }

    #[test]
    fn wilson_interval_brackets_the_point_estimate() {
        for &(k, n) in &[(0u64, 100u64), (1, 100), (50, 100), (100, 100), (0, 0)] {
            let (lo, hi) = wilson_interval(k, n);
            assert!(lo >= 0.0 && hi <= 1.0 && lo <= hi);
            if n > 0 {
                let p = k as f64 / n as f64;
                assert!(lo <= p + 1e-12 && p <= hi + 1e-12);
            }
        }
        let (lo, hi) = wilson_interval(5, 1000);
        assert!(lo > 0.0 && hi < 0.02);
    }

    #[test]
    fn rows_respect_the_stop_rule() {
        let rows = run_ber(&tiny_cfg()).unwrap();
        for r in &rows {
            assert!(r.bit_errors >= 50 || r.frames == 4000, "row {r:?}");
            assert!(r.ber >= r.ber_ci_low && r.ber <= r.ber_ci_high);
        }
        assert!(rows[1].ber < rows[0].ber, "20 dB should beat 0 dB");
    }

    #[test]
    fn fixed_seed_reruns_are_identical() {
        let a = run_ber(&tiny_cfg()).unwrap();
        let b = run_ber(&tiny_cfg()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let cfg = tiny_cfg();
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_ber(&cfg).unwrap());
        let four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| run_ber(&cfg).unwrap());
        assert_eq!(one, four);
    }

    #[test]
    fn csv_round_trip_append_and_header_dedup() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rows.csv");
        let rows = run_ber(&tiny_cfg()).unwrap();
        write_csv(&rows, &path, false).unwrap();
        let back = read_csv(&path).unwrap();
        assert_eq!(back, rows);
        write_csv(&rows, &path, true).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().filter(|l| *l == CSV_HEADER).count(), 1);
        assert_eq!(read_csv(&path).unwrap().len(), 2 * rows.len());
    }

    #[test]
    fn empty_row_set_writes_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        write_csv(&[], &path, false).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), format!("{CSV_HEADER}\n"));
        assert!(read_csv(&path).unwrap().is_empty());
    }

    #[test]
    fn io_errors_carry_the_path() {
        let missing = Path::new("/definitely/not/here/out.csv");
        let e = write_csv(&[], missing, false).unwrap_err();
        assert!(e.to_string().contains("/definitely/not/here/out.csv"), "{e}");
        let e = read_csv(missing).unwrap_err();
        assert!(e.to_string().contains("out.csv"), "{e}");
    }

    #[test]
    fn crossing_interpolation_finds_the_target() {
        let mut rows = run_ber(&tiny_cfg()).unwrap();
        rows[0].ber = 1e-1;
        rows[1].ber = 1e-3;
        rows[0].ebn0_db = 0.0;
        rows[1].ebn0_db = 20.0;
        let x = ebn0_at_ber(&rows, 1e-2).unwrap();
        assert!((x - 10.0).abs() < 1e-9);
        assert!(ebn0_at_ber(&rows, 1e-6).is_none());
    }
}
