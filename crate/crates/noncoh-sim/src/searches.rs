//! Simulation-backed design searches: parameter sweeps whose objective is
//! a measured bit error rate. Every grid point reuses the same seed, so
//! the comparison runs under common random numbers and the argmin is
//! stable run to run.

use crate::config::{AlphabetSpec, ChannelSpec, Scheme, SimConfig, StopRule};
use crate::harness::run_ber;
use crate::SimError;
use noncoh_core::design_analysis::{grid_search, Grid, SearchObjective, SearchOutcome};

/// Shared knobs for a BER-objective sweep.
#[derive(Debug, Clone, Copy)]
pub struct BerSearch {
    pub ebn0_db: f64,
    /// Bit budget per grid point; the frame budget is derived from it.
    pub bits_per_point: u64,
    pub seed: u64,
}

impl Default for BerSearch {
    fn default() -> Self {
        BerSearch { ebn0_db: 18.0, bits_per_point: 200_000, seed: 1 }
    }
}

fn measure(cfg: &SimConfig) -> f64 {
    match run_ber(cfg) {
        Ok(rows) => rows[0].ber,
        // An invalid grid point never wins a minimization.
        Err(_) => f64::INFINITY,
    }
}

/// Sweeps the DAPSK ring ratio `a` for a 2×q/2-partition alphabet of order
/// `q` at one Eb/N0 point, measuring conventional two-symbol differential
/// detection over the random-phase AWGN channel. Returns the full trace
/// with the best (lowest BER) ratio.
pub fn search_ring_ratio(
    q: usize,
    ratios: &[f64],
    s: &BerSearch,
) -> Result<SearchOutcome, SimError> {
    if ratios.is_empty() {
        return Err(SimError::Config("ratio grid must be nonempty".into()));
    }
    let q_a = 2usize;
    let q_p = q / q_a;
    if q_p * q_a != q || q_p < 2 {
        return Err(SimError::Config(format!("alphabet order {q} does not split as {q_a}·q_p")));
    }
    let frame_len = 96u64;
    let bits_per_frame = (q as f64).log2() as u64 * frame_len;
    let frames = (s.bits_per_point / bits_per_frame).max(1);
    let grid = Grid::new(vec![ratios.to_vec()])?;
    let mut cfg = SimConfig {
        scheme: Scheme::DapskMsdd,
        m: None,
        n: None,
        t: Some(2),
        constellation: vec![AlphabetSpec::Dapsk { q_p, q_a, a: 2.0 }],
        metric: None,
        mode: None,
        code: None,
        dustm: None,
        channel: ChannelSpec::AwgnPhase,
        ebn0_grid_db: vec![s.ebn0_db],
        frame_len: Some(frame_len as usize),
        stop: StopRule { min_bit_errors: u64::MAX, max_frames: frames },
        seed: s.seed,
        genie_amplitude: false,
        disable_noise: false,
    };
    Ok(grid_search(SearchObjective::RingRatio, &grid, grid.len(), |p| {
        cfg.constellation = vec![AlphabetSpec::Dapsk { q_p, q_a, a: p[0] }];
        measure(&cfg)
    }))
}

/// Sweeps the two-ring radius ratio of the 8-point set carried by a
/// differential Alamouti code (2×1, near-optimal decoding) at one Eb/N0
/// point. The per-ring rotations stay at the 45°/0° arrangement.
pub fn search_ostbc_ring_ratio(
    ratios: &[f64],
    s: &BerSearch,
) -> Result<SearchOutcome, SimError> {
    if ratios.is_empty() {
        return Err(SimError::Config("ratio grid must be nonempty".into()));
    }
    let bits_per_block = 6u64; // two 8-point symbols per Alamouti block
    let frames = (s.bits_per_point / (bits_per_block * 25)).max(1);
    let grid = Grid::new(vec![ratios.to_vec()])?;
    let mut cfg = SimConfig {
        scheme: Scheme::OstbcQam,
        m: None,
        n: None,
        t: None,
        constellation: vec![AlphabetSpec::Mdc8Qam { r: 1.6, theta1_deg: 45.0, theta2_deg: 0.0 }],
        metric: None,
        mode: None,
        code: None,
        dustm: None,
        channel: ChannelSpec::Rbf,
        ebn0_grid_db: vec![s.ebn0_db],
        frame_len: Some(25),
        stop: StopRule { min_bit_errors: u64::MAX, max_frames: frames },
        seed: s.seed,
        genie_amplitude: false,
        disable_noise: false,
    };
    Ok(grid_search(SearchObjective::Ostbc8qam, &grid, grid.len(), |p| {
        cfg.constellation =
            vec![AlphabetSpec::Mdc8Qam { r: p[0], theta1_deg: 45.0, theta2_deg: 0.0 }];
        measure(&cfg)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use noncoh_core::design_analysis::axis;

    #[test]
    fn ring_search_scans_the_whole_grid_and_reports_the_argmin() {
        let s = BerSearch { ebn0_db: 18.0, bits_per_point: 12_000, seed: 2 };
        let out = search_ring_ratio(16, &axis(1.6, 2.8, 0.4), &s).unwrap();
        assert!(out.complete);
        assert_eq!(out.trace.len(), 4);
        let best_from_trace = out
            .trace
            .iter()
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        assert_eq!(out.best_value, best_from_trace.1);
        assert!(out.best_params[0] >= 1.6 && out.best_params[0] <= 2.8);
    }

    #[test]
    fn degenerate_grids_are_rejected() {
        let s = BerSearch::default();
        assert!(search_ring_ratio(16, &[], &s).is_err());
        assert!(search_ring_ratio(15, &[2.0], &s).is_err());
    }

    #[test]
    fn ostbc_ring_search_runs_and_prefers_moderate_ratios() {
        let s = BerSearch { ebn0_db: 14.0, bits_per_point: 40_000, seed: 2 };
        let out = search_ostbc_ring_ratio(&axis(1.2, 2.4, 0.3), &s).unwrap();
        assert!(out.complete);
        assert_eq!(out.trace.len(), 5);
        assert!(out.best_value < 0.5, "search should measure a real BER");
    }
}
