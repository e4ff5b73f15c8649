//! Codebook distance analysis and the constellation design searches.
//!
//! A codebook's error performance at high SNR is governed by the pairwise
//! difference matrices D = V_l − V_l': the minimum rank of D†D sets the
//! diversity order, the smallest determinant-style product sets the coding
//! gain, and the smallest trace sets the diversity sum that matters at low
//! SNR. The searches maximize the analytic minimum-determinant objective
//! over constellation parameters; BER-driven searches (ring ratio, ring
//! rotation under simulation) reuse the same grid engine with a simulation
//! callback supplied by the caller.

use crate::alphabets::{mdc_8qam, rect_qam, rotated, Constellation};
use crate::cxmat::{self, CMatrix};
use crate::{Error, Result};
use alloc::vec::Vec;
// Inherent f64 math resolves whenever std is linked anywhere in the build
// graph (tests, std-enabled workspace builds); the trait supplies the same
// methods in pure no_std builds and sits idle otherwise.
#[allow(unused_imports)]
use num_traits::Float;

/// Pairwise products below this fraction of the largest pairwise product
/// count as a vanished determinant.
const DET_ZERO_REL: f64 = 1e-9;

/// Distance profile of a codebook over all unordered codeword pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct CodebookReport {
    pub size: usize,
    /// Smallest rank of any pairwise D†D.
    pub min_rank: usize,
    pub min_rank_pair: (usize, usize),
    /// min_rank × receive antennas.
    pub diversity_order: usize,
    /// min over pairs of (Π eigenvalues)^(1/M); zero when any pair is rank
    /// deficient.
    pub coding_gain: f64,
    pub coding_gain_pair: (usize, usize),
    /// min over pairs of Σ eigenvalues = min ‖D‖²_F.
    pub diversity_sum: f64,
    pub diversity_sum_pair: (usize, usize),
}

/// Scans all unordered codeword pairs. `n` is the receive antenna count
/// entering the diversity order; `tol` is the relative singular-value
/// threshold for rank decisions.
///
/// # Panics
/// Panics if fewer than two codewords are given or shapes differ.
pub fn distance_spectrum(codebook: &[CMatrix], n: usize, tol: f64) -> CodebookReport {
    assert!(codebook.len() >= 2, "a codebook needs at least two codewords");
    let rows = codebook[0].rows();
    let cols = codebook[0].cols();
    for v in codebook {
        assert_eq!((v.rows(), v.cols()), (rows, cols), "codewords must share one shape");
    }

    struct PairScan {
        pair: (usize, usize),
        rank: usize,
        product: f64,
        trace: f64,
    }
    let mut scans = Vec::with_capacity(codebook.len() * (codebook.len() - 1) / 2);
    for l in 0..codebook.len() {
        for lp in (l + 1)..codebook.len() {
            let d = codebook[l].sub(&codebook[lp]);
            let sigma = cxmat::singular_values(&d);
            let s_max = sigma.first().copied().unwrap_or(0.0);
            let rank = sigma.iter().filter(|&&s| s > tol * s_max && s > 0.0).count();
            // λ_m = σ_m²; missing values are structural zeros.
            let mut product = 1.0;
            for m in 0..cols {
                let lam = sigma.get(m).map_or(0.0, |s| s * s);
                product *= lam;
            }
            scans.push(PairScan {
                pair: (l, lp),
                rank,
                product,
                trace: cxmat::frobenius_norm_sq(&d),
            });
        }
    }

    let max_product = scans.iter().fold(0.0f64, |acc, s| acc.max(s.product));
    let mut min_rank = usize::MAX;
    let mut min_rank_pair = (0, 0);
    let mut coding_gain = f64::INFINITY;
    let mut coding_gain_pair = (0, 0);
    let mut diversity_sum = f64::INFINITY;
    let mut diversity_sum_pair = (0, 0);
    for s in &scans {
        if s.rank < min_rank {
            min_rank = s.rank;
            min_rank_pair = s.pair;
        }
        let gain = if s.product <= DET_ZERO_REL * max_product {
            0.0
        } else {
            s.product.powf(1.0 / cols as f64)
        };
        if gain < coding_gain {
            coding_gain = gain;
            coding_gain_pair = s.pair;
        }
        if s.trace < diversity_sum {
            diversity_sum = s.trace;
            diversity_sum_pair = s.pair;
        }
    }

    CodebookReport {
        size: codebook.len(),
        min_rank,
        min_rank_pair,
        diversity_order: min_rank * n,
        coding_gain,
        coding_gain_pair,
        diversity_sum,
        diversity_sum_pair,
    }
}

/// Chernoff bound on the pairwise error probability of mistaking `vl` for
/// `vlp` at SNR `rho` with `n` receive antennas:
/// ½·Π_m [1 + ρ²σ_m²/(4(1+2ρ))]^{−N}.
///
/// # Panics
/// Panics unless `rho` is positive and shapes match.
pub fn pep_bound(vl: &CMatrix, vlp: &CMatrix, rho: f64, n: usize) -> f64 {
    assert!(rho > 0.0, "SNR must be positive");
    assert_eq!((vl.rows(), vl.cols()), (vlp.rows(), vlp.cols()), "codeword shape mismatch");
    let kernel = rho * rho / (4.0 * (1.0 + 2.0 * rho));
    let mut bound = 0.5;
    for s in cxmat::singular_values(&vl.sub(vlp)) {
        bound *= (1.0 + kernel * s * s).powi(-(n as i32));
    }
    bound
}

/// Minimum-determinant objective of a component-interleaved code over a
/// constellation: min over point pairs of (1/K)·|(Δ^R)² − (Δ^I)²|^M,
/// together with the minimizing pair. Zero exactly when some difference
/// has |Δ^R| = |Δ^I|, the loss-of-diversity condition.
///
/// The value is a fixed positive multiple (K^{M−1}) of the true minimal
/// eigenvalue product of the single-symbol distance matrices; the argmin
/// and the zero set are identical.
pub fn mdc_min_det(constellation: &Constellation, m: usize, k: usize) -> (f64, (usize, usize)) {
    let points = constellation.points();
    let mut best = f64::INFINITY;
    let mut pair = (0, 0);
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let d = points[i] - points[j];
            let value = (d.re * d.re - d.im * d.im).abs().powi(m as i32) / k as f64;
            if value < best {
                best = value;
                pair = (i, j);
            }
        }
    }
    (best, pair)
}

/// What a design search optimizes. Distance objectives are analytic and
/// maximized; BER objectives come from simulation callbacks and are
/// minimized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchObjective {
    RingRatio,
    QamRotation,
    Mdc8qam,
    Ostbc8qam,
}

impl SearchObjective {
    pub fn name(self) -> &'static str {
        match self {
            SearchObjective::RingRatio => "ring-ratio",
            SearchObjective::QamRotation => "qam-rotation",
            SearchObjective::Mdc8qam => "mdc-8qam",
            SearchObjective::Ostbc8qam => "ostbc-8qam",
        }
    }

    /// Larger is better for distance objectives, smaller for BER.
    pub fn maximizes(self) -> bool {
        matches!(self, SearchObjective::QamRotation | SearchObjective::Mdc8qam)
    }
}

/// Cartesian product of per-parameter axes; the last axis varies fastest.
#[derive(Debug, Clone)]
pub struct Grid {
    axes: Vec<Vec<f64>>,
}

impl Grid {
    pub fn new(axes: Vec<Vec<f64>>) -> Result<Grid> {
        if axes.is_empty() || axes.iter().any(Vec::is_empty) {
            return Err(Error::InvalidParameter("every grid axis needs at least one value"));
        }
        Ok(Grid { axes })
    }

    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid point at a linear index (mixed radix, last axis fastest).
    pub fn point(&self, index: usize) -> Vec<f64> {
        let mut rem = index;
        let mut out = alloc::vec![0.0; self.axes.len()];
        for (axis, slot) in self.axes.iter().rev().zip(out.iter_mut().rev()) {
            *slot = axis[rem % axis.len()];
            rem /= axis.len();
        }
        out
    }
}

/// Evenly spaced axis from `start` through `stop` (inclusive up to float
/// slack) in steps of `step`.
pub fn axis(start: f64, stop: f64, step: f64) -> Vec<f64> {
    assert!(step > 0.0 && stop >= start, "axis must ascend");
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|i| start + i as f64 * step).collect()
}

/// Search result with the full objective trace for plotting. `complete` is
/// false when the evaluation budget ran out before the grid was covered;
/// the best point then refers to the evaluated prefix only.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub objective: SearchObjective,
    pub best_index: usize,
    pub best_params: Vec<f64>,
    pub best_value: f64,
    pub trace: Vec<(Vec<f64>, f64)>,
    pub complete: bool,
}

/// Evaluates the objective over the grid (in index order, ties keep the
/// lowest index) spending at most `budget` evaluations.
pub fn grid_search(
    objective: SearchObjective,
    grid: &Grid,
    budget: usize,
    mut eval: impl FnMut(&[f64]) -> f64,
) -> SearchOutcome {
    let total = grid.len();
    let evaluated = total.min(budget);
    let mut trace = Vec::with_capacity(evaluated);
    let mut best_index = 0;
    let mut best_value = if objective.maximizes() { f64::NEG_INFINITY } else { f64::INFINITY };
    for i in 0..evaluated {
        let params = grid.point(i);
        let value = eval(&params);
        let better = if objective.maximizes() { value > best_value } else { value < best_value };
        if better {
            best_value = value;
            best_index = i;
        }
        trace.push((params, value));
    }
    SearchOutcome {
        objective,
        best_index,
        best_params: grid.point(best_index),
        best_value,
        trace,
        complete: evaluated == total,
    }
}

/// Scans the rotation angle of a square QAM grid for the largest
/// minimum-determinant objective of the 4-antenna component-interleaved
/// code. Angles in radians, `step_deg` in degrees for convenient grids;
/// the scan covers [0°, 45°].
pub fn search_qam_rotation(q: usize, step_deg: f64) -> Result<SearchOutcome> {
    let base = rect_qam(q)?;
    let step = step_deg.to_radians();
    let grid = Grid::new(alloc::vec![axis(0.0, 45f64.to_radians(), step)])?;
    Ok(grid_search(SearchObjective::QamRotation, &grid, usize::MAX, |p| {
        let c = rotated(&base, p[0]).expect("scan stays within [0°, 90°)");
        mdc_min_det(&c, 4, 4).0
    }))
}

/// Scans both ring rotations of the two-ring 8-point set at a fixed radius
/// ratio for the largest minimum-determinant objective. Angles in radians;
/// the scan covers [0°, 90°)².
pub fn search_mdc_8qam(r: f64, step_deg: f64) -> Result<SearchOutcome> {
    if r <= 1.0 {
        return Err(Error::InvalidParameter("radius ratio must exceed 1"));
    }
    let step = step_deg.to_radians();
    let quarter = 90f64.to_radians();
    let line: Vec<f64> = axis(0.0, quarter, step)
        .into_iter()
        .filter(|&t| t < quarter)
        .collect();
    let grid = Grid::new(alloc::vec![line.clone(), line])?;
    Ok(grid_search(SearchObjective::Mdc8qam, &grid, usize::MAX, |p| {
        let c = mdc_8qam(r, p[0], p[1]).expect("scan stays within [0°, 90°)");
        mdc_min_det(&c, 4, 4).0
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabets::{optimal_qam_rotation, MDC_8QAM_THETA1_DEG, MDC_8QAM_THETA2_DEG};
    use crate::channels::{cn01, RngStream};
    use crate::dustm::{coding_gain_u, make_cyclic};
    use crate::stcodes::{assemble, make_code, CodeKind};
    use crate::Complex64;

    fn antipodal_identity_pair() -> Vec<CMatrix> {
        let i2 = CMatrix::identity(2);
        alloc::vec![i2.clone(), i2.scale_re(-1.0)]
    }

    #[test]
    fn antipodal_pair_has_closed_form_profile() {
        let report = distance_spectrum(&antipodal_identity_pair(), 3, crate::tol::RANK_REL);
        assert_eq!(report.size, 2);
        assert_eq!(report.min_rank, 2);
        assert_eq!(report.diversity_order, 6);
        assert!((report.coding_gain - 4.0).abs() < 1e-12);
        assert!((report.diversity_sum - 8.0).abs() < 1e-12);
        assert_eq!(report.coding_gain_pair, (0, 1));
        assert_eq!(report.diversity_sum_pair, (0, 1));
    }

    #[test]
    fn orthogonal_code_over_psk_keeps_full_rank() {
        let code = make_code(CodeKind::Alamouti);
        let qpsk = crate::alphabets::psk(4).unwrap();
        let mut codebook = Vec::new();
        for i in 0..4 {
            for j in 0..4 {
                codebook.push(assemble(&code, &[qpsk.point(i), qpsk.point(j)]).unwrap());
            }
        }
        let report = distance_spectrum(&codebook, 1, crate::tol::RANK_REL);
        assert_eq!(report.size, 16);
        assert_eq!(report.min_rank, 2);
        assert!(report.coding_gain > 0.0);
    }

    #[test]
    fn interleaved_code_over_square_qpsk_loses_diversity() {
        let code = make_code(CodeKind::Mdc4);
        let qpsk = rect_qam(4).unwrap();
        let mut codebook = Vec::new();
        for z in 0..256usize {
            let x: Vec<Complex64> = (0..4).map(|s| qpsk.point((z >> (2 * s)) & 3)).collect();
            codebook.push(assemble(&code, &x).unwrap());
        }
        let report = distance_spectrum(&codebook, 1, crate::tol::RANK_REL);
        assert_eq!(report.min_rank, 2);
        assert_eq!(report.coding_gain, 0.0);
    }

    #[test]
    fn cyclic_codebook_gain_matches_direct_formula() {
        for (m, l, u) in [(2usize, 16usize, alloc::vec![1usize, 7]), (3, 8, alloc::vec![1, 1, 3])] {
            let code = make_cyclic(&u, l).unwrap();
            let codebook: Vec<CMatrix> = (0..l).map(|i| code.power(i)).collect();
            let report = distance_spectrum(&codebook, 2, crate::tol::RANK_REL);
            let direct = coding_gain_u(&u, l);
            assert_eq!(report.min_rank, m);
            assert_eq!(report.diversity_order, 2 * m);
            assert!(
                (report.coding_gain - direct).abs() <= 1e-9 * direct.max(1.0),
                "M={m} L={l}: {} vs {direct}",
                report.coding_gain
            );
        }
    }

    #[test]
    fn appending_codewords_never_improves_the_profile() {
        let mut rng = RngStream::new(81, 0).rng();
        for _ in 0..40 {
            let mut codebook: Vec<CMatrix> =
                (0..3).map(|_| CMatrix::from_fn(2, 2, |_, _| cn01(&mut rng))).collect();
            let before = distance_spectrum(&codebook, 1, crate::tol::RANK_REL);
            codebook.push(CMatrix::from_fn(2, 2, |_, _| cn01(&mut rng)));
            let after = distance_spectrum(&codebook, 1, crate::tol::RANK_REL);
            assert!(after.min_rank <= before.min_rank);
            // The relative zero threshold can only tighten as products grow.
            assert!(after.coding_gain <= before.coding_gain + 1e-12);
            assert!(after.diversity_sum <= before.diversity_sum + 1e-15);
        }
    }

    #[test]
    fn identical_codewords_bound_is_one_half() {
        let v = CMatrix::identity(3);
        for rho in [0.5, 8.0, 1000.0] {
            assert!((pep_bound(&v, &v, rho, 2) - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn antipodal_scalar_bound_value() {
        // ½·[1 + (64/68)·4]⁻¹ = 17/162.
        let a = CMatrix::from_vec(1, 1, alloc::vec![Complex64::new(1.0, 0.0)]);
        let b = a.scale_re(-1.0);
        let got = pep_bound(&a, &b, 8.0, 1);
        assert!((got - 17.0 / 162.0).abs() < 1e-12, "{got}");
        assert!((got - 0.104938).abs() < 1e-5);
    }

    #[test]
    fn receive_antennas_square_the_kernel() {
        let mut rng = RngStream::new(82, 0).rng();
        for _ in 0..25 {
            let a = CMatrix::from_fn(2, 2, |_, _| cn01(&mut rng));
            let b = CMatrix::from_fn(2, 2, |_, _| cn01(&mut rng));
            let one = pep_bound(&a, &b, 12.0, 1);
            let two = pep_bound(&a, &b, 12.0, 2);
            assert!((two - 2.0 * one * one).abs() < 1e-12 * two.max(1e-300));
        }
    }

    #[test]
    fn bound_decreases_with_snr_and_never_exceeds_half() {
        let mut rng = RngStream::new(83, 0).rng();
        for _ in 0..20 {
            let a = CMatrix::from_fn(2, 2, |_, _| cn01(&mut rng));
            let b = CMatrix::from_fn(2, 2, |_, _| cn01(&mut rng));
            let mut prev = f64::INFINITY;
            for rho in [0.3, 1.0, 3.0, 10.0, 30.0, 100.0] {
                let bound = pep_bound(&a, &b, rho, 2);
                assert!(bound <= 0.5 + 1e-15);
                assert!(bound < prev, "bound must fall as SNR grows");
                prev = bound;
            }
        }
    }

    #[test]
    fn square_grid_differences_kill_the_min_det() {
        let qam = rect_qam(16).unwrap();
        let (value, (i, j)) = mdc_min_det(&qam, 4, 4);
        assert_eq!(value, 0.0);
        let d = qam.point(i) - qam.point(j);
        assert!((d.re.abs() - d.im.abs()).abs() < 1e-12, "minimizer is a diagonal difference");
    }

    #[test]
    fn optimal_rotation_restores_the_min_det() {
        let qam = rect_qam(16).unwrap();
        let rot = rotated(&qam, optimal_qam_rotation()).unwrap();
        assert!(mdc_min_det(&rot, 4, 4).0 > 1e-4);
    }

    #[test]
    fn min_det_scales_the_true_eigenvalue_product() {
        // Single-symbol distance matrices of the 4-antenna interleaved code:
        // det(D†D) over codeword pairs equals the formula up to K^{M−1}.
        let code = make_code(CodeKind::Mdc4);
        let rot = rotated(&rect_qam(4).unwrap(), optimal_qam_rotation()).unwrap();
        let mut true_min = f64::INFINITY;
        for slot in 0..4 {
            for i in 0..4 {
                for j in 0..4 {
                    if i == j {
                        continue;
                    }
                    let mut xa = alloc::vec![Complex64::new(0.0, 0.0); 4];
                    let mut xb = xa.clone();
                    xa[slot] = rot.point(i);
                    xb[slot] = rot.point(j);
                    let d = assemble(&code, &xa).unwrap().sub(&assemble(&code, &xb).unwrap());
                    let det = cxmat::determinant(&cxmat::matmul(&cxmat::hermitian(&d), &d)).re;
                    true_min = true_min.min(det);
                }
            }
        }
        let (formula, _) = mdc_min_det(&rot, 4, 4);
        let scaled = formula * 4f64.powi(1 - 4);
        assert!(
            (true_min - scaled).abs() < 1e-9 * true_min.max(1e-12),
            "{true_min} vs {scaled}"
        );
    }

    #[test]
    fn square_grid_min_det_mirrors_about_45_degrees() {
        let qam = rect_qam(16).unwrap();
        for theta_deg in [5.0f64, 13.28, 30.0] {
            let t = theta_deg.to_radians();
            let a = mdc_min_det(&rotated(&qam, t).unwrap(), 4, 4).0;
            let b = mdc_min_det(&rotated(&qam, core::f64::consts::FRAC_PI_2 - t).unwrap(), 4, 4).0;
            assert!((a - b).abs() < 1e-12 * a.max(1.0), "theta {theta_deg}");
        }
    }

    #[test]
    fn forty_five_degree_rotation_is_degenerate_again() {
        let qpsk = rect_qam(4).unwrap();
        let rot = rotated(&qpsk, 45f64.to_radians()).unwrap();
        // Rotation by 45° maps diagonal differences onto |Δ^R| = |Δ^I|
        // pairs again; only float rounding keeps the value above zero.
        assert!(mdc_min_det(&rot, 4, 4).0 < 1e-30);
    }

    #[test]
    fn grid_engine_budget_order_and_ties() {
        let grid = Grid::new(alloc::vec![alloc::vec![0.0, 1.0, 2.0], alloc::vec![10.0, 20.0]]).unwrap();
        assert_eq!(grid.len(), 6);
        // Last axis fastest.
        assert_eq!(grid.point(0), alloc::vec![0.0, 10.0]);
        assert_eq!(grid.point(1), alloc::vec![0.0, 20.0]);
        assert_eq!(grid.point(2), alloc::vec![1.0, 10.0]);
        let partial = grid_search(SearchObjective::RingRatio, &grid, 4, |_| 1.0);
        assert!(!partial.complete);
        assert_eq!(partial.trace.len(), 4);
        assert_eq!(partial.best_index, 0, "ties keep the lowest index");
        let full = grid_search(SearchObjective::RingRatio, &grid, usize::MAX, |p| p[0] + p[1]);
        assert!(full.complete);
        assert_eq!(full.best_params, alloc::vec![0.0, 10.0]);
        let maxed = grid_search(SearchObjective::QamRotation, &grid, usize::MAX, |p| p[0] + p[1]);
        assert_eq!(maxed.best_params, alloc::vec![2.0, 20.0]);
    }

    #[test]
    fn rotation_search_finds_the_analytic_optimum() {
        let outcome = search_qam_rotation(16, 0.01).unwrap();
        assert!(outcome.complete);
        let best_deg = outcome.best_params[0].to_degrees();
        let target = optimal_qam_rotation().to_degrees();
        assert!((best_deg - target).abs() <= 0.05, "{best_deg} vs {target}");
    }

    #[test]
    fn ring_rotation_search_matches_tabulated_angles() {
        let outcome = search_mdc_8qam(1.37, 0.25).unwrap();
        assert!(outcome.complete);
        let t1 = outcome.best_params[0].to_degrees();
        let t2 = outcome.best_params[1].to_degrees();
        let near = |a: f64, b: f64, t1t: f64, t2t: f64| (a - t1t).abs() <= 0.5 && (b - t2t).abs() <= 0.5;
        assert!(
            near(t1, t2, MDC_8QAM_THETA1_DEG, MDC_8QAM_THETA2_DEG)
                || near(t1, t2, 90.0 - MDC_8QAM_THETA2_DEG, 90.0 - MDC_8QAM_THETA1_DEG),
            "({t1}, {t2})"
        );
        assert!(search_mdc_8qam(0.9, 1.0).is_err());
    }
}
