//! Differential transmission with orthogonal space-time block codes.
//!
//! The unitary path (constant-envelope alphabets) updates S_τ = V·S_{τ−1}
//! and decodes each symbol independently from two received blocks. The
//! non-unitary path (QAM alphabets) divides out the previous block's
//! amplitude, S_τ = V·S_{τ−1}/a_{τ−1}, and offers three decoders: exact
//! joint ML, a decoupled near-optimal rule, and per-real-dimension decisions
//! for rectangular grids. A generic two-block matrix ML decoder serves as
//! the reference oracle for all of them.

use crate::alphabets::{Constellation, ConstellationKind};
use crate::cxmat::{self, CMatrix};
use crate::siso_diff::is_constant_envelope;
use crate::stcodes::{assemble, STCode};
use crate::{Complex64, Error, Result};
use alloc::vec::Vec;
// Inherent f64 math resolves whenever std is linked anywhere in the build
// graph (tests, std-enabled workspace builds); the trait supplies the same
// methods in pure no_std builds and sits idle otherwise.
#[allow(unused_imports)]
use num_traits::Float;

/// Joint-search bound for the exact non-unitary ML decoder (Π qᵢ).
pub const JOINT_ML_LIMIT: u64 = 1 << 16;

/// Transmitter (or genie receiver) state between blocks.
#[derive(Debug, Clone)]
pub struct DiffState {
    pub s_prev: CMatrix,
    pub a_prev: f64,
}

impl DiffState {
    /// Reference block: the identity with unit amplitude.
    pub fn initial(m: usize) -> DiffState {
        DiffState { s_prev: CMatrix::identity(m), a_prev: 1.0 }
    }
}

fn scaled_unitary_amplitude(v: &CMatrix, tol: f64) -> Option<f64> {
    if !v.is_square() {
        return None;
    }
    let gram = cxmat::matmul(&cxmat::hermitian(v), v);
    let a_sq = cxmat::trace(&gram).re / v.rows() as f64;
    if a_sq <= 0.0 {
        return None;
    }
    let target = CMatrix::identity(v.rows()).scale_re(a_sq);
    if gram.max_abs_diff(&target) < tol * a_sq.max(1.0) {
        Some(a_sq.sqrt())
    } else {
        None
    }
}

/// S_new = V·S_prev for unitary information blocks; amplitude stays 1.
pub fn encode_unitary(v: &CMatrix, state: &DiffState) -> Result<(CMatrix, DiffState)> {
    match scaled_unitary_amplitude(v, 1e-10) {
        Some(a) if (a - 1.0).abs() < 1e-9 => {}
        _ => return Err(Error::InvalidParameter("information block must be unitary")),
    }
    let s_new = cxmat::matmul(v, &state.s_prev);
    Ok((s_new.clone(), DiffState { s_prev: s_new, a_prev: 1.0 }))
}

/// S_new = V·S_prev/a_prev for scaled-unitary information blocks; the
/// transmitted power tracks the current block only: S_new†S_new = V†V.
pub fn encode_nonunitary(v: &CMatrix, state: &DiffState) -> Result<(CMatrix, DiffState)> {
    let a = scaled_unitary_amplitude(v, 1e-10)
        .ok_or(Error::InvalidParameter("information block must be scaled-unitary"))?;
    let s_new = cxmat::matmul(v, &state.s_prev).scale_re(1.0 / state.a_prev);
    Ok((s_new.clone(), DiffState { s_prev: s_new, a_prev: a }))
}

/// Per-symbol decision statistics x̃_i = tr(A_i·Y_prev·Y_cur†) +
/// conj(tr(B_i·Y_prev·Y_cur†)); the code's orthogonality cancels all
/// cross-symbol terms, so each x̃_i estimates its own symbol alone.
pub fn symbol_statistics(y_prev: &CMatrix, y_cur: &CMatrix, code: &STCode) -> Vec<Complex64> {
    assert_eq!(y_prev.rows(), code.antennas(), "row count must equal M");
    assert_eq!(y_prev.rows(), y_cur.rows(), "blocks must share shape");
    assert_eq!(y_prev.cols(), y_cur.cols(), "blocks must share shape");
    let c = cxmat::matmul(y_prev, &cxmat::hermitian(y_cur));
    (0..code.symbols_per_block())
        .map(|i| {
            let ta = trace_prod(&code.a_mat(i), &c);
            let tb = trace_prod(&code.b_mat(i), &c);
            ta + tb.conj()
        })
        .collect()
}

/// tr(A·C) without forming the product.
fn trace_prod(a: &CMatrix, c: &CMatrix) -> Complex64 {
    let mut t = Complex64::new(0.0, 0.0);
    for r in 0..a.rows() {
        for k in 0..a.cols() {
            t += a.get(r, k) * c.get(k, r);
        }
    }
    t
}

fn check_alphabet_count(code: &STCode, consts: &[&Constellation]) -> Result<()> {
    if consts.len() != code.symbols_per_block() {
        return Err(Error::InvalidParameter("one alphabet per symbol"));
    }
    Ok(())
}

/// Single-symbol decisions for constant-envelope alphabets:
/// x̂_i = argmax_x Re{x̃_i·x}. Exact ML for unitary differential codes.
pub fn decode_fast_ml_unitary(
    y_prev: &CMatrix,
    y_cur: &CMatrix,
    code: &STCode,
    consts: &[&Constellation],
) -> Result<Vec<usize>> {
    check_alphabet_count(code, consts)?;
    if !consts.iter().all(|c| is_constant_envelope(c)) {
        return Err(Error::InvalidParameter(
            "fast ML requires constant-envelope alphabets; use the near-optimal decoder",
        ));
    }
    let stats = symbol_statistics(y_prev, y_cur, code);
    Ok(stats
        .iter()
        .zip(consts)
        .map(|(xt, c)| argmax_by(c.points(), |x| (xt * x).re))
        .collect())
}

/// Decoupled near-optimal decisions for arbitrary alphabets:
/// x̂_i = argmax_x Re{x̃_i·x} − (ỹ/(2·a_prev·√K))·|x|², ỹ = ‖Y_prev‖²_F.
/// For constant-envelope alphabets the penalty is constant and the rule
/// collapses to fast ML.
pub fn decode_near_optimal(
    y_prev: &CMatrix,
    y_cur: &CMatrix,
    code: &STCode,
    consts: &[&Constellation],
    a_prev: f64,
) -> Result<Vec<usize>> {
    check_alphabet_count(code, consts)?;
    if a_prev <= 0.0 {
        return Err(Error::InvalidParameter("previous amplitude must be positive"));
    }
    let stats = symbol_statistics(y_prev, y_cur, code);
    let penalty = cxmat::frobenius_norm_sq(y_prev)
        / (2.0 * a_prev * (code.symbols_per_block() as f64).sqrt());
    Ok(stats
        .iter()
        .zip(consts)
        .map(|(xt, c)| argmax_by(c.points(), |x| (xt * x).re - penalty * x.norm_sqr()))
        .collect())
}

/// Candidates examined by per-real-dimension decoding vs a joint symbol
/// scan: (√q_re + √q_im summed, Π q) per block.
pub fn srsd_search_space(consts: &[&Constellation]) -> (usize, usize) {
    let mut separate = 0usize;
    let mut joint = 0usize;
    for c in consts {
        let n_im = c.meta().im_levels.unwrap_or(1);
        let n_re = c.meta().re_levels.unwrap_or(c.size());
        separate += n_re + n_im;
        joint += c.size();
    }
    (separate, joint)
}

/// Per-real-dimension decisions for rectangular grids:
/// x̂^R = argmax x̃^R·x^R − c·(x^R)², x̂^I = argmax −x̃^I·x^I − c·(x^I)²
/// with the same penalty weight as the near-optimal rule. Since
/// Re{x̃·x} − c·|x|² separates into those two terms on a product grid, the
/// combined decision equals the near-optimal decision exactly.
pub fn decode_srsd(
    y_prev: &CMatrix,
    y_cur: &CMatrix,
    code: &STCode,
    consts: &[&Constellation],
    a_prev: f64,
) -> Result<Vec<usize>> {
    check_alphabet_count(code, consts)?;
    if a_prev <= 0.0 {
        return Err(Error::InvalidParameter("previous amplitude must be positive"));
    }
    if !consts.iter().all(|c| c.kind() == ConstellationKind::RectQam) {
        return Err(Error::InvalidParameter("per-dimension decoding requires a rectangular grid"));
    }
    let stats = symbol_statistics(y_prev, y_cur, code);
    let penalty = cxmat::frobenius_norm_sq(y_prev)
        / (2.0 * a_prev * (code.symbols_per_block() as f64).sqrt());
    Ok(stats
        .iter()
        .zip(consts)
        .map(|(xt, c)| {
            let n_im = c.meta().im_levels.expect("rectangular grid");
            let n_re = c.meta().re_levels.expect("rectangular grid");
            // Points are laid out re-major; levels read off the axes.
            let re_idx = argmax_by_f64(
                (0..n_re).map(|i| c.point(i * n_im).re),
                |xr| xt.re * xr - penalty * xr * xr,
            );
            let im_idx = argmax_by_f64(
                (0..n_im).map(|k| c.point(k).im),
                |xi| -xt.im * xi - penalty * xi * xi,
            );
            re_idx * n_im + im_idx
        })
        .collect())
}

fn argmax_by(points: &[Complex64], mut f: impl FnMut(Complex64) -> f64) -> usize {
    let mut best = 0usize;
    let mut best_v = f64::NEG_INFINITY;
    for (i, &x) in points.iter().enumerate() {
        let v = f(x);
        if v > best_v {
            best_v = v;
            best = i;
        }
    }
    best
}

fn argmax_by_f64(levels: impl Iterator<Item = f64>, mut f: impl FnMut(f64) -> f64) -> usize {
    let mut best = 0usize;
    let mut best_v = f64::NEG_INFINITY;
    for (i, x) in levels.enumerate() {
        let v = f(x);
        if v > best_v {
            best_v = v;
            best = i;
        }
    }
    best
}

/// Exact joint ML for the non-unitary differential scheme: over all symbol
/// vectors l, argmax of
///   ρ/(1+ρ(a²_prev+a²(l)))·‖a_prev·Y_prev + V_l†·Y_cur‖²_F
///     − M·N·ln(1+ρ(a²_prev+a²(l))).
/// Ties resolve to the lexicographically smallest vector (symbol 1 most
/// significant).
pub fn decode_ml_nonunitary(
    y_prev: &CMatrix,
    y_cur: &CMatrix,
    code: &STCode,
    consts: &[&Constellation],
    rho: f64,
    a_prev: f64,
) -> Result<Vec<usize>> {
    check_alphabet_count(code, consts)?;
    if rho <= 0.0 || a_prev <= 0.0 {
        return Err(Error::InvalidParameter("rho and previous amplitude must be positive"));
    }
    let total = consts
        .iter()
        .try_fold(1u64, |acc, c| acc.checked_mul(c.size() as u64))
        .filter(|&t| t <= JOINT_ML_LIMIT)
        .ok_or(Error::SearchSpaceTooLarge {
            requested: consts.iter().fold(1u64, |acc, c| acc.saturating_mul(c.size() as u64)),
            limit: JOINT_ML_LIMIT,
        })?;
    let k = code.symbols_per_block();
    let m = code.antennas() as f64;
    let n = y_prev.cols() as f64;
    let mut idx = alloc::vec![0usize; k];
    let mut symbols = alloc::vec![Complex64::new(0.0, 0.0); k];
    let mut best_idx = idx.clone();
    let mut best_metric = f64::NEG_INFINITY;
    for _ in 0..total {
        for (s, (&i, c)) in symbols.iter_mut().zip(idx.iter().zip(consts)) {
            *s = c.point(i);
        }
        let v = assemble(code, &symbols).expect("symbol count matches K");
        let a_sq: f64 = symbols.iter().map(|x| x.norm_sqr()).sum::<f64>() / code.p();
        let mut corr = 0.0;
        for r in 0..y_prev.rows() {
            for col in 0..y_prev.cols() {
                let mut s = y_prev.get(r, col).scale(a_prev);
                for t in 0..v.rows() {
                    s += v.get(t, r).conj() * y_cur.get(t, col);
                }
                corr += s.norm_sqr();
            }
        }
        let load = 1.0 + rho * (a_prev * a_prev + a_sq);
        let metric = rho / load * corr - m * n * load.ln();
        if metric > best_metric {
            best_metric = metric;
            best_idx.copy_from_slice(&idx);
        }
        // Mixed-radix advance, last symbol least significant.
        for pos in (0..k).rev() {
            idx[pos] += 1;
            if idx[pos] < consts[pos].size() {
                break;
            }
            idx[pos] = 0;
        }
    }
    Ok(best_idx)
}

/// Two-block non-coherent matrix ML: each candidate is a stacked 2M×M
/// transmit matrix S̄; the winner maximizes
///   ρ·tr{Ȳ†·S̄·(I+ρS̄†S̄)⁻¹·S̄†·Ȳ} − N·ln det(I+ρS̄†S̄)
/// with Ȳ = [Y_prev; Y_cur]. Reference oracle for the specialized decoders.
pub fn decode_matrix_ml_general(
    y_prev: &CMatrix,
    y_cur: &CMatrix,
    candidates: &[CMatrix],
    rho: f64,
) -> Result<usize> {
    if candidates.is_empty() {
        return Err(Error::InvalidParameter("candidate list must be nonempty"));
    }
    if rho <= 0.0 {
        return Err(Error::InvalidParameter("rho must be positive"));
    }
    let y_bar = CMatrix::vstack(y_prev, y_cur);
    let n = y_prev.cols() as f64;
    let mut best = 0usize;
    let mut best_metric = f64::NEG_INFINITY;
    for (l, s_bar) in candidates.iter().enumerate() {
        assert_eq!(s_bar.rows(), y_bar.rows(), "candidate height must match stacked blocks");
        let gram = cxmat::matmul(&cxmat::hermitian(s_bar), s_bar);
        let b = CMatrix::identity(gram.rows()).add(&gram.scale_re(rho));
        let g = cxmat::matmul(&cxmat::hermitian(s_bar), &y_bar);
        let bg = cxmat::matmul(&cxmat::inverse(&b).expect("I+ρS̄†S̄ is positive definite"), &g);
        let mut quad = 0.0;
        for r in 0..g.rows() {
            for c in 0..g.cols() {
                quad += (g.get(r, c).conj() * bg.get(r, c)).re;
            }
        }
        let det = cxmat::determinant(&b).re;
        let metric = rho * quad - n * det.ln();
        if metric > best_metric {
            best_metric = metric;
            best = l;
        }
    }
    Ok(best)
}
