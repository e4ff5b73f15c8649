//! Differential transmission with the 4-antenna quasi-orthogonal MDC code.
//!
//! The code matrix has the block form [[A, B], [B, A]], so multiplying the
//! system by [[I, I], [I, −I]] turns one 4-antenna quasi-orthogonal channel
//! into two independent 2-antenna orthogonal subsystems carrying A+B and
//! A−B. Differential encoding and decoding then run per subsystem with
//! amplitudes a^1, a^2 tracked separately. Two arrangements are supported:
//! the combined mode spreads every symbol over both subsystems (full
//! diversity with a rotated alphabet), the un-combined mode sends real
//! parts on one subsystem and imaginary parts on the other (half diversity,
//! cheapest decoding).

use crate::alphabets::{Constellation, ConstellationKind};
use crate::cxmat::{self, CMatrix};
use crate::{Complex64, Error, Result};
use alloc::vec::Vec;
// Inherent f64 math resolves whenever std is linked anywhere in the build
// graph (tests, std-enabled workspace builds); the trait supplies the same
// methods in pure no_std builds and sits idle otherwise.
#[allow(unused_imports)]
use num_traits::Float;

/// Amplitudes below this threshold make a subsystem block unrecoverable.
const DEGENERATE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QostbcMode {
    Combined,
    Uncombined,
}

impl QostbcMode {
    /// Power normalization of the information submatrices. Both subsystems
    /// share it: E[α] = 4 for the combined spread, 2 for the split one.
    pub fn p(self) -> f64 {
        match self {
            QostbcMode::Combined => 4.0,
            QostbcMode::Uncombined => 2.0,
        }
    }
}

/// The two halves of a split quantity with their subsystem amplitudes.
/// Received blocks carry amplitude 1; transmit state tracks a^1, a^2.
#[derive(Debug, Clone)]
pub struct SubsystemPair {
    pub first: CMatrix,
    pub second: CMatrix,
    pub a1: f64,
    pub a2: f64,
}

impl SubsystemPair {
    /// Transmit reference state: both subsystem blocks are the identity
    /// (full matrix I_{2h}), amplitudes 1.
    pub fn initial(half: usize) -> SubsystemPair {
        SubsystemPair {
            first: CMatrix::identity(half),
            second: CMatrix::identity(half),
            a1: 1.0,
            a2: 1.0,
        }
    }
}

/// Splits a row-stacked matrix into (top+bottom, top−bottom). Lossless.
pub fn subsystem_split(x: &CMatrix) -> Result<SubsystemPair> {
    if x.rows() % 2 != 0 {
        return Err(Error::InvalidParameter("row count must be even to split"));
    }
    let half = x.rows() / 2;
    let top = x.row_block(0, half);
    let bottom = x.row_block(half, x.rows());
    Ok(SubsystemPair {
        first: top.add(&bottom),
        second: top.sub(&bottom),
        a1: 1.0,
        a2: 1.0,
    })
}

/// Inverse of `subsystem_split`: restacks ((f+s)/2, (f−s)/2).
pub fn subsystem_merge(pair: &SubsystemPair) -> CMatrix {
    let top = pair.first.add(&pair.second).scale_re(0.5);
    let bottom = pair.first.sub(&pair.second).scale_re(0.5);
    CMatrix::vstack(&top, &bottom)
}

/// [[a, b], [−b*, a*]].
fn alamouti_block(a: Complex64, b: Complex64) -> CMatrix {
    CMatrix::from_vec(2, 2, alloc::vec![a, b, -b.conj(), a.conj()])
}

/// [[A, B], [B, A]] from the two half-size blocks.
pub fn abba(a: &CMatrix, b: &CMatrix) -> CMatrix {
    CMatrix::block2x2(a, b, b, a)
}

/// Reassembles the full transmit matrix from subsystem blocks: the chain
/// keeps S in the [[A, B], [B, A]] form with A = (S¹ᴱ+S²ᴱ)/2,
/// B = (S¹ᴱ−S²ᴱ)/2.
pub fn abba_from_subsystems(pair: &SubsystemPair) -> CMatrix {
    let a = pair.first.add(&pair.second).scale_re(0.5);
    let b = pair.first.sub(&pair.second).scale_re(0.5);
    abba(&a, &b)
}

/// Component interleaving that gives the code its minimum-decoding
/// complexity: v₁ = x₁^R + j·x₃^R, v₂ = x₂^R + j·x₄^R,
/// v₃ = −x₁^I + j·x₃^I, v₄ = −x₂^I + j·x₄^I.
pub fn mdc_interleave(x: &[Complex64]) -> [Complex64; 4] {
    assert_eq!(x.len(), 4, "the 4-antenna code carries four symbols");
    [
        Complex64::new(x[0].re, x[2].re),
        Complex64::new(x[1].re, x[3].re),
        Complex64::new(-x[0].im, x[2].im),
        Complex64::new(-x[1].im, x[3].im),
    ]
}

/// The two unnormalized subsystem symbol pairs (c₁, c₂ | c₃, c₄):
/// combined mode spreads (v₁±v₃, v₂±v₄) over both subsystems, un-combined
/// keeps (v₁, v₂) and (v₃, v₄) apart.
pub fn subsystem_symbols(mode: QostbcMode, x: &[Complex64]) -> [Complex64; 4] {
    let v = mdc_interleave(x);
    match mode {
        QostbcMode::Combined => [v[0] + v[2], v[1] + v[3], v[0] - v[2], v[1] - v[3]],
        QostbcMode::Uncombined => v,
    }
}

/// Information submatrices V^{1E} = alam(c₁, c₂)/√p, V^{2E} = alam(c₃, c₄)/√p
/// and their amplitudes a_κ² = (|c_{2κ−1}|² + |c_{2κ}|²)/p.
/// A vanishing amplitude (combined: α = |β|; un-combined: all-real or
/// all-imaginary symbols) makes that subsystem's chain division impossible.
pub fn make_info_submatrices(
    mode: QostbcMode,
    x: &[Complex64],
) -> Result<(CMatrix, CMatrix, f64, f64)> {
    if x.len() != 4 {
        return Err(Error::InvalidParameter("the 4-antenna code carries four symbols"));
    }
    let c = subsystem_symbols(mode, x);
    let p = mode.p();
    let a1_sq = (c[0].norm_sqr() + c[1].norm_sqr()) / p;
    let a2_sq = (c[2].norm_sqr() + c[3].norm_sqr()) / p;
    if a1_sq < DEGENERATE_TOL || a2_sq < DEGENERATE_TOL {
        return Err(Error::DegenerateSplit);
    }
    let scale = 1.0 / p.sqrt();
    Ok((
        alamouti_block(c[0], c[1]).scale_re(scale),
        alamouti_block(c[2], c[3]).scale_re(scale),
        a1_sq.sqrt(),
        a2_sq.sqrt(),
    ))
}

/// One differential step per subsystem: S^{κE}_new = V^{κE}·S^{κE}_prev/a^κ_prev.
/// The returned pair carries the new blocks and the new amplitudes.
pub fn encode_subsystems(
    state: &SubsystemPair,
    v1e: &CMatrix,
    v2e: &CMatrix,
    a1_new: f64,
    a2_new: f64,
) -> Result<SubsystemPair> {
    if state.a1 < DEGENERATE_TOL || state.a2 < DEGENERATE_TOL {
        return Err(Error::DegenerateSplit);
    }
    Ok(SubsystemPair {
        first: cxmat::matmul(v1e, &state.first).scale_re(1.0 / state.a1),
        second: cxmat::matmul(v2e, &state.second).scale_re(1.0 / state.a2),
        a1: a1_new,
        a2: a2_new,
    })
}

/// The full-size information matrix actually applied to the previous
/// transmit matrix: S_τ = V'·S_{τ−1} with V' in [[A', B'], [B', A']] form,
///   v'₁ = (c₁/a¹ + c₃/a²)/(2√p),  v'₂ = (c₂/a¹ + c₄/a²)/(2√p),
///   v'₃ = (c₁/a¹ − c₃/a²)/(2√p),  v'₄ = (c₂/a¹ − c₄/a²)/(2√p),
/// where (c, p) come from `subsystem_symbols` and the mode's normalization.
pub fn actual_info_matrix(
    c: &[Complex64],
    a1_prev: f64,
    a2_prev: f64,
    p: f64,
) -> Result<CMatrix> {
    if c.len() != 4 {
        return Err(Error::InvalidParameter("four subsystem symbols required"));
    }
    if a1_prev <= 0.0 || a2_prev <= 0.0 {
        return Err(Error::InvalidParameter("previous amplitudes must be positive"));
    }
    let s = 1.0 / (2.0 * p.sqrt());
    let v1 = (c[0].scale(1.0 / a1_prev) + c[2].scale(1.0 / a2_prev)).scale(s);
    let v2 = (c[1].scale(1.0 / a1_prev) + c[3].scale(1.0 / a2_prev)).scale(s);
    let v3 = (c[0].scale(1.0 / a1_prev) - c[2].scale(1.0 / a2_prev)).scale(s);
    let v4 = (c[1].scale(1.0 / a1_prev) - c[3].scale(1.0 / a2_prev)).scale(s);
    let a = alamouti_block(v1, v2);
    let b = alamouti_block(v3, v4);
    Ok(abba(&a, &b))
}

/// Subsystem dispersion matrix carrying component `i` of the original
/// symbols: real parts when `imag` is false, imaginary parts otherwise.
/// Unnormalized (the 1/√p scale is carried by the decoder weights).
fn dispersion(mode: QostbcMode, subsystem: usize, i: usize, imag: bool) -> CMatrix {
    let mut x = [Complex64::new(0.0, 0.0); 4];
    x[i] = if imag { Complex64::new(0.0, 1.0) } else { Complex64::new(1.0, 0.0) };
    let c = subsystem_symbols(mode, &x);
    if subsystem == 0 {
        alamouti_block(c[0], c[1])
    } else {
        alamouti_block(c[2], c[3])
    }
}

/// Re{tr(C·U)} with C = Y_prev·Y_cur†.
fn corr_stat(c: &CMatrix, u: &CMatrix) -> f64 {
    let mut t = Complex64::new(0.0, 0.0);
    for r in 0..c.rows() {
        for k in 0..c.cols() {
            t += c.get(r, k) * u.get(k, r);
        }
    }
    t.re
}

fn received_products(y_prev: &SubsystemPair, y_cur: &SubsystemPair) -> (CMatrix, CMatrix) {
    (
        cxmat::matmul(&y_prev.first, &cxmat::hermitian(&y_cur.first)),
        cxmat::matmul(&y_prev.second, &cxmat::hermitian(&y_cur.second)),
    )
}

/// Energy weights ỹ_κ = ‖Y^{κE}_prev‖²_F/(2√p·a^κ_prev).
fn energy_weights(y_prev: &SubsystemPair, p: f64, a1_prev: f64, a2_prev: f64) -> (f64, f64) {
    let denom = 2.0 * p.sqrt();
    (
        cxmat::frobenius_norm_sq(&y_prev.first) / (denom * a1_prev),
        cxmat::frobenius_norm_sq(&y_prev.second) / (denom * a2_prev),
    )
}

/// Per-symbol decoding for the combined arrangement. For each symbol the
/// decision minimizes
///   (ỹ₁+ỹ₂)|x|² − σ·2(ỹ₁−ỹ₂)x^R x^I − x^R(x̃_{i,1}+x̃_{i,2}) + σ·x^I(x̃_{i,1}−x̃_{i,2})
/// with σ = +1 for the first two symbols and −1 for the last two,
/// x̃_{i,κ} = Re{tr(Y^{κE}_prev·Y^{κE}_cur†·U_i^{κE})}.
pub fn decode_combined(
    y_prev: &SubsystemPair,
    y_cur: &SubsystemPair,
    constellation: &Constellation,
    a1_prev: f64,
    a2_prev: f64,
) -> Result<Vec<usize>> {
    if a1_prev <= 0.0 || a2_prev <= 0.0 {
        return Err(Error::InvalidParameter("previous amplitudes must be positive"));
    }
    let (c1, c2) = received_products(y_prev, y_cur);
    let (w1, w2) = energy_weights(y_prev, QostbcMode::Combined.p(), a1_prev, a2_prev);
    let mut out = Vec::with_capacity(4);
    for i in 0..4 {
        let u1 = dispersion(QostbcMode::Combined, 0, i, false);
        let u2 = dispersion(QostbcMode::Combined, 1, i, false);
        let x1 = corr_stat(&c1, &u1);
        let x2 = corr_stat(&c2, &u2);
        let sigma = if i < 2 { 1.0 } else { -1.0 };
        let mut best = 0usize;
        let mut best_metric = f64::INFINITY;
        for (k, &x) in constellation.points().iter().enumerate() {
            let metric = (w1 + w2) * x.norm_sqr() - sigma * 2.0 * (w1 - w2) * x.re * x.im
                - x.re * (x1 + x2)
                + sigma * x.im * (x1 - x2);
            if metric < best_metric {
                best_metric = metric;
                best = k;
            }
        }
        out.push(best);
    }
    Ok(out)
}

/// Candidates examined by the un-combined per-component decoder against a
/// joint scan: (4·(levels_re + levels_im), q⁴).
pub fn uncombined_search_space(constellation: &Constellation) -> (usize, usize) {
    let n_re = constellation.meta().re_levels.unwrap_or(constellation.size());
    let n_im = constellation.meta().im_levels.unwrap_or(1);
    (4 * (n_re + n_im), constellation.size().pow(4))
}

/// Per-component decoding for the un-combined arrangement: subsystem 1
/// decides every real part, x̂^R = argmin ỹ₁(x^R)² − x̃^R·x^R, subsystem 2
/// every imaginary part with its own statistic.
pub fn decode_uncombined(
    y_prev: &SubsystemPair,
    y_cur: &SubsystemPair,
    constellation: &Constellation,
    a1_prev: f64,
    a2_prev: f64,
) -> Result<Vec<usize>> {
    if a1_prev <= 0.0 || a2_prev <= 0.0 {
        return Err(Error::InvalidParameter("previous amplitudes must be positive"));
    }
    if constellation.kind() != ConstellationKind::RectQam {
        return Err(Error::InvalidParameter(
            "per-component decoding requires a rectangular grid",
        ));
    }
    let (c1, c2) = received_products(y_prev, y_cur);
    let (w1, w2) = energy_weights(y_prev, QostbcMode::Uncombined.p(), a1_prev, a2_prev);
    let n_im = constellation.meta().im_levels.expect("rectangular grid");
    let n_re = constellation.meta().re_levels.expect("rectangular grid");
    let mut out = Vec::with_capacity(4);
    for i in 0..4 {
        let u_re = dispersion(QostbcMode::Uncombined, 0, i, false);
        let t_im = dispersion(QostbcMode::Uncombined, 1, i, true);
        let x_re = corr_stat(&c1, &u_re);
        let x_im = corr_stat(&c2, &t_im);
        let mut best_re = 0usize;
        let mut best_v = f64::INFINITY;
        for r in 0..n_re {
            let level = constellation.point(r * n_im).re;
            let metric = w1 * level * level - x_re * level;
            if metric < best_v {
                best_v = metric;
                best_re = r;
            }
        }
        let mut best_im = 0usize;
        let mut best_v = f64::INFINITY;
        for k in 0..n_im {
            let level = constellation.point(k).im;
            let metric = w2 * level * level - x_im * level;
            if metric < best_v {
                best_v = metric;
                best_im = k;
            }
        }
        out.push(best_re * n_im + best_im);
    }
    Ok(out)
}
