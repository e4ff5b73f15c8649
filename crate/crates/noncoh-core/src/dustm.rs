//! Differential unitary space-time modulation with cyclic diagonal group
//! codes: a codebook {G^l} generated by G = diag(exp(j2π·u_m/L)), encoded by
//! index addition mod L and decoded by a correlation metric. Powers are
//! evaluated from integer residues l·u_m mod L so large exponents carry no
//! phase drift.

use crate::cxmat::CMatrix;
use crate::{Complex64, Error, Result};
use alloc::vec::Vec;
// Inherent f64 math resolves whenever std is linked anywhere in the build
// graph (tests, std-enabled workspace builds); the trait supplies the same
// methods in pure no_std builds and sits idle otherwise.
#[allow(unused_imports)]
use num_traits::Float;

/// Exhaustive u-search space bound: L^M candidates before symmetry pruning.
pub const U_SEARCH_LIMIT: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq)]
pub struct CyclicCode {
    m: usize,
    l: usize,
    u: Vec<usize>,
}

impl CyclicCode {
    pub fn antennas(&self) -> usize {
        self.m
    }

    /// Codebook size L; one block carries log2(L) bits when L is a power of two.
    pub fn size(&self) -> usize {
        self.l
    }

    pub fn u(&self) -> &[usize] {
        self.u.as_slice()
    }

    pub fn generator(&self) -> CMatrix {
        self.power(1)
    }

    /// Diagonal of V_l = G^l.
    pub fn diag_power(&self, l: usize) -> Vec<Complex64> {
        self.u
            .iter()
            .map(|&um| {
                let residue = (l % self.l) * um % self.l;
                let angle = core::f64::consts::TAU * residue as f64 / self.l as f64;
                Complex64::new(angle.cos(), angle.sin())
            })
            .collect()
    }

    /// V_l = G^l as a full matrix.
    pub fn power(&self, l: usize) -> CMatrix {
        CMatrix::diagonal(&self.diag_power(l))
    }
}

pub fn make_cyclic(u: &[usize], l: usize) -> Result<CyclicCode> {
    if l < 2 {
        return Err(Error::InvalidParameter("codebook size must be at least 2"));
    }
    if u.is_empty() {
        return Err(Error::InvalidParameter("u must have at least one entry"));
    }
    if u.iter().any(|&um| um >= l) {
        return Err(Error::InvalidParameter("u entries must lie in [0, L)"));
    }
    Ok(CyclicCode { m: u.len(), l, u: u.to_vec() })
}

/// Differential index update: the transmitted block index is
/// (z + x_prev) mod L, matching the matrix product G^z·G^{x_prev}.
pub fn encode_index(z: usize, x_prev: usize, l: usize) -> usize {
    assert!(z < l && x_prev < l, "indices must lie in [0, L)");
    (z + x_prev) % l
}

/// sin²(π·k/L) from the integer residue k, exact in the argument.
fn sin_sq(k: usize, l: usize) -> f64 {
    let s = (core::f64::consts::PI * k as f64 / l as f64).sin();
    s * s
}

/// Diversity product of the cyclic code:
/// min over l=1..L−1 of (Π_m 4·sin²(π·l·u_m/L))^{1/M}.
/// Zero exactly when some difference matrix V_l − I is rank deficient.
pub fn coding_gain_u(u: &[usize], l: usize) -> f64 {
    let m = u.len();
    let mut best = f64::INFINITY;
    for p in 1..l {
        let mut prod = 1.0;
        for &um in u {
            prod *= 4.0 * sin_sq(p * um % l, l);
        }
        if prod == 0.0 {
            return 0.0;
        }
        if prod < best {
            best = prod;
        }
    }
    best.powf(1.0 / m as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct USearch {
    pub u: Vec<usize>,
    pub coding_gain: f64,
    pub candidates_scanned: u64,
}

/// Exhaustive search for the u vector maximizing the coding gain.
///
/// Symmetry reductions without loss: scaling u by a unit mod L permutes the
/// metric values, so u₁ is fixed to 1; the gain is permutation invariant, so
/// entries are enumerated in non-decreasing order; entries are restricted to
/// residues coprime to L. Ties resolve to the lexicographically smallest
/// vector (the enumeration order combined with strict improvement).
pub fn search_u(m: usize, l: usize) -> Result<USearch> {
    if m == 0 {
        return Err(Error::InvalidParameter("antenna count must be positive"));
    }
    if l < 2 {
        return Err(Error::InvalidParameter("codebook size must be at least 2"));
    }
    let requested = (l as u64).checked_pow(m as u32).unwrap_or(u64::MAX);
    if requested > U_SEARCH_LIMIT {
        return Err(Error::SearchSpaceTooLarge { requested, limit: U_SEARCH_LIMIT });
    }
    let units: Vec<usize> = (1..l).filter(|&v| gcd(v as u64, l as u64) == 1).collect();
    let mut u = alloc::vec![1usize; m];
    let mut best_u: Option<Vec<usize>> = None;
    let mut best_cg = f64::NEG_INFINITY;
    let mut scanned = 0u64;
    // Walk non-decreasing unit-valued tails of length m−1 in lexicographic
    // order; positions hold indices into `units`. Advancing bumps the
    // rightmost incrementable position and levels everything after it.
    fn advance(idx: &mut [usize], n: usize) -> bool {
        for pos in (0..idx.len()).rev() {
            if idx[pos] + 1 < n {
                let next = idx[pos] + 1;
                for slot in idx.iter_mut().skip(pos) {
                    *slot = next;
                }
                return true;
            }
        }
        false
    }
    let mut idx = alloc::vec![0usize; m - 1];
    loop {
        for (slot, &i) in idx.iter().enumerate() {
            u[slot + 1] = units[i];
        }
        scanned += 1;
        let cg = coding_gain_u(&u, l);
        if cg > best_cg {
            best_cg = cg;
            best_u = Some(u.clone());
        }
        if !advance(&mut idx, units.len()) {
            break;
        }
    }
    Ok(USearch {
        u: best_u.expect("at least one candidate"),
        coding_gain: best_cg,
        candidates_scanned: scanned,
    })
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Published optimal u vectors, keyed by (antennas, bits per channel use).
/// Returns (u, L) with L = 2^(bits·M).
pub fn tabulated_u(m: usize, bits_per_use: usize) -> Option<(Vec<usize>, usize)> {
    let u: &[usize] = match (m, bits_per_use) {
        (1, 1) => &[1],
        (2, 1) => &[1, 1],
        (3, 1) => &[1, 1, 3],
        (4, 1) => &[1, 3, 5, 7],
        (5, 1) => &[1, 5, 7, 9, 11],
        (1, 2) => &[1],
        (2, 2) => &[1, 7],
        (3, 2) => &[1, 11, 27],
        (4, 2) => &[1, 25, 97, 107],
        (5, 2) => &[1, 157, 283, 415, 487],
        _ => return None,
    };
    Some((u.to_vec(), 1usize << (bits_per_use * m)))
}

/// ML decoding over the codebook: argmax_l ‖Y_{τ−1} + V_l†·Y_τ‖²_F, which
/// reduces to argmax_l Re{tr(V_l·Y_{τ−1}·Y_τ†)} since the quadratic terms do
/// not depend on l. The reduced form is evaluated; debug builds cross-check
/// against the norm form.
pub fn dustm_ml_decode(y_prev: &CMatrix, y_cur: &CMatrix, code: &CyclicCode) -> usize {
    assert_eq!(y_prev.rows(), code.antennas(), "row count must equal M");
    assert_eq!(y_prev.rows(), y_cur.rows(), "blocks must share shape");
    assert_eq!(y_prev.cols(), y_cur.cols(), "blocks must share shape");
    // Diagonal of Y_prev·Y_cur†; tr(V_l·Y_prev·Y_cur†) touches nothing else.
    let diag: Vec<Complex64> = (0..code.antennas())
        .map(|r| {
            (0..y_prev.cols())
                .map(|c| y_prev.get(r, c) * y_cur.get(r, c).conj())
                .sum()
        })
        .collect();
    let mut best = 0usize;
    let mut best_metric = f64::NEG_INFINITY;
    for l in 0..code.size() {
        let v = code.diag_power(l);
        let metric: f64 = v.iter().zip(&diag).map(|(g, d)| (g * d).re).sum();
        if metric > best_metric {
            best_metric = metric;
            best = l;
        }
    }
    debug_assert_eq!(best, dustm_ml_decode_norm_form(y_prev, y_cur, code));
    best
}

/// The norm form of the same metric, kept for cross-checking.
fn dustm_ml_decode_norm_form(y_prev: &CMatrix, y_cur: &CMatrix, code: &CyclicCode) -> usize {
    let mut best = 0usize;
    let mut best_metric = f64::NEG_INFINITY;
    for l in 0..code.size() {
        let v = code.diag_power(l);
        let mut metric = 0.0;
        for r in 0..y_prev.rows() {
            for c in 0..y_prev.cols() {
                let s = y_prev.get(r, c) + v[r].conj() * y_cur.get(r, c);
                metric += s.norm_sqr();
            }
        }
        if metric > best_metric {
            best_metric = metric;
            best = l;
        }
    }
    best
}

/// Bit labels in which the second half of the codebook complements the
/// first: label(l + L/2) = ~label(l). Pairs (l, l+L/2) map to blocks
/// differing by V_{L/2} = −I when every u_m is odd, so the worst-distance
/// confusion flips every bit and is maximally protected against.
pub fn complementary_bitmap(l: usize) -> Result<Vec<u32>> {
    if !l.is_power_of_two() || l < 2 {
        return Err(Error::InvalidParameter("codebook size must be a power of two"));
    }
    let mask = (l - 1) as u32;
    Ok((0..l)
        .map(|i| {
            if i < l / 2 {
                i as u32
            } else {
                ((i - l / 2) as u32) ^ mask
            }
        })
        .collect())
}
