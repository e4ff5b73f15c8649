//! Channel models and the transmit step: AWGN with an unknown uniform
//! carrier phase, quasi-static Rayleigh block fading, and Jakes-correlated
//! Rayleigh fast fading, all normalized so that `rho` is the received SNR
//! (unit channel gain variance, unit noise variance, unit mean row power).
//!
//! Randomness flows through [`RngStream`]: a (seed, substream) pair that
//! yields a counter-based generator, so parallel frames draw from disjoint
//! streams and results do not depend on worker count.

use crate::cxmat::{self, CMatrix};
use crate::{Complex64, Error, Result};
// Inherent f64 math resolves whenever std is linked anywhere in the build
// graph (tests, std-enabled workspace builds); the trait supplies the same
// methods in pure no_std builds and sits idle otherwise.
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    /// Constant unit gain with carrier phase Θ ~ Uniform(−π, π], redrawn per frame.
    AwgnPhase,
    /// Rayleigh block fading: coefficients constant over a frame.
    Rbf,
    /// Rayleigh fast fading with Jakes autocorrelation (single-antenna only).
    Rff,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelModel {
    pub kind: ChannelKind,
    /// Normalized Doppler f_D·T_s; meaningful for `Rff`, zero recovers block fading.
    pub fdts: f64,
    /// Frame length in symbols (single antenna) or blocks (multiple antennas).
    pub coherence: usize,
}

impl ChannelModel {
    pub fn new(kind: ChannelKind, fdts: f64, coherence: usize) -> Result<Self> {
        if !(0.0..1.0).contains(&fdts) {
            return Err(Error::InvalidParameter("fdts must lie in [0, 1)"));
        }
        if coherence < 1 {
            return Err(Error::InvalidParameter("coherence must be at least 1"));
        }
        Ok(ChannelModel { kind, fdts, coherence })
    }

    pub fn awgn_phase(coherence: usize) -> Result<Self> {
        Self::new(ChannelKind::AwgnPhase, 0.0, coherence)
    }

    pub fn rbf(coherence: usize) -> Result<Self> {
        Self::new(ChannelKind::Rbf, 0.0, coherence)
    }

    pub fn rff(fdts: f64, coherence: usize) -> Result<Self> {
        Self::new(ChannelKind::Rff, fdts, coherence)
    }
}

/// A reproducible randomness source: identical (seed, substream) pairs
/// yield bit-identical draws regardless of what other streams consumed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    pub seed: u64,
    pub substream: u64,
}

impl RngStream {
    pub fn new(seed: u64, substream: u64) -> Self {
        RngStream { seed, substream }
    }

    pub fn rng(&self) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(self.substream);
        rng
    }
}

/// One draw from the circularly-symmetric complex normal CN(0, 1).
pub fn cn01(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im).scale(core::f64::consts::FRAC_1_SQRT_2)
}

/// Zeroth-order Bessel function of the first kind: power series below
/// |x| = 8, standard asymptotic polynomial beyond (about 1e-8 absolute
/// accuracy there; the series regime is good to machine precision).
fn bessel_j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 8.0 {
        let q = -0.25 * ax * ax;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..64 {
            term *= q / ((k * k) as f64);
            sum += term;
            if term.abs() < 1e-18 * sum.abs().max(1.0) {
                break;
            }
        }
        sum
    } else {
        let z = 8.0 / ax;
        let y = z * z;
        let xx = ax - core::f64::consts::FRAC_PI_4;
        let p = 1.0
            + y * (-0.109_862_862_7e-2
                + y * (0.273_451_040_7e-4
                    + y * (-0.207_337_063_9e-5 + y * 0.209_388_721_1e-6)));
        let q = -0.156_249_999_5e-1
            + y * (0.143_048_876_5e-3
                + y * (-0.691_114_765_1e-5
                    + y * (0.762_109_516_1e-6 + y * (-0.934_935_152e-7))));
        (core::f64::consts::FRAC_2_PI / ax).sqrt() * (xx.cos() * p - z * xx.sin() * q)
    }
}

/// Jakes fading autocorrelation at integer lag m: J₀(2π·m·f_D·T_s).
pub fn jakes_phi(m: i64, fdts: f64) -> f64 {
    bessel_j0(core::f64::consts::TAU * m.unsigned_abs() as f64 * fdts)
}

/// T×T fast-fading covariance: real symmetric Toeplitz with entry
/// (i, k) = jakes_phi(i−k, fdts). fdts = 0 degenerates to the all-ones
/// matrix (block fading).
pub fn rff_covariance(t: usize, fdts: f64) -> CMatrix {
    assert!(t >= 1, "window length must be positive");
    let first_row: alloc::vec::Vec<f64> = (0..t).map(|m| jakes_phi(m as i64, fdts)).collect();
    CMatrix::from_fn(t, t, |i, k| {
        Complex64::new(first_row[if i > k { i - k } else { k - i }], 0.0)
    })
}

/// Draws one channel realization:
/// RBF → M×N i.i.d. CN(0,1); RFF → T×1 Jakes-colored vector (single-antenna
/// links only); AWGN_PHASE → 1×1 unit-magnitude e^{jΘ}, Θ ~ Uniform(−π, π].
pub fn draw_channel(
    model: &ChannelModel,
    m: usize,
    n: usize,
    t: usize,
    rng: &mut impl Rng,
) -> Result<CMatrix> {
    assert!(m >= 1 && n >= 1 && t >= 1, "dimensions must be positive");
    match model.kind {
        ChannelKind::AwgnPhase => {
            let u: f64 = rng.gen();
            let theta = core::f64::consts::PI * (1.0 - 2.0 * u);
            Ok(CMatrix::from_fn(1, 1, |_, _| Complex64::from_polar(1.0, theta)))
        }
        ChannelKind::Rbf => {
            let mut h = CMatrix::zeros(m, n);
            for i in 0..m {
                for k in 0..n {
                    h.set(i, k, cn01(rng));
                }
            }
            Ok(h)
        }
        ChannelKind::Rff => {
            if m * n != 1 {
                return Err(Error::InvalidParameter(
                    "fast fading supports only single-antenna links",
                ));
            }
            let l = cxmat::cholesky(&rff_covariance(t, model.fdts))?;
            let g = CMatrix::from_fn(t, 1, |_, _| cn01(rng));
            Ok(cxmat::matmul(&l, &g))
        }
    }
}

/// The noiseless channel output √ρ·S·H, used directly as a test hook.
/// Accepts the three realization shapes `draw_channel` produces: a matrix
/// with rows(H) == cols(S), a 1×1 scalar gain, or a per-symbol T×1 vector
/// matched against a T×1 signal.
pub fn apply_channel(s: &CMatrix, h: &CMatrix, rho: f64) -> CMatrix {
    assert!(rho >= 0.0, "SNR must be nonnegative");
    let a = rho.sqrt();
    if h.rows() == s.cols() {
        cxmat::matmul(s, h).scale_re(a)
    } else if h.rows() == 1 && h.cols() == 1 {
        s.scale(h.get(0, 0)).scale_re(a)
    } else if s.cols() == 1 && h.cols() == 1 && h.rows() == s.rows() {
        CMatrix::from_fn(s.rows(), 1, |i, _| a * s.get(i, 0) * h.get(i, 0))
    } else {
        panic!(
            "incompatible signal {}x{} and channel {}x{}",
            s.rows(),
            s.cols(),
            h.rows(),
            h.cols()
        );
    }
}

/// Y = √ρ·S·H + W with W i.i.d. CN(0,1).
pub fn transmit(s: &CMatrix, h: &CMatrix, rho: f64, rng: &mut impl Rng) -> CMatrix {
    let mut y = apply_channel(s, h, rho);
    for i in 0..y.rows() {
        for k in 0..y.cols() {
            let w = cn01(rng);
            y.set(i, k, y.get(i, k) + w);
        }
    }
    y
}
