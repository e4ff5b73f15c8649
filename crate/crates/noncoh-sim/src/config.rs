//! Run configuration: scheme selection, alphabet/channel/decoder specs in a
//! JSON-friendly form, validation, and a stable content hash.
//!
//! Angles are degrees here and radians inside the core library. Validation
//! happens once, up front: `resolve` either returns a fully defaulted
//! [`Resolved`] plan or a configuration error, before any simulation runs.

use crate::SimError;
use noncoh_core::alphabets::{self, BuildSpec, Constellation, ConstellationKind};
use noncoh_core::channels::{ChannelKind, ChannelModel};
use noncoh_core::dustm::{self, CyclicCode};
use noncoh_core::siso_diff::{self, DetectionMode, MsddMetric};
use noncoh_core::stcodes::{make_code, CodeKind, STCode};
use serde::{Deserialize, Serialize};

/// Transmission schemes the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Scheme {
    DpskMsdd,
    DapskMsdd,
    SimoCoh,
    SimoNoncoh,
    Dustm,
    OstbcUnitary,
    OstbcQam,
    Omdc,
    QostbcCombined,
    QostbcUncombined,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::DpskMsdd => "DPSK_MSDD",
            Scheme::DapskMsdd => "DAPSK_MSDD",
            Scheme::SimoCoh => "SIMO_COH",
            Scheme::SimoNoncoh => "SIMO_NONCOH",
            Scheme::Dustm => "DUSTM",
            Scheme::OstbcUnitary => "OSTBC_UNITARY",
            Scheme::OstbcQam => "OSTBC_QAM",
            Scheme::Omdc => "OMDC",
            Scheme::QostbcCombined => "QOSTBC_COMBINED",
            Scheme::QostbcUncombined => "QOSTBC_UNCOMBINED",
        }
    }

    fn is_block(self) -> bool {
        matches!(
            self,
            Scheme::OstbcUnitary
                | Scheme::OstbcQam
                | Scheme::Omdc
                | Scheme::QostbcCombined
                | Scheme::QostbcUncombined
        )
    }
}

/// Constellation description; mirrors the library constructors with angles
/// in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlphabetSpec {
    Psk { q: usize },
    Dask { q_a: usize, a: f64 },
    Dapsk { q_p: usize, q_a: usize, a: f64 },
    RectQam { q: usize },
    Circ8Qam,
    Omdc4,
    Omdc8,
    Mdc8Qam { r: f64, theta1_deg: f64, theta2_deg: f64 },
    Rotated { theta_deg: f64, base: Box<AlphabetSpec> },
}

impl AlphabetSpec {
    pub fn to_build(&self) -> BuildSpec {
        match self {
            AlphabetSpec::Psk { q } => BuildSpec::Psk { q: *q },
            AlphabetSpec::Dask { q_a, a } => BuildSpec::Dask { q_a: *q_a, a: *a },
            AlphabetSpec::Dapsk { q_p, q_a, a } => {
                BuildSpec::Dapsk { q_p: *q_p, q_a: *q_a, a: *a }
            }
            AlphabetSpec::RectQam { q } => BuildSpec::RectQam { q: *q },
            AlphabetSpec::Circ8Qam => BuildSpec::Circ8Qam,
            AlphabetSpec::Omdc4 => BuildSpec::Omdc4,
            AlphabetSpec::Omdc8 => BuildSpec::Omdc8,
            AlphabetSpec::Mdc8Qam { r, theta1_deg, theta2_deg } => BuildSpec::Mdc8Qam {
                r: *r,
                theta1: theta1_deg.to_radians(),
                theta2: theta2_deg.to_radians(),
            },
            AlphabetSpec::Rotated { theta_deg, base } => BuildSpec::Rotated {
                base: Box::new(base.to_build()),
                theta: theta_deg.to_radians(),
            },
        }
    }

    /// Compact text used in the CSV `constellation` column.
    pub fn short_name(&self) -> String {
        match self {
            AlphabetSpec::Psk { q } => format!("psk{q}"),
            AlphabetSpec::Dask { q_a, a } => format!("dask{q_a}-a{a:.2}"),
            AlphabetSpec::Dapsk { q_p, q_a, a } => {
                format!("dapsk{}-{q_p}x{q_a}-a{a:.2}", q_p * q_a)
            }
            AlphabetSpec::RectQam { q } => format!("qam{q}"),
            AlphabetSpec::Circ8Qam => "circ8".into(),
            AlphabetSpec::Omdc4 => "omdc4".into(),
            AlphabetSpec::Omdc8 => "omdc8".into(),
            AlphabetSpec::Mdc8Qam { r, theta1_deg, theta2_deg } => {
                format!("mdc8qam-r{r:.2}-t{theta1_deg:.2}-t{theta2_deg:.2}")
            }
            AlphabetSpec::Rotated { theta_deg, base } => {
                format!("rot{:.2}({})", theta_deg, base.short_name())
            }
        }
    }

    pub fn build(&self) -> Result<Constellation, SimError> {
        alphabets::build(&self.to_build()).map_err(SimError::from)
    }
}

/// Channel model selector; `coherence` comes from `frame_len`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelSpec {
    AwgnPhase,
    Rbf,
    Rff { fdts: f64 },
}

impl ChannelSpec {
    pub fn fdts(self) -> f64 {
        match self {
            ChannelSpec::Rff { fdts } => fdts,
            _ => 0.0,
        }
    }

    pub fn kind(self) -> ChannelKind {
        match self {
            ChannelSpec::AwgnPhase => ChannelKind::AwgnPhase,
            ChannelSpec::Rbf => ChannelKind::Rbf,
            ChannelSpec::Rff { .. } => ChannelKind::Rff,
        }
    }
}

/// Detection rule. Which variants are legal depends on the scheme; the
/// value lands in the CSV `metric` column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decoder {
    // Multiple-symbol differential detection metrics.
    MlAwgn,
    MlRbf,
    MlRff,
    Glrt,
    Corr,
    // Coherent maximum-ratio combining.
    Mrc,
    // Exact ML over a unitary codebook (DUSTM).
    Ml,
    // Differential space-time block decoders.
    FastMl,
    NearOptimal,
    Srsd,
    JointMl,
}

impl Decoder {
    pub fn name(self) -> &'static str {
        match self {
            Decoder::MlAwgn => "ml_awgn",
            Decoder::MlRbf => "ml_rbf",
            Decoder::MlRff => "ml_rff",
            Decoder::Glrt => "glrt",
            Decoder::Corr => "corr",
            Decoder::Mrc => "mrc",
            Decoder::Ml => "ml",
            Decoder::FastMl => "fast_ml",
            Decoder::NearOptimal => "near_optimal",
            Decoder::Srsd => "srsd",
            Decoder::JointMl => "joint_ml",
        }
    }

    pub fn msdd_metric(self) -> Option<MsddMetric> {
        match self {
            Decoder::MlAwgn => Some(MsddMetric::MlAwgn),
            Decoder::MlRbf => Some(MsddMetric::MlRbf),
            Decoder::MlRff => Some(MsddMetric::MlRff),
            Decoder::Glrt => Some(MsddMetric::Glrt),
            Decoder::Corr => Some(MsddMetric::Corr),
            _ => None,
        }
    }
}

/// MSDD amplitude handling across the detection window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmplitudeMode {
    Combined,
    QuasiIndependent,
}

impl AmplitudeMode {
    pub fn to_core(self) -> DetectionMode {
        match self {
            AmplitudeMode::Combined => DetectionMode::Combined,
            AmplitudeMode::QuasiIndependent => DetectionMode::QuasiIndependent,
        }
    }
}

/// Orthogonal block code selector for the OSTBC/OMDC schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockCode {
    Alamouti,
    Th4,
}

impl BlockCode {
    fn to_kind(self) -> CodeKind {
        match self {
            BlockCode::Alamouti => CodeKind::Alamouti,
            BlockCode::Th4 => CodeKind::Th4,
        }
    }
}

/// Cyclic diagonal codebook parameters for the DUSTM scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DustmSpec {
    pub u: Vec<usize>,
    pub l: usize,
}

/// Stopping rule per grid point: stop once `min_bit_errors` have been
/// counted, or hard-stop at `max_frames`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopRule {
    pub min_bit_errors: u64,
    pub max_frames: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule { min_bit_errors: 200, max_frames: 1_000_000 }
    }
}

/// One simulation run: a scheme, its dimensions, an Eb/N0 grid, and a seed.
///
/// Optional fields default per scheme during `resolve`. `constellation`
/// holds one spec applied to every symbol, or one spec per symbol for
/// block codes with mixed alphabets; DUSTM leaves it empty and sets
/// `dustm` instead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub scheme: Scheme,
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub n: Option<usize>,
    /// MSDD window length in symbols (reference included).
    #[serde(default)]
    pub t: Option<usize>,
    #[serde(default)]
    pub constellation: Vec<AlphabetSpec>,
    #[serde(default)]
    pub metric: Option<Decoder>,
    #[serde(default)]
    pub mode: Option<AmplitudeMode>,
    #[serde(default)]
    pub code: Option<BlockCode>,
    #[serde(default)]
    pub dustm: Option<DustmSpec>,
    pub channel: ChannelSpec,
    pub ebn0_grid_db: Vec<f64>,
    /// Data symbols (single antenna) or data blocks (block schemes) per
    /// frame; one channel realization per frame. Ignored by the MSDD
    /// schemes, whose frame is a single detection window.
    #[serde(default)]
    pub frame_len: Option<usize>,
    #[serde(default)]
    pub stop: StopRule,
    pub seed: u64,
    /// Feed the receiver true block amplitudes instead of
    /// decision-directed tracking (diagnostics only).
    #[serde(default)]
    pub genie_amplitude: bool,
    /// Test hook: skip the additive noise entirely.
    #[serde(default)]
    pub disable_noise: bool,
}

fn err(msg: impl Into<String>) -> SimError {
    SimError::Config(msg.into())
}

/// A validated execution plan with every default filled in.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub scheme: Scheme,
    pub m: usize,
    pub n: usize,
    pub t: usize,
    pub constellations: Vec<Constellation>,
    pub alphabet_text: String,
    pub metric: Decoder,
    pub mode: DetectionMode,
    pub code: Option<STCode>,
    pub cyclic: Option<(CyclicCode, Vec<u32>)>,
    pub channel: ChannelModel,
    pub fdts: f64,
    pub frame_len: usize,
    pub stop: StopRule,
    pub seed: u64,
    pub genie_amplitude: bool,
    pub noise: bool,
    /// Spectral efficiency in bits per channel use; differential reference
    /// overhead is not charged (it amortizes away in a stream).
    pub eta: f64,
    /// A copy of the input config with all defaults made explicit.
    pub config: SimConfig,
}

impl SimConfig {
    /// Validates the configuration and fills scheme defaults. All
    /// rejections happen here, before any simulation work.
    pub fn resolve(&self) -> Result<Resolved, SimError> {
        if self.ebn0_grid_db.is_empty() {
            return Err(err("ebn0_grid_db must be nonempty"));
        }
        if self.stop.min_bit_errors == 0 && self.stop.max_frames == 0 {
            return Err(err("stopping rule would run forever or not at all"));
        }
        if self.stop.max_frames == 0 {
            return Err(err("max_frames must be positive"));
        }
        match self.scheme {
            Scheme::DpskMsdd | Scheme::DapskMsdd => self.resolve_msdd(),
            Scheme::SimoCoh | Scheme::SimoNoncoh => self.resolve_simo(),
            Scheme::Dustm => self.resolve_dustm(),
            Scheme::OstbcUnitary | Scheme::OstbcQam | Scheme::Omdc => self.resolve_block(),
            Scheme::QostbcCombined | Scheme::QostbcUncombined => self.resolve_qostbc(),
        }
    }

    fn single_alphabet(&self) -> Result<&AlphabetSpec, SimError> {
        match self.constellation.as_slice() {
            [one] => Ok(one),
            [] => Err(err("a constellation spec is required")),
            _ => Err(err("this scheme takes exactly one constellation spec")),
        }
    }

    fn check_dims(&self, m: usize, n: usize) -> Result<(), SimError> {
        if let Some(cm) = self.m {
            if cm != m {
                return Err(err(format!("{} uses M = {m}, got {cm}", self.scheme.name())));
            }
        }
        if let Some(cn) = self.n {
            if cn != n {
                return Err(err(format!("this run is configured for N = {n}, got {cn}")));
            }
        }
        Ok(())
    }

    fn resolve_msdd(&self) -> Result<Resolved, SimError> {
        self.check_dims(1, 1)?;
        let t = self.t.unwrap_or(2);
        if t < 2 {
            return Err(err("the detection window must span at least 2 symbols"));
        }
        let spec = self.single_alphabet()?;
        let c = spec.build()?;
        match (self.scheme, c.kind()) {
            (Scheme::DpskMsdd, ConstellationKind::Psk) => {}
            (Scheme::DapskMsdd, ConstellationKind::Dapsk | ConstellationKind::Dask) => {}
            (Scheme::DpskMsdd, _) => return Err(err("DPSK_MSDD requires a PSK alphabet")),
            _ => return Err(err("DAPSK_MSDD requires a DAPSK or DASK alphabet")),
        }
        let metric = self.metric.unwrap_or(match self.channel {
            ChannelSpec::AwgnPhase => Decoder::MlAwgn,
            ChannelSpec::Rbf => Decoder::MlRbf,
            ChannelSpec::Rff { .. } => Decoder::MlRff,
        });
        let msdd = metric
            .msdd_metric()
            .ok_or_else(|| err(format!("{} is not an MSDD metric", metric.name())))?;
        match (msdd, self.channel) {
            (MsddMetric::Glrt, ChannelSpec::Rff { .. }) => {
                return Err(err(
                    "unsupported metric/channel: the GLRT metric assumes a constant \
                     channel across the window and cannot be used with time-selective \
                     fading",
                ))
            }
            (MsddMetric::MlRff, ChannelSpec::Rff { .. }) => {}
            (MsddMetric::MlRff, _) => {
                return Err(err(
                    "unsupported metric/channel: the fast-fading metric needs the \
                     time-selective channel's covariance",
                ))
            }
            _ => {}
        }
        if let ChannelSpec::Rff { fdts } = self.channel {
            if fdts <= 0.0 {
                return Err(err("time-selective fading requires fdts > 0"));
            }
        }
        // Candidate count q^(T-1) is guarded inside the detector; surface
        // the guard as a capability error at resolve time.
        let total = (c.size() as u64)
            .checked_pow((t - 1) as u32)
            .filter(|&v| v <= siso_diff::CANDIDATE_LIMIT)
            .ok_or_else(|| {
                SimError::Capability(format!(
                    "MSDD candidate set {}^{} exceeds limit {}",
                    c.size(),
                    t - 1,
                    siso_diff::CANDIDATE_LIMIT
                ))
            })?;
        let _ = total;
        let mode = self.mode.unwrap_or(AmplitudeMode::Combined);
        let eta = (c.size() as f64).log2();
        // Data symbols per frame (the bootstrap reference adds one more).
        // Constant-envelope windows are exchangeable, so DPSK defaults to a
        // single window per frame; amplitude streams default to a longer
        // run so that windows referenced by data symbols dominate the
        // counts, which is where the ring ratio actually matters.
        let frame_len = match self.frame_len {
            Some(f) if f >= 1 => f,
            Some(_) => return Err(err("frame_len must be positive")),
            None if c.kind() == ConstellationKind::Psk => t - 1,
            None => 96,
        };
        self.finish(1, 1, t, vec![c], spec.short_name(), metric, mode.to_core(), None, None, frame_len, eta)
    }

    fn resolve_simo(&self) -> Result<Resolved, SimError> {
        let n = self.n.unwrap_or(1);
        if n < 1 {
            return Err(err("at least one receive antenna is required"));
        }
        self.check_dims(1, n)?;
        let spec = self.single_alphabet()?;
        let c = spec.build()?;
        let (metric, t) = match self.scheme {
            Scheme::SimoCoh => (Decoder::Mrc, 1),
            _ => (Decoder::Corr, 2),
        };
        let metric = match self.metric {
            None => metric,
            Some(m) if m == metric => m,
            Some(m) => {
                return Err(err(format!(
                    "{} uses the {} rule, got {}",
                    self.scheme.name(),
                    metric.name(),
                    m.name()
                )))
            }
        };
        match self.channel {
            ChannelSpec::Rbf => {}
            // Coherent detection over the random-phase channel is the AWGN
            // reference curve; it is single-antenna by construction.
            ChannelSpec::AwgnPhase if self.scheme == Scheme::SimoCoh && n == 1 => {}
            _ => {
                return Err(err(
                    "SIMO schemes run over block fading (or single-antenna AwgnPhase \
                     for the coherent reference)",
                ))
            }
        }
        if self.scheme == Scheme::SimoNoncoh && !siso_diff::is_constant_envelope(&c) {
            return Err(err(
                "differential SIMO detection requires a constant-envelope alphabet",
            ));
        }
        let frame_len = self.frame_len.unwrap_or(150);
        if frame_len < 1 {
            return Err(err("frame_len must be positive"));
        }
        let eta = (c.size() as f64).log2();
        self.finish(1, n, t, vec![c], spec.short_name(), metric, DetectionMode::Combined, None, None, frame_len, eta)
            .map(|mut r| {
                r.frame_len = frame_len;
                r
            })
    }

    fn resolve_dustm(&self) -> Result<Resolved, SimError> {
        let spec = self
            .dustm
            .as_ref()
            .ok_or_else(|| err("DUSTM requires a dustm: {u, l} codebook spec"))?;
        if !self.constellation.is_empty() {
            return Err(err("DUSTM takes its codebook from the dustm field, not a constellation"));
        }
        let code = dustm::make_cyclic(&spec.u, spec.l)?;
        let bitmap = dustm::complementary_bitmap(spec.l)?;
        let m = code.antennas();
        let n = self.n.unwrap_or(1);
        self.check_dims(m, n)?;
        if self.channel != ChannelSpec::Rbf {
            return Err(err("DUSTM runs over Rayleigh block fading"));
        }
        let metric = match self.metric {
            None | Some(Decoder::Ml) => Decoder::Ml,
            Some(m) => return Err(err(format!("DUSTM decodes by exact ML, got {}", m.name()))),
        };
        let frame_len = self.frame_len.unwrap_or(50);
        if frame_len < 1 {
            return Err(err("frame_len must be positive"));
        }
        let eta = (spec.l as f64).log2() / m as f64;
        let name = format!(
            "cyclic-l{}-u{}",
            spec.l,
            spec.u.iter().map(|u| u.to_string()).collect::<Vec<_>>().join("-")
        );
        self.finish(m, n, m, Vec::new(), name, metric, DetectionMode::Combined, None, Some((code, bitmap)), frame_len, eta)
    }

    fn block_alphabets(&self, k: usize) -> Result<(Vec<Constellation>, String), SimError> {
        let specs: Vec<&AlphabetSpec> = match self.constellation.as_slice() {
            [] => return Err(err("a constellation spec is required")),
            [one] => std::iter::repeat(one).take(k).collect(),
            many if many.len() == k => many.iter().collect(),
            many => {
                return Err(err(format!(
                    "expected 1 or {k} constellation specs, got {}",
                    many.len()
                )))
            }
        };
        let mut consts = Vec::with_capacity(k);
        for s in &specs {
            consts.push(s.build()?);
        }
        let text = if self.constellation.len() <= 1 {
            specs[0].short_name()
        } else {
            specs.iter().map(|s| s.short_name()).collect::<Vec<_>>().join("/")
        };
        Ok((consts, text))
    }

    fn resolve_block(&self) -> Result<Resolved, SimError> {
        let code = make_code(self.code.unwrap_or(BlockCode::Alamouti).to_kind());
        let m = code.antennas();
        let t = code.time_slots();
        let k = code.symbols_per_block();
        let n = self.n.unwrap_or(1);
        self.check_dims(m, n)?;
        if self.channel != ChannelSpec::Rbf {
            return Err(err("space-time block schemes run over Rayleigh block fading"));
        }
        let (consts, text) = self.block_alphabets(k)?;
        let metric = match self.scheme {
            Scheme::OstbcUnitary => {
                let metric = self.metric.unwrap_or(Decoder::FastMl);
                if metric != Decoder::FastMl {
                    return Err(err(format!(
                        "OSTBC_UNITARY decodes with fast_ml, got {}",
                        metric.name()
                    )));
                }
                if !consts.iter().all(siso_diff::is_constant_envelope) {
                    return Err(err("OSTBC_UNITARY requires constant-envelope alphabets"));
                }
                metric
            }
            Scheme::Omdc => {
                let metric = self.metric.unwrap_or(Decoder::NearOptimal);
                if metric != Decoder::NearOptimal {
                    return Err(err(format!("OMDC decodes with near_optimal, got {}", metric.name())));
                }
                if !consts
                    .iter()
                    .all(|c| matches!(c.kind(), ConstellationKind::Omdc4 | ConstellationKind::Omdc8))
                {
                    return Err(err("OMDC requires the axis-alternating OMDC alphabets"));
                }
                metric
            }
            _ => {
                let metric = self.metric.unwrap_or(Decoder::NearOptimal);
                match metric {
                    Decoder::NearOptimal => {}
                    Decoder::Srsd => {
                        if !consts.iter().all(|c| c.kind() == ConstellationKind::RectQam) {
                            return Err(err(
                                "per-dimension decoding requires rectangular QAM alphabets",
                            ));
                        }
                    }
                    Decoder::JointMl => {
                        let total: u64 =
                            consts.iter().fold(1u64, |acc, c| acc.saturating_mul(c.size() as u64));
                        if total > noncoh_core::diff_stbc::JOINT_ML_LIMIT {
                            return Err(SimError::Capability(format!(
                                "joint ML search space {total} exceeds limit {}",
                                noncoh_core::diff_stbc::JOINT_ML_LIMIT
                            )));
                        }
                    }
                    other => {
                        return Err(err(format!(
                            "OSTBC_QAM decodes with near_optimal, srsd, or joint_ml, got {}",
                            other.name()
                        )))
                    }
                }
                metric
            }
        };
        let frame_len = self.frame_len.unwrap_or(50);
        if frame_len < 1 {
            return Err(err("frame_len must be positive"));
        }
        let bits: u32 = consts.iter().map(|c| c.bits_per_symbol()).sum();
        let eta = bits as f64 / t as f64;
        self.finish(m, n, t, consts, text, metric, DetectionMode::Combined, Some(code), None, frame_len, eta)
    }

    fn resolve_qostbc(&self) -> Result<Resolved, SimError> {
        let n = self.n.unwrap_or(1);
        self.check_dims(4, n)?;
        if self.code.is_some() {
            return Err(err("the quasi-orthogonal schemes fix their own 4-antenna code"));
        }
        if self.channel != ChannelSpec::Rbf {
            return Err(err("space-time block schemes run over Rayleigh block fading"));
        }
        let spec = self.single_alphabet()?;
        let c = spec.build()?;
        let metric = self.metric.unwrap_or(Decoder::NearOptimal);
        if metric != Decoder::NearOptimal {
            return Err(err(format!(
                "the quasi-orthogonal decoders are the near_optimal family, got {}",
                metric.name()
            )));
        }
        match self.scheme {
            Scheme::QostbcCombined => {
                // A point on either diagonal admits symbol combinations whose
                // combined subsystem amplitude collapses to zero; the rotated
                // alphabets used with this arrangement avoid the diagonals.
                if c.points().iter().any(|x| (x.re.abs() - x.im.abs()).abs() < 1e-9) {
                    return Err(err(
                        "the combined arrangement needs an alphabet with no point on \
                         the |Re| = |Im| diagonals (rotate the alphabet)",
                    ));
                }
            }
            _ => {
                if c.kind() != ConstellationKind::RectQam {
                    return Err(err(
                        "the un-combined arrangement decodes per real dimension and \
                         requires a rectangular QAM alphabet",
                    ));
                }
            }
        }
        let frame_len = self.frame_len.unwrap_or(50);
        if frame_len < 1 {
            return Err(err("frame_len must be positive"));
        }
        let eta = c.bits_per_symbol() as f64; // 4 symbols over 4 slots
        self.finish(4, n, 4, vec![c], spec.short_name(), metric, DetectionMode::Combined, None, None, frame_len, eta)
    }

    #[allow(clippy::too_many_arguments)]
    fn finish(
        &self,
        m: usize,
        n: usize,
        t: usize,
        constellations: Vec<Constellation>,
        alphabet_text: String,
        metric: Decoder,
        mode: DetectionMode,
        code: Option<STCode>,
        cyclic: Option<(CyclicCode, Vec<u32>)>,
        frame_len: usize,
        eta: f64,
    ) -> Result<Resolved, SimError> {
        let channel = ChannelModel::new(self.channel.kind(), self.channel.fdts(), frame_len)?;
        let mut config = self.clone();
        config.m = Some(m);
        config.n = Some(n);
        config.t = Some(t);
        config.metric = Some(metric);
        config.mode = Some(match mode {
            DetectionMode::Combined => AmplitudeMode::Combined,
            DetectionMode::QuasiIndependent => AmplitudeMode::QuasiIndependent,
        });
        if self.scheme.is_block() && !matches!(self.scheme, Scheme::QostbcCombined | Scheme::QostbcUncombined) {
            config.code = Some(self.code.unwrap_or(BlockCode::Alamouti));
        }
        config.frame_len = Some(frame_len);
        Ok(Resolved {
            scheme: self.scheme,
            m,
            n,
            t,
            constellations,
            alphabet_text,
            metric,
            mode,
            code,
            cyclic,
            channel,
            fdts: self.channel.fdts(),
            frame_len,
            stop: self.stop,
            seed: self.seed,
            genie_amplitude: self.genie_amplitude,
            noise: !self.disable_noise,
            eta,
            config,
        })
    }

    /// FNV-1a 64 over the canonical JSON of the resolved config; stable
    /// across runs for identical inputs regardless of which defaults were
    /// spelled out.
    pub fn content_hash(&self) -> Result<String, SimError> {
        let resolved = self.resolve()?;
        Ok(resolved.content_hash())
    }
}

impl Resolved {
    pub fn content_hash(&self) -> String {
        let text = serde_json::to_string(&self.config).expect("config serializes");
        format!("{:016x}", fnv1a64(text.as_bytes()))
    }

    pub fn resolved_json(&self) -> String {
        serde_json::to_string(&self.config).expect("config serializes")
    }
}

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(scheme: Scheme) -> SimConfig {
        SimConfig {
            scheme,
            m: None,
            n: None,
            t: None,
            constellation: vec![AlphabetSpec::Psk { q: 4 }],
            metric: None,
            mode: None,
            code: None,
            dustm: None,
            channel: ChannelSpec::Rbf,
            ebn0_grid_db: vec![10.0],
            frame_len: None,
            stop: StopRule::default(),
            seed: 7,
            genie_amplitude: false,
            disable_noise: false,
        }
    }

    #[test]
    fn json_round_trip_keeps_every_field() {
        let mut cfg = base(Scheme::DapskMsdd);
        cfg.constellation = vec![AlphabetSpec::Dapsk { q_p: 8, q_a: 2, a: 2.1 }];
        cfg.t = Some(3);
        cfg.metric = Some(Decoder::MlRbf);
        cfg.mode = Some(AmplitudeMode::QuasiIndependent);
        let text = serde_json::to_string(&cfg).unwrap();
        let back: SimConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
        assert!(text.contains("\"DAPSK_MSDD\""), "scheme tag spelling: {text}");
        assert!(text.contains("\"dapsk\""), "alphabet tag spelling: {text}");
    }

    #[test]
    fn defaults_fill_in_for_a_minimal_config() {
        let text = r#"{
            "scheme": "DPSK_MSDD",
            "constellation": [{"kind": "psk", "q": 4}],
            "channel": {"kind": "rbf"},
            "ebn0_grid_db": [10.0],
            "seed": 1
        }"#;
        let cfg: SimConfig = serde_json::from_str(text).unwrap();
        assert_eq!(cfg.stop, StopRule { min_bit_errors: 200, max_frames: 1_000_000 });
        let r = cfg.resolve().unwrap();
        assert_eq!((r.m, r.n, r.t), (1, 1, 2));
        assert_eq!(r.metric, Decoder::MlRbf);
        assert_eq!(r.eta, 2.0);
        assert_eq!(r.config.t, Some(2));
    }

    #[test]
    fn glrt_over_fast_fading_is_rejected() {
        let mut cfg = base(Scheme::DpskMsdd);
        cfg.channel = ChannelSpec::Rff { fdts: 0.02 };
        cfg.metric = Some(Decoder::Glrt);
        let e = cfg.resolve().unwrap_err();
        assert!(matches!(e, SimError::Config(_)));
        assert!(e.to_string().contains("unsupported metric/channel"), "{e}");
    }

    #[test]
    fn srsd_requires_a_rectangular_grid() {
        let mut cfg = base(Scheme::OstbcQam);
        cfg.constellation = vec![AlphabetSpec::Rotated {
            theta_deg: 13.28,
            base: Box::new(AlphabetSpec::RectQam { q: 16 }),
        }];
        cfg.metric = Some(Decoder::Srsd);
        assert!(cfg.resolve().is_err());
        cfg.constellation = vec![AlphabetSpec::RectQam { q: 16 }];
        assert!(cfg.resolve().is_ok());
    }

    #[test]
    fn combined_arrangement_rejects_diagonal_points() {
        let mut cfg = base(Scheme::QostbcCombined);
        cfg.constellation = vec![AlphabetSpec::RectQam { q: 16 }];
        assert!(cfg.resolve().is_err(), "unrotated QAM sits on the diagonals");
        cfg.constellation = vec![AlphabetSpec::Rotated {
            theta_deg: 13.28,
            base: Box::new(AlphabetSpec::RectQam { q: 16 }),
        }];
        assert!(cfg.resolve().is_ok());
    }

    #[test]
    fn uncombined_arrangement_requires_rect_qam() {
        let mut cfg = base(Scheme::QostbcUncombined);
        cfg.constellation = vec![AlphabetSpec::Psk { q: 4 }];
        assert!(cfg.resolve().is_err());
        cfg.constellation = vec![AlphabetSpec::RectQam { q: 16 }];
        assert!(cfg.resolve().is_ok());
    }

    #[test]
    fn dustm_requires_its_codebook_spec() {
        let mut cfg = base(Scheme::Dustm);
        cfg.constellation = Vec::new();
        assert!(cfg.resolve().is_err());
        cfg.dustm = Some(DustmSpec { u: vec![1, 7], l: 16 });
        let r = cfg.resolve().unwrap();
        assert_eq!(r.m, 2);
        assert_eq!(r.eta, 2.0);
        assert!(r.alphabet_text.contains("l16"));
    }

    #[test]
    fn mixed_alphabets_must_match_the_symbol_count() {
        let mut cfg = base(Scheme::OstbcQam);
        cfg.code = Some(BlockCode::Th4);
        cfg.constellation = vec![
            AlphabetSpec::RectQam { q: 32 },
            AlphabetSpec::RectQam { q: 32 },
        ];
        assert!(cfg.resolve().is_err(), "T-H carries three symbols");
        cfg.constellation.push(AlphabetSpec::RectQam { q: 64 });
        let r = cfg.resolve().unwrap();
        assert_eq!(r.eta, 4.0);
        assert_eq!(r.alphabet_text, "qam32/qam32/qam64");
    }

    #[test]
    fn hash_is_stable_and_ignores_default_spelling() {
        let cfg = base(Scheme::DpskMsdd);
        let mut spelled = cfg.clone();
        spelled.t = Some(2);
        spelled.metric = Some(Decoder::MlRbf);
        assert_eq!(cfg.content_hash().unwrap(), spelled.content_hash().unwrap());
        let mut other = cfg.clone();
        other.seed = 8;
        assert_ne!(cfg.content_hash().unwrap(), other.content_hash().unwrap());
    }

    #[test]
    fn fnv_test_vectors() {
        assert_eq!(fnv1a64(b""), 0xcbf2_9ce4_8422_2325);
        assert_eq!(fnv1a64(b"a"), 0xaf63_dc4c_8601_ec8c);
        assert_eq!(fnv1a64(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn empty_grid_is_rejected_before_anything_runs() {
        let mut cfg = base(Scheme::DpskMsdd);
        cfg.ebn0_grid_db = Vec::new();
        assert!(cfg.resolve().is_err());
    }

    #[test]
    fn msdd_candidate_guard_is_a_capability_error() {
        let mut cfg = base(Scheme::DpskMsdd);
        cfg.constellation = vec![AlphabetSpec::Psk { q: 64 }];
        cfg.t = Some(6);
        match cfg.resolve() {
            Err(SimError::Capability(_)) => {}
            other => panic!("expected a capability guard, got {other:?}"),
        }
    }
}
