//! Per-scheme frame simulators. A frame is one channel realization: an
//! MSDD detection window for the single-antenna schemes, or a reference
//! block plus `frame_len` data blocks (symbols) for everything else. The
//! frame-initial reference carries no information and is never counted.

use crate::config::{Decoder, Resolved, Scheme};
use crate::SimError;
use noncoh_core::alphabets::Constellation;
use noncoh_core::channels::{self, cn01, ChannelModel};
use noncoh_core::cxmat::CMatrix;
use noncoh_core::diff_qostbc::{self, QostbcMode, SubsystemPair};
use noncoh_core::diff_stbc::{self, DiffState};
use noncoh_core::dustm::CyclicCode;
use noncoh_core::siso_diff::{self, CandidateSet, MsddConfig, MsddDetector, WindowRef};
use noncoh_core::stcodes::{assemble, STCode};
use noncoh_core::Complex64;
use rand::Rng;
use rand_chacha::ChaCha12Rng;

/// Raw error counters; merging is integer addition, so parallel partial
/// sums combine deterministically in any order.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct Counts {
    pub frames: u64,
    pub bits: u64,
    pub bit_errors: u64,
    pub symbols: u64,
    pub symbol_errors: u64,
}

impl Counts {
    pub fn merge(self, o: Counts) -> Counts {
        Counts {
            frames: self.frames + o.frames,
            bits: self.bits + o.bits,
            bit_errors: self.bit_errors + o.bit_errors,
            symbols: self.symbols + o.symbols,
            symbol_errors: self.symbol_errors + o.symbol_errors,
        }
    }
}

/// An immutable, shareable simulator for one grid point.
pub enum Runner {
    Msdd(MsddRunner),
    SimoCoh(SimoCohRunner),
    SimoNoncoh(SimoNoncohRunner),
    Dustm(DustmRunner),
    Block(BlockRunner),
    Qostbc(QostbcRunner),
}

impl Runner {
    pub fn build(r: &Resolved, rho: f64) -> Result<Runner, SimError> {
        Ok(match r.scheme {
            Scheme::DpskMsdd | Scheme::DapskMsdd => Runner::Msdd(MsddRunner::build(r, rho)?),
            Scheme::SimoCoh => Runner::SimoCoh(SimoCohRunner::build(r, rho)),
            Scheme::SimoNoncoh => Runner::SimoNoncoh(SimoNoncohRunner::build(r, rho)),
            Scheme::Dustm => Runner::Dustm(DustmRunner::build(r, rho)),
            Scheme::OstbcUnitary | Scheme::OstbcQam | Scheme::Omdc => {
                Runner::Block(BlockRunner::build(r, rho))
            }
            Scheme::QostbcCombined | Scheme::QostbcUncombined => {
                Runner::Qostbc(QostbcRunner::build(r, rho))
            }
        })
    }

    pub fn frame(&self, rng: &mut ChaCha12Rng) -> Counts {
        match self {
            Runner::Msdd(x) => x.frame(rng),
            Runner::SimoCoh(x) => x.frame(rng),
            Runner::SimoNoncoh(x) => x.frame(rng),
            Runner::Dustm(x) => x.frame(rng),
            Runner::Block(x) => x.frame(rng),
            Runner::Qostbc(x) => x.frame(rng),
        }
    }
}

fn count_symbol(counts: &mut Counts, c: &Constellation, sent: usize, decided: usize) {
    let bits = c.bits_per_symbol() as u64;
    counts.bits += bits;
    counts.symbols += 1;
    if sent != decided {
        counts.symbol_errors += 1;
        counts.bit_errors += (c.label(sent) ^ c.label(decided)).count_ones() as u64;
    }
}

/// Single-antenna MSDD: one detection window per frame, reference symbol
/// s₀ = 1 implied, the channel redrawn every frame.
/// MSDD over a differential stream: a frame is the unit bootstrap symbol
/// followed by `frame_len` data symbols, decoded in overlapping windows
/// that share one reference symbol. Each window's amplitude anchor is the
/// measured magnitude of its reference, and the ring the candidates wrap
/// around comes from the previous window's decision (or the true state
/// under the genie switch). With `frame_len = T − 1` a frame collapses to
/// the single bootstrap window.
pub struct MsddRunner {
    detector: MsddDetector,
    /// Ratio windows per reference ring; index = ring of the reference.
    anchored: Vec<CandidateSet>,
    constellation: Constellation,
    q_a: usize,
    t: usize,
    frame_len: usize,
    channel: ChannelModel,
    rho: f64,
    noise: bool,
    genie: bool,
}

impl MsddRunner {
    fn build(r: &Resolved, rho: f64) -> Result<MsddRunner, SimError> {
        let c = r.constellations[0].clone();
        let metric = r.metric.msdd_metric().expect("validated as an MSDD metric");
        let mut cfg = MsddConfig::new(r.t, metric).with_mode(r.mode).with_rho(rho);
        if r.metric == Decoder::MlRff {
            cfg = cfg.with_cov(channels::rff_covariance(r.t, r.fdts));
        }
        let detector = MsddDetector::new(cfg, &c)?;
        let q_a = c.dapsk_split().map(|(_, qa)| qa).unwrap_or(1);
        // Round the data span up to whole windows.
        let step = r.t - 1;
        let frame_len = r.frame_len.div_ceil(step) * step;
        let anchored = if frame_len > step {
            (0..q_a).map(|w| CandidateSet::build_anchored(&c, r.t, w)).collect::<Result<_, _>>()?
        } else {
            Vec::new()
        };
        Ok(MsddRunner {
            detector,
            anchored,
            constellation: c,
            q_a,
            t: r.t,
            frame_len,
            channel: r.channel,
            rho,
            noise: r.noise,
            genie: r.genie_amplitude,
        })
    }

    fn frame(&self, rng: &mut ChaCha12Rng) -> Counts {
        let c = &self.constellation;
        let q = c.size();
        let info: Vec<usize> = (0..self.frame_len).map(|_| rng.gen_range(0..q)).collect();
        let enc = siso_diff::diff_encode(&info, c, None).expect("indices drawn in range");
        let len = self.frame_len + 1;
        let mut s = CMatrix::zeros(len, 1);
        s.set(0, 0, Complex64::new(1.0, 0.0));
        for (i, &x) in enc.iter().enumerate() {
            s.set(i + 1, 0, x);
        }
        let h = self.draw_stream_channel(len, rng);
        let y = if self.noise {
            channels::transmit(&s, &h, self.rho, rng)
        } else {
            channels::apply_channel(&s, &h, self.rho)
        };
        let y_col: Vec<Complex64> = (0..len).map(|i| y.get(i, 0)).collect();
        let sqrt_rho = self.rho.sqrt();
        let mut counts = Counts { frames: 1, ..Counts::default() };
        let mut ring = 0usize;
        let mut true_ring = 0usize;
        let step = self.t - 1;
        for j in 0..self.frame_len / step {
            let base = j * step;
            let ywin = &y_col[base..base + self.t];
            let scale = ywin[0].norm() / sqrt_rho;
            let (decided, _) = if j == 0 {
                self.detector.detect_anchored(
                    ywin,
                    self.detector.candidates(),
                    WindowRef::Bootstrap,
                    scale,
                )
            } else {
                let w = if self.genie { true_ring } else { ring };
                self.detector.detect_anchored(ywin, &self.anchored[w], WindowRef::Ring(w), scale)
            };
            for (&z, &d) in info[base..base + step].iter().zip(&decided) {
                count_symbol(&mut counts, c, z, d);
                ring = (ring + d % self.q_a) % self.q_a;
                true_ring = (true_ring + z % self.q_a) % self.q_a;
            }
        }
        counts
    }

    /// Channel gains for one frame. As everywhere in this crate, the frame
    /// is the coherence unit: the random-phase and block-fading channels
    /// hold one scalar gain across the frame, while fast fading draws a
    /// per-symbol gain vector with the exact window autocorrelation.
    fn draw_stream_channel(&self, len: usize, rng: &mut ChaCha12Rng) -> CMatrix {
        channels::draw_channel(&self.channel, 1, 1, len, rng)
            .expect("single-antenna shapes are always valid")
    }
}

/// Coherent SIMO with maximum-ratio combining and genie channel knowledge.
pub struct SimoCohRunner {
    constellation: Constellation,
    n: usize,
    frame_len: usize,
    channel: ChannelModel,
    rho: f64,
    noise: bool,
}

impl SimoCohRunner {
    fn build(r: &Resolved, rho: f64) -> SimoCohRunner {
        SimoCohRunner {
            constellation: r.constellations[0].clone(),
            n: r.n,
            frame_len: r.frame_len,
            channel: r.channel,
            rho,
            noise: r.noise,
        }
    }

    fn frame(&self, rng: &mut ChaCha12Rng) -> Counts {
        let c = &self.constellation;
        let q = c.size();
        let a = self.rho.sqrt();
        let h = channels::draw_channel(&self.channel, 1, self.n, 1, rng)
            .expect("SIMO shapes are always valid");
        // AwgnPhase realizations are 1×1; block fading gives a 1×N row.
        let h_row: Vec<Complex64> = (0..self.n).map(|k| h.get(0, k.min(h.cols() - 1))).collect();
        let h_eff: Vec<Complex64> = h_row.iter().map(|&g| g.scale(a)).collect();
        let mut counts = Counts { frames: 1, ..Counts::default() };
        let mut y = vec![Complex64::new(0.0, 0.0); self.n];
        for _ in 0..self.frame_len {
            let z = rng.gen_range(0..q);
            let x = c.point(z);
            for (yk, &g) in y.iter_mut().zip(&h_row) {
                *yk = x * g.scale(a);
                if self.noise {
                    *yk += cn01(rng);
                }
            }
            let d = siso_diff::simo_mrc_detect(&y, &h_eff, c);
            count_symbol(&mut counts, c, z, d);
        }
        counts
    }
}

/// Differential SIMO with symbol-by-symbol detection over consecutive
/// received rows. With N = 1 and frame_len = 1 this is the exact same
/// experiment as DPSK MSDD with a two-symbol window, drawn in the same
/// order from the same substream.
pub struct SimoNoncohRunner {
    constellation: Constellation,
    n: usize,
    frame_len: usize,
    channel: ChannelModel,
    rho: f64,
    noise: bool,
}

impl SimoNoncohRunner {
    fn build(r: &Resolved, rho: f64) -> SimoNoncohRunner {
        SimoNoncohRunner {
            constellation: r.constellations[0].clone(),
            n: r.n,
            frame_len: r.frame_len,
            channel: r.channel,
            rho,
            noise: r.noise,
        }
    }

    fn frame(&self, rng: &mut ChaCha12Rng) -> Counts {
        let c = &self.constellation;
        let q = c.size();
        let a = self.rho.sqrt();
        let info: Vec<usize> = (0..self.frame_len).map(|_| rng.gen_range(0..q)).collect();
        let h = channels::draw_channel(&self.channel, 1, self.n, 1, rng)
            .expect("SIMO shapes are always valid");
        let enc = siso_diff::diff_encode(&info, c, None).expect("indices drawn in range");
        let mut rows: Vec<Vec<Complex64>> = Vec::with_capacity(self.frame_len + 1);
        for t in 0..=self.frame_len {
            let s = if t == 0 { Complex64::new(1.0, 0.0) } else { enc[t - 1] };
            let mut row = Vec::with_capacity(self.n);
            for k in 0..self.n {
                let mut y = s * h.get(0, k).scale(a);
                if self.noise {
                    y += cn01(rng);
                }
                row.push(y);
            }
            rows.push(row);
        }
        let mut counts = Counts { frames: 1, ..Counts::default() };
        for t in 1..=self.frame_len {
            let d = siso_diff::simo_diff_detect(&rows[t - 1], &rows[t], c)
                .expect("constant envelope checked at resolve time");
            count_symbol(&mut counts, c, info[t - 1], d);
        }
        counts
    }
}

fn bitmap_errors(bitmap: &[u32], sent: usize, decided: usize) -> u64 {
    (bitmap[sent] ^ bitmap[decided]).count_ones() as u64
}

/// Differential unitary space-time modulation with a cyclic diagonal
/// codebook and exact ML block decisions.
pub struct DustmRunner {
    code: CyclicCode,
    bitmap: Vec<u32>,
    bits_per_block: u64,
    m: usize,
    n: usize,
    frame_len: usize,
    channel: ChannelModel,
    rho: f64,
    noise: bool,
}

impl DustmRunner {
    fn build(r: &Resolved, rho: f64) -> DustmRunner {
        let (code, bitmap) = r.cyclic.clone().expect("resolved DUSTM carries its codebook");
        let bits_per_block = (code.size() as f64).log2() as u64;
        DustmRunner {
            code,
            bitmap,
            bits_per_block,
            m: r.m,
            n: r.n,
            frame_len: r.frame_len,
            channel: r.channel,
            rho,
            noise: r.noise,
        }
    }

    fn frame(&self, rng: &mut ChaCha12Rng) -> Counts {
        let l = self.code.size();
        let h = channels::draw_channel(&self.channel, self.m, self.n, 1, rng)
            .expect("block-fading draw");
        let mut s = CMatrix::identity(self.m);
        let mut y_prev = self.observe(&s, &h, rng);
        let mut counts = Counts { frames: 1, ..Counts::default() };
        for _ in 0..self.frame_len {
            let z = rng.gen_range(0..l);
            let d = self.code.diag_power(z);
            s = CMatrix::from_fn(self.m, self.m, |i, k| d[i] * s.get(i, k));
            let y_cur = self.observe(&s, &h, rng);
            let decided = noncoh_core::dustm::dustm_ml_decode(&y_prev, &y_cur, &self.code);
            counts.bits += self.bits_per_block;
            counts.symbols += 1;
            if decided != z {
                counts.symbol_errors += 1;
                counts.bit_errors += bitmap_errors(&self.bitmap, z, decided);
            }
            y_prev = y_cur;
        }
        counts
    }

    fn observe(&self, s: &CMatrix, h: &CMatrix, rng: &mut ChaCha12Rng) -> CMatrix {
        if self.noise {
            channels::transmit(s, h, self.rho, rng)
        } else {
            channels::apply_channel(s, h, self.rho)
        }
    }
}

/// Differential orthogonal space-time block schemes: unitary (PSK blocks),
/// scaled-unitary QAM blocks, and the axis-alternating OMDC alphabets.
/// Amplitude tracking at the receiver is decision-directed unless the
/// genie switch feeds it the true previous amplitude.
pub struct BlockRunner {
    code: STCode,
    consts: Vec<Constellation>,
    metric: Decoder,
    unitary: bool,
    genie: bool,
    n: usize,
    frame_len: usize,
    channel: ChannelModel,
    rho: f64,
    noise: bool,
}

impl BlockRunner {
    fn build(r: &Resolved, rho: f64) -> BlockRunner {
        BlockRunner {
            code: r.code.clone().expect("resolved block scheme carries its code"),
            consts: r.constellations.clone(),
            metric: r.metric,
            unitary: r.scheme == Scheme::OstbcUnitary,
            genie: r.genie_amplitude,
            n: r.n,
            frame_len: r.frame_len,
            channel: r.channel,
            rho,
            noise: r.noise,
        }
    }

    fn frame(&self, rng: &mut ChaCha12Rng) -> Counts {
        let refs: Vec<&Constellation> = self.consts.iter().collect();
        let k = self.code.symbols_per_block();
        let m = self.code.antennas();
        let h = channels::draw_channel(&self.channel, m, self.n, 1, rng)
            .expect("block-fading draw");
        let mut state = DiffState::initial(m);
        let mut y_prev = self.observe(&state.s_prev, &h, rng);
        let mut a_rx = 1.0f64;
        let mut counts = Counts { frames: 1, ..Counts::default() };
        let mut symbols = vec![Complex64::new(0.0, 0.0); k];
        for _ in 0..self.frame_len {
            let sent: Vec<usize> =
                self.consts.iter().map(|c| rng.gen_range(0..c.size())).collect();
            for (s, (&z, c)) in symbols.iter_mut().zip(sent.iter().zip(&self.consts)) {
                *s = c.point(z);
            }
            let v = assemble(&self.code, &symbols).expect("symbol count matches the code");
            state = if self.unitary {
                diff_stbc::encode_unitary(&v, &state).expect("PSK blocks are unitary").1
            } else {
                diff_stbc::encode_nonunitary(&v, &state).expect("blocks are scaled-unitary").1
            };
            let y_cur = self.observe(&state.s_prev, &h, rng);
            let decided = match self.metric {
                Decoder::FastMl => {
                    diff_stbc::decode_fast_ml_unitary(&y_prev, &y_cur, &self.code, &refs)
                }
                Decoder::Srsd => {
                    diff_stbc::decode_srsd(&y_prev, &y_cur, &self.code, &refs, a_rx)
                }
                Decoder::JointMl => diff_stbc::decode_ml_nonunitary(
                    &y_prev, &y_cur, &self.code, &refs, self.rho, a_rx,
                ),
                _ => diff_stbc::decode_near_optimal(&y_prev, &y_cur, &self.code, &refs, a_rx),
            }
            .expect("decoder arguments validated at resolve time");
            for i in 0..k {
                count_symbol(&mut counts, &self.consts[i], sent[i], decided[i]);
            }
            a_rx = if self.genie {
                state.a_prev
            } else {
                let e: f64 =
                    decided.iter().zip(&self.consts).map(|(&d, c)| c.point(d).norm_sqr()).sum();
                (e / self.code.p()).sqrt()
            };
            y_prev = y_cur;
        }
        counts
    }

    fn observe(&self, s: &CMatrix, h: &CMatrix, rng: &mut ChaCha12Rng) -> CMatrix {
        if self.noise {
            channels::transmit(s, h, self.rho, rng)
        } else {
            channels::apply_channel(s, h, self.rho)
        }
    }
}

/// The 4-antenna quasi-orthogonal schemes. Transmission runs the two
/// equivalent 2×2 subsystems; the receiver splits each observation into
/// the same subsystems and decodes per symbol (combined) or per real
/// dimension (un-combined).
pub struct QostbcRunner {
    mode: QostbcMode,
    constellation: Constellation,
    genie: bool,
    n: usize,
    frame_len: usize,
    channel: ChannelModel,
    rho: f64,
    noise: bool,
}

impl QostbcRunner {
    fn build(r: &Resolved, rho: f64) -> QostbcRunner {
        QostbcRunner {
            mode: match r.scheme {
                Scheme::QostbcUncombined => QostbcMode::Uncombined,
                _ => QostbcMode::Combined,
            },
            constellation: r.constellations[0].clone(),
            genie: r.genie_amplitude,
            n: r.n,
            frame_len: r.frame_len,
            channel: r.channel,
            rho,
            noise: r.noise,
        }
    }

    fn frame(&self, rng: &mut ChaCha12Rng) -> Counts {
        let c = &self.constellation;
        let q = c.size();
        let h = channels::draw_channel(&self.channel, 4, self.n, 1, rng)
            .expect("block-fading draw");
        let mut state = SubsystemPair::initial(2);
        let mut y_prev = self.split_observation(&state, &h, rng);
        let (mut a1_rx, mut a2_rx) = (1.0f64, 1.0f64);
        let mut counts = Counts { frames: 1, ..Counts::default() };
        let mut x = [Complex64::new(0.0, 0.0); 4];
        for _ in 0..self.frame_len {
            let sent: [usize; 4] = std::array::from_fn(|_| rng.gen_range(0..q));
            for (xi, &z) in x.iter_mut().zip(&sent) {
                *xi = c.point(z);
            }
            let (v1, v2, a1, a2) = diff_qostbc::make_info_submatrices(self.mode, &x)
                .expect("alphabet validated non-degenerate at resolve time");
            state = diff_qostbc::encode_subsystems(&state, &v1, &v2, a1, a2)
                .expect("chain amplitudes stay positive");
            let y_cur = self.split_observation(&state, &h, rng);
            let decided = match self.mode {
                QostbcMode::Combined => {
                    diff_qostbc::decode_combined(&y_prev, &y_cur, c, a1_rx, a2_rx)
                }
                QostbcMode::Uncombined => {
                    diff_qostbc::decode_uncombined(&y_prev, &y_cur, c, a1_rx, a2_rx)
                }
            }
            .expect("decoder arguments validated at resolve time");
            for (&z, &d) in sent.iter().zip(&decided) {
                count_symbol(&mut counts, c, z, d);
            }
            (a1_rx, a2_rx) = if self.genie {
                (a1, a2)
            } else {
                let dec_points: [Complex64; 4] = std::array::from_fn(|i| c.point(decided[i]));
                let (_, _, a1d, a2d) = diff_qostbc::make_info_submatrices(self.mode, &dec_points)
                    .expect("decided symbols come from the same alphabet");
                (a1d, a2d)
            };
            y_prev = y_cur;
        }
        counts
    }

    fn split_observation(
        &self,
        state: &SubsystemPair,
        h: &CMatrix,
        rng: &mut ChaCha12Rng,
    ) -> SubsystemPair {
        let s_full = diff_qostbc::abba_from_subsystems(state);
        let y_full = if self.noise {
            channels::transmit(&s_full, h, self.rho, rng)
        } else {
            channels::apply_channel(&s_full, h, self.rho)
        };
        diff_qostbc::subsystem_split(&y_full).expect("observations have four rows")
    }
}
