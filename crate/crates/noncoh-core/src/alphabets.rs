//! Constellation constructors: PSK, DASK (concentric amplitude rings),
//! DAPSK (their product), rectangular QAM with per-axis labels, the
//! circular 8-QAM tuned for orthogonal block codes, the axis-constrained
//! OMDC sets, the two-ring MDC 8-QAM, and rotation of any base set.
//!
//! Every constructor normalizes to unit average symbol energy and attaches
//! bit labels. Phase bits are the high-order bits of a DAPSK label and the
//! real-axis bits are the high-order bits of a rectangular QAM label; each
//! sub-field is gray-coded on its own.

use crate::{Complex64, Error, Result};
use alloc::boxed::Box;
use alloc::vec::Vec;
// Inherent f64 math resolves whenever std is linked anywhere in the build
// graph (tests, std-enabled workspace builds); the trait supplies the same
// methods in pure no_std builds and sits idle otherwise.
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstellationKind {
    Psk,
    Dask,
    Dapsk,
    RectQam,
    Circ8Qam,
    Omdc4,
    Omdc8,
    Mdc8Qam,
    Rotated,
}

/// Construction metadata; only the fields meaningful for the kind are set.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Meta {
    /// Ring ratio `a` (DASK/DAPSK) or outer/inner radius ratio (circular sets).
    pub ring_ratio: Option<f64>,
    /// DAPSK phase sub-alphabet order q_p.
    pub phase_order: Option<usize>,
    /// DAPSK amplitude sub-alphabet order q_a.
    pub amplitude_order: Option<usize>,
    /// Applied rotation in radians.
    pub rotation: Option<f64>,
    /// Per-ring rotations in radians (two-ring circular sets).
    pub theta1: Option<f64>,
    pub theta2: Option<f64>,
    /// Rectangular QAM level counts per axis.
    pub re_levels: Option<usize>,
    pub im_levels: Option<usize>,
    /// OMDC circle radii after normalization.
    pub radii: Option<Vec<f64>>,
}

/// A finite complex alphabet with bit labels and unit mean energy.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    kind: ConstellationKind,
    points: Vec<Complex64>,
    labels: Vec<u32>,
    bits_per_symbol: u32,
    meta: Meta,
}

impl Constellation {
    pub fn kind(&self) -> ConstellationKind {
        self.kind
    }

    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn point(&self, index: usize) -> Complex64 {
        self.points[index]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> u32 {
        self.labels[index]
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.bits_per_symbol
    }

    pub fn meta(&self) -> &Meta {
        &self.meta
    }

    pub fn avg_energy(&self) -> f64 {
        self.points.iter().map(|p| p.norm_sqr()).sum::<f64>() / self.points.len() as f64
    }

    /// DAPSK sub-alphabet orders (q_p, q_a), if this is a DAPSK set.
    pub fn dapsk_split(&self) -> Option<(usize, usize)> {
        match (self.meta.phase_order, self.meta.amplitude_order) {
            (Some(qp), Some(qa)) => Some((qp, qa)),
            _ => None,
        }
    }
}

/// Kind-plus-parameters description used by `build` (and by config files).
#[derive(Debug, Clone, PartialEq)]
pub enum BuildSpec {
    Psk { q: usize },
    Dask { q_a: usize, a: f64 },
    Dapsk { q_p: usize, q_a: usize, a: f64 },
    RectQam { q: usize },
    Circ8Qam,
    Omdc4,
    Omdc8,
    Mdc8Qam { r: f64, theta1: f64, theta2: f64 },
    Rotated { base: Box<BuildSpec>, theta: f64 },
}

/// DAPSK split description: q_p phase levels, q_a amplitude rings, ring ratio a.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DapskSplit {
    pub q_p: usize,
    pub q_a: usize,
    pub a: f64,
}

impl DapskSplit {
    /// The tabulated optimal split and ring ratio for a total order q
    /// (ratios tuned at Eb/N0 = 18 dB over the AWGN channel).
    pub fn optimal_for(q: usize) -> Result<DapskSplit> {
        match q {
            8 => Ok(DapskSplit { q_p: 4, q_a: 2, a: 2.7 }),
            16 => Ok(DapskSplit { q_p: 8, q_a: 2, a: 2.1 }),
            32 => Ok(DapskSplit { q_p: 16, q_a: 2, a: 1.5 }),
            64 => Ok(DapskSplit { q_p: 16, q_a: 4, a: 1.4 }),
            _ => Err(Error::InvalidParameter("no tabulated DAPSK split for this order")),
        }
    }
}

/// Optimal two-ring 8-point set for differential MDC codes:
/// radius ratio 1.37, ring rotations 12.73° and 58.18°.
pub const MDC_8QAM_RADIUS_RATIO: f64 = 1.37;
pub const MDC_8QAM_THETA1_DEG: f64 = 12.73;
pub const MDC_8QAM_THETA2_DEG: f64 = 58.18;

/// OMDC squared radii before energy scaling: the 4-point optimum is
/// analytic, u = (1/3, 5/3); the 8-point optimum comes from the committed
/// numeric search (`omdc8_radii` example), whose active constraints give
/// the closed forms below with m = 4/(6+√5):
/// u = (m/4, 5m/4, 9m/4, (9/4+√5)m), already summing to 4.
pub const OMDC4_RADII_SQ: [f64; 2] = [1.0 / 3.0, 5.0 / 3.0];
pub const OMDC8_RADII_SQ: [f64; 4] = [
    0.121_417_162_016_135_81,
    0.607_085_810_080_679_1,
    1.092_754_458_145_222_2,
    2.178_742_569_757_962_8,
];

pub fn build(spec: &BuildSpec) -> Result<Constellation> {
    match *spec {
        BuildSpec::Psk { q } => psk(q),
        BuildSpec::Dask { q_a, a } => dask(q_a, a),
        BuildSpec::Dapsk { q_p, q_a, a } => dapsk(q_p, q_a, a),
        BuildSpec::RectQam { q } => rect_qam(q),
        BuildSpec::Circ8Qam => Ok(circ8_for_ostbc()),
        BuildSpec::Omdc4 => Ok(omdc4()),
        BuildSpec::Omdc8 => Ok(omdc8()),
        BuildSpec::Mdc8Qam { r, theta1, theta2 } => mdc_8qam(r, theta1, theta2),
        BuildSpec::Rotated { ref base, theta } => rotated(&build(base)?, theta),
    }
}

/// Reflected-gray bit labels for q indices.
pub fn gray_labels(q: usize) -> Result<Vec<u32>> {
    if !q.is_power_of_two() {
        return Err(Error::InvalidParameter("alphabet order must be a power of two"));
    }
    Ok((0..q as u32).map(|i| i ^ (i >> 1)).collect())
}

fn bits_of(q: usize) -> u32 {
    q.trailing_zeros()
}

/// q-PSK: points e^{j2πd/q}, gray labels.
pub fn psk(q: usize) -> Result<Constellation> {
    if !q.is_power_of_two() || q < 2 {
        return Err(Error::InvalidParameter("PSK order must be a power of two ≥ 2"));
    }
    let points = (0..q)
        .map(|d| Complex64::from_polar(1.0, core::f64::consts::TAU * d as f64 / q as f64))
        .collect();
    Ok(Constellation {
        kind: ConstellationKind::Psk,
        points,
        labels: gray_labels(q)?,
        bits_per_symbol: bits_of(q),
        meta: Meta::default(),
    })
}

/// Normalized DASK amplitude levels c·a^d with c chosen for unit mean square.
pub fn dask_levels(q_a: usize, a: f64) -> Result<Vec<f64>> {
    if !q_a.is_power_of_two() {
        return Err(Error::InvalidParameter("DASK order must be a power of two"));
    }
    if q_a > 1 && a <= 1.0 {
        return Err(Error::InvalidParameter("ring ratio must exceed 1"));
    }
    let energy: f64 = (0..q_a).map(|d| a.powi(2 * d as i32)).sum();
    let c = (q_a as f64 / energy).sqrt();
    Ok((0..q_a).map(|d| c * a.powi(d as i32)).collect())
}

/// q_a-DASK: positive real amplitude rings a^d, normalized.
pub fn dask(q_a: usize, a: f64) -> Result<Constellation> {
    let levels = dask_levels(q_a, a)?;
    Ok(Constellation {
        kind: ConstellationKind::Dask,
        points: levels.iter().map(|&r| Complex64::new(r, 0.0)).collect(),
        labels: gray_labels(q_a)?,
        bits_per_symbol: bits_of(q_a),
        meta: Meta {
            ring_ratio: Some(a),
            amplitude_order: Some(q_a),
            ..Meta::default()
        },
    })
}

/// DAPSK as the product of a q_p-PSK and a q_a-DASK. Symbol index packs the
/// phase index high: l = l_p·q_a + l_a; labels pack phase bits high.
pub fn dapsk(q_p: usize, q_a: usize, a: f64) -> Result<Constellation> {
    if !q_p.is_power_of_two() || q_p < 2 {
        return Err(Error::InvalidParameter("DAPSK phase order must be a power of two ≥ 2"));
    }
    let levels = dask_levels(q_a, a)?;
    let phase_labels = gray_labels(q_p)?;
    let amp_labels = gray_labels(q_a)?;
    let amp_bits = bits_of(q_a);
    let mut points = Vec::with_capacity(q_p * q_a);
    let mut labels = Vec::with_capacity(q_p * q_a);
    for lp in 0..q_p {
        let phase = Complex64::from_polar(1.0, core::f64::consts::TAU * lp as f64 / q_p as f64);
        for la in 0..q_a {
            points.push(phase * levels[la]);
            labels.push((phase_labels[lp] << amp_bits) | amp_labels[la]);
        }
    }
    Ok(Constellation {
        kind: ConstellationKind::Dapsk,
        points,
        labels,
        bits_per_symbol: bits_of(q_p * q_a),
        meta: Meta {
            ring_ratio: Some(a),
            phase_order: Some(q_p),
            amplitude_order: Some(q_a),
            ..Meta::default()
        },
    })
}

/// PAM levels ±1, ±3, … for n points, unscaled.
fn pam_levels(n: usize) -> Vec<f64> {
    (0..n).map(|k| (2 * k) as f64 - (n - 1) as f64).collect()
}

/// Rectangular QAM with 2^⌈b/2⌉ real × 2^⌊b/2⌋ imaginary levels, per-axis
/// gray labels, real bits high.
pub fn rect_qam(q: usize) -> Result<Constellation> {
    if !q.is_power_of_two() || q < 4 {
        return Err(Error::InvalidParameter("QAM order must be a power of two ≥ 4"));
    }
    let b = bits_of(q);
    let n_re = 1usize << b.div_ceil(2);
    let n_im = 1usize << (b / 2);
    let re = pam_levels(n_re);
    let im = pam_levels(n_im);
    let energy = ((n_re * n_re - 1) as f64 + (n_im * n_im - 1) as f64) / 3.0;
    let c = (1.0 / energy).sqrt();
    let re_labels = gray_labels(n_re)?;
    let im_labels = gray_labels(n_im)?;
    let im_bits = bits_of(n_im);
    let mut points = Vec::with_capacity(q);
    let mut labels = Vec::with_capacity(q);
    for (i, &xr) in re.iter().enumerate() {
        for (k, &xi) in im.iter().enumerate() {
            points.push(Complex64::new(xr * c, xi * c));
            labels.push((re_labels[i] << im_bits) | im_labels[k]);
        }
    }
    Ok(Constellation {
        kind: ConstellationKind::RectQam,
        points,
        labels,
        bits_per_symbol: b,
        meta: Meta {
            re_levels: Some(n_re),
            im_levels: Some(n_im),
            ..Meta::default()
        },
    })
}

/// Two-ring circular set: `q/2` points per ring, outer/inner radius ratio
/// `ratio`, ring rotations `theta_outer`/`theta_inner`. Ring bit high.
fn two_ring(
    kind: ConstellationKind,
    q: usize,
    ratio: f64,
    theta_inner: f64,
    theta_outer: f64,
) -> Constellation {
    let half = q / 2;
    let r_outer = (2.0 / (1.0 + 1.0 / (ratio * ratio))).sqrt();
    let r_inner = r_outer / ratio;
    let phase_labels = gray_labels(half).expect("half order is a power of two");
    let phase_bits = bits_of(half);
    let mut points = Vec::with_capacity(q);
    let mut labels = Vec::with_capacity(q);
    for (ring, (radius, theta)) in [(r_inner, theta_inner), (r_outer, theta_outer)]
        .into_iter()
        .enumerate()
    {
        for k in 0..half {
            let angle = core::f64::consts::TAU * k as f64 / half as f64 + theta;
            points.push(Complex64::from_polar(radius, angle));
            labels.push(((ring as u32) << phase_bits) | phase_labels[k]);
        }
    }
    Constellation {
        kind,
        points,
        labels,
        bits_per_symbol: bits_of(q),
        meta: Meta {
            ring_ratio: Some(ratio),
            theta1: Some(theta_inner),
            theta2: Some(theta_outer),
            ..Meta::default()
        },
    }
}

/// Circular 8-QAM tuned for orthogonal block codes: two 4-PSK rings,
/// radius ratio 1.6, inner ring rotated 45° relative to the outer
/// (optimized at Eb/N0 = 14 dB).
pub fn circ8_for_ostbc() -> Constellation {
    two_ring(
        ConstellationKind::Circ8Qam,
        8,
        1.6,
        45.0f64.to_radians(),
        0.0,
    )
}

/// Two-ring 8-point set for differential MDC codes. `r` is the radius
/// ratio, `theta1`/`theta2` the inner/outer ring rotations in radians.
pub fn mdc_8qam(r: f64, theta1: f64, theta2: f64) -> Result<Constellation> {
    if r <= 1.0 {
        return Err(Error::InvalidParameter("radius ratio must exceed 1"));
    }
    for t in [theta1, theta2] {
        if !(0.0..core::f64::consts::FRAC_PI_2).contains(&t) {
            return Err(Error::InvalidParameter("ring rotation must lie in [0°, 90°)"));
        }
    }
    Ok(two_ring(ConstellationKind::Mdc8Qam, 8, r, theta1, theta2))
}

/// Axis-constrained OMDC set: two antipodal points per circle, circles
/// alternating between real and imaginary axis (the ν = 0 optimum), unit
/// mean energy by construction since Σ r_i² = q/2.
fn omdc_from(kind: ConstellationKind, radii_sq: &[f64]) -> Constellation {
    let q = 2 * radii_sq.len();
    let mut points = Vec::with_capacity(q);
    let radii: Vec<f64> = radii_sq.iter().map(|&u| u.sqrt()).collect();
    for (i, &r) in radii.iter().enumerate() {
        if i % 2 == 0 {
            points.push(Complex64::new(r, 0.0));
            points.push(Complex64::new(-r, 0.0));
        } else {
            points.push(Complex64::new(0.0, r));
            points.push(Complex64::new(0.0, -r));
        }
    }
    let labels = gray_labels(q).expect("OMDC order is a power of two");
    Constellation {
        kind,
        points,
        labels,
        bits_per_symbol: bits_of(q),
        meta: Meta {
            radii: Some(radii),
            ..Meta::default()
        },
    }
}

/// Optimal 4-point OMDC constellation: ±√(1/3) real, ±j√(5/3).
pub fn omdc4() -> Constellation {
    omdc_from(ConstellationKind::Omdc4, &OMDC4_RADII_SQ)
}

/// Optimal 8-point OMDC constellation (see `OMDC8_RADII_SQ`).
pub fn omdc8() -> Constellation {
    omdc_from(ConstellationKind::Omdc8, &OMDC8_RADII_SQ)
}

/// Rotates every point by e^{jθ}; labels and energies are unchanged.
pub fn rotated(base: &Constellation, theta: f64) -> Result<Constellation> {
    if !(0.0..core::f64::consts::FRAC_PI_2).contains(&theta) {
        return Err(Error::InvalidParameter("rotation must lie in [0°, 90°)"));
    }
    let w = Complex64::from_polar(1.0, theta);
    let mut meta = base.meta.clone();
    meta.rotation = Some(theta);
    Ok(Constellation {
        kind: ConstellationKind::Rotated,
        points: base.points.iter().map(|&p| p * w).collect(),
        labels: base.labels.clone(),
        bits_per_symbol: base.bits_per_symbol,
        meta,
    })
}

/// Optimal rotation for rectangular QAM under the MDC min-det criterion.
pub fn optimal_qam_rotation() -> f64 {
    0.5 * 0.5f64.atan()
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    #[test]
    fn psk4_is_unit_circle_roots() {
        let c = psk(4).unwrap();
        let want = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ];
        for (p, w) in c.points().iter().zip(&want) {
            assert!((p - w).norm() < TOL);
        }
        assert_eq!(c.labels(), &[0b00, 0b01, 0b11, 0b10]);
    }

    #[test]
    fn gray_code_adjacency_is_one_bit() {
        let g = gray_labels(8).unwrap();
        for i in 0..8 {
            let next = g[(i + 1) % 8];
            assert_eq!((g[i] ^ next).count_ones(), 1, "index {i}");
        }
        assert_eq!(gray_labels(2).unwrap(), vec![0, 1]);
        assert_eq!(gray_labels(4).unwrap(), vec![0b00, 0b01, 0b11, 0b10]);
        assert!(gray_labels(6).is_err());
    }

    #[test]
    fn every_kind_is_unit_energy_with_distinct_labels() {
        let specs = [
            BuildSpec::Psk { q: 16 },
            BuildSpec::Dask { q_a: 2, a: 2.0 },
            BuildSpec::Dapsk { q_p: 8, q_a: 2, a: 2.1 },
            BuildSpec::RectQam { q: 16 },
            BuildSpec::RectQam { q: 32 },
            BuildSpec::Circ8Qam,
            BuildSpec::Omdc4,
            BuildSpec::Omdc8,
            BuildSpec::Mdc8Qam {
                r: MDC_8QAM_RADIUS_RATIO,
                theta1: MDC_8QAM_THETA1_DEG.to_radians(),
                theta2: MDC_8QAM_THETA2_DEG.to_radians(),
            },
            BuildSpec::Rotated {
                base: Box::new(BuildSpec::RectQam { q: 16 }),
                theta: optimal_qam_rotation(),
            },
        ];
        for spec in &specs {
            let c = build(spec).unwrap();
            assert!((c.avg_energy() - 1.0).abs() < TOL, "{spec:?}");
            assert_eq!(c.size(), 1 << c.bits_per_symbol(), "{spec:?}");
            let mut seen = c.labels().to_vec();
            seen.sort_unstable();
            seen.dedup();
            assert_eq!(seen.len(), c.size(), "labels must be distinct: {spec:?}");
            for &l in c.labels() {
                assert!(l < (1 << c.bits_per_symbol()), "{spec:?}");
            }
        }
    }

    #[test]
    fn dapsk_16_has_two_rings_with_ratio() {
        let c = dapsk(8, 2, 2.1).unwrap();
        assert_eq!(c.size(), 16);
        let mut radii: Vec<f64> = c.points().iter().map(|p| p.norm()).collect();
        radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let (inner, outer) = (radii[0], radii[radii.len() - 1]);
        assert!((outer / inner - 2.1).abs() < TOL);
        // Product structure: all phases occur on every ring and vice versa.
        for la in 0..2 {
            for lp in 0..8 {
                let p = c.point(lp * 2 + la);
                assert!((p.norm() - if la == 0 { inner } else { outer }).abs() < TOL);
            }
        }
    }

    #[test]
    fn dask_levels_match_closed_form() {
        // q_a=2, a=2: energy 1+4=5, c=√(2/5); levels c, 2c.
        let l = dask_levels(2, 2.0).unwrap();
        let c = (2.0f64 / 5.0).sqrt();
        assert!((l[0] - c).abs() < TOL && (l[1] - 2.0 * c).abs() < TOL);
    }

    #[test]
    fn rect_qam_16_matches_standard_grid() {
        let c = rect_qam(16).unwrap();
        let s = 1.0 / 10.0f64.sqrt();
        // Corner point ±3±3j scaled.
        assert!(c
            .points()
            .iter()
            .any(|p| (p - Complex64::new(3.0 * s, 3.0 * s)).norm() < TOL));
        assert!(c
            .points()
            .iter()
            .any(|p| (p - Complex64::new(-1.0 * s, 1.0 * s)).norm() < TOL));
        assert_eq!(c.meta().re_levels, Some(4));
        assert_eq!(c.meta().im_levels, Some(4));
    }

    #[test]
    fn rect_qam_32_splits_axes_unevenly() {
        let c = rect_qam(32).unwrap();
        assert_eq!(c.meta().re_levels, Some(8));
        assert_eq!(c.meta().im_levels, Some(4));
    }

    #[test]
    fn circ8_shape() {
        let c = circ8_for_ostbc();
        let mut radii: Vec<f64> = c.points().iter().map(|p| p.norm()).collect();
        radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((radii[7] / radii[0] - 1.6).abs() < TOL);
        assert!((c.avg_energy() - 1.0).abs() < TOL);
        // Inner ring offset 45° from outer.
        let inner_angle = c.point(0).arg().to_degrees();
        let outer_angle = c.point(4).arg().to_degrees();
        assert!((inner_angle - outer_angle - 45.0).abs() < 1e-9);
    }

    #[test]
    fn omdc_points_sit_on_axes() {
        for c in [omdc4(), omdc8()] {
            for p in c.points() {
                assert_eq!(p.re * p.im, 0.0, "x^R·x^I must vanish exactly");
            }
            let sum_sq: f64 = c
                .meta()
                .radii
                .as_ref()
                .unwrap()
                .iter()
                .map(|r| r * r)
                .sum();
            assert!((sum_sq - c.size() as f64 / 2.0).abs() < TOL);
            assert!((c.avg_energy() - 1.0).abs() < TOL);
            // Alternating axes: even circles real, odd circles imaginary.
            assert!(c.point(0).im == 0.0 && c.point(2).re == 0.0);
        }
    }

    #[test]
    fn omdc4_radii_are_the_analytic_optimum() {
        let c = omdc4();
        let radii = c.meta().radii.as_ref().unwrap();
        assert!((radii[0] - (1.0f64 / 3.0).sqrt()).abs() < TOL);
        assert!((radii[1] - (5.0f64 / 3.0).sqrt()).abs() < TOL);
    }

    #[test]
    fn omdc8_radii_match_their_closed_form() {
        let m = 4.0 / (6.0 + 5.0f64.sqrt());
        let want = [m / 4.0, 5.0 * m / 4.0, 9.0 * m / 4.0, (9.0 / 4.0 + 5.0f64.sqrt()) * m];
        for (u, w) in OMDC8_RADII_SQ.iter().zip(&want) {
            assert!((u - w).abs() < 1e-15);
        }
        assert!((OMDC8_RADII_SQ.iter().sum::<f64>() - 4.0).abs() < TOL);
    }

    #[test]
    fn rotation_preserves_distances_and_energy() {
        let base = rect_qam(16).unwrap();
        let rot = rotated(&base, optimal_qam_rotation()).unwrap();
        assert!((rot.avg_energy() - base.avg_energy()).abs() < TOL);
        for i in 0..16 {
            for k in 0..16 {
                let d0 = (base.point(i) - base.point(k)).norm();
                let d1 = (rot.point(i) - rot.point(k)).norm();
                assert!((d0 - d1).abs() < TOL);
            }
        }
        assert_eq!(rot.labels(), base.labels());
    }

    #[test]
    fn full_diversity_precondition_for_rotated_and_mdc8() {
        let rot = rotated(&rect_qam(16).unwrap(), optimal_qam_rotation()).unwrap();
        let m8 = mdc_8qam(
            MDC_8QAM_RADIUS_RATIO,
            MDC_8QAM_THETA1_DEG.to_radians(),
            MDC_8QAM_THETA2_DEG.to_radians(),
        )
        .unwrap();
        for c in [&rot, &m8] {
            for i in 0..c.size() {
                for k in 0..c.size() {
                    if i == k {
                        continue;
                    }
                    let d = c.point(i) - c.point(k);
                    assert!(
                        (d.re.abs() - d.im.abs()).abs() > 1e-9,
                        "pair ({i},{k}) violates |ΔR| ≠ |ΔI|"
                    );
                }
            }
        }
    }

    #[test]
    fn unrotated_square_qam_fails_the_precondition() {
        let c = rect_qam(4).unwrap();
        let found = (0..4).any(|i| {
            (0..4).any(|k| {
                i != k && {
                    let d = c.point(i) - c.point(k);
                    (d.re.abs() - d.im.abs()).abs() < 1e-12
                }
            })
        });
        assert!(found, "diagonal pairs of a square grid have |ΔR| == |ΔI|");
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(psk(3).is_err());
        assert!(psk(1).is_err());
        assert!(dask(2, 1.0).is_err());
        assert!(dapsk(6, 2, 2.0).is_err());
        assert!(rect_qam(2).is_err());
        assert!(mdc_8qam(0.9, 0.1, 0.2).is_err());
        assert!(rotated(&rect_qam(4).unwrap(), 2.0).is_err());
        assert!(DapskSplit::optimal_for(128).is_err());
    }

    #[test]
    fn tabulated_splits() {
        let s = DapskSplit::optimal_for(16).unwrap();
        assert_eq!((s.q_p, s.q_a), (8, 2));
        assert!((s.a - 2.1).abs() < TOL);
        let s = DapskSplit::optimal_for(64).unwrap();
        assert_eq!((s.q_p, s.q_a), (16, 4));
        assert!((s.a - 1.4).abs() < TOL);
    }
}
