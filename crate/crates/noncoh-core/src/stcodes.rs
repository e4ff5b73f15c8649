//! Space-time block code descriptors: the 2-antenna orthogonal code, the
//! 4-antenna rate-3/4 orthogonal code, and their doubled quasi-orthogonal
//! extensions with minimum-decoding-complexity structure (MDC).
//!
//! A code is described by K pairs of dispersion matrices. The (U, Q)
//! family disperses real and imaginary symbol parts,
//! V = (1/√p)·Σ(U_i·x_i^R + j·Q_i·x_i^I), while the equivalent (A, B)
//! family disperses symbols and conjugates, V = (1/√p)·Σ(A_i·x_i + B_i·x_i*),
//! with U_i = A_i + B_i and Q_i = A_i − B_i. Dispersion entries are kept as
//! exact Gaussian integers so the structural validators are tolerance-free.

use crate::cxmat::{self, CMatrix};
use crate::{Complex64, Error, Result};
use alloc::vec::Vec;
// Inherent f64 math resolves whenever std is linked anywhere in the build
// graph (tests, std-enabled workspace builds); the trait supplies the same
// methods in pure no_std builds and sits idle otherwise.
#[allow(unused_imports)]
use num_traits::Float;

/// Gaussian integer a + b·j with exact arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GInt {
    pub re: i32,
    pub im: i32,
}

impl GInt {
    pub const ZERO: GInt = GInt { re: 0, im: 0 };
    pub const ONE: GInt = GInt { re: 1, im: 0 };
    pub const J: GInt = GInt { re: 0, im: 1 };

    pub fn new(re: i32, im: i32) -> GInt {
        GInt { re, im }
    }

    pub fn conj(self) -> GInt {
        GInt { re: self.re, im: -self.im }
    }

    pub fn neg(self) -> GInt {
        GInt { re: -self.re, im: -self.im }
    }

    pub fn add(self, o: GInt) -> GInt {
        GInt { re: self.re + o.re, im: self.im + o.im }
    }

    pub fn sub(self, o: GInt) -> GInt {
        GInt { re: self.re - o.re, im: self.im - o.im }
    }

    pub fn mul(self, o: GInt) -> GInt {
        GInt {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }

    pub fn to_c(self) -> Complex64 {
        Complex64::new(self.re as f64, self.im as f64)
    }

    /// True for the alphabet {0, ±1, ±j} the dispersion entries live in.
    pub fn is_dispersion_entry(self) -> bool {
        (self.re == 0 || self.im == 0) && self.re.abs() <= 1 && self.im.abs() <= 1
    }
}

/// Dense matrix over Gaussian integers; all validator algebra stays exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    e: Vec<GInt>,
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> IntMat {
        IntMat { rows, cols, e: alloc::vec![GInt::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> IntMat {
        let mut m = IntMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, GInt::ONE);
        }
        m
    }

    /// Builds from rows of (re, im) pairs; panics on ragged input.
    pub fn from_rows(rows: &[&[(i32, i32)]]) -> IntMat {
        let r = rows.len();
        let c = rows[0].len();
        let mut m = IntMat::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged row {i}");
            for (k, &(re, im)) in row.iter().enumerate() {
                m.set(i, k, GInt::new(re, im));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> GInt {
        assert!(r < self.rows && c < self.cols, "index out of range");
        self.e[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: GInt) {
        assert!(r < self.rows && c < self.cols, "index out of range");
        self.e[r * self.cols + c] = v;
    }

    pub fn conj_t(&self) -> IntMat {
        let mut m = IntMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for k in 0..self.cols {
                m.set(k, i, self.get(i, k).conj());
            }
        }
        m
    }

    pub fn mul(&self, o: &IntMat) -> IntMat {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let mut m = IntMat::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == GInt::ZERO {
                    continue;
                }
                for c in 0..o.cols {
                    m.set(i, c, m.get(i, c).add(a.mul(o.get(k, c))));
                }
            }
        }
        m
    }

    pub fn add(&self, o: &IntMat) -> IntMat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "dimension mismatch");
        let mut m = self.clone();
        for (a, b) in m.e.iter_mut().zip(&o.e) {
            *a = a.add(*b);
        }
        m
    }

    pub fn neg(&self) -> IntMat {
        let mut m = self.clone();
        for a in m.e.iter_mut() {
            *a = a.neg();
        }
        m
    }

    /// Multiplies every entry by j.
    pub fn times_j(&self) -> IntMat {
        let mut m = self.clone();
        for a in m.e.iter_mut() {
            *a = GInt::J.mul(*a);
        }
        m
    }

    pub fn block2x2(a: &IntMat, b: &IntMat, c: &IntMat, d: &IntMat) -> IntMat {
        assert_eq!(a.rows, b.rows);
        assert_eq!(c.rows, d.rows);
        assert_eq!(a.cols, c.cols);
        assert_eq!(b.cols, d.cols);
        let mut m = IntMat::zeros(a.rows + c.rows, a.cols + b.cols);
        for i in 0..a.rows {
            for k in 0..a.cols {
                m.set(i, k, a.get(i, k));
            }
            for k in 0..b.cols {
                m.set(i, a.cols + k, b.get(i, k));
            }
        }
        for i in 0..c.rows {
            for k in 0..c.cols {
                m.set(a.rows + i, k, c.get(i, k));
            }
            for k in 0..d.cols {
                m.set(a.rows + i, c.cols + k, d.get(i, k));
            }
        }
        m
    }

    pub fn block_diag(a: &IntMat, b: &IntMat) -> IntMat {
        let za = IntMat::zeros(a.rows, b.cols);
        let zb = IntMat::zeros(b.rows, a.cols);
        IntMat::block2x2(a, &za, &zb, b)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|k| {
                    self.get(i, k) == if i == k { GInt::ONE } else { GInt::ZERO }
                })
            })
    }

    pub fn to_cmatrix(&self) -> CMatrix {
        CMatrix::from_fn(self.rows, self.cols, |i, k| self.get(i, k).to_c())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodeKind {
    Alamouti,
    Th4,
    Mdc4,
    Mdc8,
}

/// A square space-time block code: M antennas, T = M time slots, K symbols
/// per block, normalization p = K.
#[derive(Debug, Clone, PartialEq)]
pub struct STCode {
    kind: CodeKind,
    m: usize,
    t: usize,
    k: usize,
    u: Vec<IntMat>,
    q: Vec<IntMat>,
}

impl STCode {
    fn new(kind: CodeKind, u: Vec<IntMat>, q: Vec<IntMat>) -> STCode {
        assert_eq!(u.len(), q.len(), "families must pair up");
        let k = u.len();
        let t = u[0].rows();
        let m = u[0].cols();
        for mat in u.iter().chain(&q) {
            assert_eq!((mat.rows(), mat.cols()), (t, m), "inconsistent dispersion shape");
            for i in 0..t {
                for c in 0..m {
                    assert!(
                        mat.get(i, c).is_dispersion_entry(),
                        "dispersion entries must be 0, ±1, or ±j"
                    );
                }
            }
        }
        STCode { kind, m, t, k, u, q }
    }

    pub fn kind(&self) -> CodeKind {
        self.kind
    }

    pub fn antennas(&self) -> usize {
        self.m
    }

    pub fn time_slots(&self) -> usize {
        self.t
    }

    pub fn symbols_per_block(&self) -> usize {
        self.k
    }

    /// Energy normalization constant; √p divides the assembled matrix.
    pub fn p(&self) -> f64 {
        self.k as f64
    }

    pub fn u(&self, i: usize) -> &IntMat {
        &self.u[i]
    }

    pub fn q(&self, i: usize) -> &IntMat {
        &self.q[i]
    }

    /// A_i = (U_i + Q_i)/2 in floating point (MDC extensions have
    /// half-integer A/B entries, so the exact family is (U, Q)).
    pub fn a_mat(&self, i: usize) -> CMatrix {
        self.u[i].to_cmatrix().add(&self.q[i].to_cmatrix()).scale_re(0.5)
    }

    /// B_i = (U_i − Q_i)/2 in floating point.
    pub fn b_mat(&self, i: usize) -> CMatrix {
        self.u[i].to_cmatrix().sub(&self.q[i].to_cmatrix()).scale_re(0.5)
    }
}

/// Builds one of the four shipped codes. The doubled codes are constructed
/// by `mdc_extend`, never from a typed-in matrix.
pub fn make_code(kind: CodeKind) -> STCode {
    match kind {
        CodeKind::Alamouti => alamouti(),
        CodeKind::Th4 => th4(),
        CodeKind::Mdc4 => mdc_extend(&alamouti()).expect("base code is orthogonal"),
        CodeKind::Mdc8 => mdc_extend(&th4()).expect("base code is orthogonal"),
    }
}

/// x₁ on the diagonal of slot 1, x₂ beside it, conjugates mirrored below:
/// A₁=diag(1,0), B₁=diag(0,1), A₂=e₁₂, B₂=−e₂₁.
fn alamouti() -> STCode {
    let a1 = IntMat::from_rows(&[&[(1, 0), (0, 0)], &[(0, 0), (0, 0)]]);
    let b1 = IntMat::from_rows(&[&[(0, 0), (0, 0)], &[(0, 0), (1, 0)]]);
    let a2 = IntMat::from_rows(&[&[(0, 0), (1, 0)], &[(0, 0), (0, 0)]]);
    let b2 = IntMat::from_rows(&[&[(0, 0), (0, 0)], &[(-1, 0), (0, 0)]]);
    from_ab(CodeKind::Alamouti, &[a1, a2], &[b1, b2])
}

/// The 4-antenna rate-3/4 orthogonal code.
fn th4() -> STCode {
    let z = (0, 0);
    let p = (1, 0);
    let n = (-1, 0);
    let a1 = IntMat::from_rows(&[&[p, z, z, z], &[z, z, z, z], &[z, z, z, z], &[z, z, z, p]]);
    let b1 = IntMat::from_rows(&[&[z, z, z, z], &[z, p, z, z], &[z, z, p, z], &[z, z, z, z]]);
    let a2 = IntMat::from_rows(&[&[z, p, z, z], &[z, z, z, z], &[z, z, z, p], &[z, z, z, z]]);
    let b2 = IntMat::from_rows(&[&[z, z, z, z], &[n, z, z, z], &[z, z, z, z], &[z, z, n, z]]);
    let a3 = IntMat::from_rows(&[&[z, z, p, z], &[z, z, z, n], &[z, z, z, z], &[z, z, z, z]]);
    let b3 = IntMat::from_rows(&[&[z, z, z, z], &[z, z, z, z], &[n, z, z, z], &[z, p, z, z]]);
    from_ab(CodeKind::Th4, &[a1, a2, a3], &[b1, b2, b3])
}

fn from_ab(kind: CodeKind, a: &[IntMat], b: &[IntMat]) -> STCode {
    let u: Vec<IntMat> = a.iter().zip(b).map(|(ai, bi)| ai.add(bi)).collect();
    let q: Vec<IntMat> = a.iter().zip(b).map(|(ai, bi)| ai.add(&bi.neg())).collect();
    STCode::new(kind, u, q)
}

/// Doubles a square orthogonal code into its quasi-orthogonal MDC
/// extension: for each base pair (Ū_i, Q̄_i),
///   U_i        = diag(Ū_i, Ū_i)
///   Q_i        = offdiag(jŪ_i, jŪ_i)
///   U_{i+K/2}  = diag(jQ̄_i, jQ̄_i)
///   Q_{i+K/2}  = offdiag(Q̄_i, Q̄_i)
/// The extension keeps the code rate and doubles M, T, and K.
pub fn mdc_extend(base: &STCode) -> Result<STCode> {
    let rep = validate_ostbc(base);
    if !rep.all_pass() {
        return Err(Error::InvalidParameter("MDC extension requires an orthogonal base"));
    }
    let kb = base.k;
    let mut u = Vec::with_capacity(2 * kb);
    let mut q = Vec::with_capacity(2 * kb);
    for i in 0..kb {
        u.push(IntMat::block_diag(&base.u[i], &base.u[i]));
        let ju = base.u[i].times_j();
        let z = IntMat::zeros(base.t, base.m);
        q.push(IntMat::block2x2(&z, &ju, &ju, &z));
    }
    for i in 0..kb {
        let jq = base.q[i].times_j();
        u.push(IntMat::block_diag(&jq, &jq));
        let z = IntMat::zeros(base.t, base.m);
        q.push(IntMat::block2x2(&z, &base.q[i], &base.q[i], &z));
    }
    let kind = match base.kind {
        CodeKind::Alamouti => CodeKind::Mdc4,
        CodeKind::Th4 => CodeKind::Mdc8,
        _ => return Err(Error::InvalidParameter("extension is defined on the base codes")),
    };
    Ok(STCode::new(kind, u, q))
}

/// Assembles the code matrix V = (1/√p)·Σ(A_i·x_i + B_i·x_i*).
pub fn assemble(code: &STCode, symbols: &[Complex64]) -> Result<CMatrix> {
    if symbols.len() != code.k {
        return Err(Error::InvalidParameter("symbol count must equal K"));
    }
    Ok(assemble_uq(code, symbols))
}

/// The same matrix through the real/imaginary family,
/// V = (1/√p)·Σ(U_i·x_i^R + j·Q_i·x_i^I). Used as the primary path since
/// (U, Q) are the exactly-stored matrices.
fn assemble_uq(code: &STCode, symbols: &[Complex64]) -> CMatrix {
    let scale = 1.0 / code.p().sqrt();
    let mut v = CMatrix::zeros(code.t, code.m);
    for (i, &x) in symbols.iter().enumerate() {
        for r in 0..code.t {
            for c in 0..code.m {
                let ue = code.u[i].get(r, c);
                let qe = code.q[i].get(r, c);
                if ue == GInt::ZERO && qe == GInt::ZERO {
                    continue;
                }
                let add = ue.to_c().scale(x.re) + Complex64::new(0.0, 1.0) * qe.to_c().scale(x.im);
                v.set(r, c, v.get(r, c) + add.scale(scale));
            }
        }
    }
    v
}

/// Assembly through the symbol/conjugate family; kept separate so tests can
/// pin the two dispersive forms against each other.
pub fn assemble_ab(code: &STCode, symbols: &[Complex64]) -> Result<CMatrix> {
    if symbols.len() != code.k {
        return Err(Error::InvalidParameter("symbol count must equal K"));
    }
    let scale = 1.0 / code.p().sqrt();
    let mut v = CMatrix::zeros(code.t, code.m);
    for (i, &x) in symbols.iter().enumerate() {
        let a = code.a_mat(i);
        let b = code.b_mat(i);
        for r in 0..code.t {
            for c in 0..code.m {
                let add = a.get(r, c) * x + b.get(r, c) * x.conj();
                v.set(r, c, v.get(r, c) + add.scale(scale));
            }
        }
    }
    Ok(v)
}

/// One structural property with the index pairs that violated it.
#[derive(Debug, Clone)]
pub struct PropertyCheck {
    pub name: &'static str,
    pub pass: bool,
    pub failing_pairs: Vec<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub checks: Vec<PropertyCheck>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&PropertyCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn push_check(
    checks: &mut Vec<PropertyCheck>,
    name: &'static str,
    failing_pairs: Vec<(usize, usize)>,
) {
    checks.push(PropertyCheck { name, pass: failing_pairs.is_empty(), failing_pairs });
}

/// Orthogonal-code property set, all in exact arithmetic:
///   unitarity        U_i†U_i = Q_i†Q_i = I
///   anticommutation  U_i†U_d = −U_d†U_i and likewise for Q, i ≠ d
///   uq-symmetry      U_i†Q_d = Q_d†U_i for all i, d
pub fn validate_ostbc(code: &STCode) -> ValidationReport {
    let k = code.k;
    let mut checks = Vec::new();
    let mut fail = Vec::new();
    for i in 0..k {
        let uu = code.u[i].conj_t().mul(&code.u[i]);
        let qq = code.q[i].conj_t().mul(&code.q[i]);
        if !uu.is_identity() || !qq.is_identity() {
            fail.push((i, i));
        }
    }
    push_check(&mut checks, "unitarity", fail);

    let mut fail = Vec::new();
    for i in 0..k {
        for d in 0..k {
            if i == d {
                continue;
            }
            let anti_u = code.u[i].conj_t().mul(&code.u[d])
                == code.u[d].conj_t().mul(&code.u[i]).neg();
            let anti_q = code.q[i].conj_t().mul(&code.q[d])
                == code.q[d].conj_t().mul(&code.q[i]).neg();
            if !(anti_u && anti_q) {
                fail.push((i, d));
            }
        }
    }
    push_check(&mut checks, "anticommutation", fail);

    let mut fail = Vec::new();
    for i in 0..k {
        for d in 0..k {
            if code.u[i].conj_t().mul(&code.q[d]) != code.q[d].conj_t().mul(&code.u[i]) {
                fail.push((i, d));
            }
        }
    }
    push_check(&mut checks, "uq-symmetry", fail);

    ValidationReport { checks }
}

/// Quasi-orthogonal MDC property set:
///   anticommutation-u / anticommutation-q   for i ≠ d
///   uq-symmetry-offdiag                      U_i†Q_d = Q_d†U_i for i ≠ d
///   unitarity                                U_i†U_i = Q_i†Q_i = I
///   paired-uq-structure                      U_i†Q_i = −Q_i†U_i =
///       Q_{i+K/2}†U_{i+K/2} = −U_{i+K/2}†Q_{i+K/2} = j·offdiag(I, I)
pub fn validate_mdc(code: &STCode) -> ValidationReport {
    let k = code.k;
    let m = code.m;
    let mut checks = Vec::new();

    let mut fail = Vec::new();
    for i in 0..k {
        for d in 0..k {
            if i != d
                && code.u[i].conj_t().mul(&code.u[d])
                    != code.u[d].conj_t().mul(&code.u[i]).neg()
            {
                fail.push((i, d));
            }
        }
    }
    push_check(&mut checks, "anticommutation-u", fail);

    let mut fail = Vec::new();
    for i in 0..k {
        for d in 0..k {
            if i != d
                && code.q[i].conj_t().mul(&code.q[d])
                    != code.q[d].conj_t().mul(&code.q[i]).neg()
            {
                fail.push((i, d));
            }
        }
    }
    push_check(&mut checks, "anticommutation-q", fail);

    let mut fail = Vec::new();
    for i in 0..k {
        for d in 0..k {
            if i != d && code.u[i].conj_t().mul(&code.q[d]) != code.q[d].conj_t().mul(&code.u[i]) {
                fail.push((i, d));
            }
        }
    }
    push_check(&mut checks, "uq-symmetry-offdiag", fail);

    let mut fail = Vec::new();
    for i in 0..k {
        let uu = code.u[i].conj_t().mul(&code.u[i]);
        let qq = code.q[i].conj_t().mul(&code.q[i]);
        if !uu.is_identity() || !qq.is_identity() {
            fail.push((i, i));
        }
    }
    push_check(&mut checks, "unitarity", fail);

    let mut fail = Vec::new();
    if k % 2 == 0 && m % 2 == 0 {
        let half = IntMat::identity(m / 2);
        let z = IntMat::zeros(m / 2, m / 2);
        let target = IntMat::block2x2(&z, &half, &half, &z).times_j();
        for i in 0..k / 2 {
            let lo = code.u[i].conj_t().mul(&code.q[i]);
            let hi = code.q[i + k / 2].conj_t().mul(&code.u[i + k / 2]);
            let lo_swap = code.q[i].conj_t().mul(&code.u[i]);
            let hi_swap = code.u[i + k / 2].conj_t().mul(&code.q[i + k / 2]);
            let ok = lo == target
                && hi == target
                && lo_swap == target.neg()
                && hi_swap == target.neg();
            if !ok {
                fail.push((i, i + k / 2));
            }
        }
    } else {
        fail.push((0, 0));
    }
    push_check(&mut checks, "paired-uq-structure", fail);

    ValidationReport { checks }
}

/// The two scalars that determine an MDC code's Gram matrix:
/// V†V = (α/K)·I + (β/K)·offdiag(I, I).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GramForm {
    pub alpha: f64,
    pub beta: f64,
}

/// α = Σ|x_i|², β = 2·Σ_{i<K/2}(−x_i^R·x_i^I + x_{i+K/2}^R·x_{i+K/2}^I).
pub fn gram_scalars(code: &STCode, symbols: &[Complex64]) -> Result<GramForm> {
    if !matches!(code.kind, CodeKind::Mdc4 | CodeKind::Mdc8) {
        return Err(Error::InvalidParameter("the Gram form applies to MDC codes"));
    }
    if symbols.len() != code.k {
        return Err(Error::InvalidParameter("symbol count must equal K"));
    }
    let alpha: f64 = symbols.iter().map(|x| x.norm_sqr()).sum();
    let half = code.k / 2;
    let beta: f64 = (0..half)
        .map(|i| 2.0 * (-symbols[i].re * symbols[i].im + symbols[i + half].re * symbols[i + half].im))
        .sum();
    debug_assert!(beta.abs() <= alpha + 1e-12);
    Ok(GramForm { alpha, beta })
}

/// The closed-form Gram matrix for the given scalars.
pub fn gram_closed_form(code: &STCode, g: GramForm) -> CMatrix {
    let m = code.m;
    CMatrix::from_fn(m, m, |i, k| {
        if i == k {
            Complex64::new(g.alpha / code.k as f64, 0.0)
        } else if i + m / 2 == k || k + m / 2 == i {
            Complex64::new(g.beta / code.k as f64, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Gram scalars together with the numerically multiplied V†V; the two views
/// agree to machine precision for MDC codes.
pub fn gram(code: &STCode, symbols: &[Complex64]) -> Result<(GramForm, CMatrix)> {
    let g = gram_scalars(code, symbols)?;
    let v = assemble(code, symbols)?;
    let product = cxmat::matmul(&v.conj().transpose(), &v);
    Ok((g, product))
}

/// An exact nonnegative rational number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Ratio {
        assert!(den != 0, "zero denominator");
        let g = gcd(num.max(1), den);
        Ratio { num: num / g, den: den / g }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Code rate R = K/T and spectral efficiency η = Σ log₂(q_i) / T, exact.
pub fn rate_and_efficiency(code: &STCode, alphabet_sizes: &[usize]) -> Result<(Ratio, Ratio)> {
    if alphabet_sizes.len() != code.k {
        return Err(Error::InvalidParameter("one alphabet size per symbol"));
    }
    let mut bits = 0u64;
    for &q in alphabet_sizes {
        if !q.is_power_of_two() || q < 2 {
            return Err(Error::InvalidParameter("alphabet sizes must be powers of two"));
        }
        bits += q.trailing_zeros() as u64;
    }
    Ok((
        Ratio::new(code.k as u64, code.t as u64),
        Ratio::new(bits, code.t as u64),
    ))
}
