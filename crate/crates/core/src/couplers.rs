//! Four-parameter U(1,1) (parametric amplifier) and U(2) (frequency
//! converter) couplers.
//!
//! A coupler is described either by its four angles, which parametrize the
//! exponential of the generator algebra, or directly by the complex triple
//! `(T, R, P)` of its Heisenberg matrix. Both routes end in
//! [`CouplerParams`], which always satisfies
//! `|T|^2 - |R|^2 = 1` (amplifier) or `|T|^2 + |R|^2 = 1` (converter),
//! and `|P| = 1`.
//!
//! Signal is mode 1 (`a`), idler is mode 2 (`b` for the amplifier, `c` for
//! the converter).

use nalgebra::Matrix2;

use crate::error::{Error, Result};
use crate::fock::{interior_indices, ladder, Ladder, OperatorMatrix, TwoModeOperator};
use crate::linalg::expi_hermitian;
#[cfg(test)]
use crate::linalg::expm_blockwise;
use crate::{CMatrix, C64};

/// Tolerance on the `|T|, |R|, |P|` constraints.
pub const CONSTRAINT_TOL: f64 = 1e-12;

/// Extra Fock levels per mode used internally by [`hamiltonian_oracle`].
const ORACLE_PAD: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CouplerKind {
    Amplifier,
    Converter,
}

impl CouplerKind {
    /// `-1` for the U(1,1) metric, `+1` for U(2).
    fn metric_sign(self) -> f64 {
        match self {
            CouplerKind::Amplifier => -1.0,
            CouplerKind::Converter => 1.0,
        }
    }
}

/// The four generator angles `(phi0, phi1, phi2, phi3)` in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplerAngles {
    pub kind: CouplerKind,
    pub angles: [f64; 4],
}

impl CouplerAngles {
    pub fn new(kind: CouplerKind, angles: [f64; 4]) -> Self {
        Self { kind, angles }
    }

    /// Parametric-limit amplifier with a coherent pump of amplitude `gamma`.
    pub fn amplifier_from_physical(omega_a: f64, omega_b: f64, chi: f64, gamma: C64, t: f64) -> Self {
        Self::new(
            CouplerKind::Amplifier,
            [
                -(omega_a - omega_b) * t,
                -2.0 * gamma.re * chi * t,
                2.0 * gamma.im * chi * t,
                -(omega_a + omega_b) * t,
            ],
        )
    }

    /// Parametric-limit frequency converter with a coherent pump `beta`.
    pub fn converter_from_physical(omega_a: f64, omega_c: f64, chi: f64, beta: C64, t: f64) -> Self {
        Self::new(
            CouplerKind::Converter,
            [
                -(omega_a + omega_c) * t,
                -2.0 * beta.re * chi * t,
                -2.0 * beta.im * chi * t,
                -(omega_a - omega_c) * t,
            ],
        )
    }

    fn negated(&self) -> Self {
        let [a, b, c, d] = self.angles;
        Self::new(self.kind, [-a, -b, -c, -d])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamSource {
    Angles(CouplerAngles),
    Direct,
}

/// Validated coupler triple `(T, R, P)` plus the phase-carrying `T̄`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplerParams {
    kind: CouplerKind,
    t: C64,
    r: C64,
    p: C64,
    t_bar: C64,
    source: ParamSource,
}

impl CouplerParams {
    /// Direct construction; `T̄` defaults to `T`.
    pub fn new(kind: CouplerKind, t: C64, r: C64, p: C64) -> Result<Self> {
        let params = Self {
            kind,
            t,
            r,
            p,
            t_bar: t,
            source: ParamSource::Direct,
        };
        params.validate()?;
        Ok(params)
    }

    /// Amplifier with real `T = sqrt(1 + R2)`, `R = sqrt(R2)`, `P = 1`.
    pub fn amplifier_with_gain(r2: f64) -> Result<Self> {
        if !(r2 >= 0.0) {
            return Err(Error::InvalidParams(format!("|R|^2 = {r2} must be non-negative")));
        }
        Self::new(
            CouplerKind::Amplifier,
            C64::new((1.0 + r2).sqrt(), 0.0),
            C64::new(r2.sqrt(), 0.0),
            C64::new(1.0, 0.0),
        )
    }

    pub fn identity(kind: CouplerKind) -> Self {
        let one = C64::new(1.0, 0.0);
        Self {
            kind,
            t: one,
            r: C64::new(0.0, 0.0),
            p: one,
            t_bar: one,
            source: ParamSource::Direct,
        }
    }

    fn validate(&self) -> Result<()> {
        let (t2, r2) = (self.t.norm_sqr(), self.r.norm_sqr());
        let lhs = t2 + self.kind.metric_sign() * r2;
        if !lhs.is_finite() || (lhs - 1.0).abs() > CONSTRAINT_TOL {
            return Err(Error::InvalidParams(format!(
                "{:?}: |T|^2 {} |R|^2 = {lhs}, expected 1",
                self.kind,
                if self.kind == CouplerKind::Amplifier { "-" } else { "+" }
            )));
        }
        if (self.p.norm() - 1.0).abs() > CONSTRAINT_TOL {
            return Err(Error::InvalidParams(format!("|P| = {}, expected 1", self.p.norm())));
        }
        Ok(())
    }

    pub fn kind(&self) -> CouplerKind {
        self.kind
    }
    pub fn t(&self) -> C64 {
        self.t
    }
    pub fn r(&self) -> C64 {
        self.r
    }
    pub fn p(&self) -> C64 {
        self.p
    }
    pub fn t_bar(&self) -> C64 {
        self.t_bar
    }
    pub fn source(&self) -> ParamSource {
        self.source
    }

    /// Ordering parameter `|(|T|^2 + 1) / (|T|^2 - 1)|`; infinite when
    /// `|T| = 1`.
    pub fn ordering_parameter(&self) -> f64 {
        let t2 = self.t.norm_sqr();
        if self.is_degenerate() {
            return f64::INFINITY;
        }
        ((t2 + 1.0) / (t2 - 1.0)).abs()
    }

    /// `R = 0`, i.e. no photon exchange between signal and idler.
    pub fn is_degenerate(&self) -> bool {
        self.r.norm() < 1e-14
    }

    /// Residual of the defining constraints (max over the two equations).
    pub fn constraint_residual(&self) -> f64 {
        let lhs = self.t.norm_sqr() + self.kind.metric_sign() * self.r.norm_sqr();
        (lhs - 1.0).abs().max((self.p.norm() - 1.0).abs())
    }
}

/// `(cosh(phi/2), sinh(phi/2)/phi)` as entire functions of `u = phi^2`,
/// which may be negative.
fn even_hyperbolic(u: f64) -> (f64, f64) {
    if u.abs() < 1.0 {
        let x = u / 4.0;
        let (mut c, mut s) = (0.0, 0.0);
        let mut term = 1.0; // x^k / (2k)!
        let mut k = 0usize;
        loop {
            let sterm = term / (2 * k + 1) as f64;
            c += term;
            s += sterm;
            if term.abs() < 1e-18 && k > 0 {
                break;
            }
            k += 1;
            term *= x / ((2 * k - 1) * (2 * k)) as f64;
        }
        (c, 0.5 * s)
    } else if u > 0.0 {
        let phi = u.sqrt();
        ((0.5 * phi).cosh(), (0.5 * phi).sinh() / phi)
    } else {
        let phi = (-u).sqrt();
        ((0.5 * phi).cos(), (0.5 * phi).sin() / phi)
    }
}

pub fn params_from_angles(a: &CouplerAngles) -> CouplerParams {
    let [p0, p1, p2, p3] = a.angles;
    let i = C64::new(0.0, 1.0);
    let (t, r) = match a.kind {
        CouplerKind::Amplifier => {
            let (c, s) = even_hyperbolic(p1 * p1 + p2 * p2 - p3 * p3);
            // Sign of R fixed so that exp(i sum phi_j K_j) matches the
            // factored form and the Heisenberg matrix.
            (C64::new(c, p3 * s), -C64::new(p2, p1) * s)
        }
        CouplerKind::Converter => {
            let (c, s) = even_hyperbolic(-(p1 * p1 + p2 * p2 + p3 * p3));
            (C64::new(c, p3 * s), C64::new(p2, p1) * s)
        }
    };
    let p = (i * 0.5 * p0).exp();
    let t_bar = match a.kind {
        CouplerKind::Amplifier => t * (-i * 0.5 * p3).exp(),
        CouplerKind::Converter => t,
    };
    CouplerParams {
        kind: a.kind,
        t,
        r,
        p,
        t_bar,
        source: ParamSource::Angles(*a),
    }
}

/// Heisenberg matrix acting on `(a, b^dag)` (amplifier) or `(a, c)`
/// (converter).
pub fn heisenberg_matrix(p: &CouplerParams) -> Matrix2<C64> {
    let (t, r, ph) = (p.t, p.r, p.p);
    let m = match p.kind {
        CouplerKind::Amplifier => Matrix2::new(t, -r, -r.conj(), t.conj()),
        CouplerKind::Converter => Matrix2::new(t, r, -r.conj(), t.conj()),
    };
    m * ph
}

pub fn inverse_params(p: &CouplerParams) -> CouplerParams {
    CouplerParams {
        kind: p.kind,
        t: p.t.conj(),
        r: -p.r,
        p: p.p.conj(),
        t_bar: p.t_bar.conj(),
        source: match p.source {
            ParamSource::Angles(a) => ParamSource::Angles(a.negated()),
            ParamSource::Direct => ParamSource::Direct,
        },
    }
}

/// Parameters of the same device with signal and idler interchanged.
pub fn swap_modes(p: &CouplerParams) -> CouplerParams {
    match p.kind {
        CouplerKind::Amplifier => CouplerParams {
            p: p.p.conj(),
            source: match p.source {
                ParamSource::Angles(a) => {
                    let [p0, p1, p2, p3] = a.angles;
                    ParamSource::Angles(CouplerAngles::new(a.kind, [-p0, p1, p2, p3]))
                }
                ParamSource::Direct => ParamSource::Direct,
            },
            ..*p
        },
        CouplerKind::Converter => CouplerParams {
            t: p.t.conj(),
            r: -p.r.conj(),
            t_bar: p.t_bar.conj(),
            source: match p.source {
                ParamSource::Angles(a) => {
                    let [p0, p1, p2, p3] = a.angles;
                    ParamSource::Angles(CouplerAngles::new(a.kind, [p0, p1, -p2, -p3]))
                }
                ParamSource::Direct => ParamSource::Direct,
            },
            ..*p
        },
    }
}

/// Probability that leaves the truncated box, per column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationReport {
    /// Largest column-norm deficit over columns with `n1 + n2 <= D/2`.
    pub interior_deficit: f64,
    /// Largest column-norm deficit over all columns.
    pub max_deficit: f64,
}

impl TruncationReport {
    fn from_operator(u: &TwoModeOperator) -> Self {
        let (d1, d2) = u.dims();
        let deficits = u.column_deficits();
        let interior = interior_indices(d1, d2, d1.min(d2) / 2);
        Self {
            interior_deficit: interior.iter().map(|&j| deficits[j]).fold(0.0, f64::max),
            max_deficit: deficits.iter().copied().fold(0.0, f64::max),
        }
    }
}

/// `sqrt(n! / (n-k)!)`.
fn falling_sqrt(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * ((n - i) as f64).sqrt())
}

/// Truncated two-mode unitary assembled from the normal-ordered factored
/// product. Matrix elements inside the box are those of the
/// infinite-dimensional operator; the report gives the column-norm deficit.
pub fn two_mode_unitary(
    p: &CouplerParams,
    d1: usize,
    d2: usize,
) -> Result<(TwoModeOperator, TruncationReport)> {
    assert!(d1 >= 1 && d2 >= 1);
    let u = match p.kind {
        CouplerKind::Amplifier => amplifier_factored(p, d1, d2),
        CouplerKind::Converter => converter_factored(p, d1, d2)?,
    };
    let report = TruncationReport::from_operator(&u);
    Ok((u, report))
}

/// [`two_mode_unitary`] that fails when an interior column loses more than
/// `tol` of its norm.
pub fn two_mode_unitary_checked(
    p: &CouplerParams,
    d1: usize,
    d2: usize,
    tol: f64,
) -> Result<TwoModeOperator> {
    let (u, report) = two_mode_unitary(p, d1, d2)?;
    if report.interior_deficit > tol {
        return Err(Error::Truncation {
            what: "two-mode unitary column norm",
            tail: report.interior_deficit,
            tol,
        });
    }
    Ok(u)
}

// T̄*^-1 (PT)*^(-n_a) exp(-P* R b^dag a^dag) exp(P R* a b) (P T*)^(-n_b)
fn amplifier_factored(p: &CouplerParams, d1: usize, d2: usize) -> TwoModeOperator {
    let (t, r, ph) = (p.t, p.r, p.p);
    let pre = C64::new(1.0, 0.0) / p.t_bar.conj();
    let left = C64::new(1.0, 0.0) / (ph * t).conj();
    let right = C64::new(1.0, 0.0) / (ph * t.conj());
    let raise = -ph.conj() * r;
    let lower = ph * r.conj();

    let mut m = CMatrix::zeros(d1 * d2, d1 * d2);
    for n1 in 0..d1 {
        for n2 in 0..d2 {
            let col = n1 * d2 + n2;
            let right_factor = right.powu(n2 as u32);
            let mut lower_k = C64::new(1.0, 0.0); // lower^k / k!
            for k in 0..=n1.min(n2) {
                if k > 0 {
                    lower_k *= lower / k as f64;
                }
                let (j1, j2) = (n1 - k, n2 - k);
                let amp_k = lower_k * falling_sqrt(n1, k) * falling_sqrt(n2, k);
                let mut raise_l = C64::new(1.0, 0.0);
                let mut l = 0;
                while j1 + l < d1 && j2 + l < d2 {
                    if l > 0 {
                        raise_l *= raise / l as f64;
                    }
                    let (m1, m2) = (j1 + l, j2 + l);
                    let amp = raise_l * falling_sqrt(m1, l) * falling_sqrt(m2, l) * amp_k;
                    m[(m1 * d2 + m2, col)] += pre * left.powu(m1 as u32) * amp * right_factor;
                    l += 1;
                }
            }
        }
    }
    TwoModeOperator::from_matrix(m, d1, d2)
}

// (PT)^(n_a) exp(-P R* c^dag a) exp(P* R a^dag c) (P* T)^(-n_c)
fn converter_factored(p: &CouplerParams, d1: usize, d2: usize) -> Result<TwoModeOperator> {
    let (t, r, ph) = (p.t, p.r, p.p);
    if t.norm() < 1e-12 {
        return Err(Error::DegenerateCoupler(
            "converter with T = 0 has no normal-ordered factorization",
        ));
    }
    let left = ph * t;
    let right = C64::new(1.0, 0.0) / (ph.conj() * t);
    let to_idler = -ph * r.conj();
    let to_signal = ph.conj() * r;

    let mut m = CMatrix::zeros(d1 * d2, d1 * d2);
    for n1 in 0..d1 {
        for n2 in 0..d2 {
            let col = n1 * d2 + n2;
            let right_factor = right.powu(n2 as u32);
            let mut sig_k = C64::new(1.0, 0.0);
            for k in 0..=n2 {
                if k > 0 {
                    sig_k *= to_signal / k as f64;
                }
                let (j1, j2) = (n1 + k, n2 - k);
                if j1 >= d1 {
                    break;
                }
                let amp_k = sig_k * falling_sqrt(j1, k) * falling_sqrt(n2, k);
                let mut idl_l = C64::new(1.0, 0.0);
                for l in 0..=j1 {
                    if l > 0 {
                        idl_l *= to_idler / l as f64;
                    }
                    let (m1, m2) = (j1 - l, j2 + l);
                    if m2 >= d2 {
                        break;
                    }
                    let amp = idl_l * falling_sqrt(j1, l) * falling_sqrt(m2, l) * amp_k;
                    m[(m1 * d2 + m2, col)] += left.powu(m1 as u32) * amp * right_factor;
                }
            }
        }
    }
    Ok(TwoModeOperator::from_matrix(m, d1, d2))
}

/// Generators `K_0..K_3` (amplifier) or `L_0..L_3` (converter) as truncated
/// two-mode matrices. `a a^dag` is taken as `n + 1` exactly.
pub fn generators(kind: CouplerKind, d1: usize, d2: usize) -> [TwoModeOperator; 4] {
    let a = ladder(Ladder::Annihilation, d1);
    let ad = a.adjoint();
    let b = ladder(Ladder::Annihilation, d2);
    let bd = b.adjoint();
    let id1 = OperatorMatrix::identity(d1);
    let id2 = OperatorMatrix::identity(d2);
    let n1 = TwoModeOperator::tensor(&ladder(Ladder::Number, d1), &id2);
    let n2 = TwoModeOperator::tensor(&id1, &ladder(Ladder::Number, d2));
    let one = CMatrix::identity(d1 * d2, d1 * d2);
    let half = C64::new(0.5, 0.0);
    let half_over_i = C64::new(0.0, -0.5);
    let wrap = |m: CMatrix| TwoModeOperator::from_matrix(m, d1, d2);

    match kind {
        CouplerKind::Amplifier => {
            let raise = TwoModeOperator::tensor(&ad, &bd); // a^dag b^dag
            let lower = TwoModeOperator::tensor(&a, &b); // a b
            let aad = n1.entries() + &one;
            [
                wrap((&aad - n2.entries()) * half),
                wrap((raise.entries() + lower.entries()) * half),
                wrap((raise.entries() - lower.entries()) * half_over_i),
                wrap((&aad + n2.entries()) * half),
            ]
        }
        CouplerKind::Converter => {
            let hop_in = TwoModeOperator::tensor(&ad, &b); // a^dag c
            let hop_out = TwoModeOperator::tensor(&a, &bd); // c^dag a
            [
                wrap((n1.entries() + n2.entries()) * half),
                wrap((hop_in.entries() + hop_out.entries()) * half),
                wrap((hop_in.entries() - hop_out.entries()) * half_over_i),
                wrap((n1.entries() - n2.entries()) * half),
            ]
        }
    }
}

/// Brute-force `e^{-i(phi0+phi3)/2} exp(i sum_j phi_j K_j)` (amplifier) or
/// `exp(i sum_j phi_j L_j)` (converter).
///
/// The Hermitian generator is built on a padded cutoff, split into blocks
/// of its conserved photon-number combination, exponentiated per block by
/// eigendecomposition and restricted to
/// `d1 x d2`.
pub fn hamiltonian_oracle(a: &CouplerAngles, d1: usize, d2: usize) -> TwoModeOperator {
    assert!(d1 >= 1 && d2 >= 1);
    let (w1, w2) = (d1 + ORACLE_PAD, d2 + ORACLE_PAD);
    let [p0, p1, p2, p3] = a.angles;
    let phase = match a.kind {
        CouplerKind::Amplifier => C64::from_polar(1.0, -0.5 * (p0 + p3)),
        CouplerKind::Converter => C64::new(1.0, 0.0),
    };
    // Hermitian coefficients of the raising and lowering terms
    let up = C64::new(0.5 * p1, -0.5 * p2);
    let down = up.conj();

    let mut m = CMatrix::zeros(d1 * d2, d1 * d2);
    for block in conserved_blocks(a.kind, w1, w2) {
        if !block.iter().any(|&k| k / w2 < d1 && k % w2 < d2) {
            continue;
        }
        let len = block.len();
        let pos = |n1: usize, n2: usize| block.iter().position(|&k| k == n1 * w2 + n2);
        let mut g = CMatrix::zeros(len, len);
        for (col, &k) in block.iter().enumerate() {
            let (n1, n2) = ((k / w2) as f64, (k % w2) as f64);
            let diag = match a.kind {
                CouplerKind::Amplifier => 0.5 * p0 * (n1 + 1.0 - n2) + 0.5 * p3 * (n1 + 1.0 + n2),
                CouplerKind::Converter => 0.5 * p0 * (n1 + n2) + 0.5 * p3 * (n1 - n2),
            };
            g[(col, col)] = C64::new(diag, 0.0);
            let (k1, k2) = (k / w2, k % w2);
            match a.kind {
                CouplerKind::Amplifier => {
                    if let Some(row) = pos(k1 + 1, k2 + 1).filter(|_| k1 + 1 < w1 && k2 + 1 < w2) {
                        g[(row, col)] += up * ((n1 + 1.0) * (n2 + 1.0)).sqrt();
                    }
                    if k1 > 0 && k2 > 0 {
                        let row = pos(k1 - 1, k2 - 1).expect("block closed under ab");
                        g[(row, col)] += down * (n1 * n2).sqrt();
                    }
                }
                CouplerKind::Converter => {
                    if k2 > 0 && k1 + 1 < w1 {
                        let row = pos(k1 + 1, k2 - 1).expect("block closed under a^dag c");
                        g[(row, col)] += up * ((n1 + 1.0) * n2).sqrt();
                    }
                    if k1 > 0 && k2 + 1 < w2 {
                        let row = pos(k1 - 1, k2 + 1).expect("block closed under c^dag a");
                        g[(row, col)] += down * (n1 * (n2 + 1.0)).sqrt();
                    }
                }
            }
        }
        let e = expi_hermitian(&g);
        for (c, &kc) in block.iter().enumerate() {
            let (c1, c2) = (kc / w2, kc % w2);
            if c1 >= d1 || c2 >= d2 {
                continue;
            }
            for (r, &kr) in block.iter().enumerate() {
                let (r1, r2) = (kr / w2, kr % w2);
                if r1 < d1 && r2 < d2 {
                    m[(r1 * d2 + r2, c1 * d2 + c2)] = e[(r, c)] * phase;
                }
            }
        }
    }
    TwoModeOperator::from_matrix(m, d1, d2)
}

/// [`hamiltonian_oracle`] assembled the slow way: dense generators from
/// [`generators`] on the padded space.
#[cfg(test)]
fn hamiltonian_oracle_dense(a: &CouplerAngles, d1: usize, d2: usize) -> TwoModeOperator {
    let (w1, w2) = (d1 + ORACLE_PAD, d2 + ORACLE_PAD);
    let gens = generators(a.kind, w1, w2);
    let mut g = CMatrix::zeros(w1 * w2, w1 * w2);
    for (phi, k) in a.angles.iter().zip(gens.iter()) {
        g += k.entries() * C64::new(0.0, *phi);
    }
    let e = expm_blockwise(&g, &conserved_blocks(a.kind, w1, w2));
    let phase = match a.kind {
        CouplerKind::Amplifier => C64::from_polar(1.0, -0.5 * (a.angles[0] + a.angles[3])),
        CouplerKind::Converter => C64::new(1.0, 0.0),
    };
    let m = CMatrix::from_fn(d1 * d2, d1 * d2, |i, j| {
        let (i1, i2) = (i / d2, i % d2);
        let (j1, j2) = (j / d2, j % d2);
        e[(i1 * w2 + i2, j1 * w2 + j2)] * phase
    });
    TwoModeOperator::from_matrix(m, d1, d2)
}

/// Index groups of constant `n1 - n2` (amplifier) or `n1 + n2` (converter).
fn conserved_blocks(kind: CouplerKind, d1: usize, d2: usize) -> Vec<Vec<usize>> {
    let mut blocks = vec![Vec::new(); d1 + d2 - 1];
    for n1 in 0..d1 {
        for n2 in 0..d2 {
            let key = match kind {
                CouplerKind::Amplifier => n1 + (d2 - 1) - n2,
                CouplerKind::Converter => n1 + n2,
            };
            blocks[key].push(n1 * d2 + n2);
        }
    }
    blocks
}

/// Coherent amplitudes after the coupler: `U D1(alpha) D2(beta) U^dag =
/// D1(alpha') D2(beta')`.
pub fn displacement_transport(p: &CouplerParams, alpha: C64, beta: C64) -> (C64, C64) {
    let (t, r, ph) = (p.t, p.r, p.p);
    match p.kind {
        CouplerKind::Amplifier => (
            ph * (t * alpha - r * beta.conj()),
            ph.conj() * (-r * alpha.conj() + t * beta),
        ),
        CouplerKind::Converter => (
            ph * (t * alpha + r * beta),
            ph * (-r.conj() * alpha + t.conj() * beta),
        ),
    }
}

/// Displacement amplitude produced on the signal mode when both the idler
/// (`beta`) and the pump (`gamma`) are strong coherent fields.
pub fn displacement_from_pump(beta: C64, gamma: C64, chi: f64, omega_a: f64, t: f64) -> Result<C64> {
    if omega_a == 0.0 {
        return Err(Error::InvalidArgument("omega_a must be nonzero".into()));
    }
    let i = C64::new(0.0, 1.0);
    let f = i * chi * beta * gamma.conj() / omega_a * (C64::new(1.0, 0.0) - (-i * omega_a * t).exp());
    Ok(i * f.conj())
}
