//! Truncated Fock-basis states and operators.
//!
//! A single mode is represented on the span of `|0>, ..., |D-1>`. Two-mode
//! operators use the product basis with index `n1 * d2 + n2`.

use std::ops::Mul;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{self, expm};
use crate::{CMatrix, CVector, C64};

/// Pure state amplitudes in a truncated Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amps: CVector,
}

impl FockVector {
    pub fn new(amps: Vec<C64>) -> Self {
        assert!(!amps.is_empty(), "cutoff must be at least 1");
        Self {
            amps: DVector::from_vec(amps),
        }
    }

    pub fn from_vector(amps: CVector) -> Self {
        assert!(!amps.is_empty(), "cutoff must be at least 1");
        Self { amps }
    }

    /// Builds a unit-norm state from arbitrary (nonzero) amplitudes.
    pub fn normalized(amps: Vec<C64>) -> Result<Self> {
        let mut v = Self::new(amps);
        let n = v.norm_sqr();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidArgument("cannot normalize a zero vector".into()));
        }
        v.amps /= C64::new(n.sqrt(), 0.0);
        Ok(v)
    }

    pub fn vacuum(cutoff: usize) -> Self {
        Self::fock(0, cutoff)
    }

    pub fn fock(n: usize, cutoff: usize) -> Self {
        assert!(n < cutoff, "|{n}> does not fit below cutoff {cutoff}");
        let mut amps = CVector::zeros(cutoff);
        amps[n] = C64::new(1.0, 0.0);
        Self { amps }
    }

    /// Coherent state `|alpha>` truncated at the cutoff. The amplitudes are
    /// the exact infinite-dimensional ones; the missing tail is
    /// `1 - norm_sqr()`.
    pub fn coherent(alpha: C64, cutoff: usize) -> Self {
        assert!(cutoff >= 1);
        let mut amps = CVector::zeros(cutoff);
        let mut a = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
        amps[0] = a;
        for n in 1..cutoff {
            a *= alpha / (n as f64).sqrt();
            amps[n] = a;
        }
        Self { amps }
    }

    pub fn cutoff(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &CVector {
        &self.amps
    }

    pub fn into_inner(self) -> CVector {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn normalize(&self) -> Result<Self> {
        Self::normalized(self.amps.iter().copied().collect())
    }

    /// Probability weight on `|n>` for `n >= from`.
    pub fn tail_mass_from(&self, from: usize) -> f64 {
        self.amps.iter().skip(from).map(|z| z.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &FockVector) -> C64 {
        assert_eq!(self.cutoff(), other.cutoff(), "cutoff mismatch");
        self.amps.dotc(&other.amps)
    }

    /// Fock-diagonal part `|<n|psi>|^2`.
    pub fn diagonal(&self) -> DensityDiagonal {
        DensityDiagonal::from_probs_unchecked(self.amps.iter().map(|z| z.norm_sqr()).collect())
    }

    /// Same state in a different cutoff (zero-padded or truncated).
    pub fn with_cutoff(&self, cutoff: usize) -> Self {
        let mut amps = CVector::zeros(cutoff);
        for (n, a) in self.amps.iter().enumerate().take(cutoff) {
            amps[n] = *a;
        }
        Self { amps }
    }
}

/// Fock-diagonal mixture. The trace is carried explicitly so sub-normalized
/// intermediate states can be represented.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityDiagonal {
    probs: Vec<f64>,
    trace: f64,
}

impl DensityDiagonal {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidArgument("cutoff must be at least 1".into()));
        }
        if let Some(bad) = probs.iter().find(|p| !(**p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidArgument(format!("negative or non-finite weight {bad}")));
        }
        Ok(Self::from_probs_unchecked(probs))
    }

    pub(crate) fn from_probs_unchecked(probs: Vec<f64>) -> Self {
        let trace = probs.iter().sum();
        Self { probs, trace }
    }

    pub fn vacuum(cutoff: usize) -> Self {
        Self::fock(0, cutoff)
    }

    pub fn fock(n: usize, cutoff: usize) -> Self {
        assert!(n < cutoff);
        let mut probs = vec![0.0; cutoff];
        probs[n] = 1.0;
        Self { probs, trace: 1.0 }
    }

    pub fn cutoff(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn trace(&self) -> f64 {
        self.trace
    }

    pub fn normalized(&self) -> Result<Self> {
        if !(self.trace > 0.0) {
            return Err(Error::ZeroProbability {
                p: self.trace,
                threshold: 0.0,
            });
        }
        Ok(Self {
            probs: self.probs.iter().map(|p| p / self.trace).collect(),
            trace: 1.0,
        })
    }

    /// Mean photon number of the normalized distribution.
    pub fn mean(&self) -> f64 {
        self.moment(1) / self.trace
    }

    /// Photon-number variance of the normalized distribution.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.moment(2) / self.trace - m * m
    }

    fn moment(&self, k: i32) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(n, p)| (n as f64).powi(k) * p)
            .sum()
    }
}

/// Single-mode operator in the truncated Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    entries: CMatrix,
}

impl OperatorMatrix {
    pub fn from_matrix(entries: CMatrix) -> Self {
        assert!(entries.is_square() && entries.nrows() >= 1);
        Self { entries }
    }

    pub fn identity(cutoff: usize) -> Self {
        Self::from_matrix(CMatrix::identity(cutoff, cutoff))
    }

    pub fn zeros(cutoff: usize) -> Self {
        Self::from_matrix(CMatrix::zeros(cutoff, cutoff))
    }

    /// `diag(z^0, z^1, ..., z^(D-1))`, i.e. the operator `z^n`.
    pub fn power_of_number(z: C64, cutoff: usize) -> Self {
        let mut m = CMatrix::zeros(cutoff, cutoff);
        let mut acc = C64::new(1.0, 0.0);
        for n in 0..cutoff {
            m[(n, n)] = acc;
            acc *= z;
        }
        Self::from_matrix(m)
    }

    pub fn cutoff(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_inner(self) -> CMatrix {
        self.entries
    }

    pub fn adjoint(&self) -> Self {
        Self::from_matrix(self.entries.adjoint())
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::from_matrix(&self.entries * c)
    }

    pub fn apply(&self, v: &FockVector) -> FockVector {
        assert_eq!(self.cutoff(), v.cutoff(), "cutoff mismatch");
        FockVector::from_vector(&self.entries * v.amps())
    }

    /// Largest elementwise deviation on the leading `k x k` block. The two
    /// operators may have different cutoffs as long as both cover `k`.
    pub fn max_diff_leading(&self, other: &OperatorMatrix, k: usize) -> f64 {
        assert!(k <= self.cutoff() && k <= other.cutoff(), "block {k} exceeds a cutoff");
        let a = self.entries.view((0, 0), (k, k));
        let b = other.entries.view((0, 0), (k, k));
        a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    pub fn max_diff(&self, other: &OperatorMatrix) -> f64 {
        linalg::max_abs_diff(&self.entries, &other.entries)
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.cutoff(), rhs.cutoff(), "cutoff mismatch");
        OperatorMatrix::from_matrix(&self.entries * &rhs.entries)
    }
}

/// Operator on the product space of two truncated modes.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeOperator {
    entries: CMatrix,
    d1: usize,
    d2: usize,
}

impl TwoModeOperator {
    pub fn from_matrix(entries: CMatrix, d1: usize, d2: usize) -> Self {
        assert!(d1 >= 1 && d2 >= 1);
        assert_eq!(entries.shape(), (d1 * d2, d1 * d2));
        Self { entries, d1, d2 }
    }

    pub fn identity(d1: usize, d2: usize) -> Self {
        Self::from_matrix(CMatrix::identity(d1 * d2, d1 * d2), d1, d2)
    }

    pub fn tensor(a: &OperatorMatrix, b: &OperatorMatrix) -> Self {
        Self::from_matrix(a.entries().kronecker(b.entries()), a.cutoff(), b.cutoff())
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d1, self.d2)
    }

    pub fn index(&self, n1: usize, n2: usize) -> usize {
        n1 * self.d2 + n2
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn get(&self, (m1, m2): (usize, usize), (n1, n2): (usize, usize)) -> C64 {
        self.entries[(m1 * self.d2 + m2, n1 * self.d2 + n2)]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_matrix(self.entries.adjoint(), self.d1, self.d2)
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        &self.entries * v
    }

    /// The same operator with the two tensor factors exchanged.
    pub fn swap_factors(&self) -> Self {
        let (d1, d2) = (self.d1, self.d2);
        let perm = |k: usize| {
            let (n1, n2) = (k / d2, k % d2);
            n2 * d1 + n1
        };
        let mut out = CMatrix::zeros(d1 * d2, d1 * d2);
        for i in 0..d1 * d2 {
            for j in 0..d1 * d2 {
                out[(perm(i), perm(j))] = self.entries[(i, j)];
            }
        }
        Self::from_matrix(out, d2, d1)
    }

    /// Product-basis indices with total photon number `n1 + n2 <= max_total`.
    pub fn interior_indices(&self, max_total: usize) -> Vec<usize> {
        interior_indices(self.d1, self.d2, max_total)
    }

    /// Largest elementwise deviation on the block with `n1 + n2 <= max_total`.
    pub fn max_diff_interior(&self, other: &TwoModeOperator, max_total: usize) -> f64 {
        assert_eq!(self.dims(), other.dims());
        linalg::max_abs_diff_on(&self.entries, &other.entries, &self.interior_indices(max_total))
    }

    /// `1 - ||column||^2` for every column: probability that leaves the box.
    pub fn column_deficits(&self) -> Vec<f64> {
        (0..self.entries.ncols())
            .map(|j| 1.0 - self.entries.column(j).norm_squared())
            .collect()
    }
}

impl Mul for &TwoModeOperator {
    type Output = TwoModeOperator;
    fn mul(self, rhs: &TwoModeOperator) -> TwoModeOperator {
        assert_eq!(self.dims(), rhs.dims());
        TwoModeOperator::from_matrix(&self.entries * &rhs.entries, self.d1, self.d2)
    }
}

pub fn interior_indices(d1: usize, d2: usize, max_total: usize) -> Vec<usize> {
    let mut idx = Vec::new();
    for n1 in 0..d1 {
        for n2 in 0..d2 {
            if n1 + n2 <= max_total {
                idx.push(n1 * d2 + n2);
            }
        }
    }
    idx
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Creation,
    Annihilation,
    Number,
}

pub fn ladder(kind: Ladder, cutoff: usize) -> OperatorMatrix {
    assert!(cutoff >= 1);
    let mut m = CMatrix::zeros(cutoff, cutoff);
    for n in 1..cutoff {
        let s = C64::new((n as f64).sqrt(), 0.0);
        match kind {
            Ladder::Annihilation => m[(n - 1, n)] = s,
            Ladder::Creation => m[(n, n - 1)] = s,
            Ladder::Number => {}
        }
    }
    if kind == Ladder::Number {
        for n in 0..cutoff {
            m[(n, n)] = C64::new(n as f64, 0.0);
        }
    }
    OperatorMatrix::from_matrix(m)
}

/// `exp(alpha a^dag - alpha^* a)` built from the truncated generator.
///
/// The result is exactly unitary on the truncated space and reproduces the
/// infinite-dimensional matrix elements away from the cutoff. A warning is
/// logged when `|alpha|^2 > D/4`; [`displacement_tail`] gives the lost mass
/// of the displaced vacuum.
pub fn displacement_matrix(alpha: C64, cutoff: usize) -> OperatorMatrix {
    if alpha.norm_sqr() > cutoff as f64 / 4.0 {
        log::warn!(
            "displacement |alpha|^2 = {:.3} exceeds D/4 = {:.2}; tail mass {:.2e}",
            alpha.norm_sqr(),
            cutoff as f64 / 4.0,
            displacement_tail(alpha, cutoff)
        );
    }
    if alpha == C64::new(0.0, 0.0) {
        return OperatorMatrix::identity(cutoff);
    }
    let a = ladder(Ladder::Annihilation, cutoff);
    let gen = a.entries().adjoint() * alpha - a.entries() * alpha.conj();
    OperatorMatrix::from_matrix(expm(&gen))
}

/// Whether a displacement by `alpha` stays inside the `|alpha|^2 <= D/4` guard.
pub fn displacement_within_guard(alpha: C64, cutoff: usize) -> bool {
    alpha.norm_sqr() <= cutoff as f64 / 4.0
}

/// Poisson mass of `|alpha>` on photon numbers `>= cutoff`.
pub fn displacement_tail(alpha: C64, cutoff: usize) -> f64 {
    let kept = FockVector::coherent(alpha, cutoff).norm_sqr();
    (1.0 - kept).max(0.0)
}

/// Mandel `Q = Var(n)/<n> - 1` of the normalized distribution.
pub fn mandel_q(rho: &DensityDiagonal) -> Result<f64> {
    if !(rho.trace() > 0.0) {
        return Err(Error::ZeroProbability {
            p: rho.trace(),
            threshold: 0.0,
        });
    }
    let mean = rho.mean();
    if mean <= 0.0 {
        return Err(Error::UndefinedForVacuum);
    }
    Ok(rho.variance() / mean - 1.0)
}

/// Thermal photon-number distribution `mean^n / (mean+1)^(n+1)`,
/// renormalized over the cutoff.
pub fn thermal_diagonal(mean: f64, cutoff: usize) -> DensityDiagonal {
    assert!(mean >= 0.0 && cutoff >= 1);
    if mean == 0.0 {
        return DensityDiagonal::vacuum(cutoff);
    }
    let ratio = mean / (mean + 1.0);
    let mut probs = Vec::with_capacity(cutoff);
    let mut p = 1.0 / (mean + 1.0);
    for _ in 0..cutoff {
        probs.push(p);
        p *= ratio;
    }
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    DensityDiagonal::from_probs_unchecked(probs)
}

/// `|<a|b>|^2` for normalized states.
pub fn fidelity(a: &FockVector, b: &FockVector) -> f64 {
    let overlap = a.inner(b).norm_sqr();
    (overlap / (a.norm_sqr() * b.norm_sqr())).min(1.0)
}

/// Phase delay `exp(i theta n)` as realized by a cross-Kerr medium driven
/// by a strong reference beam.
pub trait KerrPhase {
    fn kerr_phase(&self, theta: f64) -> Self;
}

impl KerrPhase for FockVector {
    fn kerr_phase(&self, theta: f64) -> Self {
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(n, a)| a * C64::from_polar(1.0, theta * n as f64))
            .collect();
        FockVector::new(amps)
    }
}

impl KerrPhase for DensityDiagonal {
    fn kerr_phase(&self, _theta: f64) -> Self {
        self.clone()
    }
}

impl KerrPhase for OperatorMatrix {
    /// Conjugation `e^{i theta n} rho e^{-i theta n}`.
    fn kerr_phase(&self, theta: f64) -> Self {
        let d = self.cutoff();
        let m = CMatrix::from_fn(d, d, |i, j| {
            self.entries[(i, j)] * C64::from_polar(1.0, theta * (i as f64 - j as f64))
        });
        OperatorMatrix::from_matrix(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn annihilation_lowers() {
        let a = ladder(Ladder::Annihilation, 2);
        let out = a.apply(&FockVector::fock(1, 2));
        assert_eq!(out, FockVector::fock(0, 2));
    }

    #[test]
    fn creation_raises_with_sqrt() {
        let ad = ladder(Ladder::Creation, 3);
        let out = ad.apply(&FockVector::fock(1, 3));
        assert!((out.amps()[2] - c(2f64.sqrt(), 0.0)).norm() < 1e-15);
        assert_eq!(ad, ladder(Ladder::Annihilation, 3).adjoint());
    }

    #[test]
    fn number_is_creation_times_annihilation() {
        let ad = ladder(Ladder::Creation, 5);
        let a = ladder(Ladder::Annihilation, 5);
        let n = &ad * &a;
        assert!(n.max_diff(&ladder(Ladder::Number, 5)) < 1e-14);
    }

    #[test]
    fn adjoint_is_involution() {
        let m = displacement_matrix(c(0.3, -0.2), 6);
        assert_eq!(m.adjoint().adjoint(), m);
    }

    #[test]
    fn displacement_zero_is_identity() {
        assert_eq!(displacement_matrix(c(0.0, 0.0), 7), OperatorMatrix::identity(7));
    }

    #[test]
    fn displaced_vacuum_overlap() {
        // <0|D(1)|0> = exp(-1/2); oracle: coherent amplitude series.
        let d = displacement_matrix(c(1.0, 0.0), 30);
        assert!((d.entries()[(0, 0)] - c((-0.5f64).exp(), 0.0)).norm() < 1e-9);
        let coh = FockVector::coherent(c(1.0, 0.0), 30);
        for n in 0..12 {
            assert!((d.entries()[(n, 0)] - coh.amps()[n]).norm() < 1e-10);
        }
    }

    #[test]
    fn displacement_inverse() {
        let alpha = c(0.5, 0.3);
        let p = &displacement_matrix(alpha, 40) * &displacement_matrix(-alpha, 40);
        assert!(p.max_diff(&OperatorMatrix::identity(40)) < 1e-10);
    }

    #[test]
    fn displacement_composition_interior() {
        let (a, b) = (c(0.7, -0.4), c(-0.2, 0.9));
        let d = 50;
        let lhs = &displacement_matrix(a, d) * &displacement_matrix(b, d);
        let phase = C64::from_polar(1.0, (a * b.conj()).im);
        let rhs = displacement_matrix(a + b, d).scale(phase);
        assert!(lhs.max_diff_leading(&rhs, d / 2) < 1e-8);
    }

    #[test]
    fn mandel_q_of_fock_is_minus_one() {
        let q = mandel_q(&DensityDiagonal::fock(4, 10)).unwrap();
        assert!((q + 1.0).abs() < 1e-14);
    }

    #[test]
    fn mandel_q_of_coherent_is_zero() {
        let rho = FockVector::coherent(c(2f64.sqrt(), 0.0), 60).diagonal();
        assert!(mandel_q(&rho).unwrap().abs() < 1e-6);
    }

    #[test]
    fn mandel_q_of_thermal_is_mean() {
        let rho = thermal_diagonal(1.5, 200);
        assert!((mandel_q(&rho).unwrap() - 1.5).abs() < 1e-9);
    }

    #[test]
    fn mandel_q_vacuum_errors() {
        assert_eq!(mandel_q(&DensityDiagonal::vacuum(5)), Err(Error::UndefinedForVacuum));
    }

    #[test]
    fn thermal_cases() {
        assert_eq!(thermal_diagonal(0.0, 4).probs(), &[1.0, 0.0, 0.0, 0.0]);
        let t = thermal_diagonal(1.0, 80);
        for n in 0..20 {
            assert!((t.probs()[n] - 0.5f64.powi(n as i32 + 1)).abs() < 1e-15);
        }
        let t3 = thermal_diagonal(3.0, 200);
        assert!((t3.mean() - 3.0).abs() < 1e-8);
        assert!((t3.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kerr_phase_cases() {
        let v = FockVector::normalized(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(v.kerr_phase(0.0), v);
        let full = v.kerr_phase(2.0 * PI);
        assert!((full.inner(&v).norm() - 1.0).abs() < 1e-12);
        let flipped = v.kerr_phase(PI);
        let expect = FockVector::normalized(vec![c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        for n in 0..2 {
            assert!((flipped.amps()[n] - expect.amps()[n]).norm() < 1e-12);
        }
        let rho = DensityDiagonal::fock(2, 4);
        assert_eq!(rho.kerr_phase(1.3), rho);
    }

    #[test]
    fn fidelity_cases() {
        let v = FockVector::coherent(c(0.3, 0.1), 20).normalize().unwrap();
        assert!((fidelity(&v, &v) - 1.0).abs() < 1e-14);
        assert_eq!(fidelity(&FockVector::fock(0, 3), &FockVector::fock(1, 3)), 0.0);
        let coh = FockVector::coherent(c(1.0, 0.0), 40);
        let f = fidelity(&FockVector::vacuum(40), &coh);
        assert!((f - (-1.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn tensor_product_acts_factorwise() {
        let a = displacement_matrix(c(0.2, 0.1), 4);
        let b = ladder(Ladder::Creation, 3);
        let u = FockVector::coherent(c(0.4, 0.0), 4);
        let v = FockVector::normalized(vec![c(1.0, 0.0), c(0.0, 1.0), c(0.5, 0.0)]).unwrap();
        let ab = TwoModeOperator::tensor(&a, &b);
        let lhs = ab.apply(&u.amps().kronecker(v.amps()));
        let rhs = a.apply(&u).amps().kronecker(b.apply(&v).amps());
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn swap_factors_exchanges_tensor_order() {
        let a = displacement_matrix(c(0.2, 0.1), 3);
        let b = ladder(Ladder::Creation, 4);
        let ab = TwoModeOperator::tensor(&a, &b);
        let ba = TwoModeOperator::tensor(&b, &a);
        assert!(linalg::max_abs_diff(ab.swap_factors().entries(), ba.entries()) < 1e-15);
    }
}
