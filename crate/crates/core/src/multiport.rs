//! U(p,q) Heisenberg matrices `exp(i G H)` of linear multiport couplers.
//!
//! The first `p` modes enter through annihilation operators and the last
//! `q` through creation operators; `G = diag(1 x p, -1 x q)` is the
//! preserved metric.

use nalgebra::DMatrix;

use crate::couplers::{CouplerAngles, CouplerKind};
use crate::error::{Error, Result};
use crate::linalg::expm;
use crate::{CMatrix, C64};

/// Tolerance on `H = H^dag`.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModePartition {
    p: usize,
    q: usize,
}

impl ModePartition {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p + q == 0 {
            return Err(Error::InvalidArgument("a partition needs at least one mode".into()));
        }
        Ok(Self { p, q })
    }

    pub fn p(&self) -> usize {
        self.p
    }
    pub fn q(&self) -> usize {
        self.q
    }
    pub fn modes(&self) -> usize {
        self.p + self.q
    }

    pub fn metric(&self) -> CMatrix {
        DMatrix::from_fn(self.modes(), self.modes(), |i, j| {
            let sign = if i < self.p { 1.0 } else { -1.0 };
            C64::new(if i == j { sign } else { 0.0 }, 0.0)
        })
    }
}

/// Hermitian `N x N` coupling matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianCoupling {
    h: CMatrix,
}

impl HermitianCoupling {
    pub fn new(h: CMatrix) -> Result<Self> {
        if !h.is_square() || h.nrows() == 0 {
            return Err(Error::InvalidArgument(format!("coupling must be square, got {}x{}", h.nrows(), h.ncols())));
        }
        let dev = (&h - h.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if dev > HERMITIAN_TOL {
            return Err(Error::InvalidArgument(format!("coupling is not hermitian (deviation {dev:e})")));
        }
        Ok(Self { h })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.h
    }

    pub fn modes(&self) -> usize {
        self.h.nrows()
    }
}

/// `exp(i G H)`.
pub fn upq_matrix(h: &HermitianCoupling, part: &ModePartition) -> Result<CMatrix> {
    if h.modes() != part.modes() {
        return Err(Error::DimensionMismatch {
            expected: part.modes(),
            got: h.modes(),
        });
    }
    Ok(expm(&(part.metric() * h.matrix() * C64::new(0.0, 1.0))))
}

/// `max |M G M^dag - G|`.
pub fn verify_pseudo_unitarity(m: &CMatrix, part: &ModePartition) -> f64 {
    let g = part.metric();
    (m * &g * m.adjoint() - g).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Coupling and partition whose [`upq_matrix`] equals the two-mode
/// Heisenberg matrix of a coupler with these angles.
pub fn coupling_from_angles(a: &CouplerAngles) -> (HermitianCoupling, ModePartition) {
    let [p0, p1, p2, p3] = a.angles;
    let off = C64::new(0.5 * p1, -0.5 * p2);
    let (h22, part) = match a.kind {
        CouplerKind::Amplifier => (0.5 * (p3 - p0), ModePartition { p: 1, q: 1 }),
        CouplerKind::Converter => (0.5 * (p0 - p3), ModePartition { p: 2, q: 0 }),
    };
    let h = DMatrix::from_row_slice(2, 2, &[C64::new(0.5 * (p0 + p3), 0.0), off, off.conj(), C64::new(h22, 0.0)]);
    (HermitianCoupling { h }, part)
}
