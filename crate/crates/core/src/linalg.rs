//! Thin dense linear-algebra helpers over nalgebra.

use nalgebra::{Schur, SymmetricEigen};

use crate::error::{Error, Result};
use crate::{CMatrix, C64};

/// Matrix exponential (scaling and squaring with Padé approximants).
pub fn expm(m: &CMatrix) -> CMatrix {
    assert!(m.is_square(), "expm of a non-square matrix");
    if m.iter().all(|z| *z == C64::new(0.0, 0.0)) {
        return CMatrix::identity(m.nrows(), m.ncols());
    }
    m.exp()
}

/// `exp(i H)` for Hermitian `H`, from its eigendecomposition. Only the
/// lower triangle of `h` is read.
pub fn expi_hermitian(h: &CMatrix) -> CMatrix {
    assert!(h.is_square(), "expi_hermitian of a non-square matrix");
    if h.iter().all(|z| *z == C64::new(0.0, 0.0)) {
        return CMatrix::identity(h.nrows(), h.ncols());
    }
    let eig = SymmetricEigen::new(h.clone());
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (mut col, &lambda) in scaled.column_iter_mut().zip(eig.eigenvalues.iter()) {
        col *= C64::from_polar(1.0, lambda);
    }
    scaled * v.adjoint()
}

/// Exponentiates a matrix that is block diagonal with respect to the given
/// index groups. Every index must occur in exactly one group.
pub fn expm_blockwise(m: &CMatrix, blocks: &[Vec<usize>]) -> CMatrix {
    let n = m.nrows();
    let mut out = CMatrix::zeros(n, n);
    for block in blocks {
        let k = block.len();
        if k == 0 {
            continue;
        }
        let sub = CMatrix::from_fn(k, k, |i, j| m[(block[i], block[j])]);
        let e = expm(&sub);
        for (i, &bi) in block.iter().enumerate() {
            for (j, &bj) in block.iter().enumerate() {
                out[(bi, bj)] = e[(i, j)];
            }
        }
    }
    out
}

/// Eigenvalues of a general complex matrix via the complex Schur form.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<C64>> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let schur = Schur::try_new(m.clone(), 1e-15, 10_000)
        .ok_or(Error::Numerical("Schur iteration did not converge"))?;
    let (_, t) = schur.unpack();
    Ok((0..n).map(|i| t[(i, i)]).collect())
}

/// Largest elementwise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest elementwise modulus of `a - b` restricted to the given indices
/// (same set for rows and columns).
pub fn max_abs_diff_on(a: &CMatrix, b: &CMatrix, idx: &[usize]) -> f64 {
    assert_eq!(a.shape(), b.shape());
    let mut worst = 0.0f64;
    for &i in idx {
        for &j in idx {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

/// `ln(n!)`.
pub fn ln_factorial(n: usize) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

/// `n!` as a float; exact up to 22!.
pub fn factorial(n: usize) -> f64 {
    if n < 171 {
        (1..=n).fold(1.0, |acc, k| acc * k as f64)
    } else {
        f64::INFINITY
    }
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermitian_exponential_matches_pade() {
        let h = CMatrix::from_fn(5, 5, |i, j| {
            let re = ((i + 2 * j) as f64 * 0.37).sin() + ((j + 2 * i) as f64 * 0.37).sin();
            let im = ((i * j + 1) as f64 * 0.11).cos() * (i as f64 - j as f64);
            C64::new(re, im)
        });
        let i = C64::new(0.0, 1.0);
        assert!(max_abs_diff(&expi_hermitian(&h), &expm(&(h.clone() * i))) < 1e-13);
        let z = CMatrix::zeros(4, 4);
        assert_eq!(expi_hermitian(&z), CMatrix::identity(4, 4));
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let z = CMatrix::zeros(6, 6);
        let e = expm(&z);
        assert!(max_abs_diff(&e, &CMatrix::identity(6, 6)) < 1e-14);
    }

    #[test]
    fn expm_of_diagonal() {
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(0.5, 0.0),
            C64::new(0.0, 1.0),
        ]));
        let e = expm(&m);
        assert!((e[(0, 0)] - C64::new(0.5f64.exp(), 0.0)).norm() < 1e-14);
        assert!((e[(1, 1)] - C64::new(1.0f64.cos(), 1.0f64.sin())).norm() < 1e-14);
    }

    #[test]
    fn eigenvalues_of_triangular() {
        let mut m = CMatrix::zeros(3, 3);
        m[(0, 0)] = C64::new(1.0, 1.0);
        m[(1, 1)] = C64::new(-2.0, 0.0);
        m[(2, 2)] = C64::new(0.0, 3.0);
        m[(0, 2)] = C64::new(5.0, 0.0);
        let mut ev = eigenvalues(&m).unwrap();
        ev.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((ev[0] - C64::new(-2.0, 0.0)).norm() < 1e-12);
        assert!((ev[1] - C64::new(0.0, 3.0)).norm() < 1e-12);
        assert!((ev[2] - C64::new(1.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(3, 4), 0.0);
        assert_eq!(factorial(5), 120.0);
        assert!((ln_factorial(10) - 3628800f64.ln()).abs() < 1e-12);
    }
}
