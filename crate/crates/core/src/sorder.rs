//! s-ordered ladder monomials and their conversion to normal order.
//!
//! `{a^dag^m a^n}_s` denotes the s-ordered product: `s = 1` normal,
//! `s = 0` symmetric (Weyl), `s = -1` antinormal.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fock::OperatorMatrix;
use crate::{CMatrix, C64};

const OVERFLOW_LIMIT: f64 = 1e300;

/// Sparse polynomial `sum c_{nm} a^dag^n a^m`, keyed by
/// `(creation power, annihilation power)`. Zero coefficients are never
/// stored.
///
/// Produced by [`reorder_monomial`] the keys refer to t-ordered monomials;
/// with `t = 1` they are ordinary normal-ordered products.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NormalPoly {
    terms: BTreeMap<(usize, usize), C64>,
}

impl NormalPoly {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn constant(c: C64) -> Self {
        let mut p = Self::new();
        p.add_term(0, 0, c);
        p
    }

    pub fn monomial(n: usize, m: usize) -> Self {
        let mut p = Self::new();
        p.add_term(n, m, C64::new(1.0, 0.0));
        p
    }

    pub fn from_terms<I: IntoIterator<Item = ((usize, usize), C64)>>(terms: I) -> Self {
        let mut p = Self::new();
        for ((n, m), c) in terms {
            p.add_term(n, m, c);
        }
        p
    }

    /// Adds `c` to the coefficient of `(n, m)`, removing the key if the sum
    /// is zero.
    pub fn add_term(&mut self, n: usize, m: usize, c: C64) {
        if c == C64::new(0.0, 0.0) {
            return;
        }
        let entry = self.terms.entry((n, m)).or_insert(C64::new(0.0, 0.0));
        *entry += c;
        if *entry == C64::new(0.0, 0.0) {
            self.terms.remove(&(n, m));
        }
    }

    pub fn coeff(&self, n: usize, m: usize) -> C64 {
        self.terms.get(&(n, m)).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn terms(&self) -> impl Iterator<Item = ((usize, usize), C64)> + '_ {
        self.terms.iter().map(|(&k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest creation and annihilation powers present.
    pub fn max_powers(&self) -> (usize, usize) {
        self.terms
            .keys()
            .fold((0, 0), |(a, b), &(n, m)| (a.max(n), b.max(m)))
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::from_terms(self.terms().map(|(k, v)| (k, v * c)))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((n, m), c) in other.terms() {
            out.add_term(n, m, c);
        }
        out
    }

    /// Reinterprets every monomial as s-ordered and re-expands it in
    /// t-order.
    pub fn reorder(&self, s: f64, t: f64) -> Self {
        let mut out = Self::new();
        for ((n, m), c) in self.terms() {
            for ((a, b), d) in reorder_monomial(n, m, s, t).terms() {
                out.add_term(a, b, c * d);
            }
        }
        out
    }

    /// Largest coefficient difference over the union of keys.
    pub fn max_diff(&self, other: &Self) -> f64 {
        self.terms
            .keys()
            .chain(other.terms.keys())
            .map(|&(n, m)| (self.coeff(n, m) - other.coeff(n, m)).norm())
            .fold(0.0, f64::max)
    }
}

/// `{a^dag^m a^n}_s = sum_k k! C(m,k) C(n,k) ((t-s)/2)^k {a^dag^(m-k) a^(n-k)}_t`.
pub fn reorder_monomial(m: usize, n: usize, s: f64, t: f64) -> NormalPoly {
    let mut p = NormalPoly::new();
    let x = 0.5 * (t - s);
    let mut c = 1.0;
    for k in 0..=m.min(n) {
        if k > 0 {
            c = c * ((m - k + 1) * (n - k + 1)) as f64 * x / k as f64;
        }
        if c == 0.0 {
            break;
        }
        p.add_term(m - k, n - k, C64::new(c, 0.0));
    }
    p
}

/// Normal-ordered form of `sum_{n,m} A_n B_m {a^dag^n a^m}_s`.
pub fn s_ordered_bilinear(a: &[C64], b: &[C64], s: f64) -> Result<NormalPoly> {
    if !s.is_finite() {
        return Err(Error::InvalidArgument(format!("ordering parameter {s} is not finite")));
    }
    let x = 0.5 * (1.0 - s);
    let mut acc: BTreeMap<(usize, usize), C64> = BTreeMap::new();
    for (n, &an) in a.iter().enumerate() {
        if an == C64::new(0.0, 0.0) {
            continue;
        }
        for (m, &bm) in b.iter().enumerate() {
            if bm == C64::new(0.0, 0.0) {
                continue;
            }
            let w = an * bm;
            let mut c = 1.0;
            for k in 0..=n.min(m) {
                if k > 0 {
                    c = c * ((n - k + 1) * (m - k + 1)) as f64 * x / k as f64;
                }
                let term = w * c;
                let mag = term.norm();
                if !mag.is_finite() || mag > OVERFLOW_LIMIT || c.abs() > OVERFLOW_LIMIT {
                    return Err(Error::Overflow(mag));
                }
                *acc.entry((n - k, m - k)).or_insert(C64::new(0.0, 0.0)) += term;
            }
        }
    }
    Ok(NormalPoly::from_terms(acc))
}

/// `sqrt(n! / (n-k)!)`.
fn falling_sqrt(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * ((n - i) as f64).sqrt())
}

/// Truncated matrix of a normal-ordered polynomial (annihilators act
/// first).
pub fn normal_poly_to_matrix(p: &NormalPoly, cutoff: usize) -> OperatorMatrix {
    let mut m = CMatrix::zeros(cutoff, cutoff);
    for ((cr, an), c) in p.terms() {
        // <i| a^dag^cr a^an |j> with r = j - an = i - cr
        for j in an..cutoff {
            let r = j - an;
            let i = r + cr;
            if i >= cutoff {
                break;
            }
            m[(i, j)] += c * falling_sqrt(j, an) * falling_sqrt(i, cr);
        }
    }
    OperatorMatrix::from_matrix(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{ladder, Ladder};
    use crate::linalg::max_abs_diff;
    use proptest::prelude::*;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    /// Average of all distinct orderings of `m` creators and `n` annihilators,
    /// built on a padded space and restricted.
    fn weyl_brute(m: usize, n: usize, d: usize) -> CMatrix {
        let w = d + m + n + 2;
        let ad = ladder(Ladder::Creation, w).into_inner();
        let a = ladder(Ladder::Annihilation, w).into_inner();
        let total = m + n;
        let mut sum = CMatrix::zeros(w, w);
        let mut count = 0usize;
        for mask in 0u32..(1 << total) {
            if mask.count_ones() as usize != m {
                continue;
            }
            let mut prod = CMatrix::identity(w, w);
            for bit in 0..total {
                prod = if mask & (1 << bit) != 0 { prod * &ad } else { prod * &a };
            }
            sum += prod;
            count += 1;
        }
        (sum / re(count as f64)).view((0, 0), (d, d)).into_owned()
    }

    fn antinormal_brute(m: usize, n: usize, d: usize) -> CMatrix {
        let w = d + m + n + 2;
        let ad = ladder(Ladder::Creation, w).into_inner();
        let a = ladder(Ladder::Annihilation, w).into_inner();
        let mut prod = CMatrix::identity(w, w);
        for _ in 0..n {
            prod *= &a;
        }
        for _ in 0..m {
            prod *= &ad;
        }
        prod.view((0, 0), (d, d)).into_owned()
    }

    #[test]
    fn same_order_is_identity_map() {
        let p = reorder_monomial(3, 2, 0.4, 0.4);
        assert_eq!(p, NormalPoly::monomial(3, 2));
    }

    #[test]
    fn symmetric_number_operator() {
        let p = reorder_monomial(1, 1, 0.0, 1.0);
        assert_eq!(p, NormalPoly::from_terms([((1, 1), re(1.0)), ((0, 0), re(0.5))]));
    }

    #[test]
    fn antinormal_number_operator() {
        let p = reorder_monomial(1, 1, -1.0, 1.0);
        assert_eq!(p, NormalPoly::from_terms([((1, 1), re(1.0)), ((0, 0), re(1.0))]));
    }

    #[test]
    fn weyl_matches_brute_force() {
        let d = 10;
        for m in 0..=3 {
            for n in 0..=3 {
                let got = normal_poly_to_matrix(&reorder_monomial(m, n, 0.0, 1.0), d);
                assert!(max_abs_diff(got.entries(), &weyl_brute(m, n, d)) < 1e-10, "m={m} n={n}");
            }
        }
    }

    #[test]
    fn antinormal_matches_brute_force() {
        let d = 10;
        for m in 0..=4 {
            for n in 0..=4 {
                let got = normal_poly_to_matrix(&reorder_monomial(m, n, -1.0, 1.0), d);
                assert!(max_abs_diff(got.entries(), &antinormal_brute(m, n, d)) < 1e-9, "m={m} n={n}");
            }
        }
    }

    #[test]
    fn bilinear_cases() {
        let one = [re(1.0)];
        assert_eq!(s_ordered_bilinear(&one, &one, 3.0).unwrap(), NormalPoly::constant(re(1.0)));
        let lin = [re(0.0), re(1.0)];
        for s in [1.0, 2.5, 7.0] {
            let p = s_ordered_bilinear(&lin, &lin, s).unwrap();
            let want = NormalPoly::from_terms([((1, 1), re(1.0)), ((0, 0), re((1.0 - s) / 2.0))]);
            assert!(p.max_diff(&want) < 1e-15);
        }
        assert!(s_ordered_bilinear(&one, &one, f64::INFINITY).is_err());
    }

    #[test]
    fn bilinear_overflow_guard() {
        let big: Vec<C64> = (0..60).map(|_| re(1e200)).collect();
        assert!(matches!(s_ordered_bilinear(&big, &big, 5.0), Err(Error::Overflow(_))));
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let mut p = NormalPoly::monomial(1, 0);
        p.add_term(1, 0, re(-1.0));
        assert!(p.is_empty());
        assert_eq!(reorder_monomial(2, 2, 1.0, 1.0).len(), 1);
    }

    #[test]
    fn matrix_cases() {
        let id = normal_poly_to_matrix(&NormalPoly::constant(re(1.0)), 6);
        assert_eq!(id, OperatorMatrix::identity(6));
        let cr = normal_poly_to_matrix(&NormalPoly::monomial(1, 0), 6);
        assert!(max_abs_diff(cr.entries(), ladder(Ladder::Creation, 6).entries()) < 1e-15);
        let np1 = NormalPoly::from_terms([((1, 1), re(1.0)), ((0, 0), re(1.0))]);
        let m = normal_poly_to_matrix(&np1, 6);
        let v = m.apply(&crate::fock::FockVector::fock(2, 6));
        assert!((v.amps()[2] - re(3.0)).norm() < 1e-14);
        assert!(v.norm_sqr() - 9.0 < 1e-12);
    }

    proptest! {
        #[test]
        fn ordering_is_associative(
            m in 0usize..=8,
            n in 0usize..=8,
            s in prop::sample::select(vec![-1.0, 0.0, 1.0, 3.0]),
            t in prop::sample::select(vec![-1.0, 0.0, 1.0, 3.0]),
            u in prop::sample::select(vec![-1.0, 0.0, 1.0, 3.0]),
        ) {
            let two_step = reorder_monomial(m, n, s, t).reorder(t, u);
            let direct = reorder_monomial(m, n, s, u);
            prop_assert!(two_step.max_diff(&direct) < 1e-10 * (1.0 + direct.terms().map(|(_, c)| c.norm()).fold(0.0, f64::max)));
        }
    }
}
