//! Conditional (post-selected) signal operators `Y = <G| U |F>`.
//!
//! The idler enters in state `|F>` and is projected onto `|G>`. The
//! closed form builds `Y` as an s-ordered bilinear in `a^dag`, `a`
//! followed by a power of the number operator; the oracle contracts a
//! brute-force two-mode unitary instead.

use crate::couplers::{
    hamiltonian_oracle, two_mode_unitary, CouplerAngles, CouplerKind, CouplerParams, ParamSource,
};
use crate::error::{Error, Result};
use crate::fock::{displacement_matrix, FockVector, OperatorMatrix};
use crate::sorder::{normal_poly_to_matrix, s_ordered_bilinear};
use crate::{CMatrix, C64};

/// Conditioning outcomes below this probability are rejected.
pub const ZERO_PROBABILITY: f64 = 1e-14;
/// Largest tolerated leakage out of the oracle's two-mode box.
pub const ORACLE_TAIL_TOL: f64 = 1e-8;
/// Largest tolerated truncation tail of a coherent polynomial state.
pub const COHERENT_TAIL_TOL: f64 = 1e-10;

/// Idler state written as `sum_m F_m b^dag^m |0>`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialState {
    coeffs: Vec<C64>,
    tail: f64,
}

impl PolynomialState {
    pub fn from_coeffs(coeffs: Vec<C64>) -> Self {
        assert!(!coeffs.is_empty());
        Self { coeffs, tail: 0.0 }
    }

    /// Inverse of [`to_ket`](Self::to_ket): `F_m = psi_m / sqrt(m!)`.
    pub fn from_ket(ket: &FockVector) -> Self {
        let mut scale = 1.0;
        let coeffs = ket
            .amps()
            .iter()
            .enumerate()
            .map(|(m, &a)| {
                if m > 0 {
                    scale /= (m as f64).sqrt();
                }
                a * scale
            })
            .collect();
        Self { coeffs, tail: 0.0 }
    }

    pub fn fock(n: usize) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
        coeffs[n] = C64::new((-crate::linalg::ln_factorial(n) / 2.0).exp(), 0.0);
        Self { coeffs, tail: 0.0 }
    }

    pub fn vacuum() -> Self {
        Self::fock(0)
    }

    /// Coherent state truncated at degree `deg`; fails if the dropped norm
    /// exceeds [`COHERENT_TAIL_TOL`].
    pub fn coherent(alpha: C64, deg: usize) -> Result<Self> {
        let mut coeffs = Vec::with_capacity(deg + 1);
        let mut c = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
        for m in 0..=deg {
            if m > 0 {
                c *= alpha / m as f64;
            }
            coeffs.push(c);
        }
        let mut state = Self { coeffs, tail: 0.0 };
        state.tail = (1.0 - state.norm_sqr()).max(0.0);
        if state.tail > COHERENT_TAIL_TOL {
            return Err(Error::Truncation {
                what: "coherent polynomial state",
                tail: state.tail,
                tol: COHERENT_TAIL_TOL,
            });
        }
        Ok(state)
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Norm lost to truncation at construction.
    pub fn tail(&self) -> f64 {
        self.tail
    }

    /// Fock amplitudes `F_m sqrt(m!)` on `0..cutoff`.
    pub fn to_ket(&self, cutoff: usize) -> FockVector {
        let mut amps = vec![C64::new(0.0, 0.0); cutoff];
        let mut scale = 1.0;
        for (m, &c) in self.coeffs.iter().enumerate().take(cutoff) {
            if m > 0 {
                scale *= (m as f64).sqrt();
            }
            amps[m] = c * scale;
        }
        FockVector::new(amps)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.to_ket(self.coeffs.len()).norm_sqr()
    }
}

/// Non-unitary signal operator obtained by conditioning on the idler.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalOperator {
    matrix: OperatorMatrix,
    params: CouplerParams,
    f: PolynomialState,
    g: PolynomialState,
}

impl ConditionalOperator {
    pub fn matrix(&self) -> &OperatorMatrix {
        &self.matrix
    }
    pub fn params(&self) -> &CouplerParams {
        &self.params
    }
    pub fn input_state(&self) -> &PolynomialState {
        &self.f
    }
    pub fn projected_state(&self) -> &PolynomialState {
        &self.g
    }
    pub fn cutoff(&self) -> usize {
        self.matrix.cutoff()
    }
}

fn check_degree(state: &PolynomialState, cutoff: usize) -> Result<()> {
    if state.degree() > cutoff {
        return Err(Error::InvalidArgument(format!(
            "polynomial degree {} exceeds cutoff {cutoff}",
            state.degree()
        )));
    }
    Ok(())
}

/// `sum_n conj(G_n) F_n n! x^n`, i.e. `<G| x^n_b |F>`.
fn weighted_overlap(f: &PolynomialState, g: &PolynomialState, x: C64) -> C64 {
    let len = f.coeffs.len().min(g.coeffs.len());
    let (fk, gk) = (f.to_ket(len), g.to_ket(len));
    let mut acc = C64::new(0.0, 0.0);
    let mut pow = C64::new(1.0, 0.0);
    for n in 0..len {
        acc += gk.amps()[n].conj() * fk.amps()[n] * pow;
        pow *= x;
    }
    acc
}

/// Closed-form `Y = <G| U |F>` on `0..cutoff`.
pub fn conditional_operator(
    p: &CouplerParams,
    f: &PolynomialState,
    g: &PolynomialState,
    cutoff: usize,
) -> Result<ConditionalOperator> {
    check_degree(f, cutoff)?;
    check_degree(g, cutoff)?;
    let (t, r, ph) = (p.t(), p.r(), p.p());
    let one = C64::new(1.0, 0.0);
    let matrix = match p.kind() {
        CouplerKind::Amplifier => {
            let power = OperatorMatrix::power_of_number(one / (ph * t).conj(), cutoff);
            let pre = one / p.t_bar().conj();
            if p.is_degenerate() {
                let w = weighted_overlap(f, g, one / (ph * t.conj()));
                power.scale(pre * w)
            } else {
                let x = -r / t.conj();
                let y = ph.conj() * r.conj();
                let a = scaled_conj(g, x);
                let b = scaled(f, y);
                let poly = s_ordered_bilinear(&a, &b, p.ordering_parameter())?;
                let n = normal_poly_to_matrix(&poly, cutoff);
                (&n * &power).scale(pre)
            }
        }
        CouplerKind::Converter => {
            let power = OperatorMatrix::power_of_number(ph * t, cutoff);
            if p.is_degenerate() {
                let w = weighted_overlap(f, g, one / (ph.conj() * t));
                power.scale(w)
            } else {
                if t.norm() < 1e-12 {
                    return Err(Error::DegenerateCoupler(
                        "converter with T = 0 has no s-ordered closed form",
                    ));
                }
                let a = scaled(f, ph * r);
                let b = scaled_conj(g, -r.conj() / t);
                let poly = s_ordered_bilinear(&a, &b, p.ordering_parameter())?;
                &normal_poly_to_matrix(&poly, cutoff) * &power
            }
        }
    };
    Ok(ConditionalOperator {
        matrix,
        params: *p,
        f: f.clone(),
        g: g.clone(),
    })
}

/// `F_n x^n`.
fn scaled(f: &PolynomialState, x: C64) -> Vec<C64> {
    let mut pow = C64::new(1.0, 0.0);
    f.coeffs
        .iter()
        .map(|&c| {
            let v = c * pow;
            pow *= x;
            v
        })
        .collect()
}

/// `conj(G_n) x^n`.
fn scaled_conj(g: &PolynomialState, x: C64) -> Vec<C64> {
    let mut pow = C64::new(1.0, 0.0);
    g.coeffs
        .iter()
        .map(|&c| {
            let v = c.conj() * pow;
            pow *= x;
            v
        })
        .collect()
}

/// Where the oracle takes its two-mode unitary from.
#[derive(Debug, Clone, Copy)]
pub enum OracleSource<'a> {
    Angles(&'a CouplerAngles),
    Params(&'a CouplerParams),
}

impl<'a> From<&'a CouplerParams> for OracleSource<'a> {
    fn from(p: &'a CouplerParams) -> Self {
        OracleSource::Params(p)
    }
}

/// Brute-force `<G| U |F>` from a truncated two-mode unitary with an idler
/// cutoff of at least twice the signal cutoff.
///
/// The two-mode matrix elements are exact inside the box, so the only loss
/// is the part of `|F>` and `|G>` above the idler cutoff (plus their own
/// construction tails); it must stay below [`ORACLE_TAIL_TOL`].
pub fn oracle_conditional(
    source: OracleSource<'_>,
    f: &PolynomialState,
    g: &PolynomialState,
    cutoff: usize,
) -> Result<OperatorMatrix> {
    let idler = (2 * cutoff).max(f.degree() + 1).max(g.degree() + 1);
    let u = match source {
        OracleSource::Angles(a) => hamiltonian_oracle(a, cutoff, idler),
        OracleSource::Params(p) => match p.source() {
            ParamSource::Angles(a) => hamiltonian_oracle(&a, cutoff, idler),
            ParamSource::Direct => two_mode_unitary(p, cutoff, idler)?.0,
        },
    };
    let fk = f.to_ket(idler);
    let gk = g.to_ket(idler);
    let tail = f.tail() + g.tail() + (f.norm_sqr() - fk.norm_sqr()) + (g.norm_sqr() - gk.norm_sqr());
    if tail > ORACLE_TAIL_TOL {
        return Err(Error::Truncation {
            what: "oracle idler space",
            tail,
            tol: ORACLE_TAIL_TOL,
        });
    }
    let (fa, ga) = (fk.amps(), gk.amps());

    let m = u.entries();
    let mut y = CMatrix::zeros(cutoff, cutoff);
    for j in 0..cutoff {
        let mut out = vec![C64::new(0.0, 0.0); cutoff * idler];
        for (x, &fx) in fa.iter().enumerate() {
            if fx == C64::new(0.0, 0.0) {
                continue;
            }
            let col = m.column(j * idler + x);
            for (o, &v) in out.iter_mut().zip(col.iter()) {
                *o += v * fx;
            }
        }
        for i in 0..cutoff {
            y[(i, j)] = (0..idler).map(|k| ga[k].conj() * out[i * idler + k]).sum();
        }
    }
    Ok(OperatorMatrix::from_matrix(y))
}

/// Signal state before or after conditioning.
#[derive(Debug, Clone, PartialEq)]
pub enum SignalState {
    Pure(FockVector),
    Mixed(OperatorMatrix),
}

/// `rho' = Y rho Y^dag / p` with `p = Tr(Y rho Y^dag)`.
pub fn conditional_transform(y: &ConditionalOperator, input: &SignalState) -> Result<(SignalState, f64)> {
    let m = y.matrix().entries();
    match input {
        SignalState::Pure(psi) => {
            if psi.cutoff() != y.cutoff() {
                return Err(Error::DimensionMismatch {
                    expected: y.cutoff(),
                    got: psi.cutoff(),
                });
            }
            let out = m * psi.amps();
            let p = out.norm_squared();
            if !(p >= ZERO_PROBABILITY) {
                return Err(Error::ZeroProbability {
                    p,
                    threshold: ZERO_PROBABILITY,
                });
            }
            Ok((SignalState::Pure(FockVector::from_vector(out / C64::new(p.sqrt(), 0.0))), p))
        }
        SignalState::Mixed(rho) => {
            if rho.cutoff() != y.cutoff() {
                return Err(Error::DimensionMismatch {
                    expected: y.cutoff(),
                    got: rho.cutoff(),
                });
            }
            let out = m * rho.entries() * m.adjoint();
            let p = out.trace().re;
            if !(p >= ZERO_PROBABILITY) {
                return Err(Error::ZeroProbability {
                    p,
                    threshold: ZERO_PROBABILITY,
                });
            }
            Ok((SignalState::Mixed(OperatorMatrix::from_matrix(out / C64::new(p, 0.0))), p))
        }
    }
}

/// Displaced photon adding for one trip with coherent idler input
/// `alpha_k` and a single detected idler photon:
/// `-R P^* T̄^*^-1 D(P alpha_k^* / R^*) (PT)^*^-n a^dag D(-T^* alpha_k^* / R^*)`.
///
/// The displacements are multiplied out in closed form,
/// `-R P^* T̄^*^-1 e^(-|alpha_k|^2/2) (PT)^*^-n (a^dag - alpha_k / (R T^*)) exp(alpha_k R^* a / T^*)`,
/// whose matrix elements are exact inside the truncated space for any
/// `alpha_k`.
pub fn photon_add_operator(p: &CouplerParams, alpha_k: C64, cutoff: usize) -> Result<ConditionalOperator> {
    if p.kind() != CouplerKind::Amplifier {
        return Err(Error::InvalidArgument("photon adding requires an amplifier".into()));
    }
    if p.is_degenerate() {
        return Err(Error::DegenerateCoupler("photon adding requires R != 0"));
    }
    let (t, r, ph) = (p.t(), p.r(), p.p());
    let one = C64::new(1.0, 0.0);
    let lower = alpha_k * r.conj() / t.conj();
    let shift = alpha_k / (r * t.conj());
    let x = one / (ph * t).conj();
    let scale = -r * ph.conj() / p.t_bar().conj() * (-0.5 * alpha_k.norm_sqr()).exp();

    // exp(lower a): <m| . |n> = lower^(n-m) sqrt(n!/m!) / (n-m)!
    let mut e = CMatrix::zeros(cutoff, cutoff);
    for m in 0..cutoff {
        e[(m, m)] = one;
        for n in m + 1..cutoff {
            let k = (n - m) as f64;
            e[(m, n)] = e[(m, n - 1)] * lower * (n as f64).sqrt() / k;
        }
    }
    let mut y = CMatrix::zeros(cutoff, cutoff);
    let mut xi = scale;
    for i in 0..cutoff {
        for j in 0..cutoff {
            let raised = if i > 0 { e[(i - 1, j)] * (i as f64).sqrt() } else { C64::new(0.0, 0.0) };
            y[(i, j)] = xi * (raised - shift * e[(i, j)]);
        }
        xi *= x;
    }
    Ok(ConditionalOperator {
        matrix: OperatorMatrix::from_matrix(y),
        params: *p,
        f: PolynomialState::from_ket(&FockVector::coherent(alpha_k, cutoff + 1)),
        g: PolynomialState::fock(1),
    })
}

/// Conditional operator for idler input `D(alpha)|F>` and projection onto
/// `D(beta)|G>`, obtained by displacing the signal on both sides of `Y`.
pub fn displaced_conditional(
    p: &CouplerParams,
    y: &ConditionalOperator,
    alpha: C64,
    beta: C64,
) -> Result<ConditionalOperator> {
    if p.is_degenerate() {
        return Err(Error::DegenerateCoupler("displacement transfer requires R != 0"));
    }
    let (t, r, ph) = (p.t(), p.r(), p.p());
    let (left, right) = match p.kind() {
        CouplerKind::Amplifier => (
            (ph * alpha.conj() - t * beta.conj()) / r.conj(),
            (ph.conj() * beta.conj() - t.conj() * alpha.conj()) / r.conj(),
        ),
        CouplerKind::Converter => (
            (ph * alpha - t * beta) / r.conj(),
            (ph.conj() * beta - t.conj() * alpha) / r.conj(),
        ),
    };
    let d = y.cutoff();
    let matrix = &(&displacement_matrix(left, d) * y.matrix()) * &displacement_matrix(right, d);
    Ok(ConditionalOperator {
        matrix,
        params: *p,
        f: y.f.clone(),
        g: y.g.clone(),
    })
}
