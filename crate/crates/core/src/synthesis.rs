//! Repeated displaced photon adding.
//!
//! A superposition of `|0>..|N>` is fixed, up to normalization, by the `N`
//! zeros `beta_k` of its Q-function. Each round trip through the amplifier
//! with a coherent idler `|alpha_k>` and one detected idler photon applies
//! one factor `(a^dag - beta_k^*)`.

use crate::conditional::photon_add_operator;
use crate::couplers::CouplerParams;
use crate::error::{Error, Result};
use crate::fock::FockVector;
use crate::linalg::{eigenvalues, ln_factorial};
use crate::{CMatrix, C64};

/// Tail mass above `D - 2` that [`synth_product`] tolerates.
pub const SYNTH_TAIL_TOL: f64 = 1e-9;

/// Optimal single-trip qubit preparation for a given `|q|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitDesign {
    /// `|R|` of the amplifier.
    pub r: f64,
    /// `|alpha_1|` of the idler pulse.
    pub alpha1: f64,
    /// Success probability at the optimum.
    pub probability: f64,
}

/// Success probability of the qubit `|0> + q|1>` for a given `|R|^2`, with
/// `|alpha_1| = |R| / |q|`.
pub fn qubit_probability(q_abs: f64, r2: f64) -> f64 {
    let a2 = r2 / (q_abs * q_abs);
    let t2 = 1.0 + r2;
    (r2 + a2) / (t2 * t2) * (-a2).exp()
}

/// Maximizes the qubit success probability over `|R|`.
pub fn qubit_design(q: C64) -> Result<QubitDesign> {
    let q_abs = q.norm();
    if !(q_abs > 0.0) || !q_abs.is_finite() {
        return Err(Error::InvalidArgument(format!("q = {q} must be finite and nonzero")));
    }
    let x = 1.0 / (q_abs * q_abs);
    // positive root of x R2^2 + (1 + x) R2 - 1 = 0, written without cancellation
    let r2 = 2.0 / (((x + 1.0) * (x + 1.0) + 4.0 * x).sqrt() + x + 1.0);
    Ok(QubitDesign {
        r: r2.sqrt(),
        alpha1: r2.sqrt() / q_abs,
        probability: qubit_probability(q_abs, r2),
    })
}

/// `beta_1..beta_N` such that the target is proportional to
/// `prod_k (a^dag - beta_k^*) |0>`, ordered by ascending modulus and then
/// phase.
pub fn q_function_zeros(target: &FockVector) -> Result<Vec<C64>> {
    let amps = target.amps();
    let norm = amps.norm();
    let Some(n) = amps.iter().rposition(|a| *a != C64::new(0.0, 0.0)) else {
        return Err(Error::DegenerateLeadingCoefficient { lead: 0.0, norm });
    };
    let lead = amps[n].norm();
    if lead < 1e-12 * norm {
        return Err(Error::DegenerateLeadingCoefficient { lead, norm });
    }
    // exact zero roots are split off first; the shift matrix they would
    // produce is a poor input for the Schur iteration
    let zeros = amps.iter().position(|a| *a != C64::new(0.0, 0.0)).unwrap_or(n);
    let coeffs: Vec<C64> = (zeros..=n)
        .map(|k| amps[k] * (-0.5 * ln_factorial(k)).exp())
        .collect();
    let deg = n - zeros;
    let mut roots = vec![C64::new(0.0, 0.0); zeros];
    if deg > 0 {
        let mut companion = CMatrix::zeros(deg, deg);
        for i in 1..deg {
            companion[(i, i - 1)] = C64::new(1.0, 0.0);
        }
        for i in 0..deg {
            companion[(i, deg - 1)] = -coeffs[i] / coeffs[deg];
        }
        let found = eigenvalues(&companion)?;
        check_roots(&coeffs, &found)?;
        roots.extend(found);
    }
    let mut betas: Vec<C64> = roots.into_iter().map(|x| x.conj()).collect();
    betas.sort_by(|a, b| root_key(a).partial_cmp(&root_key(b)).expect("finite roots"));
    Ok(betas)
}

fn check_roots(coeffs: &[C64], roots: &[C64]) -> Result<()> {
    for &x in roots {
        let (mut value, mut scale, mut pow) = (C64::new(0.0, 0.0), 0.0, 1.0);
        for (k, c) in coeffs.iter().enumerate() {
            value += c * x.powu(k as u32);
            scale += c.norm() * pow;
            pow *= x.norm();
        }
        if value.norm() > 1e-8 * scale {
            return Err(Error::Numerical("companion-matrix root fails the residual check"));
        }
    }
    Ok(())
}

fn root_key(z: &C64) -> (f64, f64) {
    ((z.norm() * 1e9).round(), z.arg())
}

/// Idler amplitudes realizing the zeros `betas`:
/// `alpha_k = PR / ((PT)^k (PT)^*N) sum_{l>=k} |T|^2l (beta_l^* - beta_{l+1}^*)`.
pub fn idler_schedule(betas: &[C64], p: &CouplerParams) -> Result<Vec<C64>> {
    require_adding(p)?;
    let n = betas.len();
    let pt = p.p() * p.t();
    let t2 = p.t().norm_sqr();
    let beta = |l: usize| if l <= n { betas[l - 1] } else { C64::new(0.0, 0.0) };
    let mut out = vec![C64::new(0.0, 0.0); n];
    let mut acc = C64::new(0.0, 0.0);
    for k in (1..=n).rev() {
        acc += (beta(k).conj() - beta(k + 1).conj()) * t2.powi(k as i32);
        out[k - 1] = p.p() * p.r() / (pt.powu(k as u32) * pt.conj().powu(n as u32)) * acc;
    }
    Ok(out)
}

/// Inverse of [`idler_schedule`]:
/// `beta_k = (PT)^N / R^* sum_{l>=k} (P alpha_l^* - T^* alpha_{l+1}^*) / (PT)^l`.
pub fn inverse_schedule(alphas: &[C64], p: &CouplerParams) -> Result<Vec<C64>> {
    require_adding(p)?;
    let n = alphas.len();
    let pt = p.p() * p.t();
    let alpha = |l: usize| if l <= n { alphas[l - 1] } else { C64::new(0.0, 0.0) };
    let mut out = vec![C64::new(0.0, 0.0); n];
    let mut acc = C64::new(0.0, 0.0);
    for k in (1..=n).rev() {
        acc += (p.p() * alpha(k).conj() - p.t().conj() * alpha(k + 1).conj()) / pt.powu(k as u32);
        out[k - 1] = pt.powu(n as u32) / p.r().conj() * acc;
    }
    Ok(out)
}

fn require_adding(p: &CouplerParams) -> Result<()> {
    if p.kind() != crate::couplers::CouplerKind::Amplifier {
        return Err(Error::InvalidArgument("photon adding requires an amplifier".into()));
    }
    if p.is_degenerate() {
        return Err(Error::DegenerateCoupler("photon adding requires R != 0"));
    }
    Ok(())
}

/// Applies the trips `Y^(N) ... Y^(1)` to the vacuum. Returns the
/// normalized state and the success probability.
pub fn synth_product(p: &CouplerParams, alphas: &[C64], cutoff: usize) -> Result<(FockVector, f64)> {
    require_adding(p)?;
    if 2 * alphas.len() > cutoff {
        return Err(Error::InvalidArgument(format!(
            "{} trips need a cutoff of at least {}",
            alphas.len(),
            2 * alphas.len()
        )));
    }
    let mut psi = FockVector::vacuum(cutoff);
    for &alpha in alphas {
        psi = photon_add_operator(p, alpha, cutoff)?.matrix().apply(&psi);
    }
    let prob = psi.norm_sqr();
    let tail = psi.tail_mass_from(cutoff.saturating_sub(2)) / prob;
    if tail > SYNTH_TAIL_TOL {
        return Err(Error::Truncation {
            what: "synthesized state",
            tail,
            tol: SYNTH_TAIL_TOL,
        });
    }
    if !(prob > 0.0) {
        return Err(Error::ZeroProbability { p: prob, threshold: 0.0 });
    }
    Ok((psi.normalize()?, prob))
}

/// Closed-form success probability
/// `N! / |<N|Psi>|^2 |R|^2N / |T|^(N(N+3)) exp(-sum |alpha_k|^2)` for a
/// normalized target of degree `N`.
pub fn synthesis_probability(p: &CouplerParams, top_amplitude: C64, alphas: &[C64]) -> f64 {
    let n = alphas.len() as f64;
    let ln = ln_factorial(alphas.len()) - top_amplitude.norm_sqr().ln() + n * p.r().norm_sqr().ln()
        - 0.5 * n * (n + 3.0) * p.t().norm_sqr().ln()
        - alphas.iter().map(|a| a.norm_sqr()).sum::<f64>();
    ln.exp()
}

/// Everything needed to produce a target state by repeated photon adding.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisPlan {
    target: FockVector,
    betas: Vec<C64>,
    alphas: Vec<C64>,
    params: CouplerParams,
    probability: f64,
}

impl SynthesisPlan {
    pub fn new(target: &FockVector, params: &CouplerParams) -> Result<Self> {
        let target = target.normalize()?;
        let betas = q_function_zeros(&target)?;
        let alphas = idler_schedule(&betas, params)?;
        let probability = synthesis_probability(params, target.amps()[betas.len()], &alphas);
        if !(probability > 0.0 && probability <= 1.0 + 1e-12) {
            return Err(Error::Numerical("synthesis probability outside (0, 1]"));
        }
        Ok(Self {
            target,
            betas,
            alphas,
            params: *params,
            probability,
        })
    }

    pub fn target(&self) -> &FockVector {
        &self.target
    }
    pub fn betas(&self) -> &[C64] {
        &self.betas
    }
    pub fn alphas(&self) -> &[C64] {
        &self.alphas
    }
    pub fn params(&self) -> &CouplerParams {
        &self.params
    }
    pub fn probability(&self) -> f64 {
        self.probability
    }
    pub fn degree(&self) -> usize {
        self.betas.len()
    }

    /// Runs the trips with [`synth_product`].
    pub fn execute(&self, cutoff: usize) -> Result<(FockVector, f64)> {
        synth_product(&self.params, &self.alphas, cutoff)
    }
}

/// `n! R2^n (1 + R2)^(-n(n+3)/2)`: probability of one detected photon on
/// each of `n` trips with no idler feeding.
pub fn fock_probability(n: usize, r2: f64) -> f64 {
    if n <= 20 {
        let mut p = 1.0;
        for k in 1..=n {
            p *= k as f64 * r2;
        }
        p * (1.0 + r2).powi(-((n * (n + 3) / 2) as i32))
    } else {
        let nf = n as f64;
        (ln_factorial(n) + nf * r2.ln() - 0.5 * nf * (nf + 3.0) * r2.ln_1p()).exp()
    }
}

/// `|R|^2` maximizing [`fock_probability`] for fixed `n`.
pub fn optimal_r2(n: usize) -> f64 {
    2.0 / (n as f64 + 1.0)
}

/// `a e^(-b n)` with `a = sqrt(2 pi) / e`, `b = 2 - ln 2`.
pub fn fock_asymptote(n: usize) -> f64 {
    let a = (2.0 * std::f64::consts::PI).sqrt() / std::f64::consts::E;
    let b = 2.0 - std::f64::consts::LN_2;
    a * (-b * n as f64).exp()
}
