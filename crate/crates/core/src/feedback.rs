//! Fock-state preparation in a lossy feedback loop.
//!
//! The signal circulates through the amplifier, whose idler is counted by
//! an inefficient detector, and returns through lossy mirrors. Starting
//! from the vacuum, every channel keeps the state diagonal in the Fock
//! basis, so the recursion runs on photon-number distributions.

use crate::error::{Error, Result};
use crate::fock::{mandel_q, DensityDiagonal};
use crate::linalg::{binomial, ln_factorial};

/// Detection outcomes less likely than this are rejected.
pub const ZERO_PROBABILITY: f64 = 1e-15;
/// Largest amplified mass tolerated at or above `D - 1`.
pub const AMPLIFY_TAIL_TOL: f64 = 1e-9;
/// Upper bound on the number of trips a schedule may span.
pub const MAX_TRIPS: usize = 100_000_000;

/// How detection trips are chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScheduleRule {
    /// Trip `t_m` is the first at which `eta_D eta_F <n>^(N)` exceeds `m`,
    /// with `<n>^(N)` the measurement-free mean.
    ThresholdUnconditionalMean,
    /// One detected photon at each listed trip; a trip listed twice
    /// counts two photons.
    ExplicitTripList(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackConfig {
    pub r2: f64,
    pub eta_d: f64,
    pub eta_f: f64,
    pub target_n: usize,
    pub cutoff: usize,
    pub schedule_rule: ScheduleRule,
}

impl FeedbackConfig {
    pub fn new(r2: f64, eta_d: f64, eta_f: f64, target_n: usize, cutoff: usize) -> Result<Self> {
        let cfg = Self {
            r2,
            eta_d,
            eta_f,
            target_n,
            cutoff,
            schedule_rule: ScheduleRule::ThresholdUnconditionalMean,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// The Fig. 4 setting: `|R|^2 = 3e-3`, four photons, `D = 32`.
    pub fn fig4(eta_f: f64, eta_d: f64) -> Self {
        Self::new(3e-3, eta_d, eta_f, 4, 32).expect("valid preset")
    }

    pub fn with_schedule(mut self, rule: ScheduleRule) -> Self {
        self.schedule_rule = rule;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r2 > 0.0 && self.r2.is_finite()) {
            return Err(Error::InvalidArgument(format!("R2 = {} must be positive", self.r2)));
        }
        for (name, v) in [("eta_D", self.eta_d), ("eta_F", self.eta_f)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidArgument(format!("{name} = {v} outside [0, 1]")));
            }
        }
        if self.target_n == 0 {
            return Err(Error::InvalidArgument("target photon number must be positive".into()));
        }
        if self.cutoff < 2 {
            return Err(Error::InvalidArgument("cutoff must be at least 2".into()));
        }
        Ok(())
    }

    /// `|T|^2 = 1 + |R|^2`.
    pub fn t2(&self) -> f64 {
        1.0 + self.r2
    }
}

/// Observables after one round trip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub trip: usize,
    pub detected: usize,
    pub mean: f64,
    pub trace: f64,
    pub probability: f64,
}

/// `C(n,k) z^k (1-z)^(n-k)`, zero for `k > n`.
pub fn binom_kernel(k: usize, n: usize, z: f64) -> f64 {
    if k > n {
        return 0.0;
    }
    if z == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if z == 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    if n <= 60 {
        binomial(n, k) * z.powi(k as i32) * (1.0 - z).powi((n - k) as i32)
    } else {
        let ln = ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
            + k as f64 * z.ln()
            + (n - k) as f64 * (-z).ln_1p();
        ln.exp()
    }
}

/// Amplifies with gain `|T|^2 = 1 + R2` and conditions on `k` idler
/// counts at efficiency `eta_d`. Returns the renormalized state and the
/// probability of the outcome.
pub fn amplify_and_detect(rho: &DensityDiagonal, r2: f64, eta_d: f64, k: usize) -> Result<(DensityDiagonal, f64)> {
    let d = rho.cutoff();
    let t2 = 1.0 + r2;
    let z = 1.0 / t2;
    let probs = rho.probs();

    // survival of the unconditioned output below D - 1
    let mut kept = 0.0;
    let mut out = vec![0.0; d];
    for (m, slot) in out.iter_mut().enumerate() {
        let mut all = 0.0;
        let mut cond = 0.0;
        for (l, &pl) in probs.iter().enumerate().take(m + 1) {
            if pl == 0.0 {
                continue;
            }
            let w = binom_kernel(l, m, z) * pl;
            all += w;
            cond += binom_kernel(k, m - l, eta_d) * w;
        }
        if m + 1 < d {
            kept += all / t2;
        }
        *slot = cond / t2;
    }
    let tail = rho.trace() - kept;
    if tail > AMPLIFY_TAIL_TOL {
        return Err(Error::Truncation {
            what: "amplified photon-number distribution",
            tail,
            tol: AMPLIFY_TAIL_TOL,
        });
    }
    let p: f64 = out.iter().sum();
    if !(p >= ZERO_PROBABILITY) {
        return Err(Error::ZeroProbability {
            p,
            threshold: ZERO_PROBABILITY,
        });
    }
    out.iter_mut().for_each(|x| *x /= p);
    Ok((DensityDiagonal::from_probs_unchecked(out), p))
}

/// Binomial photon loss with survival probability `eta_f`.
pub fn loss_channel(rho: &DensityDiagonal, eta_f: f64) -> DensityDiagonal {
    let probs = rho.probs();
    let out = (0..probs.len())
        .map(|m| (m..probs.len()).map(|l| binom_kernel(m, l, eta_f) * probs[l]).sum())
        .collect();
    DensityDiagonal::from_probs_unchecked(out)
}

/// Amplify, detect `k` photons, then pass the mirrors.
pub fn round_trip(rho: &DensityDiagonal, cfg: &FeedbackConfig, k: usize) -> Result<(DensityDiagonal, f64)> {
    let (amplified, p) = amplify_and_detect(rho, cfg.r2, cfg.eta_d, k)?;
    Ok((loss_channel(&amplified, cfg.eta_f), p))
}

/// Mean photon number after `n` trips without any detection.
pub fn unconditional_mean(n: usize, r2: f64, eta_f: f64) -> f64 {
    let t2 = 1.0 + r2;
    let x = eta_f * t2;
    if x == 1.0 {
        return r2 * n as f64 / t2;
    }
    eta_f * r2 * (n as f64 * (x - 1.0).ln_1p()).exp_m1() / (x - 1.0)
}

/// Limit of [`unconditional_mean`] for `eta_f |T|^2 < 1`; `None` when the
/// mean grows without bound.
pub fn steady_state_mean(r2: f64, eta_f: f64) -> Option<f64> {
    let x = eta_f * (1.0 + r2);
    (x < 1.0).then(|| eta_f * r2 / (1.0 - x))
}

/// Trips `t_1 <= ... <= t_n` at which the detector is expected to fire.
pub fn detection_schedule(cfg: &FeedbackConfig) -> Result<Vec<usize>> {
    cfg.validate()?;
    match &cfg.schedule_rule {
        ScheduleRule::ExplicitTripList(trips) => {
            let mut t = trips.clone();
            t.sort_unstable();
            if t.first() == Some(&0) || t.is_empty() {
                return Err(Error::InvalidArgument("trip indices start at 1".into()));
            }
            Ok(t)
        }
        ScheduleRule::ThresholdUnconditionalMean => {
            let scale = cfg.eta_d * cfg.eta_f;
            let target = cfg.target_n as f64;
            let reachable = scale > 0.0
                && steady_state_mean(cfg.r2, cfg.eta_f).is_none_or(|s| scale * s > target);
            if !reachable {
                return Err(Error::UnreachableThreshold {
                    threshold: target,
                    steady: scale * steady_state_mean(cfg.r2, cfg.eta_f).unwrap_or(0.0),
                });
            }
            let mut out = Vec::with_capacity(cfg.target_n);
            let mut n = 0;
            for m in 1..=cfg.target_n {
                while scale * unconditional_mean(n, cfg.r2, cfg.eta_f) <= m as f64 {
                    n += 1;
                    if n > MAX_TRIPS {
                        return Err(Error::UnreachableThreshold {
                            threshold: m as f64,
                            steady: scale * unconditional_mean(n, cfg.r2, cfg.eta_f),
                        });
                    }
                }
                out.push(n);
            }
            Ok(out)
        }
    }
}

/// Outcome of a simulated preparation run.
#[derive(Debug, Clone, PartialEq)]
pub struct FockRun {
    /// Distribution after the last trip, mirror loss included.
    pub final_state: DensityDiagonal,
    /// Distribution after the last detection, before the final mirror loss.
    pub before_final_loss: DensityDiagonal,
    pub trips: usize,
    pub trace: Vec<TraceRecord>,
    /// Mandel Q of `final_state`.
    pub q: f64,
    /// Mandel Q of `before_final_loss`.
    pub q_without_final_loss: f64,
}

/// Runs the loop from the vacuum, detecting the scheduled photons and no
/// others, and stops after the trip of the last detection.
pub fn simulate_fock_run(cfg: &FeedbackConfig) -> Result<FockRun> {
    let schedule = detection_schedule(cfg)?;
    let trips = *schedule.last().expect("nonempty schedule");
    let mut rho = DensityDiagonal::vacuum(cfg.cutoff);
    let mut trace = Vec::with_capacity(trips);
    let mut before_final_loss = rho.clone();
    let mut next = 0;
    for j in 1..=trips {
        let mut k = 0;
        while next < schedule.len() && schedule[next] == j {
            k += 1;
            next += 1;
        }
        let (amplified, p) = amplify_and_detect(&rho, cfg.r2, cfg.eta_d, k)?;
        rho = loss_channel(&amplified, cfg.eta_f);
        if j == trips {
            before_final_loss = amplified;
        }
        trace.push(TraceRecord {
            trip: j,
            detected: k,
            mean: rho.mean(),
            trace: rho.trace(),
            probability: p,
        });
    }
    Ok(FockRun {
        q: mandel_q(&rho)?,
        q_without_final_loss: mandel_q(&before_final_loss)?,
        final_state: rho,
        before_final_loss,
        trips,
        trace,
    })
}

/// Mirror efficiency at which `|n>` survives one trip with probability
/// one half per `1/|R|^2` trips: `2^(-R2/n)`.
pub fn required_feedback_efficiency(n: usize, r2: f64) -> f64 {
    (-(r2 / n as f64) * std::f64::consts::LN_2).exp()
}
