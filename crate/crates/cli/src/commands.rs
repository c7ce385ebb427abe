//! Subcommand bodies. Each returns the text of its main output and, for
//! table outputs that have one, a key-value summary.

use condeng::conditional::{conditional_operator, oracle_conditional, OracleSource};
use condeng::couplers::heisenberg_matrix;
use condeng::feedback::{detection_schedule, simulate_fock_run};
use condeng::fock::fidelity;
use condeng::multiport::{coupling_from_angles, upq_matrix, verify_pseudo_unitarity};
use condeng::synthesis::qubit_design;
use condeng::{
    CMatrix, CouplerKind, FeedbackConfig, HermitianCoupling, ModePartition, ScheduleRule, SynthesisPlan, C64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{required, FockRunSection, Format, MultiportSection, Preset, SweepSection};
use crate::error::{CliError, Result};
use crate::output::{num, Csv, Kv};
use crate::specs::{parse_coupler, parse_kind, parse_state};

pub struct Rendered {
    pub text: String,
    pub summary: Option<String>,
}

impl Rendered {
    fn plain(text: String) -> Self {
        Self { text, summary: None }
    }
}

/// Smallest acceptable synthesis fidelity.
pub const MIN_FIDELITY: f64 = 1.0 - 1e-6;

fn kind_of(s: Option<&str>) -> Result<Option<CouplerKind>> {
    s.map(parse_kind).transpose()
}

pub fn qubit_sweep(sec: &SweepSection, format: Format) -> Result<Rendered> {
    let qmin = required(None, sec.qmin, "qmin")?;
    let qmax = required(None, sec.qmax, "qmax")?;
    let steps = required(None, sec.steps, "steps")?;
    if !(qmin > 0.0 && qmin.is_finite() && qmax.is_finite()) {
        return Err(CliError::config(format!("qmin = {qmin}, qmax = {qmax}: need 0 < qmin < qmax")));
    }
    if steps == 0 {
        return Err(CliError::config("steps must be at least 1"));
    }
    if steps > 1 && qmin >= qmax {
        return Err(CliError::config(format!("qmin = {qmin}, qmax = {qmax}: need 0 < qmin < qmax")));
    }
    let (lo, hi) = (qmin.log10(), qmax.log10());
    let grid: Vec<f64> = (0..steps)
        .map(|i| {
            if steps == 1 {
                qmin
            } else {
                10f64.powf(lo + (hi - lo) * i as f64 / (steps - 1) as f64)
            }
        })
        .collect();
    let designs = grid
        .iter()
        .map(|&q| qubit_design(C64::new(q, 0.0)).map_err(CliError::from))
        .collect::<Result<Vec<_>>>()?;
    let text = match format {
        Format::Csv => {
            let mut t = Csv::new(&["q", "r", "r2", "alpha1", "p_max"]);
            for (q, d) in grid.iter().zip(&designs) {
                t.row(&[num(*q), num(d.r), num(d.r * d.r), num(d.alpha1), num(d.probability)]);
            }
            t.finish()
        }
        Format::Kv => {
            let mut kv = Kv::default();
            kv.int("steps", steps);
            kv.reals("q", &grid);
            kv.reals("r", &designs.iter().map(|d| d.r).collect::<Vec<_>>());
            kv.reals("r2", &designs.iter().map(|d| d.r * d.r).collect::<Vec<_>>());
            kv.reals("alpha1", &designs.iter().map(|d| d.alpha1).collect::<Vec<_>>());
            kv.reals("p_max", &designs.iter().map(|d| d.probability).collect::<Vec<_>>());
            kv.finish()
        }
    };
    Ok(Rendered::plain(text))
}

pub fn synthesize(target: &str, coupler: &str, kind: Option<&str>, cutoff: usize, format: Format) -> Result<Rendered> {
    let target = parse_state(target)?.ket(cutoff)?;
    let spec = parse_coupler(coupler, kind_of(kind)?)?;
    let plan = SynthesisPlan::new(&target, &spec.params)?;
    let (psi, prob) = plan.execute(cutoff)?;
    let fid = fidelity(&psi, plan.target());
    if fid.is_nan() || fid < MIN_FIDELITY {
        return Err(CliError::Guard(format!(
            "synthesized state has fidelity {fid:.9} below {MIN_FIDELITY}"
        )));
    }
    let text = match format {
        Format::Csv => {
            let mut t = Csv::new(&["trip", "beta_re", "beta_im", "alpha_re", "alpha_im"]);
            for (k, (b, a)) in plan.betas().iter().zip(plan.alphas()).enumerate() {
                t.row(&[(k + 1).to_string(), num(b.re), num(b.im), num(a.re), num(a.im)]);
            }
            t.finish()
        }
        Format::Kv => {
            let mut kv = Kv::default();
            kv.int("degree", plan.degree());
            kv.int("cutoff", cutoff);
            kv.real("r2", spec.params.r().norm_sqr());
            kv.complexes("betas", plan.betas());
            kv.complexes("alphas", plan.alphas());
            kv.real("probability", plan.probability());
            kv.real("probability_simulated", prob);
            kv.real("fidelity", fid);
            kv.finish()
        }
    };
    Ok(Rendered::plain(text))
}

fn feedback_config(sec: &FockRunSection, preset: Option<Preset>, cutoff: Option<usize>) -> Result<FeedbackConfig> {
    let preset = preset.or(sec.preset);
    let cfg = match preset {
        Some(p) => {
            if sec.r2.is_some() || sec.eta_d.is_some() || sec.eta_f.is_some() || sec.target_n.is_some() {
                return Err(CliError::config("a preset fixes r2, eta_d, eta_f and target_n"));
            }
            let (eta_f, eta_d) = p.efficiencies();
            let base = FeedbackConfig::fig4(eta_f, eta_d);
            FeedbackConfig::new(base.r2, base.eta_d, base.eta_f, base.target_n, cutoff.unwrap_or(base.cutoff))?
        }
        None => FeedbackConfig::new(
            required(None, sec.r2, "r2")?,
            required(None, sec.eta_d, "eta_d")?,
            required(None, sec.eta_f, "eta_f")?,
            required(None, sec.target_n, "target_n")?,
            cutoff.unwrap_or(32),
        )?,
    };
    Ok(match &sec.trips {
        Some(trips) => cfg.with_schedule(ScheduleRule::ExplicitTripList(trips.clone())),
        None => cfg,
    })
}

pub fn fock_run(sec: &FockRunSection, preset: Option<Preset>, cutoff: Option<usize>, format: Format) -> Result<Rendered> {
    let cfg = feedback_config(sec, preset, cutoff)?;
    let rows = sec.rows.unwrap_or(13).min(cfg.cutoff);
    let schedule = detection_schedule(&cfg)?;
    let run = simulate_fock_run(&cfg)?;

    let mut kv = Kv::default();
    kv.real("r2", cfg.r2);
    kv.real("eta_d", cfg.eta_d);
    kv.real("eta_f", cfg.eta_f);
    kv.int("target_n", cfg.target_n);
    kv.int("cutoff", cfg.cutoff);
    kv.ints("schedule", &schedule);
    kv.int("trips", run.trips);
    kv.real("mean", run.final_state.mean());
    kv.real("q", run.q);
    kv.real("q_without_final_loss", run.q_without_final_loss);
    kv.reals("final_probs", &run.final_state.probs()[..rows]);
    let summary = kv.finish();

    Ok(match format {
        Format::Kv => Rendered::plain(summary),
        Format::Csv => {
            let mut t = Csv::new(&["trip", "detected", "mean", "trace", "probability"]);
            for r in &run.trace {
                t.row(&[r.trip.to_string(), r.detected.to_string(), num(r.mean), num(r.trace), num(r.probability)]);
            }
            Rendered {
                text: t.finish(),
                summary: Some(summary),
            }
        }
    })
}

pub fn yop(coupler: &str, kind: Option<&str>, f: &str, g: &str, cutoff: usize, format: Format) -> Result<Rendered> {
    let spec = parse_coupler(coupler, kind_of(kind)?)?;
    let f = parse_state(f)?.polynomial(cutoff)?;
    let g = parse_state(g)?.polynomial(cutoff)?;
    let y = conditional_operator(&spec.params, &f, &g, cutoff)?;
    let source = match &spec.angles {
        Some(a) => OracleSource::Angles(a),
        None => OracleSource::Params(&spec.params),
    };
    let oracle = oracle_conditional(source, &f, &g, cutoff)?;
    let interior = cutoff / 2 + 1;
    let residual = y.matrix().max_diff_leading(&oracle, interior.min(cutoff));
    let m = y.matrix().entries();
    let text = match format {
        Format::Csv => {
            let mut t = Csv::new(&["row", "col", "re", "im"]);
            for i in 0..cutoff {
                for j in 0..cutoff {
                    t.row(&[i.to_string(), j.to_string(), num(m[(i, j)].re), num(m[(i, j)].im)]);
                }
            }
            t.finish()
        }
        Format::Kv => {
            let mut kv = Kv::default();
            kv.int("cutoff", cutoff);
            kv.text(
                "kind",
                match spec.params.kind() {
                    CouplerKind::Amplifier => "amplifier",
                    CouplerKind::Converter => "converter",
                },
            );
            kv.int("interior", interior.min(cutoff));
            kv.real("ordering", spec.params.ordering_parameter());
            kv.real("residual", residual);
            kv.matrix("y", m);
            kv.finish()
        }
    };
    Ok(Rendered {
        text,
        summary: (format == Format::Csv).then(|| {
            let mut kv = Kv::default();
            kv.real("residual", residual);
            kv.finish()
        }),
    })
}

fn square(rows: &[Vec<f64>], n: usize, name: &str) -> Result<()> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::config(format!("{name} must be a {n}x{n} array")));
    }
    Ok(())
}

fn report_matrix(m: &CMatrix, residual: f64, part: &ModePartition, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut t = Csv::new(&["row", "col", "re", "im"]);
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    t.row(&[i.to_string(), j.to_string(), num(m[(i, j)].re), num(m[(i, j)].im)]);
                }
            }
            t.finish()
        }
        Format::Kv => {
            let mut kv = Kv::default();
            kv.int("p", part.p());
            kv.int("q", part.q());
            kv.real("residual", residual);
            kv.matrix("m", m);
            kv.finish()
        }
    }
}

pub fn multiport_check(
    sec: &MultiportSection,
    coupler: Option<&str>,
    kind: Option<&str>,
    draws: Option<usize>,
    seed: Option<u64>,
    format: Format,
) -> Result<Rendered> {
    let coupler = coupler.or(sec.coupler.as_deref());
    let kind = kind.or(sec.kind.as_deref());
    let draws = draws.or(sec.draws);

    if let Some(c) = coupler {
        let spec = parse_coupler(c, kind_of(kind)?)?;
        let a = spec
            .angles
            .ok_or_else(|| CliError::config("multiport-check needs an 'angles:' coupler"))?;
        let (h, part) = coupling_from_angles(&a);
        let m = upq_matrix(&h, &part)?;
        let hm = heisenberg_matrix(&spec.params);
        let reduction = (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| (m[(i, j)] - hm[(i, j)]).norm())
            .fold(0.0, f64::max);
        let residual = verify_pseudo_unitarity(&m, &part);
        let text = match format {
            Format::Kv => {
                let mut kv = Kv::default();
                kv.int("p", part.p());
                kv.int("q", part.q());
                kv.real("residual", residual);
                kv.real("reduction_residual", reduction);
                kv.matrix("m", &m);
                kv.finish()
            }
            Format::Csv => report_matrix(&m, residual, &part, format),
        };
        return Ok(Rendered::plain(text));
    }

    if let Some(re) = &sec.h_re {
        let n = re.len();
        square(re, n, "h_re")?;
        if let Some(im) = &sec.h_im {
            square(im, n, "h_im")?;
        }
        let h = CMatrix::from_fn(n, n, |i, j| {
            C64::new(re[i][j], sec.h_im.as_ref().map_or(0.0, |im| im[i][j]))
        });
        let p = required(None, sec.p, "p")?;
        let q = required(None, sec.q, "q")?;
        let part = ModePartition::new(p, q)?;
        let m = upq_matrix(&HermitianCoupling::new(h)?, &part)?;
        let residual = verify_pseudo_unitarity(&m, &part);
        return Ok(Rendered::plain(report_matrix(&m, residual, &part, format)));
    }

    let draws = draws.unwrap_or(1000);
    let seed = seed.or(sec.seed).unwrap_or(0);
    let max_modes = sec.max_modes.unwrap_or(6);
    if max_modes == 0 {
        return Err(CliError::config("max_modes must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Csv::new(&["draw", "modes", "p", "q", "residual"]);
    let mut worst = 0.0f64;
    for k in 0..draws {
        let n = rng.gen_range(1..=max_modes);
        let p = rng.gen_range(0..=n);
        let a = CMatrix::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let h = HermitianCoupling::new((&a + a.adjoint()) * C64::new(0.5, 0.0))?;
        let part = ModePartition::new(p, n - p)?;
        let residual = verify_pseudo_unitarity(&upq_matrix(&h, &part)?, &part);
        worst = worst.max(residual);
        t.row(&[k.to_string(), n.to_string(), p.to_string(), (n - p).to_string(), num(residual)]);
    }
    let mut kv = Kv::default();
    kv.int("draws", draws);
    kv.int("seed", seed as usize);
    kv.int("max_modes", max_modes);
    kv.real("max_residual", worst);
    let summary = kv.finish();
    Ok(match format {
        Format::Kv => Rendered::plain(summary),
        Format::Csv => Rendered {
            text: t.finish(),
            summary: Some(summary),
        },
    })
}
