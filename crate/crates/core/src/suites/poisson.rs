use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, Normal, Poisson};

use super::config::SuiteConfig;
use super::{job, run_jobs, stream_rng, Check};
use crate::canonical::RadialProfile;
use crate::error::{Error, Result};
use crate::poisson::{
    campbell_value, charfunc_analytic, charfunc_mc, radon_nikodym_check, BaseSpace, Convention,
    CurrentElement, RadialTerm, TestFunction,
};
use crate::regular::McConfig;

/// Points kept for the Kolmogorov-Smirnov marginals.
const KS_POINTS: usize = 200_000;
/// Nodes of the independent radial CDF table.
const CDF_TABLE: usize = 400;
const MC_BATCHES: usize = 32;

pub(super) fn run(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let jobs = vec![
        job("poisson.sampler", move || sampler(cfg)),
        job("poisson.charfunc", move || charfunc(cfg)),
        job("poisson.rn", move || radon_nikodym(cfg)),
    ];
    Ok(run_jobs(jobs))
}

pub(crate) fn mc(cfg: &SuiteConfig, stream: u64) -> McConfig {
    McConfig {
        samples: cfg.samples,
        batches: MC_BATCHES,
        seed: cfg.seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15),
        target_stderr: None,
    }
}

fn space(cfg: &SuiteConfig, w: [f64; 2]) -> Result<BaseSpace> {
    BaseSpace::new(w[0], w[1], RadialProfile::parse(&cfg.grid.u)?)
}

/// `P(K > x)` for the asymptotic Kolmogorov distribution.
fn kolmogorov_sf(x: f64) -> f64 {
    if x < 0.2 {
        return 1.0;
    }
    let s: f64 = (1..=100)
        .map(|k| {
            let k = k as f64;
            let sign = if k as u64 % 2 == 1 { 1.0 } else { -1.0 };
            sign * (-2.0 * k * k * x * x).exp()
        })
        .sum();
    (2.0 * s).clamp(0.0, 1.0)
}

/// `sqrt(m) sup |F_m - F|`.
fn ks_statistic(mut v: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &t)| {
            let c = cdf(t);
            (c - i as f64 / m).abs().max(((i + 1) as f64 / m - c).abs())
        })
        .fold(0.0, f64::max)
        * m.sqrt()
}

/// A zero-variance estimate must match to rounding.
fn zscore(diff: f64, stderr: f64, scale: f64) -> f64 {
    if stderr > 0.0 {
        diff / stderr
    } else if diff.abs() <= 1e-12 * scale.abs().max(1.0) {
        0.0
    } else {
        f64::INFINITY.copysign(diff)
    }
}

fn stat(e: impl std::fmt::Display) -> Error {
    Error::Integration(e.to_string())
}

fn log_quad(phi: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    quadrature::double_exponential::integrate(|s: f64| phi(s.exp()), a.ln(), b.ln(), 1e-14).integral
}

/// Counts against Poisson(mass) by a mean test and a chi-square test, and
/// the `x` and `r` marginals by Kolmogorov-Smirnov; every p-value is held
/// above the configured level.
fn sampler(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let level = cfg.tolerances.sampler_level;
    let space = space(cfg, cfg.window.rn)?;
    let lambda = space.mass();
    let mut rng = stream_rng(cfg.seed, 60);
    let n = cfg.samples;
    let mut counts = Vec::with_capacity(n);
    let (mut xs, mut rs) = (Vec::new(), Vec::new());
    for _ in 0..n {
        let omega = space.sample(&mut rng);
        counts.push(omega.len() as u64);
        for &(r, x) in &omega.points {
            if xs.len() < KS_POINTS {
                xs.push(x);
                rs.push(r);
            }
        }
    }

    let mean = counts.iter().sum::<u64>() as f64 / n as f64;
    let z = (mean - lambda) / (lambda / n as f64).sqrt();
    let p_mean = 2.0 * Normal::new(0.0, 1.0).map_err(stat)?.sf(z.abs());

    let pois = Poisson::new(lambda).map_err(stat)?;
    let nf = n as f64;
    let kmax = (0u64..)
        .find(|&k| nf * pois.pmf(k + 1) < 5.0 && k as f64 > lambda)
        .expect("Poisson tail");
    let mut observed = vec![0.0; kmax as usize + 2];
    for &c in &counts {
        observed[c.min(kmax + 1) as usize] += 1.0;
    }
    let mut expected: Vec<f64> = (0..=kmax).map(|k| nf * pois.pmf(k)).collect();
    expected.push(nf - expected.iter().sum::<f64>());
    let chi2: f64 = observed.iter().zip(&expected).map(|(o, e)| (o - e) * (o - e) / e).sum();
    let p_chi2 = ChiSquared::new((expected.len() - 1) as f64).map_err(stat)?.sf(chi2);

    let p_x = kolmogorov_sf(ks_statistic(xs, |x| x));
    let (a, b) = space.window();
    let u = space.u.clone();
    let total = log_quad(|r| (-u.eval(r)).exp(), a, b);
    let table: Vec<(f64, f64)> = (0..=CDF_TABLE)
        .map(|i| {
            let r = (a.ln() + (b.ln() - a.ln()) * i as f64 / CDF_TABLE as f64).exp();
            (r.ln(), log_quad(|t| (-u.eval(t)).exp(), a, r) / total)
        })
        .collect();
    let radial_cdf = |r: f64| {
        let s = r.ln();
        let i = table.partition_point(|p| p.0 <= s).clamp(1, table.len() - 1);
        let ((s0, c0), (s1, c1)) = (table[i - 1], table[i]);
        c0 + (c1 - c0) * (s - s0) / (s1 - s0)
    };
    let p_r = kolmogorov_sf(ks_statistic(rs, radial_cdf));

    Ok(vec![
        Check::at_least("poisson.sampler.count_mean", p_mean, level, format!("p-value; mean {mean:.5} vs mass {lambda:.5}")),
        Check::at_least("poisson.sampler.count_chi2", p_chi2, level, format!("p-value; chi2 {chi2:.3} on {} bins", expected.len())),
        Check::at_least("poisson.sampler.x_uniform", p_x, level, "Kolmogorov-Smirnov p-value"),
        Check::at_least("poisson.sampler.r_density", p_r, level, "Kolmogorov-Smirnov p-value vs quadrature CDF"),
    ])
}

pub(crate) fn charfunc_battery() -> Vec<TestFunction> {
    vec![
        TestFunction::zero(),
        TestFunction::radial("u", vec![RadialTerm::Profile(RadialProfile::Quadratic)]),
        TestFunction::radial("0.8 on [0.1, 0.5)", vec![RadialTerm::Indicator { c: 0.8, lo: 0.1, hi: 0.5 }]),
        TestFunction::radial("3 r^2", vec![RadialTerm::Profile(RadialProfile::Power { coef: 3.0, exponent: 2.0 })]),
        TestFunction::stepped(
            "r on x < 1/2, 0.5 after",
            vec![0.0, 0.5, 1.0],
            vec![
                vec![RadialTerm::Profile(RadialProfile::Linear)],
                vec![RadialTerm::Profile(RadialProfile::Constant(0.5))],
            ],
        )
        .expect("sorted cuts"),
    ]
}

/// MC estimates under both conventions against the closed form; exactly
/// one convention must agree on the whole battery.
fn charfunc(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let space = space(cfg, cfg.window.charfunc)?;
    let sig = cfg.tolerances.sigmas;
    let conventions = [Convention::Charfunc, Convention::AsStated];
    let mut out = Vec::new();
    let mut passing = Vec::new();
    for (ci, conv) in conventions.into_iter().enumerate() {
        let mut all = true;
        for (k, f) in charfunc_battery().iter().enumerate() {
            let analytic = charfunc_analytic(&space, f)?;
            let est = charfunc_mc(&space, f, conv, &mc(cfg, 70 + (10 * ci + k) as u64))?;
            let z = zscore(est.estimate - analytic, est.stderr, analytic);
            all &= z.abs() <= sig;
            out.push(Check::info(
                format!("poisson.charfunc.{}.f{k}.z", conv.label()),
                z,
                format!("{}: mc {:.6e} +- {:.2e}, closed form {analytic:.6e}", f.label, est.estimate, est.stderr),
            ));
            if k == 0 {
                out.push(Check::info(
                    format!("poisson.charfunc.{}.campbell_f0", conv.label()),
                    campbell_value(&space, f, conv),
                    "own Campbell value at f = 0",
                ));
            }
        }
        if all {
            passing.push(conv.label());
        }
    }
    let named = if passing.is_empty() { "none".to_string() } else { passing.join(", ") };
    out.push(Check::within(
        "poisson.charfunc.passing_conventions",
        passing.len() as f64,
        Some(1.0),
        Some(1.0),
        format!("passing: {named}"),
    ));
    out.push(Check::flag(
        "poisson.charfunc.configured_convention_passes",
        passing.contains(&cfg.convention.label()),
        format!("configured: {}", cfg.convention.label()),
    ));
    Ok(out)
}

pub(crate) fn rn_battery() -> Vec<TestFunction> {
    let q = |a: f64| RadialTerm::Profile(RadialProfile::Power { coef: a, exponent: 2.0 });
    vec![
        TestFunction::radial("8 r^2", vec![q(8.0)]),
        TestFunction::radial("12 r^2 + bump", vec![q(12.0), RadialTerm::Indicator { c: 0.5, lo: 0.05, hi: 0.3 }]),
        TestFunction::stepped("8 r^2 | 16 r^2", vec![0.0, 0.5, 1.0], vec![vec![q(8.0)], vec![q(16.0)]])
            .expect("sorted cuts"),
    ]
}

/// Constant and two-cell step scalings: the ratio of expectations against
/// `e^{∫ log r dm}`.
fn radon_nikodym(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let space = space(cfg, cfg.window.rn)?;
    let scales = [
        ("const_1p5", CurrentElement::constant(1.5)),
        ("const_0p6", CurrentElement::constant(0.6)),
        ("step_1p8_1", CurrentElement::scales(vec![0.0, 0.5, 1.0], vec![1.8, 1.0])?),
    ];
    let mut out = Vec::new();
    for (i, (name, s)) in scales.iter().enumerate() {
        let rep = radon_nikodym_check(&space, s, &rn_battery(), &mc(cfg, 90 + i as u64))?;
        out.push(Check::at_most(
            format!("poisson.rn.{name}.leakage"),
            rep.leakage,
            cfg.tolerances.leakage,
            format!("window change of the predicted factor {:.6}", rep.predicted),
        ));
        for (k, e) in rep.entries.iter().enumerate() {
            out.push(Check::at_most(
                format!("poisson.rn.{name}.f{k}.z"),
                e.z.abs(),
                cfg.tolerances.sigmas,
                format!("{}: ratio {:.6} +- {:.2e}, predicted {:.6}", e.label, e.ratio, e.stderr, rep.predicted),
            ));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kolmogorov_quantiles() {
        assert!((kolmogorov_sf(1.628) - 0.01).abs() < 2e-4);
        assert!((kolmogorov_sf(1.358) - 0.05).abs() < 5e-4);
    }
}
