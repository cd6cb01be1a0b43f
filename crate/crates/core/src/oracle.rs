//! Monte Carlo estimates of CoD and its Type-I contribution.
//!
//! Pairs `(U, V)` are drawn by conditional inversion: `U` uniform, then `V`
//! from `dC/du(. | U)`. Only pairs with `U > u_g` are kept and the empirical
//! distortion risk measure of `G^-1(V)` over the accepted sample is reported.
//! This never touches the conditional-tail quantile used by [`crate::riskcore`].
//!
//! Each batch draws from its own ChaCha stream `(seed, batch)`, so results are
//! reproducible bit for bit.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::copula::{Copula, CopulaFamily};
use crate::distortion::Distortion;
use crate::error::{Error, Result};
use crate::marginal::Marginal;
use crate::riskcore::{threshold_quantile, BivariateModel};
use crate::solve::brent;

const DIFF_STEP: f64 = 1e-6;
const INVERSION_TOL: f64 = 1e-9;
const MIN_ACCEPTED: usize = 100;
const MIN_SAMPLE: usize = 10_000;
const MAX_THRESHOLD: f64 = 0.999;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_accepted: usize,
    pub n_total: usize,
    pub seed: u64,
    pub batches: usize,
}

/// Uniform on the open interval (0, 1).
fn open_uniform(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `dC/du(u, v)` by central differences (one-sided at the edges).
fn gumbel_conditional(c: &Copula, u: f64, v: f64) -> f64 {
    let h = DIFF_STEP;
    if u + h > 1.0 {
        (c.cdf(u, v) - c.cdf(u - h, v)) / h
    } else if u - h < 0.0 {
        (c.cdf(u + h, v) - c.cdf(u, v)) / h
    } else {
        (c.cdf(u + h, v) - c.cdf(u - h, v)) / (2.0 * h)
    }
}

/// Solves `dC/du(u, v) = w` for `v`.
fn conditional_inverse(c: &Copula, u: f64, w: f64) -> f64 {
    match c.family() {
        CopulaFamily::Independence => w,
        CopulaFamily::Comonotonic => u,
        CopulaFamily::Fgm { alpha } => {
            // v + a v (1 - v) = w
            let a = alpha * (1.0 - 2.0 * u);
            let b = 1.0 + a;
            2.0 * w / (b + (b * b - 4.0 * a * w).max(0.0).sqrt())
        }
        CopulaFamily::Gumbel { theta } if theta == 1.0 => w,
        CopulaFamily::Gumbel { .. } => {
            let f = |v: f64| gumbel_conditional(c, u, v) - w;
            match brent(f, 0.0, 1.0, INVERSION_TOL) {
                Ok(v) => v,
                Err(_) => {
                    if f(1.0) < 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                }
            }
        }
    }
}

pub fn sample_pairs(c: &Copula, n: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = stream(seed, 0);
    (0..n)
        .map(|_| {
            let u = open_uniform(&mut rng);
            let w = open_uniform(&mut rng);
            (u, conditional_inverse(c, u, w))
        })
        .collect()
}

/// `sum y_(i) [hbar(i/m) - hbar((i-1)/m)]` over the sorted sample.
pub fn empirical_distortion(h: &Distortion, sample: &mut [f64]) -> f64 {
    sample.sort_by(f64::total_cmp);
    let m = sample.len() as f64;
    let mut prev = 0.0;
    let mut acc = 0.0;
    for (i, y) in sample.iter().enumerate() {
        let next = h.eval_dual((i + 1) as f64 / m);
        let w = next - prev;
        if w != 0.0 {
            acc += y * w;
        }
        prev = next;
    }
    acc
}

fn batch_sizes(n: usize, batches: usize) -> impl Iterator<Item = usize> {
    let base = n / batches;
    let extra = n % batches;
    (0..batches).map(move |b| base + usize::from(b < extra))
}

fn check_sizes(n: usize, batches: usize) -> Result<()> {
    if n < MIN_SAMPLE {
        return Err(Error::Domain(format!("sample size {n} below {MIN_SAMPLE}")));
    }
    if batches < 10 || batches > n {
        return Err(Error::Domain(format!(
            "batch count {batches} must lie in [10, n]"
        )));
    }
    Ok(())
}

struct Batch {
    accepted: Vec<f64>,
    all: Vec<f64>,
}

/// One batch of the rejection sampler. `keep_all` also maps every inversion
/// uniform through `G^-1`, giving an unconditional sample of `Y`.
fn draw_batch(
    model: &BivariateModel,
    u_g: f64,
    size: usize,
    seed: u64,
    index: u64,
    keep_all: bool,
) -> Batch {
    let mut rng = stream(seed, index);
    let y: &Marginal = &model.marginal_y;
    let mut accepted = Vec::with_capacity(((1.0 - u_g) * size as f64 * 1.2) as usize + 16);
    let mut all = Vec::with_capacity(if keep_all { size } else { 0 });
    for _ in 0..size {
        let u = open_uniform(&mut rng);
        let w = open_uniform(&mut rng);
        if keep_all {
            all.push(y.quantile_level(crate::level::Level::from_lower(w)));
        }
        if u > u_g {
            let v = conditional_inverse(&model.copula, u, w);
            accepted.push(y.quantile_level(crate::level::Level::from_lower(v)));
        }
    }
    Batch { accepted, all }
}

fn summarize(pooled: f64, per_batch: &[f64], n_accepted: usize, n: usize, seed: u64) -> McEstimate {
    let b = per_batch.len() as f64;
    let mean_b = per_batch.iter().sum::<f64>() / b;
    let var = per_batch.iter().map(|x| (x - mean_b).powi(2)).sum::<f64>() / (b - 1.0);
    McEstimate {
        mean: pooled,
        stderr: (var / b).sqrt(),
        n_accepted,
        n_total: n,
        seed,
        batches: per_batch.len(),
    }
}

fn check_threshold(u_g: f64) -> Result<()> {
    if !(0.0..=MAX_THRESHOLD).contains(&u_g) {
        return Err(Error::Domain(format!(
            "threshold quantile {u_g} must lie in [0, {MAX_THRESHOLD}] for the oracle"
        )));
    }
    Ok(())
}

pub fn mc_cod(
    model: &BivariateModel,
    g: &Distortion,
    h: &Distortion,
    n: usize,
    seed: u64,
    batches: usize,
) -> Result<McEstimate> {
    let u_g = threshold_quantile(g, &model.marginal_x)?;
    mc_cod_at(model, u_g, h, n, seed, batches)
}

pub fn mc_cod_at(
    model: &BivariateModel,
    u_g: f64,
    h: &Distortion,
    n: usize,
    seed: u64,
    batches: usize,
) -> Result<McEstimate> {
    check_sizes(n, batches)?;
    check_threshold(u_g)?;
    let mut pooled = Vec::new();
    let mut per_batch = Vec::with_capacity(batches);
    for (b, size) in batch_sizes(n, batches).enumerate() {
        let mut batch = draw_batch(model, u_g, size, seed, b as u64, false);
        if batch.accepted.is_empty() {
            return Err(Error::InsufficientAcceptance {
                accepted: 0,
                required: MIN_ACCEPTED,
            });
        }
        per_batch.push(empirical_distortion(h, &mut batch.accepted));
        pooled.append(&mut batch.accepted);
    }
    let n_accepted = pooled.len();
    if n_accepted < MIN_ACCEPTED {
        return Err(Error::InsufficientAcceptance {
            accepted: n_accepted,
            required: MIN_ACCEPTED,
        });
    }
    let mean = empirical_distortion(h, &mut pooled);
    Ok(summarize(mean, &per_batch, n_accepted, n, seed))
}

/// Type-I contribution: the conditional estimate minus the empirical `D_h[Y]`
/// of the full unconditional sample, batched together.
pub fn mc_delta_cod_at(
    model: &BivariateModel,
    u_g: f64,
    h: &Distortion,
    n: usize,
    seed: u64,
    batches: usize,
) -> Result<McEstimate> {
    check_sizes(n, batches)?;
    check_threshold(u_g)?;
    let mut pooled = Vec::new();
    let mut pooled_all = Vec::with_capacity(n);
    let mut per_batch = Vec::with_capacity(batches);
    for (b, size) in batch_sizes(n, batches).enumerate() {
        let mut batch = draw_batch(model, u_g, size, seed, b as u64, true);
        if batch.accepted.is_empty() {
            return Err(Error::InsufficientAcceptance {
                accepted: 0,
                required: MIN_ACCEPTED,
            });
        }
        let cond = empirical_distortion(h, &mut batch.accepted);
        let base = empirical_distortion(h, &mut batch.all);
        per_batch.push(cond - base);
        pooled.append(&mut batch.accepted);
        pooled_all.append(&mut batch.all);
    }
    let n_accepted = pooled.len();
    if n_accepted < MIN_ACCEPTED {
        return Err(Error::InsufficientAcceptance {
            accepted: n_accepted,
            required: MIN_ACCEPTED,
        });
    }
    let mean = empirical_distortion(h, &mut pooled) - empirical_distortion(h, &mut pooled_all);
    Ok(summarize(mean, &per_batch, n_accepted, n, seed))
}

pub fn mc_delta_cod(
    model: &BivariateModel,
    g: &Distortion,
    h: &Distortion,
    n: usize,
    seed: u64,
    batches: usize,
) -> Result<McEstimate> {
    let u_g = threshold_quantile(g, &model.marginal_x)?;
    mc_delta_cod_at(model, u_g, h, n, seed, batches)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::riskcore::{cod_at, delta_cod_at};

    fn model(s: &str) -> BivariateModel {
        s.parse().unwrap()
    }

    fn d(s: &str) -> Distortion {
        s.parse().unwrap()
    }

    #[test]
    fn independence_pairs_are_uncorrelated() {
        let n = 20_000;
        let pairs = sample_pairs(&Copula::independence(), n, 7);
        let (mu, mv) = (0.5, 0.5);
        let cov: f64 = pairs.iter().map(|(u, v)| (u - mu) * (v - mv)).sum::<f64>() / n as f64;
        let corr = cov * 12.0;
        assert!(corr.abs() < 4.0 / (n as f64).sqrt());
    }

    #[test]
    fn comonotonic_pairs_coincide() {
        for (u, v) in sample_pairs(&Copula::comonotonic(), 1000, 3) {
            assert_eq!(u, v);
        }
    }

    #[test]
    fn gumbel_pairs_match_copula() {
        let n = 100_000;
        let pairs = sample_pairs(&Copula::gumbel(2.0).unwrap(), n, 11);
        let hits = pairs.iter().filter(|(u, v)| *u <= 0.5 && *v <= 0.5).count() as f64 / n as f64;
        let p = 2f64.powf(-2f64.sqrt());
        assert!((p - 0.3752).abs() < 1e-4);
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((hits - p).abs() < 3.0 * se, "{hits} vs {p}");
    }

    #[test]
    fn fgm_pairs_match_copula() {
        let n = 100_000;
        let c = Copula::fgm(-0.8).unwrap();
        let pairs = sample_pairs(&c, n, 5);
        for (a, b) in [(0.3, 0.6), (0.7, 0.2), (0.5, 0.5)] {
            let hits = pairs.iter().filter(|(u, v)| *u <= a && *v <= b).count() as f64 / n as f64;
            let p = c.cdf(a, b);
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((hits - p).abs() < 4.0 * se);
        }
    }

    #[test]
    fn reproducible_bit_for_bit() {
        let mdl = model("gumbel:2,normal:0,1,normal:0,1");
        let a = mc_cod_at(&mdl, 0.9, &d("power:2"), 20_000, 42, 10).unwrap();
        let b = mc_cod_at(&mdl, 0.9, &d("power:2"), 20_000, 42, 10).unwrap();
        assert_eq!(a, b);
        let c = mc_cod_at(&mdl, 0.9, &d("power:2"), 20_000, 43, 10).unwrap();
        assert_ne!(a.mean, c.mean);
    }

    #[test]
    fn independence_identity_mean() {
        let mdl = model("indep,normal:0,1,gamma:2,1");
        let est = mc_cod_at(&mdl, 0.9, &d("id"), 200_000, 1, 20).unwrap();
        assert!((est.mean - 2.0).abs() < 3.0 * est.stderr, "{est:?}");
    }

    #[test]
    fn harmonic_number_under_independence() {
        let mdl = model("indep,normal:0,1,exp:1");
        let est = mc_cod_at(&mdl, 0.5, &d("dualpower:3"), 200_000, 9, 20).unwrap();
        assert!((est.mean - 11.0 / 6.0).abs() < 3.0 * est.stderr, "{est:?}");
    }

    #[test]
    fn agrees_with_representation() {
        let mdl = model("gumbel:2,normal:0,1,normal:0,1");
        let h = d("power:2");
        let est = mc_cod_at(&mdl, 0.95, &h, 200_000, 42, 20).unwrap();
        let exact = cod_at(&mdl, 0.95, &h).unwrap().value;
        assert!(
            (est.mean - exact).abs() < 3.0 * est.stderr,
            "{est:?} vs {exact}"
        );
        let se = (0.05 * 0.95 / 200_000f64).sqrt() * 200_000.0;
        assert!((est.n_accepted as f64 - 10_000.0).abs() < 4.0 * se);
    }

    #[test]
    fn delta_agrees_with_representation() {
        let mdl = model("gumbel:2,gamma:0.5,1,gamma:1.5,1");
        let h = d("es:0.8");
        let est = mc_delta_cod_at(&mdl, 0.9, &h, 100_000, 4, 20).unwrap();
        let exact = delta_cod_at(&mdl, 0.9, &h).unwrap().value;
        assert!(
            (est.mean - exact).abs() < 4.0 * est.stderr,
            "{est:?} vs {exact}"
        );
    }

    #[test]
    fn input_errors() {
        let mdl = model("gumbel:2,normal:0,1,normal:0,1");
        assert!(matches!(
            mc_cod_at(&mdl, 0.9, &d("id"), 100, 1, 10),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            mc_cod_at(&mdl, 0.9995, &d("id"), 20_000, 1, 10),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            mc_cod_at(&mdl, 0.9, &d("id"), 20_000, 1, 5),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            mc_cod_at(&mdl, 0.999, &d("id"), 20_000, 1, 10),
            Err(Error::InsufficientAcceptance { .. })
        ));
    }

    #[test]
    fn var_estimator_is_an_empirical_quantile() {
        let mut s: Vec<f64> = (1..=10).map(f64::from).rev().collect();
        assert_eq!(empirical_distortion(&d("var:0.75"), &mut s), 8.0);
        let mut s: Vec<f64> = (1..=4).map(f64::from).collect();
        assert!((empirical_distortion(&d("id"), &mut s) - 2.5).abs() < 1e-15);
    }
}
