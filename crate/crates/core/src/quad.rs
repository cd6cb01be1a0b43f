//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! The integrator bisects the interval with the largest error estimate until
//! the summed estimate meets `max(abs_tol, rel_tol * |I|)`. Integrands may be
//! vector valued (`[f64; N]`) so that several integrals sharing the same nodes
//! are evaluated in one pass; error control then uses the worst component.
//! Nodes are strictly interior, so integrable endpoint singularities are fine.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            abs_tol: 1e-10,
            rel_tol: 1e-12,
            max_intervals: 4000,
        }
    }
}

impl QuadConfig {
    pub fn with_abs_tol(abs_tol: f64) -> Self {
        QuadConfig {
            abs_tol,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Quadrature<const N: usize> {
    pub value: [f64; N],
    pub error: f64,
    pub evaluations: usize,
}

struct Piece<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: f64,
}

impl<const N: usize> PartialEq for Piece<N> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<const N: usize> Eq for Piece<N> {}
impl<const N: usize> PartialOrd for Piece<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const N: usize> Ord for Piece<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<const N: usize, F>(f: &mut F, a: f64, b: f64) -> Result<Piece<N>>
where
    F: FnMut(f64) -> Result<[f64; N]>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut gauss = [0.0; N];
    let mut kron = [0.0; N];
    for k in 0..N {
        gauss[k] = fc[k] * WG[3];
        kron[k] = fc[k] * WGK[7];
    }
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        for k in 0..N {
            let s = f1[k] + f2[k];
            kron[k] += WGK[j] * s;
            // odd Kronrod nodes are the 7-point Gauss nodes
            if j % 2 == 1 {
                gauss[k] += WG[j / 2] * s;
            }
        }
    }
    let mut value = [0.0; N];
    let mut error: f64 = 0.0;
    for k in 0..N {
        value[k] = kron[k] * half;
        let e = ((kron[k] - gauss[k]) * half).abs();
        if !value[k].is_finite() || !e.is_finite() {
            return Err(Error::Diverges(format!(
                "non-finite integrand on [{a}, {b}]"
            )));
        }
        error = error.max(e);
    }
    Ok(Piece { a, b, value, error })
}

/// Integrates a vector-valued function over the finite interval `[a, b]`.
pub fn integrate_vec<const N: usize, F>(
    mut f: F,
    a: f64,
    b: f64,
    cfg: &QuadConfig,
) -> Result<Quadrature<N>>
where
    F: FnMut(f64) -> Result<[f64; N]>,
{
    if a == b {
        return Ok(Quadrature {
            value: [0.0; N],
            error: 0.0,
            evaluations: 0,
        });
    }
    let mut evaluations = 15;
    let first = kronrod(&mut f, a, b)?;
    let mut total = first.value;
    let mut total_err = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);

    let target = |v: &[f64; N]| {
        let mag = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        cfg.abs_tol.max(cfg.rel_tol * mag)
    };

    while total_err > target(&total) {
        if heap.len() >= cfg.max_intervals {
            return Err(Error::Diverges(format!(
                "quadrature on [{a}, {b}] stalled at error {total_err:.3e} after {} intervals",
                heap.len()
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval can no longer be split in floating point; accept it
            let err = worst.error;
            heap.push(Piece {
                error: 0.0,
                ..worst
            });
            total_err -= err;
            continue;
        }
        let left = kronrod(&mut f, worst.a, mid)?;
        let right = kronrod(&mut f, mid, worst.b)?;
        evaluations += 30;
        for k in 0..N {
            total[k] += left.value[k] + right.value[k] - worst.value[k];
        }
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // re-sum to shed the drift of the incremental updates
    let mut value = [0.0; N];
    let mut error = 0.0;
    for piece in heap.iter() {
        for k in 0..N {
            value[k] += piece.value[k];
        }
        error += piece.error;
    }
    Ok(Quadrature {
        value,
        error,
        evaluations,
    })
}

/// Scalar convenience wrapper around [`integrate_vec`].
pub fn integrate<F>(mut f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<Quadrature<1>>
where
    F: FnMut(f64) -> f64,
{
    integrate_vec(move |x| Ok([f(x)]), a, b, cfg)
}

/// Integrates over `[a, +inf)` through the substitution `t = a + x / (1 - x)`.
pub fn integrate_to_infinity<F>(mut f: F, a: f64, cfg: &QuadConfig) -> Result<Quadrature<1>>
where
    F: FnMut(f64) -> f64,
{
    integrate(
        move |x| {
            let one_minus = 1.0 - x;
            let t = a + x / one_minus;
            let v = f(t);
            if v == 0.0 {
                0.0
            } else {
                v / (one_minus * one_minus)
            }
        },
        0.0,
        1.0,
        cfg,
    )
}

/// Integrates over `(-inf, b]` by reflection.
pub fn integrate_from_neg_infinity<F>(mut f: F, b: f64, cfg: &QuadConfig) -> Result<Quadrature<1>>
where
    F: FnMut(f64) -> f64,
{
    integrate_to_infinity(move |t| f(-t), -b, cfg)
}

/// Integrates over an arbitrary (possibly infinite) interval split at the given breakpoints.
pub fn integrate_with_breaks<F>(
    mut f: F,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    cfg: &QuadConfig,
) -> Result<Quadrature<1>>
where
    F: FnMut(f64) -> f64,
{
    let mut points = vec![lo];
    let mut inner: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|x| x.is_finite() && *x > lo && *x < hi)
        .collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    points.extend(inner);
    points.push(hi);

    let pieces = (points.len() - 1) as f64;
    let cfg = &QuadConfig {
        abs_tol: cfg.abs_tol / pieces,
        ..*cfg
    };
    let mut out = Quadrature {
        value: [0.0],
        error: 0.0,
        evaluations: 0,
    };
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let piece = match (a.is_finite(), b.is_finite()) {
            (true, true) => integrate(&mut f, a, b, cfg)?,
            (true, false) => integrate_to_infinity(&mut f, a, cfg)?,
            (false, true) => integrate_from_neg_infinity(&mut f, b, cfg)?,
            (false, false) => {
                let left = integrate_from_neg_infinity(&mut f, 0.0, cfg)?;
                let right = integrate_to_infinity(&mut f, 0.0, cfg)?;
                Quadrature {
                    value: [left.value[0] + right.value[0]],
                    error: left.error + right.error,
                    evaluations: left.evaluations + right.evaluations,
                }
            }
        };
        out.value[0] += piece.value[0];
        out.error += piece.error;
        out.evaluations += piece.evaluations;
    }
    Ok(out)
}
