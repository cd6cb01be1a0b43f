//! Grid verifiers for univariate stochastic orders.
//!
//! These are checks, not proofs: each order is tested on a finite grid of
//! probability levels (refined towards both tails) or of the corresponding
//! quantiles of both marginals, with a tolerance of 1e-9 relative to
//! `1 + |magnitude|` of the compared quantities. Margins are reported on the
//! same normalized scale.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::level::Level;
use crate::marginal::Marginal;
use crate::verdict::{OrderVerdict, Tally};

const TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StochasticOrder {
    /// Usual stochastic order.
    St,
    /// Hazard rate.
    Hr,
    /// Likelihood ratio.
    Lr,
    /// Increasing convex.
    Icx,
    /// Increasing concave.
    Icv,
    /// Dispersive.
    Disp,
    /// Excess wealth.
    Ew,
}

impl StochasticOrder {
    pub const ALL: [StochasticOrder; 7] = [
        StochasticOrder::St,
        StochasticOrder::Hr,
        StochasticOrder::Lr,
        StochasticOrder::Icx,
        StochasticOrder::Icv,
        StochasticOrder::Disp,
        StochasticOrder::Ew,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            StochasticOrder::St => "st",
            StochasticOrder::Hr => "hr",
            StochasticOrder::Lr => "lr",
            StochasticOrder::Icx => "icx",
            StochasticOrder::Icv => "icv",
            StochasticOrder::Disp => "disp",
            StochasticOrder::Ew => "ew",
        }
    }
}

impl fmt::Display for StochasticOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StochasticOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        StochasticOrder::ALL
            .iter()
            .copied()
            .find(|o| o.name().eq_ignore_ascii_case(t))
            .ok_or_else(|| Error::Domain(format!("unknown stochastic order {t:?}")))
    }
}

/// Probability levels `i / (n + 1)` plus geometric refinements into both tails.
pub fn level_grid(n: usize) -> Vec<Level> {
    let n = n.max(2);
    let mut levels: Vec<Level> = (1..=n)
        .map(|i| {
            let p = i as f64 / (n + 1) as f64;
            if p > 0.5 {
                Level::from_upper((n + 1 - i) as f64 / (n + 1) as f64)
            } else {
                Level::from_lower(p)
            }
        })
        .collect();
    let edge = 1.0 / (n + 1) as f64;
    let mut t = edge / 10.0;
    while t >= 1e-10 {
        levels.push(Level::from_lower(t));
        levels.push(Level::from_upper(t));
        t /= 10.0;
    }
    levels.sort_by(|a, b| {
        a.lower()
            .total_cmp(&b.lower())
            .then(b.upper().total_cmp(&a.upper()))
    });
    levels
}

/// `int_u^1 F^-1(t) dt`, with `u = 0` giving the mean.
pub fn upper_quantile_integral(m: &Marginal, level: Level) -> f64 {
    if level.lower() <= 0.0 {
        return m.mean();
    }
    if level.upper() <= 0.0 {
        return 0.0;
    }
    m.integrated_tail_level(level) + level.upper() * m.quantile_level(level)
}

/// `int_0^u F^-1(t) dt`.
pub fn lower_quantile_integral(m: &Marginal, level: Level) -> f64 {
    m.mean() - upper_quantile_integral(m, level)
}

// lhs <= rhs after dividing both by 1 + magnitude, so that the absolute
// tolerance acts relatively on large values
fn rel_leq(tally: &mut Tally, location: &[f64], lhs: f64, rhs: f64, magnitude: f64) {
    let s = 1.0 + magnitude;
    tally.leq(location, lhs / s, rhs / s);
}

/// Checks `m1 <=_order m2` on a grid with `grid_size` interior levels.
pub fn check_order(
    m1: &Marginal,
    m2: &Marginal,
    order: StochasticOrder,
    grid_size: usize,
) -> Result<OrderVerdict> {
    if grid_size < 2 {
        return Err(Error::Domain(format!(
            "grid size {grid_size} must be at least 2"
        )));
    }
    let levels = level_grid(grid_size);
    let mut tally = Tally::new(TOL);
    match order {
        StochasticOrder::St => {
            for x in x_grid(m1, m2, &levels) {
                tally.leq(&[x], m1.sf(x), m2.sf(x));
            }
        }
        StochasticOrder::Hr => {
            // conditional survivals: sf1(x2)/sf1(x1) <= sf2(x2)/sf2(x1)
            let xs = x_grid(m1, m2, &levels);
            for w in xs.windows(2) {
                let (s1a, s1b) = (m1.sf(w[0]), m1.sf(w[1]));
                let (s2a, s2b) = (m2.sf(w[0]), m2.sf(w[1]));
                if s1a <= 0.0 {
                    continue;
                }
                let lhs = s1b / s1a;
                let rhs = if s2a > 0.0 { s2b / s2a } else { 0.0 };
                tally.leq(&[w[0], w[1]], lhs, rhs);
            }
        }
        StochasticOrder::Lr => {
            // ln g - ln f increasing
            let xs = x_grid(m1, m2, &levels);
            let ratio = |x: f64| {
                let (lf, lg) = (m1.ln_pdf(x), m2.ln_pdf(x));
                if lf == f64::NEG_INFINITY && lg == f64::NEG_INFINITY {
                    None
                } else {
                    Some(lg - lf)
                }
            };
            let mut prev: Option<(f64, f64)> = None;
            for &x in &xs {
                let Some(r) = ratio(x) else { continue };
                if let Some((px, pr)) = prev {
                    let same_infinity = pr.is_infinite() && pr == r;
                    if !same_infinity {
                        let mag = if pr.is_finite() && r.is_finite() {
                            pr.abs().max(r.abs())
                        } else {
                            0.0
                        };
                        rel_leq(&mut tally, &[px, x], pr, r, mag);
                    }
                }
                prev = Some((x, r));
            }
        }
        StochasticOrder::Icx => {
            let mut ends = levels.clone();
            ends.insert(0, Level::from_lower(0.0));
            for l in ends {
                let a = upper_quantile_integral(m1, l);
                let b = upper_quantile_integral(m2, l);
                rel_leq(&mut tally, &[l.lower()], a, b, a.abs().max(b.abs()));
            }
        }
        StochasticOrder::Icv => {
            let mut ends = levels.clone();
            ends.push(Level::from_upper(0.0));
            for l in ends {
                let a = lower_quantile_integral(m1, l);
                let b = lower_quantile_integral(m2, l);
                rel_leq(&mut tally, &[l.lower()], a, b, a.abs().max(b.abs()));
            }
        }
        StochasticOrder::Disp => {
            // G^-1 - F^-1 increasing in the level
            let mut prev: Option<(f64, f64, f64)> = None;
            for l in &levels {
                let (x, y) = (m1.quantile_level(*l), m2.quantile_level(*l));
                let d = y - x;
                let mag = x.abs().max(y.abs());
                if let Some((pu, pd, pmag)) = prev {
                    rel_leq(&mut tally, &[pu, l.lower()], pd, d, mag.max(pmag));
                }
                prev = Some((l.lower(), d, mag));
            }
        }
        StochasticOrder::Ew => {
            for l in &levels {
                let a = m1.integrated_tail_level(*l);
                let b = m2.integrated_tail_level(*l);
                rel_leq(&mut tally, &[l.lower()], a, b, a.abs().max(b.abs()));
            }
        }
    }
    Ok(tally.finish())
}

// Sorted union of both marginals' quantiles at the grid levels.
fn x_grid(m1: &Marginal, m2: &Marginal, levels: &[Level]) -> Vec<f64> {
    let mut xs: Vec<f64> = levels
        .iter()
        .flat_map(|l| [m1.quantile_level(*l), m2.quantile_level(*l)])
        .filter(|x| x.is_finite())
        .collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}
