//! Continuous univariate marginals.
//!
//! All families are continuous and strictly increasing on their support, so
//! the generalized inverse coincides with the ordinary inverse. Quantiles take
//! a [`Level`] internally so that upper-tail levels are resolved from `1 - p`.

use std::fmt;
use std::str::FromStr;

use statrs::function::gamma::{gamma, gamma_lr, gamma_ur, ln_gamma};

use crate::error::{Error, Result};
use crate::level::Level;
use crate::solve::newton_increasing;
use crate::special::{norm_cdf, norm_pdf, norm_quantile, norm_sf};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MarginalFamily {
    Normal {
        mu: f64,
        sigma: f64,
    },
    /// Shape `a`, rate `b`: density `b^a x^(a-1) e^(-b x) / Gamma(a)`.
    Gamma {
        shape: f64,
        rate: f64,
    },
    /// Survival `exp(-(x / scale)^shape)`.
    Weibull {
        scale: f64,
        shape: f64,
    },
    Exponential {
        rate: f64,
    },
    Uniform {
        lo: f64,
        hi: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Marginal {
    family: MarginalFamily,
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::ParameterDomain(format!(
            "{name} = {x} must be positive and finite"
        )))
    }
}

impl Marginal {
    pub fn new(family: MarginalFamily) -> Result<Self> {
        match family {
            MarginalFamily::Normal { mu, sigma } => {
                if !mu.is_finite() {
                    return Err(Error::ParameterDomain(format!("mean {mu} must be finite")));
                }
                positive("sigma", sigma)?;
            }
            MarginalFamily::Gamma { shape, rate } => {
                positive("shape", shape)?;
                positive("rate", rate)?;
            }
            MarginalFamily::Weibull { scale, shape } => {
                positive("scale", scale)?;
                positive("shape", shape)?;
            }
            MarginalFamily::Exponential { rate } => positive("rate", rate)?,
            MarginalFamily::Uniform { lo, hi } => {
                if !(lo < hi && lo.is_finite() && hi.is_finite()) {
                    return Err(Error::ParameterDomain(format!(
                        "uniform bounds [{lo}, {hi}] must be finite with lo < hi"
                    )));
                }
            }
        }
        Ok(Marginal { family })
    }

    pub fn normal(mu: f64, sigma: f64) -> Result<Self> {
        Self::new(MarginalFamily::Normal { mu, sigma })
    }

    pub fn gamma(shape: f64, rate: f64) -> Result<Self> {
        Self::new(MarginalFamily::Gamma { shape, rate })
    }

    pub fn weibull(scale: f64, shape: f64) -> Result<Self> {
        Self::new(MarginalFamily::Weibull { scale, shape })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        Self::new(MarginalFamily::Exponential { rate })
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        Self::new(MarginalFamily::Uniform { lo, hi })
    }

    pub fn family(&self) -> MarginalFamily {
        self.family
    }

    pub fn support(&self) -> (f64, f64) {
        match self.family {
            MarginalFamily::Normal { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            MarginalFamily::Uniform { lo, hi } => (lo, hi),
            _ => (0.0, f64::INFINITY),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.cdf_level(x).lower()
    }

    pub fn sf(&self, x: f64) -> f64 {
        self.cdf_level(x).upper()
    }

    /// `F(x)` together with `1 - F(x)`, each computed directly.
    pub fn cdf_level(&self, x: f64) -> Level {
        if x.is_nan() {
            return Level::from_parts(f64::NAN, f64::NAN);
        }
        let (lo, hi) = self.support();
        if x <= lo {
            return Level::from_lower(0.0);
        }
        if x >= hi {
            return Level::from_upper(0.0);
        }
        match self.family {
            MarginalFamily::Normal { mu, sigma } => {
                let z = (x - mu) / sigma;
                Level::from_parts(norm_cdf(z), norm_sf(z))
            }
            MarginalFamily::Gamma { shape, rate } => {
                let t = rate * x;
                Level::from_parts(gamma_lr(shape, t), gamma_ur(shape, t))
            }
            MarginalFamily::Weibull { scale, shape } => {
                let h = (x / scale).powf(shape);
                Level::from_parts(-(-h).exp_m1(), (-h).exp())
            }
            MarginalFamily::Exponential { rate } => {
                let h = rate * x;
                Level::from_parts(-(-h).exp_m1(), (-h).exp())
            }
            MarginalFamily::Uniform { lo, hi } => {
                let w = hi - lo;
                Level::from_parts((x - lo) / w, (hi - x) / w)
            }
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x < lo || x > hi {
            return f64::NEG_INFINITY;
        }
        match self.family {
            MarginalFamily::Normal { mu, sigma } => {
                let z = (x - mu) / sigma;
                norm_pdf(z).ln() - sigma.ln()
            }
            MarginalFamily::Gamma { shape, rate } => {
                if x == 0.0 {
                    return match shape.partial_cmp(&1.0) {
                        Some(std::cmp::Ordering::Less) => f64::INFINITY,
                        Some(std::cmp::Ordering::Equal) => rate.ln(),
                        _ => f64::NEG_INFINITY,
                    };
                }
                let t = rate * x;
                rate.ln() + (shape - 1.0) * t.ln() - t - ln_gamma(shape)
            }
            MarginalFamily::Weibull { scale, shape } => {
                let r = x / scale;
                if x == 0.0 && shape < 1.0 {
                    return f64::INFINITY;
                }
                (shape / scale).ln() + (shape - 1.0) * r.ln() - r.powf(shape)
            }
            MarginalFamily::Exponential { rate } => rate.ln() - rate * x,
            MarginalFamily::Uniform { lo, hi } => -(hi - lo).ln(),
        }
    }

    /// `F^-1(p)` for `p` in `(0, 1)`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("probability {p} must lie in (0, 1)")));
        }
        Ok(self.quantile_level(Level::from_lower(p)))
    }

    /// Quantile at a level; levels 0 and 1 map to the support endpoints.
    pub fn quantile_level(&self, level: Level) -> f64 {
        let (lo, hi) = self.support();
        if level.lower() <= 0.0 {
            return lo;
        }
        if level.upper() <= 0.0 {
            return hi;
        }
        match self.family {
            MarginalFamily::Normal { mu, sigma } => mu + sigma * norm_quantile(level),
            MarginalFamily::Gamma { shape, rate } => gamma_unit_quantile(shape, level) / rate,
            MarginalFamily::Weibull { scale, shape } => {
                scale * cumulative_hazard(level).powf(1.0 / shape)
            }
            MarginalFamily::Exponential { rate } => cumulative_hazard(level) / rate,
            MarginalFamily::Uniform { lo, hi } => {
                let w = hi - lo;
                if level.in_upper_half() {
                    hi - level.upper() * w
                } else {
                    lo + level.lower() * w
                }
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match self.family {
            MarginalFamily::Normal { mu, .. } => mu,
            MarginalFamily::Gamma { shape, rate } => shape / rate,
            MarginalFamily::Weibull { scale, shape } => scale * gamma(1.0 + 1.0 / shape),
            MarginalFamily::Exponential { rate } => 1.0 / rate,
            MarginalFamily::Uniform { lo, hi } => 0.5 * (lo + hi),
        }
    }

    /// `int_{F^-1(u)}^inf (1 - F(t)) dt` for `u` in `(0, 1)`.
    pub fn integrated_tail(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain(format!("probability {u} must lie in (0, 1)")));
        }
        Ok(self.integrated_tail_level(Level::from_lower(u)))
    }

    pub(crate) fn integrated_tail_level(&self, level: Level) -> f64 {
        let q = level.upper();
        if q <= 0.0 {
            return 0.0;
        }
        let d = self.quantile_level(level);
        let v = match self.family {
            MarginalFamily::Normal { mu, sigma } => {
                let z = (d - mu) / sigma;
                sigma * (norm_pdf(z) - z * q)
            }
            MarginalFamily::Gamma { shape, rate } => {
                // E[(X - d)+] = (Q(a, x)(a - x) + x^a e^-x / Gamma(a)) / b with x = b d
                let x = rate * d;
                let head = if x > 0.0 {
                    (shape * x.ln() - x - ln_gamma(shape)).exp()
                } else {
                    0.0
                };
                (gamma_ur(shape, x) * (shape - x) + head) / rate
            }
            MarginalFamily::Weibull { scale, shape } => {
                let s = cumulative_hazard(level);
                scale / shape * gamma(1.0 / shape) * gamma_ur(1.0 / shape, s)
            }
            MarginalFamily::Exponential { rate } => q / rate,
            MarginalFamily::Uniform { lo, hi } => 0.5 * (hi - lo) * q * q,
        };
        v.max(0.0)
    }

    /// Decreasing failure rate, i.e. log-convex survival function.
    pub fn is_dfr(&self) -> bool {
        match self.family {
            MarginalFamily::Gamma { shape, .. } => shape <= 1.0,
            MarginalFamily::Weibull { shape, .. } => shape <= 1.0,
            MarginalFamily::Exponential { .. } => true,
            MarginalFamily::Normal { .. } | MarginalFamily::Uniform { .. } => false,
        }
    }

    /// Distribution of `-X`, where it stays in a supported family.
    pub fn mirror(&self) -> Result<Marginal> {
        match self.family {
            MarginalFamily::Normal { mu, sigma } => Marginal::normal(-mu, sigma),
            MarginalFamily::Uniform { lo, hi } => Marginal::uniform(-hi, -lo),
            _ => Err(Error::Unsupported(format!("mirror image of {self}"))),
        }
    }
}

/// Free-function form of [`Marginal::quantile`].
pub fn quantile(m: &Marginal, p: f64) -> Result<f64> {
    m.quantile(p)
}

/// Free-function form of [`Marginal::integrated_tail`].
pub fn integrated_tail(m: &Marginal, u: f64) -> Result<f64> {
    m.integrated_tail(u)
}

/// Free-function form of [`Marginal::is_dfr`].
pub fn is_dfr(m: &Marginal) -> bool {
    m.is_dfr()
}

// -ln(1 - p), from whichever side of the level is small.
fn cumulative_hazard(level: Level) -> f64 {
    if level.in_upper_half() {
        -level.upper().ln()
    } else {
        -(-level.lower()).ln_1p()
    }
}

/// Quantile of the rate-one gamma law with shape `a`.
///
/// Newton's method in `y = ln x` on `ln P(a, e^y)` (lower half) or
/// `ln Q(a, e^y)` (upper half); both are monotone and nearly linear in `y`.
fn gamma_unit_quantile(a: f64, level: Level) -> f64 {
    let lg = ln_gamma(a);
    // d/dy ln P = x f(x) / P with ln(x f(x)) = a y - x - ln Gamma(a)
    let ln_xf = |y: f64| a * y - y.exp() - lg;
    let y = if level.in_upper_half() {
        let lq = level.upper().ln();
        // start from the exponential-tail approximation
        let y0 = (-lq + (a - 1.0) * (-lq).max(1.0).ln()).max(1e-300).ln();
        let f = |y: f64| {
            let x = y.exp();
            let q = gamma_ur(a, x);
            let lnq = q.ln();
            (lq - lnq, (ln_xf(y) - lnq).exp())
        };
        solve_log(f, y0)
    } else {
        let lp = level.lower().ln();
        // P(a, x) ~ x^a / Gamma(a + 1) near zero
        let y0 = ((lp + ln_gamma(a + 1.0)) / a).min(3.0);
        let f = |y: f64| {
            let x = y.exp();
            let p = gamma_lr(a, x);
            let lnp = p.ln();
            (lnp - lp, (ln_xf(y) - lnp).exp())
        };
        solve_log(f, y0)
    };
    y.exp()
}

fn solve_log<F>(mut f: F, y0: f64) -> f64
where
    F: FnMut(f64) -> (f64, f64),
{
    // bracket by stepping outward from the start
    let (mut lo, mut hi) = (y0 - 1.0, y0 + 1.0);
    let mut step = 1.0;
    while f(lo).0 > 0.0 && lo > -745.0 {
        step *= 2.0;
        lo -= step;
    }
    step = 1.0;
    while f(hi).0 < 0.0 && hi < 710.0 {
        step *= 2.0;
        hi += step;
    }
    // non-finite residuals are sorted by the bisection guard
    let g = |y: f64| {
        let (v, d) = f(y);
        let v = if v.is_nan() { f64::INFINITY } else { v };
        (v, d)
    };
    newton_increasing(g, lo, hi, y0, 1e-15).unwrap_or(0.5 * (lo + hi))
}

impl fmt::Display for Marginal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            MarginalFamily::Normal { mu, sigma } => write!(f, "normal:{mu},{sigma}"),
            MarginalFamily::Gamma { shape, rate } => write!(f, "gamma:{shape},{rate}"),
            MarginalFamily::Weibull { scale, shape } => write!(f, "weibull:{scale},{shape}"),
            MarginalFamily::Exponential { rate } => write!(f, "exp:{rate}"),
            MarginalFamily::Uniform { lo, hi } => write!(f, "uniform:{lo},{hi}"),
        }
    }
}

impl FromStr for Marginal {
    type Err = Error;

    /// Parses `normal:0,1`, `gamma:0.5,1` (shape, rate), `weibull:1,2`
    /// (scale, shape), `exp:1` and `uniform:0,1`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, args) = s
            .split_once(':')
            .ok_or_else(|| Error::parse("marginal", s, "expected family:params"))?;
        let params = args
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::parse("marginal", s, e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        let want = |n: usize| {
            if params.len() == n {
                Ok(())
            } else {
                Err(Error::parse(
                    "marginal",
                    s,
                    format!("{name} takes {n} parameter(s), got {}", params.len()),
                ))
            }
        };
        match name.to_ascii_lowercase().as_str() {
            "normal" => {
                want(2)?;
                Marginal::normal(params[0], params[1])
            }
            "gamma" => {
                want(2)?;
                Marginal::gamma(params[0], params[1])
            }
            "weibull" => {
                want(2)?;
                Marginal::weibull(params[0], params[1])
            }
            "exp" | "exponential" => {
                want(1)?;
                Marginal::exponential(params[0])
            }
            "uniform" => {
                want(2)?;
                Marginal::uniform(params[0], params[1])
            }
            other => Err(Error::parse(
                "marginal",
                s,
                format!("unknown family {other:?}"),
            )),
        }
    }
}
