//! Bivariate copulas, conditional tail distributions and dependence checks.
//!
//! The conditional law of `V` given `U > u` is the workhorse of the CoD
//! representation:
//!
//! ```text
//! F_{V|U>u}(v) = (v - C(u, v)) / (1 - u)
//! P(V > v | U > u) = Cbar(u, v) / (1 - u),   Cbar(u, v) = 1 - u - v + C(u, v)
//! ```
//!
//! Both sides are evaluated without cancellation so that quantiles of the
//! conditional law can be taken from the upper tail.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::level::Level;
use crate::solve::brent;
use crate::verdict::{OrderVerdict, Tally};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CopulaFamily {
    /// `exp(-((-ln u)^theta + (-ln v)^theta)^(1/theta))`, `theta >= 1`.
    Gumbel {
        theta: f64,
    },
    /// `uv(1 + alpha (1 - u)(1 - v))`, `alpha` in `[-1, 1]`.
    Fgm {
        alpha: f64,
    },
    Independence,
    Comonotonic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Copula {
    family: CopulaFamily,
}

impl Copula {
    pub fn new(family: CopulaFamily) -> Result<Self> {
        match family {
            CopulaFamily::Gumbel { theta } => {
                if !(theta >= 1.0 && theta.is_finite()) {
                    return Err(Error::ParameterDomain(format!(
                        "gumbel theta = {theta} must be finite and at least 1"
                    )));
                }
            }
            CopulaFamily::Fgm { alpha } => {
                if !(-1.0..=1.0).contains(&alpha) {
                    return Err(Error::ParameterDomain(format!(
                        "fgm alpha = {alpha} must lie in [-1, 1]"
                    )));
                }
            }
            _ => {}
        }
        Ok(Copula { family })
    }

    pub fn gumbel(theta: f64) -> Result<Self> {
        Self::new(CopulaFamily::Gumbel { theta })
    }

    pub fn fgm(alpha: f64) -> Result<Self> {
        Self::new(CopulaFamily::Fgm { alpha })
    }

    pub fn independence() -> Self {
        Copula {
            family: CopulaFamily::Independence,
        }
    }

    pub fn comonotonic() -> Self {
        Copula {
            family: CopulaFamily::Comonotonic,
        }
    }

    pub fn family(&self) -> CopulaFamily {
        self.family
    }

    /// All builtin families are exchangeable.
    pub fn is_symmetric(&self) -> bool {
        true
    }

    pub fn cdf(&self, u: f64, v: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let v = v.clamp(0.0, 1.0);
        if u == 0.0 || v == 0.0 {
            return 0.0;
        }
        if u == 1.0 {
            return v;
        }
        if v == 1.0 {
            return u;
        }
        match self.family {
            CopulaFamily::Gumbel { theta } => {
                if theta == 1.0 {
                    return u * v;
                }
                (-gumbel_a(-u.ln(), -v.ln(), theta)).exp()
            }
            CopulaFamily::Fgm { alpha } => u * v * (1.0 + alpha * (1.0 - u) * (1.0 - v)),
            CopulaFamily::Independence => u * v,
            CopulaFamily::Comonotonic => u.min(v),
        }
    }

    /// `P(U > u, V > v) = 1 - u - v + C(u, v)`.
    pub fn joint_tail(&self, u: f64, v: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let v = v.clamp(0.0, 1.0);
        if u == 1.0 || v == 1.0 {
            return 0.0;
        }
        if u == 0.0 {
            return 1.0 - v;
        }
        if v == 0.0 {
            return 1.0 - u;
        }
        let (uc, vc) = (1.0 - u, 1.0 - v);
        match self.family {
            CopulaFamily::Gumbel { theta } => {
                if theta == 1.0 {
                    return uc * vc;
                }
                gumbel_joint_tail(u, v, theta)
            }
            CopulaFamily::Fgm { alpha } => uc * vc * (1.0 + alpha * u * v),
            CopulaFamily::Independence => uc * vc,
            CopulaFamily::Comonotonic => uc.min(vc),
        }
    }

    /// Survival copula `Chat(u, v) = u + v - 1 + C(1 - u, 1 - v)`.
    pub fn survival_copula(&self, u: f64, v: f64) -> f64 {
        self.joint_tail(1.0 - u, 1.0 - v)
    }

    /// `F_{V|U>u}(v)`.
    pub fn cond_tail_cdf(&self, u: f64, v: f64) -> Result<f64> {
        Ok(self.cond_tail_level(u, v)?.lower())
    }

    /// `F_{V|U>u}(v)` and `P(V > v | U > u)` as a level.
    pub fn cond_tail_level(&self, u: f64, v: f64) -> Result<Level> {
        check_threshold(u)?;
        let v = v.clamp(0.0, 1.0);
        if v == 0.0 {
            return Ok(Level::from_lower(0.0));
        }
        if v == 1.0 {
            return Ok(Level::from_upper(0.0));
        }
        Ok(match self.family {
            CopulaFamily::Independence => Level::from_lower(v),
            CopulaFamily::Fgm { alpha } => {
                let w = 1.0 - v;
                Level::from_parts(v * (1.0 - alpha * u * w), w * (1.0 + alpha * u * v))
            }
            CopulaFamily::Comonotonic => {
                if v <= u {
                    Level::from_lower(0.0)
                } else {
                    let uc = 1.0 - u;
                    Level::from_parts((v - u) / uc, (1.0 - v) / uc)
                }
            }
            CopulaFamily::Gumbel { theta } => {
                if u == 0.0 || theta == 1.0 {
                    return Ok(Level::from_lower(v));
                }
                let uc = 1.0 - u;
                let s = (gumbel_joint_tail(u, v, theta) / uc).clamp(0.0, 1.0);
                let f = (gumbel_lower_gap(u, v, theta) / uc).clamp(0.0, 1.0);
                Level::from_parts(f, s)
            }
        })
    }

    /// `P(V > 1 - w | U > u)` for a small upper-tail width `w`.
    fn tail_given(&self, u: f64, w: f64) -> f64 {
        if w <= 0.0 {
            return 0.0;
        }
        if w >= 1.0 {
            return 1.0;
        }
        if u == 0.0 {
            return w;
        }
        match self.family {
            CopulaFamily::Gumbel { theta } if theta > 1.0 => {
                (gumbel_joint_tail_w(u, w, theta) / (1.0 - u)).clamp(0.0, 1.0)
            }
            _ => self.cond_tail_level_w(u, w),
        }
    }

    fn cond_tail_level_w(&self, u: f64, w: f64) -> f64 {
        let v = 1.0 - w;
        match self.family {
            CopulaFamily::Fgm { alpha } => w * (1.0 + alpha * u * v),
            CopulaFamily::Comonotonic => (w / (1.0 - u)).min(1.0),
            _ => w,
        }
    }

    /// Generalized inverse of `v -> F_{V|U>u}(v)`.
    pub fn cond_tail_quantile(&self, u: f64, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("probability {p} must lie in (0, 1)")));
        }
        Ok(self
            .cond_tail_quantile_level(u, Level::from_lower(p))?
            .lower())
    }

    /// Conditional tail quantile at a level, returned as a level in `V`.
    pub fn cond_tail_quantile_level(&self, u: f64, level: Level) -> Result<Level> {
        check_threshold(u)?;
        let (p, s) = (level.lower(), level.upper());
        if p <= 0.0 {
            return Ok(Level::from_lower(0.0));
        }
        if s <= 0.0 {
            return Ok(Level::from_upper(0.0));
        }
        let upper = level.in_upper_half();
        if u == 0.0 {
            return Ok(level);
        }
        Ok(match self.family {
            CopulaFamily::Independence => level,
            CopulaFamily::Gumbel { theta } if theta == 1.0 => level,
            CopulaFamily::Comonotonic => {
                let uc = 1.0 - u;
                Level::from_parts(u + uc * p, uc * s)
            }
            CopulaFamily::Fgm { alpha } => {
                let k = alpha * u;
                if upper {
                    // w (1 + k - k w) = s
                    let b = 1.0 + k;
                    let w = 2.0 * s / (b + (b * b - 4.0 * k * s).max(0.0).sqrt());
                    Level::from_upper(w)
                } else {
                    // v (1 - k + k v) = p
                    let b = 1.0 - k;
                    let v = 2.0 * p / (b + (b * b + 4.0 * k * p).max(0.0).sqrt());
                    Level::from_lower(v)
                }
            }
            CopulaFamily::Gumbel { theta } => {
                if upper {
                    // s <= P(V > 1 - w | U > u) <= w / (1 - u) brackets w in [s (1 - u), s]
                    let ls = s.ln();
                    // padded so that rounding at a tight bound cannot unbracket the root
                    let lo = ls + (-u).ln_1p() - 1e-9;
                    let hi = ls + 1e-9;
                    let t = brent(|t| self.tail_given(u, t.exp()).ln() - ls, lo, hi, 1e-14)?;
                    Level::from_upper(t.exp())
                } else {
                    // F(v) <= v and F(v) >= (v - u) / (1 - u) bracket v in [p, u + (1 - u) p]
                    let lp = p.ln();
                    let hi = ((u + (1.0 - u) * p).ln() + 1e-9).min(0.0);
                    let f = |t: f64| {
                        let v = t.exp();
                        (gumbel_lower_gap(u, v, theta) / (1.0 - u)).ln() - lp
                    };
                    let t = brent(f, lp - 1e-9, hi, 1e-14)?;
                    Level::from_lower(t.exp())
                }
            }
        })
    }

    /// `C1 <= C2` pointwise on the interior grid `i / (n + 1)`, tolerance 1e-12.
    pub fn concordance_leq(&self, other: &Copula, grid_size: usize) -> OrderVerdict {
        let pts = interior_grid(grid_size.max(2));
        let mut tally = Tally::new(1e-12);
        for &u in &pts {
            for &v in &pts {
                tally.leq(&[u, v], self.cdf(u, v), other.cdf(u, v));
            }
        }
        tally.finish()
    }

    pub fn check_dependence(&self, notion: Dependence, grid_size: usize) -> Result<OrderVerdict> {
        if grid_size < 3 {
            return Err(Error::Domain(format!(
                "grid size {grid_size} must be at least 3"
            )));
        }
        let n = grid_size;
        let pts = interior_grid(n);
        let tol = 1e-12;
        let c = |u: f64, v: f64| self.cdf(u, v);
        let swap = |u: f64, v: f64| self.cdf(v, u);
        Ok(match notion {
            Dependence::Pqd => {
                let mut t = Tally::new(tol);
                for &u in &pts {
                    for &v in &pts {
                        t.leq(&[u, v], u * v, c(u, v));
                    }
                }
                t.finish()
            }
            Dependence::Nqd => {
                let mut t = Tally::new(tol);
                for &u in &pts {
                    for &v in &pts {
                        t.leq(&[u, v], c(u, v), u * v);
                    }
                }
                t.finish()
            }
            Dependence::RtiVinU => rti(|u, v| self.joint_tail(u, v), &pts, tol, true),
            Dependence::RtdVinU => rti(|u, v| self.joint_tail(u, v), &pts, tol, false),
            Dependence::RtiUinV => rti(|v, u| self.joint_tail(u, v), &pts, tol, true),
            Dependence::RtdUinV => rti(|v, u| self.joint_tail(u, v), &pts, tol, false),
            Dependence::SiVinU => si(c, &pts, n, tol, true),
            Dependence::SdVinU => si(c, &pts, n, tol, false),
            Dependence::SiUinV => si(swap, &pts, n, tol, true),
            Dependence::SdUinV => si(swap, &pts, n, tol, false),
            Dependence::Tp2 => tp2(c, &pts, tol, true),
            Dependence::Rr2 => tp2(c, &pts, tol, false),
            Dependence::Pds => si(c, &pts, n, tol, true).and(si(swap, &pts, n, tol, true)),
            Dependence::Nds => si(c, &pts, n, tol, false).and(si(swap, &pts, n, tol, false)),
        })
    }
}

/// Free-function form of [`Copula::cond_tail_cdf`].
pub fn cond_tail_cdf(c: &Copula, u: f64, v: f64) -> Result<f64> {
    c.cond_tail_cdf(u, v)
}

/// Free-function form of [`Copula::cond_tail_quantile`].
pub fn cond_tail_quantile(c: &Copula, u: f64, p: f64) -> Result<f64> {
    c.cond_tail_quantile(u, p)
}

/// Free-function form of [`Copula::concordance_leq`].
pub fn concordance_leq(c1: &Copula, c2: &Copula, grid_size: usize) -> OrderVerdict {
    c1.concordance_leq(c2, grid_size)
}

/// Free-function form of [`Copula::check_dependence`].
pub fn check_dependence(c: &Copula, notion: Dependence, grid_size: usize) -> Result<OrderVerdict> {
    c.check_dependence(notion, grid_size)
}

fn check_threshold(u: f64) -> Result<()> {
    if u >= 1.0 {
        return Err(Error::DegenerateConditioning(u));
    }
    if !(u >= 0.0) {
        return Err(Error::Domain(format!(
            "threshold quantile {u} must lie in [0, 1)"
        )));
    }
    Ok(())
}

pub(crate) fn interior_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|i| i as f64 / (n + 1) as f64).collect()
}

// (a^theta + b^theta)^(1/theta), scaled to avoid overflow
fn gumbel_a(a: f64, b: f64, theta: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == 0.0 {
        return 0.0;
    }
    hi * ((lo / hi).powf(theta).ln_1p() / theta).exp()
}

// (a^theta + b^theta)^(1/theta) - a, without cancellation for b << a
fn gumbel_excess(a: f64, b: f64, theta: f64) -> f64 {
    if a == 0.0 {
        return b;
    }
    a * ((b / a).powf(theta).ln_1p() / theta).exp_m1()
}

fn gumbel_joint_tail(u: f64, v: f64, theta: f64) -> f64 {
    gumbel_tail_from_logs(u, v, -u.ln(), -v.ln(), theta)
}

fn gumbel_joint_tail_w(u: f64, w: f64, theta: f64) -> f64 {
    gumbel_tail_from_logs(u, 1.0 - w, -u.ln(), -(-w).ln_1p(), theta)
}

// Cbar = (1 - v) - u (1 - C/u) when u is the smaller coordinate, and the
// mirrored form otherwise; C/u = exp(-excess) keeps both forms exact.
fn gumbel_tail_from_logs(u: f64, v: f64, a: f64, b: f64, theta: f64) -> f64 {
    let r = if a >= b {
        let w = if v > 0.5 { -(-b).exp_m1() } else { 1.0 - v };
        w + u * (-gumbel_excess(a, b, theta)).exp_m1()
    } else {
        let uc = if u > 0.5 { -(-a).exp_m1() } else { 1.0 - u };
        uc + v * (-gumbel_excess(b, a, theta)).exp_m1()
    };
    r.max(0.0)
}

// v - C(u, v) without cancellation
fn gumbel_lower_gap(u: f64, v: f64, theta: f64) -> f64 {
    let (a, b) = (-u.ln(), -v.ln());
    let r = if b >= a {
        -v * (-gumbel_excess(b, a, theta)).exp_m1()
    } else {
        (v - u) - u * (-gumbel_excess(a, b, theta)).exp_m1()
    };
    r.max(0.0)
}

fn rti<F: Fn(f64, f64) -> f64>(tail: F, pts: &[f64], tol: f64, increasing: bool) -> OrderVerdict {
    // P(second > y | first > x) = tail(x, y) / (1 - x) monotone in x
    let mut t = Tally::new(tol);
    for &y in pts {
        let mut prev: Option<(f64, f64)> = None;
        for &x in pts {
            let r = tail(x, y) / (1.0 - x);
            if let Some((px, pr)) = prev {
                if increasing {
                    t.leq(&[px, x, y], pr, r);
                } else {
                    t.leq(&[px, x, y], r, pr);
                }
            }
            prev = Some((x, r));
        }
    }
    t.finish()
}

fn si<F: Fn(f64, f64) -> f64>(
    c: F,
    pts: &[f64],
    n: usize,
    tol: f64,
    increasing: bool,
) -> OrderVerdict {
    // P(V > v | U = u) = 1 - dC/du increasing in u means dC/du decreasing in u
    let h = 1.0 / (4.0 * n as f64);
    let mut t = Tally::new(tol);
    for &v in pts {
        let mut prev: Option<(f64, f64)> = None;
        for &u in pts {
            let d = (c(u + h, v) - c(u - h, v)) / (2.0 * h);
            if let Some((pu, pd)) = prev {
                if increasing {
                    t.leq(&[pu, u, v], d, pd);
                } else {
                    t.leq(&[pu, u, v], pd, d);
                }
            }
            prev = Some((u, d));
        }
    }
    t.finish()
}

fn tp2<F: Fn(f64, f64) -> f64>(c: F, pts: &[f64], tol: f64, positive: bool) -> OrderVerdict {
    let mut t = Tally::new(tol);
    for i in 0..pts.len() - 1 {
        let (u1, u2) = (pts[i], pts[i + 1]);
        for j in 0..pts.len() - 1 {
            let (v1, v2) = (pts[j], pts[j + 1]);
            let diag = c(u1, v1) * c(u2, v2);
            let anti = c(u1, v2) * c(u2, v1);
            if positive {
                t.leq(&[u1, u2, v1, v2], anti, diag);
            } else {
                t.leq(&[u1, u2, v1, v2], diag, anti);
            }
        }
    }
    t.finish()
}

/// Dependence notions; `VinU` reads "V is ... in U".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dependence {
    Pqd,
    Nqd,
    RtiVinU,
    RtdVinU,
    RtiUinV,
    RtdUinV,
    SiVinU,
    SdVinU,
    SiUinV,
    SdUinV,
    Tp2,
    Rr2,
    Pds,
    Nds,
}

impl Dependence {
    pub const ALL: [Dependence; 14] = [
        Dependence::Pqd,
        Dependence::Nqd,
        Dependence::RtiVinU,
        Dependence::RtdVinU,
        Dependence::RtiUinV,
        Dependence::RtdUinV,
        Dependence::SiVinU,
        Dependence::SdVinU,
        Dependence::SiUinV,
        Dependence::SdUinV,
        Dependence::Tp2,
        Dependence::Rr2,
        Dependence::Pds,
        Dependence::Nds,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Dependence::Pqd => "PQD",
            Dependence::Nqd => "NQD",
            Dependence::RtiVinU => "RTI_V_in_U",
            Dependence::RtdVinU => "RTD_V_in_U",
            Dependence::RtiUinV => "RTI_U_in_V",
            Dependence::RtdUinV => "RTD_U_in_V",
            Dependence::SiVinU => "SI_V_in_U",
            Dependence::SdVinU => "SD_V_in_U",
            Dependence::SiUinV => "SI_U_in_V",
            Dependence::SdUinV => "SD_U_in_V",
            Dependence::Tp2 => "TP2",
            Dependence::Rr2 => "RR2",
            Dependence::Pds => "PDS",
            Dependence::Nds => "NDS",
        }
    }
}

impl fmt::Display for Dependence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Dependence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        Dependence::ALL
            .iter()
            .copied()
            .find(|d| d.name().eq_ignore_ascii_case(t))
            .ok_or_else(|| Error::Domain(format!("unknown dependence notion {t:?}")))
    }
}

impl fmt::Display for Copula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            CopulaFamily::Gumbel { theta } => write!(f, "gumbel:{theta}"),
            CopulaFamily::Fgm { alpha } => write!(f, "fgm:{alpha}"),
            CopulaFamily::Independence => write!(f, "indep"),
            CopulaFamily::Comonotonic => write!(f, "comono"),
        }
    }
}

impl FromStr for Copula {
    type Err = Error;

    /// Parses `gumbel:2`, `fgm:-0.8`, `indep` and `comono`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let param = || -> Result<f64> {
            let a = arg.ok_or_else(|| Error::parse("copula", s, "missing parameter"))?;
            a.trim()
                .parse::<f64>()
                .map_err(|e| Error::parse("copula", s, e.to_string()))
        };
        let no_param = || -> Result<()> {
            match arg {
                None => Ok(()),
                Some(_) => Err(Error::parse("copula", s, "takes no parameter")),
            }
        };
        match name.to_ascii_lowercase().as_str() {
            "gumbel" => Copula::gumbel(param()?),
            "fgm" => Copula::fgm(param()?),
            "indep" | "independence" => no_param().map(|_| Copula::independence()),
            "comono" | "comonotonic" => no_param().map(|_| Copula::comonotonic()),
            other => Err(Error::parse(
                "copula",
                s,
                format!("unknown family {other:?}"),
            )),
        }
    }
}
