//! Distortion functions and the Stieltjes measures of their duals.
//!
//! A distortion `g` is an increasing map of `[0, 1]` onto itself with
//! `g(0) = 0` and `g(1) = 1`; its dual is `1 - g(1 - p)`. Every quantile
//! representation used in [`crate::riskcore`] integrates against `d(dual h)`,
//! so each family knows that measure in closed form: a point mass for the VaR
//! indicator and an absolutely continuous segment for the rest.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::level::Level;
use crate::quad::{integrate_vec, QuadConfig, Quadrature};
use crate::special::{norm_cdf, norm_level, norm_quantile, norm_sf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistortionKind {
    Var,
    Es,
    Power,
    DualPower,
    Wang,
    Identity,
}

/// Parametric family of a builtin distortion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// `1{p > 1 - alpha}`
    Var {
        alpha: f64,
    },
    /// `min(1, p / (1 - beta))`
    Es {
        beta: f64,
    },
    /// `p^gamma`
    Power {
        gamma: f64,
    },
    /// `1 - (1 - p)^k`
    DualPower {
        k: u32,
    },
    /// `Phi(Phi^-1(p) + lambda)`
    Wang {
        lambda: f64,
    },
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Continuity {
    LeftContinuous,
    RightContinuous,
    Continuous,
}

/// Analytic shape. `Linear` counts as both concave and convex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Concave,
    Convex,
    Linear,
    Neither,
}

impl Shape {
    pub fn is_concave(self) -> bool {
        matches!(self, Shape::Concave | Shape::Linear)
    }

    pub fn is_convex(self) -> bool {
        matches!(self, Shape::Convex | Shape::Linear)
    }

    fn flipped(self) -> Shape {
        match self {
            Shape::Concave => Shape::Convex,
            Shape::Convex => Shape::Concave,
            s => s,
        }
    }
}

impl Continuity {
    fn flipped(self) -> Continuity {
        match self {
            Continuity::LeftContinuous => Continuity::RightContinuous,
            Continuity::RightContinuous => Continuity::LeftContinuous,
            Continuity::Continuous => Continuity::Continuous,
        }
    }
}

/// A builtin distortion, possibly dualized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Distortion {
    family: Family,
    dual: bool,
    continuity: Continuity,
    shape: Shape,
}

fn check_open_unit(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::ParameterDomain(format!(
            "{name} = {x} must lie in (0, 1)"
        )))
    }
}

impl Distortion {
    pub fn new(family: Family) -> Result<Self> {
        let (continuity, shape) = match family {
            Family::Var { alpha } => {
                check_open_unit("alpha", alpha)?;
                (Continuity::LeftContinuous, Shape::Neither)
            }
            Family::Es { beta } => {
                check_open_unit("beta", beta)?;
                (Continuity::Continuous, Shape::Concave)
            }
            Family::Power { gamma } => {
                if !(gamma > 0.0 && gamma.is_finite()) {
                    return Err(Error::ParameterDomain(format!(
                        "power exponent {gamma} must be positive"
                    )));
                }
                let shape = if gamma == 1.0 {
                    Shape::Linear
                } else if gamma > 1.0 {
                    Shape::Convex
                } else {
                    Shape::Concave
                };
                (Continuity::Continuous, shape)
            }
            Family::DualPower { k } => {
                if k == 0 {
                    return Err(Error::ParameterDomain(
                        "dual-power order must be a positive integer".into(),
                    ));
                }
                let shape = if k == 1 {
                    Shape::Linear
                } else {
                    Shape::Concave
                };
                (Continuity::Continuous, shape)
            }
            Family::Wang { lambda } => {
                if !lambda.is_finite() {
                    return Err(Error::ParameterDomain(format!(
                        "wang shift {lambda} must be finite"
                    )));
                }
                let shape = if lambda > 0.0 {
                    Shape::Concave
                } else if lambda < 0.0 {
                    Shape::Convex
                } else {
                    Shape::Linear
                };
                (Continuity::Continuous, shape)
            }
            Family::Identity => (Continuity::Continuous, Shape::Linear),
        };
        Ok(Distortion {
            family,
            dual: false,
            continuity,
            shape,
        })
    }

    pub fn var(alpha: f64) -> Result<Self> {
        Self::new(Family::Var { alpha })
    }

    pub fn es(beta: f64) -> Result<Self> {
        Self::new(Family::Es { beta })
    }

    pub fn power(gamma: f64) -> Result<Self> {
        Self::new(Family::Power { gamma })
    }

    pub fn dual_power(k: u32) -> Result<Self> {
        Self::new(Family::DualPower { k })
    }

    pub fn wang(lambda: f64) -> Result<Self> {
        Self::new(Family::Wang { lambda })
    }

    pub fn identity() -> Self {
        Distortion {
            family: Family::Identity,
            dual: false,
            continuity: Continuity::Continuous,
            shape: Shape::Linear,
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn kind(&self) -> DistortionKind {
        match self.family {
            Family::Var { .. } => DistortionKind::Var,
            Family::Es { .. } => DistortionKind::Es,
            Family::Power { .. } => DistortionKind::Power,
            Family::DualPower { .. } => DistortionKind::DualPower,
            Family::Wang { .. } => DistortionKind::Wang,
            Family::Identity => DistortionKind::Identity,
        }
    }

    /// True if this value is the dual of its family member.
    pub fn is_dual(&self) -> bool {
        self.dual
    }

    pub fn continuity(&self) -> Continuity {
        self.continuity
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn dual(&self) -> Distortion {
        Distortion {
            family: self.family,
            dual: !self.dual,
            continuity: self.continuity.flipped(),
            shape: self.shape.flipped(),
        }
    }

    pub fn eval(&self, p: f64) -> f64 {
        if self.dual {
            base_dual_eval(self.family, p)
        } else {
            base_eval(self.family, p)
        }
    }

    /// `1 - eval(1 - p)`, evaluated without cancellation.
    pub fn eval_dual(&self, p: f64) -> f64 {
        if self.dual {
            base_eval(self.family, p)
        } else {
            base_dual_eval(self.family, p)
        }
    }

    /// Points of `[0, 1]` where `eval` jumps or has a kink.
    pub fn breakpoints(&self) -> Vec<f64> {
        let pts = match self.family {
            Family::Var { alpha } => vec![1.0 - alpha],
            Family::Es { beta } => vec![1.0 - beta],
            _ => vec![],
        };
        if self.dual {
            pts.into_iter().map(|p| 1.0 - p).collect()
        } else {
            pts
        }
    }

    /// Inverse of the dual distortion, `inf{p : eval_dual(p) >= t}`.
    ///
    /// Defined only when the dual is continuous; the VaR indicator has no
    /// usable inverse and yields a domain error.
    pub fn dual_inverse(&self, t: f64) -> Result<f64> {
        if matches!(self.family, Family::Var { .. }) {
            return Err(Error::Domain(
                "the dual of an indicator distortion is not invertible".into(),
            ));
        }
        let t = t.clamp(0.0, 1.0);
        Ok(if self.dual {
            base_inverse(self.family, t)
        } else {
            1.0 - base_inverse(self.family, 1.0 - t)
        })
    }

    /// Exact Stieltjes decomposition of `d(dual of self)`.
    pub fn dual_measure(&self) -> StieltjesMeasure {
        if self.dual {
            base_measure(self.family)
        } else {
            base_dual_measure(self.family)
        }
    }

    /// True iff `self <= other` at every point of the uniform grid `i / grid_size`.
    pub fn dominates(&self, other: &Distortion, grid_size: usize) -> bool {
        let n = grid_size.max(2);
        (0..=n).all(|i| {
            let p = i as f64 / n as f64;
            self.eval(p) <= other.eval(p)
        })
    }
}

/// Free-function form of [`Distortion::new`] taking a kind and raw parameters.
pub fn build_distortion(kind: DistortionKind, params: &[f64]) -> Result<Distortion> {
    let want = |n: usize| -> Result<()> {
        if params.len() == n {
            Ok(())
        } else {
            Err(Error::ParameterDomain(format!(
                "{kind:?} takes {n} parameter(s), got {}",
                params.len()
            )))
        }
    };
    match kind {
        DistortionKind::Var => {
            want(1)?;
            Distortion::var(params[0])
        }
        DistortionKind::Es => {
            want(1)?;
            Distortion::es(params[0])
        }
        DistortionKind::Power => {
            want(1)?;
            Distortion::power(params[0])
        }
        DistortionKind::DualPower => {
            want(1)?;
            let k = params[0];
            if k < 1.0 || k.fract() != 0.0 || k > u32::MAX as f64 {
                return Err(Error::ParameterDomain(format!(
                    "dual-power order {k} must be a positive integer"
                )));
            }
            Distortion::dual_power(k as u32)
        }
        DistortionKind::Wang => {
            want(1)?;
            Distortion::wang(params[0])
        }
        DistortionKind::Identity => {
            want(0)?;
            Ok(Distortion::identity())
        }
    }
}

/// Free-function form of [`Distortion::dual`].
pub fn dual(d: &Distortion) -> Distortion {
    d.dual()
}

/// Free-function form of [`Distortion::dual_measure`].
pub fn dual_measure(d: &Distortion) -> StieltjesMeasure {
    d.dual_measure()
}

/// Free-function form of [`Distortion::dominates`].
pub fn dominates(d: &Distortion, d2: &Distortion, grid_size: usize) -> bool {
    d.dominates(d2, grid_size)
}

fn base_eval(f: Family, p: f64) -> f64 {
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    match f {
        Family::Var { alpha } => {
            if p > 1.0 - alpha {
                1.0
            } else {
                0.0
            }
        }
        Family::Es { beta } => (p / (1.0 - beta)).min(1.0),
        Family::Power { gamma } => p.powf(gamma),
        Family::DualPower { k } => -(k as f64 * (-p).ln_1p()).exp_m1(),
        Family::Wang { lambda } => wang_eval(lambda, p),
        Family::Identity => p,
    }
}

fn base_dual_eval(f: Family, p: f64) -> f64 {
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    match f {
        Family::Var { alpha } => {
            if p >= alpha {
                1.0
            } else {
                0.0
            }
        }
        Family::Es { beta } => ((p - beta) / (1.0 - beta)).max(0.0),
        Family::Power { gamma } => -(gamma * (-p).ln_1p()).exp_m1(),
        Family::DualPower { k } => p.powi(k as i32),
        Family::Wang { lambda } => wang_eval(-lambda, p),
        Family::Identity => p,
    }
}

// Inverse of the base function on (0, 1); Var never reaches here.
fn base_inverse(f: Family, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    match f {
        Family::Var { .. } => unreachable!("indicator distortions are not inverted"),
        Family::Es { beta } => t * (1.0 - beta),
        Family::Power { gamma } => t.powf(1.0 / gamma),
        Family::DualPower { k } => -((-t).ln_1p() / k as f64).exp_m1(),
        Family::Wang { lambda } => wang_eval(-lambda, t),
        Family::Identity => t,
    }
}

fn wang_eval(shift: f64, p: f64) -> f64 {
    let z = norm_quantile(Level::from_lower(p)) + shift;
    norm_cdf(z)
}

fn unit_segment(density: SegmentDensity) -> StieltjesMeasure {
    StieltjesMeasure {
        atoms: vec![],
        segments: vec![Segment {
            lo: 0.0,
            hi: 1.0,
            mass: 1.0,
            density,
        }],
    }
}

fn base_measure(f: Family) -> StieltjesMeasure {
    match f {
        Family::Var { alpha } => StieltjesMeasure::atom(1.0 - alpha),
        Family::Es { beta } => StieltjesMeasure::uniform(0.0, 1.0 - beta),
        Family::Power { gamma } => unit_segment(SegmentDensity::HeadPower { gamma }),
        Family::DualPower { k } => unit_segment(SegmentDensity::TailPower { gamma: k as f64 }),
        Family::Wang { lambda } => unit_segment(SegmentDensity::WangShift { shift: lambda }),
        Family::Identity => StieltjesMeasure::uniform(0.0, 1.0),
    }
}

fn base_dual_measure(f: Family) -> StieltjesMeasure {
    match f {
        Family::Var { alpha } => StieltjesMeasure::atom(alpha),
        Family::Es { beta } => StieltjesMeasure::uniform(beta, 1.0),
        Family::Power { gamma } => unit_segment(SegmentDensity::TailPower { gamma }),
        Family::DualPower { k } => unit_segment(SegmentDensity::HeadPower { gamma: k as f64 }),
        Family::Wang { lambda } => unit_segment(SegmentDensity::WangShift { shift: -lambda }),
        Family::Identity => StieltjesMeasure::uniform(0.0, 1.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

/// Closed-form densities on a segment, each with an explicit inverse of its
/// cumulative mass so integrals can run in the mass coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SegmentDensity {
    /// Constant density `mass / (hi - lo)`.
    Uniform,
    /// Cumulative `p^gamma` on (0, 1).
    HeadPower { gamma: f64 },
    /// Cumulative `1 - (1 - p)^gamma` on (0, 1).
    TailPower { gamma: f64 },
    /// Cumulative `Phi(Phi^-1(p) + shift)` on (0, 1).
    WangShift { shift: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub mass: f64,
    pub density: SegmentDensity,
}

impl Segment {
    pub fn density_at(&self, p: f64) -> f64 {
        self.density_at_level(Level::from_lower(p))
    }

    /// Density at a level, using whichever side of the level is precise.
    pub fn density_at_level(&self, level: Level) -> f64 {
        let p = level.lower();
        if p <= self.lo || level.upper() <= 1.0 - self.hi {
            return 0.0;
        }
        match self.density {
            SegmentDensity::Uniform => self.mass / (self.hi - self.lo),
            SegmentDensity::HeadPower { gamma } => self.mass * gamma * p.powf(gamma - 1.0),
            SegmentDensity::TailPower { gamma } => {
                self.mass * gamma * level.upper().powf(gamma - 1.0)
            }
            SegmentDensity::WangShift { shift } => {
                let z = norm_quantile(level);
                self.mass * (-shift * z - 0.5 * shift * shift).exp()
            }
        }
    }

    /// Mass of `(lo, p]`.
    pub fn cumulative(&self, p: f64) -> f64 {
        if p <= self.lo {
            return 0.0;
        }
        if p >= self.hi {
            return self.mass;
        }
        let frac = match self.density {
            SegmentDensity::Uniform => (p - self.lo) / (self.hi - self.lo),
            SegmentDensity::HeadPower { gamma } => p.powf(gamma),
            SegmentDensity::TailPower { gamma } => -(gamma * (-p).ln_1p()).exp_m1(),
            SegmentDensity::WangShift { shift } => wang_eval(shift, p),
        };
        self.mass * frac
    }

    /// Point whose mass measured from `lo` equals `m`.
    fn at_mass(&self, m: f64) -> Level {
        let f = m / self.mass;
        match self.density {
            SegmentDensity::Uniform => {
                let width = self.hi - self.lo;
                Level::from_parts(self.lo + width * f, (1.0 - self.lo) - width * f)
            }
            SegmentDensity::HeadPower { gamma } => {
                Level::from_lower(f.powf(1.0 / gamma).max(f64::MIN_POSITIVE))
            }
            SegmentDensity::TailPower { gamma } => {
                let l = (-f).ln_1p() / gamma;
                Level::from_parts(-l.exp_m1(), l.exp())
            }
            SegmentDensity::WangShift { shift } => {
                norm_level(norm_quantile(Level::from_lower(f)) - shift)
            }
        }
    }

    /// Point whose mass measured back from `hi` equals `r`.
    fn at_remaining(&self, r: f64) -> Level {
        let f = r / self.mass;
        match self.density {
            SegmentDensity::Uniform => {
                let width = self.hi - self.lo;
                Level::from_parts(self.hi - width * f, (1.0 - self.hi) + width * f)
            }
            SegmentDensity::HeadPower { gamma } => {
                let l = (-f).ln_1p() / gamma;
                Level::from_parts(l.exp(), -l.exp_m1())
            }
            SegmentDensity::TailPower { gamma } => {
                Level::from_upper(f.powf(1.0 / gamma).max(f64::MIN_POSITIVE))
            }
            SegmentDensity::WangShift { shift } => {
                // 1 - Phi(z + shift) = f
                let z = -norm_quantile(Level::from_lower(f)) - shift;
                let q = norm_sf(z).max(f64::MIN_POSITIVE);
                Level::from_parts(norm_cdf(z), q)
            }
        }
    }
}

/// Atoms plus absolutely continuous segments on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StieltjesMeasure {
    pub atoms: Vec<Atom>,
    pub segments: Vec<Segment>,
}

impl StieltjesMeasure {
    pub fn atom(location: f64) -> Self {
        StieltjesMeasure {
            atoms: vec![Atom {
                location,
                mass: 1.0,
            }],
            segments: vec![],
        }
    }

    pub fn uniform(lo: f64, hi: f64) -> Self {
        StieltjesMeasure {
            atoms: vec![],
            segments: vec![Segment {
                lo,
                hi,
                mass: 1.0,
                density: SegmentDensity::Uniform,
            }],
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum::<f64>()
            + self.segments.iter().map(|s| s.mass).sum::<f64>()
    }

    /// Density of the continuous part at `p`.
    pub fn density(&self, p: f64) -> f64 {
        self.segments.iter().map(|s| s.density_at(p)).sum()
    }

    /// Checks the structural invariants: ordered, non-overlapping segments and
    /// atoms that do not sit strictly inside a segment.
    pub fn validate(&self) -> Result<()> {
        let mut segs = self.segments.clone();
        segs.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        for s in &segs {
            if !(s.lo < s.hi && s.lo >= 0.0 && s.hi <= 1.0 && s.mass > 0.0) {
                return Err(Error::Domain(format!("malformed segment {s:?}")));
            }
        }
        for w in segs.windows(2) {
            if w[1].lo < w[0].hi {
                return Err(Error::Domain("overlapping segments".into()));
            }
        }
        for a in &self.atoms {
            if !(a.mass > 0.0 && (0.0..=1.0).contains(&a.location)) {
                return Err(Error::Domain(format!("malformed atom {a:?}")));
            }
            if segs.iter().any(|s| a.location > s.lo && a.location < s.hi) {
                return Err(Error::Domain(format!(
                    "atom at {} lies inside a segment",
                    a.location
                )));
            }
        }
        Ok(())
    }

    /// Integrates `f` against the measure. Continuous parts are integrated in
    /// the cumulative-mass coordinate, split at half mass so that points near
    /// either end of `[0, 1]` are produced from the small side.
    pub fn integrate<const N: usize, F>(&self, mut f: F, cfg: &QuadConfig) -> Result<Quadrature<N>>
    where
        F: FnMut(Level) -> Result<[f64; N]>,
    {
        let mut out = Quadrature {
            value: [0.0; N],
            error: 0.0,
            evaluations: 0,
        };
        for atom in &self.atoms {
            let v = f(Level::from_lower(atom.location))?;
            for k in 0..N {
                out.value[k] += atom.mass * v[k];
            }
            out.evaluations += 1;
        }
        // the error budget is shared by both halves of every segment
        let pieces = (2 * self.segments.len()).max(1) as f64;
        let cfg = &QuadConfig {
            abs_tol: cfg.abs_tol / pieces,
            ..*cfg
        };
        for seg in &self.segments {
            let half = 0.5 * seg.mass;
            let lower = integrate_vec(|m| f(seg.at_mass(m)), 0.0, half, cfg)?;
            let upper = integrate_vec(|r| f(seg.at_remaining(r)), 0.0, half, cfg)?;
            for k in 0..N {
                out.value[k] += lower.value[k] + upper.value[k];
            }
            out.error += lower.error + upper.error;
            out.evaluations += lower.evaluations + upper.evaluations;
        }
        Ok(out)
    }
}

impl fmt::Display for Distortion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dual {
            write!(f, "dual:")?;
        }
        match self.family {
            Family::Var { alpha } => write!(f, "var:{alpha}"),
            Family::Es { beta } => write!(f, "es:{beta}"),
            Family::Power { gamma } => write!(f, "power:{gamma}"),
            Family::DualPower { k } => write!(f, "dualpower:{k}"),
            Family::Wang { lambda } => write!(f, "wang:{lambda}"),
            Family::Identity => write!(f, "id"),
        }
    }
}

impl FromStr for Distortion {
    type Err = Error;

    /// Parses `var:0.95`, `es:0.9`, `power:2.5`, `dualpower:3`, `wang:0.5`,
    /// `id`, optionally prefixed by `dual:`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("dual:") {
            return Ok(rest.parse::<Distortion>()?.dual());
        }
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let kind = match name.to_ascii_lowercase().as_str() {
            "var" => DistortionKind::Var,
            "es" => DistortionKind::Es,
            "power" => DistortionKind::Power,
            "dualpower" | "dual_power" => DistortionKind::DualPower,
            "wang" => DistortionKind::Wang,
            "id" | "identity" => DistortionKind::Identity,
            other => {
                return Err(Error::parse(
                    "distortion",
                    s,
                    format!("unknown family {other:?}"),
                ))
            }
        };
        let params = match arg {
            None => vec![],
            Some(a) => a
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::parse("distortion", s, e.to_string()))
                })
                .collect::<Result<Vec<_>>>()?,
        };
        build_distortion(kind, &params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_builtin() -> Vec<Distortion> {
        vec![
            Distortion::var(0.95).unwrap(),
            Distortion::es(0.9).unwrap(),
            Distortion::power(0.3).unwrap(),
            Distortion::power(2.5).unwrap(),
            Distortion::dual_power(3).unwrap(),
            Distortion::wang(0.5).unwrap(),
            Distortion::wang(-0.7).unwrap(),
            Distortion::identity(),
        ]
    }

    #[test]
    fn build_examples() {
        let id = Distortion::power(1.0).unwrap();
        for i in 0..=100 {
            let p = i as f64 / 100.0;
            assert!((id.eval(p) - p).abs() < 1e-15);
        }
        let v = Distortion::var(0.95).unwrap();
        assert_eq!(v.eval(0.04), 0.0);
        assert_eq!(v.eval(0.06), 1.0);
        assert!((Distortion::es(0.9).unwrap().eval(0.05) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn metadata() {
        let v = Distortion::var(0.9).unwrap();
        assert_eq!(v.continuity(), Continuity::LeftContinuous);
        assert_eq!(v.dual().continuity(), Continuity::RightContinuous);
        assert_eq!(Distortion::es(0.9).unwrap().shape(), Shape::Concave);
        assert_eq!(Distortion::dual_power(3).unwrap().shape(), Shape::Concave);
        assert_eq!(Distortion::power(2.0).unwrap().shape(), Shape::Convex);
        assert_eq!(Distortion::power(0.5).unwrap().shape(), Shape::Concave);
        assert_eq!(
            Distortion::power(0.5).unwrap().dual().shape(),
            Shape::Convex
        );
        assert!(Distortion::power(1.0).unwrap().shape().is_convex());
    }

    #[test]
    fn parameter_domain_errors() {
        assert!(matches!(
            Distortion::var(1.0),
            Err(Error::ParameterDomain(_))
        ));
        assert!(matches!(
            Distortion::es(0.0),
            Err(Error::ParameterDomain(_))
        ));
        assert!(matches!(
            Distortion::power(-1.0),
            Err(Error::ParameterDomain(_))
        ));
        assert!(matches!(
            Distortion::dual_power(0),
            Err(Error::ParameterDomain(_))
        ));
        assert!(build_distortion(DistortionKind::DualPower, &[2.5]).is_err());
        assert!(build_distortion(DistortionKind::Power, &[]).is_err());
    }

    #[test]
    fn dual_examples() {
        let id = Distortion::identity();
        assert_eq!(id.dual().eval(0.3), id.eval(0.3));
        let v = Distortion::var(0.8).unwrap().dual();
        assert_eq!(v.eval(0.7999), 0.0);
        assert_eq!(v.eval(0.8), 1.0);
        assert_eq!(v.eval(0.9), 1.0);
        let dp = Distortion::dual_power(3).unwrap().dual();
        for i in 0..=50 {
            let p = i as f64 / 50.0;
            assert!((dp.eval(p) - p.powi(3)).abs() < 1e-14);
        }
    }

    #[test]
    fn invariants_on_grid() {
        for d in all_builtin() {
            assert_eq!(d.eval(0.0), 0.0, "{d}");
            assert_eq!(d.eval(1.0), 1.0, "{d}");
            let mut prev = 0.0;
            for i in 0..=1000 {
                let p = i as f64 / 1000.0;
                let v = d.eval(p);
                assert!(v >= prev, "{d} not monotone at {p}");
                prev = v;
                let dd = d.dual().dual();
                assert!((dd.eval(p) - v).abs() <= 1e-12);
                let direct = 1.0 - d.eval(1.0 - p);
                assert!(
                    (d.dual().eval(p) - direct).abs() <= 1e-12,
                    "{d} dual at {p}"
                );
            }
        }
    }

    #[test]
    fn shape_flag_agrees_with_second_differences() {
        let n = 1000;
        for d in all_builtin().into_iter().flat_map(|d| [d, d.dual()]) {
            if d.kind() == DistortionKind::Var {
                continue;
            }
            let vals: Vec<f64> = (0..=n).map(|i| d.eval(i as f64 / n as f64)).collect();
            let second: Vec<f64> = vals.windows(3).map(|w| w[2] - 2.0 * w[1] + w[0]).collect();
            if d.shape().is_concave() {
                assert!(second.iter().all(|&s| s <= 1e-12), "{d} flagged concave");
            }
            if d.shape().is_convex() {
                assert!(second.iter().all(|&s| s >= -1e-12), "{d} flagged convex");
            }
        }
    }

    #[test]
    fn dual_measure_examples() {
        let m = Distortion::var(0.95).unwrap().dual_measure();
        assert_eq!(
            m.atoms,
            vec![Atom {
                location: 0.95,
                mass: 1.0
            }]
        );
        assert!(m.segments.is_empty());

        let m = Distortion::es(0.9).unwrap().dual_measure();
        assert!(m.atoms.is_empty());
        assert_eq!(m.segments.len(), 1);
        assert!((m.density(0.95) - 10.0).abs() < 1e-12);
        assert_eq!(m.density(0.85), 0.0);

        let m = Distortion::identity().dual_measure();
        assert!((m.density(0.3) - 1.0).abs() < 1e-15);

        let m = Distortion::power(2.5).unwrap().dual_measure();
        assert!((m.density(0.4) - 2.5 * 0.6f64.powf(1.5)).abs() < 1e-12);
        let m = Distortion::dual_power(3).unwrap().dual_measure();
        assert!((m.density(0.4) - 3.0 * 0.16).abs() < 1e-12);
        for d in all_builtin() {
            d.dual_measure().validate().unwrap();
        }
    }

    #[test]
    fn measure_density_is_derivative_of_dual() {
        // central differences of eval_dual reproduce the closed-form density
        for d in all_builtin() {
            if d.kind() == DistortionKind::Var {
                continue;
            }
            let m = d.dual_measure();
            for &p in &[0.1, 0.37, 0.5, 0.8, 0.97] {
                if d.breakpoints().iter().any(|b| (b - p).abs() < 1e-3) {
                    continue;
                }
                let h = 1e-6;
                let fd = (d.eval_dual(p + h) - d.eval_dual(p - h)) / (2.0 * h);
                assert!(
                    (fd - m.density(p)).abs() < 1e-5 * (1.0 + fd.abs()),
                    "{d} at {p}"
                );
            }
        }
    }

    #[test]
    fn dual_measure_total_mass_by_quadrature() {
        let cfg = QuadConfig::default();
        for d in all_builtin() {
            let m = d.dual_measure();
            let mut total: f64 = m.atoms.iter().map(|a| a.mass).sum();
            for s in &m.segments {
                // plain integration in p, split at the midpoint; the upper half
                // runs in the complement so the p -> 1 singularities stay resolved
                let mid = 0.5 * (s.lo + s.hi);
                let lower = crate::quad::integrate(|p| s.density_at(p), s.lo, mid, &cfg).unwrap();
                let upper = crate::quad::integrate(
                    |q| s.density_at_level(Level::from_upper(q)),
                    1.0 - s.hi,
                    1.0 - mid,
                    &cfg,
                )
                .unwrap();
                total += lower.value[0] + upper.value[0];
            }
            assert!((total - 1.0).abs() < 1e-8, "{d}: {total}");
            assert!((m.total_mass() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn identity_measure_mean_is_half() {
        let m = Distortion::identity().dual_measure();
        let q = m
            .integrate(|l| Ok([l.lower()]), &QuadConfig::default())
            .unwrap();
        assert!((q.value[0] - 0.5).abs() < 1e-10);
    }

    #[test]
    fn mass_coordinate_matches_cumulative() {
        for d in all_builtin() {
            for s in d.dual_measure().segments {
                for &m in &[1e-9, 0.01, 0.2, 0.45] {
                    let l = s.at_mass(m * s.mass);
                    assert!(
                        (s.cumulative(l.lower()) - m * s.mass).abs() < 1e-9,
                        "{d} m={m}"
                    );
                    assert!((l.lower() + l.upper() - 1.0).abs() < 1e-15);
                    if m < 1e-3 {
                        continue;
                    }
                    let l = s.at_remaining(m * s.mass);
                    let back = s.mass - s.cumulative(l.lower());
                    assert!((back - m * s.mass).abs() < 1e-9, "{d} r={m}: {back}");
                }
            }
        }
    }

    #[test]
    fn remaining_side_keeps_tiny_complements() {
        let s = Distortion::power(0.3).unwrap().dual_measure().segments[0];
        let l = s.at_remaining(1e-9);
        let want = 1e-9f64.powf(1.0 / 0.3);
        assert!((l.upper() / want - 1.0).abs() < 1e-12);
        let s = Distortion::dual_power(4).unwrap().dual_measure().segments[0];
        let l = s.at_remaining(1e-12);
        // 1 - p^4 = r  =>  1 - p ~ r / 4
        assert!((l.upper() / 2.5e-13 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn dominates_examples() {
        let p5 = Distortion::power(5.0).unwrap();
        let p2 = Distortion::power(2.0).unwrap();
        assert!(p5.dominates(&p2, 1000));
        assert!(!p2.dominates(&p5, 1000));
        for d in all_builtin() {
            assert!(d.dominates(&d, 100));
        }
        let v5 = Distortion::var(0.5).unwrap();
        let v9 = Distortion::var(0.9).unwrap();
        // 1{p > 0.5} <= 1{p > 0.1}, strict on (0.1, 0.5]
        assert!(v5.dominates(&v9, 1000));
        assert!(!v9.dominates(&v5, 1000));
    }

    #[test]
    fn dual_inverse_round_trip() {
        for d in all_builtin() {
            if d.kind() == DistortionKind::Var {
                assert!(d.dual_inverse(0.5).is_err());
                continue;
            }
            for &t in &[0.05, 0.3, 0.6, 0.99] {
                let p = d.dual_inverse(t).unwrap();
                assert!((d.eval_dual(p) - t).abs() < 1e-10, "{d} t={t}");
            }
        }
    }

    #[test]
    fn parse_and_display() {
        for s in [
            "var:0.95",
            "es:0.9",
            "power:2.5",
            "dualpower:3",
            "wang:0.5",
            "id",
            "dual:power:1.1",
        ] {
            let d: Distortion = s.parse().unwrap();
            assert_eq!(d.to_string(), s);
        }
        assert!("foo:1".parse::<Distortion>().is_err());
        assert!("power:x".parse::<Distortion>().is_err());
    }
}
