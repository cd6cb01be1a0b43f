//! Distortion risk measures, conditional distortion (CoD) risk measures and
//! the two distortion risk contribution measures.
//!
//! For a model `(C, F, G)` with threshold quantile `u_g = F(D_g[X])`:
//!
//! ```text
//! CoD_{g,h}[Y|X]   = int_0^1 G^-1(F^-1_{V|U>u_g}(p)) d hbar(p)
//! dCoD_{g,h}[Y|X]  = int_0^1 [G^-1(F^-1_{V|U>u_g}(p)) - G^-1(p)] d hbar(p)
//! dCoD^{g~}[Y|X]   = int_0^1 [G^-1(F^-1_{V|U>u_g}(p)) - G^-1(F^-1_{V|U>u_g~}(p))] d hbar(p)
//! ```
//!
//! Contributions are integrated as single integrals of differences.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::copula::{Copula, CopulaFamily};
use crate::distortion::{Continuity, Distortion};
use crate::error::{Error, Result};
use crate::level::Level;
use crate::marginal::Marginal;
use crate::quad::{integrate_with_breaks, QuadConfig, Quadrature};
use crate::verdict::{OrderVerdict, Tally};

/// A copula joined with the marginals of `X` (conditioning) and `Y` (target).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BivariateModel {
    pub copula: Copula,
    pub marginal_x: Marginal,
    pub marginal_y: Marginal,
}

impl BivariateModel {
    pub fn new(copula: Copula, marginal_x: Marginal, marginal_y: Marginal) -> Self {
        BivariateModel {
            copula,
            marginal_x,
            marginal_y,
        }
    }

    /// The model of `(Y, X)`. Valid as is because every builtin copula is exchangeable.
    pub fn swapped(&self) -> Self {
        BivariateModel {
            copula: self.copula,
            marginal_x: self.marginal_y,
            marginal_y: self.marginal_x,
        }
    }

    pub fn joint_cdf(&self, x: f64, y: f64) -> f64 {
        self.copula
            .cdf(self.marginal_x.cdf(x), self.marginal_y.cdf(y))
    }
}

impl fmt::Display for BivariateModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.copula, self.marginal_x, self.marginal_y)
    }
}

impl FromStr for BivariateModel {
    type Err = Error;

    /// Parses `copula,marginal_x,marginal_y`, e.g. `gumbel:2,normal:0,1,gamma:0.5,1`.
    fn from_str(s: &str) -> Result<Self> {
        let mut groups: Vec<String> = Vec::new();
        for tok in s.split(',') {
            let t = tok.trim();
            let keyword = matches!(
                t.to_ascii_lowercase().as_str(),
                "indep" | "independence" | "comono" | "comonotonic"
            );
            if t.contains(':') || keyword || groups.is_empty() {
                groups.push(t.to_string());
            } else {
                let last = groups.last_mut().expect("non-empty");
                last.push(',');
                last.push_str(t);
            }
        }
        if groups.len() != 3 {
            return Err(Error::parse(
                "model",
                s,
                format!(
                    "expected copula,marginal_x,marginal_y, found {} part(s)",
                    groups.len()
                ),
            ));
        }
        Ok(BivariateModel {
            copula: groups[0].parse()?,
            marginal_x: groups[1].parse()?,
            marginal_y: groups[2].parse()?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub err_estimate: f64,
    pub evaluations: usize,
    pub root_finds: usize,
    /// The two integrals whose difference a contribution measure reports.
    pub terms: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskResult {
    pub value: f64,
    pub u_g: f64,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicMeasures {
    pub covar: f64,
    pub coes: f64,
    pub mes: f64,
}

/// Numerical settings shared by all risk computations.
#[derive(Debug, Clone, Copy)]
pub struct Engine {
    pub quad: QuadConfig,
    /// Allowed gap between the tail-integral and quantile routes of `D_g`.
    pub cross_check: f64,
}

impl Default for Engine {
    fn default() -> Self {
        Engine {
            quad: QuadConfig::default(),
            cross_check: 1e-6,
        }
    }
}

impl Engine {
    pub fn with_tolerance(abs_tol: f64) -> Self {
        Engine {
            quad: QuadConfig::with_abs_tol(abs_tol),
            ..Default::default()
        }
    }

    /// `D_g[X]` by the tail integral, cross-checked against `int F^-1 d gbar`.
    pub fn distortion_measure(&self, g: &Distortion, m: &Marginal) -> Result<f64> {
        let tail = self.tail_integral(g, m)?;
        let quantile = self.quantile_integral(g, m)?;
        let tol = self.cross_check * tail.abs().max(1.0);
        if !((tail - quantile).abs() <= tol) {
            return Err(Error::NumericalInconsistency {
                what: format!("D[{g}] of {m} by tail and quantile integrals"),
                first: tail,
                second: quantile,
            });
        }
        Ok(tail)
    }

    /// `-int_{-inf}^0 [1 - g(sf)] + int_0^inf g(sf)`.
    pub fn tail_integral(&self, g: &Distortion, m: &Marginal) -> Result<f64> {
        let (lo, hi) = m.support();
        let mut breaks: Vec<f64> = g
            .breakpoints()
            .into_iter()
            .map(|p| m.quantile_level(Level::from_upper(p)))
            .collect();
        breaks.push(lo);
        breaks.push(hi);
        breaks.push(m.quantile_level(Level::from_lower(0.5)));
        let neg = if lo < 0.0 {
            integrate_with_breaks(
                |t| g.eval_dual(m.cdf(t)),
                f64::NEG_INFINITY,
                0.0,
                &breaks,
                &self.quad,
            )?
            .value[0]
        } else {
            0.0
        };
        let pos = if hi > 0.0 {
            integrate_with_breaks(|t| g.eval(m.sf(t)), 0.0, f64::INFINITY, &breaks, &self.quad)?
                .value[0]
        } else {
            0.0
        };
        Ok(pos - neg)
    }

    /// `int_0^1 F^-1(p) d gbar(p)`.
    pub fn quantile_integral(&self, g: &Distortion, m: &Marginal) -> Result<f64> {
        let q = g
            .dual_measure()
            .integrate(|l| Ok([m.quantile_level(l)]), &self.quad)?;
        Ok(q.value[0])
    }

    pub fn threshold_quantile(&self, g: &Distortion, m: &Marginal) -> Result<f64> {
        Ok(m.cdf(self.distortion_measure(g, m)?))
    }

    pub fn cod(
        &self,
        model: &BivariateModel,
        g: &Distortion,
        h: &Distortion,
    ) -> Result<RiskResult> {
        let u = self.threshold_quantile(g, &model.marginal_x)?;
        self.cod_at(model, u, h)
    }

    /// CoD with the threshold quantile supplied directly.
    pub fn cod_at(&self, model: &BivariateModel, u_g: f64, h: &Distortion) -> Result<RiskResult> {
        check_inputs(u_g, h)?;
        let (c, y) = (&model.copula, &model.marginal_y);
        let q = h.dual_measure().integrate(
            |l| Ok([y.quantile_level(c.cond_tail_quantile_level(u_g, l)?)]),
            &self.quad,
        )?;
        Ok(result(q.value[0], u_g, &q, c, 1, None))
    }

    pub fn delta_cod(
        &self,
        model: &BivariateModel,
        g: &Distortion,
        h: &Distortion,
    ) -> Result<RiskResult> {
        let u = self.threshold_quantile(g, &model.marginal_x)?;
        self.delta_cod_at(model, u, h)
    }

    /// Type-I contribution `CoD - D_h[Y]` as one integral of differences.
    pub fn delta_cod_at(
        &self,
        model: &BivariateModel,
        u_g: f64,
        h: &Distortion,
    ) -> Result<RiskResult> {
        check_inputs(u_g, h)?;
        let (c, y) = (&model.copula, &model.marginal_y);
        let q = h.dual_measure().integrate(
            |l| {
                let cond = y.quantile_level(c.cond_tail_quantile_level(u_g, l)?);
                let base = y.quantile_level(l);
                Ok([cond - base, cond, base])
            },
            &self.quad,
        )?;
        let terms = Some([q.value[1], q.value[2]]);
        Ok(result(q.value[0], u_g, &q, c, 1, terms))
    }

    pub fn delta_cod_type2(
        &self,
        model: &BivariateModel,
        g: &Distortion,
        g_tilde: &Distortion,
        h: &Distortion,
    ) -> Result<RiskResult> {
        let u = self.threshold_quantile(g, &model.marginal_x)?;
        let u_tilde = self.threshold_quantile(g_tilde, &model.marginal_x)?;
        self.delta_cod_type2_at(model, u, u_tilde, h)
    }

    /// Type-II contribution between thresholds `u_g` and `u_tilde`.
    pub fn delta_cod_type2_at(
        &self,
        model: &BivariateModel,
        u_g: f64,
        u_tilde: f64,
        h: &Distortion,
    ) -> Result<RiskResult> {
        check_inputs(u_g, h)?;
        check_inputs(u_tilde, h)?;
        let (c, y) = (&model.copula, &model.marginal_y);
        let q = h.dual_measure().integrate(
            |l| {
                let a = y.quantile_level(c.cond_tail_quantile_level(u_g, l)?);
                let b = y.quantile_level(c.cond_tail_quantile_level(u_tilde, l)?);
                Ok([a - b, a, b])
            },
            &self.quad,
        )?;
        let terms = Some([q.value[1], q.value[2]]);
        Ok(result(q.value[0], u_g, &q, c, 2, terms))
    }

    /// CoVaR, CoES and MES at levels `alpha` (for `X`) and `beta` (for `Y`).
    pub fn classic_measures(
        &self,
        model: &BivariateModel,
        alpha: f64,
        beta: f64,
    ) -> Result<ClassicMeasures> {
        let g = Distortion::var(alpha)?;
        let covar = self.cod(model, &g, &Distortion::var(beta)?)?.value;
        let coes = self.cod(model, &g, &Distortion::es(beta)?)?.value;
        let mes = self.cod(model, &g, &Distortion::identity())?.value;
        Ok(ClassicMeasures { covar, coes, mes })
    }
}

fn check_inputs(u_g: f64, h: &Distortion) -> Result<()> {
    if u_g >= 1.0 {
        return Err(Error::DegenerateConditioning(u_g));
    }
    if !(u_g >= 0.0) {
        return Err(Error::Domain(format!(
            "threshold quantile {u_g} must lie in [0, 1)"
        )));
    }
    if h.continuity() == Continuity::RightContinuous {
        return Err(Error::Unsupported(format!(
            "right-continuous distortion {h} for the conditioned variable"
        )));
    }
    Ok(())
}

fn result<const N: usize>(
    value: f64,
    u_g: f64,
    q: &Quadrature<N>,
    c: &Copula,
    per_eval: usize,
    terms: Option<[f64; 2]>,
) -> RiskResult {
    let root_finds = match c.family() {
        CopulaFamily::Gumbel { theta } if theta > 1.0 => q.evaluations * per_eval,
        _ => 0,
    };
    RiskResult {
        value,
        u_g,
        diagnostics: Diagnostics {
            err_estimate: q.error,
            evaluations: q.evaluations,
            root_finds,
            terms,
        },
    }
}

/// `Psi(t) = hbar(A(hbar^-1(t)))` with `A(t) = F_{V|U>u_g}(t)`.
pub fn psi(c: &Copula, u_g: f64, h: &Distortion, t: f64) -> Result<f64> {
    let s = h.dual_inverse(t)?;
    Ok(h.eval_dual(c.cond_tail_cdf(u_g, s)?))
}

/// `Psi` on the uniform grid `i / grid_size`, `i = 0..=grid_size`.
pub fn psi_curve(
    c: &Copula,
    u_g: f64,
    h: &Distortion,
    grid_size: usize,
) -> Result<Vec<(f64, f64)>> {
    let n = grid_size.max(2);
    (0..=n)
        .map(|i| {
            let t = i as f64 / n as f64;
            Ok((t, psi(c, u_g, h, t)?))
        })
        .collect()
}

/// Convexity of `Psi` via second differences `>= -1e-9` on a uniform grid.
pub fn psi_convexity(
    c: &Copula,
    u_g: f64,
    h: &Distortion,
    grid_size: usize,
) -> Result<OrderVerdict> {
    let curve = psi_curve(c, u_g, h, grid_size)?;
    let mut tally = Tally::new(1e-9);
    for w in curve.windows(3) {
        let second = w[2].1 - 2.0 * w[1].1 + w[0].1;
        tally.leq(&[w[1].0], 0.0, second);
    }
    Ok(tally.finish())
}

pub fn distortion_measure(g: &Distortion, m: &Marginal) -> Result<f64> {
    Engine::default().distortion_measure(g, m)
}

pub fn threshold_quantile(g: &Distortion, m: &Marginal) -> Result<f64> {
    Engine::default().threshold_quantile(g, m)
}

pub fn cod(model: &BivariateModel, g: &Distortion, h: &Distortion) -> Result<RiskResult> {
    Engine::default().cod(model, g, h)
}

pub fn cod_at(model: &BivariateModel, u_g: f64, h: &Distortion) -> Result<RiskResult> {
    Engine::default().cod_at(model, u_g, h)
}

pub fn delta_cod(model: &BivariateModel, g: &Distortion, h: &Distortion) -> Result<RiskResult> {
    Engine::default().delta_cod(model, g, h)
}

pub fn delta_cod_at(model: &BivariateModel, u_g: f64, h: &Distortion) -> Result<RiskResult> {
    Engine::default().delta_cod_at(model, u_g, h)
}

pub fn delta_cod_type2(
    model: &BivariateModel,
    g: &Distortion,
    g_tilde: &Distortion,
    h: &Distortion,
) -> Result<RiskResult> {
    Engine::default().delta_cod_type2(model, g, g_tilde, h)
}

pub fn delta_cod_type2_at(
    model: &BivariateModel,
    u_g: f64,
    u_tilde: f64,
    h: &Distortion,
) -> Result<RiskResult> {
    Engine::default().delta_cod_type2_at(model, u_g, u_tilde, h)
}

pub fn classic_measures(model: &BivariateModel, alpha: f64, beta: f64) -> Result<ClassicMeasures> {
    Engine::default().classic_measures(model, alpha, beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate;
    use crate::special::{norm_pdf, norm_quantile};

    fn d(s: &str) -> Distortion {
        s.parse().unwrap()
    }

    fn m(s: &str) -> Marginal {
        s.parse().unwrap()
    }

    fn model(s: &str) -> BivariateModel {
        s.parse().unwrap()
    }

    fn smooth() -> Vec<Distortion> {
        [
            "es:0.9",
            "power:0.3",
            "power:2.5",
            "dualpower:3",
            "wang:0.5",
            "id",
        ]
        .iter()
        .map(|s| d(s))
        .collect()
    }

    #[test]
    fn distortion_measure_examples() {
        assert!((distortion_measure(&d("id"), &m("gamma:0.5,1")).unwrap() - 0.5).abs() < 1e-7);
        let z95 = norm_quantile(Level::from_lower(0.95));
        let v = distortion_measure(&d("var:0.95"), &m("normal:0,1")).unwrap();
        assert!((v - z95).abs() < 1e-10);
        assert!((v - 1.64485).abs() < 1e-4);
        let es = distortion_measure(&d("es:0.95"), &m("normal:0,1")).unwrap();
        assert!((es - norm_pdf(z95) / 0.05).abs() < 1e-9);
        assert!((es - 2.0627).abs() < 1e-3);
    }

    #[test]
    fn routes_agree_across_families() {
        let e = Engine::default();
        for g in smooth()
            .into_iter()
            .chain([d("var:0.9"), d("dual:power:1.1")])
        {
            for x in [
                "normal:0.3,2",
                "gamma:0.3,1",
                "gamma:4,2",
                "weibull:1,2",
                "exp:1",
                "uniform:-1,2",
            ] {
                let x = m(x);
                let a = e.tail_integral(&g, &x).unwrap();
                let b = e.quantile_integral(&g, &x).unwrap();
                assert!((a - b).abs() < 1e-8, "{g} {x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn threshold_examples() {
        let u = threshold_quantile(&d("id"), &m("exp:1")).unwrap();
        assert!((u - (1.0 - (-1f64).exp())).abs() < 1e-7);
        for x in ["normal:0,1", "gamma:0.5,1", "uniform:0,3"] {
            let u = threshold_quantile(&d("var:0.83"), &m(x)).unwrap();
            assert!((u - 0.83).abs() < 1e-12);
        }
        let ux = threshold_quantile(&d("power:0.3"), &m("gamma:0.5,1")).unwrap();
        let uy = threshold_quantile(&d("power:0.3"), &m("gamma:1.5,1")).unwrap();
        assert!((ux - 0.9714).abs() < 2e-3, "{ux}");
        assert!((uy - 0.9599).abs() < 2e-3, "{uy}");
    }

    #[test]
    fn threshold_is_scale_free() {
        for &a in &[0.3, 0.8, 2.0] {
            let base = threshold_quantile(&d("power:0.2"), &m(&format!("gamma:{a},1"))).unwrap();
            for &b in &[0.5, 2.0, 10.0] {
                let u =
                    threshold_quantile(&d("power:0.2"), &Marginal::gamma(a, b).unwrap()).unwrap();
                assert!((u - base).abs() < 1e-8, "a={a} b={b}");
            }
        }
    }

    #[test]
    fn dual_identity_on_mirrored_marginals() {
        for g in smooth() {
            for x in ["normal:0.7,1.3", "uniform:-0.5,2"] {
                let x = m(x);
                let lhs = distortion_measure(&g.dual(), &x).unwrap();
                let rhs = -distortion_measure(&g, &x.mirror().unwrap()).unwrap();
                assert!((lhs - rhs).abs() < 1e-6, "{g} {x}");
            }
        }
    }

    #[test]
    fn independence_is_unconditional() {
        let mdl = model("indep,normal:0,1,gamma:2,1");
        for h in smooth().into_iter().chain([d("var:0.9")]) {
            let base = distortion_measure(&h, &mdl.marginal_y).unwrap();
            for g in [d("var:0.95"), d("power:0.3")] {
                let c = cod(&mdl, &g, &h).unwrap();
                assert!((c.value - base).abs() < 1e-7, "{h}");
                let dc = delta_cod(&mdl, &g, &h).unwrap();
                assert!(dc.value.abs() < 1e-7, "{h}");
            }
            assert!((cod_at(&mdl, 0.5, &h).unwrap().value - base).abs() < 1e-7);
            let t2 = delta_cod_type2_at(&mdl, 0.9, 0.3, &h).unwrap();
            assert!(t2.value.abs() < 1e-7);
        }
    }

    #[test]
    fn comonotonic_closed_forms() {
        let mdl = model("comono,normal:0,1,normal:0,1");
        let c = cod(&mdl, &d("var:0.9"), &d("var:0.5")).unwrap();
        assert!((c.value - norm_quantile(Level::from_lower(0.95))).abs() < 1e-9);
        assert!((c.value - 1.64485).abs() < 1e-4);
        let dc = delta_cod(&mdl, &d("var:0.9"), &d("var:0.3")).unwrap();
        let want = norm_quantile(Level::from_lower(0.93)) - norm_quantile(Level::from_lower(0.3));
        assert!((dc.value - want).abs() < 1e-9 && dc.value >= 0.0);
        let cl = classic_measures(&mdl, 0.8, 0.7).unwrap();
        assert!((cl.covar - norm_quantile(Level::from_lower(0.94))).abs() < 1e-6);
    }

    #[test]
    fn max_order_statistic_identity() {
        let mdl = model("indep,exp:1,exp:1");
        for (k, hk) in [
            (1u32, 1.0),
            (2, 1.5),
            (3, 1.0 + 0.5 + 1.0 / 3.0),
            (5, 137.0 / 60.0),
        ] {
            let v = cod_at(&mdl, 0.3, &Distortion::dual_power(k).unwrap()).unwrap();
            assert!((v.value - hk).abs() < 1e-6, "k={k}: {}", v.value);
        }
    }

    #[test]
    fn covar_is_conditional_quantile() {
        let mdl = model("gumbel:2,normal:0,1,gamma:1.5,2");
        let c = cod_at(&mdl, 0.8, &d("var:0.6")).unwrap();
        let v = mdl.copula.cond_tail_quantile(0.8, 0.6).unwrap();
        assert!((c.value - mdl.marginal_y.quantile(v).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn delta_terms_are_reported() {
        let mdl = model("gumbel:2,gamma:0.3,1,gamma:2,1");
        let r = delta_cod_at(&mdl, 0.8, &d("power:0.4")).unwrap();
        let [a, b] = r.diagnostics.terms.unwrap();
        assert!((r.value - (a - b)).abs() < 1e-9);
        assert!((a - cod_at(&mdl, 0.8, &d("power:0.4")).unwrap().value).abs() < 1e-8);
        assert!((b - distortion_measure(&d("power:0.4"), &mdl.marginal_y).unwrap()).abs() < 1e-8);
        assert!(r.diagnostics.root_finds > 0);
        assert!(r.diagnostics.err_estimate <= Engine::default().quad.abs_tol);
    }

    #[test]
    fn type2_examples() {
        let mdl = model("gumbel:2,normal:0,1,gamma:0.3,1");
        let r = delta_cod_type2(&mdl, &d("power:0.3"), &d("power:0.3"), &d("power:2")).unwrap();
        assert!(r.value.abs() < 1e-9);
        let r = delta_cod_type2_at(&mdl, 0.9, 0.8, &d("power:2")).unwrap();
        assert!(r.value > 0.0);
        let direct = cod_at(&mdl, 0.9, &d("power:2")).unwrap().value
            - cod_at(&mdl, 0.8, &d("power:2")).unwrap().value;
        assert!((r.value - direct).abs() < 1e-8);
    }

    #[test]
    fn classic_consistency() {
        let mdl = model("gumbel:2,normal:0,1,normal:0,1");
        let (alpha, beta) = (0.95, 0.9);
        let cl = classic_measures(&mdl, alpha, beta).unwrap();
        assert!(cl.coes >= cl.covar);
        // CoES is the beta-tail average of CoVaR over its second level
        let avg = integrate(
            |t| {
                cod(
                    &mdl,
                    &d(&format!("var:{alpha}")),
                    &Distortion::var(t).unwrap(),
                )
                .unwrap()
                .value
            },
            beta,
            1.0,
            &QuadConfig::with_abs_tol(1e-9),
        )
        .unwrap()
        .value[0]
            / (1.0 - beta);
        assert!((avg - cl.coes).abs() < 1e-6, "{avg} vs {}", cl.coes);
        let ind = classic_measures(&model("indep,normal:0,1,normal:2,1"), alpha, beta).unwrap();
        assert!((ind.mes - 2.0).abs() < 1e-9);
        assert!((ind.covar - (2.0 + norm_quantile(Level::from_lower(beta)))).abs() < 1e-9);
    }

    #[test]
    fn representation_matches_conditional_tail_integral() {
        // D_h applied directly to F_{Y|X>D_g[X]}(y) = F_{V|U>u}(G(y))
        let cfg = QuadConfig::with_abs_tol(1e-11);
        for (spec, h) in [
            ("gumbel:2,normal:0,1,normal:0,1", d("power:2")),
            ("gumbel:3,gamma:0.5,1,gamma:1.5,1", d("dualpower:2")),
            ("fgm:-0.8,exp:1,gamma:0.8,0.5", d("power:0.7")),
        ] {
            let mdl = model(spec);
            let u = 0.9;
            let (c, y) = (mdl.copula, mdl.marginal_y);
            let cdf = |t: f64| c.cond_tail_cdf(u, y.cdf(t)).unwrap();
            let med = y.quantile(0.5).unwrap();
            let pos = integrate_with_breaks(
                |t| h.eval(1.0 - cdf(t)),
                0.0,
                f64::INFINITY,
                &[med.max(0.0)],
                &cfg,
            )
            .unwrap()
            .value[0];
            let neg = if y.support().0 < 0.0 {
                integrate_with_breaks(
                    |t| h.eval_dual(cdf(t)),
                    f64::NEG_INFINITY,
                    0.0,
                    &[med.min(0.0)],
                    &cfg,
                )
                .unwrap()
                .value[0]
            } else {
                0.0
            };
            let direct = pos - neg;
            let rep = cod_at(&mdl, u, &h).unwrap().value;
            assert!((rep - direct).abs() < 1e-6, "{spec}: {rep} vs {direct}");
        }
    }

    #[test]
    fn concordance_and_distortion_monotonicity() {
        let g = d("power:0.3");
        let mut prev = f64::NEG_INFINITY;
        for th in [1.0, 1.5, 2.5, 4.0] {
            let mdl = BivariateModel::new(
                Copula::gumbel(th).unwrap(),
                m("normal:0,1"),
                m("normal:0,1"),
            );
            let v = cod(&mdl, &g, &d("power:2")).unwrap().value;
            assert!(v >= prev - 1e-9);
            prev = v;
        }
        let mdl = model("gumbel:2,normal:0,1,normal:0,1");
        let lo = cod(&mdl, &g, &d("power:5")).unwrap().value;
        let hi = cod(&mdl, &g, &d("power:2")).unwrap().value;
        assert!(lo <= hi);
    }

    #[test]
    fn degenerate_and_unsupported_inputs() {
        let mdl = model("gumbel:2,normal:0,1,normal:0,1");
        assert!(matches!(
            cod_at(&mdl, 1.0, &d("id")),
            Err(Error::DegenerateConditioning(_))
        ));
        assert!(matches!(
            cod_at(&mdl, -0.1, &d("id")),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            cod_at(&mdl, 0.5, &d("dual:var:0.9")),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn psi_examples() {
        let ind = Copula::independence();
        for i in 0..=10 {
            let t = i as f64 / 10.0;
            assert!((psi(&ind, 0.9, &d("power:2"), t).unwrap() - t).abs() < 1e-12);
        }
        assert!(psi_convexity(&ind, 0.9, &d("power:2"), 200).unwrap().holds);
        let g15 = Copula::gumbel(1.5).unwrap();
        for k in [1.2, 2.0, 3.0, 4.0, 5.0] {
            let h = Distortion::power(k).unwrap().dual();
            assert!(
                psi_convexity(&g15, 0.9, &h, 200).unwrap().holds,
                "gamma={k}"
            );
        }
        for th in [1.2, 1.8, 2.5, 3.0, 5.0] {
            let h = Distortion::power(1.1).unwrap().dual();
            let c = Copula::gumbel(th).unwrap();
            assert!(psi_convexity(&c, 0.9, &h, 200).unwrap().holds, "theta={th}");
        }
        assert!(matches!(
            psi_convexity(&g15, 0.9, &d("var:0.9"), 50),
            Err(Error::Domain(_))
        ));
        assert!(psi_convexity(&g15, 0.9, &d("es:0.5"), 50).unwrap().holds);
    }

    #[test]
    fn model_parsing() {
        let mdl = model("gumbel:2,normal:0,1,gamma:0.5,1");
        assert_eq!(mdl.to_string(), "gumbel:2,normal:0,1,gamma:0.5,1");
        let mdl = model("indep,exp:1,uniform:0,1");
        assert_eq!(mdl.copula, Copula::independence());
        assert!("gumbel:2,normal:0,1".parse::<BivariateModel>().is_err());
        assert!("gumbel:2,normal:0,1,exp:1,exp:2"
            .parse::<BivariateModel>()
            .is_err());
        let s = mdl.swapped();
        assert_eq!(s.marginal_x, mdl.marginal_y);
    }
}
