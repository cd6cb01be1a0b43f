//! Reproduction tables for the numerical-example panels.
//!
//! Each panel is a set of named series over one axis, plus the qualitative
//! claims (monotonicity, ordering, convexity) the panel is meant to show.
//! Gamma laws here follow the shape/scale reading `Gamma(a, b)`, so the rate
//! passed to [`Marginal::gamma`] is `1 / b`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::copula::Copula;
use crate::distortion::Distortion;
use crate::error::{Error, Result};
use crate::marginal::Marginal;
use crate::riskcore::{psi_convexity, psi_curve, BivariateModel, Engine};

pub const DEFAULT_GRID: usize = 80;
const CHECK_TOL: f64 = 1e-8;
const PSI_GRID: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FigureId {
    F1a,
    F1b,
    F1c,
    F2a,
    F2b,
    F2c,
    F2d,
    F3a,
    F3b,
    F4,
    F5a,
    F5b,
    F6a,
    F6b,
    F6c,
    F6d,
    F7a,
    F7b,
}

impl FigureId {
    pub const ALL: [FigureId; 18] = [
        FigureId::F1a,
        FigureId::F1b,
        FigureId::F1c,
        FigureId::F2a,
        FigureId::F2b,
        FigureId::F2c,
        FigureId::F2d,
        FigureId::F3a,
        FigureId::F3b,
        FigureId::F4,
        FigureId::F5a,
        FigureId::F5b,
        FigureId::F6a,
        FigureId::F6b,
        FigureId::F6c,
        FigureId::F6d,
        FigureId::F7a,
        FigureId::F7b,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::F1a => "1a",
            FigureId::F1b => "1b",
            FigureId::F1c => "1c",
            FigureId::F2a => "2a",
            FigureId::F2b => "2b",
            FigureId::F2c => "2c",
            FigureId::F2d => "2d",
            FigureId::F3a => "3a",
            FigureId::F3b => "3b",
            FigureId::F4 => "4",
            FigureId::F5a => "5a",
            FigureId::F5b => "5b",
            FigureId::F6a => "6a",
            FigureId::F6b => "6b",
            FigureId::F6c => "6c",
            FigureId::F6d => "6d",
            FigureId::F7a => "7a",
            FigureId::F7b => "7b",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        FigureId::ALL
            .into_iter()
            .find(|id| id.name() == key)
            .ok_or_else(|| Error::Domain(format!("unknown figure {s:?}")))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FigureOptions {
    /// Points per axis.
    pub grid: usize,
    pub engine: Engine,
}

impl Default for FigureOptions {
    fn default() -> Self {
        FigureOptions {
            grid: DEFAULT_GRID,
            engine: Engine::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureRow {
    pub series: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub holds: bool,
    /// Smallest slack over the grid; negative beyond the tolerance means failure.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureTable {
    pub id: String,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub parameters: Vec<(String, f64)>,
    pub rows: Vec<FigureRow>,
    pub checks: Vec<Check>,
}

impl FigureTable {
    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    /// Values of one series in x order.
    pub fn series(&self, name: &str) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.series == name)
            .map(|r| (r.x, r.y))
            .collect()
    }

    pub fn series_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.rows.iter().map(|r| r.series.clone()).collect();
        names.dedup();
        names
    }
}

type Series = (String, Vec<(f64, f64)>);

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// `n` points on `(0, hi]`, excluding zero.
fn open_axis(hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (1..=n).map(|i| hi * i as f64 / n as f64).collect()
}

fn gamma_scale(shape: f64, scale: f64) -> Marginal {
    Marginal::gamma(shape, 1.0 / scale).expect("valid gamma")
}

fn gumbel(theta: f64) -> Copula {
    Copula::gumbel(theta).expect("valid gumbel")
}

fn fgm(alpha: f64) -> Copula {
    Copula::fgm(alpha).expect("valid fgm")
}

fn power(gamma: f64) -> Result<Distortion> {
    Distortion::power(gamma)
}

/// `1 - (1 - p)^gamma`, whose dual is `p^gamma`.
fn reversed_power(gamma: f64) -> Result<Distortion> {
    Ok(Distortion::power(gamma)?.dual())
}

fn curve<F>(xs: &[f64], mut f: F) -> Result<Vec<(f64, f64)>>
where
    F: FnMut(f64) -> Result<f64>,
{
    xs.iter().map(|&x| Ok((x, f(x)?))).collect()
}

struct Checker {
    checks: Vec<Check>,
}

impl Checker {
    fn new() -> Self {
        Checker { checks: Vec::new() }
    }

    fn slack(&mut self, name: String, slacks: impl Iterator<Item = f64>) {
        let margin = slacks.fold(f64::INFINITY, |m, s| {
            m.min(if s.is_nan() { f64::NEG_INFINITY } else { s })
        });
        let margin = if margin == f64::INFINITY { 0.0 } else { margin };
        self.checks.push(Check {
            name,
            holds: margin >= -CHECK_TOL,
            margin,
        });
    }

    fn increasing(&mut self, s: &Series) {
        let name = format!("{} increasing", s.0);
        self.slack(name, s.1.windows(2).map(|w| w[1].1 - w[0].1));
    }

    fn decreasing(&mut self, s: &Series) {
        let name = format!("{} decreasing", s.0);
        self.slack(name, s.1.windows(2).map(|w| w[0].1 - w[1].1));
    }

    /// `a <= b` at every shared x.
    fn below(&mut self, a: &Series, b: &Series) {
        let name = format!("{} <= {}", a.0, b.0);
        self.slack(name, a.1.iter().zip(&b.1).map(|(p, q)| q.1 - p.1));
    }

    /// Each series lies below the next one.
    fn stacked(&mut self, series: &[Series]) {
        for w in series.windows(2) {
            self.below(&w[0], &w[1]);
        }
    }

    fn nonpositive(&mut self, s: &Series) {
        let name = format!("{} <= 0", s.0);
        self.slack(name, s.1.iter().map(|p| -p.1));
    }
}

struct Panel {
    title: &'static str,
    x_label: &'static str,
    y_label: &'static str,
    parameters: Vec<(String, f64)>,
    series: Vec<Series>,
    checks: Vec<Check>,
}

fn param(name: &str, v: f64) -> (String, f64) {
    (name.to_string(), v)
}

pub fn run_figure(id: FigureId, opts: &FigureOptions) -> Result<FigureTable> {
    let panel = match id {
        FigureId::F1a => fig_1a(opts),
        FigureId::F1b => fig_1b(opts),
        FigureId::F1c => fig_1c(opts),
        FigureId::F2a => fig_2a(opts),
        FigureId::F2b => fig_2b(opts),
        FigureId::F2c => fig_2c(opts),
        FigureId::F2d => fig_2d(opts),
        FigureId::F3a => fig_3(opts, true),
        FigureId::F3b => fig_3(opts, false),
        FigureId::F4 => fig_4(opts),
        FigureId::F5a => fig_5(opts, false),
        FigureId::F5b => fig_5(opts, true),
        FigureId::F6a => fig_6a(opts),
        FigureId::F6b => fig_6b(opts),
        FigureId::F6c => fig_6c(opts),
        FigureId::F6d => fig_6d(opts),
        FigureId::F7a => fig_7(opts, false),
        FigureId::F7b => fig_7(opts, true),
    }?;
    let mut rows: Vec<FigureRow> = panel
        .series
        .into_iter()
        .flat_map(|(name, pts)| {
            pts.into_iter().map(move |(x, y)| FigureRow {
                series: name.clone(),
                x,
                y,
            })
        })
        .collect();
    rows.sort_by(|a, b| a.series.cmp(&b.series).then(a.x.total_cmp(&b.x)));
    Ok(FigureTable {
        id: id.name().to_string(),
        title: panel.title.to_string(),
        x_label: panel.x_label.to_string(),
        y_label: panel.y_label.to_string(),
        parameters: panel.parameters,
        rows,
        checks: panel.checks,
    })
}

pub fn run_figure_str(id: &str, opts: &FigureOptions) -> Result<FigureTable> {
    run_figure(id.parse()?, opts)
}

fn fig_1a(o: &FigureOptions) -> Result<Panel> {
    let e = &o.engine;
    let u = 0.95;
    let gammas = axis(0.1, 4.0, o.grid);
    let y = Marginal::normal(0.0, 1.0)?;
    let mut series = Vec::new();
    for th in [1.0, 1.5, 2.0, 2.5, 4.0] {
        let m = BivariateModel::new(gumbel(th), y, y);
        let pts = curve(&gammas, |g| Ok(e.cod_at(&m, u, &power(g)?)?.value))?;
        series.push((format!("theta={th}"), pts));
    }
    let mut c = Checker::new();
    series.iter().for_each(|s| c.decreasing(s));
    c.stacked(&series);
    Ok(Panel {
        title: "CoD on gamma, Y ~ N(0,1), h(p) = p^gamma",
        x_label: "gamma",
        y_label: "CoD",
        parameters: vec![param("u_g", u)],
        series,
        checks: c.checks,
    })
}

fn fig_1b(o: &FigureOptions) -> Result<Panel> {
    let e = &o.engine;
    let gamma = 0.5;
    let h = power(gamma)?;
    let us = axis(0.7, 0.99, o.grid);
    let y = Marginal::normal(0.0, 1.0)?;
    let mut series = Vec::new();
    for th in [1.5, 2.0, 2.5, 3.0, 4.0] {
        let m = BivariateModel::new(gumbel(th), y, y);
        let pts = curve(&us, |u| Ok(e.cod_at(&m, u, &h)?.value))?;
        series.push((format!("theta={th}"), pts));
    }
    let mut c = Checker::new();
    series.iter().for_each(|s| c.increasing(s));
    c.stacked(&series);
    Ok(Panel {
        title: "CoD on u_g, Y ~ N(0,1), h(p) = p^gamma",
        x_label: "u_g",
        y_label: "CoD",
        parameters: vec![param("gamma", gamma)],
        series,
        checks: c.checks,
    })
}

fn fig_1c(o: &FigureOptions) -> Result<Panel> {
    let e = &o.engine;
    let (th1, th2, u1, u2) = (2.0, 4.0, 0.8, 0.99);
    let gammas = open_axis(1.0, o.grid);
    let y = Marginal::normal(0.0, 1.0)?;
    let y2 = Marginal::normal(0.0, 2f64.sqrt())?;
    let cases = [
        ("CoD[Y|X]", th1, u1, y),
        ("CoD[Y|X']", th2, u2, y),
        ("CoD[Y'|X]", th1, u1, y2),
        ("CoD[Y'|X']", th2, u2, y2),
    ];
    let mut series = Vec::new();
    for (name, th, u, marg) in cases {
        let m = BivariateModel::new(gumbel(th), marg, marg);
        let pts = curve(&gammas, |g| Ok(e.cod_at(&m, u, &power(g)?)?.value))?;
        series.push((name.to_string(), pts));
    }
    let mut c = Checker::new();
    series.iter().for_each(|s| c.decreasing(s));
    c.below(&series[0], &series[1]);
    c.below(&series[1], &series[3]);
    c.below(&series[0], &series[2]);
    c.below(&series[2], &series[3]);
    Ok(Panel {
        title: "CoD on gamma in (0,1], Y ~ N(0,1), Y' ~ N(0,2)",
        x_label: "gamma",
        y_label: "CoD",
        parameters: vec![
            param("theta1", th1),
            param("theta2", th2),
            param("u_g", u1),
            param("u_g'", u2),
            param("var_Y'", 2.0),
        ],
        series,
        checks: c.checks,
    })
}

fn fig_2a(o: &FigureOptions) -> Result<Panel> {
    let e = &o.engine;
    let (u, h) = (0.8, power(0.4)?);
    let thetas = axis(1.0, 6.0, o.grid);
    let mut series = Vec::new();
    for (name, marg) in [
        ("dCoD[Y|X]", gamma_scale(0.3, 1.0)),
        ("dCoD[Y'|X']", gamma_scale(2.0, 1.0)),
    ] {
        let pts = curve(&thetas, |th| {
            let m = BivariateModel::new(gumbel(th), marg, marg);
            Ok(e.delta_cod_at(&m, u, &h)?.value)
        })?;
        series.push((name.to_string(), pts));
    }
    let mut c = Checker::new();
    series.iter().for_each(|s| c.increasing(s));
    c.below(&series[0], &series[1]);
    Ok(Panel {
        title: "dCoD on theta, Y ~ Gamma(0.3,1), Y' ~ Gamma(2,1), h(p) = p^0.4",
        x_label: "theta",
        y_label: "dCoD",
        parameters: vec![param("u_g", u), param("gamma", 0.4)],
        series,
        checks: c.checks,
    })
}

fn fig_2b(o: &FigureOptions) -> Result<Panel> {
    let e = &o.engine;
    let (u, th) = (0.9, 2.0);
    let y = gamma_scale(0.2, 1.0);
    let m = BivariateModel::new(gumbel(th), y, y);
    let gammas = axis(0.1, 4.0, o.grid);
    let series = vec![(
        "dCoD[Y|X]".to_string(),
        curve(&gammas, |g| Ok(e.delta_cod_at(&m, u, &power(g)?)?.value))?,
    )];
    let mut c = Checker::new();
    c.decreasing(&series[0]);
    Ok(Panel {
        title: "dCoD on gamma, Y ~ Gamma(0.2,1), h(p) = p^gamma",
        x_label: "gamma",
        y_label: "dCoD",
        parameters: vec![param("u_g", u), param("theta", th)],
        series,
        checks: c.checks,
    })
}

fn fig_2c(o: &FigureOptions) -> Result<Panel> {
    let e = &o.engine;
    let us = axis(0.6, 0.99, o.grid);
    let cases = [
        ("dCoD_h[Y|X]", 2.0, gamma_scale(0.2, 1.0), 3.0),
        ("dCoD_h'[Y'|X']", 3.0, gamma_scale(2.0, 1.0), 2.0),
    ];
    let mut series = Vec::new();
    for (name, th, marg, g) in cases {
        let m = BivariateModel::new(gumbel(th), marg, marg);
        let h = power(g)?;
        series.push((
            name.to_string(),
            curve(&us, |u| Ok(e.delta_cod_at(&m, u, &h)?.value))?,
        ));
    }
    let mut c = Checker::new();
    series.iter().for_each(|s| c.increasing(s));
    c.below(&series[0], &series[1]);
    Ok(Panel {
        title: "dCoD on u_g, Y ~ Gamma(0.2,1), Y' ~ Gamma(2,1)",
        x_label: "u_g",
        y_label: "dCoD",
        parameters: vec![
            param("gamma1", 3.0),
            param("gamma2", 2.0),
            param("theta1", 2.0),
            param("theta2", 3.0),
        ],
        series,
        checks: c.checks,
    })
}

fn fig_2d(o: &FigureOptions) -> Result<Panel> {
    let e = &o.engine;
    let (u, u_tilde, th, a1) = (0.9, 0.8, 2.0, 0.3);
    let h = power(2.0)?;
    let a2s = axis(a1, 5.0, o.grid);
    let y = gamma_scale(a1, 1.0);
    let base = e
        .delta_cod_type2_at(&BivariateModel::new(gumbel(th), y, y), u, u_tilde, &h)?
        .value;
    let shifted = curve(&a2s, |a2| {
        let y2 = gamma_scale(a2, 1.0);
        Ok(
            e.delta_cod_type2_at(&BivariateModel::new(gumbel(th), y2, y2), u, u_tilde, &h)?
                .value,
        )
    })?;
    let diff: Vec<(f64, f64)> = shifted.iter().map(|&(a, v)| (a, base - v)).collect();
    let series = vec![
        (
            "dCoD2[Y|X]".to_string(),
            a2s.iter().map(|&a| (a, base)).collect(),
        ),
        ("dCoD2[Y'|X']".to_string(), shifted),
        ("dCoD2[Y|X] - dCoD2[Y'|X']".to_string(), diff),
    ];
    let mut c = Checker::new();
    c.nonpositive(&series[2]);
    Ok(Panel {
        title: "Type-II dCoD difference on a2, Y ~ Gamma(0.3,1), Y' ~ Gamma(a2,1)",
        x_label: "a2",
        y_label: "dCoD2",
        parameters: vec![
            param("u_g", u),
            param("u_g~", u_tilde),
            param("theta", th),
            param("a1", a1),
            param("gamma", 2.0),
        ],
        series,
        checks: c.checks,
    })
}

fn fig_3(o: &FigureOptions, vary_theta: bool) -> Result<Panel> {
    let u = 0.9;
    let n = o.grid.max(2);
    let cases: Vec<(String, f64, f64)> = if vary_theta {
        [1.2, 1.8, 2.5, 3.0, 5.0]
            .iter()
            .map(|&th| (format!("theta={th}"), th, 1.1))
            .collect()
    } else {
        [1.2, 2.0, 3.0, 4.0, 5.0]
            .iter()
            .map(|&g| (format!("gamma={g}"), 1.5, g))
            .collect()
    };
    let mut series = Vec::new();
    let mut checks = Vec::new();
    for (name, th, g) in cases {
        let c = gumbel(th);
        let h = reversed_power(g)?;
        series.push((name.clone(), psi_curve(&c, u, &h, n - 1)?));
        let v = psi_convexity(&c, u, &h, PSI_GRID.max(n))?;
        checks.push(Check {
            name: format!("{name} Psi convex"),
            holds: v.holds,
            margin: v.margin,
        });
    }
    let (title, parameters) = if vary_theta {
        (
            "Psi(t) for several theta, h(p) = 1 - (1-p)^1.1",
            vec![param("u_g", u), param("gamma", 1.1)],
        )
    } else {
        (
            "Psi(t) for several gamma, h(p) = 1 - (1-p)^gamma",
            vec![param("u_g", u), param("theta", 1.5)],
        )
    };
    Ok(Panel {
        title,
        x_label: "t",
        y_label: "Psi",
        parameters,
        series,
        checks,
    })
}

fn fig_4(o: &FigureOptions) -> Result<Panel> {
    let e = &o.engine;
    let th = 1.5;
    let h = Distortion::dual_power(2)?;
    let us = axis(0.6, 0.99, o.grid);
    let mut series = Vec::new();
    for (name, marg) in [
        ("dCoD[Y|X]", Marginal::weibull(1.0, 2.0)?),
        ("dCoD[Y'|X']", Marginal::weibull(1.0, 1.0)?),
    ] {
        let m = BivariateModel::new(gumbel(th), marg, marg);
        series.push((
            name.to_string(),
            curve(&us, |u| Ok(e.delta_cod_at(&m, u, &h)?.value))?,
        ));
    }
    let mut c = Checker::new();
    c.below(&series[0], &series[1]);
    Ok(Panel {
        title: "dCoD on u_g, Y ~ W(1,2), Y' ~ W(1,1), h(p) = 1 - (1-p)^2",
        x_label: "u_g",
        y_label: "dCoD",
        parameters: vec![param("theta", th)],
        series,
        checks: c.checks,
    })
}

/// Pair comparison under one copula: `[Y|X]` against `[X|Y]`.
fn pair_panel(
    o: &FigureOptions,
    c: Copula,
    g: &Distortion,
    x: Marginal,
    y: Marginal,
    delta: bool,
) -> Result<(Vec<Series>, f64, f64)> {
    let e = &o.engine;
    let yx = BivariateModel::new(c, x, y);
    let xy = yx.swapped();
    let ux = e.threshold_quantile(g, &x)?;
    let uy = e.threshold_quantile(g, &y)?;
    let gammas = axis(0.1, 4.0, o.grid);
    let eval = |m: &BivariateModel, u: f64, gm: f64| -> Result<f64> {
        let h = power(gm)?;
        Ok(if delta {
            e.delta_cod_at(m, u, &h)?.value
        } else {
            e.cod_at(m, u, &h)?.value
        })
    };
    let tag = if delta { "dCoD" } else { "CoD" };
    let series = vec![
        (
            format!("{tag}[Y|X]"),
            curve(&gammas, |gm| eval(&yx, ux, gm))?,
        ),
        (
            format!("{tag}[X|Y]"),
            curve(&gammas, |gm| eval(&xy, uy, gm))?,
        ),
    ];
    Ok((series, ux, uy))
}

fn fig_5(o: &FigureOptions, delta: bool) -> Result<Panel> {
    let g = power(0.3)?;
    let (x, y) = (gamma_scale(0.5, 1.0), gamma_scale(1.5, 1.0));
    let (series, ux, uy) = pair_panel(o, gumbel(2.0), &g, x, y, delta)?;
    let mut c = Checker::new();
    c.below(&series[1], &series[0]);
    Ok(Panel {
        title: if delta {
            "dCoD[Y|X] and dCoD[X|Y] on gamma2, X ~ Gamma(0.5,1), Y ~ Gamma(1.5,1)"
        } else {
            "CoD[Y|X] and CoD[X|Y] on gamma2, X ~ Gamma(0.5,1), Y ~ Gamma(1.5,1)"
        },
        x_label: "gamma2",
        y_label: if delta { "dCoD" } else { "CoD" },
        parameters: vec![
            param("theta", 2.0),
            param("g_gamma", 0.3),
            param("u_g^X", ux),
            param("u_g^Y", uy),
        ],
        series,
        checks: c.checks,
    })
}

fn fig_6a(o: &FigureOptions) -> Result<Panel> {
    let e = &o.engine;
    let y = gamma_scale(0.8, 2.0);
    let h = power(5.0)?;
    let n = o.grid.max(2);
    let us: Vec<f64> = (0..n).map(|i| 0.99 * i as f64 / (n - 1) as f64).collect();
    let mut series = Vec::new();
    for a in [-0.9, -0.7, -0.5, -0.3, -0.1] {
        let m = BivariateModel::new(fgm(a), y, y);
        series.push((
            format!("alpha={a}"),
            curve(&us, |u| Ok(e.cod_at(&m, u, &h)?.value))?,
        ));
    }
    let mut c = Checker::new();
    series.iter().for_each(|s| c.decreasing(s));
    c.stacked(&series);
    Ok(Panel {
        title: "CoD on u_g, FGM, Y ~ Gamma(0.8,2), h(p) = p^5",
        x_label: "u_g",
        y_label: "CoD",
        parameters: vec![param("gamma", 5.0)],
        series,
        checks: c.checks,
    })
}

fn fig_6b(o: &FigureOptions) -> Result<Panel> {
    let e = &o.engine;
    let u = 0.95;
    let gammas = axis(1.0, 4.0, o.grid);
    let mut series = Vec::new();
    let mut levels = Vec::new();
    for (name, a, marg) in [
        ("dCoD[Y|X]", -0.9, gamma_scale(0.8, 2.0)),
        ("dCoD[Y'|X']", -0.3, gamma_scale(1.8, 2.0)),
    ] {
        let m = BivariateModel::new(fgm(a), marg, marg);
        let mut cods = Vec::new();
        let pts = curve(&gammas, |g| {
            let r = e.delta_cod_at(&m, u, &power(g)?)?;
            let [cod, _] = r.diagnostics.terms.expect("delta terms");
            cods.push((g, cod));
            Ok(r.value)
        })?;
        series.push((name.to_string(), pts));
        levels.push((name.trim_start_matches('d').to_string(), cods));
    }
    let mut c = Checker::new();
    c.below(&series[0], &series[1]);
    c.below(&levels[0], &levels[1]);
    Ok(Panel {
        title: "dCoD on gamma in [1,4], FGM, Y ~ Gamma(0.8,2), Y' ~ Gamma(1.8,2)",
        x_label: "gamma",
        y_label: "dCoD",
        parameters: vec![
            param("u_g", u),
            param("alpha1", -0.9),
            param("alpha2", -0.3),
        ],
        series,
        checks: c.checks,
    })
}

fn fig_6c(o: &FigureOptions) -> Result<Panel> {
    let e = &o.engine;
    let gammas = axis(0.1, 4.0, o.grid);
    let mut series = Vec::new();
    for (name, a, u, marg) in [
        ("dCoD_g[Y|X]", -0.3, 0.95, gamma_scale(0.6, 1.0)),
        ("dCoD_g'[Y'|X']", -0.9, 0.9, gamma_scale(1.2, 1.0)),
    ] {
        let m = BivariateModel::new(fgm(a), marg, marg);
        series.push((
            name.to_string(),
            curve(&gammas, |g| Ok(e.delta_cod_at(&m, u, &power(g)?)?.value))?,
        ));
    }
    let mut c = Checker::new();
    c.below(&series[1], &series[0]);
    Ok(Panel {
        title: "dCoD on gamma, FGM, Y ~ Gamma(0.6,1), Y' ~ Gamma(1.2,1)",
        x_label: "gamma",
        y_label: "dCoD",
        parameters: vec![
            param("u_g", 0.95),
            param("u_g'", 0.9),
            param("alpha", -0.3),
            param("alpha'", -0.9),
        ],
        series,
        checks: c.checks,
    })
}

fn fig_6d(o: &FigureOptions) -> Result<Panel> {
    let e = &o.engine;
    let (a, u) = (-0.8, 0.95);
    let y = gamma_scale(0.8, 2.0);
    let m = BivariateModel::new(fgm(a), y, y);
    let gammas = axis(0.1, 4.0, o.grid);
    let series = vec![(
        "dCoD[Y|X]".to_string(),
        curve(&gammas, |g| Ok(e.delta_cod_at(&m, u, &power(g)?)?.value))?,
    )];
    let mut c = Checker::new();
    c.increasing(&series[0]);
    Ok(Panel {
        title: "dCoD on gamma, FGM, Y ~ Gamma(0.8,2)",
        x_label: "gamma",
        y_label: "dCoD",
        parameters: vec![param("alpha", a), param("u_g", u)],
        series,
        checks: c.checks,
    })
}

fn fig_7(o: &FigureOptions, delta_only: bool) -> Result<Panel> {
    let g = power(0.2)?;
    let (x, y) = (gamma_scale(0.8, 1.0), gamma_scale(0.8, 2.0));
    let c = fgm(-0.8);
    let (cods, ux, uy) = pair_panel(o, c, &g, x, y, false)?;
    let (deltas, _, _) = pair_panel(o, c, &g, x, y, true)?;
    let mut ck = Checker::new();
    let series = if delta_only {
        ck.below(&deltas[0], &deltas[1]);
        deltas
    } else {
        ck.below(&cods[1], &cods[0]);
        ck.below(&deltas[0], &deltas[1]);
        cods
    };
    Ok(Panel {
        title: if delta_only {
            "dCoD[Y|X] and dCoD[X|Y] on gamma2, FGM, X ~ Gamma(0.8,1), Y ~ Gamma(0.8,2)"
        } else {
            "CoD[Y|X] and CoD[X|Y] on gamma2, FGM, X ~ Gamma(0.8,1), Y ~ Gamma(0.8,2)"
        },
        x_label: "gamma2",
        y_label: if delta_only { "dCoD" } else { "CoD" },
        parameters: vec![
            param("alpha", -0.8),
            param("g_gamma", 0.2),
            param("u_g^X", ux),
            param("u_g^Y", uy),
        ],
        series,
        checks: ck.checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for id in FigureId::ALL {
            assert_eq!(id.name().parse::<FigureId>().unwrap(), id);
        }
        assert!(matches!("8z".parse::<FigureId>(), Err(Error::Domain(_))));
    }

    #[test]
    fn rows_sorted_by_series_then_x() {
        let opts = FigureOptions {
            grid: 6,
            ..Default::default()
        };
        let t = run_figure(FigureId::F1b, &opts).unwrap();
        assert_eq!(t.rows.len(), 30);
        for w in t.rows.windows(2) {
            assert!(w[0].series < w[1].series || (w[0].series == w[1].series && w[0].x < w[1].x));
        }
        assert_eq!(t.series_names().len(), 5);
    }

    #[test]
    fn pair_thresholds_are_reported() {
        let opts = FigureOptions {
            grid: 4,
            ..Default::default()
        };
        let t = run_figure(FigureId::F7b, &opts).unwrap();
        let ux = t.parameters.iter().find(|p| p.0 == "u_g^X").unwrap().1;
        let uy = t.parameters.iter().find(|p| p.0 == "u_g^Y").unwrap().1;
        assert!((ux - uy).abs() < 1e-8);
        assert!((ux - 0.9937).abs() < 1.5e-3);
    }
}
