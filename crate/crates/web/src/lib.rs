//! wasm-bindgen entry points for the static demo page in `www/`.
//!
//! Curves come back as flat `[x0, y0, x1, y1, ...]` arrays.

use wasm_bindgen::prelude::*;

use codrisk::copula::Copula;
use codrisk::distortion::Distortion;
use codrisk::marginal::Marginal;
use codrisk::riskcore::{psi_convexity, psi_curve as core_psi_curve, BivariateModel, Engine};

fn parse<T: std::str::FromStr>(what: &str, s: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    s.trim().parse().map_err(|e| format!("{what}: {e}"))
}

fn model(copula: &str, x: &str, y: &str) -> Result<BivariateModel, String> {
    Ok(BivariateModel::new(
        parse::<Copula>("copula", copula)?,
        parse::<Marginal>("X", x)?,
        parse::<Marginal>("Y", y)?,
    ))
}

fn check_points(n: usize) -> Result<(), String> {
    if (2..=2000).contains(&n) {
        Ok(())
    } else {
        Err(format!("points = {n} must lie in [2, 2000]"))
    }
}

/// Threshold quantile u_g = F(D_g[X]).
#[wasm_bindgen]
pub fn threshold(g: &str, x: &str) -> Result<f64, String> {
    let g: Distortion = parse("g", g)?;
    let x: Marginal = parse("X", x)?;
    Engine::default()
        .threshold_quantile(&g, &x)
        .map_err(|e| e.to_string())
}

/// CoD with h(p) = p^γ for γ on [gamma_min, gamma_max], at a fixed threshold quantile.
#[wasm_bindgen]
pub fn cod_vs_gamma(
    copula: &str,
    x: &str,
    y: &str,
    u: f64,
    gamma_min: f64,
    gamma_max: f64,
    points: usize,
) -> Result<Vec<f64>, String> {
    check_points(points)?;
    if !(gamma_min > 0.0 && gamma_max > gamma_min) {
        return Err("need 0 < gamma_min < gamma_max".into());
    }
    let m = model(copula, x, y)?;
    let e = Engine::default();
    let mut out = Vec::with_capacity(2 * points);
    for i in 0..points {
        let gamma = gamma_min + (gamma_max - gamma_min) * i as f64 / (points - 1) as f64;
        let h = Distortion::power(gamma).map_err(|e| e.to_string())?;
        let v = e.cod_at(&m, u, &h).map_err(|e| e.to_string())?.value;
        out.extend([gamma, v]);
    }
    Ok(out)
}

/// Type-I contribution against the threshold quantile on [u_min, u_max].
#[wasm_bindgen]
pub fn delta_vs_u(
    copula: &str,
    x: &str,
    y: &str,
    h: &str,
    u_min: f64,
    u_max: f64,
    points: usize,
) -> Result<Vec<f64>, String> {
    check_points(points)?;
    if !(0.0 <= u_min && u_min < u_max && u_max < 1.0) {
        return Err("need 0 <= u_min < u_max < 1".into());
    }
    let m = model(copula, x, y)?;
    let h: Distortion = parse("h", h)?;
    let e = Engine::default();
    let mut out = Vec::with_capacity(2 * points);
    for i in 0..points {
        let u = u_min + (u_max - u_min) * i as f64 / (points - 1) as f64;
        let v = e.delta_cod_at(&m, u, &h).map_err(|e| e.to_string())?.value;
        out.extend([u, v]);
    }
    Ok(out)
}

/// Ψ(t) on t = i/(points-1).
#[wasm_bindgen]
pub fn psi_curve(copula: &str, u: f64, h: &str, points: usize) -> Result<Vec<f64>, String> {
    check_points(points.max(3))?;
    let c: Copula = parse("copula", copula)?;
    let h: Distortion = parse("h", h)?;
    let pts = core_psi_curve(&c, u, &h, points.max(3) - 1).map_err(|e| e.to_string())?;
    Ok(pts.into_iter().flat_map(|(t, y)| [t, y]).collect())
}

/// Whether Ψ is convex on a 400-interval grid.
#[wasm_bindgen]
pub fn psi_is_convex(copula: &str, u: f64, h: &str) -> Result<bool, String> {
    let c: Copula = parse("copula", copula)?;
    let h: Distortion = parse("h", h)?;
    Ok(psi_convexity(&c, u, &h, 400)
        .map_err(|e| e.to_string())?
        .holds)
}
