//! Standard normal helpers. `libm` supplies erfc; `statrs` seeds the inverse.

use libm::erfc;
use statrs::function::erf::erfc_inv;

use crate::level::Level;

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

#[inline]
pub fn norm_pdf(z: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * z * z).exp()
}

#[inline]
pub fn norm_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

#[inline]
pub fn norm_sf(z: f64) -> f64 {
    0.5 * erfc(z / SQRT_2)
}

/// Level representation of `Phi(z)`.
pub fn norm_level(z: f64) -> Level {
    if z > 0.0 {
        Level::from_upper(norm_sf(z))
    } else {
        Level::from_lower(norm_cdf(z))
    }
}

/// Standard normal quantile, polished with one Newton step on the small side.
pub fn norm_quantile(level: Level) -> f64 {
    if level.in_upper_half() {
        let q = level.upper();
        if q <= 0.0 {
            return f64::INFINITY;
        }
        let z = SQRT_2 * erfc_inv(2.0 * q);
        let pdf = norm_pdf(z);
        if pdf > 0.0 {
            z + (norm_sf(z) - q) / pdf
        } else {
            z
        }
    } else {
        let p = level.lower();
        if p <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let z = -SQRT_2 * erfc_inv(2.0 * p);
        let pdf = norm_pdf(z);
        if pdf > 0.0 {
            z - (norm_cdf(z) - p) / pdf
        } else {
            z
        }
    }
}
