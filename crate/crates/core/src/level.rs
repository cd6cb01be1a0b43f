//! Probability levels that keep both `p` and `1 - p` to full relative precision.
//!
//! Quantile integrals against distortion measures put most of their weight
//! close to `p = 1` for heavy-tailed distortions. Carrying the complement
//! explicitly lets quantile functions work from whichever side is small.

/// A probability `p` together with its complement `q = 1 - p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level {
    p: f64,
    q: f64,
}

impl Level {
    pub fn from_lower(p: f64) -> Self {
        Level { p, q: 1.0 - p }
    }

    pub fn from_upper(q: f64) -> Self {
        Level { p: 1.0 - q, q }
    }

    /// Builds a level from both sides; the caller guarantees `p + q == 1` up to rounding.
    pub(crate) fn from_parts(p: f64, q: f64) -> Self {
        Level { p, q }
    }

    #[inline]
    pub fn lower(&self) -> f64 {
        self.p
    }

    #[inline]
    pub fn upper(&self) -> f64 {
        self.q
    }

    /// True when the complement is the more precise representation.
    #[inline]
    pub fn in_upper_half(&self) -> bool {
        self.p > 0.5
    }

    pub fn complement(&self) -> Self {
        Level {
            p: self.q,
            q: self.p,
        }
    }
}
