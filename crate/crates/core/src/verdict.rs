use serde::Serialize;

/// Where a grid check first failed: the grid coordinates and the two sides
/// of the inequality `lhs <= rhs` that was violated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub location: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
}

/// Outcome of a grid-based order or dependence check.
///
/// `margin` is the smallest observed slack `rhs - lhs` over the grid, so the
/// check holds exactly when `margin >= -tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderVerdict {
    pub holds: bool,
    pub first_violation: Option<Violation>,
    pub margin: f64,
    pub tolerance: f64,
}

impl OrderVerdict {
    /// Conjunction of two verdicts.
    pub fn and(self, other: OrderVerdict) -> OrderVerdict {
        OrderVerdict {
            holds: self.holds && other.holds,
            first_violation: self.first_violation.or(other.first_violation),
            margin: self.margin.min(other.margin),
            tolerance: self.tolerance.max(other.tolerance),
        }
    }
}

/// Accumulates `lhs <= rhs` comparisons into an [`OrderVerdict`].
#[derive(Debug, Clone)]
pub(crate) struct Tally {
    tolerance: f64,
    margin: f64,
    first: Option<Violation>,
}

impl Tally {
    pub fn new(tolerance: f64) -> Self {
        Tally {
            tolerance,
            margin: f64::INFINITY,
            first: None,
        }
    }

    pub fn leq(&mut self, location: &[f64], lhs: f64, rhs: f64) {
        let slack = rhs - lhs;
        // NaN slack counts as a violation
        let slack = if slack.is_nan() {
            f64::NEG_INFINITY
        } else {
            slack
        };
        if slack < self.margin {
            self.margin = slack;
        }
        if slack < -self.tolerance && self.first.is_none() {
            self.first = Some(Violation {
                location: location.to_vec(),
                lhs,
                rhs,
            });
        }
    }

    pub fn finish(self) -> OrderVerdict {
        let margin = if self.margin == f64::INFINITY {
            0.0
        } else {
            self.margin
        };
        OrderVerdict {
            holds: self.first.is_none(),
            first_violation: self.first,
            margin,
            tolerance: self.tolerance,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tally_tracks_worst_slack_and_first_failure() {
        let mut t = Tally::new(1e-9);
        t.leq(&[0.1], 1.0, 2.0);
        t.leq(&[0.2], 3.0, 2.0);
        t.leq(&[0.3], 5.0, 2.0);
        let v = t.finish();
        assert!(!v.holds);
        assert_eq!(v.margin, -3.0);
        assert_eq!(v.first_violation.unwrap().location, vec![0.2]);
    }

    #[test]
    fn tolerance_absorbs_rounding() {
        let mut t = Tally::new(1e-9);
        t.leq(&[0.0], 1.0 + 1e-12, 1.0);
        let v = t.finish();
        assert!(v.holds);
        assert!(v.margin < 0.0);
    }
}
