use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A Rényi order `α > 0`, `α ≠ 1`.
///
/// Values arbitrarily close to 1 are allowed so that limits can be probed.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct RenyiOrder(f64);

impl RenyiOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 && alpha != 1.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidOrder(alpha))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// `δ = α / (1 − α)`.
    pub fn delta(self) -> f64 {
        self.0 / (1.0 - self.0)
    }

    pub fn in_unit_interval(self) -> bool {
        self.0 < 1.0
    }

    /// Returns `self` if `0 < α < 1`, otherwise an error.
    pub fn require_unit_interval(self) -> Result<Self> {
        if self.in_unit_interval() {
            Ok(self)
        } else {
            Err(Error::OrderOutsideUnitInterval(self.0))
        }
    }

    /// The skew partner `1 − α`; only defined on `(0, 1)`.
    pub fn complement(self) -> Result<Self> {
        self.require_unit_interval()?;
        Self::new(1.0 - self.0)
    }
}

impl TryFrom<f64> for RenyiOrder {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<RenyiOrder> for f64 {
    fn from(order: RenyiOrder) -> f64 {
        order.0
    }
}

impl std::fmt::Display for RenyiOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}
