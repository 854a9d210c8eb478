use std::fmt;
use std::str::FromStr;

use crate::{HetError, Result};

/// The elasticity (order) parameter `q >= 0`.
///
/// The values 0, 1 and infinity select the limit branches of the order-`q`
/// formulas. Only an exact `1.0` is treated as the Shannon branch; a value
/// such as `1.0 + 1e-9` goes through the generic formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Order {
    Zero,
    One,
    Infinity,
    Finite(f64),
}

impl Order {
    pub fn new(q: f64) -> Result<Self> {
        if q.is_nan() || q < 0.0 {
            return Err(HetError::InvalidParameter(format!(
                "order q must be non-negative, got {q}"
            )));
        }
        Ok(if q == 0.0 {
            Order::Zero
        } else if q == 1.0 {
            Order::One
        } else if q.is_infinite() {
            Order::Infinity
        } else {
            Order::Finite(q)
        })
    }

    pub fn value(self) -> f64 {
        match self {
            Order::Zero => 0.0,
            Order::One => 1.0,
            Order::Infinity => f64::INFINITY,
            Order::Finite(q) => q,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Infinity => write!(f, "inf"),
            other => write!(f, "{}", other.value()),
        }
    }
}

impl FromStr for Order {
    type Err = HetError;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let q = match t.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => f64::INFINITY,
            _ => t
                .parse::<f64>()
                .map_err(|_| HetError::InvalidParameter(format!("cannot parse order {s:?}")))?,
        };
        Order::new(q)
    }
}
