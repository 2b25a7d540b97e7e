use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A coefficient of the master equation: either a fixed number or a function
/// of time. Functions must be pure; they may be evaluated from several
/// threads and in any order.
#[derive(Clone)]
pub enum CoefficientSource {
    Constant(f64),
    TimeFunction(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl CoefficientSource {
    pub fn function<F>(f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::TimeFunction(Arc::new(f))
    }

    /// Value at time `t`. A non-finite result is reported as undefined.
    pub fn at(&self, name: &'static str, t: f64) -> Result<f64> {
        let v = match self {
            Self::Constant(v) => *v,
            Self::TimeFunction(f) => f(t),
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::CoefficientUndefined { name, t })
        }
    }

    pub fn constant(&self) -> Option<f64> {
        match self {
            Self::Constant(v) => Some(*v),
            Self::TimeFunction(_) => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Self::Constant(_))
    }
}

impl From<f64> for CoefficientSource {
    fn from(v: f64) -> Self {
        Self::Constant(v)
    }
}

impl fmt::Debug for CoefficientSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(v) => write!(f, "Constant({v})"),
            Self::TimeFunction(_) => f.write_str("TimeFunction(..)"),
        }
    }
}
