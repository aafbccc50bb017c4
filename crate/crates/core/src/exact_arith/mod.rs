//! Exact scalars in `Q` or `Q(sqrt(d))`, dense exact matrices, and sparse
//! linear combinations.

mod lin;
mod matrix;
mod scalar;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use lin::Lin;
pub use matrix::{ExactMatrix, Rref, SolutionSet};
pub use scalar::{q, Scalar};

use crate::error::{Error, Result};

/// Decides `x ∈ step·Z₊`, i.e. whether `x / step` is an integer `>= 1`.
pub fn in_positive_multiples(x: &Scalar, step: &Scalar) -> Result<bool> {
    if step.is_zero() {
        return Err(Error::Domain("step must be nonzero".into()));
    }
    if !x.is_rational() {
        return Err(Error::NotRational(x.to_string()));
    }
    if !step.is_rational() {
        return Err(Error::NotRational(step.to_string()));
    }
    Ok(matches!((x / step).to_integer(), Some(n) if n >= num_bigint::BigInt::from(1)))
}

/// A level of the affine algebra: either an exact value or a formal
/// transcendental ("generic") level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Level {
    Exact(Scalar),
    Generic,
}

impl Level {
    pub fn exact(&self) -> Option<&Scalar> {
        match self {
            Level::Exact(l) => Some(l),
            Level::Generic => None,
        }
    }

    pub fn is_generic(&self) -> bool {
        matches!(self, Level::Generic)
    }

    pub fn require_exact(&self, context: &str) -> Result<&Scalar> {
        self.exact().ok_or_else(|| Error::GenericLevel(context.to_string()))
    }

    /// Membership `x ∈ (level + shift)·Z₊`; always false at a generic level
    /// since `x` is a fixed rational there.
    pub fn in_shifted_multiples(&self, x: &Scalar, shift: &Scalar) -> Result<bool> {
        match self {
            Level::Generic => Ok(false),
            Level::Exact(l) => {
                let step = l + shift;
                if step.is_zero() {
                    return Err(Error::CriticalLevel);
                }
                in_positive_multiples(x, &step)
            }
        }
    }
}

impl From<Scalar> for Level {
    fn from(s: Scalar) -> Self {
        Level::Exact(s)
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Exact(l) => write!(f, "{l}"),
            Level::Generic => write!(f, "generic"),
        }
    }
}

impl FromStr for Level {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("generic") {
            Ok(Level::Generic)
        } else {
            s.parse().map(Level::Exact)
        }
    }
}

impl Serialize for Level {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Level {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positive_multiples_examples() {
        assert!(in_positive_multiples(&q(6, 1), &q(6, 1)).unwrap());
        assert!(!in_positive_multiples(&q(0, 1), &q(3, 2)).unwrap());
        assert!(!in_positive_multiples(&q(1, 2), &q(3, 2)).unwrap());
        assert!(in_positive_multiples(&q(3, 1), &q(3, 2)).unwrap());
        assert!(!in_positive_multiples(&q(-3, 1), &q(3, 2)).unwrap());
        assert!(in_positive_multiples(&q(-3, 1), &q(-3, 2)).unwrap());
        assert!(in_positive_multiples(&q(1, 1), &q(0, 1)).is_err());
    }

    #[test]
    fn generic_level_never_hits() {
        assert!(!Level::Generic.in_shifted_multiples(&q(6, 1), &q(2, 1)).unwrap());
        let l: Level = "generic".parse().unwrap();
        assert!(l.is_generic());
        let four: Level = "4".parse().unwrap();
        assert!(four.in_shifted_multiples(&q(6, 1), &q(2, 1)).unwrap());
        let critical = Level::Exact(q(-2, 1));
        assert_eq!(critical.in_shifted_multiples(&q(1, 1), &q(2, 1)), Err(Error::CriticalLevel));
    }
}
