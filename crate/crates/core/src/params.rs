use std::fmt;

use crate::error::{Error, Result};
use crate::specfun::{parse_rational, Rational};

/// Parameters of H = a₁W₁ − a₂W₂ with W_j ~ CW_n(n_j, 1).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EnsembleParams {
    /// Matrix dimension.
    pub n: u32,
    /// Degrees of freedom of W₁.
    pub n1: u32,
    /// Degrees of freedom of W₂.
    pub n2: u32,
    pub a1: Rational,
    pub a2: Rational,
}

impl EnsembleParams {
    pub fn new(n: u32, n1: u32, n2: u32, a1: Rational, a2: Rational) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("n must be at least 1".into()));
        }
        if n > n1 || n > n2 {
            return Err(Error::InvalidParams(format!(
                "need n <= n1 and n <= n2 for normalizable Wishart densities (n={n}, n1={n1}, n2={n2})"
            )));
        }
        if a1 <= 0 || a2 <= 0 {
            return Err(Error::InvalidParams(format!(
                "weights must be positive (a1={a1}, a2={a2})"
            )));
        }
        Ok(Self { n, n1, n2, a1, a2 })
    }

    /// Convenience constructor taking the weights as `"p/q"` strings.
    pub fn parse(n: u32, n1: u32, n2: u32, a1: &str, a2: &str) -> Result<Self> {
        Self::new(n, n1, n2, parse_rational(a1)?, parse_rational(a2)?)
    }

    /// Parameters of −H = a₂W₂ − a₁W₁.
    pub fn swapped(&self) -> Self {
        Self {
            n: self.n,
            n1: self.n2,
            n2: self.n1,
            a1: self.a2.clone(),
            a2: self.a1.clone(),
        }
    }

    /// n₁ = n₂ and a₁ = a₂, so H and −H have the same law.
    pub fn is_symmetric(&self) -> bool {
        self.n1 == self.n2 && self.a1 == self.a2
    }

    /// Largest j for which the (j−1)-th derivative of w exists at 0.
    pub fn max_derivative_index(&self) -> u32 {
        (self.n1 + self.n2 - 1).max(1)
    }

    pub fn a_sum(&self) -> Rational {
        Rational::from(&self.a1 + &self.a2)
    }
}

impl fmt::Display for EnsembleParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(n={}, n1={}, n2={}, a1={}, a2={})",
            self.n, self.n1, self.n2, self.a1, self.a2
        )
    }
}
