//! Dense univariate polynomials with exact rational coefficients.

use crate::error::{Error, Result};
use crate::specfun::{to_float, BigFloat, Rational};

/// Polynomial with exact rational coefficients, ascending powers.
pub type RationalPoly = Vec<Rational>;

pub fn poly_add(a: &[Rational], b: &[Rational]) -> RationalPoly {
    let mut out = vec![Rational::new(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] += c;
    }
    poly_trim(out)
}

pub fn poly_scale(a: &[Rational], s: &Rational) -> RationalPoly {
    poly_trim(a.iter().map(|c| Rational::from(c * s)).collect())
}

pub fn poly_mul(a: &[Rational], b: &[Rational]) -> RationalPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::new(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += Rational::from(x * y);
        }
    }
    poly_trim(out)
}

pub fn poly_trim(mut a: RationalPoly) -> RationalPoly {
    while a.last().is_some_and(|c| *c == 0) {
        a.pop();
    }
    a
}

/// Divides by λ^k, failing unless the remainder is identically zero.
pub fn poly_div_monomial(a: &[Rational], k: usize) -> Result<RationalPoly> {
    if a.iter().take(k).any(|c| *c != 0) {
        return Err(Error::Consistency(format!("polynomial is not divisible by λ^{k}")));
    }
    Ok(a.iter().skip(k).cloned().collect())
}

pub fn poly_eval_big(a: &[Rational], x: &BigFloat) -> BigFloat {
    let mut acc = BigFloat::new(x.prec());
    for c in a.iter().rev() {
        acc *= x;
        acc += to_float(c, x.prec());
    }
    acc
}

/// p(−x).
pub fn poly_reflect(a: &[Rational]) -> RationalPoly {
    a.iter()
        .enumerate()
        .map(|(i, c)| if i % 2 == 1 { Rational::from(-c) } else { c.clone() })
        .collect()
}

/// (c₀ + c₁x)^k.
pub fn poly_linear_power(c0: i64, c1: i64, k: u32) -> RationalPoly {
    let base = vec![Rational::from(c0), Rational::from(c1)];
    (0..k).fold(vec![Rational::from(1)], |acc, _| poly_mul(&acc, &base))
}

/// Antiderivative vanishing at 0.
pub fn poly_integral(a: &[Rational]) -> RationalPoly {
    let mut out = vec![Rational::new()];
    out.extend(a.iter().enumerate().map(|(i, c)| Rational::from(c / (i as u32 + 1))));
    poly_trim(out)
}

pub fn poly_eval_rational(a: &[Rational], x: &Rational) -> Rational {
    let mut acc = Rational::new();
    for c in a.iter().rev() {
        acc *= x;
        acc += c;
    }
    acc
}

/// ∫_lo^hi p exactly.
pub fn poly_definite_integral(a: &[Rational], lo: &Rational, hi: &Rational) -> Rational {
    let f = poly_integral(a);
    poly_eval_rational(&f, hi) - poly_eval_rational(&f, lo)
}
