//! Exact rational arithmetic helpers and the special functions used by the
//! closed forms: integer Γ, generalized binomials, Pochhammer symbols,
//! associated Laguerre polynomials and terminating Gauss hypergeometric sums.
//!
//! Everything here except [`hyp2f1_series`] is exact. Floating evaluation goes
//! through MPFR-backed [`BigFloat`] values whose precision is fixed when they
//! are created.

use std::str::FromStr;

use rug::float::Round;
use rug::ops::Pow;
use rug::Integer;

use crate::error::{Error, Result};

/// Arbitrary precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = rug::Rational;

/// Extended precision binary float; the precision is chosen on construction.
pub type BigFloat = rug::Float;

/// Working precision (bits) for every floating computation in the crate.
pub const DEFAULT_PREC: u32 = 100;

/// Correctly rounded conversion of an exact rational.
pub fn to_float(r: &Rational, prec: u32) -> BigFloat {
    BigFloat::with_val_round(prec, r, Round::Nearest).0
}

pub fn float(prec: u32, x: f64) -> BigFloat {
    BigFloat::with_val(prec, x)
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64()
}

/// Parses `"p/q"` or `"p"`. Decimal notation is rejected so that every input
/// stays exact.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if t.contains(['.', 'e', 'E']) {
        return Err(Error::Parse(format!(
            "'{t}' looks like a decimal; write exact values as p/q (e.g. 2/3)"
        )));
    }
    let ok = t
        .chars()
        .enumerate()
        .all(|(i, c)| c.is_ascii_digit() || c == '/' || ((c == '-' || c == '+') && i == 0));
    if !ok || t.matches('/').count() > 1 {
        return Err(Error::Parse(format!("'{t}' is not of the form p/q or p")));
    }
    if let Some((_, den)) = t.split_once('/') {
        if den.trim_start_matches('+').chars().all(|c| c == '0') {
            return Err(Error::Parse(format!("'{t}' has a zero denominator")));
        }
    }
    Rational::from_str(t).map_err(|e| Error::Parse(format!("'{t}': {e}")))
}

/// `base^exp` for any integer exponent; `base` must be nonzero when `exp < 0`.
pub fn rpow(base: &Rational, exp: i64) -> Rational {
    let e = i32::try_from(exp).expect("exponent out of range");
    assert!(e >= 0 || *base != 0, "zero to a negative power");
    Rational::from(base.pow(e))
}

pub fn factorial(m: u32) -> Integer {
    Integer::from(Integer::factorial(m))
}

/// Γ(m) = (m−1)! for positive integers m.
pub fn gamma_int(m: i64) -> Result<Rational> {
    if m < 1 {
        return Err(Error::Domain(format!("gamma_int requires m >= 1, got {m}")));
    }
    Ok(Rational::from(factorial((m - 1) as u32)))
}

/// Generalized binomial coefficient a(a−1)…(a−b+1)/b!.
///
/// Zero for `b < 0`, and zero for `0 <= a < b`. For negative `a` this is the
/// polynomial continuation (−1)^b·C(b−a−1, b).
pub fn binomial(a: i64, b: i64) -> Rational {
    if b < 0 || (a >= 0 && b > a) {
        return Rational::new();
    }
    let mut num = Integer::from(1);
    for i in 0..b {
        num *= a - i;
    }
    Rational::from((num, factorial(b as u32)))
}

/// Rising factorial (a)_b = a(a+1)…(a+b−1).
pub fn pochhammer(a: i64, b: u32) -> Rational {
    let mut acc = Integer::from(1);
    for i in 0..b as i64 {
        acc *= a + i;
    }
    Rational::from(acc)
}

/// Coefficients (ascending powers of x) of the associated Laguerre polynomial
/// L_k^{(a)}(x) = Σ_{i=0..k} (−1)^i C(k+a, k−i) x^i / i!.
///
/// Negative superscripts are allowed.
pub fn laguerre_coeffs(k: u32, a: i64) -> Vec<Rational> {
    let k = k as i64;
    (0..=k)
        .map(|i| {
            let mut c = binomial(k + a, k - i);
            c /= factorial(i as u32);
            if i % 2 == 1 {
                c = -c;
            }
            c
        })
        .collect()
}

/// L_k^{(a)}(x), exact.
pub fn laguerre(k: u32, a: i64, x: &Rational) -> Rational {
    horner(&laguerre_coeffs(k, a), x)
}

/// Evaluates Σ c_i x^i exactly.
pub fn horner(coeffs: &[Rational], x: &Rational) -> Rational {
    let mut acc = Rational::new();
    for c in coeffs.iter().rev() {
        acc *= x;
        acc += c;
    }
    acc
}

/// ₂F₁(−l, b; c; z) as the exact finite sum Σ_{i=0..l} (−l)_i (b)_i / ((c)_i i!) z^i.
///
/// The sum stops as soon as an upper parameter hits zero, so a nonpositive
/// `b` may end it before `i = l`. A vanishing (c)_i before that point is a
/// domain error.
pub fn hyp2f1_terminating(l: u32, b: i64, c: i64, z: &Rational) -> Result<Rational> {
    let a = -(l as i64);
    let mut sum = Rational::new();
    let mut term = Rational::from(1);
    let mut i: i64 = 0;
    loop {
        sum += &term;
        let num = (a + i) * (b + i);
        if num == 0 {
            break;
        }
        let den = (c + i) * (i + 1);
        if den == 0 {
            return Err(Error::Domain(format!(
                "2F1({a}, {b}; {c}; z): (c)_{} vanishes before the series terminates",
                i + 1
            )));
        }
        term *= z;
        term *= Rational::from((num, den));
        i += 1;
    }
    Ok(sum)
}

/// ₁F₁(−l; c; z) as the exact finite sum Σ_{i=0..l} (−l)_i / ((c)_i i!) z^i.
pub fn hyp1f1_terminating(l: u32, c: i64, z: &Rational) -> Result<Rational> {
    let a = -(l as i64);
    let mut sum = Rational::from(1);
    let mut term = Rational::from(1);
    for i in 0..l as i64 {
        let den = (c + i) * (i + 1);
        if den == 0 {
            return Err(Error::Domain(format!(
                "1F1({a}; {c}; z): (c)_{} vanishes before the series terminates",
                i + 1
            )));
        }
        term *= z;
        term *= Rational::from((a + i, den));
        sum += &term;
    }
    Ok(sum)
}

const SERIES_MAX_TERMS: usize = 1_000_000;

/// Gauss series ₂F₁(a, b; c; z) for positive integer parameters and 0 <= z < 1,
/// summed until the relative term size drops below 2^(−precision).
pub fn hyp2f1_series(a: i64, b: i64, c: i64, z: &BigFloat) -> Result<BigFloat> {
    if a < 1 || b < 1 || c < 1 {
        return Err(Error::Domain(format!(
            "hyp2f1_series expects positive integer parameters, got ({a}, {b}; {c})"
        )));
    }
    if !(z.is_finite() && *z >= 0 && *z < 1) {
        return Err(Error::Domain(format!("hyp2f1_series requires 0 <= z < 1, got {z}")));
    }
    let prec = z.prec();
    let mut sum = BigFloat::with_val(prec, 1);
    let mut term = BigFloat::with_val(prec, 1);
    let eps = BigFloat::with_val(prec, BigFloat::i_exp(1, -(prec as i32)));
    for i in 0..SERIES_MAX_TERMS as i64 {
        let ratio = Rational::from(((a + i) * (b + i), (c + i) * (i + 1)));
        term *= &ratio;
        term *= z;
        sum += &term;
        let mut rel = BigFloat::with_val(prec, term.abs_ref());
        rel /= BigFloat::with_val(prec, sum.abs_ref());
        if rel < eps {
            return Ok(sum);
        }
    }
    Err(Error::Numeric(format!(
        "2F1({a}, {b}; {c}; {z}) did not converge in {SERIES_MAX_TERMS} terms"
    )))
}

/// Σ_{μ=1..j−1} (−1)^μ C(j−1, μ) μ^{j−1}; equals (−1)^{j−1} Γ(j).
pub fn alternating_power_sum(j: u32) -> Rational {
    let m = j as i64 - 1;
    let mut acc = Rational::new();
    for mu in 1..=m {
        let mut t = binomial(m, mu);
        t *= Integer::from(mu).pow(m as u32);
        if mu % 2 == 1 {
            acc -= t;
        } else {
            acc += t;
        }
    }
    acc
}

/// Renders an exact value as a decimal string with `digits` significant digits.
pub fn decimal(r: &Rational, digits: usize) -> String {
    let f = to_float(r, DEFAULT_PREC);
    if f.is_zero() {
        return "0".into();
    }
    let s = f.to_string_radix(10, Some(digits));
    tidy_decimal(&s)
}

// MPFR renders 0.5 as "5.0000e-1"; prefer plain notation when it is short.
fn tidy_decimal(s: &str) -> String {
    let (mant, exp) = match s.split_once('e') {
        Some((m, e)) => (m, e.parse::<i32>().unwrap_or(0)),
        None => (s, 0),
    };
    let neg = mant.starts_with('-');
    let digits: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    let point = mant.trim_start_matches('-').find('.').unwrap_or(mant.len()) as i32 + exp;
    if !(-6..=21).contains(&point) {
        return s.to_string();
    }
    let mut out = String::new();
    if point <= 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-point) as usize));
        out.push_str(&digits);
    } else if point as usize >= digits.len() {
        out.push_str(&digits);
        out.extend(std::iter::repeat_n('0', point as usize - digits.len()));
    } else {
        out.push_str(&digits[..point as usize]);
        out.push('.');
        out.push_str(&digits[point as usize..]);
    }
    if out.contains('.') {
        out = out.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    if neg {
        out.insert(0, '-');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn gamma_at_integers() {
        assert_eq!(gamma_int(1).unwrap(), 1);
        assert_eq!(gamma_int(5).unwrap(), 24);
        assert_eq!(gamma_int(10).unwrap(), 362880);
        assert!(matches!(gamma_int(0), Err(Error::Domain(_))));
        assert!(gamma_int(-3).is_err());
    }

    #[test]
    fn binomial_conventions() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(3, -1), 0);
        // C(k-1, j-1) with j > k
        assert_eq!(binomial(1, 3), 0);
        assert_eq!(binomial(-5, 0), 1);
        assert_eq!(binomial(-2, 3), -4);
    }

    #[test]
    fn pochhammer_values() {
        assert_eq!(pochhammer(3, 2), 12);
        assert_eq!(pochhammer(7, 0), 1);
        assert_eq!(pochhammer(1, 4), 24);
        assert_eq!(pochhammer(-2, 3), 0);
    }

    #[test]
    fn laguerre_values() {
        assert_eq!(laguerre(1, 0, &q("2")), -1);
        assert_eq!(laguerre(3, 2, &q("0")), 10);
        assert_eq!(laguerre(2, -1, &q("2")), 0);
    }

    #[test]
    fn laguerre_three_term_recurrence() {
        // (k+1) L_{k+1} = (2k+a+1-x) L_k - (k+a) L_{k-1}
        for a in -5i64..=5 {
            for x in ["-3", "-1/2", "0", "2"].map(q) {
                for k in 1u32..10 {
                    let lhs = Rational::from(k + 1) * laguerre(k + 1, a, &x);
                    let mut f = Rational::from(2 * k as i64 + a + 1);
                    f -= &x;
                    let rhs = f * laguerre(k, a, &x)
                        - Rational::from(k as i64 + a) * laguerre(k - 1, a, &x);
                    assert_eq!(lhs, rhs, "k={k} a={a} x={x}");
                }
            }
        }
    }

    #[test]
    fn terminating_hypergeometric() {
        assert_eq!(hyp2f1_terminating(1, 2, 3, &q("1/2")).unwrap(), q("2/3"));
        assert_eq!(hyp2f1_terminating(0, 5, -3, &q("7")).unwrap(), 1);
        assert!(matches!(
            hyp2f1_terminating(3, 2, -1, &q("1/3")),
            Err(Error::Domain(_))
        ));
        // b = 0 ends the series immediately
        assert_eq!(hyp2f1_terminating(4, 0, -2, &q("5")).unwrap(), 1);
    }

    #[test]
    fn confluent_matches_laguerre() {
        for k in 0..6u32 {
            for a in 0..4i64 {
                let z = q("-5/3");
                let mut want = hyp1f1_terminating(k, a + 1, &z).unwrap();
                want *= pochhammer(a + 1, k);
                want /= factorial(k);
                assert_eq!(laguerre(k, a, &z), want);
            }
        }
        assert!(hyp1f1_terminating(3, -1, &q("2")).is_err());
    }

    #[test]
    fn series_hypergeometric() {
        let p = DEFAULT_PREC;
        let half = BigFloat::with_val(p, 0.5);
        let got = hyp2f1_series(1, 1, 2, &half).unwrap();
        let want = BigFloat::with_val(p, 2) * BigFloat::with_val(p, 2).ln();
        assert!(BigFloat::with_val(p, &got - &want).abs() < 1e-28);

        let zero = BigFloat::with_val(p, 0);
        assert_eq!(hyp2f1_series(3, 4, 5, &zero).unwrap(), 1);

        let z = to_float(&q("1/10"), p);
        let got = hyp2f1_series(2, 3, 4, &z).unwrap();
        // brute partial sum, 1000 terms
        let mut partial = BigFloat::with_val(p, 0);
        let mut t = BigFloat::with_val(p, 1);
        for i in 0..1000i64 {
            partial += &t;
            t *= Rational::from(((2 + i) * (3 + i), (4 + i) * (i + 1)));
            t *= &z;
        }
        assert!(BigFloat::with_val(p, &got - &partial).abs() < 1e-25);

        assert!(hyp2f1_series(1, 1, 2, &BigFloat::with_val(p, 1)).is_err());
    }

    #[test]
    fn summation_identity() {
        for j in 2u32..=12 {
            let mut want = Rational::from(factorial(j - 1));
            if j % 2 == 0 {
                want = -want;
            }
            assert_eq!(alternating_power_sum(j), want, "j={j}");
        }
    }

    #[test]
    fn parsing() {
        assert_eq!(q("2/3"), Rational::from((2, 3)));
        assert_eq!(q("-4/6"), Rational::from((-2, 3)));
        assert_eq!(q("7"), 7);
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("1e3").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a/b").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn decimals() {
        assert_eq!(decimal(&q("1/2"), 15), "0.5");
        assert_eq!(decimal(&q("-14/3"), 15), "-4.66666666666667");
        assert_eq!(decimal(&q("0"), 15), "0");
        assert_eq!(decimal(&q("1234"), 15), "1234");
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn rational() -> impl Strategy<Value = Rational> {
        (-10_000i64..10_000, 1i64..5_000).prop_map(|(n, d)| Rational::from((n, d)))
    }

    proptest! {
        #[test]
        fn add_then_subtract_round_trips(x in rational(), y in rational()) {
            let z = Rational::from(&x + &y) - &y;
            prop_assert_eq!(z, x);
        }

        #[test]
        fn laguerre_relation(k in 0u32..8, a in 1i64..6, num in 1i64..40, den in 1i64..9, neg in any::<bool>()) {
            // Γ(k+1) L_k^{(a)}(x) = Γ(k+a+1) (−x)^{−a} L_{k+a}^{(−a)}(x)
            let mut x = Rational::from((num, den));
            if neg { x = -x; }
            let lhs = Rational::from(factorial(k)) * laguerre(k, a, &x);
            let rhs = Rational::from(factorial(k + a as u32))
                * rpow(&Rational::from(-&x), -a)
                * laguerre(k + a as u32, -a, &x);
            prop_assert_eq!(lhs, rhs);
        }
    }
}
