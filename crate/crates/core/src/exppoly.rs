//! Exact piecewise exponential-polynomials.
//!
//! A [`PiecewiseExpPoly`] is Σ c·λ^p·e^{rλ} on λ < 0, another such sum on
//! λ > 0, and a separately stored rational value at λ = 0. The diagonal law
//! w, its derivatives and the finite-n spectral density all live in this
//! representation, so integration, differentiation and products stay exact.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{factorial, parse_rational, rpow, to_float, BigFloat, Rational, DEFAULT_PREC};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpPolyTerm {
    pub coeff: Rational,
    pub power: u32,
    pub rate: Rational,
}

impl ExpPolyTerm {
    pub fn new(coeff: Rational, power: u32, rate: Rational) -> Self {
        Self { coeff, power, rate }
    }
}

/// Which part of the real line an integral runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    /// (−∞, 0)
    Negative,
    /// (0, ∞)
    Positive,
    Both,
}

/// A finite sum Σ c·λ^p·e^{rλ} with merged `(rate, power)` keys and no zero
/// coefficients. Terms are kept sorted by rate, then power.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExpPolySide {
    terms: Vec<ExpPolyTerm>,
}

impl ExpPolySide {
    pub fn new(terms: impl IntoIterator<Item = ExpPolyTerm>) -> Self {
        let mut merged: BTreeMap<(Rational, u32), Rational> = BTreeMap::new();
        for t in terms {
            *merged.entry((t.rate, t.power)).or_default() += t.coeff;
        }
        let terms = merged
            .into_iter()
            .filter(|(_, c)| *c != 0)
            .map(|((rate, power), coeff)| ExpPolyTerm { coeff, power, rate })
            .collect();
        Self { terms }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// Σ coeffs[p]·λ^p·e^{rate·λ}.
    pub fn from_poly(coeffs: &[Rational], rate: &Rational) -> Self {
        Self::new(
            coeffs
                .iter()
                .enumerate()
                .map(|(p, c)| ExpPolyTerm::new(c.clone(), p as u32, rate.clone())),
        )
    }

    pub fn monomial(coeff: Rational, power: u32, rate: Rational) -> Self {
        Self::new([ExpPolyTerm::new(coeff, power, rate)])
    }

    pub fn terms(&self) -> &[ExpPolyTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.terms.iter().chain(&other.terms).cloned())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&Rational::from(-1)))
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if *s == 0 {
            return Self::zero();
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| ExpPolyTerm::new(Rational::from(&t.coeff * s), t.power, t.rate.clone()))
                .collect(),
        }
    }

    /// λ^k times this side.
    pub fn shift_power(&self, k: u32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| ExpPolyTerm::new(t.coeff.clone(), t.power + k, t.rate.clone()))
                .collect(),
        }
    }

    /// Distributed product; powers and rates add.
    pub fn multiply(&self, other: &Self) -> Self {
        Self::new(self.terms.iter().flat_map(|a| {
            other.terms.iter().map(move |b| {
                ExpPolyTerm::new(
                    Rational::from(&a.coeff * &b.coeff),
                    a.power + b.power,
                    Rational::from(&a.rate + &b.rate),
                )
            })
        }))
    }

    /// Term-wise d/dλ.
    pub fn derivative(&self) -> Self {
        Self::new(self.terms.iter().flat_map(|t| {
            let mut out = vec![ExpPolyTerm::new(
                Rational::from(&t.coeff * &t.rate),
                t.power,
                t.rate.clone(),
            )];
            if t.power > 0 {
                out.push(ExpPolyTerm::new(
                    Rational::from(&t.coeff * t.power),
                    t.power - 1,
                    t.rate.clone(),
                ));
            }
            out
        }))
    }

    /// The one-sided limit at λ = 0.
    pub fn value_at_zero(&self) -> Rational {
        self.terms
            .iter()
            .filter(|t| t.power == 0)
            .map(|t| t.coeff.clone())
            .sum()
    }

    /// Polynomial coefficients multiplying e^{rate·λ}.
    pub fn poly_coeffs(&self, rate: &Rational) -> Vec<Rational> {
        let mut out = Vec::new();
        for t in self.terms.iter().filter(|t| t.rate == *rate) {
            let p = t.power as usize;
            if out.len() <= p {
                out.resize(p + 1, Rational::new());
            }
            out[p] = t.coeff.clone();
        }
        out
    }

    /// Evaluates at `x`, working at the precision of `x`.
    pub fn evaluate(&self, x: &BigFloat) -> BigFloat {
        let prec = x.prec();
        let mut total = BigFloat::new(prec);
        let mut i = 0;
        while i < self.terms.len() {
            let rate = &self.terms[i].rate;
            let mut j = i;
            while j < self.terms.len() && self.terms[j].rate == *rate {
                j += 1;
            }
            // Horner over the powers sharing this rate
            let group = &self.terms[i..j];
            let top = group.last().map(|t| t.power).unwrap_or(0);
            let mut acc = BigFloat::new(prec);
            let mut idx = group.len();
            for p in (0..=top).rev() {
                acc *= x;
                if idx > 0 && group[idx - 1].power == p {
                    acc += to_float(&group[idx - 1].coeff, prec);
                    idx -= 1;
                }
            }
            let mut e = to_float(rate, prec);
            e *= x;
            acc *= e.exp();
            total += acc;
            i = j;
        }
        total
    }

    /// ∫ λ^k·f(λ) dλ over one half-line, exactly.
    ///
    /// Uses ∫₀^∞ λ^m e^{−λ/a} = m!·a^{m+1} and its mirror on (−∞, 0).
    pub fn moment_integral(&self, k: u32, side: Side) -> Result<Rational> {
        let mut acc = Rational::new();
        for t in &self.terms {
            let m = t.power + k;
            let ok = match side {
                Side::Negative => t.rate > 0,
                Side::Positive => t.rate < 0,
                Side::Both => {
                    return Err(Error::Domain(
                        "a single side cannot be integrated over the whole line".into(),
                    ))
                }
            };
            if !ok {
                return Err(Error::Domain(format!(
                    "rate {} is not integrable on the {:?} half-line",
                    t.rate, side
                )));
            }
            let scale = rpow(&Rational::from(t.rate.abs_ref()), -(m as i64) - 1);
            let mut v = Rational::from(factorial(m)) * scale * &t.coeff;
            if side == Side::Negative && m % 2 == 1 {
                v = -v;
            }
            acc += v;
        }
        Ok(acc)
    }

    /// The antiderivative that vanishes where every e^{rλ} does (r ≠ 0).
    ///
    /// ∫ λ^p e^{rλ} = e^{rλ} Σ_{m=0..p} (−1)^m p!/(p−m)! λ^{p−m} / r^{m+1}.
    pub fn antiderivative(&self) -> Result<Self> {
        let mut out = Vec::new();
        for t in &self.terms {
            if t.rate == 0 {
                return Err(Error::Domain("antiderivative needs nonzero rates".into()));
            }
            let p = t.power;
            for m in 0..=p {
                let mut c = Rational::from((factorial(p), factorial(p - m)));
                c /= rpow(&t.rate, m as i64 + 1);
                c *= &t.coeff;
                if m % 2 == 1 {
                    c = -c;
                }
                out.push(ExpPolyTerm::new(c, p - m, t.rate.clone()));
            }
        }
        Ok(Self::new(out))
    }
}

/// Exp-polynomial on each half-line plus an exact value at the origin.
///
/// Negative-side rates are > 0 and positive-side rates < 0, so every moment
/// is finite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseExpPoly {
    neg: ExpPolySide,
    pos: ExpPolySide,
    at_zero: Rational,
}

impl PiecewiseExpPoly {
    pub fn new(neg: ExpPolySide, pos: ExpPolySide, at_zero: Rational) -> Result<Self> {
        if let Some(t) = neg.terms.iter().find(|t| t.rate <= 0) {
            return Err(Error::Domain(format!(
                "negative-side rate must be > 0, got {}",
                t.rate
            )));
        }
        if let Some(t) = pos.terms.iter().find(|t| t.rate >= 0) {
            return Err(Error::Domain(format!(
                "positive-side rate must be < 0, got {}",
                t.rate
            )));
        }
        Ok(Self { neg, pos, at_zero })
    }

    pub fn neg(&self) -> &ExpPolySide {
        &self.neg
    }

    pub fn pos(&self) -> &ExpPolySide {
        &self.pos
    }

    pub fn at_zero(&self) -> &Rational {
        &self.at_zero
    }

    pub fn left_limit(&self) -> Rational {
        self.neg.value_at_zero()
    }

    pub fn right_limit(&self) -> Rational {
        self.pos.value_at_zero()
    }

    pub fn evaluate(&self, x: &BigFloat) -> BigFloat {
        if x.is_zero() {
            to_float(&self.at_zero, x.prec())
        } else if x.is_sign_negative() {
            self.neg.evaluate(x)
        } else {
            self.pos.evaluate(x)
        }
    }

    pub fn evaluate_rational(&self, x: &Rational, prec: u32) -> BigFloat {
        self.evaluate(&to_float(x, prec))
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.evaluate(&BigFloat::with_val(DEFAULT_PREC, x)).to_f64()
    }

    /// Term-wise derivative. The new value at zero is the left limit of the
    /// differentiated negative side; callers must already know the function is
    /// differentiable there.
    pub fn derivative(&self) -> Self {
        let neg = self.neg.derivative();
        let pos = self.pos.derivative();
        let at_zero = neg.value_at_zero();
        Self { neg, pos, at_zero }
    }

    pub fn moment_integral(&self, k: u32, side: Side) -> Result<Rational> {
        match side {
            Side::Negative => self.neg.moment_integral(k, Side::Negative),
            Side::Positive => self.pos.moment_integral(k, Side::Positive),
            Side::Both => Ok(self.neg.moment_integral(k, Side::Negative)?
                + self.pos.moment_integral(k, Side::Positive)?),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            neg: self.neg.add(&other.neg),
            pos: self.pos.add(&other.pos),
            at_zero: Rational::from(&self.at_zero + &other.at_zero),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&Rational::from(-1)))
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self {
            neg: self.neg.scale(s),
            pos: self.pos.scale(s),
            at_zero: Rational::from(&self.at_zero * s),
        }
    }

    /// λ^k·f(λ).
    pub fn shift_power(&self, k: u32) -> Self {
        Self {
            neg: self.neg.shift_power(k),
            pos: self.pos.shift_power(k),
            at_zero: if k == 0 { self.at_zero.clone() } else { Rational::new() },
        }
    }

    /// f(−λ).
    pub fn mirror(&self) -> Self {
        let flip = |side: &ExpPolySide| {
            ExpPolySide::new(side.terms.iter().map(|t| {
                let c = if t.power % 2 == 1 { Rational::from(-&t.coeff) } else { t.coeff.clone() };
                ExpPolyTerm::new(c, t.power, Rational::from(-&t.rate))
            }))
        };
        Self {
            neg: flip(&self.pos),
            pos: flip(&self.neg),
            at_zero: self.at_zero.clone(),
        }
    }

    /// Exact distribution function x ↦ ∫_{−∞}^x f.
    pub fn cdf_function(&self) -> PiecewiseCdf {
        PiecewiseCdf {
            neg: self.neg.antiderivative().expect("rates validated on construction"),
            pos: self.pos.antiderivative().expect("rates validated on construction"),
            mass: self
                .moment_integral(0, Side::Both)
                .expect("rates validated on construction"),
        }
    }

    /// ∫_{−∞}^x f, at the precision of `x`.
    pub fn cdf(&self, x: &BigFloat) -> BigFloat {
        self.cdf_function().evaluate(x)
    }

    pub fn cdf_f64(&self, x: f64) -> f64 {
        self.cdf(&BigFloat::with_val(DEFAULT_PREC, x)).to_f64()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ExpPolyRepr::from(self)).expect("plain data")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let repr: ExpPolyRepr =
            serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        repr.try_into()
    }
}

/// Precomputed antiderivatives of a [`PiecewiseExpPoly`].
#[derive(Clone, Debug)]
pub struct PiecewiseCdf {
    neg: ExpPolySide,
    pos: ExpPolySide,
    mass: Rational,
}

impl PiecewiseCdf {
    pub fn total_mass(&self) -> &Rational {
        &self.mass
    }

    pub fn evaluate(&self, x: &BigFloat) -> BigFloat {
        if x.is_sign_negative() && !x.is_zero() {
            return self.neg.evaluate(x);
        }
        // ∫_0^x = total − ∫_x^∞, and ∫_x^∞ is minus the antiderivative at x
        let mut out = to_float(&self.mass, x.prec());
        out += self.pos.evaluate(x);
        out
    }

    pub fn eval_f64(&self, x: f64, prec: u32) -> f64 {
        self.evaluate(&BigFloat::with_val(prec, x)).to_f64()
    }
}

impl fmt::Display for PiecewiseExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |s: &ExpPolySide| {
            if s.is_zero() {
                return "0".to_string();
            }
            s.terms
                .iter()
                .map(|t| format!("({})·λ^{}·e^({}·λ)", t.coeff, t.power, t.rate))
                .collect::<Vec<_>>()
                .join(" + ")
        };
        write!(
            f,
            "λ<0: {}; λ=0: {}; λ>0: {}",
            side(&self.neg),
            self.at_zero,
            side(&self.pos)
        )
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    c: String,
    p: u32,
    r: String,
}

#[derive(Serialize, Deserialize)]
struct ExpPolyRepr {
    neg: Vec<TermRepr>,
    pos: Vec<TermRepr>,
    zero: String,
}

impl From<&PiecewiseExpPoly> for ExpPolyRepr {
    fn from(f: &PiecewiseExpPoly) -> Self {
        let terms = |s: &ExpPolySide| {
            s.terms
                .iter()
                .map(|t| TermRepr {
                    c: t.coeff.to_string(),
                    p: t.power,
                    r: t.rate.to_string(),
                })
                .collect()
        };
        ExpPolyRepr {
            neg: terms(&f.neg),
            pos: terms(&f.pos),
            zero: f.at_zero.to_string(),
        }
    }
}

impl TryFrom<ExpPolyRepr> for PiecewiseExpPoly {
    type Error = Error;

    fn try_from(r: ExpPolyRepr) -> Result<Self> {
        let side = |ts: Vec<TermRepr>| -> Result<ExpPolySide> {
            let terms = ts
                .into_iter()
                .map(|t| Ok(ExpPolyTerm::new(parse_rational(&t.c)?, t.p, parse_rational(&t.r)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(ExpPolySide::new(terms))
        };
        PiecewiseExpPoly::new(side(r.neg)?, side(r.pos)?, parse_rational(&r.zero)?)
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn laplace() -> PiecewiseExpPoly {
        PiecewiseExpPoly::new(
            ExpPolySide::monomial(q("1/2"), 0, q("1")),
            ExpPolySide::monomial(q("1/2"), 0, q("-1")),
            q("1/2"),
        )
        .unwrap()
    }

    #[test]
    fn evaluate_simple() {
        let f = PiecewiseExpPoly::new(
            ExpPolySide::zero(),
            ExpPolySide::monomial(q("1"), 1, q("-1")),
            q("0"),
        )
        .unwrap();
        let v = f.eval_f64(1.0);
        assert!((v - (-1.0f64).exp()).abs() < 1e-15);
        let g = laplace();
        assert_eq!(g.evaluate(&BigFloat::with_val(100, 0)), 0.5);
        assert_eq!(f.evaluate(&BigFloat::with_val(100, 0)), 0);
    }

    #[test]
    fn derivative_of_simple_terms() {
        let f = ExpPolySide::monomial(q("1"), 1, q("-1"));
        let want = ExpPolySide::new([
            ExpPolyTerm::new(q("1"), 0, q("-1")),
            ExpPolyTerm::new(q("-1"), 1, q("-1")),
        ]);
        assert_eq!(f.derivative(), want);

        let g = ExpPolySide::monomial(q("3"), 0, q("2/5"));
        assert_eq!(g.derivative(), ExpPolySide::monomial(q("6/5"), 0, q("2/5")));
    }

    #[test]
    fn moments() {
        let f = ExpPolySide::monomial(q("1"), 2, q("-2"));
        assert_eq!(f.moment_integral(0, Side::Positive).unwrap(), q("1/4"));
        let g = ExpPolySide::monomial(q("-1"), 1, q("1"));
        assert_eq!(g.moment_integral(0, Side::Negative).unwrap(), q("1"));
        assert_eq!(laplace().moment_integral(0, Side::Both).unwrap(), 1);
        assert_eq!(laplace().moment_integral(2, Side::Both).unwrap(), 2);
        assert_eq!(laplace().moment_integral(1, Side::Both).unwrap(), 0);
        assert!(matches!(
            g.moment_integral(0, Side::Positive),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn wrong_sign_rates_rejected() {
        let bad = ExpPolySide::monomial(q("1"), 0, q("1"));
        assert!(PiecewiseExpPoly::new(ExpPolySide::zero(), bad.clone(), q("0")).is_err());
        let bad = ExpPolySide::monomial(q("1"), 0, q("0"));
        assert!(PiecewiseExpPoly::new(bad, ExpPolySide::zero(), q("0")).is_err());
    }

    #[test]
    fn products() {
        let a = ExpPolySide::monomial(q("1"), 0, q("-1"));
        let b = ExpPolySide::monomial(q("1"), 1, q("-1"));
        assert_eq!(a.multiply(&b), ExpPolySide::monomial(q("1"), 1, q("-2")));

        let c = ExpPolySide::monomial(q("1"), 0, q("3/2"));
        let d = ExpPolySide::monomial(q("1"), 0, q("-3/2"));
        assert_eq!(c.multiply(&d), ExpPolySide::monomial(q("1"), 0, q("0")));

        let three = |r: &str| {
            ExpPolySide::new((0..3).map(|p| ExpPolyTerm::new(q("2"), p, q(r))))
        };
        let prod = three("-1").multiply(&three("-2/3"));
        assert!(prod.terms().len() <= 9);
    }

    #[test]
    fn cdf_of_laplace() {
        let f = laplace();
        for x in [-3.0, -0.5, 0.0, 0.25, 4.0] {
            let want = if x < 0.0 { 0.5 * f64::exp(x) } else { 1.0 - 0.5 * f64::exp(-x) };
            assert!((f.cdf_f64(x) - want).abs() < 1e-15, "x={x}");
        }
    }

    #[test]
    fn mirror_swaps_sides() {
        let f = PiecewiseExpPoly::new(
            ExpPolySide::monomial(q("2"), 1, q("3")),
            ExpPolySide::monomial(q("5"), 2, q("-1/2")),
            q("0"),
        )
        .unwrap();
        let m = f.mirror();
        for x in [-1.5, -0.2, 0.7, 2.0] {
            assert!((m.eval_f64(x) - f.eval_f64(-x)).abs() < 1e-14);
        }
        assert_eq!(m.mirror(), f);
    }

    #[test]
    fn json_round_trip() {
        let f = PiecewiseExpPoly::new(
            ExpPolySide::monomial(q("-2/7"), 3, q("5/3")),
            ExpPolySide::monomial(q("1/9"), 0, q("-1")),
            q("4/11"),
        )
        .unwrap();
        let v = f.to_json();
        assert_eq!(v["zero"], "4/11");
        assert_eq!(v["neg"][0]["c"], "-2/7");
        assert_eq!(v["neg"][0]["p"], 3);
        assert_eq!(PiecewiseExpPoly::from_json(&v).unwrap(), f);
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn side(rate: Rational) -> impl Strategy<Value = ExpPolySide> {
        proptest::collection::vec((-50i64..50, 1i64..20, 0u32..5), 0..5).prop_map(move |ts| {
            ExpPolySide::new(
                ts.into_iter()
                    .map(|(n, d, p)| ExpPolyTerm::new(Rational::from((n, d)), p, rate.clone())),
            )
        })
    }

    proptest! {
        #[test]
        fn add_sub_exact(f in side(Rational::from((-2, 3))), g in side(Rational::from((-2, 3)))) {
            prop_assert_eq!(f.add(&g).sub(&g), f);
        }

        #[test]
        fn integration_by_parts(f in side(Rational::from((-3, 2))), k in 1u32..6) {
            // ∫₀^∞ λ^k f' = −k ∫₀^∞ λ^{k−1} f   (boundary terms vanish for k ≥ 1)
            let lhs = f.derivative().moment_integral(k, Side::Positive).unwrap();
            let rhs = -Rational::from(k) * f.moment_integral(k - 1, Side::Positive).unwrap();
            prop_assert_eq!(lhs, rhs);
            // k = 0: ∫₀^∞ f' = −f(0+)
            let lhs0 = f.derivative().moment_integral(0, Side::Positive).unwrap();
            prop_assert_eq!(lhs0, -f.value_at_zero());
        }

        #[test]
        fn antiderivative_inverts_derivative(f in side(Rational::from((2, 5)))) {
            prop_assert_eq!(f.antiderivative().unwrap().derivative(), f);
        }
    }
}
