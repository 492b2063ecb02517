//! Law of a diagonal element a₁W₁,μμ − a₂W₂,μμ and its derivatives.
//!
//! The derivatives f̃ⱼ = w^{(j−1)} form the basis of the Pólya-ensemble
//! representation of the eigenvalue density.

use crate::bigcomplex::BigComplex;
use crate::error::{Error, Result};
use crate::exppoly::{ExpPolySide, ExpPolyTerm, PiecewiseExpPoly};
use crate::params::EnsembleParams;
use crate::specfun::{
    alternating_power_sum, binomial, factorial, gamma_int, hyp1f1_terminating,
    hyp2f1_terminating, laguerre_coeffs, rpow, BigFloat, Rational,
};

// Γ(n₁+n₂−1)/(Γ(n₁)Γ(n₂)) · a₁^{n₂−1} a₂^{n₁−1} / (a₁+a₂)^{n₁+n₂−1}, i.e. w(0).
fn w0_prefactor(p: &EnsembleParams) -> Rational {
    let (n1, n2) = (p.n1 as i64, p.n2 as i64);
    let mut c = gamma_int(n1 + n2 - 1).expect("n1 + n2 >= 2");
    c /= gamma_int(n1).expect("n1 >= 1");
    c /= gamma_int(n2).expect("n2 >= 1");
    c * rpow(&p.a1, n2 - 1) * rpow(&p.a2, n1 - 1) * rpow(&p.a_sum(), -(n1 + n2 - 1))
}

/// w(λ): density of a₁X₁ − a₂X₂ with X_j ~ Gamma(n_j, 1).
pub fn build_w(p: &EnsembleParams) -> PiecewiseExpPoly {
    let (n1, n2) = (p.n1 as i64, p.n2 as i64);
    let s = p.a_sum();
    let neg_rate = Rational::from(p.a2.recip_ref());
    let pos_rate = -Rational::from(p.a1.recip_ref());
    let neg = ExpPolySide::new((1..=n2).map(|nu| {
        let mut c = binomial(n1 + n2 - nu - 1, n1 - 1);
        c *= rpow(&p.a1, n2 - nu) * rpow(&p.a2, n1 - nu) * rpow(&s, -(n1 + n2 - nu));
        c /= gamma_int(nu).expect("nu >= 1");
        // (−u)^{ν−1}
        if (nu - 1) % 2 == 1 {
            c = -c;
        }
        ExpPolyTerm::new(c, (nu - 1) as u32, neg_rate.clone())
    }));
    let pos = ExpPolySide::new((1..=n1).map(|nu| {
        let mut c = binomial(n1 + n2 - nu - 1, n2 - 1);
        c *= rpow(&p.a1, n2 - nu) * rpow(&p.a2, n1 - nu) * rpow(&s, -(n1 + n2 - nu));
        c /= gamma_int(nu).expect("nu >= 1");
        ExpPolyTerm::new(c, (nu - 1) as u32, pos_rate.clone())
    }));
    PiecewiseExpPoly::new(neg, pos, w0_prefactor(p)).expect("rates have the right signs")
}

/// w(0) in closed form.
pub fn w_zero(p: &EnsembleParams) -> Rational {
    w0_prefactor(p)
}

/// Left limit of f̃ⱼ at 0, the ₂F₁(1−j, 1−n₂; 2−n₁−n₂; (a₁+a₂)/a₁) form.
pub fn ftilde_zero_left(p: &EnsembleParams, j: u32) -> Result<Rational> {
    if j == 0 {
        return Err(Error::Domain("derivative index j starts at 1".into()));
    }
    let (n1, n2, jj) = (p.n1 as i64, p.n2 as i64, j as i64);
    let z = p.a_sum() / p.a1.clone();
    let f = hyp2f1_terminating(j - 1, 1 - n2, 2 - n1 - n2, &z)?;
    let mut c = w0_prefactor(p);
    c *= rpow(&p.a2, 1 - jj);
    Ok(c * f)
}

/// Right limit of f̃ⱼ at 0, the ₂F₁(1−j, 1−n₁; 2−n₁−n₂; (a₁+a₂)/a₂) form.
pub fn ftilde_zero_right(p: &EnsembleParams, j: u32) -> Result<Rational> {
    if j == 0 {
        return Err(Error::Domain("derivative index j starts at 1".into()));
    }
    let (n1, n2, jj) = (p.n1 as i64, p.n2 as i64, j as i64);
    let z = p.a_sum() / p.a2.clone();
    let f = hyp2f1_terminating(j - 1, 1 - n1, 2 - n1 - n2, &z)?;
    let mut c = w0_prefactor(p);
    c *= rpow(&p.a1, 1 - jj);
    if (j - 1) % 2 == 1 {
        c = -c;
    }
    Ok(c * f)
}

/// f̃ⱼ = d^{j−1}w/dλ^{j−1} from the Laguerre closed forms, 1 ≤ j ≤ n₁+n₂−1.
pub fn build_ftilde(p: &EnsembleParams, j: u32) -> Result<PiecewiseExpPoly> {
    let jmax = p.max_derivative_index();
    if j == 0 || j > jmax {
        return Err(Error::Domain(format!(
            "f~_j needs 1 <= j <= {jmax} for {p}; w is only {}-times differentiable",
            jmax - 1
        )));
    }
    let (n1, n2, jj) = (p.n1 as i64, p.n2 as i64, j as i64);
    let s = p.a_sum();
    let a1_inv = Rational::from(p.a1.recip_ref());
    let a2_inv = Rational::from(p.a2.recip_ref());

    let mut neg = ExpPolySide::zero();
    for nu in 1..=n2 {
        let mut c = binomial(n1 + n2 - nu - 1, n1 - 1);
        c *= rpow(&p.a1, n2 - nu) * rpow(&p.a2, n1 - jj) * rpow(&s, -(n1 + n2 - nu));
        if (nu - 1) % 2 == 1 {
            c = -c;
        }
        // L_{ν−1}^{(j−ν)}(−λ/a₂)
        let lag = scaled_laguerre((nu - 1) as u32, jj - nu, &(-a2_inv.clone()));
        neg = neg.add(&ExpPolySide::from_poly(&lag, &a2_inv).scale(&c));
    }
    let mut pos = ExpPolySide::zero();
    let pos_rate = -a1_inv.clone();
    for nu in 1..=n1 {
        let mut c = binomial(n1 + n2 - nu - 1, n2 - 1);
        c *= rpow(&p.a1, n2 - jj) * rpow(&p.a2, n1 - nu) * rpow(&s, -(n1 + n2 - nu));
        if (nu - jj).rem_euclid(2) == 1 {
            c = -c;
        }
        let lag = scaled_laguerre((nu - 1) as u32, jj - nu, &a1_inv);
        pos = pos.add(&ExpPolySide::from_poly(&lag, &pos_rate).scale(&c));
    }
    PiecewiseExpPoly::new(neg, pos, ftilde_zero_left(p, j)?)
}

// Coefficients of L_k^{(a)}(t·λ) in λ.
fn scaled_laguerre(k: u32, a: i64, t: &Rational) -> Vec<Rational> {
    let mut scale = Rational::from(1);
    laguerre_coeffs(k, a)
        .into_iter()
        .map(|c| {
            let v = c * &scale;
            scale *= t;
            v
        })
        .collect()
}

/// True iff the left and right (j−1)-th derivatives of w agree at 0.
pub fn check_smoothness(p: &EnsembleParams, j: u32) -> Result<bool> {
    Ok(ftilde_zero_left(p, j)? == ftilde_zero_right(p, j)?)
}

/// Both forms of the characteristic function at κ.
#[derive(Clone, Debug)]
pub struct CharFnForms {
    /// (1 − i a₁κ)^{−n₁}(1 + i a₂κ)^{−n₂}
    pub product: BigComplex,
    /// Partial-fraction double sum over the two poles.
    pub partial_fractions: BigComplex,
}

pub fn char_fn_forms(p: &EnsembleParams, kappa: &BigFloat) -> CharFnForms {
    let prec = kappa.prec();
    let one = BigFloat::with_val(prec, 1);
    let a1k = BigFloat::with_val(prec, &p.a1 * kappa);
    let a2k = BigFloat::with_val(prec, &p.a2 * kappa);
    let left = BigComplex::new(one.clone(), -a1k);
    let right = BigComplex::new(one, a2k);
    let (n1, n2) = (p.n1 as i64, p.n2 as i64);
    let product = left.powi(-n1).mul(&right.powi(-n2));

    let s = p.a_sum();
    let r1 = Rational::from(&p.a1 / &s);
    let r2 = Rational::from(&p.a2 / &s);
    let mut partial = BigComplex::new(BigFloat::new(prec), BigFloat::new(prec));
    for nu in 1..=n1 {
        let c = binomial(n1 + n2 - nu - 1, n2 - 1) * rpow(&r1, n2) * rpow(&r2, n1 - nu);
        partial = partial.add(&left.powi(-nu).scale(&c));
    }
    for nu in 1..=n2 {
        let c = binomial(n1 + n2 - nu - 1, n1 - 1) * rpow(&r2, n1) * rpow(&r1, n2 - nu);
        partial = partial.add(&right.powi(-nu).scale(&c));
    }
    CharFnForms {
        product,
        partial_fractions: partial,
    }
}

/// Φ(κ) = E[e^{iκH_μμ}], product form.
pub fn char_fn(p: &EnsembleParams, kappa: &BigFloat) -> BigComplex {
    char_fn_forms(p, kappa).product
}

/// Polynomial factors of w^{(−)}(u)e^{−u/a₂} and w^{(+)}(u)e^{u/a₁} from the
/// Kummer-function resummation.
pub fn kummer_forms(p: &EnsembleParams, u: &Rational) -> Result<(Rational, Rational)> {
    let (n1, n2) = (p.n1 as i64, p.n2 as i64);
    let k = w0_prefactor(p);
    let t = Rational::from(p.a1.recip_ref()) + Rational::from(p.a2.recip_ref());
    let zneg = -(t.clone() * u);
    let zpos = t * u;
    let neg = hyp1f1_terminating((n2 - 1) as u32, 2 - n1 - n2, &zneg)? * &k;
    let pos = hyp1f1_terminating((n1 - 1) as u32, 2 - n1 - n2, &zpos)? * &k;
    Ok((neg, pos))
}

/// Checks that the polynomial factors of w^{(−)} and w^{(+)} at u equal their
/// Kummer-function resummations exactly.
pub fn check_kummer(p: &EnsembleParams, u: &Rational) -> Result<bool> {
    let w = build_w(p);
    let neg_rate = Rational::from(p.a2.recip_ref());
    let pos_rate = -Rational::from(p.a1.recip_ref());
    let neg_poly = crate::specfun::horner(&w.neg().poly_coeffs(&neg_rate), u);
    let pos_poly = crate::specfun::horner(&w.pos().poly_coeffs(&pos_rate), u);
    let (neg, pos) = kummer_forms(p, u)?;
    Ok(neg == neg_poly && pos == pos_poly)
}

/// d^k(e^{−x} x^{k+a})/dx^k = k!·e^{−x} x^a L_k^{(a)}(x), checked coefficient-exactly.
pub fn check_rodrigues(k: u32, a: u32) -> bool {
    let minus_one = Rational::from(-1);
    let mut lhs = ExpPolySide::monomial(Rational::from(1), k + a, minus_one.clone());
    for _ in 0..k {
        lhs = lhs.derivative();
    }
    let rhs = ExpPolySide::from_poly(&laguerre_coeffs(k, a as i64), &minus_one)
        .shift_power(a)
        .scale(&Rational::from(factorial(k)));
    lhs == rhs
}

/// L_k^{(a)}(x) = (−x)^{−a} Γ(k+a+1)/Γ(k+1) · L_{k+a}^{(−a)}(x) for integer
/// a ≥ −k, checked as a polynomial identity after clearing (−x)^{|a|}.
pub fn check_laguerre_relation(k: u32, a: i64) -> Result<bool> {
    let ka = k as i64 + a;
    if ka < 0 {
        return Err(Error::Domain(format!("need k + a >= 0, got k={k}, a={a}")));
    }
    let lhs = laguerre_coeffs(k, a);
    let rhs = laguerre_coeffs(ka as u32, -a);
    let kf = Rational::from(factorial(k));
    let kaf = Rational::from(factorial(ka as u32));
    // a ≥ 0: k!·(−x)^a·L_k^{(a)} = (k+a)!·L_{k+a}^{(−a)}
    // a < 0: k!·L_k^{(a)} = (k+a)!·(−x)^{−a}·L_{k+a}^{(−a)}
    let (shifted, shift, plain, plain_scale, shifted_scale) = if a >= 0 {
        (lhs, a as usize, rhs, kaf, kf)
    } else {
        (rhs, (-a) as usize, lhs, kf, kaf)
    };
    let mut left = vec![Rational::new(); shifted.len() + shift];
    for (i, c) in shifted.iter().enumerate() {
        let mut v = c.clone() * &shifted_scale;
        if shift % 2 == 1 {
            v = -v;
        }
        left[i + shift] = v;
    }
    let mut right: Vec<Rational> = plain.iter().map(|c| c.clone() * &plain_scale).collect();
    let len = left.len().max(right.len());
    left.resize(len, Rational::new());
    right.resize(len, Rational::new());
    Ok(left == right)
}

/// Σ_{μ=1..j−1} (−1)^μ C(j−1, μ) μ^{j−1} = (−1)^{j−1} Γ(j), for j ≥ 2.
pub fn check_summation(j: u32) -> bool {
    if j < 2 {
        return false;
    }
    let mut want = Rational::from(factorial(j - 1));
    if (j - 1) % 2 == 1 {
        want = -want;
    }
    alternating_power_sum(j) == want
}

/// Whether the Pfaff transformation for ₂F₁(−l, a; c; z) is guaranteed,
/// i.e. c is not an integer in [1−l, 0].
pub fn pfaff_applicable(l: u32, c: i64) -> bool {
    !(c <= 0 && c >= 1 - l as i64)
}

/// Both sides of ₂F₁(−l, a; c; z) = (1−z)^l ₂F₁(−l, c−a; c; z/(z−1)).
pub fn pfaff_pair(l: u32, a: i64, c: i64, z: &Rational) -> Result<(Rational, Rational)> {
    if *z == 1 {
        return Err(Error::Domain("Pfaff transform needs z != 1".into()));
    }
    let lhs = hyp2f1_terminating(l, a, c, z)?;
    let one_minus = Rational::from(1) - z.clone();
    let w = z.clone() / (z.clone() - Rational::from(1));
    let rhs = rpow(&one_minus, l as i64) * hyp2f1_terminating(l, c - a, c, &w)?;
    Ok((lhs, rhs))
}

/// w together with its derivatives f̃₁, …, f̃_m.
#[derive(Clone, Debug)]
pub struct DiagonalLaw {
    pub params: EnsembleParams,
    pub w: PiecewiseExpPoly,
    ftilde: Vec<PiecewiseExpPoly>,
}

impl DiagonalLaw {
    /// Builds f̃₁..f̃ₙ.
    pub fn new(params: &EnsembleParams) -> Result<Self> {
        Self::with_order(params, params.n)
    }

    /// Builds f̃₁..f̃_m, m ≤ n₁+n₂−1.
    pub fn with_order(params: &EnsembleParams, m: u32) -> Result<Self> {
        let ftilde = (1..=m.max(1))
            .map(|j| build_ftilde(params, j))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            params: params.clone(),
            w: ftilde[0].clone(),
            ftilde,
        })
    }

    /// f̃ⱼ, 1-based.
    pub fn ftilde(&self, j: u32) -> &PiecewiseExpPoly {
        &self.ftilde[j as usize - 1]
    }

    pub fn order(&self) -> u32 {
        self.ftilde.len() as u32
    }

    pub fn ftildes(&self) -> &[PiecewiseExpPoly] {
        &self.ftilde
    }

    /// f̃₁ = w and f̃_{j+1} = (f̃ⱼ)' exactly.
    pub fn check_chain(&self) -> bool {
        if self.ftilde[0] != build_w(&self.params) {
            return false;
        }
        self.ftilde
            .windows(2)
            .all(|pair| pair[0].derivative() == pair[1])
    }
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn weight() -> impl Strategy<Value = Rational> {
        (1i64..20, 1i64..20).prop_map(|(a, b)| Rational::from((a, b)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn closed_forms_match_derivative_chain(n1 in 1u32..8, n2 in 1u32..8, a1 in weight(), a2 in weight()) {
            let p = EnsembleParams::new(1, n1, n2, a1, a2).unwrap();
            let law = DiagonalLaw::with_order(&p, p.max_derivative_index()).unwrap();
            prop_assert!(law.check_chain());
            for j in 2..=p.max_derivative_index() {
                prop_assert!(check_smoothness(&p, j).unwrap());
            }
        }

        #[test]
        fn swap_mirrors_w(n1 in 1u32..7, n2 in 1u32..7, a1 in weight(), a2 in weight()) {
            let p = EnsembleParams::new(1, n1, n2, a1, a2).unwrap();
            prop_assert_eq!(build_w(&p).mirror(), build_w(&p.swapped()));
        }
    }
}
