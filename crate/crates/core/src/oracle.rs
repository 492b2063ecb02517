//! Independent floating-point route to the spectral density.
//!
//! Uses the basis f_j obtained from the unitary-group integral (evaluated by
//! quadrature of its ω-integral), the Gauss hypergeometric moments h_jk and
//! the product-form normalization C. Nothing here touches the exact
//! derivative-principle objects, so agreement with [`crate::spectral`] is a
//! genuine cross-check.

use rug::ops::Pow;

use crate::error::{Error, Result};
use crate::linalg::{det_big, inverse_big};
use crate::params::EnsembleParams;
use crate::quad::integrate_big_to_inf;
use crate::specfun::{binomial, factorial, gamma_int, hyp2f1_series, pochhammer, rpow, to_float, BigFloat, Rational};

/// Largest dimension the oracle accepts; the floating determinant of h
/// degrades beyond this.
pub const ORACLE_MAX_N: u32 = 6;

const QUAD_REL_TOL: f64 = 1e-13;

#[derive(Clone, Debug)]
pub struct Oracle1 {
    pub params: EnsembleParams,
    prec: u32,
    /// h_jk^{(−)}, h_jk^{(+)} and their sum.
    pub h_neg: Vec<Vec<BigFloat>>,
    pub h_pos: Vec<Vec<BigFloat>>,
    pub h: Vec<Vec<BigFloat>>,
    /// Product-form normalization.
    pub c_product: Rational,
    /// 1/(n!·det h).
    pub c_det: BigFloat,
    // S(λ,μ) = Σ coeff[i][j] λ^i f_{j+1}(μ)
    coeff: Vec<Vec<BigFloat>>,
}

/// C = (−1)^{n(n−1)/2} / (n!·a₁^{n n₁} a₂^{n n₂} Π_j Γ(j)² Γ(n₁−j+1) Γ(n₂−j+1) C(n₁−1, j−1)).
pub fn normalization_product(p: &EnsembleParams) -> Rational {
    let (n, n1, n2) = (p.n as i64, p.n1 as i64, p.n2 as i64);
    let mut den = Rational::from(factorial(p.n));
    den *= rpow(&p.a1, n * n1) * rpow(&p.a2, n * n2);
    for j in 1..=n {
        let g = gamma_int(j).expect("j >= 1");
        den *= Rational::from(&g * &g);
        den *= gamma_int(n1 - j + 1).expect("n <= n1");
        den *= gamma_int(n2 - j + 1).expect("n <= n2");
        den *= binomial(n1 - 1, j - 1);
    }
    let mut c = Rational::from(den.recip_ref());
    if (n * (n - 1) / 2) % 2 == 1 {
        c = -c;
    }
    c
}

/// h_jk^{(−)} or h_jk^{(+)} via the Gauss series.
pub fn moment(p: &EnsembleParams, j: u32, k: u32, positive: bool, prec: u32) -> Result<BigFloat> {
    let (n, n1, n2, j, k) = (p.n as i64, p.n1 as i64, p.n2 as i64, j as i64, k as i64);
    let s = p.a_sum();
    let r = Rational::from(&p.a1 * &p.a2) / &s;
    let e = j + k + n1 + n2 - n - 1;
    let mut pref = rpow(&r, e) * gamma_int(k)?;
    let (c, z) = if positive {
        pref *= pochhammer(j + k + n2 - n, (n1 - 1) as u32) * gamma_int(j + n2 - n)?;
        (j + k + n2 - n, Rational::from(&p.a1 / &s))
    } else {
        pref *= pochhammer(k + n1, (j + n2 - n - 1) as u32) * gamma_int(n1)?;
        if (k - 1) % 2 == 1 {
            pref = -pref;
        }
        (k + n1, Rational::from(&p.a2 / &s))
    };
    let f = hyp2f1_series(k, e, c, &to_float(&z, prec))?;
    Ok(f * to_float(&pref, prec))
}

impl Oracle1 {
    pub fn new(p: &EnsembleParams, prec: u32) -> Result<Self> {
        if p.n > ORACLE_MAX_N {
            return Err(Error::Unsupported(format!(
                "the floating oracle supports n <= {ORACLE_MAX_N}, got n = {}",
                p.n
            )));
        }
        let n = p.n;
        let mut h_neg = Vec::new();
        let mut h_pos = Vec::new();
        let mut h = Vec::new();
        for j in 1..=n {
            let mut rn = Vec::new();
            let mut rp = Vec::new();
            let mut rs = Vec::new();
            for k in 1..=n {
                let a = moment(p, j, k, false, prec)?;
                let b = moment(p, j, k, true, prec)?;
                rs.push(BigFloat::with_val(prec, &a + &b));
                rn.push(a);
                rp.push(b);
            }
            h_neg.push(rn);
            h_pos.push(rp);
            h.push(rs);
        }
        let det = det_big(&h);
        let nf = BigFloat::with_val(prec, &Rational::from(factorial(n)));
        let c_det = BigFloat::with_val(prec, 1) / (det.clone() * &nf);
        let c_product = normalization_product(p);
        let cp = to_float(&c_product, prec);
        let rel = BigFloat::with_val(prec, &cp - &c_det).abs() / BigFloat::with_val(prec, cp.abs_ref());
        if rel > 1e-15 {
            return Err(Error::Consistency(format!(
                "normalizations disagree for {p}: product {} vs determinant {}",
                cp.to_f64(),
                c_det.to_f64()
            )));
        }
        // B[i][j] = n!·C·Cof_{j,i}(h) with Cof_{j,i} = det·(h⁻¹)_{i,j}
        let inv = inverse_big(&h)?;
        let scale = nf * cp * det;
        let coeff = inv
            .iter()
            .map(|row| row.iter().map(|x| BigFloat::with_val(prec, x * &scale)).collect())
            .collect();
        Ok(Self {
            params: p.clone(),
            prec,
            h_neg,
            h_pos,
            h,
            c_product,
            c_det,
            coeff,
        })
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// f_j(λ) from its ω-integral.
    pub fn f(&self, j: u32, lambda: &BigFloat) -> Result<BigFloat> {
        let p = &self.params;
        let prec = self.prec;
        let (n, n1, n2) = (p.n as i64, p.n1 as i64, p.n2 as i64);
        let jj = j as i64;
        if lambda.is_zero() {
            let r = Rational::from(&p.a1 * &p.a2) / p.a_sum();
            let e = jj + n1 + n2 - n - 1;
            return Ok(to_float(&(rpow(&r, e) * gamma_int(e)?), prec));
        }
        let a1 = to_float(&p.a1, prec);
        let a2 = to_float(&p.a2, prec);
        let rate = BigFloat::with_val(prec, &a2 / &a1) + 1u32;
        let pw = (n2 - n + jj - 1) as u32;
        let pl = (n1 - 1) as u32;
        let lam = BigFloat::with_val(prec, lambda);
        let lower = if lam.is_sign_negative() {
            -BigFloat::with_val(prec, &lam / &a2)
        } else {
            BigFloat::new(prec)
        };
        let integral = integrate_big_to_inf(
            |w| {
                let mut v = BigFloat::with_val(prec, w.pow(pw));
                let e = (-BigFloat::with_val(prec, &rate * w)).exp();
                v *= e;
                let base = BigFloat::with_val(prec, &a2 * w) + &lam;
                if base.is_sign_negative() {
                    return BigFloat::new(prec);
                }
                v * base.pow(pl)
            },
            &lower,
            QUAD_REL_TOL,
            0.0,
        )?;
        let mut pre = BigFloat::with_val(prec, a2.pow((jj + n2 - n) as u32));
        pre *= (-BigFloat::with_val(prec, &lam / &a1)).exp();
        Ok(pre * integral)
    }

    /// p(λ) = S(λ,λ)/n.
    pub fn density(&self, lambda: &BigFloat) -> Result<BigFloat> {
        let prec = self.prec;
        let n = self.params.n;
        let fs = (1..=n).map(|j| self.f(j, lambda)).collect::<Result<Vec<_>>>()?;
        let lam = BigFloat::with_val(prec, lambda);
        let mut acc = BigFloat::new(prec);
        for row in self.coeff.iter().rev() {
            acc *= &lam;
            for (b, f) in row.iter().zip(&fs) {
                acc += BigFloat::with_val(prec, b * f);
            }
        }
        Ok(acc / n)
    }
}

/// Spectral density at λ by the floating route.
pub fn oracle1_density(p: &EnsembleParams, lambda: &BigFloat) -> Result<BigFloat> {
    Oracle1::new(p, lambda.prec().max(113))?.density(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagonal_law::build_w;
    use crate::spectral::density;

    fn params(n: u32, n1: u32, n2: u32, a1: &str, a2: &str) -> EnsembleParams {
        EnsembleParams::parse(n, n1, n2, a1, a2).unwrap()
    }

    #[test]
    fn reduces_to_w_for_n_one() {
        let p = params(1, 2, 3, "2/3", "1/5");
        let o = Oracle1::new(&p, 128).unwrap();
        let w = build_w(&p);
        for x in [-1.5, -0.2, 0.0, 0.4, 2.0] {
            let lam = BigFloat::with_val(128, x);
            let got = o.density(&lam).unwrap().to_f64();
            let want = w.evaluate(&lam).to_f64();
            assert!((got - want).abs() < 1e-10 * want.abs().max(1e-300), "{x}: {got} vs {want}");
        }
    }

    #[test]
    fn normalizations_agree() {
        let p = params(2, 3, 4, "1/2", "2");
        let o = Oracle1::new(&p, 128).unwrap();
        let cp = to_float(&o.c_product, 128);
        let rel = (BigFloat::with_val(128, &cp - &o.c_det) / &cp).abs().to_f64();
        assert!(rel < 1e-12, "{rel}");
    }

    #[test]
    fn matches_exact_density() {
        let p = params(3, 4, 5, "1", "1");
        let o = Oracle1::new(&p, 128).unwrap();
        let exact = density(&p).unwrap();
        for x in [-2.0, -0.5, 0.3, 1.0, 4.0] {
            let lam = BigFloat::with_val(128, x);
            let got = o.density(&lam).unwrap().to_f64();
            let want = exact.evaluate(&lam).to_f64();
            assert!(((got - want) / want).abs() < 1e-8, "{x}: {got} vs {want}");
        }
    }

    #[test]
    fn rejects_large_n() {
        let p = params(7, 7, 7, "1", "1");
        assert!(matches!(Oracle1::new(&p, 64), Err(Error::Unsupported(_))));
    }
}
