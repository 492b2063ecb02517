//! Positivity probabilities and spectral moments, exact.

use serde::Serialize;

use crate::diagonal_law::DiagonalLaw;
use crate::error::{Error, Result};
use crate::exppoly::{PiecewiseExpPoly, Side};
use crate::linalg::det_rational;
use crate::params::EnsembleParams;
use crate::spectral::{normalization, MomentMatrix, SpectralKernel};
use crate::specfun::{factorial, Rational};

/// Default largest moment order.
pub const DEFAULT_GAMMA_CAP: u32 = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositivityReport {
    /// P⁺: all eigenvalues positive.
    pub p_all_pos: Rational,
    /// P⁻: all eigenvalues negative.
    pub p_all_neg: Rational,
    /// p⁺: a generic eigenvalue is positive.
    pub frac_pos: Rational,
    /// p⁻: a generic eigenvalue is negative.
    pub frac_neg: Rational,
}

#[derive(Serialize)]
struct ReportJson {
    #[serde(rename = "P_plus")]
    p_all_pos: String,
    #[serde(rename = "P_minus")]
    p_all_neg: String,
    p_plus: String,
    p_minus: String,
    decimal: ReportDecimal,
}

#[derive(Serialize)]
struct ReportDecimal {
    #[serde(rename = "P_plus")]
    p_all_pos: String,
    #[serde(rename = "P_minus")]
    p_all_neg: String,
    p_plus: String,
    p_minus: String,
}

impl PositivityReport {
    pub fn to_json(&self) -> serde_json::Value {
        let d = |r: &Rational| crate::specfun::decimal(r, 15);
        serde_json::to_value(ReportJson {
            p_all_pos: self.p_all_pos.to_string(),
            p_all_neg: self.p_all_neg.to_string(),
            p_plus: self.frac_pos.to_string(),
            p_minus: self.frac_neg.to_string(),
            decimal: ReportDecimal {
                p_all_pos: d(&self.p_all_pos),
                p_all_neg: d(&self.p_all_neg),
                p_plus: d(&self.frac_pos),
                p_minus: d(&self.frac_neg),
            },
        })
        .expect("plain data")
    }
}

/// Exact moment machinery for one parameter set: the extended moment matrix
/// plus the density used for the second route of every quantity.
#[derive(Clone, Debug)]
pub struct SpectralStatistics {
    pub mm: MomentMatrix,
    pub density: PiecewiseExpPoly,
    c_tilde: Rational,
}

impl SpectralStatistics {
    /// Prepares moments up to order `gamma_max`.
    pub fn new(p: &EnsembleParams, gamma_max: u32) -> Result<Self> {
        let law = DiagonalLaw::new(p)?;
        let mm = MomentMatrix::from_law(&law, gamma_max)?;
        let kernel = SpectralKernel::from_parts(&law, &mm)?;
        let c_tilde = normalization(&mm)?;
        Ok(Self {
            mm,
            density: kernel.density(),
            c_tilde,
        })
    }

    fn n(&self) -> usize {
        self.mm.n()
    }

    pub fn gamma_max(&self) -> u32 {
        (self.mm.cols - self.n()) as u32
    }

    // (n−1)!·C̃·Σ_i det[h̃ with column i replaced by col(i)]
    fn column_replacement_sum(&self, col: impl Fn(usize, usize) -> Rational) -> Rational {
        let n = self.n();
        let h = self.mm.square(Side::Both);
        let mut total = Rational::new();
        for i in 0..n {
            let mut m = h.clone();
            for (j, row) in m.iter_mut().enumerate() {
                row[i] = col(j, i);
            }
            total += det_rational(&m);
        }
        total * Rational::from(factorial(self.params().n - 1)) * &self.c_tilde
    }

    pub fn params(&self) -> &EnsembleParams {
        &self.mm.params
    }

    fn all_on_side(&self, side: Side) -> Rational {
        det_rational(&self.mm.square(side)) * Rational::from(factorial(self.params().n)) * &self.c_tilde
    }

    /// P⁺ = n!·C̃·det h̃⁽⁺⁾.
    pub fn prob_all_positive(&self) -> Rational {
        self.all_on_side(Side::Positive)
    }

    /// P⁻ = n!·C̃·det h̃⁽⁻⁾.
    pub fn prob_all_negative(&self) -> Rational {
        self.all_on_side(Side::Negative)
    }

    fn fraction(&self, side: Side) -> Result<Rational> {
        let src = match side {
            Side::Positive => &self.mm.entries_pos,
            _ => &self.mm.entries_neg,
        };
        let v = self.column_replacement_sum(|j, i| src[j][i].clone());
        let direct = self.density.moment_integral(0, side)?;
        if v != direct {
            return Err(Error::Consistency(format!(
                "{side:?} fraction: determinant sum {v} != density integral {direct}"
            )));
        }
        Ok(v)
    }

    /// p⁺ = ∫₀^∞ p.
    pub fn frac_positive(&self) -> Result<Rational> {
        self.fraction(Side::Positive)
    }

    /// p⁻ = ∫_{−∞}^0 p.
    pub fn frac_negative(&self) -> Result<Rational> {
        self.fraction(Side::Negative)
    }

    fn check_gamma(&self, gamma: u32) -> Result<()> {
        if gamma > self.gamma_max() {
            return Err(Error::Domain(format!(
                "moment order {gamma} exceeds the prepared maximum {}",
                self.gamma_max()
            )));
        }
        Ok(())
    }

    /// ⟨λ^γ⟩.
    pub fn moment(&self, gamma: u32) -> Result<Rational> {
        self.check_gamma(gamma)?;
        let g = gamma as usize;
        let h = &self.mm.entries;
        let v = self.column_replacement_sum(|j, i| h[j][i + g].clone());
        let direct = self.density.moment_integral(gamma, Side::Both)?;
        if v != direct {
            return Err(Error::Consistency(format!(
                "moment {gamma}: determinant sum {v} != density integral {direct}"
            )));
        }
        Ok(v)
    }

    /// ⟨|λ|^γ⟩.
    pub fn abs_moment(&self, gamma: u32) -> Result<Rational> {
        self.check_gamma(gamma)?;
        let g = gamma as usize;
        let odd = gamma % 2 == 1;
        let (hp, hn) = (&self.mm.entries_pos, &self.mm.entries_neg);
        let v = self.column_replacement_sum(|j, i| {
            let neg = &hn[j][i + g];
            if odd {
                Rational::from(&hp[j][i + g] - neg)
            } else {
                Rational::from(&hp[j][i + g] + neg)
            }
        });
        let pos = self.density.moment_integral(gamma, Side::Positive)?;
        let neg = self.density.moment_integral(gamma, Side::Negative)?;
        let direct = if odd { pos - neg } else { pos + neg };
        if v != direct {
            return Err(Error::Consistency(format!(
                "absolute moment {gamma}: determinant sum {v} != density integral {direct}"
            )));
        }
        Ok(v)
    }

    pub fn report(&self) -> Result<PositivityReport> {
        Ok(PositivityReport {
            p_all_pos: self.prob_all_positive(),
            p_all_neg: self.prob_all_negative(),
            frac_pos: self.frac_positive()?,
            frac_neg: self.frac_negative()?,
        })
    }
}

pub fn positivity(p: &EnsembleParams) -> Result<PositivityReport> {
    SpectralStatistics::new(p, 0)?.report()
}

pub fn prob_all_positive(p: &EnsembleParams) -> Result<Rational> {
    Ok(SpectralStatistics::new(p, 0)?.prob_all_positive())
}

pub fn prob_all_negative(p: &EnsembleParams) -> Result<Rational> {
    Ok(SpectralStatistics::new(p, 0)?.prob_all_negative())
}

pub fn frac_positive(p: &EnsembleParams) -> Result<Rational> {
    SpectralStatistics::new(p, 0)?.frac_positive()
}

pub fn frac_negative(p: &EnsembleParams) -> Result<Rational> {
    SpectralStatistics::new(p, 0)?.frac_negative()
}

fn capped(gamma: u32, cap: u32) -> Result<()> {
    if gamma > cap {
        return Err(Error::Domain(format!(
            "moment order {gamma} exceeds the cap {cap}; raise the cap explicitly"
        )));
    }
    Ok(())
}

/// ⟨λ^γ⟩ with γ ≤ [`DEFAULT_GAMMA_CAP`].
pub fn moment(p: &EnsembleParams, gamma: u32) -> Result<Rational> {
    moment_with_cap(p, gamma, DEFAULT_GAMMA_CAP)
}

pub fn moment_with_cap(p: &EnsembleParams, gamma: u32, cap: u32) -> Result<Rational> {
    capped(gamma, cap)?;
    SpectralStatistics::new(p, gamma)?.moment(gamma)
}

/// ⟨|λ|^γ⟩ with γ ≤ [`DEFAULT_GAMMA_CAP`].
pub fn abs_moment(p: &EnsembleParams, gamma: u32) -> Result<Rational> {
    abs_moment_with_cap(p, gamma, DEFAULT_GAMMA_CAP)
}

pub fn abs_moment_with_cap(p: &EnsembleParams, gamma: u32, cap: u32) -> Result<Rational> {
    capped(gamma, cap)?;
    SpectralStatistics::new(p, gamma)?.abs_moment(gamma)
}

/// a₁n₁ − a₂n₂.
pub fn mean_closed_form(p: &EnsembleParams) -> Rational {
    Rational::from(&p.a1 * p.n1) - Rational::from(&p.a2 * p.n2)
}

/// a₁²n₁(n+n₁) + a₂²n₂(n+n₂) − 2a₁a₂n₁n₂.
pub fn second_moment_closed_form(p: &EnsembleParams) -> Rational {
    let (n, n1, n2) = (p.n, p.n1, p.n2);
    let a1sq = Rational::from(p.a1.square_ref());
    let a2sq = Rational::from(p.a2.square_ref());
    a1sq * (n1 * (n + n1)) + a2sq * (n2 * (n + n2))
        - Rational::from(&p.a1 * &p.a2) * (2 * n1 * n2)
}
