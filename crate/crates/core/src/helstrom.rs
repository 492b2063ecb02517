//! Spectral density of the Helstrom matrix σ = ρ₁ − ρ₂ for independent
//! random density matrices: exact small-dimension tables, symmetry rules and
//! the large-n asymptotic model.

use crate::asymptotic::AsymptoticModel;
use crate::error::{Error, Result};
use crate::poly::{
    poly_definite_integral, poly_eval_big, poly_eval_rational, poly_integral, poly_linear_power, poly_mul,
    poly_reflect, poly_scale, RationalPoly,
};
use crate::specfun::{BigFloat, Rational};

const CDF_PREC: u32 = 192;

/// Exact density of σ for one (n, n₁, n₂) with n₁ ≤ n₂.
#[derive(Clone, Debug, PartialEq)]
pub struct HelstromFixture {
    pub n: u32,
    pub n1: u32,
    pub n2: u32,
    /// Density on [−1, 0], ascending coefficients.
    pub neg_poly: RationalPoly,
    /// Density on [0, 1].
    pub pos_poly: RationalPoly,
    /// Whether the positive branch is the reflection x → −x of the negative one.
    pub mirrored: bool,
    /// Tabulated ⟨|x|⟩.
    pub abs_mean: Rational,
}

struct Factored {
    scale: &'static str,
    x_power: u32,
    // (1 + sign·x)^power
    sign: i64,
    power: u32,
    coeffs: &'static [i64],
}

impl Factored {
    fn expand(&self) -> RationalPoly {
        let mut p: RationalPoly = self.coeffs.iter().map(|&c| Rational::from(c)).collect();
        p = poly_mul(&p, &poly_linear_power(1, self.sign, self.power));
        let mut shifted = vec![Rational::new(); self.x_power as usize];
        shifted.extend(p);
        poly_scale(&shifted, &self.scale.parse::<Rational>().expect("literal"))
    }
}

struct Row {
    n: u32,
    n1: u32,
    n2: u32,
    neg: Factored,
    pos: Option<Factored>,
    abs_mean: &'static str,
}

const fn neg(scale: &'static str, x_power: u32, power: u32, coeffs: &'static [i64]) -> Factored {
    Factored {
        scale,
        x_power,
        sign: 1,
        power,
        coeffs,
    }
}

const ROWS: &[Row] = &[
    Row {
        n: 2,
        n1: 2,
        n2: 2,
        neg: neg("6", 2, 2, &[2, -1]),
        pos: None,
        abs_mean: "18/35",
    },
    Row {
        n: 2,
        n1: 2,
        n2: 3,
        neg: neg("12", 2, 3, &[1, -3, 1]),
        pos: None,
        abs_mean: "10/21",
    },
    Row {
        n: 2,
        n1: 2,
        n2: 4,
        neg: neg("6", 2, 4, &[2, -8, 20, -5]),
        pos: None,
        abs_mean: "5/11",
    },
    Row {
        n: 2,
        n1: 3,
        n2: 3,
        neg: neg("30/7", 2, 4, &[4, -16, 12, -3]),
        pos: None,
        abs_mean: "100/231",
    },
    Row {
        n: 2,
        n1: 3,
        n2: 4,
        neg: neg("20", 2, 5, &[1, -5, 9, -5, 1]),
        pos: None,
        abs_mean: "175/429",
    },
    Row {
        n: 2,
        n1: 4,
        n2: 4,
        neg: neg("140/33", 2, 6, &[6, -36, 82, -72, 30, -5]),
        pos: None,
        abs_mean: "490/1287",
    },
    Row {
        n: 3,
        n1: 3,
        n2: 3,
        neg: neg(
            "8/143",
            0,
            6,
            &[24, -144, -1064, 2058, 9772, -18158, 18088, -11753, 4494, -749],
        ),
        pos: None,
        abs_mean: "1184/3315",
    },
    Row {
        n: 3,
        n1: 3,
        n2: 4,
        neg: neg(
            "2/663",
            0,
            8,
            &[
                440, -4675, 3507, 182244, -113388, -1883250, 2377170, -1645656, 727788, -193351, 23495,
            ],
        ),
        pos: Some(Factored {
            scale: "2/663",
            x_power: 0,
            sign: -1,
            power: 7,
            coeffs: &[
                440, 1925, -17338, -42351, 164496, 519078, 826140, 925386, 773052, 458963, 159074, 23495,
            ],
        }),
        abs_mean: "979/2907",
    },
    Row {
        n: 3,
        n1: 4,
        n2: 4,
        neg: neg(
            "220/88179",
            0,
            9,
            &[
                572, -5148, -6831, 198759, -76527, -2406294, 4903878, -5613012, 4481748, -2583459, 1026651, -249615,
                27735,
            ],
        ),
        pos: None,
        abs_mean: "48950/156009",
    },
    Row {
        n: 4,
        n1: 4,
        n2: 4,
        neg: neg(
            "2/646323",
            0,
            12,
            &[
                251940,
                -3023280,
                79319110,
                -807719640,
                -3849356784,
                12770088968,
                23325866928,
                -70508450649,
                97987112860,
                -97689979023,
                77811833736,
                -51349726064,
                28242904872,
                -12756361800,
                4561977896,
                -1207136637,
                208188708,
                -17349059,
            ],
        ),
        pos: None,
        abs_mean: "1495/5394",
    },
];

/// All tabulated cases, 2 ≤ n ≤ n₁ ≤ n₂ ≤ 4.
pub fn fixture_table() -> Vec<HelstromFixture> {
    ROWS.iter()
        .map(|r| {
            let neg_poly = r.neg.expand();
            let (pos_poly, mirrored) = match &r.pos {
                Some(f) => (f.expand(), false),
                None => (poly_reflect(&neg_poly), true),
            };
            HelstromFixture {
                n: r.n,
                n1: r.n1,
                n2: r.n2,
                neg_poly,
                pos_poly,
                mirrored,
                abs_mean: r.abs_mean.parse().expect("literal"),
            }
        })
        .collect()
}

/// Fixture for (n, n₁, n₂) with n₁ ≤ n₂.
pub fn lookup(n: u32, n1: u32, n2: u32) -> Result<HelstromFixture> {
    fixture_table()
        .into_iter()
        .find(|f| (f.n, f.n1, f.n2) == (n, n1, n2))
        .ok_or_else(|| {
            Error::Unsupported(format!(
                "no exact density for (n, n1, n2) = ({n}, {n1}, {n2}); tabulated cases have 2 <= n <= n1 <= n2 <= 4"
            ))
        })
}

impl HelstromFixture {
    pub fn integral(&self) -> Rational {
        let (m1, z, p1) = (Rational::from(-1), Rational::new(), Rational::from(1));
        poly_definite_integral(&self.neg_poly, &m1, &z) + poly_definite_integral(&self.pos_poly, &z, &p1)
    }

    /// ∫₀¹ p dx.
    pub fn positive_mass(&self) -> Rational {
        poly_definite_integral(&self.pos_poly, &Rational::new(), &Rational::from(1))
    }

    /// ∫|x| p dx by exact polynomial integration.
    pub fn computed_abs_mean(&self) -> Rational {
        let x = vec![Rational::new(), Rational::from(1)];
        let minus_x = vec![Rational::new(), Rational::from(-1)];
        let (m1, z, p1) = (Rational::from(-1), Rational::new(), Rational::from(1));
        poly_definite_integral(&poly_mul(&self.neg_poly, &minus_x), &m1, &z)
            + poly_definite_integral(&poly_mul(&self.pos_poly, &x), &z, &p1)
    }

    pub fn density(&self, x: &Rational) -> Rational {
        if *x < -1 || *x > 1 {
            Rational::new()
        } else if *x < 0 {
            poly_eval_rational(&self.neg_poly, x)
        } else {
            poly_eval_rational(&self.pos_poly, x)
        }
    }

    pub fn density_f64(&self, x: f64) -> f64 {
        if !(-1.0..=1.0).contains(&x) {
            return 0.0;
        }
        let x = Rational::from_f64(x).expect("finite");
        self.density(&x).to_f64()
    }

    /// Distribution function on ℝ.
    pub fn cdf(&self) -> FixtureCdf {
        let neg = poly_integral(&self.neg_poly);
        let pos = poly_integral(&self.pos_poly);
        let at_minus_one = poly_eval_rational(&neg, &Rational::from(-1));
        FixtureCdf {
            neg,
            pos,
            offset: -at_minus_one,
        }
    }
}

/// Exact antiderivatives of a fixture density.
#[derive(Clone, Debug)]
pub struct FixtureCdf {
    neg: RationalPoly,
    pos: RationalPoly,
    // F(0)
    offset: Rational,
}

impl FixtureCdf {
    pub fn eval_f64(&self, x: f64) -> f64 {
        if x <= -1.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        let xb = BigFloat::with_val(CDF_PREC, x);
        let off = BigFloat::with_val(CDF_PREC, &self.offset);
        let poly = if x < 0.0 { &self.neg } else { &self.pos };
        (off + poly_eval_big(poly, &xb)).to_f64()
    }
}

/// Tabulated ⟨|x|⟩ recomputed from the polynomials; a mismatch with the
/// stored value is an integrity error.
pub fn fixture_abs_mean(f: &HelstromFixture) -> Result<Rational> {
    let got = f.computed_abs_mean();
    if got != f.abs_mean {
        return Err(Error::Consistency(format!(
            "absolute mean of ({}, {}, {}) integrates to {got}, table has {}",
            f.n, f.n1, f.n2, f.abs_mean
        )));
    }
    Ok(got)
}

/// Density of σ at x, reflecting x → −x when n₁ > n₂.
pub fn fixture_density(n: u32, n1: u32, n2: u32, x: &Rational) -> Result<Rational> {
    if n1 <= n2 {
        Ok(lookup(n, n1, n2)?.density(x))
    } else {
        Ok(lookup(n, n2, n1)?.density(&Rational::from(-x)))
    }
}

/// Probability that a generic eigenvalue of σ is positive.
pub fn positivity_fraction_sigma(n: u32, n1: u32, n2: u32) -> Result<Rational> {
    if n1 <= n2 {
        Ok(lookup(n, n1, n2)?.positive_mass())
    } else {
        Ok(Rational::from(1) - lookup(n, n2, n1)?.positive_mass())
    }
}

/// Large-n model of σ: cⱼ = n/nⱼ and α₁ = α₂ = 1/n.
pub fn helstrom_asymptotic(n: u32, n1: u32, n2: u32) -> Result<AsymptoticModel> {
    if n == 0 || n > n1 || n > n2 {
        return Err(Error::InvalidParams(format!(
            "need 1 <= n <= n1, n2, got ({n}, {n1}, {n2})"
        )));
    }
    if n < 10 {
        log::warn!("asymptotic Helstrom density at n = {n} is a rough approximation");
    }
    let alpha = Rational::from((1, n));
    AsymptoticModel::new(
        Rational::from((n, n1)),
        Rational::from((n, n2)),
        alpha.clone(),
        alpha,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn ten_rows() {
        let t = fixture_table();
        assert_eq!(t.len(), 10);
        assert!(t.iter().all(|f| 2 <= f.n && f.n <= f.n1 && f.n1 <= f.n2 && f.n2 <= 4));
    }

    #[test]
    fn normalized_nonnegative_and_matching() {
        for f in fixture_table() {
            assert_eq!(f.integral(), 1, "({}, {}, {})", f.n, f.n1, f.n2);
            assert_eq!(fixture_abs_mean(&f).unwrap(), f.abs_mean);
            for i in 0..=200 {
                let x = Rational::from((i as i64 - 100, 100));
                assert!(f.density(&x) >= 0, "({}, {}, {}) at {x}", f.n, f.n1, f.n2);
            }
        }
    }

    #[test]
    fn stored_means() {
        let get = |n, n1, n2| lookup(n, n1, n2).unwrap().computed_abs_mean();
        assert_eq!(get(2, 2, 2), q("18/35"));
        assert_eq!(get(2, 3, 4), q("175/429"));
        assert_eq!(get(3, 3, 3), q("1184/3315"));
        assert_eq!(get(3, 4, 4), q("48950/156009"));
        assert_eq!(get(4, 4, 4), q("1495/5394"));
    }

    #[test]
    fn tampered_fixture_is_rejected() {
        let mut f = lookup(2, 2, 2).unwrap();
        f.abs_mean = q("1/2");
        assert!(matches!(fixture_abs_mean(&f), Err(Error::Consistency(_))));
    }

    #[test]
    fn densities_and_symmetry() {
        assert_eq!(fixture_density(2, 2, 2, &q("-1/2")).unwrap(), q("15/16"));
        for i in -10..=10 {
            let x = Rational::from((i, 10));
            let mx = Rational::from(-&x);
            assert_eq!(fixture_density(2, 2, 2, &x).unwrap(), fixture_density(2, 2, 2, &mx).unwrap());
            assert_eq!(fixture_density(3, 4, 3, &x).unwrap(), fixture_density(3, 3, 4, &mx).unwrap());
        }
        for f in fixture_table() {
            assert_eq!(f.density(&q("3/2")), 0);
            assert_eq!(f.density(&q("-3/2")), 0);
        }
        assert!(matches!(fixture_density(2, 2, 5, &q("0")), Err(Error::Unsupported(_))));
        assert!(matches!(fixture_density(5, 5, 5, &q("0")), Err(Error::Unsupported(_))));
    }

    #[test]
    fn continuity_at_zero_for_explicit_branches() {
        let f = lookup(3, 3, 4).unwrap();
        assert!(!f.mirrored);
        assert_eq!(f.neg_poly[0], f.pos_poly[0]);
    }

    #[test]
    fn positivity_fractions() {
        assert_eq!(positivity_fraction_sigma(2, 3, 4).unwrap(), q("1/2"));
        assert_eq!(positivity_fraction_sigma(3, 3, 3).unwrap(), q("1/2"));
        let f = positivity_fraction_sigma(3, 3, 4).unwrap();
        assert_ne!(f, q("1/2"));
        assert_eq!(positivity_fraction_sigma(3, 4, 3).unwrap(), Rational::from(1) - f);
    }

    #[test]
    fn cdf_endpoints() {
        for f in fixture_table() {
            let c = f.cdf();
            assert!(c.eval_f64(-1.0).abs() < 1e-15);
            assert!((c.eval_f64(1.0 - 1e-12) - 1.0).abs() < 1e-9);
            let mid = c.eval_f64(0.0);
            let want = 1.0 - f.positive_mass().to_f64();
            assert!((mid - want).abs() < 1e-14);
        }
    }

    #[test]
    fn asymptotic_mapping() {
        let m = helstrom_asymptotic(20, 20, 20).unwrap();
        let (lo, hi) = m.support();
        assert!((hi - 0.166511).abs() < 1e-5 && (lo + hi).abs() < 1e-10, "{lo} {hi}");
        let m = helstrom_asymptotic(50, 70, 90).unwrap();
        assert_eq!((m.c1.clone(), m.c2.clone(), m.alpha1.clone()), (q("5/7"), q("5/9"), q("1/50")));
        let m = helstrom_asymptotic(100, 400, 300).unwrap();
        assert_eq!((m.c1.clone(), m.c2.clone()), (q("1/4"), q("1/3")));
        for n in [10u32, 25, 40] {
            let a = helstrom_asymptotic(n, n, n).unwrap().support().1;
            let b = helstrom_asymptotic(2 * n, 2 * n, 2 * n).unwrap().support().1;
            assert!((b - a / 2.0).abs() < 1e-8);
        }
    }
}
