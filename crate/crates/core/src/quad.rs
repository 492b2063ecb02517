//! Adaptive quadrature.
//!
//! Two engines: a double precision Gauss–Kronrod 7/15 rule with global
//! bisection, and an extended precision Gauss–Legendre 10/20 embedded pair
//! for the high-accuracy cross-checks.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::float::Constant;

use crate::error::{Error, Result};
use crate::specfun::BigFloat;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (i, (&x, &w)) in XGK.iter().zip(&WGK).take(7).enumerate() {
        let f1 = f(c - h * x);
        let f2 = f(c + h * x);
        kron += w * (f1 + f2);
        if i % 2 == 1 {
            gauss += WG[i / 2] * (f1 + f2);
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod integration of `f` over the finite interval [a, b].
pub fn integrate(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64> {
    const MAX_INTERVALS: usize = 20_000;
    let (v, e) = gk15(&mut f, a, b);
    let mut parts = vec![(a, b, v, e)];
    loop {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if !total.is_finite() {
            return Err(Error::Numeric("non-finite integrand".into()));
        }
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        if parts.len() >= MAX_INTERVALS {
            return Err(Error::Numeric(format!(
                "quadrature did not reach tolerance (estimate {total}, error {err})"
            )));
        }
        let (idx, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("nonempty");
        let (lo, hi, _, _) = parts.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Err(Error::Numeric("interval underflow in quadrature".into()));
        }
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

/// ∫_a^∞ f via the substitution x = a + t/(1−t).
pub fn integrate_to_inf(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64> {
    integrate(
        |t| {
            if t >= 1.0 {
                return 0.0;
            }
            let s = 1.0 - t;
            let v = f(a + t / s) / (s * s);
            if v.is_finite() { v } else { 0.0 }
        },
        0.0,
        1.0,
        abs_tol,
        rel_tol,
    )
}

/// Gauss–Legendre nodes and weights on [−1, 1] at a fixed binary precision.
#[derive(Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<BigFloat>,
    pub weights: Vec<BigFloat>,
}

impl GaussLegendre {
    pub fn new(m: usize, prec: u32) -> Self {
        let work = prec + 32;
        let pi = BigFloat::with_val(work, Constant::Pi);
        let tol = BigFloat::with_val(work, BigFloat::i_exp(1, -(prec as i32) - 8));
        let mut nodes = Vec::with_capacity(m);
        let mut weights = Vec::with_capacity(m);
        for i in 1..=m {
            let guess = BigFloat::with_val(work, (i as f64 - 0.25) / (m as f64 + 0.5));
            let mut x = BigFloat::with_val(work, &guess * &pi).cos();
            for _ in 0..200 {
                let (p, dp) = legendre_and_derivative(m, &x);
                let dx = BigFloat::with_val(work, &p / &dp);
                x -= &dx;
                if dx.abs() < tol {
                    break;
                }
            }
            let (_, dp) = legendre_and_derivative(m, &x);
            let one_minus = BigFloat::with_val(work, 1) - BigFloat::with_val(work, x.square_ref());
            let w = BigFloat::with_val(work, 2) / (one_minus * BigFloat::with_val(work, dp.square_ref()));
            nodes.push(BigFloat::with_val(prec, &x));
            weights.push(BigFloat::with_val(prec, &w));
        }
        Self { nodes, weights }
    }

    /// Shared, lazily built rule for (m, prec).
    pub fn cached(m: usize, prec: u32) -> Arc<Self> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("quadrature cache poisoned");
        guard
            .entry((m, prec))
            .or_insert_with(|| Arc::new(GaussLegendre::new(m, prec)))
            .clone()
    }

    fn apply(&self, f: &mut impl FnMut(&BigFloat) -> BigFloat, a: &BigFloat, b: &BigFloat) -> BigFloat {
        let prec = a.prec();
        let half = BigFloat::with_val(prec, b - a) / 2u32;
        let mid = BigFloat::with_val(prec, a + b) / 2u32;
        let mut acc = BigFloat::new(prec);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let t = BigFloat::with_val(prec, &half * x) + &mid;
            acc += BigFloat::with_val(prec, w * &f(&t));
        }
        acc * half
    }
}

fn legendre_and_derivative(m: usize, x: &BigFloat) -> (BigFloat, BigFloat) {
    let prec = x.prec();
    let mut p0 = BigFloat::with_val(prec, 1);
    let mut p1 = x.clone();
    for k in 2..=m {
        let kf = k as u32;
        let mut p2 = BigFloat::with_val(prec, x * &p1) * (2 * kf - 1);
        p2 -= BigFloat::with_val(prec, &p0 * (kf - 1));
        p2 /= kf;
        p0 = p1;
        p1 = p2;
    }
    // P'_m = m (x P_m − P_{m−1}) / (x² − 1)
    let num = (BigFloat::with_val(prec, x * &p1) - &p0) * (m as u32);
    let den = BigFloat::with_val(prec, x.square_ref()) - 1u32;
    let d = num / den;
    (p1, d)
}

/// Adaptive extended precision integration over [a, b] using the
/// Gauss–Legendre 10/20 pair as value and error estimate.
pub fn integrate_big(
    mut f: impl FnMut(&BigFloat) -> BigFloat,
    a: &BigFloat,
    b: &BigFloat,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<BigFloat> {
    const MAX_INTERVALS: usize = 4_000;
    let prec = a.prec();
    let coarse = GaussLegendre::cached(10, prec);
    let fine = GaussLegendre::cached(20, prec);
    let estimate = |f: &mut dyn FnMut(&BigFloat) -> BigFloat, lo: &BigFloat, hi: &BigFloat| {
        let mut g = |x: &BigFloat| f(x);
        let q20 = fine.apply(&mut g, lo, hi);
        let q10 = coarse.apply(&mut g, lo, hi);
        let err = BigFloat::with_val(prec, &q20 - &q10).abs();
        (q20, err)
    };
    let (v, e) = estimate(&mut f, a, b);
    let mut parts = vec![(a.clone(), b.clone(), v, e)];
    loop {
        let mut total = BigFloat::new(prec);
        let mut err = BigFloat::new(prec);
        for p in &parts {
            total += &p.2;
            err += &p.3;
        }
        if !total.is_finite() {
            return Err(Error::Numeric("non-finite integrand".into()));
        }
        let target = BigFloat::with_val(prec, total.abs_ref()) * rel_tol;
        if err <= target || err <= abs_tol {
            return Ok(total);
        }
        if parts.len() >= MAX_INTERVALS {
            return Err(Error::Numeric(format!(
                "extended precision quadrature did not converge (error estimate {})",
                err.to_f64()
            )));
        }
        let idx = (0..parts.len())
            .max_by(|&i, &j| parts[i].3.partial_cmp(&parts[j].3).expect("finite errors"))
            .expect("nonempty");
        let (lo, hi, _, _) = parts.swap_remove(idx);
        let mid = BigFloat::with_val(prec, &lo + &hi) / 2u32;
        let (v1, e1) = estimate(&mut f, &lo, &mid);
        let (v2, e2) = estimate(&mut f, &mid, &hi);
        parts.push((lo, mid.clone(), v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

/// ∫_a^∞ f at extended precision via x = a + t/(1−t).
pub fn integrate_big_to_inf(
    mut f: impl FnMut(&BigFloat) -> BigFloat,
    a: &BigFloat,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<BigFloat> {
    let prec = a.prec();
    let zero = BigFloat::new(prec);
    let one = BigFloat::with_val(prec, 1);
    integrate_big(
        |t| {
            let s = BigFloat::with_val(prec, 1) - t;
            let x = BigFloat::with_val(prec, t / &s) + a;
            let v = f(&x) / BigFloat::with_val(prec, s.square_ref());
            if v.is_finite() { v } else { BigFloat::new(prec) }
        },
        &zero,
        &one,
        rel_tol,
        abs_tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let v = integrate(|x| x * x * x - 2.0 * x, 0.0, 2.0, 1e-14, 1e-14).unwrap();
        assert!((v - 0.0).abs() < 1e-13);
        let v = integrate(|x| x.exp(), 0.0, 1.0, 1e-15, 1e-15).unwrap();
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn endpoint_singularity() {
        // ∫_0^1 sqrt(x) = 2/3
        let v = integrate(|x| x.sqrt(), 0.0, 1.0, 1e-12, 1e-12).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn semi_infinite() {
        let v = integrate_to_inf(|x| (-x).exp() * x * x, 0.0, 1e-13, 1e-13).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn legendre_rule_integrates_high_degree() {
        let prec = 120;
        let rule = GaussLegendre::new(20, prec);
        // exact through degree 39
        let a = BigFloat::with_val(prec, -1);
        let b = BigFloat::with_val(prec, 1);
        let got = rule.apply(&mut |x: &BigFloat| BigFloat::with_val(prec, x.pow_ref_i(38)), &a, &b);
        let want = BigFloat::with_val(prec, 2) / 39u32;
        assert!(BigFloat::with_val(prec, &got - &want).abs() < 1e-33);
    }

    #[test]
    fn extended_precision_exponential() {
        let prec = 100;
        let a = BigFloat::with_val(prec, 0);
        let got = integrate_big_to_inf(
            |x| {
                let e = BigFloat::with_val(prec, -x).exp();
                BigFloat::with_val(prec, x.square_ref()) * e
            },
            &a,
            1e-25,
            0.0,
        )
        .unwrap();
        assert!(BigFloat::with_val(prec, &got - 2u32).abs() < 1e-24);
    }

    trait PowI {
        fn pow_ref_i(&self, k: i32) -> BigFloat;
    }
    impl PowI for BigFloat {
        fn pow_ref_i(&self, k: i32) -> BigFloat {
            let mut acc = BigFloat::with_val(self.prec(), 1);
            for _ in 0..k {
                acc *= self;
            }
            acc
        }
    }
}
