//! Large-n spectral density of α₁𝒲₁ − α₂𝒲₂ with 𝒲ⱼ = Wⱼ/nⱼ.
//!
//! The Stieltjes transform solves a cubic whose coefficients are linear in z.
//! The density follows from Cardano's formula with a real cube root; the
//! support edges are real roots of the quartic (η² − 4ζ³)/λ².

use nalgebra::Matrix4;
use num_complex::Complex64;
use rug::float::Constant;

use crate::error::{Error, Result};
use crate::params::EnsembleParams;
use crate::poly::{poly_add, poly_div_monomial, poly_eval_big, poly_mul, poly_scale, poly_trim, RationalPoly};
use crate::specfun::{to_f64, BigFloat, Rational};

const PREC: u32 = 128;

/// Parameters (c₁, c₂, α₁, α₂) and the support [λ₋, λ₊].
#[derive(Clone, Debug)]
pub struct AsymptoticModel {
    pub c1: Rational,
    pub c2: Rational,
    pub alpha1: Rational,
    pub alpha2: Rational,
    pub lambda_minus: f64,
    pub lambda_plus: f64,
    quartic: RationalPoly,
}

/// Cubic coefficients (g₀, g₁, g₂, g₃) of the Stieltjes equation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cubic {
    pub g0: Complex64,
    pub g1: Complex64,
    pub g2: Complex64,
    pub g3: Complex64,
}

impl Cubic {
    pub fn eval(&self, s: Complex64) -> Complex64 {
        ((self.g3 * s + self.g2) * s + self.g1) * s + self.g0
    }

    fn derivative(&self, s: Complex64) -> Complex64 {
        (self.g3 * s * 3.0 + self.g2 * 2.0) * s + self.g1
    }

    /// All three roots by simultaneous Aberth iteration, Newton-polished.
    pub fn roots(&self) -> Result<[Complex64; 3]> {
        if self.g3 == Complex64::new(0.0, 0.0) {
            return Err(Error::Degenerate("leading cubic coefficient vanishes".into()));
        }
        let (a, b, c) = (self.g2 / self.g3, self.g1 / self.g3, self.g0 / self.g3);
        let monic = |s: Complex64| ((s + a) * s + b) * s + c;
        let dmonic = |s: Complex64| (s * 3.0 + a * 2.0) * s + b;
        let radius = 1.0 + a.norm().max(b.norm()).max(c.norm());
        let mut r: [Complex64; 3] =
            std::array::from_fn(|k| Complex64::from_polar(radius, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / 3.0));
        for _ in 0..500 {
            let mut moved = 0.0f64;
            for i in 0..3 {
                let ratio = monic(r[i]) / dmonic(r[i]);
                let mut rep = Complex64::new(0.0, 0.0);
                for j in 0..3 {
                    if j != i {
                        rep += Complex64::new(1.0, 0.0) / (r[i] - r[j]);
                    }
                }
                let step = ratio / (Complex64::new(1.0, 0.0) - ratio * rep);
                if step.is_finite() {
                    r[i] -= step;
                    moved = moved.max(step.norm() / (1.0 + r[i].norm()));
                }
            }
            if moved < 1e-16 {
                break;
            }
        }
        for x in r.iter_mut() {
            for _ in 0..3 {
                let d = self.derivative(*x);
                if d.norm() == 0.0 {
                    break;
                }
                let step = self.eval(*x) / d;
                if !step.is_finite() {
                    break;
                }
                *x -= step;
            }
        }
        Ok(r)
    }
}

impl AsymptoticModel {
    pub fn new(c1: Rational, c2: Rational, alpha1: Rational, alpha2: Rational) -> Result<Self> {
        for (name, c) in [("c1", &c1), ("c2", &c2)] {
            if *c <= 0 || *c > 1 {
                return Err(Error::InvalidParams(format!("{name} must lie in (0, 1], got {c}")));
            }
        }
        for (name, a) in [("alpha1", &alpha1), ("alpha2", &alpha2)] {
            if *a <= 0 {
                return Err(Error::InvalidParams(format!("{name} must be positive, got {a}")));
            }
        }
        let mut m = Self {
            c1,
            c2,
            alpha1,
            alpha2,
            lambda_minus: 0.0,
            lambda_plus: 0.0,
            quartic: Vec::new(),
        };
        m.quartic = m.support_quartic()?;
        let (lo, hi) = m.find_support()?;
        m.lambda_minus = lo;
        m.lambda_plus = hi;
        Ok(m)
    }

    /// Model of H = a₁W₁ − a₂W₂: cⱼ = n/nⱼ, αⱼ = nⱼaⱼ.
    pub fn from_unscaled(p: &EnsembleParams) -> Result<Self> {
        Self::new(
            Rational::from((p.n, p.n1)),
            Rational::from((p.n, p.n2)),
            Rational::from(&p.a1 * p.n1),
            Rational::from(&p.a2 * p.n2),
        )
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lambda_minus, self.lambda_plus)
    }

    // g₀..g₃ as polynomials in λ
    fn coeff_polys(&self) -> [RationalPoly; 4] {
        let (c1, c2, a1, a2) = (&self.c1, &self.c2, &self.alpha1, &self.alpha2);
        let c1c2 = Rational::from(c1 * c2);
        let a1a2 = Rational::from(a1 * a2);
        let g3 = vec![Rational::new(), Rational::from(&c1c2 * &a1a2)];
        let g2 = vec![
            (c1c2.clone() - c1 - c2) * &a1a2,
            Rational::from(c2 * a2) - Rational::from(c1 * a1),
        ];
        let one = Rational::from(1);
        let g1 = vec![
            Rational::from(&one - c1) * a1 - Rational::from(&one - c2) * a2,
            Rational::from(-1),
        ];
        let g0 = vec![Rational::from(-1)];
        [poly_trim(g0), poly_trim(g1), poly_trim(g2), poly_trim(g3)]
    }

    /// ζ = g₂² − 3g₁g₃ and η = 2g₂³ − 9g₁g₂g₃ + 27g₀g₃², exactly.
    pub fn zeta_eta(&self) -> (RationalPoly, RationalPoly) {
        let [g0, g1, g2, g3] = self.coeff_polys();
        let g2sq = poly_mul(&g2, &g2);
        let zeta = poly_add(&g2sq, &poly_scale(&poly_mul(&g1, &g3), &Rational::from(-3)));
        let eta = poly_add(
            &poly_add(
                &poly_scale(&poly_mul(&g2sq, &g2), &Rational::from(2)),
                &poly_scale(&poly_mul(&poly_mul(&g1, &g2), &g3), &Rational::from(-9)),
            ),
            &poly_scale(&poly_mul(&g0, &poly_mul(&g3, &g3)), &Rational::from(27)),
        );
        (zeta, eta)
    }

    /// η² − 4ζ³ (degree 6).
    pub fn discriminant(&self) -> RationalPoly {
        let (zeta, eta) = self.zeta_eta();
        poly_add(
            &poly_mul(&eta, &eta),
            &poly_scale(&poly_mul(&poly_mul(&zeta, &zeta), &zeta), &Rational::from(-4)),
        )
    }

    fn support_quartic(&self) -> Result<RationalPoly> {
        poly_div_monomial(&self.discriminant(), 2)
    }

    /// (η² − 4ζ³)/λ², exact quotient.
    pub fn quartic(&self) -> &[Rational] {
        &self.quartic
    }

    fn find_support(&self) -> Result<(f64, f64)> {
        let q = &self.quartic;
        if q.len() != 5 {
            return Err(Error::Degenerate(format!(
                "support polynomial has degree {} instead of 4",
                q.len().saturating_sub(1)
            )));
        }
        let lead = to_f64(&q[4]);
        let mut comp = Matrix4::<f64>::zeros();
        for i in 1..4 {
            comp[(i, i - 1)] = 1.0;
        }
        for i in 0..4 {
            comp[(i, 3)] = -to_f64(&q[i]) / lead;
        }
        let eig = comp.complex_eigenvalues();
        let mut real: Vec<f64> = Vec::new();
        for z in eig.iter() {
            if z.im.abs() <= 1e-7 * (1.0 + z.re.abs()) {
                if let Some(r) = self.polish_root(z.re) {
                    real.push(r);
                }
            }
        }
        real.sort_by(f64::total_cmp);
        real.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + a.abs()));
        if real.len() < 2 {
            return Err(Error::Degenerate(format!(
                "support quartic has {} simple real root(s), need two",
                real.len()
            )));
        }
        if real.len() > 2 {
            log::warn!(
                "support quartic has {} real roots {:?}; using the outermost pair",
                real.len(),
                real
            );
        }
        let (lo, hi) = (real[0], real[real.len() - 1]);
        let width = hi - lo;
        for x in [lo - 1e-6 * width, hi + 1e-6 * width] {
            if poly_eval_big(q, &BigFloat::with_val(PREC, x)) >= 0 {
                log::warn!("support quartic is not negative just outside the edge at {x}");
            }
        }
        Ok((lo, hi))
    }

    // Bisection on the exact quotient around an approximate root.
    fn polish_root(&self, x0: f64) -> Option<f64> {
        let q = &self.quartic;
        let f = |x: &BigFloat| poly_eval_big(q, x);
        let mut delta = 1e-9 * (1.0 + x0.abs());
        for _ in 0..12 {
            let mut a = BigFloat::with_val(PREC, x0 - delta);
            let mut b = BigFloat::with_val(PREC, x0 + delta);
            let fa = f(&a);
            let fb = f(&b);
            if fa.is_zero() {
                return Some(a.to_f64());
            }
            if fb.is_zero() {
                return Some(b.to_f64());
            }
            if fa.is_sign_negative() != fb.is_sign_negative() {
                let neg_at_a = fa.is_sign_negative();
                for _ in 0..60 {
                    let mid = BigFloat::with_val(PREC, &a + &b) / 2u32;
                    let fm = f(&mid);
                    if fm.is_zero() {
                        return Some(mid.to_f64());
                    }
                    if fm.is_sign_negative() == neg_at_a {
                        a = mid;
                    } else {
                        b = mid;
                    }
                }
                return Some((BigFloat::with_val(PREC, &a + &b) / 2u32).to_f64());
            }
            delta *= 10.0;
        }
        None
    }

    /// Cubic coefficients at complex z.
    pub fn cubic_coeffs(&self, z: Complex64) -> Cubic {
        let [g0, g1, g2, g3] = self.coeff_polys();
        let ev = |p: &RationalPoly| {
            let mut acc = Complex64::new(0.0, 0.0);
            for c in p.iter().rev() {
                acc = acc * z + to_f64(c);
            }
            acc
        };
        Cubic {
            g0: ev(&g0),
            g1: ev(&g1),
            g2: ev(&g2),
            g3: ev(&g3),
        }
    }

    /// s(z) for Im z > 0: the root continued from s ≈ −1/z at large Im z.
    pub fn stieltjes(&self, z: Complex64) -> Result<Complex64> {
        if !(z.im > 0.0) {
            return Err(Error::Domain(format!("stieltjes needs Im z > 0, got {z}")));
        }
        let scale = 1.0 + z.re.abs() + to_f64(&self.alpha1) + to_f64(&self.alpha2);
        let mut y = (1e3 * scale).max(z.im);
        let mut zc = Complex64::new(z.re, y);
        let roots = self.cubic_coeffs(zc).roots()?;
        let mut s = nearest(&roots, -Complex64::new(1.0, 0.0) / zc);
        while y > z.im {
            y = (y / 2.0).max(z.im);
            zc = Complex64::new(z.re, y);
            let roots = self.cubic_coeffs(zc).roots()?;
            s = nearest(&roots, s);
        }
        let cubic = self.cubic_coeffs(z);
        let residual = cubic.eval(s).norm();
        if residual > 1e-10 * z.norm().powi(3).max(1.0) {
            return Err(Error::BranchSelection(format!(
                "cubic residual {residual:e} at z = {z}"
            )));
        }
        if !(s.im > 0.0) {
            return Err(Error::BranchSelection(format!(
                "continued root {s} at z = {z} is not in the upper half-plane"
            )));
        }
        Ok(s)
    }

    /// p̂(λ) from Cardano's formula with a real cube root.
    pub fn density(&self, lambda: f64) -> Result<f64> {
        if !lambda.is_finite() {
            return Err(Error::Domain(format!("density needs a finite λ, got {lambda}")));
        }
        if lambda < self.lambda_minus || lambda > self.lambda_plus {
            return Ok(0.0);
        }
        if lambda == 0.0 {
            let h = 1e-9 * (self.lambda_plus - self.lambda_minus);
            let a = self.density_inside(-h)?;
            let b = self.density_inside(h)?;
            return Ok(0.5 * (a + b));
        }
        self.density_inside(lambda)
    }

    fn density_inside(&self, lambda: f64) -> Result<f64> {
        let x = BigFloat::with_val(PREC, lambda);
        let [_, _, _, g3] = self.coeff_polys();
        let (zeta, eta) = self.zeta_eta();
        let g3v = poly_eval_big(&g3, &x);
        let z = poly_eval_big(&zeta, &x);
        let e = poly_eval_big(&eta, &x);
        let mut disc = BigFloat::with_val(PREC, e.square_ref());
        disc -= BigFloat::with_val(PREC, z.square_ref()) * &z * 4u32;
        if disc.is_sign_negative() {
            // rounding just inside an edge
            disc = BigFloat::new(PREC);
        }
        let arg = (e + disc.sqrt()) / 2u32;
        // MPFR's cube root is the real one for negative arguments
        let g = arg.cbrt();
        if g.clone().abs() < 1e-300 {
            return Err(Error::Numeric(format!("G vanishes at λ = {lambda}")));
        }
        let diff = BigFloat::with_val(PREC, &g - BigFloat::with_val(PREC, &z / &g));
        let pi = BigFloat::with_val(PREC, Constant::Pi);
        let sqrt3 = BigFloat::with_val(PREC, 3).sqrt();
        let den = sqrt3 * pi * g3v * 2u32;
        let mut p = diff / den;
        if lambda < 0.0 {
            p = -p;
        }
        Ok(p.to_f64())
    }

    /// (1/π)·Im s(λ + iε).
    pub fn density_from_stieltjes(&self, lambda: f64, eps: f64) -> Result<f64> {
        let s = self.stieltjes(Complex64::new(lambda, eps))?;
        Ok(s.im / std::f64::consts::PI)
    }
}

/// Distribution function of p̂ tabulated on a uniform grid over the support.
#[derive(Clone, Debug)]
pub struct AsymptoticCdf {
    xs: Vec<f64>,
    fs: Vec<f64>,
}

impl AsymptoticCdf {
    /// Linear interpolation between grid nodes.
    pub fn eval(&self, x: f64) -> f64 {
        let last = self.xs.len() - 1;
        if x <= self.xs[0] {
            return 0.0;
        }
        if x >= self.xs[last] {
            return self.fs[last];
        }
        let i = self.xs.partition_point(|&t| t <= x) - 1;
        let w = (x - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
        self.fs[i] + w * (self.fs[i + 1] - self.fs[i])
    }

    pub fn total_mass(&self) -> f64 {
        self.fs[self.fs.len() - 1]
    }
}

impl AsymptoticModel {
    /// ∫_{λ₋}^x p̂ at `intervals + 1` nodes.
    pub fn cdf_table(&self, intervals: usize) -> Result<AsymptoticCdf> {
        let intervals = intervals.max(2);
        let (lo, hi) = self.support();
        let mut xs: Vec<f64> = (0..=intervals)
            .map(|i| lo + (hi - lo) * i as f64 / intervals as f64)
            .collect();
        if lo < 0.0 && hi > 0.0 {
            let k = xs.partition_point(|&t| t < 0.0);
            if xs[k] != 0.0 {
                xs.insert(k, 0.0);
            }
        }
        let mut fs = vec![0.0];
        let mut acc = 0.0;
        for w in xs.windows(2) {
            acc += crate::quad::integrate(|x| self.density(x).unwrap_or(0.0), w[0], w[1], 1e-14, 1e-10)?;
            fs.push(acc);
        }
        Ok(AsymptoticCdf { xs, fs })
    }
}

fn nearest(roots: &[Complex64; 3], target: Complex64) -> Complex64 {
    *roots
        .iter()
        .min_by(|a, b| (**a - target).norm().total_cmp(&(**b - target).norm()))
        .expect("three roots")
}

/// Convenience wrapper: p̂(λ) for the given model.
pub fn density_asymptotic(model: &AsymptoticModel, lambda: f64) -> Result<f64> {
    model.density(lambda)
}
