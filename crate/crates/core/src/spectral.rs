//! Exact moment matrix, correlation kernel and spectral density at finite n.

use crate::diagonal_law::{w_zero, DiagonalLaw};
use crate::error::{Error, Result};
use crate::exppoly::{ExpPolySide, PiecewiseExpPoly, Side};
use crate::linalg::{det_big, det_rational, is_upper_triangular, upper_triangular_inverse, RationalMatrix};
use crate::params::EnsembleParams;
use crate::specfun::{binomial, factorial, gamma_int, hyp2f1_terminating, rpow, BigFloat, Rational};

/// h̃ⱼₖ = ∫ λ^{k−1} f̃ⱼ(λ) dλ with its split over the two half-lines.
///
/// Rows j = 1..n; columns k = 1..cols with cols ≥ n. Columns past n carry the
/// higher moments needed for ⟨λ^γ⟩.
#[derive(Clone, Debug)]
pub struct MomentMatrix {
    pub params: EnsembleParams,
    pub cols: usize,
    pub entries_neg: RationalMatrix,
    pub entries_pos: RationalMatrix,
    pub entries: RationalMatrix,
}

/// Finite ν-sum form of h̃ⱼₖ^{(±)}. The factor C(k−1, j−1) vanishes for j > k.
pub fn moment_finite_sum(p: &EnsembleParams, j: u32, k: u32, side: Side) -> Result<Rational> {
    if j > k {
        return Ok(Rational::new());
    }
    let (n1, n2, j, k) = (p.n1 as i64, p.n2 as i64, j as i64, k as i64);
    let s = p.a_sum();
    let common = binomial(k - 1, j - 1) * gamma_int(j)?;
    let mut acc = Rational::new();
    match side {
        Side::Negative => {
            for nu in 1..=n2 {
                let mut t = binomial(n1 + n2 - nu - 1, n1 - 1) * &common;
                t *= rpow(&p.a1, n2 - nu) * rpow(&p.a2, n1 + k - j) * rpow(&s, -(n1 + n2 - nu));
                t *= gamma_int(nu + k - j)? / gamma_int(nu)?;
                acc += t;
            }
            if (k - 1) % 2 == 1 {
                acc = -acc;
            }
        }
        Side::Positive => {
            for nu in 1..=n1 {
                let mut t = binomial(n1 + n2 - nu - 1, n2 - 1) * &common;
                t *= rpow(&p.a1, n2 + k - j) * rpow(&p.a2, n1 - nu) * rpow(&s, -(n1 + n2 - nu));
                t *= gamma_int(nu + k - j)? / gamma_int(nu)?;
                acc += t;
            }
            if (j - 1) % 2 == 1 {
                acc = -acc;
            }
        }
        Side::Both => {
            return Ok(moment_finite_sum(p, j as u32, k as u32, Side::Negative)?
                + moment_finite_sum(p, j as u32, k as u32, Side::Positive)?)
        }
    }
    Ok(acc)
}

/// Gauss hypergeometric form of h̃ⱼₖ^{(±)}, valid for every j, k.
pub fn moment_hypergeometric(p: &EnsembleParams, j: u32, k: u32, side: Side) -> Result<Rational> {
    let (n1, n2, jj, kk) = (p.n1 as i64, p.n2 as i64, j as i64, k as i64);
    let c = 2 - n1 - n2;
    let mut pref = gamma_int(kk)? * w_zero(p);
    let v = match side {
        Side::Negative => {
            let z = p.a_sum() / p.a1.clone();
            pref *= rpow(&p.a2, kk - jj + 1);
            // (−1)^{k+1}
            if kk % 2 == 0 {
                pref = -pref;
            }
            pref * hyp2f1_terminating((n2 - 1) as u32, 1 - jj + kk, c, &z)?
        }
        Side::Positive => {
            let z = p.a_sum() / p.a2.clone();
            pref *= rpow(&p.a1, kk - jj + 1);
            // (−1)^{j+1}
            if jj % 2 == 0 {
                pref = -pref;
            }
            pref * hyp2f1_terminating((n1 - 1) as u32, 1 - jj + kk, c, &z)?
        }
        Side::Both => {
            return Ok(moment_hypergeometric(p, j, k, Side::Negative)?
                + moment_hypergeometric(p, j, k, Side::Positive)?)
        }
    };
    Ok(v)
}

/// Builds h̃ with `extra_cols` additional columns, cross-checking every entry
/// against the closed forms.
pub fn build_moment_matrix(p: &EnsembleParams, extra_cols: u32) -> Result<MomentMatrix> {
    let law = DiagonalLaw::new(p)?;
    MomentMatrix::from_law(&law, extra_cols)
}

impl MomentMatrix {
    pub fn from_law(law: &DiagonalLaw, extra_cols: u32) -> Result<Self> {
        let p = &law.params;
        let n = p.n as usize;
        let cols = n + extra_cols as usize;
        let mut entries_neg = vec![Vec::with_capacity(cols); n];
        let mut entries_pos = vec![Vec::with_capacity(cols); n];
        let mut entries = vec![Vec::with_capacity(cols); n];
        for j in 1..=n as u32 {
            let f = law.ftilde(j);
            for k in 1..=cols as u32 {
                let neg = f.moment_integral(k - 1, Side::Negative)?;
                let pos = f.moment_integral(k - 1, Side::Positive)?;
                for (side, direct) in [(Side::Negative, &neg), (Side::Positive, &pos)] {
                    let hyp = moment_hypergeometric(p, j, k, side)?;
                    if hyp != *direct {
                        return Err(Error::Consistency(format!(
                            "h~({j},{k}) {side:?}: integral {direct} != 2F1 form {hyp} for {p}"
                        )));
                    }
                    if j <= k {
                        let sum = moment_finite_sum(p, j, k, side)?;
                        if sum != *direct {
                            return Err(Error::Consistency(format!(
                                "h~({j},{k}) {side:?}: integral {direct} != finite sum {sum} for {p}"
                            )));
                        }
                    }
                }
                let total = Rational::from(&neg + &pos);
                if j > k && total != 0 {
                    return Err(Error::Consistency(format!(
                        "h~({j},{k}) = {total} below the diagonal for {p}"
                    )));
                }
                entries_neg[j as usize - 1].push(neg);
                entries_pos[j as usize - 1].push(pos);
                entries[j as usize - 1].push(total);
            }
        }
        Ok(Self {
            params: p.clone(),
            cols,
            entries_neg,
            entries_pos,
            entries,
        })
    }

    pub fn n(&self) -> usize {
        self.params.n as usize
    }

    /// Leading n×n block of the chosen part.
    pub fn square(&self, side: Side) -> RationalMatrix {
        let src = match side {
            Side::Negative => &self.entries_neg,
            Side::Positive => &self.entries_pos,
            Side::Both => &self.entries,
        };
        src.iter().map(|r| r[..self.n()].to_vec()).collect()
    }

    /// Column k (1-based) of the chosen part.
    pub fn column(&self, k: usize, side: Side) -> Vec<Rational> {
        let src = match side {
            Side::Negative => &self.entries_neg,
            Side::Positive => &self.entries_pos,
            Side::Both => &self.entries,
        };
        src.iter().map(|r| r[k - 1].clone()).collect()
    }

    /// n!·det h̃ computed by elimination, without using triangularity.
    pub fn scaled_determinant(&self) -> Rational {
        det_rational(&self.square(Side::Both)) * Rational::from(factorial(self.params.n))
    }
}

/// C̃ = 1/(n!·Π h̃ⱼⱼ).
pub fn normalization(mm: &MomentMatrix) -> Result<Rational> {
    let mut prod = Rational::from(factorial(mm.params.n));
    for j in 0..mm.n() {
        if mm.entries[j][j] == 0 {
            return Err(Error::Degenerate(format!(
                "h~({0},{0}) vanishes for {1}",
                j + 1,
                mm.params
            )));
        }
        prod *= &mm.entries[j][j];
    }
    Ok(Rational::from(prod.recip_ref()))
}

/// (−1)^{n(n−1)/2} / Π_{j=1..n} j!.
pub fn normalization_closed_form(n: u32) -> Rational {
    let mut prod = Rational::from(1);
    for j in 1..=n {
        prod *= Rational::from(factorial(j));
    }
    let mut c = Rational::from(prod.recip_ref());
    if (n as u64 * (n as u64).saturating_sub(1) / 2) % 2 == 1 {
        c = -c;
    }
    c
}

/// S(λ, μ) = Σ_{i,j} B[i][j] λ^{i−1} f̃ⱼ(μ).
#[derive(Clone, Debug)]
pub struct SpectralKernel {
    pub params: EnsembleParams,
    /// B, row i = power of λ, column j = basis index.
    pub coeff: RationalMatrix,
    pub basis: Vec<PiecewiseExpPoly>,
    // g_i = Σ_j B[i][j] f̃ⱼ, the functions biorthogonal to 1, λ, …, λ^{n−1}
    dual: Vec<PiecewiseExpPoly>,
}

pub fn build_kernel(p: &EnsembleParams) -> Result<SpectralKernel> {
    let law = DiagonalLaw::new(p)?;
    let mm = MomentMatrix::from_law(&law, 0)?;
    SpectralKernel::from_parts(&law, &mm)
}

impl SpectralKernel {
    /// Expands each column-replaced determinant along the replaced column:
    /// B[i][j] = n!·C̃·Cof_{j,i}(h̃).
    pub fn from_parts(law: &DiagonalLaw, mm: &MomentMatrix) -> Result<Self> {
        let n = mm.n();
        let h = mm.square(Side::Both);
        if !is_upper_triangular(&h) {
            return Err(Error::Consistency("h~ is not upper triangular".into()));
        }
        let det = det_rational(&h);
        let inv = upper_triangular_inverse(&h)?;
        // Cof_{j,i} = det·(h̃⁻¹)_{i,j}
        let cof: RationalMatrix = (0..n)
            .map(|j| (0..n).map(|i| Rational::from(&det * &inv[i][j])).collect())
            .collect();
        let scale = Rational::from(factorial(mm.params.n)) * normalization(mm)?;
        let coeff: RationalMatrix = (0..n)
            .map(|i| (0..n).map(|j| Rational::from(&scale * &cof[j][i])).collect())
            .collect();
        let basis: Vec<PiecewiseExpPoly> = law.ftildes()[..n].to_vec();
        let dual = coeff
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&basis)
                    .fold(basis[0].scale(&Rational::new()), |acc, (b, f)| acc.add(&f.scale(b)))
            })
            .collect();
        Ok(Self {
            params: mm.params.clone(),
            coeff,
            basis,
            dual,
        })
    }

    pub fn n(&self) -> usize {
        self.params.n as usize
    }

    /// g_i(μ) = Σ_j B[i][j] f̃ⱼ(μ), 1-based.
    pub fn dual(&self, i: usize) -> &PiecewiseExpPoly {
        &self.dual[i - 1]
    }

    pub fn evaluate(&self, lambda: &BigFloat, mu: &BigFloat) -> BigFloat {
        let prec = lambda.prec().max(mu.prec());
        let mut acc = BigFloat::new(prec);
        for g in self.dual.iter().rev() {
            acc *= lambda;
            acc += g.evaluate(mu);
        }
        acc
    }

    /// S(λ, λ) as an exact piecewise exp-poly.
    pub fn diagonal(&self) -> PiecewiseExpPoly {
        self.dual
            .iter()
            .enumerate()
            .map(|(i, g)| g.shift_power(i as u32))
            .reduce(|a, b| a.add(&b))
            .expect("n >= 1")
    }

    /// p(λ) = S(λ, λ)/n.
    pub fn density(&self) -> PiecewiseExpPoly {
        self.diagonal().scale(&Rational::from((1, self.params.n)))
    }

    /// Checks ∫S(λ,ν)S(ν,μ)dν = S(λ,μ) coefficient by coefficient.
    pub fn check_idempotence(&self) -> Result<bool> {
        let n = self.n();
        for (i, g) in self.dual.iter().enumerate() {
            let mut composed = g.scale(&Rational::new());
            for (ip, gp) in self.dual.iter().enumerate() {
                let mono = ExpPolySide::monomial(Rational::from(1), ip as u32, Rational::new());
                let m = g.neg().multiply(&mono).moment_integral(0, Side::Negative)?
                    + g.pos().multiply(&mono).moment_integral(0, Side::Positive)?;
                if m != 0 {
                    composed = composed.add(&gp.scale(&m));
                }
            }
            if composed.neg() != g.neg() || composed.pos() != g.pos() {
                log::debug!("kernel composition differs in row {} of {n}", i + 1);
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// R_r(λ₁..λ_r) = det[S(λⱼ, λₖ)].
    pub fn correlation(&self, points: &[BigFloat]) -> Result<BigFloat> {
        let r = points.len();
        if r == 0 || r > self.n() {
            return Err(Error::Domain(format!(
                "correlation order must satisfy 1 <= r <= n = {}, got {r}",
                self.n()
            )));
        }
        let m: Vec<Vec<BigFloat>> = points
            .iter()
            .map(|x| points.iter().map(|y| self.evaluate(x, y)).collect())
            .collect();
        Ok(det_big(&m))
    }
}

/// Exact spectral density p(λ) = S(λ,λ)/n.
pub fn density(p: &EnsembleParams) -> Result<PiecewiseExpPoly> {
    Ok(build_kernel(p)?.density())
}

/// det[S(λⱼ, λₖ)] at the given points.
pub fn correlation(p: &EnsembleParams, points: &[BigFloat]) -> Result<BigFloat> {
    build_kernel(p)?.correlation(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagonal_law::build_w;

    fn params(n: u32, n1: u32, n2: u32, a1: &str, a2: &str) -> EnsembleParams {
        EnsembleParams::parse(n, n1, n2, a1, a2).unwrap()
    }

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn small_moment_matrices() {
        let p = params(2, 3, 4, "1/2", "2");
        let mm = build_moment_matrix(&p, 2).unwrap();
        assert_eq!(mm.entries[0][0], 1);
        assert_eq!(mm.entries[1][1], -1);
        assert_eq!(mm.entries[1][0], 0);
        assert_eq!(mm.cols, 4);
        // first moment of w is E[H_μμ] = a₁n₁ − a₂n₂
        assert_eq!(mm.entries[0][1], q("3/2") - q("8"));
    }

    #[test]
    fn per_side_entries_below_the_diagonal_cancel() {
        let p = params(3, 4, 5, "1", "1");
        let mm = build_moment_matrix(&p, 0).unwrap();
        assert_ne!(mm.entries_neg[1][0], 0);
        assert_eq!(
            Rational::from(&mm.entries_neg[1][0] + &mm.entries_pos[1][0]),
            0
        );
        assert_eq!(moment_finite_sum(&p, 2, 1, Side::Negative).unwrap(), 0);
    }

    #[test]
    fn normalization_identity() {
        let p = params(3, 3, 5, "1", "1");
        let mm = build_moment_matrix(&p, 0).unwrap();
        let want = Rational::from(-12);
        assert_eq!(mm.scaled_determinant(), want);
        assert_eq!(normalization(&mm).unwrap(), q("-1/12"));
        assert_eq!(normalization_closed_form(1), 1);
        assert_eq!(normalization_closed_form(2), q("-1/2"));
        assert_eq!(normalization_closed_form(3), q("-1/12"));
    }

    #[test]
    fn kernel_basics() {
        let p = params(1, 2, 3, "2/3", "1/5");
        let k = build_kernel(&p).unwrap();
        assert_eq!(k.density(), build_w(&p));

        let p = params(4, 5, 7, "2/3", "8/7");
        let k = build_kernel(&p).unwrap();
        let diag = k.diagonal();
        assert_eq!(diag.moment_integral(0, Side::Both).unwrap(), 4);
        assert_eq!(k.density().moment_integral(0, Side::Both).unwrap(), 1);
        // B is the inverse of h̃
        let mm = build_moment_matrix(&p, 0).unwrap();
        let h = mm.square(Side::Both);
        for i in 0..4 {
            for j in 0..4 {
                let mut s = Rational::new();
                for m in 0..4 {
                    s += Rational::from(&k.coeff[i][m] * &h[m][j]);
                }
                assert_eq!(s, (i == j) as i32);
            }
        }
    }

    #[test]
    fn kernel_is_a_projection() {
        for p in [params(2, 3, 4, "1/2", "2"), params(3, 4, 5, "2/3", "8/7")] {
            assert!(build_kernel(&p).unwrap().check_idempotence().unwrap(), "{p}");
        }
    }

    #[test]
    fn symmetric_density_is_even() {
        let p = params(3, 4, 4, "7/2", "7/2");
        let d = density(&p).unwrap();
        assert_eq!(d.mirror(), d);
    }

    #[test]
    fn exchange_symmetry() {
        let p = params(3, 4, 6, "1/3", "2");
        assert_eq!(density(&p).unwrap().mirror(), density(&p.swapped()).unwrap());
    }

    #[test]
    fn correlations() {
        let p = params(2, 3, 3, "1", "1");
        let k = build_kernel(&p).unwrap();
        let prec = 128;
        let x = BigFloat::with_val(prec, 0.7);
        let r1 = k.correlation(std::slice::from_ref(&x)).unwrap();
        let dens = k.density().evaluate(&x) * 2u32;
        assert!(BigFloat::with_val(prec, &r1 - &dens).abs() < 1e-30);
        let r2 = k.correlation(&[x.clone(), x.clone()]).unwrap();
        assert!(r2.abs() < 1e-20);
        assert!(matches!(
            k.correlation(&[x.clone(), x.clone(), x]),
            Err(Error::Domain(_))
        ));
        for a in 0..10 {
            for b in 0..10 {
                let la = BigFloat::with_val(prec, -6.0 + 1.3 * a as f64);
                let lb = BigFloat::with_val(prec, -6.0 + 1.3 * b as f64);
                assert!(k.correlation(&[la, lb]).unwrap() >= -1e-20);
            }
        }
    }

    #[test]
    fn density_nonnegative_on_grid() {
        for p in [params(4, 5, 7, "2/3", "8/7"), params(3, 3, 8, "1/3", "2")] {
            let d = density(&p).unwrap();
            for i in 0..400 {
                let x = BigFloat::with_val(128, -40.0 + 0.2 * i as f64);
                assert!(d.evaluate(&x) >= -1e-20, "{p} at {x}");
            }
        }
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn weight() -> impl Strategy<Value = Rational> {
        (1i64..12, 1i64..12).prop_map(|(a, b)| Rational::from((a, b)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn normalization_and_triangularity(n in 1u32..5, d1 in 0u32..3, d2 in 0u32..3, a1 in weight(), a2 in weight()) {
            let p = EnsembleParams::new(n, n + d1, n + d2, a1, a2).unwrap();
            let mm = build_moment_matrix(&p, 2).unwrap();
            prop_assert!(is_upper_triangular(&mm.square(Side::Both)));
            let c = normalization(&mm).unwrap();
            prop_assert_eq!(c, normalization_closed_form(n));
            let k = SpectralKernel::from_parts(&DiagonalLaw::new(&p).unwrap(), &mm).unwrap();
            prop_assert_eq!(k.density().moment_integral(0, Side::Both).unwrap(), Rational::from(1));
        }
    }
}
