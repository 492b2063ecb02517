//! Sampling of Ginibre, Wishart-difference and density matrices, a cyclic
//! Jacobi eigensolver for Hermitian matrices, and empirical comparison
//! statistics.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::params::EnsembleParams;
use crate::quad;
use crate::specfun::to_f64;

/// Matrices drawn per random stream.
pub const CHUNK: usize = 64;

pub const DEFAULT_BINS: usize = 80;

const MAX_SWEEPS: usize = 100;

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Domain("ragged rows".into()));
        }
        let data: Vec<Complex64> = rows.iter().flatten().copied().collect();
        if data.iter().any(|z| !z.is_finite()) {
            return Err(Error::Domain("matrix entries must be finite".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_real(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    /// M·M†.
    pub fn gram(&self) -> Self {
        let (r, c) = (self.rows, self.cols);
        let mut out = Self::zeros(r, r);
        for i in 0..r {
            let ri = &self.data[i * c..(i + 1) * c];
            for j in i..r {
                let rj = &self.data[j * c..(j + 1) * c];
                let s: Complex64 = ri.iter().zip(rj).map(|(a, b)| a * b.conj()).sum();
                out.set(i, j, s);
                out.set(j, i, s.conj());
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Domain("dimension mismatch in product".into()));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Domain("dimension mismatch in difference".into()));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// max |M − M†|.
    pub fn hermitian_defect(&self) -> f64 {
        if self.rows != self.cols {
            return f64::INFINITY;
        }
        let mut d = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                d = d.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        d
    }

    /// (M + M†)/2.
    pub fn symmetrized(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.rows {
            out.set(i, i, Complex64::new(self.get(i, i).re, 0.0));
            for j in i + 1..self.cols {
                let v = (self.get(i, j) + self.get(j, i).conj()) * 0.5;
                out.set(i, j, v);
                out.set(j, i, v.conj());
            }
        }
        out
    }
}

/// Complex normal variate with E|g|² = 1 by Box–Muller.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    // 1 − U lies in (0, 1]
    let u: f64 = 1.0 - rng.random::<f64>();
    let theta = std::f64::consts::TAU * rng.random::<f64>();
    Complex64::from_polar((-u.ln()).sqrt(), theta)
}

pub fn sample_ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(rows, cols);
    for z in m.data.iter_mut() {
        *z = complex_normal(rng);
    }
    m
}

/// H = a₁G₁G₁† − a₂G₂G₂†.
pub fn sample_diff<R: Rng + ?Sized>(p: &EnsembleParams, rng: &mut R) -> ComplexMatrix {
    let n = p.n as usize;
    let w1 = sample_ginibre(n, p.n1 as usize, rng).gram();
    let w2 = sample_ginibre(n, p.n2 as usize, rng).gram();
    w1.scaled(to_f64(&p.a1))
        .sub(&w2.scaled(to_f64(&p.a2)))
        .expect("equal shapes")
        .symmetrized()
}

/// ρ = GG†/tr(GG†) with G of size n × n_env.
pub fn sample_density_matrix<R: Rng + ?Sized>(n: usize, n_env: usize, rng: &mut R) -> Result<ComplexMatrix> {
    if n_env < n || n == 0 {
        return Err(Error::InvalidParams(format!(
            "density matrices need 1 <= n <= n_env, got n = {n}, n_env = {n_env}"
        )));
    }
    loop {
        let w = sample_ginibre(n, n_env, rng).gram();
        let t = w.trace().re;
        if t > 0.0 {
            return Ok(w.scaled(1.0 / t));
        }
    }
}

/// σ = ρ₁ − ρ₂ for independent density matrices.
pub fn sample_helstrom<R: Rng + ?Sized>(n: usize, n1: usize, n2: usize, rng: &mut R) -> Result<ComplexMatrix> {
    let r1 = sample_density_matrix(n, n1, rng)?;
    let r2 = sample_density_matrix(n, n2, rng)?;
    Ok(r1.sub(&r2)?.symmetrized())
}

/// Ascending eigenvalues of a Hermitian matrix by cyclic Jacobi rotations.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if m.rows != m.cols {
        return Err(Error::Domain(format!("matrix is {}x{}, not square", m.rows, m.cols)));
    }
    let n = m.rows;
    let norm = m.frobenius_norm();
    if m.hermitian_defect() > 1e-12 * norm.max(1.0) {
        return Err(Error::Domain("matrix is not Hermitian".into()));
    }
    let mut a = m.symmetrized();
    let off = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a.get(i, j).norm_sqr();
                }
            }
        }
        s.sqrt()
    };
    let target = 1e-13 * norm;
    let mut converged = off(&a) <= target;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(Error::Numeric(format!("Jacobi did not converge in {MAX_SWEEPS} sweeps")));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, p, q);
            }
        }
        converged = off(&a) <= target;
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

// Annihilates a[p][q] with R = diag(1, e^{−iφ})·[[c, s], [−s, c]] on (p, q).
fn rotate(a: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a.get(p, q);
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let n = a.rows;
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let ph = apq / r;
    let rpp = Complex64::new(c, 0.0);
    let rpq = Complex64::new(s, 0.0);
    let rqp = -ph.conj() * s;
    let rqq = ph.conj() * c;
    for k in 0..n {
        let akp = a.get(k, p);
        let akq = a.get(k, q);
        a.set(k, p, akp * rpp + akq * rqp);
        a.set(k, q, akp * rpq + akq * rqq);
    }
    for k in 0..n {
        let apk = a.get(p, k);
        let aqk = a.get(q, k);
        a.set(p, k, rpp.conj() * apk + rqp.conj() * aqk);
        a.set(q, k, rpq.conj() * apk + rqq.conj() * aqk);
    }
    a.set(p, q, Complex64::new(0.0, 0.0));
    a.set(q, p, Complex64::new(0.0, 0.0));
    a.set(p, p, Complex64::new(a.get(p, p).re, 0.0));
    a.set(q, q, Complex64::new(a.get(q, q).re, 0.0));
}

/// Random ensemble to sample.
#[derive(Clone, Debug, PartialEq)]
pub enum Ensemble {
    /// a₁W₁ − a₂W₂.
    WishartDifference(EnsembleParams),
    /// ρ₁ − ρ₂ with ρⱼ from an environment of dimension nⱼ.
    Helstrom { n: u32, n1: u32, n2: u32 },
}

impl Ensemble {
    pub fn dim(&self) -> usize {
        match self {
            Self::WishartDifference(p) => p.n as usize,
            Self::Helstrom { n, .. } => *n as usize,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<ComplexMatrix> {
        match self {
            Self::WishartDifference(p) => Ok(sample_diff(p, rng)),
            Self::Helstrom { n, n1, n2 } => sample_helstrom(*n as usize, *n1 as usize, *n2 as usize, rng),
        }
    }
}

/// Random stream for chunk `index` under `seed`.
pub fn chunk_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Eigenvalues of `matrices` independent draws, in draw order.
///
/// Draw i uses stream i / [`CHUNK`], so the output depends only on the seed.
pub fn simulate_eigenvalues(ensemble: &Ensemble, matrices: usize, seed: u64, workers: usize) -> Result<Vec<f64>> {
    if matrices == 0 {
        return Err(Error::InvalidParams("need at least one sample".into()));
    }
    let chunks = matrices.div_ceil(CHUNK);
    let work = || -> Result<Vec<Vec<f64>>> {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = chunk_rng(seed, c as u64);
                let count = CHUNK.min(matrices - c * CHUNK);
                let mut out = Vec::with_capacity(count * ensemble.dim());
                for _ in 0..count {
                    out.extend(hermitian_eigenvalues(&ensemble.sample(&mut rng)?)?);
                }
                Ok(out)
            })
            .collect()
    };
    let parts = if workers == 0 {
        work()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Numeric(format!("thread pool: {e}")))?
            .install(work)?
    };
    Ok(parts.concat())
}

/// Sorted samples and an equal-width histogram.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalSpectrum {
    samples: Vec<f64>,
    edges: Vec<f64>,
    counts: Vec<u64>,
}

impl EmpiricalSpectrum {
    /// Histogram over [min, max] of the samples.
    pub fn new(samples: Vec<f64>, bins: usize) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidParams("no samples".into()));
        }
        let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (lo, hi) = if lo < hi { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
        Self::with_range(samples, bins, lo, hi)
    }

    /// Histogram over [lo, hi]; every sample must lie in range.
    pub fn with_range(mut samples: Vec<f64>, bins: usize, lo: f64, hi: f64) -> Result<Self> {
        if bins == 0 {
            return Err(Error::InvalidParams("need at least one bin".into()));
        }
        if !(lo < hi) {
            return Err(Error::InvalidParams(format!("empty histogram range [{lo}, {hi}]")));
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("non-finite sample".into()));
        }
        if samples.iter().any(|&x| x < lo || x > hi) {
            return Err(Error::Domain(format!("sample outside [{lo}, {hi}]")));
        }
        samples.sort_by(f64::total_cmp);
        let w = (hi - lo) / bins as f64;
        let mut edges: Vec<f64> = (0..=bins).map(|i| lo + w * i as f64).collect();
        edges[bins] = hi;
        let mut counts = vec![0u64; bins];
        for &x in &samples {
            let i = (((x - lo) / w) as usize).min(bins - 1);
            counts[i] += 1;
        }
        Ok(Self { samples, edges, counts })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Histogram heights normalized to unit area.
    pub fn heights(&self) -> Vec<f64> {
        let n = self.len() as f64;
        self.counts
            .iter()
            .zip(self.edges.windows(2))
            .map(|(&c, e)| c as f64 / (n * (e[1] - e[0])))
            .collect()
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.len() as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        let n = self.len() as f64;
        self.samples.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0).max(1.0)
    }
}

/// sup |F_emp − F| over the sample points.
pub fn ks_distance<F>(emp: &EmpiricalSpectrum, cdf: F) -> f64
where
    F: Fn(f64) -> f64 + Sync,
{
    let n = emp.len() as f64;
    emp.samples
        .par_iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .reduce(|| 0.0, f64::max)
}

/// Σ over bins of |histogram mass − ∫ density| across the histogram range.
pub fn binned_l1<F>(emp: &EmpiricalSpectrum, density: F) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let n = emp.len() as f64;
    let mut total = 0.0;
    for (c, e) in emp.counts.iter().zip(emp.edges.windows(2)) {
        let mass = quad::integrate(&density, e[0], e[1], 1e-12, 1e-9)?;
        total += (*c as f64 / n - mass).abs();
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ginibre_moments() {
        let mut rng = chunk_rng(7, 0);
        let m = sample_ginibre(1000, 1000, &mut rng);
        let n = m.entries().len() as f64;
        let second: f64 = m.entries().iter().map(|z| z.norm_sqr()).sum::<f64>() / n;
        assert!((second - 1.0).abs() < 0.005, "{second}");
        let mean: Complex64 = m.entries().iter().sum::<Complex64>() / n;
        // each component has standard deviation sqrt(1/(2n))
        let band = 4.0 * (0.5 / n).sqrt();
        assert!(mean.re.abs() < band && mean.im.abs() < band, "{mean}");
    }

    #[test]
    fn deterministic_streams() {
        let a = sample_ginibre(3, 4, &mut chunk_rng(42, 0));
        let b = sample_ginibre(3, 4, &mut chunk_rng(42, 0));
        assert_eq!(a, b);
        let c = sample_ginibre(3, 4, &mut chunk_rng(42, 1));
        assert_ne!(a, c);
        let p = EnsembleParams::parse(2, 3, 3, "1", "1").unwrap();
        let e = Ensemble::WishartDifference(p);
        let x = simulate_eigenvalues(&e, 150, 9, 1).unwrap();
        let y = simulate_eigenvalues(&e, 150, 9, 3).unwrap();
        assert_eq!(x, y);
        assert_eq!(x.len(), 300);
    }

    #[test]
    fn small_eigenproblems() {
        let m = ComplexMatrix::from_real(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let ev = hermitian_eigenvalues(&m).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-15 && (ev[1] - 1.0).abs() < 1e-15);
        let d = ComplexMatrix::from_real(&[vec![3.0, 0.0, 0.0], vec![0.0, -1.0, 0.0], vec![0.0, 0.0, 2.0]]).unwrap();
        assert_eq!(hermitian_eigenvalues(&d).unwrap(), vec![-1.0, 2.0, 3.0]);
        let mut z = ComplexMatrix::zeros(2, 2);
        z.set(0, 1, Complex64::new(0.0, 1.0));
        z.set(1, 0, Complex64::new(0.0, -1.0));
        let ev = hermitian_eigenvalues(&z).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-15 && (ev[1] - 1.0).abs() < 1e-15);
        z.set(1, 0, Complex64::new(0.0, 1.0));
        assert!(matches!(hermitian_eigenvalues(&z), Err(Error::Domain(_))));
        assert!(hermitian_eigenvalues(&ComplexMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn trace_invariants() {
        let mut rng = chunk_rng(3, 5);
        for _ in 0..5 {
            let g = sample_ginibre(20, 20, &mut rng);
            let h = g.sub(&g.adjoint()).unwrap().scaled(0.5);
            let h = ComplexMatrix {
                rows: 20,
                cols: 20,
                data: h.data.iter().map(|z| z * Complex64::new(0.0, 1.0)).collect(),
            }
            .symmetrized();
            let ev = hermitian_eigenvalues(&h).unwrap();
            let tr = h.trace().re;
            let tr2 = h.matmul(&h).unwrap().trace().re;
            assert!((ev.iter().sum::<f64>() - tr).abs() < 1e-12 * (1.0 + tr.abs()));
            assert!((ev.iter().map(|x| x * x).sum::<f64>() - tr2).abs() < 1e-10 * tr2);
            assert!(ev.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn diff_is_hermitian_with_consistent_trace() {
        let p = EnsembleParams::parse(5, 6, 8, "2/3", "8/7").unwrap();
        let mut rng = chunk_rng(11, 0);
        for _ in 0..20 {
            let n = 5;
            let g1 = sample_ginibre(n, 6, &mut rng);
            let g2 = sample_ginibre(n, 8, &mut rng);
            let (a1, a2) = (2.0 / 3.0, 8.0 / 7.0);
            let h = g1.gram().scaled(a1).sub(&g2.gram().scaled(a2)).unwrap().symmetrized();
            assert_eq!(h.hermitian_defect(), 0.0);
            let want = a1 * g1.gram().trace().re - a2 * g2.gram().trace().re;
            let ev = hermitian_eigenvalues(&h).unwrap();
            assert!((ev.iter().sum::<f64>() - want).abs() < 1e-10 * (1.0 + want.abs()));
            assert_eq!(sample_diff(&p, &mut rng).hermitian_defect(), 0.0);
        }
    }

    #[test]
    fn trace_mean_of_diff() {
        let p = EnsembleParams::parse(3, 4, 6, "2", "1/2").unwrap();
        let mut rng = chunk_rng(5, 0);
        let draws = 10_000;
        let tr: Vec<f64> = (0..draws).map(|_| sample_diff(&p, &mut rng).trace().re).collect();
        let m = tr.iter().sum::<f64>() / draws as f64;
        let v = tr.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (draws - 1) as f64;
        // n(a₁n₁ − a₂n₂)
        let want = 3.0 * (2.0 * 4.0 - 0.5 * 6.0);
        assert!((m - want).abs() < 4.0 * (v / draws as f64).sqrt(), "{m} vs {want}");
    }

    #[test]
    fn laplace_law_for_n_one() {
        let p = EnsembleParams::parse(1, 1, 1, "1", "1").unwrap();
        let ev = simulate_eigenvalues(&Ensemble::WishartDifference(p), 100_000, 1, 0).unwrap();
        let emp = EmpiricalSpectrum::new(ev, DEFAULT_BINS).unwrap();
        let cdf = |x: f64| if x < 0.0 { 0.5 * x.exp() } else { 1.0 - 0.5 * (-x).exp() };
        let d = ks_distance(&emp, cdf);
        assert!(d < 0.01, "{d}");
        assert!((emp.mean()).abs() < 4.0 * (2.0f64 / 1e5).sqrt());
    }

    #[test]
    fn density_matrices() {
        let mut rng = chunk_rng(2, 0);
        for n in 1..5 {
            let rho = sample_density_matrix(n, n + 2, &mut rng).unwrap();
            assert!((rho.trace().re - 1.0).abs() < 1e-15);
            let ev = hermitian_eigenvalues(&rho).unwrap();
            assert!(ev.iter().all(|&x| x >= -1e-14));
            if n == 1 {
                assert!((rho.get(0, 0).re - 1.0).abs() < 1e-15);
            }
        }
        assert!(sample_density_matrix(3, 2, &mut rng).is_err());
    }

    #[test]
    fn ks_against_own_staircase() {
        let emp = EmpiricalSpectrum::new(vec![0.3, -1.0, 2.5, 0.7], 3).unwrap();
        let s = emp.samples().to_vec();
        let stair = |x: f64| s.iter().filter(|&&y| y <= x).count() as f64 / 4.0;
        assert!(ks_distance(&emp, stair) <= 0.25);
    }

    #[test]
    fn l1_of_uniform() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let emp = EmpiricalSpectrum::with_range(xs, 10, 0.0, 1.0).unwrap();
        assert!(binned_l1(&emp, |_| 1.0).unwrap() < 1e-9);
        assert!(EmpiricalSpectrum::with_range(vec![2.0], 4, 0.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn histogram_counts_sum(xs in proptest::collection::vec(-100.0f64..100.0, 1..200), bins in 1usize..50) {
            let n = xs.len() as u64;
            let emp = EmpiricalSpectrum::new(xs, bins).unwrap();
            prop_assert_eq!(emp.counts().iter().sum::<u64>(), n);
            prop_assert!(emp.edges().windows(2).all(|w| w[0] < w[1]));
        }

        #[test]
        fn eigenvalue_sum_is_trace(seed in 0u64..1000, n in 1usize..8) {
            let mut rng = chunk_rng(seed, 0);
            let w = sample_ginibre(n, n + 1, &mut rng).gram();
            let ev = hermitian_eigenvalues(&w).unwrap();
            let tr = w.trace().re;
            prop_assert!((ev.iter().sum::<f64>() - tr).abs() < 1e-10 * tr);
            prop_assert!(ev[0] > -1e-10 * tr);
        }
    }
}
