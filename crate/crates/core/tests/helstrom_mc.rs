use wishdiff::helstrom::{fixture_table, lookup};
use wishdiff::montecarlo::{ks_distance, simulate_eigenvalues, EmpiricalSpectrum, Ensemble, DEFAULT_BINS};

fn ks_for(n: u32, n1: u32, n2: u32, seed: u64) -> f64 {
    let matrices = 200_000usize.div_ceil(n as usize);
    let ev = simulate_eigenvalues(&Ensemble::Helstrom { n, n1, n2 }, matrices, seed, 0).unwrap();
    let emp = EmpiricalSpectrum::new(ev, DEFAULT_BINS).unwrap();
    if n1 <= n2 {
        let cdf = lookup(n, n1, n2).unwrap().cdf();
        ks_distance(&emp, |x| cdf.eval_f64(x))
    } else {
        let cdf = lookup(n, n2, n1).unwrap().cdf();
        ks_distance(&emp, |x| 1.0 - cdf.eval_f64(-x))
    }
}

#[test]
fn sampled_helstrom_spectra_match_fixtures() {
    for (i, f) in fixture_table().iter().enumerate() {
        let d = ks_for(f.n, f.n1, f.n2, 100 + i as u64);
        assert!(d <= 0.01, "({}, {}, {}): K-S {d}", f.n, f.n1, f.n2);
    }
}

#[test]
fn swapped_environment_reflects_density() {
    let d = ks_for(3, 4, 3, 7);
    assert!(d <= 0.01, "K-S {d}");
}
