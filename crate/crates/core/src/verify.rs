//! Self-test of the exact identities for one parameter set.

use serde::Serialize;

use crate::diagonal_law::{check_kummer, check_smoothness, DiagonalLaw};
use crate::error::Result;
use crate::exppoly::Side;
use crate::linalg::is_upper_triangular;
use crate::params::EnsembleParams;
use crate::positivity::{mean_closed_form, second_moment_closed_form, SpectralStatistics};
use crate::spectral::{normalization_closed_form, MomentMatrix, SpectralKernel};
use crate::specfun::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &'static str, r: Result<(bool, String)>) -> IdentityCheck {
    match r {
        Ok((passed, detail)) => IdentityCheck { name, passed, detail },
        Err(e) => IdentityCheck {
            name,
            passed: false,
            detail: e.to_string(),
        },
    }
}

fn equal(got: &Rational, want: &Rational) -> (bool, String) {
    (got == want, format!("{got} vs {want}"))
}

/// Runs every exact identity for `p`.
pub fn verify_identities(p: &EnsembleParams) -> Vec<IdentityCheck> {
    let mut out = Vec::new();
    let top = p.max_derivative_index();
    let law = match DiagonalLaw::with_order(p, top) {
        Ok(l) => l,
        Err(e) => {
            out.push(outcome("diagonal law construction", Err(e)));
            return out;
        }
    };
    out.push(outcome(
        "diagonal law normalization",
        law.w.moment_integral(0, Side::Both).map(|m| equal(&m, &Rational::from(1))),
    ));
    out.push(outcome("derivative chain", Ok((law.check_chain(), format!("orders 1..={top}")))));
    out.push(outcome(
        "smoothness below n1+n2",
        (1..=top)
            .map(|j| check_smoothness(p, j))
            .collect::<Result<Vec<_>>>()
            .map(|v| (v.iter().all(|&b| b), format!("orders 1..={top}"))),
    ));
    out.push(outcome(
        "smoothness fails at n1+n2",
        crate::diagonal_law::ftilde_zero_left(p, top + 1).and_then(|l| {
            let r = crate::diagonal_law::ftilde_zero_right(p, top + 1)?;
            Ok((l != r, format!("left {l}, right {r}")))
        }),
    ));
    out.push(outcome(
        "Kummer resummation",
        ["1/3", "2", "7/2"]
            .iter()
            .map(|u| check_kummer(p, &u.parse().expect("literal")))
            .collect::<Result<Vec<_>>>()
            .map(|v| (v.iter().all(|&b| b), "u = 1/3, 2, 7/2".to_string())),
    ));
    let law_n = match DiagonalLaw::new(p) {
        Ok(l) => l,
        Err(e) => {
            out.push(outcome("basis construction", Err(e)));
            return out;
        }
    };
    let mm = MomentMatrix::from_law(&law_n, 2);
    out.push(outcome(
        "moment closed forms",
        mm.as_ref()
            .map(|_| (true, "integrals, finite sums and 2F1 forms agree".to_string()))
            .map_err(Clone::clone),
    ));
    let Ok(mm) = mm else { return out };
    out.push(outcome(
        "upper triangularity",
        Ok((is_upper_triangular(&mm.square(Side::Both)), String::new())),
    ));
    out.push(outcome(
        "normalization identity",
        Ok({
            let lhs = mm.scaled_determinant();
            let want = Rational::from(normalization_closed_form(p.n).recip_ref());
            equal(&lhs, &want)
        }),
    ));
    let kernel = SpectralKernel::from_parts(&law_n, &mm);
    let Ok(kernel) = kernel else {
        out.push(outcome("kernel construction", kernel.map(|_| (true, String::new()))));
        return out;
    };
    out.push(outcome(
        "density normalization",
        kernel
            .density()
            .moment_integral(0, Side::Both)
            .map(|m| equal(&m, &Rational::from(1))),
    ));
    out.push(outcome(
        "kernel trace",
        kernel
            .diagonal()
            .moment_integral(0, Side::Both)
            .map(|m| equal(&m, &Rational::from(p.n))),
    ));
    out.push(outcome(
        "kernel reproduces itself",
        kernel.check_idempotence().map(|b| (b, String::new())),
    ));
    let stats = match SpectralStatistics::new(p, 2) {
        Ok(s) => s,
        Err(e) => {
            out.push(outcome("moment statistics", Err(e)));
            return out;
        }
    };
    out.push(outcome(
        "positivity complement",
        stats.frac_positive().and_then(|a| {
            let b = stats.frac_negative()?;
            Ok(equal(&(a + b), &Rational::from(1)))
        }),
    ));
    out.push(outcome(
        "all-eigenvalue probabilities",
        Ok({
            let s = stats.prob_all_positive() + stats.prob_all_negative();
            let ok = if p.n == 1 { s == 1 } else { s < 1 && s > 0 };
            (ok, format!("P+ + P- = {s}"))
        }),
    ));
    if p.is_symmetric() {
        out.push(outcome(
            "symmetric positivity",
            stats.frac_positive().map(|f| {
                let ok = f == Rational::from((1, 2)) && stats.prob_all_positive() == stats.prob_all_negative();
                (ok, format!("p+ = {f}"))
            }),
        ));
    }
    out.push(outcome(
        "first moment",
        stats.moment(1).map(|m| equal(&m, &mean_closed_form(p))),
    ));
    out.push(outcome(
        "second moment",
        stats.moment(2).map(|m| equal(&m, &second_moment_closed_form(p))),
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_pass_on_reference_sets() {
        for (n, n1, n2, a1, a2) in [(3, 4, 5, "1", "1"), (2, 2, 2, "1", "1"), (1, 2, 3, "2/3", "1/5"), (4, 5, 7, "2/3", "8/7")] {
            let p = EnsembleParams::parse(n, n1, n2, a1, a2).unwrap();
            let checks = verify_identities(&p);
            assert!(checks.len() >= 15);
            for c in checks {
                assert!(c.passed, "{p}: {} failed: {}", c.name, c.detail);
            }
        }
    }
}
