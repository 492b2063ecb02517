//! Small dense linear algebra over exact rationals and extended precision floats.

use crate::error::{Error, Result};
use crate::specfun::{BigFloat, Rational};

pub type RationalMatrix = Vec<Vec<Rational>>;

/// Determinant by exact Gaussian elimination.
pub fn det_rational(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    let mut a: RationalMatrix = m.iter().map(|r| r[..n].to_vec()).collect();
    let mut det = Rational::from(1);
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| a[r][col] != 0) else {
            return Rational::new();
        };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det *= &a[col][col];
        let (top, rest) = a.split_at_mut(col + 1);
        let pivot_row = &top[col];
        for row in rest.iter_mut() {
            if row[col] == 0 {
                continue;
            }
            let f = Rational::from(&row[col] / &pivot_row[col]);
            for k in col..n {
                let d = Rational::from(&f * &pivot_row[k]);
                row[k] -= d;
            }
        }
    }
    det
}

pub fn is_upper_triangular(m: &[Vec<Rational>]) -> bool {
    m.iter()
        .enumerate()
        .all(|(i, row)| row.iter().take(i).all(|x| *x == 0))
}

/// Inverse of an upper-triangular matrix with nonzero diagonal by back-substitution.
pub fn upper_triangular_inverse(m: &[Vec<Rational>]) -> Result<RationalMatrix> {
    let n = m.len();
    if let Some(i) = (0..n).find(|&i| m[i][i] == 0) {
        return Err(Error::Degenerate(format!("zero diagonal entry at position {}", i + 1)));
    }
    let mut inv = vec![vec![Rational::new(); n]; n];
    for j in 0..n {
        inv[j][j] = Rational::from(m[j][j].recip_ref());
        for i in (0..j).rev() {
            let mut s = Rational::new();
            for k in i + 1..=j {
                s += Rational::from(&m[i][k] * &inv[k][j]);
            }
            inv[i][j] = -(s / &m[i][i]);
        }
    }
    Ok(inv)
}

/// Determinant in extended precision with partial pivoting.
pub fn det_big(m: &[Vec<BigFloat>]) -> BigFloat {
    let n = m.len();
    let prec = m.first().map(|r| r[0].prec()).unwrap_or(64);
    let mut a: Vec<Vec<BigFloat>> = m.iter().map(|r| r[..n].to_vec()).collect();
    let mut det = BigFloat::with_val(prec, 1);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| {
                let ax = BigFloat::with_val(prec, a[x][col].abs_ref());
                let ay = BigFloat::with_val(prec, a[y][col].abs_ref());
                ax.partial_cmp(&ay).expect("finite entries")
            })
            .expect("nonempty");
        if a[piv][col].is_zero() {
            return BigFloat::new(prec);
        }
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det *= &a[col][col];
        let (top, rest) = a.split_at_mut(col + 1);
        let pivot_row = &top[col];
        for row in rest.iter_mut() {
            let f = BigFloat::with_val(prec, &row[col] / &pivot_row[col]);
            for k in col..n {
                let d = BigFloat::with_val(prec, &f * &pivot_row[k]);
                row[k] -= d;
            }
        }
    }
    det
}

/// Inverse in extended precision by Gauss–Jordan elimination with partial pivoting.
pub fn inverse_big(m: &[Vec<BigFloat>]) -> Result<Vec<Vec<BigFloat>>> {
    let n = m.len();
    let prec = m.first().map(|r| r[0].prec()).unwrap_or(64);
    let mut a: Vec<Vec<BigFloat>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r[..n].to_vec();
            row.extend((0..n).map(|j| BigFloat::with_val(prec, (i == j) as u32)));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| {
                let ax = BigFloat::with_val(prec, a[x][col].abs_ref());
                let ay = BigFloat::with_val(prec, a[y][col].abs_ref());
                ax.partial_cmp(&ay).expect("finite entries")
            })
            .expect("nonempty");
        if a[piv][col].is_zero() {
            return Err(Error::Degenerate("singular matrix".into()));
        }
        a.swap(piv, col);
        let p = a[col][col].clone();
        for x in a[col].iter_mut() {
            *x /= &p;
        }
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, pv) in row.iter_mut().zip(&pivot_row) {
                *x -= BigFloat::with_val(prec, &f * pv);
            }
        }
    }
    Ok(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn mat(rows: &[&[&str]]) -> RationalMatrix {
        rows.iter().map(|r| r.iter().map(|s| q(s)).collect()).collect()
    }

    #[test]
    fn exact_determinants() {
        assert_eq!(det_rational(&mat(&[&["2", "1"], &["1", "1/2"]])), 0);
        assert_eq!(det_rational(&mat(&[&["0", "1"], &["1", "0"]])), -1);
        let m = mat(&[&["1/2", "3", "-1"], &["2", "0", "4"], &["5/3", "1", "1"]]);
        // cofactor expansion along the first row
        let want = q("1/2") * q("-4") - q("3") * (q("2") - q("20/3")) + q("-1") * q("2");
        assert_eq!(det_rational(&m), want);
    }

    #[test]
    fn triangular_inverse() {
        let m = mat(&[&["2", "1", "-3"], &["0", "-1", "1/2"], &["0", "0", "4"]]);
        let inv = upper_triangular_inverse(&m).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut s = Rational::new();
                for k in 0..3 {
                    s += Rational::from(&m[i][k] * &inv[k][j]);
                }
                assert_eq!(s, (i == j) as i32);
            }
        }
        assert!(is_upper_triangular(&inv));
        let bad = mat(&[&["1", "2"], &["0", "0"]]);
        assert!(matches!(upper_triangular_inverse(&bad), Err(Error::Degenerate(_))));
    }

    #[test]
    fn float_determinant_and_inverse() {
        let prec = 128;
        let m: Vec<Vec<BigFloat>> = [[4.0, 1.0, 2.0], [1.0, 3.0, 0.5], [2.0, 0.5, 5.0]]
            .iter()
            .map(|r| r.iter().map(|&x| BigFloat::with_val(prec, x)).collect())
            .collect();
        let d = det_big(&m).to_f64();
        assert!((d - 44.0).abs() < 1e-12, "{d}");
        let inv = inverse_big(&m).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut s = BigFloat::new(prec);
                for k in 0..3 {
                    s += BigFloat::with_val(prec, &m[i][k] * &inv[k][j]);
                }
                assert!((s.to_f64() - (i == j) as u8 as f64).abs() < 1e-30);
            }
        }
    }
}
