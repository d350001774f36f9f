//! Exact rational vectors for stability forms and cone coordinates.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn int(x: i64) -> Q {
    Q::from_integer(BigInt::from(x))
}

pub fn ratio(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"3"`, `"-3/2"` or `"0"`.
pub fn parse(s: &str) -> Result<Q> {
    let s = s.trim().replace('\u{2212}', "-");
    let bad = || Error::Query(format!("not a rational number: `{s}`"));
    match s.split_once('/') {
        None => s.parse::<BigInt>().map(Q::from_integer).map_err(|_| bad()),
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
    }
}

/// Parses a comma-separated list of rationals.
pub fn parse_vector(s: &str) -> Result<Vec<Q>> {
    s.split(',').map(parse).collect()
}

/// `"3"`, `"-3/2"`.
pub fn format(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn dot(a: &[Q], b: &[i64]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, &y)| acc + x * int(y))
}

/// Solves `Σ_k c_k columns[k] = rhs` for linearly independent columns.
/// Returns `None` if the columns are dependent or `rhs` is outside their span.
pub fn solve_independent(columns: &[Vec<i64>], rhs: &[Q]) -> Option<Vec<Q>> {
    let rows = rhs.len();
    let k = columns.len();
    // augmented matrix, rows x (k + 1)
    let mut m: Vec<Vec<Q>> = (0..rows)
        .map(|r| {
            let mut row: Vec<Q> = columns.iter().map(|c| int(c[r])).collect();
            row.push(rhs[r].clone());
            row
        })
        .collect();
    let mut pivot_row = 0;
    for col in 0..k {
        let piv = (pivot_row..rows).find(|&r| !m[r][col].is_zero())?;
        m.swap(pivot_row, piv);
        let inv = Q::one() / m[pivot_row][col].clone();
        for x in m[pivot_row].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..rows {
            if r != pivot_row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=k {
                    let v = &m[pivot_row][c] * &f;
                    m[r][c] = &m[r][c] - v;
                }
            }
        }
        pivot_row += 1;
    }
    if m[pivot_row..].iter().any(|row| !row[k].is_zero()) {
        return None;
    }
    Some((0..k).map(|r| m[r][k].clone()).collect())
}

/// Determinant of an integer square matrix given by columns.
pub fn determinant(columns: &[Vec<i64>]) -> Q {
    let n = columns.len();
    let mut m: Vec<Vec<Q>> = (0..n).map(|r| columns.iter().map(|c| int(c[r])).collect()).collect();
    let mut det = Q::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Q::zero();
        };
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        det *= m[col][col].clone();
        for r in col + 1..n {
            if !m[r][col].is_zero() {
                let f = &m[r][col] / &m[col][col];
                for c in col..n {
                    let v = &m[col][c] * &f;
                    m[r][c] = &m[r][c] - v;
                }
            }
        }
    }
    det
}

pub fn is_positive(x: &Q) -> bool {
    x.is_positive()
}
