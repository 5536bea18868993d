//! Exact rational helpers shared by the polytope and lattice code.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat_int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

pub fn rat_frac(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(q: &Rat) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Exact binary value of a finite float.
pub fn from_f64(x: f64) -> Result<Rat> {
    Rat::from_float(x).ok_or_else(|| Error::Parse(format!("non-finite value {x}")))
}

/// Closest fraction to `x` with denominator at most `max_den` (Stern–Brocot descent).
pub fn approximate(x: f64, max_den: i64) -> Result<Rat> {
    if !x.is_finite() {
        return Err(Error::Parse(format!("non-finite value {x}")));
    }
    let floor = x.floor();
    let frac = x - floor;
    let (mut lo_n, mut lo_d, mut hi_n, mut hi_d) = (0i64, 1i64, 1i64, 1i64);
    let mut best = (0i64, 1i64);
    let mut best_err = frac;
    if (1.0 - frac) < best_err {
        best = (1, 1);
        best_err = 1.0 - frac;
    }
    loop {
        let (mn, md) = (lo_n + hi_n, lo_d + hi_d);
        if md > max_den {
            break;
        }
        let m = mn as f64 / md as f64;
        let err = (m - frac).abs();
        if err < best_err {
            best = (mn, md);
            best_err = err;
        }
        if err == 0.0 {
            break;
        }
        if m < frac {
            lo_n = mn;
            lo_d = md;
        } else {
            hi_n = mn;
            hi_d = md;
        }
    }
    Ok(rat_int(floor as i64) + rat_frac(best.0, best.1))
}

/// Parses `"p/q"`, `"p"` or a decimal literal such as `"-1.25"`.
pub fn parse_rational(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let negative = int.trim_start().starts_with('-');
        let int_part: BigInt = if int.is_empty() || int == "-" || int == "+" {
            BigInt::zero()
        } else {
            int.parse().map_err(|_| bad())?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let frac_num: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let mut value = Rat::from_integer(int_part.abs()) + Rat::new(frac_num, scale);
        if negative {
            value = -value;
        }
        return Ok(value);
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rat::from_integer(n))
}

pub fn format_rational(q: &Rat) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn dot_int(a: &[i64], x: &[Rat]) -> Rat {
    a.iter()
        .zip(x)
        .fold(Rat::zero(), |acc, (ai, xi)| acc + rat_int(*ai) * xi)
}

/// Solves the square system `rows · x = rhs` exactly. Returns `None` when singular.
pub fn solve_square(rows: &[Vec<Rat>], rhs: &[Rat]) -> Option<Vec<Rat>> {
    let n = rows.len();
    let mut a: Vec<Vec<Rat>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut row = r.clone();
            row.push(b.clone());
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for k in col..=n {
            a[col][k] = &a[col][k] * &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for k in col..=n {
                    let sub = &f * &a[col][k];
                    a[r][k] -= sub;
                }
            }
        }
    }
    Some(a.into_iter().map(|mut row| row.pop().unwrap()).collect())
}

/// Rank of a list of rational row vectors.
pub fn rank(rows: &[Vec<Rat>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut a = rows.to_vec();
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..a.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, pivot);
        for r in (rank + 1)..a.len() {
            if !a[r][col].is_zero() {
                let f = &a[r][col] / &a[rank][col];
                for k in col..cols {
                    let sub = &f * &a[rank][k];
                    a[r][k] -= sub;
                }
            }
        }
        rank += 1;
        if rank == a.len() {
            break;
        }
    }
    rank
}

/// Coefficients `a` with `Σ a_j rows[j] = target`, when the rows are linearly
/// independent and `target` lies in their span.
pub fn coordinates_in_span(rows: &[Vec<Rat>], target: &[Rat]) -> Option<Vec<Rat>> {
    let q = rows.len();
    if q == 0 {
        return if target.iter().all(|t| t.is_zero()) { Some(vec![]) } else { None };
    }
    // Normal equations (R Rᵀ) a = R target are exact over Q for independent rows.
    let gram: Vec<Vec<Rat>> = (0..q)
        .map(|i| (0..q).map(|j| dot(&rows[i], &rows[j])).collect())
        .collect();
    let rhs: Vec<Rat> = rows.iter().map(|r| dot(r, target)).collect();
    let a = solve_square(&gram, &rhs)?;
    let n = target.len();
    for k in 0..n {
        let mut s = Rat::zero();
        for j in 0..q {
            s += &a[j] * &rows[j][k];
        }
        if s != target[k] {
            return None;
        }
    }
    Some(a)
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

pub fn int_row(v: &[i64]) -> Vec<Rat> {
    v.iter().map(|&x| rat_int(x)).collect()
}

pub fn is_one(q: &Rat) -> bool {
    q.is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("3/6").unwrap(), rat_frac(1, 2));
        assert_eq!(parse_rational("-7").unwrap(), rat_int(-7));
        assert_eq!(parse_rational("-1.25").unwrap(), rat_frac(-5, 4));
        assert_eq!(parse_rational("0.5").unwrap(), rat_frac(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn approximation_hits_simple_fractions() {
        assert_eq!(approximate(0.3333333333, 100).unwrap(), rat_frac(1, 3));
        assert_eq!(approximate(-2.5, 10).unwrap(), rat_frac(-5, 2));
        let pi = approximate(std::f64::consts::PI, 1000).unwrap();
        assert_eq!(pi, rat_frac(355, 113));
    }

    #[test]
    fn span_coordinates() {
        let rows = vec![int_row(&[1, 0, 0]), int_row(&[1, 1, 0])];
        let a = coordinates_in_span(&rows, &int_row(&[3, 2, 0])).unwrap();
        assert_eq!(a, vec![rat_int(1), rat_int(2)]);
        assert!(coordinates_in_span(&rows, &int_row(&[0, 0, 1])).is_none());
        assert_eq!(rank(&[int_row(&[1, 2]), int_row(&[2, 4])]), 1);
    }
}
