//! Constant-scalar-curvature test from heat invariants and characteristic
//! numbers of a compact Kähler orbifold of complex dimension `n`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Global integrals feeding the test. `int_c1sq` and `int_c2` are paired with
/// `ω^{n−2}`; `c1_omega` is `c₁ ∪ [ω]^{n−1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureIntegrals {
    pub n: u32,
    #[serde(default)]
    pub b2_total: Option<f64>,
    pub int_c1sq: f64,
    pub int_c2: f64,
    pub vol: f64,
    pub c1_omega: f64,
    #[serde(default)]
    pub int_s_sq: Option<f64>,
}

impl CurvatureIntegrals {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::DegenerateInput(format!("complex dimension {} is below 2", self.n)));
        }
        if !(self.vol > 0.0) {
            return Err(Error::DegenerateInput(format!("volume {} is not positive", self.vol)));
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let d: Self = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        d.validate()?;
        Ok(d)
    }
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

fn check_dim(n: u32) -> Result<()> {
    if n < 2 {
        return Err(Error::DegenerateInput(format!("complex dimension {n} is below 2")));
    }
    Ok(())
}

/// `s̄ = 2π·c1_omega / (vol·(n−1)!)`.
pub fn average_scalar_curvature(d: &CurvatureIntegrals) -> Result<f64> {
    d.validate()?;
    Ok(2.0 * PI * d.c1_omega / (d.vol * factorial(d.n - 1)))
}

/// Solves `360·b₂ = (8π²/(n−2)!)(2∫c₂ − ∫c₁²) + ((10n−3)/(2n))∫s²` for `∫s²`.
pub fn s_squared_from_heat(d: &CurvatureIntegrals) -> Result<f64> {
    check_dim(d.n)?;
    let b2 = d.b2_total.ok_or_else(|| Error::MissingInput("b2_total".into()))?;
    let n = f64::from(d.n);
    let chern = 8.0 * PI * PI / factorial(d.n - 2) * (2.0 * d.int_c2 - d.int_c1sq);
    Ok(2.0 * n / (10.0 * n - 3.0) * (360.0 * b2 - chern))
}

/// `∫|ρ|² = ((n+3)/(4n))∫s² − (4π²/(n−2)!)∫c₁²`.
pub fn rho_squared_identity(int_s_sq: f64, int_c1sq: f64, n: u32) -> Result<f64> {
    check_dim(n)?;
    let nf = f64::from(n);
    Ok((nf + 3.0) / (4.0 * nf) * int_s_sq - 4.0 * PI * PI / factorial(n - 2) * int_c1sq)
}

/// `∫|R|² = (8π²/(n−2)!)(∫c₂ − ∫c₁²) + ∫s²/4`.
#[allow(non_snake_case)]
pub fn R_squared_identity(int_s_sq: f64, int_c1sq: f64, int_c2: f64, n: u32) -> Result<f64> {
    check_dim(n)?;
    Ok(8.0 * PI * PI / factorial(n - 2) * (int_c2 - int_c1sq) + int_s_sq / 4.0)
}

/// `∫s² − s̄²·vol`, with a flag when it is negative beyond rounding
/// (inconsistent input).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Calabi {
    pub value: f64,
    pub negative: bool,
}

pub fn calabi_functional(int_s_sq: f64, s_bar: f64, vol: f64) -> Calabi {
    let mean_part = s_bar * s_bar * vol;
    let value = int_s_sq - mean_part;
    let slack = 1e-12 * int_s_sq.abs().max(mean_part).max(1.0);
    Calabi { value, negative: value < -slack }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CscReport {
    pub csc: bool,
    pub s_bar: f64,
    pub int_s_sq: f64,
    /// True when `∫s²` was derived from `b2_total` rather than given.
    pub derived_s_sq: bool,
    pub int_rho_sq: f64,
    #[serde(rename = "int_R_sq")]
    pub int_r_sq: f64,
    pub calabi: Calabi,
    /// `∫s² − (2π·c1_omega/(n−1)!)²/vol`.
    pub defect: f64,
}

/// Constant scalar curvature iff `|∫s² − (2π c₁·[ω]^{n−1}/(n−1)!)²/vol|`
/// is within `tol·max(1, ∫s²)`. A given `int_s_sq` takes precedence over
/// deriving it from `b2_total`.
pub fn is_csc(d: &CurvatureIntegrals, tol: f64) -> Result<CscReport> {
    d.validate()?;
    let (int_s_sq, derived) = match (d.int_s_sq, d.b2_total) {
        (Some(s), _) => (s, false),
        (None, Some(_)) => (s_squared_from_heat(d)?, true),
        (None, None) => return Err(Error::MissingInput("int_s_sq or b2_total".into())),
    };
    let s_bar = average_scalar_curvature(d)?;
    let pairing = 2.0 * PI * d.c1_omega / factorial(d.n - 1);
    let defect = int_s_sq - pairing * pairing / d.vol;
    Ok(CscReport {
        csc: defect.abs() <= tol * int_s_sq.abs().max(1.0),
        s_bar,
        int_s_sq,
        derived_s_sq: derived,
        int_rho_sq: rho_squared_identity(int_s_sq, d.int_c1sq, d.n)?,
        int_r_sq: R_squared_identity(int_s_sq, d.int_c1sq, d.int_c2, d.n)?,
        calabi: calabi_functional(int_s_sq, s_bar, d.vol),
        defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(n: u32, vol: f64, c1_omega: f64) -> CurvatureIntegrals {
        CurvatureIntegrals { n, b2_total: None, int_c1sq: 0.0, int_c2: 0.0, vol, c1_omega, int_s_sq: None }
    }

    #[test]
    fn average_curvature() {
        assert_eq!(average_scalar_curvature(&data(2, 1.0, 0.0)).unwrap(), 0.0);
        assert!((average_scalar_curvature(&data(2, 1.0, 1.0)).unwrap() - 2.0 * PI).abs() < 1e-15);
        let a = average_scalar_curvature(&data(3, 1.5, 0.7)).unwrap();
        let b = average_scalar_curvature(&data(3, 3.0, 0.7)).unwrap();
        assert!((a - 2.0 * b).abs() < 1e-15);
        assert!(average_scalar_curvature(&data(1, 1.0, 1.0)).is_err());
    }

    #[test]
    fn s_squared_examples() {
        let mut d = data(2, 1.0, 0.0);
        d.b2_total = Some(0.0);
        assert_eq!(s_squared_from_heat(&d).unwrap(), 0.0);
        d.b2_total = Some(17.0 / 720.0);
        assert!((s_squared_from_heat(&d).unwrap() - 2.0).abs() < 1e-12);
        d.b2_total = None;
        assert!(matches!(s_squared_from_heat(&d), Err(Error::MissingInput(_))));
    }

    #[test]
    fn forward_then_inverse() {
        for n in 2..=4u32 {
            let (s_sq, c1sq, c2) = (3.7, 0.4, 1.1);
            let nf = f64::from(n);
            let b2 = (8.0 * PI * PI / factorial(n - 2) * (2.0 * c2 - c1sq) + (10.0 * nf - 3.0) / (2.0 * nf) * s_sq) / 360.0;
            let d = CurvatureIntegrals { n, b2_total: Some(b2), int_c1sq: c1sq, int_c2: c2, vol: 1.0, c1_omega: 0.0, int_s_sq: None };
            assert!((s_squared_from_heat(&d).unwrap() - s_sq).abs() < 1e-12);
        }
    }

    #[test]
    fn identities() {
        assert_eq!(rho_squared_identity(0.0, 0.0, 2).unwrap(), 0.0);
        assert!((rho_squared_identity(8.0, 0.0, 2).unwrap() - 5.0).abs() < 1e-15);
        assert_eq!(R_squared_identity(0.0, 0.0, 0.0, 3).unwrap(), 0.0);
        assert!((R_squared_identity(2.0, 0.3, 0.3, 2).unwrap() - 0.5).abs() < 1e-15);
        assert!(rho_squared_identity(1.0, 1.0, 1).is_err());
    }

    #[test]
    fn identities_close_the_chain() {
        // 2∫|R|² − 2∫|ρ|² + 5∫s² must equal the b₂ relation; the oracle is
        // the displayed right-hand side evaluated directly.
        for n in 2..=4u32 {
            for &(s, c1, c2) in &[(1.0, 0.0, 0.0), (2.5, -0.7, 3.1), (0.01, 4.0, -2.0)] {
                let r = R_squared_identity(s, c1, c2, n).unwrap();
                let rho = rho_squared_identity(s, c1, n).unwrap();
                let lhs = 2.0 * r - 2.0 * rho + 5.0 * s;
                let nf = f64::from(n);
                let rhs = 8.0 * PI * PI / factorial(n - 2) * (2.0 * c2 - c1) + (10.0 * nf - 3.0) / (2.0 * nf) * s;
                assert!((lhs - rhs).abs() < 1e-10 * rhs.abs().max(1.0));
            }
        }
    }

    #[test]
    fn calabi_values() {
        assert_eq!(calabi_functional(8.0, 2.0, 2.0).value, 0.0);
        assert_eq!(calabi_functional(3.0, 0.0, 5.0).value, 3.0);
        let bad = calabi_functional(1.0, 1.0, 2.0);
        assert!(bad.negative && bad.value < 0.0);
    }

    #[test]
    fn verdicts() {
        let zero = CurvatureIntegrals { int_s_sq: Some(0.0), ..data(2, 1.0, 0.0) };
        assert!(is_csc(&zero, 1e-9).unwrap().csc);
        let mut d = data(3, 2.5, 1.3);
        let s_bar = average_scalar_curvature(&d).unwrap();
        d.int_s_sq = Some(s_bar * s_bar * d.vol);
        let rep = is_csc(&d, 1e-9).unwrap();
        assert!(rep.csc);
        assert!(rep.calabi.value.abs() < 1e-9);
        d.int_s_sq = Some(s_bar * s_bar * d.vol * (1.0 + 1e-3));
        assert!(!is_csc(&d, 1e-6).unwrap().csc);
        d.int_s_sq = None;
        assert!(matches!(is_csc(&d, 1e-6), Err(Error::MissingInput(_))));
    }

    #[test]
    fn json_defaults() {
        let d = CurvatureIntegrals::from_json(r#"{"n":2,"int_c1sq":0,"int_c2":0,"vol":1,"c1_omega":0}"#).unwrap();
        assert_eq!(d.int_s_sq, None);
        assert!(CurvatureIntegrals::from_json(r#"{"n":1,"int_c1sq":0,"int_c2":0,"vol":1,"c1_omega":0}"#).is_err());
    }
}
