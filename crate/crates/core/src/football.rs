//! Exact equivariant spectra of (p,p)-footballs, the quotients of the round
//! 2-sphere by a rotation of order p, and extrapolation of their heat traces.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::heat::{rotation_sum, Mode};

/// Largest admissible `t` for extrapolation samples.
pub const MAX_SAMPLE_T: f64 = 0.05;

const TAIL_BOUND: f64 = 1e-14;
const MAX_CONDITION: f64 = 1e13;

/// Spherical harmonic `Y_l^m` surviving the quotient, so `p | m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FootballMode {
    pub l: u32,
    pub m: i64,
    pub eigenvalue: f64,
}

/// Number of invariant harmonics of degree `l`.
pub fn multiplicity(p: u32, l: u32) -> u64 {
    2 * u64::from(l / p) + 1
}

pub fn football_spectrum(p: u32, l_max: u32) -> Result<Vec<FootballMode>> {
    if p == 0 {
        return Err(Error::DegenerateInput("football order p must be positive".into()));
    }
    let mut out = Vec::new();
    for l in 0..=l_max {
        let j = i64::from(l / p);
        for k in -j..=j {
            out.push(FootballMode { l, m: k * i64::from(p), eigenvalue: f64::from(l) * f64::from(l + 1) });
        }
    }
    Ok(out)
}

/// Smallest `l_max` with `exp(−t·l_max²) < 1e-15`.
pub fn default_l_max(t: f64) -> u32 {
    (35.0 / t).sqrt().ceil() as u32
}

pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// `Σ_{l ≤ l_max} e^{−t l(l+1)} Σ_{p | m, |m| ≤ l} cos(mα)`.
pub fn equivariant_heat_trace(p: u32, alpha: f64, t: f64, l_max: u32) -> Result<f64> {
    if p == 0 {
        return Err(Error::DegenerateInput("football order p must be positive".into()));
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::DegenerateInput(format!("t = {t} must be positive")));
    }
    let lm = f64::from(l_max);
    if (-t * lm * lm).exp() >= TAIL_BOUND {
        return Err(Error::TruncationTooCoarse(format!(
            "l_max = {l_max} leaves a tail of {:e} at t = {t}; need at least {}",
            (-t * lm * lm).exp(),
            default_l_max(t)
        )));
    }
    // D_J = 1 + 2 Σ_{j=1}^{J} cos(j p α), extended one step whenever ⌊l/p⌋ grows.
    let step = f64::from(p) * alpha;
    let mut d = 1.0;
    let mut j = 0;
    let mut terms = Vec::with_capacity(l_max as usize + 1);
    for l in 0..=l_max {
        while j < l / p {
            j += 1;
            d += 2.0 * (f64::from(j) * step).cos();
        }
        let lf = f64::from(l);
        terms.push((-t * lf * (lf + 1.0)).exp() * d);
    }
    Ok(pairwise_sum(&terms))
}

/// Predicted `c_{−1}/t + c₀` behaviour of the trace as `t → 0⁺`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Prediction {
    /// Coefficient of `1/t`.
    pub leading: f64,
    /// Constant term.
    pub constant: f64,
}

fn is_identity(alpha: f64) -> bool {
    let x = alpha.rem_euclid(TAU);
    x < 1e-9 || TAU - x < 1e-9
}

/// Identity: area term `1/p` and constant `1/(3p) + 2·(p²−1)/(12p)`.
/// Rotation by α: no area term, and each of the two cone points contributes
/// `(1/p)·Σ_l 1/(2 − 2cos(α + 2πl/p))`.
pub fn asymptotic_prediction(p: u32, alpha: f64, mode: Mode) -> Result<Prediction> {
    if p == 0 {
        return Err(Error::DegenerateInput("football order p must be positive".into()));
    }
    let pf = f64::from(p);
    if is_identity(alpha) {
        let cone = rotation_sum(0.0, p, Mode::Exclusive)?;
        return Ok(Prediction { leading: 1.0 / pf, constant: 1.0 / (3.0 * pf) + 2.0 * cone / pf });
    }
    let pole = rotation_sum(alpha, p, mode)?;
    Ok(Prediction { leading: 0.0, constant: 2.0 * pole / pf })
}

/// Least-squares fit of `c_{−1}/t + c₀ + c₁t + … + c_k t^k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Extrapolation {
    pub c_minus1: f64,
    pub c0: f64,
    /// `c₁ … c_k`.
    pub higher: Vec<f64>,
    /// Condition number of the column-scaled design matrix.
    pub condition: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
}

/// Fit with a single correction term `c₁ t`.
pub fn extrapolate_constant_term(samples: &[(f64, f64)]) -> Result<Extrapolation> {
    extrapolate_with_order(samples, 1)
}

/// Fit with corrections up to `t^order`.
pub fn extrapolate_with_order(samples: &[(f64, f64)], order: usize) -> Result<Extrapolation> {
    let params = order + 2;
    let need = params.max(4);
    if samples.len() < need {
        return Err(Error::IllConditioned(format!("need at least {need} samples, got {}", samples.len())));
    }
    if let Some(&(t, _)) = samples.iter().find(|(t, _)| !(*t > 0.0 && *t <= MAX_SAMPLE_T)) {
        return Err(Error::IllConditioned(format!("sample t = {t} outside (0, {MAX_SAMPLE_T}]")));
    }
    let lo = samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let hi = samples.iter().map(|s| s.0).fold(0.0, f64::max);
    if hi < 10.0 * lo * (1.0 - 1e-9) {
        return Err(Error::IllConditioned(format!("t range [{lo:e}, {hi:e}] spans less than a decade")));
    }
    let m = samples.len();
    let mut a = DMatrix::<f64>::zeros(m, params);
    for (i, &(t, _)) in samples.iter().enumerate() {
        a[(i, 0)] = 1.0 / t;
        for k in 1..params {
            a[(i, k)] = t.powi(k as i32 - 1);
        }
    }
    let b = DVector::from_iterator(m, samples.iter().map(|s| s.1));
    let scales: Vec<f64> = (0..params).map(|k| a.column(k).norm()).collect();
    for (k, s) in scales.iter().enumerate() {
        a.column_mut(k).scale_mut(1.0 / s);
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = smax / smin;
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(Error::IllConditioned(format!("design matrix condition number {condition:e}")));
    }
    let x = svd
        .solve(&b, 0.0)
        .map_err(|e| Error::IllConditioned(e.to_string()))?;
    let coef: Vec<f64> = x.iter().zip(&scales).map(|(v, s)| v / s).collect();
    let fitted = &a * &x;
    let residual = ((fitted - &b).norm_squared() / m as f64).sqrt();
    Ok(Extrapolation { c_minus1: coef[0], c0: coef[1], higher: coef[2..].to_vec(), condition, residual })
}

/// Distance to `2πZ` of the nearest non-identity rotation angle
/// `α + 2πl/p` at a cone point; `∞` if there is none.
pub fn resonance_gap(p: u32, alpha: f64) -> f64 {
    let start = if is_identity(alpha) { 1 } else { 0 };
    (start..p)
        .map(|l| {
            let x = (alpha + TAU * f64::from(l) / f64::from(p)).rem_euclid(TAU);
            x.min(TAU - x)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Sampling window `[t_max/10, t_max]` with `t_max = 10⁻³·min(1, β²)`, where
/// β is the resonance gap: the expansion in `t` only becomes accurate once
/// `t ≪ β²`.
pub fn default_window(p: u32, alpha: f64) -> (f64, f64) {
    let beta = resonance_gap(p, alpha);
    let t_max = 1e-3 * beta.powi(2).min(1.0);
    (t_max / 10.0, t_max)
}

/// `points` values of `t` spaced geometrically over `[t_min, t_max]`.
pub fn log_grid(t_min: f64, t_max: f64, points: usize) -> Vec<f64> {
    if points <= 1 {
        return vec![t_max];
    }
    let (a, b) = (t_min.ln(), t_max.ln());
    (0..points).map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp()).collect()
}

/// Exact traces at the grid points.
pub fn sample_traces(p: u32, alpha: f64, ts: &[f64]) -> Result<Vec<(f64, f64)>> {
    ts.iter()
        .map(|&t| Ok((t, equivariant_heat_trace(p, alpha, t, default_l_max(t))?)))
        .collect()
}

/// Extrapolated `(c_{−1}, c₀)` of the exact trace over the default window,
/// twelve points and a cubic correction.
pub fn estimate_limit(p: u32, alpha: f64) -> Result<Extrapolation> {
    let (lo, hi) = default_window(p, alpha);
    let samples = sample_traces(p, alpha, &log_grid(lo, hi, 12))?;
    extrapolate_with_order(&samples, 3)
}
