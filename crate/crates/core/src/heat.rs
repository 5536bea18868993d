//! Leading terms of the equivariant heat trace of a toric orbifold, read off
//! from its labeled moment polytope, plus the local b₀, τ and b₂ evaluators.

use std::collections::BTreeSet;
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{face_lattice, is_primitive};
use crate::polytope::{faces, Face, LabeledPolytope};
use crate::rational::{coordinates_in_span, int_row, to_f64, Rat};

const ANGLE_TOL: f64 = 1e-9;

/// Which orbit elements enter the rotation sum: all of them, or all but the
/// identity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Inclusive,
    Exclusive,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inclusive" => Ok(Mode::Inclusive),
            "exclusive" => Ok(Mode::Exclusive),
            other => Err(Error::Parse(format!("unknown mode '{other}'"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Inclusive => "inclusive",
            Mode::Exclusive => "exclusive",
        })
    }
}

/// `exp(i·r·u)` in the torus.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusElement {
    pub direction: Vec<i64>,
    pub parameter: f64,
}

impl TorusElement {
    pub fn new(direction: Vec<i64>, parameter: f64) -> Result<Self> {
        if direction.iter().all(|&x| x == 0) {
            return Err(Error::ZeroVector);
        }
        if !is_primitive(&direction) {
            return Err(Error::NonPrimitiveNormal(direction));
        }
        if !parameter.is_finite() {
            return Err(Error::DegenerateParameter(format!("r = {parameter}")));
        }
        Ok(Self { direction, parameter })
    }
}

fn is_zero_angle(a: f64) -> bool {
    let x = a.rem_euclid(TAU);
    x < ANGLE_TOL || TAU - x < ANGLE_TOL
}

/// `1/(2 − 2cos a)`, evaluated as `1/(4 sin²(a/2))` to keep relative accuracy
/// near multiples of 2π.
fn inverse_chord(a: f64) -> f64 {
    let s = (0.5 * a).sin();
    0.25 / (s * s)
}

/// `Σ_l 1/(2 − 2cos(r + 2πl/Ω))`, over `l = 0..Ω` (inclusive) or `l = 1..Ω`
/// (exclusive).
pub fn rotation_sum(r: f64, omega: u32, mode: Mode) -> Result<f64> {
    if omega == 0 {
        return Err(Error::DegenerateParameter("Ω must be positive".into()));
    }
    let start = match mode {
        Mode::Inclusive => 0,
        Mode::Exclusive => 1,
    };
    let mut total = 0.0;
    for l in start..omega {
        let a = r + TAU * l as f64 / omega as f64;
        if is_zero_angle(a) {
            return Err(Error::DegenerateParameter(format!(
                "angle r + 2π·{l}/{omega} vanishes mod 2π at r = {r}"
            )));
        }
        total += inverse_chord(a);
    }
    Ok(total)
}

/// `(4π)^{-k} (2π)^k`, which simplifies to `2^{-k}`.
fn weyl_factor(k: usize) -> f64 {
    (2.0 * PI / (4.0 * PI)).powi(k as i32)
}

/// Coefficient of `t^{-(n-1)}` contributed by facet `facet` when the torus
/// element rotates its normal plane by `r`.
pub fn facet_leading_coefficient(p: &LabeledPolytope, facet: usize, r: f64, mode: Mode) -> Result<f64> {
    if facet >= p.facet_count() {
        return Err(Error::IndexOutOfRange { index: facet, len: p.facet_count() });
    }
    let omega = p.halfspace(facet).label;
    let fs = faces(p, 1)?;
    let face = fs
        .iter()
        .find(|f| f.tight_set.len() == 1 && f.tight_set.contains(&facet))
        .ok_or_else(|| Error::InvalidPolytope(format!("facet {facet} not found")))?;
    let vol = crate::polytope::face_volume(p, face)?;
    let sum = rotation_sum(r, omega, mode)?;
    Ok(weyl_factor(p.dim() - 1) * vol * sum / omega as f64)
}

/// Origin of an expansion term.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Source {
    Regular,
    Face(BTreeSet<usize>),
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Regular => f.write_str("regular"),
            Source::Face(s) => {
                let ids: Vec<String> = s.iter().map(|i| i.to_string()).collect();
                write!(f, "face:{}", ids.join("-"))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeatTerm {
    pub t_exponent: Rat,
    pub coefficient: f64,
    pub source: Source,
    /// Set for faces of codimension ≥ 2, whose coefficient uses the
    /// product-of-rotations model rather than the facet formula.
    pub model: bool,
}

/// Terms sorted by t-exponent, then by source. Several fixed components may
/// share an exponent.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HeatExpansion {
    pub terms: Vec<HeatTerm>,
}

impl HeatExpansion {
    /// The most singular exponent present.
    pub fn leading_exponent(&self) -> Option<Rat> {
        self.terms.first().map(|t| t.t_exponent.clone())
    }

    /// Sum of the coefficients at the most singular exponent.
    pub fn leading_coefficient(&self) -> Option<f64> {
        let e = self.leading_exponent()?;
        Some(self.terms.iter().filter(|t| t.t_exponent == e).map(|t| t.coefficient).sum())
    }
}

fn in_span(p: &LabeledPolytope, tight: &BTreeSet<usize>, u: &[i64]) -> Option<Vec<Rat>> {
    let rows: Vec<Vec<Rat>> = tight.iter().map(|&i| int_row(&p.halfspace(i).normal)).collect();
    coordinates_in_span(&rows, &int_row(u))
}

/// Maximal faces whose normal space contains `u.direction`; these are the
/// connected components of the fixed set.
pub fn fixed_faces(p: &LabeledPolytope, u: &TorusElement) -> Result<Vec<Face>> {
    if u.direction.len() != p.dim() {
        return Err(Error::ShapeMismatch(format!(
            "direction has length {}, polytope dimension is {}",
            u.direction.len(),
            p.dim()
        )));
    }
    if is_zero_angle(u.parameter) {
        return Err(Error::DegenerateParameter(format!("r = {} is 0 mod 2π", u.parameter)));
    }
    let mut fixed: Vec<Face> = Vec::new();
    for codim in 1..=p.dim() {
        for f in faces(p, codim)? {
            if in_span(p, &f.tight_set, &u.direction).is_none() {
                continue;
            }
            if fixed.iter().any(|g| g.tight_set.is_subset(&f.tight_set)) {
                continue;
            }
            fixed.push(f);
        }
    }
    Ok(fixed)
}

/// Coefficient of a fixed face: Weyl factor, face volume and the averaged
/// product of inverse chords over the face's isotropy group.
fn face_coefficient(p: &LabeledPolytope, face: &Face, coords: &[Rat], r: f64, mode: Mode) -> Result<f64> {
    let facets: Vec<usize> = face.tight_set.iter().copied().collect();
    let lattice = face_lattice(p, &facets)?;
    let phases = lattice.element_phases();
    let order = phases.len() as f64;
    let skip = match mode {
        Mode::Inclusive => 0,
        Mode::Exclusive => 1,
    };
    let mut sum = 0.0;
    for x in phases.iter().skip(skip) {
        let mut prod = 1.0;
        for (a, xj) in coords.iter().zip(x) {
            let angle = r * to_f64(a) + TAU * xj;
            if is_zero_angle(angle) {
                return Err(Error::DegenerateParameter(format!(
                    "rotation angle vanishes on face {:?} at r = {r}",
                    face.tight_set
                )));
            }
            prod *= inverse_chord(angle);
        }
        sum += prod;
    }
    let k = p.dim() - face.codim;
    let vol = crate::polytope::face_volume(p, face)?;
    Ok(weyl_factor(k) * vol * sum / order)
}

/// Leading term of every fixed component, sorted by exponent. `order` is
/// reserved for subleading terms and must be 0.
pub fn equivariant_expansion(p: &LabeledPolytope, u: &TorusElement, order: usize, mode: Mode) -> Result<HeatExpansion> {
    if order != 0 {
        return Err(Error::DegenerateInput(format!("expansion order {order} is not supported")));
    }
    let n = p.dim();
    let mut terms = Vec::new();
    for face in fixed_faces(p, u)? {
        let coords = in_span(p, &face.tight_set, &u.direction).expect("fixed face contains direction");
        let coefficient = face_coefficient(p, &face, &coords, u.parameter, mode)?;
        terms.push(HeatTerm {
            t_exponent: -Rat::from_integer(((n - face.codim) as i64).into()),
            coefficient,
            model: face.codim >= 2,
            source: Source::Face(face.tight_set),
        });
    }
    terms.sort_by(|a, b| a.t_exponent.cmp(&b.t_exponent).then_with(|| a.source.cmp(&b.source)));
    Ok(HeatExpansion { terms })
}

/// Leading exponent of the expansion for direction `u` and its coefficient at
/// every `r` in `r_values`. The fixed set is computed once.
pub fn leading_curve(p: &LabeledPolytope, direction: &[i64], r_values: &[f64], mode: Mode) -> Result<(Rat, Vec<f64>)> {
    let Some(&r0) = r_values.first() else {
        return Err(Error::InsufficientSamples { need: 1, got: 0 });
    };
    let u = TorusElement::new(direction.to_vec(), r0)?;
    let fixed = fixed_faces(p, &u)?;
    let max_dim = fixed.iter().map(|f| p.dim() - f.codim).max().unwrap_or(0);
    let leading: Vec<(Face, Vec<Rat>)> = fixed
        .into_iter()
        .filter(|f| p.dim() - f.codim == max_dim)
        .map(|f| {
            let coords = in_span(p, &f.tight_set, direction).expect("fixed face contains direction");
            (f, coords)
        })
        .collect();
    let mut curve = Vec::with_capacity(r_values.len());
    for &r in r_values {
        if is_zero_angle(r) {
            return Err(Error::DegenerateParameter(format!("r = {r} is 0 mod 2π")));
        }
        let mut total = 0.0;
        for (face, coords) in &leading {
            total += face_coefficient(p, face, coords, r, mode)?;
        }
        curve.push(total);
    }
    Ok((-Rat::from_integer((max_dim as i64).into()), curve))
}

/// `Σ_j 1/(2 − 2cos a_j)`.
pub fn evaluate_b0(angles: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for &a in angles {
        if is_zero_angle(a) {
            return Err(Error::DegenerateParameter(format!("angle {a} is 0 mod 2π")));
        }
        total += inverse_chord(a);
    }
    Ok(total)
}

/// Curvature at a fixed point, restricted to the `N` normal directions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureLocalData {
    pub s: f64,
    /// `N × N` Ricci components.
    pub rho: Vec<Vec<f64>>,
    /// Riemann components, row-major in `(i, k, s, h)`, length `N⁴`.
    pub riemann: Vec<f64>,
    /// `N × N` matrix `(I − A)⁻¹`.
    pub b: Vec<Vec<f64>>,
}

impl CurvatureLocalData {
    fn size(&self) -> Result<usize> {
        let n = self.b.len();
        let square = |m: &Vec<Vec<f64>>| m.len() == n && m.iter().all(|r| r.len() == n);
        if !square(&self.b) || !square(&self.rho) || self.riemann.len() != n.pow(4) {
            return Err(Error::ShapeMismatch(format!(
                "B is {}×?, ρ is {}×?, R has {} entries",
                self.b.len(),
                self.rho.len(),
                self.riemann.len()
            )));
        }
        Ok(n)
    }

    fn r(&self, n: usize, i: usize, k: usize, s: usize, h: usize) -> f64 {
        self.riemann[((i * n + k) * n + s) * n + h]
    }
}

/// `s/6 + ρ_kk/6 + R_iksh B_ki B_hs/3 + R_ikth B_kt B_hi/3 − R_kaha B_ks B_hs`.
pub fn evaluate_tau(d: &CurvatureLocalData) -> Result<f64> {
    let n = d.size()?;
    let b = &d.b;
    let trace_rho: f64 = (0..n).map(|k| d.rho[k][k]).sum();
    let (mut t1, mut t2, mut t3) = (0.0, 0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            for s in 0..n {
                for h in 0..n {
                    t1 += d.r(n, i, k, s, h) * b[k][i] * b[h][s];
                    t2 += d.r(n, i, k, s, h) * b[k][s] * b[h][i];
                }
            }
        }
    }
    for k in 0..n {
        for h in 0..n {
            let contracted: f64 = (0..n).map(|a| d.r(n, k, a, h, a)).sum();
            let bb: f64 = (0..n).map(|s| b[k][s] * b[h][s]).sum();
            t3 += contracted * bb;
        }
    }
    Ok(d.s / 6.0 + trace_rho / 6.0 + t1 / 3.0 + t2 / 3.0 - t3)
}

/// `(2|R|² − 2|ρ|² + 5s²)/360`.
pub fn evaluate_b2_integrand(r_sq: f64, rho_sq: f64, s_sq: f64) -> f64 {
    (2.0 * r_sq - 2.0 * rho_sq + 5.0 * s_sq) / 360.0
}
