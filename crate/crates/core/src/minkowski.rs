//! The Minkowski problem for polytopes: recover offsets `c` such that
//! `{x : x·û_i ≤ c_i}` has prescribed facet volumes.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{combinations, dot, norm, Incidence};
use crate::polytope::FacetDatum;

/// Unit normals with facet volumes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinkowskiInput {
    normals: Vec<Vec<f64>>,
    volumes: Vec<f64>,
}

impl MinkowskiInput {
    /// Normalizes the normals; rejects mismatched lengths, zero normals,
    /// nonpositive volumes and repeated directions.
    pub fn new(normals: Vec<Vec<f64>>, volumes: Vec<f64>) -> Result<Self> {
        if normals.len() != volumes.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} normals but {} volumes",
                normals.len(),
                volumes.len()
            )));
        }
        let n = normals.first().map_or(0, |u| u.len());
        if n == 0 {
            return Err(Error::DegenerateInput("no normals".into()));
        }
        let mut units = Vec::with_capacity(normals.len());
        for u in &normals {
            if u.len() != n {
                return Err(Error::ShapeMismatch(format!("normal {u:?} has length {}, expected {n}", u.len())));
            }
            let len = norm(u);
            if !(len > 0.0) || !len.is_finite() {
                return Err(Error::ZeroVector);
            }
            units.push(u.iter().map(|x| x / len).collect::<Vec<f64>>());
        }
        if let Some(v) = volumes.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
            return Err(Error::DegenerateInput(format!("facet volume {v} is not positive")));
        }
        for i in 0..units.len() {
            for j in (i + 1)..units.len() {
                if dot(&units[i], &units[j]) > 1.0 - 1e-12 {
                    return Err(Error::DegenerateInput(format!("normals {i} and {j} coincide")));
                }
            }
        }
        Ok(Self { normals: units, volumes })
    }

    pub fn from_fingerprint(data: &[FacetDatum]) -> Result<Self> {
        Self::new(data.iter().map(|d| d.unit_normal.clone()).collect(), data.iter().map(|d| d.volume).collect())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: MinkowskiInput = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::new(raw.normals, raw.volumes)
    }

    pub fn dim(&self) -> usize {
        self.normals[0].len()
    }

    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }

    pub fn normals(&self) -> &[Vec<f64>] {
        &self.normals
    }

    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    /// Input with every volume multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self { normals: self.normals.clone(), volumes: self.volumes.iter().map(|v| v * factor).collect() }
    }
}

/// `Σ ν_i û_i`.
pub fn check_balance(inp: &MinkowskiInput) -> Vec<f64> {
    let mut s = vec![0.0; inp.dim()];
    for (u, v) in inp.normals.iter().zip(&inp.volumes) {
        s.iter_mut().zip(u).for_each(|(si, ui)| *si += v * ui);
    }
    s
}

fn require_balanced(inp: &MinkowskiInput) -> Result<()> {
    let total: f64 = inp.volumes.iter().sum();
    let r = norm(&check_balance(inp));
    if r > 1e-8 * total {
        return Err(Error::BalanceViolation(r));
    }
    Ok(())
}

/// Offsets aligned with the input normals, with the vertex centroid at the origin.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinkowskiSolution {
    pub offsets: Vec<f64>,
    pub vertices: Vec<Vec<f64>>,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverOptions {
    /// Largest accepted relative error of any facet volume.
    pub tol: f64,
    pub max_iter: usize,
    /// Starting offsets; all ones when absent.
    pub initial: Option<Vec<f64>>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 200, initial: None }
    }
}

fn centered(offsets: Vec<f64>, vertices: Vec<Vec<f64>>, normals: &[Vec<f64>], iterations: usize) -> MinkowskiSolution {
    let n = normals[0].len();
    let k = vertices.len() as f64;
    let c: Vec<f64> = (0..n).map(|j| vertices.iter().map(|v| v[j]).sum::<f64>() / k).collect();
    let vertices = vertices.into_iter().map(|v| v.iter().zip(&c).map(|(a, b)| a - b).collect()).collect();
    let offsets = offsets.iter().zip(normals).map(|(h, u)| h - dot(u, &c)).collect();
    MinkowskiSolution { offsets, vertices, iterations }
}

/// Polygon by chaining edges in angular order; vertices counterclockwise.
pub fn reconstruct_2d(inp: &MinkowskiInput) -> Result<MinkowskiSolution> {
    if inp.dim() != 2 {
        return Err(Error::ShapeMismatch(format!("planar reconstruction needs n = 2, got {}", inp.dim())));
    }
    if inp.len() < 3 {
        return Err(Error::DegenerateInput(format!("{} normals cannot bound a polygon", inp.len())));
    }
    require_balanced(inp)?;
    let mut order: Vec<usize> = (0..inp.len()).collect();
    let angle = |i: usize| inp.normals[i][1].atan2(inp.normals[i][0]);
    order.sort_by(|&a, &b| angle(a).total_cmp(&angle(b)));
    let mut offsets = vec![0.0; inp.len()];
    let mut vertices = Vec::with_capacity(inp.len());
    let mut at = [0.0, 0.0];
    for &i in &order {
        let u = &inp.normals[i];
        vertices.push(at.to_vec());
        offsets[i] = u[0] * at[0] + u[1] * at[1];
        // Counterclockwise edge direction: the outward normal turned by +90°.
        at[0] -= inp.volumes[i] * u[1];
        at[1] += inp.volumes[i] * u[0];
    }
    let scale: f64 = inp.volumes.iter().sum();
    let closure = (at[0] * at[0] + at[1] * at[1]).sqrt();
    if closure > 1e-10 * scale.max(1.0) && closure > 1e-8 * scale {
        return Err(Error::BalanceViolation(closure));
    }
    Ok(centered(offsets, vertices, &inp.normals, 0))
}

/// Total volume, facet volumes and vertex data at offsets `c`.
struct Evaluation {
    volume: f64,
    areas: Vec<f64>,
    points: Vec<Vec<f64>>,
    inc: Incidence,
}

fn solve_small(rows: &[&[f64]], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = rhs.len();
    let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let lu = m.lu();
    let det = lu.determinant();
    if det.abs() < 1e-12 {
        return None;
    }
    lu.solve(&DVector::from_column_slice(rhs)).map(|x| x.iter().copied().collect())
}

fn evaluate(normals: &[Vec<f64>], c: &[f64]) -> Option<Evaluation> {
    let n = normals[0].len();
    let d = normals.len();
    let scale = c.iter().fold(1e-300f64, |m, x| m.max(x.abs()));
    let tol = 1e-9 * scale;
    let mut points: Vec<Vec<f64>> = Vec::new();
    for subset in combinations(d, n) {
        let rows: Vec<&[f64]> = subset.iter().map(|&i| normals[i].as_slice()).collect();
        let rhs: Vec<f64> = subset.iter().map(|&i| c[i]).collect();
        let Some(x) = solve_small(&rows, &rhs) else { continue };
        if normals.iter().zip(c).any(|(u, ci)| dot(u, &x) > ci + tol) {
            continue;
        }
        if points.iter().any(|p| norm(&crate::geometry::sub(p, &x)) <= tol) {
            continue;
        }
        points.push(x);
    }
    if points.len() <= n {
        return None;
    }
    let tight: Vec<BTreeSet<usize>> = points
        .iter()
        .map(|x| (0..d).filter(|&i| (dot(&normals[i], x) - c[i]).abs() <= tol).collect())
        .collect();
    let inc = Incidence::new(n, points.clone(), tight);
    let all: Vec<usize> = (0..points.len()).collect();
    if inc.affine_dim(&all) < n {
        return None;
    }
    let mut faces: Vec<Vec<usize>> = vec![all];
    let mut usable = vec![false; d];
    for (i, ok) in usable.iter_mut().enumerate() {
        let ids = inc.vertices_on(&BTreeSet::from([i]));
        *ok = !ids.is_empty() && inc.affine_dim(&ids) + 1 == n;
        faces.push(ids);
    }
    let vols = inc.face_volumes(&faces);
    let areas = (0..d).map(|i| if usable[i] { vols[i + 1] } else { 0.0 }).collect();
    Some(Evaluation { volume: vols[0], areas, points, inc })
}

/// `J[j][i] = ∂A_j/∂c_i`: ridge volume over the sine of the dihedral angle
/// off the diagonal, translation invariance on it, central differences when
/// the angle is nearly flat.
fn jacobian(normals: &[Vec<f64>], c: &[f64], ev: &Evaluation) -> DMatrix<f64> {
    let d = normals.len();
    let n = normals[0].len();
    let mut jac = DMatrix::zeros(d, d);
    let mut fallback = Vec::new();
    for i in 0..d {
        for j in 0..d {
            if i == j || ev.areas[i] == 0.0 || ev.areas[j] == 0.0 {
                continue;
            }
            let ridge = ev.inc.vertices_on(&BTreeSet::from([i, j]));
            if ridge.is_empty() || ev.inc.affine_dim(&ridge) + 2 != n {
                continue;
            }
            let cos = dot(&normals[i], &normals[j]);
            let sin = (1.0 - cos * cos).max(0.0).sqrt();
            if sin < 1e-6 {
                fallback.push(i);
                continue;
            }
            jac[(j, i)] = ev.inc.face_volume(&ridge) / sin;
        }
    }
    for j in 0..d {
        let off: f64 = (0..d).filter(|&i| i != j).map(|i| jac[(j, i)] * dot(&normals[i], &normals[j])).sum();
        jac[(j, j)] = -off;
    }
    fallback.sort_unstable();
    fallback.dedup();
    let scale = c.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-12);
    for i in fallback {
        let h = 1e-5 * scale;
        let mut plus = c.to_vec();
        let mut minus = c.to_vec();
        plus[i] += h;
        minus[i] -= h;
        if let (Some(a), Some(b)) = (evaluate(normals, &plus), evaluate(normals, &minus)) {
            for j in 0..d {
                jac[(j, i)] = (a.areas[j] - b.areas[j]) / (2.0 * h);
            }
        }
    }
    jac
}

fn max_relative_error(areas: &[f64], target: &[f64]) -> f64 {
    areas.iter().zip(target).map(|(a, t)| (a - t).abs() / t).fold(0.0, f64::max)
}

/// Offsets for arbitrary dimension. A convex warm start minimizes
/// `Σ ν_i c_i − n·log V(c)`, whose minimizer has facet volumes proportional
/// to `ν`; rescaling and damped Newton on `A(c) = ν` finish the solve.
pub fn reconstruct_nd(inp: &MinkowskiInput, opts: &SolverOptions) -> Result<MinkowskiSolution> {
    let n = inp.dim();
    let d = inp.len();
    if n < 2 {
        return Err(Error::DegenerateInput("dimension must be at least 2".into()));
    }
    require_balanced(inp)?;
    let u_mat = DMatrix::from_fn(d, n, |i, j| inp.normals[i][j]);
    if u_mat.rank(1e-9) < n {
        return Err(Error::DegenerateInput("normals do not span the space".into()));
    }
    let normals = &inp.normals;
    let nu = DVector::from_column_slice(&inp.volumes);
    let mut c = match &opts.initial {
        Some(init) if init.len() == d => init.clone(),
        Some(init) => {
            return Err(Error::ShapeMismatch(format!("{} initial offsets for {d} facets", init.len())));
        }
        None => vec![1.0; d],
    };
    let mut ev = evaluate(normals, &c).ok_or(Error::EmptyIntermediate)?;
    let kappa = n as f64;
    let mut iterations = 0;

    // Warm start: damped Newton on the convex potential.
    let potential = |c: &[f64], ev: &Evaluation| -> f64 {
        inp.volumes.iter().zip(c).map(|(v, x)| v * x).sum::<f64>() - kappa * ev.volume.ln()
    };
    // The potential flattens out near its minimum, so hand over to the polish
    // once the gradient is small or stops shrinking.
    let nu_max = inp.volumes.iter().cloned().fold(0.0, f64::max);
    let mut last_grad = f64::INFINITY;
    while iterations < opts.max_iter {
        let a = DVector::from_column_slice(&ev.areas);
        let grad = &nu - &a * (kappa / ev.volume);
        let g = grad.amax();
        if g <= 1e-9 * nu_max || (g <= 1e-4 * nu_max && g > 0.5 * last_grad) {
            break;
        }
        last_grad = g;
        iterations += 1;
        let jac = jacobian(normals, &c, &ev);
        let mut hess = -&jac * (kappa / ev.volume) + &a * a.transpose() * (kappa / ev.volume.powi(2));
        let shift = 1e-12 * hess.diagonal().amax().max(1e-300);
        for i in 0..d {
            hess[(i, i)] += shift;
        }
        let step = match hess.clone().cholesky() {
            Some(ch) => ch.solve(&(-&grad)),
            None => -&grad,
        };
        let slope = grad.dot(&step);
        let step = if slope < 0.0 { step } else { -grad.clone() };
        let slope = grad.dot(&step);
        let g0 = potential(&c, &ev);
        let mut s = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> = c.iter().zip(step.iter()).map(|(x, dx)| x + s * dx).collect();
            if let Some(e) = evaluate(normals, &trial) {
                if e.volume > 0.0 && potential(&trial, &e) <= g0 + 1e-4 * s * slope {
                    c = trial;
                    ev = e;
                    accepted = true;
                    break;
                }
            }
            s *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    // Facet volumes are now μ·ν; scale lengths by μ^{−1/(n−1)}.
    let mu: f64 = ev.areas.iter().sum::<f64>() / inp.volumes.iter().sum::<f64>();
    if !(mu > 0.0) {
        return Err(Error::EmptyIntermediate);
    }
    let lambda = mu.powf(-1.0 / (n as f64 - 1.0));
    c.iter_mut().for_each(|x| *x *= lambda);
    ev = evaluate(normals, &c).ok_or(Error::EmptyIntermediate)?;

    // Polish: damped Newton on A(c) − ν with Armijo on the squared residual.
    loop {
        let err = max_relative_error(&ev.areas, &inp.volumes);
        if err <= opts.tol {
            return Ok(centered(c, ev.points, normals, iterations));
        }
        if iterations >= opts.max_iter {
            return Err(Error::NonConvergence { iterations, residual: err });
        }
        iterations += 1;
        let resid = DVector::from_column_slice(&ev.areas) - &nu;
        let f0 = resid.norm_squared();
        let jac = jacobian(normals, &c, &ev);
        let svd = jac.svd(true, true);
        let cutoff = 1e-10 * svd.singular_values.max();
        let step = svd.solve(&(-&resid), cutoff).map_err(|e| Error::IllConditioned(e.to_string()))?;
        let mut s = 1.0;
        let mut accepted = false;
        let mut saw_empty = false;
        for _ in 0..50 {
            let trial: Vec<f64> = c.iter().zip(step.iter()).map(|(x, dx)| x + s * dx).collect();
            match evaluate(normals, &trial) {
                Some(e) if e.areas.iter().all(|&x| x > 0.0) => {
                    let f = e.areas.iter().zip(&inp.volumes).map(|(a, v)| (a - v).powi(2)).sum::<f64>();
                    if f <= (1.0 - 1e-4 * s) * f0 {
                        c = trial;
                        ev = e;
                        accepted = true;
                        break;
                    }
                }
                _ => saw_empty = true,
            }
            s *= 0.5;
        }
        if !accepted {
            if saw_empty {
                return Err(Error::EmptyIntermediate);
            }
            return Err(Error::NonConvergence { iterations, residual: err });
        }
    }
}

/// Facet volumes of `{x : x·û_i ≤ c_i}`; empty or lower-dimensional facets
/// get 0.
pub fn facet_volumes(normals: &[Vec<f64>], offsets: &[f64]) -> Result<Vec<f64>> {
    if normals.is_empty() || normals.len() != offsets.len() {
        return Err(Error::ShapeMismatch("normals and offsets differ in length".into()));
    }
    let units: Vec<Vec<f64>> = normals
        .iter()
        .map(|u| {
            let l = norm(u);
            u.iter().map(|x| x / l).collect()
        })
        .collect();
    let scaled: Vec<f64> = offsets.iter().zip(normals).map(|(c, u)| c / norm(u)).collect();
    evaluate(&units, &scaled)
        .map(|e| e.areas)
        .ok_or_else(|| Error::InvalidPolytope("halfspaces bound no full-dimensional polytope".into()))
}
