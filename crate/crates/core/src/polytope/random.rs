//! Seeded sampling of generic labeled rational simple polytopes.

use rand::Rng;

use crate::error::{Error, Result};
use crate::lattice::primitive;
use crate::rational::approximate;

use super::generic::genericity_defect;
use super::{facet_fingerprint, LabeledHalfspace, LabeledPolytope};

const MAX_TRIES: usize = 20_000;

/// Samples a bounded generic rational simple polytope with exactly `facets`
/// facets: no parallel facets, no subpolytopes, labels uniform in `1..=max_label`,
/// and no facet smaller than 2% of the largest.
pub fn random_generic_polytope<R: Rng>(rng: &mut R, dim: usize, facets: usize, max_label: u32) -> Result<LabeledPolytope> {
    if !(2..=3).contains(&dim) || facets < dim + 1 || max_label == 0 {
        return Err(Error::DegenerateInput(format!(
            "cannot sample {facets} facets in dimension {dim} with labels ≤ {max_label}"
        )));
    }
    for _ in 0..MAX_TRIES {
        let directions = if dim == 2 { polygon_directions(rng, facets) } else { sphere_directions(rng, facets) };
        let Some(directions) = directions else { continue };
        let mut hs = Vec::with_capacity(facets);
        for dir in directions {
            let scale = if dim == 2 { 12.0 } else { 6.0 };
            let raw: Vec<i64> = dir.iter().map(|x| (x * scale).round() as i64).collect();
            let Ok(normal) = primitive(&raw) else { break };
            let len = normal.iter().map(|&x| (x as f64).powi(2)).sum::<f64>().sqrt();
            let height = rng.gen_range(1.0..1.5);
            let offset = approximate(height * len, 64)?;
            let label = rng.gen_range(1..=max_label);
            hs.push(LabeledHalfspace::new(normal, offset, label)?);
        }
        if hs.len() != facets {
            continue;
        }
        let p = LabeledPolytope::new(dim, hs)?;
        if p.geometry().is_err() || !matches!(genericity_defect(&p), Ok(None)) {
            continue;
        }
        let fp = facet_fingerprint(&p)?;
        let max = fp.iter().map(|d| d.volume).fold(0.0, f64::max);
        if fp.iter().any(|d| d.volume < 0.02 * max) {
            continue;
        }
        return Ok(p);
    }
    Err(Error::DegenerateInput(format!("no generic polytope found in {MAX_TRIES} draws")))
}

/// Unit vectors at sorted random angles with every angular gap below 0.9π.
fn polygon_directions<R: Rng>(rng: &mut R, count: usize) -> Option<Vec<Vec<f64>>> {
    let mut angles: Vec<f64> = (0..count).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
    angles.sort_by(|a, b| a.total_cmp(b));
    let max_gap = angles
        .windows(2)
        .map(|w| w[1] - w[0])
        .chain(std::iter::once(angles[0] + std::f64::consts::TAU - angles[count - 1]))
        .fold(0.0, f64::max);
    if max_gap > 0.9 * std::f64::consts::PI {
        return None;
    }
    Some(angles.into_iter().map(|a| vec![a.cos(), a.sin()]).collect())
}

fn sphere_directions<R: Rng>(rng: &mut R, count: usize) -> Option<Vec<Vec<f64>>> {
    let out: Vec<Vec<f64>> = (0..count)
        .map(|_| {
            let v: Vec<f64> = (0..3).map(|_| standard_normal(rng)).collect();
            let n = crate::geometry::norm(&v);
            v.into_iter().map(|x| x / n).collect()
        })
        .collect();
    Some(out)
}

/// Box–Muller draw from N(0, 1).
fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}
