//! Genericity predicates (parallel facets, balanced sub-collections of
//! facets) and a randomized perturbation that removes both.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::primitive;
use crate::rational::{approximate, to_f64, Rat};

use super::{facet_fingerprint, validate_rational_simple, FacetDatum, LabeledHalfspace, LabeledPolytope};

/// Largest facet count accepted by the exhaustive subset search.
pub const MAX_EXHAUSTIVE_FACETS: usize = 24;

const PERTURB_ATTEMPTS: usize = 100;

/// First pair of facets whose normals are parallel (either orientation).
pub fn parallel_pair(p: &LabeledPolytope) -> Option<(usize, usize)> {
    let hs = p.halfspaces();
    for i in 0..hs.len() {
        for j in (i + 1)..hs.len() {
            let neg: Vec<i64> = hs[j].normal.iter().map(|x| -x).collect();
            if hs[i].normal == hs[j].normal || hs[i].normal == neg {
                return Some((i, j));
            }
        }
    }
    None
}

pub fn has_parallel_facets(p: &LabeledPolytope) -> bool {
    parallel_pair(p).is_some()
}

/// A proper nonempty subset of facets whose weighted normals sum to zero,
/// within `1e-9 · max volume`. Subsets are scanned in increasing bitmask order.
pub fn has_subpolytopes(data: &[FacetDatum]) -> Result<Option<Vec<usize>>> {
    let d = data.len();
    if d > MAX_EXHAUSTIVE_FACETS {
        return Err(Error::TooManyFacets(d, MAX_EXHAUSTIVE_FACETS));
    }
    if d < 2 {
        return Ok(None);
    }
    let n = data[0].unit_normal.len();
    let max_vol = data.iter().map(|x| x.volume).fold(0.0f64, f64::max);
    let tol = 1e-9 * max_vol;
    let weighted: Vec<Vec<f64>> = data
        .iter()
        .map(|x| x.unit_normal.iter().map(|u| u * x.volume).collect())
        .collect();
    // Split the index set in two halves and tabulate the partial sums of each,
    // so every subset sum is formed from at most d additions.
    let lo_bits = d / 2;
    let hi_bits = d - lo_bits;
    let table = |offset: usize, bits: usize| -> Vec<Vec<f64>> {
        let mut t = vec![vec![0.0; n]; 1 << bits];
        for mask in 1usize..(1 << bits) {
            let low = mask.trailing_zeros() as usize;
            let prev = mask & (mask - 1);
            let w = &weighted[offset + low];
            t[mask] = t[prev].iter().zip(w).map(|(a, b)| a + b).collect();
        }
        t
    };
    let lo = table(0, lo_bits);
    let hi = table(lo_bits, hi_bits);
    let full = (1usize << d) - 1;
    for (h, hs) in hi.iter().enumerate() {
        for (l, ls) in lo.iter().enumerate() {
            let mask = (h << lo_bits) | l;
            if mask == 0 || mask == full {
                continue;
            }
            let sq: f64 = hs.iter().zip(ls).map(|(a, b)| (a + b) * (a + b)).sum();
            if sq.sqrt() < tol {
                return Ok(Some((0..d).filter(|i| mask >> i & 1 == 1).collect()));
            }
        }
    }
    Ok(None)
}

/// Why `p` fails to be a generic rational simple polytope, if it does.
pub(crate) fn genericity_defect(p: &LabeledPolytope) -> Result<Option<String>> {
    let report = validate_rational_simple(p);
    if !report.passed() {
        return Ok(Some(report.to_string()));
    }
    if let Some((i, j)) = parallel_pair(p) {
        return Ok(Some(format!("facets {i} and {j} are parallel")));
    }
    let fp = facet_fingerprint(p)?;
    if let Some(sub) = has_subpolytopes(&fp)? {
        return Ok(Some(format!("facets {sub:?} form a subpolytope")));
    }
    Ok(None)
}

/// Nearby rational simple polytope with no parallel facets and no
/// subpolytopes; every unit normal and normalized offset moves by at most `eps`.
/// Already-generic input is returned unchanged.
pub fn perturb_generic(p: &LabeledPolytope, eps: &Rat) -> Result<LabeledPolytope> {
    if eps <= &Rat::zero() {
        return Err(Error::DegenerateInput("perturbation scale must be positive".into()));
    }
    p.geometry()?;
    if genericity_defect(p)?.is_none() {
        return Ok(p.clone());
    }
    let eps_f = to_f64(eps);
    let mut rng = ChaCha8Rng::seed_from_u64(0x0b1f_01d5);
    for _ in 0..PERTURB_ATTEMPTS {
        if let Some(q) = try_perturb(p, eps_f, &mut rng)? {
            return Ok(q);
        }
    }
    Err(Error::PerturbationFailed(PERTURB_ATTEMPTS))
}

fn try_perturb(p: &LabeledPolytope, eps: f64, rng: &mut ChaCha8Rng) -> Result<Option<LabeledPolytope>> {
    let n = p.dim();
    let mut hs = p.halfspaces().to_vec();

    // Tilt one normal of every parallel pair.
    for round in 0.. {
        let current = LabeledPolytope { dim: n, halfspaces: hs.clone() };
        let Some((_, j)) = parallel_pair(&current) else { break };
        if round > 4 * hs.len() {
            return Ok(None);
        }
        match tilt(&p.halfspaces()[j], eps, rng)? {
            Some(h) => hs[j] = h,
            None => return Ok(None),
        }
    }

    // Shift one offset inside every balanced sub-collection.
    for _ in 0..hs.len() {
        let current = LabeledPolytope { dim: n, halfspaces: hs.clone() };
        let Ok(fp) = facet_fingerprint(&current) else { return Ok(None) };
        let Some(sub) = has_subpolytopes(&fp)? else { break };
        let j = sub[rng.gen_range(0..sub.len())];
        let shift = rng.gen_range(-0.5..0.5) * eps * hs[j].norm();
        let Ok(delta) = approximate(shift, 1_000_000) else { return Ok(None) };
        hs[j].offset = &hs[j].offset + delta;
    }

    let q = LabeledPolytope::new(n, hs)?;
    if !within_eps(p, &q, eps) || q.geometry().is_err() {
        return Ok(None);
    }
    Ok(if genericity_defect(&q)?.is_none() { Some(q) } else { None })
}

/// Replaces the normal by a nearby primitive integer vector and rescales the
/// offset so the normalized offset barely moves.
fn tilt(h: &LabeledHalfspace, eps: f64, rng: &mut ChaCha8Rng) -> Result<Option<LabeledHalfspace>> {
    let n = h.normal.len();
    let unit = h.unit_normal();
    let scale = (8.0 * n as f64 / eps).ceil();
    let w: Vec<i64> = unit
        .iter()
        .map(|u| ((u + rng.gen_range(-0.25..0.25) * eps) * scale).round() as i64)
        .collect();
    let Ok(w) = primitive(&w) else { return Ok(None) };
    let w_norm = w.iter().map(|&x| (x as f64).powi(2)).sum::<f64>().sqrt();
    let target = to_f64(&h.offset) / h.norm() * w_norm;
    let Ok(offset) = approximate(target, (64.0 / eps).ceil() as i64) else { return Ok(None) };
    Ok(Some(LabeledHalfspace { normal: w, offset, label: h.label }))
}

fn within_eps(p: &LabeledPolytope, q: &LabeledPolytope, eps: f64) -> bool {
    p.halfspaces().iter().zip(q.halfspaces()).all(|(a, b)| {
        let (ua, ub) = (a.unit_normal(), b.unit_normal());
        let normal_ok = ua.iter().zip(&ub).all(|(x, y)| (x - y).abs() <= eps);
        let ca = to_f64(&a.offset) / a.norm();
        let cb = to_f64(&b.offset) / b.norm();
        normal_ok && (ca - cb).abs() <= eps
    })
}
