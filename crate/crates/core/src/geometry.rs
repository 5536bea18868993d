//! Floating-point face lattice and volume computations shared by the exact
//! polytope code and the Minkowski solver.

use std::collections::{BTreeSet, HashMap};

/// k-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in (i + 1)..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn centroid(points: &[&[f64]]) -> Vec<f64> {
    let dim = points.first().map_or(0, |p| p.len());
    let mut c = vec![0.0; dim];
    for p in points {
        for (ci, pi) in c.iter_mut().zip(p.iter()) {
            *ci += pi;
        }
    }
    let k = points.len().max(1) as f64;
    c.iter_mut().for_each(|x| *x /= k);
    c
}

/// Orthonormal basis of the span of `vectors`, dropping components below `tol`.
pub fn orthonormal_basis(vectors: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        // Two Gram–Schmidt passes keep the basis orthogonal to machine precision.
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&w, b);
                w.iter_mut().zip(b).for_each(|(wi, bi)| *wi -= c * bi);
            }
        }
        let n = norm(&w);
        if n > tol {
            basis.push(w.into_iter().map(|x| x / n).collect());
        }
    }
    basis
}

/// Vertex coordinates together with, for each vertex, the set of facets it lies on.
#[derive(Clone, Debug)]
pub struct Incidence {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub tight: Vec<BTreeSet<usize>>,
    tol: f64,
}

impl Incidence {
    pub fn new(dim: usize, points: Vec<Vec<f64>>, tight: Vec<BTreeSet<usize>>) -> Self {
        let scale = points
            .iter()
            .flat_map(|p| p.iter())
            .fold(1.0f64, |m, x| m.max(x.abs()));
        Self { dim, points, tight, tol: 1e-9 * scale }
    }

    pub fn vertex_count(&self) -> usize {
        self.points.len()
    }

    /// Vertices lying on every facet in `facets`.
    pub fn vertices_on(&self, facets: &BTreeSet<usize>) -> Vec<usize> {
        (0..self.points.len())
            .filter(|&v| facets.is_subset(&self.tight[v]))
            .collect()
    }

    /// Facets containing every listed vertex.
    pub fn common_facets(&self, ids: &[usize]) -> BTreeSet<usize> {
        let mut it = ids.iter();
        let Some(&first) = it.next() else {
            return BTreeSet::new();
        };
        let mut common = self.tight[first].clone();
        for &v in it {
            common = common.intersection(&self.tight[v]).copied().collect();
        }
        common
    }

    fn direction_basis(&self, ids: &[usize]) -> Vec<Vec<f64>> {
        let Some(&base) = ids.first() else {
            return vec![];
        };
        let diffs: Vec<Vec<f64>> = ids[1..]
            .iter()
            .map(|&v| sub(&self.points[v], &self.points[base]))
            .collect();
        orthonormal_basis(&diffs, self.tol)
    }

    pub fn affine_dim(&self, ids: &[usize]) -> usize {
        self.direction_basis(ids).len()
    }

    /// Euclidean volume of the face spanned by `ids` in its own affine hull;
    /// a single vertex has volume 1.
    pub fn face_volume(&self, ids: &[usize]) -> f64 {
        let mut memo = HashMap::new();
        let mut key = ids.to_vec();
        key.sort_unstable();
        key.dedup();
        self.volume_rec(&key, &mut memo)
    }

    /// Volumes of several faces, sharing the recursion cache.
    pub fn face_volumes(&self, faces: &[Vec<usize>]) -> Vec<f64> {
        let mut memo = HashMap::new();
        faces
            .iter()
            .map(|ids| {
                let mut key = ids.clone();
                key.sort_unstable();
                key.dedup();
                self.volume_rec(&key, &mut memo)
            })
            .collect()
    }

    /// Facets of the face `ids` (each a sorted vertex list one dimension lower).
    pub fn subfaces(&self, ids: &[usize]) -> Vec<Vec<usize>> {
        let k = self.affine_dim(ids);
        if k == 0 {
            return vec![];
        }
        let common = self.common_facets(ids);
        let mut candidates: BTreeSet<usize> = BTreeSet::new();
        for &v in ids {
            candidates.extend(self.tight[v].difference(&common).copied());
        }
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        for j in candidates {
            let sub: Vec<usize> = ids.iter().copied().filter(|&v| self.tight[v].contains(&j)).collect();
            if sub.is_empty() || seen.contains(&sub) {
                continue;
            }
            if self.affine_dim(&sub) + 1 == k {
                seen.insert(sub);
            }
        }
        seen.into_iter().collect()
    }

    fn volume_rec(&self, ids: &[usize], memo: &mut HashMap<Vec<usize>, f64>) -> f64 {
        if let Some(&v) = memo.get(ids) {
            return v;
        }
        let basis = self.direction_basis(ids);
        let k = basis.len();
        let vol = match k {
            0 => 1.0,
            1 => {
                // Extent along the single direction.
                let b = &basis[0];
                let proj: Vec<f64> = ids.iter().map(|&v| dot(&self.points[v], b)).collect();
                let lo = proj.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = proj.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                hi - lo
            }
            _ => {
                let pts: Vec<&[f64]> = ids.iter().map(|&v| self.points[v].as_slice()).collect();
                let apex = centroid(&pts);
                let mut total = 0.0;
                for face in self.subfaces(ids) {
                    let sub_basis = self.direction_basis(&face);
                    let mut w = sub(&apex, &self.points[face[0]]);
                    for b in &sub_basis {
                        let c = dot(&w, b);
                        w.iter_mut().zip(b).for_each(|(wi, bi)| *wi -= c * bi);
                    }
                    let height = norm(&w);
                    total += height * self.volume_rec(&face, memo);
                }
                total / k as f64
            }
        };
        memo.insert(ids.to_vec(), vol);
        vol
    }
}
