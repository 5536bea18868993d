//! Labeled rational simple polytopes.
//!
//! Halfspaces are stored with outward primitive integer normals as
//! `x · u ≤ c`. The inward presentation `x · u ≥ c` common in the toric
//! literature converts by negating both `u` and `c`
//! (see [`LabeledPolytope::from_inward`]).

mod compare;
mod faces;
mod generic;
pub mod random;

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{combinations, Incidence};
use crate::lattice::{is_primitive, IntegerMatrix};
use crate::rational::{
    dot_int, format_rational, parse_rational, rank, rat_int, solve_square, to_f64, Rat,
};

pub use compare::{centered_vertices, equal_up_to_translation, hausdorff_distance, negate, translate};
pub use faces::{face_volume, faces, facet_fingerprint, validate_rational_simple, Clause, ValidationReport, Violation};
pub use generic::{has_parallel_facets, parallel_pair, has_subpolytopes, perturb_generic, MAX_EXHAUSTIVE_FACETS};

/// Upper bound on the ambient dimension handled by the exhaustive routines.
pub const MAX_DIM: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledHalfspace {
    /// Outward primitive normal.
    pub normal: Vec<i64>,
    pub offset: Rat,
    pub label: u32,
}

impl LabeledHalfspace {
    pub fn new(normal: Vec<i64>, offset: Rat, label: u32) -> Result<Self> {
        if normal.iter().all(|&x| x == 0) {
            return Err(Error::ZeroVector);
        }
        if !is_primitive(&normal) {
            return Err(Error::NonPrimitiveNormal(normal));
        }
        if label == 0 {
            return Err(Error::InvalidPolytope("facet labels must be positive".into()));
        }
        Ok(Self { normal, offset, label })
    }

    pub fn unit_normal(&self) -> Vec<f64> {
        let n = self.norm();
        self.normal.iter().map(|&x| x as f64 / n).collect()
    }

    pub fn norm(&self) -> f64 {
        self.normal.iter().map(|&x| (x as f64).powi(2)).sum::<f64>().sqrt()
    }

    /// Slack `c − x·u`; zero on the hyperplane, positive inside.
    pub fn slack(&self, x: &[Rat]) -> Rat {
        &self.offset - dot_int(&self.normal, x)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledPolytope {
    dim: usize,
    halfspaces: Vec<LabeledHalfspace>,
}

/// Unit facet normal, facet volume and label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FacetDatum {
    pub unit_normal: Vec<f64>,
    pub volume: f64,
    pub label: u32,
}

/// A face, identified by the facets containing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub tight_set: BTreeSet<usize>,
    pub codim: usize,
    /// Indices into [`PolytopeGeometry::vertices`].
    pub vertex_ids: Vec<usize>,
    pub vertices: Vec<Vec<Rat>>,
}

impl Face {
    pub fn dim(&self, ambient: usize) -> usize {
        ambient - self.codim
    }
}

/// Exact vertices of a polytope and the facets each vertex lies on.
#[derive(Clone, Debug)]
pub struct PolytopeGeometry {
    pub vertices: Vec<Vec<Rat>>,
    pub tight: Vec<BTreeSet<usize>>,
}

impl PolytopeGeometry {
    pub fn incidence(&self, dim: usize) -> Incidence {
        let points = self
            .vertices
            .iter()
            .map(|v| v.iter().map(to_f64).collect())
            .collect();
        Incidence::new(dim, points, self.tight.clone())
    }

    pub fn vertices_f64(&self) -> Vec<Vec<f64>> {
        self.vertices.iter().map(|v| v.iter().map(to_f64).collect()).collect()
    }
}

impl LabeledPolytope {
    /// Checks the per-halfspace invariants; geometric validity (bounded,
    /// full-dimensional, no unused halfspace) is checked by [`Self::geometry`].
    pub fn new(dim: usize, halfspaces: Vec<LabeledHalfspace>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidPolytope("ambient dimension must be positive".into()));
        }
        if let Some(h) = halfspaces.iter().find(|h| h.normal.len() != dim) {
            return Err(Error::ShapeMismatch(format!(
                "normal {:?} in ambient dimension {dim}",
                h.normal
            )));
        }
        if halfspaces.len() < dim + 1 {
            return Err(Error::InvalidPolytope(format!(
                "{} halfspaces cannot bound a polytope in dimension {dim}",
                halfspaces.len()
            )));
        }
        Ok(Self { dim, halfspaces })
    }

    /// Builds from outward `(normal, offset, label)` triples, `x·u ≤ c`.
    pub fn from_outward(dim: usize, facets: &[(Vec<i64>, Rat, u32)]) -> Result<Self> {
        let hs = facets
            .iter()
            .map(|(u, c, m)| LabeledHalfspace::new(u.clone(), c.clone(), *m))
            .collect::<Result<Vec<_>>>()?;
        Self::new(dim, hs)
    }

    /// Builds from inward `(normal, offset, label)` triples, `x·u ≥ c`.
    pub fn from_inward(dim: usize, facets: &[(Vec<i64>, Rat, u32)]) -> Result<Self> {
        let outward: Vec<_> = facets
            .iter()
            .map(|(u, c, m)| (u.iter().map(|x| -x).collect(), -c.clone(), *m))
            .collect();
        Self::from_outward(dim, &outward)
    }

    /// Convex polygon through `vertices` (counter-clockwise, integer or
    /// rational coordinates). Edge `i` joins vertex `i` to `i+1` and gets `labels[i]`.
    pub fn from_polygon(vertices: &[[Rat; 2]], labels: &[u32]) -> Result<Self> {
        let k = vertices.len();
        if k < 3 || labels.len() != k {
            return Err(Error::InvalidPolytope("polygon needs ≥ 3 vertices and one label per edge".into()));
        }
        let mut hs = Vec::with_capacity(k);
        for i in 0..k {
            let a = &vertices[i];
            let b = &vertices[(i + 1) % k];
            let ex = &b[0] - &a[0];
            let ey = &b[1] - &a[1];
            // Outward normal of a counter-clockwise edge is (ey, -ex), scaled to integers.
            let den = num_integer::Integer::lcm(ex.denom(), ey.denom());
            let nx = (&ey * Rat::from_integer(den.clone())).to_integer();
            let ny = (-&ex * Rat::from_integer(den)).to_integer();
            let g = num_integer::Integer::gcd(&nx, &ny);
            if g.is_zero() {
                return Err(Error::InvalidPolytope("repeated polygon vertex".into()));
            }
            let to_i64 = |v: num_bigint::BigInt| -> Result<i64> {
                i64::try_from(v).map_err(|_| Error::InvalidPolytope("normal entry overflow".into()))
            };
            let normal = vec![to_i64(&nx / &g)?, to_i64(&ny / &g)?];
            let offset = dot_int(&normal, a);
            hs.push(LabeledHalfspace::new(normal, offset, labels[i])?);
        }
        Self::new(2, hs)
    }

    /// Axis-aligned box `[0, side]^dim` with all labels 1. Facet `2k` is
    /// `x_k ≥ 0`, facet `2k+1` is `x_k ≤ side`.
    pub fn cube(dim: usize, side: Rat) -> Result<Self> {
        let mut facets = Vec::with_capacity(2 * dim);
        for k in 0..dim {
            let mut e = vec![0i64; dim];
            e[k] = -1;
            facets.push((e.clone(), Rat::zero(), 1));
            e[k] = 1;
            facets.push((e, side.clone(), 1));
        }
        Self::from_outward(dim, &facets)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn facet_count(&self) -> usize {
        self.halfspaces.len()
    }

    pub fn halfspaces(&self) -> &[LabeledHalfspace] {
        &self.halfspaces
    }

    pub fn halfspace(&self, i: usize) -> &LabeledHalfspace {
        &self.halfspaces[i]
    }

    pub fn labels(&self) -> Vec<u32> {
        self.halfspaces.iter().map(|h| h.label).collect()
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.halfspaces.iter().all(|h| !h.slack(x).is_negative())
    }

    /// Same polytope with facets listed in the order given by `perm`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let hs = perm
            .iter()
            .map(|&i| {
                self.halfspaces
                    .get(i)
                    .cloned()
                    .ok_or(Error::IndexOutOfRange { index: i, len: self.halfspaces.len() })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.dim, hs)
    }

    /// Exact vertex enumeration over all `n`-subsets of facets, with the
    /// boundedness, full-dimensionality and tightness checks.
    pub fn geometry(&self) -> Result<PolytopeGeometry> {
        let n = self.dim;
        let mut found: BTreeMap<Vec<Rat>, BTreeSet<usize>> = BTreeMap::new();
        let rows: Vec<Vec<Rat>> = self
            .halfspaces
            .iter()
            .map(|h| h.normal.iter().map(|&x| rat_int(x)).collect())
            .collect();
        for subset in combinations(self.halfspaces.len(), n) {
            let a: Vec<Vec<Rat>> = subset.iter().map(|&i| rows[i].clone()).collect();
            let b: Vec<Rat> = subset.iter().map(|&i| self.halfspaces[i].offset.clone()).collect();
            let Some(x) = solve_square(&a, &b) else {
                continue;
            };
            if found.contains_key(&x) || !self.contains(&x) {
                continue;
            }
            let tight: BTreeSet<usize> = self
                .halfspaces
                .iter()
                .enumerate()
                .filter(|(_, h)| h.slack(&x).is_zero())
                .map(|(i, _)| i)
                .collect();
            found.insert(x, tight);
        }
        if found.is_empty() {
            return Err(Error::InvalidPolytope("no vertices: empty, unbounded or not pointed".into()));
        }
        let (vertices, tight): (Vec<_>, Vec<_>) = found.into_iter().unzip();
        let geom = PolytopeGeometry { vertices, tight };
        self.check_bounded(&geom)?;
        let diffs: Vec<Vec<Rat>> = geom.vertices[1..]
            .iter()
            .map(|v| v.iter().zip(&geom.vertices[0]).map(|(a, b)| a - b).collect())
            .collect();
        if rank(&diffs) < n {
            return Err(Error::InvalidPolytope("empty interior".into()));
        }
        for i in 0..self.halfspaces.len() {
            if !geom.tight.iter().any(|t| t.contains(&i)) {
                return Err(Error::InvalidPolytope(format!("halfspace {i} is redundant")));
            }
        }
        Ok(geom)
    }

    /// An unbounded pointed polyhedron has an unbounded edge leaving some vertex.
    fn check_bounded(&self, geom: &PolytopeGeometry) -> Result<()> {
        let n = self.dim;
        if n == 1 {
            let has_left = self.halfspaces.iter().any(|h| h.normal[0] < 0);
            let has_right = self.halfspaces.iter().any(|h| h.normal[0] > 0);
            return if has_left && has_right {
                Ok(())
            } else {
                Err(Error::InvalidPolytope("unbounded".into()))
            };
        }
        for tight in &geom.tight {
            let ids: Vec<usize> = tight.iter().copied().collect();
            for sub in combinations(ids.len(), n - 1) {
                let rows: Vec<Vec<i64>> = sub.iter().map(|&k| self.halfspaces[ids[k]].normal.clone()).collect();
                let dir = kernel_vector(&rows)?;
                if dir.iter().all(|&x| x == 0) {
                    continue;
                }
                for sign in [1i64, -1] {
                    let y: Vec<i64> = dir.iter().map(|x| sign * x).collect();
                    let dot = |u: &[i64]| -> i128 { u.iter().zip(&y).map(|(a, b)| *a as i128 * *b as i128).sum() };
                    let feasible = ids.iter().all(|&j| dot(&self.halfspaces[j].normal) <= 0);
                    if feasible && self.halfspaces.iter().all(|h| dot(&h.normal) <= 0) {
                        return Err(Error::InvalidPolytope("unbounded".into()));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn vertices(&self) -> Result<Vec<Vec<Rat>>> {
        Ok(self.geometry()?.vertices)
    }

    /// Vertex centroid in floating point.
    pub fn vertex_centroid(&self) -> Result<Vec<f64>> {
        let g = self.geometry()?;
        let v = g.vertices_f64();
        let k = v.len() as f64;
        Ok((0..self.dim).map(|j| v.iter().map(|p| p[j]).sum::<f64>() / k).collect())
    }

    pub fn to_file(&self) -> PolytopeFile {
        PolytopeFile {
            dim: self.dim,
            facets: self
                .halfspaces
                .iter()
                .map(|h| FacetEntry {
                    normal: h.normal.clone(),
                    offset: format_rational(&h.offset),
                    label: h.label,
                })
                .collect(),
        }
    }

    pub fn from_file(file: &PolytopeFile) -> Result<Self> {
        let hs = file
            .facets
            .iter()
            .map(|f| LabeledHalfspace::new(f.normal.clone(), parse_rational(&f.offset)?, f.label))
            .collect::<Result<Vec<_>>>()?;
        Self::new(file.dim, hs)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("polytope serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: PolytopeFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_file(&file)
    }
}

/// Integer vector spanning the kernel of an `(n−1)×n` integer matrix, by
/// signed maximal minors; zero when the rows are dependent.
fn kernel_vector(rows: &[Vec<i64>]) -> Result<Vec<i64>> {
    let n = rows.len() + 1;
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let minor: Vec<Vec<i64>> = rows
            .iter()
            .map(|r| r.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, &x)| x).collect())
            .collect();
        let det = IntegerMatrix::from_rows(&minor)?.determinant()?;
        out.push(if k % 2 == 0 { det } else { -det });
    }
    Ok(out)
}

/// On-disk polytope format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolytopeFile {
    pub dim: usize,
    pub facets: Vec<FacetEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FacetEntry {
    pub normal: Vec<i64>,
    pub offset: String,
    pub label: u32,
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::rational::rat_frac;

    fn sorted_vertices(p: &LabeledPolytope) -> Vec<Vec<Rat>> {
        let mut v = p.vertices().unwrap();
        v.sort();
        v
    }

    #[test]
    fn triangle_vertices() {
        let v = sorted_vertices(&triangle());
        let expect = vec![
            vec![rat_int(0), rat_int(0)],
            vec![rat_int(0), rat_int(1)],
            vec![rat_int(2), rat_int(0)],
        ];
        assert_eq!(v, expect);
    }

    #[test]
    fn square_has_four_vertices() {
        assert_eq!(square().vertices().unwrap().len(), 4);
    }

    #[test]
    fn inward_presentation_converts() {
        let p = LabeledPolytope::from_inward(
            2,
            &[
                (vec![1, 0], rat_int(0), 1),
                (vec![0, 1], rat_int(0), 1),
                (vec![-1, -2], rat_int(-2), 1),
            ],
        )
        .unwrap();
        assert_eq!(sorted_vertices(&p), sorted_vertices(&triangle()));
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            LabeledHalfspace::new(vec![2, 4], rat_int(1), 1),
            Err(Error::NonPrimitiveNormal(vec![2, 4]))
        );
        assert!(LabeledHalfspace::new(vec![1, 0], rat_int(1), 0).is_err());
        // Half-plane strip: unbounded.
        let strip = LabeledPolytope::from_outward(
            2,
            &[
                (vec![0, -1], rat_int(0), 1),
                (vec![0, 1], rat_int(1), 1),
                (vec![-1, 0], rat_int(0), 1),
            ],
        )
        .unwrap();
        assert!(matches!(strip.geometry(), Err(Error::InvalidPolytope(_))));
        // Empty: x ≤ -1 and x ≥ 0.
        let empty = LabeledPolytope::from_outward(
            2,
            &[
                (vec![1, 0], rat_int(-1), 1),
                (vec![-1, 0], rat_int(0), 1),
                (vec![0, 1], rat_int(1), 1),
                (vec![0, -1], rat_int(0), 1),
            ],
        )
        .unwrap();
        assert!(empty.geometry().is_err());
        // Redundant halfspace x ≤ 5 on the unit square.
        let mut hs = square().halfspaces().to_vec();
        hs.push(LabeledHalfspace::new(vec![1, 0], rat_int(5), 1).unwrap());
        let redundant = LabeledPolytope::new(2, hs).unwrap();
        assert!(redundant.geometry().is_err());
    }

    #[test]
    fn degenerate_interior_rejected() {
        // x ≤ 0, x ≥ 0, 0 ≤ y ≤ 1: a segment.
        let flat = LabeledPolytope::from_outward(
            2,
            &[
                (vec![1, 0], rat_int(0), 1),
                (vec![-1, 0], rat_int(0), 1),
                (vec![0, 1], rat_int(1), 1),
                (vec![0, -1], rat_int(0), 1),
            ],
        )
        .unwrap();
        assert!(flat.geometry().is_err());
    }

    #[test]
    fn polygon_builder_matches_halfspaces() {
        let p = LabeledPolytope::from_polygon(&[pt(0, 0), pt(2, 0), pt(0, 1)], &[1, 1, 1]).unwrap();
        assert_eq!(sorted_vertices(&p), sorted_vertices(&triangle()));
        assert_eq!(p.halfspace(1).normal, vec![1, 2]);
        assert_eq!(p.halfspace(1).offset, rat_int(2));
        let q = LabeledPolytope::from_polygon(&[[rat_int(0), rat_int(0)], [half(), rat_int(0)], [rat_int(0), half()]], &[1, 2, 3]).unwrap();
        assert_eq!(q.halfspace(1).normal, vec![1, 1]);
        assert_eq!(q.halfspace(1).offset, rat_frac(1, 2));
    }

    #[test]
    fn json_round_trip_and_validation() {
        let t = triangle();
        let back = LabeledPolytope::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
        let bad = r#"{"dim":2,"facets":[{"normal":[2,0],"offset":"1","label":1},{"normal":[0,1],"offset":"1","label":1},{"normal":[-1,-1],"offset":"0","label":1}]}"#;
        assert_eq!(LabeledPolytope::from_json(bad), Err(Error::NonPrimitiveNormal(vec![2, 0])));
        let frac = r#"{"dim":1,"facets":[{"normal":[1],"offset":"3/2","label":2},{"normal":[-1],"offset":"1","label":3}]}"#;
        let seg = LabeledPolytope::from_json(frac).unwrap();
        assert_eq!(seg.halfspace(0).offset, rat_frac(3, 2));
        assert_eq!(seg.vertices().unwrap().len(), 2);
    }

    #[test]
    fn random_simplex_matches_bruteforce() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        while checked < 20 {
            let n = rng.gen_range(2..=3);
            let facets: Vec<_> = (0..=n)
                .map(|_| {
                    let u: Vec<i64> = (0..n).map(|_| rng.gen_range(-4..=4)).collect();
                    (u, rat_int(rng.gen_range(1..=5)))
                })
                .collect();
            let Ok(normals) = facets.iter().map(|(u, _)| crate::lattice::primitive(u)).collect::<Result<Vec<_>>>() else {
                continue;
            };
            let spec: Vec<_> = normals.into_iter().zip(facets.iter()).map(|(u, (_, c))| (u, c.clone(), 1)).collect();
            let p = LabeledPolytope::from_outward(n, &spec).unwrap();
            let Ok(g) = p.geometry() else { continue };
            // Brute force: every n-subset with a unique feasible solution.
            let mut brute = BTreeSet::new();
            for s in combinations(n + 1, n) {
                let a: Vec<Vec<Rat>> = s.iter().map(|&i| p.halfspace(i).normal.iter().map(|&x| rat_int(x)).collect()).collect();
                let b: Vec<Rat> = s.iter().map(|&i| p.halfspace(i).offset.clone()).collect();
                if let Some(x) = solve_square(&a, &b) {
                    if p.contains(&x) {
                        brute.insert(x);
                    }
                }
            }
            assert_eq!(g.vertices.len(), n + 1);
            assert_eq!(g.vertices.iter().cloned().collect::<BTreeSet<_>>(), brute);
            checked += 1;
        }
    }
}
