use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::combinations;
use crate::lattice::is_primitive;
use crate::rational::{int_row, rank};

use super::{Face, FacetDatum, LabeledPolytope, PolytopeGeometry};

/// All faces of codimension `codim`, ordered by their tight sets.
pub fn faces(p: &LabeledPolytope, codim: usize) -> Result<Vec<Face>> {
    let geom = p.geometry()?;
    faces_of(p, &geom, codim)
}

pub(crate) fn faces_of(p: &LabeledPolytope, geom: &PolytopeGeometry, codim: usize) -> Result<Vec<Face>> {
    let n = p.dim();
    if codim > n {
        return Err(Error::InvalidPolytope(format!("codimension {codim} exceeds dimension {n}")));
    }
    if codim == 0 {
        let ids: Vec<usize> = (0..geom.vertices.len()).collect();
        return Ok(vec![Face {
            tight_set: BTreeSet::new(),
            codim: 0,
            vertices: geom.vertices.clone(),
            vertex_ids: ids,
        }]);
    }
    let inc = geom.incidence(n);
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut out = Vec::new();
    for tight in &geom.tight {
        let ids: Vec<usize> = tight.iter().copied().collect();
        for sub in combinations(ids.len(), codim) {
            let s: BTreeSet<usize> = sub.iter().map(|&k| ids[k]).collect();
            let normals: Vec<_> = s.iter().map(|&i| int_row(&p.halfspace(i).normal)).collect();
            if rank(&normals) != codim {
                continue;
            }
            let vertex_ids = inc.vertices_on(&s);
            if seen.contains(&vertex_ids) || inc.affine_dim(&vertex_ids) != n - codim {
                continue;
            }
            seen.insert(vertex_ids.clone());
            out.push(Face {
                tight_set: inc.common_facets(&vertex_ids),
                codim,
                vertices: vertex_ids.iter().map(|&v| geom.vertices[v].clone()).collect(),
                vertex_ids,
            });
        }
    }
    out.sort_by(|a, b| a.tight_set.cmp(&b.tight_set));
    Ok(out)
}

/// Euclidean `(n − codim)`-volume of a face; vertices count 1.
pub fn face_volume(p: &LabeledPolytope, face: &Face) -> Result<f64> {
    let geom = p.geometry()?;
    Ok(geom.incidence(p.dim()).face_volume(&face.vertex_ids))
}

/// `(unit outward normal, facet volume, label)` for every facet.
pub fn facet_fingerprint(p: &LabeledPolytope) -> Result<Vec<FacetDatum>> {
    let geom = p.geometry()?;
    let inc = geom.incidence(p.dim());
    p.halfspaces()
        .iter()
        .enumerate()
        .map(|(i, h)| {
            let ids = inc.vertices_on(&BTreeSet::from([i]));
            let volume = if p.dim() == 1 { 1.0 } else { inc.face_volume(&ids) };
            if inc.affine_dim(&ids) + 1 != p.dim() || volume <= 0.0 {
                return Err(Error::InvalidPolytope(format!("facet {i} is degenerate")));
            }
            Ok(FacetDatum { unit_normal: h.unit_normal(), volume, label: h.label })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Clause {
    /// The halfspaces do not describe a bounded full-dimensional polytope.
    Geometry,
    /// Exactly `n` facets meet at each vertex.
    FacetsPerVertex,
    /// Every normal is a primitive integer vector.
    PrimitiveNormals,
    /// The normals at each vertex form a basis of `Q^n`.
    RationalBasis,
}

impl Clause {
    pub fn number(self) -> u8 {
        match self {
            Clause::Geometry => 0,
            Clause::FacetsPerVertex => 1,
            Clause::PrimitiveNormals => 2,
            Clause::RationalBasis => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub clause: Clause,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first_clause(&self) -> Option<Clause> {
        self.violations.first().map(|v| v.clause)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return write!(f, "rational simple: pass");
        }
        write!(f, "rational simple: fail")?;
        for v in &self.violations {
            write!(f, "\n  clause ({}): {}", v.clause.number(), v.detail)?;
        }
        Ok(())
    }
}

pub fn validate_rational_simple(p: &LabeledPolytope) -> ValidationReport {
    let mut violations = Vec::new();
    for (i, h) in p.halfspaces().iter().enumerate() {
        if !is_primitive(&h.normal) {
            violations.push(Violation {
                clause: Clause::PrimitiveNormals,
                detail: format!("facet {i} normal {:?} is not primitive", h.normal),
            });
        }
    }
    let geom = match p.geometry() {
        Ok(g) => g,
        Err(e) => {
            violations.insert(0, Violation { clause: Clause::Geometry, detail: e.to_string() });
            return ValidationReport { violations };
        }
    };
    let n = p.dim();
    for (v, tight) in geom.tight.iter().enumerate() {
        if tight.len() != n {
            violations.push(Violation {
                clause: Clause::FacetsPerVertex,
                detail: format!("vertex {v} lies on {} facets {:?}", tight.len(), tight),
            });
            continue;
        }
        let normals: Vec<_> = tight.iter().map(|&i| int_row(&p.halfspace(i).normal)).collect();
        if rank(&normals) != n {
            violations.push(Violation {
                clause: Clause::RationalBasis,
                detail: format!("normals at vertex {v} are dependent"),
            });
        }
    }
    violations.sort_by_key(|v| v.clause.number());
    ValidationReport { violations }
}
