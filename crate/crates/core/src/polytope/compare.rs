use crate::error::Result;
use crate::geometry::{norm, sub};
use crate::rational::{dot_int, Rat};

use super::{LabeledHalfspace, LabeledPolytope};

/// `−P = {−x : x ∈ P}`; facet `i` keeps its label and gets normal `−u_i`.
pub fn negate(p: &LabeledPolytope) -> LabeledPolytope {
    let hs = p
        .halfspaces()
        .iter()
        .map(|h| LabeledHalfspace {
            normal: h.normal.iter().map(|x| -x).collect(),
            offset: h.offset.clone(),
            label: h.label,
        })
        .collect();
    LabeledPolytope { dim: p.dim(), halfspaces: hs }
}

/// `P + v`.
pub fn translate(p: &LabeledPolytope, v: &[Rat]) -> LabeledPolytope {
    let hs = p
        .halfspaces()
        .iter()
        .map(|h| LabeledHalfspace {
            normal: h.normal.clone(),
            offset: &h.offset + dot_int(&h.normal, v),
            label: h.label,
        })
        .collect();
    LabeledPolytope { dim: p.dim(), halfspaces: hs }
}

/// Vertices shifted so that their centroid sits at the origin.
pub fn centered_vertices(p: &LabeledPolytope) -> Result<Vec<Vec<f64>>> {
    let v = p.geometry()?.vertices_f64();
    let k = v.len() as f64;
    let c: Vec<f64> = (0..p.dim()).map(|j| v.iter().map(|x| x[j]).sum::<f64>() / k).collect();
    Ok(v.into_iter().map(|x| sub(&x, &c)).collect())
}

/// Symmetric Hausdorff distance between two finite point sets.
pub fn hausdorff_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let one_way = |x: &[Vec<f64>], y: &[Vec<f64>]| {
        x.iter()
            .map(|p| y.iter().map(|q| norm(&sub(p, q))).fold(f64::INFINITY, f64::min))
            .fold(0.0f64, f64::max)
    };
    if a.is_empty() || b.is_empty() {
        return if a.is_empty() && b.is_empty() { 0.0 } else { f64::INFINITY };
    }
    one_way(a, b).max(one_way(b, a))
}

/// Vertex sets agree after centering, within `tol`, and facets with the same
/// normal carry the same label.
pub fn equal_up_to_translation(p: &LabeledPolytope, q: &LabeledPolytope, tol: f64) -> bool {
    if p.dim() != q.dim() || p.facet_count() != q.facet_count() {
        return false;
    }
    let (Ok(a), Ok(b)) = (centered_vertices(p), centered_vertices(q)) else {
        return false;
    };
    if a.len() != b.len() || hausdorff_distance(&a, &b) > tol {
        return false;
    }
    p.halfspaces().iter().all(|h| {
        q.halfspaces()
            .iter()
            .find(|g| g.normal == h.normal)
            .is_some_and(|g| g.label == h.label)
    })
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::facet_fingerprint;
    use super::*;
    use crate::rational::{rat_frac, rat_int};

    #[test]
    fn translation_is_invisible() {
        let t = triangle();
        let moved = translate(&t, &[rat_int(3), rat_int(-7)]);
        assert!(equal_up_to_translation(&t, &moved, 1e-12));
        let a = facet_fingerprint(&t).unwrap();
        let b = facet_fingerprint(&moved).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.unit_normal, y.unit_normal);
            assert!((x.volume - y.volume).abs() < 1e-12);
        }
    }

    #[test]
    fn negation() {
        let t = triangle();
        let neg = negate(&t);
        let mut v = neg.vertices().unwrap();
        v.sort();
        let mut expect = vec![
            vec![rat_int(0), rat_int(0)],
            vec![rat_int(0), rat_int(-1)],
            vec![rat_int(-2), rat_int(0)],
        ];
        expect.sort();
        assert_eq!(v, expect);
        assert!(!equal_up_to_translation(&t, &neg, 1e-9));
        let sym = translate(&LabeledPolytope::cube(2, rat_int(2)).unwrap(), &[rat_int(-1), rat_int(-1)]);
        assert!(equal_up_to_translation(&negate(&sym), &sym, 1e-12));
        let fp = facet_fingerprint(&t).unwrap();
        let fn_ = facet_fingerprint(&neg).unwrap();
        for (x, y) in fp.iter().zip(&fn_) {
            assert_eq!(x.unit_normal.iter().map(|v| -v).collect::<Vec<_>>(), y.unit_normal);
            assert!((x.volume - y.volume).abs() < 1e-12);
            assert_eq!(x.label, y.label);
        }
    }

    #[test]
    fn labels_matter() {
        let t = triangle();
        let mut hs = t.halfspaces().to_vec();
        hs[2].label = 3;
        let relabeled = LabeledPolytope::new(2, hs).unwrap();
        assert!(!equal_up_to_translation(&t, &relabeled, 1e-9));
        let scaled = translate(&t, &[rat_frac(1, 3), rat_int(0)]);
        assert!(equal_up_to_translation(&t, &scaled, 1e-12));
    }

    #[test]
    fn hausdorff_basics() {
        let a = vec![vec![0.0, 0.0], vec![1.0, 0.0]];
        let b = vec![vec![0.0, 0.5], vec![1.0, 0.0]];
        assert!((hausdorff_distance(&a, &b) - 0.5).abs() < 1e-15);
        assert_eq!(hausdorff_distance(&a, &a), 0.0);
    }
}
