//! Integer lattice algebra: primitive vectors, Smith normal form and the
//! isotropy groups attached to the faces of a labeled polytope.
//!
//! The isotropy group of an open face with incident facets `F_1..F_q` is the
//! quotient of the lattice of integer points in the real span of the facet
//! normals by the sublattice generated by the label-weighted normals `m_j u_j`.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polytope::{Face, LabeledPolytope};

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<i64>,
}

impl IntegerMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<i64>) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{rows}x{cols} matrix with {} entries",
                entries.len()
            )));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self { rows: n, cols: n, entries: vec![0; n * n] };
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![0; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &IntegerMatrix) -> Result<IntegerMatrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntegerMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let s: i128 = (0..self.cols)
                    .map(|k| self.get(i, k) as i128 * other.get(k, j) as i128)
                    .sum();
                out.set(i, j, narrow(s));
            }
        }
        Ok(out)
    }

    /// Determinant by fraction-free Bareiss elimination.
    pub fn determinant(&self) -> Result<i64> {
        if self.rows != self.cols {
            return Err(Error::ShapeMismatch("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a: Vec<Vec<i128>> =
            (0..n).map(|i| self.row(i).iter().map(|&x| x as i128).collect()).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n {
            if a[k][k] == 0 {
                let Some(p) = ((k + 1)..n).find(|&r| a[r][k] != 0) else {
                    return Ok(0);
                };
                a.swap(k, p);
                sign = -sign;
            }
            for i in (k + 1)..n {
                for j in (k + 1)..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
            }
            prev = a[k][k];
        }
        Ok(narrow(sign * a[n - 1][n - 1]))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.entries.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.entries.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += c * row[src]
    fn add_row(&mut self, dst: usize, src: usize, c: i64) {
        for j in 0..self.cols {
            let v = self.get(dst, j) as i128 + c as i128 * self.get(src, j) as i128;
            self.set(dst, j, narrow(v));
        }
    }

    /// col[dst] += c * col[src]
    fn add_col(&mut self, dst: usize, src: usize, c: i64) {
        for i in 0..self.rows {
            let v = self.get(i, dst) as i128 + c as i128 * self.get(i, src) as i128;
            self.set(i, dst, narrow(v));
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = self.get(r, j);
            self.set(r, j, -v);
        }
    }

    fn negate_col(&mut self, c: usize) {
        for i in 0..self.rows {
            let v = self.get(i, c);
            self.set(i, c, -v);
        }
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            writeln!(f, "{:?}", self.row(i))?;
        }
        Ok(())
    }
}

fn narrow(v: i128) -> i64 {
    i64::try_from(v).expect("integer matrix entry overflowed i64")
}

/// `left · M · right = diagonal`, with both transforms unimodular.
/// The inverses of the transforms are tracked alongside.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub left: IntegerMatrix,
    pub diagonal: IntegerMatrix,
    pub right: IntegerMatrix,
    pub left_inverse: IntegerMatrix,
    pub right_inverse: IntegerMatrix,
}

impl SmithForm {
    /// Nonzero diagonal entries `d_1 | d_2 | ...`.
    pub fn invariants(&self) -> Vec<i64> {
        let k = self.diagonal.rows.min(self.diagonal.cols);
        (0..k).map(|i| self.diagonal.get(i, i)).filter(|&d| d != 0).collect()
    }
}

pub fn smith_normal_form(m: &IntegerMatrix) -> SmithForm {
    let (rows, cols) = (m.rows, m.cols);
    let mut d = m.clone();
    let mut u = IntegerMatrix::identity(rows);
    let mut u_inv = IntegerMatrix::identity(rows);
    let mut v = IntegerMatrix::identity(cols);
    let mut v_inv = IntegerMatrix::identity(cols);

    // Row op row[a] += c row[b] on D is U ← E U, U⁻¹ ← U⁻¹ E⁻¹ (col[b] -= c col[a]).
    macro_rules! row_add {
        ($a:expr, $b:expr, $c:expr) => {{
            d.add_row($a, $b, $c);
            u.add_row($a, $b, $c);
            u_inv.add_col($b, $a, -$c);
        }};
    }
    macro_rules! col_add {
        ($a:expr, $b:expr, $c:expr) => {{
            d.add_col($a, $b, $c);
            v.add_col($a, $b, $c);
            v_inv.add_row($b, $a, -$c);
        }};
    }
    macro_rules! row_swap {
        ($a:expr, $b:expr) => {{
            d.swap_rows($a, $b);
            u.swap_rows($a, $b);
            u_inv.swap_cols($a, $b);
        }};
    }
    macro_rules! col_swap {
        ($a:expr, $b:expr) => {{
            d.swap_cols($a, $b);
            v.swap_cols($a, $b);
            v_inv.swap_rows($a, $b);
        }};
    }

    let k = rows.min(cols);
    for t in 0..k {
        loop {
            // Smallest nonzero entry of the trailing block becomes the pivot.
            let mut best: Option<(usize, usize, i64)> = None;
            for i in t..rows {
                for j in t..cols {
                    let x = d.get(i, j).abs();
                    if x != 0 && best.map_or(true, |(_, _, b)| x < b) {
                        best = Some((i, j, x));
                    }
                }
            }
            let Some((pi, pj, _)) = best else {
                break;
            };
            row_swap!(t, pi);
            col_swap!(t, pj);
            let p = d.get(t, t);
            let mut clean = true;
            for i in (t + 1)..rows {
                let q = Integer::div_floor(&d.get(i, t), &p);
                if q != 0 {
                    row_add!(i, t, -q);
                }
                if d.get(i, t) != 0 {
                    clean = false;
                }
            }
            for j in (t + 1)..cols {
                let q = Integer::div_floor(&d.get(t, j), &p);
                if q != 0 {
                    col_add!(j, t, -q);
                }
                if d.get(t, j) != 0 {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // Divisibility: fold a row holding a non-multiple into the pivot row.
            let offender = ((t + 1)..rows)
                .find(|&i| ((t + 1)..cols).any(|j| d.get(i, j) % p != 0));
            match offender {
                Some(i) => row_add!(t, i, 1),
                None => break,
            }
        }
        if d.get(t, t) < 0 {
            d.negate_row(t);
            u.negate_row(t);
            u_inv.negate_col(t);
        }
    }
    SmithForm { left: u, diagonal: d, right: v, left_inverse: u_inv, right_inverse: v_inv }
}

/// Divides out the gcd of the entries.
pub fn primitive(v: &[i64]) -> Result<Vec<i64>> {
    let g = gcd_all(v);
    if g == 0 {
        return Err(Error::ZeroVector);
    }
    Ok(v.iter().map(|x| x / g).collect())
}

pub fn gcd_all(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

pub fn is_primitive(v: &[i64]) -> bool {
    gcd_all(v) == 1
}

/// Finite abelian group `Z_{d_1} ⊕ ... ⊕ Z_{d_k}` with `d_1 | ... | d_k`, all `d_i ≥ 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteAbelianGroup {
    invariant_factors: Vec<u64>,
}

impl FiniteAbelianGroup {
    pub fn trivial() -> Self {
        Self { invariant_factors: vec![] }
    }

    pub fn cyclic(m: u64) -> Self {
        Self::from_invariants(&[m as i64])
    }

    /// Builds the group from Smith invariants; entries equal to 1 are dropped.
    pub fn from_invariants(diag: &[i64]) -> Self {
        let mut factors: Vec<u64> =
            diag.iter().map(|d| d.unsigned_abs()).filter(|&d| d > 1).collect();
        factors.sort_unstable();
        Self { invariant_factors: factors }
    }

    pub fn invariant_factors(&self) -> &[u64] {
        &self.invariant_factors
    }

    pub fn order(&self) -> u64 {
        self.invariant_factors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.invariant_factors.is_empty() {
            return f.write_str("trivial");
        }
        let parts: Vec<String> = self.invariant_factors.iter().map(|d| format!("Z{d}")).collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Lattice data of an open face: the weighted generators expressed in a basis
/// of the saturated lattice, and the cokernel's Smith form.
#[derive(Clone, Debug)]
pub struct FaceLattice {
    /// Facet indices incident to the face, in increasing order.
    pub facets: Vec<usize>,
    /// Row `j` holds the coordinates of `m_j u_j` in the saturated basis.
    pub generators: IntegerMatrix,
    pub smith: SmithForm,
}

impl FaceLattice {
    pub fn group(&self) -> FiniteAbelianGroup {
        FiniteAbelianGroup::from_invariants(&self.smith.invariants())
    }

    /// Every group element, written as coordinates `x_j ∈ [0,1)` against the
    /// weighted normals `m_j u_j`. Element `x` rotates the `j`-th normal plane
    /// by `2π x_j`. The identity comes first.
    pub fn element_phases(&self) -> Vec<Vec<f64>> {
        let q = self.facets.len();
        let d = self.smith.invariants();
        // Coset representatives k·D⁻¹·A with 0 ≤ k_i < d_i.
        let a = &self.smith.left;
        let mut out = Vec::new();
        let mut k = vec![0i64; q];
        loop {
            let phases: Vec<f64> = (0..q)
                .map(|j| {
                    let mut num = 0i128;
                    let den: i128 = d.iter().map(|&x| x as i128).product();
                    for i in 0..q {
                        num += k[i] as i128 * a.get(i, j) as i128 * (den / d[i] as i128);
                    }
                    num.rem_euclid(den) as f64 / den as f64
                })
                .collect();
            out.push(phases);
            let mut pos = 0;
            loop {
                if pos == q {
                    return out;
                }
                k[pos] += 1;
                if k[pos] < d[pos] {
                    break;
                }
                k[pos] = 0;
                pos += 1;
            }
        }
    }
}

/// Builds the saturated lattice data for the facets `facets` of `p`.
pub fn face_lattice(p: &LabeledPolytope, facets: &[usize]) -> Result<FaceLattice> {
    let q = facets.len();
    if q == 0 {
        return Err(Error::DegenerateInput("regular face has no incident facets".into()));
    }
    for &f in facets {
        if f >= p.facet_count() {
            return Err(Error::IndexOutOfRange { index: f, len: p.facet_count() });
        }
    }
    let rows: Vec<Vec<i64>> = facets.iter().map(|&f| p.halfspace(f).normal.clone()).collect();
    let normals = IntegerMatrix::from_rows(&rows)?;
    let snf = smith_normal_form(&normals);
    let inv = snf.invariants();
    if inv.len() != q {
        return Err(Error::InvalidPolytope(format!(
            "normals of facets {facets:?} are linearly dependent"
        )));
    }
    // U·N·V = [D | 0] gives N = U⁻¹·D·(first q rows of V⁻¹); those rows are a
    // basis of span_R(N) ∩ Z^n, and U⁻¹·D holds the normals' coordinates.
    let mut coords = IntegerMatrix::zeros(q, q);
    for i in 0..q {
        for j in 0..q {
            let v = snf.left_inverse.get(i, j) as i128 * inv[j] as i128;
            coords.set(i, j, narrow(v));
        }
    }
    let mut generators = coords;
    for (i, &f) in facets.iter().enumerate() {
        let m = p.halfspace(f).label as i64;
        for j in 0..q {
            let v = generators.get(i, j) * m;
            generators.set(i, j, v);
        }
    }
    let smith = smith_normal_form(&generators);
    Ok(FaceLattice { facets: facets.to_vec(), generators, smith })
}

/// Isotropy group of the open face `face`; the open interior (codim 0) is
/// regular and gets the trivial group.
pub fn isotropy_group(p: &LabeledPolytope, face: &Face) -> Result<FiniteAbelianGroup> {
    if face.tight_set.is_empty() {
        return Ok(FiniteAbelianGroup::trivial());
    }
    let facets: Vec<usize> = face.tight_set.iter().copied().collect();
    Ok(face_lattice(p, &facets)?.group())
}

pub fn isotropy_order(p: &LabeledPolytope, face: &Face) -> Result<u64> {
    Ok(isotropy_group(p, face)?.order())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntegerMatrix {
        IntegerMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn check_snf(a: &IntegerMatrix) -> SmithForm {
        let s = smith_normal_form(a);
        let prod = s.left.mul(a).unwrap().mul(&s.right).unwrap();
        assert_eq!(prod, s.diagonal);
        assert_eq!(s.left.determinant().unwrap().abs(), 1);
        assert_eq!(s.right.determinant().unwrap().abs(), 1);
        assert_eq!(s.left.mul(&s.left_inverse).unwrap(), IntegerMatrix::identity(a.rows()));
        assert_eq!(s.right.mul(&s.right_inverse).unwrap(), IntegerMatrix::identity(a.cols()));
        for i in 0..s.diagonal.rows() {
            for j in 0..s.diagonal.cols() {
                if i != j {
                    assert_eq!(s.diagonal.get(i, j), 0);
                }
            }
        }
        let inv = s.invariants();
        for w in inv.windows(2) {
            assert_eq!(w[1] % w[0], 0, "divisibility chain {inv:?}");
        }
        s
    }

    #[test]
    fn primitive_vectors() {
        assert_eq!(primitive(&[2, 4]).unwrap(), vec![1, 2]);
        assert_eq!(primitive(&[-3, 0, 6]).unwrap(), vec![-1, 0, 2]);
        assert_eq!(primitive(&[1, 2]).unwrap(), vec![1, 2]);
        assert_eq!(primitive(&[0, 0]), Err(Error::ZeroVector));
    }

    #[test]
    fn smith_examples() {
        assert_eq!(check_snf(&IntegerMatrix::identity(2)).invariants(), vec![1, 1]);
        assert_eq!(check_snf(&m(&[&[2, 0], &[0, 3]])).invariants(), vec![1, 6]);
        assert_eq!(check_snf(&m(&[&[0, 1], &[1, 2]])).invariants(), vec![1, 1]);
        assert_eq!(check_snf(&m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]])).invariants(), vec![2, 6, 12]);
        assert_eq!(check_snf(&m(&[&[1, 2, 3], &[2, 4, 6]])).invariants(), vec![1]);
        assert_eq!(check_snf(&m(&[&[0, 0], &[0, 0]])).invariants(), Vec::<i64>::new());
    }

    #[test]
    fn determinant_matches_hand_values() {
        assert_eq!(m(&[&[-1, 0], &[1, 2]]).determinant().unwrap(), -2);
        assert_eq!(m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]).determinant().unwrap(), -144);
    }

    #[test]
    fn group_display_and_order() {
        let g = FiniteAbelianGroup::from_invariants(&[1, 2, 6]);
        assert_eq!(g.invariant_factors(), &[2, 6]);
        assert_eq!(g.order(), 12);
        assert_eq!(g.to_string(), "Z2 + Z6");
        assert!(FiniteAbelianGroup::from_invariants(&[1, 1]).is_trivial());
    }
}
