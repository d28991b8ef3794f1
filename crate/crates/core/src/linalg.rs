//! Dense matrices over GF(p^k) and subspaces of `M_n` in reduced row-echelon form.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::field::{FieldElem, FieldRef};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("spanners live over different fields or sizes")]
    MixedFields,
    #[error("matrix is singular")]
    Singular,
    #[error("vector is not in the span of the given direct sum")]
    NotInSpan,
    #[error("given subspaces are not independent")]
    NotIndependent,
}

fn same_field(a: &FieldRef, b: &FieldRef) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// An `n x n` matrix, stored row-major.
#[derive(Clone)]
pub struct Mat {
    n: usize,
    field: FieldRef,
    data: Vec<FieldElem>,
}

impl PartialEq for Mat {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.data == other.data && same_field(&self.field, &other.field)
    }
}

impl Eq for Mat {}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.n)
            .map(|i| (0..self.n).map(|j| self.field.display(self.get(i, j))).collect())
            .collect();
        write!(f, "{rows:?}")
    }
}

impl Mat {
    pub fn zero(field: &FieldRef, n: usize) -> Mat {
        Mat { n, field: field.clone(), data: vec![FieldElem::ZERO; n * n] }
    }

    pub fn identity(field: &FieldRef, n: usize) -> Mat {
        let mut m = Mat::zero(field, n);
        for i in 0..n {
            m.data[i * n + i] = FieldElem::ONE;
        }
        m
    }

    /// Matrix unit `E_ij` (0-based).
    pub fn unit(field: &FieldRef, n: usize, i: usize, j: usize) -> Mat {
        let mut m = Mat::zero(field, n);
        m.data[i * n + j] = FieldElem::ONE;
        m
    }

    pub fn from_vec(field: &FieldRef, n: usize, data: Vec<FieldElem>) -> Mat {
        assert_eq!(data.len(), n * n, "expected {} entries", n * n);
        Mat { n, field: field.clone(), data }
    }

    /// From integer rows, reduced into the prime field.
    pub fn from_ints(field: &FieldRef, rows: &[&[i64]]) -> Mat {
        let n = rows.len();
        let data = rows
            .iter()
            .flat_map(|r| {
                assert_eq!(r.len(), n);
                r.iter().map(|&v| field.from_int(v))
            })
            .collect();
        Mat { n, field: field.clone(), data }
    }

    pub fn diag(field: &FieldRef, entries: &[FieldElem]) -> Mat {
        let n = entries.len();
        let mut m = Mat::zero(field, n);
        for (i, &e) in entries.iter().enumerate() {
            m.data[i * n + i] = e;
        }
        m
    }

    pub fn random<R: Rng + ?Sized>(field: &FieldRef, n: usize, rng: &mut R) -> Mat {
        let q = field.order();
        let data = (0..n * n).map(|_| field.elem(rng.gen_range(0..q))).collect();
        Mat { n, field: field.clone(), data }
    }

    /// A uniformly random invertible matrix (rejection sampling).
    pub fn random_invertible<R: Rng + ?Sized>(field: &FieldRef, n: usize, rng: &mut R) -> (Mat, Mat) {
        loop {
            let m = Mat::random(field, n, rng);
            if let Some(inv) = m.inverse() {
                return (m, inv);
            }
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn get(&self, i: usize, j: usize) -> FieldElem {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElem) {
        self.data[i * self.n + j] = v;
    }

    /// Row-major flattening; this is the coordinate vector used by [`Subspace`].
    pub fn as_slice(&self) -> &[FieldElem] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn add(&self, other: &Mat) -> Mat {
        let f = &self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect();
        Mat { n: self.n, field: f.clone(), data }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        let f = &self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.sub(a, b)).collect();
        Mat { n: self.n, field: f.clone(), data }
    }

    pub fn scale(&self, c: FieldElem) -> Mat {
        let f = &self.field;
        let data = self.data.iter().map(|&a| f.mul(a, c)).collect();
        Mat { n: self.n, field: f.clone(), data }
    }

    pub fn neg(&self) -> Mat {
        let f = &self.field;
        Mat { n: self.n, field: f.clone(), data: self.data.iter().map(|&a| f.neg(a)).collect() }
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        let n = self.n;
        let f = &self.field;
        let mut data = vec![FieldElem::ZERO; n * n];
        for i in 0..n {
            for l in 0..n {
                let a = self.data[i * n + l];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.data[l * n + j];
                    if !b.is_zero() {
                        let slot = &mut data[i * n + j];
                        *slot = f.add(*slot, f.mul(a, b));
                    }
                }
            }
        }
        Mat { n, field: f.clone(), data }
    }

    /// `[x, y] = xy - yx`.
    pub fn bracket(&self, other: &Mat) -> Mat {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn transpose(&self) -> Mat {
        let n = self.n;
        let data = (0..n * n).map(|k| self.data[(k % n) * n + k / n]).collect();
        Mat { n, field: self.field.clone(), data }
    }

    pub fn trace(&self) -> FieldElem {
        (0..self.n).fold(FieldElem::ZERO, |acc, i| self.field.add(acc, self.get(i, i)))
    }

    /// Kronecker product; `E_ij (x) E_kl = E_{(i l2 + k), (j l2 + l)}`.
    pub fn kron(&self, other: &Mat) -> Mat {
        let (a, b) = (self.n, other.n);
        let n = a * b;
        let f = &self.field;
        let mut data = vec![FieldElem::ZERO; n * n];
        for i in 0..a {
            for j in 0..a {
                let x = self.get(i, j);
                if x.is_zero() {
                    continue;
                }
                for k in 0..b {
                    for l in 0..b {
                        data[(i * b + k) * n + (j * b + l)] = f.mul(x, other.get(k, l));
                    }
                }
            }
        }
        Mat { n, field: f.clone(), data }
    }

    pub fn inverse(&self) -> Option<Mat> {
        let n = self.n;
        let f = &self.field;
        let mut a: Vec<Vec<FieldElem>> = (0..n)
            .map(|i| {
                let mut row = self.data[i * n..(i + 1) * n].to_vec();
                row.extend((0..n).map(|j| if i == j { FieldElem::ONE } else { FieldElem::ZERO }));
                row
            })
            .collect();
        for c in 0..n {
            let r = (c..n).find(|&r| !a[r][c].is_zero())?;
            a.swap(c, r);
            let inv = f.inv(a[c][c]).unwrap();
            for v in a[c].iter_mut() {
                *v = f.mul(*v, inv);
            }
            for r in 0..n {
                if r != c && !a[r][c].is_zero() {
                    let factor = a[r][c];
                    for j in 0..2 * n {
                        let t = f.mul(factor, a[c][j]);
                        a[r][j] = f.sub(a[r][j], t);
                    }
                }
            }
        }
        let data = a.into_iter().flat_map(|row| row[n..].to_vec()).collect();
        Some(Mat { n, field: f.clone(), data })
    }

    /// `u x u^{-1}`.
    pub fn conj(&self, u: &Mat, u_inv: &Mat) -> Mat {
        u.mul(self).mul(u_inv)
    }
}

/// In-place reduced row echelon form; returns pivot columns.
pub fn rref(field: &FieldRef, rows: &mut Vec<Vec<FieldElem>>) -> Vec<usize> {
    let width = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..width {
        if r == rows.len() {
            break;
        }
        let Some(pr) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, pr);
        let inv = field.inv(rows[r][c]).unwrap();
        if inv != FieldElem::ONE {
            for v in rows[r][c..].iter_mut() {
                *v = field.mul(*v, inv);
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let factor = row[c];
                for (v, &pv) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                    if !pv.is_zero() {
                        *v = field.sub(*v, field.mul(factor, pv));
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

/// Basis of the null space `{x : A x = 0}` for `A` given by rows of length `width`.
pub fn null_space(field: &FieldRef, rows: &[Vec<FieldElem>], width: usize) -> Vec<Vec<FieldElem>> {
    let mut a = rows.to_vec();
    let pivots = if a.is_empty() { Vec::new() } else { rref(field, &mut a) };
    let free: Vec<usize> = (0..width).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![FieldElem::ZERO; width];
            v[fc] = FieldElem::ONE;
            for (row, &pc) in a.iter().zip(&pivots) {
                v[pc] = field.neg(row[fc]);
            }
            v
        })
        .collect()
}

/// Solve `A x = b`; `None` if inconsistent. Any solution is returned.
pub fn solve(field: &FieldRef, a: &[Vec<FieldElem>], b: &[FieldElem], width: usize) -> Option<Vec<FieldElem>> {
    let mut aug: Vec<Vec<FieldElem>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    if aug.is_empty() {
        return Some(vec![FieldElem::ZERO; width]);
    }
    let pivots = rref(field, &mut aug);
    if pivots.last() == Some(&width) {
        return None;
    }
    let mut x = vec![FieldElem::ZERO; width];
    for (row, &pc) in aug.iter().zip(&pivots) {
        x[pc] = row[width];
    }
    Some(x)
}

/// A subspace of `M_n`, held as the reduced row-echelon basis of the
/// row-major flattenings of its elements. Equality is equality of subspaces.
#[derive(Clone)]
pub struct Subspace {
    n: usize,
    field: FieldRef,
    rows: Vec<Vec<FieldElem>>,
    pivots: Vec<usize>,
}

impl PartialEq for Subspace {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.rows == other.rows && same_field(&self.field, &other.field)
    }
}

impl Eq for Subspace {}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Subspace").field("dim", &self.dim()).field("basis", &self.basis()).finish()
    }
}

impl Subspace {
    pub fn zero(field: &FieldRef, n: usize) -> Subspace {
        Subspace { n, field: field.clone(), rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(field: &FieldRef, n: usize) -> Subspace {
        let units: Vec<Mat> =
            (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| Mat::unit(field, n, i, j)).collect();
        Subspace::span(field, n, &units)
    }

    /// Span of matrices already known to share `field` and size `n`.
    pub fn span(field: &FieldRef, n: usize, spanners: &[Mat]) -> Subspace {
        Subspace::from_vectors(field, n, spanners.iter().map(|m| m.data.clone()).collect())
    }

    /// Canonical span of `spanners`; rejects mixed fields or sizes.
    pub fn from_spanners(field: &FieldRef, n: usize, spanners: &[Mat]) -> Result<Subspace, LinalgError> {
        if spanners.iter().any(|m| m.n != n || !same_field(&m.field, field)) {
            return Err(LinalgError::MixedFields);
        }
        Ok(Subspace::span(field, n, spanners))
    }

    pub fn from_vectors(field: &FieldRef, n: usize, mut rows: Vec<Vec<FieldElem>>) -> Subspace {
        rows.retain(|r| r.iter().any(|e| !e.is_zero()));
        let pivots = rref(field, &mut rows);
        Subspace { n, field: field.clone(), rows, pivots }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[Vec<FieldElem>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn basis(&self) -> Vec<Mat> {
        self.rows.iter().map(|r| Mat { n: self.n, field: self.field.clone(), data: r.clone() }).collect()
    }

    /// Residue of `v` after eliminating the pivot columns; zero iff `v` is in the subspace.
    pub fn reduce(&self, v: &[FieldElem]) -> Vec<FieldElem> {
        let f = &self.field;
        let mut v = v.to_vec();
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let c = v[pc];
            if !c.is_zero() {
                for (x, &r) in v[pc..].iter_mut().zip(&row[pc..]) {
                    if !r.is_zero() {
                        *x = f.sub(*x, f.mul(c, r));
                    }
                }
            }
        }
        v
    }

    pub fn contains_vec(&self, v: &[FieldElem]) -> bool {
        self.reduce(v).iter().all(|e| e.is_zero())
    }

    pub fn contains(&self, m: &Mat) -> bool {
        self.contains_vec(&m.data)
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.rows.iter().all(|r| other.contains_vec(r))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Subspace::from_vectors(&self.field, self.n, rows)
    }

    /// Zassenhaus: row-reduce `[u | u]` over `[v | 0]`; rows with vanishing
    /// left half carry a basis of the intersection on the right.
    pub fn intersect(&self, other: &Subspace) -> Subspace {
        if self.is_zero() || other.is_zero() {
            return Subspace::zero(&self.field, self.n);
        }
        let width = self.n * self.n;
        let mut rows: Vec<Vec<FieldElem>> = self
            .rows
            .iter()
            .map(|r| r.iter().chain(r.iter()).copied().collect())
            .chain(other.rows.iter().map(|r| {
                r.iter().copied().chain(std::iter::repeat_n(FieldElem::ZERO, width)).collect()
            }))
            .collect();
        rref(&self.field, &mut rows);
        let inter = rows
            .into_iter()
            .filter(|r| r[..width].iter().all(|e| e.is_zero()))
            .map(|r| r[width..].to_vec())
            .collect();
        Subspace::from_vectors(&self.field, self.n, inter)
    }

    /// Image under a linear map given on matrices.
    pub fn map(&self, f: impl Fn(&Mat) -> Mat) -> Subspace {
        let imgs: Vec<Mat> = self.basis().iter().map(f).collect();
        Subspace::span(&self.field, self.n, &imgs)
    }
}

/// Coordinates with respect to an independent family of subspaces
/// `V_0, ..., V_{m-1}`: splits a vector of `V_0 + ... + V_{m-1}` into its parts.
#[derive(Clone)]
pub struct Decomposer {
    n: usize,
    field: FieldRef,
    /// Stacked bases, with the part each row belongs to.
    basis: Vec<(usize, Vec<FieldElem>)>,
    parts: usize,
    pivots: Vec<usize>,
    /// Inverse of the stacked basis restricted to `pivots`.
    inv: Vec<Vec<FieldElem>>,
}

impl Decomposer {
    pub fn new(field: &FieldRef, n: usize, parts: &[&Subspace]) -> Result<Decomposer, LinalgError> {
        let basis: Vec<(usize, Vec<FieldElem>)> = parts
            .iter()
            .enumerate()
            .flat_map(|(i, s)| s.rows.iter().map(move |r| (i, r.clone())))
            .collect();
        let d = basis.len();
        let mut echelon: Vec<Vec<FieldElem>> = basis.iter().map(|(_, r)| r.clone()).collect();
        let pivots = if d == 0 { Vec::new() } else { rref(field, &mut echelon) };
        if pivots.len() != d {
            return Err(LinalgError::NotIndependent);
        }
        // square system B[:, pivots], rows = basis vectors
        let sq = Mat {
            n: d,
            field: field.clone(),
            data: basis.iter().flat_map(|(_, r)| pivots.iter().map(|&c| r[c])).collect(),
        };
        let inv_m = if d == 0 { sq.clone() } else { sq.inverse().ok_or(LinalgError::NotIndependent)? };
        let inv = (0..d).map(|i| (0..d).map(|j| inv_m.get(i, j)).collect()).collect();
        Ok(Decomposer { n, field: field.clone(), basis, parts: parts.len(), pivots, inv })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of `x` along the stacked basis.
    pub fn coordinates(&self, x: &Mat) -> Result<Vec<FieldElem>, LinalgError> {
        let f = &self.field;
        let d = self.basis.len();
        let mut coords = vec![FieldElem::ZERO; d];
        for (k, &pc) in self.pivots.iter().enumerate() {
            let xv = x.data[pc];
            if xv.is_zero() {
                continue;
            }
            for (c, &m) in coords.iter_mut().zip(&self.inv[k]) {
                *c = f.add(*c, f.mul(xv, m));
            }
        }
        let mut residue = x.data.clone();
        for (c, (_, row)) in coords.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            for (r, &b) in residue.iter_mut().zip(row) {
                *r = f.sub(*r, f.mul(*c, b));
            }
        }
        if residue.iter().any(|e| !e.is_zero()) {
            return Err(LinalgError::NotInSpan);
        }
        Ok(coords)
    }

    /// The parts of `x`, one matrix per subspace (zero where absent).
    pub fn split(&self, x: &Mat) -> Result<Vec<Mat>, LinalgError> {
        let f = &self.field;
        let coords = self.coordinates(x)?;
        let mut out = vec![Mat::zero(f, self.n); self.parts];
        for (c, (part, row)) in coords.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            let m = &mut out[*part];
            for (v, &b) in m.data.iter_mut().zip(row) {
                *v = f.add(*v, f.mul(*c, b));
            }
        }
        Ok(out)
    }
}
