//! Group gradings of `M_n` and `sl_n`.
//!
//! A [`Grading`] maps group elements to subspaces; zero components are not
//! stored. Constructors here build gradings of the associative algebra `M_n`;
//! Lie gradings of `sl_n` are built in [`crate::sl`].

use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldError, FieldRef};
use crate::group::{AbelianGroup, GroupElem, GroupError, Quotient};
use crate::linalg::{Decomposer, LinalgError, Mat, Subspace};

/// Which product a grading is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Associative,
    Lie,
}

impl Mode {
    pub fn product(self, x: &Mat, y: &Mat) -> Mat {
        match self {
            Mode::Associative => x.mul(y),
            Mode::Lie => x.bracket(y),
        }
    }
}

/// The graded space: all of `M_n`, or the trace-zero matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ambient {
    Full,
    Traceless,
}

impl Ambient {
    pub fn dim(self, n: usize) -> usize {
        match self {
            Ambient::Full => n * n,
            Ambient::Traceless => n * n - 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GradingError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("components at {first} and {second:?} are not independent")]
    NotDirectSum { first: GroupElem, second: Option<GroupElem> },
    #[error("components have total dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("component at {0} leaves the graded space")]
    NotInAmbient(GroupElem),
    #[error("gradings are over different groups")]
    GroupMismatch,
    #[error("gradings are over different fields")]
    FieldMismatch,
    #[error("gradings live on matrices of different sizes")]
    SizeMismatch,
    #[error("tuple has {got} entries, expected {expected}")]
    TupleLength { expected: usize, got: usize },
    #[error("characteristic {p} divides m = {m}: no fine grading of M_m exists")]
    CharacteristicDividesM { p: u32, m: usize },
    #[error("field has no primitive {0}-th root of unity")]
    NoRootOfUnity(usize),
    #[error("embedding Z_m x Z_m -> G is not an injective homomorphism")]
    BadEmbedding,
    #[error("matrix has a part outside the graded space")]
    NotInGradedSpace,
}

/// A violated inclusion `x * y` (or `[x, y]`) not in the component of degree `left * right`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub left: GroupElem,
    pub right: GroupElem,
    pub x: Mat,
    pub y: Mat,
    pub product: Mat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradingReport {
    pub mode: Mode,
    pub pairs_checked: usize,
    pub violations: Vec<Violation>,
}

impl GradingReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone)]
pub struct Grading {
    group: AbelianGroup,
    field: FieldRef,
    n: usize,
    ambient: Ambient,
    components: BTreeMap<GroupElem, Subspace>,
    decomposer: Arc<OnceLock<Result<Decomposer, LinalgError>>>,
}

impl PartialEq for Grading {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group
            && self.n == other.n
            && self.ambient == other.ambient
            && self.components == other.components
    }
}

impl Eq for Grading {}

impl std::fmt::Debug for Grading {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let dims: BTreeMap<_, _> = self.components.iter().map(|(g, s)| (g.clone(), s.dim())).collect();
        f.debug_struct("Grading")
            .field("group", &self.group)
            .field("n", &self.n)
            .field("ambient", &self.ambient)
            .field("dims", &dims)
            .finish()
    }
}

impl Grading {
    /// Builds a grading without checking the direct-sum or dimension
    /// invariants; [`Grading::verify`] reports those.
    pub fn from_components(
        group: &AbelianGroup,
        field: &FieldRef,
        n: usize,
        ambient: Ambient,
        components: impl IntoIterator<Item = (GroupElem, Subspace)>,
    ) -> Result<Grading, GradingError> {
        let mut map: BTreeMap<GroupElem, Subspace> = BTreeMap::new();
        for (g, s) in components {
            group.check(&g)?;
            if s.n() != n {
                return Err(GradingError::SizeMismatch);
            }
            if s.is_zero() {
                continue;
            }
            let merged = match map.remove(&g) {
                Some(prev) => prev.sum(&s),
                None => s,
            };
            map.insert(g, merged);
        }
        Ok(Grading {
            group: group.clone(),
            field: field.clone(),
            n,
            ambient,
            components: map,
            decomposer: Arc::default(),
        })
    }

    /// Builds and checks the direct-sum and dimension invariants.
    pub fn new(
        group: &AbelianGroup,
        field: &FieldRef,
        n: usize,
        ambient: Ambient,
        components: impl IntoIterator<Item = (GroupElem, Subspace)>,
    ) -> Result<Grading, GradingError> {
        let g = Grading::from_components(group, field, n, ambient, components)?;
        g.check_invariants()?;
        Ok(g)
    }

    pub fn trivial(group: &AbelianGroup, field: &FieldRef, n: usize) -> Grading {
        Grading::from_components(group, field, n, Ambient::Full, [(group.identity(), Subspace::full(field, n))])
            .expect("identity is in every group")
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn components(&self) -> &BTreeMap<GroupElem, Subspace> {
        &self.components
    }

    pub fn component(&self, g: &GroupElem) -> Option<&Subspace> {
        self.components.get(g)
    }

    pub fn component_or_zero(&self, g: &GroupElem) -> Subspace {
        self.components.get(g).cloned().unwrap_or_else(|| Subspace::zero(&self.field, self.n))
    }

    pub fn total_dim(&self) -> usize {
        self.components.values().map(Subspace::dim).sum()
    }

    /// Union of component bases, each tagged with its degree.
    pub fn homogeneous_basis(&self) -> Vec<(GroupElem, Mat)> {
        self.components
            .iter()
            .flat_map(|(g, s)| s.basis().into_iter().map(move |m| (g.clone(), m)))
            .collect()
    }

    /// Direct-sum and dimension invariants, plus containment in the ambient space.
    pub fn check_invariants(&self) -> Result<(), GradingError> {
        let keys: Vec<&GroupElem> = self.components.keys().collect();
        let mut acc = Subspace::zero(&self.field, self.n);
        for (i, g) in keys.iter().enumerate() {
            let s = &self.components[*g];
            if acc.sum(s).dim() != acc.dim() + s.dim() {
                let second = keys[..i]
                    .iter()
                    .find(|h| !self.components[**h].intersect(s).is_zero())
                    .map(|h| (*h).clone());
                return Err(GradingError::NotDirectSum { first: (*g).clone(), second });
            }
            acc = acc.sum(s);
        }
        if self.ambient == Ambient::Traceless {
            for (g, s) in &self.components {
                if s.basis().iter().any(|m| !m.trace().is_zero()) {
                    return Err(GradingError::NotInAmbient(g.clone()));
                }
            }
        }
        let expected = self.ambient.dim(self.n);
        if acc.dim() != expected {
            return Err(GradingError::DimensionMismatch { expected, got: acc.dim() });
        }
        Ok(())
    }

    fn decomposer(&self) -> Result<&Decomposer, GradingError> {
        let d = self.decomposer.get_or_init(|| {
            let parts: Vec<&Subspace> = self.components.values().collect();
            Decomposer::new(&self.field, self.n, &parts)
        });
        d.as_ref().map_err(|e| GradingError::Linalg(e.clone()))
    }

    /// Homogeneous parts of `x`, nonzero ones only, in degree order.
    pub fn split(&self, x: &Mat) -> Result<Vec<(GroupElem, Mat)>, GradingError> {
        let parts = self.decomposer()?.split(x).map_err(|e| match e {
            LinalgError::NotInSpan => GradingError::NotInGradedSpace,
            other => GradingError::Linalg(other),
        })?;
        Ok(self
            .components
            .keys()
            .cloned()
            .zip(parts)
            .filter(|(_, m)| !m.is_zero())
            .collect())
    }

    /// Checks `R_g R_h ⊆ R_{gh}` (or the bracket version) on every pair of basis elements.
    pub fn verify(&self, mode: Mode) -> Result<GradingReport, GradingError> {
        self.check_invariants()?;
        let basis: Vec<(GroupElem, Vec<Mat>)> =
            self.components.iter().map(|(g, s)| (g.clone(), s.basis())).collect();
        let pairs: Vec<(usize, usize)> =
            (0..basis.len()).flat_map(|i| (0..basis.len()).map(move |j| (i, j))).collect();
        let zero = Subspace::zero(&self.field, self.n);
        let per_pair: Vec<(usize, Vec<Violation>)> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let (g, xs) = &basis[i];
                let (h, ys) = &basis[j];
                let target = self.components.get(&self.group.mul(g, h)).unwrap_or(&zero);
                let mut bad = Vec::new();
                for x in xs {
                    for y in ys {
                        let prod = mode.product(x, y);
                        if !target.contains(&prod) {
                            bad.push(Violation {
                                left: g.clone(),
                                right: h.clone(),
                                x: x.clone(),
                                y: y.clone(),
                                product: prod,
                            });
                        }
                    }
                }
                (xs.len() * ys.len(), bad)
            })
            .collect();
        let pairs_checked = per_pair.iter().map(|(c, _)| c).sum();
        let violations = per_pair.into_iter().flat_map(|(_, v)| v).collect();
        Ok(GradingReport { mode, pairs_checked, violations })
    }

    /// `{g : R_g != 0}` and whether it is a subgroup.
    pub fn support(&self) -> (BTreeSet<GroupElem>, bool) {
        let supp: BTreeSet<GroupElem> = self.components.keys().cloned().collect();
        let closed = supp.iter().all(|a| {
            supp.contains(&self.group.inv(a)) && supp.iter().all(|b| supp.contains(&self.group.mul(a, b)))
        });
        let nonempty = !supp.is_empty();
        (supp, nonempty && closed)
    }

    fn same_setting(&self, other: &Grading) -> Result<(), GradingError> {
        if self.group != other.group {
            return Err(GradingError::GroupMismatch);
        }
        if *self.field != *other.field {
            return Err(GradingError::FieldMismatch);
        }
        if self.n != other.n {
            return Err(GradingError::SizeMismatch);
        }
        Ok(())
    }

    /// A degree `g` where `other_g != ⊕_x (self_x ∩ other_g)`; `None` when compatible.
    pub fn incompatibility(&self, other: &Grading) -> Result<Option<GroupElem>, GradingError> {
        self.same_setting(other)?;
        for (g, s) in &other.components {
            let covered: usize = self.components.values().map(|r| r.intersect(s).dim()).sum();
            if covered != s.dim() {
                return Ok(Some(g.clone()));
            }
        }
        Ok(None)
    }

    pub fn compatible(&self, other: &Grading) -> Result<bool, GradingError> {
        Ok(self.incompatibility(other)?.is_none())
    }

    /// Coarsening over `G / <gens>`.
    pub fn factor(&self, gens: &[GroupElem]) -> Result<Grading, GradingError> {
        let q = self.group.quotient(gens)?;
        Ok(self.factor_by(&q))
    }

    pub fn factor_by(&self, q: &Quotient) -> Grading {
        let comps = self.components.iter().map(|(g, s)| (q.project(g), s.clone()));
        Grading::from_components(&q.group, &self.field, self.n, self.ambient, comps)
            .expect("projection lands in the quotient")
    }

    /// Image under `x -> u x u^{-1}`.
    pub fn conjugate(&self, u: &Mat, u_inv: &Mat) -> Grading {
        let comps = self.components.iter().map(|(g, s)| (g.clone(), s.map(|x| x.conj(u, u_inv))));
        Grading::from_components(&self.group, &self.field, self.n, self.ambient, comps)
            .expect("conjugation keeps degrees")
    }

    /// Same components, regarded as grading a different ambient space.
    pub fn with_ambient(&self, ambient: Ambient) -> Grading {
        Grading { ambient, decomposer: Arc::default(), ..self.clone() }
    }
}

/// `deg E_ij = g_i^{-1} g_j`.
pub fn elementary_grading(
    group: &AbelianGroup,
    field: &FieldRef,
    n: usize,
    tuple: &[GroupElem],
) -> Result<Grading, GradingError> {
    if tuple.len() != n {
        return Err(GradingError::TupleLength { expected: n, got: tuple.len() });
    }
    for g in tuple {
        group.check(g)?;
    }
    let mut spanners: BTreeMap<GroupElem, Vec<Mat>> = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            let deg = group.mul(&group.inv(&tuple[i]), &tuple[j]);
            spanners.entry(deg).or_default().push(Mat::unit(field, n, i, j));
        }
    }
    Grading::from_components(
        group,
        field,
        n,
        Ambient::Full,
        spanners.into_iter().map(|(g, ms)| (g, Subspace::span(field, n, &ms))),
    )
}

/// Clock `X_a = diag(1, e, ..., e^{m-1})` and shift `X_b = sum E_{i+1, i}`,
/// so that `X_a X_b = e X_b X_a`.
pub fn pauli_matrices(field: &FieldRef, m: usize) -> Result<(Mat, Mat, crate::field::FieldElem), GradingError> {
    let p = field.characteristic();
    if (m as u64).is_multiple_of(p as u64) {
        return Err(GradingError::CharacteristicDividesM { p, m });
    }
    let eps = field.root_of_unity(m as u64).map_err(|_| GradingError::NoRootOfUnity(m))?;
    let xa = Mat::diag(field, &(0..m).map(|i| field.pow(eps, i as u64)).collect::<Vec<_>>());
    let mut xb = Mat::zero(field, m);
    for i in 0..m {
        xb.set((i + 1) % m, i, field.one());
    }
    Ok((xa, xb, eps))
}

/// Fine grading of `M_m`: `X_a^i X_b^j` has degree `a^i b^j` where `a, b`
/// are the images of the generators of `Z_m x Z_m`.
pub fn pauli_grading(
    group: &AbelianGroup,
    field: &FieldRef,
    m: usize,
    embed: [&GroupElem; 2],
) -> Result<Grading, GradingError> {
    let (xa, xb, _) = pauli_matrices(field, m)?;
    let [a, b] = embed;
    group.check(a)?;
    group.check(b)?;
    let mut images = BTreeSet::new();
    let mut comps = Vec::new();
    let mut xa_pow = Mat::identity(field, m);
    for i in 0..m {
        let mut x = xa_pow.clone();
        for j in 0..m {
            let deg = group.mul(&group.pow(a, i as i64), &group.pow(b, j as i64));
            images.insert(deg.clone());
            comps.push((deg, Subspace::span(field, m, &[x.clone()])));
            x = x.mul(&xb);
        }
        xa_pow = xa_pow.mul(&xa);
    }
    let hom = group.pow(a, m as i64) == group.identity() && group.pow(b, m as i64) == group.identity();
    if !hom || images.len() != m * m {
        return Err(GradingError::BadEmbedding);
    }
    Grading::from_components(group, field, m, Ambient::Full, comps)
}

/// Grading of `M_k (x) M_l = M_{kl}` with `deg(a (x) b) = deg a * deg b`.
pub fn tensor_gradings(a: &Grading, b: &Grading) -> Result<Grading, GradingError> {
    if a.group != b.group {
        return Err(GradingError::GroupMismatch);
    }
    if *a.field != *b.field {
        return Err(GradingError::FieldMismatch);
    }
    let n = a.n * b.n;
    let mut spanners: BTreeMap<GroupElem, Vec<Mat>> = BTreeMap::new();
    for (g, x) in a.homogeneous_basis() {
        for (h, y) in b.homogeneous_basis() {
            spanners.entry(a.group.mul(&g, &h)).or_default().push(x.kron(&y));
        }
    }
    Grading::from_components(
        &a.group,
        &a.field,
        n,
        Ambient::Full,
        spanners.into_iter().map(|(g, ms)| (g, Subspace::span(&a.field, n, &ms))),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_field;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ge(e: &[u32]) -> GroupElem {
        GroupElem(e.to_vec())
    }

    #[test]
    fn elementary_z2_on_m2() {
        let f = build_field(5, 1).unwrap();
        let z2 = AbelianGroup::new(&[2]).unwrap();
        let gr = elementary_grading(&z2, &f, 2, &[ge(&[0]), ge(&[1])]).unwrap();
        let e = |i, j| Mat::unit(&f, 2, i, j);
        assert_eq!(gr.component(&ge(&[0])).unwrap(), &Subspace::span(&f, 2, &[e(0, 0), e(1, 1)]));
        assert_eq!(gr.component(&ge(&[1])).unwrap(), &Subspace::span(&f, 2, &[e(0, 1), e(1, 0)]));
        assert!(gr.verify(Mode::Associative).unwrap().holds());
        assert!(gr.verify(Mode::Lie).unwrap().holds());
        assert!(gr.component(&ge(&[0])).unwrap().contains(&Mat::identity(&f, 2)));
    }

    #[test]
    fn moving_e12_breaks_the_grading() {
        let f = build_field(5, 1).unwrap();
        let z2 = AbelianGroup::new(&[2]).unwrap();
        let e = |i, j| Mat::unit(&f, 2, i, j);
        let gr = Grading::new(
            &z2,
            &f,
            2,
            Ambient::Full,
            [
                (ge(&[0]), Subspace::span(&f, 2, &[e(0, 0), e(1, 1), e(0, 1)])),
                (ge(&[1]), Subspace::span(&f, 2, &[e(1, 0)])),
            ],
        )
        .unwrap();
        let rep = gr.verify(Mode::Associative).unwrap();
        assert!(!rep.holds());
        assert!(rep.violations.iter().any(|v| v.x == e(0, 1) && v.y == e(1, 0) && v.left == ge(&[0])));
    }

    #[test]
    fn trivial_grading_passes_both_modes() {
        let f = build_field(3, 1).unwrap();
        let g = AbelianGroup::new(&[3]).unwrap();
        let gr = Grading::trivial(&g, &f, 3);
        assert!(gr.verify(Mode::Associative).unwrap().holds());
        assert!(gr.verify(Mode::Lie).unwrap().holds());
        assert_eq!(gr.support(), (BTreeSet::from([g.identity()]), true));
        let all_id = elementary_grading(&g, &f, 3, &[ge(&[1]), ge(&[1]), ge(&[1])]).unwrap();
        assert_eq!(all_id, gr);
    }

    #[test]
    fn elementary_z3_on_m3() {
        let f = build_field(5, 1).unwrap();
        let z3 = AbelianGroup::new(&[3]).unwrap();
        let gr = elementary_grading(&z3, &f, 3, &[ge(&[0]), ge(&[1]), ge(&[2])]).unwrap();
        let e = |i, j| Mat::unit(&f, 3, i, j);
        assert_eq!(gr.component(&ge(&[1])).unwrap(), &Subspace::span(&f, 3, &[e(0, 1), e(1, 2), e(2, 0)]));
        assert!(gr.verify(Mode::Associative).unwrap().holds());
    }

    #[test]
    fn invariant_errors() {
        let f = build_field(5, 1).unwrap();
        let z2 = AbelianGroup::new(&[2]).unwrap();
        let full = Subspace::full(&f, 2);
        let overlap = Grading::from_components(
            &z2,
            &f,
            2,
            Ambient::Full,
            [(ge(&[0]), full.clone()), (ge(&[1]), Subspace::span(&f, 2, &[Mat::unit(&f, 2, 0, 1)]))],
        )
        .unwrap();
        assert_eq!(
            overlap.verify(Mode::Associative).unwrap_err(),
            GradingError::NotDirectSum { first: ge(&[1]), second: Some(ge(&[0])) }
        );
        let short = Grading::from_components(
            &z2,
            &f,
            2,
            Ambient::Full,
            [(ge(&[0]), Subspace::span(&f, 2, &[Mat::identity(&f, 2)]))],
        )
        .unwrap();
        assert_eq!(
            short.verify(Mode::Lie).unwrap_err(),
            GradingError::DimensionMismatch { expected: 4, got: 1 }
        );
    }

    #[test]
    fn pauli_m2_over_gf5() {
        let f = build_field(5, 1).unwrap();
        let (xa, xb, eps) = pauli_matrices(&f, 2).unwrap();
        assert_eq!(eps, f.from_int(4));
        assert_eq!(xa.mul(&xb), Mat::from_ints(&f, &[&[0, 1], &[4, 0]]));
        assert_eq!(xa.mul(&xb), xb.mul(&xa).scale(eps));
        let v4 = AbelianGroup::new(&[2, 2]).unwrap();
        let gr = pauli_grading(&v4, &f, 2, [&ge(&[1, 0]), &ge(&[0, 1])]).unwrap();
        let (supp, sub) = gr.support();
        assert_eq!(supp.len(), 4);
        assert!(sub);
        assert!(gr.components().values().all(|s| s.dim() == 1));
        assert!(gr.verify(Mode::Associative).unwrap().holds());
    }

    #[test]
    fn pauli_errors() {
        let f3 = build_field(3, 1).unwrap();
        let g = AbelianGroup::new(&[3, 3]).unwrap();
        assert_eq!(
            pauli_grading(&g, &f3, 3, [&ge(&[1, 0]), &ge(&[0, 1])]).unwrap_err(),
            GradingError::CharacteristicDividesM { p: 3, m: 3 }
        );
        let f5 = build_field(5, 1).unwrap();
        assert_eq!(
            pauli_grading(&g, &f5, 3, [&ge(&[1, 0]), &ge(&[0, 1])]).unwrap_err(),
            GradingError::NoRootOfUnity(3)
        );
        let v4 = AbelianGroup::new(&[2, 2]).unwrap();
        assert_eq!(
            pauli_grading(&v4, &f5, 2, [&ge(&[1, 0]), &ge(&[1, 0])]).unwrap_err(),
            GradingError::BadEmbedding
        );
    }

    #[test]
    fn pauli_m3_and_m4() {
        let f = build_field(7, 1).unwrap();
        let g = AbelianGroup::new(&[3, 3]).unwrap();
        let gr = pauli_grading(&g, &f, 3, [&ge(&[1, 0]), &ge(&[0, 1])]).unwrap();
        assert_eq!(gr.components().len(), 9);
        assert!(gr.verify(Mode::Associative).unwrap().holds());
        let f5 = build_field(5, 1).unwrap();
        let g4 = AbelianGroup::new(&[4, 4]).unwrap();
        let gr = pauli_grading(&g4, &f5, 4, [&ge(&[1, 0]), &ge(&[0, 1])]).unwrap();
        assert!(gr.verify(Mode::Associative).unwrap().holds());
        assert!(gr.support().1);
    }

    #[test]
    fn tensor_examples() {
        let f = build_field(5, 1).unwrap();
        let v4 = AbelianGroup::new(&[2, 2]).unwrap();
        let pauli = pauli_grading(&v4, &f, 2, [&ge(&[1, 0]), &ge(&[0, 1])]).unwrap();
        let elem = elementary_grading(&v4, &f, 2, &[ge(&[0, 0]), ge(&[1, 0])]).unwrap();
        let t = tensor_gradings(&pauli, &elem).unwrap();
        assert_eq!(t.n(), 4);
        assert_eq!(t.total_dim(), 16);
        assert!(t.verify(Mode::Associative).unwrap().holds());

        let triv = Grading::trivial(&v4, &f, 3);
        let t = tensor_gradings(&triv, &elem).unwrap();
        assert_eq!(t.components().len(), elem.components().len());
        for (g, s) in elem.components() {
            assert_eq!(t.component(g).unwrap().dim(), 9 * s.dim());
        }

        let g4 = AbelianGroup::new(&[2, 2, 2, 2]).unwrap();
        let p1 = pauli_grading(&g4, &f, 2, [&ge(&[1, 0, 0, 0]), &ge(&[0, 1, 0, 0])]).unwrap();
        let p2 = pauli_grading(&g4, &f, 2, [&ge(&[0, 0, 1, 0]), &ge(&[0, 0, 0, 1])]).unwrap();
        let t = tensor_gradings(&p1, &p2).unwrap();
        assert_eq!(t.components().len(), 16);
        assert!(t.components().values().all(|s| s.dim() == 1));
        assert!(t.verify(Mode::Associative).unwrap().holds());

        let other = AbelianGroup::new(&[2]).unwrap();
        let f7 = build_field(7, 1).unwrap();
        assert_eq!(
            tensor_gradings(&pauli, &Grading::trivial(&other, &f, 2)).unwrap_err(),
            GradingError::GroupMismatch
        );
        assert_eq!(
            tensor_gradings(&pauli, &Grading::trivial(&v4, &f7, 2)).unwrap_err(),
            GradingError::FieldMismatch
        );
    }

    #[test]
    fn factor_examples() {
        let f = build_field(5, 1).unwrap();
        let z4 = AbelianGroup::new(&[4]).unwrap();
        let gr = elementary_grading(&z4, &f, 3, &[ge(&[0]), ge(&[1]), ge(&[2])]).unwrap();
        let fac = gr.factor(&[ge(&[2])]).unwrap();
        let z2 = AbelianGroup::new(&[2]).unwrap();
        assert_eq!(fac, elementary_grading(&z2, &f, 3, &[ge(&[0]), ge(&[1]), ge(&[0])]).unwrap());
        assert!(fac.verify(Mode::Associative).unwrap().holds());

        let whole = gr.factor(&[ge(&[1])]).unwrap();
        assert_eq!(whole.components().len(), 1);
        assert_eq!(whole.total_dim(), 9);
        assert_eq!(gr.factor(&[ge(&[0])]).unwrap(), gr);
    }

    #[test]
    fn compatibility() {
        let f = build_field(5, 1).unwrap();
        let z2 = AbelianGroup::new(&[2]).unwrap();
        let gr = elementary_grading(&z2, &f, 2, &[ge(&[0]), ge(&[1])]).unwrap();
        assert!(gr.compatible(&gr).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut found = false;
        for _ in 0..10 {
            let (u, ui) = Mat::random_invertible(&f, 2, &mut rng);
            let c = gr.conjugate(&u, &ui);
            assert!(c.verify(Mode::Associative).unwrap().holds());
            if let Some(g) = gr.incompatibility(&c).unwrap() {
                // dimension-count oracle
                let s = c.component(&g).unwrap();
                let covered: usize = gr.components().values().map(|r| r.intersect(s).dim()).sum();
                assert!(covered < s.dim());
                found = true;
            }
        }
        assert!(found);
    }

    #[test]
    fn split_reassembles() {
        let f = build_field(5, 1).unwrap();
        let z2 = AbelianGroup::new(&[2]).unwrap();
        let gr = elementary_grading(&z2, &f, 2, &[ge(&[0]), ge(&[1])]).unwrap();
        let x = Mat::from_ints(&f, &[&[1, 1], &[0, 0]]);
        assert_eq!(
            gr.split(&x).unwrap(),
            vec![(ge(&[0]), Mat::unit(&f, 2, 0, 0)), (ge(&[1]), Mat::unit(&f, 2, 0, 1))]
        );
        let sl = gr.with_ambient(Ambient::Traceless);
        assert!(sl.check_invariants().is_err());
    }
}
