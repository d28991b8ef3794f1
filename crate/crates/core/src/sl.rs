//! Gradings of `sl_n`: type I and type II constructions, first-kind
//! involutions, the exchange construction and candidate-based classification.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::field::{FieldElem, FieldRef};
use crate::grading::{Ambient, Grading, GradingError, Mode};
use crate::group::{AbelianGroup, GroupElem};
use crate::linalg::{Mat, Subspace};

/// Upper bound on candidates tried by [`correct_antiautomorphism`].
pub const SEARCH_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SlError {
    #[error("characteristic {p} divides n = {n}")]
    PDividesN { p: u32, n: usize },
    #[error("component at {0} is not trace-free")]
    ComponentNotTraceless(GroupElem),
    #[error("{0} does not have order 2")]
    OrderNotTwo(GroupElem),
    #[error("antiautomorphism moves {x:?} out of the component at {degree}")]
    InvolutionNotPreserving { degree: GroupElem, x: Mat },
    #[error("subspace is not invariant: {0:?} leaves it")]
    NotInvariant(Mat),
    #[error("Phi must be invertible with Phi^T = ±Phi")]
    BadInvolution,
    #[error("gradings are not compatible at {0}")]
    NotCompatible(GroupElem),
    #[error("factor gradings differ at coset {0}")]
    FactorGradingsDiffer(GroupElem),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("no automorphism found among {0} candidates")]
    SearchExhausted(usize),
    #[error(transparent)]
    Grading(#[from] GradingError),
}

fn require_p_not_dividing(field: &FieldRef, n: usize) -> Result<(), SlError> {
    let p = field.characteristic();
    if n.is_multiple_of(p as usize) {
        return Err(SlError::PDividesN { p, n });
    }
    Ok(())
}

/// Trace-zero matrices.
pub fn sl_subspace(field: &FieldRef, n: usize) -> Result<Subspace, SlError> {
    require_p_not_dividing(field, n)?;
    let mut spanners = Vec::with_capacity(n * n - 1);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                spanners.push(Mat::unit(field, n, i, j));
            }
        }
    }
    for i in 0..n - 1 {
        spanners.push(Mat::unit(field, n, i, i).sub(&Mat::unit(field, n, n - 1, n - 1)));
    }
    let sl = Subspace::span(field, n, &spanners);
    let scalars = Subspace::span(field, n, &[Mat::identity(field, n)]);
    debug_assert!(sl.intersect(&scalars).is_zero());
    Ok(sl)
}

/// `L_g = R_g` for `g != 1`, `L_1 = R_1 ∩ sl_n`.
pub fn type1_grading(assoc: &Grading) -> Result<Grading, SlError> {
    let f = assoc.field();
    let sl = sl_subspace(f, assoc.n())?;
    let id = assoc.group().identity();
    let mut comps = Vec::new();
    for (g, r) in assoc.components() {
        if *g == id {
            comps.push((g.clone(), r.intersect(&sl)));
        } else {
            if !r.is_subspace_of(&sl) {
                return Err(SlError::ComponentNotTraceless(g.clone()));
            }
            comps.push((g.clone(), r.clone()));
        }
    }
    Ok(Grading::from_components(assoc.group(), f, assoc.n(), Ambient::Traceless, comps)?)
}

/// The antiautomorphism `x -> Phi^{-1} x^T Phi` of `M_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Antiautomorphism {
    pub phi: Mat,
    pub phi_inv: Mat,
}

impl Antiautomorphism {
    pub fn new(phi: Mat) -> Option<Antiautomorphism> {
        let phi_inv = phi.inverse()?;
        Some(Antiautomorphism { phi, phi_inv })
    }

    pub fn apply(&self, x: &Mat) -> Mat {
        self.phi_inv.mul(&x.transpose()).mul(&self.phi)
    }

    /// `φ² = conj(w)` with `w = Phi^{-1} Phi^T`.
    pub fn square(&self) -> (Mat, Mat) {
        let w = self.phi_inv.mul(&self.phi.transpose());
        let w_inv = self.phi_inv.transpose().mul(&self.phi);
        (w, w_inv)
    }

    /// A degree and element `x ∈ R_g` with `φ(x) ∉ R_g`.
    pub fn preservation_witness(&self, gr: &Grading) -> Option<(GroupElem, Mat)> {
        for (g, r) in gr.components() {
            for x in r.basis() {
                if !r.contains(&self.apply(&x)) {
                    return Some((g.clone(), x));
                }
            }
        }
        None
    }
}

/// A first-kind involution `x -> Phi^{-1} x^T Phi` with `Phi^T = sign * Phi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Involution {
    anti: Antiautomorphism,
    sign: i8,
}

impl Involution {
    pub fn new(phi: Mat) -> Result<Involution, SlError> {
        let t = phi.transpose();
        let sign = if t == phi {
            1
        } else if t == phi.neg() {
            -1
        } else {
            return Err(SlError::BadInvolution);
        };
        let anti = Antiautomorphism::new(phi).ok_or(SlError::BadInvolution)?;
        Ok(Involution { anti, sign })
    }

    /// Plain transpose.
    pub fn transpose(field: &FieldRef, n: usize) -> Involution {
        Involution::new(Mat::identity(field, n)).expect("identity is symmetric")
    }

    /// `Phi = Σ E_{i, n-1-i}`.
    pub fn antidiagonal(field: &FieldRef, n: usize) -> Involution {
        let mut phi = Mat::zero(field, n);
        for i in 0..n {
            phi.set(i, n - 1 - i, field.one());
        }
        Involution::new(phi).expect("antidiagonal is symmetric")
    }

    /// `Phi = [[0, I], [-I, 0]]`, `n` even.
    pub fn symplectic(field: &FieldRef, n: usize) -> Option<Involution> {
        if !n.is_multiple_of(2) {
            return None;
        }
        let h = n / 2;
        let mut phi = Mat::zero(field, n);
        for i in 0..h {
            phi.set(i, h + i, field.one());
            phi.set(h + i, i, field.neg(field.one()));
        }
        Involution::new(phi).ok()
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn phi(&self) -> &Mat {
        &self.anti.phi
    }

    pub fn as_anti(&self) -> &Antiautomorphism {
        &self.anti
    }

    pub fn apply(&self, x: &Mat) -> Mat {
        self.anti.apply(x)
    }

    pub fn preservation_witness(&self, gr: &Grading) -> Option<(GroupElem, Mat)> {
        self.anti.preservation_witness(gr)
    }

    pub fn preserves(&self, gr: &Grading) -> bool {
        self.preservation_witness(gr).is_none()
    }
}

/// Skew and symmetric parts `(K(V), H(V))` of a `φ`-stable subspace.
pub fn symmetric_split(inv: &Involution, v: &Subspace) -> Result<(Subspace, Subspace), SlError> {
    let f = v.field();
    let basis = v.basis();
    let images: Vec<Mat> = basis.iter().map(|x| inv.apply(x)).collect();
    if let Some(x) = images.iter().find(|y| !v.contains(y)) {
        return Err(SlError::NotInvariant(x.clone()));
    }
    let skew: Vec<Mat> = basis.iter().zip(&images).map(|(x, y)| x.sub(y)).collect();
    let sym: Vec<Mat> = basis.iter().zip(&images).map(|(x, y)| x.add(y)).collect();
    Ok((Subspace::span(f, v.n(), &skew), Subspace::span(f, v.n(), &sym)))
}

fn check_twist(assoc: &Grading, inv: &Involution, h: &GroupElem) -> Result<(), SlError> {
    let g = assoc.group();
    g.check(h).map_err(GradingError::from)?;
    if g.elem_order(h) != 2 {
        return Err(SlError::OrderNotTwo(h.clone()));
    }
    if let Some((degree, x)) = inv.preservation_witness(assoc) {
        return Err(SlError::InvolutionNotPreserving { degree, x });
    }
    Ok(())
}

/// `R'_g = K(R_g) ⊕ H(R_{gh})`: a Lie grading of all of `M_n`.
pub fn type2_full(assoc: &Grading, inv: &Involution, h: &GroupElem) -> Result<Grading, SlError> {
    check_twist(assoc, inv, h)?;
    let g = assoc.group();
    let f = assoc.field();
    let mut split = BTreeMap::new();
    for (deg, r) in assoc.components() {
        split.insert(deg.clone(), symmetric_split(inv, r)?);
    }
    let mut comps = Vec::new();
    for (deg, (k, _)) in &split {
        comps.push((deg.clone(), k.clone()));
    }
    for (deg, (_, hs)) in &split {
        // H(R_d) lands in degree d h^{-1} = d h
        comps.push((g.mul(deg, h), hs.clone()));
    }
    Ok(Grading::from_components(g, f, assoc.n(), Ambient::Full, comps)?)
}

/// `L_g = K(R_g) ⊕ H(R_{gh})` for `g != h`, `L_h = K(R_h) ⊕ (H(R_1) ∩ sl_n)`.
pub fn type2_grading(assoc: &Grading, inv: &Involution, h: &GroupElem) -> Result<Grading, SlError> {
    let f = assoc.field();
    let sl = sl_subspace(f, assoc.n())?;
    let full = type2_full(assoc, inv, h)?;
    let mut comps = Vec::new();
    for (deg, r) in full.components() {
        if deg == h {
            comps.push((deg.clone(), r.intersect(&sl)));
        } else {
            if !r.is_subspace_of(&sl) {
                return Err(SlError::ComponentNotTraceless(deg.clone()));
            }
            comps.push((deg.clone(), r.clone()));
        }
    }
    Ok(Grading::from_components(assoc.group(), f, assoc.n(), Ambient::Traceless, comps)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExchangeReport {
    /// `R^h = ⊕_g (R~_g ∩ R_{gh})`, indexed by `h ∈ H`, as a grading by `G` supported in `H`.
    pub family: Grading,
    /// Degrees `g` where `R_g != ⊕_h (R~_{gh^{-1}} ∩ R^h)`.
    pub identity_failures: Vec<GroupElem>,
    /// Pairs `(h1, h2)` with `R^{h1} R^{h2} ⊄ R^{h1 h2}`.
    pub closure_failures: Vec<(GroupElem, GroupElem)>,
}

impl ExchangeReport {
    pub fn holds(&self) -> bool {
        self.identity_failures.is_empty() && self.closure_failures.is_empty()
    }
}

/// Exchange construction for compatible gradings `R` (`gr_a`) and `R~`
/// (`gr_b`) whose factor gradings by `H = <h_gens>` coincide.
pub fn exchange(gr_a: &Grading, gr_b: &Grading, h_gens: &[GroupElem], mode: Mode) -> Result<ExchangeReport, SlError> {
    if let Some(g) = gr_a.incompatibility(gr_b)?.or(gr_b.incompatibility(gr_a)?) {
        return Err(SlError::NotCompatible(g));
    }
    let group = gr_a.group();
    let f = gr_a.field();
    let n = gr_a.n();
    let q = group.quotient(h_gens).map_err(GradingError::from)?;
    let (fa, fb) = (gr_a.factor_by(&q), gr_b.factor_by(&q));
    for c in q.group.elements() {
        if fa.component_or_zero(&c) != fb.component_or_zero(&c) {
            return Err(SlError::FactorGradingsDiffer(c));
        }
    }
    let h_set: Vec<GroupElem> = group.subgroup(h_gens).into_iter().collect();

    let mut comps = Vec::new();
    for h in &h_set {
        let r_h = gr_b.components().iter().fold(Subspace::zero(f, n), |acc, (g, rt)| {
            acc.sum(&rt.intersect(&gr_a.component_or_zero(&group.mul(g, h))))
        });
        comps.push((h.clone(), r_h));
    }
    let family = Grading::from_components(group, f, n, gr_a.ambient(), comps)?;

    let mut identity_failures = Vec::new();
    for g in group.elements() {
        let parts: Vec<Subspace> = h_set
            .iter()
            .map(|h| {
                gr_b.component_or_zero(&group.mul(&g, &group.inv(h))).intersect(&family.component_or_zero(h))
            })
            .collect();
        let sum = parts.iter().fold(Subspace::zero(f, n), |acc, s| acc.sum(s));
        let direct = parts.iter().map(Subspace::dim).sum::<usize>() == sum.dim();
        if !direct || sum != gr_a.component_or_zero(&g) {
            identity_failures.push(g);
        }
    }

    let mut closure_failures = Vec::new();
    for h1 in &h_set {
        for h2 in &h_set {
            let target = family.component_or_zero(&group.mul(h1, h2));
            let (b1, b2) = (family.component_or_zero(h1).basis(), family.component_or_zero(h2).basis());
            let ok = b1.iter().all(|x| b2.iter().all(|y| target.contains(&mode.product(x, y))));
            if !ok {
                closure_failures.push((h1.clone(), h2.clone()));
            }
        }
    }
    Ok(ExchangeReport { family, identity_failures, closure_failures })
}

/// `ψ = conj(u)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InnerAutomorphism {
    pub u: Mat,
    pub u_inv: Mat,
}

impl InnerAutomorphism {
    pub fn identity(field: &FieldRef, n: usize) -> InnerAutomorphism {
        InnerAutomorphism { u: Mat::identity(field, n), u_inv: Mat::identity(field, n) }
    }

    pub fn apply(&self, x: &Mat) -> Mat {
        x.conj(&self.u, &self.u_inv)
    }
}

fn unit_basis(field: &FieldRef, n: usize) -> Vec<Mat> {
    (0..n * n).map(|k| Mat::unit(field, n, k / n, k % n)).collect()
}

/// The three required properties of `ψ`, checked on the matrix units.
pub fn correction_holds(gr: &Grading, phi: &Antiautomorphism, psi: &InnerAutomorphism) -> bool {
    let preserves = gr.components().values().all(|r| r.basis().iter().all(|x| r.contains(&psi.apply(x))));
    preserves
        && unit_basis(gr.field(), gr.n()).iter().all(|x| {
            phi.apply(&psi.apply(x)) == psi.apply(&phi.apply(x))
                && phi.apply(&phi.apply(x)) == psi.apply(&psi.apply(x))
        })
}

/// The `k`-th permutation of `0..n` in lexicographic order.
fn nth_permutation(n: usize, mut k: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    let mut fact: usize = (1..n).product();
    let mut out = Vec::with_capacity(n);
    for i in (1..=n).rev() {
        let idx = k / fact.max(1);
        k %= fact.max(1);
        out.push(pool.remove(idx));
        if i > 1 {
            fact /= i - 1;
        }
    }
    out
}

/// A grading-preserving inner automorphism `ψ` commuting with `φ` and with
/// `ψ² = φ²`.
///
/// Returns the identity when `φ² = id`. Otherwise searches monomial `u`
/// (permutation times diagonal with entries in `F^×`, first entry fixed to 1
/// since scalars do not change `conj(u)`), at most [`SEARCH_CAP`]
/// candidates, returning the least hit in enumeration order.
pub fn correct_antiautomorphism(gr: &Grading, phi: &Antiautomorphism) -> Result<InnerAutomorphism, SlError> {
    let f = gr.field();
    let n = gr.n();
    if let Some((degree, x)) = phi.preservation_witness(gr) {
        return Err(SlError::InvolutionNotPreserving { degree, x });
    }
    let id = gr.group().identity();
    let r1 = gr.component_or_zero(&id);
    let sq = |x: &Mat| phi.apply(&phi.apply(x));
    if r1.basis().iter().any(|x| sq(&sq(x)) != *x) {
        return Err(SlError::Precondition("φ² is not an involution on the identity component".into()));
    }
    if unit_basis(f, n).iter().all(|x| sq(x) == *x) {
        return Ok(InnerAutomorphism::identity(f, n));
    }

    let units: Vec<FieldElem> = f.roots_of_unity(f.order() as u64 - 1);
    let perms: usize = (1..=n).product();
    let per_perm = units.len().checked_pow(n as u32 - 1).unwrap_or(usize::MAX);
    let total = perms.saturating_mul(per_perm);
    let searched = total.min(SEARCH_CAP);
    let build = |k: usize| -> InnerAutomorphism {
        let perm = nth_permutation(n, k / per_perm);
        let mut rest = k % per_perm;
        let mut diag = vec![f.one(); n];
        for d in diag.iter_mut().skip(1) {
            *d = units[rest % units.len()];
            rest /= units.len();
        }
        let mut u = Mat::zero(f, n);
        let mut u_inv = Mat::zero(f, n);
        for i in 0..n {
            u.set(i, perm[i], diag[i]);
            u_inv.set(perm[i], i, f.inv(diag[i]).expect("unit"));
        }
        InnerAutomorphism { u, u_inv }
    };
    (0..searched)
        .into_par_iter()
        .find_first(|&k| correction_holds(gr, phi, &build(k)))
        .map(build)
        .ok_or(SlError::SearchExhausted(searched))
}

/// A candidate source for an `sl_n` grading: an associative grading of
/// `M_n`, optionally with an involution and order-2 element for type II.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub assoc: Grading,
    pub twist: Option<(Involution, GroupElem)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    TypeI(usize),
    TypeII(usize),
    Unknown,
}

/// First candidate whose type I (or, with a twist, type II) grading equals `slg`.
pub fn classify_sl_grading(slg: &Grading, candidates: &[Candidate]) -> Classification {
    let hit = candidates.par_iter().position_first(|c| match &c.twist {
        None => type1_grading(&c.assoc).is_ok_and(|g| g == *slg),
        Some((inv, h)) => type2_grading(&c.assoc, inv, h).is_ok_and(|g| g == *slg),
    });
    match hit {
        None => Classification::Unknown,
        Some(i) if candidates[i].twist.is_none() => Classification::TypeI(i),
        Some(i) => Classification::TypeII(i),
    }
}

/// All tuples in `G^n`, in lexicographic order.
pub fn group_tuples(group: &AbelianGroup, n: usize) -> Vec<Vec<GroupElem>> {
    let els: Vec<GroupElem> = group.elements().collect();
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                els.iter().map(move |g| {
                    let mut t = t.clone();
                    t.push(g.clone());
                    t
                })
            })
            .collect();
    }
    out
}

/// Type I candidates from every elementary grading of `M_n` by `G`.
pub fn elementary_candidates(group: &AbelianGroup, field: &FieldRef, n: usize) -> Vec<Candidate> {
    group_tuples(group, n)
        .into_iter()
        .map(|t| Candidate {
            assoc: crate::grading::elementary_grading(group, field, n, &t).expect("tuple has length n"),
            twist: None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_field;
    use crate::grading::{elementary_grading, pauli_grading};

    fn ge(e: &[u32]) -> GroupElem {
        GroupElem(e.to_vec())
    }

    fn span(f: &FieldRef, n: usize, ms: &[Mat]) -> Subspace {
        Subspace::span(f, n, ms)
    }

    fn e(f: &FieldRef, n: usize, i: usize, j: usize) -> Mat {
        Mat::unit(f, n, i, j)
    }

    fn z2_elementary(f: &FieldRef) -> Grading {
        let z2 = AbelianGroup::new(&[2]).unwrap();
        elementary_grading(&z2, f, 2, &[ge(&[0]), ge(&[1])]).unwrap()
    }

    #[test]
    fn sl_subspace_examples() {
        let f = build_field(5, 1).unwrap();
        let sl = sl_subspace(&f, 2).unwrap();
        assert_eq!(sl.dim(), 3);
        assert_eq!(sl, span(&f, 2, &[e(&f, 2, 0, 1), e(&f, 2, 1, 0), e(&f, 2, 0, 0).sub(&e(&f, 2, 1, 1))]));
        assert_eq!(sl_subspace(&f, 3).unwrap().dim(), 8);
        let f3 = build_field(3, 1).unwrap();
        assert_eq!(sl_subspace(&f3, 3), Err(SlError::PDividesN { p: 3, n: 3 }));
    }

    #[test]
    fn type1_examples() {
        let f = build_field(5, 1).unwrap();
        let gr = z2_elementary(&f);
        let t = type1_grading(&gr).unwrap();
        assert_eq!(t.component_or_zero(&ge(&[0])), span(&f, 2, &[e(&f, 2, 0, 0).sub(&e(&f, 2, 1, 1))]));
        assert_eq!(t.component_or_zero(&ge(&[1])), span(&f, 2, &[e(&f, 2, 0, 1), e(&f, 2, 1, 0)]));
        assert!(t.verify(Mode::Lie).unwrap().holds());

        let triv = type1_grading(&Grading::trivial(gr.group(), &f, 2)).unwrap();
        assert_eq!(triv.components().len(), 1);
        assert_eq!(triv.total_dim(), 3);

        let k4 = AbelianGroup::new(&[2, 2]).unwrap();
        let pauli = pauli_grading(&k4, &f, 2, [&ge(&[1, 0]), &ge(&[0, 1])]).unwrap();
        let t = type1_grading(&pauli).unwrap();
        assert!(t.component(&ge(&[0, 0])).is_none());
        assert_eq!(t.components().len(), 3);
        assert!(t.components().values().all(|s| s.dim() == 1));
        assert!(t.verify(Mode::Lie).unwrap().holds());
    }

    #[test]
    fn involution_examples() {
        let f = build_field(5, 1).unwrap();
        let t = Involution::transpose(&f, 2);
        assert!(t.preserves(&z2_elementary(&f)));
        let z3 = AbelianGroup::new(&[3]).unwrap();
        let gr = elementary_grading(&z3, &f, 3, &[ge(&[0]), ge(&[1]), ge(&[2])]).unwrap();
        let (deg, x) = Involution::transpose(&f, 3).preservation_witness(&gr).unwrap();
        assert_eq!((deg, x), (ge(&[1]), e(&f, 3, 0, 1)));
        assert_eq!(Involution::symplectic(&f, 4).unwrap().sign(), -1);
        assert!(Involution::symplectic(&f, 3).is_none());
        assert_eq!(Involution::new(Mat::from_ints(&f, &[&[1, 2], &[0, 1]])), Err(SlError::BadInvolution));
    }

    #[test]
    fn involutions_square_to_identity() {
        let f = build_field(7, 1).unwrap();
        for n in 2..=4 {
            let mut invs = vec![Involution::transpose(&f, n), Involution::antidiagonal(&f, n)];
            invs.extend(Involution::symplectic(&f, n));
            for inv in invs {
                for x in unit_basis(&f, n) {
                    assert_eq!(inv.apply(&inv.apply(&x)), x);
                    for y in unit_basis(&f, n) {
                        assert_eq!(inv.apply(&x.mul(&y)), inv.apply(&y).mul(&inv.apply(&x)));
                    }
                }
            }
        }
    }

    #[test]
    fn symmetric_split_examples() {
        let f = build_field(5, 1).unwrap();
        let t = Involution::transpose(&f, 2);
        let (k, h) = symmetric_split(&t, &Subspace::full(&f, 2)).unwrap();
        assert_eq!(k, span(&f, 2, &[e(&f, 2, 0, 1).sub(&e(&f, 2, 1, 0))]));
        assert_eq!(h.dim(), 3);
        let (k, h) = symmetric_split(&t, &Subspace::zero(&f, 2)).unwrap();
        assert!(k.is_zero() && h.is_zero());
        let rh = z2_elementary(&f).component_or_zero(&ge(&[1]));
        let (k, h) = symmetric_split(&t, &rh).unwrap();
        assert_eq!(k, span(&f, 2, &[e(&f, 2, 0, 1).sub(&e(&f, 2, 1, 0))]));
        assert_eq!(h, span(&f, 2, &[e(&f, 2, 0, 1).add(&e(&f, 2, 1, 0))]));
        let bad = span(&f, 2, &[e(&f, 2, 0, 1)]);
        assert!(matches!(symmetric_split(&t, &bad), Err(SlError::NotInvariant(_))));
    }

    #[test]
    fn type2_m2_example() {
        let f = build_field(5, 1).unwrap();
        let gr = z2_elementary(&f);
        let h = ge(&[1]);
        let t2 = type2_grading(&gr, &Involution::transpose(&f, 2), &h).unwrap();
        let (a, b) = (e(&f, 2, 0, 1), e(&f, 2, 1, 0));
        let d = e(&f, 2, 0, 0).sub(&e(&f, 2, 1, 1));
        assert_eq!(t2.component_or_zero(&ge(&[0])), span(&f, 2, &[a.add(&b)]));
        assert_eq!(t2.component_or_zero(&h), span(&f, 2, &[a.sub(&b), d.clone()]));
        assert!(t2.verify(Mode::Lie).unwrap().holds());
        // bracket oracle: [E12 - E21, E11 - E22] = -2 (E12 + E21)
        assert_eq!(a.sub(&b).bracket(&d), a.add(&b).scale(f.from_int(-2)));
    }

    #[test]
    fn type2_errors_and_outer_z2() {
        let f = build_field(5, 1).unwrap();
        let z4 = AbelianGroup::new(&[4]).unwrap();
        let gr = Grading::trivial(&z4, &f, 2);
        assert_eq!(
            type2_grading(&gr, &Involution::transpose(&f, 2), &ge(&[1])),
            Err(SlError::OrderNotTwo(ge(&[1])))
        );
        let z2 = AbelianGroup::new(&[2]).unwrap();
        let t2 = type2_grading(&Grading::trivial(&z2, &f, 3), &Involution::transpose(&f, 3), &ge(&[1])).unwrap();
        assert_eq!(t2.component_or_zero(&ge(&[0])).dim(), 3);
        assert_eq!(t2.component_or_zero(&ge(&[1])).dim(), 5);
        assert!(t2.verify(Mode::Lie).unwrap().holds());
    }

    #[test]
    fn exchange_m2_example() {
        let f = build_field(5, 1).unwrap();
        let rt = z2_elementary(&f);
        let h = ge(&[1]);
        let r = type2_full(&rt, &Involution::transpose(&f, 2), &h).unwrap();
        let (a, b) = (e(&f, 2, 0, 1), e(&f, 2, 1, 0));
        assert_eq!(r.component_or_zero(&ge(&[0])), span(&f, 2, &[a.add(&b)]));
        assert_eq!(r.component_or_zero(&h), span(&f, 2, &[a.sub(&b), e(&f, 2, 0, 0), e(&f, 2, 1, 1)]));
        let rep = exchange(&r, &rt, std::slice::from_ref(&h), Mode::Lie).unwrap();
        assert!(rep.holds(), "{rep:?}");
        assert_eq!(rep.family.component_or_zero(&ge(&[0])), span(&f, 2, &[a.sub(&b)]));
        assert_eq!(rep.family.component_or_zero(&h), span(&f, 2, &[e(&f, 2, 0, 0), e(&f, 2, 1, 1), a.add(&b)]));
        // H(R) is not closed under the associative product
        assert!(!exchange(&r, &rt, &[h], Mode::Associative).unwrap().holds());
    }

    #[test]
    fn exchange_degenerate_cases() {
        let f = build_field(5, 1).unwrap();
        let gr = z2_elementary(&f);
        let rep = exchange(&gr, &gr, &[ge(&[1])], Mode::Associative).unwrap();
        assert!(rep.holds());
        assert_eq!(rep.family.component_or_zero(&ge(&[0])).dim(), 4);
        assert!(rep.family.component(&ge(&[1])).is_none());
        let rep = exchange(&gr, &gr, &[], Mode::Associative).unwrap();
        assert!(rep.holds());
        assert_eq!(rep.family.components().len(), 1);
    }

    #[test]
    fn exchange_errors() {
        let f = build_field(5, 1).unwrap();
        let gr = z2_elementary(&f);
        let (u, ui) = (Mat::from_ints(&f, &[&[1, 1], &[0, 1]]), Mat::from_ints(&f, &[&[1, 4], &[0, 1]]));
        let moved = gr.conjugate(&u, &ui);
        assert!(matches!(exchange(&gr, &moved, &[ge(&[1])], Mode::Associative), Err(SlError::NotCompatible(_))));
        let triv = Grading::trivial(gr.group(), &f, 2);
        assert!(matches!(exchange(&gr, &triv, &[], Mode::Associative), Err(SlError::FactorGradingsDiffer(_))));
    }

    #[test]
    fn correction_identity_when_involutive() {
        let f = build_field(5, 1).unwrap();
        let gr = z2_elementary(&f);
        let psi = correct_antiautomorphism(&gr, Involution::transpose(&f, 2).as_anti()).unwrap();
        assert_eq!(psi, InnerAutomorphism::identity(&f, 2));
    }

    #[test]
    fn correction_search_finds_diagonal() {
        let f = build_field(5, 1).unwrap();
        let gr = z2_elementary(&f);
        let eps = f.from_int(2);
        let mut phi = Mat::zero(&f, 2);
        phi.set(0, 1, f.one());
        phi.set(1, 0, eps);
        let anti = Antiautomorphism::new(phi).unwrap();
        let psi = correct_antiautomorphism(&gr, &anti).unwrap();
        assert_ne!(psi, InnerAutomorphism::identity(&f, 2));
        assert!(correction_holds(&gr, &anti, &psi));
    }

    #[test]
    fn correction_rejects_non_preserving() {
        let f = build_field(5, 1).unwrap();
        let z3 = AbelianGroup::new(&[3]).unwrap();
        let gr = elementary_grading(&z3, &f, 2, &[ge(&[0]), ge(&[1])]).unwrap();
        assert!(matches!(
            correct_antiautomorphism(&gr, Involution::transpose(&f, 2).as_anti()),
            Err(SlError::InvolutionNotPreserving { .. })
        ));
    }

    #[test]
    fn classify_roundtrips() {
        let f = build_field(5, 1).unwrap();
        let gr = z2_elementary(&f);
        let h = ge(&[1]);
        let inv = Involution::transpose(&f, 2);
        let cands = vec![
            Candidate { assoc: Grading::trivial(gr.group(), &f, 2), twist: None },
            Candidate { assoc: gr.clone(), twist: None },
            Candidate { assoc: gr.clone(), twist: Some((inv.clone(), h.clone())) },
        ];
        assert_eq!(classify_sl_grading(&type1_grading(&gr).unwrap(), &cands), Classification::TypeI(1));
        let t2 = type2_grading(&gr, &inv, &h).unwrap();
        assert_eq!(classify_sl_grading(&t2, &cands), Classification::TypeII(2));
        assert_eq!(classify_sl_grading(&t2, &cands[..2]), Classification::Unknown);
    }

    #[test]
    fn classify_z3_by_enumeration() {
        let f = build_field(3, 1).unwrap();
        let z3 = AbelianGroup::new(&[3]).unwrap();
        let cands = elementary_candidates(&z3, &f, 2);
        assert_eq!(cands.len(), 9);
        let gr = elementary_grading(&z3, &f, 2, &[ge(&[0]), ge(&[1])]).unwrap();
        let slg = type1_grading(&gr).unwrap();
        assert_eq!(classify_sl_grading(&slg, &cands), Classification::TypeI(1));
    }

    #[test]
    fn classification_is_conjugation_invariant() {
        let f = build_field(5, 1).unwrap();
        let z4 = AbelianGroup::new(&[4]).unwrap();
        let cands = elementary_candidates(&z4, &f, 2);
        let u = Mat::from_ints(&f, &[&[1, 2], &[3, 4]]);
        let ui = u.inverse().unwrap();
        let moved: Vec<Candidate> =
            cands.iter().map(|c| Candidate { assoc: c.assoc.conjugate(&u, &ui), twist: None }).collect();
        for (i, c) in cands.iter().enumerate() {
            let slg = type1_grading(&c.assoc).unwrap();
            let a = classify_sl_grading(&slg, &cands);
            let b = classify_sl_grading(&slg.conjugate(&u, &ui), &moved);
            assert_eq!(a, b);
            assert!(matches!(a, Classification::TypeI(j) if j <= i));
        }
    }
}
