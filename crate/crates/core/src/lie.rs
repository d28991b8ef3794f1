//! Lie derivations of `M_n` and identities for the divided-power action.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::field::{FieldElem, FieldRef};
use crate::grading::{Grading, GradingError, GradingReport, Mode};
use crate::hopf::{divided_power_basis, DualElem, HopfError};
use crate::linalg::{solve, Mat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LieError {
    #[error("not a Lie derivation: fails on the pair ({x:?}, {y:?})")]
    NotLieDerivation { x: Mat, y: Mat },
    #[error("decomposition failed verification: {0}")]
    VerificationFailed(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error(transparent)]
    Grading(#[from] GradingError),
    #[error(transparent)]
    Hopf(#[from] HopfError),
}

/// A linear endomorphism of `M_n`, stored as the `n^2 x n^2` matrix whose
/// column `i*n + j` is the image of `E_ij`.
#[derive(Clone, PartialEq, Eq)]
pub struct LinMap {
    field: FieldRef,
    n: usize,
    data: Vec<FieldElem>,
}

impl std::fmt::Debug for LinMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LinMap(n = {}, images: {:?})", self.n, self.images())
    }
}

impl LinMap {
    pub fn from_fn(field: &FieldRef, n: usize, f: impl Fn(&Mat) -> Mat) -> LinMap {
        let nn = n * n;
        let mut data = vec![FieldElem::ZERO; nn * nn];
        for k in 0..nn {
            let img = f(&Mat::unit(field, n, k / n, k % n));
            for (r, &v) in img.as_slice().iter().enumerate() {
                data[r * nn + k] = v;
            }
        }
        LinMap { field: field.clone(), n, data }
    }

    pub fn zero(field: &FieldRef, n: usize) -> LinMap {
        LinMap { field: field.clone(), n, data: vec![FieldElem::ZERO; n.pow(4)] }
    }

    /// `x -> [s, x]`.
    pub fn ad(s: &Mat) -> LinMap {
        LinMap::from_fn(s.field(), s.size(), |x| s.bracket(x))
    }

    /// `x -> tr(x) 1`.
    pub fn trace_map(field: &FieldRef, n: usize) -> LinMap {
        LinMap::from_fn(field, n, |x| Mat::identity(field, n).scale(x.trace()))
    }

    pub fn transpose_map(field: &FieldRef, n: usize) -> LinMap {
        LinMap::from_fn(field, n, Mat::transpose)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn apply(&self, x: &Mat) -> Mat {
        let f = &self.field;
        let nn = self.n * self.n;
        let xs = x.as_slice();
        let out = (0..nn)
            .map(|r| {
                let row = &self.data[r * nn..(r + 1) * nn];
                row.iter().zip(xs).fold(FieldElem::ZERO, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect();
        Mat::from_vec(f, self.n, out)
    }

    /// Images of `E_11, E_12, ..., E_nn`.
    pub fn images(&self) -> Vec<Mat> {
        (0..self.n * self.n).map(|k| self.apply(&Mat::unit(&self.field, self.n, k / self.n, k % self.n))).collect()
    }

    pub fn add(&self, other: &LinMap) -> LinMap {
        let f = &self.field;
        LinMap { data: self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect(), ..self.clone() }
    }

    pub fn sub(&self, other: &LinMap) -> LinMap {
        let f = &self.field;
        LinMap { data: self.data.iter().zip(&other.data).map(|(&a, &b)| f.sub(a, b)).collect(), ..self.clone() }
    }

    pub fn scale(&self, c: FieldElem) -> LinMap {
        let f = &self.field;
        LinMap { data: self.data.iter().map(|&a| f.mul(a, c)).collect(), ..self.clone() }
    }
}

fn unit_basis(field: &FieldRef, n: usize) -> Vec<Mat> {
    (0..n * n).map(|k| Mat::unit(field, n, k / n, k % n)).collect()
}

/// First basis pair `(E_ij, E_kl)` on which `D[x,y] = [Dx,y] + [x,Dy]` fails.
pub fn lie_derivation_witness(d: &LinMap) -> Option<(Mat, Mat)> {
    let basis = unit_basis(&d.field, d.n);
    let images: Vec<Mat> = basis.iter().map(|x| d.apply(x)).collect();
    for (x, dx) in basis.iter().zip(&images) {
        for (y, dy) in basis.iter().zip(&images) {
            if d.apply(&x.bracket(y)) != dx.bracket(y).add(&x.bracket(dy)) {
                return Some((x.clone(), y.clone()));
            }
        }
    }
    None
}

pub fn is_lie_derivation(d: &LinMap) -> bool {
    lie_derivation_witness(d).is_none()
}

/// First basis pair on which `D(xy) = D(x)y + xD(y)` fails.
pub fn associative_derivation_witness(d: &LinMap) -> Option<(Mat, Mat)> {
    let basis = unit_basis(&d.field, d.n);
    let images: Vec<Mat> = basis.iter().map(|x| d.apply(x)).collect();
    for (x, dx) in basis.iter().zip(&images) {
        for (y, dy) in basis.iter().zip(&images) {
            if d.apply(&x.mul(y)) != dx.mul(y).add(&x.mul(dy)) {
                return Some((x.clone(), y.clone()));
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Martindale {
    /// An associative derivation.
    pub tau: LinMap,
    /// Central-valued, zero on commutators.
    pub zeta: LinMap,
}

/// Splits a Lie derivation `D` of `M_n` as `τ + ζ` with `ζ(x) = tr(Dx)/n · 1`.
///
/// Associative derivations of `M_n` are inner, so `tr(τ x) = 0` and the
/// central part is read off from the trace. Every claimed property of the
/// output is re-checked on all basis pairs.
pub fn martindale_decompose(d: &LinMap) -> Result<Martindale, LieError> {
    let f = &d.field;
    let n = d.n;
    let p = f.characteristic() as usize;
    if n < 2 {
        return Err(LieError::HypothesisViolated("n < 2: no nontrivial idempotent".into()));
    }
    if let Some((x, y)) = lie_derivation_witness(d) {
        return Err(LieError::NotLieDerivation { x, y });
    }
    let inv_n = f.inv(f.from_int(n as i64)).filter(|_| !n.is_multiple_of(p));
    let Some(inv_n) = inv_n else {
        return Err(LieError::VerificationFailed(format!("p = {p} divides n = {n}")));
    };
    let one = Mat::identity(f, n);
    let zeta = LinMap::from_fn(f, n, |x| one.scale(f.mul(d.apply(x).trace(), inv_n)));
    let tau = d.sub(&zeta);

    if let Some((x, y)) = associative_derivation_witness(&tau) {
        return Err(LieError::VerificationFailed(format!("τ is not a derivation on ({x:?}, {y:?})")));
    }
    let basis = unit_basis(f, n);
    for x in &basis {
        let zx = zeta.apply(x);
        if zx != one.scale(zx.get(0, 0)) {
            return Err(LieError::VerificationFailed(format!("ζ({x:?}) is not central")));
        }
        for y in &basis {
            if !zeta.apply(&x.bracket(y)).is_zero() {
                return Err(LieError::VerificationFailed(format!("ζ does not vanish on [{x:?}, {y:?}]")));
            }
        }
    }
    if tau.add(&zeta) != *d {
        return Err(LieError::VerificationFailed("τ + ζ != D".into()));
    }
    Ok(Martindale { tau, zeta })
}

/// Some `s` with `τ = ad s`, if one exists.
pub fn solve_inner(tau: &LinMap) -> Option<Mat> {
    let f = &tau.field;
    let n = tau.n;
    let basis = unit_basis(f, n);
    // column c of the system is ad(E_c) applied to each basis vector
    let ads: Vec<LinMap> = basis.iter().map(LinMap::ad).collect();
    let mut rows = Vec::with_capacity(n.pow(4));
    let mut rhs = Vec::with_capacity(n.pow(4));
    for x in &basis {
        let cols: Vec<Mat> = ads.iter().map(|a| a.apply(x)).collect();
        let target = tau.apply(x);
        for r in 0..n * n {
            rows.push(cols.iter().map(|c| c.as_slice()[r]).collect());
            rhs.push(target.as_slice()[r]);
        }
    }
    solve(f, &rows, &rhs, n * n).map(|s| Mat::from_vec(f, n, s))
}

/// Outcome of checking "a Lie grading of `M_n` by a p-group is an
/// associative grading iff `1 ∈ R_1`".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityCriterionReport {
    pub identity_in_r1: bool,
    pub associative: GradingReport,
    /// `1 ∈ R_1` but the associative check failed.
    pub falsification: bool,
    /// For `1 ∉ R_1`: the grading is not associative, or `1` is homogeneous
    /// of another degree. `None` when `1 ∈ R_1`.
    pub only_if_consistent: Option<bool>,
}

pub fn check_identity_criterion(gr: &Grading) -> Result<IdentityCriterionReport, LieError> {
    let f = gr.field();
    let p = f.characteristic();
    let n = gr.n();
    if n.is_multiple_of(p as usize) {
        return Err(LieError::HypothesisViolated(format!("p = {p} divides n = {n}")));
    }
    if !gr.group().is_p_group(p) {
        return Err(LieError::HypothesisViolated(format!("{} is not a {p}-group", gr.group())));
    }
    let lie = gr.verify(Mode::Lie)?;
    if !lie.holds() {
        return Err(LieError::HypothesisViolated("not a Lie grading".into()));
    }
    let one = Mat::identity(f, n);
    let identity_in_r1 = gr.component(&gr.group().identity()).is_some_and(|r| r.contains(&one));
    let associative = gr.verify(Mode::Associative)?;
    let (falsification, only_if_consistent) = if identity_in_r1 {
        (!associative.holds(), None)
    } else {
        let elsewhere = gr.components().values().any(|r| r.contains(&one));
        (false, Some(!associative.holds() || elsewhere))
    };
    Ok(IdentityCriterionReport { identity_in_r1, associative, falsification, only_if_consistent })
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LeibnizReport {
    pub q: usize,
    pub pairs_checked: usize,
    pub triples_checked: usize,
    /// `σ(xy)` law.
    pub associative_failures: Vec<(Mat, Mat)>,
    /// `σ[x,y]` law.
    pub lie_failures: Vec<(Mat, Mat)>,
    /// `δ^(m)(xy) = Σ (δ^(i)x)(δ^(m-i)y)` for `m < q`, as `(m, x, y)`.
    pub lower_failures: Vec<(usize, Mat, Mat)>,
    /// Three-factor laws, as `(x, y, z)`.
    pub triple_failures: Vec<(Mat, Mat, Mat)>,
}

impl LeibnizReport {
    pub fn holds(&self) -> bool {
        self.associative_failures.is_empty()
            && self.lie_failures.is_empty()
            && self.lower_failures.is_empty()
            && self.triple_failures.is_empty()
    }
}

/// Checks the twisted Leibniz rules for `σ = δ^(q)`, `q = p^{N-1}`, on a
/// grading by `Z_{p^N}`, plus the three-factor expansion on `triples`
/// seeded random triples.
pub fn generalized_leibniz_check(gr: &Grading, seed: u64, triples: usize) -> Result<LeibnizReport, LieError> {
    let f = gr.field();
    let deltas = divided_power_basis(gr.group(), f)?;
    let q = deltas.len() / f.characteristic() as usize;
    let basis: Vec<Mat> = gr.homogeneous_basis().into_iter().map(|(_, x)| x).collect();
    // acted[k][i] = δ^(k) · basis[i]
    let acted: Vec<Vec<Mat>> = deltas[..=q]
        .iter()
        .map(|d| basis.iter().map(|x| d.act(gr, x)).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()?;

    let expand = |m: usize, i: usize, j: usize, mode: Mode| -> Mat {
        (0..=m).fold(Mat::zero(f, gr.n()), |acc, k| acc.add(&mode.product(&acted[k][i], &acted[m - k][j])))
    };
    let act_ok = |d: &DualElem, x: &Mat, expect: &Mat| matches!(d.act(gr, x), Ok(ref v) if v == expect);

    let nb = basis.len();
    let pairs: Vec<(usize, usize)> = (0..nb).flat_map(|i| (0..nb).map(move |j| (i, j))).collect();
    type PairOutcome = (bool, bool, Vec<usize>);
    let outcomes: Vec<PairOutcome> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (x, y) = (&basis[i], &basis[j]);
            let sigma = &deltas[q];
            let assoc = act_ok(sigma, &x.mul(y), &expand(q, i, j, Mode::Associative));
            let lie = act_ok(sigma, &x.bracket(y), &expand(q, i, j, Mode::Lie));
            let lower = (0..q)
                .filter(|&m| !act_ok(&deltas[m], &x.mul(y), &expand(m, i, j, Mode::Associative)))
                .collect();
            (assoc, lie, lower)
        })
        .collect();

    let mut report = LeibnizReport { q, pairs_checked: pairs.len(), ..Default::default() };
    for (&(i, j), (assoc, lie, lower)) in pairs.iter().zip(outcomes) {
        let (x, y) = (&basis[i], &basis[j]);
        if !assoc {
            report.associative_failures.push((x.clone(), y.clone()));
        }
        if !lie {
            report.lie_failures.push((x.clone(), y.clone()));
        }
        for m in lower {
            report.lower_failures.push((m, x.clone(), y.clone()));
        }
    }

    // three factors: σ(xyz) = Σ_{i+j+k=q} (δ^(i)x)(δ^(j)y)(δ^(k)z), same for [[x,y],z]
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut random_elem = || {
        basis.iter().fold(Mat::zero(f, gr.n()), |acc, b| {
            acc.add(&b.scale(f.elem(rand::Rng::gen_range(&mut rng, 0..f.order()))))
        })
    };
    for _ in 0..triples {
        let (x, y, z) = (random_elem(), random_elem(), random_elem());
        let ax: Vec<Mat> = deltas[..=q].iter().map(|d| d.act(gr, &x)).collect::<Result<_, _>>()?;
        let ay: Vec<Mat> = deltas[..=q].iter().map(|d| d.act(gr, &y)).collect::<Result<_, _>>()?;
        let az: Vec<Mat> = deltas[..=q].iter().map(|d| d.act(gr, &z)).collect::<Result<_, _>>()?;
        let mut assoc = Mat::zero(f, gr.n());
        let mut lie = Mat::zero(f, gr.n());
        for i in 0..=q {
            for j in 0..=q - i {
                let k = q - i - j;
                assoc = assoc.add(&ax[i].mul(&ay[j]).mul(&az[k]));
                lie = lie.add(&ax[i].bracket(&ay[j]).bracket(&az[k]));
            }
        }
        let sigma = &deltas[q];
        let ok = act_ok(sigma, &x.mul(&y).mul(&z), &assoc) && act_ok(sigma, &x.bracket(&y).bracket(&z), &lie);
        if !ok {
            report.triple_failures.push((x, y, z));
        }
        report.triples_checked += 1;
    }
    Ok(report)
}

/// `δ^(m) · e = 0` for `1 <= m < q`.
pub fn idempotent_invariant(gr: &Grading, e: &Mat) -> Result<bool, LieError> {
    let f = gr.field();
    let deltas = divided_power_basis(gr.group(), f)?;
    let q = deltas.len() / f.characteristic() as usize;
    for d in &deltas[1..q] {
        if !d.act(gr, e)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_field;
    use crate::grading::elementary_grading;
    use crate::group::{AbelianGroup, GroupElem};

    fn ge(e: &[u32]) -> GroupElem {
        GroupElem(e.to_vec())
    }

    #[test]
    fn lie_derivation_examples() {
        let f = build_field(5, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = Mat::random(&f, 3, &mut rng);
        assert!(is_lie_derivation(&LinMap::ad(&s)));
        assert!(is_lie_derivation(&LinMap::trace_map(&f, 3)));
        assert!(associative_derivation_witness(&LinMap::trace_map(&f, 3)).is_some());
        let t = LinMap::transpose_map(&f, 2);
        assert!(lie_derivation_witness(&t).is_some());
        // on (E12, E21): T[E12,E21] = E11 - E22, [E21,E21] + [E12,E12] = 0
        let (x, y) = (Mat::unit(&f, 2, 0, 1), Mat::unit(&f, 2, 1, 0));
        assert_ne!(t.apply(&x.bracket(&y)), t.apply(&x).bracket(&y).add(&x.bracket(&t.apply(&y))));
    }

    #[test]
    fn martindale_examples() {
        let f = build_field(5, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = Mat::random(&f, 3, &mut rng);
        let ad = LinMap::ad(&s);
        let m = martindale_decompose(&ad).unwrap();
        assert_eq!(m.tau, ad);
        assert_eq!(m.zeta, LinMap::zero(&f, 3));

        let lam = f.from_int(3);
        let d = ad.add(&LinMap::trace_map(&f, 3).scale(lam));
        let m = martindale_decompose(&d).unwrap();
        assert_eq!(m.tau, ad);
        assert_eq!(m.zeta, LinMap::trace_map(&f, 3).scale(lam));
        let s2 = solve_inner(&m.tau).unwrap();
        assert_eq!(LinMap::ad(&s2), ad);

        let z = martindale_decompose(&LinMap::zero(&f, 2)).unwrap();
        assert_eq!(z.tau, LinMap::zero(&f, 2));

        assert!(matches!(
            martindale_decompose(&LinMap::transpose_map(&f, 2)),
            Err(LieError::NotLieDerivation { .. })
        ));
    }

    #[test]
    fn martindale_rejects_p_dividing_n() {
        let f = build_field(3, 1).unwrap();
        let d = LinMap::trace_map(&f, 3);
        assert!(matches!(martindale_decompose(&d), Err(LieError::VerificationFailed(_))));
    }

    #[test]
    fn transpose_is_not_inner() {
        let f = build_field(5, 1).unwrap();
        assert!(solve_inner(&LinMap::transpose_map(&f, 2)).is_none());
        assert!(solve_inner(&LinMap::trace_map(&f, 2)).is_none());
    }

    #[test]
    fn identity_criterion_on_z9_elementary() {
        let f = build_field(3, 1).unwrap();
        let z9 = AbelianGroup::new(&[9]).unwrap();
        let gr = elementary_grading(&z9, &f, 2, &[ge(&[0]), ge(&[1])]).unwrap();
        let rep = check_identity_criterion(&gr).unwrap();
        assert!(rep.identity_in_r1 && !rep.falsification && rep.associative.holds());

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (u, ui) = Mat::random_invertible(&f, 2, &mut rng);
        let rep = check_identity_criterion(&gr.conjugate(&u, &ui)).unwrap();
        assert!(rep.identity_in_r1 && !rep.falsification);
    }

    #[test]
    fn identity_criterion_only_if_direction() {
        // Lie grading of M_2 by Z_3 with the center moved to degree a:
        // [1, x] = 0 keeps it a Lie grading, but it is not associative.
        let f = build_field(3, 1).unwrap();
        let z3 = AbelianGroup::new(&[3]).unwrap();
        let n = 2;
        let span = |ms: &[Mat]| crate::linalg::Subspace::span(&f, n, ms);
        let comps = vec![
            (ge(&[0]), span(&[Mat::unit(&f, 2, 0, 0).sub(&Mat::unit(&f, 2, 1, 1))])),
            (ge(&[1]), span(&[Mat::unit(&f, 2, 0, 1), Mat::identity(&f, 2)])),
            (ge(&[2]), span(&[Mat::unit(&f, 2, 1, 0)])),
        ];
        let gr = Grading::new(&z3, &f, n, crate::grading::Ambient::Full, comps).unwrap();
        assert!(gr.verify(Mode::Lie).unwrap().holds());
        let rep = check_identity_criterion(&gr).unwrap();
        assert!(!rep.identity_in_r1);
        assert_eq!(rep.only_if_consistent, Some(true));
        assert!(!rep.associative.holds());
    }

    #[test]
    fn identity_criterion_hypotheses() {
        let f = build_field(3, 1).unwrap();
        let z2 = AbelianGroup::new(&[2]).unwrap();
        let gr = elementary_grading(&z2, &f, 2, &[ge(&[0]), ge(&[1])]).unwrap();
        assert!(matches!(check_identity_criterion(&gr), Err(LieError::HypothesisViolated(_))));
        let z3 = AbelianGroup::new(&[3]).unwrap();
        let gr = elementary_grading(&z3, &f, 3, &[ge(&[0]), ge(&[1]), ge(&[2])]).unwrap();
        assert!(matches!(check_identity_criterion(&gr), Err(LieError::HypothesisViolated(_))));
    }

    #[test]
    fn leibniz_on_z9() {
        let f = build_field(3, 1).unwrap();
        let z9 = AbelianGroup::new(&[9]).unwrap();
        let gr = elementary_grading(&z9, &f, 2, &[ge(&[0]), ge(&[1])]).unwrap();
        let rep = generalized_leibniz_check(&gr, 0, 50).unwrap();
        assert_eq!(rep.q, 3);
        assert!(rep.holds(), "{rep:?}");
        assert!(idempotent_invariant(&gr, &Mat::unit(&f, 2, 0, 0)).unwrap());
    }

    #[test]
    fn leibniz_degenerates_for_prime_order() {
        let f = build_field(5, 1).unwrap();
        let z5 = AbelianGroup::new(&[5]).unwrap();
        let gr = elementary_grading(&z5, &f, 3, &[ge(&[0]), ge(&[2]), ge(&[3])]).unwrap();
        let rep = generalized_leibniz_check(&gr, 1, 10).unwrap();
        assert_eq!(rep.q, 1);
        assert!(rep.holds());
    }

    #[test]
    fn leibniz_detects_corruption() {
        let f = build_field(3, 1).unwrap();
        let z9 = AbelianGroup::new(&[9]).unwrap();
        let gr = elementary_grading(&z9, &f, 2, &[ge(&[0]), ge(&[1])]).unwrap();
        let comps = gr.components().iter().map(|(g, s)| {
            let g = if *g == ge(&[8]) { ge(&[7]) } else { g.clone() };
            (g, s.clone())
        });
        let bad = Grading::from_components(&z9, &f, 2, gr.ambient(), comps).unwrap();
        assert!(!generalized_leibniz_check(&bad, 0, 5).unwrap().holds());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]
        #[test]
        fn martindale_recomposes(seed in 0u64..1000, n in 2usize..4, lam in 0i64..5) {
            let f = build_field(5, 1).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = Mat::random(&f, n, &mut rng);
            let d = LinMap::ad(&s).add(&LinMap::trace_map(&f, n).scale(f.from_int(lam)));
            let m = martindale_decompose(&d).unwrap();
            proptest::prop_assert_eq!(m.tau.add(&m.zeta), d);
            let s2 = solve_inner(&m.tau).unwrap();
            proptest::prop_assert_eq!(LinMap::ad(&s2), m.tau);
        }
    }
}
