//! The dual Hopf algebra `K = (FG)^*` and its action on graded matrix algebras.
//!
//! Elements are stored in the basis `{e_g}` dual to the group basis, i.e. as
//! functions `G -> F`. In this basis the product is pointwise and
//! `Δ(e_g) = Σ_{g'g''=g} e_{g'} ⊗ e_{g''}`. A grading makes `M_n` a
//! `K`-module algebra through `f · x = Σ_g f(g) x_g`.

use rayon::prelude::*;
use thiserror::Error;

use crate::field::{binom_mod_p, FieldElem, FieldRef};
use crate::grading::{Grading, GradingError, Mode};
use crate::group::{AbelianGroup, AddCharacter, GroupElem, MultCharacter};
use crate::linalg::{null_space, Mat, Subspace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HopfError {
    #[error("operands live over different groups or fields")]
    Mismatch,
    #[error("group {0} is not cyclic of order a power of the characteristic")]
    GroupNotCyclicPPower(String),
    #[error(transparent)]
    Grading(#[from] GradingError),
}

/// An element of `K`, as its coefficients on `{e_g}` in group enumeration order.
#[derive(Clone, PartialEq, Eq)]
pub struct DualElem {
    group: AbelianGroup,
    field: FieldRef,
    coeffs: Vec<FieldElem>,
}

impl std::fmt::Debug for DualElem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let c: Vec<String> = self.coeffs.iter().map(|&c| self.field.display(c)).collect();
        write!(f, "DualElem({}: {:?})", self.group, c)
    }
}

impl DualElem {
    pub fn zero(group: &AbelianGroup, field: &FieldRef) -> DualElem {
        DualElem { group: group.clone(), field: field.clone(), coeffs: vec![FieldElem::ZERO; group.order()] }
    }

    /// `Σ_g e_g`.
    pub fn unit(group: &AbelianGroup, field: &FieldRef) -> DualElem {
        DualElem { group: group.clone(), field: field.clone(), coeffs: vec![FieldElem::ONE; group.order()] }
    }

    /// The dual basis element `e_g`.
    pub fn basis(group: &AbelianGroup, field: &FieldRef, g: &GroupElem) -> DualElem {
        let mut e = DualElem::zero(group, field);
        e.coeffs[group.index(g)] = FieldElem::ONE;
        e
    }

    pub fn from_fn(group: &AbelianGroup, field: &FieldRef, f: impl Fn(&GroupElem) -> FieldElem) -> DualElem {
        DualElem { group: group.clone(), field: field.clone(), coeffs: group.elements().map(|g| f(&g)).collect() }
    }

    pub fn from_coeffs(group: &AbelianGroup, field: &FieldRef, coeffs: Vec<FieldElem>) -> DualElem {
        assert_eq!(coeffs.len(), group.order());
        DualElem { group: group.clone(), field: field.clone(), coeffs }
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    /// `f(g)`, the coefficient on `e_g`.
    pub fn value(&self, g: &GroupElem) -> FieldElem {
        self.coeffs[self.group.index(g)]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn compatible(&self, other: &DualElem) -> Result<(), HopfError> {
        if self.group != other.group || *self.field != *other.field {
            return Err(HopfError::Mismatch);
        }
        Ok(())
    }

    /// Pointwise product: `e_{g'} e_{g''} = δ_{g',g''} e_{g'}`.
    pub fn product(&self, other: &DualElem) -> Result<DualElem, HopfError> {
        self.compatible(other)?;
        let f = &self.field;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| f.mul(a, b)).collect();
        Ok(DualElem { coeffs, ..self.clone() })
    }

    pub fn add(&self, other: &DualElem) -> Result<DualElem, HopfError> {
        self.compatible(other)?;
        let f = &self.field;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(DualElem { coeffs, ..self.clone() })
    }

    pub fn scale(&self, c: FieldElem) -> DualElem {
        let f = &self.field;
        DualElem { coeffs: self.coeffs.iter().map(|&a| f.mul(a, c)).collect(), ..self.clone() }
    }

    pub fn pow(&self, e: u64) -> DualElem {
        let f = &self.field;
        DualElem { coeffs: self.coeffs.iter().map(|&a| f.pow(a, e)).collect(), ..self.clone() }
    }

    /// `Δf`, assembled term by term from `Δ(e_g) = Σ_{g'g''=g} e_{g'} ⊗ e_{g''}`.
    pub fn coproduct(&self) -> DualTensor {
        let g = &self.group;
        let f = &self.field;
        let order = g.order();
        let mut t = DualTensor::zero(g, f, 2);
        for (gi, &c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let target = g.element(gi);
            for a in g.elements() {
                let b = g.mul(&g.inv(&a), &target);
                let slot = &mut t.coeffs[g.index(&a) * order + g.index(&b)];
                *slot = f.add(*slot, c);
            }
        }
        t
    }

    /// `ε(f) = f(1)`.
    pub fn counit(&self) -> FieldElem {
        self.value(&self.group.identity())
    }

    /// `S(e_g) = e_{g^{-1}}`.
    pub fn antipode(&self) -> DualElem {
        let g = &self.group;
        DualElem::from_fn(g, &self.field, |x| self.value(&g.inv(x)))
    }

    /// `Δf = f ⊗ f` and `f != 0`.
    pub fn is_grouplike(&self) -> bool {
        !self.is_zero() && self.coproduct() == DualTensor::outer(&[self, self])
    }

    /// `Δf = f ⊗ 1 + 1 ⊗ f`.
    pub fn is_primitive(&self) -> bool {
        let one = DualElem::unit(&self.group, &self.field);
        let rhs = DualTensor::outer(&[self, &one]).add(&DualTensor::outer(&[&one, self]));
        self.coproduct() == rhs
    }

    /// Coordinates in the divided-power basis of a cyclic p-group, by forward
    /// substitution in the unitriangular system `f(a^s) = Σ_m c_m C(s, m)`.
    pub fn divided_power_coordinates(&self) -> Result<Vec<FieldElem>, HopfError> {
        let p = cyclic_p_power(&self.group, &self.field)?;
        let f = &self.field;
        let order = self.group.order();
        let mut c = vec![FieldElem::ZERO; order];
        for s in 0..order {
            let mut v = self.coeffs[s];
            for (m, &cm) in c.iter().enumerate().take(s) {
                let b = binom_mod_p(s as u64, m as u64, p as u64);
                if b != 0 {
                    v = f.sub(v, f.mul(cm, f.from_int(b as i64)));
                }
            }
            c[s] = v;
        }
        Ok(c)
    }

    /// `f · x = Σ_g f(g) x_g`.
    pub fn act(&self, gr: &Grading, x: &Mat) -> Result<Mat, HopfError> {
        if self.group != *gr.group() {
            return Err(HopfError::Mismatch);
        }
        let f = &self.field;
        let mut out = Mat::zero(f, x.size());
        for (g, part) in gr.split(x)? {
            out = out.add(&part.scale(self.value(&g)));
        }
        Ok(out)
    }
}

/// An element of `K^{⊗ arity}` in the basis `e_{g_1} ⊗ ... ⊗ e_{g_arity}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DualTensor {
    group: AbelianGroup,
    field: FieldRef,
    arity: usize,
    coeffs: Vec<FieldElem>,
}

impl DualTensor {
    pub fn zero(group: &AbelianGroup, field: &FieldRef, arity: usize) -> DualTensor {
        let len = group.order().pow(arity as u32);
        DualTensor { group: group.clone(), field: field.clone(), arity, coeffs: vec![FieldElem::ZERO; len] }
    }

    pub fn outer(factors: &[&DualElem]) -> DualTensor {
        let g = &factors[0].group;
        let f = &factors[0].field;
        let mut coeffs = vec![FieldElem::ONE];
        for x in factors {
            coeffs = coeffs.iter().flat_map(|&a| x.coeffs.iter().map(move |&b| f.mul(a, b))).collect();
        }
        DualTensor { group: g.clone(), field: f.clone(), arity: factors.len(), coeffs }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Coefficient on `e_{g_1} ⊗ ... ⊗ e_{g_arity}`.
    pub fn value(&self, degrees: &[GroupElem]) -> FieldElem {
        self.coeffs[self.flat(&degrees.iter().map(|d| self.group.index(d)).collect::<Vec<_>>())]
    }

    fn flat(&self, idx: &[usize]) -> usize {
        let order = self.group.order();
        idx.iter().fold(0, |acc, &i| acc * order + i)
    }

    fn unflat(&self, mut k: usize, arity: usize) -> Vec<usize> {
        let order = self.group.order();
        let mut out = vec![0; arity];
        for slot in out.iter_mut().rev() {
            *slot = k % order;
            k /= order;
        }
        out
    }

    pub fn add(&self, other: &DualTensor) -> DualTensor {
        let f = &self.field;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| f.add(a, b)).collect();
        DualTensor { coeffs, ..self.clone() }
    }

    /// Tensor built from an index function over `G^arity`.
    fn build(&self, arity: usize, value: impl Fn(&[usize]) -> FieldElem) -> DualTensor {
        let len = self.group.order().pow(arity as u32);
        let mut t = DualTensor { arity, coeffs: Vec::with_capacity(len), ..self.clone() };
        for k in 0..len {
            let idx = t.unflat(k, arity);
            t.coeffs.push(value(&idx));
        }
        t
    }

    /// Applies `Δ` to tensor factor `slot`.
    pub fn coproduct_at(&self, slot: usize) -> DualTensor {
        let g = &self.group;
        self.build(self.arity + 1, |idx| {
            let ab = g.mul(&g.element(idx[slot]), &g.element(idx[slot + 1]));
            let mut old: Vec<usize> = idx[..slot].to_vec();
            old.push(g.index(&ab));
            old.extend_from_slice(&idx[slot + 2..]);
            self.coeffs[self.flat(&old)]
        })
    }

    /// Applies `ε` to tensor factor `slot`.
    pub fn counit_at(&self, slot: usize) -> DualTensor {
        let id = self.group.index(&self.group.identity());
        self.build(self.arity - 1, |idx| {
            let mut old = idx[..slot].to_vec();
            old.push(id);
            old.extend_from_slice(&idx[slot..]);
            self.coeffs[self.flat(&old)]
        })
    }

    /// Applies `S` to tensor factor `slot`.
    pub fn antipode_at(&self, slot: usize) -> DualTensor {
        let g = &self.group;
        self.build(self.arity, |idx| {
            let mut old = idx.to_vec();
            old[slot] = g.index(&g.inv(&g.element(idx[slot])));
            self.coeffs[self.flat(&old)]
        })
    }

    /// Multiplies factors `slot` and `slot + 1`.
    pub fn multiply_at(&self, slot: usize) -> DualTensor {
        self.build(self.arity - 1, |idx| {
            let mut old = idx[..=slot].to_vec();
            old.push(idx[slot]);
            old.extend_from_slice(&idx[slot + 1..]);
            self.coeffs[self.flat(&old)]
        })
    }

    /// Pointwise product of two tensors of equal arity (the algebra `K ⊗ K`).
    pub fn product(&self, other: &DualTensor) -> DualTensor {
        let f = &self.field;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| f.mul(a, b)).collect();
        DualTensor { coeffs, ..self.clone() }
    }

    pub fn into_elem(self) -> DualElem {
        assert_eq!(self.arity, 1);
        DualElem { group: self.group, field: self.field, coeffs: self.coeffs }
    }
}

/// `χ~ = Σ_g χ(g) e_g`.
pub fn lift_mult_char(chi: &MultCharacter, field: &FieldRef) -> DualElem {
    DualElem::from_coeffs(&chi.group, field, chi.values.clone())
}

/// `α~ = Σ_g α(g) e_g`.
pub fn lift_add_char(alpha: &AddCharacter, field: &FieldRef) -> DualElem {
    DualElem::from_coeffs(&alpha.group, field, alpha.values.iter().map(|&v| field.from_int(v as i64)).collect())
}

/// `N` with `|G| = p^N` for cyclic `G`; errors otherwise.
fn cyclic_p_power(group: &AbelianGroup, field: &FieldRef) -> Result<u32, HopfError> {
    let p = field.characteristic();
    let ok = group.rank() == 1 && group.is_p_group(p);
    if !ok {
        return Err(HopfError::GroupNotCyclicPPower(group.to_string()));
    }
    Ok(p)
}

/// `δ^(m) = Σ_s C(s, m) e_{a^s}` for `m < |G|`, `G = <a>` cyclic of order `p^N`.
///
/// This is the basis dual to `{ξ^m}` where `ξ = a - 1`, because
/// `a^s = (1 + ξ)^s = Σ_m C(s, m) ξ^m`.
pub fn divided_power_basis(group: &AbelianGroup, field: &FieldRef) -> Result<Vec<DualElem>, HopfError> {
    let p = cyclic_p_power(group, field)? as u64;
    let order = group.order();
    Ok((0..order)
        .map(|m| {
            let coeffs = (0..order).map(|s| field.from_int(binom_mod_p(s as u64, m as u64, p) as i64)).collect();
            DualElem::from_coeffs(group, field, coeffs)
        })
        .collect())
}

/// Divided powers over `Z_{p^N}` with `p` the field characteristic.
pub fn divided_powers(exponent: u32, field: &FieldRef) -> Result<(AbelianGroup, Vec<DualElem>), HopfError> {
    let p = field.characteristic();
    let group = AbelianGroup::cyclic(p.pow(exponent)).map_err(GradingError::from)?;
    let basis = divided_power_basis(&group, field)?;
    Ok((group, basis))
}

/// Generators of `K_1 = (F G_1)^*` inflated to `G`: for each cyclic p-power
/// factor `Z_{p^N}` of `G_1`, the divided powers `δ^(p^k)`, `k < N`, read off
/// that factor's coordinate. Labels are `(factor, p^k)`.
pub fn p_part_generators(group: &AbelianGroup, field: &FieldRef) -> Vec<((usize, u64), DualElem)> {
    let p = field.characteristic() as u64;
    let dec = group.decompose_by_p(p as u32);
    let splits: Vec<GroupElem> = group.elements().map(|g| dec.split(&g).1).collect();
    let mut out = Vec::new();
    for (i, &d) in dec.g1.orders().iter().enumerate() {
        let mut pk = 1u64;
        while pk < d as u64 {
            let coeffs = splits
                .iter()
                .map(|g1| field.from_int(binom_mod_p(g1.0[i] as u64, pk, p) as i64))
                .collect();
            out.push(((i, pk), DualElem::from_coeffs(group, field, coeffs)));
            pk *= p;
        }
    }
    out
}

/// The lifted multiplicative characters together with the p-part generators;
/// together they generate `K` as an algebra.
pub fn module_generators(group: &AbelianGroup, field: &FieldRef) -> Result<Vec<DualElem>, HopfError> {
    let chars = group.multiplicative_characters(field).map_err(GradingError::from)?;
    let mut gens: Vec<DualElem> = chars.iter().map(|c| lift_mult_char(c, field)).collect();
    gens.extend(p_part_generators(group, field).into_iter().map(|(_, d)| d));
    Ok(gens)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleViolation {
    pub generator: usize,
    pub x: Mat,
    pub y: Mat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleAlgebraReport {
    pub mode: Mode,
    pub checks: usize,
    pub violations: Vec<ModuleViolation>,
}

impl ModuleAlgebraReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `f · (x y) = Σ_{g',g''} f(g'g'') (e_{g'} · x)(e_{g''} · y)` for every
/// generator `f` and every pair of homogeneous basis elements.
pub fn verify_module_algebra(
    gr: &Grading,
    mode: Mode,
    generators: &[DualElem],
) -> Result<ModuleAlgebraReport, HopfError> {
    if generators.iter().any(|f| f.group != *gr.group()) {
        return Err(HopfError::Mismatch);
    }
    let g = gr.group();
    let basis = gr.homogeneous_basis();
    let split: Vec<Vec<(GroupElem, Mat)>> =
        basis.iter().map(|(_, x)| gr.split(x)).collect::<Result<_, _>>()?;
    let nb = basis.len();
    let jobs: Vec<(usize, usize, usize)> = (0..generators.len())
        .flat_map(|k| (0..nb).flat_map(move |i| (0..nb).map(move |j| (k, i, j))))
        .collect();
    let violations: Vec<ModuleViolation> = jobs
        .par_iter()
        .filter_map(|&(k, i, j)| {
            let f = &generators[k];
            let (x, y) = (&basis[i].1, &basis[j].1);
            let lhs = f.act(gr, &mode.product(x, y));
            let mut rhs = Mat::zero(gr.field(), gr.n());
            for (a, xa) in &split[i] {
                for (b, yb) in &split[j] {
                    let c = f.value(&g.mul(a, b));
                    if !c.is_zero() {
                        rhs = rhs.add(&mode.product(xa, yb).scale(c));
                    }
                }
            }
            let ok = matches!(lhs, Ok(ref l) if *l == rhs);
            (!ok).then(|| ModuleViolation { generator: k, x: x.clone(), y: y.clone() })
        })
        .collect();
    Ok(ModuleAlgebraReport { mode, checks: jobs.len(), violations })
}

/// `ρ(x) = Σ_g x_g ⊗ g`, as the list of nonzero `(x_g, g)`.
pub fn comodule_map(gr: &Grading, x: &Mat) -> Result<Vec<(Mat, GroupElem)>, HopfError> {
    Ok(gr.split(x)?.into_iter().map(|(g, m)| (m, g)).collect())
}

/// `(ρ ⊗ id) ρ (x) = (id ⊗ Δ) ρ (x)` in `A ⊗ FG ⊗ FG`, both sides
/// tabulated as maps `(g, h) -> A`.
pub fn comodule_coassociative(gr: &Grading, x: &Mat) -> Result<bool, HopfError> {
    let mut lhs = std::collections::BTreeMap::new();
    for (xg, deg) in comodule_map(gr, x)? {
        for (xgg, deg2) in comodule_map(gr, &xg)? {
            lhs.insert((deg2, deg.clone()), xgg);
        }
    }
    let mut rhs = std::collections::BTreeMap::new();
    for (xg, deg) in comodule_map(gr, x)? {
        // Δ(g) = g ⊗ g in FG
        rhs.insert((deg.clone(), deg), xg);
    }
    Ok(lhs == rhs)
}

/// `V` is stable under every `e_g`.
pub fn is_k_submodule(gr: &Grading, v: &Subspace) -> Result<bool, HopfError> {
    let f = gr.field();
    for g in gr.group().elements() {
        let e = DualElem::basis(gr.group(), f, &g);
        for b in v.basis() {
            if !v.contains(&e.act(gr, &b)?) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `V = ⊕_g (V ∩ R_g)`.
pub fn is_graded_subspace(gr: &Grading, v: &Subspace) -> bool {
    let covered: usize = gr.components().values().map(|r| r.intersect(v).dim()).sum();
    covered == v.dim()
}

/// Recovers the grading from the action: `R_g = e_g · (graded space)`.
pub fn regrade_from_action(gr: &Grading) -> Result<Grading, HopfError> {
    let f = gr.field();
    let space = gr.components().values().fold(Subspace::zero(f, gr.n()), |acc, s| acc.sum(s));
    let basis = space.basis();
    let mut comps = Vec::new();
    for g in gr.group().elements() {
        let e = DualElem::basis(gr.group(), f, &g);
        let imgs: Vec<Mat> = basis.iter().map(|b| e.act(gr, b)).collect::<Result<_, _>>()?;
        comps.push((g, Subspace::span(f, gr.n(), &imgs)));
    }
    Ok(Grading::from_components(gr.group(), f, gr.n(), gr.ambient(), comps)?)
}

/// Counts group-like elements of `K` by brute force: every assignment of
/// `d_i`-th roots of unity to the factor generators is lifted to a function
/// on `G` and tested with the coproduct.
pub fn grouplike_census(group: &AbelianGroup, field: &FieldRef) -> usize {
    let choices: Vec<Vec<FieldElem>> =
        group.orders().iter().map(|&d| field.roots_of_unity(d as u64)).collect();
    let mut count = 0;
    let mut pick = vec![0usize; choices.len()];
    loop {
        let f = DualElem::from_fn(group, field, |g| {
            g.0.iter().zip(&pick).zip(&choices).fold(field.one(), |acc, ((&e, &k), roots)| {
                field.mul(acc, field.pow(roots[k], e as u64))
            })
        });
        if f.is_grouplike() {
            count += 1;
        }
        // odometer
        let mut i = 0;
        loop {
            if i == pick.len() {
                return count;
            }
            pick[i] += 1;
            if pick[i] < choices[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

/// Dimension of the space of primitive elements, from the linear system
/// `f(gh) - f(g) - f(h) = 0`.
pub fn primitive_space_dim(group: &AbelianGroup, field: &FieldRef) -> usize {
    let order = group.order();
    let mut rows = Vec::with_capacity(order * order);
    for a in group.elements() {
        for b in group.elements() {
            let mut row = vec![FieldElem::ZERO; order];
            let (ia, ib, iab) = (group.index(&a), group.index(&b), group.index(&group.mul(&a, &b)));
            row[iab] = field.add(row[iab], field.one());
            row[ia] = field.sub(row[ia], field.one());
            row[ib] = field.sub(row[ib], field.one());
            rows.push(row);
        }
    }
    null_space(field, &rows, order).len()
}

/// Outcome of the exhaustive Hopf-axiom check on the `e`-basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HopfAxioms {
    pub associativity: bool,
    pub unit: bool,
    pub coassociativity: bool,
    pub counit: bool,
    pub antipode: bool,
    pub multiplicative_coproduct: bool,
}

impl HopfAxioms {
    pub fn all(&self) -> bool {
        self.associativity
            && self.unit
            && self.coassociativity
            && self.counit
            && self.antipode
            && self.multiplicative_coproduct
    }
}

pub fn check_hopf_axioms(group: &AbelianGroup, field: &FieldRef) -> HopfAxioms {
    let es: Vec<DualElem> = group.elements().map(|g| DualElem::basis(group, field, &g)).collect();
    let one = DualElem::unit(group, field);
    let prod = |a: &DualElem, b: &DualElem| a.product(b).expect("same group");

    let associativity = es.iter().all(|a| {
        es.iter().all(|b| es.iter().all(|c| prod(&prod(a, b), c) == prod(a, &prod(b, c))))
    });
    let unit = es.iter().all(|a| prod(&one, a) == *a && prod(a, &one) == *a);
    let coproducts: Vec<DualTensor> = es.iter().map(DualElem::coproduct).collect();
    let coassociativity = coproducts.iter().all(|d| d.coproduct_at(0) == d.coproduct_at(1));
    let counit = es
        .iter()
        .zip(&coproducts)
        .all(|(e, d)| d.counit_at(0).into_elem() == *e && d.counit_at(1).into_elem() == *e);
    let antipode = es.iter().zip(&coproducts).all(|(e, d)| {
        let expect = one.scale(e.counit());
        d.antipode_at(0).multiply_at(0).into_elem() == expect
            && d.antipode_at(1).multiply_at(0).into_elem() == expect
    });
    let multiplicative_coproduct = es.iter().zip(&coproducts).all(|(a, da)| {
        es.iter().zip(&coproducts).all(|(b, db)| prod(a, b).coproduct() == da.product(db))
    });
    HopfAxioms { associativity, unit, coassociativity, counit, antipode, multiplicative_coproduct }
}
