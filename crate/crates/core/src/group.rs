//! Finite abelian groups in factored form `Z_{d_1} x ... x Z_{d_r}`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{build_field, lcm, min_ext_degree, FieldElem, FieldError, FieldRef};
use crate::snf::smith_normal_form;

/// Groups larger than this are rejected; every verification enumerates G.
pub const GROUP_CAP: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("cyclic factor order {0} must be at least 2")]
    BadOrder(u32),
    #[error("group order {0} exceeds the cap of {GROUP_CAP}")]
    CapExceeded(u64),
    #[error("{elem} is not an element of {group}")]
    NotAnElement { elem: String, group: String },
    #[error("field has too few roots of unity for the characters of a group of exponent {exponent}")]
    InsufficientRoots { exponent: u64 },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Exponent tuple of a group element, reduced in each coordinate.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElem(pub Vec<u32>);

impl GroupElem {
    pub fn exps(&self) -> &[u32] {
        &self.0
    }
}

impl fmt::Debug for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelianGroup {
    orders: Vec<u32>,
}

impl fmt::Debug for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.orders.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.orders.iter().map(|d| format!("Z{d}")).collect();
        write!(f, "{}", parts.join("x"))
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl AbelianGroup {
    pub fn new(orders: &[u32]) -> Result<Self, GroupError> {
        if let Some(&d) = orders.iter().find(|&&d| d < 2) {
            return Err(GroupError::BadOrder(d));
        }
        let order = orders.iter().try_fold(1u64, |acc, &d| {
            let next = acc * d as u64;
            (next <= GROUP_CAP).then_some(next).ok_or(next)
        });
        if let Err(o) = order {
            return Err(GroupError::CapExceeded(o));
        }
        Ok(AbelianGroup { orders: orders.to_vec() })
    }

    pub fn trivial() -> Self {
        AbelianGroup { orders: Vec::new() }
    }

    pub fn cyclic(d: u32) -> Result<Self, GroupError> {
        Self::new(&[d])
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn order(&self) -> usize {
        self.orders.iter().map(|&d| d as usize).product()
    }

    pub fn exponent(&self) -> u64 {
        self.orders.iter().fold(1, |acc, &d| lcm(acc, d as u64))
    }

    pub fn identity(&self) -> GroupElem {
        GroupElem(vec![0; self.orders.len()])
    }

    /// The generator of the `i`-th cyclic factor.
    pub fn generator(&self, i: usize) -> GroupElem {
        let mut e = vec![0; self.orders.len()];
        e[i] = 1 % self.orders[i];
        GroupElem(e)
    }

    pub fn elem(&self, exps: &[i64]) -> Result<GroupElem, GroupError> {
        if exps.len() != self.orders.len() {
            return Err(GroupError::NotAnElement { elem: format!("{exps:?}"), group: format!("{self}") });
        }
        Ok(GroupElem(
            exps.iter().zip(&self.orders).map(|(&e, &d)| e.rem_euclid(d as i64) as u32).collect(),
        ))
    }

    pub fn contains(&self, g: &GroupElem) -> bool {
        g.0.len() == self.orders.len() && g.0.iter().zip(&self.orders).all(|(e, d)| e < d)
    }

    pub fn check(&self, g: &GroupElem) -> Result<(), GroupError> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(GroupError::NotAnElement { elem: format!("{g}"), group: format!("{self}") })
        }
    }

    pub fn mul(&self, a: &GroupElem, b: &GroupElem) -> GroupElem {
        GroupElem(
            a.0.iter().zip(&b.0).zip(&self.orders).map(|((x, y), d)| (x + y) % d).collect(),
        )
    }

    pub fn inv(&self, a: &GroupElem) -> GroupElem {
        GroupElem(a.0.iter().zip(&self.orders).map(|(x, d)| (d - x) % d).collect())
    }

    pub fn pow(&self, a: &GroupElem, e: i64) -> GroupElem {
        GroupElem(
            a.0.iter()
                .zip(&self.orders)
                .map(|(&x, &d)| ((x as i64 * e).rem_euclid(d as i64)) as u32)
                .collect(),
        )
    }

    pub fn elem_order(&self, a: &GroupElem) -> u64 {
        a.0.iter()
            .zip(&self.orders)
            .map(|(&x, &d)| d as u64 / crate::field::gcd(x as u64, d as u64))
            .fold(1, lcm)
    }

    /// Position in the lexicographic enumeration (last coordinate fastest).
    pub fn index(&self, g: &GroupElem) -> usize {
        g.0.iter().zip(&self.orders).fold(0, |acc, (&e, &d)| acc * d as usize + e as usize)
    }

    pub fn element(&self, mut idx: usize) -> GroupElem {
        let mut e = vec![0; self.orders.len()];
        for (slot, &d) in e.iter_mut().zip(&self.orders).rev() {
            *slot = (idx % d as usize) as u32;
            idx /= d as usize;
        }
        GroupElem(e)
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElem> + '_ {
        (0..self.order()).map(|i| self.element(i))
    }

    pub fn is_p_group(&self, p: u32) -> bool {
        self.orders.iter().all(|&d| {
            let mut d = d;
            while d % p == 0 {
                d /= p;
            }
            d == 1
        })
    }

    /// Elements of the subgroup generated by `gens`, sorted.
    pub fn subgroup(&self, gens: &[GroupElem]) -> BTreeSet<GroupElem> {
        let mut set = BTreeSet::from([self.identity()]);
        let mut frontier = vec![self.identity()];
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y = self.mul(&x, g);
                if set.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        set
    }

    /// `G = G0 x G1` with `p` not dividing `|G0|` and `G1` a p-group.
    pub fn decompose_by_p(&self, p: u32) -> PDecomposition {
        let parts: Vec<(u32, u32)> = self
            .orders
            .iter()
            .map(|&d| {
                let mut pv = 1;
                let mut rest = d;
                while rest % p == 0 {
                    rest /= p;
                    pv *= p;
                }
                (rest, pv)
            })
            .collect();
        let g0: Vec<u32> = parts.iter().map(|&(a, _)| a).filter(|&a| a > 1).collect();
        let g1: Vec<u32> = parts.iter().map(|&(_, b)| b).filter(|&b| b > 1).collect();
        PDecomposition {
            group: self.clone(),
            g0: AbelianGroup { orders: g0 },
            g1: AbelianGroup { orders: g1 },
            parts,
        }
    }

    /// `G / <gens>` in invariant-factor form, with its projection.
    pub fn quotient(&self, gens: &[GroupElem]) -> Result<Quotient, GroupError> {
        for g in gens {
            self.check(g)?;
        }
        let r = self.orders.len();
        let mut rel: Vec<Vec<i64>> = (0..r)
            .map(|i| (0..r).map(|j| if i == j { self.orders[i] as i64 } else { 0 }).collect())
            .collect();
        rel.extend(gens.iter().map(|g| g.0.iter().map(|&e| e as i64).collect()));
        let snf = smith_normal_form(&rel, r);
        let kept: Vec<usize> = (0..r).filter(|&i| snf.diagonal[i] != 1).collect();
        let orders: Vec<u32> = kept.iter().map(|&i| snf.diagonal[i] as u32).collect();
        let q = Quotient {
            source: self.clone(),
            group: AbelianGroup::new(&orders)?,
            right: snf.right,
            kept,
        };
        debug_assert_eq!(q.group.order() * self.subgroup(gens).len(), self.order());
        Ok(q)
    }

    /// `GF(p^k)` with `k` least such that it contains all `exp(G0)`-th roots of unity.
    pub fn splitting_field(&self, p: u32) -> Result<FieldRef, FieldError> {
        let k = min_ext_degree(p as u64, self.decompose_by_p(p).g0.exponent())?;
        build_field(p, k)
    }

    /// One character per element of `G0`; characters of `G` are trivial on
    /// the p-part because `F^x` has no elements of order p.
    pub fn multiplicative_characters(
        &self,
        field: &FieldRef,
    ) -> Result<Vec<MultCharacter>, GroupError> {
        let p = field.characteristic();
        let dec = self.decompose_by_p(p);
        let exponent = dec.g0.exponent();
        if !(field.order() as u64 - 1).is_multiple_of(exponent) {
            return Err(GroupError::InsufficientRoots { exponent });
        }
        let roots: Vec<FieldElem> = dec
            .g0
            .orders
            .iter()
            .map(|&d| field.root_of_unity(d as u64))
            .collect::<Result<_, _>>()?;
        let split: Vec<GroupElem> = self.elements().map(|g| dec.split(&g).0).collect();
        Ok(dec
            .g0
            .elements()
            .map(|label| {
                let values = split
                    .iter()
                    .map(|g0| {
                        g0.0.iter().zip(&label.0).zip(&roots).fold(field.one(), |acc, ((&x, &j), &w)| {
                            field.mul(acc, field.pow(w, x as u64 * j as u64))
                        })
                    })
                    .collect();
                MultCharacter { group: self.clone(), label, values }
            })
            .collect())
    }

    /// Basis of `Hom(G, GF(p))`: one character per cyclic factor of order
    /// divisible by `p`, sending that factor's generator to 1.
    pub fn additive_characters(&self, p: u32) -> Vec<AddCharacter> {
        (0..self.rank())
            .filter(|&i| self.orders[i].is_multiple_of(p))
            .map(|i| AddCharacter {
                group: self.clone(),
                p,
                values: self.elements().map(|g| g.0[i] % p).collect(),
            })
            .collect()
    }
}

/// Result of [`AbelianGroup::decompose_by_p`].
#[derive(Debug, Clone)]
pub struct PDecomposition {
    pub group: AbelianGroup,
    pub g0: AbelianGroup,
    pub g1: AbelianGroup,
    /// Per factor of `group`: `(d', p^v)` with `d = d' p^v`.
    parts: Vec<(u32, u32)>,
}

fn inv_mod(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let (mut old_r, mut r) = (a as i64 % m as i64, m as i64);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    old_s.rem_euclid(m as i64) as u64
}

impl PDecomposition {
    /// `(x, y) -> x p^v + y d'` on each factor.
    pub fn combine(&self, g0: &GroupElem, g1: &GroupElem) -> GroupElem {
        let (mut i0, mut i1) = (0, 0);
        let mut out = Vec::with_capacity(self.parts.len());
        for (&(a, b), &d) in self.parts.iter().zip(&self.group.orders) {
            let mut z = 0u64;
            if a > 1 {
                z += g0.0[i0] as u64 * b as u64;
                i0 += 1;
            }
            if b > 1 {
                z += g1.0[i1] as u64 * a as u64;
                i1 += 1;
            }
            out.push((z % d as u64) as u32);
        }
        GroupElem(out)
    }

    pub fn embed0(&self, g0: &GroupElem) -> GroupElem {
        self.combine(g0, &self.g1.identity())
    }

    pub fn embed1(&self, g1: &GroupElem) -> GroupElem {
        self.combine(&self.g0.identity(), g1)
    }

    /// Inverse of [`combine`](Self::combine).
    pub fn split(&self, g: &GroupElem) -> (GroupElem, GroupElem) {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (&(a, b), &z) in self.parts.iter().zip(&g.0) {
            if a > 1 {
                x.push((z as u64 % a as u64 * inv_mod(b as u64, a as u64) % a as u64) as u32);
            }
            if b > 1 {
                y.push((z as u64 % b as u64 * inv_mod(a as u64, b as u64) % b as u64) as u32);
            }
        }
        (GroupElem(x), GroupElem(y))
    }
}

/// `G / H` with the projection `G -> G/H`.
#[derive(Debug, Clone)]
pub struct Quotient {
    pub source: AbelianGroup,
    pub group: AbelianGroup,
    right: Vec<Vec<i64>>,
    kept: Vec<usize>,
}

impl Quotient {
    pub fn project(&self, g: &GroupElem) -> GroupElem {
        let exps: Vec<i64> = self
            .kept
            .iter()
            .map(|&j| g.0.iter().enumerate().map(|(i, &e)| e as i64 * self.right[i][j]).sum())
            .collect();
        self.group.elem(&exps).expect("projection has the quotient's rank")
    }
}

/// A homomorphism `G -> F^x`, tabulated over the enumeration of `G`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultCharacter {
    pub group: AbelianGroup,
    /// The element of `G0` this character corresponds to.
    pub label: GroupElem,
    pub values: Vec<FieldElem>,
}

impl MultCharacter {
    pub fn value(&self, g: &GroupElem) -> FieldElem {
        self.values[self.group.index(g)]
    }
}

/// A homomorphism `G -> (GF(p), +)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AddCharacter {
    pub group: AbelianGroup,
    pub p: u32,
    pub values: Vec<u32>,
}

impl AddCharacter {
    pub fn value(&self, g: &GroupElem) -> u32 {
        self.values[self.group.index(g)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_field;

    #[test]
    fn small_groups() {
        let z2 = AbelianGroup::new(&[2]).unwrap();
        assert_eq!(z2.elements().collect::<Vec<_>>(), vec![GroupElem(vec![0]), GroupElem(vec![1])]);
        let z9 = AbelianGroup::new(&[9]).unwrap();
        assert_eq!(z9.mul(&GroupElem(vec![1]), &GroupElem(vec![8])), z9.identity());
        let z23 = AbelianGroup::new(&[2, 3]).unwrap();
        let g = GroupElem(vec![1, 1]);
        let mut x = g.clone();
        let mut k = 1;
        while x != z23.identity() {
            x = z23.mul(&x, &g);
            k += 1;
        }
        assert_eq!(k, 6);
        assert_eq!(z23.elem_order(&g), 6);
    }

    #[test]
    fn cap_and_bad_orders() {
        assert_eq!(AbelianGroup::new(&[64, 65]).unwrap_err(), GroupError::CapExceeded(4160));
        assert_eq!(AbelianGroup::new(&[1]).unwrap_err(), GroupError::BadOrder(1));
        assert!(AbelianGroup::new(&[64, 64]).is_ok());
    }

    #[test]
    fn index_roundtrip() {
        let g = AbelianGroup::new(&[3, 4, 2]).unwrap();
        for i in 0..g.order() {
            assert_eq!(g.index(&g.element(i)), i);
        }
    }

    #[test]
    fn p_decomposition() {
        let z6 = AbelianGroup::new(&[6]).unwrap();
        let d = z6.decompose_by_p(3);
        assert_eq!(d.g0.orders(), &[2]);
        assert_eq!(d.g1.orders(), &[3]);
        let g = AbelianGroup::new(&[4, 3]).unwrap().decompose_by_p(3);
        assert_eq!((g.g0.orders(), g.g1.orders()), (&[4u32][..], &[3u32][..]));
        let z9 = AbelianGroup::new(&[9]).unwrap().decompose_by_p(5);
        assert_eq!(z9.g0.orders(), &[9]);
        assert_eq!(z9.g1.order(), 1);
    }

    #[test]
    fn p_decomposition_is_isomorphism() {
        for orders in [vec![6], vec![12, 3], vec![9, 10], vec![15, 45]] {
            let g = AbelianGroup::new(&orders).unwrap();
            let d = g.decompose_by_p(3);
            assert_eq!(d.g0.order() * d.g1.order(), g.order());
            let mut seen = BTreeSet::new();
            for a in d.g0.elements() {
                for b in d.g1.elements() {
                    let z = d.combine(&a, &b);
                    assert_eq!(d.split(&z), (a.clone(), b.clone()));
                    seen.insert(z);
                }
            }
            assert_eq!(seen.len(), g.order());
            for x in g.elements() {
                for y in g.elements() {
                    let (x0, x1) = d.split(&x);
                    let (y0, y1) = d.split(&y);
                    assert_eq!(d.split(&g.mul(&x, &y)), (d.g0.mul(&x0, &y0), d.g1.mul(&x1, &y1)));
                }
            }
        }
    }

    #[test]
    fn quotient_examples() {
        let z9 = AbelianGroup::new(&[9]).unwrap();
        let q = z9.quotient(&[GroupElem(vec![3])]).unwrap();
        assert_eq!(q.group.orders(), &[3]);

        let v4 = AbelianGroup::new(&[2, 2]).unwrap();
        let q = v4.quotient(&[GroupElem(vec![1, 1])]).unwrap();
        assert_eq!(q.group.orders(), &[2]);
        // coset enumeration oracle
        let h = v4.subgroup(&[GroupElem(vec![1, 1])]);
        let mut cosets: BTreeSet<BTreeSet<GroupElem>> = BTreeSet::new();
        for g in v4.elements() {
            cosets.insert(h.iter().map(|x| v4.mul(&g, x)).collect());
        }
        assert_eq!(cosets.len(), 2);
        for c in &cosets {
            let imgs: BTreeSet<_> = c.iter().map(|g| q.project(g)).collect();
            assert_eq!(imgs.len(), 1);
        }

        let g = AbelianGroup::new(&[4, 6]).unwrap();
        let q = g.quotient(&[g.identity()]).unwrap();
        assert_eq!(q.group.order(), 24);
    }

    #[test]
    fn quotient_projection_is_homomorphism() {
        let cases: Vec<(Vec<u32>, Vec<Vec<i64>>)> = vec![
            (vec![4, 4], vec![vec![2, 0]]),
            (vec![8, 2], vec![vec![2, 1]]),
            (vec![6, 6], vec![vec![1, 2], vec![3, 3]]),
            (vec![4], vec![vec![2]]),
            (vec![2, 2, 2], vec![vec![1, 1, 0], vec![0, 1, 1]]),
        ];
        for (orders, gens) in cases {
            let g = AbelianGroup::new(&orders).unwrap();
            let gens: Vec<_> = gens.iter().map(|e| g.elem(e).unwrap()).collect();
            let q = g.quotient(&gens).unwrap();
            assert_eq!(q.group.order() * g.subgroup(&gens).len(), g.order());
            for x in g.elements() {
                for y in g.elements() {
                    assert_eq!(q.project(&g.mul(&x, &y)), q.group.mul(&q.project(&x), &q.project(&y)));
                }
            }
            for h in &gens {
                assert_eq!(q.project(h), q.group.identity());
            }
            let image: BTreeSet<_> = g.elements().map(|x| q.project(&x)).collect();
            assert_eq!(image.len(), q.group.order());
        }
    }

    #[test]
    fn characters_of_z2_over_gf5() {
        let f = build_field(5, 1).unwrap();
        let z2 = AbelianGroup::new(&[2]).unwrap();
        let chars = z2.multiplicative_characters(&f).unwrap();
        assert_eq!(chars.len(), 2);
        assert_eq!(chars[0].values, vec![f.one(), f.one()]);
        assert_eq!(chars[1].values, vec![f.one(), f.from_int(4)]);
    }

    #[test]
    fn characters_need_roots() {
        let f = build_field(5, 1).unwrap();
        let z3 = AbelianGroup::new(&[3]).unwrap();
        assert_eq!(
            z3.multiplicative_characters(&f).unwrap_err(),
            GroupError::InsufficientRoots { exponent: 3 }
        );
        let f25 = build_field(5, 2).unwrap();
        let chars = z3.multiplicative_characters(&f25).unwrap();
        assert_eq!(chars.len(), 3);
        for c in &chars {
            for v in &c.values {
                assert_eq!(f25.pow(*v, 3), f25.one());
            }
        }
        let triv = AbelianGroup::trivial().multiplicative_characters(&f).unwrap();
        assert_eq!(triv.len(), 1);
        assert_eq!(triv[0].values, vec![f.one()]);
    }

    #[test]
    fn characters_form_group_isomorphic_to_g0() {
        let f = build_field(3, 2).unwrap();
        let g = AbelianGroup::new(&[12, 2]).unwrap();
        let chars = g.multiplicative_characters(&f).unwrap();
        let d = g.decompose_by_p(3);
        assert_eq!(chars.len(), d.g0.order());
        let distinct: BTreeSet<_> = chars.iter().map(|c| c.values.clone()).collect();
        assert_eq!(distinct.len(), chars.len());
        for a in &chars {
            for x in g.elements() {
                for y in g.elements() {
                    assert_eq!(a.value(&g.mul(&x, &y)), f.mul(a.value(&x), a.value(&y)));
                }
            }
            for b in &chars {
                let prod: Vec<_> = a.values.iter().zip(&b.values).map(|(&u, &v)| f.mul(u, v)).collect();
                let label = d.g0.mul(&a.label, &b.label);
                let c = chars.iter().find(|c| c.label == label).unwrap();
                assert_eq!(c.values, prod);
            }
        }
    }

    #[test]
    fn additive_character_examples() {
        let g = AbelianGroup::new(&[3, 3]).unwrap();
        let alphas = g.additive_characters(3);
        assert_eq!(alphas.len(), 2);
        for (i, a) in alphas.iter().enumerate() {
            for j in 0..2 {
                assert_eq!(a.value(&g.generator(j)), u32::from(i == j));
            }
        }
        assert!(AbelianGroup::new(&[5]).unwrap().additive_characters(3).is_empty());
        let z9 = AbelianGroup::new(&[9]).unwrap();
        let a = &z9.additive_characters(3)[0];
        let kernel: Vec<_> = z9.elements().filter(|g| a.value(g) == 0).collect();
        assert_eq!(kernel, z9.subgroup(&[GroupElem(vec![3])]).into_iter().collect::<Vec<_>>());
        for x in z9.elements() {
            for y in z9.elements() {
                assert_eq!(a.value(&z9.mul(&x, &y)), (a.value(&x) + a.value(&y)) % 3);
            }
            assert_eq!(a.value(&z9.pow(&x, 3)), 0);
        }
    }
}
