//! Fixtures shared by the benchmarks.

use glab_core::grading::{elementary_grading, pauli_grading};
use glab_core::{build_field, AbelianGroup, Grading, GroupElem};

/// Elementary `Z_n`-grading of `M_n` over `GF(p)` with tuple `(0, 1, ..., n-1)`.
pub fn cyclic_elementary(p: u32, n: usize) -> Grading {
    let field = build_field(p, 1).expect("prime");
    let group = AbelianGroup::new(&[n as u32]).expect("nonzero order");
    let tuple: Vec<GroupElem> = (0..n as u32).map(|i| GroupElem(vec![i])).collect();
    elementary_grading(&group, &field, n, &tuple).expect("tuple of length n")
}

/// Pauli grading of `M_m` by `Z_m x Z_m`, over the splitting field for `p`.
pub fn pauli(p: u32, m: usize) -> Grading {
    let group = AbelianGroup::new(&[m as u32, m as u32]).expect("nonzero order");
    let field = group.splitting_field(p).expect("field");
    let a = GroupElem(vec![1, 0]);
    let b = GroupElem(vec![0, 1]);
    pauli_grading(&group, &field, m, [&a, &b]).expect("p does not divide m")
}
