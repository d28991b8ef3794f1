//! Desk-scale verification sweeps, one per acceptance property.
//!
//! Every sweep is deterministic given its seed. A sweep returns one row per
//! parameter case; a row fails when any of its checks fails.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::field::{binom_mod_p, build_field, FieldRef};
use crate::grading::{elementary_grading, pauli_grading, pauli_matrices, tensor_gradings, Grading, GradingError, Mode};
use crate::group::{AbelianGroup, GroupElem};
use crate::hopf::{
    check_hopf_axioms, divided_powers, grouplike_census, lift_add_char, lift_mult_char, primitive_space_dim,
    regrade_from_action, DualTensor,
};
use crate::lie::{
    associative_derivation_witness, check_identity_criterion, generalized_leibniz_check, martindale_decompose,
    LinMap,
};
use crate::linalg::{Mat, Subspace};
use crate::sl::{
    classify_sl_grading, elementary_candidates, exchange, type1_grading, type2_full, type2_grading, Classification,
    Involution,
};

pub const SUITES: &[&str] = &[
    "hopf-axioms",
    "duality-roundtrip",
    "module-algebra",
    "divided-powers",
    "gen-leibniz",
    "martindale",
    "p-grading",
    "exchange",
    "type-two",
    "classify-p-group",
    "pauli",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SuiteError {
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteRow {
    pub case: String,
    pub checks: usize,
    pub failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl SuiteRow {
    fn new(case: impl Into<String>) -> SuiteRow {
        SuiteRow { case: case.into(), checks: 0, failures: 0, note: None }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.note.is_none() {
                self.note = Some(what());
            }
        }
    }

    fn absorb(&mut self, other: SuiteRow) {
        self.checks += other.checks;
        self.failures += other.failures;
        if self.note.is_none() {
            self.note = other.note;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub rows: Vec<SuiteRow>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.failures == 0)
    }

    pub fn checks(&self) -> usize {
        self.rows.iter().map(|r| r.checks).sum()
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().map(|r| r.failures).sum()
    }

    pub fn table(&self) -> String {
        let width = self.rows.iter().map(|r| r.case.len()).max().unwrap_or(4).max(4);
        let mut out = String::new();
        let _ = writeln!(out, "{:<width$}  {:>8}  {:>8}  verdict", "case", "checks", "failures");
        for r in &self.rows {
            let verdict = if r.failures == 0 { "pass" } else { "FAIL" };
            let _ = write!(out, "{:<width$}  {:>8}  {:>8}  {verdict}", r.case, r.checks, r.failures);
            if let Some(note) = &r.note {
                let _ = write!(out, "  ({note})");
            }
            out.push('\n');
        }
        let verdict = if self.passed() { "pass" } else { "FAIL" };
        let _ = writeln!(out, "{}: {} checks, {} failures, {verdict}", self.suite, self.checks(), self.failures());
        out
    }
}

pub fn run_suite(name: &str, seed: u64) -> Result<SuiteReport, SuiteError> {
    let rows = match name {
        "hopf-axioms" => hopf_axioms(),
        "duality-roundtrip" => duality_roundtrip(seed),
        "module-algebra" => module_algebra(seed),
        "divided-powers" => divided_power_laws(),
        "gen-leibniz" => gen_leibniz(seed),
        "martindale" => martindale(seed),
        "p-grading" => p_grading(seed),
        "exchange" => exchange_sweep(),
        "type-two" => type_two(),
        "classify-p-group" => classify_p_group(),
        "pauli" => pauli(),
        other => return Err(SuiteError::UnknownSuite(other.to_string())),
    };
    Ok(SuiteReport { suite: name.to_string(), seed, rows })
}

/// Every abelian group of order at most `max`, once per isomorphism class,
/// in invariant-factor form `d_1 | d_2 | ...`.
pub fn abelian_groups_up_to(max: u32) -> Vec<AbelianGroup> {
    fn extend(prefix: &mut Vec<u32>, order: u32, max: u32, out: &mut Vec<Vec<u32>>) {
        out.push(prefix.clone());
        let last = prefix.last().copied().unwrap_or(1);
        let mut d = if prefix.is_empty() { 2 } else { last };
        while order * d <= max {
            if d % last == 0 {
                prefix.push(d);
                extend(prefix, order * d, max, out);
                prefix.pop();
            }
            d += 1;
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), 1, max, &mut out);
    out.sort_by_key(|o| (o.iter().product::<u32>(), o.clone()));
    out.iter().map(|o| AbelianGroup::new(o).expect("positive orders")).collect()
}

/// Elementary tuples up to translation and permutation: first entry the
/// identity, the rest nondecreasing. Translating or permuting a tuple
/// conjugates the grading by a permutation matrix.
pub fn elementary_tuples(group: &AbelianGroup, n: usize) -> Vec<Vec<GroupElem>> {
    let els: Vec<GroupElem> = group.elements().collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; n.saturating_sub(1)];
    loop {
        let mut t = vec![group.identity()];
        t.extend(idx.iter().map(|&i| els[i].clone()));
        out.push(t);
        // next nondecreasing index vector
        let mut k = idx.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if idx[k] + 1 < els.len() {
                idx[k] += 1;
                let v = idx[k];
                for x in idx.iter_mut().skip(k + 1) {
                    *x = v;
                }
                break;
            }
        }
    }
}

fn random_tuple(group: &AbelianGroup, n: usize, rng: &mut ChaCha8Rng) -> Vec<GroupElem> {
    (0..n).map(|_| group.element(rng.gen_range(0..group.order()))).collect()
}

fn group_label(g: &AbelianGroup) -> String {
    g.to_string()
}

fn hopf_axioms() -> Vec<SuiteRow> {
    let groups = abelian_groups_up_to(16);
    let cases: Vec<(u32, AbelianGroup)> =
        [3u32, 5].iter().flat_map(|&p| groups.iter().map(move |g| (p, g.clone()))).collect();
    cases
        .par_iter()
        .map(|(p, g)| {
            let f = g.splitting_field(*p).expect("p odd, |G| <= 16");
            let mut row = SuiteRow::new(format!("p={p} G={} F=GF({})", group_label(g), f.order()));
            let ax = check_hopf_axioms(g, &f);
            row.check(ax.associativity, || "associativity".into());
            row.check(ax.unit, || "unit".into());
            row.check(ax.coassociativity, || "coassociativity".into());
            row.check(ax.counit, || "counit".into());
            row.check(ax.antipode, || "antipode".into());
            row.check(ax.multiplicative_coproduct, || "coproduct not multiplicative".into());
            row
        })
        .collect()
}

fn duality_roundtrip(seed: u64) -> Vec<SuiteRow> {
    let groups: Vec<AbelianGroup> =
        abelian_groups_up_to(16).into_iter().filter(|g| g.order() > 1).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases: Vec<(u32, AbelianGroup, usize, Vec<GroupElem>)> = (0..50)
        .map(|_| {
            let p = [3u32, 5][rng.gen_range(0..2)];
            let g = groups[rng.gen_range(0..groups.len())].clone();
            let n = rng.gen_range(1..=4);
            let t = random_tuple(&g, n, &mut rng);
            (p, g, n, t)
        })
        .collect();
    cases
        .par_iter()
        .map(|(p, g, n, t)| {
            let f = g.splitting_field(*p).expect("small group");
            let mut row = SuiteRow::new(format!("p={p} G={} n={n} tuple={t:?}", group_label(g)));
            let gr = elementary_grading(g, &f, *n, t).expect("valid tuple");
            let back = regrade_from_action(&gr);
            row.check(back.as_ref() == Ok(&gr), || "roundtrip differs".into());
            let dec = g.decompose_by_p(*p);
            let census = grouplike_census(g, &f);
            row.check(census == dec.g0.order(), || format!("census {census} != |G0| = {}", dec.g0.order()));
            let p_rank = g.orders().iter().filter(|&&d| d % p == 0).count();
            let prim = primitive_space_dim(g, &f);
            row.check(prim == p_rank, || format!("primitive dim {prim} != p-rank {p_rank}"));
            row
        })
        .collect()
}

/// `f·(xy) = (f·x)(f·y)` for lifted characters and `f·(xy) = (f·x)y + x(f·y)`
/// for lifted additive characters, on all basis pairs.
fn automorphism_derivation_rows(label: String, gr: &Grading) -> SuiteRow {
    let mut row = SuiteRow::new(label);
    let f = gr.field();
    let g = gr.group();
    let basis: Vec<Mat> = gr.homogeneous_basis().into_iter().map(|(_, x)| x).collect();
    let chars = g.multiplicative_characters(f).expect("field contains the roots of unity");
    for chi in &chars {
        let lf = lift_mult_char(chi, f);
        row.check(lf.is_grouplike(), || format!("character {} not group-like", chi.label));
        let img: Vec<Mat> = basis.iter().map(|x| lf.act(gr, x).expect("graded")).collect();
        for (x, fx) in basis.iter().zip(&img) {
            for (y, fy) in basis.iter().zip(&img) {
                let ok = lf.act(gr, &x.mul(y)).is_ok_and(|v| v == fx.mul(fy));
                row.check(ok, || format!("character {} is not multiplicative", chi.label));
            }
        }
    }
    for (i, alpha) in g.additive_characters(f.characteristic()).iter().enumerate() {
        let lf = lift_add_char(alpha, f);
        row.check(lf.is_primitive(), || format!("additive character {i} not primitive"));
        let img: Vec<Mat> = basis.iter().map(|x| lf.act(gr, x).expect("graded")).collect();
        for (x, fx) in basis.iter().zip(&img) {
            for (y, fy) in basis.iter().zip(&img) {
                let ok = lf.act(gr, &x.mul(y)).is_ok_and(|v| v == fx.mul(y).add(&x.mul(fy)));
                row.check(ok, || format!("additive character {i} is not a derivation"));
            }
        }
    }
    row
}

fn module_algebra(seed: u64) -> Vec<SuiteRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases: Vec<(String, Grading)> = Vec::new();
    for p in [3u32, 5] {
        for orders in [vec![2], vec![3], vec![4], vec![5], vec![6], vec![9], vec![2, 2], vec![3, 3], vec![2, 6]] {
            let g = AbelianGroup::new(&orders).unwrap();
            let f = g.splitting_field(p).unwrap();
            for n in 1..=3 {
                let t = random_tuple(&g, n, &mut rng);
                let gr = elementary_grading(&g, &f, n, &t).unwrap();
                cases.push((format!("p={p} G={g} elementary {t:?}"), gr));
            }
        }
    }
    // fine gradings and a tensor product
    for (p, m) in [(3u32, 2usize), (5, 2), (5, 3), (7, 3)] {
        let g = AbelianGroup::new(&[m as u32, m as u32]).unwrap();
        let f = g.splitting_field(p).unwrap();
        let pg = pauli_grading(&g, &f, m, [&g.generator(0), &g.generator(1)]).unwrap();
        cases.push((format!("p={p} G={g} pauli m={m}"), pg.clone()));
        let el = elementary_grading(&g, &f, 2, &[g.identity(), g.generator(1)]).unwrap();
        cases.push((format!("p={p} G={g} pauli (x) elementary"), tensor_gradings(&pg, &el).unwrap()));
    }
    cases.par_iter().map(|(label, gr)| automorphism_derivation_rows(label.clone(), gr)).collect()
}

fn divided_power_laws() -> Vec<SuiteRow> {
    let mut rows = Vec::new();
    for p in [3u32, 5] {
        for n_exp in [1u32, 2] {
            let f = build_field(p, 1).unwrap();
            let (g, d) = divided_powers(n_exp, &f).unwrap();
            let order = d.len();
            let mut row = SuiteRow::new(format!("p={p} N={n_exp}"));
            for m in 0..order {
                let expect = (0..=m)
                    .fold(DualTensor::zero(&g, &f, 2), |acc, i| acc.add(&DualTensor::outer(&[&d[i], &d[m - i]])));
                row.check(d[m].coproduct() == expect, || format!("coproduct of δ^({m})"));
            }
            row.check(d[1].is_primitive(), || "δ^(1) not primitive".into());
            for i in 0..order {
                for j in 0..order {
                    let c = d[i].product(&d[j]).unwrap().divided_power_coordinates().unwrap();
                    if i + j < order {
                        let lead = f.from_int(binom_mod_p((i + j) as u64, i as u64, p as u64) as i64);
                        let ok = c[i + j] == lead && c[i + j + 1..].iter().all(|x| x.is_zero());
                        row.check(ok, || format!("δ^({i}) δ^({j}) leading term"));
                    }
                    // {δ^(m) : m < p^l} spans a subalgebra
                    for l in 0..=n_exp {
                        let pl = p.pow(l) as usize;
                        if i < pl && j < pl {
                            row.check(c[pl..].iter().all(|x| x.is_zero()), || format!("p^{l} span not closed"));
                        }
                    }
                }
            }
            rows.push(row);
        }
    }
    rows
}

fn gen_leibniz(seed: u64) -> Vec<SuiteRow> {
    let mut rows = Vec::new();
    for (p, n) in [(3u32, 2usize), (3, 4), (5, 2), (5, 4)] {
        let f = build_field(p, 1).unwrap();
        let g = AbelianGroup::cyclic(p * p).unwrap();
        let tuples = elementary_tuples(&g, n);
        let mut row = SuiteRow::new(format!("p={p} N=2 n={n} ({} gradings)", tuples.len()));
        let parts: Vec<SuiteRow> = tuples
            .par_iter()
            .enumerate()
            .map(|(k, t)| {
                let mut r = SuiteRow::new("");
                let gr = elementary_grading(&g, &f, n, t).unwrap();
                // 50 random triples on the first grading of each case, pairs everywhere
                let triples = if k == 0 { 50 } else { 0 };
                match generalized_leibniz_check(&gr, seed ^ k as u64, triples) {
                    Ok(rep) => {
                        r.checks += rep.pairs_checked * (2 + rep.q) + rep.triples_checked;
                        let bad = rep.associative_failures.len()
                            + rep.lie_failures.len()
                            + rep.lower_failures.len()
                            + rep.triple_failures.len();
                        r.failures += bad;
                        if bad > 0 {
                            r.note = Some(format!("tuple {t:?}"));
                        }
                    }
                    Err(e) => r.check(false, || format!("tuple {t:?}: {e}")),
                }
                r
            })
            .collect();
        for r in parts {
            row.absorb(r);
        }
        rows.push(row);
    }
    rows
}

fn martindale(seed: u64) -> Vec<SuiteRow> {
    let f = build_field(5, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases: Vec<(usize, Mat, u32)> = (0..100)
        .map(|i| {
            let n = 2 + i % 2;
            (n, Mat::random(&f, n, &mut rng), rng.gen_range(0..5))
        })
        .collect();
    let mut by_n = [SuiteRow::new("GF(5) n=2"), SuiteRow::new("GF(5) n=3")];
    for (n, s, lam) in cases {
        let row = &mut by_n[n - 2];
        let lam = f.elem(lam);
        let ad = LinMap::ad(&s);
        let zeta = LinMap::trace_map(&f, n).scale(lam);
        match martindale_decompose(&ad.add(&zeta)) {
            Ok(m) => {
                row.check(m.tau == ad, || "τ != ad s".into());
                row.check(m.zeta == zeta, || "ζ != λ tr(·) 1".into());
                row.check(associative_derivation_witness(&m.tau).is_none(), || "τ not a derivation".into());
            }
            Err(e) => row.check(false, || e.to_string()),
        }
    }
    by_n.into()
}

fn p_grading(seed: u64) -> Vec<SuiteRow> {
    let mut cases = Vec::new();
    for p in [3u32, 5] {
        for orders in [vec![p], vec![p * p], vec![p, p]] {
            for n in 2..=4usize {
                if n % p as usize != 0 {
                    cases.push((p, orders.clone(), n));
                }
            }
        }
    }
    cases
        .iter()
        .map(|(p, orders, n)| {
            let f = build_field(*p, 1).unwrap();
            let g = AbelianGroup::new(orders).unwrap();
            let tuples = elementary_tuples(&g, *n);
            let mut row = SuiteRow::new(format!("p={p} G={g} n={n} ({} gradings)", tuples.len()));
            let parts: Vec<SuiteRow> = tuples
                .par_iter()
                .enumerate()
                .map(|(k, t)| {
                    let mut r = SuiteRow::new("");
                    let gr = elementary_grading(&g, &f, *n, t).unwrap();
                    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((k as u64) << 8) ^ *n as u64);
                    let (u, ui) = Mat::random_invertible(&f, *n, &mut rng);
                    for (what, x) in [("elementary", gr.clone()), ("conjugate", gr.conjugate(&u, &ui))] {
                        match check_identity_criterion(&x) {
                            Ok(rep) => {
                                r.check(rep.identity_in_r1, || format!("{what} {t:?}: 1 not in R_1"));
                                r.check(!rep.falsification, || format!("{what} {t:?}: falsification"));
                            }
                            Err(e) => r.check(false, || format!("{what} {t:?}: {e}")),
                        }
                    }
                    // move the identity into a nontrivial degree: still Lie, never associative
                    let moved = move_identity(&x_identity_free(&gr), &g.generator(0));
                    match check_identity_criterion(&moved) {
                        Ok(rep) => {
                            r.check(!rep.identity_in_r1, || format!("moved {t:?}: 1 still in R_1"));
                            r.check(rep.only_if_consistent == Some(true), || format!("moved {t:?}: only-if"));
                            r.check(!rep.associative.holds(), || format!("moved {t:?}: associative"));
                        }
                        Err(e) => r.check(false, || format!("moved {t:?}: {e}")),
                    }
                    r
                })
                .collect();
            for r in parts {
                row.absorb(r);
            }
            row
        })
        .collect()
}

/// Components with `R_1` replaced by `R_1 ∩ sl_n`.
fn x_identity_free(gr: &Grading) -> Grading {
    let f = gr.field();
    let sl = crate::sl::sl_subspace(f, gr.n()).expect("p does not divide n");
    let id = gr.group().identity();
    let comps = gr
        .components()
        .iter()
        .map(|(g, s)| (g.clone(), if *g == id { s.intersect(&sl) } else { s.clone() }));
    Grading::from_components(gr.group(), f, gr.n(), gr.ambient(), comps).expect("same group")
}

/// Adds `F·1` to the component of degree `g`.
fn move_identity(gr: &Grading, g: &GroupElem) -> Grading {
    let f = gr.field();
    let one = Subspace::span(f, gr.n(), &[Mat::identity(f, gr.n())]);
    let comps = gr.components().iter().map(|(d, s)| (d.clone(), s.clone())).chain([(g.clone(), one)]);
    Grading::from_components(gr.group(), f, gr.n(), gr.ambient(), comps).expect("same group")
}

/// Associative gradings, involutions and order-2 elements for type II.
type TwistCase = (String, Grading, Involution, GroupElem);

fn type_two_cases() -> Vec<TwistCase> {
    let mut out = Vec::new();
    for p in [3u32, 5, 7] {
        let f = build_field(p, 1).unwrap();
        for n in 2..=4usize {
            if n % p as usize == 0 {
                continue;
            }
            let mut invs = vec![
                ("I", Involution::transpose(&f, n)),
                ("antidiag", Involution::antidiagonal(&f, n)),
            ];
            if let Some(s) = Involution::symplectic(&f, n) {
                invs.push(("symplectic", s));
            }
            for orders in [vec![2u32], vec![4], vec![2, 2]] {
                let g = AbelianGroup::new(&orders).unwrap();
                let mut sources: Vec<(String, Grading)> = all_translated_tuples(&g, n)
                    .into_iter()
                    .map(|t| (format!("{t:?}"), elementary_grading(&g, &f, n, &t).unwrap()))
                    .collect();
                if n == 2 && orders == [2, 2] {
                    sources.push(("pauli".into(), pauli_grading(&g, &f, 2, [&g.generator(0), &g.generator(1)]).unwrap()));
                }
                for (src, gr) in &sources {
                    for (iname, inv) in &invs {
                        if !inv.preserves(gr) {
                            continue;
                        }
                        for h in g.elements().filter(|h| g.elem_order(h) == 2) {
                            let label = format!("p={p} n={n} G={g} src={src} Phi={iname} h={h}");
                            out.push((label, gr.clone(), inv.clone(), h));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Tuples with first entry the identity (order matters for involutions).
fn all_translated_tuples(group: &AbelianGroup, n: usize) -> Vec<Vec<GroupElem>> {
    crate::sl::group_tuples(group, n - 1)
        .into_iter()
        .map(|rest| std::iter::once(group.identity()).chain(rest).collect())
        .collect()
}

fn summarize(rows: Vec<(String, SuiteRow)>) -> Vec<SuiteRow> {
    // one row per (p, n, G) prefix
    let mut out: Vec<SuiteRow> = Vec::new();
    for (key, r) in rows {
        match out.last_mut() {
            Some(last) if last.case == key => last.absorb(r),
            _ => {
                let mut fresh = SuiteRow::new(key);
                fresh.absorb(r);
                out.push(fresh);
            }
        }
    }
    out
}

fn case_key(label: &str) -> String {
    label.split(" src=").next().unwrap_or(label).to_string()
}

fn type_two() -> Vec<SuiteRow> {
    let rows: Vec<(String, SuiteRow)> = type_two_cases()
        .par_iter()
        .map(|(label, gr, inv, h)| {
            let mut r = SuiteRow::new(label.clone());
            match type2_grading(gr, inv, h) {
                Ok(t2) => {
                    let n = gr.n();
                    r.check(t2.total_dim() == n * n - 1, || format!("{label}: dimension {}", t2.total_dim()));
                    let ok = t2.verify(Mode::Lie).is_ok_and(|rep| rep.holds());
                    r.check(ok, || format!("{label}: not a Lie grading"));
                }
                Err(e) => r.check(false, || format!("{label}: {e}")),
            }
            (case_key(label), r)
        })
        .collect();
    summarize(rows)
}

fn exchange_sweep() -> Vec<SuiteRow> {
    let f = build_field(5, 1).unwrap();
    let z2 = AbelianGroup::new(&[2]).unwrap();
    let rt = elementary_grading(&z2, &f, 2, &[z2.identity(), z2.generator(0)]).unwrap();
    let h = z2.generator(0);
    let mut first = SuiteRow::new("M2/GF(5) transpose example");
    let r = type2_full(&rt, &Involution::transpose(&f, 2), &h).unwrap();
    match exchange(&r, &rt, std::slice::from_ref(&h), Mode::Lie) {
        Ok(rep) => {
            let (a, b) = (Mat::unit(&f, 2, 0, 1), Mat::unit(&f, 2, 1, 0));
            let k = Subspace::span(&f, 2, &[a.sub(&b)]);
            let hs = Subspace::span(&f, 2, &[Mat::unit(&f, 2, 0, 0), Mat::unit(&f, 2, 1, 1), a.add(&b)]);
            first.check(rep.identity_failures.is_empty(), || "identity".into());
            first.check(rep.closure_failures.is_empty(), || "closure".into());
            first.check(rep.family.component_or_zero(&z2.identity()) == k, || "R^1 != K(R)".into());
            first.check(rep.family.component_or_zero(&h) == hs, || "R^h != H(R)".into());
        }
        Err(e) => first.check(false, || e.to_string()),
    }
    let rows: Vec<(String, SuiteRow)> = type_two_cases()
        .par_iter()
        .map(|(label, gr, inv, h)| {
            let mut r = SuiteRow::new(label.clone());
            let outcome = type2_full(gr, inv, h)
                .map_err(|e| e.to_string())
                .and_then(|full| exchange(&full, gr, std::slice::from_ref(h), Mode::Lie).map_err(|e| e.to_string()));
            match outcome {
                Ok(rep) => {
                    r.check(rep.identity_failures.is_empty(), || format!("{label}: identity"));
                    r.check(rep.closure_failures.is_empty(), || format!("{label}: closure"));
                }
                Err(e) => r.check(false, || format!("{label}: {e}")),
            }
            (case_key(label), r)
        })
        .collect();
    let mut out = vec![first];
    out.extend(summarize(rows));
    out
}

fn classify_p_group() -> Vec<SuiteRow> {
    let f = build_field(3, 1).unwrap();
    [vec![3u32], vec![9], vec![3, 3]]
        .iter()
        .map(|orders| {
            let g = AbelianGroup::new(orders).unwrap();
            let cands = elementary_candidates(&g, &f, 2);
            let mut row = SuiteRow::new(format!("p=3 n=2 G={g} ({} candidates)", cands.len()));
            let verdicts: Vec<(usize, Result<Grading, String>, Classification)> = cands
                .par_iter()
                .enumerate()
                .map(|(i, c)| match type1_grading(&c.assoc) {
                    Ok(slg) => {
                        let v = classify_sl_grading(&slg, &cands);
                        (i, Ok(slg), v)
                    }
                    Err(e) => (i, Err(e.to_string()), Classification::Unknown),
                })
                .collect();
            for (i, slg, v) in verdicts {
                match (slg, v) {
                    (Ok(slg), Classification::TypeI(j)) => {
                        let same = type1_grading(&cands[j].assoc).is_ok_and(|x| x == slg);
                        row.check(same && j <= i, || format!("candidate {i}: bad match {j}"));
                    }
                    (Ok(_), other) => row.check(false, || format!("candidate {i}: {other:?}")),
                    (Err(e), _) => row.check(false, || format!("candidate {i}: {e}")),
                }
            }
            row
        })
        .collect()
}

fn pauli() -> Vec<SuiteRow> {
    let mut rows = Vec::new();
    for (p, m) in [(3u32, 2usize), (5, 2), (7, 2), (5, 3), (7, 3), (3, 4), (5, 4), (3, 5), (7, 5)] {
        let g = AbelianGroup::new(&[m as u32, m as u32]).unwrap();
        let f = g.splitting_field(p).unwrap();
        let mut row = SuiteRow::new(format!("p={p} m={m} F=GF({})", f.order()));
        pauli_checks(&mut row, &f, &g, m, [&g.generator(0), &g.generator(1)]);
        // support a proper subgroup of Z_2m x Z_m
        let big = AbelianGroup::new(&[m as u32, 2 * m as u32]).unwrap();
        let a = big.elem(&[0, 2]).unwrap();
        let b = big.elem(&[1, 0]).unwrap();
        pauli_checks(&mut row, &f, &big, m, [&a, &b]);
        rows.push(row);
    }
    let mut errs = SuiteRow::new("p | m rejected");
    for (p, m) in [(3u32, 3usize), (3, 6), (5, 5), (7, 7)] {
        let f = build_field(p, 2).unwrap();
        let g = AbelianGroup::new(&[m as u32, m as u32]).unwrap();
        let e = pauli_grading(&g, &f, m, [&g.generator(0), &g.generator(1)]);
        errs.check(matches!(e, Err(GradingError::CharacteristicDividesM { .. })), || format!("p={p} m={m}"));
        errs.check(
            matches!(pauli_matrices(&f, m), Err(GradingError::CharacteristicDividesM { .. })),
            || format!("p={p} m={m} matrices"),
        );
    }
    rows.push(errs);
    rows
}

fn pauli_checks(row: &mut SuiteRow, f: &FieldRef, g: &AbelianGroup, m: usize, embed: [&GroupElem; 2]) {
    let (xa, xb, eps) = pauli_matrices(f, m).unwrap();
    row.check(xa.mul(&xb) == xb.mul(&xa).scale(eps), || "X_a X_b != ε X_b X_a".into());
    match pauli_grading(g, f, m, embed) {
        Ok(gr) => {
            let (_, subgroup) = gr.support();
            row.check(subgroup, || format!("support in {g} is not a subgroup"));
            row.check(gr.components().values().all(|s| s.dim() == 1), || "component not 1-dim".into());
            row.check(gr.components().len() == m * m, || "support size".into());
            let ok = gr.verify(Mode::Associative).is_ok_and(|r| r.holds());
            row.check(ok, || "not an associative grading".into());
        }
        Err(e) => row.check(false, || e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_census() {
        let groups = abelian_groups_up_to(16);
        // number of abelian groups of each order 1..=16
        let per_order = [1, 1, 1, 2, 1, 1, 1, 3, 2, 1, 1, 2, 1, 1, 1, 5];
        for (k, &c) in per_order.iter().enumerate() {
            assert_eq!(groups.iter().filter(|g| g.order() == k + 1).count(), c, "order {}", k + 1);
        }
    }

    #[test]
    fn tuple_enumeration_counts() {
        let z5 = AbelianGroup::cyclic(5).unwrap();
        assert_eq!(elementary_tuples(&z5, 1).len(), 1);
        assert_eq!(elementary_tuples(&z5, 3).len(), 15);
        assert_eq!(elementary_tuples(&z5, 4).len(), 35);
    }

    #[test]
    fn unknown_suite() {
        assert_eq!(run_suite("nope", 0), Err(SuiteError::UnknownSuite("nope".into())));
    }

    #[test]
    fn small_suites_pass() {
        for name in ["divided-powers", "martindale", "pauli"] {
            let rep = run_suite(name, 0).unwrap();
            assert!(rep.passed(), "{}", rep.table());
        }
    }
}
