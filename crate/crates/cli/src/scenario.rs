//! Scenario files: build named objects, then run checks against them.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

use glab_core::field::FieldRef;
use glab_core::grading::{elementary_grading, pauli_grading, tensor_gradings, Ambient, Grading, Mode};
use glab_core::group::{AbelianGroup, GroupElem};
use glab_core::hopf::{
    divided_power_basis, lift_add_char, lift_mult_char, module_generators, regrade_from_action,
    verify_module_algebra, DualElem,
};
use glab_core::lie::{check_identity_criterion, generalized_leibniz_check, martindale_decompose, LinMap};
use glab_core::linalg::{Mat, Subspace};
use glab_core::sl::{
    classify_sl_grading, elementary_candidates, exchange, type1_grading, type2_full, type2_grading, Candidate,
    Classification, Involution,
};

use crate::report::{elem_json, mat_json, CheckEntry, Report, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{section}[{index}]: unknown operation `{op}`")]
    UnknownOperation { section: &'static str, index: usize, op: String },
    #[error("{section}[{index}]: unresolved reference `{name}`")]
    UnresolvedReference { section: &'static str, index: usize, name: String },
    #[error("build[{index}]: name `{name}` is already defined")]
    DuplicateName { index: usize, name: String },
    #[error("a scenario with build steps or checks needs a \"field\"")]
    MissingField,
    #[error("setup failed: {0}")]
    Setup(String),
    #[error("build[{index}] `{name}` failed: {message}")]
    Build { index: usize, name: String, message: String },
}

pub const BUILD_OPS: &[&str] = &[
    "elementary",
    "trivial",
    "pauli",
    "components",
    "tensor",
    "conjugate",
    "factor",
    "type1",
    "type2",
    "type2_full",
    "exchange_family",
    "matrix",
    "dual_unit",
    "dual_basis",
    "character",
    "additive_character",
    "divided_power",
];

pub const CHECK_OPS: &[&str] = &[
    "verify",
    "compatible",
    "equal",
    "module_algebra",
    "act",
    "grouplike",
    "primitive",
    "roundtrip",
    "identity_criterion",
    "leibniz",
    "martindale",
    "involution_preserves",
    "exchange",
    "classify",
    "support_subgroup",
    "fine",
    "dimension",
    "constructs",
];

#[derive(Debug, Deserialize)]
pub struct Scenario {
    #[serde(default)]
    pub field: Option<FieldSpec>,
    #[serde(default)]
    pub group: Option<GroupSpec>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub build: Vec<Step>,
    #[serde(default)]
    pub check: Vec<Check>,
}

#[derive(Debug, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    #[serde(default)]
    pub k: Degree,
}

#[derive(Debug, Default, Deserialize)]
#[serde(untagged)]
pub enum Degree {
    Fixed(u32),
    #[default]
    #[serde(with = "auto")]
    Auto,
}

mod auto {
    use serde::{de::Error, Deserialize, Deserializer};

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(), D::Error> {
        let s = String::deserialize(d)?;
        if s == "auto" {
            Ok(())
        } else {
            Err(D::Error::custom(format!("expected a degree or \"auto\", got \"{s}\"")))
        }
    }
}

#[derive(Debug, Deserialize)]
pub struct GroupSpec {
    pub orders: Vec<u32>,
}

/// A field element: an integer, or its coefficient list in the polynomial basis.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Int(i64),
    Coeffs(Vec<i64>),
}

/// Row-major list of rows.
pub type MatrixSpec = Vec<Vec<Entry>>;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Operand {
    Name(String),
    Matrix(MatrixSpec),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum InvSpec {
    /// `transpose`, `antidiagonal` or `symplectic`.
    Named(String),
    Phi { phi: MatrixSpec },
}

#[derive(Debug, Clone, Deserialize)]
pub struct ComponentSpec {
    pub degree: Vec<i64>,
    pub span: Vec<MatrixSpec>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct CandidateSpec {
    pub assoc: String,
    #[serde(default)]
    pub phi: Option<InvSpec>,
    #[serde(default)]
    pub h: Option<Vec<i64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Candidates {
    /// `"elementary"`: every elementary grading of `M_n` by the scenario group.
    Keyword(String),
    List(Vec<CandidateSpec>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum TypeSpec {
    I,
    II,
    #[serde(rename = "unknown")]
    Unknown,
}

fn associative() -> Mode {
    Mode::Associative
}

fn full() -> Ambient {
    Ambient::Full
}

fn fifty() -> usize {
    50
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
pub struct Step {
    pub name: String,
    #[serde(flatten)]
    pub op: StepOp,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum StepOp {
    Elementary { tuple: Vec<Vec<i64>> },
    Trivial { n: usize },
    Pauli { m: usize, a: Vec<i64>, b: Vec<i64> },
    Components {
        n: usize,
        #[serde(default = "full")]
        ambient: Ambient,
        components: Vec<ComponentSpec>,
    },
    Tensor { left: String, right: String },
    Conjugate { of: String, by: MatrixSpec },
    Factor { of: String, by: Vec<Vec<i64>> },
    Type1 { of: String },
    Type2 { of: String, phi: InvSpec, h: Vec<i64> },
    Type2Full { of: String, phi: InvSpec, h: Vec<i64> },
    ExchangeFamily {
        a: String,
        b: String,
        h: Vec<Vec<i64>>,
        #[serde(default = "associative")]
        mode: Mode,
    },
    Matrix { value: MatrixSpec },
    DualUnit,
    DualBasis { degree: Vec<i64> },
    Character { label: Vec<i64> },
    AdditiveCharacter { index: usize },
    DividedPower { m: usize },
}

impl StepOp {
    fn refs(&self) -> Vec<&str> {
        match self {
            StepOp::Tensor { left, right } => vec![left, right],
            StepOp::Conjugate { of, .. }
            | StepOp::Factor { of, .. }
            | StepOp::Type1 { of }
            | StepOp::Type2 { of, .. }
            | StepOp::Type2Full { of, .. } => vec![of],
            StepOp::ExchangeFamily { a, b, .. } => vec![a, b],
            _ => vec![],
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct Check {
    #[serde(flatten)]
    pub op: CheckOp,
    #[serde(default = "yes")]
    pub expect: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum CheckOp {
    Verify {
        grading: String,
        #[serde(default = "associative")]
        mode: Mode,
    },
    Compatible { a: String, b: String },
    Equal { a: String, b: String },
    ModuleAlgebra {
        grading: String,
        #[serde(default = "associative")]
        mode: Mode,
        #[serde(default)]
        generators: Option<Vec<String>>,
    },
    Act { dual: String, grading: String, x: Operand, equals: MatrixSpec },
    Grouplike { dual: String },
    Primitive { dual: String },
    Roundtrip { grading: String },
    IdentityCriterion { grading: String },
    Leibniz {
        grading: String,
        #[serde(default = "fifty")]
        triples: usize,
    },
    Martindale { s: MatrixSpec, lambda: i64 },
    InvolutionPreserves { grading: String, phi: InvSpec },
    Exchange {
        a: String,
        b: String,
        h: Vec<Vec<i64>>,
        #[serde(default = "associative")]
        mode: Mode,
    },
    Classify { grading: String, candidates: Candidates, expect_type: TypeSpec },
    SupportSubgroup { grading: String },
    Fine { grading: String },
    Dimension { grading: String, equals: usize },
    Constructs { step: Box<StepOp> },
}

impl CheckOp {
    fn refs(&self) -> Vec<&str> {
        match self {
            CheckOp::Verify { grading, .. }
            | CheckOp::Roundtrip { grading }
            | CheckOp::IdentityCriterion { grading }
            | CheckOp::Leibniz { grading, .. }
            | CheckOp::InvolutionPreserves { grading, .. }
            | CheckOp::SupportSubgroup { grading }
            | CheckOp::Fine { grading }
            | CheckOp::Dimension { grading, .. } => vec![grading],
            CheckOp::Compatible { a, b } | CheckOp::Equal { a, b } | CheckOp::Exchange { a, b, .. } => vec![a, b],
            CheckOp::ModuleAlgebra { grading, generators, .. } => {
                let mut v = vec![grading.as_str()];
                v.extend(generators.iter().flatten().map(String::as_str));
                v
            }
            CheckOp::Act { dual, grading, x, .. } => {
                let mut v = vec![dual.as_str(), grading.as_str()];
                if let Operand::Name(n) = x {
                    v.push(n);
                }
                v
            }
            CheckOp::Grouplike { dual } | CheckOp::Primitive { dual } => vec![dual],
            CheckOp::Classify { grading, candidates, .. } => {
                let mut v = vec![grading.as_str()];
                if let Candidates::List(list) = candidates {
                    v.extend(list.iter().map(|c| c.assoc.as_str()));
                }
                v
            }
            CheckOp::Constructs { step } => step.refs(),
            CheckOp::Martindale { .. } => vec![],
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub timings: bool,
}

fn parse_error(e: serde_json::Error) -> ScenarioError {
    ScenarioError::Parse { line: e.line(), column: e.column(), message: e.to_string() }
}

fn op_name(v: &Value) -> Option<&str> {
    v.get("op").and_then(Value::as_str)
}

/// Rejects unknown `op` names before typed parsing, so that they get their own error.
fn scan_ops(v: &Value) -> Result<Vec<String>, ScenarioError> {
    let list = |key| v.get(key).and_then(Value::as_array).cloned().unwrap_or_default();
    for (index, step) in list("build").iter().enumerate() {
        if let Some(op) = op_name(step) {
            if !BUILD_OPS.contains(&op) {
                return Err(ScenarioError::UnknownOperation { section: "build", index, op: op.into() });
            }
        }
    }
    let mut names = Vec::new();
    for (index, check) in list("check").iter().enumerate() {
        let op = op_name(check).unwrap_or("");
        if !CHECK_OPS.contains(&op) {
            return Err(ScenarioError::UnknownOperation { section: "check", index, op: op.into() });
        }
        if let Some(inner) = check.get("step").and_then(op_name) {
            if !BUILD_OPS.contains(&inner) {
                return Err(ScenarioError::UnknownOperation { section: "check", index, op: inner.into() });
            }
        }
        names.push(op.to_string());
    }
    Ok(names)
}

pub fn parse(text: &str) -> Result<(Scenario, Vec<String>), ScenarioError> {
    let raw: Value = serde_json::from_str(text).map_err(parse_error)?;
    let names = scan_ops(&raw)?;
    let scenario: Scenario = serde_json::from_str(text).map_err(parse_error)?;
    Ok((scenario, names))
}

fn validate_refs(s: &Scenario) -> Result<(), ScenarioError> {
    let mut defined: Vec<&str> = Vec::new();
    for (index, step) in s.build.iter().enumerate() {
        for r in step.op.refs() {
            if !defined.contains(&r) {
                return Err(ScenarioError::UnresolvedReference { section: "build", index, name: r.into() });
            }
        }
        if defined.contains(&step.name.as_str()) {
            return Err(ScenarioError::DuplicateName { index, name: step.name.clone() });
        }
        defined.push(&step.name);
    }
    for (index, check) in s.check.iter().enumerate() {
        for r in check.op.refs() {
            if !defined.contains(&r) {
                return Err(ScenarioError::UnresolvedReference { section: "check", index, name: r.into() });
            }
        }
    }
    Ok(())
}

#[derive(Clone)]
enum Obj {
    Grading(Grading),
    Matrix(Mat),
    Dual(DualElem),
}

struct Context {
    field: FieldRef,
    group: AbelianGroup,
    seed: u64,
    objects: BTreeMap<String, Obj>,
}

struct Outcome {
    holds: bool,
    detail: Option<String>,
    witness: Option<Value>,
}

impl Outcome {
    fn plain(holds: bool) -> Outcome {
        Outcome { holds, detail: None, witness: None }
    }

    fn with(holds: bool, detail: impl Into<String>, witness: Option<Value>) -> Outcome {
        Outcome { holds, detail: Some(detail.into()), witness }
    }
}

type Res<T> = Result<T, String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

impl Context {
    fn grading(&self, name: &str) -> Res<&Grading> {
        match self.objects.get(name) {
            Some(Obj::Grading(g)) => Ok(g),
            _ => Err(format!("`{name}` is not a grading")),
        }
    }

    fn dual(&self, name: &str) -> Res<&DualElem> {
        match self.objects.get(name) {
            Some(Obj::Dual(d)) => Ok(d),
            _ => Err(format!("`{name}` is not an element of the dual Hopf algebra")),
        }
    }

    fn matrix(&self, spec: &MatrixSpec) -> Res<Mat> {
        let n = spec.len();
        if n == 0 || spec.iter().any(|r| r.len() != n) {
            return Err("matrix must be square and nonempty".into());
        }
        let f = &self.field;
        let mut data = Vec::with_capacity(n * n);
        for e in spec.iter().flatten() {
            data.push(match e {
                Entry::Int(v) => f.from_int(*v),
                Entry::Coeffs(c) => f.from_coeffs(c).map_err(err)?,
            });
        }
        Ok(Mat::from_vec(f, n, data))
    }

    fn operand(&self, op: &Operand) -> Res<Mat> {
        match op {
            Operand::Matrix(m) => self.matrix(m),
            Operand::Name(n) => match self.objects.get(n) {
                Some(Obj::Matrix(m)) => Ok(m.clone()),
                _ => Err(format!("`{n}` is not a matrix")),
            },
        }
    }

    fn elem(&self, group: &AbelianGroup, exps: &[i64]) -> Res<GroupElem> {
        group.elem(exps).map_err(err)
    }

    fn involution(&self, spec: &InvSpec, n: usize) -> Res<Involution> {
        let f = &self.field;
        match spec {
            InvSpec::Named(s) => match s.as_str() {
                "transpose" => Ok(Involution::transpose(f, n)),
                "antidiagonal" => Ok(Involution::antidiagonal(f, n)),
                "symplectic" => Involution::symplectic(f, n).ok_or_else(|| "symplectic needs even n".to_string()),
                other => Err(format!("unknown involution `{other}`")),
            },
            InvSpec::Phi { phi } => Involution::new(self.matrix(phi)?).map_err(err),
        }
    }

    fn build(&self, op: &StepOp) -> Res<Obj> {
        let f = &self.field;
        let g = &self.group;
        let grading = |x: Grading| Ok(Obj::Grading(x));
        match op {
            StepOp::Elementary { tuple } => {
                let t = tuple.iter().map(|e| self.elem(g, e)).collect::<Res<Vec<_>>>()?;
                grading(elementary_grading(g, f, t.len(), &t).map_err(err)?)
            }
            StepOp::Trivial { n } => grading(Grading::trivial(g, f, *n)),
            StepOp::Pauli { m, a, b } => {
                let (a, b) = (self.elem(g, a)?, self.elem(g, b)?);
                grading(pauli_grading(g, f, *m, [&a, &b]).map_err(err)?)
            }
            StepOp::Components { n, ambient, components } => {
                let mut comps = Vec::new();
                for c in components {
                    let span = c.span.iter().map(|m| self.matrix(m)).collect::<Res<Vec<_>>>()?;
                    if span.iter().any(|m| m.size() != *n) {
                        return Err(format!("spanning matrices must be {n} x {n}"));
                    }
                    comps.push((self.elem(g, &c.degree)?, Subspace::span(f, *n, &span)));
                }
                grading(Grading::from_components(g, f, *n, *ambient, comps).map_err(err)?)
            }
            StepOp::Tensor { left, right } => {
                grading(tensor_gradings(self.grading(left)?, self.grading(right)?).map_err(err)?)
            }
            StepOp::Conjugate { of, by } => {
                let u = self.matrix(by)?;
                let ui = u.inverse().ok_or("conjugating matrix is singular")?;
                grading(self.grading(of)?.conjugate(&u, &ui))
            }
            StepOp::Factor { of, by } => {
                let src = self.grading(of)?;
                let gens = by.iter().map(|e| self.elem(src.group(), e)).collect::<Res<Vec<_>>>()?;
                grading(src.factor(&gens).map_err(err)?)
            }
            StepOp::Type1 { of } => grading(type1_grading(self.grading(of)?).map_err(err)?),
            StepOp::Type2 { of, phi, h } | StepOp::Type2Full { of, phi, h } => {
                let src = self.grading(of)?;
                let inv = self.involution(phi, src.n())?;
                let h = self.elem(src.group(), h)?;
                let out = if matches!(op, StepOp::Type2 { .. }) {
                    type2_grading(src, &inv, &h)
                } else {
                    type2_full(src, &inv, &h)
                };
                grading(out.map_err(err)?)
            }
            StepOp::ExchangeFamily { a, b, h, mode } => {
                let ga = self.grading(a)?;
                let hs = h.iter().map(|e| self.elem(ga.group(), e)).collect::<Res<Vec<_>>>()?;
                grading(exchange(ga, self.grading(b)?, &hs, *mode).map_err(err)?.family)
            }
            StepOp::Matrix { value } => Ok(Obj::Matrix(self.matrix(value)?)),
            StepOp::DualUnit => Ok(Obj::Dual(DualElem::unit(g, f))),
            StepOp::DualBasis { degree } => Ok(Obj::Dual(DualElem::basis(g, f, &self.elem(g, degree)?))),
            StepOp::Character { label } => {
                let chars = g.multiplicative_characters(f).map_err(err)?;
                let label = g.decompose_by_p(f.characteristic()).g0.elem(label).map_err(err)?;
                let chi = chars.iter().find(|c| c.label == label).ok_or("no character with that label")?;
                Ok(Obj::Dual(lift_mult_char(chi, f)))
            }
            StepOp::AdditiveCharacter { index } => {
                let chars = g.additive_characters(f.characteristic());
                let alpha = chars.get(*index).ok_or_else(|| format!("only {} additive characters", chars.len()))?;
                Ok(Obj::Dual(lift_add_char(alpha, f)))
            }
            StepOp::DividedPower { m } => {
                let basis = divided_power_basis(g, f).map_err(err)?;
                basis.get(*m).cloned().map(Obj::Dual).ok_or_else(|| format!("m must be below {}", basis.len()))
            }
        }
    }

    fn check(&self, op: &CheckOp) -> Res<Outcome> {
        let f = &self.field;
        match op {
            CheckOp::Verify { grading, mode } => {
                let rep = self.grading(grading)?.verify(*mode).map_err(err)?;
                let witness = rep.violations.first().map(|v| {
                    json!({
                        "left": elem_json(&v.left),
                        "right": elem_json(&v.right),
                        "x": mat_json(&v.x),
                        "y": mat_json(&v.y),
                        "product": mat_json(&v.product),
                    })
                });
                let detail = format!("{} pairs, {} violations", rep.pairs_checked, rep.violations.len());
                Ok(Outcome::with(rep.holds(), detail, witness))
            }
            CheckOp::Compatible { a, b } => {
                let (a, b) = (self.grading(a)?, self.grading(b)?);
                let bad = a.incompatibility(b).map_err(err)?.or(b.incompatibility(a).map_err(err)?);
                Ok(match bad {
                    None => Outcome::plain(true),
                    Some(g) => Outcome::with(false, "not compatible", Some(json!({ "degree": elem_json(&g) }))),
                })
            }
            CheckOp::Equal { a, b } => {
                let (a, b) = (self.grading(a)?, self.grading(b)?);
                Ok(Outcome::plain(a == b))
            }
            CheckOp::ModuleAlgebra { grading, mode, generators } => {
                let gr = self.grading(grading)?;
                let gens = match generators {
                    Some(names) => names.iter().map(|n| self.dual(n).cloned()).collect::<Res<Vec<_>>>()?,
                    None => module_generators(gr.group(), f).map_err(err)?,
                };
                let rep = verify_module_algebra(gr, *mode, &gens).map_err(err)?;
                let witness = rep.violations.first().map(|v| {
                    json!({ "generator": v.generator, "x": mat_json(&v.x), "y": mat_json(&v.y) })
                });
                let detail = format!("{} checks, {} violations", rep.checks, rep.violations.len());
                Ok(Outcome::with(rep.holds(), detail, witness))
            }
            CheckOp::Act { dual, grading, x, equals } => {
                let got = self.dual(dual)?.act(self.grading(grading)?, &self.operand(x)?).map_err(err)?;
                let want = self.matrix(equals)?;
                let witness = (got != want).then(|| json!({ "got": mat_json(&got) }));
                Ok(Outcome { holds: got == want, detail: None, witness })
            }
            CheckOp::Grouplike { dual } => Ok(Outcome::plain(self.dual(dual)?.is_grouplike())),
            CheckOp::Primitive { dual } => Ok(Outcome::plain(self.dual(dual)?.is_primitive())),
            CheckOp::Roundtrip { grading } => {
                let gr = self.grading(grading)?;
                Ok(Outcome::plain(regrade_from_action(gr).map_err(err)? == *gr))
            }
            CheckOp::IdentityCriterion { grading } => {
                let rep = check_identity_criterion(self.grading(grading)?).map_err(err)?;
                let holds = !rep.falsification && rep.only_if_consistent != Some(false);
                let witness = json!({
                    "identity_in_r1": rep.identity_in_r1,
                    "associative": rep.associative.holds(),
                    "falsification": rep.falsification,
                });
                Ok(Outcome::with(holds, "identity_criterion", Some(witness)))
            }
            CheckOp::Leibniz { grading, triples } => {
                let rep = generalized_leibniz_check(self.grading(grading)?, self.seed, *triples).map_err(err)?;
                let witness = rep
                    .associative_failures
                    .first()
                    .or(rep.lie_failures.first())
                    .map(|(x, y)| json!({ "x": mat_json(x), "y": mat_json(y) }));
                let detail = format!("q = {}, {} pairs, {} triples", rep.q, rep.pairs_checked, rep.triples_checked);
                Ok(Outcome::with(rep.holds(), detail, witness))
            }
            CheckOp::Martindale { s, lambda } => {
                let s = self.matrix(s)?;
                let n = s.size();
                let ad = LinMap::ad(&s);
                let zeta = LinMap::trace_map(f, n).scale(f.from_int(*lambda));
                let m = martindale_decompose(&ad.add(&zeta)).map_err(err)?;
                Ok(Outcome::plain(m.tau == ad && m.zeta == zeta))
            }
            CheckOp::InvolutionPreserves { grading, phi } => {
                let gr = self.grading(grading)?;
                let inv = self.involution(phi, gr.n())?;
                Ok(match inv.preservation_witness(gr) {
                    None => Outcome::plain(true),
                    Some((g, x)) => Outcome::with(
                        false,
                        "component not preserved",
                        Some(json!({ "degree": elem_json(&g), "x": mat_json(&x), "image": mat_json(&inv.apply(&x)) })),
                    ),
                })
            }
            CheckOp::Exchange { a, b, h, mode } => {
                let ga = self.grading(a)?;
                let hs = h.iter().map(|e| self.elem(ga.group(), e)).collect::<Res<Vec<_>>>()?;
                let rep = exchange(ga, self.grading(b)?, &hs, *mode).map_err(err)?;
                let witness = (!rep.holds()).then(|| {
                    json!({
                        "identity_failures": rep.identity_failures.iter().map(elem_json).collect::<Vec<_>>(),
                        "closure_failures": rep.closure_failures.iter()
                            .map(|(x, y)| json!([elem_json(x), elem_json(y)])).collect::<Vec<_>>(),
                    })
                });
                Ok(Outcome { holds: rep.holds(), detail: None, witness })
            }
            CheckOp::Classify { grading, candidates, expect_type } => {
                let slg = self.grading(grading)?;
                let cands = match candidates {
                    Candidates::Keyword(k) if k == "elementary" => elementary_candidates(slg.group(), f, slg.n()),
                    Candidates::Keyword(k) => return Err(format!("unknown candidate set `{k}`")),
                    Candidates::List(list) => list
                        .iter()
                        .map(|c| {
                            let assoc = self.grading(&c.assoc)?.clone();
                            let twist = match (&c.phi, &c.h) {
                                (Some(phi), Some(h)) => {
                                    Some((self.involution(phi, assoc.n())?, self.elem(assoc.group(), h)?))
                                }
                                (None, None) => None,
                                _ => return Err("a twisted candidate needs both phi and h".to_string()),
                            };
                            Ok(Candidate { assoc, twist })
                        })
                        .collect::<Res<Vec<_>>>()?,
                };
                let verdict = classify_sl_grading(slg, &cands);
                let (kind, index) = match verdict {
                    Classification::TypeI(i) => (TypeSpec::I, Some(i)),
                    Classification::TypeII(i) => (TypeSpec::II, Some(i)),
                    Classification::Unknown => (TypeSpec::Unknown, None),
                };
                let label = match kind {
                    TypeSpec::I => "I",
                    TypeSpec::II => "II",
                    TypeSpec::Unknown => "unknown",
                };
                let witness = json!({ "type": label, "candidate": index });
                Ok(Outcome::with(kind == *expect_type, format!("type {label}"), Some(witness)))
            }
            CheckOp::SupportSubgroup { grading } => {
                let (supp, subgroup) = self.grading(grading)?.support();
                let witness = json!({ "support": supp.iter().map(elem_json).collect::<Vec<_>>() });
                Ok(Outcome::with(subgroup, "support", Some(witness)))
            }
            CheckOp::Fine { grading } => {
                Ok(Outcome::plain(self.grading(grading)?.components().values().all(|s| s.dim() == 1)))
            }
            CheckOp::Dimension { grading, equals } => {
                let d = self.grading(grading)?.total_dim();
                Ok(Outcome::with(d == *equals, format!("dimension {d}"), None))
            }
            CheckOp::Constructs { step } => Ok(match self.build(step) {
                Ok(_) => Outcome::plain(true),
                Err(e) => Outcome::with(false, e, None),
            }),
        }
    }
}

fn setup(s: &Scenario) -> Result<Option<(FieldRef, AbelianGroup)>, ScenarioError> {
    let Some(fs) = &s.field else {
        if s.build.is_empty() && s.check.is_empty() {
            return Ok(None);
        }
        return Err(ScenarioError::MissingField);
    };
    let orders = s.group.as_ref().map(|g| g.orders.clone()).unwrap_or_default();
    let group = AbelianGroup::new(&orders).map_err(|e| ScenarioError::Setup(e.to_string()))?;
    let field = match fs.k {
        Degree::Fixed(k) => glab_core::build_field(fs.p, k),
        Degree::Auto => group.splitting_field(fs.p),
    }
    .map_err(|e| ScenarioError::Setup(e.to_string()))?;
    Ok(Some((field, group)))
}

/// Parses and runs a scenario. Errors are problems with the scenario itself;
/// failing checks are reported in the [`Report`].
pub fn run_scenario(text: &str, opts: &RunOptions) -> Result<Report, ScenarioError> {
    let (scenario, names) = parse(text)?;
    validate_refs(&scenario)?;
    let seed = opts.seed.or(scenario.seed).unwrap_or(0);
    let Some((field, group)) = setup(&scenario)? else {
        return Ok(Report::new(seed, None, None, Vec::new()));
    };
    let mut ctx = Context { field: field.clone(), group: group.clone(), seed, objects: BTreeMap::new() };
    for (index, step) in scenario.build.iter().enumerate() {
        let obj = ctx.build(&step.op).map_err(|message| ScenarioError::Build {
            index,
            name: step.name.clone(),
            message,
        })?;
        ctx.objects.insert(step.name.clone(), obj);
    }
    let entries: Vec<CheckEntry> = scenario
        .check
        .par_iter()
        .zip(names.par_iter())
        .enumerate()
        .map(|(index, (check, op))| {
            let start = Instant::now();
            let result = ctx.check(&check.op);
            let time_ms = opts.timings.then(|| start.elapsed().as_secs_f64() * 1e3);
            let (verdict, observed, detail, witness) = match result {
                Ok(o) => {
                    let v = if o.holds == check.expect { Verdict::Pass } else { Verdict::Fail };
                    (v, Some(o.holds), o.detail, o.witness)
                }
                Err(e) => (Verdict::Error, None, Some(e), None),
            };
            CheckEntry { index, op: op.clone(), verdict, expected: check.expect, observed, detail, witness, time_ms }
        })
        .collect();
    Ok(Report::new(seed, Some(&field), Some(&group), entries))
}
