//! Declarative scenarios: JSON documents declaring rings, Lie algebras,
//! pairs, maps and modules, plus a list of tasks to run against them.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::base_change::{
    comparison_iota, verify_cohomology_base_change, verify_hom_base_change, verify_invariants_base_change, ComparisonCertificate,
};
use crate::cohomology::{build_ce_complex_to, cohomology_up_to, ext_gk, CohomologyReport};
use crate::error::{GkError, Result};
use crate::functors::{
    adjunction_certificate, aq_lambda, forgetful, i_functor, ind, orbit_decomposition, pro, triangle_forgetful_i, triangle_i_counit,
    triangle_ind_counit, triangle_ind_unit, ThetaStableDatum, WeightWindow,
};
use crate::kmodule::{generated_subcomodule, GroupDatum, Weight};
use crate::lattice::Lattice;
use crate::lie::{validate_lie, LieAlgebra};
use crate::matrix::Matrix;
use crate::pair::{dual_gk, hom_space_gk, tensor_gk, validate_pair_module, GKModule, GroupMap, PairDatum, PairMap};
use crate::pbw::divided_power_check;
use crate::ring::{BaseRing, Elem, RingMap};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    #[serde(default)]
    pub lie_algebras: Vec<LieDecl>,
    #[serde(default)]
    pub pairs: Vec<PairDecl>,
    #[serde(default)]
    pub maps: Vec<MapDecl>,
    #[serde(default)]
    pub modules: Vec<ModuleDecl>,
    #[serde(default)]
    pub tasks: Vec<Task>,
}

/// `brackets` holds `[x, y, z, c]` meaning `[x, y] += c z`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LieDecl {
    pub name: String,
    pub ring: String,
    pub basis: Vec<String>,
    #[serde(default)]
    pub brackets: Vec<(String, String, String, Elem)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupDecl {
    Trivial,
    Torus { rank: usize },
    Sl2,
    Chevalley { torus_rank: usize, root: Weight, coroot: Weight },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairDecl {
    pub name: String,
    pub lie: String,
    pub group: GroupDecl,
    pub weights: Vec<Weight>,
    /// `Lie(K) -> g`, one column per basis vector of Lie(K).
    pub psi: Matrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupMapDecl {
    Identity,
    TorusIntoChevalley,
    TorusRestriction(Vec<Vec<i64>>),
    ToTrivial,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDecl {
    pub name: String,
    pub source: String,
    pub target: String,
    pub lie_part: Matrix,
    pub group: GroupMapDecl,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complement: Option<Matrix>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleDecl {
    pub name: String,
    #[serde(flatten)]
    pub kind: ModuleKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModuleKind {
    /// Matrices keyed by Lie algebra basis label; missing ones act by zero.
    Explicit { pair: String, basis: Vec<String>, weights: Vec<Weight>, action: BTreeMap<String, Matrix> },
    Trivial { pair: String, rank: usize },
    Character { pair: String, weight: Weight, scalars: Vec<Elem> },
    Adjoint { pair: String },
    /// The integral highest weight lattice of rank `n + 1` for a pair whose
    /// Lie algebra is sl₂ in the basis (e, h, f).
    Weyl { pair: String, n: usize },
    Tensor { left: String, right: String },
    Dual { of: String },
    Forgetful { map: String, of: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum Task {
    ValidateLie { lie: String },
    ValidateModule { module: String },
    GeneratedSubcomodule { module: String, vectors: Vec<Vec<Elem>>, coefficients: String },
    DividedPowers { module: String },
    Forgetful { map: String, module: String },
    Ind { map: String, module: String, window: WeightWindow },
    Pro { map: String, module: String, window: WeightWindow },
    Induce { map: String, module: String, window: WeightWindow },
    Aq { map: String, nilradical: Matrix, module: String, window: WeightWindow },
    Orbits { datum: ThetaStableDatum, cap: usize },
    Hom { x: String, y: String },
    Cohomology {
        module: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_degree: Option<usize>,
    },
    Ext { x: String, y: String, max_degree: usize },
    Adjunction { map: String, x: String, v: String, window: WeightWindow },
    Triangles { map: String, x: String, v: String, window: WeightWindow },
    CompareIota { over: String, map: String, module: String, window: WeightWindow },
    HomBaseChange { over: String, x: String, y: String },
    InvariantsBaseChange { over: String, module: String },
    CohomologyBaseChange { over: String, module: String },
}

impl Task {
    /// Names of declarations the task refers to, tagged by kind.
    pub fn references(&self) -> Vec<(&'static str, &str)> {
        match self {
            Task::ValidateLie { lie } => vec![("lie", lie)],
            Task::ValidateModule { module }
            | Task::GeneratedSubcomodule { module, .. }
            | Task::DividedPowers { module }
            | Task::Cohomology { module, .. }
            | Task::InvariantsBaseChange { module, .. }
            | Task::CohomologyBaseChange { module, .. } => vec![("module", module)],
            Task::Forgetful { map, module }
            | Task::Ind { map, module, .. }
            | Task::Pro { map, module, .. }
            | Task::Induce { map, module, .. }
            | Task::Aq { map, module, .. }
            | Task::CompareIota { map, module, .. } => vec![("map", map), ("module", module)],
            Task::Orbits { .. } => vec![],
            Task::Hom { x, y } | Task::Ext { x, y, .. } | Task::HomBaseChange { x, y, .. } => {
                vec![("module", x), ("module", y)]
            }
            Task::Adjunction { map, x, v, .. } | Task::Triangles { map, x, v, .. } => {
                vec![("map", map), ("module", x), ("module", v)]
            }
        }
    }

    fn target_ring(&self) -> Option<&str> {
        match self {
            Task::CompareIota { over, .. }
            | Task::HomBaseChange { over, .. }
            | Task::InvariantsBaseChange { over, .. }
            | Task::CohomologyBaseChange { over, .. } => Some(over),
            _ => None,
        }
    }

    pub fn op(&self) -> &'static str {
        match self {
            Task::ValidateLie { .. } => "validate_lie",
            Task::ValidateModule { .. } => "validate_module",
            Task::GeneratedSubcomodule { .. } => "generated_subcomodule",
            Task::DividedPowers { .. } => "divided_powers",
            Task::Forgetful { .. } => "forgetful",
            Task::Ind { .. } => "ind",
            Task::Pro { .. } => "pro",
            Task::Induce { .. } => "induce",
            Task::Aq { .. } => "aq",
            Task::Orbits { .. } => "orbits",
            Task::Hom { .. } => "hom",
            Task::Cohomology { .. } => "cohomology",
            Task::Ext { .. } => "ext",
            Task::Adjunction { .. } => "adjunction",
            Task::Triangles { .. } => "triangles",
            Task::CompareIota { .. } => "compare_iota",
            Task::HomBaseChange { .. } => "hom_base_change",
            Task::InvariantsBaseChange { .. } => "invariants_base_change",
            Task::CohomologyBaseChange { .. } => "cohomology_base_change",
        }
    }
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Scenario> {
        serde_json::from_str(text).map_err(|e| GkError::Parse(e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario serializes");
        s.push('\n');
        s
    }

    pub fn load(path: &std::path::Path) -> Result<Scenario> {
        let text = std::fs::read_to_string(path).map_err(|e| GkError::Parse(format!("{}: {e}", path.display())))?;
        Scenario::parse(&text)
    }
}

/// Resolved declarations of a scenario.
#[derive(Default)]
pub struct Env {
    pub lies: HashMap<String, LieAlgebra>,
    pub pairs: HashMap<String, Arc<PairDatum>>,
    pub maps: HashMap<String, PairMap>,
    pub modules: HashMap<String, GKModule>,
}

fn missing(kind: &str, name: &str) -> GkError {
    GkError::Validation(format!("unknown {kind} `{name}`"))
}

fn context(what: String) -> impl Fn(GkError) -> GkError {
    move |e| match e {
        GkError::Validation(m) => GkError::Validation(format!("{what}: {m}")),
        GkError::Parse(m) => GkError::Parse(format!("{what}: {m}")),
        other => other,
    }
}

impl Env {
    pub fn build(s: &Scenario) -> Result<Env> {
        let mut env = Env::default();
        for d in &s.lie_algebras {
            let ring: BaseRing = d.ring.parse()?;
            let idx = |l: &str| d.basis.iter().position(|b| b == l).ok_or_else(|| GkError::Validation(format!("lie algebra `{}`: unknown basis element `{l}`", d.name)));
            let triples = d
                .brackets
                .iter()
                .map(|(x, y, z, c)| Ok((idx(x)?, idx(y)?, idx(z)?, c.clone())))
                .collect::<Result<Vec<_>>>()?;
            let l = LieAlgebra::from_triples(ring, d.basis.clone(), &triples).map_err(context(format!("lie algebra `{}`", d.name)))?;
            env.lies.insert(d.name.clone(), l);
        }
        for d in &s.pairs {
            let g = env.lies.get(&d.lie).ok_or_else(|| missing("lie algebra", &d.lie))?.clone();
            let group = match &d.group {
                GroupDecl::Trivial => GroupDatum::Trivial,
                GroupDecl::Torus { rank } => GroupDatum::Torus { rank: *rank },
                GroupDecl::Sl2 => GroupDatum::sl2(),
                GroupDecl::Chevalley { torus_rank, root, coroot } => {
                    GroupDatum::Chevalley { torus_rank: *torus_rank, root: root.clone(), coroot: coroot.clone() }
                }
            };
            let psi = reshape(&d.psi, g.dim(), group.lie_dim());
            let p = PairDatum::new(&d.name, g, group, d.weights.clone(), psi).map_err(context(format!("pair `{}`", d.name)))?;
            env.pairs.insert(d.name.clone(), Arc::new(p));
        }
        for d in &s.maps {
            let src = env.pairs.get(&d.source).ok_or_else(|| missing("pair", &d.source))?.clone();
            let tgt = env.pairs.get(&d.target).ok_or_else(|| missing("pair", &d.target))?.clone();
            let lie = reshape(&d.lie_part, tgt.g().dim(), src.g().dim());
            let group = match &d.group {
                GroupMapDecl::Identity => GroupMap::Identity,
                GroupMapDecl::TorusIntoChevalley => GroupMap::TorusIntoChevalley,
                GroupMapDecl::TorusRestriction(r) => GroupMap::TorusRestriction(r.clone()),
                GroupMapDecl::ToTrivial => GroupMap::ToTrivial,
            };
            let comp = d.complement.as_ref().map(|c| reshape(c, tgt.g().dim(), c.cols()));
            let m = PairMap::new(src, tgt, lie, group, comp).map_err(context(format!("map `{}`", d.name)))?;
            env.maps.insert(d.name.clone(), m);
        }
        for d in &s.modules {
            let m = env.module_from(&d.kind).map_err(context(format!("module `{}`", d.name)))?;
            env.modules.insert(d.name.clone(), m);
        }
        Ok(env)
    }

    fn pair(&self, name: &str) -> Result<Arc<PairDatum>> {
        self.pairs.get(name).cloned().ok_or_else(|| missing("pair", name))
    }

    pub fn map(&self, name: &str) -> Result<&PairMap> {
        self.maps.get(name).ok_or_else(|| missing("map", name))
    }

    pub fn module(&self, name: &str) -> Result<&GKModule> {
        self.modules.get(name).ok_or_else(|| missing("module", name))
    }

    fn module_from(&self, k: &ModuleKind) -> Result<GKModule> {
        match k {
            ModuleKind::Explicit { pair, basis, weights, action } => {
                let p = self.pair(pair)?;
                let n = basis.len();
                let labels = p.g().labels();
                for key in action.keys() {
                    if !labels.contains(key) {
                        return Err(GkError::Validation(format!("`{key}` is not a basis element of {}", p.g().labels().join(","))));
                    }
                }
                let mats = labels.iter().map(|l| action.get(l).map(|m| reshape(m, n, n)).unwrap_or_else(|| Matrix::zeros(n, n))).collect();
                GKModule::new(p, basis.clone(), weights.clone(), mats)
            }
            ModuleKind::Trivial { pair, rank } => Ok(GKModule::trivial(self.pair(pair)?, *rank)),
            ModuleKind::Character { pair, weight, scalars } => GKModule::character(self.pair(pair)?, weight.clone(), scalars.clone()),
            ModuleKind::Adjoint { pair } => GKModule::adjoint(self.pair(pair)?),
            ModuleKind::Weyl { pair, n } => {
                let p = self.pair(pair)?;
                if p.g().dim() != 3 {
                    return Err(GkError::Validation("Weyl lattices need sl₂ in the basis (e, h, f)".into()));
                }
                let (e, h, f) = crate::models::weyl_matrices(*n);
                let labels = (0..=*n).map(|i| format!("v{}", *n as i64 - 2 * i as i64)).collect();
                let rank = p.torus_rank();
                let weights = crate::models::weyl_weights(*n).into_iter().map(|w| if rank == 0 { vec![] } else { w }).collect();
                GKModule::new(p, labels, weights, vec![e, h, f])
            }
            ModuleKind::Tensor { left, right } => tensor_gk(self.module(left)?, self.module(right)?),
            ModuleKind::Dual { of } => dual_gk(self.module(of)?),
            ModuleKind::Forgetful { map, of } => forgetful(self.map(map)?, self.module(of)?),
        }
    }
}

/// JSON cannot carry the column count of a matrix without rows (or the row
/// count of one without columns).
fn reshape(m: &Matrix, rows: usize, cols: usize) -> Matrix {
    if (m.rows() == 0 || m.cols() == 0) && (m.rows() == rows || m.rows() == 0) {
        return Matrix::zeros(rows, cols);
    }
    m.clone()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Downgraded,
    Failed,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TaskOutcome {
    pub index: usize,
    pub op: String,
    pub input: Value,
    pub status: Status,
    pub lines: Vec<String>,
    pub data: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ErrorInfo {
    pub code: i32,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub scenario: String,
    pub version: String,
    pub tasks: Vec<TaskOutcome>,
    pub warnings: Vec<String>,
    /// Microseconds per task; not part of the deterministic output.
    pub timing: Vec<u128>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

impl Report {
    /// Process exit code: inconsistencies and failed checks dominate, then the
    /// first failing task; downgraded certificates only warn.
    pub fn exit_code(&self) -> i32 {
        let codes: Vec<i32> = self.tasks.iter().filter_map(|t| t.error.as_ref().map(|e| e.code)).collect();
        if codes.contains(&4) || self.tasks.iter().any(|t| t.status == Status::Failed) {
            4
        } else if let Some(&c) = codes.first() {
            c
        } else {
            0
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Text => {
                let mut s = String::new();
                let _ = writeln!(s, "scenario {} (gk {})", self.scenario, self.version);
                for t in &self.tasks {
                    let status = match t.status {
                        Status::Ok => "ok",
                        Status::Downgraded => "ok (informational)",
                        Status::Failed => "FAILED",
                        Status::Error => "error",
                    };
                    let _ = writeln!(s, "[{}] {}: {}", t.index, t.op, status);
                    for l in &t.lines {
                        let _ = writeln!(s, "    {l}");
                    }
                    if let Some(e) = &t.error {
                        let _ = writeln!(s, "    error (exit {}): {}", e.code, e.message);
                    }
                }
                for w in &self.warnings {
                    let _ = writeln!(s, "warning: {w}");
                }
                let _ = writeln!(s, "timing:");
                for (i, us) in self.timing.iter().enumerate() {
                    let _ = writeln!(s, "    [{i}] {us} us");
                }
                s
            }
        }
    }
}

/// Removes the timing section from rendered output.
pub fn strip_timing(rendered: &str, format: Format) -> String {
    match format {
        Format::Text => rendered.split("\ntiming:\n").next().unwrap_or("").to_string(),
        Format::Json => {
            let mut v: Value = serde_json::from_str(rendered).unwrap_or(Value::Null);
            if let Some(o) = v.as_object_mut() {
                o.remove("timing");
            }
            v.to_string()
        }
    }
}

struct Outcome {
    status: Status,
    lines: Vec<String>,
    data: Value,
}

impl Outcome {
    fn ok(lines: Vec<String>, data: Value) -> Self {
        Outcome { status: Status::Ok, lines, data }
    }

    fn check(pass: bool, lines: Vec<String>, data: Value) -> Self {
        Outcome { status: if pass { Status::Ok } else { Status::Failed }, lines, data }
    }
}

fn fmt_weight(w: &[i64]) -> String {
    let p: Vec<String> = w.iter().map(|x| x.to_string()).collect();
    format!("({})", p.join(","))
}

fn graded_line(m: &GKModule) -> String {
    let parts: Vec<String> = m.graded_ranks().iter().map(|(w, r)| format!("{}:{r}", fmt_weight(w))).collect();
    format!("graded ranks {}", if parts.is_empty() { "none".into() } else { parts.join(" ") })
}

fn matrix_lines(name: &str, m: &Matrix) -> Vec<String> {
    let mut out = vec![format!("{name} ({}x{}):", m.rows(), m.cols())];
    for r in m.to_rows() {
        let e: Vec<String> = r.iter().map(|x| x.to_string()).collect();
        out.push(format!("  [{}]", e.join(", ")));
    }
    out
}

fn module_json(m: &GKModule) -> Value {
    let action: BTreeMap<String, &Matrix> = m.pair().g().labels().iter().cloned().zip(m.action()).collect();
    json!({
        "ring": m.ring().to_string(),
        "pair": m.pair().name(),
        "rank": m.dim(),
        "closed": m.is_closed(),
        "basis": m.labels(),
        "weights": m.weights(),
        "action": action,
    })
}

fn certificate_outcome(c: ComparisonCertificate) -> Outcome {
    let status = if !c.claimed {
        Status::Downgraded
    } else if c.is_iso() {
        Status::Ok
    } else {
        Status::Failed
    };
    let mut lines = vec![c.to_string()];
    lines.extend(c.notes.iter().map(|n| format!("note: {n}")));
    let data = serde_json::to_value(&c).expect("certificate serializes");
    Outcome { status, lines, data }
}

fn cohomology_outcome(r: &CohomologyReport) -> Outcome {
    let lines = r.to_string().lines().map(String::from).collect();
    Outcome::ok(lines, serde_json::to_value(r).expect("report serializes"))
}

fn ring_map_to(from: &BaseRing, over: &str) -> Result<RingMap> {
    let target: BaseRing = over.parse()?;
    RingMap::new(from.clone(), target)
}

fn run_task(env: &Env, task: &Task) -> Result<Outcome> {
    match task {
        Task::ValidateLie { lie } => {
            let l = env.lies.get(lie).ok_or_else(|| missing("lie algebra", lie))?;
            let r = validate_lie(l);
            if !r.passed() {
                return Err(GkError::Validation(r.to_string()));
            }
            Ok(Outcome::ok(vec![format!("{lie}: rank {} over {}, pass", l.dim(), l.ring())], json!({"rank": l.dim()})))
        }
        Task::ValidateModule { module } => {
            let m = env.module(module)?;
            let r = validate_pair_module(m);
            if !r.passed() {
                return Err(GkError::Validation(r.to_string()));
            }
            Ok(Outcome::ok(vec![format!("{module}: rank {}, pass", m.dim()), graded_line(m)], module_json(m)))
        }
        Task::GeneratedSubcomodule { module, vectors, coefficients } => {
            let m = env.module(module)?;
            let k = m.k_module()?;
            let coeff: BaseRing = coefficients.parse()?;
            let l = generated_subcomodule(&k, vectors, &coeff);
            let (basis, weights) = crate::kmodule::homogeneous_basis(&k, &l);
            let mut lines = vec![format!("rank {} over {coeff}", l.rank())];
            lines.extend(matrix_lines("basis", &basis));
            let mut data = json!({"rank": l.rank(), "basis": basis, "weights": weights});
            if let Some(ops) = k.operators() {
                let sub = Lattice::from_basis_unchecked(&coeff, basis.clone());
                let e = sub.coordinates_matrix(&(&ops.e * &basis));
                let f = sub.coordinates_matrix(&(&ops.f * &basis));
                if let (Some(e), Some(f)) = (e, f) {
                    lines.extend(matrix_lines("E", &e));
                    lines.extend(matrix_lines("F", &f));
                    data["e"] = serde_json::to_value(&e).unwrap();
                    data["f"] = serde_json::to_value(&f).unwrap();
                }
            }
            Ok(Outcome::ok(lines, data))
        }
        Task::DividedPowers { module } => {
            let m = env.module(module)?;
            let ring = m.ring().clone();
            let pair = m.pair();
            let r = pair.torus_rank();
            if !matches!(pair.group(), GroupDatum::Chevalley { .. }) {
                return Err(GkError::Precondition("divided powers need a Chevalley datum".into()));
            }
            let e = m.act(&pair.psi().column(0));
            let f = m.act(&pair.psi().column(r + 1));
            let order = |n: &Matrix| crate::pbw::nilpotency_order(n).ok_or_else(|| GkError::Validation("operator is not nilpotent".into()));
            let de = divided_power_check(&ring, &e, order(&e)?)?;
            let df = divided_power_check(&ring, &f, order(&f)?)?;
            let pass = de.passed() && df.passed();
            let mut lines = vec![format!("e: {}", if de.passed() { "pass" } else { "fail" }), format!("f: {}", if df.passed() { "pass" } else { "fail" })];
            if let Some((j, c, r)) = de.witness.or(df.witness) {
                lines.push(format!("witness: N^({j})/{j}! entry ({r}, {c}) is not integral"));
            }
            Ok(Outcome::ok(lines, json!({"passed": pass})))
        }
        Task::Forgetful { map, module } => {
            let m = forgetful(env.map(map)?, env.module(module)?)?;
            Ok(Outcome::ok(vec![format!("rank {}", m.dim()), graded_line(&m)], module_json(&m)))
        }
        Task::Ind { map, module, window } => {
            let r = ind(env.map(map)?, env.module(module)?, window)?;
            Ok(Outcome::ok(window_lines(&r.module), module_json(&r.module)))
        }
        Task::Pro { map, module, window } => {
            let r = pro(env.map(map)?, env.module(module)?, window)?;
            Ok(Outcome::ok(window_lines(&r.module), module_json(&r.module)))
        }
        Task::Induce { map, module, window } => {
            let r = i_functor(env.map(map)?, env.module(module)?, window)?;
            let mut lines = window_lines(&r.module);
            lines.extend(matrix_lines("lattice (columns in pro coordinates)", &r.embedding));
            let mut data = module_json(&r.module);
            data["embedding"] = serde_json::to_value(&r.embedding).unwrap();
            Ok(Outcome::ok(lines, data))
        }
        Task::Aq { map, nilradical, module, window } => {
            let f = env.map(map)?;
            let u = reshape(nilradical, f.source().g().dim(), nilradical.cols());
            let r = aq_lambda(f, &u, env.module(module)?, window)?;
            Ok(Outcome::ok(window_lines(&r.module), module_json(&r.module)))
        }
        Task::Orbits { datum, cap } => {
            let blocks = orbit_decomposition(datum, *cap)?;
            let lines = blocks
                .iter()
                .map(|b| format!("block {:?}: {} monomials{}", b.label, b.monomials.len(), if b.complete { "" } else { " (truncated)" }))
                .collect();
            Ok(Outcome::ok(lines, serde_json::to_value(&blocks).unwrap()))
        }
        Task::Hom { x, y } => {
            let h = hom_space_gk(env.module(x)?, env.module(y)?)?;
            Ok(Outcome::ok(vec![format!("rank {}", h.rank())], json!({"rank": h.rank(), "basis": h.basis()})))
        }
        Task::Cohomology { module, max_degree } => {
            let m = env.module(module)?;
            let (c, report) = cohomology_up_to(m.pair(), m, max_degree.unwrap_or(usize::MAX))?;
            let mut out = cohomology_outcome(&report);
            let ranks: Vec<usize> = c.ranks().into_iter().take(report.degrees.len()).collect();
            out.lines.insert(0, format!("cochain ranks {ranks:?}"));
            Ok(out)
        }
        Task::Ext { x, y, max_degree } => Ok(cohomology_outcome(&ext_gk(env.module(x)?, env.module(y)?, *max_degree)?)),
        Task::Adjunction { map, x, v, window } => {
            let ev = adjunction_certificate(env.map(map)?, env.module(x)?, env.module(v)?, window)?;
            let d: Vec<String> = ev.divisors.iter().map(|x| x.to_string()).collect();
            let lines = vec![format!(
                "Hom(X, I V) rank {} -> Hom(F X, V) rank {}, divisors [{}]: {}",
                ev.lhs_rank,
                ev.rhs_rank,
                d.join(", "),
                if ev.iso { "iso" } else { "not iso" }
            )];
            Ok(Outcome::check(ev.iso, lines, serde_json::to_value(&ev).unwrap()))
        }
        Task::Triangles { map, x, v, window } => {
            let f = env.map(map)?;
            let (x, v) = (env.module(x)?, env.module(v)?);
            // The I-side triangles only make sense when I(V) is finite on the window.
            let optional = |r: Result<bool>| match r {
                Ok(b) => Ok(Some(b)),
                Err(GkError::Unsupported(_) | GkError::BoundaryLoss(_)) => Ok(None),
                Err(e) => Err(e),
            };
            let mut checks = vec![
                ("eps_FX . F(eta_X) = id", optional(triangle_forgetful_i(f, x, window))?),
                ("I(eps_V) . eta_IV = id", optional(triangle_i_counit(f, v, window))?),
            ];
            if *f.group_part() == GroupMap::Identity && f.complement().is_some() {
                checks.push(("ind unit triangle", Some(triangle_ind_unit(f, v, window)?)));
                checks.push(("ind counit triangle", Some(triangle_ind_counit(f, x, window)?)));
            }
            if checks.iter().all(|(_, c)| c.is_none()) {
                return Err(GkError::BoundaryLoss("no triangle identity is checkable on this window".into()));
            }
            let pass = checks.iter().all(|(_, c)| c.unwrap_or(true));
            let lines = checks
                .iter()
                .map(|(name, c)| match c {
                    Some(b) => format!("{name}: {b}"),
                    None => format!("{name}: n/a (I(V) not finite on the window)"),
                })
                .collect();
            let data: serde_json::Map<String, Value> =
                checks.iter().map(|(name, c)| (name.to_string(), json!(c))).collect();
            Ok(Outcome::check(pass, lines, json!({"passed": pass, "checks": data})))
        }
        Task::CompareIota { over, map, module, window } => {
            let w = env.module(module)?;
            let f = ring_map_to(w.ring(), over)?;
            Ok(certificate_outcome(comparison_iota(&f, env.map(map)?, w, window)?))
        }
        Task::HomBaseChange { over, x, y } => {
            let x = env.module(x)?;
            let f = ring_map_to(x.ring(), over)?;
            Ok(certificate_outcome(verify_hom_base_change(&f, x, env.module(y)?)?))
        }
        Task::InvariantsBaseChange { over, module } => {
            let m = env.module(module)?;
            let f = ring_map_to(m.ring(), over)?;
            Ok(certificate_outcome(verify_invariants_base_change(&f, &m.k_module()?)?))
        }
        Task::CohomologyBaseChange { over, module } => {
            let m = env.module(module)?;
            let f = ring_map_to(m.ring(), over)?;
            let c = build_ce_complex_to(m.pair(), m, usize::MAX)?;
            let (cert, before, after) = verify_cohomology_base_change(&f, &c)?;
            let mut out = certificate_outcome(cert);
            out.lines = vec![out.lines[0].clone()];
            out.lines.extend(before.to_string().lines().map(|l| format!("{}: {l}", before.ring)));
            out.lines.extend(after.to_string().lines().map(|l| format!("{}: {l}", after.ring)));
            Ok(out)
        }
    }
}

fn window_lines(m: &GKModule) -> Vec<String> {
    vec![format!("rank {} on the window{}", m.dim(), if m.is_closed() { "" } else { " (meets the boundary)" }), graded_line(m)]
}

/// Parses declarations and checks them without running tasks.
pub fn validate_scenario(s: &Scenario) -> Result<Env> {
    let env = Env::build(s)?;
    for (i, t) in s.tasks.iter().enumerate() {
        let at = context(format!("task {i} ({})", t.op()));
        for (kind, name) in t.references() {
            let found = match kind {
                "lie" => env.lies.contains_key(name),
                "map" => env.maps.contains_key(name),
                _ => env.modules.contains_key(name),
            };
            if !found {
                return Err(at(missing(kind, name)));
            }
        }
        if let Some(over) = t.target_ring() {
            over.parse::<BaseRing>().map_err(&at)?;
        }
    }
    Ok(env)
}

/// Runs all tasks in order. Declaration errors abort the run; task errors
/// are recorded and the remaining tasks still run.
pub fn run_scenario(s: &Scenario) -> Result<Report> {
    let env = Env::build(s)?;
    let mut report = Report { scenario: s.name.clone(), version: env!("CARGO_PKG_VERSION").into(), tasks: vec![], warnings: vec![], timing: vec![] };
    for (index, task) in s.tasks.iter().enumerate() {
        let start = Instant::now();
        let input = serde_json::to_value(task).expect("task serializes");
        let outcome = match run_task(&env, task) {
            Ok(o) => TaskOutcome { index, op: task.op().into(), input, status: o.status, lines: o.lines, data: o.data, error: None },
            Err(e) => TaskOutcome {
                index,
                op: task.op().into(),
                input,
                status: Status::Error,
                lines: vec![],
                data: Value::Null,
                error: Some(ErrorInfo { code: e.exit_code(), message: e.to_string() }),
            },
        };
        if outcome.status == Status::Downgraded {
            report.warnings.push(format!("task {index} ({}): hypotheses not met, certificate is informational", outcome.op));
        }
        if outcome.status == Status::Failed {
            report.warnings.push(format!("task {index} ({}): check failed", outcome.op));
        }
        report.tasks.push(outcome);
        report.timing.push(start.elapsed().as_micros());
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"{
        "name": "small",
        "lie_algebras": [{"name": "sl2", "ring": "Z", "basis": ["e", "h", "f"],
            "brackets": [["e", "f", "h", 1], ["h", "e", "e", 2], ["h", "f", "f", -2]]}],
        "pairs": [{"name": "sl2T", "lie": "sl2", "group": {"torus": {"rank": 1}}, "weights": [[2], [0], [-2]], "psi": [[0], [1], [0]]}],
        "modules": [{"name": "V2", "kind": "weyl", "pair": "sl2T", "n": 2}],
        "tasks": [{"op": "validate_module", "module": "V2"}, {"op": "hom", "x": "V2", "y": "V2"}]
    }"#;

    #[test]
    fn round_trip() {
        let s = Scenario::parse(SMALL).unwrap();
        assert_eq!(Scenario::parse(&s.to_text()).unwrap(), s);
    }

    #[test]
    fn runs() {
        let s = Scenario::parse(SMALL).unwrap();
        let r = run_scenario(&s).unwrap();
        assert_eq!(r.exit_code(), 0);
        assert_eq!(r.tasks[1].data["rank"], 1);
    }

    #[test]
    fn empty_task_list() {
        let s = Scenario::parse(r#"{"name": "empty"}"#).unwrap();
        let r = run_scenario(&s).unwrap();
        assert!(r.tasks.is_empty());
        assert_eq!(r.exit_code(), 0);
        assert_eq!(strip_timing(&r.render(Format::Text), Format::Text), "scenario empty (gk 0.1.0)");
    }

    #[test]
    fn jacobi_violation_is_a_validation_error() {
        let bad = SMALL.replace(r#"["h", "f", "f", -2]"#, r#"["h", "f", "f", -3]"#);
        let e = run_scenario(&Scenario::parse(&bad).unwrap()).unwrap_err();
        assert_eq!(e.exit_code(), 3);
        assert!(e.to_string().contains("Jacobi"), "{e}");
    }
}
