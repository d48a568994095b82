//! Pairs (g, K), (g, K)-modules, morphisms of pairs, and the closed monoidal
//! structure on finite free modules.

use std::fmt;
use std::sync::Arc;

use crate::error::{GkError, Result};
use crate::kmodule::{add_weights, sub_weights, GroupDatum, KModule, Weight};
use crate::lattice::Lattice;
use crate::lie::LieAlgebra;
use crate::matrix::Matrix;
use crate::ring::{BaseRing, Elem, RingMap};
use crate::snf::{kernel_basis, smith_normal_form, Track};

/// A pair `(g, K)`: a Lie algebra with weight-homogeneous basis, a group
/// datum, and `psi: Lie(K) -> g` (columns are images of the Lie(K) basis).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairDatum {
    name: String,
    g: LieAlgebra,
    group: GroupDatum,
    k: LieAlgebra,
    adjoint: KModule,
    psi: Matrix,
}

impl PairDatum {
    /// Validates the pair axioms: `psi` is a Lie homomorphism, it is
    /// equivariant, and the differential of the K-action on `g` is `ad psi`.
    pub fn new(name: &str, g: LieAlgebra, group: GroupDatum, g_weights: Vec<Weight>, psi: Matrix) -> Result<Self> {
        let ring = g.ring().clone();
        let k = group.lie_algebra(&ring);
        if psi.shape() != (g.dim(), k.dim()) {
            return Err(GkError::Validation(format!("psi has shape {:?}, expected {}x{}", psi.shape(), g.dim(), k.dim())));
        }
        if !g.is_homomorphism_from(&k, &psi) {
            return Err(GkError::Validation("psi is not a Lie algebra homomorphism".into()));
        }
        let ops = match &group {
            GroupDatum::Chevalley { torus_rank, .. } => {
                Some((g.ad(&psi.column(0)), g.ad(&psi.column(torus_rank + 1))))
            }
            _ => None,
        };
        let adjoint = KModule::from_parts(ring, group.clone(), g.labels().to_vec(), g_weights, ops)
            .map_err(|e| GkError::Validation(format!("adjoint K-structure: {e}")))?;
        // equivariance of psi: psi(xi) has the weight of xi
        for (xi, w) in group.lie_weights().iter().enumerate() {
            for (i, c) in psi.column(xi).iter().enumerate() {
                if !c.is_zero() && &adjoint.weights()[i] != w {
                    return Err(GkError::Validation(format!("psi is not weight preserving on Lie(K) basis {xi}")));
                }
            }
        }
        for xi in 0..k.dim() {
            if adjoint.lie_action(xi) != g.ad(&psi.column(xi)) {
                return Err(GkError::Validation(format!(
                    "differential of the K-action differs from [psi({}), -]",
                    k.labels()[xi]
                )));
            }
        }
        Ok(PairDatum { name: name.to_string(), g, group, k, adjoint, psi })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn g(&self) -> &LieAlgebra {
        &self.g
    }

    pub fn k(&self) -> &LieAlgebra {
        &self.k
    }

    pub fn group(&self) -> &GroupDatum {
        &self.group
    }

    pub fn adjoint(&self) -> &KModule {
        &self.adjoint
    }

    pub fn psi(&self) -> &Matrix {
        &self.psi
    }

    pub fn ring(&self) -> &BaseRing {
        self.g.ring()
    }

    pub fn g_weights(&self) -> &[Weight] {
        self.adjoint.weights()
    }

    pub fn torus_rank(&self) -> usize {
        self.group.torus_rank()
    }

    pub fn base_change(&self, f: &RingMap) -> Result<PairDatum> {
        PairDatum::new(&self.name, self.g.base_change(f)?, self.group.clone(), self.g_weights().to_vec(), self.psi.apply_ring_map(f)?)
    }

    /// The same Lie algebra with the diagonalizable group replaced, used for
    /// intermediate pairs `(g, M)`.
    pub fn with_group(&self, name: &str, group: GroupDatum, weights: Vec<Weight>, psi: Matrix) -> Result<PairDatum> {
        PairDatum::new(name, self.g.clone(), group, weights, psi)
    }
}

/// Failures reported by [`validate_pair_module`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModuleViolation {
    Shape(String),
    NotInRing { x: usize },
    LieHomomorphism { x: usize, y: usize, column: usize },
    WeightShift { x: usize, column: usize },
    KActions { xi: usize },
    KStructure(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleReport {
    pub violation: Option<ModuleViolation>,
}

impl ModuleReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

impl fmt::Display for ModuleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.violation {
            None => write!(f, "pass"),
            Some(ModuleViolation::Shape(m)) => write!(f, "shape: {m}"),
            Some(ModuleViolation::NotInRing { x }) => write!(f, "action of basis element {x} not over the base ring"),
            Some(ModuleViolation::LieHomomorphism { x, y, column }) => {
                write!(f, "pi([x{x},x{y}]) != [pi(x{x}),pi(x{y})] on basis vector {column}")
            }
            Some(ModuleViolation::WeightShift { x, column }) => {
                write!(f, "action of x{x} is not weight additive on basis vector {column}")
            }
            Some(ModuleViolation::KActions { xi }) => write!(f, "the two actions of Lie(K) basis element {xi} differ"),
            Some(ModuleViolation::KStructure(m)) => write!(f, "K-structure: {m}"),
        }
    }
}

/// Out-of-window part of a truncated module: basis vectors just outside the
/// window and the components of the action landing on them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Boundary {
    pub labels: Vec<String>,
    pub weights: Vec<Weight>,
    /// One matrix per basis element of g, of shape `labels.len() x dim`.
    pub action: Vec<Matrix>,
}

impl Boundary {
    pub fn is_trivial(&self) -> bool {
        self.action.iter().all(Matrix::is_zero)
    }
}

/// A (g, K)-module on a free module with weight-homogeneous basis, possibly
/// truncated to a window (then `boundary` records what leaves it).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GKModule {
    pair: Arc<PairDatum>,
    labels: Vec<String>,
    weights: Vec<Weight>,
    action: Vec<Matrix>,
    boundary: Option<Boundary>,
}

impl GKModule {
    /// Builds and validates a finite module.
    pub fn new(pair: Arc<PairDatum>, labels: Vec<String>, weights: Vec<Weight>, action: Vec<Matrix>) -> Result<Self> {
        let m = GKModule { pair, labels, weights, action, boundary: None };
        let report = validate_pair_module(&m);
        if !report.passed() {
            return Err(GkError::Validation(report.to_string()));
        }
        Ok(m)
    }

    /// Builds without validation.
    pub fn new_unchecked(pair: Arc<PairDatum>, labels: Vec<String>, weights: Vec<Weight>, action: Vec<Matrix>, boundary: Option<Boundary>) -> Self {
        let boundary = boundary.filter(|b| !b.labels.is_empty());
        GKModule { pair, labels, weights, action, boundary }
    }

    /// Builds a windowed module and validates it on interior columns.
    pub fn windowed(pair: Arc<PairDatum>, labels: Vec<String>, weights: Vec<Weight>, action: Vec<Matrix>, boundary: Option<Boundary>) -> Result<Self> {
        let m = GKModule::new_unchecked(pair, labels, weights, action, boundary);
        let report = validate_pair_module(&m);
        if !report.passed() {
            return Err(GkError::Validation(report.to_string()));
        }
        Ok(m)
    }

    pub fn trivial(pair: Arc<PairDatum>, rank: usize) -> Self {
        let n = pair.g().dim();
        let r = pair.torus_rank();
        GKModule {
            labels: (0..rank).map(|i| format!("t{i}")).collect(),
            weights: vec![vec![0; r]; rank],
            action: vec![Matrix::zeros(rank, rank); n],
            boundary: None,
            pair,
        }
    }

    /// The rank-one module of a character; g acts through the weight on
    /// Lie(K) and by zero on a chosen complement, so this requires `g` to be
    /// the image of Lie(K) plus an ideal acting trivially. Validated.
    pub fn character(pair: Arc<PairDatum>, weight: Weight, action_scalars: Vec<Elem>) -> Result<Self> {
        let action = action_scalars.into_iter().map(|c| Matrix::from_rows(vec![vec![c]]).unwrap()).collect();
        GKModule::new(pair, vec!["1".into()], vec![weight], action)
    }

    /// `g` acting on itself by the bracket.
    pub fn adjoint(pair: Arc<PairDatum>) -> Result<Self> {
        let g = pair.g().clone();
        let action = (0..g.dim()).map(|i| g.ad_basis(i)).collect();
        GKModule::new(pair.clone(), g.labels().to_vec(), pair.g_weights().to_vec(), action)
    }

    pub fn pair(&self) -> &Arc<PairDatum> {
        &self.pair
    }

    pub fn ring(&self) -> &BaseRing {
        self.pair.ring()
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn action(&self) -> &[Matrix] {
        &self.action
    }

    pub fn action_of(&self, i: usize) -> &Matrix {
        &self.action[i]
    }

    pub fn boundary(&self) -> Option<&Boundary> {
        self.boundary.as_ref()
    }

    pub fn is_windowed(&self) -> bool {
        self.boundary.is_some()
    }

    /// True when no action leaves the window.
    pub fn is_closed(&self) -> bool {
        self.boundary.as_ref().is_none_or(Boundary::is_trivial)
    }

    /// Forgets the (all-zero) boundary of a closed windowed module.
    pub fn closed(&self) -> Result<Self> {
        if !self.is_closed() {
            return Err(GkError::BoundaryLoss("module has nonzero boundary".into()));
        }
        Ok(GKModule { boundary: None, ..self.clone() })
    }

    /// Action of a general element of g.
    pub fn act(&self, x: &[Elem]) -> Matrix {
        let n = self.dim();
        let mut out = Matrix::zeros(n, n);
        for (i, c) in x.iter().enumerate() {
            if !c.is_zero() {
                out = &out + &self.action[i].scale(c);
            }
        }
        out
    }

    /// Components of the action of `x` leaving the window.
    pub fn boundary_act(&self, x: &[Elem]) -> Option<Matrix> {
        let b = self.boundary.as_ref()?;
        let mut out = Matrix::zeros(b.labels.len(), self.dim());
        for (i, c) in x.iter().enumerate() {
            if !c.is_zero() {
                out = &out + &b.action[i].scale(c);
            }
        }
        Some(out)
    }

    /// The K-structure: weights and, for the Chevalley datum, `pi(psi(e))`,
    /// `pi(psi(f))` with certified divided powers.
    pub fn k_module(&self) -> Result<KModule> {
        let ops = match self.pair.group() {
            GroupDatum::Chevalley { torus_rank, .. } => {
                if !self.is_closed() {
                    return Err(GkError::Unsupported("windowed module for a Chevalley datum".into()));
                }
                let psi = self.pair.psi();
                Some((self.act(&psi.column(0)), self.act(&psi.column(torus_rank + 1))))
            }
            _ => None,
        };
        KModule::from_parts(self.ring().clone(), self.pair.group().clone(), self.labels.clone(), self.weights.clone(), ops)
    }

    /// Graded ranks: number of basis vectors per weight, sorted by weight.
    pub fn graded_ranks(&self) -> Vec<(Weight, usize)> {
        let mut map = std::collections::BTreeMap::new();
        for w in &self.weights {
            *map.entry(w.clone()).or_insert(0usize) += 1;
        }
        map.into_iter().collect()
    }

    pub fn base_change(&self, f: &RingMap) -> Result<GKModule> {
        let pair = Arc::new(self.pair.base_change(f)?);
        let action = self.action.iter().map(|m| m.apply_ring_map(f)).collect::<Result<Vec<_>>>()?;
        let boundary = match &self.boundary {
            Some(b) => Some(Boundary {
                labels: b.labels.clone(),
                weights: b.weights.clone(),
                action: b.action.iter().map(|m| m.apply_ring_map(f)).collect::<Result<Vec<_>>>()?,
            }),
            None => None,
        };
        Ok(GKModule { pair, labels: self.labels.clone(), weights: self.weights.clone(), action, boundary })
    }

    /// Same data over another (equal) pair object.
    pub fn with_pair(&self, pair: Arc<PairDatum>) -> GKModule {
        GKModule { pair, ..self.clone() }
    }

    pub fn direct_sum(&self, other: &GKModule) -> Result<GKModule> {
        if self.pair != other.pair {
            return Err(GkError::Domain("direct sum over different pairs".into()));
        }
        if self.is_windowed() || other.is_windowed() {
            return Err(GkError::Unsupported("direct sum of windowed modules".into()));
        }
        let labels = self.labels.iter().map(|l| format!("{l}.0")).chain(other.labels.iter().map(|l| format!("{l}.1"))).collect();
        let weights = self.weights.iter().chain(&other.weights).cloned().collect();
        let action = self.action.iter().zip(&other.action).map(|(a, b)| a.block_diag(b)).collect();
        Ok(GKModule { pair: self.pair.clone(), labels, weights, action, boundary: None })
    }

    /// Transports the structure along a change of basis `x = P y`
    /// (columns of `p` are the new basis vectors), `p` unimodular.
    pub fn change_basis(&self, p: &Matrix) -> Result<GKModule> {
        if self.is_windowed() {
            return Err(GkError::Unsupported("change of basis on a windowed module".into()));
        }
        let pinv = p.inverse().ok_or_else(|| GkError::Domain("singular change of basis".into()))?;
        if !crate::snf::is_unimodular(self.ring(), p) {
            return Err(GkError::Domain("change of basis is not unimodular".into()));
        }
        let mut weights = Vec::new();
        for j in 0..p.cols() {
            let ws: std::collections::BTreeSet<&Weight> =
                (0..p.rows()).filter(|&i| !p.get(i, j).is_zero()).map(|i| &self.weights[i]).collect();
            if ws.len() != 1 {
                return Err(GkError::Domain("change of basis mixes weights".into()));
            }
            weights.push((*ws.iter().next().unwrap()).clone());
        }
        let action = self.action.iter().map(|a| &(&pinv * a) * p).collect();
        Ok(GKModule { pair: self.pair.clone(), labels: self.labels.clone(), weights, action, boundary: None })
    }

    /// Restriction to a g- and K-stable sublattice given by a
    /// weight-homogeneous basis (columns of `basis`), regarded over `pair`
    /// with the given weights.
    pub fn submodule(&self, basis: &Matrix, pair: Arc<PairDatum>, weights: Vec<Weight>) -> Result<GKModule> {
        let ring = self.ring().clone();
        let sub = Lattice::from_basis_unchecked(&ring, basis.clone());
        let mut action = Vec::with_capacity(self.action.len());
        for (i, a) in self.action.iter().enumerate() {
            if let Some(b) = &self.boundary {
                if !(&b.action[i] * basis).is_zero() {
                    return Err(GkError::BoundaryLoss(format!("action of {} leaves the window", self.pair.g().labels()[i])));
                }
            }
            let c = sub
                .coordinates_matrix(&(a * basis))
                .ok_or_else(|| GkError::Validation(format!("sublattice not stable under {}", self.pair.g().labels()[i])))?;
            action.push(c);
        }
        let labels = (0..basis.cols()).map(|i| format!("s{i}")).collect();
        GKModule::new(pair, labels, weights, action)
    }
}

/// Checks the three module axioms: Lie homomorphism, K-morphism (weight
/// additivity and a valid K-structure), and agreement of the Lie(K)-actions.
pub fn validate_pair_module(v: &GKModule) -> ModuleReport {
    let fail = |x| ModuleReport { violation: Some(x) };
    let g = v.pair.g();
    let n = v.dim();
    let r = v.pair.torus_rank();
    if v.action.len() != g.dim() {
        return fail(ModuleViolation::Shape(format!("{} action matrices for a Lie algebra of rank {}", v.action.len(), g.dim())));
    }
    if v.weights.len() != n || v.weights.iter().any(|w| w.len() != r) {
        return fail(ModuleViolation::Shape("weights do not match basis or torus rank".into()));
    }
    let nb = v.boundary.as_ref().map_or(0, |b| b.labels.len());
    for (x, a) in v.action.iter().enumerate() {
        if a.shape() != (n, n) {
            return fail(ModuleViolation::Shape(format!("action matrix {x} is not {n}x{n}")));
        }
        if let Some(b) = &v.boundary {
            if b.action.len() != g.dim() || b.action[x].shape() != (nb, n) || b.weights.len() != nb {
                return fail(ModuleViolation::Shape("boundary data malformed".into()));
            }
        }
        if !a.is_over(v.ring()) {
            return fail(ModuleViolation::NotInRing { x });
        }
    }
    // weight additivity, including boundary rows
    let gw = v.pair.g_weights();
    for x in 0..g.dim() {
        for col in 0..n {
            let want = add_weights(&v.weights[col], &gw[x]);
            let a = &v.action[x];
            if (0..n).any(|row| !a.get(row, col).is_zero() && v.weights[row] != want) {
                return fail(ModuleViolation::WeightShift { x, column: col });
            }
            if let Some(b) = &v.boundary {
                if (0..nb).any(|row| !b.action[x].get(row, col).is_zero() && b.weights[row] != want) {
                    return fail(ModuleViolation::WeightShift { x, column: col });
                }
            }
        }
    }
    // Lie homomorphism on columns whose images stay in the window
    let full = |x: &[Elem]| -> Matrix {
        let a = v.act(x);
        match v.boundary_act(x) {
            Some(b) => a.vstack(&b),
            None => a,
        }
    };
    let interior = |x: usize, col: usize| -> bool {
        v.boundary.as_ref().is_none_or(|b| (0..nb).all(|row| b.action[x].get(row, col).is_zero()))
    };
    let fulls: Vec<Matrix> = (0..g.dim()).map(|x| full(&g.unit_vector(x))).collect();
    for x in 0..g.dim() {
        for y in x + 1..g.dim() {
            let lhs = full(g.bracket_basis(x, y));
            let rhs = &(&fulls[x] * &v.action[y]) - &(&fulls[y] * &v.action[x]);
            for col in 0..n {
                if !(interior(x, col) && interior(y, col)) {
                    continue;
                }
                if (0..n + nb).any(|row| lhs.get(row, col) != rhs.get(row, col)) {
                    return fail(ModuleViolation::LieHomomorphism { x, y, column: col });
                }
            }
        }
    }
    // the two Lie(K)-actions
    let psi = v.pair.psi();
    let kmod = match v.pair.group() {
        GroupDatum::Chevalley { .. } if v.is_windowed() => None,
        _ => match v.k_module() {
            Ok(k) => Some(k),
            Err(e) => return fail(ModuleViolation::KStructure(e.to_string())),
        },
    };
    if let Some(k) = kmod {
        for xi in 0..v.pair.k().dim() {
            if v.act(&psi.column(xi)) != k.lie_action(xi) {
                return fail(ModuleViolation::KActions { xi });
            }
        }
    } else {
        return fail(ModuleViolation::KStructure("Chevalley datum requires a finite module".into()));
    }
    ModuleReport { violation: None }
}

/// Tensor product with basis index `i * other.dim() + j`. A windowed factor
/// is allowed; its boundary is carried along.
pub fn tensor_gk(v: &GKModule, w: &GKModule) -> Result<GKModule> {
    if v.pair != w.pair {
        return Err(GkError::Domain("tensor product over different pairs".into()));
    }
    let (n, m) = (v.dim(), w.dim());
    let (iv, iw) = (Matrix::identity(n), Matrix::identity(m));
    let mut labels = Vec::new();
    let mut weights = Vec::new();
    for i in 0..n {
        for j in 0..m {
            labels.push(format!("{}*{}", v.labels[i], w.labels[j]));
            weights.push(add_weights(&v.weights[i], &w.weights[j]));
        }
    }
    let action = v.action.iter().zip(&w.action).map(|(a, b)| &a.kron(&iw) + &iv.kron(b)).collect();
    let boundary = if v.boundary.is_none() && w.boundary.is_none() {
        None
    } else {
        let mut bl = Vec::new();
        let mut bw = Vec::new();
        let mut parts: Vec<Matrix> = vec![Matrix::zeros(0, n * m); v.action.len()];
        if let Some(b) = &v.boundary {
            for (i, l) in b.labels.iter().enumerate() {
                for j in 0..m {
                    bl.push(format!("{l}*{}", w.labels[j]));
                    bw.push(add_weights(&b.weights[i], &w.weights[j]));
                }
            }
            for (x, p) in parts.iter_mut().enumerate() {
                *p = p.vstack(&b.action[x].kron(&iw));
            }
        }
        if let Some(b) = &w.boundary {
            for i in 0..n {
                for (j, l) in b.labels.iter().enumerate() {
                    bl.push(format!("{}*{l}", v.labels[i]));
                    bw.push(add_weights(&v.weights[i], &b.weights[j]));
                }
            }
            for (x, p) in parts.iter_mut().enumerate() {
                *p = p.vstack(&iv.kron(&b.action[x]));
            }
        }
        Some(Boundary { labels: bl, weights: bw, action: parts })
    };
    Ok(GKModule::new_unchecked(v.pair.clone(), labels, weights, action, boundary))
}

/// `F(V, V')` with basis index `i' * V.dim() + j` and action
/// `(x f)(v) = x f(v) - f(x v)`.
pub fn internal_hom_gk(v: &GKModule, vp: &GKModule) -> Result<GKModule> {
    if v.pair != vp.pair {
        return Err(GkError::Domain("internal Hom over different pairs".into()));
    }
    if v.is_windowed() || vp.is_windowed() {
        return Err(GkError::Unsupported("internal Hom of windowed modules".into()));
    }
    let (n, m) = (v.dim(), vp.dim());
    let (iv, ivp) = (Matrix::identity(n), Matrix::identity(m));
    let mut labels = Vec::new();
    let mut weights = Vec::new();
    for i in 0..m {
        for j in 0..n {
            labels.push(format!("{}<-{}", vp.labels[i], v.labels[j]));
            weights.push(sub_weights(&vp.weights[i], &v.weights[j]));
        }
    }
    let action = v.action.iter().zip(&vp.action).map(|(a, b)| &b.kron(&iv) - &ivp.kron(&a.transpose())).collect();
    Ok(GKModule::new_unchecked(v.pair.clone(), labels, weights, action, None))
}

/// `V^c = F(V, k)`.
pub fn dual_gk(v: &GKModule) -> Result<GKModule> {
    internal_hom_gk(v, &GKModule::trivial(v.pair.clone(), 1))
}

/// `Hom_{g,K}(X, Y)` as a lattice inside `Hom(X, Y)` (coordinates
/// `i' * X.dim() + j`). `Y` may be windowed; its boundary rows are imposed.
pub fn hom_space_gk(x: &GKModule, y: &GKModule) -> Result<Lattice> {
    if x.pair != y.pair {
        return Err(GkError::Domain("Hom over different pairs".into()));
    }
    if !x.is_closed() {
        return Err(GkError::Unsupported("Hom out of a windowed module".into()));
    }
    let ring = x.ring().clone();
    let (n, m) = (x.dim(), y.dim());
    // unknowns: weight-preserving matrix entries
    let vars: Vec<(usize, usize)> =
        (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| y.weights[i] == x.weights[j]).collect();
    let total = n * m;
    if vars.is_empty() {
        return Ok(Lattice::zero(&ring, total));
    }
    let var_index: std::collections::HashMap<(usize, usize), usize> = vars.iter().enumerate().map(|(k, &p)| (p, k)).collect();
    let nb = y.boundary.as_ref().map_or(0, |b| b.labels.len());
    let mut rows: Vec<Vec<Elem>> = Vec::new();
    for g in 0..x.action.len() {
        let ay = &y.action[g];
        let ax = &x.action[g];
        let by = y.boundary.as_ref().map(|b| &b.action[g]);
        // (A_Y phi - phi A_X)[r, j] for r in window, and (B_Y phi)[r, j]
        for r in 0..m + nb {
            for j in 0..n {
                let mut row = vec![Elem::zero(); vars.len()];
                let mut nonzero = false;
                for i in 0..m {
                    let c = if r < m { ay.get(r, i) } else { by.unwrap().get(r - m, i) };
                    if c.is_zero() {
                        continue;
                    }
                    if let Some(&k) = var_index.get(&(i, j)) {
                        row[k] += c;
                        nonzero = true;
                    }
                }
                if r < m {
                    for k in 0..n {
                        let c = ax.get(k, j);
                        if c.is_zero() {
                            continue;
                        }
                        if let Some(&idx) = var_index.get(&(r, k)) {
                            row[idx] -= c;
                            nonzero = true;
                        }
                    }
                }
                if nonzero && row.iter().any(|c| !c.is_zero()) && !rows.contains(&row) {
                    rows.push(row);
                }
            }
        }
    }
    let sys = if rows.is_empty() {
        Matrix::zeros(0, vars.len())
    } else {
        Matrix::from_rows(rows).expect("rectangular")
    };
    let ker = kernel_basis(&ring, &sys);
    let mut emb = Matrix::zeros(total, vars.len());
    for (k, &(i, j)) in vars.iter().enumerate() {
        emb.set(i * n + j, k, Elem::one());
    }
    Ok(Lattice::from_basis_unchecked(&ring, &emb * &ker))
}

/// How a map of pairs `(q, M) -> (g, K)` acts on groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupMap {
    Identity,
    /// Torus `M -> K` given by the restriction of characters
    /// `X*(K) -> X*(M)` (rows indexed by M).
    TorusRestriction(Vec<Vec<i64>>),
    /// The maximal torus `M = T` of a Chevalley datum `K`.
    TorusIntoChevalley,
    /// `K` trivial.
    ToTrivial,
}

/// A morphism of pairs `(q, M) -> (g, K)`, with an optional complement
/// `ū` of `q` in `g` (columns in g-coordinates).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairMap {
    source: Arc<PairDatum>,
    target: Arc<PairDatum>,
    lie_part: Matrix,
    group_part: GroupMap,
    complement: Option<Matrix>,
    surjective: bool,
}

impl PairMap {
    pub fn new(source: Arc<PairDatum>, target: Arc<PairDatum>, lie_part: Matrix, group_part: GroupMap, complement: Option<Matrix>) -> Result<Self> {
        let (q, g) = (source.g(), target.g());
        if lie_part.shape() != (g.dim(), q.dim()) {
            return Err(GkError::Validation("lie part has wrong shape".into()));
        }
        if !g.is_homomorphism_from(q, &lie_part) {
            return Err(GkError::Validation("lie part is not a Lie algebra homomorphism".into()));
        }
        let rm = source.torus_rank();
        let rk = target.torus_rank();
        // compatibility of the group part with the torus ranks
        match &group_part {
            GroupMap::Identity => {
                if source.group() != target.group() {
                    return Err(GkError::Validation("identity group part between different groups".into()));
                }
            }
            GroupMap::TorusRestriction(r) => {
                if r.len() != rm || r.iter().any(|row| row.len() != rk) || !target.group().is_diagonalizable() {
                    return Err(GkError::Validation("restriction matrix has wrong shape".into()));
                }
            }
            GroupMap::TorusIntoChevalley => {
                if !matches!(target.group(), GroupDatum::Chevalley { .. }) || rm != rk {
                    return Err(GkError::Validation("torus into Chevalley datum of different rank".into()));
                }
            }
            GroupMap::ToTrivial => {
                if target.group() != &GroupDatum::Trivial {
                    return Err(GkError::Validation("target group is not trivial".into()));
                }
            }
        }
        let pm = PairMap { source: source.clone(), target: target.clone(), lie_part: lie_part.clone(), group_part, complement: None, surjective: false };
        // equivariance: weight of q-basis vector y equals the restricted weight of its image
        for y in 0..q.dim() {
            for (i, c) in lie_part.column(y).iter().enumerate() {
                if !c.is_zero() && pm.restrict_weight(&target.g_weights()[i]) != source.g_weights()[y] {
                    return Err(GkError::Validation(format!("lie part not equivariant on {}", q.labels()[y])));
                }
            }
        }
        // lie_part ∘ psi_M = psi_K ∘ Lie(M -> K)
        let dm = pm.lie_of_group_map();
        if &lie_part * source.psi() != target.psi() * &dm {
            return Err(GkError::Validation("lie part incompatible with psi".into()));
        }
        let ring = g.ring();
        let stacked = target.psi().hstack(&lie_part);
        let snf = smith_normal_form(ring, &stacked, Track::NONE)?;
        let surjective = snf.rank() == g.dim() && snf.all_units();
        let mut pm = PairMap { surjective, ..pm };
        if let Some(c) = complement {
            pm.set_complement(c)?;
        }
        Ok(pm)
    }

    fn set_complement(&mut self, c: Matrix) -> Result<()> {
        let g = self.target.g();
        if c.rows() != g.dim() || c.cols() + self.source.g().dim() != g.dim() {
            return Err(GkError::Validation("complement has wrong shape".into()));
        }
        let sum = self.lie_part.hstack(&c);
        if !crate::snf::is_unimodular(g.ring(), &sum) {
            return Err(GkError::Validation("q + ū -> g is not a lattice isomorphism".into()));
        }
        // ū must be a subalgebra
        let span = Lattice::from_basis_unchecked(g.ring(), c.clone());
        for a in 0..c.cols() {
            for b in a + 1..c.cols() {
                if !span.contains_vec(&g.bracket(&c.column(a), &c.column(b))) {
                    return Err(GkError::Validation("complement is not a subalgebra".into()));
                }
            }
        }
        // weight-homogeneous complement vectors
        for a in 0..c.cols() {
            let ws: std::collections::BTreeSet<&Weight> =
                c.column(a).iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, _)| &g_weights(g, &self.target)[i]).collect();
            if ws.len() > 1 {
                return Err(GkError::Validation("complement vector is not weight-homogeneous".into()));
            }
        }
        self.complement = Some(c);
        Ok(())
    }

    pub fn identity(pair: Arc<PairDatum>) -> Self {
        let n = pair.g().dim();
        PairMap::new(pair.clone(), pair, Matrix::identity(n), GroupMap::Identity, Some(Matrix::zeros(n, 0))).expect("identity map")
    }

    pub fn source(&self) -> &Arc<PairDatum> {
        &self.source
    }

    pub fn target(&self) -> &Arc<PairDatum> {
        &self.target
    }

    pub fn lie_part(&self) -> &Matrix {
        &self.lie_part
    }

    pub fn group_part(&self) -> &GroupMap {
        &self.group_part
    }

    pub fn complement(&self) -> Option<&Matrix> {
        self.complement.as_ref()
    }

    /// Whether `k ⊕ q -> g` is onto.
    pub fn is_surjective(&self) -> bool {
        self.surjective
    }

    /// Restriction of a K-weight to an M-weight.
    pub fn restrict_weight(&self, w: &[i64]) -> Weight {
        match &self.group_part {
            GroupMap::Identity | GroupMap::TorusIntoChevalley => w.to_vec(),
            GroupMap::TorusRestriction(r) => r.iter().map(|row| row.iter().zip(w).map(|(a, b)| a * b).sum()).collect(),
            GroupMap::ToTrivial => vec![0; self.source.torus_rank()],
        }
    }

    /// The induced map `Lie(M) -> Lie(K)` as a matrix.
    pub fn lie_of_group_map(&self) -> Matrix {
        let (dm, dk) = (self.source.k().dim(), self.target.k().dim());
        match &self.group_part {
            GroupMap::Identity => Matrix::identity(dm),
            GroupMap::TorusRestriction(r) => Matrix::from_fn(dk, dm, |i, j| Elem::from_int(r[j][i])),
            GroupMap::TorusIntoChevalley => Matrix::from_fn(dk, dm, |i, j| if i == j + 1 { Elem::one() } else { Elem::zero() }),
            GroupMap::ToTrivial => Matrix::zeros(dk, dm),
        }
    }

    pub fn base_change(&self, f: &RingMap) -> Result<PairMap> {
        let s = Arc::new(self.source.base_change(f)?);
        let t = if Arc::ptr_eq(&self.source, &self.target) { s.clone() } else { Arc::new(self.target.base_change(f)?) };
        let c = match &self.complement {
            Some(c) => Some(c.apply_ring_map(f)?),
            None => None,
        };
        PairMap::new(s, t, self.lie_part.apply_ring_map(f)?, self.group_part.clone(), c)
    }
}

fn g_weights<'a>(_g: &LieAlgebra, p: &'a PairDatum) -> &'a [Weight] {
    p.g_weights()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    #[test]
    fn standard_pairs_validate() {
        models::sl2_torus_pair(BaseRing::Integers);
        models::sl2_pair(BaseRing::Integers);
        models::gl2_torus_pair(BaseRing::Integers);
        models::borel_lower_pair(BaseRing::Integers);
    }

    #[test]
    fn module_examples() {
        let p = models::sl2_torus_pair(BaseRing::Integers);
        assert!(validate_pair_module(&GKModule::trivial(p.clone(), 2)).passed());
        assert!(validate_pair_module(&GKModule::adjoint(p.clone()).unwrap()).passed());
        let v = models::weyl_lattice_over(p.clone(), 3);
        assert!(validate_pair_module(&v).passed());
    }

    #[test]
    fn broken_module_is_reported() {
        let p = models::sl2_torus_pair(BaseRing::Integers);
        let v = models::weyl_lattice_over(p.clone(), 2);
        let mut action = v.action().to_vec();
        action[0] = action[0].scale(&Elem::from_int(2));
        let bad = GKModule::new_unchecked(p, v.labels().to_vec(), v.weights().to_vec(), action, None);
        let r = validate_pair_module(&bad);
        assert!(matches!(r.violation, Some(ModuleViolation::LieHomomorphism { .. })), "{r}");
    }

    #[test]
    fn tensor_weights() {
        let p = models::sl2_torus_pair(BaseRing::Integers);
        let v1 = models::weyl_lattice_over(p.clone(), 1);
        let t = tensor_gk(&v1, &v1).unwrap();
        assert_eq!(t.weights(), &[vec![2], vec![0], vec![0], vec![-2]]);
        assert!(validate_pair_module(&t).passed());
    }

    #[test]
    fn hom_spaces() {
        let p = models::sl2_torus_pair(BaseRing::Integers);
        let v = models::weyl_lattice_over(p.clone(), 2);
        let h = hom_space_gk(&v, &v).unwrap();
        assert_eq!(h.rank(), 1);
        let t = GKModule::trivial(p.clone(), 1);
        assert_eq!(hom_space_gk(&t, &t).unwrap().rank(), 1);
        let d = dual_gk(&v).unwrap();
        assert!(validate_pair_module(&d).passed());
        assert_eq!(d.weights(), &[vec![-2], vec![0], vec![2]]);
        let dd = dual_gk(&d).unwrap();
        assert_eq!(dd.action(), v.action());
        let f = internal_hom_gk(&v, &v).unwrap();
        assert!(validate_pair_module(&f).passed());
    }

    #[test]
    fn surjectivity_flag() {
        let bw = models::borel_weil_map(BaseRing::Integers);
        assert!(bw.is_surjective());
        let id = PairMap::identity(models::sl2_torus_pair(BaseRing::Integers));
        assert!(id.is_surjective());
        let to_triv = models::to_trivial_map(models::sl2_pair(BaseRing::Integers));
        assert!(to_triv.is_surjective());
    }
}
