use std::sync::Arc;

use gk_core::base_change::{comparison_iota, verify_hom_base_change, ComparisonCertificate};
use gk_core::cohomology::{cohomology_up_to, CohomologyReport};
use gk_core::functors::{i_functor, WeightWindow};
use gk_core::models;
use gk_core::pair::{dual_gk, hom_space_gk, internal_hom_gk, tensor_gk, validate_pair_module, GKModule, PairDatum, PairMap};
use gk_core::pbw::Pbw;
use gk_core::scenario::{run_scenario, validate_scenario, Format, Scenario};
use gk_core::snf::{smith_normal_form, Track};
use gk_core::{BaseRing, Elem, GkError, Matrix, RingMap};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

create_exception!(gkmod, GkException, PyException, "Raised when a computation in gk-core fails.");

fn err(e: GkError) -> PyErr {
    GkException::new_err(format!("{e} (exit code {})", e.exit_code()))
}

fn parse_ring(name: &str) -> PyResult<BaseRing> {
    name.parse().map_err(|e: GkError| PyValueError::new_err(e.to_string()))
}

fn ring_map(source: &BaseRing, target: &str) -> PyResult<RingMap> {
    RingMap::new(source.clone(), parse_ring(target)?).map_err(err)
}

fn strings(v: &[Elem]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

fn matrix_strings(m: &Matrix) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|r| strings(r)).collect()
}

fn cohomology_list(r: &CohomologyReport) -> Vec<(usize, Vec<String>)> {
    r.degrees.iter().map(|d| (d.free_rank, strings(&d.torsion))).collect()
}

/// A base ring: `Z`, `Q`, `Z[1/n]` or `Z[i]`.
#[pyclass(frozen, skip_from_py_object, module = "gkmod")]
#[derive(Clone)]
pub struct Ring {
    inner: BaseRing,
}

#[pymethods]
impl Ring {
    #[new]
    fn new(name: &str) -> PyResult<Self> {
        Ok(Ring { inner: parse_ring(name)? })
    }

    #[getter]
    fn is_field(&self) -> bool {
        self.inner.is_field()
    }

    fn is_unit(&self, x: &str) -> PyResult<bool> {
        let e: Elem = x.parse().map_err(|e: GkError| PyValueError::new_err(e.to_string()))?;
        Ok(self.inner.is_unit(&e))
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Ring('{}')", self.inner)
    }

    fn __eq__(&self, other: &Ring) -> bool {
        self.inner == other.inner
    }
}

/// One of the built-in pairs `(g, K)`.
#[pyclass(frozen, skip_from_py_object, module = "gkmod")]
#[derive(Clone)]
pub struct Pair {
    inner: Arc<PairDatum>,
}

#[pymethods]
impl Pair {
    /// Known names: `sl2`, `sl2T`, `bbar`, `b`, `gl2T`, `torus<r>`, `lie-sl2`.
    #[new]
    fn new(name: &str, ring: &str) -> PyResult<Self> {
        let r = parse_ring(ring)?;
        let inner = match name {
            "sl2" => models::sl2_pair(r),
            "sl2T" => models::sl2_torus_pair(r),
            "bbar" => models::borel_lower_pair(r),
            "b" => models::borel_upper_pair(r),
            "gl2T" => models::gl2_torus_pair(r),
            "lie-sl2" => models::lie_pair(models::sl2(r)),
            _ => match name.strip_prefix("torus").and_then(|n| n.parse().ok()) {
                Some(n) => models::torus_pair(r, n),
                None => return Err(PyValueError::new_err(format!("unknown pair `{name}`"))),
            },
        };
        Ok(Pair { inner })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn lie_labels(&self) -> Vec<String> {
        self.inner.g().labels().to_vec()
    }

    #[getter]
    fn ring(&self) -> Ring {
        Ring { inner: self.inner.ring().clone() }
    }

    fn __repr__(&self) -> String {
        format!("Pair('{}' over {})", self.inner.name(), self.inner.ring())
    }
}

/// A finite free `(g, K)`-module.
#[pyclass(frozen, skip_from_py_object, module = "gkmod")]
#[derive(Clone)]
pub struct Module {
    inner: GKModule,
}

#[pymethods]
impl Module {
    /// Builds a module from weights and one action matrix per Lie basis
    /// element; entries are strings such as `"3"`, `"-1/2"` or `"1+2i"`.
    #[new]
    fn new(pair: &Pair, weights: Vec<Vec<i64>>, action: Vec<Vec<Vec<String>>>) -> PyResult<Self> {
        let mut mats = Vec::with_capacity(action.len());
        for rows in action {
            let rows = rows
                .into_iter()
                .map(|r| r.iter().map(|x| x.parse::<Elem>()).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| PyValueError::new_err(e.to_string()))?;
            mats.push(Matrix::from_rows(rows).map_err(err)?);
        }
        let labels = (0..weights.len()).map(|i| format!("v{i}")).collect();
        Ok(Module { inner: GKModule::new(pair.inner.clone(), labels, weights, mats).map_err(err)? })
    }

    /// The Weyl lattice `V(n)` over `(sl2, SL2)`.
    #[staticmethod]
    fn weyl(ring: &str, n: usize) -> PyResult<Self> {
        Ok(Module { inner: models::weyl_lattice(parse_ring(ring)?, n) })
    }

    /// `Sym^n` of the standard representation over `(sl2, SL2)`.
    #[staticmethod]
    fn symmetric_power(ring: &str, n: usize) -> PyResult<Self> {
        Ok(Module { inner: models::symmetric_power(parse_ring(ring)?, n) })
    }

    /// The character `lambda` of the lower Borel pair.
    #[staticmethod]
    fn borel_character(ring: &str, lambda: i64) -> PyResult<Self> {
        Ok(Module { inner: models::borel_character(parse_ring(ring)?, lambda) })
    }

    #[staticmethod]
    fn trivial(pair: &Pair, rank: usize) -> Self {
        Module { inner: GKModule::trivial(pair.inner.clone(), rank) }
    }

    #[staticmethod]
    fn adjoint(pair: &Pair) -> PyResult<Self> {
        Ok(Module { inner: GKModule::adjoint(pair.inner.clone()).map_err(err)? })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn weights(&self) -> Vec<Vec<i64>> {
        self.inner.weights().to_vec()
    }

    #[getter]
    fn action(&self) -> Vec<Vec<Vec<String>>> {
        self.inner.action().iter().map(matrix_strings).collect()
    }

    #[getter]
    fn pair(&self) -> Pair {
        Pair { inner: self.inner.pair().clone() }
    }

    #[getter]
    fn ring(&self) -> Ring {
        Ring { inner: self.inner.ring().clone() }
    }

    /// Weight multiplicities as `[(weight, multiplicity), ...]`.
    fn character(&self) -> Vec<(Vec<i64>, usize)> {
        self.inner.graded_ranks()
    }

    fn validate(&self) -> bool {
        validate_pair_module(&self.inner).passed()
    }

    fn tensor(&self, other: &Module) -> PyResult<Module> {
        Ok(Module { inner: tensor_gk(&self.inner, &other.inner).map_err(err)? })
    }

    fn dual(&self) -> PyResult<Module> {
        Ok(Module { inner: dual_gk(&self.inner).map_err(err)? })
    }

    fn direct_sum(&self, other: &Module) -> PyResult<Module> {
        Ok(Module { inner: self.inner.direct_sum(&other.inner).map_err(err)? })
    }

    fn internal_hom(&self, other: &Module) -> PyResult<Module> {
        Ok(Module { inner: internal_hom_gk(&self.inner, &other.inner).map_err(err)? })
    }

    /// Rank of `Hom_{g,K}(self, other)`.
    fn hom_rank(&self, other: &Module) -> PyResult<usize> {
        Ok(hom_space_gk(&self.inner, &other.inner).map_err(err)?.rank())
    }

    fn base_change(&self, ring: &str) -> PyResult<Module> {
        let f = ring_map(self.inner.ring(), ring)?;
        Ok(Module { inner: self.inner.base_change(&f).map_err(err)? })
    }

    /// Relative Lie algebra cohomology as `[(free_rank, [torsion...]), ...]`.
    #[pyo3(signature = (max_degree=None))]
    fn cohomology(&self, max_degree: Option<usize>) -> PyResult<Vec<(usize, Vec<String>)>> {
        let (_, r) = cohomology_up_to(self.inner.pair(), &self.inner, max_degree.unwrap_or(usize::MAX)).map_err(err)?;
        Ok(cohomology_list(&r))
    }

    fn __repr__(&self) -> String {
        format!("Module(rank {} over {})", self.inner.dim(), self.inner.pair().name())
    }
}

/// A base-change comparison certificate.
#[pyclass(frozen, get_all, module = "gkmod")]
pub struct Certificate {
    tag: String,
    ring_map: String,
    instance_hash: String,
    lhs_rank: usize,
    rhs_rank: usize,
    divisors: Vec<String>,
    iso: bool,
    claimed: bool,
}

impl From<ComparisonCertificate> for Certificate {
    fn from(c: ComparisonCertificate) -> Self {
        Certificate {
            tag: c.tag.to_string(),
            ring_map: c.ring_map.clone(),
            instance_hash: c.instance_hash.clone(),
            lhs_rank: c.lhs_rank,
            rhs_rank: c.rhs_rank,
            divisors: strings(&c.divisors),
            iso: c.is_iso(),
            claimed: c.claimed,
        }
    }
}

#[pymethods]
impl Certificate {
    fn __repr__(&self) -> String {
        format!(
            "Certificate({} {} ranks {}/{} {}{})",
            self.tag,
            self.ring_map,
            self.lhs_rank,
            self.rhs_rank,
            if self.iso { "iso" } else { "not iso" },
            if self.claimed { "" } else { ", informational" }
        )
    }
}

fn builtin_map(name: &str, ring: BaseRing) -> PyResult<PairMap> {
    Ok(match name {
        "borel-weil" => models::borel_weil_map(ring),
        "lower-borel" => models::lower_borel_inclusion(ring),
        "upper-borel" => models::upper_borel_inclusion(ring),
        "sl2-zuckerman" => models::sl2_zuckerman_map(ring),
        "gl2-zuckerman" => models::gl2_torus_zuckerman_map(ring),
        _ => return Err(PyValueError::new_err(format!("unknown map `{name}`"))),
    })
}

/// Certifies `Hom(X, Y) ⊗ k' -> Hom(X ⊗ k', Y ⊗ k')`.
#[pyfunction]
fn hom_base_change(x: &Module, y: &Module, target: &str) -> PyResult<Certificate> {
    let f = ring_map(x.inner.ring(), target)?;
    Ok(verify_hom_base_change(&f, &x.inner, &y.inner).map_err(err)?.into())
}

/// Certifies the comparison `I(W) ⊗ k' -> I(W ⊗ k')` along a built-in map.
#[pyfunction]
#[pyo3(signature = (map, module, target, lo, hi, cap=8))]
fn compare_iota(map: &str, module: &Module, target: &str, lo: i64, hi: i64, cap: usize) -> PyResult<Certificate> {
    let ring = module.inner.ring().clone();
    let pm = builtin_map(map, ring.clone())?;
    let f = ring_map(&ring, target)?;
    let w = WeightWindow::interval(lo, hi, cap);
    Ok(comparison_iota(&f, &pm, &module.inner, &w).map_err(err)?.into())
}

/// `I(W)` along a built-in map on the window `[lo, hi]`.
#[pyfunction]
#[pyo3(signature = (map, module, lo, hi, cap=8))]
fn induce(map: &str, module: &Module, lo: i64, hi: i64, cap: usize) -> PyResult<Module> {
    let pm = builtin_map(map, module.inner.ring().clone())?;
    let w = WeightWindow::interval(lo, hi, cap);
    Ok(Module { inner: i_functor(&pm, &module.inner, &w).map_err(err)?.module })
}

/// Nonzero invariant factors of an integer (or ring) matrix.
#[pyfunction]
#[pyo3(signature = (rows, ring="Z"))]
fn smith_divisors(rows: Vec<Vec<String>>, ring: &str) -> PyResult<Vec<String>> {
    let r = parse_ring(ring)?;
    let rows = rows
        .into_iter()
        .map(|row| row.iter().map(|x| x.parse::<Elem>()).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    let m = Matrix::from_rows(rows).map_err(err)?;
    let snf = smith_normal_form(&r, &m, Track::NONE).map_err(err)?;
    Ok(strings(&snf.diag))
}

/// Straightens a word of basis labels in `U(sl2)` or `U(gl2)` into PBW form,
/// returned as `[(exponents, coefficient), ...]`.
#[pyfunction]
#[pyo3(signature = (lie, word, cap=12))]
fn straighten(lie: &str, word: Vec<String>, cap: usize) -> PyResult<Vec<(Vec<u32>, String)>> {
    let g = match lie {
        "sl2" => models::sl2(BaseRing::Integers),
        "gl2" => models::gl2(BaseRing::Integers),
        _ => return Err(PyValueError::new_err(format!("unknown Lie algebra `{lie}`"))),
    };
    let idx = word
        .iter()
        .map(|l| g.index_of(l).ok_or_else(|| PyValueError::new_err(format!("unknown basis label `{l}`"))))
        .collect::<PyResult<Vec<_>>>()?;
    let u = Pbw::new(&g, cap).straighten(&idx).map_err(err)?;
    Ok(u.terms().map(|(m, c)| (m.clone(), c.to_string())).collect())
}

/// Runs a scenario given as text; returns `(exit_code, rendered_report)`.
#[pyfunction]
#[pyo3(signature = (text, format="text"))]
fn run(text: &str, format: &str) -> PyResult<(i32, String)> {
    let fmt = match format {
        "text" => Format::Text,
        "json" => Format::Json,
        _ => return Err(PyValueError::new_err(format!("unknown format `{format}`"))),
    };
    let s = Scenario::parse(text).map_err(err)?;
    let report = run_scenario(&s).map_err(err)?;
    Ok((report.exit_code(), report.render(fmt)))
}

/// Checks a scenario without running it; raises on the first problem.
#[pyfunction]
fn validate(text: &str) -> PyResult<()> {
    let s = Scenario::parse(text).map_err(err)?;
    validate_scenario(&s).map_err(err)?;
    Ok(())
}

#[pymodule]
fn gkmod(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("GkException", m.py().get_type::<GkException>())?;
    m.add_class::<Ring>()?;
    m.add_class::<Pair>()?;
    m.add_class::<Module>()?;
    m.add_class::<Certificate>()?;
    m.add_function(wrap_pyfunction!(hom_base_change, m)?)?;
    m.add_function(wrap_pyfunction!(compare_iota, m)?)?;
    m.add_function(wrap_pyfunction!(induce, m)?)?;
    m.add_function(wrap_pyfunction!(smith_divisors, m)?)?;
    m.add_function(wrap_pyfunction!(straighten, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    Ok(())
}
