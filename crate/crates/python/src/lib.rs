//! Python bindings: fields, planar functions, planes, unitals and the
//! analyses over them. Field elements cross the boundary as integer indices.

use std::sync::Arc;

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use unitalforge::analysis::{self, DEFAULT_ONAN_BUDGET};
use unitalforge::{suite, unital, ExtensionSplit, FieldCtx, FieldElem, Involution, Mode, PlanarFunction, Plane};

create_exception!(unitalforge_py, UnitalforgeError, PyException);

fn err(e: unitalforge::Error) -> PyErr {
    UnitalforgeError::new_err(e.to_string())
}

fn mode(sampled: Option<(u64, usize)>) -> Mode {
    match sampled {
        Some((seed, trials)) => Mode::Sampled { seed, trials },
        None => Mode::Exhaustive,
    }
}

fn kappa(name: &str) -> PyResult<Involution> {
    name.parse().map_err(err)
}

#[pyclass(name = "Field", frozen)]
struct PyField {
    ctx: Arc<FieldCtx>,
    split: Arc<ExtensionSplit>,
}

#[pymethods]
impl PyField {
    #[new]
    #[pyo3(signature = (p, m, modulus=None))]
    fn new(p: u32, m: u32, modulus: Option<Vec<u32>>) -> PyResult<Self> {
        let ctx = FieldCtx::new(p, m, modulus).map_err(err)?;
        let split = ExtensionSplit::new(ctx.clone()).map_err(err)?;
        Ok(PyField { ctx, split })
    }

    #[getter]
    fn size(&self) -> u32 {
        self.ctx.size()
    }

    #[getter]
    fn q(&self) -> u32 {
        self.split.q()
    }

    #[getter]
    fn descriptor(&self) -> String {
        self.ctx.descriptor()
    }

    #[getter]
    fn xi(&self) -> u32 {
        self.split.xi().0
    }

    fn add(&self, a: u32, b: u32) -> u32 {
        self.ctx.add(FieldElem(a), FieldElem(b)).0
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        self.ctx.mul(FieldElem(a), FieldElem(b)).0
    }

    fn inv(&self, a: u32) -> PyResult<u32> {
        self.ctx.inv(FieldElem(a)).map(|x| x.0).map_err(err)
    }

    fn trace(&self, a: u32) -> u32 {
        self.split.trace(FieldElem(a)).0
    }

    fn norm(&self, a: u32) -> u32 {
        self.split.norm(FieldElem(a)).0
    }

    fn __repr__(&self) -> String {
        format!("Field({})", self.ctx.descriptor())
    }
}

#[pyclass(name = "Plane", frozen)]
struct PyPlane {
    plane: Arc<Plane>,
}

#[pymethods]
impl PyPlane {
    #[new]
    #[pyo3(signature = (p, m, spec="square"))]
    fn new(p: u32, m: u32, spec: &str) -> PyResult<Self> {
        Ok(PyPlane { plane: Plane::new(PlanarFunction::from_parts(p, m, None, spec).map_err(err)?) })
    }

    #[getter]
    fn order(&self) -> u64 {
        self.plane.order()
    }

    #[getter]
    fn spec(&self) -> String {
        self.plane.function().spec().to_string()
    }

    fn point_count(&self) -> u64 {
        self.plane.point_count()
    }

    /// Evaluates the planar function at an element index.
    fn eval(&self, x: u32) -> u32 {
        self.plane.function().eval(FieldElem(x)).0
    }

    #[pyo3(signature = (sampled=None))]
    fn is_planar(&self, sampled: Option<(u64, usize)>) -> bool {
        self.plane.function().is_planar(mode(sampled)).0
    }

    fn is_normal(&self) -> bool {
        self.plane.function().is_normal().0
    }

    fn points_on_line(&self, line: u64) -> PyResult<Vec<u64>> {
        let l = self
            .plane
            .line(line)
            .ok_or_else(|| UnitalforgeError::new_err(format!("no line {line}")))?;
        Ok(self.plane.point_ids_on_line(&l))
    }

    /// Projective plane axioms; raises on failure.
    #[pyo3(signature = (sampled=None))]
    fn verify(&self, sampled: Option<(u64, usize)>) -> PyResult<()> {
        self.plane.verify_projective_plane(mode(sampled)).map(|_| ()).map_err(err)
    }

    /// `U_theta`, with `theta` chosen automatically when omitted.
    #[pyo3(signature = (theta=None))]
    fn u_theta(&self, theta: Option<u32>) -> PyResult<PyUnital> {
        let theta = match theta {
            Some(t) => FieldElem(t),
            None => unital::auto_theta(&self.plane).map_err(err)?,
        };
        Ok(PyUnital { u: unital::build_u_theta(&self.plane, theta).map_err(err)? })
    }

    #[pyo3(signature = (kappa_name="frobq", sampled=None))]
    fn polarity_unital(&self, kappa_name: &str, sampled: Option<(u64, usize)>) -> PyResult<PyUnital> {
        let (u, _) = unital::build_polarity_unital(&self.plane, kappa(kappa_name)?, mode(sampled)).map_err(err)?;
        Ok(PyUnital { u })
    }

    fn __repr__(&self) -> String {
        format!("Plane({}, order={})", self.spec(), self.order())
    }
}

#[pyclass(name = "Unital", frozen)]
struct PyUnital {
    u: unital::Unital,
}

#[pymethods]
impl PyUnital {
    #[staticmethod]
    fn classical(p: u32, n: u32) -> PyResult<Self> {
        Ok(PyUnital { u: unital::build_classical_baseline(p, n).map_err(err)? })
    }

    /// Parses the `UNITAL v1` text format.
    #[staticmethod]
    fn loads(text: &str) -> PyResult<Self> {
        Ok(PyUnital { u: unital::Unital::read_from(text.as_bytes()).map_err(err)? })
    }

    fn dumps(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        self.u.write_to(&mut buf).map_err(err)?;
        Ok(String::from_utf8(buf).expect("unital file is ASCII"))
    }

    #[getter]
    fn points(&self) -> Vec<u64> {
        self.u.points().to_vec()
    }

    #[getter]
    fn provenance(&self) -> String {
        self.u.provenance().to_string()
    }

    #[getter]
    fn q(&self) -> u64 {
        self.u.q()
    }

    fn __len__(&self) -> usize {
        self.u.points().len()
    }

    fn __contains__(&self, id: u64) -> bool {
        self.u.contains(id)
    }

    fn blocks(&self) -> PyResult<Vec<Vec<u64>>> {
        Ok(self.u.blocks().map_err(err)?.into_iter().map(|b| b.points).collect())
    }

    /// Line intersections and, for small `q`, the design property; raises on failure.
    #[pyo3(signature = (sampled=None))]
    fn verify(&self, sampled: Option<(u64, usize)>) -> PyResult<()> {
        let mut u = self.u.clone();
        let m = mode(sampled);
        u.verify_embedded(m).map_err(err)?;
        if u.q() <= unital::EXHAUSTIVE_DESIGN_Q || !m.is_exhaustive() {
            u.verify_design(m).map_err(err)?;
        }
        Ok(())
    }

    fn dual(&self) -> PyResult<Self> {
        Ok(PyUnital { u: unital::dual_unital(&self.u).map_err(err)? })
    }

    /// Number of O'Nan configurations through the point at infinity.
    fn onan_through_infinity(&self) -> PyResult<u64> {
        analysis::onan_through_point_count(&self.u).map(|t| t.configs).map_err(err)
    }

    /// Exhaustive O'Nan search: `(count, complete)`.
    #[pyo3(signature = (budget=DEFAULT_ONAN_BUDGET))]
    fn onan_count(&self, budget: u64) -> PyResult<(usize, bool)> {
        let s = analysis::find_onan_exhaustive(&self.u, budget).map_err(err)?;
        Ok((s.configs.len(), s.complete))
    }

    fn onan_explicit(&self) -> PyResult<String> {
        analysis::construct_onan_explicit(&self.u).map(|e| e.config.to_string()).map_err(err)
    }

    /// Wilbrink condition II at a vertex (default: infinity): `(strong, satisfied, total)`.
    #[pyo3(signature = (vertex=None, strong=true))]
    fn wilbrink(&self, vertex: Option<u64>, strong: bool) -> PyResult<(bool, u64, u64)> {
        let v = vertex.unwrap_or_else(|| self.u.plane().infinity_id());
        let r = analysis::wilbrink_vertex_check(&self.u, v, strong).map_err(err)?;
        Ok((r.strong, r.satisfied, r.total))
    }

    /// `(circles, circle size, lambda)` of the circle design.
    fn circle_design(&self) -> PyResult<(usize, usize, usize)> {
        let r = analysis::verify_circle_design(&self.u).map_err(err)?;
        Ok((r.circles, r.circle_size, r.lambda))
    }

    fn profile(&self) -> PyResult<String> {
        let p = analysis::invariant_profile(&self.u, DEFAULT_ONAN_BUDGET).map_err(err)?;
        Ok(serde_json::to_string(&p).expect("profile serializes"))
    }

    fn __repr__(&self) -> String {
        format!("Unital({}, points={})", self.u.provenance(), self.u.points().len())
    }
}

/// Compares two unitals by invariant profile and returns the verdict line.
#[pyfunction]
#[pyo3(signature = (left, right, budget=DEFAULT_ONAN_BUDGET))]
fn compare(left: &PyUnital, right: &PyUnital, budget: u64) -> PyResult<String> {
    analysis::compare(&left.u, &right.u, budget).map(|c| c.verdict.to_string()).map_err(err)
}

/// Runs one acceptance criterion: `(passed, details)`.
#[pyfunction]
#[pyo3(signature = (id, quick=true))]
fn criterion(id: u32, quick: bool) -> PyResult<(bool, Vec<String>)> {
    let o = suite::run(id, quick).ok_or_else(|| UnitalforgeError::new_err(format!("no criterion {id}")))?;
    Ok((o.passed, o.details))
}

#[pymodule]
fn unitalforge_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("UnitalforgeError", m.py().get_type::<UnitalforgeError>())?;
    m.add_class::<PyField>()?;
    m.add_class::<PyPlane>()?;
    m.add_class::<PyUnital>()?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(criterion, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrappers_without_interpreter() {
        let pl = PyPlane::new(3, 2, "square").unwrap();
        let u = pl.u_theta(None).unwrap();
        assert_eq!(u.__len__(), 28);
        assert_eq!(u.onan_through_infinity().unwrap(), 0);
        assert_eq!(u.onan_count(DEFAULT_ONAN_BUDGET).unwrap(), (324, true));
        let back = PyUnital::loads(&u.dumps().unwrap()).unwrap();
        assert_eq!(back.points(), u.points());
        let f = PyField::new(5, 2, None).unwrap();
        assert_eq!(f.q(), 5);
        assert_eq!(f.mul(f.xi(), f.inv(f.xi()).unwrap()), 1);
    }
}
