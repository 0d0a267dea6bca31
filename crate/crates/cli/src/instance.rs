//! Input files: magnetic graph instances, cone problems and operator pairs.
//!
//! Every rejection carries a JSON pointer to the offending value.

use std::collections::BTreeMap;

use dominion_core::forms::{cone_space, OperatorForm};
use dominion_core::graph::{check_potential, check_unitary, formal_laplacian, magnetic_operator, MagneticInstance, WeightedGraph};
use dominion_core::linalg::CMatrix;
use dominion_core::ordered::ConeSpec;
use dominion_core::pairing::PairingSpec;
use dominion_core::space::{FiberedSpace, WeightedSpace};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::error::CliError;

type Result<T> = std::result::Result<T, CliError>;

/// A JSON value together with its pointer.
#[derive(Clone, Copy)]
struct Node<'a, 'p> {
    value: &'a Value,
    path: &'p str,
}

fn escape(token: &str) -> String {
    token.replace('~', "~0").replace('/', "~1")
}

fn child(path: &str, token: &str) -> String {
    format!("{path}/{}", escape(token))
}

impl<'a> Node<'a, '_> {
    fn object(&self) -> Result<&'a Map<String, Value>> {
        self.value.as_object().ok_or_else(|| CliError::schema(self.path, "expected an object"))
    }

    fn array(&self) -> Result<&'a Vec<Value>> {
        self.value.as_array().ok_or_else(|| CliError::schema(self.path, "expected an array"))
    }

    fn f64(&self) -> Result<f64> {
        self.value
            .as_f64()
            .filter(|x| x.is_finite())
            .ok_or_else(|| CliError::schema(self.path, "expected a finite number"))
    }

    fn usize(&self) -> Result<usize> {
        self.value
            .as_u64()
            .map(|x| x as usize)
            .ok_or_else(|| CliError::schema(self.path, "expected a nonnegative integer"))
    }

    fn str(&self) -> Result<&'a str> {
        self.value.as_str().ok_or_else(|| CliError::schema(self.path, "expected a string"))
    }

    fn complex(&self) -> Result<Complex64> {
        if let Some(x) = self.value.as_f64() {
            if x.is_finite() {
                return Ok(Complex64::new(x, 0.0));
            }
        }
        match self.value.as_array().map(Vec::as_slice) {
            Some([re, im]) => match (re.as_f64(), im.as_f64()) {
                (Some(re), Some(im)) if re.is_finite() && im.is_finite() => Ok(Complex64::new(re, im)),
                _ => Err(CliError::schema(self.path, "expected a number or a [re, im] pair")),
            },
            _ => Err(CliError::schema(self.path, "expected a number or a [re, im] pair")),
        }
    }

    fn f64_vec(&self) -> Result<Vec<f64>> {
        self.array()?
            .iter()
            .enumerate()
            .map(|(i, v)| Node { value: v, path: &format!("{}/{i}", self.path) }.f64())
            .collect()
    }

    /// Row-major `rows x cols` matrix; `None` infers a square shape.
    fn matrix(&self, shape: Option<(usize, usize)>) -> Result<CMatrix> {
        let items = self.array()?;
        let (rows, cols) = match shape {
            Some(s) => s,
            None => {
                let k = (items.len() as f64).sqrt().round() as usize;
                (k, k)
            }
        };
        if items.len() != rows * cols || items.is_empty() {
            return Err(CliError::schema(
                self.path,
                format!("expected {} entries for a {rows}x{cols} matrix, got {}", rows * cols, items.len()),
            ));
        }
        let data = items
            .iter()
            .enumerate()
            .map(|(i, v)| Node { value: v, path: &format!("{}/{i}", self.path) }.complex())
            .collect::<Result<Vec<_>>>()?;
        CMatrix::from_vec(rows, cols, data).map_err(|e| CliError::at(self.path, e))
    }
}

fn only_keys(obj: &Map<String, Value>, path: &str, allowed: &[&str]) -> Result<()> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(CliError::schema(&child(path, k), format!("unknown key; expected one of {allowed:?}"))),
        None => Ok(()),
    }
}

fn required<'a>(obj: &'a Map<String, Value>, path: &str, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| CliError::schema(path, format!("missing key {key:?}")))
}

/// Reads a per-vertex map. Every key must be a vertex; missing vertices take
/// `default` or are an error when there is none.
fn vertex_map<T>(
    root: &Map<String, Value>,
    key: &str,
    labels: &[String],
    default: Option<&dyn Fn(usize) -> T>,
    mut parse: impl FnMut(usize, Node) -> Result<T>,
) -> Result<Vec<T>> {
    let path = format!("/{key}");
    let Some(value) = root.get(key) else {
        return match default {
            Some(d) => Ok((0..labels.len()).map(d).collect()),
            None => Err(CliError::schema("", format!("missing key {key:?}"))),
        };
    };
    let obj = Node { value, path: &path }.object()?;
    if let Some(k) = obj.keys().find(|k| !labels.contains(k)) {
        return Err(CliError::schema(&child(&path, k), "not a vertex label"));
    }
    labels
        .iter()
        .enumerate()
        .map(|(i, l)| match obj.get(l) {
            Some(v) => parse(i, Node { value: v, path: &child(&path, l) }),
            None => match default {
                Some(d) => Ok(d(i)),
                None => Err(CliError::schema(&path, format!("missing entry for vertex {l:?}"))),
            },
        })
        .collect()
}

const INSTANCE_KEYS: [&str; 7] = ["vertices", "m", "edges", "c", "fibers", "phi", "W"];

/// Validates a magnetic graph instance.
///
/// `c`, `fibers`, `phi` and `W` are optional and default to `0`, `1`, the
/// identity and `c(x) I`. Edges may be listed in either orientation; a pair
/// listed twice must carry the same weight. A connection map given as
/// `"y|x"` is stored as its inverse on `"x|y"`.
pub fn validate_instance(root: &Value) -> Result<MagneticInstance> {
    let obj = Node { value: root, path: "" }.object()?;
    only_keys(obj, "", &INSTANCE_KEYS)?;

    let vnode = Node { value: required(obj, "", "vertices")?, path: "/vertices" };
    let mut labels = Vec::new();
    for (i, v) in vnode.array()?.iter().enumerate() {
        let path = format!("/vertices/{i}");
        let l = Node { value: v, path: &path }.str()?;
        if l.contains('|') {
            return Err(CliError::schema(&path, "vertex labels may not contain '|'"));
        }
        if labels.iter().any(|x: &String| x == l) {
            return Err(CliError::invariant(&path, format!("duplicate vertex label {l:?}")));
        }
        labels.push(l.to_string());
    }
    if labels.is_empty() {
        return Err(CliError::invariant("/vertices", "an instance needs at least one vertex"));
    }
    let index = |l: &str| labels.iter().position(|x| x == l);

    let m = vertex_map(obj, "m", &labels, None, |_, n| {
        let w = n.f64()?;
        if w <= 0.0 {
            return Err(CliError::invariant(n.path, "vertex weight must be positive"));
        }
        Ok(w)
    })?;
    let c = vertex_map(obj, "c", &labels, Some(&|_| 0.0), |_, n| {
        let v = n.f64()?;
        if v < 0.0 {
            return Err(CliError::invariant(n.path, "killing term must be nonnegative"));
        }
        Ok(v)
    })?;
    let fibers = vertex_map(obj, "fibers", &labels, Some(&|_| 1), |_, n| {
        let d = n.usize()?;
        if d == 0 {
            return Err(CliError::invariant(n.path, "fiber dimension must be positive"));
        }
        Ok(d)
    })?;

    // (x, y) with x < y -> (b, position in the input list)
    let mut edges: BTreeMap<(usize, usize), (f64, usize)> = BTreeMap::new();
    let enode = Node { value: required(obj, "", "edges")?, path: "/edges" };
    for (k, e) in enode.array()?.iter().enumerate() {
        let path = format!("/edges/{k}");
        let node = Node { value: e, path: &path };
        let [x, y, b] = node.array()?.as_slice() else {
            return Err(CliError::schema(&path, "expected [x, y, b]"));
        };
        let label = |v: &Value, i: usize| -> Result<usize> {
            let p = format!("{path}/{i}");
            let l = Node { value: v, path: &p }.str()?;
            index(l).ok_or_else(|| CliError::schema(&p, format!("unknown vertex {l:?}")))
        };
        let (x, y) = (label(x, 0)?, label(y, 1)?);
        let b = Node { value: b, path: &format!("{path}/2") }.f64()?;
        if x == y {
            return Err(CliError::invariant(&path, "self-loops are not allowed"));
        }
        if b < 0.0 {
            return Err(CliError::invariant(&format!("{path}/2"), "edge weight must be nonnegative"));
        }
        let key = (x.min(y), x.max(y));
        match edges.get(&key) {
            Some(&(old, first)) if old != b => {
                return Err(CliError::invariant(
                    &path,
                    format!("asymmetric weight: b = {b} here but {old} at /edges/{first}"),
                ));
            }
            Some(_) => {}
            None => {
                edges.insert(key, (b, k));
            }
        }
    }
    edges.retain(|_, (b, _)| *b > 0.0);

    let mut phi: BTreeMap<(usize, usize), (CMatrix, String)> = BTreeMap::new();
    if let Some(value) = obj.get("phi") {
        for (key, v) in (Node { value, path: "/phi" }).object()? {
            let path = child("/phi", key);
            let parts: Vec<&str> = key.split('|').collect();
            let (x, y) = match parts.as_slice() {
                [a, b] => match (index(a), index(b)) {
                    (Some(x), Some(y)) => (x, y),
                    _ => return Err(CliError::schema(&path, "key must be \"x|y\" with vertex labels")),
                },
                _ => return Err(CliError::schema(&path, "key must be \"x|y\" with vertex labels")),
            };
            let canon = (x.min(y), x.max(y));
            if !edges.contains_key(&canon) {
                return Err(CliError::invariant(&path, "no edge with positive weight between these vertices"));
            }
            let mat = Node { value: v, path: &path }.matrix(Some((fibers[x], fibers[y])))?;
            check_unitary(&mat, fibers[x], fibers[y]).map_err(|e| CliError::at(&path, e))?;
            let stored = if x < y { mat } else { mat.adjoint() };
            if let Some((other, other_path)) = phi.get(&canon) {
                if !other.approx_eq(&stored, dominion_core::graph::UNITARY_TOL) {
                    return Err(CliError::invariant(
                        &path,
                        format!("connection maps for both orientations are not inverse (see {other_path})"),
                    ));
                }
            } else {
                phi.insert(canon, (stored, path));
            }
        }
    }

    let w = vertex_map(
        obj,
        "W",
        &labels,
        Some(&|x| CMatrix::from_diag(&vec![c[x]; fibers[x]])),
        |x, n| {
            let mat = n.matrix(Some((fibers[x], fibers[x])))?;
            check_potential(&mat, fibers[x]).map_err(|e| CliError::at(n.path, e))?;
            Ok(mat)
        },
    )?;

    let space = WeightedSpace::new(labels, m).map_err(|e| CliError::at("/m", e))?;
    let edge_list: Vec<(usize, usize, f64)> = edges.iter().map(|(&(x, y), &(b, _))| (x, y, b)).collect();
    let graph = WeightedGraph::new(space, &edge_list, c).map_err(|e| CliError::at("/edges", e))?;
    let mut phi_list = Vec::with_capacity(graph.edges().len());
    for e in graph.edges() {
        match phi.remove(&(e.x, e.y)) {
            Some((p, _)) => phi_list.push(p),
            None if fibers[e.x] == fibers[e.y] => phi_list.push(CMatrix::identity(fibers[e.x])),
            None => {
                let key = format!("{}|{}", graph.space().labels()[e.x], graph.space().labels()[e.y]);
                return Err(CliError::schema(
                    "/phi",
                    format!("missing connection map {key:?} between fibers of different dimension"),
                ));
            }
        }
    }
    MagneticInstance::new(graph, fibers, phi_list, w).map_err(CliError::from)
}

fn matrix_json(m: &CMatrix) -> Value {
    Value::Array(m.as_slice().iter().map(|z| json!([z.re, z.im])).collect())
}

/// Canonical JSON form: vertices in index order, edges `x < y` in index
/// order, every optional key written out.
pub fn instance_to_json(inst: &MagneticInstance) -> Value {
    let g = inst.graph();
    let labels = g.space().labels();
    let per_vertex = |f: &dyn Fn(usize) -> Value| -> Value {
        Value::Object(labels.iter().enumerate().map(|(i, l)| (l.clone(), f(i))).collect())
    };
    let edges: Vec<Value> = g.edges().iter().map(|e| json!([labels[e.x], labels[e.y], e.b])).collect();
    let phi: Map<String, Value> = g
        .edges()
        .iter()
        .zip(inst.phi_edges())
        .map(|(e, p)| (format!("{}|{}", labels[e.x], labels[e.y]), matrix_json(p)))
        .collect();
    json!({
        "vertices": labels,
        "m": per_vertex(&|i| json!(g.space().weights()[i])),
        "edges": edges,
        "c": per_vertex(&|i| json!(g.c()[i])),
        "fibers": per_vertex(&|i| json!(inst.fibers().fiber_dim(i))),
        "phi": phi,
        "W": per_vertex(&|i| matrix_json(&inst.w()[i])),
    })
}

/// `{"type": "orthant" | "monotone", "weights": [...]}`, the same with
/// `"dim": n` for unit weights, or `{"type": "psd", "n": n}`.
fn parse_cone(node: Node) -> Result<ConeSpec> {
    let obj = node.object()?;
    let path = node.path;
    let kind = Node { value: required(obj, path, "type")?, path: &child(path, "type") }.str()?;
    let weighted = || -> Result<WeightedSpace> {
        only_keys(obj, path, &["type", "weights", "dim"])?;
        let space = match (obj.get("weights"), obj.get("dim")) {
            (Some(w), None) => {
                let wp = child(path, "weights");
                let weights = Node { value: w, path: &wp }.f64_vec()?;
                WeightedSpace::from_weights(weights).map_err(|e| CliError::at(&wp, e))
            }
            (None, Some(d)) => {
                let dp = child(path, "dim");
                WeightedSpace::uniform(Node { value: d, path: &dp }.usize()?).map_err(|e| CliError::at(&dp, e))
            }
            _ => Err(CliError::schema(path, "give exactly one of \"weights\" and \"dim\"")),
        }?;
        Ok(space)
    };
    match kind {
        "orthant" => Ok(ConeSpec::Orthant(weighted()?)),
        "monotone" => Ok(ConeSpec::MonotoneNonneg(weighted()?)),
        "psd" => {
            only_keys(obj, path, &["type", "n"])?;
            let np = child(path, "n");
            let n = Node { value: required(obj, path, "n")?, path: &np }.usize()?;
            if n == 0 {
                return Err(CliError::invariant(&np, "matrix size must be positive"));
            }
            Ok(ConeSpec::PsdMatrices(n))
        }
        other => Err(CliError::schema(
            &child(path, "type"),
            format!("unknown cone type {other:?}; expected orthant, psd or monotone"),
        )),
    }
}

/// `{"cone": ..., "g": [...], "operator": [...]}` with `g` and `operator`
/// optional; the operator is a flat row-major real matrix on the cone's space.
pub struct ConeProblem {
    pub cone: ConeSpec,
    pub g: Option<Vec<f64>>,
    pub operator: Option<OperatorForm>,
}

fn parse_cone_problem(obj: &Map<String, Value>) -> Result<ConeProblem> {
    only_keys(obj, "", &["cone", "g", "operator"])?;
    let cone = parse_cone(Node { value: required(obj, "", "cone")?, path: "/cone" })?;
    let g = match obj.get("g") {
        Some(v) => {
            let g = Node { value: v, path: "/g" }.f64_vec()?;
            cone.check(&g).map_err(|e| CliError::at("/g", e))?;
            Some(g)
        }
        None => None,
    };
    let operator = match obj.get("operator") {
        Some(v) => {
            let d = cone.dim();
            let mat = Node { value: v, path: "/operator" }.matrix(Some((d, d)))?;
            if mat.max_imag() != 0.0 {
                return Err(CliError::invariant("/operator", "operator must be real"));
            }
            Some(OperatorForm::scalar(cone_space(&cone), mat).map_err(|e| CliError::at("/operator", e))?)
        }
        None => None,
    };
    Ok(ConeProblem { cone, g, operator })
}

/// Domination problem `(A, B, S)`.
pub struct DominationProblem {
    pub a: OperatorForm,
    pub b: OperatorForm,
    pub pairing: PairingSpec,
}

impl DominationProblem {
    /// Magnetic operator against the scalar graph operator with killing term `c`.
    pub fn from_instance(inst: &MagneticInstance) -> Result<Self> {
        Ok(Self {
            a: magnetic_operator(inst)?,
            b: formal_laplacian(inst.graph())?,
            pairing: inst.pairing(),
        })
    }
}

/// `{"space": {"weights": [...], "fibers": [...]}, "pairing": "bundle" |
/// "norm" | "lattice", "A": [...], "B": [...]}`.
fn parse_operator_pair(obj: &Map<String, Value>) -> Result<DominationProblem> {
    only_keys(obj, "", &["space", "pairing", "A", "B"])?;
    let snode = Node { value: required(obj, "", "space")?, path: "/space" };
    let sobj = snode.object()?;
    only_keys(sobj, "/space", &["weights", "fibers"])?;
    let weights = Node { value: required(sobj, "/space", "weights")?, path: "/space/weights" }.f64_vec()?;
    let base = WeightedSpace::from_weights(weights).map_err(|e| CliError::at("/space/weights", e))?;
    let fibers = match sobj.get("fibers") {
        Some(v) => {
            let items = Node { value: v, path: "/space/fibers" }.array()?;
            items
                .iter()
                .enumerate()
                .map(|(i, v)| Node { value: v, path: &format!("/space/fibers/{i}") }.usize())
                .collect::<Result<Vec<_>>>()?
        }
        None => vec![1; base.len()],
    };
    let domain = FiberedSpace::new(base.clone(), fibers).map_err(|e| CliError::at("/space/fibers", e))?;
    let kind = match obj.get("pairing") {
        Some(v) => Node { value: v, path: "/pairing" }.str()?,
        None => "bundle",
    };
    let pairing = match kind {
        "bundle" => PairingSpec::bundle(domain.clone()),
        "norm" => PairingSpec::norm_pairing(domain.clone()),
        "lattice" => {
            if !domain.is_line_bundle() {
                return Err(CliError::invariant("/space/fibers", "the lattice pairing needs scalar fibers"));
            }
            PairingSpec::lattice_abs(base)
        }
        other => {
            return Err(CliError::schema(
                "/pairing",
                format!("unknown pairing {other:?}; expected bundle, norm or lattice"),
            ))
        }
    };
    let d = domain.dim();
    let am = Node { value: required(obj, "", "A")?, path: "/A" }.matrix(Some((d, d)))?;
    let a = OperatorForm::new(domain, am).map_err(|e| CliError::at("/A", e))?;
    let target = pairing.target_space();
    let k = target.len();
    let bm = Node { value: required(obj, "", "B")?, path: "/B" }.matrix(Some((k, k)))?;
    if bm.max_imag() != 0.0 {
        return Err(CliError::invariant("/B", "the dominating operator must be real"));
    }
    let b = OperatorForm::scalar(target, bm).map_err(|e| CliError::at("/B", e))?;
    Ok(DominationProblem { a, b, pairing })
}

pub enum Input {
    Instance(MagneticInstance),
    Cone(ConeProblem),
    Pair(Box<DominationProblem>),
}

/// Classifies by top-level keys: `vertices` for a graph instance, `A` for an
/// operator pair, `cone` for a cone problem.
pub fn parse_input(root: &Value) -> Result<Input> {
    let obj = Node { value: root, path: "" }.object()?;
    if obj.contains_key("vertices") {
        Ok(Input::Instance(validate_instance(root)?))
    } else if obj.contains_key("A") {
        Ok(Input::Pair(Box::new(parse_operator_pair(obj)?)))
    } else if obj.contains_key("cone") {
        Ok(Input::Cone(parse_cone_problem(obj)?))
    } else {
        Err(CliError::schema("", "expected a graph instance (\"vertices\"), an operator pair (\"A\") or a cone problem (\"cone\")"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_vertex(extra: Value) -> Value {
        let mut v = json!({
            "vertices": ["a", "b"],
            "m": {"a": 1.0, "b": 1.0},
            "edges": [["a", "b", 1.0]],
        });
        for (k, x) in extra.as_object().unwrap() {
            v[k] = x.clone();
        }
        v
    }

    #[test]
    fn defaults_fill_trivial_bundle() {
        let inst = validate_instance(&two_vertex(json!({}))).unwrap();
        assert_eq!(inst.fibers().dim(), 2);
        assert_eq!(inst.phi_edges()[0], CMatrix::identity(1));
    }

    #[test]
    fn reversed_phi_is_inverted() {
        let inst = validate_instance(&two_vertex(json!({"phi": {"b|a": [[0.0, 1.0]]}}))).unwrap();
        assert_eq!(inst.phi_edges()[0][(0, 0)], Complex64::new(0.0, -1.0));
    }

    #[test]
    fn asymmetric_edge_points_at_entry() {
        let v = two_vertex(json!({"edges": [["a", "b", 1.0], ["b", "a", 2.0]]}));
        let err = validate_instance(&v).err().unwrap();
        assert_eq!(err.path, "/edges/1");
    }

    #[test]
    fn non_unitary_phi_is_rejected() {
        let err = validate_instance(&two_vertex(json!({"phi": {"a|b": [[1.001, 0.0]]}}))).err().unwrap();
        assert_eq!(err.path, "/phi/a|b");
        assert_eq!(err.code, "invariant");
    }

    #[test]
    fn unknown_keys_and_labels() {
        assert_eq!(validate_instance(&two_vertex(json!({"x": 1}))).err().unwrap().path, "/x");
        assert_eq!(validate_instance(&two_vertex(json!({"c": {"z": 1.0}}))).err().unwrap().path, "/c/z");
        let err = validate_instance(&two_vertex(json!({"W": {"a": [[-1.0, 0.0]]}}))).err().unwrap();
        assert_eq!(err.path, "/W/a");
    }

    #[test]
    fn pointer_escaping() {
        assert_eq!(child("/m", "a/b~c"), "/m/a~1b~0c");
    }
}
