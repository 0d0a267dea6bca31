//! Weighted graphs, Hermitian bundles with unitary connections, and the
//! associated scalar and magnetic Schrödinger operators.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::forms::OperatorForm;
use crate::linalg::{hermitian_eig, CMatrix, HermitianMatrix};
use crate::pairing::PairingSpec;
use crate::sampling::{complex_gaussian_matrix, derive_seed, random_unitary, substream};
use crate::space::{FiberedSpace, WeightedSpace};

/// Tolerance on `ΦᴴΦ = I` for connection maps.
pub const UNITARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub x: usize,
    pub y: usize,
    pub b: f64,
}

/// A finite weighted graph `(X, b, c, m)` with edges stored once, `x < y`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    space: WeightedSpace,
    edges: Vec<Edge>,
    c: Vec<f64>,
}

impl WeightedGraph {
    /// Edges may be listed in either orientation; a pair listed twice must
    /// carry the same weight. Zero weights are dropped.
    pub fn new(space: WeightedSpace, edges: &[(usize, usize, f64)], c: Vec<f64>) -> Result<Self> {
        let n = space.len();
        space.check_len(c.len())?;
        if let Some((x, v)) = c.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidGraph(format!(
                "killing term at {} must be nonnegative, got {v}",
                space.labels()[x]
            )));
        }
        let mut stored: Vec<Edge> = Vec::with_capacity(edges.len());
        for (k, &(x, y, b)) in edges.iter().enumerate() {
            if x >= n || y >= n {
                return Err(Error::InvalidGraph(format!("edge {k} refers to a missing vertex")));
            }
            if x == y {
                return Err(Error::InvalidGraph(format!("edge {k} is a self-loop")));
            }
            if !(b.is_finite() && b >= 0.0) {
                return Err(Error::InvalidGraph(format!("edge {k} has invalid weight {b}")));
            }
            let (x, y) = (x.min(y), x.max(y));
            match stored.iter().find(|e| e.x == x && e.y == y) {
                Some(e) if e.b != b => {
                    return Err(Error::InvalidGraph(format!(
                        "edge {k} gives b({x},{y}) = {b} but an earlier entry gives {}",
                        e.b
                    )));
                }
                Some(_) => {}
                None => stored.push(Edge { x, y, b }),
            }
        }
        stored.retain(|e| e.b > 0.0);
        stored.sort_by_key(|e| (e.x, e.y));
        Ok(Self { space, edges: stored, c })
    }

    pub fn space(&self) -> &WeightedSpace {
        &self.space
    }

    pub fn num_vertices(&self) -> usize {
        self.space.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn weight(&self, x: usize, y: usize) -> f64 {
        let (x, y) = (x.min(y), x.max(y));
        self.edge_index(x, y).map_or(0.0, |k| self.edges[k].b)
    }

    pub fn edge_index(&self, x: usize, y: usize) -> Option<usize> {
        self.edges.binary_search_by_key(&(x, y), |e| (e.x, e.y)).ok()
    }

    /// `Σ_y b(x, y)`.
    pub fn degree(&self, x: usize) -> f64 {
        self.edges
            .iter()
            .filter(|e| e.x == x || e.y == x)
            .map(|e| e.b)
            .sum()
    }

    pub fn with_killing(&self, c: Vec<f64>) -> Result<Self> {
        let edges: Vec<_> = self.edges.iter().map(|e| (e.x, e.y, e.b)).collect();
        Self::new(self.space.clone(), &edges, c)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.num_vertices();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for e in &self.edges {
                let other = if e.x == x { e.y } else if e.y == x { e.x } else { continue };
                if !seen[other] {
                    seen[other] = true;
                    stack.push(other);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// `L f(x) = (1/m(x)) Σ_y b(x,y)(f(x) - f(y)) + (c(x)/m(x)) f(x)`.
pub fn formal_laplacian(g: &WeightedGraph) -> Result<OperatorForm> {
    let n = g.num_vertices();
    let m = g.space().weights();
    let mut a = CMatrix::zeros(n, n);
    for x in 0..n {
        a[(x, x)] = Complex64::new((g.degree(x) + g.c()[x]) / m[x], 0.0);
    }
    for e in g.edges() {
        a[(e.x, e.y)] = Complex64::new(-e.b / m[e.x], 0.0);
        a[(e.y, e.x)] = Complex64::new(-e.b / m[e.y], 0.0);
    }
    OperatorForm::scalar(g.space().clone(), a)
}

/// `½ Σ_{x,y} b(x,y) |u(x) - u(y)|² + Σ_x c(x) |u(x)|²`.
pub fn dirichlet_form_value(g: &WeightedGraph, u: &[Complex64]) -> Result<f64> {
    g.space().check_len(u.len())?;
    let edges: f64 = g.edges().iter().map(|e| e.b * (u[e.x] - u[e.y]).norm_sqr()).sum();
    let killing: f64 = g.c().iter().zip(u).map(|(c, z)| c * z.norm_sqr()).sum();
    Ok(edges + killing)
}

/// A weighted graph with a Hermitian bundle, unitary connection maps
/// `Φ_{x,y}: F_y → F_x` on its edges and a pointwise positive potential `W`.
#[derive(Debug, Clone, PartialEq)]
pub struct MagneticInstance {
    graph: WeightedGraph,
    fibers: FiberedSpace,
    /// `Φ_{x,y}` for each stored edge `x < y`; `Φ_{y,x}` is its adjoint.
    phi: Vec<CMatrix>,
    w: Vec<CMatrix>,
}

impl MagneticInstance {
    pub fn new(graph: WeightedGraph, fiber_dims: Vec<usize>, phi: Vec<CMatrix>, w: Vec<CMatrix>) -> Result<Self> {
        let fibers = FiberedSpace::new(graph.space().clone(), fiber_dims)?;
        if phi.len() != graph.edges().len() {
            return Err(Error::InvalidInstance(format!(
                "expected {} connection maps, got {}",
                graph.edges().len(),
                phi.len()
            )));
        }
        for (e, p) in graph.edges().iter().zip(&phi) {
            check_unitary(p, fibers.fiber_dim(e.x), fibers.fiber_dim(e.y))
                .map_err(|err| Error::InvalidInstance(format!("Φ({},{}): {err}", e.x, e.y)))?;
        }
        fibers.base().check_len(w.len())?;
        for (x, wx) in w.iter().enumerate() {
            check_potential(wx, fibers.fiber_dim(x))
                .map_err(|err| Error::InvalidInstance(format!("W({x}): {err}")))?;
        }
        Ok(Self { graph, fibers, phi, w })
    }

    /// Trivial line bundle with `Φ ≡ 1` and `W = c`.
    pub fn trivial(graph: WeightedGraph) -> Self {
        let n = graph.num_vertices();
        let phi = vec![CMatrix::identity(1); graph.edges().len()];
        let w = graph.c().iter().map(|c| CMatrix::from_diag(&[*c])).collect();
        Self::new(graph, vec![1; n], phi, w).expect("trivial bundle is valid")
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn fibers(&self) -> &FiberedSpace {
        &self.fibers
    }

    pub fn phi_edges(&self) -> &[CMatrix] {
        &self.phi
    }

    pub fn w(&self) -> &[CMatrix] {
        &self.w
    }

    /// `Φ_{x,y}` for an edge in either orientation.
    pub fn phi(&self, x: usize, y: usize) -> Option<CMatrix> {
        if x < y {
            self.graph.edge_index(x, y).map(|k| self.phi[k].clone())
        } else {
            self.graph.edge_index(y, x).map(|k| self.phi[k].adjoint())
        }
    }

    /// Bundle modulus pairing into the orthant over the vertices.
    pub fn pairing(&self) -> PairingSpec {
        PairingSpec::bundle(self.fibers.clone())
    }

    /// Smallest eigenvalue of `W(x) - c(x)` over all vertices.
    pub fn potential_gap(&self) -> Result<f64> {
        let mut gap = f64::INFINITY;
        for (x, wx) in self.w.iter().enumerate() {
            let lmin = hermitian_eig(&HermitianMatrix::new(wx.clone())?)?.min_eigenvalue();
            gap = gap.min(lmin - self.graph.c()[x]);
        }
        Ok(gap)
    }

    /// Conjugates by fiber unitaries: `Φ' = U(x) Φ U(y)ᴴ`, `W' = U W Uᴴ`.
    pub fn gauge(&self, u: &[CMatrix]) -> Result<Self> {
        self.fibers.base().check_len(u.len())?;
        let phi = self
            .graph
            .edges()
            .iter()
            .zip(&self.phi)
            .map(|(e, p)| &(&u[e.x] * p) * &u[e.y].adjoint())
            .collect();
        let w = self
            .w
            .iter()
            .zip(u)
            .map(|(wx, ux)| &(ux * wx) * &ux.adjoint())
            .collect();
        Self::new(self.graph.clone(), self.fibers.fiber_dims().to_vec(), phi, w)
    }
}

/// `p` is a `rows x cols` unitary within [`UNITARY_TOL`].
pub fn check_unitary(p: &CMatrix, rows: usize, cols: usize) -> Result<()> {
    if p.nrows() != rows || p.ncols() != cols {
        return Err(Error::ShapeMismatch(format!("expected {rows}x{cols}, got {}x{}", p.nrows(), p.ncols())));
    }
    let left = &p.adjoint() * p;
    let right = p * &p.adjoint();
    if !left.approx_eq(&CMatrix::identity(cols), UNITARY_TOL)
        || !right.approx_eq(&CMatrix::identity(rows), UNITARY_TOL)
    {
        return Err(Error::InvalidInstance("connection map is not unitary".into()));
    }
    Ok(())
}

/// `w` is a Hermitian positive semidefinite `d x d` matrix.
pub fn check_potential(w: &CMatrix, d: usize) -> Result<()> {
    if w.nrows() != d || w.ncols() != d {
        return Err(Error::ShapeMismatch(format!("expected {d}x{d}, got {}x{}", w.nrows(), w.ncols())));
    }
    let eig = hermitian_eig(&HermitianMatrix::new(w.clone())?)?;
    if eig.min_eigenvalue() < -1e-10 * (1.0 + eig.spectral_radius()) {
        return Err(Error::InvalidInstance(format!(
            "potential is not positive semidefinite (min eigenvalue {:e})",
            eig.min_eigenvalue()
        )));
    }
    Ok(())
}

/// `Hu(x) = (1/m(x)) [Σ_y b(x,y)(u(x) - Φ_{x,y} u(y)) + W(x) u(x)]`.
pub fn magnetic_operator(inst: &MagneticInstance) -> Result<OperatorForm> {
    let fibers = inst.fibers();
    let g = inst.graph();
    let m = g.space().weights();
    let n = fibers.dim();
    let mut h = CMatrix::zeros(n, n);
    for x in 0..g.num_vertices() {
        let r = fibers.fiber_range(x);
        let mut diag = inst.w()[x].clone();
        for k in 0..r.len() {
            diag[(k, k)] += g.degree(x);
        }
        h.set_block(r.start, r.start, &divide(&diag, m[x]));
    }
    for (e, p) in g.edges().iter().zip(inst.phi_edges()) {
        let (rx, ry) = (fibers.fiber_range(e.x), fibers.fiber_range(e.y));
        h.set_block(rx.start, ry.start, &divide(&p.scale_real(-e.b), m[e.x]));
        h.set_block(ry.start, rx.start, &divide(&p.adjoint().scale_real(-e.b), m[e.y]));
    }
    OperatorForm::new(fibers.clone(), h)
}

fn divide(a: &CMatrix, d: f64) -> CMatrix {
    CMatrix::from_fn(a.nrows(), a.ncols(), |r, c| a[(r, c)] / d)
}

/// `½ Σ_{x,y} b(x,y) |u(x) - Φ_{x,y} u(y)|²ₓ + Σ_x ⟨W(x) u(x), u(x)⟩ₓ`.
pub fn magnetic_form_value(inst: &MagneticInstance, u: &[Complex64]) -> Result<f64> {
    let fibers = inst.fibers();
    fibers.check_len(u.len())?;
    let mut total = 0.0;
    // Both orientations of an edge contribute the same amount, so each is counted once.
    for (e, p) in inst.graph().edges().iter().zip(inst.phi_edges()) {
        let transported = p.mul_vec(fibers.fiber(u, e.y));
        let diff: Vec<Complex64> = fibers.fiber(u, e.x).iter().zip(&transported).map(|(a, b)| a - b).collect();
        total += e.b * crate::linalg::norm(&diff).powi(2);
    }
    for (x, wx) in inst.w().iter().enumerate() {
        let ux = fibers.fiber(u, x);
        total += crate::linalg::dot(&wx.mul_vec(ux), ux).re;
    }
    Ok(total)
}

/// `a(u) = b(u) + Σ_x V(x) |u(x)|² m(x)`: the operator gains `V(x)` on the diagonal.
pub fn add_potential(f: &OperatorForm, v: &[f64]) -> Result<OperatorForm> {
    let fibers = f.space();
    fibers.base().check_len(v.len())?;
    if let Some((index, &value)) = v.iter().enumerate().find(|(_, x)| !(**x >= 0.0)) {
        return Err(Error::NegativePotential { index, value });
    }
    let mut diag = Vec::with_capacity(fibers.dim());
    for (x, &vx) in v.iter().enumerate() {
        diag.extend(std::iter::repeat_n(vx, fibers.fiber_dim(x)));
    }
    f.plus_diagonal(&diag)
}

fn check_generator_params(n: usize, edge_density: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameters("need at least one vertex".into()));
    }
    if !(edge_density > 0.0 && edge_density <= 1.0) {
        return Err(Error::InvalidParameters(format!(
            "edge density must lie in (0, 1], got {edge_density}"
        )));
    }
    Ok(())
}

fn draw_graph(rng: &mut impl Rng, n: usize, edge_density: f64) -> Result<WeightedGraph> {
    let m: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
    let c: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
    let mut edges = Vec::new();
    // A random recursive tree keeps the graph connected.
    for y in 1..n {
        let x = rng.random_range(0..y);
        edges.push((x, y, rng.random_range(0.5..2.0)));
    }
    for x in 0..n {
        for y in (x + 1)..n {
            let in_tree = edges.iter().any(|&(a, b, _)| (a, b) == (x, y));
            if !in_tree && rng.random_bool(edge_density) {
                edges.push((x, y, rng.random_range(0.5..2.0)));
            }
        }
    }
    WeightedGraph::new(WeightedSpace::from_weights(m)?, &edges, c)
}

/// Connected random graph with `b, m ∈ [0.5, 2]` and `c ∈ [0, 1]`.
pub fn random_graph(n: usize, edge_density: f64, seed: u64) -> Result<WeightedGraph> {
    check_generator_params(n, edge_density)?;
    let mut rng = substream(derive_seed(seed, "graph"), 0);
    draw_graph(&mut rng, n, edge_density)
}

/// Random magnetic instance on a connected random graph.
///
/// All fibers share one dimension in `1..=max_fiber`. With
/// `ensure_w_geq_c`, `W(x) = c(x) I + GᴴG`; otherwise `W(x)` is a random
/// positive matrix that may or may not dominate `c(x)`.
pub fn random_instance(
    n: usize,
    max_fiber: usize,
    edge_density: f64,
    ensure_w_geq_c: bool,
    seed: u64,
) -> Result<MagneticInstance> {
    check_generator_params(n, edge_density)?;
    if max_fiber == 0 {
        return Err(Error::InvalidParameters("fiber dimension must be positive".into()));
    }
    let mut rng = substream(derive_seed(seed, "magnetic_instance"), 0);
    let graph = draw_graph(&mut rng, n, edge_density)?;
    let d = rng.random_range(1..=max_fiber);
    let phi = graph.edges().iter().map(|_| random_unitary(&mut rng, d)).collect();
    let mut w = Vec::with_capacity(n);
    for x in 0..n {
        let g = complex_gaussian_matrix(&mut rng, d, d).scale_real(0.5);
        let gram = &g.adjoint() * &g;
        let shift = if ensure_w_geq_c {
            graph.c()[x]
        } else {
            (graph.c()[x] + rng.random_range(-0.5..0.5)).max(0.0)
        };
        let mut wx = gram;
        for k in 0..d {
            wx[(k, k)] += shift;
        }
        // Exact Hermitian symmetry for the validator.
        w.push(HermitianMatrix::new(wx)?.into_matrix());
    }
    MagneticInstance::new(graph, vec![d; n], phi, w)
}
