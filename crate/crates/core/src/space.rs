//! Finite measure spaces and Hermitian bundles over them.

use std::ops::Range;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite point set with strictly positive weights, i.e. `ℓ²(X, m)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedSpace {
    labels: Vec<String>,
    weights: Vec<f64>,
}

impl WeightedSpace {
    pub fn new(labels: Vec<String>, weights: Vec<f64>) -> Result<Self> {
        if labels.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: labels.len(),
                actual: weights.len(),
            });
        }
        if labels.is_empty() {
            return Err(Error::InvalidSpace("space has no points".into()));
        }
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w > 0.0))
        {
            return Err(Error::InvalidSpace(format!(
                "weight of point {} must be strictly positive, got {w}",
                labels[i]
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::InvalidSpace(format!("duplicate point label {l:?}")));
            }
        }
        Ok(Self { labels, weights })
    }

    /// Points labelled `0..n` with the given weights.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let labels = (0..weights.len()).map(|i| i.to_string()).collect();
        Self::new(labels, weights)
    }

    /// `n` points of unit weight.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::from_weights(vec![1.0; n])
    }

    /// Uniform grid of step `h` on `[0, n h)` carrying the midpoint
    /// discretisation of the radial measure `r dr`.
    pub fn radial_grid(n: usize, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::InvalidSpace(format!("grid step must be positive, got {h}")));
        }
        Self::from_weights((0..n).map(|i| (i as f64 + 0.5) * h * h).collect())
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        debug_assert_eq!(u.len(), self.len());
        debug_assert_eq!(v.len(), self.len());
        self.weights
            .iter()
            .zip(u.iter().zip(v))
            .map(|(m, (a, b))| m * a * b)
            .sum()
    }

    pub fn norm(&self, u: &[f64]) -> f64 {
        self.inner(u, u).max(0.0).sqrt()
    }

    pub fn check_len(&self, len: usize) -> Result<()> {
        if len != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: len,
            });
        }
        Ok(())
    }
}

/// Sections of a Hermitian bundle with fibers `ℂ^{d(x)}` over a weighted space,
/// stored as one flat vector, fiber after fiber.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberedSpace {
    base: WeightedSpace,
    fiber_dims: Vec<usize>,
    offsets: Vec<usize>,
}

impl FiberedSpace {
    pub fn new(base: WeightedSpace, fiber_dims: Vec<usize>) -> Result<Self> {
        base.check_len(fiber_dims.len())?;
        if let Some(x) = fiber_dims.iter().position(|&d| d == 0) {
            return Err(Error::InvalidSpace(format!(
                "fiber over {} must have positive dimension",
                base.labels()[x]
            )));
        }
        let mut offsets = Vec::with_capacity(fiber_dims.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for d in &fiber_dims {
            acc += d;
            offsets.push(acc);
        }
        Ok(Self {
            base,
            fiber_dims,
            offsets,
        })
    }

    /// The trivial line bundle.
    pub fn scalar(base: WeightedSpace) -> Self {
        let n = base.len();
        Self::new(base, vec![1; n]).expect("line bundle over a valid base")
    }

    pub fn base(&self) -> &WeightedSpace {
        &self.base
    }

    pub fn fiber_dims(&self) -> &[usize] {
        &self.fiber_dims
    }

    pub fn fiber_dim(&self, x: usize) -> usize {
        self.fiber_dims[x]
    }

    pub fn num_points(&self) -> usize {
        self.base.len()
    }

    /// Total (complex) dimension.
    pub fn dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn is_line_bundle(&self) -> bool {
        self.fiber_dims.iter().all(|&d| d == 1)
    }

    pub fn fiber_range(&self, x: usize) -> Range<usize> {
        self.offsets[x]..self.offsets[x + 1]
    }

    pub fn fiber<'a>(&self, v: &'a [Complex64], x: usize) -> &'a [Complex64] {
        &v[self.fiber_range(x)]
    }

    /// Point weight repeated across each fiber component.
    pub fn component_weights(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim());
        for (x, &d) in self.fiber_dims.iter().enumerate() {
            out.extend(std::iter::repeat_n(self.base.weights()[x], d));
        }
        out
    }

    /// `⟨u, v⟩ = Σ_x m(x) ⟨u(x), v(x)⟩_x`, linear in `u`.
    pub fn inner(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        debug_assert_eq!(u.len(), self.dim());
        debug_assert_eq!(v.len(), self.dim());
        (0..self.num_points())
            .map(|x| {
                let r = self.fiber_range(x);
                let local: Complex64 = u[r.clone()].iter().zip(&v[r]).map(|(a, b)| a * b.conj()).sum();
                local * self.base.weights()[x]
            })
            .sum()
    }

    pub fn norm(&self, u: &[Complex64]) -> f64 {
        self.inner(u, u).re.max(0.0).sqrt()
    }

    /// Pointwise fiber norms `x ↦ |u(x)|_x`.
    pub fn fiber_norms(&self, u: &[Complex64]) -> Vec<f64> {
        (0..self.num_points())
            .map(|x| crate::linalg::norm(self.fiber(u, x)))
            .collect()
    }

    pub fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: len,
            });
        }
        Ok(())
    }

    /// The section equal to the first standard basis vector in every fiber.
    pub fn first_basis_section(&self) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); self.dim()];
        for x in 0..self.num_points() {
            v[self.offsets[x]] = Complex64::new(1.0, 0.0);
        }
        v
    }
}

/// Lift a real vector to complex coordinates.
pub fn complexify(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

/// Real parts, failing if any imaginary part exceeds `tol`.
pub fn realify(v: &[Complex64], tol: f64) -> Result<Vec<f64>> {
    let imag = v.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if imag > tol {
        return Err(Error::NonRealInput { imag });
    }
    Ok(v.iter().map(|z| z.re).collect())
}
