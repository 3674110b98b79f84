//! Exact unitary evolution in the single-excitation subspace.
//!
//! One symmetric eigendecomposition is amortized over arbitrarily many time
//! samples: U(t) = V exp(-i diag(lambda) t) V^T, and the transfer fidelity
//! f(i,j;t) = |U(t)_ij|^2 needs only the i-th and j-th eigenvector rows.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::hamiltonian::ShiftedHamiltonian;

/// Unit-interval tolerance: computed fidelities may exceed [0, 1] by at
/// most this much before being treated as evidence of a broken
/// decomposition.
pub const FIDELITY_EXCESS_TOL: f64 = 1e-12;

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a
/// real symmetric Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    /// Precompute the spectral weights of a vertex pair for repeated
    /// fidelity evaluation at many times.
    pub fn pair(&self, i: usize, j: usize) -> Result<PairFidelity> {
        let n = self.dim();
        for v in [i, j] {
            if v >= n {
                return Err(Error::IndexOutOfRange { index: v, n });
            }
        }
        let weights = (0..n)
            .map(|k| self.eigenvectors[(i, k)] * self.eigenvectors[(j, k)])
            .collect();
        Ok(PairFidelity {
            weights,
            frequencies: self.eigenvalues.iter().copied().collect(),
        })
    }
}

/// The transfer amplitude of one vertex pair as a function of time:
/// amp(t) = sum_k w_k exp(-i lambda_k t) with w_k = V_ik V_jk.
#[derive(Debug, Clone)]
pub struct PairFidelity {
    weights: Vec<f64>,
    frequencies: Vec<f64>,
}

impl PairFidelity {
    /// Squared transfer amplitude at time `t`, unclamped.
    pub fn raw(&self, t: f64) -> f64 {
        let mut re = 0.0;
        let mut im = 0.0;
        for (w, lambda) in self.weights.iter().zip(&self.frequencies) {
            let (s, c) = (lambda * t).sin_cos();
            re += w * c;
            im -= w * s;
        }
        re * re + im * im
    }

    /// Squared transfer amplitude clamped to the unit interval; errors when
    /// the excess is beyond [`FIDELITY_EXCESS_TOL`].
    pub fn at(&self, t: f64) -> Result<f64> {
        clamp_unit(self.raw(t))
    }
}

/// Clamp a probability to [0, 1], treating larger excursions as numeric
/// inconsistency rather than silently truncating them.
pub fn clamp_unit(f: f64) -> Result<f64> {
    if !f.is_finite() || !(-FIDELITY_EXCESS_TOL..=1.0 + FIDELITY_EXCESS_TOL).contains(&f) {
        return Err(Error::NumericConsistency {
            what: format!("fidelity {f} outside [0, 1] beyond tolerance"),
        });
    }
    Ok(f.clamp(0.0, 1.0))
}

/// Full symmetric eigendecomposition with eigenvalues sorted ascending.
/// Deterministic for identical input.
pub fn eigendecompose(h: &ShiftedHamiltonian) -> Result<EigenSystem> {
    if let Some(bad) = h.matrix().iter().find(|x| !x.is_finite()) {
        return Err(Error::NumericInput {
            what: format!("matrix entry {bad}"),
        });
    }
    let se = h.matrix().clone().symmetric_eigen();
    let n = h.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        se.eigenvalues[a]
            .partial_cmp(&se.eigenvalues[b])
            .expect("symmetric eigenvalues are finite")
            .then(a.cmp(&b))
    });
    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&k| se.eigenvalues[k]));
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &se.eigenvectors.column(src));
    }
    Ok(EigenSystem {
        eigenvalues,
        eigenvectors,
    })
}

/// Time-evolution operator U(t) = V diag(exp(-i lambda t)) V^T.
pub fn propagator(es: &EigenSystem, t: f64) -> Result<DMatrix<Complex<f64>>> {
    if !t.is_finite() {
        return Err(Error::NumericInput {
            what: format!("time t = {t}"),
        });
    }
    let n = es.dim();
    let phases: Vec<Complex<f64>> = es
        .eigenvalues
        .iter()
        .map(|&lambda| Complex::new(0.0, -lambda * t).exp())
        .collect();
    let mut u = DMatrix::from_element(n, n, Complex::new(0.0, 0.0));
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex::new(0.0, 0.0);
            for (k, phase) in phases.iter().enumerate() {
                acc += phase * (es.eigenvectors[(i, k)] * es.eigenvectors[(j, k)]);
            }
            u[(i, j)] = acc;
        }
    }
    Ok(u)
}

/// Transfer fidelity f(i,j;t): the probability that an excitation injected
/// at `j` is found at `i` after time `t`.
pub fn fidelity(es: &EigenSystem, i: usize, j: usize, t: f64) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::NumericInput {
            what: format!("time t = {t}"),
        });
    }
    es.pair(i, j)?.at(t)
}

/// Provenance of a sampled fidelity curve.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceSource {
    pub graph: String,
    pub input: usize,
    pub output: usize,
    pub shifts: Vec<(usize, f64)>,
}

/// Fidelity sampled on a strictly increasing time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityTrace {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub source: TraceSource,
}

impl FidelityTrace {
    /// `(t, f)` of the largest sampled value; first-in-time among exact ties.
    pub fn peak(&self) -> (f64, f64) {
        let mut best = 0usize;
        for k in 1..self.values.len() {
            if self.values[k] > self.values[best] {
                best = k;
            }
        }
        (self.times[best], self.values[best])
    }

    /// CSV export: header `t,fidelity`, full-precision scientific notation.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,fidelity\n");
        for (t, f) in self.times.iter().zip(&self.values) {
            out.push_str(&crate::fmt_float(*t));
            out.push(',');
            out.push_str(&crate::fmt_float(*f));
            out.push('\n');
        }
        out
    }
}

/// Sample the fidelity of a vertex pair on an explicit time grid.
pub fn fidelity_trace(
    es: &EigenSystem,
    i: usize,
    j: usize,
    grid: &[f64],
    source: TraceSource,
) -> Result<FidelityTrace> {
    if let Some(bad) = grid.iter().find(|t| !t.is_finite()) {
        return Err(Error::InvalidGrid {
            what: format!("non-finite sample {bad}"),
        });
    }
    for pair in grid.windows(2) {
        if pair[0] >= pair[1] {
            return Err(Error::InvalidGrid {
                what: format!("not strictly increasing at {} -> {}", pair[0], pair[1]),
            });
        }
    }
    let pair = es.pair(i, j)?;
    let values = grid
        .iter()
        .map(|&t| pair.at(t))
        .collect::<Result<Vec<f64>>>()?;
    Ok(FidelityTrace {
        times: grid.to_vec(),
        values,
        source,
    })
}

/// Inclusive uniform grid 0..=tmax with `steps` intervals (steps+1 samples).
pub fn uniform_grid(tmax: f64, steps: usize) -> Vec<f64> {
    (0..=steps)
        .map(|k| tmax * (k as f64) / (steps as f64))
        .collect()
}
