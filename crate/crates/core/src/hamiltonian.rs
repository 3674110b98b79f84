//! Single-excitation XY Hamiltonians with on-site energy shifts, Gaussian
//! disorder realizations, and a brute-force full-Hilbert-space oracle for
//! small networks.
//!
//! In the single-excitation basis the Hamiltonian of a network `G` has
//! entries 2 on edges of `G`, the per-vertex shift on the diagonal, and 0
//! elsewhere. The oracle builds the same operator from explicit Pauli
//! tensor products on the full 2^n space and projects it back down, which
//! validates the n-dimensional restriction used everywhere else.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Largest vertex count accepted by [`full_space_oracle`]; the full space
/// has dimension 2^n.
pub const FULL_SPACE_LIMIT: usize = 12;

/// Per-vertex energy shifts. Vertices not listed are unshifted.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ShiftSpec {
    shifts: BTreeMap<usize, f64>,
}

impl ShiftSpec {
    pub fn none() -> Self {
        Self::default()
    }

    /// Equal shift on an input/output pair.
    pub fn io_pair(i: usize, j: usize, value: f64) -> Self {
        let mut s = Self::default();
        s.set(i, value);
        s.set(j, value);
        s
    }

    pub fn set(&mut self, vertex: usize, value: f64) {
        self.shifts.insert(vertex, value);
    }

    pub fn with(mut self, vertex: usize, value: f64) -> Self {
        self.set(vertex, value);
        self
    }

    pub fn get(&self, vertex: usize) -> f64 {
        self.shifts.get(&vertex).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.shifts.iter().map(|(&v, &x)| (v, x))
    }

    pub fn is_empty(&self) -> bool {
        self.shifts.is_empty()
    }

    /// True when some vertex carries a nonzero shift.
    pub fn any_nonzero(&self) -> bool {
        self.shifts.values().any(|&x| x != 0.0)
    }

    fn validate(&self, n: usize) -> Result<()> {
        for &v in self.shifts.keys() {
            if v >= n {
                return Err(Error::IndexOutOfRange { index: v, n });
            }
        }
        Ok(())
    }
}

/// Disorder target: on-site energies (qubit frequencies) or couplings
/// (existing edges only).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseMode {
    VertexFrequencies,
    EdgeCouplings,
}

/// One static Gaussian disorder realization: mode, variance and the seed of
/// the deterministic draw stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub mode: NoiseMode,
    pub variance: f64,
    pub seed: u64,
}

/// Real symmetric single-excitation Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedHamiltonian {
    mat: DMatrix<f64>,
}

impl ShiftedHamiltonian {
    /// Wrap a raw matrix, enforcing exact symmetry and finiteness.
    pub fn from_matrix(mat: DMatrix<f64>) -> Result<Self> {
        let n = mat.nrows();
        if mat.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: mat.ncols(),
            });
        }
        for i in 0..n {
            for j in 0..n {
                let x = mat[(i, j)];
                if !x.is_finite() {
                    return Err(Error::NumericInput {
                        what: format!("entry ({i},{j}) = {x}"),
                    });
                }
                if j > i && x != mat[(j, i)] {
                    return Err(Error::NotSymmetric { i, j });
                }
            }
        }
        Ok(Self { mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.mat[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    /// Largest absolute entrywise difference to another Hamiltonian.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.mat - &other.mat).amax()
    }

    /// Row-major CSV dump at full precision, for debugging.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|j| crate::fmt_float(self.mat[(i, j)]))
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Build the shifted single-excitation Hamiltonian of `g`: diagonal entries
/// are the per-vertex shifts, off-diagonal entries are 2 on edges of `g`
/// and 0 elsewhere.
pub fn build(g: &Graph, shifts: &ShiftSpec) -> Result<ShiftedHamiltonian> {
    let n = g.vertex_count();
    shifts.validate(n)?;
    let mut mat = DMatrix::zeros(n, n);
    for (v, x) in shifts.iter() {
        if !x.is_finite() {
            return Err(Error::NumericInput {
                what: format!("shift at vertex {v} = {x}"),
            });
        }
        mat[(v, v)] = x;
    }
    for (i, j) in g.edges() {
        mat[(i, j)] = 2.0;
        mat[(j, i)] = 2.0;
    }
    Ok(ShiftedHamiltonian { mat })
}

/// Add one static Gaussian disorder realization to `h`.
///
/// `VertexFrequencies` draws an independent perturbation for every diagonal
/// entry; `EdgeCouplings` draws one perturbation per existing edge and
/// applies it to both symmetric entries. Draws come from a deterministic
/// stream seeded by `spec.seed`, so identical inputs give bit-identical
/// output.
pub fn apply_noise(
    h: &ShiftedHamiltonian,
    g: &Graph,
    spec: &NoiseSpec,
) -> Result<ShiftedHamiltonian> {
    if spec.variance < 0.0 || !spec.variance.is_finite() {
        return Err(Error::InvalidVariance {
            variance: spec.variance,
        });
    }
    let n = g.vertex_count();
    if h.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: h.dim(),
        });
    }
    if spec.variance == 0.0 {
        return Ok(h.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let normal = Normal::new(0.0, spec.variance.sqrt()).expect("std dev is finite and nonnegative");
    let mut mat = h.mat.clone();
    match spec.mode {
        NoiseMode::VertexFrequencies => {
            for v in 0..n {
                mat[(v, v)] += normal.sample(&mut rng);
            }
        }
        NoiseMode::EdgeCouplings => {
            for (i, j) in g.edges() {
                let xi = normal.sample(&mut rng);
                let value = mat[(i, j)] + xi;
                mat[(i, j)] = value;
                mat[(j, i)] = value;
            }
        }
    }
    Ok(ShiftedHamiltonian { mat })
}

/// Brute-force oracle: assemble the network Hamiltonian on the full 2^n
/// space from explicit Pauli tensor products plus shift projectors, then
/// project onto the single-excitation subspace.
///
/// Basis convention: bit `k` of a full-space index is the state of qubit
/// `k`, and the single-excitation basis vector for vertex `j` is the
/// computational state with index `2^j`.
pub fn full_space_oracle(g: &Graph, shifts: &ShiftSpec) -> Result<ShiftedHamiltonian> {
    let n = g.vertex_count();
    if n > FULL_SPACE_LIMIT {
        return Err(Error::SizeLimit {
            n,
            limit: FULL_SPACE_LIMIT,
        });
    }
    shifts.validate(n)?;

    type C = Complex<f64>;
    let zero = C::new(0.0, 0.0);
    let one = C::new(1.0, 0.0);
    let ident = Matrix2::new(one, zero, zero, one);
    let pauli_x = Matrix2::new(zero, one, one, zero);
    let pauli_y = Matrix2::new(zero, -C::i(), C::i(), zero);
    let excited = Matrix2::new(zero, zero, zero, one); // |1><1|

    // Tensor product with qubit n-1 as the leftmost (most significant) factor.
    let chain = |factors: &BTreeMap<usize, Matrix2<C>>| -> DMatrix<C> {
        let mut acc = DMatrix::identity(1, 1);
        for k in (0..n).rev() {
            let f = factors.get(&k).unwrap_or(&ident);
            acc = acc.kronecker(&DMatrix::from_fn(2, 2, |r, c| f[(r, c)]));
        }
        acc
    };

    let dim = 1usize << n;
    let mut full: DMatrix<C> = DMatrix::zeros(dim, dim);
    // (1/2) * sum over ordered pairs i != j of A_ij (X_i X_j + Y_i Y_j)
    for i in 0..n {
        for j in 0..n {
            if i == j || !g.has_edge(i, j) {
                continue;
            }
            let xx = chain(&BTreeMap::from([(i, pauli_x), (j, pauli_x)]));
            let yy = chain(&BTreeMap::from([(i, pauli_y), (j, pauli_y)]));
            full += (xx + yy) * C::new(0.5, 0.0);
        }
    }
    for (v, value) in shifts.iter() {
        let proj = chain(&BTreeMap::from([(v, excited)]));
        full += proj * C::new(value, 0.0);
    }

    let mut mat = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let z = full[(1usize << i, 1usize << j)];
            if z.im.abs() > 1e-12 {
                return Err(Error::NumericConsistency {
                    what: format!("complex residue {} in projected entry ({i},{j})", z.im),
                });
            }
            mat[(i, j)] = z.re;
        }
    }
    ShiftedHamiltonian::from_matrix(mat)
}
