//! Qubit registers, local operators and reduced density matrices.
//!
//! Basis ordering: the first tensor factor is the most significant bit, so
//! site 0 of an `n`-qubit register is bit `n - 1` of the basis index and the
//! two-qubit basis runs `|00>, |01>, |10>, |11>`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigendecomposition, ComplexMatrix, ComplexVector, ONE, ZERO};
use crate::states::{checked_norm_sqr, RawState, StateVector};

pub const MAX_QUBITS: usize = 12;
pub const DENSITY_TOL: f64 = 1e-10;

fn check_qubits(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 {
        return Err(Error::EmptyDimension);
    }
    if n_qubits > MAX_QUBITS {
        return Err(Error::TooManyQubits(n_qubits));
    }
    Ok(())
}

fn check_site(site: usize, n_qubits: usize) -> Result<()> {
    if site >= n_qubits {
        return Err(Error::SiteOutOfRange { site, n_qubits });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RegisterRepr", into = "RegisterRepr")]
pub struct QubitRegister {
    n_qubits: usize,
    sites: Vec<String>,
    state: RawState,
}

#[derive(Serialize, Deserialize)]
struct RegisterRepr {
    n_qubits: usize,
    sites: Vec<String>,
    state: RawState,
}

impl TryFrom<RegisterRepr> for QubitRegister {
    type Error = Error;
    fn try_from(r: RegisterRepr) -> Result<Self> {
        QubitRegister::new(r.state, r.sites)
    }
}

impl From<QubitRegister> for RegisterRepr {
    fn from(r: QubitRegister) -> Self {
        RegisterRepr {
            n_qubits: r.n_qubits,
            sites: r.sites,
            state: r.state,
        }
    }
}

impl QubitRegister {
    /// One label per qubit; the state dimension must be `2^sites.len()`.
    pub fn new(state: RawState, sites: Vec<String>) -> Result<Self> {
        let n_qubits = sites.len();
        check_qubits(n_qubits)?;
        let dim = 1usize << n_qubits;
        if state.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: state.dim(),
            });
        }
        Ok(Self { n_qubits, sites, state })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn sites(&self) -> &[String] {
        &self.sites
    }

    pub fn state(&self) -> &RawState {
        &self.state
    }

    pub fn site_index(&self, label: &str) -> Option<usize> {
        self.sites.iter().position(|s| s == label)
    }
}

/// `a ⊗ b`.
pub fn tensor_states(a: &RawState, b: &RawState) -> Result<RawState> {
    let mut entries = Vec::with_capacity(a.dim() * b.dim());
    for x in a.vector().entries() {
        for y in b.vector().entries() {
            entries.push(x * y);
        }
    }
    RawState::new(ComplexVector::new(entries)?)
}

/// `A ⊗ B`.
pub fn tensor_ops(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// `|00> + |11>`, unnormalized, sites `A` and `B`.
pub fn bell_state() -> QubitRegister {
    let state = RawState::new(ComplexVector::new(vec![ONE, ZERO, ZERO, ONE]).expect("finite")).expect("nonzero");
    QubitRegister::new(state, vec!["A".into(), "B".into()]).expect("two qubits")
}

/// `I ⊗ ... ⊗ op ⊗ ... ⊗ I` with `op` at `site`.
pub fn embed_local(op: &ComplexMatrix, site: usize, n_qubits: usize) -> Result<ComplexMatrix> {
    check_qubits(n_qubits)?;
    check_site(site, n_qubits)?;
    if op.rows() != 2 || op.cols() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: if op.rows() != 2 { op.rows() } else { op.cols() },
        });
    }
    let left = ComplexMatrix::identity(1 << site)?;
    let right = ComplexMatrix::identity(1 << (n_qubits - 1 - site))?;
    Ok(left.kron(op).kron(&right))
}

/// A positive semidefinite Hermitian matrix. `normalized` records whether
/// the trace has been scaled to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DensityRepr", into = "DensityRepr")]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    normalized: bool,
}

#[derive(Serialize, Deserialize)]
struct DensityRepr {
    #[serde(flatten)]
    matrix: ComplexMatrix,
    normalized: bool,
}

impl TryFrom<DensityRepr> for DensityMatrix {
    type Error = Error;
    fn try_from(r: DensityRepr) -> Result<Self> {
        DensityMatrix::new(r.matrix, r.normalized)
    }
}

impl From<DensityMatrix> for DensityRepr {
    fn from(d: DensityMatrix) -> Self {
        DensityRepr {
            matrix: d.matrix,
            normalized: d.normalized,
        }
    }
}

impl DensityMatrix {
    /// Validates Hermiticity, positivity and (if `normalized`) unit trace,
    /// each within `1e-10` relative to the trace.
    pub fn new(matrix: ComplexMatrix, normalized: bool) -> Result<Self> {
        let trace = matrix.trace()?.re;
        let scale = trace.abs().max(1.0);
        let residual = matrix.hermiticity_residual()?;
        if residual > DENSITY_TOL * scale {
            return Err(Error::NotHermitian {
                residual,
                tol: DENSITY_TOL * scale,
            });
        }
        if normalized && (trace - 1.0).abs() > DENSITY_TOL {
            return Err(Error::NumericContract(format!(
                "normalized density matrix has trace {trace}"
            )));
        }
        let eig = hermitian_eigendecomposition(&matrix, DENSITY_TOL * scale)?;
        if eig.values.first().is_some_and(|&l| l < -DENSITY_TOL * scale) {
            return Err(Error::NumericContract(format!(
                "density matrix has negative eigenvalue {}",
                eig.values[0]
            )));
        }
        Ok(Self { matrix, normalized })
    }

    /// `|s><s|` exactly as given, without dividing by `<s|s>`.
    pub fn from_state_unnormalized(s: &RawState) -> Self {
        Self {
            matrix: ComplexMatrix::outer(s.vector()),
            normalized: false,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().expect("square").re
    }

    /// `rho / tr(rho)`.
    pub fn renormalized(&self) -> Result<Self> {
        let t = self.trace();
        if t <= 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(Self {
            matrix: self.matrix.scale(Complex64::new(1.0 / t, 0.0))?,
            normalized: true,
        })
    }

    /// Real diagonal, i.e. computational-basis weights.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix.get(i, i).re).collect()
    }
}

/// `|s><s| / <s|s>`.
pub fn density_from_state(s: &RawState) -> Result<DensityMatrix> {
    let n2 = checked_norm_sqr(s.vector())?;
    Ok(DensityMatrix {
        matrix: ComplexMatrix::outer(s.vector()).scale(Complex64::new(1.0 / n2, 0.0))?,
        normalized: true,
    })
}

/// Reduced density matrix of the single qubit at `keep`, tracing out every
/// other site. The `normalized` flag is carried over from the input.
pub fn partial_trace(rho: &DensityMatrix, keep: usize, n_qubits: usize) -> Result<DensityMatrix> {
    check_qubits(n_qubits)?;
    check_site(keep, n_qubits)?;
    let dim = 1usize << n_qubits;
    if rho.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: rho.dim(),
        });
    }
    let shift = n_qubits - 1 - keep;
    let bit = 1usize << shift;
    let mut out = [ZERO; 4];
    for rest in 0..dim {
        if rest & bit != 0 {
            continue;
        }
        for a in 0..2 {
            for b in 0..2 {
                out[a * 2 + b] += rho.matrix.get(rest | (a << shift), rest | (b << shift));
            }
        }
    }
    Ok(DensityMatrix {
        matrix: ComplexMatrix::new(2, 2, out.to_vec())?,
        normalized: rho.normalized,
    })
}
