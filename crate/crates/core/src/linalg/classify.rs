use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{check_dims, norm, singular_values, ComplexMatrix, ComplexVector};
use crate::error::Result;

pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-10;

/// Admissibility class of a would-be time-evolution operator.
///
/// `ProportionalUnitary` carries the proportionality constant `c` with
/// `M = c V`, `V` unitary. Only `|c|` is determined by `M`; the phase is
/// absorbed into `V` and reported as zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum OperatorClass {
    Unitary,
    ProportionalUnitary { scale: Complex64 },
    GeneralInvertible,
    Singular,
}

impl OperatorClass {
    pub fn is_singular(&self) -> bool {
        matches!(self, OperatorClass::Singular)
    }

    /// Unitary or a nonzero multiple of a unitary.
    pub fn is_proportional_unitary(&self) -> bool {
        matches!(self, OperatorClass::Unitary | OperatorClass::ProportionalUnitary { .. })
    }

    /// Modulus of the proportionality constant, 1 for unitaries.
    pub fn scale_modulus(&self) -> Option<f64> {
        match self {
            OperatorClass::Unitary => Some(1.0),
            OperatorClass::ProportionalUnitary { scale } => Some(scale.norm()),
            _ => None,
        }
    }

    /// Human-facing verdict line.
    pub fn verdict(&self) -> &'static str {
        match self {
            OperatorClass::Unitary => "UNITARY",
            OperatorClass::ProportionalUnitary { .. } => "PROPORTIONAL-UNITARY (physically standard)",
            OperatorClass::GeneralInvertible => "NON-UNITARY (B′ only)",
            OperatorClass::Singular => "SINGULAR (inadmissible)",
        }
    }
}

impl fmt::Display for OperatorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorClass::Unitary => f.write_str("unitary"),
            OperatorClass::ProportionalUnitary { scale } => {
                write!(f, "proportional-unitary (|c| = {})", scale.norm())
            }
            OperatorClass::GeneralInvertible => f.write_str("general invertible"),
            OperatorClass::Singular => f.write_str("singular"),
        }
    }
}

/// Classifies `m` as unitary, proportional to a unitary, invertible, or
/// singular.
///
/// Tests run in that order: `||M^dagger M - I||_F <= tol`, then
/// `||M^dagger M - |c|^2 I||_F <= tol |c|^2` with `|c|^2 = tr(M^dagger M)/N`,
/// then `sigma_min <= tol sigma_max`.
pub fn classify_operator(m: &ComplexMatrix, tol: f64) -> Result<OperatorClass> {
    let n = m.require_square()?;
    let gram = m.adjoint().matmul(m)?;
    if gram.distance_to_scaled_identity(Complex64::new(1.0, 0.0))? <= tol {
        return Ok(OperatorClass::Unitary);
    }
    let c2 = gram.trace()?.re / n as f64;
    if c2 > 0.0 && gram.distance_to_scaled_identity(Complex64::new(c2, 0.0))? <= tol * c2 {
        return Ok(OperatorClass::ProportionalUnitary {
            scale: Complex64::new(c2.sqrt(), 0.0),
        });
    }
    let sv = singular_values(m);
    let (max, min) = (sv[0], sv[n - 1]);
    if max == 0.0 || min <= tol * max {
        return Ok(OperatorClass::Singular);
    }
    Ok(OperatorClass::GeneralInvertible)
}

/// `<alpha|U^dagger U|beta>` reconstructed from four norms only.
///
/// The real part comes from `||U(alpha + beta)||`, the imaginary part from
/// `||U(alpha + i beta)||`, each corrected by `||U alpha||^2 + ||U beta||^2`.
/// No inner product of images is ever formed.
pub fn polarization_reconstruct(u: &ComplexMatrix, alpha: &ComplexVector, beta: &ComplexVector) -> Result<Complex64> {
    check_dims(alpha.dim(), beta.dim())?;
    let image_norm_sqr = |v: &ComplexVector| -> Result<f64> { Ok(norm(&u.apply(v)?).powi(2)) };
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);

    let na = image_norm_sqr(alpha)?;
    let nb = image_norm_sqr(beta)?;
    let n_sum = image_norm_sqr(&alpha.combine(one, beta, one)?)?;
    let n_isum = image_norm_sqr(&alpha.combine(one, beta, i)?)?;

    // ||U(a+b)||^2 = ||Ua||^2 + ||Ub||^2 + 2 Re<Ua|Ub>
    // ||U(a+ib)||^2 = ||Ua||^2 + ||Ub||^2 - 2 Im<Ua|Ub>
    let re = 0.5 * (n_sum - na - nb);
    let im = 0.5 * (na + nb - n_isum);
    Ok(Complex64::new(re, im))
}
