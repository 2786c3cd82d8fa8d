//! State representations and the two equivalence relations.
//!
//! * [`RawState`]: any nonzero vector; physical state is the ray `{z v : z != 0}`.
//! * [`UnitState`]: unit vector; physical state is the phase class `{e^{i t} v}`.
//! * [`CanonicalRay`]: the unique representative of a ray, unit norm with its
//!   first significant entry real and positive.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{inner_product, norm, ComplexVector};

pub const UNIT_NORM_TOL: f64 = 1e-12;
pub const DEFAULT_PHASE_TOL: f64 = 1e-12;

/// Which formulation a state vector belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Raw,
    Unit,
    Ray,
}

/// Common surface of state types that evolution and measurement act on.
pub trait StateVector: Sized {
    const REPRESENTATION: Representation;

    fn vector(&self) -> &ComplexVector;

    /// Wraps the image of this state under a linear map, applying the
    /// representation's normalization convention.
    fn from_image(v: ComplexVector) -> Result<Self>;

    fn dim(&self) -> usize {
        self.vector().dim()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexVector", into = "ComplexVector")]
pub struct RawState {
    vec: ComplexVector,
}

impl RawState {
    pub fn new(vec: ComplexVector) -> Result<Self> {
        if vec.is_zero() {
            return Err(Error::ZeroVector);
        }
        Ok(Self { vec })
    }

    pub fn into_vector(self) -> ComplexVector {
        self.vec
    }

    pub fn norm(&self) -> f64 {
        norm(&self.vec)
    }

    /// `z * self` for nonzero `z`.
    pub fn scale(&self, z: Complex64) -> Result<Self> {
        Self::new(self.vec.scale(z)?)
    }
}

impl TryFrom<ComplexVector> for RawState {
    type Error = Error;
    fn try_from(v: ComplexVector) -> Result<Self> {
        Self::new(v)
    }
}

impl From<RawState> for ComplexVector {
    fn from(s: RawState) -> Self {
        s.vec
    }
}

impl StateVector for RawState {
    const REPRESENTATION: Representation = Representation::Raw;

    fn vector(&self) -> &ComplexVector {
        &self.vec
    }

    fn from_image(v: ComplexVector) -> Result<Self> {
        Self::new(v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexVector", into = "ComplexVector")]
pub struct UnitState {
    vec: ComplexVector,
}

impl UnitState {
    /// Accepts `vec` only if its norm is within `1e-12` of one.
    pub fn new(vec: ComplexVector) -> Result<Self> {
        let n = norm(&vec);
        if (n - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::NotUnitNorm { norm: n });
        }
        Ok(Self { vec })
    }

    pub fn into_vector(self) -> ComplexVector {
        self.vec
    }

    /// The same vector viewed as a formulation-B state.
    pub fn to_raw(&self) -> RawState {
        RawState { vec: self.vec.clone() }
    }
}

impl TryFrom<ComplexVector> for UnitState {
    type Error = Error;
    fn try_from(v: ComplexVector) -> Result<Self> {
        Self::new(v)
    }
}

impl From<UnitState> for ComplexVector {
    fn from(s: UnitState) -> Self {
        s.vec
    }
}

impl StateVector for UnitState {
    const REPRESENTATION: Representation = Representation::Unit;

    fn vector(&self) -> &ComplexVector {
        &self.vec
    }

    fn from_image(v: ComplexVector) -> Result<Self> {
        normalize(&RawState::new(v)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexVector", into = "ComplexVector")]
pub struct CanonicalRay {
    vec: ComplexVector,
}

impl CanonicalRay {
    pub fn vector(&self) -> &ComplexVector {
        &self.vec
    }

    pub fn into_vector(self) -> ComplexVector {
        self.vec
    }

    pub fn to_unit(&self) -> UnitState {
        UnitState { vec: self.vec.clone() }
    }
}

impl TryFrom<ComplexVector> for CanonicalRay {
    type Error = Error;
    /// Gauge-fixes the input; a vector that is already canonical is returned
    /// unchanged up to rounding.
    fn try_from(v: ComplexVector) -> Result<Self> {
        canonicalize(&RawState::new(v)?, DEFAULT_PHASE_TOL)
    }
}

impl From<CanonicalRay> for ComplexVector {
    fn from(s: CanonicalRay) -> Self {
        s.vec
    }
}

/// A state of any representation, as read from or written to JSON:
/// the vector schema plus `"representation": "raw" | "unit" | "ray"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "representation", rename_all = "lowercase")]
pub enum AnyState {
    Raw(RawState),
    Unit(UnitState),
    Ray(CanonicalRay),
}

impl AnyState {
    pub fn vector(&self) -> &ComplexVector {
        match self {
            AnyState::Raw(s) => s.vector(),
            AnyState::Unit(s) => s.vector(),
            AnyState::Ray(s) => s.vector(),
        }
    }

    pub fn representation(&self) -> Representation {
        match self {
            AnyState::Raw(_) => Representation::Raw,
            AnyState::Unit(_) => Representation::Unit,
            AnyState::Ray(_) => Representation::Ray,
        }
    }
}

/// `||v||^2`, distinguishing the zero vector from a nonzero vector whose
/// squared norm is not representable in double precision.
pub(crate) fn checked_norm_sqr(v: &ComplexVector) -> Result<f64> {
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    let n2 = v.norm_sqr();
    if n2 == 0.0 || !n2.is_finite() {
        return Err(Error::NumericContract(format!(
            "squared norm of a nonzero vector is {n2:e}; entries are outside the representable range"
        )));
    }
    Ok(n2)
}

/// `s / ||s||`.
pub fn normalize(s: &RawState) -> Result<UnitState> {
    let n = checked_norm_sqr(&s.vec)?.sqrt();
    UnitState::new(ComplexVector::from_computed(
        s.vec.entries().iter().map(|z| z / n).collect(),
    )?)
}

/// Unique representative of the ray through `s`.
///
/// The result is `z s` for the nonzero `z` that makes it unit norm and makes
/// its first entry with modulus above `phase_tol * ||s||` real and positive.
/// Entries below that threshold are treated as numerically zero for the
/// purpose of choosing the gauge, but are kept in the output.
pub fn canonicalize(s: &RawState, phase_tol: f64) -> Result<CanonicalRay> {
    let n = checked_norm_sqr(&s.vec)?.sqrt();
    let entries = s.vec.entries();
    let pivot = entries
        .iter()
        .position(|z| z.norm() > phase_tol * n)
        .unwrap_or_else(|| {
            // every entry is below threshold: fall back to the largest one
            entries
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
                .map(|(i, _)| i)
                .unwrap_or(0)
        });
    let p = entries[pivot];
    let z = p.conj() / (p.norm() * n);
    let mut out = s.vec.scale(z)?.into_entries();
    out[pivot] = Complex64::new(p.norm() / n, 0.0);
    Ok(CanonicalRay {
        vec: ComplexVector::new(out)?,
    })
}

/// Phase equivalence of unit vectors: `min_t ||u - e^{it} v|| <= tol`.
///
/// The minimizing phase is `arg <v|u>`, where the distance squared equals
/// `2 - 2 |<u|v>|`. The distance is evaluated at that phase directly rather
/// than through `1 - |<u|v>|`, which cancels catastrophically for small `tol`.
pub fn equivalent_a(u: &UnitState, v: &UnitState, tol: f64) -> Result<bool> {
    let overlap = inner_product(&v.vec, &u.vec)?;
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let aligned = v.vec.scale(phase)?;
    Ok(norm(&u.vec.sub(&aligned)?) <= tol)
}

/// Ray equivalence of nonzero vectors: canonical representatives within
/// `tol` in norm.
pub fn equivalent_b(s: &RawState, t: &RawState, tol: f64) -> Result<bool> {
    let a = canonicalize(s, DEFAULT_PHASE_TOL)?;
    let b = canonicalize(t, DEFAULT_PHASE_TOL)?;
    Ok(norm(&a.vec.sub(&b.vec)?) <= tol)
}
