//! Time-evolution engines and the unitarity laboratory.
//!
//! Three engines share one operator type:
//!
//! * [`evolve_unitary`]: standard evolution, unitary operators only.
//! * [`evolve_linear_b`]: any invertible operator on raw vectors, norm left
//!   free to drift.
//! * [`evolve_manual_norm_a`]: the same invertible operator followed by
//!   rescaling back to the unit sphere, which is a nonlinear map on unit
//!   vectors unless `U^dagger U` is proportional to the identity.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    classify_operator, hermitian_eigendecomposition, inner_product, norm, polarization_reconstruct, ComplexMatrix,
    ComplexVector, OperatorClass, DEFAULT_CLASSIFY_TOL,
};
use crate::random::{random_unit_vector, stream_rng};
use crate::states::{canonicalize, normalize, RawState, StateVector, UnitState, DEFAULT_PHASE_TOL};

/// A square matrix tagged with its admissibility class.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvolutionOperator {
    label: String,
    class: OperatorClass,
    matrix: ComplexMatrix,
}

impl EvolutionOperator {
    /// Classifies `matrix` at the default tolerance of `1e-10`. Singular
    /// operators can be built, but every engine refuses them.
    pub fn new(matrix: ComplexMatrix, label: impl Into<String>) -> Result<Self> {
        let class = classify_operator(&matrix, DEFAULT_CLASSIFY_TOL)?;
        Ok(Self {
            label: label.into(),
            class,
            matrix,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn class(&self) -> OperatorClass {
        self.class
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    fn require_invertible(&self) -> Result<()> {
        if self.class.is_singular() {
            return Err(Error::SingularOperator(self.label.clone()));
        }
        Ok(())
    }
}

/// `U |state>` for unitary `U`, in the input's representation.
///
/// Unit states are renormalized after the product; for an operator that
/// passed the unitarity test this only removes rounding drift.
pub fn evolve_unitary<S: StateVector>(state: &S, op: &EvolutionOperator) -> Result<S> {
    op.require_invertible()?;
    if op.class != OperatorClass::Unitary {
        return Err(Error::NonUnitaryOperator {
            label: op.label.clone(),
            class: op.class.to_string(),
        });
    }
    S::from_image(op.matrix.apply(state.vector())?)
}

/// `U |s>` without renormalization, for any invertible `U`.
pub fn evolve_linear_b(state: &RawState, op: &EvolutionOperator) -> Result<RawState> {
    op.require_invertible()?;
    RawState::new(op.matrix.apply(state.vector())?)
}

/// `U|u> / sqrt(<u|U^dagger U|u>)`.
pub fn evolve_manual_norm_a(u: &UnitState, op: &EvolutionOperator) -> Result<UnitState> {
    op.require_invertible()?;
    normalize(&RawState::new(op.matrix.apply(u.vector())?)?)
}

/// How far manual-norm evolution is from acting linearly on a superposition.
///
/// Compares the image of the normalized superposition `a psi1 + b psi2`
/// with the normalized superposition, using the same weights, of the images
/// of `psi1` and `psi2`:
///
/// `|| N(a psi1 + b psi2) - normalize(a N(psi1) + b N(psi2)) ||`
///
/// where `N` is [`evolve_manual_norm_a`]. If `U = c V` with `V` unitary both
/// terms equal `e^{i arg c} V (a psi1 + b psi2)/||a psi1 + b psi2||` and the
/// defect vanishes.
pub fn linearity_defect(
    op: &EvolutionOperator,
    psi1: &UnitState,
    psi2: &UnitState,
    a: Complex64,
    b: Complex64,
) -> Result<f64> {
    op.require_invertible()?;
    let superposition = RawState::new(psi1.vector().combine(a, psi2.vector(), b)?)?;
    let image_of_sum = evolve_manual_norm_a(&normalize(&superposition)?, op)?;
    let m1 = evolve_manual_norm_a(psi1, op)?;
    let m2 = evolve_manual_norm_a(psi2, op)?;
    let sum_of_images = normalize(&RawState::new(m1.vector().combine(a, m2.vector(), b)?)?)?;
    Ok(norm(&image_of_sum.vector().sub(sum_of_images.vector())?))
}

/// Verdict of the unitarity laboratory for one operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub label: String,
    pub operator_class: OperatorClass,
    pub n_samples: usize,
    pub seed: u64,
    /// `max |(||U psi|| - 1)|` over sampled unit vectors.
    pub max_unit_norm_deviation: f64,
    /// Unit vector maximizing `|(||U psi|| - 1)|`, present unless `U` is unitary.
    pub witness: Option<ComplexVector>,
    pub witness_deviation: Option<f64>,
    /// `max |polarization_reconstruct(U, a, b) - <Ua|Ub>|` over sampled pairs.
    pub polarization_residual: f64,
    /// `||U^dagger U - I||_F`.
    pub gram_residual: f64,
}

impl TheoremReport {
    pub fn admissible_under_a(&self) -> bool {
        self.operator_class == OperatorClass::Unitary
    }

    pub fn admissible_under_b(&self) -> bool {
        !self.operator_class.is_singular()
    }

    pub fn verdict(&self) -> &'static str {
        match self.operator_class {
            OperatorClass::Unitary => "admissible under A′ and B′",
            OperatorClass::ProportionalUnitary { .. } => {
                "proportional-unitary: physically standard under manual normalization"
            }
            OperatorClass::GeneralInvertible => "admissible under B′ only",
            OperatorClass::Singular => "inadmissible under A′ and B′ (singular)",
        }
    }
}

const LAB_CHUNK: usize = 64;

/// Numerical check of the unit-vector unitarity argument for one operator.
///
/// Samples `n_samples` Gaussian unit vectors in chunks of 64, chunk `k` drawn
/// from ChaCha8 stream `k` of `seed`, so the report does not depend on how
/// chunks are scheduled. Within each chunk, consecutive samples (cyclically)
/// form the pairs used for the polarization check. The witness is analytic:
/// the eigenvector of `U^dagger U` whose eigenvalue `l` maximizes
/// `|sqrt(l) - 1|`.
pub fn theorem1_lab(op: &EvolutionOperator, n_samples: usize, seed: u64) -> Result<TheoremReport> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be at least 1".into()));
    }
    let u = &op.matrix;
    let dim = op.dim();

    let chunks: Vec<(f64, f64)> = (0..n_samples.div_ceil(LAB_CHUNK))
        .into_par_iter()
        .map(|chunk| -> Result<(f64, f64)> {
            let mut rng = stream_rng(seed, chunk as u64);
            let len = LAB_CHUNK.min(n_samples - chunk * LAB_CHUNK);
            let samples: Vec<ComplexVector> = (0..len).map(|_| random_unit_vector(&mut rng, dim)).collect();
            let mut max_dev = 0.0f64;
            let mut max_pol = 0.0f64;
            for (k, alpha) in samples.iter().enumerate() {
                let beta = &samples[(k + 1) % len];
                let ua = u.apply(alpha)?;
                max_dev = max_dev.max((norm(&ua) - 1.0).abs());
                let direct = inner_product(&ua, &u.apply(beta)?)?;
                let rebuilt = polarization_reconstruct(u, alpha, beta)?;
                max_pol = max_pol.max((rebuilt - direct).norm());
            }
            Ok((max_dev, max_pol))
        })
        .collect::<Result<_>>()?;
    let max_unit_norm_deviation = chunks.iter().map(|c| c.0).fold(0.0, f64::max);
    let polarization_residual = chunks.iter().map(|c| c.1).fold(0.0, f64::max);

    let gram = u.adjoint().matmul(u)?;
    let gram_residual = gram.distance_to_scaled_identity(Complex64::new(1.0, 0.0))?;

    let (witness, witness_deviation) = if op.class == OperatorClass::Unitary {
        (None, None)
    } else {
        let tol = 1e-10 * gram.frobenius_norm().max(1.0);
        let eig = hermitian_eigendecomposition(&gram, tol)?;
        let distance = |l: f64| (l.max(0.0).sqrt() - 1.0).abs();
        let mut best = 0;
        for (i, &l) in eig.values.iter().enumerate() {
            if distance(l) > distance(eig.values[best]) {
                best = i;
            }
        }
        let w = canonicalize(&RawState::new(eig.vectors[best].clone())?, DEFAULT_PHASE_TOL)?.into_vector();
        let dev = (norm(&u.apply(&w)?) - 1.0).abs();
        (Some(w), Some(dev))
    };

    Ok(TheoremReport {
        label: op.label.clone(),
        operator_class: op.class,
        n_samples,
        seed,
        max_unit_norm_deviation,
        witness,
        witness_deviation,
        polarization_residual,
        gram_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_unitary, seeded_rng};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn hadamard() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[FRAC_1_SQRT_2, FRAC_1_SQRT_2], &[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]]).unwrap()
    }

    fn op(m: ComplexMatrix) -> EvolutionOperator {
        EvolutionOperator::new(m, "test").unwrap()
    }

    fn unit(entries: &[f64]) -> UnitState {
        normalize(&RawState::new(ComplexVector::from_real(entries).unwrap()).unwrap()).unwrap()
    }

    #[test]
    fn unitary_engine_examples() {
        let h = op(hadamard());
        let out = evolve_unitary(&unit(&[1.0, 0.0]), &h).unwrap();
        assert!(out.vector().max_abs_diff(unit(&[1.0, 1.0]).vector()).unwrap() < 1e-15);

        let s = RawState::new(ComplexVector::new(vec![c(0.2, 1.0), c(-3.0, 0.5)]).unwrap()).unwrap();
        assert_eq!(evolve_unitary(&s, &op(ComplexMatrix::identity(2).unwrap())).unwrap(), s);

        let gate = op(ComplexMatrix::diag_real(&[1.0, 0.5]).unwrap());
        assert!(matches!(
            evolve_unitary(&s, &gate),
            Err(Error::NonUnitaryOperator { .. })
        ));
        let singular = op(ComplexMatrix::diag_real(&[1.0, 0.0]).unwrap());
        assert!(matches!(evolve_unitary(&s, &singular), Err(Error::SingularOperator(_))));
    }

    #[test]
    fn linear_b_examples() {
        let gate = op(ComplexMatrix::diag_real(&[1.0, 0.1]).unwrap());
        let s = RawState::new(ComplexVector::from_real(&[1.0, 1.0]).unwrap()).unwrap();
        let out = evolve_linear_b(&s, &gate).unwrap();
        assert_eq!(out.vector(), &ComplexVector::from_real(&[1.0, 0.1]).unwrap());

        let singular = op(ComplexMatrix::diag_real(&[1.0, 0.0]).unwrap());
        assert!(matches!(
            evolve_linear_b(&s, &singular),
            Err(Error::SingularOperator(_))
        ));

        let h = op(hadamard());
        let a = evolve_linear_b(&s, &h).unwrap();
        let b = evolve_unitary(&s, &h).unwrap();
        assert!(crate::states::equivalent_b(&a, &b, 1e-12).unwrap());

        let wrong = op(ComplexMatrix::identity(3).unwrap());
        assert!(matches!(
            evolve_linear_b(&s, &wrong),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn manual_norm_examples() {
        let eps: f64 = 0.1;
        let gate = op(ComplexMatrix::diag_real(&[1.0, eps]).unwrap());
        let out = evolve_manual_norm_a(&unit(&[1.0, 1.0]), &gate).unwrap();
        let k = 1.0 / (1.0 + eps * eps).sqrt();
        let expected = ComplexVector::from_real(&[k, eps * k]).unwrap();
        assert!(out.vector().max_abs_diff(&expected).unwrap() < 1e-15);

        let mut rng = seeded_rng(4);
        let v = op(random_unitary(&mut rng, 3));
        let u = unit(&[0.3, -1.0, 0.4]);
        let a = evolve_manual_norm_a(&u, &v).unwrap();
        let b = evolve_unitary(&u, &v).unwrap();
        assert!(a.vector().max_abs_diff(b.vector()).unwrap() < 1e-12);

        // 3i H |0> = 3i (1,1)/sqrt2; renormalized: i (1,1)/sqrt2, the same ray as H|0>
        let scaled = op(hadamard().scale(c(0.0, 3.0)).unwrap());
        let out = evolve_manual_norm_a(&unit(&[1.0, 0.0]), &scaled).unwrap();
        assert!((norm(out.vector()) - 1.0).abs() < 1e-15);
        let expected = ComplexVector::new(vec![c(0.0, FRAC_1_SQRT_2), c(0.0, FRAC_1_SQRT_2)]).unwrap();
        assert!(out.vector().max_abs_diff(&expected).unwrap() < 1e-15);

        let singular = op(ComplexMatrix::diag_real(&[0.0, 1.0]).unwrap());
        assert!(matches!(
            evolve_manual_norm_a(&u, &op(ComplexMatrix::diag_real(&[1.0, 0.0, 1.0]).unwrap())),
            Err(Error::SingularOperator(_))
        ));
        assert!(evolve_manual_norm_a(&unit(&[1.0, 0.0]), &singular).is_err());
    }

    #[test]
    fn linearity_defect_examples() {
        let e0 = unit(&[1.0, 0.0]);
        let e1 = unit(&[0.0, 1.0]);
        let w = c(FRAC_1_SQRT_2, 0.0);

        let h = op(hadamard());
        assert!(linearity_defect(&h, &e0, &e1, w, w).unwrap() <= 1e-12);

        let cv = op(hadamard().scale(c(2.0, -1.0)).unwrap());
        assert!(linearity_defect(&cv, &e0, &e1, w, c(0.3, 0.8)).unwrap() <= 1e-12);

        // Oracle: image of (1,1)/sqrt2 is (1, 0.1)/sqrt(1.01); images of the basis
        // vectors are themselves, so the weighted sum renormalizes to (1,1)/sqrt2.
        let gate = op(ComplexMatrix::diag_real(&[1.0, 0.1]).unwrap());
        let k = 1.0 / 1.01f64.sqrt();
        let expected = ((k - FRAC_1_SQRT_2).powi(2) + (0.1 * k - FRAC_1_SQRT_2).powi(2)).sqrt();
        let got = linearity_defect(&gate, &e0, &e1, w, w).unwrap();
        assert!((got - expected).abs() < 1e-15);
        assert!(got > 0.5);

        assert!(matches!(
            linearity_defect(&gate, &e0, &e0, w, -w),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn theorem_lab_examples() {
        let mut rng = seeded_rng(8);
        let v = op(random_unitary(&mut rng, 4));
        let r = theorem1_lab(&v, 1000, 1).unwrap();
        assert!(r.max_unit_norm_deviation <= 1e-10);
        assert!(r.gram_residual <= 1e-10);
        assert!(r.witness.is_none());

        let d = op(ComplexMatrix::diag_real(&[1.0, 0.5]).unwrap());
        let r = theorem1_lab(&d, 100, 1).unwrap();
        assert_eq!(r.witness.as_ref().unwrap(), &ComplexVector::basis(2, 1).unwrap());
        assert!((r.witness_deviation.unwrap() - 0.5).abs() < 1e-15);
        assert!(r.max_unit_norm_deviation <= 0.5 + 1e-15);
        assert_eq!(r.verdict(), "admissible under B′ only");

        let n = 3;
        let dilation = op(ComplexMatrix::identity(n).unwrap().scale(c(2.0, 0.0)).unwrap());
        let r = theorem1_lab(&dilation, 100, 1).unwrap();
        assert!((r.gram_residual - 3.0 * (n as f64).sqrt()).abs() < 1e-14);
        assert!((r.witness_deviation.unwrap() - 1.0).abs() < 1e-15);
        assert!((r.max_unit_norm_deviation - 1.0).abs() < 1e-14);
        assert!(matches!(r.operator_class, OperatorClass::ProportionalUnitary { .. }));
    }

    #[test]
    fn theorem_lab_is_deterministic() {
        let d = op(ComplexMatrix::diag_real(&[1.3, 0.5, 0.9]).unwrap());
        let a = theorem1_lab(&d, 500, 77).unwrap();
        let b = theorem1_lab(&d, 500, 77).unwrap();
        assert_eq!(a, b);
        assert!(theorem1_lab(&d, 0, 0).is_err());
    }
}
