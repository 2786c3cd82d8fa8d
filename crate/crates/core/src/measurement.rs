//! Observables, the two Born rules, collapse and seeded sampling.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{check_dims, dot_conj, hermitian_eigendecomposition, ComplexMatrix, ComplexVector, ZERO};
use crate::random::stream_rng;
use crate::states::{checked_norm_sqr, RawState, Representation, StateVector, UnitState};

pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-9;
pub const HERMITIAN_TOL: f64 = 1e-10;
pub const COLLAPSE_TOL: f64 = 1e-14;
pub const PROBABILITY_SUM_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct Eigenspace {
    pub eigenvalue: f64,
    pub projector: ComplexMatrix,
    /// Orthonormal basis of the eigenspace.
    pub basis: Vec<ComplexVector>,
}

impl Eigenspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `sum_k |<b_k|v>|^2`, i.e. `<v|P|v>` computed through the basis.
    fn weight(&self, v: &ComplexVector) -> f64 {
        self.basis
            .iter()
            .map(|b| dot_conj(b.entries(), v.entries()).norm_sqr())
            .sum()
    }
}

/// A Hermitian operator with its spectrum grouped into eigenspaces.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "ObservableRepr", into = "ObservableRepr")]
pub struct Observable {
    matrix: ComplexMatrix,
    eigenspaces: Vec<Eigenspace>,
    degeneracy_tol: f64,
}

fn default_degeneracy_tol() -> f64 {
    DEFAULT_DEGENERACY_TOL
}

#[derive(Serialize, Deserialize)]
struct ObservableRepr {
    #[serde(flatten)]
    matrix: ComplexMatrix,
    #[serde(default = "default_degeneracy_tol")]
    degeneracy_tol: f64,
}

impl TryFrom<ObservableRepr> for Observable {
    type Error = Error;
    fn try_from(r: ObservableRepr) -> Result<Self> {
        make_observable(&r.matrix, r.degeneracy_tol)
    }
}

impl From<Observable> for ObservableRepr {
    fn from(o: Observable) -> Self {
        ObservableRepr {
            matrix: o.matrix,
            degeneracy_tol: o.degeneracy_tol,
        }
    }
}

impl Observable {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn eigenspaces(&self) -> &[Eigenspace] {
        &self.eigenspaces
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigenspaces.iter().map(|e| e.eigenvalue).collect()
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn degeneracy_tol(&self) -> f64 {
        self.degeneracy_tol
    }

    /// Index of the eigenspace whose eigenvalue matches `eigenvalue` within
    /// the degeneracy tolerance.
    pub fn eigenspace_index(&self, eigenvalue: f64) -> Result<usize> {
        self.eigenspaces
            .iter()
            .position(|e| (e.eigenvalue - eigenvalue).abs() <= self.degeneracy_tol * e.eigenvalue.abs().max(1.0))
            .ok_or(Error::UnknownEigenvalue(eigenvalue))
    }
}

/// Builds an observable from a Hermitian matrix.
///
/// Ascending eigenvalues are merged into one eigenspace while consecutive
/// values satisfy `|l_i - l_j| <= degeneracy_tol * max(1, |l_i|)`; the
/// eigenspace's eigenvalue is the mean of its members.
pub fn make_observable(h: &ComplexMatrix, degeneracy_tol: f64) -> Result<Observable> {
    if !(degeneracy_tol >= 0.0 && degeneracy_tol.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "degeneracy tolerance must be finite and non-negative, got {degeneracy_tol}"
        )));
    }
    let eig = hermitian_eigendecomposition(h, HERMITIAN_TOL)?;
    let n = h.rows();

    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, &lambda) in eig.values.iter().enumerate() {
        match groups.last_mut() {
            Some(g)
                if {
                    let prev = eig.values[*g.last().unwrap()];
                    (lambda - prev).abs() <= degeneracy_tol * prev.abs().max(1.0)
                } =>
            {
                g.push(i)
            }
            _ => groups.push(vec![i]),
        }
    }

    let eigenspaces = groups
        .into_iter()
        .map(|g| {
            let eigenvalue = g.iter().map(|&i| eig.values[i]).sum::<f64>() / g.len() as f64;
            let basis: Vec<ComplexVector> = g.iter().map(|&i| eig.vectors[i].clone()).collect();
            let mut data = vec![ZERO; n * n];
            for b in &basis {
                let e = b.entries();
                for r in 0..n {
                    for c in 0..n {
                        data[r * n + c] += e[r] * e[c].conj();
                    }
                }
            }
            Ok(Eigenspace {
                eigenvalue,
                projector: ComplexMatrix::new(n, n, data)?,
                basis,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(Observable {
        matrix: h.clone(),
        eigenspaces,
        degeneracy_tol,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub eigenvalue: f64,
    pub probability: f64,
}

/// Outcome probabilities in ascending eigenvalue order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    pub outcomes: Vec<Outcome>,
}

impl OutcomeDistribution {
    /// Validates that every probability lies in `[0, 1]` and that they sum to
    /// one within `1e-10`. Rounding overshoot past 1 is clipped.
    pub fn new(outcomes: Vec<Outcome>) -> Result<Self> {
        let total: f64 = outcomes.iter().map(|o| o.probability).sum();
        if (total - 1.0).abs() > PROBABILITY_SUM_TOL {
            return Err(Error::NumericContract(format!("probabilities sum to {total}")));
        }
        let mut outcomes = outcomes;
        for o in &mut outcomes {
            if !(o.probability >= 0.0 && o.probability <= 1.0 + PROBABILITY_SUM_TOL) {
                return Err(Error::NumericContract(format!(
                    "probability {} for eigenvalue {} is outside [0, 1]",
                    o.probability, o.eigenvalue
                )));
            }
            o.probability = o.probability.min(1.0);
        }
        Ok(Self { outcomes })
    }

    pub fn probability_of(&self, eigenvalue: f64) -> Option<f64> {
        self.outcomes
            .iter()
            .find(|o| o.eigenvalue == eigenvalue)
            .map(|o| o.probability)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.outcomes.iter().map(|o| o.probability).collect()
    }

    /// Largest per-outcome probability difference.
    pub fn max_deviation(&self, other: &Self) -> Result<f64> {
        check_dims(self.outcomes.len(), other.outcomes.len())?;
        Ok(self
            .outcomes
            .iter()
            .zip(&other.outcomes)
            .map(|(a, b)| (a.probability - b.probability).abs())
            .fold(0.0, f64::max))
    }

    /// Inverse-CDF lookup of a uniform draw `u` in `[0, 1)`; never returns a
    /// zero-probability outcome.
    pub fn index_for(&self, u: f64) -> usize {
        let mut cumulative = 0.0;
        for (i, o) in self.outcomes.iter().enumerate() {
            cumulative += o.probability;
            if u < cumulative {
                return i;
            }
        }
        self.outcomes
            .iter()
            .rposition(|o| o.probability > 0.0)
            .unwrap_or(self.outcomes.len() - 1)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("eigenvalue\tprobability\n");
        for o in &self.outcomes {
            out.push_str(&format!("{}\t{}\n", o.eigenvalue, o.probability));
        }
        out
    }
}

fn distribution(obs: &Observable, v: &ComplexVector, norm_sqr: f64) -> Result<OutcomeDistribution> {
    check_dims(obs.dim(), v.dim())?;
    OutcomeDistribution::new(
        obs.eigenspaces
            .iter()
            .map(|e| Outcome {
                eigenvalue: e.eigenvalue,
                probability: e.weight(v) / norm_sqr,
            })
            .collect(),
    )
}

/// Born rule on unit vectors: `P(l) = <u|P_l|u>`.
pub fn born_probabilities_a(u: &UnitState, obs: &Observable) -> Result<OutcomeDistribution> {
    distribution(obs, u.vector(), 1.0)
}

/// Born rule on nonzero vectors: `P(l) = <s|P_l|s> / <s|s>`.
pub fn born_probabilities_b(s: &RawState, obs: &Observable) -> Result<OutcomeDistribution> {
    distribution(obs, s.vector(), checked_norm_sqr(s.vector())?)
}

/// Dispatches to the Born rule matching the state's representation.
pub fn born_probabilities<S: StateVector>(state: &S, obs: &Observable) -> Result<OutcomeDistribution> {
    let v = state.vector();
    match S::REPRESENTATION {
        Representation::Unit => distribution(obs, v, 1.0),
        _ => distribution(obs, v, checked_norm_sqr(v)?),
    }
}

/// Post-measurement state `P_l |state>`: renormalized for unit states, left
/// as the raw projection for raw states.
pub fn collapse<S: StateVector>(state: &S, obs: &Observable, eigenvalue: f64) -> Result<S> {
    let idx = obs.eigenspace_index(eigenvalue)?;
    let dist = born_probabilities(state, obs)?;
    collapse_at(state, obs, idx, dist.outcomes[idx].probability)
}

fn collapse_at<S: StateVector>(state: &S, obs: &Observable, idx: usize, probability: f64) -> Result<S> {
    let space = &obs.eigenspaces[idx];
    if probability <= COLLAPSE_TOL {
        return Err(Error::ZeroProbability {
            eigenvalue: space.eigenvalue,
            probability,
        });
    }
    S::from_image(space.projector.apply(state.vector())?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord<S> {
    pub observed_eigenvalue: f64,
    pub post_state: S,
    pub rng_seed_used: u64,
    pub stream: u64,
}

/// One projective measurement drawn from stream 0 of `rng_seed`.
pub fn sample_measurement<S: StateVector>(state: &S, obs: &Observable, rng_seed: u64) -> Result<MeasurementRecord<S>> {
    sample_measurement_stream(state, obs, rng_seed, 0)
}

/// One projective measurement.
///
/// A single uniform draw from ChaCha8 `(rng_seed, stream)` selects the
/// outcome by inverse CDF over ascending eigenvalues; the state is then
/// collapsed onto that eigenspace.
pub fn sample_measurement_stream<S: StateVector>(
    state: &S,
    obs: &Observable,
    rng_seed: u64,
    stream: u64,
) -> Result<MeasurementRecord<S>> {
    let dist = born_probabilities(state, obs)?;
    let u: f64 = stream_rng(rng_seed, stream).random();
    let idx = dist.index_for(u);
    let post_state = collapse_at(state, obs, idx, dist.outcomes[idx].probability)?;
    Ok(MeasurementRecord {
        observed_eigenvalue: obs.eigenspaces[idx].eigenvalue,
        post_state,
        rng_seed_used: rng_seed,
        stream,
    })
}

/// Diagonal observable `diag(values)` in the computational basis.
pub fn computational_observable(values: &[f64]) -> Result<Observable> {
    make_observable(&ComplexMatrix::diag_real(values)?, DEFAULT_DEGENERACY_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::normalize;
    use num_complex::Complex64;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pauli_z() -> Observable {
        computational_observable(&[1.0, -1.0]).unwrap()
    }

    fn plus() -> UnitState {
        UnitState::new(ComplexVector::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap()).unwrap()
    }

    #[test]
    fn observable_grouping() {
        let z = pauli_z();
        assert_eq!(z.eigenvalues(), vec![-1.0, 1.0]);
        assert_eq!(
            z.eigenspaces()[0].projector,
            ComplexMatrix::diag_real(&[0.0, 1.0]).unwrap()
        );
        assert_eq!(
            z.eigenspaces()[1].projector,
            ComplexMatrix::diag_real(&[1.0, 0.0]).unwrap()
        );

        let id = computational_observable(&[1.0, 1.0]).unwrap();
        assert_eq!(id.eigenspaces().len(), 1);
        assert_eq!(id.eigenspaces()[0].dim(), 2);
        assert_eq!(id.eigenspaces()[0].projector, ComplexMatrix::identity(2).unwrap());

        // 1e-14 <= 1e-9 * max(1, 1) groups the first two; 2 >= 1e-9 * 1 separates the third
        let near = computational_observable(&[1.0, 1.0 + 1e-14, 3.0]).unwrap();
        assert_eq!(near.eigenspaces().len(), 2);
        assert_eq!(near.eigenspaces()[0].dim(), 2);
        assert!((near.eigenspaces()[0].eigenvalue - 1.0).abs() < 1e-13);
        assert_eq!(near.eigenspaces()[1].eigenvalue, 3.0);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.0, 1.0)], vec![c(0.0, 1.0), c(1.0, 0.0)]]).unwrap();
        assert!(matches!(
            make_observable(&m, DEFAULT_DEGENERACY_TOL),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn born_a_examples() {
        let d = born_probabilities_a(&plus(), &pauli_z()).unwrap();
        for p in d.probabilities() {
            assert!((p - 0.5).abs() < 1e-15);
        }
        let e0 = UnitState::new(ComplexVector::basis(2, 0).unwrap()).unwrap();
        let d = born_probabilities_a(&e0, &pauli_z()).unwrap();
        assert_eq!(d.probability_of(1.0), Some(1.0));
        assert_eq!(d.probability_of(-1.0), Some(0.0));
    }

    #[test]
    fn born_b_examples() {
        let obs = computational_observable(&[0.0, 1.0]).unwrap();
        let s = RawState::new(ComplexVector::new(vec![c(3.0, 0.0), c(0.0, 4.0)]).unwrap()).unwrap();
        let d = born_probabilities_b(&s, &obs).unwrap();
        assert!((d.probability_of(0.0).unwrap() - 9.0 / 25.0).abs() < 1e-15);
        assert!((d.probability_of(1.0).unwrap() - 16.0 / 25.0).abs() < 1e-15);

        let eps: f64 = 0.1;
        let s = RawState::new(ComplexVector::from_real(&[1.0, eps]).unwrap()).unwrap();
        let d = born_probabilities_b(&s, &obs).unwrap();
        assert!((d.probability_of(0.0).unwrap() - 1.0 / (1.0 + eps * eps)).abs() < 1e-15);
        assert!((d.probability_of(1.0).unwrap() - eps * eps / (1.0 + eps * eps)).abs() < 1e-15);

        let scaled = s.scale(c(0.0, 5.0)).unwrap();
        let d2 = born_probabilities_b(&scaled, &obs).unwrap();
        assert!(d.max_deviation(&d2).unwrap() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let e0 = UnitState::new(ComplexVector::basis(3, 0).unwrap()).unwrap();
        assert!(matches!(
            born_probabilities_a(&e0, &pauli_z()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn collapse_examples() {
        let post = collapse(&plus(), &pauli_z(), 1.0).unwrap();
        assert!(
            post.vector()
                .max_abs_diff(&ComplexVector::basis(2, 0).unwrap())
                .unwrap()
                < 1e-15
        );

        let obs = computational_observable(&[0.0, 1.0]).unwrap();
        let s = RawState::new(ComplexVector::new(vec![c(3.0, 0.0), c(0.0, 4.0)]).unwrap()).unwrap();
        let post = collapse(&s, &obs, 1.0).unwrap();
        assert_eq!(post.vector().entries(), &[c(0.0, 0.0), c(0.0, 4.0)]);

        let e0 = UnitState::new(ComplexVector::basis(2, 0).unwrap()).unwrap();
        assert_eq!(collapse(&e0, &pauli_z(), 1.0).unwrap(), e0);
        assert!(matches!(
            collapse(&e0, &pauli_z(), -1.0),
            Err(Error::ZeroProbability { .. })
        ));
        assert!(matches!(
            collapse(&e0, &pauli_z(), 0.5),
            Err(Error::UnknownEigenvalue(_))
        ));
    }

    #[test]
    fn sampling_is_deterministic_and_certain_on_eigenstates() {
        let e1 = UnitState::new(ComplexVector::basis(2, 1).unwrap()).unwrap();
        for seed in 0..50 {
            let r = sample_measurement(&e1, &pauli_z(), seed).unwrap();
            assert_eq!(r.observed_eigenvalue, -1.0);
        }
        let a = sample_measurement(&plus(), &pauli_z(), 42).unwrap();
        let b = sample_measurement(&plus(), &pauli_z(), 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn repeated_measurement_is_stable() {
        let s = RawState::new(ComplexVector::new(vec![c(0.3, 0.1), c(-0.2, 0.9), c(0.5, 0.0)]).unwrap()).unwrap();
        let obs = computational_observable(&[2.0, -1.0, 2.0]).unwrap();
        for seed in 0..20 {
            let r = sample_measurement(&s, &obs, seed).unwrap();
            let d = born_probabilities_b(&r.post_state, &obs).unwrap();
            assert!((d.probability_of(r.observed_eigenvalue).unwrap() - 1.0).abs() < 1e-10);
            let u = normalize(&s).unwrap();
            let r = sample_measurement(&u, &obs, seed).unwrap();
            let d = born_probabilities_a(&r.post_state, &obs).unwrap();
            assert!((d.probability_of(r.observed_eigenvalue).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn distribution_contract() {
        assert!(matches!(
            OutcomeDistribution::new(vec![Outcome {
                eigenvalue: 0.0,
                probability: 0.7
            }]),
            Err(Error::NumericContract(_))
        ));
        let d = OutcomeDistribution::new(vec![
            Outcome {
                eigenvalue: 0.0,
                probability: 0.0,
            },
            Outcome {
                eigenvalue: 1.0,
                probability: 1.0,
            },
        ])
        .unwrap();
        assert_eq!(d.index_for(0.0), 1);
        assert_eq!(d.index_for(0.999_999), 1);
        let json = serde_json::to_string(&d).unwrap();
        assert_eq!(
            json,
            r#"{"outcomes":[{"eigenvalue":0.0,"probability":0.0},{"eigenvalue":1.0,"probability":1.0}]}"#
        );
    }

    #[test]
    fn observable_json() {
        let obs: Observable =
            serde_json::from_str(r#"{"rows":2,"cols":2,"entries":[[1,0],[0,0],[0,0],[-1,0]],"degeneracy_tol":1e-9}"#)
                .unwrap();
        assert_eq!(obs.eigenvalues(), vec![-1.0, 1.0]);
        let text = serde_json::to_string(&obs).unwrap();
        assert!(text.contains("\"degeneracy_tol\""));
        let bad = r#"{"rows":2,"cols":2,"entries":[[0,0],[1,0],[0,0],[0,0]]}"#;
        assert!(serde_json::from_str::<Observable>(bad).is_err());
    }
}
