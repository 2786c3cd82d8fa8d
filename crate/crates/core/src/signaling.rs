//! Entanglement signaling with non-unitary local gates, and the unitary
//! no-communication control.
//!
//! Alice holds site 0 and Bob site 1 of the Bell pair `|00> + |11>`. To send
//! bit 0 Alice applies `diag(1, eps)` to her qubit, to send bit 1 she applies
//! `diag(eps, 1)`. Under raw-vector evolution the joint state becomes
//! `|00> + eps|11>` (resp. `eps|00> + |11>`), which shifts Bob's outcome
//! probabilities to `1/(1+eps^2)` in favour of the sent bit.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::composite::{bell_state, embed_local, partial_trace, DensityMatrix};
use crate::error::{Error, Result};
use crate::evolution::{evolve_linear_b, evolve_manual_norm_a, evolve_unitary, EvolutionOperator};
use crate::linalg::ComplexMatrix;
use crate::measurement::{
    born_probabilities_a, born_probabilities_b, make_observable, sample_measurement_stream, Observable,
    OutcomeDistribution, DEFAULT_DEGENERACY_TOL,
};
use crate::random::{random_unitary, stream_rng};
use crate::states::{normalize, RawState};

pub const SITE_A: usize = 0;
pub const SITE_B: usize = 1;

pub const DEFAULT_EPSILON: f64 = 0.1;
pub const DEFAULT_TRIALS: u64 = 100_000;

/// `eps^2 / (1 + eps^2)`, the probability that Bob reads the wrong bit.
pub fn analytic_error_formula(epsilon: f64) -> f64 {
    let e2 = epsilon * epsilon;
    e2 / (1.0 + e2)
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    Ok(())
}

/// Alice's single-qubit gate: `diag(1, eps)` for bit 0, `diag(eps, 1)` for bit 1.
pub fn alice_gate(bit: u8, epsilon: f64) -> Result<EvolutionOperator> {
    check_epsilon(epsilon)?;
    let diag = match bit {
        0 => [1.0, epsilon],
        1 => [epsilon, 1.0],
        other => return Err(Error::InvalidBit(other)),
    };
    EvolutionOperator::new(ComplexMatrix::diag_real(&diag)?, format!("alice-bit{bit}-eps{epsilon}"))
}

/// Bob's computational-basis observable `I ⊗ diag(0, 1)` on the pair.
pub fn bob_observable() -> Result<Observable> {
    make_observable(
        &embed_local(&ComplexMatrix::diag_real(&[0.0, 1.0])?, SITE_B, 2)?,
        DEFAULT_DEGENERACY_TOL,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignalingConfig {
    pub epsilon: f64,
    pub bit_to_send: u8,
    pub n_trials: u64,
    pub rng_seed: u64,
}

impl SignalingConfig {
    pub fn new(epsilon: f64, bit_to_send: u8, n_trials: u64, rng_seed: u64) -> Result<Self> {
        let cfg = Self {
            epsilon,
            bit_to_send,
            n_trials,
            rng_seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        check_epsilon(self.epsilon)?;
        if self.bit_to_send > 1 {
            return Err(Error::InvalidBit(self.bit_to_send));
        }
        if self.n_trials == 0 {
            return Err(Error::InvalidArgument("n_trials must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignalingReport {
    pub config: SignalingConfig,
    /// Bob's outcome distribution from the raw-vector Born rule on the joint state.
    pub analytic_bob_distribution: OutcomeDistribution,
    /// The same distribution computed through manual normalization on unit vectors.
    pub manual_norm_bob_distribution: OutcomeDistribution,
    pub empirical_counts: [u64; 2],
    pub empirical_error_rate: f64,
    pub analytic_error_rate: f64,
    /// `Tr_A |psi_f><psi_f|` without rescaling; `diag(1, eps^2)` for bit 0.
    pub reduced_density_unnormalized: DensityMatrix,
}

impl SignalingReport {
    pub fn to_tsv(&self) -> String {
        let d = &self.analytic_bob_distribution;
        let rho = self.reduced_density_unnormalized.matrix();
        let rows: Vec<(&str, String)> = vec![
            ("epsilon", self.config.epsilon.to_string()),
            ("bit", self.config.bit_to_send.to_string()),
            ("trials", self.config.n_trials.to_string()),
            ("seed", self.config.rng_seed.to_string()),
            ("analytic_p0", d.outcomes[0].probability.to_string()),
            ("analytic_p1", d.outcomes[1].probability.to_string()),
            (
                "manual_norm_p0",
                self.manual_norm_bob_distribution.outcomes[0].probability.to_string(),
            ),
            (
                "manual_norm_p1",
                self.manual_norm_bob_distribution.outcomes[1].probability.to_string(),
            ),
            ("count_0", self.empirical_counts[0].to_string()),
            ("count_1", self.empirical_counts[1].to_string()),
            ("analytic_error_rate", self.analytic_error_rate.to_string()),
            ("empirical_error_rate", self.empirical_error_rate.to_string()),
            ("rho_b_00", rho.get(0, 0).re.to_string()),
            ("rho_b_11", rho.get(1, 1).re.to_string()),
        ];
        let mut out = String::from("key\tvalue\n");
        for (k, v) in rows {
            out.push_str(&format!("{k}\t{v}\n"));
        }
        out
    }
}

/// Bob's distribution after Alice applies `gate` (2x2) to her half of the
/// raw Bell state through the general-linear engine.
pub fn bob_distribution_after_gate(gate: &ComplexMatrix) -> Result<OutcomeDistribution> {
    let op = EvolutionOperator::new(embed_local(gate, SITE_A, 2)?, "alice")?;
    let evolved = evolve_linear_b(bell_state().state(), &op)?;
    born_probabilities_b(&evolved, &bob_observable()?)
}

/// Runs the signaling protocol.
///
/// Trial `t` measures Bob's qubit with the uniform draw from ChaCha8 stream
/// `t` of `rng_seed`, so counts are identical however trials are scheduled
/// across threads.
pub fn run_protocol(cfg: &SignalingConfig) -> Result<SignalingReport> {
    cfg.validate()?;
    let gate = alice_gate(cfg.bit_to_send, cfg.epsilon)?;
    let joint = EvolutionOperator::new(embed_local(gate.matrix(), SITE_A, 2)?, gate.label())?;
    let bell = bell_state();
    let obs = bob_observable()?;

    let evolved = evolve_linear_b(bell.state(), &joint)?;
    let analytic = born_probabilities_b(&evolved, &obs)?;
    let manual = born_probabilities_a(&evolve_manual_norm_a(&normalize(bell.state())?, &joint)?, &obs)?;
    let reduced = partial_trace(&DensityMatrix::from_state_unnormalized(&evolved), SITE_B, 2)?;

    let counts = (0..cfg.n_trials)
        .into_par_iter()
        .map(|t| sample_measurement_stream(&evolved, &obs, cfg.rng_seed, t).map(|r| r.observed_eigenvalue))
        .try_fold(
            || [0u64; 2],
            |mut acc, outcome| {
                acc[usize::from(outcome? >= 0.5)] += 1;
                Ok::<_, Error>(acc)
            },
        )
        .try_reduce(|| [0u64; 2], |a, b| Ok([a[0] + b[0], a[1] + b[1]]))?;

    let wrong = 1 - cfg.bit_to_send as usize;
    Ok(SignalingReport {
        config: *cfg,
        analytic_error_rate: analytic.outcomes[wrong].probability,
        analytic_bob_distribution: analytic,
        manual_norm_bob_distribution: manual,
        empirical_counts: counts,
        empirical_error_rate: counts[wrong] as f64 / cfg.n_trials as f64,
        reduced_density_unnormalized: reduced,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoCommReport {
    pub n_unitaries: usize,
    pub seed: u64,
    /// Max over gates of `max_k |P_B(k) - 1/2|`.
    pub max_marginal_deviation: f64,
}

/// Applies `n_unitaries` Haar-random unitaries to Alice's half of the
/// normalized Bell state and records how far Bob's marginal moves from
/// uniform. Gate `i` is drawn from stream `i` of `seed`.
pub fn no_communication_check(n_unitaries: usize, seed: u64) -> Result<NoCommReport> {
    if n_unitaries == 0 {
        return Err(Error::InvalidArgument("n_unitaries must be at least 1".into()));
    }
    let bell = normalize(bell_state().state())?;
    let obs = bob_observable()?;
    let mut max_dev = 0.0f64;
    for i in 0..n_unitaries {
        let v = random_unitary(&mut stream_rng(seed, i as u64), 2);
        let op = EvolutionOperator::new(embed_local(&v, SITE_A, 2)?, format!("haar-{i}"))?;
        let evolved = evolve_unitary(&bell, &op)?;
        let dist = born_probabilities_a(&evolved, &obs)?;
        for p in dist.probabilities() {
            max_dev = max_dev.max((p - 0.5).abs());
        }
    }
    Ok(NoCommReport {
        n_unitaries,
        seed,
        max_marginal_deviation: max_dev,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub analytic_error: f64,
    /// Mean of the two per-bit empirical error rates.
    pub empirical_error: f64,
    pub analytic_error_bit0: f64,
    pub empirical_error_bit0: f64,
    pub analytic_error_bit1: f64,
    pub empirical_error_bit1: f64,
}

/// One protocol run per epsilon and bit. Row `i`, bit `b` uses seed
/// `seed + 2i + b` (wrapping).
pub fn error_rate_sweep(epsilons: &[f64], n_trials: u64, seed: u64) -> Result<Vec<SweepRow>> {
    for &e in epsilons {
        check_epsilon(e)?;
    }
    epsilons
        .iter()
        .enumerate()
        .map(|(i, &epsilon)| {
            let run = |bit: u8| {
                let s = seed.wrapping_add(2 * i as u64 + bit as u64);
                run_protocol(&SignalingConfig::new(epsilon, bit, n_trials, s)?)
            };
            let r0 = run(0)?;
            let r1 = run(1)?;
            Ok(SweepRow {
                epsilon,
                analytic_error: 0.5 * (r0.analytic_error_rate + r1.analytic_error_rate),
                empirical_error: 0.5 * (r0.empirical_error_rate + r1.empirical_error_rate),
                analytic_error_bit0: r0.analytic_error_rate,
                empirical_error_bit0: r0.empirical_error_rate,
                analytic_error_bit1: r1.analytic_error_rate,
                empirical_error_bit1: r1.empirical_error_rate,
            })
        })
        .collect()
}

pub fn sweep_to_tsv(rows: &[SweepRow]) -> String {
    let mut out = String::from(
        "epsilon\tanalytic_error\tempirical_error\tanalytic_bit0\tempirical_bit0\tanalytic_bit1\tempirical_bit1\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            r.epsilon,
            r.analytic_error,
            r.empirical_error,
            r.analytic_error_bit0,
            r.empirical_error_bit0,
            r.analytic_error_bit1,
            r.empirical_error_bit1
        ));
    }
    out
}

/// Bob's marginal from the joint raw state, computed by brute force: the
/// full 4-dimensional Born rule with the embedded observable.
pub fn joint_bob_distribution(joint: &RawState) -> Result<OutcomeDistribution> {
    born_probabilities_b(joint, &bob_observable()?)
}
