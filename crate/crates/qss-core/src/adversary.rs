//! Attack models against the protocol, plus the flawed predecessor scheme.
//!
//! Outside attacks: an intercept-resend Eve who measures transiting
//! sequences in guessed bases, and the entangle-and-measure constraint
//! system whose nullspace shows an ancilla-coupling Eve learns nothing.
//! Participant attacks: premature computational measurement of one GHZ
//! particle and a reconstructor who forges the announced result. The
//! man-in-the-middle analysis reduces to intercept-resend (Eve still does
//! not know the decoy positions), so it has no separate model here.
//!
//! [`song_baseline_run`] executes the predecessor reconstruction (Z-type
//! shifts, inverse QFT on the initiator's particle only), which recovers the
//! secret with probability 1/d instead of 1 — the loophole the proposed
//! scheme closes.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;
use thiserror::Error;

use crate::field::{FieldElement, FieldError, PrimeModulus};
use crate::protocol::{
    build_decoy_sequence, eavesdrop_check, insert_particle, run_with_intrusion,
    Intrusion, ProtocolConfig, ProtocolError, Slot,
};
use crate::qudit::{omega_pow, BasisKind, QuditState};
use crate::shamir::{compute_shadow, distribute_shares, sample_polynomial};
use crate::transcript::Transcript;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AdversaryError {
    #[error("nullspace analysis supports primes up to 13, got {0}")]
    DimensionTooLarge(u64),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}

/// Which adversary a batch of trials simulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AttackModel {
    None,
    InterceptResend,
    DishonestMeasure { target: usize },
    ForgedResult { forged: u64 },
    SongBaseline,
}

impl AttackModel {
    pub fn name(&self) -> &'static str {
        match self {
            AttackModel::None => "none",
            AttackModel::InterceptResend => "intercept-resend",
            AttackModel::DishonestMeasure { .. } => "dishonest-measure",
            AttackModel::ForgedResult { .. } => "forged-result",
            AttackModel::SongBaseline => "song-baseline",
        }
    }
}

/// Result record of one adversarial run.
///
/// `detected` refers to the mechanism relevant for the model: the decoy
/// check for intercept-resend, the hash verdict for participant attacks.
/// `secret_leaked` is true iff the attacker ends the run knowing the
/// dealer's secret. `recovered` is present only if the run reached
/// reconstruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AttackOutcome {
    pub detected: bool,
    pub aborted: bool,
    pub recovered: Option<u64>,
    pub secret_leaked: bool,
    pub per_decoy_errors: usize,
}

/// Eve measures every slot of the first transmitted sequence in a uniformly
/// random basis per slot and forwards the collapsed states. The run then
/// proceeds through the eavesdrop check; if every check passes it continues
/// to reconstruction.
pub fn intercept_resend_attack(
    config: &ProtocolConfig,
    subset: &[usize],
) -> Result<(Transcript, AttackOutcome), AdversaryError> {
    let report = run_with_intrusion(config, subset, Intrusion::InterceptResend)?;
    let outcome = AttackOutcome {
        detected: report.check_failed,
        aborted: report.result.aborted,
        recovered: report.result.a0_prime.map(FieldElement::value),
        secret_leaked: false,
        per_decoy_errors: report.decoy_errors,
    };
    Ok((report.transcript, outcome))
}

/// One decoy-sequence exchange with an intercept-resend Eve, without the
/// classical sharing layer.
///
/// The detection statistics of the attack live entirely in this phase, so
/// the exchange can be exercised even for parameter points (notably d = 2)
/// where no full protocol configuration exists: t = 2 participants already
/// need n >= 2 > d - 1 evaluation points.
pub fn intercept_resend_channel_trial(
    d: PrimeModulus,
    t: usize,
    m: usize,
    threshold: f64,
    rng: &mut impl Rng,
) -> Result<AttackOutcome, AdversaryError> {
    let dim = d.get() as usize;
    let mut ghz = QuditState::ghz(dim, t).map_err(ProtocolError::from)?;
    let (decoys, mut records) = build_decoy_sequence(d, m, rng)?;
    let mut packet = insert_particle(decoys, &mut records, rng)?;

    // Eve: random basis per slot, forward the post-measurement states.
    for slot in packet.slots.iter_mut() {
        let basis = if rng.random_range(0..2u8) == 0 {
            BasisKind::Computational
        } else {
            BasisKind::Fourier
        };
        match slot {
            Slot::Decoy(state) => {
                state.measure_in_basis(0, basis, rng).map_err(ProtocolError::from)?;
            }
            Slot::Particle => {
                ghz.measure_in_basis(1, basis, rng).map_err(ProtocolError::from)?;
            }
        }
    }

    // Receiver: correct-basis measurement of every decoy, then the check.
    let mut outcomes = Vec::with_capacity(m);
    for record in &records {
        let Slot::Decoy(state) = &mut packet.slots[record.position] else {
            unreachable!("records never reference the particle slot");
        };
        outcomes.push(
            state
                .measure_in_basis(0, record.label.kind, rng)
                .map_err(ProtocolError::from)?,
        );
    }
    let report = eavesdrop_check(&records, &outcomes, threshold)?;
    Ok(AttackOutcome {
        detected: !report.pass,
        aborted: !report.pass,
        recovered: None,
        secret_leaked: false,
        per_decoy_errors: report.errors,
    })
}

/// 1 - ((d+1)/(2d))^m: probability that at least one of m decoys flags an
/// intercept-resend Eve.
pub fn detection_probability_theoretical(d: u64, m: u32) -> f64 {
    let per_decoy_pass = (d as f64 + 1.0) / (2.0 * d as f64);
    1.0 - per_decoy_pass.powi(m as i32)
}

/// Subset member `target` measures its GHZ particle in the computational
/// basis before the transform step; the run then completes and the hash
/// verdict flags the (almost always) wrong sum.
pub fn dishonest_premature_measure(
    config: &ProtocolConfig,
    target: usize,
    subset: &[usize],
) -> Result<(Transcript, AttackOutcome), AdversaryError> {
    let report = run_with_intrusion(config, subset, Intrusion::DishonestMeasure { target })?;
    let outcome = AttackOutcome {
        detected: !report.result.hash_ok,
        aborted: report.result.aborted,
        recovered: report.result.a0_prime.map(FieldElement::value),
        secret_leaked: false,
        per_decoy_errors: report.decoy_errors,
    };
    Ok((report.transcript, outcome))
}

/// An honest run completes, then the reconstructor announces `forged`
/// instead of the computed sum. The hash commitment catches every
/// `forged != a0`; the attacker has read the true secret either way.
pub fn forged_result_attack(
    config: &ProtocolConfig,
    forged: u64,
    subset: &[usize],
) -> Result<(Transcript, AttackOutcome), AdversaryError> {
    let report = run_with_intrusion(config, subset, Intrusion::ForgedResult { forged })?;
    let outcome = AttackOutcome {
        detected: !report.result.hash_ok,
        aborted: report.result.aborted,
        recovered: report.result.a0_prime.map(FieldElement::value),
        secret_leaked: true,
        per_decoy_errors: report.decoy_errors,
    };
    Ok((report.transcript, outcome))
}

/// Pre-measurement state of the predecessor scheme: GHZ, Z-type shift
/// U_{0,s_r} on every wire, inverse QFT on wire 0 only.
pub fn song_baseline_state(
    d: usize,
    shadows: &[u64],
) -> Result<QuditState, ProtocolError> {
    let mut state = QuditState::ghz(d, shadows.len())?;
    for (wire, &s) in shadows.iter().enumerate() {
        state.apply_pauli(wire, 0, s)?;
    }
    state.apply_inverse_qft(0)?;
    Ok(state)
}

/// Executes the predecessor reconstruction and reports the initiator's
/// measured value as the recovered secret. The post-inverse-QFT state is
/// still entangled, so the value is uniform on Z_d and matches the dealer's
/// secret only with probability 1/d.
pub fn song_baseline_run(
    config: &ProtocolConfig,
    subset: &[usize],
) -> Result<AttackOutcome, AdversaryError> {
    let mut rng = ChaCha12Rng::seed_from_u64(config.master_seed);
    let d = config.d;
    let polynomial = sample_polynomial(d.element(config.secret), config.t, &mut rng)
        .map_err(ProtocolError::from)?;
    let points: Vec<FieldElement> = (1..=config.n).map(|i| config.point_of(i)).collect();
    let shares = distribute_shares(&polynomial, &points).map_err(ProtocolError::from)?;

    let subset_points: Vec<FieldElement> =
        subset.iter().map(|&p| config.point_of(p)).collect();
    let shadows: Vec<u64> = subset
        .iter()
        .map(|&p| {
            compute_shadow(&shares[p - 1], &subset_points)
                .map(|sh| sh.s.value())
                .map_err(ProtocolError::from)
        })
        .collect::<Result<_, _>>()?;

    let mut state = song_baseline_state(d.get() as usize, &shadows)?;
    let outcome = state
        .measure_computational(0, &mut rng)
        .map_err(ProtocolError::from)?;
    Ok(AttackOutcome {
        detected: false,
        aborted: false,
        recovered: Some(outcome.value),
        secret_leaked: false,
        per_decoy_errors: 0,
    })
}

/// Nullspace analysis of the Fourier-decoy constraint system an
/// entangle-and-measure Eve must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstraintReport {
    pub d: u64,
    pub nullspace_dimension: usize,
    /// True iff the nullspace is spanned by the all-ones direction, i.e.
    /// every diagonal ancilla component must be identical and Eve's
    /// measurement distinguishes nothing.
    pub is_uniform_solution: bool,
    /// Max-norm residual of the normalized all-ones vector under the
    /// constraint matrix.
    pub residual: f64,
}

/// Builds the homogeneous system with one row per ordered pair (j, p),
/// p != j, and entries omega^((j-p)*k) over the d unknowns, then measures
/// its nullspace numerically (SVD).
///
/// The unknowns stand for the diagonal terms a_kk |e_kk>; the constraint
/// acts identically on every ancilla component, so one scalar unknown per k
/// suffices.
pub fn entangle_measure_nullspace(d: u64) -> Result<ConstraintReport, AdversaryError> {
    let modulus = PrimeModulus::new(d)?;
    if d > 13 {
        return Err(AdversaryError::DimensionTooLarge(d));
    }
    let dim = modulus.get() as usize;
    let rows = dim * (dim - 1);
    let matrix = DMatrix::<Complex64>::from_fn(rows, dim, |row, col| {
        let j = row / (dim - 1);
        let off = row % (dim - 1);
        let p = if off >= j { off + 1 } else { off };
        let delta = (j + dim - p) % dim;
        omega_pow(dim, (delta * col) as u64)
    });

    // Residual of the normalized all-ones candidate under the raw matrix.
    let scale = 1.0 / (dim as f64).sqrt();
    let mut residual = 0.0f64;
    for row in 0..rows {
        let mut acc = Complex64::new(0.0, 0.0);
        for col in 0..dim {
            acc += matrix[(row, col)];
        }
        residual = residual.max((acc * scale).norm());
    }

    let singular = matrix.svd(false, false).singular_values;
    let sigma_max = singular.iter().cloned().fold(0.0f64, f64::max);
    let tol = 1e-10 * sigma_max.max(1.0);
    let nullspace_dimension = singular.iter().filter(|&&s| s <= tol).count();

    Ok(ConstraintReport {
        d,
        nullspace_dimension,
        is_uniform_solution: nullspace_dimension == 1 && residual < 1e-10,
        residual,
    })
}
