//! The proposed (t,n) threshold d-level secret sharing protocol, end to end.
//!
//! A run has three phases. The dealer selects a prime, samples the sharing
//! polynomial and issues shares (initialization + distribution). For
//! reconstruction, the initiating participant prepares a t-qudit GHZ state
//! and ships each other reconstructor their particle hidden at a random slot
//! inside a sequence of decoy qudits; a two-sided declaration of decoy
//! outcomes bounds the channel error rate before anyone proceeds. Each
//! reconstructor then applies QFT followed by the shift U_{s_i,0} for their
//! shadow s_i, measures, and announces the result; the announced values sum
//! to the secret, which a dealer-issued hash commitment verifies.
//!
//! The QFT-then-shift order matters: shifting first turns the shadows into
//! unobservable phases and the announced sum collapses to zero. See the
//! regression test `shift_before_qft_loses_the_secret`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::field::{FieldElement, FieldError, PrimeModulus};
use crate::qudit::{BasisKind, BasisLabel, MeasurementOutcome, QuditState, SimError};
use crate::shamir::{
    compute_shadow, distribute_shares, sample_polynomial, Shadow, ShamirError,
};
use crate::transcript::{Channel, EventBody, Transcript};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error("threshold must satisfy 2 <= t <= n, got t={t}, n={n}")]
    InvalidThreshold { t: usize, n: usize },
    #[error("at most d-1 = {max} participants fit in Z_{d}, got {n}")]
    TooManyParticipants { n: usize, max: usize, d: u64 },
    #[error("secret {secret} is not in Z_{d}")]
    SecretOutOfRange { secret: u64, d: u64 },
    #[error("at least one decoy per sequence is required")]
    InvalidDecoyCount,
    #[error("error threshold must lie in [0, 1], got {0}")]
    InvalidErrorThreshold(f64),
    #[error("reconstruction subset must have exactly t={expected} members, got {got}")]
    SubsetSize { expected: usize, got: usize },
    #[error("subset member {index} out of range 1..={n}")]
    SubsetOutOfRange { index: usize, n: usize },
    #[error("reconstruction subset contains duplicates")]
    SubsetDuplicate,
    #[error("custom evaluation points invalid: {0}")]
    InvalidPoints(String),
    #[error("decoy check needs one outcome per record: {records} records, {outcomes} outcomes")]
    CheckCardinality { records: usize, outcomes: usize },
    #[error("decoy at position {position} was measured in the wrong basis")]
    CheckBasisMismatch { position: usize },
    #[error("digest must be 32 bytes, got {len}")]
    MalformedDigest { len: usize },
    #[error("cannot reconstruct from zero measurements")]
    NoMeasurements,
    #[error("shadow modulus {field_d} does not match state dimension {state_d}")]
    DimensionMismatch { state_d: usize, field_d: u64 },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Shamir(#[from] ShamirError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Static parameters of one protocol instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolConfig {
    pub n: usize,
    pub t: usize,
    pub d: PrimeModulus,
    pub m: usize,
    pub secret: u64,
    pub error_threshold: f64,
    pub master_seed: u64,
    /// Public evaluation points; `None` means x_i = i for i = 1..n.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xs: Option<Vec<u64>>,
}

impl ProtocolConfig {
    /// Validates all invariants. `d = None` auto-selects the smallest prime
    /// in (n, 2n].
    pub fn new(
        n: usize,
        t: usize,
        d: Option<u64>,
        m: usize,
        secret: u64,
        error_threshold: f64,
        master_seed: u64,
    ) -> Result<Self, ProtocolError> {
        if t < 2 || t > n {
            return Err(ProtocolError::InvalidThreshold { t, n });
        }
        let d = match d {
            Some(v) => PrimeModulus::new(v)?,
            None => crate::field::select_prime(n as u64)?,
        };
        let max = (d.get() - 1) as usize;
        if n > max {
            return Err(ProtocolError::TooManyParticipants { n, max, d: d.get() });
        }
        if m == 0 {
            return Err(ProtocolError::InvalidDecoyCount);
        }
        if secret >= d.get() {
            return Err(ProtocolError::SecretOutOfRange { secret, d: d.get() });
        }
        if !(0.0..=1.0).contains(&error_threshold) {
            return Err(ProtocolError::InvalidErrorThreshold(error_threshold));
        }
        Ok(ProtocolConfig {
            n,
            t,
            d,
            m,
            secret,
            error_threshold,
            master_seed,
            xs: None,
        })
    }

    /// Overrides the default evaluation points x_i = i.
    pub fn with_points(mut self, xs: Vec<u64>) -> Result<Self, ProtocolError> {
        if xs.len() != self.n {
            return Err(ProtocolError::InvalidPoints(format!(
                "need {} points, got {}",
                self.n,
                xs.len()
            )));
        }
        let d = self.d.get();
        if xs.iter().any(|&x| x == 0 || x >= d) {
            return Err(ProtocolError::InvalidPoints(
                "points must be nonzero elements of Z_d".into(),
            ));
        }
        for (i, a) in xs.iter().enumerate() {
            if xs[i + 1..].contains(a) {
                return Err(ProtocolError::InvalidPoints("points must be distinct".into()));
            }
        }
        self.xs = Some(xs);
        Ok(self)
    }

    /// Public point of participant i (1-based).
    pub fn point_of(&self, participant: usize) -> FieldElement {
        let raw = match &self.xs {
            Some(v) => v[participant - 1],
            None => participant as u64,
        };
        self.d.element(raw)
    }

    /// Checks that `subset` names exactly t distinct participants in 1..=n.
    pub fn validate_subset(&self, subset: &[usize]) -> Result<(), ProtocolError> {
        if subset.len() != self.t {
            return Err(ProtocolError::SubsetSize { expected: self.t, got: subset.len() });
        }
        for (i, &p) in subset.iter().enumerate() {
            if p == 0 || p > self.n {
                return Err(ProtocolError::SubsetOutOfRange { index: p, n: self.n });
            }
            if subset[i + 1..].contains(&p) {
                return Err(ProtocolError::SubsetDuplicate);
            }
        }
        Ok(())
    }
}

/// Ground truth for one decoy: where it sits and what was prepared.
/// Hidden from channel observers until the check phase.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecoyRecord {
    pub sequence_id: usize,
    pub position: usize,
    pub label: BasisLabel,
}

/// One slot of a transmitted sequence: either a standalone decoy qudit or
/// the marker for the particle that stays entangled with the GHZ state.
#[derive(Debug, Clone)]
pub enum Slot {
    Decoy(QuditState),
    Particle,
}

/// The sequence S_i' actually sent: m decoys plus one entangled particle.
#[derive(Debug, Clone)]
pub struct SequencePacket {
    pub sequence_id: usize,
    pub slots: Vec<Slot>,
}

impl SequencePacket {
    pub fn particle_position(&self) -> usize {
        self.slots
            .iter()
            .position(|s| matches!(s, Slot::Particle))
            .expect("packet holds exactly one particle")
    }
}

/// Prepares m decoy qudits with uniformly random basis kind and index.
/// Returned records keep the ground truth; positions are provisional until
/// [`insert_particle`] re-indexes them.
pub fn build_decoy_sequence(
    d: PrimeModulus,
    m: usize,
    rng: &mut impl Rng,
) -> Result<(Vec<QuditState>, Vec<DecoyRecord>), ProtocolError> {
    if m == 0 {
        return Err(ProtocolError::InvalidDecoyCount);
    }
    let dim = d.get() as usize;
    let mut states = Vec::with_capacity(m);
    let mut records = Vec::with_capacity(m);
    for position in 0..m {
        let kind = if rng.random_range(0..2u8) == 0 {
            BasisKind::Computational
        } else {
            BasisKind::Fourier
        };
        let label = BasisLabel { kind, index: rng.random_range(0..d.get()) };
        states.push(QuditState::prepare_basis_state(dim, label)?);
        records.push(DecoyRecord { sequence_id: 0, position, label });
    }
    Ok((states, records))
}

/// Places the protocol particle at a uniform random slot among the m+1 and
/// re-indexes the decoy positions in `records` accordingly.
pub fn insert_particle(
    decoys: Vec<QuditState>,
    records: &mut [DecoyRecord],
    rng: &mut impl Rng,
) -> Result<SequencePacket, ProtocolError> {
    if decoys.is_empty() {
        return Err(ProtocolError::InvalidDecoyCount);
    }
    let m = decoys.len();
    let particle_at = rng.random_range(0..=m);
    let mut slots = Vec::with_capacity(m + 1);
    for (i, decoy) in decoys.into_iter().enumerate() {
        if i == particle_at {
            slots.push(Slot::Particle);
        }
        slots.push(Slot::Decoy(decoy));
        records[i].position = if i < particle_at { i } else { i + 1 };
    }
    if particle_at == m {
        slots.push(Slot::Particle);
    }
    Ok(SequencePacket { sequence_id: 0, slots })
}

/// Outcome of the two-sided decoy comparison for one sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckReport {
    pub errors: usize,
    pub error_rate: f64,
    pub pass: bool,
}

/// Compares each measured decoy against its prepared state.
///
/// One outcome per record, measured in the declared correct basis; the
/// error rate is the fraction of values that disagree with the prepared
/// index, and the check passes iff it does not exceed `threshold`. (The
/// receiver/sender half-split governs who announces what; both halves feed
/// the same rate.)
pub fn eavesdrop_check(
    records: &[DecoyRecord],
    measured: &[MeasurementOutcome],
    threshold: f64,
) -> Result<CheckReport, ProtocolError> {
    if records.len() != measured.len() {
        return Err(ProtocolError::CheckCardinality {
            records: records.len(),
            outcomes: measured.len(),
        });
    }
    let mut errors = 0usize;
    for (record, outcome) in records.iter().zip(measured) {
        if outcome.basis != record.label.kind {
            return Err(ProtocolError::CheckBasisMismatch { position: record.position });
        }
        if outcome.value != record.label.index {
            errors += 1;
        }
    }
    let error_rate = errors as f64 / records.len() as f64;
    Ok(CheckReport { errors, error_rate, pass: error_rate <= threshold })
}

/// Reconstruction-phase transform for one participant: QFT on the wire,
/// then the shift U_{s,0} for the shadow, then a computational measurement.
pub fn participant_transform_and_measure(
    state: &mut QuditState,
    wire: usize,
    shadow: &Shadow,
    rng: &mut impl Rng,
) -> Result<MeasurementOutcome, ProtocolError> {
    if shadow.s.modulus().get() as usize != state.dimension() {
        return Err(ProtocolError::DimensionMismatch {
            state_d: state.dimension(),
            field_d: shadow.s.modulus().get(),
        });
    }
    state.apply_qft(wire)?;
    state.apply_pauli(wire, shadow.s.value(), 0)?;
    Ok(state.measure_computational(wire, rng)?)
}

/// Sum of the announced measurement results, mod d.
pub fn reconstruct_secret(
    measurements: &[MeasurementOutcome],
    d: PrimeModulus,
) -> Result<FieldElement, ProtocolError> {
    if measurements.is_empty() {
        return Err(ProtocolError::NoMeasurements);
    }
    let mut acc = d.element(0);
    for outcome in measurements {
        acc = acc + d.element(outcome.value);
    }
    Ok(acc)
}

/// SHA-256 commitment to the secret under a versioned canonical encoding.
pub fn commit_secret(a0: FieldElement) -> [u8; 32] {
    let encoding = format!("QSS-v1|d={}|a0={}", a0.modulus().get(), a0.value());
    let digest = Sha256::digest(encoding.as_bytes());
    digest.into()
}

/// True iff `digest` commits to `candidate`.
pub fn verify_hash(candidate: FieldElement, digest: &[u8]) -> Result<bool, ProtocolError> {
    if digest.len() != 32 {
        return Err(ProtocolError::MalformedDigest { len: digest.len() });
    }
    Ok(commit_secret(candidate).as_slice() == digest)
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Final verdict of a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconstructionResult {
    pub a0_prime: Option<FieldElement>,
    pub hash_ok: bool,
    pub aborted: bool,
    pub abort_reason: Option<String>,
}

/// What an adversary does to the run. `Honest` is the clean protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Intrusion {
    Honest,
    /// Eve measures every slot of the first transmitted packet in a
    /// uniformly random basis and forwards the collapsed states.
    InterceptResend,
    /// Subset member `target` measures its GHZ particle in the
    /// computational basis before the transform step.
    DishonestMeasure { target: usize },
    /// The initiator announces `forged` instead of the computed sum.
    ForgedResult { forged: u64 },
}

/// Everything the adversary layer needs to score a run.
#[derive(Debug, Clone)]
pub(crate) struct RunReport {
    pub transcript: Transcript,
    pub result: ReconstructionResult,
    /// Decoy mismatches summed over all sequence checks.
    pub decoy_errors: usize,
    /// True iff some sequence check exceeded the threshold.
    pub check_failed: bool,
}

/// Picks which of the m decoy outcomes the receiver announces: the first
/// ceil(m/2) entries of a seeded partial shuffle, sorted.
fn receiver_half(m: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut indices: Vec<usize> = (0..m).collect();
    let take = m.div_ceil(2);
    for i in 0..take {
        let j = rng.random_range(i..m);
        indices.swap(i, j);
    }
    let mut chosen = indices[..take].to_vec();
    chosen.sort_unstable();
    chosen
}

pub(crate) fn run_with_intrusion(
    config: &ProtocolConfig,
    subset: &[usize],
    intrusion: Intrusion,
) -> Result<RunReport, ProtocolError> {
    config.validate_subset(subset)?;
    if let Intrusion::DishonestMeasure { target } = intrusion {
        if !subset.contains(&target) {
            return Err(ProtocolError::SubsetOutOfRange { index: target, n: config.n });
        }
    }
    if let Intrusion::ForgedResult { forged } = intrusion {
        if forged >= config.d.get() {
            return Err(ProtocolError::SecretOutOfRange {
                secret: forged,
                d: config.d.get(),
            });
        }
    }

    let mut rng = ChaCha12Rng::seed_from_u64(config.master_seed);
    let mut transcript = Transcript::new();
    let d = config.d;
    let dim = d.get() as usize;

    // Initialization: prime, secret, polynomial.
    transcript.record("alice", EventBody::PrimeSelected { d: d.get() });
    let polynomial = sample_polynomial(d.element(config.secret), config.t, &mut rng)?;

    // Distribution: publish points, issue shares over the private channel.
    let points: Vec<FieldElement> = (1..=config.n).map(|i| config.point_of(i)).collect();
    transcript.record(
        "alice",
        EventBody::PointsPublished {
            xs: points.iter().map(|x| x.value()).collect(),
            channel: Channel::Public,
        },
    );
    let shares = distribute_shares(&polynomial, &points)?;
    for (i, share) in shares.iter().enumerate() {
        transcript.record(
            "alice",
            EventBody::ShareIssued {
                participant: i + 1,
                x: share.x.value(),
                y: share.y.value(),
                channel: Channel::Private,
            },
        );
    }

    // Reconstruction phase. Wire w of the GHZ state belongs to subset[w];
    // the initiator subset[0] keeps wire 0.
    let initiator = subset[0];
    let initiator_name = format!("bob{initiator}");
    transcript.record(
        &initiator_name,
        EventBody::ReconstructionStarted { subset: subset.to_vec() },
    );
    let mut ghz = QuditState::ghz(dim, config.t)?;

    let mut decoy_errors = 0usize;
    for (offset, &receiver) in subset[1..].iter().enumerate() {
        let wire = offset + 1;
        let sequence_id = receiver;

        let (decoys, mut records) = build_decoy_sequence(d, config.m, &mut rng)?;
        let mut packet = insert_particle(decoys, &mut records, &mut rng)?;
        packet.sequence_id = sequence_id;
        for record in &mut records {
            record.sequence_id = sequence_id;
        }
        transcript.record(
            &initiator_name,
            EventBody::PacketSent {
                to: receiver,
                sequence_id,
                slots: packet.slots.len(),
                channel: Channel::Quantum,
            },
        );

        // Outside attack: Eve intercepts the first transmitted sequence.
        if intrusion == Intrusion::InterceptResend && offset == 0 {
            for slot in packet.slots.iter_mut() {
                let basis = if rng.random_range(0..2u8) == 0 {
                    BasisKind::Computational
                } else {
                    BasisKind::Fourier
                };
                match slot {
                    Slot::Decoy(state) => {
                        state.measure_in_basis(0, basis, &mut rng)?;
                    }
                    Slot::Particle => {
                        ghz.measure_in_basis(wire, basis, &mut rng)?;
                    }
                }
            }
            transcript.record(
                "eve",
                EventBody::AdversaryAction {
                    description: format!(
                        "intercepted sequence {sequence_id}, measured all {} slots in random bases",
                        packet.slots.len()
                    ),
                },
            );
        }

        let receiver_name = format!("bob{receiver}");
        transcript.record(&receiver_name, EventBody::PacketReceived { sequence_id });

        // Sender discloses decoy positions and bases; receiver measures in
        // the declared bases.
        transcript.record(
            &initiator_name,
            EventBody::DecoyDisclosure {
                sequence_id,
                positions: records.iter().map(|r| r.position).collect(),
                bases: records.iter().map(|r| r.label.kind).collect(),
                channel: Channel::Public,
            },
        );
        let mut outcomes = Vec::with_capacity(config.m);
        for record in &records {
            let slot = &mut packet.slots[record.position];
            let Slot::Decoy(state) = slot else {
                unreachable!("records never reference the particle slot");
            };
            outcomes.push(state.measure_in_basis(0, record.label.kind, &mut rng)?);
        }

        // Two-sided declaration: receiver announces ceil(m/2) outcomes,
        // sender reveals the initial states of the rest.
        let receiver_declares = receiver_half(config.m, &mut rng);
        transcript.record(
            &receiver_name,
            EventBody::CheckDeclaredByReceiver {
                sequence_id,
                positions: receiver_declares.iter().map(|&i| records[i].position).collect(),
                values: receiver_declares.iter().map(|&i| outcomes[i].value).collect(),
                channel: Channel::Public,
            },
        );
        let sender_reveals: Vec<usize> =
            (0..config.m).filter(|i| !receiver_declares.contains(i)).collect();
        transcript.record(
            &initiator_name,
            EventBody::CheckDeclaredBySender {
                sequence_id,
                positions: sender_reveals.iter().map(|&i| records[i].position).collect(),
                values: sender_reveals.iter().map(|&i| records[i].label.index).collect(),
                channel: Channel::Public,
            },
        );

        let report = eavesdrop_check(&records, &outcomes, config.error_threshold)?;
        decoy_errors += report.errors;
        transcript.record(
            &initiator_name,
            EventBody::CheckResult {
                sequence_id,
                errors: report.errors,
                error_rate: report.error_rate,
                pass: report.pass,
            },
        );
        if !report.pass {
            let reason = format!(
                "decoy error rate {:.4} exceeds threshold {:.4} on sequence {sequence_id}",
                report.error_rate, config.error_threshold
            );
            transcript.record(&initiator_name, EventBody::Abort { reason: reason.clone() });
            return Ok(RunReport {
                transcript,
                result: ReconstructionResult {
                    a0_prime: None,
                    hash_ok: false,
                    aborted: true,
                    abort_reason: Some(reason),
                },
                decoy_errors,
                check_failed: true,
            });
        }
    }

    // Participant attack: premature computational measurement collapses the
    // shared state to a product before anyone transforms.
    if let Intrusion::DishonestMeasure { target } = intrusion {
        let wire = subset.iter().position(|&p| p == target).expect("checked above");
        let outcome = ghz.measure_computational(wire, &mut rng)?;
        transcript.record(
            format!("bob{target}"),
            EventBody::AdversaryAction {
                description: format!(
                    "measured own particle prematurely in computational basis, got {}",
                    outcome.value
                ),
            },
        );
    }

    // Transform-and-measure: QFT, shadow shift, computational measurement.
    let subset_points: Vec<FieldElement> =
        subset.iter().map(|&p| config.point_of(p)).collect();
    let mut measurements = Vec::with_capacity(config.t);
    for (wire, &participant) in subset.iter().enumerate() {
        let share = shares[participant - 1];
        let shadow = compute_shadow(&share, &subset_points)?;
        let outcome =
            participant_transform_and_measure(&mut ghz, wire, &shadow, &mut rng)?;
        transcript.record(
            format!("bob{participant}"),
            EventBody::MeasurementAnnounced {
                participant,
                value: outcome.value,
                channel: Channel::Public,
            },
        );
        measurements.push(outcome);
    }

    // The initiator sums the announcements; a forging initiator lies here.
    let computed = reconstruct_secret(&measurements, d)?;
    let announced = match intrusion {
        Intrusion::ForgedResult { forged } => {
            transcript.record(
                &initiator_name,
                EventBody::AdversaryAction {
                    description: format!(
                        "announced forged value {forged} instead of computed {computed}"
                    ),
                },
            );
            d.element(forged)
        }
        _ => computed,
    };
    transcript.record(
        &initiator_name,
        EventBody::ReconstructionResult { a0_prime: announced.value() },
    );

    // Dealer-issued hash commitment binds the announced value.
    let digest = commit_secret(d.element(config.secret));
    transcript.record(
        "alice",
        EventBody::HashCommitment {
            digest_hex: hex_string(&digest),
            channel: Channel::Public,
        },
    );
    let hash_ok = verify_hash(announced, &digest)?;
    transcript.record(&initiator_name, EventBody::HashVerdict { ok: hash_ok });

    Ok(RunReport {
        transcript,
        result: ReconstructionResult {
            a0_prime: Some(announced),
            hash_ok,
            aborted: false,
            abort_reason: None,
        },
        decoy_errors,
        check_failed: false,
    })
}

/// Executes one honest protocol run over the given reconstruction subset.
///
/// Deterministic in `config.master_seed`: identical configs produce
/// byte-identical transcripts.
pub fn run_protocol(
    config: &ProtocolConfig,
    subset: &[usize],
) -> Result<(Transcript, ReconstructionResult), ProtocolError> {
    let report = run_with_intrusion(config, subset, Intrusion::Honest)?;
    Ok((report.transcript, report.result))
}
