//! Ordered event log of a protocol run.
//!
//! Every classical message and every protocol milestone is appended as a
//! [`TranscriptEvent`] with a logical sequence number. The classical channel
//! is modeled as a trusted, totally ordered bus; privacy of a message is a
//! tag on the event, not cryptography. Serialization is JSON with schema
//! version `qss-transcript/1` and stable key order, so two runs from the
//! same seed produce byte-identical transcripts.

use serde::{Deserialize, Serialize};

use crate::qudit::BasisKind;

pub const TRANSCRIPT_SCHEMA: &str = "qss-transcript/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    Public,
    Private,
    Quantum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case")]
pub enum EventBody {
    PrimeSelected {
        d: u64,
    },
    PointsPublished {
        xs: Vec<u64>,
        channel: Channel,
    },
    ShareIssued {
        participant: usize,
        x: u64,
        y: u64,
        channel: Channel,
    },
    ReconstructionStarted {
        subset: Vec<usize>,
    },
    PacketSent {
        to: usize,
        sequence_id: usize,
        slots: usize,
        channel: Channel,
    },
    PacketReceived {
        sequence_id: usize,
    },
    DecoyDisclosure {
        sequence_id: usize,
        positions: Vec<usize>,
        bases: Vec<BasisKind>,
        channel: Channel,
    },
    CheckDeclaredByReceiver {
        sequence_id: usize,
        positions: Vec<usize>,
        values: Vec<u64>,
        channel: Channel,
    },
    CheckDeclaredBySender {
        sequence_id: usize,
        positions: Vec<usize>,
        values: Vec<u64>,
        channel: Channel,
    },
    CheckResult {
        sequence_id: usize,
        errors: usize,
        error_rate: f64,
        pass: bool,
    },
    AdversaryAction {
        description: String,
    },
    MeasurementAnnounced {
        participant: usize,
        value: u64,
        channel: Channel,
    },
    ReconstructionResult {
        a0_prime: u64,
    },
    HashCommitment {
        digest_hex: String,
        channel: Channel,
    },
    HashVerdict {
        ok: bool,
    },
    Abort {
        reason: String,
    },
}

/// One transcript entry: logical timestamp, acting party, typed payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEvent {
    pub seq: u64,
    pub actor: String,
    #[serde(flatten)]
    pub body: EventBody,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub schema: String,
    pub events: Vec<TranscriptEvent>,
}

impl Transcript {
    pub fn new() -> Self {
        Transcript { schema: TRANSCRIPT_SCHEMA.to_string(), events: Vec::new() }
    }

    /// Appends an event, assigning the next sequence number.
    pub fn record(&mut self, actor: impl Into<String>, body: EventBody) {
        let seq = self.events.len() as u64;
        self.events.push(TranscriptEvent { seq, actor: actor.into(), body });
    }

    /// Every announced measurement, in announcement order.
    pub fn announced_measurements(&self) -> Vec<(usize, u64)> {
        self.events
            .iter()
            .filter_map(|e| match e.body {
                EventBody::MeasurementAnnounced { participant, value, .. } => {
                    Some((participant, value))
                }
                _ => None,
            })
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string(self)
    }
}

impl Default for Transcript {
    fn default() -> Self {
        Self::new()
    }
}
