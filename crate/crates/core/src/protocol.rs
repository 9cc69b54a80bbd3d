//! Transmitter policy automata and receiver reconstruction state.
//!
//! Four policies decide, slot by slot, whether to send a status update:
//!
//! * [`PolicyKind::Uniform`] samples every `period` slots and retransmits the
//!   stored (possibly stale) sample each slot until it is acknowledged.
//! * [`PolicyKind::AgeAware`] sends a fresh sample whenever the receiver's age
//!   of information has reached `threshold`. When such an attempt is erased,
//!   the receiver replaces its estimate by the most likely next state.
//! * [`PolicyKind::ChangeAware`] raises a pending flag whenever the source
//!   changes and sends fresh samples until one is acknowledged, even if the
//!   source has meanwhile returned to the receiver's state.
//! * [`PolicyKind::EndToEnd`] sends a fresh sample exactly when the source
//!   differs from the receiver's estimate.
//!
//! Acknowledgements are error-free and arrive in the same slot.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::MarkovSource;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolicyKind {
    Uniform { period: u32 },
    AgeAware { threshold: u32 },
    ChangeAware,
    EndToEnd,
}

impl PolicyKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PolicyKind::Uniform { period: 0 } => Err(Error::ZeroParameter { name: "period" }),
            PolicyKind::AgeAware { threshold: 0 } => Err(Error::ZeroParameter { name: "threshold" }),
            _ => Ok(()),
        }
    }

    /// Short name used on the command line and in CSV output.
    pub fn name(&self) -> &'static str {
        match self {
            PolicyKind::Uniform { .. } => "uniform",
            PolicyKind::AgeAware { .. } => "age",
            PolicyKind::ChangeAware => "change",
            PolicyKind::EndToEnd => "e2e",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Policy family without its parameters, as named on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PolicyName {
    Uniform,
    Age,
    Change,
    E2e,
}

impl PolicyName {
    pub const ALL: [PolicyName; 4] = [
        PolicyName::Uniform,
        PolicyName::Age,
        PolicyName::Change,
        PolicyName::E2e,
    ];

    pub fn with_params(self, period: u32, threshold: u32) -> PolicyKind {
        match self {
            PolicyName::Uniform => PolicyKind::Uniform { period },
            PolicyName::Age => PolicyKind::AgeAware { threshold },
            PolicyName::Change => PolicyKind::ChangeAware,
            PolicyName::E2e => PolicyKind::EndToEnd,
        }
    }
}

impl FromStr for PolicyName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(PolicyName::Uniform),
            "age" => Ok(PolicyName::Age),
            "change" => Ok(PolicyName::Change),
            "e2e" => Ok(PolicyName::E2e),
            other => Err(format!(
                "unknown policy `{other}` (expected uniform, age, change or e2e)"
            )),
        }
    }
}

impl fmt::Display for PolicyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolicyName::Uniform => "uniform",
            PolicyName::Age => "age",
            PolicyName::Change => "change",
            PolicyName::E2e => "e2e",
        })
    }
}

/// A measurement of the source: its value and the slot it was taken in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sample {
    pub value: usize,
    pub gen_slot: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StoredSample {
    pub sample: Sample,
    pub acked: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransmitterState {
    pub kind: PolicyKind,
    /// ChangeAware only: a change has not been delivered yet.
    pub pending: bool,
    /// Uniform only: last acquired measurement.
    pub stored: Option<StoredSample>,
    /// Uniform only: slots since the last sampling instant, modulo the period.
    pub counter: u32,
    pub prev_source_state: usize,
}

impl TransmitterState {
    pub fn new(kind: PolicyKind, initial_source_state: usize) -> Self {
        Self {
            kind,
            pending: false,
            stored: None,
            counter: 0,
            prev_source_state: initial_source_state,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReceiverState {
    pub estimate: usize,
    pub aoi: u64,
    pub last_gen_slot: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Idle,
    Transmit(Sample),
}

impl Decision {
    pub fn is_transmit(&self) -> bool {
        matches!(self, Decision::Transmit(_))
    }
}

/// Transmitter decision for `slot`, given the freshly observed source state.
///
/// Only [`PolicyKind::AgeAware`] and [`PolicyKind::EndToEnd`] look at
/// `receiver`.
pub fn decide(
    tx: &TransmitterState,
    source_state: usize,
    slot: u64,
    receiver: &ReceiverState,
) -> (Decision, TransmitterState) {
    let mut next = *tx;
    next.prev_source_state = source_state;
    let fresh = Sample {
        value: source_state,
        gen_slot: slot,
    };
    let decision = match tx.kind {
        PolicyKind::Uniform { period } => {
            if tx.counter.is_multiple_of(period) {
                next.stored = Some(StoredSample {
                    sample: fresh,
                    acked: false,
                });
            }
            next.counter = (tx.counter + 1) % period;
            match next.stored {
                Some(StoredSample { sample, acked: false }) => Decision::Transmit(sample),
                _ => Decision::Idle,
            }
        }
        PolicyKind::AgeAware { threshold } => {
            if receiver.aoi >= u64::from(threshold) {
                Decision::Transmit(fresh)
            } else {
                Decision::Idle
            }
        }
        PolicyKind::ChangeAware => {
            if source_state != tx.prev_source_state {
                next.pending = true;
            }
            if next.pending {
                Decision::Transmit(fresh)
            } else {
                Decision::Idle
            }
        }
        PolicyKind::EndToEnd => {
            if source_state != receiver.estimate {
                Decision::Transmit(fresh)
            } else {
                Decision::Idle
            }
        }
    };
    (decision, next)
}

/// Feeds the same-slot acknowledgement of an attempted transmission back to
/// the transmitter.
pub fn apply_ack(tx: &TransmitterState, delivered: bool) -> TransmitterState {
    let mut next = *tx;
    if delivered {
        match tx.kind {
            PolicyKind::ChangeAware => next.pending = false,
            PolicyKind::Uniform { .. } => {
                if let Some(stored) = next.stored.as_mut() {
                    stored.acked = true;
                }
            }
            PolicyKind::AgeAware { .. } | PolicyKind::EndToEnd => {}
        }
    }
    next
}

/// Most likely successor of `current_estimate`; ties keep the current estimate.
pub fn map_predict(source: &MarkovSource, current_estimate: usize) -> usize {
    let row = source.row(current_estimate);
    let mut best = current_estimate;
    for (state, &p) in row.iter().enumerate() {
        if p > row[best] {
            best = state;
        }
    }
    best
}

impl ReceiverState {
    pub fn synchronized(initial_state: usize) -> Self {
        Self {
            estimate: initial_state,
            aoi: 0,
            last_gen_slot: 0,
        }
    }

    pub fn advance_slot(self) -> Self {
        Self {
            aoi: self.aoi + 1,
            ..self
        }
    }

    /// Installs a delivered sample. A stale sample sets the age to its own age.
    pub fn apply_delivery(self, value: usize, gen_slot: u64, now: u64) -> Result<Self> {
        if gen_slot > now {
            return Err(Error::SampleFromFuture { gen_slot, now });
        }
        Ok(Self {
            estimate: value,
            aoi: now - gen_slot,
            last_gen_slot: gen_slot,
        })
    }

    /// Replaces the estimate by its most likely successor. Not a delivery: the
    /// age of information is untouched.
    pub fn apply_prediction_on_failure(self, source: &MarkovSource) -> Self {
        Self {
            estimate: map_predict(source, self.estimate),
            ..self
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rx(estimate: usize, aoi: u64) -> ReceiverState {
        ReceiverState {
            estimate,
            aoi,
            last_gen_slot: 0,
        }
    }

    #[test]
    fn e2e_follows_discrepancy() {
        let tx = TransmitterState::new(PolicyKind::EndToEnd, 1);
        assert_eq!(decide(&tx, 1, 5, &rx(1, 4)).0, Decision::Idle);
        assert_eq!(
            decide(&tx, 1, 5, &rx(0, 4)).0,
            Decision::Transmit(Sample { value: 1, gen_slot: 5 })
        );
    }

    #[test]
    fn change_aware_persists_after_source_reverts() {
        let receiver = rx(0, 1);
        let tx = TransmitterState::new(PolicyKind::ChangeAware, 0);
        // Change 0 -> 1 at slot t: pending set, transmit.
        let (d, tx) = decide(&tx, 1, 10, &receiver);
        assert_eq!(d, Decision::Transmit(Sample { value: 1, gen_slot: 10 }));
        assert!(tx.pending);
        // Erased.
        let tx = apply_ack(&tx, false);
        assert!(tx.pending);
        // Source returns to 0 at t+1: still transmitting, now the reverted value.
        let (d, tx) = decide(&tx, 0, 11, &receiver);
        assert_eq!(d, Decision::Transmit(Sample { value: 0, gen_slot: 11 }));
        // E2E in the same situation stays silent.
        let e2e = TransmitterState::new(PolicyKind::EndToEnd, 0);
        assert_eq!(decide(&e2e, 0, 11, &receiver).0, Decision::Idle);
        // Delivery clears the flag.
        let tx = apply_ack(&tx, true);
        assert!(!tx.pending);
        assert_eq!(decide(&tx, 0, 12, &receiver).0, Decision::Idle);
    }

    #[test]
    fn age_aware_threshold() {
        let tx = TransmitterState::new(PolicyKind::AgeAware { threshold: 3 }, 0);
        assert_eq!(
            decide(&tx, 1, 7, &rx(0, 3)).0,
            Decision::Transmit(Sample { value: 1, gen_slot: 7 })
        );
        assert_eq!(decide(&tx, 1, 7, &rx(0, 2)).0, Decision::Idle);
    }

    #[test]
    fn uniform_retransmits_stored_sample() {
        let kind = PolicyKind::Uniform { period: 3 };
        let tx = TransmitterState::new(kind, 0);
        let (d, tx) = decide(&tx, 1, 1, &rx(0, 1));
        assert_eq!(d, Decision::Transmit(Sample { value: 1, gen_slot: 1 }));
        assert_eq!(tx.counter, 1);
        let tx = apply_ack(&tx, false);
        // counter = 1, stored unacknowledged: the stale sample goes out again.
        let (d, tx) = decide(&tx, 0, 2, &rx(0, 2));
        assert_eq!(d, Decision::Transmit(Sample { value: 1, gen_slot: 1 }));
        let tx = apply_ack(&tx, true);
        // Acknowledged: silent until the next sampling instant at slot 4.
        let (d, tx) = decide(&tx, 1, 3, &rx(1, 1));
        assert_eq!(d, Decision::Idle);
        let (d, _) = decide(&tx, 0, 4, &rx(1, 2));
        assert_eq!(d, Decision::Transmit(Sample { value: 0, gen_slot: 4 }));
    }

    #[test]
    fn ack_rules() {
        let mut tx = TransmitterState::new(PolicyKind::ChangeAware, 0);
        tx.pending = true;
        assert!(!apply_ack(&tx, true).pending);
        assert!(apply_ack(&tx, false).pending);
        let e2e = TransmitterState::new(PolicyKind::EndToEnd, 0);
        assert_eq!(apply_ack(&e2e, true), e2e);
    }

    #[test]
    fn prediction_is_row_argmax() {
        let slow = MarkovSource::two_state(0.95, 0.9).unwrap();
        let rapid = MarkovSource::two_state(0.8, 0.3).unwrap();
        let sym = MarkovSource::two_state(0.5, 0.5).unwrap();
        let frozen = MarkovSource::two_state(1.0, 1.0).unwrap();
        assert_eq!(map_predict(&slow, 0), 0);
        assert_eq!(map_predict(&slow, 1), 1);
        assert_eq!(map_predict(&rapid, 1), 0);
        assert_eq!(map_predict(&sym, 1), 1);
        assert_eq!(map_predict(&sym, 0), 0);

        assert_eq!(rx(1, 4).apply_prediction_on_failure(&rapid), rx(0, 4));
        assert_eq!(rx(0, 4).apply_prediction_on_failure(&slow), rx(0, 4));
        assert_eq!(rx(1, 2).apply_prediction_on_failure(&frozen), rx(1, 2));
    }

    #[test]
    fn receiver_age_bookkeeping() {
        assert_eq!(rx(0, 2).advance_slot(), rx(0, 3));
        assert_eq!(rx(1, 0).advance_slot(), rx(1, 1));
        let mut r = rx(0, 0);
        for _ in 0..17 {
            r = r.advance_slot();
        }
        assert_eq!(r.aoi, 17);

        let r = rx(0, 5).apply_delivery(1, 9, 9).unwrap();
        assert_eq!(
            r,
            ReceiverState {
                estimate: 1,
                aoi: 0,
                last_gen_slot: 9
            }
        );
        let r = rx(0, 5).apply_delivery(0, 7, 9).unwrap();
        assert_eq!(r.aoi, 2);
        assert_eq!(
            rx(0, 5).apply_delivery(0, 10, 9),
            Err(Error::SampleFromFuture { gen_slot: 10, now: 9 })
        );
    }

    #[test]
    fn zero_parameters_rejected() {
        assert!(PolicyKind::Uniform { period: 0 }.validate().is_err());
        assert!(PolicyKind::AgeAware { threshold: 0 }.validate().is_err());
        assert!(PolicyKind::Uniform { period: 1 }.validate().is_ok());
    }

    #[test]
    fn policy_names_round_trip() {
        for name in PolicyName::ALL {
            assert_eq!(name.to_string().parse::<PolicyName>().unwrap(), name);
            assert_eq!(name.with_params(3, 3).name(), name.to_string());
        }
        assert!("semantic".parse::<PolicyName>().is_err());
    }

    fn any_kind() -> impl Strategy<Value = PolicyKind> {
        prop_oneof![
            (1u32..6).prop_map(|period| PolicyKind::Uniform { period }),
            (1u32..6).prop_map(|threshold| PolicyKind::AgeAware { threshold }),
            Just(PolicyKind::ChangeAware),
            Just(PolicyKind::EndToEnd),
        ]
    }

    proptest! {
        #[test]
        fn source_side_policies_ignore_receiver(
            period in 1u32..6,
            counter in 0u32..6,
            pending: bool,
            prev in 0usize..2,
            x in 0usize..2,
            slot in 1u64..1000,
            est_a in 0usize..2, aoi_a in 0u64..20,
            est_b in 0usize..2, aoi_b in 0u64..20,
        ) {
            for kind in [PolicyKind::Uniform { period }, PolicyKind::ChangeAware] {
                let mut tx = TransmitterState::new(kind, prev);
                tx.counter = counter % period;
                tx.pending = pending && kind == PolicyKind::ChangeAware;
                let a = decide(&tx, x, slot, &ReceiverState { estimate: est_a, aoi: aoi_a, last_gen_slot: 0 });
                let b = decide(&tx, x, slot, &ReceiverState { estimate: est_b, aoi: aoi_b, last_gen_slot: 0 });
                prop_assert_eq!(a, b);
            }
        }

        #[test]
        fn e2e_silent_when_synchronized(x in 0usize..4, aoi in 0u64..50, slot in 1u64..1000) {
            let tx = TransmitterState::new(PolicyKind::EndToEnd, x);
            let d = decide(&tx, x, slot, &ReceiverState { estimate: x, aoi, last_gen_slot: 0 }).0;
            prop_assert_eq!(d, Decision::Idle);
        }

        #[test]
        fn transmitted_values_are_valid(kind in any_kind(), xs in proptest::collection::vec(0usize..3, 1..50)) {
            let mut tx = TransmitterState::new(kind, 0);
            let mut r = ReceiverState::synchronized(0);
            for (t, &x) in xs.iter().enumerate() {
                let slot = t as u64 + 1;
                r = r.advance_slot();
                let (d, next) = decide(&tx, x, slot, &r);
                tx = next;
                if let Decision::Transmit(s) = d {
                    prop_assert!(s.value < 3);
                    prop_assert!(s.gen_slot <= slot);
                    r = r.apply_delivery(s.value, s.gen_slot, slot).unwrap();
                    tx = apply_ack(&tx, true);
                    prop_assert_eq!(r.aoi, slot - r.last_gen_slot);
                }
            }
        }
    }
}
