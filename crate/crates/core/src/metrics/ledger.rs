//! Per-run observations.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::ids::{LinkId, StationId};
use crate::sim::topology::RouterClass;
use crate::tables::{Message, MessageKind, Special};
use crate::time::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LossCause {
    /// Radio loss, or the producer was between associations.
    Wireless,
    /// Forwarding state led nowhere while the producer was reachable.
    Mobility,
    /// Drop-tail queue overflow.
    Congestion,
    /// Expired with no recorded drop.
    Timeout,
}

impl LossCause {
    pub const ALL: [LossCause; 4] = [
        LossCause::Wireless,
        LossCause::Mobility,
        LossCause::Congestion,
        LossCause::Timeout,
    ];

    pub fn key(self) -> &'static str {
        match self {
            LossCause::Wireless => "wireless",
            LossCause::Mobility => "mobility",
            LossCause::Congestion => "congestion",
            LossCause::Timeout => "timeout",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignalKind {
    Iu,
    In,
    Ack,
    Trace,
    KeepAlive,
    AbUpdate,
    GrUpdate,
}

impl SignalKind {
    pub const ALL: [SignalKind; 7] = [
        SignalKind::Iu,
        SignalKind::In,
        SignalKind::Ack,
        SignalKind::Trace,
        SignalKind::KeepAlive,
        SignalKind::AbUpdate,
        SignalKind::GrUpdate,
    ];

    pub fn key(self) -> &'static str {
        match self {
            SignalKind::Iu => "iu",
            SignalKind::In => "in",
            SignalKind::Ack => "ack",
            SignalKind::Trace => "trace",
            SignalKind::KeepAlive => "keep-alive",
            SignalKind::AbUpdate => "ab-update",
            SignalKind::GrUpdate => "gr-update",
        }
    }

    /// Signaling kind of a message, `None` for consumer traffic.
    pub fn of(msg: &Message) -> Option<SignalKind> {
        match (msg.kind, msg.special) {
            (MessageKind::Ack, _) => Some(SignalKind::Ack),
            (MessageKind::Data, _) => None,
            (_, Special::Update) => Some(SignalKind::Iu),
            (_, Special::Notification) => Some(SignalKind::In),
            (_, Special::Trace) => Some(SignalKind::Trace),
            (_, Special::KeepAlive) => Some(SignalKind::KeepAlive),
            (_, Special::AnchorUpdate) => Some(SignalKind::AbUpdate),
            (_, Special::None | Special::Discovery) => None,
        }
    }
}

/// Where a signaling message was received.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sink {
    Router(RouterClass),
    Mobile,
}

impl Sink {
    pub fn key(self) -> &'static str {
        match self {
            Sink::Router(c) => c.key(),
            Sink::Mobile => "mobile",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HandoffRecord {
    pub station: StationId,
    pub at: SimTime,
    /// Time until every consumer of the producer could reach it again.
    pub latency: Option<SimTime>,
    /// Still unreachable when the next handoff (or the run end) came.
    pub censored: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StretchSample {
    pub k: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct MetricsLedger {
    pub duration: SimTime,
    pub issued: u64,
    pub delivered: u64,
    pub lost: BTreeMap<LossCause, u64>,
    pub in_flight_at_end: u64,
    pub delays_ms: Vec<f64>,
    pub hop_counts: Vec<u32>,
    pub signaling: BTreeMap<(SignalKind, Sink), u64>,
    /// Producer handovers (attachments after the first).
    pub handovers: u64,
    pub handoffs: Vec<HandoffRecord>,
    pub stretch: Vec<StretchSample>,
    /// Bytes per link and direction (a to b, b to a), wired and neighbor
    /// links only.
    pub link_bytes: BTreeMap<LinkId, [u64; 2]>,
    pub playout_failures: BTreeMap<StationId, u64>,
    pub protocol_errors: u64,
    pub give_ups: u64,
    pub reachability_violations: u64,
}

impl MetricsLedger {
    pub fn record_signal(&mut self, kind: SignalKind, sink: Sink) {
        *self.signaling.entry((kind, sink)).or_default() += 1;
    }

    pub fn record_loss(&mut self, cause: LossCause) {
        *self.lost.entry(cause).or_default() += 1;
    }

    pub fn lost_total(&self) -> u64 {
        self.lost.values().sum()
    }

    pub fn lost_by(&self, cause: LossCause) -> u64 {
        self.lost.get(&cause).copied().unwrap_or(0)
    }

    /// Lost share of resolved Interests.
    pub fn loss_rate(&self) -> f64 {
        let resolved = self.delivered + self.lost_total();
        if resolved == 0 {
            0.0
        } else {
            self.lost_total() as f64 / resolved as f64
        }
    }

    pub fn signal_total(&self) -> u64 {
        self.signaling.values().sum()
    }

    pub fn signal_count(&self, kind: SignalKind) -> u64 {
        self.signaling
            .iter()
            .filter(|((k, _), _)| *k == kind)
            .map(|(_, v)| v)
            .sum()
    }

    pub fn signal_at(&self, sink: Sink) -> u64 {
        self.signaling
            .iter()
            .filter(|((_, s), _)| *s == sink)
            .map(|(_, v)| v)
            .sum()
    }

    pub fn mean_delay_ms(&self) -> f64 {
        super::stats::mean(&self.delays_ms)
    }

    pub fn mean_hops(&self) -> f64 {
        let v: Vec<f64> = self.hop_counts.iter().map(|&h| h as f64).collect();
        super::stats::mean(&v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::name::name;
    use crate::tables::SeqNum;

    #[test]
    fn signal_kinds() {
        let p = name("/p");
        assert_eq!(SignalKind::of(&Message::update(p.clone(), SeqNum(1))), Some(SignalKind::Iu));
        assert_eq!(SignalKind::of(&Message::notification(p.clone(), SeqNum(1))), Some(SignalKind::In));
        assert_eq!(
            SignalKind::of(&Message::ack(p.clone(), SeqNum(1), Special::Trace)),
            Some(SignalKind::Ack)
        );
        assert_eq!(SignalKind::of(&Message::interest(p, 1, SimTime::ZERO)), None);
    }

    #[test]
    fn per_sink_sums_match_total() {
        let mut l = MetricsLedger::default();
        l.record_signal(SignalKind::Iu, Sink::Router(RouterClass::Access));
        l.record_signal(SignalKind::Ack, Sink::Mobile);
        l.record_signal(SignalKind::Iu, Sink::Router(RouterClass::Edge));
        let sinks = [
            Sink::Router(RouterClass::Access),
            Sink::Router(RouterClass::Edge),
            Sink::Mobile,
        ];
        assert_eq!(sinks.iter().map(|&s| l.signal_at(s)).sum::<u64>(), l.signal_total());
        assert_eq!(l.signal_count(SignalKind::Iu), 2);
    }
}
