//! Producer-side state machine for forwarding-update mobility.

use crate::ids::NodeId;
use crate::name::Name;
use crate::tables::{Message, SeqNum};
use crate::time::SimTime;

#[derive(Debug, Clone)]
pub struct MapMeConfig {
    /// Minimum spacing between propagated updates. With notifications
    /// disabled every attachment sends an update regardless.
    pub t_u: SimTime,
    pub enable_in: bool,
    pub enable_discovery: bool,
    pub retx_timeout: SimTime,
}

impl MapMeConfig {
    pub fn full(t_u: SimTime) -> Self {
        MapMeConfig {
            t_u,
            enable_in: true,
            enable_discovery: true,
            retx_timeout: SimTime::from_millis(60),
        }
    }

    pub fn updates_only() -> Self {
        MapMeConfig {
            t_u: SimTime::ZERO,
            enable_in: false,
            enable_discovery: false,
            retx_timeout: SimTime::from_millis(60),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProducerState {
    pub prefix: Name,
    pub seq: SeqNum,
    pub last_iu: Option<SimTime>,
    /// Set when an attachment was announced by a notification only; the
    /// update then follows once `t_u` has elapsed.
    pub update_owed: bool,
    /// Points of attachment in order, one per completed attachment.
    pub history: Vec<NodeId>,
}

impl ProducerState {
    pub fn new(prefix: Name) -> Self {
        ProducerState {
            prefix,
            seq: SeqNum::ROUTING,
            last_iu: None,
            update_owed: false,
            history: Vec::new(),
        }
    }

    pub fn advance(&mut self) -> SeqNum {
        self.seq = self.seq.next();
        self.seq
    }

    pub fn current_poa(&self) -> Option<NodeId> {
        self.history.last().copied()
    }
}

/// Messages a producer sends to its new point of attachment.
///
/// The sequence number advances once per attachment. An update is included
/// on the first attachment and whenever `t_u` has elapsed since the last one;
/// otherwise only a notification is sent. When both go out they share the
/// sequence number and the update comes first, so the notification lands on
/// the equal-sequence branch at the point of attachment.
pub fn mapme_on_attach(p: &mut ProducerState, cfg: &MapMeConfig, now: SimTime) -> Vec<Message> {
    let seq = p.advance();
    if !cfg.enable_in {
        p.last_iu = Some(now);
        return vec![Message::update(p.prefix.clone(), seq)];
    }
    let due = match p.last_iu {
        None => true,
        Some(t) => now.saturating_sub(t) >= cfg.t_u,
    };
    let mut out = Vec::with_capacity(2);
    p.update_owed = !due;
    if due {
        p.last_iu = Some(now);
        out.push(Message::update(p.prefix.clone(), seq));
    }
    out.push(Message::notification(p.prefix.clone(), seq));
    out
}

/// Instant at which an owed update may go out.
pub fn mapme_update_due(p: &ProducerState, cfg: &MapMeConfig) -> Option<SimTime> {
    if !p.update_owed {
        return None;
    }
    p.last_iu.map(|t| t + cfg.t_u)
}

/// The update owed by a notification-only attachment, stamped with a fresh
/// sequence number so it supersedes the notification along its path.
pub fn mapme_deferred_update(p: &mut ProducerState, now: SimTime) -> Option<Message> {
    if !p.update_owed {
        return None;
    }
    p.update_owed = false;
    p.last_iu = Some(now);
    let seq = p.advance();
    Some(Message::update(p.prefix.clone(), seq))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::name::name;
    use crate::tables::Special;

    fn specials(v: &[Message]) -> Vec<(Special, u64)> {
        v.iter().map(|m| (m.special, m.seq.unwrap().0)).collect()
    }

    #[test]
    fn first_attach_sends_update_and_notification() {
        let mut p = ProducerState::new(name("/p"));
        let cfg = MapMeConfig::full(SimTime::from_secs(1));
        let out = mapme_on_attach(&mut p, &cfg, SimTime::ZERO);
        assert_eq!(specials(&out), vec![(Special::Update, 1), (Special::Notification, 1)]);
    }

    #[test]
    fn update_rate_is_capped() {
        let mut p = ProducerState::new(name("/p"));
        let cfg = MapMeConfig::full(SimTime::from_secs(1));
        mapme_on_attach(&mut p, &cfg, SimTime::ZERO);
        let out = mapme_on_attach(&mut p, &cfg, SimTime::from_millis(500));
        assert_eq!(specials(&out), vec![(Special::Notification, 2)]);
        assert_eq!(mapme_update_due(&p, &cfg), Some(SimTime::from_secs(1)));
        let out = mapme_on_attach(&mut p, &cfg, SimTime::from_secs(2));
        assert_eq!(specials(&out), vec![(Special::Update, 3), (Special::Notification, 3)]);
    }

    #[test]
    fn owed_update_takes_a_fresh_sequence() {
        let mut p = ProducerState::new(name("/p"));
        let cfg = MapMeConfig::full(SimTime::from_secs(1));
        mapme_on_attach(&mut p, &cfg, SimTime::ZERO);
        assert!(mapme_deferred_update(&mut p, SimTime::from_millis(10)).is_none());
        mapme_on_attach(&mut p, &cfg, SimTime::from_millis(300));
        let m = mapme_deferred_update(&mut p, SimTime::from_secs(1)).unwrap();
        assert_eq!(specials(&[m]), vec![(Special::Update, 3)]);
        assert_eq!(p.last_iu, Some(SimTime::from_secs(1)));
        assert_eq!(mapme_update_due(&p, &cfg), None);
        // an attachment past the spacing clears the debt
        mapme_on_attach(&mut p, &cfg, SimTime::from_millis(1500));
        mapme_on_attach(&mut p, &cfg, SimTime::from_secs(3));
        assert!(mapme_deferred_update(&mut p, SimTime::from_secs(4)).is_none());
    }

    #[test]
    fn updates_only_variant() {
        let mut p = ProducerState::new(name("/p"));
        let cfg = MapMeConfig::updates_only();
        for k in 1..5 {
            let out = mapme_on_attach(&mut p, &cfg, SimTime::from_millis(k * 10));
            assert_eq!(specials(&out), vec![(Special::Update, k)]);
        }
    }
}
