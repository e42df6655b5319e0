//! Mobility management strategies.
//!
//! * `mapme` / `mapme-iu`: producer-driven forwarding updates, with or
//!   without notifications and discovery ([`producer`]).
//! * `ab`: anchor-based relay ([`anchor`]).
//! * `tb`: trace-based reverse paths toward a rendezvous node ([`tracing`]).
//! * `gr`: ideal global routing rewrite ([`global`]).

pub mod anchor;
pub mod global;
pub mod producer;
pub mod tracing;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use producer::{mapme_deferred_update, mapme_on_attach, mapme_update_due, MapMeConfig, ProducerState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProtocolKind {
    #[serde(rename = "mapme")]
    MapMe,
    #[serde(rename = "mapme-iu")]
    MapMeIu,
    #[serde(rename = "ab")]
    Anchor,
    #[serde(rename = "tb")]
    Tracing,
    #[serde(rename = "gr")]
    GlobalRouting,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 5] = [
        ProtocolKind::MapMe,
        ProtocolKind::MapMeIu,
        ProtocolKind::Anchor,
        ProtocolKind::Tracing,
        ProtocolKind::GlobalRouting,
    ];

    pub fn key(self) -> &'static str {
        match self {
            ProtocolKind::MapMe => "mapme",
            ProtocolKind::MapMeIu => "mapme-iu",
            ProtocolKind::Anchor => "ab",
            ProtocolKind::Tracing => "tb",
            ProtocolKind::GlobalRouting => "gr",
        }
    }

    pub fn is_mapme(self) -> bool {
        matches!(self, ProtocolKind::MapMe | ProtocolKind::MapMeIu)
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("unknown protocol {0:?} (expected mapme, mapme-iu, ab, tb or gr)")]
pub struct UnknownProtocol(pub String);

impl FromStr for ProtocolKind {
    type Err = UnknownProtocol;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ProtocolKind::ALL
            .into_iter()
            .find(|p| p.key() == s)
            .ok_or_else(|| UnknownProtocol(s.to_owned()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_round_trip() {
        for p in ProtocolKind::ALL {
            assert_eq!(p.key().parse::<ProtocolKind>().unwrap(), p);
            let j = serde_json::to_string(&p).unwrap();
            assert_eq!(j, format!("\"{}\"", p.key()));
        }
        assert!("kite".parse::<ProtocolKind>().is_err());
    }
}
