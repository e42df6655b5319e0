//! Nearest-access-point association with hysteresis.

use serde::{Deserialize, Serialize};

use crate::ids::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HandoffRule {
    /// A candidate must be this much closer than the current AP, in metres.
    pub hysteresis: f64,
    /// Association range in metres.
    pub coverage: f64,
}

impl Default for HandoffRule {
    fn default() -> Self {
        HandoffRule {
            hysteresis: 5.0,
            coverage: 120.0,
        }
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

impl HandoffRule {
    /// AP the station should be associated with at `pos`, given its current
    /// one. Ties go to the lowest node id. `None` if nothing is in range.
    pub fn select(
        &self,
        pos: [f64; 2],
        current: Option<(NodeId, [f64; 2])>,
        candidates: impl IntoIterator<Item = (NodeId, [f64; 2])>,
    ) -> Option<NodeId> {
        let best = candidates
            .into_iter()
            .map(|(n, p)| (dist(pos, p), n))
            .filter(|(d, _)| *d <= self.coverage)
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        match (current, best) {
            (Some((c, cp)), Some((d, n))) => {
                let dc = dist(pos, cp);
                if dc > self.coverage || d + self.hysteresis < dc {
                    Some(n)
                } else {
                    Some(c)
                }
            }
            (Some((c, cp)), None) => (dist(pos, cp) <= self.coverage).then_some(c),
            (None, b) => b.map(|(_, n)| n),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn aps() -> Vec<(NodeId, [f64; 2])> {
        vec![(NodeId(0), [40.0, 40.0]), (NodeId(1), [120.0, 40.0])]
    }

    #[test]
    fn hysteresis_delays_switch() {
        let r = HandoffRule::default();
        let cur = Some((NodeId(0), [40.0, 40.0]));
        // 2 m past the midpoint: not enough
        assert_eq!(r.select([82.0, 40.0], cur, aps()), Some(NodeId(0)));
        // 3 m past the midpoint: 6 m closer, switch
        assert_eq!(r.select([83.0, 40.0], cur, aps()), Some(NodeId(1)));
        assert_eq!(r.select([83.0, 40.0], None, aps()), Some(NodeId(1)));
    }

    #[test]
    fn out_of_range() {
        let r = HandoffRule::default();
        assert_eq!(r.select([1000.0, 0.0], None, aps()), None);
    }
}
