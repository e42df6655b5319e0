use std::collections::{BTreeMap, BTreeSet};

use crate::ids::FaceId;
use crate::name::Name;

use super::{Message, SeqNum};

/// An unacknowledged update sent on one face.
#[derive(Debug, Clone)]
pub struct Pending {
    pub retries: u32,
    /// Identifies the single live retransmission timer of this record.
    /// Timers carrying another generation are stale and must be ignored.
    pub generation: u64,
    /// Last message sent on the face; retransmissions resend it.
    pub message: Message,
}

/// Temporary FIB: soft state of an update in progress.
#[derive(Debug, Clone, Default)]
pub struct TfibEntry {
    pub pending: BTreeMap<FaceId, Pending>,
    /// Faces that were next hops before a notification replaced them. They
    /// have a zero timer and are never retransmitted to.
    pub in_markers: BTreeSet<FaceId>,
}

impl TfibEntry {
    pub fn is_idle(&self) -> bool {
        self.pending.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct FibEntry {
    pub prefix: Name,
    /// Ordered next hops with set semantics; order is insertion order.
    pub nexthops: Vec<FaceId>,
    pub seq: SeqNum,
    /// Router hops the update carrying `seq` had travelled on arrival.
    pub seq_hops: u16,
    pub tfib: TfibEntry,
}

impl FibEntry {
    pub fn new(prefix: Name, nexthops: Vec<FaceId>, seq: SeqNum) -> Self {
        FibEntry {
            prefix,
            nexthops,
            seq,
            seq_hops: 0,
            tfib: TfibEntry::default(),
        }
    }

    pub fn add_nexthop(&mut self, face: FaceId) {
        if !self.nexthops.contains(&face) {
            self.nexthops.push(face);
        }
    }
}

/// Name-prefix forwarding table with longest-prefix-match lookup.
#[derive(Debug, Clone, Default)]
pub struct Fib {
    entries: BTreeMap<Name, FibEntry>,
    max_len: usize,
}

impl Fib {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, entry: FibEntry) {
        self.max_len = self.max_len.max(entry.prefix.len());
        self.entries.insert(entry.prefix.clone(), entry);
    }

    pub fn get(&self, prefix: &Name) -> Option<&FibEntry> {
        self.entries.get(prefix)
    }

    pub fn get_mut(&mut self, prefix: &Name) -> Option<&mut FibEntry> {
        self.entries.get_mut(prefix)
    }

    fn lpm_key(&self, name: &Name) -> Option<Name> {
        let top = name.len().min(self.max_len);
        (1..=top)
            .rev()
            .map(|k| name.prefix(k))
            .find(|p| self.entries.contains_key(p))
    }

    /// The entry whose prefix is the longest prefix of `name`.
    pub fn longest_prefix_match(&self, name: &Name) -> Option<&FibEntry> {
        self.lpm_key(name).and_then(|k| self.entries.get(&k))
    }

    pub fn longest_prefix_match_mut(&mut self, name: &Name) -> Option<&mut FibEntry> {
        let key = self.lpm_key(name)?;
        self.entries.get_mut(&key)
    }

    pub fn entries(&self) -> impl Iterator<Item = &FibEntry> {
        self.entries.values()
    }

    pub fn entries_mut(&mut self) -> impl Iterator<Item = &mut FibEntry> {
        self.entries.values_mut()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::name::name;

    fn fib_with(entries: &[(&str, u64)]) -> Fib {
        let mut fib = Fib::new();
        for (p, s) in entries {
            fib.insert(FibEntry::new(name(p), vec![FaceId(1)], SeqNum(*s)));
        }
        fib
    }

    #[test]
    fn longest_match_wins() {
        let fib = fib_with(&[("/p", 0), ("/p/a", 0)]);
        let e = fib.longest_prefix_match(&name("/p/a/1")).unwrap();
        assert_eq!(e.prefix, name("/p/a"));
    }

    #[test]
    fn no_match_is_absent() {
        let fib = fib_with(&[("/p", 0)]);
        assert!(fib.longest_prefix_match(&name("/q/1")).is_none());
    }

    #[test]
    fn exact_match_is_a_prefix_of_itself() {
        let fib = fib_with(&[("/p", 3)]);
        let e = fib.longest_prefix_match(&name("/p")).unwrap();
        assert_eq!(e.seq, SeqNum(3));
    }

    proptest::proptest! {
        #[test]
        fn lpm_agrees_with_linear_scan(
            prefixes in proptest::collection::vec(proptest::collection::vec("[ab]", 1..4), 1..8),
            query in proptest::collection::vec("[ab]", 1..5),
        ) {
            let mut fib = Fib::new();
            for p in &prefixes {
                fib.insert(FibEntry::new(Name::from_components(p), vec![], SeqNum(0)));
            }
            let q = Name::from_components(&query);
            let expected = prefixes
                .iter()
                .map(Name::from_components)
                .filter(|p| p.is_prefix_of(&q))
                .max_by_key(|p| p.len());
            let got = fib.longest_prefix_match(&q).map(|e| e.prefix.clone());
            proptest::prop_assert_eq!(&got, &expected);
            // deterministic
            let again = fib.longest_prefix_match(&q).map(|e| e.prefix.clone());
            proptest::prop_assert_eq!(got, again);
        }
    }
}
