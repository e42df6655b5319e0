use std::collections::HashMap;

use crate::ids::FaceId;
use crate::name::Name;
use crate::time::SimTime;

#[derive(Debug, Clone)]
pub struct PitEntry {
    pub name: Name,
    pub in_faces: Vec<(FaceId, u32)>,
    pub expiry: SimTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PitInsert {
    New,
    /// A live entry exists and this Interest carries a fresh nonce; the
    /// ingress face was recorded and the Interest must not be forwarded.
    Aggregated,
    /// Nonce already seen for this name: looping Interest, drop it.
    Duplicate,
}

/// Pending Interest Table. Expired entries are purged lazily.
#[derive(Debug, Clone, Default)]
pub struct Pit {
    entries: HashMap<Name, PitEntry>,
    inserts_since_sweep: u32,
}

impl Pit {
    const SWEEP_EVERY: u32 = 4096;

    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert_or_aggregate(
        &mut self,
        name: &Name,
        nonce: u32,
        in_face: FaceId,
        now: SimTime,
        lifetime: SimTime,
    ) -> PitInsert {
        self.inserts_since_sweep += 1;
        if self.inserts_since_sweep >= Self::SWEEP_EVERY {
            self.purge_expired(now);
        }
        if let Some(e) = self.entries.get_mut(name) {
            if e.expiry > now {
                if e.in_faces.iter().any(|&(_, n)| n == nonce) {
                    return PitInsert::Duplicate;
                }
                match e.in_faces.iter_mut().find(|(f, _)| *f == in_face) {
                    Some(slot) => slot.1 = nonce,
                    None => e.in_faces.push((in_face, nonce)),
                }
                e.expiry = e.expiry.max(now + lifetime);
                return PitInsert::Aggregated;
            }
        }
        self.entries.insert(
            name.clone(),
            PitEntry {
                name: name.clone(),
                in_faces: vec![(in_face, nonce)],
                expiry: now + lifetime,
            },
        );
        PitInsert::New
    }

    /// Removes and returns the live entry for `name`, if any.
    pub fn consume(&mut self, name: &Name, now: SimTime) -> Option<PitEntry> {
        let e = self.entries.remove(name)?;
        (e.expiry > now).then_some(e)
    }

    pub fn get(&self, name: &Name, now: SimTime) -> Option<&PitEntry> {
        self.entries.get(name).filter(|e| e.expiry > now)
    }

    pub fn purge_expired(&mut self, now: SimTime) {
        self.inserts_since_sweep = 0;
        self.entries.retain(|_, e| e.expiry > now);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
