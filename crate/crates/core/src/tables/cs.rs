use std::collections::{HashMap, VecDeque};

use crate::name::Name;

use super::Message;

/// FIFO-evicting content store. Zero capacity (the default) disables it.
#[derive(Debug, Clone, Default)]
pub struct ContentStore {
    capacity: usize,
    order: VecDeque<Name>,
    items: HashMap<Name, Message>,
}

impl ContentStore {
    pub fn with_capacity(capacity: usize) -> Self {
        ContentStore {
            capacity,
            ..Default::default()
        }
    }

    pub fn lookup(&self, name: &Name) -> Option<&Message> {
        self.items.get(name)
    }

    pub fn insert(&mut self, data: &Message) {
        if self.capacity == 0 || self.items.contains_key(&data.name) {
            return;
        }
        if self.items.len() == self.capacity {
            if let Some(old) = self.order.pop_front() {
                self.items.remove(&old);
            }
        }
        self.order.push_back(data.name.clone());
        self.items.insert(data.name.clone(), data.clone());
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::name::name;
    use crate::time::SimTime;

    #[test]
    fn zero_capacity_stores_nothing() {
        let mut cs = ContentStore::default();
        let d = Message::data_for(&Message::interest(name("/p/1"), 1, SimTime::ZERO), SimTime::ZERO);
        cs.insert(&d);
        assert!(cs.lookup(&name("/p/1")).is_none());
    }

    #[test]
    fn evicts_oldest() {
        let mut cs = ContentStore::with_capacity(1);
        for n in ["/p/1", "/p/2"] {
            let d = Message::data_for(&Message::interest(name(n), 1, SimTime::ZERO), SimTime::ZERO);
            cs.insert(&d);
        }
        assert!(cs.lookup(&name("/p/1")).is_none());
        assert!(cs.lookup(&name("/p/2")).is_some());
    }
}
