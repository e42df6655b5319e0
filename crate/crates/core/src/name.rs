//! Hierarchical names used for longest-prefix forwarding.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// A hierarchical name made of opaque byte-string components.
///
/// Components are reference counted so that cloning a name while a message
/// hops through the network does not copy the component bytes.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Name {
    components: Arc<[Box<[u8]>]>,
}

impl Name {
    pub fn from_components<I, C>(components: I) -> Self
    where
        I: IntoIterator<Item = C>,
        C: AsRef<[u8]>,
    {
        let components: Vec<Box<[u8]>> = components
            .into_iter()
            .map(|c| c.as_ref().to_vec().into_boxed_slice())
            .collect();
        Self {
            components: components.into(),
        }
    }

    /// The empty (root) name. Never routable.
    pub fn root() -> Self {
        Self::from_components(std::iter::empty::<&[u8]>())
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = &[u8]> {
        self.components.iter().map(|c| &c[..])
    }

    /// `true` if `self` is a component-wise prefix of `other`. A name is a
    /// prefix of itself.
    pub fn is_prefix_of(&self, other: &Name) -> bool {
        self.len() <= other.len()
            && self
                .components
                .iter()
                .zip(other.components.iter())
                .all(|(a, b)| a == b)
    }

    /// The first `n` components of this name.
    pub fn prefix(&self, n: usize) -> Name {
        let n = n.min(self.len());
        if n == self.len() {
            return self.clone();
        }
        Self {
            components: self.components[..n].to_vec().into(),
        }
    }

    /// Returns a new name with `component` appended.
    pub fn child(&self, component: impl AsRef<[u8]>) -> Name {
        let mut v: Vec<Box<[u8]>> = self.components.to_vec();
        v.push(component.as_ref().to_vec().into_boxed_slice());
        Self {
            components: v.into(),
        }
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("/");
        }
        for c in self.components.iter() {
            f.write_str("/")?;
            match std::str::from_utf8(c) {
                Ok(s) => f.write_str(s)?,
                Err(_) => {
                    for b in c.iter() {
                        write!(f, "%{b:02X}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Name({self})")
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("invalid name {0:?}: names start with '/' and have no empty components")]
pub struct NameParseError(pub String);

impl FromStr for Name {
    type Err = NameParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let rest = s
            .strip_prefix('/')
            .ok_or_else(|| NameParseError(s.to_owned()))?;
        if rest.is_empty() {
            return Ok(Name::root());
        }
        let parts: Vec<&str> = rest.split('/').collect();
        if parts.iter().any(|p| p.is_empty()) {
            return Err(NameParseError(s.to_owned()));
        }
        Ok(Name::from_components(parts))
    }
}

impl Serialize for Name {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Name {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Shorthand used throughout tests and examples.
pub fn name(s: &str) -> Name {
    s.parse().expect("valid name literal")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let n = name("/p/a/1");
        assert_eq!(n.len(), 3);
        assert_eq!(n.to_string(), "/p/a/1");
        assert_eq!(name("/").len(), 0);
        assert!("p/a".parse::<Name>().is_err());
        assert!("/p//a".parse::<Name>().is_err());
    }

    #[test]
    fn prefix_relation() {
        let p = name("/p");
        let pa = name("/p/a");
        assert!(p.is_prefix_of(&pa));
        assert!(pa.is_prefix_of(&pa));
        assert!(!pa.is_prefix_of(&p));
        assert!(!name("/q").is_prefix_of(&pa));
        assert_eq!(pa.prefix(1), p);
        assert_eq!(p.child("a"), pa);
    }

    proptest::proptest! {
        #[test]
        fn prefix_is_partial_order(a in proptest::collection::vec("[a-c]{1,2}", 1..4),
                                   b in proptest::collection::vec("[a-c]{1,2}", 1..4)) {
            let x = Name::from_components(&a);
            let y = Name::from_components(&b);
            proptest::prop_assert!(x.is_prefix_of(&x));
            if x.is_prefix_of(&y) && y.is_prefix_of(&x) {
                proptest::prop_assert_eq!(&x, &y);
            }
            for k in 0..=x.len() {
                proptest::prop_assert!(x.prefix(k).is_prefix_of(&x));
            }
        }
    }
}
