//! Name-keyed registries of interchangeable strategies.
//!
//! Trajectory generators ([`crate::propagate::Propagator`]) and integrators
//! ([`crate::integrate::Stepper`]) are both held as boxed trait objects and
//! looked up by the name a front end received on its command line.

use std::collections::BTreeMap;

use crate::{Error, Result};

/// A strategy that can be registered and selected by name.
pub trait Named {
    fn name(&self) -> &'static str;

    fn describe(&self) -> &'static str {
        ""
    }
}

pub struct Registry<T: ?Sized + Named> {
    kind: &'static str,
    entries: BTreeMap<&'static str, Box<T>>,
}

impl<T: ?Sized + Named> Registry<T> {
    /// Empty registry; `kind` names the entry type in error messages.
    pub fn new(kind: &'static str) -> Self {
        Registry { kind, entries: BTreeMap::new() }
    }

    pub fn register(&mut self, entry: Box<T>) -> Result<()> {
        let name = entry.name();
        if self.entries.contains_key(name) {
            return Err(Error::DuplicateEntry { kind: self.kind, name: name.to_string() });
        }
        self.entries.insert(name, entry);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&T> {
        self.entries.get(name).map(|b| b.as_ref()).ok_or_else(|| Error::UnknownEntry {
            kind: self.kind,
            name: name.to_string(),
            available: self.names().join(", "),
        })
    }

    /// Registered names in sorted order.
    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.entries.values().map(|b| b.as_ref())
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

    trait Greeter: Named {
        fn greet(&self) -> String;
    }

    struct Hello;
    impl Named for Hello {
        fn name(&self) -> &'static str {
            "hello"
        }
    }
    impl Greeter for Hello {
        fn greet(&self) -> String {
            "hi".into()
        }
    }

    #[test]
    fn register_lookup_and_duplicates() {
        let mut reg: Registry<dyn Greeter> = Registry::new("greeter");
        assert!(reg.is_empty());
        reg.register(Box::new(Hello)).unwrap();
        assert_eq!(reg.get("hello").unwrap().greet(), "hi");
        assert!(matches!(reg.register(Box::new(Hello)), Err(Error::DuplicateEntry { .. })));
        let err = reg.get("bye").err().unwrap();
        assert_eq!(err.to_string(), "unknown greeter `bye` (available: hello)");
        assert_eq!(reg.len(), 1);
    }
}
