//! Name-keyed factories for strategy trait objects.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Builds a boxed strategy from its parameter block.
pub type Factory<T, P> = fn(&P) -> Result<Box<T>>;

/// Maps strategy names to factories.
///
/// `T` is the strategy trait object (`dyn Selector`, `dyn Downsampler`) and
/// `P` the parameter type handed to each factory.
pub struct Registry<T: ?Sized, P> {
    kind: &'static str,
    factories: BTreeMap<String, Factory<T, P>>,
}

impl<T: ?Sized, P> Registry<T, P> {
    pub fn new(kind: &'static str) -> Self {
        Self {
            kind,
            factories: BTreeMap::new(),
        }
    }

    /// Registers `factory` under `name`, replacing any previous entry.
    pub fn register(&mut self, name: &str, factory: Factory<T, P>) -> &mut Self {
        self.factories.insert(name.to_owned(), factory);
        self
    }

    pub fn contains(&self, name: &str) -> bool {
        self.factories.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.factories.keys().map(String::as_str)
    }

    pub fn build(&self, name: &str, params: &P) -> Result<Box<T>> {
        match self.factories.get(name) {
            Some(factory) => factory(params),
            None => Err(Error::UnknownStrategy {
                kind: self.kind,
                name: name.to_owned(),
                known: self.names().collect::<Vec<_>>().join(", "),
            }),
        }
    }
}
