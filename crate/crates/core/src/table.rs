//! Dispatch table: base and partial implementations per layered method.
//!
//! Building is two-phase. A [`TableBuilder`] accepts registrations and is
//! consumed by [`TableBuilder::finalize`], which checks for orphan partials
//! and yields an immutable [`DispatchTable`]. There is no way to register
//! into a finalized table:
//!
//! ```compile_fail
//! use layerctx::{MethodKey, TableBuilder};
//!
//! let mut builder = TableBuilder::new();
//! builder.register_base(MethodKey::new("C", "m"), |_: &mut (), x: i32| x).unwrap();
//! let table = builder.finalize().unwrap();
//! builder.register_base(MethodKey::new("C", "m"), |_: &mut (), x: i32| x);
//! ```
//!
//! Signatures are carried in the type system. A method is identified by its
//! [`MethodKey`] plus the triple `(receiver, arguments, output)`; a partial
//! whose types differ from its base is rejected when it is registered.

use std::any::{type_name, Any};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::ctx::ContextStack;
use crate::dispatch::{self, ChainBuf, DispatchChain, Method, Proceed};
use crate::layer::LayerId;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MethodKey {
    class_name: String,
    method_name: String,
}

impl MethodKey {
    /// # Panics
    ///
    /// If either name is empty.
    pub fn new(class_name: impl Into<String>, method_name: impl Into<String>) -> Self {
        let (class_name, method_name) = (class_name.into(), method_name.into());
        assert!(
            !class_name.is_empty() && !method_name.is_empty(),
            "method key parts must be nonempty"
        );
        MethodKey {
            class_name,
            method_name,
        }
    }

    pub fn class_name(&self) -> &str {
        &self.class_name
    }

    pub fn method_name(&self) -> &str {
        &self.method_name
    }
}

impl fmt::Display for MethodKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.class_name, self.method_name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("duplicate base implementation for {0}")]
    DuplicateBase(MethodKey),
    #[error("duplicate partial for {key} in layer {layer}")]
    DuplicatePartial { key: MethodKey, layer: String },
    #[error("partial registered for {0} but no base implementation exists")]
    OrphanPartial(MethodKey),
    #[error("signature mismatch for {key}: registered as {expected}, got {found}")]
    SignatureMismatch {
        key: MethodKey,
        expected: &'static str,
        found: &'static str,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DispatchError {
    #[error("no base implementation registered for {0}")]
    NoBase(MethodKey),
    #[error("{key} is registered as {registered}, requested as {requested}")]
    SignatureMismatch {
        key: MethodKey,
        registered: &'static str,
        requested: &'static str,
    },
}

pub type BaseFn<R, A, O> = Box<dyn Fn(&mut R, A) -> O + Send + Sync>;
pub type PartialFn<R, A, O> = Box<dyn Fn(&mut R, A, Proceed<'_, R, A, O>) -> O + Send + Sync>;

fn signature_of<R, A, O>() -> &'static str {
    type_name::<fn(&mut R, A) -> O>()
}

pub(crate) struct Entry<R, A, O> {
    key: MethodKey,
    base: Option<BaseFn<R, A, O>>,
    // indexed by layer ordinal
    partials: Vec<Option<PartialFn<R, A, O>>>,
    layers: Vec<LayerId>,
}

impl<R: 'static, A: 'static, O: 'static> Entry<R, A, O> {
    fn new(key: MethodKey) -> Self {
        Entry {
            key,
            base: None,
            partials: Vec::new(),
            layers: Vec::new(),
        }
    }

    pub(crate) fn chain(&self, effective: &[LayerId]) -> DispatchChain<'_, R, A, O> {
        let mut partials = ChainBuf::new();
        let base = self.fill_chain(effective, &mut partials);
        DispatchChain::new(partials, base)
    }

    /// Appends the partials for `effective` to `out` in execution order and
    /// returns the base. Lets the hot path build the chain in place.
    #[inline]
    pub(crate) fn fill_chain<'t>(
        &'t self,
        effective: &[LayerId],
        out: &mut ChainBuf<'t, R, A, O>,
    ) -> &'t BaseFn<R, A, O> {
        for layer in effective.iter().rev() {
            if let Some(Some(f)) = self.partials.get(layer.ordinal()) {
                out.push((*layer, f));
            }
        }
        self.base.as_ref().expect("finalized entries have a base")
    }
}

trait ErasedEntry: Send + Sync {
    fn key(&self) -> &MethodKey;
    fn has_base(&self) -> bool;
    fn partial_layers(&self) -> &[LayerId];
    fn signature(&self) -> &'static str;
    fn as_any(&self) -> &dyn Any;
    fn as_any_mut(&mut self) -> &mut dyn Any;
    fn into_any(self: Arc<Self>) -> Arc<dyn Any + Send + Sync>;
}

impl<R: 'static, A: 'static, O: 'static> ErasedEntry for Entry<R, A, O> {
    fn key(&self) -> &MethodKey {
        &self.key
    }

    fn has_base(&self) -> bool {
        self.base.is_some()
    }

    fn partial_layers(&self) -> &[LayerId] {
        &self.layers
    }

    fn signature(&self) -> &'static str {
        signature_of::<R, A, O>()
    }

    fn as_any(&self) -> &dyn Any {
        self
    }

    fn as_any_mut(&mut self) -> &mut dyn Any {
        self
    }

    fn into_any(self: Arc<Self>) -> Arc<dyn Any + Send + Sync> {
        self
    }
}

/// Mutable registration phase of a [`DispatchTable`].
#[derive(Default)]
pub struct TableBuilder {
    entries: BTreeMap<MethodKey, Box<dyn ErasedEntry>>,
}

impl TableBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn entry_mut<R: 'static, A: 'static, O: 'static>(
        &mut self,
        key: MethodKey,
    ) -> Result<&mut Entry<R, A, O>, TableError> {
        let slot = self
            .entries
            .entry(key.clone())
            .or_insert_with(|| Box::new(Entry::<R, A, O>::new(key.clone())));
        let expected = slot.signature();
        slot.as_any_mut()
            .downcast_mut::<Entry<R, A, O>>()
            .ok_or_else(|| TableError::SignatureMismatch {
                key,
                expected,
                found: signature_of::<R, A, O>(),
            })
    }

    pub fn register_base<R, A, O, F>(&mut self, key: MethodKey, base: F) -> Result<(), TableError>
    where
        R: 'static,
        A: 'static,
        O: 'static,
        F: Fn(&mut R, A) -> O + Send + Sync + 'static,
    {
        let entry = self.entry_mut::<R, A, O>(key)?;
        if entry.base.is_some() {
            return Err(TableError::DuplicateBase(entry.key.clone()));
        }
        entry.base = Some(Box::new(base));
        Ok(())
    }

    pub fn register_partial<R, A, O, F>(&mut self, key: MethodKey, layer: LayerId, partial: F) -> Result<(), TableError>
    where
        R: 'static,
        A: 'static,
        O: 'static,
        F: Fn(&mut R, A, Proceed<'_, R, A, O>) -> O + Send + Sync + 'static,
    {
        let entry = self.entry_mut::<R, A, O>(key)?;
        let slot = layer.ordinal();
        if entry.partials.len() <= slot {
            entry.partials.resize_with(slot + 1, || None);
        }
        if entry.partials[slot].is_some() {
            return Err(TableError::DuplicatePartial {
                key: entry.key.clone(),
                layer: layer.qualified_name().to_owned(),
            });
        }
        entry.partials[slot] = Some(Box::new(partial));
        entry.layers.push(layer);
        Ok(())
    }

    /// Freezes the table. Fails on the first key (in key order) that has
    /// partials but no base.
    pub fn finalize(self) -> Result<DispatchTable, TableError> {
        if let Some(orphan) = self.entries.values().find(|e| !e.has_base()) {
            return Err(TableError::OrphanPartial(orphan.key().clone()));
        }
        let entries = self
            .entries
            .into_iter()
            .map(|(k, v)| (k, Arc::<dyn ErasedEntry>::from(v)))
            .collect();
        Ok(DispatchTable { entries })
    }
}

/// Immutable, shareable map from method keys to their implementations.
pub struct DispatchTable {
    entries: BTreeMap<MethodKey, Arc<dyn ErasedEntry>>,
}

impl DispatchTable {
    fn lookup(&self, key: &MethodKey) -> Result<&Arc<dyn ErasedEntry>, DispatchError> {
        dispatch::note_lookup();
        self.entries.get(key).ok_or_else(|| DispatchError::NoBase(key.clone()))
    }

    fn mismatch<R, A, O>(key: &MethodKey, entry: &dyn ErasedEntry) -> DispatchError {
        DispatchError::SignatureMismatch {
            key: key.clone(),
            registered: entry.signature(),
            requested: signature_of::<R, A, O>(),
        }
    }

    fn typed<R: 'static, A: 'static, O: 'static>(&self, key: &MethodKey) -> Result<&Entry<R, A, O>, DispatchError> {
        let entry = self.lookup(key)?;
        entry
            .as_any()
            .downcast_ref()
            .ok_or_else(|| Self::mismatch::<R, A, O>(key, entry.as_ref()))
    }

    /// Resolves `key` once into a typed handle that can be called repeatedly.
    pub fn method<R: 'static, A: 'static, O: 'static>(
        &self,
        key: &MethodKey,
    ) -> Result<Method<R, A, O>, DispatchError> {
        let entry = self.lookup(key)?;
        let erased = Arc::clone(entry).into_any();
        match erased.downcast::<Entry<R, A, O>>() {
            Ok(entry) => Ok(Method::new(entry)),
            Err(_) => Err(Self::mismatch::<R, A, O>(key, entry.as_ref())),
        }
    }

    /// Partials of the layers in `effective` that refine `key`, most recently
    /// activated first, followed by the base.
    pub fn build_chain<R: 'static, A: 'static, O: 'static>(
        &self,
        key: &MethodKey,
        effective: &[LayerId],
    ) -> Result<DispatchChain<'_, R, A, O>, DispatchError> {
        Ok(self.typed::<R, A, O>(key)?.chain(effective))
    }

    /// Dispatches `key` against an explicit context stack.
    pub fn dispatch<R: 'static, A: 'static, O: 'static>(
        &self,
        key: &MethodKey,
        stack: &ContextStack,
        receiver: &mut R,
        args: A,
    ) -> Result<O, DispatchError> {
        let chain = self.build_chain::<R, A, O>(key, stack.effective())?;
        Ok(chain.invoke(receiver, args))
    }

    pub fn contains(&self, key: &MethodKey) -> bool {
        self.entries.contains_key(key)
    }

    /// Layers that define a partial for `key`, in registration order.
    pub fn partial_layers(&self, key: &MethodKey) -> Option<&[LayerId]> {
        self.entries.get(key).map(|e| e.partial_layers())
    }

    pub fn keys(&self) -> impl Iterator<Item = &MethodKey> {
        self.entries.keys()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl fmt::Debug for DispatchTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.entries.iter().map(|(k, e)| (k, e.partial_layers())))
            .finish()
    }
}
