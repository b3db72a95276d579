//! Layer identity.
//!
//! Layers are singletons: interning a qualified name always hands back the
//! same [`LayerId`]. Ids are `Copy` and compare by ordinal, so they can be used
//! directly as indices into per-method partial tables.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayerError {
    #[error("invalid layer name {0:?}: must be nonempty and contain no whitespace")]
    InvalidName(String),
}

/// Interned identity of a layer.
#[derive(Clone, Copy)]
pub struct LayerId {
    ordinal: u32,
    name: &'static str,
}

impl LayerId {
    pub fn qualified_name(&self) -> &'static str {
        self.name
    }

    /// Small dense integer assigned at interning, starting at 0.
    pub fn ordinal(&self) -> usize {
        self.ordinal as usize
    }
}

impl PartialEq for LayerId {
    fn eq(&self, other: &Self) -> bool {
        self.ordinal == other.ordinal
    }
}

impl Eq for LayerId {}

impl std::hash::Hash for LayerId {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.ordinal.hash(state);
    }
}

impl PartialOrd for LayerId {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LayerId {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.ordinal.cmp(&other.ordinal)
    }
}

impl fmt::Debug for LayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LayerId({}#{})", self.name, self.ordinal)
    }
}

impl fmt::Display for LayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name)
    }
}

#[derive(Default)]
struct Registry {
    by_name: HashMap<&'static str, LayerId>,
    names: Vec<&'static str>,
}

fn registry() -> &'static Mutex<Registry> {
    static REGISTRY: OnceLock<Mutex<Registry>> = OnceLock::new();
    REGISTRY.get_or_init(Default::default)
}

pub(crate) fn validate_layer_name(name: &str) -> bool {
    !name.is_empty() && !name.chars().any(char::is_whitespace)
}

/// Interns `qualified_name` in the process-wide layer registry.
///
/// Registering the same name again returns the identical id. Names are
/// leaked on first registration; the set of layers in a program is finite.
pub fn register_layer(qualified_name: &str) -> Result<LayerId, LayerError> {
    if !validate_layer_name(qualified_name) {
        return Err(LayerError::InvalidName(qualified_name.to_owned()));
    }
    let mut reg = registry().lock().unwrap_or_else(|e| e.into_inner());
    if let Some(id) = reg.by_name.get(qualified_name) {
        return Ok(*id);
    }
    let name: &'static str = Box::leak(qualified_name.to_owned().into_boxed_str());
    let id = LayerId {
        ordinal: u32::try_from(reg.names.len()).expect("layer registry overflow"),
        name,
    };
    reg.names.push(name);
    reg.by_name.insert(name, id);
    Ok(id)
}

/// Looks up an already-interned layer without registering it.
pub fn lookup_layer(qualified_name: &str) -> Option<LayerId> {
    let reg = registry().lock().unwrap_or_else(|e| e.into_inner());
    reg.by_name.get(qualified_name).copied()
}
