//! Scanner output: the layered classes of a program and their layers.
//!
//! The JSON form is `{"layers": [...], "classes": [...]}` with fields in
//! declaration order and arrays in source order.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::diag::{Code, Diagnostic};
use super::lexer::Token;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerMapping {
    #[serde(rename = "local")]
    pub local_name: String,
    #[serde(rename = "qualified")]
    pub qualified_name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Param {
    pub name: String,
    #[serde(rename = "type")]
    pub type_name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodDecl {
    pub name: String,
    pub params: Vec<Param>,
    pub return_type: String,
    pub body: Vec<Token>,
}

impl MethodDecl {
    pub fn param_types(&self) -> impl Iterator<Item = &str> {
        self.params.iter().map(|p| p.type_name.as_str())
    }

    /// `(T1, T2) -> R`
    pub fn signature(&self) -> String {
        format!(
            "({}) -> {}",
            self.param_types().collect::<Vec<_>>().join(", "),
            self.return_type
        )
    }

    pub fn same_signature(&self, other: &MethodDecl) -> bool {
        self.return_type == other.return_type && self.param_types().eq(other.param_types())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialDecl {
    pub base_name: String,
    pub layer_local_name: String,
    pub decl: MethodDecl,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayeredClass {
    pub class_name: String,
    pub mappings: Vec<LayerMapping>,
    pub base_methods: Vec<MethodDecl>,
    pub partials: Vec<PartialDecl>,
}

impl LayeredClass {
    pub fn mapping(&self, local_name: &str) -> Option<&LayerMapping> {
        self.mappings.iter().find(|m| m.local_name == local_name)
    }

    pub fn base(&self, name: &str) -> Option<&MethodDecl> {
        self.base_methods.iter().find(|m| m.name == name)
    }

    pub fn partials_of<'a>(&'a self, base: &'a str) -> impl Iterator<Item = &'a PartialDecl> + 'a {
        self.partials.iter().filter(move |p| p.base_name == base)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub layers: Vec<String>,
    pub classes: Vec<LayeredClass>,
}

impl Manifest {
    pub fn is_empty(&self) -> bool {
        self.layers.is_empty() && self.classes.is_empty()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Concatenates the manifests of several units. Layer lists are unioned in
    /// first-seen order; a class name defined by two units is an error.
    pub fn merge(parts: impl IntoIterator<Item = Manifest>) -> Result<Manifest, Diagnostic> {
        let mut out = Manifest::default();
        let mut seen_layers = BTreeSet::new();
        let mut seen_classes = BTreeSet::new();
        for part in parts {
            for layer in part.layers {
                if seen_layers.insert(layer.clone()) {
                    out.layers.push(layer);
                }
            }
            for class in part.classes {
                if !seen_classes.insert(class.class_name.clone()) {
                    return Err(Diagnostic::new(
                        0,
                        Code::DuplicateClass,
                        format!("layered class {} is defined in more than one unit", class.class_name),
                    ));
                }
                out.classes.push(class);
            }
        }
        Ok(out)
    }

    /// Re-checks the structural invariants from the manifest alone: every
    /// partial names a mapped layer and an existing base with the same
    /// signature, and no (base, layer) pair repeats.
    pub fn validate(&self) -> Result<(), String> {
        for class in &self.classes {
            let mut pairs = BTreeSet::new();
            for p in &class.partials {
                if class.mapping(&p.layer_local_name).is_none() {
                    return Err(format!("{}: unmapped layer {}", class.class_name, p.layer_local_name));
                }
                let base = class
                    .base(&p.base_name)
                    .ok_or_else(|| format!("{}: no base {}", class.class_name, p.base_name))?;
                if !base.same_signature(&p.decl) {
                    return Err(format!("{}: signature of {}", class.class_name, p.decl.name));
                }
                if p.decl.name != format!("{}{}", p.base_name, p.layer_local_name) {
                    return Err(format!("{}: misnamed partial {}", class.class_name, p.decl.name));
                }
                if !pairs.insert((&p.base_name, &p.layer_local_name)) {
                    return Err(format!("{}: duplicate partial {}", class.class_name, p.decl.name));
                }
            }
        }
        Ok(())
    }
}
