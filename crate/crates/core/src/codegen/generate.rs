//! Shim generation: one layer declaration per layer and one registration shim
//! per layered class. Inputs are never touched; everything produced is a new
//! file keyed by its path relative to the output directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::lexer::join_tokens;
use super::manifest::{LayeredClass, Manifest, MethodDecl};
use super::rewrite::rewrite_proceed;
use super::template::{Binding, Template, TemplateError};

pub const LAYER_DECL: &str = "layer-decl";
pub const REGISTRATION_SHIM: &str = "registration-shim";
pub const TEMPLATE_EXT: &str = "tmpl";

const BUILTIN: &[(&str, &str)] = &[
    (LAYER_DECL, include_str!("../../templates/layer-decl.tmpl")),
    (
        REGISTRATION_SHIM,
        include_str!("../../templates/registration-shim.tmpl"),
    ),
];

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("missing template `{0}`")]
    MissingTemplate(String),
    #[error("template `{name}`: {source}")]
    Template {
        name: String,
        #[source]
        source: TemplateError,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Default)]
pub struct TemplateSet {
    templates: BTreeMap<String, Template>,
}

impl TemplateSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// The templates shipped with the crate.
    pub fn builtin() -> Self {
        let mut set = TemplateSet::new();
        for (name, text) in BUILTIN {
            set.insert(name, text).expect("builtin templates parse");
        }
        set
    }

    /// Loads `layer-decl.tmpl` and `registration-shim.tmpl` from `dir`.
    pub fn from_dir(dir: &Path) -> Result<Self, GenerateError> {
        let mut set = TemplateSet::new();
        for name in [LAYER_DECL, REGISTRATION_SHIM] {
            let path = dir.join(format!("{name}.{TEMPLATE_EXT}"));
            let text = match std::fs::read_to_string(&path) {
                Ok(t) => t,
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                    return Err(GenerateError::MissingTemplate(name.to_owned()))
                }
                Err(source) => return Err(GenerateError::Io { path, source }),
            };
            set.insert(name, &text)?;
        }
        Ok(set)
    }

    pub fn insert(&mut self, name: &str, text: &str) -> Result<(), GenerateError> {
        let template = Template::parse(text).map_err(|source| GenerateError::Template {
            name: name.to_owned(),
            source,
        })?;
        self.templates.insert(name.to_owned(), template);
        Ok(())
    }

    fn get(&self, name: &str) -> Result<&Template, GenerateError> {
        self.templates
            .get(name)
            .ok_or_else(|| GenerateError::MissingTemplate(name.to_owned()))
    }

    fn render(&self, name: &str, binding: &Binding) -> Result<String, GenerateError> {
        self.get(name)?
            .render(binding)
            .map_err(|source| GenerateError::Template {
                name: name.to_owned(),
                source,
            })
    }
}

fn param_list(decl: &MethodDecl) -> String {
    decl.params
        .iter()
        .map(|p| format!("{}: {}", p.name, p.type_name))
        .collect::<Vec<_>>()
        .join(", ")
}

fn arg_list(decl: &MethodDecl) -> String {
    decl.params
        .iter()
        .map(|p| p.name.as_str())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Binding for a layered class's registration shim.
///
/// Base bodies are deliberately absent: editing one must not change the shim.
pub fn class_binding(class: &LayeredClass) -> Binding {
    let mappings = class.mappings.iter().map(|m| {
        Binding::map([
            ("local", Binding::str(&m.local_name)),
            ("qualified", Binding::str(&m.qualified_name)),
        ])
    });
    let bases = class.base_methods.iter().map(|b| {
        Binding::map([
            ("name", Binding::str(&b.name)),
            ("param_list", Binding::str(param_list(b))),
            ("arg_list", Binding::str(arg_list(b))),
            ("return_type", Binding::str(&b.return_type)),
        ])
    });
    let partials = class.partials.iter().map(|p| {
        let qualified = class
            .mapping(&p.layer_local_name)
            .map(|m| m.qualified_name.as_str())
            .unwrap_or_default();
        let body = rewrite_proceed(&p.decl.body, &p.base_name);
        Binding::map([
            ("method_name", Binding::str(&p.decl.name)),
            ("base_name", Binding::str(&p.base_name)),
            ("layer_local", Binding::str(&p.layer_local_name)),
            ("layer_qualified", Binding::str(qualified)),
            ("param_list", Binding::str(param_list(&p.decl))),
            ("arg_list", Binding::str(arg_list(&p.decl))),
            ("return_type", Binding::str(&p.decl.return_type)),
            ("body", Binding::str(join_tokens(&body))),
        ])
    });
    Binding::map([
        ("class_name", Binding::str(&class.class_name)),
        ("mappings", Binding::list(mappings)),
        ("bases", Binding::list(bases)),
        ("partials", Binding::list(partials)),
    ])
}

pub fn layer_path(qualified_name: &str) -> String {
    format!("layers/{qualified_name}.lctx")
}

pub fn shim_path(class_name: &str) -> String {
    format!("shims/{class_name}.shim")
}

/// Renders every output file for `manifest`, keyed by relative path.
pub fn generate(manifest: &Manifest, templates: &TemplateSet) -> Result<BTreeMap<String, String>, GenerateError> {
    templates.get(LAYER_DECL)?;
    templates.get(REGISTRATION_SHIM)?;
    let mut out = BTreeMap::new();
    for layer in &manifest.layers {
        let binding = Binding::map([("qualified_name", Binding::str(layer))]);
        out.insert(layer_path(layer), templates.render(LAYER_DECL, &binding)?);
    }
    for class in &manifest.classes {
        out.insert(
            shim_path(&class.class_name),
            templates.render(REGISTRATION_SHIM, &class_binding(class))?,
        );
    }
    Ok(out)
}
