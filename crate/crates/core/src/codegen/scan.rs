//! Convention scanner.
//!
//! Inside a `@LayeredClass`, a method `M` is a partial iff exactly one mapped
//! local name `L` splits it as `M = B + L` where `B` is another method of the
//! same class. `B` is then a base method. Everything else is an ordinary
//! method and is left to normal dispatch.

use std::collections::{BTreeMap, BTreeSet};

use super::diag::{Code, Diagnostic, ScanError};
use super::manifest::{LayerMapping, LayeredClass, Manifest, PartialDecl};
use super::parser::{parse, ClassDecl, MappingDecl, MethodAst, Unit};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Role<'a> {
    Plain,
    Partial { base: &'a str, layer: &'a str },
    Ambiguous,
}

/// Every `(base, local)` split of `name` where `local` is mapped and `base`
/// names a method of the class.
fn decompositions<'a>(name: &'a str, mappings: &'a [MappingDecl], methods: &[MethodAst]) -> Vec<(&'a str, &'a str)> {
    mappings
        .iter()
        .filter_map(|m| {
            let base = name.strip_suffix(m.local_name.as_str())?;
            (!base.is_empty() && methods.iter().any(|o| o.decl.name == base)).then_some((base, m.local_name.as_str()))
        })
        .collect()
}

fn scan_class(class: &ClassDecl, mappings: &[MappingDecl], diags: &mut Vec<Diagnostic>) -> LayeredClass {
    let mut seen = BTreeSet::new();
    for m in mappings {
        if !seen.insert(&m.local_name) {
            diags.push(Diagnostic::new(
                m.line,
                Code::DuplicateMapping,
                format!(
                    "layer local name {} is mapped more than once in {}",
                    m.local_name, class.name
                ),
            ));
        }
    }

    for method in &class.methods {
        let mut names = BTreeSet::new();
        for p in &method.decl.params {
            if !names.insert(&p.name) {
                diags.push(Diagnostic::new(
                    method.line,
                    Code::DuplicateParam,
                    format!(
                        "parameter {} is declared more than once in {}",
                        p.name, method.decl.name
                    ),
                ));
            }
        }
    }

    let roles: Vec<Role> = class
        .methods
        .iter()
        .map(|method| {
            let cands = decompositions(&method.decl.name, mappings, &class.methods);
            match cands.as_slice() {
                [] => Role::Plain,
                [(base, layer)] => Role::Partial { base, layer },
                _ => {
                    let listed: Vec<String> = cands.iter().map(|(b, l)| format!("{b} + {l}")).collect();
                    diags.push(Diagnostic::new(
                        method.line,
                        Code::SuffixAmbiguity,
                        format!(
                            "method {} matches more than one layer suffix: {}",
                            method.decl.name,
                            listed.join(", ")
                        ),
                    ));
                    Role::Ambiguous
                }
            }
        })
        .collect();

    let partial_names: BTreeSet<&str> = class
        .methods
        .iter()
        .zip(&roles)
        .filter(|(_, r)| matches!(r, Role::Partial { .. }))
        .map(|(m, _)| m.decl.name.as_str())
        .collect();
    let base_names: BTreeSet<&str> = roles
        .iter()
        .filter_map(|r| match r {
            Role::Partial { base, .. } => Some(*base),
            _ => None,
        })
        .collect();

    // first declaration of each base; later ones are duplicates
    let mut bases: BTreeMap<&str, &MethodAst> = BTreeMap::new();
    let mut base_methods = Vec::new();
    for (method, role) in class.methods.iter().zip(&roles) {
        let name = method.decl.name.as_str();
        if *role != Role::Plain || !base_names.contains(name) {
            continue;
        }
        if bases.contains_key(name) {
            diags.push(Diagnostic::new(
                method.line,
                Code::DuplicateBase,
                format!("base method {name} is declared more than once in {}", class.name),
            ));
        } else {
            bases.insert(name, method);
            base_methods.push(method.decl.clone());
        }
    }

    let mut pairs = BTreeSet::new();
    let mut partials = Vec::new();
    for (method, role) in class.methods.iter().zip(&roles) {
        let Role::Partial { base, layer } = *role else {
            continue;
        };
        let name = &method.decl.name;
        if partial_names.contains(base) {
            diags.push(Diagnostic::new(
                method.line,
                Code::NestedPartial,
                format!("partial {name} refines {base}, which is itself a partial"),
            ));
            continue;
        }
        if !pairs.insert((base, layer)) {
            diags.push(Diagnostic::new(
                method.line,
                Code::DuplicatePartial,
                format!("duplicate partial {name} for base {base} in layer {layer}"),
            ));
            continue;
        }
        // an ambiguous base has already been reported
        let Some(base_decl) = bases.get(base).map(|b| &b.decl) else {
            continue;
        };
        if !base_decl.same_signature(&method.decl) {
            diags.push(Diagnostic::new(
                method.line,
                Code::SignatureMismatch,
                format!(
                    "partial {name} {} does not match base {base} {}",
                    method.decl.signature(),
                    base_decl.signature()
                ),
            ));
            continue;
        }
        partials.push(PartialDecl {
            base_name: base.to_owned(),
            layer_local_name: layer.to_owned(),
            decl: method.decl.clone(),
        });
    }

    LayeredClass {
        class_name: class.name.clone(),
        mappings: mappings
            .iter()
            .map(|m| LayerMapping {
                local_name: m.local_name.clone(),
                qualified_name: m.qualified_name.clone(),
            })
            .collect(),
        base_methods,
        partials,
    }
}

/// Builds the manifest for a parsed unit. Classes without the marker are
/// skipped.
pub fn scan_unit(unit: &Unit) -> Result<Manifest, ScanError> {
    let mut diags = Vec::new();
    let mut manifest = Manifest::default();
    let mut layers = BTreeSet::new();
    let mut add_layer = |name: &str, out: &mut Vec<String>| {
        if layers.insert(name.to_owned()) {
            out.push(name.to_owned());
        }
    };
    for decl in &unit.layers {
        add_layer(&decl.qualified_name, &mut manifest.layers);
    }
    for class in &unit.classes {
        let Some(mappings) = &class.mappings else {
            continue;
        };
        for m in mappings {
            add_layer(&m.qualified_name, &mut manifest.layers);
        }
        manifest.classes.push(scan_class(class, mappings, &mut diags));
    }
    if diags.is_empty() {
        Ok(manifest)
    } else {
        diags.sort_by_key(|d| d.line);
        Err(ScanError(diags))
    }
}

pub fn scan(src: &str) -> Result<Manifest, ScanError> {
    let unit = parse(src).map_err(|d| ScanError(vec![d]))?;
    scan_unit(&unit)
}
