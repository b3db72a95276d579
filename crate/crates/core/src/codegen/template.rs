//! Placeholder templates.
//!
//! Three constructs, nothing else:
//!
//! * `{{path}}` substitutes a string from the binding. `path` is a dotted
//!   name; the first segment is looked up in the innermost enclosing scope
//!   that has it. `{{this}}` is the current scope itself.
//! * `{{#each path}}...{{/each}}` repeats its body once per list element,
//!   with the element as the new innermost scope.
//! * `\{{` emits a literal `{{`.
//!
//! All other text is copied verbatim.

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemplateError {
    #[error("unresolved placeholder `{0}`")]
    UnresolvedPlaceholder(String),
    #[error("unbalanced block: {0}")]
    UnbalancedBlock(String),
    #[error("`{0}` is not a list")]
    NotAList(String),
    #[error("`{0}` is not a string")]
    NotAString(String),
    #[error("malformed tag `{{{{{0}}}}}`")]
    MalformedTag(String),
}

/// Value tree a template is rendered against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Binding {
    Str(String),
    List(Vec<Binding>),
    Map(BTreeMap<String, Binding>),
}

impl Binding {
    pub fn map<K: Into<String>>(entries: impl IntoIterator<Item = (K, Binding)>) -> Self {
        Binding::Map(entries.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    pub fn str(s: impl Into<String>) -> Self {
        Binding::Str(s.into())
    }

    pub fn list(items: impl IntoIterator<Item = Binding>) -> Self {
        Binding::List(items.into_iter().collect())
    }

    fn get(&self, segment: &str) -> Option<&Binding> {
        match self {
            Binding::Map(m) => m.get(segment),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Node {
    Text(String),
    Var(String),
    Each { path: String, body: Vec<Node> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    nodes: Vec<Node>,
}

fn valid_path(path: &str) -> bool {
    !path.is_empty()
        && path
            .split('.')
            .all(|seg| !seg.is_empty() && seg.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-'))
}

impl Template {
    pub fn parse(text: &str) -> Result<Self, TemplateError> {
        // stack of (open path, nodes collected so far)
        let mut stack: Vec<(Option<String>, Vec<Node>)> = vec![(None, Vec::new())];
        let mut literal = String::new();
        let mut rest = text;
        let flush = |literal: &mut String, nodes: &mut Vec<Node>| {
            if !literal.is_empty() {
                nodes.push(Node::Text(std::mem::take(literal)));
            }
        };
        while !rest.is_empty() {
            if let Some(after) = rest.strip_prefix("\\{{") {
                literal.push_str("{{");
                rest = after;
                continue;
            }
            let Some(after_open) = rest.strip_prefix("{{") else {
                let next = rest
                    .find(['{', '\\'])
                    .map(|i| if i == 0 { 1 } else { i })
                    .unwrap_or(rest.len());
                literal.push_str(&rest[..next]);
                rest = &rest[next..];
                continue;
            };
            let close = after_open
                .find("}}")
                .ok_or_else(|| TemplateError::MalformedTag(after_open.chars().take(20).collect()))?;
            let tag = after_open[..close].trim();
            rest = &after_open[close + 2..];
            let nodes = &mut stack.last_mut().expect("root frame").1;
            flush(&mut literal, nodes);
            if let Some(path) = tag.strip_prefix("#each") {
                let path = path.trim();
                if !valid_path(path) {
                    return Err(TemplateError::MalformedTag(tag.to_owned()));
                }
                stack.push((Some(path.to_owned()), Vec::new()));
            } else if tag == "/each" {
                let (path, body) = stack.pop().expect("root frame");
                let Some(path) = path else {
                    return Err(TemplateError::UnbalancedBlock("`{{/each}}` without `{{#each}}`".into()));
                };
                stack.last_mut().expect("root frame").1.push(Node::Each { path, body });
            } else if valid_path(tag) {
                nodes.push(Node::Var(tag.to_owned()));
            } else {
                return Err(TemplateError::MalformedTag(tag.to_owned()));
            }
        }
        let (open, mut nodes) = stack.pop().expect("root frame");
        if let Some(path) = open {
            return Err(TemplateError::UnbalancedBlock(format!(
                "`{{{{#each {path}}}}}` is never closed"
            )));
        }
        flush(&mut literal, &mut nodes);
        Ok(Template { nodes })
    }

    pub fn render(&self, binding: &Binding) -> Result<String, TemplateError> {
        let mut out = String::new();
        render_nodes(&self.nodes, &mut vec![binding], &mut out)?;
        Ok(out)
    }
}

fn resolve<'b>(path: &str, scopes: &[&'b Binding]) -> Result<&'b Binding, TemplateError> {
    let unresolved = || TemplateError::UnresolvedPlaceholder(path.to_owned());
    if path == "this" {
        return Ok(scopes.last().expect("root scope"));
    }
    let mut segments = path.split('.');
    let first = segments.next().ok_or_else(unresolved)?;
    let mut value = scopes.iter().rev().find_map(|s| s.get(first)).ok_or_else(unresolved)?;
    for seg in segments {
        value = value.get(seg).ok_or_else(unresolved)?;
    }
    Ok(value)
}

fn render_nodes(nodes: &[Node], scopes: &mut Vec<&Binding>, out: &mut String) -> Result<(), TemplateError> {
    for node in nodes {
        match node {
            Node::Text(t) => out.push_str(t),
            Node::Var(path) => match resolve(path, scopes)? {
                Binding::Str(s) => out.push_str(s),
                _ => return Err(TemplateError::NotAString(path.clone())),
            },
            Node::Each { path, body } => {
                let Binding::List(items) = resolve(path, scopes)? else {
                    return Err(TemplateError::NotAList(path.clone()));
                };
                for item in items {
                    scopes.push(item);
                    let r = render_nodes(body, scopes, out);
                    scopes.pop();
                    r?;
                }
            }
        }
    }
    Ok(())
}

/// Parses and renders in one step.
pub fn render(template: &str, binding: &Binding) -> Result<String, TemplateError> {
    Template::parse(template)?.render(binding)
}
