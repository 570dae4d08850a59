use thiserror::Error;

use super::expr::{lookup_head, Expr, PathError};
use super::DataValue;

/// A parsed template. Retains its source text; rendering walks the parsed
/// node tree.
///
/// Syntax:
/// - `{{path}}` substitutes the scalar at a dotted key path.
/// - `{{#path}}...{{/path}}` renders the body once per element of the list
///   at `path`, with the element as the nearest context.
/// - `#{expr}` evaluates a layer-2 expression (see [`Expr`]).
/// - `\{{` and `\#{` escape to literal `{{` / `#{`.
/// - Everything else, including stray `}}` and `}`, is literal text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Template {
    source: String,
    nodes: Vec<Node>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Node {
    Literal(String),
    Placeholder(KeyPath),
    Section { path: KeyPath, body: Vec<Node> },
    Expr(Expr),
}

/// A dotted layer-1 key path like `root.entities`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct KeyPath {
    source: String,
    segments: Vec<String>,
}

impl KeyPath {
    fn parse(source: &str) -> Option<KeyPath> {
        let source = source.trim();
        if source.is_empty() {
            return None;
        }
        let segments: Vec<String> = source.split('.').map(str::to_string).collect();
        let ident = |s: &str| {
            let mut chars = s.chars();
            chars
                .next()
                .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        };
        if segments.iter().all(|s| ident(s)) {
            Some(KeyPath {
                source: source.to_string(),
                segments,
            })
        } else {
            None
        }
    }
}

/// Template text failed to parse.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("ill-formed template at offset {at}: {reason}")]
pub struct TemplateError {
    pub at: usize,
    pub reason: String,
}

/// Rendering failed.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum RenderError {
    #[error("path `{path}`: {source}")]
    Path {
        path: String,
        #[source]
        source: PathError,
    },
    #[error("placeholder `{path}` resolved to a non-scalar {found} value")]
    NonScalarSubstitution { path: String, found: &'static str },
    #[error("section `{path}` did not resolve to a list (found {found})")]
    SectionNotAList { path: String, found: &'static str },
}

/// Context stack for rendering: innermost context last. Head identifiers
/// resolve in the nearest context that defines them (lexical fallback);
/// every later step is strict.
#[derive(Clone, Debug)]
pub struct RenderContext<'a> {
    stack: Vec<&'a DataValue>,
}

impl<'a> RenderContext<'a> {
    pub fn new(root: &'a DataValue) -> Self {
        RenderContext { stack: vec![root] }
    }

    pub fn pushed(&self, value: &'a DataValue) -> Self {
        let mut stack = self.stack.clone();
        stack.push(value);
        RenderContext { stack }
    }

    /// Resolve a head identifier against the stack, innermost first.
    fn resolve_head(&self, head: &str) -> Result<&'a DataValue, PathError> {
        for ctx in self.stack.iter().rev() {
            if let Ok(found) = lookup_head(ctx, head) {
                return Ok(found);
            }
        }
        Err(PathError::UnresolvedHead {
            step: head.to_string(),
        })
    }
}

impl Template {
    /// Parse template text, validating placeholder shape and section balance.
    pub fn parse(source: &str) -> Result<Template, TemplateError> {
        let bytes = source.as_bytes();
        let err = |at: usize, reason: String| TemplateError { at, reason };

        // Stack of (path, body) for open sections; index 0 is the root body.
        let mut stack: Vec<(Option<(KeyPath, usize)>, Vec<Node>)> = vec![(None, Vec::new())];
        let mut literal = String::new();
        let mut at = 0usize;

        macro_rules! flush_literal {
            () => {
                if !literal.is_empty() {
                    stack
                        .last_mut()
                        .expect("stack non-empty")
                        .1
                        .push(Node::Literal(std::mem::take(&mut literal)));
                }
            };
        }

        while at < bytes.len() {
            if bytes[at] == b'\\' {
                if source[at + 1..].starts_with("{{") {
                    literal.push_str("{{");
                    at += 3;
                    continue;
                }
                if source[at + 1..].starts_with("#{") {
                    literal.push_str("#{");
                    at += 3;
                    continue;
                }
            }
            if source[at..].starts_with("{{") {
                let close = source[at + 2..]
                    .find("}}")
                    .ok_or_else(|| err(at, "unterminated `{{`".to_string()))?;
                let inner = &source[at + 2..at + 2 + close];
                let token = inner.trim();
                flush_literal!();
                if let Some(path_text) = token.strip_prefix('#') {
                    let path = KeyPath::parse(path_text)
                        .ok_or_else(|| err(at, format!("malformed section path `{path_text}`")))?;
                    stack.push((Some((path, at)), Vec::new()));
                } else if let Some(path_text) = token.strip_prefix('/') {
                    let (open, body) = stack
                        .pop()
                        .expect("stack non-empty");
                    let Some((path, _)) = open else {
                        return Err(err(at, format!("section close `{{{{/{path_text}}}}}` without open", )));
                    };
                    if path.source != path_text.trim() {
                        return Err(err(
                            at,
                            format!(
                                "mismatched section: opened `{}`, closed `{}`",
                                path.source,
                                path_text.trim()
                            ),
                        ));
                    }
                    stack
                        .last_mut()
                        .expect("root remains")
                        .1
                        .push(Node::Section { path, body });
                } else {
                    let path = KeyPath::parse(token)
                        .ok_or_else(|| err(at, format!("malformed placeholder `{token}`")))?;
                    stack
                        .last_mut()
                        .expect("stack non-empty")
                        .1
                        .push(Node::Placeholder(path));
                }
                at += 2 + close + 2;
                continue;
            }
            if source[at..].starts_with("#{") {
                let close = source[at + 2..]
                    .find('}')
                    .ok_or_else(|| err(at, "unterminated `#{`".to_string()))?;
                let inner = &source[at + 2..at + 2 + close];
                let expr = Expr::parse(inner)
                    .map_err(|e| err(at, format!("bad expression: {e}")))?;
                flush_literal!();
                stack
                    .last_mut()
                    .expect("stack non-empty")
                    .1
                    .push(Node::Expr(expr));
                at += 2 + close + 1;
                continue;
            }
            // advance one UTF-8 character
            let ch = source[at..].chars().next().expect("in bounds");
            literal.push(ch);
            at += ch.len_utf8();
        }
        flush_literal!();
        if stack.len() > 1 {
            let (open, _) = stack.pop().expect("non-empty");
            let (path, open_at) = open.expect("nested entries always carry a path");
            return Err(err(open_at, format!("unclosed section `{}`", path.source)));
        }
        let (_, nodes) = stack.pop().expect("root");
        Ok(Template {
            source: source.to_string(),
            nodes,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// True when the template is literal text only.
    pub fn is_literal(&self) -> bool {
        self.nodes
            .iter()
            .all(|n| matches!(n, Node::Literal(_)))
    }

    /// Render against a single context value.
    pub fn render(&self, ctx: &DataValue) -> Result<String, RenderError> {
        self.render_with(&RenderContext::new(ctx))
    }

    /// Render against a full context stack.
    pub fn render_with(&self, ctx: &RenderContext<'_>) -> Result<String, RenderError> {
        let mut out = String::new();
        render_nodes(&self.nodes, ctx, &mut out)?;
        Ok(out)
    }
}

fn render_nodes(
    nodes: &[Node],
    ctx: &RenderContext<'_>,
    out: &mut String,
) -> Result<(), RenderError> {
    for node in nodes {
        match node {
            Node::Literal(text) => out.push_str(text),
            Node::Placeholder(path) => {
                let value = resolve_key_path(path, ctx)?;
                match value.render_scalar() {
                    Some(text) => out.push_str(&text),
                    None => {
                        return Err(RenderError::NonScalarSubstitution {
                            path: path.source.clone(),
                            found: value.kind(),
                        })
                    }
                }
            }
            Node::Section { path, body } => {
                let value = resolve_key_path(path, ctx)?;
                let items = value.as_list().ok_or_else(|| RenderError::SectionNotAList {
                    path: path.source.clone(),
                    found: value.kind(),
                })?;
                // Elements borrow from the resolved value, which borrows from
                // the context stack; cloning keeps lifetimes simple here.
                for item in items {
                    let inner = ctx.pushed(item);
                    render_nodes(body, &inner, out)?;
                }
            }
            Node::Expr(expr) => {
                let head = ctx
                    .resolve_head(expr.head())
                    .map_err(|e| RenderError::Path {
                        path: expr.source().to_string(),
                        source: e,
                    })?;
                let value = expr.eval_steps(head).map_err(|e| RenderError::Path {
                    path: expr.source().to_string(),
                    source: e,
                })?;
                match value.render_scalar() {
                    Some(text) => out.push_str(&text),
                    None => {
                        return Err(RenderError::NonScalarSubstitution {
                            path: expr.source().to_string(),
                            found: value.kind(),
                        })
                    }
                }
            }
        }
    }
    Ok(())
}

fn resolve_key_path<'a>(
    path: &KeyPath,
    ctx: &RenderContext<'a>,
) -> Result<&'a DataValue, RenderError> {
    let wrap = |e: PathError| RenderError::Path {
        path: path.source.clone(),
        source: e,
    };
    let mut cur = ctx.resolve_head(&path.segments[0]).map_err(wrap)?;
    for segment in &path.segments[1..] {
        cur = lookup_head(cur, segment).map_err(wrap)?;
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(json: &str) -> DataValue {
        DataValue::from_json_str(json).unwrap()
    }

    #[test]
    fn plain_text_is_one_literal() {
        let t = Template::parse("plain text").unwrap();
        assert!(t.is_literal());
        assert_eq!(t.render(&DataValue::Null).unwrap(), "plain text");
    }

    #[test]
    fn literal_templates_render_to_themselves() {
        let src = "int x = arr[0]; } // braces { } stay literal";
        let t = Template::parse(src).unwrap();
        assert_eq!(t.render(&DataValue::Null).unwrap(), src);
    }

    #[test]
    fn placeholder_substitutes_scalars() {
        let t = Template::parse("Hello {{name}}").unwrap();
        assert_eq!(
            t.render(&data(r#"{"name": "World"}"#)).unwrap(),
            "Hello World"
        );
    }

    #[test]
    fn section_iterates_list() {
        let t = Template::parse("{{#xs}}{{v}},{{/xs}}").unwrap();
        assert_eq!(
            t.render(&data(r#"{"xs": [{"v": 1}, {"v": 2}]}"#)).unwrap(),
            "1,2,"
        );
    }

    #[test]
    fn section_over_empty_list_is_empty() {
        let t = Template::parse("a{{#xs}}X{{/xs}}b").unwrap();
        assert_eq!(t.render(&data(r#"{"xs": []}"#)).unwrap(), "ab");
    }

    #[test]
    fn section_parses_to_one_node() {
        let t = Template::parse("{{#fields}}x{{/fields}}").unwrap();
        assert_eq!(t.nodes.len(), 1);
        assert!(matches!(&t.nodes[0], Node::Section { path, .. } if path.source == "fields"));
    }

    #[test]
    fn mismatched_section_is_ill_formed() {
        let err = Template::parse("{{#a}}{{/b}}").unwrap_err();
        assert!(err.reason.contains("mismatched"), "{err}");
        assert!(Template::parse("{{#a}}x").is_err(), "unclosed");
        assert!(Template::parse("{{/a}}").is_err(), "close without open");
        assert!(Template::parse("{{}}").is_err(), "empty placeholder");
        assert!(Template::parse("{{a").is_err(), "unterminated");
    }

    #[test]
    fn nested_sections_track_context() {
        let t = Template::parse("{{#outer}}[{{#inner}}{{v}}{{/inner}}]{{/outer}}").unwrap();
        let ctx = data(r#"{"outer": [{"inner": [{"v": 1}, {"v": 2}]}, {"inner": []}]}"#);
        assert_eq!(t.render(&ctx).unwrap(), "[12][]");
    }

    #[test]
    fn lexical_fallback_to_outer_context() {
        let t = Template::parse("{{#xs}}{{label}}:{{v}} {{/xs}}").unwrap();
        let ctx = data(r#"{"label": "item", "xs": [{"v": 1}, {"v": 2}]}"#);
        assert_eq!(t.render(&ctx).unwrap(), "item:1 item:2 ");
    }

    #[test]
    fn expressions_render_inline() {
        let t = Template::parse("n=#{items.count()} first=#{items.first()}").unwrap();
        assert_eq!(
            t.render(&data(r#"{"items": ["a", "b"]}"#)).unwrap(),
            "n=2 first=a"
        );
    }

    #[test]
    fn escapes_produce_literals() {
        let t = Template::parse(r"\{{name}} and \#{expr}").unwrap();
        assert_eq!(t.render(&DataValue::Null).unwrap(), "{{name}} and #{expr}");
        // lone backslash stays
        let t = Template::parse(r"a\b").unwrap();
        assert_eq!(t.render(&DataValue::Null).unwrap(), r"a\b");
    }

    #[test]
    fn non_scalar_substitution_is_an_error() {
        let t = Template::parse("{{xs}}").unwrap();
        let err = t.render(&data(r#"{"xs": [1]}"#)).unwrap_err();
        assert!(matches!(err, RenderError::NonScalarSubstitution { .. }));
        // null has no canonical scalar form either
        let t = Template::parse("{{n}}").unwrap();
        let err = t.render(&data(r#"{"n": null}"#)).unwrap_err();
        assert!(matches!(err, RenderError::NonScalarSubstitution { .. }));
    }

    #[test]
    fn missing_head_names_the_step() {
        let t = Template::parse("{{nope.x}}").unwrap();
        match t.render(&data(r#"{"a": 1}"#)).unwrap_err() {
            RenderError::Path { source, .. } => {
                assert_eq!(source, PathError::UnresolvedHead { step: "nope".into() });
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dotted_placeholder_paths() {
        let t = Template::parse("{{a.b.c}}").unwrap();
        assert_eq!(t.render(&data(r#"{"a": {"b": {"c": 9}}}"#)).unwrap(), "9");
    }

    #[test]
    fn bool_renders_canonically() {
        let t = Template::parse("{{f}}/{{t}}").unwrap();
        assert_eq!(
            t.render(&data(r#"{"f": false, "t": true}"#)).unwrap(),
            "false/true"
        );
    }
}
