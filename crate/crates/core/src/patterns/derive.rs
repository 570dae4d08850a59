use thiserror::Error;

use crate::nanovc::RepoPath;
use crate::templating::{Template, TemplateError};

use super::PatternRule;

/// A derived template: the prototype's path and body after rule rewriting,
/// both parsed and validated.
#[derive(Clone, Debug)]
pub struct TemplateFile {
    pub path_template: Template,
    pub body: Template,
}

/// Derivation produced text that does not parse as a template.
#[derive(Debug, Error)]
pub enum DeriveError {
    #[error("derived path template for `{path}` is ill-formed: {source}")]
    IllFormedPath {
        path: RepoPath,
        #[source]
        source: TemplateError,
    },
    #[error("derived template for `{path}` is ill-formed: {source}")]
    IllFormedTemplate {
        path: RepoPath,
        #[source]
        source: TemplateError,
    },
}

/// Apply a compiled rule set to one prototype file.
///
/// Rules run in their compiled order; each rule rewrites every
/// leftmost-first, non-overlapping match in both the path and the body, and
/// later rules see earlier rules' output. A rule only touches files whose
/// *current* path text falls inside its scope glob.
pub fn derive_template(
    path: &RepoPath,
    body: &str,
    rules: &[PatternRule],
) -> Result<TemplateFile, DeriveError> {
    let mut path_text = path.as_str().to_string();
    let mut body_text = body.to_string();
    for rule in rules {
        if !rule.scope.matches(&path_text) {
            continue;
        }
        path_text = rule.apply(&path_text);
        body_text = rule.apply(&body_text);
    }
    let path_template = Template::parse(&path_text).map_err(|source| DeriveError::IllFormedPath {
        path: path.clone(),
        source,
    })?;
    let body = Template::parse(&body_text).map_err(|source| DeriveError::IllFormedTemplate {
        path: path.clone(),
        source,
    })?;
    Ok(TemplateFile {
        path_template,
        body,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::compile_rules;
    use crate::templating::DataValue;

    fn p(s: &str) -> RepoPath {
        RepoPath::new(s).unwrap()
    }

    #[test]
    fn single_substitution() {
        let rules = compile_rules(
            r#"[{"name": "n", "scope": "**", "match": "Greeting", "replace": "{{name}}", "order": 1}]"#,
        )
        .unwrap();
        let t = derive_template(&p("Greeting.code"), "class GreetingMessage {", &rules).unwrap();
        assert_eq!(t.body.source(), "class {{name}}Message {");
        assert_eq!(t.path_template.source(), "{{name}}.code");
    }

    #[test]
    fn no_rules_is_identity() {
        let t = derive_template(&p("a.txt"), "body text", &[]).unwrap();
        assert_eq!(t.body.source(), "body text");
        assert_eq!(t.body.render(&DataValue::Null).unwrap(), "body text");
    }

    #[test]
    fn scope_isolates_files() {
        let rules = compile_rules(
            r#"[{"name": "n", "scope": "msgs/*", "match": "X", "replace": "Y", "order": 1}]"#,
        )
        .unwrap();
        let inside = derive_template(&p("msgs/a"), "X", &rules).unwrap();
        assert_eq!(inside.body.source(), "Y");
        let outside = derive_template(&p("other/a"), "X", &rules).unwrap();
        assert_eq!(outside.body.source(), "X");
    }

    #[test]
    fn later_rules_see_earlier_output() {
        let rules = compile_rules(
            r#"[{"name": "first", "scope": "**", "match": "alpha", "replace": "beta", "order": 1},
                {"name": "second", "scope": "**", "match": "beta", "replace": "gamma", "order": 2}]"#,
        )
        .unwrap();
        let t = derive_template(&p("f"), "alpha beta", &rules).unwrap();
        assert_eq!(t.body.source(), "gamma gamma");
    }

    #[test]
    fn rule_order_changes_output() {
        let reversed = compile_rules(
            r#"[{"name": "second", "scope": "**", "match": "beta", "replace": "gamma", "order": 1},
                {"name": "first", "scope": "**", "match": "alpha", "replace": "beta", "order": 2}]"#,
        )
        .unwrap();
        let t = derive_template(&p("f"), "alpha beta", &reversed).unwrap();
        assert_eq!(t.body.source(), "beta gamma");
    }

    #[test]
    fn ill_formed_rewrite_is_rejected() {
        let rules = compile_rules(
            r#"[{"name": "n", "scope": "**", "match": "X", "replace": "{{#open}}", "order": 1}]"#,
        )
        .unwrap();
        let err = derive_template(&p("f"), "X", &rules).unwrap_err();
        assert!(matches!(err, DeriveError::IllFormedTemplate { .. }));
    }

    #[test]
    fn section_introducing_rule_round_trips() {
        // Collapse a run of field declarations into a section block, then
        // check the render reproduces the original prototype text.
        let rules = compile_rules(
            r#"[{"name": "fields", "scope": "**",
                 "match": "(?m)(?:^int [a-z]+;\n)+",
                 "replace": "{{#fields}}{{type}} {{fname}};\n{{/fields}}",
                 "order": 1}]"#,
        )
        .unwrap();
        let proto = "struct S {\nint price;\nint qty;\n}\n";
        let t = derive_template(&p("s.code"), proto, &rules).unwrap();
        assert_eq!(
            t.body.source(),
            "struct S {\n{{#fields}}{{type}} {{fname}};\n{{/fields}}}\n"
        );
        let seed = DataValue::from_json_str(
            r#"{"fields": [{"type": "int", "fname": "price"}, {"type": "int", "fname": "qty"}]}"#,
        )
        .unwrap();
        assert_eq!(t.body.render(&seed).unwrap(), proto);
    }
}
