use regex::Regex;
use serde::Deserialize;
use thiserror::Error;

use super::Glob;

/// One ordered rewrite: a regular expression applied to prototype path and
/// body, with a replacement that may reference capture groups (`$1`..`$9`,
/// `${name}`, `$$` for a literal dollar) and emit template placeholder
/// syntax.
#[derive(Clone, Debug)]
pub struct PatternRule {
    pub name: String,
    pub scope: Glob,
    pub pattern: Regex,
    replacement: Vec<ReplacePiece>,
    pub order: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum ReplacePiece {
    Literal(String),
    Numbered(usize),
    Named(String),
}

/// A rule file failed to compile.
#[derive(Debug, Error)]
pub enum RuleError {
    #[error("rule file syntax error at line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("rule `{rule}`: pattern does not compile: {message}")]
    BadPattern { rule: String, message: String },
    #[error("rule `{rule}`: replacement references undefined group `{group}`")]
    BadGroupReference { rule: String, group: String },
    #[error("duplicate rule name `{name}`")]
    DuplicateRuleName { name: String },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRule {
    name: String,
    scope: String,
    #[serde(rename = "match")]
    pattern: String,
    replace: String,
    order: i64,
}

/// Compile a JSON rule file into rules sorted by `(order, declaration
/// index)`; the sort is stable so equal orders keep declaration sequence.
pub fn compile_rules(source: &str) -> Result<Vec<PatternRule>, RuleError> {
    let raw: Vec<RawRule> = serde_json::from_str(source).map_err(|e| RuleError::Syntax {
        line: e.line(),
        message: e.to_string(),
    })?;
    let mut rules = Vec::with_capacity(raw.len());
    for rule in raw {
        if rules.iter().any(|r: &PatternRule| r.name == rule.name) {
            return Err(RuleError::DuplicateRuleName { name: rule.name });
        }
        let pattern = Regex::new(&rule.pattern).map_err(|e| RuleError::BadPattern {
            rule: rule.name.clone(),
            message: e.to_string(),
        })?;
        let replacement = parse_replacement(&rule.replace);
        check_group_references(&rule.name, &pattern, &replacement)?;
        rules.push(PatternRule {
            name: rule.name,
            scope: Glob::new(rule.scope),
            pattern,
            replacement,
            order: rule.order,
        });
    }
    rules.sort_by_key(|r| r.order);
    Ok(rules)
}

/// Replacement syntax: `$1`..`$9` and `${name_or_number}` reference capture
/// groups, `$$` is a literal dollar, any other `$` is literal.
fn parse_replacement(replace: &str) -> Vec<ReplacePiece> {
    let mut pieces = Vec::new();
    let mut literal = String::new();
    let mut chars = replace.chars().peekable();
    while let Some(c) = chars.next() {
        if c != '$' {
            literal.push(c);
            continue;
        }
        match chars.peek() {
            Some('$') => {
                chars.next();
                literal.push('$');
            }
            Some(&d) if ('1'..='9').contains(&d) => {
                chars.next();
                if !literal.is_empty() {
                    pieces.push(ReplacePiece::Literal(std::mem::take(&mut literal)));
                }
                pieces.push(ReplacePiece::Numbered(d as usize - '0' as usize));
            }
            Some('{') => {
                chars.next();
                let mut name = String::new();
                let mut closed = false;
                for c in chars.by_ref() {
                    if c == '}' {
                        closed = true;
                        break;
                    }
                    name.push(c);
                }
                if closed && !name.is_empty() {
                    if !literal.is_empty() {
                        pieces.push(ReplacePiece::Literal(std::mem::take(&mut literal)));
                    }
                    if let Ok(n) = name.parse::<usize>() {
                        pieces.push(ReplacePiece::Numbered(n));
                    } else {
                        pieces.push(ReplacePiece::Named(name));
                    }
                } else {
                    literal.push_str("${");
                    literal.push_str(&name);
                }
            }
            _ => literal.push('$'),
        }
    }
    if !literal.is_empty() {
        pieces.push(ReplacePiece::Literal(literal));
    }
    pieces
}

fn check_group_references(
    rule: &str,
    pattern: &Regex,
    replacement: &[ReplacePiece],
) -> Result<(), RuleError> {
    let group_count = pattern.captures_len(); // includes group 0
    let names: Vec<&str> = pattern.capture_names().flatten().collect();
    for piece in replacement {
        match piece {
            ReplacePiece::Numbered(n) if *n >= group_count => {
                return Err(RuleError::BadGroupReference {
                    rule: rule.to_string(),
                    group: format!("${n}"),
                })
            }
            ReplacePiece::Named(name) if !names.contains(&name.as_str()) => {
                return Err(RuleError::BadGroupReference {
                    rule: rule.to_string(),
                    group: format!("${{{name}}}"),
                })
            }
            _ => {}
        }
    }
    Ok(())
}

impl PatternRule {
    /// Rewrite all leftmost-first, non-overlapping matches in `text`.
    pub fn apply(&self, text: &str) -> String {
        self.pattern
            .replace_all(text, |caps: &regex::Captures<'_>| self.expand(caps))
            .into_owned()
    }

    fn expand(&self, caps: &regex::Captures<'_>) -> String {
        let mut out = String::new();
        for piece in &self.replacement {
            match piece {
                ReplacePiece::Literal(s) => out.push_str(s),
                ReplacePiece::Numbered(n) => {
                    if let Some(m) = caps.get(*n) {
                        out.push_str(m.as_str());
                    }
                }
                ReplacePiece::Named(name) => {
                    if let Some(m) = caps.name(name) {
                        out.push_str(m.as_str());
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_rule_file_compiles_to_nothing() {
        assert!(compile_rules("[]").unwrap().is_empty());
    }

    #[test]
    fn single_rule_compiles() {
        let rules = compile_rules(
            r#"[{"name": "n", "scope": "**", "match": "Greeting", "replace": "{{name}}", "order": 1}]"#,
        )
        .unwrap();
        assert_eq!(rules.len(), 1);
        assert_eq!(rules[0].apply("class GreetingMessage"), "class {{name}}Message");
    }

    #[test]
    fn undefined_group_reference_is_rejected() {
        let err = compile_rules(
            r#"[{"name": "n", "scope": "**", "match": "(a)", "replace": "$2", "order": 1}]"#,
        )
        .unwrap_err();
        assert!(matches!(err, RuleError::BadGroupReference { ref group, .. } if group == "$2"));

        let err = compile_rules(
            r#"[{"name": "n", "scope": "**", "match": "(a)", "replace": "${nope}", "order": 1}]"#,
        )
        .unwrap_err();
        assert!(matches!(err, RuleError::BadGroupReference { .. }));
    }

    #[test]
    fn named_and_numbered_groups_expand() {
        let rules = compile_rules(
            r#"[{"name": "n", "scope": "**", "match": "(?P<word>[a-z]+)-(\\d+)", "replace": "${word}_$1", "order": 1}]"#,
        )
        .unwrap();
        assert_eq!(rules[0].apply("abc-42"), "abc_abc");
        let rules = compile_rules(
            r#"[{"name": "n", "scope": "**", "match": "(a+)(b+)", "replace": "$2$1", "order": 1}]"#,
        )
        .unwrap();
        assert_eq!(rules[0].apply("xaabbx"), "xbbaax");
    }

    #[test]
    fn dollar_escapes_and_literals() {
        let rules = compile_rules(
            r#"[{"name": "n", "scope": "**", "match": "x", "replace": "$$ $0 $z", "order": 1}]"#,
        )
        .unwrap();
        // $$ is a literal dollar; $0 and $z are not reference forms, so stay literal
        assert_eq!(rules[0].apply("x"), "$ $0 $z");
    }

    #[test]
    fn syntax_error_carries_line_number() {
        let err = compile_rules("[\n{\"name\": }\n]").unwrap_err();
        match err {
            RuleError::Syntax { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_key_is_a_syntax_error() {
        let err = compile_rules(r#"[{"name": "n", "scope": "**", "match": "x", "order": 1}]"#)
            .unwrap_err();
        assert!(matches!(err, RuleError::Syntax { .. }));
    }

    #[test]
    fn duplicate_names_are_rejected() {
        let err = compile_rules(
            r#"[{"name": "n", "scope": "**", "match": "a", "replace": "b", "order": 1},
                {"name": "n", "scope": "**", "match": "c", "replace": "d", "order": 2}]"#,
        )
        .unwrap_err();
        assert!(matches!(err, RuleError::DuplicateRuleName { .. }));
    }

    #[test]
    fn bad_regex_is_reported() {
        let err = compile_rules(
            r#"[{"name": "n", "scope": "**", "match": "(unclosed", "replace": "", "order": 1}]"#,
        )
        .unwrap_err();
        assert!(matches!(err, RuleError::BadPattern { .. }));
    }

    #[test]
    fn rules_sort_by_order_then_declaration() {
        let rules = compile_rules(
            r#"[{"name": "b", "scope": "**", "match": "x", "replace": "y", "order": 2},
                {"name": "a", "scope": "**", "match": "x", "replace": "y", "order": 1},
                {"name": "c", "scope": "**", "match": "x", "replace": "y", "order": 1}]"#,
        )
        .unwrap();
        let names: Vec<&str> = rules.iter().map(|r| r.name.as_str()).collect();
        assert_eq!(names, ["a", "c", "b"]);
    }
}
