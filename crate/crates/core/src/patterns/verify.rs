use regex::Regex;
use thiserror::Error;

use crate::nanovc::{ContentArea, RepoPath};
use crate::templating::DataValue;

use super::{derive_template, PatternRule};

/// Default token for substitutable labels: ordinary identifiers.
pub const DEFAULT_LABEL_TOKEN: &str = "[A-Za-z_][A-Za-z0-9_]*";

/// A small, valid exemplar of the target code, carrying the seed record that
/// makes template derivation invertible on it.
///
/// Every file must be UTF-8 text; labels in the prototype are plain
/// identifiers matching `label_token` (validity in the host language is the
/// prototype author's concern, enforced only lexically here).
#[derive(Clone, Debug)]
pub struct WorkingPrototype {
    pub files: ContentArea,
    pub seed: DataValue,
    pub label_token: Regex,
}

/// A prototype bundle was not admissible.
#[derive(Debug, Error)]
pub enum PrototypeError {
    #[error("prototype file `{path}` is not UTF-8 text")]
    NonUtf8File { path: RepoPath },
    #[error("label token does not compile: {0}")]
    BadLabelToken(#[from] regex::Error),
}

impl WorkingPrototype {
    pub fn new(files: ContentArea, seed: DataValue) -> Result<Self, PrototypeError> {
        Self::with_label_token(files, seed, DEFAULT_LABEL_TOKEN)
    }

    pub fn with_label_token(
        files: ContentArea,
        seed: DataValue,
        label_token: &str,
    ) -> Result<Self, PrototypeError> {
        for (path, content) in files.iter() {
            if std::str::from_utf8(content).is_err() {
                return Err(PrototypeError::NonUtf8File { path: path.clone() });
            }
        }
        Ok(WorkingPrototype {
            files,
            seed,
            label_token: Regex::new(label_token)?,
        })
    }
}

/// Per-file outcome of a round-trip verification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    /// Rendered path differs from the prototype path at this byte offset.
    PathDiverged { offset: usize },
    /// Rendered body differs from the prototype body at this byte offset.
    BodyDiverged { offset: usize },
    /// Derivation or rendering failed outright.
    Failed { reason: String },
}

/// One file's verification record: the derived template, what it rendered to
/// under the seed, and the verdict.
#[derive(Clone, Debug)]
pub struct FileVerification {
    pub path: RepoPath,
    pub template_path: Option<String>,
    pub template_body: Option<String>,
    pub rendered: Option<String>,
    pub verdict: Verdict,
}

impl FileVerification {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Round-trip report over a whole prototype bundle.
#[derive(Clone, Debug, Default)]
pub struct VerificationReport {
    pub files: Vec<FileVerification>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.files.iter().all(FileVerification::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &FileVerification> {
        self.files.iter().filter(|f| !f.passed())
    }
}

/// First byte offset at which two strings differ.
fn divergence_offset(a: &str, b: &str) -> usize {
    a.as_bytes()
        .iter()
        .zip(b.as_bytes())
        .position(|(x, y)| x != y)
        .unwrap_or_else(|| a.len().min(b.len()))
}

/// Check that rendering each file's derived template under the seed
/// reproduces the file byte-exact. Failures are report entries, never
/// errors.
pub fn verify_prototype(proto: &WorkingPrototype, rules: &[PatternRule]) -> VerificationReport {
    let mut report = VerificationReport::default();
    for (path, content) in proto.files.iter() {
        let body = std::str::from_utf8(content).expect("checked at construction");
        let entry = verify_file(path, body, proto, rules);
        report.files.push(entry);
    }
    report
}

fn verify_file(
    path: &RepoPath,
    body: &str,
    proto: &WorkingPrototype,
    rules: &[PatternRule],
) -> FileVerification {
    let template = match derive_template(path, body, rules) {
        Ok(t) => t,
        Err(e) => {
            return FileVerification {
                path: path.clone(),
                template_path: None,
                template_body: None,
                rendered: None,
                verdict: Verdict::Failed {
                    reason: e.to_string(),
                },
            }
        }
    };
    let template_path = template.path_template.source().to_string();
    let template_body = template.body.source().to_string();
    let fail = |reason: String, rendered: Option<String>| FileVerification {
        path: path.clone(),
        template_path: Some(template_path.clone()),
        template_body: Some(template_body.clone()),
        rendered,
        verdict: Verdict::Failed { reason },
    };

    let rendered_path = match template.path_template.render(&proto.seed) {
        Ok(s) => s,
        Err(e) => return fail(format!("path render failed: {e}"), None),
    };
    let rendered_body = match template.body.render(&proto.seed) {
        Ok(s) => s,
        Err(e) => return fail(format!("render failed: {e}"), None),
    };

    let verdict = if rendered_path != path.as_str() {
        Verdict::PathDiverged {
            offset: divergence_offset(&rendered_path, path.as_str()),
        }
    } else if rendered_body != body {
        Verdict::BodyDiverged {
            offset: divergence_offset(&rendered_body, body),
        }
    } else {
        Verdict::Pass
    };
    FileVerification {
        path: path.clone(),
        template_path: Some(template_path),
        template_body: Some(template_body),
        rendered: Some(rendered_body),
        verdict,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::compile_rules;

    fn proto(files: ContentArea, seed_json: &str) -> WorkingPrototype {
        WorkingPrototype::new(files, DataValue::from_json_str(seed_json).unwrap()).unwrap()
    }

    #[test]
    fn no_rules_passes_as_identity() {
        let p = proto(ContentArea::new().with("a.txt", "anything"), "{}");
        let report = verify_prototype(&p, &[]);
        assert!(report.passed());
    }

    #[test]
    fn inverse_substitution_passes() {
        let rules = compile_rules(
            r#"[{"name": "n", "scope": "**", "match": "Greeting", "replace": "{{name}}", "order": 1}]"#,
        )
        .unwrap();
        let p = proto(
            ContentArea::new().with("Greeting.code", "class GreetingMessage {}"),
            r#"{"name": "Greeting"}"#,
        );
        assert!(verify_prototype(&p, &rules).passed());
    }

    #[test]
    fn wrong_seed_diverges_at_first_replaced_offset() {
        let rules = compile_rules(
            r#"[{"name": "n", "scope": "**", "match": "Greeting", "replace": "{{name}}", "order": 1}]"#,
        )
        .unwrap();
        // Path would also diverge; use a path the rule does not touch so the
        // body divergence is what gets reported.
        let p = proto(
            ContentArea::new().with("proto.code", "class GreetingMessage {}"),
            r#"{"name": "Foo"}"#,
        );
        let report = verify_prototype(&p, &rules);
        assert!(!report.passed());
        // "class Foo..." vs "class Greeting...": first divergence right at
        // the replaced label.
        assert_eq!(
            report.files[0].verdict,
            Verdict::BodyDiverged { offset: 6 }
        );
    }

    #[test]
    fn path_divergence_is_reported() {
        let rules = compile_rules(
            r#"[{"name": "n", "scope": "**", "match": "Greeting", "replace": "{{name}}", "order": 1}]"#,
        )
        .unwrap();
        let p = proto(
            ContentArea::new().with("Greeting.code", "x"),
            r#"{"name": "Foo"}"#,
        );
        let report = verify_prototype(&p, &rules);
        assert_eq!(report.files[0].verdict, Verdict::PathDiverged { offset: 0 });
    }

    #[test]
    fn render_errors_become_failed_entries() {
        let rules = compile_rules(
            r#"[{"name": "n", "scope": "**", "match": "X", "replace": "{{missing}}", "order": 1}]"#,
        )
        .unwrap();
        let p = proto(ContentArea::new().with("a", "X"), "{}");
        let report = verify_prototype(&p, &rules);
        assert!(matches!(
            &report.files[0].verdict,
            Verdict::Failed { reason } if reason.contains("render failed")
        ));
    }

    #[test]
    fn non_utf8_prototype_is_rejected() {
        let files = ContentArea::new().with("bin", vec![0xff, 0xfe]);
        assert!(matches!(
            WorkingPrototype::new(files, DataValue::Null),
            Err(PrototypeError::NonUtf8File { .. })
        ));
    }
}
