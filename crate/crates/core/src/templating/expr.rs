use std::fmt;

use thiserror::Error;

use super::caseconv::{to_camel, to_pascal, to_snake};
use super::DataValue;

/// A parsed layer-2 expression: a head identifier followed by navigation and
/// function steps, e.g. `order.items[0].total` or `name.snake()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    source: String,
    head: String,
    steps: Vec<Step>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Step {
    Field(String),
    Index(usize),
    Func(Func),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Func {
    Count,
    First,
    Last,
    Upper,
    Lower,
    Snake,
    Camel,
    Pascal,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "count" => Func::Count,
            "first" => Func::First,
            "last" => Func::Last,
            "upper" => Func::Upper,
            "lower" => Func::Lower,
            "snake" => Func::Snake,
            "camel" => Func::Camel,
            "pascal" => Func::Pascal,
            _ => return None,
        })
    }

    fn name(&self) -> &'static str {
        match self {
            Func::Count => "count",
            Func::First => "first",
            Func::Last => "last",
            Func::Upper => "upper",
            Func::Lower => "lower",
            Func::Snake => "snake",
            Func::Camel => "camel",
            Func::Pascal => "pascal",
        }
    }
}

/// An expression failed to parse.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("expression syntax error in `{expr}` at offset {at}: {reason}")]
pub struct ExprError {
    pub expr: String,
    pub at: usize,
    pub reason: String,
}

/// Navigation failed while evaluating an expression or placeholder path.
/// Always names the failing step.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PathError {
    #[error("`{step}` not found (no enclosing context defines it)")]
    UnresolvedHead { step: String },
    #[error("missing key `{step}` in record")]
    MissingKey { step: String },
    #[error("index {index} out of bounds at `{step}` (length {len})")]
    OutOfBounds { step: String, index: usize, len: usize },
    #[error("step `{step}` applied to wrong kind: expected {expected}, found {found}")]
    WrongKind {
        step: String,
        expected: &'static str,
        found: &'static str,
    },
    #[error("{func}() on empty list at `{step}`")]
    EmptyList { step: String, func: &'static str },
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

impl Expr {
    /// Parse `expr := ident step*` where
    /// `step := '.' ident | '[' int ']' | '.' func '(' ')'`.
    pub fn parse(source: &str) -> Result<Expr, ExprError> {
        let src = source.trim();
        let err = |at: usize, reason: &str| ExprError {
            expr: src.to_string(),
            at,
            reason: reason.to_string(),
        };
        let chars: Vec<char> = src.chars().collect();
        let mut at = 0usize;

        let ident = |chars: &[char], at: &mut usize| -> Option<String> {
            let start = *at;
            if *at < chars.len() && is_ident_start(chars[*at]) {
                *at += 1;
                while *at < chars.len() && is_ident_continue(chars[*at]) {
                    *at += 1;
                }
                Some(chars[start..*at].iter().collect())
            } else {
                None
            }
        };

        let head = ident(&chars, &mut at).ok_or_else(|| err(0, "expected identifier"))?;
        let mut steps = Vec::new();
        while at < chars.len() {
            match chars[at] {
                '.' => {
                    at += 1;
                    let name = ident(&chars, &mut at)
                        .ok_or_else(|| err(at, "expected identifier after `.`"))?;
                    if at + 1 < chars.len() && chars[at] == '(' && chars[at + 1] == ')' {
                        at += 2;
                        let func = Func::from_name(&name).ok_or_else(|| {
                            err(at, &format!("unknown function `{name}`"))
                        })?;
                        steps.push(Step::Func(func));
                    } else if at < chars.len() && chars[at] == '(' {
                        return Err(err(at, "expected `()` after function name"));
                    } else {
                        steps.push(Step::Field(name));
                    }
                }
                '[' => {
                    at += 1;
                    let start = at;
                    while at < chars.len() && chars[at].is_ascii_digit() {
                        at += 1;
                    }
                    if start == at {
                        return Err(err(at, "expected index digits after `[`"));
                    }
                    if at >= chars.len() || chars[at] != ']' {
                        return Err(err(at, "expected `]`"));
                    }
                    let digits: String = chars[start..at].iter().collect();
                    let index: usize = digits
                        .parse()
                        .map_err(|_| err(start, "index out of representable range"))?;
                    at += 1;
                    steps.push(Step::Index(index));
                }
                c => return Err(err(at, &format!("unexpected character `{c}`"))),
            }
        }
        Ok(Expr {
            source: src.to_string(),
            head,
            steps,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn head(&self) -> &str {
        &self.head
    }

    /// Evaluate against a single context value. The head must resolve
    /// directly in `ctx`; renderers that keep a context stack resolve the
    /// head themselves and call [`Expr::eval_steps`].
    pub fn eval(&self, ctx: &DataValue) -> Result<DataValue, PathError> {
        let start = lookup_head(ctx, &self.head)?;
        self.eval_steps(start)
    }

    /// Evaluate the steps from an already-resolved head value.
    pub fn eval_steps(&self, start: &DataValue) -> Result<DataValue, PathError> {
        let mut cur = start.clone();
        for step in &self.steps {
            cur = apply_step(&cur, step)?;
        }
        Ok(cur)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

/// Look a head identifier up in a context value; only records can provide
/// heads.
pub(crate) fn lookup_head<'v>(ctx: &'v DataValue, head: &str) -> Result<&'v DataValue, PathError> {
    match ctx {
        DataValue::Record(map) => map.get(head).ok_or_else(|| PathError::MissingKey {
            step: head.to_string(),
        }),
        other => Err(PathError::WrongKind {
            step: head.to_string(),
            expected: "record",
            found: other.kind(),
        }),
    }
}

fn apply_step(value: &DataValue, step: &Step) -> Result<DataValue, PathError> {
    match step {
        Step::Field(name) => match value {
            DataValue::Record(map) => map.get(name).cloned().ok_or_else(|| {
                PathError::MissingKey {
                    step: name.clone(),
                }
            }),
            other => Err(PathError::WrongKind {
                step: name.clone(),
                expected: "record",
                found: other.kind(),
            }),
        },
        Step::Index(i) => match value {
            DataValue::List(items) => items.get(*i).cloned().ok_or_else(|| {
                PathError::OutOfBounds {
                    step: format!("[{i}]"),
                    index: *i,
                    len: items.len(),
                }
            }),
            other => Err(PathError::WrongKind {
                step: format!("[{i}]"),
                expected: "list",
                found: other.kind(),
            }),
        },
        Step::Func(func) => apply_func(value, *func),
    }
}

fn apply_func(value: &DataValue, func: Func) -> Result<DataValue, PathError> {
    let step = || format!("{}()", func.name());
    let wrong = |expected: &'static str| PathError::WrongKind {
        step: step(),
        expected,
        found: value.kind(),
    };
    match func {
        Func::Count => match value {
            DataValue::List(items) => Ok(DataValue::Int(items.len() as i64)),
            DataValue::Record(map) => Ok(DataValue::Int(map.len() as i64)),
            DataValue::Text(s) => Ok(DataValue::Int(s.chars().count() as i64)),
            _ => Err(wrong("list, record or text")),
        },
        Func::First | Func::Last => match value {
            DataValue::List(items) => {
                let picked = if func == Func::First {
                    items.first()
                } else {
                    items.last()
                };
                picked.cloned().ok_or(PathError::EmptyList {
                    step: step(),
                    func: func.name(),
                })
            }
            _ => Err(wrong("list")),
        },
        Func::Upper | Func::Lower | Func::Snake | Func::Camel | Func::Pascal => match value {
            DataValue::Text(s) => Ok(DataValue::Text(match func {
                Func::Upper => s.to_uppercase(),
                Func::Lower => s.to_lowercase(),
                Func::Snake => to_snake(s),
                Func::Camel => to_camel(s),
                Func::Pascal => to_pascal(s),
                _ => unreachable!(),
            })),
            _ => Err(wrong("text")),
        },
    }
}
