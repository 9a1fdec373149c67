//! The executable program corpus: a manifest of `.ld` files with
//! machine-checkable expectations, plus the standard definitions (lists,
//! trees, naturals, difference lists, queues) the programs build on.

use std::fmt;
use std::path::{Path, PathBuf};

use crate::decode::decode;
use crate::eval::run;
use crate::pipeline::{check_program, PipelineError};

/// What a corpus entry must do.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expectation {
    /// Rejected at typecheck with this rule name.
    TypeErrorAt(String),
    /// Evaluates to a terminal whose decoded rendering is this string.
    EvaluatesTo(String),
    /// Typechecks, and the pretty-printed main type is this string.
    TypechecksAt(String),
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub file: String,
    pub needs_recursion: bool,
    pub expect: Expectation,
}

#[derive(Debug)]
pub enum CorpusError {
    Io(String),
    Manifest { line: usize, message: String },
}

impl fmt::Display for CorpusError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorpusError::Io(e) => write!(f, "corpus io error: {}", e),
            CorpusError::Manifest { line, message } => {
                write!(f, "manifest line {}: {}", line, message)
            }
        }
    }
}

/// Manifest format, one entry per line:
/// `name  file  rec|core  value|type|typeerror  payload...`
/// `#` starts a comment.
pub fn parse_manifest(src: &str) -> Result<Vec<CorpusEntry>, CorpusError> {
    let mut out = Vec::new();
    for (idx, line) in src.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.splitn(5, char::is_whitespace).filter(|s| !s.is_empty());
        let mut next = |what: &str| {
            parts.next().map(str::to_string).ok_or(CorpusError::Manifest {
                line: idx + 1,
                message: format!("missing field: {}", what),
            })
        };
        let name = next("name")?;
        let file = next("file")?;
        let flags = next("flags")?;
        let kind = next("kind")?;
        let payload = line
            .splitn(5, char::is_whitespace)
            .filter(|s| !s.is_empty())
            .nth(4)
            .unwrap_or("")
            .trim()
            .to_string();
        let needs_recursion = match flags.as_str() {
            "rec" => true,
            "core" => false,
            other => {
                return Err(CorpusError::Manifest {
                    line: idx + 1,
                    message: format!("unknown flag `{}` (expected `rec` or `core`)", other),
                })
            }
        };
        let expect = match kind.as_str() {
            "value" => Expectation::EvaluatesTo(payload),
            "type" => Expectation::TypechecksAt(payload),
            "typeerror" => Expectation::TypeErrorAt(payload),
            other => {
                return Err(CorpusError::Manifest {
                    line: idx + 1,
                    message: format!(
                        "unknown expectation `{}` (expected value/type/typeerror)",
                        other
                    ),
                })
            }
        };
        out.push(CorpusEntry { name, file, needs_recursion, expect });
    }
    Ok(out)
}

pub fn load_manifest(path: &Path) -> Result<Vec<CorpusEntry>, CorpusError> {
    let src = std::fs::read_to_string(path).map_err(|e| CorpusError::Io(e.to_string()))?;
    parse_manifest(&src)
}

/// The corpus directory shipped with the crate.
pub fn bundled_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

#[derive(Clone, Debug)]
pub struct EntryOutcome {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

/// Run one entry's expectation to a verdict.
pub fn run_entry(dir: &Path, entry: &CorpusEntry, max_steps: usize) -> EntryOutcome {
    let path = dir.join(&entry.file);
    let src = match std::fs::read_to_string(&path) {
        Ok(s) => s,
        Err(e) => {
            return EntryOutcome {
                name: entry.name.clone(),
                ok: false,
                detail: format!("cannot read {}: {}", path.display(), e),
            }
        }
    };
    let checked = check_program(&src, entry.needs_recursion);
    match (&entry.expect, checked) {
        (Expectation::TypeErrorAt(rule), Err(PipelineError::Type { error, .. })) => {
            if &error.rule == rule {
                EntryOutcome {
                    name: entry.name.clone(),
                    ok: true,
                    detail: format!("rejected as expected: {}", error),
                }
            } else {
                EntryOutcome {
                    name: entry.name.clone(),
                    ok: false,
                    detail: format!("expected rule {}, got {}", rule, error),
                }
            }
        }
        (Expectation::TypeErrorAt(rule), Ok(_)) => EntryOutcome {
            name: entry.name.clone(),
            ok: false,
            detail: format!("expected a {} rejection but the program typechecked", rule),
        },
        (Expectation::TypeErrorAt(_), Err(other)) => EntryOutcome {
            name: entry.name.clone(),
            ok: false,
            detail: format!("expected a type error, got: {}", other),
        },
        (_, Err(err)) => EntryOutcome {
            name: entry.name.clone(),
            ok: false,
            detail: format!("{}", err),
        },
        (Expectation::TypechecksAt(ty_text), Ok(p)) => {
            let rendered = p.ty.to_string();
            if &rendered == ty_text {
                EntryOutcome {
                    name: entry.name.clone(),
                    ok: true,
                    detail: format!("typechecks at {}", rendered),
                }
            } else {
                EntryOutcome {
                    name: entry.name.clone(),
                    ok: false,
                    detail: format!("expected type {}, got {}", ty_text, rendered),
                }
            }
        }
        (Expectation::EvaluatesTo(want), Ok(p)) => match run(p.term.clone(), max_steps, |_, _, _| {}) {
            Ok(result) => match decode(&result.value, &p.ty) {
                Ok(decoded) => {
                    let got = decoded.to_string();
                    if &got == want {
                        EntryOutcome {
                            name: entry.name.clone(),
                            ok: true,
                            detail: format!("evaluates to {} in {} steps", got, result.steps),
                        }
                    } else {
                        EntryOutcome {
                            name: entry.name.clone(),
                            ok: false,
                            detail: format!("expected {}, got {}", want, got),
                        }
                    }
                }
                Err(e) => EntryOutcome {
                    name: entry.name.clone(),
                    ok: false,
                    detail: format!("terminal value does not decode: {}", e),
                },
            },
            Err(e) => EntryOutcome {
                name: entry.name.clone(),
                ok: false,
                detail: format!("evaluation failed: {}", e),
            },
        },
    }
}

/// The standard definitions shared by the richer corpus programs:
/// encodings of booleans and naturals, list and tree helpers, difference
/// lists, and queues. Corpus files embed the subsets they need so each
/// file stays runnable on its own; this is the canonical full text.
pub fn prelude() -> &'static str {
    include_str!("../corpus/prelude.ld")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_parses() {
        let entries = parse_manifest(
            "# comment\n\
             unit unit.ld core value ()\n\
             forget forget.ld core typeerror UNUSED-BINDER\n",
        )
        .unwrap();
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[0].expect, Expectation::EvaluatesTo("()".into()));
        assert!(!entries[1].needs_recursion);
    }
}
