//! String-keyed hierarchical parameter tree with a flat text format.
//!
//! Leaves live at dot-separated paths ("solver.tol") and carry one of four
//! typed values. The on-disk format is one `path = value` assignment per
//! line; `#` starts a comment, blank lines are skipped, later assignments
//! win. Values are typed by shape: `true`/`false` are booleans, bare
//! integers stay integral, anything with a decimal point or exponent is
//! real, and everything else is a string.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// A typed parameter value.
#[derive(Debug, Clone, PartialEq)]
pub enum Leaf {
    Str(String),
    Int(i64),
    Real(f64),
    Bool(bool),
}

impl Leaf {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Leaf::Str(_) => "string",
            Leaf::Int(_) => "integer",
            Leaf::Real(_) => "real",
            Leaf::Bool(_) => "boolean",
        }
    }

    fn parse(text: &str) -> Leaf {
        match text {
            "true" => return Leaf::Bool(true),
            "false" => return Leaf::Bool(false),
            _ => {}
        }
        if let Ok(i) = text.parse::<i64>() {
            return Leaf::Int(i);
        }
        if let Ok(r) = text.parse::<f64>() {
            return Leaf::Real(r);
        }
        Leaf::Str(text.to_string())
    }
}

impl fmt::Display for Leaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Leaf::Str(s) => write!(f, "{s}"),
            Leaf::Int(i) => write!(f, "{i}"),
            // Debug formatting keeps a decimal point or exponent, so the
            // value re-parses as a real with the exact same bits.
            Leaf::Real(r) => write!(f, "{r:?}"),
            Leaf::Bool(b) => write!(f, "{b}"),
        }
    }
}

impl From<&str> for Leaf {
    fn from(v: &str) -> Self {
        Leaf::Str(v.to_string())
    }
}

impl From<String> for Leaf {
    fn from(v: String) -> Self {
        Leaf::Str(v)
    }
}

impl From<i64> for Leaf {
    fn from(v: i64) -> Self {
        Leaf::Int(v)
    }
}

impl From<usize> for Leaf {
    fn from(v: usize) -> Self {
        Leaf::Int(v as i64)
    }
}

impl From<f64> for Leaf {
    fn from(v: f64) -> Self {
        Leaf::Real(v)
    }
}

impl From<bool> for Leaf {
    fn from(v: bool) -> Self {
        Leaf::Bool(v)
    }
}

fn valid_path(path: &str) -> bool {
    !path.is_empty()
        && path.split('.').all(|seg| {
            !seg.is_empty()
                && seg
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        })
}

/// Map from dotted paths to typed leaves. Last write wins.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamTree {
    leaves: BTreeMap<String, Leaf>,
}

impl ParamTree {
    pub fn new() -> Self {
        Self::default()
    }

    /// Stores `value` at `path`, replacing any previous leaf.
    ///
    /// Panics on a malformed path; paths coming from user input go through
    /// [`ParamTree::parse`], which reports them as errors instead.
    pub fn put(&mut self, path: &str, value: impl Into<Leaf>) {
        assert!(valid_path(path), "invalid parameter path {path:?}");
        self.leaves.insert(path.to_string(), value.into());
    }

    pub fn get(&self, path: &str) -> Option<&Leaf> {
        self.leaves.get(path)
    }

    pub fn contains(&self, path: &str) -> bool {
        self.leaves.contains_key(path)
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    /// All leaves in path order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &Leaf)> {
        self.leaves.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Real-valued leaf at `path`, or `default` when absent. Integer leaves
    /// widen; other types are an error naming the path.
    pub fn get_real(&self, path: &str, default: f64) -> Result<f64> {
        match self.leaves.get(path) {
            None => Ok(default),
            Some(Leaf::Real(r)) => Ok(*r),
            Some(Leaf::Int(i)) => Ok(*i as f64),
            Some(other) => Err(Error::Config {
                path: path.to_string(),
                detail: format!("expected a real, found {} {other}", other.kind_name()),
            }),
        }
    }

    /// Integer leaf at `path`, or `default` when absent.
    pub fn get_int(&self, path: &str, default: i64) -> Result<i64> {
        match self.leaves.get(path) {
            None => Ok(default),
            Some(Leaf::Int(i)) => Ok(*i),
            Some(other) => Err(Error::Config {
                path: path.to_string(),
                detail: format!("expected an integer, found {} {other}", other.kind_name()),
            }),
        }
    }

    /// Nonnegative integer leaf at `path`, or `default` when absent.
    pub fn get_count(&self, path: &str, default: usize) -> Result<usize> {
        let v = self.get_int(path, default as i64)?;
        usize::try_from(v).map_err(|_| Error::Config {
            path: path.to_string(),
            detail: format!("expected a nonnegative count, found {v}"),
        })
    }

    /// Boolean leaf at `path`, or `default` when absent.
    pub fn get_bool(&self, path: &str, default: bool) -> Result<bool> {
        match self.leaves.get(path) {
            None => Ok(default),
            Some(Leaf::Bool(b)) => Ok(*b),
            Some(other) => Err(Error::Config {
                path: path.to_string(),
                detail: format!("expected a boolean, found {} {other}", other.kind_name()),
            }),
        }
    }

    /// String leaf at `path`, or `default` when absent.
    pub fn get_str(&self, path: &str, default: &str) -> Result<String> {
        match self.leaves.get(path) {
            None => Ok(default.to_string()),
            Some(Leaf::Str(s)) => Ok(s.clone()),
            Some(other) => Err(Error::Config {
                path: path.to_string(),
                detail: format!("expected a string, found {} {other}", other.kind_name()),
            }),
        }
    }

    /// Parses the flat `path = value` format. Lines are independent; later
    /// assignments to the same path win.
    pub fn parse(text: &str) -> Result<Self> {
        let mut tree = Self::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let content = content.trim();
            if content.is_empty() {
                continue;
            }
            let (path, value) = content.split_once('=').ok_or_else(|| Error::ConfigParse {
                line,
                detail: format!("expected `path = value`, found {content:?}"),
            })?;
            let path = path.trim();
            if !valid_path(path) {
                return Err(Error::ConfigParse {
                    line,
                    detail: format!("invalid parameter path {path:?}"),
                });
            }
            let value = value.trim();
            if value.is_empty() {
                return Err(Error::ConfigParse {
                    line,
                    detail: format!("missing value for {path:?}"),
                });
            }
            tree.leaves.insert(path.to_string(), Leaf::parse(value));
        }
        Ok(tree)
    }

    /// Serializes to the same format [`ParamTree::parse`] reads. Parsing the
    /// output reproduces the leaf set exactly.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (path, leaf) in &self.leaves {
            out.push_str(path);
            out.push_str(" = ");
            out.push_str(&leaf.to_string());
            out.push('\n');
        }
        out
    }
}
