use crate::error::{Error, Result};
use serde::Serialize;
use std::fmt;

/// A rational function tower GF(2)(v_0)(v_1)...(v_{k-1}).
///
/// Variables are ordered: v_0 < v_1 < ... < v_{k-1}.  The last variable plays
/// the role of the transcendental over which places and residues are taken;
/// the remaining variables form the base field.  An empty tower is GF(2).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Tower {
    vars: Vec<String>,
}

impl Tower {
    pub fn new(vars: Vec<String>) -> Result<Self> {
        for (i, v) in vars.iter().enumerate() {
            if v.is_empty() || !v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(Error::Domain(format!("bad variable name {v:?}")));
            }
            if v.chars().next().unwrap().is_ascii_digit() {
                return Err(Error::Domain(format!("variable name {v:?} starts with a digit")));
            }
            if vars[..i].contains(v) {
                return Err(Error::Domain(format!("duplicate variable {v:?}")));
            }
        }
        Ok(Tower { vars })
    }

    /// Parse a tower spec like "t1,t2;x": base variables, then the top one.
    /// A spec without ';' lists all variables in order.
    pub fn parse(spec: &str) -> Result<Self> {
        let cleaned = spec.replace(';', ",");
        let vars: Vec<String> = cleaned
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect();
        Tower::new(vars)
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn var_name(&self, id: usize) -> &str {
        &self.vars[id]
    }

    pub fn names(&self) -> &[String] {
        &self.vars
    }

    pub fn id_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Id of the top variable (the "x" of the tower).
    pub fn top(&self) -> Result<usize> {
        if self.vars.is_empty() {
            return Err(Error::Domain("tower GF(2) has no top variable".into()));
        }
        Ok(self.vars.len() - 1)
    }

    /// The tower with the top variable removed (the base field).
    pub fn base(&self) -> Result<Tower> {
        if self.vars.is_empty() {
            return Err(Error::Domain("tower GF(2) has no base".into()));
        }
        Ok(Tower { vars: self.vars[..self.vars.len() - 1].to_vec() })
    }

    /// Tower for a residue field: drop variable `drop` and append `fresh`
    /// as the new top variable.  Used when a place is linear in `drop`.
    pub fn replace_with_top(&self, drop: usize, fresh: &str) -> Result<Tower> {
        let mut vars: Vec<String> = self
            .vars
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != drop)
            .map(|(_, v)| v.clone())
            .collect();
        let mut name = fresh.to_string();
        while vars.contains(&name) {
            name.push('_');
        }
        vars.push(name);
        Tower::new(vars)
    }
}

impl fmt::Display for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.vars.is_empty() {
            return write!(f, "GF(2)");
        }
        write!(f, "GF(2)({})", self.vars.join(")("))
    }
}
