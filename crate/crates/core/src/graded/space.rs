use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Grassmann parity of a single coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoordKind {
    Bosonic,
    Fermionic,
}

impl CoordKind {
    pub fn parity(self) -> u8 {
        match self {
            CoordKind::Bosonic => 0,
            CoordKind::Fermionic => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Coord {
    pub name: String,
    pub kind: CoordKind,
    /// Index among coordinates of the same kind.
    pub slot: usize,
}

/// Ordered list of graded coordinates, i.e. global coordinates on ℝ^{p|q}.
///
/// The declaration order fixes the canonical order of monomials and the
/// order in which vector-field components are listed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GradedSpace {
    coords: Vec<Coord>,
    bosons: Vec<usize>,
    fermions: Vec<usize>,
}

pub const MAX_FERMIONS: usize = 32;

impl GradedSpace {
    pub fn new<S: Into<String>>(coords: impl IntoIterator<Item = (S, CoordKind)>) -> Result<Self> {
        let mut out = GradedSpace {
            coords: Vec::new(),
            bosons: Vec::new(),
            fermions: Vec::new(),
        };
        for (name, kind) in coords {
            let name = name.into();
            if !is_identifier(&name) {
                return Err(Error::InvalidSpace(format!("`{name}` is not a valid coordinate name")));
            }
            if out.coords.iter().any(|c| c.name == name) {
                return Err(Error::InvalidSpace(format!("duplicate coordinate `{name}`")));
            }
            let slot = match kind {
                CoordKind::Bosonic => {
                    out.bosons.push(out.coords.len());
                    out.bosons.len() - 1
                }
                CoordKind::Fermionic => {
                    out.fermions.push(out.coords.len());
                    out.fermions.len() - 1
                }
            };
            out.coords.push(Coord { name, kind, slot });
        }
        if out.fermions.len() > MAX_FERMIONS {
            return Err(Error::InvalidSpace(format!(
                "at most {MAX_FERMIONS} fermionic coordinates are supported"
            )));
        }
        Ok(out)
    }

    pub fn coords(&self) -> &[Coord] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Number of bosonic coordinates (p).
    pub fn n_bosons(&self) -> usize {
        self.bosons.len()
    }

    /// Number of fermionic coordinates (q).
    pub fn n_fermions(&self) -> usize {
        self.fermions.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|c| c.name == name)
    }

    pub fn coord(&self, name: &str) -> Result<&Coord> {
        self.coords
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::UnknownCoordinate(name.to_string()))
    }

    pub fn boson_name(&self, slot: usize) -> &str {
        &self.coords[self.bosons[slot]].name
    }

    pub fn fermion_name(&self, slot: usize) -> &str {
        &self.coords[self.fermions[slot]].name
    }
}

impl FromStr for GradedSpace {
    type Err = Error;

    /// Parses `x1:b,x2:b,th:f`.
    fn from_str(s: &str) -> Result<Self> {
        let mut coords = Vec::new();
        for entry in s.split(',') {
            let entry = entry.trim();
            let (name, kind) = entry
                .split_once(':')
                .ok_or_else(|| Error::InvalidSpace(format!("entry `{entry}` lacks `:b` or `:f`")))?;
            let kind = match kind.trim() {
                "b" => CoordKind::Bosonic,
                "f" => CoordKind::Fermionic,
                other => return Err(Error::InvalidSpace(format!("unknown kind `{other}`"))),
            };
            coords.push((name.trim().to_string(), kind));
        }
        GradedSpace::new(coords)
    }
}

impl fmt::Display for GradedSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            let k = match c.kind {
                CoordKind::Bosonic => "b",
                CoordKind::Fermionic => "f",
            };
            write!(f, "{}:{}", c.name, k)?;
        }
        Ok(())
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
