use std::collections::HashSet;
use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;
use thiserror::Error;

/// A finite scalar set with two total operation tables. No laws are assumed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiMagma {
    names: Vec<String>,
    plus: Vec<Vec<u16>>,
    times: Vec<Vec<u16>>,
    label: String,
}

#[derive(Debug, Error)]
pub enum BiMagmaError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed bi-magma file: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("carrier is empty")]
    Empty,
    #[error("carrier has more than 65535 elements")]
    TooLarge,
    #[error("duplicate scalar name `{0}`")]
    Duplicate(String),
    #[error("scalar name `{0}` must be alphanumeric")]
    BadName(String),
    #[error("table `{table}` must be {n}x{n}, row {row} has {len} entries")]
    NotSquare {
        table: &'static str,
        n: usize,
        row: usize,
        len: usize,
    },
    #[error("table `{table}` must have {n} rows, found {rows}")]
    RowCount {
        table: &'static str,
        n: usize,
        rows: usize,
    },
    #[error("table `{table}` entry ({row},{col}) = {value} is not a carrier index")]
    OutOfRange {
        table: &'static str,
        row: usize,
        col: usize,
        value: i64,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBiMagma {
    carrier: Vec<String>,
    plus: Vec<Vec<i64>>,
    times: Vec<Vec<i64>>,
}

fn check_table(
    table: &'static str,
    raw: &[Vec<i64>],
    n: usize,
) -> Result<Vec<Vec<u16>>, BiMagmaError> {
    if raw.len() != n {
        return Err(BiMagmaError::RowCount {
            table,
            n,
            rows: raw.len(),
        });
    }
    let mut out = Vec::with_capacity(n);
    for (row, r) in raw.iter().enumerate() {
        if r.len() != n {
            return Err(BiMagmaError::NotSquare {
                table,
                n,
                row,
                len: r.len(),
            });
        }
        let mut line = Vec::with_capacity(n);
        for (col, &value) in r.iter().enumerate() {
            if value < 0 || value as usize >= n {
                return Err(BiMagmaError::OutOfRange {
                    table,
                    row,
                    col,
                    value,
                });
            }
            line.push(value as u16);
        }
        out.push(line);
    }
    Ok(out)
}

pub fn is_scalar_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

impl BiMagma {
    pub fn new(
        names: Vec<String>,
        plus: Vec<Vec<i64>>,
        times: Vec<Vec<i64>>,
        label: &str,
    ) -> Result<BiMagma, BiMagmaError> {
        let n = names.len();
        if n == 0 {
            return Err(BiMagmaError::Empty);
        }
        if n > u16::MAX as usize {
            return Err(BiMagmaError::TooLarge);
        }
        let mut seen = HashSet::new();
        for name in &names {
            if !is_scalar_name(name) {
                return Err(BiMagmaError::BadName(name.clone()));
            }
            if !seen.insert(name) {
                return Err(BiMagmaError::Duplicate(name.clone()));
            }
        }
        Ok(BiMagma {
            plus: check_table("plus", &plus, n)?,
            times: check_table("times", &times, n)?,
            names,
            label: label.to_string(),
        })
    }

    pub fn from_toml_str(text: &str, label: &str) -> Result<BiMagma, BiMagmaError> {
        let raw: RawBiMagma = toml::from_str(text)?;
        BiMagma::new(raw.carrier, raw.plus, raw.times, label)
    }

    pub fn load(path: &Path) -> Result<BiMagma, BiMagmaError> {
        let text = std::fs::read_to_string(path).map_err(|source| BiMagmaError::Io {
            path: path.display().to_string(),
            source,
        })?;
        BiMagma::from_toml_str(&text, &path.display().to_string())
    }

    /// Integers modulo 4.
    pub fn z4() -> BiMagma {
        BiMagma::from_toml_str(include_str!("../../fixtures/z4.bimagma"), "z4.bimagma")
            .expect("bundled fixture")
    }

    /// Three scalars whose operations are neither commutative nor associative.
    pub fn rnd() -> BiMagma {
        BiMagma::from_toml_str(include_str!("../../fixtures/rnd.bimagma"), "rnd.bimagma")
            .expect("bundled fixture")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: u16) -> &str {
        &self.names[i as usize]
    }

    pub fn index_of(&self, name: &str) -> Option<u16> {
        self.names.iter().position(|n| n == name).map(|i| i as u16)
    }

    pub fn add(&self, a: u16, b: u16) -> u16 {
        self.plus[a as usize][b as usize]
    }

    pub fn mul(&self, a: u16, b: u16) -> u16 {
        self.times[a as usize][b as usize]
    }

    /// Where the tables came from, used when rendering re-run commands.
    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Selects the plain calculus or the scalar extension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mode {
    Plain,
    Algebraic(Arc<BiMagma>),
}

impl Mode {
    pub fn algebraic(s: BiMagma) -> Mode {
        Mode::Algebraic(Arc::new(s))
    }

    pub fn scalars(&self) -> Option<&BiMagma> {
        match self {
            Mode::Plain => None,
            Mode::Algebraic(s) => Some(s),
        }
    }

    pub fn is_algebraic(&self) -> bool {
        matches!(self, Mode::Algebraic(_))
    }

    /// CLI flags selecting this mode.
    pub fn cli_flags(&self) -> String {
        match self {
            Mode::Plain => String::new(),
            Mode::Algebraic(s) => format!(" --mode algebraic --scalars {}", s.label()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_load() {
        let z = BiMagma::z4();
        assert_eq!(z.len(), 4);
        assert_eq!(z.add(3, 2), 1);
        assert_eq!(z.mul(2, 3), 2);
        let r = BiMagma::rnd();
        let n = r.len() as u16;
        let comm = (0..n).all(|a| (0..n).all(|b| r.add(a, b) == r.add(b, a)));
        let assoc = (0..n).all(|a| {
            (0..n).all(|b| (0..n).all(|c| r.add(r.add(a, b), c) == r.add(a, r.add(b, c))))
        });
        let mcomm = (0..n).all(|a| (0..n).all(|b| r.mul(a, b) == r.mul(b, a)));
        let massoc = (0..n).all(|a| {
            (0..n).all(|b| (0..n).all(|c| r.mul(r.mul(a, b), c) == r.mul(a, r.mul(b, c))))
        });
        assert!(!comm && !assoc && !mcomm && !massoc);
    }

    #[test]
    fn validation() {
        let bad = |s: &str| BiMagma::from_toml_str(s, "t").unwrap_err();
        assert!(matches!(
            bad("carrier = []\nplus = []\ntimes = []"),
            BiMagmaError::Empty
        ));
        assert!(matches!(
            bad("carrier = [\"a\",\"a\"]\nplus = [[0,0],[0,0]]\ntimes = [[0,0],[0,0]]"),
            BiMagmaError::Duplicate(_)
        ));
        assert!(matches!(
            bad("carrier = [\"a\",\"b\"]\nplus = [[0,0],[0]]\ntimes = [[0,0],[0,0]]"),
            BiMagmaError::NotSquare { .. }
        ));
        assert!(matches!(
            bad("carrier = [\"a\",\"b\"]\nplus = [[0,2],[0,0]]\ntimes = [[0,0],[0,0]]"),
            BiMagmaError::OutOfRange { .. }
        ));
        assert!(matches!(
            bad("carrier = [\"a\"]\nplus = [[0]]"),
            BiMagmaError::Toml(_)
        ));
    }
}
