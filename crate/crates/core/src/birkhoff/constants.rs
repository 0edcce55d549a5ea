//! The constant matrices, loaded from a plain-text table.

use std::collections::HashMap;
use std::path::Path;
use std::sync::OnceLock;

use thiserror::Error;

use super::matrix::ExactMatrix4;
use super::rational::{GaussianRational, ParseGaussianError};

const EMBEDDED: &str = include_str!("constants.txt");

/// Names required in every constants table.
pub const NAMES: [&str; 10] = ["T", "P", "Q", "QCAL", "W1", "W2", "Q1", "Q2", "Q3", "Q4"];

#[derive(Debug, Error)]
pub enum ConstantsError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Entry { line: usize, source: ParseGaussianError },
    #[error("matrix `{0}` missing")]
    Missing(&'static str),
    #[error("matrix `{0}` defined twice")]
    Duplicate(String),
    #[error("cannot read constants file: {0}")]
    Io(#[from] std::io::Error),
}

/// 𝒯, P, Q, 𝒬 and the reduction matrices W₁, W₂, Q₁..Q₄.
#[derive(Debug, Clone, PartialEq)]
pub struct Constants {
    pub t: ExactMatrix4,
    pub p: ExactMatrix4,
    pub q: ExactMatrix4,
    pub qcal: ExactMatrix4,
    pub w1: ExactMatrix4,
    pub w2: ExactMatrix4,
    pub q1: ExactMatrix4,
    pub q2: ExactMatrix4,
    pub q3: ExactMatrix4,
    pub q4: ExactMatrix4,
}

impl Constants {
    /// The table shipped with the crate.
    pub fn embedded() -> &'static Constants {
        static C: OnceLock<Constants> = OnceLock::new();
        C.get_or_init(|| Constants::parse(EMBEDDED).expect("embedded constants table is well formed"))
    }

    pub fn embedded_text() -> &'static str {
        EMBEDDED
    }

    pub fn from_path(path: &Path) -> Result<Self, ConstantsError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self, ConstantsError> {
        let mut found: HashMap<String, ExactMatrix4> = HashMap::new();
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        while let Some((line, header)) = lines.next() {
            let fields: Vec<&str> = header.split_whitespace().collect();
            let [kw, name, scale] = fields[..] else {
                return Err(ConstantsError::Syntax { line, msg: format!("expected `matrix NAME SCALE`, got `{header}`") });
            };
            if kw != "matrix" {
                return Err(ConstantsError::Syntax { line, msg: format!("expected `matrix`, got `{kw}`") });
            }
            let scale: GaussianRational = scale.parse().map_err(|source| ConstantsError::Entry { line, source })?;
            let mut m = ExactMatrix4::zero();
            for i in 0..4 {
                let Some((line, row)) = lines.next() else {
                    return Err(ConstantsError::Syntax { line, msg: format!("matrix `{name}` is truncated") });
                };
                let cells: Vec<&str> = row.split_whitespace().collect();
                if cells.len() != 4 {
                    return Err(ConstantsError::Syntax { line, msg: format!("expected 4 entries, got {}", cells.len()) });
                }
                for (j, c) in cells.iter().enumerate() {
                    let v: GaussianRational = c.parse().map_err(|source| ConstantsError::Entry { line, source })?;
                    m.set(i, j, scale.clone() * v);
                }
            }
            if found.insert(name.to_string(), m).is_some() {
                return Err(ConstantsError::Duplicate(name.to_string()));
            }
        }
        let mut take = |n: &'static str| found.remove(n).ok_or(ConstantsError::Missing(n));
        Ok(Constants {
            t: take("T")?,
            p: take("P")?,
            q: take("Q")?,
            qcal: take("QCAL")?,
            w1: take("W1")?,
            w2: take("W2")?,
            q1: take("Q1")?,
            q2: take("Q2")?,
            q3: take("Q3")?,
            q4: take("Q4")?,
        })
    }

    pub fn get(&self, name: &str) -> Option<&ExactMatrix4> {
        Some(match name {
            "T" => &self.t,
            "P" => &self.p,
            "Q" => &self.q,
            "QCAL" => &self.qcal,
            "W1" => &self.w1,
            "W2" => &self.w2,
            "Q1" => &self.q1,
            "Q2" => &self.q2,
            "Q3" => &self.q3,
            "Q4" => &self.q4,
            _ => return None,
        })
    }
}
