//! TOML input files: scalar graphs, matrix-mode ribbon data, and exported
//! Mellin representations. Rational literals are quoted `p/q` strings so
//! nothing is lost to floating point on the way in or out.

use std::collections::BTreeMap;
use std::path::Path;

use cmrep_core::graph::{FeynmanGraph, InvariantSpec, LegSpec, LineSpec};
use cmrep_core::linalg::AntisymMatrix;
use cmrep_core::mellin::{CmMode, CmRep, CmRow};
use cmrep_core::poly::{Monomial, PolynomialSum, RibbonData, RibbonModel};
use cmrep_core::rat::{self, Rat};
use cmrep_core::CoreError;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {message}")]
    Read { path: String, message: String },
    #[error("{context}: {source}")]
    Toml {
        context: String,
        #[source]
        source: Box<toml::de::Error>,
    },
    #[error("{key}: {message}")]
    Value { key: String, message: String },
    #[error(transparent)]
    Core(#[from] CoreError),
}

fn value_err(key: impl Into<String>, message: impl Into<String>) -> FormatError {
    FormatError::Value {
        key: key.into(),
        message: message.into(),
    }
}

fn parse_rat(text: &str, key: impl Fn() -> String) -> Result<Rat, FormatError> {
    rat::from_text(text).map_err(|_| value_err(key(), format!("bad rational literal {text:?}")))
}

fn read_file(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|e| FormatError::Read {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn parse_toml<T: serde::de::DeserializeOwned>(text: &str, context: &str) -> Result<T, FormatError> {
    toml::from_str(text).map_err(|e| FormatError::Toml {
        context: String::from(context),
        source: Box::new(e),
    })
}

/// On-disk form of an ordinary scalar graph.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub vertices: Vec<String>,
    pub lines: Vec<LineEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub external_legs: Vec<LegEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub invariants: Vec<InvariantEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineEntry {
    pub id: u32,
    pub endpoints: [String; 2],
    pub mass2: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LegEntry {
    pub vertex: String,
    pub label: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvariantEntry {
    /// One side of the leg bipartition the invariant belongs to.
    pub legs: Vec<String>,
    pub symbol: String,
}

impl GraphFile {
    pub fn parse(text: &str, context: &str) -> Result<Self, FormatError> {
        parse_toml(text, context)
    }

    pub fn load(path: &Path) -> Result<Self, FormatError> {
        Self::parse(&read_file(path)?, &path.display().to_string())
    }

    pub fn to_graph(&self) -> Result<FeynmanGraph, FormatError> {
        let mut lines = Vec::with_capacity(self.lines.len());
        for (i, e) in self.lines.iter().enumerate() {
            let mass2 = parse_rat(&e.mass2, || format!("lines[{i}].mass2"))?;
            if mass2.is_negative() {
                return Err(value_err(
                    format!("lines[{i}].mass2"),
                    "squared mass must be non-negative",
                ));
            }
            lines.push(LineSpec {
                id: e.id,
                ends: (e.endpoints[0].clone(), e.endpoints[1].clone()),
                mass2,
            });
        }
        let legs = self
            .external_legs
            .iter()
            .map(|e| LegSpec {
                label: e.label.clone(),
                vertex: e.vertex.clone(),
            })
            .collect();
        let invariants = self
            .invariants
            .iter()
            .map(|e| InvariantSpec {
                legs: e.legs.clone(),
                symbol: e.symbol.clone(),
            })
            .collect();
        Ok(FeynmanGraph::new(
            self.vertices.clone(),
            lines,
            legs,
            invariants,
        )?)
    }
}

/// On-disk form of matrix-mode ribbon data.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RibbonFile {
    /// "gw" or "lsz".
    pub model: String,
    #[serde(rename = "L")]
    pub lines: usize,
    #[serde(rename = "F")]
    pub faces: i64,
    #[serde(rename = "g")]
    pub genus: i64,
    #[serde(rename = "s")]
    pub weight: String,
    pub parity_n: i64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub externals: Vec<String>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<String>>,
    #[serde(rename = "P", default, skip_serializing_if = "Vec::is_empty")]
    pub p: Vec<Vec<String>>,
}

impl RibbonFile {
    pub fn parse(text: &str, context: &str) -> Result<Self, FormatError> {
        parse_toml(text, context)
    }

    pub fn load(path: &Path) -> Result<Self, FormatError> {
        Self::parse(&read_file(path)?, &path.display().to_string())
    }

    pub fn to_ribbon(&self) -> Result<(RibbonData, Vec<Rat>), FormatError> {
        let model = match self.model.to_ascii_lowercase().as_str() {
            "gw" => RibbonModel::GrosseWulkenhaar,
            "lsz" => RibbonModel::Lsz,
            other => {
                return Err(value_err(
                    "model",
                    format!("unknown model {other:?}, expected \"gw\" or \"lsz\""),
                ))
            }
        };
        let dim = self.b.len();
        let mut entries = vec![vec![Rat::default(); dim]; dim];
        for (i, row) in self.b.iter().enumerate() {
            if row.len() != dim {
                return Err(value_err(
                    format!("B[{i}]"),
                    format!("row has {} entries, expected {dim}", row.len()),
                ));
            }
            for (j, text) in row.iter().enumerate() {
                entries[i][j] = parse_rat(text, || format!("B[{i}][{j}]"))?;
            }
        }
        for i in 0..dim {
            for j in i..dim {
                if entries[i][j] != -entries[j][i].clone() {
                    return Err(FormatError::Core(CoreError::NotAntisymmetric {
                        row: i,
                        col: j,
                    }));
                }
            }
        }
        let mut upper = Vec::with_capacity(dim * (dim - 1) / 2);
        for i in 0..dim {
            for j in (i + 1)..dim {
                upper.push(entries[i][j].clone());
            }
        }
        let b = AntisymMatrix::from_upper(dim, &upper)?;
        let mut p = Vec::with_capacity(self.p.len());
        for (i, row) in self.p.iter().enumerate() {
            let mut out = Vec::with_capacity(row.len());
            for (j, text) in row.iter().enumerate() {
                out.push(parse_rat(text, || format!("P[{i}][{j}]"))?);
            }
            p.push(out);
        }
        let weight = parse_rat(&self.weight, || String::from("s"))?;
        let mut externals = Vec::with_capacity(self.externals.len());
        for (i, text) in self.externals.iter().enumerate() {
            externals.push(parse_rat(text, || format!("externals[{i}]"))?);
        }
        let data = RibbonData::new(
            model,
            b,
            p,
            self.lines,
            self.faces,
            self.genus,
            weight,
            self.parity_n,
        )?;
        Ok((data, externals))
    }
}

/// On-disk form of a Mellin representation, as exported by the `cm` verb.
/// Importing what was exported reproduces the representation exactly.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CmFile {
    /// "commutative" or "noncommutative".
    pub mode: String,
    pub num_lines: usize,
    pub prefactor: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub masses: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub symbol_values: BTreeMap<String, String>,
    pub u_rows: Vec<RowEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub v_real_rows: Vec<RowEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub v_imag_rows: Vec<RowEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowEntry {
    pub coeff: String,
    pub exponents: Vec<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol: Option<String>,
}

impl RowEntry {
    fn from_row(r: &CmRow) -> Self {
        Self {
            coeff: rat::to_text(&r.coeff),
            exponents: r.exponents.clone(),
            symbol: r.symbol.clone(),
        }
    }
}

impl CmFile {
    pub fn parse(text: &str, context: &str) -> Result<Self, FormatError> {
        parse_toml(text, context)
    }

    pub fn load(path: &Path) -> Result<Self, FormatError> {
        Self::parse(&read_file(path)?, &path.display().to_string())
    }

    pub fn from_rep(cm: &CmRep) -> Self {
        Self {
            mode: String::from(match cm.mode() {
                CmMode::Commutative => "commutative",
                CmMode::NonCommutative => "noncommutative",
            }),
            num_lines: cm.num_lines(),
            prefactor: rat::to_text(cm.prefactor()),
            masses: cm.masses().iter().map(rat::to_text).collect(),
            symbol_values: cm
                .symbol_values()
                .iter()
                .map(|(k, v)| (k.clone(), rat::to_text(v)))
                .collect(),
            u_rows: cm.u_rows().iter().map(RowEntry::from_row).collect(),
            v_real_rows: cm.v_real_rows().iter().map(RowEntry::from_row).collect(),
            v_imag_rows: cm.v_imag_rows().iter().map(RowEntry::from_row).collect(),
        }
    }

    pub fn render(&self) -> String {
        toml::to_string(self).expect("representation serializes")
    }

    pub fn to_rep(&self) -> Result<CmRep, FormatError> {
        let mode = match self.mode.as_str() {
            "commutative" => CmMode::Commutative,
            "noncommutative" => CmMode::NonCommutative,
            other => {
                return Err(value_err(
                    "mode",
                    format!("unknown mode {other:?}, expected \"commutative\" or \"noncommutative\""),
                ))
            }
        };
        let mut symbol_values = BTreeMap::new();
        for (k, v) in &self.symbol_values {
            symbol_values.insert(k.clone(), parse_rat(v, || format!("symbol_values.{k}"))?);
        }
        let poly = |name: &str, rows: &[RowEntry], values: BTreeMap<String, Rat>| {
            let mut monomials = Vec::with_capacity(rows.len());
            for (i, r) in rows.iter().enumerate() {
                monomials.push(Monomial {
                    coeff: parse_rat(&r.coeff, || format!("{name}[{i}].coeff"))?,
                    exponents: r.exponents.clone(),
                    symbol: r.symbol.clone(),
                    origin: None,
                });
            }
            Ok::<_, FormatError>(PolynomialSum::new(name, self.num_lines, monomials, values)?)
        };
        let hu = poly("u_rows", &self.u_rows, BTreeMap::new())?;
        let hvr = poly("v_real_rows", &self.v_real_rows, symbol_values)?;
        let hvi = poly("v_imag_rows", &self.v_imag_rows, BTreeMap::new())?;
        let mut masses = Vec::with_capacity(self.masses.len());
        for (i, text) in self.masses.iter().enumerate() {
            masses.push(parse_rat(text, || format!("masses[{i}]"))?);
        }
        let prefactor = parse_rat(&self.prefactor, || String::from("prefactor"))?;
        Ok(CmRep::build(mode, &hu, &hvr, &hvi, masses, prefactor)?)
    }
}
