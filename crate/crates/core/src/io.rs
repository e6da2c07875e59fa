//! JSON theory files.
//!
//! ```json
//! {
//!   "format_version": "1",
//!   "systems": [{"name": "A", "dim": 2, "effect_model": "full_dual"}],
//!   "composites": [{"name": "AB", "left": "A", "right": "B", "dim": 5,
//!                   "blocks": [{"i": 1, "j": 1, "vertices": [1, 2], "weights": ["1/2", "1/2"]}]}]
//! }
//! ```
//!
//! Rationals are strings. Restricted cones are written
//! `{"cone": [["1", "1"], ["1", "0"]]}`. The canonical form has sorted keys,
//! blocks sorted by `(i, j)`, reduced rationals, two-space indentation and a
//! trailing newline; composites on the full dual omit `effect_model`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::arith::{format_rational, parse_rational, RVector};
use crate::composition::Block;
use crate::error::{Error, Result};
use crate::system::{EffectModel, SystemSpace};
use crate::theory::Theory;

pub const FORMAT_VERSION: &str = "1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheoryFile {
    pub format_version: String,
    pub systems: Vec<SystemEntry>,
    #[serde(default)]
    pub composites: Vec<CompositeEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemEntry {
    pub name: String,
    pub dim: usize,
    pub effect_model: EffectModelEntry,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EffectModelEntry {
    FullDual,
    Cone(Vec<Vec<String>>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompositeEntry {
    pub name: String,
    pub left: String,
    pub right: String,
    pub dim: usize,
    pub blocks: Vec<BlockEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub effect_model: Option<EffectModelEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockEntry {
    pub i: usize,
    pub j: usize,
    pub vertices: Vec<usize>,
    pub weights: Vec<String>,
}

fn invalid(path: impl Into<String>, message: impl ToString) -> Error {
    Error::Validation { path: path.into(), message: message.to_string() }
}

/// Unknown names pass through; everything else is pinned to `path`.
fn at(path: String) -> impl Fn(Error) -> Error {
    move |e| match e {
        e @ Error::UnknownSystem(_) => e,
        e => invalid(path.clone(), e),
    }
}

fn decode_model(entry: &EffectModelEntry, path: &str) -> Result<EffectModel> {
    match entry {
        EffectModelEntry::FullDual => Ok(EffectModel::FullDual),
        EffectModelEntry::Cone(gens) => {
            let generators = gens
                .iter()
                .enumerate()
                .map(|(g, row)| {
                    row.iter()
                        .enumerate()
                        .map(|(c, x)| parse_rational(x).map_err(|e| invalid(format!("{path}.cone[{g}][{c}]"), e)))
                        .collect::<Result<RVector>>()
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(EffectModel::RestrictedCone { generators })
        }
    }
}

fn encode_model(model: &EffectModel) -> EffectModelEntry {
    match model {
        EffectModel::FullDual => EffectModelEntry::FullDual,
        EffectModel::RestrictedCone { generators } => {
            EffectModelEntry::Cone(generators.iter().map(RVector::to_strings).collect())
        }
    }
}

impl TheoryFile {
    /// Parses without building the theory.
    pub fn parse(text: &str) -> Result<TheoryFile> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: TheoryFile = serde_path_to_error::deserialize(de).map_err(|e| {
            let inner = e.inner();
            if inner.is_data() {
                invalid(e.path().to_string(), inner)
            } else {
                Error::Syntax { line: inner.line(), column: inner.column(), message: inner.to_string() }
            }
        })?;
        if file.format_version != FORMAT_VERSION {
            return Err(invalid(
                "format_version",
                format!("unsupported version {:?}, expected {FORMAT_VERSION:?}", file.format_version),
            ));
        }
        Ok(file)
    }

    pub fn to_theory(&self) -> Result<Theory> {
        let mut theory = Theory::new();
        for (n, s) in self.systems.iter().enumerate() {
            let path = format!("systems[{n}]");
            let model = decode_model(&s.effect_model, &format!("{path}.effect_model"))?;
            let space = SystemSpace::new(s.name.clone(), s.dim, model).map_err(at(path.clone()))?;
            theory.add_system(space).map_err(at(path))?;
        }
        for (n, c) in self.composites.iter().enumerate() {
            let path = format!("composites[{n}]");
            let blocks = c
                .blocks
                .iter()
                .enumerate()
                .map(|(b, entry)| {
                    let weights = entry
                        .weights
                        .iter()
                        .enumerate()
                        .map(|(w, x)| {
                            parse_rational(x).map_err(|e| invalid(format!("{path}.blocks[{b}].weights[{w}]"), e))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Ok(Block::new(entry.i, entry.j, entry.vertices.clone(), weights))
                })
                .collect::<Result<Vec<_>>>()?;
            let model = c
                .effect_model
                .as_ref()
                .map(|m| decode_model(m, &format!("{path}.effect_model")))
                .transpose()?;
            theory.add_composite(&c.name, &c.left, &c.right, c.dim, blocks, model).map_err(at(path))?;
        }
        Ok(theory)
    }

    pub fn from_theory(theory: &Theory) -> TheoryFile {
        let systems = theory
            .systems()
            .iter()
            .map(|s| SystemEntry {
                name: s.name().to_string(),
                dim: s.dim(),
                effect_model: encode_model(s.effect_model()),
            })
            .collect();
        let composites = theory
            .composites()
            .iter()
            .map(|c| {
                let rule = c.rule();
                CompositeEntry {
                    name: c.name().to_string(),
                    left: rule.left().name().to_string(),
                    right: rule.right().name().to_string(),
                    dim: rule.composite_dim(),
                    blocks: rule
                        .blocks()
                        .iter()
                        .map(|b| BlockEntry {
                            i: b.i,
                            j: b.j,
                            vertices: b.vertices.clone(),
                            weights: b.weights.iter().map(format_rational).collect(),
                        })
                        .collect(),
                    effect_model: match c.space().effect_model() {
                        EffectModel::FullDual => None,
                        m => Some(encode_model(m)),
                    },
                }
            })
            .collect();
        TheoryFile { format_version: FORMAT_VERSION.to_string(), systems, composites }
    }

    /// Canonical text: sorted keys, pretty-printed, trailing newline.
    pub fn to_canonical_string(&self) -> String {
        // Going through `Value` sorts object keys (serde_json's map is a BTreeMap).
        let value = serde_json::to_value(self).expect("theory files always serialize");
        let mut out = serde_json::to_string_pretty(&value).expect("values always serialize");
        out.push('\n');
        out
    }
}

pub fn parse_theory(text: &str) -> Result<Theory> {
    TheoryFile::parse(text)?.to_theory()
}

pub fn serialize_theory(theory: &Theory) -> String {
    TheoryFile::from_theory(theory).to_canonical_string()
}

/// `serialize(parse(text))`.
pub fn canonicalize(text: &str) -> Result<String> {
    Ok(serialize_theory(&parse_theory(text)?))
}

pub fn read_theory(path: &Path) -> Result<Theory> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_theory(&text)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })
}
