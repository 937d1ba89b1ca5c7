//! JSON layouts for sequences, operators and synthesis requests.
//!
//! Sequence:
//! ```json
//! {"head": [1.0], "tail": {"kind": "constant", "value": 0.5}}
//! {"head": [], "tail": {"kind": "generator", "name": "alternating", "params": {"v1": 1, "v2": 2}}}
//! [1.0, 0.5, 0.25]
//! ```
//! A bare array is a finite sequence. Generator tails accept an optional
//! `"meta"` object overriding any of the declared asymptotics.
//!
//! Operator: `{"kind": "matrix", "data": [[...], ...]}` or
//! `{"kind": "diagonal", "sequence": <sequence>}`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::operators::{DiagonalOperator, FiniteHermitian, OperatorModel};
use crate::sequences::{Hits, MassBound, NamedGenerator, RealVec, Rule, SequenceModel, Tail, TailMeta, TotalSum};

/// Partial metadata; missing fields fall back to the generator's own.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetaSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limsup: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub liminf: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub floor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub above: Option<MassBound>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub below: Option<MassBound>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_sum: Option<TotalSum>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limsup_hits: Option<Hits>,
}

impl MetaSpec {
    fn merged(&self, base: TailMeta) -> TailMeta {
        TailMeta {
            limsup: self.limsup.unwrap_or(base.limsup),
            liminf: self.liminf.unwrap_or(base.liminf),
            bound: self.bound.unwrap_or(base.bound),
            floor: self.floor.unwrap_or(base.floor),
            above: self.above.unwrap_or(base.above),
            below: self.below.unwrap_or(base.below),
            total_sum: self.total_sum.unwrap_or(base.total_sum),
            limsup_hits: self.limsup_hits.unwrap_or(base.limsup_hits),
        }
    }

    fn full(m: &TailMeta) -> Self {
        MetaSpec {
            limsup: Some(m.limsup),
            liminf: Some(m.liminf),
            bound: Some(m.bound),
            floor: Some(m.floor),
            above: Some(m.above),
            below: Some(m.below),
            total_sum: Some(m.total_sum),
            limsup_hits: Some(m.limsup_hits),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailSpec {
    #[default]
    None,
    Constant { value: f64 },
    Generator {
        #[serde(flatten)]
        generator: NamedGenerator,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        meta: Option<MetaSpec>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceSpec {
    #[serde(default)]
    pub head: Vec<f64>,
    #[serde(default)]
    pub tail: TailSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SequenceInput {
    Finite(Vec<f64>),
    Spec(SequenceSpec),
}

impl SequenceInput {
    pub fn build(&self) -> Result<SequenceModel> {
        match self {
            SequenceInput::Finite(v) => SequenceModel::finite(v.clone()),
            SequenceInput::Spec(spec) => spec.build(),
        }
    }
}

impl SequenceSpec {
    pub fn build(&self) -> Result<SequenceModel> {
        match &self.tail {
            TailSpec::None => SequenceModel::finite(self.head.clone()),
            TailSpec::Constant { value } => SequenceModel::constant_tail(self.head.clone(), *value),
            TailSpec::Generator { generator, meta } => {
                let meta = meta.as_ref().map(|m| m.merged(generator.default_meta(self.head.len())));
                SequenceModel::with_generator_meta(self.head.clone(), *generator, meta)
            }
        }
    }

    /// The spec of a model built from named rules; derived tails are not representable.
    pub fn of(model: &SequenceModel) -> Result<Self> {
        let tail = match model.tail() {
            Tail::None => TailSpec::None,
            Tail::Constant(v) => TailSpec::Constant { value: *v },
            Tail::Generator(g) => match g.rule() {
                Rule::Named(named) => {
                    let mut meta = *g.meta();
                    meta.total_sum = g.remaining_sum();
                    TailSpec::Generator { generator: *named, meta: Some(MetaSpec::full(&meta)) }
                }
                _ => return Err(Error::InvalidInput("derived sequence tails have no JSON form".into())),
            },
        };
        Ok(SequenceSpec { head: model.head().to_vec(), tail })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSpec {
    Matrix { data: Vec<Vec<f64>> },
    Diagonal { sequence: SequenceInput },
}

impl OperatorSpec {
    pub fn build(&self) -> Result<OperatorModel> {
        match self {
            OperatorSpec::Matrix { data } => Ok(OperatorModel::Finite(FiniteHermitian::from_rows(data)?)),
            OperatorSpec::Diagonal { sequence } => {
                let seq = sequence.build()?;
                if seq.is_finite() {
                    Ok(OperatorModel::Finite(FiniteHermitian::diagonal(seq.head())?))
                } else {
                    Ok(OperatorModel::Diagonal(DiagonalOperator::new(seq)?))
                }
            }
        }
    }

    pub fn of(op: &OperatorModel) -> Result<Self> {
        match op {
            OperatorModel::Finite(m) => Ok(OperatorSpec::Matrix { data: m.to_rows() }),
            OperatorModel::Diagonal(d) => Ok(OperatorSpec::Diagonal { sequence: SequenceInput::Spec(SequenceSpec::of(d.diag())?) }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SynthesisMode {
    Finite,
    Truncated,
    Head,
    Greedy,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthesisRequest {
    pub operator: OperatorSpec,
    pub sequence: SequenceInput,
    pub mode: SynthesisMode,
    #[serde(default, rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
}

/// Inline JSON (text starting with `{` or `[`) or the path of a JSON file.
pub fn load_json(arg: &str) -> Result<Value> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        Ok(serde_json::from_str(trimmed)?)
    } else {
        let text = std::fs::read_to_string(Path::new(arg))?;
        Ok(serde_json::from_str(&text)?)
    }
}

pub fn parse<T: for<'de> Deserialize<'de>>(arg: &str) -> Result<T> {
    Ok(serde_json::from_value(load_json(arg)?)?)
}

pub fn parse_sequence(arg: &str) -> Result<SequenceModel> {
    parse::<SequenceInput>(arg)?.build()
}

pub fn parse_operator(arg: &str) -> Result<OperatorModel> {
    parse::<OperatorSpec>(arg)?.build()
}

pub fn parse_real_vec(arg: &str) -> Result<RealVec> {
    RealVec::new(parse::<Vec<f64>>(arg)?)
}
