//! JSON encoding of spec trees: one object per node, tagged by `"kind"`.
//! Leaves always print their bound and accept it as an optional field.

use super::{DomainTag, FnNode, FunctionSpec, SeqNode, SequenceSpec};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FnWire {
    Constant {
        domain: DomainTag,
        value: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bound: Option<f64>,
    },
    AdditivePeriodic {
        period: f64,
        profile: Vec<(f64, f64)>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bound: Option<f64>,
    },
    LogPeriodicBlocks {
        base: f64,
        pattern: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bound: Option<f64>,
    },
    Sinusoid {
        amplitude: f64,
        period: f64,
        #[serde(default)]
        phase: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bound: Option<f64>,
    },
    LogSinusoid {
        amplitude: f64,
        ratio: f64,
        #[serde(default)]
        phase: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bound: Option<f64>,
    },
    Sum {
        left: Box<FunctionSpec>,
        right: Box<FunctionSpec>,
    },
    Scale {
        factor: f64,
        inner: Box<FunctionSpec>,
    },
    Shift {
        offset: f64,
        inner: Box<FunctionSpec>,
    },
    Dilate {
        factor: f64,
        inner: Box<FunctionSpec>,
    },
    LiftedSequence {
        sequence: SequenceSpec,
    },
    ExpWarp {
        inner: Box<FunctionSpec>,
    },
}

fn bounded(spec: FunctionSpec, bound: Option<f64>) -> Result<FunctionSpec> {
    match bound {
        Some(b) => spec.with_bound(b),
        None => Ok(spec),
    }
}

impl TryFrom<FnWire> for FunctionSpec {
    type Error = Error;

    fn try_from(w: FnWire) -> Result<Self> {
        match w {
            FnWire::Constant { domain, value, bound } => bounded(FunctionSpec::constant(domain, value)?, bound),
            FnWire::AdditivePeriodic { period, profile, bound } => {
                bounded(FunctionSpec::additive_periodic(period, &profile)?, bound)
            }
            FnWire::LogPeriodicBlocks { base, pattern, bound } => {
                bounded(FunctionSpec::log_periodic_blocks(base, &pattern)?, bound)
            }
            FnWire::Sinusoid {
                amplitude,
                period,
                phase,
                bound,
            } => bounded(FunctionSpec::sinusoid(amplitude, period, phase)?, bound),
            FnWire::LogSinusoid {
                amplitude,
                ratio,
                phase,
                bound,
            } => bounded(FunctionSpec::log_sinusoid(amplitude, ratio, phase)?, bound),
            FnWire::Sum { left, right } => FunctionSpec::sum(*left, *right),
            FnWire::Scale { factor, inner } => FunctionSpec::scale(factor, *inner),
            FnWire::Shift { offset, inner } => FunctionSpec::shift(offset, *inner),
            FnWire::Dilate { factor, inner } => FunctionSpec::dilate(factor, *inner),
            FnWire::LiftedSequence { sequence } => Ok(FunctionSpec::lifted(sequence)),
            FnWire::ExpWarp { inner } => FunctionSpec::exp_warp(*inner),
        }
    }
}

impl From<FunctionSpec> for FnWire {
    fn from(f: FunctionSpec) -> Self {
        let bound = Some(f.bound);
        match f.node {
            FnNode::Constant { value } => FnWire::Constant {
                domain: f.domain,
                value,
                bound,
            },
            FnNode::AdditivePeriodic { period, profile } => FnWire::AdditivePeriodic {
                period,
                profile: profile.iter().map(|s| (s.start, s.value)).collect(),
                bound,
            },
            FnNode::LogPeriodicBlocks { base, pattern } => FnWire::LogPeriodicBlocks {
                base,
                pattern: pattern.to_string(),
                bound,
            },
            FnNode::Sinusoid {
                amplitude,
                period,
                phase,
            } => FnWire::Sinusoid {
                amplitude,
                period,
                phase,
                bound,
            },
            FnNode::LogSinusoid {
                amplitude,
                ratio,
                phase,
            } => FnWire::LogSinusoid {
                amplitude,
                ratio,
                phase,
                bound,
            },
            FnNode::Sum(left, right) => FnWire::Sum { left, right },
            FnNode::Scale { factor, inner } => FnWire::Scale { factor, inner },
            FnNode::Shift { offset, inner } => FnWire::Shift { offset, inner },
            FnNode::Dilate { factor, inner } => FnWire::Dilate { factor, inner },
            FnNode::LiftedSequence(sequence) => FnWire::LiftedSequence { sequence },
            FnNode::ExpWarp(inner) => FnWire::ExpWarp { inner },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TailWire {
    PeriodicWord { values: Vec<f64> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SeqWire {
    PeriodicWord {
        values: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bound: Option<f64>,
    },
    ArithmeticIndicator {
        residue: u64,
        modulus: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bound: Option<f64>,
    },
    ExponentBlocks {
        base: u64,
        pattern: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bound: Option<f64>,
    },
    ExplicitThenPeriodic {
        prefix: Vec<f64>,
        tail: TailWire,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bound: Option<f64>,
    },
    AffineCombo {
        factor: f64,
        inner: Box<SequenceSpec>,
        #[serde(default)]
        offset: f64,
    },
}

fn seq_bounded(seq: SequenceSpec, bound: Option<f64>) -> Result<SequenceSpec> {
    match bound {
        Some(b) => seq.with_bound(b),
        None => Ok(seq),
    }
}

impl TryFrom<SeqWire> for SequenceSpec {
    type Error = Error;

    fn try_from(w: SeqWire) -> Result<Self> {
        match w {
            SeqWire::PeriodicWord { values, bound } => seq_bounded(SequenceSpec::periodic_word(&values)?, bound),
            SeqWire::ArithmeticIndicator {
                residue,
                modulus,
                bound,
            } => seq_bounded(SequenceSpec::arithmetic_indicator(residue, modulus)?, bound),
            SeqWire::ExponentBlocks { base, pattern, bound } => {
                seq_bounded(SequenceSpec::exponent_blocks(base, &pattern)?, bound)
            }
            SeqWire::ExplicitThenPeriodic {
                prefix,
                tail: TailWire::PeriodicWord { values },
                bound,
            } => seq_bounded(SequenceSpec::explicit_then_periodic(&prefix, &values)?, bound),
            SeqWire::AffineCombo { factor, inner, offset } => SequenceSpec::affine(factor, *inner, offset),
        }
    }
}

impl From<SequenceSpec> for SeqWire {
    fn from(s: SequenceSpec) -> Self {
        let bound = Some(s.bound);
        match s.node {
            SeqNode::PeriodicWord { values } => SeqWire::PeriodicWord { values, bound },
            SeqNode::ArithmeticIndicator { residue, modulus } => SeqWire::ArithmeticIndicator {
                residue,
                modulus,
                bound,
            },
            SeqNode::ExponentBlocks { base, pattern } => SeqWire::ExponentBlocks {
                base,
                pattern: pattern.to_string(),
                bound,
            },
            SeqNode::ExplicitThenPeriodic { prefix, tail } => SeqWire::ExplicitThenPeriodic {
                prefix,
                tail: TailWire::PeriodicWord { values: tail },
                bound,
            },
            SeqNode::AffineCombo { factor, inner, offset } => SeqWire::AffineCombo { factor, inner, offset },
        }
    }
}

const FN_KINDS: [&str; 11] = [
    "constant",
    "additive_periodic",
    "log_periodic_blocks",
    "sinusoid",
    "log_sinusoid",
    "sum",
    "scale",
    "shift",
    "dilate",
    "lifted_sequence",
    "exp_warp",
];

const SEQ_KINDS: [&str; 5] = [
    "periodic_word",
    "arithmetic_indicator",
    "exponent_blocks",
    "explicit_then_periodic",
    "affine_combo",
];

/// A parsed input file: either a function or a sequence spec.
#[derive(Debug, Clone, PartialEq)]
pub enum SpecInput {
    Function(FunctionSpec),
    Sequence(SequenceSpec),
}

impl SpecInput {
    /// Parse a spec document, telling functions from sequences by the root
    /// `"kind"` (the two kind sets are disjoint).
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        Self::from_value(value)
    }

    pub fn from_value(value: serde_json::Value) -> Result<Self> {
        let kind = value
            .get("kind")
            .and_then(|k| k.as_str())
            .ok_or_else(|| Error::Parse("spec object needs a string \"kind\" field".into()))?
            .to_owned();
        if FN_KINDS.contains(&kind.as_str()) {
            Ok(SpecInput::Function(serde_json::from_value(value).map_err(spec_or_parse)?))
        } else if SEQ_KINDS.contains(&kind.as_str()) {
            Ok(SpecInput::Sequence(serde_json::from_value(value).map_err(spec_or_parse)?))
        } else {
            Err(Error::Parse(format!("unknown kind {kind:?}")))
        }
    }

    pub fn to_json(&self) -> String {
        match self {
            SpecInput::Function(f) => f.to_json(),
            SpecInput::Sequence(s) => s.to_json(),
        }
    }

    pub fn to_value(&self) -> serde_json::Value {
        match self {
            SpecInput::Function(f) => serde_json::to_value(f),
            SpecInput::Sequence(s) => serde_json::to_value(s),
        }
        .expect("spec trees always serialize")
    }

    pub fn bound(&self) -> f64 {
        match self {
            SpecInput::Function(f) => f.bound(),
            SpecInput::Sequence(s) => s.bound(),
        }
    }
}

/// Validation failures surface through serde as custom messages; keep them
/// classified as spec errors rather than syntax errors.
fn spec_or_parse(e: serde_json::Error) -> Error {
    let msg = e.to_string();
    if msg.starts_with("invalid spec:") {
        Error::Spec(msg.trim_start_matches("invalid spec: ").to_owned())
    } else {
        Error::Parse(msg)
    }
}

impl FunctionSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(spec_or_parse)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec trees always serialize")
    }
}

impl SequenceSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(spec_or_parse)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec trees always serialize")
    }
}
