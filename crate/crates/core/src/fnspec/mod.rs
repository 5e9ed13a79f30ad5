//! Declarative bounded functions on `[0, ∞)` / `[1, ∞)` and bounded sequences on ℕ.
//!
//! A [`FunctionSpec`] is a small expression tree over a closed set of
//! generators. Every node has an exact pointwise value and a closed-form
//! antiderivative (plain, `dt/t`-weighted and `eᵗ`-weighted), so window
//! integrals of step-type specs are exact up to roundoff. Trees are immutable
//! once built; the constructors validate structure and certify `bound`.

mod breaks;
mod eval;
mod integrate;
mod seqsum;
mod transform;
mod wire;

pub use seqsum::Weight;
pub use transform::{discretize_v1, lift_v, transform_w, V1Sequence};
pub use wire::SpecInput;

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Which ambient half-line a function lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainTag {
    /// `[0, ∞)` with the translation action `x ↦ x + s`.
    Additive,
    /// `[1, ∞)` with the dilation action `x ↦ r·x`.
    Multiplicative,
}

impl DomainTag {
    /// Left end of the domain.
    pub fn origin(self) -> f64 {
        match self {
            DomainTag::Additive => 0.0,
            DomainTag::Multiplicative => 1.0,
        }
    }

    pub(crate) fn check(self, x: f64) -> Result<()> {
        if !x.is_finite() || x < self.origin() {
            return Err(Error::domain(format!(
                "x = {x} outside the {self:?} domain [{}, ∞)",
                self.origin()
            )));
        }
        Ok(())
    }
}

/// Non-empty boolean word, indexed cyclically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern(Vec<bool>);

impl Pattern {
    pub fn parse(word: &str) -> Result<Self> {
        let bits = word
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::spec(format!("pattern may only contain 0/1, got {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if bits.is_empty() {
            return Err(Error::spec("pattern must be non-empty"));
        }
        Ok(Pattern(bits))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Letter at cyclic index `k`.
    pub fn at(&self, k: i64) -> bool {
        self.0[k.rem_euclid(self.0.len() as i64) as usize]
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    fn any(&self) -> bool {
        self.0.iter().any(|&b| b)
    }
}

impl std::fmt::Display for Pattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// One piece of a periodic step profile: value `value` from `start` up to the
/// next piece (or the period).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub start: f64,
    pub value: f64,
}

/// Node of a [`FunctionSpec`] tree.
#[derive(Debug, Clone, PartialEq)]
pub enum FnNode {
    Constant {
        value: f64,
    },
    /// `profile(x mod period)`.
    AdditivePeriodic {
        period: f64,
        profile: Vec<Step>,
    },
    /// Indicator of the blocks `[bᵏ, bᵏ⁺¹)` whose index `k` hits a `1` in the pattern.
    LogPeriodicBlocks {
        base: f64,
        pattern: Pattern,
    },
    /// `A·sin(2πx/T + φ)`.
    Sinusoid {
        amplitude: f64,
        period: f64,
        phase: f64,
    },
    /// `A·sin(2π·ln x / ln c + φ)`.
    LogSinusoid {
        amplitude: f64,
        ratio: f64,
        phase: f64,
    },
    Sum(Box<FunctionSpec>, Box<FunctionSpec>),
    Scale {
        factor: f64,
        inner: Box<FunctionSpec>,
    },
    /// `inner(x + offset)`.
    Shift {
        offset: f64,
        inner: Box<FunctionSpec>,
    },
    /// `inner(factor·x)`.
    Dilate {
        factor: f64,
        inner: Box<FunctionSpec>,
    },
    /// `seq(⌊x⌋)`.
    LiftedSequence(SequenceSpec),
    /// `inner(eˣ)`; the additive image of a multiplicative node with no
    /// structural counterpart.
    ExpWarp(Box<FunctionSpec>),
}

/// A bounded function on one of the two half-lines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "wire::FnWire", into = "wire::FnWire")]
pub struct FunctionSpec {
    domain: DomainTag,
    bound: f64,
    node: FnNode,
}

fn finite(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::spec(format!("{name} must be finite, got {v}")))
    }
}

impl FunctionSpec {
    pub fn domain(&self) -> DomainTag {
        self.domain
    }

    /// Certified upper bound of `|f|`.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn node(&self) -> &FnNode {
        &self.node
    }

    pub fn constant(domain: DomainTag, value: f64) -> Result<Self> {
        let value = finite("constant value", value)?;
        Ok(Self {
            domain,
            bound: value.abs(),
            node: FnNode::Constant { value },
        })
    }

    /// Periodic step function on `[0, ∞)`. `profile` lists `(start, value)`
    /// pairs; starts must begin at 0 and increase strictly inside `[0, period)`.
    pub fn additive_periodic(period: f64, profile: &[(f64, f64)]) -> Result<Self> {
        let period = finite("period", period)?;
        if period <= 0.0 {
            return Err(Error::spec("period must be positive"));
        }
        if profile.is_empty() {
            return Err(Error::spec("profile must be non-empty"));
        }
        if profile[0].0 != 0.0 {
            return Err(Error::spec("profile must start at breakpoint 0"));
        }
        let mut steps = Vec::with_capacity(profile.len());
        for (i, &(start, value)) in profile.iter().enumerate() {
            finite("profile breakpoint", start)?;
            finite("profile value", value)?;
            if start >= period || (i > 0 && start <= profile[i - 1].0) {
                return Err(Error::spec(
                    "profile breakpoints must increase strictly within [0, period)",
                ));
            }
            steps.push(Step { start, value });
        }
        let bound = steps.iter().fold(0.0f64, |m, s| m.max(s.value.abs()));
        Ok(Self {
            domain: DomainTag::Additive,
            bound,
            node: FnNode::AdditivePeriodic {
                period,
                profile: steps,
            },
        })
    }

    pub fn log_periodic_blocks(base: f64, pattern: &str) -> Result<Self> {
        let base = finite("base", base)?;
        if base <= 1.0 {
            return Err(Error::spec("log-periodic base must exceed 1"));
        }
        let pattern = Pattern::parse(pattern)?;
        let bound = if pattern.any() { 1.0 } else { 0.0 };
        Ok(Self {
            domain: DomainTag::Multiplicative,
            bound,
            node: FnNode::LogPeriodicBlocks { base, pattern },
        })
    }

    pub fn sinusoid(amplitude: f64, period: f64, phase: f64) -> Result<Self> {
        let amplitude = finite("amplitude", amplitude)?;
        let period = finite("period", period)?;
        let phase = finite("phase", phase)?;
        if period <= 0.0 {
            return Err(Error::spec("period must be positive"));
        }
        Ok(Self {
            domain: DomainTag::Additive,
            bound: amplitude.abs(),
            node: FnNode::Sinusoid {
                amplitude,
                period,
                phase,
            },
        })
    }

    pub fn log_sinusoid(amplitude: f64, ratio: f64, phase: f64) -> Result<Self> {
        let amplitude = finite("amplitude", amplitude)?;
        let ratio = finite("ratio", ratio)?;
        let phase = finite("phase", phase)?;
        if ratio <= 1.0 {
            return Err(Error::spec("multiplicative period must exceed 1"));
        }
        Ok(Self {
            domain: DomainTag::Multiplicative,
            bound: amplitude.abs(),
            node: FnNode::LogSinusoid {
                amplitude,
                ratio,
                phase,
            },
        })
    }

    pub fn sum(left: FunctionSpec, right: FunctionSpec) -> Result<Self> {
        if left.domain != right.domain {
            return Err(Error::spec(format!(
                "sum of {:?} and {:?} functions",
                left.domain, right.domain
            )));
        }
        Ok(Self {
            domain: left.domain,
            bound: left.bound + right.bound,
            node: FnNode::Sum(Box::new(left), Box::new(right)),
        })
    }

    pub fn scale(factor: f64, inner: FunctionSpec) -> Result<Self> {
        let factor = finite("scale factor", factor)?;
        Ok(Self {
            domain: inner.domain,
            bound: factor.abs() * inner.bound,
            node: FnNode::Scale {
                factor,
                inner: Box::new(inner),
            },
        })
    }

    pub fn shift(offset: f64, inner: FunctionSpec) -> Result<Self> {
        let offset = finite("shift", offset)?;
        if offset < 0.0 {
            return Err(Error::spec("shift must be non-negative"));
        }
        if inner.domain != DomainTag::Additive {
            return Err(Error::spec("shift applies to additive functions only"));
        }
        Ok(Self {
            domain: DomainTag::Additive,
            bound: inner.bound,
            node: FnNode::Shift {
                offset,
                inner: Box::new(inner),
            },
        })
    }

    pub fn dilate(factor: f64, inner: FunctionSpec) -> Result<Self> {
        let factor = finite("dilation", factor)?;
        if factor < 1.0 {
            return Err(Error::spec("dilation factor must be at least 1"));
        }
        if inner.domain != DomainTag::Multiplicative {
            return Err(Error::spec("dilation applies to multiplicative functions only"));
        }
        Ok(Self {
            domain: DomainTag::Multiplicative,
            bound: inner.bound,
            node: FnNode::Dilate {
                factor,
                inner: Box::new(inner),
            },
        })
    }

    pub fn lifted(seq: SequenceSpec) -> Self {
        Self {
            domain: DomainTag::Multiplicative,
            bound: seq.bound,
            node: FnNode::LiftedSequence(seq),
        }
    }

    pub fn exp_warp(inner: FunctionSpec) -> Result<Self> {
        if inner.domain != DomainTag::Multiplicative {
            return Err(Error::spec("exp-warp needs a multiplicative inner function"));
        }
        Ok(Self {
            domain: DomainTag::Additive,
            bound: inner.bound,
            node: FnNode::ExpWarp(Box::new(inner)),
        })
    }

    /// Replace the bound of a leaf with a caller-supplied, looser value.
    pub fn with_bound(mut self, bound: f64) -> Result<Self> {
        if !self.is_leaf() {
            return Err(Error::spec("bound is derived for composite nodes"));
        }
        if !bound.is_finite() || bound < self.bound {
            return Err(Error::spec(format!(
                "bound {bound} is below the leaf's supremum {}",
                self.bound
            )));
        }
        self.bound = bound;
        Ok(self)
    }

    pub fn is_leaf(&self) -> bool {
        matches!(
            self.node,
            FnNode::Constant { .. }
                | FnNode::AdditivePeriodic { .. }
                | FnNode::LogPeriodicBlocks { .. }
                | FnNode::Sinusoid { .. }
                | FnNode::LogSinusoid { .. }
        )
    }

    /// Negation, used by the lower functionals.
    pub fn negated(&self) -> Self {
        Self {
            domain: self.domain,
            bound: self.bound,
            node: FnNode::Scale {
                factor: -1.0,
                inner: Box::new(self.clone()),
            },
        }
    }

    /// True when no sinusoidal component occurs, i.e. the function is a
    /// step function with breakpoints reported by [`FunctionSpec::breakpoints`].
    pub fn is_step(&self) -> bool {
        match &self.node {
            FnNode::Sinusoid { .. } | FnNode::LogSinusoid { .. } => false,
            FnNode::Constant { .. }
            | FnNode::AdditivePeriodic { .. }
            | FnNode::LogPeriodicBlocks { .. }
            | FnNode::LiftedSequence(_) => true,
            FnNode::Sum(l, r) => l.is_step() && r.is_step(),
            FnNode::Scale { inner, .. }
            | FnNode::Shift { inner, .. }
            | FnNode::Dilate { inner, .. }
            | FnNode::ExpWarp(inner) => inner.is_step(),
        }
    }

    /// Tree depth; a leaf has depth 1.
    pub fn depth(&self) -> usize {
        match &self.node {
            FnNode::Sum(l, r) => 1 + l.depth().max(r.depth()),
            FnNode::Scale { inner, .. }
            | FnNode::Shift { inner, .. }
            | FnNode::Dilate { inner, .. }
            | FnNode::ExpWarp(inner) => 1 + inner.depth(),
            FnNode::LiftedSequence(s) => 1 + s.depth(),
            _ => 1,
        }
    }
}

/// Node of a [`SequenceSpec`] tree.
#[derive(Debug, Clone, PartialEq)]
pub enum SeqNode {
    PeriodicWord {
        values: Vec<f64>,
    },
    /// `1` on `n ≡ residue (mod modulus)`, else `0`.
    ArithmeticIndicator {
        residue: u64,
        modulus: u64,
    },
    /// `1` on `n ∈ [bᵏ, bᵏ⁺¹)` when pattern[k] is set; `f(0) = 0`.
    ExponentBlocks {
        base: u64,
        pattern: Pattern,
    },
    /// Finite prefix, then a periodic word starting at `n = prefix.len()`.
    ExplicitThenPeriodic {
        prefix: Vec<f64>,
        tail: Vec<f64>,
    },
    /// `factor·inner(n) + offset`.
    AffineCombo {
        factor: f64,
        inner: Box<SequenceSpec>,
        offset: f64,
    },
}

/// A bounded real sequence on `ℕ₀`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "wire::SeqWire", into = "wire::SeqWire")]
pub struct SequenceSpec {
    bound: f64,
    node: SeqNode,
}

fn all_finite(name: &str, values: &[f64]) -> Result<()> {
    values.iter().try_for_each(|&v| finite(name, v).map(|_| ()))
}

fn sup_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

impl SequenceSpec {
    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn node(&self) -> &SeqNode {
        &self.node
    }

    pub fn periodic_word(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::spec("periodic word must be non-empty"));
        }
        all_finite("word value", values)?;
        Ok(Self {
            bound: sup_abs(values),
            node: SeqNode::PeriodicWord {
                values: values.to_vec(),
            },
        })
    }

    pub fn arithmetic_indicator(residue: u64, modulus: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::spec("modulus must be positive"));
        }
        Ok(Self {
            bound: 1.0,
            node: SeqNode::ArithmeticIndicator { residue, modulus },
        })
    }

    pub fn exponent_blocks(base: u64, pattern: &str) -> Result<Self> {
        if base < 2 {
            return Err(Error::spec("exponent-block base must be at least 2"));
        }
        let pattern = Pattern::parse(pattern)?;
        let bound = if pattern.any() { 1.0 } else { 0.0 };
        Ok(Self {
            bound,
            node: SeqNode::ExponentBlocks { base, pattern },
        })
    }

    pub fn explicit_then_periodic(prefix: &[f64], tail: &[f64]) -> Result<Self> {
        if tail.is_empty() {
            return Err(Error::spec("periodic tail must be non-empty"));
        }
        all_finite("prefix value", prefix)?;
        all_finite("tail value", tail)?;
        Ok(Self {
            bound: sup_abs(prefix).max(sup_abs(tail)),
            node: SeqNode::ExplicitThenPeriodic {
                prefix: prefix.to_vec(),
                tail: tail.to_vec(),
            },
        })
    }

    pub fn affine(factor: f64, inner: SequenceSpec, offset: f64) -> Result<Self> {
        let factor = finite("affine factor", factor)?;
        let offset = finite("affine offset", offset)?;
        Ok(Self {
            bound: factor.abs() * inner.bound + offset.abs(),
            node: SeqNode::AffineCombo {
                factor,
                inner: Box::new(inner),
                offset,
            },
        })
    }

    pub fn with_bound(mut self, bound: f64) -> Result<Self> {
        if matches!(self.node, SeqNode::AffineCombo { .. }) {
            return Err(Error::spec("bound is derived for composite nodes"));
        }
        if !bound.is_finite() || bound < self.bound {
            return Err(Error::spec(format!(
                "bound {bound} is below the sequence's supremum {}",
                self.bound
            )));
        }
        self.bound = bound;
        Ok(self)
    }

    pub fn negated(&self) -> Self {
        Self {
            bound: self.bound,
            node: SeqNode::AffineCombo {
                factor: -1.0,
                inner: Box::new(self.clone()),
                offset: 0.0,
            },
        }
    }

    pub fn depth(&self) -> usize {
        match &self.node {
            SeqNode::AffineCombo { inner, .. } => 1 + inner.depth(),
            _ => 1,
        }
    }

    /// The finite set of values the sequence takes (every generator is
    /// finitely valued).
    pub fn value_set(&self) -> Vec<f64> {
        let mut vals = match &self.node {
            SeqNode::PeriodicWord { values } => values.clone(),
            SeqNode::ArithmeticIndicator { modulus, .. } => {
                if *modulus == 1 {
                    vec![1.0]
                } else {
                    vec![0.0, 1.0]
                }
            }
            SeqNode::ExponentBlocks { .. } => vec![0.0, 1.0],
            SeqNode::ExplicitThenPeriodic { prefix, tail } => {
                prefix.iter().chain(tail.iter()).copied().collect()
            }
            SeqNode::AffineCombo {
                factor,
                inner,
                offset,
            } => inner
                .value_set()
                .into_iter()
                .map(|v| factor * v + offset)
                .collect(),
        };
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        vals
    }

    /// Whether this is the indicator of a set of integers.
    pub fn is_indicator(&self) -> bool {
        self.value_set().iter().all(|&v| v == 0.0 || v == 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors_reject_invalid_trees() {
        let add = FunctionSpec::constant(DomainTag::Additive, 1.0).unwrap();
        let mul = FunctionSpec::constant(DomainTag::Multiplicative, 1.0).unwrap();
        assert!(matches!(
            FunctionSpec::sum(add.clone(), mul.clone()),
            Err(Error::Spec(_))
        ));
        assert!(FunctionSpec::shift(1.0, mul.clone()).is_err());
        assert!(FunctionSpec::dilate(2.0, add.clone()).is_err());
        assert!(FunctionSpec::dilate(0.5, mul.clone()).is_err());
        assert!(FunctionSpec::shift(-1.0, add.clone()).is_err());
        assert!(FunctionSpec::exp_warp(add).is_err());
        assert!(FunctionSpec::log_periodic_blocks(1.0, "10").is_err());
        assert!(FunctionSpec::log_periodic_blocks(4.0, "").is_err());
        assert!(FunctionSpec::log_periodic_blocks(4.0, "12").is_err());
        assert!(FunctionSpec::additive_periodic(2.0, &[(0.5, 1.0)]).is_err());
        assert!(FunctionSpec::additive_periodic(2.0, &[(0.0, 1.0), (2.0, 0.0)]).is_err());
        assert!(FunctionSpec::sinusoid(1.0, 0.0, 0.0).is_err());
        assert!(FunctionSpec::constant(DomainTag::Additive, f64::NAN).is_err());
        assert!(SequenceSpec::arithmetic_indicator(0, 0).is_err());
        assert!(SequenceSpec::exponent_blocks(1, "1").is_err());
        assert!(SequenceSpec::periodic_word(&[]).is_err());
    }

    #[test]
    fn bounds_propagate_structurally() {
        let s = FunctionSpec::sinusoid(2.0, 1.0, 0.0).unwrap();
        let c = FunctionSpec::constant(DomainTag::Additive, -0.5).unwrap();
        let f = FunctionSpec::scale(-3.0, FunctionSpec::sum(s, c).unwrap()).unwrap();
        assert_eq!(f.bound(), 7.5);
        let seq = SequenceSpec::affine(2.0, SequenceSpec::periodic_word(&[1.0, -3.0]).unwrap(), 0.5)
            .unwrap();
        assert_eq!(seq.bound(), 6.5);
    }

    #[test]
    fn leaf_bounds_may_only_loosen() {
        let c = FunctionSpec::constant(DomainTag::Additive, 2.0).unwrap();
        assert!(c.clone().with_bound(1.0).is_err());
        assert_eq!(c.with_bound(3.0).unwrap().bound(), 3.0);
    }

    #[test]
    fn indicator_detection() {
        assert!(SequenceSpec::arithmetic_indicator(1, 3).unwrap().is_indicator());
        assert!(SequenceSpec::periodic_word(&[1.0, 0.0, 1.0]).unwrap().is_indicator());
        assert!(!SequenceSpec::periodic_word(&[0.5]).unwrap().is_indicator());
        let flipped = SequenceSpec::affine(
            -1.0,
            SequenceSpec::arithmetic_indicator(0, 2).unwrap(),
            1.0,
        )
        .unwrap();
        assert!(flipped.is_indicator());
    }
}
